use std::path::PathBuf;
use std::process::{Command, Output};

fn polar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polar")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn spec_file(name: &str, n: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let p = path.to_str().unwrap();
    stdout(&polar(&["construct", "--n", n, "--rate", "0.5", "--channel", "bec:0.3", "--out", p]));
    path
}

#[test]
fn bad_configuration_exits_with_2() {
    let out = polar(&["simulate", "--n", "6", "--channel", "bsc:0.1", "--ternary"]);
    assert_eq!(out.status.code(), Some(2));
    let out = polar(&["construct", "--n", "4", "--channel", "bsc:0.1", "--beta", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn encode_then_decode_over_erasures() {
    let spec = spec_file("cli_roundtrip.spec", "5");
    let spec = spec.to_str().unwrap();
    let payload = "1011001110001101";
    for mode in ["systematic", "nonsystematic"] {
        let x = stdout(&polar(&["encode", "--spec", spec, "--mode", mode, "--input", payload]));
        let x = x.trim();
        assert_eq!(x.len(), 32);
        // Erase a handful of positions; SCL should still recover the payload.
        let received: String = x
            .chars()
            .enumerate()
            .map(|(i, c)| if i % 9 == 4 { 'e' } else { c })
            .collect();
        let decoded = stdout(&polar(&[
            "decode", "--spec", spec, "--mode", mode, "--received", &received, "--channel", "bec:0.3",
            "--decoder", "scl", "--list-size", "8",
        ]));
        assert_eq!(decoded.trim(), payload, "{mode}");
    }
}

#[test]
fn source_mode_round_trip() {
    let spec = spec_file("cli_source.spec", "3");
    let spec = spec.to_str().unwrap();
    let x = "01101001";
    let out = stdout(&polar(&["encode", "--spec", spec, "--mode", "source", "--input", x]));
    let codeword = out.lines().next().unwrap();
    // Priors that already point at x: the decoder only has to respect them.
    let priors: Vec<&str> = x.chars().map(|c| if c == '0' { "0.9" } else { "-0.9" }).collect();
    let decoded = stdout(&polar(&[
        "decode", "--spec", spec, "--mode", "source", "--codeword", codeword, "--priors", &priors.join(","),
    ]));
    assert_eq!(decoded.trim(), x);
}
