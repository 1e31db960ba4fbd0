//! Decode-time scaling over block length and list size.
//!
//! Each configuration decodes a fixed set of pre-generated frames several
//! times over and keeps the fastest pass, which filters out scheduler noise
//! better than a mean over one pass.

use std::time::Instant;

use polar_sym::channel::{trial_rng, ChannelModel};
use polar_sym::codec::{DecoderKind, Engine};
use polar_sym::construction::{construct_bec, Target};
use polar_sym::{polar_transform, BinaryVector, Theta};
use rand::Rng;
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::sim::design_epsilon;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub n_values: Vec<usize>,
    /// List sizes for SCL rows; SC is always timed as well.
    pub list_sizes: Vec<usize>,
    pub channel: ChannelModel,
    pub rate: f64,
    /// Frames per timed pass.
    pub frames: usize,
    /// Timed passes per configuration; the fastest is reported.
    pub passes: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            n_values: (4..=12).collect(),
            list_sizes: vec![2, 4, 8],
            channel: ChannelModel::Bec { epsilon: 0.3 },
            rate: 0.5,
            frames: 32,
            passes: 5,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub decoder: String,
    pub n: usize,
    #[serde(rename = "L")]
    pub list_size: usize,
    pub mean_us: f64,
    /// Mean time divided by `N log2 N`, in nanoseconds.
    pub ns_per_n_log_n: f64,
    /// Mean time divided by `L N log2 N`, in nanoseconds.
    pub ns_per_l_n_log_n: f64,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str = "decoder,n,L,mean_us,ns_per_nlogn,ns_per_lnlogn";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{:.3},{:.4},{:.4}",
            self.decoder, self.n, self.list_size, self.mean_us, self.ns_per_n_log_n, self.ns_per_l_n_log_n
        )
    }
}

fn frames(n: usize, cfg: &BenchConfig) -> Result<Vec<Vec<Theta>>> {
    (0..cfg.frames as u64)
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let bits: Vec<u8> = (0..1usize << n).map(|_| rng.random::<bool>() as u8).collect();
            let x = polar_transform(&BinaryVector::with_depth(n, &bits)?);
            Ok(cfg.channel.emit(&x, &mut rng))
        })
        .collect()
}

/// Mean seconds per decode for one configuration.
pub fn time_decoder(n: usize, kind: DecoderKind, cfg: &BenchConfig) -> Result<f64> {
    let spec = construct_bec(n, design_epsilon(&cfg.channel), Target::Rate(cfg.rate))?;
    // Priors come from random inputs while the frozen values stay zero: the
    // decoder's work does not depend on whether the frame is a codeword.
    let frozen = vec![0u8; spec.frozen().len()];
    let inputs = frames(n, cfg)?;
    let mut engine = Engine::new(&spec, kind)?;
    engine.decode(&inputs[0], &frozen, None)?;
    let mut best = f64::INFINITY;
    for _ in 0..cfg.passes.max(1) {
        let start = Instant::now();
        for priors in &inputs {
            std::hint::black_box(engine.decode(priors, &frozen, None)?);
        }
        best = best.min(start.elapsed().as_secs_f64() / inputs.len() as f64);
    }
    Ok(best)
}

/// Times SC at every `n`, and SCL at every `(n, L)`.
pub fn bench_scaling(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.frames == 0 || cfg.n_values.is_empty() {
        return Err(HarnessError::Config("bench needs at least one frame and one n".into()));
    }
    let mut rows = Vec::new();
    for &n in &cfg.n_values {
        let kinds = std::iter::once(DecoderKind::Sc { ternary: false }).chain(
            cfg.list_sizes
                .iter()
                .map(|&list_size| DecoderKind::Scl { list_size, ternary: false }),
        );
        for kind in kinds {
            let secs = time_decoder(n, kind, cfg)?;
            let big_n = (1usize << n) as f64;
            let n_log_n = big_n * (n.max(1) as f64);
            let l = kind.list_size() as f64;
            rows.push(BenchRow {
                decoder: kind.name().to_string(),
                n,
                list_size: kind.list_size(),
                mean_us: secs * 1e6,
                ns_per_n_log_n: secs * 1e9 / n_log_n,
                ns_per_l_n_log_n: secs * 1e9 / (l * n_log_n),
            });
        }
    }
    Ok(rows)
}
