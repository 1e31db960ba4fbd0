//! Result rows in CSV and JSON form.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! results always serialize to equal bytes.

use serde::Serialize;

use crate::sim::{SimConfig, SimResult};

pub const CSV_COLUMNS: [&str; 11] = [
    "n",
    "rate",
    "channel",
    "param",
    "decoder",
    "L",
    "trials",
    "fer",
    "ber",
    "avg_decode_us",
    "seed",
];

pub fn csv_header() -> String {
    CSV_COLUMNS.join(",")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub n: usize,
    pub rate: f64,
    pub channel: String,
    pub param: f64,
    pub decoder: String,
    #[serde(rename = "L")]
    pub list_size: usize,
    pub trials: u64,
    pub fer: f64,
    pub ber: f64,
    /// Empty in CSV and `null` in JSON unless timing was requested.
    pub avg_decode_us: Option<f64>,
    pub seed: u64,
}

impl ResultRow {
    pub fn new(cfg: &SimConfig, result: &SimResult) -> Self {
        ResultRow {
            n: cfg.spec.n(),
            rate: cfg.spec.rate(),
            channel: cfg.channel.name().to_string(),
            param: cfg.channel.parameter(),
            decoder: cfg.decoder.name().to_string(),
            list_size: cfg.decoder.list_size(),
            trials: result.trials,
            fer: result.fer,
            ber: result.ber,
            avg_decode_us: result.avg_decode_us,
            seed: cfg.seed,
        }
    }

    pub fn to_csv(&self) -> String {
        let timing = self.avg_decode_us.map(|t| format!("{t:.3}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.rate,
            self.channel,
            self.param,
            self.decoder,
            self.list_size,
            self.trials,
            self.fer,
            self.ber,
            timing,
            self.seed
        )
    }
}

/// Header plus one line per row, newline-terminated.
pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = csv_header();
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

pub fn to_json(rows: &[ResultRow]) -> serde_json::Result<String> {
    serde_json::to_string_pretty(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(timing: Option<f64>) -> ResultRow {
        ResultRow {
            n: 10,
            rate: 0.5,
            channel: "bec".into(),
            param: 0.3,
            decoder: "scl".into(),
            list_size: 8,
            trials: 10000,
            fer: 0.0123,
            ber: 0.001,
            avg_decode_us: timing,
            seed: 7,
        }
    }

    #[test]
    fn csv_layout() {
        assert_eq!(csv_header(), "n,rate,channel,param,decoder,L,trials,fer,ber,avg_decode_us,seed");
        assert_eq!(row(None).to_csv(), "10,0.5,bec,0.3,scl,8,10000,0.0123,0.001,,7");
        assert_eq!(row(Some(12.34567)).to_csv(), "10,0.5,bec,0.3,scl,8,10000,0.0123,0.001,12.346,7");
        let text = to_csv(&[row(None)]);
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().next().unwrap().split(',').count(), row(None).to_csv().split(',').count());
    }

    #[test]
    fn json_mirror() {
        let v: serde_json::Value = serde_json::from_str(&to_json(&[row(None)]).unwrap()).unwrap();
        assert_eq!(v[0]["L"], 8);
        assert!(v[0]["avg_decode_us"].is_null());
        for col in CSV_COLUMNS {
            assert!(v[0].get(col).is_some(), "{col}");
        }
    }
}
