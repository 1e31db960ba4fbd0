//! Memoryless binary-input channels and the priors `θ` they induce.
//!
//! With a uniform input the posterior of a received symbol is
//! `P(x = 0 | y) = P(y | 0) / (P(y | 0) + P(y | 1))`, so each output maps
//! to `θ = 2 P(0 | y) − 1`:
//!
//! * BSC(p): `θ = ±(1 − 2p)`, positive when `y = 0`.
//! * BEC(ε): `θ = ±1` for an intact symbol, `0` for an erasure.
//! * BiAWGN(σ): `x ↦ 1 − 2x`, `y = ±1 + σ·z`, `θ = 2 / (1 + e^{−2y/σ²}) − 1`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{PolarError, Result};
use crate::index::BinaryVector;
use crate::theta::Theta;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelModel {
    Bsc { p: f64 },
    Bec { epsilon: f64 },
    #[serde(rename = "awgn")]
    BiAwgn { sigma: f64 },
}

impl ChannelModel {
    pub fn bsc(p: f64) -> Result<Self> {
        ChannelModel::Bsc { p }.validated()
    }

    pub fn bec(epsilon: f64) -> Result<Self> {
        ChannelModel::Bec { epsilon }.validated()
    }

    pub fn bi_awgn(sigma: f64) -> Result<Self> {
        ChannelModel::BiAwgn { sigma }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            ChannelModel::Bsc { p } => (0.0..=0.5).contains(&p),
            ChannelModel::Bec { epsilon } => (0.0..=1.0).contains(&epsilon),
            ChannelModel::BiAwgn { sigma } => sigma > 0.0 && sigma.is_finite(),
        };
        if ok {
            Ok(self)
        } else {
            Err(PolarError::InvalidChannel(format!("parameter out of range in {self}")))
        }
    }

    /// Short name used in CLI strings and result tables.
    pub fn name(&self) -> &'static str {
        match self {
            ChannelModel::Bsc { .. } => "bsc",
            ChannelModel::Bec { .. } => "bec",
            ChannelModel::BiAwgn { .. } => "awgn",
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            ChannelModel::Bsc { p } => p,
            ChannelModel::Bec { epsilon } => epsilon,
            ChannelModel::BiAwgn { sigma } => sigma,
        }
    }

    /// Sends one bit and returns the prior of the received symbol.
    pub fn emit_bit<R: Rng + ?Sized>(&self, bit: u8, rng: &mut R) -> Theta {
        let sign = if bit == 0 { 1.0 } else { -1.0 };
        match *self {
            ChannelModel::Bsc { p } => {
                let flipped = rng.random::<f64>() < p;
                let received = if flipped { -sign } else { sign };
                Theta::new(received * (1.0 - 2.0 * p)).expect("|1 - 2p| <= 1")
            }
            ChannelModel::Bec { epsilon } => {
                if rng.random::<f64>() < epsilon {
                    Theta::ZERO
                } else {
                    Theta::certain(bit)
                }
            }
            ChannelModel::BiAwgn { sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                awgn_theta(sign + sigma * z, sigma)
            }
        }
    }

    /// Sends `x` symbol by symbol.
    pub fn emit<R: Rng + ?Sized>(&self, x: &BinaryVector, rng: &mut R) -> Vec<Theta> {
        x.iter().map(|bit| self.emit_bit(bit, rng)).collect()
    }
}

/// Prior for a BiAWGN output `y` at noise level `sigma`.
pub fn awgn_theta(y: f64, sigma: f64) -> Theta {
    let p0 = 1.0 / (1.0 + (-2.0 * y / (sigma * sigma)).exp());
    Theta::new(2.0 * p0 - 1.0).expect("2p - 1 lies in [-1, 1]")
}

impl fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name(), self.parameter())
    }
}

impl FromStr for ChannelModel {
    type Err = PolarError;

    /// Parses `bsc:P`, `bec:EPS` or `awgn:SIGMA`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| PolarError::InvalidChannel(format!("expected KIND:PARAM, got {s:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| PolarError::InvalidChannel(format!("bad parameter in {s:?}")))?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "bsc" => ChannelModel::bsc(value),
            "bec" => ChannelModel::bec(value),
            "awgn" | "biawgn" => ChannelModel::bi_awgn(value),
            other => Err(PolarError::InvalidChannel(format!("unknown channel kind {other:?}"))),
        }
    }
}

/// Generator for trial `trial` of a run seeded with `seed`: one ChaCha8
/// key per seed, one stream per trial, so trials can run in any order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bsc_prior() {
        let ch = ChannelModel::bsc(0.1).unwrap();
        let mut rng = trial_rng(1, 0);
        let zeros = BinaryVector::zeros(10).unwrap();
        for t in ch.emit(&zeros, &mut rng) {
            assert!((t.value().abs() - 0.8).abs() < 1e-15);
        }
    }

    #[test]
    fn noiseless_channels_are_certain() {
        let x = BinaryVector::from_bits(&[0, 1, 1, 0, 1, 0, 0, 1]).unwrap();
        let mut rng = trial_rng(7, 3);
        for ch in [ChannelModel::bsc(0.0).unwrap(), ChannelModel::bec(0.0).unwrap()] {
            let priors = ch.emit(&x, &mut rng);
            for (t, bit) in priors.iter().zip(x.iter()) {
                assert_eq!(*t, Theta::certain(bit));
            }
        }
    }

    #[test]
    fn bec_is_ternary_and_erases_at_rate() {
        let ch = ChannelModel::bec(0.3).unwrap();
        let mut rng = trial_rng(11, 0);
        let x = BinaryVector::zeros(14).unwrap();
        let priors = ch.emit(&x, &mut rng);
        let erased = priors.iter().filter(|t| t.value() == 0.0).count();
        assert!(priors.iter().all(|t| t.value() == 0.0 || t.value() == 1.0));
        let rate = erased as f64 / priors.len() as f64;
        assert!((rate - 0.3).abs() < 0.02, "erasure rate {rate}");
        assert_eq!(ChannelModel::bec(1.0).unwrap().emit_bit(1, &mut rng), Theta::ZERO);
    }

    #[test]
    fn awgn_prior_matches_likelihood_ratio() {
        let sigma: f64 = 0.8;
        for y in [-2.0, -0.3, 0.0, 0.5, 3.0] {
            let l0 = (-(y - 1.0) * (y - 1.0) / (2.0 * sigma * sigma)).exp();
            let l1 = (-(y + 1.0) * (y + 1.0) / (2.0 * sigma * sigma)).exp();
            let expect = (l0 - l1) / (l0 + l1);
            assert!((awgn_theta(y, sigma).value() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("bsc:0.1".parse::<ChannelModel>().unwrap(), ChannelModel::Bsc { p: 0.1 });
        assert_eq!("bec:0.3".parse::<ChannelModel>().unwrap(), ChannelModel::Bec { epsilon: 0.3 });
        assert_eq!("awgn:0.8".parse::<ChannelModel>().unwrap(), ChannelModel::BiAwgn { sigma: 0.8 });
        assert_eq!(ChannelModel::Bec { epsilon: 0.3 }.to_string(), "bec:0.3");
        for bad in ["bsc:0.6", "bec:-0.1", "awgn:0", "foo:1", "bsc", "bec:x"] {
            assert!(bad.parse::<ChannelModel>().is_err(), "{bad}");
        }
    }

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(5, 1).random()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let b: u64 = trial_rng(5, 2).random();
        assert_ne!(a[0], b);
    }
}
