//! Frozen-set construction.
//!
//! Two constructors are provided: an exact one for the binary erasure
//! channel, based on the Bhattacharyya recursion, and a Monte-Carlo one that
//! tallies genie-aided SC decision errors on any [`ChannelModel`]. Neither is
//! tied to a particular channel code; both just rank the `N` synthetic
//! channels and keep the most reliable ones unfrozen.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{trial_rng, ChannelModel};
use crate::error::{PolarError, Result};
use crate::index::{polar_transform, BinaryVector, CodeSpec};
use crate::sc::ScDecoder;
use crate::theta::Theta;
use rand::Rng;

/// How many indices to leave unfrozen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// Keep `⌈rate·N⌉` indices.
    Rate(f64),
    /// Keep every index with `Z ≤ 2^(−2^(n·β))`.
    Threshold { beta: f64 },
}

impl Target {
    fn validate(self) -> Result<Self> {
        match self {
            Target::Rate(r) if (0.0..=1.0).contains(&r) => Ok(self),
            Target::Threshold { beta } if beta.is_finite() && beta >= 0.0 => Ok(self),
            other => Err(PolarError::InvalidTarget(format!("{other:?}"))),
        }
    }

    /// `⌈rate·N⌉`, guarding against `rate·N` landing a hair above an integer.
    pub fn unfrozen_count(rate: f64, len: usize) -> usize {
        let k = ((rate * len as f64) - 1e-9).ceil().max(0.0) as usize;
        k.min(len)
    }
}

/// `Z` of every synthetic channel of BEC(ε), indexed like `u`.
///
/// Walking the index from `b_0` to `b_{n−1}`, a 0 bit maps `Z ↦ 2Z − Z²` and
/// a 1 bit maps `Z ↦ Z²`.
pub fn bec_bhattacharyya(n: usize, epsilon: f64) -> Vec<f64> {
    let mut z = vec![epsilon];
    for _ in 0..n {
        z = z
            .iter()
            .flat_map(|&v| [2.0 * v - v * v, v * v])
            .collect();
    }
    z
}

/// `Σ Z` with Neumaier compensation. The exact total is `N·ε`; plain
/// left-to-right summation of `2^12` terms drifts by several ulps of that.
pub fn bhattacharyya_total(z: &[f64]) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for &v in z {
        let t = sum + v;
        carry += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + carry
}

/// Indices ordered from most to least reliable: ascending `score`, and
/// among equal scores the higher index first.
fn reliability_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then_with(|| b.cmp(&a)));
    order
}

fn spec_from_scores(n: usize, scores: &[f64], keep: usize) -> Result<CodeSpec> {
    CodeSpec::from_unfrozen(n, reliability_order(scores).into_iter().take(keep))
}

/// Exact construction for BEC(ε).
pub fn construct_bec(n: usize, epsilon: f64, target: Target) -> Result<CodeSpec> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(PolarError::ProbabilityOutOfRange(epsilon));
    }
    let z = bec_bhattacharyya(n, epsilon);
    match target.validate()? {
        Target::Rate(rate) => spec_from_scores(n, &z, Target::unfrozen_count(rate, z.len())),
        Target::Threshold { beta } => {
            let bound = 2f64.powf(-(2f64.powf(n as f64 * beta)));
            CodeSpec::from_unfrozen(n, (0..z.len()).filter(|&i| z[i] <= bound))
        }
    }
}

/// Settings for the Monte-Carlo constructor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionConfig {
    pub n: usize,
    pub rate: f64,
    pub channel: ChannelModel,
    pub trials: u64,
    pub seed: u64,
}

/// Genie-aided SC error counts per index over `trials` random inputs.
///
/// Trial `t` draws its input and noise from [`trial_rng`]`(seed, t)`, so the
/// counts do not depend on how rayon schedules the trials.
pub fn genie_error_counts(n: usize, channel: &ChannelModel, trials: u64, seed: u64) -> Result<Vec<u64>> {
    let spec = CodeSpec::new(n, [])?;
    let len = spec.block_len();
    (0..trials)
        .into_par_iter()
        .map_init(
            || ScDecoder::<Theta>::new(spec.clone()),
            |decoder, t| -> Result<Vec<u64>> {
                let mut rng = trial_rng(seed, t);
                let mut u = BinaryVector::zeros(n)?;
                for i in 0..len {
                    u.set(i, rng.random::<bool>() as u8);
                }
                let priors = channel.emit(&polar_transform(&u), &mut rng);
                let errors = decoder.genie_errors(&priors, &u)?;
                Ok(errors.into_iter().map(u64::from).collect())
            },
        )
        .try_reduce(
            || vec![0; len],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )
}

/// Monte-Carlo construction: freezes the indices with the most genie-aided
/// errors, keeping `⌈rate·N⌉` unfrozen.
pub fn construct_monte_carlo(cfg: &ConstructionConfig) -> Result<CodeSpec> {
    if cfg.trials == 0 {
        return Err(PolarError::InvalidTarget("trials must be at least 1".into()));
    }
    cfg.channel.validated()?;
    Target::Rate(cfg.rate).validate()?;
    let counts = genie_error_counts(cfg.n, &cfg.channel, cfg.trials, cfg.seed)?;
    let scores: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    spec_from_scores(cfg.n, &scores, Target::unfrozen_count(cfg.rate, scores.len()))
}
