use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use polar_sym::channel::{trial_rng, ChannelModel};
use polar_sym::codec::{source_decode, source_encode, ChannelCode, DecoderKind, Engine, OuterParity};
use polar_sym::construction::genie_error_counts;
use polar_sym::{polar_transform, BinaryVector, CodeSpec};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Which end-to-end configuration a run exercises, and with it the frame
/// error criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Source coding with side information: error when `x̂ ≠ x`.
    Source,
    /// Systematic channel coding: error when `x̂ ≠ x`.
    Systematic,
    /// Non-systematic channel coding: error when `û_{I_0} ≠ u_{I_0}`.
    Nonsystematic,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Source => "source",
            Mode::Systematic => "systematic",
            Mode::Nonsystematic => "nonsystematic",
        })
    }
}

impl FromStr for Mode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source" => Ok(Mode::Source),
            "systematic" => Ok(Mode::Systematic),
            "nonsystematic" | "non-systematic" => Ok(Mode::Nonsystematic),
            other => Err(HarnessError::Config(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub spec: CodeSpec,
    pub mode: Mode,
    pub decoder: DecoderKind,
    pub channel: ChannelModel,
    pub trials: u64,
    pub seed: u64,
    pub crc: Option<OuterParity>,
    /// Measure wall-clock time per decode. Off by default because timings
    /// are the one output that differs between otherwise identical runs.
    pub timing: bool,
    /// Also tally per-index genie-aided SC errors over the same trial count.
    pub genie: bool,
}

impl SimConfig {
    pub fn new(spec: CodeSpec, mode: Mode, decoder: DecoderKind, channel: ChannelModel) -> Self {
        SimConfig {
            spec,
            mode,
            decoder,
            channel,
            trials: 1000,
            seed: 0,
            crc: None,
            timing: false,
            genie: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.decoder.list_size() == 0 {
            return Err(HarnessError::Config("list size must be at least 1".into()));
        }
        self.channel.validated()?;
        if let Some(crc) = &self.crc {
            let room = match self.mode {
                Mode::Source => usize::MAX,
                _ => self.spec.unfrozen().len(),
            };
            if crc.width() > room {
                return Err(HarnessError::Config(format!(
                    "{}-bit CRC does not fit in {} message positions",
                    crc.width(),
                    room
                )));
            }
        }
        if self.decoder.ternary() && !matches!(self.channel, ChannelModel::Bec { .. }) {
            return Err(HarnessError::Config(
                "ternary decoding needs priors in {-1, 0, 1}, i.e. a BEC".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub trials: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    /// Bits compared per trial: `N` in source mode, the payload otherwise.
    pub bits_per_trial: u64,
    pub fer: f64,
    pub ber: f64,
    /// Trials whose selected output failed the outer parity.
    pub parity_failures: u64,
    /// Trials in which list renormalization met an all-zero pool.
    pub degenerate: u64,
    /// Mean decode wall time in microseconds, when timing was requested.
    pub avg_decode_us: Option<f64>,
    pub genie_errors: Option<Vec<u64>>,
}

impl SimResult {
    /// Standard error of the FER estimate.
    pub fn fer_sigma(&self) -> f64 {
        (self.fer * (1.0 - self.fer) / self.trials as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    frame_errors: u64,
    bit_errors: u64,
    parity_failures: u64,
    degenerate: u64,
    nanos: u128,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            frame_errors: self.frame_errors + o.frame_errors,
            bit_errors: self.bit_errors + o.bit_errors,
            parity_failures: self.parity_failures + o.parity_failures,
            degenerate: self.degenerate + o.degenerate,
            nanos: self.nanos + o.nanos,
        }
    }
}

fn random_bits(rng: &mut impl Rng, len: usize) -> Vec<u8> {
    (0..len).map(|_| rng.random::<bool>() as u8).collect()
}

fn hamming(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// Per-thread state: the decoder and the channel-code layout.
struct Worker {
    engine: Engine,
    code: Option<ChannelCode>,
}

impl Worker {
    fn new(cfg: &SimConfig) -> Result<Self> {
        let engine = Engine::new(&cfg.spec, cfg.decoder)?;
        let code = match cfg.mode {
            Mode::Source => None,
            _ => Some(ChannelCode::new(
                cfg.spec.clone(),
                vec![0; cfg.spec.frozen().len()],
                cfg.crc,
            )?),
        };
        Ok(Worker { engine, code })
    }

    /// One trial. All randomness is drawn before decoding, in a fixed
    /// order, so every decoder sees the same noise for the same trial.
    fn run(&mut self, cfg: &SimConfig, trial: u64) -> Result<Tally> {
        let mut rng = trial_rng(cfg.seed, trial);
        let n = cfg.spec.n();
        let mut tally = Tally::default();
        match cfg.mode {
            Mode::Source => {
                let x = BinaryVector::with_depth(n, &random_bits(&mut rng, cfg.spec.block_len()))?;
                let codeword = source_encode(&cfg.spec, &x)?;
                let s = cfg.crc.map(|c| c.parity_bits(&x.to_vec()));
                let priors = cfg.channel.emit(&x, &mut rng);
                let start = cfg.timing.then(Instant::now);
                let parity = cfg.crc.as_ref().zip(s.as_deref());
                let d = source_decode(&mut self.engine, &codeword, &priors, parity)?;
                tally.nanos = start.map_or(0, |t| t.elapsed().as_nanos());
                tally.frame_errors = (d.result.x_hat != x) as u64;
                tally.bit_errors = hamming(&d.result.x_hat.to_vec(), &x.to_vec());
                tally.parity_failures = d.parity_failed as u64;
                tally.degenerate = d.degenerate as u64;
            }
            Mode::Systematic | Mode::Nonsystematic => {
                let code = self.code.as_ref().expect("channel modes carry a code");
                let payload = random_bits(&mut rng, code.payload_len());
                let systematic = cfg.mode == Mode::Systematic;
                let x = if systematic {
                    code.encode_systematic(&payload)?
                } else {
                    code.encode_nonsystematic(&payload)?
                };
                let priors = cfg.channel.emit(&x, &mut rng);
                let start = cfg.timing.then(Instant::now);
                let (estimate, d) = if systematic {
                    code.decode_systematic(&mut self.engine, &priors)?
                } else {
                    code.decode_nonsystematic(&mut self.engine, &priors)?
                };
                tally.nanos = start.map_or(0, |t| t.elapsed().as_nanos());
                tally.frame_errors = if systematic {
                    d.result.x_hat != x
                } else {
                    d.result.u_hat.gather(cfg.spec.unfrozen()) != polar_transform(&x).gather(cfg.spec.unfrozen())
                } as u64;
                tally.bit_errors = hamming(&estimate, &payload);
                tally.parity_failures = d.parity_failed as u64;
                tally.degenerate = d.degenerate as u64;
            }
        }
        Ok(tally)
    }
}

/// Runs `cfg.trials` independent rounds.
///
/// Trial `t` uses the ChaCha8 stream `t` of key `cfg.seed`; counts are
/// summed, so the result is independent of scheduling and thread count.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let total = (0..cfg.trials)
        .into_par_iter()
        .map_init(|| Worker::new(cfg), |worker, t| match worker {
            Ok(w) => w.run(cfg, t),
            Err(e) => Err(HarnessError::Config(e.to_string())),
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;

    let bits_per_trial = match cfg.mode {
        Mode::Source => cfg.spec.block_len(),
        _ => cfg.spec.unfrozen().len() - cfg.crc.map_or(0, |c| c.width()),
    } as u64;
    let trials = cfg.trials;
    let genie_errors = if cfg.genie {
        Some(genie_error_counts(cfg.spec.n(), &cfg.channel, trials, cfg.seed)?)
    } else {
        None
    };
    Ok(SimResult {
        trials,
        frame_errors: total.frame_errors,
        bit_errors: total.bit_errors,
        bits_per_trial,
        fer: total.frame_errors as f64 / trials as f64,
        ber: if bits_per_trial == 0 {
            0.0
        } else {
            total.bit_errors as f64 / (trials * bits_per_trial) as f64
        },
        parity_failures: total.parity_failures,
        degenerate: total.degenerate,
        avg_decode_us: cfg.timing.then(|| total.nanos as f64 / trials as f64 / 1e3),
        genie_errors,
    })
}

/// Erasure probability of the BEC used to design codes for `channel`: the
/// channel's Bhattacharyya parameter (exact for the BEC itself).
pub fn design_epsilon(channel: &ChannelModel) -> f64 {
    match *channel {
        ChannelModel::Bec { epsilon } => epsilon,
        ChannelModel::Bsc { p } => 2.0 * (p * (1.0 - p)).sqrt(),
        ChannelModel::BiAwgn { sigma } => (-1.0 / (2.0 * sigma * sigma)).exp(),
    }
}
