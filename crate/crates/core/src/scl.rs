//! Successive-cancellation list decoding over a fixed-address path pool.
//!
//! The pool owns `L` decoder memories, `2L` path weights `P[λ]`, `2L`
//! activity flags and a `2L`-slot index permutation. Path `λ` lives in slot
//! `λ` for its whole life; forking copies the parent memory eagerly into a
//! free slot instead of sharing it.
//!
//! Each weight is a running product of `(1 ∓_u θ)` factors, so
//! `P[λ] / 2^count` is the joint probability of the decoded prefix. Weights
//! are renormalized to a maximum of 1 once per step; the divisor is kept in
//! a log-scale accumulator so absolute probabilities stay recoverable.

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use crate::error::{PolarError, Result};
use crate::index::{BinaryVector, CodeSpec};
use crate::sc::{convert_priors, fixed_values, DecodeResult, DecoderMemory};
use crate::theta::{signed_one_plus, TernaryTheta, Theta, ThetaCell};

const PIVOT_SEED: u64 = 0x5eed_9a7b_1c3d_2e4f;

/// Candidate ordering: larger weight first, then larger lean, then lower
/// slot.
///
/// The lean of a candidate is `±θ` of the decision that produced it (`+θ`
/// for bit 0, `−θ` for bit 1). It only matters when rounding has made
/// `P(1 + θ)` and `P(1 − θ)` equal, and then it sides with the MAP decision.
#[derive(Clone, Copy)]
struct Ranking<'a> {
    weights: &'a [f64],
    lean: Option<&'a [f64]>,
}

impl Ranking<'_> {
    #[inline]
    fn before(&self, a: usize, b: usize) -> bool {
        let lean = |s: usize| self.lean.map_or(0.0, |l| l[s]);
        self.weights[a]
            .total_cmp(&self.weights[b])
            .then_with(|| lean(a).partial_cmp(&lean(b)).unwrap_or(std::cmp::Ordering::Equal))
            .then_with(|| b.cmp(&a))
            .is_gt()
    }
}

fn partition<R: Rng>(rank: Ranking<'_>, index: &mut [usize], left: usize, right: usize, rng: &mut R) -> usize {
    let pick = rng.random_range(left..=right);
    index.swap(pick, right);
    let pivot = index[right];
    let (mut lo, mut hi) = (left as isize - 1, right as isize);
    loop {
        lo += 1;
        hi -= 1;
        while lo <= hi && !rank.before(pivot, index[lo as usize]) {
            lo += 1;
        }
        while lo <= hi && rank.before(pivot, index[hi as usize]) {
            hi -= 1;
        }
        if lo >= hi {
            break;
        }
        index.swap(lo as usize, hi as usize);
    }
    index.swap(lo as usize, right);
    lo as usize
}

fn select_path<R: Rng>(rank: Ranking<'_>, index: &mut [usize], l: usize, left: usize, right: usize, rng: &mut R) {
    let (mut left, mut right) = (left, right);
    while left < right {
        let p = partition(rank, index, left, right, rng);
        if p > l {
            right = p - 1;
        } else if p < l {
            left = p + 1;
        } else {
            return;
        }
    }
}

/// Sets `active[λ]` for exactly the `min(l, m)` largest of the `m = weights.len()`
/// weights, ties going to the lower slot.
///
/// Quickselect over `index` with a random pivot; the ranking is a strict
/// total order so the marked set does not depend on the pivots drawn.
pub fn mark_top_l<R: Rng>(weights: &[f64], l: usize, index: &mut [usize], active: &mut [bool], rng: &mut R) {
    mark_ranked(Ranking { weights, lean: None }, l, index, active, rng);
}

fn mark_ranked<R: Rng>(rank: Ranking<'_>, l: usize, index: &mut [usize], active: &mut [bool], rng: &mut R) {
    let m = rank.weights.len();
    for (slot, (ix, act)) in index.iter_mut().zip(active.iter_mut()).take(m).enumerate() {
        *ix = slot;
        *act = false;
    }
    if l >= m {
        active[..m].iter_mut().for_each(|a| *a = true);
        return;
    }
    if l == 0 {
        return;
    }
    select_path(rank, &mut index[..m], l, 0, m - 1, rng);
    for &slot in &index[..l] {
        active[slot] = true;
    }
}

/// Convenience wrapper returning the flags.
pub fn top_l_flags(weights: &[f64], l: usize) -> Vec<bool> {
    let mut index = vec![0; weights.len()];
    let mut active = vec![false; weights.len()];
    let mut rng = SmallRng::seed_from_u64(PIVOT_SEED);
    mark_top_l(weights, l, &mut index, &mut active, &mut rng);
    active
}

/// `L` decoder memories plus path bookkeeping.
#[derive(Clone, Debug)]
pub struct PathPool<T: ThetaCell = Theta> {
    n: usize,
    capacity: usize,
    mems: Vec<DecoderMemory<T>>,
    weights: Vec<f64>,
    /// `±θ` behind each candidate of the current prune.
    lean: Vec<f64>,
    active: Vec<bool>,
    index: Vec<usize>,
    lambda: usize,
    /// `M[λ][·]`, row-major with `message_len` columns.
    messages: Vec<u8>,
    message_len: usize,
    message_pos: usize,
    events: Vec<u32>,
    log_scale: f64,
    decoded: usize,
    degenerate: bool,
    rng: SmallRng,
}

impl<T: ThetaCell> PathPool<T> {
    /// A pool of `capacity` paths for block length `2^n` with
    /// `message_len` unfrozen positions.
    pub fn new(n: usize, capacity: usize, message_len: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(PolarError::ZeroListSize);
        }
        Ok(PathPool {
            n,
            capacity,
            mems: (0..capacity).map(|_| DecoderMemory::new(n)).collect(),
            weights: vec![0.0; 2 * capacity],
            lean: vec![0.0; 2 * capacity],
            active: vec![false; 2 * capacity],
            index: vec![0; 2 * capacity],
            lambda: 1,
            messages: vec![0; capacity * message_len],
            message_len,
            message_pos: 0,
            events: vec![0; capacity],
            log_scale: 0.0,
            decoded: 0,
            degenerate: false,
            rng: SmallRng::seed_from_u64(PIVOT_SEED),
        })
    }

    /// Starts a decode: one path with weight 1 holding the priors.
    pub fn reset(&mut self, priors: &[T]) -> Result<()> {
        self.mems[0].load_priors(priors)?;
        self.lambda = 1;
        self.weights.iter_mut().for_each(|w| *w = 0.0);
        self.weights[0] = 1.0;
        self.active.iter_mut().for_each(|a| *a = false);
        self.active[0] = true;
        self.message_pos = 0;
        self.events.iter_mut().for_each(|e| *e = 0);
        self.log_scale = 0.0;
        self.decoded = 0;
        self.degenerate = false;
        self.rng = SmallRng::seed_from_u64(PIVOT_SEED);
        Ok(())
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Current number of live paths `Λ`.
    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn weight(&self, slot: usize) -> f64 {
        self.weights[slot]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn memory(&self, slot: usize) -> &DecoderMemory<T> {
        &self.mems[slot]
    }

    /// Positions decided so far.
    pub fn decoded(&self) -> usize {
        self.decoded
    }

    /// `ln` of the common factor divided out of every weight.
    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// Whether a renormalization found every weight at zero.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// `ln(P[λ] / 2^count)` in absolute terms: the log joint probability
    /// of the slot's decoded prefix.
    pub fn path_log_probability(&self, slot: usize) -> f64 {
        self.weights[slot].ln() + self.log_scale - self.decoded as f64 * std::f64::consts::LN_2
    }

    /// `M[λ][·]` filled so far.
    pub fn message_row(&self, slot: usize) -> &[u8] {
        let start = slot * self.message_len;
        &self.messages[start..start + self.message_pos]
    }

    /// Decoded prefix of a slot, interleaving frozen values and `M[λ]`.
    pub fn prefix_bits(&self, slot: usize, fixed: &[Option<u8>]) -> Vec<u8> {
        let row = self.message_row(slot);
        let mut next = row.iter();
        fixed[..self.decoded]
            .iter()
            .map(|f| match f {
                Some(v) => *v,
                None => *next.next().expect("message row covers every unfrozen position"),
            })
            .collect()
    }

    #[inline]
    fn current_theta(&self, slot: usize) -> f64 {
        self.mems[slot].theta(self.n, 0).theta().value()
    }

    #[inline]
    fn write_bit(&mut self, slot: usize, i: usize, bit: u8, unfrozen: bool) {
        self.mems[slot].set_decided(i, bit);
        if unfrozen {
            self.messages[slot * self.message_len + self.message_pos] = bit;
        }
    }

    /// Refreshes `Θ[λ][n][0]` for every live path at step `i`.
    pub fn update_thetas(&mut self, i: usize) {
        for slot in 0..self.lambda {
            let (_, events) = self.mems[slot].step_theta(i);
            self.events[slot] += events;
        }
    }

    /// Pushes decided pairs down in every live path.
    pub fn propagate(&mut self, i: usize) {
        for mem in &mut self.mems[..self.lambda] {
            mem.propagate(i);
        }
    }

    /// Frozen position: every path takes `u` and its weight is multiplied
    /// by `1 ∓_u θ`.
    pub fn extend_path(&mut self, i: usize, u: u8) {
        for slot in 0..self.lambda {
            self.weights[slot] *= signed_one_plus(self.current_theta(slot), u);
            self.write_bit(slot, i, u, false);
        }
        self.decoded += 1;
    }

    /// `extend_path` while only the single root path exists: the factor
    /// goes straight into the log scale and the weight stays at 1.
    fn extend_root_path(&mut self, i: usize, u: u8) {
        debug_assert_eq!(self.lambda, 1);
        self.log_scale += signed_one_plus(self.current_theta(0), u).ln();
        self.write_bit(0, i, u, false);
        self.decoded += 1;
    }

    /// Unfrozen position with room to fork: path `λ` keeps the 0-branch
    /// and slot `Λ + λ` receives a copy taking the 1-branch. Doubles `Λ`.
    pub fn split_path(&mut self, i: usize) -> Result<()> {
        let lambda = self.lambda;
        if 2 * lambda > self.capacity {
            return Err(PolarError::ListCapacity {
                lambda,
                capacity: self.capacity,
            });
        }
        for slot in 0..lambda {
            let t = self.current_theta(slot);
            self.weights[lambda + slot] = self.weights[slot] * (1.0 - t);
            self.weights[slot] *= 1.0 + t;
            self.copy_path(lambda + slot, slot);
            self.write_bit(slot, i, 0, true);
            self.write_bit(lambda + slot, i, 1, true);
            self.active[slot] = true;
            self.active[lambda + slot] = true;
        }
        self.lambda = 2 * lambda;
        self.message_pos += 1;
        self.decoded += 1;
        Ok(())
    }

    /// Unfrozen position without room to fork: of the `2Λ` candidate
    /// extensions keep the `L` heaviest and compact them into slots
    /// `0..L`. Candidate `λ < Λ` is path `λ` with bit 0, candidate `Λ + λ`
    /// is path `λ` with bit 1.
    pub fn prune_path(&mut self, i: usize) {
        let lambda = self.lambda;
        let cap = self.capacity;
        debug_assert!(2 * lambda > cap);
        for slot in 0..lambda {
            let t = self.current_theta(slot);
            self.weights[lambda + slot] = self.weights[slot] * (1.0 - t);
            self.weights[slot] *= 1.0 + t;
            self.lean[slot] = t;
            self.lean[lambda + slot] = -t;
        }
        let rank = Ranking {
            weights: &self.weights[..2 * lambda],
            lean: Some(&self.lean[..2 * lambda]),
        };
        mark_ranked(
            rank,
            cap,
            &mut self.index,
            &mut self.active,
            &mut self.rng,
        );
        for slot in 0..lambda {
            let one = lambda + slot;
            if self.active[slot] {
                self.write_bit(slot, i, 0, true);
                if self.active[one] && one < cap {
                    self.copy_path(one, slot);
                    self.write_bit(one, i, 1, true);
                }
            } else if self.active[one] {
                // Only the 1-branch survives: it takes over the parent's slot.
                self.weights[slot] = self.weights[one];
                self.write_bit(slot, i, 1, true);
                self.active[slot] = true;
                self.active[one] = false;
            }
        }
        // Surviving 1-branches beyond the pool move into free lower slots.
        let mut free = 0;
        for one in cap..2 * lambda {
            if !self.active[one] {
                continue;
            }
            while self.active[free] {
                free += 1;
            }
            self.weights[free] = self.weights[one];
            self.copy_path(free, one - lambda);
            self.write_bit(free, i, 1, true);
            self.active[free] = true;
            self.active[one] = false;
            free += 1;
        }
        self.lambda = cap;
        self.message_pos += 1;
        self.decoded += 1;
    }

    /// Deep copy of slot `src` into slot `dst`: θ-cells, bits, message row.
    pub fn copy_path(&mut self, dst: usize, src: usize) {
        assert!(dst != src && dst < self.capacity && src < self.capacity);
        if dst < src {
            let (lo, hi) = self.mems.split_at_mut(src);
            lo[dst].copy_from(&hi[0]);
        } else {
            let (lo, hi) = self.mems.split_at_mut(dst);
            hi[0].copy_from(&lo[src]);
        }
        let k = self.message_len;
        self.messages.copy_within(src * k..(src + 1) * k, dst * k);
        self.events[dst] = self.events[src];
    }

    /// Divides the live weights by their maximum.
    pub fn magnify_p(&mut self) -> Result<()> {
        let live = &mut self.weights[..self.lambda];
        let max = live.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            return Err(PolarError::DegenerateWeights);
        }
        live.iter_mut().for_each(|w| *w /= max);
        self.log_scale += max.ln();
        Ok(())
    }

    /// Live slots by decreasing weight, ties to the lower slot.
    pub fn ranked_slots(&self) -> Vec<usize> {
        let mut slots: Vec<usize> = (0..self.lambda).collect();
        slots.sort_by(|&a, &b| {
            self.weights[b]
                .total_cmp(&self.weights[a])
                .then_with(|| a.cmp(&b))
        });
        slots
    }
}

/// One surviving path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathResult {
    pub slot: usize,
    pub decode: DecodeResult,
    /// Renormalized weight `P[λ]`.
    pub weight: f64,
    /// `ln P_{U^(n)}(û(λ))`.
    pub log_probability: f64,
}

impl PathResult {
    pub fn probability(&self) -> f64 {
        self.log_probability.exp()
    }
}

/// Output of a list decode.
#[derive(Clone, Debug, PartialEq)]
pub struct SclOutput {
    /// Surviving paths by decreasing weight.
    pub paths: Vec<PathResult>,
    /// Position in `paths` of the chosen path.
    pub selected: usize,
    /// A parity check was given and no path passed it.
    pub parity_failed: bool,
    /// Some renormalization found every weight at zero.
    pub degenerate: bool,
}

impl SclOutput {
    pub fn best(&self) -> &DecodeResult {
        &self.paths[self.selected].decode
    }
}

/// Reusable list decoder for one code.
#[derive(Clone, Debug)]
pub struct SclDecoder<T: ThetaCell = Theta> {
    spec: CodeSpec,
    pool: PathPool<T>,
    skip_frozen_prefix: bool,
}

impl<T: ThetaCell> SclDecoder<T> {
    pub fn new(spec: CodeSpec, list_size: usize) -> Result<Self> {
        let pool = PathPool::new(spec.n(), list_size, spec.unfrozen().len())?;
        Ok(SclDecoder {
            spec,
            pool,
            skip_frozen_prefix: true,
        })
    }

    /// Leave the weight untouched and skip renormalization while every
    /// position so far is frozen (on by default).
    pub fn skip_frozen_prefix(mut self, on: bool) -> Self {
        self.skip_frozen_prefix = on;
        self
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn list_size(&self) -> usize {
        self.pool.capacity()
    }

    pub fn decode(
        &mut self,
        priors: &[T],
        frozen_values: &[u8],
        parity: Option<&dyn Fn(&BinaryVector) -> bool>,
    ) -> Result<SclOutput> {
        self.decode_observed(priors, frozen_values, parity, |_, _| {})
    }

    /// Like [`decode`](Self::decode), calling `observe(i, pool)` at the end
    /// of every step, after renormalization.
    pub fn decode_observed<F>(
        &mut self,
        priors: &[T],
        frozen_values: &[u8],
        parity: Option<&dyn Fn(&BinaryVector) -> bool>,
        mut observe: F,
    ) -> Result<SclOutput>
    where
        F: FnMut(usize, &PathPool<T>),
    {
        let fixed = fixed_values(&self.spec, frozen_values)?;
        let pool = &mut self.pool;
        pool.reset(priors)?;
        let mut frozen_prefix = self.skip_frozen_prefix;
        let mut degenerate = false;
        for (i, f) in fixed.iter().enumerate() {
            pool.update_thetas(i);
            match *f {
                Some(u) if frozen_prefix => pool.extend_root_path(i, u),
                Some(u) => pool.extend_path(i, u),
                None => {
                    frozen_prefix = false;
                    if 2 * pool.lambda() <= pool.capacity() {
                        pool.split_path(i)?;
                    } else {
                        pool.prune_path(i);
                    }
                }
            }
            if !frozen_prefix && pool.magnify_p().is_err() {
                degenerate = true;
                pool.degenerate = true;
            }
            observe(i, pool);
            pool.propagate(i);
        }

        let paths: Vec<PathResult> = pool
            .ranked_slots()
            .into_iter()
            .map(|slot| {
                let u = pool.prefix_bits(slot, &fixed);
                PathResult {
                    slot,
                    decode: DecodeResult {
                        u_hat: BinaryVector::with_depth(self.spec.n(), &u).expect("full-length path"),
                        x_hat: pool.mems[slot].reproduction(),
                        message_bits: pool.message_row(slot).to_vec(),
                        degenerate_events: pool.events[slot],
                    },
                    weight: pool.weights[slot],
                    log_probability: pool.path_log_probability(slot),
                }
            })
            .collect();

        let (selected, parity_failed) = match parity {
            None => (0, false),
            Some(check) => match paths.iter().position(|p| check(&p.decode.x_hat)) {
                Some(pos) => (pos, false),
                None => (0, true),
            },
        };
        Ok(SclOutput {
            paths,
            selected,
            parity_failed,
            degenerate,
        })
    }
}

/// Successive-cancellation list decode with real-valued θ.
///
/// Without `parity` the heaviest surviving path is selected; with it, the
/// heaviest path whose reproduction passes, or the heaviest overall with
/// `parity_failed` set.
pub fn scl_decode(
    spec: &CodeSpec,
    priors: &[Theta],
    frozen_values: &[u8],
    list_size: usize,
    parity: Option<&dyn Fn(&BinaryVector) -> bool>,
) -> Result<SclOutput> {
    SclDecoder::new(spec.clone(), list_size)?.decode(priors, frozen_values, parity)
}

/// List decode with the division-free ternary rules; priors must be in
/// `{−1, 0, 1}`.
pub fn scl_decode_ternary(
    spec: &CodeSpec,
    priors: &[Theta],
    frozen_values: &[u8],
    list_size: usize,
    parity: Option<&dyn Fn(&BinaryVector) -> bool>,
) -> Result<SclOutput> {
    let priors = convert_priors::<TernaryTheta>(priors)?;
    SclDecoder::new(spec.clone(), list_size)?.decode(&priors, frozen_values, parity)
}
