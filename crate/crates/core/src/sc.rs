//! Fixed-address successive-cancellation decoding.
//!
//! The decoder keeps two triangular arrays. `Θ[k][c]` for `k ∈ 0..=n` and
//! `c ∈ [0, 2^(n−k))` holds the current `θ^(k)` of block `c`, and
//! `U[k][c][b]` holds the two most recent decided values at level `k`.
//! Level `k` starts at offset `2N − 2^(n−k+1)` so the arrays hold
//! `2N − 1` θ-cells and `4N − 2` bits.
//!
//! Decoding step `i` (bits `b_0 … b_{n−1}` of `i`, `b_0` most significant)
//! refreshes `Θ[n][0]` with [`DecoderMemory::update_theta`], decides or
//! copies the bit, writes it to `U[n][0][b_{n−1}]`, and when `b_{n−1} = 1`
//! pushes the pair down with [`DecoderMemory::update_u`].

use crate::error::{PolarError, Result};
use crate::index::{BinaryVector, CodeSpec};
use crate::theta::{map_decision, TernaryTheta, Theta, ThetaCell};

#[derive(Clone, Debug, PartialEq)]
pub struct DecoderMemory<T: ThetaCell = Theta> {
    n: usize,
    theta: Vec<T>,
    u: Vec<u8>,
}

#[inline]
fn level_offset(n: usize, k: usize) -> usize {
    (2usize << n) - (2usize << (n - k))
}

impl<T: ThetaCell> DecoderMemory<T> {
    pub fn new(n: usize) -> Self {
        let cells = (2usize << n) - 1;
        let mem = DecoderMemory {
            n,
            theta: vec![T::default(); cells],
            u: vec![0; 2 * cells],
        };
        assert_eq!(mem.theta.len(), 2 * (1 << n) - 1);
        assert_eq!(mem.u.len(), 4 * (1 << n) - 2);
        mem
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta_cells(&self) -> usize {
        self.theta.len()
    }

    pub fn u_cells(&self) -> usize {
        self.u.len()
    }

    /// `Θ[k][c]`.
    #[inline]
    pub fn theta(&self, k: usize, c: usize) -> T {
        self.theta[level_offset(self.n, k) + c]
    }

    #[inline]
    pub fn set_theta(&mut self, k: usize, c: usize, value: T) {
        let off = level_offset(self.n, k);
        self.theta[off + c] = value;
    }

    /// `U[k][c][b]`.
    #[inline]
    pub fn u(&self, k: usize, c: usize, b: usize) -> u8 {
        self.u[2 * (level_offset(self.n, k) + c) + b]
    }

    #[inline]
    pub fn set_u(&mut self, k: usize, c: usize, b: usize, bit: u8) {
        let off = level_offset(self.n, k);
        self.u[2 * (off + c) + b] = bit;
    }

    /// Loads `Θ[0][·]`.
    pub fn load_priors(&mut self, priors: &[T]) -> Result<()> {
        let len = 1 << self.n;
        if priors.len() != len {
            return Err(PolarError::LengthMismatch {
                expected: len,
                got: priors.len(),
            });
        }
        self.theta[..len].copy_from_slice(priors);
        Ok(())
    }

    /// Deep copy of every θ-cell and bit from `src`.
    pub fn copy_from(&mut self, src: &DecoderMemory<T>) {
        debug_assert_eq!(self.n, src.n);
        self.theta.copy_from_slice(&src.theta);
        self.u.copy_from_slice(&src.u);
    }

    /// Recomputes `Θ[k][c] = θ^(k)_{c b^k}` for every `c`, where `prefix`
    /// holds `b_0 … b_{k−1}` (so `b_{k−1}` is its lowest bit).
    ///
    /// Descends first when `b_{k−1} = 0`, then applies the check rule
    /// (`b_{k−1} = 0`) or the bit rule (`b_{k−1} = 1`) using the check value
    /// still stored in `Θ[k][c]` and the decided `U[k][c][0]`. Returns the
    /// number of degenerate bit-rule evaluations.
    pub fn update_theta(&mut self, k: usize, prefix: usize) -> u32 {
        if k == 0 {
            return 0;
        }
        let trailing = prefix & 1;
        let mut events = 0;
        if trailing == 0 {
            events += self.update_theta(k - 1, prefix >> 1);
        }
        let n = self.n;
        let lower = level_offset(n, k - 1);
        let upper = level_offset(n, k);
        let width = 1usize << (n - k);
        let (below, above) = self.theta.split_at_mut(upper);
        let below = &below[lower..];
        let above = &mut above[..width];
        if trailing == 0 {
            for (c, cell) in above.iter_mut().enumerate() {
                *cell = T::check(below[2 * c], below[2 * c + 1]);
            }
        } else {
            let decided = &self.u[2 * upper..2 * (upper + width)];
            for (c, cell) in above.iter_mut().enumerate() {
                let (t, bad) = T::bit(below[2 * c], below[2 * c + 1], decided[2 * c], *cell);
                *cell = t;
                events += bad as u32;
            }
        }
        events
    }

    /// Propagates the decided pair `U[k][c][0..2]` one level down:
    /// `U[k−1][2c][b_{k−2}] = U[k][c][0] ⊕ U[k][c][1]` and
    /// `U[k−1][2c+1][b_{k−2}] = U[k][c][1]`, recursing while `b_{k−2} = 1`.
    /// `prefix` holds `b_0 … b_{k−2}`.
    pub fn update_u(&mut self, k: usize, prefix: usize) {
        debug_assert!(k >= 1);
        let n = self.n;
        let slot = if k >= 2 { prefix & 1 } else { 0 };
        let lower = level_offset(n, k - 1);
        let upper = level_offset(n, k);
        let width = 1usize << (n - k);
        let (below, above) = self.u.split_at_mut(2 * upper);
        let below = &mut below[2 * lower..];
        for c in 0..width {
            let (a, b) = (above[2 * c], above[2 * c + 1]);
            below[2 * (2 * c) + slot] = a ^ b;
            below[2 * (2 * c + 1) + slot] = b;
        }
        if k >= 2 && slot == 1 {
            self.update_u(k - 1, prefix >> 1);
        }
    }

    /// Runs the refresh for decoding step `i`, returning `Θ[n][0]` and the
    /// degenerate-event count.
    #[inline]
    pub fn step_theta(&mut self, i: usize) -> (T, u32) {
        let events = self.update_theta(self.n, i);
        (self.theta(self.n, 0), events)
    }

    /// Writes `û_i` into `U[n][0][b_{n−1}]`.
    #[inline]
    pub fn set_decided(&mut self, i: usize, bit: u8) {
        let n = self.n;
        self.set_u(n, 0, i & 1, bit);
    }

    /// Runs `update_u` when step `i` closed a pair (`b_{n−1} = 1`).
    #[inline]
    pub fn propagate(&mut self, i: usize) {
        if i & 1 == 1 && self.n >= 1 {
            self.update_u(self.n, i >> 1);
        }
    }

    /// `set_decided` followed by `propagate`.
    #[inline]
    pub fn commit(&mut self, i: usize, bit: u8) {
        self.set_decided(i, bit);
        self.propagate(i);
    }

    /// `U[0][c][·]` for every `c`: the reproduction `x̂` once all steps ran.
    pub fn reproduction(&self) -> BinaryVector {
        let mut x = BinaryVector::zeros(self.n).expect("depth validated at construction");
        for c in 0..(1 << self.n) {
            x.set(c, self.u(0, c, 0));
        }
        x
    }
}

/// Output of one decode.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    /// `û^(n)`.
    pub u_hat: BinaryVector,
    /// `x̂ = û^(n) G`, read from `U[0]`.
    pub x_hat: BinaryVector,
    /// Decided values at `I_0`, in ascending index order.
    pub message_bits: Vec<u8>,
    /// Bit-rule evaluations that hit a zero denominator or clamped.
    pub degenerate_events: u32,
}

/// Per-position frozen values `u_{I_1}`, laid out over the whole block.
pub(crate) fn fixed_values(spec: &CodeSpec, frozen_values: &[u8]) -> Result<Vec<Option<u8>>> {
    if frozen_values.len() != spec.frozen().len() {
        return Err(PolarError::LengthMismatch {
            expected: spec.frozen().len(),
            got: frozen_values.len(),
        });
    }
    let mut fixed = vec![None; spec.block_len()];
    for (&i, &v) in spec.frozen().iter().zip(frozen_values) {
        if v > 1 {
            return Err(PolarError::InvalidBit(v));
        }
        fixed[i] = Some(v);
    }
    Ok(fixed)
}

pub(crate) fn convert_priors<T: ThetaCell>(priors: &[Theta]) -> Result<Vec<T>> {
    priors
        .iter()
        .enumerate()
        .map(|(position, &t)| {
            T::from_theta(t).ok_or(PolarError::NonTernaryPrior {
                position,
                value: t.value(),
            })
        })
        .collect()
}

/// Reusable SC decoder for one code.
#[derive(Clone, Debug)]
pub struct ScDecoder<T: ThetaCell = Theta> {
    spec: CodeSpec,
    mem: DecoderMemory<T>,
}

impl<T: ThetaCell> ScDecoder<T> {
    pub fn new(spec: CodeSpec) -> Self {
        let mem = DecoderMemory::new(spec.n());
        ScDecoder { spec, mem }
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn memory(&self) -> &DecoderMemory<T> {
        &self.mem
    }

    /// Decodes with `frozen_values` giving `u_{I_1}` in ascending index order.
    pub fn decode(&mut self, priors: &[T], frozen_values: &[u8]) -> Result<DecodeResult> {
        self.decode_observed(priors, frozen_values, |_, _, _| {})
    }

    /// Like [`decode`](Self::decode), calling `observe(i, Θ[n][0], memory)`
    /// after each refresh and before the decision.
    pub fn decode_observed<F>(
        &mut self,
        priors: &[T],
        frozen_values: &[u8],
        mut observe: F,
    ) -> Result<DecodeResult>
    where
        F: FnMut(usize, T, &DecoderMemory<T>),
    {
        let fixed = fixed_values(&self.spec, frozen_values)?;
        self.mem.load_priors(priors)?;
        let len = self.spec.block_len();
        let mut u_hat = BinaryVector::zeros(self.spec.n())?;
        let mut message_bits = Vec::with_capacity(self.spec.unfrozen().len());
        let mut degenerate_events = 0;
        for (i, fixed) in fixed.iter().enumerate().take(len) {
            let (t, events) = self.mem.step_theta(i);
            degenerate_events += events;
            observe(i, t, &self.mem);
            let bit = match *fixed {
                Some(v) => v,
                None => {
                    let d = map_decision(t.theta());
                    message_bits.push(d);
                    d
                }
            };
            u_hat.set(i, bit);
            self.mem.commit(i, bit);
        }
        Ok(DecodeResult {
            x_hat: self.mem.reproduction(),
            u_hat,
            message_bits,
            degenerate_events,
        })
    }

    /// Genie-aided pass: records whether each MAP decision would have
    /// differed from `truth`, then continues with the true value.
    pub fn genie_errors(&mut self, priors: &[T], truth: &BinaryVector) -> Result<Vec<bool>> {
        self.mem.load_priors(priors)?;
        let len = self.spec.block_len();
        if truth.len() != len {
            return Err(PolarError::LengthMismatch {
                expected: len,
                got: truth.len(),
            });
        }
        let mut errors = Vec::with_capacity(len);
        for i in 0..len {
            let (t, _) = self.mem.step_theta(i);
            let bit = truth.get(i);
            errors.push(map_decision(t.theta()) != bit);
            self.mem.commit(i, bit);
        }
        Ok(errors)
    }
}

/// Successive-cancellation decode.
///
/// `frozen_values` lists `u_{I_1}` in ascending index order. With `ternary`
/// set, every prior must be exactly `−1`, `0` or `+1` and the division-free
/// bit rule is used.
pub fn sc_decode(
    spec: &CodeSpec,
    priors: &[Theta],
    frozen_values: &[u8],
    ternary: bool,
) -> Result<DecodeResult> {
    if ternary {
        let priors = convert_priors::<TernaryTheta>(priors)?;
        ScDecoder::new(spec.clone()).decode(&priors, frozen_values)
    } else {
        ScDecoder::new(spec.clone()).decode(priors, frozen_values)
    }
}
