//! Systematic channel encoding.
//!
//! Given the message `x_{I'_0}` and the frozen values `u_{I_1}`, the
//! encoder solves for the remaining channel-input bits `x_{I'_1}` so that
//! `x G` agrees with `u_{I_1}` on the frozen positions. The solver works on
//! a bit-reversed working copy `V[b] = x_{br(b)}` and resolves it in place by
//! a half-split recursion, one XOR pass before and one after descending into
//! the left half.

use crate::error::{PolarError, Result};
use crate::index::{reverse_bits, BinaryVector, CodeSpec};

struct Solver<'a> {
    n: usize,
    frozen: &'a [bool],
    x: Vec<u8>,
    v: Vec<u8>,
}

impl Solver<'_> {
    /// Resolves the `2^k` cells of `V` whose index starts with the
    /// `(n − k)`-bit prefix `p`.
    fn calc_v(&mut self, k: usize, p: usize) {
        if k == 0 {
            if self.frozen[p] {
                self.v[p] = self.x[p];
            }
            return;
        }
        let half = 1usize << (k - 1);
        let left = (2 * p) << (k - 1);
        let right = (2 * p + 1) << (k - 1);
        self.calc_v(k - 1, 2 * p + 1);
        for c in 0..half {
            if !self.frozen[left + c] {
                self.v[left + c] ^= self.v[right + c];
            }
        }
        self.calc_v(k - 1, 2 * p);
        for c in 0..half {
            self.v[left + c] ^= self.v[right + c];
        }
    }
}

/// Systematic encode.
///
/// `message` lists `x_{I'_0}` by ascending position in `I'_0`;
/// `frozen_u` lists `u_{I_1}` by ascending index. The result `x` carries
/// the message verbatim at `I'_0` and satisfies `(x G)_{I_1} = frozen_u`.
pub fn systematic_encode(spec: &CodeSpec, message: &[u8], frozen_u: &[u8]) -> Result<BinaryVector> {
    let positions = spec.systematic_unfrozen();
    if message.len() != positions.len() {
        return Err(PolarError::LengthMismatch {
            expected: positions.len(),
            got: message.len(),
        });
    }
    if frozen_u.len() != spec.frozen().len() {
        return Err(PolarError::LengthMismatch {
            expected: spec.frozen().len(),
            got: frozen_u.len(),
        });
    }
    if let Some(&bad) = message.iter().chain(frozen_u).find(|&&b| b > 1) {
        return Err(PolarError::InvalidBit(bad));
    }

    let n = spec.n();
    let len = spec.block_len();
    let mut x_full = vec![0u8; len];
    for (&pos, &bit) in positions.iter().zip(message) {
        x_full[pos] = bit;
    }
    let mut solver = Solver {
        n,
        frozen: spec.frozen_mask(),
        x: vec![0; len],
        v: vec![0; len],
    };
    let mut frozen_iter = frozen_u.iter();
    for b in 0..len {
        if spec.is_frozen(b) {
            solver.x[b] = *frozen_iter.next().expect("frozen length checked");
        } else {
            solver.v[b] = x_full[reverse_bits(b, n)];
        }
    }
    solver.calc_v(solver.n, 0);

    let mut out = BinaryVector::zeros(n)?;
    for (b, &bit) in solver.v.iter().enumerate() {
        out.set(reverse_bits(b, n), bit);
    }
    Ok(out)
}
