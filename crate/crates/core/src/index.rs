//! Bit-string indices, binary vectors, the polar transform and code
//! specifications.
//!
//! An index of a length-`N = 2^n` vector is an `n`-bit string
//! `b_0 b_1 ... b_{n-1}`. When mapped to an integer, `b_0` is the most
//! significant bit, so the string order and the integer order agree and
//! appending a bit on the right is `2 * i + bit`.

use std::fmt;
use std::io::{self, BufRead, Write};

use bitvec::prelude::*;

use crate::error::{PolarError, Result};

/// Largest supported transform depth.
pub const MAX_DEPTH: usize = 24;

fn check_depth(n: usize) -> Result<()> {
    if n > MAX_DEPTH {
        return Err(PolarError::DepthOutOfRange(n));
    }
    Ok(())
}

/// Reverses the low `n` bits of `value`.
#[inline]
pub fn reverse_bits(value: usize, n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    value.reverse_bits() >> (usize::BITS as usize - n)
}

/// An `n`-bit index `b_0 ... b_{n-1}` with `b_0` as the most significant bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitIndex {
    value: usize,
    n: usize,
}

impl BitIndex {
    pub fn new(value: usize, n: usize) -> Result<Self> {
        check_depth(n)?;
        if value >> n != 0 {
            return Err(PolarError::IndexOutOfRange { index: value, n });
        }
        Ok(BitIndex { value, n })
    }

    /// Builds an index from its bits, `bits[0]` being `b_0`.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        check_depth(bits.len())?;
        let mut value = 0;
        for &b in bits {
            if b > 1 {
                return Err(PolarError::InvalidBit(b));
            }
            value = (value << 1) | b as usize;
        }
        Ok(BitIndex { value, n: bits.len() })
    }

    pub fn value(self) -> usize {
        self.value
    }

    pub fn len(self) -> usize {
        self.n
    }

    pub fn is_empty(self) -> bool {
        self.n == 0
    }

    /// Bit `b_j`.
    pub fn bit(self, j: usize) -> u8 {
        assert!(j < self.n, "bit {j} of a {}-bit index", self.n);
        ((self.value >> (self.n - 1 - j)) & 1) as u8
    }

    pub fn bits(self) -> Vec<u8> {
        (0..self.n).map(|j| self.bit(j)).collect()
    }

    /// The prefix `b_0 ... b_{k-1}`.
    pub fn prefix(self, k: usize) -> BitIndex {
        assert!(k <= self.n);
        BitIndex {
            value: self.value >> (self.n - k),
            n: k,
        }
    }

    /// Concatenation `self · other`.
    pub fn concat(self, other: BitIndex) -> Result<BitIndex> {
        BitIndex::new((self.value << other.n) | other.value, self.n + other.n)
    }
}

impl fmt::Display for BitIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n {
            write!(f, "{}", self.bit(j))?;
        }
        Ok(())
    }
}

/// `(b_0, ..., b_{n-1}) -> (b_{n-1}, ..., b_0)`.
pub fn bit_reverse(b: BitIndex) -> BitIndex {
    BitIndex {
        value: reverse_bits(b.value, b.n),
        n: b.n,
    }
}

/// A length-`2^n` vector over GF(2), stored packed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryVector {
    n: usize,
    bits: BitVec<u64, Lsb0>,
}

impl BinaryVector {
    pub fn zeros(n: usize) -> Result<Self> {
        check_depth(n)?;
        Ok(BinaryVector {
            n,
            bits: bitvec![u64, Lsb0; 0; 1 << n],
        })
    }

    /// Builds a vector from a slice of 0/1 values whose length is a power of two.
    pub fn from_bits(values: &[u8]) -> Result<Self> {
        let len = values.len();
        if !len.is_power_of_two() {
            return Err(PolarError::LengthMismatch {
                expected: len.next_power_of_two(),
                got: len,
            });
        }
        let n = len.trailing_zeros() as usize;
        check_depth(n)?;
        let mut bits = BitVec::with_capacity(len);
        for &v in values {
            if v > 1 {
                return Err(PolarError::InvalidBit(v));
            }
            bits.push(v == 1);
        }
        Ok(BinaryVector { n, bits })
    }

    /// Builds a vector of length `2^n`, checking the length.
    pub fn with_depth(n: usize, values: &[u8]) -> Result<Self> {
        if values.len() != 1 << n {
            return Err(PolarError::LengthMismatch {
                expected: 1 << n,
                got: values.len(),
            });
        }
        Self::from_bits(values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.bits[i] as u8
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: u8) {
        self.bits.set(i, bit & 1 == 1);
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().map(|b| *b as u8)
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.iter().collect()
    }

    /// Values at the given positions, in the order given.
    pub fn gather(&self, positions: &[usize]) -> Vec<u8> {
        positions.iter().map(|&p| self.get(p)).collect()
    }

    pub fn xor(&self, other: &BinaryVector) -> Result<BinaryVector> {
        if self.n != other.n {
            return Err(PolarError::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(BinaryVector {
            n: self.n,
            bits: self.bits.clone() ^ other.bits.clone(),
        })
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones()
    }
}

impl fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryVector({self})")
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Computes `v · G` with `G = F^{⊗n} Π_BR`.
///
/// Level `k` maps `w[c 0 b^k] ⊕ w[c 1 b^k]` to `w'[c b^k 0]` and
/// `w[c 1 b^k]` to `w'[c b^k 1]`, alternating between two buffers.
/// Since `G = G^{-1}` the same call inverts itself.
pub fn polar_transform(v: &BinaryVector) -> BinaryVector {
    let n = v.n;
    let len = v.len();
    let mut bufs = [v.bits.clone(), bitvec![u64, Lsb0; 0; len]];
    for k in 0..n {
        let (src, dst) = if k % 2 == 0 {
            let (a, b) = bufs.split_at_mut(1);
            (&a[0], &mut b[0])
        } else {
            let (a, b) = bufs.split_at_mut(1);
            (&b[0], &mut a[0])
        };
        let low = 1usize << k;
        for c in 0..(len >> (k + 1)) {
            let base = c << (k + 1);
            for b in 0..low {
                let zero = src[base | b];
                let one = src[base | low | b];
                dst.set(base | (b << 1), zero ^ one);
                dst.set(base | (b << 1) | 1, one);
            }
        }
    }
    let [even, odd] = bufs;
    BinaryVector {
        n,
        bits: if n.is_multiple_of(2) { even } else { odd },
    }
}

/// Frozen/unfrozen partition of `[0^n : 1^n]` together with the
/// bit-reversed sets used by systematic encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSpec {
    n: usize,
    frozen_mask: Vec<bool>,
    frozen: Vec<usize>,
    unfrozen: Vec<usize>,
    systematic_unfrozen: Vec<usize>,
    systematic_frozen: Vec<usize>,
}

pub const SPEC_MAGIC: &str = "polar-spec v1";

impl CodeSpec {
    /// Builds a spec from the frozen index set `I_1`.
    pub fn new(n: usize, frozen: impl IntoIterator<Item = usize>) -> Result<Self> {
        check_depth(n)?;
        let len = 1usize << n;
        let mut mask = vec![false; len];
        for i in frozen {
            if i >= len {
                return Err(PolarError::IndexOutOfRange { index: i, n });
            }
            if mask[i] {
                return Err(PolarError::DuplicateIndex(i));
            }
            mask[i] = true;
        }
        Ok(Self::from_mask(n, mask))
    }

    /// Builds a spec from the unfrozen index set `I_0`.
    pub fn from_unfrozen(n: usize, unfrozen: impl IntoIterator<Item = usize>) -> Result<Self> {
        check_depth(n)?;
        let len = 1usize << n;
        let mut mask = vec![true; len];
        for i in unfrozen {
            if i >= len {
                return Err(PolarError::IndexOutOfRange { index: i, n });
            }
            if !mask[i] {
                return Err(PolarError::DuplicateIndex(i));
            }
            mask[i] = false;
        }
        Ok(Self::from_mask(n, mask))
    }

    fn from_mask(n: usize, frozen_mask: Vec<bool>) -> Self {
        let frozen = (0..frozen_mask.len()).filter(|&i| frozen_mask[i]).collect();
        let unfrozen = (0..frozen_mask.len()).filter(|&i| !frozen_mask[i]).collect();
        derive_systematic_sets(CodeSpec {
            n,
            frozen_mask,
            frozen,
            unfrozen,
            systematic_unfrozen: Vec::new(),
            systematic_frozen: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block_len(&self) -> usize {
        1 << self.n
    }

    /// `I_1`, ascending.
    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    /// `I_0`, ascending.
    pub fn unfrozen(&self) -> &[usize] {
        &self.unfrozen
    }

    /// `I'_0 = br(I_0)`, ascending.
    pub fn systematic_unfrozen(&self) -> &[usize] {
        &self.systematic_unfrozen
    }

    /// `I'_1 = br(I_1)`, ascending.
    pub fn systematic_frozen(&self) -> &[usize] {
        &self.systematic_frozen
    }

    #[inline]
    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen_mask[i]
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen_mask
    }

    pub fn rate(&self) -> f64 {
        self.unfrozen.len() as f64 / self.block_len() as f64
    }

    /// Writes the versioned text form: magic line, `n=<int>`, then one
    /// frozen index per line in ascending order.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{SPEC_MAGIC}")?;
        writeln!(w, "n={}", self.n)?;
        for i in &self.frozen {
            writeln!(w, "{i}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        String::from_utf8(out).expect("spec text is ASCII")
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let mut next = || -> Result<Option<String>> {
            lines
                .next()
                .transpose()
                .map_err(|e| PolarError::InvalidSpec(e.to_string()))
        };
        match next()? {
            Some(l) if l.trim_end() == SPEC_MAGIC => {}
            other => {
                return Err(PolarError::InvalidSpec(format!(
                    "expected `{SPEC_MAGIC}`, found {other:?}"
                )))
            }
        }
        let n = match next()? {
            Some(l) => l
                .trim_end()
                .strip_prefix("n=")
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| PolarError::InvalidSpec(format!("bad depth line `{l}`")))?,
            None => return Err(PolarError::InvalidSpec("missing depth line".into())),
        };
        let mut frozen = Vec::new();
        while let Some(line) = next()? {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let i: usize = line
                .parse()
                .map_err(|_| PolarError::InvalidSpec(format!("bad index `{line}`")))?;
            if frozen.last().is_some_and(|&prev| prev >= i) {
                return Err(PolarError::InvalidSpec(format!(
                    "indices not strictly ascending at `{line}`"
                )));
            }
            frozen.push(i);
        }
        CodeSpec::new(n, frozen)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }
}

/// Fills `I'_0` and `I'_1` by bit-reversing every index of `I_0` and `I_1`.
pub fn derive_systematic_sets(mut spec: CodeSpec) -> CodeSpec {
    let n = spec.n;
    let reverse_all = |set: &[usize]| {
        let mut out: Vec<usize> = set.iter().map(|&i| reverse_bits(i, n)).collect();
        out.sort_unstable();
        out
    };
    spec.systematic_unfrozen = reverse_all(&spec.unfrozen);
    spec.systematic_frozen = reverse_all(&spec.frozen);
    spec
}
