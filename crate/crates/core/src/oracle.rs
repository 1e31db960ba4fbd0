//! Brute-force references for small block lengths.
//!
//! Everything here enumerates `{0,1}^N` directly and builds the transform
//! from explicit Kronecker products, so it shares no code path with the
//! decoders it checks. A vector `u` is packed into a mask with `u_b` at
//! bit `b`.

use crate::error::{PolarError, Result};
use crate::index::{reverse_bits, CodeSpec};
use crate::theta::Theta;

/// Largest `n` accepted by the enumerating routines (`2^N ≤ 65536`).
pub const MAX_ORACLE_DEPTH: usize = 4;

fn guard(n: usize) -> Result<()> {
    if n > MAX_ORACLE_DEPTH {
        return Err(PolarError::OracleTooLarge { n });
    }
    Ok(())
}

/// `F^{⊗n} Π_BR` as a dense 0/1 matrix, built by repeated Kronecker products.
pub fn generator_matrix(n: usize) -> Vec<Vec<u8>> {
    let kernel = [[1u8, 0], [1, 1]];
    let mut g: Vec<Vec<u8>> = vec![vec![1]];
    for _ in 0..n {
        let size = g.len();
        let mut next = vec![vec![0u8; 2 * size]; 2 * size];
        for (a, krow) in kernel.iter().enumerate() {
            for (b, &kv) in krow.iter().enumerate() {
                for i in 0..size {
                    for j in 0..size {
                        next[a * size + i][b * size + j] = kv & g[i][j];
                    }
                }
            }
        }
        g = next;
    }
    // Right-multiplying by the bit-reversal permutation moves column br(j) to j.
    let len = g.len();
    g.iter()
        .map(|row| (0..len).map(|j| row[reverse_bits(j, n)]).collect())
        .collect()
}

/// Row vector times matrix over GF(2).
pub fn mul_matrix(v: &[u8], g: &[Vec<u8>]) -> Vec<u8> {
    let len = g.len();
    (0..len)
        .map(|j| v.iter().zip(g).fold(0u8, |acc, (&vi, row)| acc ^ (vi & row[j])))
        .collect()
}

/// Conditional θ together with a flag for a probability-zero prefix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Conditional {
    pub theta: Theta,
    pub null_prefix: bool,
}

/// `P_{U^(n)}(u) = Π_c P_{U^(0)_c}(x_c)` with `x = u G`, for every `u`.
#[derive(Clone, Debug)]
pub struct JointTable {
    n: usize,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(priors: &[Theta]) -> Result<Self> {
        let len = priors.len();
        if !len.is_power_of_two() {
            return Err(PolarError::LengthMismatch {
                expected: len.next_power_of_two(),
                got: len,
            });
        }
        let n = len.trailing_zeros() as usize;
        guard(n)?;
        let g = generator_matrix(n);
        // x(u) is linear: x(mask) = x(mask without lowest bit) ⊕ row(lowest bit).
        let rows: Vec<u32> = g
            .iter()
            .map(|row| row.iter().enumerate().fold(0u32, |m, (j, &v)| m | ((v as u32) << j)))
            .collect();
        let size = 1usize << len;
        let mut x_of = vec![0u32; size];
        let mut probs = vec![0.0; size];
        for mask in 0..size {
            if mask > 0 {
                let low = mask.trailing_zeros() as usize;
                x_of[mask] = x_of[mask & (mask - 1)] ^ rows[low];
            }
            let x = x_of[mask];
            probs[mask] = (0..len)
                .map(|c| priors[c].prob(((x >> c) & 1) as u8))
                .product();
        }
        Ok(JointTable { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    fn prefix_mask(prefix: &[u8]) -> usize {
        prefix
            .iter()
            .enumerate()
            .fold(0, |m, (b, &v)| m | ((v as usize & 1) << b))
    }

    /// `P(u_{[0:b)} = prefix)`.
    pub fn prefix_probability(&self, prefix: &[u8]) -> f64 {
        let width = prefix.len();
        let want = Self::prefix_mask(prefix);
        let keep = (1usize << width) - 1;
        self.probs
            .iter()
            .enumerate()
            .filter(|(m, _)| m & keep == want)
            .map(|(_, p)| p)
            .sum()
    }

    /// `P(u_b = 0 | prefix) − P(u_b = 1 | prefix)` with `b = prefix.len()`.
    pub fn conditional_theta(&self, prefix: &[u8]) -> Conditional {
        let b = prefix.len();
        let want = Self::prefix_mask(prefix);
        let keep = (1usize << b) - 1;
        let (mut zero, mut one) = (0.0, 0.0);
        for (m, &p) in self.probs.iter().enumerate() {
            if m & keep != want {
                continue;
            }
            if (m >> b) & 1 == 0 {
                zero += p;
            } else {
                one += p;
            }
        }
        let total = zero + one;
        if total == 0.0 {
            return Conditional {
                theta: Theta::ZERO,
                null_prefix: true,
            };
        }
        Conditional {
            theta: Theta::new((zero - one) / total).expect("normalized difference lies in [-1, 1]"),
            null_prefix: false,
        }
    }

    pub fn path_probability(&self, u: &[u8]) -> f64 {
        self.probs[Self::prefix_mask(u)]
    }

    /// All full paths consistent with `fixed`, by decreasing probability;
    /// equal probabilities keep lexicographic order of `u`.
    pub fn ranked_paths(&self, fixed: &[Option<u8>]) -> Vec<(Vec<u8>, f64)> {
        let len = 1usize << self.n;
        let mut paths: Vec<(Vec<u8>, f64)> = self
            .probs
            .iter()
            .enumerate()
            .filter(|(m, _)| {
                fixed
                    .iter()
                    .enumerate()
                    .all(|(b, f)| f.is_none_or(|v| ((m >> b) & 1) as u8 == v))
            })
            .map(|(m, &p)| ((0..len).map(|b| ((m >> b) & 1) as u8).collect(), p))
            .collect();
        paths.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        paths
    }
}

/// Conditional θ of position `prefix.len()` given the decoded prefix.
pub fn brute_conditional_theta(priors: &[Theta], prefix: &[u8]) -> Result<Conditional> {
    let table = JointTable::new(priors)?;
    if prefix.len() >= priors.len() {
        return Err(PolarError::IndexOutOfRange {
            index: prefix.len(),
            n: table.n(),
        });
    }
    Ok(table.conditional_theta(prefix))
}

/// Exhaustive maximizer of `P_{U^(n)}(u)` over paths consistent with the
/// frozen values; ties go to the lexicographically smallest path.
pub fn brute_map_sequence(spec: &CodeSpec, priors: &[Theta], frozen_values: &[u8]) -> Result<(Vec<u8>, f64)> {
    let table = JointTable::new(priors)?;
    if table.n() != spec.n() {
        return Err(PolarError::LengthMismatch {
            expected: spec.block_len(),
            got: priors.len(),
        });
    }
    let fixed = crate::sc::fixed_values(spec, frozen_values)?;
    let mut ranked = table.ranked_paths(&fixed);
    Ok(ranked.swap_remove(0))
}

/// Exact probability that the genie-aided decision at each index sees an
/// erasure (`θ = 0`) on BEC(ε), by enumerating all erasure patterns.
pub fn bec_erasure_probabilities(n: usize, epsilon: f64) -> Result<Vec<f64>> {
    if n > 3 {
        return Err(PolarError::OracleTooLarge { n });
    }
    let len = 1usize << n;
    let mut out = vec![0.0; len];
    // By linearity the all-zero input is representative.
    let zeros = vec![0u8; len];
    for pattern in 0..(1usize << len) {
        let erased = pattern.count_ones() as i32;
        let weight = epsilon.powi(erased) * (1.0 - epsilon).powi(len as i32 - erased);
        if weight == 0.0 {
            continue;
        }
        let priors: Vec<Theta> = (0..len)
            .map(|c| if (pattern >> c) & 1 == 1 { Theta::ZERO } else { Theta::ONE })
            .collect();
        let table = JointTable::new(&priors)?;
        for (b, slot) in out.iter_mut().enumerate() {
            if table.conditional_theta(&zeros[..b]).theta.value().abs() < 1.0 {
                *slot += weight;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{polar_transform, BinaryVector};

    fn th(v: f64) -> Theta {
        Theta::new(v).unwrap()
    }

    #[test]
    fn matrix_matches_transform_example() {
        let g = generator_matrix(2);
        assert_eq!(mul_matrix(&[1, 1, 0, 0], &g), vec![0, 0, 1, 0]);
    }

    #[test]
    fn matrix_is_involution() {
        for n in 0..=4 {
            let g = generator_matrix(n);
            let len = g.len();
            for i in 0..len {
                let e: Vec<u8> = (0..len).map(|j| (i == j) as u8).collect();
                assert_eq!(mul_matrix(&mul_matrix(&e, &g), &g), e);
            }
        }
    }

    #[test]
    fn matrix_agrees_with_butterfly() {
        for n in 0..=4 {
            let g = generator_matrix(n);
            let len = 1usize << n;
            for m in 0..(1usize << len).min(1 << 12) {
                let v: Vec<u8> = (0..len).map(|b| ((m >> b) & 1) as u8).collect();
                let fast = polar_transform(&BinaryVector::from_bits(&v).unwrap());
                assert_eq!(fast.to_vec(), mul_matrix(&v, &g), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn table_normalized() {
        let priors = [th(0.3), th(-0.9), th(0.0), th(0.55), th(1.0), th(-0.2), th(0.7), th(0.1)];
        let t = JointTable::new(&priors).unwrap();
        assert!((t.total() - 1.0).abs() < 1e-12);
        assert!(t.probs().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn conditional_examples() {
        let p = [th(0.5), th(0.5)];
        let c = brute_conditional_theta(&p, &[]).unwrap();
        assert!((c.theta.value() - 0.25).abs() < 1e-15);
        let c = brute_conditional_theta(&p, &[0]).unwrap();
        assert!((c.theta.value() - 0.8).abs() < 1e-15);
        assert!(brute_conditional_theta(&p, &[0, 1]).is_err());
    }

    #[test]
    fn deterministic_priors_give_certain_conditionals() {
        let p = [Theta::ONE, Theta::MINUS_ONE, Theta::MINUS_ONE, Theta::ONE];
        let t = JointTable::new(&p).unwrap();
        // Along the true path every conditional is certain.
        let x = BinaryVector::from_bits(&[0, 1, 1, 0]).unwrap();
        let u = polar_transform(&x).to_vec();
        for b in 0..4 {
            let c = t.conditional_theta(&u[..b]);
            assert!(!c.null_prefix);
            assert_eq!(c.theta.value().abs(), 1.0);
        }
        let wrong = [1 - u[0]];
        assert!(t.conditional_theta(&wrong).null_prefix);
    }

    #[test]
    fn map_sequence_examples() {
        let spec = CodeSpec::new(1, []).unwrap();
        let (path, p) = brute_map_sequence(&spec, &[th(0.8), th(0.8)], &[]).unwrap();
        assert_eq!(path, vec![0, 0]);
        assert!((p - 0.81).abs() < 1e-12);

        let all = CodeSpec::new(1, [0, 1]).unwrap();
        let priors = [th(0.8), th(0.8)];
        let (path, p) = brute_map_sequence(&all, &priors, &[1, 0]).unwrap();
        assert_eq!(path, vec![1, 0]);
        let t = JointTable::new(&priors).unwrap();
        assert_eq!(p, t.path_probability(&[1, 0]));
    }

    #[test]
    fn ranked_paths_n1() {
        let t = JointTable::new(&[th(0.8), th(0.8)]).unwrap();
        let ranked = t.ranked_paths(&[None, None]);
        let probs: Vec<f64> = ranked.iter().map(|r| r.1).collect();
        let expect = [0.81, 0.09, 0.09, 0.01];
        for (a, b) in probs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(ranked[0].0, vec![0, 0]);
        assert_eq!(ranked[1].0, vec![1, 0]);
        assert_eq!(ranked[3].0, vec![0, 1]);
    }

    #[test]
    fn size_guard() {
        assert!(matches!(
            JointTable::new(&vec![Theta::ZERO; 32]),
            Err(PolarError::OracleTooLarge { n: 5 })
        ));
    }

    #[test]
    fn bec_erasures_n1() {
        let e = bec_erasure_probabilities(1, 0.5).unwrap();
        assert!((e[0] - 0.75).abs() < 1e-15);
        assert!((e[1] - 0.25).abs() < 1e-15);
    }
}
