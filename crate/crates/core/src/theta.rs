//! Symmetric parametrization of binary distributions.
//!
//! A distribution on `{0, 1}` is carried as `θ = P(0) − P(1) ∈ [−1, 1]`, so
//! `P(u) = (1 ∓_u θ) / 2` where `∓_u` is `+` for `u = 0` and `−` for `u = 1`.
//! For independent `U_0, U_1` the pair `(U_0 ⊕ U_1, U_1)` has
//!
//! * check:  `θ'_0 = θ_1 θ_0`
//! * bit:    `θ'_1 = (θ_1 ∓_u θ_0) / (1 ∓_u θ'_0)` given `U_0 ⊕ U_1 = u`.

use std::fmt;

use crate::error::{PolarError, Result};

/// Slack allowed beyond `[−1, 1]` before a result is reported as numerical
/// trouble rather than silently clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

/// `θ = P(0) − P(1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Theta(f64);

impl Theta {
    pub const ZERO: Theta = Theta(0.0);
    pub const ONE: Theta = Theta(1.0);
    pub const MINUS_ONE: Theta = Theta(-1.0);

    /// Accepts values within `CLAMP_TOLERANCE` of `[−1, 1]`, clamping them.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value.abs() > 1.0 + CLAMP_TOLERANCE {
            return Err(PolarError::ThetaOutOfRange(value));
        }
        Ok(Theta(value.clamp(-1.0, 1.0)))
    }

    /// Deterministic symbol: `+1` for bit 0, `−1` for bit 1.
    pub fn certain(bit: u8) -> Self {
        if bit == 0 {
            Theta::ONE
        } else {
            Theta::MINUS_ONE
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `P(u) = (1 ∓_u θ) / 2`.
    #[inline]
    pub fn prob(self, u: u8) -> f64 {
        0.5 * signed_one_plus(self.0, u)
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `1 ∓_u t`.
#[inline]
pub(crate) fn signed_one_plus(t: f64, u: u8) -> f64 {
    if u == 0 {
        1.0 + t
    } else {
        1.0 - t
    }
}

/// `θ = 2 p0 − 1`.
pub fn theta_from_prior(p0: f64) -> Result<Theta> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(PolarError::ProbabilityOutOfRange(p0));
    }
    Theta::new(2.0 * p0 - 1.0)
}

/// Parameter of `U_0 ⊕ U_1`.
#[inline]
pub fn combine_check(th0: Theta, th1: Theta) -> Theta {
    Theta((th1.0 * th0.0).clamp(-1.0, 1.0))
}

/// Why the bit rule could not produce a proper value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Degenerate {
    /// `1 ∓_u θ_check = 0`: the conditioning event has probability zero.
    ZeroDenominator,
    /// The quotient left `[−1, 1]` by more than `CLAMP_TOLERANCE`; carries
    /// the clamped value.
    Excess(Theta),
}

/// Parameter of `U_1` given `U_0 ⊕ U_1 = u`, where `th_check` is
/// `combine_check(th0, th1)`.
///
/// On a zero denominator callers substitute `Theta::ZERO` and record the
/// event; any value is consistent with a probability-zero condition.
#[inline]
pub fn combine_bit(th0: Theta, th1: Theta, u: u8, th_check: Theta) -> std::result::Result<Theta, Degenerate> {
    let den = signed_one_plus(th_check.0, u);
    if den == 0.0 {
        return Err(Degenerate::ZeroDenominator);
    }
    let num = if u == 0 { th1.0 + th0.0 } else { th1.0 - th0.0 };
    let q = num / den;
    if q.abs() <= 1.0 {
        Ok(Theta(q))
    } else if q.abs() <= 1.0 + CLAMP_TOLERANCE {
        Ok(Theta(q.clamp(-1.0, 1.0)))
    } else if q.is_nan() {
        Err(Degenerate::ZeroDenominator)
    } else {
        Err(Degenerate::Excess(Theta(q.clamp(-1.0, 1.0))))
    }
}

/// MAP decision on `θ`; a tie (`θ = 0`) decodes to 0.
#[inline]
pub fn map_decision(th: Theta) -> u8 {
    if th.0 < 0.0 {
        1
    } else {
        0
    }
}

/// `θ` restricted to `{−1, 0, 1}`, as produced by an erasure channel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct TernaryTheta(i8);

impl TernaryTheta {
    pub const ERASED: TernaryTheta = TernaryTheta(0);

    pub fn new(value: i8) -> Result<Self> {
        if !(-1..=1).contains(&value) {
            return Err(PolarError::ThetaOutOfRange(value as f64));
        }
        Ok(TernaryTheta(value))
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn to_theta(self) -> Theta {
        Theta(self.0 as f64)
    }

    /// Exact conversion; `None` unless `θ ∈ {−1, 0, 1}`.
    pub fn from_theta(th: Theta) -> Option<Self> {
        match th.0 {
            1.0 => Some(TernaryTheta(1)),
            -1.0 => Some(TernaryTheta(-1)),
            0.0 => Some(TernaryTheta(0)),
            _ => None,
        }
    }
}

#[inline]
pub fn combine_check_ternary(t0: TernaryTheta, t1: TernaryTheta) -> TernaryTheta {
    TernaryTheta(t1.0 * t0.0)
}

/// Sign of `t1 ∓_u t0`; no division.
#[inline]
pub fn combine_bit_ternary(t0: TernaryTheta, t1: TernaryTheta, u: u8) -> TernaryTheta {
    let num = if u == 0 { t1.0 + t0.0 } else { t1.0 - t0.0 };
    TernaryTheta(num.signum())
}

/// Arithmetic of one decoder θ-cell: real-valued or ternary.
pub trait ThetaCell: Copy + Default + PartialEq + fmt::Debug + Send + Sync + 'static {
    /// Converts a channel prior; `None` if the representation cannot hold it.
    fn from_theta(th: Theta) -> Option<Self>;

    fn check(t0: Self, t1: Self) -> Self;

    /// Bit rule. The flag is set when the real-valued rule hit a degenerate
    /// denominator or had to clamp an out-of-range result.
    fn bit(t0: Self, t1: Self, u: u8, check: Self) -> (Self, bool);

    fn theta(self) -> Theta;
}

impl ThetaCell for Theta {
    fn from_theta(th: Theta) -> Option<Self> {
        Some(th)
    }

    #[inline]
    fn check(t0: Self, t1: Self) -> Self {
        combine_check(t0, t1)
    }

    #[inline]
    fn bit(t0: Self, t1: Self, u: u8, check: Self) -> (Self, bool) {
        match combine_bit(t0, t1, u, check) {
            Ok(t) => (t, false),
            Err(Degenerate::ZeroDenominator) => (Theta::ZERO, true),
            Err(Degenerate::Excess(t)) => (t, true),
        }
    }

    #[inline]
    fn theta(self) -> Theta {
        self
    }
}

impl ThetaCell for TernaryTheta {
    fn from_theta(th: Theta) -> Option<Self> {
        TernaryTheta::from_theta(th)
    }

    #[inline]
    fn check(t0: Self, t1: Self) -> Self {
        combine_check_ternary(t0, t1)
    }

    #[inline]
    fn bit(t0: Self, t1: Self, u: u8, _check: Self) -> (Self, bool) {
        (combine_bit_ternary(t0, t1, u), false)
    }

    #[inline]
    fn theta(self) -> Theta {
        self.to_theta()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn th(v: f64) -> Theta {
        Theta::new(v).unwrap()
    }

    /// Joint pmf of independent (U0, U1) with P(Ui = 0) = p[i].
    fn joint(p0: f64, p1: f64) -> [[f64; 2]; 2] {
        let p = [[p0, 1.0 - p0], [p1, 1.0 - p1]];
        let mut j = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                j[a][b] = p[0][a] * p[1][b];
            }
        }
        j
    }

    /// θ of U0 ⊕ U1 by enumeration.
    fn brute_check(p0: f64, p1: f64) -> f64 {
        let j = joint(p0, p1);
        let zero = j[0][0] + j[1][1];
        let one = j[0][1] + j[1][0];
        zero - one
    }

    /// θ of U1 given U0 ⊕ U1 = u by enumeration; None if the event is null.
    fn brute_bit(p0: f64, p1: f64, u: usize) -> Option<f64> {
        let j = joint(p0, p1);
        // U1 = b, U0 = u ^ b
        let m0 = j[u][0];
        let m1 = j[u ^ 1][1];
        let total = m0 + m1;
        if total == 0.0 {
            None
        } else {
            Some((m0 - m1) / total)
        }
    }

    #[test]
    fn prior_examples() {
        assert!((theta_from_prior(0.9).unwrap().value() - 0.8).abs() < 1e-15);
        assert_eq!(theta_from_prior(0.5).unwrap(), Theta::ZERO);
        assert_eq!(theta_from_prior(1.0).unwrap(), Theta::ONE);
        assert!(theta_from_prior(1.1).is_err());
        assert!(theta_from_prior(-0.1).is_err());
        assert!(theta_from_prior(f64::NAN).is_err());
    }

    #[test]
    fn check_examples() {
        assert_eq!(combine_check(th(0.5), th(0.5)).value(), 0.25);
        assert!((brute_check(0.75, 0.75) - 0.25).abs() < 1e-15);
        assert_eq!(combine_check(th(0.3), Theta::ONE).value(), 0.3);
        assert_eq!(combine_check(th(0.3), Theta::ZERO).value(), 0.0);
    }

    #[test]
    fn bit_examples() {
        let check = combine_check(th(0.5), th(0.5));
        let t = combine_bit(th(0.5), th(0.5), 0, check).unwrap();
        assert!((t.value() - 0.8).abs() < 1e-15);
        assert!((brute_bit(0.75, 0.75, 0).unwrap() - 0.8).abs() < 1e-15);
        let t = combine_bit(th(0.5), th(0.5), 1, check).unwrap();
        assert_eq!(t.value(), 0.0);
        assert_eq!(brute_bit(0.75, 0.75, 1).unwrap(), 0.0);
        for u in 0..2 {
            let t = combine_bit(Theta::ZERO, th(-0.35), u, Theta::ZERO).unwrap();
            assert_eq!(t.value(), -0.35);
        }
    }

    #[test]
    fn bit_zero_denominator() {
        // U0 = 0 and U1 = 1 surely, so U0 ⊕ U1 = 0 has probability zero.
        let (a, b) = (Theta::ONE, Theta::MINUS_ONE);
        let check = combine_check(a, b);
        assert_eq!(combine_bit(a, b, 0, check), Err(Degenerate::ZeroDenominator));
        assert_eq!(brute_bit(1.0, 0.0, 0), None);
        assert_eq!(<Theta as ThetaCell>::bit(a, b, 0, check), (Theta::ZERO, true));
        assert_eq!(combine_bit(a, b, 1, check), Ok(Theta::MINUS_ONE));
    }

    #[test]
    fn decisions() {
        assert_eq!(map_decision(th(0.3)), 0);
        assert_eq!(map_decision(th(-0.1)), 1);
        assert_eq!(map_decision(Theta::ZERO), 0);
        assert_eq!(map_decision(th(-0.0)), 0);
    }

    #[test]
    fn ternary_examples() {
        let t = |v| TernaryTheta::new(v).unwrap();
        assert_eq!(combine_check_ternary(t(0), t(1)), t(0));
        assert_eq!(combine_bit_ternary(t(1), t(1), 0), t(1));
        assert_eq!(combine_bit_ternary(t(1), t(0), 0), t(1));
        assert_eq!(combine_bit_ternary(t(1), t(1), 1), t(0));
        assert!(TernaryTheta::new(2).is_err());
        assert_eq!(TernaryTheta::from_theta(th(0.5)), None);
        assert_eq!(TernaryTheta::from_theta(Theta::MINUS_ONE), Some(t(-1)));
    }

    #[test]
    fn ternary_matches_real_rules() {
        let vals = [-1i8, 0, 1];
        for &a in &vals {
            for &b in &vals {
                let (ta, tb) = (TernaryTheta(a), TernaryTheta(b));
                let check = combine_check(ta.to_theta(), tb.to_theta());
                assert_eq!(combine_check_ternary(ta, tb).to_theta(), check);
                for u in 0..2 {
                    if let Ok(real) = combine_bit(ta.to_theta(), tb.to_theta(), u, check) {
                        assert_eq!(combine_bit_ternary(ta, tb, u).to_theta(), real, "{a} {b} {u}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn rules_match_enumeration(p0 in 0.0f64..=1.0, p1 in 0.0f64..=1.0, u in 0u8..2) {
            let (t0, t1) = (theta_from_prior(p0).unwrap(), theta_from_prior(p1).unwrap());
            let check = combine_check(t0, t1);
            prop_assert!((check.value() - brute_check(p0, p1)).abs() < 1e-12);
            match (combine_bit(t0, t1, u, check), brute_bit(p0, p1, u as usize)) {
                (Ok(t), Some(b)) => prop_assert!((t.value() - b).abs() < 1e-12, "{} vs {}", t, b),
                (Err(Degenerate::ZeroDenominator), None) => {}
                (r, b) => prop_assert!(false, "{:?} vs {:?}", r, b),
            }
        }

        #[test]
        fn outputs_stay_in_range(a in -1.0f64..=1.0, b in -1.0f64..=1.0, u in 0u8..2) {
            let (t0, t1) = (th(a), th(b));
            let check = combine_check(t0, t1);
            prop_assert!(check.value().abs() <= 1.0);
            prop_assert_eq!(check, combine_check(t1, t0));
            let (t, _) = <Theta as ThetaCell>::bit(t0, t1, u, check);
            prop_assert!(t.value().abs() <= 1.0);
        }

        #[test]
        fn decision_is_scale_invariant(p0 in 0.0f64..1.0, scale in 1e-6f64..1e6) {
            let (m0, m1) = (p0 * scale, (1.0 - p0) * scale);
            let t = theta_from_prior(m0 / (m0 + m1)).unwrap();
            let direct = theta_from_prior(p0).unwrap();
            prop_assert_eq!(map_decision(t), map_decision(direct));
        }
    }
}
