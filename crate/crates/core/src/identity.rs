//! Both sides of the valuation identity
//!
//! ```text
//! vp(a^n ± b^n) - vp(n) = vp(a^(p-1) - b^(p-1))
//! ```
//!
//! for coprime `a, b` with `p ∤ ab` and `p | a^n ± b^n`, including the
//! `p = 2` variants, plus a big-integer oracle that materializes
//! `a^n ± b^n` to check it.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::arith::modpow::{inverse_u64, modpow_u64, reduce_i64};
use crate::arith::order::order_of_residue;
use crate::arith::valuation::{vp_u128, vp_u64};
use crate::arith::{vp, Prime};
use crate::error::{Error, Result};
use crate::fermat::{pow_diff_valuation, WieferichOrder};

/// Largest `k` tried when reading `vp(a^(p-1) - b^(p-1))` off residues mod
/// `p^k`.
pub const IDENTITY_CAP: u32 = 64;

/// Default size guard for the oracle, in bits of `a^n`.
pub const DEFAULT_BIT_BUDGET: u64 = 1_000_000;

/// A coprime pair of nonzero integers, stored with `|a| < |b|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasePair {
    a: i64,
    b: i64,
}

impl BasePair {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        let bad = |reason| Err(Error::InvalidPair { a, b, reason });
        if a == 0 || b == 0 {
            return bad("entries must be nonzero");
        }
        if a == i64::MIN || b == i64::MIN {
            return bad("entries out of range");
        }
        if a.abs() == b.abs() {
            return bad("entries must differ in absolute value");
        }
        if a.gcd(&b) != 1 {
            return bad("entries must be coprime");
        }
        Ok(if a.abs() < b.abs() {
            BasePair { a, b }
        } else {
            BasePair { a: b, b: a }
        })
    }

    #[inline]
    pub fn a(&self) -> i64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn divisible_by(&self, p: Prime) -> bool {
        let p = p.get() as i128;
        (self.a as i128) % p == 0 || (self.b as i128) % p == 0
    }

    fn check_not_divisible(&self, p: Prime) -> Result<()> {
        if self.divisible_by(p) {
            Err(Error::BaseDivisible {
                p: p.get(),
                base: self.to_string(),
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for BasePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    /// `a^n - b^n`
    Minus,
    /// `a^n + b^n`
    Plus,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Sign> {
        match s {
            "-" | "minus" | "MINUS" => Ok(Sign::Minus),
            "+" | "plus" | "PLUS" => Ok(Sign::Plus),
            other => Err(Error::InvalidInput(format!("unknown sign {other:?}"))),
        }
    }
}

/// `a^n ± b^n` with negative entries folded into the sign:
/// positive magnitudes `a < b` and the effective sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Normalized {
    a: u64,
    b: u64,
    sign: Sign,
}

fn normalize(pair: BasePair, n: u64, sign: Sign) -> Normalized {
    let negatives = (pair.a < 0) as u8 + (pair.b < 0) as u8;
    // a^n + s*b^n = sa^n * (|a|^n + s * (sa*sb)^n * |b|^n)
    let sign = if negatives == 1 && n % 2 == 1 {
        sign.flip()
    } else {
        sign
    };
    Normalized {
        a: pair.a.unsigned_abs(),
        b: pair.b.unsigned_abs(),
        sign,
    }
}

fn expr(pair: BasePair, n: u64, sign: Sign) -> String {
    format!("{}^{n} {} {}^{n}", pair.a, sign.symbol(), pair.b)
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidInput("n must be positive".into()))
    } else {
        Ok(())
    }
}

fn v2(x: u128) -> u32 {
    x.trailing_zeros()
}

/// The two terms of the identity: `vp(n)` and the right-hand side.
pub(crate) fn identity_parts(pair: BasePair, n: u64, p: Prime, sign: Sign) -> Result<(u32, u32)> {
    check_n(n)?;
    pair.check_not_divisible(p)?;
    let norm = normalize(pair, n, sign);
    let pv = p.get();
    let x = modpow_u64(norm.a % pv, n, pv);
    let y = modpow_u64(norm.b % pv, n, pv);
    let divisible = match norm.sign {
        Sign::Minus => x == y,
        Sign::Plus => (x + y).is_multiple_of(pv),
    };
    if !divisible {
        return Err(Error::NotDivisible {
            p: pv,
            expr: expr(pair, n, sign),
        });
    }
    let vp_n = vp_u64(n, p)?;
    if !p.is_two() {
        return match pow_diff_valuation(norm.a as i64, norm.b as i64, pv - 1, p, IDENTITY_CAP) {
            WieferichOrder::Exact(r) => Ok((vp_n, r)),
            WieferichOrder::AtLeast(c) => Err(Error::CapReached(c)),
        };
    }
    let (a, b) = (norm.a as u128, norm.b as u128);
    let rhs = match norm.sign {
        Sign::Minus if n % 2 == 1 || (a * b) % 4 == 1 => v2(b - a),
        Sign::Minus => v2(a + b),
        Sign::Plus if n % 2 == 1 => v2(a + b),
        Sign::Plus => {
            return Err(Error::OutOfScope(format!(
                "{} at p = 2 with n even",
                expr(pair, n, sign)
            )))
        }
    };
    Ok((vp_n, rhs))
}

/// `vp(a^n ± b^n)` from the identity, without forming `a^n ± b^n`.
pub fn predicted_valuation(pair: BasePair, n: u64, p: Prime, sign: Sign) -> Result<u32> {
    let (vp_n, rhs) = identity_parts(pair, n, p, sign)?;
    Ok(vp_n + rhs)
}

/// `vp(a^n ± b^n)` for odd `a, b` at `p = 2` and even `n`, where
/// `a^n + b^n ≡ 2 (mod 4)`. Kept apart from [`predicted_valuation`], which
/// rejects this case.
pub fn extension_plus_even_two(pair: BasePair, n: u64) -> Result<u32> {
    check_n(n)?;
    let two = Prime::new(2).expect("prime");
    pair.check_not_divisible(two)?;
    if n % 2 == 1 {
        return Err(Error::InvalidInput("extension covers even n only".into()));
    }
    Ok(1)
}

/// Size of `a^n` in bits, rounded up.
fn power_bits(pair: BasePair, n: u64) -> u64 {
    let m = pair.a.unsigned_abs().max(pair.b.unsigned_abs());
    let bits = 64 - m.leading_zeros() as u64;
    n.saturating_mul(bits)
}

pub(crate) fn within_budget(pair: BasePair, n: u64, bit_budget: u64) -> bool {
    power_bits(pair, n) <= bit_budget
}

/// `vp(a^n ± b^n)` by building `a^n ± b^n` exactly.
pub fn direct_valuation(
    pair: BasePair,
    n: u64,
    p: Prime,
    sign: Sign,
    bit_budget: u64,
) -> Result<u32> {
    check_n(n)?;
    let needed = power_bits(pair, n);
    if needed > bit_budget {
        return Err(Error::BitBudget {
            needed,
            budget: bit_budget,
        });
    }
    let e = u32::try_from(n).map_err(|_| Error::BitBudget {
        needed,
        budget: bit_budget,
    })?;
    let an = BigInt::from(pair.a).pow(e);
    let bn = BigInt::from(pair.b).pow(e);
    let value = match sign {
        Sign::Minus => an - bn,
        Sign::Plus => an + bn,
    };
    vp(&value, p)
}

/// Where the left-hand side of a [`DefectReport`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LhsSource {
    Oracle,
    Identity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefectReport {
    pub pair: BasePair,
    pub n: u64,
    pub p: Prime,
    pub sign: Sign,
    pub lhs_valuation: u32,
    pub vp_n: u32,
    pub rhs_valuation: u32,
    pub defect: i64,
    pub identity_holds: bool,
    pub lhs_source: LhsSource,
}

/// Fills in both sides of the identity. When `a^n ± b^n` fits the bit
/// budget the left side comes from the oracle, and any disagreement with
/// the identity is an [`Error::Invariant`].
pub fn defect_report(
    pair: BasePair,
    n: u64,
    p: Prime,
    sign: Sign,
    bit_budget: u64,
) -> Result<DefectReport> {
    let (vp_n, rhs) = identity_parts(pair, n, p, sign)?;
    let predicted = vp_n + rhs;
    let (lhs, lhs_source) = if within_budget(pair, n, bit_budget) {
        let direct = direct_valuation(pair, n, p, sign, bit_budget)?;
        if direct != predicted {
            return Err(Error::Invariant(format!(
                "v_{p}({}) is {direct} but the identity predicts {predicted}",
                expr(pair, n, sign)
            )));
        }
        (direct, LhsSource::Oracle)
    } else {
        (predicted, LhsSource::Identity)
    };
    Ok(DefectReport {
        pair,
        n,
        p,
        sign,
        lhs_valuation: lhs,
        vp_n,
        rhs_valuation: rhs,
        defect: lhs as i64 - vp_n as i64,
        identity_holds: lhs == vp_n + rhs,
        lhs_source,
    })
}

/// `vp(n) + vp(a ± b)` under the stronger hypothesis `p | a ± b`, checked
/// against the oracle when it fits the bit budget.
pub fn lemma13_check(pair: BasePair, n: u64, p: Prime, sign: Sign, bit_budget: u64) -> Result<u32> {
    check_n(n)?;
    pair.check_not_divisible(p)?;
    let (a, b) = (pair.a as i128, pair.b as i128);
    let base_sum = match sign {
        Sign::Minus => a - b,
        Sign::Plus => a + b,
    };
    let pv = p.get() as i128;
    if base_sum % pv != 0 {
        return Err(Error::Hypothesis(format!(
            "{p} does not divide {} {} {}; divisibility of a^n ± b^n alone is not enough \
             (v_3(5^4 - 4^4) = 2 while v_3(4) + v_3(5 - 4) = 0)",
            pair.a,
            sign.symbol(),
            pair.b
        )));
    }
    if sign == Sign::Plus && n.is_multiple_of(2) && !p.is_two() {
        return Err(Error::Hypothesis(format!(
            "the sum form needs n odd; with {p} | a + b and n = {n} even, {p} does not divide a^n + b^n"
        )));
    }
    if p.is_two() {
        if sign == Sign::Plus {
            return Err(Error::Hypothesis(
                "at p = 2 only the difference form holds".into(),
            ));
        }
        if n.is_multiple_of(2) && (a * b).rem_euclid(4) == 3 {
            return Err(Error::Hypothesis(
                "at p = 2 with n even and ab ≡ 3 (mod 4) the valuation follows a + b, not a - b"
                    .into(),
            ));
        }
    }
    let value = vp_u64(n, p)? + vp_u128(base_sum.unsigned_abs(), p)?;
    if within_budget(pair, n, bit_budget) {
        let direct = direct_valuation(pair, n, p, sign, bit_budget)?;
        if direct != value {
            return Err(Error::Invariant(format!(
                "v_{p}({}) is {direct}, lemma gives {value}",
                expr(pair, n, sign)
            )));
        }
    }
    Ok(value)
}

/// The order `d` of `a/b` modulo `p` and `vp(a^d - b^d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderPoint {
    pub d: u64,
    pub valuation: u32,
}

pub fn order_point_valuation(pair: BasePair, p: Prime) -> Result<OrderPoint> {
    if p.is_two() {
        return Err(Error::InvalidInput("p must be odd".into()));
    }
    pair.check_not_divisible(p)?;
    let pv = p.get();
    let a = reduce_i64(pair.a, pv);
    let b_inv = inverse_u64(reduce_i64(pair.b, pv), pv).expect("p does not divide b");
    let ratio = ((a as u128 * b_inv as u128) % pv as u128) as u64;
    let d = order_of_residue(ratio, p);
    let at_d = pow_diff_valuation(pair.a, pair.b, d, p, IDENTITY_CAP);
    let at_p_minus_1 = pow_diff_valuation(pair.a, pair.b, pv - 1, p, IDENTITY_CAP);
    let valuation = at_d.exact().ok_or(Error::CapReached(IDENTITY_CAP))?;
    if at_d != at_p_minus_1 {
        return Err(Error::Invariant(format!(
            "v_{p}(a^{d} - b^{d}) = {at_d} differs from v_{p}(a^{} - b^{}) = {at_p_minus_1} for {pair}",
            pv - 1,
            pv - 1
        )));
    }
    Ok(OrderPoint { d, valuation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: i64, b: i64) -> BasePair {
        BasePair::new(a, b).unwrap()
    }

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn base_pair_rules() {
        assert_eq!(pair(7, 2), pair(2, 7));
        assert_eq!(pair(7, 2).a(), 2);
        assert!(BasePair::new(0, 3).is_err());
        assert!(BasePair::new(4, 6).is_err());
        assert!(BasePair::new(1, -1).is_err());
        assert_eq!(pair(-5, 3).a(), 3);
    }

    #[test]
    fn predicted_examples() {
        assert_eq!(predicted_valuation(pair(7, 2), 5, p(5), Sign::Minus), Ok(2));
        assert_eq!(
            predicted_valuation(pair(2, 1), 364, p(1093), Sign::Minus),
            Ok(2)
        );
        assert_eq!(predicted_valuation(pair(3, 1), 2, p(2), Sign::Minus), Ok(3));
        assert_eq!(predicted_valuation(pair(5, 4), 4, p(3), Sign::Minus), Ok(2));
    }

    #[test]
    fn predicted_errors() {
        assert!(matches!(
            predicted_valuation(pair(2, 1), 5, p(7), Sign::Minus),
            Err(Error::NotDivisible { .. })
        ));
        assert!(matches!(
            predicted_valuation(pair(3, 7), 2, p(3), Sign::Minus),
            Err(Error::BaseDivisible { .. })
        ));
        assert!(matches!(
            predicted_valuation(pair(3, 1), 2, p(2), Sign::Plus),
            Err(Error::OutOfScope(_))
        ));
        assert_eq!(extension_plus_even_two(pair(3, 1), 2), Ok(1));
        assert_eq!(
            direct_valuation(pair(3, 1), 2, p(2), Sign::Plus, DEFAULT_BIT_BUDGET),
            Ok(1)
        );
    }

    #[test]
    fn negative_entries_fold_into_sign() {
        // (-2)^3 - 1 = -9
        let q = pair(-2, 1);
        assert_eq!(predicted_valuation(q, 3, p(3), Sign::Minus), Ok(2));
        assert_eq!(direct_valuation(q, 3, p(3), Sign::Minus, 1000), Ok(2));
        // (-1)^2 - 3^2 = -8, ab ≡ 1 mod 4 in signed terms
        assert_eq!(
            predicted_valuation(pair(-1, 3), 2, p(2), Sign::Minus),
            Ok(3)
        );
    }

    #[test]
    fn direct_examples() {
        let d = |a, b, n, q, s| direct_valuation(pair(a, b), n, p(q), s, DEFAULT_BIT_BUDGET);
        assert_eq!(d(5, 4, 4, 3, Sign::Minus), Ok(2));
        assert_eq!(d(2, 1, 6, 7, Sign::Minus), Ok(1));
        assert_eq!(d(3, 1, 5, 2, Sign::Plus), Ok(2));
        assert!(matches!(
            direct_valuation(pair(3, 1), 1_000_000, p(2), Sign::Minus, 1000),
            Err(Error::BitBudget { .. })
        ));
    }

    #[test]
    fn defect_examples() {
        let r = defect_report(pair(2, 1), 364, p(1093), Sign::Minus, DEFAULT_BIT_BUDGET).unwrap();
        assert_eq!((r.defect, r.rhs_valuation, r.identity_holds), (2, 2, true));
        assert_eq!(r.lhs_source, LhsSource::Oracle);

        let r = defect_report(pair(2, 1), 3, p(7), Sign::Minus, DEFAULT_BIT_BUDGET).unwrap();
        assert_eq!((r.defect, r.rhs_valuation), (1, 1));

        let r = defect_report(pair(2, 1), 21, p(7), Sign::Minus, DEFAULT_BIT_BUDGET).unwrap();
        assert_eq!((r.defect, r.vp_n, r.lhs_valuation), (1, 1, 2));

        let r = defect_report(pair(2, 1), 364 * 1093, p(1093), Sign::Minus, 1000).unwrap();
        assert_eq!(r.lhs_source, LhsSource::Identity);
        assert_eq!((r.lhs_valuation, r.defect), (3, 2));
    }

    #[test]
    fn lemma_examples() {
        let l = |a, b, n, q, s| lemma13_check(pair(a, b), n, p(q), s, DEFAULT_BIT_BUDGET);
        assert!(matches!(
            l(5, 4, 2, 3, Sign::Minus),
            Err(Error::Hypothesis(_))
        ));
        assert_eq!(l(5, 4, 1, 3, Sign::Plus), Ok(2));
        assert_eq!(l(7, 2, 5, 5, Sign::Minus), Ok(2));
        assert!(matches!(
            l(3, 1, 3, 2, Sign::Plus),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            l(3, 1, 2, 2, Sign::Minus),
            Err(Error::Hypothesis(_))
        ));
        assert_eq!(l(5, 1, 6, 2, Sign::Minus), Ok(3));
    }

    #[test]
    fn order_point_examples() {
        assert_eq!(
            order_point_valuation(pair(2, 1), p(7)),
            Ok(OrderPoint { d: 3, valuation: 1 })
        );
        assert_eq!(
            order_point_valuation(pair(2, 1), p(1093)),
            Ok(OrderPoint {
                d: 364,
                valuation: 2
            })
        );
        let op = order_point_valuation(pair(3, 13), p(19)).unwrap();
        assert_eq!(op.valuation, 2);
        assert_eq!((18 % op.d), 0);
        assert!(order_point_valuation(pair(2, 1), p(2)).is_err());
    }
}
