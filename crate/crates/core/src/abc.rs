//! Radicals, the average power `log(a^n - 1) / log(rad(a^n - 1))`, and the
//! splitting
//!
//! ```text
//! a^n - 1 = m1 * m2,   m2 = m21 * m22,   m21 = mN * mW
//! ```
//!
//! into the squarefree part, the powerful part at primes dividing `n`
//! (non-Wieferich and Wieferich), and the powerful part at primes not
//! dividing `n`.
//!
//! A prime counts as Wieferich to the base `a` when the right-hand side of
//! the valuation identity for `a^n - 1` is at least 2. For odd `p` that is
//! `vp(a^(p-1) - 1) >= 2`; at `p = 2` it is `v2(a - 1)`, or `v2(a + 1)`
//! when `a ≡ 3 (mod 4)` and `n` is even.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::factor::{expand, factor_big_partial, factor_u64, FactorBudget, Factorization};
use crate::arith::{is_probable_prime_big, Prime};
use crate::error::{Error, Result};
use crate::identity::{identity_parts, BasePair, Sign};

fn ser_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn ser_factors<S: Serializer>(f: &Factorization, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(f.len()))?;
    for (p, e) in f {
        seq.serialize_element(&(p.to_string(), e))?;
    }
    seq.end()
}

/// Product of the distinct primes of `m`, after checking that
/// `factorization` multiplies out to `m` and lists only primes.
pub fn radical(m: &BigUint, factorization: &[(BigUint, u32)]) -> Result<BigUint> {
    if m.is_zero() {
        return Err(Error::InvalidInput("radical of 0".into()));
    }
    if &expand(factorization) != m {
        return Err(Error::Certification(format!(
            "factorization does not multiply to {m}"
        )));
    }
    if let Some((p, _)) = factorization
        .iter()
        .find(|(p, _)| !is_probable_prime_big(p))
    {
        return Err(Error::Certification(format!("{p} is not prime")));
    }
    Ok(factorization.iter().map(|(p, _)| p).product())
}

fn rad_u64(n: u64) -> u64 {
    factor_u64(n).iter().map(|(p, _)| p).product()
}

/// Which part of `a^n - 1` a prime power lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    M1,
    MN,
    MW,
    M22,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifiedPrime {
    #[serde(serialize_with = "ser_big")]
    pub p: BigUint,
    pub exponent: u32,
    pub divides_n: bool,
    pub wieferich: bool,
    pub part: Part,
}

/// Whatever could be classified when the factorization did not finish.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialSplit {
    pub a: u64,
    pub n: u64,
    pub classified: Vec<ClassifiedPrime>,
    #[serde(serialize_with = "ser_opt_big")]
    pub unfactored: Option<BigUint>,
}

fn ser_opt_big<S: Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorSplit {
    pub a: u64,
    pub n: u64,
    #[serde(serialize_with = "ser_factors")]
    pub factorization: Factorization,
    #[serde(serialize_with = "ser_big")]
    pub m1: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub m2: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub m21: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub m22: BigUint,
    #[serde(rename = "mN", serialize_with = "ser_big")]
    pub m_n: BigUint,
    #[serde(rename = "mW", serialize_with = "ser_big")]
    pub m_w: BigUint,
    #[serde(rename = "bound_mN_ok")]
    pub bound_m_n_ok: bool,
    pub classified: Vec<ClassifiedPrime>,
}

fn mobius(n: u64) -> i32 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// `Φ_d(a)` as `∏_{e | d} (a^e - 1)^μ(d/e)`.
fn cyclotomic_value(a: u64, d: u64) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for e in divisors(d) {
        let term = BigUint::from(a).pow(e as u32) - 1u32;
        match mobius(d / e) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// `a^n - 1` factored through its cyclotomic pieces.
fn factor_power_minus_one(
    a: u64,
    n: u64,
    budget: &FactorBudget,
) -> (Factorization, Option<BigUint>) {
    let mut merged: std::collections::BTreeMap<BigUint, u32> = Default::default();
    let mut left = BigUint::one();
    for d in divisors(n) {
        let piece = cyclotomic_value(a, d);
        let part = factor_big_partial(&piece, budget);
        for (p, e) in part.found {
            *merged.entry(p).or_insert(0) += e;
        }
        if let Some(c) = part.unfactored {
            left *= c;
        }
    }
    (
        merged.into_iter().collect(),
        (!left.is_one()).then_some(left),
    )
}

type ClassCache = RwLock<HashMap<(u64, BigUint), bool>>;

fn class_cache() -> &'static ClassCache {
    static CACHE: OnceLock<ClassCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The identity's right-hand side for `p | a^n - 1` is at least 2.
pub fn is_wieferich_for(a: u64, n: u64, p: &BigUint) -> Result<bool> {
    if p == &BigUint::from(2u32) {
        let two = Prime::new(2).expect("prime");
        let pair = BasePair::new(1, a as i64)?;
        return Ok(identity_parts(pair, n, two, Sign::Minus)?.1 >= 2);
    }
    let key = (a, p.clone());
    if let Some(&hit) = class_cache().read().expect("cache lock").get(&key) {
        return Ok(hit);
    }
    let value = odd_prime_is_wieferich(a, p)?;
    class_cache()
        .write()
        .expect("cache lock")
        .insert(key, value);
    Ok(value)
}

fn odd_prime_is_wieferich(a: u64, p: &BigUint) -> Result<bool> {
    if (BigUint::from(a) % p).is_zero() {
        return Err(Error::BaseDivisible {
            p: p.to_u64().unwrap_or(0),
            base: a.to_string(),
        });
    }
    let p2 = p * p;
    Ok(BigUint::from(a).modpow(&(p - 1u32), &p2).is_one())
}

fn classify(a: u64, n: u64, factors: &Factorization) -> Result<Vec<ClassifiedPrime>> {
    let nb = BigUint::from(n);
    factors
        .iter()
        .map(|(p, e)| {
            let divides_n = (&nb % p).is_zero();
            let wieferich = is_wieferich_for(a, n, p)?;
            let part = match (*e >= 2, divides_n, wieferich) {
                (false, _, _) => Part::M1,
                (true, false, _) => Part::M22,
                (true, true, false) => Part::MN,
                (true, true, true) => Part::MW,
            };
            Ok(ClassifiedPrime {
                p: p.clone(),
                exponent: *e,
                divides_n,
                wieferich,
                part,
            })
        })
        .collect()
}

fn check_args(a: u64, n: u64) -> Result<()> {
    if a < 2 {
        return Err(Error::InvalidInput(format!(
            "base must be at least 2, got {a}"
        )));
    }
    if n == 0 || n > u32::MAX as u64 {
        return Err(Error::InvalidInput(format!("n = {n} out of range")));
    }
    Ok(())
}

/// Classifies every prime of `a^n - 1` that the budget lets us find.
pub fn partial_factor_split(a: u64, n: u64, budget: &FactorBudget) -> Result<PartialSplit> {
    check_args(a, n)?;
    let (factors, unfactored) = factor_power_minus_one(a, n, budget);
    Ok(PartialSplit {
        a,
        n,
        classified: classify(a, n, &factors)?,
        unfactored,
    })
}

pub fn factor_split(a: u64, n: u64, budget: &FactorBudget) -> Result<FactorSplit> {
    let partial = partial_factor_split(a, n, budget)?;
    if let Some(c) = partial.unfactored {
        return Err(Error::Budget {
            what: format!("factoring {a}^{n} - 1"),
            cofactor: c.to_string(),
        });
    }
    let mut parts: HashMap<Part, BigUint> = HashMap::new();
    for c in &partial.classified {
        *parts.entry(c.part).or_insert_with(BigUint::one) *= c.p.pow(c.exponent);
    }
    let get = |k| parts.get(&k).cloned().unwrap_or_else(BigUint::one);
    let (m1, m_n, m_w, m22) = (get(Part::M1), get(Part::MN), get(Part::MW), get(Part::M22));
    let m21 = &m_n * &m_w;
    let m2 = &m21 * &m22;
    let mut split = FactorSplit {
        a,
        n,
        factorization: partial
            .classified
            .iter()
            .map(|c| (c.p.clone(), c.exponent))
            .collect(),
        m1,
        m2,
        m21,
        m22,
        m_n,
        m_w,
        bound_m_n_ok: false,
        classified: partial.classified,
    };
    split.bound_m_n_ok = split.m_n_bound_ok();
    let violations = split.invariant_violations();
    if !violations.is_empty() {
        return Err(Error::Invariant(violations.join("; ")));
    }
    Ok(split)
}

impl FactorSplit {
    pub fn value(&self) -> BigUint {
        BigUint::from(self.a).pow(self.n as u32) - 1u32
    }

    /// `n * rad(n)`, the bound on `mN`.
    pub fn m_n_bound(&self) -> BigUint {
        BigUint::from(self.n) * rad_u64(self.n)
    }

    pub fn m_n_bound_ok(&self) -> bool {
        self.m_n <= self.m_n_bound()
    }

    /// Checks, independently of how the parts were built:
    /// the product chain, squarefree / powerful shapes, `gcd(m1, n) = 1`,
    /// the Wieferich status of the primes in `m1` and `m22`, and
    /// `mN <= n rad(n)`. Returns one message per failure.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let value = self.value();
        if &self.m1 * &self.m2 != value
            || self.m2 != &self.m21 * &self.m22
            || self.m21 != &self.m_n * &self.m_w
        {
            bad.push("product chain m1*m2 = a^n-1, m2 = m21*m22, m21 = mN*mW broken".into());
        }
        if radical(&value, &self.factorization).is_err() {
            bad.push("factorization does not certify a^n - 1".into());
        }
        let exponent_in = |m: &BigUint, p: &BigUint| {
            let mut m = m.clone();
            let mut e = 0;
            while !m.is_zero() && (&m % p).is_zero() {
                m /= p;
                e += 1;
            }
            e
        };
        for (p, _) in &self.factorization {
            let e1 = exponent_in(&self.m1, p);
            let e2 = exponent_in(&self.m2, p);
            if e1 > 1 || (e2 == 1) {
                bad.push(format!("prime {p} breaks the squarefree/powerful shape"));
            }
            let w = odd_or_two_wieferich(self.a, self.n, p);
            if e1 == 1 && w != Some(false) {
                bad.push(format!("prime {p} of m1 is Wieferich to base {}", self.a));
            }
            if exponent_in(&self.m22, p) > 0 && w != Some(true) {
                bad.push(format!(
                    "prime {p} of m22 is not Wieferich to base {}",
                    self.a
                ));
            }
        }
        if !self.m1.gcd(&BigUint::from(self.n)).is_one() {
            bad.push(format!(
                "gcd(m1, n) = {} != 1",
                self.m1.gcd(&BigUint::from(self.n))
            ));
        }
        if !self.m_n_bound_ok() {
            bad.push(format!(
                "mN = {} exceeds n rad(n) = {}",
                self.m_n,
                self.m_n_bound()
            ));
        }
        bad
    }
}

/// Uncached re-derivation of the Wieferich status, for invariant checks.
fn odd_or_two_wieferich(a: u64, n: u64, p: &BigUint) -> Option<bool> {
    if p == &BigUint::from(2u32) {
        let d = if a % 4 == 3 && n.is_multiple_of(2) {
            a + 1
        } else {
            a - 1
        };
        return Some(d.trailing_zeros() >= 2);
    }
    odd_prime_is_wieferich(a, p).ok()
}

/// One term of the average-power sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AvgPowerSample {
    pub n: u64,
    /// `log(a^n - 1) / log(rad(a^n - 1))`
    pub value: f64,
    pub squarefree_n: bool,
    /// Largest identity right-hand side over the primes of `a^n - 1`.
    pub w_local: u32,
    /// `a^n - 1 <= rad(a^n - 1)^(1 + w_local)`, compared exactly.
    pub bound_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AvgPowerReport {
    pub a: u64,
    pub samples: Vec<AvgPowerSample>,
    /// Maximum of `value` over squarefree `n`, `NaN`-free; 0 when there
    /// are no such samples.
    pub max_over_squarefree_n: f64,
    /// Values of `n` whose factorization ran out of budget.
    pub unfactored_n: Vec<u64>,
}

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

fn is_squarefree(n: u64) -> bool {
    factor_u64(n).iter().all(|&(_, e)| e == 1)
}

/// Samples for `n = 2..=n_max`. `n` values whose factorization exceeds the
/// budget are listed in `unfactored_n` instead of failing the report.
pub fn avg_power(a: u64, n_max: u64, budget: &FactorBudget) -> Result<AvgPowerReport> {
    check_args(a, n_max.max(1))?;
    let mut samples = Vec::new();
    let mut unfactored_n = Vec::new();
    for n in 2..=n_max {
        let split = match factor_split(a, n, budget) {
            Ok(s) => s,
            Err(Error::Budget { .. }) => {
                unfactored_n.push(n);
                continue;
            }
            Err(e) => return Err(e),
        };
        let value_big = split.value();
        let rad = radical(&value_big, &split.factorization)?;
        let w_local = split
            .factorization
            .iter()
            .map(|(p, e)| *e - p.to_u64().map_or(0, |p| vp_n(n, p)))
            .max()
            .unwrap_or(0);
        let value = if rad.is_one() {
            1.0
        } else {
            ln_big(&value_big) / ln_big(&rad)
        };
        samples.push(AvgPowerSample {
            n,
            value,
            squarefree_n: is_squarefree(n),
            w_local,
            bound_ok: value_big <= rad.pow(1 + w_local),
        });
    }
    let max_over_squarefree_n = samples
        .iter()
        .filter(|s| s.squarefree_n)
        .map(|s| s.value)
        .fold(0.0, f64::max);
    Ok(AvgPowerReport {
        a,
        samples,
        max_over_squarefree_n,
        unfactored_n,
    })
}

fn vp_n(n: u64, p: u64) -> u32 {
    let mut n = n;
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn facs(f: &[(u64, u32)]) -> Factorization {
        f.iter().map(|&(p, e)| (big(p), e)).collect()
    }

    #[test]
    fn radical_examples() {
        assert_eq!(radical(&big(63), &facs(&[(3, 2), (7, 1)])), Ok(big(21)));
        assert_eq!(radical(&big(1), &[]), Ok(big(1)));
        assert_eq!(radical(&big(216), &facs(&[(2, 3), (3, 3)])), Ok(big(6)));
        assert!(matches!(
            radical(&big(63), &facs(&[(3, 1), (7, 1)])),
            Err(Error::Certification(_))
        ));
        assert!(matches!(
            radical(&big(63), &facs(&[(9, 1), (7, 1)])),
            Err(Error::Certification(_))
        ));
    }

    #[test]
    fn cyclotomic_pieces() {
        assert_eq!(cyclotomic_value(2, 1), big(1));
        assert_eq!(cyclotomic_value(2, 6), big(3));
        assert_eq!(cyclotomic_value(10, 3), big(111));
        assert_eq!(cyclotomic_value(3, 4), big(10));
    }

    #[test]
    fn split_examples() {
        let b = FactorBudget::default();
        let s = factor_split(2, 6, &b).unwrap();
        assert_eq!(
            (
                s.m1.clone(),
                s.m2.clone(),
                s.m21.clone(),
                s.m22.clone(),
                s.m_n.clone(),
                s.m_w.clone()
            ),
            (big(7), big(9), big(9), big(1), big(9), big(1))
        );
        let s = factor_split(2, 1, &b).unwrap();
        assert_eq!((s.m1.clone(), s.m2.clone()), (big(1), big(1)));
        // 3^2 - 1 = 8: 2 | n and v2(3 + 1) = 2, so 2 goes to mW
        let s = factor_split(3, 2, &b).unwrap();
        assert_eq!((s.m_w.clone(), s.m_n.clone()), (big(8), big(1)));
    }

    #[test]
    fn split_of_two_to_364() {
        let b = FactorBudget {
            rho_iterations: 100_000,
            ..FactorBudget::default()
        };
        let partial = partial_factor_split(2, 364, &b).unwrap();
        let w = partial
            .classified
            .iter()
            .find(|c| c.p == big(1093))
            .expect("1093 found by trial division");
        assert_eq!(
            (w.exponent, w.divides_n, w.wieferich, w.part),
            (2, false, true, Part::M22)
        );
    }

    #[test]
    fn avg_power_examples() {
        let r = avg_power(2, 6, &FactorBudget::default()).unwrap();
        let at = |n: u64| r.samples.iter().find(|s| s.n == n).unwrap().value;
        assert_eq!(at(2), 1.0);
        assert!((at(6) - 63f64.ln() / 21f64.ln()).abs() < 1e-12);
        let r = avg_power(3, 2, &FactorBudget::default()).unwrap();
        assert!((r.samples[0].value - 3.0).abs() < 1e-12);
        assert!(r.samples.iter().all(|s| s.value >= 1.0 && s.bound_ok));
    }

    #[test]
    fn radical_is_multiplicative_on_coprime_inputs() {
        for x in 1..200u64 {
            for y in 1..60u64 {
                if x.gcd(&y) != 1 {
                    continue;
                }
                let r = |v: u64| {
                    let f = facs(&factor_u64(v));
                    radical(&big(v), &f).unwrap()
                };
                assert_eq!(r(x * y), r(x) * r(y));
            }
        }
    }
}
