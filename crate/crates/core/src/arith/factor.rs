//! Trial division followed by Pollard rho (Brent's cycle finding).
//!
//! Sized for `p - 1` with `p` below `2^64` and for the cyclotomic pieces
//! of `a^n - 1` at desk scale.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::modpow::mulmod;
use super::prime::{is_prime, is_probable_prime_big};
use super::sieve::small_primes;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    /// Trial division runs over primes up to this bound.
    pub trial_limit: u64,
    /// Total rho iterations allowed per number.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_limit: 1_000_000,
            rho_iterations: 10_000_000,
        }
    }
}

/// Prime factorization, ascending by prime.
pub type Factorization = Vec<(BigUint, u32)>;

/// Complete factorization of a word-sized integer. `n = 0` and `n = 1`
/// give an empty list.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut out = BTreeMap::new();
    if n < 2 {
        return Vec::new();
    }
    let mut rest = n;
    for d in [2u64, 3, 5] {
        while rest.is_multiple_of(d) {
            *out.entry(d).or_insert(0) += 1;
            rest /= d;
        }
    }
    // 30-wheel trial division up to min(cbrt-ish bound, 10^6)
    let mut d = 7u64;
    let wheel = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut w = 0;
    while d * d <= rest && d <= 1_000_000 {
        while rest.is_multiple_of(d) {
            *out.entry(d).or_insert(0) += 1;
            rest /= d;
        }
        d += wheel[w];
        w = (w + 1) % 8;
    }
    if rest > 1 {
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if m == 1 {
                continue;
            }
            if is_prime(m) {
                *out.entry(m).or_insert(0) += 1;
                continue;
            }
            let f = rho_u64(m);
            stack.push(f);
            stack.push(m / f);
        }
    }
    out.into_iter().collect()
}

/// A nontrivial factor of an odd composite `n`. Always terminates for
/// composites below `2^64`.
fn rho_u64(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        if let Some(f) = brent_u64(n, c, 2) {
            return f;
        }
        c += 1;
    }
}

fn brent_u64(n: u64, c: u64, x0: u64) -> Option<u64> {
    const BATCH: u64 = 128;
    let f = |x: u64| (mulmod(x, x, n) + c) % n;
    let mut y = x0;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = mulmod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += BATCH;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// Factors an arbitrary-precision integer within `budget`. On failure the
/// error carries the part that could not be split.
pub fn factor_big(n: &BigUint, budget: &FactorBudget) -> Result<Factorization> {
    factor_big_partial(n, budget).into_result()
}

/// Outcome of a budgeted factorization: what was found, plus any composite
/// cofactor left over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFactorization {
    pub found: Factorization,
    pub unfactored: Option<BigUint>,
}

impl PartialFactorization {
    pub fn into_result(self) -> Result<Factorization> {
        match self.unfactored {
            None => Ok(self.found),
            Some(c) => Err(Error::Budget {
                what: "factorization".into(),
                cofactor: c.to_string(),
            }),
        }
    }
}

pub fn factor_big_partial(n: &BigUint, budget: &FactorBudget) -> PartialFactorization {
    let mut found: BTreeMap<BigUint, u32> = BTreeMap::new();
    if let Some(small) = n.to_u64() {
        for (p, e) in factor_u64(small) {
            found.insert(BigUint::from(p), e);
        }
        return PartialFactorization {
            found: found.into_iter().collect(),
            unfactored: None,
        };
    }
    let mut rest = n.clone();
    for &q in trial_primes(budget.trial_limit) {
        if (&rest % q).is_zero() {
            let mut e = 0;
            while (&rest % q).is_zero() {
                rest /= q;
                e += 1;
            }
            found.insert(BigUint::from(q), e);
        }
        if BigUint::from(q) * q > rest {
            break;
        }
    }
    let mut stack = vec![rest];
    let mut left = BigUint::one();
    let mut iterations = budget.rho_iterations;
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(small) = m.to_u64() {
            for (p, e) in factor_u64(small) {
                *found.entry(BigUint::from(p)).or_insert(0) += e;
            }
            continue;
        }
        if is_probable_prime_big(&m) {
            *found.entry(m).or_insert(0) += 1;
            continue;
        }
        if let Some((root, k)) = perfect_power(&m) {
            stack.extend(std::iter::repeat_n(root, k as usize));
            continue;
        }
        match rho_big(&m, &mut iterations) {
            Some(f) => {
                let other = &m / &f;
                stack.push(f);
                stack.push(other);
            }
            None => left *= m,
        }
    }
    PartialFactorization {
        found: found.into_iter().collect(),
        unfactored: (!left.is_one()).then_some(left),
    }
}

/// `m = root^k` with `k` prime, if such a decomposition exists.
fn perfect_power(m: &BigUint) -> Option<(BigUint, u32)> {
    let bits = m.bits() as u32;
    for k in small_primes(bits as u64) {
        let k = k as u32;
        let root = m.nth_root(k);
        if &root.pow(k) == m {
            return Some((root, k));
        }
    }
    None
}

fn trial_primes(limit: u64) -> &'static [u64] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    let all = TABLE.get_or_init(|| small_primes(FactorBudget::default().trial_limit));
    let end = all.partition_point(|&p| p <= limit);
    &all[..end]
}

fn rho_big(n: &BigUint, iterations: &mut u64) -> Option<BigUint> {
    for c in 1u32..=16 {
        if *iterations == 0 {
            return None;
        }
        if let Some(f) = brent_big(n, &BigUint::from(c), iterations) {
            return Some(f);
        }
    }
    None
}

fn brent_big(n: &BigUint, c: &BigUint, iterations: &mut u64) -> Option<BigUint> {
    const BATCH: u64 = 64;
    let f = |x: &BigUint| (x * x + c) % n;
    let mut y = BigUint::from(2u32);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut r = 1u64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = BATCH.min(r - k);
            if *iterations < steps {
                *iterations = 0;
                return None;
            }
            *iterations -= steps;
            for _ in 0..steps {
                y = f(&y);
                let d = if x > y { &x - &y } else { &y - &x };
                q = (q * d) % n;
            }
            g = q.gcd(n);
            k += BATCH;
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let d = if x > ys { &x - &ys } else { &ys - &x };
            g = d.gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// Multiplies a factorization back out.
pub fn expand(factors: &[(BigUint, u32)]) -> BigUint {
    factors
        .iter()
        .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
}
