//! Seeded random comparison of the identity against the big-integer
//! oracle.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::sieve::small_primes;
use crate::arith::Prime;
use crate::error::{Error, Result};
use crate::identity::{direct_valuation, predicted_valuation, BasePair, Sign, DEFAULT_BIT_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FuzzConfig {
    pub cases: usize,
    pub seed: u64,
    /// Bound on `|b|`; `|a| < |b|`.
    pub max_base: i64,
    pub max_n: u64,
    pub max_prime: u64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            cases: 10_000,
            seed: 0,
            max_base: 50,
            max_n: 60,
            max_prime: 97,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzCase {
    pub a: i64,
    pub b: i64,
    pub n: u64,
    pub p: u64,
    pub sign: Sign,
    pub predicted: Option<u32>,
    pub direct: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub config: FuzzConfig,
    pub cases: usize,
    pub cases_at_two: usize,
    pub draws: u64,
    pub mismatches: Vec<FuzzCase>,
}

/// Draws tuples until `config.cases` of them satisfy the identity's
/// preconditions, then compares both sides on each.
pub fn fuzz_identity(config: &FuzzConfig) -> Result<FuzzReport> {
    if config.max_base < 2 || config.max_n == 0 || config.max_prime < 2 {
        return Err(Error::InvalidInput("fuzz bounds too small".into()));
    }
    let primes = small_primes(config.max_prime);
    let odd: Vec<u64> = primes.iter().copied().filter(|&p| p > 2).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut report = FuzzReport {
        config: *config,
        cases: 0,
        cases_at_two: 0,
        draws: 0,
        mismatches: Vec::new(),
    };
    while report.cases < config.cases {
        report.draws += 1;
        let b = rng.gen_range(2..=config.max_base);
        let a = rng.gen_range(1..b);
        let a = if rng.gen_bool(0.5) { a } else { -a };
        let b = if rng.gen_bool(0.5) { b } else { -b };
        let Ok(pair) = BasePair::new(a, b) else {
            continue;
        };
        let n = rng.gen_range(1..=config.max_n);
        let p = if odd.is_empty() || rng.gen_bool(0.25) {
            2
        } else {
            *odd.choose(&mut rng).expect("non-empty")
        };
        let p = Prime::new(p)?;
        let sign = if rng.gen_bool(0.5) {
            Sign::Minus
        } else {
            Sign::Plus
        };
        let predicted = match predicted_valuation(pair, n, p, sign) {
            Ok(v) => Some(v),
            Err(
                Error::BaseDivisible { .. } | Error::NotDivisible { .. } | Error::OutOfScope(_),
            ) => continue,
            Err(_) => None,
        };
        let direct = direct_valuation(pair, n, p, sign, DEFAULT_BIT_BUDGET).ok();
        report.cases += 1;
        if p.is_two() {
            report.cases_at_two += 1;
        }
        if predicted.is_none() || predicted != direct {
            report.mismatches.push(FuzzCase {
                a,
                b,
                n,
                p: p.get(),
                sign,
                predicted,
                direct,
            });
        }
    }
    Ok(report)
}
