use std::collections::BTreeSet;

use num_integer::Integer;
use serde::Serialize;

use super::{map_prime_blocks, ScanOptions, WieferichRecord};
use crate::arith::modpow::{modpow_u64, mulmod};
use crate::arith::sieve::small_primes;
use crate::arith::Prime;
use crate::error::{Error, Result};
use crate::fermat::{pow_diff_valuation, WieferichOrder};
use crate::identity::BasePair;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurveyReport {
    /// `(a_lo, a_hi, b_lo, b_hi)`
    pub base_range: (i64, i64, i64, i64),
    pub prime_limit: u64,
    pub min_order: u32,
    pub pair_count: usize,
    /// Sorted by prime, then pair.
    pub records: Vec<WieferichRecord>,
    pub distinct_pairs_hit: usize,
    /// Largest prime carrying a record, 0 when there are none.
    pub max_prime_seen: u64,
}

impl SurveyReport {
    /// Distinct pairs with a record whose order is at least `r`.
    pub fn pairs_with_order_at_least(&self, r: u32) -> BTreeSet<BasePair> {
        self.records
            .iter()
            .filter(|rec| rec.order.is_at_least(r))
            .map(|rec| rec.pair)
            .collect()
    }

    /// Distinct pairs whose highest record order is exactly `r`.
    pub fn pairs_with_max_order(&self, r: u32) -> BTreeSet<BasePair> {
        let at_least = self.pairs_with_order_at_least(r);
        let above = self.pairs_with_order_at_least(r + 1);
        at_least.difference(&above).copied().collect()
    }
}

/// Coprime pairs `1 <= a < b <= a_max`, ordered by `b` then `a`.
pub fn coprime_pairs(a_max: i64) -> Vec<BasePair> {
    (2..=a_max)
        .flat_map(|b| (1..b).map(move |a| (a, b)))
        .filter(|(a, b)| a.gcd(b) == 1)
        .map(|(a, b)| BasePair::new(a, b).expect("coprime and distinct"))
        .collect()
}

/// Largest `j <= cap` with `p^j` below `2^64`.
fn table_exponent(p: u64, cap: u32) -> (u32, u64) {
    let mut j = 1;
    let mut m = p;
    while j < cap {
        match m.checked_mul(p) {
            Some(next) => {
                m = next;
                j += 1;
            }
            None => break,
        }
    }
    (j, m)
}

/// `c^(p-1) mod m` for `c = 0..=a_max`, from modpows at the primes only;
/// the map is completely multiplicative. Entries with `p | c` are unused.
fn power_table(p: u64, m: u64, a_max: u64, spf: &[u64]) -> Vec<u64> {
    let mut t = vec![0u64; a_max as usize + 1];
    if a_max >= 1 {
        t[1] = 1 % m;
    }
    for c in 2..=a_max as usize {
        let q = spf[c];
        t[c] = if q as usize == c {
            modpow_u64(c as u64 % m, p - 1, m)
        } else {
            mulmod(t[q as usize], t[c / q as usize], m)
        };
    }
    t
}

fn smallest_prime_factors(n: u64) -> Vec<u64> {
    let mut spf: Vec<u64> = (0..=n).collect();
    for q in small_primes(n) {
        let mut k = q * q;
        while k <= n {
            if spf[k as usize] == k {
                spf[k as usize] = q;
            }
            k += q;
        }
    }
    spf
}

/// Every coprime pair `1 <= a < b <= a_max` against every odd prime
/// `p <= prime_limit` with `p ∤ ab`, keeping orders `>= min_order`.
///
/// Primes are the outer loop. For each prime the table
/// `c^(p-1) mod p^j` (`j` the largest power up to `cap` fitting a word) is
/// built once, and each pair costs one subtraction. A pair whose residues
/// agree mod `p^j` with `j < cap` is re-evaluated at `p^cap`.
pub fn survey(
    a_max: i64,
    prime_limit: u64,
    min_order: u32,
    cap: u32,
    opts: &ScanOptions,
) -> Result<SurveyReport> {
    if a_max < 2 {
        return Err(Error::InvalidInput(format!(
            "a_max must be at least 2, got {a_max}"
        )));
    }
    if !(3..1 << 32).contains(&prime_limit) {
        return Err(Error::InvalidInput(format!(
            "prime limit must be in [3, 2^32), got {prime_limit}"
        )));
    }
    if min_order < 2 {
        return Err(Error::InvalidInput(format!(
            "min order must be at least 2, got {min_order}"
        )));
    }
    if cap < min_order {
        return Err(Error::InvalidInput(format!(
            "cap {cap} is below min order {min_order}"
        )));
    }
    let pairs = coprime_pairs(a_max);
    let spf = smallest_prime_factors(a_max as u64);
    let blocks = map_prime_blocks(3, prime_limit + 1, opts, |primes| {
        let mut out = Vec::new();
        for &pv in primes.iter().filter(|&&q| q > 2) {
            let p = Prime::new_unchecked(pv);
            let (j, m) = table_exponent(pv, cap);
            let table = power_table(pv, m, a_max as u64, &spf);
            for &pair in &pairs {
                let (a, b) = (pair.a() as u64, pair.b() as u64);
                if a % pv == 0 || b % pv == 0 {
                    continue;
                }
                let (x, y) = (table[a as usize], table[b as usize]);
                let order = if x != y {
                    let mut d = x.abs_diff(y);
                    let mut v = 0;
                    while d % pv == 0 {
                        d /= pv;
                        v += 1;
                    }
                    WieferichOrder::Exact(v)
                } else if j < cap {
                    pow_diff_valuation(pair.a(), pair.b(), pv - 1, p, cap)
                } else {
                    WieferichOrder::AtLeast(cap)
                };
                if order.is_at_least(min_order) {
                    out.push(WieferichRecord { p, pair, order });
                }
            }
        }
        out
    })?;
    let mut records: Vec<WieferichRecord> = blocks.into_iter().flatten().collect();
    records.sort_by_key(|r| (r.p, r.pair));
    let distinct: BTreeSet<BasePair> = records.iter().map(|r| r.pair).collect();
    Ok(SurveyReport {
        base_range: (1, a_max - 1, 2, a_max),
        prime_limit,
        min_order,
        pair_count: pairs.len(),
        max_prime_seen: records.iter().map(|r| r.p.get()).max().unwrap_or(0),
        distinct_pairs_hit: distinct.len(),
        records,
    })
}
