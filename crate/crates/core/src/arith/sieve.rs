//! Segmented sieve of Eratosthenes over odd numbers.

use super::prime::Prime;
use crate::error::{Error, Result};

/// Numbers covered by one segment, before halving for odd-only storage.
pub const DEFAULT_SEGMENT_SPAN: u64 = 1 << 20;

/// All primes `<= limit`, by a plain sieve.
pub fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

/// Odd base primes sufficient to sieve anything below `hi`.
pub(crate) fn base_primes_for(hi: u64) -> Vec<u64> {
    small_primes(isqrt(hi.saturating_sub(1)))
}

/// Primes in `[lo, hi)` given odd base primes covering `sqrt(hi - 1)`.
/// `base` may contain 2; it is skipped.
pub fn sieve_block(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    if hi <= lo || hi <= 2 {
        return out;
    }
    let lo = lo.max(2);
    if lo <= 2 {
        out.push(2);
    }
    // odd numbers lo_odd, lo_odd + 2, ... < hi
    let lo_odd = (lo | 1).max(3);
    if lo_odd >= hi {
        return out;
    }
    let len = (hi - lo_odd).div_ceil(2) as usize;
    let mut composite = vec![false; len];
    for &q in base {
        if q == 2 {
            continue;
        }
        if q * q >= hi {
            break;
        }
        let mut start = (q * q).max(lo_odd.div_ceil(q) * q);
        if start % 2 == 0 {
            start += q;
        }
        let mut idx = ((start - lo_odd) / 2) as usize;
        while idx < len {
            composite[idx] = true;
            idx += q as usize;
        }
    }
    out.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| lo_odd + 2 * i as u64),
    );
    out
}

/// Ordered stream of the primes in `[lo, hi)`, one segment in memory at a
/// time.
#[derive(Debug, Clone)]
pub struct PrimeRange {
    next_lo: u64,
    hi: u64,
    span: u64,
    base: Vec<u64>,
    buf: std::vec::IntoIter<u64>,
}

impl Iterator for PrimeRange {
    type Item = Prime;

    fn next(&mut self) -> Option<Prime> {
        loop {
            if let Some(p) = self.buf.next() {
                return Some(Prime::new_unchecked(p));
            }
            if self.next_lo >= self.hi {
                return None;
            }
            let seg_hi = self.next_lo.saturating_add(self.span).min(self.hi);
            self.buf = sieve_block(self.next_lo, seg_hi, &self.base).into_iter();
            self.next_lo = seg_hi;
        }
    }
}

pub fn primes_in(lo: u64, hi: u64) -> Result<PrimeRange> {
    primes_in_with_span(lo, hi, DEFAULT_SEGMENT_SPAN)
}

/// As [`primes_in`], with an explicit segment span (memory budget).
pub fn primes_in_with_span(lo: u64, hi: u64, span: u64) -> Result<PrimeRange> {
    if lo < 2 || hi <= lo || span == 0 {
        return Err(Error::InvalidRange { lo, hi });
    }
    Ok(PrimeRange {
        next_lo: lo,
        hi,
        span,
        base: base_primes_for(hi),
        buf: Vec::new().into_iter(),
    })
}
