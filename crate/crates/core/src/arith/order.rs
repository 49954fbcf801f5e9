use serde::Serialize;

use super::factor::factor_u64;
use super::modpow::{modpow_u64, reduce_i64};
use super::prime::Prime;
use crate::error::{Error, Result};

/// Multiplicative order of `base` modulo `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderResult {
    pub base: i64,
    pub p: Prime,
    pub d: u64,
}

pub fn multiplicative_order(a: i64, p: Prime) -> Result<OrderResult> {
    let r = reduce_i64(a, p.get());
    if r == 0 {
        return Err(Error::BaseDivisible {
            p: p.get(),
            base: a.to_string(),
        });
    }
    Ok(OrderResult {
        base: a,
        p,
        d: order_of_residue(r, p),
    })
}

/// Order of a nonzero residue `r < p`: start from `p - 1` and strip each
/// prime factor while the power stays 1.
pub(crate) fn order_of_residue(r: u64, p: Prime) -> u64 {
    let p = p.get();
    debug_assert!(r != 0 && r < p);
    let mut d = p - 1;
    for (q, _) in factor_u64(p - 1) {
        while d.is_multiple_of(q) && modpow_u64(r, d / q, p) == 1 {
            d /= q;
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve::small_primes;

    fn ord(a: i64, p: u64) -> u64 {
        multiplicative_order(a, Prime::new(p).unwrap()).unwrap().d
    }

    fn brute(a: u64, p: u64) -> u64 {
        let mut x = a % p;
        let mut k = 1;
        while x != 1 {
            x = x * (a % p) % p;
            k += 1;
        }
        k
    }

    #[test]
    fn examples() {
        assert_eq!(ord(2, 3), 2);
        assert_eq!(ord(2, 1093), 364);
        assert_eq!(ord(2, 7), 3);
        assert_eq!(ord(-1, 7), 2);
        assert_eq!(ord(1, 2), 1);
    }

    #[test]
    fn divisible_base() {
        assert!(matches!(
            multiplicative_order(14, Prime::new(7).unwrap()),
            Err(Error::BaseDivisible { .. })
        ));
    }

    #[test]
    fn matches_linear_search_below_500() {
        for p in small_primes(499) {
            for a in 1..p {
                let d = ord(a as i64, p);
                assert_eq!(d, brute(a, p), "a={a} p={p}");
                assert_eq!((p - 1) % d, 0);
            }
        }
    }
}
