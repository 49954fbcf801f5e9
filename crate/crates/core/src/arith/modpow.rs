use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` for word-sized moduli. Returns 0 when `m == 1`.
pub fn modpow_u64(base: u64, mut exp: u64, m: u64) -> u64 {
    assert!(m != 0, "modulus must be nonzero");
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mulmod(result, b, m);
        }
        exp >>= 1;
        if exp > 0 {
            b = mulmod(b, b, m);
        }
    }
    result
}

/// Reduces a signed integer into `[0, m)`.
pub fn reduce_i64(x: i64, m: u64) -> u64 {
    (x as i128).rem_euclid(m as i128) as u64
}

pub fn reduce_big(x: &BigInt, m: &BigUint) -> BigUint {
    let r = x.magnitude() % m;
    if x.sign() == Sign::Minus && !r.is_zero() {
        m - r
    } else {
        r
    }
}

/// `base^exponent mod modulus` with a word-sized fast path.
///
/// The result does not depend on which path is taken.
pub fn modpow(base: &BigInt, exponent: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if *modulus < BigUint::from(2u32) {
        return Err(Error::InvalidInput(format!(
            "modulus must be at least 2, got {modulus}"
        )));
    }
    let b = reduce_big(base, modulus);
    if let (Some(m), Some(e)) = (modulus.to_u64(), exponent.to_u64()) {
        let b = b.to_u64().expect("reduced below a u64 modulus");
        return Ok(BigUint::from(modpow_u64(b, e, m)));
    }
    Ok(b.modpow(exponent, modulus))
}

/// Modular inverse for a word-sized modulus, if it exists.
pub fn inverse_u64(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// `base^exp mod m` where `m` may be up to 128 bits; used on the escalation
/// path for small primes raised to moderate powers.
pub fn modpow_u128(base: u128, exp: u64, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return modpow_u64((base % m) as u64, exp, m as u64) as u128;
    }
    let m_big = BigUint::from(m);
    BigUint::from(base % m)
        .modpow(&BigUint::from(exp), &m_big)
        .to_u128()
        .expect("reduced below a u128 modulus")
}
