use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;

use super::prime::Prime;
use crate::error::{Error, Result};

/// Exponent of the largest power of `p` dividing `x`. The sign of `x` is
/// ignored.
pub fn vp(x: &BigInt, p: Prime) -> Result<u32> {
    vp_biguint(x.magnitude(), p)
}

pub fn vp_biguint(x: &BigUint, p: Prime) -> Result<u32> {
    if x.is_zero() {
        return Err(Error::UndefinedValuation);
    }
    if p.is_two() {
        return Ok(x.trailing_zeros().expect("nonzero") as u32);
    }
    let pb = BigUint::from(p.get());
    if !(x % &pb).is_zero() {
        return Ok(0);
    }
    // Strip p^(2^j) for growing j, then walk back down. Keeps the number of
    // big divisions logarithmic in the answer.
    let mut rest = x.clone();
    let mut e = 0u32;
    let mut powers = vec![pb];
    loop {
        let top = powers.last().expect("non-empty");
        let (q, r) = rest.div_rem(top);
        if !r.is_zero() {
            break;
        }
        rest = q;
        e += 1 << (powers.len() - 1);
        let sq = top * top;
        if sq > rest {
            break;
        }
        powers.push(sq);
    }
    for (j, pw) in powers.iter().enumerate().rev() {
        let (q, r) = rest.div_rem(pw);
        if r.is_zero() {
            rest = q;
            e += 1 << j;
        }
    }
    Ok(e)
}

pub fn vp_u64(x: u64, p: Prime) -> Result<u32> {
    vp_u128(x as u128, p)
}

pub fn vp_i64(x: i64, p: Prime) -> Result<u32> {
    vp_u128(x.unsigned_abs() as u128, p)
}

pub fn vp_u128(mut x: u128, p: Prime) -> Result<u32> {
    if x == 0 {
        return Err(Error::UndefinedValuation);
    }
    let p = p.get() as u128;
    let mut e = 0;
    while x.is_multiple_of(p) {
        x /= p;
        e += 1;
    }
    Ok(e)
}

/// `vp(num) - vp(den)`, the extension of the valuation to fractions.
pub fn vp_rational(num: &BigInt, den: &BigInt, p: Prime) -> Result<i64> {
    Ok(vp(num, p)? as i64 - vp(den, p)? as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(vp(&BigInt::from(9), p(3)), Ok(2));
        assert_eq!(vp(&BigInt::from(1), p(7)), Ok(0));
        assert_eq!(vp(&BigInt::from(-48), p(2)), Ok(4));
        let m = (BigInt::one() << 364u32) - 1;
        assert_eq!(vp(&m, p(1093)), Ok(2));
    }

    #[test]
    fn zero_is_rejected() {
        assert_eq!(vp(&BigInt::zero(), p(3)), Err(Error::UndefinedValuation));
        assert_eq!(vp_u64(0, p(3)), Err(Error::UndefinedValuation));
        assert_eq!(
            vp_rational(&BigInt::from(3), &BigInt::zero(), p(3)),
            Err(Error::UndefinedValuation)
        );
    }

    #[test]
    fn rational() {
        let r = |a: i64, b: i64, q: u64| vp_rational(&BigInt::from(a), &BigInt::from(b), p(q));
        assert_eq!(r(9, 3, 3), Ok(1));
        assert_eq!(r(1, 27, 3), Ok(-3));
        assert_eq!(r(50, 4, 5), Ok(2));
    }

    #[test]
    fn high_powers() {
        for e in [0u32, 1, 2, 3, 7, 8, 15, 16, 17, 100, 255, 1000] {
            let x = BigInt::from(3u32).pow(e) * 10;
            assert_eq!(vp(&x, p(3)), Ok(e));
        }
    }

    proptest! {
        #[test]
        fn additive_on_products(x in 1i64..1_000_000_000, y in 1i64..1_000_000_000, i in 0usize..6) {
            let q = p([2, 3, 5, 7, 11, 1093][i]);
            let xy = BigInt::from(x) * BigInt::from(y);
            prop_assert_eq!(vp(&xy, q)?, vp_i64(x, q)? + vp_i64(y, q)?);
        }

        #[test]
        fn exact_power_divides(x in prop::num::i64::ANY.prop_filter("nonzero", |v| *v != 0), i in 0usize..4) {
            let q = p([2, 3, 5, 7][i]);
            let e = vp_i64(x, q)?;
            let pe = (q.get() as i128).pow(e);
            prop_assert_eq!((x as i128) % pe, 0);
            prop_assert_ne!((x as i128) % (pe * q.get() as i128), 0);
        }
    }
}
