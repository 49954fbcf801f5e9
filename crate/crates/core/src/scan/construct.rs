use num_integer::Integer;

use crate::error::{Error, Result};
use crate::identity::BasePair;

/// The pair `(3^k - t, 3^k + t)`. Since `(3^k + t)^2 - (3^k - t)^2 = 4t * 3^k`,
/// the prime 3 is Wieferich to it of order `k` when `3 ∤ t`.
pub fn construct_base(k: u32, t: u64) -> Result<BasePair> {
    let fail = |msg: String| Err(Error::Construction(msg));
    if k == 0 {
        return fail("k must be positive".into());
    }
    let Some(pow) = 3i64.checked_pow(k) else {
        return fail(format!("3^{k} does not fit in 64 bits"));
    };
    if t.is_multiple_of(3) {
        return fail(format!("3 divides t = {t}"));
    }
    if t % 2 == 1 {
        return fail(format!("t = {t} must be even"));
    }
    let t = match i64::try_from(t) {
        Ok(t) if t < pow => t,
        _ => return fail(format!("t = {t} must be below 3^{k}")),
    };
    let Some(hi) = pow.checked_add(t) else {
        return fail(format!("3^{k} + {t} does not fit in 64 bits"));
    };
    let lo = pow - t;
    if lo.gcd(&hi) != 1 {
        return fail(format!("{lo} and {hi} are not coprime"));
    }
    BasePair::new(lo, hi)
}
