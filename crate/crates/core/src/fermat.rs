//! Valuations of `a^e - b^e` read off from residues modulo growing powers
//! of `p`, without forming the powers themselves.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::modpow::{modpow_u64, reduce_big, reduce_i64};
use crate::arith::valuation::vp_biguint;
use crate::arith::Prime;

/// A valuation that is either known exactly or only bounded below because
/// the residue vanished at the largest modulus tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WieferichOrder {
    Exact(u32),
    AtLeast(u32),
}

impl WieferichOrder {
    pub fn exact(self) -> Option<u32> {
        match self {
            WieferichOrder::Exact(v) => Some(v),
            WieferichOrder::AtLeast(_) => None,
        }
    }

    /// A lower bound that is always valid.
    pub fn lower_bound(self) -> u32 {
        match self {
            WieferichOrder::Exact(v) | WieferichOrder::AtLeast(v) => v,
        }
    }

    pub fn is_at_least(self, r: u32) -> bool {
        self.lower_bound() >= r
    }
}

impl fmt::Display for WieferichOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WieferichOrder::Exact(v) => write!(f, "{v}"),
            WieferichOrder::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

impl Serialize for WieferichOrder {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            WieferichOrder::Exact(v) => s.serialize_u32(*v),
            WieferichOrder::AtLeast(_) => s.collect_str(self),
        }
    }
}

/// `vp(a^e - b^e)`, exact when below `cap`.
///
/// Works modulo `p^2` first (word arithmetic for `p < 2^32`) and escalates
/// to `p^cap` only when the residue mod `p^2` vanishes.
pub fn pow_diff_valuation(a: i64, b: i64, e: u64, p: Prime, cap: u32) -> WieferichOrder {
    assert!(cap >= 1, "cap must be positive");
    let pv = p.get();
    if cap >= 2 && pv < (1 << 32) {
        let m = pv * pv;
        let x = modpow_u64(reduce_i64(a, m), e, m);
        let y = modpow_u64(reduce_i64(b, m), e, m);
        if x != y {
            let d = x.abs_diff(y);
            return WieferichOrder::Exact(u32::from(d.is_multiple_of(pv)));
        }
        if cap == 2 {
            return WieferichOrder::AtLeast(2);
        }
    }
    let m = BigUint::from(pv).pow(cap);
    let exp = BigUint::from(e);
    let x = pow_mod_big(a, &exp, &m);
    let y = pow_mod_big(b, &exp, &m);
    let d = if x >= y { x - y } else { (&m + x) - y };
    if d.is_zero() {
        WieferichOrder::AtLeast(cap)
    } else {
        WieferichOrder::Exact(vp_biguint(&d, p).expect("nonzero"))
    }
}

fn pow_mod_big(base: i64, exp: &BigUint, m: &BigUint) -> BigUint {
    let b = reduce_big(&BigInt::from(base), m);
    match (m.to_u64(), exp.to_u64(), b.to_u64()) {
        (Some(mu), Some(eu), Some(bu)) => BigUint::from(modpow_u64(bu, eu, mu)),
        _ => b.modpow(exp, m),
    }
}
