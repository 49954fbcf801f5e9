use serde::Serialize;

use super::{map_prime_blocks, ScanOptions};
use crate::arith::Prime;
use crate::error::{Error, Result};
use crate::fermat::{pow_diff_valuation, WieferichOrder};

/// Largest Wieferich order of the base `a` over the odd primes up to a
/// limit: a truncated observation of `sup_p vp(a^(p-1) - 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumReport {
    pub a: i64,
    pub prime_limit: u64,
    pub w_observed: WieferichOrder,
    pub argmax_primes: Vec<Prime>,
}

pub fn wa_spectrum(
    a: i64,
    prime_limit: u64,
    cap: u32,
    opts: &ScanOptions,
) -> Result<SpectrumReport> {
    if a < 2 {
        return Err(Error::InvalidInput(format!(
            "base must be at least 2, got {a}"
        )));
    }
    if prime_limit < 3 {
        return Err(Error::InvalidInput(format!(
            "prime limit must be at least 3, got {prime_limit}"
        )));
    }
    if cap < 2 {
        return Err(Error::InvalidInput(format!(
            "cap must be at least 2, got {cap}"
        )));
    }
    let blocks = map_prime_blocks(3, prime_limit + 1, opts, |primes| {
        let mut best: Option<(u32, Vec<Prime>)> = None;
        for &pv in primes.iter().filter(|&&q| q > 2 && a % q as i64 != 0) {
            let p = Prime::new_unchecked(pv);
            let order = pow_diff_valuation(a, 1, pv - 1, p, cap).lower_bound();
            match &mut best {
                Some((w, ps)) if *w == order => ps.push(p),
                Some((w, _)) if *w > order => {}
                _ => best = Some((order, vec![p])),
            }
        }
        best
    })?;
    let mut w = 0;
    let mut argmax = Vec::new();
    for (order, ps) in blocks.into_iter().flatten() {
        if order > w {
            w = order;
            argmax = ps;
        } else if order == w {
            argmax.extend(ps);
        }
    }
    let w_observed = if w >= cap {
        WieferichOrder::AtLeast(cap)
    } else {
        WieferichOrder::Exact(w)
    };
    Ok(SpectrumReport {
        a,
        prime_limit,
        w_observed,
        argmax_primes: argmax,
    })
}
