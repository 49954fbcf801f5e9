//! Wieferich primes to base pairs: single-pair scans, the base-grid survey,
//! the order spectrum of a single base, and bases built to make 3 a
//! high-order Wieferich prime.
//!
//! Only odd primes are scanned. At `p = 2` the exponent `p - 1` is 1 and
//! the "order" would just be `v2(b - a)`.

mod checkpoint;
mod construct;
mod spectrum;
mod survey;

use std::path::PathBuf;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::sieve::{base_primes_for, sieve_block};
use crate::arith::Prime;
use crate::error::{Error, Result};
use crate::fermat::{pow_diff_valuation, WieferichOrder};
use crate::identity::BasePair;

pub use checkpoint::Checkpoint;
pub use construct::construct_base;
pub use spectrum::{wa_spectrum, SpectrumReport};
pub use survey::{coprime_pairs, survey, SurveyReport};

/// Order cap used when none is given.
pub const DEFAULT_CAP: u32 = 8;

/// Scans at least this long write checkpoints when a path is configured.
pub const CHECKPOINT_MIN_RANGE: u64 = 10_000_000;

/// A prime that is Wieferich (order at least 2) to a base pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WieferichRecord {
    pub p: Prime,
    pub pair: BasePair,
    pub order: WieferichOrder,
}

impl Serialize for WieferichRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("WieferichRecord", 4)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("a", &self.pair.a())?;
        st.serialize_field("b", &self.pair.b())?;
        st.serialize_field("order", &self.order)?;
        st.end()
    }
}

/// How a scan is split up and whether it leaves a checkpoint behind.
/// Block boundaries are fixed by `block_span`, not by `workers`, so the
/// output never depends on the worker count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOptions {
    pub workers: usize,
    pub block_span: u64,
    pub checkpoint: Option<PathBuf>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            workers: 1,
            block_span: 1 << 20,
            checkpoint: None,
        }
    }
}

impl ScanOptions {
    pub fn with_workers(workers: usize) -> Self {
        ScanOptions {
            workers,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidInput("workers must be at least 1".into()));
        }
        if self.block_span < 2 {
            return Err(Error::InvalidInput("block span must be at least 2".into()));
        }
        Ok(())
    }
}

/// `vp(a^(p-1) - b^(p-1))`, exact below `cap`.
pub fn wieferich_order(p: Prime, pair: BasePair, cap: u32) -> Result<WieferichOrder> {
    if cap < 2 {
        return Err(Error::InvalidInput(format!(
            "cap must be at least 2, got {cap}"
        )));
    }
    if pair.divisible_by(p) {
        return Err(Error::BaseDivisible {
            p: p.get(),
            base: pair.to_string(),
        });
    }
    Ok(pow_diff_valuation(pair.a(), pair.b(), p.get() - 1, p, cap))
}

/// Splits `[lo, hi)` into fixed blocks and maps each block's primes on a
/// pool of `workers` threads. Results come back in block order.
pub(crate) fn map_prime_blocks<T, F>(lo: u64, hi: u64, opts: &ScanOptions, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[u64]) -> T + Sync,
{
    opts.validate()?;
    if hi <= lo {
        return Ok(Vec::new());
    }
    let base = base_primes_for(hi);
    let blocks: Vec<(u64, u64)> = block_bounds(lo, hi, opts.block_span);
    let run = || {
        blocks
            .par_iter()
            .map(|&(l, h)| f(&sieve_block(l, h, &base)))
            .collect()
    };
    Ok(thread_pool(opts.workers)?.install(run))
}

fn block_bounds(lo: u64, hi: u64, span: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut l = lo;
    while l < hi {
        let h = l.saturating_add(span).min(hi);
        out.push((l, h));
        l = h;
    }
    out
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))
}

fn scan_block(pair: BasePair, primes: &[u64], cap: u32) -> Vec<WieferichRecord> {
    primes
        .iter()
        .filter(|&&p| p > 2)
        .map(|&p| Prime::new_unchecked(p))
        .filter(|&p| !pair.divisible_by(p))
        .filter_map(|p| {
            let order = pow_diff_valuation(pair.a(), pair.b(), p.get() - 1, p, cap);
            order
                .is_at_least(2)
                .then_some(WieferichRecord { p, pair, order })
        })
        .collect()
}

/// All odd primes `p <= prime_limit` with `p ∤ ab` and
/// `vp(a^(p-1) - b^(p-1)) >= 2`, ascending by `p`.
pub fn scan_pair(pair: BasePair, prime_limit: u64, cap: u32) -> Result<Vec<WieferichRecord>> {
    scan_pair_with(pair, prime_limit, cap, &ScanOptions::default())
}

/// [`scan_pair`] with explicit partitioning and optional checkpointing.
///
/// With a checkpoint path and a range of at least [`CHECKPOINT_MIN_RANGE`],
/// progress is written after each batch of blocks. An existing checkpoint
/// for the same pair makes the scan resume after its last completed prime;
/// records below that point are not repeated.
pub fn scan_pair_with(
    pair: BasePair,
    prime_limit: u64,
    cap: u32,
    opts: &ScanOptions,
) -> Result<Vec<WieferichRecord>> {
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
    let hi = prime_limit + 1;
    let checkpointing = opts
        .checkpoint
        .as_ref()
        .filter(|_| prime_limit >= CHECKPOINT_MIN_RANGE);
    let Some(path) = checkpointing else {
        let blocks = map_prime_blocks(3, hi, opts, |ps| scan_block(pair, ps, cap))?;
        return Ok(blocks.into_iter().flatten().collect());
    };

    let mut lo = 3;
    if let Some(cp) = Checkpoint::load(path)? {
        cp.validate_for(pair)?;
        lo = lo.max(cp.last_prime_done + 1);
    }
    let batch_span = opts.block_span.saturating_mul(4 * opts.workers as u64);
    let mut records = Vec::new();
    while lo < hi {
        let batch_hi = lo.saturating_add(batch_span).min(hi);
        let blocks = map_prime_blocks(lo, batch_hi, opts, |ps| scan_block(pair, ps, cap))?;
        records.extend(blocks.into_iter().flatten());
        Checkpoint {
            a: pair.a(),
            b: pair.b(),
            last_prime_done: batch_hi - 1,
            cap,
        }
        .store(path)?;
        lo = batch_hi;
    }
    Ok(records)
}
