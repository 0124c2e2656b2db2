//! Order-fixed reduction of long sums.
//!
//! Terms are grouped into fixed-size blocks by index; each block is folded
//! left-to-right, and the block results are folded in block order.  The
//! grouping never depends on thread count or scheduling, so the parallel and
//! sequential paths produce bit-identical balls — associativity of ball
//! addition only holds up to rounding, and this pins the rounding order down.

use crate::error::Result;

pub(crate) const BLOCK: u128 = 64;

/// Folds `eval_block(start, len)` over `ceil(count / BLOCK)` blocks in block
/// order.  `parallel` selects the rayon path when the `parallel` feature is
/// compiled in; otherwise it is ignored and the fold runs sequentially.
pub(crate) fn block_reduce<T, F, C>(
    count: u128,
    parallel: bool,
    eval_block: F,
    mut fold: C,
    identity: T,
) -> Result<T>
where
    T: Send,
    F: Fn(u128, usize) -> Result<T> + Sync,
    C: FnMut(T, T) -> T,
{
    let nblocks = count.div_ceil(BLOCK);
    #[cfg(feature = "parallel")]
    if parallel && nblocks > 1 {
        use rayon::prelude::*;
        let blocks: Result<Vec<T>> = (0..nblocks as u64)
            .into_par_iter()
            .map(|b| {
                let start = b as u128 * BLOCK;
                let len = (count - start).min(BLOCK) as usize;
                eval_block(start, len)
            })
            .collect();
        return Ok(blocks?.into_iter().fold(identity, fold));
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallel;
    let mut acc = identity;
    let mut start = 0u128;
    while start < count {
        let len = (count - start).min(BLOCK) as usize;
        acc = fold(acc, eval_block(start, len)?);
        start += BLOCK;
    }
    let _ = nblocks;
    Ok(acc)
}
