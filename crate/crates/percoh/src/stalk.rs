//! Derived fiber ranks of a bounded complex at a declared point.
//!
//! The fiber of a termwise-free complex at a point with residue field
//! `kappa` has cohomology ranks `g_k - r_k - r_{k-1}`, where `g_k` counts
//! generators in degree `k` and `r_k` is the rank of the degree-`k`
//! differential over `kappa`. For a general complex the ranks are read off
//! a free approximation, and are certified in degrees strictly above the
//! approximation depth.

use crate::approx::free_approx;
use crate::complex::Complex;
use crate::error::Result;
use crate::module::matrix_rank_mod_prime;
use crate::poly::Vect;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Fiber cohomology ranks of a termwise-free complex in `lo..=hi`.
fn fiber_ranks_free(
    c: &Arc<Complex>,
    point: &[Vect],
    lo: i64,
    hi: i64,
) -> Result<BTreeMap<i64, usize>> {
    debug_assert!(c.is_termwise_free());
    let ring = &c.ring;
    let mut rank_of_diff: BTreeMap<i64, usize> = BTreeMap::new();
    let rk = |k: i64| -> Result<usize> {
        let d = c.diff_at(k);
        if d.is_zero() {
            return Ok(0);
        }
        Ok(matrix_rank_mod_prime(ring, point, &d)?)
    };
    let mut out = BTreeMap::new();
    for k in lo..=hi {
        let g = c.gens_at(k);
        if g == 0 {
            out.insert(k, 0);
            continue;
        }
        let r_here = match rank_of_diff.get(&k) {
            Some(&r) => r,
            None => {
                let r = rk(k)?;
                rank_of_diff.insert(k, r);
                r
            }
        };
        let r_prev = match rank_of_diff.get(&(k - 1)) {
            Some(&r) => r,
            None => {
                let r = rk(k - 1)?;
                rank_of_diff.insert(k - 1, r);
                r
            }
        };
        out.insert(k, g - r_here - r_prev);
    }
    Ok(out)
}

/// Fiber cohomology ranks of `f` at `point` for degrees `lo..=hi`.
///
/// The approximation is taken two degrees below the window, so every
/// reported rank is certified.
pub fn stalk_ranks(
    f: &Arc<Complex>,
    point: &[Vect],
    lo: i64,
    hi: i64,
) -> Result<Vec<(i64, usize)>> {
    if lo > hi {
        return Ok(Vec::new());
    }
    let Some((_, top)) = f.term_bounds() else {
        return Ok((lo..=hi).map(|k| (k, 0)).collect());
    };
    let depth = (lo - 2).min(top);
    let fa = free_approx(f, depth)?;
    let ranks = fiber_ranks_free(&fa.complex, point, lo, hi)?;
    Ok(ranks.into_iter().collect())
}

/// Whether the fiber of `f` at `point` lies in degrees `<= n`.
pub fn stalk_in_le(f: &Arc<Complex>, point: &[Vect], n: i64) -> Result<bool> {
    let Some((_, top)) = f.term_bounds() else {
        return Ok(true);
    };
    if n >= top {
        return Ok(true);
    }
    let depth = (n - 1).min(top);
    let fa = free_approx(f, depth)?;
    let ranks = fiber_ranks_free(&fa.complex, point, n + 1, top)?;
    Ok(ranks.values().all(|&r| r == 0))
}
