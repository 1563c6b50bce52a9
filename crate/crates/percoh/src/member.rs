//! Membership tests for the two halves of a perverse t-structure.
//!
//! The lower half is a stalk condition at every declared point; the upper
//! half is the matching costalk condition, which duality converts back into
//! a stalk condition on the dual complex. Both sides first insist that every
//! cohomology support is covered by the declared points — anything else is
//! an honest refusal, not a guess.

use crate::complex::Complex;
use crate::duality::{dualize, DualizingData};
use crate::error::{Error, Result};
use crate::space::{support_coverage, DeclaredSpace, Perversity};
use crate::stalk::stalk_in_le;
use std::sync::Arc;

/// Which half of the t-structure is being tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The aisle of objects with stalk degrees `<= p(x)` everywhere.
    Leq,
    /// The co-aisle of objects with costalk degrees `>= p(x)` everywhere.
    Geq,
}

/// Errors unless the support of every cohomology module of `f` is a union
/// of closures of declared points.
pub fn require_declared_support(f: &Arc<Complex>, space: &DeclaredSpace) -> Result<()> {
    for k in f.coh_support() {
        let ann = f.cohomology(k).annihilator();
        let cov = support_coverage(space, &ann);
        if !cov.covered {
            return Err(Error::UndeclaredGenericPoint(format!(
                "cohomology in degree {k} lives on an undeclared component; \
                 the declared candidates miss the locus where {} stays nonzero",
                cov.witness.unwrap_or_else(|| "1".into())
            )));
        }
    }
    Ok(())
}

/// True when the stalk of `f` at the declared point sits in degrees `<= n`.
pub fn stalk_bound(
    f: &Arc<Complex>,
    space: &DeclaredSpace,
    point: usize,
    n: i64,
) -> Result<bool> {
    stalk_in_le(f, &space.points[point].gens, n)
}

/// True when the costalk of `f` at the declared point sits in degrees
/// `>= n`, computed as a stalk bound on the dual.
pub fn costalk_bound(
    f: &Arc<Complex>,
    space: &DeclaredSpace,
    point: usize,
    n: i64,
    dd: &DualizingData,
) -> Result<bool> {
    let df = dualize(f, dd)?;
    stalk_in_le(&df, &space.points[point].gens, -n - space.points[point].dim)
}

/// Membership of `f` in the chosen half of the t-structure attached to the
/// perversity, with the support guard applied first.
pub fn member(
    f: &Arc<Complex>,
    space: &DeclaredSpace,
    p: &Perversity,
    side: Side,
    dd: &DualizingData,
) -> Result<bool> {
    match side {
        Side::Leq if !p.monotone => {
            return Err(Error::UnsupportedPerversity(format!(
                "{} is not monotone, so its lower class is not defined",
                p.name
            )))
        }
        Side::Geq if !p.comonotone => {
            return Err(Error::UnsupportedPerversity(format!(
                "{} is not comonotone, so its upper class is not defined",
                p.name
            )))
        }
        _ => {}
    }
    require_declared_support(f, space)?;
    match side {
        Side::Leq => {
            for (i, _) in space.points.iter().enumerate() {
                if !stalk_bound(f, space, i, p.value(i))? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Side::Geq => {
            // One dual for all points instead of one per costalk.
            let df = dualize(f, dd)?;
            for (i, pt) in space.points.iter().enumerate() {
                if !stalk_in_le(&df, &pt.gens, -p.value(i) - pt.dim)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}
