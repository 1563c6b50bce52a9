//! Declared topological data: the finite set of generic points the engine is
//! allowed to see, their specialization order, and perversity functions on
//! them.
//!
//! Every support that shows up during a computation must be covered by the
//! declared points; `support_coverage` certifies this and produces a witness
//! polynomial when coverage fails.

use crate::error::{Error, Result};
use crate::ideal::{
    clean_gens, dim_of_ideal, ideal_contains, ideal_eq, ideal_intersection_many,
    point_is_proper, radical_membership, ring_dim,
};
use crate::poly::Vect;
use crate::ring::Ring;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A declared generic point: a named prime of the coordinate ring together
/// with the dimension of its closure.
#[derive(Debug, Clone)]
pub struct TopPoint {
    pub name: String,
    /// Generators of the point's prime ideal (the empty list is the generic
    /// point of the whole space).
    pub gens: Vec<Vect>,
    /// Krull dimension of the closure of the point.
    pub dim: i64,
}

/// The declared space: points in declaration order plus their specialization
/// order.
#[derive(Debug)]
pub struct DeclaredSpace {
    pub ring: Arc<Ring>,
    pub points: Vec<TopPoint>,
    /// `closure[i]` lists the indices of points lying in the closure of
    /// point `i` (excluding `i` itself).
    pub closure: Vec<Vec<usize>>,
    /// Dimension of the whole space.
    pub dim: i64,
}

/// Validates and assembles a declared space from named ideals, keeping the
/// given declaration order.
pub fn build_space(ring: &Arc<Ring>, points: &[(String, Vec<Vect>)]) -> Result<DeclaredSpace> {
    if points.is_empty() {
        return Err(Error::Invalid("a space needs at least one declared point".into()));
    }
    let total = ring_dim(ring);
    let mut out: Vec<TopPoint> = Vec::with_capacity(points.len());
    for (name, raw) in points {
        let gens = clean_gens(ring, raw);
        if !point_is_proper(ring, &gens) {
            return Err(Error::Invalid(format!(
                "point {name} generates the unit ideal and names nothing"
            )));
        }
        for prev in &out {
            if ideal_eq(ring, &prev.gens, &gens) {
                return Err(Error::Invalid(format!(
                    "points {} and {name} declare the same prime",
                    prev.name
                )));
            }
        }
        let dim = dim_of_ideal(ring, &gens);
        out.push(TopPoint { name: name.clone(), gens, dim });
    }
    if !out.iter().any(|p| p.dim == total) {
        return Err(Error::Invalid(format!(
            "no declared point has the full dimension {total} of the space"
        )));
    }
    let closure = out
        .iter()
        .map(|pi| {
            out.iter()
                .enumerate()
                .filter(|(_, pj)| {
                    // `x_j` lies in the closure of `x_i` exactly when the
                    // prime of `x_i` is contained in the prime of `x_j`.
                    !std::ptr::eq(pi, *pj) && ideal_contains(ring, &pj.gens, &pi.gens)
                })
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    Ok(DeclaredSpace { ring: Arc::clone(ring), points: out, closure, dim: total })
}

impl DeclaredSpace {
    pub fn point_named(&self, name: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| Error::Invalid(format!("unknown point name {name}")))
    }
}

/// Result of checking a closed set against the declared points.
#[derive(Debug)]
pub struct Coverage {
    pub covered: bool,
    /// Indices of declared points that are generic points of components of
    /// the closed set (maximal declared points inside it).
    pub minimal_points: Vec<usize>,
    /// When not covered: a polynomial vanishing on every declared candidate
    /// component but not on the whole closed set.
    pub witness: Option<String>,
}

/// Checks that the vanishing set of `j_gens` is the union of the closures of
/// declared points, and names those points.
pub fn support_coverage(space: &DeclaredSpace, j_gens: &[Vect]) -> Coverage {
    let ring = &space.ring;
    let j = clean_gens(ring, j_gens);
    if !point_is_proper(ring, &j) {
        // Empty closed set: covered by the empty family.
        return Coverage { covered: true, minimal_points: Vec::new(), witness: None };
    }
    // Declared points lying inside the closed set.
    let inside: Vec<usize> = (0..space.points.len())
        .filter(|&i| ideal_contains(ring, &space.points[i].gens, &j))
        .collect();
    // Keep the maximal ones: generic points of candidate components.
    let minimal_points: Vec<usize> = inside
        .iter()
        .copied()
        .filter(|&i| {
            inside.iter().all(|&k| k == i || !space.closure[k].contains(&i))
        })
        .collect();
    let ideals: Vec<Vec<Vect>> =
        minimal_points.iter().map(|&i| space.points[i].gens.clone()).collect();
    let meet = ideal_intersection_many(ring, &ideals);
    // Coverage holds exactly when the intersection of the candidate primes
    // is contained in the radical of `j`.
    for g in &meet {
        if !radical_membership(ring, g, &j) {
            return Coverage {
                covered: false,
                minimal_points,
                witness: Some(ring.poly_string(g)),
            };
        }
    }
    Coverage { covered: true, minimal_points, witness: None }
}

/// A perversity function on the declared points, with the shape flags every
/// operation checks before it runs.
#[derive(Debug, Clone)]
pub struct Perversity {
    pub name: String,
    /// Values aligned with the space's declaration order.
    pub values: Vec<i64>,
    pub monotone: bool,
    pub strictly_monotone: bool,
    pub comonotone: bool,
    pub strictly_comonotone: bool,
}

impl Perversity {
    pub fn new(
        space: &DeclaredSpace,
        name: &str,
        assignment: &BTreeMap<String, i64>,
    ) -> Result<Perversity> {
        for key in assignment.keys() {
            space.point_named(key)?;
        }
        let mut values = Vec::with_capacity(space.points.len());
        for p in &space.points {
            match assignment.get(&p.name) {
                Some(&v) => values.push(v),
                None => {
                    return Err(Error::Invalid(format!(
                        "perversity {name} misses a value at point {}",
                        p.name
                    )))
                }
            }
        }
        Ok(Perversity::from_values(space, name, values))
    }

    /// Builds from values already aligned with declaration order and
    /// computes the shape flags.
    pub fn from_values(space: &DeclaredSpace, name: &str, values: Vec<i64>) -> Perversity {
        assert_eq!(values.len(), space.points.len());
        let dual: Vec<i64> =
            values.iter().zip(&space.points).map(|(&v, p)| -p.dim - v).collect();
        let flags = |vals: &[i64]| {
            let mut mono = true;
            let mut strict = true;
            for (i, smaller) in space.closure.iter().enumerate() {
                for &j in smaller {
                    mono &= vals[j] >= vals[i];
                    strict &= vals[j] > vals[i];
                }
            }
            (mono, strict)
        };
        let (monotone, strictly_monotone) = flags(&values);
        let (comonotone, strictly_comonotone) = flags(&dual);
        Perversity {
            name: name.to_string(),
            values,
            monotone,
            strictly_monotone,
            comonotone,
            strictly_comonotone,
        }
    }

    pub fn value(&self, point: usize) -> i64 {
        self.values[point]
    }

    /// The dual perversity `x -> -dim(x) - p(x)`.
    pub fn dual(&self, space: &DeclaredSpace) -> Perversity {
        let vals = self
            .values
            .iter()
            .zip(&space.points)
            .map(|(&v, p)| -p.dim - v)
            .collect();
        Perversity::from_values(space, &format!("{}.dual", self.name), vals)
    }
}
