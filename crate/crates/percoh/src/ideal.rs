//! Ideal-level operations: sums, products, intersections, radical
//! membership, containment, and Krull dimension.
//!
//! All inputs are rank-one elements of a possibly-quotient ring; answers are
//! read modulo the defining ideal. Elimination tricks run in an extended
//! ambient ring with one fresh leading variable under a block order.

use crate::groebner::{gb, ideal_gb, nf_mod_ideal, rgb};
use crate::monomial::ModOrder;
use crate::poly::{mul_poly, normalize, sub, Vect};
use crate::ring::Ring;
use std::collections::BTreeSet;
use std::sync::Arc;

/// A variable name not clashing with the ring's.
fn fresh_var(ring: &Ring) -> String {
    let mut name = "t".to_string();
    while ring.vars.contains(&name) {
        name.push('_');
    }
    name
}

/// Canonicalizes a generating set: reduce mod the defining ideal, drop
/// zeros and duplicates, sort by key bytes.
pub fn clean_gens(ring: &Arc<Ring>, gens: &[Vect]) -> Vec<Vect> {
    let mut out: Vec<Vect> = Vec::new();
    for g in gens {
        let n = nf_mod_ideal(ring, g);
        if !n.is_zero() && !out.contains(&n) {
            out.push(n);
        }
    }
    out.sort_by(|a, b| {
        let mut ka = Vec::new();
        let mut kb = Vec::new();
        a.key_bytes(&mut ka);
        b.key_bytes(&mut kb);
        ka.cmp(&kb)
    });
    out
}

/// Generators of `a + b`.
pub fn ideal_sum(ring: &Arc<Ring>, a: &[Vect], b: &[Vect]) -> Vec<Vect> {
    let mut gens = a.to_vec();
    gens.extend_from_slice(b);
    clean_gens(ring, &gens)
}

/// Generators of `a * b` (all pairwise products).
pub fn ideal_product(ring: &Arc<Ring>, a: &[Vect], b: &[Vect]) -> Vec<Vect> {
    let field = &ring.field;
    let pot = ring.pot();
    let mut gens = Vec::new();
    for f in a {
        for g in b {
            gens.push(mul_poly(field, pot, f, g));
        }
    }
    clean_gens(ring, &gens)
}

/// Generators of the intersection `a ∩ b` as ideals of the ring, via the
/// single-tag elimination `t*a + (1-t)*b`.
pub fn ideal_intersection(ring: &Arc<Ring>, a: &[Vect], b: &[Vect]) -> Vec<Vect> {
    let ambient = ring.ambient();
    let ext = ambient.with_front_var(&fresh_var(&ambient));
    let field = &ext.field;
    let pot = ext.pot();
    let nvars = ext.nvars();
    let t = {
        let mut m = vec![0u16; nvars];
        m[0] = 1;
        Vect::term(0, 1, m)
    };
    let one = Vect::constant(field, 1, nvars);
    let one_minus_t = sub(field, pot, &one, &t);
    let mut gens = Vec::new();
    for f in a.iter().chain(&ring.ideal) {
        gens.push(mul_poly(field, pot, &t, &ambient.embed_front(f)));
    }
    for g in b.iter().chain(&ring.ideal) {
        gens.push(mul_poly(field, pot, &one_minus_t, &ambient.embed_front(g)));
    }
    let basis = gb(&ext, ModOrder::pot(ext.order), 1, &gens, false);
    let mut out = Vec::new();
    for e in &basis.elems {
        if let Some(stripped) = ext.strip_front(e) {
            let n = normalize(&ambient.field, ambient.pot(), stripped.terms);
            out.push(n);
        }
    }
    clean_gens(ring, &out)
}

/// Intersection of several ideals.
pub fn ideal_intersection_many(ring: &Arc<Ring>, ideals: &[Vec<Vect>]) -> Vec<Vect> {
    match ideals.len() {
        0 => vec![Vect::constant(&ring.field, 1, ring.nvars())],
        1 => clean_gens(ring, &ideals[0]),
        _ => {
            let mut acc = ideals[0].clone();
            for next in &ideals[1..] {
                acc = ideal_intersection(ring, &acc, next);
            }
            acc
        }
    }
}

/// True when `f` lies in the radical of the ideal generated by `j`
/// (as ideals of the ring): `1 ∈ j + I + (1 - t*f)`.
pub fn radical_membership(ring: &Arc<Ring>, f: &Vect, j: &[Vect]) -> bool {
    let ambient = ring.ambient();
    let ext = ambient.with_front_var(&fresh_var(&ambient));
    let field = &ext.field;
    let pot = ext.pot();
    let nvars = ext.nvars();
    let t = {
        let mut m = vec![0u16; nvars];
        m[0] = 1;
        Vect::term(0, 1, m)
    };
    let one = Vect::constant(field, 1, nvars);
    let mut gens: Vec<Vect> = j.iter().chain(&ring.ideal).map(|g| ambient.embed_front(g)).collect();
    gens.push(sub(field, pot, &one, &mul_poly(field, pot, &t, &ambient.embed_front(f))));
    let basis = gb(&ext, ModOrder::pot(ext.order), 1, &gens, false);
    basis
        .elems
        .iter()
        .any(|e| e.lead().map(|l| l.mono.iter().all(|&x| x == 0)).unwrap_or(false))
}

/// True when every generator of `b` lies in `a` (as ideals of the ring).
pub fn ideal_contains(ring: &Arc<Ring>, a: &[Vect], b: &[Vect]) -> bool {
    let h = rgb(ring, ModOrder::pot(ring.order), 1, a, false);
    b.iter().all(|g| h.contains(g))
}

/// Equality of ideals of the ring.
pub fn ideal_eq(ring: &Arc<Ring>, a: &[Vect], b: &[Vect]) -> bool {
    ideal_contains(ring, a, b) && ideal_contains(ring, b, a)
}

/// Supports of the lead monomials of the reduced basis of `gens + I`,
/// minimized (no support contains another). An empty support (unit ideal)
/// is reported as `None`.
fn lead_supports(ring: &Arc<Ring>, gens: &[Vect]) -> Option<Vec<BTreeSet<usize>>> {
    let ambient = ring.ambient();
    let mut all = gens.to_vec();
    all.extend(ring.ideal.iter().cloned());
    let basis = gb(&ambient, ModOrder::pot(ambient.order), 1, &all, false);
    let mut sups: Vec<BTreeSet<usize>> = Vec::new();
    for e in &basis.elems {
        let l = e.lead().unwrap();
        let s: BTreeSet<usize> =
            l.mono.iter().enumerate().filter(|&(_, &e)| e > 0).map(|(i, _)| i).collect();
        if s.is_empty() {
            return None;
        }
        sups.push(s);
    }
    sups.sort_by_key(|s| (s.len(), s.iter().cloned().collect::<Vec<_>>()));
    let mut min: Vec<BTreeSet<usize>> = Vec::new();
    for s in sups {
        if !min.iter().any(|m| m.is_subset(&s)) {
            min.push(s);
        }
    }
    Some(min)
}

fn min_hitting(sups: &[BTreeSet<usize>]) -> usize {
    if sups.is_empty() {
        return 0;
    }
    let first = &sups[0];
    let mut best = usize::MAX;
    for &v in first {
        let rest: Vec<BTreeSet<usize>> =
            sups[1..].iter().filter(|s| !s.contains(&v)).cloned().collect();
        let sub = min_hitting(&rest);
        best = best.min(1 + sub);
    }
    best
}

/// Krull dimension of `ring / (gens)`; `-1` for the empty scheme.
pub fn dim_of_ideal(ring: &Arc<Ring>, gens: &[Vect]) -> i64 {
    match lead_supports(ring, gens) {
        None => -1,
        Some(sups) => ring.nvars() as i64 - min_hitting(&sups) as i64,
    }
}

/// Krull dimension of the ring itself.
pub fn ring_dim(ring: &Arc<Ring>) -> i64 {
    dim_of_ideal(ring, &[])
}

/// Exhaustive-search dimension, for cross-checking on few variables.
pub fn dim_of_ideal_brute(ring: &Arc<Ring>, gens: &[Vect]) -> i64 {
    let n = ring.nvars();
    assert!(n <= 16, "brute-force dimension is for small rings");
    let sups = match lead_supports(ring, gens) {
        None => return -1,
        Some(s) => s,
    };
    for k in 0..=n {
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let hit_all = sups
                .iter()
                .all(|s| s.iter().any(|&v| mask & (1 << v) != 0));
            if hit_all {
                return n as i64 - k as i64;
            }
        }
    }
    -1
}

/// True when the defining ideal of a point is proper.
pub fn point_is_proper(ring: &Arc<Ring>, gens: &[Vect]) -> bool {
    dim_of_ideal(ring, gens) >= 0
}

/// Leading coefficient sanity for the defining ideal: exposed so session
/// validation can give a direct answer.
pub fn ideal_is_unit(ring: &Arc<Ring>) -> bool {
    let g = ideal_gb(ring);
    g.elems
        .iter()
        .any(|e| e.lead().map(|l| l.mono.iter().all(|&x| x == 0)).unwrap_or(false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::make_quotient;
    use crate::monomial::MonoOrder;

    fn ring_xy() -> Arc<Ring> {
        Ring::polynomial(32003, vec!["x".into(), "y".into()], MonoOrder::GrevLex).unwrap()
    }

    fn ring_xyz() -> Arc<Ring> {
        Ring::polynomial(
            32003,
            vec!["x".into(), "y".into(), "z".into()],
            MonoOrder::GrevLex,
        )
        .unwrap()
    }

    #[test]
    fn intersection_of_coordinate_lines() {
        let r = ring_xy();
        let a = vec![r.parse_poly("x", 1).unwrap()];
        let b = vec![r.parse_poly("y", 1).unwrap()];
        let got = ideal_intersection(&r, &a, &b);
        let want = vec![r.parse_poly("x*y", 1).unwrap()];
        assert!(ideal_eq(&r, &got, &want));
    }

    #[test]
    fn intersection_with_shared_component() {
        let r = ring_xyz();
        let a = vec![r.parse_poly("x", 1).unwrap(), r.parse_poly("y", 1).unwrap()];
        let b = vec![r.parse_poly("x", 1).unwrap(), r.parse_poly("z", 1).unwrap()];
        let got = ideal_intersection(&r, &a, &b);
        let want = vec![r.parse_poly("x", 1).unwrap(), r.parse_poly("y*z", 1).unwrap()];
        assert!(ideal_eq(&r, &got, &want));
    }

    #[test]
    fn radical_membership_cases() {
        let r = ring_xy();
        let j = vec![r.parse_poly("x^2", 1).unwrap(), r.parse_poly("y^2", 1).unwrap()];
        assert!(radical_membership(&r, &r.parse_poly("x + y", 1).unwrap(), &j));
        assert!(radical_membership(&r, &r.parse_poly("(x + y)^3", 1).unwrap(), &j));
        assert!(!radical_membership(
            &r,
            &r.parse_poly("x + 1", 1).unwrap(),
            &j
        ));
        let jy = vec![r.parse_poly("y^2", 1).unwrap()];
        assert!(!radical_membership(&r, &r.parse_poly("x", 1).unwrap(), &jy));
        assert!(radical_membership(&r, &r.parse_poly("y", 1).unwrap(), &jy));
    }

    #[test]
    fn dimensions() {
        let r = ring_xy();
        assert_eq!(ring_dim(&r), 2);
        assert_eq!(dim_of_ideal(&r, &[r.parse_poly("x^2", 1).unwrap(), r.parse_poly("x*y", 1).unwrap()]), 1);
        let r3 = ring_xyz();
        let q = make_quotient(&r3, vec![r3.parse_poly("x*y - z^2", 1).unwrap()]).unwrap();
        assert_eq!(ring_dim(&q), 2);
        assert_eq!(
            dim_of_ideal(&q, &[q.parse_poly("x", 1).unwrap(), q.parse_poly("z", 1).unwrap()]),
            1
        );
        assert_eq!(
            dim_of_ideal(&r, &[r.parse_poly("x - 1", 1).unwrap(), r.parse_poly("x", 1).unwrap()]),
            -1
        );
    }

    #[test]
    fn brute_force_agrees_on_samples() {
        let r = ring_xyz();
        let cases = vec![
            vec![],
            vec![r.parse_poly("x*y", 1).unwrap()],
            vec![r.parse_poly("x*y", 1).unwrap(), r.parse_poly("y*z", 1).unwrap()],
            vec![r.parse_poly("x", 1).unwrap(), r.parse_poly("y^3", 1).unwrap()],
        ];
        for gens in cases {
            assert_eq!(dim_of_ideal(&r, &gens), dim_of_ideal_brute(&r, &gens));
        }
    }
}
