//! Homological machinery under load: long exact sequences of mapping
//! cones verified degree by degree, free approximations, derived-hom
//! windows against closed forms, and section towers.

mod common;

use common::line_world;
use percoh::approx::{free_approx, rhom_window};
use percoh::complex::{chain_map_from_module_map, cone, ChainMap, Complex};
use percoh::gamma::gamma_sections_oracle;
use percoh::module::{ModuleMap, PresentedModule};
use percoh::monomial::MonoOrder;
use percoh::poly::{join_comps, Mat, Vect};
use percoh::ring::Ring;
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

fn line_ring() -> Arc<Ring> {
    Ring::polynomial(32003, vec!["t".into()], MonoOrder::GrevLex).unwrap()
}

/// Finite length of a module that must have one.
fn len(m: &PresentedModule) -> usize {
    m.k_dimension().unwrap_or_else(|| panic!("module is not finite length"))
}

/// Checks exactness of `prev` then `next` at the middle cohomology module:
/// the composite vanishes and the kernel of `next` is exactly as large as
/// the image of `prev`.
fn assert_exact_at(label: &str, prev: &ModuleMap, next: &ModuleMap) {
    let composite = next.compose(prev);
    assert!(
        composite.eq_as_maps(&ModuleMap::zero(&prev.src, &next.tgt)),
        "{label}: composite is nonzero"
    );
    let image_len = len(&prev.src) - len(&prev.kernel().0);
    let kernel_len = len(&next.kernel().0);
    assert_eq!(kernel_len, image_len, "{label}: kernel exceeds image");
}

/// Runs the full long-exact-sequence check for the cone triangle of `f`,
/// over every degree where any vertex has cohomology. All cohomology must
/// be finite length. Returns the number of exactness spots verified.
fn assert_les_exact(label: &str, f: &ChainMap) -> usize {
    let data = cone(f);
    let mut degrees: Vec<i64> = Vec::new();
    for c in [&f.src, &f.tgt, &data.complex] {
        if let Some((a, b)) = c.coh_bounds() {
            degrees.extend(a - 1..=b + 1);
        }
    }
    degrees.sort_unstable();
    degrees.dedup();
    let f1 = f.shift(1);
    let mut spots = 0;
    for &k in &degrees {
        // ... -> H^{k-1}(cone) -> H^k(src) -> H^k(tgt) -> H^k(cone) -> ...
        let entering = data.proj_src.induced_on_cohomology(k - 1);
        let at_src = f1.induced_on_cohomology(k - 1); // H^{k-1} of the shift
        assert_exact_at(&format!("{label} at H^{k}(source)"), &entering, &at_src);
        let at_tgt = data.incl_tgt.induced_on_cohomology(k);
        let f_here = f.induced_on_cohomology(k);
        assert_exact_at(&format!("{label} at H^{k}(target)"), &f_here, &at_tgt);
        let leaving = data.proj_src.induced_on_cohomology(k);
        assert_exact_at(&format!("{label} at H^{k}(cone)"), &at_tgt, &leaving);
        spots += 3;
    }
    spots
}

/// A module map between direct sums of cyclic torsion modules over k[t].
/// Exponent padding keeps every entry compatible with the annihilators.
fn cyclic_sum_map(
    ring: &Arc<Ring>,
    src_ann: &[u16],
    tgt_ann: &[u16],
    entries: &[Vec<(u32, u16)>],
) -> ModuleMap {
    let mk = |anns: &[u16]| {
        let cols: Vec<Vect> = anns
            .iter()
            .enumerate()
            .map(|(i, &a)| Vect::term(i, 1, vec![a]))
            .collect();
        PresentedModule::new(ring.clone(), anns.len(), Mat { rows: anns.len(), cols }).unwrap()
    };
    let src = mk(src_ann);
    let tgt = mk(tgt_ann);
    let mut cols = Vec::new();
    for (i, &a) in src_ann.iter().enumerate() {
        let comps: Vec<Vect> = tgt_ann
            .iter()
            .enumerate()
            .map(|(j, &b)| {
                let (c, pad) = entries[i][j];
                let e = b.saturating_sub(a) + pad;
                Vect::term(0, c % 32003, vec![e])
            })
            .collect();
        cols.push(join_comps(&ring.field, ring.pot(), &comps));
    }
    ModuleMap::new(src, tgt, Mat { rows: tgt_ann.len(), cols }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The triangle of a random map between torsion sums has an exact
    /// long sequence on cohomology.
    #[test]
    fn random_module_map_triangles_are_exact(
        src_ann in prop::collection::vec(1u16..=4, 1..=2),
        tgt_ann in prop::collection::vec(1u16..=4, 1..=2),
        raw in prop::collection::vec(prop::collection::vec((0u32..32003, 0u16..=2), 2), 2),
    ) {
        let ring = line_ring();
        let entries: Vec<Vec<(u32, u16)>> = src_ann
            .iter()
            .enumerate()
            .map(|(i, _)| tgt_ann.iter().enumerate().map(|(j, _)| raw[i][j]).collect())
            .collect();
        let mm = cyclic_sum_map(&ring, &src_ann, &tgt_ann, &entries);
        let f = chain_map_from_module_map(&mm, 0);
        let spots = assert_les_exact("torsion map", &f);
        prop_assert!(spots >= 3);
    }
}

/// Multiplication by t^m on complexes with finite-length cohomology gives
/// triangles spanning several degrees; their long sequences are exact.
#[test]
fn multiplication_triangles_are_exact() {
    let w = line_world();
    let mut triangles = 0;
    for name in ["TOR", "MIX", "USH"] {
        let c = w.c(name);
        for m in 1u16..=2 {
            let scalar = Vect::term(0, 1, vec![m]);
            let mut maps = BTreeMap::new();
            for (&k, term) in &c.terms {
                if term.gens == 0 {
                    continue;
                }
                let cols: Vec<Vect> = (0..term.gens)
                    .map(|i| {
                        let mut v = scalar.clone();
                        for t in &mut v.terms {
                            t.comp = i;
                        }
                        v
                    })
                    .collect();
                maps.insert(k, Mat { rows: term.gens, cols });
            }
            let f = ChainMap::new(c.clone(), c.clone(), maps).unwrap();
            assert_les_exact(&format!("t^{m} on {name}"), &f);
            triangles += 1;
        }
    }
    assert_eq!(triangles, 6);
}

/// Free approximations reproduce the cohomology of torsion complexes in
/// every degree above their floor, with genuinely free terms.
#[test]
fn free_approximations_are_exact_above_floor() {
    let w = line_world();
    for name in ["TOR", "MIX", "USH"] {
        let c = w.c(name);
        let (a, _) = c.coh_bounds().unwrap();
        for depth in 1..=3 {
            let fa = free_approx(c, a - depth).unwrap();
            assert!(fa.complex.is_termwise_free(), "{name}: approximation not free");
            assert!(
                fa.eps.is_quasi_iso_above(fa.lo + 1),
                "{name} at depth {depth}: comparison fails"
            );
        }
    }
}

/// Derived homs between cyclic torsion modules over k[t] match the closed
/// forms: Hom and Ext^1 both have length min(a, b), everything higher dies.
#[test]
fn rhom_matches_torsion_closed_forms() {
    let ring = line_ring();
    for (a, b) in [(1u16, 1u16), (2, 3), (3, 2), (4, 4)] {
        let make = |e: u16| {
            let m = PresentedModule::new(
                ring.clone(),
                1,
                Mat { rows: 1, cols: vec![Vect::term(0, 1, vec![e])] },
            )
            .unwrap();
            Complex::from_module(&m, 0)
        };
        let rows = rhom_window(&make(a), &make(b), 0, 3).unwrap();
        let expect = a.min(b) as usize;
        assert_eq!(rows.len(), 4);
        assert_eq!(len(&rows[0].1), expect, "Hom(R/t^{a}, R/t^{b})");
        assert_eq!(len(&rows[1].1), expect, "Ext^1(R/t^{a}, R/t^{b})");
        assert!(rows[2].1.is_zero_module(), "Ext^2(R/t^{a}, R/t^{b})");
        assert!(rows[3].1.is_zero_module(), "Ext^3(R/t^{a}, R/t^{b})");
    }
}

/// The section tower of the structure sheaf at the origin of the line:
/// no sections in degree 0, and a degree-1 tower R/t^j of strictly growing
/// length that never stabilizes.
#[test]
fn gamma_tower_of_the_line_matches_closed_form() {
    let w = line_world();
    let o = w.point_idx("o");
    let rows =
        gamma_sections_oracle(w.c("FREE"), &w.space().points[o].gens, 0, 1, 4).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].modules.iter().all(|m| m.is_zero_module()));
    assert!(rows[0].stabilized);
    let lengths: Vec<usize> = rows[1].modules.iter().map(len).collect();
    assert_eq!(lengths, vec![1, 2, 3, 4], "tower must be R/t^j at stage j");
    assert!(!rows[1].stabilized);
}

/// A torsion target makes the tower stabilize once the stage ideal sinks
/// below the annihilator.
#[test]
fn gamma_tower_stabilizes_on_torsion() {
    let w = line_world();
    let o = w.point_idx("o");
    let rows =
        gamma_sections_oracle(w.c("TOR"), &w.space().points[o].gens, -1, 0, 4).unwrap();
    let hom_row = &rows[0];
    assert_eq!(hom_row.degree, -1);
    let lengths: Vec<usize> = hom_row.modules.iter().map(len).collect();
    assert_eq!(lengths, vec![1, 2, 2, 2], "sections saturate at length 2");
    assert!(hom_row.stabilized, "tower must stabilize once saturated");
}
