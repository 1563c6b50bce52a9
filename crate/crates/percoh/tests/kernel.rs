//! Property tests for the reduction kernel: normal forms, basis
//! certificates, cofactor bookkeeping, and syzygies, over randomly
//! generated inputs in three variables.

use percoh::groebner::{
    certificate, gb, make_quotient, normal_form, reduce_vect_mod_ideal, reduce_with_cofactors,
    syzygies_over,
};
use percoh::monomial::MonoOrder;
use percoh::poly::{add, mul_poly, sub, Mat, Vect};
use percoh::ring::Ring;
use proptest::prelude::*;
use std::sync::Arc;

fn ring3(order: MonoOrder) -> Arc<Ring> {
    let vars = vec!["x".into(), "y".into(), "z".into()];
    Ring::polynomial(32003, vars, order).unwrap()
}

/// Raw material for one polynomial: up to three (coefficient, exponents)
/// pairs of total degree at most six.
fn raw_poly() -> impl Strategy<Value = Vec<(u32, Vec<u16>)>> {
    prop::collection::vec(
        (1u32..32003, prop::collection::vec(0u16..=2, 3)),
        1..=3,
    )
}

fn raw_polys(n: usize) -> impl Strategy<Value = Vec<Vec<(u32, Vec<u16>)>>> {
    prop::collection::vec(raw_poly(), 1..=n)
}

/// Multilinear material, small enough for lexicographic bases to stay tame.
fn raw_poly_small() -> impl Strategy<Value = Vec<(u32, Vec<u16>)>> {
    prop::collection::vec(
        (1u32..32003, prop::collection::vec(0u16..=1, 3)),
        1..=2,
    )
}

fn raw_polys_small(n: usize) -> impl Strategy<Value = Vec<Vec<(u32, Vec<u16>)>>> {
    prop::collection::vec(raw_poly_small(), 1..=n)
}

fn to_vect(ring: &Arc<Ring>, terms: &[(u32, Vec<u16>)]) -> Vect {
    let mut v = Vect::zero();
    for (c, m) in terms {
        v = add(&ring.field, ring.pot(), &v, &Vect::term(0, *c, m.clone()));
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Reducing a normal form again changes nothing.
    #[test]
    fn normal_form_is_idempotent(g_raw in raw_polys(3), v_raw in raw_poly()) {
        let ring = ring3(MonoOrder::GrevLex);
        let gens: Vec<Vect> = g_raw.iter().map(|t| to_vect(&ring, t)).collect();
        let v = to_vect(&ring, &v_raw);
        let basis = gb(&ring, ring.pot(), 1, &gens, false);
        let r = normal_form(&basis, &v);
        prop_assert_eq!(normal_form(&basis, &r), r);
    }

    /// Multiples of the generators always reduce to zero.
    #[test]
    fn ideal_products_vanish(g_raw in raw_polys(3), f_raw in raw_poly()) {
        let ring = ring3(MonoOrder::GrevLex);
        let gens: Vec<Vect> = g_raw.iter().map(|t| to_vect(&ring, t)).collect();
        let f = to_vect(&ring, &f_raw);
        let basis = gb(&ring, ring.pot(), 1, &gens, false);
        for g in &gens {
            let product = mul_poly(&ring.field, ring.pot(), &f, g);
            prop_assert!(normal_form(&basis, &product).is_zero());
        }
    }

    /// Every computed basis passes its own pairwise-reduction certificate,
    /// under both monomial orders (multilinear inputs keep lex tractable).
    #[test]
    fn bases_certify(g_raw in raw_polys_small(3)) {
        for order in [MonoOrder::GrevLex, MonoOrder::Lex] {
            let ring = ring3(order);
            let gens: Vec<Vect> = g_raw.iter().map(|t| to_vect(&ring, t)).collect();
            let basis = gb(&ring, ring.pot(), 1, &gens, true);
            prop_assert!(certificate(&basis));
        }
    }

    /// Ideal membership is order-independent: a product of the generators
    /// reduces to zero under the graded order exactly when it does under
    /// the lexicographic one — and a unit never does under either.
    #[test]
    fn membership_is_order_independent(g_raw in raw_polys_small(3), f_raw in raw_poly_small()) {
        let grev = ring3(MonoOrder::GrevLex);
        let lex = ring3(MonoOrder::Lex);
        let mut answers = Vec::new();
        for ring in [&grev, &lex] {
            let gens: Vec<Vect> = g_raw.iter().map(|t| to_vect(ring, t)).collect();
            let f = to_vect(ring, &f_raw);
            let product = mul_poly(&ring.field, ring.pot(), &f, &gens[0]);
            let one = Vect::term(0, 1, vec![0; 3]);
            let probe = add(&ring.field, ring.pot(), &product, &one);
            let basis = gb(ring, ring.pot(), 1, &gens, false);
            answers.push((
                normal_form(&basis, &product).is_zero(),
                normal_form(&basis, &probe).is_zero(),
            ));
        }
        prop_assert!(answers[0].0 && answers[1].0);
        prop_assert_eq!(answers[0].1, answers[1].1);
    }

    /// The cofactor decomposition is exact: v = sum_k cof[k] * elems[k] + r,
    /// and the remainder is the normal form.
    #[test]
    fn cofactors_reassemble(g_raw in raw_polys(3), v_raw in raw_poly()) {
        let ring = ring3(MonoOrder::GrevLex);
        let gens: Vec<Vect> = g_raw.iter().map(|t| to_vect(&ring, t)).collect();
        let v = to_vect(&ring, &v_raw);
        let basis = gb(&ring, ring.pot(), 1, &gens, false);
        let (r, cof) = reduce_with_cofactors(&basis, &v);
        prop_assert_eq!(&r, &normal_form(&basis, &v));
        let mut rebuilt = r;
        for (k, c) in cof.iter().enumerate() {
            let piece = mul_poly(&ring.field, ring.pot(), c, &basis.elems[k]);
            rebuilt = add(&ring.field, ring.pot(), &rebuilt, &piece);
        }
        prop_assert!(sub(&ring.field, ring.pot(), &rebuilt, &v).is_zero());
    }
}

/// Koszul-style relations between three variables are found, and every
/// reported relation annihilates the generator row.
#[test]
fn syzygies_annihilate_over_polynomial_ring() {
    let ring = ring3(MonoOrder::GrevLex);
    let gens: Vec<Vect> = ["x", "y", "z"]
        .iter()
        .map(|s| ring.parse_poly(s, 0).unwrap())
        .collect();
    let zs = syzygies_over(&ring, 1, &gens);
    assert_eq!(zs.len(), 3, "three variables have three basic relations");
    let row = Mat { rows: 1, cols: gens };
    for z in &zs {
        let product = row.apply(&ring.field, ring.pot(), z);
        assert!(product.is_zero(), "{} is not a relation", ring.poly_string(z));
    }
}

/// Over the quadric cone the maximal ideal picks up an extra relation
/// from the defining equation; products vanish modulo that equation.
#[test]
fn syzygies_annihilate_over_quotient_ring() {
    let ambient = ring3(MonoOrder::GrevLex);
    let cone = make_quotient(&ambient, vec![ambient.parse_poly("x*y - z^2", 0).unwrap()]).unwrap();
    let gens: Vec<Vect> = ["x", "y", "z"]
        .iter()
        .map(|s| cone.parse_poly(s, 0).unwrap())
        .collect();
    let zs = syzygies_over(&cone, 1, &gens);
    assert!(zs.len() > 3, "the cone equation must contribute relations");
    let row = Mat { rows: 1, cols: gens };
    for z in &zs {
        let product = row.apply(&cone.field, cone.pot(), z);
        assert!(
            reduce_vect_mod_ideal(&cone, 1, &product).is_zero(),
            "{} is not a relation on the cone",
            cone.poly_string(z)
        );
    }
}
