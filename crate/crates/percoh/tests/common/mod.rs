//! Shared battery: three rings with declared point lattices, perversities,
//! and a stock of bounded complexes, all defined through session documents
//! so every test also exercises the front end.

#![allow(dead_code)]

use percoh::complex::Complex;
use percoh::duality::{dualizing_data, DualizingData};
use percoh::ideal::ideal_eq;
use percoh::module::prune;
use percoh::session::{parse_input, SessionDocument};
use percoh::space::{DeclaredSpace, Perversity};
use std::sync::Arc;

pub struct World {
    pub name: &'static str,
    pub doc: SessionDocument,
    pub dd: DualizingData,
}

impl World {
    fn from_text(name: &'static str, text: &str) -> World {
        let doc = parse_input(text).unwrap_or_else(|e| panic!("{name} session: {e}"));
        let dd = dualizing_data(&doc.ring).unwrap_or_else(|e| panic!("{name} duality: {e}"));
        World { name, doc, dd }
    }

    pub fn space(&self) -> &DeclaredSpace {
        self.doc.space.as_ref().expect("battery worlds declare points")
    }

    pub fn p(&self, name: &str) -> &Perversity {
        &self.doc.perversities[name]
    }

    pub fn c(&self, name: &str) -> &Arc<Complex> {
        &self.doc.complexes[name]
    }

    /// All battery complexes with their names, in sorted name order.
    pub fn inputs(&self) -> Vec<(String, Arc<Complex>)> {
        self.doc.complexes.iter().map(|(n, c)| (n.clone(), c.clone())).collect()
    }

    /// The perversities every world carries.
    pub fn base_perversities(&self) -> Vec<&Perversity> {
        vec![self.p("zero"), self.p("negdim")]
    }

    pub fn point_idx(&self, name: &str) -> usize {
        self.doc.point_names.iter().position(|n| n == name).expect("declared point")
    }

    /// Base perversities plus the world-specific ones.
    pub fn all_perversities(&self) -> Vec<&Perversity> {
        self.doc.perversities.values().collect()
    }
}

/// The affine line: one curve point and the origin.
pub fn line_world() -> World {
    World::from_text(
        "line",
        r#"
field.char = 32003
ambient.vars = ["t"]
points.g = []
points.o = ["t"]
perversity.zero = {g: 0, o: 0}
perversity.negdim = {g: -1, o: 0}
complex.FREE.degree.0.gens = 1
complex.TOR.degree.-1.gens = 1
complex.TOR.degree.-1.rels = [["t^2"]]
complex.TWO.degree.-1.gens = 1
complex.TWO.degree.0.gens = 1
complex.TWO.diff.-1 = [["t^3"]]
complex.MIX.degree.-2.gens = 1
complex.MIX.degree.-1.gens = 1
complex.MIX.degree.0.gens = 1
complex.MIX.degree.0.rels = [["t"]]
complex.MIX.diff.-2 = [["t^2"]]
complex.MIX.diff.-1 = [["1"]]
complex.USH.degree.1.gens = 1
complex.USH.degree.1.rels = [["t"]]
"#,
    )
}

/// The affine plane with a chain of three points: generic, a line, origin.
pub fn plane_world() -> World {
    World::from_text(
        "plane",
        r#"
field.char = 32003
ambient.vars = ["u", "v"]
points.g = []
points.ell = ["v"]
points.o = ["u", "v"]
perversity.zero = {g: 0, ell: 0, o: 0}
perversity.negdim = {g: -2, ell: -1, o: 0}
perversity.step = {g: 0, ell: 0, o: 1}
complex.FREE.degree.0.gens = 1
complex.KOS.degree.-2.gens = 1
complex.KOS.degree.-1.gens = 2
complex.KOS.degree.0.gens = 1
complex.KOS.diff.-2 = [["-v"], ["u"]]
complex.KOS.diff.-1 = [["u", "v"]]
complex.CURVE.degree.0.gens = 1
complex.CURVE.degree.0.rels = [["v"]]
complex.CSH.degree.1.gens = 1
complex.CSH.degree.1.rels = [["v^2"]]
complex.MIX.degree.0.gens = 2
complex.MIX.degree.0.rels = [["u", "0"], ["v", "0"], ["0", "v"]]
"#,
    )
}

/// The quadric cone with its two-step lattice and middle perversity.
pub fn cone_world() -> World {
    World::from_text(
        "cone",
        r#"
field.char = 32003
ambient.vars = ["x", "y", "z"]
ambient.order = grevlex
quotient = ["x*y - z^2"]
points.eta = []
points.o = ["x", "y", "z"]
perversity.zero = {eta: 0, o: 0}
perversity.negdim = {eta: -2, o: 0}
perversity.mid = {eta: -1, o: 0}
complex.IC.degree.-1.gens = 1
complex.SKY.degree.0.gens = 1
complex.SKY.degree.0.rels = [["x"], ["y"], ["z"]]
complex.OO.degree.0.gens = 1
complex.FAT.degree.0.gens = 1
complex.FAT.degree.0.rels = [["x^2"], ["x*y"], ["x*z"], ["y^2"], ["y*z"], ["z^2"]]
complex.TWOF.degree.-1.gens = 1
complex.TWOF.degree.0.gens = 1
complex.ICSKY.degree.-1.gens = 1
complex.ICSKY.degree.0.gens = 1
complex.ICSKY.degree.0.rels = [["x"], ["y"], ["z"]]
complex.USH.degree.1.gens = 1
complex.USH.degree.1.rels = [["x"], ["y"], ["z"]]
"#,
    )
}

pub fn all_worlds() -> Vec<World> {
    vec![line_world(), plane_world(), cone_world()]
}

/// Per-degree invariants of cohomology: minimal generator count, length
/// over the ground field when finite, and the annihilator ideal.
pub struct Fingerprint {
    pub rows: Vec<(i64, usize, Option<usize>, Vec<percoh::poly::Vect>)>,
}

pub fn fingerprint(c: &Arc<Complex>) -> Fingerprint {
    let mut rows = Vec::new();
    for k in c.coh_support() {
        let h = prune(&c.cohomology(k)).0;
        rows.push((k, h.gens, h.k_dimension(), h.annihilator()));
    }
    Fingerprint { rows }
}

/// Same degrees, same generator counts, same lengths, equal annihilators.
pub fn same_fingerprint(ring: &Arc<percoh::Ring>, a: &Fingerprint, b: &Fingerprint) -> bool {
    a.rows.len() == b.rows.len()
        && a.rows.iter().zip(&b.rows).all(|(x, y)| {
            x.0 == y.0 && x.1 == y.1 && x.2 == y.2 && ideal_eq(ring, &x.3, &y.3)
        })
}
