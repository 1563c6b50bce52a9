//! Bounded cochain complexes of presented modules and the chain maps
//! between them: cones, shifts, smart and sharp truncations, direct sums,
//! pruning, cohomology with induced maps, and quasi-isomorphism checks.
//!
//! Every constructor validates its input: differentials must be honest
//! module maps squaring to zero modulo relations, chain maps must commute
//! with the differentials. Nothing unverified circulates downstream.

use crate::error::{Error, Result};
use crate::groebner::{reduce_vect_mod_ideal, rgb, syzygies_over};
use crate::module::{submodule_presentation, ModuleMap, PresentedModule};
use crate::monomial::ModOrder;
use crate::poly::{add, project_comps, sub, Mat, Vect};
use crate::ring::Ring;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A bounded complex; missing degrees are zero modules.
#[derive(Debug, Clone, PartialEq)]
pub struct Complex {
    pub ring: Arc<Ring>,
    pub terms: BTreeMap<i64, PresentedModule>,
    pub diffs: BTreeMap<i64, Mat>,
}

impl Complex {
    /// Validates shapes, module-map property, and `d . d = 0`.
    pub fn new(
        ring: Arc<Ring>,
        terms: BTreeMap<i64, PresentedModule>,
        diffs: BTreeMap<i64, Mat>,
    ) -> Result<Arc<Complex>> {
        let mut kept_terms: BTreeMap<i64, PresentedModule> = BTreeMap::new();
        for (k, m) in terms {
            assert_eq!(m.ring, ring);
            if m.gens > 0 {
                kept_terms.insert(k, m);
            }
        }
        let mut kept_diffs: BTreeMap<i64, Mat> = BTreeMap::new();
        for (k, d) in diffs {
            let src = kept_terms.get(&k);
            let tgt = kept_terms.get(&(k + 1));
            let (Some(src), Some(tgt)) = (src, tgt) else {
                if !d.is_zero() {
                    return Err(Error::Invalid(format!(
                        "differential at degree {k} touches a zero term but is nonzero"
                    )));
                }
                continue;
            };
            if d.rows != tgt.gens || d.ncols() != src.gens {
                return Err(Error::Invalid(format!(
                    "differential at degree {k} has shape {}x{}, expected {}x{}",
                    d.rows,
                    d.ncols(),
                    tgt.gens,
                    src.gens
                )));
            }
            let cleaned = Mat {
                rows: d.rows,
                cols: d
                    .cols
                    .iter()
                    .map(|c| reduce_vect_mod_ideal(&ring, tgt.gens, c))
                    .collect(),
            };
            if cleaned.is_zero() {
                continue;
            }
            // Differential must be a module map.
            ModuleMap::new(src.clone(), tgt.clone(), cleaned.clone()).map_err(|_| {
                Error::Invalid(format!(
                    "differential at degree {k} does not respect relations"
                ))
            })?;
            kept_diffs.insert(k, cleaned);
        }
        let c = Complex { ring, terms: kept_terms, diffs: kept_diffs };
        // d . d = 0 modulo relations.
        let keys: Vec<i64> = c.diffs.keys().cloned().collect();
        for k in keys {
            if c.diffs.contains_key(&(k + 1)) {
                let dd = c.diff_at(k + 1).compose(&c.ring.field, c.ring.pot(), &c.diff_at(k));
                let basis = c.term_at(k + 2).rel_basis(false);
                for col in &dd.cols {
                    if !basis.contains(col) {
                        return Err(Error::Invalid(format!(
                            "differentials at degrees {k} and {} do not compose to zero",
                            k + 1
                        )));
                    }
                }
            }
        }
        Ok(Arc::new(c))
    }

    pub fn zero(ring: &Arc<Ring>) -> Arc<Complex> {
        Arc::new(Complex { ring: Arc::clone(ring), terms: BTreeMap::new(), diffs: BTreeMap::new() })
    }

    /// A module placed in a single degree.
    pub fn from_module(m: &PresentedModule, degree: i64) -> Arc<Complex> {
        let ring = m.ring.clone();
        let mut terms = BTreeMap::new();
        if m.gens > 0 {
            terms.insert(degree, m.clone());
        }
        Arc::new(Complex { ring, terms, diffs: BTreeMap::new() })
    }

    pub fn term_at(&self, k: i64) -> PresentedModule {
        self.terms.get(&k).cloned().unwrap_or_else(|| PresentedModule::zero(&self.ring))
    }

    pub fn gens_at(&self, k: i64) -> usize {
        self.terms.get(&k).map(|m| m.gens).unwrap_or(0)
    }

    pub fn diff_at(&self, k: i64) -> Mat {
        match self.diffs.get(&k) {
            Some(d) => d.clone(),
            None => Mat::zero(self.gens_at(k + 1), self.gens_at(k)),
        }
    }

    /// Degree range carrying terms.
    pub fn term_bounds(&self) -> Option<(i64, i64)> {
        let lo = self.terms.keys().next()?;
        let hi = self.terms.keys().last()?;
        Some((*lo, *hi))
    }

    pub fn is_termwise_free(&self) -> bool {
        self.terms.values().all(|m| m.is_free_presentation())
    }

    /// Cohomology at degree `k`: generators are the kernel basis columns.
    pub fn cohomology(&self, k: i64) -> PresentedModule {
        let g = self.gens_at(k);
        if g == 0 {
            return PresentedModule::zero(&self.ring);
        }
        let kgens = self.kernel_gens(k);
        let mut denom = kgens.clone();
        let d_in = self.diff_at(k - 1);
        denom.extend(d_in.cols.iter().cloned());
        denom.extend(self.term_at(k).rels.cols.iter().cloned());
        let syz = syzygies_over(&self.ring, g, &denom);
        let mut rel_cols: Vec<Vect> = Vec::new();
        for s in &syz {
            let r = reduce_vect_mod_ideal(&self.ring, kgens.len(), &project_comps(s, 0, kgens.len()));
            if !r.is_zero() && !rel_cols.contains(&r) {
                rel_cols.push(r);
            }
        }
        PresentedModule {
            ring: self.ring.clone(),
            gens: kgens.len(),
            rels: Mat { rows: kgens.len(), cols: rel_cols },
        }
    }

    /// Deterministic generating set of `ker(d^k)` inside `R^{g_k}`.
    pub fn kernel_gens(&self, k: i64) -> Vec<Vect> {
        let g = self.gens_at(k);
        let d = self.diff_at(k);
        let mut cols = d.cols.clone();
        cols.extend(self.term_at(k + 1).rels.cols.iter().cloned());
        let syz = syzygies_over(&self.ring, self.gens_at(k + 1), &cols);
        let mut kgens: Vec<Vect> = Vec::new();
        for s in &syz {
            let v = reduce_vect_mod_ideal(&self.ring, g, &project_comps(s, 0, g));
            if !v.is_zero() && !kgens.contains(&v) {
                kgens.push(v);
            }
        }
        kgens
    }

    pub fn coh_is_zero_at(&self, k: i64) -> bool {
        self.cohomology(k).is_zero_module()
    }

    /// Degrees with nonzero cohomology.
    pub fn coh_support(&self) -> Vec<i64> {
        let Some((lo, hi)) = self.term_bounds() else { return Vec::new() };
        (lo..=hi).filter(|&k| !self.coh_is_zero_at(k)).collect()
    }

    pub fn coh_bounds(&self) -> Option<(i64, i64)> {
        let s = self.coh_support();
        Some((*s.first()?, *s.last()?))
    }

    pub fn is_acyclic(&self) -> bool {
        self.coh_support().is_empty()
    }
}

/// A chain map, validated degreewise and across squares.
#[derive(Debug, Clone)]
pub struct ChainMap {
    pub src: Arc<Complex>,
    pub tgt: Arc<Complex>,
    pub maps: BTreeMap<i64, Mat>,
}

impl ChainMap {
    pub fn new(src: Arc<Complex>, tgt: Arc<Complex>, maps: BTreeMap<i64, Mat>) -> Result<ChainMap> {
        assert_eq!(src.ring, tgt.ring);
        let ring = Arc::clone(&src.ring);
        let field = &ring.field;
        let pot = ring.pot();
        let mut kept: BTreeMap<i64, Mat> = BTreeMap::new();
        for (k, m) in maps {
            let gs = src.gens_at(k);
            let gt = tgt.gens_at(k);
            if m.rows != gt || m.ncols() != gs {
                if m.is_zero() {
                    continue;
                }
                return Err(Error::Invalid(format!(
                    "chain map at degree {k} has shape {}x{}, expected {}x{}",
                    m.rows,
                    m.ncols(),
                    gt,
                    gs
                )));
            }
            if gs == 0 || gt == 0 {
                continue;
            }
            let cleaned = Mat {
                rows: gt,
                cols: m.cols.iter().map(|c| reduce_vect_mod_ideal(&ring, gt, c)).collect(),
            };
            ModuleMap::new(src.term_at(k), tgt.term_at(k), cleaned.clone()).map_err(|_| {
                Error::Invalid(format!("chain map at degree {k} does not respect relations"))
            })?;
            if !cleaned.is_zero() {
                kept.insert(k, cleaned);
            }
        }
        let f = ChainMap { src, tgt, maps: kept };
        // Squares: f d = d f modulo relations.
        let mut degrees: Vec<i64> = Vec::new();
        if let Some((lo, hi)) = f.src.term_bounds() {
            degrees.extend(lo - 1..=hi + 1);
        }
        for k in degrees {
            let lhs = f.map_at(k + 1).compose(&f.src.ring.field, pot, &f.src.diff_at(k));
            let rhs = f.tgt.diff_at(k).compose(field, pot, &f.map_at(k));
            let basis = f.tgt.term_at(k + 1).rel_basis(false);
            let diff = lhs.add(field, pot, &rhs.neg(field));
            for col in &diff.cols {
                if !basis.contains(col) {
                    return Err(Error::Invalid(format!(
                        "chain map square at degree {k} does not commute"
                    )));
                }
            }
        }
        Ok(f)
    }

    pub fn map_at(&self, k: i64) -> Mat {
        match self.maps.get(&k) {
            Some(m) => m.clone(),
            None => Mat::zero(self.tgt.gens_at(k), self.src.gens_at(k)),
        }
    }

    pub fn identity(c: &Arc<Complex>) -> ChainMap {
        let maps = c
            .terms
            .iter()
            .map(|(&k, m)| (k, Mat::identity(m.gens, c.ring.nvars())))
            .collect();
        ChainMap { src: Arc::clone(c), tgt: Arc::clone(c), maps }
    }

    pub fn zero(src: &Arc<Complex>, tgt: &Arc<Complex>) -> ChainMap {
        ChainMap { src: Arc::clone(src), tgt: Arc::clone(tgt), maps: BTreeMap::new() }
    }

    /// `self . other` (apply `other` first).
    pub fn compose(&self, other: &ChainMap) -> ChainMap {
        let ring = &self.src.ring;
        let field = &ring.field;
        let pot = ring.pot();
        let mut maps = BTreeMap::new();
        for k in other.maps.keys().chain(self.maps.keys()) {
            let m = self.map_at(*k).compose(field, pot, &other.map_at(*k));
            if !m.is_zero() {
                maps.insert(*k, m);
            }
        }
        ChainMap { src: other.src.clone(), tgt: self.tgt.clone(), maps }
    }

    pub fn negate(&self) -> ChainMap {
        let field = &self.src.ring.field;
        ChainMap {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            maps: self.maps.iter().map(|(&k, m)| (k, m.neg(field))).collect(),
        }
    }

    /// The same map viewed `n` shifts later (no sign: shifting both ends).
    pub fn shift(&self, n: i64) -> ChainMap {
        ChainMap {
            src: shift(&self.src, n),
            tgt: shift(&self.tgt, n),
            maps: self.maps.iter().map(|(&k, m)| (k - n, m.clone())).collect(),
        }
    }

    /// Induced map on cohomology at degree `k`, as a map of the canonical
    /// cohomology presentations.
    pub fn induced_on_cohomology(&self, k: i64) -> ModuleMap {
        let ring = &self.src.ring;
        let field = &ring.field;
        let pot = ring.pot();
        let hs = self.src.cohomology(k);
        let ht = self.tgt.cohomology(k);
        if hs.gens == 0 || ht.gens == 0 {
            return ModuleMap::zero(&hs, &ht);
        }
        let ks = self.src.kernel_gens(k);
        let kt = self.tgt.kernel_gens(k);
        let mut ambient_cols = kt.clone();
        ambient_cols.extend(self.tgt.diff_at(k - 1).cols.iter().cloned());
        ambient_cols.extend(self.tgt.term_at(k).rels.cols.iter().cloned());
        let basis = rgb(ring, ModOrder::pot(ring.order), self.tgt.gens_at(k), &ambient_cols, true);
        let f = self.map_at(k);
        let mut cols = Vec::with_capacity(ks.len());
        for v in &ks {
            let image = f.apply(field, pot, v);
            let lifted = basis
                .lift(&image)
                .expect("image of a cycle must be a cycle modulo boundaries");
            let class = crate::poly::join_comps(field, pot, &lifted[..kt.len()]);
            cols.push(class);
        }
        ModuleMap::new(hs, ht.clone(), Mat { rows: ht.gens, cols })
            .expect("induced cohomology map must respect relations")
    }

    /// True when the mapping cone is acyclic.
    pub fn is_quasi_iso(&self) -> bool {
        cone(self).complex.is_acyclic()
    }

    /// Cone cohomology vanishes in all degrees `>= lo`.
    pub fn is_quasi_iso_above(&self, lo: i64) -> bool {
        let c = cone(self).complex;
        match c.term_bounds() {
            None => true,
            Some((_, hi)) => (lo..=hi).all(|k| c.coh_is_zero_at(k)),
        }
    }
}

/// Shifted complex `C[n]` with differential scaled by `(-1)^n`.
pub fn shift(c: &Arc<Complex>, n: i64) -> Arc<Complex> {
    let ring = &c.ring;
    let field = &ring.field;
    let terms = c.terms.iter().map(|(&k, m)| (k - n, m.clone())).collect();
    let sign = if n.rem_euclid(2) == 0 { 1 } else { field.neg(1) };
    let diffs = c
        .diffs
        .iter()
        .map(|(&k, d)| (k - n, d.scale(field, sign)))
        .collect();
    Arc::new(Complex { ring: ring.clone(), terms, diffs })
}

/// Mapping cone data: the cone complex `src[1] (+) tgt`, the inclusion of
/// the target, and the projection to the shifted source.
pub struct ConeData {
    pub complex: Arc<Complex>,
    pub incl_tgt: ChainMap,
    pub proj_src: ChainMap,
}

/// Cone of `f`: degree `k` is `src^{k+1} (+) tgt^k` (source block first),
/// differential `(a, b) |-> (-d a, f a + d b)`.
pub fn cone(f: &ChainMap) -> ConeData {
    let ring = &f.src.ring;
    let field = &ring.field;
    let pot = ring.pot();
    let mut terms: BTreeMap<i64, PresentedModule> = BTreeMap::new();
    let mut degrees: Vec<i64> = Vec::new();
    if let Some((lo, hi)) = f.src.term_bounds() {
        degrees.extend(lo - 1..=hi);
    }
    if let Some((lo, hi)) = f.tgt.term_bounds() {
        degrees.extend(lo..=hi);
    }
    degrees.sort_unstable();
    degrees.dedup();
    for &k in &degrees {
        let a = f.src.term_at(k + 1);
        let b = f.tgt.term_at(k);
        let m = PresentedModule::direct_sum(&a, &b);
        if m.gens > 0 {
            terms.insert(k, m);
        }
    }
    let mut diffs: BTreeMap<i64, Mat> = BTreeMap::new();
    for &k in &degrees {
        let ga1 = f.src.gens_at(k + 1);
        let gb = f.tgt.gens_at(k);
        let ga2 = f.src.gens_at(k + 2);
        let gb1 = f.tgt.gens_at(k + 1);
        let src_gens = ga1 + gb;
        let tgt_gens = ga2 + gb1;
        if src_gens == 0 || tgt_gens == 0 {
            continue;
        }
        let da = f.src.diff_at(k + 1).neg(field); // into src^{k+2}, block row 0
        let fk = f.map_at(k + 1); // src^{k+1} -> tgt^{k+1}, block row ga2
        let db = f.tgt.diff_at(k); // tgt^k -> tgt^{k+1}
        let mut cols = Vec::with_capacity(src_gens);
        for j in 0..ga1 {
            let top = da.cols[j].clone();
            let bottom = crate::poly::shift_comp(&fk.cols[j], ga2);
            cols.push(add(field, pot, &top, &bottom));
        }
        for j in 0..gb {
            cols.push(crate::poly::shift_comp(&db.cols[j], ga2));
        }
        let d = Mat { rows: tgt_gens, cols };
        if !d.is_zero() {
            diffs.insert(k, d);
        }
    }
    let complex = Complex::new(ring.clone(), terms, diffs).expect("cone must be a complex");
    // Inclusion of the target: b |-> (0, b).
    let mut incl_maps = BTreeMap::new();
    for (&k, m) in &f.tgt.terms {
        let ga1 = f.src.gens_at(k + 1);
        let mat = Mat {
            rows: ga1 + m.gens,
            cols: (0..m.gens).map(|i| Vect::term(ga1 + i, 1, vec![0; ring.nvars()])).collect(),
        };
        incl_maps.insert(k, mat);
    }
    let incl_tgt = ChainMap::new(f.tgt.clone(), complex.clone(), incl_maps)
        .expect("cone inclusion must be a chain map");
    // Projection to src[1]: (a, b) |-> a.
    let shifted_src = shift(&f.src, 1);
    let mut proj_maps = BTreeMap::new();
    for (&k, m) in &complex.terms {
        let ga1 = f.src.gens_at(k + 1);
        if ga1 == 0 {
            continue;
        }
        let mat = Mat {
            rows: ga1,
            cols: (0..m.gens)
                .map(|i| {
                    if i < ga1 {
                        Vect::term(i, 1, vec![0; ring.nvars()])
                    } else {
                        Vect::zero()
                    }
                })
                .collect(),
        };
        proj_maps.insert(k, mat);
    }
    let proj_src = ChainMap::new(complex.clone(), shifted_src, proj_maps)
        .expect("cone projection must be a chain map");
    ConeData { complex, incl_tgt, proj_src }
}

/// Direct sum with its four structure maps.
pub struct SumData {
    pub complex: Arc<Complex>,
    pub incl_a: ChainMap,
    pub incl_b: ChainMap,
    pub proj_a: ChainMap,
    pub proj_b: ChainMap,
}

pub fn direct_sum(a: &Arc<Complex>, b: &Arc<Complex>) -> SumData {
    let ring = &a.ring;
    assert_eq!(*ring, b.ring);
    let mut degrees: Vec<i64> = a.terms.keys().chain(b.terms.keys()).cloned().collect();
    degrees.sort_unstable();
    degrees.dedup();
    let mut terms = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    for &k in &degrees {
        let m = PresentedModule::direct_sum(&a.term_at(k), &b.term_at(k));
        if m.gens > 0 {
            terms.insert(k, m);
        }
    }
    for &k in &degrees {
        let d = a.diff_at(k).block_diag(&b.diff_at(k));
        if !d.is_zero() {
            diffs.insert(k, d);
        }
    }
    let complex = Complex::new(ring.clone(), terms, diffs).expect("sum must be a complex");
    let nv = ring.nvars();
    let mut ia = BTreeMap::new();
    let mut ib = BTreeMap::new();
    let mut pa = BTreeMap::new();
    let mut pb = BTreeMap::new();
    for &k in &degrees {
        let ga = a.gens_at(k);
        let gb = b.gens_at(k);
        if ga + gb == 0 {
            continue;
        }
        if ga > 0 {
            ia.insert(
                k,
                Mat { rows: ga + gb, cols: (0..ga).map(|i| Vect::term(i, 1, vec![0; nv])).collect() },
            );
            pa.insert(
                k,
                Mat {
                    rows: ga,
                    cols: (0..ga + gb)
                        .map(|i| if i < ga { Vect::term(i, 1, vec![0; nv]) } else { Vect::zero() })
                        .collect(),
                },
            );
        }
        if gb > 0 {
            ib.insert(
                k,
                Mat {
                    rows: ga + gb,
                    cols: (0..gb).map(|i| Vect::term(ga + i, 1, vec![0; nv])).collect(),
                },
            );
            pb.insert(
                k,
                Mat {
                    rows: gb,
                    cols: (0..ga + gb)
                        .map(|i| {
                            if i >= ga {
                                Vect::term(i - ga, 1, vec![0; nv])
                            } else {
                                Vect::zero()
                            }
                        })
                        .collect(),
                },
            );
        }
    }
    SumData {
        complex: complex.clone(),
        incl_a: ChainMap::new(a.clone(), complex.clone(), ia).expect("sum inclusion"),
        incl_b: ChainMap::new(b.clone(), complex.clone(), ib).expect("sum inclusion"),
        proj_a: ChainMap::new(complex.clone(), a.clone(), pa).expect("sum projection"),
        proj_b: ChainMap::new(complex, b.clone(), pb).expect("sum projection"),
    }
}

/// Pairs two maps out of the same source into a sum: `x |-> (f x, g x)`.
pub fn pair_into_sum(f: &ChainMap, g: &ChainMap, sum: &SumData) -> Result<ChainMap> {
    let with_a = sum.incl_a.compose(f);
    let with_b = sum.incl_b.compose(g);
    let ring = &f.src.ring;
    let field = &ring.field;
    let pot = ring.pot();
    let mut maps = BTreeMap::new();
    for k in with_a.maps.keys().chain(with_b.maps.keys()) {
        let m = with_a.map_at(*k).add(field, pot, &with_b.map_at(*k));
        if !m.is_zero() {
            maps.insert(*k, m);
        }
    }
    ChainMap::new(f.src.clone(), sum.complex.clone(), maps)
}

/// Smart truncation `tau_{<=n}` with its inclusion into the complex.
pub fn tau_le(c: &Arc<Complex>, n: i64) -> (Arc<Complex>, ChainMap) {
    let ring = &c.ring;
    let mut terms: BTreeMap<i64, PresentedModule> = BTreeMap::new();
    let mut diffs: BTreeMap<i64, Mat> = BTreeMap::new();
    let mut incl: BTreeMap<i64, Mat> = BTreeMap::new();
    for (&k, m) in &c.terms {
        if k < n {
            terms.insert(k, m.clone());
            incl.insert(k, Mat::identity(m.gens, ring.nvars()));
        }
    }
    for (&k, d) in &c.diffs {
        if k + 1 < n {
            diffs.insert(k, d.clone());
        }
    }
    // Kernel term at degree n.
    let g = c.gens_at(n);
    if g > 0 {
        let kgens = c.kernel_gens(n);
        if !kgens.is_empty() {
            let sub = submodule_presentation(&c.term_at(n), &kgens);
            let kmat = Mat { rows: g, cols: kgens.clone() };
            // Factor the incoming differential through the kernel basis.
            let d_in = c.diff_at(n - 1);
            if !d_in.is_zero() {
                let mut through = kgens.clone();
                through.extend(c.term_at(n).rels.cols.iter().cloned());
                let basis = rgb(ring, ModOrder::pot(ring.order), g, &through, true);
                let mut cols = Vec::with_capacity(d_in.ncols());
                for col in &d_in.cols {
                    let lifted = basis
                        .lift(col)
                        .expect("incoming differential lands in the kernel");
                    cols.push(crate::poly::join_comps(
                        &ring.field,
                        ring.pot(),
                        &lifted[..kgens.len()],
                    ));
                }
                diffs.insert(n - 1, Mat { rows: kgens.len(), cols });
            }
            terms.insert(n, sub);
            incl.insert(n, kmat);
        }
    }
    let t = Complex::new(ring.clone(), terms, diffs).expect("truncation must be a complex");
    let map = ChainMap::new(t.clone(), Arc::clone(c), incl)
        .expect("truncation inclusion must be a chain map");
    (t, map)
}

/// Smart truncation `tau_{>=n}` with the projection from the complex.
pub fn tau_ge(c: &Arc<Complex>, n: i64) -> (Arc<Complex>, ChainMap) {
    let ring = &c.ring;
    let mut terms: BTreeMap<i64, PresentedModule> = BTreeMap::new();
    let mut diffs: BTreeMap<i64, Mat> = BTreeMap::new();
    let mut proj: BTreeMap<i64, Mat> = BTreeMap::new();
    for (&k, m) in &c.terms {
        if k > n {
            terms.insert(k, m.clone());
            proj.insert(k, Mat::identity(m.gens, ring.nvars()));
        }
    }
    for (&k, d) in &c.diffs {
        if k > n {
            diffs.insert(k, d.clone());
        }
    }
    let g = c.gens_at(n);
    if g > 0 {
        // Cokernel presentation of the incoming differential.
        let mut rels = c.term_at(n).rels.cols.clone();
        rels.extend(c.diff_at(n - 1).cols.iter().cloned());
        let m = PresentedModule::new(ring.clone(), g, Mat { rows: g, cols: rels })
            .expect("cokernel presentation");
        if !m.is_zero_module() {
            let d_out = c.diff_at(n);
            if !d_out.is_zero() {
                diffs.insert(n, d_out);
            }
            terms.insert(n, m);
            proj.insert(n, Mat::identity(g, ring.nvars()));
        }
    }
    let t = Complex::new(ring.clone(), terms, diffs).expect("truncation must be a complex");
    let map = ChainMap::new(Arc::clone(c), t.clone(), proj)
        .expect("truncation projection must be a chain map");
    (t, map)
}

/// Sharp bottom cut: the subcomplex of degrees `>= n`, with its inclusion.
pub fn sigma_ge(c: &Arc<Complex>, n: i64) -> (Arc<Complex>, ChainMap) {
    let ring = &c.ring;
    let terms: BTreeMap<i64, PresentedModule> =
        c.terms.iter().filter(|(&k, _)| k >= n).map(|(&k, m)| (k, m.clone())).collect();
    let diffs: BTreeMap<i64, Mat> =
        c.diffs.iter().filter(|(&k, _)| k >= n).map(|(&k, d)| (k, d.clone())).collect();
    let t = Complex::new(ring.clone(), terms, diffs).expect("sharp cut must be a complex");
    let incl: BTreeMap<i64, Mat> = t
        .terms
        .iter()
        .map(|(&k, m)| (k, Mat::identity(m.gens, ring.nvars())))
        .collect();
    let map =
        ChainMap::new(t.clone(), Arc::clone(c), incl).expect("sharp cut inclusion is a chain map");
    (t, map)
}

/// Factors `f: X -> Y` through the inclusion `tau_{<=n} Y -> Y`, provided
/// `X` has no generators above degree `n`.
pub fn factor_into_tau_le(
    t: &Arc<Complex>,
    incl: &ChainMap,
    n: i64,
    f: &ChainMap,
) -> Result<ChainMap> {
    assert_eq!(*incl.src, **t);
    assert_eq!(*incl.tgt, *f.tgt);
    let ring = &f.src.ring;
    if let Some((_, hi)) = f.src.term_bounds() {
        if hi > n {
            return Err(Error::Internal(format!(
                "cannot factor through a truncation at {n}: source has terms up to {hi}"
            )));
        }
    }
    let mut maps: BTreeMap<i64, Mat> = BTreeMap::new();
    for (&k, m) in &f.maps {
        if m.is_zero() {
            continue;
        }
        if k < n {
            maps.insert(k, m.clone());
            continue;
        }
        // At the cut degree, express each column over the kernel basis.
        let kmat = incl.map_at(n);
        let y_gens = f.tgt.gens_at(n);
        let mut through = kmat.cols.clone();
        through.extend(f.tgt.term_at(n).rels.cols.iter().cloned());
        let basis = rgb(ring, ModOrder::pot(ring.order), y_gens, &through, true);
        let mut cols = Vec::with_capacity(m.ncols());
        for col in &m.cols {
            let lifted = basis.lift(col).ok_or_else(|| {
                Error::Internal(format!(
                    "map does not land in the degree-{n} kernel of the truncation target"
                ))
            })?;
            cols.push(crate::poly::join_comps(
                &ring.field,
                ring.pot(),
                &lifted[..kmat.ncols()],
            ));
        }
        maps.insert(k, Mat { rows: kmat.ncols(), cols });
    }
    ChainMap::new(f.src.clone(), Arc::clone(t), maps)
}

/// Prunes every term, transporting the differentials; returns strict chain
/// isomorphisms both ways.
pub fn prune_complex(c: &Arc<Complex>) -> (Arc<Complex>, ChainMap, ChainMap) {
    let ring = &c.ring;
    let field = &ring.field;
    let pot = ring.pot();
    let mut pruned: BTreeMap<i64, (PresentedModule, ModuleMap, ModuleMap)> = BTreeMap::new();
    for (&k, m) in &c.terms {
        pruned.insert(k, crate::module::prune(m));
    }
    let mut terms = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    let mut to_maps = BTreeMap::new();
    let mut from_maps = BTreeMap::new();
    for (&k, (pm, to, from)) in &pruned {
        if pm.gens > 0 {
            terms.insert(k, pm.clone());
            to_maps.insert(k, to.mat.clone());
            from_maps.insert(k, from.mat.clone());
        }
        let d = c.diff_at(k);
        if let Some((next, _, _)) = pruned.get(&(k + 1)).map(|x| (&x.1, 0, 0)) {
            let transported = next.mat.compose(field, pot, &d.compose(field, pot, &from.mat));
            if !transported.is_zero() {
                diffs.insert(k, transported);
            }
        }
    }
    let p = Complex::new(ring.clone(), terms, diffs).expect("pruned complex is a complex");
    let to = ChainMap::new(Arc::clone(c), p.clone(), to_maps).expect("prune map");
    let from = ChainMap::new(p.clone(), Arc::clone(c), from_maps).expect("prune inverse map");
    (p, to, from)
}

/// Chain map between single-module complexes.
pub fn chain_map_from_module_map(m: &ModuleMap, degree: i64) -> ChainMap {
    let src = Complex::from_module(&m.src, degree);
    let tgt = Complex::from_module(&m.tgt, degree);
    let mut maps = BTreeMap::new();
    if m.src.gens > 0 && m.tgt.gens > 0 && !m.mat.is_zero() {
        maps.insert(degree, m.mat.clone());
    }
    ChainMap::new(src, tgt, maps).expect("module map is a chain map in one degree")
}

const _: fn(&crate::field::Field, crate::monomial::ModOrder, &Vect, &Vect) -> Vect = sub;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::MonoOrder;

    fn ring_xy() -> Arc<Ring> {
        Ring::polynomial(32003, vec!["x".into(), "y".into()], MonoOrder::GrevLex).unwrap()
    }

    /// Koszul complex of (x, y): R -> R^2 -> R in degrees -2, -1, 0.
    fn koszul_xy(r: &Arc<Ring>) -> Arc<Complex> {
        let field = &r.field;
        let pot = r.pot();
        let mut terms = BTreeMap::new();
        terms.insert(-2, PresentedModule::free(r, 1));
        terms.insert(-1, PresentedModule::free(r, 2));
        terms.insert(0, PresentedModule::free(r, 1));
        let d2 = Mat {
            rows: 2,
            cols: vec![add(
                field,
                pot,
                &Vect::term(0, field.neg(1), vec![0, 1]),
                &Vect::term(1, 1, vec![1, 0]),
            )],
        };
        let d1 = Mat {
            rows: 1,
            cols: vec![Vect::term(0, 1, vec![1, 0]), Vect::term(0, 1, vec![0, 1])],
        };
        let mut diffs = BTreeMap::new();
        diffs.insert(-2, d2);
        diffs.insert(-1, d1);
        Complex::new(r.clone(), terms, diffs).unwrap()
    }

    #[test]
    fn koszul_cohomology() {
        let r = ring_xy();
        let c = koszul_xy(&r);
        assert_eq!(c.coh_support(), vec![0]);
        let h0 = c.cohomology(0);
        let (p, _, _) = crate::module::prune(&h0);
        assert_eq!(p.gens, 1);
        // H^0 = R/(x, y).
        assert!(p.element_is_zero(&r.parse_poly("x", 1).unwrap()));
        assert!(p.element_is_zero(&r.parse_poly("y", 1).unwrap()));
        assert!(!p.element_is_zero(&r.parse_poly("1", 1).unwrap()));
    }

    #[test]
    fn bad_differential_rejected() {
        let r = ring_xy();
        let mut terms = BTreeMap::new();
        terms.insert(0, PresentedModule::free(&r, 1));
        terms.insert(1, PresentedModule::free(&r, 1));
        terms.insert(2, PresentedModule::free(&r, 1));
        let one = Mat { rows: 1, cols: vec![Vect::term(0, 1, vec![0, 0])] };
        let mut diffs = BTreeMap::new();
        diffs.insert(0, one.clone());
        diffs.insert(1, one);
        assert!(Complex::new(r, terms, diffs).is_err());
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let r = ring_xy();
        let c = koszul_xy(&r);
        let id = ChainMap::identity(&c);
        let cd = cone(&id);
        assert!(cd.complex.is_acyclic());
        assert!(id.is_quasi_iso());
    }

    #[test]
    fn shift_moves_cohomology() {
        let r = ring_xy();
        let c = koszul_xy(&r);
        let s = shift(&c, 1);
        assert_eq!(s.coh_support(), vec![-1]);
        // Shift twice restores signs and degrees shift additively.
        let s2 = shift(&s, -1);
        assert_eq!(*s2, *c);
    }

    #[test]
    fn truncations_cut_correctly() {
        let r = ring_xy();
        // Two-term complex R --x--> R in degrees 0, 1:
        // H^0 = 0, H^1 = R/(x).
        let mut terms = BTreeMap::new();
        terms.insert(0, PresentedModule::free(&r, 1));
        terms.insert(1, PresentedModule::free(&r, 1));
        let mut diffs = BTreeMap::new();
        diffs.insert(0, Mat { rows: 1, cols: vec![Vect::term(0, 1, vec![1, 0])] });
        let c = Complex::new(r.clone(), terms, diffs).unwrap();
        assert_eq!(c.coh_support(), vec![1]);

        let (below, incl) = tau_le(&c, 0);
        assert!(below.is_acyclic());
        assert!(incl.maps.len() <= 1);

        let (above, proj) = tau_ge(&c, 1);
        assert_eq!(above.coh_support(), vec![1]);
        assert!(proj.is_quasi_iso());

        let (at_zero, _) = tau_le(&c, 1);
        assert!(ChainMap::new(at_zero.clone(), c.clone(), {
            let mut m = BTreeMap::new();
            for (&k, t) in &at_zero.terms {
                m.insert(k, Mat::identity(t.gens, 2));
            }
            m
        })
        .is_ok());
    }

    #[test]
    fn prune_complex_roundtrip() {
        let r = ring_xy();
        // Presentation with a unit relation in degree 0.
        let rels = Mat {
            rows: 2,
            cols: vec![sub(
                &r.field,
                r.pot(),
                &Vect::term(0, 1, vec![0, 0]),
                &Vect::term(1, 1, vec![1, 0]),
            )],
        };
        let m = PresentedModule::new(r.clone(), 2, rels).unwrap();
        let c = Complex::from_module(&m, 0);
        let (p, to, from) = prune_complex(&c);
        assert_eq!(p.gens_at(0), 1);
        assert!(to.is_quasi_iso());
        assert!(from.is_quasi_iso());
    }

    #[test]
    fn direct_sum_structure() {
        let r = ring_xy();
        let a = Complex::from_module(&PresentedModule::free(&r, 1), 0);
        let b = Complex::from_module(
            &PresentedModule::quotient_by_ideal(&r, &[r.parse_poly("x", 1).unwrap()]),
            -1,
        );
        let s = direct_sum(&a, &b);
        assert_eq!(s.complex.gens_at(0), 1);
        assert_eq!(s.complex.gens_at(-1), 1);
        let back = s.proj_a.compose(&s.incl_a);
        // proj_a . incl_a = identity on a.
        for (&k, m) in &back.maps {
            assert_eq!(m.rows, a.gens_at(k));
        }
    }
}
