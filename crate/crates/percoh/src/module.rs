//! Finitely presented modules `coker(rels: R^a -> R^g)` and maps between
//! them, with kernels, cokernels, annihilators, fiber ranks at declared
//! primes, and presentation pruning that returns the isomorphisms it used.

use crate::error::{Error, Result};
use crate::groebner::{gb, reduce_vect_mod_ideal, rgb, syzygies_over, RGb};
use crate::ideal::{ideal_intersection_many, clean_gens};
use crate::monomial::ModOrder;
use crate::poly::{add, project_comps, scale, split_comps, sub, Mat, Vect};
use crate::ring::Ring;
use std::sync::Arc;

/// A finitely presented module: the cokernel of its relation matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentedModule {
    pub ring: Arc<Ring>,
    pub gens: usize,
    pub rels: Mat,
}

impl PresentedModule {
    /// Validates shape and normalizes relation columns.
    pub fn new(ring: Arc<Ring>, gens: usize, rels: Mat) -> Result<PresentedModule> {
        if rels.rows != gens {
            return Err(Error::Invalid(format!(
                "relation matrix has {} rows but the module has {} generators",
                rels.rows, gens
            )));
        }
        for c in &rels.cols {
            if let Some(mc) = c.max_comp() {
                if mc >= gens {
                    return Err(Error::Invalid(
                        "relation column refers to a generator out of range".into(),
                    ));
                }
            }
        }
        Ok(PresentedModule { ring: Arc::clone(&ring), gens, rels: clean_rels(&ring, gens, &rels) })
    }

    pub fn free(ring: &Arc<Ring>, n: usize) -> PresentedModule {
        PresentedModule { ring: Arc::clone(ring), gens: n, rels: Mat::zero(n, 0) }
    }

    pub fn zero(ring: &Arc<Ring>) -> PresentedModule {
        PresentedModule::free(ring, 0)
    }

    /// The cyclic module `R / (j)`.
    pub fn quotient_by_ideal(ring: &Arc<Ring>, j: &[Vect]) -> PresentedModule {
        let rels = Mat { rows: 1, cols: clean_gens(ring, j) };
        PresentedModule { ring: Arc::clone(ring), gens: 1, rels }
    }

    pub fn is_free_presentation(&self) -> bool {
        self.rels.cols.is_empty()
    }

    /// Basis of the relation span (including ideal columns).
    pub fn rel_basis(&self, transform: bool) -> RGb {
        rgb(&self.ring, ModOrder::pot(self.ring.order), self.gens, &self.rels.cols, transform)
    }

    /// True when the class of `v` is zero.
    pub fn element_is_zero(&self, v: &Vect) -> bool {
        self.rel_basis(false).contains(v)
    }

    pub fn is_zero_module(&self) -> bool {
        if self.gens == 0 {
            return true;
        }
        let basis = self.rel_basis(false);
        (0..self.gens).all(|i| basis.contains(&Vect::term(i, 1, vec![0; self.ring.nvars()])))
    }

    /// Generators of the annihilator ideal.
    pub fn annihilator(&self) -> Vec<Vect> {
        let ring = &self.ring;
        if self.gens == 0 || self.is_zero_module() {
            return vec![Vect::constant(&ring.field, 1, ring.nvars())];
        }
        let mut per_gen: Vec<Vec<Vect>> = Vec::with_capacity(self.gens);
        for i in 0..self.gens {
            let e = Vect::term(i, 1, vec![0; ring.nvars()]);
            let mut cols = vec![e];
            cols.extend(self.rels.cols.iter().cloned());
            let syz = syzygies_over(ring, self.gens, &cols);
            let mut q: Vec<Vect> = Vec::new();
            for s in &syz {
                let c = project_comps(s, 0, 1);
                if !c.is_zero() {
                    q.push(c);
                }
            }
            per_gen.push(clean_gens(ring, &q));
        }
        ideal_intersection_many(ring, &per_gen)
    }

    /// Dimension of `M ⊗ κ(p)` over the residue field of a declared prime;
    /// nonzero exactly when the point lies in the support.
    pub fn fiber_rank(&self, p_gens: &[Vect]) -> Result<usize> {
        if self.gens == 0 {
            return Ok(0);
        }
        let r = matrix_rank_mod_prime(&self.ring, p_gens, &self.rels)?;
        Ok(self.gens - r)
    }

    pub fn supported_at(&self, p_gens: &[Vect]) -> Result<bool> {
        Ok(self.fiber_rank(p_gens)? > 0)
    }

    /// Dimension over the base field when the module has finite length,
    /// counted as the standard monomials of the reduced relation basis;
    /// `None` when some generator direction is unbounded.
    pub fn k_dimension(&self) -> Option<usize> {
        if self.gens == 0 {
            return Some(0);
        }
        let nvars = self.ring.nvars();
        let basis = self.rel_basis(false);
        let mut leads: Vec<Vec<&[u16]>> = vec![Vec::new(); self.gens];
        for e in &basis.sgb.elems {
            let lt = e.lead().expect("basis elements are nonzero");
            leads[lt.comp].push(&lt.mono);
        }
        let mut total = 0usize;
        for per_comp in &leads {
            // Finite length needs a pure power of every variable among the
            // lead monomials of this component.
            let mut bound = vec![0usize; nvars];
            for (j, b) in bound.iter_mut().enumerate() {
                let cap = per_comp
                    .iter()
                    .filter(|m| {
                        m.iter().enumerate().all(|(i, &e)| e == 0 || i == j)
                    })
                    .map(|m| m[j] as usize)
                    .min()?;
                *b = cap;
            }
            let mut stack = vec![vec![0u16; nvars]];
            while let Some(mono) = stack.pop() {
                let standard = per_comp
                    .iter()
                    .all(|lt| !lt.iter().zip(&mono).all(|(&a, &b)| a <= b));
                if !standard {
                    continue;
                }
                total += 1;
                // Extend in the last nonzero position and beyond so each
                // monomial is generated exactly once.
                let start = mono
                    .iter()
                    .rposition(|&e| e > 0)
                    .unwrap_or(0);
                for j in start..nvars {
                    if (mono[j] as usize) + 1 < bound[j] {
                        let mut next = mono.clone();
                        next[j] += 1;
                        stack.push(next);
                    }
                }
            }
        }
        Some(total)
    }

    /// Stable bytes of the canonical presentation (reduced relation basis),
    /// usable for equality certificates between pruned modules.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut key = Vec::new();
        key.extend_from_slice(self.ring.key());
        key.extend_from_slice(&(self.gens as u64).to_le_bytes());
        let basis = self.rel_basis(false);
        for e in &basis.sgb.elems {
            e.key_bytes(&mut key);
        }
        key
    }

    pub fn direct_sum(a: &PresentedModule, b: &PresentedModule) -> PresentedModule {
        assert_eq!(a.ring, b.ring);
        PresentedModule {
            ring: Arc::clone(&a.ring),
            gens: a.gens + b.gens,
            rels: a.rels.block_diag(&b.rels),
        }
    }
}

fn clean_rels(ring: &Arc<Ring>, gens: usize, rels: &Mat) -> Mat {
    let mut cols: Vec<Vect> = Vec::new();
    for c in &rels.cols {
        let n = reduce_vect_mod_ideal(ring, gens, c);
        if !n.is_zero() && !cols.contains(&n) {
            cols.push(n);
        }
    }
    Mat { rows: gens, cols }
}

/// A map of presented modules, validated to send relations into relations.
#[derive(Debug, Clone)]
pub struct ModuleMap {
    pub src: PresentedModule,
    pub tgt: PresentedModule,
    pub mat: Mat,
}

impl ModuleMap {
    pub fn new(src: PresentedModule, tgt: PresentedModule, mat: Mat) -> Result<ModuleMap> {
        assert_eq!(src.ring, tgt.ring);
        if mat.rows != tgt.gens || mat.ncols() != src.gens {
            return Err(Error::Invalid(format!(
                "map shape {}x{} does not match modules with {} and {} generators",
                mat.rows,
                mat.ncols(),
                tgt.gens,
                src.gens
            )));
        }
        let ring = &src.ring;
        let field = &ring.field;
        let pot = ring.pot();
        let basis = tgt.rel_basis(false);
        for r in &src.rels.cols {
            let image = mat.apply(field, pot, r);
            if !basis.contains(&image) {
                return Err(Error::Invalid(
                    "matrix does not send source relations into target relations".into(),
                ));
            }
        }
        Ok(ModuleMap { src, tgt, mat })
    }

    pub fn identity(m: &PresentedModule) -> ModuleMap {
        ModuleMap {
            src: m.clone(),
            tgt: m.clone(),
            mat: Mat::identity(m.gens, m.ring.nvars()),
        }
    }

    pub fn zero(src: &PresentedModule, tgt: &PresentedModule) -> ModuleMap {
        ModuleMap { src: src.clone(), tgt: tgt.clone(), mat: Mat::zero(tgt.gens, src.gens) }
    }

    /// `self . other` (apply `other` first).
    pub fn compose(&self, other: &ModuleMap) -> ModuleMap {
        assert_eq!(other.tgt.gens, self.src.gens);
        let ring = &self.src.ring;
        ModuleMap {
            src: other.src.clone(),
            tgt: self.tgt.clone(),
            mat: self.mat.compose(&ring.field, ring.pot(), &other.mat),
        }
    }

    /// Equality as maps (columns agree modulo target relations).
    pub fn eq_as_maps(&self, other: &ModuleMap) -> bool {
        if self.src.gens != other.src.gens || self.tgt.gens != other.tgt.gens {
            return false;
        }
        let ring = &self.src.ring;
        let basis = self.tgt.rel_basis(false);
        self.mat
            .cols
            .iter()
            .zip(&other.mat.cols)
            .all(|(a, b)| basis.contains(&sub(&ring.field, ring.pot(), a, b)))
    }

    /// Kernel as a presented module plus its inclusion into the source.
    pub fn kernel(&self) -> (PresentedModule, ModuleMap) {
        let ring = &self.src.ring;
        let mut cols = self.mat.cols.clone();
        cols.extend(self.tgt.rels.cols.iter().cloned());
        let syz = syzygies_over(ring, self.tgt.gens, &cols);
        let mut kgens: Vec<Vect> = Vec::new();
        for s in &syz {
            let k = reduce_vect_mod_ideal(ring, self.src.gens, &project_comps(s, 0, self.src.gens));
            if !k.is_zero() && !kgens.contains(&k) {
                kgens.push(k);
            }
        }
        let module = submodule_presentation(&self.src, &kgens);
        let incl = ModuleMap {
            src: module.clone(),
            tgt: self.src.clone(),
            mat: Mat { rows: self.src.gens, cols: kgens },
        };
        (module, incl)
    }

    /// Cokernel plus the projection from the target.
    pub fn cokernel(&self) -> (PresentedModule, ModuleMap) {
        let ring = &self.src.ring;
        let mut cols = self.tgt.rels.cols.clone();
        cols.extend(self.mat.cols.iter().cloned());
        let module = PresentedModule {
            ring: Arc::clone(ring),
            gens: self.tgt.gens,
            rels: clean_rels(ring, self.tgt.gens, &Mat { rows: self.tgt.gens, cols }),
        };
        let proj = ModuleMap {
            src: self.tgt.clone(),
            tgt: module.clone(),
            mat: Mat::identity(self.tgt.gens, ring.nvars()),
        };
        (module, proj)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().0.is_zero_module()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().0.is_zero_module()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_surjective() && self.is_injective()
    }
}

/// Presentation of the subquotient `span(gens_in_src) / rels(src)`: the
/// given vectors become the generators.
pub fn submodule_presentation(src: &PresentedModule, gens_in_src: &[Vect]) -> PresentedModule {
    let ring = &src.ring;
    let mut cols = gens_in_src.to_vec();
    cols.extend(src.rels.cols.iter().cloned());
    let syz = syzygies_over(ring, src.gens, &cols);
    let mut rel_cols: Vec<Vect> = Vec::new();
    for s in &syz {
        let r = reduce_vect_mod_ideal(ring, gens_in_src.len(), &project_comps(s, 0, gens_in_src.len()));
        if !r.is_zero() && !rel_cols.contains(&r) {
            rel_cols.push(r);
        }
    }
    PresentedModule {
        ring: Arc::clone(ring),
        gens: gens_in_src.len(),
        rels: Mat { rows: gens_in_src.len(), cols: rel_cols },
    }
}

/// Rank of a matrix over the fraction field of `ring/(p)`, by fraction-free
/// elimination with exact zero tests. Detects zero divisors (a witness that
/// the declared point is not prime) and refuses to answer in that case.
pub fn matrix_rank_mod_prime(ring: &Arc<Ring>, p_gens: &[Vect], mat: &Mat) -> Result<usize> {
    let ambient = ring.ambient();
    let mut mod_gens = p_gens.to_vec();
    mod_gens.extend(ring.ideal.iter().cloned());
    let basis = gb(&ambient, ModOrder::pot(ambient.order), 1, &mod_gens, false);
    let nf = |v: &Vect| crate::groebner::normal_form(&basis, v);
    let field = &ring.field;
    let pot = ring.pot();

    let mut rows: Vec<Vec<Vect>> = (0..mat.rows)
        .map(|i| (0..mat.ncols()).map(|j| nf(&mat.entry(i, j))).collect())
        .collect();
    let ncols = mat.ncols();
    let mut rank = 0usize;
    for col in 0..ncols {
        // Deterministic pivot: first remaining row with a nonzero entry.
        let pivot = (rank..rows.len()).find(|&i| !rows[i][col].is_zero());
        let Some(p) = pivot else { continue };
        rows.swap(rank, p);
        let pivot_entry = rows[rank][col].clone();
        for i in (rank + 1)..rows.len() {
            if rows[i][col].is_zero() {
                continue;
            }
            let factor = rows[i][col].clone();
            // Zero-divisor sentinel: nonzero * nonzero must stay nonzero in
            // a domain.
            let probe = nf(&crate::poly::mul_poly(field, pot, &pivot_entry, &factor));
            if probe.is_zero() {
                return Err(Error::Invalid(format!(
                    "declared point is not prime: {} * {} vanishes modulo it",
                    ring.poly_string(&pivot_entry),
                    ring.poly_string(&factor)
                )));
            }
            for j in col..ncols {
                let a = crate::poly::mul_poly(field, pot, &pivot_entry, &rows[i][j]);
                let b = crate::poly::mul_poly(field, pot, &factor, &rows[rank][j]);
                rows[i][j] = nf(&sub(field, pot, &a, &b));
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    Ok(rank)
}

/// Removes unit-pivot relations, returning the pruned module together with
/// the mutually inverse maps `to: M -> M'` and `from: M' -> M`.
pub fn prune(m: &PresentedModule) -> (PresentedModule, ModuleMap, ModuleMap) {
    let ring = m.ring.clone();
    let field = ring.field;
    let pot = ring.pot();
    let nvars = ring.nvars();

    let mut gens = m.gens;
    let mut rels: Vec<Vect> = m.rels.cols.clone();
    let mut to = Mat::identity(m.gens, nvars);
    let mut from = Mat::identity(m.gens, nvars);

    loop {
        rels = rels
            .iter()
            .map(|c| reduce_vect_mod_ideal(&ring, gens, c))
            .filter(|c| !c.is_zero())
            .collect();
        rels.dedup();
        // Find a relation with a unit (constant) coefficient.
        let mut found: Option<(usize, usize, u32)> = None;
        'search: for (j, c) in rels.iter().enumerate() {
            for t in &c.terms {
                if t.mono.iter().all(|&e| e == 0) {
                    found = Some((j, t.comp, t.coef));
                    break 'search;
                }
            }
        }
        let Some((j, i, coef)) = found else { break };
        let col = rels.remove(j);
        // e_i = -c^{-1} (col - c e_i)
        let e_i = Vect::term(i, 1, vec![0; nvars]);
        let tail = sub(&field, pot, &col, &scale(&field, &e_i, coef));
        let subst = scale(&field, &tail, field.neg(field.inv(coef)));
        // proj: R^gens -> R^(gens-1) dropping slot i, substituting for e_i.
        let reindex = |v: &Vect| -> Vect {
            let mut out = Vect::zero();
            for t in &v.terms {
                let part = Vect { terms: vec![t.clone()] };
                if t.comp == i {
                    let expanded = crate::poly::mul_term(&field, &subst, t.coef, &t.mono);
                    out = add(&field, pot, &out, &drop_slot(&expanded, i));
                } else {
                    out = add(&field, pot, &out, &drop_slot(&part, i));
                }
            }
            out
        };
        let proj = Mat {
            rows: gens - 1,
            cols: (0..gens)
                .map(|k| reindex(&Vect::term(k, 1, vec![0; nvars])))
                .collect(),
        };
        let inj = Mat {
            rows: gens,
            cols: (0..gens).filter(|&k| k != i).map(|k| Vect::term(k, 1, vec![0; nvars])).collect(),
        };
        rels = rels.iter().map(|c| reindex(c)).collect();
        to = proj.compose(&field, pot, &to);
        from = from.compose(&field, pot, &inj);
        gens -= 1;
    }

    let pruned = PresentedModule {
        ring: Arc::clone(&ring),
        gens,
        rels: clean_rels(&ring, gens, &Mat { rows: gens, cols: rels }),
    };
    let to_map = ModuleMap { src: m.clone(), tgt: pruned.clone(), mat: to };
    let from_map = ModuleMap { src: pruned.clone(), tgt: m.clone(), mat: from };
    (pruned, to_map, from_map)
}

fn drop_slot(v: &Vect, slot: usize) -> Vect {
    Vect {
        terms: v
            .terms
            .iter()
            .map(|t| {
                debug_assert_ne!(t.comp, slot);
                crate::poly::MTerm {
                    comp: if t.comp > slot { t.comp - 1 } else { t.comp },
                    coef: t.coef,
                    mono: t.mono.clone(),
                }
            })
            .collect(),
    }
}

/// Convenience: reduce a vector modulo only the defining ideal.
pub fn vect_mod_ideal(ring: &Arc<Ring>, gens: usize, v: &Vect) -> Vect {
    reduce_vect_mod_ideal(ring, gens, v)
}

/// Renders the class of each generator column, for reports.
pub fn columns_strings(ring: &Ring, m: &Mat) -> Vec<Vec<String>> {
    m.cols
        .iter()
        .map(|c| {
            split_comps(c, m.rows)
                .iter()
                .map(|p| ring.poly_string(p))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::make_quotient;
    use crate::monomial::MonoOrder;

    fn ring_xy() -> Arc<Ring> {
        Ring::polynomial(32003, vec!["x".into(), "y".into()], MonoOrder::GrevLex).unwrap()
    }

    fn nilcone() -> Arc<Ring> {
        let amb = Ring::polynomial(
            32003,
            vec!["x".into(), "y".into(), "z".into()],
            MonoOrder::GrevLex,
        )
        .unwrap();
        make_quotient(&amb, vec![amb.parse_poly("x*y - z^2", 1).unwrap()]).unwrap()
    }

    #[test]
    fn residue_field_shape() {
        let r = ring_xy();
        let k = PresentedModule::quotient_by_ideal(
            &r,
            &[r.parse_poly("x", 1).unwrap(), r.parse_poly("y", 1).unwrap()],
        );
        assert!(!k.is_zero_module());
        assert!(k.element_is_zero(&r.parse_poly("3*x + y", 1).unwrap()));
        assert!(!k.element_is_zero(&r.parse_poly("5", 1).unwrap()));
        let ann = k.annihilator();
        assert!(crate::ideal::ideal_eq(
            &r,
            &ann,
            &[r.parse_poly("x", 1).unwrap(), r.parse_poly("y", 1).unwrap()]
        ));
    }

    #[test]
    fn kernel_of_multiplication() {
        // x: R/(xy) -> R/(xy) has kernel generated by y.
        let r = ring_xy();
        let m = PresentedModule::quotient_by_ideal(&r, &[r.parse_poly("x*y", 1).unwrap()]);
        let mul_x = ModuleMap::new(
            m.clone(),
            m.clone(),
            Mat { rows: 1, cols: vec![r.parse_poly("x", 1).unwrap()] },
        )
        .unwrap();
        let (ker, incl) = mul_x.kernel();
        assert!(!ker.is_zero_module());
        // The kernel is the class of y, i.e. (y)/(xy) = R/(x) as a module.
        let (pruned, _, _) = prune(&ker);
        assert_eq!(pruned.gens, 1);
        assert!(incl.mat.cols.iter().any(|c| !c.is_zero()));
        let (coker, _) = mul_x.cokernel();
        assert!(!coker.is_zero_module());
    }

    #[test]
    fn fiber_ranks_detect_support() {
        let q = nilcone();
        // M = Q/(x) is supported on V(x) = {(x, z)} and not at the generic point.
        let m = PresentedModule::quotient_by_ideal(&q, &[q.parse_poly("x", 1).unwrap()]);
        let generic: Vec<Vect> = vec![];
        let vxz = vec![q.parse_poly("x", 1).unwrap(), q.parse_poly("z", 1).unwrap()];
        assert!(!m.supported_at(&generic).unwrap());
        assert!(m.supported_at(&vxz).unwrap());
        // Free rank-1 module has fiber rank 1 everywhere.
        let f = PresentedModule::free(&q, 1);
        assert_eq!(f.fiber_rank(&generic).unwrap(), 1);
        assert_eq!(f.fiber_rank(&vxz).unwrap(), 1);
    }

    #[test]
    fn non_prime_point_detected() {
        let r = ring_xy();
        let m = PresentedModule::free(&r, 2);
        // (xy) is not prime: x * y = 0 mod it. Build a matrix whose
        // elimination multiplies x-ish and y-ish pivots.
        let mat = Mat {
            rows: 2,
            cols: vec![
                add(
                    &r.field,
                    r.pot(),
                    &Vect::term(0, 1, vec![1, 0]),
                    &Vect::term(1, 1, vec![0, 1]),
                ),
                Vect::term(1, 1, vec![0, 1]),
            ],
        };
        let module = PresentedModule { ring: r.clone(), gens: 2, rels: mat };
        let p = vec![r.parse_poly("x*y", 1).unwrap()];
        let err = module.fiber_rank(&p);
        assert!(matches!(err, Err(Error::Invalid(_))), "zero divisor must be flagged");
        let _ = m;
    }

    #[test]
    fn prune_eliminates_unit_relations() {
        let r = ring_xy();
        // gens e0, e1 with relation e0 - x e1: isomorphic to free rank 1.
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
        let (pruned, to, from) = prune(&m);
        assert_eq!(pruned.gens, 1);
        assert!(pruned.rels.cols.is_empty());
        // to . from = identity on the pruned side.
        let round = to.compose(&from);
        assert!(round.eq_as_maps(&ModuleMap::identity(&pruned)));
        // from . to = identity modulo relations.
        let back = from.compose(&to);
        assert!(back.eq_as_maps(&ModuleMap::identity(&m)));
        // Both directions are honest module maps.
        assert!(ModuleMap::new(m.clone(), pruned.clone(), to.mat.clone()).is_ok());
        assert!(ModuleMap::new(pruned, m, from.mat.clone()).is_ok());
    }
}
