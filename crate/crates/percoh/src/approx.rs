//! Free approximations of bounded complexes and the strict lifting they
//! support, plus Hom-complexes out of termwise-free complexes.
//!
//! For a bounded complex `C` and a depth `lo`, `free_approx` builds a
//! termwise-free complex `P` on degrees `[lo, top]` with a termwise
//! surjective chain map `eps: P -> C` that is an isomorphism on cohomology
//! in degrees `> lo` and surjective at `lo`. Each degree of `P` is presented
//! by generators of the solution module
//! `W^k = {(u, c) : delta u = 0, eps u = d c modulo relations}`, so any
//! chain map from a termwise-free complex into `C` lifts through `eps`
//! strictly — membership certificates exist by construction and are found
//! by basis lifting, not homotopy search.

use crate::complex::{ChainMap, Complex};
use crate::error::{Error, Result};
use crate::groebner::{rgb, syzygies_over};
use crate::module::PresentedModule;
use crate::monomial::ModOrder;
use crate::poly::{add, join_comps, project_comps, shift_comp, Mat, Vect};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A free approximation of a target complex.
#[derive(Debug, Clone)]
pub struct FreeApprox {
    pub target: Arc<Complex>,
    /// Deepest constructed degree; cohomology is certified above it.
    pub lo: i64,
    /// The termwise-free complex `P`.
    pub complex: Arc<Complex>,
    /// The comparison map `P -> target`.
    pub eps: ChainMap,
    /// Generators of the solution module per degree, aligned with the
    /// generators of `P` there; empty when the identity fast path applies.
    wgens: BTreeMap<i64, Vec<Vect>>,
    identity: bool,
}

/// Builds the approximation down to degree `lo`.
pub fn free_approx(c: &Arc<Complex>, lo: i64) -> Result<FreeApprox> {
    let ring = &c.ring;
    // Fast path: a termwise-free complex approximates itself.
    if c.is_termwise_free() {
        return Ok(FreeApprox {
            target: Arc::clone(c),
            lo: c.term_bounds().map(|(b, _)| b.min(lo)).unwrap_or(lo),
            complex: Arc::clone(c),
            eps: ChainMap::identity(c),
            wgens: BTreeMap::new(),
            identity: true,
        });
    }
    let Some((_, top)) = c.term_bounds() else {
        return Ok(FreeApprox {
            target: Arc::clone(c),
            lo,
            complex: Complex::zero(ring),
            eps: ChainMap::zero(&Complex::zero(ring), c),
            wgens: BTreeMap::new(),
            identity: true,
        });
    };
    if lo > top {
        return Err(Error::Internal(format!(
            "approximation window starts at {lo}, above the top degree {top}"
        )));
    }

    let field = &ring.field;
    let pot = ring.pot();
    let mut wgens: BTreeMap<i64, Vec<Vect>> = BTreeMap::new();
    let mut m: BTreeMap<i64, usize> = BTreeMap::new(); // ranks of P
    let mut delta: BTreeMap<i64, Mat> = BTreeMap::new();
    let mut eps_mats: BTreeMap<i64, Mat> = BTreeMap::new();

    for k in (lo..=top).rev() {
        let m_next = *m.get(&(k + 1)).unwrap_or(&0);
        let m_next2 = *m.get(&(k + 2)).unwrap_or(&0);
        let g_k = c.gens_at(k);
        let g_next = c.gens_at(k + 1);
        let delta_next = delta.get(&(k + 1)).cloned().unwrap_or_else(|| Mat::zero(m_next2, m_next));
        let eps_next = eps_mats.get(&(k + 1)).cloned().unwrap_or_else(|| Mat::zero(g_next, m_next));
        let d_k = c.diff_at(k);
        let rels_next = c.term_at(k + 1).rels;

        // Solution columns in R^{m_next2 + g_next}, unknowns (u, c, t).
        let rows = m_next2 + g_next;
        let mut cols: Vec<Vect> = Vec::new();
        for j in 0..m_next {
            let top_part = delta_next.cols[j].clone();
            let bot_part = shift_comp(&eps_next.cols[j], m_next2);
            cols.push(add(field, pot, &top_part, &bot_part));
        }
        for j in 0..g_k {
            let v = shift_comp(&d_k.cols[j], m_next2);
            cols.push(crate::poly::neg(field, &v));
        }
        for rel in &rels_next.cols {
            let v = shift_comp(rel, m_next2);
            cols.push(crate::poly::neg(field, &v));
        }
        let syz = syzygies_over(ring, rows, &cols);
        let mut w: Vec<Vect> = Vec::new();
        for s in &syz {
            let uc = project_comps(s, 0, m_next + g_k);
            let uc = crate::groebner::reduce_vect_mod_ideal(ring, m_next + g_k, &uc);
            if !uc.is_zero() && !w.contains(&uc) {
                w.push(uc);
            }
        }
        let mk = w.len();
        let mut delta_cols = Vec::with_capacity(mk);
        let mut eps_cols = Vec::with_capacity(mk);
        for v in &w {
            delta_cols.push(project_comps(v, 0, m_next));
            eps_cols.push(project_comps(v, m_next, m_next + g_k));
        }
        m.insert(k, mk);
        delta.insert(k, Mat { rows: m_next, cols: delta_cols });
        eps_mats.insert(k, Mat { rows: g_k, cols: eps_cols });
        wgens.insert(k, w);
    }

    let mut terms = BTreeMap::new();
    for (&k, &mk) in &m {
        if mk > 0 {
            terms.insert(k, PresentedModule::free(ring, mk));
        }
    }
    let mut diffs = BTreeMap::new();
    for (&k, d) in &delta {
        if !d.is_zero() {
            diffs.insert(k, d.clone());
        }
    }
    let p = Complex::new(ring.clone(), terms, diffs)?;
    let eps_map = ChainMap::new(
        Arc::clone(&p),
        Arc::clone(c),
        eps_mats.into_iter().filter(|(_, m)| !m.is_zero()).collect(),
    )?;
    Ok(FreeApprox { target: Arc::clone(c), lo, complex: p, eps: eps_map, wgens, identity: false })
}

impl FreeApprox {
    /// Lifts `g: X -> target` (with `X` termwise free) strictly through
    /// `eps`, returning `h: X -> P` with `eps . h = g` degreewise.
    pub fn lift_into(&self, g: &ChainMap) -> Result<ChainMap> {
        assert_eq!(*g.tgt, *self.target, "lift target mismatch");
        if !g.src.is_termwise_free() {
            return Err(Error::Internal("lift source must be termwise free".into()));
        }
        if self.identity {
            return ChainMap::new(g.src.clone(), self.complex.clone(), g.maps.clone());
        }
        let ring = &self.target.ring;
        let field = &ring.field;
        let pot = ring.pot();
        let Some((x_lo, x_hi)) = g.src.term_bounds() else {
            return Ok(ChainMap::zero(&g.src, &self.complex));
        };
        if x_lo < self.lo {
            return Err(Error::Internal(format!(
                "approximation window [{}..] too shallow for a source reaching {}",
                self.lo, x_lo
            )));
        }
        let mut maps: BTreeMap<i64, Mat> = BTreeMap::new();
        for k in (x_lo..=x_hi).rev() {
            let n_k = g.src.gens_at(k);
            if n_k == 0 {
                continue;
            }
            let m_k = self.complex.gens_at(k);
            let m_next = self.complex.gens_at(k + 1);
            let g_k = self.target.gens_at(k);
            if m_k == 0 {
                // Above the approximation's top: image must be zero there.
                maps.insert(k, Mat::zero(0, n_k));
                continue;
            }
            let w = self.wgens.get(&k).expect("window degree has solution generators");
            let basis = rgb(ring, ModOrder::pot(ring.order), m_next + g_k, w, true);
            let next_map = maps.get(&(k + 1)).cloned().unwrap_or_else(|| {
                Mat::zero(self.complex.gens_at(k + 1), g.src.gens_at(k + 1))
            });
            let d_x = g.src.diff_at(k);
            let gk = g.map_at(k);
            let mut cols = Vec::with_capacity(n_k);
            for j in 0..n_k {
                let u_part = next_map.apply(field, pot, &d_x.cols[j]);
                let c_part = gk.cols[j].clone();
                let wv = add(field, pot, &u_part, &shift_comp(&c_part, m_next));
                let alpha = basis.lift(&wv).ok_or_else(|| {
                    Error::Internal(format!(
                        "strict lift certificate missing at degree {k}; the source is not a chain map into the target"
                    ))
                })?;
                cols.push(join_comps(field, pot, &alpha));
            }
            maps.insert(k, Mat { rows: m_k, cols });
        }
        ChainMap::new(g.src.clone(), self.complex.clone(), maps)
    }
}

/// A Hom-complex `Hom(X, G)` for termwise-free `X`, with its block layout.
#[derive(Debug, Clone)]
pub struct HomComplex {
    pub x: Arc<Complex>,
    pub g: Arc<Complex>,
    pub complex: Arc<Complex>,
}

impl HomComplex {
    /// Blocks `(j, m_j, g_{j+k})` of Hom-degree `k`, ascending in `j`;
    /// generator `(j, a, b)` sits at flat index `offset_j + a * g_{j+k} + b`.
    pub fn layout(&self, k: i64) -> Vec<(i64, usize, usize)> {
        layout_of(&self.x, &self.g, k)
    }

    /// Flat index of `(j, a, b)` in Hom-degree `k`.
    pub fn index(&self, k: i64, j: i64, a: usize, b: usize) -> usize {
        let mut off = 0usize;
        for (jj, mj, gj) in self.layout(k) {
            if jj == j {
                return off + a * gj + b;
            }
            off += mj * gj;
        }
        panic!("block {j} absent in Hom-degree {k}");
    }
}

fn layout_of(x: &Arc<Complex>, g: &Arc<Complex>, k: i64) -> Vec<(i64, usize, usize)> {
    let mut out = Vec::new();
    if let Some((xlo, xhi)) = x.term_bounds() {
        for j in xlo..=xhi {
            let mj = x.gens_at(j);
            let gj = g.gens_at(j + k);
            if mj > 0 && gj > 0 {
                out.push((j, mj, gj));
            }
        }
    }
    out
}

/// Builds `Hom(X, G)` with differential
/// `(d phi) = d_G . phi - (-1)^k phi . delta_X`.
pub fn hom_complex(x: &Arc<Complex>, g: &Arc<Complex>) -> Result<HomComplex> {
    assert!(x.is_termwise_free(), "Hom source must be termwise free");
    let ring = &x.ring;
    assert_eq!(*ring, g.ring);
    let field = &ring.field;
    let pot = ring.pot();

    let (Some((xlo, xhi)), Some((glo, ghi))) = (x.term_bounds(), g.term_bounds()) else {
        let z = Complex::zero(ring);
        return Ok(HomComplex { x: Arc::clone(x), g: Arc::clone(g), complex: z });
    };
    let klo = glo - xhi;
    let khi = ghi - xlo;

    let mut terms: BTreeMap<i64, PresentedModule> = BTreeMap::new();
    for k in klo..=khi {
        let mut total = PresentedModule::zero(ring);
        for (j, mj, _) in layout_of(x, g, k) {
            let gterm = g.term_at(j + k);
            for _ in 0..mj {
                total = PresentedModule::direct_sum(&total, &gterm);
            }
        }
        if total.gens > 0 {
            terms.insert(k, total);
        }
    }

    let mut diffs: BTreeMap<i64, Mat> = BTreeMap::new();
    for k in klo..=khi {
        let src_layout = layout_of(x, g, k);
        let tgt_layout = layout_of(x, g, k + 1);
        let src_gens: usize = src_layout.iter().map(|(_, m, gg)| m * gg).sum();
        let tgt_gens: usize = tgt_layout.iter().map(|(_, m, gg)| m * gg).sum();
        if src_gens == 0 || tgt_gens == 0 {
            continue;
        }
        let tgt_index = |j: i64, a: usize, b: usize| -> Option<usize> {
            let mut off = 0usize;
            for &(jj, mj, gj) in &tgt_layout {
                if jj == j {
                    return Some(off + a * gj + b);
                }
                off += mj * gj;
            }
            None
        };
        // Sign on the precomposition part of the differential.
        let sign = if (k + 1).rem_euclid(2) == 0 { 1 } else { field.neg(1) };
        let mut cols: Vec<Vect> = Vec::new();
        for &(j, mj, gj) in &src_layout {
            let dg = g.diff_at(j + k);
            let dx = x.diff_at(j - 1);
            for a in 0..mj {
                for b in 0..gj {
                    let mut col = Vect::zero();
                    // Postcomposition d_G . phi : block (j, a, b').
                    for bp in 0..g.gens_at(j + k + 1) {
                        if let Some(idx) = tgt_index(j, a, bp) {
                            let entry = dg.entry(bp, b);
                            if !entry.is_zero() {
                                col = add(field, pot, &col, &shift_comp(&entry, idx));
                            }
                        }
                    }
                    // Precomposition phi . delta_X : block (j-1, a', b).
                    for ap in 0..x.gens_at(j - 1) {
                        if let Some(idx) = tgt_index(j - 1, ap, b) {
                            let entry = dx.entry(a, ap);
                            if !entry.is_zero() {
                                let scaled = crate::poly::scale(field, &entry, sign);
                                col = add(field, pot, &col, &shift_comp(&scaled, idx));
                            }
                        }
                    }
                    cols.push(col);
                }
            }
        }
        let d = Mat { rows: tgt_gens, cols };
        if !d.is_zero() {
            diffs.insert(k, d);
        }
    }

    let complex = Complex::new(ring.clone(), terms, diffs)?;
    Ok(HomComplex { x: Arc::clone(x), g: Arc::clone(g), complex })
}

/// Cohomology of `RHom(F, G)` in the window `lo..=hi`.
///
/// `F` is approximated deep enough that everything in the window is exact:
/// mapping out of the discarded tail can only land above it.
pub fn rhom_window(
    f: &Arc<Complex>,
    g: &Arc<Complex>,
    lo: i64,
    hi: i64,
) -> Result<Vec<(i64, PresentedModule)>> {
    let ring = &f.ring;
    if lo > hi || f.coh_bounds().is_none() || g.coh_bounds().is_none() {
        return Ok((lo..=hi).map(|k| (k, PresentedModule::zero(ring))).collect());
    }
    let a_g = g.coh_bounds().map(|(a, _)| a).unwrap_or(0);
    let fa = free_approx(f, a_g - hi - 2)?;
    let h = hom_complex(&fa.complex, g)?;
    Ok((lo..=hi).map(|k| (k, h.complex.cohomology(k))).collect())
}

/// The counit `Hom(P, F) -> F` induced by `R -> M` when `P` approximates
/// the module `M` placed in degree 0 with a single top generator.
pub fn hom_counit(h: &HomComplex) -> Result<ChainMap> {
    let ring = &h.x.ring;
    let Some((_, xtop)) = h.x.term_bounds() else {
        return Err(Error::Internal("counit needs a nonzero source".into()));
    };
    if xtop != 0 || h.x.gens_at(0) != 1 {
        return Err(Error::Internal(
            "counit needs a resolution with a single generator in degree 0".into(),
        ));
    }
    let mut maps: BTreeMap<i64, Mat> = BTreeMap::new();
    for (&k, term) in &h.complex.terms {
        let gk = h.g.gens_at(k);
        if gk == 0 {
            continue;
        }
        // Project onto the j = 0 block.
        let mut off = 0usize;
        let mut found = None;
        for (j, mj, gj) in h.layout(k) {
            if j == 0 {
                found = Some((off, gj));
                break;
            }
            off += mj * gj;
        }
        let Some((off, gj)) = found else { continue };
        debug_assert_eq!(gj, gk);
        let cols = (0..term.gens)
            .map(|i| {
                if i >= off && i < off + gj {
                    Vect::term(i - off, 1, vec![0; ring.nvars()])
                } else {
                    Vect::zero()
                }
            })
            .collect();
        maps.insert(k, Mat { rows: gk, cols });
    }
    ChainMap::new(h.complex.clone(), h.g.clone(), maps)
}

/// Postcomposition `Hom(X, G) -> Hom(X, G')` along `f: G -> G'`.
pub fn hom_postcompose(h: &HomComplex, f: &ChainMap, h2: &HomComplex) -> Result<ChainMap> {
    assert_eq!(*h.x, *h2.x);
    assert_eq!(*h.g, *f.src);
    assert_eq!(*h2.g, *f.tgt);
    let ring = &h.x.ring;
    let field = &ring.field;
    let pot = ring.pot();
    let mut maps: BTreeMap<i64, Mat> = BTreeMap::new();
    for (&k, term) in &h.complex.terms {
        let tgt_gens = h2.complex.gens_at(k);
        if tgt_gens == 0 {
            continue;
        }
        let tgt_layout = h2.layout(k);
        let tgt_index = |j: i64, a: usize, b: usize| -> Option<usize> {
            let mut off = 0usize;
            for &(jj, mj, gj) in &tgt_layout {
                if jj == j {
                    return Some(off + a * gj + b);
                }
                off += mj * gj;
            }
            None
        };
        let mut cols: Vec<Vect> = Vec::new();
        for (j, mj, gj) in h.layout(k) {
            let fk = f.map_at(j + k);
            for a in 0..mj {
                for b in 0..gj {
                    let mut col = Vect::zero();
                    for bp in 0..f.tgt.gens_at(j + k) {
                        if let Some(idx) = tgt_index(j, a, bp) {
                            let entry = fk.entry(bp, b);
                            if !entry.is_zero() {
                                col = add(field, pot, &col, &shift_comp(&entry, idx));
                            }
                        }
                    }
                    cols.push(col);
                }
            }
        }
        let m = Mat { rows: tgt_gens, cols };
        debug_assert_eq!(m.ncols(), term.gens);
        if !m.is_zero() {
            maps.insert(k, m);
        }
    }
    ChainMap::new(h.complex.clone(), h2.complex.clone(), maps)
}

/// Precomposition `Hom(X', G) -> Hom(X'', G)` along `u: X'' -> X'`.
pub fn hom_precompose(h: &HomComplex, u: &ChainMap, h2: &HomComplex) -> Result<ChainMap> {
    assert_eq!(*h.g, *h2.g);
    assert_eq!(*h.x, *u.tgt);
    assert_eq!(*h2.x, *u.src);
    let ring = &h.x.ring;
    let field = &ring.field;
    let pot = ring.pot();
    let mut maps: BTreeMap<i64, Mat> = BTreeMap::new();
    for (&k, term) in &h.complex.terms {
        let tgt_gens = h2.complex.gens_at(k);
        if tgt_gens == 0 {
            continue;
        }
        let tgt_layout = h2.layout(k);
        let tgt_index = |j: i64, a: usize, b: usize| -> Option<usize> {
            let mut off = 0usize;
            for &(jj, mj, gj) in &tgt_layout {
                if jj == j {
                    return Some(off + a * gj + b);
                }
                off += mj * gj;
            }
            None
        };
        let mut cols: Vec<Vect> = Vec::new();
        for (j, mj, gj) in h.layout(k) {
            let uj = u.map_at(j);
            for a in 0..mj {
                for b in 0..gj {
                    let mut col = Vect::zero();
                    for ap in 0..u.src.gens_at(j) {
                        if let Some(idx) = tgt_index(j, ap, b) {
                            let entry = uj.entry(a, ap);
                            if !entry.is_zero() {
                                col = add(field, pot, &col, &shift_comp(&entry, idx));
                            }
                        }
                    }
                    cols.push(col);
                }
            }
        }
        let m = Mat { rows: tgt_gens, cols };
        debug_assert_eq!(m.ncols(), term.gens);
        if !m.is_zero() {
            maps.insert(k, m);
        }
    }
    ChainMap::new(h.complex.clone(), h2.complex.clone(), maps)
}

/// Evaluation adjoint: given free `X`, `X'` and `e': X' -> Hom(X, w[d])`,
/// produces `X -> Hom(X', w[d])` by transposing the pairing, with the sign
/// `(-1)^{(d+1) j}` on the degree-`j` block.
pub fn eval_adjoint(
    x: &Arc<Complex>,
    eprime: &ChainMap,
    hom_x: &HomComplex,
    hom_xp: &HomComplex,
) -> Result<ChainMap> {
    let ring = &x.ring;
    let field = &ring.field;
    let xp = &eprime.src;
    assert_eq!(*hom_x.x, **x);
    assert_eq!(*hom_xp.x, **xp);
    // w[d] is the shared target complex of both Hom structures.
    assert_eq!(*hom_x.g, *hom_xp.g);
    let w = &hom_x.g;
    let Some((wd, wd_hi)) = w.term_bounds() else {
        return Ok(ChainMap::zero(x, &hom_xp.complex));
    };
    assert_eq!(wd, wd_hi, "dualizing target must live in one degree");
    let d = -wd;
    let gw = w.gens_at(wd);

    let mut maps: BTreeMap<i64, Mat> = BTreeMap::new();
    let Some((xlo, xhi)) = x.term_bounds() else {
        return Ok(ChainMap::zero(x, &hom_xp.complex));
    };
    for j in xlo..=xhi {
        let mj = x.gens_at(j);
        if mj == 0 {
            continue;
        }
        let tgt_gens = hom_xp.complex.gens_at(j);
        if tgt_gens == 0 {
            maps.insert(j, Mat::zero(0, mj));
            continue;
        }
        // Hom(X', w[d])^j has a single block at j' = -d - j.
        let i = -d - j;
        let e_mat = eprime.map_at(i); // X'^i -> Hom(X, w[d])^i, block X^{-d-i} = X^j
        let sgn_exp = ((d + 1) * j).rem_euclid(2);
        let sign = if sgn_exp == 0 { 1 } else { field.neg(1) };
        let mp = xp.gens_at(i);
        let mut cols: Vec<Vect> = Vec::with_capacity(mj);
        for l in 0..mj {
            let mut col = Vect::zero();
            for s in 0..mp {
                for t in 0..gw {
                    // e'[(l, t), s] with layout index of (j-block, l, t).
                    let src_idx = hom_x.index(i, j, l, t);
                    let entry = e_mat.entry(src_idx, s);
                    if entry.is_zero() {
                        continue;
                    }
                    let tgt_idx = hom_xp.index(j, i, s, t);
                    let scaled = crate::poly::scale(field, &entry, sign);
                    col = add(field, ring.pot(), &col, &shift_comp(&scaled, tgt_idx));
                }
            }
            cols.push(col);
        }
        let m = Mat { rows: tgt_gens, cols };
        if !m.is_zero() {
            maps.insert(j, m);
        }
    }
    ChainMap::new(Arc::clone(x), hom_xp.complex.clone(), maps)
}
