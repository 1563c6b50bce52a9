//! Buchberger's algorithm on submodules of `R^g`, with transformation
//! tracking, a synchronized basis cache, and syzygy computation by
//! component elimination.
//!
//! Bases are always computed over the ambient polynomial ring; quotient-ring
//! questions append `ideal * e_i` columns and discard their certificate
//! coefficients, which is sound because answers are read modulo the ideal.
//! With a fixed term order, sorted inputs, and first-match reducer choice,
//! the final interreduced monic basis is the unique reduced basis of the
//! submodule, so every run of the same query returns identical bytes.

use crate::error::{Error, Result};
use crate::monomial::{coprime, mono_div, mono_lcm, ModOrder};
use crate::poly::{add, join_comps, mul_poly, mul_term, normalize, project_comps, scale, shift_comp, sub, Mat, Vect};
use crate::ring::Ring;
use once_cell::sync::Lazy;
use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

/// A reduced Groebner basis over the ambient polynomial ring.
#[derive(Debug)]
pub struct Gb {
    pub ring: Arc<Ring>,
    pub order: ModOrder,
    pub rows: usize,
    /// Normalized nonzero inputs, in caller order.
    pub input: Vec<Vect>,
    /// Reduced, monic, lead-descending basis elements.
    pub elems: Vec<Vect>,
    /// `elems[i] = sum_j transform[i][j] * input[j]` when tracked.
    pub transform: Option<Vec<Vec<Vect>>>,
}

static CACHE: Lazy<Mutex<HashMap<Vec<u8>, Arc<Gb>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn cache_key(ring: &Ring, order: ModOrder, rows: usize, gens: &[Vect], transform: bool) -> Vec<u8> {
    let mut key = Vec::new();
    key.extend_from_slice(ring.key());
    key.extend_from_slice(format!("{order:?}:{rows}:{transform}").as_bytes());
    for g in gens {
        g.key_bytes(&mut key);
    }
    key
}

/// Computes (or fetches) the reduced basis of the span of `gens` in
/// `ring^rows`. The ring must be a polynomial ring.
pub fn gb(ring: &Arc<Ring>, order: ModOrder, rows: usize, gens: &[Vect], transform: bool) -> Arc<Gb> {
    assert!(ring.is_polynomial(), "bases are computed over the ambient ring");
    let input: Vec<Vect> = gens
        .iter()
        .map(|g| normalize(&ring.field, order, g.terms.clone()))
        .collect();
    let key = cache_key(ring, order, rows, &input, transform);
    if let Some(hit) = CACHE.lock().unwrap().get(&key) {
        return Arc::clone(hit);
    }
    let out = Arc::new(buchberger(ring, order, rows, input, transform));
    CACHE.lock().unwrap().insert(key, Arc::clone(&out));
    out
}

struct Work {
    elems: Vec<Vect>,
    trs: Vec<Vec<Vect>>,
    track: bool,
}

fn buchberger(ring: &Arc<Ring>, order: ModOrder, rows: usize, input: Vec<Vect>, track: bool) -> Gb {
    let field = &ring.field;
    let ninput = input.len();
    let zero_row = |_: usize| vec![Vect::zero(); ninput];
    let mut work = Work { elems: Vec::new(), trs: Vec::new(), track };

    // Seed with monic inputs.
    for (j, g) in input.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let lc = g.lead().unwrap().coef;
        let inv = field.inv(lc);
        let mut tr = zero_row(0);
        if track {
            tr[j] = Vect::term(0, inv, vec![0; ring.nvars()]);
        }
        work.elems.push(scale(field, g, inv));
        work.trs.push(tr);
    }

    // Pair queue ordered by (lcm degree, lcm bytes, i, j): deterministic.
    let mut queue: BTreeSet<(u64, Vec<u8>, usize, usize)> = BTreeSet::new();
    let push_pairs = |queue: &mut BTreeSet<(u64, Vec<u8>, usize, usize)>, elems: &[Vect], new: usize| {
        let ln = elems[new].lead().unwrap();
        for i in 0..new {
            let li = elems[i].lead().unwrap();
            if li.comp != ln.comp {
                continue;
            }
            if rows == 1 && coprime(&li.mono, &ln.mono) {
                continue;
            }
            let l = mono_lcm(&li.mono, &ln.mono);
            let deg: u64 = l.iter().map(|&e| e as u64).sum();
            let mut bytes = Vec::with_capacity(l.len() * 2);
            for &e in &l {
                bytes.extend_from_slice(&e.to_le_bytes());
            }
            queue.insert((deg, bytes, i, new));
        }
    };
    for k in 0..work.elems.len() {
        push_pairs(&mut queue, &work.elems, k);
    }

    while let Some(item) = queue.iter().next().cloned() {
        queue.remove(&item);
        let (_, _, i, j) = item;
        let (li, lj) = (work.elems[i].lead().unwrap().clone(), work.elems[j].lead().unwrap().clone());
        let l = mono_lcm(&li.mono, &lj.mono);
        let ui = mono_div(&l, &li.mono).unwrap();
        let uj = mono_div(&l, &lj.mono).unwrap();
        let mut s = sub(
            field,
            order,
            &mul_term(field, &work.elems[i], 1, &ui),
            &mul_term(field, &work.elems[j], 1, &uj),
        );
        // Transform row mirrors the S-vector combination.
        let mut rtr = zero_row(0);
        if track {
            rtr = work.trs[i]
                .iter()
                .zip(&work.trs[j])
                .map(|(a, b)| {
                    sub(
                        field,
                        ring.pot(),
                        &mul_term(field, a, 1, &ui),
                        &mul_term(field, b, 1, &uj),
                    )
                })
                .collect();
        }
        s = reduce_full(ring, order, s, &work, &mut rtr);
        if s.is_zero() {
            continue;
        }
        let lc = s.lead().unwrap().coef;
        let inv = field.inv(lc);
        let s = scale(field, &s, inv);
        if track {
            for t in rtr.iter_mut() {
                *t = scale(field, t, inv);
            }
        }
        work.elems.push(s);
        work.trs.push(rtr);
        push_pairs(&mut queue, &work.elems, work.elems.len() - 1);
    }

    interreduce(ring, order, &mut work);

    Gb {
        ring: Arc::clone(ring),
        order,
        rows,
        input,
        elems: work.elems,
        transform: if track { Some(work.trs) } else { None },
    }
}

/// Fully reduces `v` by the working basis, updating the transform row.
fn reduce_full(ring: &Arc<Ring>, order: ModOrder, v: Vect, work: &Work, tr: &mut Vec<Vect>) -> Vect {
    let field = &ring.field;
    let mut done: Vec<crate::poly::MTerm> = Vec::new();
    let mut cur = v;
    'outer: while let Some(lt) = cur.lead().cloned() {
        for (k, b) in work.elems.iter().enumerate() {
            let lb = b.lead().unwrap();
            if lb.comp != lt.comp {
                continue;
            }
            if let Some(q) = mono_div(&lt.mono, &lb.mono) {
                cur = sub(field, order, &cur, &mul_term(field, b, lt.coef, &q));
                if work.track {
                    for (t, tb) in tr.iter_mut().zip(&work.trs[k]) {
                        *t = sub(field, ring.pot(), t, &mul_term(field, tb, lt.coef, &q));
                    }
                }
                continue 'outer;
            }
        }
        done.push(lt);
        cur.terms.remove(0);
    }
    Vect { terms: done }
}

/// Interreduces to the unique reduced monic basis, keeping transforms in step.
fn interreduce(ring: &Arc<Ring>, order: ModOrder, work: &mut Work) {
    let field = &ring.field;
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < work.elems.len() {
            let elem = work.elems.remove(i);
            let tr = if work.track { work.trs.remove(i) } else { Vec::new() };
            let mut rtr = tr.clone();
            let red = reduce_full(ring, order, elem.clone(), work, &mut rtr);
            if red.is_zero() {
                changed = true;
                continue; // dropped
            }
            let lc = red.lead().unwrap().coef;
            let inv = field.inv(lc);
            let red_m = scale(field, &red, inv);
            if work.track {
                for t in rtr.iter_mut() {
                    *t = scale(field, t, inv);
                }
            }
            if red_m != elem {
                changed = true;
            }
            work.elems.insert(i, red_m);
            if work.track {
                work.trs.insert(i, rtr);
            }
            i += 1;
        }
        if !changed {
            break;
        }
    }
    // Canonical order: lead terms ascending; drop duplicates.
    let mut idx: Vec<usize> = (0..work.elems.len()).collect();
    idx.sort_by(|&a, &b| {
        let la = work.elems[a].lead().unwrap();
        let lb = work.elems[b].lead().unwrap();
        order.cmp(la.comp, &la.mono, lb.comp, &lb.mono)
    });
    let mut elems = Vec::with_capacity(idx.len());
    let mut trs = Vec::with_capacity(idx.len());
    for &k in &idx {
        if elems.last() == Some(&work.elems[k]) {
            continue;
        }
        elems.push(work.elems[k].clone());
        if work.track {
            trs.push(work.trs[k].clone());
        }
    }
    work.elems = elems;
    work.trs = trs;
}

/// Normal form of `v` with respect to the basis.
pub fn normal_form(g: &Gb, v: &Vect) -> Vect {
    let work = Work { elems: g.elems.clone(), trs: Vec::new(), track: false };
    let sorted = normalize(&g.ring.field, g.order, v.terms.clone());
    let mut no_tr = Vec::new();
    reduce_full(&g.ring, g.order, sorted, &work, &mut no_tr)
}

/// Writes `v = sum_k cof[k] * elems[k] + remainder`.
pub fn reduce_with_cofactors(g: &Gb, v: &Vect) -> (Vect, Vec<Vect>) {
    let ring = &g.ring;
    let field = &ring.field;
    let mut cof = vec![Vect::zero(); g.elems.len()];
    let mut done: Vec<crate::poly::MTerm> = Vec::new();
    let mut cur = normalize(field, g.order, v.terms.clone());
    'outer: while let Some(lt) = cur.lead().cloned() {
        for (k, b) in g.elems.iter().enumerate() {
            let lb = b.lead().unwrap();
            if lb.comp != lt.comp {
                continue;
            }
            if let Some(q) = mono_div(&lt.mono, &lb.mono) {
                cur = sub(field, g.order, &cur, &mul_term(field, b, lt.coef, &q));
                cof[k] = add(
                    field,
                    ring.pot(),
                    &cof[k],
                    &Vect::term(0, lt.coef, q),
                );
                continue 'outer;
            }
        }
        done.push(lt);
        cur.terms.remove(0);
    }
    (Vect { terms: done }, cof)
}

/// Checks that every S-vector of the basis reduces to zero and that the
/// transform rows reproduce the elements from the inputs.
pub fn certificate(g: &Gb) -> bool {
    let ring = &g.ring;
    let field = &ring.field;
    for i in 0..g.elems.len() {
        for j in (i + 1)..g.elems.len() {
            let li = g.elems[i].lead().unwrap();
            let lj = g.elems[j].lead().unwrap();
            if li.comp != lj.comp {
                continue;
            }
            let l = mono_lcm(&li.mono, &lj.mono);
            let ui = mono_div(&l, &li.mono).unwrap();
            let uj = mono_div(&l, &lj.mono).unwrap();
            let s = sub(
                field,
                g.order,
                &mul_term(field, &g.elems[i], 1, &ui),
                &mul_term(field, &g.elems[j], 1, &uj),
            );
            if !normal_form(g, &s).is_zero() {
                return false;
            }
        }
    }
    if let Some(trs) = &g.transform {
        for (e, tr) in g.elems.iter().zip(trs) {
            let mut acc = Vect::zero();
            for (c, inp) in tr.iter().zip(&g.input) {
                acc = add(field, g.order, &acc, &mul_poly(field, g.order, c, inp));
            }
            let acc = normalize(field, g.order, acc.terms);
            if &acc != e {
                return false;
            }
        }
    }
    true
}

/// Quotient-aware basis handle: a basis of `span(gens) + ideal * R^rows`
/// inside the ambient free module, remembering how many generators are the
/// caller's own.
#[derive(Debug, Clone)]
pub struct RGb {
    pub ring: Arc<Ring>,
    pub rows: usize,
    pub user: usize,
    pub sgb: Arc<Gb>,
}

/// Basis of the span of `gens` in `ring^rows` (the ring may be a quotient).
pub fn rgb(ring: &Arc<Ring>, order: ModOrder, rows: usize, gens: &[Vect], transform: bool) -> RGb {
    let ambient = ring.ambient();
    let mut ext: Vec<Vect> = gens.to_vec();
    for comp in 0..rows {
        for g in &ring.ideal {
            ext.push(shift_comp(g, comp));
        }
    }
    let sgb = gb(&ambient, order, rows, &ext, transform);
    RGb { ring: Arc::clone(ring), rows, user: gens.len(), sgb }
}

impl RGb {
    /// Canonical representative modulo the span and the ideal.
    pub fn nf(&self, v: &Vect) -> Vect {
        normal_form(&self.sgb, v)
    }

    pub fn contains(&self, v: &Vect) -> bool {
        self.nf(v).is_zero()
    }

    /// Certificate coefficients over the caller's generators when `v` lies
    /// in the span (modulo the ideal).
    pub fn lift(&self, v: &Vect) -> Option<Vec<Vect>> {
        let (r, cof) = reduce_with_cofactors(&self.sgb, v);
        if !r.is_zero() {
            return None;
        }
        let trs = self
            .sgb
            .transform
            .as_ref()
            .expect("lift needs a transform-tracked basis");
        let field = &self.ring.field;
        let pot = self.ring.pot();
        let mut out = vec![Vect::zero(); self.user];
        for (k, c) in cof.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate() {
                let t = &trs[k][j];
                if t.is_zero() {
                    continue;
                }
                *slot = add(field, pot, slot, &mul_poly(field, pot, c, t));
            }
        }
        Some(out)
    }

    /// Lifts every column of `m` (a map into `ring^rows`), producing the
    /// coefficient matrix over the caller's generators.
    pub fn lift_mat(&self, m: &Mat) -> Option<Mat> {
        let mut cols = Vec::with_capacity(m.ncols());
        for c in &m.cols {
            let lifted = self.lift(c)?;
            cols.push(join_comps(&self.ring.field, self.ring.pot(), &lifted));
        }
        Some(Mat { rows: self.user, cols })
    }
}

/// Basis of the defining ideal over the ambient ring (rank one).
pub fn ideal_gb(ring: &Arc<Ring>) -> Arc<Gb> {
    let ambient = ring.ambient();
    gb(&ambient, ModOrder::pot(ring.order), 1, &ring.ideal, false)
}

/// Canonical representative of a polynomial modulo the defining ideal.
pub fn nf_mod_ideal(ring: &Arc<Ring>, v: &Vect) -> Vect {
    if ring.is_polynomial() {
        return normalize(&ring.field, ring.pot(), v.terms.clone());
    }
    normal_form(&ideal_gb(ring), v)
}

/// Componentwise reduction of a module element modulo the defining ideal.
pub fn reduce_vect_mod_ideal(ring: &Arc<Ring>, g: usize, v: &Vect) -> Vect {
    if ring.is_polynomial() {
        return normalize(&ring.field, ring.pot(), v.terms.clone());
    }
    let polys = crate::poly::split_comps(v, g);
    let reduced: Vec<Vect> = polys.iter().map(|p| nf_mod_ideal(ring, p)).collect();
    join_comps(&ring.field, ring.pot(), &reduced)
}

/// Builds a quotient ring, rejecting rank-mixed generators and unit ideals.
pub fn make_quotient(ambient: &Arc<Ring>, gens: Vec<Vect>) -> Result<Arc<Ring>> {
    assert!(ambient.is_polynomial());
    for g in &gens {
        if g.max_comp().unwrap_or(0) != 0 {
            return Err(Error::Invalid("ideal generators must be polynomials".into()));
        }
    }
    let candidate = Ring::quotient_unchecked(ambient, gens);
    let igb = ideal_gb(&candidate);
    for e in &igb.elems {
        if let Some(l) = e.lead() {
            if l.mono.iter().all(|&x| x == 0) {
                return Err(Error::Invalid("defining ideal is the unit ideal".into()));
            }
        }
    }
    Ok(candidate)
}

/// Generators of the syzygy module of `cols` inside `ring^rows`; the ring
/// may be a quotient, in which case syzygies are taken over it.
pub fn syzygies_over(ring: &Arc<Ring>, rows: usize, cols: &[Vect]) -> Vec<Vect> {
    let ambient = ring.ambient();
    let s = cols.len();
    let mut ext: Vec<Vect> = cols.to_vec();
    for comp in 0..rows {
        for g in &ring.ideal {
            ext.push(shift_comp(g, comp));
        }
    }
    let total = ext.len();
    let order = ModOrder::pot(ring.order);
    // Tag each column with a fresh component below the target block.
    let tagged: Vec<Vect> = ext
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let tag = Vect::term(rows + i, 1, vec![0; ring.nvars()]);
            add(&ring.field, order, c, &tag)
        })
        .collect();
    let basis = gb(&ambient, order, rows + total, &tagged, false);
    let mut out = Vec::new();
    for e in &basis.elems {
        let le = e.lead().unwrap();
        if le.comp < rows {
            continue; // still sees the target block
        }
        let proj = project_comps(e, rows, rows + s);
        let reduced = reduce_vect_mod_ideal(ring, s, &proj);
        if !reduced.is_zero() && !out.contains(&reduced) {
            out.push(reduced);
        }
    }
    out
}

/// Number of currently cached bases; used by tests to confirm reuse.
pub fn cache_len() -> usize {
    CACHE.lock().unwrap().len()
}
