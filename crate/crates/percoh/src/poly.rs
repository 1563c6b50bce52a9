//! Sparse elements of free modules `R^g` as sorted term lists, plus the
//! column-major matrices built from them.
//!
//! A polynomial is the rank-one case (every component index 0). All
//! arithmetic is order-aware: callers pass the `ModOrder` an element is kept
//! sorted under, which keeps each computation's invariants explicit.

use crate::field::Field;
use crate::monomial::{mono_mul, ModOrder, Mono};

/// One term of a free-module element: coefficient, monomial, component.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MTerm {
    pub comp: usize,
    pub coef: u32,
    pub mono: Mono,
}

/// Element of `R^g`, sorted strictly descending under a fixed `ModOrder`,
/// zero coefficients removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Vect {
    pub terms: Vec<MTerm>,
}

impl Vect {
    pub fn zero() -> Vect {
        Vect { terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Leading term under the order the element is sorted by.
    pub fn lead(&self) -> Option<&MTerm> {
        self.terms.first()
    }

    /// Basis vector `c * mono * e_comp`.
    pub fn term(comp: usize, coef: u32, mono: Mono) -> Vect {
        if coef == 0 {
            Vect::zero()
        } else {
            Vect { terms: vec![MTerm { comp, coef, mono }] }
        }
    }

    /// Constant polynomial (rank one).
    pub fn constant(field: &Field, c: i64, nvars: usize) -> Vect {
        Vect::term(0, field.from_i64(c), vec![0; nvars])
    }

    /// Largest component index present, if any.
    pub fn max_comp(&self) -> Option<usize> {
        self.terms.iter().map(|t| t.comp).max()
    }

    /// Stable bytes for cache keys.
    pub fn key_bytes(&self, out: &mut Vec<u8>) {
        for t in &self.terms {
            out.extend_from_slice(&(t.comp as u64).to_le_bytes());
            out.extend_from_slice(&t.coef.to_le_bytes());
            out.extend_from_slice(&(t.mono.len() as u32).to_le_bytes());
            for &e in &t.mono {
                out.extend_from_slice(&e.to_le_bytes());
            }
        }
        out.push(0xfe);
    }
}

/// Sorts, merges duplicates, and drops zeros; the one true normalizer.
pub fn normalize(field: &Field, ord: ModOrder, mut terms: Vec<MTerm>) -> Vect {
    terms.sort_by(|a, b| ord.cmp(b.comp, &b.mono, a.comp, &a.mono));
    let mut out: Vec<MTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        if let Some(last) = out.last_mut() {
            if last.comp == t.comp && last.mono == t.mono {
                last.coef = field.add(last.coef, t.coef);
                if last.coef == 0 {
                    out.pop();
                }
                continue;
            }
        }
        if t.coef != 0 {
            out.push(t);
        }
    }
    Vect { terms: out }
}

/// `a + b`, both sorted under `ord`.
pub fn add(field: &Field, ord: ModOrder, a: &Vect, b: &Vect) -> Vect {
    let mut out: Vec<MTerm> = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    while i < a.terms.len() && j < b.terms.len() {
        let ta = &a.terms[i];
        let tb = &b.terms[j];
        match ord.cmp(ta.comp, &ta.mono, tb.comp, &tb.mono) {
            std::cmp::Ordering::Greater => {
                out.push(ta.clone());
                i += 1;
            }
            std::cmp::Ordering::Less => {
                out.push(tb.clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let c = field.add(ta.coef, tb.coef);
                if c != 0 {
                    out.push(MTerm { comp: ta.comp, coef: c, mono: ta.mono.clone() });
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a.terms[i..]);
    out.extend_from_slice(&b.terms[j..]);
    Vect { terms: out }
}

pub fn sub(field: &Field, ord: ModOrder, a: &Vect, b: &Vect) -> Vect {
    add(field, ord, a, &neg(field, b))
}

pub fn neg(field: &Field, a: &Vect) -> Vect {
    Vect {
        terms: a
            .terms
            .iter()
            .map(|t| MTerm { comp: t.comp, coef: field.neg(t.coef), mono: t.mono.clone() })
            .collect(),
    }
}

pub fn scale(field: &Field, a: &Vect, c: u32) -> Vect {
    if c == 0 {
        return Vect::zero();
    }
    Vect {
        terms: a
            .terms
            .iter()
            .map(|t| MTerm { comp: t.comp, coef: field.mul(t.coef, c), mono: t.mono.clone() })
            .collect(),
    }
}

/// Multiplies by a scalar times a monomial; preserves sorting under any
/// order compatible with monomial multiplication (all of ours are).
pub fn mul_term(field: &Field, a: &Vect, c: u32, mono: &[u16]) -> Vect {
    if c == 0 {
        return Vect::zero();
    }
    Vect {
        terms: a
            .terms
            .iter()
            .map(|t| MTerm {
                comp: t.comp,
                coef: field.mul(t.coef, c),
                mono: mono_mul(&t.mono, mono),
            })
            .collect(),
    }
}

/// Polynomial (rank-one `p`) times module element.
pub fn mul_poly(field: &Field, ord: ModOrder, p: &Vect, a: &Vect) -> Vect {
    let mut acc = Vect::zero();
    for t in &p.terms {
        debug_assert_eq!(t.comp, 0, "multiplier must be a polynomial");
        acc = add(field, ord, &acc, &mul_term(field, a, t.coef, &t.mono));
    }
    acc
}

/// Rescales so the leading coefficient is 1.
pub fn monic(field: &Field, a: &Vect) -> Vect {
    match a.lead() {
        None => Vect::zero(),
        Some(l) => {
            let inv = field.inv(l.coef);
            scale(field, a, inv)
        }
    }
}

/// Shifts every component index up by `off`.
pub fn shift_comp(a: &Vect, off: usize) -> Vect {
    Vect {
        terms: a
            .terms
            .iter()
            .map(|t| MTerm { comp: t.comp + off, coef: t.coef, mono: t.mono.clone() })
            .collect(),
    }
}

/// Keeps components in `lo..hi`, re-based to start at 0. Caller re-sorts if
/// the ambient order was position-sensitive across the cut (ours are not:
/// a subrange of components preserves relative order).
pub fn project_comps(a: &Vect, lo: usize, hi: usize) -> Vect {
    Vect {
        terms: a
            .terms
            .iter()
            .filter(|t| t.comp >= lo && t.comp < hi)
            .map(|t| MTerm { comp: t.comp - lo, coef: t.coef, mono: t.mono.clone() })
            .collect(),
    }
}

/// Splits into the rank-one polynomial sitting in each component of `R^g`.
pub fn split_comps(a: &Vect, g: usize) -> Vec<Vect> {
    let mut out = vec![Vect::zero(); g];
    for t in &a.terms {
        out[t.comp].terms.push(MTerm { comp: 0, coef: t.coef, mono: t.mono.clone() });
    }
    out
}

/// Rebuilds a module element from per-component polynomials.
pub fn join_comps(field: &Field, ord: ModOrder, polys: &[Vect]) -> Vect {
    let mut terms = Vec::new();
    for (i, p) in polys.iter().enumerate() {
        for t in &p.terms {
            terms.push(MTerm { comp: i, coef: t.coef, mono: t.mono.clone() });
        }
    }
    normalize(field, ord, terms)
}

/// Column-major matrix over the ring: a map `R^(cols) -> R^(rows)`,
/// column `j` the image of the `j`-th source basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Mat {
    pub rows: usize,
    pub cols: Vec<Vect>,
}

impl Mat {
    pub fn zero(rows: usize, ncols: usize) -> Mat {
        Mat { rows, cols: vec![Vect::zero(); ncols] }
    }

    pub fn identity(n: usize, nvars: usize) -> Mat {
        Mat {
            rows: n,
            cols: (0..n).map(|i| Vect::term(i, 1, vec![0; nvars])).collect(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    /// Entry `(i, j)` as a polynomial.
    pub fn entry(&self, i: usize, j: usize) -> Vect {
        Vect {
            terms: self.cols[j]
                .terms
                .iter()
                .filter(|t| t.comp == i)
                .map(|t| MTerm { comp: 0, coef: t.coef, mono: t.mono.clone() })
                .collect(),
        }
    }

    /// Applies to a source-side element: `v` over `ncols` generators.
    pub fn apply(&self, field: &Field, ord: ModOrder, v: &Vect) -> Vect {
        let mut acc = Vect::zero();
        for t in &v.terms {
            let col = &self.cols[t.comp];
            acc = add(field, ord, &acc, &mul_term(field, col, t.coef, &t.mono));
        }
        acc
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, field: &Field, ord: ModOrder, other: &Mat) -> Mat {
        debug_assert_eq!(self.ncols(), other.rows, "composition shape mismatch");
        Mat {
            rows: self.rows,
            cols: other.cols.iter().map(|c| self.apply(field, ord, c)).collect(),
        }
    }

    pub fn add(&self, field: &Field, ord: ModOrder, other: &Mat) -> Mat {
        debug_assert_eq!(self.rows, other.rows);
        debug_assert_eq!(self.ncols(), other.ncols());
        Mat {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .zip(&other.cols)
                .map(|(a, b)| add(field, ord, a, b))
                .collect(),
        }
    }

    pub fn neg(&self, field: &Field) -> Mat {
        Mat { rows: self.rows, cols: self.cols.iter().map(|c| neg(field, c)).collect() }
    }

    pub fn scale(&self, field: &Field, c: u32) -> Mat {
        Mat { rows: self.rows, cols: self.cols.iter().map(|v| scale(field, v, c)).collect() }
    }

    /// Horizontal concatenation (same target).
    pub fn hcat(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.rows, other.rows);
        let mut cols = self.cols.clone();
        cols.extend(other.cols.iter().cloned());
        Mat { rows: self.rows, cols }
    }

    /// Block diagonal sum: acts as `self` on the first blocks of source and
    /// target, as `other` on the second.
    pub fn block_diag(&self, other: &Mat) -> Mat {
        let mut cols = self.cols.clone();
        cols.extend(other.cols.iter().map(|c| shift_comp(c, self.rows)));
        Mat { rows: self.rows + other.rows, cols }
    }

    /// Vertical stack `[self; other]`: same source, concatenated targets.
    pub fn vcat(&self, field: &Field, ord: ModOrder, other: &Mat) -> Mat {
        debug_assert_eq!(self.ncols(), other.ncols());
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let shifted = shift_comp(b, self.rows);
                add(field, ord, a, &shifted)
            })
            .collect();
        Mat { rows: self.rows + other.rows, cols }
    }

    pub fn key_bytes(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.rows as u64).to_le_bytes());
        out.extend_from_slice(&(self.cols.len() as u64).to_le_bytes());
        for c in &self.cols {
            c.key_bytes(out);
        }
    }
}
