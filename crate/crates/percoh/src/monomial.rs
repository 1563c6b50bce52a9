//! Monomials as exponent vectors, with the term orders used across the crate.
//!
//! Every comparison here is a total order, so any sorted structure built on
//! top of them is deterministic.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Exponent vector; length is the number of ambient variables.
pub type Mono = Vec<u16>;

/// Total degree.
pub fn degree(m: &[u16]) -> u64 {
    m.iter().map(|&e| e as u64).sum()
}

/// Componentwise product of monomials.
pub fn mono_mul(a: &[u16], b: &[u16]) -> Mono {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

/// Exact division `a / b` if `b` divides `a`.
pub fn mono_div(a: &[u16], b: &[u16]) -> Option<Mono> {
    let mut out = Vec::with_capacity(a.len());
    for (&x, &y) in a.iter().zip(b) {
        if x < y {
            return None;
        }
        out.push(x - y);
    }
    Some(out)
}

/// Least common multiple of monomials.
pub fn mono_lcm(a: &[u16], b: &[u16]) -> Mono {
    a.iter().zip(b).map(|(&x, &y)| x.max(y)).collect()
}

/// True when the supports are disjoint (the product criterion).
pub fn coprime(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x == 0 || y == 0)
}

/// Monomial order on the ambient polynomial ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MonoOrder {
    /// Graded reverse lexicographic.
    GrevLex,
    /// Pure lexicographic, first variable strongest.
    Lex,
    /// Eliminates the first `block` variables: grevlex on that block
    /// dominates, ties broken by grevlex on the remaining variables.
    Elim { block: usize },
}

impl MonoOrder {
    pub fn cmp(&self, a: &[u16], b: &[u16]) -> Ordering {
        match *self {
            MonoOrder::GrevLex => grevlex(a, b),
            MonoOrder::Lex => lex(a, b),
            MonoOrder::Elim { block } => grevlex(&a[..block], &b[..block])
                .then_with(|| grevlex(&a[block..], &b[block..])),
        }
    }
}

fn lex(a: &[u16], b: &[u16]) -> Ordering {
    for (&x, &y) in a.iter().zip(b) {
        match x.cmp(&y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

fn grevlex(a: &[u16], b: &[u16]) -> Ordering {
    match degree(a).cmp(&degree(b)) {
        Ordering::Equal => {}
        other => return other,
    }
    // Same degree: the later variables decide, smaller exponent wins.
    for (&x, &y) in a.iter().zip(b).rev() {
        match x.cmp(&y) {
            Ordering::Equal => continue,
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    Ordering::Equal
}

/// Order on terms of a free module `R^g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModOrder {
    pub mono: MonoOrder,
    /// Position-over-term when true (lower component index always wins),
    /// term-over-position when false.
    pub pos_first: bool,
}

impl ModOrder {
    pub fn pot(mono: MonoOrder) -> ModOrder {
        ModOrder { mono, pos_first: true }
    }

    pub fn top(mono: MonoOrder) -> ModOrder {
        ModOrder { mono, pos_first: false }
    }

    /// Compares module terms `(component, monomial)`; lower component index
    /// is the *greater* term, so leading terms of a position-over-term basis
    /// concentrate in the earliest components.
    pub fn cmp(&self, ca: usize, ma: &[u16], cb: usize, mb: &[u16]) -> Ordering {
        if self.pos_first {
            match ca.cmp(&cb) {
                Ordering::Equal => self.mono.cmp(ma, mb),
                Ordering::Less => Ordering::Greater,
                Ordering::Greater => Ordering::Less,
            }
        } else {
            match self.mono.cmp(ma, mb) {
                Ordering::Equal => match ca.cmp(&cb) {
                    Ordering::Equal => Ordering::Equal,
                    Ordering::Less => Ordering::Greater,
                    Ordering::Greater => Ordering::Less,
                },
                other => other,
            }
        }
    }
}
