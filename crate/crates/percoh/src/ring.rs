//! Ambient polynomial rings and their quotients, plus polynomial text I/O.
//!
//! A `Ring` is `F_p[vars]/ideal`; an empty ideal means the polynomial ring
//! itself. Rings are shared as `Arc<Ring>` and compared by content, so they
//! can key caches.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::monomial::{ModOrder, MonoOrder};
use crate::poly::{normalize, MTerm, Vect};
use std::sync::Arc;

/// A finitely presented coordinate ring `F_p[x_1..x_n]/I`.
#[derive(Debug)]
pub struct Ring {
    pub field: Field,
    pub vars: Vec<String>,
    pub order: MonoOrder,
    /// Defining ideal generators (rank one, normalized, deduplicated).
    pub ideal: Vec<Vect>,
    key: Vec<u8>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for Ring {}

impl Ring {
    /// The polynomial ring `F_p[vars]` under `order`.
    pub fn polynomial(p: u32, vars: Vec<String>, order: MonoOrder) -> Result<Arc<Ring>> {
        let field = Field::new(p)
            .ok_or_else(|| Error::Invalid(format!("field characteristic {p} is not prime")))?;
        if vars.is_empty() {
            return Err(Error::Invalid("at least one variable is required".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in &vars {
            if v.is_empty() || !v.chars().next().unwrap().is_ascii_alphabetic() {
                return Err(Error::Invalid(format!("bad variable name {v:?}")));
            }
            if !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::Invalid(format!("bad variable name {v:?}")));
            }
            if !seen.insert(v.clone()) {
                return Err(Error::Invalid(format!("duplicate variable {v:?}")));
            }
        }
        Ok(Arc::new(Ring::assemble(field, vars, order, Vec::new())))
    }

    /// The quotient of `ambient` by the ideal generated by `gens`.
    /// Properness (1 not in the ideal) is checked by the caller-facing
    /// constructor in `groebner::make_quotient`, which has basis machinery;
    /// this assembles the value only.
    pub(crate) fn quotient_unchecked(ambient: &Arc<Ring>, gens: Vec<Vect>) -> Arc<Ring> {
        let mut cleaned: Vec<Vect> = Vec::new();
        for g in gens {
            let n = normalize(&ambient.field, ambient.pot(), g.terms);
            if !n.is_zero() && !cleaned.contains(&n) {
                cleaned.push(n);
            }
        }
        cleaned.sort_by(|a, b| {
            let mut ka = Vec::new();
            let mut kb = Vec::new();
            a.key_bytes(&mut ka);
            b.key_bytes(&mut kb);
            ka.cmp(&kb)
        });
        Arc::new(Ring::assemble(
            ambient.field,
            ambient.vars.clone(),
            ambient.order,
            cleaned,
        ))
    }

    fn assemble(field: Field, vars: Vec<String>, order: MonoOrder, ideal: Vec<Vect>) -> Ring {
        let mut key = Vec::new();
        key.extend_from_slice(&field.p().to_le_bytes());
        for v in &vars {
            key.extend_from_slice(v.as_bytes());
            key.push(0);
        }
        key.extend_from_slice(format!("{order:?}").as_bytes());
        for g in &ideal {
            g.key_bytes(&mut key);
        }
        Ring { field, vars, order, ideal, key }
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_polynomial(&self) -> bool {
        self.ideal.is_empty()
    }

    /// Content key for caches.
    pub fn key(&self) -> &[u8] {
        &self.key
    }

    /// The ambient polynomial ring (self if already polynomial).
    pub fn ambient(self: &Arc<Ring>) -> Arc<Ring> {
        if self.is_polynomial() {
            Arc::clone(self)
        } else {
            Arc::new(Ring::assemble(
                self.field,
                self.vars.clone(),
                self.order,
                Vec::new(),
            ))
        }
    }

    /// Default module order used for canonical storage.
    pub fn pot(&self) -> ModOrder {
        ModOrder::pot(self.order)
    }

    /// Ambient ring with one fresh variable prepended and an elimination
    /// order that kills it; used for intersections and radical membership.
    pub fn with_front_var(self: &Arc<Ring>, name: &str) -> Arc<Ring> {
        let mut vars = vec![name.to_string()];
        vars.extend(self.vars.iter().cloned());
        Arc::new(Ring::assemble(
            self.field,
            vars,
            MonoOrder::Elim { block: 1 },
            Vec::new(),
        ))
    }

    /// Reinterprets an element in a ring with one extra leading variable.
    pub fn embed_front(&self, v: &Vect) -> Vect {
        Vect {
            terms: v
                .terms
                .iter()
                .map(|t| {
                    let mut m = Vec::with_capacity(t.mono.len() + 1);
                    m.push(0);
                    m.extend_from_slice(&t.mono);
                    MTerm { comp: t.comp, coef: t.coef, mono: m }
                })
                .collect(),
        }
    }

    /// Drops the leading variable from an element not involving it.
    pub fn strip_front(&self, v: &Vect) -> Option<Vect> {
        let mut terms = Vec::with_capacity(v.terms.len());
        for t in &v.terms {
            if t.mono[0] != 0 {
                return None;
            }
            terms.push(MTerm { comp: t.comp, coef: t.coef, mono: t.mono[1..].to_vec() });
        }
        Some(Vect { terms })
    }

    /// Renders a polynomial with balanced coefficients, e.g. `x*y - z^2`.
    pub fn poly_string(&self, v: &Vect) -> String {
        let mut p = v.clone();
        p.terms.sort_by(|a, b| self.order.cmp(&b.mono, &a.mono));
        if p.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, t) in p.terms.iter().enumerate() {
            debug_assert_eq!(t.comp, 0, "poly_string needs a rank-one element");
            let c = self.field.balanced(t.coef);
            let mag = c.unsigned_abs();
            if i == 0 {
                if c < 0 {
                    out.push('-');
                }
            } else if c < 0 {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mono = self.mono_string(&t.mono);
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if mag != 1 {
                    out.push_str(&mag.to_string());
                    out.push('*');
                }
                out.push_str(&mono);
            }
        }
        out
    }

    fn mono_string(&self, m: &[u16]) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.iter().enumerate() {
            if e == 1 {
                parts.push(self.vars[i].clone());
            } else if e > 1 {
                parts.push(format!("{}^{}", self.vars[i], e));
            }
        }
        parts.join("*")
    }

    /// Parses polynomial text. `line` seeds error positions so documents can
    /// report real locations; pass 1 for standalone text.
    pub fn parse_poly(&self, text: &str, line: usize) -> Result<Vect> {
        let tokens = lex_poly(text, line)?;
        let mut p = PolyParser { ring: self, tokens: &tokens, pos: 0, line };
        let v = p.expr()?;
        if p.pos != tokens.len() {
            let t = &tokens[p.pos];
            return Err(p.err(t.col, format!("unexpected {:?} (missing operator?)", t.text)));
        }
        Ok(normalize(&self.field, self.pot(), v.terms))
    }
}

struct Token {
    text: String,
    col: usize,
    kind: TokKind,
}

#[derive(PartialEq, Clone, Copy)]
enum TokKind {
    Ident,
    Int,
    Op,
}

fn lex_poly(text: &str, line: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let col = i + 1;
        if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                s.push(bytes[i]);
                i += 1;
            }
            out.push(Token { text: s, col, kind: TokKind::Ident });
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                s.push(bytes[i]);
                i += 1;
            }
            out.push(Token { text: s, col, kind: TokKind::Int });
        } else if "+-*^()".contains(c) {
            out.push(Token { text: c.to_string(), col, kind: TokKind::Op });
            i += 1;
        } else {
            return Err(Error::Syntax {
                line,
                col,
                msg: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

struct PolyParser<'a> {
    ring: &'a Ring,
    tokens: &'a [Token],
    pos: usize,
    line: usize,
}

impl<'a> PolyParser<'a> {
    fn err(&self, col: usize, msg: String) -> Error {
        Error::Syntax { line: self.line, col, msg }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if let Some(t) = self.peek() {
            if t.kind == TokKind::Op && t.text == op {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn expr(&mut self) -> Result<Vect> {
        let ring = self.ring;
        let mut acc = if self.eat_op("-") {
            crate::poly::neg(&ring.field, &self.term()?)
        } else {
            self.term()?
        };
        loop {
            if self.eat_op("+") {
                let t = self.term()?;
                acc = crate::poly::add(&ring.field, ring.pot(), &acc, &t);
            } else if self.eat_op("-") {
                let t = self.term()?;
                acc = crate::poly::sub(&ring.field, ring.pot(), &acc, &t);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Vect> {
        let ring = self.ring;
        let mut acc = self.factor()?;
        while self.eat_op("*") {
            let f = self.factor()?;
            acc = crate::poly::mul_poly(&ring.field, ring.pot(), &acc, &f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Vect> {
        let base = self.atom()?;
        if self.eat_op("^") {
            let t = self
                .peek()
                .ok_or_else(|| self.err(self.end_col(), "exponent expected".into()))?;
            if t.kind != TokKind::Int {
                return Err(self.err(t.col, format!("exponent must be a number, got {:?}", t.text)));
            }
            let e: u16 = t
                .text
                .parse()
                .map_err(|_| self.err(t.col, format!("exponent {} out of range", t.text)))?;
            self.pos += 1;
            let ring = self.ring;
            let mut acc = Vect::constant(&ring.field, 1, ring.nvars());
            for _ in 0..e {
                acc = crate::poly::mul_poly(&ring.field, ring.pot(), &acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn end_col(&self) -> usize {
        self.tokens.last().map(|t| t.col + t.text.len()).unwrap_or(1)
    }

    fn atom(&mut self) -> Result<Vect> {
        let ring = self.ring;
        if self.eat_op("-") {
            let a = self.atom()?;
            return Ok(crate::poly::neg(&ring.field, &a));
        }
        if self.eat_op("(") {
            let e = self.expr()?;
            if !self.eat_op(")") {
                let col = self.peek().map(|t| t.col).unwrap_or_else(|| self.end_col());
                return Err(self.err(col, "expected ')'".into()));
            }
            return Ok(e);
        }
        let t = self
            .peek()
            .ok_or_else(|| self.err(self.end_col(), "expected a variable, number, or '('".into()))?;
        match t.kind {
            TokKind::Ident => {
                let idx = ring.vars.iter().position(|v| v == &t.text).ok_or_else(|| {
                    self.err(t.col, format!("unknown variable {:?}", t.text))
                })?;
                self.pos += 1;
                let mut m = vec![0u16; ring.nvars()];
                m[idx] = 1;
                Ok(Vect::term(0, 1, m))
            }
            TokKind::Int => {
                let v: i64 = t
                    .text
                    .parse()
                    .map_err(|_| self.err(t.col, format!("number {} out of range", t.text)))?;
                self.pos += 1;
                Ok(Vect::constant(&ring.field, v, ring.nvars()))
            }
            TokKind::Op => Err(self.err(t.col, format!("unexpected {:?}", t.text))),
        }
    }
}
