//! Arithmetic in the prime field `F_p` for a runtime modulus.
//!
//! Elements are canonical residues `0..p` stored in `u32`; intermediate
//! products go through `u64`. Inverses use Fermat's little theorem, which is
//! plenty at the sizes involved here.

/// A prime field `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    p: u32,
}

impl Field {
    /// Builds the field, checking that `p` is a prime at least 2.
    pub fn new(p: u32) -> Option<Field> {
        if is_prime(p) {
            Some(Field { p })
        } else {
            None
        }
    }

    /// The modulus.
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Canonical residue of a signed integer.
    pub fn from_i64(&self, v: i64) -> u32 {
        let p = self.p as i64;
        (((v % p) + p) % p) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + (self.p - b) as u64;
        (s % self.p as u64) as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0, "inverse of zero");
        self.pow(a, self.p as u64 - 2)
    }

    /// Balanced representative in `(-p/2, p/2]`, used for printing.
    pub fn balanced(&self, a: u32) -> i64 {
        if a as u64 * 2 > self.p as u64 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d * d <= p as u64 {
        if p as u64 % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}
