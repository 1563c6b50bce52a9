//! Certified computations with perverse coherent t-structures on bounded
//! complexes over affine coordinate rings `F_p[x_1..x_n]/I`.
//!
//! The crate is layered bottom-up: exact linear algebra over quotient rings
//! (Groebner bases with lift certificates, syzygies, dimension theory), then
//! presented modules and bounded complexes, free approximations with strict
//! lifting, Cohen-Macaulay duality, declared perversity data, and finally the
//! truncation engine itself. Every engine answer carries chain-level
//! certificates that are re-checked before anything is returned.

pub mod approx;
pub mod complex;
pub mod duality;
pub mod engine;
pub mod error;
pub mod field;
pub mod gamma;
pub mod groebner;
pub mod ideal;
pub mod member;
pub mod module;
pub mod monomial;
pub mod poly;
pub mod report;
pub mod ring;
pub mod session;
pub mod space;
pub mod stalk;

pub use error::Error;
pub use ring::Ring;
