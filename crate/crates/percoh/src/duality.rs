//! The dualizing module, Grothendieck-style duals of bounded complexes,
//! and an explicit biduality witness.
//!
//! For a quotient `R = S/I` of a polynomial ring in `n` variables with
//! `dim R = d`, the dualizing module is `Ext^{n-d}_S(R, S)`. The engine
//! requires the other Ext modules to vanish (the Cohen-Macaulay condition)
//! and refuses rings where they do not: on such rings dualizing would need
//! a genuine complex, which this implementation does not model.
//!
//! Duals are computed as `Hom(P, w[d])` for a free approximation `P` of
//! the argument, cut above the honest amplitude. Biduality is witnessed by
//! a zigzag through a homotopy pushout `B` with certified quasi-isos
//! `F -> B <- DDF`, avoiding any uncheckable "equality up to homotopy".

use crate::approx::{eval_adjoint, free_approx, hom_complex};
use crate::complex::{
    cone, direct_sum, factor_into_tau_le, pair_into_sum, tau_ge, tau_le, ChainMap, Complex,
};
use crate::error::{Error, Result};
use crate::ideal::ring_dim;
use crate::module::{prune, PresentedModule};
use crate::poly::Mat;
use crate::ring::Ring;
use std::sync::Arc;

/// The dualizing module of a Cohen-Macaulay quotient ring.
#[derive(Debug, Clone)]
pub struct DualizingData {
    pub ring: Arc<Ring>,
    /// The dualizing module, pruned, as a module over `ring`.
    pub omega: PresentedModule,
    /// Krull dimension `d` of the ring.
    pub dim: i64,
    /// Number of ambient variables.
    pub ambient_dim: usize,
}

/// Computes the dualizing module, rejecting non-Cohen-Macaulay rings.
pub fn dualizing_data(ring: &Arc<Ring>) -> Result<DualizingData> {
    let n = ring.nvars();
    let d = ring_dim(ring);
    if ring.ideal.is_empty() {
        return Ok(DualizingData {
            ring: ring.clone(),
            omega: PresentedModule::free(ring, 1),
            dim: d,
            ambient_dim: n,
        });
    }
    let s = ring.ambient();
    // The ring as a module over its ambient polynomial ring.
    let m = PresentedModule::new(
        s.clone(),
        1,
        Mat { rows: 1, cols: ring.ideal.clone() },
    )?;
    let c = Complex::from_module(&m, 0);
    let fa = free_approx(&c, -(n as i64) - 2)?;
    let w = Complex::from_module(&PresentedModule::free(&s, 1), 0);
    let h = hom_complex(&fa.complex, &w)?;
    let j0 = n as i64 - d;
    let mut bad = Vec::new();
    for j in 0..=(n as i64) {
        if j == j0 {
            continue;
        }
        if !h.complex.coh_is_zero_at(j) {
            bad.push(j);
        }
    }
    if !bad.is_empty() {
        return Err(Error::NotCohenMacaulay(format!(
            "ring has codimension {} but nonzero Ext against the ambient ring in degrees {:?}",
            j0, bad
        )));
    }
    let omega_s = prune(&h.complex.cohomology(j0)).0;
    // Reinterpret over the quotient: the relations get reduced there.
    let omega = PresentedModule::new(ring.clone(), omega_s.gens, omega_s.rels.clone())?;
    let omega = prune(&omega).0;
    if omega.is_zero_module() {
        return Err(Error::Internal("dualizing module computed as zero".into()));
    }
    Ok(DualizingData { ring: ring.clone(), omega, dim: d, ambient_dim: n })
}

impl DualizingData {
    /// The dualizing module placed in degree `-dim`.
    pub fn shifted_complex(&self) -> Arc<Complex> {
        Complex::from_module(&self.omega, -self.dim)
    }
}

/// Internal dual model: correct cohomology everywhere at and below the
/// honest top `-a`, where `a` is the lowest cohomological degree of `f`;
/// the presentation below the honest bottom is left as computed.
pub fn dualize_model(f: &Arc<Complex>, dd: &DualizingData) -> Result<Arc<Complex>> {
    assert_eq!(*f.ring, *dd.ring);
    let Some((a, _)) = f.coh_bounds() else {
        return Ok(Complex::zero(&f.ring));
    };
    let p = free_approx(f, a - dd.dim - 2)?;
    let h = hom_complex(&p.complex, &dd.shifted_complex())?;
    let (model, _) = tau_le(&h.complex, -a);
    Ok(model)
}

/// The dual of `f`, cut to its honest amplitude and pruned.
pub fn dualize(f: &Arc<Complex>, dd: &DualizingData) -> Result<Arc<Complex>> {
    let Some((_, b)) = f.coh_bounds() else {
        return Ok(Complex::zero(&f.ring));
    };
    let model = dualize_model(f, dd)?;
    let (cut, _) = tau_ge(&model, -dd.dim - b);
    Ok(crate::complex::prune_complex(&cut).0)
}

/// A certified witness that the double dual agrees with the original:
/// both legs of `source -> bridge <- double_dual` are quasi-isomorphisms,
/// checked degree by degree at construction time.
#[derive(Debug, Clone)]
pub struct BidualityWitness {
    pub dual: Arc<Complex>,
    pub double_dual: Arc<Complex>,
    pub bridge: Arc<Complex>,
    pub from_source: ChainMap,
    pub from_double_dual: ChainMap,
}

/// Builds the biduality witness for `f`, retrying with deeper
/// approximations if a certification fails.
pub fn biduality_witness(f: &Arc<Complex>, dd: &DualizingData) -> Result<BidualityWitness> {
    assert_eq!(*f.ring, *dd.ring);
    let Some((a, b)) = f.coh_bounds() else {
        let z = Complex::zero(&f.ring);
        return Ok(BidualityWitness {
            dual: z.clone(),
            double_dual: z.clone(),
            bridge: z.clone(),
            from_source: ChainMap::zero(f, &z),
            from_double_dual: ChainMap::zero(&z.clone(), &z),
        });
    };
    let w = dd.shifted_complex();
    let mut last_err = None;
    for extra in 0..=(dd.dim.max(0) + 1) {
        match witness_attempt(f, dd, &w, a, b, extra) {
            Ok(wit) => return Ok(wit),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Internal("biduality certification failed".into())))
}

fn witness_attempt(
    f: &Arc<Complex>,
    dd: &DualizingData,
    w: &Arc<Complex>,
    a: i64,
    b: i64,
    extra: i64,
) -> Result<BidualityWitness> {
    let p = free_approx(f, a - dd.dim - 2 - extra)?;
    let (_, ix) = tau_le(&p.complex, b);
    let eps_x = p.eps.compose(&ix);

    let hom_p = hom_complex(&p.complex, w)?;
    let (df_model, df_incl) = tau_le(&hom_p.complex, -a);
    let Some((a2, _)) = df_model.coh_bounds() else {
        return Err(Error::Internal("dual of a nonzero complex computed as acyclic".into()));
    };
    let p2 = free_approx(&df_model, a2 - dd.dim - 2 - extra)?;
    let eprime = df_incl.compose(&p2.eps);
    let hom_p2 = hom_complex(&p2.complex, w)?;
    let phi0 = eval_adjoint(&p.complex, &eprime, &hom_p, &hom_p2)?;

    let (dd_model, dd_incl) = tau_le(&hom_p2.complex, b);
    let phi = factor_into_tau_le(&dd_model, &dd_incl, b, &phi0.compose(&ix))?;

    let sum = direct_sum(f, &dd_model);
    let pair = pair_into_sum(&eps_x.negate(), &phi, &sum)?;
    let cd = cone(&pair);
    let (bridge, pi) = tau_ge(&cd.complex, a);
    let from_source = pi.compose(&cd.incl_tgt.compose(&sum.incl_a));
    let from_double_dual = pi.compose(&cd.incl_tgt.compose(&sum.incl_b));
    if !from_source.is_quasi_iso() {
        return Err(Error::Internal(
            "biduality bridge leg from the source failed certification".into(),
        ));
    }
    if !from_double_dual.is_quasi_iso() {
        return Err(Error::Internal(
            "biduality bridge leg from the double dual failed certification".into(),
        ));
    }
    Ok(BidualityWitness { dual: df_model, double_dual: dd_model, bridge, from_source, from_double_dual })
}
