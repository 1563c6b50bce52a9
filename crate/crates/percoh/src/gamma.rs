//! Sections-with-supports probe: the tower `Ext^k(R/J^t, C)` for growing
//! `t`, with its transition maps, reported per degree together with a
//! stabilization flag.
//!
//! Towers coming from coherent cohomology flatten out; genuinely local
//! contributions (completions along `J`) keep growing forever. The oracle is
//! advisory: it certifies each finite table it prints, while non-coherence
//! itself is witnessed by the failure of the final transition steps to be
//! isomorphisms at the requested cutoff.

use crate::approx::{free_approx, hom_complex, hom_precompose};
use crate::complex::{ChainMap, Complex};
use crate::error::Result;
use crate::ideal::{clean_gens, ideal_product};
use crate::module::{prune, PresentedModule};
use crate::poly::{Mat, Vect};
use std::collections::BTreeMap;
use std::sync::Arc;

/// One degree of the tower.
#[derive(Debug)]
pub struct GammaRow {
    pub degree: i64,
    /// Pruned `Ext^degree(R/J^t, C)` for `t = 1..=cutoff`.
    pub modules: Vec<PresentedModule>,
    /// Whether the transition `t -> t+1` induces an isomorphism here.
    pub iso_steps: Vec<bool>,
    /// The tower is flat at the end: its last two steps are isomorphisms.
    pub stabilized: bool,
}

/// Computes the tower `Ext^k(R/J^t, C)` for `k` in `lo..=hi` and
/// `t = 1..=cutoff`, with the maps induced by `R/J^{t+1} -> R/J^t`.
pub fn gamma_sections_oracle(
    c: &Arc<Complex>,
    j_gens: &[Vect],
    lo: i64,
    hi: i64,
    cutoff: usize,
) -> Result<Vec<GammaRow>> {
    assert!(cutoff >= 1, "the tower needs at least one stage");
    assert!(lo <= hi, "empty degree window");
    let ring = &c.ring;
    let j1 = clean_gens(ring, j_gens);

    let Some((a_c, _)) = c.coh_bounds() else {
        // Exact target: every stage of the tower vanishes.
        return Ok((lo..=hi)
            .map(|k| GammaRow {
                degree: k,
                modules: vec![PresentedModule::zero(ring); cutoff],
                iso_steps: vec![true; cutoff.saturating_sub(1)],
                stabilized: cutoff >= 3,
            })
            .collect());
    };
    let depth = a_c - hi - 2;

    // Stage data: the cyclic quotient, its approximation, and Hom into `C`.
    let mut powers = j1.clone();
    let mut stages = Vec::with_capacity(cutoff);
    for t in 1..=cutoff {
        let m = PresentedModule::quotient_by_ideal(ring, &powers);
        let cm = Complex::from_module(&m, 0);
        let fa = free_approx(&cm, depth)?;
        let h = hom_complex(&fa.complex, c)?;
        stages.push((cm, fa, h));
        if t < cutoff {
            powers = ideal_product(ring, &powers, &j1);
        }
    }

    // Transition `t -> t+1`: precompose with a lift of the natural
    // surjection `R/J^{t+1} -> R/J^t` through the approximations.
    let mut transitions: Vec<ChainMap> = Vec::with_capacity(cutoff.saturating_sub(1));
    for t in 0..cutoff.saturating_sub(1) {
        let (cm_t, fa_t, h_t) = &stages[t];
        let (cm_n, fa_n, h_n) = &stages[t + 1];
        let onto = ChainMap::new(
            Arc::clone(cm_n),
            Arc::clone(cm_t),
            BTreeMap::from([(0, Mat::identity(1, ring.nvars()))]),
        )?;
        let lifted = fa_t.lift_into(&onto.compose(&fa_n.eps))?;
        transitions.push(hom_precompose(h_t, &lifted, h_n)?);
    }

    let mut rows = Vec::new();
    for k in lo..=hi {
        let modules: Vec<PresentedModule> =
            stages.iter().map(|(_, _, h)| prune(&h.complex.cohomology(k)).0).collect();
        let iso_steps: Vec<bool> = transitions
            .iter()
            .map(|tr| tr.induced_on_cohomology(k).is_isomorphism())
            .collect();
        let n = iso_steps.len();
        let stabilized = n >= 2 && iso_steps[n - 1] && iso_steps[n - 2];
        rows.push(GammaRow { degree: k, modules, iso_steps, stabilized });
    }
    Ok(rows)
}
