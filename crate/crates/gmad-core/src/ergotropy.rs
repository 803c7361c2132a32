//! Work quantifiers on states: ergotropy, incoherent/coherent splits, total
//! (regularized) ergotropy, and local ergotropy of product states. All of
//! them are closed forms — eigendecompose, sort, subtract; unitary or
//! permutation sampling appears only in the tests as independent oracles.

use num_complex::Complex64;

use crate::states::{
    dephase, gibbs_energy, solve_entropic_beta, von_neumann_entropy, DensityMatrix,
    EntropicTemperature, Hamiltonian,
};

/// Maximum work unitarily extractable: tr[ρH] minus the passive energy
/// (descending eigenvalues paired with ascending energies).
pub fn ergotropy(rho: &DensityMatrix, h: &Hamiltonian) -> f64 {
    ergotropy_with_energies(rho, h.energies())
}

/// Ergotropy against a raw energy list, which may be degenerate and
/// unsorted — the form needed for composite (multi-cell) spectra.
pub fn ergotropy_with_energies(rho: &DensityMatrix, energies: &[f64]) -> f64 {
    assert_eq!(rho.dim(), energies.len(), "state/spectrum dimension mismatch");
    let lambda = rho.eigenvalues_desc();
    extracted(rho, energies, &lambda)
}

/// Work extractable by energy-basis permutations alone; equals the ergotropy
/// of the dephased state.
pub fn incoherent_ergotropy(rho: &DensityMatrix, h: &Hamiltonian) -> f64 {
    incoherent_ergotropy_with_energies(rho, h.energies())
}

pub fn incoherent_ergotropy_with_energies(rho: &DensityMatrix, energies: &[f64]) -> f64 {
    assert_eq!(rho.dim(), energies.len(), "state/spectrum dimension mismatch");
    let mut pops = rho.populations();
    pops.sort_by(|a, b| b.partial_cmp(a).unwrap());
    extracted(rho, energies, &pops)
}

fn extracted(rho: &DensityMatrix, energies: &[f64], spectrum_desc: &[f64]) -> f64 {
    let mut ascending = energies.to_vec();
    ascending.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let current: f64 = (0..rho.dim())
        .map(|j| rho.population(j) * energies[j])
        .sum();
    let rest: f64 = spectrum_desc
        .iter()
        .zip(&ascending)
        .map(|(p, e)| p * e)
        .sum();
    (current - rest).max(0.0)
}

/// E_c = E − E_i, the part of the extractable work stored in coherences.
/// Round-off can push the difference a hair below zero; it is clipped.
pub fn coherent_ergotropy(rho: &DensityMatrix, h: &Hamiltonian) -> f64 {
    let raw = ergotropy(rho, h) - incoherent_ergotropy(rho, h);
    if raw < 0.0 {
        debug_assert!(raw > -1e-10, "coherent ergotropy clipped by {raw:.3e}");
        return 0.0;
    }
    raw
}

/// Work extractable in the asymptotic many-copy limit: tr[ρH] minus the
/// energy of the Gibbs state with the same entropy.
pub fn total_ergotropy(rho: &DensityMatrix, h: &Hamiltonian) -> f64 {
    assert_eq!(rho.dim(), h.dim(), "state/spectrum dimension mismatch");
    let t = entropic_beta_of(rho, h);
    rho.energy(h) - gibbs_energy(h, t.beta_star)
}

/// Regularized coherent contribution: E_tot(ρ) − E_tot(Δρ).
pub fn total_coherent_ergotropy(rho: &DensityMatrix, h: &Hamiltonian) -> f64 {
    total_ergotropy(rho, h) - total_ergotropy(&dephase(rho), h)
}

/// β* of the Gibbs state sharing ρ's entropy.
pub fn entropic_beta_of(rho: &DensityMatrix, h: &Hamiltonian) -> EntropicTemperature {
    let s = von_neumann_entropy(rho).max(0.0);
    solve_entropic_beta(h, s).expect("entropy of a valid state lies in [0, ln d]")
}

/// All five quantifiers evaluated consistently on one state.
#[derive(Clone, Copy, Debug)]
pub struct ErgotropyBreakdown {
    pub ergotropy: f64,
    pub incoherent: f64,
    pub coherent: f64,
    pub total: f64,
    pub total_coherent: f64,
}

pub fn breakdown(rho: &DensityMatrix, h: &Hamiltonian) -> ErgotropyBreakdown {
    let e = ergotropy(rho, h);
    let ei = incoherent_ergotropy(rho, h);
    let total = total_ergotropy(rho, h);
    ErgotropyBreakdown {
        ergotropy: e,
        incoherent: ei,
        coherent: (e - ei).max(0.0),
        total,
        total_coherent: total - total_ergotropy(&dephase(rho), h),
    }
}

/// Work extractable from a product state by local unitaries: the sum of the
/// cell ergotropies (local extraction cannot exploit correlations that are
/// not there).
pub fn local_ergotropy_product(rhos: &[DensityMatrix], hs: &[Hamiltonian]) -> f64 {
    assert_eq!(rhos.len(), hs.len(), "one Hamiltonian per cell");
    rhos.iter().zip(hs).map(|(r, h)| ergotropy(r, h)).sum()
}

/// The pure state with ρ's populations: |ψ⟩ = Σ √p_j e^{iθ_j}|j⟩ with θ_0 = 0
/// and θ_j the phase of ρ_0j where defined (any phase choice works for the
/// coherent-ergotropy comparison; this one is deterministic).
pub fn pure_with_same_populations(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    let ket: Vec<Complex64> = (0..d)
        .map(|j| {
            let amp = rho.population(j).max(0.0).sqrt();
            let theta = if j > 0 && rho.matrix()[(0, j)].norm() > 1e-15 {
                rho.matrix()[(0, j)].arg()
            } else {
                0.0
            };
            Complex64::from_polar(amp, theta)
        })
        .collect();
    DensityMatrix::pure(&ket).expect("populations sum to one")
}
