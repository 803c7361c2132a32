//! States, Hamiltonians, and the thermodynamic constructions built from them:
//! Gibbs states, dephasing, passive states, von Neumann entropy, and the
//! entropic-temperature solver behind total ergotropy.

use num_complex::Complex64;

use crate::linalg::{hermitian_eig, ComplexMatrix, HERM_TOL};
use crate::{Error, Result};

/// Slack below zero allowed for state eigenvalues.
pub const STATE_PSD_TOL: f64 = 1e-10;
/// Allowed deviation of tr ρ from one.
pub const TRACE_TOL: f64 = 1e-12;
/// |S(γ_{β*}) − target| budget for the entropic-temperature solver (nats).
pub const ENTROPY_MATCH_TOL: f64 = 1e-9;
/// Entropy targets below this are treated as exactly zero (β* = ∞).
const ENTROPY_ZERO_TOL: f64 = 1e-12;

/// Non-degenerate energy spectrum ε₀ < ε₁ < … < ε_{d−1} fixing the incoherent
/// basis. The basis itself is always the computational one.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    energies: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.len() < 2 {
            return Err(Error::InvalidSpectrum(
                "need at least two energy levels".into(),
            ));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidSpectrum("non-finite energy".into()));
        }
        if energies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpectrum(
                "spectrum must be strictly increasing".into(),
            ));
        }
        Ok(Self { energies })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, j: usize) -> f64 {
        self.energies[j]
    }

    pub fn ground(&self) -> f64 {
        self.energies[0]
    }

    pub fn top(&self) -> f64 {
        *self.energies.last().unwrap()
    }

    /// Bohr frequency ω_ij = ε_i − ε_j.
    pub fn gap(&self, i: usize, j: usize) -> f64 {
        self.energies[i] - self.energies[j]
    }

    /// True when two distinct ordered level pairs share the same gap (the
    /// resonant situation the GMAD construction formally excludes; we only
    /// surface it as a report flag since the constructed channel stays CPTP,
    /// Gibbs-preserving and strictly incoherent regardless).
    pub fn has_degenerate_gaps(&self) -> bool {
        let d = self.dim();
        let mut gaps = Vec::new();
        for i in 1..d {
            for j in 0..i {
                gaps.push(self.gap(i, j));
            }
        }
        gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        gaps.windows(2).any(|w| (w[1] - w[0]).abs() < 1e-12)
    }

    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::real_diagonal(&self.energies)
    }

    /// Spectrum mapped affinely onto [0, 1], with the (offset, scale) needed
    /// to undo the map: ε = offset + scale·ε′.
    pub fn normalized(&self) -> (Hamiltonian, f64, f64) {
        let offset = self.ground();
        let scale = self.top() - self.ground();
        let energies = self.energies.iter().map(|e| (e - offset) / scale).collect();
        (Hamiltonian { energies }, offset, scale)
    }
}

/// Inverse temperature; β = ∞ is a first-class value handled analytically
/// rather than as a large float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    pub fn finite(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Domain(format!(
                "inverse temperature must be finite and ≥ 0, got {value}"
            )));
        }
        Ok(Beta::Finite(value))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Beta::Infinite)
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Beta::Finite(v) => Some(*v),
            Beta::Infinite => None,
        }
    }
}

impl std::fmt::Display for Beta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Beta::Finite(v) => write!(f, "{v}"),
            Beta::Infinite => write!(f, "inf"),
        }
    }
}

/// d×d Hermitian, unit-trace, positive-semidefinite state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Full validation: Hermiticity, unit trace, and positivity (eigenvalues
    /// ≥ −1e−10). Meant for external inputs; internal constructions whose
    /// math already guarantees validity use [`DensityMatrix::trusted`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("matrix not square".into()));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let herm = matrix.herm_residual();
        if herm > HERM_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (residual {herm:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {} + {}i is not 1",
                tr.re, tr.im
            )));
        }
        let eig = hermitian_eig(&matrix.hermitize())?;
        let min = eig.min_eigenvalue();
        if min < -STATE_PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self {
            matrix: matrix.hermitize(),
        })
    }

    /// Wrap a matrix that is valid by construction (e.g. the output of a CPTP
    /// map applied to a valid state). Hermitizes to absorb rounding but skips
    /// the eigenvalue check.
    pub(crate) fn trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.herm_residual() < 1e-9);
        debug_assert!((matrix.trace().re - 1.0).abs() < 1e-9);
        Self {
            matrix: matrix.hermitize(),
        }
    }

    /// |ψ⟩⟨ψ| from an arbitrary nonzero vector (normalized internally).
    pub fn pure(ket: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if !(norm_sq.is_finite() && norm_sq > 0.0) {
            return Err(Error::InvalidState("ket has zero or invalid norm".into()));
        }
        let norm = norm_sq.sqrt();
        let normalized: Vec<Complex64> = ket.iter().map(|z| z / norm).collect();
        Ok(Self::trusted(crate::linalg::outer(&normalized, &normalized)))
    }

    pub fn basis_state(dim: usize, j: usize) -> Self {
        let mut ket = vec![Complex64::new(0.0, 0.0); dim];
        ket[j] = Complex64::new(1.0, 0.0);
        Self::pure(&ket).unwrap()
    }

    pub fn from_populations(pops: &[f64]) -> Result<Self> {
        let sum: f64 = pops.iter().sum();
        if pops.iter().any(|&p| p < -STATE_PSD_TOL) || (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(
                "populations must be nonnegative and sum to 1".into(),
            ));
        }
        Ok(Self::trusted(ComplexMatrix::real_diagonal(pops)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::trusted(ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn population(&self, j: usize) -> f64 {
        self.matrix[(j, j)].re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.population(j)).collect()
    }

    /// Eigenvalues sorted descending (raw, possibly including −1e−16 noise).
    pub fn eigenvalues_desc(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix)
            .expect("density matrix is Hermitian")
            .eigenvalues
    }

    /// tr[ρH].
    pub fn energy(&self, h: &Hamiltonian) -> f64 {
        assert_eq!(self.dim(), h.dim(), "state/Hamiltonian dimension mismatch");
        (0..self.dim()).map(|j| self.population(j) * h.energy(j)).sum()
    }

    /// ½‖ρ − σ‖₁, the trace distance.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let diff = self.matrix.sub(&other.matrix);
        let e = hermitian_eig(&diff.hermitize()).expect("difference is Hermitian");
        0.5 * e.eigenvalues.iter().map(|l| l.abs()).sum::<f64>()
    }
}

/// γ_β ∝ e^{−βH}; β = ∞ gives the ground
/// projector (the ground level is unique since spectra are non-degenerate).
pub fn gibbs_state(h: &Hamiltonian, beta: Beta) -> DensityMatrix {
    DensityMatrix::trusted(ComplexMatrix::real_diagonal(&gibbs_populations(h, beta)))
}

fn gibbs_populations(h: &Hamiltonian, beta: Beta) -> Vec<f64> {
    let d = h.dim();
    match beta {
        Beta::Infinite => {
            let mut p = vec![0.0; d];
            p[0] = 1.0;
            p
        }
        Beta::Finite(b) => {
            // shift by the ground energy so the largest weight is exactly 1
            let w: Vec<f64> = h
                .energies()
                .iter()
                .map(|e| (-b * (e - h.ground())).exp())
                .collect();
            let z: f64 = w.iter().sum();
            w.into_iter().map(|x| x / z).collect()
        }
    }
}

/// Mean energy of γ_β without building the state.
pub fn gibbs_energy(h: &Hamiltonian, beta: Beta) -> f64 {
    match beta {
        Beta::Infinite => h.ground(),
        Beta::Finite(_) => gibbs_populations(h, beta)
            .iter()
            .zip(h.energies())
            .map(|(p, e)| p * e)
            .sum(),
    }
}

/// Entropy of γ_β in nats.
pub fn gibbs_entropy(h: &Hamiltonian, beta: Beta) -> f64 {
    match beta {
        Beta::Infinite => 0.0,
        Beta::Finite(_) => shannon_entropy(&gibbs_populations(h, beta)),
    }
}

fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

/// Total dephasing Δ: kill every off-diagonal entry (the incoherent basis is
/// the computational one, in which Hamiltonians are diagonal by convention).
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    DensityMatrix::trusted(ComplexMatrix::from_fn(d, d, |r, c| {
        if r == c {
            Complex64::new(rho.matrix()[(r, c)].re, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// Passive state: descending eigenvalues of ρ placed on ascending energies.
/// Tiny negative eigenvalues are clipped to zero and the spectrum
/// renormalized.
pub fn passive_state(rho: &DensityMatrix, h: &Hamiltonian) -> DensityMatrix {
    assert_eq!(rho.dim(), h.dim());
    let mut lambda = rho.eigenvalues_desc();
    for l in lambda.iter_mut() {
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    let sum: f64 = lambda.iter().sum();
    for l in lambda.iter_mut() {
        *l /= sum;
    }
    DensityMatrix::trusted(ComplexMatrix::real_diagonal(&lambda))
}

/// −Σ λ ln λ in nats, with 0·ln 0 = 0; eigenvalue noise below zero is
/// ignored.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(
        &rho.eigenvalues_desc()
            .into_iter()
            .filter(|&l| l > 0.0)
            .collect::<Vec<_>>(),
    )
}

/// β* ≥ 0 with S(γ_{β*}) matching a target entropy; flagged infinite for a
/// (numerically) zero target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropicTemperature {
    pub beta_star: Beta,
}

/// Solve S(γ_β) = target for β ∈ [0, ∞].
///
/// S(γ_β) decreases monotonically from ln d at β = 0 to 0 at β = ∞, so a
/// bracketing bisection is unconditionally safe: double the upper bracket
/// until the entropy drops below target, then bisect.
pub fn solve_entropic_beta(h: &Hamiltonian, target_entropy: f64) -> Result<EntropicTemperature> {
    let max_entropy = (h.dim() as f64).ln();
    if !target_entropy.is_finite()
        || target_entropy < -ENTROPY_ZERO_TOL
        || target_entropy > max_entropy + ENTROPY_ZERO_TOL
    {
        return Err(Error::Domain(format!(
            "target entropy {target_entropy} outside [0, ln {}]",
            h.dim()
        )));
    }
    if target_entropy < ENTROPY_ZERO_TOL {
        return Ok(EntropicTemperature {
            beta_star: Beta::Infinite,
        });
    }
    if target_entropy >= max_entropy - ENTROPY_ZERO_TOL {
        return Ok(EntropicTemperature {
            beta_star: Beta::Finite(0.0),
        });
    }
    let s = |b: f64| gibbs_entropy(h, Beta::Finite(b));
    let mut hi = 1.0;
    while s(hi) > target_entropy {
        hi *= 2.0;
        if hi > 1e18 {
            // unreachable for targets above ENTROPY_ZERO_TOL, but don't loop forever
            return Ok(EntropicTemperature {
                beta_star: Beta::Infinite,
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if s(mid) > target_entropy {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    debug_assert!((s(beta) - target_entropy).abs() < ENTROPY_MATCH_TOL);
    Ok(EntropicTemperature {
        beta_star: Beta::Finite(beta),
    })
}

/// Energies of a two-cell composite in tensor order: entry i·d₂ + j holds
/// ε₁_i + ε₂_j. (The composite generally has a degenerate, unsorted spectrum,
/// so it is returned as a plain energy list rather than a `Hamiltonian`.)
pub fn composite_energies(h1: &Hamiltonian, h2: &Hamiltonian) -> Vec<f64> {
    let mut out = Vec::with_capacity(h1.dim() * h2.dim());
    for &e1 in h1.energies() {
        for &e2 in h2.energies() {
            out.push(e1 + e2);
        }
    }
    out
}
