//! Generalized multilevel amplitude damping channels: construction from
//! unitary interaction blocks, direct (Kraus-free) application, structural
//! verification, Choi fingerprints, and reduction to minimal Kraus form.

use num_complex::Complex64;

use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::sampling;
use crate::states::{gibbs_state, Beta, DensityMatrix, Hamiltonian};
use crate::{Error, Result};

/// ‖Σ K†K − I‖∞ budget for trace preservation, Choi PSD slack, and the
/// Choi-distance threshold below which two channels count as equal.
pub const CHANNEL_TOL: f64 = 1e-10;
/// Unitarity budget for supplied interaction blocks.
pub const UNITARY_TOL: f64 = 1e-10;
/// Relative tolerance for detailed-balance ratios.
pub const DB_REL_TOL: f64 = 1e-9;
/// Level pairs whose transition probabilities are both below this are skipped
/// in the detailed-balance check.
pub const DB_SKIP_TOL: f64 = 1e-14;

/// Interaction unitaries u^(1) … u^(d−1); block m is (m+1)×(m+1) and couples
/// levels 0…m. By convention u^(0) = (1).
#[derive(Clone, Debug)]
pub struct UnitaryBlocks {
    blocks: Vec<ComplexMatrix>,
}

impl UnitaryBlocks {
    pub fn new(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Shape("need at least one block (d ≥ 2)".into()));
        }
        for (idx, b) in blocks.iter().enumerate() {
            let m = idx + 1;
            if b.rows() != m + 1 || b.cols() != m + 1 {
                return Err(Error::Shape(format!(
                    "block {m} must be {}×{}, got {}×{}",
                    m + 1,
                    m + 1,
                    b.rows(),
                    b.cols()
                )));
            }
            let residual = b
                .adjoint()
                .matmul(b)
                .sub(&ComplexMatrix::identity(m + 1))
                .max_abs();
            if residual > UNITARY_TOL {
                return Err(Error::NotUnitary { block: m, residual });
            }
        }
        Ok(Self { blocks })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            blocks: (1..dim).map(|m| ComplexMatrix::identity(m + 1)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.blocks.len() + 1
    }

    /// u^(m) for m ≥ 1.
    pub fn block(&self, m: usize) -> &ComplexMatrix {
        &self.blocks[m - 1]
    }

    /// u^(m)_{ij}, extended by the convention u^(0)_{00} = 1.
    fn entry(&self, m: usize, i: usize, j: usize) -> Complex64 {
        if m == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            self.block(m)[(i, j)]
        }
    }

    /// Whether every block satisfies |u_ij| = |u_ji| — the microreversibility
    /// condition under which detailed balance holds.
    pub fn symmetric_moduli(&self) -> bool {
        self.blocks.iter().all(|b| {
            let n = b.rows();
            (0..n).all(|i| {
                (0..i).all(|j| (b[(i, j)].norm() - b[(j, i)].norm()).abs() < 1e-12)
            })
        })
    }
}

/// Everything needed to construct a GMAD channel.
#[derive(Clone, Debug)]
pub struct GmadSpec {
    hamiltonian: Hamiltonian,
    beta: Beta,
    unitaries: UnitaryBlocks,
}

impl GmadSpec {
    pub fn new(hamiltonian: Hamiltonian, beta: Beta, unitaries: UnitaryBlocks) -> Result<Self> {
        if unitaries.dim() != hamiltonian.dim() {
            return Err(Error::Shape(format!(
                "unitary blocks describe a {}-level system, Hamiltonian a {}-level one",
                unitaries.dim(),
                hamiltonian.dim()
            )));
        }
        Ok(Self {
            hamiltonian,
            beta,
            unitaries,
        })
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn unitaries(&self) -> &UnitaryBlocks {
        &self.unitaries
    }
}

/// Thermal weights entering the Kraus coefficients. `r[m][j]` (j ≤ m) is the
/// amplitude Z^{−1/2} e^{−βω_mj/2}; `tau[l][j]` (j < l) is the probability
/// e^{−βω_lj}/Z. Zero temperature is handled exactly: Z = 1, all downhill
/// weights vanish, r_mm = 1.
struct Rates {
    z: f64,
    r: Vec<Vec<f64>>,
    tau: Vec<Vec<f64>>,
}

impl Rates {
    fn new(h: &Hamiltonian, beta: Beta) -> Self {
        let d = h.dim();
        match beta {
            Beta::Infinite => {
                let r = (0..d)
                    .map(|m| (0..=m).map(|j| if j == m { 1.0 } else { 0.0 }).collect())
                    .collect();
                let tau = (0..d).map(|l| vec![0.0; l]).collect();
                Rates { z: 1.0, r, tau }
            }
            Beta::Finite(b) => {
                let mut z = 1.0;
                for m in 1..d {
                    for j in 0..m {
                        z += (-b * h.gap(m, j)).exp();
                    }
                }
                let r = (0..d)
                    .map(|m| {
                        (0..=m)
                            .map(|j| (-0.5 * b * h.gap(m, j)).exp() / z.sqrt())
                            .collect()
                    })
                    .collect();
                let tau = (0..d)
                    .map(|l| (0..l).map(|j| (-b * h.gap(l, j)).exp() / z).collect())
                    .collect();
                Rates { z, r, tau }
            }
        }
    }
}

/// Construction metadata carried by channels built through [`build_gmad`];
/// lets verification know the target temperature and whether detailed
/// balance is expected to hold.
#[derive(Clone, Copy, Debug)]
pub struct GmadMeta {
    pub beta: Beta,
    pub symmetric_blocks: bool,
}

/// A channel in Kraus form together with the system Hamiltonian fixing the
/// energy eigenbasis. Immutable once built.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    hamiltonian: Hamiltonian,
    kraus: Vec<ComplexMatrix>,
    gmad: Option<GmadMeta>,
}

impl KrausChannel {
    pub fn new(hamiltonian: Hamiltonian, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_meta(hamiltonian, kraus, None)
    }

    fn with_meta(
        hamiltonian: Hamiltonian,
        kraus: Vec<ComplexMatrix>,
        gmad: Option<GmadMeta>,
    ) -> Result<Self> {
        let d = hamiltonian.dim();
        if kraus.is_empty() {
            return Err(Error::Shape("channel needs at least one Kraus operator".into()));
        }
        if kraus.iter().any(|k| k.rows() != d || k.cols() != d) {
            return Err(Error::Shape(format!("Kraus operators must be {d}×{d}")));
        }
        let ch = Self {
            hamiltonian,
            kraus,
            gmad,
        };
        let residual = ch.trace_residual();
        if residual > CHANNEL_TOL {
            return Err(Error::Structure(format!(
                "not trace preserving: ‖ΣK†K − I‖∞ = {residual:.3e}"
            )));
        }
        Ok(ch)
    }

    /// The do-nothing channel (single identity Kraus operator).
    pub fn identity(hamiltonian: Hamiltonian) -> Self {
        let d = hamiltonian.dim();
        Self {
            hamiltonian,
            kraus: vec![ComplexMatrix::identity(d)],
            gmad: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn gmad_meta(&self) -> Option<&GmadMeta> {
        self.gmad.as_ref()
    }

    /// ‖Σ K†K − I‖∞.
    pub fn trace_residual(&self) -> f64 {
        let d = self.dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for k in &self.kraus {
            sum = sum.add(&k.adjoint().matmul(k));
        }
        sum.sub(&ComplexMatrix::identity(d)).max_abs()
    }

    /// Transition probabilities P_{i|j} = Σ_K |K_ij|² (i ≠ j): the total
    /// weight of population flowing j → i through jump operators.
    fn transition_probabilities(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        let mut p = vec![vec![0.0; d]; d];
        for k in &self.kraus {
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        p[i][j] += k[(i, j)].norm_sqr();
                    }
                }
            }
        }
        p
    }
}

/// Assemble the full (non-minimal) GMAD Kraus list.
///
/// Off-diagonal operators come first, sorted by (m, j, i) — block, source
/// level, target level — then the damping-type diagonal operators sorted by
/// (i, j), and the survival operator K^(D)_00 last. The ordering is part of
/// the channel's serialized identity, so keep it stable.
pub fn build_gmad(spec: &GmadSpec) -> Result<KrausChannel> {
    let d = spec.hamiltonian.dim();
    let rates = Rates::new(&spec.hamiltonian, spec.beta);
    let mut kraus = Vec::with_capacity(d * (d * d - 1) / 3 + d * (d - 1) / 2 + 1);

    for m in 1..d {
        for j in 0..=m {
            for i in 0..=m {
                if i == j {
                    continue;
                }
                let gamma = spec.unitaries.entry(m, i, j) * rates.r[m][j];
                let mut k = ComplexMatrix::zeros(d, d);
                k[(i, j)] = gamma;
                kraus.push(k);
            }
        }
    }
    for i in 1..d {
        for j in 0..i {
            // r_ij [ I + (u^(i)_jj − 1)|j⟩⟨j| ]
            let mut k = ComplexMatrix::identity(d).scale_re(rates.r[i][j]);
            k[(j, j)] = spec.unitaries.entry(i, j, j) * rates.r[i][j];
            kraus.push(k);
        }
    }
    let survival: Vec<Complex64> = (0..d)
        .map(|k| spec.unitaries.entry(k, k, k) / rates.z.sqrt())
        .collect();
    kraus.push(ComplexMatrix::diagonal(&survival));

    KrausChannel::with_meta(
        spec.hamiltonian.clone(),
        kraus,
        Some(GmadMeta {
            beta: spec.beta,
            symmetric_blocks: spec.unitaries.symmetric_moduli(),
        }),
    )
}

/// Three-level GMAD family driven by two collision unitaries: a rotation by
/// s₁ on levels {0,1} and a two-mode rotation by (s̄, α₀) coupling level 2 to
/// the pair below.
#[derive(Clone, Debug)]
pub struct QutritGmadParams {
    pub hamiltonian: Hamiltonian,
    pub beta: Beta,
    pub s1: f64,
    pub sbar: f64,
    pub alpha0: f64,
}

pub fn build_qutrit_gmad(params: &QutritGmadParams) -> Result<KrausChannel> {
    if params.hamiltonian.dim() != 3 {
        return Err(Error::Shape(format!(
            "qutrit construction needs d = 3, got d = {}",
            params.hamiltonian.dim()
        )));
    }
    for (name, v) in [("s1", params.s1), ("sbar", params.sbar), ("alpha0", params.alpha0)] {
        if !(v.is_finite() && v.abs() <= 1.0) {
            return Err(Error::Domain(format!("{name} must lie in [−1, 1], got {v}")));
        }
    }
    let blocks = qutrit_unitary_blocks(params.s1, params.sbar, params.alpha0)?;
    build_gmad(&GmadSpec::new(
        params.hamiltonian.clone(),
        params.beta,
        blocks,
    )?)
}

/// u^(1), u^(2) from the sine parameters; cosines take the nonnegative root
/// (interaction times within the first quarter period). Other quadrants must
/// supply explicit blocks, e.g. via [`qutrit_blocks_from_couplings`].
pub fn qutrit_unitary_blocks(s1: f64, sbar: f64, alpha0: f64) -> Result<UnitaryBlocks> {
    let c1 = (1.0 - s1 * s1).max(0.0).sqrt();
    let cbar = (1.0 - sbar * sbar).max(0.0).sqrt();
    let alpha1 = (1.0 - alpha0 * alpha0).max(0.0).sqrt();
    assemble_qutrit_blocks(c1, s1, cbar, sbar, alpha0, alpha1)
}

/// u^(1) = exp(−i g₁₀ t X₀₁) and u^(2) = exp(−i t (g₂₀ X₀₂ + g₂₁ X₁₂)) in
/// closed form, with X_ab the symmetric flip of levels a, b. Valid for any t
/// (cosines keep their true signs).
pub fn qutrit_blocks_from_couplings(g10: f64, g21: f64, g20: f64, t: f64) -> Result<UnitaryBlocks> {
    let (s1, c1) = (g10 * t).sin_cos();
    let gbar = (g20 * g20 + g21 * g21).sqrt();
    let (sbar, cbar) = (gbar * t).sin_cos();
    let (alpha0, alpha1) = if gbar > 0.0 {
        (g20 / gbar, g21 / gbar)
    } else {
        (0.0, 1.0) // u^(2) is the identity anyway (s̄ = 0, c̄ = 1)
    };
    assemble_qutrit_blocks(c1, s1, cbar, sbar, alpha0, alpha1)
}

fn assemble_qutrit_blocks(
    c1: f64,
    s1: f64,
    cbar: f64,
    sbar: f64,
    alpha0: f64,
    alpha1: f64,
) -> Result<UnitaryBlocks> {
    let re = |x: f64| Complex64::new(x, 0.0);
    let mi = |x: f64| Complex64::new(0.0, -x); // −i·x
    let u1 = ComplexMatrix::from_rows(&[
        vec![re(c1), mi(s1)],
        vec![mi(s1), re(c1)],
    ])?;
    let k = cbar - 1.0;
    let u2 = ComplexMatrix::from_rows(&[
        vec![re(1.0 + alpha0 * alpha0 * k), re(alpha0 * alpha1 * k), mi(alpha0 * sbar)],
        vec![re(alpha0 * alpha1 * k), re(1.0 + alpha1 * alpha1 * k), mi(alpha1 * sbar)],
        vec![mi(alpha0 * sbar), mi(alpha1 * sbar), re(cbar)],
    ])?;
    UnitaryBlocks::new(vec![u1, u2])
}

/// Apply Φ(ρ) = Σ K ρ K†.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != ch.dim() {
        return Err(Error::Shape(format!(
            "state dim {} vs channel dim {}",
            rho.dim(),
            ch.dim()
        )));
    }
    let d = ch.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for k in &ch.kraus {
        out = out.add(&k.matmul(rho.matrix()).matmul(&k.adjoint()));
    }
    Ok(DensityMatrix::trusted(out))
}

/// Apply the channel straight from its entrywise action, without
/// materializing Kraus operators: populations mix through jump weights and
/// survival rates, coherences are Schur-multiplied by input-independent
/// factors ζ_pq.
pub fn apply_direct(spec: &GmadSpec, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let d = spec.hamiltonian.dim();
    if rho.dim() != d {
        return Err(Error::Shape(format!(
            "state dim {} vs channel dim {d}",
            rho.dim()
        )));
    }
    let u = &spec.unitaries;
    let rates = Rates::new(&spec.hamiltonian, spec.beta);

    // population flow p → i through jump operators of blocks m ≥ max(i, p)
    let mut flow = vec![vec![0.0; d]; d];
    for i in 0..d {
        for p in 0..d {
            if i == p {
                continue;
            }
            for m in i.max(p)..d {
                let amp = u.entry(m, i, p).norm_sqr() * rates.r[m][p] * rates.r[m][p];
                flow[i][p] += amp;
            }
        }
    }
    // survival rate of each level
    let mut survival = vec![0.0; d];
    for p in 0..d {
        let mut g = u.entry(p, p, p).norm_sqr() / rates.z;
        for l in 1..d {
            for j in 0..l {
                g += rates.tau[l][j]
                    * if j == p {
                        u.entry(l, p, p).norm_sqr()
                    } else {
                        1.0
                    };
            }
        }
        survival[p] = g;
    }

    let mut out = ComplexMatrix::zeros(d, d);
    for p in 0..d {
        let mut pop = survival[p] * rho.matrix()[(p, p)].re;
        for q in 0..d {
            if q != p {
                pop += flow[p][q] * rho.matrix()[(q, q)].re;
            }
        }
        out[(p, p)] = Complex64::new(pop, 0.0);
    }
    for p in 0..d {
        for q in (p + 1)..d {
            // coherence multiplier ζ_pq
            let mut zeta = u.entry(p, p, p) * u.entry(q, q, q).conj() / rates.z;
            for l in 1..d {
                for j in 0..l {
                    let factor = if j == p {
                        u.entry(l, p, p)
                    } else if j == q {
                        u.entry(l, q, q).conj()
                    } else {
                        Complex64::new(1.0, 0.0)
                    };
                    zeta += factor * rates.tau[l][j];
                }
            }
            out[(p, q)] = zeta * rho.matrix()[(p, q)];
            out[(q, p)] = zeta.conj() * rho.matrix()[(q, p)];
        }
    }
    Ok(DensityMatrix::trusted(out))
}

/// Trajectory [Φ(ρ), Φ²(ρ), …, Φⁿ(ρ)].
pub fn iterate_channel(
    ch: &KrausChannel,
    rho: &DensityMatrix,
    n: usize,
) -> Result<Vec<DensityMatrix>> {
    let mut out = Vec::with_capacity(n);
    let mut current = rho.clone();
    for _ in 0..n {
        current = apply_channel(ch, &current)?;
        out.push(current.clone());
    }
    Ok(out)
}

/// Choi fingerprint C = (Φ ⊗ id)(|Ω⟩⟨Ω|) with unnormalized |Ω⟩ = Σ|jj⟩.
/// Channel equality is always decided here — Kraus lists are non-unique.
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
    dim: usize,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eig(&self.matrix.hermitize())
            .expect("Choi matrix is Hermitian")
            .min_eigenvalue()
    }

    /// Trace over the output factor; the identity for trace-preserving maps.
    pub fn partial_trace_output(&self) -> ComplexMatrix {
        let d = self.dim;
        ComplexMatrix::from_fn(d, d, |i, j| {
            (0..d).map(|p| self.matrix[(p * d + i, p * d + j)]).sum()
        })
    }
}

pub fn choi_matrix(ch: &KrausChannel) -> ChoiMatrix {
    let d = ch.dim();
    let n = d * d;
    let mut c = ComplexMatrix::zeros(n, n);
    for k in &ch.kraus {
        // row-major flattening of K is the vector (Φ ⊗ id)|Ω⟩ component
        let w: Vec<Complex64> = (0..n).map(|a| k[(a / d, a % d)]).collect();
        for a in 0..n {
            if w[a] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..n {
                c[(a, b)] += w[a] * w[b].conj();
            }
        }
    }
    ChoiMatrix { matrix: c, dim: d }
}

/// ∞-norm distance between Choi matrices; < 1e−10 means equal channels.
pub fn choi_distance(a: &ChoiMatrix, b: &ChoiMatrix) -> f64 {
    assert_eq!(a.dim, b.dim, "Choi matrices of different dimension");
    a.matrix.sub(&b.matrix).max_abs()
}

/// Collapse a GMAD-structured Kraus list to its minimal form: one jump
/// operator √η_ij |i⟩⟨j| per transition (η_ij the summed weight) and at most
/// d diagonal operators from the eigendecomposition of the Gram matrix
/// Q_hl = Σ_s c_h^(s) c_l^(s)* of the diagonal vectors. The Choi matrix is
/// unchanged; the operator count drops to at most d².
pub fn minimal_kraus(ch: &KrausChannel) -> Result<KrausChannel> {
    let d = ch.dim();
    let mut eta = vec![vec![0.0; d]; d];
    let mut diag_vectors: Vec<Vec<Complex64>> = Vec::new();

    for k in ch.kraus() {
        let scale = k.max_abs();
        if scale < 1e-15 {
            continue; // numerically zero operator contributes nothing
        }
        let tol = 1e-14 * scale;
        let mut off_max = 0.0_f64;
        let mut off_pos = (0, 0);
        for i in 0..d {
            for j in 0..d {
                if i != j && k[(i, j)].norm() > off_max {
                    off_max = k[(i, j)].norm();
                    off_pos = (i, j);
                }
            }
        }
        if off_max <= tol {
            diag_vectors.push((0..d).map(|h| k[(h, h)]).collect());
        } else {
            // single-jump candidate: every entry but (i, j) must vanish
            let (i, j) = off_pos;
            for r in 0..d {
                for c in 0..d {
                    if (r, c) != (i, j) && k[(r, c)].norm() > tol {
                        return Err(Error::Structure(
                            "Kraus operator is neither diagonal nor a single jump".into(),
                        ));
                    }
                }
            }
            eta[i][j] += k[(i, j)].norm_sqr();
        }
    }

    let mut kraus = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i != j && eta[i][j] > 0.0 {
                let mut k = ComplexMatrix::zeros(d, d);
                k[(i, j)] = Complex64::new(eta[i][j].sqrt(), 0.0);
                kraus.push(k);
            }
        }
    }
    if !diag_vectors.is_empty() {
        let q = ComplexMatrix::from_fn(d, d, |h, l| {
            diag_vectors.iter().map(|c| c[h] * c[l].conj()).sum()
        });
        let eig = hermitian_eig(&q.hermitize())?;
        let top = eig.eigenvalues[0].max(0.0);
        for r in 0..d {
            let lambda = eig.eigenvalues[r];
            if lambda > 1e-14 * top && lambda > 0.0 {
                let col: Vec<Complex64> = (0..d)
                    .map(|h| eig.eigenvectors[(h, r)] * lambda.sqrt())
                    .collect();
                kraus.push(ComplexMatrix::diagonal(&col));
            }
        }
    }
    KrausChannel::with_meta(ch.hamiltonian.clone(), kraus, ch.gmad)
}

/// Structural health report for a channel at a given inverse temperature.
/// `detailed_balance` is `None` when the check does not apply (channel not
/// built from symmetric blocks, or not a GMAD at all).
#[derive(Clone, Debug)]
pub struct ChannelReport {
    pub trace_residual: f64,
    pub trace_preserving: bool,
    pub choi_min_eigenvalue: f64,
    pub completely_positive: bool,
    pub gibbs_residual: f64,
    pub gibbs_preserving: bool,
    pub incoherence_residual: f64,
    pub strictly_incoherent: bool,
    pub detailed_balance_residual: Option<f64>,
    pub detailed_balance: Option<bool>,
    pub degenerate_gaps: bool,
}

impl ChannelReport {
    pub fn passed(&self) -> bool {
        self.trace_preserving
            && self.completely_positive
            && self.gibbs_preserving
            && self.strictly_incoherent
            && self.detailed_balance.unwrap_or(true)
    }
}

pub fn verify_channel(ch: &KrausChannel, beta: Beta) -> ChannelReport {
    let trace_residual = ch.trace_residual();
    let choi_min_eigenvalue = choi_matrix(ch).min_eigenvalue();

    let gibbs = gibbs_state(ch.hamiltonian(), beta);
    let gibbs_residual = apply_channel(ch, &gibbs)
        .expect("matching dims")
        .matrix()
        .sub(gibbs.matrix())
        .max_abs();

    // Δ∘Φ = Φ∘Δ on a fixed seeded sample
    let mut rng = sampling::rng(0x1c0e);
    let mut incoherence_residual = 0.0_f64;
    for _ in 0..20 {
        let rho = sampling::random_density(ch.dim(), &mut rng);
        let lhs = crate::states::dephase(&apply_channel(ch, &rho).expect("matching dims"));
        let rhs = apply_channel(ch, &crate::states::dephase(&rho)).expect("matching dims");
        incoherence_residual = incoherence_residual.max(lhs.matrix().sub(rhs.matrix()).max_abs());
    }

    let detailed_balance_residual = match ch.gmad_meta() {
        Some(meta) if meta.symmetric_blocks => Some(detailed_balance_residual(ch, beta)),
        _ => None,
    };

    ChannelReport {
        trace_residual,
        trace_preserving: trace_residual < CHANNEL_TOL,
        choi_min_eigenvalue,
        completely_positive: choi_min_eigenvalue > -CHANNEL_TOL,
        gibbs_residual,
        gibbs_preserving: gibbs_residual < CHANNEL_TOL,
        incoherence_residual,
        strictly_incoherent: incoherence_residual < CHANNEL_TOL,
        detailed_balance_residual,
        detailed_balance: detailed_balance_residual.map(|r| r < DB_REL_TOL),
        degenerate_gaps: ch.hamiltonian().has_degenerate_gaps(),
    }
}

/// Worst relative deviation of P_{up} from e^{−βω}·P_{down} over level pairs.
/// Pairs whose probabilities are both below [`DB_SKIP_TOL`] are skipped.
fn detailed_balance_residual(ch: &KrausChannel, beta: Beta) -> f64 {
    let p = ch.transition_probabilities();
    let h = ch.hamiltonian();
    let mut worst = 0.0_f64;
    for lo in 0..h.dim() {
        for hi in (lo + 1)..h.dim() {
            let down = p[lo][hi];
            let up = p[hi][lo];
            if down.max(up) < DB_SKIP_TOL {
                continue;
            }
            let factor = match beta {
                Beta::Infinite => 0.0,
                Beta::Finite(b) => (-b * h.gap(hi, lo)).exp(),
            };
            let expected = factor * down;
            let scale = up.max(expected);
            if scale < DB_SKIP_TOL {
                continue; // uphill flow correctly absent
            }
            worst = worst.max((up - expected).abs() / scale);
        }
    }
    worst
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;

    pub fn worked_hamiltonian() -> Hamiltonian {
        Hamiltonian::new(vec![0.0, 0.5, 1.0]).unwrap()
    }

    /// The worked qutrit example: couplings (g10, g21, g20) = (0.8, 0.2, 0.1)
    /// at t = 1, bath at β = 0.1.
    pub fn worked_channel() -> KrausChannel {
        let blocks = qutrit_blocks_from_couplings(0.8, 0.2, 0.1, 1.0).unwrap();
        let spec = GmadSpec::new(worked_hamiltonian(), Beta::Finite(0.1), blocks).unwrap();
        build_gmad(&spec).unwrap()
    }

    fn state(entries: [[(f64, f64); 3]; 3]) -> DensityMatrix {
        let m = ComplexMatrix::from_fn(3, 3, |r, c| {
            Complex64::new(entries[r][c].0, entries[r][c].1)
        });
        DensityMatrix::new(m).unwrap()
    }

    pub fn worked_state_one() -> DensityMatrix {
        state([
            [
                (0.61419885, 0.0),
                (0.23993793, -0.20486506),
                (0.14709909, 0.05359668),
            ],
            [
                (0.23993793, 0.20486506),
                (0.22372136, 0.0),
                (0.04471051, 0.09323805),
            ],
            [
                (0.14709909, -0.05359668),
                (0.04471051, -0.09323805),
                (0.16207979, 0.0),
            ],
        ])
    }

    pub fn worked_state_two() -> DensityMatrix {
        state([
            [
                (0.61419885, 0.0),
                (0.02280222, -0.30977726),
                (-0.08634611, 0.05914107),
            ],
            [
                (0.02280222, 0.30977726),
                (0.22372136, 0.0),
                (0.04784115, 0.00286678),
            ],
            [
                (-0.08634611, -0.05914107),
                (0.04784115, -0.00286678),
                (0.16207979, 0.0),
            ],
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::states::dephase;

    fn spectrum(d: usize) -> Hamiltonian {
        let energies = match d {
            2 => vec![0.0, 1.0],
            3 => vec![0.0, 0.8, 1.0],
            4 => vec![0.0, 0.4, 0.9, 1.7],
            5 => vec![0.0, 0.3, 0.7, 1.2, 1.9],
            _ => unreachable!(),
        };
        Hamiltonian::new(energies).unwrap()
    }

    fn random_spec(d: usize, beta: Beta, seed: u64) -> GmadSpec {
        let mut rng = sampling::rng(seed);
        let blocks = sampling::random_unitary_blocks(d, &mut rng);
        GmadSpec::new(spectrum(d), beta, blocks).unwrap()
    }

    fn betas() -> [Beta; 4] {
        [
            Beta::Finite(0.0),
            Beta::Finite(0.7),
            Beta::Finite(3.0),
            Beta::Infinite,
        ]
    }

    #[test]
    fn block_validation() {
        // wrong shape
        assert!(UnitaryBlocks::new(vec![ComplexMatrix::identity(3)]).is_err());
        // not unitary
        let bad = ComplexMatrix::identity(2).scale_re(1.1);
        match UnitaryBlocks::new(vec![bad]) {
            Err(Error::NotUnitary { block: 1, .. }) => {}
            other => panic!("expected NotUnitary, got {other:?}"),
        }
        // symmetry detection
        let mut rng = sampling::rng(3);
        assert!(sampling::random_symmetric_unitary_blocks(4, &mut rng).symmetric_moduli());
        assert!(!sampling::random_unitary_blocks(4, &mut rng).symmetric_moduli());
        assert!(UnitaryBlocks::identity(4).symmetric_moduli());
    }

    #[test]
    fn identity_blocks_give_identity_channel() {
        for d in 2..=4 {
            for beta in betas() {
                let spec =
                    GmadSpec::new(spectrum(d), beta, UnitaryBlocks::identity(d)).unwrap();
                let ch = build_gmad(&spec).unwrap();
                let dist = choi_distance(
                    &choi_matrix(&ch),
                    &choi_matrix(&KrausChannel::identity(spectrum(d))),
                );
                assert!(dist < CHANNEL_TOL, "d={d} beta={beta} dist={dist:.3e}");
            }
        }
    }

    #[test]
    fn kraus_count_matches_construction() {
        for d in 2..=5 {
            let ch = build_gmad(&random_spec(d, Beta::Finite(0.9), 40 + d as u64)).unwrap();
            let expected = d * (d * d - 1) / 3 + d * (d - 1) / 2 + 1;
            assert_eq!(ch.kraus().len(), expected);
        }
    }

    #[test]
    fn matches_generalized_amplitude_damping_for_d2() {
        let h = spectrum(2);
        let (c, s) = (0.8_f64, 0.6_f64);
        let rotation = ComplexMatrix::from_rows(&[
            vec![Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            vec![Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ])
        .unwrap();
        for beta in [Beta::Finite(0.0), Beta::Finite(0.3), Beta::Finite(1.7), Beta::Infinite] {
            let spec = GmadSpec::new(
                h.clone(),
                beta,
                UnitaryBlocks::new(vec![rotation.clone()]).unwrap(),
            )
            .unwrap();
            let ch = build_gmad(&spec).unwrap();

            // standard 4-operator form with p = 1/Z and damping rate s²
            let p = match beta {
                Beta::Infinite => 1.0,
                Beta::Finite(b) => 1.0 / (1.0 + (-b * h.gap(1, 0)).exp()),
            };
            let g = s * s;
            let re = |x: f64| Complex64::new(x, 0.0);
            let mut k2 = ComplexMatrix::zeros(2, 2);
            k2[(0, 1)] = re(p.sqrt() * g.sqrt());
            let mut k4 = ComplexMatrix::zeros(2, 2);
            k4[(1, 0)] = re((1.0 - p).sqrt() * g.sqrt());
            let gadc = KrausChannel::new(
                h.clone(),
                vec![
                    ComplexMatrix::diagonal(&[re(p.sqrt()), re(p.sqrt() * (1.0 - g).sqrt())]),
                    k2,
                    ComplexMatrix::diagonal(&[
                        re((1.0 - p).sqrt() * (1.0 - g).sqrt()),
                        re((1.0 - p).sqrt()),
                    ]),
                    k4,
                ],
            )
            .unwrap();
            let dist = choi_distance(&choi_matrix(&ch), &choi_matrix(&gadc));
            assert!(dist < CHANNEL_TOL, "beta={beta} dist={dist:.3e}");
        }
    }

    #[test]
    fn qutrit_construction_matches_literal_operator_list() {
        let h = spectrum(3);
        let (s1, sbar, alpha0) = (0.5, 0.745, 0.745);
        let beta = 1.0;
        let ch = build_qutrit_gmad(&QutritGmadParams {
            hamiltonian: h.clone(),
            beta: Beta::Finite(beta),
            s1,
            sbar,
            alpha0,
        })
        .unwrap();

        let c1 = (1.0 - s1 * s1).sqrt();
        let cbar = (1.0f64 - sbar * sbar).sqrt();
        let alpha1 = (1.0f64 - alpha0 * alpha0).sqrt();
        let z = 1.0
            + (-beta * h.gap(1, 0)).exp()
            + (-beta * h.gap(2, 0)).exp()
            + (-beta * h.gap(2, 1)).exp();
        let r = |m: usize, j: usize| (-0.5 * beta * h.gap(m, j)).exp() / z.sqrt();
        let re = |x: f64| Complex64::new(x, 0.0);
        let mi = |x: f64| Complex64::new(0.0, -x);
        let jump = |i: usize, j: usize, v: Complex64| {
            let mut k = ComplexMatrix::zeros(3, 3);
            k[(i, j)] = v;
            k
        };

        let expected = vec![
            // block 1 jumps: 0 → 1, then 1 → 0
            jump(1, 0, mi(s1 * r(1, 0))),
            jump(0, 1, mi(s1 * r(1, 1))),
            // block 2 jumps, source-major
            jump(1, 0, re(alpha0 * alpha1 * (cbar - 1.0) * r(2, 0))),
            jump(2, 0, mi(alpha0 * sbar * r(2, 0))),
            jump(0, 1, re(alpha0 * alpha1 * (cbar - 1.0) * r(2, 1))),
            jump(2, 1, mi(alpha1 * sbar * r(2, 1))),
            jump(0, 2, mi(alpha0 * sbar * r(2, 2))),
            jump(1, 2, mi(alpha1 * sbar * r(2, 2))),
            // damping-type diagonal operators
            ComplexMatrix::diagonal(&[re(c1), re(1.0), re(1.0)]).scale_re(r(1, 0)),
            ComplexMatrix::diagonal(&[
                re(1.0 + alpha0 * alpha0 * (cbar - 1.0)),
                re(1.0),
                re(1.0),
            ])
            .scale_re(r(2, 0)),
            ComplexMatrix::diagonal(&[
                re(1.0),
                re(alpha0 * alpha0 + alpha1 * alpha1 * cbar),
                re(1.0),
            ])
            .scale_re(r(2, 1)),
            // survival operator
            ComplexMatrix::diagonal(&[re(1.0), re(c1), re(cbar)]).scale_re(1.0 / z.sqrt()),
        ];

        assert_eq!(ch.kraus().len(), expected.len());
        for (idx, (got, want)) in ch.kraus().iter().zip(&expected).enumerate() {
            let diff = got.sub(want).max_abs();
            assert!(diff < 1e-12, "operator {idx} differs by {diff:.3e}");
        }
    }

    #[test]
    fn qutrit_blocks_match_exponential_map() {
        // closed-form blocks vs. matrix exponentials through the
        // eigendecomposition of the generators, including a time past the
        // quarter period where cosines go negative
        for (g10, g21, g20, t) in [(0.8, 0.2, 0.1, 1.0), (1.2, 0.9, 0.4, 2.2)] {
            let blocks = qutrit_blocks_from_couplings(g10, g21, g20, t).unwrap();

            let expm = |gen: &ComplexMatrix, t: f64| {
                let e = hermitian_eig(gen).unwrap();
                let n = gen.rows();
                ComplexMatrix::from_fn(n, n, |r, c| {
                    (0..n)
                        .map(|k| {
                            let phase = Complex64::from_polar(1.0, -t * e.eigenvalues[k]);
                            e.eigenvectors[(r, k)] * phase * e.eigenvectors[(c, k)].conj()
                        })
                        .sum()
                })
            };

            let mut h1 = ComplexMatrix::zeros(2, 2);
            h1[(0, 1)] = Complex64::new(g10, 0.0);
            h1[(1, 0)] = Complex64::new(g10, 0.0);
            assert!(blocks.block(1).sub(&expm(&h1, t)).max_abs() < 1e-12);

            let mut h2 = ComplexMatrix::zeros(3, 3);
            h2[(0, 2)] = Complex64::new(g20, 0.0);
            h2[(2, 0)] = Complex64::new(g20, 0.0);
            h2[(1, 2)] = Complex64::new(g21, 0.0);
            h2[(2, 1)] = Complex64::new(g21, 0.0);
            assert!(blocks.block(2).sub(&expm(&h2, t)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn direct_action_matches_kraus_sum() {
        for d in 2..=5 {
            for beta in [Beta::Finite(0.0), Beta::Finite(0.7), Beta::Infinite] {
                let spec = random_spec(d, beta, 100 + d as u64);
                let ch = build_gmad(&spec).unwrap();
                let mut rng = sampling::rng(200 + d as u64);
                for _ in 0..4 {
                    let rho = sampling::random_density(d, &mut rng);
                    let via_kraus = apply_channel(&ch, &rho).unwrap();
                    let direct = apply_direct(&spec, &rho).unwrap();
                    let diff = via_kraus.matrix().sub(direct.matrix()).max_abs();
                    assert!(diff < 1e-12, "d={d} beta={beta} diff={diff:.3e}");
                }
            }
        }
    }

    #[test]
    fn qutrit_output_matches_printed_coefficients() {
        // Assemble the three-level output entry by entry from the published
        // coefficient formulas (survival rates γ_pp, coherence multipliers
        // α_pq, jump weights |γ^(m)_ip|²) and compare with the Kraus sum.
        let h = spectrum(3);
        let beta = 0.9;
        let mut rng = sampling::rng(77);
        let blocks = sampling::random_unitary_blocks(3, &mut rng);
        let u1 = blocks.block(1).clone();
        let u2 = blocks.block(2).clone();
        let spec = GmadSpec::new(h.clone(), Beta::Finite(beta), blocks).unwrap();
        let ch = build_gmad(&spec).unwrap();
        let rho = sampling::random_density(3, &mut rng);

        let z = 1.0
            + (-beta * h.gap(1, 0)).exp()
            + (-beta * h.gap(2, 0)).exp()
            + (-beta * h.gap(2, 1)).exp();
        let t10 = (-beta * h.gap(1, 0)).exp() / z;
        let t20 = (-beta * h.gap(2, 0)).exp() / z;
        let t21 = (-beta * h.gap(2, 1)).exp() / z;
        let r = |m: usize, j: usize| (-0.5 * beta * h.gap(m, j)).exp() / z.sqrt();

        let g00 = 1.0 / z + t10 * u1[(0, 0)].norm_sqr() + t20 * u2[(0, 0)].norm_sqr() + t21;
        let g11 = u1[(1, 1)].norm_sqr() / z + t10 + t20 + t21 * u2[(1, 1)].norm_sqr();
        let g22 = u2[(2, 2)].norm_sqr() / z + t10 + t20 + t21;
        let a01 = u1[(1, 1)].conj() / z + u1[(0, 0)] * t10 + u2[(0, 0)] * t20
            + u2[(1, 1)].conj() * t21;
        let a02 = u2[(2, 2)].conj() / z
            + u1[(0, 0)] * t10
            + u2[(0, 0)] * t20
            + Complex64::new(t21, 0.0);
        let a12 = u1[(1, 1)] * u2[(2, 2)].conj() / z
            + Complex64::new(t10 + t20, 0.0)
            + u2[(1, 1)] * t21;

        let w = |u: Complex64, rv: f64| (u * rv).norm_sqr();
        let p = [rho.population(0), rho.population(1), rho.population(2)];
        let out00 = g00 * p[0]
            + (w(u1[(0, 1)], r(1, 1)) + w(u2[(0, 1)], r(2, 1))) * p[1]
            + w(u2[(0, 2)], r(2, 2)) * p[2];
        let out11 = g11 * p[1]
            + (w(u1[(1, 0)], r(1, 0)) + w(u2[(1, 0)], r(2, 0))) * p[0]
            + w(u2[(1, 2)], r(2, 2)) * p[2];
        let out22 = g22 * p[2] + w(u2[(2, 0)], r(2, 0)) * p[0] + w(u2[(2, 1)], r(2, 1)) * p[1];

        let got = apply_channel(&ch, &rho).unwrap();
        assert!((got.population(0) - out00).abs() < 1e-12);
        assert!((got.population(1) - out11).abs() < 1e-12);
        assert!((got.population(2) - out22).abs() < 1e-12);
        assert!((got.matrix()[(0, 1)] - a01 * rho.matrix()[(0, 1)]).norm() < 1e-12);
        assert!((got.matrix()[(0, 2)] - a02 * rho.matrix()[(0, 2)]).norm() < 1e-12);
        assert!((got.matrix()[(1, 2)] - a12 * rho.matrix()[(1, 2)]).norm() < 1e-12);
        // sanity: total population still one
        assert!(((g00 + w(u1[(1, 0)], r(1, 0)) + w(u2[(1, 0)], r(2, 0)) + w(u2[(2, 0)], r(2, 0)))
            - 1.0)
            .abs()
            < 1e-12);
    }

    #[test]
    fn gibbs_state_is_fixed_point() {
        for d in 2..=4 {
            for beta in betas() {
                let ch = build_gmad(&random_spec(d, beta, 300 + d as u64)).unwrap();
                let g = gibbs_state(ch.hamiltonian(), beta);
                let out = apply_channel(&ch, &g).unwrap();
                let diff = out.matrix().sub(g.matrix()).max_abs();
                assert!(diff < CHANNEL_TOL, "d={d} beta={beta} diff={diff:.3e}");
            }
        }
    }

    #[test]
    fn zero_temperature_reduces_to_multilevel_amplitude_damping() {
        let h = spectrum(3);
        let (s1, sbar, alpha0) = (0.5, 0.745, 0.745);
        let params = |beta| QutritGmadParams {
            hamiltonian: h.clone(),
            beta,
            s1,
            sbar,
            alpha0,
        };
        let ch = build_qutrit_gmad(&params(Beta::Infinite)).unwrap();

        let alpha1 = (1.0f64 - alpha0 * alpha0).sqrt();
        let g1 = s1 * s1;
        let g2 = alpha1 * alpha1 * sbar * sbar;
        let g3 = alpha0 * alpha0 * sbar * sbar;
        let re = |x: f64| Complex64::new(x, 0.0);
        let jump = |i: usize, j: usize, v: f64| {
            let mut k = ComplexMatrix::zeros(3, 3);
            k[(i, j)] = re(v.sqrt());
            k
        };
        let mad = KrausChannel::new(
            h.clone(),
            vec![
                ComplexMatrix::diagonal(&[
                    re(1.0),
                    re((1.0 - g1).sqrt()),
                    re((1.0 - g2 - g3).sqrt()),
                ]),
                jump(0, 1, g1),
                jump(1, 2, g2),
                jump(0, 2, g3),
            ],
        )
        .unwrap();
        assert!(choi_distance(&choi_matrix(&ch), &choi_matrix(&mad)) < CHANNEL_TOL);

        // output matrix of the damping channel, assembled from the rates
        let mut rng = sampling::rng(55);
        let rho = sampling::random_density(3, &mut rng);
        let out = apply_channel(&ch, &rho).unwrap();
        let m = rho.matrix();
        assert!(
            (out.population(0) - (m[(0, 0)].re + g1 * m[(1, 1)].re + g3 * m[(2, 2)].re)).abs()
                < 1e-12
        );
        assert!((out.population(1) - ((1.0 - g1) * m[(1, 1)].re + g2 * m[(2, 2)].re)).abs() < 1e-12);
        assert!((out.population(2) - (1.0 - g2 - g3) * m[(2, 2)].re).abs() < 1e-12);
        assert!((out.matrix()[(0, 1)] - m[(0, 1)] * (1.0 - g1).sqrt()).norm() < 1e-12);
        assert!((out.matrix()[(0, 2)] - m[(0, 2)] * (1.0 - g2 - g3).sqrt()).norm() < 1e-12);
        assert!(
            (out.matrix()[(1, 2)] - m[(1, 2)] * ((1.0 - g1) * (1.0 - g2 - g3)).sqrt()).norm()
                < 1e-12
        );

        // a deeply cold finite temperature is numerically indistinguishable
        let cold = build_qutrit_gmad(&params(Beta::Finite(200.0))).unwrap();
        assert!(choi_distance(&choi_matrix(&cold), &choi_matrix(&ch)) < 1e-8);
    }

    #[test]
    fn minimal_kraus_reduces_and_preserves_channel() {
        // identity: every diagonal operator is proportional to I, Q has rank 1
        let spec = GmadSpec::new(spectrum(3), Beta::Finite(0.4), UnitaryBlocks::identity(3))
            .unwrap();
        let min = minimal_kraus(&build_gmad(&spec).unwrap()).unwrap();
        assert_eq!(min.kraus().len(), 1);
        // single operator equal to the identity up to a global phase
        let dist = choi_distance(
            &choi_matrix(&min),
            &choi_matrix(&KrausChannel::identity(spectrum(3))),
        );
        assert!(dist < CHANNEL_TOL);

        // generic qutrit: 12 → ≤ 9, Choi unchanged, verification still green
        let ch = build_qutrit_gmad(&QutritGmadParams {
            hamiltonian: spectrum(3),
            beta: Beta::Finite(1.0),
            s1: 0.5,
            sbar: 0.745,
            alpha0: 0.745,
        })
        .unwrap();
        let min = minimal_kraus(&ch).unwrap();
        assert!(min.kraus().len() <= 9, "got {}", min.kraus().len());
        assert!(choi_distance(&choi_matrix(&ch), &choi_matrix(&min)) < CHANNEL_TOL);
        assert!(verify_channel(&min, Beta::Finite(1.0)).passed());

        // random four-level construction stays under d²
        for beta in betas() {
            let ch = build_gmad(&random_spec(4, beta, 400)).unwrap();
            let min = minimal_kraus(&ch).unwrap();
            assert!(min.kraus().len() <= 16);
            assert!(choi_distance(&choi_matrix(&ch), &choi_matrix(&min)) < CHANNEL_TOL);
        }

        // a dense unitary channel is not GMAD-structured
        let mut rng = sampling::rng(41);
        let u = sampling::random_unitary(3, &mut rng);
        let dense = KrausChannel::new(spectrum(3), vec![u]).unwrap();
        assert!(matches!(minimal_kraus(&dense), Err(Error::Structure(_))));
    }

    #[test]
    fn choi_matrix_reference_values() {
        let id2 = KrausChannel::identity(spectrum(2));
        let c = choi_matrix(&id2);
        for a in 0..4 {
            for b in 0..4 {
                let expect = if (a == 0 || a == 3) && (b == 0 || b == 3) {
                    1.0
                } else {
                    0.0
                };
                assert!((c.matrix()[(a, b)] - Complex64::new(expect, 0.0)).norm() < 1e-15);
            }
        }

        // completely dephasing qubit channel
        let deph = KrausChannel::new(
            spectrum(2),
            vec![
                ComplexMatrix::real_diagonal(&[1.0, 0.0]),
                ComplexMatrix::real_diagonal(&[0.0, 1.0]),
            ],
        )
        .unwrap();
        let c = choi_matrix(&deph);
        for a in 0..4 {
            for b in 0..4 {
                let expect = if a == b && (a == 0 || a == 3) { 1.0 } else { 0.0 };
                assert!((c.matrix()[(a, b)] - Complex64::new(expect, 0.0)).norm() < 1e-15);
            }
        }

        // partial trace over the output leg recovers the identity
        let ch = build_gmad(&random_spec(3, Beta::Finite(0.6), 500)).unwrap();
        let pt = choi_matrix(&ch).partial_trace_output();
        assert!(pt.sub(&ComplexMatrix::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn verification_reports() {
        let spec = GmadSpec::new(spectrum(3), Beta::Finite(1.0), UnitaryBlocks::identity(3))
            .unwrap();
        let report = verify_channel(&build_gmad(&spec).unwrap(), Beta::Finite(1.0));
        assert!(report.passed());
        assert_eq!(report.detailed_balance_residual, Some(0.0)); // all flows vanish

        let qutrit = build_qutrit_gmad(&QutritGmadParams {
            hamiltonian: spectrum(3),
            beta: Beta::Finite(1.0),
            s1: 0.5,
            sbar: 0.745,
            alpha0: 0.745,
        })
        .unwrap();
        let report = verify_channel(&qutrit, Beta::Finite(1.0));
        assert!(report.passed(), "{report:?}");
        assert!(report.gibbs_residual < CHANNEL_TOL);
        assert_eq!(report.detailed_balance, Some(true));
        assert!(!report.degenerate_gaps);

        // symmetric random blocks in d = 4 keep detailed balance
        let mut rng = sampling::rng(61);
        let blocks = sampling::random_symmetric_unitary_blocks(4, &mut rng);
        let spec = GmadSpec::new(spectrum(4), Beta::Finite(0.9), blocks).unwrap();
        let report = verify_channel(&build_gmad(&spec).unwrap(), Beta::Finite(0.9));
        assert_eq!(report.detailed_balance, Some(true), "{report:?}");

        // generic (non-symmetric) blocks: the check does not apply
        let report = verify_channel(
            &build_gmad(&random_spec(4, Beta::Finite(0.9), 62)).unwrap(),
            Beta::Finite(0.9),
        );
        assert_eq!(report.detailed_balance, None);

        // equal gaps are reported but are not a failure
        let ch = tests_support::worked_channel();
        let report = verify_channel(&ch, Beta::Finite(0.1));
        assert!(report.degenerate_gaps);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn iteration_trajectories() {
        let h = spectrum(3);
        let id = KrausChannel::identity(h.clone());
        let mut rng = sampling::rng(70);
        let rho = sampling::random_density(3, &mut rng);
        for step in iterate_channel(&id, &rho, 5).unwrap() {
            assert!(step.matrix().sub(rho.matrix()).max_abs() < 1e-14);
        }

        let ch = build_gmad(&random_spec(3, Beta::Finite(0.8), 71)).unwrap();
        let g = gibbs_state(&h, Beta::Finite(0.8));
        for step in iterate_channel(&ch, &g, 10).unwrap() {
            assert!(step.matrix().sub(g.matrix()).max_abs() < 1e-9);
        }
    }

    #[test]
    fn worked_example_converges_to_gibbs() {
        let ch = tests_support::worked_channel();
        let gibbs = gibbs_state(ch.hamiltonian(), Beta::Finite(0.1));
        let rho = tests_support::worked_state_one();
        let traj = iterate_channel(&ch, &rho, 20).unwrap();
        let dist: Vec<f64> = traj.iter().map(|s| s.trace_distance(&gibbs)).collect();

        // monotone contraction toward the fixed point after an initial
        // transient, and a clear overall decrease
        let settled = dist
            .windows(2)
            .position(|w| w[1] <= w[0] + 1e-15)
            .expect("distance must start decreasing");
        assert!(settled <= 3, "transient too long: {dist:?}");
        for w in dist[settled..].windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{dist:?}");
        }
        assert!(dist.last().unwrap() < &(0.5 * dist[0]));
    }

    #[test]
    fn coherences_transform_as_schur_multipliers() {
        let spec = random_spec(3, Beta::Finite(0.8), 80);
        let ch = build_gmad(&spec).unwrap();
        let mut rng = sampling::rng(81);
        let a = sampling::random_density(3, &mut rng);
        // same populations, coherences shrunk by 0.3 — still a valid state
        let b = DensityMatrix::new(ComplexMatrix::from_fn(3, 3, |r, c| {
            if r == c {
                a.matrix()[(r, c)]
            } else {
                a.matrix()[(r, c)].scale(0.3)
            }
        }))
        .unwrap();
        let fa = apply_channel(&ch, &a).unwrap();
        let fb = apply_channel(&ch, &b).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                if r == c {
                    assert!((fa.matrix()[(r, c)] - fb.matrix()[(r, c)]).norm() < 1e-12);
                } else {
                    assert!(
                        (fa.matrix()[(r, c)].scale(0.3) - fb.matrix()[(r, c)]).norm() < 1e-12
                    );
                }
            }
        }
        // and the channel commutes with dephasing
        let lhs = dephase(&fa);
        let rhs = apply_channel(&ch, &dephase(&a)).unwrap();
        assert!(lhs.matrix().sub(rhs.matrix()).max_abs() < CHANNEL_TOL);
    }

    #[test]
    fn seeded_construction_suite() {
        // small in-crate slice of the acceptance sweep
        let mut seed = 900;
        for d in 2..=4 {
            for beta in betas() {
                for _ in 0..5 {
                    seed += 1;
                    let ch = build_gmad(&random_spec(d, beta, seed)).unwrap();
                    assert!(ch.trace_residual() < CHANNEL_TOL);
                    let choi = choi_matrix(&ch);
                    assert!(choi.min_eigenvalue() > -CHANNEL_TOL);
                }
            }
        }
    }
}
