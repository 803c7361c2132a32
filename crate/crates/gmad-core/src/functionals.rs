//! Channel-level work functionals.
//!
//! The maximal ergotropic functional (MEF) asks: among pure inputs whose mean
//! energy is pinned to a shell (tr[ψH] = E) or confined to a ball
//! (tr[ψH] ≤ E), how much work of a given kind does the channel output hold?
//! On top of the single-state optimum sit the capacitance curve χ — the
//! concave envelope of the ball-MEF ergotropy over mixing strategies — and
//! the maximal asymptotic work-to-energy ratio, the slope of χ at vanishing
//! energy density.

use num_complex::Complex64;
use rand::Rng;

use crate::ergotropy::{coherent_ergotropy, ergotropy, incoherent_ergotropy, total_ergotropy};
use crate::gmad::{apply_channel, minimal_kraus, KrausChannel};
use crate::sampling::{mix, rng};
use crate::states::{DensityMatrix, Hamiltonian};
use crate::{Error, Result};

/// Grid resolution used by the capacitance and work-energy-ratio drivers.
pub const DEFAULT_GRID: usize = 201;

/// Energy densities on the normalized spectrum entering the work-energy-ratio
/// extrapolation, coarsest first.
pub const MAWER_EPSILONS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionalKind {
    Ergotropy,
    Incoherent,
    Coherent,
    Total,
}

impl std::fmt::Display for FunctionalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FunctionalKind::Ergotropy => "ergotropy",
            FunctionalKind::Incoherent => "incoherent",
            FunctionalKind::Coherent => "coherent",
            FunctionalKind::Total => "total",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// Mean energy fixed: tr[ψH] = E.
    Shell,
    /// Mean energy bounded: tr[ψH] ≤ E.
    Ball,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Constraint::Shell => "shell",
            Constraint::Ball => "ball",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OptimizerConfig {
    pub n_starts: usize,
    pub max_iters: usize,
    /// Simplex-diameter stopping threshold.
    pub step_tol: f64,
    /// Simplex value-spread stopping threshold.
    pub value_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            n_starts: 64,
            max_iters: 2000,
            step_tol: 1e-10,
            value_tol: 1e-9,
            seed: 42,
        }
    }
}

impl OptimizerConfig {
    /// Derive a config whose seed is decorrelated from this one; used to give
    /// every grid point of a sweep its own reproducible start set.
    fn reseeded(&self, salt: u64) -> OptimizerConfig {
        OptimizerConfig {
            seed: mix(self.seed, salt),
            ..*self
        }
    }
}

/// A single MEF evaluation request.
#[derive(Clone, Copy, Debug)]
pub struct MefQuery<'a> {
    pub channel: &'a KrausChannel,
    pub functional_kind: FunctionalKind,
    pub constraint: Constraint,
    pub energy: f64,
    /// Number of mixing cells; only the single-cell functional is implemented.
    pub n_cells: usize,
    /// Permit the coherent kind on channels without GMAD structure.  For an
    /// arbitrary channel the coherent remainder of the output is still well
    /// defined, but its shell maximum loses the operational reading that
    /// motivates it, so asking for it is usually a mistake and is refused
    /// unless this flag is set.
    pub allow_coherent_anywhere: bool,
}

impl<'a> MefQuery<'a> {
    pub fn new(
        channel: &'a KrausChannel,
        functional_kind: FunctionalKind,
        constraint: Constraint,
        energy: f64,
    ) -> Self {
        MefQuery {
            channel,
            functional_kind,
            constraint,
            energy,
            n_cells: 1,
            allow_coherent_anywhere: false,
        }
    }
}

/// Provenance of an [`EnergyCurve`]'s axes.  Physical energy relates to the
/// stored abscissa by E = `energy_offset` + `energy_scale`·ε, and physical
/// work to the stored value by the same scale; (0, 1) means the axes are
/// already physical.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveMeta {
    pub functional_kind: FunctionalKind,
    pub constraint: Constraint,
    pub energy_offset: f64,
    pub energy_scale: f64,
}

/// A sampled functional-versus-energy curve with strictly increasing
/// abscissae and nonnegative values.
#[derive(Clone, Debug)]
pub struct EnergyCurve {
    pub points: Vec<(f64, f64)>,
    pub metadata: CurveMeta,
}

impl EnergyCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    /// Linear interpolation between bracketing grid points; clamps outside
    /// the sampled range.
    pub fn value_at(&self, x: f64) -> f64 {
        let pts = &self.points;
        assert!(!pts.is_empty(), "empty curve");
        if x <= pts[0].0 {
            return pts[0].1;
        }
        if x >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        let hi = pts.partition_point(|p| p.0 < x);
        let (x0, y0) = pts[hi - 1];
        let (x1, y1) = pts[hi];
        y0 + (y1 - y0) * ((x - x0) / (x1 - x0))
    }
}

/// Result of a shell optimization: the best functional value found, the pure
/// input attaining it, and whether any start met the stopping tolerances
/// before exhausting its iteration budget.
#[derive(Clone, Debug)]
pub struct ShellOptimum {
    pub value: f64,
    pub state: DensityMatrix,
    pub converged: bool,
}

/// Work-energy-ratio estimate together with the raw ratio sequence
/// χ(ε)/ε it was extrapolated from, so callers can judge how settled the
/// extrapolation is.
#[derive(Clone, Copy, Debug)]
pub struct MawerEstimate {
    pub value: f64,
    pub ratios: [f64; 3],
    pub epsilons: [f64; 3],
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Map free coordinates to a pure state on the energy shell.
///
/// Populations are filled from the top level down.  Given remaining mass M
/// and energy F, level k can carry
///   p_k ∈ [max(0, (F − M ε_{k−1}) / (ε_k − ε_{k−1})),
///          min(M, (F − M ε₀) / (ε_k − ε₀))],
/// the endpoints being exactly what keeps the leftover (M − p_k, F − p_k ε_k)
/// representable on levels 0..k−1.  A logistic squash of the free coordinate
/// picks a point inside, and the last two populations are fixed linearly, so
/// every real coordinate vector yields a feasible state and the optimizer
/// never needs constraint handling.  Relative phases (d − 1 of them, the
/// ground amplitude kept real) are passed through unsquashed.
fn shell_ket(h: &Hamiltonian, energy: f64, x: &[f64]) -> Vec<Complex64> {
    let d = h.dim();
    let n_pop = d - 2;
    debug_assert_eq!(x.len(), n_pop + d - 1);
    let mut p = vec![0.0; d];
    let mut mass = 1.0;
    let mut fuel = energy;
    for (t, k) in (2..d).rev().enumerate() {
        let lo = ((fuel - mass * h.energy(k - 1)) / (h.energy(k) - h.energy(k - 1))).max(0.0);
        let hi = ((fuel - mass * h.energy(0)) / (h.energy(k) - h.energy(0))).min(mass);
        let pk = if hi > lo {
            lo + (hi - lo) * sigmoid(x[t])
        } else {
            // Feasible interval collapsed (shell endpoint or rounding); pin it.
            lo.clamp(0.0, mass)
        };
        p[k] = pk;
        mass -= pk;
        fuel -= pk * h.energy(k);
    }
    let p1 = ((fuel - mass * h.energy(0)) / (h.energy(1) - h.energy(0))).clamp(0.0, mass);
    p[1] = p1;
    p[0] = (mass - p1).max(0.0);
    let mut ket = vec![Complex64::new(0.0, 0.0); d];
    ket[0] = Complex64::new(p[0].sqrt(), 0.0);
    for j in 1..d {
        ket[j] = Complex64::from_polar(p[j].max(0.0).sqrt(), x[n_pop + j - 1]);
    }
    ket
}

fn output_functional(kind: FunctionalKind, out: &DensityMatrix, h: &Hamiltonian) -> f64 {
    match kind {
        FunctionalKind::Ergotropy => ergotropy(out, h),
        FunctionalKind::Incoherent => incoherent_ergotropy(out, h),
        FunctionalKind::Coherent => coherent_ergotropy(out, h),
        FunctionalKind::Total => total_ergotropy(out, h),
    }
}

struct NmOutcome {
    x: Vec<f64>,
    value: f64,
    converged: bool,
}

/// Nelder–Mead minimization with the standard reflection, expansion,
/// contraction, and shrink coefficients (1, 2, 1/2, 1/2).
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    step: f64,
    max_iters: usize,
    step_tol: f64,
    value_tol: f64,
) -> NmOutcome {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        let fv = f(&v);
        simplex.push((v, fv));
    }
    let mut converged = false;
    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread.abs() < value_tol || diameter < step_tol {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(v, _)| v[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let reflected: Vec<f64> = (0..n)
            .map(|j| 2.0 * centroid[j] - worst.0[j])
            .collect();
        let f_r = f(&reflected);
        if f_r < simplex[0].1 {
            let expanded: Vec<f64> = (0..n)
                .map(|j| centroid[j] + 2.0 * (centroid[j] - worst.0[j]))
                .collect();
            let f_e = f(&expanded);
            simplex[n] = if f_e < f_r {
                (expanded, f_e)
            } else {
                (reflected, f_r)
            };
        } else if f_r < simplex[n - 1].1 {
            simplex[n] = (reflected, f_r);
        } else {
            let outside = f_r < worst.1;
            let toward = if outside { &reflected } else { &worst.0 };
            let contracted: Vec<f64> = (0..n)
                .map(|j| centroid[j] + 0.5 * (toward[j] - centroid[j]))
                .collect();
            let f_c = f(&contracted);
            let threshold = if outside { f_r } else { worst.1 };
            if f_c < threshold {
                simplex[n] = (contracted, f_c);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for j in 0..n {
                        entry.0[j] = best[j] + 0.5 * (entry.0[j] - best[j]);
                    }
                    entry.1 = f(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    NmOutcome {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        converged,
    }
}

/// Build the multi-start list: the chart center, sign-pattern corners pushed
/// deep into the logistic tails (so extreme population splits are probed even
/// when the landscape near the center is flat), and a Latin-hypercube fill —
/// population coordinates stratified over [−3, 3], phases over [0, 2π) — all
/// drawn deterministically from the config seed.
fn seed_starts(d: usize, cfg: &OptimizerConfig) -> Vec<Vec<f64>> {
    let n_pop = d - 2;
    let n = n_pop + d - 1;
    let n_starts = cfg.n_starts.max(1);
    let mut starts = vec![vec![0.0; n]];
    if n_pop > 0 {
        let corners = (1usize << n_pop.min(3)).min(n_starts.saturating_sub(1));
        for c in 0..corners {
            let mut v = vec![0.0; n];
            for (t, slot) in v[..n_pop].iter_mut().enumerate() {
                *slot = if (c >> t) & 1 == 0 { 30.0 } else { -30.0 };
            }
            starts.push(v);
        }
    }
    let rest = n_starts - starts.len().min(n_starts);
    if rest > 0 {
        let mut r = rng(mix(cfg.seed, 0x7a6e));
        let mut fill = vec![vec![0.0; n]; rest];
        for j in 0..n {
            let (lo, hi) = if j < n_pop {
                (-3.0, 3.0)
            } else {
                (0.0, std::f64::consts::TAU)
            };
            let mut order: Vec<usize> = (0..rest).collect();
            for i in (1..rest).rev() {
                order.swap(i, r.gen_range(0..=i));
            }
            for (s, &stratum) in order.iter().enumerate() {
                let u: f64 = r.gen();
                fill[s][j] = lo + (stratum as f64 + u) * (hi - lo) / rest as f64;
            }
        }
        starts.extend(fill);
    }
    starts.truncate(n_starts);
    starts
}

fn check_energy_in_spectrum(h: &Hamiltonian, energy: f64) -> Result<f64> {
    let span = h.top() - h.ground();
    if energy < h.ground() - 1e-9 * span || energy > h.top() + 1e-9 * span {
        return Err(Error::Domain(format!(
            "energy {energy} outside the spectrum range [{}, {}]",
            h.ground(),
            h.top()
        )));
    }
    Ok(energy.clamp(h.ground(), h.top()))
}

/// Maximize the output functional over pure inputs with tr[ψH] = `energy`,
/// by multi-start Nelder–Mead on the feasible chart.
pub fn optimize_pure_on_shell(
    ch: &KrausChannel,
    h: &Hamiltonian,
    energy: f64,
    kind: FunctionalKind,
    cfg: &OptimizerConfig,
) -> Result<ShellOptimum> {
    if h.dim() != ch.dim() {
        return Err(Error::Shape(format!(
            "Hamiltonian dimension {} does not match channel dimension {}",
            h.dim(),
            ch.dim()
        )));
    }
    let energy = check_energy_in_spectrum(h, energy)?;
    // The functional only sees the map, so the reduced Kraus set (identical
    // Choi matrix, fewer operators) is a free speedup when available.
    let reduced = minimal_kraus(ch).unwrap_or_else(|_| ch.clone());
    let mut objective = |x: &[f64]| {
        let ket = shell_ket(h, energy, x);
        let psi = DensityMatrix::pure(&ket).expect("shell chart yields unit kets");
        let out = apply_channel(&reduced, &psi).expect("dimensions checked above");
        -output_functional(kind, &out, h)
    };
    let mut best: Option<NmOutcome> = None;
    let mut converged = false;
    for x0 in seed_starts(h.dim(), cfg) {
        let outcome = nelder_mead(
            &mut objective,
            &x0,
            0.8,
            cfg.max_iters,
            cfg.step_tol,
            cfg.value_tol,
        );
        converged |= outcome.converged;
        if best.as_ref().map_or(true, |b| outcome.value < b.value) {
            best = Some(outcome);
        }
    }
    let best = best.expect("at least one start");
    let ket = shell_ket(h, energy, &best.x);
    let state = DensityMatrix::pure(&ket).expect("shell chart yields unit kets");
    Ok(ShellOptimum {
        value: (-best.value).max(0.0),
        state,
        converged,
    })
}

fn check_cells_and_coherence(q: &MefQuery) -> Result<()> {
    if q.n_cells != 1 {
        return Err(Error::Domain(format!(
            "only single-cell queries are supported, got n_cells = {}",
            q.n_cells
        )));
    }
    if q.functional_kind == FunctionalKind::Coherent
        && q.channel.gmad_meta().is_none()
        && !q.allow_coherent_anywhere
    {
        return Err(Error::Domain(
            "coherent functional requested for a channel without GMAD structure; \
             set allow_coherent_anywhere to force the evaluation"
                .into(),
        ));
    }
    Ok(())
}

/// Best functional value over pure inputs with energy exactly `q.energy`.
pub fn shell_mef(q: &MefQuery, cfg: &OptimizerConfig) -> Result<f64> {
    check_cells_and_coherence(q)?;
    if q.constraint != Constraint::Shell {
        return Err(Error::Domain(
            "query carries a ball constraint; use ball_mef".into(),
        ));
    }
    let h = q.channel.hamiltonian();
    optimize_pure_on_shell(q.channel, h, q.energy, q.functional_kind, cfg).map(|o| o.value)
}

/// Best functional value over pure inputs with energy at most `q.energy`:
/// a coarse scan of the admissible shells followed by a local refinement
/// around the best one.
pub fn ball_mef(q: &MefQuery, cfg: &OptimizerConfig) -> Result<f64> {
    check_cells_and_coherence(q)?;
    if q.constraint != Constraint::Ball {
        return Err(Error::Domain(
            "query carries a shell constraint; use shell_mef".into(),
        ));
    }
    let h = q.channel.hamiltonian();
    let cap = check_energy_in_spectrum(h, q.energy)?;
    let lo = h.ground();
    let span = h.top() - lo;
    if cap - lo < 1e-12 * span.max(1.0) {
        return optimize_pure_on_shell(q.channel, h, lo, q.functional_kind, cfg).map(|o| o.value);
    }
    const COARSE: usize = 25;
    const FINE: usize = 9;
    let mut best = f64::NEG_INFINITY;
    let mut best_i = 0;
    for i in 0..COARSE {
        let e = lo + (cap - lo) * i as f64 / (COARSE - 1) as f64;
        let v = optimize_pure_on_shell(q.channel, h, e, q.functional_kind, &cfg.reseeded(i as u64))?
            .value;
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let step = (cap - lo) / (COARSE - 1) as f64;
    let center = lo + step * best_i as f64;
    let win_lo = (center - step).max(lo);
    let win_hi = (center + step).min(cap);
    for j in 0..FINE {
        let e = win_lo + (win_hi - win_lo) * j as f64 / (FINE - 1) as f64;
        let v = optimize_pure_on_shell(
            q.channel,
            h,
            e,
            q.functional_kind,
            &cfg.reseeded(1000 + j as u64),
        )?
        .value;
        best = best.max(v);
    }
    Ok(best.max(0.0))
}

/// Functional values on a uniform energy grid spanning the spectrum range.
/// The query's own `energy` field is ignored.  Ball curves are the running
/// maximum of the shell values on the same grid, which is exact up to the
/// grid resolution since shells at or below a budget exhaust the ball.
pub fn sweep_curve(q: &MefQuery, grid_size: usize, cfg: &OptimizerConfig) -> Result<EnergyCurve> {
    check_cells_and_coherence(q)?;
    if grid_size < 2 {
        return Err(Error::Domain(format!(
            "a sweep needs at least two grid points, got {grid_size}"
        )));
    }
    let h = q.channel.hamiltonian();
    let lo = h.ground();
    let span = h.top() - lo;
    let mut points = Vec::with_capacity(grid_size);
    for i in 0..grid_size {
        let e = lo + span * i as f64 / (grid_size - 1) as f64;
        let v = optimize_pure_on_shell(q.channel, h, e, q.functional_kind, &cfg.reseeded(i as u64))?
            .value;
        points.push((e, v));
    }
    if q.constraint == Constraint::Ball {
        let mut running = f64::NEG_INFINITY;
        for p in points.iter_mut() {
            running = running.max(p.1);
            p.1 = running;
        }
    }
    Ok(EnergyCurve {
        points,
        metadata: CurveMeta {
            functional_kind: q.functional_kind,
            constraint: q.constraint,
            energy_offset: 0.0,
            energy_scale: 1.0,
        },
    })
}

/// Upper concave envelope of a sampled curve, evaluated back on its grid.
///
/// Monotone-chain construction: scanning left to right, the previous vertex
/// is discarded whenever it falls on or below the chord from its predecessor
/// to the incoming point, so the surviving vertices are the least concave
/// majorant of the samples.  The result linearly interpolates that majorant
/// at the original abscissae.
pub fn concave_envelope(curve: &EnergyCurve) -> EnergyCurve {
    let pts = &curve.points;
    if pts.len() < 3 {
        return curve.clone();
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let turn = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if turn >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut seg = 0;
    let points = pts
        .iter()
        .map(|&(x, _)| {
            while seg + 2 < hull.len() && hull[seg + 1].0 <= x {
                seg += 1;
            }
            let (x0, y0) = hull[seg];
            let (x1, y1) = hull[seg + 1];
            let t = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
            (x, y0 + t * (y1 - y0))
        })
        .collect();
    EnergyCurve {
        points,
        metadata: curve.metadata,
    }
}

/// Work capacitance χ: the concave envelope of the single-cell ball-MEF
/// ergotropy curve on the spectrum normalized to [0, 1].
///
/// Mixing shell strategies across cells turns the single-state curve into its
/// least concave majorant, which for a non-decreasing curve is exactly the
/// mixing optimum.  The spectrum is normalized internally so capacitances of
/// different channels share an axis; the affine factors are recorded in the
/// returned metadata.
pub fn chi_capacitance(
    ch: &KrausChannel,
    grid_size: usize,
    cfg: &OptimizerConfig,
) -> Result<EnergyCurve> {
    let q = MefQuery::new(
        ch,
        FunctionalKind::Ergotropy,
        Constraint::Ball,
        ch.hamiltonian().top(),
    );
    let ball = sweep_curve(&q, grid_size, cfg)?;
    let (_, offset, scale) = ch.hamiltonian().normalized();
    let points = ball
        .points
        .iter()
        .map(|&(e, v)| ((e - offset) / scale, v / scale))
        .collect();
    let normalized = EnergyCurve {
        points,
        metadata: CurveMeta {
            functional_kind: FunctionalKind::Ergotropy,
            constraint: Constraint::Ball,
            energy_offset: offset,
            energy_scale: scale,
        },
    };
    Ok(concave_envelope(&normalized))
}

/// Maximal asymptotic work-to-energy ratio: the slope of the capacitance at
/// vanishing energy density, estimated from the two finest sampled shells by
/// the Richardson step 2·r(ε/2) − r(ε) applied to r(ε) = χ(ε)/ε at ε = 5e−3.
///
/// The capacitance is evaluated on the default grid augmented with the
/// extrapolation abscissae, so every ratio reads off an exact curve node.
pub fn mawer(ch: &KrausChannel, cfg: &OptimizerConfig) -> Result<MawerEstimate> {
    let h = ch.hamiltonian();
    let (_, offset, scale) = h.normalized();
    let mut xs: Vec<f64> = (0..DEFAULT_GRID)
        .map(|i| i as f64 / (DEFAULT_GRID - 1) as f64)
        .collect();
    for &eps in &MAWER_EPSILONS {
        if !xs.iter().any(|&x| (x - eps).abs() < 1e-12) {
            xs.push(eps);
        }
    }
    xs.sort_by(f64::total_cmp);
    let mut points = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let e = offset + scale * x;
        let v = optimize_pure_on_shell(
            ch,
            h,
            e,
            FunctionalKind::Ergotropy,
            &cfg.reseeded(i as u64),
        )?
        .value;
        points.push((x, v / scale));
    }
    let mut running = f64::NEG_INFINITY;
    for p in points.iter_mut() {
        running = running.max(p.1);
        p.1 = running;
    }
    let ball = EnergyCurve {
        points,
        metadata: CurveMeta {
            functional_kind: FunctionalKind::Ergotropy,
            constraint: Constraint::Ball,
            energy_offset: offset,
            energy_scale: scale,
        },
    };
    let chi = concave_envelope(&ball);
    let mut ratios = [0.0; 3];
    for (slot, &eps) in ratios.iter_mut().zip(&MAWER_EPSILONS) {
        *slot = chi.value_at(eps) / eps;
    }
    Ok(MawerEstimate {
        value: 2.0 * ratios[2] - ratios[1],
        ratios,
        epsilons: MAWER_EPSILONS,
    })
}
