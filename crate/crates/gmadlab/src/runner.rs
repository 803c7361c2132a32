//! Subcommand implementations.
//!
//! Every artifact-producing command stamps its output with the SHA-256 of the
//! fully resolved run description, so byte-identical outputs certify
//! identical inputs.  Numeric CSV fields use 17 significant digits and '\n'
//! line endings; rows are emitted strictly ordered by (β, ε) or iteration.

use std::path::Path;

use gmad_core::sampling::mix;
use gmad_core::{
    apply_channel, coherent_ergotropy, concave_envelope, dephase, entropic_beta_of,
    incoherent_ergotropy, mawer, minimal_kraus, sweep_curve, total_coherent_ergotropy,
    verify_channel, Beta, Constraint, CurveMeta, DensityMatrix, EnergyCurve, FunctionalKind,
    MefQuery, OptimizerConfig, DEFAULT_GRID,
};

use crate::config::{BetaSpec, ChannelConfig, ResolvedRun, StatePair};
use crate::CliError;

/// Seed / resolution knobs after applying defaults and the GMADLAB_SEED
/// override.
pub struct RunSettings {
    pub seed: u64,
    pub grid: usize,
    pub n_starts: usize,
    pub max_iters: usize,
}

impl RunSettings {
    pub fn resolve(cfg: &ChannelConfig, grid_flag: Option<usize>) -> Result<Self, CliError> {
        let seed = match std::env::var("GMADLAB_SEED") {
            Ok(text) => text
                .trim()
                .parse::<u64>()
                .map_err(|_| CliError::Config(format!("GMADLAB_SEED must be a u64, got \"{text}\"")))?,
            Err(std::env::VarError::NotPresent) => cfg.seed.unwrap_or(42),
            Err(e) => return Err(CliError::Config(format!("GMADLAB_SEED: {e}"))),
        };
        let grid = grid_flag.or(cfg.grid).unwrap_or(DEFAULT_GRID);
        if grid < 2 {
            return Err(CliError::Config(format!("grid must be ≥ 2, got {grid}")));
        }
        Ok(RunSettings {
            seed,
            grid,
            n_starts: cfg.n_starts.unwrap_or(64),
            max_iters: cfg.max_iters.unwrap_or(2000),
        })
    }

    pub fn optimizer(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            n_starts: self.n_starts,
            max_iters: self.max_iters,
            seed,
            ..OptimizerConfig::default()
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn report_json(report: &gmad_core::ChannelReport) -> serde_json::Value {
    serde_json::json!({
        "passed": report.passed(),
        "trace_residual": report.trace_residual,
        "trace_preserving": report.trace_preserving,
        "choi_min_eigenvalue": report.choi_min_eigenvalue,
        "completely_positive": report.completely_positive,
        "gibbs_residual": report.gibbs_residual,
        "gibbs_preserving": report.gibbs_preserving,
        "incoherence_residual": report.incoherence_residual,
        "strictly_incoherent": report.strictly_incoherent,
        "detailed_balance_residual": report.detailed_balance_residual,
        "detailed_balance": report.detailed_balance,
        "degenerate_gaps": report.degenerate_gaps,
    })
}

/// `verify`: build the channel and print a JSON residual report.
///
/// A config that parses but describes a non-channel (e.g. a non-unitary
/// block) yields a failing report and exit code 1; a config that cannot be
/// parsed at all is a config error (exit 2).
pub fn run_verify(config_path: &Path) -> Result<i32, CliError> {
    let cfg = ChannelConfig::load(config_path)?;
    let channel = match cfg.build_channel() {
        Ok(ch) => ch,
        Err(CliError::Property(msg)) => {
            let report = serde_json::json!({ "passed": false, "error": msg });
            println!("{:#}", report);
            return Ok(1);
        }
        Err(other) => return Err(other),
    };
    let report = verify_channel(&channel, cfg.beta.to_beta()?);
    println!("{:#}", report_json(&report));
    Ok(if report.passed() { 0 } else { 1 })
}

fn parse_beta_list(text: &str) -> Result<Vec<BetaSpec>, CliError> {
    let specs: Result<Vec<_>, _> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(BetaSpec::parse)
        .collect();
    let specs = specs?;
    if specs.is_empty() {
        return Err(CliError::Config("empty --betas list".into()));
    }
    Ok(specs)
}

/// `sweep`: tabulate one maximal-extractable-functional curve per β.
pub fn run_sweep(
    config_path: &Path,
    kind: FunctionalKind,
    constraint: Constraint,
    grid_flag: Option<usize>,
    betas_flag: Option<&str>,
    out: &Path,
) -> Result<i32, CliError> {
    let cfg = ChannelConfig::load(config_path)?;
    let settings = RunSettings::resolve(&cfg, grid_flag)?;
    let betas = match betas_flag {
        Some(text) => parse_beta_list(text)?,
        None => vec![cfg.beta.clone()],
    };

    let run = ResolvedRun {
        command: "sweep",
        channel: &cfg,
        seed: settings.seed,
        grid: settings.grid,
        n_starts: settings.n_starts,
        max_iters: settings.max_iters,
        kind: Some(kind.to_string()),
        constraint: Some(constraint.to_string()),
        betas: Some(betas.iter().map(|b| b.to_string()).collect()),
        states: None,
        iters: None,
    };

    let mut csv = format!("# config_hash={}\n", run.hash());
    csv.push_str("beta,epsilon,functional_kind,constraint,value\n");
    for (bi, beta_spec) in betas.iter().enumerate() {
        let mut at_beta = cfg.clone();
        at_beta.beta = beta_spec.clone();
        let channel = at_beta.build_channel()?;
        let query = MefQuery::new(&channel, kind, constraint, channel.hamiltonian().top());
        let opt = settings.optimizer(mix(settings.seed, bi as u64));
        let curve =
            sweep_curve(&query, settings.grid, &opt).map_err(|e| CliError::Config(e.to_string()))?;
        for (epsilon, value) in curve.points {
            csv.push_str(&format!(
                "{beta_spec},{epsilon:.16e},{kind},{constraint},{value:.16e}\n"
            ));
        }
    }
    write_text(out, &csv)?;
    Ok(0)
}

fn normalized(curve: &EnergyCurve, offset: f64, scale: f64) -> EnergyCurve {
    EnergyCurve {
        points: curve
            .points
            .iter()
            .map(|&(e, v)| ((e - offset) / scale, v / scale))
            .collect(),
        metadata: CurveMeta {
            energy_offset: offset,
            energy_scale: scale,
            ..curve.metadata
        },
    }
}

/// `capacitance`: ball curves, their concave envelopes (χ for the ergotropy
/// kind), and a MAWER sidecar, all on the spectrum normalized to [0, 1].
pub fn run_capacitance(config_path: &Path, out: &Path) -> Result<i32, CliError> {
    let cfg = ChannelConfig::load(config_path)?;
    let settings = RunSettings::resolve(&cfg, None)?;
    let channel = cfg.build_channel()?;
    let h = channel.hamiltonian().clone();
    let (_, offset, scale) = h.normalized();

    let run = ResolvedRun {
        command: "capacitance",
        channel: &cfg,
        seed: settings.seed,
        grid: settings.grid,
        n_starts: settings.n_starts,
        max_iters: settings.max_iters,
        kind: None,
        constraint: None,
        betas: None,
        states: None,
        iters: None,
    };
    let hash = run.hash();

    let sweep = |kind: FunctionalKind, salt: u64| -> Result<EnergyCurve, CliError> {
        let query = MefQuery::new(&channel, kind, Constraint::Ball, h.top());
        let opt = settings.optimizer(mix(settings.seed, salt));
        let raw = sweep_curve(&query, settings.grid, &opt)
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(normalized(&raw, offset, scale))
    };
    let ball = sweep(FunctionalKind::Ergotropy, 0)?;
    let chi = concave_envelope(&ball);
    let inc_ball = sweep(FunctionalKind::Incoherent, 1)?;
    let inc_env = concave_envelope(&inc_ball);

    let mut csv = format!("# config_hash={hash}\n");
    csv.push_str("epsilon,ball_mef,chi,incoherent_ball,incoherent_envelope\n");
    for i in 0..ball.len() {
        let (e, b) = ball.points[i];
        csv.push_str(&format!(
            "{e:.16e},{b:.16e},{:.16e},{:.16e},{:.16e}\n",
            chi.points[i].1,
            inc_ball.points[i].1,
            inc_env.points[i].1
        ));
    }
    write_text(out, &csv)?;

    let estimate = mawer(&channel, &settings.optimizer(settings.seed))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let sidecar = serde_json::json!({
        "config_hash": hash,
        "mawer": estimate.value,
        "ratios": estimate.ratios,
        "epsilons": estimate.epsilons,
    });
    let sidecar_path = out.with_file_name(format!(
        "{}.mawer.json",
        out.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
    ));
    write_text(&sidecar_path, &format!("{:#}\n", sidecar))?;
    Ok(0)
}

/// `mawer`: print the small-shell work-extraction ratio as JSON on stdout.
pub fn run_mawer(config_path: &Path) -> Result<i32, CliError> {
    let cfg = ChannelConfig::load(config_path)?;
    let settings = RunSettings::resolve(&cfg, None)?;
    let channel = cfg.build_channel()?;
    let run = ResolvedRun {
        command: "mawer",
        channel: &cfg,
        seed: settings.seed,
        grid: settings.grid,
        n_starts: settings.n_starts,
        max_iters: settings.max_iters,
        kind: None,
        constraint: None,
        betas: None,
        states: None,
        iters: None,
    };
    let estimate = mawer(&channel, &settings.optimizer(settings.seed))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let payload = serde_json::json!({
        "config_hash": run.hash(),
        "mawer": estimate.value,
        "ratios": estimate.ratios,
        "epsilons": estimate.epsilons,
    });
    println!("{:#}", payload);
    Ok(0)
}

fn beta_field(beta: Beta) -> String {
    match beta {
        Beta::Finite(v) => format!("{v:.16e}"),
        Beta::Infinite => "inf".into(),
    }
}

/// `mpemba`: iterate the channel on a dephase-matched state pair and tabulate
/// coherent-ergotropy ratios.
///
/// The two inputs must share their dephased part; because the channel is
/// strictly incoherent, their incoherent ergotropies then stay equal at every
/// iteration, and this is re-checked to 1e−9 as a runtime self-test.
pub fn run_mpemba(
    config_path: &Path,
    states_path: &Path,
    iters: usize,
    out: &Path,
) -> Result<i32, CliError> {
    let cfg = ChannelConfig::load(config_path)?;
    let settings = RunSettings::resolve(&cfg, None)?;
    let pair = StatePair::load(states_path)?;
    let (rho0, sigma0) = pair.states()?;
    let channel = cfg.build_channel()?;
    let h = channel.hamiltonian().clone();
    if rho0.dim() != channel.dim() || sigma0.dim() != channel.dim() {
        return Err(CliError::Config(format!(
            "states are {}- and {}-dimensional but the channel acts on {} levels",
            rho0.dim(),
            sigma0.dim(),
            channel.dim()
        )));
    }
    check_dephase_match(&rho0, &sigma0)?;

    let run = ResolvedRun {
        command: "mpemba",
        channel: &cfg,
        seed: settings.seed,
        grid: settings.grid,
        n_starts: settings.n_starts,
        max_iters: settings.max_iters,
        kind: None,
        constraint: None,
        betas: None,
        states: Some(&pair),
        iters: Some(iters),
    };
    let hash = run.hash();

    let reduced = minimal_kraus(&channel).map_err(|e| CliError::Config(e.to_string()))?;
    let mut rho = rho0;
    let mut sigma = sigma0;
    let mut csv = format!("# config_hash={hash}\n");
    csv.push_str(
        "n,coherent_rho,coherent_sigma,coherent_ratio,total_coherent_rho,total_coherent_sigma,total_coherent_ratio,beta_star_rho,beta_star_sigma\n",
    );
    let mut coherent_ratios = Vec::with_capacity(iters + 1);
    let mut total_ratios = Vec::with_capacity(iters + 1);
    for n in 0..=iters {
        let inc_gap = (incoherent_ergotropy(&rho, &h) - incoherent_ergotropy(&sigma, &h)).abs();
        if inc_gap > 1e-9 {
            return Err(CliError::Property(format!(
                "incoherent ergotropies diverged at iteration {n}: |ΔE_i| = {inc_gap:.3e} > 1e-9"
            )));
        }
        let ec_r = coherent_ergotropy(&rho, &h);
        let ec_s = coherent_ergotropy(&sigma, &h);
        let et_r = total_coherent_ergotropy(&rho, &h);
        let et_s = total_coherent_ergotropy(&sigma, &h);
        let ratio = ec_r / ec_s;
        let ratio_tot = et_r / et_s;
        coherent_ratios.push(ratio);
        total_ratios.push(ratio_tot);
        let bs_r = beta_field(entropic_beta_of(&rho, &h).beta_star);
        let bs_s = beta_field(entropic_beta_of(&sigma, &h).beta_star);
        csv.push_str(&format!(
            "{n},{ec_r:.16e},{ec_s:.16e},{ratio:.16e},{et_r:.16e},{et_s:.16e},{ratio_tot:.16e},{bs_r},{bs_s}\n"
        ));
        if n < iters {
            rho = apply_channel(&reduced, &rho).map_err(|e| CliError::Config(e.to_string()))?;
            sigma = apply_channel(&reduced, &sigma).map_err(|e| CliError::Config(e.to_string()))?;
        }
    }
    write_text(out, &csv)?;

    let report = serde_json::json!({
        "config_hash": hash,
        "iterations": iters,
        "coherent_crossings": crossings(&coherent_ratios),
        "total_coherent_crossings": crossings(&total_ratios),
    });
    let report_path = out.with_file_name(format!(
        "{}.report.json",
        out.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
    ));
    write_text(&report_path, &format!("{:#}\n", report))?;
    Ok(0)
}

fn check_dephase_match(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<(), CliError> {
    let dr = dephase(rho);
    let ds = dephase(sigma);
    let offending: Vec<String> = (0..rho.dim())
        .filter_map(|i| {
            let gap = (dr.matrix()[(i, i)] - ds.matrix()[(i, i)]).norm();
            (gap > 1e-8).then(|| format!("({i},{i}): |Δ| = {gap:.3e}"))
        })
        .collect();
    if offending.is_empty() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "dephased parts of the two states differ beyond 1e-8 at diagonal entries {}",
            offending.join(", ")
        )))
    }
}

/// Indices n ≥ 1 at which the ratio sequence moves to the other side of 1.
fn crossings(ratios: &[f64]) -> Vec<usize> {
    ratios
        .windows(2)
        .enumerate()
        .filter_map(|(n, w)| {
            let a = w[0] - 1.0;
            let b = w[1] - 1.0;
            (a.is_finite() && b.is_finite() && a * b < 0.0).then_some(n + 1)
        })
        .collect()
}
