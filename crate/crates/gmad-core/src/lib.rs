//! Generalized multilevel amplitude damping (GMAD) channels on d-level systems,
//! work-extraction functionals (ergotropy family, shell/ball maximal ergotropic
//! functionals, capacitances, MAWER), and the supporting dense complex linear
//! algebra. Everything here is pure and deterministic; randomness only enters
//! through explicitly seeded generators.

pub mod ergotropy;
pub mod functionals;
pub mod gmad;
pub mod linalg;
pub mod sampling;
pub mod states;

pub use ergotropy::{
    breakdown, coherent_ergotropy, entropic_beta_of, ergotropy, incoherent_ergotropy,
    local_ergotropy_product, total_coherent_ergotropy, total_ergotropy, ErgotropyBreakdown,
};
pub use functionals::{
    ball_mef, chi_capacitance, concave_envelope, mawer, optimize_pure_on_shell, shell_mef,
    sweep_curve, Constraint, CurveMeta, EnergyCurve, FunctionalKind, MawerEstimate, MefQuery,
    OptimizerConfig, ShellOptimum, DEFAULT_GRID, MAWER_EPSILONS,
};
pub use gmad::{
    apply_channel, apply_direct, build_gmad, build_qutrit_gmad, choi_distance, choi_matrix,
    iterate_channel, minimal_kraus, verify_channel, ChannelReport, ChoiMatrix, GmadSpec,
    KrausChannel, QutritGmadParams, UnitaryBlocks,
};
pub use linalg::{hermitian_eig, schur_product, tensor_product, ComplexMatrix, EigenDecomposition};
pub use states::{
    dephase, gibbs_state, passive_state, solve_entropic_beta, von_neumann_entropy, Beta,
    DensityMatrix, EntropicTemperature, Hamiltonian,
};

/// Errors shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid Hamiltonian: {0}")]
    InvalidSpectrum(String),
    #[error("block {block} is not unitary (residual {residual:.3e})")]
    NotUnitary { block: usize, residual: f64 },
    #[error("invalid channel structure: {0}")]
    Structure(String),
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
