//! Certification of exponential stability for Lur'e-type feedback
//! systems via frequency-domain (KYP / circle / Popov) criteria, with
//! closed-form sector and rate bounds for damped Hamiltonian
//! oscillators, plus simulation and sampling oracles for validation.

pub mod dissipativity;
pub mod error;
pub mod linalg;
pub mod matio;
pub mod nonlinear;
pub mod oscillator;
pub mod systems;

pub use dissipativity::{
    energy_integral, factorize, fdi_grid_check, lmi_matrix, lmi_max_eig, lmi_tolerance,
    minimal_stability_witness, popov_eval, supply_eval, CandidateStorage, FactorizationResult,
    FdiReport, GridSpec, HalfPlane, MinimalStability, SupplyRate,
};
pub use error::{Error, Result};
pub use linalg::{C64, CMat, CVec, RMat, RVec};
pub use nonlinear::{
    estimate_decay_rate, lyapunov_monotonicity, make_nonlinearity, quasi_convexity_sample,
    sector_membership_sample, simulate_hamiltonian, simulate_lure, ConvexPart, Nonlinearity,
    RateEstimate, SampleReport, Sector, Trajectory,
};
pub use oscillator::{
    build_oscillator, certify, circle_bound, closed_loop_charpoly, closed_loop_matrix,
    fdi_coefficients, linear_rate_region, multiplier_supply, optimal_linear_rate, popov_ti_bound,
    quartic_nonneg, quasi_bounds, sharpness_probe, tau_certificate, theorem1_storage,
    FdiCriterion, FdiInputs, FeasibilityCoefficients, LoopShift, OscillatorParams,
    RateCertificate, RateRegion, TheoremId, Verdict,
};
pub use systems::{
    apply_feedback, is_hurwitz, is_marginally_stable, observability_rank, reachability_rank,
    spectral_abscissa, system_matrix_kernel_dim, zero_dynamics, zero_dynamics_residual, Field,
    LtiSystem, ZeroDynamicsResult,
};
