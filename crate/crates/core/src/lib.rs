//! Shape-invariant matrix superpotentials linear in the spectral parameter:
//! family construction, residual verification and matrix Schrödinger solvers.
//!
//! The crate is organized around three layers:
//!
//! - [`superpotential`] builds `W_k = kQ + P` for every solution family of the
//!   determining equations `Q' = Q² + ν`, `P' = ½{Q,P} - μ`, with analytic
//!   derivatives taken from the equations themselves.
//! - [`invariance`] checks the determining equations and the shape-invariance
//!   identity by grid residuals, extracts the ladder constant `C_k`
//!   empirically and provides the resolvent construction as an independent
//!   oracle for `Q`.
//! - [`spectral`] discretizes `H_k = -d²/dx² + V_k + c_k`, computes low-lying
//!   eigenvalues by block-tridiagonal spectrum slicing, integrates zero modes
//!   and climbs the raising-operator ladder.
//!
//! All operations are pure functions of immutable inputs and are safe to call
//! concurrently.

#![allow(clippy::needless_range_loop)] // index loops read better in the matrix code

pub mod error;
pub mod grid;
pub mod invariance;
pub mod spectral;
pub mod superpotential;

pub use error::{Error, Result};
pub use grid::GridDomain;
pub use invariance::{
    extract_ck, extract_ck_with, predicted_ck, resolvent_q, resolvent_residual,
    residual_determining, rho_theta_phi, ResidualReport, ResolventBasis,
    DEFAULT_INVARIANCE_TOL,
};
pub use spectral::{
    apply_lowering, apply_raising, discretize, discretize_partner, energy_ladder, excited_state,
    excited_state_with, l2_normalize, low_spectrum, lowest_eigenvalue_convergence,
    partner_identity, zero_mode_basis, zero_mode_basis_with, zero_mode_residual, GridSpinor,
    HamiltonianMatrix, LadderOptions, SpectralReport, ZeroModeOptions,
};
pub use superpotential::{
    q_derivative, q_value, Model, NuClass, Partner, PolePoint, PoleSet, QEntry, ValidityWindow,
};
