//! Discretization of the matrix Schrödinger operator, eigenvalue extraction,
//! zero-mode construction by first-order integration and the raising-operator
//! ladder.

mod hamiltonian;
mod modes;

pub use hamiltonian::{
    discretize, discretize_partner, low_spectrum, lowest_eigenvalue_convergence,
    HamiltonianMatrix,
};
pub use modes::{
    apply_lowering, apply_raising, energy_ladder, excited_state, excited_state_with,
    l2_normalize, partner_identity, zero_mode_basis, zero_mode_basis_with, zero_mode_residual,
    LadderOptions, ZeroModeOptions,
};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridDomain;

/// An n-component complex spinor sampled on every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpinor {
    domain: GridDomain,
    /// npoints × n; row i holds the spinor at node i.
    values: DMatrix<Complex64>,
}

impl GridSpinor {
    pub fn new(domain: GridDomain, values: DMatrix<Complex64>) -> Result<Self> {
        if values.nrows() != domain.npoints() {
            return Err(Error::InvalidArgument(format!(
                "spinor has {} rows, grid has {} nodes",
                values.nrows(),
                domain.npoints()
            )));
        }
        if values.ncols() == 0 {
            return Err(Error::InvalidArgument("spinor needs at least one channel".into()));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("spinor entries must be finite".into()));
        }
        Ok(GridSpinor { domain, values })
    }

    pub fn zeros(domain: GridDomain, channels: usize) -> Self {
        GridSpinor {
            values: DMatrix::zeros(domain.npoints(), channels),
            domain,
        }
    }

    pub fn from_fn<F: Fn(f64, usize) -> Complex64>(
        domain: GridDomain,
        channels: usize,
        f: F,
    ) -> Self {
        let values =
            DMatrix::from_fn(domain.npoints(), channels, |i, c| f(domain.node(i), c));
        GridSpinor { domain, values }
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn channels(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<Complex64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.values
    }

    /// Trapezoid-rule L² inner product ⟨self, other⟩ (conjugate-linear in self).
    pub fn inner(&self, other: &GridSpinor) -> Complex64 {
        assert_eq!(self.domain, other.domain, "grid mismatch");
        assert_eq!(self.channels(), other.channels(), "channel mismatch");
        let h = self.domain.spacing();
        let np = self.domain.npoints();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..np {
            let w = if i == 0 || i == np - 1 { 0.5 } else { 1.0 };
            for c in 0..self.channels() {
                acc += self.values[(i, c)].conj() * other.values[(i, c)] * w;
            }
        }
        acc * h
    }

    /// Trapezoid-rule L² norm.
    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn scale(&self, a: Complex64) -> GridSpinor {
        GridSpinor {
            domain: self.domain,
            values: &self.values * a,
        }
    }

    pub fn add_scaled(&self, a: Complex64, other: &GridSpinor) -> GridSpinor {
        GridSpinor {
            domain: self.domain,
            values: &self.values + &other.values * a,
        }
    }
}

/// Spectral diagnostics for one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    /// Ascending eigenvalues of the shifted Hamiltonian.
    pub eigenvalues: Vec<f64>,
    /// Ladder energies predicted from the lowest eigenvalue.
    pub ladder_predictions: Vec<f64>,
    /// Relative residual ‖a_k ψ‖/‖ψ‖ of the worst zero mode, if computed.
    pub residual_zero_mode: f64,
    /// Error ratio of the lowest eigenvalue under two grid halvings.
    pub convergence_ratio: f64,
}
