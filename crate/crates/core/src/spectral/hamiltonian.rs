//! Finite-difference Hamiltonian H = -d²/dx² + V(x) + shift on a uniform grid
//! with Dirichlet conditions at both interval endpoints, stored in
//! block-tridiagonal form. Eigenvalues are located by spectrum slicing: the
//! block LDL† recursion yields the inertia of H - σ, and bisection on σ pins
//! each eigenvalue individually.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::GridSpinor;
use crate::error::{Error, Result};
use crate::grid::GridDomain;
use crate::superpotential::{Model, Partner};

/// Hermitian block-tridiagonal matrix acting on spinor values at the interior
/// nodes of a grid; the endpoint values are pinned to zero. Off-diagonal
/// blocks are a real scalar multiple of the identity.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    domain: GridDomain,
    n: usize,
    shift: f64,
    /// Scalar of the off-diagonal blocks, -1/h² for a discretized Laplacian.
    off: f64,
    /// Full diagonal blocks at interior nodes i = 1..npoints-2.
    diag_blocks: Vec<DMatrix<Complex64>>,
}

impl HamiltonianMatrix {
    /// Assembles the operator from explicit diagonal blocks (one per interior
    /// node) and the off-diagonal scalar.
    pub fn from_blocks(
        domain: GridDomain,
        diag_blocks: Vec<DMatrix<Complex64>>,
        off: f64,
        shift: f64,
    ) -> Result<Self> {
        if diag_blocks.len() != domain.npoints() - 2 {
            return Err(Error::InvalidArgument(format!(
                "need {} diagonal blocks, got {}",
                domain.npoints() - 2,
                diag_blocks.len()
            )));
        }
        let n = diag_blocks[0].nrows();
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one channel".into()));
        }
        if !off.is_finite() {
            return Err(Error::InvalidArgument("off-diagonal scalar must be finite".into()));
        }
        for (bi, d) in diag_blocks.iter().enumerate() {
            if d.nrows() != n || d.ncols() != n {
                return Err(Error::InvalidArgument(format!(
                    "block {bi} has shape {}x{}, expected {n}x{n}",
                    d.nrows(),
                    d.ncols()
                )));
            }
            let herm_err = (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .map(|(a, b)| (d[(a, b)] - d[(b, a)].conj()).norm())
                .fold(0.0_f64, f64::max);
            if herm_err > 1e-10 * (1.0 + off.abs()) {
                return Err(Error::InvalidArgument(format!(
                    "block {bi} is not hermitian (defect {herm_err:.3e})"
                )));
            }
        }
        Ok(HamiltonianMatrix {
            domain,
            n,
            shift,
            off,
            diag_blocks,
        })
    }

    /// Builds the operator from a hermitian potential sampler:
    /// diagonal blocks 2/h² + V(x_i) + shift, off-diagonal blocks -1/h².
    pub fn from_potential<F>(
        domain: GridDomain,
        channels: usize,
        shift: f64,
        potential: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> Result<DMatrix<Complex64>>,
    {
        let h = domain.spacing();
        let inv_h2 = 1.0 / (h * h);
        let mut diag_blocks = Vec::with_capacity(domain.npoints() - 2);
        for i in 1..domain.npoints() - 1 {
            let x = domain.node(i);
            let v = potential(x)?;
            if v.nrows() != channels || v.ncols() != channels {
                return Err(Error::InvalidArgument(format!(
                    "potential block at x = {x} has shape {}x{}, expected {channels}x{channels}",
                    v.nrows(),
                    v.ncols()
                )));
            }
            let mut d = v;
            for c in 0..channels {
                d[(c, c)] += Complex64::new(2.0 * inv_h2 + shift, 0.0);
            }
            diag_blocks.push(d);
        }
        Self::from_blocks(domain, diag_blocks, -inv_h2, shift)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn channels(&self) -> usize {
        self.n
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Number of unknowns: channels × interior nodes.
    pub fn size(&self) -> usize {
        self.n * self.diag_blocks.len()
    }

    pub fn diag_block(&self, interior_index: usize) -> &DMatrix<Complex64> {
        &self.diag_blocks[interior_index]
    }

    pub fn offdiag_coefficient(&self) -> f64 {
        self.off
    }

    /// Dense assembly, intended for small oracle instances.
    pub fn dense(&self) -> DMatrix<Complex64> {
        let m = self.diag_blocks.len();
        let n = self.n;
        let mut a = DMatrix::<Complex64>::zeros(m * n, m * n);
        for (bi, d) in self.diag_blocks.iter().enumerate() {
            for r in 0..n {
                for c in 0..n {
                    a[(bi * n + r, bi * n + c)] = d[(r, c)];
                }
            }
            if bi + 1 < m {
                for r in 0..n {
                    a[(bi * n + r, (bi + 1) * n + r)] = Complex64::new(self.off, 0.0);
                    a[((bi + 1) * n + r, bi * n + r)] = Complex64::new(self.off, 0.0);
                }
            }
        }
        a
    }

    /// Applies the operator to a spinor sampled on the full grid. Endpoint
    /// rows of the result are zero; endpoint values of the input participate
    /// through the stencil.
    pub fn apply(&self, psi: &GridSpinor) -> Result<GridSpinor> {
        if psi.domain() != &self.domain {
            return Err(Error::InvalidArgument("grid mismatch in apply".into()));
        }
        if psi.channels() != self.n {
            return Err(Error::InvalidArgument("channel mismatch in apply".into()));
        }
        let np = self.domain.npoints();
        let mut out = GridSpinor::zeros(self.domain, self.n);
        for i in 1..np - 1 {
            let d = &self.diag_blocks[i - 1];
            for r in 0..self.n {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..self.n {
                    acc += d[(r, c)] * psi.values()[(i, c)];
                }
                acc += Complex64::new(self.off, 0.0)
                    * (psi.values()[(i - 1, r)] + psi.values()[(i + 1, r)]);
                out.values_mut()[(i, r)] = acc;
            }
        }
        Ok(out)
    }

    /// Rayleigh quotient over the interior nodes.
    pub fn rayleigh_quotient(&self, psi: &GridSpinor) -> Result<f64> {
        let hpsi = self.apply(psi)?;
        let np = self.domain.npoints();
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for i in 1..np - 1 {
            for c in 0..self.n {
                num += psi.values()[(i, c)].conj() * hpsi.values()[(i, c)];
                den += psi.values()[(i, c)].norm_sqr();
            }
        }
        if den == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(num.re / den)
    }

    /// Eigenvalue count below σ via the block LDL† inertia, or None when σ is
    /// numerically indistinguishable from a Schur-complement eigenvalue.
    fn count_below(&self, sigma: f64) -> Option<usize> {
        let n = self.n;
        let c2 = self.off * self.off;
        let mut count = 0usize;
        let mut s_inv: Option<DMatrix<Complex64>> = None;
        for d in &self.diag_blocks {
            let mut s = d.clone();
            for i in 0..n {
                s[(i, i)] -= Complex64::new(sigma, 0.0);
            }
            if let Some(prev) = &s_inv {
                if c2 != 0.0 {
                    s -= prev * Complex64::new(c2, 0.0);
                }
            }
            // Hermitian by construction; enforce exactly for the eigensolver.
            let sh = s.adjoint();
            let s = (s + sh) * Complex64::new(0.5, 0.0);
            let es = s.symmetric_eigen();
            let scale = es
                .eigenvalues
                .iter()
                .fold(1.0 + 2.0 * self.off.abs(), |a, &b| a.max(b.abs()));
            let mut inv = DMatrix::<Complex64>::zeros(n, n);
            for (j, &ev) in es.eigenvalues.iter().enumerate() {
                if ev.abs() < 1e-14 * scale {
                    return None;
                }
                if ev < 0.0 {
                    count += 1;
                }
                let col = es.eigenvectors.column(j);
                let w = Complex64::new(1.0 / ev, 0.0);
                for r in 0..n {
                    for c in 0..n {
                        inv[(r, c)] += col[r] * col[c].conj() * w;
                    }
                }
            }
            s_inv = Some(inv);
        }
        Some(count)
    }

    fn count_below_robust(&self, sigma: f64, scale: f64) -> Result<usize> {
        // Nudge steps stay below the bisection stopping tolerance so a
        // breakdown retry cannot bias the bracket by more than the tolerance.
        let mut s = sigma;
        for attempt in 0..8 {
            if let Some(c) = self.count_below(s) {
                return Ok(c);
            }
            s = sigma + (attempt + 1) as f64 * 2e-14 * scale;
        }
        Err(Error::Convergence {
            reason: format!("inertia count kept breaking down near sigma = {sigma}"),
        })
    }

    /// Coarse two-sided spectral bounds from block Gershgorin discs.
    fn bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for d in &self.diag_blocks {
            for r in 0..self.n {
                let center = d[(r, r)].re;
                let mut radius = 0.0;
                for c in 0..self.n {
                    if c != r {
                        radius += d[(r, c)].norm();
                    }
                }
                lo = lo.min(center - radius);
                hi = hi.max(center + radius);
            }
        }
        (lo - 2.0 * self.off.abs() - 1.0, hi + 2.0 * self.off.abs() + 1.0)
    }

    /// The `count` smallest eigenvalues, ascending, by inertia bisection.
    pub fn lowest_eigenvalues(&self, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        if count > self.size() {
            return Err(Error::InvalidArgument(format!(
                "requested {count} eigenvalues from a matrix of size {}",
                self.size()
            )));
        }
        let (lo0, hi0) = self.bounds();
        let scale = lo0.abs().max(hi0.abs()).max(1.0);
        let tol = 1e-13 * scale;
        let mut out = Vec::with_capacity(count);
        let mut lo_floor = lo0;
        for j in 1..=count {
            let mut lo = lo_floor;
            let mut hi = hi0;
            let mut iters = 0;
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if self.count_below_robust(mid, scale)? >= j {
                    hi = mid;
                } else {
                    lo = mid;
                }
                iters += 1;
                if iters > 200 {
                    return Err(Error::Convergence {
                        reason: format!("bisection failed to localize eigenvalue {j}"),
                    });
                }
            }
            let lambda = 0.5 * (lo + hi);
            out.push(lambda);
            lo_floor = lo;
        }
        Ok(out)
    }
}

/// Discretizes the factorized-side Hamiltonian H = -d²/dx² + V_k^- + shift.
pub fn discretize(
    model: &Model,
    k: f64,
    shift: f64,
    domain: &GridDomain,
) -> Result<HamiltonianMatrix> {
    discretize_partner(model, k, shift, domain, Partner::Minus)
}

/// Discretizes either member of the superpartner pair.
pub fn discretize_partner(
    model: &Model,
    k: f64,
    shift: f64,
    domain: &GridDomain,
    partner: Partner,
) -> Result<HamiltonianMatrix> {
    let window = model.validity_window(domain.node(domain.npoints() / 2))?;
    if !window.contains(domain.a()) || !window.contains(domain.b()) {
        return Err(Error::domain(
            domain.a(),
            format!(
                "grid [{}, {}] exits the validity window ({}, {})",
                domain.a(),
                domain.b(),
                window.lo,
                window.hi
            ),
        ));
    }
    HamiltonianMatrix::from_potential(*domain, model.dimension(), shift, |x| {
        model.eval_v(k, x, partner)
    })
}

/// The `count` smallest eigenvalues of the hermitian operator, ascending.
pub fn low_spectrum(h: &HamiltonianMatrix, count: usize) -> Result<Vec<f64>> {
    h.lowest_eigenvalues(count)
}

/// Lowest eigenvalue on the grid, its two half-spacing refinements, and the
/// Richardson error ratio (≈ 4 for a second-order discretization).
pub fn lowest_eigenvalue_convergence(
    model: &Model,
    k: f64,
    shift: f64,
    domain: &GridDomain,
) -> Result<(f64, f64, f64, f64)> {
    let g1 = *domain;
    let g2 = g1.refined();
    let g4 = g2.refined();
    let l1 = low_spectrum(&discretize(model, k, shift, &g1)?, 1)?[0];
    let l2 = low_spectrum(&discretize(model, k, shift, &g2)?, 1)?[0];
    let l4 = low_spectrum(&discretize(model, k, shift, &g4)?, 1)?[0];
    let ratio = (l1 - l2) / (l2 - l4);
    Ok((l1, l2, l4, ratio))
}
