//! Construction of the matrix superpotential `W_k(x) = k Q(x) + P(x)` and the
//! partner potentials `V_k^∓ = W_k^2 ∓ W_k'`.
//!
//! `Q` is diagonal with channel entries `q_i` solving the scalar Riccati
//! equation `q' = q^2 + ν`, and `P = {p_ij}` solves `p_ij' = (q_i + q_j) p_ij / 2 - μ δ_ij`
//! elementwise. Every channel carries a positive weight function `w_i` with
//! `w_i' = q_i w_i`; off-diagonal entries are `p_ij = φ_ij sqrt(w_i w_j)`, which
//! makes the determining equation hold by construction. Derivatives are always
//! evaluated through the determining equations themselves, never numerically.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Guard distance (in the natural argument of each family) below which an
/// evaluation point is treated as sitting on a singularity.
const POLE_GUARD: f64 = 1e-12;

/// The three branches of the Riccati constant ν.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NuClass {
    /// ν = λ² > 0 (trigonometric families).
    PositiveLambda { lambda: f64 },
    /// ν = -λ² < 0 (hyperbolic and exponential families).
    NegativeLambda { lambda: f64 },
    /// ν = 0 (rational families).
    Zero,
}

impl NuClass {
    pub fn positive(lambda: f64) -> Result<Self> {
        Self::check_lambda(lambda)?;
        Ok(NuClass::PositiveLambda { lambda })
    }

    pub fn negative(lambda: f64) -> Result<Self> {
        Self::check_lambda(lambda)?;
        Ok(NuClass::NegativeLambda { lambda })
    }

    pub fn zero() -> Self {
        NuClass::Zero
    }

    fn check_lambda(lambda: f64) -> Result<()> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Model(format!("lambda must be positive, got {lambda}")));
        }
        Ok(())
    }

    /// The Riccati constant: λ², -λ² or 0.
    pub fn nu(&self) -> f64 {
        match self {
            NuClass::PositiveLambda { lambda } => lambda * lambda,
            NuClass::NegativeLambda { lambda } => -lambda * lambda,
            NuClass::Zero => 0.0,
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match self {
            NuClass::PositiveLambda { lambda } | NuClass::NegativeLambda { lambda } => {
                Some(*lambda)
            }
            NuClass::Zero => None,
        }
    }
}

/// One diagonal channel of `Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QEntry {
    /// q = λ tan(λx + γ), ν > 0 only.
    TanPole { gamma: f64 },
    /// q = -λ tanh(λx + γ), ν < 0 only.
    Tanh { gamma: f64 },
    /// q = -λ coth(λx + γ), ν < 0 only.
    Coth { gamma: f64 },
    /// q = +λ, ν < 0 only.
    ConstPlus,
    /// q = -λ, ν < 0 only.
    ConstMinus,
    /// q = -1/(x + γ), ν = 0 only.
    InvPole { gamma: f64 },
    /// q = 0, ν = 0 only.
    ZeroEntry,
}

impl QEntry {
    pub fn gamma(&self) -> Option<f64> {
        match self {
            QEntry::TanPole { gamma }
            | QEntry::Tanh { gamma }
            | QEntry::Coth { gamma }
            | QEntry::InvPole { gamma } => Some(*gamma),
            _ => None,
        }
    }

    fn compatible_with(&self, nu: &NuClass) -> bool {
        matches!(
            (self, nu),
            (QEntry::TanPole { .. }, NuClass::PositiveLambda { .. })
                | (QEntry::Tanh { .. }, NuClass::NegativeLambda { .. })
                | (QEntry::Coth { .. }, NuClass::NegativeLambda { .. })
                | (QEntry::ConstPlus, NuClass::NegativeLambda { .. })
                | (QEntry::ConstMinus, NuClass::NegativeLambda { .. })
                | (QEntry::InvPole { .. }, NuClass::Zero)
                | (QEntry::ZeroEntry, NuClass::Zero)
        )
    }

    /// Rank used for the canonical block ordering: ν < 0 runs tanh, coth,
    /// constant; ν = 0 runs rational, zero. Ties break on (variant, γ).
    fn block_rank(&self) -> u8 {
        match self {
            QEntry::TanPole { .. } => 0,
            QEntry::Tanh { .. } => 0,
            QEntry::Coth { .. } => 1,
            QEntry::ConstPlus => 2,
            QEntry::ConstMinus => 3,
            QEntry::InvPole { .. } => 0,
            QEntry::ZeroEntry => 1,
        }
    }

    /// Two entries define the same diagonal function. TanPole arguments are
    /// compared modulo the tan period.
    fn same_function(&self, other: &QEntry) -> bool {
        use QEntry::*;
        match (self, other) {
            (TanPole { gamma: a }, TanPole { gamma: b }) => {
                let d = (a - b).rem_euclid(std::f64::consts::PI);
                d < 1e-12 || (std::f64::consts::PI - d) < 1e-12
            }
            (Tanh { gamma: a }, Tanh { gamma: b })
            | (Coth { gamma: a }, Coth { gamma: b })
            | (InvPole { gamma: a }, InvPole { gamma: b }) => (a - b).abs() < 1e-12,
            (ConstPlus, ConstPlus) | (ConstMinus, ConstMinus) | (ZeroEntry, ZeroEntry) => true,
            _ => false,
        }
    }
}

/// Channel value of the diagonal matrix Q.
pub fn q_value(entry: &QEntry, nu: &NuClass, x: f64) -> Result<f64> {
    channel_data(entry, nu, x, 0).map(|c| c.q)
}

/// Channel derivative, taken from the Riccati identity q' = q² + ν.
pub fn q_derivative(entry: &QEntry, nu: &NuClass, x: f64) -> Result<f64> {
    let q = q_value(entry, nu, x)?;
    Ok(q * q + nu.nu())
}

#[derive(Debug, Clone, Copy)]
struct ChannelData {
    q: f64,
    /// Channel weight, satisfying w' = q w.
    w: f64,
    /// Particular diagonal term balancing -μ in the determining equation;
    /// stored as the coefficient multiplying μ, so p_ii = μ·mu_part + φ_ii·w.
    mu_part: f64,
}

fn channel_data(entry: &QEntry, nu: &NuClass, x: f64, channel: usize) -> Result<ChannelData> {
    let lam = nu.lambda();
    match entry {
        QEntry::TanPole { gamma } => {
            let lam = lam.expect("validated");
            let u = lam * x + gamma;
            if u.cos().abs() < POLE_GUARD {
                return Err(Error::Pole { channel, x });
            }
            Ok(ChannelData {
                q: lam * u.tan(),
                w: 1.0 / u.cos(),
                mu_part: -u.tan() / lam,
            })
        }
        QEntry::Tanh { gamma } => {
            let lam = lam.expect("validated");
            let u = lam * x + gamma;
            Ok(ChannelData {
                q: -lam * u.tanh(),
                w: 1.0 / u.cosh(),
                mu_part: -u.tanh() / lam,
            })
        }
        QEntry::Coth { gamma } => {
            let lam = lam.expect("validated");
            let u = lam * x + gamma;
            if u.sinh().abs() < POLE_GUARD {
                return Err(Error::Pole { channel, x });
            }
            Ok(ChannelData {
                q: -lam / u.tanh(),
                w: 1.0 / u.sinh(),
                mu_part: -1.0 / (lam * u.tanh()),
            })
        }
        QEntry::ConstPlus => {
            let lam = lam.expect("validated");
            Ok(ChannelData {
                q: lam,
                w: (lam * x).exp(),
                mu_part: 1.0 / lam,
            })
        }
        QEntry::ConstMinus => {
            let lam = lam.expect("validated");
            Ok(ChannelData {
                q: -lam,
                w: (-lam * x).exp(),
                mu_part: -1.0 / lam,
            })
        }
        QEntry::InvPole { gamma } => {
            let v = x + gamma;
            if v.abs() < POLE_GUARD {
                return Err(Error::Pole { channel, x });
            }
            Ok(ChannelData {
                q: -1.0 / v,
                w: 1.0 / v,
                mu_part: -x / 2.0 * (x + 2.0 * gamma) / v,
            })
        }
        QEntry::ZeroEntry => Ok(ChannelData {
            q: 0.0,
            w: 1.0,
            mu_part: -x,
        }),
    }
}

/// Which member of the superpartner pair to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partner {
    /// V = W² - W', the factorized Hamiltonian's potential.
    Minus,
    /// V⁺ = W² + W', the superpartner potential.
    Plus,
}

/// Maximal open interval on which all matrix entries are finite, real-analytic
/// and all coupled square-root weights are positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityWindow {
    pub lo: f64,
    pub hi: f64,
}

impl ValidityWindow {
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn contains_interval(&self, a: f64, b: f64) -> bool {
        self.lo < a && b < self.hi
    }
}

/// One singular point of the model, with the channels responsible for it.
#[derive(Debug, Clone, PartialEq)]
pub struct PolePoint {
    pub x: f64,
    pub channels: Vec<usize>,
}

/// Ordered list of singular points and branch-validity boundaries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PoleSet {
    points: Vec<PolePoint>,
}

impl PoleSet {
    pub fn points(&self) -> &[PolePoint] {
        &self.points
    }

    pub fn locations(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.x)
    }

    fn insert(&mut self, x: f64, channel: usize) {
        match self
            .points
            .binary_search_by(|p| p.x.partial_cmp(&x).unwrap())
        {
            Ok(i) => {
                if !self.points[i].channels.contains(&channel) {
                    self.points[i].channels.push(channel);
                }
            }
            Err(i) => self.points.insert(
                i,
                PolePoint {
                    x,
                    channels: vec![channel],
                },
            ),
        }
    }
}

/// Full specification of one shape-invariant family member: the ν branch, the
/// diagonal channels of Q, the constant μ and the hermitian matrix Φ of
/// integration constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    nu: NuClass,
    entries: Vec<QEntry>,
    mu: f64,
    phi: DMatrix<Complex64>,
}

impl Model {
    /// Validates the invariants and brings the channels into canonical block
    /// order, permuting Φ accordingly.
    pub fn new(
        nu: NuClass,
        entries: Vec<QEntry>,
        mu: f64,
        phi: DMatrix<Complex64>,
    ) -> Result<Self> {
        let n = entries.len();
        if n < 2 {
            return Err(Error::Model(format!(
                "dimension must be at least 2, got {n} (a scalar Q is proportional to the unit matrix)"
            )));
        }
        if !mu.is_finite() {
            return Err(Error::Model("mu must be finite".into()));
        }
        for (i, e) in entries.iter().enumerate() {
            if !e.compatible_with(&nu) {
                return Err(Error::Model(format!(
                    "entry {i} ({e:?}) is not compatible with {nu:?}"
                )));
            }
            if let Some(g) = e.gamma() {
                if !g.is_finite() {
                    return Err(Error::Model(format!("gamma of entry {i} must be finite")));
                }
            }
        }
        if phi.nrows() != n || phi.ncols() != n {
            return Err(Error::Model(format!(
                "phi must be {n}x{n}, got {}x{}",
                phi.nrows(),
                phi.ncols()
            )));
        }
        let scale = phi.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        for i in 0..n {
            for j in 0..n {
                let d = (phi[(i, j)] - phi[(j, i)].conj()).norm();
                if d > 1e-12 * scale {
                    return Err(Error::Model(format!(
                        "phi is not hermitian: entry ({i},{j}) mismatch {d:.3e}"
                    )));
                }
            }
        }
        if entries
            .iter()
            .all(|e| e.same_function(&entries[0]))
        {
            return Err(Error::Model(
                "Q is proportional to the unit matrix: all channels define the same function".into(),
            ));
        }

        // Canonical order: block rank, then γ; stable permutation applied to Φ.
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by(|&i, &j| {
            let (ei, ej) = (&entries[i], &entries[j]);
            ei.block_rank()
                .cmp(&ej.block_rank())
                .then_with(|| {
                    let (gi, gj) = (
                        ei.gamma().unwrap_or(0.0),
                        ej.gamma().unwrap_or(0.0),
                    );
                    gi.partial_cmp(&gj).unwrap()
                })
        });
        let entries: Vec<QEntry> = perm.iter().map(|&i| entries[i]).collect();
        let mut phi_c = DMatrix::<Complex64>::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                phi_c[(a, b)] = phi[(perm[a], perm[b])];
            }
        }
        // Exact hermitian symmetrization so that evaluations mirror exactly.
        for a in 0..n {
            phi_c[(a, a)] = Complex64::new(phi_c[(a, a)].re, 0.0);
            for b in (a + 1)..n {
                let avg = 0.5 * (phi_c[(a, b)] + phi_c[(b, a)].conj());
                phi_c[(a, b)] = avg;
                phi_c[(b, a)] = avg.conj();
            }
        }

        Ok(Model {
            nu,
            entries,
            mu,
            phi: phi_c,
        })
    }

    /// The built-in 2×2 example with an inverse-square channel coupled to an
    /// oscillator channel: Q = diag(-1/x, 0) and
    /// P = [[μx/2 - 1/(2x), -φ/√x], [-φ/√x, μx]], valid on (0, ∞).
    ///
    /// This realizes the rational (ν = 0) family with model constant -μ.
    pub fn coupled_radial_oscillator(mu: f64, phi: f64) -> Result<Model> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::Model(format!(
                "oscillator strength mu must be positive, got {mu}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::Model("coupling phi must be finite".into()));
        }
        let c = |re: f64| Complex64::new(re, 0.0);
        Model::new(
            NuClass::Zero,
            vec![QEntry::InvPole { gamma: 0.0 }, QEntry::ZeroEntry],
            -mu,
            DMatrix::from_row_slice(2, 2, &[c(-0.5), c(-phi), c(-phi), c(0.0)]),
        )
    }

    pub fn dimension(&self) -> usize {
        self.entries.len()
    }

    pub fn nu_class(&self) -> &NuClass {
        &self.nu
    }

    pub fn nu(&self) -> f64 {
        self.nu.nu()
    }

    pub fn entries(&self) -> &[QEntry] {
        &self.entries
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn phi(&self) -> &DMatrix<Complex64> {
        &self.phi
    }

    /// Same model with Φ replaced (used for unitary-freedom checks).
    pub fn with_phi(&self, phi: DMatrix<Complex64>) -> Result<Model> {
        Model::new(self.nu, self.entries.clone(), self.mu, phi)
    }

    fn channel(&self, i: usize, x: f64) -> Result<ChannelData> {
        channel_data(&self.entries[i], &self.nu, x, i)
    }

    /// q_i(x).
    pub fn q(&self, i: usize, x: f64) -> Result<f64> {
        q_value(&self.entries[i], &self.nu, x)
    }

    /// q_i'(x) from the Riccati identity.
    pub fn q_prime(&self, i: usize, x: f64) -> Result<f64> {
        q_derivative(&self.entries[i], &self.nu, x)
    }

    /// p_ij(x) in canonical form. Off-diagonal entries vanish identically when
    /// φ_ij = 0; otherwise they require both channel weights to be positive.
    pub fn p(&self, i: usize, j: usize, x: f64) -> Result<Complex64> {
        if i == j {
            let c = self.channel(i, x)?;
            return Ok(Complex64::new(self.mu * c.mu_part, 0.0) + self.phi[(i, i)] * c.w);
        }
        let phi_ij = self.phi[(i, j)];
        if phi_ij == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let (ci, cj) = (self.channel(i, x)?, self.channel(j, x)?);
        let prod = ci.w * cj.w;
        if prod <= 0.0 {
            return Err(Error::domain(
                x,
                format!("square-root weight of channels ({i},{j}) is not positive"),
            ));
        }
        Ok(phi_ij * prod.sqrt())
    }

    /// p_ij'(x) from the determining equation p' = (q_i + q_j) p / 2 - μ δ_ij.
    pub fn p_prime(&self, i: usize, j: usize, x: f64) -> Result<Complex64> {
        let p = self.p(i, j, x)?;
        let (qi, qj) = (self.q(i, x)?, self.q(j, x)?);
        let mut d = p * (0.5 * (qi + qj));
        if i == j {
            d -= Complex64::new(self.mu, 0.0);
        }
        Ok(d)
    }

    /// W_k(x) = k Q(x) + P(x); hermitian by construction.
    pub fn eval_w(&self, k: f64, x: f64) -> Result<DMatrix<Complex64>> {
        let n = self.dimension();
        let mut w = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            let c = self.channel(i, x)?;
            w[(i, i)] = Complex64::new(k * c.q + self.mu * c.mu_part, 0.0)
                + self.phi[(i, i)] * c.w;
            for j in (i + 1)..n {
                let p = self.p(i, j, x)?;
                w[(i, j)] = p;
                w[(j, i)] = p.conj();
            }
        }
        Ok(w)
    }

    /// W_k'(x) assembled from the determining equations,
    /// k (Q² + ν) + (QP + PQ)/2 - μ.
    pub fn eval_w_prime(&self, k: f64, x: f64) -> Result<DMatrix<Complex64>> {
        let n = self.dimension();
        let mut w = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            let qp = self.q_prime(i, x)?;
            let pp = self.p_prime(i, i, x)?;
            w[(i, i)] = Complex64::new(k * qp, 0.0) + pp;
            for j in (i + 1)..n {
                let d = self.p_prime(i, j, x)?;
                w[(i, j)] = d;
                w[(j, i)] = d.conj();
            }
        }
        Ok(w)
    }

    /// Derivatives of W_k up to the given order, all obtained by repeated
    /// differentiation of the determining equations: the q tower follows from
    /// q' = q² + ν by the Leibniz rule, the p tower from
    /// p' = (q_i + q_j)p/2 - μδ. Index r of the result is W_k^(r), with
    /// W_k^(0) = W_k itself.
    pub fn eval_w_tower(&self, k: f64, x: f64, order: usize) -> Result<Vec<DMatrix<Complex64>>> {
        let n = self.dimension();
        // Scalar q towers per channel.
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut t = Vec::with_capacity(order + 1);
            t.push(self.q(i, x)?);
            if order >= 1 {
                t.push(t[0] * t[0] + self.nu());
            }
            for m in 1..order {
                // q^(m+1) = d^m/dx^m (q²) = Σ C(m,t) q^(t) q^(m-t).
                let mut s = 0.0;
                let mut binom = 1.0_f64;
                for j in 0..=m {
                    s += binom * t[j] * t[m - j];
                    binom = binom * (m - j) as f64 / (j + 1) as f64;
                }
                t.push(s);
            }
            q.push(t);
        }
        // Matrix p towers.
        let mut p: Vec<DMatrix<Complex64>> = Vec::with_capacity(order + 1);
        let mut p0 = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            p0[(i, i)] = self.p(i, i, x)?;
            for j in (i + 1)..n {
                let v = self.p(i, j, x)?;
                p0[(i, j)] = v;
                p0[(j, i)] = v.conj();
            }
        }
        p.push(p0);
        for m in 0..order {
            // p^(m+1)_ij = ½ Σ C(m,t) (q_i^(t) + q_j^(t)) p^(m-t)_ij - μ δ_ij [m = 0].
            let mut next = DMatrix::<Complex64>::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let mut s = Complex64::new(0.0, 0.0);
                    let mut binom = 1.0_f64;
                    for t in 0..=m {
                        s += p[m - t][(i, j)] * Complex64::new(0.5 * binom * (q[i][t] + q[j][t]), 0.0);
                        binom = binom * (m - t) as f64 / (t + 1) as f64;
                    }
                    if m == 0 && i == j {
                        s -= Complex64::new(self.mu, 0.0);
                    }
                    next[(i, j)] = s;
                }
            }
            p.push(next);
        }
        // W^(r) = k Q^(r) + P^(r).
        let mut tower = Vec::with_capacity(order + 1);
        for r in 0..=order {
            let mut w = p[r].clone();
            for i in 0..n {
                w[(i, i)] += Complex64::new(k * q[i][r], 0.0);
            }
            tower.push(w);
        }
        Ok(tower)
    }

    /// Partner potential V_k^∓ = W_k² ∓ W_k'.
    pub fn eval_v(&self, k: f64, x: f64, partner: Partner) -> Result<DMatrix<Complex64>> {
        let w = self.eval_w(k, x)?;
        let wp = self.eval_w_prime(k, x)?;
        let w2 = &w * &w;
        Ok(match partner {
            Partner::Minus => w2 - wp,
            Partner::Plus => w2 + wp,
        })
    }

    /// Whether channel `i` participates in any off-diagonal coupling, which is
    /// what forces its weight under a square root.
    fn coupled(&self, i: usize) -> bool {
        let n = self.dimension();
        (0..n).any(|j| j != i && self.phi[(i, j)] != Complex64::new(0.0, 0.0))
    }

    /// Maximal open interval around `x0` on which every matrix entry is finite
    /// and real-analytic, with positive square-root arguments for all coupled
    /// channels.
    pub fn validity_window(&self, x0: f64) -> Result<ValidityWindow> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let lam = self.nu.lambda();
        for (i, e) in self.entries.iter().enumerate() {
            let coupled = self.coupled(i);
            let (elo, ehi) = match e {
                QEntry::TanPole { gamma } => {
                    let lam = lam.expect("validated");
                    let u0 = lam * x0 + gamma;
                    if u0.cos().abs() < POLE_GUARD {
                        return Err(Error::Pole { channel: i, x: x0 });
                    }
                    if coupled {
                        // sec(u) > 0 window of period 2π.
                        if u0.cos() <= 0.0 {
                            return Err(Error::domain(
                                x0,
                                format!("channel {i} weight sec is not positive at x0"),
                            ));
                        }
                        let m = ((u0 + std::f64::consts::FRAC_PI_2)
                            / (2.0 * std::f64::consts::PI))
                            .floor();
                        let ulo = -std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * m;
                        (
                            (ulo - gamma) / lam,
                            (ulo + std::f64::consts::PI - gamma) / lam,
                        )
                    } else {
                        // Pole-to-pole window of period π.
                        let m = ((u0 + std::f64::consts::FRAC_PI_2) / std::f64::consts::PI)
                            .floor();
                        let ulo = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * m;
                        (
                            (ulo - gamma) / lam,
                            (ulo + std::f64::consts::PI - gamma) / lam,
                        )
                    }
                }
                QEntry::Coth { gamma } => {
                    let lam = lam.expect("validated");
                    let u0 = lam * x0 + gamma;
                    if u0.abs() < POLE_GUARD {
                        return Err(Error::Pole { channel: i, x: x0 });
                    }
                    if coupled {
                        if u0 < 0.0 {
                            return Err(Error::domain(
                                x0,
                                format!("channel {i} weight csch is not positive at x0"),
                            ));
                        }
                        (-gamma / lam, f64::INFINITY)
                    } else if u0 > 0.0 {
                        (-gamma / lam, f64::INFINITY)
                    } else {
                        (f64::NEG_INFINITY, -gamma / lam)
                    }
                }
                QEntry::InvPole { gamma } => {
                    let v0 = x0 + gamma;
                    if v0.abs() < POLE_GUARD {
                        return Err(Error::Pole { channel: i, x: x0 });
                    }
                    if coupled {
                        if v0 < 0.0 {
                            return Err(Error::domain(
                                x0,
                                format!("channel {i} weight 1/(x+γ) is not positive at x0"),
                            ));
                        }
                        (-gamma, f64::INFINITY)
                    } else if v0 > 0.0 {
                        (-gamma, f64::INFINITY)
                    } else {
                        (f64::NEG_INFINITY, -gamma)
                    }
                }
                QEntry::Tanh { .. } | QEntry::ConstPlus | QEntry::ConstMinus | QEntry::ZeroEntry => {
                    (f64::NEG_INFINITY, f64::INFINITY)
                }
            };
            lo = lo.max(elo);
            hi = hi.min(ehi);
        }
        if !(lo < x0 && x0 < hi) {
            return Err(Error::domain(x0, "x0 is outside its own validity window"));
        }
        Ok(ValidityWindow { lo, hi })
    }

    /// Singular points and branch boundaries inside `[a, b]`.
    pub fn pole_set(&self, a: f64, b: f64) -> PoleSet {
        let mut set = PoleSet::default();
        let lam = self.nu.lambda();
        for (i, e) in self.entries.iter().enumerate() {
            match e {
                QEntry::TanPole { gamma } => {
                    let lam = lam.expect("validated");
                    // Poles of tan and sec at λx + γ = π/2 + mπ.
                    let m_lo = ((lam * a + gamma - std::f64::consts::FRAC_PI_2)
                        / std::f64::consts::PI)
                        .ceil() as i64;
                    let m_hi = ((lam * b + gamma - std::f64::consts::FRAC_PI_2)
                        / std::f64::consts::PI)
                        .floor() as i64;
                    for m in m_lo..=m_hi {
                        let x = (std::f64::consts::FRAC_PI_2 + m as f64 * std::f64::consts::PI
                            - gamma)
                            / lam;
                        set.insert(x, i);
                    }
                }
                QEntry::Coth { gamma } => {
                    let lam = lam.expect("validated");
                    let x = -gamma / lam;
                    if a <= x && x <= b {
                        set.insert(x, i);
                    }
                }
                QEntry::InvPole { gamma } => {
                    let x = -gamma;
                    if a <= x && x <= b {
                        set.insert(x, i);
                    }
                }
                _ => {}
            }
        }
        set
    }
}
