//! Randomized canonical model generation shared by the integration suites.
#![allow(dead_code)] // each test target compiles its own copy

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shapeinv::{Model, NuClass, QEntry};

pub struct Sampled {
    pub model: Model,
    /// Interval strictly inside the validity window, safe for grids and
    /// one-stencil margins.
    pub lo: f64,
    pub hi: f64,
    pub label: String,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn hermitian_random(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let mut phi = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        phi[(i, i)] = Complex64::new(rng.random_range(-0.8..0.8), 0.0);
        for j in (i + 1)..n {
            let z = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
            phi[(i, j)] = z;
            phi[(j, i)] = z.conj();
        }
    }
    phi
}

fn distinct_sorted(rng: &mut ChaCha8Rng, count: usize, lo: f64, hi: f64, sep: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..count).map(|_| rng.random_range(lo..hi)).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if v.windows(2).all(|w| w[1] - w[0] > sep) {
            return v;
        }
    }
}

/// Trigonometric family: all tan channels, common sec-positive window.
pub fn sample_positive(rng: &mut ChaCha8Rng, n: usize) -> Sampled {
    let lam = rng.random_range(0.6..1.3);
    let gammas = distinct_sorted(rng, n, -0.25, 0.25, 0.04);
    let entries = gammas
        .iter()
        .map(|&gamma| QEntry::TanPole { gamma })
        .collect();
    let mu = rng.random_range(-1.2..1.2);
    let phi = hermitian_random(rng, n);
    let model = Model::new(NuClass::positive(lam).unwrap(), entries, mu, phi).unwrap();
    let margin = 0.18;
    let half = (std::f64::consts::FRAC_PI_2 - 0.25) / lam - margin;
    Sampled {
        model,
        lo: -half,
        hi: half,
        label: format!("nu>0 n={n}"),
    }
}

/// Hyperbolic/exponential family with the block split (tanh, coth, const).
pub fn sample_negative(rng: &mut ChaCha8Rng, split: (usize, usize, usize)) -> Sampled {
    let (m, l, c) = split;
    let n = m + l + c;
    assert!(n >= 2);
    let lam = rng.random_range(0.6..1.3);
    let mut entries = Vec::with_capacity(n);
    for &gamma in &distinct_sorted(rng, m, -0.8, 0.8, 0.05) {
        entries.push(QEntry::Tanh { gamma });
    }
    for &gamma in &distinct_sorted(rng, l, 0.3, 1.2, 0.05) {
        entries.push(QEntry::Coth { gamma });
    }
    for i in 0..c {
        // At least one of each sign whenever constants are all there is,
        // otherwise Q would be proportional to the identity.
        let plus = if m + l == 0 {
            i % 2 == 0
        } else {
            rng.random_range(0..2) == 0
        };
        entries.push(if plus {
            QEntry::ConstPlus
        } else {
            QEntry::ConstMinus
        });
    }
    let mu = rng.random_range(-1.2..1.2);
    let phi = hermitian_random(rng, n);
    let model = Model::new(NuClass::negative(lam).unwrap(), entries, mu, phi).unwrap();
    let (lo, hi) = if l > 0 { (0.1, 1.4) } else { (-0.8, 1.2) };
    Sampled {
        model,
        lo,
        hi,
        label: format!("nu<0 split=({m},{l},{c})"),
    }
}

/// Rational family with the block split (inverse-pole, zero).
pub fn sample_zero(rng: &mut ChaCha8Rng, m: usize, z: usize) -> Sampled {
    assert!(m >= 1 && m + z >= 2);
    let mut entries = Vec::with_capacity(m + z);
    for &gamma in &distinct_sorted(rng, m, 0.3, 1.3, 0.05) {
        entries.push(QEntry::InvPole { gamma });
    }
    for _ in 0..z {
        entries.push(QEntry::ZeroEntry);
    }
    let mu = rng.random_range(-1.2..1.2);
    let phi = hermitian_random(rng, m + z);
    let model = Model::new(NuClass::zero(), entries, mu, phi).unwrap();
    Sampled {
        model,
        lo: 0.05,
        hi: 1.5,
        label: format!("nu=0 split=({m},{z})"),
    }
}

/// Deterministic suite spanning all three ν classes and every block split up
/// to dimension four.
pub fn canonical_suite(seed: u64) -> Vec<Sampled> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    for n in [2, 3, 4, 2, 3, 2, 3, 2, 4, 3, 2, 3] {
        out.push(sample_positive(&mut rng, n));
    }
    let negative_splits = [
        (2, 0, 0),
        (0, 2, 0),
        (0, 0, 2),
        (1, 1, 0),
        (1, 0, 1),
        (0, 1, 1),
        (3, 0, 0),
        (0, 3, 0),
        (0, 0, 3),
        (1, 1, 1),
        (2, 1, 0),
        (2, 0, 1),
        (1, 2, 0),
        (0, 2, 1),
        (1, 0, 2),
        (0, 1, 2),
        (2, 1, 1),
        (1, 1, 2),
    ];
    for split in negative_splits {
        out.push(sample_negative(&mut rng, split));
    }
    let zero_splits = [(1, 1), (2, 0), (2, 1), (1, 2), (3, 0), (2, 2), (3, 1)];
    for (m, z) in zero_splits {
        out.push(sample_zero(&mut rng, m, z));
    }
    // Fresh random parameters over a few repeated shapes to pass fifty.
    for _ in 0..5 {
        out.push(sample_positive(&mut rng, 2));
        out.push(sample_negative(&mut rng, (1, 1, 1)));
        out.push(sample_zero(&mut rng, 2, 1));
    }
    out
}
