//! Shared scenario builders for the benchmark targets.

use nalgebra::DMatrix;
use num_complex::Complex64;
use shapeinv::{Model, NuClass, QEntry};

/// The built-in coupled radial-oscillator pair.
pub fn radial_pair() -> Model {
    Model::coupled_radial_oscillator(1.0, 0.5).expect("valid parameters")
}

/// A dense three-channel hyperbolic model exercising every family branch.
pub fn hyperbolic_three_channel() -> Model {
    let mut phi = DMatrix::<Complex64>::zeros(3, 3);
    for i in 0..3 {
        phi[(i, i)] = Complex64::new(0.3 - 0.1 * i as f64, 0.0);
        for j in (i + 1)..3 {
            phi[(i, j)] = Complex64::new(0.2, 0.1 * (i + 1) as f64);
            phi[(j, i)] = phi[(i, j)].conj();
        }
    }
    Model::new(
        NuClass::negative(0.9).expect("positive lambda"),
        vec![
            QEntry::Tanh { gamma: 0.3 },
            QEntry::Coth { gamma: 0.9 },
            QEntry::ConstMinus,
        ],
        -0.45,
        phi,
    )
    .expect("valid model")
}
