use crate::error::{Error, Result};

/// Uniform discretization of a closed interval `[a, b]` with `npoints` nodes,
/// endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridDomain {
    a: f64,
    b: f64,
    npoints: usize,
}

impl GridDomain {
    pub const MIN_POINTS: usize = 16;

    pub fn new(a: f64, b: f64, npoints: usize) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Grid("endpoints must be finite".into()));
        }
        if a >= b {
            return Err(Error::Grid(format!("need a < b, got a = {a}, b = {b}")));
        }
        if npoints < Self::MIN_POINTS {
            return Err(Error::Grid(format!(
                "need npoints >= {}, got {npoints}",
                Self::MIN_POINTS
            )));
        }
        Ok(GridDomain { a, b, npoints })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn npoints(&self) -> usize {
        self.npoints
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.npoints - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.npoints);
        self.a + i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.npoints).map(move |i| self.node(i))
    }

    /// Same interval with the spacing halved (nodes of the original grid are kept).
    pub fn refined(&self) -> GridDomain {
        GridDomain {
            a: self.a,
            b: self.b,
            npoints: 2 * self.npoints - 1,
        }
    }
}
