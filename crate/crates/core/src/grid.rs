use crate::error::{Error, Result};

/// Uniform spatial grid on [x_min, x_max) with n samples (n a power of two),
/// together with its dual momentum grid k_m = (m - n/2) dk, dk = 2 pi/(n dx).
///
/// The momentum grid is symmetric about zero up to the single sample at
/// -k_max that has no positive partner; k = 0 is a grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

pub fn build_grid(x_min: f64, x_max: f64, n: usize) -> Result<SpatialGrid> {
    SpatialGrid::build(x_min, x_max, n)
}

impl SpatialGrid {
    pub fn build(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min < x_max) {
            return Err(Error::DegenerateInterval(x_min, x_max));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::BadGridSize(n));
        }
        Ok(SpatialGrid { x_min, x_max, n })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn dk(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.n as f64 * self.dx())
    }

    /// Largest momentum magnitude on the dual grid (the -k_max sample).
    pub fn k_max(&self) -> f64 {
        self.n as f64 / 2.0 * self.dk()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn k(&self, m: usize) -> f64 {
        (m as i64 - self.n as i64 / 2) as f64 * self.dk()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.x(j))
    }

    pub fn ks(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |m| self.k(m))
    }

    /// Index of the k = 0 sample.
    pub fn zero_index(&self) -> usize {
        self.n / 2
    }

    /// Index of the sample at -k, when it exists (the -k_max edge sample has
    /// no positive partner).
    pub fn mirror_index(&self, m: usize) -> Option<usize> {
        let half = self.n / 2;
        let off = m as i64 - half as i64;
        let mirrored = half as i64 - off;
        if (0..self.n as i64).contains(&mirrored) {
            Some(mirrored as usize)
        } else {
            None
        }
    }

    /// Strictly positive momenta, in increasing order, with their indices.
    pub fn positive_k(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.n / 2 + 1..self.n).map(move |m| (m, self.k(m)))
    }
}
