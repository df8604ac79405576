//! Piecewise-constant tunnel potentials on a compact support interval.
//!
//! The canonical form is a list of (width, height) segments covering
//! [x0, x1] exactly; smooth potentials enter by midpoint sampling.  A tunnel
//! potential must be bound-state free, which we certify with a
//! finite-difference eigenvalue count (Sturm bisection on the tridiagonal
//! Dirichlet Hamiltonian).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    x0: f64,
    segments: Vec<(f64, f64)>,
}

pub fn square_barrier(x0: f64, width: f64, height: f64) -> Result<PotentialSpec> {
    PotentialSpec::from_segments(x0, vec![(width, height)])
}

/// Samples f at the midpoints of m equal-width segments over [x0, x1].
pub fn sample_function<F>(f: F, x0: f64, x1: f64, m: usize) -> Result<PotentialSpec>
where
    F: Fn(f64) -> f64,
{
    if m < 1 {
        return Err(Error::EmptySampling(m));
    }
    if !(x0 < x1) {
        return Err(Error::DegenerateInterval(x0, x1));
    }
    let w = (x1 - x0) / m as f64;
    let segments = (0..m)
        .map(|i| (w, f(x0 + (i as f64 + 0.5) * w)))
        .collect();
    PotentialSpec::from_segments(x0, segments)
}

impl PotentialSpec {
    pub fn from_segments(x0: f64, segments: Vec<(f64, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptySampling(0));
        }
        for &(w, h) in &segments {
            if !(w > 0.0) {
                return Err(Error::NonpositiveWidth(w));
            }
            if !h.is_finite() {
                return Err(Error::BadRaceConfig(format!("non-finite height {h}")));
            }
        }
        Ok(PotentialSpec { x0, segments })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn x1(&self) -> f64 {
        self.x0 + self.segments.iter().map(|s| s.0).sum::<f64>()
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segments
    }

    pub fn width(&self) -> f64 {
        self.x1() - self.x0
    }

    pub fn max_abs_height(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.1.abs())
            .fold(0.0, f64::max)
    }

    pub fn max_height(&self) -> f64 {
        self.segments.iter().map(|s| s.1).fold(f64::MIN, f64::max)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.segments.iter().all(|s| s.1 >= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.segments.iter().all(|s| s.1 == 0.0)
    }

    /// Height at a point; left-closed segments, zero outside the support.
    pub fn height_at(&self, x: f64) -> f64 {
        if x < self.x0 {
            return 0.0;
        }
        let mut left = self.x0;
        for &(w, h) in &self.segments {
            if x < left + w {
                return h;
            }
            left += w;
        }
        0.0
    }

    /// Cell-averaged samples on a grid: the exact mean of the potential over
    /// [x_j - dx/2, x_j + dx/2).  Averaging instead of point sampling keeps
    /// segment edges centered regardless of how they fall against the grid.
    pub fn sample_on_grid(&self, grid: &SpatialGrid) -> Vec<f64> {
        let dx = grid.dx();
        let mut edges = Vec::with_capacity(self.segments.len() + 1);
        edges.push(self.x0);
        let mut acc = self.x0;
        for &(w, _) in &self.segments {
            acc += w;
            edges.push(acc);
        }
        grid.xs()
            .map(|x| {
                let (lo, hi) = (x - dx / 2.0, x + dx / 2.0);
                let mut v = 0.0;
                for (i, &(_, h)) in self.segments.iter().enumerate() {
                    let overlap = (hi.min(edges[i + 1]) - lo.max(edges[i])).max(0.0);
                    v += h * overlap;
                }
                v / dx
            })
            .collect()
    }

    /// Splits every segment into two equal halves of the same height.
    pub fn refined(&self) -> PotentialSpec {
        let segments = self
            .segments
            .iter()
            .flat_map(|&(w, h)| [(w / 2.0, h), (w / 2.0, h)])
            .collect();
        PotentialSpec {
            x0: self.x0,
            segments,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub positive: bool,
    pub bound_states: usize,
    pub epsilon: f64,
    pub pass: bool,
}

/// Counts eigenvalues of the Dirichlet finite-difference Hamiltonian
/// -d^2/dx^2 + V below -epsilon on the grid box, by Sturm sequence.
pub fn validate_tunnel(p: &PotentialSpec, grid: &SpatialGrid) -> Result<ValidationReport> {
    if p.x0() < grid.x_min() || p.x1() > grid.x_max() {
        return Err(Error::SupportExceedsGrid(
            p.x0(),
            p.x1(),
            grid.x_min(),
            grid.x_max(),
        ));
    }
    let positive = p.is_nonnegative();
    let epsilon = 1e-8 * p.max_abs_height();
    let bound_states = if positive {
        0
    } else {
        let v = p.sample_on_grid(grid);
        count_eigenvalues_below(&v, grid.dx(), -epsilon)
    };
    Ok(ValidationReport {
        positive,
        bound_states,
        epsilon,
        pass: positive || bound_states == 0,
    })
}

/// Sturm count: number of eigenvalues of the symmetric tridiagonal matrix
/// with diagonal 2/dx^2 + v_j and off-diagonal -1/dx^2 that lie below lam.
fn count_eigenvalues_below(v: &[f64], dx: f64, lam: f64) -> usize {
    let inv = 1.0 / (dx * dx);
    let off2 = inv * inv;
    let mut count = 0usize;
    let mut q = 0.0f64;
    for (j, &vj) in v.iter().enumerate() {
        let d = 2.0 * inv + vj - lam;
        q = if j == 0 { d } else { d - off2 / q };
        if q == 0.0 {
            q = 1e-300;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SpatialGrid {
        SpatialGrid::build(-40.0, 40.0, 2048).unwrap()
    }

    #[test]
    fn square_barrier_constructor() {
        let p = square_barrier(0.0, 1.0, 4.0).unwrap();
        assert_eq!(p.segments(), &[(1.0, 4.0)]);
        assert_eq!(p.x1(), 1.0);
        let thick = square_barrier(0.0, 8.0, 4.0).unwrap();
        assert_eq!(thick.x1(), 8.0);
        assert!(square_barrier(0.0, -1.0, 4.0).is_err());
    }

    #[test]
    fn sampled_function_range() {
        let p = sample_function(
            |x| 4.0 * (std::f64::consts::PI * x).sin().powi(2),
            0.0,
            1.0,
            512,
        )
        .unwrap();
        assert_eq!(p.segments().len(), 512);
        assert!(p.max_height() <= 4.0 + 1e-12);
        assert!(p.is_nonnegative());
        assert!(sample_function(|_| 0.0, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn positive_barrier_passes() {
        let p = square_barrier(0.0, 1.0, 4.0).unwrap();
        let r = validate_tunnel(&p, &grid()).unwrap();
        assert!(r.positive && r.bound_states == 0 && r.pass);
    }

    #[test]
    fn zero_potential_passes() {
        let p = sample_function(|_| 0.0, 0.0, 1.0, 8).unwrap();
        let r = validate_tunnel(&p, &grid()).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn square_well_binds_a_state() {
        // depth 4, width 1 in 2m = 1 units: z0 = (w/2) sqrt(V0) = 1 < pi/2,
        // so exactly one (even) bound state exists
        let p = square_barrier(-0.5, 1.0, -4.0).unwrap();
        let r = validate_tunnel(&p, &grid()).unwrap();
        assert!(!r.positive);
        assert_eq!(r.bound_states, 1);
        assert!(!r.pass);
        // a deeper well binds more
        let deep = square_barrier(-0.5, 1.0, -40.0).unwrap();
        let r2 = validate_tunnel(&deep, &grid()).unwrap();
        assert!(r2.bound_states >= 2, "got {}", r2.bound_states);
    }

    #[test]
    fn verdict_invariant_under_refinement() {
        let p = square_barrier(-0.5, 1.0, -4.0).unwrap();
        let r = validate_tunnel(&p, &grid()).unwrap();
        let rr = validate_tunnel(&p.refined(), &grid()).unwrap();
        assert_eq!(r.pass, rr.pass);
        assert_eq!(r.bound_states, rr.bound_states);
    }

    #[test]
    fn support_must_sit_inside_grid() {
        let p = square_barrier(39.5, 2.0, 1.0).unwrap();
        assert!(matches!(
            validate_tunnel(&p, &grid()),
            Err(Error::SupportExceedsGrid(..))
        ));
    }

    #[test]
    fn cell_average_preserves_integral() {
        let g = SpatialGrid::build(-8.0, 8.0, 512).unwrap();
        let p = square_barrier(0.0, 1.0, 4.0).unwrap();
        let v = p.sample_on_grid(&g);
        let integral: f64 = v.iter().sum::<f64>() * g.dx();
        assert!((integral - 4.0).abs() < 1e-12);
    }
}
