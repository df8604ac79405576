//! Transfer matrices and scattering data T(k), R_l(k), R_r(k) for
//! piecewise-constant potentials, at real and complex wavenumbers.
//!
//! Per-segment matrices propagate (psi, psi') across a constant step using
//! cos(kappa d) and the cardinal sine sin(kappa d)/kappa with
//! kappa^2 = k^2 - V.  Both are entire functions of kappa^2, so the total
//! transfer matrix continues to complex k without branch cuts and the
//! Wronskian det = 1 is preserved exactly.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::potential::PotentialSpec;

#[derive(Debug, Clone, Copy)]
pub struct TransferMatrix {
    pub k: Complex64,
    pub m: [[Complex64; 2]; 2],
}

impl TransferMatrix {
    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }
}

/// cos(sqrt(w)) and sin(sqrt(w))/sqrt(w), evaluated as entire functions of w.
fn cos_sinc(w: Complex64) -> (Complex64, Complex64) {
    if w.norm() < 1e-6 {
        // series keep full precision through the kappa -> 0 limit
        let c = Complex64::new(1.0, 0.0) - w / 2.0 + w * w / 24.0 - w * w * w / 720.0;
        let s = Complex64::new(1.0, 0.0) - w / 6.0 + w * w / 120.0 - w * w * w / 5040.0;
        (c, s)
    } else {
        let sw = w.sqrt(); // either branch: cos and sinc are even
        (sw.cos(), sw.sin() / sw)
    }
}

fn segment_matrix(k2: Complex64, v: f64, d: f64) -> [[Complex64; 2]; 2] {
    let kappa2 = k2 - v;
    let (c, s) = cos_sinc(kappa2 * d * d);
    [[c, s * d], [-kappa2 * d * s, c]]
}

/// Ordered product of per-segment matrices, propagating (psi, psi') from the
/// left support edge x0 to the right edge x1.
pub fn total_transfer(p: &PotentialSpec, k: Complex64) -> TransferMatrix {
    let k2 = k * k;
    let mut m = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    for &(d, v) in p.segments() {
        let s = segment_matrix(k2, v, d);
        m = [
            [
                s[0][0] * m[0][0] + s[0][1] * m[1][0],
                s[0][0] * m[0][1] + s[0][1] * m[1][1],
            ],
            [
                s[1][0] * m[0][0] + s[1][1] * m[1][0],
                s[1][0] * m[0][1] + s[1][1] * m[1][1],
            ],
        ];
    }
    TransferMatrix { k, m }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SMatrixPoint {
    pub k: f64,
    /// Transmission amplitude T = T_l with the phase convention of the
    /// left-incoming stationary solution (T e^{ikx} beyond the barrier).
    pub t: Complex64,
    pub r_l: Complex64,
    pub r_r: Complex64,
    /// Independently extracted right-incoming transmission.
    pub t_r: Complex64,
}

impl SMatrixPoint {
    pub fn unitarity_defect(&self) -> f64 {
        // max entry of S S* - I with S = [[T_r, R_l], [R_r, T_l]]
        let s = [[self.t_r, self.r_l], [self.r_r, self.t]];
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..2 {
                    acc += s[i][l] * s[j][l].conj();
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}

struct Extraction {
    t_l: Complex64,
    r_l: Complex64,
    t_r: Complex64,
    r_r: Complex64,
}

/// Matches plane-wave coefficients through the transfer matrix so that the
/// two stationary solutions have the asymptotics
///   phi_1 = e^{ikx} + R_l e^{-ikx} (x <= x0),  T_l e^{ikx} (x >= x1)
///   phi_2 = T_r e^{-ikx} (x <= x0),  e^{-ikx} + R_r e^{ikx} (x >= x1).
fn extract(p: &PotentialSpec, k: Complex64) -> Result<Extraction> {
    let m = total_transfer(p, k);
    let ik = Complex64::new(0.0, 1.0) * k;
    let x0 = p.x0();
    let x1 = p.x1();
    let u = (ik * x0).exp();
    let v = (-ik * x0).exp();
    let w = (ik * x1).exp();
    let wp = (-ik * x1).exp();
    let a = m.apply([v, -ik * v]);
    let b = m.apply([u, ik * u]);
    let denom = ik * a[0] - a[1];
    let scale = a[0].norm().max(a[1].norm()).max(1.0) * k.norm().max(1.0);
    if denom.norm() < 1e-14 * scale {
        return Err(Error::SingularMatching {
            k,
            denom: denom.norm(),
        });
    }
    let r_l = (b[1] - ik * b[0]) / denom;
    let t_l = (b[0] + r_l * a[0]) / w;
    let t_r = 2.0 * ik * wp / denom;
    let r_r = (t_r * a[0] - wp) / w;
    Ok(Extraction { t_l, r_l, t_r, r_r })
}

/// Scattering data at a real positive wavenumber.
pub fn smatrix_at(p: &PotentialSpec, k: f64) -> Result<SMatrixPoint> {
    if !(k > 0.0) {
        return Err(Error::BadKGrid);
    }
    let e = extract(p, Complex64::new(k, 0.0))?;
    Ok(SMatrixPoint {
        k,
        t: e.t_l,
        r_l: e.r_l,
        r_r: e.r_r,
        t_r: e.t_r,
    })
}

/// Transmission amplitude at an arbitrary complex wavenumber (upper
/// half-plane included), via the same entire-in-k^2 matching.
pub fn transmission_amplitude(p: &PotentialSpec, k: Complex64) -> Result<Complex64> {
    Ok(extract(p, k)?.t_l)
}

#[derive(Debug, Clone)]
pub struct ScatteringCurve {
    pub potential: PotentialSpec,
    pub points: Vec<SMatrixPoint>,
    /// max |T_l - T_r| over the grid (reciprocity residual)
    pub max_tl_tr_discrepancy: f64,
}

impl ScatteringCurve {
    pub fn ks(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.k)
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.unitarity_defect())
            .fold(0.0, f64::max)
    }

    /// T at a signed wavenumber matched against point index `idx` of the
    /// positive grid: T(-k) = conj T(k).
    pub fn t_signed(&self, idx: usize, negative: bool) -> Complex64 {
        let t = self.points[idx].t;
        if negative {
            t.conj()
        } else {
            t
        }
    }
}

pub fn transmission_curve(p: &PotentialSpec, kgrid: &[f64]) -> Result<ScatteringCurve> {
    if kgrid.is_empty() || kgrid.windows(2).any(|w| w[1] <= w[0]) || kgrid[0] <= 0.0 {
        return Err(Error::BadKGrid);
    }
    let mut points = Vec::with_capacity(kgrid.len());
    let mut max_disc = 0.0f64;
    for &k in kgrid {
        let pt = smatrix_at(p, k)?;
        max_disc = max_disc.max((pt.t - pt.t_r).norm());
        points.push(pt);
    }
    Ok(ScatteringCurve {
        potential: p.clone(),
        points,
        max_tl_tr_discrepancy: max_disc,
    })
}

/// Curve evaluated exactly on the strictly positive momentum samples of a
/// grid, as consumed by the transmitted propagator.
pub fn curve_for_grid(p: &PotentialSpec, grid: &SpatialGrid) -> Result<ScatteringCurve> {
    let ks: Vec<f64> = grid.positive_k().map(|(_, k)| k).collect();
    transmission_curve(p, &ks)
}

#[derive(Debug, Clone, Serialize)]
pub struct HalfPlaneReport {
    pub samples: usize,
    pub max_abs_t: f64,
    pub worst_re: f64,
    pub worst_im: f64,
    pub violations: usize,
    pub tol: f64,
}

/// Samples |T| on a rectangle [re0, re1] x i[im0, im1] in the closed upper
/// half-plane (cell centers, so the boundary k = 0 is never hit exactly)
/// and reports the maximum and any excursion beyond 1 + tol.
pub fn halfplane_bound_check(
    p: &PotentialSpec,
    re: (f64, f64),
    im: (f64, f64),
    samples: usize,
) -> Result<HalfPlaneReport> {
    if im.0 < 0.0 {
        return Err(Error::BadRaceConfig(
            "half-plane rectangle must satisfy Im >= 0".into(),
        ));
    }
    let tol = 1e-10;
    let per_axis = (samples as f64).sqrt().ceil() as usize;
    let mut max_abs = 0.0f64;
    let mut worst = Complex64::new(0.0, 0.0);
    let mut violations = 0usize;
    for i in 0..per_axis {
        let kre = re.0 + (re.1 - re.0) * (i as f64 + 0.5) / per_axis as f64;
        for j in 0..per_axis {
            let kim = im.0 + (im.1 - im.0) * (j as f64 + 0.5) / per_axis as f64;
            let t = transmission_amplitude(p, Complex64::new(kre, kim))?;
            let a = t.norm();
            if a > max_abs {
                max_abs = a;
                worst = Complex64::new(kre, kim);
            }
            if a > 1.0 + tol {
                violations += 1;
            }
        }
    }
    Ok(HalfPlaneReport {
        samples: per_axis * per_axis,
        max_abs_t: max_abs,
        worst_re: worst.re,
        worst_im: worst.im,
        violations,
        tol,
    })
}
