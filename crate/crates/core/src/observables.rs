//! Covariant arrival-time observables (canonical, time-smeared, low-rank
//! kernel) and localization observables (sharp, measure-smeared).
//!
//! The canonical arrival density at arrival point a is
//!
//!   p(t) = (2 pi)^{-1} | int_0^inf psi_tilde(E) e^{i sqrt(E) a} e^{-iEt} dE |^2,
//!
//! evaluated by direct quadrature on the energy grid E = k^2 with weights
//! dE = 2 k dk.  With this orientation the density of a packet prepared at
//! x0 < a peaks near the ballistic time (a - x0)/(2 k0), evolving the state
//! by tau advances arrivals (curve shifts by -tau), and the cumulative over
//! (-inf, t] is the quantity the race inequalities bound.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::free_evolve;
use crate::error::{Error, Result};
use crate::state::QuantumState;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SmearingDensity {
    Gaussian { sigma: f64 },
    Uniform { width: f64 },
}

impl SmearingDensity {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            SmearingDensity::Gaussian { sigma } => *sigma > 0.0,
            SmearingDensity::Uniform { width } => *width > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BadDetector("smearing scale must be positive".into()))
        }
    }

    fn density(&self, y: f64) -> f64 {
        match self {
            SmearingDensity::Gaussian { sigma } => {
                (-y * y / (2.0 * sigma * sigma)).exp()
                    / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            SmearingDensity::Uniform { width } => {
                if y.abs() <= width / 2.0 {
                    1.0 / width
                } else {
                    0.0
                }
            }
        }
    }

    fn half_support(&self) -> f64 {
        match self {
            SmearingDensity::Gaussian { sigma } => 8.0 * sigma,
            SmearingDensity::Uniform { width } => 0.55 * width,
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            SmearingDensity::Gaussian { sigma } => sigma * sigma,
            SmearingDensity::Uniform { width } => width * width / 12.0,
        }
    }
}

/// One column h_j(E) of a low-rank detector kernel; the family must satisfy
/// sum_j |h_j(E)|^2 <= 1 pointwise.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum KernelColumn {
    Constant { amp: f64 },
    PhaseDelay { amp: f64, delay: f64 },
    Band { amp: f64, e0: f64, e1: f64 },
}

impl KernelColumn {
    pub fn eval(&self, e: f64) -> Complex64 {
        match self {
            KernelColumn::Constant { amp } => Complex64::new(*amp, 0.0),
            KernelColumn::PhaseDelay { amp, delay } => Complex64::from_polar(*amp, -e * delay),
            KernelColumn::Band { amp, e0, e1 } => {
                if e <= *e0 || e >= *e1 {
                    Complex64::new(0.0, 0.0)
                } else {
                    let u = (e - e0) / (e1 - e0);
                    Complex64::new(amp * (std::f64::consts::PI * u).sin().powi(2), 0.0)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeDetectorKind {
    Canonical,
    Smeared { density: SmearingDensity },
    Kernel { columns: Vec<KernelColumn> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TimeDetectorSpec {
    #[serde(flatten)]
    pub kind: TimeDetectorKind,
    pub arrival_point: f64,
}

impl TimeDetectorSpec {
    pub fn canonical(arrival_point: f64) -> Self {
        TimeDetectorSpec {
            kind: TimeDetectorKind::Canonical,
            arrival_point,
        }
    }

    fn validate(&self, energies: &[f64]) -> Result<()> {
        match &self.kind {
            TimeDetectorKind::Canonical => Ok(()),
            TimeDetectorKind::Smeared { density } => density.validate(),
            TimeDetectorKind::Kernel { columns } => {
                if columns.is_empty() {
                    return Err(Error::BadDetector("kernel needs at least one column".into()));
                }
                for &e in energies {
                    let s: f64 = columns.iter().map(|c| c.eval(e).norm_sqr()).sum();
                    if s > 1.0 + 1e-12 {
                        return Err(Error::BadDetector(format!(
                            "kernel normalization sum |h_j(E)|^2 = {s} > 1 at E = {e}"
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LocalizationMeasure {
    Point,
    Gaussian { sigma: f64 },
    Uniform { width: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocalizationDetectorSpec {
    Sharp,
    Smeared { measure: LocalizationMeasure },
}

impl LocalizationMeasure {
    /// Survival function mu([u, inf)).
    fn survival(&self, u: f64) -> f64 {
        match self {
            LocalizationMeasure::Point => {
                if u <= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            LocalizationMeasure::Gaussian { sigma } => {
                0.5 * libm::erfc(u / (std::f64::consts::SQRT_2 * sigma))
            }
            LocalizationMeasure::Uniform { width } => {
                ((0.5 - u / width).clamp(0.0, 1.0)).min(1.0)
            }
        }
    }
}

/// Probability curve over a time or position abscissa: nonnegative density
/// with its running (trapezoid) integral.
#[derive(Debug, Clone, Serialize)]
pub struct ProbabilityCurve {
    pub abscissa: Vec<f64>,
    pub density: Vec<f64>,
    pub cumulative: Vec<f64>,
    /// fraction of the state's detectable mass captured by the abscissa window
    pub coverage: f64,
}

impl ProbabilityCurve {
    fn from_density(abscissa: Vec<f64>, density: Vec<f64>, target_mass: f64) -> Self {
        let mut cumulative = Vec::with_capacity(density.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for i in 1..density.len() {
            acc += 0.5 * (density[i] + density[i - 1]) * (abscissa[i] - abscissa[i - 1]);
            cumulative.push(acc);
        }
        let coverage = if target_mass > 0.0 {
            acc / target_mass
        } else {
            1.0
        };
        ProbabilityCurve {
            abscissa,
            density,
            cumulative,
            coverage,
        }
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }

    pub fn peak_time(&self) -> Result<f64> {
        let (mut best, mut best_v) = (0usize, f64::MIN);
        for (i, &d) in self.density.iter().enumerate() {
            if d > best_v {
                best_v = d;
                best = i;
            }
        }
        if !(best_v > 0.0) {
            return Err(Error::FlatDensity("no positive density sample".into()));
        }
        Ok(self.abscissa[best])
    }

    pub fn variance(&self) -> f64 {
        let mass: f64 = self.total();
        let dt: Vec<f64> = self
            .abscissa
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect();
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for i in 1..self.density.len() {
            let w = 0.5 * dt[i - 1];
            for &j in &[i - 1, i] {
                m1 += self.abscissa[j] * self.density[j] * w;
                m2 += self.abscissa[j] * self.abscissa[j] * self.density[j] * w;
            }
        }
        m2 / mass - (m1 / mass) * (m1 / mass)
    }
}

fn is_uniform(grid: &[f64]) -> Option<f64> {
    if grid.len() < 2 {
        return None;
    }
    let dt = grid[1] - grid[0];
    let ok = grid
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() < 1e-9 * dt.abs().max(1e-12));
    if ok && dt > 0.0 {
        Some(dt)
    } else {
        None
    }
}

/// (2 pi)^{-1/2} sum_l w_l c_l e^{-i E_l t} for every t in tgrid, with a
/// phase recurrence on uniform grids.
fn oscillatory_sums(energies: &[f64], weighted: &[Complex64], tgrid: &[f64]) -> Vec<Complex64> {
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); tgrid.len()];
    if let Some(dt) = is_uniform(tgrid) {
        for (l, &e) in energies.iter().enumerate() {
            let step = Complex64::from_polar(1.0, -e * dt);
            let mut z = weighted[l] * Complex64::from_polar(1.0, -e * tgrid[0]);
            for v in out.iter_mut() {
                *v += z;
                z *= step;
            }
        }
    } else {
        for (v, &t) in out.iter_mut().zip(tgrid) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (l, &e) in energies.iter().enumerate() {
                acc += weighted[l] * Complex64::from_polar(1.0, -e * t);
            }
            *v = acc;
        }
    }
    for v in out.iter_mut() {
        *v *= norm;
    }
    out
}

fn canonical_density(
    energies: &[f64],
    amps_with_phase: &[Complex64],
    weights: &[f64],
    tgrid: &[f64],
) -> Vec<f64> {
    let weighted: Vec<Complex64> = amps_with_phase
        .iter()
        .zip(weights)
        .map(|(a, &w)| a * w)
        .collect();
    oscillatory_sums(energies, &weighted, tgrid)
        .into_iter()
        .map(|z| z.norm_sqr())
        .collect()
}

/// Arrival-time probability density and cumulative on tgrid.
pub fn arrival_time_density(
    state: &QuantumState,
    detector: &TimeDetectorSpec,
    tgrid: &[f64],
) -> Result<ProbabilityCurve> {
    if tgrid.len() < 2 || tgrid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadRaceConfig(
            "time grid must be increasing with at least two samples".into(),
        ));
    }
    let es = state.to_energy_rep()?;
    let energies = es.energies().unwrap().to_vec();
    detector.validate(&energies)?;
    let dk = es.grid().dk();
    let weights: Vec<f64> = energies.iter().map(|&e| 2.0 * e.sqrt() * dk).collect();
    // arrival point enters as the plane-wave phase picked up translating the
    // detector to a
    let amps_a: Vec<Complex64> = es
        .amps()
        .iter()
        .zip(&energies)
        .map(|(a, &e)| a * Complex64::from_polar(1.0, e.sqrt() * detector.arrival_point))
        .collect();

    let detectable_mass: f64 = match &detector.kind {
        TimeDetectorKind::Kernel { columns } => energies
            .iter()
            .zip(es.amps())
            .zip(&weights)
            .map(|((&e, a), &w)| {
                let s: f64 = columns.iter().map(|c| c.eval(e).norm_sqr()).sum();
                s * a.norm_sqr() * w
            })
            .sum(),
        _ => es.norm_sq(),
    };

    match &detector.kind {
        TimeDetectorKind::Canonical => {
            let density = canonical_density(&energies, &amps_a, &weights, tgrid);
            Ok(ProbabilityCurve::from_density(
                tgrid.to_vec(),
                density,
                detectable_mass,
            ))
        }
        TimeDetectorKind::Kernel { columns } => {
            let mut density = vec![0.0; tgrid.len()];
            for col in columns {
                let amps_col: Vec<Complex64> = amps_a
                    .iter()
                    .zip(&energies)
                    .map(|(a, &e)| a * col.eval(e))
                    .collect();
                for (d, v) in density
                    .iter_mut()
                    .zip(canonical_density(&energies, &amps_col, &weights, tgrid))
                {
                    *d += v;
                }
            }
            Ok(ProbabilityCurve::from_density(
                tgrid.to_vec(),
                density,
                detectable_mass,
            ))
        }
        TimeDetectorKind::Smeared { density: mu } => {
            let dt = is_uniform(tgrid).ok_or_else(|| {
                Error::BadDetector("smeared detectors need a uniform time grid".into())
            })?;
            // canonical density on a lattice-aligned extension, then a
            // discrete convolution with the sampled smearing density
            let pad = (mu.half_support() / dt).ceil() as usize;
            let n_ext = tgrid.len() + 2 * pad;
            let ext: Vec<f64> = (0..n_ext)
                .map(|i| tgrid[0] + dt * (i as f64 - pad as f64))
                .collect();
            let base = canonical_density(&energies, &amps_a, &weights, &ext);
            let mut kernel: Vec<f64> = (0..=2 * pad)
                .map(|i| mu.density(dt * (i as f64 - pad as f64)))
                .collect();
            let ksum: f64 = kernel.iter().sum::<f64>() * dt;
            if (ksum - 1.0).abs() > 1e-10 && ksum > 0.0 {
                // lattice renormalization keeps total mass exact
                for k in kernel.iter_mut() {
                    *k /= ksum;
                }
            } else if ksum <= 0.0 {
                return Err(Error::BadDetector("smearing density vanished".into()));
            }
            let mut density = vec![0.0; tgrid.len()];
            for (i, d) in density.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, &kj) in kernel.iter().enumerate() {
                    acc += kj * base[i + 2 * pad - j];
                }
                *d = acc * dt;
            }
            Ok(ProbabilityCurve::from_density(
                tgrid.to_vec(),
                density,
                detectable_mass,
            ))
        }
    }
}

/// Probability of finding the particle in [a, inf) under a (possibly
/// smeared) localization observable.
pub fn localization_probability(
    state: &QuantumState,
    detector: &LocalizationDetectorSpec,
    a: f64,
) -> Result<f64> {
    let s = state.to_position()?;
    let dx = s.grid().dx();
    match detector {
        LocalizationDetectorSpec::Sharp => s.mass_right_of(a),
        LocalizationDetectorSpec::Smeared { measure } => {
            if let LocalizationMeasure::Gaussian { sigma } = measure {
                if !(*sigma > 0.0) {
                    return Err(Error::BadDetector("sigma must be positive".into()));
                }
            }
            if let LocalizationMeasure::Uniform { width } = measure {
                if !(*width > 0.0) {
                    return Err(Error::BadDetector("width must be positive".into()));
                }
            }
            Ok(s.amps()
                .iter()
                .enumerate()
                .map(|(j, amp)| amp.norm_sqr() * dx * measure.survival(a - s.grid().x(j)))
                .sum())
        }
    }
}

/// t -> localization probability of the freely evolved negative-momentum
/// state; the paper's asymptotic-localization lemma says this decays to 0.
pub fn negative_momentum_escape(
    state: &QuantumState,
    detector: &LocalizationDetectorSpec,
    a: f64,
    tgrid: &[f64],
) -> Result<Vec<f64>> {
    let pos_mass = state.momentum_sign_mass(crate::state::MomentumSign::Plus)?;
    if pos_mass > 1e-10 {
        return Err(Error::BadRaceConfig(format!(
            "negative_momentum_escape needs positive-momentum mass < 1e-10, got {pos_mass:.3e}"
        )));
    }
    tgrid
        .iter()
        .map(|&t| localization_probability(&free_evolve(state, t)?, detector, a))
        .collect()
}
