//! Wave-packet states on a grid, representation transforms, half-line
//! momentum projections and the energy-representation map.
//!
//! Units: hbar = 1 and 2m = 1, so the free Hamiltonian is H0 = P^2 and the
//! group velocity of a plane wave is 2k.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::SpatialGrid;

pub const NEG_MASS_TOL: f64 = 1e-10;
pub const ZERO_MASS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Position,
    Momentum,
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumSign {
    Plus,
    Minus,
}

/// Complex amplitude samples over a [`SpatialGrid`] in one of three
/// representations.  In the energy representation the samples live on the
/// nonuniform grid E_m = k_m^2 built from the strictly positive momenta,
/// with quadrature weights dE = 2 k dk.
#[derive(Debug, Clone)]
pub struct QuantumState {
    grid: SpatialGrid,
    rep: Representation,
    amps: Vec<Complex64>,
    energies: Option<Vec<f64>>,
}

impl QuantumState {
    pub fn from_position_amps(grid: SpatialGrid, amps: Vec<Complex64>) -> Self {
        assert_eq!(amps.len(), grid.len());
        QuantumState {
            grid,
            rep: Representation::Position,
            amps,
            energies: None,
        }
    }

    pub fn from_momentum_amps(grid: SpatialGrid, amps: Vec<Complex64>) -> Self {
        assert_eq!(amps.len(), grid.len());
        QuantumState {
            grid,
            rep: Representation::Momentum,
            amps,
            energies: None,
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn rep(&self) -> Representation {
        self.rep
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Energy samples (only for the energy representation).
    pub fn energies(&self) -> Option<&[f64]> {
        self.energies.as_deref()
    }

    /// Quadrature weight of sample i in the current representation.
    pub fn weight(&self, i: usize) -> f64 {
        match self.rep {
            Representation::Position => self.grid.dx(),
            Representation::Momentum => self.grid.dk(),
            Representation::Energy => {
                let e = self.energies.as_ref().expect("energy grid")[i];
                2.0 * e.sqrt() * self.grid.dk()
            }
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * self.weight(i))
            .sum()
    }

    pub fn to_position(&self) -> Result<QuantumState> {
        match self.rep {
            Representation::Position => Ok(self.clone()),
            Representation::Momentum => {
                let amps = fourier::momentum_to_position(
                    &self.amps,
                    self.grid.x_min(),
                    self.grid.dk(),
                );
                Ok(QuantumState::from_position_amps(self.grid, amps))
            }
            Representation::Energy => Err(Error::UnsupportedTransform(
                "energy representation is one-way; invert via from_energy_rep".into(),
            )),
        }
    }

    pub fn to_momentum(&self) -> Result<QuantumState> {
        match self.rep {
            Representation::Momentum => Ok(self.clone()),
            Representation::Position => {
                let amps = fourier::position_to_momentum(
                    &self.amps,
                    self.grid.dx(),
                    self.grid.x_min(),
                    self.grid.dk(),
                );
                Ok(QuantumState::from_momentum_amps(self.grid, amps))
            }
            Representation::Energy => Err(Error::UnsupportedTransform(
                "energy representation is one-way; invert via from_energy_rep".into(),
            )),
        }
    }

    pub fn transform_representation(&self, target: Representation) -> Result<QuantumState> {
        match target {
            Representation::Position => self.to_position(),
            Representation::Momentum => self.to_momentum(),
            Representation::Energy => self.to_energy_rep(),
        }
    }

    /// Probability mass carried by momenta of the given sign; the k = 0
    /// sample is assigned to the + side.
    pub fn momentum_sign_mass(&self, sign: MomentumSign) -> Result<f64> {
        let p = self.to_momentum()?;
        let dk = p.grid.dk();
        Ok(p.amps
            .iter()
            .enumerate()
            .filter(|(m, _)| match sign {
                MomentumSign::Plus => p.grid.k(*m) >= 0.0,
                MomentumSign::Minus => p.grid.k(*m) < 0.0,
            })
            .map(|(_, a)| a.norm_sqr() * dk)
            .sum())
    }

    /// Zeroes the samples with momentum of the opposite sign.  Returns a
    /// state in the same representation as the input.
    pub fn project_momentum_sign(&self, sign: MomentumSign) -> Result<QuantumState> {
        let was_position = self.rep == Representation::Position;
        let mut p = self.to_momentum()?;
        for m in 0..p.amps.len() {
            let keep = match sign {
                MomentumSign::Plus => p.grid.k(m) >= 0.0,
                MomentumSign::Minus => p.grid.k(m) < 0.0,
            };
            if !keep {
                p.amps[m] = Complex64::new(0.0, 0.0);
            }
        }
        if was_position {
            p.to_position()
        } else {
            Ok(p)
        }
    }

    /// Unitary map to the energy representation,
    /// psi_tilde(E) = 2^{-1/2} E^{-1/4} psihat(sqrt(E)) on E_m = k_m^2 for
    /// k_m > 0.  Requires negligible negative-momentum mass and negligible
    /// mass on the lowest momentum cells (where the quadrature weight 2k dk
    /// is unresolved).
    pub fn to_energy_rep(&self) -> Result<QuantumState> {
        if self.rep == Representation::Energy {
            return Ok(self.clone());
        }
        let p = self.to_momentum()?;
        let neg = p.momentum_sign_mass(MomentumSign::Minus)?;
        if neg > NEG_MASS_TOL {
            return Err(Error::NegativeMomentumMass {
                mass: neg,
                tol: NEG_MASS_TOL,
            });
        }
        let dk = p.grid.dk();
        let k_cut = 3.0 * dk;
        let low: f64 = p
            .amps
            .iter()
            .enumerate()
            .filter(|(m, _)| {
                let k = p.grid.k(*m);
                (0.0..=k_cut).contains(&k)
            })
            .map(|(_, a)| a.norm_sqr() * dk)
            .sum();
        if low > ZERO_MASS_TOL {
            return Err(Error::ZeroMomentumMass {
                mass: low,
                k_cut,
                tol: ZERO_MASS_TOL,
            });
        }
        let mut amps = Vec::with_capacity(p.grid.len() / 2 - 1);
        let mut energies = Vec::with_capacity(p.grid.len() / 2 - 1);
        for (m, k) in p.grid.positive_k() {
            let e = k * k;
            amps.push(p.amps[m] * std::f64::consts::FRAC_1_SQRT_2 * e.powf(-0.25));
            energies.push(e);
        }
        Ok(QuantumState {
            grid: p.grid,
            rep: Representation::Energy,
            amps,
            energies: Some(energies),
        })
    }

    /// Inverse of [`to_energy_rep`]: rebuilds the momentum representation
    /// with zero amplitude on k <= 0.
    pub fn from_energy_rep(&self) -> Result<QuantumState> {
        if self.rep != Representation::Energy {
            return Err(Error::UnsupportedTransform(
                "from_energy_rep needs an energy-representation state".into(),
            ));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (i, (m, k)) in self.grid.positive_k().enumerate() {
            let e = k * k;
            amps[m] = self.amps[i] * std::f64::consts::SQRT_2 * e.powf(0.25);
        }
        Ok(QuantumState::from_momentum_amps(self.grid, amps))
    }

    /// Expectation of position (position rep) without mutating self.
    pub fn mean_position(&self) -> Result<f64> {
        let s = self.to_position()?;
        let n2 = s.norm_sq();
        let dx = s.grid.dx();
        Ok(s.amps
            .iter()
            .enumerate()
            .map(|(j, a)| s.grid.x(j) * a.norm_sqr() * dx)
            .sum::<f64>()
            / n2)
    }

    pub fn mean_momentum(&self) -> Result<f64> {
        let s = self.to_momentum()?;
        let n2 = s.norm_sq();
        let dk = s.grid.dk();
        Ok(s.amps
            .iter()
            .enumerate()
            .map(|(m, a)| s.grid.k(m) * a.norm_sqr() * dk)
            .sum::<f64>()
            / n2)
    }

    /// Probability mass on x >= a (position representation).
    pub fn mass_right_of(&self, a: f64) -> Result<f64> {
        let s = self.to_position()?;
        let dx = s.grid.dx();
        Ok(s.amps
            .iter()
            .enumerate()
            .filter(|(j, _)| s.grid.x(*j) >= a)
            .map(|(_, amp)| amp.norm_sqr() * dx)
            .sum())
    }

    /// Pointwise multiplication in the current representation.
    pub fn multiplied<F>(&self, f: F) -> QuantumState
    where
        F: Fn(usize, Complex64) -> Complex64,
    {
        let mut out = self.clone();
        for (i, a) in out.amps.iter_mut().enumerate() {
            *a = f(i, *a);
        }
        out
    }
}

/// Normalized Gaussian packet with mean position x0, mean momentum k0 and
/// momentum spread delta_k (position spread 1/(2 delta_k)).
pub fn gaussian_packet(
    grid: &SpatialGrid,
    x0: f64,
    k0: f64,
    delta_k: f64,
) -> Result<QuantumState> {
    if !(delta_k > 0.0) {
        return Err(Error::PacketDoesNotFit(format!(
            "momentum spread must be positive, got {delta_k}"
        )));
    }
    let sx = 1.0 / (2.0 * delta_k);
    if x0 - 5.0 * sx < grid.x_min() || x0 + 5.0 * sx > grid.x_max() {
        return Err(Error::PacketDoesNotFit(format!(
            "spatial 5-sigma window [{:.3}, {:.3}] leaves the grid [{:.3}, {:.3}]",
            x0 - 5.0 * sx,
            x0 + 5.0 * sx,
            grid.x_min(),
            grid.x_max()
        )));
    }
    let k_edge = grid.k_max();
    if k0 - 5.0 * delta_k < -k_edge || k0 + 5.0 * delta_k > k_edge {
        return Err(Error::PacketDoesNotFit(format!(
            "momentum 5-sigma window [{:.3}, {:.3}] leaves the dual grid [{:.3}, {:.3}]",
            k0 - 5.0 * delta_k,
            k0 + 5.0 * delta_k,
            -k_edge,
            k_edge
        )));
    }
    let norm = (2.0 * std::f64::consts::PI * sx * sx).powf(-0.25);
    let amps: Vec<Complex64> = grid
        .xs()
        .map(|x| {
            let env = norm * (-(x - x0) * (x - x0) / (4.0 * sx * sx)).exp();
            Complex64::from_polar(env, k0 * x)
        })
        .collect();
    let mut s = QuantumState::from_position_amps(*grid, amps);
    let n = s.norm_sq().sqrt();
    for a in s.amps.iter_mut() {
        *a /= n;
    }
    Ok(s)
}

/// Multiplies by a raised-cosine cutoff equal to 1 for x <= x0 - ramp and 0
/// for x >= x0, then renormalizes.  Fails when the cutoff removes
/// essentially all mass.
pub fn mask_left_of(s: &QuantumState, x0: f64, ramp: f64) -> Result<QuantumState> {
    if s.rep() != Representation::Position {
        return Err(Error::UnsupportedTransform(
            "mask_left_of needs a position-representation state".into(),
        ));
    }
    let ramp = ramp.max(f64::MIN_POSITIVE);
    let mut out = s.clone();
    for (j, a) in out.amps.iter_mut().enumerate() {
        let x = out.grid.x(j);
        let w = if x >= x0 {
            0.0
        } else if x <= x0 - ramp {
            1.0
        } else {
            0.5 * (1.0 + (std::f64::consts::PI * (x - (x0 - ramp)) / ramp).cos())
        };
        *a *= w;
    }
    let n2 = out.norm_sq();
    if n2 < 1e-6 {
        return Err(Error::MaskRemovedAllMass(n2));
    }
    let n = n2.sqrt();
    for a in out.amps.iter_mut() {
        *a /= n;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpatialGrid;

    fn grid() -> SpatialGrid {
        SpatialGrid::build(-200.0, 120.0, 4096).unwrap()
    }

    #[test]
    fn gaussian_moments() {
        let g = grid();
        let s = gaussian_packet(&g, -50.0, 1.0, 0.05).unwrap();
        assert!((s.norm_sq() - 1.0).abs() < 1e-12);
        assert!((s.mean_momentum().unwrap() - 1.0).abs() < 1e-6);
        assert!((s.mean_position().unwrap() + 50.0).abs() < 1e-6);
    }

    #[test]
    fn gaussian_negative_mass_matches_tail_bound() {
        // erfc(k0 / (sqrt(2) dk)) / 2 at k0/dk = 20 is below 1e-15
        let g = grid();
        let s = gaussian_packet(&g, -50.0, 1.0, 0.05).unwrap();
        let neg = s.momentum_sign_mass(MomentumSign::Minus).unwrap();
        let bound = 0.5 * libm::erfc(1.0 / (std::f64::consts::SQRT_2 * 0.05));
        assert!(neg < 1e-15, "negative mass {neg}");
        assert!(neg <= bound * 10.0 + 1e-18);
    }

    #[test]
    fn gaussian_must_fit() {
        let g = grid();
        assert!(gaussian_packet(&g, -50.0, 100.0, 0.05).is_err()); // k0 beyond k_max
        assert!(gaussian_packet(&g, -199.0, 1.0, 0.05).is_err()); // touches left edge
    }

    #[test]
    fn projection_partition_and_idempotence() {
        let g = grid();
        let s = gaussian_packet(&g, -30.0, 0.4, 0.3).unwrap().to_momentum().unwrap();
        let plus = s.project_momentum_sign(MomentumSign::Plus).unwrap();
        let minus = s.project_momentum_sign(MomentumSign::Minus).unwrap();
        for m in 0..g.len() {
            let sum = plus.amps()[m] + minus.amps()[m];
            assert_eq!(sum, s.amps()[m], "exact partition at sample {m}");
        }
        let twice = plus.project_momentum_sign(MomentumSign::Plus).unwrap();
        for m in 0..g.len() {
            assert_eq!(twice.amps()[m], plus.amps()[m]);
        }
        // even packet at k = 0 splits in half up to one grid sample
        let even = gaussian_packet(&g, 0.0, 0.0, 0.2).unwrap();
        let half = even
            .project_momentum_sign(MomentumSign::Plus)
            .unwrap()
            .norm_sq();
        assert!((half - 0.5).abs() < 0.2 * g.dk(), "half mass {half}");
    }

    #[test]
    fn projection_leaves_positive_support_untouched() {
        let g = grid();
        let s = gaussian_packet(&g, -50.0, 5.0, 0.5).unwrap();
        let p = s.project_momentum_sign(MomentumSign::Plus).unwrap();
        let diff: f64 = s
            .amps()
            .iter()
            .zip(p.amps())
            .map(|(a, b)| (a - b).norm_sqr() * g.dx())
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-10, "projection changed a positive-support state by {diff}");
    }

    #[test]
    fn energy_rep_preserves_norm_and_inverts() {
        let g = grid();
        let s = gaussian_packet(&g, -50.0, 1.0, 0.05).unwrap();
        let e = s.to_energy_rep().unwrap();
        assert_eq!(e.rep(), Representation::Energy);
        assert!((e.norm_sq() - s.norm_sq()).abs() < 1e-8);
        let back = e.from_energy_rep().unwrap();
        let sm = s.to_momentum().unwrap();
        let diff: f64 = sm
            .amps()
            .iter()
            .zip(back.amps())
            .map(|(a, b)| (a - b).norm_sqr() * g.dk())
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-10, "energy roundtrip differs by {diff}");
    }

    #[test]
    fn energy_rep_rejects_negative_momentum() {
        let g = grid();
        // 1% negative-momentum mass: k0/dk = 2.33 sigma
        let s = gaussian_packet(&g, -50.0, 0.7, 0.3).unwrap();
        assert!(matches!(
            s.to_energy_rep(),
            Err(Error::NegativeMomentumMass { .. })
        ));
    }

    #[test]
    fn energy_rep_indicator_shape() {
        // psihat = indicator of [1, 2] -> psi_tilde(E) = 2^{-1/2} E^{-1/4} on [1, 4]
        let g = grid();
        let mut amps = vec![Complex64::new(0.0, 0.0); g.len()];
        for (m, k) in g.positive_k() {
            if (1.0..=2.0).contains(&k) {
                amps[m] = Complex64::new(1.0, 0.0);
            }
        }
        let s = QuantumState::from_momentum_amps(g, amps);
        let e = s.to_energy_rep().unwrap();
        for (i, (&ev, &a)) in e
            .energies()
            .unwrap()
            .iter()
            .zip(e.amps())
            .enumerate()
        {
            if (1.0001..=3.9999).contains(&ev) {
                let expect = std::f64::consts::FRAC_1_SQRT_2 * ev.powf(-0.25);
                assert!(
                    (a.re - expect).abs() < 1e-12 && a.im.abs() < 1e-15,
                    "sample {i} at E={ev}"
                );
            }
        }
    }

    #[test]
    fn mask_left_of_contract() {
        let g = grid();
        let s = gaussian_packet(&g, -50.0, 1.0, 0.05).unwrap();
        // support already left of -10: unchanged up to renormalization noise
        let m = mask_left_of(&s, -10.0, 2.0).unwrap();
        let diff: f64 = s
            .amps()
            .iter()
            .zip(m.amps())
            .map(|(a, b)| (a - b).norm_sqr() * g.dx())
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-10);
        assert!(m.mass_right_of(-10.0).unwrap() < 1e-12);

        // centered at the cut: masking removes half; far right of the cut: error
        let c = gaussian_packet(&g, 0.0, 1.0, 0.05).unwrap();
        assert!(mask_left_of(&c, -60.0, 2.0).is_err());
        let half = mask_left_of(&c, 0.0, 2.0).unwrap();
        assert!((half.norm_sq() - 1.0).abs() < 1e-12);
        assert!(half.mass_right_of(0.0).unwrap() < 1e-12);
    }
}
