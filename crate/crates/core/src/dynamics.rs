//! Free, full and transmitted time evolution on the periodic spectral grid.
//!
//! Full evolution is second-order Strang splitting between the exact kinetic
//! multiplier e^{-i dt k^2} and the potential phase e^{-i dt V(x)}.  The
//! grid is periodic, so every certified run keeps guard bands at both ends
//! and aborts when wraparound mass exceeds the configured threshold.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::{validate_tunnel, PotentialSpec};
use crate::scattering::ScatteringCurve;
use crate::state::{QuantumState, Representation};

pub const DEFAULT_PHASE_BOUND: f64 = 0.1;
pub const DEFAULT_GUARD_FRACTION: f64 = 0.05;
pub const DEFAULT_LEAKAGE_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct EvolutionParams {
    pub dt: f64,
    pub t_final: f64,
    pub substeps: usize,
    pub guard_fraction: f64,
    pub leakage_threshold: f64,
}

impl EvolutionParams {
    /// Chooses dt from the phase-resolution bound dt * k_eff^2 <= phase_bound,
    /// where k_eff covers the state's occupied momenta boosted inside the
    /// barrier, k_eff^2 = V_max + k_support^2.
    pub fn plan(
        state: &QuantumState,
        potential: &PotentialSpec,
        t_final: f64,
        phase_bound: f64,
    ) -> Result<EvolutionParams> {
        if !(t_final > 0.0) {
            return Err(Error::BadRaceConfig(format!(
                "t_final must be positive, got {t_final}"
            )));
        }
        let k_support = occupied_momentum_bound(state)?;
        let k_eff_sq = potential.max_height().max(0.0) + k_support * k_support;
        let dt_raw = phase_bound / k_eff_sq.max(1e-6);
        let substeps = (t_final / dt_raw).ceil().max(1.0) as usize;
        let dt = t_final / substeps as f64;
        let params = EvolutionParams {
            dt,
            t_final,
            substeps,
            guard_fraction: DEFAULT_GUARD_FRACTION,
            leakage_threshold: DEFAULT_LEAKAGE_THRESHOLD,
        };
        params.check_phase(k_eff_sq)?;
        Ok(params)
    }

    fn check_phase(&self, k_eff_sq: f64) -> Result<()> {
        let phase = self.dt * k_eff_sq;
        if phase >= std::f64::consts::PI {
            return Err(Error::PhaseBound { dt: self.dt, phase });
        }
        Ok(())
    }
}

/// Largest momentum magnitude carrying more than a 1e-12 fraction of the
/// state's mass (with one extra sample of slack).
fn occupied_momentum_bound(state: &QuantumState) -> Result<f64> {
    let p = state.to_momentum()?;
    let dk = p.grid().dk();
    let total = p.norm_sq();
    let cutoff = 1e-12 * total.max(1e-300);
    let mut bound = 0.0f64;
    for (m, a) in p.amps().iter().enumerate() {
        if a.norm_sqr() * dk > cutoff {
            bound = bound.max(p.grid().k(m).abs());
        }
    }
    Ok(bound + dk)
}

/// Exact free propagator: multiplies momentum samples by e^{-i t k^2}.
/// Returns a state in the representation of the input.
pub fn free_evolve(state: &QuantumState, t: f64) -> Result<QuantumState> {
    let was_position = state.rep() == Representation::Position;
    let p = state.to_momentum()?;
    let g = *p.grid();
    let out = p.multiplied(|m, a| a * Complex64::from_polar(1.0, -t * g.k(m) * g.k(m)));
    if was_position {
        out.to_position()
    } else {
        Ok(out)
    }
}

/// Probability mass inside the guard bands at both grid ends.
pub fn leakage_monitor(state: &QuantumState, guard_fraction: f64) -> Result<f64> {
    let s = state.to_position()?;
    let n = s.grid().len();
    let band = ((n as f64) * guard_fraction).floor() as usize;
    let dx = s.grid().dx();
    let amps = s.amps();
    let mut mass = 0.0;
    for j in 0..band {
        mass += amps[j].norm_sqr() * dx;
        mass += amps[n - 1 - j].norm_sqr() * dx;
    }
    Ok(mass)
}

/// Strang-split propagation of a position-representation state under
/// H = P^2 + V for time params.t_final.
pub fn full_evolve(
    state: &QuantumState,
    potential: &PotentialSpec,
    params: &EvolutionParams,
) -> Result<QuantumState> {
    let s0 = state.to_position()?;
    let grid = *s0.grid();
    if !potential.is_nonnegative() {
        let report = validate_tunnel(potential, &grid)?;
        if !report.pass {
            return Err(Error::NotATunnel(report.bound_states));
        }
    } else if potential.x0() < grid.x_min() || potential.x1() > grid.x_max() {
        return Err(Error::SupportExceedsGrid(
            potential.x0(),
            potential.x1(),
            grid.x_min(),
            grid.x_max(),
        ));
    }
    let initial_leak = leakage_monitor(&s0, params.guard_fraction)?;
    if initial_leak > 1e-12 {
        return Err(Error::GuardBandContamination {
            mass: initial_leak,
            threshold: 1e-12,
            t: 0.0,
        });
    }

    let dt = params.dt;
    let v = potential.sample_on_grid(&grid);
    let half_kin: Vec<Complex64> = grid
        .ks()
        .map(|k| Complex64::from_polar(1.0, -0.5 * dt * k * k))
        .collect();
    let full_kin: Vec<Complex64> = half_kin.iter().map(|z| z * z).collect();
    let pot: Vec<Complex64> = v
        .iter()
        .map(|&vj| Complex64::from_polar(1.0, -dt * vj))
        .collect();

    // fused Strang chain: K/2 (V K)^{n-1} V K/2
    let mut cur = s0
        .to_momentum()?
        .multiplied(|m, a| a * half_kin[m])
        .to_position()?;
    for step in 0..params.substeps {
        let kin: &[Complex64] = if step + 1 == params.substeps {
            &half_kin
        } else {
            &full_kin
        };
        cur = cur
            .multiplied(|j, a| a * pot[j])
            .to_momentum()?
            .multiplied(|m, a| a * kin[m])
            .to_position()?;
        let leak = leakage_monitor(&cur, params.guard_fraction)?;
        if leak > params.leakage_threshold {
            return Err(Error::GuardBandContamination {
                mass: leak,
                threshold: params.leakage_threshold,
                t: (step + 1) as f64 * dt,
            });
        }
    }
    Ok(cur)
}

/// Applies the spectral multiplier T(k) e^{-i t k^2} and returns the result
/// in the position representation; this is T(P) e^{-i t H0}.  Negative
/// momenta use the conjugation rule T(-k) = conj T(k).
pub fn transmitted_evolve(
    state: &QuantumState,
    curve: &ScatteringCurve,
    t: f64,
) -> Result<QuantumState> {
    let p = state.to_momentum()?;
    let grid = *p.grid();
    // the curve must sit exactly on the grid's positive momentum samples
    let grid_ks: Vec<f64> = grid.positive_k().map(|(_, k)| k).collect();
    if curve.points.len() != grid_ks.len() {
        return Err(Error::CurveMismatch(format!(
            "curve has {} points, grid has {} positive momenta",
            curve.points.len(),
            grid_ks.len()
        )));
    }
    for (pt, &k) in curve.points.iter().zip(&grid_ks) {
        if (pt.k - k).abs() > 1e-9 * k.abs().max(1.0) {
            return Err(Error::CurveMismatch(format!(
                "curve sample at k = {} does not match grid sample k = {k}",
                pt.k
            )));
        }
    }
    let half = grid.zero_index();
    let out = p.multiplied(|m, a| {
        let k = grid.k(m);
        let t_k = if m > half {
            curve.points[m - half - 1].t
        } else if m < half && grid.mirror_index(m).is_some() {
            let mirror = grid.mirror_index(m).unwrap();
            curve.points[mirror - half - 1].t.conj()
        } else {
            // k = 0 sample and the unpaired -k_max edge sample
            Complex64::new(0.0, 0.0)
        };
        a * t_k * Complex64::from_polar(1.0, -t * k * k)
    });
    out.to_position()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpatialGrid;
    use crate::potential::square_barrier;
    use crate::scattering::curve_for_grid;
    use crate::state::gaussian_packet;

    fn l2_diff(a: &QuantumState, b: &QuantumState) -> f64 {
        let (pa, pb) = (a.to_position().unwrap(), b.to_position().unwrap());
        pa.amps()
            .iter()
            .zip(pb.amps())
            .map(|(x, y)| (x - y).norm_sqr() * pa.grid().dx())
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn free_evolution_moves_at_group_velocity() {
        let g = SpatialGrid::build(-200.0, 120.0, 4096).unwrap();
        let s = gaussian_packet(&g, -50.0, 1.0, 0.05).unwrap();
        let t = 20.0;
        let evolved = free_evolve(&s, t).unwrap();
        assert!((evolved.norm_sq() - 1.0).abs() < 1e-12);
        let x_mean = evolved.mean_position().unwrap();
        assert!(
            (x_mean - (-50.0 + 2.0 * t)).abs() < 1e-6,
            "ballistic center off: {x_mean}"
        );
        // t = 0 is the identity
        let id = free_evolve(&s, 0.0).unwrap();
        assert!(l2_diff(&s, &id) < 1e-13);
    }

    #[test]
    fn free_evolution_composes() {
        let g = SpatialGrid::build(-100.0, 100.0, 1024).unwrap();
        let s = gaussian_packet(&g, -20.0, 1.0, 0.2)
            .unwrap()
            .to_momentum()
            .unwrap();
        let a = free_evolve(&free_evolve(&s, 3.0).unwrap(), 4.0).unwrap();
        let b = free_evolve(&s, 7.0).unwrap();
        let err: f64 = a
            .amps()
            .iter()
            .zip(b.amps())
            .map(|(x, y)| (x - y).norm_sqr() * g.dk())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-12);
    }

    #[test]
    fn strang_is_exact_for_zero_potential() {
        let g = SpatialGrid::build(-200.0, 120.0, 2048).unwrap();
        let s = gaussian_packet(&g, -50.0, 1.0, 0.1).unwrap();
        let p = square_barrier(0.0, 1.0, 0.0).unwrap();
        let params = EvolutionParams::plan(&s, &p, 10.0, DEFAULT_PHASE_BOUND).unwrap();
        let full = full_evolve(&s, &p, &params).unwrap();
        let free = free_evolve(&s, 10.0).unwrap();
        assert!(l2_diff(&full, &free) < 1e-12);
    }

    #[test]
    fn strang_norm_is_preserved() {
        let g = SpatialGrid::build(-200.0, 120.0, 2048).unwrap();
        let s = gaussian_packet(&g, -40.0, 1.0, 0.1).unwrap();
        let p = square_barrier(0.0, 1.0, 4.0).unwrap();
        let params = EvolutionParams::plan(&s, &p, 25.0, DEFAULT_PHASE_BOUND).unwrap();
        let out = full_evolve(&s, &p, &params).unwrap();
        assert!((out.norm_sq() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn step_halving_shows_second_order() {
        let g = SpatialGrid::build(-180.0, 140.0, 2048).unwrap();
        let s = gaussian_packet(&g, -40.0, 1.0, 0.1).unwrap();
        let p = crate::potential::sample_function(
            |x| 4.0 * (std::f64::consts::PI * x / 2.0).sin().powi(2),
            0.0,
            2.0,
            256,
        )
        .unwrap();
        let base = EvolutionParams::plan(&s, &p, 8.0, 0.2).unwrap();
        let halved = EvolutionParams {
            dt: base.dt / 2.0,
            substeps: base.substeps * 2,
            ..base
        };
        let quartered = EvolutionParams {
            dt: base.dt / 4.0,
            substeps: base.substeps * 4,
            ..base
        };
        let a = full_evolve(&s, &p, &base).unwrap();
        let b = full_evolve(&s, &p, &halved).unwrap();
        let c = full_evolve(&s, &p, &quartered).unwrap();
        let d1 = l2_diff(&a, &b);
        let d2 = l2_diff(&b, &c);
        let ratio = d1 / d2;
        assert!(
            (2.5..8.0).contains(&ratio),
            "expected ~4x shrink per halving, got {ratio} ({d1} -> {d2})"
        );
    }

    #[test]
    fn guard_band_abort_reports_time() {
        let g = SpatialGrid::build(-60.0, 30.0, 1024).unwrap();
        let s = gaussian_packet(&g, -10.0, 2.0, 0.2).unwrap();
        let p = square_barrier(0.0, 1.0, 0.5).unwrap();
        let params = EvolutionParams::plan(&s, &p, 40.0, DEFAULT_PHASE_BOUND).unwrap();
        match full_evolve(&s, &p, &params) {
            Err(Error::GuardBandContamination { t, .. }) => assert!(t > 0.0),
            other => panic!("expected guard-band abort, got {other:?}"),
        }
    }

    #[test]
    fn leakage_monitor_behaviour() {
        let g = SpatialGrid::build(-100.0, 100.0, 1024).unwrap();
        let centered = gaussian_packet(&g, 0.0, 1.0, 0.2).unwrap();
        assert!(leakage_monitor(&centered, 0.05).unwrap() < 1e-15);
        let near_edge = gaussian_packet(&g, -90.0, 1.0, 0.5).unwrap();
        assert!(leakage_monitor(&near_edge, 0.05).unwrap() > 0.4);
    }

    #[test]
    fn transmitted_equals_free_without_barrier() {
        let g = SpatialGrid::build(-200.0, 120.0, 2048).unwrap();
        let s = gaussian_packet(&g, -50.0, 1.0, 0.05).unwrap();
        let p = square_barrier(0.0, 1.0, 0.0).unwrap();
        let curve = curve_for_grid(&p, &g).unwrap();
        let a = transmitted_evolve(&s, &curve, 12.0).unwrap();
        let b = free_evolve(&s, 12.0).unwrap();
        assert!(l2_diff(&a, &b) < 1e-10);
    }

    #[test]
    fn transmitted_norm_is_t_weighted() {
        let g = SpatialGrid::build(-200.0, 120.0, 2048).unwrap();
        let s = gaussian_packet(&g, -50.0, 1.0, 0.05).unwrap();
        let p = square_barrier(0.0, 1.0, 4.0).unwrap();
        let curve = curve_for_grid(&p, &g).unwrap();
        let out = transmitted_evolve(&s, &curve, 5.0).unwrap();
        let ph = s.to_momentum().unwrap();
        let half = g.zero_index();
        let expect: f64 = ph
            .amps()
            .iter()
            .enumerate()
            .skip(half + 1)
            .map(|(m, a)| a.norm_sqr() * curve.points[m - half - 1].t.norm_sqr() * g.dk())
            .sum();
        assert!((out.norm_sq() - expect).abs() < 1e-9);
        assert!(out.norm_sq() <= s.norm_sq() + 1e-12);
    }

    #[test]
    fn transmitted_commutes_with_free() {
        let g = SpatialGrid::build(-200.0, 120.0, 2048).unwrap();
        let s = gaussian_packet(&g, -50.0, 1.0, 0.05).unwrap();
        let p = square_barrier(0.0, 1.0, 4.0).unwrap();
        let curve = curve_for_grid(&p, &g).unwrap();
        let a = transmitted_evolve(&s, &curve, 9.0).unwrap();
        let b = free_evolve(&transmitted_evolve(&s, &curve, 0.0).unwrap(), 9.0).unwrap();
        assert!(l2_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn curve_grid_mismatch_is_reported() {
        let g = SpatialGrid::build(-200.0, 120.0, 2048).unwrap();
        let other = SpatialGrid::build(-200.0, 120.0, 1024).unwrap();
        let s = gaussian_packet(&g, -50.0, 1.0, 0.05).unwrap();
        let p = square_barrier(0.0, 1.0, 4.0).unwrap();
        let wrong = curve_for_grid(&p, &other).unwrap();
        assert!(matches!(
            transmitted_evolve(&s, &wrong, 1.0),
            Err(Error::CurveMismatch(_))
        ));
    }
}
