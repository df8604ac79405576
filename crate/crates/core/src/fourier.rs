//! Centered unitary discrete Fourier transforms.
//!
//! Convention: the forward transform maps position samples to momentum
//! samples with kernel e^{-ikx},
//!
//!   psihat(k_m) = dx / sqrt(2 pi) * sum_j e^{-i k_m x_j} psi(x_j),
//!
//! on the centered grids x_j = x_min + j dx and k_m = (m - n/2) dk with
//! dk = 2 pi / (n dx).  With these weights the pair is exactly unitary
//! between the dx- and dk-weighted inner products.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// In-place raw FFT, unnormalized, kernel e^{-2 pi i l j / n}.
fn fft_forward(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// In-place raw inverse FFT, unnormalized, kernel e^{+2 pi i l j / n}.
fn fft_inverse(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// Position samples -> momentum samples on the centered dual grid.
pub fn position_to_momentum(
    amps: &[Complex64],
    dx: f64,
    x_min: f64,
    dk: f64,
) -> Vec<Complex64> {
    let n = amps.len();
    let half = n as i64 / 2;
    // (-1)^j pre-twiddle recenters the output index to m - n/2
    let mut buf: Vec<Complex64> = amps
        .iter()
        .enumerate()
        .map(|(j, &a)| if j % 2 == 0 { a } else { -a })
        .collect();
    fft_forward(&mut buf);
    let scale = dx / (2.0 * std::f64::consts::PI).sqrt();
    for (m, v) in buf.iter_mut().enumerate() {
        let k = (m as i64 - half) as f64 * dk;
        *v *= scale * Complex64::from_polar(1.0, -k * x_min);
    }
    buf
}

/// Momentum samples on the centered dual grid -> position samples.
pub fn momentum_to_position(amps: &[Complex64], x_min: f64, dk: f64) -> Vec<Complex64> {
    let n = amps.len();
    let half = n as i64 / 2;
    let mut buf: Vec<Complex64> = amps
        .iter()
        .enumerate()
        .map(|(m, &a)| {
            let k = (m as i64 - half) as f64 * dk;
            a * Complex64::from_polar(1.0, k * x_min)
        })
        .collect();
    fft_inverse(&mut buf);
    let scale = dk / (2.0 * std::f64::consts::PI).sqrt();
    for (j, v) in buf.iter_mut().enumerate() {
        *v *= if j % 2 == 0 { scale } else { -scale };
    }
    buf
}

/// Global offset phase e^{-i pi n / 2}; exact for the power-of-two sizes
/// used here (n multiple of 4 gives 1).
fn offset_phase(n: usize, inverse: bool) -> Complex64 {
    let q = match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    if inverse {
        q.conj()
    } else {
        q
    }
}

/// Unitary DFT used by the finite-dimensional operator models: maps a vector
/// of samples on the centered coordinate grid x_j = (j - n/2) dk to its
/// dual-grid samples.  Kernel e^{-i y_l x_j} / sqrt(n).
pub fn model_forward(amps: &[Complex64]) -> Vec<Complex64> {
    let n = amps.len();
    let mut buf: Vec<Complex64> = amps
        .iter()
        .enumerate()
        .map(|(j, &a)| if j % 2 == 0 { a } else { -a })
        .collect();
    fft_forward(&mut buf);
    // e^{-i y_l x_j} = (-1)^l (-1)^j e^{-2 pi i l j / n} e^{-i pi n / 2}
    let phase = offset_phase(n, false);
    let scale = 1.0 / (n as f64).sqrt();
    for (l, v) in buf.iter_mut().enumerate() {
        *v *= phase * if l % 2 == 0 { scale } else { -scale };
    }
    buf
}

/// Inverse of [`model_forward`].
pub fn model_inverse(amps: &[Complex64]) -> Vec<Complex64> {
    let n = amps.len();
    let phase = offset_phase(n, true);
    let mut buf: Vec<Complex64> = amps
        .iter()
        .enumerate()
        .map(|(l, &a)| {
            let a = a * phase;
            if l % 2 == 0 {
                a
            } else {
                -a
            }
        })
        .collect();
    fft_inverse(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    for (j, v) in buf.iter_mut().enumerate() {
        *v *= if j % 2 == 0 { scale } else { -scale };
    }
    buf
}
