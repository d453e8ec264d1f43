use std::f64::consts::PI;

use super::{sphere_area, EvalResult};
use crate::error::{FracError, Result};

/// Upper bound for `int_{|y|>R} |y|^-decay dy` in R^dim.
pub fn power_tail_bound(dim: usize, decay_exponent: f64, radius: f64) -> Result<f64> {
    let d = dim as f64;
    if decay_exponent <= d {
        return Err(FracError::DivergentTail {
            exponent: decay_exponent,
            dim: d,
        });
    }
    if !(radius > 0.0) {
        return Err(FracError::InvalidParameter(format!("tail radius {radius} must be positive")));
    }
    Ok(sphere_area(dim) * radius.powf(d - decay_exponent) / (decay_exponent - d))
}

/// One term `g(tau) * tau^-gamma` of an asymptotic tail, with `g` periodic and
/// sampled uniformly over one period starting at the truncation point.
#[derive(Debug, Clone)]
pub struct TailTerm {
    pub gamma: f64,
    pub samples: Vec<f64>,
}

/// `int_T^inf g(tau) tau^-gamma dtau` for periodic `g` with period `period`,
/// given `samples[i] = g(T + i * period / M)`.
///
/// The mean of `g` is integrated exactly; each harmonic by three terms of
/// repeated integration by parts. The error field carries the first omitted
/// term.
pub fn osc_power_tail(t0: f64, period: f64, term: &TailTerm) -> EvalResult {
    let m = term.samples.len();
    assert!(m >= 4 && t0 > 0.0);
    let gamma = term.gamma;
    let mean = term.samples.iter().sum::<f64>() / m as f64;
    let mut value = 0.0;
    let mut err = 0.0;
    if mean != 0.0 {
        assert!(gamma > 1.0, "non-oscillating tail needs gamma > 1");
        value += mean * t0.powf(1.0 - gamma) / (gamma - 1.0);
    }
    let omega = 2.0 * PI / period;
    let kmax = (m - 1) / 2;
    let tg = t0.powf(-gamma);
    for k in 1..=kmax {
        // Discrete Fourier coefficients (trapezoid, exact for band-limited g).
        let (mut a, mut b) = (0.0, 0.0);
        for (i, &g) in term.samples.iter().enumerate() {
            let ph = 2.0 * PI * (k * i) as f64 / m as f64;
            a += g * ph.cos();
            b += g * ph.sin();
        }
        a *= 2.0 / m as f64;
        b *= 2.0 / m as f64;
        if a == 0.0 && b == 0.0 {
            continue;
        }
        let w = omega * k as f64;
        // int_T^inf e^{i w (tau - T)} tau^-gamma = sum_j (i/w)^{j+1} f^(j)(T),
        // f^(j)(T) = (-1)^j (gamma)_j T^{-gamma-j}; truncated where the
        // asymptotic terms stop decreasing.
        let (mut re, mut im) = (0.0, 0.0);
        let mut deriv = tg;
        let mut last = f64::INFINITY;
        let mut omitted = 0.0;
        for j in 0..12 {
            // (i/w)^{j+1} (-1)^j = i^{j+1} (-1)^j / w^{j+1}
            let mag = deriv / w.powi(j as i32 + 1);
            if mag >= last {
                omitted = last;
                break;
            }
            match j % 4 {
                0 => im += mag,
                1 => re += mag,
                2 => im -= mag,
                _ => re -= mag,
            }
            last = mag;
            omitted = mag * (gamma + j as f64) / (t0 * w);
            deriv *= (gamma + j as f64) / t0;
        }
        value += a * re + b * im;
        err += (a.abs() + b.abs()) * omitted;
    }
    // Aliasing guard: the highest resolved harmonic bounds what was missed.
    EvalResult::new(value, err, 0.0)
}
