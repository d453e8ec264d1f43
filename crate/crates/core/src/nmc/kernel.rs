use statrs::function::beta::{beta, beta_reg};

use crate::quadrature::{gauss_legendre, FracOrder};

/// `F(p) = int_p^inf (1 + t^2)^-(N + alpha)/2 dt`.
///
/// With `x = 1 / (1 + p^2)` and `a = (N + alpha - 1)/2`, for `p >= 0`
/// `F(p) = B(a, 1/2) I_x(a, 1/2) / 2`; negative arguments use
/// `F(-p) = 2 F(0) - F(p)`.
pub fn f_kernel(p: f64, fo: &FracOrder) -> f64 {
    let a = 0.5 * (fo.kernel_exponent() - 1.0);
    let half_b = 0.5 * beta(a, 0.5);
    if p.is_infinite() {
        return if p > 0.0 { 0.0 } else { 2.0 * half_b };
    }
    let x = 1.0 / (1.0 + p * p);
    let tail = half_b * beta_reg(a, 0.5, x);
    if p >= 0.0 {
        tail
    } else {
        2.0 * half_b - tail
    }
}

/// `F'(p) = -(1 + p^2)^-(N + alpha)/2`.
pub fn f_kernel_prime(p: f64, fo: &FracOrder) -> f64 {
    -(1.0 + p * p).powf(-0.5 * fo.kernel_exponent())
}

/// `F(p) - F(-p) = -2 int_0^p (1 + t^2)^-beta dt`, evaluated without
/// cancellation for small `|p|`.
pub fn f_odd(p: f64, fo: &FracOrder) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    let a = 0.5 * (fo.kernel_exponent() - 1.0);
    let p2 = p * p;
    let inner = 0.5 * beta(0.5, a) * beta_reg(0.5, a, p2 / (1.0 + p2));
    -2.0 * p.signum() * inner
}

/// `q(p) = int_{-1}^{1} (1 + t^2 p^2)^-(N + alpha)/2 dt` by a fixed
/// Gauss-Legendre rule (the integrand is smooth and even in `t`).
pub fn q_kernel(p: f64, fo: &FracOrder) -> f64 {
    let beta = 0.5 * fo.kernel_exponent();
    2.0 * gauss_legendre(32).integrate(0.0, 1.0, |t| (1.0 + t * t * p * p).powf(-beta))
}

/// `-2 int_0^1 F'(a + rho b) d rho` with a 16-point rule.
pub fn q_tilde(a: f64, b: f64, fo: &FracOrder) -> f64 {
    -2.0 * gauss_legendre(16).integrate(0.0, 1.0, |r| f_kernel_prime(a + r * b, fo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Tolerance};

    /// Tanh-sinh quadrature of `(1 + t^2)^-beta` over `[p, inf)` after the
    /// map `t = p + s / (1 - s)`.
    fn tanh_sinh_tail(p: f64, beta: f64) -> f64 {
        let g = |s: f64| {
            let t = p + s / (1.0 - s);
            (1.0 + t * t).powf(-beta) / ((1.0 - s) * (1.0 - s))
        };
        let h = 1.0 / 64.0;
        let mut acc = 0.0;
        for k in -400..=400 {
            let x = k as f64 * h;
            let u = 0.5 * std::f64::consts::PI * x.sinh();
            let w = 0.5 * std::f64::consts::PI * x.cosh() / u.cosh().powi(2);
            // node on (0, 1)
            let s = 0.5 * (1.0 + u.tanh());
            let ds = 0.5 * w;
            if s > 0.0 && s < 1.0 {
                acc += g(s) * ds;
            }
        }
        acc * h
    }

    #[test]
    fn f_at_zero_matches_tanh_sinh_oracle() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let oracle = tanh_sinh_tail(0.0, 1.25);
        assert!((f_kernel(0.0, &fo) - oracle).abs() < 1e-12, "{} {}", f_kernel(0.0, &fo), oracle);
        assert_eq!(f_kernel_prime(0.0, &fo), -1.0);
    }

    #[test]
    fn f_values_match_adaptive_quadrature() {
        for (n, alpha) in [(2, 0.3), (3, 0.7)] {
            let fo = FracOrder::new(n, alpha).unwrap();
            let b = 0.5 * fo.kernel_exponent();
            for p in [-3.0, -0.4, 0.0, 0.2, 1.5, 7.0] {
                let oracle = tanh_sinh_tail(p, b);
                assert!((f_kernel(p, &fo) - oracle).abs() < 1e-12, "p = {p}");
            }
        }
    }

    #[test]
    fn symmetry_and_monotonicity() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let f0 = f_kernel(0.0, &fo);
        let mut prev = f64::INFINITY;
        for i in -20..=20 {
            let p = 0.37 * i as f64;
            assert!((f_kernel(p, &fo) + f_kernel(-p, &fo) - 2.0 * f0).abs() < 1e-14);
            let v = f_kernel(p, &fo);
            assert!(v < prev);
            prev = v;
        }
        assert_eq!(f_kernel(f64::INFINITY, &fo), 0.0);
    }

    #[test]
    fn odd_part_without_cancellation() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        for p in [1e-2, 0.3, 2.0, -0.7] {
            let direct = f_kernel(p, &fo) - f_kernel(-p, &fo);
            assert!((f_odd(p, &fo) - direct).abs() < 2e-14, "{p}: {} {direct}", f_odd(p, &fo));
        }
        // F(p) - F(-p) ~ -2p for small p
        assert!((f_odd(1e-9, &fo) + 2e-9).abs() < 1e-22);
    }

    #[test]
    fn q_kernel_is_odd_part_quotient() {
        let fo = FracOrder::new(2, 0.4).unwrap();
        for p in [0.1, 0.8, 3.0] {
            // F(p) - F(-p) = p int_{-1}^1 F'(t p) dt = -p q(p)
            assert!((f_odd(p, &fo) + p * q_kernel(p, &fo)).abs() < 1e-12);
        }
        let tol = Tolerance::new(1e-13, 1e-15);
        let direct = integrate(|r| f_kernel_prime(0.3 + r * 0.5, &fo), 0.0, 1.0, tol).unwrap().value;
        assert!((q_tilde(0.3, 0.5, &fo) + 2.0 * direct).abs() < 1e-13);
    }
}
