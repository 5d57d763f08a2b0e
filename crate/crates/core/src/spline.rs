//! Periodic cubic interpolating splines on uniform knots.

use crate::error::{Error, Result};

/// `C²` periodic cubic through `(x0 + i h, y_i)`, `i = 0..n`, with period `n h`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicCubicSpline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
    /// `∫_{x0}^{x_i}` of the spline.
    cumulative: Vec<f64>,
}

impl PeriodicCubicSpline {
    pub fn new(x0: f64, period: f64, y: Vec<f64>) -> Result<PeriodicCubicSpline> {
        let n = y.len();
        if n < 3 {
            return Err(Error::InvalidArgument(format!("periodic spline needs >= 3 knots, got {n}")));
        }
        if !(period > 0.0) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite spline data".into()));
        }
        let h = period / n as f64;
        let rhs: Vec<f64> = (0..n)
            .map(|i| 6.0 * (y[(i + 1) % n] - 2.0 * y[i] + y[(i + n - 1) % n]) / (h * h))
            .collect();
        let m = solve_cyclic(1.0, 4.0, 1.0, &rhs);
        let mut cumulative = Vec::with_capacity(n + 1);
        cumulative.push(0.0);
        for i in 0..n {
            let j = (i + 1) % n;
            let piece = h * (y[i] + y[j]) / 2.0 - h * h * h * (m[i] + m[j]) / 24.0;
            cumulative.push(cumulative[i] + piece);
        }
        Ok(PeriodicCubicSpline {
            x0,
            h,
            y,
            m,
            cumulative,
        })
    }

    pub fn knots(&self) -> usize {
        self.y.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn period(&self) -> f64 {
        self.h * self.y.len() as f64
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn knot(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    /// Integral over one period.
    pub fn total(&self) -> f64 {
        self.cumulative[self.y.len()]
    }

    /// Panel index, local offset and number of whole periods before `x`.
    fn locate(&self, x: f64) -> (usize, f64, f64) {
        let n = self.y.len();
        let r = (x - self.x0) / self.h;
        let cell = r.floor();
        let periods = (cell / n as f64).floor();
        let mut i = (cell - periods * n as f64) as isize;
        let mut t = (r - cell) * self.h;
        if i >= n as isize {
            i = 0;
        }
        if i < 0 {
            i = 0;
            t = 0.0;
        }
        (i as usize, t, periods)
    }

    fn coeffs(&self, i: usize) -> (f64, f64, f64, f64) {
        let n = self.y.len();
        let j = (i + 1) % n;
        let h = self.h;
        let b = (self.y[j] - self.y[i]) / h - h * (2.0 * self.m[i] + self.m[j]) / 6.0;
        (self.y[i], b, 0.5 * self.m[i], (self.m[j] - self.m[i]) / (6.0 * h))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (i, t, _) = self.locate(x);
        let (a, b, c, d) = self.coeffs(i);
        a + t * (b + t * (c + t * d))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (i, t, _) = self.locate(x);
        let (_, b, c, d) = self.coeffs(i);
        b + t * (2.0 * c + 3.0 * t * d)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let (i, t, _) = self.locate(x);
        let (_, _, c, d) = self.coeffs(i);
        2.0 * c + 6.0 * t * d
    }

    /// `∫_{x0}^{x}`, continued across periods.
    pub fn integral(&self, x: f64) -> f64 {
        let (i, t, periods) = self.locate(x);
        let (a, b, c, d) = self.coeffs(i);
        let local = t * (a + t * (b / 2.0 + t * (c / 3.0 + t * d / 4.0)));
        periods * self.total() + self.cumulative[i] + local
    }

    /// Coefficients `(a, b, c, d)` of the cubic `a + b t + c t² + d t³` on panel `i`.
    pub fn panel(&self, i: usize) -> (f64, f64, f64, f64) {
        self.coeffs(i % self.y.len())
    }
}

/// Solves the cyclic tridiagonal system with constant bands
/// `lower, diag, upper` (corners equal to the off-diagonals) by Sherman–Morrison.
fn solve_cyclic(lower: f64, diag: f64, upper: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let (alpha, beta) = (upper, lower); // top-right and bottom-left corners
    let gamma = -diag;
    let mut bb = vec![diag; n];
    bb[0] = diag - gamma;
    bb[n - 1] = diag - alpha * beta / gamma;
    let x = thomas(lower, &bb, upper, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = thomas(lower, &bb, upper, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn thomas(lower: f64, diag: &[f64], upper: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - lower * c[i - 1];
        c[i] = upper / den;
        d[i] = (rhs[i] - lower * d[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn sampled(n: usize, f: impl Fn(f64) -> f64) -> PeriodicCubicSpline {
        let h = TAU / n as f64;
        PeriodicCubicSpline::new(0.0, TAU, (0..n).map(|i| f(i as f64 * h)).collect()).unwrap()
    }

    #[test]
    fn interpolates_and_is_periodic() {
        let s = sampled(24, |x| (2.0 * x).sin() + 0.3 * x.cos());
        for i in 0..24 {
            let x = s.knot(i);
            assert!((s.eval(x) - s.values()[i]).abs() < 1e-14);
        }
        for &x in &[0.1, 2.7, 5.9] {
            assert!((s.eval(x) - s.eval(x + TAU)).abs() < 1e-13);
            assert!((s.derivative(x) - s.derivative(x - TAU)).abs() < 1e-12);
        }
    }

    #[test]
    fn second_derivative_is_continuous() {
        let s = sampled(16, |x| x.sin().exp());
        for i in 0..16 {
            let x = s.knot(i);
            let left = s.second_derivative(x - 1e-12);
            let right = s.second_derivative(x + 1e-12);
            assert!((left - right).abs() < 1e-8);
        }
    }

    #[test]
    fn approximates_smooth_function() {
        let s = sampled(128, |x| (3.0 * x).cos());
        for k in 0..50 {
            let x = 0.123 * k as f64;
            assert!((s.eval(x) - (3.0 * x).cos()).abs() < 1e-5);
            assert!((s.derivative(x) + 3.0 * (3.0 * x).sin()).abs() < 1e-3);
        }
    }

    #[test]
    fn integral_is_trapezoid_sum() {
        let s = sampled(10, |x| 1.0 + x.sin() + (4.0 * x).cos());
        let sum: f64 = s.values().iter().sum::<f64>() * s.spacing();
        assert!((s.total() - sum).abs() < 1e-13);
        assert!((s.integral(TAU) - s.total()).abs() < 1e-13);
        assert!((s.integral(3.0 * PI) - s.integral(PI) - s.total()).abs() < 1e-12);
        let h = 1e-6;
        let x = 1.7;
        let fd = (s.integral(x + h) - s.integral(x - h)) / (2.0 * h);
        assert!((fd - s.eval(x)).abs() < 1e-8);
    }

    #[test]
    fn constant_data_is_exact() {
        let s = PeriodicCubicSpline::new(0.0, TAU, vec![1.5; 7]).unwrap();
        assert_eq!(s.eval(2.0), 1.5);
        assert_eq!(s.derivative(4.0), 0.0);
        assert!((s.total() - 1.5 * TAU).abs() < 1e-14);
    }

    #[test]
    fn rejects_short_input() {
        assert!(PeriodicCubicSpline::new(0.0, 1.0, vec![1.0, 2.0]).is_err());
    }
}
