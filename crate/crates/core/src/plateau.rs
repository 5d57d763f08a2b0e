//! Surfaces ruled by horizontal great circles leaving the equator `C₀`,
//! their area functional and a constrained minimizer over the angle profile.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_1d, Estimate, GaussLegendre, QuadratureSpec};
use crate::s3::{frame, qmul, Point, TangentVector, Vec4};
use crate::spline::PeriodicCubicSpline;
use crate::surfaces::{Domain, ParamSurface};

/// Tolerance on `(σ(2π) − σ(0)) / 2π` for it to count as an integer winding.
pub const WINDING_TOL: f64 = 1e-10;

/// Angle profile `σ(ε) = σ₀ + ∫₀^ε σ'`, with `σ'` a periodic cubic spline on
/// uniform knots of `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleFunction {
    sigma0: f64,
    rate: PeriodicCubicSpline,
    winding: Option<i64>,
}

impl AngleFunction {
    /// Builds `σ` from samples of `σ'` at the knots `2π i / n`.
    pub fn from_rates(sigma0: f64, rates: Vec<f64>) -> Result<AngleFunction> {
        let rate = PeriodicCubicSpline::new(0.0, TAU, rates)?;
        let turns = rate.total() / TAU;
        let k = turns.round();
        let winding = ((turns - k).abs() <= WINDING_TOL).then_some(k as i64);
        Ok(AngleFunction {
            sigma0,
            rate,
            winding,
        })
    }

    /// `σ(ε) = ε + ε₀`.
    pub fn identity(eps0: f64, n: usize) -> Result<AngleFunction> {
        AngleFunction::from_rates(eps0, vec![1.0; n])
    }

    /// `σ(ε) = c ε`; the winding is defined only for integral `c`.
    pub fn constant_slope(c: f64, n: usize) -> Result<AngleFunction> {
        AngleFunction::from_rates(0.0, vec![c; n])
    }

    /// `σ' = k + a cos(m ε)` sampled at the knots.
    pub fn sinusoidal(k: i64, amplitude: f64, mode: usize, n: usize) -> Result<AngleFunction> {
        let h = TAU / n as f64;
        let rates = (0..n)
            .map(|i| k as f64 + amplitude * (mode as f64 * i as f64 * h).cos())
            .collect();
        AngleFunction::from_rates(0.0, rates)
    }

    /// A random smooth profile of winding `k`: a few low Fourier modes of
    /// amplitude up to `amplitude` around the mean rate `k`.
    pub fn random<R: Rng + ?Sized>(k: i64, amplitude: f64, n: usize, rng: &mut R) -> Result<AngleFunction> {
        let h = TAU / n as f64;
        let modes: Vec<(f64, f64)> = (1..=4)
            .map(|_| (amplitude * rng.gen::<f64>() / 2.0, TAU * rng.gen::<f64>()))
            .collect();
        let mut rates: Vec<f64> = (0..n)
            .map(|i| {
                let e = i as f64 * h;
                modes
                    .iter()
                    .enumerate()
                    .map(|(j, (a, ph))| a * ((j + 1) as f64 * e + ph).cos())
                    .sum::<f64>()
            })
            .collect();
        let mean = rates.iter().sum::<f64>() / n as f64;
        for r in &mut rates {
            *r += k as f64 - mean;
        }
        AngleFunction::from_rates(TAU * rng.gen::<f64>(), rates)
    }

    pub fn sigma(&self, eps: f64) -> f64 {
        self.sigma0 + self.rate.integral(eps)
    }

    pub fn sigma_prime(&self, eps: f64) -> f64 {
        self.rate.eval(eps)
    }

    pub fn sigma_second(&self, eps: f64) -> f64 {
        self.rate.derivative(eps)
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn winding(&self) -> Option<i64> {
        self.winding
    }

    /// `σ(2π) − σ(0)`.
    pub fn total_increase(&self) -> f64 {
        self.rate.total()
    }

    pub fn knots(&self) -> usize {
        self.rate.knots()
    }

    pub fn rates(&self) -> &[f64] {
        self.rate.values()
    }

    /// Exact `(min σ', max σ')` over the period.
    pub fn rate_range(&self) -> (f64, f64) {
        let h = self.rate.spacing();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..self.knots() {
            let (a, b, c, d) = self.rate.panel(i);
            for t in cubic_critical_points(b, c, d, h) {
                let y = a + t * (b + t * (c + t * d));
                lo = lo.min(y);
                hi = hi.max(y);
            }
        }
        (lo, hi)
    }

    /// `max |σ' − c|` over the period.
    pub fn max_rate_deviation(&self, c: f64) -> f64 {
        let (lo, hi) = self.rate_range();
        (hi - c).abs().max((lo - c).abs())
    }

    /// Points of `[0, 2π]` where `σ'` takes one of the `levels`, plus the knots.
    fn breakpoints(&self, levels: &[f64]) -> Vec<f64> {
        let h = self.rate.spacing();
        let mut out = Vec::new();
        for i in 0..self.knots() {
            let x0 = i as f64 * h;
            out.push(x0);
            let (a, b, c, d) = self.rate.panel(i);
            let f = |t: f64| a + t * (b + t * (c + t * d));
            let crit = cubic_critical_points(b, c, d, h);
            for &level in levels {
                for w in crit.windows(2) {
                    let (mut lo, mut hi) = (w[0], w[1]);
                    let (flo, fhi) = (f(lo) - level, f(hi) - level);
                    if flo == 0.0 || flo * fhi >= 0.0 {
                        continue;
                    }
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if (f(mid) - level) * flo > 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    let t = 0.5 * (lo + hi);
                    if t > 1e-13 && t < h - 1e-13 {
                        out.push(x0 + t);
                    }
                }
            }
        }
        out.push(TAU);
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        out
    }
}

/// `0`, `h` and the interior critical points of `b t + c t² + d t³`, sorted.
fn cubic_critical_points(b: f64, c: f64, d: f64, h: f64) -> Vec<f64> {
    let mut ts = vec![0.0, h];
    // b + 2c t + 3d t² = 0
    let (qa, qb, qc) = (3.0 * d, 2.0 * c, b);
    if qa.abs() < 1e-300 {
        if qb != 0.0 {
            ts.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let r = disc.sqrt();
            let q = -0.5 * (qb + qb.signum() * r);
            if q != 0.0 {
                ts.push(q / qa);
                ts.push(qc / q);
            } else {
                ts.push(0.0);
            }
        }
    }
    let mut ts: Vec<f64> = ts.into_iter().filter(|t| (0.0..=h).contains(t)).collect();
    ts.sort_by(f64::total_cmp);
    ts
}

/// `Γ(ε) = (0, 0, cos ε, sin ε)`.
pub fn gamma_point(eps: f64) -> Point {
    Point::new(0.0, 0.0, eps.cos(), eps.sin())
}

/// `U(ε) = cos σ E₁(Γ(ε)) + sin σ E₂(Γ(ε))`.
pub fn direction(a: &AngleFunction, eps: f64) -> Vec4 {
    let phi = a.sigma(eps) - eps;
    [-phi.cos(), -phi.sin(), 0.0, 0.0]
}

/// `γ_ε(s) = cos s Γ(ε) + sin s U(ε)`.
pub fn ruled_point(a: &AngleFunction, eps: f64, s: f64) -> Point {
    Point::from_vec(ruled_vec(a.sigma(eps), eps, s))
}

fn ruled_vec(sigma: f64, eps: f64, s: f64) -> Vec4 {
    let phi = sigma - eps;
    let (ss, cs) = s.sin_cos();
    [-ss * phi.cos(), -ss * phi.sin(), cs * eps.cos(), cs * eps.sin()]
}

/// `(∂F/∂ε, ∂F/∂s)`.
pub fn ruled_partials(a: &AngleFunction, eps: f64, s: f64) -> (Vec4, Vec4) {
    let phi = a.sigma(eps) - eps;
    let dphi = a.sigma_prime(eps) - 1.0;
    let (ss, cs) = s.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let (se, ce) = eps.sin_cos();
    let d_eps = [ss * dphi * sp, -ss * dphi * cp, -cs * se, cs * ce];
    let d_s = [-cs * cp, -cs * sp, -ss * ce, -ss * se];
    (d_eps, d_s)
}

/// `v(s)` for a given rate `σ'`.
pub fn v_of_rate(rate: f64, s: f64) -> f64 {
    (rate - 2.0) / 2.0 * (1.0 - (2.0 * s).cos()) + 1.0
}

/// `v'(s)` for a given rate `σ'`.
pub fn v_prime_of_rate(rate: f64, s: f64) -> f64 {
    (rate - 2.0) * (2.0 * s).sin()
}

pub fn v_func(a: &AngleFunction, eps: f64, s: f64) -> f64 {
    v_of_rate(a.sigma_prime(eps), s)
}

pub fn v_prime(a: &AngleFunction, eps: f64, s: f64) -> f64 {
    v_prime_of_rate(a.sigma_prime(eps), s)
}

/// Riemannian area element `√(4v² + v'²) / 2`.
pub fn area_element(a: &AngleFunction, eps: f64, s: f64) -> f64 {
    let d = a.sigma_prime(eps);
    0.5 * (4.0 * v_of_rate(d, s).powi(2) + v_prime_of_rate(d, s).powi(2)).sqrt()
}

/// First zero `½ arccos(σ'/(σ'−2))` of `v` on `(0, π/2]`; the second is `π` minus it.
pub fn singular_s(a: &AngleFunction, eps: f64) -> Result<f64> {
    singular_s_of_rate(a.sigma_prime(eps))
}

pub fn singular_s_of_rate(rate: f64) -> Result<f64> {
    if !(rate < 1.0) {
        return Err(Error::NoSingularity { rate });
    }
    Ok(0.5 * (rate / (rate - 2.0)).clamp(-1.0, 1.0).acos())
}

/// `N = (−2v J(γ̇) + v' T) / √(4v² + v'²)`.
pub fn ruled_normal(a: &AngleFunction, eps: f64, s: f64) -> Result<TangentVector> {
    let d = a.sigma_prime(eps);
    let (v, vp) = (v_of_rate(d, s), v_prime_of_rate(d, s));
    let den = (4.0 * v * v + vp * vp).sqrt();
    if !(den > 1e-14) {
        return Err(Error::DegenerateParametrization { u: eps, v: s });
    }
    let p = ruled_point(a, eps, s);
    let (_, d_s) = ruled_partials(a, eps, s);
    let j_gamma = qmul(&[0.0, 1.0, 0.0, 0.0], &d_s);
    let t = frame(&p).t.v;
    let mut n = [0.0; 4];
    for k in 0..4 {
        n[k] = (-2.0 * v * j_gamma[k] + vp * t[k]) / den;
    }
    Ok(TangentVector { base: p, v: n })
}

/// Signed horizontal norm `2v / √(4v² + v'²)`, positive where `v > 0`.
pub fn ruled_signed_nh(a: &AngleFunction, eps: f64, s: f64) -> Result<f64> {
    let d = a.sigma_prime(eps);
    let (v, vp) = (v_of_rate(d, s), v_prime_of_rate(d, s));
    let den = (4.0 * v * v + vp * vp).sqrt();
    if !(den > 1e-14) {
        return Err(Error::DegenerateParametrization { u: eps, v: s });
    }
    Ok(2.0 * v / den)
}

/// `|N_h| = 2|v| / √(4v² + v'²)`.
pub fn ruled_norm_nh(a: &AngleFunction, eps: f64, s: f64) -> Result<f64> {
    Ok(ruled_signed_nh(a, eps, s)?.abs())
}

/// The ruled surface `F(ε, s) = γ_ε(s)` over `[0, 2π] × s_range`.
///
/// Its frame-determinant normal is opposite to `N` above, so it reports orientation `−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RuledSurface {
    pub angle: AngleFunction,
    pub s: (f64, f64),
}

impl RuledSurface {
    pub fn new(angle: AngleFunction, s: (f64, f64)) -> Result<RuledSurface> {
        if !(0.0 <= s.0 && s.0 < s.1 && s.1 <= PI) {
            return Err(Error::DomainExceeded {
                what: "s range",
                value: s.1,
                lo: 0.0,
                hi: PI,
            });
        }
        Ok(RuledSurface { angle, s })
    }
}

impl ParamSurface for RuledSurface {
    fn domain(&self) -> Domain {
        Domain::new((0.0, TAU), self.s)
    }
    fn point(&self, eps: f64, s: f64) -> Point {
        ruled_point(&self.angle, eps, s)
    }
    fn partials(&self, eps: f64, s: f64) -> (Vec4, Vec4) {
        ruled_partials(&self.angle, eps, s)
    }
    fn orientation(&self) -> f64 {
        -1.0
    }
}

/// `∫ v ds` antiderivative.
fn v_antiderivative(rate: f64, s: f64) -> f64 {
    (rate - 2.0) / 2.0 * (s - (2.0 * s).sin() / 2.0) + s
}

/// `∂/∂σ'` of [`v_antiderivative`].
fn v_antiderivative_rate(s: f64) -> f64 {
    (s - (2.0 * s).sin() / 2.0) / 2.0
}

/// Split points of `[s0, s1]` at the zeros of `v`.
fn sign_segments(rate: f64, s0: f64, s1: f64) -> Vec<f64> {
    let mut pts = vec![s0];
    if let Ok(r) = singular_s_of_rate(rate) {
        for z in [r, PI - r] {
            if z > s0 && z < s1 {
                pts.push(z);
            }
        }
    }
    pts.push(s1);
    pts.sort_by(f64::total_cmp);
    pts
}

/// `∫_{s0}^{s1} |v(s)| ds` in closed form.
pub fn abs_v_integral(rate: f64, s0: f64, s1: f64) -> f64 {
    sign_segments(rate, s0, s1)
        .windows(2)
        .map(|w| (v_antiderivative(rate, w[1]) - v_antiderivative(rate, w[0])).abs())
        .sum()
}

/// `∂/∂σ'` of [`abs_v_integral`].
pub fn abs_v_integral_rate(rate: f64, s0: f64, s1: f64) -> f64 {
    sign_segments(rate, s0, s1)
        .windows(2)
        .map(|w| {
            let part = v_antiderivative(rate, w[1]) - v_antiderivative(rate, w[0]);
            part.signum() * (v_antiderivative_rate(w[1]) - v_antiderivative_rate(w[0]))
        })
        .sum()
}

/// Rates at which a zero of `v` crosses `s`, where the inner integral has a kink.
fn crossing_rate(s: f64) -> Option<f64> {
    let c = (2.0 * s).cos();
    (c < 1.0 - 1e-15).then(|| 2.0 * c / (c - 1.0))
}

/// `A = ∬ |v| dε ds`, which equals the sub-Riemannian area of the ruled surface.
pub fn plateau_area(a: &AngleFunction, s_range: (f64, f64), q: &QuadratureSpec) -> Result<Estimate> {
    let (s0, s1) = s_range;
    if !(0.0 <= s0 && s0 <= s1 && s1 <= PI) {
        return Err(Error::DomainExceeded {
            what: "s range",
            value: s1,
            lo: 0.0,
            hi: PI,
        });
    }
    let mut levels = vec![1.0];
    levels.extend([s0, s1].iter().filter_map(|&s| crossing_rate(s)));
    let breaks = a.breakpoints(&levels);
    let mut total = Estimate::exact(0.0);
    for w in breaks.windows(2) {
        let e = integrate_1d(|eps| abs_v_integral(a.sigma_prime(eps), s0, s1), w[0], w[1], q)?;
        total = total.plus(e);
    }
    Ok(total)
}

/// Lower bound `|k| π² / 2` on the area over `s ∈ [0, π/2]` for winding `k`.
/// With `k = 1` this is the area of either half of `Σ₀`.
pub fn plateau_bound(winding: i64) -> f64 {
    winding.unsigned_abs() as f64 * PI * PI / 2.0
}

/// Gradient of `plateau_area` over `[0, π/2]` with respect to the knot rates.
fn area_gradient(basis: &RateBasis, rates: &[f64]) -> Vec<f64> {
    let n = rates.len();
    let mut g = vec![0.0; n];
    for (eps_w, row) in &basis.rows {
        let d: f64 = row.iter().zip(rates).map(|(b, r)| b * r).sum();
        let w = eps_w * abs_v_integral_rate(d, 0.0, FRAC_PI_2);
        for j in 0..n {
            g[j] += w * row[j];
        }
    }
    g
}

/// Cardinal spline basis evaluated at Gauss nodes of every knot panel.
struct RateBasis {
    rows: Vec<(f64, Vec<f64>)>,
}

impl RateBasis {
    fn new(n: usize) -> Result<RateBasis> {
        let rule = GaussLegendre::new(12);
        let h = TAU / n as f64;
        let cardinals: Vec<PeriodicCubicSpline> = (0..n)
            .map(|j| {
                let mut y = vec![0.0; n];
                y[j] = 1.0;
                PeriodicCubicSpline::new(0.0, TAU, y)
            })
            .collect::<Result<_>>()?;
        let mut rows = Vec::with_capacity(n * rule.nodes.len());
        for i in 0..n {
            let mid = (i as f64 + 0.5) * h;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let e = mid + 0.5 * h * x;
                rows.push((0.5 * h * w, cardinals.iter().map(|c| c.eval(e)).collect()));
            }
        }
        Ok(RateBasis { rows })
    }
}

/// Euclidean projection onto `{d_i ≥ 1, mean(d) = k}`.
pub fn project_rates(y: &[f64], k: f64) -> Result<Vec<f64>> {
    if !(k >= 1.0) {
        return Err(Error::Infeasible(format!(
            "mean rate {k} is below the lower bound 1, so no sigma' >= 1 has this winding"
        )));
    }
    let n = y.len() as f64;
    let mean_at = |tau: f64| y.iter().map(|v| (v - tau).max(1.0)).sum::<f64>() / n;
    if k == 1.0 {
        return Ok(vec![1.0; y.len()]);
    }
    let ymax = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ymin = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let (mut lo, mut hi) = (ymin - k - 1.0, ymax);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) > k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    let mut d: Vec<f64> = y.iter().map(|v| (v - tau).max(1.0)).collect();
    // remove the residual of the bisection from the free coordinates
    let free: Vec<usize> = (0..d.len()).filter(|&i| d[i] > 1.0).collect();
    if !free.is_empty() {
        let excess = d.iter().sum::<f64>() - k * n;
        let shift = excess / free.len() as f64;
        for i in free {
            d[i] -= shift;
        }
    }
    Ok(d)
}

/// Pulls knot rates with mean `k` toward the constant `k` until the spline
/// itself, not only its knot values, satisfies `σ' ≥ 1`.
pub fn retract_rates(d: &[f64], k: f64) -> Result<Vec<f64>> {
    let a = AngleFunction::from_rates(0.0, d.to_vec())?;
    let (lo, _) = a.rate_range();
    if lo >= 1.0 {
        return Ok(d.to_vec());
    }
    // the spline is linear in its data, so its minimum moves linearly
    let theta = ((k - 1.0) / (k - lo)).clamp(0.0, 1.0);
    Ok(d.iter().map(|x| k + theta * (x - k)).collect())
}

/// A random profile of winding `k` with `σ' ≥ 1` everywhere.
pub fn feasible_start<R: Rng + ?Sized>(k: i64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let y: Vec<f64> = (0..n).map(|_| 1.0 + 2.0 * k.max(1) as f64 * rng.gen::<f64>()).collect();
    retract_rates(&project_rates(&y, k as f64)?, k as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub area: f64,
    pub step: f64,
    pub max_rate_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct Minimization {
    pub angle: AngleFunction,
    pub area: Estimate,
    pub iterations: usize,
    pub trace: Vec<TraceRow>,
}

pub const MINIMIZER_STEP: f64 = 0.1;
pub const MINIMIZER_MAX_ITERATIONS: usize = 100_000;
pub const MINIMIZER_TOL: f64 = 1e-8;

/// Projected gradient descent of the area over `[0, π/2]` among rate
/// profiles with winding `k` and `σ' ≥ 1`. Each iterate is projected onto
/// `{d_i ≥ 1, mean = k}` and then retracted so the spline stays above 1
/// between knots as well.
pub fn minimize_sigma(k: i64, start: &[f64], q: &QuadratureSpec) -> Result<Minimization> {
    if k < 1 {
        return Err(Error::Infeasible(format!(
            "winding {k}: sigma' >= 1 forces the total increase to be at least 2π"
        )));
    }
    let n = start.len();
    if n < 16 {
        return Err(Error::InvalidArgument(format!("need at least 16 knots, got {n}")));
    }
    let kf = k as f64;
    let basis = RateBasis::new(n)?;
    let area_of = |d: &[f64]| -> Result<(AngleFunction, Estimate)> {
        let a = AngleFunction::from_rates(0.0, d.to_vec())?;
        let e = plateau_area(&a, (0.0, FRAC_PI_2), q)?;
        Ok((a, e))
    };
    let mut d = retract_rates(&project_rates(start, kf)?, kf)?;
    let (mut angle, mut area) = area_of(&d)?;
    let mut trace = vec![TraceRow {
        iteration: 0,
        area: area.value,
        step: 0.0,
        max_rate_deviation: angle.max_rate_deviation(1.0),
    }];
    for it in 1..=MINIMIZER_MAX_ITERATIONS {
        let g = area_gradient(&basis, &d);
        let mut step = MINIMIZER_STEP;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = d.iter().zip(&g).map(|(x, gi)| x - step * gi).collect();
            let trial = retract_rates(&project_rates(&trial, kf)?, kf)?;
            let (ta, te) = area_of(&trial)?;
            if te.value <= area.value + MINIMIZER_TOL {
                accepted = Some((trial, ta, te));
                break;
            }
            step *= 0.5;
        }
        let Some((nd, na, ne)) = accepted else {
            return Ok(Minimization {
                angle,
                area,
                iterations: it,
                trace,
            });
        };
        let decrease = area.value - ne.value;
        d = nd;
        angle = na;
        area = ne;
        trace.push(TraceRow {
            iteration: it,
            area: area.value,
            step,
            max_rate_deviation: angle.max_rate_deviation(1.0),
        });
        if decrease < MINIMIZER_TOL {
            return Ok(Minimization {
                angle,
                area,
                iterations: it,
                trace,
            });
        }
    }
    Err(Error::NoConvergence {
        what: "projected gradient",
        achieved: trace.last().map(|r| r.area).unwrap_or(f64::NAN),
    })
}
