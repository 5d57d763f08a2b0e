//! Isoperimetric comparison for rotationally invariant sets inside the
//! vertical solid tubes `W_λ = {d_L ≤ arctan(1/λ)}`.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pansu::{
    ball_volume, omega_max, rho, rho_prime, s_max, sphere_area, tau_lambda, PansuSphere, VolumeProfile,
    PROFILE_LAMBDA_MIN,
};
use crate::plateau::plateau_bound;
use crate::quadrature::{Estimate, QuadratureSpec};
use crate::s3::{add, cylindrical, norm, sub};
use crate::surfaces::{
    clifford_torus, sr_area, unit_normal, volume_revolution, CurveJet, ParamSurface, Region, RevolutionSurface,
};

/// Step of the central differences in `α`.
pub const XI_STEP: f64 = 1e-4;
/// Slack on the tube radius when matching the set's extent against it.
pub const EDGE_TOL: f64 = 1e-12;
const HYPOTHESIS_SAMPLES: usize = 512;
const WALL_TOL: f64 = 1e-12;

/// Half-height of a section above or below the equatorial slice, as a function of `ω`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `scale · ρ_λ(ω) + offset`.
    Pansu { lambda: f64, scale: f64, offset: f64 },
    /// `Σ c_k ω^k`.
    Polynomial { coeffs: Vec<f64> },
}

impl Profile {
    pub fn constant(c: f64) -> Profile {
        Profile::Polynomial { coeffs: vec![c] }
    }

    pub fn value(&self, w: f64) -> f64 {
        match self {
            Profile::Pansu { lambda, scale, offset } => {
                scale * rho(*lambda, w.min(omega_max(*lambda))).unwrap_or(f64::NAN) + offset
            }
            Profile::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * w + c),
        }
    }

    pub fn derivative(&self, w: f64) -> f64 {
        match self {
            Profile::Pansu { lambda, scale, .. } => scale * rho_prime(*lambda, w).unwrap_or(f64::NAN),
            Profile::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * w + k as f64 * c),
        }
    }

    /// Largest `ω` at which the profile is defined.
    fn reach(&self) -> f64 {
        match self {
            Profile::Pansu { lambda, .. } => omega_max(*lambda),
            Profile::Polynomial { .. } => PI / 2.0,
        }
    }
}

/// The rotationally invariant set whose section is
/// `τ_λ/2 − below(ω) ≤ τ ≤ τ_λ/2 + above(ω)`, `0 ≤ ω ≤ omega_extent`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSet {
    pub id: String,
    pub lambda_tube: f64,
    pub omega_extent: f64,
    pub above: Profile,
    pub below: Profile,
}

impl TrialSet {
    fn symmetric(id: String, lambda: f64, p: Profile) -> TrialSet {
        TrialSet {
            id,
            lambda_tube: lambda,
            omega_extent: omega_max(lambda),
            above: p.clone(),
            below: p,
        }
    }

    /// `B_λ` itself.
    pub fn pansu_ball(lambda: f64) -> TrialSet {
        let p = Profile::Pansu {
            lambda,
            scale: 1.0,
            offset: 0.0,
        };
        TrialSet::symmetric(format!("pansu-ball:{lambda}"), lambda, p)
    }

    /// `{ω ≤ arctan(1/λ), |τ − τ_λ/2| ≤ c}`.
    pub fn truncated_tube(lambda: f64, c: f64) -> TrialSet {
        TrialSet::symmetric(format!("tube:{lambda}:{c}"), lambda, Profile::constant(c))
    }

    /// The truncated tube of volume `v`.
    pub fn truncated_tube_with_volume(lambda: f64, v: f64) -> TrialSet {
        let s = omega_max(lambda).sin();
        let mut t = TrialSet::truncated_tube(lambda, v / (TAU * s * s));
        t.id = format!("tube-volume:{lambda}:{v}");
        t
    }

    /// `B_λ` with its section stretched vertically by `scale`.
    pub fn scaled_ball(lambda: f64, scale: f64) -> TrialSet {
        let p = Profile::Pansu {
            lambda,
            scale,
            offset: 0.0,
        };
        TrialSet::symmetric(format!("scaled-ball:{lambda}:{scale}"), lambda, p)
    }

    /// Heights `(1 + k) ρ_λ` above and `(1 − k) ρ_λ` below the slice.
    pub fn skewed_ball(lambda: f64, k: f64) -> TrialSet {
        let p = |scale| Profile::Pansu {
            lambda,
            scale,
            offset: 0.0,
        };
        TrialSet {
            id: format!("skewed-ball:{lambda}:{k}"),
            lambda_tube: lambda,
            omega_extent: omega_max(lambda),
            above: p(1.0 + k),
            below: p(1.0 - k),
        }
    }

    /// Half-height `h (1 − (ω/ω_max)²)`.
    pub fn lens(lambda: f64, h: f64) -> TrialSet {
        let w = omega_max(lambda);
        let p = Profile::Polynomial {
            coeffs: vec![h, 0.0, -h / (w * w)],
        };
        TrialSet::symmetric(format!("lens:{lambda}:{h}"), lambda, p)
    }

    /// `B_λ` moved up by `delta` along `L`; the slice condition fails near `C_λ`.
    pub fn shifted_ball(lambda: f64, delta: f64) -> TrialSet {
        let p = |offset| Profile::Pansu {
            lambda,
            scale: 1.0,
            offset,
        };
        TrialSet {
            id: format!("shifted-ball:{lambda}:{delta}"),
            lambda_tube: lambda,
            omega_extent: omega_max(lambda),
            above: p(delta),
            below: p(-delta),
        }
    }

    /// Parses `name:λ[:param]`, e.g. `pansu-ball:1` or `tube:2:0.1`.
    /// `tube-volume:λ` takes `V = m(λ)` when no volume is given.
    pub fn preset(preset: &str) -> Result<TrialSet> {
        let parts: Vec<&str> = preset.split(':').collect();
        let num = |i: usize| -> Result<f64> {
            let s = parts
                .get(i)
                .ok_or_else(|| Error::InvalidArgument(format!("preset {preset:?} is missing parameter {i}")))?;
            s.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("preset {preset:?}: bad number {s:?}")))
        };
        let lambda = num(1)?;
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("preset {preset:?}: lambda must be >= 0")));
        }
        let arity = |n: usize| {
            if parts.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("preset {preset:?} expects {} parameters", n - 1)))
            }
        };
        match parts[0] {
            "pansu-ball" => arity(2).map(|_| TrialSet::pansu_ball(lambda)),
            "tube" => arity(3).and_then(|_| Ok(TrialSet::truncated_tube(lambda, num(2)?))),
            "tube-volume" => {
                let v = if parts.len() == 2 {
                    ball_volume(lambda, &QuadratureSpec::default())?.value
                } else {
                    arity(3)?;
                    num(2)?
                };
                Ok(TrialSet::truncated_tube_with_volume(lambda, v))
            }
            "scaled-ball" => arity(3).and_then(|_| Ok(TrialSet::scaled_ball(lambda, num(2)?))),
            "skewed-ball" => arity(3).and_then(|_| Ok(TrialSet::skewed_ball(lambda, num(2)?))),
            "lens" => arity(3).and_then(|_| Ok(TrialSet::lens(lambda, num(2)?))),
            "shifted-ball" => arity(3).and_then(|_| Ok(TrialSet::shifted_ball(lambda, num(2)?))),
            other => Err(Error::InvalidArgument(format!("unknown trial-set preset {other:?}"))),
        }
    }

    /// `τ` of the equatorial slice.
    pub fn center(&self) -> f64 {
        0.5 * tau_lambda(self.lambda_tube)
    }

    /// Checks `Ω ⊂ W_λ` and `Ω̄ ∩ 𝕊²_λ = D_λ` on a sampled boundary.
    ///
    /// `𝕊²_λ` is the pair of slices `τ = τ_λ/2` and `τ = τ_λ/2 + π`, and `D_λ`
    /// is the part `ω ≤ arctan(1/λ)` of the first one.
    pub fn check_hypotheses(&self) -> Result<()> {
        let l = self.lambda_tube;
        if !(l >= 0.0 && l.is_finite()) {
            return Err(Error::InvalidArgument(format!("tube parameter {l}")));
        }
        let radius = omega_max(l);
        let we = self.omega_extent;
        if we > radius + EDGE_TOL {
            return Err(Error::HypothesisViolation(format!(
                "{}: set leaves the tube, extent {we} > radius {radius}",
                self.id
            )));
        }
        if we < radius - EDGE_TOL {
            return Err(Error::HypothesisViolation(format!(
                "{}: closure misses the rim of the equatorial disk, extent {we} < radius {radius}",
                self.id
            )));
        }
        for p in [&self.above, &self.below] {
            if p.reach() < we - EDGE_TOL {
                return Err(Error::InvalidArgument(format!(
                    "{}: profile defined only up to omega = {}",
                    self.id,
                    p.reach()
                )));
            }
        }
        for k in 0..=HYPOTHESIS_SAMPLES {
            let w = we * k as f64 / HYPOTHESIS_SAMPLES as f64;
            let (a, b) = (self.above.value(w), self.below.value(w));
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidArgument(format!("{}: profile not finite at omega = {w}", self.id)));
            }
            if a < -EDGE_TOL || b < -EDGE_TOL {
                return Err(Error::HypothesisViolation(format!(
                    "{}: section at omega = {w} misses the equatorial disk (above {a}, below {b})",
                    self.id
                )));
            }
            if a >= PI || b >= PI {
                return Err(Error::HypothesisViolation(format!(
                    "{}: section at omega = {w} reaches the antipodal slice",
                    self.id
                )));
            }
        }
        Ok(())
    }

    pub fn region(&self) -> Region {
        let c = self.center();
        let (a, b) = (self.above.clone(), self.below.clone());
        Region::graph((0.0, self.omega_extent), move |w| c - b.value(w), move |w| c + a.value(w))
    }

    pub fn volume(&self, q: &QuadratureSpec) -> Result<Estimate> {
        volume_revolution(&self.region(), q)
    }

    /// Graph patch `τ = τ_λ/2 + sign · profile(ω)`, with `ω = ω_e t (2 − t)`
    /// so that square-root behaviour at the rim becomes smooth in `t`.
    fn graph_patch(&self, profile: &Profile, sign: f64) -> RevolutionSurface {
        let c = self.center();
        let we = self.omega_extent;
        let p = profile.clone();
        RevolutionSurface::new((0.0, 1.0), move |t| {
            let w = we * t * (2.0 - t);
            let dw = 2.0 * we * (1.0 - t);
            CurveJet {
                omega: w,
                tau: c + sign * p.value(w),
                d_omega: dw,
                d_tau: sign * p.derivative(w) * dw,
            }
        })
    }

    /// Boundary patches: the upper and lower graphs, and the piece of
    /// `∂W_λ` between them when the section has positive height at the rim.
    pub fn boundary_patches(&self) -> Vec<RevolutionSurface> {
        let mut out = vec![self.graph_patch(&self.above, 1.0), self.graph_patch(&self.below, -1.0)];
        let we = self.omega_extent;
        let (a, b) = (self.above.value(we), self.below.value(we));
        if a + b > WALL_TOL {
            let c = self.center();
            out.push(RevolutionSurface::new((c - b, c + a), move |t| CurveJet {
                omega: we,
                tau: t,
                d_omega: 0.0,
                d_tau: 1.0,
            }));
        }
        out
    }

    /// `A(∂Ω)` as the sum of the patch areas.
    pub fn boundary_area(&self, q: &QuadratureSpec) -> Result<Estimate> {
        self.boundary_patches()
            .iter()
            .try_fold(Estimate::exact(0.0), |acc, s| Ok(acc.plus(sr_area(s, q)?)))
    }
}

/// Ten admissible sets in `W_λ` other than `B_λ`.
pub fn comparison_suite(lambda: f64, q: &QuadratureSpec) -> Result<Vec<TrialSet>> {
    let m = ball_volume(lambda, q)?.value;
    Ok(vec![
        TrialSet::truncated_tube_with_volume(lambda, m),
        TrialSet::truncated_tube(lambda, 0.05),
        TrialSet::truncated_tube(lambda, 0.4),
        TrialSet::scaled_ball(lambda, 0.7),
        TrialSet::scaled_ball(lambda, 1.3),
        TrialSet::skewed_ball(lambda, 0.4),
        TrialSet::skewed_ball(lambda, 0.9),
        TrialSet::lens(lambda, 0.2),
        TrialSet::lens(lambda, 0.8),
        TrialSet {
            id: format!("bump:{lambda}"),
            lambda_tube: lambda,
            omega_extent: omega_max(lambda),
            above: Profile::Pansu {
                lambda,
                scale: 1.0,
                offset: 0.1,
            },
            below: Profile::Polynomial {
                coeffs: vec![0.3, 0.2],
            },
        },
    ])
}

type QuadKey =(usize, usize, usize, u64);

fn quad_key(q: &QuadratureSpec) -> QuadKey {
    (q.order, q.panels, q.max_levels, q.tol.to_bits())
}

/// `(A(Σ_α), m(α))`, cached per `α` and quadrature.
pub fn sphere_data(alpha: f64, q: &QuadratureSpec) -> Result<(Estimate, Estimate)> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, QuadKey), (Estimate, Estimate)>>> = OnceLock::new();
    let key = (alpha.to_bits(), quad_key(q));
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("sphere cache").get(&key) {
        return Ok(*v);
    }
    let v = (sphere_area(alpha, q)?, ball_volume(alpha, q)?);
    cache.lock().expect("sphere cache").insert(key, v);
    Ok(v)
}

fn volume_profile(q: &QuadratureSpec) -> Result<Arc<VolumeProfile>> {
    static CACHE: OnceLock<Mutex<HashMap<QuadKey, Arc<VolumeProfile>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().expect("profile cache").get(&quad_key(q)) {
        return Ok(p.clone());
    }
    let p = Arc::new(VolumeProfile::new(q)?);
    cache.lock().expect("profile cache").insert(quad_key(q), p.clone());
    Ok(p)
}

/// The `μ ≥ 0` with `m(μ) = v`, for `v ∈ (0, π²]`.
pub fn volume_to_mu(v: f64, q: &QuadratureSpec) -> Result<f64> {
    let full = PI * PI;
    if !(v > 0.0 && v <= full * (1.0 + 1e-12)) {
        return Err(Error::VolumeOutOfRange(v));
    }
    if v >= full * (1.0 - 1e-15) {
        return Ok(0.0);
    }
    let profile = volume_profile(q)?;
    let top = profile.table()[0].1;
    if v <= top {
        return profile.mu_for_volume(v);
    }
    // between m(PROFILE_LAMBDA_MIN) and π²
    let (mut lo, mut hi) = (0.0, PROFILE_LAMBDA_MIN);
    while hi - lo > 1e-18 {
        let mid = 0.5 * (lo + hi);
        if ball_volume(mid, q)?.value > v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `ξ(α) = A(Σ_α) + 2α (V − m(α))`.
pub fn xi(alpha: f64, v: f64, q: &QuadratureSpec) -> Result<f64> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::DomainExceeded {
            what: "alpha",
            value: alpha,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if !(v > 0.0 && v <= PI * PI * (1.0 + 1e-12)) {
        return Err(Error::VolumeOutOfRange(v));
    }
    let (a, m) = sphere_data(alpha, q)?;
    Ok(a.value + 2.0 * alpha * (v - m.value))
}

/// First derivative in `α` by differences with step `XI_STEP`; one-sided near 0.
fn diff1(f: impl Fn(f64) -> Result<f64>, x: f64) -> Result<f64> {
    let h = XI_STEP;
    if x >= h {
        Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
    } else {
        Ok((-3.0 * f(x)? + 4.0 * f(x + h)? - f(x + 2.0 * h)?) / (2.0 * h))
    }
}

fn diff2(f: impl Fn(f64) -> Result<f64>, x: f64) -> Result<f64> {
    let h = XI_STEP;
    let x0 = x.max(h);
    Ok((f(x0 + h)? - 2.0 * f(x0)? + f(x0 - h)?) / (h * h))
}

pub fn xi_prime(alpha: f64, v: f64, q: &QuadratureSpec) -> Result<f64> {
    diff1(|a| xi(a, v, q), alpha)
}

pub fn xi_second(alpha: f64, v: f64, q: &QuadratureSpec) -> Result<f64> {
    diff2(|a| xi(a, v, q), alpha)
}

/// `(A'(α), 2α m'(α))` by differences; the two agree on area-stationary spheres.
pub fn stationarity(alpha: f64, q: &QuadratureSpec) -> Result<(f64, f64)> {
    let da = diff1(|a| Ok(sphere_data(a, q)?.0.value), alpha)?;
    let dm = diff1(|a| Ok(sphere_data(a, q)?.1.value), alpha)?;
    Ok((da, 2.0 * alpha * dm))
}

/// Minimizer of `ξ(·)` on `[lo, hi]`, located by bisection on the sign of `ξ'`.
pub fn xi_argmin(v: f64, lo: f64, hi: f64, q: &QuadratureSpec) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (xi_prime(a, v, q)?, xi_prime(b, v, q)?);
    if !(fa < 0.0 && fb > 0.0) {
        return Err(Error::NoConvergence {
            what: "sign change of xi'",
            achieved: fa.max(-fb),
        });
    }
    while b - a > 1e-10 {
        let m = 0.5 * (a + b);
        if xi_prime(m, v, q)? < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Everything the comparison produces for one trial set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub id: String,
    pub lambda_tube: f64,
    pub volume: Estimate,
    /// `min(V, V(S³) − V)`.
    pub reduced_volume: f64,
    pub area: Estimate,
    pub mu: f64,
    pub sphere_area_mu: Estimate,
    /// `A(∂Ω) − A(Σ_μ)`.
    pub slack: f64,
    pub slack_error: f64,
    /// `A(∂Ω) − 2λV(Ω) − (A(Σ_λ) − 2λ m(λ))` for `λ = λ_tube`.
    pub penalized_slack: f64,
    /// `ξ(λ_tube)` at the reduced volume.
    pub xi_tube: f64,
}

impl Comparison {
    /// The chain `A(∂Ω) ≥ ξ(λ) ≥ ξ(μ) = A(Σ_μ)`, each link within `tol`.
    pub fn chain_holds(&self, tol: f64) -> bool {
        self.area.value >= self.xi_tube - tol && self.xi_tube >= self.sphere_area_mu.value - tol
    }
}

pub fn compare(set: &TrialSet, q: &QuadratureSpec) -> Result<Comparison> {
    set.check_hypotheses()?;
    let volume = set.volume(q)?;
    let area = set.boundary_area(q)?;
    let reduced = volume.value.min(2.0 * PI * PI - volume.value);
    let mu = volume_to_mu(reduced, q)?;
    let (a_mu, _) = sphere_data(mu, q)?;
    let l = set.lambda_tube;
    let (penalized_slack, xi_tube) = if l == 0.0 {
        // both halves of ∂Ω span C₀, and each has area at least that of a half of Σ₀
        let bound = 2.0 * plateau_bound(1);
        (area.value - bound, bound)
    } else {
        let (a_l, m_l) = sphere_data(l, q)?;
        (
            area.value - 2.0 * l * volume.value - (a_l.value - 2.0 * l * m_l.value),
            xi(l, reduced, q)?,
        )
    };
    Ok(Comparison {
        id: set.id.clone(),
        lambda_tube: l,
        volume,
        reduced_volume: reduced,
        area,
        mu,
        sphere_area_mu: a_mu,
        slack: area.value - a_mu.value,
        slack_error: area.error + a_mu.error,
        penalized_slack,
        xi_tube,
    })
}

/// Sub-Riemannian area of `∂W_λ`, the Clifford torus at distance `arctan(1/λ)` from `L`.
pub fn tube_boundary_area(lambda: f64, q: &QuadratureSpec) -> Result<Estimate> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::DomainExceeded {
            what: "tube lambda",
            value: lambda,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    sr_area(&clifford_torus(omega_max(lambda)), q)
}

/// Largest mismatch between `Σ_λ` and `∂W_λ` at `n` points of `C_λ`:
/// position, `d_L` and unit normal up to sign.
pub fn equator_tangency(lambda: f64, n: usize) -> Result<f64> {
    let sphere = PansuSphere::new(lambda)?;
    let torus = clifford_torus(omega_max(lambda));
    let s = 0.5 * s_max(lambda);
    let mut worst: f64 = 0.0;
    for k in 0..n.max(1) {
        let theta = TAU * k as f64 / n.max(1) as f64;
        let p = sphere.point(theta, s);
        let c = cylindrical(&p);
        let on_torus = torus.point(c.tau, c.theta);
        let n1 = unit_normal(&sphere, theta, s)?.v;
        let n2 = unit_normal(&torus, c.tau, c.theta)?.v;
        let dn = norm(&sub(&n1, &n2)).min(norm(&add(&n1, &n2)));
        worst = worst
            .max((c.omega - omega_max(lambda)).abs())
            .max(norm(&sub(&p.to_vec(), &on_torus.to_vec())))
            .max(dn);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::horizontal_norm;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn profile_polynomial_and_derivative() {
        let p = Profile::Polynomial {
            coeffs: vec![1.0, -2.0, 3.0],
        };
        assert_eq!(p.value(2.0), 1.0 - 4.0 + 12.0);
        assert_eq!(p.derivative(2.0), -2.0 + 12.0);
        assert_eq!(Profile::constant(0.3).derivative(1.0), 0.0);
    }

    #[test]
    fn ball_volume_matches_trial_set() {
        let t = TrialSet::pansu_ball(1.0);
        t.check_hypotheses().unwrap();
        let v = t.volume(&q()).unwrap().value;
        assert!((v - ball_volume(1.0, &q()).unwrap().value).abs() < 1e-14);
    }

    #[test]
    fn ball_boundary_area_matches_sphere() {
        for &l in &[0.5, 2.0] {
            let a = TrialSet::pansu_ball(l).boundary_area(&q()).unwrap();
            let b = sphere_area(l, &q()).unwrap();
            assert!((a.value - b.value).abs() < 1e-9, "{l}: {} vs {}", a.value, b.value);
        }
    }

    #[test]
    fn ball_has_zero_slack() {
        let c = compare(&TrialSet::pansu_ball(1.0), &q()).unwrap();
        assert!((c.mu - 1.0).abs() < 1e-6);
        assert!(c.slack.abs() < 10.0 * c.slack_error.max(1e-12), "{c:?}");
        assert!(c.penalized_slack.abs() < 1e-8);
    }

    #[test]
    fn tube_of_equal_volume_loses() {
        let m = ball_volume(1.0, &q()).unwrap().value;
        let t = TrialSet::truncated_tube_with_volume(1.0, m);
        let c = compare(&t, &q()).unwrap();
        assert!((c.volume.value - m).abs() < 1e-10);
        assert!((c.mu - 1.0).abs() < 1e-6);
        assert!(c.slack > 1e-3, "{c:?}");
        assert!(c.chain_holds(1e-9));
    }

    #[test]
    fn disk_violation_is_reported() {
        let t = TrialSet::shifted_ball(1.0, 0.1);
        assert!(matches!(compare(&t, &q()), Err(Error::HypothesisViolation(_))));
        let mut wide = TrialSet::truncated_tube(1.0, 0.2);
        wide.omega_extent += 0.1;
        assert!(matches!(wide.check_hypotheses(), Err(Error::HypothesisViolation(_))));
        let mut narrow = TrialSet::truncated_tube(1.0, 0.2);
        narrow.omega_extent -= 0.1;
        assert!(matches!(narrow.check_hypotheses(), Err(Error::HypothesisViolation(_))));
        assert!(matches!(
            TrialSet::truncated_tube(1.0, 3.5).check_hypotheses(),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn presets_parse() {
        assert_eq!(TrialSet::preset("pansu-ball:1").unwrap(), TrialSet::pansu_ball(1.0));
        assert_eq!(TrialSet::preset("lens:2:0.3").unwrap(), TrialSet::lens(2.0, 0.3));
        assert!(TrialSet::preset("tube:1").is_err());
        assert!(TrialSet::preset("cube:1").is_err());
        assert!(TrialSet::preset("tube-volume:1").is_ok());
    }

    #[test]
    fn xi_at_matching_volume_is_sphere_area() {
        let (a, m) = sphere_data(1.5, &q()).unwrap();
        assert!((xi(1.5, m.value, &q()).unwrap() - a.value).abs() < 1e-15);
    }

    #[test]
    fn xi_prime_is_volume_gap() {
        let v = 1.0;
        for &alpha in &[0.5, 1.0, 2.0] {
            let m = sphere_data(alpha, &q()).unwrap().1.value;
            let d = xi_prime(alpha, v, &q()).unwrap();
            assert!((d - 2.0 * (v - m)).abs() < 1e-4, "{alpha}: {d}");
            assert!(xi_second(alpha, v, &q()).unwrap() > 0.0);
        }
    }

    #[test]
    fn lambda_zero_routes_through_plateau_bound() {
        let c = compare(&TrialSet::pansu_ball(0.0), &q()).unwrap();
        assert_eq!(c.mu, 0.0);
        assert!((c.area.value - PI * PI).abs() < 1e-8);
        assert!(c.penalized_slack.abs() < 1e-8);
    }

    #[test]
    fn torus_area_and_tangency() {
        for &l in &[0.5, 1.0, 3.0] {
            let r = omega_max(l).cos();
            let a = tube_boundary_area(l, &q()).unwrap().value;
            assert!((a - 4.0 * PI * PI * r * (1.0 - r * r).sqrt()).abs() < 1e-10);
            assert!(equator_tangency(l, 64).unwrap() < 1e-6);
            let t = clifford_torus(omega_max(l));
            assert!((horizontal_norm(&t, 0.7, 2.1).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!(tube_boundary_area(0.0, &q()).is_err());
    }
}
