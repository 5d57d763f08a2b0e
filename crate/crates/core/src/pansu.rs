//! Geodesics of curvature `λ` from the pole `e`, the spheres `Σ_λ` they sweep,
//! their generating curves and the enclosed balls `B_λ`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{Estimate, QuadratureSpec};
use crate::s3::{angle_difference, cylindrical, Point, Vec4};
use crate::surfaces::{sr_area, volume_revolution, Domain, ParamSurface, Region};

/// Slack accepted on `ω` beyond `arctan(1/λ)` before reporting `DomainExceeded`.
const OMEGA_SLACK: f64 = 1e-12;

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainExceeded {
            what: "lambda",
            value: lambda,
            lo: 0.0,
            hi: f64::INFINITY,
        })
    }
}

/// `√(1 + λ²)`
fn b_of(lambda: f64) -> f64 {
    lambda.hypot(1.0)
}

/// Length of every generating geodesic, `π / √(1 + λ²)`.
pub fn s_max(lambda: f64) -> f64 {
    PI / b_of(lambda)
}

/// `τ` coordinate of the north pole, `π(1 − λ/√(1+λ²))`.
pub fn tau_lambda(lambda: f64) -> f64 {
    PI * (1.0 - lambda / b_of(lambda))
}

/// Radius `arctan(1/λ)` of the solid tube `W_λ`; `π/2` for `λ = 0`.
pub fn omega_max(lambda: f64) -> f64 {
    if lambda == 0.0 {
        FRAC_PI_2
    } else {
        (1.0 / lambda).atan()
    }
}

/// The north pole `e^λ = (cos τ_λ, sin τ_λ, 0, 0)`.
pub fn north_pole(lambda: f64) -> Point {
    let t = tau_lambda(lambda);
    Point::new(t.cos(), t.sin(), 0.0, 0.0)
}

/// `γ_θ(s)`: the horizontal geodesic of curvature `λ` leaving `e` with
/// velocity `cos θ E₁ + sin θ E₂`.
pub fn geodesic(lambda: f64, theta: f64, s: f64) -> Point {
    Point::from_vec(geodesic_vec(lambda, theta, s))
}

fn geodesic_vec(lambda: f64, theta: f64, s: f64) -> Vec4 {
    let (a, b) = (lambda, b_of(lambda));
    let (sa, ca) = (a * s).sin_cos();
    let (sb, cb) = (b * s).sin_cos();
    let (sp, cp) = (theta - a * s).sin_cos();
    let r = a / b;
    [
        ca * cb + r * sa * sb,
        -sa * cb + r * ca * sb,
        sb * cp / b,
        sb * sp / b,
    ]
}

/// `∂γ/∂s`, the unit horizontal velocity.
pub fn geodesic_velocity(lambda: f64, theta: f64, s: f64) -> Vec4 {
    let (a, b) = (lambda, b_of(lambda));
    let (sa, ca) = (a * s).sin_cos();
    let (sb, cb) = (b * s).sin_cos();
    let (sp, cp) = (theta - a * s).sin_cos();
    let r = a / b;
    [
        -ca * sb / b,
        sa * sb / b,
        cb * cp + r * sb * sp,
        cb * sp - r * sb * cp,
    ]
}

/// `∂γ/∂θ`.
pub fn geodesic_theta_derivative(lambda: f64, theta: f64, s: f64) -> Vec4 {
    let b = b_of(lambda);
    let sb = (b * s).sin();
    let (sp, cp) = (theta - lambda * s).sin_cos();
    [0.0, 0.0, -sb * sp / b, sb * cp / b]
}

/// `ρ_λ(ω) = arccos(λ tan ω) − (λ/√(1+λ²)) arccos(√(1+λ²) sin ω)`.
pub fn rho(lambda: f64, omega: f64) -> Result<f64> {
    let w = checked_omega(lambda, omega)?;
    Ok(rho_unchecked(lambda, w))
}

fn rho_unchecked(lambda: f64, omega: f64) -> f64 {
    let b = b_of(lambda);
    let (so, co) = omega.sin_cos();
    let delta = (omega_max(lambda) - omega).max(0.0);
    // both arccos arguments reach 1 at the tube radius; write them as atan2
    // of factored complements so the endpoint value is exact
    let c1 = (b * delta.sin() * (co + lambda * so)).max(0.0).sqrt();
    let first = c1.atan2(lambda * so);
    let gap = 2.0 * b * (0.5 * (omega_max(lambda) + omega)).cos() * (0.5 * delta).sin();
    let c2 = (gap.max(0.0) * (1.0 + b * so)).sqrt();
    let second = c2.atan2(b * so);
    first - lambda / b * second
}

/// `√(1 − λ² tan² ω)`, evaluated without cancellation near the tube radius.
pub fn tube_defect(lambda: f64, omega: f64) -> f64 {
    let b = b_of(lambda);
    let (so, co) = omega.sin_cos();
    let delta = (omega_max(lambda) - omega).max(0.0);
    (b * delta.sin() * (co + lambda * so)).max(0.0).sqrt() / co
}

/// `μ_λ(ω) = τ_λ/2 − ρ_λ(ω)`, the lower branch of the generating curve.
pub fn mu(lambda: f64, omega: f64) -> Result<f64> {
    Ok(0.5 * tau_lambda(lambda) - rho(lambda, omega)?)
}

/// `ρ_λ'(ω) = −λ tan²ω / √(1 − λ² tan²ω)`; infinite at the tube boundary for `λ > 0`.
pub fn rho_prime(lambda: f64, omega: f64) -> Result<f64> {
    let w = checked_omega(lambda, omega)?;
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let t = w.tan();
    Ok(-lambda * t * t / tube_defect(lambda, w))
}

/// `μ_λ'(ω) = −ρ_λ'(ω)`.
pub fn mu_prime(lambda: f64, omega: f64) -> Result<f64> {
    Ok(-rho_prime(lambda, omega)?)
}

fn checked_omega(lambda: f64, omega: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let hi = omega_max(lambda);
    if !(omega >= -OMEGA_SLACK && omega <= hi + OMEGA_SLACK) {
        return Err(Error::DomainExceeded {
            what: "omega",
            value: omega,
            lo: 0.0,
            hi,
        });
    }
    Ok(omega.clamp(0.0, hi))
}

/// `Σ_λ` parametrized by `(θ, s) ∈ [0, 2π] × [0, s_max]`.
///
/// The frame-determinant normal of this chart is the outer one; the sphere
/// reports orientation `−1` so that `N` points into `B_λ`, giving
/// `ν_h = −J(γ̇)`, `Z = γ̇` and `div_Σ ν_h = −2λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PansuSphere {
    pub lambda: f64,
    pub s_max: f64,
}

impl PansuSphere {
    pub fn new(lambda: f64) -> Result<PansuSphere> {
        check_lambda(lambda)?;
        Ok(PansuSphere {
            lambda,
            s_max: s_max(lambda),
        })
    }

    /// The closed half `{s ≤ s_max / 2}` containing the south pole.
    pub fn lower_half(lambda: f64) -> Result<HalfSphere> {
        let s = PansuSphere::new(lambda)?;
        Ok(HalfSphere {
            sphere: s,
            s: (0.0, 0.5 * s.s_max),
        })
    }

    /// The closed half `{s ≥ s_max / 2}` containing the north pole.
    pub fn upper_half(lambda: f64) -> Result<HalfSphere> {
        let s = PansuSphere::new(lambda)?;
        Ok(HalfSphere {
            sphere: s,
            s: (0.5 * s.s_max, s.s_max),
        })
    }
}

pub fn sphere_surface(lambda: f64) -> Result<PansuSphere> {
    PansuSphere::new(lambda)
}

impl ParamSurface for PansuSphere {
    fn domain(&self) -> Domain {
        Domain::new((0.0, TAU), (0.0, self.s_max))
    }
    fn point(&self, theta: f64, s: f64) -> Point {
        geodesic(self.lambda, theta, s)
    }
    fn partials(&self, theta: f64, s: f64) -> (Vec4, Vec4) {
        (
            geodesic_theta_derivative(self.lambda, theta, s),
            geodesic_velocity(self.lambda, theta, s),
        )
    }
    fn orientation(&self) -> f64 {
        -1.0
    }
}

/// A sub-range of `s` on a Pansu sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSphere {
    pub sphere: PansuSphere,
    pub s: (f64, f64),
}

impl ParamSurface for HalfSphere {
    fn domain(&self) -> Domain {
        Domain::new((0.0, TAU), self.s)
    }
    fn point(&self, u: f64, v: f64) -> Point {
        self.sphere.point(u, v)
    }
    fn partials(&self, u: f64, v: f64) -> (Vec4, Vec4) {
        self.sphere.partials(u, v)
    }
    fn orientation(&self) -> f64 {
        self.sphere.orientation()
    }
}

/// `A(Σ_λ)` by quadrature.
pub fn sphere_area(lambda: f64, q: &QuadratureSpec) -> Result<Estimate> {
    sr_area(&PansuSphere::new(lambda)?, q)
}

/// `m(λ) = V(B_λ)`, the volume between the two graph branches
/// `μ_λ(ω) ≤ τ ≤ τ_λ − μ_λ(ω)`. At `λ = 0` this is the half-sphere `0 ≤ τ ≤ π`.
pub fn ball_volume(lambda: f64, q: &QuadratureSpec) -> Result<Estimate> {
    check_lambda(lambda)?;
    volume_revolution(&ball_region(lambda), q)
}

/// Section of `B_λ` in `(ω, τ)` coordinates.
pub fn ball_region(lambda: f64) -> Region {
    let tl = tau_lambda(lambda);
    let hi = omega_max(lambda);
    Region::graph(
        (0.0, hi),
        move |w| 0.5 * tl - rho_unchecked(lambda, w.min(hi)),
        move |w| 0.5 * tl + rho_unchecked(lambda, w.min(hi)),
    )
}

/// `p ∈ B_λ`, deciding the `ω` constraint first.
pub fn ball_contains(lambda: f64, p: &Point) -> bool {
    if check_lambda(lambda).is_err() {
        return false;
    }
    let c = cylindrical(p);
    let hi = omega_max(lambda);
    if c.omega > hi + 1e-12 {
        return false;
    }
    let r = rho_unchecked(lambda, c.omega.min(hi));
    angle_difference(c.tau, 0.5 * tau_lambda(lambda)).abs() <= r + 1e-9
}

/// Cached geometry of one sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereSpec {
    pub lambda: f64,
    pub s_max: f64,
    pub tau_lambda: f64,
    pub omega_max: f64,
    pub north: Point,
    pub area: Estimate,
    pub volume: Estimate,
}

impl SphereSpec {
    pub fn new(lambda: f64, q: &QuadratureSpec) -> Result<SphereSpec> {
        check_lambda(lambda)?;
        Ok(SphereSpec {
            lambda,
            s_max: s_max(lambda),
            tau_lambda: tau_lambda(lambda),
            omega_max: omega_max(lambda),
            north: north_pole(lambda),
            area: sphere_area(lambda, q)?,
            volume: ball_volume(lambda, q)?,
        })
    }
}

/// Lower end of the bisection bracket for `μ`.
pub const PROFILE_LAMBDA_MIN: f64 = 1e-6;
/// Upper end of the bisection bracket for `μ`.
pub const PROFILE_LAMBDA_MAX: f64 = 1e3;
const PROFILE_POINTS: usize = 181;

/// Tabulated `m(λ)` on a logarithmic grid, used to bracket `m⁻¹`.
#[derive(Debug, Clone)]
pub struct VolumeProfile {
    q: QuadratureSpec,
    table: Vec<(f64, f64)>,
}

impl VolumeProfile {
    pub fn new(q: &QuadratureSpec) -> Result<VolumeProfile> {
        let (l0, l1) = (PROFILE_LAMBDA_MIN.ln(), PROFILE_LAMBDA_MAX.ln());
        let mut table = Vec::with_capacity(PROFILE_POINTS);
        for k in 0..PROFILE_POINTS {
            let l = (l0 + (l1 - l0) * k as f64 / (PROFILE_POINTS - 1) as f64).exp();
            let m = ball_volume(l, q)?.value;
            if let Some(&(_, prev)) = table.last() {
                if !(m < prev) {
                    return Err(Error::NoConvergence {
                        what: "monotone volume profile",
                        achieved: m - prev,
                    });
                }
            }
            table.push((l, m));
        }
        Ok(VolumeProfile { q: *q, table })
    }

    pub fn table(&self) -> &[(f64, f64)] {
        &self.table
    }

    /// The unique `μ` with `m(μ) = V`.
    pub fn mu_for_volume(&self, v: f64) -> Result<f64> {
        if !(v > 0.0 && v < PI * PI) {
            return Err(Error::VolumeOutOfRange(v));
        }
        let first = self.table[0];
        let last = *self.table.last().expect("nonempty table");
        if v > first.1 || v < last.1 {
            return Err(Error::NoConvergence {
                what: "volume bracket",
                achieved: v,
            });
        }
        let k = self.table.partition_point(|&(_, m)| m > v);
        let (mut lo, mut hi) = if k == 0 {
            (first.0, first.0)
        } else {
            (self.table[k - 1].0, self.table[k.min(self.table.len() - 1)].0)
        };
        for _ in 0..200 {
            if hi - lo <= 1e-15 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if ball_volume(mid, &self.q)?.value > v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// `m⁻¹(V)` with the default quadrature; the table is built once.
pub fn mu_for_volume(v: f64) -> Result<f64> {
    static PROFILE: OnceLock<VolumeProfile> = OnceLock::new();
    if let Some(p) = PROFILE.get() {
        return p.mu_for_volume(v);
    }
    let p = VolumeProfile::new(&QuadratureSpec::default())?;
    PROFILE.get_or_init(|| p).mu_for_volume(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::s3::{dist, dist_l, norm, HORIZONTAL_TOL};

    #[test]
    fn geodesic_leaves_south_pole() {
        for &l in &[0.0, 0.5, 3.0] {
            for &t in &[0.0, 1.0, 4.0] {
                assert_eq!(geodesic(l, t, 0.0), Point::E);
                let v = geodesic_velocity(l, t, 0.0);
                let expected = [0.0, 0.0, t.cos(), t.sin()];
                assert!(norm(&crate::s3::sub(&v, &expected)) < 1e-15);
            }
        }
    }

    #[test]
    fn great_circle_case() {
        let p = geodesic(0.0, 0.0, FRAC_PI_2);
        assert!(dist(&p, &Point::new(0.0, 0.0, 1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn north_pole_is_theta_independent() {
        let s = PI / 2f64.sqrt();
        let expected = Point::new(-(s.cos()), s.sin(), 0.0, 0.0);
        for &t in &[0.0, 1.0, 2.0, PI] {
            let p = geodesic(1.0, t, s);
            assert!(dist(&p, &expected) < 1e-12);
            assert!(dist(&p, &north_pole(1.0)) < 1e-12);
            assert!(dist_l(&p) < 1e-12);
        }
    }

    #[test]
    fn velocity_is_unit_and_horizontal() {
        for &(l, t, s) in &[(0.7, 0.3, 0.9), (2.0, 5.0, 1.1), (0.0, 2.0, 2.5)] {
            let p = geodesic(l, t, s);
            let v = crate::s3::TangentVector {
                base: p,
                v: geodesic_velocity(l, t, s),
            };
            assert!((v.norm() - 1.0).abs() < 1e-14);
            assert!(v.vertical().abs() < HORIZONTAL_TOL);
            let h = 1e-6;
            let fd = crate::s3::scale(
                0.5 / h,
                &crate::s3::sub(&geodesic(l, t, s + h).to_vec(), &geodesic(l, t, s - h).to_vec()),
            );
            assert!(norm(&crate::s3::sub(&fd, &v.v)) < 1e-8);
        }
    }

    #[test]
    fn rho_values() {
        let r = rho(1.0, 0.0).unwrap();
        assert!((r - FRAC_PI_2 * (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-15);
        for &l in &[0.3, 1.0, 4.0] {
            assert!(rho(l, omega_max(l)).unwrap().abs() < 1e-10);
            assert!(mu(l, 0.0).unwrap().abs() < 1e-14);
            assert!((mu(l, omega_max(l)).unwrap() - 0.5 * tau_lambda(l)).abs() < 1e-10);
        }
        assert!(matches!(rho(1.0, 0.9), Err(Error::DomainExceeded { .. })));
        assert!(matches!(rho(-1.0, 0.1), Err(Error::DomainExceeded { .. })));
    }

    #[test]
    fn rho_prime_matches_difference_quotient() {
        let (l, w, h) = (1.3, 0.4, 1e-6);
        let fd = (rho(l, w + h).unwrap() - rho(l, w - h).unwrap()) / (2.0 * h);
        assert!((fd - rho_prime(l, w).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn branches_reproduce_geodesic() {
        let l = 0.8;
        let sm = s_max(l);
        for k in 1..40 {
            let s = sm * k as f64 / 40.0;
            let c = cylindrical(&geodesic(l, 0.0, s));
            let m = mu(l, c.omega).unwrap();
            let d_lo = angle_difference(c.tau, m).abs();
            let d_hi = angle_difference(c.tau, tau_lambda(l) - m).abs();
            assert!(d_lo.min(d_hi) < 1e-7, "s = {s}: {d_lo} {d_hi}");
        }
    }

    #[test]
    fn ball_membership() {
        let l = 1.0;
        assert!(ball_contains(l, &Point::E));
        assert!(ball_contains(l, &north_pole(l)));
        let far = crate::s3::from_cylindrical(&crate::s3::Cylindrical {
            omega: omega_max(l) + 0.01,
            tau: 0.5 * tau_lambda(l),
            theta: 0.0,
        });
        assert!(!ball_contains(l, &far));
        let inner = crate::s3::from_cylindrical(&crate::s3::Cylindrical {
            omega: 0.2,
            tau: 0.5 * tau_lambda(l),
            theta: 1.0,
        });
        assert!(ball_contains(l, &inner));
        let outer = crate::s3::vertical_translate(PI, &inner);
        assert!(!ball_contains(l, &outer));
    }

    #[test]
    fn zero_curvature_ball_is_half_sphere() {
        let v = ball_volume(0.0, &QuadratureSpec::default()).unwrap();
        assert!((v.value - PI * PI).abs() < 1e-10);
    }

    #[test]
    fn inverse_profile() {
        let q = QuadratureSpec::default();
        for &l in &[0.3, 1.0, 2.5] {
            let v = ball_volume(l, &q).unwrap().value;
            assert!((mu_for_volume(v).unwrap() - l).abs() < 1e-6);
        }
        assert!(matches!(mu_for_volume(PI * PI), Err(Error::VolumeOutOfRange(_))));
        assert!(matches!(mu_for_volume(0.0), Err(Error::VolumeOutOfRange(_))));
    }
}
