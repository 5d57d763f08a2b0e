//! Foliations of the solid tube `W_λ` by vertical translates of a half-sphere,
//! the unit horizontal calibration fields they carry, and finite-difference
//! divergence.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pansu::{mu, omega_max, tau_lambda, tube_defect};
use crate::s3::{
    canonical_angle, cylindrical, dist_l, dot, frame, from_cylindrical, norm, rot_j_unchecked, scale, sub,
    Cylindrical, Point, TangentVector,
};

/// Distance to `L` below which a point counts as on the axis.
pub const AXIS_TOL: f64 = 1e-8;
/// Slack allowed beyond the tube radius.
pub const TUBE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// The foliation `{φ_t(Σ_λ^±)}` of `W_λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoliationSide {
    pub lambda: f64,
    pub side: Side,
}

impl FoliationSide {
    pub fn new(lambda: f64, side: Side) -> Result<FoliationSide> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::DomainExceeded {
                what: "lambda",
                value: lambda,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(FoliationSide { lambda, side })
    }

    pub fn plus(lambda: f64) -> Result<FoliationSide> {
        FoliationSide::new(lambda, Side::Plus)
    }

    pub fn minus(lambda: f64) -> Result<FoliationSide> {
        FoliationSide::new(lambda, Side::Minus)
    }

    pub fn omega_max(&self) -> f64 {
        omega_max(self.lambda)
    }

    /// Generating curve `τ = g(ω)` of the `t = 0` leaf.
    pub fn branch(&self, omega: f64) -> Result<f64> {
        let m = mu(self.lambda, omega)?;
        Ok(match self.side {
            Side::Plus => m,
            Side::Minus => tau_lambda(self.lambda) - m,
        })
    }

    /// Checks membership in `W_λ − L` (and away from `C₀` when `λ = 0`); returns `d_L`.
    pub fn check_domain(&self, p: &Point) -> Result<f64> {
        let w = dist_l(p);
        if w < AXIS_TOL {
            return Err(Error::OnAxis(w));
        }
        if self.lambda == 0.0 {
            if w > FRAC_PI_2 - AXIS_TOL {
                return Err(Error::OnEquator(w));
            }
        } else if w > self.omega_max() + TUBE_TOL {
            return Err(Error::OutsideTube {
                d_l: w,
                radius: self.omega_max(),
            });
        }
        Ok(w)
    }

    /// Distance to the nearest place where the field stops being smooth.
    pub fn feature_scale(&self, p: &Point) -> f64 {
        let w = dist_l(p);
        w.min(self.omega_max() - w).max(0.0)
    }
}

/// `t ∈ [0, 2π)` with `p ∈ φ_t(Σ_λ^±)`.
pub fn leaf_parameter(f: &FoliationSide, p: &Point) -> Result<f64> {
    let w = f.check_domain(p)?;
    let c = cylindrical(p);
    Ok(canonical_angle(c.tau - f.branch(w.min(f.omega_max()))?))
}

/// The point of leaf `t` with coordinates `ω, θ`.
pub fn leaf_point(f: &FoliationSide, t: f64, omega: f64, theta: f64) -> Result<Point> {
    Ok(from_cylindrical(&Cylindrical {
        omega,
        tau: f.branch(omega)? + t,
        theta,
    }))
}

/// `X_λ^±(p)`: the horizontal Gauss map of the leaf through `p`.
pub fn calibration_field(f: &FoliationSide, p: &Point) -> Result<TangentVector> {
    let w = f.check_domain(p)?;
    let lambda = f.lambda;
    let (r1, r2) = (w.cos(), w.sin());
    let (u1, u2) = ((p.x1 / r1, p.y1 / r1), (p.x2 / r2, p.y2 / r2));
    let tan2 = (r2 / r1).powi(2);
    // D = sqrt(1 − λ² tan² ω) and G = D g'(ω) stay bounded up to ∂W_λ
    let d = tube_defect(lambda, w.min(f.omega_max()));
    let g = f.side.sign() * lambda * tan2;
    // D ∂ω and ∂θ of the leaf, both as ambient vectors at p
    let a = (-r2 * d, r1 * g);
    let d_omega = [
        a.0 * u1.0 - a.1 * u1.1,
        a.0 * u1.1 + a.1 * u1.0,
        r1 * d * u2.0,
        r1 * d * u2.1,
    ];
    let d_theta = [0.0, 0.0, -r2 * u2.1, r2 * u2.0];
    let z = crate::s3::axpy(&scale(r2 * r2, &d_omega), -r1 * r1 * g, &d_theta);
    let z = scale(f.side.sign() / norm(&z), &z);
    let x = rot_j_unchecked(&TangentVector { base: *p, v: z });
    Ok(x.neg())
}

/// Unit normal of the leaf through `p`, oriented so that its horizontal part is `X`.
pub fn leaf_normal(f: &FoliationSide, p: &Point) -> Result<TangentVector> {
    let x = calibration_field(f, p)?;
    // the leaf normal lies in span{X, T} and is orthogonal to ∂θ
    let fr = frame(p);
    let d_theta = [0.0, 0.0, -p.y2, p.x2];
    let xt = dot(&x.v, &d_theta);
    let tt = dot(&fr.t.v, &d_theta);
    // N = α X + β T with α xt + β tt = 0
    let (alpha, beta) = (tt, -xt);
    let n = crate::s3::axpy(&scale(alpha, &x.v), beta, &fr.t.v);
    let n = scale(1.0 / norm(&n), &n);
    Ok(TangentVector { base: *p, v: n })
}

/// A tangent vector field on an open subset of the 3-sphere.
pub trait VectorField {
    fn at(&self, p: &Point) -> Result<TangentVector>;

    /// Length scale on which the field varies near `p`; stencils shrink below it.
    fn feature_scale(&self, _p: &Point) -> f64 {
        f64::INFINITY
    }
}

/// The right invariant frame fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameField {
    E1,
    E2,
    T,
}

impl VectorField for FrameField {
    fn at(&self, p: &Point) -> Result<TangentVector> {
        let f = frame(p);
        Ok(match self {
            FrameField::E1 => f.e1,
            FrameField::E2 => f.e2,
            FrameField::T => f.t,
        })
    }
}

impl VectorField for FoliationSide {
    fn at(&self, p: &Point) -> Result<TangentVector> {
        calibration_field(self, p)
    }

    fn feature_scale(&self, p: &Point) -> f64 {
        FoliationSide::feature_scale(self, p)
    }
}

impl<F: Fn(&Point) -> Result<TangentVector>> VectorField for F {
    fn at(&self, p: &Point) -> Result<TangentVector> {
        self(p)
    }
}

/// `div X(p)` by central differences of the degree-0 extension of `X`
/// along `E₁, E₂, T`. The step is `h · min(1, feature_scale(p))`.
fn check_step(h: f64) -> Result<()> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::InvalidArgument(format!("finite-difference step {h} outside [1e-6, 1e-3]")));
    }
    Ok(())
}

pub fn divergence<V: VectorField + ?Sized>(field: &V, p: &Point, h: f64) -> Result<f64> {
    check_step(h)?;
    let hp = h * field.feature_scale(p).min(1.0);
    if !(hp > 0.0) {
        return Err(Error::InvalidArgument("stencil collapsed at the domain boundary".into()));
    }
    let pv = p.to_vec();
    let mut div = 0.0;
    for e in frame(p).axes() {
        let qp = Point::from_vec(crate::s3::axpy(&pv, hp, &e.v));
        let qm = Point::from_vec(crate::s3::axpy(&pv, -hp, &e.v));
        let xp = field.at(&qp)?;
        let xm = field.at(&qm)?;
        div += dot(&sub(&xp.v, &xm.v), &e.v) / (2.0 * hp);
    }
    Ok(div)
}

/// A point of `W_λ`, uniformly distributed for the Riemannian volume.
pub fn sample_tube<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Point {
    let s2 = omega_max(lambda).sin().powi(2);
    let u: f64 = rng.gen();
    let omega = (u * s2).sqrt().asin();
    from_cylindrical(&Cylindrical {
        omega,
        tau: rng.gen::<f64>() * TAU,
        theta: rng.gen::<f64>() * TAU,
    })
}

/// Draws `n` points of `W_λ` outside the `exclusion`-collar of `L`
/// (and of `C₀` when `λ = 0`); also returns how many draws were rejected.
pub fn sample_campaign_points<R: Rng + ?Sized>(
    lambda: f64,
    n: usize,
    exclusion: f64,
    rng: &mut R,
) -> (Vec<Point>, usize) {
    let mut pts = Vec::with_capacity(n);
    let mut excluded = 0;
    while pts.len() < n {
        let p = sample_tube(lambda, rng);
        let w = dist_l(&p);
        let near_equator = lambda == 0.0 && w > FRAC_PI_2 - exclusion;
        if w < exclusion || near_equator {
            excluded += 1;
        } else {
            pts.push(p);
        }
    }
    (pts, excluded)
}

/// Summary of `div X + 2λ` over a point set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceStats {
    pub lambda: f64,
    pub h: f64,
    pub samples: usize,
    pub excluded: usize,
    pub mean: f64,
    pub max_deviation: f64,
    pub rms_deviation: f64,
}

/// Divergence of `X_λ^±` at the given points against the target `−2λ`.
pub fn divergence_stats(f: &FoliationSide, points: &[Point], h: f64, excluded: usize) -> Result<DivergenceStats> {
    let target = -2.0 * f.lambda;
    let (mut sum, mut max, mut sq) = (0.0, 0.0f64, 0.0);
    for p in points {
        let d = divergence(f, p, h)?;
        sum += d;
        max = max.max((d - target).abs());
        sq += (d - target).powi(2);
    }
    let n = points.len().max(1) as f64;
    Ok(DivergenceStats {
        lambda: f.lambda,
        h,
        samples: points.len(),
        excluded,
        mean: sum / n,
        max_deviation: max,
        rms_deviation: (sq / n).sqrt(),
    })
}

/// Samples `n` points outside the `10h` collar and reports divergence statistics.
pub fn divergence_campaign<R: Rng + ?Sized>(
    f: &FoliationSide,
    n: usize,
    h: f64,
    rng: &mut R,
) -> Result<DivergenceStats> {
    // The sampler rejects the collar, so an oversized step would never finish.
    check_step(h)?;
    let (pts, excluded) = sample_campaign_points(f.lambda, n, 10.0 * h, rng);
    divergence_stats(f, &pts, h, excluded)
}
