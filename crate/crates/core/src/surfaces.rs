//! Parametric surfaces in the 3-sphere: normals, horizontal Gauss map,
//! sub-Riemannian area, mean curvature and volumes of rotational regions.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_1d_graded, integrate_2d, Estimate, QuadratureSpec};
use crate::s3::{
    self, axpy, dot, frame, from_cylindrical, norm, rot_j_unchecked, scale, sub, Cylindrical, FrameCoords,
    Isometry, Point, TangentVector, Vec4,
};

/// Below this value of `|N_h|` a point is treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-8;

/// Cross products shorter than this mark a rank-deficient parametrization.
const DEGENERACY_THRESHOLD: f64 = 1e-14;

/// Step of the five-point stencil used by [`fd_partials`].
const PARTIAL_STEP: f64 = 2e-4;

/// Parameter rectangle `[u0, u1] × [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

impl Domain {
    pub fn new(u: (f64, f64), v: (f64, f64)) -> Domain {
        Domain { u, v }
    }

    /// Maps `(s, t) ∈ [0,1]²` into the rectangle.
    pub fn lerp(&self, s: f64, t: f64) -> (f64, f64) {
        (
            self.u.0 + s * (self.u.1 - self.u.0),
            self.v.0 + t * (self.v.1 - self.v.0),
        )
    }
}

pub trait ParamSurface: Send + Sync {
    fn domain(&self) -> Domain;

    fn point(&self, u: f64, v: f64) -> Point;

    /// Ambient partial derivatives `(∂u F, ∂v F)`.
    fn partials(&self, u: f64, v: f64) -> (Vec4, Vec4) {
        fd_partials(self, u, v)
    }

    /// `+1` keeps the frame-determinant normal, `-1` flips it.
    fn orientation(&self) -> f64 {
        1.0
    }
}

impl<S: ParamSurface + ?Sized> ParamSurface for &S {
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn point(&self, u: f64, v: f64) -> Point {
        (**self).point(u, v)
    }
    fn partials(&self, u: f64, v: f64) -> (Vec4, Vec4) {
        (**self).partials(u, v)
    }
    fn orientation(&self) -> f64 {
        (**self).orientation()
    }
}

impl<S: ParamSurface + ?Sized> ParamSurface for Box<S> {
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn point(&self, u: f64, v: f64) -> Point {
        (**self).point(u, v)
    }
    fn partials(&self, u: f64, v: f64) -> (Vec4, Vec4) {
        (**self).partials(u, v)
    }
    fn orientation(&self) -> f64 {
        (**self).orientation()
    }
}

/// Fourth-order central differences of `point`.
pub fn fd_partials<S: ParamSurface + ?Sized>(s: &S, u: f64, v: f64) -> (Vec4, Vec4) {
    let h = PARTIAL_STEP;
    let d = |f: &dyn Fn(f64) -> Point| -> Vec4 {
        let p2 = f(2.0 * h).to_vec();
        let p1 = f(h).to_vec();
        let m1 = f(-h).to_vec();
        let m2 = f(-2.0 * h).to_vec();
        let mut out = [0.0; 4];
        for k in 0..4 {
            out[k] = (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / (12.0 * h);
        }
        out
    };
    let du = d(&|t| s.point(u + t, v));
    let dv = d(&|t| s.point(u, v + t));
    (du, dv)
}

/// Base point, frame coordinates of both partials, and the oriented cross product.
#[derive(Debug, Clone, Copy)]
pub struct LocalData {
    pub p: Point,
    pub du: FrameCoords,
    pub dv: FrameCoords,
    pub n: FrameCoords,
}

pub fn local_data<S: ParamSurface + ?Sized>(s: &S, u: f64, v: f64) -> LocalData {
    let p = s.point(u, v);
    let (du, dv) = s.partials(u, v);
    let f = frame(&p);
    let du = f.coords(&du);
    let dv = f.coords(&dv);
    let n = du.cross(&dv).scaled(s.orientation());
    LocalData { p, du, dv, n }
}

/// Unit normal inside `T_p S^3`, with `det(∂u, ∂v, N) > 0` times the surface orientation.
pub fn unit_normal<S: ParamSurface + ?Sized>(s: &S, u: f64, v: f64) -> Result<TangentVector> {
    let l = local_data(s, u, v);
    let nn = l.n.norm();
    if !(nn > DEGENERACY_THRESHOLD) {
        return Err(Error::DegenerateParametrization { u, v });
    }
    Ok(frame(&l.p).vector(l.n.scaled(1.0 / nn)))
}

/// `|N_h| = sqrt(1 - <N, T>^2)`, defined at every immersed point.
pub fn horizontal_norm<S: ParamSurface + ?Sized>(s: &S, u: f64, v: f64) -> Result<f64> {
    let l = local_data(s, u, v);
    let nn = l.n.norm();
    if !(nn > DEGENERACY_THRESHOLD) {
        return Err(Error::DegenerateParametrization { u, v });
    }
    Ok(l.n.horizontal_norm() / nn)
}

/// Horizontal Gauss map `ν_h` and `|N_h|`.
pub fn horizontal_gauss<S: ParamSurface + ?Sized>(s: &S, u: f64, v: f64) -> Result<(TangentVector, f64)> {
    let l = local_data(s, u, v);
    let nn = l.n.norm();
    if !(nn > DEGENERACY_THRESHOLD) {
        return Err(Error::DegenerateParametrization { u, v });
    }
    let h = l.n.horizontal_norm();
    let norm_nh = h / nn;
    if norm_nh < SINGULAR_THRESHOLD {
        return Err(Error::SingularPoint { norm_nh });
    }
    let nu = FrameCoords {
        a: l.n.a / h,
        b: l.n.b / h,
        c: 0.0,
    };
    Ok((frame(&l.p).vector(nu), norm_nh))
}

/// Characteristic field `Z = J(ν_h)`.
pub fn characteristic_field<S: ParamSurface + ?Sized>(s: &S, u: f64, v: f64) -> Result<TangentVector> {
    let (nu, _) = horizontal_gauss(s, u, v)?;
    Ok(rot_j_unchecked(&nu))
}

/// Integrand `|N_h| |∂u × ∂v|` of the sub-Riemannian area; zero where the chart degenerates.
pub fn sr_area_element<S: ParamSurface + ?Sized>(s: &S, u: f64, v: f64) -> f64 {
    local_data(s, u, v).n.horizontal_norm()
}

pub fn riemannian_area_element<S: ParamSurface + ?Sized>(s: &S, u: f64, v: f64) -> f64 {
    local_data(s, u, v).n.norm()
}

pub fn sr_area<S: ParamSurface + ?Sized>(s: &S, q: &QuadratureSpec) -> Result<Estimate> {
    let d = s.domain();
    integrate_2d(|u, v| sr_area_element(s, u, v), d.u, d.v, q)
}

pub fn riemannian_area<S: ParamSurface + ?Sized>(s: &S, q: &QuadratureSpec) -> Result<Estimate> {
    let d = s.domain();
    integrate_2d(|u, v| riemannian_area_element(s, u, v), d.u, d.v, q)
}

/// `div_Σ ν_h` at `(u, v)` by central differences of `ν_h` along an
/// orthonormal tangent basis, using parameter steps of ambient length `h`.
pub fn mean_curvature_check<S: ParamSurface + ?Sized>(s: &S, u: f64, v: f64, h: f64) -> Result<f64> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::InvalidArgument(format!("finite-difference step {h} outside [1e-6, 1e-3]")));
    }
    let (du, dv) = s.partials(u, v);
    let lu = norm(&du);
    if !(lu > DEGENERACY_THRESHOLD) {
        return Err(Error::DegenerateParametrization { u, v });
    }
    let e1 = scale(1.0 / lu, &du);
    let c = dot(&dv, &e1);
    let w = axpy(&dv, -c, &e1);
    let r = norm(&w);
    if !(r > DEGENERACY_THRESHOLD) {
        return Err(Error::DegenerateParametrization { u, v });
    }
    let e2 = scale(1.0 / r, &w);
    // parameter directions mapped onto e1 and e2 by the differential
    let dirs = [((1.0 / lu, 0.0), e1), ((-c / (lu * r), 1.0 / r), e2)];
    horizontal_gauss(s, u, v)?;
    let mut div = 0.0;
    for ((a, b), e) in dirs {
        let (plus, _) = horizontal_gauss(s, u + h * a, v + h * b)?;
        let (minus, _) = horizontal_gauss(s, u - h * a, v - h * b)?;
        div += dot(&sub(&plus.v, &minus.v), &e) / (2.0 * h);
    }
    Ok(div)
}

/// Singular points found on an `nu × nv` grid, clustered to within `1e-6`.
/// The `v` grid is inset by `inset` from both edges of the domain.
pub fn singular_points<S: ParamSurface + ?Sized>(s: &S, nu: usize, nv: usize, inset: f64) -> Vec<Point> {
    let d = s.domain();
    let mut found: Vec<Point> = Vec::new();
    for i in 0..nu {
        let u = d.u.0 + (d.u.1 - d.u.0) * (i as f64 + 0.5) / nu as f64;
        for j in 0..nv {
            let t = if nv == 1 { 0.5 } else { j as f64 / (nv - 1) as f64 };
            let v = (d.v.0 + inset) + t * (d.v.1 - d.v.0 - 2.0 * inset);
            if let Ok(nh) = horizontal_norm(s, u, v) {
                if nh < SINGULAR_THRESHOLD {
                    let p = s.point(u, v);
                    if !found.iter().any(|q| s3::dist(q, &p) < 1e-6) {
                        found.push(p);
                    }
                }
            }
        }
    }
    found
}

/// Value and first derivatives of a generating curve `t ↦ (ω(t), τ(t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub omega: f64,
    pub tau: f64,
    pub d_omega: f64,
    pub d_tau: f64,
}

type CurveFn = Box<dyn Fn(f64) -> CurveJet + Send + Sync>;

/// Surface obtained by rotating a generating curve about `L`:
/// `F(t, θ) = (cos ω(t) e^{iτ(t)}, sin ω(t) e^{iθ})`.
pub struct RevolutionSurface {
    t: (f64, f64),
    theta: (f64, f64),
    curve: CurveFn,
    orientation: f64,
}

impl RevolutionSurface {
    pub fn new<F>(t: (f64, f64), curve: F) -> RevolutionSurface
    where
        F: Fn(f64) -> CurveJet + Send + Sync + 'static,
    {
        RevolutionSurface {
            t,
            theta: (0.0, TAU),
            curve: Box::new(curve),
            orientation: 1.0,
        }
    }

    pub fn with_theta(mut self, theta: (f64, f64)) -> Self {
        self.theta = theta;
        self
    }

    pub fn flipped(mut self) -> Self {
        self.orientation = -self.orientation;
        self
    }

    pub fn jet(&self, t: f64) -> CurveJet {
        (self.curve)(t)
    }
}

impl ParamSurface for RevolutionSurface {
    fn domain(&self) -> Domain {
        Domain::new(self.t, self.theta)
    }

    fn point(&self, t: f64, theta: f64) -> Point {
        let j = self.jet(t);
        from_cylindrical(&Cylindrical {
            omega: j.omega,
            tau: j.tau,
            theta,
        })
    }

    fn partials(&self, t: f64, theta: f64) -> (Vec4, Vec4) {
        let j = self.jet(t);
        let (so, co) = j.omega.sin_cos();
        let (st, ct) = j.tau.sin_cos();
        let (sh, ch) = theta.sin_cos();
        let dt = [
            -j.d_omega * so * ct - j.d_tau * co * st,
            -j.d_omega * so * st + j.d_tau * co * ct,
            j.d_omega * co * ch,
            j.d_omega * co * sh,
        ];
        let dth = [0.0, 0.0, -so * sh, so * ch];
        (dt, dth)
    }

    fn orientation(&self) -> f64 {
        self.orientation
    }
}

/// Clifford torus `{d_L = ω₀}` parametrized by `(τ, θ) ∈ [0, 2π]²`.
pub fn clifford_torus(omega0: f64) -> RevolutionSurface {
    RevolutionSurface::new((0.0, TAU), move |t| CurveJet {
        omega: omega0,
        tau: t,
        d_omega: 0.0,
        d_tau: 1.0,
    })
}

/// Clifford torus of radius `ρ = cos d_L`.
pub fn clifford_torus_rho(rho: f64) -> RevolutionSurface {
    clifford_torus(rho.clamp(-1.0, 1.0).acos())
}

/// A surface given only by its point map; partials by finite differences.
pub struct FnSurface<F> {
    domain: Domain,
    f: F,
}

impl<F: Fn(f64, f64) -> Point + Send + Sync> FnSurface<F> {
    pub fn new(domain: Domain, f: F) -> Self {
        FnSurface { domain, f }
    }
}

impl<F: Fn(f64, f64) -> Point + Send + Sync> ParamSurface for FnSurface<F> {
    fn domain(&self) -> Domain {
        self.domain
    }
    fn point(&self, u: f64, v: f64) -> Point {
        (self.f)(u, v)
    }
}

/// `g ∘ F` for a sequence of isometries applied left to right.
pub struct Transformed<S> {
    pub inner: S,
    pub maps: Vec<Isometry>,
}

impl<S: ParamSurface> Transformed<S> {
    pub fn new(inner: S, maps: Vec<Isometry>) -> Self {
        Transformed { inner, maps }
    }
}

impl<S: ParamSurface> ParamSurface for Transformed<S> {
    fn domain(&self) -> Domain {
        self.inner.domain()
    }
    fn point(&self, u: f64, v: f64) -> Point {
        self.maps.iter().fold(self.inner.point(u, v), |p, m| m.apply(&p))
    }
    fn partials(&self, u: f64, v: f64) -> (Vec4, Vec4) {
        let (a, b) = self.inner.partials(u, v);
        self.maps
            .iter()
            .fold((a, b), |(a, b), m| (m.apply_vec(&a), m.apply_vec(&b)))
    }
    fn orientation(&self) -> f64 {
        self.inner.orientation()
    }
}

/// The same surface with the opposite normal.
pub struct Reversed<S>(pub S);

impl<S: ParamSurface> ParamSurface for Reversed<S> {
    fn domain(&self) -> Domain {
        self.0.domain()
    }
    fn point(&self, u: f64, v: f64) -> Point {
        self.0.point(u, v)
    }
    fn partials(&self, u: f64, v: f64) -> (Vec4, Vec4) {
        self.0.partials(u, v)
    }
    fn orientation(&self) -> f64 {
        -self.0.orientation()
    }
}

type Bound = Box<dyn Fn(f64) -> f64 + Send + Sync>;
type Indicator = Box<dyn Fn(f64, f64) -> bool + Send + Sync>;

/// A rotationally invariant region, described by its section in `(ω, τ)`.
pub enum Region {
    /// `lower(ω) ≤ τ ≤ upper(ω)` for `ω` in the given range.
    Graph {
        omega: (f64, f64),
        lower: Bound,
        upper: Bound,
    },
    /// Membership test on `(ω, τ)`, with `τ ∈ [0, 2π)`.
    Indicator {
        omega: (f64, f64),
        contains: Indicator,
        tau_samples: usize,
    },
}

impl Region {
    pub fn graph<L, U>(omega: (f64, f64), lower: L, upper: U) -> Region
    where
        L: Fn(f64) -> f64 + Send + Sync + 'static,
        U: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Region::Graph {
            omega,
            lower: Box::new(lower),
            upper: Box::new(upper),
        }
    }

    pub fn indicator<F>(omega: (f64, f64), contains: F) -> Region
    where
        F: Fn(f64, f64) -> bool + Send + Sync + 'static,
    {
        Region::Indicator {
            omega,
            contains: Box::new(contains),
            tau_samples: 512,
        }
    }

    /// The tube `x ≤ ω ≤ y` over the full `τ` circle.
    pub fn tube(x: f64, y: f64) -> Region {
        Region::graph((x, y), |_| 0.0, |_| TAU)
    }

    /// Length of the `τ` section at `ω`.
    pub fn section_length(&self, omega: f64) -> f64 {
        match self {
            Region::Graph { lower, upper, .. } => (upper(omega) - lower(omega)).max(0.0),
            Region::Indicator {
                contains,
                tau_samples,
                ..
            } => indicator_length(|t| contains(omega, t), *tau_samples),
        }
    }
}

fn indicator_length<F: Fn(f64) -> bool>(inside: F, n: usize) -> f64 {
    let n = n.max(8);
    let step = TAU / n as f64;
    let mut total = 0.0;
    let mut prev_in = inside(0.0);
    for k in 0..n {
        let a = k as f64 * step;
        let b = a + step;
        let b_in = if k + 1 == n { inside(0.0) } else { inside(b) };
        match (prev_in, b_in) {
            (true, true) => total += step,
            (false, false) => {}
            (ain, _) => {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if inside(mid) == ain {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let cut = 0.5 * (lo + hi);
                total += if ain { cut - a } else { b - cut };
            }
        }
        prev_in = b_in;
    }
    total
}

/// `V = 2π ∬ cos ω sin ω dω dτ` over the section of the region.
pub fn volume_revolution(region: &Region, q: &QuadratureSpec) -> Result<Estimate> {
    let omega = match region {
        Region::Graph { omega, .. } | Region::Indicator { omega, .. } => *omega,
    };
    if !(omega.0 >= 0.0 && omega.1 <= PI / 2.0 + 1e-12 && omega.0 <= omega.1) {
        return Err(Error::DomainExceeded {
            what: "omega range",
            value: omega.1,
            lo: 0.0,
            hi: PI / 2.0,
        });
    }
    let e = integrate_1d_graded(
        |w| w.cos() * w.sin() * region.section_length(w),
        omega.0,
        omega.1,
        q,
    )?;
    Ok(e.scaled(TAU))
}

/// Closed-form volume of the tube `x ≤ d_L ≤ y`.
pub fn tube_volume(x: f64, y: f64) -> f64 {
    2.0 * PI * PI * (y.sin().powi(2) - x.sin().powi(2))
}
