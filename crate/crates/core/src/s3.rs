//! Quaternion model of the 3-sphere.
//!
//! A point `p = (x1, y1, x2, y2)` is the unit quaternion `x1 + i y1 + j x2 + k y2`,
//! or equivalently the pair `(z1, z2) = (x1 + i y1, x2 + i y2)` in `C^2`.
//! The right invariant fields `T = i·p`, `E1 = j·p`, `E2 = k·p` form an
//! orthonormal frame; `E1, E2` span the horizontal distribution.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::ops::Mul;

use serde::Serialize;

use crate::error::{Error, Result};

/// Ambient `R^4` vector.
pub type Vec4 = [f64; 4];

/// Tolerance for the horizontality predicate on the `T` coefficient.
pub const HORIZONTAL_TOL: f64 = 1e-10;

/// Moduli below this are treated as zero when reading off cylindrical angles.
const ANGLE_DEGENERACY: f64 = 1e-15;

pub fn dot(a: &Vec4, b: &Vec4) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

pub fn norm(a: &Vec4) -> f64 {
    dot(a, a).sqrt()
}

pub fn add(a: &Vec4, b: &Vec4) -> Vec4 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

pub fn sub(a: &Vec4, b: &Vec4) -> Vec4 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn scale(s: f64, a: &Vec4) -> Vec4 {
    [s * a[0], s * a[1], s * a[2], s * a[3]]
}

/// `a + s b`
pub fn axpy(a: &Vec4, s: f64, b: &Vec4) -> Vec4 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]]
}

/// Raw Hamilton product of two ambient 4-vectors (no renormalization).
pub fn qmul(a: &Vec4, b: &Vec4) -> Vec4 {
    let [a1, b1, c1, d1] = *a;
    let [a2, b2, c2, d2] = *b;
    [
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ]
}

/// Reduce an angle to `[0, 2π)`.
pub fn canonical_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed difference `a - b` reduced to `(-π, π]`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    let d = canonical_angle(a - b);
    if d > std::f64::consts::PI {
        d - TAU
    } else {
        d
    }
}

/// A unit quaternion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl Point {
    /// The identity `e = (1, 0, 0, 0)`, the south pole of every Pansu sphere.
    pub const E: Point = Point {
        x1: 1.0,
        y1: 0.0,
        x2: 0.0,
        y2: 0.0,
    };

    /// Builds a point from arbitrary nonzero components, projecting onto the sphere.
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Point {
        Point::from_vec([x1, y1, x2, y2])
    }

    pub fn from_vec(v: Vec4) -> Point {
        let n = norm(&v);
        Point {
            x1: v[0] / n,
            y1: v[1] / n,
            x2: v[2] / n,
            y2: v[3] / n,
        }
    }

    pub fn to_vec(&self) -> Vec4 {
        [self.x1, self.y1, self.x2, self.y2]
    }

    pub fn conj(&self) -> Point {
        Point {
            x1: self.x1,
            y1: -self.y1,
            x2: -self.x2,
            y2: -self.y2,
        }
    }

    pub fn neg(&self) -> Point {
        Point {
            x1: -self.x1,
            y1: -self.y1,
            x2: -self.x2,
            y2: -self.y2,
        }
    }

    pub fn dot(&self, other: &Point) -> f64 {
        dot(&self.to_vec(), &other.to_vec())
    }

    pub fn norm(&self) -> f64 {
        norm(&self.to_vec())
    }

    /// Squared moduli `(|z1|^2, |z2|^2)`.
    pub fn moduli_sq(&self) -> (f64, f64) {
        (
            self.x1 * self.x1 + self.y1 * self.y1,
            self.x2 * self.x2 + self.y2 * self.y2,
        )
    }

    /// Sub-Riemannian frame at this point.
    pub fn frame(&self) -> Frame {
        frame(self)
    }
}

impl Mul for Point {
    type Output = Point;

    fn mul(self, rhs: Point) -> Point {
        quat_mul(&self, &rhs)
    }
}

/// Quaternion product, renormalized onto the sphere.
pub fn quat_mul(p: &Point, q: &Point) -> Point {
    Point::from_vec(qmul(&p.to_vec(), &q.to_vec()))
}

/// Coefficients of a tangent vector in the frame `{E1, E2, T}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameCoords {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl FrameCoords {
    pub fn norm(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c).sqrt()
    }

    pub fn horizontal_norm(&self) -> f64 {
        self.a.hypot(self.b)
    }

    pub fn cross(&self, o: &FrameCoords) -> FrameCoords {
        FrameCoords {
            a: self.b * o.c - self.c * o.b,
            b: self.c * o.a - self.a * o.c,
            c: self.a * o.b - self.b * o.a,
        }
    }

    pub fn dot(&self, o: &FrameCoords) -> f64 {
        self.a * o.a + self.b * o.b + self.c * o.c
    }

    pub fn scaled(&self, s: f64) -> FrameCoords {
        FrameCoords {
            a: s * self.a,
            b: s * self.b,
            c: s * self.c,
        }
    }
}

/// A vector in `T_p S^3`, stored by its ambient components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentVector {
    pub base: Point,
    pub v: Vec4,
}

impl TangentVector {
    /// Wraps an ambient vector, removing its component along `base`.
    pub fn project(base: Point, v: Vec4) -> TangentVector {
        let p = base.to_vec();
        let along = dot(&v, &p);
        TangentVector {
            base,
            v: axpy(&v, -along, &p),
        }
    }

    pub fn norm(&self) -> f64 {
        norm(&self.v)
    }

    pub fn dot(&self, other: &TangentVector) -> f64 {
        dot(&self.v, &other.v)
    }

    pub fn scaled(&self, s: f64) -> TangentVector {
        TangentVector {
            base: self.base,
            v: scale(s, &self.v),
        }
    }

    pub fn normalized(&self) -> TangentVector {
        self.scaled(1.0 / self.norm())
    }

    pub fn neg(&self) -> TangentVector {
        self.scaled(-1.0)
    }

    pub fn coords(&self) -> FrameCoords {
        frame(&self.base).coords(&self.v)
    }

    /// Component along the Hopf field `T`.
    pub fn vertical(&self) -> f64 {
        let p = &self.base;
        let t = [-p.y1, p.x1, -p.y2, p.x2];
        dot(&self.v, &t)
    }

    pub fn is_horizontal(&self) -> bool {
        self.vertical().abs() <= HORIZONTAL_TOL * self.norm().max(1.0)
    }

    pub fn horizontal_part(&self) -> TangentVector {
        let c = self.coords();
        frame(&self.base).vector(FrameCoords { c: 0.0, ..c })
    }
}

/// Orthonormal frame `{E1, E2, T}` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub e1: TangentVector,
    pub e2: TangentVector,
    pub t: TangentVector,
}

impl Frame {
    pub fn coords(&self, v: &Vec4) -> FrameCoords {
        FrameCoords {
            a: dot(v, &self.e1.v),
            b: dot(v, &self.e2.v),
            c: dot(v, &self.t.v),
        }
    }

    pub fn vector(&self, c: FrameCoords) -> TangentVector {
        let mut v = scale(c.a, &self.e1.v);
        v = axpy(&v, c.b, &self.e2.v);
        v = axpy(&v, c.c, &self.t.v);
        TangentVector {
            base: self.e1.base,
            v,
        }
    }

    pub fn axes(&self) -> [TangentVector; 3] {
        [self.e1, self.e2, self.t]
    }
}

/// `T = i·p`, `E1 = j·p`, `E2 = k·p`.
pub fn frame(p: &Point) -> Frame {
    let Point { x1, y1, x2, y2 } = *p;
    Frame {
        t: TangentVector {
            base: *p,
            v: [-y1, x1, -y2, x2],
        },
        e1: TangentVector {
            base: *p,
            v: [-x2, y2, x1, -y1],
        },
        e2: TangentVector {
            base: *p,
            v: [-y2, -x2, y1, x1],
        },
    }
}

/// The complex structure `J` on the horizontal distribution, `J(X) = i·X`.
pub fn rot_j(v: &TangentVector) -> Result<TangentVector> {
    if !v.is_horizontal() {
        return Err(Error::HorizontalityViolation {
            vertical: v.vertical(),
        });
    }
    Ok(rot_j_unchecked(v))
}

/// Left multiplication by `i` without the horizontality check.
pub fn rot_j_unchecked(v: &TangentVector) -> TangentVector {
    TangentVector {
        base: v.base,
        v: qmul(&[0.0, 1.0, 0.0, 0.0], &v.v),
    }
}

/// Riemannian distance `arccos <p, q>`, evaluated as `2 atan2(|p - q|, |p + q|)`
/// which agrees on the sphere and keeps full precision near `0` and `π`.
pub fn dist(p: &Point, q: &Point) -> f64 {
    let (a, b) = (p.to_vec(), q.to_vec());
    2.0 * norm(&sub(&a, &b)).atan2(norm(&add(&a, &b)))
}

/// Distance `arccos |z1|` to the vertical axis `L = S^1 × {0}`.
pub fn dist_l(p: &Point) -> f64 {
    let (m1, m2) = p.moduli_sq();
    m2.sqrt().atan2(m1.sqrt())
}

/// Hopf map `p̄ · i · p`.
pub fn hopf(p: &Point) -> Point {
    let i = [0.0, 1.0, 0.0, 0.0];
    let v = qmul(&qmul(&p.conj().to_vec(), &i), &p.to_vec());
    Point::from_vec(v)
}

/// Rotation `r_θ(z1, z2) = (z1, e^{iθ} z2)` about `L`.
pub fn rotate(theta: f64, p: &Point) -> Point {
    let v = rotate_vec(theta, &p.to_vec());
    Point::from_vec(v)
}

/// Linear part of `r_θ` applied to an ambient vector.
pub fn rotate_vec(theta: f64, v: &Vec4) -> Vec4 {
    let (s, c) = theta.sin_cos();
    [v[0], v[1], c * v[2] - s * v[3], s * v[2] + c * v[3]]
}

/// Vertical translation `φ_t(p) = exp(it) · p`.
pub fn vertical_translate(t: f64, p: &Point) -> Point {
    Point::from_vec(vertical_translate_vec(t, &p.to_vec()))
}

/// Linear part of `φ_t` applied to an ambient vector.
pub fn vertical_translate_vec(t: f64, v: &Vec4) -> Vec4 {
    let (s, c) = t.sin_cos();
    qmul(&[c, s, 0.0, 0.0], v)
}

/// Cylindrical coordinates `p = (cos ω e^{iτ}, sin ω e^{iϑ})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cylindrical {
    pub omega: f64,
    pub tau: f64,
    pub theta: f64,
}

pub fn cylindrical(p: &Point) -> Cylindrical {
    let (m1, m2) = p.moduli_sq();
    let (r1, r2) = (m1.sqrt(), m2.sqrt());
    let omega = r2.atan2(r1);
    let tau = if r1 <= ANGLE_DEGENERACY {
        0.0
    } else {
        canonical_angle(p.y1.atan2(p.x1))
    };
    let theta = if r2 <= ANGLE_DEGENERACY {
        0.0
    } else {
        canonical_angle(p.y2.atan2(p.x2))
    };
    Cylindrical { omega, tau, theta }
}

/// Inverse of [`cylindrical`]; the angles may carry any winding.
pub fn from_cylindrical(c: &Cylindrical) -> Point {
    let omega = c.omega.clamp(0.0, FRAC_PI_2);
    let (so, co) = omega.sin_cos();
    let (st, ct) = c.tau.sin_cos();
    let (sh, ch) = c.theta.sin_cos();
    Point::new(co * ct, co * st, so * ch, so * sh)
}

/// The two isometry families of `(S^3, g_h)` used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Isometry {
    Rotate(f64),
    Translate(f64),
}

impl Isometry {
    pub fn apply(&self, p: &Point) -> Point {
        Point::from_vec(self.apply_vec(&p.to_vec()))
    }

    pub fn apply_vec(&self, v: &Vec4) -> Vec4 {
        match *self {
            Isometry::Rotate(theta) => rotate_vec(theta, v),
            Isometry::Translate(t) => vertical_translate_vec(t, v),
        }
    }

    pub fn apply_tangent(&self, v: &TangentVector) -> TangentVector {
        TangentVector {
            base: self.apply(&v.base),
            v: self.apply_vec(&v.v),
        }
    }
}

/// Coordinates of a point of `C^2 ⊃ S^3` as complex pairs (re, im).
pub fn complex_pair(p: &Point) -> ((f64, f64), (f64, f64)) {
    ((p.x1, p.y1), (p.x2, p.y2))
}
