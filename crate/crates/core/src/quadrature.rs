//! Composite tensor Gauss–Legendre quadrature with panel doubling.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};

/// Accuracy controls shared by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes per panel and axis.
    pub order: usize,
    /// Panels per axis at the coarsest level.
    pub panels: usize,
    /// Number of levels; level `l` uses `panels * 2^l` panels.
    pub max_levels: usize,
    /// Target on the difference of the last two levels, relative to `max(1, |I|)`.
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            order: 64,
            panels: 1,
            max_levels: 4,
            tol: 1e-8,
        }
    }
}

impl QuadratureSpec {
    pub fn with_panels(self, panels: usize) -> Self {
        QuadratureSpec { panels, ..self }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        QuadratureSpec { tol, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.order < 2 || self.panels == 0 || self.max_levels < 2 {
            return Err(Error::InvalidArgument(format!(
                "quadrature needs order >= 2, panels >= 1, max_levels >= 2 (got {self:?})"
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance {}", self.tol)));
        }
        Ok(())
    }
}

/// An integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Estimate {
        Estimate { value, error: 0.0 }
    }

    pub fn scaled(self, s: f64) -> Estimate {
        Estimate {
            value: s * self.value,
            error: s.abs() * self.error,
        }
    }

    pub fn plus(self, other: Estimate) -> Estimate {
        Estimate {
            value: self.value + other.value,
            error: self.error + other.error,
        }
    }
}

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> GaussLegendre {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Cached rule of the requested order.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("quadrature cache poisoned");
        map.entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
            .clone()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn composite_1d<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize, rule: &GaussLegendre) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        let mut s = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            s += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * s;
    }
    total
}

fn composite_2d<F: Fn(f64, f64) -> f64>(
    f: &F,
    u: (f64, f64),
    v: (f64, f64),
    panels: usize,
    rule: &GaussLegendre,
) -> f64 {
    let hu = (u.1 - u.0) / panels as f64;
    let hv = (v.1 - v.0) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let mu = u.0 + (i as f64 + 0.5) * hu;
        for j in 0..panels {
            let mv = v.0 + (j as f64 + 0.5) * hv;
            let mut s = 0.0;
            for (x, wx) in rule.nodes.iter().zip(&rule.weights) {
                let uu = mu + 0.5 * hu * x;
                let mut row = 0.0;
                for (y, wy) in rule.nodes.iter().zip(&rule.weights) {
                    row += wy * f(uu, mv + 0.5 * hv * y);
                }
                s += wx * row;
            }
            total += 0.25 * hu * hv * s;
        }
    }
    total
}

fn refine<G: FnMut(usize) -> f64>(q: &QuadratureSpec, what: &'static str, mut level: G) -> Result<Estimate> {
    q.validate()?;
    let mut prev = level(q.panels);
    let mut last_change = f64::INFINITY;
    for l in 1..q.max_levels {
        let cur = level(q.panels << l);
        if !cur.is_finite() {
            return Err(Error::NoConvergence {
                what,
                achieved: f64::NAN,
            });
        }
        last_change = (cur - prev).abs();
        if last_change <= q.tol * cur.abs().max(1.0) {
            let floor = 50.0 * f64::EPSILON * cur.abs();
            return Ok(Estimate {
                value: cur,
                error: last_change.max(floor),
            });
        }
        prev = cur;
    }
    Err(Error::NoConvergence {
        what,
        achieved: last_change,
    })
}

/// `∫_a^b f`.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, q: &QuadratureSpec) -> Result<Estimate> {
    let rule = GaussLegendre::cached(q.order);
    refine(q, "1d quadrature", |n| composite_1d(&f, a, b, n, &rule))
}

/// `∫_a^b f` after the smoothstep substitution `x = a + (b - a)(3t² - 2t³)`,
/// which regularizes square-root behaviour at either endpoint.
pub fn integrate_1d_graded<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, q: &QuadratureSpec) -> Result<Estimate> {
    let w = b - a;
    let g = |t: f64| {
        let x = a + w * t * t * (3.0 - 2.0 * t);
        f(x) * 6.0 * w * t * (1.0 - t)
    };
    integrate_1d(g, 0.0, 1.0, q)
}

/// `∬ f(u, v) du dv` over a rectangle.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    u: (f64, f64),
    v: (f64, f64),
    q: &QuadratureSpec,
) -> Result<Estimate> {
    let rule = GaussLegendre::cached(q.order);
    refine(q, "2d quadrature", |n| composite_2d(&f, u, v, n, &rule))
}
