use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::Path;

use pansu_core::calibration::{divergence_campaign, FoliationSide, Side};
use pansu_core::isoperim::{compare, comparison_suite, TrialSet};
use pansu_core::pansu::{ball_volume, sphere_area, PansuSphere};
use pansu_core::plateau::{minimize_sigma, plateau_area, plateau_bound, AngleFunction};
use pansu_core::surfaces::singular_points;
use pansu_core::QuadratureSpec;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::report::{Check, Report};

/// Knots used for named angle-function presets.
pub const PRESET_KNOTS: usize = 64;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(pansu_core::Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

impl From<pansu_core::Error> for CliError {
    fn from(e: pansu_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `a:b:step` (inclusive), a comma list, or a single value.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let bad = |m: &str| CliError::Usage(format!("grid {s:?}: {m}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let s = s.trim();
    if s.is_empty() {
        return Err(bad("empty grid"));
    }
    let values: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step"));
        }
        let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(h > 0.0) {
            return Err(bad("step must be positive"));
        }
        if b < a {
            return Err(bad("empty grid"));
        }
        let n = ((b - a) / h + 1e-9).floor() as usize;
        (0..=n).map(|i| ((a + i as f64 * h) * 1e12).round() / 1e12).collect()
    } else {
        s.split(',').map(num).collect::<CliResult<_>>()?
    };
    if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(bad("lambda values must be finite and >= 0"));
    }
    Ok(values)
}

fn write_csv<T: Serialize>(path: Option<&Path>, rows: &[T]) -> CliResult<()> {
    if let Some(p) = path {
        let mut w = csv::Writer::from_path(p)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn quad_params(r: &mut Report, q: &QuadratureSpec) {
    r.param("quadrature", q);
}

#[derive(Debug, Serialize)]
struct SphereRow {
    lambda: f64,
    area: f64,
    area_error: f64,
    volume: f64,
    volume_error: f64,
    poles: usize,
}

/// Singular points of `Σ_λ`, looked for just inside both ends of the `s` range.
fn pole_count(lambda: f64) -> pansu_core::Result<usize> {
    Ok(singular_points(&PansuSphere::new(lambda)?, 8, 129, 1e-10).len())
}

pub fn cmd_sphere(grid: &[f64], q: &QuadratureSpec, csv: Option<&Path>) -> CliResult<Report> {
    if grid.is_empty() {
        return Err(CliError::Usage("empty grid".into()));
    }
    let mut r = Report::new("sphere");
    r.param("grid", grid);
    quad_params(&mut r, q);
    let mut rows = Vec::with_capacity(grid.len());
    for &l in grid {
        let a = sphere_area(l, q)?;
        let v = ball_volume(l, q)?;
        rows.push(SphereRow {
            lambda: l,
            area: a.value,
            area_error: a.error,
            volume: v.value,
            volume_error: v.error,
            poles: pole_count(l)?,
        });
        r.error(format!("area:{l}"), a.error);
        r.error(format!("volume:{l}"), v.error);
    }
    if let Some(row) = rows.iter().find(|row| row.lambda == 0.0) {
        r.check(Check::close("A(Sigma_0) = pi^2", PI * PI, row.area, 1e-6));
    }
    let mut sorted: Vec<&SphereRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    sorted.dedup_by(|a, b| a.lambda == b.lambda);
    let decreasing = sorted.windows(2).all(|w| w[1].volume < w[0].volume);
    r.check(Check::equal("m strictly decreasing", true, decreasing));
    for row in &rows {
        r.check(Check::equal(format!("pole count at lambda={}", row.lambda), 2, row.poles));
    }
    write_csv(csv, &rows)?;
    r.data = json!({ "rows": rows });
    Ok(r)
}

pub fn cmd_calibrate(lambdas: &[f64], samples: usize, h: f64, seed: u64) -> CliResult<Report> {
    if lambdas.is_empty() || samples == 0 {
        return Err(CliError::Usage("need at least one lambda and one sample".into()));
    }
    let mut r = Report::new("calibrate");
    r.param("lambda", lambdas);
    r.param("samples", samples);
    r.param("h", h);
    r.param("seed", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = Vec::new();
    for &l in lambdas {
        for side in [Side::Plus, Side::Minus] {
            let f = FoliationSide::new(l, side)?;
            let s = divergence_campaign(&f, samples, h, &mut rng)?;
            let tag = format!("lambda={l} side={side:?}");
            r.check(Check::close(format!("mean div X ({tag})"), -2.0 * l, s.mean, 1e-4));
            r.check(Check::below(format!("max |div X + 2 lambda| ({tag})"), 1e-4, s.max_deviation));
            r.error(format!("rms:{l}:{side:?}"), s.rms_deviation);
            stats.push(json!({ "side": format!("{side:?}"), "stats": s }));
        }
    }
    r.data = json!({ "campaigns": stats });
    Ok(r)
}

/// Where the angle function of a plateau run comes from.
#[derive(Debug, Clone)]
pub enum AngleSource {
    Preset(String),
    Knots(Vec<f64>),
}

fn angle_from(source: &AngleSource, winding: Option<i64>, seed: u64) -> CliResult<AngleFunction> {
    let a = match source {
        AngleSource::Knots(k) => AngleFunction::from_rates(0.0, k.clone())?,
        AngleSource::Preset(p) => {
            let (name, arg) = match p.split_once(':') {
                Some((n, a)) => (n, Some(a)),
                None => (p.as_str(), None),
            };
            let value = || -> CliResult<f64> {
                arg.ok_or_else(|| CliError::Usage(format!("preset {p:?} needs a parameter")))?
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("preset {p:?}: bad number")))
            };
            let k = winding.unwrap_or(1);
            match name {
                "identity" => AngleFunction::identity(0.0, PRESET_KNOTS)?,
                "constant-slope" => AngleFunction::constant_slope(value()?, PRESET_KNOTS)?,
                "sinusoidal" => AngleFunction::sinusoidal(k, value()?, 1, PRESET_KNOTS)?,
                "random" => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    AngleFunction::random(k, value()?, PRESET_KNOTS, &mut rng)?
                }
                other => return Err(CliError::Usage(format!("unknown plateau preset {other:?}"))),
            }
        }
    };
    if let Some(k) = winding {
        if a.winding() != Some(k) {
            return Err(CliError::Usage(format!(
                "angle function has total increase {:.6} rad, not winding {k}",
                a.total_increase()
            )));
        }
    }
    Ok(a)
}

pub fn cmd_plateau(
    source: &AngleSource,
    winding: Option<i64>,
    optimize: bool,
    seed: u64,
    q: &QuadratureSpec,
    csv: Option<&Path>,
) -> CliResult<Report> {
    let a = angle_from(source, winding, seed)?;
    let mut r = Report::new("plateau");
    match source {
        AngleSource::Preset(p) => r.param("preset", p),
        AngleSource::Knots(k) => r.param("knots", k),
    }
    r.param("winding", a.winding());
    r.param("optimize", optimize);
    r.param("seed", seed);
    quad_params(&mut r, q);
    let area = plateau_area(&a, (0.0, FRAC_PI_2), q)?;
    r.error("area", area.error);
    let (lo, hi) = a.rate_range();
    let mut data = json!({
        "area": area.value,
        "winding": a.winding(),
        "rate_min": lo,
        "rate_max": hi,
    });
    if let Some(k) = a.winding() {
        let bound = plateau_bound(k);
        r.check(Check::at_least("area >= |k| pi^2 / 2", bound, area.value, 1e-8));
        if a.max_rate_deviation(k as f64) < 1e-12 {
            r.check(Check::close("area = k pi^2 / 2 for constant sigma'", bound, area.value, 1e-6));
        }
        if optimize {
            let m = minimize_sigma(k, a.rates(), q)?;
            r.check(Check::close("optimizer area", bound, m.area.value, 1e-6));
            r.check(Check::below("optimizer max |sigma' - k|", 1e-4, m.angle.max_rate_deviation(k as f64)));
            r.error("optimizer area", m.area.error);
            data["optimizer"] = json!({ "area": m.area.value, "iterations": m.iterations });
            write_csv(csv, &m.trace)?;
        }
    } else if optimize {
        return Err(CliError::Usage("optimization needs an integral winding".into()));
    }
    r.data = data;
    Ok(r)
}

#[derive(Debug, Serialize)]
struct IsoRow {
    set_id: String,
    volume: f64,
    area: f64,
    mu: f64,
    sphere_area_mu: f64,
    slack: f64,
}

pub fn cmd_isoperim(sets: &[TrialSet], q: &QuadratureSpec, csv: Option<&Path>) -> CliResult<Report> {
    if sets.is_empty() {
        return Err(CliError::Usage("no trial sets".into()));
    }
    let mut r = Report::new("isoperim");
    r.param("presets", sets.iter().map(|s| s.id.as_str()).collect::<Vec<_>>());
    quad_params(&mut r, q);
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for s in sets {
        let c = compare(s, q)?;
        let tol = 10.0 * c.slack_error + 1e-12;
        if s.id.starts_with("pansu-ball:") {
            r.check(Check::close(format!("slack = 0 ({})", c.id), 0.0, c.slack, tol));
            r.check(Check::close(format!("mu = lambda ({})", c.id), s.lambda_tube, c.mu, 1e-6));
        } else {
            r.check(Check::at_least(format!("slack >= 0 ({})", c.id), 0.0, c.slack, tol));
        }
        r.check(Check::equal(format!("A >= xi(lambda) >= A(Sigma_mu) ({})", c.id), true, c.chain_holds(tol)));
        r.error(format!("slack:{}", c.id), c.slack_error);
        rows.push(IsoRow {
            set_id: c.id.clone(),
            volume: c.volume.value,
            area: c.area.value,
            mu: c.mu,
            sphere_area_mu: c.sphere_area_mu.value,
            slack: c.slack,
        });
        results.push(c);
    }
    write_csv(csv, &rows)?;
    r.data = json!({ "comparisons": results });
    Ok(r)
}

pub fn parse_presets(presets: &[String]) -> CliResult<Vec<TrialSet>> {
    presets
        .iter()
        .map(|p| TrialSet::preset(p).map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

/// Every campaign at its default settings.
pub fn cmd_all(seed: u64, q: &QuadratureSpec) -> CliResult<Report> {
    let mut r = Report::new("all");
    r.param("seed", seed);
    quad_params(&mut r, q);
    r.nest(cmd_sphere(&parse_grid("0:5:0.25")?, q, None)?);
    r.nest(cmd_calibrate(&[0.0, 0.5, 1.0, 2.0], 1000, 1e-4, seed)?);
    r.nest(cmd_plateau(&AngleSource::Preset("identity".into()), Some(1), true, seed, q, None)?);
    let mut sets: Vec<TrialSet> = [0.5, 1.0, 2.0].iter().map(|&l| TrialSet::pansu_ball(l)).collect();
    sets.extend(comparison_suite(1.0, q)?);
    r.nest(cmd_isoperim(&sets, q, None)?);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("1").unwrap(), vec![1.0]);
        assert_eq!(parse_grid("0.5, 2").unwrap(), vec![0.5, 2.0]);
        assert_eq!(parse_grid("0:0.3:0.1").unwrap().len(), 4);
        for bad in ["", "1:0:0.5", "0:1:0", "a", "0:1", "-1"] {
            assert!(parse_grid(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn poles_are_found() {
        for l in [0.0, 1.0, 3.0] {
            assert_eq!(pole_count(l).unwrap(), 2);
        }
    }

    #[test]
    fn winding_mismatch_is_usage_error() {
        let src = AngleSource::Preset("identity".into());
        assert!(matches!(angle_from(&src, Some(2), 0), Err(CliError::Usage(_))));
        assert!(angle_from(&src, Some(1), 0).is_ok());
    }
}
