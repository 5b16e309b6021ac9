//! JSON run configuration and its validation against the
//! metric/family/estimator compatibility rules.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use quasimass::analysis::{DecayModel, SweepConfig};
use quasimass::mass::{check_compatibility, Estimator, ReportOptions};
use quasimass::quadrature::build_grid;
use quasimass::surface::{FamilyKind, SurfaceFamily};
use quasimass::{Chart, MetricSpec, Precision};

use crate::failure::{CliResult, Failure};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub metric: MetricConfig,
    pub family: FamilyConfig,
    pub rho: Vec<f64>,
    pub grid: GridConfig,
    /// Estimator names; `"all"` expands to every estimator of the chart.
    pub estimators: Vec<String>,
    #[serde(default)]
    pub decay_model: Option<DecayModel>,
    #[serde(default)]
    pub precision: Precision,
    /// Report embedding estimators as skipped on non-round surfaces.
    #[serde(default)]
    pub skip_not_round: bool,
    pub output: OutputConfig,
    #[serde(default)]
    pub expect: Vec<Expectation>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub name: String,
    pub n: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub kind: FamilyKind,
    #[serde(default, alias = "amplitude")]
    pub perturbation: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub resolution: usize,
    /// Per-radius resolutions, one per `rho` entry.
    #[serde(default)]
    pub schedule: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

fn all_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json, Format::Svg]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    #[serde(default = "all_formats")]
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LimitMethod {
    #[default]
    Richardson,
    Fit,
}

/// Acceptance band on an extrapolated sweep limit.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub estimator: String,
    pub limit: f64,
    pub tol: f64,
    #[serde(default)]
    pub method: LimitMethod,
    /// Leading exponent for Richardson; defaults to `n − 2` (power law) or
    /// `n` (exponential).
    #[serde(default)]
    pub exponent: Option<f64>,
}

/// A configuration that passed validation.
#[derive(Debug, Clone)]
pub struct Run {
    pub spec: MetricSpec,
    pub family: SurfaceFamily,
    pub chart: Chart,
    pub rhos: Vec<f64>,
    pub resolution: usize,
    pub schedule: Option<Vec<usize>>,
    pub estimators: Vec<Estimator>,
    pub decay: DecayModel,
    pub options: ReportOptions,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    pub expect: Vec<Expectation>,
}

impl Run {
    pub fn sweep_config(&self) -> SweepConfig {
        let mut cfg = SweepConfig::new(self.rhos.clone(), self.resolution, self.estimators.clone(), self.decay);
        cfg.schedule = self.schedule.clone();
        cfg.options = self.options;
        cfg
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn columns(&self) -> Vec<String> {
        self.estimators.iter().flat_map(|e| e.columns(self.spec.n)).collect()
    }
}

pub fn load(path: &Path, out_override: Option<&Path>) -> CliResult<Run> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg: RunConfig =
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    validate(cfg, out_override)
}

pub fn validate(cfg: RunConfig, out_override: Option<&Path>) -> CliResult<Run> {
    let config_err = |e: &quasimass::Error| Failure::from_core("", e);
    let spec = MetricSpec {
        name: cfg.metric.name,
        n: cfg.metric.n,
        params: cfg.metric.params,
    };
    spec.validate().map_err(|e| config_err(&e))?;
    let chart = spec.chart().map_err(|e| config_err(&e))?;
    let family = SurfaceFamily {
        kind: cfg.family.kind,
        amplitude: cfg.family.perturbation,
    };
    if !family.amplitude.is_finite() {
        return Err(Failure::Config("family perturbation must be finite".into()));
    }
    family.check_chart(chart).map_err(|e| config_err(&e))?;

    let mut estimators = Vec::new();
    for name in &cfg.estimators {
        if name == "all" {
            estimators.extend(Estimator::all_for(chart, spec.n));
        } else {
            estimators.extend(Estimator::parse(name, spec.n).map_err(|e| config_err(&e))?);
        }
    }
    if estimators.is_empty() {
        return Err(Failure::Config("no estimators requested".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    estimators.retain(|e| seen.insert(*e));
    check_compatibility(&spec, &family, &estimators).map_err(|e| config_err(&e))?;

    if cfg.rho.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Failure::Config("rho values must be finite and positive".into()));
    }
    let decay = cfg.decay_model.unwrap_or(match chart {
        Chart::CartesianAF => DecayModel::PowerLaw,
        Chart::BallAH => DecayModel::Exponential,
    });
    let mut resolutions = vec![cfg.grid.resolution];
    resolutions.extend(cfg.grid.schedule.iter().flatten().copied());
    for res in resolutions {
        build_grid(spec.n, res).map_err(|e| config_err(&e))?;
    }
    let run = Run {
        spec,
        family,
        chart,
        rhos: cfg.rho,
        resolution: cfg.grid.resolution,
        schedule: cfg.grid.schedule,
        estimators,
        decay,
        options: ReportOptions {
            precision: cfg.precision,
            skip_not_round: cfg.skip_not_round,
        },
        out_dir: out_override.map_or(cfg.output.dir, Path::to_path_buf),
        formats: cfg.output.formats,
        expect: cfg.expect,
    };
    run.sweep_config().validate().map_err(|e| config_err(&e))?;
    let columns = run.columns();
    for ex in &run.expect {
        if !columns.contains(&ex.estimator) {
            return Err(Failure::Config(format!(
                "expect refers to `{}`, which is not among the requested columns",
                ex.estimator
            )));
        }
        if !(ex.tol >= 0.0) || !ex.limit.is_finite() {
            return Err(Failure::Config(format!("expect on `{}` needs finite limit and tol >= 0", ex.estimator)));
        }
        if let Some(p) = ex.exponent {
            if !(p > 0.0) {
                return Err(Failure::Config(format!("expect exponent must be > 0, got {p}")));
            }
        }
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> CliResult<Run> {
        let cfg: RunConfig = serde_json::from_str(json).map_err(|e| Failure::Config(e.to_string()))?;
        validate(cfg, None)
    }

    const BASE: &str = r#"{
        "metric": {"name": "schwarzschild_isotropic", "n": 3, "params": {"m": 1}},
        "family": {"kind": "coordinate_sphere"},
        "rho": [50, 100, 200, 400],
        "grid": {"resolution": 16},
        "estimators": ["adm_flux", "hawking_af"],
        "output": {"dir": "out"}
    }"#;

    #[test]
    fn defaults_follow_the_chart() {
        let run = parse(BASE).unwrap();
        assert_eq!(run.decay, DecayModel::PowerLaw);
        assert_eq!(run.formats, all_formats());
        assert_eq!(run.columns(), vec!["adm_flux", "hawking_af"]);
    }

    #[test]
    fn indexed_estimators_expand() {
        let json = r#"{
            "metric": {"name": "ads_schwarzschild", "n": 3, "params": {"m": 1}},
            "family": {"kind": "geodesic_sphere"},
            "rho": [4], "grid": {"resolution": 16},
            "estimators": ["ch_mass", "by_vector_ah", "ch_mass[0]"],
            "output": {"dir": "out", "formats": ["csv"]}
        }"#;
        let run = parse(json).unwrap();
        assert_eq!(run.decay, DecayModel::Exponential);
        assert_eq!(run.columns().len(), 4 + 4);
    }

    #[test]
    fn incompatible_requests_are_config_errors() {
        let cases = [
            BASE.replace("\"adm_flux\"", "\"by_ah\""),
            BASE.replace("coordinate_sphere", "geodesic_sphere"),
            BASE.replace("schwarzschild_isotropic", "kerr"),
            BASE.replace("[50, 100, 200, 400]", "[100, 50]"),
            BASE.replace("\"resolution\": 16", "\"resolution\": 2"),
            BASE.replace("\"m\": 1", "\"mass\": 1"),
            BASE.replace("\"output\"", "\"bogus\": 1, \"output\""),
        ];
        for json in cases {
            let err = parse(&json).unwrap_err();
            assert_eq!(err.code(), 2, "{json}: {err}");
        }
    }

    #[test]
    fn expectation_must_name_a_column() {
        let json = BASE.replace(
            "\"output\"",
            r#""expect": [{"estimator": "ricci_af", "limit": 1, "tol": 1e-3}], "output""#,
        );
        assert_eq!(parse(&json).unwrap_err().code(), 2);
    }
}
