//! Run configuration, execution of the functionals on catalog metrics, and
//! report serialization (JSON and CSV).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::asym::{static_potentials, Model};
use crate::catalog::{build, CatalogMetric, MetricSpec};
use crate::field::{Backend, Differentiator};
use crate::invariants::{
    center_adm_with_mass, center_geometric_with_mass, hyp_mass_all, mass_adm, mass_bulk, mass_geometric, Functional,
    InvariantRequest, Ladder,
};
use crate::quad::{Conventions, MassReport, QuadratureRule, Sample};
use crate::verify::{boundary_points, codazzi_sweep, decay_report_for, decay_radii, pohozaev_sweep, static_residual};
use crate::verify::{DecayReport, ResidualReport};
use crate::{Error, Result};

pub fn version() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Both,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "both" => Ok(Format::Both),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// One experiment. Read from a JSON document; command-line flags override
/// individual fields afterwards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub metric: MetricSpec,
    /// Defaults to the model's ladder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Ladder>,
    /// Defaults to `QuadratureRule::default_for(n)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadratureRule>,
    #[serde(default)]
    pub backend: Backend,
    /// Empty means the subcommand's default set.
    #[serde(default)]
    pub functionals: Vec<Functional>,
    /// Output directory; reports go to stdout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn new(metric: MetricSpec) -> Self {
        RunConfig {
            metric,
            radii: None,
            quad: None,
            backend: Backend::Analytic,
            functionals: Vec::new(),
            out: None,
            format: Format::Json,
            seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn rule(&self) -> QuadratureRule {
        self.quad.unwrap_or_else(|| QuadratureRule::default_for(self.metric.n))
    }

    pub fn build(&self) -> Result<CatalogMetric> {
        Ok(build(&self.metric)?.with_backend(self.backend))
    }

    fn request(&self, metric: &CatalogMetric) -> Result<InvariantRequest> {
        let ladder = self.radii.unwrap_or_else(|| Ladder::default_for(metric.model));
        Ok(InvariantRequest::new(
            metric.charge_context(0),
            metric.model,
            ladder.radii(metric.model)?,
            self.rule(),
        ))
    }

    fn wants(&self, f: Functional) -> bool {
        self.functionals.is_empty() || self.functionals.contains(&f)
    }
}

/// Serialized result of one functional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub functional: String,
    pub metric: String,
    pub n: usize,
    pub params: BTreeMap<String, f64>,
    pub samples: Vec<Sample>,
    pub limit: f64,
    pub error: f64,
    pub rate: Option<f64>,
    pub running: Vec<Option<f64>>,
    pub conventions: Conventions,
    pub seed: u64,
    pub version: String,
    pub flagged: bool,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(r: MassReport, cfg: &RunConfig) -> Self {
        Report {
            functional: r.functional,
            metric: cfg.metric.name.clone(),
            n: cfg.metric.n,
            params: cfg.metric.params.clone(),
            samples: r.samples,
            limit: r.limit,
            error: r.error,
            rate: r.rate,
            running: r.running,
            conventions: r.conventions,
            seed: cfg.seed,
            version: version(),
            flagged: r.flagged,
            warnings: r.warnings,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Columns `r, value, running_extrapolant, abs_delta`, where `abs_delta`
    /// is the distance of the running extrapolant from the reported limit.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,value,running_extrapolant,abs_delta\n");
        for (k, sample) in self.samples.iter().enumerate() {
            let run = self.running.get(k).copied().flatten();
            let (a, d) = match run {
                Some(v) => (format!("{v:e}"), format!("{:e}", (v - self.limit).abs())),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(s, "{:e},{:e},{a},{d}", sample.r, sample.value);
        }
        s
    }

    /// File stem: the functional name with brackets replaced.
    pub fn stem(&self) -> String {
        self.functional.replace('[', "_").replace(']', "")
    }
}

/// `mass`: the flat mass functionals (default `mass_adm` and `mass_geometric`).
pub fn run_mass(cfg: &RunConfig) -> Result<Vec<Report>> {
    let metric = cfg.build()?;
    let req = cfg.request(&metric)?;
    let mut out = Vec::new();
    let explicit = !cfg.functionals.is_empty();
    if cfg.wants(Functional::MassAdm) {
        out.push(mass_adm(&req)?);
    }
    if cfg.wants(Functional::MassGeometric) {
        out.push(mass_geometric(&req)?);
    }
    if explicit && cfg.functionals.contains(&Functional::MassBulk) {
        out.push(mass_bulk(&req)?);
    }
    if out.is_empty() {
        return Err(Error::Config("no mass functional requested".into()));
    }
    Ok(out.into_iter().map(|r| Report::new(r, cfg)).collect())
}

/// `center`: `mass_adm` followed by every component of both center formulas.
pub fn run_center(cfg: &RunConfig) -> Result<Vec<Report>> {
    let metric = cfg.build()?;
    let req = cfg.request(&metric)?;
    let mass = mass_adm(&req)?;
    let m = mass.limit;
    let mut out = vec![mass];
    if cfg.wants(Functional::CenterAdm) {
        out.extend(center_adm_with_mass(&req, m)?);
    }
    if cfg.wants(Functional::CenterGeometric) {
        out.extend(center_geometric_with_mass(&req, m)?);
    }
    Ok(out.into_iter().map(|r| Report::new(r, cfg)).collect())
}

/// `hypmass`: every component of the charge and geometric hyperbolic forms.
pub fn run_hypmass(cfg: &RunConfig) -> Result<Vec<Report>> {
    let metric = cfg.build()?;
    let req = cfg.request(&metric)?;
    let (charge, geometric) = hyp_mass_all(&req)?;
    let mut out = Vec::new();
    if cfg.wants(Functional::HypCharge) {
        out.extend(charge);
    }
    if cfg.wants(Functional::HypGeometric) {
        out.extend(geometric);
    }
    Ok(out.into_iter().map(|r| Report::new(r, cfg)).collect())
}

pub const POHOZAEV_INSTANCES: usize = 100;
pub const CODAZZI_POINTS: usize = 50;

pub fn pohozaev_tolerance(backend: Backend) -> f64 {
    match backend {
        Backend::Analytic => 1e-8,
        Backend::Fd2 => 1e-3,
        Backend::Fd4 => 1e-5,
    }
}

/// `identities`: seeded Pohozaev sweep in the metric's dimension, Codazzi
/// residuals of the metric at boundary points, and static residuals of the
/// model's potentials on the reference metric.
pub fn run_identities(cfg: &RunConfig) -> Result<Vec<ResidualReport>> {
    let metric = cfg.build()?;
    let n = metric.n();
    let diff = Differentiator::new(cfg.backend);
    let poho = pohozaev_sweep(cfg.seed, POHOZAEV_INSTANCES, n, diff, pohozaev_tolerance(cfg.backend))?;
    let (r_min, r_max) = match metric.model {
        Model::Flat => (2.0, 50.0),
        Model::Hyperbolic => (0.5, 0.9),
    };
    let pts = boundary_points(n, CODAZZI_POINTS, r_min, r_max, cfg.seed);
    let mut codazzi = codazzi_sweep(&metric.physical, &pts, 1e-5)?;
    codazzi.seed = Some(cfg.seed);
    let statics = static_sweep(metric.model, n, cfg.seed)?;
    Ok(vec![poho, codazzi, statics])
}

/// Static residuals (tensor and boundary normal derivative) of every model
/// potential at interior and boundary points of the reference metric.
pub fn static_sweep(model: Model, n: usize, seed: u64) -> Result<ResidualReport> {
    let reference = model.reference(n);
    let (r_min, r_max, tol) = match model {
        Model::Flat => (1.0, 20.0, 1e-12),
        Model::Hyperbolic => (0.1, 0.9, 1e-8),
    };
    let mut pts = boundary_points(n, 10, r_min, r_max, seed);
    let interior: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q[n - 1] = 0.5 * p.iter().map(|v| v * v).sum::<f64>().sqrt();
            let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
            let shrink = (r_max / norm).min(1.0);
            q.iter_mut().for_each(|v| *v *= shrink);
            q
        })
        .collect();
    pts.extend(interior);
    let mut points = Vec::new();
    let mut residuals = Vec::new();
    for w in static_potentials(model, n) {
        for p in &pts {
            let s = static_residual(&reference, &w, p)?;
            points.push(p.clone());
            residuals.push(s.tensor_residual.max(s.boundary_residual.unwrap_or(0.0)));
        }
    }
    let scales = vec![1.0; residuals.len()];
    let mut r = ResidualReport::new("static", points, residuals, scales, tol);
    r.seed = Some(seed);
    Ok(r)
}

/// `decay`: the admission report of the configured metric.
pub fn run_decay(cfg: &RunConfig) -> Result<DecayReport> {
    let metric = cfg.build()?;
    decay_report_for(&metric.charge_context(0), metric.model, &decay_radii(metric.model))
}

/// Writes `reports` into `dir` as `<functional>.json` and/or `.csv`.
pub fn write_reports(reports: &[Report], dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for r in reports {
        if matches!(format, Format::Json | Format::Both) {
            let p = dir.join(format!("{}.json", r.stem()));
            std::fs::write(&p, r.to_json()? + "\n")?;
            written.push(p);
        }
        if matches!(format, Format::Csv | Format::Both) {
            let p = dir.join(format!("{}.csv", r.stem()));
            std::fs::write(&p, r.to_csv())?;
            written.push(p);
        }
    }
    Ok(written)
}
