//! Experiment configuration: defaults, JSON config file, validation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use nhm_core::model::{fibonacci_approximants, RationalApproximant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Spectrum,
    WindingSweep,
    PhaseDiagram,
    Lyapunov,
    Rotations,
    Verify,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::WindingSweep => "winding",
            ExperimentKind::PhaseDiagram => "phase-diagram",
            ExperimentKind::Lyapunov => "lyapunov",
            ExperimentKind::Rotations => "rotations",
            ExperimentKind::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproximantChoice {
    /// 0-based index into the sequence 1/2, 2/3, 3/5, 5/8, ...
    FibIndex(usize),
    Explicit {
        p: u64,
        q: u64,
    },
}

impl ApproximantChoice {
    pub fn resolve(&self) -> Result<RationalApproximant> {
        match *self {
            ApproximantChoice::FibIndex(k) => {
                let seq = fibonacci_approximants(k + 1)
                    .map_err(|e| anyhow::anyhow!("fib index {k}: {e}"))?;
                Ok(seq[k])
            }
            ApproximantChoice::Explicit { p, q } => {
                RationalApproximant::new(p, q).map_err(|e| anyhow::anyhow!("{e}"))
            }
        }
    }
}

/// Fully resolved configuration for one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub v: f64,
    pub epsilons: Vec<f64>,
    pub theta: f64,
    pub approximant: ApproximantChoice,
    pub theta_steps: usize,
    /// Curve-sampling resolution for analytic loop overlays.
    pub resolution: usize,
    /// Transfer-matrix steps for Lyapunov runs.
    pub steps: usize,
    pub phase_samples: usize,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub plot: bool,
    pub tolerance_overrides: BTreeMap<String, f64>,
    /// Verify-suite name filters (substring match); empty = all.
    pub only: Vec<String>,
}

impl ExperimentConfig {
    /// Per-kind defaults: ring sizes follow the reference figures
    /// (610 sites for spectra, 377 for winding sweeps, 233 for rotations).
    pub fn defaults(kind: ExperimentKind) -> Self {
        let (epsilons, fib_index, theta_steps) = match kind {
            ExperimentKind::Spectrum => (vec![0.1, 0.4407, 0.46, 0.5306, 0.6], 12, 128),
            ExperimentKind::WindingSweep => (default_winding_grid(), 11, 128),
            ExperimentKind::PhaseDiagram => (linspace(0.01, 0.9, 200), 11, 128),
            ExperimentKind::Lyapunov => (vec![0.1, 0.3, 0.6], 11, 128),
            ExperimentKind::Rotations => (vec![0.2], 10, 64),
            ExperimentKind::Verify => (vec![], 11, 128),
        };
        Self {
            kind,
            v: 1.0,
            epsilons,
            theta: 0.0,
            approximant: ApproximantChoice::FibIndex(fib_index),
            theta_steps,
            resolution: 1024,
            steps: 200_000,
            phase_samples: 4,
            out_dir: PathBuf::from(format!("out-{}", kind.name())),
            format: OutputFormat::Csv,
            plot: false,
            tolerance_overrides: BTreeMap::new(),
            only: Vec::new(),
        }
    }

    /// Checks positivity, non-empty grids and that the output directory is
    /// creatable and writable.
    pub fn validate(&self) -> Result<()> {
        if !(self.v >= 0.0 && self.v.is_finite()) {
            bail!("V must be finite and >= 0, got {}", self.v);
        }
        if self.kind != ExperimentKind::Verify {
            if self.epsilons.is_empty() {
                bail!("epsilon grid is empty");
            }
            for &e in &self.epsilons {
                if !(e > 0.0 && e.is_finite()) {
                    bail!("epsilon values must be finite and > 0, got {e}");
                }
            }
        }
        for (name, &tol) in &self.tolerance_overrides {
            if !(tol >= 0.0 && tol.is_finite()) {
                bail!("tolerance override {name} must be finite and >= 0, got {tol}");
            }
        }
        if self.theta_steps < 32 {
            bail!("theta_steps must be >= 32, got {}", self.theta_steps);
        }
        if self.resolution < 256 {
            bail!("resolution must be >= 256, got {}", self.resolution);
        }
        self.approximant.resolve()?;
        std::fs::create_dir_all(&self.out_dir)
            .with_context(|| format!("creating output directory {}", self.out_dir.display()))?;
        let probe = self.out_dir.join(".write-probe");
        std::fs::write(&probe, b"probe")
            .with_context(|| format!("output directory {} not writable", self.out_dir.display()))?;
        let _ = std::fs::remove_file(&probe);
        Ok(())
    }

    /// Applies a JSON config file over the defaults (flags override later).
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let file: FileConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        self.apply_partial(file);
        Ok(())
    }

    fn apply_partial(&mut self, file: FileConfig) {
        if let Some(v) = file.v {
            self.v = v;
        }
        if let Some(e) = file.epsilons {
            self.epsilons = e;
        }
        if let Some(t) = file.theta {
            self.theta = t;
        }
        if let Some(k) = file.fib_index {
            self.approximant = ApproximantChoice::FibIndex(k);
        }
        if let Some((p, q)) = file.pq {
            self.approximant = ApproximantChoice::Explicit { p, q };
        }
        if let Some(s) = file.theta_steps {
            self.theta_steps = s;
        }
        if let Some(r) = file.resolution {
            self.resolution = r;
        }
        if let Some(s) = file.steps {
            self.steps = s;
        }
        if let Some(s) = file.phase_samples {
            self.phase_samples = s;
        }
        if let Some(o) = file.out {
            self.out_dir = PathBuf::from(o);
        }
        if let Some(f) = file.format {
            self.format = f;
        }
        if let Some(p) = file.plot {
            self.plot = p;
        }
        if let Some(t) = file.tolerance_overrides {
            self.tolerance_overrides.extend(t);
        }
        if let Some(o) = file.only {
            self.only = o;
        }
    }

    /// Canonical JSON used for the manifest hash.
    pub fn canonical_json(&self) -> serde_json::Value {
        let approx = match self.approximant {
            ApproximantChoice::FibIndex(k) => serde_json::json!({ "fib_index": k }),
            ApproximantChoice::Explicit { p, q } => serde_json::json!({ "p": p, "q": q }),
        };
        serde_json::json!({
            "kind": self.kind.name(),
            "v": self.v,
            "epsilons": self.epsilons,
            "theta": self.theta,
            "approximant": approx,
            "theta_steps": self.theta_steps,
            "resolution": self.resolution,
            "steps": self.steps,
            "phase_samples": self.phase_samples,
            "format": match self.format { OutputFormat::Csv => "csv", OutputFormat::Json => "json" },
            "tolerance_overrides": self.tolerance_overrides,
            "only": self.only,
        })
    }
}

/// 30-point grid bracketing both critical couplings, avoiding their 1e-3
/// neighborhoods.
pub fn default_winding_grid() -> Vec<f64> {
    linspace(0.05, 0.8, 30)
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    v: Option<f64>,
    epsilons: Option<Vec<f64>>,
    theta: Option<f64>,
    fib_index: Option<usize>,
    pq: Option<(u64, u64)>,
    theta_steps: Option<usize>,
    resolution: Option<usize>,
    steps: Option<usize>,
    phase_samples: Option<usize>,
    out: Option<String>,
    #[serde(deserialize_with = "deserialize_format", default)]
    format: Option<OutputFormat>,
    plot: Option<bool>,
    tolerance_overrides: Option<BTreeMap<String, f64>>,
    only: Option<Vec<String>>,
}

fn deserialize_format<'de, D>(de: D) -> std::result::Result<Option<OutputFormat>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    let s = Option::<String>::deserialize(de)?;
    match s.as_deref() {
        None => Ok(None),
        Some("csv") => Ok(Some(OutputFormat::Csv)),
        Some("json") => Ok(Some(OutputFormat::Json)),
        Some(other) => Err(serde::de::Error::custom(format!(
            "format must be csv or json, got {other}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_reference_ring_sizes() {
        let s = ExperimentConfig::defaults(ExperimentKind::Spectrum);
        assert_eq!(s.approximant.resolve().unwrap().ring_size(), 610);
        let w = ExperimentConfig::defaults(ExperimentKind::WindingSweep);
        assert_eq!(w.approximant.resolve().unwrap().ring_size(), 377);
        let r = ExperimentConfig::defaults(ExperimentKind::Rotations);
        assert_eq!(r.approximant.resolve().unwrap().ring_size(), 233);
    }

    #[test]
    fn winding_grid_avoids_critical_neighborhoods() {
        let (e1, e2) = nhm_core::analytic::critical_epsilons(1.0);
        for e in default_winding_grid() {
            assert!(
                (e - e1).abs() > 1e-3 && (e - e2).abs() > 1e-3,
                "grid point {e}"
            );
        }
    }

    #[test]
    fn empty_epsilon_grid_rejected() {
        let mut c = ExperimentConfig::defaults(ExperimentKind::Spectrum);
        c.out_dir = std::env::temp_dir().join("nhm-config-test");
        c.epsilons.clear();
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_file_overrides_defaults() {
        let mut c = ExperimentConfig::defaults(ExperimentKind::Spectrum);
        let dir = std::env::temp_dir().join("nhm-config-file-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg.json");
        std::fs::write(&path, r#"{"v": 2.0, "epsilons": [0.25], "pq": [8, 13]}"#).unwrap();
        c.apply_file(&path).unwrap();
        assert_eq!(c.v, 2.0);
        assert_eq!(c.epsilons, vec![0.25]);
        assert_eq!(c.approximant.resolve().unwrap().ring_size(), 13);
    }

    #[test]
    fn unknown_config_keys_rejected() {
        let mut c = ExperimentConfig::defaults(ExperimentKind::Spectrum);
        let dir = std::env::temp_dir().join("nhm-config-unknown-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(&path, r#"{"epsilon": 0.1}"#).unwrap();
        assert!(c.apply_file(&path).is_err());
    }
}
