use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{RobotKind, RobotModel, State, DEFAULT_DT, DEFAULT_START, DEFAULT_STEPS};
use crate::ergopt::ErgOptConfig;
use crate::fourier::{GaussianComponent, GaussianMixture, InfoMap, SpectralBasis, DEFAULT_ORDER};
use crate::moes::{EdgeLength, SamplingMode, SlesConfig, WeightVector};
use crate::{Error, Result};

/// Everything one experiment needs. Relative paths are resolved against the
/// directory holding the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub maps: Vec<MapSource>,
    #[serde(default)]
    pub workspace: WorkspaceConfig,
    #[serde(default)]
    pub basis: BasisConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub optimizer: ErgOptConfig,
    #[serde(default)]
    pub planner: PlannerConfig,
    #[serde(default)]
    pub evaluation: EvaluationConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Where a map comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapSource {
    /// CSV grid file (`rows,cols,L1,L2` header, then the rows).
    Grid(PathBuf),
    /// JSON file holding a list of `{mean, sigma, weight}` components.
    Mixture(PathBuf),
    /// Components written inline.
    Components(Vec<GaussianComponent>),
    /// Mixture drawn from the experiment seed.
    Random(RandomMixture),
}

/// Isotropic components with uniformly drawn means, widths and weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomMixture {
    pub components: usize,
    /// Means stay this far from the workspace boundary, as a fraction of each side.
    pub margin: f64,
    pub sigma: [f64; 2],
    pub weight: [f64; 2],
}

impl Default for RandomMixture {
    fn default() -> Self {
        Self {
            components: 2,
            margin: 0.2,
            sigma: [0.09, 0.13],
            weight: [0.5, 1.0],
        }
    }
}

impl RandomMixture {
    /// Draws a mixture; `stream` separates maps that share a seed.
    pub fn sample(&self, lengths: [f64; 2], seed: u64, stream: u64) -> GaussianMixture {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let draw = |rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]| {
            if hi > lo {
                rng.gen_range(lo..hi)
            } else {
                lo
            }
        };
        let comps = (0..self.components)
            .map(|_| {
                let mean = lengths.map(|l| draw(&mut rng, [self.margin * l, (1.0 - self.margin) * l]));
                let sigma = draw(&mut rng, self.sigma);
                let weight = draw(&mut rng, self.weight);
                GaussianComponent::new(mean, sigma, weight)
            })
            .collect();
        GaussianMixture::new(comps)
    }

    fn validate(&self, field: &str) -> Result<()> {
        if self.components == 0 {
            return Err(field_error(field, "components: must be at least 1"));
        }
        if !(0.0..0.5).contains(&self.margin) {
            return Err(field_error(field, "margin: must lie in [0, 0.5)"));
        }
        if !(self.sigma[0] > 0.0 && self.sigma[1] >= self.sigma[0]) {
            return Err(field_error(field, "sigma: need 0 < low <= high"));
        }
        if !(self.weight[0] > 0.0 && self.weight[1] >= self.weight[0]) {
            return Err(field_error(field, "weight: need 0 < low <= high"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkspaceConfig {
    /// Box side lengths `[L1, L2]`.
    pub lengths: [f64; 2],
    /// Grid used to rasterize mixtures.
    pub resolution: [usize; 2],
}

impl Default for WorkspaceConfig {
    fn default() -> Self {
        Self {
            lengths: [1.0, 1.0],
            resolution: [100, 100],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasisConfig {
    /// Highest per-axis wave number `K`.
    pub order: usize,
}

impl Default for BasisConfig {
    fn default() -> Self {
        Self { order: DEFAULT_ORDER }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: RobotKind,
    pub max_speed: f64,
    pub max_turn_rate: f64,
    pub dt: f64,
    /// Control horizon `N`.
    pub steps: usize,
    pub start: State,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            kind: RobotKind::DifferentialDrive,
            max_speed: 1.0,
            max_turn_rate: 3.0,
            dt: DEFAULT_DT,
            steps: DEFAULT_STEPS,
            start: DEFAULT_START,
        }
    }
}

/// Planner selected on the command line or in the config.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Warm-started lattice search with basic sampling.
    #[default]
    Sles,
    /// Warm-started lattice search with adaptive sampling.
    Asles,
    /// Independent cold-started episodes on the basic lattice.
    Scala,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Sles => "sles",
            Mode::Asles => "asles",
            Mode::Scala => "scala",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sles" => Ok(Mode::Sles),
            "asles" => Ok(Mode::Asles),
            "scala" => Ok(Mode::Scala),
            _ => Err(Error::Config(format!("unknown mode `{s}` (expected sles, asles or scala)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub mode: Mode,
    /// Chart step `d` (sles, scala).
    pub step: f64,
    /// Transformed-simplex step `d'` (asles).
    pub adaptive_step: f64,
    pub w_init: Option<Vec<f64>>,
    /// Lattice radius limit, in steps from the anchor.
    pub radius: Option<u32>,
    pub edge: EdgeLength,
    /// Weight used by `plan` when there is more than one map.
    pub weight: Option<Vec<f64>>,
    /// Step sizes visited by `sweep`: `d` for sles and scala, `d'` for asles.
    pub sweep: Vec<f64>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        let sles = SlesConfig::default();
        Self {
            mode: Mode::default(),
            step: sles.step,
            adaptive_step: sles.adaptive_step,
            w_init: None,
            radius: None,
            edge: sles.edge,
            weight: None,
            sweep: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    /// Hypervolume reference point; all ones when absent.
    pub reference: Option<Vec<f64>>,
}

fn field_error(field: &str, msg: &str) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

impl ExperimentConfig {
    /// Reads a config and resolves its relative paths against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: Self = serde_json::from_reader(BufReader::new(file)).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        for src in &mut self.maps {
            if let MapSource::Grid(p) | MapSource::Mixture(p) = src {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        if self.output.is_relative() {
            self.output = base.join(&self.output);
        }
    }

    /// Checks parameter ranges and that every referenced file exists.
    pub fn validate(&self) -> Result<()> {
        if self.maps.is_empty() {
            return Err(field_error("maps", "at least one map source is required"));
        }
        for (i, src) in self.maps.iter().enumerate() {
            let field = format!("maps[{i}]");
            match src {
                MapSource::Grid(p) | MapSource::Mixture(p) => {
                    if !p.is_file() {
                        return Err(Error::Io {
                            path: p.clone(),
                            source: std::io::Error::new(std::io::ErrorKind::NotFound, "map file not found"),
                        });
                    }
                }
                MapSource::Components(c) => {
                    GaussianMixture::new(c.clone())
                        .validate(2)
                        .map_err(|e| field_error(&field, &e.to_string()))?;
                }
                MapSource::Random(r) => r.validate(&field)?,
            }
        }
        let ws = &self.workspace;
        if ws.lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(field_error("workspace.lengths", "must be positive"));
        }
        if ws.resolution.contains(&0) {
            return Err(field_error("workspace.resolution", "must be positive"));
        }
        if self.basis.order == 0 {
            return Err(field_error("basis.order", "must be at least 1"));
        }
        let m = &self.model;
        if m.steps == 0 {
            return Err(field_error("model.steps", "must be at least 1"));
        }
        self.robot()
            .validate()
            .map_err(|e| field_error("model", &e.to_string()))?;
        if !self.robot().contains_position([m.start[0], m.start[1]]) {
            return Err(field_error("model.start", "must lie inside the workspace"));
        }
        self.optimizer
            .validate()
            .map_err(|e| field_error("optimizer", &e.to_string()))?;
        let p = &self.planner;
        if !(p.step > 0.0 && p.step < 1.0) {
            return Err(field_error("planner.step", "must lie in (0, 1)"));
        }
        if !(p.adaptive_step > 0.0 && p.adaptive_step.is_finite()) {
            return Err(field_error("planner.adaptive_step", "must be positive"));
        }
        let n = self.maps.len();
        for (name, w) in [("planner.w_init", &p.w_init), ("planner.weight", &p.weight)] {
            if let Some(w) = w {
                if w.len() != n {
                    return Err(field_error(name, &format!("has {} entries for {n} maps", w.len())));
                }
                WeightVector::new(w.clone()).map_err(|e| field_error(name, &e.to_string()))?;
            }
        }
        if p.sweep.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(field_error("planner.sweep", "step sizes must be positive"));
        }
        if let Some(r) = &self.evaluation.reference {
            if r.len() != n {
                return Err(field_error(
                    "evaluation.reference",
                    &format!("has {} entries for {n} maps", r.len()),
                ));
            }
            if r.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(field_error("evaluation.reference", "entries must be positive"));
            }
        }
        Ok(())
    }

    pub fn robot(&self) -> RobotModel {
        let m = &self.model;
        RobotModel {
            kind: m.kind,
            max_speed: m.max_speed,
            max_turn_rate: m.max_turn_rate,
            dt: m.dt,
            workspace: self.workspace.lengths,
        }
    }

    pub fn basis(&self) -> Result<SpectralBasis> {
        let [l1, l2] = self.workspace.lengths;
        SpectralBasis::planar(l1, l2, self.basis.order)
    }

    /// Loads or generates every map. Random sources draw from the experiment seed,
    /// each on its own stream.
    pub fn load_maps(&self) -> Result<Vec<InfoMap>> {
        let ws = &self.workspace;
        self.maps
            .iter()
            .enumerate()
            .map(|(i, src)| {
                let map = match src {
                    MapSource::Grid(p) => super::io::read_grid(p)?,
                    MapSource::Mixture(p) => super::io::read_mixture(p)?.rasterize(&ws.resolution, &ws.lengths)?,
                    MapSource::Components(c) => {
                        GaussianMixture::new(c.clone()).rasterize(&ws.resolution, &ws.lengths)?
                    }
                    MapSource::Random(r) => r
                        .sample(ws.lengths, self.seed, i as u64)
                        .rasterize(&ws.resolution, &ws.lengths)?,
                };
                if map.lengths() != ws.lengths {
                    return Err(Error::Config(format!(
                        "maps[{i}]: box {:?} differs from workspace.lengths {:?}",
                        map.lengths(),
                        ws.lengths
                    )));
                }
                Ok(map)
            })
            .collect()
    }

    pub fn sles_config(&self, mode: Mode) -> Result<SlesConfig> {
        let p = &self.planner;
        Ok(SlesConfig {
            mode: if mode == Mode::Asles {
                SamplingMode::Adaptive
            } else {
                SamplingMode::Basic
            },
            step: p.step,
            adaptive_step: p.adaptive_step,
            w_init: p.w_init.clone().map(WeightVector::new).transpose()?,
            radius: p.radius,
            edge: p.edge,
        })
    }

    pub fn reference(&self) -> Vec<f64> {
        self.evaluation
            .reference
            .clone()
            .unwrap_or_else(|| vec![1.0; self.maps.len()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> ExperimentConfig {
        serde_json::from_str(r#"{"maps": [{"random": {}}]}"#).unwrap()
    }

    #[test]
    fn defaults_fill_missing_sections() {
        let cfg = minimal();
        assert_eq!(cfg.basis.order, 10);
        assert_eq!(cfg.model.steps, 100);
        assert_eq!(cfg.model.start, [0.5, 0.5, 0.0]);
        assert_eq!(cfg.optimizer.epsilon, 1e-3);
        assert_eq!(cfg.planner.mode, Mode::Sles);
        assert_eq!(cfg.reference(), vec![1.0]);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let r: std::result::Result<ExperimentConfig, _> =
            serde_json::from_str(r#"{"maps": [], "planer": {}}"#);
        assert!(r.is_err());
    }

    #[test]
    fn validation_names_the_field() {
        let mut cfg = minimal();
        cfg.planner.step = 1.5;
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("planner.step"), "{msg}");

        let mut cfg = minimal();
        cfg.planner.weight = Some(vec![0.5, 0.5]);
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("planner.weight"), "{msg}");
    }

    #[test]
    fn missing_file_reports_path() {
        let mut cfg = minimal();
        cfg.maps = vec![MapSource::Grid("/nonexistent/map.csv".into())];
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("/nonexistent/map.csv"), "{msg}");
    }

    #[test]
    fn random_maps_depend_on_seed_and_stream() {
        let r = RandomMixture::default();
        let a = r.sample([1.0, 1.0], 7, 0);
        assert_eq!(a, r.sample([1.0, 1.0], 7, 0));
        assert_ne!(a, r.sample([1.0, 1.0], 7, 1));
        assert_ne!(a, r.sample([1.0, 1.0], 8, 0));
        for c in &a.components {
            assert!(c.mean.iter().all(|x| (0.2..0.8).contains(x)));
            assert!((0.09..0.13).contains(&c.sigma));
        }
    }

    #[test]
    fn mode_parses() {
        assert_eq!("asles".parse::<Mode>().unwrap(), Mode::Asles);
        assert!("greedy".parse::<Mode>().is_err());
    }
}
