//! Experiment commands behind the `moes` binary.
//!
//! Every command takes an [`ExperimentConfig`], writes its outputs under the
//! config's output directory (layouts in [`io`]) and returns what it wrote. All
//! randomness comes from the config seed, so reruns produce identical files.

pub mod config;
pub mod io;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, MapSource, Mode, RandomMixture};

use crate::dynamics::{self, ControlSequence, RobotModel};
use crate::ergopt::ErgodicProblem;
use crate::fourier::{self, SpectralBasis};
use crate::metrics::{self, FrontSummary, ParetoArchive};
use crate::moes::{self, MapFamily, Planner, SamplingMode, SolutionRecord, WeightVector};
use crate::{Error, Execution, Result};
use io::{DistanceRow, FrontRow, HypervolumeSummary, IterationRow, Manifest, PlanSummary, SweepRow};

/// Command-line settings that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(m) = self.mode {
            cfg.planner.mode = m;
        }
        if let Some(o) = &self.out {
            cfg.output = o.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
    }
}

/// Validated config with its maps projected onto the basis.
struct Experiment<'c> {
    cfg: &'c ExperimentConfig,
    basis: SpectralBasis,
    robot: RobotModel,
    family: MapFamily,
}

impl<'c> Experiment<'c> {
    fn prepare(cfg: &'c ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let basis = cfg.basis()?;
        let coeffs = cfg
            .load_maps()?
            .iter()
            .map(|m| fourier::map_coefficients(m, &basis))
            .collect::<Result<Vec<_>>>()?;
        let family = MapFamily::new(coeffs, &basis)?;
        Ok(Self {
            cfg,
            robot: cfg.robot(),
            basis,
            family,
        })
    }

    fn planner(&self) -> Planner<'_> {
        Planner {
            problem: ErgodicProblem::new(&self.robot, &self.basis, self.cfg.model.start),
            steps: self.cfg.model.steps,
            optimizer: &self.cfg.optimizer,
        }
    }
}

/// Plans one trajectory for a single map, or for the configured weight over several.
pub fn cmd_plan(cfg: &ExperimentConfig) -> Result<PlanSummary> {
    let exp = Experiment::prepare(cfg)?;
    let weight = match (&cfg.planner.weight, exp.family.len()) {
        (Some(w), _) => WeightVector::new(w.clone())?,
        (None, 1) => WeightVector::new(vec![1.0])?,
        (None, m) => {
            return Err(Error::Config(format!(
                "planner.weight: required to plan over {m} maps"
            )))
        }
    };
    let planner = exp.planner();
    let rec = planner.solve(&exp.family, &weight, &ControlSequence::zeros(cfg.model.steps))?;
    let traj = dynamics::rollout(&exp.robot, &cfg.model.start, &rec.controls);

    let out = &cfg.output;
    io::write_trajectory(&out.join("trajectory.csv"), &io::trajectory_rows(&traj, &rec.controls))?;
    io::write_trace(&out.join("trace.csv"), &io::trace_rows(0, &rec.trace))?;
    let summary = PlanSummary {
        weight: weight.as_slice().to_vec(),
        final_metric: rec.final_metric,
        final_objective: rec.final_objective,
        initial_objective: rec.initial_objective,
        iterations: rec.iterations,
        termination: rec.termination,
    };
    io::write_json(&out.join("summary.json"), &summary)?;
    log::info!(
        "plan: metric {:.3e} after {} iterations ({})",
        summary.final_metric,
        summary.iterations,
        summary.termination.as_str()
    );
    Ok(summary)
}

/// What a multi-map run wrote.
#[derive(Clone, Debug)]
pub struct MoesReport {
    pub manifest: Manifest,
    pub summary: HypervolumeSummary,
    pub records: Vec<SolutionRecord>,
    pub nondominated: Vec<usize>,
}

/// Covers the weight simplex with the configured planner, then filters and
/// scores the resulting front.
pub fn cmd_moes(cfg: &ExperimentConfig) -> Result<MoesReport> {
    let exp = Experiment::prepare(cfg)?;
    let m = exp.family.len();
    if !(2..=3).contains(&m) {
        return Err(Error::Config(format!("maps: multi-map runs need 2 or 3 maps, got {m}")));
    }
    let mode = cfg.planner.mode;
    let sles_cfg = cfg.sles_config(mode)?;
    let planner = exp.planner();
    let (records, sampling) = match mode {
        Mode::Sles | Mode::Asles => {
            let out = moes::sles(&exp.family, &planner, &sles_cfg)?;
            (out.records, out.mode)
        }
        Mode::Scala => {
            let nodes = moes::enumerate_lattice(&exp.family, &sles_cfg)?;
            let weights: Vec<WeightVector> = nodes.iter().map(|n| n.weight.clone()).collect();
            let mut records = moes::naive_scalarization(&exp.family, &planner, &weights, Execution::default())?;
            for (r, n) in records.iter_mut().zip(nodes) {
                r.key = Some(n.key);
            }
            (records, SamplingMode::Basic)
        }
    };

    let archive = ParetoArchive::with_reference(records, cfg.reference());
    let front = archive.summary()?;
    if front.beyond_reference > 0 {
        log::warn!(
            "{} solutions lie beyond the reference point {:?} and are left out of the hypervolume",
            front.beyond_reference,
            front.reference
        );
    }
    let records = archive.records;
    let manifest = Manifest {
        mode,
        sampling,
        maps: m,
        step: sles_cfg.step,
        adaptive_step: sles_cfg.adaptive_step,
        w_init: cfg.planner.w_init.clone(),
        radius: sles_cfg.radius,
        edge: sles_cfg.edge,
        seed: cfg.seed,
        episodes: records.len(),
        total_iterations: records.iter().map(|r| r.iterations).sum(),
    };
    let summary = HypervolumeSummary { mode, front };

    let out = &cfg.output;
    io::write_json(&out.join("manifest.json"), &manifest)?;
    io::write_records(out, &records)?;
    let front_rows: Vec<FrontRow> = records
        .iter()
        .enumerate()
        .map(|(i, r)| FrontRow {
            weight: r.weight.as_slice().to_vec(),
            ergodic_vector: r.ergodic_vector.clone(),
            nondominated: archive.nondominated.binary_search(&i).is_ok(),
        })
        .collect();
    io::write_front(&out.join("front.csv"), &front_rows)?;
    io::write_json(&out.join("hypervolume.json"), &summary)?;
    io::write_iterations(
        &out.join("iterations.csv"),
        &records.iter().map(IterationRow::from).collect::<Vec<_>>(),
    )?;
    let trace: Vec<_> = records
        .iter()
        .flat_map(|r| io::trace_rows(r.episode, &r.trace))
        .collect();
    io::write_trace(&out.join("trace.csv"), &trace)?;
    log::info!(
        "{}: {} episodes, {} iterations, hypervolume {:.6}",
        mode.as_str(),
        manifest.episodes,
        manifest.total_iterations,
        summary.front.hypervolume
    );
    Ok(MoesReport {
        manifest,
        summary,
        records,
        nondominated: archive.nondominated,
    })
}

/// Runs [`cmd_moes`] once per step size, each into its own `run_NN` directory,
/// and tabulates the results in `sweep.csv`. A failing run is recorded and the
/// sweep moves on.
pub fn cmd_sweep(cfg: &ExperimentConfig, steps: &[f64]) -> Result<Vec<SweepRow>> {
    if steps.len() < 2 {
        return Err(Error::Config(format!(
            "planner.sweep: need at least 2 step sizes, got {}",
            steps.len()
        )));
    }
    let runs: Vec<(usize, f64)> = steps.iter().copied().enumerate().collect();
    let rows = Execution::default().map(&runs, |&(i, step)| {
        let mut run = cfg.clone();
        match cfg.planner.mode {
            Mode::Asles => run.planner.adaptive_step = step,
            Mode::Sles | Mode::Scala => run.planner.step = step,
        }
        run.output = cfg.output.join(format!("run_{i:02}"));
        match cmd_moes(&run) {
            Ok(rep) => SweepRow {
                step,
                hypervolume: Some(rep.summary.front.hypervolume),
                episodes: Some(rep.manifest.episodes),
                total_iterations: Some(rep.manifest.total_iterations),
                error: None,
            },
            Err(e) => {
                log::error!("sweep step {step}: {e}");
                SweepRow {
                    step,
                    hypervolume: None,
                    episodes: None,
                    total_iterations: None,
                    error: Some(e.to_string()),
                }
            }
        }
    });
    io::write_sweep(&cfg.output.join("sweep.csv"), &rows)?;
    Ok(rows)
}

/// Hypervolume of the nondominated subset of a front CSV. The stored flags are
/// ignored and recomputed.
pub fn cmd_hv(front: &Path, reference: Option<Vec<f64>>, out: Option<&Path>) -> Result<FrontSummary> {
    let rows = io::read_front(front)?;
    if rows.is_empty() {
        return Err(Error::Empty("front"));
    }
    let m = rows[0].ergodic_vector.len();
    let reference = reference.unwrap_or_else(|| vec![1.0; m]);
    if reference.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: reference.len(),
        });
    }
    let points: Vec<&[f64]> = rows.iter().map(|r| r.ergodic_vector.as_slice()).collect();
    let nd = metrics::pareto_filter(&points);
    let front_pts: Vec<&[f64]> = nd.iter().map(|&i| points[i]).collect();
    let summary = FrontSummary {
        hypervolume: metrics::hypervolume(&front_pts, &reference)?,
        solutions: rows.len(),
        nondominated: nd.len(),
        beyond_reference: points
            .iter()
            .filter(|p| p.iter().zip(&reference).any(|(e, r)| e > r))
            .count(),
        reference,
    };
    if let Some(dir) = out {
        io::write_json(&dir.join("hypervolume.json"), &summary)?;
    }
    Ok(summary)
}

/// Pairwise ergodic distances between the configured maps, written to `distances.csv`.
pub fn cmd_dist(cfg: &ExperimentConfig) -> Result<Vec<DistanceRow>> {
    let exp = Experiment::prepare(cfg)?;
    let d = exp.family.distances();
    let rows: Vec<DistanceRow> = (0..d.len())
        .flat_map(|i| (0..d.len()).map(move |j| (i, j)))
        .map(|(i, j)| DistanceRow {
            i,
            j,
            distance: d[i][j],
        })
        .collect();
    io::write_distances(&cfg.output.join("distances.csv"), &rows)?;
    Ok(rows)
}
