//! Readers and writers for every file the commands produce.
//!
//! | file | layout |
//! |---|---|
//! | `trajectory.csv` | `t,x,y,theta,v,omega`; one row per state, the last row has empty controls |
//! | `trace.csv` | `episode,iteration,objective`; iteration 0 is the initial guess |
//! | `summary.json` | [`PlanSummary`] |
//! | `manifest.json` | [`Manifest`] |
//! | `solutions.jsonl` | one [`RecordLine`] per episode |
//! | `controls/episode_NNNN.csv` | `step,v,omega` |
//! | `front.csv` | `w1..wm,e1..em,nondominated` |
//! | `hypervolume.json` | [`HypervolumeSummary`] |
//! | `iterations.csv` | [`IterationRow`] per episode |
//! | `sweep.csv` | [`SweepRow`] per step size |
//! | `distances.csv` | `i,j,distance` for every ordered pair |

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::config::Mode;
use crate::dynamics::{ControlSequence, Trajectory};
use crate::ergopt::Termination;
use crate::fourier::{GaussianMixture, InfoMap};
use crate::metrics::FrontSummary;
use crate::moes::{EdgeLength, SamplingMode, SolutionRecord};
use crate::{Error, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn json_err(path: &Path) -> impl FnOnce(serde_json::Error) -> Error + '_ {
    move |source| Error::Json {
        path: path.to_path_buf(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(io_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(json_err(path))?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_err(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?).map_err(json_err(path))
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    csv::Reader::from_reader(open(path)?)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err(path))
}

pub fn read_grid(path: &Path) -> Result<InfoMap> {
    InfoMap::read_csv_grid(open(path)?).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn write_grid(path: &Path, map: &InfoMap) -> Result<()> {
    let mut w = create(path)?;
    map.write_csv_grid(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

pub fn read_mixture(path: &Path) -> Result<GaussianMixture> {
    let mix: GaussianMixture = read_json(path)?;
    mix.validate(2)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(mix)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: Option<f64>,
    pub omega: Option<f64>,
}

pub fn trajectory_rows(traj: &Trajectory, u: &ControlSequence) -> Vec<TrajectoryRow> {
    traj.states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let c = u.as_slice().get(i);
            TrajectoryRow {
                t: i as f64 * traj.dt,
                x: s[0],
                y: s[1],
                theta: s[2],
                v: c.map(|c| c[0]),
                omega: c.map(|c| c[1]),
            }
        })
        .collect()
}

pub fn write_trajectory(path: &Path, rows: &[TrajectoryRow]) -> Result<()> {
    write_rows(path, rows)
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRow>> {
    read_rows(path)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub episode: usize,
    pub iteration: usize,
    pub objective: f64,
}

pub fn trace_rows(episode: usize, objectives: &[f64]) -> Vec<TraceRow> {
    objectives
        .iter()
        .enumerate()
        .map(|(iteration, &objective)| TraceRow {
            episode,
            iteration,
            objective,
        })
        .collect()
}

pub fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<()> {
    write_rows(path, rows)
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    read_rows(path)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ControlRow {
    step: usize,
    v: f64,
    omega: f64,
}

pub fn write_controls(path: &Path, u: &ControlSequence) -> Result<()> {
    let rows: Vec<ControlRow> = u
        .as_slice()
        .iter()
        .enumerate()
        .map(|(step, c)| ControlRow {
            step,
            v: c[0],
            omega: c[1],
        })
        .collect();
    write_rows(path, &rows)
}

pub fn read_controls(path: &Path) -> Result<ControlSequence> {
    let rows: Vec<ControlRow> = read_rows(path)?;
    Ok(ControlSequence(rows.into_iter().map(|r| [r.v, r.omega]).collect()))
}

/// Result of a single-map (or single-weight) plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub weight: Vec<f64>,
    pub final_metric: f64,
    pub final_objective: f64,
    pub initial_objective: f64,
    pub iterations: usize,
    pub termination: Termination,
}

/// Settings and totals of one multi-map run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub mode: Mode,
    /// Sampling actually used; basic when an adaptive run fell back.
    pub sampling: SamplingMode,
    pub maps: usize,
    pub step: f64,
    pub adaptive_step: f64,
    pub w_init: Option<Vec<f64>>,
    pub radius: Option<u32>,
    pub edge: EdgeLength,
    pub seed: u64,
    pub episodes: usize,
    pub total_iterations: usize,
}

/// A solution record as stored in `solutions.jsonl`, with its control sidecar path
/// relative to the run directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordLine {
    #[serde(flatten)]
    pub record: SolutionRecord,
    pub controls: PathBuf,
}

pub fn controls_path(episode: usize) -> PathBuf {
    PathBuf::from("controls").join(format!("episode_{episode:04}.csv"))
}

/// Writes `solutions.jsonl` and one control CSV per record under `dir`.
pub fn write_records(dir: &Path, records: &[SolutionRecord]) -> Result<()> {
    let path = dir.join("solutions.jsonl");
    let mut w = create(&path)?;
    for rec in records {
        let rel = controls_path(rec.episode);
        write_controls(&dir.join(&rel), &rec.controls)?;
        let line = RecordLine {
            record: rec.clone(),
            controls: rel,
        };
        serde_json::to_writer(&mut w, &line).map_err(json_err(&path))?;
        writeln!(w).map_err(io_err(&path))?;
    }
    w.flush().map_err(io_err(&path))
}

/// Reads `solutions.jsonl` back, reattaching each record's controls.
pub fn read_records(dir: &Path) -> Result<Vec<SolutionRecord>> {
    let path = dir.join("solutions.jsonl");
    let mut out = Vec::new();
    for line in open(&path)?.lines() {
        let line = line.map_err(io_err(&path))?;
        if line.trim().is_empty() {
            continue;
        }
        let rl: RecordLine = serde_json::from_str(&line).map_err(json_err(&path))?;
        let mut rec = rl.record;
        rec.controls = read_controls(&dir.join(rl.controls))?;
        out.push(rec);
    }
    Ok(out)
}

/// One row of `front.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrontRow {
    pub weight: Vec<f64>,
    pub ergodic_vector: Vec<f64>,
    pub nondominated: bool,
}

pub fn write_front(path: &Path, rows: &[FrontRow]) -> Result<()> {
    let m = rows.first().map_or(0, |r| r.weight.len());
    let mut w = csv::Writer::from_writer(create(path)?);
    let header: Vec<String> = (1..=m)
        .map(|i| format!("w{i}"))
        .chain((1..=m).map(|i| format!("e{i}")))
        .chain(std::iter::once("nondominated".to_string()))
        .collect();
    w.write_record(&header).map_err(csv_err(path))?;
    for r in rows {
        let rec: Vec<String> = r
            .weight
            .iter()
            .chain(&r.ergodic_vector)
            .map(|v| v.to_string())
            .chain(std::iter::once(r.nondominated.to_string()))
            .collect();
        w.write_record(&rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_front(path: &Path) -> Result<Vec<FrontRow>> {
    let mut r = csv::Reader::from_reader(open(path)?);
    let header = r.headers().map_err(csv_err(path))?.clone();
    let bad = |msg: String| Error::Config(format!("{}: {msg}", path.display()));
    if header.len() < 3 || header.len() % 2 == 0 || &header[header.len() - 1] != "nondominated" {
        return Err(bad("header must be w1..wm,e1..em,nondominated".into()));
    }
    let m = (header.len() - 1) / 2;
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let nums = (0..2 * m)
            .map(|i| {
                rec[i]
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("row {line}: bad number `{}`", &rec[i])))
            })
            .collect::<Result<Vec<f64>>>()?;
        let nondominated = match rec[2 * m].trim() {
            "true" | "1" => true,
            "false" | "0" => false,
            other => return Err(bad(format!("row {line}: bad flag `{other}`"))),
        };
        rows.push(FrontRow {
            weight: nums[..m].to_vec(),
            ergodic_vector: nums[m..].to_vec(),
            nondominated,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypervolumeSummary {
    pub mode: Mode,
    #[serde(flatten)]
    pub front: FrontSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub episode: usize,
    pub parent: Option<usize>,
    pub iterations: usize,
    pub termination: Termination,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub final_metric: f64,
}

impl From<&SolutionRecord> for IterationRow {
    fn from(r: &SolutionRecord) -> Self {
        Self {
            episode: r.episode,
            parent: r.parent,
            iterations: r.iterations,
            termination: r.termination,
            initial_objective: r.initial_objective,
            final_objective: r.final_objective,
            final_metric: r.final_metric,
        }
    }
}

pub fn write_iterations(path: &Path, rows: &[IterationRow]) -> Result<()> {
    write_rows(path, rows)
}

pub fn read_iterations(path: &Path) -> Result<Vec<IterationRow>> {
    read_rows(path)
}

/// One row of `sweep.csv`; a failed run keeps its step and error and leaves the rest empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub step: f64,
    pub hypervolume: Option<f64>,
    pub episodes: Option<usize>,
    pub total_iterations: Option<usize>,
    pub error: Option<String>,
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_rows(path, rows)
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>> {
    read_rows(path)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceRow {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
}

pub fn write_distances(path: &Path, rows: &[DistanceRow]) -> Result<()> {
    write_rows(path, rows)
}

pub fn read_distances(path: &Path) -> Result<Vec<DistanceRow>> {
    read_rows(path)
}
