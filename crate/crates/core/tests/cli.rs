use std::fs;
use std::path::Path;
use std::process::Command;

use moes::cli::{self, io, ExperimentConfig, MapSource, Mode};
use moes::ergopt::Termination;
use moes::fourier::{GaussianComponent, InfoMap};
use moes::moes::SamplingMode;
use tempfile::TempDir;

fn bump(x: f64, y: f64) -> MapSource {
    MapSource::Components(vec![GaussianComponent::new([x, y], 0.12, 1.0)])
}

/// Small problem that runs in well under a second.
fn small(dir: &Path, maps: Vec<MapSource>) -> ExperimentConfig {
    let mut cfg: ExperimentConfig = serde_json::from_value(serde_json::json!({
        "maps": [],
        "workspace": {"resolution": [40, 40]},
        "basis": {"order": 5},
        "model": {"steps": 40},
        "optimizer": {"max_iters": 40},
        "planner": {"step": 0.25}
    }))
    .unwrap();
    cfg.maps = maps;
    cfg.output = dir.to_path_buf();
    cfg
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn plan_on_uniform_map_writes_consistent_files() {
    let tmp = TempDir::new().unwrap();
    let grid = tmp.path().join("uniform.csv");
    io::write_grid(&grid, &InfoMap::uniform(&[40, 40], &[1.0, 1.0]).unwrap()).unwrap();
    let mut cfg: ExperimentConfig = serde_json::from_str(r#"{"maps": []}"#).unwrap();
    cfg.maps = vec![MapSource::Grid(grid)];
    cfg.output = tmp.path().join("out");
    let summary = cli::cmd_plan(&cfg).unwrap();
    // a uniform target needs a near-maximal path length, so the local search may stop early
    let converged = summary.termination == Termination::Converged;
    assert_eq!(converged, summary.final_metric <= cfg.optimizer.epsilon, "{summary:?}");
    assert!(summary.iterations <= cfg.optimizer.max_iters);
    assert!(summary.final_objective < summary.initial_objective);

    let out = &cfg.output;
    assert_eq!(io::read_json::<io::PlanSummary>(&out.join("summary.json")).unwrap(), summary);
    let traj = io::read_trajectory(&out.join("trajectory.csv")).unwrap();
    assert_eq!(traj.len(), cfg.model.steps + 1);
    assert_eq!(traj[0].x, 0.5);
    assert!(traj.last().unwrap().v.is_none());
    assert!(traj[..cfg.model.steps].iter().all(|r| r.v.is_some() && r.omega.is_some()));
    let trace = io::read_trace(&out.join("trace.csv")).unwrap();
    assert_eq!(trace.len(), summary.iterations + 1);
    assert_eq!(trace.last().unwrap().objective, summary.final_objective);
    assert!(trace.windows(2).all(|w| w[1].objective <= w[0].objective));
}

#[test]
fn plan_needs_one_map_or_a_weight() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small(tmp.path(), vec![bump(0.3, 0.3), bump(0.7, 0.7)]);
    let err = cli::cmd_plan(&cfg).unwrap_err().to_string();
    assert!(err.contains("planner.weight"), "{err}");
    cfg.planner.weight = Some(vec![0.25, 0.75]);
    assert_eq!(cli::cmd_plan(&cfg).unwrap().weight, vec![0.25, 0.75]);
}

#[test]
fn moes_outputs_round_trip() {
    let tmp = TempDir::new().unwrap();
    let cfg = small(tmp.path(), vec![bump(0.3, 0.3), bump(0.7, 0.6)]);
    let rep = cli::cmd_moes(&cfg).unwrap();
    let out = &cfg.output;

    assert_eq!(io::read_json::<io::Manifest>(&out.join("manifest.json")).unwrap(), rep.manifest);
    assert_eq!(
        io::read_json::<io::HypervolumeSummary>(&out.join("hypervolume.json")).unwrap(),
        rep.summary
    );
    // the lattice for d = 0.25 from the barycenter
    assert_eq!(rep.manifest.episodes, 3);

    let records = io::read_records(out).unwrap();
    assert_eq!(records.len(), rep.records.len());
    for (a, b) in records.iter().zip(&rep.records) {
        assert_eq!(a.controls, b.controls);
        assert_eq!(a.weight, b.weight);
        assert_eq!(a.key, b.key);
        assert_eq!(a.ergodic_vector, b.ergodic_vector);
        assert_eq!(a.final_metric, b.final_metric);
    }

    let front = io::read_front(&out.join("front.csv")).unwrap();
    assert_eq!(front.len(), records.len());
    for (i, row) in front.iter().enumerate() {
        assert_eq!(row.ergodic_vector, records[i].ergodic_vector);
        assert_eq!(row.nondominated, rep.nondominated.contains(&i));
    }

    let iters = io::read_iterations(&out.join("iterations.csv")).unwrap();
    assert_eq!(
        iters.iter().map(|r| r.iterations).sum::<usize>(),
        rep.manifest.total_iterations
    );
    let trace = io::read_trace(&out.join("trace.csv")).unwrap();
    assert_eq!(trace.len(), rep.manifest.total_iterations + rep.manifest.episodes);

    let hv = cli::cmd_hv(&out.join("front.csv"), None, None).unwrap();
    assert_eq!(hv, rep.summary.front);
}

#[test]
fn identical_maps_fall_back_to_basic_sampling() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small(tmp.path(), vec![bump(0.4, 0.6), bump(0.4, 0.6)]);
    cfg.planner.mode = Mode::Asles;
    let rep = cli::cmd_moes(&cfg).unwrap();
    assert_eq!(rep.manifest.mode, Mode::Asles);
    assert_eq!(rep.manifest.sampling, SamplingMode::Basic);
    // every weight targets the same map
    let first = &rep.records[0].ergodic_vector;
    for r in &rep.records {
        assert!((r.ergodic_vector[0] - r.ergodic_vector[1]).abs() < 1e-12);
        assert!(r.ergodic_vector[0] > 0.0 && first[0] > 0.0);
    }
}

#[test]
fn moes_rejects_wrong_map_count() {
    let tmp = TempDir::new().unwrap();
    let cfg = small(tmp.path(), vec![bump(0.4, 0.6)]);
    assert!(cli::cmd_moes(&cfg).unwrap_err().to_string().contains("2 or 3 maps"));
}

#[test]
fn sweep_isolates_failures_and_rejects_single_step() {
    let tmp = TempDir::new().unwrap();
    let cfg = small(tmp.path(), vec![bump(0.3, 0.3), bump(0.7, 0.6)]);
    assert!(cli::cmd_sweep(&cfg, &[0.25]).is_err());

    let rows = cli::cmd_sweep(&cfg, &[0.25, 1.5, 0.4]).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].error.is_none() && rows[2].error.is_none());
    assert!(rows[1].error.as_deref().unwrap().contains("planner.step"));
    assert!(rows[1].hypervolume.is_none());
    assert_eq!(rows[0].episodes, Some(3));
    assert_eq!(io::read_sweep(&cfg.output.join("sweep.csv")).unwrap(), rows);
    assert!(cfg.output.join("run_00/front.csv").is_file());
}

#[test]
fn distances_are_symmetric_and_round_trip() {
    let tmp = TempDir::new().unwrap();
    let cfg = small(tmp.path(), vec![bump(0.3, 0.3), bump(0.7, 0.6), bump(0.3, 0.35)]);
    let rows = cli::cmd_dist(&cfg).unwrap();
    assert_eq!(rows.len(), 9);
    let d = |i: usize, j: usize| rows.iter().find(|r| r.i == i && r.j == j).unwrap().distance;
    assert_eq!(d(0, 0), 0.0);
    assert_eq!(d(0, 1), d(1, 0));
    assert!(d(0, 2) < d(0, 1));
    assert_eq!(io::read_distances(&cfg.output.join("distances.csv")).unwrap(), rows);
}

#[test]
fn config_file_paths_resolve_against_its_directory() {
    let tmp = TempDir::new().unwrap();
    fs::create_dir(tmp.path().join("maps")).unwrap();
    fs::write(
        tmp.path().join("maps/a.json"),
        r#"[{"mean": [0.3, 0.4], "sigma": 0.1, "weight": 1.0}]"#,
    )
    .unwrap();
    fs::write(
        tmp.path().join("exp.json"),
        r#"{"maps": [{"mixture": "maps/a.json"}], "output": "results"}"#,
    )
    .unwrap();
    let cfg = ExperimentConfig::load(&tmp.path().join("exp.json")).unwrap();
    assert_eq!(cfg.maps, vec![MapSource::Mixture(tmp.path().join("maps/a.json"))]);
    assert_eq!(cfg.output, tmp.path().join("results"));
    cfg.validate().unwrap();
    assert_eq!(cfg.load_maps().unwrap().len(), 1);
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_moes"))
}

#[test]
fn missing_map_file_exits_nonzero_with_path() {
    let tmp = TempDir::new().unwrap();
    let cfg_path = tmp.path().join("exp.json");
    fs::write(&cfg_path, r#"{"maps": [{"grid": "nowhere/field.csv"}]}"#).unwrap();
    let out = binary()
        .args(["plan", "--config"])
        .arg(&cfg_path)
        .env("RUST_LOG", "off")
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("nowhere/field.csv"), "{stderr}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg_path = tmp.path().join("exp.json");
    fs::write(
        &cfg_path,
        r#"{
            "maps": [{"random": {}}, {"random": {"components": 3}}],
            "workspace": {"resolution": [40, 40]},
            "basis": {"order": 5},
            "model": {"steps": 40},
            "optimizer": {"max_iters": 40},
            "planner": {"step": 0.25}
        }"#,
    )
    .unwrap();
    let run = |out: &str, mode: &str, seed: &str| {
        let status = binary()
            .args(["moes", "--config"])
            .arg(&cfg_path)
            .args(["--mode", mode, "--seed", seed, "--out"])
            .arg(tmp.path().join(out))
            .env("RUST_LOG", "off")
            .status()
            .unwrap();
        assert!(status.success());
        read_dir_sorted(&tmp.path().join(out))
    };
    for mode in ["sles", "scala"] {
        let a = run(&format!("{mode}_a"), mode, "11");
        let b = run(&format!("{mode}_b"), mode, "11");
        assert!(!a.is_empty());
        assert_eq!(a, b, "{mode}");
    }
    let other_seed = run("sles_c", "sles", "12");
    assert_ne!(run("sles_d", "sles", "11"), other_seed);
}

#[test]
fn hv_subcommand_reads_front_csv() {
    let tmp = TempDir::new().unwrap();
    let front = tmp.path().join("front.csv");
    io::write_front(
        &front,
        &[
            io::FrontRow {
                weight: vec![0.25, 0.75],
                ergodic_vector: vec![0.2, 0.8],
                nondominated: true,
            },
            io::FrontRow {
                weight: vec![0.5, 0.5],
                ergodic_vector: vec![0.5, 0.5],
                nondominated: true,
            },
            io::FrontRow {
                weight: vec![0.75, 0.25],
                ergodic_vector: vec![0.8, 0.2],
                nondominated: true,
            },
            io::FrontRow {
                weight: vec![0.6, 0.4],
                ergodic_vector: vec![0.9, 0.9],
                nondominated: false,
            },
        ],
    )
    .unwrap();
    let out = binary()
        .arg("hv")
        .arg(&front)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let summary: moes::metrics::FrontSummary = serde_json::from_slice(&out.stdout).unwrap();
    assert!((summary.hypervolume - 0.37).abs() < 1e-12);
    assert_eq!(summary.nondominated, 3);
    assert_eq!(
        io::read_json::<moes::metrics::FrontSummary>(&tmp.path().join("hypervolume.json")).unwrap(),
        summary
    );
}
