//! Breadth-first coverage of the weight simplex.
//!
//! Weights live on a lattice anchored at the initial weight: in the simplex chart
//! for basic sampling, in the transformed simplex for adaptive sampling. A
//! weight's [`LatticeKey`] is its integer offset from the anchor, and its
//! coordinates are recomputed from the key, so membership tests are exact.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::affine::{build_affine_space, AffineWeightSpace, EdgeLength};
use super::weights::{check_map_count, lattice_moves, LatticeKey, WeightVector};
use super::{ergodic_vector, scalarize, MapFamily, SolutionRecord};
use crate::dynamics::{self, ControlSequence};
use crate::ergopt::{self, ErgOptConfig, ErgodicProblem};
use crate::{Error, Execution, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    #[default]
    Basic,
    Adaptive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SlesConfig {
    pub mode: SamplingMode,
    /// Chart step `d` for basic sampling.
    pub step: f64,
    /// Step `d'` in the transformed simplex for adaptive sampling.
    pub adaptive_step: f64,
    /// Anchor weight; the barycenter when absent.
    pub w_init: Option<WeightVector>,
    /// Only weights at most this many lattice steps from the anchor are expanded.
    pub radius: Option<u32>,
    pub edge: EdgeLength,
}

impl Default for SlesConfig {
    fn default() -> Self {
        Self {
            mode: SamplingMode::Basic,
            step: 0.1,
            adaptive_step: 0.1,
            w_init: None,
            radius: None,
            edge: EdgeLength::Sqrt,
        }
    }
}

/// Turns lattice keys into weights.
#[derive(Clone, Debug)]
enum Sampler {
    Basic { anchor: Vec<f64>, step: f64 },
    Adaptive { space: AffineWeightSpace, anchor: [f64; 2], step: f64 },
}

impl Sampler {
    fn weight(&self, key: &LatticeKey) -> Option<WeightVector> {
        match self {
            Sampler::Basic { anchor, step } => {
                let chart: Vec<f64> = anchor
                    .iter()
                    .zip(&key.0)
                    .map(|(a, &k)| a + k as f64 * step)
                    .collect();
                WeightVector::from_chart(&chart)
            }
            Sampler::Adaptive { space, anchor, step } => {
                let p = [
                    anchor[0] + key.0[0] as f64 * step,
                    anchor[1] + key.0.get(1).map_or(0.0, |&k| k as f64 * step),
                ];
                if space.contains(p) {
                    space.to_weight(p).ok()
                } else {
                    None
                }
            }
        }
    }
}

/// One lattice weight in expansion order.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeNode {
    pub key: LatticeKey,
    pub weight: WeightVector,
    /// Index of the node whose expansion first reached this one.
    pub parent: Option<usize>,
}

/// Expansion order, keys and parents of the lattice reachable from the anchor.
#[derive(Clone, Debug)]
struct Lattice {
    nodes: Vec<LatticeNode>,
    mode: SamplingMode,
    space: Option<AffineWeightSpace>,
}

fn build_lattice(family: &MapFamily, cfg: &SlesConfig) -> Result<Lattice> {
    let m = family.len();
    check_map_count(m)?;
    let w_init = cfg.w_init.clone().unwrap_or_else(|| WeightVector::barycenter(m));
    if w_init.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: w_init.len(),
        });
    }
    let (sampler, mode, space) = match cfg.mode {
        SamplingMode::Basic => (basic_sampler(&w_init, cfg.step)?, SamplingMode::Basic, None),
        SamplingMode::Adaptive => {
            if !(cfg.adaptive_step > 0.0) {
                return Err(Error::param("adaptive_step", "must be positive"));
            }
            let space = build_affine_space(family, cfg.edge)?;
            if space.is_degenerate() {
                log::warn!(
                    "transformed weight space is degenerate (volume {:.3e}); using basic sampling",
                    space.volume()
                );
                (basic_sampler(&w_init, cfg.step)?, SamplingMode::Basic, Some(space))
            } else {
                let anchor = space.from_weight(&w_init)?;
                let sampler = Sampler::Adaptive {
                    space: space.clone(),
                    anchor,
                    step: cfg.adaptive_step,
                };
                (sampler, SamplingMode::Adaptive, Some(space))
            }
        }
    };

    let axes = m - 1;
    let moves = lattice_moves(m);
    let origin = LatticeKey::origin(axes);
    let mut nodes = vec![LatticeNode {
        key: origin.clone(),
        weight: w_init,
        parent: None,
    }];
    let mut seen: HashSet<LatticeKey> = HashSet::from([origin]);
    let mut open: VecDeque<usize> = VecDeque::from([0]);
    while let Some(i) = open.pop_front() {
        for mv in moves {
            let key = nodes[i].key.offset(&mv[..axes]);
            if cfg.radius.is_some_and(|r| key.radius() > r) || seen.contains(&key) {
                continue;
            }
            if let Some(weight) = sampler.weight(&key) {
                seen.insert(key.clone());
                nodes.push(LatticeNode {
                    key,
                    weight,
                    parent: Some(i),
                });
                open.push_back(nodes.len() - 1);
            }
        }
    }
    Ok(Lattice { nodes, mode, space })
}

fn basic_sampler(w_init: &WeightVector, step: f64) -> Result<Sampler> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::param("step", "must lie in (0, 1)"));
    }
    Ok(Sampler::Basic {
        anchor: w_init.as_slice()[..w_init.len() - 1].to_vec(),
        step,
    })
}

/// The weights a planner run would visit, in expansion order, without solving anything.
pub fn enumerate_lattice(family: &MapFamily, cfg: &SlesConfig) -> Result<Vec<LatticeNode>> {
    build_lattice(family, cfg).map(|l| l.nodes)
}

/// Everything a single episode needs apart from its weight and initial guess.
#[derive(Clone, Copy, Debug)]
pub struct Planner<'a> {
    pub problem: ErgodicProblem<'a>,
    /// Number of control steps `N`.
    pub steps: usize,
    pub optimizer: &'a ErgOptConfig,
}

impl Planner<'_> {
    /// Solves one scalarized problem and records the result.
    pub fn solve(
        &self,
        family: &MapFamily,
        weight: &WeightVector,
        u_init: &ControlSequence,
    ) -> Result<SolutionRecord> {
        if u_init.len() != self.steps {
            return Err(Error::DimensionMismatch {
                expected: self.steps,
                got: u_init.len(),
            });
        }
        let target = scalarize(family, weight)?;
        let out = ergopt::ergodic_search(&self.problem, &target, u_init, self.optimizer)?;
        let traj = dynamics::rollout(self.problem.model, &self.problem.start, &out.controls);
        let trace = &out.trace;
        Ok(SolutionRecord {
            episode: 0,
            weight: weight.clone(),
            key: None,
            parent: None,
            ergodic_vector: ergodic_vector(&traj, family, self.problem.basis)?,
            iterations: trace.iterations,
            termination: trace.termination,
            initial_objective: trace.initial(),
            final_objective: trace.final_objective(),
            final_metric: trace.final_metric(),
            controls: out.controls,
            trace: trace.objectives.clone(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SlesOutcome {
    /// One record per expanded weight, in expansion order.
    pub records: Vec<SolutionRecord>,
    /// Keys in the order they were closed.
    pub closed: Vec<LatticeKey>,
    /// Sampling actually used; basic when the adaptive space was degenerate.
    pub mode: SamplingMode,
    pub space: Option<AffineWeightSpace>,
}

impl SlesOutcome {
    pub fn total_iterations(&self) -> usize {
        self.records.iter().map(|r| r.iterations).sum()
    }
}

/// Sequential local ergodic search: expands the weight lattice breadth first
/// from the anchor, solving each weight warm-started from the controls of the
/// weight that discovered it. The first episode starts from zero control.
pub fn sles(family: &MapFamily, planner: &Planner<'_>, cfg: &SlesConfig) -> Result<SlesOutcome> {
    let lattice = build_lattice(family, cfg)?;
    let mut records: Vec<SolutionRecord> = Vec::with_capacity(lattice.nodes.len());
    let zero = ControlSequence::zeros(planner.steps);
    for (episode, node) in lattice.nodes.iter().enumerate() {
        let u_init = match node.parent {
            Some(p) => &records[p].controls,
            None => &zero,
        };
        let mut rec = planner.solve(family, &node.weight, u_init)?;
        rec.episode = episode;
        rec.key = Some(node.key.clone());
        rec.parent = node.parent;
        log::debug!(
            "episode {episode}: weight {:?}, {} iterations, {}",
            node.weight.as_slice(),
            rec.iterations,
            rec.termination.as_str()
        );
        records.push(rec);
    }
    Ok(SlesOutcome {
        closed: lattice.nodes.into_iter().map(|n| n.key).collect(),
        records,
        mode: lattice.mode,
        space: lattice.space,
    })
}

/// Independent episodes from zero control, one per weight. Records come back
/// in input order regardless of `exec`.
pub fn naive_scalarization(
    family: &MapFamily,
    planner: &Planner<'_>,
    weights: &[WeightVector],
    exec: Execution,
) -> Result<Vec<SolutionRecord>> {
    let zero = ControlSequence::zeros(planner.steps);
    exec.map(weights, |w| planner.solve(family, w, &zero))
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map(|mut rec| {
                rec.episode = i;
                rec
            })
        })
        .collect()
}
