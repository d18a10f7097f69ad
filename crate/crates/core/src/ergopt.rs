//! Single-map ergodic trajectory optimization.
//!
//! The objective is the ergodic metric of the rolled-out trajectory against a
//! target coefficient table, plus a quadratic penalty on how far the Euler steps
//! overshoot the workspace before clamping. The default iteration takes a damped
//! Gauss-Newton step solved inside the control box and accepts it under an
//! Armijo test; projected gradient steps (plain or Barzilai-Borwein) are kept as
//! alternatives and as the fallback. Derivatives are exact for the discrete
//! system.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, Control, ControlSequence, RobotModel, State};
use crate::fourier::{self, SpectralBasis, SpectralCoefficients};
use crate::{Error, Result};

/// Per-episode termination threshold on the ergodic metric.
pub const DEFAULT_EPSILON: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ErgOptConfig {
    pub epsilon: f64,
    pub max_iters: usize,
    /// Trial step at the start of every episode.
    pub step_size: f64,
    /// After an accepted step the next trial is `growth * accepted_step`.
    pub growth: f64,
    pub shrink: f64,
    /// Sufficient-decrease constant.
    pub armijo: f64,
    /// Weight of the squared boundary overshoot.
    pub barrier: f64,
    /// Backtracking gives up below this step.
    pub min_step: f64,
    pub direction: Direction,
    /// Initial Levenberg damping of the Gauss-Newton system.
    pub damping: f64,
    /// Coordinate-descent sweeps spent on each box-constrained Gauss-Newton step.
    pub subproblem_sweeps: usize,
}

/// Search direction before projection and backtracking.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Negative gradient; the trial step grows by `growth` after each acceptance.
    Gradient,
    /// Negative gradient with the Barzilai-Borwein trial step.
    SpectralGradient,
    /// Damped Gauss-Newton step on the residuals whose squares make up the
    /// objective; falls back to the gradient when it cannot make progress.
    #[default]
    GaussNewton,
}

impl Default for ErgOptConfig {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            max_iters: 500,
            step_size: 0.1,
            growth: 2.0,
            shrink: 0.5,
            armijo: 1e-4,
            barrier: 100.0,
            min_step: 1e-12,
            direction: Direction::GaussNewton,
            damping: 1e-3,
            subproblem_sweeps: 200,
        }
    }
}

impl ErgOptConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::param("epsilon", "must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "must be at least 1"));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::param("shrink", "must lie in (0, 1)"));
        }
        if !(self.step_size > 0.0) {
            return Err(Error::param("step_size", "must be positive"));
        }
        if !(self.damping > 0.0) {
            return Err(Error::param("damping", "must be positive"));
        }
        if !(self.growth >= 1.0) {
            return Err(Error::param("growth", "must be at least 1"));
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return Err(Error::param("armijo", "must lie in (0, 1)"));
        }
        if !(self.barrier >= 0.0) {
            return Err(Error::param("barrier", "must be nonnegative"));
        }
        Ok(())
    }
}

/// Robot, basis and start state shared by every episode.
#[derive(Clone, Copy, Debug)]
pub struct ErgodicProblem<'a> {
    pub model: &'a RobotModel,
    pub basis: &'a SpectralBasis,
    pub start: State,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    /// Ergodic metric against the target.
    pub metric: f64,
    /// Weighted boundary penalty.
    pub penalty: f64,
}

impl ObjectiveValue {
    pub fn total(&self) -> f64 {
        self.metric + self.penalty
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    IterCap,
    /// No descent step could be found before reaching the threshold.
    Stalled,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::IterCap => "iter_cap",
            Termination::Stalled => "stalled",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    /// Penalized objective before the first step and after every accepted step.
    pub objectives: Vec<f64>,
    /// Ergodic metric at the same points.
    pub metrics: Vec<f64>,
    pub iterations: usize,
    pub termination: Termination,
}

impl EpisodeTrace {
    pub fn initial(&self) -> f64 {
        self.objectives[0]
    }

    pub fn final_objective(&self) -> f64 {
        *self.objectives.last().unwrap()
    }

    pub fn final_metric(&self) -> f64 {
        *self.metrics.last().unwrap()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub controls: ControlSequence,
    pub trace: EpisodeTrace,
}

impl<'a> ErgodicProblem<'a> {
    pub fn new(model: &'a RobotModel, basis: &'a SpectralBasis, start: State) -> Self {
        Self { model, basis, start }
    }

    fn check(&self, target: &SpectralCoefficients, u: &ControlSequence) -> Result<()> {
        self.basis.check(target)?;
        if self.basis.dims() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.basis.dims(),
            });
        }
        if u.is_empty() {
            return Err(Error::Empty("control sequence"));
        }
        Ok(())
    }

    pub fn evaluate(
        &self,
        u: &ControlSequence,
        target: &SpectralCoefficients,
        barrier: f64,
    ) -> Result<ObjectiveValue> {
        self.check(target, u)?;
        let traj = dynamics::rollout(self.model, &self.start, u);
        let c = fourier::trajectory_coefficients(&traj.samples(), self.model.dt, self.basis)?;
        Ok(ObjectiveValue {
            metric: fourier::weighted_sq_distance(
                c.coeffs.values(),
                target.values(),
                self.basis.lambda(),
            ),
            penalty: barrier * traj.penalty(),
        })
    }

    /// Objective value and its exact gradient with respect to every control.
    pub fn gradient(
        &self,
        u: &ControlSequence,
        target: &SpectralCoefficients,
        barrier: f64,
    ) -> Result<(ObjectiveValue, Vec<Control>)> {
        self.check(target, u)?;
        let model = self.model;
        let n = u.len();
        let mut states = Vec::with_capacity(n + 1);
        let mut overshoot = Vec::with_capacity(n + 1);
        states.push(self.start);
        overshoot.push([0.0; 2]);
        let mut s = self.start;
        for ui in u.as_slice() {
            let (next, over) = model.clamp(&model.step(&s, ui));
            states.push(next);
            overshoot.push(over);
            s = next;
        }
        let samples: Vec<[f64; 2]> = states[1..].iter().map(|s| [s[0], s[1]]).collect();
        let c = fourier::trajectory_coefficients(&samples, model.dt, self.basis)?;
        let lambda = self.basis.lambda();
        let metric = fourier::weighted_sq_distance(c.coeffs.values(), target.values(), lambda);
        let penalty = barrier
            * overshoot
                .iter()
                .map(|o| o[0] * o[0] + o[1] * o[1])
                .sum::<f64>();

        let scale = 2.0 / n as f64;
        let residual: Vec<f64> = c
            .coeffs
            .values()
            .iter()
            .zip(target.values())
            .zip(lambda)
            .map(|((ck, pk), l)| scale * l * (ck - pk))
            .collect();

        let mut grad = vec![[0.0; 2]; n];
        // adjoint of the state produced by step i, accumulated from later steps
        let mut carry = [0.0; 3];
        for i in (1..=n).rev() {
            let sample = self.basis.weighted_gradient(&samples[i - 1], &residual);
            let mut d_state = carry;
            d_state[0] += sample[0];
            d_state[1] += sample[1];
            let mut d_pre = d_state;
            for j in 0..2 {
                if overshoot[i][j] != 0.0 {
                    d_pre[j] = 2.0 * barrier * overshoot[i][j];
                }
            }
            let (a, b) = model.step_jacobians(&states[i - 1], &u.as_slice()[i - 1]);
            for (k, g) in grad[i - 1].iter_mut().enumerate() {
                *g = (0..3).map(|r| b[r][k] * d_pre[r]).sum();
            }
            for (k, cv) in carry.iter_mut().enumerate() {
                *cv = (0..3).map(|r| a[r][k] * d_pre[r]).sum();
            }
        }
        Ok((ObjectiveValue { metric, penalty }, grad))
    }

    /// Residual vector whose squared norm is the penalized objective, and its
    /// Jacobian with respect to the controls (columns ordered `v_0, w_0, v_1, ...`).
    ///
    /// The first rows are `sqrt(lambda_k) (c_k - target_k)`; one row follows per
    /// clamped coordinate, `sqrt(barrier)` times its overshoot.
    pub fn residual_jacobian(
        &self,
        u: &ControlSequence,
        target: &SpectralCoefficients,
        barrier: f64,
    ) -> Result<(ObjectiveValue, Vec<f64>, DMatrix<f64>)> {
        self.check(target, u)?;
        let model = self.model;
        let basis = self.basis;
        let n = u.len();
        let cols = 2 * n;
        let nk = basis.len();
        let sqrt_lambda: Vec<f64> = basis.lambda().iter().map(|l| l.sqrt()).collect();
        let sqrt_barrier = barrier.sqrt();
        let inv_n = 1.0 / n as f64;

        let mut coeffs = vec![0.0; nk];
        let mut jac_c = DMatrix::<f64>::zeros(nk, cols);
        let mut penalty_rows: Vec<(f64, Vec<f64>)> = Vec::new();
        // sensitivity of the current state to every control
        let mut sens = [vec![0.0; cols], vec![0.0; cols], vec![0.0; cols]];
        let mut s = self.start;
        for (i, ui) in u.as_slice().iter().enumerate() {
            let (a, b) = model.step_jacobians(&s, ui);
            let live = 2 * i + 2;
            let mut next = [vec![0.0; cols], vec![0.0; cols], vec![0.0; cols]];
            for (r, row) in next.iter_mut().enumerate() {
                for c in 0..2 * i {
                    row[c] = a[r][0] * sens[0][c] + a[r][1] * sens[1][c] + a[r][2] * sens[2][c];
                }
                row[2 * i] = b[r][0];
                row[2 * i + 1] = b[r][1];
            }
            let (clamped, over) = model.clamp(&model.step(&s, ui));
            for j in 0..2 {
                if over[j] != 0.0 {
                    let mut row = vec![0.0; cols];
                    row[..live].copy_from_slice(&next[j][..live]);
                    for x in &mut row {
                        *x *= sqrt_barrier;
                    }
                    penalty_rows.push((sqrt_barrier * over[j], row));
                    next[j].iter_mut().for_each(|x| *x = 0.0);
                }
            }
            sens = next;
            s = clamped;

            let x = [s[0], s[1]];
            basis.accumulate(&x, 1.0, &mut coeffs);
            let grads = basis.gradients(&x);
            for k in 0..nk {
                let (gx, gy) = (grads[2 * k] * inv_n, grads[2 * k + 1] * inv_n);
                if gx == 0.0 && gy == 0.0 {
                    continue;
                }
                for c in 0..live {
                    jac_c[(k, c)] += gx * sens[0][c] + gy * sens[1][c];
                }
            }
        }

        let rows = nk + penalty_rows.len();
        let mut residuals = Vec::with_capacity(rows);
        let mut jac = DMatrix::<f64>::zeros(rows, cols);
        let mut metric = 0.0;
        for k in 0..nk {
            let r = sqrt_lambda[k] * (coeffs[k] * inv_n - target.values()[k]);
            metric += r * r;
            residuals.push(r);
            for c in 0..cols {
                jac[(k, c)] = sqrt_lambda[k] * jac_c[(k, c)];
            }
        }
        let mut penalty = 0.0;
        for (p, (r, row)) in penalty_rows.into_iter().enumerate() {
            penalty += r * r;
            residuals.push(r);
            for (c, v) in row.into_iter().enumerate() {
                jac[(nk + p, c)] = v;
            }
        }
        Ok((ObjectiveValue { metric, penalty }, residuals, jac))
    }
}

/// Penalized objective of `u` against `target`.
pub fn scalarized_objective(
    problem: &ErgodicProblem<'_>,
    u: &ControlSequence,
    target: &SpectralCoefficients,
    barrier: f64,
) -> Result<ObjectiveValue> {
    problem.evaluate(u, target, barrier)
}

pub fn objective_gradient(
    problem: &ErgodicProblem<'_>,
    u: &ControlSequence,
    target: &SpectralCoefficients,
    barrier: f64,
) -> Result<Vec<Control>> {
    problem.gradient(u, target, barrier).map(|(_, g)| g)
}

/// Projected descent from `u_init` until the ergodic metric drops to
/// `cfg.epsilon`, the iteration cap is hit, or no descent step exists.
///
/// Every accepted step passes an Armijo test on the projected step and strictly
/// lowers the penalized objective, so the trace is decreasing.
pub fn ergodic_search(
    problem: &ErgodicProblem<'_>,
    target: &SpectralCoefficients,
    u_init: &ControlSequence,
    cfg: &ErgOptConfig,
) -> Result<SearchOutcome> {
    cfg.validate()?;
    let mut u = dynamics::project_controls(problem.model, u_init);
    let mut current = problem.evaluate(&u, target, cfg.barrier)?;
    let mut objectives = vec![current.total()];
    let mut metrics = vec![current.metric];
    let mut alpha = cfg.step_size;
    let mut damping = cfg.damping;
    let mut iterations = 0;
    let mut previous: Option<(ControlSequence, Vec<Control>)> = None;

    let termination = loop {
        if current.metric <= cfg.epsilon {
            break Termination::Converged;
        }
        if iterations >= cfg.max_iters {
            break Termination::IterCap;
        }
        let mut accepted = None;
        if cfg.direction == Direction::GaussNewton {
            let (_, residuals, jac) = problem.residual_jacobian(&u, target, cfg.barrier)?;
            let grad = gradient_from(&jac, &residuals);
            let normal = jac.tr_mul(&jac);
            let mut nu = 2.0;
            while accepted.is_none() && damping <= MAX_DAMPING {
                let step = damped_step(problem.model, &u, &normal, &grad, damping, cfg.subproblem_sweeps);
                let slope: f64 = grad.iter().flatten().zip(&step).map(|(g, s)| g * s).sum();
                let candidate = ControlSequence(
                    u.as_slice()
                        .iter()
                        .zip(step.chunks(2))
                        .map(|(c, s)| problem.model.project([c[0] + s[0], c[1] + s[1]]))
                        .collect(),
                );
                if slope < 0.0 {
                    let value = problem.evaluate(&candidate, target, cfg.barrier)?;
                    let actual = current.total() - value.total();
                    if actual > 0.0 && value.total() <= current.total() + cfg.armijo * slope {
                        // gain ratio against the local quadratic model
                        let js = &jac * DVector::from_column_slice(&step);
                        let rho = actual / (-slope - js.norm_squared());
                        let factor = (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
                        damping = (damping * factor).max(MIN_DAMPING);
                        accepted = Some((candidate, value));
                        continue;
                    }
                }
                damping *= nu;
                nu *= 2.0;
            }
            if accepted.is_none() {
                damping = cfg.damping;
                accepted = gradient_step(problem, target, &u, &current, &grad, &mut alpha, cfg)?;
            }
        } else {
            let (_, grad) = problem.gradient(&u, target, cfg.barrier)?;
            if cfg.direction == Direction::SpectralGradient {
                if let Some((pu, pg)) = &previous {
                    alpha = spectral_step(&u, pu, &grad, pg).unwrap_or(cfg.step_size);
                }
            }
            accepted = gradient_step(problem, target, &u, &current, &grad, &mut alpha, cfg)?;
            previous = Some((u.clone(), grad));
        }
        if accepted.is_none() {
            accepted = escape_step(problem, target, &u, &current, cfg)?;
        }
        match accepted {
            Some((candidate, value)) => {
                u = candidate;
                current = value;
                iterations += 1;
                objectives.push(current.total());
                metrics.push(current.metric);
            }
            None => break Termination::Stalled,
        }
    };

    Ok(SearchOutcome {
        controls: u,
        trace: EpisodeTrace {
            objectives,
            metrics,
            iterations,
            termination,
        },
    })
}

const MIN_DAMPING: f64 = 1e-9;
const SUBPROBLEM_TOL: f64 = 1e-10;
const MAX_DAMPING: f64 = 1e12;

fn gradient_from(jac: &DMatrix<f64>, residuals: &[f64]) -> Vec<Control> {
    let r = DVector::from_column_slice(residuals);
    let g = jac.tr_mul(&r) * 2.0;
    g.as_slice().chunks(2).map(|c| [c[0], c[1]]).collect()
}

fn shifted(model: &RobotModel, u: &ControlSequence, d: &[Control], t: f64) -> ControlSequence {
    ControlSequence(
        u.as_slice()
            .iter()
            .zip(d)
            .map(|(ui, di)| model.project([ui[0] + t * di[0], ui[1] + t * di[1]]))
            .collect(),
    )
}

/// Damped Gauss-Newton step restricted to the control box: minimizes
/// `0.5 d'(J'J + damping I)d + (J'r)'d` subject to the bounds on `u + d`.
///
/// The unconstrained solution over the controls not pinned by the gradient
/// seeds projected coordinate descent on the full box-constrained problem.
fn damped_step(
    model: &RobotModel,
    u: &ControlSequence,
    normal: &DMatrix<f64>,
    grad: &[Control],
    damping: f64,
    sweeps: usize,
) -> Vec<f64> {
    let n = 2 * u.len();
    let bounds = model.control_bounds();
    let value = |v: usize| u.as_slice()[v / 2][v % 2];
    let lo: Vec<f64> = (0..n).map(|v| bounds[v % 2].0 - value(v)).collect();
    let hi: Vec<f64> = (0..n).map(|v| bounds[v % 2].1 - value(v)).collect();
    // half gradient: J'r
    let g: Vec<f64> = grad.iter().flat_map(|g| [0.5 * g[0], 0.5 * g[1]]).collect();

    let free: Vec<usize> = (0..n)
        .filter(|&v| !((lo[v] >= 0.0 && g[v] > 0.0) || (hi[v] <= 0.0 && g[v] < 0.0)))
        .collect();
    let mut x = vec![0.0; n];
    if !free.is_empty() {
        let mut h = normal.select_rows(free.iter()).select_columns(free.iter());
        for i in 0..free.len() {
            h[(i, i)] += damping;
        }
        let rhs = DVector::from_iterator(free.len(), free.iter().map(|&v| -g[v]));
        if let Some(chol) = h.cholesky() {
            for (&v, step) in free.iter().zip(chol.solve(&rhs).iter()) {
                x[v] = step.clamp(lo[v], hi[v]);
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| normal[(i, i)] + damping).collect();
    let mut hx: Vec<f64> = (normal * DVector::from_column_slice(&x)).iter().copied().collect();
    for (hxi, xi) in hx.iter_mut().zip(&x) {
        *hxi += damping * xi;
    }
    for _ in 0..sweeps {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let xi = (x[i] - (g[i] + hx[i]) / diag[i]).clamp(lo[i], hi[i]);
            let delta = xi - x[i];
            if delta != 0.0 {
                for (j, hxj) in hx.iter_mut().enumerate() {
                    *hxj += normal[(j, i)] * delta;
                }
                hx[i] += damping * delta;
                x[i] = xi;
                change = change.max(delta.abs());
            }
        }
        if change < SUBPROBLEM_TOL {
            break;
        }
    }
    x
}

/// Fractions of the control bounds used as probe directions at first-order stationary points.
const PROBE_SPEEDS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
const PROBE_TURNS: [f64; 9] = [0.0, 0.25, -0.25, 0.5, -0.5, 0.75, -0.75, 1.0, -1.0];

/// Derivative-free step out of a first-order stationary point that is not a
/// minimizer, such as the stationary start of a forward-only robot, where the
/// turn rate has no first-order effect. Adds a constant probe control scaled by
/// a backtracked factor, keeping the best strict decrease among all probes.
fn escape_step(
    problem: &ErgodicProblem<'_>,
    target: &SpectralCoefficients,
    u: &ControlSequence,
    current: &ObjectiveValue,
    cfg: &ErgOptConfig,
) -> Result<Option<(ControlSequence, ObjectiveValue)>> {
    let model = problem.model;
    let bounds = model.control_bounds();
    let mut best: Option<(ControlSequence, ObjectiveValue)> = None;
    for &sv in &PROBE_SPEEDS {
        for &sw in &PROBE_TURNS {
            let probe = [sv * bounds[0].1, sw * bounds[1].1];
            let mut t = 1.0;
            while t >= 1e-3 {
                let candidate = ControlSequence(
                    u.as_slice()
                        .iter()
                        .map(|c| model.project([c[0] + t * probe[0], c[1] + t * probe[1]]))
                        .collect(),
                );
                let value = problem.evaluate(&candidate, target, cfg.barrier)?;
                let bar = best.as_ref().map_or(current.total(), |b| b.1.total());
                if value.total() < bar {
                    best = Some((candidate, value));
                    break;
                }
                t *= cfg.shrink;
            }
        }
    }
    Ok(best)
}

/// Barzilai-Borwein step `s.s / s.y` from the last two iterates, when the curvature is positive.
fn spectral_step(
    u: &ControlSequence,
    prev_u: &ControlSequence,
    grad: &[Control],
    prev_grad: &[Control],
) -> Option<f64> {
    let (mut ss, mut sy) = (0.0, 0.0);
    for ((a, b), (ga, gb)) in u.as_slice().iter().zip(prev_u.as_slice()).zip(grad.iter().zip(prev_grad)) {
        for k in 0..2 {
            let d = a[k] - b[k];
            ss += d * d;
            sy += d * (ga[k] - gb[k]);
        }
    }
    (sy > 0.0).then(|| (ss / sy).clamp(1e-10, 1e10))
}

fn gradient_step(
    problem: &ErgodicProblem<'_>,
    target: &SpectralCoefficients,
    u: &ControlSequence,
    current: &ObjectiveValue,
    grad: &[Control],
    alpha: &mut f64,
    cfg: &ErgOptConfig,
) -> Result<Option<(ControlSequence, ObjectiveValue)>> {
    let neg: Vec<Control> = grad.iter().map(|g| [-g[0], -g[1]]).collect();
    let found = line_search(problem, target, u, current, grad, |t| {
        shifted(problem.model, u, &neg, t)
    }, *alpha, cfg)?;
    Ok(found.map(|(cand, value, t)| {
        *alpha = t * cfg.growth;
        (cand, value)
    }))
}

/// Backtracks `t` from `t0` until the projected candidate passes the Armijo test
/// and strictly lowers the objective.
#[allow(clippy::too_many_arguments)]
fn line_search<F>(
    problem: &ErgodicProblem<'_>,
    target: &SpectralCoefficients,
    u: &ControlSequence,
    current: &ObjectiveValue,
    grad: &[Control],
    candidate_at: F,
    t0: f64,
    cfg: &ErgOptConfig,
) -> Result<Option<(ControlSequence, ObjectiveValue, f64)>>
where
    F: Fn(f64) -> ControlSequence,
{
    let mut t = t0;
    while t >= cfg.min_step {
        let candidate = candidate_at(t);
        let slope: f64 = candidate
            .as_slice()
            .iter()
            .zip(u.as_slice())
            .zip(grad)
            .map(|((c, o), g)| g[0] * (c[0] - o[0]) + g[1] * (c[1] - o[1]))
            .sum();
        if slope >= 0.0 {
            // no first-order decrease along this path under the bounds
            return Ok(None);
        }
        let value = problem.evaluate(&candidate, target, cfg.barrier)?;
        if value.total() < current.total() && value.total() <= current.total() + cfg.armijo * slope {
            return Ok(Some((candidate, value, t)));
        }
        t *= cfg.shrink;
    }
    Ok(None)
}
