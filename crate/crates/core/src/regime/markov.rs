//! Two-state Gaussian Markov-switching model (switching mean and variance)
//! estimated by EM: Hamilton filter for the E-step likelihood, Kim smoother
//! for the state posteriors, closed-form M-step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::RegimeError;
use crate::exec::Execution;
use crate::series::{Series, Unit};
use crate::stats::{mean, sample_variance};

const MIN_VARIANCE: f64 = 1e-12;
const MAX_REDRAWS: usize = 10;

/// State 0 is the low-variance state, state 1 the high-variance state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MsModel {
    pub means: [f64; 2],
    pub variances: [f64; 2],
    pub transition: [[f64; 2]; 2],
    /// Distribution of the state at the first observation.
    pub initial: [f64; 2],
    /// Log-likelihood of the sample the model was fitted on (NaN if not fitted).
    pub log_likelihood: f64,
}

impl MsModel {
    /// Model whose initial distribution is the stationary distribution of `transition`.
    pub fn new(
        means: [f64; 2],
        variances: [f64; 2],
        transition: [[f64; 2]; 2],
    ) -> Result<Self, RegimeError> {
        let m = Self {
            means,
            variances,
            transition,
            initial: stationary(&transition),
            log_likelihood: f64::NAN,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), RegimeError> {
        if self.variances.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(RegimeError::InvalidModel(format!(
                "variances {:?}",
                self.variances
            )));
        }
        for row in &self.transition {
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) || (row[0] + row[1] - 1.0).abs() > 1e-10
            {
                return Err(RegimeError::InvalidModel(format!("transition row {row:?}")));
            }
        }
        if (self.initial[0] + self.initial[1] - 1.0).abs() > 1e-10 {
            return Err(RegimeError::InvalidModel(format!(
                "initial {:?}",
                self.initial
            )));
        }
        Ok(())
    }

    /// Stationary distribution of the transition matrix.
    pub fn stationary(&self) -> [f64; 2] {
        stationary(&self.transition)
    }

    fn swapped(&self) -> Self {
        let p = self.transition;
        Self {
            means: [self.means[1], self.means[0]],
            variances: [self.variances[1], self.variances[0]],
            transition: [[p[1][1], p[1][0]], [p[0][1], p[0][0]]],
            initial: [self.initial[1], self.initial[0]],
            log_likelihood: self.log_likelihood,
        }
    }
}

fn stationary(p: &[[f64; 2]; 2]) -> [f64; 2] {
    let leave_low = p[0][1];
    let leave_high = p[1][0];
    let total = leave_low + leave_high;
    if total <= 0.0 {
        [0.5, 0.5]
    } else {
        [leave_high / total, leave_low / total]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MsOptions {
    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for MsOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            tol: 1e-8,
            max_iter: 1000,
            seed: 1989,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmRun {
    pub model: MsModel,
    /// Log-likelihood evaluated at the start of every iteration.
    pub trace: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MsFit {
    /// Best model across restarts.
    pub model: MsModel,
    pub converged: bool,
    pub iterations: usize,
    /// One log-likelihood trace per completed restart, in restart order.
    pub traces: Vec<Vec<f64>>,
    /// Trials redrawn because a variance collapsed.
    pub degenerate_draws: usize,
}

struct Posterior {
    log_likelihood: f64,
    smoothed: Vec<[f64; 2]>,
    /// Sum over t of the joint posterior P(s_t = i, s_{t+1} = j).
    joint: [[f64; 2]; 2],
}

fn log_density(y: f64, mean: f64, var: f64) -> f64 {
    let z = y - mean;
    -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + z * z / var)
}

/// Hamilton filter followed by the Kim smoother.
fn posterior(model: &MsModel, y: &[f64]) -> Posterior {
    let n = y.len();
    let p = &model.transition;
    let mut predicted = Vec::with_capacity(n);
    let mut filtered = Vec::with_capacity(n);
    let mut ll = 0.0;
    let mut pred = model.initial;
    for &obs in y {
        let lf = [
            log_density(obs, model.means[0], model.variances[0]),
            log_density(obs, model.means[1], model.variances[1]),
        ];
        let top = lf[0].max(lf[1]);
        let joint = [pred[0] * (lf[0] - top).exp(), pred[1] * (lf[1] - top).exp()];
        let c = joint[0] + joint[1];
        ll += top + c.ln();
        let filt = [joint[0] / c, joint[1] / c];
        predicted.push(pred);
        filtered.push(filt);
        pred = [
            filt[0] * p[0][0] + filt[1] * p[1][0],
            filt[0] * p[0][1] + filt[1] * p[1][1],
        ];
    }

    let mut smoothed = vec![[0.0; 2]; n];
    let mut joint_sum = [[0.0; 2]; 2];
    smoothed[n - 1] = filtered[n - 1];
    for t in (0..n - 1).rev() {
        let next_pred = predicted[t + 1];
        let ratio = [
            if next_pred[0] > 0.0 {
                smoothed[t + 1][0] / next_pred[0]
            } else {
                0.0
            },
            if next_pred[1] > 0.0 {
                smoothed[t + 1][1] / next_pred[1]
            } else {
                0.0
            },
        ];
        for i in 0..2 {
            let mut s = 0.0;
            for j in 0..2 {
                let xi = filtered[t][i] * p[i][j] * ratio[j];
                joint_sum[i][j] += xi;
                s += xi;
            }
            smoothed[t][i] = s;
        }
        let norm = smoothed[t][0] + smoothed[t][1];
        smoothed[t][0] /= norm;
        smoothed[t][1] /= norm;
    }
    Posterior {
        log_likelihood: ll,
        smoothed,
        joint: joint_sum,
    }
}

/// M-step; `None` when a state's variance collapses.
fn maximize(post: &Posterior, y: &[f64]) -> Option<MsModel> {
    let mut means = [0.0; 2];
    let mut variances = [0.0; 2];
    for j in 0..2 {
        let w: f64 = post.smoothed.iter().map(|g| g[j]).sum();
        if w <= 0.0 {
            return None;
        }
        let m = post
            .smoothed
            .iter()
            .zip(y)
            .map(|(g, v)| g[j] * v)
            .sum::<f64>()
            / w;
        let v = post
            .smoothed
            .iter()
            .zip(y)
            .map(|(g, x)| g[j] * (x - m) * (x - m))
            .sum::<f64>()
            / w;
        if !(v >= MIN_VARIANCE) {
            return None;
        }
        means[j] = m;
        variances[j] = v;
    }
    let mut transition = [[0.0; 2]; 2];
    for i in 0..2 {
        let row = post.joint[i][0] + post.joint[i][1];
        if row > 0.0 {
            transition[i] = [post.joint[i][0] / row, post.joint[i][1] / row];
        } else {
            transition[i][i] = 1.0;
        }
    }
    Some(MsModel {
        means,
        variances,
        transition,
        initial: post.smoothed[0],
        log_likelihood: f64::NAN,
    })
}

/// Runs EM from `start` until the log-likelihood improves by less than `tol`
/// or `max_iter` iterations elapse. `None` on variance collapse.
pub fn run_em(y: &[f64], start: MsModel, tol: f64, max_iter: usize) -> Option<EmRun> {
    let mut model = start;
    let mut trace = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter.max(1) {
        let post = posterior(&model, y);
        model.log_likelihood = post.log_likelihood;
        if let Some(prev) = trace.last() {
            if post.log_likelihood - prev < tol {
                trace.push(post.log_likelihood);
                converged = true;
                break;
            }
        }
        trace.push(post.log_likelihood);
        model = maximize(&post, y)?;
    }
    if !converged {
        model.log_likelihood = posterior(&model, y).log_likelihood;
        trace.push(model.log_likelihood);
    }
    if model.variances[0] > model.variances[1] {
        model = model.swapped();
    }
    Some(EmRun {
        model,
        trace,
        converged,
    })
}

fn random_start(rng: &mut ChaCha8Rng, m: f64, var: f64) -> MsModel {
    let sd = var.sqrt();
    let mut draw = |scale: f64| -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        m + scale * sd * z
    };
    let means = [draw(0.5), draw(0.5)];
    let variances = [
        var * rng.random_range(0.2..1.0),
        var * rng.random_range(1.0..3.0),
    ];
    let stay = [rng.random_range(0.7..0.99), rng.random_range(0.7..0.99)];
    MsModel {
        means,
        variances,
        transition: [[stay[0], 1.0 - stay[0]], [1.0 - stay[1], stay[1]]],
        initial: [0.5, 0.5],
        log_likelihood: f64::NAN,
    }
}

pub fn fit_markov_switching(
    weekly: &Series,
    restarts: usize,
    tol: f64,
    max_iter: usize,
) -> Result<MsFit, RegimeError> {
    fit_markov_switching_with(
        weekly,
        &MsOptions {
            restarts,
            tol,
            max_iter,
            ..Default::default()
        },
    )
}

/// Best of `opts.restarts` EM runs from random starts. Restart `k` draws from
/// its own RNG stream, so results do not depend on the execution strategy.
pub fn fit_markov_switching_with(weekly: &Series, opts: &MsOptions) -> Result<MsFit, RegimeError> {
    weekly.require_unit(Unit::SimpleReturn)?;
    let y = weekly.values();
    if y.len() < 100 {
        return Err(RegimeError::TooShort {
            needed: 100,
            have: y.len(),
        });
    }
    let m = mean(y);
    let var = sample_variance(y).unwrap_or(0.0);
    if var < MIN_VARIANCE {
        return Err(RegimeError::InvalidModel("sample variance is zero".into()));
    }

    let runs = opts.execution.map_indices(opts.restarts.max(1), |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(k as u64);
        let mut redraws = 0;
        loop {
            let start = random_start(&mut rng, m, var);
            if let Some(run) = run_em(y, start, opts.tol, opts.max_iter) {
                return (Some(run), redraws);
            }
            redraws += 1;
            if redraws >= MAX_REDRAWS {
                return (None, redraws);
            }
        }
    });

    let degenerate_draws = runs.iter().map(|r| r.1).sum();
    let completed: Vec<EmRun> = runs.into_iter().filter_map(|r| r.0).collect();
    let best = completed
        .iter()
        .max_by(|a, b| a.model.log_likelihood.total_cmp(&b.model.log_likelihood))
        .ok_or(RegimeError::AllRestartsDegenerate)?;
    Ok(MsFit {
        model: best.model,
        converged: best.converged,
        iterations: best.trace.len(),
        degenerate_draws,
        traces: completed.iter().map(|r| r.trace.clone()).collect(),
    })
}

/// Kim-smoothed probability of the high-variance state for each week.
pub fn smoothed_high_prob(model: &MsModel, weekly: &Series) -> Result<Series, RegimeError> {
    model.validate()?;
    if weekly.is_empty() {
        return Err(RegimeError::Empty);
    }
    let post = posterior(model, weekly.values());
    let probs = post.smoothed.iter().map(|g| g[1].clamp(0.0, 1.0)).collect();
    Ok(Series::new(weekly.calendar().clone(), probs, Unit::Level)?)
}

/// Smoothed probabilities of both states (rows sum to one).
pub fn smoothed_probs(model: &MsModel, y: &[f64]) -> Vec<[f64; 2]> {
    posterior(model, y).smoothed
}

/// Log-likelihood of `y` under one Gaussian at its maximum-likelihood fit.
pub fn single_gaussian_loglik(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let m = mean(y);
    let var = y.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
    -0.5 * n * ((2.0 * std::f64::consts::PI * var).ln() + 1.0)
}
