//! Closed forms of the two-state tracking-error model and a proposition
//! checker that evaluates them independently of market data.
//!
//! All inputs are annualized fractions.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("sigma must be > 0 (got {0})")]
    NonPositiveSigma(f64),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("TE ceiling must be > 0 (got {0})")]
    InvalidCeiling(f64),
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("empty theta grid")]
    EmptyGrid,
    #[error("grid step must be > 0 (got {0})")]
    InvalidStep(f64),
}

/// Expected compound active return `theta * alpha - theta^2 * sigma^2 / 2`.
pub fn compound_active_return(theta: f64, alpha: f64, sigma: f64) -> f64 {
    theta * alpha - 0.5 * theta * theta * sigma * sigma
}

/// Growth-optimal active weight `alpha / sigma^2`.
pub fn optimal_theta(alpha: f64, sigma: f64) -> Result<f64, ModelError> {
    positive_sigma(sigma)?;
    Ok(alpha / (sigma * sigma))
}

/// Tracking error at the optimal weight, `alpha / sigma`: the information ratio.
pub fn optimal_te(alpha: f64, sigma: f64) -> Result<f64, ModelError> {
    positive_sigma(sigma)?;
    Ok(alpha / sigma)
}

pub fn constrained_te(te_star: f64, tau_bar: f64) -> f64 {
    te_star.min(tau_bar)
}

/// Marginal active return forgone at a binding ceiling, `alpha - tau_bar * sigma`.
pub fn omega(alpha: f64, tau_bar: f64, sigma: f64) -> f64 {
    alpha - tau_bar * sigma
}

fn positive_sigma(sigma: f64) -> Result<(), ModelError> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonPositiveSigma(sigma))
    }
}

/// Two-state opportunity set; index 0 is the low-risk state, 1 the high-risk state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeParams {
    pub alpha: [f64; 2],
    pub sigma: [f64; 2],
    /// Probability of the high-risk state.
    pub p: f64,
}

impl RegimeParams {
    pub fn new(alpha: [f64; 2], sigma: [f64; 2], p: f64) -> Result<Self, ModelError> {
        let params = Self { alpha, sigma, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for a in self.alpha {
            if !a.is_finite() {
                return Err(ModelError::NonFinite("alpha"));
            }
        }
        for s in self.sigma {
            positive_sigma(s)?;
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(ModelError::InvalidProbability(self.p));
        }
        Ok(())
    }

    pub fn ir(&self) -> [f64; 2] {
        [self.alpha[0] / self.sigma[0], self.alpha[1] / self.sigma[1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GovernanceParams {
    pub tau_bar: f64,
}

impl GovernanceParams {
    pub fn new(tau_bar: f64) -> Result<Self, ModelError> {
        if !(tau_bar > 0.0) {
            return Err(ModelError::InvalidCeiling(tau_bar));
        }
        Ok(Self { tau_bar })
    }
}

/// `(E[IR^2] - E[IR]^2) / 2` over the two-state mixture.
pub fn jensen_advantage(params: &RegimeParams) -> f64 {
    let [ir_l, ir_h] = params.ir();
    let p = params.p;
    // the mixture variance in product form, which is exactly zero at p in {0, 1}
    // or equal IRs, where the difference of moments would leave rounding residue
    0.5 * p * (1.0 - p) * (ir_h - ir_l) * (ir_h - ir_l)
}

/// Grid over `[0, 2 * alpha / sigma^2]` (or `[2 * alpha / sigma^2, 0]` when
/// alpha is negative) with spacing at most `step`; both endpoints included.
pub fn theta_grid(alpha: f64, sigma: f64, step: f64) -> Result<Vec<f64>, ModelError> {
    if !(step > 0.0) {
        return Err(ModelError::InvalidStep(step));
    }
    let end = 2.0 * optimal_theta(alpha, sigma)?;
    let (lo, hi) = if end < 0.0 { (end, 0.0) } else { (0.0, end) };
    let intervals = ((hi - lo) / step).ceil() as usize;
    if intervals == 0 {
        return Ok(vec![lo]);
    }
    let h = (hi - lo) / intervals as f64;
    Ok((0..=intervals).map(|i| lo + h * i as f64).collect())
}

/// Grid point maximizing [`compound_active_return`]; the first one on ties.
pub fn brute_force_optimum(alpha: f64, sigma: f64, grid: &[f64]) -> Result<f64, ModelError> {
    let mut best: Option<(f64, f64)> = None;
    for &theta in grid {
        let r = compound_active_return(theta, alpha, sigma);
        if best.is_none_or(|(_, br)| r > br) {
            best = Some((theta, r));
        }
    }
    best.map(|(t, _)| t).ok_or(ModelError::EmptyGrid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropStatus {
    Pass,
    /// The claim holds with equality at a degenerate boundary.
    BoundaryPass,
    Fail,
    PreconditionViolated,
}

impl fmt::Display for PropStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PropStatus::Pass => "pass",
            PropStatus::BoundaryPass => "boundary-pass",
            PropStatus::Fail => "fail",
            PropStatus::PreconditionViolated => "precondition-violated",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropositionResult {
    pub id: u8,
    pub claim: &'static str,
    pub status: PropStatus,
    /// Headline quantity of the check (see `detail` for its meaning).
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropositionReport {
    pub params: RegimeParams,
    pub governance: GovernanceParams,
    pub results: Vec<PropositionResult>,
}

impl PropositionReport {
    pub const COLUMNS: [&'static str; 5] = ["proposition", "claim", "status", "value", "detail"];

    pub fn all_pass(&self) -> bool {
        self.results
            .iter()
            .all(|r| matches!(r.status, PropStatus::Pass | PropStatus::BoundaryPass))
    }

    pub fn get(&self, id: u8) -> Option<&PropositionResult> {
        self.results.iter().find(|r| r.id == id)
    }

    pub fn to_csv(&self) -> String {
        let mut out = Self::COLUMNS.join(",");
        out.push('\n');
        for r in &self.results {
            out.push_str(&format!(
                "{},{},{},{:.12},\"{}\"\n",
                r.id,
                r.claim,
                r.status,
                r.value,
                r.detail.replace('"', "'")
            ));
        }
        out
    }
}

/// Grid step used for the brute-force check inside [`proposition_suite`].
const SUITE_GRID_STEP: f64 = 1e-4;

/// Evaluates the five model propositions for one parameter set.
pub fn proposition_suite(
    params: &RegimeParams,
    gov: &GovernanceParams,
) -> Result<PropositionReport, ModelError> {
    params.validate()?;
    GovernanceParams::new(gov.tau_bar)?;
    let [a_l, a_h] = params.alpha;
    let [s_l, s_h] = params.sigma;
    let [ir_l, ir_h] = params.ir();
    let tau = gov.tau_bar;
    let p = params.p;
    let te_l = optimal_te(a_l, s_l)?;
    let te_h = optimal_te(a_h, s_h)?;
    let ordered = ir_h > ir_l;

    let mut results = Vec::with_capacity(5);

    // 1: state-dependent optimum, cross-checked by grid search in each state
    let grid_ok = [(a_l, s_l), (a_h, s_h)].iter().all(|&(a, s)| {
        let star = a / (s * s);
        theta_grid(a, s, SUITE_GRID_STEP)
            .and_then(|g| brute_force_optimum(a, s, &g))
            .map(|t| (t - star).abs() <= SUITE_GRID_STEP)
            .unwrap_or(false)
    });
    let p1 = if !(ordered && a_h > a_l && a_l > 0.0) {
        PropStatus::PreconditionViolated
    } else if te_h > te_l && grid_ok {
        PropStatus::Pass
    } else {
        PropStatus::Fail
    };
    results.push(PropositionResult {
        id: 1,
        claim: "optimal TE is state-dependent",
        status: p1,
        value: te_h - te_l,
        detail: format!("TE*(L)={te_l:.6} TE*(H)={te_h:.6} grid_check={grid_ok}"),
    });

    // 2: sigma(TE) of the two-point TE distribution, loose versus binding ceiling
    let spread = (p * (1.0 - p)).sqrt();
    let sigma_tpa = spread * (te_h - te_l).abs();
    let sigma_saa = spread * (constrained_te(te_h, tau) - constrained_te(te_l, tau)).abs();
    let binds = tau < te_l.max(te_h);
    let p2 = if sigma_tpa > sigma_saa && binds {
        PropStatus::Pass
    } else if sigma_tpa == sigma_saa {
        PropStatus::BoundaryPass
    } else {
        PropStatus::Fail
    };
    results.push(PropositionResult {
        id: 2,
        claim: "TE volatility separates loose from binding ceilings",
        status: p2,
        value: sigma_tpa - sigma_saa,
        detail: format!("sigma_TE unconstrained={sigma_tpa:.6} at ceiling={sigma_saa:.6}"),
    });

    // 3: Jensen advantage of state-dependent TE
    let delta = jensen_advantage(params);
    let dynamic = 0.5 * (p * ir_h * ir_h + (1.0 - p) * ir_l * ir_l);
    let blended = p * ir_h + (1.0 - p) * ir_l;
    let static_ret = 0.5 * blended * blended;
    let degenerate = ir_h == ir_l || p == 0.0 || p == 1.0;
    let p3 = if degenerate {
        if delta == 0.0 {
            PropStatus::BoundaryPass
        } else {
            PropStatus::Fail
        }
    } else if !ordered {
        PropStatus::PreconditionViolated
    } else if delta > 0.0 {
        PropStatus::Pass
    } else {
        PropStatus::Fail
    };
    results.push(PropositionResult {
        id: 3,
        claim: "dynamic TE earns a compound-return advantage",
        status: p3,
        value: delta,
        detail: format!("E[IR^2]/2={dynamic:.8} E[IR]^2/2={static_ret:.8}"),
    });

    // 4: dynamic range min(TE*,tau) spread is monotone in tau and saturates
    let top = te_l.abs().max(te_h.abs()).max(tau);
    let steps = 200;
    let mut prev = 0.0;
    let mut monotone = true;
    for k in 0..=steps {
        let t = top * 1.5 * k as f64 / steps as f64;
        let d = (constrained_te(te_h, t) - constrained_te(te_l, t)).abs();
        if d + 1e-15 < prev {
            monotone = false;
        }
        prev = d;
    }
    let loose = te_l.max(te_h);
    let saturates = constrained_te(te_l, loose) == te_l && constrained_te(te_h, loose) == te_h;
    let coincide_at_tau = tau >= loose;
    let p4 = if !(monotone && saturates) {
        PropStatus::Fail
    } else if coincide_at_tau {
        PropStatus::BoundaryPass
    } else {
        PropStatus::Pass
    };
    let range_tau = (constrained_te(te_h, tau) - constrained_te(te_l, tau)).abs();
    results.push(PropositionResult {
        id: 4,
        claim: "constrained solutions converge as ceilings overlap",
        status: p4,
        value: range_tau,
        detail: format!(
            "dynamic range at ceiling={range_tau:.6} unconstrained={:.6} monotone={monotone} ceiling_nonbinding={coincide_at_tau}",
            (te_h - te_l).abs()
        ),
    });

    // 5: omega ordering under its algebraic condition
    let om_l = omega(a_l, tau, s_l);
    let om_h = omega(a_h, tau, s_h);
    let condition = a_h - a_l > tau * (s_h - s_l);
    let p5 = if !condition {
        PropStatus::PreconditionViolated
    } else if om_h > om_l {
        PropStatus::Pass
    } else {
        PropStatus::Fail
    };
    results.push(PropositionResult {
        id: 5,
        claim: "constraint cost is higher in the high-risk state",
        status: p5,
        value: om_h - om_l,
        detail: format!("omega(L)={om_l:.6} omega(H)={om_h:.6}"),
    });

    Ok(PropositionReport {
        params: *params,
        governance: *gov,
        results,
    })
}
