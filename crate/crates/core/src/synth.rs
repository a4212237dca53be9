//! Seeded two-state regime-switching data generator.
//!
//! A daily Markov chain over {Low, High} drives per-state benchmark legs, an
//! independent active spread and a VIX-like level. Spread and benchmark draws
//! are independent so the active return carries no benchmark cross-term.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{AssetPanel, SeriesError, TradingCalendar, Unit};
use crate::stats::TRADING_DAYS;

pub const BENCH_EQ: &str = "BENCH_EQ";
pub const BENCH_BD: &str = "BENCH_BD";
pub const SPREAD: &str = "SPREAD";
pub const VIX: &str = "VIX";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HiddenState {
    Low,
    High,
}

impl HiddenState {
    fn index(self) -> usize {
        match self {
            HiddenState::Low => 0,
            HiddenState::High => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("transition row {row} sums to {sum}, not 1")]
    NotStochastic { row: usize, sum: f64 },
    #[error("invalid parameter {name}: {value}")]
    InvalidParam { name: &'static str, value: f64 },
    #[error("horizon must be at least 1 day")]
    EmptyHorizon,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Per-state pair indexed `[Low, High]`; drifts and vols are annualized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthParams {
    pub transition: [[f64; 2]; 2],
    pub spread_alpha: [f64; 2],
    pub spread_sigma: [f64; 2],
    pub eq_drift: [f64; 2],
    pub eq_vol: [f64; 2],
    pub bd_drift: [f64; 2],
    pub bd_vol: [f64; 2],
    pub vix_mean: [f64; 2],
    /// Half-width of the uniform noise added to the VIX state mean.
    pub vix_noise: f64,
    pub horizon_days: usize,
    pub start_state: HiddenState,
    pub start_date: NaiveDate,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            transition: [[0.995, 0.005], [0.01, 0.99]],
            spread_alpha: [0.05, 0.25],
            spread_sigma: [0.10, 0.25],
            eq_drift: [0.10, 0.0],
            eq_vol: [0.12, 0.30],
            bd_drift: [0.04, 0.04],
            bd_vol: [0.04, 0.06],
            vix_mean: [12.0, 30.0],
            vix_noise: 1.0,
            horizon_days: 50 * 252,
            start_state: HiddenState::Low,
            start_date: NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date"),
            seed: 7,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        for (row, p) in self.transition.iter().enumerate() {
            if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(SynthError::InvalidParam {
                    name: "transition",
                    value: p[0],
                });
            }
            let sum = p[0] + p[1];
            if (sum - 1.0).abs() > 1e-12 {
                return Err(SynthError::NotStochastic { row, sum });
            }
        }
        let vols = [
            ("spread_sigma", &self.spread_sigma),
            ("eq_vol", &self.eq_vol),
            ("bd_vol", &self.bd_vol),
        ];
        for (name, pair) in vols {
            for &v in pair.iter() {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(SynthError::InvalidParam { name, value: v });
                }
            }
        }
        if !(self.vix_noise >= 0.0) {
            return Err(SynthError::InvalidParam {
                name: "vix_noise",
                value: self.vix_noise,
            });
        }
        if self.horizon_days == 0 {
            return Err(SynthError::EmptyHorizon);
        }
        Ok(())
    }
}

/// Output of [`synth_regime_panel`]: returns for the two benchmark legs and the
/// spread, a VIX level, and the hidden state path that generated them.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthPanel {
    pub panel: AssetPanel,
    pub states: Vec<HiddenState>,
}

pub fn synth_regime_panel(params: &SynthParams) -> Result<SynthPanel, SynthError> {
    params.validate()?;
    let n = params.horizon_days;
    let calendar = TradingCalendar::weekdays_from(params.start_date, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let sqrt_year = TRADING_DAYS.sqrt();
    let daily = |drift: f64, vol: f64, z: f64| drift / TRADING_DAYS + vol / sqrt_year * z;

    let mut state = params.start_state;
    let mut states = Vec::with_capacity(n);
    let mut eq = Vec::with_capacity(n);
    let mut bd = Vec::with_capacity(n);
    let mut spread = Vec::with_capacity(n);
    let mut vix = Vec::with_capacity(n);
    for t in 0..n {
        if t > 0 {
            let stay = params.transition[state.index()][state.index()];
            if rng.random::<f64>() >= stay {
                state = match state {
                    HiddenState::Low => HiddenState::High,
                    HiddenState::High => HiddenState::Low,
                };
            }
        }
        let s = state.index();
        let z_eq: f64 = StandardNormal.sample(&mut rng);
        let z_bd: f64 = StandardNormal.sample(&mut rng);
        let z_sp: f64 = StandardNormal.sample(&mut rng);
        let u: f64 = rng.random::<f64>() * 2.0 - 1.0;
        states.push(state);
        eq.push(daily(params.eq_drift[s], params.eq_vol[s], z_eq));
        bd.push(daily(params.bd_drift[s], params.bd_vol[s], z_bd));
        spread.push(daily(params.spread_alpha[s], params.spread_sigma[s], z_sp));
        vix.push(params.vix_mean[s] + params.vix_noise * u);
    }

    let panel = AssetPanel::new(
        calendar,
        vec![
            (BENCH_EQ.to_string(), eq, Unit::SimpleReturn),
            (BENCH_BD.to_string(), bd, Unit::SimpleReturn),
            (SPREAD.to_string(), spread, Unit::SimpleReturn),
            (VIX.to_string(), vix, Unit::Level),
        ],
    )?;
    Ok(SynthPanel { panel, states })
}
