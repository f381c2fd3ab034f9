//! Spence-style signaling extension: wage-based participation decisions, the
//! money-denominated utility with a biased credential premium, and sensitivity
//! of participation to the bias coefficient.
//!
//! Everything in this module is denominated in money. `wage_p` (money per
//! hour) replaces the base model's dimensionless time-cost coefficient, which
//! keeps the biased payoff dimensionally coherent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Effort, FamilyParams};

/// Wage structure plus the perceived-premium bias multiplier.
///
/// `beta = 1` is rational perception; larger values inflate the perceived
/// value of clearing the credential threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WageModel {
    pub w_high: f64,
    pub w_low: f64,
    pub beta: f64,
}

impl WageModel {
    pub fn new(w_high: f64, w_low: f64, beta: f64) -> Result<Self> {
        if !(w_low > 0.0 && w_high > w_low) {
            return Err(Error::InvalidParam(format!(
                "wages must satisfy w_high > w_low > 0, got {w_high} / {w_low}"
            )));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParam(format!(
                "beta must be finite and > 0, got {beta}"
            )));
        }
        Ok(Self {
            w_high,
            w_low,
            beta,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "choice", rename_all = "snake_case")]
pub enum ParticipationChoice {
    Study { t_needed: f64, cost: f64 },
    Quit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParticipationDecision {
    pub choice: ParticipationChoice,
    /// Realized payoff in money: `w_high − cost` when studying, `w_low`
    /// otherwise.
    pub payoff: f64,
}

impl ParticipationDecision {
    pub fn studies(&self) -> bool {
        matches!(self.choice, ParticipationChoice::Study { .. })
    }
}

/// Minimum study time and money cost of just clearing the cutoff.
///
/// `t_needed = s_cut/γ`; lower-aptitude families pay more for the same
/// credential.
pub fn signaling_cost_to_threshold(
    fam: &FamilyParams,
    s_cut: f64,
    wage_p: f64,
) -> (Effort, f64) {
    let t_needed = s_cut / fam.gamma;
    (
        Effort::clamped(t_needed, f64::INFINITY),
        wage_p * t_needed,
    )
}

/// Study-or-quit decision given the cost of reaching the credential.
///
/// Rational mode compares `w_high − cost` against `w_low`; biased mode
/// inflates the high wage by `beta` in the comparison while realized payoffs
/// stay unbiased. Ties break to Quit.
pub fn decide_participation(
    cost_to_threshold: f64,
    t_needed: f64,
    wages: &WageModel,
    use_bias: bool,
) -> ParticipationDecision {
    let perceived_high = if use_bias {
        wages.w_high * wages.beta
    } else {
        wages.w_high
    };
    if perceived_high - cost_to_threshold > wages.w_low {
        ParticipationDecision {
            choice: ParticipationChoice::Study {
                t_needed,
                cost: cost_to_threshold,
            },
            payoff: wages.w_high - cost_to_threshold,
        }
    } else {
        ParticipationDecision {
            choice: ParticipationChoice::Quit,
            payoff: wages.w_low,
        }
    }
}

/// Money-denominated utility at an arbitrary effort: passing pays a biased
/// log premium on the high wage net of study cost; failing pays the low wage
/// net of the same study cost.
pub fn utility_signaling(
    fam: &FamilyParams,
    t: Effort,
    s_cut: f64,
    wages: &WageModel,
    wage_p: f64,
) -> f64 {
    let s = fam.gamma * t.hours();
    let c = wage_p * t.hours();
    if s >= s_cut {
        wages.w_high * wages.beta * (2.0 + s - s_cut).ln() - c
    } else {
        wages.w_low - c
    }
}

/// One row of a bias sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaSensitivityRow {
    pub beta: f64,
    pub participation_rate: f64,
    /// Mean realized payoff, evaluated without bias.
    pub mean_payoff: f64,
}

/// Sweep the bias coefficient over a family population: at each `beta` every
/// family decides participation in biased mode against its own signaling
/// cost.
pub fn beta_sensitivity(
    families: &[FamilyParams],
    wages: &WageModel,
    s_cut: f64,
    wage_p: f64,
    beta_grid: &[f64],
) -> Result<Vec<BetaSensitivityRow>> {
    if beta_grid.is_empty() {
        return Err(Error::InvalidParam("beta_grid must be non-empty".into()));
    }
    if families.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let mut rows = Vec::with_capacity(beta_grid.len());
    for &beta in beta_grid {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParam(format!(
                "beta grid values must be > 0, got {beta}"
            )));
        }
        let w = WageModel { beta, ..*wages };
        let mut studying = 0usize;
        let mut payoff_sum = 0.0;
        for fam in families {
            let (t_needed, cost) = signaling_cost_to_threshold(fam, s_cut, wage_p);
            let d = decide_participation(cost, t_needed.hours(), &w, true);
            if d.studies() {
                studying += 1;
            }
            payoff_sum += d.payoff;
        }
        rows.push(BetaSensitivityRow {
            beta,
            participation_rate: studying as f64 / families.len() as f64,
            mean_payoff: payoff_sum / families.len() as f64,
        });
    }
    Ok(rows)
}
