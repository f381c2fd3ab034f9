//! Primitive model quantities: score production, study cost, the positional
//! threshold, and family utility.
//!
//! All functions here are pure and total on their stated domains. Utility is
//! piecewise: a concave log payoff above the threshold, pure cost below it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default hard cap on daily study time, in hours.
pub const T_HARD_CAP_DEFAULT: f64 = 24.0;

/// Whether a family ever quits the competition.
///
/// `Bounded` families best-respond unconditionally; `Rational` families quit
/// (choose zero effort) when the expected utility of competing falls below
/// the quit payoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rationality {
    Bounded,
    Rational,
}

/// One competing family: aptitude, time-cost coefficient, rationality mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub id: u32,
    /// Aptitude: score points produced per hour of study. Must be positive.
    pub gamma: f64,
    /// Time-cost coefficient: utility lost per hour of study. Must be positive.
    pub p: f64,
    pub rationality: Rationality,
}

impl FamilyParams {
    pub fn new(id: u32, gamma: f64, p: f64, rationality: Rationality) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParam(format!(
                "family {id}: gamma must be finite and > 0, got {gamma}"
            )));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidParam(format!(
                "family {id}: p must be finite and > 0, got {p}"
            )));
        }
        Ok(Self {
            id,
            gamma,
            p,
            rationality,
        })
    }
}

/// Study time in hours, non-negative and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Effort(f64);

impl Effort {
    pub fn new(t: f64) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidParam(format!(
                "effort must be finite and >= 0, got {t}"
            )));
        }
        Ok(Self(t))
    }

    /// Clamp an arbitrary value into `[0, cap]`.
    pub fn clamped(t: f64, cap: f64) -> Self {
        Self(t.max(0.0).min(cap))
    }

    pub fn hours(self) -> f64 {
        self.0
    }
}

/// How the cutoff score is formed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ThresholdSpec {
    /// A fixed cutoff, independent of the score population.
    Fixed { value: f64 },
    /// Mean plus `k` population standard deviations of the score pool.
    /// `k = 0` is the two-family average case; `k ≈ 1.645` cuts at the top 5%.
    MeanPlusKSigma { k: f64 },
}

/// The full outcome of one family's effort choice against a cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityOutcome {
    pub score: f64,
    pub cost: f64,
    pub utility: f64,
    pub passed: bool,
}

/// Exam score: aptitude times study time.
pub fn score(gamma: f64, t: Effort) -> f64 {
    gamma * t.hours()
}

/// Study cost: time-cost coefficient times study time.
pub fn cost(p: f64, t: Effort) -> f64 {
    p * t.hours()
}

/// Cutoff score for a score population under the given spec.
///
/// Uses the population standard deviation (divide by N).
pub fn threshold(scores: &[f64], spec: &ThresholdSpec) -> Result<f64> {
    match *spec {
        ThresholdSpec::Fixed { value } => Ok(value),
        ThresholdSpec::MeanPlusKSigma { k } => {
            if scores.is_empty() {
                return Err(Error::EmptyPopulation);
            }
            Ok(stats::mean(scores) + k * stats::pop_stdev(scores))
        }
    }
}

/// Family utility at effort `t` against cutoff `s_cut`.
///
/// Passing families earn `ln(2 + S - S_cut) - cost`; failing families pay the
/// cost for nothing. The log argument is at least 2 whenever the pass branch
/// is taken, so the function is total.
pub fn utility(fam: &FamilyParams, t: Effort, s_cut: f64) -> UtilityOutcome {
    let s = score(fam.gamma, t);
    let c = cost(fam.p, t);
    let passed = s >= s_cut;
    let u = if passed {
        (2.0 + s - s_cut).ln() - c
    } else {
        -c
    };
    UtilityOutcome {
        score: s,
        cost: c,
        utility: u,
        passed,
    }
}

pub mod stats {
    //! Population-moment helpers shared across modules.

    pub fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    /// Population standard deviation (divide by N, not N-1).
    pub fn pop_stdev(xs: &[f64]) -> f64 {
        let m = mean(xs);
        (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
    }
}
