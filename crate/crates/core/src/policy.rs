//! Policy scenarios over the feedback simulation: the open-exam baseline, a
//! top-fraction diversion with a subsidy for excluded families, bias
//! reduction in the signaling extension, and an aptitude-weighted exam
//! redesign. Each run produces welfare and equity figures for side-by-side
//! comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{stats, FamilyParams};
use crate::population::{simulate_families, SimConfig, SimTrace};
use crate::signaling::{beta_sensitivity, WageModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicyScenario {
    /// Everyone competes in the same pool.
    CeeBaseline,
    /// Keep the top `keep_fraction` of families (ranked by round-0 score) in
    /// the academic pool; excluded families receive `subsidy` as utility.
    Diversion { keep_fraction: f64, subsidy: f64 },
    /// Signaling-extension bias reduction.
    BetaReduction {
        beta_before: f64,
        beta_after: f64,
        s_cut: f64,
        wage_p: f64,
        w_high: f64,
        w_low: f64,
    },
    /// Score map generalized to `S = γ^a · t`.
    ExamRedesign { aptitude_weight: f64 },
}

/// Artifact-defined equity proxies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquityMetrics {
    /// Fraction of the original population allowed to compete.
    pub participation_share: f64,
    /// Gini coefficient over final utilities of all original families
    /// (subsidy counted for the excluded); utilities are shifted to be
    /// non-negative before the computation.
    pub utility_gini: f64,
    /// Mean utility of retained families minus the subsidy paid to the
    /// excluded. Zero when nobody is excluded.
    pub excluded_utility_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyReport {
    pub welfare_total: f64,
    pub welfare_mean: f64,
    pub s_cut_final: f64,
    pub mean_effort: f64,
    pub equity: EquityMetrics,
}

/// Gini coefficient of a value vector, shifted to non-negative support.
/// Returns 0 for degenerate (all-equal or zero-mass) inputs.
pub fn gini(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = if min < 0.0 {
        values.iter().map(|v| v - min).collect()
    } else {
        values.to_vec()
    };
    let n = shifted.len() as f64;
    let total: f64 = shifted.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut sorted = shifted;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, v)| (i as f64 + 1.0) * v)
        .sum();
    ((2.0 * weighted) / (n * total) - (n + 1.0) / n).clamp(0.0, 1.0)
}

fn report_from_trace(
    trace: &SimTrace,
    all_utilities: &[f64],
    participation_share: f64,
    excluded_utility_gap: f64,
) -> PolicyReport {
    let last = trace.rounds.last().expect("non-empty trace");
    let n = all_utilities.len() as f64;
    let welfare_total: f64 = all_utilities.iter().sum();
    PolicyReport {
        welfare_total,
        welfare_mean: welfare_total / n,
        s_cut_final: last.s_cut,
        mean_effort: last.mean_t,
        equity: EquityMetrics {
            participation_share,
            utility_gini: gini(all_utilities),
            excluded_utility_gap,
        },
    }
}

/// Open-exam baseline: the whole population competes.
pub fn run_cee_baseline(
    families: &[FamilyParams],
    cfg: &SimConfig,
) -> Result<(PolicyReport, SimTrace)> {
    let trace = simulate_families(families, cfg)?;
    let last = trace.rounds.last().expect("non-empty trace");
    let utilities = last.utilities.clone();
    let report = report_from_trace(&trace, &utilities, 1.0, 0.0);
    Ok((report, trace))
}

/// Keep the top `keep_fraction` (by round-0 score at the common initial
/// effort, i.e. by aptitude) in the academic pool; the rest exit with the
/// subsidy as their utility.
pub fn run_diversion(
    families: &[FamilyParams],
    cfg: &SimConfig,
    keep_fraction: f64,
    subsidy: f64,
) -> Result<(PolicyReport, SimTrace)> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "keep_fraction must be in (0, 1], got {keep_fraction}"
        )));
    }
    let n = families.len();
    let keep = ((keep_fraction * n as f64).round() as usize).min(n);
    if keep < 2 {
        return Err(Error::DegeneratePool { retained: keep });
    }

    // Rank by round-0 score at the common initial effort; with one shared
    // effort this is a rank by aptitude. Ties break by original index.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        families[b]
            .gamma
            .partial_cmp(&families[a].gamma)
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut retained_idx: Vec<usize> = order[..keep].to_vec();
    retained_idx.sort_unstable(); // original order, so keep_fraction = 1 is a no-op
    let retained: Vec<FamilyParams> = retained_idx.iter().map(|&i| families[i]).collect();

    let trace = simulate_families(&retained, cfg)?;
    let last = trace.rounds.last().expect("non-empty trace");

    let retained_mean = stats::mean(&last.utilities);
    let mut all_utilities = vec![subsidy; n];
    for (slot, &i) in retained_idx.iter().enumerate() {
        all_utilities[i] = last.utilities[slot];
    }
    let gap = if keep == n { 0.0 } else { retained_mean - subsidy };
    let report = report_from_trace(&trace, &all_utilities, keep as f64 / n as f64, gap);
    Ok((report, trace))
}

/// Before/after reports of a bias-reduction policy in the signaling
/// extension. Welfare here is in money units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaReductionOutcome {
    pub before: PolicyReport,
    pub after: PolicyReport,
    /// Population standard deviation of γ/P over the participating pool, a
    /// proxy for the score dispersion the competition would exhibit.
    pub dispersion_before: f64,
    pub dispersion_after: f64,
}

pub fn run_beta_reduction(
    families: &[FamilyParams],
    wages: &WageModel,
    beta_before: f64,
    beta_after: f64,
    s_cut: f64,
    wage_p: f64,
) -> Result<BetaReductionOutcome> {
    let (before, disp_before) = beta_policy_report(families, wages, beta_before, s_cut, wage_p)?;
    let (after, disp_after) = beta_policy_report(families, wages, beta_after, s_cut, wage_p)?;
    Ok(BetaReductionOutcome {
        before,
        after,
        dispersion_before: disp_before,
        dispersion_after: disp_after,
    })
}

fn beta_policy_report(
    families: &[FamilyParams],
    wages: &WageModel,
    beta: f64,
    s_cut: f64,
    wage_p: f64,
) -> Result<(PolicyReport, f64)> {
    use crate::signaling::{decide_participation, signaling_cost_to_threshold};
    let row = beta_sensitivity(families, wages, s_cut, wage_p, &[beta])?[0];
    let w = WageModel { beta, ..*wages };
    let mut payoffs = Vec::with_capacity(families.len());
    let mut efforts = Vec::with_capacity(families.len());
    let mut pool_ability = Vec::new();
    let mut participant_payoffs = Vec::new();
    for fam in families {
        let (t_needed, cost) = signaling_cost_to_threshold(fam, s_cut, wage_p);
        let d = decide_participation(cost, t_needed.hours(), &w, true);
        payoffs.push(d.payoff);
        if d.studies() {
            efforts.push(t_needed.hours());
            pool_ability.push(fam.gamma / fam.p);
            participant_payoffs.push(d.payoff);
        } else {
            efforts.push(0.0);
        }
    }
    let dispersion = if pool_ability.is_empty() {
        0.0
    } else {
        stats::pop_stdev(&pool_ability)
    };
    let participant_mean = if participant_payoffs.is_empty() {
        0.0
    } else {
        stats::mean(&participant_payoffs)
    };
    let gap = if pool_ability.len() == families.len() {
        0.0
    } else {
        participant_mean - wages.w_low
    };
    let report = PolicyReport {
        welfare_total: payoffs.iter().sum(),
        welfare_mean: row.mean_payoff,
        s_cut_final: s_cut,
        mean_effort: stats::mean(&efforts),
        equity: EquityMetrics {
            participation_share: row.participation_rate,
            utility_gini: gini(&payoffs),
            excluded_utility_gap: gap,
        },
    };
    Ok((report, dispersion))
}

/// Rerun the feedback loop with the score map generalized to `S = γ^a · t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExamRedesignOutcome {
    pub report: PolicyReport,
    pub baseline_mean_effort: f64,
    /// `baseline_mean_effort − mean_effort`: positive means the redesign
    /// lowered study time.
    pub mean_effort_reduction: f64,
}

pub fn run_exam_redesign(
    families: &[FamilyParams],
    cfg: &SimConfig,
    aptitude_weight: f64,
) -> Result<(ExamRedesignOutcome, SimTrace)> {
    if aptitude_weight.is_nan() || aptitude_weight < 1.0 {
        return Err(Error::InvalidParam(format!(
            "aptitude_weight must be >= 1, got {aptitude_weight}"
        )));
    }
    let reweighted: Vec<FamilyParams> = families
        .iter()
        .map(|f| FamilyParams::new(f.id, f.gamma.powf(aptitude_weight), f.p, f.rationality))
        .collect::<Result<_>>()?;
    let (baseline, _) = run_cee_baseline(families, cfg)?;
    let (report, trace) = run_cee_baseline(&reweighted, cfg)?;
    Ok((
        ExamRedesignOutcome {
            report,
            baseline_mean_effort: baseline.mean_effort,
            mean_effort_reduction: baseline.mean_effort - report.mean_effort,
        },
        trace,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub label: String,
    pub report: PolicyReport,
}

/// A welfare-vs-equity dilemma: one policy wins on total welfare while
/// losing on participation share.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeOffFlag {
    pub higher_welfare: String,
    pub higher_participation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub trade_offs: Vec<TradeOffFlag>,
}

/// Side-by-side welfare/equity table. Rows are sorted by label, so the
/// result does not depend on input order.
pub fn compare_policies(reports: &[(String, PolicyReport)]) -> Result<ComparisonTable> {
    if reports.len() < 2 {
        return Err(Error::InvalidParam(
            "compare_policies needs at least 2 reports".into(),
        ));
    }
    let mut rows: Vec<ComparisonRow> = reports
        .iter()
        .map(|(label, report)| ComparisonRow {
            label: label.clone(),
            report: *report,
        })
        .collect();
    rows.sort_by(|a, b| a.label.cmp(&b.label));

    let mut trade_offs = Vec::new();
    for a in &rows {
        for b in &rows {
            if a.report.welfare_total > b.report.welfare_total
                && a.report.equity.participation_share < b.report.equity.participation_share
            {
                trade_offs.push(TradeOffFlag {
                    higher_welfare: a.label.clone(),
                    higher_participation: b.label.clone(),
                });
            }
        }
    }
    Ok(ComparisonTable { rows, trade_offs })
}
