//! N-family simulation of the threshold feedback loop: best responses given
//! the cutoff, recomputed scores, recomputed cutoff, welfare accounting, and
//! escalation / exhaustion detection.
//!
//! Updates are simultaneous: every family responds to the previous round's
//! cutoff. Under all-interior responses scores become `γ/P + S_cut − 2`, so
//! the cutoff climbs by `mean(γ/P) − 2 + k·stdev(γ/P)` each round while the
//! score dispersion stays pinned at `stdev(γ/P)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, Effort, FamilyParams, Rationality, ThresholdSpec, T_HARD_CAP_DEFAULT};

/// Sampling distribution for a per-family parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamDist {
    Uniform { lo: f64, hi: f64 },
    /// Normal truncated below at `min` by rejection.
    Normal { mean: f64, sd: f64, min: f64 },
    LogNormal { mu: f64, sigma: f64 },
    /// One value per family, or a single value broadcast to all.
    Explicit { values: Vec<f64> },
}

impl ParamDist {
    pub fn constant(v: f64) -> Self {
        ParamDist::Explicit { values: vec![v] }
    }

    fn sample_one(&self, idx: usize, n: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
        match self {
            ParamDist::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && *lo > 0.0 && hi >= lo) {
                    return Err(Error::InvalidParam(format!(
                        "uniform bounds must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
                    )));
                }
                Ok(rng.sample(Uniform::new_inclusive(*lo, *hi)))
            }
            ParamDist::Normal { mean, sd, min } => {
                if min.is_nan() || *min <= 0.0 {
                    return Err(Error::InvalidParam(format!(
                        "truncated normal needs min > 0, got {min}"
                    )));
                }
                let dist = Normal::new(*mean, *sd)
                    .map_err(|e| Error::InvalidParam(format!("normal({mean}, {sd}): {e}")))?;
                for _ in 0..10_000 {
                    let v = dist.sample(rng);
                    if v > *min {
                        return Ok(v);
                    }
                }
                Err(Error::InvalidParam(format!(
                    "truncated normal({mean}, {sd}) rejected 10000 draws above {min}"
                )))
            }
            ParamDist::LogNormal { mu, sigma } => {
                let dist = LogNormal::new(*mu, *sigma)
                    .map_err(|e| Error::InvalidParam(format!("lognormal({mu}, {sigma}): {e}")))?;
                Ok(dist.sample(rng))
            }
            ParamDist::Explicit { values } => {
                if values.len() == 1 {
                    Ok(values[0])
                } else if values.len() == n {
                    Ok(values[idx])
                } else {
                    Err(Error::InvalidParam(format!(
                        "explicit list has {} values for {} families (need 1 or {})",
                        values.len(),
                        n,
                        n
                    )))
                }
            }
        }
    }
}

/// How to generate a family population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSpec {
    pub n: usize,
    pub gamma_dist: ParamDist,
    #[serde(default = "default_p_dist")]
    pub p_dist: ParamDist,
    #[serde(default = "default_rationality")]
    pub rationality: Rationality,
    pub seed: u64,
}

fn default_p_dist() -> ParamDist {
    ParamDist::constant(0.5)
}

fn default_rationality() -> Rationality {
    Rationality::Bounded
}

impl PopulationSpec {
    /// Deterministically sample the population.
    ///
    /// Family `i` draws from ChaCha8 stream `i` of the base seed (gamma
    /// first, then p), so traces reproduce across platforms and are stable
    /// under parallel evaluation.
    pub fn sample(&self) -> Result<Vec<FamilyParams>> {
        if self.n < 2 {
            return Err(Error::InvalidParam(format!(
                "population needs n >= 2, got {}",
                self.n
            )));
        }
        let mut families = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(i as u64);
            let gamma = self.gamma_dist.sample_one(i, self.n, &mut rng)?;
            let p = self.p_dist.sample_one(i, self.n, &mut rng)?;
            families.push(FamilyParams::new(i as u32, gamma, p, self.rationality)?);
        }
        Ok(families)
    }
}

/// Simulation controls for the feedback loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub threshold: ThresholdSpec,
    #[serde(default = "default_initial_effort")]
    pub initial_effort: f64,
    pub rounds_max: usize,
    #[serde(default = "default_divergence_cap")]
    pub divergence_cap: f64,
    #[serde(default)]
    pub quit_payoff: f64,
    #[serde(default = "default_t_hard_cap")]
    pub t_hard_cap: f64,
    /// Keep quitters in the score pool at score 0 instead of dropping them.
    #[serde(default)]
    pub include_quitters_in_pool: bool,
}

fn default_initial_effort() -> f64 {
    2.0
}

fn default_divergence_cap() -> f64 {
    1e6
}

fn default_t_hard_cap() -> f64 {
    T_HARD_CAP_DEFAULT
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds_max < 1 {
            return Err(Error::InvalidParam("rounds_max must be >= 1".into()));
        }
        if !(self.initial_effort.is_finite() && self.initial_effort >= 0.0) {
            return Err(Error::InvalidParam(format!(
                "initial_effort must be >= 0, got {}",
                self.initial_effort
            )));
        }
        if self.t_hard_cap.is_nan() || self.t_hard_cap <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "t_hard_cap must be > 0, got {}",
                self.t_hard_cap
            )));
        }
        if let ThresholdSpec::MeanPlusKSigma { k } = self.threshold {
            if !k.is_finite() {
                return Err(Error::InvalidParam(format!("k must be finite, got {k}")));
            }
        }
        Ok(())
    }
}

/// One round of the simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub efforts: Vec<f64>,
    pub scores: Vec<f64>,
    /// Cutoff formed from this round's scores (used by next round's decisions).
    pub s_cut: f64,
    pub sigma_s: f64,
    pub mean_t: f64,
    /// Utility of each family against the cutoff its decision targeted.
    /// Quitters carry the quit payoff.
    pub utilities: Vec<f64>,
    pub welfare_total: f64,
    pub welfare_mean: f64,
    pub n_active: usize,
    pub n_exhausted: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxRounds,
    Converged,
    Diverged,
    AllQuit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimTrace {
    pub rounds: Vec<RoundRecord>,
    pub termination: Termination,
}

/// Best response to a cutoff taken as given: `1/P + (S_cut − 2)/γ`, clamped
/// into `[0, cap]`.
pub fn best_response_population(fam: &FamilyParams, s_cut: f64, cap: f64) -> Effort {
    Effort::clamped(1.0 / fam.p + (s_cut - 2.0) / fam.gamma, cap)
}

/// Largest study time with non-negative utility at a zero cutoff: the larger
/// root of `ln(2 + γt) − Pt = 0`, found by bisection to 1e-9. Beyond it
/// utility is negative and falling even with no competition. Returns `cap`
/// when no root lies below the cap.
pub fn max_noncompetitive_time(fam: &FamilyParams, cap: f64) -> Effort {
    let f = |t: f64| (2.0 + fam.gamma * t).ln() - fam.p * t;
    // Utility peaks at max(0, 1/P − 2/γ) and is positive there (f(0) = ln 2),
    // so the larger root sits to the right of the peak.
    let mut lo = (1.0 / fam.p - 2.0 / fam.gamma).max(0.0).min(cap);
    let mut hi = cap;
    if f(hi) >= 0.0 {
        return Effort::clamped(cap, cap);
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Effort::clamped(0.5 * (lo + hi), cap)
}

/// A family's round decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EffortDecision {
    Study(Effort),
    Quit,
}

impl EffortDecision {
    pub fn effort(&self) -> f64 {
        match self {
            EffortDecision::Study(t) => t.hours(),
            EffortDecision::Quit => 0.0,
        }
    }
}

/// Effort choice against a cutoff. Bounded families best-respond
/// unconditionally; rational families quit when the expected utility at the
/// best response falls below the quit payoff.
pub fn decide_effort(
    fam: &FamilyParams,
    s_cut: f64,
    quit_payoff: f64,
    cap: f64,
) -> EffortDecision {
    let t_star = best_response_population(fam, s_cut, cap);
    match fam.rationality {
        Rationality::Bounded => EffortDecision::Study(t_star),
        Rationality::Rational => {
            let u = model::utility(fam, t_star, s_cut).utility;
            if u < quit_payoff {
                EffortDecision::Quit
            } else {
                EffortDecision::Study(t_star)
            }
        }
    }
}

/// Run the threshold feedback loop for a sampled population spec.
pub fn simulate_feedback(pop: &PopulationSpec, cfg: &SimConfig) -> Result<SimTrace> {
    let families = pop.sample()?;
    simulate_families(&families, cfg)
}

/// Run the threshold feedback loop over an explicit family list.
pub fn simulate_families(families: &[FamilyParams], cfg: &SimConfig) -> Result<SimTrace> {
    cfg.validate()?;
    if families.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let n = families.len();
    let cap = cfg.t_hard_cap;
    let mut active = vec![true; n];

    // Round 0: everyone at the initial effort.
    let efforts0 = vec![Effort::clamped(cfg.initial_effort, cap).hours(); n];
    let scores0: Vec<f64> = families
        .iter()
        .zip(&efforts0)
        .map(|(f, &t)| f.gamma * t)
        .collect();
    let s_cut0 = model::threshold(&scores0, &cfg.threshold)?;
    let mut rounds = vec![make_record(
        0, families, &efforts0, &scores0, &active, s_cut0, s_cut0, cfg,
    )];

    let mut prev_efforts = efforts0;
    let mut prev_s_cut = s_cut0;
    let mut termination = Termination::MaxRounds;

    for r in 1..=cfg.rounds_max {
        let mut efforts = vec![0.0; n];
        for (i, fam) in families.iter().enumerate() {
            if !active[i] {
                continue;
            }
            match decide_effort(fam, prev_s_cut, cfg.quit_payoff, cap) {
                EffortDecision::Study(t) => efforts[i] = t.hours(),
                EffortDecision::Quit => active[i] = false,
            }
        }

        let scores: Vec<f64> = families
            .iter()
            .zip(&efforts)
            .map(|(f, &t)| f.gamma * t)
            .collect();

        // Cutoff over the competitor pool; quitters are dropped unless kept
        // at score zero by configuration.
        let pool: Vec<f64> = if cfg.include_quitters_in_pool {
            scores.clone()
        } else {
            scores
                .iter()
                .zip(&active)
                .filter(|(_, &a)| a)
                .map(|(&s, _)| s)
                .collect()
        };
        if pool.is_empty() {
            // Everyone quit; record the terminal round with a zero cutoff.
            rounds.push(make_record(
                r, families, &efforts, &scores, &active, 0.0, prev_s_cut, cfg,
            ));
            termination = Termination::AllQuit;
            break;
        }
        let s_cut = model::threshold(&pool, &cfg.threshold)?;
        rounds.push(make_record(
            r, families, &efforts, &scores, &active, s_cut, prev_s_cut, cfg,
        ));

        let max_change = efforts
            .iter()
            .zip(&prev_efforts)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let all_capped = families
            .iter()
            .enumerate()
            .filter(|(i, _)| active[*i])
            .all(|(i, _)| efforts[i] >= cap);
        if s_cut > cfg.divergence_cap || all_capped {
            termination = Termination::Diverged;
            break;
        }
        if max_change < 1e-9 {
            termination = Termination::Converged;
            break;
        }
        prev_efforts = efforts;
        prev_s_cut = s_cut;
    }

    Ok(SimTrace {
        rounds,
        termination,
    })
}

#[allow(clippy::too_many_arguments)]
fn make_record(
    round: usize,
    families: &[FamilyParams],
    efforts: &[f64],
    scores: &[f64],
    active: &[bool],
    s_cut_new: f64,
    s_cut_decided_against: f64,
    cfg: &SimConfig,
) -> RoundRecord {
    let n = families.len();
    // Round 0 utilities are measured against round 0's own cutoff; later
    // rounds against the cutoff the decision targeted.
    let target = if round == 0 {
        s_cut_new
    } else {
        s_cut_decided_against
    };
    let mut utilities = Vec::with_capacity(n);
    let mut n_exhausted = 0;
    for (i, fam) in families.iter().enumerate() {
        let u = if active[i] {
            let u = model::utility(fam, Effort::clamped(efforts[i], cfg.t_hard_cap), target).utility;
            if u < 0.0 {
                n_exhausted += 1;
            }
            u
        } else {
            cfg.quit_payoff
        };
        utilities.push(u);
    }
    // Fixed left-to-right summation order keeps welfare bit-stable.
    let welfare_total: f64 = utilities.iter().sum();
    let sigma_s = if cfg.include_quitters_in_pool {
        model::stats::pop_stdev(scores)
    } else {
        let pool: Vec<f64> = scores
            .iter()
            .zip(active)
            .filter(|(_, &a)| a)
            .map(|(&s, _)| s)
            .collect();
        if pool.is_empty() {
            0.0
        } else {
            model::stats::pop_stdev(&pool)
        }
    };
    RoundRecord {
        round,
        efforts: efforts.to_vec(),
        scores: scores.to_vec(),
        s_cut: s_cut_new,
        sigma_s,
        mean_t: model::stats::mean(efforts),
        utilities,
        welfare_total,
        welfare_mean: welfare_total / n as f64,
        n_active: active.iter().filter(|&&a| a).count(),
        n_exhausted,
    }
}

/// Per-round welfare figures plus a final-round summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WelfareSummary {
    pub s_cut_path: Vec<f64>,
    pub welfare_total_path: Vec<f64>,
    pub final_welfare_total: f64,
    pub final_welfare_mean: f64,
    pub final_mean_effort: f64,
    pub final_s_cut: f64,
    pub exhausted_fraction: f64,
    pub quit_fraction: f64,
    pub termination: Termination,
}

pub fn welfare_report(trace: &SimTrace) -> WelfareSummary {
    let last = trace
        .rounds
        .last()
        .expect("trace always holds at least round 0");
    let n = last.efforts.len() as f64;
    WelfareSummary {
        s_cut_path: trace.rounds.iter().map(|r| r.s_cut).collect(),
        welfare_total_path: trace.rounds.iter().map(|r| r.welfare_total).collect(),
        final_welfare_total: last.welfare_total,
        final_welfare_mean: last.welfare_mean,
        final_mean_effort: last.mean_t,
        final_s_cut: last.s_cut,
        exhausted_fraction: last.n_exhausted as f64 / n,
        quit_fraction: (last.efforts.len() - last.n_active) as f64 / n,
        termination: trace.termination,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fam(id: u32, gamma: f64, p: f64, r: Rationality) -> FamilyParams {
        FamilyParams::new(id, gamma, p, r).unwrap()
    }

    const CAP: f64 = T_HARD_CAP_DEFAULT;

    #[test]
    fn population_best_response_values() {
        let f = fam(0, 3.0, 0.5, Rationality::Bounded);
        assert_relative_eq!(best_response_population(&f, 0.0, CAP).hours(), 4.0 / 3.0);
        assert_relative_eq!(best_response_population(&f, 3.0, CAP).hours(), 7.0 / 3.0);
        assert_relative_eq!(best_response_population(&f, 2.0, CAP).hours(), 2.0);
    }

    #[test]
    fn max_noncompetitive_time_root() {
        let f = fam(0, 3.0, 0.5, Rationality::Bounded);
        let t = max_noncompetitive_time(&f, CAP).hours();
        assert_relative_eq!(t, 5.9878, epsilon = 1e-3);
        assert!(((2.0 + 3.0 * t).ln() - 0.5 * t).abs() < 1e-8);
        // Utility is negative just beyond the root, positive just before.
        assert!((2.0 + 3.0 * (t + 0.01)).ln() - 0.5 * (t + 0.01) < 0.0);
        assert!((2.0 + 3.0 * (t - 0.01)).ln() - 0.5 * (t - 0.01) > 0.0);
    }

    #[test]
    fn max_noncompetitive_time_steep_cost() {
        let f = fam(0, 1.0, 10.0, Rationality::Bounded);
        let t = max_noncompetitive_time(&f, CAP).hours();
        assert_relative_eq!(t, 0.0729, epsilon = 1e-3);
        assert!(((2.0 + t).ln() - 10.0 * t).abs() < 1e-8);
    }

    #[test]
    fn max_noncompetitive_time_no_root_below_cap() {
        // Tiny cost: utility still positive at the cap.
        let f = fam(0, 3.0, 0.01, Rationality::Bounded);
        assert_eq!(max_noncompetitive_time(&f, CAP).hours(), CAP);
    }

    #[test]
    fn decide_effort_bounded_never_quits() {
        let f = fam(0, 3.0, 0.5, Rationality::Bounded);
        let d = decide_effort(&f, 3.0, 0.0, CAP);
        assert_relative_eq!(d.effort(), 7.0 / 3.0);
        // Huge cutoff: still studying.
        let d = decide_effort(&f, 100.0, 0.0, CAP);
        assert!(d.effort() > 0.0);
    }

    #[test]
    fn decide_effort_rational_quits_when_utility_negative() {
        let f = fam(0, 3.0, 0.5, Rationality::Rational);
        // s_cut = 20 gives t* = 8 and u = ln 6 - 4 < 0.
        assert_eq!(decide_effort(&f, 20.0, 0.0, CAP), EffortDecision::Quit);
        // s_cut = 0: interior optimum with positive utility.
        let d = decide_effort(&f, 0.0, 0.0, CAP);
        assert_relative_eq!(d.effort(), 4.0 / 3.0);
    }

    fn homogeneous(n: usize, gamma: f64, p: f64) -> Vec<FamilyParams> {
        (0..n)
            .map(|i| fam(i as u32, gamma, p, Rationality::Bounded))
            .collect()
    }

    #[test]
    fn homogeneous_cutoff_climbs_by_four() {
        // γ = 3, P = 0.5, k = 0: increment mean(γ/P) − 2 = 4 per round.
        let families = homogeneous(10, 3.0, 0.5);
        let cfg = SimConfig {
            threshold: ThresholdSpec::MeanPlusKSigma { k: 0.0 },
            initial_effort: 2.0,
            rounds_max: 5,
            divergence_cap: 1e6,
            quit_payoff: 0.0,
            t_hard_cap: 1e9,
            include_quitters_in_pool: false,
        };
        let trace = simulate_families(&families, &cfg).unwrap();
        for w in trace.rounds.windows(2) {
            assert_relative_eq!(w[1].s_cut - w[0].s_cut, 4.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn sigma_constant_under_interior_responses() {
        let families = vec![
            fam(0, 3.0, 0.5, Rationality::Bounded),
            fam(1, 4.0, 0.5, Rationality::Bounded),
            fam(2, 5.0, 0.5, Rationality::Bounded),
        ];
        let expected_sigma = model::stats::pop_stdev(&[6.0, 8.0, 10.0]);
        let cfg = SimConfig {
            threshold: ThresholdSpec::MeanPlusKSigma { k: 1.645 },
            initial_effort: 2.0,
            rounds_max: 8,
            divergence_cap: 1e6,
            quit_payoff: 0.0,
            t_hard_cap: 1e9,
            include_quitters_in_pool: false,
        };
        let trace = simulate_families(&families, &cfg).unwrap();
        for r in &trace.rounds[1..] {
            assert_relative_eq!(r.sigma_s, expected_sigma, epsilon = 1e-9);
        }
    }

    #[test]
    fn stationary_when_mean_gamma_over_p_is_two() {
        // γ/P = 2 for everyone: the increment formula is zero.
        let families = homogeneous(4, 1.0, 0.5);
        let cfg = SimConfig {
            threshold: ThresholdSpec::MeanPlusKSigma { k: 0.0 },
            initial_effort: 2.0,
            rounds_max: 10,
            divergence_cap: 1e6,
            quit_payoff: 0.0,
            t_hard_cap: CAP,
            include_quitters_in_pool: false,
        };
        let trace = simulate_families(&families, &cfg).unwrap();
        assert_eq!(trace.termination, Termination::Converged);
        let last = trace.rounds.last().unwrap();
        let prev = &trace.rounds[trace.rounds.len() - 2];
        assert_relative_eq!(last.s_cut, prev.s_cut, epsilon = 1e-9);
    }

    #[test]
    fn all_quit_ends_with_terminal_flag() {
        let families: Vec<_> = (0..3)
            .map(|i| fam(i, 3.0, 0.5, Rationality::Rational))
            .collect();
        let cfg = SimConfig {
            threshold: ThresholdSpec::Fixed { value: 50.0 },
            initial_effort: 2.0,
            rounds_max: 5,
            divergence_cap: 1e6,
            quit_payoff: 0.0,
            t_hard_cap: CAP,
            include_quitters_in_pool: false,
        };
        let trace = simulate_families(&families, &cfg).unwrap();
        assert_eq!(trace.termination, Termination::AllQuit);
        let report = welfare_report(&trace);
        assert_eq!(report.final_welfare_total, 0.0);
        assert_eq!(report.final_mean_effort, 0.0);
        assert_eq!(report.quit_fraction, 1.0);
    }

    #[test]
    fn rounds_max_one_gives_two_records() {
        let families = homogeneous(3, 3.0, 0.5);
        let cfg = SimConfig {
            threshold: ThresholdSpec::MeanPlusKSigma { k: 0.0 },
            initial_effort: 2.0,
            rounds_max: 1,
            divergence_cap: 1e6,
            quit_payoff: 0.0,
            t_hard_cap: CAP,
            include_quitters_in_pool: false,
        };
        let trace = simulate_families(&families, &cfg).unwrap();
        assert_eq!(trace.rounds.len(), 2);
    }

    #[test]
    fn determinism_bit_identical() {
        let pop = PopulationSpec {
            n: 20,
            gamma_dist: ParamDist::Uniform { lo: 2.0, hi: 6.0 },
            p_dist: ParamDist::constant(0.5),
            rationality: Rationality::Bounded,
            seed: 42,
        };
        let cfg = SimConfig {
            threshold: ThresholdSpec::MeanPlusKSigma { k: 1.0 },
            initial_effort: 2.0,
            rounds_max: 10,
            divergence_cap: 1e6,
            quit_payoff: 0.0,
            t_hard_cap: CAP,
            include_quitters_in_pool: false,
        };
        let a = simulate_feedback(&pop, &cfg).unwrap();
        let b = simulate_feedback(&pop, &cfg).unwrap();
        assert_eq!(a, b);
        // Different seed, different draw.
        let pop2 = PopulationSpec { seed: 43, ..pop };
        assert_ne!(simulate_feedback(&pop2, &cfg).unwrap(), a);
    }

    #[test]
    fn efforts_stay_in_bounds() {
        let families = homogeneous(5, 6.0, 0.2);
        let cfg = SimConfig {
            threshold: ThresholdSpec::MeanPlusKSigma { k: 1.645 },
            initial_effort: 2.0,
            rounds_max: 50,
            divergence_cap: 1e9,
            quit_payoff: 0.0,
            t_hard_cap: CAP,
            include_quitters_in_pool: false,
        };
        let trace = simulate_families(&families, &cfg).unwrap();
        for r in &trace.rounds {
            for &t in &r.efforts {
                assert!((0.0..=CAP).contains(&t));
            }
        }
        assert_eq!(trace.termination, Termination::Diverged);
    }

    #[test]
    fn welfare_single_family_threshold_shift() {
        // A lone family's effort and utility shift as the cutoff moves 0 -> 3.
        let f = fam(0, 3.0, 0.5, Rationality::Bounded);
        let t0 = best_response_population(&f, 0.0, CAP);
        let t3 = best_response_population(&f, 3.0, CAP);
        assert_relative_eq!((t3.hours() - t0.hours()) / t0.hours(), 0.75, epsilon = 1e-12);
        let u0 = model::utility(&f, t0, 0.0).utility;
        let u3 = model::utility(&f, t3, 3.0).utility;
        assert_relative_eq!(u0, 1.1251, epsilon = 5e-4);
        assert_relative_eq!(u3, 0.6251, epsilon = 5e-4);
        assert_relative_eq!((u0 - u3) / u0, 0.4444, epsilon = 1e-3);
    }

    #[test]
    fn explicit_dist_length_mismatch_errors() {
        let pop = PopulationSpec {
            n: 3,
            gamma_dist: ParamDist::Explicit {
                values: vec![1.0, 2.0],
            },
            p_dist: ParamDist::constant(0.5),
            rationality: Rationality::Bounded,
            seed: 0,
        };
        assert!(pop.sample().is_err());
    }

    #[test]
    fn sampled_params_positive() {
        let pop = PopulationSpec {
            n: 50,
            gamma_dist: ParamDist::Normal {
                mean: 4.0,
                sd: 1.5,
                min: 0.1,
            },
            p_dist: ParamDist::LogNormal {
                mu: -0.7,
                sigma: 0.3,
            },
            rationality: Rationality::Bounded,
            seed: 7,
        };
        for f in pop.sample().unwrap() {
            assert!(f.gamma > 0.0 && f.p > 0.0);
        }
    }
}
