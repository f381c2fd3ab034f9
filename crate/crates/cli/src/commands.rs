//! Subcommand implementations. Each run writes its tables into the output
//! directory and echoes the effective configuration for exact re-ingestion.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, Result};
use serde_json::json;

use edurace::equilibrium::{
    analyze_dominance, best_response_dynamics, build_obey_disobey_game, default_reference_profile,
    Action, GameCell, TwoFamilySetup, ACTIONS,
};
use edurace::export::{write_trace_csv, write_trace_jsonl};
use edurace::model::{self, Effort, FamilyParams, Rationality};
use edurace::policy::{
    compare_policies, run_beta_reduction, run_cee_baseline, run_diversion, run_exam_redesign,
    PolicyReport, PolicyScenario,
};
use edurace::population::{best_response_population, simulate_families, Termination};
use edurace::signaling::WageModel;
use edurace::Error as CoreError;

use crate::config::{
    scenario_label, Figure1Config, Figure2Config, GameConfig, PolicyConfig, RunConfig,
    SimulateConfig,
};
use crate::emit::{t3, u4, Emitter};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DEGENERATE: i32 = 2;

fn action_name(a: Action) -> &'static str {
    match a {
        Action::Obey => "obey",
        Action::Disobey => "disobey",
    }
}

/// Echo the effective config so the run can be reproduced by re-ingesting it.
pub fn echo_config(emitter: &Emitter, cfg: &RunConfig) -> Result<()> {
    emitter.write_text("config_echo.toml", &toml::to_string_pretty(cfg)?)
}

pub fn cmd_game(cfg: &GameConfig, emitter: &Emitter) -> Result<i32> {
    let fam1 = FamilyParams::new(1, cfg.gamma1, cfg.p1, Rationality::Bounded)?;
    let fam2 = FamilyParams::new(2, cfg.gamma2, cfg.p2, Rationality::Bounded)?;
    let setup = TwoFamilySetup::new(fam1, fam2, Effort::new(cfg.t_obey)?)?;
    let cap = cfg.t_hard_cap;

    let game = build_obey_disobey_game(&setup, cap);
    let reference = default_reference_profile(&setup, cap);
    let report = analyze_dominance(&game, reference);
    let t0 = cfg.t0.unwrap_or([cfg.t_obey, cfg.t_obey]);
    let dynamics = best_response_dynamics(&setup, (t0[0], t0[1]), cfg.dynamics_rounds, cfg.scheme, cap);

    // Payoff table, one row per cell.
    let mut rows = Vec::new();
    let mut jsonl = Vec::new();
    for a1 in ACTIONS {
        for a2 in ACTIONS {
            let key = format!("cell_{}_{}", action_name(a1), action_name(a2));
            let cell = game.cell(a1, a2);
            let (u1s, u2s, kind, rate) = match cell {
                GameCell::Finite { u1, u2 } => {
                    (u4(*u1), u4(*u2), "finite".to_string(), String::new())
                }
                GameCell::Divergent {
                    escalation_rate,
                    u1_of_t2,
                    u2_of_t1,
                } => (
                    u1_of_t2.to_string(),
                    u2_of_t1.to_string(),
                    "divergent".to_string(),
                    t3(*escalation_rate),
                ),
            };
            rows.push(vec![
                key.clone(),
                action_name(a1).into(),
                action_name(a2).into(),
                u1s,
                u2s,
                kind,
                rate,
            ]);
            jsonl.push(json!({
                "key": key,
                "family1_action": action_name(a1),
                "family2_action": action_name(a2),
                "cell": cell,
            }));
        }
    }
    let headers = [
        "key",
        "family1_action",
        "family2_action",
        "u1",
        "u2",
        "kind",
        "escalation_rate",
    ];
    emitter.write_csv("game_payoffs.csv", &headers, &rows)?;
    emitter.write_md("game_payoffs.md", &headers, &rows)?;
    emitter.write_jsonl("game.jsonl", &jsonl)?;

    // Dominance report.
    let mut dom_rows = Vec::new();
    for (fam, name) in [(0usize, "family1"), (1usize, "family2")] {
        for (opp, opp_name) in [(0usize, "obey"), (1usize, "disobey")] {
            dom_rows.push(vec![
                format!("{name}_vs_{opp_name}"),
                u4(report.disobey_gain[fam][opp]),
                report.disobey_strictly_improves[fam][opp].to_string(),
            ]);
        }
    }
    let nash = if report.pure_nash.is_empty() {
        "none".to_string()
    } else {
        report
            .pure_nash
            .iter()
            .map(|(a, b)| format!("({}, {})", action_name(*a), action_name(*b)))
            .collect::<Vec<_>>()
            .join("; ")
    };
    let mut dom_md = edurace::export::markdown_table(
        &["switch", "disobey_gain", "strict_improvement"],
        &dom_rows,
    );
    dom_md.push_str(&format!(
        "\npure Nash equilibria among finite cells: {nash}\n"
    ));
    for (a1, a2) in &report.no_finite_equilibrium {
        dom_md.push_str(&format!(
            "({}, {}): no finite equilibrium; payoffs stay parametric. \
             Intercepts use the first-order-condition value ln(γ/(2P)).\n",
            action_name(*a1),
            action_name(*a2)
        ));
    }
    emitter.write_text("game_dominance.md", &dom_md)?;
    emitter.write_csv(
        "game_dominance.csv",
        &["switch", "disobey_gain", "strict_improvement"],
        &dom_rows,
    )?;

    // Best-response dynamics trace.
    let dyn_rows: Vec<Vec<String>> = dynamics
        .profiles
        .iter()
        .enumerate()
        .map(|(i, (t1, t2))| vec![i.to_string(), t3(*t1), t3(*t2)])
        .collect();
    emitter.write_csv("game_dynamics.csv", &["round", "t1", "t2"], &dyn_rows)?;

    println!("game: payoff table, dominance report, and dynamics written");
    println!("dynamics stop: {:?} after {} profiles", dynamics.stop, dynamics.profiles.len());
    Ok(EXIT_OK)
}

fn effort_grid(t_max: f64, step: f64) -> Vec<f64> {
    let mut ts = Vec::new();
    let mut i = 0usize;
    loop {
        let t = i as f64 * step;
        if t >= t_max - 1e-12 {
            break;
        }
        ts.push(t);
        i += 1;
    }
    ts.push(t_max); // endpoint included exactly
    ts
}

pub fn cmd_figure1(cfg: &Figure1Config, emitter: &Emitter) -> Result<i32> {
    let fam = FamilyParams::new(0, cfg.gamma, cfg.p, Rationality::Bounded)?;
    let grid = effort_grid(cfg.t_max, cfg.step);

    let mut curve_rows = Vec::new();
    let mut argmax_rows = Vec::new();
    let mut jsonl = Vec::new();
    for &s_cut in &cfg.s_cut_values {
        for &t in &grid {
            let u = model::utility(&fam, Effort::new(t)?, s_cut).utility;
            curve_rows.push(vec![t3(s_cut), t3(t), u4(u)]);
        }
        let t_star = best_response_population(&fam, s_cut, cfg.t_max).hours();
        let u_star = model::utility(&fam, Effort::new(t_star)?, s_cut).utility;
        argmax_rows.push(vec![t3(s_cut), t3(t_star), u4(u_star)]);
        jsonl.push(json!({
            "s_cut": s_cut,
            "t_star": t_star,
            "u_star": u_star,
        }));
    }
    emitter.write_csv("figure1_curves.csv", &["s_cut", "t", "u"], &curve_rows)?;
    emitter.write_csv("figure1_argmax.csv", &["s_cut", "t_star", "u_star"], &argmax_rows)?;
    emitter.write_md("figure1_argmax.md", &["s_cut", "t_star", "u_star"], &argmax_rows)?;
    emitter.write_jsonl("figure1.jsonl", &jsonl)?;
    println!("figure1: {} curves over {} grid points", cfg.s_cut_values.len(), grid.len());
    Ok(EXIT_OK)
}

pub fn cmd_figure2(cfg: &Figure2Config, emitter: &Emitter) -> Result<i32> {
    let fam = FamilyParams::new(0, cfg.gamma, cfg.p, Rationality::Bounded)?;
    let grid = effort_grid(cfg.t_max, cfg.step);

    let mut scut_rows = Vec::new();
    let mut curve_rows = Vec::new();
    let mut jsonl = Vec::new();
    for &sigma in &cfg.sigma_values {
        let s_cut = cfg.mean_score + cfg.k * sigma;
        scut_rows.push(vec![t3(sigma), t3(s_cut)]);
        jsonl.push(json!({ "sigma": sigma, "s_cut": s_cut }));
        for &t in &grid {
            let u = model::utility(&fam, Effort::new(t)?, s_cut).utility;
            curve_rows.push(vec![t3(sigma), t3(s_cut), t3(t), u4(u)]);
        }
    }
    emitter.write_csv("figure2_scut.csv", &["sigma", "s_cut"], &scut_rows)?;
    emitter.write_md("figure2_scut.md", &["sigma", "s_cut"], &scut_rows)?;
    emitter.write_csv("figure2_curves.csv", &["sigma", "s_cut", "t", "u"], &curve_rows)?;
    emitter.write_jsonl("figure2.jsonl", &jsonl)?;
    println!("figure2: cutoffs for {} dispersion values", cfg.sigma_values.len());
    Ok(EXIT_OK)
}

pub fn cmd_simulate(cfg: &SimulateConfig, emitter: &Emitter) -> Result<i32> {
    let families = cfg.population.sample()?;
    let trace = simulate_families(&families, &cfg.sim)?;

    if emitter.wants(crate::emit::Format::Jsonl) {
        let mut f = std::fs::File::create(emitter.path("trace.jsonl"))?;
        write_trace_jsonl(&trace, &mut f)?;
    }
    if emitter.wants(crate::emit::Format::Csv) {
        let f = std::fs::File::create(emitter.path("trace.csv"))?;
        write_trace_csv(&trace, f)?;
    }

    let summary = edurace::population::welfare_report(&trace);
    emitter.write_jsonl("welfare.jsonl", &[&summary])?;
    emitter.write_csv(
        "welfare.csv",
        &[
            "final_s_cut",
            "final_mean_effort",
            "final_welfare_total",
            "final_welfare_mean",
            "exhausted_fraction",
            "quit_fraction",
            "termination",
        ],
        &[vec![
            t3(summary.final_s_cut),
            t3(summary.final_mean_effort),
            u4(summary.final_welfare_total),
            u4(summary.final_welfare_mean),
            u4(summary.exhausted_fraction),
            u4(summary.quit_fraction),
            format!("{:?}", summary.termination).to_lowercase(),
        ]],
    )?;

    println!(
        "simulate: {} rounds, termination {:?}, final cutoff {:.3}",
        trace.rounds.len(),
        trace.termination,
        summary.final_s_cut
    );
    match trace.termination {
        Termination::Converged | Termination::MaxRounds => Ok(EXIT_OK),
        Termination::Diverged | Termination::AllQuit => Ok(EXIT_DEGENERATE),
    }
}

struct ScenarioOutcome {
    label: String,
    reports: Vec<(String, PolicyReport)>,
    extra: Option<String>,
    degenerate: Option<String>,
}

fn run_scenario(
    idx: usize,
    scenario: &PolicyScenario,
    families: &[FamilyParams],
    sim: &edurace::population::SimConfig,
) -> Result<ScenarioOutcome> {
    let label = scenario_label(idx, scenario);
    let outcome = match scenario {
        PolicyScenario::CeeBaseline => {
            let (report, _) = run_cee_baseline(families, sim)?;
            ScenarioOutcome {
                label: label.clone(),
                reports: vec![(label, report)],
                extra: None,
                degenerate: None,
            }
        }
        PolicyScenario::Diversion {
            keep_fraction,
            subsidy,
        } => match run_diversion(families, sim, *keep_fraction, *subsidy) {
            Ok((report, _)) => ScenarioOutcome {
                label: label.clone(),
                reports: vec![(label, report)],
                extra: None,
                degenerate: None,
            },
            Err(CoreError::DegeneratePool { retained }) => ScenarioOutcome {
                label: label.clone(),
                reports: vec![],
                extra: None,
                degenerate: Some(format!("degenerate pool: {retained} families retained")),
            },
            Err(e) => return Err(e.into()),
        },
        PolicyScenario::BetaReduction {
            beta_before,
            beta_after,
            s_cut,
            wage_p,
            w_high,
            w_low,
        } => {
            let wages = WageModel::new(*w_high, *w_low, *beta_before)?;
            let out =
                run_beta_reduction(families, &wages, *beta_before, *beta_after, *s_cut, *wage_p)?;
            ScenarioOutcome {
                label: label.clone(),
                reports: vec![
                    (format!("{label}_before"), out.before),
                    (format!("{label}_after"), out.after),
                ],
                extra: Some(format!(
                    "score dispersion {} -> {}",
                    u4(out.dispersion_before),
                    u4(out.dispersion_after)
                )),
                degenerate: None,
            }
        }
        PolicyScenario::ExamRedesign { aptitude_weight } => {
            let (out, _) = run_exam_redesign(families, sim, *aptitude_weight)?;
            ScenarioOutcome {
                label: label.clone(),
                reports: vec![(label, out.report)],
                extra: Some(format!(
                    "mean effort reduction vs baseline: {}",
                    t3(out.mean_effort_reduction)
                )),
                degenerate: None,
            }
        }
    };
    Ok(outcome)
}

pub fn cmd_policy(cfg: &PolicyConfig, emitter: &Emitter, workers: usize) -> Result<i32> {
    let families = cfg.population.sample()?;

    // Run scenarios concurrently up to the worker limit; results land in
    // their input slot so output order is deterministic.
    let n = cfg.scenarios.len();
    let slots: Mutex<Vec<Option<Result<ScenarioOutcome>>>> = Mutex::new((0..n).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers.max(1).min(n) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = run_scenario(i, &cfg.scenarios[i], &families, &cfg.sim);
                slots.lock().unwrap()[i] = Some(out);
            });
        }
    });
    let outcomes: Vec<ScenarioOutcome> = slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|o| o.expect("scenario slot filled"))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    let headers = [
        "label",
        "welfare_total",
        "welfare_mean",
        "s_cut_final",
        "mean_effort",
        "participation_share",
        "utility_gini",
        "excluded_utility_gap",
        "note",
    ];
    let mut rows = Vec::new();
    let mut jsonl = Vec::new();
    let mut labelled_reports = Vec::new();
    let mut any_degenerate = false;
    for out in &outcomes {
        if let Some(msg) = &out.degenerate {
            any_degenerate = true;
            eprintln!("{}: {msg}", out.label);
            rows.push(vec![
                out.label.clone(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                msg.clone(),
            ]);
            jsonl.push(json!({ "label": out.label, "error": msg }));
            continue;
        }
        for (label, report) in &out.reports {
            rows.push(vec![
                label.clone(),
                u4(report.welfare_total),
                u4(report.welfare_mean),
                t3(report.s_cut_final),
                t3(report.mean_effort),
                u4(report.equity.participation_share),
                u4(report.equity.utility_gini),
                u4(report.equity.excluded_utility_gap),
                out.extra.clone().unwrap_or_default(),
            ]);
            jsonl.push(json!({ "label": label, "report": report, "note": out.extra }));
            labelled_reports.push((label.clone(), *report));
        }
    }
    emitter.write_csv("policy_reports.csv", &headers, &rows)?;
    emitter.write_md("policy_reports.md", &headers, &rows)?;
    emitter.write_jsonl("policy_reports.jsonl", &jsonl)?;

    if labelled_reports.len() >= 2 {
        let table = compare_policies(&labelled_reports)?;
        let cmp_rows: Vec<Vec<String>> = table
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.label.clone(),
                    u4(r.report.welfare_total),
                    u4(r.report.equity.participation_share),
                    u4(r.report.equity.utility_gini),
                ]
            })
            .collect();
        let cmp_headers = ["label", "welfare_total", "participation_share", "utility_gini"];
        emitter.write_csv("policy_compare.csv", &cmp_headers, &cmp_rows)?;
        let mut md = edurace::export::markdown_table(&cmp_headers, &cmp_rows);
        for flag in &table.trade_offs {
            md.push_str(&format!(
                "trade-off: {} has higher welfare, {} has higher participation\n",
                flag.higher_welfare, flag.higher_participation
            ));
        }
        emitter.write_md("policy_compare.md", &cmp_headers, &cmp_rows)?;
        emitter.write_text("policy_tradeoffs.md", &md)?;
    }

    println!("policy: {} scenarios, {} report rows", n, labelled_reports.len());
    Ok(if any_degenerate { EXIT_DEGENERATE } else { EXIT_OK })
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<i32> {
    // Parsing and validation already happened on load; re-run validation for
    // the explicit exit status.
    cfg.validate().map_err(|e| anyhow!(e))?;
    println!("config OK");
    Ok(EXIT_OK)
}
