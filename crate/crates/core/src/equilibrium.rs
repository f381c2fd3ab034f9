//! Two-family best responses, the 2x2 obey/disobey strategic game, dominance
//! analysis, and best-response-dynamics escalation detection.
//!
//! The two-family cutoff is always the average of both scores. Mutual
//! disobedience generically has no finite fixed point: composing the two
//! best-response lines shifts each effort by a constant per round-trip, so the
//! cell is reported as divergent with its parametric payoffs instead of a
//! fabricated number.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, Effort, FamilyParams};

/// Simultaneous-move action in the burden-reduction game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Obey,
    Disobey,
}

pub const ACTIONS: [Action; 2] = [Action::Obey, Action::Disobey];

impl Action {
    pub fn index(self) -> usize {
        match self {
            Action::Obey => 0,
            Action::Disobey => 1,
        }
    }
}

/// The two competing families plus the policy-compliant study time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoFamilySetup {
    pub fam1: FamilyParams,
    pub fam2: FamilyParams,
    pub t_obey: Effort,
}

impl TwoFamilySetup {
    pub fn new(fam1: FamilyParams, fam2: FamilyParams, t_obey: Effort) -> Result<Self> {
        if t_obey.hours() <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "t_obey must be > 0, got {}",
                t_obey.hours()
            )));
        }
        Ok(Self { fam1, fam2, t_obey })
    }
}

/// A payoff that is affine in the opponent's effort: `intercept + slope * t_opp`.
///
/// This is the symbolic form a disobeying family's utility takes when its own
/// effort is already substituted out via the best-response line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffinePayoff {
    pub intercept: f64,
    pub slope: f64,
}

impl AffinePayoff {
    pub fn eval(&self, t_opp: f64) -> f64 {
        self.intercept + self.slope * t_opp
    }
}

impl fmt::Display for AffinePayoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4} {} {:.4}·t_opp", self.intercept, if self.slope < 0.0 { "-" } else { "+" }, self.slope.abs())
    }
}

/// One cell of the 2x2 game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GameCell {
    Finite { u1: f64, u2: f64 },
    /// No finite mutual best response exists. `escalation_rate` is family 1's
    /// effort increase per best-response round-trip; payoffs stay parametric
    /// in the opponent's effort.
    Divergent {
        escalation_rate: f64,
        u1_of_t2: AffinePayoff,
        u2_of_t1: AffinePayoff,
    },
}

impl GameCell {
    pub fn is_divergent(&self) -> bool {
        matches!(self, GameCell::Divergent { .. })
    }

    /// Payoff for `family` (0 or 1); divergent cells are evaluated at the
    /// reference profile.
    pub fn payoff(&self, family: usize, reference_profile: (f64, f64)) -> f64 {
        match self {
            GameCell::Finite { u1, u2 } => {
                if family == 0 {
                    *u1
                } else {
                    *u2
                }
            }
            GameCell::Divergent {
                u1_of_t2, u2_of_t1, ..
            } => {
                if family == 0 {
                    u1_of_t2.eval(reference_profile.1)
                } else {
                    u2_of_t1.eval(reference_profile.0)
                }
            }
        }
    }
}

/// The 2x2 obey/disobey game; `cells[a1][a2]` indexed by action index of
/// family 1 then family 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObeyDisobeyGame {
    pub setup: TwoFamilySetup,
    pub cells: [[GameCell; 2]; 2],
}

impl ObeyDisobeyGame {
    pub fn cell(&self, a1: Action, a2: Action) -> &GameCell {
        &self.cells[a1.index()][a2.index()]
    }
}

/// Derivative of family i's utility in its own effort, tagged by branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarginalUtility {
    /// Family i is at or above the two-family cutoff: `(γᵢ/2)/x − Pᵢ`.
    PassBranch(f64),
    /// Family i is below the cutoff; the fail branch slope is `−Pᵢ`.
    FailBranch(f64),
}

/// Marginal utility of family i's study time under the two-family average
/// cutoff, at the profile `(t_i, t_j)`.
pub fn marginal_utility_two_family(
    fam_i: &FamilyParams,
    fam_j: &FamilyParams,
    t_i: Effort,
    t_j: Effort,
) -> MarginalUtility {
    let si = fam_i.gamma * t_i.hours();
    let sj = fam_j.gamma * t_j.hours();
    let x = 2.0 + si - (si + sj) / 2.0;
    if x <= 0.0 {
        MarginalUtility::FailBranch(-fam_i.p)
    } else {
        MarginalUtility::PassBranch((fam_i.gamma / 2.0) / x - fam_i.p)
    }
}

/// Closed-form best response of family i against opponent effort `t_j` under
/// the two-family average cutoff, clamped into `[0, cap]`.
pub fn best_response_two_family(
    fam_i: &FamilyParams,
    gamma_j: f64,
    t_j: Effort,
    cap: f64,
) -> Effort {
    let t = 1.0 / fam_i.p + (gamma_j * t_j.hours() - 4.0) / fam_i.gamma;
    Effort::clamped(t, cap)
}

/// Numeric argmax of an arbitrary utility function over `[0, cap]`.
///
/// Dense grid scan followed by golden-section polish of the bracketing
/// interval; accurate to about 1e-6 hours for smooth unimodal segments. Ties
/// break to the leftmost maximizer.
pub fn best_response_numeric_oracle<F: Fn(f64) -> f64>(utility_fn: F, cap: f64) -> f64 {
    const GRID: usize = 4096;
    let h = cap / GRID as f64;
    let mut best_i = 0;
    let mut best_v = utility_fn(0.0);
    for i in 1..=GRID {
        let v = utility_fn(i as f64 * h);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = ((best_i as f64 - 1.0) * h).max(0.0);
    let b = ((best_i as f64 + 1.0) * h).min(cap);
    let polished = golden_max(&utility_fn, a, b, 1e-9);

    // Leftmost tie-break among the candidates.
    let mut arg = 0.0;
    let mut val = utility_fn(0.0);
    for cand in [polished, best_i as f64 * h, cap] {
        let v = utility_fn(cand);
        if v > val + 1e-12 || (v > val && cand < arg) {
            val = v;
            arg = cand;
        }
    }
    arg
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Family 1's effort shift per best-response round-trip in the mutual-disobey
/// cell: `(γ₁/P₁ + γ₂/P₂ − 8)/γ₁`. Zero means every consistent profile is a
/// fixed point; any other value means the cell diverges.
pub fn escalation_shift(setup: &TwoFamilySetup) -> f64 {
    (setup.fam1.gamma / setup.fam1.p + setup.fam2.gamma / setup.fam2.p - 8.0) / setup.fam1.gamma
}

fn finite_cell(setup: &TwoFamilySetup, t1: Effort, t2: Effort) -> GameCell {
    let s1 = model::score(setup.fam1.gamma, t1);
    let s2 = model::score(setup.fam2.gamma, t2);
    let s_cut = (s1 + s2) / 2.0;
    GameCell::Finite {
        u1: model::utility(&setup.fam1, t1, s_cut).utility,
        u2: model::utility(&setup.fam2, t2, s_cut).utility,
    }
}

/// Substituting the best-response line into the pass-branch utility gives an
/// affine function of the opponent's effort:
/// `ln(γ/(2P)) − 1 + 4P/γ − (P·γ_j/γ)·t_j`.
fn disobey_parametric(fam: &FamilyParams, gamma_j: f64) -> AffinePayoff {
    AffinePayoff {
        intercept: (fam.gamma / (2.0 * fam.p)).ln() - 1.0 + 4.0 * fam.p / fam.gamma,
        slope: -(fam.p * gamma_j) / fam.gamma,
    }
}

/// Build the full 2x2 obey/disobey game.
pub fn build_obey_disobey_game(setup: &TwoFamilySetup, cap: f64) -> ObeyDisobeyGame {
    let t_obey = setup.t_obey;
    let br1 = best_response_two_family(&setup.fam1, setup.fam2.gamma, t_obey, cap);
    let br2 = best_response_two_family(&setup.fam2, setup.fam1.gamma, t_obey, cap);

    let oo = finite_cell(setup, t_obey, t_obey);
    let d_o = finite_cell(setup, br1, t_obey);
    let o_d = finite_cell(setup, t_obey, br2);

    let shift = escalation_shift(setup);
    let dd = if shift.abs() < 1e-12 {
        // Every consistent profile is a fixed point; take the one reachable
        // from (t_obey, t_obey) by alternating best responses.
        let t1 = best_response_two_family(&setup.fam1, setup.fam2.gamma, t_obey, cap);
        let t2 = best_response_two_family(&setup.fam2, setup.fam1.gamma, t1, cap);
        finite_cell(setup, t1, t2)
    } else {
        GameCell::Divergent {
            escalation_rate: shift.abs(),
            u1_of_t2: disobey_parametric(&setup.fam1, setup.fam2.gamma),
            u2_of_t1: disobey_parametric(&setup.fam2, setup.fam1.gamma),
        }
    };

    ObeyDisobeyGame {
        setup: *setup,
        cells: [[oo, o_d], [d_o, dd]],
    }
}

/// Mutual best responses after one round from `(t_obey, t_obey)`; the default
/// profile at which divergent cells are evaluated for comparisons.
pub fn default_reference_profile(setup: &TwoFamilySetup, cap: f64) -> (f64, f64) {
    (
        best_response_two_family(&setup.fam1, setup.fam2.gamma, setup.t_obey, cap).hours(),
        best_response_two_family(&setup.fam2, setup.fam1.gamma, setup.t_obey, cap).hours(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub reference_profile: (f64, f64),
    /// `disobey_gain[f][a]`: family f's payoff change from switching Obey to
    /// Disobey while the opponent plays action index `a`.
    pub disobey_gain: [[f64; 2]; 2],
    pub disobey_strictly_improves: [[bool; 2]; 2],
    /// Pure Nash equilibria among finite cells (divergent cells excluded as
    /// candidates but included, at the reference profile, as deviations).
    pub pure_nash: Vec<(Action, Action)>,
    /// Divergent cells: no finite equilibrium exists there.
    pub no_finite_equilibrium: Vec<(Action, Action)>,
}

/// Per-family dominance of Disobey, plus pure-Nash classification.
pub fn analyze_dominance(game: &ObeyDisobeyGame, reference_profile: (f64, f64)) -> DominanceReport {
    let payoff = |a1: usize, a2: usize, fam: usize| game.cells[a1][a2].payoff(fam, reference_profile);

    let mut gain = [[0.0f64; 2]; 2];
    let mut strict = [[false; 2]; 2];
    for opp in 0..2 {
        gain[0][opp] = payoff(1, opp, 0) - payoff(0, opp, 0);
        strict[0][opp] = gain[0][opp] > 0.0;
        gain[1][opp] = payoff(opp, 1, 1) - payoff(opp, 0, 1);
        strict[1][opp] = gain[1][opp] > 0.0;
    }

    let mut pure_nash = Vec::new();
    let mut no_finite = Vec::new();
    for a1 in ACTIONS {
        for a2 in ACTIONS {
            let (i, j) = (a1.index(), a2.index());
            if game.cells[i][j].is_divergent() {
                no_finite.push((a1, a2));
                continue;
            }
            let stable1 = payoff(i, j, 0) >= payoff(1 - i, j, 0);
            let stable2 = payoff(i, j, 1) >= payoff(i, 1 - j, 1);
            if stable1 && stable2 {
                pure_nash.push((a1, a2));
            }
        }
    }

    DominanceReport {
        reference_profile,
        disobey_gain: gain,
        disobey_strictly_improves: strict,
        pure_nash,
        no_finite_equilibrium: no_finite,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateScheme {
    /// Both families respond to the previous round's profile.
    Simultaneous,
    /// Family 1 updates first; family 2 responds to the fresh value.
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsStop {
    CompletedRounds,
    Converged,
    CapReached,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsTrace {
    /// Effort profiles, starting with the initial one.
    pub profiles: Vec<(f64, f64)>,
    pub stop: DynamicsStop,
}

/// Iterated best-response updates from `t0`.
///
/// Terminates early when the profile repeats within 1e-9 or an effort hits
/// the hard cap.
pub fn best_response_dynamics(
    setup: &TwoFamilySetup,
    t0: (f64, f64),
    rounds: usize,
    scheme: UpdateScheme,
    cap: f64,
) -> DynamicsTrace {
    let mut profiles = vec![t0];
    let mut cur = t0;
    let mut stop = DynamicsStop::CompletedRounds;
    for _ in 0..rounds {
        let next = match scheme {
            UpdateScheme::Simultaneous => (
                best_response_two_family(
                    &setup.fam1,
                    setup.fam2.gamma,
                    Effort::clamped(cur.1, cap),
                    cap,
                )
                .hours(),
                best_response_two_family(
                    &setup.fam2,
                    setup.fam1.gamma,
                    Effort::clamped(cur.0, cap),
                    cap,
                )
                .hours(),
            ),
            UpdateScheme::Alternating => {
                let t1 = best_response_two_family(
                    &setup.fam1,
                    setup.fam2.gamma,
                    Effort::clamped(cur.1, cap),
                    cap,
                )
                .hours();
                let t2 = best_response_two_family(
                    &setup.fam2,
                    setup.fam1.gamma,
                    Effort::clamped(t1, cap),
                    cap,
                )
                .hours();
                (t1, t2)
            }
        };
        profiles.push(next);
        let delta = (next.0 - cur.0).abs().max((next.1 - cur.1).abs());
        cur = next;
        if delta < 1e-9 {
            stop = DynamicsStop::Converged;
            break;
        }
        if next.0 >= cap || next.1 >= cap {
            stop = DynamicsStop::CapReached;
            break;
        }
    }
    DynamicsTrace { profiles, stop }
}
