//! Allocation cores of characteristic functions and the profile-level core of
//! a game.
//!
//! Constraints with worth `-∞` are vacuous and dropped before any solve.

use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::charfn::CharFn;
use crate::coalition::Coalition;
use crate::error::{GameError, Result};
use crate::game::{FiniteGame, Profile, Settings};

#[derive(Debug, Clone, PartialEq)]
pub struct Allocation(pub Vec<f64>);

impl Allocation {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// `x(S)`.
    pub fn coalition_sum(&self, coalition: Coalition) -> f64 {
        coalition.members().map(|i| self.0[i]).sum()
    }

    /// `x(S)` for every coalition, indexed by bitmask.
    fn all_sums(&self) -> Vec<f64> {
        let n = self.0.len();
        let mut sums = vec![0.0; 1 << n];
        for mask in 1usize..(1 << n) {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = sums[mask & (mask - 1)] + self.0[low];
        }
        sums
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rejection {
    Efficiency { allocated: f64, worth: f64 },
    /// Lowest-bitmask coalition paid less than its worth.
    Blocked(Coalition),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Membership {
    Member,
    Rejected(Rejection),
}

impl Membership {
    pub fn is_member(self) -> bool {
        matches!(self, Membership::Member)
    }
}

fn check_length(v: &CharFn, x: &Allocation) -> Result<()> {
    if x.0.len() != v.n() {
        return Err(GameError::InvalidProfile(format!(
            "allocation has {} entries for {} players",
            x.0.len(),
            v.n()
        )));
    }
    if x.0.iter().any(|xi| !xi.is_finite()) {
        return Err(GameError::InvalidProfile("allocation entries must be finite".into()));
    }
    Ok(())
}

/// Efficiency within `epsilon`, then `x(S) ≥ v(S) - epsilon` for every proper
/// coalition in ascending bitmask order.
pub fn core_membership(v: &CharFn, x: &Allocation, epsilon: f64) -> Result<Membership> {
    check_length(v, x)?;
    let sums = x.all_sums();
    let grand = sums.len() - 1;
    if (sums[grand] - v.grand_worth()).abs() > epsilon {
        return Ok(Membership::Rejected(Rejection::Efficiency {
            allocated: sums[grand],
            worth: v.grand_worth(),
        }));
    }
    Ok(first_blocking(v, &sums, epsilon)
        .map_or(Membership::Member, |s| Membership::Rejected(Rejection::Blocked(s))))
}

fn first_blocking(v: &CharFn, sums: &[f64], epsilon: f64) -> Option<Coalition> {
    let worths = v.worths();
    (1..sums.len() - 1)
        .find(|&mask| sums[mask] < worths[mask] - epsilon)
        .map(|mask| Coalition::from_bits(mask as u32))
}

/// Efficient and individually rational.
pub fn imputation_check(v: &CharFn, x: &Allocation, epsilon: f64) -> Result<bool> {
    check_length(v, x)?;
    let total: f64 = x.0.iter().sum();
    Ok((total - v.grand_worth()).abs() <= epsilon
        && x
            .0
            .iter()
            .enumerate()
            .all(|(i, &xi)| xi >= v.worth(Coalition::singleton(i)) - epsilon))
}

/// `v(S) + v(N∖S) = v(N)` within `epsilon` for every `S`; any `-∞` worth fails.
pub fn is_constant_sum(v: &CharFn, epsilon: f64) -> bool {
    let n = v.n();
    let total = v.grand_worth();
    Coalition::all(n).all(|s| {
        let a = v.worth(s);
        let b = v.worth(s.complement(n));
        a.is_finite() && b.is_finite() && (a + b - total).abs() <= epsilon
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreReport {
    pub nonempty: bool,
    pub witness: Option<Allocation>,
    pub constant_sum: bool,
    pub blocking: Option<Coalition>,
}

impl CoreReport {
    pub fn to_json(&self, profile_core: Option<&[Profile]>) -> Value {
        let mut out = json!({
            "nonempty": self.nonempty,
            "witness": self.witness.as_ref().map(|w| w.0.clone()),
            "constant_sum": self.constant_sum,
        });
        if let Some(pc) = profile_core {
            out["profile_core"] = json!(pc);
        }
        out
    }
}

fn finite_constraints(v: &CharFn) -> impl Iterator<Item = (Coalition, f64)> + '_ {
    Coalition::all(v.n())
        .skip(1)
        .map(|s| (s, v.worth(s)))
        .filter(|(_, w)| w.is_finite())
}

// The simplex solver misbehaves on free variables, so every primal solve runs
// inside a box that is widened until the core (known non-empty) meets it.
const BOX_WIDENINGS: [f64; 4] = [1.0, 1e3, 1e6, 1e9];

fn base_box(v: &CharFn) -> f64 {
    1.0 + v.n() as f64 * finite_constraints(v).map(|(_, w)| w.abs()).sum::<f64>()
}

/// Builds the core polytope `x(N) = v(N)`, `x(S) ≥ v(S) (+ t)` inside `[-bound, bound]^n`.
fn core_problem(
    v: &CharFn,
    direction: OptimizationDirection,
    objective: impl Fn(usize) -> f64,
    bound: f64,
    slack: Option<f64>,
) -> (Problem, Vec<Variable>, Option<Variable>) {
    let mut problem = Problem::new(direction);
    let vars: Vec<Variable> = (0..v.n())
        .map(|i| problem.add_var(objective(i), (-bound, bound)))
        .collect();
    let t = slack.map(|w| problem.add_var(w, (-bound, 1.0)));
    let grand = Coalition::grand(v.n());
    for (s, w) in finite_constraints(v) {
        let mut terms: Vec<(Variable, f64)> = s.members().map(|i| (vars[i], 1.0)).collect();
        if s == grand {
            problem.add_constraint(terms, ComparisonOp::Eq, w);
        } else {
            if let Some(t) = t {
                terms.push((t, -1.0));
            }
            problem.add_constraint(terms, ComparisonOp::Ge, w);
        }
    }
    (problem, vars, t)
}

/// Largest `∑ λ_S v(S)` over balanced weights `∑_{S∋i} λ_S = 1`, `λ ≥ 0`,
/// ranging over coalitions with finite worth (always including `N`). By LP
/// duality this equals `min ∑x` subject to `x(S) ≥ v(S)`, so the core is
/// non-empty iff the value does not exceed `v(N)`.
fn balanced_maximum(v: &CharFn) -> Result<f64> {
    let n = v.n();
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let weights: Vec<(Coalition, Variable)> = finite_constraints(v)
        .map(|(s, w)| (s, problem.add_var(w, (0.0, 1.0))))
        .collect();
    for i in 0..n {
        let terms: Vec<(Variable, f64)> = weights
            .iter()
            .filter(|(s, _)| s.contains(i))
            .map(|&(_, l)| (l, 1.0))
            .collect();
        problem.add_constraint(terms, ComparisonOp::Eq, 1.0);
    }
    let solution = problem
        .solve()
        .map_err(|e| GameError::Solver(format!("balanced weights: {e}")))?;
    Ok(solution.objective())
}

/// Efficient allocation maximising the smallest excess `x(S) - v(S)` over
/// proper coalitions (capped at 1 to keep the problem bounded).
fn most_central_allocation(v: &CharFn) -> Result<Allocation> {
    let base = base_box(v);
    for scale in BOX_WIDENINGS {
        let (problem, vars, _) =
            core_problem(v, OptimizationDirection::Maximize, |_| 0.0, base * scale, Some(1.0));
        match problem.solve() {
            Ok(solution) => return Ok(Allocation(vars.iter().map(|&x| solution[x] + 0.0).collect())),
            Err(minilp::Error::Infeasible) => continue,
            Err(e) => return Err(GameError::Solver(format!("central allocation: {e}"))),
        }
    }
    Err(GameError::Solver("no core allocation found within the widest box".into()))
}

/// Two-player criterion `v({1}) + v({2}) ≤ v(N)`.
pub fn two_player_core_nonempty(v: &CharFn, epsilon: f64) -> Option<bool> {
    (v.n() == 2).then(|| {
        let pair = v.worth(Coalition::singleton(0)) + v.worth(Coalition::singleton(1));
        pair <= v.grand_worth() + epsilon
    })
}

/// Decides whether `{x : ∑x = v(N), x(S) ≥ v(S) ∀S}` is non-empty (with
/// `epsilon` slack) and returns a validated witness when it is.
pub fn core_nonempty(v: &CharFn, settings: &Settings) -> Result<CoreReport> {
    settings.validate()?;
    if v.n() > settings.max_players {
        return Err(GameError::CapExceeded {
            what: "player count",
            requested: v.n() as u128,
            limit: settings.max_players as u128,
        });
    }
    let epsilon = settings.epsilon;
    let nonempty = balanced_maximum(v)? <= v.grand_worth() + epsilon;
    if let Some(analytic) = two_player_core_nonempty(v, epsilon) {
        if analytic != nonempty {
            return Err(GameError::Solver(format!(
                "linear feasibility ({nonempty}) disagrees with the two-player criterion ({analytic})"
            )));
        }
    }
    let witness = if nonempty {
        let x = most_central_allocation(v)?;
        if !core_membership(v, &x, epsilon)?.is_member() {
            return Err(GameError::Solver(format!(
                "witness {:?} failed validation",
                x.0
            )));
        }
        Some(x)
    } else {
        None
    };
    Ok(CoreReport {
        nonempty,
        witness,
        constant_sum: is_constant_sum(v, epsilon),
        blocking: None,
    })
}

/// Range of each `x_i` over the core, `None` when the core is empty. A
/// coordinate that reaches the widest search box is reported as infinite.
pub fn core_extent(v: &CharFn, settings: &Settings) -> Result<Option<Vec<(f64, f64)>>> {
    if !core_nonempty(v, settings)?.nonempty {
        return Ok(None);
    }
    let n = v.n();
    let base = base_box(v);
    let solve = |player: usize, direction: OptimizationDirection| -> Result<f64> {
        let mut last = None;
        for scale in BOX_WIDENINGS {
            let bound = base * scale;
            let (problem, vars, _) =
                core_problem(v, direction, |i| if i == player { 1.0 } else { 0.0 }, bound, None);
            match problem.solve() {
                Ok(sol) => {
                    let x = sol[vars[player]];
                    if x.abs() < 0.5 * bound {
                        return Ok(x);
                    }
                    last = Some(x);
                }
                Err(minilp::Error::Infeasible) => continue,
                Err(e) => return Err(GameError::Solver(format!("core extent: {e}"))),
            }
        }
        match (last, direction) {
            (Some(_), OptimizationDirection::Minimize) => Ok(f64::NEG_INFINITY),
            (Some(_), OptimizationDirection::Maximize) => Ok(f64::INFINITY),
            (None, _) => Err(GameError::Solver("core extent: no feasible box".into())),
        }
    };
    (0..n)
        .map(|i| {
            Ok((
                solve(i, OptimizationDirection::Minimize)?,
                solve(i, OptimizationDirection::Maximize)?,
            ))
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// Profiles whose payoff vector lies in the core of `v`, ascending.
pub fn profile_core(game: &FiniteGame, v: &CharFn, settings: &Settings) -> Result<Vec<Profile>> {
    settings.check_game(game)?;
    if v.n() != game.n() {
        return Err(GameError::InvalidGame(format!(
            "characteristic function has {} players, game has {}",
            v.n(),
            game.n()
        )));
    }
    let epsilon = settings.epsilon;
    let members: Vec<usize> = (0..game.profile_count())
        .into_par_iter()
        .filter(|&f| {
            let x = Allocation(game.payoff_tensors().iter().map(|t| t[f]).collect());
            let sums = x.all_sums();
            (sums[sums.len() - 1] - v.grand_worth()).abs() <= epsilon
                && first_blocking(v, &sums, epsilon).is_none()
        })
        .collect();
    Ok(members.into_iter().map(|f| game.profile_at(f)).collect())
}
