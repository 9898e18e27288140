//! The six characteristic functions of a finite game.
//!
//! Every function assigns `v(∅) = 0` and `v(N) = max_a ∑_i u_i(a)`; they
//! differ in how the outsiders `N∖S` are assumed to react to `S`:
//!
//! * `alpha`: outsiders move second and minimise `S`'s payoff (max-min).
//! * `beta`: outsiders move first and minimise (min-max).
//! * `gamma`: `S` best-responds jointly, each outsider best-responds individually.
//! * `delta`: as `gamma`, but the outsiders best-respond as one coalition.
//! * `lambda`: `S` leads; followers settle in the unique equilibrium of the
//!   reduced game. Only defined under the strong reduction property.
//! * `lambda-gen`: `S` leads and picks the best follower equilibrium among any
//!   number of them; `-∞` when no commitment admits one.
//!
//! `-∞` also marks an empty equilibrium set for `gamma` and `delta`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfn::CharFn;
use crate::coalition::Coalition;
use crate::equilibrium::{best_reply_mask, coalition_best_reply_flags};
use crate::error::{GameError, Result};
use crate::game::{FiniteGame, PartialProfile, Settings};
use crate::reduction::{first_srp_violation, follower_equilibria, SrpWitness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Concept {
    Alpha,
    Beta,
    Gamma,
    Delta,
    Lambda,
    #[serde(rename = "lambda-gen")]
    LambdaGeneralised,
}

impl Concept {
    pub const ALL: [Concept; 6] = [
        Concept::Alpha,
        Concept::Beta,
        Concept::Gamma,
        Concept::Delta,
        Concept::Lambda,
        Concept::LambdaGeneralised,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Concept::Alpha => "alpha",
            Concept::Beta => "beta",
            Concept::Gamma => "gamma",
            Concept::Delta => "delta",
            Concept::Lambda => "lambda",
            Concept::LambdaGeneralised => "lambda-gen",
        }
    }

    pub fn compute(self, game: &FiniteGame, settings: &Settings) -> Result<CharFn> {
        match self {
            Concept::Alpha => char_alpha(game, settings),
            Concept::Beta => char_beta(game, settings),
            Concept::Gamma => char_gamma(game, settings),
            Concept::Delta => char_delta(game, settings),
            Concept::Lambda => char_lambda_srp(game, settings),
            Concept::LambdaGeneralised => char_lambda_generalised(game, settings),
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Concept {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Concept::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                format!("unknown characteristic function {s:?} (expected alpha, beta, gamma, delta, lambda or lambda-gen)")
            })
    }
}

/// Evaluates `worth` on every proper coalition in parallel and fills in
/// `v(∅) = 0` and `v(N) =` social optimum value.
fn assemble<F>(game: &FiniteGame, settings: &Settings, worth: F) -> Result<CharFn>
where
    F: Fn(Coalition) -> Result<f64> + Sync,
{
    settings.check_game(game)?;
    let n = game.n();
    let grand = game.grand();
    let social = (0..game.profile_count())
        .map(|f| game.coalition_payoff_flat(f, grand))
        .fold(f64::NEG_INFINITY, f64::max);
    let proper: Vec<f64> = Coalition::proper(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(&worth)
        .collect::<Result<_>>()?;
    let mut worths = Vec::with_capacity(1 << n);
    worths.push(0.0);
    worths.extend(proper);
    worths.push(social);
    CharFn::new(n, worths)
}

/// `max_{a_S} min_{b_{-S}} ∑_{i∈S} u_i(a_S, b_{-S})`.
pub fn char_alpha(game: &FiniteGame, settings: &Settings) -> Result<CharFn> {
    assemble(game, settings, |s| {
        let inside = game.offsets(s);
        let outside = game.offsets(s.complement(game.n()));
        Ok(inside
            .iter()
            .map(|&a| {
                outside
                    .iter()
                    .map(|&b| game.coalition_payoff_flat(a + b, s))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::NEG_INFINITY, f64::max))
    })
}

/// `min_{b_{-S}} max_{a_S} ∑_{i∈S} u_i(a_S, b_{-S})`.
pub fn char_beta(game: &FiniteGame, settings: &Settings) -> Result<CharFn> {
    assemble(game, settings, |s| {
        let inside = game.offsets(s);
        let outside = game.offsets(s.complement(game.n()));
        Ok(outside
            .iter()
            .map(|&b| {
                inside
                    .iter()
                    .map(|&a| game.coalition_payoff_flat(a + b, s))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .fold(f64::INFINITY, f64::min))
    })
}

/// Best coalition payoff over profiles admitted by `admit`, `-∞` if none.
fn best_admitted<F: Fn(usize) -> bool>(game: &FiniteGame, s: Coalition, admit: F) -> f64 {
    (0..game.profile_count())
        .filter(|&f| admit(f))
        .map(|f| game.coalition_payoff_flat(f, s))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Best payoff of `S` over `E^γ(S)`: `S` best-responds jointly while every
/// outsider best-responds individually.
pub fn char_gamma(game: &FiniteGame, settings: &Settings) -> Result<CharFn> {
    settings.check_game(game)?;
    let mask = best_reply_mask(game, settings.epsilon);
    assemble(game, settings, |s| {
        let joint = coalition_best_reply_flags(game, s, settings.epsilon);
        let need = s.complement(game.n()).bits();
        Ok(best_admitted(game, s, |f| joint[f] && mask[f] & need == need))
    })
}

/// Best payoff of `S` over `E^δ(S)`: `S` and its complement both best-respond
/// as coalitions.
pub fn char_delta(game: &FiniteGame, settings: &Settings) -> Result<CharFn> {
    assemble(game, settings, |s| {
        let joint = coalition_best_reply_flags(game, s, settings.epsilon);
        let rest = coalition_best_reply_flags(game, s.complement(game.n()), settings.epsilon);
        Ok(best_admitted(game, s, |f| joint[f] && rest[f]))
    })
}

/// Leader worth under the strong reduction property:
/// `v(S) = max_{ā_S} ∑_{i∈S} u_i(ā_S, b̄_{-S}(ā_S))` with `b̄_{-S}(ā_S)` the
/// unique follower equilibrium. Fails with the first violating reduction.
pub fn char_lambda_srp(game: &FiniteGame, settings: &Settings) -> Result<CharFn> {
    settings.check_game(game)?;
    let mask = best_reply_mask(game, settings.epsilon);
    if let Some(w) = first_srp_violation(game, &mask) {
        return Err(GameError::SrpViolation(Box::new(w)));
    }
    assemble(game, settings, |s| {
        let followers = s.complement(game.n());
        let fo = game.offsets(followers);
        let mut best = f64::NEG_INFINITY;
        for (rank, &a) in game.offsets(s).iter().enumerate() {
            let mut eq = follower_equilibria(&mask, followers, &fo, a);
            let (Some(b), None) = (eq.next(), eq.next()) else {
                let equilibria = follower_equilibria(&mask, followers, &fo, a)
                    .map(|b| PartialProfile::restrict(&game.profile_at(a + b), followers))
                    .collect();
                return Err(GameError::SrpViolation(Box::new(SrpWitness {
                    commitment: game.partial_at(s, rank),
                    equilibria,
                })));
            };
            best = best.max(game.coalition_payoff_flat(a + b, s));
        }
        Ok(best)
    })
}

/// Leader worth without uniqueness: the best payoff of `S` over all pairs
/// `(a_S, b_{-S})` with `b_{-S}` an equilibrium of the `a_S`-reduction, `-∞`
/// when no commitment leaves the followers an equilibrium.
pub fn char_lambda_generalised(game: &FiniteGame, settings: &Settings) -> Result<CharFn> {
    settings.check_game(game)?;
    let mask = best_reply_mask(game, settings.epsilon);
    assemble(game, settings, |s| {
        let need = s.complement(game.n()).bits();
        Ok(best_admitted(game, s, |f| mask[f] & need == need))
    })
}
