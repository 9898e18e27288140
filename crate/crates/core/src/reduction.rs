//! Reduced games: a coalition commits to a joint strategy and leaves the game,
//! the remaining players play among themselves.

use std::fmt;

use rayon::prelude::*;

use crate::coalition::Coalition;
use crate::equilibrium::{best_reply_mask, enumerate_nash};
use crate::error::{GameError, Result};
use crate::game::{FiniteGame, PartialProfile, Settings};

/// Game among `N∖S` after `S` commits to `commitment`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedGame {
    game: FiniteGame,
    commitment: PartialProfile,
    /// Parent player for each reduced-game player index.
    players: Vec<usize>,
}

impl ReducedGame {
    pub fn game(&self) -> &FiniteGame {
        &self.game
    }

    pub fn coalition(&self) -> Coalition {
        self.commitment.coalition()
    }

    pub fn commitment(&self) -> &PartialProfile {
        &self.commitment
    }

    /// Parent index of each reduced player.
    pub fn parent_players(&self) -> &[usize] {
        &self.players
    }

    pub fn followers(&self) -> Coalition {
        Coalition::from_players(self.players.iter().copied())
    }
}

fn check_committing_coalition(game: &FiniteGame, commitment: &PartialProfile) -> Result<()> {
    game.check_partial(commitment)?;
    let s = commitment.coalition();
    if s.is_empty() || s == game.grand() {
        return Err(GameError::InvalidCoalition(format!(
            "a reduction needs a coalition with ∅ ≠ S ⊊ N, got {s}"
        )));
    }
    Ok(())
}

/// Slices the parent tensors at the committed strategies.
pub fn reduce(game: &FiniteGame, commitment: &PartialProfile) -> Result<ReducedGame> {
    check_committing_coalition(game, commitment)?;
    let followers = commitment.coalition().complement(game.n());
    let base = game.partial_offset(commitment);
    let offsets = game.offsets(followers);
    let players: Vec<usize> = followers.members().collect();
    let grids = players.iter().map(|&j| game.grid(j).clone()).collect();
    let payoffs = players
        .iter()
        .map(|&j| {
            let tensor = game.payoff_tensor(j);
            offsets.iter().map(|&o| tensor[base + o]).collect()
        })
        .collect();
    Ok(ReducedGame {
        game: FiniteGame::new(grids, payoffs)?,
        commitment: commitment.clone(),
        players,
    })
}

/// Pure Nash equilibria of the reduced game, as partial profiles of the parent.
pub fn equilibria_of_reduction(
    game: &FiniteGame,
    commitment: &PartialProfile,
    settings: &Settings,
) -> Result<Vec<PartialProfile>> {
    let reduced = reduce(game, commitment)?;
    let followers = reduced.followers();
    enumerate_nash(reduced.game(), settings)?
        .into_iter()
        .map(|p| PartialProfile::new(followers, p.0))
        .collect()
}

/// A reduction whose equilibrium set is not a singleton.
#[derive(Debug, Clone, PartialEq)]
pub struct SrpWitness {
    pub commitment: PartialProfile,
    pub equilibria: Vec<PartialProfile>,
}

impl SrpWitness {
    pub fn coalition(&self) -> Coalition {
        self.commitment.coalition()
    }
}

impl fmt::Display for SrpWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "coalition {} committing to strategy indices {:?} leaves {} equilibria among the followers",
            self.commitment.coalition(),
            self.commitment.indices(),
            self.equilibria.len()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SrpVerdict {
    Holds,
    Violated(SrpWitness),
}

impl SrpVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SrpVerdict::Holds)
    }
}

/// Flat offsets of follower profiles that are equilibria of the reduction at
/// the committed offset `commit`, given a precomputed best-reply mask.
pub(crate) fn follower_equilibria<'a>(
    mask: &'a [u32],
    followers: Coalition,
    follower_offsets: &'a [usize],
    commit: usize,
) -> impl Iterator<Item = usize> + 'a {
    let need = followers.bits();
    follower_offsets
        .iter()
        .copied()
        .filter(move |&b| mask[commit + b] & need == need)
}

/// First reduction (ascending coalition bitmask, then ascending committed
/// strategy) without a unique follower equilibrium, scanned with `mask`.
pub(crate) fn first_srp_violation(
    game: &FiniteGame,
    mask: &[u32],
) -> Option<SrpWitness> {
    let n = game.n();
    let per_coalition: Vec<Option<SrpWitness>> = Coalition::proper(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|s| {
            let followers = s.complement(n);
            let fo = game.offsets(followers);
            for (rank, &a) in game.offsets(s).iter().enumerate() {
                let eq: Vec<usize> = follower_equilibria(mask, followers, &fo, a).collect();
                if eq.len() != 1 {
                    return Some(SrpWitness {
                        commitment: game.partial_at(s, rank),
                        equilibria: eq
                            .into_iter()
                            .map(|b| PartialProfile::restrict(&game.profile_at(a + b), followers))
                            .collect(),
                    });
                }
            }
            None
        })
        .collect();
    per_coalition.into_iter().flatten().next()
}

/// Strong Reduction Property: every reduction over every `∅ ≠ S ⊊ N` and
/// every committed `a_S` has exactly one follower equilibrium.
pub fn check_srp(game: &FiniteGame, settings: &Settings) -> Result<SrpVerdict> {
    settings.check_game(game)?;
    let mask = best_reply_mask(game, settings.epsilon);
    Ok(match first_srp_violation(game, &mask) {
        None => SrpVerdict::Holds,
        Some(w) => SrpVerdict::Violated(w),
    })
}
