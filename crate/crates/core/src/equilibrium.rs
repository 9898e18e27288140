//! Best responses, pure Nash and strong Nash equilibria, social optima.
//!
//! Everything here is exhaustive enumeration over the profile grid. Argmax
//! sets keep every candidate within `epsilon` of the maximum; nothing is
//! tie-broken.

use rayon::prelude::*;

use crate::coalition::Coalition;
use crate::error::{GameError, Result};
use crate::game::{FiniteGame, PartialProfile, Profile, Settings};

/// Maximum of `values` and every position within `epsilon` of it.
pub(crate) fn argmax_within(values: &[f64], epsilon: f64) -> (f64, Vec<usize>) {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let arg = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= best - epsilon)
        .map(|(k, _)| k)
        .collect();
    (best, arg)
}

/// For every flat profile, the bitmask of players whose strategy is an
/// ε-best response to the others' strategies.
pub(crate) fn best_reply_mask(game: &FiniteGame, epsilon: f64) -> Vec<u32> {
    let n = game.n();
    let per_player: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let tensor = game.payoff_tensor(i);
            let stride = game.stride(i);
            let m = game.strategy_count(i);
            let mut flags = vec![false; game.profile_count()];
            for base in game.offsets(Coalition::singleton(i).complement(n)) {
                let best = (0..m)
                    .map(|k| tensor[base + k * stride])
                    .fold(f64::NEG_INFINITY, f64::max);
                for k in 0..m {
                    let f = base + k * stride;
                    flags[f] = tensor[f] >= best - epsilon;
                }
            }
            flags
        })
        .collect();
    (0..game.profile_count())
        .map(|f| {
            per_player
                .iter()
                .enumerate()
                .filter(|(_, flags)| flags[f])
                .fold(0u32, |acc, (i, _)| acc | (1 << i))
        })
        .collect()
}

/// For every flat profile, whether the members of `coalition` jointly play an
/// ε-best response (maximising their summed payoff) to the outsiders.
pub(crate) fn coalition_best_reply_flags(
    game: &FiniteGame,
    coalition: Coalition,
    epsilon: f64,
) -> Vec<bool> {
    let inside = game.offsets(coalition);
    let outside = game.offsets(coalition.complement(game.n()));
    let mut flags = vec![false; game.profile_count()];
    let mut values = vec![0.0; inside.len()];
    for &o in &outside {
        for (v, &a) in values.iter_mut().zip(&inside) {
            *v = game.coalition_payoff_flat(a + o, coalition);
        }
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (v, &a) in values.iter().zip(&inside) {
            flags[a + o] = *v >= best - epsilon;
        }
    }
    flags
}

/// `B_i(a_{-i})`: ε-argmax of player `player`'s payoff given the others' strategies.
pub fn best_response_set(
    game: &FiniteGame,
    player: usize,
    opponents: &PartialProfile,
    settings: &Settings,
) -> Result<Vec<usize>> {
    if player >= game.n() {
        return Err(GameError::InvalidProfile(format!(
            "player {} does not exist in a {}-player game",
            player + 1,
            game.n()
        )));
    }
    let others = Coalition::singleton(player).complement(game.n());
    if opponents.coalition() != others {
        return Err(GameError::InvalidProfile(format!(
            "opponent profile covers {} but must cover {others}",
            opponents.coalition()
        )));
    }
    game.check_partial(opponents)?;
    let base = game.partial_offset(opponents);
    let stride = game.stride(player);
    let tensor = game.payoff_tensor(player);
    let values: Vec<f64> = (0..game.strategy_count(player))
        .map(|k| tensor[base + k * stride])
        .collect();
    Ok(argmax_within(&values, settings.epsilon).1)
}

/// `B_S(a_{-S})`: joint ε-best responses of a non-empty coalition.
pub fn coalition_best_response_set(
    game: &FiniteGame,
    coalition: Coalition,
    opponents: &PartialProfile,
    settings: &Settings,
) -> Result<Vec<PartialProfile>> {
    game.check_coalition(coalition)?;
    if coalition.is_empty() {
        return Err(GameError::InvalidCoalition(
            "best responses need a non-empty coalition".into(),
        ));
    }
    let others = coalition.complement(game.n());
    if opponents.coalition() != others {
        return Err(GameError::InvalidProfile(format!(
            "opponent profile covers {} but must cover {others}",
            opponents.coalition()
        )));
    }
    game.check_partial(opponents)?;
    settings.check_game(game)?;
    let base = game.partial_offset(opponents);
    let values: Vec<f64> = game
        .offsets(coalition)
        .iter()
        .map(|&a| game.coalition_payoff_flat(a + base, coalition))
        .collect();
    Ok(argmax_within(&values, settings.epsilon)
        .1
        .into_iter()
        .map(|rank| game.partial_at(coalition, rank))
        .collect())
}

/// All pure Nash equilibria in ascending flat-index order.
pub fn enumerate_nash(game: &FiniteGame, settings: &Settings) -> Result<Vec<Profile>> {
    settings.check_game(game)?;
    let full = game.grand().bits();
    Ok(best_reply_mask(game, settings.epsilon)
        .iter()
        .enumerate()
        .filter(|(_, &m)| m == full)
        .map(|(f, _)| game.profile_at(f))
        .collect())
}

/// Profiles where every non-empty coalition plays a joint ε-best response.
pub fn enumerate_strong_nash(game: &FiniteGame, settings: &Settings) -> Result<Vec<Profile>> {
    settings.check_game(game)?;
    let n = game.n();
    let coalitions: Vec<Coalition> = Coalition::all(n).skip(1).collect();
    let flags: Vec<Vec<bool>> = coalitions
        .par_iter()
        .map(|&s| coalition_best_reply_flags(game, s, settings.epsilon))
        .collect();
    Ok((0..game.profile_count())
        .filter(|&f| flags.iter().all(|fl| fl[f]))
        .map(|f| game.profile_at(f))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SocialOptima {
    pub value: f64,
    pub argmax: Vec<Profile>,
}

/// Maximum total payoff and every profile within `epsilon` of it.
pub fn social_optima(game: &FiniteGame, settings: &Settings) -> Result<SocialOptima> {
    settings.check_game(game)?;
    let (value, arg) = argmax_within(&game.total_payoffs(), settings.epsilon);
    Ok(SocialOptima {
        value,
        argmax: arg.into_iter().map(|f| game.profile_at(f)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::StrategyGrid;

    fn bimatrix(rows: usize, cols: usize, u1: &[f64], u2: &[f64]) -> FiniteGame {
        let g = |m: usize| StrategyGrid::new((0..m).map(|k| k as f64).collect()).unwrap();
        FiniteGame::new(vec![g(rows), g(cols)], vec![u1.to_vec(), u2.to_vec()]).unwrap()
    }

    fn matching_pennies() -> FiniteGame {
        bimatrix(2, 2, &[1.0, -1.0, -1.0, 1.0], &[-1.0, 1.0, 1.0, -1.0])
    }

    #[test]
    fn matching_pennies_has_no_pure_equilibrium() {
        let s = Settings::default();
        assert!(enumerate_nash(&matching_pennies(), &s).unwrap().is_empty());
    }

    #[test]
    fn constant_game_everything_is_a_best_response() {
        let s = Settings::default();
        let g = bimatrix(2, 3, &[0.0; 6], &[0.0; 6]);
        let opp = PartialProfile::new(Coalition::singleton(1), vec![2]).unwrap();
        assert_eq!(best_response_set(&g, 0, &opp, &s).unwrap(), vec![0, 1]);
        assert_eq!(enumerate_nash(&g, &s).unwrap().len(), 6);
        assert_eq!(enumerate_strong_nash(&g, &s).unwrap().len(), 6);
        let opt = social_optima(&g, &s).unwrap();
        assert_eq!(opt.value, 0.0);
        assert_eq!(opt.argmax.len(), 6);
        let all = coalition_best_response_set(&g, g.grand(), &PartialProfile::empty(), &s).unwrap();
        assert_eq!(all.len(), 6);
    }

    #[test]
    fn prisoners_dilemma_nash_is_not_strong() {
        // strategies: 0 = cooperate, 1 = defect
        let s = Settings::default();
        let g = bimatrix(2, 2, &[3.0, 0.0, 5.0, 1.0], &[3.0, 5.0, 0.0, 1.0]);
        assert_eq!(enumerate_nash(&g, &s).unwrap(), vec![Profile(vec![1, 1])]);
        assert!(enumerate_strong_nash(&g, &s).unwrap().is_empty());
    }

    #[test]
    fn singleton_coalition_response_matches_individual() {
        let s = Settings::default();
        let g = bimatrix(3, 2, &[1.0, 4.0, 4.0, 2.0, 0.0, 3.0], &[0.0; 6]);
        for b in 0..2 {
            let opp = PartialProfile::new(Coalition::singleton(1), vec![b]).unwrap();
            let ind = best_response_set(&g, 0, &opp, &s).unwrap();
            let coal: Vec<usize> =
                coalition_best_response_set(&g, Coalition::singleton(0), &opp, &s)
                    .unwrap()
                    .into_iter()
                    .map(|p| p.indices()[0])
                    .collect();
            assert_eq!(ind, coal);
        }
    }

    #[test]
    fn empty_coalition_best_response_is_an_error() {
        let s = Settings::default();
        let g = matching_pennies();
        let opp = PartialProfile::new(g.grand(), vec![0, 0]).unwrap();
        assert!(matches!(
            coalition_best_response_set(&g, Coalition::EMPTY, &opp, &s),
            Err(GameError::InvalidCoalition(_))
        ));
    }

    #[test]
    fn single_player_strong_nash_is_argmax() {
        let s = Settings::default();
        let g = FiniteGame::new(
            vec![StrategyGrid::new(vec![0.0, 1.0, 2.0]).unwrap()],
            vec![vec![1.0, 3.0, 3.0]],
        )
        .unwrap();
        let expect = vec![Profile(vec![1]), Profile(vec![2])];
        assert_eq!(enumerate_nash(&g, &s).unwrap(), expect);
        assert_eq!(enumerate_strong_nash(&g, &s).unwrap(), expect);
    }

    #[test]
    fn caps_are_enforced() {
        let s = Settings {
            max_profiles: 3,
            ..Settings::default()
        };
        let err = enumerate_nash(&matching_pennies(), &s).unwrap_err();
        assert!(err.is_resource_limit());
    }
}
