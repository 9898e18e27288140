//! Separable games and the non-emptiness certificate for the generalised
//! leader core.
//!
//! A game is separable when every payoff splits into per-player components,
//! `u_i(a) = ∑_j h[i][j](a_j)`. The components are recovered from a reference
//! profile `a⁰` (all first indices):
//!
//! ```text
//! h[i][j](a_j) = u_i(a_j, a⁰_{-j}) - ((n-1)/n) · u_i(a⁰)
//! ```
//!
//! They are unique only up to per-`(i, j)` additive constants, and none of the
//! checks below depend on that choice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::coalition::Coalition;
use crate::equilibrium::{argmax_within, best_reply_mask, social_optima};
use crate::error::{GameError, Result};
use crate::game::{FiniteGame, Profile, Settings};

/// Above this many profiles the mixed-difference and round-trip checks are sampled.
pub const EXHAUSTIVE_PROFILE_LIMIT: usize = 100_000;
pub const SAMPLE_COUNT: usize = 10_000;
pub const SAMPLING_SEED: u64 = 0x005e_ed0f_c0de;

/// `h[i][j]`: contribution of player `j`'s strategy to player `i`'s payoff.
#[derive(Debug, Clone, PartialEq)]
pub struct HDecomposition {
    h: Vec<Vec<Vec<f64>>>,
}

impl HDecomposition {
    pub fn new(h: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let n = h.len();
        if h.iter().any(|row| row.len() != n) {
            return Err(GameError::InvalidGame(
                "decomposition must have n x n components".into(),
            ));
        }
        for j in 0..n {
            let m = h[0][j].len();
            if m == 0 || h.iter().any(|row| row[j].len() != m) {
                return Err(GameError::InvalidGame(format!(
                    "components for player {} disagree on the strategy count",
                    j + 1
                )));
            }
        }
        Ok(HDecomposition { h })
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn component(&self, payee: usize, source: usize) -> &[f64] {
        &self.h[payee][source]
    }

    /// `∑_j h[i][j](a_j)`.
    pub fn evaluate(&self, payee: usize, profile: &[usize]) -> f64 {
        self.h[payee]
            .iter()
            .zip(profile)
            .map(|(c, &k)| c[k])
            .sum()
    }

    /// Adds `shift` to one component, a gauge transformation.
    pub fn shifted(&self, payee: usize, source: usize, shift: f64) -> Self {
        let mut h = self.h.clone();
        h[payee][source].iter_mut().for_each(|x| *x += shift);
        HDecomposition { h }
    }

    /// `B_j = argmax h[j][j]`, the constant best-response set of player `j`.
    pub fn best_response_set(&self, player: usize, epsilon: f64) -> Vec<usize> {
        argmax_within(&self.h[player][player], epsilon).1
    }

    fn check_shape(&self, game: &FiniteGame) -> Result<()> {
        let fits = self.n() == game.n()
            && (0..game.n()).all(|j| self.h[0][j].len() == game.strategy_count(j));
        if fits {
            Ok(())
        } else {
            Err(GameError::InvalidGame(
                "decomposition does not match the game's dimensions".into(),
            ))
        }
    }

    pub fn to_json(&self) -> Value {
        json!(self.h)
    }
}

/// `s[i]`: per-player share of the aggregate payoff, `∑_i u_i(a) = ∑_i s[i](a_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SDecomposition {
    pub s: Vec<Vec<f64>>,
}

impl SDecomposition {
    pub fn evaluate(&self, profile: &[usize]) -> f64 {
        self.s.iter().zip(profile).map(|(c, &k)| c[k]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    Exhaustive,
    Sampled { seed: u64, samples: usize },
}

impl Coverage {
    fn to_json(self) -> Value {
        match self {
            Coverage::Exhaustive => json!("exhaustive"),
            Coverage::Sampled { seed, samples } => json!({"sampled": {"seed": seed, "samples": samples}}),
        }
    }
}

/// Why a function failed to split into per-player components. `payee` is
/// `None` when the aggregate payoff was tested.
#[derive(Debug, Clone, PartialEq)]
pub enum SeparabilityWitness {
    /// The effect of switching `source` from `reference_strategy` to
    /// `strategy` differs between the two contexts.
    MixedDifference {
        payee: Option<usize>,
        source: usize,
        strategy: usize,
        reference_strategy: usize,
        context: Profile,
        reference_context: Profile,
        difference: f64,
        reference_difference: f64,
    },
    /// The recovered components fail to re-sum to the payoff.
    Residual {
        payee: Option<usize>,
        profile: Profile,
        residual: f64,
    },
}

impl SeparabilityWitness {
    pub fn to_json(&self) -> Value {
        let player = |p: &Option<usize>| p.map(|i| i + 1);
        match self {
            SeparabilityWitness::MixedDifference {
                payee,
                source,
                strategy,
                reference_strategy,
                context,
                reference_context,
                difference,
                reference_difference,
            } => json!({
                "kind": "mixed-difference",
                "payee": player(payee),
                "player": source + 1,
                "strategies": [strategy, reference_strategy],
                "contexts": [context, reference_context],
                "differences": [difference, reference_difference],
            }),
            SeparabilityWitness::Residual {
                payee,
                profile,
                residual,
            } => json!({
                "kind": "residual",
                "payee": player(payee),
                "profile": profile,
                "residual": residual,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Separability {
    Separable {
        decomposition: HDecomposition,
        coverage: Coverage,
    },
    NotSeparable(SeparabilityWitness),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdditiveSeparability {
    Separable {
        decomposition: SDecomposition,
        coverage: Coverage,
    },
    NotSeparable(SeparabilityWitness),
}

fn coverage_for(game: &FiniteGame) -> Coverage {
    if game.profile_count() <= EXHAUSTIVE_PROFILE_LIMIT {
        Coverage::Exhaustive
    } else {
        Coverage::Sampled {
            seed: SAMPLING_SEED,
            samples: SAMPLE_COUNT,
        }
    }
}

fn sample_profiles(game: &FiniteGame, coverage: Coverage) -> Vec<usize> {
    match coverage {
        Coverage::Exhaustive => (0..game.profile_count()).collect(),
        Coverage::Sampled { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| rng.gen_range(0..game.profile_count()))
                .collect()
        }
    }
}

/// Splits the tensor `values` into per-player components, or explains why it
/// cannot be split. Reference profile is flat index 0.
fn split_tensor(
    game: &FiniteGame,
    values: &[f64],
    payee: Option<usize>,
    coverage: Coverage,
    epsilon: f64,
) -> std::result::Result<Vec<Vec<f64>>, SeparabilityWitness> {
    let n = game.n();
    let samples = sample_profiles(game, coverage);
    for j in 0..n {
        let stride = game.stride(j);
        let m = game.strategy_count(j);
        for &sample in &samples {
            if coverage == Coverage::Exhaustive && game.index_at(sample, j) != 0 {
                continue;
            }
            // context: the sample with player j reset to its reference strategy
            let ctx = sample - game.index_at(sample, j) * stride;
            if ctx == 0 {
                continue;
            }
            for k in 1..m {
                let d = values[ctx + k * stride] - values[ctx];
                let d0 = values[k * stride] - values[0];
                if (d - d0).abs() > epsilon {
                    return Err(SeparabilityWitness::MixedDifference {
                        payee,
                        source: j,
                        strategy: k,
                        reference_strategy: 0,
                        context: game.profile_at(ctx),
                        reference_context: game.profile_at(0),
                        difference: d,
                        reference_difference: d0,
                    });
                }
            }
        }
    }

    let share = (n as f64 - 1.0) / n as f64 * values[0];
    let components: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            (0..game.strategy_count(j))
                .map(|k| values[k * game.stride(j)] - share)
                .collect()
        })
        .collect();

    for &f in &samples {
        let total: f64 = (0..n).map(|j| components[j][game.index_at(f, j)]).sum();
        let residual = total - values[f];
        if residual.abs() > epsilon {
            return Err(SeparabilityWitness::Residual {
                payee,
                profile: game.profile_at(f),
                residual,
            });
        }
    }
    Ok(components)
}

/// Recovers `h[i][j]` for every ordered pair of players, or returns the first
/// mixed-difference (or residual) failure found.
pub fn separable_decomposition(game: &FiniteGame, settings: &Settings) -> Result<Separability> {
    settings.check_game(game)?;
    let coverage = coverage_for(game);
    let mut h = Vec::with_capacity(game.n());
    for i in 0..game.n() {
        match split_tensor(game, game.payoff_tensor(i), Some(i), coverage, settings.epsilon) {
            Ok(components) => h.push(components),
            Err(w) => return Ok(Separability::NotSeparable(w)),
        }
    }
    Ok(Separability::Separable {
        decomposition: HDecomposition::new(h)?,
        coverage,
    })
}

/// Applies the separability test to the aggregate payoff `∑_i u_i`.
pub fn check_additively_separable(
    game: &FiniteGame,
    settings: &Settings,
) -> Result<AdditiveSeparability> {
    settings.check_game(game)?;
    let coverage = coverage_for(game);
    let total = game.total_payoffs();
    Ok(
        match split_tensor(game, &total, None, coverage, settings.epsilon) {
            Ok(s) => AdditiveSeparability::Separable {
                decomposition: SDecomposition { s },
                coverage,
            },
            Err(w) => AdditiveSeparability::NotSeparable(w),
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionViolation {
    pub coalition: Coalition,
    pub player: usize,
    pub max_of_sum: f64,
    pub sum_of_max: f64,
}

impl ConditionViolation {
    pub fn to_json(&self) -> Value {
        json!({"coalition": self.coalition.bits(), "player": self.player + 1})
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConditionReport {
    pub violations: Vec<ConditionViolation>,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every non-empty `S` and player `j`, compares `max_{a_j∈D_j} ∑_{i∈S} h[i][j]`
/// with `∑_{i∈S} max_{a_j∈D_j} h[i][j]`.
fn compare_maxima<F>(h: &HDecomposition, domain: F, epsilon: f64) -> ConditionReport
where
    F: Fn(usize) -> Vec<usize>,
{
    let n = h.n();
    let domains: Vec<Vec<usize>> = (0..n).map(domain).collect();
    let mut violations = Vec::new();
    for s in Coalition::all(n).skip(1) {
        for (j, dom) in domains.iter().enumerate() {
            let max_of_sum = dom
                .iter()
                .map(|&k| s.members().map(|i| h.h[i][j][k]).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            let sum_of_max: f64 = s
                .members()
                .map(|i| {
                    dom.iter()
                        .map(|&k| h.h[i][j][k])
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .sum();
            if sum_of_max - max_of_sum > epsilon {
                violations.push(ConditionViolation {
                    coalition: s,
                    player: j,
                    max_of_sum,
                    sum_of_max,
                });
            }
        }
    }
    ConditionReport { violations }
}

/// Max-of-sum equals sum-of-max over each full strategy set `A_j`.
pub fn check_condition_1(
    game: &FiniteGame,
    h: &HDecomposition,
    settings: &Settings,
) -> Result<ConditionReport> {
    h.check_shape(game)?;
    Ok(compare_maxima(
        h,
        |j| (0..game.strategy_count(j)).collect(),
        settings.epsilon,
    ))
}

/// Max-of-sum equals sum-of-max over each best-response set `B_j = argmax h[j][j]`.
pub fn check_condition_2(
    game: &FiniteGame,
    h: &HDecomposition,
    settings: &Settings,
) -> Result<ConditionReport> {
    h.check_shape(game)?;
    Ok(compare_maxima(
        h,
        |j| h.best_response_set(j, settings.epsilon),
        settings.epsilon,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    GuaranteedNonempty,
    NotApplicable,
}

impl Conclusion {
    pub fn as_str(self) -> &'static str {
        match self {
            Conclusion::GuaranteedNonempty => "guaranteed-nonempty",
            Conclusion::NotApplicable => "not-applicable",
        }
    }
}

/// Evidence that a game is separable, has a socially optimal Nash equilibrium
/// and satisfies both max-of-sum conditions, which together guarantee a
/// non-empty generalised leader core containing that equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Certificate {
    pub separability: Separability,
    pub social_value: f64,
    /// First Nash equilibrium (ascending flat index) attaining the social optimum.
    pub socially_optimal_nash: Option<Profile>,
    /// `None` when the game is not separable.
    pub condition1: Option<ConditionReport>,
    pub condition2: Option<ConditionReport>,
}

impl Theorem1Certificate {
    pub fn separable(&self) -> bool {
        matches!(self.separability, Separability::Separable { .. })
    }

    pub fn decomposition(&self) -> Option<&HDecomposition> {
        match &self.separability {
            Separability::Separable { decomposition, .. } => Some(decomposition),
            Separability::NotSeparable(_) => None,
        }
    }

    pub fn has_socially_optimal_nash(&self) -> bool {
        self.socially_optimal_nash.is_some()
    }

    pub fn condition1_holds(&self) -> bool {
        self.condition1.as_ref().is_some_and(ConditionReport::holds)
    }

    pub fn condition2_holds(&self) -> bool {
        self.condition2.as_ref().is_some_and(ConditionReport::holds)
    }

    pub fn conclusion(&self) -> Conclusion {
        if self.separable()
            && self.has_socially_optimal_nash()
            && self.condition1_holds()
            && self.condition2_holds()
        {
            Conclusion::GuaranteedNonempty
        } else {
            Conclusion::NotApplicable
        }
    }

    /// First failed hypothesis, checked in the order separability, socially
    /// optimal equilibrium, condition 1, condition 2.
    pub fn reason(&self) -> Option<&'static str> {
        if !self.separable() {
            Some("not separable")
        } else if !self.has_socially_optimal_nash() {
            Some("no socially optimal Nash equilibrium")
        } else if !self.condition1_holds() {
            Some("condition 1 violated: max of summed components over A_j below sum of maxima")
        } else if !self.condition2_holds() {
            Some("condition 2 violated: max of summed components over B_j below sum of maxima")
        } else {
            None
        }
    }

    pub fn to_json(&self) -> Value {
        let violations = |r: &Option<ConditionReport>| -> Value {
            r.as_ref()
                .map(|r| Value::Array(r.violations.iter().map(ConditionViolation::to_json).collect()))
                .unwrap_or(Value::Array(Vec::new()))
        };
        let (witness, coverage) = match &self.separability {
            Separability::Separable { coverage, .. } => (Value::Null, coverage.to_json()),
            Separability::NotSeparable(w) => (w.to_json(), Value::Null),
        };
        json!({
            "separable": self.separable(),
            "separability_coverage": coverage,
            "separability_witness": witness,
            "decomposition": self.decomposition().map(HDecomposition::to_json),
            "has_socially_optimal_nash": self.has_socially_optimal_nash(),
            "social_optimum_value": self.social_value,
            "witness_profile": self.socially_optimal_nash,
            "condition1_holds": self.condition1_holds(),
            "condition1_violations": violations(&self.condition1),
            "condition2_holds": self.condition2_holds(),
            "condition2_violations": violations(&self.condition2),
            "conclusion": self.conclusion().as_str(),
            "reason": self.reason(),
        })
    }
}

pub fn theorem1_certificate(game: &FiniteGame, settings: &Settings) -> Result<Theorem1Certificate> {
    let separability = separable_decomposition(game, settings)?;
    let social_value = social_optima(game, settings)?.value;
    let full = game.grand().bits();
    let socially_optimal_nash = best_reply_mask(game, settings.epsilon)
        .iter()
        .enumerate()
        .find(|&(f, &m)| {
            m == full && game.coalition_payoff_flat(f, game.grand()) >= social_value - settings.epsilon
        })
        .map(|(f, _)| game.profile_at(f));
    let (condition1, condition2) = match &separability {
        Separability::Separable { decomposition, .. } => (
            Some(check_condition_1(game, decomposition, settings)?),
            Some(check_condition_2(game, decomposition, settings)?),
        ),
        Separability::NotSeparable(_) => (None, None),
    };
    Ok(Theorem1Certificate {
        separability,
        social_value,
        socially_optimal_nash,
        condition1,
        condition2,
    })
}
