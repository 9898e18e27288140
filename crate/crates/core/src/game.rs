//! Finite normal-form games.
//!
//! Payoff tensors are stored flat in row-major order with player 1's strategy
//! index most significant, the same layout used by the game JSON format.

use serde::{Deserialize, Serialize};

use crate::coalition::{Coalition, MAX_REPRESENTABLE_PLAYERS};
use crate::error::{GameError, Result};

/// Numerical tolerance and enumeration limits shared by every operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    /// Absolute tolerance for every max/argmax comparison.
    pub epsilon: f64,
    pub max_profiles: u64,
    pub max_players: usize,
}

pub const DEFAULT_EPSILON: f64 = 1e-9;

impl Default for Settings {
    fn default() -> Self {
        Settings {
            epsilon: DEFAULT_EPSILON,
            max_profiles: 10_000_000,
            max_players: 12,
        }
    }
}

impl Settings {
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(GameError::InvalidSettings(format!(
                "epsilon must be positive and finite, got {}",
                self.epsilon
            )));
        }
        if self.max_players > MAX_REPRESENTABLE_PLAYERS {
            return Err(GameError::InvalidSettings(format!(
                "max_players cannot exceed {MAX_REPRESENTABLE_PLAYERS}"
            )));
        }
        Ok(())
    }

    /// Fails with a resource-limit error when the game is too large to enumerate.
    pub fn check_game(&self, game: &FiniteGame) -> Result<()> {
        self.validate()?;
        if game.n() > self.max_players {
            return Err(GameError::CapExceeded {
                what: "player count",
                requested: game.n() as u128,
                limit: self.max_players as u128,
            });
        }
        if game.profile_count() as u64 > self.max_profiles {
            return Err(GameError::CapExceeded {
                what: "profile count",
                requested: game.profile_count() as u128,
                limit: self.max_profiles as u128,
            });
        }
        Ok(())
    }
}

/// Ordered real strategy labels for one player.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct StrategyGrid(Vec<f64>);

impl StrategyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(GameError::InvalidGrid("strategy grid is empty".into()));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(GameError::InvalidGrid(format!("non-finite label {p}")));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(GameError::InvalidGrid(format!(
                "labels must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(StrategyGrid(points))
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn label(&self, index: usize) -> f64 {
        self.0[index]
    }

    /// Index of the label equal to `value` up to 1e-12.
    pub fn position(&self, value: f64) -> Option<usize> {
        self.0.iter().position(|&p| (p - value).abs() <= 1e-12)
    }
}

/// One strategy index per player.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Profile(pub Vec<usize>);

impl Profile {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Profile {
    fn from(v: Vec<usize>) -> Self {
        Profile(v)
    }
}

/// Strategy indices for the members of a coalition, in ascending member order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialProfile {
    coalition: Coalition,
    indices: Vec<usize>,
}

impl PartialProfile {
    pub fn new(coalition: Coalition, indices: Vec<usize>) -> Result<Self> {
        if coalition.len() != indices.len() {
            return Err(GameError::InvalidProfile(format!(
                "coalition {coalition} has {} members but {} indices were given",
                coalition.len(),
                indices.len()
            )));
        }
        Ok(PartialProfile { coalition, indices })
    }

    pub fn empty() -> Self {
        PartialProfile {
            coalition: Coalition::EMPTY,
            indices: Vec::new(),
        }
    }

    /// Restriction of a full profile to `coalition`.
    pub fn restrict(profile: &Profile, coalition: Coalition) -> Self {
        PartialProfile {
            coalition,
            indices: coalition.members().map(|p| profile.0[p]).collect(),
        }
    }

    pub fn coalition(&self) -> Coalition {
        self.coalition
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Strategy index of `player`, if it is a member.
    pub fn get(&self, player: usize) -> Option<usize> {
        self.coalition
            .members()
            .position(|p| p == player)
            .map(|k| self.indices[k])
    }

    /// Joins two partial profiles over disjoint coalitions.
    pub fn merge(&self, other: &PartialProfile) -> Result<PartialProfile> {
        if !(self.coalition.bits() & other.coalition.bits() == 0) {
            return Err(GameError::InvalidProfile(format!(
                "cannot merge overlapping coalitions {} and {}",
                self.coalition, other.coalition
            )));
        }
        let coalition = Coalition::from_bits(self.coalition.bits() | other.coalition.bits());
        let indices = coalition
            .members()
            .map(|p| self.get(p).or_else(|| other.get(p)).expect("member of union"))
            .collect();
        Ok(PartialProfile { coalition, indices })
    }

    pub fn into_profile(self, n: usize) -> Result<Profile> {
        if self.coalition != Coalition::grand(n) {
            return Err(GameError::InvalidProfile(format!(
                "partial profile over {} does not cover all {n} players",
                self.coalition
            )));
        }
        Ok(Profile(self.indices))
    }
}

/// Payoff per player at some profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PayoffVector(pub Vec<f64>);

impl PayoffVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGame {
    grids: Vec<StrategyGrid>,
    strides: Vec<usize>,
    profile_count: usize,
    payoffs: Vec<Vec<f64>>,
}

impl FiniteGame {
    pub fn new(grids: Vec<StrategyGrid>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        let n = grids.len();
        if n == 0 {
            return Err(GameError::InvalidGame("a game needs at least one player".into()));
        }
        if n > MAX_REPRESENTABLE_PLAYERS {
            return Err(GameError::InvalidGame(format!(
                "{n} players exceeds the representable maximum of {MAX_REPRESENTABLE_PLAYERS}"
            )));
        }
        if payoffs.len() != n {
            return Err(GameError::InvalidGame(format!(
                "{n} strategy grids but {} payoff tensors",
                payoffs.len()
            )));
        }
        let profile_count = grids
            .iter()
            .try_fold(1usize, |acc, g| acc.checked_mul(g.len()))
            .ok_or_else(|| GameError::InvalidGame("profile count overflows".into()))?;
        for (i, tensor) in payoffs.iter().enumerate() {
            if tensor.len() != profile_count {
                return Err(GameError::InvalidGame(format!(
                    "payoff tensor of player {} has {} entries, expected {profile_count}",
                    i + 1,
                    tensor.len()
                )));
            }
            if let Some(k) = tensor.iter().position(|x| !x.is_finite()) {
                return Err(GameError::InvalidGame(format!(
                    "payoff of player {} at flat profile {k} is not finite",
                    i + 1
                )));
            }
        }
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * grids[i + 1].len();
        }
        Ok(FiniteGame {
            grids,
            strides,
            profile_count,
            payoffs,
        })
    }

    /// Tabulates `payoff(labels)` (returning one value per player) over every profile.
    pub fn from_payoff_fn<F>(grids: Vec<StrategyGrid>, payoff: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let n = grids.len();
        let count = grids
            .iter()
            .try_fold(1usize, |acc, g| acc.checked_mul(g.len()))
            .ok_or_else(|| GameError::InvalidGame("profile count overflows".into()))?;
        let mut payoffs = vec![Vec::with_capacity(count); n];
        let mut idx = vec![0usize; n];
        let mut labels: Vec<f64> = grids.iter().map(|g| g.label(0)).collect();
        for _ in 0..count {
            let u = payoff(&labels);
            if u.len() != n {
                return Err(GameError::InvalidGame(format!(
                    "payoff function returned {} values for {n} players",
                    u.len()
                )));
            }
            for (tensor, value) in payoffs.iter_mut().zip(u) {
                tensor.push(value);
            }
            // odometer, last player fastest
            for p in (0..n).rev() {
                idx[p] += 1;
                if idx[p] < grids[p].len() {
                    labels[p] = grids[p].label(idx[p]);
                    break;
                }
                idx[p] = 0;
                labels[p] = grids[p].label(0);
            }
        }
        FiniteGame::new(grids, payoffs)
    }

    pub fn n(&self) -> usize {
        self.grids.len()
    }

    pub fn grids(&self) -> &[StrategyGrid] {
        &self.grids
    }

    pub fn grid(&self, player: usize) -> &StrategyGrid {
        &self.grids[player]
    }

    pub fn strategy_count(&self, player: usize) -> usize {
        self.grids[player].len()
    }

    pub fn profile_count(&self) -> usize {
        self.profile_count
    }

    pub fn stride(&self, player: usize) -> usize {
        self.strides[player]
    }

    pub fn payoff_tensor(&self, player: usize) -> &[f64] {
        &self.payoffs[player]
    }

    pub fn payoff_tensors(&self) -> &[Vec<f64>] {
        &self.payoffs
    }

    pub fn grand(&self) -> Coalition {
        Coalition::grand(self.n())
    }

    pub fn check_profile(&self, profile: &Profile) -> Result<()> {
        if profile.0.len() != self.n() {
            return Err(GameError::InvalidProfile(format!(
                "profile has {} entries for a {}-player game",
                profile.0.len(),
                self.n()
            )));
        }
        for (p, &k) in profile.0.iter().enumerate() {
            if k >= self.strategy_count(p) {
                return Err(GameError::InvalidProfile(format!(
                    "strategy index {k} out of range for player {} ({} strategies)",
                    p + 1,
                    self.strategy_count(p)
                )));
            }
        }
        Ok(())
    }

    pub fn check_coalition(&self, coalition: Coalition) -> Result<()> {
        if !coalition.fits(self.n()) {
            return Err(GameError::InvalidCoalition(format!(
                "coalition bitmask {} names players outside a {}-player game",
                coalition.bits(),
                self.n()
            )));
        }
        Ok(())
    }

    pub fn check_partial(&self, partial: &PartialProfile) -> Result<()> {
        self.check_coalition(partial.coalition())?;
        for (p, &k) in partial.coalition().members().zip(partial.indices()) {
            if k >= self.strategy_count(p) {
                return Err(GameError::InvalidProfile(format!(
                    "strategy index {k} out of range for player {}",
                    p + 1
                )));
            }
        }
        Ok(())
    }

    pub fn flat_index(&self, profile: &Profile) -> Result<usize> {
        self.check_profile(profile)?;
        Ok(self.flat_unchecked(&profile.0))
    }

    pub(crate) fn flat_unchecked(&self, indices: &[usize]) -> usize {
        indices.iter().zip(&self.strides).map(|(k, s)| k * s).sum()
    }

    pub fn profile_at(&self, flat: usize) -> Profile {
        Profile(
            (0..self.n())
                .map(|p| self.index_at(flat, p))
                .collect(),
        )
    }

    /// Strategy index of `player` inside flat profile `flat`.
    pub fn index_at(&self, flat: usize, player: usize) -> usize {
        (flat / self.strides[player]) % self.grids[player].len()
    }

    /// Flat offset contributed by a partial profile; adding offsets of
    /// disjoint partial profiles covering all players gives the flat index.
    pub fn partial_offset(&self, partial: &PartialProfile) -> usize {
        partial
            .coalition()
            .members()
            .zip(partial.indices())
            .map(|(p, k)| k * self.strides[p])
            .sum()
    }

    /// Offsets of every joint strategy of `coalition`, in lexicographic order
    /// with the lowest-numbered member most significant.
    pub fn offsets(&self, coalition: Coalition) -> Vec<usize> {
        let size: usize = coalition.members().map(|p| self.strategy_count(p)).product();
        let mut out = Vec::with_capacity(size);
        out.push(0);
        for p in coalition.members() {
            let stride = self.strides[p];
            let m = self.strategy_count(p);
            out = out
                .iter()
                .flat_map(|&o| (0..m).map(move |k| o + k * stride))
                .collect();
        }
        out
    }

    /// Decodes the `rank`-th joint strategy of `coalition` (ordering of [`FiniteGame::offsets`]).
    pub fn partial_at(&self, coalition: Coalition, mut rank: usize) -> PartialProfile {
        let members: Vec<usize> = coalition.members().collect();
        let mut indices = vec![0; members.len()];
        for (slot, &p) in members.iter().enumerate().rev() {
            let m = self.strategy_count(p);
            indices[slot] = rank % m;
            rank /= m;
        }
        PartialProfile { coalition, indices }
    }

    pub fn payoff(&self, profile: &Profile) -> Result<PayoffVector> {
        let flat = self.flat_index(profile)?;
        Ok(PayoffVector(self.payoffs.iter().map(|t| t[flat]).collect()))
    }

    /// `∑_{i∈S} u_i(a)`, zero for the empty coalition.
    pub fn coalition_payoff(&self, profile: &Profile, coalition: Coalition) -> Result<f64> {
        self.check_coalition(coalition)?;
        let flat = self.flat_index(profile)?;
        Ok(self.coalition_payoff_flat(flat, coalition))
    }

    pub(crate) fn coalition_payoff_flat(&self, flat: usize, coalition: Coalition) -> f64 {
        coalition.members().map(|i| self.payoffs[i][flat]).sum()
    }

    /// Aggregate `∑_i u_i` over all profiles.
    pub(crate) fn total_payoffs(&self) -> Vec<f64> {
        let grand = self.grand();
        (0..self.profile_count)
            .map(|f| self.coalition_payoff_flat(f, grand))
            .collect()
    }
}
