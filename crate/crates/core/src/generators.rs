//! Deterministic game generators: the worked two-player examples, the status
//! game, and seeded random families.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GameError, Result};
use crate::game::{FiniteGame, Profile, StrategyGrid};
use crate::separability::HDecomposition;

/// `grid_points` evenly spaced labels on `[lo, hi]`, both endpoints exact.
pub fn discretize_interval(lo: f64, hi: f64, grid_points: usize) -> Result<StrategyGrid> {
    if grid_points < 2 {
        return Err(GameError::InvalidGrid(format!(
            "an interval grid needs at least 2 points, got {grid_points}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(GameError::InvalidGrid(format!("invalid interval [{lo}, {hi}]")));
    }
    let last = grid_points - 1;
    let points = (0..grid_points)
        .map(|k| {
            if k == last {
                hi
            } else {
                lo + (hi - lo) * (k as f64 / last as f64)
            }
        })
        .collect();
    StrategyGrid::new(points)
}

/// `[0, 1]` grid containing `½`; requires an odd point count of at least 3.
fn unit_grid_with_half(grid_points: usize) -> Result<StrategyGrid> {
    if grid_points < 3 || grid_points.is_multiple_of(2) {
        return Err(GameError::InvalidGrid(format!(
            "grid_points must be odd and at least 3 so that 1/2 is a label, got {grid_points}"
        )));
    }
    let grid = discretize_interval(0.0, 1.0, grid_points)?;
    debug_assert!(grid.position(0.5).is_some());
    Ok(grid)
}

/// `u_1 = (1 - a_1 - 2a_2) a_1`, `u_2 = (1 - 2a_1 - a_2) a_2` on `[0, 1]²`.
pub fn build_gamma1(grid_points: usize) -> Result<FiniteGame> {
    let g = unit_grid_with_half(grid_points)?;
    FiniteGame::from_payoff_fn(vec![g.clone(), g], |a| {
        vec![
            (1.0 - a[0] - 2.0 * a[1]) * a[0],
            (1.0 - 2.0 * a[0] - a[1]) * a[1],
        ]
    })
}

/// `u_1 = a_1`, `u_2 = -a_1² - a_2` on `[0, 1]²`.
pub fn build_gamma2(grid_points: usize) -> Result<FiniteGame> {
    let g = unit_grid_with_half(grid_points)?;
    FiniteGame::from_payoff_fn(vec![g.clone(), g], |a| vec![a[0], -a[0] * a[0] - a[1]])
}

/// Status game on `[0, 1]^n`: `u_i = a_i² - a_i + mean_{j≠i} a_j`.
pub fn build_status(n: usize, grid_points: usize) -> Result<FiniteGame> {
    if n < 2 {
        return Err(GameError::InvalidGame(format!(
            "the status game needs at least 2 players, got {n}"
        )));
    }
    let g = discretize_interval(0.0, 1.0, grid_points)?;
    let others = (n - 1) as f64;
    FiniteGame::from_payoff_fn(vec![g; n], |a| {
        let total: f64 = a.iter().sum();
        a.iter()
            .map(|&ai| ai * ai - ai + (total - ai) / others)
            .collect()
    })
}

/// `u_1 = (½ - a_2) a_1`, `u_2 = a_1 a_2` on `[0, 1]²`.
pub fn build_gamma4(grid_points: usize) -> Result<FiniteGame> {
    let g = unit_grid_with_half(grid_points)?;
    FiniteGame::from_payoff_fn(vec![g.clone(), g], |a| vec![(0.5 - a[1]) * a[0], a[0] * a[1]])
}

fn check_sizes(n: usize, sizes: &[usize]) -> Result<()> {
    if n == 0 || sizes.len() != n {
        return Err(GameError::InvalidGame(format!(
            "expected {n} strategy counts, got {}",
            sizes.len()
        )));
    }
    if sizes.contains(&0) {
        return Err(GameError::InvalidGrid("strategy counts must be positive".into()));
    }
    Ok(())
}

fn unit_grid(m: usize) -> Result<StrategyGrid> {
    if m == 1 {
        StrategyGrid::new(vec![0.0])
    } else {
        discretize_interval(0.0, 1.0, m)
    }
}

/// Separable game with components `h[i][j](a_j) = c[i][j] - (t_j - a_j)²`,
/// all peaking at a shared label `t_j`. The peak profile is a socially optimal
/// Nash equilibrium and both max-of-sum conditions hold.
pub fn build_random_separable(
    n: usize,
    sizes: &[usize],
    seed: u64,
) -> Result<(FiniteGame, HDecomposition, Profile)> {
    check_sizes(n, sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grids = sizes.iter().map(|&m| unit_grid(m)).collect::<Result<Vec<_>>>()?;
    let peaks: Vec<usize> = sizes.iter().map(|&m| rng.gen_range(0..m)).collect();
    let h: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|_| {
            grids
                .iter()
                .zip(&peaks)
                .map(|(grid, &t)| {
                    let c: f64 = rng.gen_range(-1.0..1.0);
                    let peak = grid.label(t);
                    grid.points().iter().map(|&a| c - (peak - a) * (peak - a)).collect()
                })
                .collect()
        })
        .collect();
    let decomposition = HDecomposition::new(h)?;
    let tensor_payoffs = payoffs_from_components(&grids, &decomposition);
    let game = FiniteGame::new(grids, tensor_payoffs)?;
    Ok((game, decomposition, Profile(peaks)))
}

fn payoffs_from_components(grids: &[StrategyGrid], h: &HDecomposition) -> Vec<Vec<f64>> {
    let n = grids.len();
    let count: usize = grids.iter().map(StrategyGrid::len).product();
    let mut payoffs = vec![Vec::with_capacity(count); n];
    let mut idx = vec![0usize; n];
    for _ in 0..count {
        for (i, tensor) in payoffs.iter_mut().enumerate() {
            tensor.push(h.evaluate(i, &idx));
        }
        for p in (0..n).rev() {
            idx[p] += 1;
            if idx[p] < grids[p].len() {
                break;
            }
            idx[p] = 0;
        }
    }
    payoffs
}

/// I.i.d. uniform payoffs in `[-1, 1]`.
pub fn build_random_dense(n: usize, sizes: &[usize], seed: u64) -> Result<FiniteGame> {
    check_sizes(n, sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grids = sizes.iter().map(|&m| unit_grid(m)).collect::<Result<Vec<_>>>()?;
    let count: usize = sizes.iter().product();
    let payoffs = (0..n)
        .map(|_| (0..count).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect();
    FiniteGame::new(grids, payoffs)
}

/// Games where every player has a strictly dominant strategy:
/// `u_i(a) = d_i(a_i) + g_i(a_{-i})` with `d_i` having a unique maximiser
/// (margin at least ½ over the runner-up) and `g_i` arbitrary. Every reduced
/// game then has exactly one equilibrium.
pub fn build_random_dominant(n: usize, sizes: &[usize], seed: u64) -> Result<FiniteGame> {
    check_sizes(n, sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grids = sizes.iter().map(|&m| unit_grid(m)).collect::<Result<Vec<_>>>()?;
    let own: Vec<Vec<f64>> = sizes
        .iter()
        .map(|&m| {
            let top = rng.gen_range(0..m);
            (0..m)
                .map(|k| if k == top { 2.0 } else { rng.gen_range(-1.0..1.0) })
                .collect()
        })
        .collect();
    let count: usize = sizes.iter().product();
    // interaction term drawn per full profile, then made independent of the
    // player's own strategy by reading it at own index 0
    let noise: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..count).map(|_| rng.gen_range(-0.25..0.25)).collect())
        .collect();
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * sizes[i + 1];
    }
    let payoffs = (0..n)
        .map(|i| {
            (0..count)
                .map(|f| {
                    let k = (f / strides[i]) % sizes[i];
                    own[i][k] + noise[i][f - k * strides[i]]
                })
                .collect()
        })
        .collect();
    FiniteGame::new(grids, payoffs)
}

/// Named generator with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameSpec {
    Gamma1 { grid_points: usize },
    Gamma2 { grid_points: usize },
    Status { n: usize, grid_points: usize },
    Gamma4 { grid_points: usize },
    RandomSeparable { n: usize, sizes: Vec<usize>, seed: u64 },
    RandomDense { n: usize, sizes: Vec<usize>, seed: u64 },
}

pub const GENERATOR_NAMES: [&str; 6] = [
    "gamma1",
    "gamma2",
    "status",
    "gamma4",
    "random-separable",
    "random-dense",
];

impl GameSpec {
    /// Builds a spec from a generator name. `sizes` defaults to `grid_points`
    /// strategies for every player.
    pub fn from_parts(
        name: &str,
        grid_points: usize,
        n: Option<usize>,
        seed: u64,
        sizes: Option<Vec<usize>>,
    ) -> Result<Self> {
        let players = |default: usize| n.unwrap_or(default);
        let sizes_for = |n: usize| sizes.clone().unwrap_or_else(|| vec![grid_points; n]);
        Ok(match name {
            "gamma1" => GameSpec::Gamma1 { grid_points },
            "gamma2" => GameSpec::Gamma2 { grid_points },
            "gamma4" => GameSpec::Gamma4 { grid_points },
            "status" => GameSpec::Status {
                n: players(3),
                grid_points,
            },
            "random-separable" => {
                let n = players(2);
                GameSpec::RandomSeparable { n, sizes: sizes_for(n), seed }
            }
            "random-dense" => {
                let n = players(2);
                GameSpec::RandomDense { n, sizes: sizes_for(n), seed }
            }
            other => {
                return Err(GameError::InvalidGame(format!(
                    "unknown generator {other:?} (expected one of {})",
                    GENERATOR_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            GameSpec::Gamma1 { .. } => "gamma1",
            GameSpec::Gamma2 { .. } => "gamma2",
            GameSpec::Status { .. } => "status",
            GameSpec::Gamma4 { .. } => "gamma4",
            GameSpec::RandomSeparable { .. } => "random-separable",
            GameSpec::RandomDense { .. } => "random-dense",
        }
    }

    pub fn build(&self) -> Result<FiniteGame> {
        match self {
            GameSpec::Gamma1 { grid_points } => build_gamma1(*grid_points),
            GameSpec::Gamma2 { grid_points } => build_gamma2(*grid_points),
            GameSpec::Status { n, grid_points } => build_status(*n, *grid_points),
            GameSpec::Gamma4 { grid_points } => build_gamma4(*grid_points),
            GameSpec::RandomSeparable { n, sizes, seed } => {
                build_random_separable(*n, sizes, *seed).map(|(g, _, _)| g)
            }
            GameSpec::RandomDense { n, sizes, seed } => build_random_dense(*n, sizes, *seed),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            GameSpec::Gamma1 { grid_points }
            | GameSpec::Gamma2 { grid_points }
            | GameSpec::Gamma4 { grid_points } => {
                json!({"generator": self.name(), "grid": grid_points})
            }
            GameSpec::Status { n, grid_points } => {
                json!({"generator": self.name(), "n": n, "grid": grid_points})
            }
            GameSpec::RandomSeparable { n, sizes, seed } | GameSpec::RandomDense { n, sizes, seed } => {
                json!({"generator": self.name(), "n": n, "sizes": sizes, "seed": seed})
            }
        }
    }
}

impl fmt::Display for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json().to_string())
    }
}
