//! Cooperative representations of finite normal-form games.
//!
//! Builds the α, β, γ, δ, λ and generalised λ characteristic functions of a
//! game given as payoff tensors over finite strategy grids, decides core
//! emptiness with a linear feasibility solve, lists the profiles whose payoff
//! vectors lie in the generalised leader core, and certifies core
//! non-emptiness for separable games.

pub mod charfn;
pub mod coalition;
pub mod core_solver;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod generators;
pub mod io;
pub mod reduction;
pub mod report;
pub mod separability;
pub mod worth;

pub use charfn::CharFn;
pub use coalition::Coalition;
pub use core_solver::{
    core_extent, core_membership, core_nonempty, imputation_check, is_constant_sum, profile_core,
    two_player_core_nonempty, Allocation, CoreReport, Membership, Rejection,
};
pub use equilibrium::{
    best_response_set, coalition_best_response_set, enumerate_nash, enumerate_strong_nash,
    social_optima, SocialOptima,
};
pub use error::{GameError, Result};
pub use game::{FiniteGame, PartialProfile, PayoffVector, Profile, Settings, StrategyGrid, DEFAULT_EPSILON};
pub use reduction::{check_srp, equilibria_of_reduction, reduce, ReducedGame, SrpVerdict, SrpWitness};
pub use separability::{
    check_additively_separable, check_condition_1, check_condition_2, separable_decomposition,
    theorem1_certificate, Conclusion, HDecomposition, Separability, Theorem1Certificate,
};
pub use worth::{
    char_alpha, char_beta, char_delta, char_gamma, char_lambda_generalised, char_lambda_srp, Concept,
};
