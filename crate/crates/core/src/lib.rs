//! Solver library for single-leader, multi-follower aggregative games with
//! linear coupling constraints.
//!
//! The followers play a generalized Nash game parametrized by the leader's
//! decision. Embedding the followers' KKT conditions into the leader's
//! problem yields a mathematical program with complementarity constraints
//! (MPCC). The library relaxes the complementarity conditions
//! (`0 <= lambda ⟂ mu >= 0` becomes `lambda, mu >= 0`, `lambda' mu <= theta`)
//! and solves the relaxed problem with a sequential convex approximation
//! outer loop whose strongly convex inner subproblems are handled either by
//! a semi-decentralized augmented-Lagrangian method ([`inner::adal_run`]) or
//! by a centralized reference solver ([`inner::reference_solve`]).
//!
//! Module map:
//! - [`game`]: game data model, stacked KKT system, relaxation residuals.
//! - [`projections`]: Euclidean projections and Dykstra's algorithm.
//! - [`vgne`]: variational GNE solver for the followers' game, multiplier
//!   recovery, feasible initial points.
//! - [`sca`]: the outer sequential-convex-approximation loop.
//! - [`inner`]: solvers for the convexified subproblem.
//! - [`baseline`]: the naive alternating two-layer method.
//! - [`pev`]: plug-in electric vehicle charging case study and experiments.

pub mod baseline;
pub mod error;
pub mod game;
pub mod inner;
pub mod linalg;
pub mod pev;
pub mod projections;
pub mod sca;
pub mod trace;
pub mod vgne;

pub use error::SolverError;
pub use game::{
    AggregativeGame, FollowerData, LeaderCost, LeaderData, LeaderSet, OmegaPoint,
    RelaxationParams, ResidualReport, StackedSystem,
};
pub use inner::{AdalConfig, InnerSolution};
pub use sca::{ConvexSubproblem, InnerSolverKind, ScaConfig, SolveOutcome};
pub use trace::{InnerTrace, NaiveTrace, SolveTrace};
pub use vgne::VgneSolution;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, SolverError>;
