//! Subcarrier allocation: the decision grid, the penalized objective and the
//! two local-search optimizers.

mod anneal;
mod matrix;
mod objective;
mod search;
mod tabu;

pub use anneal::{simulated_annealing, SaOutcome, SaParams, TracePoint};
pub use matrix::{has_moves, neighbor, propose_move, random_solution, AllocationMatrix, Move};
pub use objective::{evaluate, PenaltyParams, Problem, RateReport, Score};
pub use tabu::{tabu_search, TabuStep, TsOutcome, TsParams};
