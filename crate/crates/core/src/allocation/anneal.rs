//! Simulated annealing over subcarrier allocations with a geometric cooling
//! schedule and a growing Metropolis chain length.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::allocation::matrix::{has_moves, propose_move, random_solution, AllocationMatrix};
use crate::allocation::objective::{Problem, RateReport};
use crate::allocation::search::SearchState;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaParams {
    pub t0: f64,
    /// Cooling factor applied to the temperature after each Metropolis call.
    pub alpha: f64,
    /// Initial Metropolis chain length.
    pub m0: f64,
    /// Growth factor of the chain length.
    pub beta: f64,
    /// Number of Metropolis calls.
    pub outer_iters: usize,
    /// Optional cap on objective evaluations.
    pub max_evaluations: Option<usize>,
    /// Optional wall-clock cap. Results are no longer reproducible when it binds.
    pub max_seconds: Option<f64>,
    pub record_trace: bool,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            t0: 1.0,
            alpha: 0.995,
            m0: 50.0,
            beta: 1.0005,
            outer_iters: 600,
            max_evaluations: None,
            max_seconds: None,
            record_trace: false,
        }
    }
}

impl SaParams {
    fn chain_length(&self, outer: usize) -> usize {
        (self.m0 * self.beta.powi(outer as i32)).round().max(1.0) as usize
    }

    /// Objective evaluations performed by a full run (excluding the initial solution).
    pub fn evaluation_budget(&self) -> usize {
        let total: usize = (0..self.outer_iters).map(|t| self.chain_length(t)).sum();
        self.max_evaluations.map_or(total, |cap| cap.min(total))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub evaluation: usize,
    /// Objective of the current solution after the acceptance decision.
    pub current: f64,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaOutcome {
    pub best: AllocationMatrix,
    pub report: RateReport,
    pub trace: Vec<TracePoint>,
    pub evaluations: usize,
}

pub fn simulated_annealing<R: Rng + ?Sized>(
    problem: &Problem<'_>,
    params: &SaParams,
    rng: &mut R,
) -> Result<SaOutcome> {
    let start = Instant::now();
    let x0 = random_solution(problem.pairs, problem.data_subcarriers(), rng);
    let mut state = SearchState::new(problem, x0);
    let mut best_x = state.x().clone();
    let mut best = state.value();
    let mut trace = Vec::new();
    let mut evaluations = 0usize;
    let eval_cap = params.max_evaluations.unwrap_or(usize::MAX);
    let nothing_to_do = !has_moves(problem.pairs, problem.data_subcarriers());

    let mut temperature = params.t0;
    'outer: for outer in 0..params.outer_iters {
        if nothing_to_do {
            break;
        }
        for _ in 0..params.chain_length(outer) {
            if evaluations >= eval_cap {
                break 'outer;
            }
            let mv = propose_move(state.x(), problem.pairs, rng)?;
            let trial = state.trial(mv);
            evaluations += 1;
            let delta = state.value() - trial.value;
            let new_value = trial.value;
            let accept = delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp();
            if accept {
                state.commit(trial);
                if new_value > best {
                    best = new_value;
                    best_x = state.x().clone();
                }
            }
            if params.record_trace {
                trace.push(TracePoint {
                    evaluation: evaluations,
                    current: state.value(),
                    best,
                });
            }
        }
        temperature *= params.alpha;
        if let Some(limit) = params.max_seconds {
            if start.elapsed().as_secs_f64() >= limit {
                break;
            }
        }
    }

    let report = problem.evaluate(&best_x)?;
    Ok(SaOutcome {
        best: best_x,
        report,
        trace,
        evaluations,
    })
}
