//! Tabu search over the same neighbourhood and objective as the annealer,
//! used to cross-check its results.

use std::collections::VecDeque;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::allocation::anneal::SaParams;
use crate::allocation::matrix::{has_moves, propose_move, random_solution, AllocationMatrix};
use crate::allocation::objective::{Problem, RateReport};
use crate::allocation::search::{SearchState, Trial};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TsParams {
    /// Number of recently visited solutions that may not be revisited.
    pub tabu_list_len: usize,
    /// Neighbours sampled per step.
    pub candidate_list_len: usize,
    /// Steps; each one evaluates `candidate_list_len` neighbours.
    pub max_iterations: usize,
    pub max_seconds: Option<f64>,
}

impl Default for TsParams {
    fn default() -> Self {
        Self {
            tabu_list_len: 10,
            candidate_list_len: 4,
            // As many steps as a default annealing run has iterations.
            max_iterations: SaParams::default().evaluation_budget(),
            max_seconds: None,
        }
    }
}

/// One accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TabuStep {
    pub fingerprint: u64,
    /// The step went to a tabu solution because it set a new global best.
    pub aspiration: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsOutcome {
    pub best: AllocationMatrix,
    pub report: RateReport,
    pub evaluations: usize,
    /// Fingerprint of the start solution followed by every accepted step.
    pub start_fingerprint: u64,
    pub steps: Vec<TabuStep>,
}

pub fn tabu_search<R: Rng + ?Sized>(
    problem: &Problem<'_>,
    params: &TsParams,
    rng: &mut R,
) -> Result<TsOutcome> {
    let start = Instant::now();
    let x0 = random_solution(problem.pairs, problem.data_subcarriers(), rng);
    let start_fingerprint = x0.fingerprint();
    let mut state = SearchState::new(problem, x0);
    let mut best_x = state.x().clone();
    let mut best = state.value();
    let mut tabu: VecDeque<u64> = VecDeque::with_capacity(params.tabu_list_len + 1);
    if params.tabu_list_len > 0 {
        tabu.push_back(start_fingerprint);
    }
    let mut steps = Vec::new();
    let mut evaluations = 0usize;

    if has_moves(problem.pairs, problem.data_subcarriers()) {
        for _ in 0..params.max_iterations {
            if params
                .max_seconds
                .is_some_and(|s| start.elapsed().as_secs_f64() >= s)
            {
                break;
            }
            let n = params.candidate_list_len.max(1);
            let mut chosen: Option<(Trial, u64, bool)> = None;
            for _ in 0..n {
                let mv = propose_move(state.x(), problem.pairs, rng)?;
                let trial = state.trial(mv);
                evaluations += 1;
                let fp = state.trial_fingerprint(&trial);
                let is_tabu = tabu.contains(&fp);
                let aspiration = is_tabu && trial.value > best;
                if is_tabu && !aspiration {
                    continue;
                }
                if chosen
                    .as_ref()
                    .is_none_or(|(c, _, _)| trial.value > c.value)
                {
                    chosen = Some((trial, fp, aspiration));
                }
            }
            let Some((trial, fingerprint, aspiration)) = chosen else {
                continue;
            };
            let value = trial.value;
            state.commit(trial);
            if value > best {
                best = value;
                best_x = state.x().clone();
            }
            if params.tabu_list_len > 0 {
                tabu.push_back(fingerprint);
                while tabu.len() > params.tabu_list_len {
                    tabu.pop_front();
                }
            }
            steps.push(TabuStep {
                fingerprint,
                aspiration,
            });
        }
    }

    let report = problem.evaluate(&best_x)?;
    Ok(TsOutcome {
        best: best_x,
        report,
        evaluations,
        start_fingerprint,
        steps,
    })
}
