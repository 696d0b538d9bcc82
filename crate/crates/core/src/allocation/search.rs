//! Incremental evaluation shared by the local-search optimizers.
//!
//! A move touches one cell. Only the pairs whose subcarriers or interference
//! change need a new power split: the old and new occupants of the cell,
//! and, when the cell flips between idle and busy, every pair on the same
//! subcarrier at another LED.

use crate::allocation::matrix::{AllocationMatrix, Move};
use crate::allocation::objective::Problem;
use crate::pairing::PairId;
use crate::power_split::SplitOutcome;

pub(crate) struct SearchState<'p> {
    problem: &'p Problem<'p>,
    x: AllocationMatrix,
    outcomes: Vec<Vec<SplitOutcome>>,
    value: f64,
}

/// A scored but uncommitted move.
pub(crate) struct Trial {
    pub mv: Move,
    pub value: f64,
    changed: Vec<(PairId, SplitOutcome)>,
}

impl<'p> SearchState<'p> {
    pub fn new(problem: &'p Problem<'p>, x: AllocationMatrix) -> Self {
        let outcomes = problem.solve_all(&x);
        let value = problem.score(&outcomes).penalized;
        Self {
            problem,
            x,
            outcomes,
            value,
        }
    }

    pub fn x(&self) -> &AllocationMatrix {
        &self.x
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    fn affected(&self, mv: &Move) -> Vec<PairId> {
        let mut ids = Vec::with_capacity(4);
        ids.extend(mv.from.map(|index| PairId { led: mv.led, index }));
        ids.extend(mv.to.map(|index| PairId { led: mv.led, index }));
        if mv.toggles_occupancy() {
            for led in (0..self.x.led_count()).filter(|&l| l != mv.led) {
                if let Some(index) = self.x.get(led, mv.subcarrier) {
                    ids.push(PairId { led, index });
                }
            }
        }
        ids
    }

    pub fn trial(&mut self, mv: Move) -> Trial {
        self.x.apply(&mv);
        let mut changed: Vec<(PairId, SplitOutcome)> = self
            .affected(&mv)
            .into_iter()
            .map(|id| (id, self.problem.solve_pair(&self.x, id)))
            .collect();
        for (id, o) in changed.iter_mut() {
            std::mem::swap(&mut self.outcomes[id.led][id.index], o);
        }
        let value = self.problem.score(&self.outcomes).penalized;
        for (id, o) in changed.iter_mut() {
            std::mem::swap(&mut self.outcomes[id.led][id.index], o);
        }
        self.x.apply(&mv.inverse());
        Trial { mv, value, changed }
    }

    /// Fingerprint of the allocation the trial would produce.
    pub fn trial_fingerprint(&mut self, trial: &Trial) -> u64 {
        self.x.apply(&trial.mv);
        let fp = self.x.fingerprint();
        self.x.apply(&trial.mv.inverse());
        fp
    }

    pub fn commit(&mut self, trial: Trial) {
        self.x.apply(&trial.mv);
        for (id, o) in trial.changed {
            self.outcomes[id.led][id.index] = o;
        }
        self.value = trial.value;
    }
}
