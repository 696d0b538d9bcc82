//! Penalized max-min objective.
//!
//! `O(X)` is the smallest user rate. Two penalty terms steer the search:
//! the fraction of users left at zero rate (weight `p1`) and the amount by
//! which the relative max-min spread exceeds `spread_limit` (weight `p2`).

use serde::{Deserialize, Serialize};

use crate::allocation::matrix::AllocationMatrix;
use crate::error::Result;
use crate::geometry::ChannelMatrix;
use crate::pairing::{PairId, PairSet};
use crate::phy::{LinkBudget, PairLink};
use crate::power_split::{solve_link, BisectParams, PowerSplit, SplitOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PenaltyParams {
    /// Allowed relative spread `(max - min) / max` of user rates.
    pub spread_limit: f64,
    pub p1: f64,
    pub p2: f64,
    /// Rates are divided by this (bit/s) before entering the objective.
    pub rate_unit: f64,
}

impl Default for PenaltyParams {
    fn default() -> Self {
        Self {
            spread_limit: 0.2,
            p1: 1e5,
            p2: 10.0,
            rate_unit: 1e6,
        }
    }
}

/// Objective terms derived from a vector of user rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub min_rate: f64,
    pub max_rate: f64,
    /// Fraction of users with zero rate.
    pub f_cons: f64,
    /// Relative spread minus the allowed spread; 0 when every rate is 0.
    pub f_diff: f64,
    /// `O(X)`.
    pub objective: f64,
    /// `O'(X)`.
    pub penalized: f64,
}

impl Score {
    pub fn from_rates<I: IntoIterator<Item = f64>>(rates: I, penalty: &PenaltyParams) -> Self {
        let mut n = 0usize;
        let mut zeros = 0usize;
        let mut min = f64::INFINITY;
        let mut max = 0.0f64;
        for r in rates {
            n += 1;
            zeros += (r == 0.0) as usize;
            min = min.min(r);
            max = max.max(r);
        }
        if n == 0 {
            min = 0.0;
        }
        let f_cons = if n > 0 { zeros as f64 / n as f64 } else { 0.0 };
        let f_diff = if max > 0.0 {
            (max - min) / max - penalty.spread_limit
        } else {
            0.0
        };
        let objective = min / penalty.rate_unit;
        let penalized = objective - penalty.p1 * f_cons - penalty.p2 * f_diff.max(0.0);
        Self {
            min_rate: min,
            max_rate: max,
            f_cons,
            f_diff,
            objective,
            penalized,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// Rate of every user, bit/s, indexed like the channel matrix rows.
    pub user_rates: Vec<f64>,
    /// Power split of each pair, `splits[led][pair]`.
    pub splits: Vec<Vec<PowerSplit>>,
    pub min_rate: f64,
    pub max_rate: f64,
    pub f_cons: f64,
    pub f_diff: f64,
    pub objective: f64,
    pub penalized: f64,
    pub degenerate_pairs: usize,
}

/// Everything an allocation search needs besides the allocation itself.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub pairs: &'a PairSet,
    pub channel: &'a ChannelMatrix,
    pub link: &'a LinkBudget,
    pub penalty: PenaltyParams,
    pub bisect: BisectParams,
}

impl<'a> Problem<'a> {
    pub fn new(
        pairs: &'a PairSet,
        channel: &'a ChannelMatrix,
        link: &'a LinkBudget,
        penalty: PenaltyParams,
    ) -> Self {
        Self {
            pairs,
            channel,
            link,
            penalty,
            bisect: BisectParams::default(),
        }
    }

    pub fn with_bisect(mut self, bisect: BisectParams) -> Self {
        self.bisect = bisect;
        self
    }

    pub fn data_subcarriers(&self) -> usize {
        self.link.data_subcarriers()
    }

    pub fn user_count(&self) -> usize {
        self.channel.user_count()
    }

    /// Max-min split and resulting rates of one pair. A bisection that fails
    /// to meet its tolerance falls back to the last bracket midpoint.
    pub fn solve_pair(&self, x: &AllocationMatrix, id: PairId) -> SplitOutcome {
        let pl = PairLink::new(self.pairs, id, x, self.channel, self.link)
            .expect("allocation references a valid pair");
        match solve_link(&pl, &self.bisect) {
            Ok(o) => o,
            Err(e) => {
                log::warn!("pair {id:?}: {e}");
                let a = match e {
                    crate::error::Error::BisectionFailed { lo, hi, .. } => 0.5 * (lo + hi),
                    _ => 0.5,
                };
                SplitOutcome {
                    split: PowerSplit {
                        a_strong: a,
                        a_weak: 1.0 - a,
                    },
                    rate_strong: pl.strong_rate(a),
                    rate_weak: pl.weak_rate(a, 1.0 - a),
                    iterations: self.bisect.max_iters,
                    degenerate: false,
                }
            }
        }
    }

    pub fn solve_all(&self, x: &AllocationMatrix) -> Vec<Vec<SplitOutcome>> {
        (0..self.pairs.led_count())
            .map(|led| {
                (0..self.pairs.pairs_of(led).len())
                    .map(|index| self.solve_pair(x, PairId { led, index }))
                    .collect()
            })
            .collect()
    }

    /// User rates implied by per-pair outcomes. Users outside every pair get 0.
    pub fn user_rates(&self, outcomes: &[Vec<SplitOutcome>]) -> Vec<f64> {
        let mut rates = vec![0.0; self.user_count()];
        for (led, row) in outcomes.iter().enumerate() {
            for (pair, o) in self.pairs.pairs_of(led).iter().zip(row) {
                rates[pair.strong] = o.rate_strong;
                if let Some(w) = pair.weak {
                    rates[w] = o.rate_weak;
                }
            }
        }
        rates
    }

    pub fn score(&self, outcomes: &[Vec<SplitOutcome>]) -> Score {
        Score::from_rates(self.user_rates(outcomes), &self.penalty)
    }

    pub fn report(&self, outcomes: &[Vec<SplitOutcome>]) -> RateReport {
        let user_rates = self.user_rates(outcomes);
        let s = Score::from_rates(user_rates.iter().copied(), &self.penalty);
        RateReport {
            user_rates,
            splits: outcomes
                .iter()
                .map(|row| row.iter().map(|o| o.split).collect())
                .collect(),
            min_rate: s.min_rate,
            max_rate: s.max_rate,
            f_cons: s.f_cons,
            f_diff: s.f_diff,
            objective: s.objective,
            penalized: s.penalized,
            degenerate_pairs: outcomes.iter().flatten().filter(|o| o.degenerate).count(),
        }
    }

    pub fn evaluate(&self, x: &AllocationMatrix) -> Result<RateReport> {
        x.validate(self.pairs)?;
        Ok(self.report(&self.solve_all(x)))
    }
}

/// Rates, split and penalized objective of allocation `x`.
pub fn evaluate(
    x: &AllocationMatrix,
    pairs: &PairSet,
    h: &ChannelMatrix,
    link: &LinkBudget,
    penalty: &PenaltyParams,
) -> Result<RateReport> {
    Problem::new(pairs, h, link, *penalty).evaluate(x)
}
