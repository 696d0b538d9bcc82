//! Max-min power split inside a NOMA pair.
//!
//! For a fixed subcarrier allocation the strong user's rate increases with
//! its power share `a` while the weak user's rate (share `1 - a`) decreases,
//! so `g(a) = R_s(a) - R_w(1 - a)` has a single root on `(0, 1)` and the root
//! maximizes `min(R_s, R_w)`. Bisection finds it.

use serde::{Deserialize, Serialize};

use crate::allocation::AllocationMatrix;
use crate::error::{Error, Result};
use crate::geometry::ChannelMatrix;
use crate::pairing::{PairId, PairSet};
use crate::phy::{LinkBudget, PairLink};

/// Bracket edge kept away from 0 and 1 so both users always get some power.
pub const BRACKET_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    pub a_strong: f64,
    pub a_weak: f64,
}

impl PowerSplit {
    /// Lone user, full power.
    pub const SINGLE: PowerSplit = PowerSplit {
        a_strong: 1.0,
        a_weak: 0.0,
    };
    /// Pair holding no subcarriers; the split is never used.
    pub const IDLE: PowerSplit = PowerSplit {
        a_strong: 0.0,
        a_weak: 0.0,
    };

    pub fn new(a_strong: f64, a_weak: f64) -> Result<Self> {
        let s = Self { a_strong, a_weak };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.a_strong)
            && (0.0..=1.0).contains(&self.a_weak)
            && self.a_strong + self.a_weak <= 1.0 + 1e-12;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSplit {
                a_strong: self.a_strong,
                a_weak: self.a_weak,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BisectParams {
    /// Absolute width of the `a_strong` bracket at which bisection may stop.
    /// Zero bisects down to adjacent floating-point values.
    pub bracket_tol: f64,
    /// Required `|R_s - R_w| / max(R_s, R_w)` at the returned split.
    pub rate_tol: f64,
    pub max_iters: usize,
}

impl Default for BisectParams {
    fn default() -> Self {
        Self {
            bracket_tol: 1e-9,
            rate_tol: 1e-6,
            max_iters: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitOutcome {
    pub split: PowerSplit,
    pub rate_strong: f64,
    pub rate_weak: f64,
    pub iterations: usize,
    /// A member has zero gain to the LED, so the pair cannot serve both users.
    pub degenerate: bool,
}

impl SplitOutcome {
    pub fn min_rate(&self) -> f64 {
        self.rate_strong.min(self.rate_weak)
    }
}

fn rel_gap(rs: f64, rw: f64) -> f64 {
    let top = rs.max(rw);
    if top > 0.0 {
        (rs - rw).abs() / top
    } else {
        0.0
    }
}

/// Solve the split for a pair whose received terms are already gathered.
/// Singletons get the full power; pairs without subcarriers get [`PowerSplit::IDLE`].
pub fn solve_link(pl: &PairLink, params: &BisectParams) -> Result<SplitOutcome> {
    let outcome = |split: PowerSplit, iterations, degenerate| SplitOutcome {
        split,
        rate_strong: pl.strong_rate(split.a_strong),
        rate_weak: if pl.singleton {
            0.0
        } else {
            pl.weak_rate(split.a_strong, split.a_weak)
        },
        iterations,
        degenerate,
    };
    if pl.subcarrier_count() == 0 {
        return Ok(SplitOutcome {
            split: PowerSplit::IDLE,
            rate_strong: 0.0,
            rate_weak: 0.0,
            iterations: 0,
            degenerate: false,
        });
    }
    if pl.singleton {
        return Ok(outcome(PowerSplit::SINGLE, 0, false));
    }
    if pl.weak_signal == 0.0 {
        log::debug!("weak member has zero gain; pair degenerates to a single user");
        return Ok(outcome(PowerSplit::SINGLE, 0, true));
    }
    if pl.strong_signal == 0.0 {
        log::debug!("strong member has zero gain; pair degenerates");
        return Ok(outcome(
            PowerSplit {
                a_strong: 0.0,
                a_weak: 1.0,
            },
            0,
            true,
        ));
    }

    let eval = |a: f64| (pl.strong_rate(a), pl.weak_rate(a, 1.0 - a));
    let at = |a: f64, iterations| {
        let (rs, rw) = eval(a);
        SplitOutcome {
            split: PowerSplit {
                a_strong: a,
                a_weak: 1.0 - a,
            },
            rate_strong: rs,
            rate_weak: rw,
            iterations,
            degenerate: false,
        }
    };

    let (mut lo, mut hi) = (BRACKET_EPS, 1.0 - BRACKET_EPS);
    let (rs_lo, rw_lo) = eval(lo);
    if rs_lo >= rw_lo {
        return Ok(at(lo, 0));
    }
    let (rs_hi, rw_hi) = eval(hi);
    if rs_hi <= rw_hi {
        return Ok(at(hi, 0));
    }

    for iter in 1..=params.max_iters {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Bracket collapsed to adjacent doubles; keep the better end.
            let (a, b) = (at(lo, iter), at(hi, iter));
            let best = if b.min_rate() > a.min_rate() { b } else { a };
            if rel_gap(best.rate_strong, best.rate_weak) <= params.rate_tol {
                return Ok(best);
            }
            break;
        }
        let (rs, rw) = eval(mid);
        if rs < rw {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= params.bracket_tol && rel_gap(rs, rw) <= params.rate_tol {
            return Ok(SplitOutcome {
                split: PowerSplit {
                    a_strong: mid,
                    a_weak: 1.0 - mid,
                },
                rate_strong: rs,
                rate_weak: rw,
                iterations: iter,
                degenerate: false,
            });
        }
    }
    Err(Error::BisectionFailed {
        iterations: params.max_iters,
        lo,
        hi,
    })
}

/// Max-min split of pair `id` for allocation `x`.
pub fn bisect_split(
    pairs: &PairSet,
    id: PairId,
    x: &AllocationMatrix,
    h: &ChannelMatrix,
    link: &LinkBudget,
    params: &BisectParams,
) -> Result<SplitOutcome> {
    solve_link(&PairLink::new(pairs, id, x, h, link)?, params)
}
