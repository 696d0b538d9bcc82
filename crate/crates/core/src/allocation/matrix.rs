use std::hash::{Hash, Hasher};

use rand::Rng;

use crate::error::{Error, Result};
use crate::pairing::PairSet;

/// Subcarrier-to-pair grid: one row per LED, one column per data subcarrier.
/// A cell holds the local index of the pair occupying that subcarrier, or
/// nothing when the subcarrier is idle. Every LED therefore uses at most
/// `K/2 - 1` subcarriers by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AllocationMatrix {
    leds: usize,
    subcarriers: usize,
    cells: Vec<Option<u32>>,
}

/// Single-cell change of an allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub led: usize,
    pub subcarrier: usize,
    pub from: Option<usize>,
    pub to: Option<usize>,
}

impl Move {
    /// Whether the subcarrier switches between idle and busy, which changes
    /// the interference seen at every other LED.
    pub fn toggles_occupancy(&self) -> bool {
        self.from.is_some() != self.to.is_some()
    }

    pub fn inverse(&self) -> Move {
        Move {
            from: self.to,
            to: self.from,
            ..*self
        }
    }
}

impl AllocationMatrix {
    pub fn unassigned(leds: usize, subcarriers: usize) -> Self {
        Self {
            leds,
            subcarriers,
            cells: vec![None; leds * subcarriers],
        }
    }

    pub fn from_rows(rows: &[Vec<Option<usize>>]) -> Result<Self> {
        let subcarriers = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != subcarriers) {
            return Err(Error::Config("ragged allocation rows".into()));
        }
        let mut x = Self::unassigned(rows.len(), subcarriers);
        for (led, row) in rows.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                x.set(led, k, *v);
            }
        }
        Ok(x)
    }

    pub fn led_count(&self) -> usize {
        self.leds
    }

    pub fn subcarrier_count(&self) -> usize {
        self.subcarriers
    }

    #[inline]
    pub fn get(&self, led: usize, k: usize) -> Option<usize> {
        self.cells[led * self.subcarriers + k].map(|p| p as usize)
    }

    #[inline]
    pub fn set(&mut self, led: usize, k: usize, pair: Option<usize>) {
        self.cells[led * self.subcarriers + k] = pair.map(|p| p as u32);
    }

    #[inline]
    pub fn is_occupied(&self, led: usize, k: usize) -> bool {
        self.cells[led * self.subcarriers + k].is_some()
    }

    pub fn apply(&mut self, mv: &Move) {
        debug_assert_eq!(self.get(mv.led, mv.subcarrier), mv.from);
        self.set(mv.led, mv.subcarrier, mv.to);
    }

    /// Subcarriers of `led` held by local pair `pair`, ascending.
    pub fn subcarriers_of(&self, led: usize, pair: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.cells[led * self.subcarriers..(led + 1) * self.subcarriers];
        row.iter()
            .enumerate()
            .filter(move |(_, c)| **c == Some(pair as u32))
            .map(|(k, _)| k)
    }

    pub fn used_subcarriers(&self, led: usize) -> usize {
        (0..self.subcarriers)
            .filter(|&k| self.is_occupied(led, k))
            .count()
    }

    pub fn hamming(&self, other: &Self) -> usize {
        self.cells
            .iter()
            .zip(&other.cells)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Stable 64-bit digest of the grid, used by the tabu list.
    pub fn fingerprint(&self) -> u64 {
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        self.hash(&mut hasher);
        hasher.finish()
    }

    pub fn validate(&self, pairs: &PairSet) -> Result<()> {
        if self.leds != pairs.led_count() {
            return Err(Error::Config(format!(
                "allocation has {} rows for {} LEDs",
                self.leds,
                pairs.led_count()
            )));
        }
        for led in 0..self.leds {
            let n = pairs.pairs_of(led).len();
            for k in 0..self.subcarriers {
                if let Some(p) = self.get(led, k) {
                    if p >= n {
                        return Err(Error::PairOutOfRange { led, pair: p });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Every cell drawn uniformly from idle plus the LED's local pairs.
pub fn random_solution<R: Rng + ?Sized>(
    pairs: &PairSet,
    data_subcarriers: usize,
    rng: &mut R,
) -> AllocationMatrix {
    let mut x = AllocationMatrix::unassigned(pairs.led_count(), data_subcarriers);
    for led in 0..pairs.led_count() {
        let n = pairs.pairs_of(led).len();
        if n == 0 {
            continue;
        }
        for k in 0..data_subcarriers {
            let v = rng.gen_range(0..=n);
            x.set(led, k, if v == n { None } else { Some(v) });
        }
    }
    x
}

/// Whether any cell of an allocation can change.
pub fn has_moves(pairs: &PairSet, data_subcarriers: usize) -> bool {
    data_subcarriers > 0 && (0..pairs.led_count()).any(|l| !pairs.pairs_of(l).is_empty())
}

/// Pick a random LED that has pairs, a random subcarrier of it, and a new
/// occupant uniformly among the values other than the current one.
pub fn propose_move<R: Rng + ?Sized>(
    x: &AllocationMatrix,
    pairs: &PairSet,
    rng: &mut R,
) -> Result<Move> {
    let candidates: Vec<usize> = (0..pairs.led_count())
        .filter(|&l| !pairs.pairs_of(l).is_empty())
        .collect();
    if candidates.is_empty() || x.subcarrier_count() == 0 {
        return Err(Error::NothingToAllocate);
    }
    let led = candidates[rng.gen_range(0..candidates.len())];
    let k = rng.gen_range(0..x.subcarrier_count());
    let n = pairs.pairs_of(led).len();
    // Values are encoded 0..n for pairs and n for idle.
    let current = x.get(led, k).unwrap_or(n);
    let mut v = rng.gen_range(0..n);
    if v >= current {
        v += 1;
    }
    Ok(Move {
        led,
        subcarrier: k,
        from: x.get(led, k),
        to: if v == n { None } else { Some(v) },
    })
}

pub fn neighbor<R: Rng + ?Sized>(
    x: &AllocationMatrix,
    pairs: &PairSet,
    rng: &mut R,
) -> Result<AllocationMatrix> {
    let mv = propose_move(x, pairs, rng)?;
    let mut next = x.clone();
    next.apply(&mv);
    Ok(next)
}
