//! User-to-LED binding by strongest channel, with the greedy parity repair
//! needed when every LED must host an even number of users.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{ChannelMatrix, Scenario};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    assignment: Vec<usize>,
    per_led: Vec<Vec<usize>>,
    /// Users with zero gain to every LED. They are still bound (to LED 0) but
    /// can never receive a nonzero rate.
    dark_users: Vec<usize>,
}

impl Binding {
    pub fn from_assignment(assignment: Vec<usize>, led_count: usize) -> Self {
        let mut per_led = vec![Vec::new(); led_count];
        for (user, &led) in assignment.iter().enumerate() {
            per_led[led].push(user);
        }
        Self {
            assignment,
            per_led,
            dark_users: Vec::new(),
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn led_of(&self, user: usize) -> usize {
        self.assignment[user]
    }

    pub fn per_led_users(&self) -> &[Vec<usize>] {
        &self.per_led
    }

    pub fn counts(&self) -> Vec<usize> {
        self.per_led.iter().map(Vec::len).collect()
    }

    pub fn led_count(&self) -> usize {
        self.per_led.len()
    }

    pub fn user_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn dark_users(&self) -> &[usize] {
        &self.dark_users
    }

    pub fn odd_leds(&self) -> usize {
        self.per_led.iter().filter(|u| u.len() % 2 == 1).count()
    }

    fn rebind(&mut self, user: usize, to: usize) {
        let from = self.assignment[user];
        if from == to {
            return;
        }
        self.per_led[from].retain(|&u| u != user);
        // Keep member lists sorted so the binding is canonical.
        let pos = self.per_led[to].partition_point(|&u| u < user);
        self.per_led[to].insert(pos, user);
        self.assignment[user] = to;
    }
}

/// Bind each user to the LED with the largest gain; ties go to the lowest index.
pub fn bind_max_gain(h: &ChannelMatrix) -> Result<Binding> {
    if h.led_count() == 0 {
        return Err(Error::Config("channel matrix has no LED columns".into()));
    }
    let mut assignment = Vec::with_capacity(h.user_count());
    let mut dark_users = Vec::new();
    for user in 0..h.user_count() {
        let row = h.row(user);
        let mut best = 0;
        for (i, g) in row.iter().enumerate().skip(1) {
            if g.abs() > row[best].abs() {
                best = i;
            }
        }
        if row[best] == 0.0 {
            dark_users.push(user);
        }
        assignment.push(best);
    }
    let mut b = Binding::from_assignment(assignment, h.led_count());
    b.dark_users = dark_users;
    Ok(b)
}

/// Cost of a binding under the parity program: odd-LED count first, then
/// the summed ratio of each user's serving distance to its farthest-LED distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityCost {
    pub violations: usize,
    pub distance_cost: f64,
}

impl ParityCost {
    pub fn cmp_lex(&self, other: &Self) -> Ordering {
        self.violations
            .cmp(&other.violations)
            .then(self.distance_cost.total_cmp(&other.distance_cost))
    }
}

/// User-to-LED distances and, per user, the farthest-LED distance.
struct DistanceTable {
    leds: usize,
    d: Vec<f64>,
    farthest: Vec<f64>,
}

impl DistanceTable {
    fn new(scenario: &Scenario) -> Self {
        let leds = scenario.led_count();
        let mut d = Vec::with_capacity(scenario.user_count() * leds);
        let mut farthest = Vec::with_capacity(scenario.user_count());
        for u in &scenario.users {
            let row: Vec<f64> = scenario
                .leds
                .iter()
                .map(|l| l.position.distance(&u.position))
                .collect();
            farthest.push(row.iter().copied().fold(0.0, f64::max));
            d.extend(row);
        }
        Self { leds, d, farthest }
    }

    fn cost(&self, binding: &Binding) -> ParityCost {
        let distance_cost = binding
            .assignment()
            .iter()
            .enumerate()
            .map(|(u, &l)| {
                if self.farthest[u] > 0.0 {
                    self.d[u * self.leds + l] / self.farthest[u]
                } else {
                    0.0
                }
            })
            .sum();
        ParityCost {
            violations: binding.odd_leds(),
            distance_cost,
        }
    }
}

pub fn parity_cost(binding: &Binding, scenario: &Scenario) -> ParityCost {
    DistanceTable::new(scenario).cost(binding)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepairOutcome {
    pub binding: Binding,
    /// Random moves attempted before every LED held an even count.
    pub iterations: usize,
}

/// Iterative greedy repair: move a random user between two random LEDs and
/// keep the move unless the (violations, distance) cost gets worse.
pub fn repair_parity<R: Rng + ?Sized>(
    binding: &Binding,
    scenario: &Scenario,
    rng: &mut R,
    max_iters: usize,
) -> Result<RepairOutcome> {
    let table = DistanceTable::new(scenario);
    let mut current = binding.clone();
    let mut cost = table.cost(&current);
    let leds = current.led_count();
    let mut iterations = 0;

    if cost.violations > 0 && current.user_count() % 2 == 1 {
        return Err(Error::RepairFailed {
            iterations: 0,
            violations: cost.violations,
        });
    }
    while cost.violations > 0 && iterations < max_iters && leds > 1 {
        iterations += 1;
        let occupied: Vec<usize> = (0..leds)
            .filter(|&l| !current.per_led[l].is_empty())
            .collect();
        let from = *occupied.choose(rng).expect("at least one user is bound");
        let mut to = rng.gen_range(0..leds - 1);
        if to >= from {
            to += 1;
        }
        let user = *current.per_led[from]
            .choose(rng)
            .expect("source LED is occupied");

        current.rebind(user, to);
        let candidate = table.cost(&current);
        if candidate.cmp_lex(&cost) == Ordering::Greater {
            current.rebind(user, from);
        } else {
            cost = candidate;
        }
    }
    if cost.violations > 0 {
        return Err(Error::RepairFailed {
            iterations,
            violations: cost.violations,
        });
    }
    Ok(RepairOutcome {
        binding: current,
        iterations,
    })
}
