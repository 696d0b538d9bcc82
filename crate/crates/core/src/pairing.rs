//! Divide-and-next-largest-difference user pairing (D-NLUPA).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::association::Binding;
use crate::error::{Error, Result};
use crate::geometry::ChannelMatrix;

/// Whether every user must share its subcarriers with a partner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Every LED must hold an even number of users; all users are paired.
    Imposed,
    /// An odd LED keeps its weakest user as a lone occupant.
    NotImposed,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Imposed, Scheme::NotImposed];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Imposed => "imposed",
            Scheme::NotImposed => "not-imposed",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "imposed" => Ok(Scheme::Imposed),
            "not-imposed" => Ok(Scheme::NotImposed),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Users sharing a set of subcarriers. `weak` is `None` for a lone user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub strong: usize,
    pub weak: Option<usize>,
}

impl Pair {
    pub fn members(&self) -> impl Iterator<Item = usize> {
        std::iter::once(self.strong).chain(self.weak)
    }
}

/// Addresses pair `index` of LED `led`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairId {
    pub led: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    scheme: Scheme,
    per_led: Vec<Vec<Pair>>,
}

impl PairSet {
    /// Assemble a pair set directly, bypassing D-NLUPA. Useful for fixtures.
    pub fn from_parts(scheme: Scheme, per_led: Vec<Vec<Pair>>) -> Self {
        Self { scheme, per_led }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn led_count(&self) -> usize {
        self.per_led.len()
    }

    pub fn pairs_of(&self, led: usize) -> &[Pair] {
        &self.per_led[led]
    }

    pub fn get(&self, id: PairId) -> Result<&Pair> {
        self.per_led
            .get(id.led)
            .and_then(|p| p.get(id.index))
            .ok_or(Error::PairOutOfRange {
                led: id.led,
                pair: id.index,
            })
    }

    pub fn ids(&self) -> impl Iterator<Item = PairId> + '_ {
        self.per_led
            .iter()
            .enumerate()
            .flat_map(|(led, p)| (0..p.len()).map(move |index| PairId { led, index }))
    }

    pub fn pair_count(&self) -> usize {
        self.per_led.iter().map(Vec::len).sum()
    }

    /// Number of distinct users covered by the pairs.
    pub fn user_count(&self) -> usize {
        self.per_led
            .iter()
            .flatten()
            .map(|p| p.members().count())
            .sum()
    }
}

/// Sort each LED's users by home gain (descending, ties by user index) and
/// pair the j-th user of the strong half with the j-th of the weak half.
/// Under the not-imposed scheme an odd LED leaves its weakest user alone.
pub fn d_nlupa(binding: &Binding, h: &ChannelMatrix, scheme: Scheme) -> Result<PairSet> {
    let mut per_led = Vec::with_capacity(binding.led_count());
    for (led, users) in binding.per_led_users().iter().enumerate() {
        if users.len() % 2 == 1 && scheme == Scheme::Imposed {
            return Err(Error::OddCount {
                led,
                count: users.len(),
            });
        }
        let mut sorted = users.clone();
        sorted.sort_by(|&a, &b| h.gain(b, led).total_cmp(&h.gain(a, led)).then(a.cmp(&b)));

        let half = sorted.len() / 2;
        let mut pairs: Vec<Pair> = (0..half)
            .map(|j| Pair {
                strong: sorted[j],
                weak: Some(sorted[j + half]),
            })
            .collect();
        if sorted.len() % 2 == 1 {
            pairs.push(Pair {
                strong: sorted[sorted.len() - 1],
                weak: None,
            });
        }
        per_led.push(pairs);
    }
    Ok(PairSet { scheme, per_led })
}
