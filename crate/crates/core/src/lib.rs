//! Max-min user rate optimization for multi-carrier NOMA visible light
//! networks with centralized baseband processing.
//!
//! The pipeline for one user-location realization is:
//!
//! 1. [`geometry`]: place LEDs and users, compute the LoS channel matrix.
//! 2. [`association`]: bind users to their strongest LED and, when every
//!    user must be paired, repair odd LED populations.
//! 3. [`pairing`]: D-NLUPA strong/weak pairs per LED.
//! 4. [`allocation`]: simulated annealing (or tabu search) over the
//!    subcarrier grid, with [`power_split`] bisection nested inside every
//!    objective evaluation.
//!
//! [`experiment`] drives Monte-Carlo sweeps over these steps.

pub mod allocation;
pub mod association;
pub mod error;
pub mod experiment;
pub mod export;
pub mod geometry;
pub mod pairing;
pub mod phy;
pub mod power_split;
pub mod seed;

pub use allocation::{
    evaluate, simulated_annealing, tabu_search, AllocationMatrix, PenaltyParams, Problem,
    RateReport, SaParams, TsParams,
};
pub use association::{bind_max_gain, parity_cost, repair_parity, Binding};
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, Optimizer, ResultRow, SchemeSelection, SweepVar};
pub use geometry::{ChannelMatrix, Led, Point3, ReceiverSpec, Room, Scenario, UserTerminal};
pub use pairing::{d_nlupa, Pair, PairId, PairSet, Scheme};
pub use phy::{LinkBudget, NoiseConfig, PowerConfig, SubcarrierPlan};
pub use power_split::{bisect_split, BisectParams, PowerSplit};
