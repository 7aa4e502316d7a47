//! Monte Carlo link-level simulator for SWIPT-powered cooperative NOMA
//! downlink with OAM side channels over Rician fading.
//!
//! A base station serves a near user (UE1) and a far user (UE2). UE1 splits
//! its received power between energy harvesting and decoding, then relays
//! the far user's symbol with the harvested energy while the base station
//! sends one extra symbol to each user on orthogonal OAM modes. The crate
//! estimates ergodic user capacities, sum capacity and energy efficiency of
//! that scheme and of three benchmarks, and runs single-axis parameter
//! sweeps that emit CSV tables.

pub mod channel;
pub mod config;
pub mod error;
pub mod experiments;
pub mod montecarlo;
pub mod params;
pub mod schemes;

pub use channel::{
    draw_realization, oam_singular_value, sample_rician_power, ChannelSet, FadingRealization,
    OamChannel, OamModel, RicianLink,
};
pub use config::{parse_spec, to_config_string, ConfigMap};
pub use error::{Error, Result};
pub use experiments::{
    figure_preset, figure_preset_with, run_sweep, run_sweep_with, Axis, Figure, ResultRow,
    SweepSpec,
};
pub use montecarlo::{estimate, estimate_with, ErgodicEstimate, Metric, Workers};
pub use params::{PowerRule, SystemParams};
pub use schemes::{CapacityBreakdown, Scheme, SinrSet};
