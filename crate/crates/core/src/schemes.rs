//! Per-realization SINRs, capacities and energy efficiency.
//!
//! Four schemes are supported:
//!
//! * `cnoma-ps-oam`: two-phase cooperative NOMA with power-splitting SWIPT at
//!   the near user, plus one OAM symbol per user sent during the relay phase.
//! * `cnoma-ps`: the same protocol without the OAM symbols.
//! * `cnoma-ts`: cooperative NOMA with time-switching SWIPT. A fraction
//!   `alpha` of the frame is spent harvesting, the rest is split evenly
//!   between the NOMA broadcast and the relay hop.
//! * `oma-ps-oam`: TDMA with four equal slots (x1, x2, relay, OAM pair).
//!
//! All capacities are in bits/s/Hz.

use std::fmt;
use std::str::FromStr;

use crate::channel::FadingRealization;
use crate::error::{Error, Result};
use crate::params::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    CnomaPsOam,
    CnomaPs,
    CnomaTs,
    OmaPsOam,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::CnomaPsOam,
        Scheme::CnomaPs,
        Scheme::CnomaTs,
        Scheme::OmaPsOam,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::CnomaPsOam => "cnoma-ps-oam",
            Scheme::CnomaPs => "cnoma-ps",
            Scheme::CnomaTs => "cnoma-ts",
            Scheme::OmaPsOam => "oma-ps-oam",
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
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s)
            .ok_or_else(|| Error::param("scheme", format!("unknown scheme `{s}`")))
    }
}

/// SINRs of the proposed scheme for one realization.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SinrSet {
    /// UE1 decoding its own symbol after SIC.
    pub s_x1: f64,
    /// UE1 decoding the far user's symbol (first SIC stage).
    pub s_x2_at_ue1: f64,
    /// UE2 decoding its symbol directly, treating x1 as noise.
    pub s_x2_at_ue2: f64,
    /// UE2 receiving x2 over the decode-and-forward hop.
    pub s_relay: f64,
    pub s_x3: f64,
    pub s_x4: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityBreakdown {
    pub scheme: Scheme,
    pub c_ue1: f64,
    pub c_ue2: f64,
    pub c_sum: f64,
    /// Relay transmit power of this realization.
    pub relay_power: f64,
}

impl CapacityBreakdown {
    fn new(scheme: Scheme, c_ue1: f64, c_ue2: f64, relay_power: f64) -> Self {
        Self {
            scheme,
            c_ue1,
            c_ue2,
            c_sum: c_ue1 + c_ue2,
            relay_power,
        }
    }
}

/// Relay transmit power from power-splitting harvesting: `η·δ·P·|h_s1|²`.
pub fn harvested_power(params: &SystemParams, g_s1: f64) -> f64 {
    params.eta * params.delta * params.total_power() * g_s1
}

/// Phase-one SINRs `(γ_x1, γ_x2→x1, γ_x2)` under power splitting.
pub fn phase1_sinrs(params: &SystemParams, g_s1: f64, g_s2: f64) -> (f64, f64, f64) {
    let id = (1.0 - params.delta) * params.rho;
    noma_sinrs(id, params.p_n, params.p_f, g_s1, g_s2)
}

// `snr` is the SNR available for information decoding.
fn noma_sinrs(snr: f64, p_n: f64, p_f: f64, g_s1: f64, g_s2: f64) -> (f64, f64, f64) {
    let near = snr * g_s1;
    let far = snr * g_s2;
    let s_x1 = near * p_n;
    let s_x2_at_ue1 = near * p_f / (near * p_n + 1.0);
    let s_x2_at_ue2 = far * p_f / (far * p_n + 1.0);
    (s_x1, s_x2_at_ue1, s_x2_at_ue2)
}

/// SINR of x2 at UE2 over the harvested-energy relay hop: `ρ·η·δ·|h_s1|²·|h_12|²`.
pub fn relay_sinr(params: &SystemParams, g_s1: f64, g_12: f64) -> f64 {
    params.rho * params.eta * params.delta * g_s1 * g_12
}

/// OAM symbol SINRs `(ρ·μ₁, ρ·μ₂)`.
pub fn oam_sinrs(params: &SystemParams, mu1: f64, mu2: f64) -> (f64, f64) {
    (params.rho * mu1, params.rho * mu2)
}

pub fn sinr_set(params: &SystemParams, r: &FadingRealization) -> SinrSet {
    let (s_x1, s_x2_at_ue1, s_x2_at_ue2) = phase1_sinrs(params, r.g_s1, r.g_s2);
    let (s_x3, s_x4) = oam_sinrs(params, r.mu1, r.mu2);
    SinrSet {
        s_x1,
        s_x2_at_ue1,
        s_x2_at_ue2,
        s_relay: relay_sinr(params, r.g_s1, r.g_12),
        s_x3,
        s_x4,
    }
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

fn min3(a: f64, b: f64, c: f64) -> f64 {
    a.min(b).min(c)
}

/// Bottleneck SINR of x2: UE1 must decode it for SIC and relaying, UE2
/// must decode it directly, and the relay hop must carry it.
fn x2_bottleneck(s: &SinrSet) -> f64 {
    min3(s.s_x2_at_ue1, s.s_x2_at_ue2, s.s_relay)
}

pub fn capacity_cnoma_ps_oam(s: &SinrSet, relay_power: f64) -> CapacityBreakdown {
    let c_ue1 = 0.5 * log2_1p(s.s_x1) + 0.5 * log2_1p(s.s_x3);
    let c_ue2 = 0.5 * log2_1p(x2_bottleneck(s)) + 0.5 * log2_1p(s.s_x4);
    CapacityBreakdown::new(Scheme::CnomaPsOam, c_ue1, c_ue2, relay_power)
}

pub fn capacity_cnoma_ps(s: &SinrSet, relay_power: f64) -> CapacityBreakdown {
    let c_ue1 = 0.5 * log2_1p(s.s_x1);
    let c_ue2 = 0.5 * log2_1p(x2_bottleneck(s));
    CapacityBreakdown::new(Scheme::CnomaPs, c_ue1, c_ue2, relay_power)
}

/// Relay power of the time-switching benchmark: the energy `η·α·P·|h_s1|²`
/// harvested over `α` is spent over the `(1-α)/2` relay slot.
pub fn ts_relay_power(params: &SystemParams, g_s1: f64) -> f64 {
    let a = params.alpha_ts;
    2.0 * params.eta * a * params.total_power() * g_s1 / (1.0 - a)
}

pub fn capacity_cnoma_ts(
    params: &SystemParams,
    g_s1: f64,
    g_s2: f64,
    g_12: f64,
) -> Result<CapacityBreakdown> {
    let a = params.alpha_ts;
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::param(
            "alpha_ts",
            format!("must lie in (0, 1), got {a}"),
        ));
    }
    Ok(cnoma_ts(params, g_s1, g_s2, g_12))
}

fn cnoma_ts(params: &SystemParams, g_s1: f64, g_s2: f64, g_12: f64) -> CapacityBreakdown {
    let slot = 0.5 * (1.0 - params.alpha_ts);
    let (s_x1, s_x2_at_ue1, s_x2_at_ue2) =
        noma_sinrs(params.rho, params.p_n, params.p_f, g_s1, g_s2);
    let relay_power = ts_relay_power(params, g_s1);
    let s_relay = relay_power * g_12 / params.noise_power;
    let c_ue1 = slot * log2_1p(s_x1);
    let c_ue2 = slot * log2_1p(min3(s_x2_at_ue1, s_x2_at_ue2, s_relay));
    CapacityBreakdown::new(Scheme::CnomaTs, c_ue1, c_ue2, relay_power)
}

pub fn capacity_oma_ps_oam(params: &SystemParams, r: &FadingRealization) -> CapacityBreakdown {
    let id = params.rho * (1.0 - params.delta);
    let (s_x3, s_x4) = oam_sinrs(params, r.mu1, r.mu2);
    let direct = id * r.g_s2;
    let relay = relay_sinr(params, r.g_s1, r.g_12);
    let c_ue1 = 0.25 * log2_1p(id * r.g_s1) + 0.25 * log2_1p(s_x3);
    let c_ue2 = 0.25 * log2_1p(direct.min(relay)) + 0.25 * log2_1p(s_x4);
    CapacityBreakdown::new(
        Scheme::OmaPsOam,
        c_ue1,
        c_ue2,
        harvested_power(params, r.g_s1),
    )
}

/// Capacities of `scheme` for one realization. `params` must be valid.
pub fn evaluate(scheme: Scheme, params: &SystemParams, r: &FadingRealization) -> CapacityBreakdown {
    match scheme {
        Scheme::CnomaPsOam => {
            capacity_cnoma_ps_oam(&sinr_set(params, r), harvested_power(params, r.g_s1))
        }
        Scheme::CnomaPs => capacity_cnoma_ps(&sinr_set(params, r), harvested_power(params, r.g_s1)),
        Scheme::CnomaTs => cnoma_ts(params, r.g_s1, r.g_s2, r.g_12),
        Scheme::OmaPsOam => capacity_oma_ps_oam(params, r),
    }
}

/// Mean relay power, using the mean gain of the BS→UE1 link.
pub fn mean_relay_power(scheme: Scheme, params: &SystemParams) -> f64 {
    let mean_g_s1 = params.link_s1.effective_mean_power();
    match scheme {
        Scheme::CnomaTs => ts_relay_power(params, mean_g_s1),
        _ => harvested_power(params, mean_g_s1),
    }
}

/// Total power consumed per frame: BS transmissions plus mean relay power.
pub fn ee_denominator(scheme: Scheme, params: &SystemParams) -> f64 {
    let p = params.total_power();
    let bs = match scheme {
        // NOMA broadcast plus the OAM pair.
        Scheme::CnomaPsOam => 2.0 * p,
        // x1 slot, x2 slot and the OAM slot.
        Scheme::OmaPsOam => 3.0 * p,
        Scheme::CnomaPs | Scheme::CnomaTs => p,
    };
    bs + mean_relay_power(scheme, params)
}

/// Energy efficiency: ergodic sum capacity over mean consumed power.
pub fn energy_efficiency(scheme: Scheme, ergodic_c_sum: f64, params: &SystemParams) -> Result<f64> {
    if !(ergodic_c_sum >= 0.0 && ergodic_c_sum.is_finite()) {
        return Err(Error::param(
            "c_sum",
            format!("ergodic sum capacity must be finite and >= 0, got {ergodic_c_sum}"),
        ));
    }
    let denom = ee_denominator(scheme, params);
    if !(denom > 0.0 && denom.is_finite()) {
        return Err(Error::param(
            "total_power",
            format!("energy-efficiency denominator must be positive, got {denom}"),
        ));
    }
    Ok(ergodic_c_sum / denom)
}
