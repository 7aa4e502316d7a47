//! Rician fading links and deterministic OAM line-of-sight channels.
//!
//! A link's squared envelope is drawn as
//!
//! ```text
//! h = sqrt(K·Ω_eff/(K+1)) + sqrt(Ω_eff/(K+1))·w,   w ~ CN(0, 1)
//! Ω_eff = Ω / d^ε
//! ```
//!
//! so that `E[|h|²] = Ω_eff`. The LOS phase is fixed at zero because only
//! `|h|²` is ever consumed. `K = +inf` is accepted as the pure-LOS limit and
//! yields `|h|² = Ω_eff` exactly.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Default path-loss exponent applied to every link.
pub const DEFAULT_PATHLOSS_EXPONENT: f64 = 2.0;

/// One Rician fading link between two nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianLink {
    /// Rician K factor (linear). `f64::INFINITY` means no scattered component.
    pub k_factor: f64,
    /// Mean of `|h|²` at unit distance (Ω).
    pub mean_power: f64,
    /// Normalized link distance.
    pub distance: f64,
    pub pathloss_exponent: f64,
}

impl RicianLink {
    pub fn new(k_factor: f64, mean_power: f64, distance: f64) -> Self {
        Self {
            k_factor,
            mean_power,
            distance,
            pathloss_exponent: DEFAULT_PATHLOSS_EXPONENT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_factor.is_nan() || self.k_factor < 0.0 {
            return Err(Error::param(
                "k_factor",
                format!("must be >= 0, got {}", self.k_factor),
            ));
        }
        if !(self.mean_power.is_finite() && self.mean_power > 0.0) {
            return Err(Error::param(
                "mean_power",
                format!("must be finite and > 0, got {}", self.mean_power),
            ));
        }
        if !(self.distance.is_finite() && self.distance > 0.0) {
            return Err(Error::param(
                "distance",
                format!("must be finite and > 0, got {}", self.distance),
            ));
        }
        if !(self.pathloss_exponent.is_finite() && self.pathloss_exponent >= 0.0) {
            return Err(Error::param(
                "pathloss_exponent",
                format!("must be finite and >= 0, got {}", self.pathloss_exponent),
            ));
        }
        let eff = self.effective_mean_power();
        if !(eff.is_finite() && eff > 0.0) {
            return Err(Error::param(
                "mean_power",
                format!("effective mean power Ω/d^ε = {eff} is not finite and positive"),
            ));
        }
        Ok(())
    }

    /// `Ω / d^ε`, the mean of `|h|²` after distance attenuation.
    pub fn effective_mean_power(&self) -> f64 {
        self.mean_power / self.distance.powf(self.pathloss_exponent)
    }

    /// Fraction of the mean power carried by the LOS component, `K/(K+1)`.
    pub fn los_fraction(&self) -> f64 {
        if self.k_factor.is_infinite() {
            1.0
        } else {
            self.k_factor / (self.k_factor + 1.0)
        }
    }
}

/// Precomputed amplitudes for drawing `|h|²` from a validated link.
#[derive(Debug, Clone, Copy)]
struct RicianSampler {
    los_amplitude: f64,
    /// Per-quadrature standard deviation of the scattered component.
    scatter_std: f64,
}

impl RicianSampler {
    fn new(link: &RicianLink) -> Self {
        let eff = link.effective_mean_power();
        let (los_power, scatter_power) = if link.k_factor.is_infinite() {
            (eff, 0.0)
        } else {
            let kp1 = link.k_factor + 1.0;
            (link.k_factor * eff / kp1, eff / kp1)
        };
        Self {
            los_amplitude: los_power.sqrt(),
            scatter_std: (0.5 * scatter_power).sqrt(),
        }
    }

    // Always consumes two normals so that every link advances the stream
    // identically regardless of K.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let i = self.los_amplitude + self.scatter_std * re;
        let q = self.scatter_std * im;
        i * i + q * q
    }
}

/// Draws one `|h|²` sample for `link`.
pub fn sample_rician_power<R: Rng + ?Sized>(link: &RicianLink, rng: &mut R) -> Result<f64> {
    link.validate()?;
    Ok(RicianSampler::new(link).sample(rng))
}

/// How the singular value of an OAM channel is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OamModel {
    /// Use the given singular value directly.
    Fixed { value: f64 },
    /// `base_gain / d^ε`.
    LosScaled {
        base_gain: f64,
        pathloss_exponent: f64,
    },
}

/// Deterministic line-of-sight OAM channel from the base station to one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OamChannel {
    /// OAM topological charge. Recorded, but does not enter the gain models.
    pub mode: u32,
    pub distance: f64,
    pub model: OamModel,
}

impl OamChannel {
    pub fn fixed(mode: u32, distance: f64, value: f64) -> Self {
        Self {
            mode,
            distance,
            model: OamModel::Fixed { value },
        }
    }

    pub fn los_scaled(mode: u32, distance: f64, base_gain: f64, pathloss_exponent: f64) -> Self {
        Self {
            mode,
            distance,
            model: OamModel::LosScaled {
                base_gain,
                pathloss_exponent,
            },
        }
    }

    /// LOS-scaled channel whose base gain is the LOS power `K/(K+1)·Ω` of `link`.
    pub fn for_link(mode: u32, link: &RicianLink) -> Self {
        Self::los_scaled(
            mode,
            link.distance,
            link.los_fraction() * link.mean_power,
            link.pathloss_exponent,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode < 1 {
            return Err(Error::param("oam_mode", "OAM mode must be >= 1"));
        }
        if !(self.distance.is_finite() && self.distance > 0.0) {
            return Err(Error::param(
                "oam_distance",
                format!("must be finite and > 0, got {}", self.distance),
            ));
        }
        match self.model {
            OamModel::Fixed { value } => {
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::param(
                        "oam_value",
                        format!("fixed singular value must be finite and > 0, got {value}"),
                    ));
                }
            }
            OamModel::LosScaled {
                base_gain,
                pathloss_exponent,
            } => {
                if !(base_gain.is_finite() && base_gain > 0.0) {
                    return Err(Error::param(
                        "oam_value",
                        format!("base gain must be finite and > 0, got {base_gain}"),
                    ));
                }
                if !(pathloss_exponent.is_finite() && pathloss_exponent >= 0.0) {
                    return Err(Error::param(
                        "pathloss_exponent",
                        format!("must be finite and >= 0, got {pathloss_exponent}"),
                    ));
                }
                let mu = base_gain / self.distance.powf(pathloss_exponent);
                if !(mu.is_finite() && mu > 0.0) {
                    return Err(Error::param(
                        "oam_value",
                        format!("singular value {mu} is not finite and positive"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Singular value μ of the OAM channel response.
pub fn oam_singular_value(ch: &OamChannel) -> Result<f64> {
    ch.validate()?;
    Ok(match ch.model {
        OamModel::Fixed { value } => value,
        OamModel::LosScaled {
            base_gain,
            pathloss_exponent,
        } => base_gain / ch.distance.powf(pathloss_exponent),
    })
}

/// One joint draw of every channel quantity used by the schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingRealization {
    /// `|h_{s,1}|²`, base station to near user.
    pub g_s1: f64,
    /// `|h_{s,2}|²`, base station to far user.
    pub g_s2: f64,
    /// `|h_{1,2}|²`, near user to far user (relay link).
    pub g_12: f64,
    pub mu1: f64,
    pub mu2: f64,
}

/// Validated, precomputed channel state for repeated draws.
#[derive(Debug, Clone, Copy)]
pub struct ChannelSet {
    s1: RicianSampler,
    s2: RicianSampler,
    r12: RicianSampler,
    mu1: f64,
    mu2: f64,
}

impl ChannelSet {
    pub fn new(params: &SystemParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            s1: RicianSampler::new(&params.link_s1),
            s2: RicianSampler::new(&params.link_s2),
            r12: RicianSampler::new(&params.link_12),
            mu1: oam_singular_value(&params.oam1)?,
            mu2: oam_singular_value(&params.oam2)?,
        })
    }

    /// Independent draws for the three links, in the order s→1, s→2, 1→2.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> FadingRealization {
        let g_s1 = self.s1.sample(rng);
        let g_s2 = self.s2.sample(rng);
        let g_12 = self.r12.sample(rng);
        FadingRealization {
            g_s1,
            g_s2,
            g_12,
            mu1: self.mu1,
            mu2: self.mu2,
        }
    }
}

pub fn draw_realization<R: Rng + ?Sized>(
    params: &SystemParams,
    rng: &mut R,
) -> Result<FadingRealization> {
    Ok(ChannelSet::new(params)?.draw(rng))
}
