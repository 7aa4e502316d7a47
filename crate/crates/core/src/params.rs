//! System parameters shared by every scheme.

use crate::channel::{OamChannel, RicianLink};
use crate::error::{Error, Result};

/// Tolerance used when checking the power-coefficient budget.
const BUDGET_TOL: f64 = 1e-9;

/// Constraint tying the NOMA power coefficients together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerRule {
    /// `p_N + p_F = 1`.
    #[default]
    Unit,
    /// `p_N + p_F = 1 - δ`.
    OneMinusDelta,
}

impl PowerRule {
    pub fn as_str(self) -> &'static str {
        match self {
            PowerRule::Unit => "unit",
            PowerRule::OneMinusDelta => "one-minus-delta",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "unit" => Some(PowerRule::Unit),
            "one-minus-delta" => Some(PowerRule::OneMinusDelta),
            _ => None,
        }
    }
}

/// Converts a dB value to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// All scalar protocol parameters.
///
/// The transmit power is not stored: it is always `rho * noise_power`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Transmit SNR `P/σ²` (linear).
    pub rho: f64,
    /// Power coefficient of the near user (CCU).
    pub p_n: f64,
    /// Power coefficient of the far user (CEU).
    pub p_f: f64,
    /// Power-splitting factor: fraction of received power sent to harvesting.
    pub delta: f64,
    /// Energy-harvesting conversion efficiency.
    pub eta: f64,
    /// Harvesting time fraction of the time-switching benchmark.
    pub alpha_ts: f64,
    pub link_s1: RicianLink,
    pub link_s2: RicianLink,
    pub link_12: RicianLink,
    pub oam1: OamChannel,
    pub oam2: OamChannel,
    pub noise_power: f64,
    pub power_rule: PowerRule,
    /// Nodes lie on a line, so `d_12 = 1 - d_s1`.
    pub collinear: bool,
}

impl Default for SystemParams {
    /// Base setting of the reference experiments at ρ = 15 dB.
    fn default() -> Self {
        let link_s1 = RicianLink::new(5.0, 36.0, 0.5);
        let link_s2 = RicianLink::new(2.0, 9.0, 1.0);
        let link_12 = RicianLink::new(5.0, 36.0, 0.5);
        Self {
            rho: db_to_linear(15.0),
            p_n: 0.4,
            p_f: 0.6,
            delta: 0.3,
            eta: 0.7,
            alpha_ts: 0.3,
            oam1: OamChannel::for_link(2, &link_s1),
            oam2: OamChannel::for_link(1, &link_s2),
            link_s1,
            link_s2,
            link_12,
            noise_power: 1.0,
            power_rule: PowerRule::Unit,
            collinear: true,
        }
    }
}

fn check_unit_interval(name: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::param(name, format!("must lie in [0, 1], got {v}")));
    }
    Ok(())
}

fn check_open_unit_interval(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::param(name, format!("must lie in (0, 1), got {v}")));
    }
    Ok(())
}

impl SystemParams {
    /// Total BS transmit power `P = ρ·σ²`.
    pub fn total_power(&self) -> f64 {
        self.rho * self.noise_power
    }

    pub fn rho_db(&self) -> f64 {
        linear_to_db(self.rho)
    }

    pub fn set_rho_db(&mut self, db: f64) {
        self.rho = db_to_linear(db);
    }

    /// Moves the near user, keeping the OAM path and (when collinear) the
    /// relay link consistent with the new position.
    pub fn set_distance_s1(&mut self, d: f64) {
        self.link_s1.distance = d;
        self.oam1.distance = d;
        if self.collinear {
            self.link_12.distance = 1.0 - d;
        }
    }

    pub fn set_distance_s2(&mut self, d: f64) {
        self.link_s2.distance = d;
        self.oam2.distance = d;
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::param(
                "rho",
                format!("must be finite and > 0, got {}", self.rho),
            ));
        }
        if !(self.noise_power.is_finite() && self.noise_power > 0.0) {
            return Err(Error::param(
                "noise_power",
                format!("must be finite and > 0, got {}", self.noise_power),
            ));
        }
        check_open_unit_interval("p_n", self.p_n)?;
        check_open_unit_interval("p_f", self.p_f)?;
        if self.p_n >= self.p_f {
            return Err(Error::param(
                "p_n",
                format!(
                    "NOMA requires p_N < p_F, got p_N = {} and p_F = {}",
                    self.p_n, self.p_f
                ),
            ));
        }
        check_unit_interval("delta", self.delta)?;
        check_unit_interval("eta", self.eta)?;
        check_open_unit_interval("alpha_ts", self.alpha_ts)?;
        let budget = match self.power_rule {
            PowerRule::Unit => 1.0,
            PowerRule::OneMinusDelta => 1.0 - self.delta,
        };
        if (self.p_n + self.p_f - budget).abs() > BUDGET_TOL {
            return Err(Error::param(
                "p_f",
                format!(
                    "p_N + p_F must equal {budget} under the `{}` power rule, got {}",
                    self.power_rule.as_str(),
                    self.p_n + self.p_f
                ),
            ));
        }
        self.link_s1.validate()?;
        self.link_s2.validate()?;
        self.link_12.validate()?;
        if self.collinear {
            let d = self.link_s1.distance;
            if !(d > 0.0 && d < 1.0) {
                return Err(Error::param(
                    "d_s1",
                    format!("collinear placement needs d_s1 in (0, 1), got {d}"),
                ));
            }
            if (self.link_12.distance - (1.0 - d)).abs() > 1e-12 {
                return Err(Error::param(
                    "d_12",
                    format!(
                        "collinear placement needs d_12 = 1 - d_s1 = {}, got {}",
                        1.0 - d,
                        self.link_12.distance
                    ),
                ));
            }
        }
        self.oam1.validate()?;
        self.oam2.validate()?;
        if self.oam1.distance != self.link_s1.distance {
            return Err(Error::param(
                "oam1_distance",
                "OAM path to UE1 must match d_s1",
            ));
        }
        if self.oam2.distance != self.link_s2.distance {
            return Err(Error::param(
                "oam2_distance",
                "OAM path to UE2 must match d_s2",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = SystemParams::default();
        p.validate().unwrap();
        assert_eq!(p.link_12.distance, 1.0 - p.link_s1.distance);
        assert!((p.total_power() - 31.622776601683793).abs() < 1e-12);
    }

    #[test]
    fn rho_tracks_power() {
        let mut p = SystemParams {
            noise_power: 2.0,
            ..SystemParams::default()
        };
        p.set_rho_db(10.0);
        assert!((p.total_power() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_swapped_coefficients() {
        let p = SystemParams {
            p_n: 0.6,
            p_f: 0.4,
            ..SystemParams::default()
        };
        let err = p.validate().unwrap_err().to_string();
        assert!(err.contains("p_N < p_F"), "{err}");
    }

    #[test]
    fn power_rule_variants() {
        let mut p = SystemParams {
            power_rule: PowerRule::OneMinusDelta,
            ..SystemParams::default()
        };
        assert!(p.validate().is_err());
        p.p_n = 0.3;
        p.p_f = 0.4;
        p.validate().unwrap();
        p.power_rule = PowerRule::Unit;
        assert!(p.validate().is_err());
    }

    #[test]
    fn moving_ue1_updates_relay_link() {
        let mut p = SystemParams::default();
        p.set_distance_s1(0.2);
        p.validate().unwrap();
        assert_eq!(p.link_12.distance, 0.8);
        assert_eq!(p.oam1.distance, 0.2);

        p.link_12.distance = 0.5;
        assert!(p.validate().is_err());

        p.collinear = false;
        p.validate().unwrap();
    }

    #[test]
    fn range_checks() {
        for bad in [
            SystemParams {
                delta: 1.5,
                ..Default::default()
            },
            SystemParams {
                eta: -0.1,
                ..Default::default()
            },
            SystemParams {
                alpha_ts: 1.0,
                ..Default::default()
            },
            SystemParams {
                rho: 0.0,
                ..Default::default()
            },
            SystemParams {
                noise_power: f64::NAN,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }
}
