//! Flat `key = value` configuration files.
//!
//! One entry per line; blank lines and lines starting with `#` are ignored.
//! Every key is optional and falls back to the reference setting. Unknown
//! keys and repeated keys are errors.
//!
//! | key | value |
//! |-----|-------|
//! | `rho_db` / `rho` | transmit SNR in dB / linear (at most one of the two) |
//! | `p_n`, `p_f` | NOMA power coefficients |
//! | `delta` | power-splitting factor |
//! | `eta` | harvesting efficiency |
//! | `alpha_ts` | harvesting time fraction of the time-switching benchmark |
//! | `noise_power` | σ² |
//! | `power_rule` | `unit` (p_n + p_f = 1) or `one-minus-delta` |
//! | `collinear` | `true`/`false`; when true `d_12` is derived as `1 - d_s1` |
//! | `pathloss_exponent` | ε, shared by every link and OAM path |
//! | `k_s1`, `omega_s1`, `d_s1` | BS→UE1 link (`k_*` accepts `inf`) |
//! | `k_s2`, `omega_s2`, `d_s2` | BS→UE2 link |
//! | `k_12`, `omega_12`, `d_12` | UE1→UE2 relay link |
//! | `oam1_mode`, `oam2_mode` | OAM mode numbers (≥ 1) |
//! | `oam1_model`, `oam2_model` | `los-scaled` or `fixed` |
//! | `oam1_value`, `oam2_value` | fixed μ, or the base gain of `los-scaled`; when omitted for `los-scaled` the base gain is the link's LOS power `K/(K+1)·Ω` |
//! | `axis` | `rho_db`, `d_s1` or `delta` |
//! | `axis_values` | comma-separated, strictly increasing; defaults to the axis' standard grid |
//! | `schemes` | comma-separated subset of `cnoma-ps-oam,cnoma-ps,cnoma-ts,oma-ps-oam` |
//! | `metrics` | comma-separated subset of `c_ue1,c_ue2,c_sum,ee` |
//! | `n_trials`, `seed` | Monte Carlo trials per point and master seed |
//! | `output` | CSV destination; empty or `-` for standard output |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::channel::{OamChannel, OamModel, RicianLink, DEFAULT_PATHLOSS_EXPONENT};
use crate::error::{Error, Result};
use crate::experiments::{Axis, SweepSpec, DEFAULT_SEED, DEFAULT_TRIALS};
use crate::montecarlo::Metric;
use crate::params::{db_to_linear, PowerRule, SystemParams};
use crate::schemes::Scheme;

pub const KEYS: &[&str] = &[
    "rho_db",
    "rho",
    "p_n",
    "p_f",
    "delta",
    "eta",
    "alpha_ts",
    "noise_power",
    "power_rule",
    "collinear",
    "pathloss_exponent",
    "k_s1",
    "omega_s1",
    "d_s1",
    "k_s2",
    "omega_s2",
    "d_s2",
    "k_12",
    "omega_12",
    "d_12",
    "oam1_mode",
    "oam1_model",
    "oam1_value",
    "oam2_mode",
    "oam2_model",
    "oam2_value",
    "axis",
    "axis_values",
    "schemes",
    "metrics",
    "n_trials",
    "seed",
    "output",
];

/// Keys that set the same quantity; setting one clears the others.
const ALIASES: &[&[&str]] = &[&["rho", "rho_db"]];

/// A parsed value together with the line it came from (0 for overrides).
#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    value: String,
    line: usize,
}

/// Layered key-value settings. Later layers replace earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigMap {
    entries: BTreeMap<String, Entry>,
}

fn check_key(key: &str, line: usize) -> Result<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else if line > 0 {
        Err(Error::Config {
            line,
            message: format!("unknown key `{key}`"),
        })
    } else {
        Err(Error::UnknownKey(key.to_string()))
    }
}

fn split_entry(text: &str, line: usize) -> Result<(String, String)> {
    let (k, v) = text.split_once('=').ok_or_else(|| Error::Config {
        line,
        message: format!("expected `key=value`, got `{text}`"),
    })?;
    let key = k.trim();
    if key.is_empty() {
        return Err(Error::Config {
            line,
            message: "empty key".into(),
        });
    }
    check_key(key, line)?;
    Ok((key.to_string(), v.trim().to_string()))
}

/// Parses a `key=value` command-line override.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    split_entry(s, 0)
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = ConfigMap::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (key, value) = split_entry(t, line)?;
            if map.entries.contains_key(&key) || map.alias_present(&key) {
                return Err(Error::Config {
                    line,
                    message: format!("key `{key}` given more than once"),
                });
            }
            map.entries.insert(key, Entry { value, line });
        }
        Ok(map)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    fn alias_present(&self, key: &str) -> bool {
        ALIASES
            .iter()
            .filter(|group| group.contains(&key))
            .flat_map(|group| group.iter())
            .any(|k| *k != key && self.entries.contains_key(*k))
    }

    /// Sets `key`, replacing any previous value or alias.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        check_key(key, 0)?;
        for group in ALIASES.iter().filter(|g| g.contains(&key)) {
            for k in group.iter() {
                self.entries.remove(*k);
            }
        }
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line: 0,
            },
        );
        Ok(())
    }

    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let (k, v) = parse_override(o.as_ref())?;
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries
            .iter()
            .map(|(k, e)| (k.as_str(), e.value.as_str()))
    }

    fn value<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        let Some(entry) = self.entries.get(key) else {
            return Ok(None);
        };
        entry
            .value
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::Config {
                line: entry.line,
                message: format!("cannot parse `{}` for key `{key}`", entry.value),
            })
    }

    fn list<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Option<Vec<T>>> {
        let Some(entry) = self.entries.get(key) else {
            return Ok(None);
        };
        entry
            .value
            .split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                parse(s).map_err(|e| Error::Config {
                    line: entry.line,
                    message: format!("key `{key}`: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn number(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.value::<f64>(key)?.unwrap_or(default))
    }

    fn oam(
        &self,
        prefix: &str,
        default_mode: u32,
        link: &RicianLink,
        eps: f64,
    ) -> Result<OamChannel> {
        let mode = self
            .value::<u32>(&format!("{prefix}_mode"))?
            .unwrap_or(default_mode);
        let model = self
            .get(&format!("{prefix}_model"))
            .unwrap_or("los-scaled")
            .to_string();
        let value = self.value::<f64>(&format!("{prefix}_value"))?;
        let ch = match (model.as_str(), value) {
            ("fixed", Some(v)) => OamChannel::fixed(mode, link.distance, v),
            ("fixed", None) => {
                return Err(Error::param(
                    "oam_value",
                    format!("`{prefix}_model = fixed` needs `{prefix}_value`"),
                ))
            }
            ("los-scaled", Some(g)) => OamChannel::los_scaled(mode, link.distance, g, eps),
            ("los-scaled", None) => OamChannel::for_link(mode, link),
            (other, _) => {
                return Err(Error::param(
                    "oam_model",
                    format!("unknown OAM model `{other}` (fixed, los-scaled)"),
                ))
            }
        };
        Ok(ch)
    }

    /// System parameters described by this map, validated.
    pub fn to_params(&self) -> Result<SystemParams> {
        let d = SystemParams::default();
        let eps = self.number("pathloss_exponent", DEFAULT_PATHLOSS_EXPONENT)?;
        let link = |k: &str, o: &str, dist: f64, def: &RicianLink| -> Result<RicianLink> {
            Ok(RicianLink {
                k_factor: self.number(k, def.k_factor)?,
                mean_power: self.number(o, def.mean_power)?,
                distance: dist,
                pathloss_exponent: eps,
            })
        };
        let collinear = self.value::<bool>("collinear")?.unwrap_or(d.collinear);
        let d_s1 = self.number("d_s1", d.link_s1.distance)?;
        let d_s2 = self.number("d_s2", d.link_s2.distance)?;
        let d_12 = match (collinear, self.value::<f64>("d_12")?) {
            (true, Some(v)) if v != 1.0 - d_s1 => {
                return Err(Error::param(
                    "d_12",
                    format!(
                        "collinear placement derives d_12 = 1 - d_s1 = {}, got {v}",
                        1.0 - d_s1
                    ),
                ))
            }
            (true, _) => 1.0 - d_s1,
            (false, v) => v.unwrap_or(d.link_12.distance),
        };
        let link_s1 = link("k_s1", "omega_s1", d_s1, &d.link_s1)?;
        let link_s2 = link("k_s2", "omega_s2", d_s2, &d.link_s2)?;
        let link_12 = link("k_12", "omega_12", d_12, &d.link_12)?;

        let rho = match (self.value::<f64>("rho")?, self.value::<f64>("rho_db")?) {
            (Some(r), _) => r,
            (None, Some(db)) => db_to_linear(db),
            (None, None) => d.rho,
        };
        let power_rule = match self.get("power_rule") {
            None => d.power_rule,
            Some(s) => PowerRule::parse(s).ok_or_else(|| {
                Error::param(
                    "power_rule",
                    format!("unknown rule `{s}` (unit, one-minus-delta)"),
                )
            })?,
        };

        let params = SystemParams {
            rho,
            p_n: self.number("p_n", d.p_n)?,
            p_f: self.number("p_f", d.p_f)?,
            delta: self.number("delta", d.delta)?,
            eta: self.number("eta", d.eta)?,
            alpha_ts: self.number("alpha_ts", d.alpha_ts)?,
            oam1: self.oam("oam1", d.oam1.mode, &link_s1, eps)?,
            oam2: self.oam("oam2", d.oam2.mode, &link_s2, eps)?,
            link_s1,
            link_s2,
            link_12,
            noise_power: self.number("noise_power", d.noise_power)?,
            power_rule,
            collinear,
        };
        params.validate()?;
        Ok(params)
    }

    /// Sweep described by this map, validated.
    pub fn to_spec(&self) -> Result<SweepSpec> {
        let base_params = self.to_params()?;
        let axis = match self.get("axis") {
            Some(s) => s.parse::<Axis>()?,
            None => Axis::RhoDb,
        };
        let axis_values = self
            .list("axis_values", |s| {
                s.parse::<f64>()
                    .map_err(|_| Error::param("axis_values", format!("not a number: `{s}`")))
            })?
            .unwrap_or_else(|| axis.default_grid());
        let schemes = self
            .list("schemes", Scheme::from_str)?
            .unwrap_or_else(|| Scheme::ALL.to_vec());
        let metrics = self
            .list("metrics", Metric::from_str)?
            .unwrap_or_else(|| vec![Metric::CSum]);
        let output_path = self
            .get("output")
            .filter(|s| !s.is_empty() && *s != "-")
            .map(str::to_string);
        let spec = SweepSpec {
            axis,
            axis_values,
            base_params,
            schemes,
            metrics,
            n_trials: self.value::<u64>("n_trials")?.unwrap_or(DEFAULT_TRIALS),
            seed: self.value::<u64>("seed")?.unwrap_or(DEFAULT_SEED),
            output_path,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Canonical map for a spec. Values that the loader would derive
    /// (`d_12` under collinear placement, default OAM base gains) are
    /// omitted so that overrides of their inputs still propagate.
    pub fn from_spec(spec: &SweepSpec) -> Self {
        let mut m = ConfigMap::default();
        for (k, v) in canonical_entries(spec) {
            m.entries.insert(k.to_string(), Entry { value: v, line: 0 });
        }
        m
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn canonical_entries(spec: &SweepSpec) -> Vec<(&'static str, String)> {
    let p = &spec.base_params;
    let mut out = vec![
        ("rho", num(p.rho)),
        ("p_n", num(p.p_n)),
        ("p_f", num(p.p_f)),
        ("delta", num(p.delta)),
        ("eta", num(p.eta)),
        ("alpha_ts", num(p.alpha_ts)),
        ("noise_power", num(p.noise_power)),
        ("power_rule", p.power_rule.as_str().to_string()),
        ("collinear", p.collinear.to_string()),
        ("pathloss_exponent", num(p.link_s1.pathloss_exponent)),
        ("k_s1", num(p.link_s1.k_factor)),
        ("omega_s1", num(p.link_s1.mean_power)),
        ("d_s1", num(p.link_s1.distance)),
        ("k_s2", num(p.link_s2.k_factor)),
        ("omega_s2", num(p.link_s2.mean_power)),
        ("d_s2", num(p.link_s2.distance)),
        ("k_12", num(p.link_12.k_factor)),
        ("omega_12", num(p.link_12.mean_power)),
    ];
    if !p.collinear {
        out.push(("d_12", num(p.link_12.distance)));
    }
    for (prefix, ch, link) in [("oam1", &p.oam1, &p.link_s1), ("oam2", &p.oam2, &p.link_s2)] {
        let (mode_key, model_key, value_key) = match prefix {
            "oam1" => ("oam1_mode", "oam1_model", "oam1_value"),
            _ => ("oam2_mode", "oam2_model", "oam2_value"),
        };
        out.push((mode_key, ch.mode.to_string()));
        match ch.model {
            OamModel::Fixed { value } => {
                out.push((model_key, "fixed".into()));
                out.push((value_key, num(value)));
            }
            OamModel::LosScaled { base_gain, .. } => {
                out.push((model_key, "los-scaled".into()));
                if *ch != OamChannel::for_link(ch.mode, link) {
                    out.push((value_key, num(base_gain)));
                }
            }
        }
    }
    out.extend([
        ("axis", spec.axis.to_string()),
        (
            "axis_values",
            spec.axis_values
                .iter()
                .map(|&v| num(v))
                .collect::<Vec<_>>()
                .join(","),
        ),
        ("schemes", join(&spec.schemes)),
        ("metrics", join(&spec.metrics)),
        ("n_trials", spec.n_trials.to_string()),
        ("seed", spec.seed.to_string()),
    ]);
    if let Some(path) = &spec.output_path {
        out.push(("output", path.clone()));
    }
    out
}

/// Serializes a spec in the config format, in canonical key order.
pub fn to_config_string(spec: &SweepSpec) -> String {
    let mut s = String::new();
    for (k, v) in canonical_entries(spec) {
        writeln!(s, "{k} = {v}").expect("writing to a String cannot fail");
    }
    s
}

pub fn parse_spec(text: &str) -> Result<SweepSpec> {
    ConfigMap::parse(text)?.to_spec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{figure_preset, Figure};

    #[test]
    fn empty_config_is_reference_setting() {
        let spec = parse_spec("# nothing\n\n").unwrap();
        assert_eq!(spec, SweepSpec::default());
    }

    #[test]
    fn presets_round_trip() {
        for fig in Figure::ALL {
            let spec = figure_preset(fig);
            let text = to_config_string(&spec);
            assert_eq!(parse_spec(&text).unwrap(), spec, "{fig}\n{text}");
        }
    }

    #[test]
    fn unknown_and_duplicate_keys() {
        match ConfigMap::parse("p_n = 0.4\nbogus = 1\n") {
            Err(Error::Config { line: 2, message }) => assert!(message.contains("bogus")),
            other => panic!("{other:?}"),
        }
        assert!(ConfigMap::parse("p_n=0.4\np_n=0.3").is_err());
        assert!(ConfigMap::parse("rho=3\nrho_db=4").is_err());
        assert!(ConfigMap::parse("just words").is_err());
        assert!(matches!(
            parse_override("nope=1"),
            Err(Error::UnknownKey(_))
        ));
        assert!(parse_override("rho_db").is_err());
    }

    #[test]
    fn swapped_coefficients_are_rejected() {
        let err = parse_spec("p_n = 0.6\np_f = 0.4\n").unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("p_N < p_F"), "{err}");
    }

    #[test]
    fn bad_values_report_line() {
        match parse_spec("eta = 0.7\ndelta = lots\n") {
            Err(Error::Config { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_spec("schemes = cnoma-ps,nope").is_err());
        assert!(parse_spec("axis = rho").is_err());
        assert!(parse_spec("oam1_model = fixed").is_err());
    }

    #[test]
    fn overrides_replace_aliases_and_rederive() {
        let mut m = ConfigMap::from_spec(&figure_preset(Figure::Fig5));
        m.apply_overrides(&["rho_db=20", "d_s1=0.25", "k_s1=inf"])
            .unwrap();
        let p = m.to_params().unwrap();
        assert!((p.rho - 100.0).abs() < 1e-9);
        assert_eq!(p.link_12.distance, 0.75);
        assert_eq!(p.oam1.distance, 0.25);
        // Base gain follows the new K: full LOS power 36 at d = 0.25.
        assert_eq!(
            crate::channel::oam_singular_value(&p.oam1).unwrap(),
            36.0 / 0.0625
        );
    }

    #[test]
    fn collinear_d12_must_agree() {
        assert!(parse_spec("d_s1 = 0.3\nd_12 = 0.5").is_err());
        let p = ConfigMap::parse("d_s1 = 0.3\nd_12 = 0.5\ncollinear = false")
            .unwrap()
            .to_params()
            .unwrap();
        assert_eq!(p.link_12.distance, 0.5);
    }

    #[test]
    fn fixed_oam_and_output() {
        let spec = parse_spec(
            "oam1_model = fixed\noam1_value = 1.5\noam2_model=los-scaled\noam2_value=2\naxis=delta\noutput=out/x.csv\nmetrics=ee,c_sum\n",
        )
        .unwrap();
        assert_eq!(spec.base_params.oam1.model, OamModel::Fixed { value: 1.5 });
        assert_eq!(spec.axis_values.len(), 19);
        assert_eq!(spec.output_path.as_deref(), Some("out/x.csv"));
        assert_eq!(parse_spec(&to_config_string(&spec)).unwrap(), spec);
    }
}
