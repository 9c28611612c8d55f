use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer};

use crate::allocation::{Problem, DEFAULT_RESOLUTION};
use crate::error::{Error, Result};

/// Schemes the sweep can evaluate on each draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    FsSa,
    FsSpa,
    Ts,
    Ps,
    CUp,
    QUp,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [Scheme::FsSa, Scheme::FsSpa, Scheme::Ts, Scheme::Ps, Scheme::CUp, Scheme::QUp];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::FsSa => "FS-SA",
            Scheme::FsSpa => "FS-SPA",
            Scheme::Ts => "TS",
            Scheme::Ps => "PS",
            Scheme::CUp => "C_up",
            Scheme::QUp => "Q_up",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sch| sch.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

impl<'de> Deserialize<'de> for Scheme {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn parse_problem(s: &str) -> Result<Problem> {
    match s.to_ascii_uppercase().as_str() {
        "P1" => Ok(Problem::P1),
        "P2" => Ok(Problem::P2),
        _ => Err(Error::Config(format!("unknown problem `{s}`, expected P1 or P2"))),
    }
}

fn de_problem<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Problem, D::Error> {
    let s = String::deserialize(d)?;
    parse_problem(&s).map_err(serde::de::Error::custom)
}

/// Monte Carlo sweep parameters, in the units used on the command line
/// (kHz, mW, kb/s, dB). [`SimConfig::validate`] checks them and the
/// `*_si` accessors convert at the boundary.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub num_subcarriers: usize,
    #[serde(default = "defaults::bandwidth_khz")]
    pub bandwidth_khz: f64,
    #[serde(default = "defaults::eta")]
    pub eta: f64,
    /// `P_T`, split equally as `P_t,e = P_T / K`.
    pub total_power_mw: f64,
    #[serde(default = "defaults::q_min_mw")]
    pub q_min_mw: f64,
    #[serde(default = "defaults::c_min_kbps")]
    pub c_min_kbps: f64,
    /// `P_t,max` for the capped harvest reallocation; absent = uncapped.
    #[serde(default)]
    pub p_t_max_mw: Option<f64>,
    /// `1 / sigma_z^2` grid, in dB.
    pub noise_grid_db: Vec<f64>,
    #[serde(default = "defaults::trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::resolution")]
    pub resolution: u64,
    pub schemes: Vec<Scheme>,
    #[serde(deserialize_with = "de_problem")]
    pub problem: Problem,
    /// `E[|H_k|^2]` of the Rayleigh draws.
    #[serde(default = "defaults::mean_power")]
    pub mean_power: f64,
    #[serde(default = "defaults::spa_iterations")]
    pub spa_iterations: usize,
}

mod defaults {
    pub fn bandwidth_khz() -> f64 {
        15.0
    }
    pub fn eta() -> f64 {
        0.5
    }
    pub fn q_min_mw() -> f64 {
        12.0
    }
    pub fn c_min_kbps() -> f64 {
        400.0
    }
    pub fn trials() -> usize {
        10_000
    }
    pub fn resolution() -> u64 {
        crate::allocation::DEFAULT_RESOLUTION
    }
    pub fn mean_power() -> f64 {
        1.0
    }
    pub fn spa_iterations() -> usize {
        1
    }
}

impl SimConfig {
    /// Settings of the reference experiment for a given problem, at
    /// `P_T = total_power_mw` (64 or 128 mW there).
    pub fn reference(problem: Problem, total_power_mw: f64) -> Self {
        let schemes = match problem {
            Problem::P1 => vec![Scheme::FsSa, Scheme::FsSpa, Scheme::Ts, Scheme::Ps, Scheme::CUp],
            Problem::P2 => vec![Scheme::FsSa, Scheme::FsSpa, Scheme::Ts, Scheme::Ps, Scheme::QUp],
        };
        let k = 32;
        Self {
            num_subcarriers: k,
            bandwidth_khz: 15.0,
            eta: 0.5,
            total_power_mw,
            q_min_mw: 12.0,
            c_min_kbps: 400.0,
            // 1.2 x P_t,e: 2.4 mW at 64 mW, 4.8 mW at 128 mW.
            p_t_max_mw: Some(1.2 * total_power_mw / k as f64),
            noise_grid_db: (0..=8).map(|i| 30.0 + 5.0 * i as f64).collect(),
            trials: 10_000,
            seed: 1,
            resolution: DEFAULT_RESOLUTION,
            schemes,
            problem,
            mean_power: 1.0,
            spa_iterations: 1,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.num_subcarriers == 0 {
            return bad("num_subcarriers must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.noise_grid_db.is_empty() {
            return bad("noise_grid_db must not be empty".into());
        }
        if let Some(x) = self.noise_grid_db.iter().find(|x| !x.is_finite()) {
            return bad(format!("noise grid point {x} is not finite"));
        }
        if !(self.bandwidth_khz > 0.0 && self.bandwidth_khz.is_finite()) {
            return bad(format!("bandwidth_khz must be positive, got {}", self.bandwidth_khz));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad(format!("eta must lie in (0, 1], got {}", self.eta));
        }
        if !(self.total_power_mw > 0.0 && self.total_power_mw.is_finite()) {
            return bad(format!("total_power_mw must be positive, got {}", self.total_power_mw));
        }
        if !(self.q_min_mw >= 0.0 && self.q_min_mw.is_finite()) {
            return bad(format!("q_min_mw must be non-negative, got {}", self.q_min_mw));
        }
        if !(self.c_min_kbps >= 0.0 && self.c_min_kbps.is_finite()) {
            return bad(format!("c_min_kbps must be non-negative, got {}", self.c_min_kbps));
        }
        if !(self.mean_power > 0.0 && self.mean_power.is_finite()) {
            return bad(format!("mean_power must be positive, got {}", self.mean_power));
        }
        if self.resolution == 0 {
            return bad("resolution must be at least 1".into());
        }
        if self.spa_iterations == 0 {
            return bad("spa_iterations must be at least 1".into());
        }
        if self.schemes.is_empty() {
            return bad("schemes must not be empty".into());
        }
        for s in &self.schemes {
            match (s, self.problem) {
                (Scheme::CUp, Problem::P2) => return bad("C_up only applies to problem P1".into()),
                (Scheme::QUp, Problem::P1) => return bad("Q_up only applies to problem P2".into()),
                _ => {}
            }
        }
        if let Some(cap) = self.p_t_max_mw {
            if cap.is_nan() || cap <= 0.0 {
                return bad(format!("p_t_max_mw must be positive, got {cap}"));
            }
            // Every harvest subcarrier starts at P_t,e, so the cap must admit it.
            if self.problem == Problem::P2 && cap < self.equal_power_mw() {
                return bad(format!(
                    "p_t_max_mw {cap} is below the per-subcarrier power {} mW",
                    self.equal_power_mw()
                ));
            }
        }
        Ok(())
    }

    pub fn equal_power_mw(&self) -> f64 {
        self.total_power_mw / self.num_subcarriers as f64
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_khz * 1e3
    }

    /// `P_t,e` in watts.
    pub fn equal_power_w(&self) -> f64 {
        self.equal_power_mw() * 1e-3
    }

    pub fn q_min_w(&self) -> f64 {
        self.q_min_mw * 1e-3
    }

    pub fn c_min_bps(&self) -> f64 {
        self.c_min_kbps * 1e3
    }

    pub fn cap_w(&self) -> Option<f64> {
        self.p_t_max_mw.map(|p| p * 1e-3)
    }

    /// The active problem's floor in SI units.
    pub fn threshold_si(&self) -> f64 {
        match self.problem {
            Problem::P1 => self.q_min_w(),
            Problem::P2 => self.c_min_bps(),
        }
    }
}

/// `sigma_z^2` in watts for a grid point `1 / sigma_z^2` in dB.
pub fn noise_variance_from_db(inverse_noise_db: f64) -> f64 {
    10f64.powf(-inverse_noise_db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        num_subcarriers = 8
        total_power_mw = 64
        noise_grid_db = [30, 40]
        schemes = ["FS-SA", "TS"]
        problem = "P1"
    "#;

    #[test]
    fn parses_with_defaults() {
        let cfg = SimConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(cfg.num_subcarriers, 8);
        assert_eq!(cfg.bandwidth_hz(), 15_000.0);
        assert_eq!(cfg.eta, 0.5);
        assert_eq!(cfg.trials, 10_000);
        assert_eq!(cfg.resolution, DEFAULT_RESOLUTION);
        assert_eq!(cfg.schemes, vec![Scheme::FsSa, Scheme::Ts]);
        assert!((cfg.equal_power_w() - 0.008).abs() < 1e-15);
        assert!((cfg.q_min_w() - 0.012).abs() < 1e-15);
        assert_eq!(cfg.c_min_bps(), 400_000.0);
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = SimConfig::from_toml_str(&format!("{MINIMAL}\ncolour = 3\n")).unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("colour")), "{err}");
    }

    #[test]
    fn rejects_bad_values() {
        for (key, value) in [
            ("trials", "0"),
            ("eta", "1.5"),
            ("resolution", "0"),
            ("bandwidth_khz", "-1"),
            ("p_t_max_mw", "0"),
        ] {
            let text = format!("{MINIMAL}\n{key} = {value}\n");
            assert!(SimConfig::from_toml_str(&text).is_err(), "{key} = {value} accepted");
        }
        let text = MINIMAL.replace("[30, 40]", "[]");
        assert!(SimConfig::from_toml_str(&text).is_err());
        let text = MINIMAL.replace("\"TS\"", "\"Q_up\"");
        assert!(SimConfig::from_toml_str(&text).is_err());
        let text = MINIMAL.replace("\"TS\"", "\"XX\"");
        assert!(SimConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn cap_must_cover_equal_power_for_p2() {
        let text = MINIMAL.replace("\"P1\"", "\"P2\"") + "\np_t_max_mw = 4.0\n";
        assert!(SimConfig::from_toml_str(&text).is_err());
        let text = MINIMAL.replace("\"P1\"", "\"P2\"") + "\np_t_max_mw = 9.6\n";
        assert!(SimConfig::from_toml_str(&text).is_ok());
    }

    #[test]
    fn reference_config_is_valid() {
        for p in [Problem::P1, Problem::P2] {
            for pt in [64.0, 128.0] {
                let cfg = SimConfig::reference(p, pt);
                cfg.validate().unwrap();
            }
        }
        let cfg = SimConfig::reference(Problem::P2, 64.0);
        assert!((cfg.p_t_max_mw.unwrap() - 2.4).abs() < 1e-12);
        assert!((SimConfig::reference(Problem::P2, 128.0).p_t_max_mw.unwrap() - 4.8).abs() < 1e-12);
    }

    #[test]
    fn noise_conversion() {
        assert!((noise_variance_from_db(30.0) - 1e-3).abs() < 1e-18);
        assert_eq!(noise_variance_from_db(0.0), 1.0);
    }
}
