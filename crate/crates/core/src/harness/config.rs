//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # rate-memory sweep
//! n = 10
//! m = 100
//! kappa = 2
//! delta = 0.2
//! file_units = 200
//! packets = 200
//! sweep = 0:2:100
//! schemes = comp-cacm,rap-cm,lc-u,lc-nm
//! bounds = lower,upper
//! trials = 500
//! seed = 1
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::delivery::ColoringPolicy;
use crate::error::{Error, Result};
use crate::library::GroupedLibrary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    CompCacm,
    RapCm,
    LcU,
    LcNm,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::CompCacm, Scheme::RapCm, Scheme::LcU, Scheme::LcNm];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::CompCacm => "comp-cacm",
            Scheme::RapCm => "rap-cm",
            Scheme::LcU => "lc-u",
            Scheme::LcNm => "lc-nm",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("schemes: unknown scheme `{s}`")))
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DemandModel {
    #[default]
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColoringMode {
    #[default]
    Grouped,
    LargestDegreeFirst,
    /// Shuffled order, seeded per trial.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: usize,
    pub kappa: usize,
    pub delta: f64,
    pub file_units: u64,
    /// Packets per I-file.
    pub packets: u64,
    pub sweep: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub lower_bound: bool,
    pub upper_bound: bool,
    pub trials: usize,
    pub seed: u64,
    pub q_mode: DemandModel,
    pub coloring: ColoringMode,
    /// Decode every Comp-CACM delivery and compare with the source.
    pub verify_decoding: bool,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 10,
            m: 100,
            kappa: 2,
            delta: 0.2,
            file_units: 200,
            packets: 200,
            sweep: Sweep { start: 0.0, step: 2.0, stop: 100.0 }.values(),
            schemes: Scheme::ALL.to_vec(),
            lower_bound: true,
            upper_bound: true,
            trials: 500,
            seed: 1,
            q_mode: DemandModel::Uniform,
            coloring: ColoringMode::Grouped,
            verify_decoding: true,
            csv: None,
            svg: None,
        }
    }
}

/// `start:step:stop`, inclusive of `stop` when it falls on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub step: f64,
    pub stop: f64,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|k| {
                let x = self.start + self.step * k as f64;
                // snap accumulated error so printed values stay clean
                (x * 1e9).round() / 1e9
            })
            .collect()
    }
}

impl FromStr for Sweep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || Error::Config(format!("sweep: expected start:step:stop, got `{s}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let nums: Vec<f64> = parts.iter().map(|p| p.parse().map_err(|_| bad())).collect::<Result<_>>()?;
        let sweep = Sweep { start: nums[0], step: nums[1], stop: nums[2] };
        if sweep.step.is_nan() || sweep.step <= 0.0 || sweep.stop < sweep.start {
            return Err(Error::Config(format!("sweep: `{s}` needs step > 0 and stop >= start")));
        }
        Ok(sweep)
    }
}

fn parse_field<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("{key}: cannot parse `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true/false, got `{value}`"))),
    }
}

fn parse_sweep(value: &str) -> Result<Vec<f64>> {
    if value.contains(':') {
        Ok(value.parse::<Sweep>()?.values())
    } else {
        value.split(',').map(|v| parse_field::<f64>("sweep", v.trim())).collect()
    }
}

impl ExperimentConfig {
    /// Parses `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = parse_field(key, value)?,
            "m" => self.m = parse_field(key, value)?,
            "kappa" => self.kappa = parse_field(key, value)?,
            "delta" => self.delta = parse_field(key, value)?,
            "file_units" => self.file_units = parse_field(key, value)?,
            "packets" => self.packets = parse_field(key, value)?,
            "sweep" => self.sweep = parse_sweep(value)?,
            "schemes" => {
                self.schemes =
                    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect::<Result<_>>()?
            }
            "bounds" => {
                self.lower_bound = false;
                self.upper_bound = false;
                for b in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    match b {
                        "lower" => self.lower_bound = true,
                        "upper" => self.upper_bound = true,
                        "none" => {}
                        _ => return Err(Error::Config(format!("bounds: unknown bound `{b}`"))),
                    }
                }
            }
            "trials" => self.trials = parse_field(key, value)?,
            "seed" => self.seed = parse_field(key, value)?,
            "q_mode" => {
                self.q_mode = match value {
                    "uniform" => DemandModel::Uniform,
                    _ => return Err(Error::Config(format!("q_mode: unsupported `{value}`"))),
                }
            }
            "coloring" => {
                self.coloring = match value {
                    "grouped" => ColoringMode::Grouped,
                    "ldf" | "largest-degree-first" => ColoringMode::LargestDegreeFirst,
                    "random" => ColoringMode::Random,
                    _ => return Err(Error::Config(format!("coloring: unknown policy `{value}`"))),
                }
            }
            "verify_decoding" => self.verify_decoding = parse_bool(key, value)?,
            "csv" => self.csv = Some(PathBuf::from(value)),
            "svg" => self.svg = Some(PathBuf::from(value)),
            _ => return Err(Error::Config(format!("{key}: unknown key"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n == 0 || self.n > 128 {
            return fail(format!("n: must lie in 1..=128, got {}", self.n));
        }
        if self.trials == 0 {
            return fail("trials: must be at least 1".into());
        }
        if self.sweep.is_empty() {
            return fail("sweep: no memory values".into());
        }
        if let Some(mem) = self.sweep.iter().find(|&&x| !(0.0..=self.m as f64).contains(&x)) {
            return fail(format!("sweep: M={mem} outside [0, {}]", self.m));
        }
        if self.packets == 0 || !self.file_units.is_multiple_of(self.packets) {
            return fail(format!("packets: {} must divide file_units {}", self.packets, self.file_units));
        }
        let lib = self.library()?;
        let b = self.b_units();
        if lib.private_units() % b != 0 {
            return fail(format!("packets: packet length {b} must divide delta*file_units = {}", lib.private_units()));
        }
        if self.schemes.is_empty() && !self.lower_bound && !self.upper_bound {
            return fail("schemes: nothing to compute".into());
        }
        Ok(())
    }

    pub fn library(&self) -> Result<GroupedLibrary> {
        GroupedLibrary::uniform(self.m, self.kappa, self.delta, self.file_units)
            .map_err(|e| Error::Config(format!("library: {e}")))
    }

    pub fn b_units(&self) -> u64 {
        self.file_units / self.packets
    }

    pub fn coloring_policy(&self, trial_seed: u64) -> ColoringPolicy {
        match self.coloring {
            ColoringMode::Grouped => ColoringPolicy::Grouped,
            ColoringMode::LargestDegreeFirst => ColoringPolicy::LargestDegreeFirst,
            ColoringMode::Random => ColoringPolicy::Random(trial_seed),
        }
    }

    /// Canonical `key = value` text; parses back to an equal config.
    pub fn to_text(&self) -> String {
        let sweep: Vec<String> = self.sweep.iter().map(|x| format!("{x}")).collect();
        let schemes: Vec<&str> = self.schemes.iter().map(|s| s.name()).collect();
        let mut bounds = Vec::new();
        if self.lower_bound {
            bounds.push("lower");
        }
        if self.upper_bound {
            bounds.push("upper");
        }
        if bounds.is_empty() {
            bounds.push("none");
        }
        let mut out = format!(
            "n = {}\nm = {}\nkappa = {}\ndelta = {}\nfile_units = {}\npackets = {}\n\
             sweep = {}\nschemes = {}\nbounds = {}\ntrials = {}\nseed = {}\nq_mode = uniform\n\
             coloring = {}\nverify_decoding = {}\n",
            self.n,
            self.m,
            self.kappa,
            self.delta,
            self.file_units,
            self.packets,
            sweep.join(","),
            schemes.join(","),
            bounds.join(","),
            self.trials,
            self.seed,
            match self.coloring {
                ColoringMode::Grouped => "grouped",
                ColoringMode::LargestDegreeFirst => "ldf",
                ColoringMode::Random => "random",
            },
            self.verify_decoding,
        );
        if let Some(p) = &self.csv {
            out.push_str(&format!("csv = {}\n", p.display()));
        }
        if let Some(p) = &self.svg {
            out.push_str(&format!("svg = {}\n", p.display()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_config() {
        let cfg = ExperimentConfig::parse("").unwrap();
        assert_eq!((cfg.n, cfg.m, cfg.kappa), (10, 100, 2));
        assert_eq!(cfg.sweep.len(), 51);
        assert_eq!(cfg.b_units(), 1);
    }

    #[test]
    fn parse_overrides_and_comments() {
        let cfg = ExperimentConfig::parse(
            "n = 2 # receivers\nm=4\ndelta = 0.25\nfile_units = 8\npackets = 4\nsweep = 0:0.5:2\nschemes = comp-cacm, lc-u\nbounds = lower\n",
        )
        .unwrap();
        assert_eq!(cfg.sweep, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(cfg.schemes, vec![Scheme::CompCacm, Scheme::LcU]);
        assert!(cfg.lower_bound && !cfg.upper_bound);
        assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn field_level_diagnostics() {
        let err = |t: &str| ExperimentConfig::parse(t).unwrap_err().to_string();
        assert!(err("trials = 0").contains("trials"));
        assert!(err("sweep = 0:10:200").contains("sweep"));
        assert!(err("colour = red").contains("colour: unknown key"));
        assert!(err("packets = 3").contains("packets"));
        assert!(err("file_units = 10\npackets = 10\ndelta = 0.25").contains("library"));
        assert!(err("schemes = cacm").contains("unknown scheme"));
        assert!(err("n").contains("line 1"));
    }

    #[test]
    fn sweep_lists() {
        assert_eq!(parse_sweep("0, 20,60").unwrap(), vec![0.0, 20.0, 60.0]);
        assert_eq!("0:10:100".parse::<Sweep>().unwrap().values().len(), 11);
        assert!("0:0:1".parse::<Sweep>().is_err());
    }
}
