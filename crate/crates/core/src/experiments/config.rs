//! Experiment configuration and its line-oriented `key=value` file format.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::experiments::noise::NoiseModel;
use crate::io::parse_kv;
use crate::solver::{RateKind, DEFAULT_MAX_SWEEPS, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Coordinate dictionary on `[−1, 1]^M` with a `k`-sparse linear truth.
    Linear,
    /// Fourier dictionary with a truth of exactly `k` nonzero coefficients.
    FourierL0k,
    /// Fourier dictionary with polynomially decaying coefficients of smoothness `β`.
    FourierSobolev,
}

impl Preset {
    /// Presets whose purpose is a rate estimate.
    pub fn is_rate_preset(self) -> bool {
        matches!(self, Self::FourierL0k | Self::FourierSobolev)
    }

    pub fn default_rate(self) -> RateKind {
        match self {
            Self::Linear => RateKind::LogM,
            _ => RateKind::LogN,
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(Self::Linear),
            "fourier-l0k" => Ok(Self::FourierL0k),
            "fourier-sobolev" => Ok(Self::FourierSobolev),
            other => Err(Error::Config(format!(
                "unknown preset {other:?} (expected linear, fourier-L0k or fourier-sobolev)"
            ))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Linear => "linear",
            Self::FourierL0k => "fourier-L0k",
            Self::FourierSobolev => "fourier-sobolev",
        })
    }
}

/// Dictionary size per cell: fixed, or `⌊n^s⌋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MRule {
    Fixed(usize),
    Power(f64),
}

impl MRule {
    pub fn size(&self, n: usize) -> usize {
        match *self {
            Self::Fixed(m) => m,
            Self::Power(s) => ((n as f64).powf(s) + 1e-9).floor() as usize,
        }
    }
}

impl FromStr for MRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(exp) = s.strip_prefix("n^") {
            let v: f64 = exp
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in M rule {s:?}")))?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("M exponent must be positive, got {v}")));
            }
            return Ok(Self::Power(v));
        }
        s.parse::<usize>()
            .map(Self::Fixed)
            .map_err(|_| Error::Parse(format!("M must be an integer or n^<s>, got {s:?}")))
    }
}

impl fmt::Display for MRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(m) => write!(f, "{m}"),
            Self::Power(s) => write!(f, "n^{s}"),
        }
    }
}

pub const MIN_RATE_REPLICATES: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub ns: Vec<usize>,
    pub m_rule: MRule,
    /// Sparsity `k` (linear, fourier-L0k) or smoothness `β` (fourier-sobolev).
    pub k_or_beta: f64,
    pub a: f64,
    pub rate_kind: RateKind,
    pub replicates: usize,
    pub seed: u64,
    pub c_f: f64,
    pub c_f_prime: f64,
    pub noise: NoiseModel,
    /// Explicit nonzero coefficients `(one-based index, value)`.
    pub theta: Option<Vec<(usize, f64)>>,
    pub theta_scale: f64,
    pub b1: f64,
    pub b2: f64,
    pub tol: f64,
    pub max_sweeps: usize,
    /// Record wall-clock time per replicate; off by default so outputs are reproducible.
    pub timing: bool,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(preset: Preset, ns: Vec<usize>, m_rule: MRule, k_or_beta: f64, a: f64) -> Self {
        Self {
            preset,
            ns,
            m_rule,
            k_or_beta,
            a,
            rate_kind: preset.default_rate(),
            replicates: 100,
            seed: 0,
            c_f: 1.0,
            c_f_prime: 1.0,
            noise: NoiseModel::Uniform { a: 1.0 },
            theta: None,
            theta_scale: 1.0,
            b1: 1.0,
            b2: 1.0,
            tol: DEFAULT_TOL,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            timing: false,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() {
            return Err(Error::Config("at least one sample size is required".into()));
        }
        if self.ns.windows(2).any(|w| w[0] >= w[1]) || self.ns[0] == 0 {
            return Err(Error::Config("sample sizes must be positive and strictly increasing".into()));
        }
        if self.preset.is_rate_preset() && self.replicates < MIN_RATE_REPLICATES {
            return Err(Error::Config(format!(
                "rate presets need at least {MIN_RATE_REPLICATES} replicates, got {}",
                self.replicates
            )));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be positive".into()));
        }
        for &n in &self.ns {
            if self.m_rule.size(n) < 2 {
                return Err(Error::Config(format!("M rule {} gives M < 2 at n = {n}", self.m_rule)));
            }
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::Config(format!("A must be positive, got {}", self.a)));
        }
        if !(self.k_or_beta >= 0.0 && self.k_or_beta.is_finite()) {
            return Err(Error::Config(format!("k_or_beta must be nonnegative, got {}", self.k_or_beta)));
        }
        match self.preset {
            Preset::FourierSobolev if self.k_or_beta <= 0.5 => {
                return Err(Error::Config(format!("smoothness must exceed 1/2, got {}", self.k_or_beta)))
            }
            Preset::Linear | Preset::FourierL0k if self.k_or_beta.fract() != 0.0 => {
                return Err(Error::Config(format!("sparsity must be an integer, got {}", self.k_or_beta)))
            }
            _ => {}
        }
        if !(self.c_f >= 0.0 && self.c_f_prime >= 0.0) {
            return Err(Error::Config("C_f and C_f' must be nonnegative".into()));
        }
        if !(self.b1 > 0.0 && self.b2 > 0.0) {
            return Err(Error::Config("B1 and B2 must be positive".into()));
        }
        if !(self.tol > 0.0) || self.max_sweeps == 0 {
            return Err(Error::Config("tol must be positive and max_sweeps at least 1".into()));
        }
        self.noise.validate()
    }

    /// Parses the `key=value` format; lists are comma-separated. Required keys:
    /// `preset`, `n`, `M`, `k_or_beta`, `A`.
    pub fn parse(text: &str) -> Result<Self> {
        let kv = parse_kv(text)?;
        let get = |key: &str| -> Option<&str> {
            kv.iter()
                .find(|(k, _)| k.eq_ignore_ascii_case(key))
                .map(|(_, v)| v.as_str())
        };
        let require = |key: &str| get(key).ok_or_else(|| Error::Config(format!("missing key {key:?}")));
        let num = |key: &str, v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::Parse(format!("{key}: cannot parse {v:?} as a number")))
        };
        let int = |key: &str, v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| Error::Parse(format!("{key}: cannot parse {v:?} as an integer")))
        };

        const KNOWN: [&str; 20] = [
            "preset", "n", "m", "k_or_beta", "a", "rate_kind", "replicates", "seed", "c_f", "c_f_prime", "noise",
            "theta", "theta_scale", "b1", "b2", "tol", "max_sweeps", "timing", "out", "output",
        ];
        for (k, _) in &kv {
            if !KNOWN.iter().any(|known| known.eq_ignore_ascii_case(k)) {
                return Err(Error::Config(format!("unknown key {k:?}")));
            }
        }

        let preset: Preset = require("preset")?.parse()?;
        let ns = require("n")?
            .split(',')
            .map(|v| int("n", v.trim()))
            .collect::<Result<Vec<_>>>()?;
        let m_rule: MRule = require("M")?.parse()?;
        let k_or_beta = num("k_or_beta", require("k_or_beta")?)?;
        let a = num("A", require("A")?)?;
        let mut cfg = Self::new(preset, ns, m_rule, k_or_beta, a);
        if let Some(v) = get("rate_kind") {
            cfg.rate_kind = v.parse()?;
        }
        if let Some(v) = get("replicates") {
            cfg.replicates = int("replicates", v)?;
        }
        if let Some(v) = get("seed") {
            cfg.seed = v
                .parse()
                .map_err(|_| Error::Parse(format!("seed: cannot parse {v:?}")))?;
        }
        if let Some(v) = get("c_f") {
            cfg.c_f = num("C_f", v)?;
        }
        if let Some(v) = get("c_f_prime") {
            cfg.c_f_prime = num("C_f_prime", v)?;
        }
        if let Some(v) = get("noise") {
            cfg.noise = v.parse()?;
        }
        if let Some(v) = get("theta") {
            cfg.theta = Some(parse_theta(v)?);
        }
        if let Some(v) = get("theta_scale") {
            cfg.theta_scale = num("theta_scale", v)?;
        }
        if let Some(v) = get("b1") {
            cfg.b1 = num("B1", v)?;
        }
        if let Some(v) = get("b2") {
            cfg.b2 = num("B2", v)?;
        }
        if let Some(v) = get("tol") {
            cfg.tol = num("tol", v)?;
        }
        if let Some(v) = get("max_sweeps") {
            cfg.max_sweeps = int("max_sweeps", v)?;
        }
        if let Some(v) = get("timing") {
            cfg.timing = match v {
                "true" | "1" | "yes" => true,
                "false" | "0" | "no" => false,
                _ => return Err(Error::Parse(format!("timing: expected true/false, got {v:?}"))),
            };
        }
        if let Some(v) = get("out").or(get("output")) {
            cfg.out = Some(PathBuf::from(v));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `2:3,4:-2,7:1` → one-based `(index, value)` pairs.
pub fn parse_theta(s: &str) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (j, v) = item
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("theta entry {item:?} must be index:value")))?;
        let j: usize = j
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad theta index {j:?}")))?;
        if j == 0 {
            return Err(Error::Config("theta indices are one-based".into()));
        }
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad theta value {v:?}")))?;
        if out.iter().any(|(i, _)| *i == j) {
            return Err(Error::Config(format!("theta index {j} given twice")));
        }
        out.push((j, v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# rate check
preset = fourier-L0k
n = 512,1024,2048,4096,8192
M = 25
k_or_beta = 3
A = 4
replicates = 100
seed = 42
noise = uniform:1
theta = 2:3,4:-2,7:1
";

    #[test]
    fn parses_sample() {
        let c = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.preset, Preset::FourierL0k);
        assert_eq!(c.ns, vec![512, 1024, 2048, 4096, 8192]);
        assert_eq!(c.m_rule, MRule::Fixed(25));
        assert_eq!(c.rate_kind, RateKind::LogN);
        assert_eq!(c.seed, 42);
        assert_eq!(c.theta, Some(vec![(2, 3.0), (4, -2.0), (7, 1.0)]));
        assert!(!c.timing);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::parse(&SAMPLE.replace("512,1024", "1024,512")).is_err());
        assert!(ExperimentConfig::parse(&SAMPLE.replace("replicates = 100", "replicates = 10")).is_err());
        assert!(ExperimentConfig::parse(&SAMPLE.replace("A = 4", "A = 0")).is_err());
        assert!(ExperimentConfig::parse(&SAMPLE.replace("A = 4\n", "")).is_err());
        assert!(ExperimentConfig::parse(&format!("{SAMPLE}colour = red\n")).is_err());
    }

    #[test]
    fn m_rules() {
        assert_eq!("n^0.5".parse::<MRule>().unwrap().size(1024), 32);
        assert_eq!("25".parse::<MRule>().unwrap().size(7), 25);
        assert!("n^-1".parse::<MRule>().is_err());
    }
}
