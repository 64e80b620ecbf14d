//! Zero-mean noise families with a finite exponential moment `b = E exp|W|`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// Uniform on `[−a, a]`; `a = 0` is the noiseless model.
    Uniform { a: f64 },
    /// `±a` with equal probability.
    Rademacher { a: f64 },
    /// `N(0, σ²)` conditioned on `|W| ≤ c`.
    TruncatedGaussian { sigma: f64, c: f64 },
    /// Laplace with scale `σ < 1`.
    Laplace { sigma: f64 },
}

impl NoiseModel {
    pub fn none() -> Self {
        Self::Uniform { a: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Uniform { a } | Self::Rademacher { a } => a >= 0.0 && a.is_finite(),
            Self::TruncatedGaussian { sigma, c } => sigma > 0.0 && c > 0.0 && sigma.is_finite() && c.is_finite(),
            Self::Laplace { sigma } => sigma > 0.0 && sigma < 1.0,
        };
        if !ok {
            return Err(Error::Config(format!("invalid noise parameters: {self}")));
        }
        Ok(())
    }

    /// `E exp|W|`.
    pub fn b(&self) -> f64 {
        match *self {
            Self::Uniform { a } if a == 0.0 => 1.0,
            Self::Uniform { a } => a.exp_m1() / a,
            Self::Rademacher { a } => a.exp(),
            Self::TruncatedGaussian { sigma, c } => {
                let phi = Normal::standard();
                let num = 2.0 * (sigma * sigma / 2.0).exp() * (phi.cdf(c / sigma - sigma) - phi.cdf(-sigma));
                num / (2.0 * phi.cdf(c / sigma) - 1.0)
            }
            Self::Laplace { sigma } => 1.0 / (1.0 - sigma),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        match *self {
            Self::Uniform { a } => (0..n)
                .map(|_| {
                    let u: f64 = rng.random();
                    a * (2.0 * u - 1.0)
                })
                .collect(),
            Self::Rademacher { a } => (0..n).map(|_| if rng.random::<bool>() { a } else { -a }).collect(),
            Self::TruncatedGaussian { sigma, c } => (0..n)
                .map(|_| loop {
                    let z: f64 = StandardNormal.sample(rng);
                    let w = sigma * z;
                    if w.abs() <= c {
                        break w;
                    }
                })
                .collect(),
            Self::Laplace { sigma } => (0..n)
                .map(|_| {
                    let e1: f64 = Exp1.sample(rng);
                    let e2: f64 = Exp1.sample(rng);
                    sigma * (e1 - e2)
                })
                .collect(),
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform { a } => write!(f, "uniform:{a}"),
            Self::Rademacher { a } => write!(f, "rademacher:{a}"),
            Self::TruncatedGaussian { sigma, c } => write!(f, "truncated-gaussian:{sigma}:{c}"),
            Self::Laplace { sigma } => write!(f, "laplace:{sigma}"),
        }
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    /// `none`, `uniform:<a>`, `rademacher:<a>`, `truncated-gaussian:<σ>:<c>`, `laplace:<σ>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| Error::Parse(format!("noise spec {s:?} is missing a parameter")))?
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number in noise spec {s:?}")))
        };
        let model = match parts[0] {
            "none" => Self::none(),
            "uniform" => Self::Uniform { a: num(1)? },
            "rademacher" => Self::Rademacher { a: num(1)? },
            "truncated-gaussian" | "truncnorm" => Self::TruncatedGaussian {
                sigma: num(1)?,
                c: num(2)?,
            },
            "laplace" => Self::Laplace { sigma: num(1)? },
            other => return Err(Error::Parse(format!("unknown noise family {other:?}"))),
        };
        model.validate()?;
        Ok(model)
    }
}
