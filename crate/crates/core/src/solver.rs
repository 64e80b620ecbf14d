//! Weighted ℓ₁-penalized least squares by cyclic coordinate descent.
//!
//! Minimizes `n⁻¹ Σ_i (Y_i − f_λ(X_i))² + 2 Σ_j ω_j |λ_j|` with `ω_j = r·‖f_j‖_n`.

use std::fmt;
use std::str::FromStr;

use crate::dictionary::{empirical_norms, DesignMatrix, Dictionary, Points};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateKind {
    /// `A √(log M / n)`
    LogM,
    /// `A √(log n / n)`
    LogN,
    /// A fixed rate, independent of `A`, `n` and `M`.
    Explicit(f64),
}

impl FromStr for RateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "logM" | "log_M" | "logm" => Ok(Self::LogM),
            "logn" | "log_n" | "logN" => Ok(Self::LogN),
            other => match other.strip_prefix("explicit:") {
                Some(v) => {
                    let v: f64 = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad explicit rate {v:?}")))?;
                    Ok(Self::Explicit(v))
                }
                None => Err(Error::Parse(format!(
                    "unknown rate kind {other:?} (expected logM, logn or explicit:<v>)"
                ))),
            },
        }
    }
}

impl fmt::Display for RateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LogM => write!(f, "logM"),
            Self::LogN => write!(f, "logn"),
            Self::Explicit(v) => write!(f, "explicit:{v}"),
        }
    }
}

/// Penalty scale `r_{n,M}` (natural logarithms).
pub fn rate(a: f64, n: usize, m: usize, kind: RateKind) -> Result<f64> {
    rate_at(a, n as f64, m as f64, kind)
}

/// [`rate`] with real-valued `n` and `M`.
pub fn rate_at(a: f64, n: f64, m: f64, kind: RateKind) -> Result<f64> {
    let r = match kind {
        RateKind::Explicit(v) => v,
        _ if !(a > 0.0 && a.is_finite()) => {
            return Err(Error::Config(format!("tuning constant A must be positive, got {a}")))
        }
        _ if !(n >= 1.0) => return Err(Error::Config(format!("sample size must be at least 1, got {n}"))),
        RateKind::LogM => {
            if !(m >= 2.0) {
                return Err(Error::Config(format!("dictionary size must be at least 2, got {m}")));
            }
            a * (m.ln() / n).sqrt()
        }
        RateKind::LogN => a * (n.ln() / n).sqrt(),
    };
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Config(format!("rate must be positive and finite, got {r}")));
    }
    Ok(r)
}

/// `sign(z) · max(|z| − t, 0)`.
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyConfig {
    pub a: f64,
    pub kind: RateKind,
    pub rate: f64,
    pub weights: Vec<f64>,
}

impl PenaltyConfig {
    /// Weights `ω_j = r·‖f_j‖_n` for the given design.
    pub fn new(a: f64, kind: RateKind, design: &DesignMatrix) -> Result<Self> {
        let r = rate(a, design.nrows(), design.ncols(), kind)?;
        let weights = empirical_norms(design).into_iter().map(|s| r * s).collect();
        Ok(Self {
            a,
            kind,
            rate: r,
            weights,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Stop once `max_j |Δλ_j| / (1 + |λ_j|)` over a sweep falls below this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub lambda: Vec<f64>,
    pub support: Vec<usize>,
    pub m_hat: usize,
    pub objective: f64,
    pub kkt_residual: f64,
    pub sweeps: usize,
    pub converged: bool,
    /// Columns with `‖f_j‖_n = 0`, held at zero.
    pub frozen: Vec<usize>,
    /// Objective after each sweep.
    pub history: Vec<f64>,
}

fn check_inputs(design: &DesignMatrix, y: &[f64], weights: &[f64]) -> Result<()> {
    if y.len() != design.nrows() {
        return Err(Error::Shape(format!(
            "response has length {}, design has {} rows",
            y.len(),
            design.nrows()
        )));
    }
    if weights.len() != design.ncols() {
        return Err(Error::Shape(format!(
            "{} weights for {} columns",
            weights.len(),
            design.ncols()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("response contains non-finite values".into()));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::Config("weights must be finite and nonnegative".into()));
    }
    Ok(())
}

fn residual(design: &DesignMatrix, y: &[f64], lambda: &[f64]) -> Vec<f64> {
    let fitted = design.combine(lambda);
    y.iter().zip(fitted).map(|(a, b)| a - b).collect()
}

fn penalty(weights: &[f64], lambda: &[f64]) -> f64 {
    2.0 * weights.iter().zip(lambda).map(|(w, l)| w * l.abs()).sum::<f64>()
}

/// Penalized empirical risk at `λ`, computed from scratch.
pub fn objective(design: &DesignMatrix, y: &[f64], weights: &[f64], lambda: &[f64]) -> f64 {
    let r = residual(design, y, lambda);
    r.iter().map(|v| v * v).sum::<f64>() / y.len() as f64 + penalty(weights, lambda)
}

/// Largest violation of the optimality conditions at `λ`, with
/// `g_j = n⁻¹⟨f_j, Y − f_λ⟩`: `max(0, |g_j| − ω_j)` at zeros and
/// `|g_j − ω_j sign(λ_j)|` elsewhere.
pub fn kkt_residual(design: &DesignMatrix, y: &[f64], weights: &[f64], lambda: &[f64]) -> f64 {
    let r = residual(design, y, lambda);
    let n = y.len() as f64;
    (0..design.ncols())
        .map(|j| {
            let g = design.column(j).iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() / n;
            if lambda[j] == 0.0 {
                (g.abs() - weights[j]).max(0.0)
            } else {
                (g - weights[j] * lambda[j].signum()).abs()
            }
        })
        .fold(0.0, f64::max)
}

pub fn fit(design: &DesignMatrix, y: &[f64], penalty: &PenaltyConfig, opts: &FitOptions) -> Result<LassoFit> {
    fit_weighted(design, y, &penalty.weights, opts)
}

/// Coordinate descent from `λ = 0`, columns visited in order.
pub fn fit_weighted(design: &DesignMatrix, y: &[f64], weights: &[f64], opts: &FitOptions) -> Result<LassoFit> {
    check_inputs(design, y, weights)?;
    if !(opts.tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if opts.max_sweeps == 0 {
        return Err(Error::Config("max_sweeps must be at least 1".into()));
    }
    let (n, m) = (design.nrows(), design.ncols());
    let nf = n as f64;
    let norm2: Vec<f64> = (0..m)
        .map(|j| design.column(j).iter().map(|v| v * v).sum::<f64>() / nf)
        .collect();
    let frozen: Vec<usize> = (0..m).filter(|&j| norm2[j] == 0.0).collect();

    let mut lambda = vec![0.0; m];
    let mut r = y.to_vec();
    let mut history = Vec::new();
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut max_change: f64 = 0.0;
        for j in 0..m {
            if norm2[j] == 0.0 {
                continue;
            }
            let col = design.column(j);
            let c = col.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() / nf + norm2[j] * lambda[j];
            let new = soft_threshold(c, weights[j]) / norm2[j];
            let delta = new - lambda[j];
            if delta != 0.0 {
                for (ri, &v) in r.iter_mut().zip(col) {
                    *ri -= delta * v;
                }
                lambda[j] = new;
                max_change = max_change.max(delta.abs() / (1.0 + new.abs()));
            }
        }
        history.push(r.iter().map(|v| v * v).sum::<f64>() / nf + penalty(weights, &lambda));
        if max_change < opts.tol {
            converged = true;
            break;
        }
    }

    let support: Vec<usize> = (0..m).filter(|&j| lambda[j] != 0.0).collect();
    let fit = LassoFit {
        m_hat: support.len(),
        support,
        objective: objective(design, y, weights, &lambda),
        kkt_residual: kkt_residual(design, y, weights, &lambda),
        sweeps,
        converged,
        frozen,
        history,
        lambda,
    };
    if !converged && fit.kkt_residual > 1e3 * opts.tol {
        return Err(Error::NonConvergence(Box::new(fit)));
    }
    Ok(fit)
}

/// `f_λ` at each point.
pub fn predict(dict: &Dictionary, lambda: &[f64], points: &Points) -> Result<Vec<f64>> {
    if lambda.len() != dict.len() {
        return Err(Error::Shape(format!(
            "{} coefficients for a dictionary of {} functions",
            lambda.len(),
            dict.len()
        )));
    }
    Ok(dict.evaluate(points)?.combine(lambda))
}
