//! Explicit right-hand sides: the oracle-inequality bound shapes and the
//! exponential tail bounds for the good events.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremKind {
    /// `B₁ κ⁻¹ r² M(λ)`
    T21Risk,
    /// `B₂ κ⁻¹ r M(λ)`
    T21L1,
    /// `C r² M(λ)`
    T22Risk,
    /// `C r M(λ)`
    T22L1,
    /// `C′ (‖f_λ − f‖² + r² M(λ))`
    T23,
}

/// Constants the bounds leave unspecified; supplied by the user or fitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub b1: f64,
    pub b2: f64,
    pub c: f64,
    pub c_prime: f64,
    pub c1: f64,
    pub c2: f64,
    pub c1_prime: f64,
    pub c2_prime: f64,
    /// Noise moment bound `E exp|W| ≤ b`.
    pub b: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self {
            b1: 1.0,
            b2: 1.0,
            c: 1.0,
            c_prime: 1.0,
            c1: 1.0,
            c2: 1.0,
            c1_prime: 1.0,
            c2_prime: 1.0,
            b: 1.0,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(v)
}

pub fn theorem_rhs(
    kind: TheoremKind,
    constants: &BoundConstants,
    r: f64,
    m_lambda: usize,
    kappa: f64,
    dist2: f64,
) -> Result<f64> {
    positive("rate", r)?;
    let m = m_lambda as f64;
    let kappa_checked = || {
        if !(kappa > 0.0) {
            return Err(Error::ConditionViolated(format!(
                "restricted-eigenvalue constant must be positive, got {kappa}"
            )));
        }
        Ok(kappa)
    };
    Ok(match kind {
        TheoremKind::T21Risk => positive("B1", constants.b1)? / kappa_checked()? * r * r * m,
        TheoremKind::T21L1 => positive("B2", constants.b2)? / kappa_checked()? * r * m,
        TheoremKind::T22Risk => positive("C", constants.c)? * r * r * m,
        TheoremKind::T22L1 => positive("C", constants.c)? * r * m,
        TheoremKind::T23 => {
            if !(dist2 >= 0.0) {
                return Err(Error::Config(format!("squared distance must be nonnegative, got {dist2}")));
            }
            positive("C'", constants.c_prime)? * (dist2 + r * r * m)
        }
    })
}

/// `exp(−n ε² / (2 (w² + d ε)))`, clamped to `[0, 1]`.
pub fn bernstein_bound(n: f64, epsilon: f64, w2: f64, d: f64) -> f64 {
    if n <= 0.0 {
        return 1.0;
    }
    let denom = 2.0 * (w2 + d * epsilon);
    if denom <= 0.0 {
        return 0.0;
    }
    (-n * epsilon * epsilon / denom).exp().clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lemma {
    /// `P(E₂ᶜ)`
    L4,
    /// `P((E₁ ∩ E₂)ᶜ)`
    L5,
    /// `P(E₃(λ)ᶜ)`
    L6,
    L7,
    L9,
}

impl Lemma {
    pub const ALL: [Lemma; 5] = [Lemma::L4, Lemma::L5, Lemma::L6, Lemma::L7, Lemma::L9];
}

impl FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "L4" | "4" => Ok(Self::L4),
            "L5" | "5" => Ok(Self::L5),
            "L6" | "6" => Ok(Self::L6),
            "L7" | "7" => Ok(Self::L7),
            "L9" | "9" => Ok(Self::L9),
            other => Err(Error::Parse(format!("unknown lemma {other:?} (expected L4, L5, L6, L7 or L9)"))),
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::L4 => "L4",
            Self::L5 => "L5",
            Self::L6 => "L6",
            Self::L7 => "L7",
            Self::L9 => "L9",
        };
        f.write_str(s)
    }
}

/// Inputs for [`lemma_bound`]; each lemma reads only what it needs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LemmaParams {
    pub n: Option<f64>,
    pub m: Option<f64>,
    pub r: Option<f64>,
    pub c0: Option<f64>,
    pub l: Option<f64>,
    pub l0: Option<f64>,
    pub b: Option<f64>,
    pub c_f: Option<f64>,
    pub kappa: Option<f64>,
    pub m_lambda: Option<f64>,
    pub l_lambda: Option<f64>,
}

fn need(v: Option<f64>, name: &str, lemma: Lemma) -> Result<f64> {
    v.ok_or_else(|| Error::Config(format!("{lemma} needs parameter {name}")))
}

fn need_pos(v: Option<f64>, name: &str, lemma: Lemma) -> Result<f64> {
    let x = need(v, name, lemma)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Config(format!("{lemma}: {name} must be positive, got {x}")));
    }
    Ok(x)
}

fn need_nonneg(v: Option<f64>, name: &str, lemma: Lemma) -> Result<f64> {
    let x = need(v, name, lemma)?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Config(format!("{lemma}: {name} must be nonnegative, got {x}")));
    }
    Ok(x)
}

/// `C = 2 c₀⁻² (2 C_f + 1 + 4 √(2/κ))²`.
pub fn lemma7_constant(c0: f64, c_f: f64, kappa: f64) -> f64 {
    2.0 / (c0 * c0) * (2.0 * c_f + 1.0 + 4.0 * (2.0 / kappa).sqrt()).powi(2)
}

/// `C = 8 · 11² / c₀²`.
pub fn lemma9_constant(c0: f64) -> f64 {
    8.0 * 121.0 / (c0 * c0)
}

pub fn lemma_bound(which: Lemma, p: &LemmaParams) -> Result<f64> {
    let l = which;
    let bound = match which {
        Lemma::L4 => {
            let (n, m, c0, lv) = (need_nonneg(p.n, "n", l)?, need_pos(p.m, "M", l)?, need_pos(p.c0, "c0", l)?, need_pos(p.l, "L", l)?);
            2.0 * m * (-n * c0 * c0 / (12.0 * lv * lv)).exp()
        }
        Lemma::L5 => {
            let n = need_nonneg(p.n, "n", l)?;
            let m = need_pos(p.m, "M", l)?;
            let r = need_pos(p.r, "r", l)?;
            let b = need_pos(p.b, "b", l)?;
            let c0 = need_pos(p.c0, "c0", l)?;
            let lv = need_pos(p.l, "L", l)?;
            2.0 * m * (-n * r * r / (16.0 * b)).exp()
                + 2.0 * m * (-n * r * c0 / (8.0 * std::f64::consts::SQRT_2 * lv)).exp()
                + 2.0 * m * (-n * c0 * c0 / (12.0 * lv * lv)).exp()
        }
        Lemma::L6 => {
            let n = need_nonneg(p.n, "n", l)?;
            let r = need_pos(p.r, "r", l)?;
            let ml = need_nonneg(p.m_lambda, "M(lambda)", l)?;
            let ll = need_nonneg(p.l_lambda, "L(lambda)", l)?;
            if ll == 0.0 {
                return Ok(0.0);
            }
            (-ml * n * r * r / (4.0 * ll * ll)).exp()
        }
        Lemma::L7 => {
            let n = need_nonneg(p.n, "n", l)?;
            let m = need_pos(p.m, "M", l)?;
            let c0 = need_pos(p.c0, "c0", l)?;
            let lv = need_pos(p.l, "L", l)?;
            let l0 = need_pos(p.l0, "L0", l)?;
            let c_f = need_nonneg(p.c_f, "C_f", l)?;
            let kappa = need_pos(p.kappa, "kappa", l)?;
            let ml = need_pos(p.m_lambda, "M(lambda)", l)?;
            let c = lemma7_constant(c0, c_f, kappa);
            2.0 * m * m * (-n / (16.0 * l0 * c * c * ml * ml)).exp()
                + 2.0 * m * m * (-n / (8.0 * lv * lv * c * ml)).exp()
        }
        Lemma::L9 => {
            let n = need_nonneg(p.n, "n", l)?;
            let m = need_pos(p.m, "M", l)?;
            let r = need_pos(p.r, "r", l)?;
            let c0 = need_pos(p.c0, "c0", l)?;
            let lv = need_pos(p.l, "L", l)?;
            let l0 = need_pos(p.l0, "L0", l)?;
            let c = lemma9_constant(c0);
            2.0 * m * m * (-n * r * r / (16.0 * c * c * l0)).exp()
                + 2.0 * m * m * (-n * r / (8.0 * lv * lv * c)).exp()
        }
    };
    Ok(bound.clamp(0.0, 1.0))
}
