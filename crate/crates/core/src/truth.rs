//! Regression functions `f = E[Y | X]` used in simulations.

use crate::dictionary::{fourier_basis_into, Domain, Points, Table};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum TruthFunction {
    /// `f = Σ_j θ_j f_j` over the Fourier basis on `[0, 1]`; `theta[j]` pairs with column `j`.
    FourierSeries { theta: Vec<f64> },
    /// `f(x) = Σ_j β_j x_j`.
    Linear { coefficients: Vec<f64> },
    Tabulated(Table),
}

/// Smoothness or sparsity class the truth is declared to belong to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruthClass {
    None,
    /// Exactly `k` nonzero Fourier coefficients.
    L0 { k: usize },
    /// `Σ |θ_j| ≤ budget`.
    Ell1 { budget: f64 },
    /// `Σ j^{2β} θ_j² ≤ q` (one-based `j`).
    Sobolev { beta: f64, q: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthSpec {
    function: TruthFunction,
    class: TruthClass,
    l_star: f64,
}

impl TruthSpec {
    pub fn new(function: TruthFunction, class: TruthClass) -> Result<Self> {
        let coeffs = match &function {
            TruthFunction::FourierSeries { theta } => Some(theta),
            TruthFunction::Linear { coefficients } => Some(coefficients),
            TruthFunction::Tabulated(_) => None,
        };
        if coeffs.is_some_and(|c| c.iter().any(|v| !v.is_finite())) {
            return Err(Error::Config("truth coefficients must be finite".into()));
        }
        let mut spec = Self {
            function,
            class,
            l_star: 0.0,
        };
        spec.check_class()?;
        spec.l_star = spec.sup_norm_estimate();
        Ok(spec)
    }

    pub fn fourier(theta: Vec<f64>) -> Result<Self> {
        Self::new(TruthFunction::FourierSeries { theta }, TruthClass::None)
    }

    pub fn linear(coefficients: Vec<f64>) -> Result<Self> {
        Self::new(TruthFunction::Linear { coefficients }, TruthClass::None)
    }

    pub fn with_class(self, class: TruthClass) -> Result<Self> {
        Self::new(self.function, class)
    }

    fn check_class(&self) -> Result<()> {
        let theta = match (&self.class, &self.function) {
            (TruthClass::None, _) => return Ok(()),
            (_, TruthFunction::FourierSeries { theta }) => theta,
            _ => {
                return Err(Error::Config(
                    "class tags apply only to Fourier-series truths".into(),
                ))
            }
        };
        match self.class {
            TruthClass::None => Ok(()),
            TruthClass::L0 { k } => {
                let nz = theta.iter().filter(|&&t| t != 0.0).count();
                if nz != k {
                    return Err(Error::Config(format!(
                        "L0({k}) truth must have exactly {k} nonzero coefficients, found {nz}"
                    )));
                }
                Ok(())
            }
            TruthClass::Ell1 { budget } => {
                let s: f64 = theta.iter().map(|t| t.abs()).sum();
                if !(budget > 0.0) || s > budget {
                    return Err(Error::Config(format!(
                        "coefficient l1 norm {s} exceeds the budget {budget}"
                    )));
                }
                Ok(())
            }
            TruthClass::Sobolev { beta, q } => {
                if !(beta > 0.5 && q > 0.0) {
                    return Err(Error::Config(format!(
                        "Sobolev class needs beta > 1/2 and Q > 0, got beta = {beta}, Q = {q}"
                    )));
                }
                let s: f64 = theta
                    .iter()
                    .enumerate()
                    .map(|(j, t)| ((j + 1) as f64).powf(2.0 * beta) * t * t)
                    .sum();
                if s > q {
                    return Err(Error::Config(format!(
                        "weighted coefficient energy {s} exceeds Q = {q}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn function(&self) -> &TruthFunction {
        &self.function
    }

    pub fn class(&self) -> TruthClass {
        self.class
    }

    /// Sup-norm bound `L_*` (grid estimate on `[0, 1]` for one-dimensional truths,
    /// `Σ |β_j|` over the unit cube for linear ones).
    pub fn l_star(&self) -> f64 {
        self.l_star
    }

    pub fn theta(&self) -> Option<&[f64]> {
        match &self.function {
            TruthFunction::FourierSeries { theta } => Some(theta),
            _ => None,
        }
    }

    pub fn linear_coefficients(&self) -> Option<&[f64]> {
        match &self.function {
            TruthFunction::Linear { coefficients } => Some(coefficients),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.function {
            TruthFunction::FourierSeries { theta } => {
                let mut buf = vec![0.0; theta.len()];
                fourier_basis_into(x[0], &mut buf);
                buf.iter().zip(theta).map(|(a, b)| a * b).sum()
            }
            TruthFunction::Linear { coefficients } => {
                coefficients.iter().zip(x).map(|(a, b)| a * b).sum()
            }
            TruthFunction::Tabulated(t) => t.eval(x[0]),
        }
    }

    pub fn eval_points(&self, points: &Points) -> Vec<f64> {
        match &self.function {
            TruthFunction::FourierSeries { theta } => {
                let mut buf = vec![0.0; theta.len()];
                points
                    .rows()
                    .map(|x| {
                        fourier_basis_into(x[0], &mut buf);
                        buf.iter().zip(theta).map(|(a, b)| a * b).sum()
                    })
                    .collect()
            }
            _ => points.rows().map(|x| self.eval(x)).collect(),
        }
    }

    /// Sup-norm of `f` over a box, exact for linear truths.
    pub fn sup_norm_on(&self, domain: &Domain) -> f64 {
        match &self.function {
            TruthFunction::Linear { coefficients } => linear_sup(coefficients, domain),
            _ => {
                let (lo, hi) = (domain.lower()[0], domain.upper()[0]);
                let g = crate::population::SUP_GRID_POINTS;
                let step = (hi - lo) / (g - 1) as f64;
                let xs = (0..g).map(|i| lo + i as f64 * step).collect();
                self.eval_points(&Points::from_scalars(xs))
                    .into_iter()
                    .fold(0.0, |a: f64, v| a.max(v.abs()))
            }
        }
    }

    fn sup_norm_estimate(&self) -> f64 {
        match &self.function {
            TruthFunction::Linear { coefficients } => {
                self.sup_norm_on(&Domain::unit_cube(coefficients.len().max(1)))
            }
            _ => self.sup_norm_on(&Domain::unit_cube(1)),
        }
    }
}

/// `max_{x ∈ box} |Σ_j c_j x_j|`, attained at a corner.
pub fn linear_sup(coefficients: &[f64], domain: &Domain) -> f64 {
    let (mut hi_sum, mut lo_sum) = (0.0, 0.0);
    for (c, (lo, hi)) in coefficients.iter().zip(domain.lower().iter().zip(domain.upper())) {
        hi_sum += (c * lo).max(c * hi);
        lo_sum += (c * lo).min(c * hi);
    }
    f64::max(hi_sum, -lo_sum)
}
