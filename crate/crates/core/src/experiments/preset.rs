//! Dictionaries, designs and regression functions behind each preset.

use crate::dictionary::{validate_a2, Dictionary, DictionaryValidation, Domain};
use crate::error::{Error, Result};
use crate::experiments::config::{ExperimentConfig, Preset};
use crate::measure::MeasureSpec;
use crate::population::{Approximation, Population};
use crate::truth::{TruthClass, TruthSpec};

/// Number of coefficients kept for the smooth preset.
pub const SOBOLEV_TERMS: usize = 256;

/// Extra decay added to `β` so the smoothness sum converges.
pub const SOBOLEV_DECAY_OFFSET: f64 = 0.6;

/// Everything fixed within one dictionary size.
#[derive(Debug, Clone)]
pub struct Problem {
    pub dict: Dictionary,
    pub measure: MeasureSpec,
    pub truth: TruthSpec,
    pub approx: Approximation,
    pub validation: DictionaryValidation,
    /// `‖f_j‖`.
    pub norms: Vec<f64>,
}

impl Problem {
    pub fn build(cfg: &ExperimentConfig, m: usize) -> Result<Self> {
        let measure = MeasureSpec::uniform();
        let (dict, truth) = match cfg.preset {
            Preset::Linear => {
                let dict = Dictionary::coordinate(m, m, Domain::cube(m, -1.0, 1.0)?)?;
                let coef = match &cfg.theta {
                    Some(t) => scatter(t, m)?,
                    None => linear_default(m, cfg.k_or_beta as usize, cfg.theta_scale)?,
                };
                (dict, TruthSpec::linear(coef)?)
            }
            Preset::FourierL0k => {
                let theta = match &cfg.theta {
                    Some(t) => scatter(t, m)?,
                    None => fourier_l0_default(m, cfg.k_or_beta as usize, cfg.theta_scale)?,
                };
                let k = theta.iter().filter(|&&v| v != 0.0).count();
                (
                    Dictionary::fourier(m)?,
                    TruthSpec::fourier(theta)?.with_class(TruthClass::L0 { k })?,
                )
            }
            Preset::FourierSobolev => {
                let beta = cfg.k_or_beta;
                let theta = match &cfg.theta {
                    Some(t) => scatter(t, t.iter().map(|(j, _)| *j).max().unwrap_or(1))?,
                    None => sobolev_default(beta, cfg.theta_scale),
                };
                let q: f64 = theta
                    .iter()
                    .enumerate()
                    .map(|(j, t)| ((j + 1) as f64).powf(2.0 * beta) * t * t)
                    .sum();
                (
                    Dictionary::fourier(m)?,
                    TruthSpec::fourier(theta)?.with_class(TruthClass::Sobolev { beta, q: q * (1.0 + 1e-12) })?,
                )
            }
        };
        let population = Population::new(&dict, &measure)?;
        let approx = Approximation::from_population(&population, &dict, &truth)?;
        let validation = validate_a2(&dict, &measure)?;
        Ok(Self {
            norms: population.norms(),
            dict,
            measure,
            truth,
            approx,
            validation,
        })
    }
}

/// One-based `(index, value)` pairs into a dense vector of length `len`.
fn scatter(pairs: &[(usize, f64)], len: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; len];
    for &(j, v) in pairs {
        if j == 0 || j > len {
            return Err(Error::Config(format!("coefficient index {j} outside 1..={len}")));
        }
        out[j - 1] = v;
    }
    Ok(out)
}

/// Magnitudes `k, k−1, …, 1` with alternating signs.
fn ladder(k: usize, scale: f64) -> impl Iterator<Item = f64> {
    (0..k).map(move |i| {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        scale * sign * (k - i) as f64
    })
}

/// Nonzeros spread evenly: zero-based positions `i·⌊M/k⌋`.
pub fn linear_default(m: usize, k: usize, scale: f64) -> Result<Vec<f64>> {
    if k > m {
        return Err(Error::Config(format!("sparsity {k} exceeds M = {m}")));
    }
    let mut out = vec![0.0; m];
    if k == 0 {
        return Ok(out);
    }
    let step = m / k;
    for (i, v) in ladder(k, scale).enumerate() {
        out[i * step] = v;
    }
    Ok(out)
}

/// Nonzeros at one-based positions `2 + ⌊5i/2⌋` (2, 4, 7, 9, 12, …), leaving
/// the constant function out of the support.
pub fn fourier_l0_default(m: usize, k: usize, scale: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; m];
    for (i, v) in ladder(k, scale).enumerate() {
        let j = 2 + 5 * i / 2;
        if j > m {
            return Err(Error::Config(format!("sparsity {k} does not fit in M = {m}")));
        }
        out[j - 1] = v;
    }
    Ok(out)
}

/// `θ_j = scale · (−1)^{j+1} · j^{−(β + 0.6)}`, `j = 1..=256`.
pub fn sobolev_default(beta: f64, scale: f64) -> Vec<f64> {
    (1..=SOBOLEV_TERMS)
        .map(|j| {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            scale * sign * (j as f64).powf(-(beta + SOBOLEV_DECAY_OFFSET))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::MRule;

    #[test]
    fn default_layouts() {
        assert_eq!(
            fourier_l0_default(8, 3, 1.0).unwrap(),
            vec![0.0, 3.0, 0.0, -2.0, 0.0, 0.0, 1.0, 0.0]
        );
        assert!(fourier_l0_default(8, 4, 1.0).is_err());
        assert_eq!(
            linear_default(10, 3, 1.0).unwrap(),
            vec![3.0, 0.0, 0.0, -2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]
        );
        let s = sobolev_default(1.0, 1.0);
        assert_eq!(s.len(), SOBOLEV_TERMS);
        assert!((s[1] + 2f64.powf(-1.6)).abs() < 1e-15);
    }

    #[test]
    fn fourier_problem_is_orthonormal() {
        let cfg = ExperimentConfig::new(Preset::FourierL0k, vec![512], MRule::Fixed(12), 3.0, 4.0);
        let p = Problem::build(&cfg, 12).unwrap();
        assert!(p.norms.iter().all(|v| (v - 1.0).abs() < 1e-9));
        assert!((p.approx.truth_norm2() - 14.0).abs() < 1e-9);
        assert!(p.validation.satisfied());
    }

    #[test]
    fn linear_problem_norms() {
        let cfg = ExperimentConfig::new(Preset::Linear, vec![100], MRule::Fixed(10), 3.0, 1.0);
        let p = Problem::build(&cfg, 10).unwrap();
        // E x² = 1/3 on [−1, 1]
        assert!(p.norms.iter().all(|v| (v * v - 1.0 / 3.0).abs() < 1e-12));
        assert!((p.approx.truth_norm2() - 14.0 / 3.0).abs() < 1e-12);
    }
}
