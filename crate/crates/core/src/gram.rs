//! Population and empirical Gram matrices and the diagnostics built on them:
//! the restricted-eigenvalue constant `κ_M`, mutual coherence and `η_{n,M}`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::dictionary::{DesignMatrix, Dictionary};
use crate::error::{Error, Result};
use crate::measure::MeasureSpec;
use crate::population::Population;

/// Convergence tolerance handed to the symmetric eigensolver.
pub const EIGEN_TOL: f64 = 1e-12;
const EIGEN_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GramPair {
    /// `Ψ_M`, population inner products.
    pub psi_m: DMatrix<f64>,
    /// `Ψ_{n,M}`, empirical inner products.
    pub psi_nm: DMatrix<f64>,
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn check_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("{what} has non-finite entries")));
    }
    Ok(())
}

/// `n⁻¹ XᵀX` for a design.
pub fn empirical_gram(design: &DesignMatrix) -> DMatrix<f64> {
    let (n, m) = (design.nrows(), design.ncols());
    let mut g = DMatrix::zeros(m, m);
    for i in 0..m {
        let ci = design.column(i);
        for j in i..m {
            let v = ci.iter().zip(design.column(j)).map(|(a, b)| a * b).sum::<f64>() / n as f64;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

pub fn gram_pair(dict: &Dictionary, measure: &MeasureSpec, design: &DesignMatrix) -> Result<GramPair> {
    if design.ncols() != dict.len() {
        return Err(Error::Shape(format!(
            "design has {} columns, dictionary has {}",
            design.ncols(),
            dict.len()
        )));
    }
    let psi_m = symmetrize(&Population::new(dict, measure)?.gram());
    let psi_nm = symmetrize(&empirical_gram(design));
    check_finite(&psi_m, "population Gram")?;
    check_finite(&psi_nm, "empirical Gram")?;
    Ok(GramPair { psi_m, psi_nm })
}

fn check_square(psi: &DMatrix<f64>) -> Result<()> {
    if psi.nrows() == 0 || psi.nrows() != psi.ncols() {
        return Err(Error::Shape(format!(
            "expected a non-empty square matrix, got {} x {}",
            psi.nrows(),
            psi.ncols()
        )));
    }
    Ok(())
}

fn positive_diagonal(psi: &DMatrix<f64>) -> Result<Vec<f64>> {
    let diag: Vec<f64> = psi.diagonal().iter().copied().collect();
    if let Some(j) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::DegenerateDictionary(format!(
            "diagonal entry {j} is {} (must be positive)",
            diag[j]
        )));
    }
    Ok(diag)
}

/// Correlation-normalized Gram `D^{-1/2} Ψ D^{-1/2}`.
pub fn correlation(psi: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square(psi)?;
    let s: Vec<f64> = positive_diagonal(psi)?.iter().map(|d| d.sqrt()).collect();
    let m = psi.nrows();
    Ok(DMatrix::from_fn(m, m, |i, j| psi[(i, j)] / (s[i] * s[j])))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> Result<f64> {
    let eig = SymmetricEigen::try_new(symmetrize(m), EIGEN_TOL, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numeric("symmetric eigensolver did not converge".into()))?;
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// `κ_M`: the largest `κ` with `Ψ − κ·diag(Ψ) ⪰ 0`, clamped below at zero.
pub fn kappa(psi: &DMatrix<f64>) -> Result<f64> {
    check_finite(psi, "Gram matrix")?;
    let c = correlation(psi)?;
    Ok(min_eigenvalue(&c)?.max(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    pub rho: DMatrix<f64>,
    pub rho_lambda: f64,
}

/// Pairwise correlations and `ρ(λ) = max_{i ∈ support} max_{j ≠ i} |ρ(i, j)|`
/// (zero for an empty support). Works on either Gram matrix.
pub fn coherence(psi: &DMatrix<f64>, support: &[usize]) -> Result<CoherenceReport> {
    let rho = correlation(psi)?;
    let m = rho.nrows();
    let mut rho_lambda: f64 = 0.0;
    for &i in support {
        if i >= m {
            return Err(Error::Shape(format!("support index {i} out of range (M = {m})")));
        }
        for j in (0..m).filter(|&j| j != i) {
            rho_lambda = rho_lambda.max(rho[(i, j)].abs());
        }
    }
    Ok(CoherenceReport { rho, rho_lambda })
}

/// `η_{n,M} = max_{i,j} |ψ_M(i, j) − ψ_{n,M}(i, j)|`.
pub fn eta(pair: &GramPair) -> Result<f64> {
    if pair.psi_m.shape() != pair.psi_nm.shape() {
        return Err(Error::Shape(format!(
            "Gram shapes differ: {:?} vs {:?}",
            pair.psi_m.shape(),
            pair.psi_nm.shape()
        )));
    }
    Ok(pair
        .psi_m
        .iter()
        .zip(pair.psi_nm.iter())
        .fold(0.0, |a: f64, (x, y)| a.max((x - y).abs())))
}

/// Everything `diagnose` reports for one dictionary, sample and support.
#[derive(Debug, Clone)]
pub struct GramDiagnostics {
    pub kappa: f64,
    pub kappa_empirical: Option<f64>,
    pub rho_lambda: f64,
    /// Same formula on `Ψ_{n,M}`; a finite-sample diagnostic only.
    pub rho_lambda_empirical: Option<f64>,
    pub max_coherence: f64,
    pub eta: Option<f64>,
}

pub fn diagnostics(psi_m: &DMatrix<f64>, psi_nm: Option<&DMatrix<f64>>, support: &[usize]) -> Result<GramDiagnostics> {
    let m = psi_m.nrows();
    let all: Vec<usize> = (0..m).collect();
    let population = coherence(psi_m, support)?;
    let max_coherence = coherence(psi_m, &all)?.rho_lambda;
    let (kappa_empirical, rho_lambda_empirical, eta) = match psi_nm {
        Some(e) => {
            let pair = GramPair {
                psi_m: psi_m.clone(),
                psi_nm: e.clone(),
            };
            (
                Some(kappa(e)?),
                Some(coherence(e, support)?.rho_lambda),
                Some(eta(&pair)?),
            )
        }
        None => (None, None, None),
    };
    Ok(GramDiagnostics {
        kappa: kappa(psi_m)?,
        kappa_empirical,
        rho_lambda: population.rho_lambda,
        rho_lambda_empirical,
        max_coherence,
        eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::Points;

    use crate::test_oracles as oracles;

    #[test]
    fn fourier_population_gram_is_identity() {
        let d = Dictionary::fourier(3).unwrap();
        let design = d.evaluate(&Points::from_scalars(vec![0.1, 0.4, 0.9])).unwrap();
        let pair = gram_pair(&d, &MeasureSpec::uniform(), &design).unwrap();
        let err = (&pair.psi_m - DMatrix::identity(3, 3)).abs().max();
        assert!(err < 1e-6);
        // independent oracle: midpoint rule with a different node set
        let oracle = oracles::midpoint_fourier_gram(3, 20_000);
        assert!((&pair.psi_m - oracle).abs().max() < 1e-6);
    }

    #[test]
    fn fourier_gram_identity_up_to_65() {
        let d = Dictionary::fourier(65).unwrap();
        let g = Population::new(&d, &MeasureSpec::uniform()).unwrap().gram();
        assert!((&g - DMatrix::identity(65, 65)).abs().max() < 1e-5);
    }

    #[test]
    fn duplicated_columns_are_perfectly_correlated() {
        let design = DesignMatrix::from_columns(&[vec![1.0, 2.0, -1.0], vec![1.0, 2.0, -1.0], vec![0.0, 1.0, 5.0]]).unwrap();
        let g = empirical_gram(&design);
        assert_eq!(g.row(0), g.row(1));
        let c = coherence(&g, &[0]).unwrap();
        assert!((c.rho[(0, 1)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_indicator_design_gives_identity() {
        let m = 4;
        let s = (m as f64).sqrt();
        let cols: Vec<Vec<f64>> = (0..m)
            .map(|j| (0..m).map(|i| if i == j { s } else { 0.0 }).collect())
            .collect();
        let g = empirical_gram(&DesignMatrix::from_columns(&cols).unwrap());
        assert!((&g - DMatrix::identity(m, m)).abs().max() < 1e-15);
    }

    #[test]
    fn kappa_examples() {
        assert!((kappa(&DMatrix::identity(4, 4)).unwrap() - 1.0).abs() < 1e-14);
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 1.0]);
        assert!((kappa(&p).unwrap() - 0.7).abs() < 1e-14);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(kappa(&bad), Err(Error::DegenerateDictionary(_))));
    }

    #[test]
    fn kappa_matches_bisection_on_random_6x6() {
        let psi = oracles::random_psd(6, 17);
        let want = oracles::kappa_bisection(&psi);
        assert!((kappa(&psi).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn coherence_examples() {
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(coherence(&id, &[0, 2]).unwrap().rho_lambda, 0.0);
        let mut p = DMatrix::<f64>::identity(3, 3);
        p[(0, 1)] = 0.5;
        p[(1, 0)] = 0.5;
        assert_eq!(coherence(&p, &[0]).unwrap().rho_lambda, 0.5);
        assert_eq!(coherence(&p, &[]).unwrap().rho_lambda, 0.0);
        // strong correlation away from the support is ignored
        let mut q = DMatrix::<f64>::identity(3, 3);
        q[(1, 2)] = 0.99;
        q[(2, 1)] = 0.99;
        assert_eq!(coherence(&q, &[0]).unwrap().rho_lambda, 0.0);
        assert!(matches!(
            coherence(&DMatrix::zeros(0, 0), &[]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn eta_examples() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.1, 1.0]);
        let same = GramPair {
            psi_m: a.clone(),
            psi_nm: a.clone(),
        };
        assert_eq!(eta(&same).unwrap(), 0.0);
        let mut b = a.clone();
        b[(0, 1)] += 0.02;
        b[(1, 0)] += 0.02;
        let e = eta(&GramPair { psi_m: a, psi_nm: b }).unwrap();
        assert!((e - 0.02).abs() < 1e-15);
    }
}
