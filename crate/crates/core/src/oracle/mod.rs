//! Oracle objects: sparsity of coefficient vectors, the best `k`-term
//! approximation `λ*(k)`, the oracle dimension `k*`, and set memberships.

pub mod bounds;
pub mod events;

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::dictionary::{Dictionary, DictionaryKind};
use crate::error::{Error, Result};
use crate::gram::coherence;
use crate::population::{sup_grid, Approximation};
use crate::truth::{linear_sup, TruthSpec};

/// Largest number of supports searched exhaustively.
pub const EXHAUSTIVE_LIMIT: u128 = 100_000;

/// Coherence threshold for `Λ₁` and `Λ₂`.
pub const COHERENCE_LIMIT: f64 = 1.0 / 45.0;

/// `(J(λ), M(λ))`: indices with `|λ_j| > eps`.
pub fn sparsity(lambda: &[f64], eps: f64) -> (Vec<usize>, usize) {
    let support: Vec<usize> = (0..lambda.len()).filter(|&j| lambda[j].abs() > eps).collect();
    let m = support.len();
    (support, m)
}

/// Keeps the `k` largest `|θ_j|` among the first `m` coefficients (ties go to
/// the smaller index) and zeroes the rest.
pub fn oracle_fourier(truth: &TruthSpec, m: usize, k: usize) -> Result<Vec<f64>> {
    let theta = truth
        .theta()
        .ok_or_else(|| Error::Unsupported("closed-form oracle needs a Fourier-series truth".into()))?;
    top_k(theta, m, k)
}

pub(crate) fn top_k(theta: &[f64], m: usize, k: usize) -> Result<Vec<f64>> {
    if k > m {
        return Err(Error::Config(format!("k = {k} exceeds M = {m}")));
    }
    let coef = |j: usize| theta.get(j).copied().unwrap_or(0.0);
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| {
        coef(b)
            .abs()
            .partial_cmp(&coef(a).abs())
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut out = vec![0.0; m];
    for &j in &idx[..k] {
        out[j] = coef(j);
    }
    Ok(out)
}

/// Best approximation found on one support size.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportFit {
    pub lambda: Vec<f64>,
    pub support: Vec<usize>,
    /// `‖f_λ − f‖²`.
    pub residual2: f64,
    /// Exhaustive search (true) or greedy forward selection (false).
    pub exact: bool,
    /// A restricted Gram was singular and a pseudo-inverse was used.
    pub pseudo_solved: bool,
}

fn binomial(m: usize, k: usize) -> u128 {
    let k = k.min(m - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.saturating_mul((m - i) as u128) / (i as u128 + 1);
        if c > u128::MAX / 1024 {
            return u128::MAX;
        }
    }
    c
}

/// Restricted least squares in the population inner product: coefficients on
/// `support` and the criterion `‖f‖² − g_Sᵀ λ_S` (equal to `‖f_λ − f‖²`).
fn restricted_ls(approx: &Approximation, support: &[usize]) -> (Vec<f64>, f64, bool) {
    let k = support.len();
    if k == 0 {
        return (Vec::new(), approx.truth_norm2(), false);
    }
    let psi = approx.psi();
    let a = DMatrix::from_fn(k, k, |i, j| psi[(support[i], support[j])]);
    let g = DVector::from_iterator(k, support.iter().map(|&j| approx.cross()[j]));
    let (sol, pseudo) = match a.clone().cholesky() {
        Some(ch) => (ch.solve(&g), false),
        None => {
            let svd = a.svd(true, true);
            let sol = svd
                .solve(&g, 1e-12 * svd.singular_values.max())
                .unwrap_or_else(|_| DVector::zeros(k));
            (sol, true)
        }
    };
    let value = approx.truth_norm2() - g.dot(&sol);
    (sol.iter().copied().collect(), value, pseudo)
}

fn better(a: &(f64, Vec<usize>), b: &(f64, Vec<usize>)) -> bool {
    match a.0.partial_cmp(&b.0) {
        Some(Ordering::Less) => true,
        Some(Ordering::Greater) => false,
        _ => a.1 < b.1,
    }
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance to the next lexicographic combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < m - k + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for t in i + 1..k {
            cur[t] = cur[t - 1] + 1;
        }
    }
}

fn finish(approx: &Approximation, support: Vec<usize>, exact: bool) -> SupportFit {
    let (coef, _, pseudo) = restricted_ls(approx, &support);
    let mut lambda = vec![0.0; approx.len()];
    for (&j, c) in support.iter().zip(coef) {
        lambda[j] = c;
    }
    SupportFit {
        residual2: approx.distance2(&lambda).max(0.0),
        lambda,
        support,
        exact,
        pseudo_solved: pseudo,
    }
}

/// `λ*(k)` for an arbitrary dictionary: exhaustive over supports of size `k`
/// when there are at most [`EXHAUSTIVE_LIMIT`] of them, greedy otherwise.
pub fn oracle_general(approx: &Approximation, k: usize) -> Result<SupportFit> {
    let m = approx.len();
    if k > m {
        return Err(Error::Config(format!("k = {k} exceeds M = {m}")));
    }
    if binomial(m, k) <= EXHAUSTIVE_LIMIT {
        Ok(exhaustive(approx, k))
    } else {
        Ok(greedy(approx, k))
    }
}

pub fn exhaustive(approx: &Approximation, k: usize) -> SupportFit {
    let best = combinations(approx.len(), k)
        .into_par_iter()
        .map(|s| (restricted_ls(approx, &s).1, s))
        .reduce_with(|a, b| if better(&b, &a) { b } else { a })
        .expect("at least one support");
    finish(approx, best.1, true)
}

pub fn greedy(approx: &Approximation, k: usize) -> SupportFit {
    let mut support: Vec<usize> = Vec::new();
    for _ in 0..k {
        let mut best: Option<(f64, Vec<usize>)> = None;
        for j in (0..approx.len()).filter(|j| !support.contains(j)) {
            let mut s = support.clone();
            s.push(j);
            s.sort_unstable();
            let cand = (restricted_ls(approx, &s).1, s);
            if best.as_ref().is_none_or(|b| better(&cand, b)) {
                best = Some(cand);
            }
        }
        support = best.expect("k <= M").1;
    }
    finish(approx, support, false)
}

/// `λ*(k)` for an orthonormal Fourier dictionary, via the closed form.
pub fn oracle_fourier_fit(approx: &Approximation, truth: &TruthSpec, k: usize) -> Result<SupportFit> {
    let lambda = oracle_fourier(truth, approx.len(), k)?;
    let (support, _) = sparsity(&lambda, 0.0);
    Ok(SupportFit {
        residual2: approx.distance2(&lambda).max(0.0),
        lambda,
        support,
        exact: true,
        pseudo_solved: false,
    })
}

/// Membership flags for `Λ`, `Λ′`, `Λ₁`, `Λ₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Memberships {
    pub lambda: bool,
    pub lambda_prime: bool,
    pub coherence: bool,
    pub lambda1: bool,
    pub lambda2: bool,
}

pub fn membership(dist2: f64, m_lambda: usize, rho_lambda: f64, r: f64, c_f: f64, c_f_prime: f64) -> Memberships {
    let m = m_lambda as f64;
    let in_lambda = dist2 <= c_f * r * r * m;
    let in_prime = dist2 <= c_f_prime * r;
    let coherence = rho_lambda * m <= COHERENCE_LIMIT;
    Memberships {
        lambda: in_lambda,
        lambda_prime: in_prime,
        coherence,
        lambda1: in_lambda && coherence,
        lambda2: in_prime && coherence,
    }
}

/// `L(λ) = ‖f − f_λ‖_∞`: exact for linear truths on a coordinate dictionary,
/// a dense-grid estimate in one dimension.
pub fn sup_residual(dict: &Dictionary, truth: &TruthSpec, lambda: &[f64]) -> Result<f64> {
    if dict.kind() == DictionaryKind::Coordinate {
        if let Some(coef) = truth.linear_coefficients() {
            let delta: Vec<f64> = (0..dict.len())
                .map(|j| coef.get(j).copied().unwrap_or(0.0) - lambda[j])
                .collect();
            let beyond = coef.iter().skip(dict.len()).any(|&c| c != 0.0);
            if !beyond {
                return Ok(linear_sup(&delta, dict.domain()));
            }
        }
    }
    if dict.dim() != 1 {
        return Err(Error::Unsupported(
            "sup-norm of the approximation error needs a one-dimensional dictionary or a linear truth".into(),
        ));
    }
    let grid = sup_grid(dict.domain(), dict);
    let mut row = vec![0.0; dict.len()];
    let mut best: f64 = 0.0;
    for &x in &grid {
        dict.eval_into(&[x], &mut row);
        let fl: f64 = row.iter().zip(lambda).map(|(a, b)| a * b).sum();
        best = best.max((truth.eval(&[x]) - fl).abs());
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub lambda_star: Vec<f64>,
    pub support: Vec<usize>,
    /// `None` when no `k ≤ M` reaches the oracle inequality (`Λ` empty).
    pub k_star: Option<usize>,
    pub dist2: f64,
    pub l_lambda: f64,
    pub rate: f64,
    pub c_f: f64,
    pub c_f_prime: f64,
    pub rho_lambda: f64,
    pub memberships: Memberships,
    pub exact: bool,
}

/// Scans `k = 0, 1, …, M` for the smallest `k` with
/// `‖f_{λ*(k)} − f‖² ≤ C_f r² k`. Orthonormal Fourier dictionaries with a
/// Fourier-series truth use the closed form; others use [`oracle_general`].
/// When no `k` qualifies, the report carries `λ*(M)` with `k_star = None`.
pub fn oracle_report(
    dict: &Dictionary,
    approx: &Approximation,
    truth: &TruthSpec,
    r: f64,
    c_f: f64,
    c_f_prime: f64,
) -> Result<OracleReport> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Config(format!("rate must be positive, got {r}")));
    }
    let closed_form = dict.kind() == DictionaryKind::Fourier
        && truth.theta().is_some()
        && dict.domain().is_unit_cube();
    let solve = |k: usize| {
        if closed_form {
            oracle_fourier_fit(approx, truth, k)
        } else {
            oracle_general(approx, k)
        }
    };
    let m = dict.len();
    let mut chosen = None;
    let mut last = None;
    for k in 0..=m {
        let fit = solve(k)?;
        if fit.residual2 <= c_f * r * r * k as f64 {
            chosen = Some((k, fit));
            break;
        }
        last = Some(fit);
    }
    let (k_star, fit) = match chosen {
        Some((k, f)) => (Some(k), f),
        None => (None, last.expect("M >= 2")),
    };
    let rho_lambda = coherence(approx.psi(), &fit.support)?.rho_lambda;
    let l_lambda = sup_residual(dict, truth, &fit.lambda)?;
    let memberships = membership(fit.residual2, fit.support.len(), rho_lambda, r, c_f, c_f_prime);
    Ok(OracleReport {
        k_star,
        dist2: fit.residual2,
        l_lambda,
        rate: r,
        c_f,
        c_f_prime,
        rho_lambda,
        memberships,
        exact: fit.exact,
        support: fit.support,
        lambda_star: fit.lambda,
    })
}
