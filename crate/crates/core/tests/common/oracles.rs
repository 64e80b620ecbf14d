//! Reference computations that share no code with the library. Used by unit
//! tests (via `#[path]`) and by the integration tests.

use nalgebra::{Cholesky, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random PSD matrix `B Bᵀ` with rescaled rows, so diagonals are not all equal.
/// Every fourth seed produces a rank-deficient `B` (κ = 0 territory).
pub fn random_psd(m: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = if seed % 4 == 0 { (m / 2).max(1) } else { m + 3 };
    let b = DMatrix::from_fn(m, k, |_, _| rng.random_range(-1.0..1.0));
    let scale: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..3.0)).collect();
    let mut p = &b * b.transpose();
    for i in 0..m {
        for j in 0..m {
            p[(i, j)] *= scale[i] * scale[j];
        }
    }
    // exact symmetry
    (&p + p.transpose()) * 0.5
}

fn positive_definite(a: DMatrix<f64>) -> bool {
    Cholesky::new(a).is_some()
}

/// Largest κ ∈ [0, 1] with `Ψ − κ diag(Ψ)` positive definite, by bisection on
/// a Cholesky test. Returns 0 when `Ψ` itself is not positive definite.
pub fn kappa_bisection(psi: &DMatrix<f64>) -> f64 {
    let d = DMatrix::from_diagonal(&psi.diagonal());
    let shifted = |k: f64| psi - &d * k;
    if !positive_definite(shifted(0.0)) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if positive_definite(shifted(hi)) {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if positive_definite(shifted(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn fourier_direct(j: usize, x: f64) -> f64 {
    use std::f64::consts::PI;
    if j == 0 {
        return 1.0;
    }
    let k = ((j + 1) / 2) as f64;
    if j % 2 == 1 {
        2f64.sqrt() * (2.0 * PI * k * x).cos()
    } else {
        2f64.sqrt() * (2.0 * PI * k * x).sin()
    }
}

/// Midpoint-rule Gram of the first `m` Fourier functions under uniform μ.
pub fn midpoint_fourier_gram(m: usize, nodes: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(m, m);
    for t in 0..nodes {
        let x = (t as f64 + 0.5) / nodes as f64;
        let v: Vec<f64> = (0..m).map(|j| fourier_direct(j, x)).collect();
        for i in 0..m {
            for j in 0..m {
                g[(i, j)] += v[i] * v[j] / nodes as f64;
            }
        }
    }
    g
}

pub fn soft(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Columns (n rows each) orthonormalized so that `n⁻¹ XᵀX = I` (modified Gram–Schmidt).
pub fn orthonormalize(cols: &mut [Vec<f64>]) {
    let n = cols[0].len() as f64;
    for j in 0..cols.len() {
        for i in 0..j {
            let (a, b) = cols.split_at_mut(j);
            let dot: f64 = a[i].iter().zip(&b[0]).map(|(x, y)| x * y).sum::<f64>() / n;
            for (y, x) in b[0].iter_mut().zip(&a[i]) {
                *y -= dot * x;
            }
        }
        let norm = (cols[j].iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
}

/// `n⁻¹ Σ (y − Xλ)² + 2 Σ ω_j |λ_j|`, recomputed from scratch.
pub fn objective(cols: &[Vec<f64>], y: &[f64], omega: &[f64], lambda: &[f64]) -> f64 {
    let n = y.len();
    let mut rss = 0.0;
    for i in 0..n {
        let fit: f64 = cols.iter().zip(lambda).map(|(c, l)| c[i] * l).sum();
        rss += (y[i] - fit).powi(2);
    }
    rss / n as f64 + 2.0 * omega.iter().zip(lambda).map(|(w, l)| w * l.abs()).sum::<f64>()
}

/// Maximal subgradient violation at `λ` for the objective above (gradient halved).
pub fn kkt_violation(cols: &[Vec<f64>], y: &[f64], omega: &[f64], lambda: &[f64]) -> f64 {
    let n = y.len();
    let resid: Vec<f64> = (0..n)
        .map(|i| y[i] - cols.iter().zip(lambda).map(|(c, l)| c[i] * l).sum::<f64>())
        .collect();
    let mut worst: f64 = 0.0;
    for (j, c) in cols.iter().enumerate() {
        let g: f64 = c.iter().zip(&resid).map(|(a, b)| a * b).sum::<f64>() / n as f64;
        let v = if lambda[j] == 0.0 {
            (g.abs() - omega[j]).max(0.0)
        } else {
            (g - omega[j] * lambda[j].signum()).abs()
        };
        worst = worst.max(v);
    }
    worst
}

/// Exhaustive search over `λ ∈ [lo, hi]²` at the given step, for two columns.
/// The objective is a quadratic in `λ`, so each grid value is assembled from
/// precomputed moments. Returns `(λ, objective)` of the best grid point.
pub fn grid_search_2d(cols: &[Vec<f64>], y: &[f64], omega: &[f64], lo: f64, hi: f64, step: f64) -> ([f64; 2], f64) {
    let n = y.len() as f64;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / n;
    let (yy, y1, y2) = (dot(y, y), dot(y, &cols[0]), dot(y, &cols[1]));
    let (g11, g12, g22) = (dot(&cols[0], &cols[0]), dot(&cols[0], &cols[1]), dot(&cols[1], &cols[1]));
    let steps = ((hi - lo) / step).round() as i64;
    let mut best = ([0.0, 0.0], f64::INFINITY);
    for a in 0..=steps {
        let l1 = lo + a as f64 * step;
        let base = yy - 2.0 * l1 * y1 + l1 * l1 * g11 + 2.0 * omega[0] * l1.abs();
        for b in 0..=steps {
            let l2 = lo + b as f64 * step;
            let v = base - 2.0 * l2 * y2 + 2.0 * l1 * l2 * g12 + l2 * l2 * g22 + 2.0 * omega[1] * l2.abs();
            if v < best.1 {
                best = ([l1, l2], v);
            }
        }
    }
    best
}
