//! Per-sample indicators of the good events `E₁`, `E₂`, `E₃(λ)`.

use crate::dictionary::{empirical_norms, DesignMatrix};
use crate::error::{Error, Result};

/// What one simulated sample exposes to the event checks.
#[derive(Debug, Clone, Copy)]
pub struct EventInputs<'a> {
    pub design: &'a DesignMatrix,
    /// `W_i`; absent for observed data.
    pub noise: Option<&'a [f64]>,
    /// `f(X_i)`; absent for observed data.
    pub truth_values: Option<&'a [f64]>,
    /// `ω_j`.
    pub weights: &'a [f64],
    /// Population norms `‖f_j‖`.
    pub population_norms: &'a [f64],
    /// Reference vector `λ` for `E₃(λ)`.
    pub lambda: &'a [f64],
    /// `‖f_λ − f‖²`.
    pub dist2: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventFlags {
    /// `2 |V_j| ≤ ω_j` for all `j`, with `V_j = n⁻¹ Σ_i f_j(X_i) W_i`.
    pub e1: bool,
    /// `½‖f_j‖² ≤ ‖f_j‖_n² ≤ 2‖f_j‖²` for all `j`.
    pub e2: bool,
    /// `‖f_λ − f‖_n² ≤ 2‖f_λ − f‖² + r² M(λ)`.
    pub e3: bool,
}

pub fn event_flags(inp: &EventInputs<'_>) -> Result<EventFlags> {
    let (noise, truth) = match (inp.noise, inp.truth_values) {
        (Some(w), Some(f)) => (w, f),
        _ => {
            return Err(Error::Unsupported(
                "event diagnostics need the simulated noise and truth values".into(),
            ))
        }
    };
    let (n, m) = (inp.design.nrows(), inp.design.ncols());
    for (what, len, want) in [
        ("noise", noise.len(), n),
        ("truth values", truth.len(), n),
        ("weights", inp.weights.len(), m),
        ("population norms", inp.population_norms.len(), m),
        ("lambda", inp.lambda.len(), m),
    ] {
        if len != want {
            return Err(Error::Shape(format!("{what} has length {len}, expected {want}")));
        }
    }
    let nf = n as f64;

    let e1 = (0..m).all(|j| {
        let v = inp.design.column(j).iter().zip(noise).map(|(a, b)| a * b).sum::<f64>() / nf;
        2.0 * v.abs() <= inp.weights[j]
    });

    let e2 = empirical_norms(inp.design)
        .iter()
        .zip(inp.population_norms)
        .all(|(e, p)| {
            let (e2, p2) = (e * e, p * p);
            0.5 * p2 <= e2 && e2 <= 2.0 * p2
        });

    let fitted = inp.design.combine(inp.lambda);
    let emp = fitted
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / nf;
    let m_lambda = inp.lambda.iter().filter(|&&l| l != 0.0).count() as f64;
    let e3 = emp <= 2.0 * inp.dist2 + inp.rate * inp.rate * m_lambda;

    Ok(EventFlags { e1, e2, e3 })
}

/// Monte Carlo frequencies of the events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventFrequencies {
    pub replicates: usize,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e1_and_e2: f64,
}

pub fn frequencies(flags: &[EventFlags]) -> EventFrequencies {
    let n = flags.len().max(1) as f64;
    let freq = |p: &dyn Fn(&EventFlags) -> bool| flags.iter().filter(|f| p(f)).count() as f64 / n;
    EventFrequencies {
        replicates: flags.len(),
        e1: freq(&|f| f.e1),
        e2: freq(&|f| f.e2),
        e3: freq(&|f| f.e3),
        e1_and_e2: freq(&|f| f.e1 && f.e2),
    }
}
