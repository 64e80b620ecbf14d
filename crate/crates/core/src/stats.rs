//! Small statistics helpers: order statistics, least-squares slopes, binomial limits.

use statrs::distribution::{Binomial, DiscreteCDF};

use crate::error::{Error, Result};

/// Median of finite values (mean of the two middle values for even counts).
pub fn median(values: &[f64]) -> Option<f64> {
    quantile(values, 0.5)
}

/// Linear-interpolation quantile (`(len − 1)·p` position), `p ∈ [0, 1]`.
pub fn quantile(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&p) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = p * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(v[lo] + (pos - lo as f64) * (v[hi] - v[lo]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; zero for an exact line.
    pub stderr: f64,
    pub points: usize,
}

pub const MIN_SLOPE_POINTS: usize = 4;

/// Ordinary least squares `y ≈ intercept + slope · x`.
pub fn rate_slope(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() {
        return Err(Error::Shape(format!("{} x values, {} y values", xs.len(), ys.len())));
    }
    let k = xs.len();
    if k < MIN_SLOPE_POINTS {
        return Err(Error::Config(format!(
            "slope fit needs at least {MIN_SLOPE_POINTS} points, got {k}"
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Numeric("slope fit inputs must be finite".into()));
    }
    let kf = k as f64;
    let mx = xs.iter().sum::<f64>() / kf;
    let my = ys.iter().sum::<f64>() / kf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 1e-12 * (1.0 + mx * mx) * kf) {
        return Err(Error::Numeric("x values have no spread".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (sse / (kf - 2.0) / sxx).sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        stderr,
        points: k,
    })
}

/// Smallest `c` with `P(Bin(trials, p) ≤ c) ≥ level`: the one-sided upper
/// confidence limit for a count when the true rate is `p`.
pub fn binomial_upper(trials: u64, p: f64, level: f64) -> Result<u64> {
    if !(0.0..=1.0).contains(&p) || !(0.0 < level && level < 1.0) {
        return Err(Error::Config(format!("invalid binomial parameters p = {p}, level = {level}")));
    }
    let dist = Binomial::new(p, trials).map_err(|e| Error::Numeric(e.to_string()))?;
    // explicit scan keeps the definition unambiguous at tiny p
    let mut c = 0;
    while c < trials && dist.cdf(c) < level {
        c += 1;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians_and_quantiles() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
        assert_eq!(quantile(&[0.0, 10.0], 0.95), Some(9.5));
    }

    #[test]
    fn slope_examples() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x| -x).collect();
        let f = rate_slope(&xs, &ys).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-14);
        assert!(f.stderr < 1e-12);
        let f = rate_slope(&xs, &[2.0; 5]).unwrap();
        assert_eq!(f.slope, 0.0);
        assert!(matches!(rate_slope(&[1.0; 4], &[1.0, 2.0, 3.0, 4.0]), Err(Error::Numeric(_))));
        assert!(matches!(rate_slope(&xs[..3], &ys[..3]), Err(Error::Config(_))));
    }

    #[test]
    fn binomial_limits() {
        assert_eq!(binomial_upper(500, 0.0, 0.95).unwrap(), 0);
        assert_eq!(binomial_upper(500, 1e-70, 0.95).unwrap(), 0);
        // Bin(100, 0.1): P(X ≤ 14) ≈ 0.927, P(X ≤ 15) ≈ 0.960
        assert_eq!(binomial_upper(100, 0.1, 0.95).unwrap(), 15);
        assert_eq!(binomial_upper(10, 1.0, 0.95).unwrap(), 10);
    }
}
