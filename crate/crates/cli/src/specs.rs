//! Shorthand grammars for dictionaries, measures and regression functions.
//!
//! Dictionaries: `fourier:<M>`, `coordinate:<d>`, `tabulated:<path>`.
//! Measures: `uniform`, `grid:<path>` (CSV `x,density`).
//! Truths: `fourier` or `linear` with `--theta j:v,...`, or `tabulated:<path>` (CSV `x,value`).

use l1agg::dictionary::{Dictionary, Domain};
use l1agg::experiments::config::parse_theta;
use l1agg::io::read_tables_csv;
use l1agg::measure::MeasureSpec;
use l1agg::truth::{TruthFunction, TruthClass, TruthSpec};
use l1agg::{Error, Result};

/// `lo:hi`, the interval every coordinate ranges over.
pub fn parse_interval(s: &str) -> Result<(f64, f64)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("interval must be lo:hi, got {s:?}")))?;
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad interval bound {v:?}")))
    };
    Ok((num(lo)?, num(hi)?))
}

pub fn dictionary(spec: &str, interval: (f64, f64)) -> Result<Dictionary> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("dictionary must be kind:arg, got {spec:?}")))?;
    let count = || {
        arg.trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad size in dictionary spec {spec:?}")))
    };
    let unit = interval == (0.0, 1.0);
    match kind {
        "fourier" => {
            if unit {
                Dictionary::fourier(count()?)
            } else {
                Dictionary::fourier_on(count()?, Domain::cube(1, interval.0, interval.1)?, true)
            }
        }
        "coordinate" => {
            let d = count()?;
            Dictionary::coordinate(d, d, Domain::cube(d, interval.0, interval.1)?)
        }
        "tabulated" => {
            let tables = read_tables_csv(arg)?;
            Dictionary::tabulated_on(tables, Domain::cube(1, interval.0, interval.1)?)
        }
        other => Err(Error::Parse(format!(
            "unknown dictionary kind {other:?} (expected fourier, coordinate or tabulated)"
        ))),
    }
}

pub fn measure(spec: &str, resolution: Option<usize>) -> Result<MeasureSpec> {
    let m = match spec.split_once(':') {
        None if spec == "uniform" => MeasureSpec::uniform(),
        Some(("grid", path)) => MeasureSpec::load_grid_csv(path)?,
        _ => {
            return Err(Error::Parse(format!(
                "measure must be uniform or grid:<path>, got {spec:?}"
            )))
        }
    };
    match resolution {
        Some(r) => m.with_resolution(r),
        None => Ok(m),
    }
}

pub fn truth(spec: &str, theta: Option<&str>, len: usize) -> Result<TruthSpec> {
    let dense = || -> Result<Vec<f64>> {
        let pairs = parse_theta(theta.ok_or_else(|| Error::Config(format!("truth {spec:?} needs --theta")))?)?;
        let top = pairs.iter().map(|(j, _)| *j).max().unwrap_or(0).max(len);
        let mut v = vec![0.0; top];
        for (j, x) in pairs {
            v[j - 1] = x;
        }
        Ok(v)
    };
    match spec.split_once(':') {
        None if spec == "fourier" => TruthSpec::fourier(dense()?),
        None if spec == "linear" => {
            let v = dense()?;
            if v.len() > len {
                return Err(Error::Shape(format!("linear truth has {} coefficients, dictionary has {len}", v.len())));
            }
            TruthSpec::linear(v)
        }
        Some(("tabulated", path)) => {
            let mut tables = read_tables_csv(path)?;
            if tables.len() != 1 {
                return Err(Error::Parse(format!("truth table {path:?} must have exactly one value column")));
            }
            TruthSpec::new(TruthFunction::Tabulated(tables.remove(0)), TruthClass::None)
        }
        _ => Err(Error::Parse(format!(
            "truth must be fourier, linear or tabulated:<path>, got {spec:?}"
        ))),
    }
}

/// One-based comma-separated indices.
pub fn support(s: &str, m: usize) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let j: usize = t.parse().map_err(|_| Error::Parse(format!("bad support index {t:?}")))?;
            if j == 0 || j > m {
                return Err(Error::Config(format!("support index {j} outside 1..={m}")));
            }
            Ok(j - 1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dictionary_shorthand() {
        assert_eq!(dictionary("fourier:5", (0.0, 1.0)).unwrap().len(), 5);
        assert_eq!(dictionary("coordinate:3", (-1.0, 1.0)).unwrap().dim(), 3);
        assert!(dictionary("wavelet:4", (0.0, 1.0)).is_err());
        assert!(dictionary("fourier", (0.0, 1.0)).is_err());
    }

    #[test]
    fn supports_are_one_based() {
        assert_eq!(support("1, 3", 4).unwrap(), vec![0, 2]);
        assert!(support("0", 4).is_err());
        assert!(support("5", 4).is_err());
    }

    #[test]
    fn truth_shorthand() {
        let t = truth("fourier", Some("2:3,4:-2"), 5).unwrap();
        assert_eq!(t.theta().unwrap(), &[0.0, 3.0, 0.0, -2.0, 0.0]);
        assert!(truth("linear", Some("4:1"), 3).is_err());
        assert!(truth("fourier", None, 3).is_err());
    }
}
