//! Design measures `μ` and the quadrature rules used for population integrals.

use rand::Rng;

use crate::dictionary::{Domain, Points, Table};
use crate::error::{Error, Result};

pub const DEFAULT_RESOLUTION: usize = 4096;
pub const MIN_RESOLUTION: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    /// Uniform on the dictionary's domain box.
    Uniform,
    /// Piecewise-linear (unnormalized) density on a one-dimensional grid,
    /// clamped outside the grid and normalized over the domain.
    Grid(Table),
}

/// Distribution of the design points together with the quadrature resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    density: Density,
    resolution: usize,
}

impl MeasureSpec {
    pub fn uniform() -> Self {
        Self {
            density: Density::Uniform,
            resolution: DEFAULT_RESOLUTION,
        }
    }

    pub fn grid(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&v| v.is_nan() || v <= 0.0) {
            return Err(Error::Config(
                "a grid density must be strictly positive (bounded away from zero)".into(),
            ));
        }
        Ok(Self {
            density: Density::Grid(Table::new(xs, values)?),
            resolution: DEFAULT_RESOLUTION,
        })
    }

    /// Loads a grid density from CSV with header `x,density`.
    pub fn load_grid_csv(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let mut tables = crate::io::read_tables_csv(path)?;
        if tables.len() != 1 {
            return Err(Error::Parse(format!(
                "density file must have exactly one value column, found {}",
                tables.len()
            )));
        }
        let t = tables.remove(0);
        Self::grid(t.xs().to_vec(), t.values().to_vec())
    }

    pub fn with_resolution(mut self, resolution: usize) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::Config(format!(
                "quadrature resolution must be at least {MIN_RESOLUTION}, got {resolution}"
            )));
        }
        self.resolution = resolution;
        Ok(self)
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    fn raw_density(&self, x: f64) -> f64 {
        match &self.density {
            Density::Uniform => 1.0,
            Density::Grid(t) => t.eval(x),
        }
    }

    /// Lebesgue density bounds `(μ_min, μ_max)` over the domain, after normalization.
    pub fn density_bounds(&self, domain: &Domain) -> Result<(f64, f64)> {
        match &self.density {
            Density::Uniform => {
                let vol: f64 = domain
                    .lower()
                    .iter()
                    .zip(domain.upper())
                    .map(|(lo, hi)| hi - lo)
                    .product();
                Ok((1.0 / vol, 1.0 / vol))
            }
            Density::Grid(t) => {
                let (lo, hi) = one_dim(domain)?;
                let mass = self.raw_mass(lo, hi);
                // piecewise linear: extremes sit at knots inside the domain or at its ends
                let candidates = t
                    .xs()
                    .iter()
                    .copied()
                    .filter(|&x| x > lo && x < hi)
                    .chain([lo, hi])
                    .map(|x| t.eval(x) / mass);
                let (mn, mx) = candidates.fold((f64::INFINITY, 0.0f64), |(a, b), v| {
                    (a.min(v), b.max(v))
                });
                Ok((mn, mx))
            }
        }
    }

    /// Exact integral of the raw piecewise-linear density over `[lo, hi]`.
    fn raw_mass(&self, lo: f64, hi: f64) -> f64 {
        let Density::Grid(t) = &self.density else {
            return hi - lo;
        };
        let mut knots: Vec<f64> = t.xs().iter().copied().filter(|&x| x > lo && x < hi).collect();
        knots.insert(0, lo);
        knots.push(hi);
        knots
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * (t.eval(w[0]) + t.eval(w[1])))
            .sum()
    }

    /// Composite trapezoid rule with `resolution` nodes over a one-dimensional
    /// domain, weighted by the normalized density (weights sum to one).
    pub fn quadrature(&self, domain: &Domain) -> Result<Quadrature> {
        let (lo, hi) = one_dim(domain)?;
        let g = self.resolution;
        let h = (hi - lo) / (g - 1) as f64;
        let nodes: Vec<f64> = (0..g)
            .map(|i| if i == g - 1 { hi } else { lo + i as f64 * h })
            .collect();
        let mut weights: Vec<f64> = nodes
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let end = if i == 0 || i == g - 1 { 0.5 } else { 1.0 };
                end * h * self.raw_density(x)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Numeric("density integrates to a non-positive value".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Quadrature { nodes, weights })
    }

    /// Draws `n` i.i.d. points from `μ` on the domain.
    pub fn sample<R: Rng + ?Sized>(&self, domain: &Domain, n: usize, rng: &mut R) -> Result<Points> {
        let d = domain.dim();
        match &self.density {
            Density::Uniform => {
                let mut coords = Vec::with_capacity(n * d);
                for _ in 0..n {
                    for (lo, hi) in domain.lower().iter().zip(domain.upper()) {
                        let u: f64 = rng.random();
                        coords.push(lo + (hi - lo) * u);
                    }
                }
                Points::new(d, coords)
            }
            Density::Grid(_) => {
                let (lo, hi) = one_dim(domain)?;
                let (_, mx) = self.density_bounds(domain)?;
                let mass = self.raw_mass(lo, hi);
                let peak = mx * mass;
                // rejection sampling under the constant envelope
                let mut xs = Vec::with_capacity(n);
                while xs.len() < n {
                    let u: f64 = rng.random();
                    let x = lo + (hi - lo) * u;
                    let v: f64 = rng.random();
                    if v * peak <= self.raw_density(x) {
                        xs.push(x);
                    }
                }
                Ok(Points::from_scalars(xs))
            }
        }
    }
}

fn one_dim(domain: &Domain) -> Result<(f64, f64)> {
    if domain.dim() != 1 {
        return Err(Error::Unsupported(format!(
            "quadrature is only available for one-dimensional domains, got d = {}",
            domain.dim()
        )));
    }
    Ok((domain.lower()[0], domain.upper()[0]))
}

/// Nodes and probability weights of a quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ g dμ` for `g` tabulated at the nodes.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.nodes)
            .map(|(w, &x)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn resolution_floor() {
        assert!(MeasureSpec::uniform().with_resolution(63).is_err());
        assert!(MeasureSpec::uniform().with_resolution(64).is_ok());
    }

    #[test]
    fn uniform_weights_sum_to_one() {
        let q = MeasureSpec::uniform().quadrature(&Domain::unit_cube(1)).unwrap();
        assert_eq!(q.len(), DEFAULT_RESOLUTION);
        assert!((q.weights().iter().sum::<f64>() - 1.0).abs() < 1e-14);
        // ∫ x² dx = 1/3; trapezoid error h²/6
        let h = 1.0 / (DEFAULT_RESOLUTION - 1) as f64;
        assert!((q.integrate_fn(|x| x * x) - 1.0 / 3.0).abs() <= h * h / 6.0 + 1e-15);
    }

    #[test]
    fn grid_density_bounds_and_sampling() {
        // density proportional to 1 + x on [0, 1]: normalized 2(1 + x)/3
        let m = MeasureSpec::grid(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        let (lo, hi) = m.density_bounds(&Domain::unit_cube(1)).unwrap();
        assert!((lo - 2.0 / 3.0).abs() < 1e-12);
        assert!((hi - 4.0 / 3.0).abs() < 1e-12);
        let q = m.quadrature(&Domain::unit_cube(1)).unwrap();
        // E[X] = ∫ x · 2(1 + x)/3 dx = 5/9
        assert!((q.integrate_fn(|x| x) - 5.0 / 9.0).abs() < 1e-7);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts = m.sample(&Domain::unit_cube(1), 200_000, &mut rng).unwrap();
        let mean = pts.as_slice().iter().sum::<f64>() / pts.len() as f64;
        assert!((mean - 5.0 / 9.0).abs() < 0.005);
    }

    #[test]
    fn grid_density_must_be_positive() {
        assert!(MeasureSpec::grid(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn quadrature_needs_one_dimension() {
        assert!(matches!(
            MeasureSpec::uniform().quadrature(&Domain::unit_cube(2)),
            Err(Error::Unsupported(_))
        ));
    }
}
