//! Population (`L₂(μ)`) quantities of a dictionary: the Gram matrix `Ψ_M`, norms,
//! fourth moments and sup-norms.
//!
//! One-dimensional dictionaries are integrated by quadrature. Coordinate
//! dictionaries on boxes of any dimension under the uniform measure use the
//! closed-form moments of the uniform distribution instead, since a tensor grid
//! is out of reach beyond a few dimensions.

use nalgebra::DMatrix;

use crate::dictionary::{Dictionary, DictionaryKind, DesignMatrix, Domain, Points};
use crate::error::{Error, Result};
use crate::measure::{Density, MeasureSpec, Quadrature};
use crate::truth::TruthSpec;

/// Points on the dense grid used for sup-norm estimates in one dimension.
pub const SUP_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone)]
pub enum Population {
    Quadrature {
        quadrature: Quadrature,
        /// Dictionary evaluated at the quadrature nodes.
        basis: DesignMatrix,
    },
    /// Per-axis moments `E x`, `E x²`, `E x⁴` of the uniform distribution on a box.
    UniformBox {
        mean: Vec<f64>,
        second: Vec<f64>,
        fourth: Vec<f64>,
        sup: Vec<f64>,
    },
}

fn uniform_moment(lo: f64, hi: f64, p: i32) -> f64 {
    (hi.powi(p + 1) - lo.powi(p + 1)) / ((p + 1) as f64 * (hi - lo))
}

impl Population {
    pub fn new(dict: &Dictionary, measure: &MeasureSpec) -> Result<Self> {
        let domain = dict.domain();
        if dict.dim() == 1 {
            let quadrature = measure.quadrature(domain)?;
            let basis = dict.evaluate(&Points::from_scalars(quadrature.nodes().to_vec()))?;
            return Ok(Self::Quadrature { quadrature, basis });
        }
        match (dict.kind(), measure.density()) {
            (DictionaryKind::Coordinate, Density::Uniform) => {
                let m = dict.len();
                let axes = domain.lower().iter().zip(domain.upper()).take(m);
                let (mut mean, mut second, mut fourth, mut sup) =
                    (Vec::new(), Vec::new(), Vec::new(), Vec::new());
                for (&lo, &hi) in axes {
                    mean.push(uniform_moment(lo, hi, 1));
                    second.push(uniform_moment(lo, hi, 2));
                    fourth.push(uniform_moment(lo, hi, 4));
                    sup.push(lo.abs().max(hi.abs()));
                }
                Ok(Self::UniformBox {
                    mean,
                    second,
                    fourth,
                    sup,
                })
            }
            _ => Err(Error::Unsupported(format!(
                "population integrals for a {:?} dictionary in dimension {}",
                dict.kind(),
                dict.dim()
            ))),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Quadrature { basis, .. } => basis.ncols(),
            Self::UniformBox { mean, .. } => mean.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Ψ_M(i, j) = ∫ f_i f_j dμ`, symmetric by construction.
    pub fn gram(&self) -> DMatrix<f64> {
        let m = self.len();
        let mut psi = DMatrix::zeros(m, m);
        match self {
            Self::Quadrature { quadrature, basis } => {
                let w = quadrature.weights();
                for i in 0..m {
                    let ci = basis.column(i);
                    for j in i..m {
                        let cj = basis.column(j);
                        let v: f64 = w
                            .iter()
                            .zip(ci.iter().zip(cj))
                            .map(|(w, (a, b))| w * a * b)
                            .sum();
                        psi[(i, j)] = v;
                        psi[(j, i)] = v;
                    }
                }
            }
            Self::UniformBox { mean, second, .. } => {
                for i in 0..m {
                    for j in 0..m {
                        psi[(i, j)] = if i == j { second[i] } else { mean[i] * mean[j] };
                    }
                }
            }
        }
        psi
    }

    /// Population norms `‖f_j‖`.
    pub fn norms(&self) -> Vec<f64> {
        match self {
            Self::Quadrature { quadrature, basis } => (0..basis.ncols())
                .map(|j| {
                    let c = basis.column(j);
                    quadrature
                        .weights()
                        .iter()
                        .zip(c)
                        .map(|(w, v)| w * v * v)
                        .sum::<f64>()
                        .sqrt()
                })
                .collect(),
            Self::UniformBox { second, .. } => second.iter().map(|s| s.sqrt()).collect(),
        }
    }

    /// `L₀ = max_{i,j} E[f_i²(X) f_j²(X)]`.
    pub fn fourth_moment(&self) -> f64 {
        let m = self.len();
        let mut best: f64 = 0.0;
        match self {
            Self::Quadrature { quadrature, basis } => {
                let w = quadrature.weights();
                for i in 0..m {
                    for j in i..m {
                        let v: f64 = w
                            .iter()
                            .zip(basis.column(i).iter().zip(basis.column(j)))
                            .map(|(w, (a, b))| w * a * a * b * b)
                            .sum();
                        best = best.max(v);
                    }
                }
            }
            Self::UniformBox { second, fourth, .. } => {
                for i in 0..m {
                    for j in 0..m {
                        let v = if i == j { fourth[i] } else { second[i] * second[j] };
                        best = best.max(v);
                    }
                }
            }
        }
        best
    }

    /// `max_j ‖f_j‖_∞` and the number of grid points behind the estimate
    /// (`None` when exact). Grid estimates are lower bounds; they include the
    /// quadrature nodes and, for tabulated functions, every knot.
    pub fn sup_norm(&self, dict: &Dictionary) -> Result<(f64, Option<usize>)> {
        match self {
            Self::UniformBox { sup, .. } => Ok((sup.iter().copied().fold(0.0, f64::max), None)),
            Self::Quadrature { basis, .. } => {
                let mut best = (0..basis.ncols())
                    .flat_map(|j| basis.column(j).iter())
                    .fold(0.0f64, |a, v| a.max(v.abs()));
                let grid = sup_grid(dict.domain(), dict);
                let mut row = vec![0.0; dict.len()];
                for &x in &grid {
                    dict.eval_into(&[x], &mut row);
                    best = row.iter().fold(best, |a, v| a.max(v.abs()));
                }
                Ok((best, Some(grid.len() + basis.nrows())))
            }
        }
    }
}

/// Dense one-dimensional grid over the domain, plus table knots for tabulated kinds.
pub(crate) fn sup_grid(domain: &Domain, dict: &Dictionary) -> Vec<f64> {
    let (lo, hi) = (domain.lower()[0], domain.upper()[0]);
    let step = (hi - lo) / (SUP_GRID_POINTS - 1) as f64;
    let mut grid: Vec<f64> = (0..SUP_GRID_POINTS)
        .map(|i| if i == SUP_GRID_POINTS - 1 { hi } else { lo + i as f64 * step })
        .collect();
    for t in dict.tables() {
        grid.extend(t.xs().iter().copied().filter(|&x| x >= lo && x <= hi));
    }
    grid
}

/// A dictionary paired with a regression function: everything needed to
/// evaluate `‖f_λ − f‖²` and to project `f` onto subsets of the dictionary.
#[derive(Debug, Clone)]
pub struct Approximation {
    psi: DMatrix<f64>,
    cross: Vec<f64>,
    truth_norm2: f64,
    repr: Repr,
}

#[derive(Debug, Clone)]
enum Repr {
    Grid {
        weights: Vec<f64>,
        basis: DesignMatrix,
        truth: Vec<f64>,
    },
    Coefficients(Vec<f64>),
}

impl Approximation {
    pub fn new(dict: &Dictionary, measure: &MeasureSpec, truth: &TruthSpec) -> Result<Self> {
        let population = Population::new(dict, measure)?;
        Self::from_population(&population, dict, truth)
    }

    pub fn from_population(
        population: &Population,
        dict: &Dictionary,
        truth: &TruthSpec,
    ) -> Result<Self> {
        let psi = population.gram();
        match population {
            Population::Quadrature { quadrature, basis } => {
                let values: Vec<f64> = quadrature
                    .nodes()
                    .iter()
                    .map(|&x| truth.eval(&[x]))
                    .collect();
                let w = quadrature.weights();
                let cross = (0..basis.ncols())
                    .map(|j| {
                        w.iter()
                            .zip(basis.column(j).iter().zip(&values))
                            .map(|(w, (a, b))| w * a * b)
                            .sum()
                    })
                    .collect();
                let truth_norm2 = w.iter().zip(&values).map(|(w, v)| w * v * v).sum();
                Ok(Self {
                    psi,
                    cross,
                    truth_norm2,
                    repr: Repr::Grid {
                        weights: w.to_vec(),
                        basis: basis.clone(),
                        truth: values,
                    },
                })
            }
            Population::UniformBox { .. } => {
                let coef = truth.linear_coefficients().ok_or_else(|| {
                    Error::Unsupported(
                        "only linear regression functions can be integrated against a \
                         multi-dimensional coordinate dictionary"
                            .into(),
                    )
                })?;
                if coef.len() > dict.len() {
                    return Err(Error::Shape(format!(
                        "linear truth has {} coefficients, dictionary has {}",
                        coef.len(),
                        dict.len()
                    )));
                }
                let mut full = coef.to_vec();
                full.resize(dict.len(), 0.0);
                let v = nalgebra::DVector::from_column_slice(&full);
                let cross_v = &psi * &v;
                let truth_norm2 = v.dot(&cross_v);
                Ok(Self {
                    cross: cross_v.iter().copied().collect(),
                    psi,
                    truth_norm2,
                    repr: Repr::Coefficients(full),
                })
            }
        }
    }

    pub fn len(&self) -> usize {
        self.cross.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cross.is_empty()
    }

    pub fn psi(&self) -> &DMatrix<f64> {
        &self.psi
    }

    /// `⟨f_j, f⟩` for every `j`.
    pub fn cross(&self) -> &[f64] {
        &self.cross
    }

    /// `‖f‖²`.
    pub fn truth_norm2(&self) -> f64 {
        self.truth_norm2
    }

    /// `‖f_λ − f‖²`, evaluated pointwise on the quadrature grid (or as
    /// `(λ − λ_f)ᵀ Ψ (λ − λ_f)` for linear truths) to avoid cancellation.
    pub fn distance2(&self, lambda: &[f64]) -> f64 {
        match &self.repr {
            Repr::Grid {
                weights,
                basis,
                truth,
            } => {
                let fitted = basis.combine(lambda);
                weights
                    .iter()
                    .zip(fitted.iter().zip(truth))
                    .map(|(w, (a, b))| w * (a - b) * (a - b))
                    .sum()
            }
            Repr::Coefficients(coef) => {
                let delta: Vec<f64> = lambda.iter().zip(coef).map(|(a, b)| a - b).collect();
                quadratic_form(&self.psi, &delta)
            }
        }
    }
}

pub(crate) fn quadratic_form(psi: &DMatrix<f64>, v: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..v.len() {
        if v[i] == 0.0 {
            continue;
        }
        for j in 0..v.len() {
            total += v[i] * psi[(i, j)] * v[j];
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_box_moments() {
        let dom = Domain::cube(3, -1.0, 1.0).unwrap();
        let d = Dictionary::coordinate(3, 3, dom).unwrap();
        let p = Population::new(&d, &MeasureSpec::uniform()).unwrap();
        let g = p.gram();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 / 3.0 } else { 0.0 };
                assert!((g[(i, j)] - want).abs() < 1e-15);
            }
        }
        assert!((p.fourth_moment() - 0.2).abs() < 1e-15);
        assert_eq!(p.sup_norm(&d).unwrap(), (1.0, None));
    }

    #[test]
    fn unit_cube_coordinates_are_correlated() {
        let d = Dictionary::coordinate(2, 2, Domain::unit_cube(2)).unwrap();
        let g = Population::new(&d, &MeasureSpec::uniform()).unwrap().gram();
        assert!((g[(0, 0)] - 1.0 / 3.0).abs() < 1e-15);
        assert!((g[(0, 1)] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn one_dim_coordinate_uses_quadrature() {
        let t = crate::dictionary::Table::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let u = crate::dictionary::Table::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let d = Dictionary::tabulated(vec![t, u]).unwrap();
        let g = Population::new(&d, &MeasureSpec::uniform()).unwrap().gram();
        assert!((g[(0, 1)] - 0.5).abs() < 1e-12);
        assert!((g[(1, 1)] - 1.0 / 3.0).abs() < 1e-7);
    }
}
