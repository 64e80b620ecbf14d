//! Function dictionaries `f_1, …, f_M` and their evaluation on design points.
//!
//! Three families are supported:
//!
//! * **Fourier**: `f_1 ≡ 1`, `f_{2k}(x) = √2 cos(2πkx)`, `f_{2k+1}(x) = √2 sin(2πkx)` on `[0, 1]`.
//! * **Coordinate**: `f_j(x) = x_j`, the linear-regression design.
//! * **Tabulated**: arbitrary one-dimensional functions given as `(x, f(x))` tables,
//!   completed by linear interpolation and clamped outside the table range.
//!
//! Indices are zero-based throughout the crate: column `j` holds `f_{j+1}`.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use crate::error::{Error, Result};
use crate::measure::MeasureSpec;
use crate::population::Population;

/// Axis-aligned box `∏ [lower_k, upper_k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Shape(format!(
                "domain bounds have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        for (k, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!(
                    "domain axis {k} must satisfy finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn unit_cube(d: usize) -> Self {
        Self {
            lower: vec![0.0; d],
            upper: vec![1.0; d],
        }
    }

    /// `[lo, hi]^d`.
    pub fn cube(d: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; d], vec![hi; d])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_unit_cube(&self) -> bool {
        self.lower.iter().all(|&v| v == 0.0) && self.upper.iter().all(|&v| v == 1.0)
    }
}

/// Row-major collection of points in `ℝ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    dim: usize,
    coords: Vec<f64>,
}

impl Points {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::Shape(format!(
                "{} coordinates cannot be split into points of dimension {dim}",
                coords.len()
            )));
        }
        Ok(Self { dim, coords })
    }

    /// One-dimensional points.
    pub fn from_scalars(xs: Vec<f64>) -> Self {
        Self { dim: 1, coords: xs }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(1);
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Shape(format!(
                    "row {i} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }
}

/// A tabulated function: strictly increasing abscissae with at least two knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl Table {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::Shape(format!(
                "table has {} abscissae but {} values",
                xs.len(),
                values.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidDictionary(
                "a tabulated function needs at least two grid points".into(),
            ));
        }
        if xs.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDictionary("table contains non-finite values".into()));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDictionary(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        Ok(Self { xs, values })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Linear interpolation, clamped to the end values outside the grid.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.values[0];
        }
        if x >= self.xs[n - 1] {
            return self.values[n - 1];
        }
        // first knot strictly greater than x
        let hi = self.xs.partition_point(|&k| k <= x);
        let lo = hi - 1;
        let t = (x - self.xs[lo]) / (self.xs[hi] - self.xs[lo]);
        self.values[lo] + t * (self.values[hi] - self.values[lo])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictionaryKind {
    Fourier,
    Coordinate,
    Tabulated,
}

/// An ordered, immutable family of `M ≥ 2` real functions on a box domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    kind: DictionaryKind,
    m: usize,
    d: usize,
    domain: Domain,
    tables: Vec<Table>,
}

fn check_size(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidDictionary(format!(
            "a dictionary needs at least two functions, got {m}"
        )));
    }
    Ok(())
}

impl Dictionary {
    /// The first `m` functions of the trigonometric basis on `[0, 1]`.
    pub fn fourier(m: usize) -> Result<Self> {
        check_size(m)?;
        Ok(Self {
            kind: DictionaryKind::Fourier,
            m,
            d: 1,
            domain: Domain::unit_cube(1),
            tables: Vec::new(),
        })
    }

    /// Fourier basis on a non-default interval. The basis is defined on `[0, 1]`,
    /// so any other interval is rejected unless `affine_map` is set, in which case
    /// points are mapped by `t = (x - a) / (b - a)` before evaluation.
    pub fn fourier_on(m: usize, domain: Domain, affine_map: bool) -> Result<Self> {
        check_size(m)?;
        if domain.dim() != 1 {
            return Err(Error::InvalidDictionary(
                "the Fourier dictionary is one-dimensional".into(),
            ));
        }
        if !domain.is_unit_cube() && !affine_map {
            return Err(Error::InvalidDictionary(format!(
                "Fourier basis is defined on [0, 1], got [{}, {}] without an affine map",
                domain.lower()[0],
                domain.upper()[0]
            )));
        }
        Ok(Self {
            kind: DictionaryKind::Fourier,
            m,
            d: 1,
            domain,
            tables: Vec::new(),
        })
    }

    /// Coordinate projections `f_j(x) = x_j`, `j < m ≤ d`, on the given box.
    pub fn coordinate(d: usize, m: usize, domain: Domain) -> Result<Self> {
        check_size(m)?;
        if m > d {
            return Err(Error::InvalidDictionary(format!(
                "coordinate dictionary needs M <= d, got M = {m}, d = {d}"
            )));
        }
        if domain.dim() != d {
            return Err(Error::Shape(format!(
                "domain has dimension {}, dictionary has d = {d}",
                domain.dim()
            )));
        }
        Ok(Self {
            kind: DictionaryKind::Coordinate,
            m,
            d,
            domain,
            tables: Vec::new(),
        })
    }

    /// Tabulated one-dimensional functions on `[0, 1]`.
    pub fn tabulated(tables: Vec<Table>) -> Result<Self> {
        Self::tabulated_on(tables, Domain::unit_cube(1))
    }

    pub fn tabulated_on(tables: Vec<Table>, domain: Domain) -> Result<Self> {
        check_size(tables.len())?;
        if domain.dim() != 1 {
            return Err(Error::InvalidDictionary(
                "tabulated dictionaries are one-dimensional".into(),
            ));
        }
        Ok(Self {
            kind: DictionaryKind::Tabulated,
            m: tables.len(),
            d: 1,
            domain,
            tables,
        })
    }

    /// Loads a tabulated dictionary from CSV with header `x,f1,...,fM`.
    pub fn load_tabulated_csv(path: impl AsRef<Path>) -> Result<Self> {
        let tables = crate::io::read_tables_csv(path)?;
        Self::tabulated(tables)
    }

    pub fn kind(&self) -> DictionaryKind {
        self.kind
    }

    /// Number of functions `M`.
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Input dimension `d`.
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    /// Writes `f_1(x), …, f_M(x)` into `out`. Returns whether a tabulated
    /// function had to clamp `x` to its grid.
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) -> bool {
        debug_assert_eq!(x.len(), self.d);
        debug_assert_eq!(out.len(), self.m);
        match self.kind {
            DictionaryKind::Fourier => {
                let lo = self.domain.lower()[0];
                let hi = self.domain.upper()[0];
                fourier_basis_into((x[0] - lo) / (hi - lo), out);
                false
            }
            DictionaryKind::Coordinate => {
                out.copy_from_slice(&x[..self.m]);
                false
            }
            DictionaryKind::Tabulated => {
                let mut clamped = false;
                for (o, t) in out.iter_mut().zip(&self.tables) {
                    let (lo, hi) = t.range();
                    clamped |= x[0] < lo || x[0] > hi;
                    *o = t.eval(x[0]);
                }
                clamped
            }
        }
    }

    /// Evaluates every function at every point: entry `(i, j) = f_j(x_i)`.
    pub fn evaluate(&self, points: &Points) -> Result<DesignMatrix> {
        if points.dim() != self.d {
            return Err(Error::Shape(format!(
                "points have dimension {}, dictionary expects {}",
                points.dim(),
                self.d
            )));
        }
        let n = points.len();
        let mut data = vec![0.0; n * self.m];
        let mut row = vec![0.0; self.m];
        let mut clamped = 0;
        for (i, x) in points.rows().enumerate() {
            if self.eval_into(x, &mut row) {
                clamped += 1;
            }
            for (j, &v) in row.iter().enumerate() {
                data[j * n + i] = v;
            }
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("dictionary evaluation produced non-finite values".into()));
        }
        let mut design = DesignMatrix::from_column_major(n, self.m, data)?;
        design.clamped = clamped;
        Ok(design)
    }
}

/// `f_1, …, f_m` of the trigonometric basis at `t`, via the angle-addition recurrence.
pub fn fourier_basis_into(t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    let (s1, c1) = (2.0 * PI * t).sin_cos();
    let (mut s, mut c) = (s1, c1);
    let mut j = 1;
    while j < out.len() {
        out[j] = SQRT_2 * c;
        if j + 1 < out.len() {
            out[j + 1] = SQRT_2 * s;
        }
        let next_c = c * c1 - s * s1;
        s = s * c1 + c * s1;
        c = next_c;
        j += 2;
    }
}

/// Single Fourier basis function `f_{j+1}(t)` evaluated directly.
pub fn fourier_value(j: usize, t: f64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let k = j.div_ceil(2) as f64;
    let arg = 2.0 * PI * k * t;
    if j % 2 == 1 {
        SQRT_2 * arg.cos()
    } else {
        SQRT_2 * arg.sin()
    }
}

/// Values `f_j(x_i)` stored column-major, `n ≥ 1` rows by `M` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    n: usize,
    m: usize,
    data: Vec<f64>,
    clamped: usize,
}

impl DesignMatrix {
    pub fn from_column_major(n: usize, m: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Shape(format!("design must be non-empty, got {n} x {m}")));
        }
        if data.len() != n * m {
            return Err(Error::Shape(format!(
                "design data has {} entries, expected {n} x {m}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("design contains non-finite entries".into()));
        }
        Ok(Self {
            n,
            m,
            data,
            clamped: 0,
        })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.first().map(Vec::len).unwrap_or(0);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::Shape("design columns have unequal lengths".into()));
        }
        Self::from_column_major(n, columns.len(), columns.concat())
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Shape("design rows have unequal lengths".into()));
        }
        let mut data = vec![0.0; n * m];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                data[j * n + i] = v;
            }
        }
        Self::from_column_major(n, m, data)
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.m
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.n + i]
    }

    /// Number of rows whose point fell outside a tabulated grid and was clamped.
    pub fn clamped_points(&self) -> usize {
        self.clamped
    }

    /// `Σ_j λ_j f_j(x_i)` for every row.
    pub fn combine(&self, lambda: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (j, &l) in lambda.iter().enumerate() {
            if l != 0.0 {
                for (o, &v) in out.iter_mut().zip(self.column(j)) {
                    *o += l * v;
                }
            }
        }
        out
    }

    /// Keeps the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(cols.len() * self.n);
        for &j in cols {
            if j >= self.m {
                return Err(Error::Shape(format!("column {j} out of range (M = {})", self.m)));
            }
            data.extend_from_slice(self.column(j));
        }
        Self::from_column_major(self.n, cols.len(), data)
    }
}

/// Empirical norms `‖f_j‖_n = sqrt(n⁻¹ Σ_i f_j(X_i)²)`.
pub fn empirical_norms(design: &DesignMatrix) -> Vec<f64> {
    let n = design.nrows() as f64;
    (0..design.ncols())
        .map(|j| (design.column(j).iter().map(|v| v * v).sum::<f64>() / n).sqrt())
        .collect()
}

/// Acceptance thresholds for the dictionary conditions. The defaults accept any
/// finite sup-norm bound and any strictly positive minimal norm.
#[derive(Debug, Clone, Copy)]
pub struct A2Thresholds {
    pub max_sup_norm: f64,
    pub min_norm: f64,
    pub max_fourth_moment: f64,
}

impl Default for A2Thresholds {
    fn default() -> Self {
        Self {
            max_sup_norm: f64::INFINITY,
            min_norm: 0.0,
            max_fourth_moment: f64::INFINITY,
        }
    }
}

/// Estimated dictionary constants: `L` (sup-norm bound), `c₀` (minimal L₂(μ) norm)
/// and `L₀` (maximal `E f_i² f_j²`).
#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryValidation {
    pub sup_norm: f64,
    pub min_norm: f64,
    pub fourth_moment: f64,
    /// Points used for the sup-norm estimate, `None` when computed analytically.
    pub sup_grid_points: Option<usize>,
    pub bounded: bool,
    pub norms_bounded_below: bool,
    pub fourth_moment_bounded: bool,
}

impl DictionaryValidation {
    pub fn satisfied(&self) -> bool {
        self.bounded
            && self.norms_bounded_below
            && self.fourth_moment_bounded
            && self.sup_norm >= self.min_norm
            && self.min_norm > 0.0
    }
}

pub fn validate_a2(dict: &Dictionary, measure: &MeasureSpec) -> Result<DictionaryValidation> {
    validate_a2_with(dict, measure, &A2Thresholds::default())
}

pub fn validate_a2_with(
    dict: &Dictionary,
    measure: &MeasureSpec,
    thresholds: &A2Thresholds,
) -> Result<DictionaryValidation> {
    let population = Population::new(dict, measure)?;
    let (sup_norm, sup_grid_points) = population.sup_norm(dict)?;
    let min_norm = population
        .norms()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let fourth_moment = population.fourth_moment();
    for (name, v) in [
        ("sup-norm", sup_norm),
        ("minimal norm", min_norm),
        ("fourth moment", fourth_moment),
    ] {
        if !v.is_finite() {
            return Err(Error::Validation(format!("{name} estimate is not finite")));
        }
    }
    Ok(DictionaryValidation {
        sup_norm,
        min_norm,
        fourth_moment,
        sup_grid_points,
        bounded: sup_norm > 0.0 && sup_norm <= thresholds.max_sup_norm,
        norms_bounded_below: min_norm > thresholds.min_norm,
        fourth_moment_bounded: fourth_moment <= thresholds.max_fourth_moment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn fourier_examples() {
        let dict = Dictionary::fourier(3).unwrap();
        let mut out = [0.0; 3];
        dict.eval_into(&[0.7], &mut out);
        assert_eq!(out[0], 1.0);
        dict.eval_into(&[0.25], &mut out);
        assert!(close(out[1], 0.0, 1e-12));
        dict.eval_into(&[0.125], &mut out);
        assert!(close(out[2], 1.0, 1e-12));
    }

    #[test]
    fn fourier_requires_two_functions() {
        assert!(matches!(Dictionary::fourier(1), Err(Error::InvalidDictionary(_))));
        assert!(matches!(Dictionary::fourier(0), Err(Error::InvalidDictionary(_))));
    }

    #[test]
    fn fourier_rejects_other_intervals_unless_mapped() {
        let dom = Domain::new(vec![-1.0], vec![1.0]).unwrap();
        assert!(Dictionary::fourier_on(5, dom.clone(), false).is_err());
        let d = Dictionary::fourier_on(5, dom, true).unwrap();
        let mut a = [0.0; 5];
        let mut b = [0.0; 5];
        d.eval_into(&[0.0], &mut a);
        Dictionary::fourier(5).unwrap().eval_into(&[0.5], &mut b);
        assert_eq!(a, b);
    }

    #[test]
    fn recurrence_matches_direct_evaluation() {
        let mut out = vec![0.0; 65];
        for &t in &[0.0, 0.013, 0.25, 0.5, 0.77, 0.999] {
            fourier_basis_into(t, &mut out);
            for (j, &v) in out.iter().enumerate() {
                assert!(close(v, fourier_value(j, t), 1e-12), "j={j} t={t}");
            }
        }
    }

    #[test]
    fn evaluate_examples() {
        let dict = Dictionary::fourier(3).unwrap();
        let design = dict
            .evaluate(&Points::from_scalars(vec![0.0, 0.5]))
            .unwrap();
        let s2 = SQRT_2;
        assert!(close(design.get(0, 0), 1.0, 1e-15));
        assert!(close(design.get(0, 1), s2, 1e-15));
        assert!(close(design.get(0, 2), 0.0, 1e-15));
        assert!(close(design.get(1, 0), 1.0, 1e-15));
        assert!(close(design.get(1, 1), -s2, 1e-12));
        assert!(close(design.get(1, 2), 0.0, 1e-12));

        let coord = Dictionary::coordinate(3, 2, Domain::unit_cube(3)).unwrap();
        let design = coord
            .evaluate(&Points::from_rows(&[vec![4.0, -1.0, 7.0]]).unwrap())
            .unwrap();
        assert_eq!(design.column(0), &[4.0]);
        assert_eq!(design.column(1), &[-1.0]);

        let t = Table::new(vec![0.0, 1.0], vec![0.0, 2.0]).unwrap();
        let other = Table::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let tab = Dictionary::tabulated(vec![t, other]).unwrap();
        let design = tab.evaluate(&Points::from_scalars(vec![0.25])).unwrap();
        assert_eq!(design.get(0, 0), 0.5);
        assert_eq!(design.clamped_points(), 0);
    }

    #[test]
    fn tabulated_clamps_and_flags() {
        let t = Table::new(vec![0.2, 0.8], vec![1.0, 3.0]).unwrap();
        let u = Table::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let tab = Dictionary::tabulated(vec![t, u]).unwrap();
        let design = tab
            .evaluate(&Points::from_scalars(vec![0.0, 0.5, 1.0]))
            .unwrap();
        let col = design.column(0);
        assert_eq!((col[0], col[2]), (1.0, 3.0));
        assert!(close(col[1], 2.0, 1e-15));
        assert_eq!(design.clamped_points(), 2);
    }

    #[test]
    fn evaluate_dimension_mismatch() {
        let coord = Dictionary::coordinate(3, 2, Domain::unit_cube(3)).unwrap();
        let pts = Points::from_scalars(vec![0.1, 0.2]);
        assert!(matches!(coord.evaluate(&pts), Err(Error::Shape(_))));
    }

    #[test]
    fn invalid_dictionaries() {
        assert!(Dictionary::coordinate(2, 3, Domain::unit_cube(2)).is_err());
        assert!(Table::new(vec![0.0], vec![1.0]).is_err());
        assert!(Table::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(Table::new(vec![0.5, 0.1], vec![1.0, 2.0]).is_err());
        let t = Table::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert!(Dictionary::tabulated(vec![t]).is_err());
    }

    #[test]
    fn empirical_norm_examples() {
        let ones = DesignMatrix::from_columns(&[vec![1.0; 5]]).unwrap();
        assert_eq!(empirical_norms(&ones), vec![1.0]);
        let col = DesignMatrix::from_columns(&[vec![3.0, 4.0]]).unwrap();
        assert!(close(empirical_norms(&col)[0], 12.5f64.sqrt(), 1e-15));
    }

    #[test]
    fn fourier_empirical_norms_on_grid() {
        // ∫ f_j² dx = 1 on [0, 1]; a 1000-point equispaced grid is a quadrature for it.
        let n = 1000;
        let xs = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let design = Dictionary::fourier(3)
            .unwrap()
            .evaluate(&Points::from_scalars(xs))
            .unwrap();
        for v in empirical_norms(&design) {
            assert!((v - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn empirical_norm_has_no_hidden_normalization() {
        let xs: Vec<f64> = (0..37).map(|i| (i as f64 * 0.618).fract()).collect();
        let design = Dictionary::fourier(7)
            .unwrap()
            .evaluate(&Points::from_scalars(xs))
            .unwrap();
        let norms = empirical_norms(&design);
        for (j, v) in norms.iter().enumerate() {
            let ss: f64 = design.column(j).iter().map(|x| x * x).sum();
            assert!(close(v * v * 37.0, ss, 1e-12 * ss.max(1.0)));
        }
    }

    #[test]
    fn evaluation_is_deterministic() {
        let xs: Vec<f64> = (0..200).map(|i| (i as f64 * 0.377).fract()).collect();
        let d = Dictionary::fourier(11).unwrap();
        let a = d.evaluate(&Points::from_scalars(xs.clone())).unwrap();
        let b = d.evaluate(&Points::from_scalars(xs)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn validate_fourier_uniform() {
        let v = validate_a2(&Dictionary::fourier(3).unwrap(), &MeasureSpec::uniform()).unwrap();
        assert!(close(v.sup_norm, SQRT_2, 1e-6));
        assert!(close(v.min_norm, 1.0, 1e-6));
        assert!(v.satisfied());
        assert!(v.fourth_moment <= v.sup_norm.powi(4));
    }

    #[test]
    fn validate_zero_coordinate_column() {
        // second axis collapses onto zero: its second moment underflows to 0
        let dom = Domain::new(vec![-1.0, 0.0], vec![1.0, f64::MIN_POSITIVE]).unwrap();
        let d = Dictionary::coordinate(2, 2, dom).unwrap();
        let v = validate_a2(&d, &MeasureSpec::uniform()).unwrap();
        assert_eq!(v.min_norm, 0.0);
        assert!(!v.norms_bounded_below);
        assert!(!v.satisfied());
    }

    #[test]
    fn validate_tabulated_constant() {
        let two = Table::new(vec![0.0, 1.0], vec![2.0, 2.0]).unwrap();
        let d = Dictionary::tabulated(vec![two.clone(), two]).unwrap();
        let v = validate_a2(&d, &MeasureSpec::uniform()).unwrap();
        assert!(close(v.sup_norm, 2.0, 1e-12));
        assert!(close(v.min_norm, 2.0, 1e-12));
        assert!(close(v.fourth_moment, 16.0, 1e-10));
    }

    #[test]
    fn validate_tabulated_zero_function_fails_b() {
        let zero = Table::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        let one = Table::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let d = Dictionary::tabulated(vec![zero, one]).unwrap();
        let v = validate_a2(&d, &MeasureSpec::uniform()).unwrap();
        assert_eq!(v.min_norm, 0.0);
        assert!(!v.norms_bounded_below);
        assert!(!v.satisfied());
    }
}
