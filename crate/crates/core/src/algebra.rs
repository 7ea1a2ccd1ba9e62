//! Finite-dimensional real Lie algebras given by structure constants.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::tolerance::ToleranceConfig;

/// [b_i, b_j] = Σ_k c_{ij}^k b_k, basis indices 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraData {
    labels: Vec<String>,
    c: Vec<f64>,
    inner: Option<DMatrix<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiResult {
    pub passes: bool,
    pub max_residual: f64,
    /// Basis triple with the largest residual.
    pub worst: (usize, usize, usize),
}

impl LieAlgebraData {
    /// Abelian algebra on the given labels.
    pub fn abelian(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self {
            labels,
            c: vec![0.0; n * n * n],
            inner: None,
        }
    }

    pub fn with_default_labels(n: usize) -> Self {
        Self::abelian((1..=n).map(|i| format!("b{i}")).collect())
    }

    /// From (i, j, k, c) entries meaning c_{ij}^k = c; the (j, i) entry is implied.
    pub fn from_entries(labels: Vec<String>, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let n = labels.len();
        let mut l = Self::abelian(labels);
        let mut seen = BTreeSet::new();
        for &(i, j, k, c) in entries {
            if i >= n || j >= n || k >= n {
                return Err(Error::Parse(format!("bracket index ({i},{j},{k}) out of range for dimension {n}")));
            }
            if i == j {
                if c != 0.0 {
                    return Err(Error::Parse(format!("[b{i}, b{i}] must vanish")));
                }
                continue;
            }
            if !c.is_finite() {
                return Err(Error::Parse("non-finite structure constant".into()));
            }
            let key = (i.min(j), i.max(j), k);
            if !seen.insert(key) {
                return Err(Error::Parse(format!("duplicate structure constant for ({i},{j},{k})")));
            }
            l.set(i, j, k, c);
        }
        Ok(l)
    }

    /// Sets c_{ij}^k = c and c_{ji}^k = -c.
    pub fn set(&mut self, i: usize, j: usize, k: usize, c: f64) {
        let n = self.dim();
        self.c[(i * n + j) * n + k] = c;
        self.c[(j * n + i) * n + k] = -c;
    }

    /// Sets the full bracket [b_i, b_j] = v.
    pub fn set_bracket(&mut self, i: usize, j: usize, v: &DVector<f64>) {
        for k in 0..self.dim() {
            self.set(i, j, k, v[k]);
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.dim());
        self.labels = labels;
        self
    }

    pub fn inner(&self) -> Option<&DMatrix<f64>> {
        self.inner.as_ref()
    }

    pub fn with_inner(mut self, g: DMatrix<f64>) -> Self {
        self.inner = Some(g);
        self
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim();
        self.c[(i * n + j) * n + k]
    }

    /// Raw entry, for perturbation tests (does not touch the (j, i) entry).
    pub fn perturb_entry(&mut self, i: usize, j: usize, k: usize, delta: f64) {
        let n = self.dim();
        self.c[(i * n + j) * n + k] += delta;
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> DVector<f64> {
        let n = self.dim();
        DVector::from_fn(n, |k, _| self.c[(i * n + j) * n + k])
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let s = x[i] * y[j];
                if s == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += s * self.c[(i * n + j) * n + k];
                }
            }
        }
        out
    }

    /// Matrix of ad(x): column j is [x, b_j].
    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let e = DVector::from_fn(n, |r, _| if r == j { 1.0 } else { 0.0 });
            m.set_column(j, &self.bracket(x, &e));
        }
        m
    }

    pub fn ad_basis(&self, i: usize) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |k, j| self.c[(i * n + j) * n + k])
    }

    pub fn max_constant(&self) -> f64 {
        self.c.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.constant(i, j, k) + self.constant(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Max over basis triples of |[[x,y],z] + [[y,z],x] + [[z,x],y]| (and antisymmetry).
    pub fn jacobi_check(&self, tol: &ToleranceConfig) -> JacobiResult {
        let n = self.dim();
        let mut worst = 0.0;
        let mut at = (0, 0, 0);
        let e = |i: usize| DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
        for i in 0..n {
            for j in i + 1..n {
                let bij = self.bracket_basis(i, j);
                for k in j + 1..n {
                    let a = self.bracket(&bij, &e(k));
                    let b = self.bracket(&self.bracket_basis(j, k), &e(i));
                    let c = self.bracket(&self.bracket_basis(k, i), &e(j));
                    let r = (a + b + c).amax();
                    if r > worst {
                        worst = r;
                        at = (i, j, k);
                    }
                }
            }
        }
        let anti = self.antisymmetry_residual();
        if anti > worst {
            worst = anti;
        }
        let scale = self.max_constant().powi(2).max(1.0);
        JacobiResult {
            passes: tol.is_zero(worst, scale),
            max_residual: worst,
            worst: at,
        }
    }

    /// Structure constants in a new basis given by the columns of `p` (old coordinates).
    pub fn change_basis(&self, p: &DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        let n = self.dim();
        if p.nrows() != n || p.ncols() != n || labels.len() != n {
            return Err(Error::DimensionMismatch(p.ncols(), n));
        }
        let inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Precondition("basis change is singular".into()))?;
        let mut out = Self::abelian(labels);
        for a in 0..n {
            for b in a + 1..n {
                let v = &inv * self.bracket(&p.column(a).into_owned(), &p.column(b).into_owned());
                out.set_bracket(a, b, &v);
            }
        }
        if let Some(g) = &self.inner {
            out.inner = Some(p.transpose() * g * p);
        }
        Ok(out)
    }

    /// Induced algebra on span(columns of `basis`); errors if the span is not closed.
    pub fn subalgebra(&self, basis: &DMatrix<f64>, labels: Vec<String>, tol: &ToleranceConfig) -> Result<Self> {
        let m = basis.ncols();
        let mut out = Self::abelian(labels);
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in a + 1..m {
                let br = self.bracket(&basis.column(a).into_owned(), &basis.column(b).into_owned());
                let (x, r) = linalg::coordinates(basis, &br);
                worst = worst.max(r);
                out.set_bracket(a, b, &x);
            }
        }
        if worst > tol.eps_rank * self.max_constant().max(1.0) {
            return Err(Error::NotClosed(worst));
        }
        if let Some(g) = &self.inner {
            out.inner = Some(basis.transpose() * g * basis);
        }
        Ok(out)
    }

    /// Nonzero brackets as (i, j, k, c) with i < j.
    pub fn entries(&self, eps: f64) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim();
        let mut v = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let c = self.constant(i, j, k);
                    if c.abs() > eps {
                        v.push((i, j, k, c));
                    }
                }
            }
        }
        v
    }

    /// Span of all brackets [x, y] with x in `a`, y in `b` (columns), orthonormalized.
    pub fn bracket_span(&self, a: &DMatrix<f64>, b: &DMatrix<f64>, eps_rank: f64) -> DMatrix<f64> {
        let n = self.dim();
        let mut cols = Vec::new();
        for i in 0..a.ncols() {
            for j in 0..b.ncols() {
                cols.push(self.bracket(&a.column(i).into_owned(), &b.column(j).into_owned()));
            }
        }
        if cols.is_empty() {
            return DMatrix::zeros(n, 0);
        }
        linalg::column_space(&DMatrix::from_columns(&cols), eps_rank)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BracketJson {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub labels: Vec<String>,
    pub brackets: Vec<BracketJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Vec<Vec<f64>>>,
}

impl LieAlgebraData {
    pub fn to_json(&self, eps: f64) -> AlgebraJson {
        AlgebraJson {
            labels: self.labels.clone(),
            brackets: self
                .entries(eps)
                .into_iter()
                .map(|(i, j, k, c)| BracketJson { i, j, k, c })
                .collect(),
            inner: self.inner.as_ref().map(linalg::matrix_to_rows),
        }
    }

    pub fn from_json(j: &AlgebraJson) -> Result<Self> {
        let entries: Vec<_> = j.brackets.iter().map(|b| (b.i, b.j, b.k, b.c)).collect();
        let mut l = Self::from_entries(j.labels.clone(), &entries)?;
        if let Some(rows) = &j.inner {
            let g = linalg::rows_to_matrix(rows).ok_or_else(|| Error::Parse("ragged inner product".into()))?;
            if g.nrows() != l.dim() || g.ncols() != l.dim() {
                return Err(Error::Parse("inner product has the wrong size".into()));
            }
            l.inner = Some(g);
        }
        Ok(l)
    }
}
