//! Curvature operators as symmetric matrices on Λ² in the lexicographic e_ij basis.
//!
//! Entry (ij, kl) is R(e_i, e_j, e_k, e_l) = g(R(e_i, e_j) e_k, e_l); the 2-form
//! R(e_ij) is the ij-th row read in the same basis.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{pair_index, pair_list, Multivector, MAX_DIM};
use crate::linalg;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurvatureJson", into = "CurvatureJson")]
pub struct CurvatureOperator {
    dim: usize,
    matrix: DMatrix<f64>,
}

fn pairs_dim(n: usize) -> usize {
    n * (n - 1) / 2
}

impl CurvatureOperator {
    pub fn zero(dim: usize) -> Self {
        assert!((2..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        let p = pairs_dim(dim);
        Self {
            dim,
            matrix: DMatrix::zeros(p, p),
        }
    }

    /// Validates size and symmetry (relative residual 1e-9).
    pub fn from_matrix(dim: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let op = Self::from_matrix_unchecked(dim, matrix)?;
        let res = op.symmetry_residual();
        if res > 1e-9 * linalg::max_abs(&op.matrix).max(1.0) {
            return Err(Error::NotSymmetric(res));
        }
        Ok(op)
    }

    /// Size check only; use [`symmetry_residual`](Self::symmetry_residual) to inspect.
    pub fn from_matrix_unchecked(dim: usize, matrix: DMatrix<f64>) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDim(dim));
        }
        let p = pairs_dim(dim);
        if matrix.nrows() != p || matrix.ncols() != p {
            return Err(Error::Parse(format!(
                "curvature matrix must be {p}x{p} for dimension {dim}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { dim, matrix })
    }

    /// Σ c_k (w1 ⊙ w2) with w1 ⊙ w2 = ½(w1⊗w2 + w2⊗w1), so w ⊙ w = w⊗w.
    pub fn from_sym_terms(dim: usize, terms: &[(&Multivector, &Multivector, f64)]) -> Result<Self> {
        let mut op = Self::zero(dim);
        for (w1, w2, c) in terms {
            w1.check_grade(2)?;
            w2.check_grade(2)?;
            if w1.dim() != dim || w2.dim() != dim {
                return Err(Error::DimensionMismatch(w1.dim().max(w2.dim()), dim));
            }
            let v1 = w1.to_dense(2);
            let v2 = w2.to_dense(2);
            op.matrix += (&v1 * v2.transpose() + &v2 * v1.transpose()) * (0.5 * c);
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn symmetry_residual(&self) -> f64 {
        linalg::max_abs(&(&self.matrix - self.matrix.transpose()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix * s,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix + &other.matrix,
        })
    }

    /// R(e_i, e_j, e_k, e_l) for 1-based indices, extended antisymmetrically.
    pub fn value(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let (p, s1) = match Self::pair(self.dim, i, j) {
            Some(x) => x,
            None => return 0.0,
        };
        let (q, s2) = match Self::pair(self.dim, k, l) {
            Some(x) => x,
            None => return 0.0,
        };
        s1 * s2 * self.matrix[(p, q)]
    }

    fn pair(n: usize, i: usize, j: usize) -> Option<(usize, f64)> {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => Some((pair_index(n, i, j), 1.0)),
            Greater => Some((pair_index(n, j, i), -1.0)),
            Equal => None,
        }
    }

    /// R(w) as a 2-form.
    pub fn apply(&self, w: &Multivector) -> Multivector {
        let v = self.matrix.transpose() * w.to_dense(2);
        Multivector::from_dense(self.dim, 2, &v)
    }

    /// Orthonormal basis of the image of R, as 2-forms.
    pub fn image(&self, eps_rank: f64) -> Vec<Multivector> {
        let cs = linalg::column_space(&self.matrix, eps_rank);
        (0..cs.ncols())
            .map(|c| Multivector::from_dense(self.dim, 2, &cs.column(c).into_owned()))
            .collect()
    }

    /// Ric(X, Y) = Σ_i R(X, e_i, e_i, Y).
    pub fn ricci(&self) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |x, y| {
            (1..=n).map(|i| self.value(x + 1, i, i, y + 1)).sum()
        })
    }

    /// Cyclic sum 𝔖_{X,Y,Z} R(X, Y, Z, V) as a 4-form (zero iff the plain Bianchi identity holds).
    pub fn bianchi_form(&self) -> Multivector {
        let n = self.dim;
        let mut out = Multivector::zero(n);
        for m in crate::exterior::basis_masks(n, 4) {
            let idx = crate::exterior::mask_indices(m);
            let (x, y, z, v) = (idx[0], idx[1], idx[2], idx[3]);
            let s = self.value(x, y, z, v) + self.value(y, z, x, v) + self.value(z, x, y, v);
            out = &out + &Multivector::term(n, &idx, s).expect("valid indices");
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurvatureJson {
    pub basis: String,
    pub matrix: Vec<Vec<f64>>,
}

impl TryFrom<CurvatureJson> for CurvatureOperator {
    type Error = Error;
    fn try_from(j: CurvatureJson) -> Result<Self> {
        if j.basis != "lex-eij" {
            return Err(Error::Parse(format!("unknown curvature basis '{}'", j.basis)));
        }
        let p = j.matrix.len();
        let n = (2..=MAX_DIM)
            .find(|&n| pairs_dim(n) == p)
            .ok_or_else(|| Error::Parse(format!("{p} rows is not n(n-1)/2 for any n ≤ 8")))?;
        let m = linalg::rows_to_matrix(&j.matrix)
            .ok_or_else(|| Error::Parse("ragged curvature matrix".into()))?;
        if j.matrix.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Parse("non-finite curvature entry".into()));
        }
        CurvatureOperator::from_matrix(n, m)
    }
}

impl From<CurvatureOperator> for CurvatureJson {
    fn from(r: CurvatureOperator) -> Self {
        CurvatureJson {
            basis: "lex-eij".into(),
            matrix: linalg::matrix_to_rows(&r.matrix),
        }
    }
}

/// Lexicographic pair labels "12", "13", … for reports.
pub fn pair_labels(n: usize) -> Vec<String> {
    pair_list(n).iter().map(|(i, j)| format!("{i}{j}")).collect()
}
