//! Lie algebra g = h ⊕ V from a subalgebra h ⊆ so(V), an h-invariant 3-form T
//! and an h-equivariant symmetric curvature operator R:
//!
//! [A + X, B + Y] = ([A, B] - R(X, Y)) + (AY - BX - T(X, Y)).
//!
//! Basis order in the result: h first, then e_1..e_n.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::LieAlgebraData;
use crate::curvature::CurvatureOperator;
use crate::error::{Error, Result};
use crate::exterior::{pair_index, Multivector};
use crate::linalg;
use crate::skew::{act_on_form, SkewEndo};
use crate::tolerance::ToleranceConfig;
use crate::torsion::{sigma_t, torsion_vector};

#[derive(Clone, Debug)]
pub struct NomizuData {
    dim_v: usize,
    h: Vec<SkewEndo>,
    h_labels: Vec<String>,
    t: Multivector,
    r: CurvatureOperator,
}

#[derive(Clone, Debug, Serialize)]
pub struct NomizuResiduals {
    pub r_image: f64,
    pub t_invariance: f64,
    pub r_equivariance: f64,
    pub h_closure: f64,
}

impl NomizuData {
    /// `h` must be linearly independent; it need not be orthonormal.
    pub fn new(
        dim_v: usize,
        h: Vec<SkewEndo>,
        h_labels: Vec<String>,
        t: Multivector,
        r: CurvatureOperator,
    ) -> Result<Self> {
        t.check_grade(3)?;
        if t.dim() != dim_v || r.dim() != dim_v {
            return Err(Error::DimensionMismatch(t.dim().max(r.dim()), dim_v));
        }
        if h_labels.len() != h.len() {
            return Err(Error::Precondition("one label per element of h required".into()));
        }
        if h.iter().any(|a| a.dim() != dim_v) {
            return Err(Error::Precondition("elements of h must act on V".into()));
        }
        if !h.is_empty() {
            let m = Self::h_matrix_of(&h);
            if linalg::rank(&m, 1e-9) < h.len() {
                return Err(Error::Precondition("elements of h are linearly dependent".into()));
            }
        }
        Ok(Self {
            dim_v,
            h,
            h_labels,
            t,
            r,
        })
    }

    /// Uses labels H1, H2, ….
    pub fn with_default_labels(dim_v: usize, h: Vec<SkewEndo>, t: Multivector, r: CurvatureOperator) -> Result<Self> {
        let labels = (1..=h.len()).map(|i| format!("H{i}")).collect();
        Self::new(dim_v, h, labels, t, r)
    }

    fn h_matrix_of(h: &[SkewEndo]) -> DMatrix<f64> {
        DMatrix::from_columns(&h.iter().map(|a| a.to_dense()).collect::<Vec<_>>())
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn h(&self) -> &[SkewEndo] {
        &self.h
    }

    pub fn h_labels(&self) -> &[String] {
        &self.h_labels
    }

    pub fn torsion(&self) -> &Multivector {
        &self.t
    }

    pub fn curvature(&self) -> &CurvatureOperator {
        &self.r
    }

    /// h-coordinates of a skew endomorphism and the distance from span(h).
    pub fn h_coordinates(&self, a: &SkewEndo) -> (DVector<f64>, f64) {
        if self.h.is_empty() {
            return (DVector::zeros(0), a.to_dense().norm());
        }
        linalg::coordinates(&Self::h_matrix_of(&self.h), &a.to_dense())
    }

    pub fn residuals(&self) -> Result<NomizuResiduals> {
        let n = self.dim_v;
        let mut r_image: f64 = 0.0;
        for p in 0..n * (n - 1) / 2 {
            let row = self.r.matrix().row(p).transpose();
            let a = SkewEndo::from_dense(n, &row);
            r_image = r_image.max(self.h_coordinates(&a).1);
        }
        let mut t_inv: f64 = 0.0;
        let mut r_eq: f64 = 0.0;
        let mut closure: f64 = 0.0;
        let basis2: Vec<Multivector> = crate::exterior::pair_list(n)
            .iter()
            .map(|&(i, j)| Multivector::e(n, &[i, j]))
            .collect();
        for a in &self.h {
            t_inv = t_inv.max(act_on_form(a, &self.t)?.max_abs());
            for w in &basis2 {
                let lhs = act_on_form(a, &self.r.apply(w))?;
                let rhs = self.r.apply(&act_on_form(a, w)?);
                r_eq = r_eq.max((&lhs - &rhs).max_abs());
            }
            for b in &self.h {
                closure = closure.max(self.h_coordinates(&a.bracket(b)).1);
            }
        }
        Ok(NomizuResiduals {
            r_image,
            t_invariance: t_inv,
            r_equivariance: r_eq,
            h_closure: closure,
        })
    }

    /// Errors naming the first violated hypothesis.
    pub fn validate(&self, tol: &ToleranceConfig) -> Result<NomizuResiduals> {
        let res = self.residuals()?;
        let scale = linalg::max_abs(self.r.matrix()).max(self.t.max_abs()).max(1.0);
        let bad = |x: f64| !tol.is_zero(x, scale * scale);
        if bad(res.h_closure) {
            return Err(Error::invariant("h is not closed under the bracket", res.h_closure));
        }
        if bad(res.r_image) {
            return Err(Error::invariant("image of R is not contained in h", res.r_image));
        }
        if bad(res.t_invariance) {
            return Err(Error::invariant("T is not h-invariant", res.t_invariance));
        }
        if bad(res.r_equivariance) {
            return Err(Error::invariant("R is not h-equivariant", res.r_equivariance));
        }
        Ok(res)
    }
}

/// Structure constants on h ⊕ V.
pub fn build_lie_algebra(d: &NomizuData, tol: &ToleranceConfig) -> Result<LieAlgebraData> {
    d.validate(tol)?;
    Ok(build_unchecked(d))
}

/// Same bracket without checking the hypotheses (used to exhibit Jacobi failures).
pub fn build_unchecked(d: &NomizuData) -> LieAlgebraData {
    let p = d.h.len();
    let n = d.dim_v;
    let mut labels = d.h_labels.clone();
    labels.extend((1..=n).map(|i| format!("e{i}")));
    let mut l = LieAlgebraData::abelian(labels);
    let total = p + n;
    for a in 0..p {
        for b in a + 1..p {
            let (x, _) = d.h_coordinates(&d.h[a].bracket(&d.h[b]));
            let mut v = DVector::zeros(total);
            v.rows_mut(0, p).copy_from(&x);
            l.set_bracket(a, b, &v);
        }
        for j in 0..n {
            let mut v = DVector::zeros(total);
            let col = d.h[a].matrix().column(j).into_owned();
            v.rows_mut(p, n).copy_from(&col);
            l.set_bracket(a, p + j, &v);
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let row = d.r.matrix().row(pair_index(n, i, j)).transpose();
            let (x, _) = d.h_coordinates(&SkewEndo::from_dense(n, &row));
            let tv = torsion_vector(&d.t, i, j);
            let mut v = DVector::zeros(total);
            v.rows_mut(0, p).copy_from(&(-x));
            v.rows_mut(p, n).copy_from(&(-tv));
            l.set_bracket(p + i - 1, p + j - 1, &v);
        }
    }
    // -½tr on h, identity on V, h ⊥ V
    let mut g = DMatrix::zeros(total, total);
    for a in 0..p {
        for b in 0..p {
            g[(a, b)] = d.h[a].inner(&d.h[b]);
        }
    }
    for i in 0..n {
        g[(p + i, p + i)] = 1.0;
    }
    l.with_inner(g)
}

#[derive(Clone, Debug, Serialize)]
pub struct BianchiResult {
    pub passes: bool,
    pub max_residual: f64,
}

/// 𝔖_{X,Y,Z} R(X,Y,Z,V) = σ_T(X,Y,Z,V) over all index quadruples.
pub fn bianchi1_check(t: &Multivector, r: &CurvatureOperator, tol: &ToleranceConfig) -> Result<BianchiResult> {
    let n = t.dim();
    if r.dim() != n {
        return Err(Error::DimensionMismatch(n, r.dim()));
    }
    let sigma = sigma_t(t)?;
    let mut worst: f64 = 0.0;
    for x in 1..=n {
        for y in 1..=n {
            for z in 1..=n {
                for v in 1..=n {
                    let cyc = r.value(x, y, z, v) + r.value(y, z, x, v) + r.value(z, x, y, v);
                    worst = worst.max((cyc - sigma.coeff(&[x, y, z, v])).abs());
                }
            }
        }
    }
    let scale = t.norm_sq().max(linalg::max_abs(r.matrix()));
    Ok(BianchiResult {
        passes: tol.is_zero(worst, scale),
        max_residual: worst,
    })
}

/// 𝔖_{X,Y,Z} R(T(X,Y), Z) = 0 over all index triples.
pub fn bianchi2_check(t: &Multivector, r: &CurvatureOperator, tol: &ToleranceConfig) -> Result<BianchiResult> {
    let n = t.dim();
    if r.dim() != n {
        return Err(Error::DimensionMismatch(n, r.dim()));
    }
    t.check_grade(3)?;
    // R(u, e_z) as a 2-form, for u = T(e_x, e_y)
    let rr = |u: &DVector<f64>, z: usize| -> DVector<f64> {
        let mut acc = DVector::zeros(n * (n - 1) / 2);
        for k in 1..=n {
            if u[k - 1] == 0.0 || k == z {
                continue;
            }
            let s = if k < z { 1.0 } else { -1.0 };
            let row = r.matrix().row(pair_index(n, k.min(z), k.max(z))).transpose();
            acc += row * (s * u[k - 1]);
        }
        acc
    };
    let mut worst: f64 = 0.0;
    for x in 1..=n {
        for y in 1..=n {
            for z in 1..=n {
                let s = rr(&torsion_vector(t, x, y), z)
                    + rr(&torsion_vector(t, y, z), x)
                    + rr(&torsion_vector(t, z, x), y);
                worst = worst.max(s.amax());
            }
        }
    }
    let scale = t.max_abs() * linalg::max_abs(r.matrix());
    Ok(BianchiResult {
        passes: tol.is_zero(worst, scale),
        max_residual: worst,
    })
}

#[derive(Clone, Debug)]
pub struct Transversal {
    pub algebra: LieAlgebraData,
    /// dim(candidate ∩ span(h)).
    pub h_intersection_dim: usize,
}

/// Checks that span(candidate columns) is a subalgebra of `l` and reports its
/// intersection with the span of the basis vectors listed in `h_idx`.
pub fn transversal_subalgebra(
    l: &LieAlgebraData,
    candidate: &DMatrix<f64>,
    labels: Vec<String>,
    h_idx: &[usize],
    tol: &ToleranceConfig,
) -> Result<Transversal> {
    if candidate.nrows() != l.dim() {
        return Err(Error::DimensionMismatch(candidate.nrows(), l.dim()));
    }
    let algebra = l.subalgebra(candidate, labels, tol)?;
    let n = l.dim();
    let hb = DMatrix::from_fn(n, h_idx.len(), |r, c| if r == h_idx[c] { 1.0 } else { 0.0 });
    let mut both = candidate.clone().insert_columns(candidate.ncols(), hb.ncols(), 0.0);
    both.columns_mut(candidate.ncols(), hb.ncols()).copy_from(&hb);
    let inter = linalg::rank(candidate, tol.eps_rank) + h_idx.len() - linalg::rank(&both, tol.eps_rank);
    Ok(Transversal {
        algebra,
        h_intersection_dim: inter,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NomizuJson {
    #[serde(rename = "dim_V")]
    pub dim_v: usize,
    pub h: Vec<Multivector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_labels: Option<Vec<String>>,
    #[serde(rename = "T")]
    pub t: Multivector,
    #[serde(rename = "R")]
    pub r: CurvatureOperator,
}

impl NomizuData {
    pub fn to_json(&self) -> NomizuJson {
        NomizuJson {
            dim_v: self.dim_v,
            h: self.h.iter().map(|a| a.to_two_form()).collect(),
            h_labels: Some(self.h_labels.clone()),
            t: self.t.clone(),
            r: self.r.clone(),
        }
    }

    pub fn from_json(j: &NomizuJson) -> Result<Self> {
        let h: Vec<SkewEndo> = j.h.iter().map(SkewEndo::from_two_form).collect::<Result<_>>()?;
        let labels = j
            .h_labels
            .clone()
            .unwrap_or_else(|| (1..=h.len()).map(|i| format!("H{i}")).collect());
        Self::new(j.dim_v, h, labels, j.t.clone(), j.r.clone())
    }
}
