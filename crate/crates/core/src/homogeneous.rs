//! Invariant connections on reductive homogeneous models g = h ⊕ m.
//!
//! A connection is given by Λ: m → so(m). With the conventions used here
//!
//! T(X, Y) = Λ(X)Y - Λ(Y)X - [X, Y]_m,
//! R(X, Y) = [Λ(X), Λ(Y)] - Λ([X, Y]_m) - ad([X, Y]_h)|_m,
//!
//! and the Levi-Civita map is Λ^g(X)Y = ½[X, Y]_m + ½U(X, Y).
//!
//! Internally the model is stored with h first and a metric-orthonormal basis of m;
//! forms on m are written in that basis.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraJson, LieAlgebraData};
use crate::curvature::CurvatureOperator;
use crate::error::{Error, Result};
use crate::exterior::{basis_masks, mask_indices, pair_list, Multivector};
use crate::linalg;
use crate::nomizu::{build_lie_algebra, NomizuData};
use crate::skew::{act_on_form, action_matrix, SkewEndo};
use crate::tolerance::{CheckResult, ToleranceConfig};

#[derive(Clone, Debug)]
pub struct HomogeneousModel {
    algebra: LieAlgebraData,
    p: usize,
    q: usize,
    isotropy: Vec<DMatrix<f64>>,
    lambda: Option<Vec<DMatrix<f64>>>,
    /// Columns: the orthonormal m-basis in the coordinates of the input m-basis.
    m_frame: DMatrix<f64>,
}

/// A tensor on m whose ∇-parallelism can be tested.
#[derive(Clone, Debug)]
pub enum Tensor {
    Form(Multivector),
    Curvature(CurvatureOperator),
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionResult {
    pub torsion: Multivector,
    /// max |T(X,Y,Z) - skew part|; zero for connections with skew torsion.
    pub non_skew_residual: f64,
}

impl HomogeneousModel {
    /// `h_idx`/`m_idx` partition the basis of `algebra`; `metric` is the inner
    /// product on m in the listed order; `lambda[i]` is Λ(m_i) in the m basis.
    pub fn new(
        algebra: &LieAlgebraData,
        h_idx: &[usize],
        m_idx: &[usize],
        metric: &DMatrix<f64>,
        lambda: Option<Vec<DMatrix<f64>>>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        let n = algebra.dim();
        let (p, q) = (h_idx.len(), m_idx.len());
        let mut seen = vec![false; n];
        for &i in h_idx.iter().chain(m_idx) {
            if i >= n || seen[i] {
                return Err(Error::Parse(format!("h/m indices must partition 0..{n}")));
            }
            seen[i] = true;
        }
        if p + q != n {
            return Err(Error::Parse(format!("h/m indices must partition 0..{n}")));
        }
        if !(1..=crate::exterior::MAX_DIM).contains(&q) {
            return Err(Error::UnsupportedDim(q));
        }
        if metric.nrows() != q || metric.ncols() != q {
            return Err(Error::Parse("metric must be square of size dim m".into()));
        }
        if linalg::max_abs(&(metric - metric.transpose())) > 1e-12 * linalg::max_abs(metric).max(1.0) {
            return Err(Error::NotSymmetric(linalg::max_abs(&(metric - metric.transpose()))));
        }
        let chol = metric
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Precondition("metric is not positive definite".into()))?;
        // B = L^{-T} gives Bᵀ g B = I
        let b = chol
            .l()
            .transpose()
            .try_inverse()
            .ok_or_else(|| Error::Precondition("metric is singular".into()))?;
        let mut pm = DMatrix::zeros(n, n);
        for (c, &i) in h_idx.iter().enumerate() {
            pm[(i, c)] = 1.0;
        }
        for a in 0..q {
            for (k, &i) in m_idx.iter().enumerate() {
                pm[(i, p + a)] = b[(k, a)];
            }
        }
        let mut labels: Vec<String> = h_idx.iter().map(|&i| algebra.labels()[i].clone()).collect();
        let identity_metric = linalg::max_abs(&(metric - DMatrix::identity(q, q))) == 0.0;
        for (a, &i) in m_idx.iter().enumerate() {
            labels.push(if identity_metric {
                algebra.labels()[i].clone()
            } else {
                format!("f{}", a + 1)
            });
        }
        let alg = algebra.change_basis(&pm, labels)?;
        let binv = b.clone().try_inverse().expect("invertible");
        let lambda = match lambda {
            None => None,
            Some(ls) => {
                if ls.len() != q || ls.iter().any(|l| l.nrows() != q || l.ncols() != q) {
                    return Err(Error::Parse("lambda must hold one dim-m square matrix per m basis vector".into()));
                }
                let mut out = Vec::with_capacity(q);
                for a in 0..q {
                    let mut acc = DMatrix::zeros(q, q);
                    for k in 0..q {
                        acc += &ls[k] * b[(k, a)];
                    }
                    out.push(&binv * acc * &b);
                }
                Some(out)
            }
        };
        let mut model = Self {
            algebra: alg,
            p,
            q,
            isotropy: Vec::new(),
            lambda,
            m_frame: b,
        };
        model.isotropy = (0..p).map(|a| model.iso_matrix(a)).collect();
        model.check_reductive(tol)?;
        Ok(model)
    }

    /// The Nomizu algebra with m = V, identity metric and Λ = 0 (canonical connection).
    pub fn from_nomizu(d: &NomizuData, tol: &ToleranceConfig) -> Result<Self> {
        let l = build_lie_algebra(d, tol)?;
        let p = d.h().len();
        let n = d.dim_v();
        let h: Vec<usize> = (0..p).collect();
        let m: Vec<usize> = (p..p + n).collect();
        Self::new(&l, &h, &m, &DMatrix::identity(n, n), Some(vec![DMatrix::zeros(n, n); n]), tol)
    }

    fn iso_matrix(&self, a: usize) -> DMatrix<f64> {
        let (p, q) = (self.p, self.q);
        DMatrix::from_fn(q, q, |k, j| self.algebra.constant(a, p + j, p + k))
    }

    fn check_reductive(&self, tol: &ToleranceConfig) -> Result<()> {
        let (p, q) = (self.p, self.q);
        let scale = self.algebra.max_constant().max(1.0);
        let mut worst: f64 = 0.0;
        for a in 0..p {
            for b in 0..p {
                for k in 0..q {
                    worst = worst.max(self.algebra.constant(a, b, p + k).abs());
                }
            }
            for j in 0..q {
                for b in 0..p {
                    worst = worst.max(self.algebra.constant(a, p + j, b).abs());
                }
            }
        }
        if !tol.is_zero(worst, scale) {
            return Err(Error::invariant("decomposition g = h + m is not reductive", worst));
        }
        let mut skew: f64 = 0.0;
        for iso in &self.isotropy {
            skew = skew.max(linalg::max_abs(&(iso + iso.transpose())));
        }
        if !tol.is_zero(skew, scale) {
            return Err(Error::invariant("metric is not ad(h)-invariant", skew));
        }
        if let Some(ls) = &self.lambda {
            let mut s: f64 = 0.0;
            for l in ls {
                s = s.max(linalg::max_abs(&(l + l.transpose())));
            }
            if !tol.is_zero(s, scale) {
                return Err(Error::invariant("Λ(X) is not metric-skew", s));
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &LieAlgebraData {
        &self.algebra
    }

    pub fn dim_h(&self) -> usize {
        self.p
    }

    pub fn dim_m(&self) -> usize {
        self.q
    }

    pub fn m_frame(&self) -> &DMatrix<f64> {
        &self.m_frame
    }

    pub fn isotropy(&self) -> &[DMatrix<f64>] {
        &self.isotropy
    }

    pub fn lambda(&self) -> Option<&[DMatrix<f64>]> {
        self.lambda.as_deref()
    }

    pub fn with_lambda(mut self, lambda: Vec<DMatrix<f64>>, tol: &ToleranceConfig) -> Result<Self> {
        if lambda.len() != self.q {
            return Err(Error::DimensionMismatch(lambda.len(), self.q));
        }
        self.lambda = Some(lambda);
        self.check_reductive(tol)?;
        Ok(self)
    }

    pub fn m_labels(&self) -> &[String] {
        &self.algebra.labels()[self.p..]
    }

    /// [f_a, f_b]_m.
    pub fn bracket_m(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let full = self.algebra.bracket(&self.embed_m(x), &self.embed_m(y));
        full.rows(self.p, self.q).into_owned()
    }

    /// [X, Y]_h.
    pub fn bracket_h(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let full = self.algebra.bracket(&self.embed_m(x), &self.embed_m(y));
        full.rows(0, self.p).into_owned()
    }

    fn embed_m(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut v = DVector::zeros(self.p + self.q);
        v.rows_mut(self.p, self.q).copy_from(x);
        v
    }

    fn unit(&self, a: usize) -> DVector<f64> {
        DVector::from_fn(self.q, |r, _| if r == a { 1.0 } else { 0.0 })
    }

    fn lambda_of(lambda: &[DMatrix<f64>], x: &DVector<f64>) -> DMatrix<f64> {
        let q = x.len();
        let mut acc = DMatrix::zeros(q, q);
        for (c, l) in lambda.iter().enumerate() {
            if x[c] != 0.0 {
                acc += l * x[c];
            }
        }
        acc
    }

    fn iso_of(&self, h: &DVector<f64>) -> DMatrix<f64> {
        let mut acc = DMatrix::zeros(self.q, self.q);
        for (a, m) in self.isotropy.iter().enumerate() {
            if h[a] != 0.0 {
                acc += m * h[a];
            }
        }
        acc
    }

    /// ⟨[X,Y]_m, Z⟩ + ⟨Y, [X,Z]_m⟩ = 0 for all basis triples.
    pub fn naturally_reductive_check(&self, tol: &ToleranceConfig) -> CheckResult {
        let q = self.q;
        let mut worst: f64 = 0.0;
        for x in 0..q {
            for y in 0..q {
                let xy = self.bracket_m(&self.unit(x), &self.unit(y));
                for z in 0..q {
                    let xz = self.bracket_m(&self.unit(x), &self.unit(z));
                    worst = worst.max((xy[z] + xz[y]).abs());
                }
            }
        }
        CheckResult::from_residual(tol, worst, self.algebra.max_constant())
    }

    /// Λ^g(f_a) for each orthonormal m-basis vector.
    pub fn levi_civita_map(&self) -> Vec<DMatrix<f64>> {
        let q = self.q;
        // br[a][b] = [f_a, f_b]_m
        let br: Vec<Vec<DVector<f64>>> = (0..q)
            .map(|a| (0..q).map(|b| self.bracket_m(&self.unit(a), &self.unit(b))).collect())
            .collect();
        (0..q)
            .map(|x| {
                DMatrix::from_fn(q, q, |k, y| {
                    let u = br[k][x][y] + br[k][y][x];
                    0.5 * br[x][y][k] + 0.5 * u
                })
            })
            .collect()
    }

    /// Full torsion tensor t[a][b][c] = g(T(f_a, f_b), f_c).
    fn torsion_tensor(&self, lambda: &[DMatrix<f64>]) -> Vec<f64> {
        let q = self.q;
        let mut t = vec![0.0; q * q * q];
        for a in 0..q {
            for b in 0..q {
                let v = lambda[a].column(b) - lambda[b].column(a) - self.bracket_m(&self.unit(a), &self.unit(b));
                for c in 0..q {
                    t[(a * q + b) * q + c] = v[c];
                }
            }
        }
        t
    }

    pub fn invariant_torsion(&self, lambda: &[DMatrix<f64>]) -> Result<TorsionResult> {
        if lambda.len() != self.q {
            return Err(Error::DimensionMismatch(lambda.len(), self.q));
        }
        let q = self.q;
        let t = self.torsion_tensor(lambda);
        let at = |a: usize, b: usize, c: usize| t[(a * q + b) * q + c];
        let mut form = Multivector::zero(q);
        let mut worst: f64 = 0.0;
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    let skew = (at(a, b, c) + at(b, c, a) + at(c, a, b) - at(b, a, c) - at(a, c, b) - at(c, b, a)) / 6.0;
                    worst = worst.max((at(a, b, c) - skew).abs());
                    if a < b && b < c {
                        form = &form + &Multivector::term(q, &[a + 1, b + 1, c + 1], skew)?;
                    }
                }
            }
        }
        Ok(TorsionResult {
            torsion: form,
            non_skew_residual: worst,
        })
    }

    /// R(f_a, f_b) as an endomorphism of m.
    pub fn curvature_endo(&self, lambda: &[DMatrix<f64>], a: usize, b: usize) -> DMatrix<f64> {
        let (x, y) = (self.unit(a), self.unit(b));
        let la = &lambda[a];
        let lb = &lambda[b];
        la * lb - lb * la - Self::lambda_of(lambda, &self.bracket_m(&x, &y)) - self.iso_of(&self.bracket_h(&x, &y))
    }

    /// Curvature operator (symmetry not enforced; see `symmetry_residual`).
    pub fn invariant_curvature(&self, lambda: &[DMatrix<f64>]) -> Result<CurvatureOperator> {
        if lambda.len() != self.q {
            return Err(Error::DimensionMismatch(lambda.len(), self.q));
        }
        let q = self.q;
        let pairs = pair_list(q);
        let mut m = DMatrix::zeros(pairs.len(), pairs.len());
        for (r, &(a, b)) in pairs.iter().enumerate() {
            let e = self.curvature_endo(lambda, a - 1, b - 1);
            for (c, &(k, l)) in pairs.iter().enumerate() {
                // g(R(f_a,f_b) f_k, f_l)
                m[(r, c)] = e[(l - 1, k - 1)];
            }
        }
        CurvatureOperator::from_matrix_unchecked(q, m)
    }

    pub fn ricci_riemannian(&self) -> Result<DMatrix<f64>> {
        Ok(self.invariant_curvature(&self.levi_civita_map())?.ricci())
    }

    /// Annihilation by every Λ(X) and by the isotropy action.
    pub fn parallelism_check(&self, lambda: &[DMatrix<f64>], tensor: &Tensor, tol: &ToleranceConfig) -> Result<CheckResult> {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 1.0;
        let ops: Vec<&DMatrix<f64>> = lambda.iter().chain(self.isotropy.iter()).collect();
        for op in ops {
            let a = SkewEndo::new(op.clone())?;
            match tensor {
                Tensor::Form(w) => {
                    if w.dim() != self.q {
                        return Err(Error::DimensionMismatch(w.dim(), self.q));
                    }
                    scale = scale.max(w.max_abs() * linalg::max_abs(op));
                    worst = worst.max(act_on_form(&a, w)?.max_abs());
                }
                Tensor::Curvature(r) => {
                    if r.dim() != self.q {
                        return Err(Error::DimensionMismatch(r.dim(), self.q));
                    }
                    let d = action_matrix(&a, 2);
                    let comm = &d * r.matrix() - r.matrix() * &d;
                    scale = scale.max(linalg::max_abs(r.matrix()) * linalg::max_abs(op));
                    worst = worst.max(linalg::max_abs(&comm));
                }
            }
        }
        Ok(CheckResult::from_residual(tol, worst, scale))
    }

    /// Forms of degree k annihilated by every Λ(X) and the isotropy action.
    pub fn parallel_forms(&self, lambda: &[DMatrix<f64>], k: usize, tol: &ToleranceConfig) -> Result<Vec<Multivector>> {
        let len = basis_masks(self.q, k).len();
        let mut rows: Vec<DMatrix<f64>> = Vec::new();
        for op in lambda.iter().chain(self.isotropy.iter()) {
            rows.push(action_matrix(&SkewEndo::new(op.clone())?, k));
        }
        if rows.is_empty() {
            return Ok((0..len)
                .map(|i| Multivector::from_dense(self.q, k, &DVector::from_fn(len, |r, _| if r == i { 1.0 } else { 0.0 })))
                .collect());
        }
        let mut stacked = DMatrix::zeros(rows.len() * len, len);
        for (b, r) in rows.iter().enumerate() {
            stacked.view_mut((b * len, 0), (len, len)).copy_from(r);
        }
        let ker = linalg::null_space(&stacked, tol.eps_rank);
        Ok((0..ker.ncols())
            .map(|c| Multivector::from_dense(self.q, k, &ker.column(c).into_owned()))
            .collect())
    }

    /// Invariant exterior derivative dω(X0..Xk) = Σ_{i<j} (-1)^{i+j} ω([Xi,Xj]_m, X0..^i..^j..Xk).
    pub fn invariant_d(&self, form: &Multivector, tol: &ToleranceConfig) -> Result<Multivector> {
        let q = self.q;
        if form.dim() != q {
            return Err(Error::DimensionMismatch(form.dim(), q));
        }
        let mut inv: f64 = 0.0;
        for iso in &self.isotropy {
            inv = inv.max(act_on_form(&SkewEndo::new(iso.clone())?, form)?.max_abs());
        }
        let scale = form.max_abs() * self.algebra.max_constant().max(1.0);
        if !tol.is_zero(inv, scale) {
            return Err(Error::Precondition(format!("form is not ad(h)-invariant (residual {inv:e})")));
        }
        let mut out = Multivector::zero(q);
        let grades: Vec<usize> = {
            let mut g: Vec<usize> = form.terms().iter().map(|(i, _)| i.len()).collect();
            g.sort_unstable();
            g.dedup();
            g
        };
        for k in grades {
            let part = form.grade_part(k);
            if k == 0 || k >= q {
                continue;
            }
            for mask in basis_masks(q, k + 1) {
                let xs = mask_indices(mask);
                let mut s = 0.0;
                for i in 0..xs.len() {
                    for j in i + 1..xs.len() {
                        let br = self.bracket_m(&self.unit(xs[i] - 1), &self.unit(xs[j] - 1));
                        let mut args = vec![br];
                        for (r, &x) in xs.iter().enumerate() {
                            if r != i && r != j {
                                args.push(self.unit(x - 1));
                            }
                        }
                        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                        s += sign * part.eval(&args);
                    }
                }
                out = &out + &Multivector::term(q, &xs, s)?;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> ModelJson {
        ModelJson {
            algebra: self.algebra.to_json(0.0),
            h: (0..self.p).collect(),
            m: (self.p..self.p + self.q).collect(),
            metric: linalg::matrix_to_rows(&DMatrix::identity(self.q, self.q)),
            lambda: self
                .lambda
                .as_ref()
                .map(|ls| ls.iter().map(linalg::matrix_to_rows).collect()),
            isotropy: Some(self.isotropy.iter().map(linalg::matrix_to_rows).collect()),
        }
    }

    pub fn from_json(j: &ModelJson, tol: &ToleranceConfig) -> Result<Self> {
        let alg = LieAlgebraData::from_json(&j.algebra)?;
        let metric = linalg::rows_to_matrix(&j.metric).ok_or_else(|| Error::Parse("ragged metric".into()))?;
        let lambda = match &j.lambda {
            None => None,
            Some(ls) => Some(
                ls.iter()
                    .map(|rows| linalg::rows_to_matrix(rows).ok_or_else(|| Error::Parse("ragged lambda matrix".into())))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let model = Self::new(&alg, &j.h, &j.m, &metric, lambda, tol)?;
        if let Some(iso) = &j.isotropy {
            if iso.len() != model.p {
                return Err(Error::Parse("one isotropy matrix per h element required".into()));
            }
            let ident = linalg::max_abs(&(&metric - DMatrix::identity(model.q, model.q))) <= tol.eps_coeff;
            if ident {
                for (given, computed) in iso.iter().zip(&model.isotropy) {
                    let g = linalg::rows_to_matrix(given).ok_or_else(|| Error::Parse("ragged isotropy matrix".into()))?;
                    if g.shape() != computed.shape() || linalg::max_abs(&(&g - computed)) > tol.eps_coeff * computed.amax().max(1.0) * 10.0 {
                        return Err(Error::invariant("isotropy matrices disagree with the brackets", linalg::max_abs(&(g - computed))));
                    }
                }
            }
        }
        Ok(model)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelJson {
    pub algebra: AlgebraJson,
    pub h: Vec<usize>,
    pub m: Vec<usize>,
    pub metric: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isotropy: Option<Vec<Vec<Vec<f64>>>>,
}

/// Einstein iff Ric - (tr/n)Id vanishes; returns the Einstein constant tr/n.
pub fn einstein_check(ric: &DMatrix<f64>, tol: &ToleranceConfig) -> (bool, f64) {
    let n = ric.nrows();
    let lam = ric.trace() / n as f64;
    let dev = linalg::max_abs(&(ric - DMatrix::identity(n, n) * lam));
    (tol.is_zero(dev, linalg::max_abs(ric)), lam)
}

/// Σ_i (e_i⌟Ω) ∧ (e_i⌟T), the value of dΩ for a ∇-parallel 2-form Ω.
pub fn parallel_two_form_d(omega: &Multivector, t: &Multivector) -> Result<Multivector> {
    let mut s = Multivector::zero(t.dim());
    for i in 1..=t.dim() {
        s = &s + &omega.contract(i).wedge(&t.contract(i))?;
    }
    Ok(s)
}
