//! 2-forms as skew endomorphisms, the derivation action on forms, Lie closures,
//! isotropy algebras and invariant-subspace decomposition.
//!
//! e_ij corresponds to E_ij with E_ij e_i = e_j, E_ij e_j = -e_i, so that
//! w(X, Y) = g(A X, Y).

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exterior::{basis_masks, mask_indices, pair_list, Multivector};
use crate::linalg;
use crate::tolerance::ToleranceConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct SkewEndo {
    matrix: DMatrix<f64>,
}

impl SkewEndo {
    /// Accepts matrices with |A + Aᵀ| ≤ 1e-9·max(1, |A|); stores the exact skew part.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(matrix.nrows(), matrix.ncols()));
        }
        let res = linalg::max_abs(&(&matrix + matrix.transpose()));
        if res > 1e-9 * linalg::max_abs(&matrix).max(1.0) {
            return Err(Error::NotAntisymmetric(res));
        }
        Ok(Self {
            matrix: (&matrix - matrix.transpose()) * 0.5,
        })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(n, n),
        }
    }

    /// E_ij (1-based): e_i ↦ e_j, e_j ↦ -e_i.
    pub fn e(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(j - 1, i - 1)] += 1.0;
        m[(i - 1, j - 1)] -= 1.0;
        Self { matrix: m }
    }

    pub fn from_two_form(w: &Multivector) -> Result<Self> {
        w.check_grade(2)?;
        let n = w.dim();
        let mut m = DMatrix::zeros(n, n);
        for (idx, c) in w.terms() {
            let (i, j) = (idx[0] - 1, idx[1] - 1);
            m[(j, i)] += c;
            m[(i, j)] -= c;
        }
        Ok(Self { matrix: m })
    }

    pub fn to_two_form(&self) -> Multivector {
        let n = self.dim();
        let mut w = Multivector::zero(n);
        for (i, j) in pair_list(n) {
            let c = self.matrix[(j - 1, i - 1)];
            if c != 0.0 {
                w = &w + &Multivector::term(n, &[i, j], c).expect("valid pair");
            }
        }
        w
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn bracket(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        }
    }

    /// ⟨A, B⟩ = -½ tr(AB), matching the form inner product.
    pub fn inner(&self, other: &Self) -> f64 {
        -0.5 * (&self.matrix * &other.matrix).trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: &self.matrix * s,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    /// Coordinates in the lexicographic e_ij basis.
    pub fn to_dense(&self) -> DVector<f64> {
        self.to_two_form().to_dense(2)
    }

    pub fn from_dense(n: usize, v: &DVector<f64>) -> Self {
        Self::from_two_form(&Multivector::from_dense(n, 2, v)).expect("grade 2")
    }
}

/// Derivation action (A·a)(X1..Xk) = -Σ a(X1, .., A Xi, .., Xk).
pub fn act_on_form(a: &SkewEndo, form: &Multivector) -> Result<Multivector> {
    let n = form.dim();
    if a.dim() != n {
        return Err(Error::DimensionMismatch(a.dim(), n));
    }
    let m = a.matrix();
    let mut out = Multivector::zero(n);
    for (mask, c) in form.mask_terms() {
        let idx = mask_indices(mask);
        for r in 0..idx.len() {
            // e^i ↦ -Σ_j A[i][j] e^j in slot r
            for j in 1..=n {
                let aij = m[(idx[r] - 1, j - 1)];
                if aij == 0.0 {
                    continue;
                }
                let mut new_idx = idx.clone();
                new_idx[r] = j;
                out = &out + &Multivector::term(n, &new_idx, -c * aij)?;
            }
        }
    }
    Ok(out)
}

/// Matrix of A acting on Λᵏ in the lexicographic basis.
pub fn action_matrix(a: &SkewEndo, k: usize) -> DMatrix<f64> {
    let n = a.dim();
    let masks = basis_masks(n, k);
    let cols: Vec<DVector<f64>> = masks
        .iter()
        .map(|&m| {
            let b = Multivector::from_dense(
                n,
                k,
                &DVector::from_fn(masks.len(), |r, _| if masks[r] == m { 1.0 } else { 0.0 }),
            );
            act_on_form(a, &b).expect("same dim").to_dense(k)
        })
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(0, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis (under -½tr) of a Lie subalgebra of so(n).
#[derive(Clone, Debug)]
pub struct SubalgebraBasis {
    dim_v: usize,
    generators: Vec<SkewEndo>,
}

impl SubalgebraBasis {
    pub fn empty(dim_v: usize) -> Self {
        Self {
            dim_v,
            generators: Vec::new(),
        }
    }

    /// Orthonormalizes `gens` without closing; errors if the span is not a subalgebra.
    pub fn from_span(dim_v: usize, gens: &[SkewEndo], tol: &ToleranceConfig) -> Result<Self> {
        let mut b = Self::empty(dim_v);
        for g in gens {
            b.try_insert(g, tol.eps_rank);
        }
        let res = b.closure_residual();
        if res > tol.eps_rank.max(tol.eps_coeff) * 10.0 {
            return Err(Error::NotClosed(res));
        }
        Ok(b)
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[SkewEndo] {
        &self.generators
    }

    fn try_insert(&mut self, g: &SkewEndo, eps: f64) -> bool {
        let mut v = g.to_dense();
        let scale = v.norm().max(1.0);
        for _ in 0..2 {
            for q in &self.generators {
                let qd = q.to_dense();
                let p = qd.dot(&v);
                v -= qd * p;
            }
        }
        let nv = v.norm();
        if nv > eps * scale {
            self.generators.push(SkewEndo::from_dense(self.dim_v, &(v / nv)));
            true
        } else {
            false
        }
    }

    /// Distance of `a` from the span.
    pub fn residual_of(&self, a: &SkewEndo) -> f64 {
        let mut v = a.to_dense();
        for q in &self.generators {
            let qd = q.to_dense();
            let p = qd.dot(&v);
            v -= qd * p;
        }
        v.norm()
    }

    pub fn contains(&self, a: &SkewEndo, tol: &ToleranceConfig) -> bool {
        self.residual_of(a) <= tol.eps_rank * a.to_dense().norm().max(1.0)
    }

    /// Largest distance of a bracket of basis elements from the span.
    pub fn closure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                worst = worst.max(self.residual_of(&a.bracket(b)));
            }
        }
        worst
    }

    /// Largest |A·form| over the basis.
    pub fn annihilation_residual(&self, form: &Multivector) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for g in &self.generators {
            worst = worst.max(act_on_form(g, form)?.max_abs());
        }
        Ok(worst)
    }
}

/// Smallest bracket-closed subspace containing `gens`.
pub fn lie_closure(dim_v: usize, gens: &[SkewEndo], tol: &ToleranceConfig) -> SubalgebraBasis {
    let mut b = SubalgebraBasis::empty(dim_v);
    for g in gens {
        b.try_insert(g, tol.eps_rank);
    }
    let cap = dim_v * (dim_v - 1) / 2;
    let mut done = 0;
    for _ in 0..=cap {
        let current = b.generators.len();
        let mut added = false;
        for i in 0..current {
            let start = if i < done { done } else { i + 1 };
            for j in start..current {
                let c = b.generators[i].bracket(&b.generators[j]);
                added |= b.try_insert(&c, tol.eps_rank);
            }
        }
        done = current;
        if !added || b.generators.len() == cap {
            break;
        }
    }
    b
}

/// g_T: the Lie algebra generated by all e_i ⌟ T.
pub fn g_t(t: &Multivector, tol: &ToleranceConfig) -> Result<SubalgebraBasis> {
    t.check_grade(3)?;
    let n = t.dim();
    let gens: Vec<SkewEndo> = (1..=n)
        .map(|i| SkewEndo::from_two_form(&t.contract(i)))
        .collect::<Result<_>>()?;
    Ok(lie_closure(n, &gens, tol))
}

/// iso(a): all A in so(n) with A·a = 0.
pub fn isotropy_algebra(form: &Multivector, tol: &ToleranceConfig) -> Result<SubalgebraBasis> {
    let n = form.dim();
    let pairs = pair_list(n);
    let mut cols = Vec::with_capacity(pairs.len());
    for &(i, j) in &pairs {
        cols.push(act_on_form(&SkewEndo::e(n, i, j), form)?);
    }
    // stack all grades so mixed-grade inputs are handled
    let mut rows: Vec<DVector<f64>> = Vec::new();
    for img in &cols {
        let mut v = Vec::new();
        for k in 0..=n {
            v.extend(img.to_dense(k).iter());
        }
        rows.push(DVector::from_vec(v));
    }
    let mat = DMatrix::from_columns(&rows);
    let ker = linalg::null_space(&mat, tol.eps_rank);
    let mut b = SubalgebraBasis::empty(n);
    for c in 0..ker.ncols() {
        b.generators
            .push(SkewEndo::from_dense(n, &ker.column(c).into_owned()));
    }
    Ok(b)
}

/// Commutant {C : [C, A] = 0 for all A in gens}, as a list of n×n matrices.
pub fn commutant(n: usize, gens: &[SkewEndo], eps_rank: f64) -> Vec<DMatrix<f64>> {
    if gens.is_empty() {
        return (0..n * n)
            .map(|p| DMatrix::from_fn(n, n, |r, c| if r * n + c == p { 1.0 } else { 0.0 }))
            .collect();
    }
    let mut blocks = DMatrix::zeros(n * n * gens.len(), n * n);
    for p in 0..n * n {
        let c = DMatrix::from_fn(n, n, |r, col| if r * n + col == p { 1.0 } else { 0.0 });
        for (g, a) in gens.iter().enumerate() {
            let comm = &c * a.matrix() - a.matrix() * &c;
            for (q, v) in comm.iter().enumerate() {
                blocks[(g * n * n + q, p)] = *v;
            }
        }
    }
    let ker = linalg::null_space(&blocks, eps_rank);
    (0..ker.ncols())
        .map(|k| DMatrix::from_fn(n, n, |r, c| ker[(r * n + c, k)]))
        .collect()
}

/// Orthogonal decomposition of R^n into minimal invariant subspaces of `h`.
///
/// Each subspace is returned as a matrix with orthonormal columns.
pub fn invariant_subspaces(
    h: &SubalgebraBasis,
    seed: u64,
    tol: &ToleranceConfig,
) -> Vec<DMatrix<f64>> {
    invariant_subspaces_of(h.dim_v(), h.generators(), seed, tol)
}

pub fn invariant_subspaces_of(
    n: usize,
    gens: &[SkewEndo],
    seed: u64,
    tol: &ToleranceConfig,
) -> Vec<DMatrix<f64>> {
    let comm = commutant(n, gens, tol.eps_rank);
    let mut best: Vec<DMatrix<f64>> = vec![DMatrix::identity(n, n)];
    for attempt in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let mut c = DMatrix::zeros(n, n);
        for b in &comm {
            c += b * linalg::gaussian(&mut rng);
        }
        let s = &c + c.transpose();
        let (vals, vecs) = linalg::sym_eigen(&s);
        let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
        let gap = 1e-6 * scale;
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, &v) in vals.iter().enumerate() {
            match groups.last_mut() {
                Some(g) if (v - vals[*g.last().unwrap()]).abs() <= gap => g.push(i),
                _ => groups.push(vec![i]),
            }
        }
        let spaces: Vec<DMatrix<f64>> = groups
            .iter()
            .map(|g| {
                let cols: Vec<DVector<f64>> = g.iter().map(|&i| vecs.column(i).into_owned()).collect();
                DMatrix::from_columns(&cols)
            })
            .collect();
        if spaces.len() > best.len() {
            best = spaces;
        }
    }
    best.sort_by_key(leading_index);
    best
}

/// First coordinate axis on which the orthogonal projector onto `s` is nonzero.
fn leading_index(s: &DMatrix<f64>) -> usize {
    let p = s * s.transpose();
    (0..p.nrows()).find(|&i| p[(i, i)] > 1e-6).unwrap_or(p.nrows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torsion::sigma_t;
    use proptest::prelude::*;
    use rand::Rng;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn rand_form(n: usize, k: usize, seed: u64) -> Multivector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = basis_masks(n, k).len();
        Multivector::from_dense(n, k, &DVector::from_fn(len, |_, _| rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn two_form_endo_conventions() {
        let a = SkewEndo::from_two_form(&Multivector::e(3, &[1, 2])).unwrap();
        let v = a.apply(&DVector::from_vec(vec![1.0, 0.0, 0.0]));
        assert_eq!(v, DVector::from_vec(vec![0.0, 1.0, 0.0]));
        let w = &Multivector::e(4, &[1, 2]) + &Multivector::e(4, &[3, 4]);
        let b = SkewEndo::from_two_form(&w).unwrap();
        let mut want = DMatrix::zeros(4, 4);
        want[(1, 0)] = 1.0;
        want[(0, 1)] = -1.0;
        want[(3, 2)] = 1.0;
        want[(2, 3)] = -1.0;
        assert_eq!(b.matrix(), &want);
        assert!((b.inner(&b) - w.norm_sq()).abs() < 1e-15);
        assert!(SkewEndo::new(DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn action_examples() {
        let e12 = SkewEndo::e(3, 1, 2);
        assert!(act_on_form(&e12, &Multivector::e(3, &[1, 2])).unwrap().is_zero());
        assert!(act_on_form(&SkewEndo::e(3, 1, 3), &Multivector::e(3, &[1, 2, 3])).unwrap().is_zero());
        let (rho, lam) = (1.0, 2.0);
        let t = Multivector::from_terms(5, &[(&[1, 2, 5], -rho), (&[3, 4, 5], -lam)]).unwrap();
        let x = SkewEndo::from_two_form(&t.contract(5)).unwrap();
        assert!(act_on_form(&x, &t).unwrap().max_abs() < 1e-15);
        // (A·e^1)(e_2) = -e^1(A e_2) = 1
        assert_eq!(act_on_form(&e12, &Multivector::e(3, &[1])).unwrap(), Multivector::e(3, &[2]));
    }

    #[test]
    fn closure_examples() {
        let t = tol();
        let so3 = [SkewEndo::e(3, 2, 3), SkewEndo::e(3, 1, 3), SkewEndo::e(3, 1, 2)];
        assert_eq!(lie_closure(3, &so3, &t).dim(), 3);
        assert_eq!(lie_closure(3, &so3[2..], &t).dim(), 1);
        let a = SkewEndo::e(4, 1, 3).add(&SkewEndo::e(4, 2, 4));
        let b = SkewEndo::e(4, 1, 4).add(&SkewEndo::e(4, 2, 3).scale(-1.0));
        let c = lie_closure(4, &[a, b], &t);
        assert_eq!(c.dim(), 3);
        assert!(c.closure_residual() < 1e-12);
    }

    #[test]
    fn g_t_examples() {
        let t = tol();
        assert_eq!(g_t(&Multivector::e(3, &[1, 2, 3]), &t).unwrap().dim(), 3);
        let tt = &Multivector::e(6, &[1, 2, 3]) + &Multivector::e(6, &[4, 5, 6]);
        let g = g_t(&tt, &t).unwrap();
        assert_eq!(g.dim(), 6);
        let subs = invariant_subspaces(&g, 1, &t);
        assert_eq!(subs.len(), 2);
        let p0 = &subs[0] * subs[0].transpose();
        let mut want = DMatrix::zeros(6, 6);
        for i in 0..3 {
            want[(i, i)] = 1.0;
        }
        assert!((p0 - want).norm() < 1e-9);
        assert_eq!(g_t(&Multivector::zero(5), &t).unwrap().dim(), 0);
    }

    #[test]
    fn isotropy_examples() {
        let t = tol();
        let form = |rho: f64, lam: f64| {
            Multivector::from_terms(5, &[(&[1, 2, 5], -rho), (&[3, 4, 5], -lam)]).unwrap()
        };
        assert_eq!(isotropy_algebra(&form(1.0, 2.0), &t).unwrap().dim(), 2);
        assert_eq!(isotropy_algebra(&form(1.5, 1.5), &t).unwrap().dim(), 4);
        assert_eq!(isotropy_algebra(&Multivector::e(3, &[1, 2, 3]), &t).unwrap().dim(), 3);
    }

    #[test]
    fn invariant_subspace_examples() {
        let t = tol();
        let h = lie_closure(3, &[SkewEndo::e(3, 1, 2)], &t);
        let subs = invariant_subspaces(&h, 7, &t);
        assert_eq!(subs.iter().map(|s| s.ncols()).collect::<Vec<_>>(), vec![2, 1]);
        let so3 = lie_closure(3, &[SkewEndo::e(3, 2, 3), SkewEndo::e(3, 1, 3)], &t);
        assert_eq!(invariant_subspaces(&so3, 7, &t).len(), 1);
    }

    proptest! {
        #[test]
        fn contraction_acts_by_sigma(n in 3usize..=6, seed in any::<u64>(), xs in prop::collection::vec(-1.0f64..1.0, 6)) {
            let t = rand_form(n, 3, seed);
            let x = &xs[..n];
            let a = SkewEndo::from_two_form(&t.contract_vec(x)).unwrap();
            let lhs = act_on_form(&a, &t).unwrap();
            // (X⌟T)·T evaluated on (Y1,Y2,Y3) equals σ_T(Y1,Y2,Y3,X), i.e. -X⌟σ_T
            let rhs = sigma_t(&t).unwrap().contract_vec(x).scale(-1.0);
            prop_assert!(lhs.approx_eq(&rhs, 1e-10));
        }

        #[test]
        fn action_is_derivation_and_bracket_compatible(seed in any::<u64>()) {
            let n = 5;
            let a = SkewEndo::from_two_form(&rand_form(n, 2, seed)).unwrap();
            let b = SkewEndo::from_two_form(&rand_form(n, 2, seed ^ 1)).unwrap();
            let p = rand_form(n, 1, seed ^ 2);
            let q = rand_form(n, 2, seed ^ 3);
            let lhs = act_on_form(&a, &p.wedge(&q).unwrap()).unwrap();
            let rhs = &act_on_form(&a, &p).unwrap().wedge(&q).unwrap() + &p.wedge(&act_on_form(&a, &q).unwrap()).unwrap();
            prop_assert!(lhs.approx_eq(&rhs, 1e-12));
            // action on 2-forms is the commutator of endomorphisms
            let w = act_on_form(&a, &q).unwrap();
            let qa = SkewEndo::from_two_form(&q).unwrap();
            prop_assert!(SkewEndo::from_two_form(&w).unwrap().matrix().relative_eq(a.bracket(&qa).matrix(), 1e-12, 1e-12));
            // representation property
            let ab = act_on_form(&a.bracket(&b), &q).unwrap();
            let comm = &act_on_form(&a, &act_on_form(&b, &q).unwrap()).unwrap() - &act_on_form(&b, &act_on_form(&a, &q).unwrap()).unwrap();
            prop_assert!(ab.approx_eq(&comm, 1e-12));
        }

        #[test]
        fn isotropy_is_closed_and_annihilates(n in 3usize..=6, seed in any::<u64>(), sparse in 0usize..3) {
            let mut t = rand_form(n, 3, seed);
            if sparse > 0 {
                t = &Multivector::e(n, &[1, 2, 3]) + &t.grade_part(3).normalized(0.6);
            }
            let iso = isotropy_algebra(&t, &tol()).unwrap();
            prop_assert!(iso.closure_residual() < 1e-9);
            prop_assert!(iso.annihilation_residual(&t).unwrap() < 1e-9);
        }

        #[test]
        fn g_t_inside_isotropy_when_sigma_vanishes(k in 1usize..=2, seed in any::<u64>()) {
            // sums of 3-forms on orthogonal 3-planes have σ_T = 0
            let n = 3 * k;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut t = Multivector::zero(n);
            for b in 0..k {
                let c = rng.gen_range(0.5..2.0);
                t = &t + &Multivector::e(n, &[3 * b + 1, 3 * b + 2, 3 * b + 3]).scale(c);
            }
            let q = linalg::random_rotation(n, &mut rng);
            let t = t.rotate(&q);
            prop_assert!(sigma_t(&t).unwrap().max_abs() < 1e-12);
            let g = g_t(&t, &tol()).unwrap();
            let iso = isotropy_algebra(&t, &tol()).unwrap();
            for a in g.generators() {
                prop_assert!(iso.residual_of(a) < 1e-8);
            }
        }

        #[test]
        fn invariant_subspaces_partition(seed in any::<u64>(), which in 0usize..3) {
            let t = tol();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 6;
            let gens: Vec<SkewEndo> = match which {
                0 => vec![SkewEndo::e(n, 1, 2), SkewEndo::e(n, 4, 5).add(&SkewEndo::e(n, 5, 6))],
                1 => g_t(&(&Multivector::e(n, &[1, 2, 3]) + &Multivector::e(n, &[4, 5, 6])), &t).unwrap().generators().to_vec(),
                _ => vec![SkewEndo::e(n, 1, 2).add(&SkewEndo::e(n, 3, 4))],
            };
            let q = linalg::random_rotation(n, &mut rng);
            let gens: Vec<SkewEndo> = gens.iter().map(|g| SkewEndo::new(&q * g.matrix() * q.transpose()).unwrap()).collect();
            let subs = invariant_subspaces_of(n, &gens, seed, &t);
            let all = DMatrix::from_columns(&subs.iter().flat_map(|s| s.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>()).collect::<Vec<_>>());
            prop_assert_eq!(all.ncols(), n);
            prop_assert!((all.transpose() * &all - DMatrix::<f64>::identity(n, n)).norm() < 1e-8);
            for s in &subs {
                let p = s * s.transpose();
                for g in &gens {
                    let leak = (DMatrix::<f64>::identity(n, n) - &p) * g.matrix() * s;
                    prop_assert!(leak.norm() < 1e-8);
                }
            }
        }
    }
}
