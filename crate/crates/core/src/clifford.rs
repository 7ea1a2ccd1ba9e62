//! Real Clifford algebra C(R^n, -⟨,⟩): e_i e_i = -1, e_i e_j = -e_j e_i.

use std::ops::{Add, Sub};

use serde::Serialize;

use crate::curvature::CurvatureOperator;
use crate::error::{Error, Result};
use crate::exterior::{grade_of, pair_list, wedge_sign, Multivector, MAX_DIM};
use crate::tolerance::ToleranceConfig;

/// Dense element with one slot per basis monomial (indexed by bitmask).
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    dim: usize,
    coeffs: Vec<f64>,
}

/// Product of basis monomials e_A e_B = sign · e_{A xor B}.
pub fn monomial_mul(a: u32, b: u32) -> (f64, u32) {
    let mut s = wedge_sign(a, b);
    if (a & b).count_ones() % 2 == 1 {
        s = -s;
    }
    (s, a ^ b)
}

impl CliffordElement {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Self {
            dim,
            coeffs: vec![0.0; 1 << dim],
        }
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        let mut z = Self::zero(dim);
        z.coeffs[0] = c;
        z
    }

    /// c · e_{i1} e_{i2} … (indices in any order; repeats contract to -1).
    pub fn monomial(dim: usize, idx: &[usize], c: f64) -> Result<Self> {
        if idx.iter().any(|&i| i == 0 || i > dim) {
            return Err(Error::BadIndex(idx.to_vec(), dim));
        }
        let mut sign = c;
        let mut mask = 0u32;
        for &i in idx {
            let (s, m) = monomial_mul(mask, 1 << (i - 1));
            sign *= s;
            mask = m;
        }
        let mut z = Self::zero(dim);
        z.coeffs[mask as usize] = sign;
        Ok(z)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff_mask(&self, mask: u32) -> f64 {
        self.coeffs[mask as usize]
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn cl_mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = Self::zero(self.dim);
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb == 0.0 {
                    continue;
                }
                let (s, m) = monomial_mul(a as u32, b as u32);
                out.coeffs[m as usize] += s * ca * cb;
            }
        }
        Ok(out)
    }

    pub fn grade_part(&self, k: usize) -> Result<Multivector> {
        if k > self.dim {
            return Err(Error::GradeOutOfRange(k, self.dim));
        }
        let mut m = Multivector::zero(self.dim);
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if grade_of(mask as u32) == k {
                m.add_mask(mask as u32, c);
            }
        }
        Ok(m)
    }

    /// Everything except the scalar part, as a multivector.
    pub fn non_scalar_part(&self) -> Multivector {
        let mut m = Multivector::zero(self.dim);
        for (mask, &c) in self.coeffs.iter().enumerate().skip(1) {
            m.add_mask(mask as u32, c);
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.abs()))
    }

    /// Nonzero terms as (indices, coeff), ordered by grade then lexicographically.
    pub fn terms(&self) -> Vec<(Vec<usize>, f64)> {
        let mut m = Multivector::zero(self.dim);
        for (mask, &c) in self.coeffs.iter().enumerate() {
            m.add_mask(mask as u32, c);
        }
        m.terms()
    }
}

impl Add for &CliffordElement {
    type Output = CliffordElement;
    fn add(self, rhs: &CliffordElement) -> CliffordElement {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        CliffordElement {
            dim: self.dim,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CliffordElement {
    type Output = CliffordElement;
    fn sub(self, rhs: &CliffordElement) -> CliffordElement {
        self + &rhs.scale(-1.0)
    }
}

/// Sends e_{i1…ik} to the ordered monomial e_{i1}⋯e_{ik}.
pub fn embed_form(a: &Multivector) -> CliffordElement {
    let mut z = CliffordElement::zero(a.dim());
    for (mask, c) in a.mask_terms() {
        z.coeffs[mask as usize] += c;
    }
    z
}

/// Σ_{i<j, k<l} R(e_i,e_j,e_k,e_l) e_i e_j e_k e_l, i.e. ¼ Σ over all index quadruples.
pub fn embed_curvature(r: &CurvatureOperator) -> Result<CliffordElement> {
    let res = r.symmetry_residual();
    if res > 1e-9 * crate::linalg::max_abs(r.matrix()).max(1.0) {
        return Err(Error::NotSymmetric(res));
    }
    let n = r.dim();
    let pairs = pair_list(n);
    let mut z = CliffordElement::zero(n);
    for (p, &(i, j)) in pairs.iter().enumerate() {
        let a = (1u32 << (i - 1)) | (1 << (j - 1));
        for (q, &(k, l)) in pairs.iter().enumerate() {
            let c = r.matrix()[(p, q)];
            if c == 0.0 {
                continue;
            }
            let b = (1u32 << (k - 1)) | (1 << (l - 1));
            let (s, m) = monomial_mul(a, b);
            z.coeffs[m as usize] += s * c;
        }
    }
    Ok(z)
}

#[derive(Clone, Debug, Serialize)]
pub struct CliffordBianchi {
    pub is_scalar: bool,
    pub scalar: f64,
    pub max_residual: f64,
    /// Non-scalar part of T² + R.
    pub residual: Multivector,
}

/// Tests whether T² + R is a scalar in the Clifford algebra.
pub fn bianchi_clifford_check(
    t: &Multivector,
    r: &CurvatureOperator,
    tol: &ToleranceConfig,
) -> Result<CliffordBianchi> {
    t.check_grade(3)?;
    if t.dim() != r.dim() {
        return Err(Error::DimensionMismatch(t.dim(), r.dim()));
    }
    let ct = embed_form(t);
    let total = &ct.cl_mul(&ct)? + &embed_curvature(r)?;
    let residual = total.non_scalar_part();
    let max_residual = residual.max_abs();
    let scale = t.norm_sq().max(crate::linalg::max_abs(r.matrix()));
    Ok(CliffordBianchi {
        is_scalar: tol.is_zero(max_residual, scale),
        scalar: total.scalar_part(),
        max_residual,
        residual,
    })
}

#[cfg(test)]
pub(crate) fn indices_of(mask: u32) -> Vec<usize> {
    crate::exterior::mask_indices(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torsion::sigma_t;
    use nalgebra::DVector;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mono(n: usize, idx: &[usize]) -> CliffordElement {
        CliffordElement::monomial(n, idx, 1.0).unwrap()
    }

    /// Oracle: multiply monomials by explicit index shuffling (bubble sort and contraction).
    fn shuffle_product(a: &[usize], b: &[usize]) -> (f64, Vec<usize>) {
        let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
        let mut sign = 1.0;
        loop {
            let mut changed = false;
            let mut i = 0;
            while i + 1 < v.len() {
                if v[i] > v[i + 1] {
                    v.swap(i, i + 1);
                    sign = -sign;
                    changed = true;
                } else if v[i] == v[i + 1] {
                    v.drain(i..i + 2);
                    sign = -sign;
                    changed = true;
                    continue;
                }
                i += 1;
            }
            if !changed {
                return (sign, v);
            }
        }
    }

    #[test]
    fn basic_products() {
        assert_eq!(mono(3, &[1]).cl_mul(&mono(3, &[1])).unwrap(), CliffordElement::scalar(3, -1.0));
        assert_eq!(mono(3, &[1]).cl_mul(&mono(3, &[2])).unwrap(), mono(3, &[1, 2]));
        assert_eq!(mono(3, &[2, 1]), mono(3, &[1, 2]).scale(-1.0));
        for n in 3..=6 {
            let e = mono(n, &[1, 2, 3]);
            assert_eq!(e.cl_mul(&e).unwrap(), CliffordElement::scalar(n, 1.0));
        }
    }

    #[test]
    fn product_matches_shuffle_oracle() {
        for n in 3..=6usize {
            let full = 1u32 << n;
            for a in 0..full {
                for b in 0..full {
                    let (s, m) = monomial_mul(a, b);
                    let (so, vo) = shuffle_product(&indices_of(a), &indices_of(b));
                    assert_eq!(s, so);
                    assert_eq!(indices_of(m), vo);
                }
            }
        }
    }

    #[test]
    fn torsion_square_in_dim5() {
        let (rho, lam) = (1.3, 0.6);
        let t = Multivector::from_terms(5, &[(&[1, 2, 5], -rho), (&[3, 4, 5], -lam)]).unwrap();
        let c = embed_form(&t);
        let sq = c.cl_mul(&c).unwrap();
        assert!((sq.scalar_part() - (rho * rho + lam * lam)).abs() < 1e-14);
        let g4 = sq.grade_part(4).unwrap();
        assert!(g4.approx_eq(&Multivector::e(5, &[1, 2, 3, 4]).scale(-2.0 * rho * lam), 1e-14));
        assert!(sq.grade_part(6).is_err());
    }

    #[test]
    fn curvature_embedding_matches_quadruple_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 3..=5 {
            let p = n * (n - 1) / 2;
            let a = nalgebra::DMatrix::from_fn(p, p, |_, _| rng.gen_range(-1.0..1.0));
            let r = CurvatureOperator::from_matrix(n, &a + a.transpose()).unwrap();
            let mut oracle = CliffordElement::zero(n);
            for i in 1..=n {
                for j in 1..=n {
                    for k in 1..=n {
                        for l in 1..=n {
                            let v = r.value(i, j, k, l);
                            if v != 0.0 {
                                let m = CliffordElement::monomial(n, &[i, j, k, l], 0.25 * v).unwrap();
                                oracle = &oracle + &m;
                            }
                        }
                    }
                }
            }
            let got = embed_curvature(&r).unwrap();
            assert!((&got - &oracle).max_abs() < 1e-12);
            assert!(got.grade_part(2).unwrap().max_abs() < 1e-12);
        }
        let e12 = Multivector::e(3, &[1, 2]);
        let r = CurvatureOperator::from_sym_terms(3, &[(&e12, &e12, 2.5)]).unwrap();
        let z = embed_curvature(&r).unwrap();
        assert_eq!(z.scalar_part(), -2.5);
        assert!(embed_curvature(&CurvatureOperator::zero(4)).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn b1_bianchi_residual() {
        let (rho, lam) = (1.0, 2.0);
        let t = Multivector::from_terms(5, &[(&[1, 2, 5], -rho), (&[3, 4, 5], -lam)]).unwrap();
        let o1 = Multivector::e(5, &[1, 2]);
        let o2 = Multivector::e(5, &[3, 4]);
        let tol = ToleranceConfig::default();
        let good = CurvatureOperator::from_sym_terms(5, &[(&o1, &o2, 2.0 * lam * rho)]).unwrap();
        assert!(bianchi_clifford_check(&t, &good, &tol).unwrap().is_scalar);
        let bad = CurvatureOperator::zero(5);
        let chk = bianchi_clifford_check(&t, &bad, &tol).unwrap();
        assert!(!chk.is_scalar);
        assert!(chk.residual.approx_eq(&Multivector::e(5, &[1, 2, 3, 4]).scale(-4.0), 1e-14));
    }

    fn rand_form(n: usize, k: usize, seed: u64) -> Multivector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = crate::exterior::basis_masks(n, k).len();
        Multivector::from_dense(n, k, &DVector::from_fn(len, |_, _| rng.gen_range(-1.0..1.0)))
    }

    proptest! {
        #[test]
        fn torsion_square_identity(n in 3usize..=6, seed in any::<u64>()) {
            let t = rand_form(n, 3, seed);
            let c = embed_form(&t);
            let lhs = c.cl_mul(&c).unwrap();
            let rhs = &embed_form(&sigma_t(&t).unwrap().scale(-2.0)) + &CliffordElement::scalar(n, t.norm_sq());
            prop_assert!((&lhs - &rhs).max_abs() < 1e-9);
        }

        #[test]
        fn two_form_square_identity(n in 3usize..=6, seed in any::<u64>()) {
            let w = rand_form(n, 2, seed);
            let c = embed_form(&w);
            let lhs = c.cl_mul(&c).unwrap();
            let rhs = &embed_form(&w.wedge(&w).unwrap()) + &CliffordElement::scalar(n, -w.norm_sq());
            prop_assert!((&lhs - &rhs).max_abs() < 1e-9);
        }

        #[test]
        fn grade_parts_sum_back(n in 3usize..=6, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut z = CliffordElement::zero(n);
            for c in z.coeffs.iter_mut() {
                *c = rng.gen_range(-1.0..1.0);
            }
            let mut acc = Multivector::zero(n);
            for k in 0..=n {
                acc = &acc + &z.grade_part(k).unwrap();
            }
            prop_assert!((&embed_form(&acc) - &z).max_abs() < 1e-15);
        }

        #[test]
        fn product_is_associative(n in 3usize..=5, s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
            let a = embed_form(&rand_form(n, 2, s1));
            let b = embed_form(&rand_form(n, 3, s2));
            let c = embed_form(&rand_form(n, 1, s3));
            let l = a.cl_mul(&b).unwrap().cl_mul(&c).unwrap();
            let r = a.cl_mul(&b.cl_mul(&c).unwrap()).unwrap();
            prop_assert!((&l - &r).max_abs() < 1e-12);
        }
    }
}
