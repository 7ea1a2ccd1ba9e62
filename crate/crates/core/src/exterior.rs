//! Exterior algebra over R^n with the standard orientation e1..en.
//!
//! Blades are stored as bitmasks (bit i-1 set for e_i); index sets exposed to
//! callers are strictly increasing, 1-based.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 8;

pub(crate) fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect()
}

pub(crate) fn grade_of(mask: u32) -> usize {
    mask.count_ones() as usize
}

/// Sign of e_A ∧ e_B for disjoint blades: (-1)^{#pairs a in A, b in B with a > b}.
pub(crate) fn wedge_sign(a: u32, b: u32) -> f64 {
    let mut count = 0u32;
    let mut bb = b;
    while bb != 0 {
        let bit = bb.trailing_zeros();
        bb &= bb - 1;
        count += (a >> (bit + 1)).count_ones();
    }
    if count.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Bitmasks of all k-subsets of {1..n} in lexicographic order of index tuples.
pub fn basis_masks(n: usize, k: usize) -> Vec<u32> {
    fn rec(start: usize, n: usize, k: usize, cur: u32, out: &mut Vec<u32>) {
        if k == 0 {
            out.push(cur);
            return;
        }
        for i in start..n {
            if n - i < k {
                break;
            }
            rec(i + 1, n, k - 1, cur | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, 0, &mut out);
    }
    out
}

/// Lexicographic list of 2-element index pairs (i < j), 1-based.
pub fn pair_list(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 1..=n {
        for j in i + 1..=n {
            v.push((i, j));
        }
    }
    v
}

/// Position of e_ij (i<j, 1-based) in the lexicographic basis of Λ².
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j <= n);
    (i - 1) * n - (i - 1) * i / 2 + (j - i - 1)
}

/// Sorts an index list, returning the permutation sign; `None` on repeats.
fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

fn indices_mask(idx: &[usize]) -> u32 {
    idx.iter().fold(0u32, |m, &i| m | (1 << (i - 1)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MultivectorJson", into = "MultivectorJson")]
pub struct Multivector {
    dim: usize,
    terms: BTreeMap<u32, f64>,
}

impl Multivector {
    /// The zero form. Panics if `dim` is outside 1..=8.
    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        let mut m = Self::zero(dim);
        m.add_mask(0, c);
        m
    }

    /// c·e_{i1}∧…∧e_{ik}; indices in any order, repeated indices give zero.
    pub fn term(dim: usize, idx: &[usize], c: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDim(dim));
        }
        if idx.iter().any(|&i| i == 0 || i > dim) {
            return Err(Error::BadIndex(idx.to_vec(), dim));
        }
        let mut m = Self::zero(dim);
        if let Some((sorted, s)) = sort_with_sign(idx) {
            m.add_mask(indices_mask(&sorted), s * c);
        }
        Ok(m)
    }

    /// Basis blade shorthand. Panics on invalid indices.
    pub fn e(dim: usize, idx: &[usize]) -> Self {
        Self::term(dim, idx, 1.0).expect("valid basis blade")
    }

    /// Sum of c·e_I over the given (index list, coefficient) pairs.
    pub fn from_terms(dim: usize, terms: &[(&[usize], f64)]) -> Result<Self> {
        let mut m = Self::zero(dim);
        for (idx, c) in terms {
            m = &m + &Self::term(dim, idx, *c)?;
        }
        Ok(m)
    }

    /// Unit vector along `v` is not implied; this is the 1-form Σ v_i e_i.
    pub fn vector(v: &[f64]) -> Self {
        let mut m = Self::zero(v.len());
        for (i, &c) in v.iter().enumerate() {
            m.add_mask(1 << i, c);
        }
        m
    }

    #[cfg(test)]
    pub(crate) fn from_mask_map(dim: usize, terms: BTreeMap<u32, f64>) -> Self {
        let mut m = Self::zero(dim);
        for (k, c) in terms {
            m.add_mask(k, c);
        }
        m
    }

    pub(crate) fn add_mask(&mut self, mask: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry(mask).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&mask);
        }
    }

    pub(crate) fn mask_terms(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms ordered by grade, then lexicographically by index tuple.
    pub fn terms(&self) -> Vec<(Vec<usize>, f64)> {
        let mut v: Vec<(Vec<usize>, f64)> = self
            .terms
            .iter()
            .map(|(&k, &c)| (mask_indices(k), c))
            .collect();
        v.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        v
    }

    /// Coefficient of e_I (sign-adjusted if `idx` is unsorted).
    pub fn coeff(&self, idx: &[usize]) -> f64 {
        match sort_with_sign(idx) {
            Some((sorted, s)) if sorted.iter().all(|&i| i >= 1 && i <= self.dim) => {
                s * self.terms.get(&indices_mask(&sorted)).copied().unwrap_or(0.0)
            }
            _ => 0.0,
        }
    }

    /// The common degree of all terms; None for the zero form or mixed degrees.
    pub fn grade(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|&m| grade_of(m));
        let g = it.next()?;
        it.all(|h| h == g).then_some(g)
    }

    pub fn grade_part(&self, k: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(&m, _)| grade_of(m) == k)
            .map(|(&m, &c)| (m, c))
            .collect();
        Self {
            dim: self.dim,
            terms,
        }
    }

    /// Errors unless every term has grade `k` (the zero form passes).
    pub fn check_grade(&self, k: usize) -> Result<()> {
        let bad: Vec<usize> = self
            .terms
            .keys()
            .map(|&m| grade_of(m))
            .filter(|&g| g != k)
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            let mut grades: Vec<usize> = self.terms.keys().map(|&m| grade_of(m)).collect();
            grades.sort_unstable();
            grades.dedup();
            Err(Error::WrongGrade {
                expected: k,
                found: format!("{grades:?}"),
            })
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = Self::zero(self.dim);
        for (&k, &c) in &self.terms {
            m.add_mask(k, s * c);
        }
        m
    }

    /// Drops every term with |coeff| ≤ eps.
    pub fn normalized(&self, eps: f64) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.abs() > eps)
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |a, c| a.max(c.abs()))
    }

    /// Largest coefficient difference; forms of different dimension are never close.
    pub fn max_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        (self - other).max_abs()
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.max_diff(other) <= eps
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = Self::zero(self.dim);
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                if a & b == 0 {
                    out.add_mask(a | b, wedge_sign(a, b) * ca * cb);
                }
            }
        }
        Ok(out)
    }

    /// e_i ⌟ self for a basis vector (1-based).
    pub fn contract(&self, i: usize) -> Self {
        let bit = 1u32 << (i - 1);
        let mut out = Self::zero(self.dim);
        for (&m, &c) in &self.terms {
            if m & bit != 0 {
                let before = (m & (bit - 1)).count_ones();
                let s = if before.is_multiple_of(2) { 1.0 } else { -1.0 };
                out.add_mask(m & !bit, s * c);
            }
        }
        out
    }

    /// X ⌟ self for X = Σ x_i e_i.
    pub fn contract_vec(&self, x: &[f64]) -> Self {
        let mut out = Self::zero(self.dim);
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                out = &out + &self.contract(i + 1).scale(xi);
            }
        }
        out
    }

    /// Hodge star: a ∧ *b = ⟨a,b⟩ e_{1..n}.
    pub fn hodge(&self) -> Self {
        let full = (1u32 << self.dim) - 1;
        let mut out = Self::zero(self.dim);
        for (&m, &c) in &self.terms {
            let comp = full & !m;
            out.add_mask(comp, wedge_sign(m, comp) * c);
        }
        out
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| c * other.terms.get(k).copied().unwrap_or(0.0))
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Value of the form on basis vectors e_{i1},…,e_{ik} (any order, 1-based).
    pub fn eval_basis(&self, idx: &[usize]) -> f64 {
        self.coeff(idx)
    }

    /// Value of the k-form part on arbitrary vectors.
    pub fn eval(&self, vecs: &[DVector<f64>]) -> f64 {
        let k = vecs.len();
        let mut s = 0.0;
        for (&m, &c) in &self.terms {
            if grade_of(m) != k {
                continue;
            }
            let idx = mask_indices(m);
            let minor = DMatrix::from_fn(k, k, |r, col| vecs[col][idx[r] - 1]);
            s += c * minor.determinant();
        }
        s
    }

    /// Grade-k coefficients in the lexicographic basis.
    pub fn to_dense(&self, k: usize) -> DVector<f64> {
        let masks = basis_masks(self.dim, k);
        DVector::from_iterator(
            masks.len(),
            masks
                .iter()
                .map(|m| self.terms.get(m).copied().unwrap_or(0.0)),
        )
    }

    pub fn from_dense(dim: usize, k: usize, v: &DVector<f64>) -> Self {
        let masks = basis_masks(dim, k);
        assert_eq!(masks.len(), v.len(), "dense length does not match C(n,k)");
        let mut m = Self::zero(dim);
        for (mask, &c) in masks.iter().zip(v.iter()) {
            m.add_mask(*mask, c);
        }
        m
    }

    /// Components relative to the orthonormal frame whose vectors are the columns of `frame`.
    pub fn in_frame(&self, frame: &DMatrix<f64>) -> Self {
        let n = self.dim;
        let mut out = Self::zero(n);
        let mut grades: Vec<usize> = self.terms.keys().map(|&m| grade_of(m)).collect();
        grades.sort_unstable();
        grades.dedup();
        for k in grades {
            for target in basis_masks(n, k) {
                let cols = mask_indices(target);
                let vecs: Vec<DVector<f64>> =
                    cols.iter().map(|&j| frame.column(j - 1).into_owned()).collect();
                let v = if k == 0 {
                    self.terms.get(&0).copied().unwrap_or(0.0)
                } else {
                    self.grade_part(k).eval(&vecs)
                };
                out.add_mask(target, v);
            }
        }
        out
    }

    /// Push-forward under an orthogonal map q (e_i ↦ q e_i).
    pub fn rotate(&self, q: &DMatrix<f64>) -> Self {
        self.in_frame(&q.transpose())
    }
}

/// X ⌟ a for a grade-1 multivector X.
pub fn interior(x: &Multivector, a: &Multivector) -> Result<Multivector> {
    if x.dim != a.dim {
        return Err(Error::DimensionMismatch(x.dim, a.dim));
    }
    x.check_grade(1)?;
    let v: Vec<f64> = (1..=x.dim).map(|i| x.coeff(&[i])).collect();
    Ok(a.contract_vec(&v))
}

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        let mut out = self.clone();
        for (&k, &c) in &rhs.terms {
            out.add_mask(k, c);
        }
        out
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        self + &rhs.scale(-1.0)
    }
}

impl Add for Multivector {
    type Output = Multivector;
    fn add(self, rhs: Multivector) -> Multivector {
        &self + &rhs
    }
}

impl Sub for Multivector {
    type Output = Multivector;
    fn sub(self, rhs: Multivector) -> Multivector {
        &self - &rhs
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;
    fn mul(self, s: f64) -> Multivector {
        self.scale(s)
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;
    fn mul(self, s: f64) -> Multivector {
        self.scale(s)
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (idx, c)) in terms.iter().enumerate() {
            if n > 0 {
                write!(f, " {} ", if *c < 0.0 { '-' } else { '+' })?;
            } else if *c < 0.0 {
                write!(f, "-")?;
            }
            if idx.is_empty() {
                write!(f, "{}", c.abs())?;
            } else {
                let name: String = idx.iter().map(|i| i.to_string()).collect();
                write!(f, "{}*e{}", c.abs(), name)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub idx: Vec<usize>,
    pub c: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultivectorJson {
    pub dim: usize,
    pub terms: Vec<TermJson>,
}

impl TryFrom<MultivectorJson> for Multivector {
    type Error = Error;
    fn try_from(j: MultivectorJson) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&j.dim) {
            return Err(Error::UnsupportedDim(j.dim));
        }
        let mut m = Multivector::zero(j.dim);
        let mut seen = std::collections::BTreeSet::new();
        for t in j.terms {
            if t.idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse(format!(
                    "index set {:?} is not strictly increasing",
                    t.idx
                )));
            }
            if t.idx.iter().any(|&i| i == 0 || i > j.dim) {
                return Err(Error::BadIndex(t.idx, j.dim));
            }
            if !t.c.is_finite() {
                return Err(Error::Parse(format!("non-finite coefficient for {:?}", t.idx)));
            }
            let mask = indices_mask(&t.idx);
            if !seen.insert(mask) {
                return Err(Error::Parse(format!("duplicate index set {:?}", t.idx)));
            }
            m.add_mask(mask, t.c);
        }
        Ok(m)
    }
}

impl From<Multivector> for MultivectorJson {
    fn from(m: Multivector) -> Self {
        MultivectorJson {
            dim: m.dim,
            terms: m
                .terms()
                .into_iter()
                .map(|(idx, c)| TermJson { idx, c })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(n: usize, idx: &[usize]) -> Multivector {
        Multivector::e(n, idx)
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(e(4, &[1]).wedge(&e(4, &[2])).unwrap(), e(4, &[1, 2]));
        assert!(e(4, &[1, 2]).wedge(&e(4, &[1, 2])).unwrap().is_zero());
        let a = &e(4, &[1, 2]) + &e(4, &[3, 4]);
        let b = &e(4, &[1, 2]) - &e(4, &[3, 4]);
        assert!(a.wedge(&b).unwrap().is_zero());
        assert!(e(3, &[1]).wedge(&e(4, &[2])).is_err());
    }

    #[test]
    fn interior_examples() {
        let (rho, lam) = (1.3, 0.7);
        let t = Multivector::from_terms(5, &[(&[1, 2, 5], -rho), (&[3, 4, 5], -lam)]).unwrap();
        let got = interior(&e(5, &[5]), &t).unwrap();
        let want = Multivector::from_terms(5, &[(&[1, 2], -rho), (&[3, 4], -lam)]).unwrap();
        assert!(got.approx_eq(&want, 1e-15));
        assert!(interior(&e(4, &[1]), &e(4, &[2, 3, 4])).unwrap().is_zero());
        assert_eq!(interior(&e(3, &[2]), &e(3, &[1, 2, 3])).unwrap(), e(3, &[1, 3]) * -1.0);
        assert!(interior(&e(3, &[1, 2]), &e(3, &[1, 2, 3])).is_err());
    }

    #[test]
    fn hodge_examples() {
        let (rho, lam) = (1.3, 0.7);
        let t = Multivector::from_terms(5, &[(&[1, 2, 5], -rho), (&[3, 4, 5], -lam)]).unwrap();
        let want = Multivector::from_terms(5, &[(&[3, 4], -rho), (&[1, 2], -lam)]).unwrap();
        assert!(t.hodge().approx_eq(&want, 1e-15));
        assert_eq!(e(5, &[1, 2, 3, 4]).scale(rho * lam).hodge(), e(5, &[5]).scale(rho * lam));
        assert_eq!(e(6, &[1, 2, 3]).hodge(), e(6, &[4, 5, 6]));
    }

    #[test]
    fn inner_examples() {
        assert_eq!(e(3, &[1, 2, 3]).inner(&e(3, &[1, 2, 3])), 1.0);
        let t = Multivector::from_terms(5, &[(&[1, 2, 5], -2.0), (&[3, 4, 5], -3.0)]).unwrap();
        assert!((t.norm_sq() - 13.0).abs() < 1e-15);
        assert_eq!(e(3, &[1, 2]).inner(&e(3, &[1, 2, 3])), 0.0);
    }

    #[test]
    fn pair_index_matches_list() {
        for n in 2..=8 {
            for (p, &(i, j)) in pair_list(n).iter().enumerate() {
                assert_eq!(pair_index(n, i, j), p);
            }
        }
    }

    #[test]
    fn json_rejects_bad_indices() {
        let bad = r#"{"dim":4,"terms":[{"idx":[2,1],"c":1.0}]}"#;
        assert!(serde_json::from_str::<Multivector>(bad).is_err());
        let dup = r#"{"dim":4,"terms":[{"idx":[1,1],"c":1.0}]}"#;
        assert!(serde_json::from_str::<Multivector>(dup).is_err());
        let twice = r#"{"dim":4,"terms":[{"idx":[1,2],"c":1.0},{"idx":[1,2],"c":2.0}]}"#;
        assert!(serde_json::from_str::<Multivector>(twice).is_err());
        let ok = r#"{"dim":4,"terms":[{"idx":[1,2,4],"c":-1.5}]}"#;
        let m: Multivector = serde_json::from_str(ok).unwrap();
        assert_eq!(m, e(4, &[1, 2, 4]).scale(-1.5));
        let back = serde_json::to_string(&m).unwrap();
        assert_eq!(back, r#"{"dim":4,"terms":[{"idx":[1,2,4],"c":-1.5}]}"#);
    }

    #[test]
    fn frame_change_round_trip() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let q = crate::linalg::random_rotation(5, &mut rng);
        let t = Multivector::from_terms(5, &[(&[1, 2, 5], 0.4), (&[2, 3, 4], -1.1)]).unwrap();
        let back = t.rotate(&q).rotate(&q.transpose());
        assert!(back.approx_eq(&t, 1e-12));
        assert!((t.rotate(&q).norm() - t.norm()).abs() < 1e-12);
    }

    // Brute-force oracle: wedge as the alternation of the tensor product,
    // evaluated on basis vectors.
    fn wedge_oracle(a: &Multivector, k: usize, b: &Multivector, l: usize, idx: &[usize]) -> f64 {
        fn perms(v: Vec<usize>) -> Vec<(Vec<usize>, f64)> {
            if v.len() <= 1 {
                return vec![(v, 1.0)];
            }
            let mut out = Vec::new();
            for i in 0..v.len() {
                let mut rest = v.clone();
                let x = rest.remove(i);
                for (mut p, s) in perms(rest) {
                    p.insert(0, x);
                    out.push((p, if i % 2 == 0 { s } else { -s }));
                }
            }
            out
        }
        let mut fact = 1.0;
        for i in 1..=k {
            fact *= i as f64;
        }
        for i in 1..=l {
            fact *= i as f64;
        }
        let mut s = 0.0;
        for (p, sg) in perms(idx.to_vec()) {
            s += sg * a.eval_basis(&p[..k]) * b.eval_basis(&p[k..]);
        }
        s / fact
    }

    fn arb_form(n: usize, k: usize) -> impl Strategy<Value = Multivector> {
        let len = basis_masks(n, k).len();
        prop::collection::vec(-2.0f64..2.0, len)
            .prop_map(move |v| Multivector::from_dense(n, k, &DVector::from_vec(v)))
    }

    fn arb_triple() -> impl Strategy<Value = (usize, usize, usize)> {
        (3usize..=6).prop_flat_map(|n| (Just(n), 0..=n, 0..=n))
    }

    proptest! {
        #[test]
        fn graded_commutativity(
            (n, k, l) in arb_triple(),
            seed in any::<u64>()
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let ra = DVector::from_fn(basis_masks(n, k).len(), |_, _| rng.gen_range(-1.0..1.0));
            let rb = DVector::from_fn(basis_masks(n, l).len(), |_, _| rng.gen_range(-1.0..1.0));
            let a = Multivector::from_dense(n, k, &ra);
            let b = Multivector::from_dense(n, l, &rb);
            let s = if (k * l) % 2 == 0 { 1.0 } else { -1.0 };
            let ab = a.wedge(&b).unwrap();
            let ba = b.wedge(&a).unwrap().scale(s);
            prop_assert!(ab.approx_eq(&ba, 1e-12));
        }

        #[test]
        fn wedge_matches_alternation_oracle(a in arb_form(5, 2), b in arb_form(5, 2)) {
            let w = a.wedge(&b).unwrap();
            for m in basis_masks(5, 4) {
                let idx = mask_indices(m);
                let o = wedge_oracle(&a, 2, &b, 2, &idx);
                prop_assert!((w.eval_basis(&idx) - o).abs() < 1e-12);
            }
        }

        #[test]
        fn interior_is_antiderivation(
            a in arb_form(6, 2),
            b in arb_form(6, 3),
            x in prop::collection::vec(-1.0f64..1.0, 6)
        ) {
            let lhs = a.wedge(&b).unwrap().contract_vec(&x);
            let rhs = &a.contract_vec(&x).wedge(&b).unwrap() + &a.wedge(&b.contract_vec(&x)).unwrap();
            prop_assert!(lhs.approx_eq(&rhs, 1e-12));
        }

        #[test]
        fn interior_matches_evaluation_oracle(a in arb_form(5, 3), i in 1usize..=5) {
            let c = a.contract(i);
            for m in basis_masks(5, 2) {
                let idx = mask_indices(m);
                prop_assert!((c.eval_basis(&idx) - a.eval_basis(&[i, idx[0], idx[1]])).abs() < 1e-14);
            }
        }

        #[test]
        fn hodge_of_contraction(
            (n, k, _) in arb_triple(),
            seed in any::<u64>(),
            x in prop::collection::vec(-1.0f64..1.0, 6)
        ) {
            use rand::{Rng, SeedableRng};
            prop_assume!(k >= 1);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let ra = DVector::from_fn(basis_masks(n, k).len(), |_, _| rng.gen_range(-1.0..1.0));
            let a = Multivector::from_dense(n, k, &ra);
            let xv = Multivector::vector(&x[..n]);
            let lhs = interior(&xv, &a).unwrap().hodge();
            let s = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = xv.wedge(&a.hodge()).unwrap().scale(s);
            prop_assert!(lhs.approx_eq(&rhs, 1e-12));
            // brute force: a ∧ *b = <a,b> vol on every basis blade
            for m in basis_masks(n, k) {
                let b = Multivector::from_mask_map(n, [(m, 1.0)].into_iter().collect());
                let vol = a.wedge(&b.hodge()).unwrap();
                let want = a.inner(&b);
                prop_assert!((vol.eval_basis(&(1..=n).collect::<Vec<_>>()) - want).abs() < 1e-12);
            }
        }

        #[test]
        fn double_hodge_sign(a in arb_form(5, 2)) {
            // (-1)^{k(n-k)} = +1 for k=2, n=5
            prop_assert!(a.hodge().hodge().approx_eq(&a, 1e-13));
        }

        #[test]
        fn normalization_idempotent(a in arb_form(6, 3), eps in 0.0f64..1.0) {
            let once = a.normalized(eps);
            prop_assert_eq!(once.normalized(eps), once);
        }
    }
}
