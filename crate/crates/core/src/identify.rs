//! Fingerprints and names for the small real Lie algebras that show up as
//! transversal, isotropy and model algebras.
//!
//! Names produced: `R^k`, `heis3`, `heis5` (any `heis{2m+1}`), `su(2)`, `sl(2,R)`,
//! `sl(2,C)`, `R^3:su(2)` (semidirect, adjoint action), `(0,0,0,12,13,23)`, `su(3)`,
//! and direct sums joined with `+` (so `su(2)+su(2)`, `R^3+su(2)`; `R^1+su(2)` is
//! reported as `u(2)`). Anything else is `unknown`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::LieAlgebraData;
use crate::linalg;
use crate::tolerance::ToleranceConfig;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    pub dim: usize,
    /// (positive, negative, zero) eigenvalue counts of the Killing form.
    pub killing_signature: (usize, usize, usize),
    /// dim g, dim g', dim g'', … until the series stabilizes.
    pub derived_dims: Vec<usize>,
    /// dim g, dim [g,g], dim [g,[g,g]], … until the series stabilizes.
    pub lower_central_dims: Vec<usize>,
    pub center_dim: usize,
    pub is_nilpotent: bool,
    pub is_solvable: bool,
    pub is_semisimple: bool,
}

/// β̃_ij = tr(ad b_i ∘ ad b_j).
pub fn killing_form(l: &LieAlgebraData) -> DMatrix<f64> {
    let n = l.dim();
    let ads: Vec<DMatrix<f64>> = (0..n).map(|i| l.ad_basis(i)).collect();
    DMatrix::from_fn(n, n, |i, j| (&ads[i] * &ads[j]).trace())
}

/// Signature of a symmetric matrix. Eigenvalues below eps_rank times the largest
/// one count as zero; the whole matrix is zero when that one is below 1e-6·scale.
pub fn signature(m: &DMatrix<f64>, scale: f64, eps_rank: f64) -> (usize, usize, usize) {
    let (vals, _) = linalg::sym_eigen(m);
    let top = vals.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let thr = eps_rank * top.max(1e-6 * scale);
    let pos = vals.iter().filter(|&&v| v > thr).count();
    let neg = vals.iter().filter(|&&v| v < -thr).count();
    (pos, neg, vals.len() - pos - neg)
}

fn series(l: &LieAlgebraData, lower_central: bool, eps_rank: f64) -> Vec<usize> {
    let n = l.dim();
    let full = DMatrix::identity(n, n);
    let mut cur = full.clone();
    let mut dims = vec![n];
    while cur.ncols() > 0 {
        let next = if lower_central {
            l.bracket_span(&full, &cur, eps_rank)
        } else {
            l.bracket_span(&cur, &cur, eps_rank)
        };
        if next.ncols() == cur.ncols() {
            break;
        }
        dims.push(next.ncols());
        cur = next;
    }
    dims
}

/// Orthonormal basis of the center.
pub fn center(l: &LieAlgebraData, eps_rank: f64) -> DMatrix<f64> {
    let n = l.dim();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let mut stacked = DMatrix::zeros(n * n, n);
    for j in 0..n {
        stacked.view_mut((j * n, 0), (n, n)).copy_from(&l.ad_basis(j));
    }
    linalg::null_space(&stacked, eps_rank)
}

pub fn fingerprint(l: &LieAlgebraData, tol: &ToleranceConfig) -> Fingerprint {
    let n = l.dim();
    let k = killing_form(l);
    let sig = signature(&k, l.max_constant().powi(2), tol.eps_rank);
    let derived = series(l, false, tol.eps_rank);
    let lcs = series(l, true, tol.eps_rank);
    let center_dim = center(l, tol.eps_rank).ncols();
    Fingerprint {
        dim: n,
        killing_signature: sig,
        is_nilpotent: lcs.last() == Some(&0),
        is_solvable: derived.last() == Some(&0),
        is_semisimple: n > 0 && sig.2 == 0,
        derived_dims: derived,
        lower_central_dims: lcs,
        center_dim,
    }
}

/// Name of an indecomposable algebra from its fingerprint.
fn name_indecomposable(f: &Fingerprint) -> Option<String> {
    let n = f.dim;
    let sig = f.killing_signature;
    if n == 1 {
        return Some("R^1".into());
    }
    if n % 2 == 1 && f.center_dim == 1 && f.lower_central_dims == [n, 1, 0] {
        return Some(format!("heis{n}"));
    }
    let name = match (n, sig) {
        (3, (0, 3, 0)) => "su(2)",
        (3, (2, 1, 0)) => "sl(2,R)",
        (6, (3, 3, 0)) => "sl(2,C)",
        (8, (0, 8, 0)) => "su(3)",
        (6, (0, 3, 3)) if f.center_dim == 0 && f.derived_dims == [6] => "R^3:su(2)",
        (6, (0, 0, 6)) if f.center_dim == 3 && f.lower_central_dims == [6, 3, 0] && f.derived_dims == [6, 3, 0] => {
            "(0,0,0,12,13,23)"
        }
        _ => return None,
    };
    Some(name.into())
}

#[derive(Clone, Debug, Serialize)]
pub struct Ideal {
    /// Columns span the ideal, in the coordinates of the ambient algebra.
    #[serde(serialize_with = "crate::torsion::ser_matrix")]
    pub basis: DMatrix<f64>,
    pub fingerprint: Fingerprint,
    pub name: String,
}

/// Splits into indecomposable ideals: first the abelian factor (as 1-dimensional
/// ideals), then the primary decomposition of a generic element of the centroid.
pub fn ideal_decomposition(l: &LieAlgebraData, tol: &ToleranceConfig) -> Vec<Ideal> {
    let n = l.dim();
    let eps = tol.eps_rank;
    if n == 0 {
        return Vec::new();
    }
    let full = DMatrix::identity(n, n);
    let derived = l.bracket_span(&full, &full, eps);
    let z = center(l, eps);
    // abelian factor: a complement of z ∩ g' inside z
    let z_in_derived = intersect(&z, &derived, eps);
    let a = complement_within(&z, &z_in_derived, eps);
    // any subspace containing g' is an ideal; pick one complementary to a
    let ga = stack(&derived, &a, eps);
    let w = orthogonal_complement(&ga, eps);
    let s = stack(&derived, &w, eps);

    let mut pieces: Vec<DMatrix<f64>> = (0..a.ncols()).map(|c| a.columns(c, 1).into_owned()).collect();
    if s.ncols() > 0 {
        let sub = match l.subalgebra(&s, labels(s.ncols()), tol) {
            Ok(x) => x,
            Err(_) => return vec![whole(l, tol)],
        };
        for block in split_by_centroid(&sub, tol) {
            pieces.push(&s * block);
        }
    }
    pieces
        .into_iter()
        .map(|b| {
            let sub = l
                .subalgebra(&b, labels(b.ncols()), tol)
                .expect("ideals are subalgebras");
            let fp = fingerprint(&sub, tol);
            let name = name_indecomposable(&fp).unwrap_or_else(|| "unknown".into());
            Ideal {
                basis: b,
                fingerprint: fp,
                name,
            }
        })
        .collect()
}

fn whole(l: &LieAlgebraData, tol: &ToleranceConfig) -> Ideal {
    let fp = fingerprint(l, tol);
    Ideal {
        basis: DMatrix::identity(l.dim(), l.dim()),
        name: name_indecomposable(&fp).unwrap_or_else(|| "unknown".into()),
        fingerprint: fp,
    }
}

/// Name of the algebra, or `unknown`.
pub fn identify(l: &LieAlgebraData, tol: &ToleranceConfig) -> String {
    if l.dim() == 0 {
        return "R^0".into();
    }
    let ideals = ideal_decomposition(l, tol);
    let mut abelian = 0;
    let mut rest: Vec<String> = Vec::new();
    for i in &ideals {
        if i.name == "unknown" {
            return "unknown".into();
        }
        if i.name == "R^1" {
            abelian += 1;
        } else {
            rest.push(i.name.clone());
        }
    }
    let rest: Vec<&str> = rest.iter().map(String::as_str).collect();
    compose_name(abelian, &rest)
}

/// Name of a direct sum with `abelian` one-dimensional factors and the given
/// non-abelian factors, in the format `identify` uses.
pub fn compose_name(abelian: usize, parts: &[&str]) -> String {
    let mut rest: Vec<String> = parts.iter().map(|s| s.to_string()).collect();
    rest.sort();
    if abelian == 1 && rest == ["su(2)"] {
        return "u(2)".into();
    }
    let mut out = Vec::new();
    if abelian > 0 {
        out.push(format!("R^{abelian}"));
    }
    out.extend(rest);
    out.join("+")
}

fn labels(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("x{i}")).collect()
}

fn stack(a: &DMatrix<f64>, b: &DMatrix<f64>, eps: f64) -> DMatrix<f64> {
    let n = a.nrows();
    if a.ncols() + b.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    let mut m = DMatrix::zeros(n, a.ncols() + b.ncols());
    m.view_mut((0, 0), (n, a.ncols())).copy_from(a);
    m.view_mut((0, a.ncols()), (n, b.ncols())).copy_from(b);
    linalg::column_space(&m, eps)
}

fn orthogonal_complement(a: &DMatrix<f64>, eps: f64) -> DMatrix<f64> {
    let n = a.nrows();
    if a.ncols() == 0 {
        return DMatrix::identity(n, n);
    }
    linalg::null_space(&a.transpose(), eps)
}

fn intersect(a: &DMatrix<f64>, b: &DMatrix<f64>, eps: f64) -> DMatrix<f64> {
    let n = a.nrows();
    if a.ncols() == 0 || b.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    // x = A u = B v
    let mut m = DMatrix::zeros(n, a.ncols() + b.ncols());
    m.view_mut((0, 0), (n, a.ncols())).copy_from(a);
    m.view_mut((0, a.ncols()), (n, b.ncols())).copy_from(&(-b));
    let k = linalg::null_space(&m, eps);
    let x = a * k.rows(0, a.ncols());
    linalg::column_space(&x, eps)
}

/// Orthogonal complement of `inner` inside the span of `outer`.
fn complement_within(outer: &DMatrix<f64>, inner: &DMatrix<f64>, eps: f64) -> DMatrix<f64> {
    if inner.ncols() == 0 {
        return outer.clone();
    }
    let proj = outer - inner * (inner.transpose() * outer);
    linalg::column_space(&proj, eps.max(1e-9))
}

/// Linear maps φ with φ ∘ ad x = ad x ∘ φ for all x, as an orthonormal list.
fn centroid(l: &LieAlgebraData, eps: f64) -> Vec<DMatrix<f64>> {
    let n = l.dim();
    let mut rows = DMatrix::zeros(n * n * n, n * n);
    for i in 0..n {
        let ad = l.ad_basis(i);
        // (ad φ - φ ad)_{r,c} as a linear function of vec(φ) (column-major)
        for r in 0..n {
            for c in 0..n {
                let row = (i * n + r) * n + c;
                for k in 0..n {
                    rows[(row, c * n + k)] += ad[(r, k)];
                    rows[(row, k * n + r)] -= ad[(k, c)];
                }
            }
        }
    }
    let ns = linalg::null_space(&rows, eps);
    (0..ns.ncols())
        .map(|c| DMatrix::from_column_slice(n, n, ns.column(c).as_slice()))
        .collect()
}

/// Blocks (columns in the coordinates of `l`) of the primary decomposition of a
/// generic centroid element; the finest split over a few seeds is kept.
fn split_by_centroid(l: &LieAlgebraData, tol: &ToleranceConfig) -> Vec<DMatrix<f64>> {
    let n = l.dim();
    let basis = centroid(l, tol.eps_rank);
    let mut best = vec![DMatrix::identity(n, n)];
    if basis.len() <= 1 {
        return best;
    }
    for seed in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1de7 + seed);
        let mut phi = DMatrix::zeros(n, n);
        for b in &basis {
            phi += b * linalg::gaussian(&mut rng);
        }
        let blocks = primary_blocks(&phi);
        if blocks.len() > best.len() && valid_split(l, &blocks, tol) {
            best = blocks;
        }
    }
    best
}

fn valid_split(l: &LieAlgebraData, blocks: &[DMatrix<f64>], tol: &ToleranceConfig) -> bool {
    let n = l.dim();
    if blocks.iter().map(|b| b.ncols()).sum::<usize>() != n {
        return false;
    }
    let all = DMatrix::from_columns(
        &blocks
            .iter()
            .flat_map(|b| (0..b.ncols()).map(move |c| b.column(c).into_owned()))
            .collect::<Vec<DVector<f64>>>(),
    );
    if linalg::rank(&all, tol.eps_rank) != n {
        return false;
    }
    let scale = l.max_constant().max(1.0);
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            for x in 0..a.ncols() {
                for y in 0..b.ncols() {
                    let br = l.bracket(&a.column(x).into_owned(), &b.column(y).into_owned());
                    if br.amax() > 1e3 * tol.eps_rank * scale {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Generalized eigenspaces of φ, with complex-conjugate pairs merged.
fn primary_blocks(phi: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
    let n = phi.nrows();
    // bounded iteration: the default Schur loop can fail to terminate
    let Some(schur) = nalgebra::linalg::Schur::try_new(phi.clone(), 1e-14, 10_000) else {
        return vec![DMatrix::identity(n, n)];
    };
    let eig = schur.complex_eigenvalues();
    let radius = eig.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let gap = 1e-4 * radius.max(1e-12);
    // clusters of (re, |im|)
    let mut clusters: Vec<(f64, f64, usize)> = Vec::new();
    for z in eig.iter() {
        let (re, im) = (z.re, z.im.abs());
        match clusters
            .iter_mut()
            .find(|c| (c.0 - re).abs() <= gap && (c.1 - im).abs() <= gap)
        {
            Some(c) => c.2 += 1,
            None => clusters.push((re, im, 1)),
        }
    }
    let id = DMatrix::<f64>::identity(n, n);
    let mut blocks = Vec::new();
    for (re, im, mult) in clusters {
        let (factor, power) = if im <= gap {
            (phi - &id * re, mult)
        } else {
            // conjugate pair counted twice in mult
            let s = phi - &id * re;
            (&s * &s + &id * (im * im), mult / 2)
        };
        let mut p = id.clone();
        for _ in 0..power.max(1) {
            p = &p * &factor;
        }
        let scale = linalg::max_abs(&p).max(1e-300);
        let k = linalg::null_space(&(p / scale), 1e-6);
        if k.ncols() > 0 {
            blocks.push(k);
        }
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn lab(n: usize) -> Vec<String> {
        labels(n)
    }

    /// [x_i, x_j] = s·x_k cyclic.
    fn so3(s: f64) -> Vec<(usize, usize, usize, f64)> {
        vec![(0, 1, 2, s), (1, 2, 0, s), (2, 0, 1, s)]
    }

    fn shifted(e: &[(usize, usize, usize, f64)], off: usize) -> Vec<(usize, usize, usize, f64)> {
        e.iter().map(|&(i, j, k, c)| (i + off, j + off, k + off, c)).collect()
    }

    fn su2() -> LieAlgebraData {
        LieAlgebraData::from_entries(lab(3), &so3(1.0)).unwrap()
    }

    fn sl2r() -> LieAlgebraData {
        // [h,e]=2e, [h,f]=-2f, [e,f]=h
        LieAlgebraData::from_entries(lab(3), &[(0, 1, 1, 2.0), (0, 2, 2, -2.0), (1, 2, 0, 1.0)]).unwrap()
    }

    fn heis(m: usize) -> LieAlgebraData {
        let e: Vec<_> = (0..m).map(|i| (2 * i, 2 * i + 1, 2 * m, 1.0)).collect();
        LieAlgebraData::from_entries(lab(2 * m + 1), &e).unwrap()
    }

    fn sl2c() -> LieAlgebraData {
        // so(3,1): rotations J_i (0..3) and boosts K_i (3..6)
        let mut e = so3(1.0);
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            e.push((i, 3 + j, 3 + k, 1.0));
            e.push((3 + i, j, 3 + k, 1.0));
            e.push((3 + i, 3 + j, k, -1.0));
        }
        LieAlgebraData::from_entries(lab(6), &e).unwrap()
    }

    fn r3_semi_su2() -> LieAlgebraData {
        let mut e = so3(1.0);
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            e.push((i, 3 + j, 3 + k, 1.0));
            e.push((3 + i, j, 3 + k, 1.0));
        }
        LieAlgebraData::from_entries(lab(6), &e).unwrap()
    }

    fn nil6() -> LieAlgebraData {
        // de4 = e12, de5 = e13, de6 = e23  ⇔  [e1,e2] = -e4, …
        LieAlgebraData::from_entries(lab(6), &[(0, 1, 3, -1.0), (0, 2, 4, -1.0), (1, 2, 5, -1.0)]).unwrap()
    }

    fn su3() -> LieAlgebraData {
        // basis of su(3): i·diag pieces and off-diagonal real/imaginary parts
        use nalgebra::Complex;
        type C = nalgebra::DMatrix<Complex<f64>>;
        let i_ = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        let mut gens: Vec<C> = Vec::new();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let mut m = C::zeros(3, 3);
            m[(a, b)] = one;
            m[(b, a)] = -one;
            gens.push(m);
            let mut m = C::zeros(3, 3);
            m[(a, b)] = i_;
            m[(b, a)] = i_;
            gens.push(m);
        }
        let mut d1 = C::zeros(3, 3);
        d1[(0, 0)] = i_;
        d1[(1, 1)] = -i_;
        gens.push(d1);
        let mut d2 = C::zeros(3, 3);
        d2[(1, 1)] = i_;
        d2[(2, 2)] = -i_;
        gens.push(d2);
        let flat = |m: &C| DVector::from_iterator(18, m.iter().flat_map(|z| [z.re, z.im]));
        let basis = DMatrix::from_columns(&gens.iter().map(flat).collect::<Vec<_>>());
        let mut l = LieAlgebraData::abelian(lab(8));
        for a in 0..8 {
            for b in a + 1..8 {
                let c = &gens[a] * &gens[b] - &gens[b] * &gens[a];
                let (x, r) = linalg::coordinates(&basis, &flat(&c));
                assert!(r < 1e-12);
                l.set_bracket(a, b, &x);
            }
        }
        l
    }

    fn direct_sum(a: &LieAlgebraData, b: &LieAlgebraData) -> LieAlgebraData {
        let (p, q) = (a.dim(), b.dim());
        let mut e = a.entries(0.0);
        e.extend(shifted(&b.entries(0.0), p));
        LieAlgebraData::from_entries(lab(p + q), &e).unwrap()
    }

    #[test]
    fn killing_of_su2_is_negative_definite() {
        let k = killing_form(&su2());
        assert!((k - DMatrix::identity(3, 3) * -2.0).amax() < 1e-12);
        assert_eq!(killing_form(&heis(1)).amax(), 0.0);
    }

    #[test]
    fn named_list_is_separated() {
        let t = tol();
        let cases: Vec<(LieAlgebraData, &str)> = vec![
            (LieAlgebraData::abelian(lab(4)), "R^4"),
            (heis(1), "heis3"),
            (heis(2), "heis5"),
            (su2(), "su(2)"),
            (sl2r(), "sl(2,R)"),
            (direct_sum(&su2(), &su2()), "su(2)+su(2)"),
            (sl2c(), "sl(2,C)"),
            (direct_sum(&LieAlgebraData::abelian(lab(3)), &su2()), "R^3+su(2)"),
            (r3_semi_su2(), "R^3:su(2)"),
            (nil6(), "(0,0,0,12,13,23)"),
            (direct_sum(&LieAlgebraData::abelian(lab(1)), &su2()), "u(2)"),
            (su3(), "su(3)"),
            (direct_sum(&su2(), &sl2r()), "sl(2,R)+su(2)"),
            (direct_sum(&heis(1), &heis(1)), "heis3+heis3"),
        ];
        for (l, name) in cases {
            assert!(l.jacobi_check(&t).passes, "{name}");
            assert_eq!(identify(&l, &t), name);
        }
    }

    #[test]
    fn fingerprints_of_named_algebras() {
        let t = tol();
        let f = fingerprint(&nil6(), &t);
        assert_eq!(f.lower_central_dims, vec![6, 3, 0]);
        assert_eq!(f.center_dim, 3);
        assert!(f.is_nilpotent && f.is_solvable && !f.is_semisimple);
        let f = fingerprint(&sl2c(), &t);
        assert_eq!(f.killing_signature, (3, 3, 0));
        assert!(f.is_semisimple);
        let f = fingerprint(&r3_semi_su2(), &t);
        assert_eq!(f.killing_signature, (0, 3, 3));
        assert_eq!(f.center_dim, 0);
    }

    #[test]
    fn abelian_splits_into_lines() {
        let ideals = ideal_decomposition(&LieAlgebraData::abelian(lab(6)), &tol());
        assert_eq!(ideals.len(), 6);
        assert!(ideals.iter().all(|i| i.basis.ncols() == 1));
    }

    #[test]
    fn unknown_is_reported() {
        // 2-dim non-abelian: [x,y] = y
        let l = LieAlgebraData::from_entries(lab(2), &[(0, 1, 1, 1.0)]).unwrap();
        assert_eq!(identify(&l, &tol()), "unknown");
    }

    fn random_invertible(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let p = DMatrix::from_fn(n, n, |_, _| linalg::gaussian(&mut rng));
            let sv = p.clone().singular_values();
            if sv.max() < 30.0 * sv.min() {
                return p;
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn identify_survives_basis_change(seed in 0u64..10_000, which in 0usize..6) {
            let t = tol();
            let l = [su2(), sl2c(), r3_semi_su2(), nil6(), direct_sum(&su2(), &su2()), direct_sum(&LieAlgebraData::abelian(lab(3)), &su2())][which].clone();
            let before = identify(&l, &t);
            let p = random_invertible(l.dim(), seed);
            let m = l.change_basis(&p, lab(l.dim())).unwrap();
            prop_assert_eq!(identify(&m, &t), before);
        }

        #[test]
        fn killing_form_is_ad_invariant(seed in 0u64..10_000, which in 0usize..4) {
            let l = [su2(), sl2c(), r3_semi_su2(), su3()][which].clone();
            let n = l.dim();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v = || DVector::from_fn(n, |_, _| linalg::gaussian(&mut rng));
            let (x, y, z) = (v(), v(), v());
            let k = killing_form(&l);
            let lhs = l.bracket(&x, &y).dot(&(&k * &z)) + y.dot(&(&k * l.bracket(&x, &z)));
            prop_assert!(lhs.abs() < 1e-9 * (1.0 + x.norm() * y.norm() * z.norm()));
        }
    }
}
