//! Invariants of a 3-form T: σ_T, ker T, skew normal forms, case routing,
//! contact data in dimension 5 and almost Hermitian data in dimension 6.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{basis_masks, mask_indices, Multivector};
use crate::linalg;
use crate::skew::{g_t, isotropy_algebra, SkewEndo};
use crate::tolerance::ToleranceConfig;

/// σ_T = ½ Σ_i (e_i⌟T) ∧ (e_i⌟T).
pub fn sigma_t(t: &Multivector) -> Result<Multivector> {
    t.check_grade(3)?;
    let mut s = Multivector::zero(t.dim());
    for i in 1..=t.dim() {
        let c = t.contract(i);
        s = &s + &c.wedge(&c)?;
    }
    Ok(s.scale(0.5))
}

/// The vector T(e_i, e_j) with components T(e_i, e_j, e_k).
pub fn torsion_vector(t: &Multivector, i: usize, j: usize) -> DVector<f64> {
    DVector::from_fn(t.dim(), |k, _| t.coeff(&[i, j, k + 1]))
}

/// σ_T from the cyclic sum 𝔖_{X,Y,Z} g(T(X,Y), T(Z,V)).
pub fn sigma_t_cyclic(t: &Multivector) -> Result<Multivector> {
    t.check_grade(3)?;
    let n = t.dim();
    let g = |a: usize, b: usize, c: usize, d: usize| torsion_vector(t, a, b).dot(&torsion_vector(t, c, d));
    let mut out = Multivector::zero(n);
    for m in basis_masks(n, 4) {
        let ix = mask_indices(m);
        let (x, y, z, v) = (ix[0], ix[1], ix[2], ix[3]);
        let s = g(x, y, z, v) + g(y, z, x, v) + g(z, x, y, v);
        out = &out + &Multivector::term(n, &ix, s)?;
    }
    Ok(out)
}

/// Orthonormal basis (columns) of {X : X⌟T = 0}.
pub fn ker_t(t: &Multivector, tol: &ToleranceConfig) -> DMatrix<f64> {
    let n = t.dim();
    let cols: Vec<DVector<f64>> = (1..=n).map(|i| t.contract(i).to_dense(2)).collect();
    let m = DMatrix::from_columns(&cols);
    linalg::null_space(&m, tol.eps_rank)
}

#[derive(Clone, Debug, Serialize)]
pub struct SkewNormalForm {
    /// ρ_1 ≤ ρ_2 ≤ … over the nonzero blocks.
    pub spectrum: Vec<f64>,
    pub rank: usize,
    /// Columns f_1..f_n with w = Σ ρ_j f^{2j-1} ∧ f^{2j}; kernel vectors last.
    #[serde(serialize_with = "ser_matrix")]
    pub frame: DMatrix<f64>,
    /// +1 or -1; only -1 when there is no kernel vector to absorb the sign.
    pub frame_orientation: f64,
}

pub(crate) fn ser_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize as _;
    linalg::matrix_to_rows(m).serialize(s)
}

/// Adapted orthonormal frame block-diagonalizing the skew endomorphism of `w`.
pub fn skew_normal_form(w: &Multivector, tol: &ToleranceConfig) -> Result<SkewNormalForm> {
    let n = w.dim();
    let a = SkewEndo::from_two_form(w)?;
    let am = a.matrix();
    let sq = -(am * am);
    let (vals, vecs) = linalg::sym_eigen(&sq);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let thr = tol.eps_rank * top.max(1.0);
    let mut frame: Vec<DVector<f64>> = Vec::new();
    let mut spectrum = Vec::new();
    let project_out = |v: &mut DVector<f64>, fr: &[DVector<f64>]| {
        for _ in 0..2 {
            for f in fr {
                let p = f.dot(v);
                *v -= f * p;
            }
        }
    };
    let mut i = 0;
    while i < n {
        let rho = vals[i].max(0.0).sqrt();
        if rho <= thr {
            i += 1;
            continue;
        }
        // cluster of (numerically) equal eigenvalues
        let mut j = i;
        while j < n && (vals[j].max(0.0).sqrt() - rho).abs() <= thr.max(1e-6 * rho) {
            j += 1;
        }
        for c in i..j {
            let mut v = vecs.column(c).into_owned();
            project_out(&mut v, &frame);
            let nv = v.norm();
            if nv < 0.5 {
                continue;
            }
            let f1 = v / nv;
            let mut f2 = am * &f1;
            project_out(&mut f2, &frame);
            let r = f2.norm();
            if r <= thr {
                continue;
            }
            let f2 = f2 / r;
            spectrum.push(r);
            frame.push(f1);
            frame.push(f2);
        }
        i = j;
    }
    let rank = frame.len();
    for c in 0..n {
        if frame.len() == n {
            break;
        }
        let mut v = vecs.column(c).into_owned();
        project_out(&mut v, &frame);
        let nv = v.norm();
        if nv > 0.5 {
            frame.push(v / nv);
        }
    }
    if frame.len() != n {
        return Err(Error::invariant("normal form frame incomplete", frame.len() as f64));
    }
    let mut f = DMatrix::from_columns(&frame);
    let mut orientation = f.determinant().signum();
    if orientation < 0.0 && rank < n {
        let c = -f.column(n - 1);
        f.set_column(n - 1, &c);
        orientation = 1.0;
    }
    spectrum.sort_by(|a, b| a.total_cmp(b));
    Ok(SkewNormalForm {
        spectrum,
        rank,
        frame: f,
        frame_orientation: orientation,
    })
}

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseLabel {
    D3,
    D4,
    D5_A,
    D5_B1,
    D5_B2,
    D6_A,
    D6_B,
    D6_C_rank4,
    D6_D,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::D3 => "D3",
            CaseLabel::D4 => "D4",
            CaseLabel::D5_A => "D5_A",
            CaseLabel::D5_B1 => "D5_B1",
            CaseLabel::D5_B2 => "D5_B2",
            CaseLabel::D6_A => "D6_A",
            CaseLabel::D6_B => "D6_B",
            CaseLabel::D6_C_rank4 => "D6_C_rank4",
            CaseLabel::D6_D => "D6_D",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub dim: usize,
    pub case_label: CaseLabel,
    pub sigma_t: Multivector,
    /// Rank of *σ_T as a 2-form (dimension 6); 0 in lower dimensions.
    pub star_sigma_rank: usize,
    /// Skew eigenvalues of *σ_T (dimension 6 only).
    pub skew_spectrum: Vec<f64>,
    /// Skew eigenvalues of *T (dimension 5 only).
    pub torsion_spectrum: Vec<f64>,
    pub ker_t_dim: usize,
    pub iso_t_dim: usize,
    pub g_t_dim: usize,
    pub parameters: BTreeMap<String, f64>,
    /// Adapted frame as columns (rows of this list are matrix rows).
    #[serde(serialize_with = "ser_matrix")]
    pub frame: DMatrix<f64>,
    pub equal_eigenvalues: Option<bool>,
    pub advisory: Option<String>,
}

/// Routes a 3-form in dimension 3..6 to its case and records its invariants.
pub fn classify(t: &Multivector, tol: &ToleranceConfig) -> Result<ClassificationReport> {
    let n = t.dim();
    if !(3..=6).contains(&n) {
        return Err(Error::UnsupportedDim(n));
    }
    t.check_grade(3)?;
    let sigma = sigma_t(t)?;
    let scale = t.norm_sq().max(1.0);
    let sigma_zero = sigma.max_abs() <= tol.eps_coeff * scale;
    let sigma = sigma.normalized(tol.eps_coeff * scale);
    let mut params = BTreeMap::new();
    let mut frame = DMatrix::identity(n, n);
    let mut star_sigma_rank = 0;
    let mut skew_spectrum = Vec::new();
    let mut torsion_spectrum = Vec::new();
    let mut equal_eigenvalues = None;
    let mut advisory = None;
    let label = match n {
        3 => {
            params.insert("lambda".into(), t.coeff(&[1, 2, 3]));
            CaseLabel::D3
        }
        4 => {
            let star = t.hodge();
            let v: Vec<f64> = (1..=4).map(|i| star.coeff(&[i])).collect();
            for (i, c) in v.iter().enumerate() {
                params.insert(format!("star_t_{}", i + 1), *c);
            }
            params.insert("norm".into(), t.norm());
            CaseLabel::D4
        }
        5 => {
            let nf = skew_normal_form(&t.hodge(), tol)?;
            torsion_spectrum = nf.spectrum.clone();
            if sigma_zero {
                frame = nf.frame;
                CaseLabel::D5_A
            } else {
                let c = contact_structure_dim5(t, tol)?;
                params.insert("rho".into(), c.rho);
                params.insert("lambda".into(), c.lambda);
                frame = c.frame.clone();
                if (c.rho - c.lambda).abs() <= tol.eps_rank * c.lambda.max(1.0) {
                    CaseLabel::D5_B2
                } else {
                    CaseLabel::D5_B1
                }
            }
        }
        _ => {
            if sigma_zero {
                CaseLabel::D6_A
            } else {
                let nf = skew_normal_form(&sigma.hodge(), tol)?;
                star_sigma_rank = nf.rank;
                skew_spectrum = nf.spectrum.clone();
                frame = nf.frame.clone();
                match nf.rank {
                    2 => {
                        let (rho, alpha, beta) = case_b_parameters(t, &nf)?;
                        params.insert("rho".into(), rho);
                        params.insert("alpha".into(), alpha);
                        params.insert("beta".into(), beta);
                        CaseLabel::D6_B
                    }
                    4 => {
                        advisory = Some(
                            "rank(*sigma_T) = 4 cannot occur for parallel torsion; classified as a raw 3-form".into(),
                        );
                        CaseLabel::D6_C_rank4
                    }
                    _ => {
                        let mean = nf.spectrum.iter().sum::<f64>() / nf.spectrum.len().max(1) as f64;
                        let eq = nf
                            .spectrum
                            .iter()
                            .all(|s| (s - mean).abs() <= tol.eps_rank * mean.max(1.0));
                        equal_eigenvalues = Some(eq);
                        params.insert("eigenvalue_mean".into(), mean);
                        if !eq {
                            advisory = Some("eigenvalues of *sigma_T differ; no parallel almost Hermitian structure".into());
                        }
                        CaseLabel::D6_D
                    }
                }
            }
        }
    };
    let ker = ker_t(t, tol);
    Ok(ClassificationReport {
        dim: n,
        case_label: label,
        sigma_t: sigma,
        star_sigma_rank,
        skew_spectrum,
        torsion_spectrum,
        ker_t_dim: ker.ncols(),
        iso_t_dim: isotropy_algebra(t, tol)?.dim(),
        g_t_dim: g_t(t, tol)?.dim(),
        parameters: params,
        frame,
        equal_eigenvalues,
        advisory,
    })
}

/// ρ = |α² - β²| and the magnitudes α ≥ β for case B, from the self-dual and
/// anti-self-dual parts of u⌟T on the complement of the plane of *σ_T.
fn case_b_parameters(t: &Multivector, nf: &SkewNormalForm) -> Result<(f64, f64, f64)> {
    let ft = t.in_frame(&nf.frame);
    let rho = nf.spectrum[0];
    let (mut sd, mut asd) = (0.0, 0.0);
    for u in [1usize, 2] {
        // frame vectors f1, f2 span the image of *σ_T; the complement is f3..f6
        let w = ft.contract(u);
        let c = |i: usize, j: usize| w.coeff(&[i + 2, j + 2]);
        let s = [c(1, 2) + c(3, 4), c(1, 3) - c(2, 4), c(1, 4) + c(2, 3)];
        let a = [c(1, 2) - c(3, 4), c(1, 3) + c(2, 4), c(1, 4) - c(2, 3)];
        sd += s.iter().map(|x| x * x).sum::<f64>() / 2.0;
        asd += a.iter().map(|x| x * x).sum::<f64>() / 2.0;
    }
    let (x, y) = ((sd / 2.0).sqrt(), (asd / 2.0).sqrt());
    Ok((rho, x.max(y), x.min(y)))
}

#[derive(Clone, Debug, Serialize)]
pub struct ContactFlags {
    pub quasi_sasaki: bool,
    pub alpha_sasaki: bool,
    pub sasaki: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContactData {
    pub xi: Multivector,
    pub eta: Multivector,
    pub d_eta: Multivector,
    /// F(X, Y) = g(X, φY).
    pub phi_form: Multivector,
    #[serde(serialize_with = "ser_matrix")]
    pub phi: DMatrix<f64>,
    pub rho: f64,
    pub lambda: f64,
    pub flags: ContactFlags,
    /// Columns f1..f4, ξ.
    #[serde(serialize_with = "ser_matrix")]
    pub frame: DMatrix<f64>,
    /// max |T - η∧dη|.
    pub residual: f64,
}

/// Almost contact metric structure of a 5-dimensional 3-form with σ_T ≠ 0.
pub fn contact_structure_dim5(t: &Multivector, tol: &ToleranceConfig) -> Result<ContactData> {
    if t.dim() != 5 {
        return Err(Error::UnsupportedDim(t.dim()));
    }
    let sigma = sigma_t(t)?;
    let sn = sigma.norm();
    if sn <= tol.eps_coeff * t.norm_sq().max(1.0) {
        return Err(Error::Precondition("sigma_T vanishes; no contact structure".into()));
    }
    let xi = sigma.hodge().scale(1.0 / sn);
    let xv: Vec<f64> = (1..=5).map(|i| xi.coeff(&[i])).collect();
    let d_eta = t.contract_vec(&xv);
    let nf = skew_normal_form(&d_eta.scale(-1.0), tol)?;
    if nf.rank != 4 {
        return Err(Error::invariant("dη must have rank 4", nf.rank as f64));
    }
    let mut frame = nf.frame.clone();
    frame.set_column(4, &DVector::from_vec(xv.clone()));
    // undo any orientation flip in the pair blocks
    if frame.determinant() < 0.0 {
        return Err(Error::invariant("adapted contact frame is negatively oriented", -1.0));
    }
    let (rho, lambda) = (nf.spectrum[0], nf.spectrum[1]);
    let f = |c: usize| frame.column(c).into_owned();
    let e = |a: usize, b: usize| &f(b) * f(a).transpose() - &f(a) * f(b).transpose();
    let phi = e(0, 1) + e(2, 3);
    let phi_form = SkewEndo::new(phi.clone())?.to_two_form().scale(-1.0);
    let eta = xi.clone();
    let residual = (t - &eta.wedge(&d_eta)?).max_abs();
    let alpha = (rho - lambda).abs() <= tol.eps_rank * lambda.max(1.0);
    let sasaki = alpha && (rho - 2.0).abs() <= tol.eps_rank * 2.0 && (lambda - 2.0).abs() <= tol.eps_rank * 2.0;
    Ok(ContactData {
        xi,
        eta,
        d_eta,
        phi_form,
        phi,
        rho,
        lambda,
        flags: ContactFlags {
            quasi_sasaki: true,
            alpha_sasaki: alpha,
            sasaki,
        },
        frame,
        residual,
    })
}

/// Residuals of φ² = -Id + η⊗ξ and g(φV, φW) = g(V, W) - η(V)η(W).
pub fn contact_identity_residuals(c: &ContactData) -> (f64, f64) {
    let x = DVector::from_fn(5, |i, _| c.xi.coeff(&[i + 1]));
    let eta_xi = &x * x.transpose();
    let id = DMatrix::<f64>::identity(5, 5);
    let r1 = linalg::max_abs(&(&c.phi * &c.phi + &id - &eta_xi));
    let r2 = linalg::max_abs(&(c.phi.transpose() * &c.phi - (&id - &eta_xi)));
    (r1, r2)
}

#[derive(Clone, Debug, Serialize)]
pub struct HermitianData {
    #[serde(serialize_with = "ser_matrix")]
    pub j: DMatrix<f64>,
    /// Ω = endo_to_two_form(J).
    pub omega: Multivector,
    pub w1_part: Multivector,
    pub w3_part: Multivector,
    pub w4_part: Multivector,
    /// Components ⟨T, f_k∧Ω⟩; all zero iff the W4 part vanishes.
    pub lee: Vec<f64>,
    /// Unitary frame with J f_{2j-1} = f_{2j}.
    #[serde(serialize_with = "ser_matrix")]
    pub frame: DMatrix<f64>,
}

/// Almost Hermitian structure J from *σ_T when all its skew eigenvalues agree,
/// and the W1 / W3 / W4 split of T.
pub fn hermitian_from_sigma(t: &Multivector, tol: &ToleranceConfig) -> Result<HermitianData> {
    if t.dim() != 6 {
        return Err(Error::UnsupportedDim(t.dim()));
    }
    let star = sigma_t(t)?.hodge();
    let nf = skew_normal_form(&star, tol)?;
    if nf.rank != 6 {
        return Err(Error::Precondition(format!("rank(*sigma_T) = {} ≠ 6", nf.rank)));
    }
    let mean = nf.spectrum.iter().sum::<f64>() / 3.0;
    if nf.spectrum.iter().any(|s| (s - mean).abs() > tol.eps_rank * mean.max(1.0)) {
        return Err(Error::Precondition(format!(
            "eigenvalues of *sigma_T are not equal: {:?}",
            nf.spectrum
        )));
    }
    let jm = SkewEndo::from_two_form(&star)?.matrix() / mean;
    let j = SkewEndo::new(jm)?;
    let omega = j.to_two_form();
    let f = &nf.frame;
    let fc = |c: usize| Multivector::vector(f.column(c).as_slice());
    // Ψ = (f1 + i f2) ∧ (f3 + i f4) ∧ (f5 + i f6)
    let (a1, b1, a2, b2, a3, b3) = (fc(0), fc(1), fc(2), fc(3), fc(4), fc(5));
    let w = |x: &Multivector, y: &Multivector, z: &Multivector| x.wedge(y).unwrap().wedge(z).unwrap();
    let re = &(&w(&a1, &a2, &a3) - &w(&a1, &b2, &b3)) - &(&w(&b1, &a2, &b3) + &w(&b1, &b2, &a3));
    let im = &(&w(&a1, &a2, &b3) + &w(&a1, &b2, &a3)) + &(&w(&b1, &a2, &a3) - &w(&b1, &b2, &b3));
    let w1 = &re.scale(t.inner(&re) / re.norm_sq()) + &im.scale(t.inner(&im) / im.norm_sq());
    let lee_basis: Vec<Multivector> = (0..6)
        .map(|k| fc(k).wedge(&omega))
        .collect::<Result<_>>()?;
    let lee: Vec<f64> = lee_basis.iter().map(|b| t.inner(b)).collect();
    let cols: Vec<DVector<f64>> = lee_basis.iter().map(|b| b.to_dense(3)).collect();
    let (coef, _) = linalg::coordinates(&DMatrix::from_columns(&cols), &t.to_dense(3));
    let mut w4 = Multivector::zero(6);
    for (b, c) in lee_basis.iter().zip(coef.iter()) {
        w4 = &w4 + &b.scale(*c);
    }
    let w3 = &(t - &w1) - &w4;
    let eps = tol.eps_coeff * t.norm().max(1.0);
    Ok(HermitianData {
        j: j.matrix().clone(),
        omega,
        w1_part: w1.normalized(eps),
        w3_part: w3.normalized(eps),
        w4_part: w4.normalized(eps),
        lee,
        frame: nf.frame,
    })
}
