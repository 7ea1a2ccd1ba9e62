//! Structural checks on homogeneous models and Nomizu data, shared by the
//! catalog, the CLI and the C interface.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::clifford::bianchi_clifford_check;
use crate::error::Result;
use crate::homogeneous::{HomogeneousModel, Tensor};
use crate::linalg;
use crate::nomizu::{bianchi1_check, bianchi2_check, build_unchecked, NomizuData};
use crate::tolerance::ToleranceConfig;
use crate::torsion::sigma_t;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: &str, passes: bool, residual: f64) -> Self {
        Self {
            name: name.into(),
            status: if passes { Status::Pass } else { Status::Fail },
            residual: Some(residual),
            note: None,
        }
    }

    pub fn skipped(name: &str, note: &str) -> Self {
        Self {
            name: name.into(),
            status: Status::Skipped,
            residual: None,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

/// True iff no check failed (skipped checks do not count).
pub fn all_pass(checks: &[Check]) -> bool {
    !checks.iter().any(Check::failed)
}

/// Jacobi, skew torsion, Levi-Civita sanity, parallel T and R, curvature pair
/// symmetry, both Bianchi forms and dT = 2σ_T. Without Λ the connection-level
/// checks are skipped and the classical naturally-reductive condition is used.
pub fn verify_model(model: &HomogeneousModel, tol: &ToleranceConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let j = model.algebra().jacobi_check(tol);
    out.push(Check::new("jacobi", j.passes, j.max_residual));

    let lg = model.levi_civita_map();
    let tg = model.invariant_torsion(&lg)?;
    let lg_skew = lg.iter().map(|l| linalg::max_abs(&(l + l.transpose()))).fold(0.0, f64::max);
    let res = tg.torsion.max_abs().max(tg.non_skew_residual).max(lg_skew);
    let scale = model.algebra().max_constant().max(1.0);
    out.push(Check::new("levi_civita_torsion_free", tol.is_zero(res, scale), res));

    let Some(lambda) = model.lambda() else {
        let nr = model.naturally_reductive_check(tol);
        out.push(
            Check::new("naturally_reductive", nr.passes, nr.max_residual)
                .with_note("classical condition for Λ = 0 (no connection map given)"),
        );
        for name in ["parallel_torsion", "parallel_curvature", "curvature_symmetry", "bianchi_classical", "bianchi_clifford", "dT_equals_2sigma"] {
            out.push(Check::skipped(name, "model has no Λ"));
        }
        return Ok(out);
    };

    let tr = model.invariant_torsion(lambda)?;
    let tscale = tr.torsion.max_abs().max(scale);
    out.push(Check::new("skew_torsion", tol.is_zero(tr.non_skew_residual, tscale), tr.non_skew_residual));
    let r = model.invariant_curvature(lambda)?;
    let pt = model.parallelism_check(lambda, &Tensor::Form(tr.torsion.clone()), tol)?;
    out.push(Check::new("parallel_torsion", pt.passes, pt.max_residual));
    let pr = model.parallelism_check(lambda, &Tensor::Curvature(r.clone()), tol)?;
    out.push(Check::new("parallel_curvature", pr.passes, pr.max_residual));
    let rscale = linalg::max_abs(r.matrix()).max(1.0);
    let sym = r.symmetry_residual();
    out.push(Check::new("curvature_symmetry", tol.is_zero(sym, rscale), sym));

    if sym <= 1e-6 * rscale {
        let r_sym = crate::curvature::CurvatureOperator::from_matrix_unchecked(
            r.dim(),
            (r.matrix() + r.matrix().transpose()) * 0.5,
        )?;
        let b1 = bianchi1_check(&tr.torsion, &r_sym, tol)?;
        out.push(Check::new("bianchi_classical", b1.passes, b1.max_residual));
        let cb = bianchi_clifford_check(&tr.torsion, &r_sym, tol)?;
        out.push(Check::new("bianchi_clifford", cb.is_scalar, cb.max_residual));
    } else {
        out.push(Check::skipped("bianchi_classical", "curvature is not pair-symmetric"));
        out.push(Check::skipped("bianchi_clifford", "curvature is not pair-symmetric"));
    }

    let dt = model.invariant_d(&tr.torsion, tol)?;
    let two_sigma = sigma_t(&tr.torsion)?.scale(2.0);
    let res = dt.max_diff(&two_sigma);
    out.push(Check::new("dT_equals_2sigma", tol.is_zero(res, tscale * tscale), res));
    Ok(out)
}

/// Hypotheses of the Nomizu construction, both Bianchi identities, the
/// Clifford criterion and Jacobi for the assembled bracket.
pub fn verify_nomizu(d: &NomizuData, tol: &ToleranceConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let res = d.residuals()?;
    let t = d.torsion();
    let r = d.curvature();
    let scale = t.norm_sq().max(linalg::max_abs(r.matrix())).max(1.0);
    out.push(Check::new("curvature_image_in_h", tol.is_zero(res.r_image, scale), res.r_image));
    out.push(Check::new("torsion_h_invariant", tol.is_zero(res.t_invariance, scale), res.t_invariance));
    out.push(Check::new("curvature_h_equivariant", tol.is_zero(res.r_equivariance, scale), res.r_equivariance));
    out.push(Check::new("h_closed", tol.is_zero(res.h_closure, scale), res.h_closure));
    let b1 = bianchi1_check(t, r, tol)?;
    out.push(Check::new("bianchi_classical", b1.passes, b1.max_residual));
    let b2 = bianchi2_check(t, r, tol)?;
    out.push(Check::new("bianchi_second", b2.passes, b2.max_residual));
    let cb = bianchi_clifford_check(t, r, tol)?;
    out.push(Check::new("bianchi_clifford", cb.is_scalar, cb.max_residual));
    let j = build_unchecked(d).jacobi_check(tol);
    out.push(Check::new("jacobi", j.passes, j.max_residual));
    Ok(out)
}

/// dΩ = Σ (e_i⌟Ω)∧(e_i⌟T) for every ∇-parallel 2-form; returns the worst
/// residual and the number of parallel 2-forms tested.
pub fn parallel_two_form_residual(
    model: &HomogeneousModel,
    lambda: &[DMatrix<f64>],
    tol: &ToleranceConfig,
) -> Result<(f64, usize)> {
    let t = model.invariant_torsion(lambda)?.torsion;
    let forms = model.parallel_forms(lambda, 2, tol)?;
    let mut worst: f64 = 0.0;
    for w in &forms {
        let lhs = model.invariant_d(w, tol)?;
        let rhs = crate::homogeneous::parallel_two_form_d(w, &t)?;
        worst = worst.max(lhs.max_diff(&rhs));
    }
    Ok((worst, forms.len()))
}
