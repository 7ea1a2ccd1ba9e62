//! Randomized property suites behind `skewtor suite`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog;
use crate::clifford::{bianchi_clifford_check, embed_curvature, embed_form, CliffordElement};
use crate::curvature::CurvatureOperator;
use crate::error::Result;
use crate::exterior::{basis_masks, Multivector};
use crate::linalg;
use crate::nomizu::bianchi1_check;
use crate::tolerance::ToleranceConfig;
use crate::torsion::{classify, sigma_t};

pub fn random_form<R: Rng>(n: usize, k: usize, rng: &mut R) -> Multivector {
    let len = basis_masks(n, k).len();
    Multivector::from_dense(n, k, &DVector::from_fn(len, |_, _| linalg::gaussian(rng)))
}

pub fn random_curvature<R: Rng>(n: usize, rng: &mut R) -> CurvatureOperator {
    let p = n * (n - 1) / 2;
    let a = DMatrix::from_fn(p, p, |_, _| linalg::gaussian(rng));
    CurvatureOperator::from_matrix(n, (&a + a.transpose()) * 0.5).expect("symmetric")
}

/// T² = -2σ_T + ‖T‖² in the Clifford algebra; returns the largest coefficient error.
pub fn clifford_square_residual(t: &Multivector) -> Result<f64> {
    let ct = embed_form(t);
    let lhs = ct.cl_mul(&ct)?;
    let rhs = &embed_form(&sigma_t(t)?.scale(-2.0)) + &CliffordElement::scalar(t.dim(), t.norm_sq());
    Ok((&lhs - &rhs).max_abs())
}

/// Solves "T² + R is a scalar" for R: the non-scalar part of the Clifford
/// embedding is linear in R.
pub struct BianchiSolver {
    n: usize,
    basis: Vec<DMatrix<f64>>,
    map: DMatrix<f64>,
    kernel: DMatrix<f64>,
}

fn non_scalar_vector(c: &CliffordElement) -> DVector<f64> {
    let n = c.dim();
    DVector::from_fn((1usize << n) - 1, |i, _| c.coeff_mask((i + 1) as u32))
}

impl BianchiSolver {
    pub fn new(n: usize) -> Self {
        let p = n * (n - 1) / 2;
        let mut basis = Vec::new();
        for a in 0..p {
            for b in a..p {
                let mut m = DMatrix::zeros(p, p);
                m[(a, b)] = 1.0;
                m[(b, a)] = 1.0;
                basis.push(m);
            }
        }
        let cols: Vec<DVector<f64>> = basis
            .iter()
            .map(|m| {
                let r = CurvatureOperator::from_matrix(n, m.clone()).expect("symmetric");
                non_scalar_vector(&embed_curvature(&r).expect("dimension in range"))
            })
            .collect();
        let map = DMatrix::from_columns(&cols);
        let kernel = linalg::null_space(&map, 1e-10);
        Self { n, basis, map, kernel }
    }

    fn operator(&self, coeffs: &DVector<f64>) -> CurvatureOperator {
        let p = self.n * (self.n - 1) / 2;
        let mut m = DMatrix::zeros(p, p);
        for (b, c) in self.basis.iter().zip(coeffs.iter()) {
            m += b * *c;
        }
        CurvatureOperator::from_matrix(self.n, m).expect("symmetric")
    }

    /// A random R for which T² + R is a scalar.
    pub fn solve<R: Rng>(&self, t: &Multivector, rng: &mut R) -> Result<CurvatureOperator> {
        let ct = embed_form(t);
        let target = -non_scalar_vector(&ct.cl_mul(&ct)?);
        let (x, _) = linalg::coordinates(&self.map, &target);
        let z = DVector::from_fn(self.kernel.ncols(), |_, _| linalg::gaussian(rng));
        Ok(self.operator(&(x + &self.kernel * z)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteItem {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub max_residual: f64,
    pub detail: serde_json::Value,
}

/// Classical Bianchi vs Clifford criterion: (agreements, disagreements, both-pass count).
pub fn bianchi_agreement<R: Rng>(
    n: usize,
    samples: usize,
    rng: &mut R,
    tol: &ToleranceConfig,
) -> Result<(usize, usize, usize)> {
    let solver = BianchiSolver::new(n);
    let (mut agree, mut disagree, mut both) = (0, 0, 0);
    for s in 0..samples {
        let t = random_form(n, 3, rng);
        let r = match s % 3 {
            0 => solver.solve(&t, rng)?,
            1 => random_curvature(n, rng),
            _ => solver.solve(&t, rng)?.add(&random_curvature(n, rng).scale(1e-3))?,
        };
        let classical = bianchi1_check(&t, &r, tol)?.passes;
        let clifford = bianchi_clifford_check(&t, &r, tol)?.is_scalar;
        if classical == clifford {
            agree += 1;
        } else {
            disagree += 1;
        }
        if classical && clifford {
            both += 1;
        }
    }
    Ok((agree, disagree, both))
}

pub fn run_suite(tol: &ToleranceConfig, seed: u64, samples: usize) -> Result<Vec<SuiteItem>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    // σ_T of the dimension-5 normal form
    let grid = [-2.0, -0.5, 0.3, 1.0, 2.5];
    let mut worst: f64 = 0.0;
    for &rho in &grid {
        for &lam in &grid {
            let t = Multivector::from_terms(5, &[(&[1, 2, 5], -rho), (&[3, 4, 5], -lam)])?;
            let want = Multivector::e(5, &[1, 2, 3, 4]).scale(rho * lam);
            worst = worst.max(sigma_t(&t)?.max_diff(&want));
        }
    }
    out.push(SuiteItem {
        name: "sigma_goldens".into(),
        passed: worst <= 1e-9,
        cases: 25,
        max_residual: worst,
        detail: serde_json::Value::Null,
    });

    // T² = -2σ_T + ‖T‖²
    let mut worst: f64 = 0.0;
    let mut per_dim = BTreeMap::new();
    for n in 3..=6 {
        let mut w: f64 = 0.0;
        for _ in 0..samples {
            let t = random_form(n, 3, &mut rng);
            w = w.max(clifford_square_residual(&t)?);
        }
        per_dim.insert(n.to_string(), w);
        worst = worst.max(w);
    }
    out.push(SuiteItem {
        name: "clifford_identity".into(),
        passed: worst <= 1e-9,
        cases: 4 * samples,
        max_residual: worst,
        detail: serde_json::to_value(per_dim)?,
    });

    // classical Bianchi I vs the Clifford criterion
    let mut detail = BTreeMap::new();
    let mut total_dis = 0;
    for n in 4..=6 {
        let (agree, dis, both) = bianchi_agreement(n, samples, &mut rng, tol)?;
        total_dis += dis;
        detail.insert(n.to_string(), serde_json::json!({"agree": agree, "disagree": dis, "both_pass": both}));
    }
    out.push(SuiteItem {
        name: "bianchi_equivalence".into(),
        passed: total_dis == 0,
        cases: 3 * samples,
        max_residual: total_dis as f64,
        detail: serde_json::to_value(detail)?,
    });

    // frame-randomized classification
    let mut mismatches = 0;
    for n in 3..=6 {
        for _ in 0..samples.min(50) {
            let t = random_form(n, 3, &mut rng);
            let q = linalg::random_rotation(n, &mut rng);
            if classify(&t, tol)?.case_label != classify(&t.rotate(&q), tol)?.case_label {
                mismatches += 1;
            }
        }
    }
    out.push(SuiteItem {
        name: "frame_invariance".into(),
        passed: mismatches == 0,
        cases: 4 * samples.min(50),
        max_residual: mismatches as f64,
        detail: serde_json::Value::Null,
    });

    // catalog entries and Jacobi perturbations
    let mut failing = Vec::new();
    let mut worst: f64 = 0.0;
    for f in catalog::FAMILIES {
        let e = catalog::build(f.name, &BTreeMap::new(), tol)?;
        if let Some(j) = e.structural("jacobi") {
            worst = worst.max(j.residual.unwrap_or(0.0));
        }
        if !e.all_pass() {
            failing.push(f.name);
        }
    }
    out.push(SuiteItem {
        name: "catalog".into(),
        passed: failing.is_empty(),
        cases: catalog::FAMILIES.len(),
        max_residual: worst,
        detail: serde_json::json!({ "failing": failing }),
    });
    let mut survivors = Vec::new();
    for p in catalog::PERTURBATIONS {
        if catalog::perturbed_algebra(p, tol)?.jacobi_check(tol).passes {
            survivors.push(p.entry);
        }
    }
    out.push(SuiteItem {
        name: "jacobi_perturbations".into(),
        passed: survivors.is_empty(),
        cases: catalog::PERTURBATIONS.len(),
        max_residual: survivors.len() as f64,
        detail: serde_json::json!({ "not_detected": survivors }),
    });
    Ok(out)
}
