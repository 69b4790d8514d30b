//! The block matrix L at diagonal Einstein metrics, its spectrum against 2ρ,
//! and the resulting critical-point type of the normalized scalar curvature.

use crate::catalog::SpaceSpec;
use crate::diagonal::{
    scal_n_diagonal, structural_constants_closed, volume_scale, DiagonalMetric, StructuralConstants,
};
use crate::einstein::{locate, EinsteinSolution, Label, RootPosition};
use crate::error::{Error, Result};
use crate::numeric::{int, Rational};
use nalgebra::DMatrix;
use num_traits::One;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// λ1 < 2ρ < λ2
    SaddleMinAlongDiag,
    /// λ1 < λ2 < 2ρ
    LocalMinCoindexGe2,
    /// the single metric of abelian K; λ1 < 2ρ < λ2
    AbelianSingle,
    /// x+ = x−: 2ρ = λ2
    DegenerateBoundary,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub space_id: String,
    pub label: Label,
    pub l_matrix: [[f64; 3]; 3],
    pub eigenvalues: [f64; 3],
    pub lambda1: f64,
    pub lambda2: f64,
    pub two_rho: f64,
    pub classification: Classification,
    /// Kernel, λ1 and λ2 directions, unnormalized.
    pub eigenvectors: [[f64; 3]; 3],
}

/// L over arbitrary blocks:
/// L_kk = 1/n_k Σ_{i,j≠k} [ijk] x_k/(x_i x_j) + 1/n_k Σ_{i≠k} [ikk] x_i/x_k²,
/// L_km = 1/√(n_k n_m) Σ_i [ikm] (x_i² − x_k² − x_m²)/(x_i x_k x_m).
pub fn l_matrix_general(xs: &[f64], sc: &StructuralConstants<f64>) -> Result<DMatrix<f64>> {
    let r = sc.len();
    if xs.len() != r {
        return Err(Error::DimensionMismatch(format!(
            "{} metric blocks against {} structural-constant blocks",
            xs.len(),
            r
        )));
    }
    let nk: Vec<f64> = sc.dims.iter().map(|&d| d as f64).collect();
    let mut l = DMatrix::zeros(r, r);
    for k in 0..r {
        let mut s = 0.0;
        for i in (0..r).filter(|&i| i != k) {
            for j in (0..r).filter(|&j| j != k) {
                s += sc.get(i, j, k) * xs[k] / (xs[i] * xs[j]);
            }
            s += sc.get(i, k, k) * xs[i] / (xs[k] * xs[k]);
        }
        l[(k, k)] = s / nk[k];
        for m in (0..r).filter(|&m| m != k) {
            let mut t = 0.0;
            for i in 0..r {
                t += sc.get(i, k, m) * (xs[i] * xs[i] - xs[k] * xs[k] - xs[m] * xs[m])
                    / (xs[i] * xs[k] * xs[m]);
            }
            l[(k, m)] = t / (nk[k] * nk[m]).sqrt();
        }
    }
    Ok(l)
}

/// Closed-form L at (x, x, 1):
/// κ/(2x²) [[1, 0, −√(n/d)], [0, 1, −√(n/d)], [−√(n/d), −√(n/d), 2n/d]].
pub fn l_matrix_closed(spec: &SpaceSpec, x: f64) -> [[f64; 3]; 3] {
    let c = spec.kappa_f64() / (2.0 * x * x);
    let (n, d) = (spec.n as f64, spec.d as f64);
    let s = (n / d).sqrt();
    [
        [c, 0.0, -c * s],
        [0.0, c, -c * s],
        [-c * s, -c * s, c * 2.0 * n / d],
    ]
}

pub fn stability_report(spec: &SpaceSpec, sol: &EinsteinSolution) -> Result<StabilityReport> {
    if !sol.label.is_diagonal() {
        return Err(spec.unsupported("stability is computed for diagonal solutions"));
    }
    if sol.residual > 1e-8 {
        return Err(Error::NotEinstein {
            space: spec.id.clone(),
            residual: sol.residual,
        });
    }
    let x = sol.x1 / sol.x3;
    let (n, d) = (spec.n as f64, spec.d as f64);
    let k = spec.kappa_f64();
    let lambda1 = k / (2.0 * x * x);
    let lambda2 = (2.0 * n + d) / d * lambda1;
    let two_rho = ((2.0 * k + 1.0) * x - k) / (2.0 * x * x);
    let classification = if spec.flags.abelian_k {
        Classification::AbelianSingle
    } else if matches!(
        spec.uniform_a().map(|a| locate(spec, two_k_ratio(spec, a))),
        Some(Ok(RootPosition::Between))
    ) && sol.label == Label::G1Plus
        || sol.label == Label::G2Minus
    {
        if lambda1 < two_rho && two_rho < lambda2 {
            Classification::SaddleMinAlongDiag
        } else if lambda2 < two_rho {
            Classification::LocalMinCoindexGe2
        } else {
            Classification::DegenerateBoundary
        }
    } else {
        Classification::DegenerateBoundary
    };
    let (sn, sd) = (n.sqrt(), d.sqrt());
    Ok(StabilityReport {
        space_id: spec.id.clone(),
        label: sol.label,
        l_matrix: l_matrix_closed(spec, x),
        eigenvalues: [0.0, lambda1, lambda2],
        lambda1,
        lambda2,
        two_rho,
        classification,
        eigenvectors: [[sn, sn, sd], [1.0, -1.0, 0.0], [-sd, -sd, 2.0 * sn]],
    })
}

/// 2(1−a+κ)/(2κ+1): the point separating 2ρ < λ2 from 2ρ > λ2.
fn two_k_ratio(spec: &SpaceSpec, a: Rational) -> Rational {
    let k = spec.kappa;
    int(2) * (Rational::one() - a + k) / (int(2) * k + Rational::one())
}

/// The inequalities decided without floating point, via root location of
/// x± against rational thresholds:
/// λ1 < 2ρ ⟺ x > 2κ/(2κ+1), 2ρ < λ2 ⟺ x < 2(1−a+κ)/(2κ+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExactLpe {
    pub minus_l1_lt_2rho: bool,
    pub minus_2rho_lt_l2: bool,
    pub plus_l1_lt_2rho: bool,
    pub plus_l2_lt_2rho: bool,
}

impl ExactLpe {
    pub fn holds(&self) -> bool {
        self.minus_l1_lt_2rho
            && self.minus_2rho_lt_l2
            && self.plus_l1_lt_2rho
            && self.plus_l2_lt_2rho
    }
}

pub fn exact_lpe(spec: &SpaceSpec) -> Result<ExactLpe> {
    let a = spec.require_uniform()?;
    let k = spec.kappa;
    let lo = int(2) * k / (int(2) * k + Rational::one());
    let hi = two_k_ratio(spec, a);
    let p_lo = locate(spec, lo)?;
    let p_hi = locate(spec, hi)?;
    Ok(ExactLpe {
        minus_l1_lt_2rho: p_lo == RootPosition::BelowMinus,
        minus_2rho_lt_l2: p_hi == RootPosition::Between || p_hi == RootPosition::AbovePlus,
        plus_l1_lt_2rho: matches!(
            p_lo,
            RootPosition::BelowMinus | RootPosition::AtMinus | RootPosition::Between
        ),
        plus_l2_lt_2rho: matches!(
            p_hi,
            RootPosition::BelowMinus | RootPosition::AtMinus | RootPosition::Between
        ),
    })
}

/// Abelian case: the thresholds compared against x = (κ+1)/(2κ+1) exactly.
pub fn exact_abelian(spec: &SpaceSpec) -> bool {
    let k = spec.kappa;
    let t = int(2) * k + Rational::one();
    let x = (k + Rational::one()) / t;
    // with a = 0, κ = d/n and the upper threshold is 2(1+κ)/(2κ+1)
    int(2) * k / t < x && x < int(2) * (Rational::one() + k) / t
}

/// scal_N at a diagonal metric as Σ c_m exp(w_m·t) in log coordinates
/// t_k = ln(x_k/x0_k): scal = ½ Σ n_k/x_k − ¼ Σ [ijk] x_k/(x_i x_j), times
/// the volume factor Π x_k^{n_k/dim}.
fn log_monomials(spec: &SpaceSpec, x0: [f64; 3]) -> Result<Vec<(f64, [f64; 3])>> {
    let sc = structural_constants_closed::<f64>(spec)?;
    let dims = [spec.n as f64, spec.n as f64, spec.d as f64];
    let total: f64 = dims.iter().sum();
    let v = dims.map(|d| d / total);
    let mut out = Vec::new();
    let mut push = |c: f64, e: [f64; 3]| {
        let w = [v[0] + e[0], v[1] + e[1], v[2] + e[2]];
        let c = c * (0..3).map(|k| x0[k].powf(w[k])).product::<f64>();
        out.push((c, w));
    };
    for k in 0..3 {
        let mut e = [0.0; 3];
        e[k] = -1.0;
        push(0.5 * dims[k], e);
    }
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let c = sc.get(i, j, k);
                if c != 0.0 {
                    let mut e = [0.0; 3];
                    e[k] += 1.0;
                    e[i] -= 1.0;
                    e[j] -= 1.0;
                    push(-0.25 * c, e);
                }
            }
        }
    }
    Ok(out)
}

/// Central-difference Hessian of scal_N at `g` in g-orthonormal block
/// coordinates c_k (metric x_k(1 + c_k/√n_k)). The differences are taken in
/// log coordinates, where each monomial's second difference has the closed
/// form 4 sinh(h w_i/2)² or sinh(h w_i) sinh(h w_j), so the quotient carries
/// no cancellation error. At a critical point the Jacobian rescaling by
/// 1/√(n_i n_j) converts between the two coordinate systems.
pub fn fd_hessian(spec: &SpaceSpec, g: &DiagonalMetric, step: f64) -> Result<[[f64; 3]; 3]> {
    let terms = log_monomials(spec, g.array())?;
    let dims = [spec.n as f64, spec.n as f64, spec.d as f64];
    let h2 = step * step;
    let mut h = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let v: f64 = terms
                .iter()
                .map(|(c, w)| {
                    if i == j {
                        c * 4.0 * (0.5 * step * w[i]).sinh().powi(2) / h2
                    } else {
                        c * (step * w[i]).sinh() * (step * w[j]).sinh() / h2
                    }
                })
                .sum();
            h[i][j] = v / (dims[i] * dims[j]).sqrt();
        }
    }
    Ok(h)
}

/// ½·vol(g)^{1/dim}·(2ρ I − L), the expected Hessian on the traceless plane.
pub fn expected_hessian(spec: &SpaceSpec, sol: &EinsteinSolution) -> Result<[[f64; 3]; 3]> {
    let rep = stability_report(spec, sol)?;
    let s = volume_scale(spec, &sol.diagonal());
    let mut h = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { rep.two_rho } else { 0.0 };
            h[i][j] = 0.5 * s * (id - rep.l_matrix[i][j]) / sol.x3;
        }
    }
    Ok(h)
}

/// Projection of a 3×3 matrix onto the complement of (√n, √n, √d).
pub fn project_traceless(spec: &SpaceSpec, m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let u = [spec.n as f64, spec.n as f64, spec.d as f64].map(f64::sqrt);
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u = u.map(|v| v / norm);
    let mut p = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            p[i][j] = if i == j { 1.0 } else { 0.0 } - u[i] * u[j];
        }
    }
    let mul = |a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]| {
        let mut c = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        c
    };
    mul(&mul(&p, m), &p)
}

/// Result of probing scal_N around a diagonal solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveProbe {
    /// scal_N(t x, x/t, 1) is smallest at t = 1 over the grid
    pub transverse_min: bool,
    /// scal_N(x, x, s) is largest at s = 1 over the grid
    pub along_line_max: bool,
    /// scal_N(x, x, s) is smallest at s = 1 over the grid
    pub along_line_min: bool,
}

pub fn probe_curves(spec: &SpaceSpec, sol: &EinsteinSolution, t_grid: &[f64]) -> CurveProbe {
    let x = sol.x1 / sol.x3;
    let at = |x1: f64, x2: f64, x3: f64| scal_n_diagonal(spec, &DiagonalMetric { x1, x2, x3 });
    let center = at(x, x, 1.0);
    let others = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
        t_grid
            .iter()
            .filter(|&&t| (t - 1.0).abs() > 1e-12)
            .map(|&t| f(t))
            .collect()
    };
    let trans = others(&|t| at(t * x, x / t, 1.0));
    let line = others(&|s| at(x, x, s));
    CurveProbe {
        transverse_min: trans.iter().all(|&v| v > center),
        along_line_max: line.iter().all(|&v| v < center),
        along_line_min: line.iter().all(|&v| v > center),
    }
}

/// True when the probe shows the critical-point type expected for the label:
/// minus and abelian solutions are saddles (minimum across x1 = x2, maximum
/// along it), the plus solution is a local minimum in both directions.
pub fn saddle_curve_check(
    spec: &SpaceSpec,
    sol: &EinsteinSolution,
    t_grid: &[f64],
) -> Result<bool> {
    let p = probe_curves(spec, sol, t_grid);
    let rep = stability_report(spec, sol)?;
    Ok(match rep.classification {
        Classification::SaddleMinAlongDiag | Classification::AbelianSingle => {
            p.transverse_min && p.along_line_max
        }
        Classification::LocalMinCoindexGe2 => p.transverse_min && p.along_line_min,
        Classification::DegenerateBoundary => p.transverse_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{existence_condition, Catalog, Cond2};
    use crate::einstein::{abelian_two_rho, solve_diagonal};
    use crate::numeric::ratio_to_f64;
    use nalgebra::SymmetricEigen;

    fn spec(id: &str) -> SpaceSpec {
        Catalog::builtin().resolve(id, &[]).unwrap()
    }

    const GRID: [f64; 5] = [0.9, 0.95, 1.0, 1.05, 1.1];

    #[test]
    fn su3so3_minus() {
        let s = spec("SU(3)/SO(3)");
        let sols = solve_diagonal(&s).unwrap();
        let r = stability_report(&s, &sols[1]).unwrap();
        assert!((r.lambda1 - 0.4284).abs() < 1e-4);
        assert!((r.two_rho - 0.8806).abs() < 1e-4);
        assert!((r.lambda2 - 1.8564).abs() < 1e-4);
        assert_eq!(r.classification, Classification::SaddleMinAlongDiag);
        let p = stability_report(&s, &sols[0]).unwrap();
        assert_eq!(p.classification, Classification::LocalMinCoindexGe2);
        assert!(saddle_curve_check(&s, &sols[1], &GRID).unwrap());
        assert!(saddle_curve_check(&s, &sols[0], &GRID).unwrap());
        let probe = probe_curves(&s, &sols[0], &GRID);
        assert!(probe.transverse_min && probe.along_line_min);
    }

    #[test]
    fn abelian_case() {
        let s = spec("SU(3)/T^2");
        let sol = &solve_diagonal(&s).unwrap()[0];
        let r = stability_report(&s, sol).unwrap();
        assert_eq!(r.classification, Classification::AbelianSingle);
        assert!(r.lambda1 < r.two_rho && r.two_rho < r.lambda2);
        assert!((r.two_rho - ratio_to_f64(&abelian_two_rho(&s))).abs() < 1e-14);
        assert!(exact_abelian(&s));
        assert!(saddle_curve_check(&s, sol, &GRID).unwrap());
    }

    #[test]
    fn closed_matches_general_and_eigen() {
        for s in Catalog::builtin().expanded(2).unwrap() {
            let Ok(sols) = solve_diagonal(&s) else {
                continue;
            };
            let Ok(sc) = structural_constants_closed::<f64>(&s) else {
                continue;
            };
            if s.killing_ratios.len() != 1 {
                continue;
            }
            for sol in &sols {
                let rep = stability_report(&s, sol).unwrap();
                let gen = l_matrix_general(&[sol.x1, sol.x2, sol.x3], &sc).unwrap();
                for i in 0..3 {
                    for j in 0..3 {
                        let tol = 1e-12 * rep.lambda2.max(1.0);
                        assert!((gen[(i, j)] - rep.l_matrix[i][j]).abs() < tol, "{}", s.id);
                    }
                }
                let mut ev = SymmetricEigen::new(gen.clone())
                    .eigenvalues
                    .as_slice()
                    .to_vec();
                ev.sort_by(f64::total_cmp);
                assert!(ev[0].abs() < 1e-12 * rep.lambda2);
                assert!((ev[1] - rep.lambda1).abs() < 1e-12 * rep.lambda2);
                assert!((ev[2] - rep.lambda2).abs() < 1e-12 * rep.lambda2);
                for (v, lam) in rep.eigenvectors.iter().zip(rep.eigenvalues) {
                    for i in 0..3 {
                        let lv: f64 = (0..3).map(|j| gen[(i, j)] * v[j]).sum();
                        assert!((lv - lam * v[i]).abs() < 1e-10 * rep.lambda2.max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn zero_constants_zero_matrix() {
        let sc = StructuralConstants::<f64>::zeros(
            vec!["a".into(), "b".into(), "c".into()],
            vec![2, 2, 1],
        );
        let l = l_matrix_general(&[1.0, 2.0, 3.0], &sc).unwrap();
        assert!(l.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn exact_inequalities_on_yes_rows() {
        for s in Catalog::builtin().expanded(3).unwrap() {
            if s.flags.abelian_k {
                assert!(exact_abelian(&s), "{}", s.id);
                continue;
            }
            let Ok(e) = existence_condition(&s) else {
                continue;
            };
            if e.as_cond2() == Cond2::Yes {
                assert!(exact_lpe(&s).unwrap().holds(), "{}", s.id);
            }
        }
    }

    #[test]
    fn hessian_identity_su3() {
        let s = spec("SU(3)/SO(3)");
        for sol in solve_diagonal(&s).unwrap() {
            let fd = project_traceless(&s, &fd_hessian(&s, &sol.diagonal(), 1e-5).unwrap());
            let ex = project_traceless(&s, &expected_hessian(&s, &sol).unwrap());
            let scale = ex.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            for i in 0..3 {
                for j in 0..3 {
                    assert!(
                        (fd[i][j] - ex[i][j]).abs() < 1e-5 * scale,
                        "{i}{j}: {} vs {}",
                        fd[i][j],
                        ex[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn monomials_reproduce_scal_n() {
        let s = spec("SO(7)/G2");
        let x0 = [0.7, 1.3, 0.9];
        let terms = log_monomials(&s, x0).unwrap();
        for t in [[0.0, 0.0, 0.0], [0.1, -0.2, 0.3], [-0.5, 0.4, 0.0]] {
            let f: f64 = terms
                .iter()
                .map(|(c, w)| c * (w[0] * t[0] + w[1] * t[1] + w[2] * t[2]).exp())
                .sum();
            let g = DiagonalMetric {
                x1: x0[0] * t[0].exp(),
                x2: x0[1] * t[1].exp(),
                x3: x0[2] * t[2].exp(),
            };
            assert!((f - scal_n_diagonal(&s, &g)).abs() < 1e-12 * f.abs());
        }
    }

    #[test]
    fn symmetric_probe_invariance() {
        let s = spec("E7/SU(8)");
        let sol = &solve_diagonal(&s).unwrap()[1];
        for t in GRID {
            let a = scal_n_diagonal(
                &s,
                &DiagonalMetric {
                    x1: t * sol.x1,
                    x2: sol.x1 / t,
                    x3: 1.0,
                },
            );
            let b = scal_n_diagonal(
                &s,
                &DiagonalMetric {
                    x1: sol.x1 / t,
                    x2: t * sol.x1,
                    x3: 1.0,
                },
            );
            assert_eq!(a, b);
        }
    }
}
