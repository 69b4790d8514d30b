//! Oracle suite behind `ehhk verify`: every supported embedded pair checked
//! against the closed forms.

use crate::catalog::Catalog;
use crate::diagonal::structural_constants_closed;
use crate::diagonal::DiagonalMetric;
use crate::einstein::{solve_diagonal, EinsteinSolution};
use crate::error::Result;
use crate::flow::{integrate, oracle_spot_check, scale_free_distance, FlowOptions, FlowState};
use crate::lie::ricci::{einstein_residual_bruteforce, max_abs_dev};
use crate::lie::{
    closed_ricci_diagonal, closed_ricci_full, closed_ricci_structural, diagonal_gram, embed_pair,
    full_gram, ricci_bruteforce, DoubledSpace, PairCase,
};
use crate::symmetric::{classify_symmetric, FullMetric};
use crate::tolerance as tol;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub case: String,
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn push(&mut self, case: PairCase, name: &str, value: f64, tol: f64) {
        self.checks.push(Check {
            case: case.name().into(),
            name: name.into(),
            value,
            tol,
            passed: value.is_finite() && value < tol,
        });
    }
}

pub fn random_diagonal<R: Rng>(rng: &mut R) -> DiagonalMetric {
    let mut v = || rng.gen_range((0.2f64).ln()..(5.0f64).ln()).exp();
    DiagonalMetric {
        x1: v(),
        x2: v(),
        x3: v(),
    }
}

/// x4 stays within 0.9 √(x1 x2) so the metric is comfortably definite.
pub fn random_full<R: Rng>(rng: &mut R) -> FullMetric {
    let d = random_diagonal(rng);
    let s: f64 = rng.gen_range(-0.9..0.9);
    FullMetric {
        x1: d.x1,
        x2: d.x2,
        x3: d.x3,
        x4: s * (d.x1 * d.x2).sqrt(),
    }
}

fn brute_residual(ds: &DoubledSpace, sol: &EinsteinSolution) -> Result<f64> {
    let gram = full_gram(
        ds,
        &FullMetric {
            x1: sol.x1,
            x2: sol.x2,
            x3: sol.x3,
            x4: sol.x4,
        },
    );
    einstein_residual_bruteforce(&ricci_bruteforce(ds, &gram)?, &gram)
}

pub fn run_verification(
    catalog: &Catalog,
    level: Level,
    seed: u64,
    samples: usize,
) -> Result<VerifyReport> {
    let mut rep = VerifyReport {
        level,
        seed,
        checks: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in PairCase::ALL {
        let spec = case.spec(catalog)?;
        let pair = embed_pair(case)?;
        rep.push(case, "jacobi", pair.h.jacobi_residual(), tol::JACOBI);
        rep.push(
            case,
            "killing_invariance",
            pair.h.killing_invariance_residual(&mut rng, 100),
            tol::JACOBI,
        );
        rep.push(
            case,
            "killing_ratios",
            pair.ratio_deviation(&spec)?,
            tol::CASIMIR,
        );
        let cas = pair.casimir_isotropy();
        let k = spec.kappa_f64();
        let n = pair.n();
        rep.push(
            case,
            "casimir_kappa",
            (cas - nalgebra::DMatrix::identity(n, n) * k).amax(),
            tol::CASIMIR,
        );
        let ds = DoubledSpace::new(&pair);
        rep.push(
            case,
            "bracket_relations",
            ds.bracket_relations().max(),
            tol::JACOBI,
        );
        let sc = ds.structural_constants(false);
        let closed = structural_constants_closed::<f64>(&spec)?;
        let mut dev: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    dev = dev.max((sc.get(i, j, l) - closed.get(i, j, l)).abs());
                }
            }
        }
        rep.push(case, "structural_constants", dev, tol::STRUCTURAL);
        let (mut d1, mut d2): (f64, f64) = (0.0, 0.0);
        for _ in 0..samples {
            let g = random_diagonal(&mut rng);
            let brute = ricci_bruteforce(&ds, &diagonal_gram(&ds, &g))?;
            d1 = d1.max(max_abs_dev(&brute, &closed_ricci_diagonal(&ds, &spec, &g)?));
            d2 = d2.max(max_abs_dev(&brute, &closed_ricci_structural(&ds, &g)?));
        }
        rep.push(case, "ricci_diagonal", d1, tol::RICCI_ORACLE);
        rep.push(case, "ricci_structural", d2, tol::RICCI_ORACLE);
        let mut worst: f64 = 0.0;
        for sol in solve_diagonal(&spec).unwrap_or_default() {
            worst = worst.max(brute_residual(&ds, &sol)?);
        }
        rep.push(
            case,
            "diagonal_solutions_residual",
            worst,
            tol::RESIDUAL_ORACLE,
        );
        if level == Level::Fast {
            continue;
        }
        if case.is_symmetric() {
            let mut d3: f64 = 0.0;
            for _ in 0..samples {
                let g = random_full(&mut rng);
                let brute = ricci_bruteforce(&ds, &full_gram(&ds, &g))?;
                d3 = d3.max(max_abs_dev(&brute, &closed_ricci_full(&ds, &spec, &g)?));
            }
            rep.push(case, "ricci_full", d3, tol::RICCI_ORACLE);
            rep.push(
                case,
                "casimir_identity",
                pair.casimir_identity_defect(),
                tol::CASIMIR,
            );
            let mut worst: f64 = 0.0;
            for sol in classify_symmetric(&spec)? {
                worst = worst.max(brute_residual(&ds, &sol)?);
            }
            rep.push(
                case,
                "symmetric_solutions_residual",
                worst,
                tol::RESIDUAL_ORACLE,
            );
        }
        rep.push(
            case,
            "flow_vector_field",
            oracle_spot_check(&spec, &ds, &mut rng, 5)?,
            tol::RICCI_ORACLE,
        );
        let mut drift: f64 = 0.0;
        for sol in solve_diagonal(&spec).unwrap_or_default() {
            let x0 = [sol.x1, sol.x2, sol.x3];
            let end = integrate(
                &spec,
                FlowState { t: 0.0, x: x0 },
                10.0,
                &FlowOptions::default(),
                |_| {},
            )?;
            drift = drift.max(scale_free_distance(&spec, &end.x, &x0));
        }
        rep.push(case, "flow_stationary", drift, tol::FLOW_STATIONARY);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_passes_and_is_deterministic() {
        let c = Catalog::builtin();
        let a = run_verification(&c, Level::Fast, 3, 5).unwrap();
        assert!(a.passed(), "{:?}", a.first_failure());
        let b = run_verification(&c, Level::Fast, 3, 5).unwrap();
        let va: Vec<f64> = a.checks.iter().map(|c| c.value).collect();
        let vb: Vec<f64> = b.checks.iter().map(|c| c.value).collect();
        assert_eq!(va, vb);
    }
}
