//! Ricci tensor of an invariant metric on p straight from the bracket,
//! for compact (unimodular) groups:
//! Ric(e_u, e_v) = −½ Σ_ij g([e_u,X_i]_p, X_j) g([e_v,X_i]_p, X_j)
//!               + ¼ Σ_ij g([X_i,X_j]_p, e_u) g([X_i,X_j]_p, e_v) + ½ δ_uv
//! with X_i g-orthonormal and e_u Q-orthonormal.

use super::doubled::DoubledSpace;
use crate::catalog::SpaceSpec;
use crate::diagonal::{ricci_diagonal, ricci_from_structural, DiagonalMetric};
use crate::error::{Error, Result};
use crate::numeric::ratio_to_f64;
use crate::symmetric::{ricci_full, FullMetric};
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

const MAX_CONDITION: f64 = 1e8;

pub fn diagonal_gram(ds: &DoubledSpace, g: &DiagonalMetric) -> DMatrix<f64> {
    full_gram(
        ds,
        &FullMetric {
            x1: g.x1,
            x2: g.x2,
            x3: g.x3,
            x4: 0.0,
        },
    )
}

/// [[x1 I, x4 I, 0], [x4 I, x2 I, 0], [0, 0, x3 I]] in the Q-orthonormal basis.
pub fn full_gram(ds: &DoubledSpace, g: &FullMetric) -> DMatrix<f64> {
    let (n, p) = (ds.n, ds.dim_p());
    let mut m = DMatrix::zeros(p, p);
    for i in 0..n {
        m[(i, i)] = g.x1;
        m[(n + i, n + i)] = g.x2;
        m[(i, n + i)] = g.x4;
        m[(n + i, i)] = g.x4;
    }
    for u in ds.p3() {
        m[(u, u)] = g.x3;
    }
    m
}

pub fn ricci_bruteforce(ds: &DoubledSpace, gram: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = ds.dim_p();
    if gram.nrows() != p || gram.ncols() != p {
        return Err(Error::DimensionMismatch(format!(
            "metric is {}x{}, p has dimension {p}",
            gram.nrows(),
            gram.ncols()
        )));
    }
    let eig = SymmetricEigen::new(gram.clone()).eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    if lo <= 0.0 {
        return Err(Error::InvalidMetric(format!("smallest eigenvalue {lo:e}")));
    }
    if hi / lo > MAX_CONDITION {
        return Err(Error::InvalidMetric(format!(
            "condition number {:e} exceeds {MAX_CONDITION:e}",
            hi / lo
        )));
    }
    let chol = gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidMetric("Cholesky failed".into()))?;
    let l = chol.l();
    // X_i = Σ_u T_ui e_u with T = L^{-T}; then g(Y, X_j) = (Yᵀ L)_j
    let t = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidMetric("singular Cholesky factor".into()))?
        .transpose();
    let bu = |u: usize| DMatrix::from_fn(p, p, |w, c| ds.b(u, w, c));
    let m: Vec<DMatrix<f64>> = (0..p)
        .into_par_iter()
        .map(|u| t.transpose() * bu(u) * &l)
        .collect();
    let nn: Vec<DMatrix<f64>> = (0..p)
        .into_par_iter()
        .map(|u| {
            let bg = DMatrix::from_fn(p, p, |w, w2| {
                (0..p).map(|c| ds.b(w, w2, c) * gram[(c, u)]).sum()
            });
            t.transpose() * bg * &t
        })
        .collect();
    Ok(DMatrix::from_fn(p, p, |u, v| {
        let delta = if u == v { 0.5 } else { 0.0 };
        -0.5 * m[u].dot(&m[v]) + 0.25 * nn[u].dot(&nn[v]) + delta
    }))
}

/// Catalog block of each p3 vector, matched through the detected ratio.
fn p3_blocks(ds: &DoubledSpace, spec: &SpaceSpec) -> Result<Vec<usize>> {
    (0..ds.d)
        .map(|i| {
            let a = ds.ideal_a[ds.p3_ideal[i]];
            spec.killing_ratios
                .iter()
                .position(|b| (ratio_to_f64(&b.a) - a).abs() < 1e-9)
                .ok_or_else(|| {
                    Error::Oracle(format!(
                        "{}: detected ratio {a} not in the catalog",
                        spec.id
                    ))
                })
        })
        .collect()
}

/// Ricci tensor matrix predicted by the closed diagonal formula.
pub fn closed_ricci_diagonal(
    ds: &DoubledSpace,
    spec: &SpaceSpec,
    g: &DiagonalMetric,
) -> Result<DMatrix<f64>> {
    let r = ricci_diagonal(spec, g);
    let blocks = p3_blocks(ds, spec)?;
    let (n, p) = (ds.n, ds.dim_p());
    let mut m = DMatrix::zeros(p, p);
    for i in 0..n {
        m[(i, i)] = r.r1 * g.x1;
        m[(n + i, n + i)] = r.r2 * g.x2;
    }
    for (i, u) in ds.p3().enumerate() {
        m[(u, u)] = r.r3[blocks[i]] * g.x3;
    }
    Ok(m)
}

/// Ricci tensor matrix predicted by the 4-parameter formula.
pub fn closed_ricci_full(
    ds: &DoubledSpace,
    spec: &SpaceSpec,
    g: &FullMetric,
) -> Result<DMatrix<f64>> {
    let r = ricci_full(spec, g)?;
    let blocks = p3_blocks(ds, spec)?;
    let (n, p) = (ds.n, ds.dim_p());
    let mut m = DMatrix::zeros(p, p);
    for i in 0..n {
        m[(i, i)] = r.r1 * g.x1;
        m[(n + i, n + i)] = r.r2 * g.x2;
        m[(i, n + i)] = r.r12 * g.x4;
        m[(n + i, i)] = r.r12 * g.x4;
    }
    for (i, u) in ds.p3().enumerate() {
        m[(u, u)] = r.r3[blocks[i]] * g.x3;
    }
    Ok(m)
}

/// Ricci tensor matrix from the structural-constant formula fed with the
/// brute-force [ijk] (p3 split by ideal).
pub fn closed_ricci_structural(ds: &DoubledSpace, g: &DiagonalMetric) -> Result<DMatrix<f64>> {
    let sc = ds.structural_constants(true);
    let (_, idx) = ds.blocks(true);
    let xs: Vec<f64> = (0..idx.len())
        .map(|k| {
            if k == 0 {
                g.x1
            } else if k == 1 {
                g.x2
            } else {
                g.x3
            }
        })
        .collect();
    let r = ricci_from_structural(&xs, &sc)?;
    let p = ds.dim_p();
    let mut m = DMatrix::zeros(p, p);
    for (k, block) in idx.iter().enumerate() {
        for &u in block {
            m[(u, u)] = r[k] * xs[k];
        }
    }
    Ok(m)
}

pub fn max_abs_dev(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

/// Relative spread of the Ricci operator G⁻¹ Ric about its mean eigenvalue.
pub fn einstein_residual_bruteforce(ric: &DMatrix<f64>, gram: &DMatrix<f64>) -> Result<f64> {
    let gi = gram
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidMetric("singular metric".into()))?;
    let op = gi * ric;
    let p = op.nrows();
    let mean = op.trace() / p as f64;
    Ok((op - DMatrix::identity(p, p) * mean).amax() / mean.abs())
}
