//! Matrix realizations of the compact classical Lie algebras with structure
//! constants and Killing forms computed by brute force.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraKind {
    So,
    Su,
    Sp,
}

/// Complex matrix as a pair of real parts, realified as [[Re, −Im], [Im, Re]].
#[derive(Debug, Clone)]
pub struct CMat {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            re: DMatrix::zeros(n, n),
            im: DMatrix::zeros(n, n),
        }
    }

    pub fn realify(&self) -> DMatrix<f64> {
        let n = self.re.nrows();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.re);
        m.view_mut((n, n), (n, n)).copy_from(&self.re);
        m.view_mut((0, n), (n, n)).copy_from(&(-&self.im));
        m.view_mut((n, 0), (n, n)).copy_from(&self.im);
        m
    }
}

/// Basis of u(n) (`traceless`: su(n)) as complex skew-Hermitian matrices.
pub fn unitary_basis(n: usize, traceless: bool) -> Vec<(String, CMat)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut a = CMat::zeros(n);
            a.re[(i, j)] = 1.0;
            a.re[(j, i)] = -1.0;
            out.push((format!("A{i}{j}"), a));
            let mut s = CMat::zeros(n);
            s.im[(i, j)] = 1.0;
            s.im[(j, i)] = 1.0;
            out.push((format!("S{i}{j}"), s));
        }
    }
    if traceless {
        for k in 0..n.saturating_sub(1) {
            let mut h = CMat::zeros(n);
            h.im[(k, k)] = 1.0;
            h.im[(k + 1, k + 1)] = -1.0;
            out.push((format!("H{k}"), h));
        }
    } else {
        for k in 0..n {
            let mut h = CMat::zeros(n);
            h.im[(k, k)] = 1.0;
            out.push((format!("D{k}"), h));
        }
    }
    out
}

/// [[A, B], [−B̄, Ā]] for A in u(n), B complex symmetric.
pub fn symplectic_element(a: &CMat, b: &CMat) -> CMat {
    let n = a.re.nrows();
    let mut m = CMat::zeros(2 * n);
    m.re.view_mut((0, 0), (n, n)).copy_from(&a.re);
    m.im.view_mut((0, 0), (n, n)).copy_from(&a.im);
    m.re.view_mut((n, n), (n, n)).copy_from(&a.re);
    m.im.view_mut((n, n), (n, n)).copy_from(&(-&a.im));
    m.re.view_mut((0, n), (n, n)).copy_from(&b.re);
    m.im.view_mut((0, n), (n, n)).copy_from(&b.im);
    m.re.view_mut((n, 0), (n, n)).copy_from(&(-&b.re));
    m.im.view_mut((n, 0), (n, n)).copy_from(&b.im);
    m
}

/// Basis of sp(n) as complex 2n×2n matrices.
pub fn symplectic_basis(n: usize) -> Vec<(String, CMat)> {
    let zero = CMat::zeros(n);
    let mut out: Vec<(String, CMat)> = unitary_basis(n, false)
        .into_iter()
        .map(|(l, a)| (l, symplectic_element(&a, &zero)))
        .collect();
    for i in 0..n {
        for j in i..n {
            let mut s = CMat::zeros(n);
            s.re[(i, j)] = 1.0;
            s.re[(j, i)] = 1.0;
            out.push((format!("B{i}{j}"), symplectic_element(&zero, &s)));
            let mut t = CMat::zeros(n);
            t.im[(i, j)] = 1.0;
            t.im[(j, i)] = 1.0;
            out.push((format!("C{i}{j}"), symplectic_element(&zero, &t)));
        }
    }
    out
}

/// E_ij − E_ji in gl(n, R).
pub fn so_generator(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m[(j, i)] = -1.0;
    m
}

#[derive(Debug, Clone)]
pub struct LieAlgebraModel {
    pub name: String,
    pub dim: usize,
    pub labels: Vec<String>,
    pub basis: Vec<DMatrix<f64>>,
    /// c[(i·dim + j)·dim + k]: [e_i, e_j] = Σ_k c_ijk e_k
    bracket: Vec<f64>,
    pub killing: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
}

const MAX_DIM: usize = 200;

pub fn build_algebra(kind: AlgebraKind, n: usize) -> Result<LieAlgebraModel> {
    let (name, items): (String, Vec<(String, DMatrix<f64>)>) = match kind {
        AlgebraKind::So if n >= 3 => {
            let mut v = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    v.push((format!("E{i}{j}"), so_generator(n, i, j)));
                }
            }
            (format!("so({n})"), v)
        }
        AlgebraKind::Su if n >= 2 => (
            format!("su({n})"),
            unitary_basis(n, true)
                .into_iter()
                .map(|(l, m)| (l, m.realify()))
                .collect(),
        ),
        AlgebraKind::Sp if n >= 1 => (
            format!("sp({n})"),
            symplectic_basis(n)
                .into_iter()
                .map(|(l, m)| (l, m.realify()))
                .collect(),
        ),
        _ => {
            return Err(Error::Oracle(format!(
                "{kind:?}({n}) is below the supported range"
            )))
        }
    };
    if items.len() > MAX_DIM {
        return Err(Error::Oracle(format!(
            "{name} has dimension {} > {MAX_DIM}",
            items.len()
        )));
    }
    let (labels, basis) = items.into_iter().unzip();
    LieAlgebraModel::from_matrices(&name, labels, basis)
}

fn frob(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

impl LieAlgebraModel {
    /// Structure constants from matrix commutators, expanded through the
    /// inverse Frobenius Gram matrix. Fails when the basis is dependent or
    /// not closed under the bracket.
    pub fn from_matrices(
        name: &str,
        labels: Vec<String>,
        basis: Vec<DMatrix<f64>>,
    ) -> Result<Self> {
        let dim = basis.len();
        let gram = DMatrix::from_fn(dim, dim, |i, j| frob(&basis[i], &basis[j]));
        let ev = nalgebra::SymmetricEigen::new(gram.clone()).eigenvalues;
        if ev.min() <= 1e-12 * ev.max() {
            return Err(Error::Oracle(format!(
                "{name}: basis is linearly dependent"
            )));
        }
        let gram_inv = gram
            .cholesky()
            .ok_or_else(|| Error::Oracle(format!("{name}: basis is linearly dependent")))?
            .inverse();
        let mut model = LieAlgebraModel {
            name: name.into(),
            dim,
            labels,
            basis,
            bracket: vec![0.0; dim * dim * dim],
            killing: DMatrix::zeros(dim, dim),
            gram_inv,
        };
        let rows: Vec<Result<Vec<f64>>> = (0..dim)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![0.0; dim * dim];
                for j in 0..dim {
                    let z = &model.basis[i] * &model.basis[j] - &model.basis[j] * &model.basis[i];
                    let (c, res) = model.coords(&z);
                    if res > 1e-10 {
                        return Err(Error::Oracle(format!(
                            "{}: [{}, {}] leaves the span (residual {res:e})",
                            model.name, model.labels[i], model.labels[j]
                        )));
                    }
                    row[j * dim..(j + 1) * dim].copy_from_slice(c.as_slice());
                }
                Ok(row)
            })
            .collect();
        for (i, r) in rows.into_iter().enumerate() {
            model.bracket[i * dim * dim..(i + 1) * dim * dim].copy_from_slice(&r?);
        }
        model.killing = DMatrix::from_fn(dim, dim, |a, b| {
            let mut s = 0.0;
            for j in 0..dim {
                for k in 0..dim {
                    s += model.c(a, j, k) * model.c(b, k, j);
                }
            }
            s
        });
        Ok(model)
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.bracket[(i * self.dim + j) * self.dim + k]
    }

    /// Coordinates of a matrix in the basis and the Frobenius norm of the
    /// part outside the span.
    pub fn coords(&self, m: &DMatrix<f64>) -> (DVector<f64>, f64) {
        let rhs = DVector::from_iterator(self.dim, self.basis.iter().map(|b| frob(b, m)));
        let c = &self.gram_inv * rhs;
        let back = self.to_matrix(&c);
        (c, (m - back).norm())
    }

    pub fn to_matrix(&self, c: &DVector<f64>) -> DMatrix<f64> {
        let n = self.basis[0].nrows();
        let mut m = DMatrix::zeros(n, n);
        for (ci, b) in c.iter().zip(&self.basis) {
            m += b * *ci;
        }
        m
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        let mut w = DVector::zeros(d);
        for i in 0..d {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let s = u[i] * v[j];
                if s == 0.0 {
                    continue;
                }
                for k in 0..d {
                    w[k] += s * self.c(i, j, k);
                }
            }
        }
        w
    }

    pub fn killing_of(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * &self.killing * v)[(0, 0)]
    }

    /// tr(XY) of the matrices themselves.
    pub fn trace_form(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (self.to_matrix(u) * self.to_matrix(v)).trace()
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    worst = worst.max((self.c(i, j, k) + self.c(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// max over basis triples and outputs of |[[i,j],k] + [[j,k],i] + [[k,i],j]|
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim;
        (0..d)
            .into_par_iter()
            .map(|i| {
                let mut worst: f64 = 0.0;
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            let mut s = 0.0;
                            for m in 0..d {
                                s += self.c(i, j, m) * self.c(m, k, l)
                                    + self.c(j, k, m) * self.c(m, i, l)
                                    + self.c(k, i, m) * self.c(m, j, l);
                            }
                            worst = worst.max(s.abs());
                        }
                    }
                }
                worst
            })
            .reduce(|| 0.0, f64::max)
    }

    /// max |Kil([X,Y],Z) + Kil(Y,[X,Z])| over random triples.
    pub fn killing_invariance_residual<R: Rng>(&self, rng: &mut R, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let mut v = || DVector::from_fn(self.dim, |_, _| rng.gen_range(-1.0..1.0));
            let (x, y, z) = (v(), v(), v());
            let r = self.killing_of(&self.bracket(&x, &y), &z)
                + self.killing_of(&y, &self.bracket(&x, &z));
            worst = worst.max(r.abs());
        }
        worst
    }

    pub fn is_negative_definite(&self) -> bool {
        (-&self.killing).cholesky().is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// max |Kil(e_a, e_b) − c·tr(e_a e_b)|
    fn trace_ratio_defect(m: &LieAlgebraModel, c: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..m.dim {
            for b in 0..m.dim {
                let t = (&m.basis[a] * &m.basis[b]).trace();
                worst = worst.max((m.killing[(a, b)] - c * t).abs());
            }
        }
        worst
    }

    #[test]
    fn dimensions() {
        assert_eq!(build_algebra(AlgebraKind::So, 3).unwrap().dim, 3);
        assert_eq!(build_algebra(AlgebraKind::So, 5).unwrap().dim, 10);
        assert_eq!(build_algebra(AlgebraKind::Su, 3).unwrap().dim, 8);
        assert_eq!(build_algebra(AlgebraKind::Su, 4).unwrap().dim, 15);
        assert_eq!(build_algebra(AlgebraKind::Sp, 1).unwrap().dim, 3);
        assert_eq!(build_algebra(AlgebraKind::Sp, 2).unwrap().dim, 10);
    }

    #[test]
    fn rejects_small_and_large() {
        assert!(build_algebra(AlgebraKind::So, 2).is_err());
        assert!(build_algebra(AlgebraKind::Su, 1).is_err());
        assert!(build_algebra(AlgebraKind::Sp, 0).is_err());
        assert!(build_algebra(AlgebraKind::So, 21).is_err());
    }

    #[test]
    fn killing_trace_identities() {
        // realified traces are twice the complex real parts
        for n in 3..6 {
            let so = build_algebra(AlgebraKind::So, n).unwrap();
            assert!(trace_ratio_defect(&so, n as f64 - 2.0) < 1e-12);
        }
        for n in 2..5 {
            let su = build_algebra(AlgebraKind::Su, n).unwrap();
            assert!(trace_ratio_defect(&su, n as f64) < 1e-12, "su({n})");
        }
        for n in 1..4 {
            let sp = build_algebra(AlgebraKind::Sp, n).unwrap();
            assert!(trace_ratio_defect(&sp, n as f64 + 1.0) < 1e-12, "sp({n})");
        }
    }

    #[test]
    fn axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (k, n) in [
            (AlgebraKind::So, 5),
            (AlgebraKind::Su, 4),
            (AlgebraKind::Sp, 2),
        ] {
            let m = build_algebra(k, n).unwrap();
            assert!(m.antisymmetry_residual() < 1e-12);
            assert!(m.jacobi_residual() < 1e-12);
            assert!(m.killing_invariance_residual(&mut rng, 100) < 1e-12);
            assert!(m.is_negative_definite());
            assert!((&m.killing - m.killing.transpose()).amax() < 1e-12);
        }
    }

    #[test]
    fn dependent_basis_rejected() {
        let a = so_generator(3, 0, 1);
        let r = LieAlgebraModel::from_matrices(
            "bad",
            vec!["a".into(), "b".into()],
            vec![a.clone(), a * 2.0],
        );
        assert!(r.is_err());
    }

    #[test]
    fn non_closed_basis_rejected() {
        let r = LieAlgebraModel::from_matrices(
            "open",
            vec!["a".into(), "b".into()],
            vec![so_generator(3, 0, 1), so_generator(3, 1, 2)],
        );
        assert!(r.is_err());
    }
}
