//! g = h ⊕ h with p1 = (q,0), p2 = (0,q), p3 = {(Z,−Z)}, Δk = {(Z,Z)}.

use super::pairs::EmbeddedPair;
use crate::diagonal::StructuralConstants;
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Range;

#[derive(Debug, Clone)]
pub struct DoubledSpace {
    pub n: usize,
    pub d: usize,
    /// ideal of k each p3 (and Δk) vector belongs to
    pub p3_ideal: Vec<usize>,
    pub ideal_a: Vec<f64>,
    /// B[a][b][c] = Q([e_a, e_b], e_c) over p1, p2, p3, Δk in that order
    b: Vec<f64>,
    dim_g: usize,
}

/// A basis vector of h ⊕ h as one (index, coefficient) per factor.
#[derive(Clone, Copy)]
struct Sparse {
    left: Option<(usize, f64)>,
    right: Option<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketRelations {
    pub p1_p2: f64,
    pub dk_p1: f64,
    pub dk_p2: f64,
    pub dk_p3: f64,
    pub p3_p3: f64,
    pub dk_dk: f64,
}

impl BracketRelations {
    pub fn max(&self) -> f64 {
        [
            self.p1_p2, self.dk_p1, self.dk_p2, self.dk_p3, self.p3_p3, self.dk_dk,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl DoubledSpace {
    pub fn new(pair: &EmbeddedPair) -> Self {
        let (n, d) = (pair.n(), pair.d());
        let s = FRAC_1_SQRT_2;
        let mut basis = Vec::new();
        for i in 0..n {
            basis.push(Sparse {
                left: Some((d + i, 1.0)),
                right: None,
            });
        }
        for i in 0..n {
            basis.push(Sparse {
                left: None,
                right: Some((d + i, 1.0)),
            });
        }
        for z in 0..d {
            basis.push(Sparse {
                left: Some((z, s)),
                right: Some((z, -s)),
            });
        }
        for z in 0..d {
            basis.push(Sparse {
                left: Some((z, s)),
                right: Some((z, s)),
            });
        }
        let dim_g = basis.len();
        let term =
            |x: Option<(usize, f64)>, y: Option<(usize, f64)>, z: Option<(usize, f64)>| match (
                x, y, z,
            ) {
                (Some((i, a)), Some((j, b)), Some((k, c))) => a * b * c * pair.c(i, j, k),
                _ => 0.0,
            };
        let mut b = vec![0.0; dim_g * dim_g * dim_g];
        for (x, ex) in basis.iter().enumerate() {
            for (y, ey) in basis.iter().enumerate() {
                for (z, ez) in basis.iter().enumerate() {
                    b[(x * dim_g + y) * dim_g + z] =
                        term(ex.left, ey.left, ez.left) + term(ex.right, ey.right, ez.right);
                }
            }
        }
        DoubledSpace {
            n,
            d,
            p3_ideal: pair.ideal_of.clone(),
            ideal_a: pair.a_blocks.iter().map(|b| b.a).collect(),
            b,
            dim_g,
        }
    }

    #[inline]
    pub fn b(&self, x: usize, y: usize, z: usize) -> f64 {
        self.b[(x * self.dim_g + y) * self.dim_g + z]
    }

    pub fn dim_p(&self) -> usize {
        2 * self.n + self.d
    }

    pub fn p1(&self) -> Range<usize> {
        0..self.n
    }

    pub fn p2(&self) -> Range<usize> {
        self.n..2 * self.n
    }

    pub fn p3(&self) -> Range<usize> {
        2 * self.n..2 * self.n + self.d
    }

    pub fn delta_k(&self) -> Range<usize> {
        self.dim_p()..self.dim_g
    }

    /// Largest component of [A, B] outside `target`, for A in `a`, B in `b`.
    fn leak(&self, a: Range<usize>, b: Range<usize>, target: &[Range<usize>]) -> f64 {
        let mut worst: f64 = 0.0;
        for x in a {
            for y in b.clone() {
                for z in 0..self.dim_g {
                    if !target.iter().any(|t| t.contains(&z)) {
                        worst = worst.max(self.b(x, y, z).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn bracket_relations(&self) -> BracketRelations {
        BracketRelations {
            p1_p2: self.leak(self.p1(), self.p2(), &[]),
            dk_p1: self.leak(self.delta_k(), self.p1(), &[self.p1()]),
            dk_p2: self.leak(self.delta_k(), self.p2(), &[self.p2()]),
            dk_p3: self.leak(self.delta_k(), self.p3(), &[self.p3()]),
            p3_p3: self.leak(self.p3(), self.p3(), &[self.delta_k()]),
            dk_dk: self.leak(self.delta_k(), self.delta_k(), &[self.delta_k()]),
        }
    }

    /// Index ranges of p1, p2 and p3 (split by ideal of k when `split`).
    pub fn blocks(&self, split: bool) -> (Vec<String>, Vec<Vec<usize>>) {
        let mut labels = vec!["p1".to_string(), "p2".to_string()];
        let mut idx = vec![self.p1().collect::<Vec<_>>(), self.p2().collect()];
        let ideals = self.ideal_a.len();
        if split && ideals > 1 {
            for l in 0..ideals {
                labels.push(format!("p3_{l}"));
                idx.push(
                    self.p3()
                        .filter(|&u| self.p3_ideal[u - 2 * self.n] == l)
                        .collect(),
                );
            }
        } else {
            labels.push("p3".into());
            idx.push(self.p3().collect());
        }
        (labels, idx)
    }

    /// [ijk] = Σ Q([e_α^i, e_β^j], e_γ^k)² over the blocks.
    pub fn structural_constants(&self, split: bool) -> StructuralConstants<f64> {
        let (labels, idx) = self.blocks(split);
        let dims = idx.iter().map(|v| v.len() as i64).collect();
        let mut sc = StructuralConstants::zeros(labels, dims);
        for i in 0..idx.len() {
            for j in 0..idx.len() {
                for k in 0..idx.len() {
                    let mut s = 0.0;
                    for &x in &idx[i] {
                        for &y in &idx[j] {
                            for &z in &idx[k] {
                                s += self.b(x, y, z).powi(2);
                            }
                        }
                    }
                    sc.set_raw(i, j, k, s);
                }
            }
        }
        sc
    }
}
