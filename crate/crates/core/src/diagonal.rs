//! Ricci and scalar curvature of diagonal metrics (x1, x2, x3) on
//! H×H/ΔK, structural constants, and the normal-metric subfamily.

use crate::catalog::SpaceSpec;
use crate::error::{Error, Result};
use crate::numeric::{int, ratio_to_f64, Rational, Scalar};
use num_traits::One;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalMetric<T = f64> {
    pub x1: T,
    pub x2: T,
    pub x3: T,
}

impl<T: Scalar> DiagonalMetric<T> {
    pub fn new(x1: T, x2: T, x3: T) -> Result<Self> {
        let z = T::zero();
        if x1 <= z || x2 <= z || x3 <= z {
            return Err(Error::InvalidMetric(format!(
                "diagonal coefficients must be positive: ({:?}, {:?}, {:?})",
                x1, x2, x3
            )));
        }
        Ok(DiagonalMetric { x1, x2, x3 })
    }

    pub fn swapped(&self) -> Self {
        DiagonalMetric {
            x1: self.x2.clone(),
            x2: self.x1.clone(),
            x3: self.x3.clone(),
        }
    }
}

impl DiagonalMetric<f64> {
    pub fn array(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn from_array(x: [f64; 3]) -> Result<Self> {
        Self::new(x[0], x[1], x[2])
    }
}

/// Ricci operator eigenvalues: r1 on p1, r2 on p2, one value per ideal of k on p3.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RicciEigenvalues<T = f64> {
    pub r1: T,
    pub r2: T,
    pub r3: Vec<T>,
}

impl<T: Scalar> RicciEigenvalues<T> {
    /// Eigenvalues block by block, in the order of `SpaceSpec::block_dims`.
    pub fn blocks(&self) -> Vec<T> {
        let mut v = vec![self.r1.clone(), self.r2.clone()];
        v.extend(self.r3.iter().cloned());
        v
    }
}

pub fn ricci_diagonal<T: Scalar>(spec: &SpaceSpec, g: &DiagonalMetric<T>) -> RicciEigenvalues<T> {
    let k = T::from_rational(&spec.kappa);
    let one = T::one();
    let two = T::from_int(2);
    let four = T::from_int(4);
    let eight = T::from_int(8);
    let (x1, x2, x3) = (g.x1.clone(), g.x2.clone(), g.x3.clone());
    let side = |x: &T| {
        (one.clone() / (two.clone() * x.clone()))
            * (one.clone() - x3.clone() / (two.clone() * x.clone()))
            * k.clone()
            + one.clone() / (four.clone() * x.clone())
    };
    let w = x3.clone() / eight
        * (one.clone() / (x1.clone() * x1.clone()) + one.clone() / (x2.clone() * x2.clone()));
    let r3 = spec
        .killing_ratios
        .iter()
        .map(|b| {
            let a = T::from_rational(&b.a);
            a * (one.clone() / (two.clone() * x3.clone()) - w.clone()) + w.clone()
        })
        .collect();
    RicciEigenvalues {
        r1: side(&x1),
        r2: side(&x2),
        r3,
    }
}

/// Scalar curvature: block-dimension weighted trace of the Ricci operator.
pub fn scalar_diagonal<T: Scalar>(spec: &SpaceSpec, g: &DiagonalMetric<T>) -> T {
    let r = ricci_diagonal(spec, g);
    spec.block_dims()
        .iter()
        .zip(r.blocks())
        .fold(T::zero(), |acc, (d, r)| acc + T::from_int(*d) * r)
}

/// Scalar curvature times det^{1/dim}, a homothety invariant.
pub fn scal_n_diagonal(spec: &SpaceSpec, g: &DiagonalMetric) -> f64 {
    scalar_diagonal(spec, g) * volume_scale(spec, g)
}

/// (x1^n x2^n x3^d)^{1/(2n+d)}.
pub fn volume_scale(spec: &SpaceSpec, g: &DiagonalMetric) -> f64 {
    let (n, d) = (spec.n as f64, spec.d as f64);
    ((n * (g.x1.ln() + g.x2.ln()) + d * g.x3.ln()) / (2.0 * n + d)).exp()
}

/// Relative spread of Ricci eigenvalues: max |λ_k − λ̄| / |λ̄| with λ̄ the
/// block-dimension weighted mean. Zero exactly at Einstein metrics and
/// invariant under scaling of the metric.
pub fn einstein_residual(eigs: &[f64], dims: &[i64]) -> f64 {
    let total: f64 = dims.iter().map(|&d| d as f64).sum();
    let mean = eigs
        .iter()
        .zip(dims)
        .map(|(r, &d)| r * d as f64)
        .sum::<f64>()
        / total;
    eigs.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max) / mean.abs()
}

pub fn diagonal_residual(spec: &SpaceSpec, g: &DiagonalMetric) -> f64 {
    einstein_residual(&ricci_diagonal(spec, g).blocks(), &spec.block_dims())
}

/// Fully symmetric tensor [ijk] over labeled blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralConstants<T = f64> {
    pub labels: Vec<String>,
    pub dims: Vec<i64>,
    c: Vec<T>,
}

impl<T: Scalar> StructuralConstants<T> {
    pub fn zeros(labels: Vec<String>, dims: Vec<i64>) -> Self {
        let r = dims.len();
        StructuralConstants {
            labels,
            dims,
            c: vec![T::zero(); r * r * r],
        }
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        let r = self.len();
        self.c[(i * r + j) * r + k].clone()
    }

    /// Set one value and all of its permutations.
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: T) {
        let r = self.len();
        for (a, b, c) in [
            (i, j, k),
            (i, k, j),
            (j, i, k),
            (j, k, i),
            (k, i, j),
            (k, j, i),
        ] {
            self.c[(a * r + b) * r + c] = v.clone();
        }
    }

    /// Raw setter for brute-force fills; symmetry is checked separately.
    pub fn set_raw(&mut self, i: usize, j: usize, k: usize, v: T) {
        let r = self.len();
        self.c[(i * r + j) * r + k] = v;
    }

    pub fn max_asymmetry(&self) -> f64 {
        let r = self.len();
        let mut worst = 0.0f64;
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let v = self.get(i, j, k).to_f64();
                    for w in [self.get(j, i, k), self.get(i, k, j), self.get(k, j, i)] {
                        worst = worst.max((v - w.to_f64()).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn to_f64(&self) -> StructuralConstants<f64> {
        StructuralConstants {
            labels: self.labels.clone(),
            dims: self.dims.clone(),
            c: self.c.iter().map(|v| v.to_f64()).collect(),
        }
    }
}

/// Closed-form [ijk] over (p1, p2, p3): [111] = [222] = (1−2κ)n and
/// [113] = [223] = κn/2, everything else zero.
pub fn structural_constants_closed<T: Scalar>(spec: &SpaceSpec) -> Result<StructuralConstants<T>> {
    spec.require_uniform()?;
    let n = int(spec.n);
    let k = spec.kappa;
    let mut sc = StructuralConstants::zeros(
        vec!["p1".into(), "p2".into(), "p3".into()],
        vec![spec.n, spec.n, spec.d],
    );
    let s111 = T::from_rational(&((Rational::one() - int(2) * k) * n));
    let s113 = T::from_rational(&(k * n / int(2)));
    sc.set(0, 0, 0, s111.clone());
    sc.set(1, 1, 1, s111);
    sc.set(0, 0, 2, s113.clone());
    sc.set(1, 1, 2, s113);
    Ok(sc)
}

/// Ricci eigenvalues from structural constants, blocks measured against −Kil_g:
/// r_k = 1/(2x_k) − 1/(4n_k) Σ_{ij} [ijk] (x_i/(x_j x_k) + x_j/(x_i x_k) − x_k/(x_i x_j)).
pub fn ricci_from_structural<T: Scalar>(xs: &[T], sc: &StructuralConstants<T>) -> Result<Vec<T>> {
    let r = sc.len();
    if xs.len() != r {
        return Err(Error::DimensionMismatch(format!(
            "{} metric blocks against {} structural-constant blocks",
            xs.len(),
            r
        )));
    }
    let two = T::from_int(2);
    let four = T::from_int(4);
    Ok((0..r)
        .map(|k| {
            let xk = xs[k].clone();
            let mut acc = T::zero();
            for i in 0..r {
                for j in 0..r {
                    let c = sc.get(i, j, k);
                    if c == T::zero() {
                        continue;
                    }
                    let (xi, xj) = (xs[i].clone(), xs[j].clone());
                    acc = acc
                        + c * (xi.clone() / (xj.clone() * xk.clone())
                            + xj.clone() / (xi.clone() * xk.clone())
                            - xk.clone() / (xi * xj));
                }
            }
            T::one() / (two.clone() * xk) - acc / (four.clone() * T::from_int(sc.dims[k]))
        })
        .collect())
}

pub fn ricci_from_structural_diag<T: Scalar>(
    g: &DiagonalMetric<T>,
    sc: &StructuralConstants<T>,
) -> Result<RicciEigenvalues<T>> {
    let v = ricci_from_structural(&[g.x1.clone(), g.x2.clone(), g.x3.clone()], sc)?;
    Ok(RicciEigenvalues {
        r1: v[0].clone(),
        r2: v[1].clone(),
        r3: vec![v[2].clone()],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalMetric<T = f64> {
    pub z1: T,
    pub z2: T,
}

impl<T: Scalar> NormalMetric<T> {
    pub fn new(z1: T, z2: T) -> Result<Self> {
        if z1 <= T::zero() || z2 <= T::zero() {
            return Err(Error::InvalidMetric(format!(
                "normal metric needs z1, z2 > 0: ({z1:?}, {z2:?})"
            )));
        }
        Ok(NormalMetric { z1, z2 })
    }
}

/// The diagonal coordinates of z1(−Kil) ⊕ z2(−Kil) relative to `scale`.
pub fn normal_to_diagonal<T: Scalar>(
    nm: &NormalMetric<T>,
    scale: &DiagonalMetric<T>,
) -> DiagonalMetric<T> {
    let (z1, z2) = (nm.z1.clone(), nm.z2.clone());
    DiagonalMetric {
        x1: z1.clone() * scale.x1.clone(),
        x2: z2.clone() * scale.x2.clone(),
        x3: T::from_int(2) * z1.clone() * z2.clone() * scale.x3.clone() / (z1 + z2),
    }
}

pub fn scalar_normal<T: Scalar>(spec: &SpaceSpec, nm: &NormalMetric<T>) -> T {
    let s = T::from_rational(&spec.s_sum());
    let n = T::from_int(spec.n);
    let d = T::from_int(spec.d);
    let two = T::from_int(2);
    let (z1, z2) = (nm.z1.clone(), nm.z2.clone());
    let num = (d.clone() + n.clone()) * z1.clone() * z1.clone()
        + two.clone() * (two * d.clone() + n.clone() - s) * z1.clone() * z2.clone()
        + (d + n) * z2.clone() * z2.clone();
    num / (T::from_int(4) * z1.clone() * z2.clone() * (z1 + z2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalProfile {
    pub f: f64,
    pub fpp1: f64,
}

/// f(z) = scal_N of the normal metric (z, 1/z), and its closed-form f''(1).
pub fn normal_profile(spec: &SpaceSpec, z: f64) -> NormalProfile {
    let (n, d) = (spec.n as f64, spec.d as f64);
    let s = ratio_to_f64(&spec.s_sum());
    let z2 = z * z;
    let base =
        ((d + n) * z2 * z2 + 2.0 * (2.0 * d + n - s) * z2 + (d + n)) / (4.0 * z * (z2 + 1.0));
    let f = base * (2.0 * z / (z2 + 1.0)).powf(d / (2.0 * n + d));
    NormalProfile {
        f,
        fpp1: normal_fpp1(spec).to_f64(),
    }
}

/// f''(1) = −(d+n)(d−2n−S)/(4n+2d), exactly.
pub fn normal_fpp1(spec: &SpaceSpec) -> Rational {
    let (n, d) = (int(spec.n), int(spec.d));
    -(d + n) * (d - int(2) * n - spec.s_sum()) / (int(4) * n + int(2) * d)
}

/// Figure-style grid: (x1, x2, scal_N) on a log-spaced square, x3 fixed by unit volume.
pub fn surface_grid(spec: &SpaceSpec, points: usize, lo: f64, hi: f64) -> Result<Vec<[f64; 3]>> {
    if points < 2 || !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidMetric(format!(
            "grid needs >= 2 points on 0 < lo < hi, got {points} on [{lo}, {hi}]"
        )));
    }
    let ax = log_axis(points, lo, hi);
    let mut out = Vec::with_capacity(points * points);
    for &x1 in &ax {
        for &x2 in &ax {
            let g = unit_volume(spec, x1, x2);
            out.push([x1, x2, scal_n_diagonal(spec, &g)]);
        }
    }
    Ok(out)
}

pub fn log_axis(points: usize, lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// (x1, x2, x3) with x3 chosen so that x1^n x2^n x3^d = 1.
pub fn unit_volume(spec: &SpaceSpec, x1: f64, x2: f64) -> DiagonalMetric {
    let x3 = (-(spec.n as f64) / spec.d as f64 * (x1 * x2).ln()).exp();
    DiagonalMetric { x1, x2, x3 }
}

/// Critical points of x ↦ scal_N(x, x, 1), located by sign changes of a
/// centered difference on a log grid and refined by bisection.
pub fn slice_critical_points(spec: &SpaceSpec, samples: usize) -> Vec<f64> {
    let deriv = |x: f64| {
        let h = 1e-6 * x;
        let f = |t: f64| {
            scal_n_diagonal(
                spec,
                &DiagonalMetric {
                    x1: t,
                    x2: t,
                    x3: 1.0,
                },
            )
        };
        (f(x + h) - f(x - h)) / (2.0 * h)
    };
    let ax = log_axis(samples.max(3), 1e-3, 1e3);
    let mut out = Vec::new();
    let mut prev = (ax[0], deriv(ax[0]));
    for &x in &ax[1..] {
        let dx = deriv(x);
        if prev.1.signum() != dx.signum() {
            let (mut a, mut b, fa) = (prev.0, x, prev.1);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if deriv(m).signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        prev = (x, dx);
    }
    out
}

/// The normal metric (1,1) expressed in exact arithmetic; handy for identities.
pub fn standard_metric<T: Scalar>() -> DiagonalMetric<T> {
    DiagonalMetric {
        x1: T::one(),
        x2: T::one(),
        x3: T::one(),
    }
}

/// Trace identity of the closed-form constants: [111] + 2[113] = n(1 − κ).
pub fn trace_identity(spec: &SpaceSpec) -> Result<(Rational, Rational)> {
    let sc = structural_constants_closed::<Rational>(spec)?;
    Ok((
        sc.get(0, 0, 0) + int(2) * sc.get(0, 0, 2),
        int(spec.n) * (Rational::one() - spec.kappa),
    ))
}
