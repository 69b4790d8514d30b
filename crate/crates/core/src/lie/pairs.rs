//! The five embedded pairs K ⊂ H used as ground truth, with a
//! (−Kil_h)-orthonormal basis adapted to h = k ⊕ q.

use super::algebra::{
    build_algebra, so_generator, symplectic_basis, symplectic_element, AlgebraKind, CMat,
    LieAlgebraModel,
};
use crate::catalog::{Catalog, SpaceSpec};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairCase {
    Su3So3,
    So5So4,
    Sp2Sp1Sp1,
    Su3T2,
    Su4Sp2,
}

impl PairCase {
    pub const ALL: [PairCase; 5] = [
        PairCase::Su3So3,
        PairCase::So5So4,
        PairCase::Sp2Sp1Sp1,
        PairCase::Su3T2,
        PairCase::Su4Sp2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PairCase::Su3So3 => "SU(3)/SO(3)",
            PairCase::So5So4 => "SO(5)/SO(4)",
            PairCase::Sp2Sp1Sp1 => "Sp(2)/Sp(1)xSp(1)",
            PairCase::Su3T2 => "SU(3)/T^2",
            PairCase::Su4Sp2 => "SU(4)/Sp(2)",
        }
    }

    pub fn parse(s: &str) -> Option<PairCase> {
        let key = crate::catalog::name_key(s);
        PairCase::ALL.into_iter().find(|c| {
            crate::catalog::name_key(c.name()) == key || format!("{c:?}").to_lowercase() == key
        })
    }

    /// Catalog row describing the same space (SO(5)/SO(4) is Sp(2)/Sp(1)²).
    pub fn catalog_row(self) -> (&'static str, i64) {
        match self {
            PairCase::Su3So3 => ("SU(m)/SO(m)", 3),
            PairCase::So5So4 | PairCase::Sp2Sp1Sp1 => ("Sp(2m)/Sp(m)xSp(m)", 1),
            PairCase::Su3T2 => ("SU(m)/T^(m-1)", 3),
            PairCase::Su4Sp2 => ("SU(2m)/Sp(m)", 2),
        }
    }

    pub fn spec(self, catalog: &Catalog) -> Result<SpaceSpec> {
        let (id, m) = self.catalog_row();
        catalog.resolve(id, &[("m".into(), m)])
    }

    pub fn is_symmetric(self) -> bool {
        self != PairCase::Su3T2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectedBlock {
    pub a: f64,
    pub dim: usize,
}

#[derive(Debug, Clone)]
pub struct EmbeddedPair {
    pub case: PairCase,
    pub h: LieAlgebraModel,
    /// (−Kil_h)-orthonormal, in h coordinates, grouped by ideal
    pub k_basis: Vec<DVector<f64>>,
    pub ideal_of: Vec<usize>,
    /// (−Kil_h)-orthonormal complement of k
    pub q_basis: Vec<DVector<f64>>,
    pub a_blocks: Vec<DetectedBlock>,
    /// structure constants in the basis k_basis ++ q_basis; orthonormal, so
    /// c_abc = Q([f_a, f_b], f_c)
    ortho: Vec<f64>,
}

const PIVOT: f64 = 1e-12;

fn real_diag(n: usize, entries: &[(usize, f64)]) -> CMat {
    let mut m = CMat::zeros(n);
    for &(k, v) in entries {
        m.im[(k, k)] = v;
    }
    m
}

/// Generating matrices of each ideal of k, inside the realization of h.
fn case_data(case: PairCase) -> Result<(LieAlgebraModel, Vec<Vec<DMatrix<f64>>>)> {
    Ok(match case {
        PairCase::Su3So3 => {
            let h = build_algebra(AlgebraKind::Su, 3)?;
            let k = [(0, 1), (0, 2), (1, 2)]
                .iter()
                .map(|&(i, j)| {
                    CMat {
                        re: so_generator(3, i, j),
                        im: DMatrix::zeros(3, 3),
                    }
                    .realify()
                })
                .collect();
            (h, vec![k])
        }
        PairCase::So5So4 => {
            let h = build_algebra(AlgebraKind::So, 5)?;
            let e = |i, j| so_generator(5, i, j);
            let sd = vec![e(0, 1) + e(2, 3), e(0, 2) - e(1, 3), e(0, 3) + e(1, 2)];
            let asd = vec![e(0, 1) - e(2, 3), e(0, 2) + e(1, 3), e(0, 3) - e(1, 2)];
            (h, vec![sd, asd])
        }
        PairCase::Sp2Sp1Sp1 => {
            let h = build_algebra(AlgebraKind::Sp, 2)?;
            let zero = CMat::zeros(2);
            let ideal = |l: usize| {
                let a = real_diag(2, &[(l, 1.0)]);
                let mut b = CMat::zeros(2);
                b.re[(l, l)] = 1.0;
                let mut c = CMat::zeros(2);
                c.im[(l, l)] = 1.0;
                vec![
                    symplectic_element(&a, &zero).realify(),
                    symplectic_element(&zero, &b).realify(),
                    symplectic_element(&zero, &c).realify(),
                ]
            };
            (h, vec![ideal(0), ideal(1)])
        }
        PairCase::Su3T2 => {
            let h = build_algebra(AlgebraKind::Su, 3)?;
            let t = vec![
                real_diag(3, &[(0, 1.0), (1, -1.0)]).realify(),
                real_diag(3, &[(1, 1.0), (2, -1.0)]).realify(),
            ];
            (h, vec![t])
        }
        PairCase::Su4Sp2 => {
            let h = build_algebra(AlgebraKind::Su, 4)?;
            let k = symplectic_basis(2)
                .into_iter()
                .map(|(_, m)| m.realify())
                .collect();
            (h, vec![k])
        }
    })
}

/// Modified Gram–Schmidt under the inner product `q`, against `against`
/// (already orthonormal) and the accepted vectors. Returns None below pivot.
fn orthonormalize(
    v: &DVector<f64>,
    q: &DMatrix<f64>,
    against: &[DVector<f64>],
) -> Option<DVector<f64>> {
    let mut w = v.clone();
    for _ in 0..2 {
        for u in against {
            let p = (u.transpose() * q * &w)[(0, 0)];
            w -= u * p;
        }
    }
    let norm2 = (w.transpose() * q * &w)[(0, 0)];
    let scale = (v.transpose() * q * v)[(0, 0)].max(1.0);
    (norm2 > PIVOT * scale).then(|| w / norm2.sqrt())
}

pub fn embed_pair(case: PairCase) -> Result<EmbeddedPair> {
    let (h, ideals) = case_data(case)?;
    let q = -&h.killing;
    let mut k_basis: Vec<DVector<f64>> = Vec::new();
    let mut ideal_of = Vec::new();
    for (l, gens) in ideals.iter().enumerate() {
        for g in gens {
            let (c, res) = h.coords(g);
            if res > 1e-10 {
                return Err(Error::Oracle(format!(
                    "{}: subalgebra generator outside h",
                    case.name()
                )));
            }
            let v = orthonormalize(&c, &q, &k_basis).ok_or_else(|| {
                Error::Oracle(format!("{}: dependent subalgebra generators", case.name()))
            })?;
            k_basis.push(v);
            ideal_of.push(l);
        }
    }
    let mut q_basis: Vec<DVector<f64>> = Vec::new();
    for i in 0..h.dim {
        if k_basis.len() + q_basis.len() == h.dim {
            break;
        }
        let mut all = k_basis.clone();
        all.extend(q_basis.iter().cloned());
        if let Some(v) = orthonormalize(
            &DVector::from_fn(h.dim, |r, _| if r == i { 1.0 } else { 0.0 }),
            &q,
            &all,
        ) {
            q_basis.push(v);
        }
    }
    if k_basis.len() + q_basis.len() != h.dim {
        return Err(Error::Oracle(format!(
            "{}: complement has the wrong dimension",
            case.name()
        )));
    }
    let f: Vec<&DVector<f64>> = k_basis.iter().chain(&q_basis).collect();
    let dim = h.dim;
    let qf: Vec<DVector<f64>> = f.iter().map(|v| &q * *v).collect();
    let mut ortho = vec![0.0; dim * dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            let w = h.bracket(f[a], f[b]);
            for c in 0..dim {
                ortho[(a * dim + b) * dim + c] = w.dot(&qf[c]);
            }
        }
    }
    let mut pair = EmbeddedPair {
        case,
        h,
        k_basis,
        ideal_of,
        q_basis,
        a_blocks: Vec::new(),
        ortho,
    };
    pair.check_subalgebra()?;
    pair.a_blocks = pair.detect_ratios()?;
    Ok(pair)
}

impl EmbeddedPair {
    pub fn d(&self) -> usize {
        self.k_basis.len()
    }

    pub fn n(&self) -> usize {
        self.q_basis.len()
    }

    /// Structure constants in the adapted orthonormal basis (k first, then q).
    #[inline]
    pub fn c(&self, a: usize, b: usize, c: usize) -> f64 {
        let d = self.h.dim;
        self.ortho[(a * d + b) * d + c]
    }

    pub fn ideal_count(&self) -> usize {
        self.ideal_of.iter().max().map_or(0, |m| m + 1)
    }

    fn check_subalgebra(&self) -> Result<()> {
        let d = self.d();
        let dim = self.h.dim;
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for c in d..dim {
                    worst = worst.max(self.c(a, b, c).abs());
                }
                // distinct ideals commute
                if self.ideal_of[a] != self.ideal_of[b] {
                    for c in 0..dim {
                        worst = worst.max(self.c(a, b, c).abs());
                    }
                }
            }
        }
        if worst > 1e-10 {
            return Err(Error::Oracle(format!(
                "{}: [k,k] not in k or ideals do not commute ({worst:e})",
                self.case.name()
            )));
        }
        Ok(())
    }

    /// Kil_{k_l} = a_l Kil_h on each ideal, read off the ad-traces inside the
    /// ideal; fails when the form is not a multiple of Kil_h there.
    fn detect_ratios(&self) -> Result<Vec<DetectedBlock>> {
        let mut out = Vec::new();
        for l in 0..self.ideal_count() {
            let idx: Vec<usize> = (0..self.d()).filter(|&i| self.ideal_of[i] == l).collect();
            let kil = |a: usize, b: usize| {
                let mut s = 0.0;
                for &c in &idx {
                    for &e in &idx {
                        s += self.c(a, c, e) * self.c(b, e, c);
                    }
                }
                s
            };
            let a = -kil(idx[0], idx[0]);
            for &i in &idx {
                for &j in &idx {
                    let expect = if i == j { -a } else { 0.0 };
                    if (kil(i, j) - expect).abs() > 1e-10 {
                        return Err(Error::Oracle(format!(
                            "{}: Killing form of ideal {l} is not a multiple of Kil_h",
                            self.case.name()
                        )));
                    }
                }
            }
            out.push(DetectedBlock { a, dim: idx.len() });
        }
        Ok(out)
    }

    /// −Σ_i (ad Z_i|_q)² over the orthonormal basis of k.
    pub fn casimir_isotropy(&self) -> DMatrix<f64> {
        let (d, n) = (self.d(), self.n());
        let mut cas = DMatrix::zeros(n, n);
        for z in 0..d {
            let ad = DMatrix::from_fn(n, n, |c, b| self.c(z, d + b, d + c));
            cas -= &ad * &ad;
        }
        cas
    }

    /// Σ_{α,β} Q([X,e_α],Z_β) Q([Y,e_α],Z_β) − ½ Q(X,Y) over q, max entry.
    pub fn casimir_identity_defect(&self) -> f64 {
        let (d, n) = (self.d(), self.n());
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                let mut s = 0.0;
                for al in 0..n {
                    for be in 0..d {
                        s += self.c(d + x, d + al, be) * self.c(d + y, d + al, be);
                    }
                }
                let expect = if x == y { 0.5 } else { 0.0 };
                worst = worst.max((s - expect).abs());
            }
        }
        worst
    }

    /// −tr((ad Z|_q)²) − (1 − a_l) Q(Z,Z) over the basis of each ideal.
    pub fn ideal_trace_defect(&self) -> f64 {
        let (d, n) = (self.d(), self.n());
        let mut worst: f64 = 0.0;
        for z in 0..d {
            let ad = DMatrix::from_fn(n, n, |c, b| self.c(z, d + b, d + c));
            let t = -(&ad * &ad).trace();
            let a = self.a_blocks[self.ideal_of[z]].a;
            worst = worst.max((t - (1.0 - a)).abs());
        }
        worst
    }

    /// κ = Σ (1−a_l) d_l / n from the detected ratios.
    pub fn detected_kappa(&self) -> f64 {
        self.a_blocks
            .iter()
            .map(|b| (1.0 - b.a) * b.dim as f64)
            .sum::<f64>()
            / self.n() as f64
    }

    /// Detected ratios against the catalog blocks: max |a| deviation, with
    /// equal ratios merged, or an error when the block structure differs.
    pub fn ratio_deviation(&self, spec: &SpaceSpec) -> Result<f64> {
        let mut merged: Vec<(f64, usize)> = Vec::new();
        for b in &self.a_blocks {
            match merged.iter_mut().find(|(a, _)| (a - b.a).abs() < 1e-9) {
                Some(m) => m.1 += b.dim,
                None => merged.push((b.a, b.dim)),
            }
        }
        if merged.len() != spec.killing_ratios.len() {
            return Err(Error::Oracle(format!(
                "{}: {} detected blocks against {} in the catalog",
                self.case.name(),
                merged.len(),
                spec.killing_ratios.len()
            )));
        }
        let mut worst: f64 = 0.0;
        for (a, dim) in merged {
            let m = spec
                .killing_ratios
                .iter()
                .map(|b| {
                    (crate::numeric::ratio_to_f64(&b.a) - a).abs()
                        + if b.dim as usize == dim {
                            0.0
                        } else {
                            f64::INFINITY
                        }
                })
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(m);
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(c: PairCase) -> EmbeddedPair {
        embed_pair(c).unwrap()
    }

    #[test]
    fn detected_ratios() {
        let cases = [
            (PairCase::Su3So3, 1.0 / 6.0),
            (PairCase::So5So4, 2.0 / 3.0),
            (PairCase::Sp2Sp1Sp1, 2.0 / 3.0),
            (PairCase::Su4Sp2, 3.0 / 4.0),
            (PairCase::Su3T2, 0.0),
        ];
        for (c, a) in cases {
            let p = pair(c);
            for b in &p.a_blocks {
                assert!((b.a - a).abs() < 1e-12, "{:?}: {}", c, b.a);
            }
            let spec = c.spec(&Catalog::builtin()).unwrap();
            assert!(p.ratio_deviation(&spec).unwrap() < 1e-12);
            assert_eq!(p.n() as i64, spec.n);
            assert_eq!(p.d() as i64, spec.d);
        }
    }

    #[test]
    fn casimir_is_kappa() {
        for c in PairCase::ALL {
            let p = pair(c);
            let spec = c.spec(&Catalog::builtin()).unwrap();
            let k = spec.kappa_f64();
            let cas = p.casimir_isotropy();
            let dev = (&cas - DMatrix::identity(p.n(), p.n()) * k).amax();
            assert!(dev < 1e-10, "{c:?}: {dev}");
            let tr: f64 = p.a_blocks.iter().map(|b| (1.0 - b.a) * b.dim as f64).sum();
            assert!((cas.trace() - tr).abs() < 1e-10);
            assert!((p.detected_kappa() - k).abs() < 1e-12);
            assert!(p.ideal_trace_defect() < 1e-10);
        }
    }

    #[test]
    fn su3so3_casimir_half_and_torus_third() {
        let cas = pair(PairCase::Su3So3).casimir_isotropy();
        assert!((cas - DMatrix::identity(5, 5) * 0.5).amax() < 1e-12);
        let cas = pair(PairCase::Su3T2).casimir_isotropy();
        assert!((cas - DMatrix::identity(6, 6) / 3.0).amax() < 1e-12);
    }

    #[test]
    fn symmetric_casimir_identity() {
        for c in PairCase::ALL.into_iter().filter(|c| c.is_symmetric()) {
            assert!(pair(c).casimir_identity_defect() < 1e-10, "{c:?}");
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!(PairCase::parse("SU(3)/SO(3)"), Some(PairCase::Su3So3));
        assert_eq!(PairCase::parse("su4sp2"), Some(PairCase::Su4Sp2));
        assert_eq!(PairCase::parse("SU(5)/SO(5)"), None);
    }
}
