//! Metrics (x1, x2, x3, x4) with an off-diagonal p1–p2 term, for H/K an
//! irreducible symmetric space, and their Einstein classification.

use crate::catalog::{Catalog, KillingBlock, SpaceSpec};
use crate::diagonal::einstein_residual;
use crate::einstein::{diagonal_solution, solve_diagonal, EinsteinSolution, Label};
use crate::error::{Error, Result};
use crate::numeric::{rat, ratio_to_f64, Rational};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FullMetric {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

impl FullMetric {
    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Result<Self> {
        if !(x1 > 0.0 && x2 > 0.0 && x3 > 0.0) || x1 * x2 - x4 * x4 <= 0.0 {
            return Err(Error::InvalidMetric(format!(
                "need x1, x2, x3 > 0 and x1 x2 > x4^2: ({x1}, {x2}, {x3}, {x4})"
            )));
        }
        Ok(FullMetric { x1, x2, x3, x4 })
    }

    pub fn det12(&self) -> f64 {
        self.x1 * self.x2 - self.x4 * self.x4
    }

    pub fn swapped(&self) -> Self {
        FullMetric {
            x1: self.x2,
            x2: self.x1,
            ..*self
        }
    }
}

/// Ricci tensor over the metric, block by block: Ric(e,e) = r·g(e,e) on p1,
/// p2, p3^l and Ric = r12·g on the p1–p2 pairing. `big_r` is the auxiliary R
/// at the metric rescaled to x3 = 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RicciComponents {
    pub r1: f64,
    pub r2: f64,
    pub r12: f64,
    pub r3: Vec<f64>,
    pub big_r: f64,
}

fn big_r(x1: f64, x2: f64, x4: f64) -> f64 {
    let dd = x1 * x2 - x4 * x4;
    let (x1s, x4s) = (x1 * x1, x4 * x4);
    -2.0 * x4s / dd
        + 1.0 / (4.0 * x1s)
        + (x1s - x4s).powi(2) / (4.0 * x1s * dd * dd)
        + x4s / (2.0 * x1s * dd)
}

pub fn ricci_full(spec: &SpaceSpec, g: &FullMetric) -> Result<RicciComponents> {
    if !spec.flags.symmetric {
        return Err(spec.unsupported("the 4-parameter Ricci formula needs a symmetric pair"));
    }
    Ok(ricci_full_with(&spec.killing_ratios, g))
}

fn ricci_full_with(blocks: &[KillingBlock], g: &FullMetric) -> RicciComponents {
    // Ric is scale invariant, so evaluate at g/x3 and divide the ratios by x3
    let s = g.x3;
    let (x1, x2, x4) = (g.x1 / s, g.x2 / s, g.x4 / s);
    let dd = x1 * x2 - x4 * x4;
    let r = big_r(x1, x2, x4);
    RicciComponents {
        r1: (-x2 / (8.0 * x1 * dd) + x4 * x4 / (2.0 * dd) + 1.0 / (2.0 * x1)) / s,
        r2: (-x1 / (8.0 * x2 * dd) + x4 * x4 / (2.0 * dd) + 1.0 / (2.0 * x2)) / s,
        r12: (4.0 * x1 * x2 - 1.0) / (8.0 * dd) / s,
        r3: blocks
            .iter()
            .map(|b| 0.5 * (ratio_to_f64(&b.a) * (1.0 - r) + r) / s)
            .collect(),
        big_r: r,
    }
}

/// Ricci operator on p1⊕p2 as a 2×2 matrix acting on (p1, p2) coefficients.
fn operator_12(g: &FullMetric, rc: &RicciComponents) -> [[f64; 2]; 2] {
    // Ric matrix C = [[r1 x1, r12 x4], [r12 x4, r2 x2]], operator G^{-1} C
    let c = [[rc.r1 * g.x1, rc.r12 * g.x4], [rc.r12 * g.x4, rc.r2 * g.x2]];
    let dd = g.det12();
    let gi = [[g.x2 / dd, -g.x4 / dd], [-g.x4 / dd, g.x1 / dd]];
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = gi[i][0] * c[0][j] + gi[i][1] * c[1][j];
        }
    }
    m
}

/// Relative deviation of the Ricci operator from ρ̄·I, and ρ̄.
pub fn full_residual(spec: &SpaceSpec, g: &FullMetric, rc: &RicciComponents) -> (f64, f64) {
    let m = operator_12(g, rc);
    let n = spec.n as f64;
    let dims: Vec<i64> = spec.killing_ratios.iter().map(|b| b.dim).collect();
    let trace = n * (m[0][0] + m[1][1])
        + rc.r3
            .iter()
            .zip(&dims)
            .map(|(r, &d)| r * d as f64)
            .sum::<f64>();
    let mean = trace / spec.dim_m() as f64;
    let mut worst = (m[0][0] - mean).abs().max((m[1][1] - mean).abs());
    worst = worst.max(m[0][1].abs()).max(m[1][0].abs());
    for r in &rc.r3 {
        worst = worst.max((r - mean).abs());
    }
    // reuse the diagonal definition when it applies, so both paths agree exactly
    if g.x4 == 0.0 {
        let mut eigs = vec![m[0][0], m[1][1]];
        eigs.extend(rc.r3.iter().copied());
        return (einstein_residual(&eigs, &spec.block_dims()), mean);
    }
    (worst / mean.abs(), mean)
}

/// Scalar curvature tr(g⁻¹ Ric).
pub fn scalar_full(spec: &SpaceSpec, g: &FullMetric) -> Result<f64> {
    let rc = ricci_full(spec, g)?;
    let m = operator_12(g, &rc);
    Ok(spec.n as f64 * (m[0][0] + m[1][1])
        + rc.r3
            .iter()
            .zip(&spec.killing_ratios)
            .map(|(r, b)| r * b.dim as f64)
            .sum::<f64>())
}

/// scal · ((x1x2 − x4²)^n x3^d)^{1/(2n+d)}.
pub fn scal_n_general(spec: &SpaceSpec, g: &FullMetric) -> Result<f64> {
    let (n, d) = (spec.n as f64, spec.d as f64);
    let vol = ((n * g.det12().ln() + d * g.x3.ln()) / (2.0 * n + d)).exp();
    Ok(scalar_full(spec, g)? * vol)
}

/// Normalized scalar curvature of an Einstein solution; errors if `sol` is not Einstein.
pub fn scal_n_full(spec: &SpaceSpec, sol: &EinsteinSolution) -> Result<f64> {
    let model = effective_spec(spec)?;
    let g = FullMetric::new(sol.x1, sol.x2, sol.x3, sol.x4)?;
    let rc = ricci_full_with(&model.killing_ratios, &g);
    let (res, _) = full_residual(&model, &g, &rc);
    if res > 1e-8 {
        return Err(Error::NotEinstein {
            space: spec.id.clone(),
            residual: res,
        });
    }
    scal_n_general(&model, &g)
}

/// Uniform-ratio model used for provisional rows; the spec itself otherwise.
fn effective_spec(spec: &SpaceSpec) -> Result<SpaceSpec> {
    if spec.flags.uniform_a || !spec.flags.provisional {
        return Ok(spec.clone());
    }
    let a = spec
        .effective_a()
        .expect("provisional rows carry an effective ratio");
    Ok(SpaceSpec {
        killing_ratios: vec![KillingBlock { a, dim: spec.d }],
        flags: crate::catalog::Flags {
            uniform_a: true,
            ..spec.flags
        },
        ..spec.clone()
    })
}

fn full_solution(model: &SpaceSpec, label: Label, g: FullMetric) -> EinsteinSolution {
    let rc = ricci_full_with(&model.killing_ratios, &g);
    let (residual, rho) = full_residual(model, &g, &rc);
    EinsteinSolution {
        label,
        x1: g.x1,
        x2: g.x2,
        x3: g.x3,
        x4: g.x4,
        rho,
        scal_n: scal_n_general(model, &g).unwrap_or(f64::NAN),
        residual,
        partner: label.partner(),
        provisional: false,
    }
}

/// Einstein metrics on H×H/ΔK for symmetric H/K, up to scaling.
pub fn classify_symmetric(spec: &SpaceSpec) -> Result<Vec<EinsteinSolution>> {
    if !spec.flags.symmetric {
        return Err(spec.unsupported("classification needs a symmetric pair"));
    }
    let g5 = FullMetric::new(0.5, 1.5, 1.0, 0.5)?;
    let g6 = FullMetric::new(1.5, 0.5, 1.0, 0.5)?;
    let Some(a) = spec.effective_a() else {
        // per-ideal ratios: only the pair that exists for every H/K
        return Ok(vec![
            full_solution(spec, Label::G5, g5),
            full_solution(spec, Label::G6, g6),
        ]);
    };
    if a == rat(0, 1) {
        return Err(spec.unsupported("a = 0 (SU(2)/S^1) is excluded"));
    }
    let model = effective_spec(spec)?;
    let af = ratio_to_f64(&a);
    let half = rat(1, 2);
    let mut out = Vec::new();
    if a < half {
        out.extend(solve_diagonal(&model)?);
    } else if a > half {
        let y = 0.5 * ((2.0 * af - 1.0) / (2.0 - af)).sqrt();
        out.push(full_solution(
            &model,
            Label::G3,
            FullMetric::new(1.0, 1.0, 1.0, y)?,
        ));
        out.push(full_solution(
            &model,
            Label::G4,
            FullMetric::new(1.0, 1.0, 1.0, -y)?,
        ));
    } else {
        out.push(diagonal_solution(&model, Label::G1Plus, 1.0));
    }
    out.push(full_solution(&model, Label::G5, g5));
    out.push(full_solution(&model, Label::G6, g6));
    if spec.flags.provisional {
        for s in &mut out {
            s.provisional = true;
        }
    }
    Ok(out)
}

fn find(sols: &[EinsteinSolution], l: Label) -> Option<f64> {
    sols.iter().find(|s| s.label == l).map(|s| s.scal_n)
}

/// scal_N(g1) < scal_N(g2) < scal_N(g5) for a < 1/2, scal_N(g3) < scal_N(g5) for a > 1/2.
pub fn nonhomothety_check(spec: &SpaceSpec) -> Result<bool> {
    let a = spec
        .effective_a()
        .ok_or_else(|| spec.unsupported("needs a uniform Killing ratio"))?;
    if a == rat(1, 2) {
        return Err(spec.unsupported("a = 1/2"));
    }
    let sols = classify_symmetric(spec)?;
    let s5 = find(&sols, Label::G5).unwrap();
    let ok = if a < rat(1, 2) {
        let (s1, s2) = (
            find(&sols, Label::G1Plus).unwrap(),
            find(&sols, Label::G2Minus).unwrap(),
        );
        s1 < s2 && s2 < s5
    } else {
        find(&sols, Label::G3).unwrap() < s5
    };
    if !ok {
        return Err(Error::Assertion {
            space: spec.id.clone(),
            what: "normalized scalar curvatures out of order".into(),
        });
    }
    Ok(true)
}

/// Symmetric families with closed-form normalized scalar curvatures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SymFamily {
    /// SU(m)/SO(m), m ≥ 3
    SuSo,
    /// SO(2m)/SO(m)×SO(m), m ≥ 4
    SoSoSo,
    /// SU(2m)/Sp(m), m ≥ 2
    SuSp,
    /// SO(m)/SO(m−1), m ≥ 7
    SoSo,
    /// Sp(2m)/Sp(m)×Sp(m), m ≥ 1
    SpSpSp,
}

impl SymFamily {
    pub fn catalog_id(self) -> &'static str {
        match self {
            SymFamily::SuSo => "SU(m)/SO(m)",
            SymFamily::SoSoSo => "SO(2m)/SO(m)xSO(m)",
            SymFamily::SuSp => "SU(2m)/Sp(m)",
            SymFamily::SoSo => "SO(m)/SO(m-1)",
            SymFamily::SpSpSp => "Sp(2m)/Sp(m)xSp(m)",
        }
    }

    pub fn min_m(self) -> i64 {
        match self {
            SymFamily::SuSo => 3,
            SymFamily::SoSoSo => 4,
            SymFamily::SuSp => 2,
            SymFamily::SoSo => 7,
            SymFamily::SpSpSp => 1,
        }
    }
}

/// Closed forms: (g1, g2, g5) for a < 1/2 families, (g3, g5) otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyScal {
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub g3: Option<f64>,
    pub g5: f64,
}

pub fn family_scal_formulas(family: SymFamily, m: i64) -> Result<FamilyScal> {
    if m < family.min_m() {
        return Err(Error::OutOfRange {
            space: family.catalog_id().into(),
            param: "m".into(),
            value: m,
            range: format!("m>={}", family.min_m()),
        });
    }
    let mf = m as f64;
    Ok(match family {
        SymFamily::SuSo => {
            let p = 3.0 * mf * mf + mf - 4.0;
            let e = 4.0 * (mf + 1.0) / (3.0 * mf + 4.0);
            let r = (mf + 2.0).sqrt();
            let g = |s: f64| {
                p * (3.0 * mf + 2.0 + s * 4.0 * r) / (16.0 * (mf - 2.0))
                    * ((mf - 2.0) / (mf + s * r)).powf(e)
            };
            FamilyScal {
                g1: Some(g(1.0)),
                g2: Some(g(-1.0)),
                g3: None,
                g5: p / 2.0 * 4f64.powf(-(2.0 * mf + 3.0) / (3.0 * mf + 4.0)),
            }
        }
        SymFamily::SoSoSo => {
            let p = mf * (3.0 * mf - 1.0);
            let e = (4.0 * mf - 2.0) / (3.0 * mf - 1.0);
            let r = (2.0 * mf).sqrt();
            let g = |s: f64| {
                p * (3.0 * mf - 2.0 + s * 2.0 * r) / (8.0 * (mf - 2.0))
                    * (2.0 * (mf - 2.0) / (2.0 * mf - 2.0 + s * r)).powf(e)
            };
            FamilyScal {
                g1: Some(g(1.0)),
                g2: Some(g(-1.0)),
                g3: None,
                g5: p * 2f64.powf(-(4.0 * mf - 1.0) / (3.0 * mf - 1.0)),
            }
        }
        SymFamily::SuSp => {
            let p = 6.0 * mf * mf - mf - 2.0;
            let q = 3.0 * mf - 2.0;
            FamilyScal {
                g1: None,
                g2: None,
                g3: Some(
                    p / 8.0
                        * 3f64.powf((mf - 1.0) / q)
                        * (2.0 * (3.0 * mf - 1.0) / (2.0 * mf - 1.0)).powf((2.0 * mf - 1.0) / q),
                ),
                g5: p * 2f64.powf(-(4.0 * mf - 3.0) / q),
            }
        }
        SymFamily::SoSo => {
            let p = mf * mf + mf - 2.0;
            FamilyScal {
                g1: None,
                g2: None,
                g3: Some(
                    p / 16.0
                        * 9f64.powf(1.0 / (mf + 2.0))
                        * (4.0 * (mf - 1.0) / mf).powf(mf / (mf + 2.0)),
                ),
                g5: p * 4f64.powf(-(mf + 3.0) / (mf + 2.0)),
            }
        }
        SymFamily::SpSpSp => {
            let p = 6.0 * mf * mf + mf;
            let q = 6.0 * mf + 1.0;
            FamilyScal {
                g1: None,
                g2: None,
                g3: Some(
                    p * (9.0f64 / 16.0).powf(mf / q)
                        * ((3.0 * mf + 1.0) / (4.0 * mf + 1.0)).powf((4.0 * mf + 1.0) / q),
                ),
                g5: p * 4f64.powf(-mf / q),
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScTable {
    Sc1,
    Sc2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScRow {
    pub space: String,
    pub m: Option<i64>,
    /// (g1, g2, g5) for the first table, (g3, g5) for the second.
    pub values: Vec<f64>,
}

impl ScTable {
    pub fn header(self) -> &'static [&'static str] {
        match self {
            ScTable::Sc1 => &["space", "m", "scal_n(g1)", "scal_n(g2)", "scal_n(g5)"],
            ScTable::Sc2 => &["space", "m", "scal_n(g3)", "scal_n(g5)"],
        }
    }

    fn rows(self) -> (&'static [SymFamily], &'static [&'static str]) {
        match self {
            ScTable::Sc1 => (
                &[SymFamily::SuSo, SymFamily::SoSoSo],
                &["G2/SU(2)xSU(2)", "E6/Sp(4)", "E7/SU(8)", "E8/SO(16)"],
            ),
            ScTable::Sc2 => (
                &[SymFamily::SuSp, SymFamily::SoSo, SymFamily::SpSpSp],
                &["F4/SO(9)", "E6/F4"],
            ),
        }
    }

    /// Every row; parametric rows at `m` when it is in range, else at their minimum.
    pub fn reproduce(self, catalog: &Catalog, m: Option<i64>) -> Result<Vec<ScRow>> {
        let (fams, sporadic) = self.rows();
        let mut out = Vec::new();
        for f in fams {
            let mv = m.filter(|&v| v >= f.min_m()).unwrap_or(f.min_m());
            let spec = catalog.resolve(f.catalog_id(), &[("m".into(), mv)])?;
            out.push(ScRow {
                space: f.catalog_id().into(),
                m: Some(mv),
                values: self.values(&spec)?,
            });
        }
        for id in sporadic {
            let spec = catalog.resolve(id, &[])?;
            out.push(ScRow {
                space: spec.id.clone(),
                m: None,
                values: self.values(&spec)?,
            });
        }
        Ok(out)
    }

    fn values(self, spec: &SpaceSpec) -> Result<Vec<f64>> {
        let sols = classify_symmetric(spec)?;
        let labels: &[Label] = match self {
            ScTable::Sc1 => &[Label::G1Plus, Label::G2Minus, Label::G5],
            ScTable::Sc2 => &[Label::G3, Label::G5],
        };
        labels
            .iter()
            .map(|l| {
                let sol = sols
                    .iter()
                    .find(|s| s.label == *l)
                    .ok_or_else(|| Error::Assertion {
                        space: spec.id.clone(),
                        what: format!("no {} solution", l.name()),
                    })?;
                scal_n_full(spec, sol)
            })
            .collect()
    }
}

/// Thm-style closed forms for g3 and g5 at x3 = 1.
pub fn scal_n_g3_closed(spec: &SpaceSpec) -> Option<f64> {
    let a = ratio_to_f64(&spec.effective_a()?);
    let alpha = ratio_to_f64(&spec.alpha());
    Some(3.0 * spec.dim_m() as f64 / 8.0 * (4.0 * (2.0 - a) / (3.0 * (3.0 - 2.0 * a))).powf(alpha))
}

pub fn scal_n_g5_closed(spec: &SpaceSpec) -> f64 {
    spec.dim_m() as f64 * 2f64.powf(ratio_to_f64(&spec.alpha()) - 2.0)
}

/// Exact R at g5 and g6 (both equal 1).
pub fn big_r_exact(x1: Rational, x2: Rational, x4: Rational) -> Rational {
    let dd = x1 * x2 - x4 * x4;
    let (x1s, x4s) = (x1 * x1, x4 * x4);
    let two = Rational::from_integer(2);
    let four = Rational::from_integer(4);
    -two * x4s / dd
        + Rational::from_integer(1) / (four * x1s)
        + (x1s - x4s) * (x1s - x4s) / (four * x1s * dd * dd)
        + x4s / (two * x1s * dd)
}
