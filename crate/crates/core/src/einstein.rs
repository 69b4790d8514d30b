//! Diagonal Einstein metrics g± = (x±, x±, 1) and the checks around them.

use crate::catalog::{discriminant, SpaceSpec};
use crate::diagonal::{diagonal_residual, ricci_diagonal, DiagonalMetric};
use crate::error::{Error, Result};
use crate::numeric::{int, ratio_to_f64, sign, Rational};
use num_traits::{One, Zero};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    G1Plus,
    G2Minus,
    Abelian,
    G3,
    G4,
    G5,
    G6,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::G1Plus => "g1_plus",
            Label::G2Minus => "g2_minus",
            Label::Abelian => "abelian",
            Label::G3 => "g3",
            Label::G4 => "g4",
            Label::G5 => "g5",
            Label::G6 => "g6",
        }
    }

    /// The isometric partner the module also emits, if any.
    pub fn partner(self) -> Option<Label> {
        match self {
            Label::G3 => Some(Label::G4),
            Label::G4 => Some(Label::G3),
            Label::G5 => Some(Label::G6),
            Label::G6 => Some(Label::G5),
            _ => None,
        }
    }

    pub fn is_diagonal(self) -> bool {
        matches!(self, Label::G1Plus | Label::G2Minus | Label::Abelian)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EinsteinSolution {
    pub label: Label,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
    pub rho: f64,
    pub scal_n: f64,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partner: Option<Label>,
    /// Set when computed from a provisional Killing ratio.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub provisional: bool,
}

impl EinsteinSolution {
    pub fn diagonal(&self) -> DiagonalMetric {
        DiagonalMetric {
            x1: self.x1,
            x2: self.x2,
            x3: self.x3,
        }
    }
}

/// The diagonal Einstein metrics, normalized to x3 = 1. Empty when the
/// discriminant is negative; one solution (labelled g1_plus) at equality.
pub fn solve_diagonal(spec: &SpaceSpec) -> Result<Vec<EinsteinSolution>> {
    let a = spec.require_uniform()?;
    let k = spec.kappa_f64();
    let xs: Vec<(Label, f64)> = if spec.flags.abelian_k {
        vec![(Label::Abelian, (k + 1.0) / (2.0 * k + 1.0))]
    } else {
        let disc = discriminant(spec)?;
        let af = ratio_to_f64(&a);
        match sign(&disc) {
            -1 => vec![],
            0 => vec![(Label::G1Plus, (2.0 * k + 1.0) / (4.0 * af))],
            _ => {
                let r = ratio_to_f64(&disc).sqrt();
                vec![
                    (Label::G1Plus, (2.0 * k + 1.0 + r) / (4.0 * af)),
                    (Label::G2Minus, (2.0 * k + 1.0 - r) / (4.0 * af)),
                ]
            }
        }
    };
    Ok(xs
        .into_iter()
        .map(|(label, x)| diagonal_solution(spec, label, x))
        .collect())
}

pub(crate) fn diagonal_solution(spec: &SpaceSpec, label: Label, x: f64) -> EinsteinSolution {
    let k = spec.kappa_f64();
    let dim = spec.dim_m() as f64;
    let alpha = ratio_to_f64(&spec.alpha());
    let g = DiagonalMetric {
        x1: x,
        x2: x,
        x3: 1.0,
    };
    EinsteinSolution {
        label,
        x1: x,
        x2: x,
        x3: 1.0,
        x4: 0.0,
        rho: ((2.0 * k + 1.0) * x - k) / (4.0 * x * x),
        scal_n: dim * ((2.0 * k + 1.0) * x - k) / (4.0 * x.powf(2.0 * alpha)),
        residual: diagonal_residual(spec, &g),
        partner: None,
        provisional: false,
    }
}

/// Where a rational point sits relative to the roots of
/// f(x) = 2a x² − (2κ+1) x + (1 − a + κ), whose roots are x±.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootPosition {
    BelowMinus,
    AtMinus,
    Between,
    AtPlus,
    AbovePlus,
}

pub fn locate(spec: &SpaceSpec, c: Rational) -> Result<RootPosition> {
    let a = spec.require_uniform()?;
    if a.is_zero() {
        return Err(spec.unsupported("root location needs a > 0"));
    }
    let k = spec.kappa;
    let t = int(2) * k + Rational::one();
    let f = int(2) * a * c * c - t * c + (Rational::one() - a + k);
    let vertex = t / (int(4) * a);
    Ok(match (sign(&f), c < vertex) {
        (1, true) => RootPosition::BelowMinus,
        (1, false) => RootPosition::AbovePlus,
        (0, true) => RootPosition::AtMinus,
        (0, false) => RootPosition::AtPlus,
        _ => RootPosition::Between,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingReport {
    pub space_id: String,
    pub x_minus: f64,
    pub x_plus: f64,
    /// x− < (2κ+1)/(4a) < x+ ≤ (2κ+1)/(2a)
    pub vertex_between: bool,
    pub upper_bound: bool,
    /// x− < 2(1−a+κ)/(2κ+1) < x+
    pub xmxm_between: bool,
    /// Present when a < κ: x− < 1 < x+.
    pub one_between: Option<bool>,
}

impl OrderingReport {
    pub fn all_hold(&self) -> bool {
        self.vertex_between
            && self.upper_bound
            && self.xmxm_between
            && self.one_between.unwrap_or(true)
    }
}

/// Orderings of x± against the reference points, decided exactly.
pub fn ordering_checks(spec: &SpaceSpec, sols: &[EinsteinSolution]) -> Result<OrderingReport> {
    let plus = sols.iter().find(|s| s.label == Label::G1Plus);
    let minus = sols.iter().find(|s| s.label == Label::G2Minus);
    let (Some(p), Some(m)) = (plus, minus) else {
        return Err(spec.unsupported("ordering checks need two distinct solutions"));
    };
    let a = spec.require_uniform()?;
    let k = spec.kappa;
    let t = int(2) * k + Rational::one();
    let between = |c: Rational| -> Result<bool> { Ok(locate(spec, c)? == RootPosition::Between) };
    let rep = OrderingReport {
        space_id: spec.id.clone(),
        x_minus: m.x1,
        x_plus: p.x1,
        vertex_between: between(t / (int(4) * a))?,
        upper_bound: matches!(
            locate(spec, t / (int(2) * a))?,
            RootPosition::AbovePlus | RootPosition::AtPlus
        ),
        xmxm_between: between(int(2) * (Rational::one() - a + k) / t)?,
        one_between: if a < k {
            Some(between(Rational::one())?)
        } else {
            None
        },
    };
    if !rep.all_hold() {
        return Err(Error::Assertion {
            space: spec.id.clone(),
            what: format!("ordering of x± violated: {rep:?}"),
        });
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct X3Form {
    pub label: Label,
    pub x3: f64,
}

/// The same solutions written as (1, 1, x3); x3 for g± is 1/x±.
pub fn x3_normal_form(spec: &SpaceSpec) -> Result<Vec<X3Form>> {
    let a = spec.require_uniform()?;
    let k = spec.kappa_f64();
    if spec.flags.abelian_k {
        return Ok(vec![X3Form {
            label: Label::Abelian,
            x3: (2.0 * k + 1.0) / (k + 1.0),
        }]);
    }
    let disc = discriminant(spec)?;
    let denom = 2.0 * (1.0 - ratio_to_f64(&a) + k);
    Ok(match sign(&disc) {
        -1 => vec![],
        0 => vec![X3Form {
            label: Label::G1Plus,
            x3: (2.0 * k + 1.0) / denom,
        }],
        _ => {
            let r = ratio_to_f64(&disc).sqrt();
            vec![
                X3Form {
                    label: Label::G1Plus,
                    x3: (2.0 * k + 1.0 - r) / denom,
                },
                X3Form {
                    label: Label::G2Minus,
                    x3: (2.0 * k + 1.0 + r) / denom,
                },
            ]
        }
    })
}

/// Canonical-variation criterion (2κ+1)²/16 ≥ (a/2)(1−a+κ), exactly.
pub fn besse_condition(spec: &SpaceSpec) -> Result<bool> {
    let a = spec.require_uniform()?;
    let k = spec.kappa;
    let t = int(2) * k + Rational::one();
    Ok(t * t / int(16) >= a / int(2) * (Rational::one() - a + k))
}

/// Ricci eigenvalue spread of a solution recomputed from the closed-form Ricci.
pub fn recheck_residual(spec: &SpaceSpec, sol: &EinsteinSolution) -> f64 {
    diagonal_residual(spec, &sol.diagonal())
}

/// ρ read back from the Ricci operator (p1 eigenvalue) at a diagonal solution.
pub fn rho_from_ricci(spec: &SpaceSpec, sol: &EinsteinSolution) -> f64 {
    ricci_diagonal(spec, &sol.diagonal()).r1
}

/// 2ρ for the abelian solution: (2κ+1)²/(2(κ+1)²).
pub fn abelian_two_rho(spec: &SpaceSpec) -> Rational {
    let k = spec.kappa;
    let t = int(2) * k + Rational::one();
    t * t / (int(2) * (k + Rational::one()) * (k + Rational::one()))
}
