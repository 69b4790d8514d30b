//! Machine-readable tables of homogeneous pairs H/K, family instantiation
//! and the exact existence test for diagonal Einstein metrics.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numeric::{fmt_rational, int, rat, ratio_to_f64, sign, Rational};
use num_traits::{One, Zero};
use std::path::Path;

pub const BUILTIN: &str = include_str!("../data/catalog.txt");

/// How far `resolve` searches family parameters when matching an instance name.
const RESOLVE_PARAM_BOUND: i64 = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Flags {
    pub symmetric: bool,
    pub abelian_k: bool,
    pub uniform_a: bool,
    pub irreducible: bool,
    pub provisional: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cond2 {
    Yes,
    No,
    Equality,
}

impl Cond2 {
    pub fn label(self) -> &'static str {
        match self {
            Cond2::Yes => "yes",
            Cond2::No => "no",
            Cond2::Equality => "eq",
        }
    }

    fn parse(s: &str) -> Option<Cond2> {
        match s {
            "yes" => Some(Cond2::Yes),
            "no" => Some(Cond2::No),
            "eq" => Some(Cond2::Equality),
            _ => None,
        }
    }
}

/// Result of the existence test: `strict` iff two diagonal Einstein metrics,
/// `equality` iff exactly one (semisimple K).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cond2Status {
    pub strict: bool,
    pub equality: bool,
}

impl Cond2Status {
    pub fn as_cond2(self) -> Cond2 {
        if self.strict {
            Cond2::Yes
        } else if self.equality {
            Cond2::Equality
        } else {
            Cond2::No
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KillingBlock {
    pub a: Rational,
    pub dim: i64,
}

/// A concrete pair H/K as pure numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    pub id: String,
    pub family: Option<String>,
    pub family_params: Vec<(String, i64)>,
    pub table: String,
    pub dim_h: i64,
    pub d: i64,
    pub n: i64,
    /// Center first (a = 0), then the simple ideals.
    pub killing_ratios: Vec<KillingBlock>,
    pub kappa: Rational,
    pub rho: Rational,
    pub flags: Flags,
    pub cond2_expected: Option<Cond2>,
}

impl SpaceSpec {
    /// The common ratio when Kil_k = a Kil_h|_k.
    pub fn uniform_a(&self) -> Option<Rational> {
        if self.flags.uniform_a {
            Some(self.killing_ratios[0].a)
        } else {
            None
        }
    }

    /// Uniform ratio, or S/d for rows flagged provisional.
    pub fn effective_a(&self) -> Option<Rational> {
        if self.flags.uniform_a {
            self.uniform_a()
        } else if self.flags.provisional {
            Some(self.s_sum() / int(self.d))
        } else {
            None
        }
    }

    /// S = sum of a_l d_l.
    pub fn s_sum(&self) -> Rational {
        self.killing_ratios
            .iter()
            .map(|b| b.a * int(b.dim))
            .fold(Rational::zero(), |x, y| x + y)
    }

    pub fn dim_m(&self) -> i64 {
        2 * self.n + self.d
    }

    /// alpha = (n+d)/(2n+d).
    pub fn alpha(&self) -> Rational {
        rat((self.n + self.d) as i128, self.dim_m() as i128)
    }

    pub fn kappa_f64(&self) -> f64 {
        ratio_to_f64(&self.kappa)
    }

    /// Block dimensions (n, n, d_0, ..., d_t).
    pub fn block_dims(&self) -> Vec<i64> {
        let mut v = vec![self.n, self.n];
        v.extend(self.killing_ratios.iter().map(|b| b.dim));
        v
    }

    pub fn unsupported(&self, reason: &str) -> Error {
        Error::Unsupported {
            space: self.id.clone(),
            reason: reason.into(),
        }
    }

    /// Uniform ratio, or an unsupported-space error. Abelian K counts (a = 0).
    pub fn require_uniform(&self) -> Result<Rational> {
        self.uniform_a()
            .ok_or_else(|| self.unsupported("Killing ratios are not uniform"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamRange {
    pub name: String,
    pub min: i64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Cmp {
    Eq,
    Ge,
    Le,
    Gt,
    Lt,
}

#[derive(Debug, Clone, PartialEq)]
struct Clause {
    value: Cond2,
    when: Vec<(String, Cmp, i64)>,
}

#[derive(Debug, Clone, PartialEq)]
struct RatioExpr {
    a: Expr,
    dim: Option<Expr>,
}

/// One catalog row; family rows stay symbolic until instantiated.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub template: String,
    pub family_id: String,
    pub params: Vec<ParamRange>,
    pub table: String,
    pub line: usize,
    flags: Flags,
    dim_h: Expr,
    d: Expr,
    n: Expr,
    ratios: Vec<RatioExpr>,
    cond2: Option<Vec<Clause>>,
    kappa: Option<Expr>,
    raw: Vec<String>,
}

impl CatalogEntry {
    pub fn is_family(&self) -> bool {
        !self.params.is_empty()
    }

    /// The raw column text, for listing unexpanded family rows.
    pub fn column(&self, i: usize) -> &str {
        &self.raw[i]
    }

    pub fn symmetric(&self) -> bool {
        self.flags.symmetric
    }

    pub fn provisional(&self) -> bool {
        self.flags.provisional
    }

    pub fn instance_name(&self, env: &[(String, i64)]) -> Result<String> {
        render_template(&self.template, Some(env))
    }

    /// Evaluate every expression at `params` and check all invariants.
    pub fn instantiate(&self, params: &[(String, i64)]) -> Result<SpaceSpec> {
        for p in &self.params {
            let v = params
                .iter()
                .find(|(k, _)| *k == p.name)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::OutOfRange {
                    space: self.family_id.clone(),
                    param: p.name.clone(),
                    value: 0,
                    range: format!("{}>={} (missing)", p.name, p.min),
                })?;
            if v < p.min {
                return Err(Error::OutOfRange {
                    space: self.family_id.clone(),
                    param: p.name.clone(),
                    value: v,
                    range: format!("{}>={}", p.name, p.min),
                });
            }
        }
        let env: Vec<(String, i64)> = self
            .params
            .iter()
            .map(|p| {
                let v = params.iter().find(|(k, _)| *k == p.name).unwrap().1;
                (p.name.clone(), v)
            })
            .collect();
        let id = self.instance_name(&env)?;
        let bad = |field: &'static str, detail: String| Error::Invariant {
            space: id.clone(),
            field,
            detail,
        };
        let ev_int = |e: &Expr, field: &'static str| e.eval_int(&env).map_err(|m| bad(field, m));
        let ev = |e: &Expr, field: &'static str| e.eval(&env).map_err(|m| bad(field, m));

        let dim_h = ev_int(&self.dim_h, "dim_h")?;
        let d = ev_int(&self.d, "d")?;
        let n = ev_int(&self.n, "n")?;
        if n <= 0 || d <= 0 {
            return Err(bad("n", format!("n={n}, d={d} must be positive")));
        }
        if n + d != dim_h {
            return Err(bad(
                "dim_h",
                format!("n + d = {} but dim_h = {dim_h}", n + d),
            ));
        }

        let mut blocks = Vec::new();
        for r in &self.ratios {
            let a = ev(&r.a, "killing_ratios")?;
            let dim = match &r.dim {
                Some(e) => ev_int(e, "killing_ratios")?,
                None => d,
            };
            if a < Rational::zero() || a >= Rational::one() {
                return Err(bad("killing_ratios", format!("a = {a} outside [0,1)")));
            }
            if dim <= 0 {
                return Err(bad("killing_ratios", format!("block dimension {dim}")));
            }
            blocks.push(KillingBlock { a, dim });
        }
        if blocks.iter().map(|b| b.dim).sum::<i64>() != d {
            return Err(bad(
                "killing_ratios",
                "block dimensions do not sum to d".into(),
            ));
        }
        if blocks.iter().skip(1).any(|b| b.a.is_zero()) {
            return Err(bad(
                "killing_ratios",
                "the center block must come first".into(),
            ));
        }

        let abelian_k = blocks.iter().all(|b| b.a.is_zero());
        let uniform_a = blocks.iter().all(|b| b.a == blocks[0].a);
        if uniform_a && blocks.len() > 1 {
            let a = blocks[0].a;
            blocks = vec![KillingBlock { a, dim: d }];
        }

        let kappa = blocks
            .iter()
            .map(|b| (Rational::one() - b.a) * int(b.dim))
            .fold(Rational::zero(), |x, y| x + y)
            / int(n);
        if let Some(k) = &self.kappa {
            let listed = ev(k, "kappa")?;
            if listed != kappa {
                return Err(bad(
                    "kappa",
                    format!("listed {listed} but sum (1-a_l)d_l/n = {kappa}"),
                ));
            }
        }
        let half = rat(1, 2);
        if kappa <= Rational::zero() || kappa > half {
            return Err(bad("kappa", format!("{kappa} outside (0, 1/2]")));
        }
        if (kappa == half) != self.flags.symmetric {
            return Err(bad(
                "kappa",
                format!("kappa = {kappa} disagrees with the symmetric flag"),
            ));
        }
        if self.flags.symmetric && uniform_a {
            let expect = rat((2 * d - n) as i128, (2 * d) as i128);
            if blocks[0].a != expect {
                return Err(bad(
                    "killing_ratios",
                    format!("symmetric row needs a = {expect}"),
                ));
            }
        }

        let cond2_expected = match &self.cond2 {
            None => None,
            Some(clauses) => Some(
                eval_clauses(clauses, &env)
                    .ok_or_else(|| bad("cond2", "no clause matches".into()))?,
            ),
        };

        Ok(SpaceSpec {
            id,
            family: self.is_family().then(|| self.family_id.clone()),
            family_params: env,
            table: self.table.clone(),
            dim_h,
            d,
            n,
            killing_ratios: blocks,
            rho: (kappa + half) / int(2),
            kappa,
            flags: Flags {
                abelian_k,
                uniform_a,
                ..self.flags
            },
            cond2_expected,
        })
    }

    /// Instantiate with positional values in the order of `params`.
    pub fn instantiate_values(&self, values: &[i64]) -> Result<SpaceSpec> {
        if values.len() != self.params.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} takes {} parameter(s), got {}",
                self.family_id,
                self.params.len(),
                values.len()
            )));
        }
        let env: Vec<(String, i64)> = self
            .params
            .iter()
            .zip(values)
            .map(|(p, v)| (p.name.clone(), *v))
            .collect();
        self.instantiate(&env)
    }

    /// The `count` smallest values of each parameter, all combinations.
    pub fn smallest_instances(&self, count: usize) -> Result<Vec<SpaceSpec>> {
        let mut combos: Vec<Vec<i64>> = vec![vec![]];
        for p in &self.params {
            let mut next = Vec::new();
            for c in &combos {
                for v in p.min..p.min + count as i64 {
                    let mut c = c.clone();
                    c.push(v);
                    next.push(c);
                }
            }
            combos = next;
        }
        combos.iter().map(|c| self.instantiate_values(c)).collect()
    }
}

fn eval_clauses(clauses: &[Clause], env: &[(String, i64)]) -> Option<Cond2> {
    clauses
        .iter()
        .find(|c| {
            c.when.iter().all(|(var, cmp, rhs)| {
                let Some(v) = env.iter().find(|(k, _)| k == var).map(|(_, v)| *v) else {
                    return false;
                };
                match cmp {
                    Cmp::Eq => v == *rhs,
                    Cmp::Ge => v >= *rhs,
                    Cmp::Le => v <= *rhs,
                    Cmp::Gt => v > *rhs,
                    Cmp::Lt => v < *rhs,
                }
            })
        })
        .map(|c| c.value)
}

/// Family id (env = None) or concrete instance name.
fn render_template(t: &str, env: Option<&[(String, i64)]>) -> Result<String> {
    let mut out = String::new();
    let mut rest = t;
    while let Some(i) = rest.find('{') {
        out.push_str(&rest[..i]);
        let j = rest[i..].find('}').ok_or_else(|| Error::Expr {
            expr: t.into(),
            msg: "unclosed `{`".into(),
        })? + i;
        let src = &rest[i + 1..j];
        let e = Expr::parse(src)?;
        match env {
            Some(env) => {
                let v = e.eval_int(env).map_err(|msg| Error::Expr {
                    expr: src.into(),
                    msg,
                })?;
                out.push_str(&v.to_string());
            }
            None => {
                let s = src.replace('*', "").replace(' ', "");
                if out.ends_with('^') && !e.is_atomic() {
                    out.push_str(&format!("({s})"));
                } else {
                    out.push_str(&s);
                }
            }
        }
        rest = &rest[j + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Loose key for name matching: no whitespace or `*`, `×` read as `x`.
pub fn name_key(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != '*')
        .map(|c| if c == '×' { 'x' } else { c })
        .collect::<String>()
        .to_lowercase()
}

#[derive(Debug, Clone)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn builtin() -> Catalog {
        Catalog::parse(BUILTIN).expect("built-in catalog parses")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Catalog> {
        Catalog::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Catalog> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            let entry = parse_row(body, line)?;
            // family rows are validated at their smallest parameters
            let mins: Vec<i64> = entry.params.iter().map(|p| p.min).collect();
            entry.instantiate_values(&mins)?;
            entries.push(entry);
        }
        Ok(Catalog { entries })
    }

    pub fn find_entry(&self, name: &str) -> Option<&CatalogEntry> {
        let key = name_key(name);
        self.entries.iter().find(|e| name_key(&e.family_id) == key)
    }

    /// Sporadic id, family id with parameters, or a concrete instance name.
    pub fn resolve(&self, name: &str, params: &[(String, i64)]) -> Result<SpaceSpec> {
        if let Some(e) = self.find_entry(name) {
            return e.instantiate(params);
        }
        let key = name_key(name);
        for e in self.entries.iter().filter(|e| e.is_family()) {
            if let Some(spec) = search_instance(e, &key) {
                return Ok(spec);
            }
        }
        Err(Error::UnknownSpace(name.into()))
    }

    /// Every sporadic row plus each family at its `count` smallest parameters.
    pub fn expanded(&self, count: usize) -> Result<Vec<SpaceSpec>> {
        let mut out = Vec::new();
        for e in &self.entries {
            out.extend(e.smallest_instances(count)?);
        }
        Ok(out)
    }
}

fn search_instance(e: &CatalogEntry, key: &str) -> Option<SpaceSpec> {
    let mut combos: Vec<Vec<i64>> = vec![vec![]];
    for p in &e.params {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                (p.min..=RESOLVE_PARAM_BOUND.max(p.min)).map(move |v| {
                    let mut c = c.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    combos.into_iter().find_map(|c| {
        let env: Vec<(String, i64)> = e
            .params
            .iter()
            .zip(&c)
            .map(|(p, v)| (p.name.clone(), *v))
            .collect();
        let name = e.instance_name(&env).ok()?;
        (name_key(&name) == key)
            .then(|| e.instantiate(&env).ok())
            .flatten()
    })
}

fn parse_row(body: &str, line: usize) -> Result<CatalogEntry> {
    let perr = |msg: String| Error::Parse { line, msg };
    let cols: Vec<String> = body.split('|').map(|c| c.trim().to_string()).collect();
    if !(8..=9).contains(&cols.len()) {
        return Err(perr(format!(
            "expected 8 or 9 columns, found {}",
            cols.len()
        )));
    }
    let expr = |s: &str| Expr::parse(s).map_err(|e| perr(e.to_string()));

    let template = cols[0].clone();
    let family_id = render_template(&template, None).map_err(|e| perr(e.to_string()))?;

    let mut params = Vec::new();
    for p in cols[1].split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, min) = p
            .split_once(">=")
            .ok_or_else(|| perr(format!("parameter range `{p}` must read name>=min")))?;
        let min = min
            .trim()
            .parse()
            .map_err(|_| perr(format!("bad lower bound in `{p}`")))?;
        params.push(ParamRange {
            name: name.trim().into(),
            min,
        });
    }

    let ratios = if cols[5].contains(':') {
        cols[5]
            .split(';')
            .map(|part| {
                let (a, dim) = part
                    .split_once(':')
                    .ok_or_else(|| perr(format!("ratio `{part}` must read a:dim")))?;
                Ok(RatioExpr {
                    a: expr(a)?,
                    dim: Some(expr(dim)?),
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![RatioExpr {
            a: expr(&cols[5])?,
            dim: None,
        }]
    };

    let mut flags = Flags::default();
    let mut table = String::new();
    for f in cols[6].split(',').map(str::trim).filter(|f| !f.is_empty()) {
        match f {
            "symmetric" => flags.symmetric = true,
            "irreducible" => flags.irreducible = true,
            "provisional" => flags.provisional = true,
            // derived from the ratios; accepted for readability
            "abelian" => {}
            t if t.starts_with("table=") => table = t[6..].to_string(),
            other => return Err(perr(format!("unknown flag `{other}`"))),
        }
    }

    let cond2 = if cols[7] == "-" {
        None
    } else {
        Some(parse_clauses(&cols[7]).map_err(perr)?)
    };
    let kappa = match cols.get(8) {
        Some(k) if !k.is_empty() => Some(expr(k)?),
        _ => None,
    };

    // every variable must be a declared parameter
    let mut vars = Vec::new();
    for e in [&expr(&cols[2])?, &expr(&cols[3])?, &expr(&cols[4])?] {
        e.vars(&mut vars);
    }
    for r in &ratios {
        r.a.vars(&mut vars);
    }
    if let Some(u) = vars.iter().find(|v| !params.iter().any(|p| &p.name == *v)) {
        return Err(perr(format!("undeclared parameter `{u}`")));
    }

    Ok(CatalogEntry {
        template,
        family_id,
        params,
        table,
        line,
        flags,
        dim_h: expr(&cols[2])?,
        d: expr(&cols[3])?,
        n: expr(&cols[4])?,
        ratios,
        cond2,
        kappa,
        raw: cols,
    })
}

fn parse_clauses(s: &str) -> std::result::Result<Vec<Clause>, String> {
    let mut out = Vec::new();
    for part in s.split(';').map(str::trim) {
        let (value, cond) = match part.split_once('@') {
            Some((v, c)) => (v.trim(), Some(c)),
            None => (part, None),
        };
        let value = Cond2::parse(value).ok_or(format!("bad cond2 value `{value}`"))?;
        let mut when = Vec::new();
        if let Some(c) = cond {
            for atom in c.split('&').map(str::trim) {
                let (op, cmp) = [
                    (">=", Cmp::Ge),
                    ("<=", Cmp::Le),
                    ("=", Cmp::Eq),
                    (">", Cmp::Gt),
                    ("<", Cmp::Lt),
                ]
                .into_iter()
                .find(|(op, _)| atom.contains(op))
                .ok_or(format!("bad condition `{atom}`"))?;
                let (var, rhs) = atom.split_once(op).unwrap();
                let rhs = rhs
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad condition `{atom}`"))?;
                when.push((var.trim().to_string(), cmp, rhs));
            }
        }
        out.push(Clause { value, when });
    }
    Ok(out)
}

/// (2κ+1)² − 8a(1−a+κ), exactly.
pub fn discriminant(spec: &SpaceSpec) -> Result<Rational> {
    let a = spec.require_uniform()?;
    let k = spec.kappa;
    let t = int(2) * k + Rational::one();
    Ok(t * t - int(8) * a * (Rational::one() - a + k))
}

pub fn existence_condition(spec: &SpaceSpec) -> Result<Cond2Status> {
    if spec.flags.abelian_k {
        return Ok(Cond2Status {
            strict: true,
            equality: false,
        });
    }
    let s = sign(&discriminant(spec)?);
    Ok(Cond2Status {
        strict: s > 0,
        equality: s == 0,
    })
}

/// Coefficients (A, B, C) of q(a) = A a² + B a + C, which equals n² times the
/// discriminant once κ = (1−a)d/n is substituted.
pub fn quadratic_form_q(n: i64, d: i64) -> (i128, i128, i128) {
    let (n, d) = (n as i128, d as i128);
    (
        4 * (2 * n * n + 2 * n * d + d * d),
        -4 * (2 * n * n + 3 * n * d + 2 * d * d),
        (n + 2 * d) * (n + 2 * d),
    )
}

pub fn q_eval(n: i64, d: i64, a: Rational) -> Rational {
    let (qa, qb, qc) = quadratic_form_q(n, d);
    Rational::from_integer(qa) * a * a + Rational::from_integer(qb) * a + Rational::from_integer(qc)
}

/// Ratios as `a` or `a_0:d_0;a_1:d_1`.
pub fn fmt_ratios(spec: &SpaceSpec) -> String {
    if spec.killing_ratios.len() == 1 {
        return fmt_rational(&spec.killing_ratios[0].a);
    }
    spec.killing_ratios
        .iter()
        .map(|b| format!("{}:{}", fmt_rational(&b.a), b.dim))
        .collect::<Vec<_>>()
        .join(";")
}
