//! Ricci flow ẋ_i = −2 r_i x_i on diagonal metrics, optionally volume
//! normalized: ẋ_i = −2 (r_i − scal/dim) x_i.

use crate::catalog::SpaceSpec;
use crate::diagonal::{ricci_diagonal, scalar_diagonal, unit_volume, volume_scale, DiagonalMetric};
use crate::einstein::{solve_diagonal, EinsteinSolution, Label};
use crate::error::{Error, Result};
use crate::lie::{closed_ricci_diagonal, diagonal_gram, ricci_bruteforce, DoubledSpace};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowState {
    pub t: f64,
    pub x: [f64; 3],
}

#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    pub normalized: bool,
    pub rtol: f64,
    pub atol: f64,
    pub floor: f64,
    pub ceiling: f64,
    pub max_steps: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            normalized: true,
            rtol: 1e-9,
            atol: 1e-12,
            floor: 1e-8,
            ceiling: 1e8,
            max_steps: 200_000,
        }
    }
}

/// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince trial step: the 5th-order update and the embedded
/// error estimate.
pub fn dopri_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    for s in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..N {
                ys[i] += h * A[s][j] * kj[i];
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; N];
    for s in 0..7 {
        for i in 0..N {
            y5[i] += h * B5[s] * k[s][i];
            err[i] += h * (B5[s] - B4[s]) * k[s][i];
        }
    }
    (y5, err)
}

/// Adaptive integration of y' = f(t, y) from t0 to t1. `check` may stop the
/// run on each accepted state; `visit` sees every accepted state.
pub fn integrate_adaptive<const N: usize, F, V>(
    f: &F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    rtol: f64,
    atol: f64,
    max_steps: usize,
    mut visit: V,
) -> std::result::Result<[f64; N], (f64, [f64; N], &'static str)>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    V: FnMut(f64, &[f64; N]) -> std::result::Result<(), &'static str>,
{
    let (mut t, mut y) = (t0, y0);
    if t1 <= t0 {
        return Ok(y);
    }
    let mut h = ((t1 - t0) * 1e-3).min(1e-2);
    for _ in 0..max_steps {
        if t >= t1 {
            return Ok(y);
        }
        h = h.min(t1 - t);
        let (yn, e) = dopri_step(f, t, &y, h);
        let mut err: f64 = 0.0;
        for i in 0..N {
            let sc = atol + rtol * y[i].abs().max(yn[i].abs());
            err = err.max((e[i] / sc).abs());
        }
        if !err.is_finite() || yn.iter().any(|v| !v.is_finite()) {
            h *= 0.2;
            if h < 1e-14 * t.abs().max(1.0) {
                return Err((t, y, "non-finite state"));
            }
            continue;
        }
        if err <= 1.0 {
            t = if t1 - t - h <= 1e-15 * t1.abs().max(1.0) {
                t1
            } else {
                t + h
            };
            y = yn;
            visit(t, &y).map_err(|w| (t, y, w))?;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < 1e-14 * t.abs().max(1.0) {
            return Err((t, y, "step size underflow"));
        }
    }
    Err((t, y, "step limit reached"))
}

/// Right-hand side of the (normalized) flow.
pub fn vector_field(spec: &SpaceSpec, x: &[f64; 3], normalized: bool) -> [f64; 3] {
    let g = DiagonalMetric {
        x1: x[0],
        x2: x[1],
        x3: x[2],
    };
    let r = ricci_diagonal(spec, &g);
    let rs = [r.r1, r.r2, r.r3[0]];
    let shift = if normalized {
        scalar_diagonal(spec, &g) / spec.dim_m() as f64
    } else {
        0.0
    };
    [
        -2.0 * (rs[0] - shift) * x[0],
        -2.0 * (rs[1] - shift) * x[1],
        -2.0 * (rs[2] - shift) * x[2],
    ]
}

fn log_volume(spec: &SpaceSpec, x: &[f64; 3]) -> f64 {
    let (n, d) = (spec.n as f64, spec.d as f64);
    n * (x[0].ln() + x[1].ln()) + d * x[2].ln()
}

/// Rescale so that x1^n x2^n x3^d equals exp(`target`).
fn reproject(spec: &SpaceSpec, x: &mut [f64; 3], target: f64) {
    let s = ((target - log_volume(spec, x)) / spec.dim_m() as f64).exp();
    for v in x.iter_mut() {
        *v *= s;
    }
}

fn check_state(opts: &FlowOptions, x: &[f64; 3]) -> std::result::Result<(), &'static str> {
    if x.iter().any(|&v| v <= opts.floor) {
        return Err("floor breach");
    }
    if x.iter().any(|&v| v >= opts.ceiling || !v.is_finite()) {
        return Err("blow-up");
    }
    Ok(())
}

fn flow_error(t: f64, x: [f64; 3], what: &'static str) -> Error {
    Error::Flow { t, x, what }
}

/// Advance by `dt` with adaptive sub-steps; in normalized mode the volume is
/// re-projected after every accepted step.
pub fn flow_step(spec: &SpaceSpec, s: FlowState, dt: f64, opts: &FlowOptions) -> Result<FlowState> {
    let mut out = s;
    integrate(spec, s, s.t + dt, opts, |st| {
        out = *st;
    })?;
    Ok(out)
}

/// Integrate to `t_end`, calling `visit` on each accepted state.
pub fn integrate<V: FnMut(&FlowState)>(
    spec: &SpaceSpec,
    s: FlowState,
    t_end: f64,
    opts: &FlowOptions,
    mut visit: V,
) -> Result<FlowState> {
    spec.require_uniform()?;
    if !(t_end >= s.t) {
        return Err(Error::Flow {
            t: s.t,
            x: s.x,
            what: "end time precedes start",
        });
    }
    check_state(opts, &s.x).map_err(|w| flow_error(s.t, s.x, w))?;
    let target = log_volume(spec, &s.x);
    let f = |_t: f64, x: &[f64; 3]| vector_field(spec, x, opts.normalized);
    visit(&s);
    let mut t = s.t;
    let mut x = s.x;
    // normalized mode steps segment by segment so the projection can act
    // between accepted steps without disturbing the error control
    while t < t_end {
        let mut last = (t, x);
        let res = integrate_adaptive(
            &f,
            t,
            x,
            t_end,
            opts.rtol,
            opts.atol,
            opts.max_steps,
            |tt, y| {
                check_state(opts, y)?;
                last = (tt, *y);
                if opts.normalized
                    && (log_volume(spec, y) - target).abs() > 1e-11 * target.abs().max(1.0)
                {
                    return Err("reproject");
                }
                visit(&FlowState { t: tt, x: *y });
                Ok(())
            },
        );
        match res {
            Ok(y) => {
                t = t_end;
                x = y;
            }
            Err((_, _, "reproject")) => {
                let (tt, mut y) = last;
                reproject(spec, &mut y, target);
                visit(&FlowState { t: tt, x: y });
                t = tt;
                x = y;
            }
            Err((tt, y, w)) => return Err(flow_error(tt, y, w)),
        }
    }
    Ok(FlowState { t, x })
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub scal: f64,
}

/// States at every accepted step.
pub fn trajectory(
    spec: &SpaceSpec,
    s: FlowState,
    t_end: f64,
    opts: &FlowOptions,
) -> Result<Vec<TrajectoryPoint>> {
    let mut pts = Vec::new();
    integrate(spec, s, t_end, opts, |st| {
        let g = DiagonalMetric {
            x1: st.x[0],
            x2: st.x[1],
            x3: st.x[2],
        };
        pts.push(TrajectoryPoint {
            t: st.t,
            x1: st.x[0],
            x2: st.x[1],
            x3: st.x[2],
            scal: scalar_diagonal(spec, &g),
        });
    })?;
    Ok(pts)
}

/// |log(x3 / (2 x1 x2/(x1 + x2)))|: zero exactly on the normal curve.
pub fn normal_curve_distance(x: &[f64; 3]) -> f64 {
    (x[2] / (2.0 * x[0] * x[1] / (x[0] + x[1]))).ln().abs()
}

/// Largest drop of scal between consecutive states of a normalized run.
pub fn scal_max_drop(pts: &[TrajectoryPoint]) -> f64 {
    pts.windows(2)
        .map(|w| w[0].scal - w[1].scal)
        .fold(0.0, f64::max)
}

/// Runs the unnormalized flow together with τ' = c(t), c = (V0/V)^{1/dim},
/// and compares c·g(t) with the normalized flow at τ. Returns the largest
/// relative deviation over the sampled times.
pub fn rescaling_deviation(
    spec: &SpaceSpec,
    x0: [f64; 3],
    t_end: f64,
    samples: usize,
) -> Result<f64> {
    spec.require_uniform()?;
    let dim = spec.dim_m() as f64;
    let lv0 = log_volume(spec, &x0);
    let opts = FlowOptions::default();
    let f = |_t: f64, y: &[f64; 4]| {
        let x = [y[0], y[1], y[2]];
        let v = vector_field(spec, &x, false);
        [v[0], v[1], v[2], ((lv0 - log_volume(spec, &x)) / dim).exp()]
    };
    let mut y = [x0[0], x0[1], x0[2], 0.0];
    let mut s = FlowState { t: 0.0, x: x0 };
    let mut worst: f64 = 0.0;
    let norm_opts = FlowOptions {
        rtol: 1e-11,
        atol: 1e-14,
        ..opts
    };
    for k in 1..=samples {
        let t1 = t_end * k as f64 / samples as f64;
        let t0 = t_end * (k - 1) as f64 / samples as f64;
        y = integrate_adaptive(&f, t0, y, t1, 1e-11, 1e-14, opts.max_steps, |_, _| Ok(()))
            .map_err(|(t, y, w)| flow_error(t, [y[0], y[1], y[2]], w))?;
        let x = [y[0], y[1], y[2]];
        let c = ((lv0 - log_volume(spec, &x)) / dim).exp();
        s = flow_step(spec, s, y[3] - s.t, &norm_opts)?;
        for i in 0..3 {
            worst = worst.max((c * x[i] / s.x[i] - 1.0).abs());
        }
    }
    Ok(worst)
}

/// max over blocks of |closed r_i − brute-force Ricci operator| at random
/// states (log-uniform in [0.2, 5]).
pub fn oracle_spot_check<R: Rng>(
    spec: &SpaceSpec,
    ds: &DoubledSpace,
    rng: &mut R,
    states: usize,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..states {
        let mut x = [0.0; 3];
        for v in x.iter_mut() {
            *v = rng.gen_range((0.2f64).ln()..(5.0f64).ln()).exp();
        }
        let g = DiagonalMetric {
            x1: x[0],
            x2: x[1],
            x3: x[2],
        };
        let brute = ricci_bruteforce(ds, &diagonal_gram(ds, &g))?;
        let closed = closed_ricci_diagonal(ds, spec, &g)?;
        let dev = (brute - closed).amax();
        worst = worst.max(dev);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasinLabel {
    ConvergesNearGPlus,
    ConvergesNearGMinus,
    Escapes,
    FloorHit,
}

impl BasinLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            BasinLabel::ConvergesNearGPlus => "converges-near-g+",
            BasinLabel::ConvergesNearGMinus => "converges-near-g-",
            BasinLabel::Escapes => "escapes",
            BasinLabel::FloorHit => "floor-hit",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BasinMap {
    pub space_id: String,
    /// x1 = x2 axis values (unit volume fixes x3)
    pub axis: Vec<f64>,
    /// labels[i][j] for x1 = axis[i], x2 = axis[j]
    pub labels: Vec<Vec<BasinLabel>>,
}

impl BasinMap {
    pub fn count(&self, l: BasinLabel) -> usize {
        self.labels.iter().flatten().filter(|&&v| v == l).count()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BasinOptions {
    pub t_max: f64,
    pub near: f64,
}

impl Default for BasinOptions {
    fn default() -> Self {
        BasinOptions {
            t_max: 60.0,
            near: 1e-3,
        }
    }
}

/// max |log(x_i / y_i)| after both are scaled to unit volume.
pub fn scale_free_distance(spec: &SpaceSpec, x: &[f64; 3], y: &[f64; 3]) -> f64 {
    let sx = volume_scale(
        spec,
        &DiagonalMetric {
            x1: x[0],
            x2: x[1],
            x3: x[2],
        },
    );
    let sy = volume_scale(
        spec,
        &DiagonalMetric {
            x1: y[0],
            x2: y[1],
            x3: y[2],
        },
    );
    (0..3)
        .map(|i| ((x[i] / sx) / (y[i] / sy)).ln().abs())
        .fold(0.0, f64::max)
}

pub fn classify_endpoint(
    spec: &SpaceSpec,
    sols: &[EinsteinSolution],
    x: &[f64; 3],
    near: f64,
) -> BasinLabel {
    for s in sols {
        if scale_free_distance(spec, x, &[s.x1, s.x2, s.x3]) < near {
            return match s.label {
                Label::G2Minus | Label::Abelian => BasinLabel::ConvergesNearGMinus,
                _ => BasinLabel::ConvergesNearGPlus,
            };
        }
    }
    BasinLabel::Escapes
}

/// Normalized flow from every grid cell (x1, x2, unit volume) for t_max.
pub fn basin_sweep(spec: &SpaceSpec, axis: &[f64], bopts: &BasinOptions) -> Result<BasinMap> {
    let sols = solve_diagonal(spec)?;
    let opts = FlowOptions::default();
    let labels = axis
        .par_iter()
        .map(|&x1| {
            axis.iter()
                .map(|&x2| {
                    let g = unit_volume(spec, x1, x2);
                    let s = FlowState {
                        t: 0.0,
                        x: g.array(),
                    };
                    match integrate(spec, s, bopts.t_max, &opts, |_| {}) {
                        Ok(end) => classify_endpoint(spec, &sols, &end.x, bopts.near),
                        Err(Error::Flow {
                            what: "floor breach",
                            ..
                        }) => BasinLabel::FloorHit,
                        Err(_) => BasinLabel::Escapes,
                    }
                })
                .collect()
        })
        .collect();
    Ok(BasinMap {
        space_id: spec.id.clone(),
        axis: axis.to_vec(),
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;
    use crate::diagonal::{normal_to_diagonal, standard_metric, NormalMetric};

    fn su3() -> SpaceSpec {
        Catalog::builtin().resolve("SU(3)/SO(3)", &[]).unwrap()
    }

    #[test]
    fn dopri_exponential() {
        let f = |_t: f64, y: &[f64; 1]| [-y[0]];
        let y =
            integrate_adaptive(&f, 0.0, [1.0], 3.0, 1e-10, 1e-14, 10_000, |_, _| Ok(())).unwrap();
        assert!((y[0] - (-3.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn diagonal_line_invariant() {
        let s = su3();
        let st = FlowState {
            t: 0.0,
            x: [1.3, 1.3, 0.4],
        };
        let mut worst: f64 = 0.0;
        integrate(&s, st, 10.0, &FlowOptions::default(), |p| {
            worst = worst.max((p.x[0] - p.x[1]).abs())
        })
        .unwrap();
        assert!(worst < 1e-10);
    }

    #[test]
    fn normalized_preserves_volume() {
        let s = su3();
        let st = FlowState {
            t: 0.0,
            x: [1.3, 0.8, 0.4],
        };
        let v0 = log_volume(&s, &st.x);
        let end = integrate(&s, st, 3.0, &FlowOptions::default(), |_| {}).unwrap();
        assert!((log_volume(&s, &end.x) - v0).abs() < 1e-9);
    }

    #[test]
    fn einstein_points_stationary() {
        let s = su3();
        for sol in solve_diagonal(&s).unwrap() {
            let x0 = [sol.x1, sol.x2, sol.x3];
            let end = integrate(
                &s,
                FlowState { t: 0.0, x: x0 },
                10.0,
                &FlowOptions::default(),
                |_| {},
            )
            .unwrap();
            assert!(
                scale_free_distance(&s, &end.x, &x0) < 1e-8,
                "{:?}",
                sol.label
            );
        }
    }

    #[test]
    fn leaves_normal_curve() {
        let s = su3();
        let g = normal_to_diagonal(
            &NormalMetric {
                z1: 1.2,
                z2: 1.0 / 1.2,
            },
            &standard_metric(),
        );
        let st = FlowState {
            t: 0.0,
            x: g.array(),
        };
        assert!(normal_curve_distance(&st.x) < 1e-14);
        let mut left = false;
        integrate(&s, st, 2.0, &FlowOptions::default(), |p| {
            left |= normal_curve_distance(&p.x) > 1e-3
        })
        .unwrap();
        assert!(left);
    }

    #[test]
    fn unnormalized_reaches_floor() {
        let s = su3();
        let err = integrate(
            &s,
            FlowState {
                t: 0.0,
                x: [1.0; 3],
            },
            100.0,
            &FlowOptions {
                normalized: false,
                ..Default::default()
            },
            |_| {},
        );
        assert!(matches!(err, Err(Error::Flow { .. })));
    }

    #[test]
    fn rescaling_agrees() {
        let s = su3();
        assert!(rescaling_deviation(&s, [1.2, 0.9, 0.7], 0.3, 5).unwrap() < 1e-6);
    }

    #[test]
    fn scal_non_decreasing() {
        let s = su3();
        let pts = trajectory(
            &s,
            FlowState {
                t: 0.0,
                x: [1.5, 0.7, 1.1],
            },
            3.0,
            &FlowOptions::default(),
        )
        .unwrap();
        let scale = pts.iter().map(|p| p.scal.abs()).fold(0.0, f64::max);
        assert!(scal_max_drop(&pts) <= 1e-8 * scale);
    }

    #[test]
    fn basin_fixed_point_and_line() {
        let s = su3();
        let sols = solve_diagonal(&s).unwrap();
        let plus = &sols[0];
        let x = [plus.x1, plus.x2, plus.x3];
        assert_eq!(
            classify_endpoint(&s, &sols, &x, 1e-3),
            BasinLabel::ConvergesNearGPlus
        );
        let m = basin_sweep(
            &s,
            &crate::diagonal::log_axis(5, 0.5, 2.0),
            &BasinOptions::default(),
        )
        .unwrap();
        assert_eq!(m.labels.len(), 5);
    }
}
