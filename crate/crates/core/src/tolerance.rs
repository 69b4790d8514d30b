//! Pinned thresholds shared by the verification suite and the CLI.

pub const TABLE_ABS: f64 = 5e-4;
pub const RESIDUAL: f64 = 1e-10;
pub const RESIDUAL_ORACLE: f64 = 1e-9;
pub const RICCI_ORACLE: f64 = 1e-9;
pub const STRUCTURAL: f64 = 1e-10;
pub const CASIMIR: f64 = 1e-10;
pub const JACOBI: f64 = 1e-12;
pub const HESSIAN_REL: f64 = 1e-5;
pub const HESSIAN_STEP: f64 = 1e-5;
pub const NORMAL_FP: f64 = 1e-8;
pub const NORMAL_RESIDUAL_MIN: f64 = 1e-3;
pub const FLOW_LINE: f64 = 1e-10;
pub const FLOW_DEPART: f64 = 1e-3;
pub const FLOW_STATIONARY: f64 = 1e-8;
pub const FLOW_RESCALE: f64 = 1e-6;
