//! For a density `0 <= β <= 1` with unit mass, the shift `δ >= 0` with
//! `∫_δ^{δ+1} t^n dt = ∫ t^n β` also satisfies
//! `∫_δ^{δ+1} t^{n+2l} dt <= ∫ t^{n+2l} β`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::LemmaReport;
use crate::error::LemmaError;
use crate::numeric::{integrate, integrate_to_infinity, solve_increasing};

/// Densities on `[0, ∞)` with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Beta {
    /// Indicator of `[start, end]`.
    Indicator { start: f64, end: f64 },
    /// `rate · e^{-rate t}` with `0 < rate <= 1`.
    Exponential { rate: f64 },
    /// Linear interpolation of `(t, β)` pairs, zero outside.
    PiecewiseLinear { points: Vec<(f64, f64)> },
}

const QUAD_TOL: f64 = 1e-13;

impl Beta {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Beta::Indicator { start, end } => {
                if (*start..=*end).contains(&t) {
                    1.0
                } else {
                    0.0
                }
            }
            Beta::Exponential { rate } => {
                if t < 0.0 {
                    0.0
                } else {
                    rate * (-rate * t).exp()
                }
            }
            Beta::PiecewiseLinear { points } => {
                let i = points.partition_point(|p| p.0 <= t);
                if i == 0 || i == points.len() {
                    return if i == points.len() && points.last().map(|p| p.0) == Some(t) { points[i - 1].1 } else { 0.0 };
                }
                let (a, fa) = points[i - 1];
                let (b, fb) = points[i];
                fa + (fb - fa) * (t - a) / (b - a)
            }
        }
    }

    /// `∫_0^∞ t^m β(t) dt` by adaptive quadrature over the pieces.
    pub fn moment(&self, m: f64) -> f64 {
        let f = |t: f64| t.powf(m) * self.value(t);
        match self {
            Beta::Indicator { start, end } => integrate(f, *start, *end, 0.0, QUAD_TOL).0,
            Beta::Exponential { .. } => integrate_to_infinity(f, 0.0, 0.0, QUAD_TOL).0,
            Beta::PiecewiseLinear { points } => points.windows(2).map(|w| integrate(f, w[0].0, w[1].0, 0.0, QUAD_TOL).0).sum(),
        }
    }

    pub fn validate(&self) -> Result<(), LemmaError> {
        let bad = |msg: String| Err(LemmaError::InvalidDensity(msg));
        match self {
            Beta::Indicator { start, end } => {
                if !(start.is_finite() && *start >= 0.0 && (end - start - 1.0).abs() <= 1e-9) {
                    return bad(format!("indicator of [{start}, {end}] needs start >= 0 and unit length"));
                }
            }
            Beta::Exponential { rate } => {
                if !(*rate > 0.0 && *rate <= 1.0) {
                    return bad(format!("exponential rate {rate} outside (0, 1]"));
                }
            }
            Beta::PiecewiseLinear { points } => {
                if points.len() < 2 || points[0].0 < 0.0 || points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return bad("breakpoints must start at t >= 0 and increase".into());
                }
                if points.iter().any(|p| !(0.0..=1.0).contains(&p.1)) {
                    return bad("values must lie in [0, 1]".into());
                }
                let mass = self.moment(0.0);
                if (mass - 1.0).abs() > 1e-9 {
                    return bad(format!("total mass {mass} differs from 1"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftResult {
    pub delta: f64,
    /// `∫_δ^{δ+1} t^n dt - ∫ t^n β`.
    pub matching_residual: f64,
    /// `∫ t^{n+2l} β - ∫_δ^{δ+1} t^{n+2l} dt`, nonnegative when the inequality holds.
    pub slack: f64,
    /// `∫ t^{n+2l} β`, the scale of `slack`.
    pub scale: f64,
}

fn window_moment(delta: f64, m: i32) -> f64 {
    let p = m + 1;
    ((delta + 1.0).powi(p) - delta.powi(p)) / p as f64
}

/// Finds the shift for `β` and evaluates both sides of the higher-moment inequality.
pub fn shift_check(beta: &Beta, n: u32, l: u32) -> Result<ShiftResult, LemmaError> {
    beta.validate()?;
    let (n, l) = (n as i32, l as i32);
    let target = beta.moment(n as f64);
    let base = window_moment(0.0, n);
    let delta = if target <= base {
        // the window moment is smallest at δ = 0; equality up to quadrature error
        if target < base * (1.0 - 1e-9) {
            return Err(LemmaError::NoMatchingShift(format!("moment {target} below the minimum {base}")));
        }
        0.0
    } else {
        solve_increasing(|d| window_moment(d, n), target, 0.0, 1.0)
            .ok_or_else(|| LemmaError::NoMatchingShift(format!("moment {target}")))?
    };
    let scale = beta.moment((n + 2 * l) as f64);
    Ok(ShiftResult {
        delta,
        matching_residual: window_moment(delta, n) - target,
        slack: scale - window_moment(delta, n + 2 * l),
        scale,
    })
}

pub const SHIFT_TOLERANCE: f64 = 1e-10;

/// The indicator of `[0, 1]`, the indicator of `[1.5, 2.5]` and `e^{-t}`, for the given `n`, `l`.
pub fn shift_suite(n: u32, l: u32) -> Result<LemmaReport, LemmaError> {
    let profiles = [
        ("indicator[0,1]", Beta::Indicator { start: 0.0, end: 1.0 }),
        ("indicator[1.5,2.5]", Beta::Indicator { start: 1.5, end: 2.5 }),
        ("exp(-t)", Beta::Exponential { rate: 1.0 }),
    ];
    let mut worst: Option<(f64, serde_json::Value)> = None;
    for (name, beta) in &profiles {
        let r = shift_check(beta, n, l)?;
        let mut gap = r.slack / r.scale;
        let residual = (r.matching_residual / r.scale).abs();
        if residual > SHIFT_TOLERANCE {
            gap = gap.min(-residual);
        }
        if worst.as_ref().is_none_or(|w| gap < w.0) {
            worst = Some((gap, json!({"beta": name, "n": n, "l": l, "delta": r.delta})));
        }
    }
    Ok(LemmaReport::from_worst("shift", profiles.len(), worst, SHIFT_TOLERANCE))
}
