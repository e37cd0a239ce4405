//! Radial decreasing rearrangement of sampled densities, and the comparison
//! of a slope-limited radial profile `F` against the plateau-ramp profile
//! `Ψ_s` with the same `b`-th moment: `∫ r^d F >= ∫ r^d Ψ_s` for `d >= b`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::profile::PiecewiseLinear;
use super::{sweep_min, LemmaReport};
use crate::error::LemmaError;
use crate::geometry::unit_ball_volume;
use crate::numeric::solve_increasing;

/// Step profile: `values[i]` on the shell ending at `radii[i]`, values decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub cell_measure: f64,
}

impl RadialProfile {
    /// Total mass `Σ values · cell_measure`.
    pub fn mass(&self) -> f64 {
        crate::numeric::sum(self.values.iter().map(|v| v * self.cell_measure))
    }
}

/// Sorts samples of equal cell measure in decreasing order and places them on
/// concentric shells of that measure in `R^n`.
pub fn decreasing_rearrangement(values: &[f64], cell_measure: f64, n: usize) -> Result<RadialProfile, LemmaError> {
    let omega = unit_ball_volume(n)?;
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let radii = (1..=sorted.len()).map(|i| (i as f64 * cell_measure / omega).powf(1.0 / n as f64)).collect();
    Ok(RadialProfile { radii, values: sorted, cell_measure })
}

/// `Ψ_s(r)`: `M` up to `s`, then slope `-L` down to zero at `s + M/L`.
pub fn plateau_ramp(m: f64, l: f64, s: f64, r: f64) -> f64 {
    if r <= s {
        m
    } else if r <= s + m / l {
        m - l * (r - s)
    } else {
        0.0
    }
}

fn plateau_ramp_profile(m: f64, l: f64, s: f64) -> PiecewiseLinear {
    let mut points = vec![(0.0, m)];
    if s > 0.0 {
        points.push((s, m));
    }
    points.push((s + m / l, 0.0));
    PiecewiseLinear::new(points).expect("plateau-ramp profile is valid")
}

/// Outcome of one comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateauRampComparison {
    pub s: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Matches `s` to the `b`-th moment of `f`, then compares `d`-th moments.
pub fn plateau_ramp_compare(f: &PiecewiseLinear, m: f64, l: f64, b: f64, d: f64) -> Result<PlateauRampComparison, LemmaError> {
    if !(m > 0.0 && l > 0.0) {
        return Err(LemmaError::InvalidProfile(format!("M = {m} and L = {l} must be positive")));
    }
    if d < b {
        return Err(LemmaError::InvalidProfile(format!("d = {d} must be at least b = {b}")));
    }
    if f.initial_value() > m * (1.0 + 1e-12) {
        return Err(LemmaError::InvalidProfile(format!("profile exceeds M = {m}")));
    }
    if f.max_descent() > l * (1.0 + 1e-12) {
        return Err(LemmaError::InvalidProfile(format!("profile descends faster than L = {l}")));
    }
    let target = f.moment(b);
    let at_zero = plateau_ramp_profile(m, l, 0.0).moment(b);
    let s = if target <= at_zero {
        if target < at_zero * (1.0 - 1e-12) {
            return Err(LemmaError::NoMatchingShift(format!("moment {target} below the s = 0 value {at_zero}")));
        }
        0.0
    } else {
        solve_increasing(|s| plateau_ramp_profile(m, l, s).moment(b), target, 0.0, m / l)
            .ok_or_else(|| LemmaError::NoMatchingShift(format!("moment {target}")))?
    };
    Ok(PlateauRampComparison { s, lhs: f.moment(d), rhs: plateau_ramp_profile(m, l, s).moment(d) })
}

pub const PLATEAU_RAMP_TOLERANCE: f64 = 1e-9;

/// Single comparison as a report; the gap is `(LHS - RHS) / LHS`.
pub fn plateau_ramp_check(f: &PiecewiseLinear, m: f64, l: f64, b: f64, d: f64) -> Result<LemmaReport, LemmaError> {
    let c = plateau_ramp_compare(f, m, l, b, d)?;
    let inputs = json!({"M": m, "L": l, "b": b, "d": d, "s": c.s, "lhs": c.lhs, "rhs": c.rhs});
    Ok(LemmaReport::from_worst("rearrangement", 1, Some(((c.lhs - c.rhs) / c.lhs, inputs)), PLATEAU_RAMP_TOLERANCE))
}

/// Random `F` with `F(0) = M` and descent at most `L`, so a matching `s >= 0` exists.
pub fn random_radial_profile<R: Rng>(rng: &mut R, m: f64, l: f64) -> PiecewiseLinear {
    let drops = rng.gen_range(1..=20usize);
    let mut levels: Vec<f64> = (0..drops - 1).map(|_| rng.gen::<f64>()).collect();
    levels.sort_by(f64::total_cmp);
    levels.push(1.0);
    let mut points = vec![(0.0, m)];
    let (mut t, mut prev) = (0.0f64, 0.0f64);
    for u in levels {
        if rng.gen_bool(0.3) {
            t += rng.gen_range(0.0..3.0) * m / l;
            if t > points.last().expect("nonempty").0 {
                points.push((t, m * (1.0 - prev)));
            }
        }
        let drop = m * (u - prev);
        if drop <= 0.0 {
            continue;
        }
        let slope = (rng.gen::<f64>() * l).max(1e-3 * l);
        t += drop / slope;
        points.push((t, if u >= 1.0 { 0.0 } else { m * (1.0 - u) }));
        prev = u;
    }
    PiecewiseLinear::new(points).expect("generator builds valid profiles")
}

/// Seeded sweep with `b = n - 1`, `d = n - 1 + 2lq`, `n ∈ 2..=6`, `l ∈ 1..=3`, `q ∈ (0, 1]`.
pub fn plateau_ramp_sweep(seed: u64, samples: usize) -> LemmaReport {
    let worst = sweep_min(seed, samples, |rng| {
        let n = rng.gen_range(2..=6u32);
        let order = rng.gen_range(1..=3u32);
        let q = 1.0 - rng.gen::<f64>();
        let m = rng.gen_range(0.1..10.0);
        let l = rng.gen_range(0.1..10.0);
        let f = random_radial_profile(rng, m, l);
        let b = n as f64 - 1.0;
        let d = b + 2.0 * order as f64 * q;
        let c = plateau_ramp_compare(&f, m, l, b, d).expect("generated profiles admit a matching s");
        let inputs = json!({"n": n, "l": order, "q": q, "M": m, "L": l, "s": c.s, "breakpoints": f.points().len()});
        ((c.lhs - c.rhs) / c.lhs, inputs)
    });
    LemmaReport::from_worst("rearrangement", samples, worst, PLATEAU_RAMP_TOLERANCE)
}
