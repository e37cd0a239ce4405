//! `n t^{n+2l} - (n+2l) t^n s^{2l} + 2l s^{n+2l} >= (2l s^{n+2l-2} + 4l t s^{n+2l-3}) (s-t)^2`.

use rand::Rng;
use serde_json::json;

use super::{sweep_min, LemmaReport};

pub const POLYNOMIAL_TOLERANCE: f64 = 1e-9;

/// Left side minus right side; nonnegative for `s, t > 0`.
pub fn polynomial_gap(n: u32, l: u32, s: f64, t: f64) -> f64 {
    let (n, l) = (n as i32, l as i32);
    let nf = n as f64;
    let lf = l as f64;
    let lhs = nf * t.powi(n + 2 * l) - (nf + 2.0 * lf) * t.powi(n) * s.powi(2 * l) + 2.0 * lf * s.powi(n + 2 * l);
    let rhs = (2.0 * lf * s.powi(n + 2 * l - 2) + 4.0 * lf * t * s.powi(n + 2 * l - 3)) * (s - t).powi(2);
    lhs - rhs
}

/// Gap divided by `max(s, t)^{n+2l}`.
pub fn normalized_polynomial_gap(n: u32, l: u32, s: f64, t: f64) -> f64 {
    polynomial_gap(n, l, s, t) / s.max(t).powi((n + 2 * l) as i32)
}

/// Seeded sweep over `n ∈ 2..=10`, `l ∈ 1..=4`, `s, t ∈ (0, 10]`.
pub fn polynomial_sweep(seed: u64, samples: usize) -> LemmaReport {
    let worst = sweep_min(seed, samples, |rng| {
        let n = rng.gen_range(2..=10u32);
        let l = rng.gen_range(1..=4u32);
        let s = 10.0 * (1.0 - rng.gen::<f64>());
        let t = 10.0 * (1.0 - rng.gen::<f64>());
        (normalized_polynomial_gap(n, l, s, t), json!({"n": n, "l": l, "s": s, "t": t}))
    });
    LemmaReport::from_worst("polynomial", samples, worst, POLYNOMIAL_TOLERANCE)
}
