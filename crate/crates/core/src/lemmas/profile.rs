//! Slope-limited decreasing profiles and the moment inequality
//!
//! ```text
//! ∫ t^{n+2l-1} ψ >= (nA)^{1+2l/n} ψ(0)^{-2l/n} / (n+2l)
//!                 + 2lε/(n(n+2l)) (nA)^{1+(2l-1)/n} ψ(0)^{1-(2l-1)/n} / D
//!                 - 5l/(2n(n+2l)) (nA)^{1+(2l-2)/n} ψ(0)^{2-(2l-2)/n} / D²
//!                 + εl/(n(n+2l))  (nA)^{1+(2l-3)/n} ψ(0)^{3-(2l-3)/n} / D³
//! ```
//!
//! for `0 <= -ψ' <= D` and `A = ∫ t^{n-1} ψ`. The inequality is evaluated as
//! stated; it does not hold for every admissible profile (a plateau followed
//! by the steepest ramp already breaks it), and the sweep reports that.

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{sweep_min, LemmaReport};
use crate::error::LemmaError;

/// Continuous piecewise-linear function on `[0, ∞)` through `(t, value)`
/// breakpoints, starting at `t = 0` and reaching zero at the last one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    points: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    /// Validates a nonincreasing, nonnegative, compactly supported profile.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, LemmaError> {
        let bad = |msg: &str| Err(LemmaError::InvalidProfile(msg.to_string()));
        if points.len() < 2 {
            return bad("need at least two breakpoints");
        }
        if points[0].0 != 0.0 {
            return bad("first breakpoint must be at t = 0");
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return bad("breakpoints must be finite");
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return bad("breakpoints must strictly increase");
        }
        if points.windows(2).any(|w| w[1].1 > w[0].1) {
            return bad("profile must be nonincreasing");
        }
        if points.iter().any(|p| p.1 < 0.0) {
            return bad("profile must be nonnegative");
        }
        if points.last().map(|p| p.1) != Some(0.0) {
            return bad("profile must reach zero (compact support)");
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn initial_value(&self) -> f64 {
        self.points[0].1
    }

    pub fn support_end(&self) -> f64 {
        self.points.last().expect("nonempty").0
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.points[0].1;
        }
        let i = self.points.partition_point(|p| p.0 <= t);
        if i == self.points.len() {
            return 0.0;
        }
        let (a, fa) = self.points[i - 1];
        let (b, fb) = self.points[i];
        fa + (fb - fa) * (t - a) / (b - a)
    }

    /// Largest `-ψ'` over the pieces.
    pub fn max_descent(&self) -> f64 {
        self.points.windows(2).map(|w| (w[0].1 - w[1].1) / (w[1].0 - w[0].0)).fold(0.0, f64::max)
    }

    /// `∫_0^∞ t^m ψ(t) dt`, integrated exactly piece by piece.
    pub fn moment(&self, m: f64) -> f64 {
        let mut acc = crate::numeric::CompensatedSum::new();
        for w in self.points.windows(2) {
            let ((a, fa), (b, fb)) = (w[0], w[1]);
            let slope = (fb - fa) / (b - a);
            // ψ = fa + slope (t - a); integrate (fa - slope a) t^m + slope t^{m+1}
            let p1 = (b.powf(m + 1.0) - a.powf(m + 1.0)) / (m + 1.0);
            let p2 = (b.powf(m + 2.0) - a.powf(m + 2.0)) / (m + 2.0);
            // split so the difference (fa - slope a) is never formed for long pieces
            acc.add(fa * p1);
            acc.add(slope * (p2 - a * p1));
        }
        acc.value()
    }
}

/// A profile with its slope bound `D` and dimension `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleProfile {
    pub profile: PiecewiseLinear,
    pub slope_bound: f64,
    pub n: u32,
}

impl AdmissibleProfile {
    pub fn new(profile: PiecewiseLinear, slope_bound: f64, n: u32) -> Result<Self, LemmaError> {
        if !(slope_bound.is_finite() && slope_bound > 0.0) {
            return Err(LemmaError::InvalidProfile(format!("slope bound must be positive, got {slope_bound}")));
        }
        if n < 2 {
            return Err(LemmaError::InvalidProfile(format!("dimension must be at least 2, got {n}")));
        }
        if profile.initial_value() <= 0.0 {
            return Err(LemmaError::InvalidProfile("profile must be positive at the origin".into()));
        }
        let descent = profile.max_descent();
        if descent > slope_bound * (1.0 + 1e-12) {
            return Err(LemmaError::InvalidProfile(format!("descent {descent} exceeds slope bound {slope_bound}")));
        }
        Ok(Self { profile, slope_bound, n })
    }

    /// `A = ∫ t^{n-1} ψ`.
    pub fn mass(&self) -> f64 {
        self.profile.moment(self.n as f64 - 1.0)
    }

    /// Steepest admissible profile from `ψ(0)`: a plateau of the given length, then slope `-D` down to zero.
    pub fn plateau_ramp(psi0: f64, slope_bound: f64, plateau: f64, n: u32) -> Result<Self, LemmaError> {
        let mut points = vec![(0.0, psi0)];
        if plateau > 0.0 {
            points.push((plateau, psi0));
        }
        points.push((plateau + psi0 / slope_bound, 0.0));
        Self::new(PiecewiseLinear::new(points)?, slope_bound, n)
    }
}

/// Right side of the moment inequality.
pub fn moment_inequality_rhs(n: u32, l: u32, mass: f64, psi0: f64, slope_bound: f64, eps: f64) -> f64 {
    let n = n as f64;
    let l = l as f64;
    let na = n * mass;
    let nl = n + 2.0 * l;
    let d = slope_bound;
    na.powf(1.0 + 2.0 * l / n) * psi0.powf(-2.0 * l / n) / nl
        + 2.0 * l * eps / (n * nl) * na.powf(1.0 + (2.0 * l - 1.0) / n) * psi0.powf(1.0 - (2.0 * l - 1.0) / n) / d
        - 5.0 * l / (2.0 * n * nl) * na.powf(1.0 + (2.0 * l - 2.0) / n) * psi0.powf(2.0 - (2.0 * l - 2.0) / n) / (d * d)
        + eps * l / (n * nl) * na.powf(1.0 + (2.0 * l - 3.0) / n) * psi0.powf(3.0 - (2.0 * l - 3.0) / n) / (d * d * d)
}

/// `(LHS, RHS)` of the moment inequality.
pub fn moment_inequality_sides(profile: &AdmissibleProfile, l: u32, eps: f64) -> (f64, f64) {
    let lhs = profile.profile.moment((profile.n + 2 * l) as f64 - 1.0);
    let rhs = moment_inequality_rhs(profile.n, l, profile.mass(), profile.profile.initial_value(), profile.slope_bound, eps);
    (lhs, rhs)
}

pub const MOMENT_TOLERANCE: f64 = 1e-9;

/// Single-profile check; the gap is `(LHS - RHS) / LHS`.
pub fn moment_inequality_check(profile: &AdmissibleProfile, l: u32, eps: f64) -> Result<LemmaReport, LemmaError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(LemmaError::InvalidProfile(format!("epsilon {eps} outside (0, 1]")));
    }
    if l == 0 {
        return Err(LemmaError::InvalidProfile("order l must be at least 1".into()));
    }
    let (lhs, rhs) = moment_inequality_sides(profile, l, eps);
    let inputs = json!({
        "n": profile.n, "l": l, "eps": eps, "slope_bound": profile.slope_bound,
        "psi0": profile.profile.initial_value(), "lhs": lhs, "rhs": rhs,
    });
    Ok(LemmaReport::from_worst("moment", 1, Some(((lhs - rhs) / lhs, inputs)), MOMENT_TOLERANCE))
}

/// Random admissible profile with at most 64 breakpoints: drops at sorted
/// uniform levels, each taken at a random slope in `(0, D]`, with occasional flat stretches.
pub fn random_profile<R: Rng>(rng: &mut R, n: u32) -> AdmissibleProfile {
    let psi0 = rng.gen_range(0.1..10.0);
    let d = rng.gen_range(0.1..10.0);
    let drops = rng.gen_range(1..=31usize);
    let mut levels: Vec<f64> = (0..drops - 1).map(|_| rng.gen::<f64>()).collect();
    levels.sort_by(f64::total_cmp);
    levels.push(1.0);
    let width = psi0 / d;
    let mut points = vec![(0.0, psi0)];
    let (mut t, mut prev) = (0.0f64, 0.0f64);
    for u in levels {
        if rng.gen_bool(0.25) {
            t += rng.gen_range(0.0..2.0) * width;
            if t > points.last().expect("nonempty").0 {
                points.push((t, psi0 * (1.0 - prev)));
            }
        }
        let drop = psi0 * (u - prev);
        if drop <= 0.0 {
            continue;
        }
        let slope = (rng.gen::<f64>() * d).max(1e-3 * d);
        t += drop / slope;
        let value = if u >= 1.0 { 0.0 } else { psi0 * (1.0 - u) };
        points.push((t, value));
        prev = u;
    }
    let profile = PiecewiseLinear::new(points).expect("generator builds valid profiles");
    AdmissibleProfile::new(profile, d, n).expect("generator respects the slope bound")
}

/// Seeded sweep over random profiles with `n ∈ 2..=7`, `l ∈ 1..=4`.
pub fn moment_inequality_sweep(seed: u64, samples: usize, eps: f64) -> LemmaReport {
    let worst = sweep_min(seed, samples, |rng| {
        let n = rng.gen_range(2..=7u32);
        let l = rng.gen_range(1..=4u32);
        let p = random_profile(rng, n);
        let (lhs, rhs) = moment_inequality_sides(&p, l, eps);
        let inputs = json!({
            "n": n, "l": l, "eps": eps, "slope_bound": p.slope_bound,
            "breakpoints": p.profile.points().len(), "psi0": p.profile.initial_value(), "lhs": lhs, "rhs": rhs,
        });
        ((lhs - rhs) / lhs, inputs)
    });
    LemmaReport::from_worst("moment", samples, worst, MOMENT_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integrate;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_profiles() {
        assert!(PiecewiseLinear::new(vec![(0.0, 1.0)]).is_err());
        assert!(PiecewiseLinear::new(vec![(0.1, 1.0), (1.0, 0.0)]).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 1.0), (1.0, 0.5)]).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 1.0), (1.0, 2.0), (2.0, 0.0)]).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]).is_err());
        let p = PiecewiseLinear::new(vec![(0.0, 1.0), (0.5, 0.0)]).unwrap();
        assert!(AdmissibleProfile::new(p, 1.0, 2).is_err());
    }

    #[test]
    fn exact_moments_match_quadrature() {
        let p = PiecewiseLinear::new(vec![(0.0, 3.0), (0.7, 3.0), (1.1, 2.0), (4.0, 0.5), (4.2, 0.0)]).unwrap();
        for m in [0.0, 1.0, 2.5, 7.0] {
            let q = integrate(|t| t.powf(m) * p.value(t), 0.0, 4.2, 0.0, 1e-14).0;
            assert!((p.moment(m) - q).abs() < 1e-12 * q, "m = {m}");
        }
    }

    #[test]
    fn steepest_ramp_closed_form() {
        // ψ = ψ0 (1 - t/w) on [0, w]: ∫ t^m ψ = ψ0 w^{m+1} / ((m+1)(m+2))
        let (psi0, d) = (2.5, 0.8);
        let w = psi0 / d;
        let p = AdmissibleProfile::plateau_ramp(psi0, d, 0.0, 2).unwrap();
        assert!((p.mass() - psi0 * w.powi(2) / 6.0).abs() < 1e-13 * p.mass());
        let (lhs, rhs) = moment_inequality_sides(&p, 1, 1.0);
        assert!((lhs - psi0 * w.powi(4) / 20.0).abs() < 1e-13 * lhs);
        assert!(lhs >= rhs);
    }

    #[test]
    fn plateau_before_ramp_breaks_the_inequality() {
        // plateau length equal to the ramp width, n = 2, l = 1, ε = 1
        let p = AdmissibleProfile::plateau_ramp(1.0, 1.0, 1.0, 2).unwrap();
        let (lhs, rhs) = moment_inequality_sides(&p, 1, 1.0);
        assert!((lhs - 1.55).abs() < 1e-13);
        assert!((rhs - 1.713_941_484).abs() < 1e-8);
        let report = moment_inequality_check(&p, 1, 1.0).unwrap();
        assert!(!report.pass);
        assert!((report.worst_gap + 0.105_768_699_1).abs() < 1e-8);
    }

    #[test]
    fn smaller_eps_runs() {
        let p = AdmissibleProfile::plateau_ramp(1.0, 2.0, 0.0, 3).unwrap();
        let a = moment_inequality_check(&p, 1, 0.5).unwrap();
        let b = moment_inequality_check(&p, 1, 1.0).unwrap();
        assert!(a.worst_gap.is_finite() && b.worst_gap.is_finite());
        assert!(moment_inequality_check(&p, 1, 0.0).is_err());
    }

    #[test]
    fn sweep_is_reproducible() {
        assert_eq!(moment_inequality_sweep(42, 100, 1.0), moment_inequality_sweep(42, 100, 1.0));
    }

    proptest! {
        #[test]
        fn generated_profiles_are_admissible(seed in 0u64..1000) {
            let mut rng = super::super::sample_rng(seed, 0);
            let p = random_profile(&mut rng, 3);
            prop_assert!(p.profile.points().len() <= 64);
            prop_assert!(p.profile.max_descent() <= p.slope_bound * (1.0 + 1e-12));
        }

        #[test]
        fn gap_is_scale_invariant(psi0 in 0.1f64..10.0, d in 0.1f64..10.0, plateau in 0.0f64..3.0, c in 0.2f64..5.0, n in 2u32..6, l in 1u32..4) {
            // ψ -> c ψ(·/c) keeps the slope bound and scales both sides by c^{n+2l+1}
            let p = AdmissibleProfile::plateau_ramp(psi0, d, plateau, n).unwrap();
            let q = AdmissibleProfile::plateau_ramp(c * psi0, d, c * plateau, n).unwrap();
            let (a1, b1) = moment_inequality_sides(&p, l, 1.0);
            let (a2, b2) = moment_inequality_sides(&q, l, 1.0);
            let s = c.powi((n + 2 * l + 1) as i32);
            prop_assert!((a2 - s * a1).abs() <= 1e-10 * a2);
            prop_assert!((b2 - s * b1).abs() <= 1e-10 * a2.max(b2.abs()));
            prop_assert!(((a1 - b1) / a1 - (a2 - b2) / a2).abs() <= 1e-9);
        }
    }
}
