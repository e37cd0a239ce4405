//! Numerical checks of the auxiliary inequalities behind the bounds: a
//! polynomial inequality, the shift construction for bounded densities, the
//! moment inequality for slope-limited profiles, the Fourier-density
//! properties of box eigenfunctions, and the plateau-ramp rearrangement
//! comparison.
//!
//! Randomized sweeps draw sample `i` from a ChaCha8 stream `i` of the given
//! seed, so reports are bit-identical regardless of thread count.

pub mod fourier;
pub mod polynomial;
pub mod profile;
pub mod rearrangement;
pub mod shift;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use fourier::{fourier_density_box, FourierDensity, FrequencyGrid};
pub use polynomial::{polynomial_gap, polynomial_sweep};
pub use profile::{moment_inequality_check, moment_inequality_rhs, moment_inequality_sweep, AdmissibleProfile, PiecewiseLinear};
pub use rearrangement::{decreasing_rearrangement, plateau_ramp, plateau_ramp_check, plateau_ramp_compare, plateau_ramp_sweep, RadialProfile};
pub use shift::{shift_check, shift_suite, Beta, ShiftResult};

/// Outcome of one lemma check or sweep. `worst_gap` is the smallest signed
/// (normalized) slack seen, so the check passes when it is `>= -tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub samples: usize,
    pub worst_gap: f64,
    pub worst_case_inputs: Value,
    pub pass: bool,
}

impl LemmaReport {
    pub(crate) fn from_worst(lemma: &str, samples: usize, worst: Option<(f64, Value)>, tolerance: f64) -> Self {
        let (worst_gap, worst_case_inputs) = worst.unwrap_or((f64::INFINITY, Value::Null));
        Self { lemma: lemma.to_string(), samples, worst_gap, worst_case_inputs, pass: worst_gap >= -tolerance }
    }
}

/// Deterministic per-sample generator: stream `index` of `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `sample` for every index in parallel and keeps the smallest gap,
/// breaking ties by index.
pub(crate) fn sweep_min<F>(seed: u64, samples: usize, sample: F) -> Option<(f64, Value)>
where
    F: Fn(&mut ChaCha8Rng) -> (f64, Value) + Sync,
{
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let (gap, inputs) = sample(&mut rng);
            (gap, i, inputs)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(gap, _, inputs)| (gap, inputs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn sweep_is_order_independent() {
        let run = || sweep_min(7, 500, |rng| (rng.gen::<f64>(), Value::Null));
        let a = run().unwrap().0;
        let serial = (0..500).map(|i| sample_rng(7, i).gen::<f64>()).fold(f64::INFINITY, f64::min);
        assert_eq!(a, serial);
        assert_eq!(run().unwrap().0, a);
    }

    #[test]
    fn report_pass_flag() {
        let r = LemmaReport::from_worst("x", 1, Some((-1e-12, Value::Null)), 1e-9);
        assert!(r.pass);
        let r = LemmaReport::from_worst("x", 1, Some((-1e-6, Value::Null)), 1e-9);
        assert!(!r.pass);
        let json = serde_json::to_value(&r).unwrap();
        for key in ["lemma", "samples", "worst_gap", "worst_case_inputs", "pass"] {
            assert!(json.get(key).is_some());
        }
    }
}
