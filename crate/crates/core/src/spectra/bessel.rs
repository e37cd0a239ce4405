//! Integer-order Bessel functions `J_m`, `I_m` and the zeros needed for the
//! disk spectra.
//!
//! `J_m` uses the power series for `x <= 12`. Beyond that, `J_0` and `J_1`
//! come from the Hankel asymptotic expansion and higher orders from forward
//! recurrence while `m <= x`; for `m > x` Miller's backward recurrence with
//! the `J_0 + 2 Σ J_{2k} = 1` normalization takes over. `I_m` is summed
//! directly (all terms positive).

use std::f64::consts::PI;

use crate::error::SpectrumError;
use crate::numeric::bisect;

const SERIES_LIMIT: f64 = 12.0;

fn leading_term(m: u32, half_x: f64) -> f64 {
    // (x/2)^m / m!
    (1..=m).fold(1.0, |acc, k| acc * half_x / k as f64)
}

fn j_series(m: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let q = h * h;
    let mut term = leading_term(m, h);
    let mut sum = term;
    for k in 1..500 {
        term *= -q / (k as f64 * (k + m) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k as f64 > h {
            break;
        }
    }
    sum
}

fn hankel_j(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k(nu) / x^k
    let mut prev = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        }
        if a.abs() > prev {
            break;
        }
        prev = a.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn j_miller(m: u32, x: f64) -> f64 {
    let start = 2 * ((m.max(x as u32) + 30) / 2);
    let mut jp = 0.0;
    let mut j = 1e-250;
    let mut result = 0.0;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let jm = 2.0 * k as f64 / x * j - jp;
        jp = j;
        j = jm;
        if j.abs() > 1e200 {
            j *= 1e-200;
            jp *= 1e-200;
            result *= 1e-200;
            norm *= 1e-200;
        }
        if k - 1 == m {
            result = j;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * j;
        }
    }
    norm += j;
    result / norm
}

/// Bessel function of the first kind `J_m(x)` for `x >= 0`.
pub fn bessel_j(m: u32, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x <= SERIES_LIMIT {
        return j_series(m, x);
    }
    if (m as f64) > x {
        return j_miller(m, x);
    }
    let j0 = hankel_j(0, x);
    if m == 0 {
        return j0;
    }
    let mut jm1 = j0;
    let mut j = hankel_j(1, x);
    for k in 1..m {
        let next = 2.0 * k as f64 / x * j - jm1;
        jm1 = j;
        j = next;
    }
    j
}

/// Modified Bessel function of the first kind `I_m(x)`.
pub fn bessel_i(m: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let q = h * h;
    let mut term = leading_term(m, h);
    let mut sum = term;
    for k in 1..2000 {
        term *= q / (k as f64 * (k + m) as f64);
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    sum
}

const SCAN_STEP: f64 = 0.05;

/// Sign-change scan plus bisection of `f` on `[lo, hi)`, returning all roots.
fn scan_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, what: &str) -> Result<Vec<f64>, SpectrumError> {
    let mut roots = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    let mut i = 1u64;
    loop {
        let b = lo + i as f64 * SCAN_STEP;
        if b > hi {
            break;
        }
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            let r = bisect(&f, a, b).ok_or_else(|| SpectrumError::RootFinding(what.to_string()))?;
            if !r.is_finite() {
                return Err(SpectrumError::RootFinding(what.to_string()));
            }
            roots.push(r);
        }
        a = b;
        fa = fb;
        i += 1;
    }
    Ok(roots)
}

/// Positive zeros of `J_m` below `limit`, ascending.
pub fn bessel_j_zeros_below(m: u32, limit: f64) -> Result<Vec<f64>, SpectrumError> {
    // no zero of J_m lies below m
    let lo = (m as f64).max(SCAN_STEP);
    scan_roots(|x| bessel_j(m, x), lo, limit, &format!("J_{m} zeros"))
}

/// The clamped-plate frequency function `J_m I_{m+1} + I_m J_{m+1}`, divided
/// by `I_m I_{m+1}` so it stays O(1); zeros are unchanged.
pub fn clamped_frequency(m: u32, x: f64) -> f64 {
    bessel_j(m, x) / bessel_i(m, x) + bessel_j(m + 1, x) / bessel_i(m + 1, x)
}

/// Positive roots of the clamped-disk frequency equation for angular order
/// `m` below `limit`, ascending. Each exceeds the matching `J_m` zero, so the
/// scan starts at `m`.
pub fn clamped_roots_below(m: u32, limit: f64) -> Result<Vec<f64>, SpectrumError> {
    let lo = (m as f64).max(SCAN_STEP);
    scan_roots(|x| clamped_frequency(m, x), lo, limit, &format!("clamped frequency m={m}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: straight power series, no recurrences or asymptotics.
    fn oracle_j0(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            term *= -(x * x / 4.0) / (k * k) as f64;
            sum += term;
        }
        sum
    }

    fn oracle_bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        while b - a > 1e-12 {
            let c = 0.5 * (a + b);
            if f(a) * f(c) <= 0.0 {
                b = c;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn first_zero_of_j0() {
        let oracle = oracle_bisect(oracle_j0, 2.0, 3.0);
        let z = bessel_j_zeros_below(0, 3.0).unwrap();
        assert_eq!(z.len(), 1);
        assert!((z[0] - oracle).abs() < 1e-11);
        assert!((z[0] - 2.404_825_557_695_773).abs() < 1e-13);
    }

    #[test]
    fn known_zeros_across_switchover() {
        // tabulated values
        let cases = [
            (0u32, 5, 14.930_917_708_487_79),
            (1, 1, 3.831_705_970_207_512),
            (1, 6, 19.615_858_510_468_24),
            (5, 1, 8.771_483_815_959_954),
            (10, 3, 22.046_985_364_697_8),
            (20, 1, 25.417_140_814_072_52),
        ];
        for (m, p, expect) in cases {
            let z = bessel_j_zeros_below(m, expect + 1.0).unwrap();
            assert!((z[p - 1] - expect).abs() < 1e-8, "j_({m},{p}) = {} vs {expect}", z[p - 1]);
        }
    }

    #[test]
    fn recurrence_identity_holds() {
        for i in 1..=300 {
            let x = i as f64 * 0.1;
            for m in 1..30u32 {
                let lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x);
                let rhs = 2.0 * m as f64 / x * bessel_j(m, x);
                assert!((lhs - rhs).abs() < 1e-10, "m={m} x={x}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn continuity_at_switchover() {
        for m in 0..20u32 {
            let below = j_series(m, SERIES_LIMIT);
            let above = bessel_j(m, SERIES_LIMIT + 1e-9);
            assert!((below - above).abs() < 1e-9, "m={m}: {below} vs {above}");
        }
    }

    #[test]
    fn modified_bessel_values() {
        assert!((bessel_i(0, 1.0) - 1.266_065_877_752_008_4).abs() < 1e-15);
        assert!((bessel_i(1, 3.0) - 3.953_370_217_402_609).abs() < 1e-13);
        // I_{m-1} - I_{m+1} = (2m/x) I_m
        for m in 1..10u32 {
            let x = 7.5;
            let lhs = bessel_i(m - 1, x) - bessel_i(m + 1, x);
            assert!((lhs - 2.0 * m as f64 / x * bessel_i(m, x)).abs() < 1e-12 * bessel_i(m - 1, x));
        }
    }

    #[test]
    fn first_clamped_root() {
        let oracle = oracle_bisect(
            |x| {
                let (mut j0, mut j1, mut i0, mut i1) = (0.0, 0.0, 0.0, 0.0);
                let (mut f, mut s) = (1.0, 1.0);
                for k in 0..60 {
                    if k > 0 {
                        f *= k as f64;
                        s *= (x / 2.0) * (x / 2.0);
                    }
                    let a = s / (f * f);
                    let b = s * (x / 2.0) / (f * f * (k + 1) as f64);
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    j0 += sign * a;
                    i0 += a;
                    j1 += sign * b;
                    i1 += b;
                }
                j0 * i1 + i0 * j1
            },
            3.0,
            3.5,
        );
        let r = clamped_roots_below(0, 3.5).unwrap();
        assert!((r[0] - oracle).abs() < 1e-10);
        assert!((r[0] - 3.196_220_616_582_541).abs() < 1e-9);
    }
}
