//! `F(ξ) = Σ_{j<=k} |û_j(ξ)|²` for the first `k` Dirichlet eigenfunctions of a
//! rectangle centred at the origin, in closed form.
//!
//! Along an axis of length `L` the mode `sin(a(x + L/2))`, `a = mπ/L`, has
//! transform `(L/2)(sinc((ξ+a)L/2) ± sinc((ξ-a)L/2))` up to a unit phase
//! (`+` for odd `m`), so every `û_j` is a real multiple of a fixed phase and
//! its gradient follows from `sinc'`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::LemmaReport;
use crate::error::LemmaError;
use crate::geometry::{rearrangement_constants, summarize, Domain, RearrangementConstants};
use crate::numeric::gauss_legendre;

/// Largest `k` accepted.
pub const MAX_MODES: usize = 50;

/// Square grid `[-half_width, half_width]²` with `points` nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub half_width: f64,
    pub points: usize,
}

impl FrequencyGrid {
    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.step()
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn sinc_prime(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x * (-1.0 / 3.0 + x2 / 30.0)
    } else {
        (x * x.cos() - x.sin()) / (x * x)
    }
}

/// Normalized one-dimensional transform `(2π)^{-1/2} √(2/L) ∫ sin(a(x+L/2)) e^{iξx} dx`
/// with its phase removed, and its derivative in `ξ`.
fn axis_transform(m: u32, length: f64, xi: f64) -> (f64, f64) {
    let a = m as f64 * PI / length;
    let c = 0.5 * length;
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let norm = (2.0 / length).sqrt() / (2.0 * PI).sqrt() * c;
    let g = norm * (sinc((xi + a) * c) + sign * sinc((xi - a) * c));
    let dg = norm * c * (sinc_prime((xi + a) * c) + sign * sinc_prime((xi - a) * c));
    (g, dg)
}

/// First `k` multi-indices `(m1, m2)` of the rectangle in eigenvalue order, ties lexicographic.
fn lowest_modes(lengths: [f64; 2], k: usize) -> Vec<[u32; 2]> {
    let bound = (k as u32 + 1) * 2;
    let mut modes: Vec<([u32; 2], f64)> = (1..=bound)
        .flat_map(|a| (1..=bound).map(move |b| [a, b]))
        .map(|m| (m, (m[0] as f64 / lengths[0]).powi(2) + (m[1] as f64 / lengths[1]).powi(2)))
        .collect();
    modes.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
    modes.truncate(k);
    modes.into_iter().map(|(m, _)| m).collect()
}

/// The density of a rectangle's first `k` modes, sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierDensity {
    pub lengths: [f64; 2],
    pub k: usize,
    pub modes: Vec<[u32; 2]>,
    pub grid: FrequencyGrid,
    /// Row-major `F` values, `ξ₁` fastest.
    pub values: Vec<f64>,
    pub constants: RearrangementConstants,
    /// `I(Ω) / (2π)²`, the bound on `Σ |∇û_j|²`.
    pub gradient_energy_bound: f64,
}

impl FourierDensity {
    pub fn new(k: usize, lengths: [f64; 2], grid: FrequencyGrid) -> Result<Self, LemmaError> {
        if k == 0 || k > MAX_MODES {
            return Err(LemmaError::TooManyModes { k, max: MAX_MODES });
        }
        if grid.points < 2 || !(grid.half_width > 0.0) {
            return Err(LemmaError::InvalidDensity("grid needs at least two points and positive width".into()));
        }
        let domain = Domain::rectangle(lengths[0], lengths[1])?;
        let summary = summarize(&domain)?;
        let modes = lowest_modes(lengths, k);
        let mut out = Self {
            lengths,
            k,
            modes,
            grid,
            values: Vec::new(),
            constants: rearrangement_constants(&summary),
            gradient_energy_bound: summary.inertia / (2.0 * PI).powi(2),
        };
        out.values = (0..grid.points)
            .flat_map(|j| (0..grid.points).map(move |i| [grid.coordinate(i), grid.coordinate(j)]))
            .map(|xi| out.density(xi))
            .collect();
        Ok(out)
    }

    /// Per-mode `(û_j, ∂₁û_j, ∂₂û_j)` with the common phase removed.
    fn mode_values(&self, xi: [f64; 2]) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.modes.iter().map(move |m| {
            let (g1, d1) = axis_transform(m[0], self.lengths[0], xi[0]);
            let (g2, d2) = axis_transform(m[1], self.lengths[1], xi[1]);
            (g1 * g2, d1 * g2, g1 * d2)
        })
    }

    pub fn density(&self, xi: [f64; 2]) -> f64 {
        self.mode_values(xi).map(|(u, _, _)| u * u).sum()
    }

    /// `∇F` from the closed-form derivatives.
    pub fn gradient(&self, xi: [f64; 2]) -> [f64; 2] {
        self.mode_values(xi).fold([0.0, 0.0], |acc, (u, d1, d2)| [acc[0] + 2.0 * u * d1, acc[1] + 2.0 * u * d2])
    }

    /// `Σ_j |∇û_j|²`.
    pub fn gradient_energy(&self, xi: [f64; 2]) -> f64 {
        self.mode_values(xi).map(|(_, d1, d2)| d1 * d1 + d2 * d2).sum()
    }

    /// `∫_{|ξ| < radius} F` by composite Gauss–Legendre in polar coordinates
    /// over one quadrant (`F` is even in each coordinate).
    pub fn ball_mass(&self, radius: f64) -> f64 {
        let (x, w) = gauss_legendre(10);
        let lmax = self.lengths[0].max(self.lengths[1]);
        // panels of width 1/L resolve the 2π/L oscillation
        let radial_panels = (radius * lmax).ceil().max(1.0) as usize;
        let dr = radius / radial_panels as f64;
        let mut total = 0.0;
        for p in 0..radial_panels {
            for (xr, wr) in x.iter().zip(&w) {
                let r = dr * (p as f64 + 0.5 * (xr + 1.0));
                let angular_panels = (r * 0.5 * PI * lmax).ceil().max(1.0) as usize;
                let dt = 0.5 * PI / angular_panels as f64;
                let mut ring = 0.0;
                for q in 0..angular_panels {
                    for (xt, wt) in x.iter().zip(&w) {
                        let th = dt * (q as f64 + 0.5 * (xt + 1.0));
                        ring += wt * self.density([r * th.cos(), r * th.sin()]);
                    }
                }
                total += wr * r * ring * 0.5 * dt;
            }
        }
        4.0 * total * 0.5 * dr
    }
}

/// Per-axis Plancherel check: `∫ |ĝ_m|² dξ` for one mode, which must equal 1.
pub fn axis_plancherel(m: u32, length: f64) -> f64 {
    // the integrand decays like ξ^{-4}; integrate to a wide cutoff and add the tail
    let cutoff = 400.0 * PI / length;
    let f = |xi: f64| {
        let (g, _) = axis_transform(m, length, xi);
        g * g
    };
    let (core, _) = crate::numeric::integrate(f, -cutoff, cutoff, 0.0, 1e-13);
    // far out |ĝ|² = (2a²/(πL)) (1 - (-1)^m cos ξL) / ξ⁴ on average, on both sides
    let a = m as f64 * PI / length;
    let tail = 2.0 * 2.0 * a * a / (PI * length) / (3.0 * cutoff.powi(3));
    core + tail
}

/// Captured mass `∫_{|ξ|<R} F` for `R = r0, 2 r0, 4 r0, ...` until it reaches `fraction · k`.
pub fn mass_study(density: &FourierDensity, fraction: f64, max_doublings: usize) -> Vec<(f64, f64)> {
    let lmin = density.lengths[0].min(density.lengths[1]);
    let mut radius = 4.0 * PI / lmin;
    let mut out = Vec::new();
    for _ in 0..=max_doublings {
        let mass = density.ball_mass(radius);
        out.push((radius, mass));
        if mass >= fraction * density.k as f64 {
            break;
        }
        radius *= 2.0;
    }
    out
}

pub const FOURIER_TOLERANCE: f64 = 1e-9;

/// Evaluates `F` on the grid and checks `F <= M`, `|∇F| <= L`,
/// `Σ|∇û_j|² <= I/(2π)²`, per-mode Plancherel, and the truncated-ball mass band.
pub fn fourier_density_box(k: usize, lengths: [f64; 2], grid: FrequencyGrid) -> Result<(FourierDensity, LemmaReport), LemmaError> {
    let density = FourierDensity::new(k, lengths, grid)?;
    let m = density.constants.m;
    let lcap = density.constants.lcap;
    let mut worst: Option<(f64, serde_json::Value)> = None;
    let mut consider = |gap: f64, inputs: serde_json::Value| {
        if worst.as_ref().is_none_or(|w| gap < w.0) {
            worst = Some((gap, inputs));
        }
    };
    for j in 0..grid.points {
        for i in 0..grid.points {
            let xi = [grid.coordinate(i), grid.coordinate(j)];
            let f = density.values[j * grid.points + i];
            consider((m - f) / m, json!({"check": "density", "xi": xi}));
            if f < 0.0 {
                consider(f / m, json!({"check": "nonnegative", "xi": xi}));
            }
            let g = density.gradient(xi);
            consider((lcap - g[0].hypot(g[1])) / lcap, json!({"check": "gradient", "xi": xi}));
            let e = density.gradient_energy(xi);
            let bound = density.gradient_energy_bound;
            consider((bound - e) / bound, json!({"check": "gradient-energy", "xi": xi}));
        }
    }
    for (axis, len) in lengths.iter().enumerate() {
        let mut seen: Vec<u32> = density.modes.iter().map(|m| m[axis]).collect();
        seen.sort_unstable();
        seen.dedup();
        for mode in seen {
            let p = axis_plancherel(mode, *len);
            consider(-(p - 1.0).abs() + FOURIER_TOLERANCE, json!({"check": "plancherel", "axis": axis, "m": mode, "integral": p}));
        }
    }
    let study = mass_study(&density, 0.95, 6);
    let &(radius, mass) = study.last().expect("at least one radius");
    let kf = k as f64;
    let band_gap = ((mass - 0.95 * kf).min(kf + 1e-6 - mass)) / kf;
    consider(band_gap, json!({"check": "mass", "radius": radius, "mass": mass}));
    if study.windows(2).any(|w| w[1].1 < w[0].1) {
        consider(-1.0, json!({"check": "mass-monotone", "study": study}));
    }
    let samples = grid.points * grid.points;
    Ok((density, LemmaReport::from_worst("fourier", samples, worst, FOURIER_TOLERANCE)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> FrequencyGrid {
        FrequencyGrid { half_width: 30.0, points: 61 }
    }

    #[test]
    fn origin_value_of_first_square_mode() {
        let d = FourierDensity::new(1, [1.0, 1.0], grid()).unwrap();
        let f0 = d.density([0.0, 0.0]);
        assert!((f0 - 16.0 / PI.powi(6)).abs() < 1e-15);
        assert!(f0 <= 1.0 / (4.0 * PI * PI));
    }

    #[test]
    fn transform_matches_direct_quadrature() {
        // (2π)^{-1/2} √(2/L) |∫_{-L/2}^{L/2} sin(a(x+L/2)) e^{iξx} dx|
        for (m, len, xi) in [(1u32, 1.0, 0.7), (2, 1.3, -4.0), (3, 0.8, 11.78)] {
            let a = m as f64 * PI / len;
            let re = crate::numeric::integrate(|x| (a * (x + len / 2.0)).sin() * (xi * x).cos(), -len / 2.0, len / 2.0, 0.0, 1e-14).0;
            let im = crate::numeric::integrate(|x| (a * (x + len / 2.0)).sin() * (xi * x).sin(), -len / 2.0, len / 2.0, 0.0, 1e-14).0;
            let expect = (2.0 / len).sqrt() / (2.0 * PI).sqrt() * re.hypot(im);
            let (g, _) = axis_transform(m, len, xi);
            assert!((g.abs() - expect).abs() < 1e-13, "m={m}: {g} vs {expect}");
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let d = FourierDensity::new(5, [1.0, 1.5], grid()).unwrap();
        let h = 1e-5;
        for xi in [[0.3, -1.2], [3.0, 2.0], [-7.0, 0.01]] {
            let g = d.gradient(xi);
            let fx = (d.density([xi[0] + h, xi[1]]) - d.density([xi[0] - h, xi[1]])) / (2.0 * h);
            let fy = (d.density([xi[0], xi[1] + h]) - d.density([xi[0], xi[1] - h])) / (2.0 * h);
            assert!((g[0] - fx).abs() < 1e-9 && (g[1] - fy).abs() < 1e-9);
        }
    }

    #[test]
    fn plancherel_per_mode() {
        for m in 1..5 {
            assert!((axis_plancherel(m, 1.0) - 1.0).abs() < 1e-9);
        }
        assert!((axis_plancherel(3, 2.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mass_grows_toward_k() {
        let d = FourierDensity::new(5, [1.0, 1.0], FrequencyGrid { half_width: 1.0, points: 2 }).unwrap();
        let study = mass_study(&d, 0.999, 3);
        assert!(study.windows(2).all(|w| w[1].1 > w[0].1));
        assert!(study.iter().all(|s| s.1 <= 5.0 + 1e-6));
    }

    #[test]
    fn unit_square_five_modes_pass() {
        let (d, report) = fourier_density_box(5, [1.0, 1.0], grid()).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(d.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn rejects_large_k() {
        assert!(matches!(FourierDensity::new(51, [1.0, 1.0], grid()), Err(LemmaError::TooManyModes { .. })));
    }
}
