//! Finite-difference spectra for `l = 1, 2` on rectangles and disks.
//!
//! Rectangles use the 5-point Laplacian and the 13-point bilaplacian on the
//! interior nodes of a uniform grid. Clamping is encoded by zero boundary
//! values plus the mirror ghost `u_{-1} = u_1`.
//!
//! Disks are discretized in polar form on a staggered radial grid
//! `r_i = (i - 1/2) Δr`, with the boundary at node `N + 1`. Each angular mode
//! `m` gives a small banded generalized problem `K u = λ W u`, `W = diag(r_i)`.
//! Its eigenvalues appear twice for `m >= 1`.

use super::{Method, Operator, Spectrum};
use crate::eigen::{lowest_eigenvalues_banded, BandedSymmetric, EigenOptions};
use crate::error::SpectrumError;
use crate::geometry::{Domain, Shape};

/// The `k` smallest FD eigenvalues of `(-Δ)^l` (`l ∈ {1, 2}`) on a 2D box or disk with grid step `h`.
pub fn fd_spectrum(domain: &Domain, l: u32, h: f64, k: usize) -> Result<Spectrum, SpectrumError> {
    if !(l == 1 || l == 2) {
        return Err(SpectrumError::Unsupported(format!("finite-difference stencils exist for l = 1, 2 only, got {l}")));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(SpectrumError::Unsupported(format!("grid step must be positive, got {h}")));
    }
    let opts = EigenOptions::default();
    let values = match domain.shape() {
        Shape::Box { lengths } if lengths.len() == 2 => rectangle_fd(lengths[0], lengths[1], l, h, k, &opts)?,
        Shape::Ball { radius, dim: 2 } => disk_fd(*radius, l, h, k, &opts)?,
        _ => return Err(SpectrumError::Unsupported(format!("finite differences need a 2D box or disk, got {}", domain.id()))),
    };
    Ok(Spectrum::new(Operator::Polyharmonic { order: l }, domain.clone(), Method::FiniteDifference { h }, values))
}

fn intervals(length: f64, h: f64) -> usize {
    (length / h).round().max(1.0) as usize
}

/// Assembles the rectangle operator on the `(mx-1) x (my-1)` interior nodes, x index fastest.
pub(crate) fn rectangle_matrix(a: f64, b: f64, l: u32, h: f64) -> BandedSymmetric {
    let mx = intervals(a, h);
    let my = intervals(b, h);
    let (hx, hy) = (a / mx as f64, b / my as f64);
    let (nx, ny) = (mx - 1, my - 1);
    let idx = |i: usize, j: usize| j * nx + i;
    let bandwidth = if l == 1 { nx } else { 2 * nx };
    let mut m = BandedSymmetric::zeros(nx * ny, bandwidth);
    let (cx, cy) = (1.0 / (hx * hx), 1.0 / (hy * hy));
    for j in 0..ny {
        for i in 0..nx {
            let p = idx(i, j);
            if l == 1 {
                m.add(p, p, 2.0 * cx + 2.0 * cy);
                if i > 0 {
                    m.add(p, idx(i - 1, j), -cx);
                }
                if j > 0 {
                    m.add(p, idx(i, j - 1), -cy);
                }
                continue;
            }
            // fourth differences with the ghost reflection at the first and last interior node
            let end_x = if i == 0 || i + 1 == nx { 1.0 } else { 0.0 };
            let end_y = if j == 0 || j + 1 == ny { 1.0 } else { 0.0 };
            let mut diag = (6.0 + end_x) * cx * cx + (6.0 + end_y) * cy * cy;
            // 2 δx² δy²: centre weight (-2)(-2)
            diag += 8.0 * cx * cy;
            m.add(p, p, diag);
            if i > 0 {
                m.add(p, idx(i - 1, j), -4.0 * cx * cx - 4.0 * cx * cy);
            }
            if i > 1 {
                m.add(p, idx(i - 2, j), cx * cx);
            }
            if j > 0 {
                m.add(p, idx(i, j - 1), -4.0 * cy * cy - 4.0 * cx * cy);
                if i > 0 {
                    m.add(p, idx(i - 1, j - 1), 2.0 * cx * cy);
                }
                if i + 1 < nx {
                    m.add(p, idx(i + 1, j - 1), 2.0 * cx * cy);
                }
            }
            if j > 1 {
                m.add(p, idx(i, j - 2), cy * cy);
            }
        }
    }
    m
}

fn rectangle_fd(a: f64, b: f64, l: u32, h: f64, k: usize, opts: &EigenOptions) -> Result<Vec<f64>, SpectrumError> {
    let unknowns = (intervals(a, h) - 1) * (intervals(b, h) - 1);
    if unknowns < k {
        return Err(SpectrumError::GridTooCoarse { available: unknowns, k });
    }
    Ok(lowest_eigenvalues_banded(&rectangle_matrix(a, b, l, h), k, opts)?)
}

/// Symmetrized operator `W^{-1/2} K W^{-1/2}` of angular mode `m` on `n` radial unknowns.
pub(crate) fn disk_mode_matrix(radius: f64, n: usize, m: u32, l: u32) -> BandedSymmetric {
    let dr = radius / (n as f64 + 0.5);
    let r = |i: usize| (i as f64 - 0.5) * dr; // node i, 1-based
    let rh = |i: usize| i as f64 * dr; // face r_{i+1/2}
    let m2 = (m as f64).powi(2);
    let mut out = BandedSymmetric::zeros(n, l as usize);
    if l == 1 {
        // -r_i L_m, with u_{n+1} = 0 and no flux through the origin
        for i in 1..=n {
            let d = (rh(i) + rh(i - 1)) / (dr * dr) + m2 / r(i);
            out.add(i - 1, i - 1, d / r(i));
            if i > 1 {
                out.add(i - 1, i - 2, -rh(i - 1) / (dr * dr) / (r(i) * r(i - 1)).sqrt());
            }
        }
        return out;
    }
    // rows of L_m at nodes 1..=n+1 (columns 1..=n); the boundary row uses the ghost u_{n+2} = u_n
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n + 1);
    for i in 1..=n {
        let c = 1.0 / (r(i) * dr * dr);
        let mut row = vec![(i, -(rh(i) + rh(i - 1)) * c - m2 / (r(i) * r(i)))];
        if i > 1 {
            row.push((i - 1, rh(i - 1) * c));
        }
        if i < n {
            row.push((i + 1, rh(i) * c));
        }
        rows.push(row);
    }
    rows.push(vec![(n, (rh(n + 1) + rh(n)) / (r(n + 1) * dr * dr))]);
    let mut dense_band = vec![[0.0f64; 3]; n]; // K[i][i-d], 0-based i
    for (row_idx, row) in rows.iter().enumerate() {
        let node = row_idx + 1;
        let w = if node == n + 1 { 0.5 * r(node) } else { r(node) };
        for &(a, va) in row {
            for &(b, vb) in row {
                if b <= a && a - b <= 2 {
                    dense_band[a - 1][a - b] += w * va * vb;
                }
            }
        }
    }
    for i in 1..=n {
        for d in 0..=2 {
            if d < i {
                let j = i - d;
                out.add(i - 1, j - 1, dense_band[i - 1][d] / (r(i) * r(j)).sqrt());
            }
        }
    }
    out
}

fn disk_fd(radius: f64, l: u32, h: f64, k: usize, opts: &EigenOptions) -> Result<Vec<f64>, SpectrumError> {
    let n = (radius / h - 0.5).round().max(1.0) as usize;
    let max_modes = 4 * n + 4;
    let mut values: Vec<f64> = Vec::new();
    for m in 0..max_modes as u32 {
        let want = k.min(n);
        let mode = lowest_eigenvalues_banded(&disk_mode_matrix(radius, n, m, l), want, opts)?;
        if values.len() >= k && mode[0] > values[k - 1] {
            values.truncate(k);
            return Ok(values);
        }
        for v in mode {
            values.push(v);
            if m > 0 {
                values.push(v);
            }
        }
        values.sort_by(f64::total_cmp);
    }
    Err(SpectrumError::GridTooCoarse { available: values.len(), k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn discrete_square_laplacian(h: f64, k: usize) -> Vec<f64> {
        let m = (1.0 / h).round() as usize;
        let mut v: Vec<f64> = (1..m)
            .flat_map(|a| (1..m).map(move |b| (a, b)))
            .map(|(a, b)| 4.0 / (h * h) * ((PI * a as f64 * h / 2.0).sin().powi(2) + (PI * b as f64 * h / 2.0).sin().powi(2)))
            .collect();
        v.sort_by(f64::total_cmp);
        v.truncate(k);
        v
    }

    #[test]
    fn square_laplacian_matches_discrete_closed_form() {
        for &h in &[1.0 / 8.0, 1.0 / 32.0] {
            let s = fd_spectrum(&Domain::unit_square(), 1, h, 10).unwrap();
            for (a, b) in s.eigenvalues().iter().zip(discrete_square_laplacian(h, 10)) {
                assert!((a - b).abs() <= 1e-9 * b, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn rectangle_laplacian_matches_discrete_closed_form() {
        let (a, b, h) = (1.0, 0.5, 1.0 / 16.0);
        let s = fd_spectrum(&Domain::rectangle(a, b).unwrap(), 1, h, 6).unwrap();
        let mut expect: Vec<f64> = (1..16)
            .flat_map(|p| (1..8).map(move |q| (p, q)))
            .map(|(p, q)| 4.0 / (h * h) * ((PI * p as f64 * h / (2.0 * a)).sin().powi(2) + (PI * q as f64 * h / (2.0 * b)).sin().powi(2)))
            .collect();
        expect.sort_by(f64::total_cmp);
        for (x, y) in s.eigenvalues().iter().zip(&expect) {
            assert!((x - y).abs() <= 1e-9 * y);
        }
    }

    #[test]
    fn bilaplacian_matrix_is_symmetric_and_positive() {
        let m = rectangle_matrix(1.0, 1.0, 2, 1.0 / 6.0);
        let d = m.to_dense();
        for i in 0..d.len() {
            for j in 0..d.len() {
                assert_eq!(d[i][j], d[j][i]);
            }
        }
        assert!(m.cholesky().is_ok());
        let dm = disk_mode_matrix(1.0, 12, 3, 2);
        assert!(dm.cholesky().is_ok());
    }

    #[test]
    fn square_bilaplacian_exceeds_laplacian_squared() {
        // clamped eigenvalues dominate the squared Dirichlet ones
        let h = 1.0 / 24.0;
        let l2 = fd_spectrum(&Domain::unit_square(), 2, h, 3).unwrap();
        let l1 = fd_spectrum(&Domain::unit_square(), 1, h, 3).unwrap();
        for (a, b) in l2.eigenvalues().iter().zip(l1.eigenvalues()) {
            assert!(*a > b * b);
        }
    }

    #[test]
    fn disk_laplacian_close_to_bessel() {
        let s = fd_spectrum(&Domain::unit_disk(), 1, 1.0 / 32.0, 3).unwrap();
        let j01 = 2.404_825_557_695_773f64;
        let j11 = 3.831_705_970_207_512f64;
        assert!((s.eigenvalues()[0] / (j01 * j01) - 1.0).abs() < 2e-3);
        assert!((s.eigenvalues()[1] / (j11 * j11) - 1.0).abs() < 2e-3);
        assert_eq!(s.eigenvalues()[1], s.eigenvalues()[2]);
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(fd_spectrum(&Domain::unit_square(), 3, 0.1, 1).is_err());
        assert!(matches!(fd_spectrum(&Domain::unit_square(), 1, 0.25, 10), Err(SpectrumError::GridTooCoarse { .. })));
        let ball = Domain::new(Shape::Ball { radius: 1.0, dim: 3 }).unwrap();
        assert!(fd_spectrum(&ball, 1, 0.1, 1).is_err());
    }
}
