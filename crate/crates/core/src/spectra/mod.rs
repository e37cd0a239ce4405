//! Reference eigenvalue lists: closed-form spectra (box lattice, disk
//! Dirichlet, clamped disk) and finite-difference spectra, plus the partial
//! and power sums the bounds are compared against.

pub mod bessel;
pub mod fd;

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::SpectrumError;
use crate::geometry::{summarize, Domain, Shape};
use crate::numeric::CompensatedSum;

pub use fd::fd_spectrum;

/// Which eigenvalue problem a spectrum or bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    /// `(-Δ)^l` with clamped conditions up to the `(l-1)`-th normal derivative.
    Polyharmonic { order: u32 },
    /// Order-`l` Stokes operator.
    Stokes { order: u32 },
}

impl Operator {
    pub fn order(&self) -> u32 {
        match *self {
            Operator::Polyharmonic { order } | Operator::Stokes { order } => order,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Operator::Polyharmonic { .. } => "polyharmonic",
            Operator::Stokes { .. } => "stokes",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Method {
    ExactLattice,
    ExactBessel,
    /// Finite differences with grid step `h` (radial step for disks).
    FiniteDifference { h: f64 },
}

impl Method {
    pub fn is_exact(&self) -> bool {
        !matches!(self, Method::FiniteDifference { .. })
    }

    pub fn label(&self) -> String {
        match self {
            Method::ExactLattice => "exact-lattice".into(),
            Method::ExactBessel => "exact-bessel".into(),
            Method::FiniteDifference { h } => format!("fd(h={h})"),
        }
    }
}

/// Sorted eigenvalues, multiplicities expanded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub operator: Operator,
    pub domain: Domain,
    pub method: Method,
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub(crate) fn new(operator: Operator, domain: Domain, method: Method, mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        debug_assert!(eigenvalues.iter().all(|&v| v > 0.0));
        Self { operator, domain, method, eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// CSV with header `index,eigenvalue`, values to 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,eigenvalue")?;
        for (i, v) in self.eigenvalues.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, crate::report::fmt17(*v))?;
        }
        Ok(())
    }
}

/// Partial sums `Σ_{j<=k} λ_j` for every k, plus optional power sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSums {
    pub partial_sums: Vec<f64>,
    /// `(q, Σ_{j<=k} λ_j^q)` for every k.
    pub power_sums: Option<(f64, Vec<f64>)>,
    /// `(p, Σ_{j<=k} λ_j^{-p})` for every k.
    pub neg_power_sums: Option<(f64, Vec<f64>)>,
}

fn running<I: Iterator<Item = f64>>(values: I) -> Vec<f64> {
    let mut acc = CompensatedSum::new();
    values
        .map(|v| {
            acc.add(v);
            acc.value()
        })
        .collect()
}

/// Running sums of the first `k` eigenvalues, with power sums for `q` and `p` if requested.
pub fn sums(spectrum: &Spectrum, k: usize, q: Option<f64>, p: Option<f64>) -> Result<SpectrumSums, SpectrumError> {
    if k > spectrum.len() {
        return Err(SpectrumError::IndexOutOfRange { k, len: spectrum.len() });
    }
    let ev = &spectrum.eigenvalues[..k];
    Ok(SpectrumSums {
        partial_sums: running(ev.iter().copied()),
        power_sums: q.map(|q| (q, running(ev.iter().map(|v| v.powf(q))))),
        neg_power_sums: p.map(|p| (p, running(ev.iter().map(|v| v.powf(-p))))),
    })
}

fn box_lengths(domain: &Domain) -> Result<&[f64], SpectrumError> {
    match domain.shape() {
        Shape::Box { lengths } => Ok(lengths),
        _ => Err(SpectrumError::Unsupported(format!("lattice spectrum needs a box, got {}", domain.id()))),
    }
}

fn disk_radius(domain: &Domain) -> Result<f64, SpectrumError> {
    match domain.shape() {
        Shape::Ball { radius, dim: 2 } => Ok(*radius),
        _ => Err(SpectrumError::Unsupported(format!("Bessel spectrum needs a disk, got {}", domain.id()))),
    }
}

/// Every value `π² Σ (m_i/L_i)²` with all `m_i >= 1` not exceeding `cutoff`.
fn lattice_values(lengths: &[f64], cutoff: f64) -> Vec<f64> {
    let weights: Vec<f64> = lengths.iter().map(|l| PI * PI / (l * l)).collect();
    let mut out = Vec::new();
    // depth-first over multi-indices, pruning each axis once the partial value exceeds the cutoff
    fn rec(axis: usize, partial: f64, weights: &[f64], cutoff: f64, out: &mut Vec<f64>) {
        if axis == weights.len() {
            out.push(partial);
            return;
        }
        let mut m = 1u64;
        loop {
            let v = partial + weights[axis] * (m * m) as f64;
            if v > cutoff {
                break;
            }
            rec(axis + 1, v, weights, cutoff, out);
            m += 1;
        }
    }
    rec(0, 0.0, &weights, cutoff, &mut out);
    out
}

/// First `k` Dirichlet Laplacian eigenvalues of a box by lattice enumeration.
pub fn box_laplacian_exact(domain: &Domain, k: usize) -> Result<Spectrum, SpectrumError> {
    let lengths = box_lengths(domain)?;
    let g = summarize(domain)?;
    let n = lengths.len() as f64;
    // Weyl-scale initial cutoff, grown geometrically
    let mut cutoff = 4.0 * PI * ((k as f64 + 1.0) / g.volume).powf(2.0 / n) * 1.2 + lengths.iter().map(|l| PI * PI / (l * l)).sum::<f64>();
    loop {
        let mut values = lattice_values(lengths, cutoff);
        if values.len() >= k {
            values.sort_by(f64::total_cmp);
            values.truncate(k);
            return Ok(Spectrum::new(Operator::Polyharmonic { order: 1 }, domain.clone(), Method::ExactLattice, values));
        }
        cutoff *= 1.5;
    }
}

fn disk_values<F>(k: usize, radius: f64, mut roots_below: F, power: i32, initial: f64) -> Result<Vec<f64>, SpectrumError>
where
    F: FnMut(u32, f64) -> Result<Vec<f64>, SpectrumError>,
{
    let mut limit = initial;
    loop {
        let mut values = Vec::new();
        let mut m = 0u32;
        while (m as f64) < limit {
            // scan past the limit so a root just below it is never missed
            let roots: Vec<f64> = roots_below(m, limit + 0.5)?.into_iter().filter(|&x| x < limit).collect();
            if roots.is_empty() {
                break;
            }
            for x in roots {
                let v = (x / radius).powi(power);
                values.push(v);
                if m > 0 {
                    values.push(v);
                }
            }
            m += 1;
        }
        if values.len() >= k {
            values.sort_by(f64::total_cmp);
            values.truncate(k);
            return Ok(values);
        }
        limit *= 1.25;
    }
}

/// First `k` Dirichlet Laplacian eigenvalues `j_{m,p}² / R²` of a disk.
pub fn disk_laplacian_exact(domain: &Domain, k: usize) -> Result<Spectrum, SpectrumError> {
    let r = disk_radius(domain)?;
    let initial = 2.0 * (k as f64).sqrt() * 1.1 + 3.0;
    let values = disk_values(k, r, bessel::bessel_j_zeros_below, 2, initial)?;
    Ok(Spectrum::new(Operator::Polyharmonic { order: 1 }, domain.clone(), Method::ExactBessel, values))
}

/// First `k` clamped-plate eigenvalues `(x/R)⁴` of a disk, `x` a root of the
/// frequency equation `J_m I_{m+1} + I_m J_{m+1} = 0`.
pub fn disk_clamped_plate_exact(domain: &Domain, k: usize) -> Result<Spectrum, SpectrumError> {
    let r = disk_radius(domain)?;
    let initial = 2.0 * (k as f64).sqrt() * 1.1 + 4.0;
    let values = disk_values(k, r, bessel::clamped_roots_below, 4, initial)?;
    Ok(Spectrum::new(Operator::Polyharmonic { order: 2 }, domain.clone(), Method::ExactBessel, values))
}

/// Closed-form spectrum of the polyharmonic operator where one is available:
/// boxes for `l = 1`, disks for `l = 1, 2`.
pub fn exact_spectrum(domain: &Domain, order: u32, k: usize) -> Result<Spectrum, SpectrumError> {
    match (domain.shape(), order) {
        (Shape::Box { .. }, 1) => box_laplacian_exact(domain, k),
        (Shape::Ball { dim: 2, .. }, 1) => disk_laplacian_exact(domain, k),
        (Shape::Ball { dim: 2, .. }, 2) => disk_clamped_plate_exact(domain, k),
        _ => Err(SpectrumError::Unsupported(format!("no closed-form spectrum for l = {order} on {}", domain.id()))),
    }
}
