//! Domains and the geometric functionals the bounds consume: volume,
//! moment of inertia about the centroid, unit-ball volume, and the
//! rearrangement constants built from them.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::numeric::CompensatedSum;

/// The supported region families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    /// Axis-aligned box with the given edge lengths (one per dimension).
    Box { lengths: Vec<f64> },
    /// Euclidean ball.
    Ball { radius: f64, dim: usize },
    /// Axis-aligned ellipsoid with the given semi-axes.
    Ellipse { semi_axes: Vec<f64> },
    /// Simple planar polygon, vertices counterclockwise.
    Polygon { vertices: Vec<[f64; 2]> },
}

/// A validated bounded domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    shape: Shape,
}

/// Volume and minimal moment of inertia of a domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub volume: f64,
    pub inertia: f64,
    pub dimension: usize,
}

/// The constants `M`, `L`, `M_S`, `L_S` bounding the Fourier density and its gradient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RearrangementConstants {
    /// `|Ω| / (2π)^n`
    pub m: f64,
    /// `2 sqrt(|Ω| I(Ω)) / (2π)^n`
    pub lcap: f64,
    /// `(n-1) |Ω| / (2π)^n`
    pub m_s: f64,
    /// `2 sqrt(n(n-1)) sqrt(|Ω| I(Ω)) / (2π)^n`
    pub l_s: f64,
}

fn check_positive(name: &str, v: f64) -> Result<(), GeometryError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(GeometryError::NonPositive { what: name.to_string(), value: v })
    }
}

impl Domain {
    pub fn new(shape: Shape) -> Result<Self, GeometryError> {
        match &shape {
            Shape::Box { lengths } => {
                if lengths.is_empty() {
                    return Err(GeometryError::Dimension(0));
                }
                for &l in lengths {
                    check_positive("box edge length", l)?;
                }
            }
            Shape::Ball { radius, dim } => {
                if *dim == 0 {
                    return Err(GeometryError::Dimension(0));
                }
                check_positive("ball radius", *radius)?;
            }
            Shape::Ellipse { semi_axes } => {
                if semi_axes.is_empty() {
                    return Err(GeometryError::Dimension(0));
                }
                for &a in semi_axes {
                    check_positive("ellipse semi-axis", a)?;
                }
            }
            Shape::Polygon { vertices } => validate_polygon(vertices)?,
        }
        Ok(Self { shape })
    }

    pub fn unit_square() -> Self {
        Self { shape: Shape::Box { lengths: vec![1.0, 1.0] } }
    }

    pub fn rectangle(a: f64, b: f64) -> Result<Self, GeometryError> {
        Self::new(Shape::Box { lengths: vec![a, b] })
    }

    pub fn disk(radius: f64) -> Result<Self, GeometryError> {
        Self::new(Shape::Ball { radius, dim: 2 })
    }

    pub fn unit_disk() -> Self {
        Self { shape: Shape::Ball { radius: 1.0, dim: 2 } }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dimension(&self) -> usize {
        match &self.shape {
            Shape::Box { lengths } => lengths.len(),
            Shape::Ball { dim, .. } => *dim,
            Shape::Ellipse { semi_axes } => semi_axes.len(),
            Shape::Polygon { .. } => 2,
        }
    }

    /// Short identifier without commas, used in report rows.
    pub fn id(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join("x");
        match &self.shape {
            Shape::Box { lengths } => format!("box({})", join(lengths)),
            Shape::Ball { radius, dim: 2 } => format!("disk(r={radius})"),
            Shape::Ball { radius, dim } => format!("ball(r={radius};n={dim})"),
            Shape::Ellipse { semi_axes } => format!("ellipse({})", join(semi_axes)),
            Shape::Polygon { vertices } => format!("polygon({}v)", vertices.len()),
        }
    }

    /// A copy scaled about the origin by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self, GeometryError> {
        check_positive("scale factor", c)?;
        let shape = match &self.shape {
            Shape::Box { lengths } => Shape::Box { lengths: lengths.iter().map(|l| l * c).collect() },
            Shape::Ball { radius, dim } => Shape::Ball { radius: radius * c, dim: *dim },
            Shape::Ellipse { semi_axes } => Shape::Ellipse { semi_axes: semi_axes.iter().map(|a| a * c).collect() },
            Shape::Polygon { vertices } => Shape::Polygon { vertices: vertices.iter().map(|v| [v[0] * c, v[1] * c]).collect() },
        };
        Self::new(shape)
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on_segment = |a: [f64; 2], b: [f64; 2], p: [f64; 2]| {
        p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
    };
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

fn validate_polygon(vertices: &[[f64; 2]]) -> Result<(), GeometryError> {
    let n = vertices.len();
    if n < 3 {
        return Err(GeometryError::Degenerate(format!("polygon needs at least 3 vertices, got {n}")));
    }
    if vertices.iter().flatten().any(|x| !x.is_finite()) {
        return Err(GeometryError::Degenerate("polygon has non-finite coordinates".into()));
    }
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        for j in (i + 1)..n {
            // adjacent edges share a vertex and are allowed to touch there
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (vertices[j], vertices[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return Err(GeometryError::NotSimple { edge_a: i, edge_b: j });
            }
        }
    }
    let area = polygon_moments(vertices).area;
    if area <= 0.0 {
        if area < 0.0 {
            return Err(GeometryError::Clockwise);
        }
        return Err(GeometryError::Degenerate("polygon has zero area".into()));
    }
    Ok(())
}

struct PolygonMoments {
    area: f64,
    inertia: f64,
}

/// Shoelace area and centroidal polar moment, accumulated relative to the
/// vertex mean to limit cancellation.
fn polygon_moments(vertices: &[[f64; 2]]) -> PolygonMoments {
    let n = vertices.len() as f64;
    let cx = vertices.iter().map(|v| v[0]).sum::<f64>() / n;
    let cy = vertices.iter().map(|v| v[1]).sum::<f64>() / n;
    let mut area2 = CompensatedSum::new();
    let mut sx = CompensatedSum::new();
    let mut sy = CompensatedSum::new();
    let mut sxx = CompensatedSum::new();
    let mut syy = CompensatedSum::new();
    for (i, p) in vertices.iter().enumerate() {
        let q = vertices[(i + 1) % vertices.len()];
        let (x0, y0) = (p[0] - cx, p[1] - cy);
        let (x1, y1) = (q[0] - cx, q[1] - cy);
        let c = x0 * y1 - x1 * y0;
        area2.add(c);
        sx.add(c * (x0 + x1));
        sy.add(c * (y0 + y1));
        sxx.add(c * (x0 * x0 + x0 * x1 + x1 * x1));
        syy.add(c * (y0 * y0 + y0 * y1 + y1 * y1));
    }
    let area = 0.5 * area2.value();
    if area == 0.0 {
        return PolygonMoments { area, inertia: 0.0 };
    }
    let mx = sx.value() / 6.0;
    let my = sy.value() / 6.0;
    let polar = (sxx.value() + syy.value()) / 12.0;
    PolygonMoments { area, inertia: polar - (mx * mx + my * my) / area }
}

/// `Γ(m/2)` for a positive integer `m`, by exact recursion from `Γ(1) = 1`
/// and `Γ(1/2) = √π`.
pub fn gamma_half_integer(twice_arg: u32) -> f64 {
    assert!(twice_arg > 0, "Gamma has a pole at 0");
    let (mut value, mut x) = if twice_arg.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = twice_arg as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// `Γ(1 + n/2)`.
pub fn gamma_one_plus_half(n: usize) -> f64 {
    gamma_half_integer(n as u32 + 2)
}

/// Volume `ω_n = π^{n/2} / Γ(1 + n/2)` of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> Result<f64, GeometryError> {
    if n == 0 {
        return Err(GeometryError::Dimension(0));
    }
    Ok(PI.powf(n as f64 / 2.0) / gamma_one_plus_half(n))
}

/// Volume and moment of inertia about the centroid (the minimizing center).
pub fn summarize(domain: &Domain) -> Result<GeometrySummary, GeometryError> {
    let n = domain.dimension();
    let (volume, inertia) = match domain.shape() {
        Shape::Box { lengths } => {
            let v: f64 = lengths.iter().product();
            let s: f64 = lengths.iter().map(|l| l * l).sum();
            (v, v * s / 12.0)
        }
        Shape::Ball { radius, dim } => {
            let w = unit_ball_volume(*dim)?;
            let d = *dim as f64;
            (w * radius.powi(*dim as i32), d * w * radius.powi(*dim as i32 + 2) / (d + 2.0))
        }
        Shape::Ellipse { semi_axes } => {
            let w = unit_ball_volume(n)?;
            let v = w * semi_axes.iter().product::<f64>();
            let s: f64 = semi_axes.iter().map(|a| a * a).sum();
            (v, v * s / (n as f64 + 2.0))
        }
        Shape::Polygon { vertices } => {
            let m = polygon_moments(vertices);
            (m.area, m.inertia)
        }
    };
    if !(volume > 0.0 && inertia > 0.0) {
        return Err(GeometryError::Degenerate(format!("{} has zero measure", domain.id())));
    }
    Ok(GeometrySummary { volume, inertia, dimension: n })
}

impl GeometrySummary {
    pub fn new(volume: f64, inertia: f64, dimension: usize) -> Result<Self, GeometryError> {
        check_positive("volume", volume)?;
        check_positive("inertia", inertia)?;
        if dimension == 0 {
            return Err(GeometryError::Dimension(0));
        }
        Ok(Self { volume, inertia, dimension })
    }

    /// Slack in the isoperimetric-type inequality
    /// `I/|Ω| >= n/(n+2) (|Ω|/ω_n)^{2/n}`, as a ratio (>= 1 when it holds).
    pub fn inertia_ratio_to_ball(&self) -> f64 {
        let n = self.dimension as f64;
        let w = unit_ball_volume(self.dimension).expect("dimension >= 1");
        (self.inertia / self.volume) / (n / (n + 2.0) * (self.volume / w).powf(2.0 / n))
    }
}

pub fn rearrangement_constants(summary: &GeometrySummary) -> RearrangementConstants {
    let n = summary.dimension as f64;
    let two_pi_n = (2.0 * PI).powi(summary.dimension as i32);
    let m = summary.volume / two_pi_n;
    let lcap = 2.0 * (summary.volume * summary.inertia).sqrt() / two_pi_n;
    RearrangementConstants { m, lcap, m_s: (n - 1.0) * m, l_s: (n * (n - 1.0)).sqrt() * lcap }
}

impl RearrangementConstants {
    /// The lower bound `|Ω|^{1+1/n} / ((2π)^n ω_n^{1/n})` that `L` always dominates.
    pub fn lcap_floor(summary: &GeometrySummary) -> f64 {
        let n = summary.dimension as f64;
        let w = unit_ball_volume(summary.dimension).expect("dimension >= 1");
        summary.volume.powf(1.0 + 1.0 / n) / ((2.0 * PI).powi(summary.dimension as i32) * w.powf(1.0 / n))
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        match &self.shape {
            Shape::Box { lengths } => write!(f, "shape=box lengths={}", list(lengths)),
            Shape::Ball { radius, dim } => write!(f, "shape=ball radius={radius} dim={dim}"),
            Shape::Ellipse { semi_axes } => write!(f, "shape=ellipse axes={}", list(semi_axes)),
            Shape::Polygon { vertices } => {
                let v = vertices.iter().map(|p| format!("{},{}", p[0], p[1])).collect::<Vec<_>>().join(";");
                write!(f, "shape=polygon vertices={v}")
            }
        }
    }
}

fn parse_list(key: &str, raw: &str) -> Result<Vec<f64>, GeometryError> {
    raw.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| GeometryError::Parse(format!("bad number {s:?} in {key}"))))
        .collect()
}

/// Parses the plain-text key-value domain format, e.g.
/// `shape=box lengths=1,2`, `shape=disk radius=1`, `shape=ball radius=1 dim=3`,
/// `shape=ellipse axes=2,1`, `shape=polygon vertices=0,0;1,0;0,1`.
/// Pairs may be separated by whitespace or newlines; `#` starts a comment.
/// A bare shape name (`square`, `disk`) selects the unit domain.
impl FromStr for Domain {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut pairs = std::collections::BTreeMap::new();
        for line in s.lines() {
            let line = line.split('#').next().unwrap_or("");
            for token in line.split_whitespace() {
                match token.split_once('=') {
                    Some((k, v)) => {
                        pairs.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
                    }
                    None if pairs.is_empty() => {
                        pairs.insert("shape".to_string(), token.to_ascii_lowercase());
                    }
                    None => return Err(GeometryError::Parse(format!("expected key=value, got {token:?}"))),
                }
            }
        }
        let shape = pairs.get("shape").ok_or_else(|| GeometryError::Parse("missing shape".into()))?;
        let get = |k: &str| pairs.get(k).map(String::as_str);
        let num = |k: &str, default: Option<f64>| -> Result<f64, GeometryError> {
            match get(k) {
                Some(v) => v.parse().map_err(|_| GeometryError::Parse(format!("bad number for {k}: {v:?}"))),
                None => default.ok_or_else(|| GeometryError::Parse(format!("missing {k}"))),
            }
        };
        let shape = match shape.as_str() {
            "square" => {
                let side = num("side", Some(1.0))?;
                Shape::Box { lengths: vec![side, side] }
            }
            "box" | "rectangle" => Shape::Box {
                lengths: parse_list("lengths", get("lengths").ok_or_else(|| GeometryError::Parse("missing lengths".into()))?)?,
            },
            "disk" => Shape::Ball { radius: num("radius", Some(1.0))?, dim: 2 },
            "ball" => {
                let dim = num("dim", Some(2.0))?;
                if dim.fract() != 0.0 || dim < 1.0 {
                    return Err(GeometryError::Parse(format!("dim must be a positive integer, got {dim}")));
                }
                Shape::Ball { radius: num("radius", Some(1.0))?, dim: dim as usize }
            }
            "ellipse" | "ellipsoid" => Shape::Ellipse {
                semi_axes: parse_list("axes", get("axes").ok_or_else(|| GeometryError::Parse("missing axes".into()))?)?,
            },
            "polygon" => {
                let raw = get("vertices").ok_or_else(|| GeometryError::Parse("missing vertices".into()))?;
                let mut vertices = Vec::new();
                for pt in raw.split(';').filter(|p| !p.trim().is_empty()) {
                    let xy = parse_list("vertices", pt)?;
                    if xy.len() != 2 {
                        return Err(GeometryError::Parse(format!("vertex {pt:?} is not an x,y pair")));
                    }
                    vertices.push([xy[0], xy[1]]);
                }
                Shape::Polygon { vertices }
            }
            other => return Err(GeometryError::Parse(format!("unknown shape {other:?}"))),
        };
        Domain::new(shape)
    }
}
