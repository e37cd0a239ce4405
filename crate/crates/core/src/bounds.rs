//! Closed-form lower bounds for `Σ_{j<=k} λ_j` (and power sums) of the
//! polyharmonic Dirichlet operator and the higher-order Stokes operator,
//! each returned with its decomposition into powers of `k`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::BoundError;
use crate::geometry::{gamma_one_plus_half, unit_ball_volume, GeometrySummary};
use crate::numeric::CompensatedSum;
use crate::spectra::Operator;

/// Selects between the corrected constants and the literal printed ones for
/// the formulas whose published form is internally inconsistent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Typography {
    #[default]
    Corrected,
    AsPrinted,
}

/// Inputs shared by every bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRequest {
    pub n: usize,
    pub l: u32,
    pub volume: f64,
    pub inertia: f64,
    pub k: u64,
    /// Positive-power exponent, `0 < q <= 1`.
    pub q: Option<f64>,
    /// Negative-power exponent, `0 < p < n/(2l)`.
    pub p: Option<f64>,
    pub typography: Typography,
}

impl BoundRequest {
    pub fn new(n: usize, l: u32, volume: f64, inertia: f64, k: u64) -> Result<Self, BoundError> {
        let req = Self { n, l, volume, inertia, k, q: None, p: None, typography: Typography::Corrected };
        req.validate()?;
        Ok(req)
    }

    pub fn from_summary(summary: &GeometrySummary, l: u32, k: u64) -> Result<Self, BoundError> {
        Self::new(summary.dimension, l, summary.volume, summary.inertia, k)
    }

    pub fn with_k(self, k: u64) -> Self {
        Self { k, ..self }
    }

    pub fn with_q(self, q: f64) -> Self {
        Self { q: Some(q), ..self }
    }

    pub fn with_p(self, p: f64) -> Self {
        Self { p: Some(p), ..self }
    }

    pub fn with_typography(self, typography: Typography) -> Self {
        Self { typography, ..self }
    }

    pub fn validate(&self) -> Result<(), BoundError> {
        if self.k == 0 {
            return Err(BoundError::ZeroIndex);
        }
        if self.l == 0 {
            return Err(BoundError::ZeroOrder);
        }
        if self.n < 2 {
            return Err(BoundError::Dimension(self.n));
        }
        for (what, value) in [("volume", self.volume), ("moment of inertia", self.inertia)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(BoundError::NonPositive { what, value });
            }
        }
        Ok(())
    }

    /// Whether `1 <= l < (n+1)/2`, the range of the four-term bounds.
    pub fn order_in_main_range(&self) -> bool {
        self.l >= 1 && 2 * (self.l as usize) < self.n + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Validity {
    ExactHypothesesMet,
    AsymptoticLeadingForm,
    HypothesesViolated,
}

impl Validity {
    pub fn label(&self) -> &'static str {
        match self {
            Validity::ExactHypothesesMet => "exact-hypotheses-met",
            Validity::AsymptoticLeadingForm => "asymptotic-leading-form",
            Validity::HypothesesViolated => "hypotheses-violated",
        }
    }
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One summand `coefficient · k^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponent: f64,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    pub direction: Direction,
    pub validity: Validity,
    pub term_breakdown: Vec<Term>,
    pub warning: Option<String>,
}

impl BoundValue {
    fn build(k: u64, direction: Direction, validity: Validity, terms: Vec<Term>, warning: Option<String>) -> Self {
        Self { value: evaluate_terms(&terms, k as f64), direction, validity, term_breakdown: terms, warning }
    }
}

/// `Σ coefficient · k^exponent`.
pub fn evaluate_terms(terms: &[Term], k: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for t in terms {
        acc.add(t.coefficient * k.powf(t.exponent));
    }
    acc.value()
}

/// Every implemented bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    LevineProtter,
    BerezinLiYau,
    Melas,
    YolcuYolcu,
    CswzLeading,
    MainThm,
    PowerSum,
    PowerSumTwoTerm,
    NegPowerSum,
    IlyinBly,
    YolcuYolcuStokes,
    IlyinHigherLeading,
    MainThmStokes,
}

impl Family {
    pub const ALL: [Family; 13] = [
        Family::LevineProtter,
        Family::BerezinLiYau,
        Family::Melas,
        Family::YolcuYolcu,
        Family::CswzLeading,
        Family::MainThm,
        Family::PowerSum,
        Family::PowerSumTwoTerm,
        Family::NegPowerSum,
        Family::IlyinBly,
        Family::YolcuYolcuStokes,
        Family::IlyinHigherLeading,
        Family::MainThmStokes,
    ];

    /// Families bounding plain eigenvalue sums of the polyharmonic operator.
    pub const EIGEN_SUM: [Family; 6] =
        [Family::LevineProtter, Family::BerezinLiYau, Family::Melas, Family::YolcuYolcu, Family::CswzLeading, Family::MainThm];

    pub const STOKES: [Family; 4] = [Family::IlyinBly, Family::YolcuYolcuStokes, Family::IlyinHigherLeading, Family::MainThmStokes];

    pub fn name(&self) -> &'static str {
        match self {
            Family::LevineProtter => "levine_protter",
            Family::BerezinLiYau => "berezin_li_yau",
            Family::Melas => "melas",
            Family::YolcuYolcu => "yolcu_yolcu",
            Family::CswzLeading => "cswz_leading",
            Family::MainThm => "main_thm",
            Family::PowerSum => "power_sum",
            Family::PowerSumTwoTerm => "power_sum_two_term",
            Family::NegPowerSum => "neg_power_sum",
            Family::IlyinBly => "ilyin_bly",
            Family::YolcuYolcuStokes => "yolcu_yolcu_stokes",
            Family::IlyinHigherLeading => "ilyin_higher_leading",
            Family::MainThmStokes => "main_thm_stokes",
        }
    }

    pub fn operator_kind(&self) -> &'static str {
        if Self::STOKES.contains(self) {
            "stokes"
        } else {
            "polyharmonic"
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = BoundError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        if key == "bly" {
            return Ok(Family::BerezinLiYau);
        }
        if key == "lp" {
            return Ok(Family::LevineProtter);
        }
        Family::ALL.iter().copied().find(|f| f.name() == key).ok_or_else(|| BoundError::UnknownFamily(s.to_string()))
    }
}

/// Evaluates any family; power-sum families read `q` or `p` from the request.
pub fn evaluate(family: Family, req: &BoundRequest) -> Result<BoundValue, BoundError> {
    match family {
        Family::PowerSum => power_sum_lower_bound(req, false),
        Family::PowerSumTwoTerm => power_sum_lower_bound(req, true),
        Family::NegPowerSum => neg_power_sum_upper_bound(req),
        f if Family::STOKES.contains(&f) => stokes_sum_lower_bound(f, req),
        f => eigen_sum_lower_bound(f, req),
    }
}

fn violated(reason: String) -> (Validity, Option<String>) {
    (Validity::HypothesesViolated, Some(reason))
}

fn typography_note(req: &BoundRequest, family: Family) -> Option<String> {
    (req.typography == Typography::AsPrinted).then(|| format!("{family} evaluated with the constants as printed"))
}

fn merge(a: Option<String>, b: Option<String>) -> Option<String> {
    match (a, b) {
        (Some(a), Some(b)) => Some(format!("{a}; {b}")),
        (a, b) => a.or(b),
    }
}

/// Terms of the four-term bound for volume factor `g_over_v` (`Γ(1+n/2)/|Ω|`
/// or its Stokes analogue) and inertia factor `r` (`|Ω|/I` or its analogue).
fn four_terms(n: f64, l: f64, g_over_v: f64, r: f64) -> Vec<Term> {
    let nl = n + 2.0 * l;
    let four_pi = 4.0 * PI;
    vec![
        Term { exponent: 1.0 + 2.0 * l / n, coefficient: n * four_pi.powf(l) / nl * g_over_v.powf(2.0 * l / n) },
        Term {
            exponent: 1.0 + (2.0 * l - 1.0) / n,
            coefficient: four_pi.powf((2.0 * l - 1.0) / 2.0) * l / nl * g_over_v.powf((2.0 * l - 1.0) / n) * r.sqrt(),
        },
        Term {
            exponent: 1.0 + (2.0 * l - 2.0) / n,
            coefficient: -5.0 * four_pi.powf(l - 1.0) * l / (8.0 * nl) * g_over_v.powf((2.0 * l - 2.0) / n) * r,
        },
        Term {
            exponent: 1.0 + (2.0 * l - 3.0) / n,
            coefficient: four_pi.powf((2.0 * l - 3.0) / 2.0) * l / (8.0 * nl) * g_over_v.powf((2.0 * l - 3.0) / n) * r.powf(1.5),
        },
    ]
}

fn leading_term(n: f64, l: f64, g_over_v: f64) -> Term {
    Term { exponent: 1.0 + 2.0 * l / n, coefficient: (4.0 * PI).powf(l) * n / (n + 2.0 * l) * g_over_v.powf(2.0 * l / n) }
}

/// Lower bounds for `Σ_{j<=k} λ_j` of `(-Δ)^l`.
pub fn eigen_sum_lower_bound(family: Family, req: &BoundRequest) -> Result<BoundValue, BoundError> {
    req.validate()?;
    let n = req.n as f64;
    let l = req.l as f64;
    let gv = gamma_one_plus_half(req.n) / req.volume;
    let v_over_i = req.volume / req.inertia;
    let printed = req.typography == Typography::AsPrinted;
    let needs_l1 = |name: Family| {
        if req.l == 1 {
            (Validity::ExactHypothesesMet, None)
        } else {
            violated(format!("{name} is a bound for l = 1, requested l = {}", req.l))
        }
    };
    let (terms, (validity, warning)) = match family {
        Family::LevineProtter => (vec![leading_term(n, l, gv)], (Validity::ExactHypothesesMet, None)),
        Family::BerezinLiYau => (vec![leading_term(n, 1.0, gv)], needs_l1(family)),
        Family::Melas => (
            vec![leading_term(n, 1.0, gv), Term { exponent: 1.0, coefficient: v_over_i / (24.0 * (n + 2.0)) }],
            needs_l1(family),
        ),
        Family::YolcuYolcu => {
            let mut terms = vec![
                leading_term(n, 1.0, gv),
                Term { exponent: 1.0 + 1.0 / n, coefficient: 2.0 * PI.sqrt() / (n + 2.0) * v_over_i.sqrt() * gv.powf(1.0 / n) },
                Term { exponent: 1.0, coefficient: -5.0 / (8.0 * (n + 2.0)) * v_over_i },
                Term { exponent: 1.0 - 1.0 / n, coefficient: v_over_i.powf(1.5) * gv.powf(-1.0 / n) / (16.0 * PI.sqrt() * (n + 2.0)) },
            ];
            if printed {
                terms[1].exponent = 0.0;
            }
            (terms, needs_l1(family))
        }
        Family::CswzLeading => {
            let mut second = Term {
                exponent: 1.0 + (2.0 * l - 2.0) / n,
                coefficient: (4.0 * PI).powf(l - 1.0) * n * l / 48.0 * gv.powf((2.0 * l - 2.0) / n) * v_over_i,
            };
            if printed {
                second.exponent = (2.0 * l - 2.0) / n;
            }
            (
                vec![leading_term(n, l, gv), second],
                (Validity::AsymptoticLeadingForm, Some("infinitesimal correction set to zero; not a strict bound".into())),
            )
        }
        Family::MainThm => {
            let validity = if req.order_in_main_range() {
                (Validity::ExactHypothesesMet, None)
            } else {
                violated(format!("requires 1 <= l < (n+1)/2, got n = {}, l = {}", req.n, req.l))
            };
            (four_terms(n, l, gv, v_over_i), validity)
        }
        other => return Err(BoundError::OperatorMismatch { family: other.name(), operator: "polyharmonic eigenvalue-sum" }),
    };
    let warning = merge(warning, if matches!(family, Family::YolcuYolcu | Family::CswzLeading) { typography_note(req, family) } else { None });
    Ok(BoundValue::build(req.k, Direction::Lower, validity, terms, warning))
}

fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, hi_inclusive: bool) -> Result<(), BoundError> {
    let ok = value.is_finite() && value > lo && if hi_inclusive { value <= hi } else { value < hi };
    if ok {
        Ok(())
    } else {
        let close = if hi_inclusive { ']' } else { ')' };
        Err(BoundError::Exponent { name, value, range: format!("({lo}, {hi}{close}") })
    }
}

/// Lower bound for `Σ_{j<=k} λ_j^q`, one-term form or with the second asymptotic term.
pub fn power_sum_lower_bound(req: &BoundRequest, two_term: bool) -> Result<BoundValue, BoundError> {
    req.validate()?;
    let q = req.q.ok_or(BoundError::MissingExponent("power_sum"))?;
    check_range("q", q, 0.0, 1.0, true)?;
    let n = req.n as f64;
    let lq = req.l as f64 * q;
    let gv = gamma_one_plus_half(req.n) / req.volume;
    let mut first = leading_term(n, lq, gv);
    let family = if two_term { Family::PowerSumTwoTerm } else { Family::PowerSum };
    if req.typography == Typography::AsPrinted && !two_term {
        first.coefficient = n / (n + 2.0 * lq) * (4.0 * PI).powf(lq / n) * gv.powf(2.0 * lq / n);
    }
    let mut terms = vec![first];
    let (validity, warning) = if two_term {
        terms.push(Term {
            exponent: 1.0 + (2.0 * lq - 2.0) / n,
            coefficient: (4.0 * PI).powf(lq - 1.0) * n * lq / 48.0 * (req.volume / req.inertia) * gv.powf((2.0 * lq - 2.0) / n),
        });
        (Validity::AsymptoticLeadingForm, Some("remainder of lower order dropped; not a strict bound".to_string()))
    } else {
        (Validity::ExactHypothesesMet, typography_note(req, family))
    };
    Ok(BoundValue::build(req.k, Direction::Lower, validity, terms, warning))
}

/// Upper bound for `Σ_{j<=k} λ_j^{-p}`.
pub fn neg_power_sum_upper_bound(req: &BoundRequest) -> Result<BoundValue, BoundError> {
    req.validate()?;
    let p = req.p.ok_or(BoundError::MissingExponent("neg_power_sum"))?;
    let n = req.n as f64;
    let l = req.l as f64;
    check_range("p", p, 0.0, n / (2.0 * l), false)?;
    let lp = l * p;
    let vg = req.volume / gamma_one_plus_half(req.n);
    let coefficient = match req.typography {
        Typography::Corrected => n / (n - 2.0 * lp) * (4.0 * PI).powf(-lp) * vg.powf(2.0 * lp / n),
        Typography::AsPrinted => n / (n - 2.0 * lp) * (4.0 * PI).powf(-lp / n) * vg.powf(lp / n),
    };
    let terms = vec![Term { exponent: 1.0 - 2.0 * lp / n, coefficient }];
    Ok(BoundValue::build(req.k, Direction::Upper, Validity::ExactHypothesesMet, terms, typography_note(req, Family::NegPowerSum)))
}

/// Lower bounds for `Σ_{j<=k} μ_j` of the order-`l` Stokes operator.
pub fn stokes_sum_lower_bound(family: Family, req: &BoundRequest) -> Result<BoundValue, BoundError> {
    req.validate()?;
    let n = req.n as f64;
    let l = req.l as f64;
    let s = gamma_one_plus_half(req.n) / ((n - 1.0) * req.volume);
    let v_over_i = req.volume / req.inertia;
    let r = (n - 1.0) / n * v_over_i;
    let needs_l1 = || {
        if req.l == 1 {
            (Validity::ExactHypothesesMet, None)
        } else {
            violated(format!("{family} is a bound for l = 1, requested l = {}", req.l))
        }
    };
    let (terms, (validity, warning)) = match family {
        Family::IlyinBly => (vec![leading_term(n, 1.0, s)], needs_l1()),
        Family::YolcuYolcuStokes => (
            vec![
                leading_term(n, 1.0, s),
                Term { exponent: 1.0 + 1.0 / n, coefficient: 2.0 * PI.sqrt() / (n + 2.0) * r.sqrt() * s.powf(1.0 / n) },
                Term { exponent: 1.0, coefficient: -5.0 * (n - 1.0) / (8.0 * n * (n + 2.0)) * v_over_i },
                Term { exponent: 1.0 - 1.0 / n, coefficient: r.powf(1.5) * s.powf(-1.0 / n) / (16.0 * PI.sqrt() * (n + 2.0)) },
            ],
            needs_l1(),
        ),
        Family::IlyinHigherLeading => {
            let mut terms = vec![
                leading_term(n, l, s),
                Term {
                    exponent: 1.0 + (2.0 * l - 2.0) / n,
                    coefficient: (4.0 * PI).powf(l - 1.0) * l / 48.0 * (n - 1.0) * v_over_i * s.powf((2.0 * l - 2.0) / n),
                },
            ];
            if req.typography == Typography::AsPrinted {
                terms[0].coefficient = (4.0 * PI).powf(l) * n / (n + 2.0) * s.powf(2.0 / n);
                terms[1].exponent = 1.0 + (2.0 - 2.0 * l) / n;
            }
            let note = merge(Some("infinitesimal correction set to zero; not a strict bound".into()), typography_note(req, family));
            (terms, (Validity::AsymptoticLeadingForm, note))
        }
        Family::MainThmStokes => {
            let validity = if req.order_in_main_range() {
                (Validity::ExactHypothesesMet, None)
            } else {
                violated(format!("requires 1 <= l < (n+1)/2, got n = {}, l = {}", req.n, req.l))
            };
            (four_terms(n, l, s, r), validity)
        }
        other => return Err(BoundError::OperatorMismatch { family: other.name(), operator: "stokes" }),
    };
    Ok(BoundValue::build(req.k, Direction::Lower, validity, terms, warning))
}

/// Weyl-scale reference for the `k`-th eigenvalue: `(C_n (k/|Ω|)^{2/n})^l` for
/// the polyharmonic operator, the Stokes asymptotics for `l = 1`.
pub fn weyl_reference(operator: Operator, n: usize, volume: f64, k: f64) -> Result<f64, BoundError> {
    if n < 2 {
        return Err(BoundError::Dimension(n));
    }
    if !(volume.is_finite() && volume > 0.0) {
        return Err(BoundError::NonPositive { what: "volume", value: volume });
    }
    let nf = n as f64;
    match operator {
        Operator::Polyharmonic { order } => {
            let c_n = 4.0 * PI * gamma_one_plus_half(n).powf(2.0 / nf);
            Ok((c_n * (k / volume).powf(2.0 / nf)).powi(order as i32))
        }
        Operator::Stokes { order: 1 } => {
            let omega = unit_ball_volume(n).map_err(|_| BoundError::Dimension(n))?;
            Ok(((2.0 * PI).powf(nf) / (omega * (nf - 1.0) * volume)).powf(2.0 / nf) * k.powf(2.0 / nf))
        }
        Operator::Stokes { order } => Err(BoundError::Unavailable(format!("no Weyl reference for the Stokes operator of order {order}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub k: u64,
    pub family: Family,
    pub value: f64,
    pub validity: Validity,
}

/// Evaluates every family at every `k`, ordered by `k` then family name.
pub fn compare_bounds(families: &[Family], req: &BoundRequest, ks: &[u64]) -> Result<Vec<ComparisonRow>, BoundError> {
    let mut fams = families.to_vec();
    fams.sort_by_key(|f| f.name());
    fams.dedup();
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let mut rows = Vec::with_capacity(fams.len() * ks.len());
    for &k in &ks {
        for &family in &fams {
            let b = evaluate(family, &req.with_k(k))?;
            rows.push(ComparisonRow { k, family, value: b.value, validity: b.validity });
        }
    }
    Ok(rows)
}

/// Smallest `K0 <= k_max` with `main_thm - berezin_li_yau > 0` for every
/// `k` in `[K0, k_max]`, or `None` if the difference is not positive at `k_max`.
pub fn dominance_threshold(req: &BoundRequest, k_max: u64) -> Result<Option<u64>, BoundError> {
    let mut threshold = None;
    for k in (1..=k_max).rev() {
        let r = req.with_k(k);
        let diff = eigen_sum_lower_bound(Family::MainThm, &r)?.value - eigen_sum_lower_bound(Family::BerezinLiYau, &r)?.value;
        if diff > 0.0 {
            threshold = Some(k);
        } else {
            break;
        }
    }
    Ok(threshold)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn req(n: usize, l: u32, v: f64, i: f64, k: u64) -> BoundRequest {
        BoundRequest::new(n, l, v, i, k).unwrap()
    }

    #[test]
    fn bly_unit_volume_plane() {
        let b = eigen_sum_lower_bound(Family::BerezinLiYau, &req(2, 1, 1.0, 1.0, 1)).unwrap();
        assert_relative_eq!(b.value, 2.0 * PI, max_relative = 1e-15);
        assert_eq!(b.validity, Validity::ExactHypothesesMet);
        let b2 = eigen_sum_lower_bound(Family::BerezinLiYau, &req(2, 2, 1.0, 1.0, 1)).unwrap();
        assert_eq!(b2.validity, Validity::HypothesesViolated);
        assert!(b2.warning.is_some());
    }

    #[test]
    fn melas_adds_inertia_term() {
        for k in [1u64, 7, 100] {
            let r = req(2, 1, 1.0, 1.0 / 6.0, k);
            let m = eigen_sum_lower_bound(Family::Melas, &r).unwrap().value;
            let b = eigen_sum_lower_bound(Family::BerezinLiYau, &r).unwrap().value;
            assert_relative_eq!(m - b, k as f64 / 16.0, max_relative = 1e-12);
        }
    }

    // Frozen values from 50-digit evaluation of the formulas.
    #[test]
    fn high_precision_values() {
        let r = req(2, 1, 1.0, 1.0, 1).with_q(0.5);
        assert_relative_eq!(power_sum_lower_bound(&r, false).unwrap().value, 2.363_271_801_207_354_7, max_relative = 1e-14);
        let r = req(2, 1, 1.0, 1.0, 9).with_p(0.5);
        assert_relative_eq!(neg_power_sum_upper_bound(&r).unwrap().value, 1.692_568_750_643_268_9, max_relative = 1e-14);
        let r = req(3, 1, 1.0, 1.0, 1);
        assert_relative_eq!(stokes_sum_lower_bound(Family::IlyinBly, &r).unwrap().value, 5.742_468_000_376_383_6, max_relative = 1e-14);
        let r = req(4, 2, 2.0, 0.7, 10);
        assert_relative_eq!(eigen_sum_lower_bound(Family::MainThm, &r).unwrap().value, MAIN_N4_L2, max_relative = 1e-13);
        let r = req(5, 2, 1.5, 0.3, 25);
        assert_relative_eq!(stokes_sum_lower_bound(Family::MainThmStokes, &r).unwrap().value, STOKES_N5_L2, max_relative = 1e-13);
        let r = req(3, 2, 1.0, 0.1, 1000);
        assert_relative_eq!(eigen_sum_lower_bound(Family::CswzLeading, &r).unwrap().value, CSWZ_N3_L2, max_relative = 1e-13);
        assert_relative_eq!(stokes_sum_lower_bound(Family::IlyinHigherLeading, &r).unwrap().value, ILYIN_N3_L2, max_relative = 1e-13);
    }

    const MAIN_N4_L2: f64 = 8_786.366_860_767_374;
    const STOKES_N5_L2: f64 = 19_884.157_735_016_518;
    const CSWZ_N3_L2: f64 = 991_115_258.344_598_4;
    const ILYIN_N3_L2: f64 = 393_368_264.230_370_6;

    #[test]
    fn weyl_references() {
        let w = weyl_reference(Operator::Polyharmonic { order: 1 }, 2, 1.0, 3.0).unwrap();
        assert_relative_eq!(w, 12.0 * PI, max_relative = 1e-15);
        let s = weyl_reference(Operator::Stokes { order: 1 }, 2, PI, 5.0).unwrap();
        assert_relative_eq!(s, 20.0, max_relative = 1e-14);
        assert!(matches!(weyl_reference(Operator::Stokes { order: 2 }, 3, 1.0, 1.0), Err(BoundError::Unavailable(_))));
    }

    #[test]
    fn stokes_leading_coefficient_matches_weyl() {
        for n in 2..8usize {
            let nf = n as f64;
            let vol = 1.7;
            let b = stokes_sum_lower_bound(Family::IlyinBly, &req(n, 1, vol, 1.0, 1)).unwrap();
            let integrated = nf / (nf + 2.0) * weyl_reference(Operator::Stokes { order: 1 }, n, vol, 1.0).unwrap();
            assert_relative_eq!(b.term_breakdown[0].coefficient, integrated, max_relative = 1e-12);
        }
    }

    #[test]
    fn exponent_ranges() {
        let r = req(2, 1, 1.0, 1.0, 1);
        assert!(matches!(power_sum_lower_bound(&r.with_q(1.5), false), Err(BoundError::Exponent { .. })));
        assert!(matches!(power_sum_lower_bound(&r.with_q(0.0), false), Err(BoundError::Exponent { .. })));
        assert!(matches!(power_sum_lower_bound(&r, false), Err(BoundError::MissingExponent(_))));
        assert!(matches!(neg_power_sum_upper_bound(&r.with_p(1.0)), Err(BoundError::Exponent { .. })));
        assert!(neg_power_sum_upper_bound(&r.with_p(0.999)).is_ok());
        assert!(BoundRequest::new(1, 1, 1.0, 1.0, 1).is_err());
        assert!(BoundRequest::new(2, 1, 1.0, 1.0, 0).is_err());
        assert!(BoundRequest::new(2, 0, 1.0, 1.0, 1).is_err());
        assert!(BoundRequest::new(2, 1, -1.0, 1.0, 1).is_err());
    }

    #[test]
    fn neg_power_small_p_tends_to_k() {
        let r = req(3, 1, 2.0, 0.5, 40).with_p(1e-9);
        assert_relative_eq!(neg_power_sum_upper_bound(&r).unwrap().value, 40.0, max_relative = 1e-7);
    }

    #[test]
    fn validity_flags() {
        let r = req(4, 2, 1.0, 1.0, 5);
        assert_eq!(eigen_sum_lower_bound(Family::MainThm, &r).unwrap().validity, Validity::ExactHypothesesMet);
        assert_eq!(stokes_sum_lower_bound(Family::MainThmStokes, &r).unwrap().validity, Validity::ExactHypothesesMet);
        // 2l < n + 1 fails at the boundary n = 3, l = 2
        let r = req(3, 2, 1.0, 1.0, 5);
        assert_eq!(eigen_sum_lower_bound(Family::MainThm, &r).unwrap().validity, Validity::HypothesesViolated);
        assert_eq!(eigen_sum_lower_bound(Family::CswzLeading, &r).unwrap().validity, Validity::AsymptoticLeadingForm);
        assert_eq!(stokes_sum_lower_bound(Family::IlyinHigherLeading, &r).unwrap().validity, Validity::AsymptoticLeadingForm);
        assert_eq!(stokes_sum_lower_bound(Family::MainThmStokes, &r).unwrap().validity, Validity::HypothesesViolated);
        assert!(eigen_sum_lower_bound(Family::IlyinBly, &r).is_err());
        assert!(stokes_sum_lower_bound(Family::Melas, &r).is_err());
    }

    #[test]
    fn printed_typography_differs_where_expected() {
        let r = req(3, 2, 1.3, 0.2, 50).with_q(0.7).with_p(0.4);
        let p = r.with_typography(Typography::AsPrinted);
        assert_ne!(power_sum_lower_bound(&r, false).unwrap().value, power_sum_lower_bound(&p, false).unwrap().value);
        assert_ne!(neg_power_sum_upper_bound(&r).unwrap().value, neg_power_sum_upper_bound(&p).unwrap().value);
        assert_ne!(
            stokes_sum_lower_bound(Family::IlyinHigherLeading, &r).unwrap().value,
            stokes_sum_lower_bound(Family::IlyinHigherLeading, &p).unwrap().value
        );
        assert!(eigen_sum_lower_bound(Family::CswzLeading, &p).unwrap().warning.unwrap().contains("as printed"));
        assert_eq!(eigen_sum_lower_bound(Family::MainThm, &r).unwrap(), eigen_sum_lower_bound(Family::MainThm, &p).unwrap());
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert_eq!("BLY".parse::<Family>().unwrap(), Family::BerezinLiYau);
        assert!("nope".parse::<Family>().is_err());
    }

    #[test]
    fn comparison_table_order() {
        let r = req(2, 1, 1.0, 1.0 / 6.0, 1);
        let rows = compare_bounds(&[Family::Melas, Family::BerezinLiYau], &r, &[10, 1]).unwrap();
        let keys: Vec<(u64, &str)> = rows.iter().map(|r| (r.k, r.family.name())).collect();
        assert_eq!(keys, vec![(1, "berezin_li_yau"), (1, "melas"), (10, "berezin_li_yau"), (10, "melas")]);
        let single = compare_bounds(&[Family::Melas], &r, &[3]).unwrap();
        assert_eq!(single[0].value, eigen_sum_lower_bound(Family::Melas, &r.with_k(3)).unwrap().value);
    }

    #[test]
    fn main_thm_dominates_bly_eventually() {
        let r = req(2, 1, 1.0, 1.0 / 6.0, 1);
        let k0 = dominance_threshold(&r, 10_000).unwrap();
        assert_eq!(k0, Some(1));
    }

    fn arb_request() -> impl Strategy<Value = BoundRequest> {
        (2usize..9, 1u32..5, 0.05f64..20.0, 0.01f64..10.0, 1u64..100_000)
            .prop_map(|(n, l, v, i, k)| BoundRequest::new(n, l, v, i, k).unwrap())
    }

    proptest! {
        #[test]
        fn value_is_sum_of_terms(r in arb_request(), q in 0.01f64..=1.0) {
            let r = r.with_q(q);
            for f in Family::ALL {
                let r = if f == Family::NegPowerSum { r.with_p(0.5 * r.n as f64 / (2.0 * r.l as f64)) } else { r };
                let b = evaluate(f, &r).unwrap();
                let direct: f64 = b.term_breakdown.iter().map(|t| t.coefficient * (r.k as f64).powf(t.exponent)).sum();
                prop_assert!((b.value - direct).abs() <= 1e-12 * b.term_breakdown.iter().map(|t| (t.coefficient * (r.k as f64).powf(t.exponent)).abs()).sum::<f64>());
            }
        }

        #[test]
        fn reductions(r in arb_request()) {
            let r1 = BoundRequest { l: 1, ..r };
            let a = eigen_sum_lower_bound(Family::MainThm, &r1).unwrap().value;
            let b = eigen_sum_lower_bound(Family::YolcuYolcu, &r1).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-12 * b.abs());
            let a = stokes_sum_lower_bound(Family::MainThmStokes, &r1).unwrap().value;
            let b = stokes_sum_lower_bound(Family::YolcuYolcuStokes, &r1).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-12 * b.abs());
            let a = power_sum_lower_bound(&r.with_q(1.0), false).unwrap().value;
            let b = eigen_sum_lower_bound(Family::LevineProtter, &r).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-12 * b);
        }

        #[test]
        fn melas_difference_identity(r in arb_request()) {
            let m = eigen_sum_lower_bound(Family::Melas, &r).unwrap().value;
            let b = eigen_sum_lower_bound(Family::BerezinLiYau, &r).unwrap().value;
            let expect = r.volume / r.inertia * r.k as f64 / (24.0 * (r.n as f64 + 2.0));
            prop_assert!((m - b - expect).abs() <= 1e-12 * m);
        }

        #[test]
        fn scaling_homogeneity(r in arb_request(), c in 0.2f64..5.0) {
            // dilating the domain by c scales eigenvalues by c^{-2l}
            let n = r.n as f64;
            let s = BoundRequest { volume: r.volume * c.powf(n), inertia: r.inertia * c.powf(n + 2.0), ..r };
            for f in [Family::LevineProtter, Family::CswzLeading, Family::MainThm] {
                let a = eigen_sum_lower_bound(f, &r).unwrap().value;
                let b = eigen_sum_lower_bound(f, &s).unwrap().value;
                prop_assert!((b - a * c.powf(-2.0 * r.l as f64)).abs() <= 1e-10 * a.abs().max(b.abs()));
            }
        }
    }
}
