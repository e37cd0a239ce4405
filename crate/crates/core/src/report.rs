//! Verification tables, lemma suites and number formatting shared by the CLI.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{evaluate, BoundRequest, Direction, Family, Validity};
use crate::error::ReportError;
use crate::geometry::{summarize, Domain};
use crate::lemmas::{self, LemmaReport};
use crate::spectra::{exact_spectrum, fd_spectrum, sums, Method};

/// 17 significant digits, positional for moderate magnitudes (`2π` gives
/// `6.2831853071795862`), scientific otherwise.
pub fn fmt17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.0000000000000000".into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let body = if exp >= 0 {
        let split = exp as usize + 1;
        if split >= digits.len() {
            format!("{digits}{}.0", "0".repeat(split - digits.len()))
        } else {
            format!("{}.{}", &digits[..split], &digits[split..])
        }
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    format!("{sign}{body}")
}

/// Relative band for finite-difference rows: `margin >= -band · |bound|`.
pub const FD_BAND: f64 = 0.05;

pub const CSV_HEADER: &str = "domain,operator,l,k,method,eigen_sum,family,bound,margin,satisfied,validity";

/// What a verification sweep compares.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub domain: Domain,
    pub order: u32,
    pub ks: RangeInclusive<u64>,
    pub families: Vec<Family>,
    pub method: Method,
    /// Exponent for `power_sum` families.
    pub q: f64,
    /// Exponent for `neg_power_sum`.
    pub p: f64,
    pub fd_band: f64,
}

impl VerifyConfig {
    pub fn new(domain: Domain, order: u32, ks: RangeInclusive<u64>, families: Vec<Family>, method: Method) -> Self {
        Self { domain, order, ks, families, method, q: 0.5, p: 0.5, fd_band: FD_BAND }
    }
}

/// One (k, family) comparison. `margin` is the slack in the bound's favour:
/// `sum - bound` for lower bounds, `bound - sum` for upper bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRow {
    pub domain: String,
    pub operator: String,
    pub l: u32,
    pub k: u64,
    pub method: String,
    pub eigen_sum: f64,
    pub family: Family,
    pub bound: f64,
    pub margin: f64,
    pub satisfied: bool,
    pub validity: Validity,
    /// Exact spectrum and all hypotheses met: the verdict is `margin >= 0` with no tolerance.
    pub strict: bool,
}

impl VerificationRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.domain,
            self.operator,
            self.l,
            self.k,
            self.method,
            fmt17(self.eigen_sum),
            self.family,
            fmt17(self.bound),
            fmt17(self.margin),
            self.satisfied,
            self.validity
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub rows: Vec<VerificationRow>,
}

impl VerificationReport {
    /// False iff some strict row has a negative margin.
    pub fn all_strict_satisfied(&self) -> bool {
        self.rows.iter().filter(|r| r.strict).all(|r| r.satisfied)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for row in &self.rows {
            writeln!(out, "{}", row.csv_line())?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Two-column `(k, value)` series keyed by file stem: `bound_<family>`
    /// and `sum_<family>` for every family present.
    pub fn plot_series(&self) -> BTreeMap<String, Vec<(u64, f64)>> {
        let mut series: BTreeMap<String, Vec<(u64, f64)>> = BTreeMap::new();
        for r in &self.rows {
            series.entry(format!("bound_{}", r.family)).or_default().push((r.k, r.bound));
            series.entry(format!("sum_{}", r.family)).or_default().push((r.k, r.eigen_sum));
        }
        series
    }

    /// Writes every plot series to `<dir>/<stem>.dat`, returning the paths written.
    pub fn write_plot_files(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>, ReportError> {
        let io = |path: &Path, source| ReportError::Io { path: path.display().to_string(), source };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let mut written = Vec::new();
        for (stem, points) in self.plot_series() {
            let path = dir.join(format!("{stem}.dat"));
            let text: String = points.iter().map(|(k, v)| format!("{k} {}\n", fmt17(*v))).collect();
            std::fs::write(&path, text).map_err(|e| io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Compares running eigenvalue sums against every requested bound for each `k`
/// in the range. Rows are ordered by `k`, then family name.
pub fn run_verify(config: &VerifyConfig) -> Result<VerificationReport, ReportError> {
    let (k_min, k_max) = (*config.ks.start(), *config.ks.end());
    if k_min == 0 {
        return Err(ReportError::Usage("k range must start at 1 or above".into()));
    }
    if k_min > k_max {
        return Ok(VerificationReport { rows: Vec::new() });
    }
    let mut families = config.families.clone();
    families.sort_by_key(|f| f.name());
    families.dedup();
    if let Some(f) = families.iter().find(|f| f.operator_kind() != "polyharmonic") {
        return Err(ReportError::Usage(format!("{f} bounds the Stokes operator, whose spectrum is not computed here")));
    }
    let summary = summarize(&config.domain)?;
    let base = BoundRequest::from_summary(&summary, config.order, 1)?.with_q(config.q).with_p(config.p);
    let count = k_max as usize;
    let spectrum = match config.method {
        Method::FiniteDifference { h } => fd_spectrum(&config.domain, config.order, h, count)?,
        _ => exact_spectrum(&config.domain, config.order, count)?,
    };
    let totals = sums(&spectrum, count, Some(config.q), Some(config.p))?;
    let domain_id = config.domain.id();
    let operator = spectrum.operator.to_string();
    let method = spectrum.method.label();
    let exact = spectrum.method.is_exact();
    let mut rows = Vec::with_capacity(families.len() * (k_max - k_min + 1) as usize);
    for k in k_min..=k_max {
        let i = k as usize - 1;
        let req = base.with_k(k);
        for &family in &families {
            let bound = evaluate(family, &req)?;
            let sum = match family {
                Family::PowerSum | Family::PowerSumTwoTerm => totals.power_sums.as_ref().expect("q requested").1[i],
                Family::NegPowerSum => totals.neg_power_sums.as_ref().expect("p requested").1[i],
                _ => totals.partial_sums[i],
            };
            let margin = match bound.direction {
                Direction::Lower => sum - bound.value,
                Direction::Upper => bound.value - sum,
            };
            let strict = exact && bound.validity == Validity::ExactHypothesesMet;
            let satisfied = if exact { margin >= 0.0 } else { margin >= -config.fd_band * bound.value.abs() };
            rows.push(VerificationRow {
                domain: domain_id.clone(),
                operator: operator.clone(),
                l: config.order,
                k,
                method: method.clone(),
                eigen_sum: sum,
                family,
                bound: bound.value,
                margin,
                satisfied,
                validity: bound.validity,
                strict,
            });
        }
    }
    Ok(VerificationReport { rows })
}

/// Named groups of lemma checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LemmaSuite {
    Polynomial,
    Shift,
    Moment,
    Fourier,
    Rearrangement,
}

impl LemmaSuite {
    pub const ALL: [LemmaSuite; 5] =
        [LemmaSuite::Polynomial, LemmaSuite::Shift, LemmaSuite::Moment, LemmaSuite::Fourier, LemmaSuite::Rearrangement];

    pub fn name(&self) -> &'static str {
        match self {
            LemmaSuite::Polynomial => "polynomial",
            LemmaSuite::Shift => "shift",
            LemmaSuite::Moment => "moment",
            LemmaSuite::Fourier => "fourier",
            LemmaSuite::Rearrangement => "rearrangement",
        }
    }

    /// Parses a suite name; `all` expands to every suite.
    pub fn parse_selector(s: &str) -> Result<Vec<LemmaSuite>, ReportError> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(Self::ALL.to_vec());
        }
        s.split(',').map(str::parse).collect()
    }
}

impl fmt::Display for LemmaSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaSuite {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase();
        Self::ALL.iter().copied().find(|x| x.name() == key).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|x| x.name()).collect();
            ReportError::Usage(format!("unknown lemma suite {s:?}; expected one of {} or all", names.join(", ")))
        })
    }
}

/// `(n, l)` pairs for the fixed-profile shift checks.
const SHIFT_CASES: [(u32, u32); 6] = [(2, 1), (3, 1), (3, 2), (4, 2), (5, 2), (6, 3)];

fn merge_reports(lemma: &str, reports: Vec<LemmaReport>) -> LemmaReport {
    let samples = reports.iter().map(|r| r.samples).sum();
    let pass = reports.iter().all(|r| r.pass);
    let worst = reports.into_iter().min_by(|a, b| a.worst_gap.total_cmp(&b.worst_gap)).expect("at least one report");
    LemmaReport { lemma: lemma.to_string(), samples, worst_gap: worst.worst_gap, worst_case_inputs: worst.worst_case_inputs, pass }
}

/// Runs one suite. `samples` sizes the randomized sweeps; the shift and
/// Fourier suites use fixed inputs.
pub fn run_lemma_suite(suite: LemmaSuite, seed: u64, samples: usize) -> Result<LemmaReport, ReportError> {
    Ok(match suite {
        LemmaSuite::Polynomial => lemmas::polynomial_sweep(seed, samples),
        LemmaSuite::Shift => {
            let reports = SHIFT_CASES.iter().map(|&(n, l)| lemmas::shift_suite(n, l)).collect::<Result<Vec<_>, _>>()?;
            merge_reports("shift", reports)
        }
        LemmaSuite::Moment => lemmas::moment_inequality_sweep(seed, samples, 1.0),
        LemmaSuite::Fourier => {
            let grid = lemmas::FrequencyGrid { half_width: 30.0, points: 61 };
            lemmas::fourier_density_box(5, [1.0, 1.0], grid)?.1
        }
        LemmaSuite::Rearrangement => lemmas::plateau_ramp_sweep(seed, samples),
    })
}

/// Runs each selected suite in order.
pub fn run_lemmas(suites: &[LemmaSuite], seed: u64, samples: usize) -> Result<Vec<LemmaReport>, ReportError> {
    suites.iter().map(|&s| run_lemma_suite(s, seed, samples)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::Method;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(std::f64::consts::TAU), "6.2831853071795862");
        assert_eq!(fmt17(-0.125), "-0.12500000000000000");
        assert_eq!(fmt17(1e-7), "9.9999999999999995e-8");
        assert_eq!(fmt17(12345.0), "12345.000000000000");
        for x in [std::f64::consts::PI * 1e5, 2.0f64.sqrt() * 1e-3, 0.1] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
    }

    fn square_config(ks: RangeInclusive<u64>) -> VerifyConfig {
        let families = vec![Family::BerezinLiYau, Family::Melas, Family::YolcuYolcu, Family::MainThm];
        VerifyConfig::new(Domain::unit_square(), 1, ks, families, Method::ExactLattice)
    }

    #[test]
    #[allow(clippy::reversed_empty_ranges)]
    fn empty_range_gives_header_only() {
        let report = run_verify(&square_config(5..=4)).unwrap();
        assert_eq!(report.to_csv(), format!("{CSV_HEADER}\n"));
        assert!(report.all_strict_satisfied());
    }

    #[test]
    fn square_rows_are_ordered_and_satisfied() {
        let report = run_verify(&square_config(1..=30)).unwrap();
        assert_eq!(report.rows.len(), 120);
        assert!(report.rows.iter().all(|r| r.strict && r.satisfied));
        assert!(report.rows.windows(2).all(|w| (w[0].k, w[0].family.name()) < (w[1].k, w[1].family.name())));
        let csv = report.to_csv();
        assert_eq!(csv, run_verify(&square_config(1..=30)).unwrap().to_csv());
        let first = csv.lines().nth(1).unwrap();
        assert!(first.starts_with("box(1x1),polyharmonic,1,1,exact-lattice,19.739208802178716,berezin_li_yau,6.2831853071795862,"), "{first}");
    }

    #[test]
    fn clamped_disk_against_levine_protter() {
        let cfg = VerifyConfig::new(Domain::unit_disk(), 2, 1..=50, vec![Family::LevineProtter], Method::ExactBessel);
        let report = run_verify(&cfg).unwrap();
        assert_eq!(report.rows.len(), 50);
        assert!(report.all_strict_satisfied());
        assert!(report.rows.iter().all(|r| r.strict));
    }

    #[test]
    fn violated_hypotheses_are_not_strict() {
        let cfg = VerifyConfig::new(Domain::unit_disk(), 2, 1..=3, vec![Family::BerezinLiYau], Method::ExactBessel);
        let report = run_verify(&cfg).unwrap();
        assert!(report.rows.iter().all(|r| !r.strict && r.validity == Validity::HypothesesViolated));
    }

    #[test]
    fn upper_bound_margin_sign() {
        let cfg = VerifyConfig::new(Domain::unit_square(), 1, 1..=20, vec![Family::NegPowerSum, Family::PowerSum], Method::ExactLattice);
        let report = run_verify(&cfg).unwrap();
        for r in &report.rows {
            let expected = if r.family == Family::NegPowerSum { r.bound - r.eigen_sum } else { r.eigen_sum - r.bound };
            assert_eq!(r.margin, expected);
        }
        assert!(report.all_strict_satisfied());
    }

    #[test]
    fn stokes_families_are_rejected() {
        let cfg = VerifyConfig::new(Domain::unit_square(), 1, 1..=3, vec![Family::IlyinBly], Method::ExactLattice);
        assert!(matches!(run_verify(&cfg), Err(ReportError::Usage(_))));
    }

    #[test]
    fn plot_files_have_two_columns() {
        let dir = std::env::temp_dir().join(format!("polybound-plot-{}", std::process::id()));
        let report = run_verify(&square_config(1..=5)).unwrap();
        let paths = report.write_plot_files(&dir).unwrap();
        assert_eq!(paths.len(), 8);
        let text = std::fs::read_to_string(dir.join("bound_melas.dat")).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().all(|l| l.split(' ').count() == 2));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn suite_selector() {
        assert_eq!(LemmaSuite::parse_selector("all").unwrap().len(), 5);
        assert_eq!(LemmaSuite::parse_selector("shift,fourier").unwrap(), vec![LemmaSuite::Shift, LemmaSuite::Fourier]);
        assert!(matches!("nonsense".parse::<LemmaSuite>(), Err(ReportError::Usage(_))));
    }

    #[test]
    fn lemma_runs_are_deterministic() {
        let a = run_lemmas(&[LemmaSuite::Polynomial, LemmaSuite::Shift], 42, 300).unwrap();
        assert!(a.iter().all(|r| r.pass), "{a:?}");
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&run_lemmas(&[LemmaSuite::Polynomial, LemmaSuite::Shift], 42, 300).unwrap()).unwrap());
    }
}
