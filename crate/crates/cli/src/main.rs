use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polybound::bounds::{compare_bounds, evaluate, BoundRequest, Family, Typography};
use polybound::geometry::{rearrangement_constants, unit_ball_volume};
use polybound::report::{fmt17, run_lemmas, run_verify, LemmaSuite, VerifyConfig, FD_BAND};
use polybound::spectra::{exact_spectrum, fd_spectrum, Method};
use polybound::{summarize, Domain};

#[derive(Parser)]
#[command(name = "polybound", version, about = "Eigenvalue-sum bounds for polyharmonic and Stokes operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Volume, moment of inertia and rearrangement constants of a domain.
    Geom {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// First k eigenvalues as CSV.
    Spectrum {
        #[command(flatten)]
        domain: DomainArgs,
        /// Operator order (1 membrane, 2 clamped plate).
        #[arg(long, default_value_t = 1)]
        l: u32,
        #[arg(long)]
        k: usize,
        /// Use finite differences with this grid step instead of the closed form.
        #[arg(long)]
        h: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Evaluate bound families. One family at one k prints the bare value.
    Bound {
        /// Comma-separated family names, or `all`.
        #[arg(long, default_value = "berezin_li_yau")]
        family: String,
        /// Dimension; taken from the domain when one is given.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        l: u32,
        #[arg(long)]
        vol: Option<f64>,
        /// Moment of inertia; defaults to the ball value for the given volume.
        #[arg(long)]
        inertia: Option<f64>,
        #[command(flatten)]
        domain: DomainArgs,
        /// Comma-separated k values or a range `a..b`.
        #[arg(long)]
        k: String,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        /// Evaluate with the constants exactly as typeset rather than corrected.
        #[arg(long)]
        as_printed: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare eigenvalue sums with bounds over a k range; exits 1 if a strict row fails.
    Verify {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, default_value_t = 1)]
        l: u32,
        /// Range `a..b`, or a single `b` meaning `1..b`.
        #[arg(long)]
        k: String,
        /// Comma-separated family names, or `all` for every eigenvalue-sum family.
        #[arg(long, default_value = "all")]
        family: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        /// Grid step for `--method fd`.
        #[arg(long, default_value_t = 1.0 / 64.0)]
        h: f64,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Relative tolerance band for finite-difference rows.
        #[arg(long, default_value_t = FD_BAND)]
        fd_band: f64,
        /// Also write two-column `.dat` series into this directory.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run lemma suites and print JSON reports; exits 1 if any suite fails.
    Lemmas {
        /// Comma-separated suite names, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Fd,
}

/// A domain from a key-value string, a file, or individual shape flags.
#[derive(Args, Default)]
struct DomainArgs {
    /// Key-value description, e.g. `shape=box lengths=1,2`, or a bare `square`/`disk`.
    #[arg(long)]
    domain: Option<String>,
    /// File holding a key-value description.
    #[arg(long)]
    domain_file: Option<PathBuf>,
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    side: Option<f64>,
    #[arg(long)]
    lengths: Option<String>,
    #[arg(long)]
    axes: Option<String>,
    /// Polygon vertices `x,y;x,y;...`, counterclockwise.
    #[arg(long)]
    vertices: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
}

impl DomainArgs {
    fn description(&self) -> Result<Option<String>> {
        let mut text = match (&self.domain, &self.domain_file) {
            (Some(_), Some(_)) => bail!("give --domain or --domain-file, not both"),
            (Some(d), None) => d.clone(),
            (None, Some(path)) => fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
            (None, None) => String::new(),
        };
        if let Some(shape) = &self.shape {
            if !text.is_empty() {
                bail!("--shape conflicts with --domain");
            }
            text = format!("shape={shape}");
        }
        let extras = [
            ("radius", self.radius.map(|v| v.to_string())),
            ("side", self.side.map(|v| v.to_string())),
            ("lengths", self.lengths.clone()),
            ("axes", self.axes.clone()),
            ("vertices", self.vertices.clone()),
            ("dim", self.dim.map(|v| v.to_string())),
        ];
        for (key, value) in extras {
            if let Some(v) = value {
                if text.is_empty() {
                    bail!("--{key} needs --shape or --domain");
                }
                text.push_str(&format!(" {key}={v}"));
            }
        }
        Ok((!text.trim().is_empty()).then_some(text))
    }

    fn parse(&self) -> Result<Option<Domain>> {
        self.description()?.map(|d| d.parse::<Domain>().map_err(|e| anyhow!(e))).transpose()
    }

    fn require(&self) -> Result<Domain> {
        self.parse()?.ok_or_else(|| anyhow!("a domain is required (--domain, --domain-file or --shape)"))
    }
}

#[derive(Args)]
struct OutArgs {
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutArgs {
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
                Ok(())
            }
        }
    }
}

fn parse_ks(raw: &str) -> Result<Vec<u64>> {
    let mut ks = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().with_context(|| format!("bad k {a:?}"))?;
            let b: u64 = b.trim_start_matches('=').trim().parse().with_context(|| format!("bad k {b:?}"))?;
            ks.extend(a..=b);
        } else {
            ks.push(part.parse().with_context(|| format!("bad k {part:?}"))?);
        }
    }
    Ok(ks)
}

fn parse_k_range(raw: &str) -> Result<std::ops::RangeInclusive<u64>> {
    match raw.split_once("..") {
        Some((a, b)) => {
            let a = a.trim().parse().with_context(|| format!("bad k {a:?}"))?;
            let b = b.trim_start_matches('=').trim().parse().with_context(|| format!("bad k {b:?}"))?;
            Ok(a..=b)
        }
        None => Ok(1..=raw.trim().parse().with_context(|| format!("bad k {raw:?}"))?),
    }
}

fn parse_families(raw: &str, all: &[Family]) -> Result<Vec<Family>> {
    if raw.trim().eq_ignore_ascii_case("all") {
        return Ok(all.to_vec());
    }
    raw.split(',').map(|f| f.parse::<Family>().map_err(|e| anyhow!(e))).collect()
}

fn geom(domain: &DomainArgs, out: &OutArgs) -> Result<ExitCode> {
    let domain = domain.require()?;
    let g = summarize(&domain)?;
    let c = rearrangement_constants(&g);
    let text = format!(
        "domain {}\ndimension {}\nvolume {}\ninertia {}\nball_volume {}\nM {}\nL {}\nM_S {}\nL_S {}\n",
        domain,
        g.dimension,
        fmt17(g.volume),
        fmt17(g.inertia),
        fmt17(unit_ball_volume(g.dimension)?),
        fmt17(c.m),
        fmt17(c.lcap),
        fmt17(c.m_s),
        fmt17(c.l_s),
    );
    out.emit(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn spectrum(domain: &DomainArgs, l: u32, k: usize, h: Option<f64>, out: &OutArgs) -> Result<ExitCode> {
    let domain = domain.require()?;
    let s = match h {
        Some(h) => fd_spectrum(&domain, l, h, k)?,
        None => exact_spectrum(&domain, l, k)?,
    };
    let mut buf = Vec::new();
    s.write_csv(&mut buf)?;
    out.emit(std::str::from_utf8(&buf)?)?;
    Ok(ExitCode::SUCCESS)
}

/// Ball value `n/(n+2) V (V/ω_n)^{2/n}`, the smallest inertia for a given volume.
fn ball_inertia(n: usize, volume: f64) -> Result<f64> {
    let nf = n as f64;
    Ok(nf / (nf + 2.0) * volume * (volume / unit_ball_volume(n)?).powf(2.0 / nf))
}

#[allow(clippy::too_many_arguments)]
fn bound(
    family: &str,
    n: Option<usize>,
    l: u32,
    vol: Option<f64>,
    inertia: Option<f64>,
    domain: &DomainArgs,
    k: &str,
    q: Option<f64>,
    p: Option<f64>,
    as_printed: bool,
    out: &OutArgs,
) -> Result<ExitCode> {
    let families = parse_families(family, &Family::ALL)?;
    let ks = parse_ks(k)?;
    let (n, volume, inertia) = match domain.parse()? {
        Some(d) => {
            if n.is_some() || vol.is_some() || inertia.is_some() {
                bail!("--n, --vol and --inertia come from the domain when --domain is given");
            }
            let g = summarize(&d)?;
            (g.dimension, g.volume, g.inertia)
        }
        None => {
            let n = n.ok_or_else(|| anyhow!("--n is required without a domain"))?;
            let volume = vol.ok_or_else(|| anyhow!("--vol is required without a domain"))?;
            let inertia = match inertia {
                Some(i) => i,
                None => ball_inertia(n, volume)?,
            };
            (n, volume, inertia)
        }
    };
    let mut req = BoundRequest::new(n, l, volume, inertia, 1)?;
    if let Some(q) = q {
        req = req.with_q(q);
    }
    if let Some(p) = p {
        req = req.with_p(p);
    }
    if as_printed {
        req = req.with_typography(Typography::AsPrinted);
    }
    if let ([family], [k]) = (families.as_slice(), ks.as_slice()) {
        let b = evaluate(*family, &req.with_k(*k))?;
        if let Some(w) = &b.warning {
            eprintln!("warning: {w}");
        }
        eprintln!("validity: {}", b.validity);
        out.emit(&format!("{}\n", fmt17(b.value)))?;
        return Ok(ExitCode::SUCCESS);
    }
    let rows = compare_bounds(&families, &req, &ks)?;
    let mut text = String::from("k,family,bound,validity\n");
    for r in rows {
        text.push_str(&format!("{},{},{},{}\n", r.k, r.family, fmt17(r.value), r.validity));
    }
    out.emit(&text)?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn verify(
    domain: &DomainArgs,
    l: u32,
    k: &str,
    family: &str,
    method: MethodArg,
    h: f64,
    q: f64,
    p: f64,
    fd_band: f64,
    plot_dir: Option<&PathBuf>,
    out: &OutArgs,
) -> Result<ExitCode> {
    let domain = domain.require()?;
    let method = match method {
        MethodArg::Exact => Method::ExactLattice,
        MethodArg::Fd => Method::FiniteDifference { h },
    };
    let families = parse_families(family, &[&Family::EIGEN_SUM[..], &[Family::PowerSum, Family::NegPowerSum]].concat())?;
    let mut config = VerifyConfig::new(domain, l, parse_k_range(k)?, families, method);
    config.q = q;
    config.p = p;
    config.fd_band = fd_band;
    let report = run_verify(&config)?;
    out.emit(&report.to_csv())?;
    if let Some(dir) = plot_dir {
        report.write_plot_files(dir)?;
    }
    Ok(if report.all_strict_satisfied() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn lemmas(suite: &str, seed: u64, samples: usize, out: &OutArgs) -> Result<ExitCode> {
    let suites = LemmaSuite::parse_selector(suite)?;
    let reports = run_lemmas(&suites, seed, samples)?;
    let mut text = serde_json::to_string_pretty(&reports)?;
    text.push('\n');
    out.emit(&text)?;
    Ok(if reports.iter().all(|r| r.pass) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Geom { domain, out } => geom(domain, out),
        Command::Spectrum { domain, l, k, h, out } => spectrum(domain, *l, *k, *h, out),
        Command::Bound { family, n, l, vol, inertia, domain, k, q, p, as_printed, out } => {
            bound(family, *n, *l, *vol, *inertia, domain, k, *q, *p, *as_printed, out)
        }
        Command::Verify { domain, l, k, family, method, h, q, p, fd_band, plot_dir, out } => {
            verify(domain, *l, k, family, *method, *h, *q, *p, *fd_band, plot_dir.as_ref(), out)
        }
        Command::Lemmas { suite, seed, samples, out } => lemmas(suite, *seed, *samples, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
