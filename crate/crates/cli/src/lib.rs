//! Argument parsing and command implementations behind the `polymix` binary.
//!
//! Every command writes to caller-supplied streams so the output can be
//! tested byte for byte.

use std::fmt;
use std::io::{self, Write};

use clap::{Parser, Subcommand, ValueEnum};
use polymix::catalog;
use polymix::entropy::{self, EntropyMode, EntropyOrder};
use polymix::stress_strength::{self, SeriesSummation, DISCREPANCY_WARN};
use polymix::{Error, Family, FamilyParams, QuadratureControl, SeriesControl};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// A distribution named on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum DistSpec {
    Named { name: String, params: Vec<f64> },
    Raw(FamilyParams),
}

impl DistSpec {
    pub fn build(&self) -> polymix::Result<Family> {
        match self {
            DistSpec::Named { name, params } => catalog::build_named(name, params),
            DistSpec::Raw(p) => polymix::make_family(p.clone()),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed input; `column` is 1-based within the whitespace-stripped text.
    Parse { column: usize, message: String },
    Usage(String),
    Core(Error),
    Io(io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse { column, message } => write!(f, "parse error at column {column}: {message}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_real(text: &str, column: usize) -> CliResult<f64> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Parse { column, message: format!("`{text}` is not a finite decimal number") })
}

/// Splits `text` on `sep`, yielding each piece with its 1-based start column
/// offset by `base`.
fn pieces(text: &str, sep: char, base: usize) -> impl Iterator<Item = (usize, &str)> {
    let mut col = base;
    text.split(sep).map(move |p| {
        let here = col;
        col += p.len() + 1;
        (here, p)
    })
}

/// Parses `name:p1,p2,...` or `raw:d=…,beta=…,theta=t0;t1;…`. Whitespace is ignored.
pub fn parse_dist_spec(text: &str) -> CliResult<DistSpec> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(CliError::Parse { column: 1, message: "empty distribution spec".into() });
    }
    let (name, rest) = match compact.split_once(':') {
        Some((n, r)) => (n, r),
        None => (compact.as_str(), ""),
    };
    let base = name.len() + 2;
    if name == "raw" {
        return parse_raw(rest, base);
    }
    let entry = catalog::lookup(name)?;
    let params = if rest.is_empty() {
        Vec::new()
    } else {
        pieces(rest, ',', base).map(|(col, p)| parse_real(p, col)).collect::<CliResult<Vec<_>>>()?
    };
    if params.len() != entry.arity() {
        return Err(Error::Arity { name: name.into(), expected: entry.arity(), got: params.len() }.into());
    }
    Ok(DistSpec::Named { name: name.into(), params })
}

fn parse_raw(rest: &str, base: usize) -> CliResult<DistSpec> {
    let (mut d, mut beta, mut theta) = (None, None, None);
    for (col, field) in pieces(rest, ',', base) {
        let Some((key, value)) = field.split_once('=') else {
            return Err(CliError::Parse { column: col, message: format!("expected key=value, got `{field}`") });
        };
        let vcol = col + key.len() + 1;
        match key {
            "d" => d = Some(parse_real(value, vcol)?),
            "beta" => beta = Some(parse_real(value, vcol)?),
            "theta" => {
                theta = Some(pieces(value, ';', vcol).map(|(c, t)| parse_real(t, c)).collect::<CliResult<Vec<_>>>()?)
            }
            other => {
                return Err(CliError::Parse { column: col, message: format!("unknown key `{other}` (expected d, beta, theta)") })
            }
        }
    }
    let missing = |k: &str| CliError::Parse { column: base, message: format!("raw spec is missing `{k}`") };
    let params = FamilyParams::new(theta.ok_or_else(|| missing("theta"))?, beta.ok_or_else(|| missing("beta"))?, d.ok_or_else(|| missing("d"))?)?;
    Ok(DistSpec::Raw(params))
}

/// Shortest round-trip decimal; scientific notation outside `[1e-5, 1e16)`.
pub fn format_real(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// `start:stop:count` evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn parse(text: &str) -> CliResult<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let parts: Vec<(usize, &str)> = pieces(&compact, ':', 1).collect();
        if parts.len() != 3 {
            return Err(CliError::Parse { column: 1, message: format!("grid must be start:stop:count, got `{text}`") });
        }
        let start = parse_real(parts[0].1, parts[0].0)?;
        let stop = parse_real(parts[1].1, parts[1].0)?;
        let count: usize = parts[2]
            .1
            .parse()
            .map_err(|_| CliError::Parse { column: parts[2].0, message: format!("`{}` is not a count", parts[2].1) })?;
        if count < 2 {
            return Err(CliError::Usage(format!("grid count must be at least 2, got {count}")));
        }
        if start < 0.0 || stop < start {
            return Err(CliError::Usage(format!("grid needs 0 <= start <= stop, got {start}:{stop}")));
        }
        Ok(Self { start, stop, count })
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(move |k| if k + 1 == self.count { self.stop } else { self.start + k as f64 * step })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalQuantity {
    Pdf,
    Cdf,
    Survival,
    Hazard,
}

impl EvalQuantity {
    fn label(self) -> &'static str {
        match self {
            EvalQuantity::Pdf => "pdf",
            EvalQuantity::Cdf => "cdf",
            EvalQuantity::Survival => "survival",
            EvalQuantity::Hazard => "hazard",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StressMethod {
    Series,
    Quadrature,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EntropyMethod {
    Auto,
    Integer,
    Quadrature,
}

/// CSV with header `x,<quantities>`. A hazard whose survival underflows is written as `nan`.
pub fn cmd_eval(out: &mut dyn Write, dist: &DistSpec, grid: &Grid, quantities: &[EvalQuantity]) -> CliResult<()> {
    let f = dist.build()?;
    let header: Vec<&str> = std::iter::once("x").chain(quantities.iter().map(|q| q.label())).collect();
    writeln!(out, "{}", header.join(","))?;
    for x in grid.points() {
        let mut row = vec![format_real(x)];
        for q in quantities {
            let v = match q {
                EvalQuantity::Pdf => f.pdf(x)?,
                EvalQuantity::Cdf => f.cdf(x)?,
                EvalQuantity::Survival => f.survival(x)?,
                EvalQuantity::Hazard => match f.hazard(x) {
                    Err(Error::TailUnderflow(_)) => f64::NAN,
                    other => other?,
                },
            };
            row.push(format_real(v));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn cmd_moments(out: &mut dyn Write, dist: &DistSpec, max_r: u32) -> CliResult<()> {
    let f = dist.build()?;
    writeln!(out, "quantity,value")?;
    for r in 1..=max_r {
        writeln!(out, "E[X^{r}],{}", format_real(f.raw_moment(r as f64)?))?;
    }
    let s = f.summary_stats()?;
    writeln!(out, "mean,{}", format_real(s.mean))?;
    writeln!(out, "variance,{}", format_real(s.variance))?;
    writeln!(out, "skewness,{}", format_real(s.skewness))?;
    writeln!(out, "excess_kurtosis,{}", format_real(s.excess_kurtosis))?;
    Ok(())
}

/// One line per nonzero coefficient: `index: component weight w`.
pub fn cmd_mp(out: &mut dyn Write, dist: &DistSpec) -> CliResult<()> {
    let view = dist.build()?.mixture_view();
    for (c, w) in view.components.iter().zip(&view.weights) {
        writeln!(out, "{}: {} weight {}", c.index, c.describe(), format_real(*w))?;
    }
    Ok(())
}

pub fn cmd_sample(out: &mut dyn Write, dist: &DistSpec, n: usize, seed: u64) -> CliResult<()> {
    let f = dist.build()?;
    let mut buf = io::BufWriter::new(out);
    for x in f.sample(n, seed)? {
        writeln!(buf, "{}", format_real(x))?;
    }
    buf.flush()?;
    Ok(())
}

fn summation_label(s: SeriesSummation) -> &'static str {
    match s {
        SeriesSummation::Direct => "direct",
        SeriesSummation::Pfaff => "pfaff",
        SeriesSummation::Levin => "levin",
    }
}

/// `P(stress < strength)` as `key,value` lines.
pub fn cmd_stress(
    out: &mut dyn Write,
    err: &mut dyn Write,
    strength: &DistSpec,
    stress: &DistSpec,
    method: StressMethod,
    ctl: &SeriesControl,
    tol: f64,
) -> CliResult<()> {
    let x = strength.build()?;
    let y = stress.build()?;
    match method {
        StressMethod::Quadrature => {
            writeln!(out, "r_quadrature,{}", format_real(stress_strength::reliability_quadrature(&x, &y, tol)?))?;
        }
        StressMethod::Series => {
            let (r, terms, how) = stress_strength::reliability_series_detailed(&x, &y, ctl)?;
            writeln!(out, "r_series,{}", format_real(r))?;
            writeln!(out, "summation,{}", summation_label(how))?;
            writeln!(out, "terms,{terms}")?;
        }
        StressMethod::Both => {
            let res = stress_strength::reliability(&x, &y, ctl, tol)?;
            writeln!(out, "r_quadrature,{}", format_real(res.r_quadrature))?;
            match (res.r_series, res.summation, res.discrepancy) {
                (Some(r), Some(how), Some(gap)) => {
                    writeln!(out, "r_series,{}", format_real(r))?;
                    writeln!(out, "summation,{}", summation_label(how))?;
                    writeln!(out, "terms,{}", res.terms_used)?;
                    writeln!(out, "discrepancy,{}", format_real(gap))?;
                    if gap > DISCREPANCY_WARN {
                        writeln!(err, "warning: series and quadrature differ by {}", format_real(gap))?;
                    }
                }
                _ => {
                    writeln!(out, "r_series,NA")?;
                    if let Some(e) = res.series_error {
                        writeln!(err, "note: series not summable: {e}")?;
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn cmd_entropy(out: &mut dyn Write, dist: &DistSpec, alpha: f64, method: EntropyMethod, tol: f64) -> CliResult<()> {
    let f = dist.build()?;
    let order = match method {
        EntropyMethod::Auto => EntropyOrder::new(alpha)?,
        EntropyMethod::Integer => EntropyOrder::with_mode(alpha, EntropyMode::IntegerExact)?,
        EntropyMethod::Quadrature => EntropyOrder::with_mode(alpha, EntropyMode::Quadrature)?,
    };
    writeln!(out, "{}", format_real(entropy::tsallis(&f, &order, tol)?))?;
    Ok(())
}

/// Oracle report table; returns whether every check passed.
pub fn cmd_check(out: &mut dyn Write, dist: &DistSpec) -> CliResult<bool> {
    let f = dist.build()?;
    let reports = polymix::check_family(&f, &QuadratureControl::default());
    writeln!(out, "quantity,closed_form,oracle,abs_diff,tolerance,status")?;
    for r in &reports {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.quantity,
            format_real(r.closed_form),
            format_real(r.oracle_value),
            format_real(r.abs_diff),
            format_real(r.tolerance),
            if r.passed { "pass" } else { "FAIL" }
        )?;
    }
    Ok(reports.iter().all(|r| r.passed))
}

pub fn cmd_list(out: &mut dyn Write) -> CliResult<()> {
    writeln!(out, "name,arity,parameters,reference")?;
    for e in catalog::entries() {
        writeln!(out, "{},{},{},{}", e.name, e.arity(), e.params.join(";"), e.reference.replace(',', ";"))?;
    }
    Ok(())
}

fn dist_arg(text: &str) -> Result<DistSpec, String> {
    parse_dist_spec(text).map_err(|e| e.to_string())
}

fn grid_arg(text: &str) -> Result<Grid, String> {
    Grid::parse(text).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "polymix", version, about = "Polynomial-coefficient exponential-power mixture distributions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate pdf/cdf/survival/hazard on a grid, as CSV.
    Eval {
        #[arg(long, value_parser = dist_arg)]
        dist: DistSpec,
        #[arg(long, value_parser = grid_arg)]
        grid: Grid,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "pdf,cdf,survival,hazard")]
        quantities: Vec<EvalQuantity>,
    },
    /// Raw moments and summary statistics.
    Moments {
        #[arg(long, value_parser = dist_arg)]
        dist: DistSpec,
        #[arg(long, default_value_t = 4)]
        max_r: u32,
    },
    /// Mixing proportions of the nonzero components.
    Mp {
        #[arg(long, value_parser = dist_arg)]
        dist: DistSpec,
    },
    /// Draw a reproducible sample, one value per line.
    Sample {
        #[arg(long, value_parser = dist_arg)]
        dist: DistSpec,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Stress-strength reliability P(Y < X); give the strength first, then the stress.
    Stress {
        #[arg(long = "dist", value_parser = dist_arg, num_args = 1, required = true)]
        dists: Vec<DistSpec>,
        #[arg(long, value_enum, default_value = "both")]
        method: StressMethod,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_terms: usize,
    },
    /// Tsallis entropy of order alpha.
    Entropy {
        #[arg(long, value_parser = dist_arg)]
        dist: DistSpec,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "auto")]
        method: EntropyMethod,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Compare closed forms with the quadrature oracle; exit 1 on any failure.
    Check {
        #[arg(long, value_parser = dist_arg)]
        dist: DistSpec,
    },
    /// List the catalog.
    List,
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    match cli.command {
        Command::Eval { dist, grid, quantities } => cmd_eval(out, &dist, &grid, &quantities)?,
        Command::Moments { dist, max_r } => cmd_moments(out, &dist, max_r)?,
        Command::Mp { dist } => cmd_mp(out, &dist)?,
        Command::Sample { dist, n, seed } => cmd_sample(out, &dist, n, seed)?,
        Command::Stress { dists, method, tol, max_terms } => {
            let [strength, stress] = <[DistSpec; 2]>::try_from(dists)
                .map_err(|d| CliError::Usage(format!("stress needs exactly two --dist options, got {}", d.len())))?;
            // the series tolerance is capped where the quadrature tolerance is
            let ctl = SeriesControl::new(tol.min(1e-3), max_terms)?;
            cmd_stress(out, err, &strength, &stress, method, &ctl, tol)?;
        }
        Command::Entropy { dist, alpha, method, tol } => cmd_entropy(out, &dist, alpha, method, tol)?,
        Command::Check { dist } => {
            if !cmd_check(out, &dist)? {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
        Command::List => cmd_list(out)?,
    }
    Ok(EXIT_OK)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
