use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use super::fnspec::{parse_fn_spec, FnSpec};
use super::report::{write_report, Format, Row};
use crate::arcs::{energy_split, major_arcs, minor_sup, ArcSet};
use crate::arith::{FactorSieve, MultFnSpec, DEFAULT_CHARACTER_MODULUS_CAP, DEFAULT_SIEVE_BUDGET};
use crate::decomp::{admissible_delta, criterion_certificate, presieve_gap, tk_check, tk_split, CriterionInput, TkWeights};
use crate::error::Error;
use crate::expsum::{coefficient_vector, grid_transform, lp_norm, CoefficientVector, ExpSumGrid, Profile, Window};
use crate::pretentious::{
    best_character, multiscale_consistency, quadratic_scan, PrimeInterval, ScanOptions, DEFAULT_MULTISCALE_EPS,
};

/// Largest grid (in points) a single command may allocate.
pub const MAX_GRID_POINTS: u64 = 1 << 26;

#[derive(Debug, Parser)]
#[command(name = "multl1", version, about = "L1 norms of exponential sums with multiplicative coefficients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// L1 and L2 norms of S(α) over dyadic N up to --N
    L1norm(Args),
    /// Major/minor arc energy split for Q = 1, 2, 4, ... up to --Q
    ArcsEnergy(Args),
    /// Character closest to f in pretentious distance (quadratic scan when --T is 0)
    Detect(Args),
    /// Σ c₂(n)² against 4N/Σ1/p on the interval [--lo, --hi]
    TkCheck(Args),
    /// Σ |f^∧ − f_{≥A}|² up to --N
    PresieveGap(Args),
    /// L1 lower-bound certificate for S = f·c₁ + f·c₂
    Criterion(Args),
    /// Quadratic scans over the nested scales of --N with parameter --eps
    Multiscale(Args),
    /// Minor-arc supremum of S for Q = 2, 4, ... up to --Q
    MinorSup(Args),
}

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct Args {
    /// Function specification, e.g. "liouville" or "pretend:5:100:42*twist:0.5"
    #[arg(long = "f")]
    pub f: Option<String>,
    #[arg(long = "N")]
    pub n: Option<u64>,
    #[arg(long = "Q")]
    pub q: Option<u64>,
    #[arg(long = "T")]
    pub t: Option<f64>,
    /// Plateau window parameter (l1norm, arcs-energy, criterion) or scale exponent (multiscale)
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long = "A")]
    pub a: Option<f64>,
    /// Grid points per coefficient, a power of two ≥ 8
    #[arg(long, default_value_t = 8)]
    pub oversample: u64,
    /// XORed into the seeds of random atoms
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Prime interval start (defaults depend on the command)
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    /// Level Δ for the criterion; defaults to the largest admissible value
    #[arg(long)]
    pub delta: Option<f64>,
    /// Weight f by c₁(n; [--lo, --hi]) (minor-sup)
    #[arg(long, default_value_t = false)]
    pub c1: bool,
    /// Leave the principal character out of scans (detect)
    #[arg(long, default_value_t = false)]
    pub nonprincipal: bool,
    /// Output path, or "-" for standard output
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(Error::Resource { .. }) => 3,
            CliError::Run(Error::Io(_)) => 1,
            CliError::Run(_) => 2,
        }
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::L1norm(_) => "l1norm",
            Command::ArcsEnergy(_) => "arcs-energy",
            Command::Detect(_) => "detect",
            Command::TkCheck(_) => "tk-check",
            Command::PresieveGap(_) => "presieve-gap",
            Command::Criterion(_) => "criterion",
            Command::Multiscale(_) => "multiscale",
            Command::MinorSup(_) => "minor-sup",
        }
    }

    pub fn args(&self) -> &Args {
        match self {
            Command::L1norm(a)
            | Command::ArcsEnergy(a)
            | Command::Detect(a)
            | Command::TkCheck(a)
            | Command::PresieveGap(a)
            | Command::Criterion(a)
            | Command::Multiscale(a)
            | Command::MinorSup(a) => a,
        }
    }

    fn uses_grid(&self) -> bool {
        matches!(
            self,
            Command::L1norm(_) | Command::ArcsEnergy(_) | Command::Criterion(_) | Command::MinorSup(_)
        )
    }
}

/// Everything a command needs, validated before any allocation.
#[derive(Debug, Clone)]
struct Plan {
    spec: Option<FnSpec>,
    n: u64,
    q: Option<u64>,
    window: Option<Window>,
}

fn validate(cmd: &Command) -> Result<Plan, CliError> {
    let a = cmd.args();
    let n = a.n.ok_or_else(|| config("--N is required"))?;
    if n < 2 {
        return Err(config(format!("--N = {n} must be at least 2")));
    }
    if n > DEFAULT_SIEVE_BUDGET {
        return Err(Error::Resource { what: "N", requested: n, limit: DEFAULT_SIEVE_BUDGET }.into());
    }
    if a.oversample < 8 || !a.oversample.is_power_of_two() {
        return Err(config(format!("--oversample = {} must be a power of two >= 8", a.oversample)));
    }
    if cmd.uses_grid() {
        let m = (a.oversample.saturating_mul(n)).next_power_of_two();
        if m > MAX_GRID_POINTS {
            return Err(Error::Resource { what: "grid points", requested: m, limit: MAX_GRID_POINTS }.into());
        }
    }
    let needs_f = !matches!(cmd, Command::TkCheck(_));
    let spec = match (&a.f, needs_f) {
        (Some(s), true) => Some(parse_fn_spec(s).map_err(|e| config(format!("--f: {e}")))?),
        (None, true) => return Err(config("--f is required")),
        _ => None,
    };
    let needs_q = matches!(
        cmd,
        Command::ArcsEnergy(_) | Command::Detect(_) | Command::Criterion(_) | Command::MinorSup(_)
    );
    if needs_q && a.q.is_none() {
        return Err(config("--Q is required"));
    }
    if let Some(q) = a.q {
        if q < 1 {
            return Err(config("--Q must be at least 1"));
        }
        if matches!(cmd, Command::Detect(_) | Command::Multiscale(_)) && q > DEFAULT_CHARACTER_MODULUS_CAP {
            return Err(Error::Resource {
                what: "character conductor bound",
                requested: q,
                limit: DEFAULT_CHARACTER_MODULUS_CAP,
            }
            .into());
        }
    }
    if let Some(t) = a.t {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(config(format!("--T = {t} must be finite and >= 0")));
        }
    }
    if let Some(d) = a.delta {
        if !(d > 0.0 && d.is_finite()) {
            return Err(config(format!("--delta = {d} must be positive")));
        }
    }
    for (name, v) in [("--lo", a.lo), ("--hi", a.hi)] {
        if let Some(v) = v {
            if !(v >= 2.0 && v <= n as f64) {
                return Err(config(format!("{name} = {v} must lie in [2, N]")));
            }
        }
    }
    if let (Some(lo), Some(hi)) = (a.lo, a.hi) {
        if lo > hi {
            return Err(config(format!("--lo = {lo} exceeds --hi = {hi}")));
        }
    }
    let mut window = None;
    match cmd {
        Command::Multiscale(_) => {
            let eps = a.eps.unwrap_or(DEFAULT_MULTISCALE_EPS);
            if !(eps > 0.0 && eps < 1.0) {
                return Err(config(format!("--eps = {eps} must lie in (0, 1)")));
            }
        }
        Command::PresieveGap(_) => {
            let aa = a.a.ok_or_else(|| config("--A is required"))?;
            if !(aa >= 2.0 && aa.is_finite()) {
                return Err(config(format!("--A = {aa} must be >= 2")));
            }
        }
        _ => {
            if let Some(eps) = a.eps {
                window = Some(Window::plateau(eps).map_err(|e| config(format!("--eps: {e}")))?);
            }
        }
    }
    Ok(Plan { spec, n, q: a.q, window })
}

fn grid_size(n: u64, oversample: u64) -> usize {
    (oversample * n).next_power_of_two() as usize
}

struct Ctx<'a> {
    args: &'a Args,
    plan: Plan,
    sieve: FactorSieve,
}

impl Ctx<'_> {
    fn label(&self) -> String {
        self.plan.spec.as_ref().map(|s| s.to_string()).unwrap_or_default()
    }

    fn function(&self, limit: u64) -> Result<MultFnSpec, Error> {
        let spec = self.plan.spec.as_ref().expect("validated");
        spec.build_with_seed(&self.sieve, limit, self.args.seed)
    }

    fn coefficients(&self, f: &MultFnSpec, n: u64) -> Result<CoefficientVector, Error> {
        let w = self.plan.window.as_ref().map(|w| w as &dyn Profile);
        coefficient_vector(f, &self.sieve, n as usize, w, None)
    }

    fn grid(&self, a: &CoefficientVector) -> Result<ExpSumGrid, Error> {
        grid_transform(a, grid_size(a.len() as u64, self.args.oversample))
    }

    fn interval(&self, lo: f64, hi: f64) -> Result<PrimeInterval, Error> {
        PrimeInterval::new(self.args.lo.unwrap_or(lo), self.args.hi.unwrap_or(hi))
    }
}

/// Q = 1, 2, 4, ... below `q_max`, then `q_max` itself.
fn doubling(start: u64, q_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = start;
    while q < q_max {
        out.push(q);
        q *= 2;
    }
    out.push(q_max);
    out
}

fn run_l1norm(ctx: &Ctx) -> Result<Vec<Row>, Error> {
    let n = ctx.plan.n;
    let f = ctx.function(n)?;
    let mut sizes: Vec<u64> = doubling(256.min(n), n);
    sizes.dedup();
    let label = ctx.label();
    let per: Vec<Vec<Row>> = sizes
        .par_iter()
        .map(|&m| -> Result<Vec<Row>, Error> {
            let g = ctx.grid(&ctx.coefficients(&f, m)?)?;
            let l1 = lp_norm(&g, 1.0)?;
            let l2 = lp_norm(&g, 2.0)?;
            Ok(vec![
                Row::new("N", m, &label, "l1", l1.value).with_error(l1.error_bound),
                Row::new("N", m, &label, "l2", l2.value).with_error(l2.error_bound),
                Row::new("N", m, &label, "l1_over_log_n", l1.value / (m as f64).ln())
                    .with_error(l1.error_bound / (m as f64).ln()),
            ])
        })
        .collect::<Result<_, _>>()?;
    Ok(per.into_iter().flatten().collect())
}

fn run_arcs_energy(ctx: &Ctx) -> Result<Vec<Row>, Error> {
    let n = ctx.plan.n;
    let f = ctx.function(n)?;
    let g = ctx.grid(&ctx.coefficients(&f, n)?)?;
    let label = ctx.label();
    let mut rows = Vec::new();
    for q in doubling(1, ctx.plan.q.expect("validated")) {
        let arcs = major_arcs(q, n)?;
        let e = energy_split(&g, &arcs)?;
        rows.push(Row::new("Q", q, &label, "measure", arcs.total_measure()));
        rows.push(Row::new("Q", q, &label, "saturated", arcs.is_saturated() as u8 as f64));
        rows.push(Row::new("Q", q, &label, "major_energy", e.major).with_error(e.error_bound));
        rows.push(Row::new("Q", q, &label, "minor_energy", e.minor).with_error(e.error_bound));
        rows.push(Row::new("Q", q, &label, "major_fraction", e.major_fraction()));
    }
    Ok(rows)
}

fn run_detect(ctx: &Ctx) -> Result<Vec<Row>, Error> {
    let n = ctx.plan.n;
    let q = ctx.plan.q.expect("validated");
    let f = ctx.function(n)?;
    let interval = ctx.interval((q as f64).max(2.0), n as f64)?;
    let options = ScanOptions { exclude_principal: ctx.args.nonprincipal, ..Default::default() };
    let t = ctx.args.t.unwrap_or(0.0);
    let rep = if t == 0.0 {
        quadratic_scan(&f, q, &interval, &ctx.sieve, &options)?
    } else {
        best_character(&f, q, t, &interval, &ctx.sieve, &options)?
    };
    let mut rows = Vec::new();
    for (rank, r) in std::iter::once(&rep.best).chain(&rep.runners_up).enumerate() {
        rows.push(Row::new("rank", rank, r.label, "distance_sq", r.distance_sq));
        rows.push(Row::new("rank", rank, r.label, "t", r.t));
        rows.push(Row::new("rank", rank, r.label, "conductor", r.conductor as f64));
    }
    Ok(rows)
}

fn run_tk_check(ctx: &Ctx) -> Result<Vec<Row>, Error> {
    let interval = ctx.interval(2.0, 100.0)?;
    let c = tk_check(&interval, ctx.plan.n, &ctx.sieve)?;
    let label = format!("[{},{}]", interval.lo, interval.hi);
    Ok(vec![
        Row::new("N", c.n, &label, "harmonic_sum", c.harmonic_sum),
        Row::new("N", c.n, &label, "lhs", c.lhs),
        Row::new("N", c.n, &label, "rhs", c.rhs),
        Row::new("N", c.n, &label, "ratio", c.ratio),
    ])
}

fn run_presieve_gap(ctx: &Ctx) -> Result<Vec<Row>, Error> {
    let n = ctx.plan.n;
    let a = ctx.args.a.expect("validated");
    let f = ctx.function(n)?;
    let g = presieve_gap(&f, a, n, &ctx.sieve)?;
    let label = ctx.label();
    Ok(vec![
        Row::new("A", a, &label, "gap", g.gap),
        Row::new("A", a, &label, "gap_times_a_over_n", g.normalized),
    ])
}

fn criterion_grids(ctx: &Ctx, arcs: &ArcSet) -> Result<CriterionInput, Error> {
    let n = ctx.plan.n;
    let q = ctx.plan.q.expect("validated");
    let f = ctx.function(n)?;
    let base = ctx.coefficients(&f, n)?;
    let weights = TkWeights::new(&ctx.interval((q as f64).max(2.0), n as f64)?, &ctx.sieve)?;
    let (a1, a2) = tk_split(&base, &weights)?;
    let s1 = ctx.grid(&a1)?;
    let s2 = ctx.grid(&a2)?;
    let s3 = ctx.grid(&CoefficientVector::weighted(vec![Default::default(); n as usize])?)?;
    let delta = match ctx.args.delta {
        Some(d) => d,
        None => {
            let d = admissible_delta(&s1, &s1.add(&s2)?, arcs)?;
            if d.is_finite() { d } else { 1.0 }
        }
    };
    CriterionInput::new(s1, s2, s3, delta, arcs.clone())
}

fn run_criterion(ctx: &Ctx) -> Result<Vec<Row>, Error> {
    let arcs = major_arcs(ctx.plan.q.expect("validated"), ctx.plan.n)?;
    let input = criterion_grids(ctx, &arcs)?;
    let r = criterion_certificate(&input)?;
    let label = ctx.label();
    let row = |metric: &str, v: f64| Row::new("Q", r.q_max, &label, metric, v);
    let mut rows = vec![
        row("delta", r.delta),
        row("l2", r.l2),
        row("delta1", r.delta1),
        row("delta2", r.delta2),
        row("delta3", r.delta3),
        row("delta_sum", r.delta_sum),
        row("minor_sup", r.minor_sup).with_error(r.minor_sup_slack),
        row("minor_sup_threshold", r.minor_sup_threshold),
        row("applicable", r.applicable as u8 as f64),
        row("measured_l1", r.measured_l1.value).with_error(r.measured_l1.error_bound),
    ];
    if let (Some(k), Some(b)) = (r.k, r.lower_bound) {
        rows.push(row("k", k));
        rows.push(row("lower_bound", b));
    }
    Ok(rows)
}

fn run_multiscale(ctx: &Ctx) -> Result<Vec<Row>, Error> {
    let n = ctx.plan.n;
    let f = ctx.function(n)?;
    let eps = ctx.args.eps.unwrap_or(DEFAULT_MULTISCALE_EPS);
    let q = ctx.plan.q.unwrap_or(30);
    let rep = multiscale_consistency(&f, eps, n, q, &ctx.sieve)?;
    let mut rows = Vec::new();
    for (i, s) in rep.scales.iter().enumerate() {
        let kind = match s.kind {
            crate::pretentious::ScaleKind::Main => "main",
            crate::pretentious::ScaleKind::Bridge => "bridge",
        };
        let label = format!("{kind}:[{:.6e},{:.6e}]", s.interval.lo, s.interval.hi);
        rows.push(Row::new("scale", i, &label, "winner", s.winner as f64));
        rows.push(Row::new("scale", i, &label, "distance_sq", s.distance_sq));
        if let Some(r) = s.runner_up_distance_sq {
            rows.push(Row::new("scale", i, &label, "runner_up_distance_sq", r));
        }
    }
    rows.push(Row::new("eps", eps, ctx.label(), "consistent", rep.consistent as u8 as f64));
    Ok(rows)
}

fn run_minor_sup(ctx: &Ctx) -> Result<Vec<Row>, Error> {
    let n = ctx.plan.n;
    let f = ctx.function(n)?;
    let base = ctx.coefficients(&f, n)?;
    let label = ctx.label();
    let plain = if ctx.args.c1 { None } else { Some(ctx.grid(&base)?) };
    let mut rows = Vec::new();
    for q in doubling(2.min(ctx.plan.q.expect("validated")), ctx.plan.q.expect("validated")) {
        let weighted;
        let g = match &plain {
            Some(g) => g,
            None => {
                let w = TkWeights::new(&ctx.interval((q as f64).max(2.0), n as f64)?, &ctx.sieve)?;
                weighted = ctx.grid(&tk_split(&base, &w)?.0)?;
                &weighted
            }
        };
        let arcs = major_arcs(q, n)?;
        let s = minor_sup(g, &arcs)?;
        rows.push(Row::new("Q", q, &label, "saturated", arcs.is_saturated() as u8 as f64));
        rows.push(Row::new("Q", q, &label, "minor_sup", s.value).with_error(s.slack));
        rows.push(
            Row::new("Q", q, &label, "minor_sup_sqrt_q_over_n", s.value * (q as f64).sqrt() / n as f64)
                .with_error(s.slack * (q as f64).sqrt() / n as f64),
        );
    }
    Ok(rows)
}

/// Validates, runs and returns the report rows; no output is written.
pub fn run_rows(cmd: &Command) -> Result<Vec<Row>, CliError> {
    let plan = validate(cmd)?;
    let sieve_limit = plan.n.max(cmd.args().hi.map_or(0, |h| h as u64)).max(2);
    let sieve = FactorSieve::new(sieve_limit)?;
    let ctx = Ctx { args: cmd.args(), plan, sieve };
    let rows = match cmd {
        Command::L1norm(_) => run_l1norm(&ctx),
        Command::ArcsEnergy(_) => run_arcs_energy(&ctx),
        Command::Detect(_) => run_detect(&ctx),
        Command::TkCheck(_) => run_tk_check(&ctx),
        Command::PresieveGap(_) => run_presieve_gap(&ctx),
        Command::Criterion(_) => run_criterion(&ctx),
        Command::Multiscale(_) => run_multiscale(&ctx),
        Command::MinorSup(_) => run_minor_sup(&ctx),
    }?;
    Ok(rows)
}

/// Runs a command and writes its report to `--out`.
pub fn execute(cmd: &Command) -> Result<(), CliError> {
    let start = Instant::now();
    let rows = run_rows(cmd)?;
    let wall = start.elapsed().as_secs_f64();
    let args = cmd.args();
    let out: Box<dyn Write> = if args.out.as_os_str() == "-" {
        Box::new(std::io::stdout().lock())
    } else {
        Box::new(BufWriter::new(File::create(&args.out).map_err(Error::from)?))
    };
    write_report(out, args.format, cmd.name(), args, &rows, wall)?;
    Ok(())
}

/// Applies `MULTL1_THREADS` to the global pool, if set.
pub fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("MULTL1_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| config(format!("MULTL1_THREADS = '{v}' is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| config(e.to_string()))?;
    }
    Ok(())
}
