//! Pretentious distance 𝔻(f, g; I)² = Σ_{p∈I} (1 − Re f(p) conj(g(p))) / p and scans over
//! characters and archimedean twists.

use std::cmp::Ordering;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    fundamental_discriminants, kronecker_character, n_it, primitive_characters, ArchimedeanTwist,
    CharacterLabel, DirichletCharacter, FactorSieve, MultFnSpec, DEFAULT_CHARACTER_MODULUS_CAP,
};
use crate::error::{Error, Result};

pub const REPORT_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_RUNNERS_UP: usize = 5;

/// I = [lo, hi] with 2 ≤ lo ≤ hi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimeInterval {
    pub lo: f64,
    pub hi: f64,
}

impl PrimeInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 2.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::domain(format!("prime interval [{lo}, {hi}] needs 2 <= lo <= hi")));
        }
        Ok(PrimeInterval { lo, hi })
    }

    /// Σ_{p∈I} 1/p.
    pub fn harmonic_weight(&self, sieve: &FactorSieve) -> Result<f64> {
        self.check(sieve)?;
        Ok(sieve.primes_in(self.lo, self.hi).iter().map(|&p| 1.0 / p as f64).sum())
    }

    /// Default twist-grid spacing π / log(hi).
    pub fn default_spacing(&self) -> f64 {
        std::f64::consts::PI / self.hi.ln()
    }

    fn check(&self, sieve: &FactorSieve) -> Result<()> {
        if self.hi > sieve.limit() as f64 {
            return Err(Error::domain(format!(
                "interval end {} exceeds the sieve limit {}",
                self.hi,
                sieve.limit()
            )));
        }
        Ok(())
    }
}

/// Anything with values at primes.
pub trait OnPrimes: Sync {
    fn at_prime(&self, p: u64) -> Complex64;

    /// Largest prime at which values are available.
    fn prime_limit(&self) -> Option<u64> {
        None
    }
}

impl OnPrimes for MultFnSpec {
    fn at_prime(&self, p: u64) -> Complex64 {
        MultFnSpec::at_prime(self, p)
    }

    fn prime_limit(&self) -> Option<u64> {
        Some(self.limit())
    }
}

impl OnPrimes for DirichletCharacter {
    fn at_prime(&self, p: u64) -> Complex64 {
        self.value(p)
    }
}

impl OnPrimes for ArchimedeanTwist {
    fn at_prime(&self, p: u64) -> Complex64 {
        self.at(p)
    }
}

/// p ↦ ψ(p) p^{it}.
#[derive(Debug, Clone)]
pub struct CharacterTwist<'a> {
    pub chi: &'a DirichletCharacter,
    pub t: f64,
}

impl OnPrimes for CharacterTwist<'_> {
    fn at_prime(&self, p: u64) -> Complex64 {
        self.chi.value(p) * n_it(p, self.t)
    }
}

fn primes_checked<'s>(f: &dyn OnPrimes, interval: &PrimeInterval, sieve: &'s FactorSieve) -> Result<&'s [u32]> {
    interval.check(sieve)?;
    if let Some(limit) = f.prime_limit() {
        if interval.hi > limit as f64 {
            return Err(Error::domain(format!(
                "interval end {} exceeds the function limit {limit}",
                interval.hi
            )));
        }
    }
    Ok(sieve.primes_in(interval.lo, interval.hi))
}

/// 𝔻(f, g; I)² by the exact prime sum.
pub fn distance_sq(f: &dyn OnPrimes, g: &dyn OnPrimes, interval: &PrimeInterval, sieve: &FactorSieve) -> Result<f64> {
    let primes = primes_checked(f, interval, sieve)?;
    if let Some(limit) = g.prime_limit() {
        if interval.hi > limit as f64 {
            return Err(Error::domain(format!("interval end {} exceeds the function limit {limit}", interval.hi)));
        }
    }
    Ok(primes
        .iter()
        .map(|&p| {
            let p = p as u64;
            (1.0 - (f.at_prime(p) * g.at_prime(p).conj()).re) / p as f64
        })
        .sum::<f64>()
        .max(0.0))
}

/// f(p)/p and log p over the primes of an interval, reused across characters and twists.
struct PrimeData {
    primes: Vec<u64>,
    log_p: Vec<f64>,
    weighted: Vec<Complex64>,
    harmonic: f64,
}

impl PrimeData {
    fn new(f: &dyn OnPrimes, interval: &PrimeInterval, sieve: &FactorSieve) -> Result<Self> {
        let primes: Vec<u64> = primes_checked(f, interval, sieve)?.iter().map(|&p| p as u64).collect();
        let log_p = primes.iter().map(|&p| (p as f64).ln()).collect();
        let weighted = primes.iter().map(|&p| f.at_prime(p) / p as f64).collect();
        let harmonic = primes.iter().map(|&p| 1.0 / p as f64).sum();
        Ok(PrimeData { primes, log_p, weighted, harmonic })
    }

    /// f(p) conj(ψ(p)) / p.
    fn against(&self, chi: &DirichletCharacter) -> Vec<Complex64> {
        self.primes.iter().zip(&self.weighted).map(|(&p, w)| w * chi.value(p).conj()).collect()
    }

    /// 𝔻² against ψ n^{it}, given `w = f(p) conj(ψ(p)) / p`.
    fn dist(&self, w: &[Complex64], t: f64) -> f64 {
        let s: f64 = if t == 0.0 {
            w.iter().map(|z| z.re).sum()
        } else {
            w.iter()
                .zip(&self.log_p)
                .map(|(z, &l)| {
                    let (sn, cs) = (t * l).sin_cos();
                    z.re * cs + z.im * sn
                })
                .sum()
        };
        (self.harmonic - s).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistMin {
    pub t: f64,
    pub distance_sq: f64,
}

fn golden_section(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..60 {
        if (b - a).abs() < 1e-10 {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = g(d);
        }
    }
    if fc <= fd { (c, fc) } else { (d, fd) }
}

fn minimize_t(data: &PrimeData, w: &[Complex64], t_max: f64, spacing: f64) -> TwistMin {
    if t_max == 0.0 {
        return TwistMin { t: 0.0, distance_sq: data.dist(w, 0.0) };
    }
    let steps = (2.0 * t_max / spacing).ceil().max(1.0) as i64;
    let h = 2.0 * t_max / steps as f64;
    let mut best = TwistMin { t: 0.0, distance_sq: f64::INFINITY };
    for k in 0..=steps {
        let t = -t_max + k as f64 * h;
        let v = data.dist(w, t);
        if v < best.distance_sq || (v == best.distance_sq && t.abs() < best.t.abs()) {
            best = TwistMin { t, distance_sq: v };
        }
    }
    let lo = (best.t - h).max(-t_max);
    let hi = (best.t + h).min(t_max);
    let (t, v) = golden_section(|t| data.dist(w, t), lo, hi);
    if v < best.distance_sq {
        best = TwistMin { t, distance_sq: v };
    }
    best
}

fn check_spacing(t_max: f64, spacing: f64) -> Result<()> {
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::domain(format!("twist range T = {t_max} must be finite and >= 0")));
    }
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::domain(format!("twist grid spacing {spacing} must be positive")));
    }
    Ok(())
}

/// inf over t ∈ [−T, T] of 𝔻(f, ψ n^{it}; I)² by grid search plus golden-section refinement.
pub fn min_over_t(
    f: &dyn OnPrimes,
    psi: &DirichletCharacter,
    t_max: f64,
    interval: &PrimeInterval,
    spacing: f64,
    sieve: &FactorSieve,
) -> Result<TwistMin> {
    check_spacing(t_max, spacing)?;
    let data = PrimeData::new(f, interval, sieve)?;
    Ok(minimize_t(&data, &data.against(psi), t_max, spacing))
}

/// Largest change of 𝔻² when t moves by `dt` on this interval.
pub fn twist_lipschitz_bound(interval: &PrimeInterval, sieve: &FactorSieve, dt: f64) -> Result<f64> {
    interval.check(sieve)?;
    Ok(dt * sieve
        .primes_in(interval.lo, interval.hi)
        .iter()
        .map(|&p| (p as f64).ln() / p as f64)
        .sum::<f64>())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCharacter {
    pub label: CharacterLabel,
    pub conductor: u64,
    pub t: f64,
    pub distance_sq: f64,
}

impl RankedCharacter {
    pub fn discriminant(&self) -> Option<i64> {
        match self.label {
            CharacterLabel::Kronecker { d } => Some(d),
            _ => None,
        }
    }

    /// Distances within 1e-12 count as ties and fall through to (conductor, |t|, label).
    fn rank_cmp(&self, other: &Self) -> Ordering {
        let key = |x: f64| (x * 1e12).round() as i64;
        key(self.distance_sq)
            .cmp(&key(other.distance_sq))
            .then(self.conductor.cmp(&other.conductor))
            .then(self.t.abs().total_cmp(&other.t.abs()))
            .then(self.label.cmp(&other.label))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanDomain {
    pub q_max: u64,
    pub t_max: f64,
    pub interval: PrimeInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PretentiousReport {
    pub format_version: u32,
    pub best: RankedCharacter,
    pub runners_up: Vec<RankedCharacter>,
    pub scan_domain: ScanDomain,
    pub t_grid_spacing: f64,
    pub candidates: usize,
}

impl PretentiousReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            offset: e.column(),
            message: e.to_string(),
        })
    }

    /// Distance gap between the winner and the first runner-up.
    pub fn margin(&self) -> Option<f64> {
        self.runners_up.first().map(|r| r.distance_sq - self.best.distance_sq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Twist-grid spacing; `None` uses π / log(hi).
    pub spacing: Option<f64>,
    pub runners_up: usize,
    pub exclude_principal: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            spacing: None,
            runners_up: DEFAULT_RUNNERS_UP,
            exclude_principal: false,
        }
    }
}

fn rank(
    data: &PrimeData,
    candidates: Vec<DirichletCharacter>,
    t_max: f64,
    spacing: f64,
    options: &ScanOptions,
    domain: ScanDomain,
) -> Result<PretentiousReport> {
    let candidates: Vec<DirichletCharacter> = candidates
        .into_iter()
        .filter(|c| !(options.exclude_principal && c.is_principal()))
        .collect();
    if candidates.is_empty() {
        return Err(Error::domain("no characters to scan"));
    }
    let count = candidates.len();
    let mut ranked: Vec<RankedCharacter> = candidates
        .par_iter()
        .map(|chi| {
            let m = minimize_t(data, &data.against(chi), t_max, spacing);
            RankedCharacter {
                label: chi.label(),
                conductor: chi.conductor(),
                t: m.t,
                distance_sq: m.distance_sq,
            }
        })
        .collect();
    ranked.sort_by(RankedCharacter::rank_cmp);
    ranked.truncate(options.runners_up + 1);
    let best = ranked.remove(0);
    Ok(PretentiousReport {
        format_version: REPORT_FORMAT_VERSION,
        best,
        runners_up: ranked,
        scan_domain: domain,
        t_grid_spacing: spacing,
        candidates: count,
    })
}

fn check_cap(q_max: u64) -> Result<()> {
    if q_max == 0 {
        return Err(Error::domain("conductor bound Q must be at least 1"));
    }
    if q_max > DEFAULT_CHARACTER_MODULUS_CAP {
        return Err(Error::Resource {
            what: "character conductor bound",
            requested: q_max,
            limit: DEFAULT_CHARACTER_MODULUS_CAP,
        });
    }
    Ok(())
}

/// Minimizes over all primitive characters of conductor ≤ Q and twists |t| ≤ T.
pub fn best_character(
    f: &dyn OnPrimes,
    q_max: u64,
    t_max: f64,
    interval: &PrimeInterval,
    sieve: &FactorSieve,
    options: &ScanOptions,
) -> Result<PretentiousReport> {
    check_cap(q_max)?;
    let spacing = options.spacing.unwrap_or_else(|| interval.default_spacing());
    check_spacing(t_max, spacing)?;
    let data = PrimeData::new(f, interval, sieve)?;
    let mut candidates = Vec::new();
    for q in 1..=q_max {
        candidates.extend(primitive_characters(q)?);
    }
    let domain = ScanDomain { q_max, t_max, interval: *interval };
    rank(&data, candidates, t_max, spacing, options, domain)
}

/// Scans the Kronecker characters (d/·) with |d| ≤ Q, no twist.
pub fn quadratic_scan(
    f: &dyn OnPrimes,
    q_max: u64,
    interval: &PrimeInterval,
    sieve: &FactorSieve,
    options: &ScanOptions,
) -> Result<PretentiousReport> {
    check_cap(q_max)?;
    let data = PrimeData::new(f, interval, sieve)?;
    let candidates = fundamental_discriminants(q_max)
        .into_iter()
        .map(kronecker_character)
        .collect::<Result<Vec<_>>>()?;
    let domain = ScanDomain { q_max, t_max: 0.0, interval: *interval };
    let spacing = options.spacing.unwrap_or_else(|| interval.default_spacing());
    rank(&data, candidates, 0.0, spacing, options, domain)
}

/// h(x) = 1 + (x² − 1)/2 − (x² − 1)²/18, which dominates |x| on [−2, 2].
pub fn majorant_h(x: f64) -> f64 {
    let u = x * x - 1.0;
    1.0 + u / 2.0 - u * u / 18.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleKind {
    /// [N_{i−1}, N_i] with N_{i−1} = N_i^{ε²}.
    Main,
    /// [N_i^ε, N_i^{1/ε}] capped at N_max.
    Bridge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleResult {
    pub kind: ScaleKind,
    pub interval: PrimeInterval,
    pub winner: i64,
    pub distance_sq: f64,
    pub runner_up_distance_sq: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiscaleReport {
    pub eps: f64,
    pub n_max: u64,
    pub q_max: u64,
    pub scales: Vec<ScaleResult>,
    /// Whether every interval returned the same discriminant.
    pub consistent: bool,
}

pub const DEFAULT_MULTISCALE_EPS: f64 = 0.5;

/// Scales N_k = N_max, N_{i−1} = N_i^{ε²} down to 2, with main and bridge intervals.
/// Scales below this are dropped: the intervals they bound hold too few primes.
pub const MULTISCALE_FLOOR: f64 = 10.0;

pub fn multiscale_intervals(eps: f64, n_max: u64) -> Result<Vec<(ScaleKind, PrimeInterval)>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps = {eps} must lie in (0, 1)")));
    }
    let top = n_max as f64;
    let mut scales = vec![top];
    loop {
        let next = scales.last().expect("non-empty").powf(eps * eps);
        if next < MULTISCALE_FLOOR {
            break;
        }
        scales.push(next);
    }
    if scales.len() < 2 {
        return Err(Error::domain(format!(
            "eps = {eps} and N_max = {n_max} leave fewer than 2 scales above {MULTISCALE_FLOOR}"
        )));
    }
    let mut out = Vec::new();
    for w in scales.windows(2) {
        out.push((ScaleKind::Main, PrimeInterval::new(w[1], w[0])?));
    }
    for &s in &scales {
        let lo = s.powf(eps).max(2.0);
        let hi = s.powf(1.0 / eps).min(top);
        if lo < hi {
            out.push((ScaleKind::Bridge, PrimeInterval::new(lo, hi)?));
        }
    }
    Ok(out)
}

/// Runs `quadratic_scan` on every main and bridge interval and checks that the winners agree.
pub fn multiscale_consistency(
    f: &dyn OnPrimes,
    eps: f64,
    n_max: u64,
    q_max: u64,
    sieve: &FactorSieve,
) -> Result<MultiscaleReport> {
    if n_max > sieve.limit() {
        return Err(Error::domain(format!("N_max = {n_max} exceeds the sieve limit {}", sieve.limit())));
    }
    let intervals = multiscale_intervals(eps, n_max)?;
    let mut scales = Vec::with_capacity(intervals.len());
    for (kind, interval) in intervals {
        let rep = quadratic_scan(f, q_max, &interval, sieve, &ScanOptions { runners_up: 1, ..Default::default() })?;
        scales.push(ScaleResult {
            kind,
            interval,
            winner: rep.best.discriminant().expect("quadratic scans rank Kronecker characters"),
            distance_sq: rep.best.distance_sq,
            runner_up_distance_sq: rep.runners_up.first().map(|r| r.distance_sq),
        });
    }
    let consistent = scales.windows(2).all(|w| w[0].winner == w[1].winner);
    Ok(MultiscaleReport { eps, n_max, q_max, scales, consistent })
}
