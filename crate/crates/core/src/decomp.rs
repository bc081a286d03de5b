//! The c₁/c₂ split by prime factors in an interval, the presieved functions f_{≥A} and f^∧,
//! and a numerical certificate for the L¹ lower bound obtained from a three-part
//! decomposition S = S₁ + S₂ + S₃.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arcs::{minor_sup_weighted, ArcSet};
use crate::arith::{FactorSieve, MultFnSpec};
use crate::error::{Error, Result};
use crate::expsum::{lp_norm, CoefficientVector, Estimate, ExpSumGrid};
use crate::pretentious::PrimeInterval;

pub const CERTIFICATE_FORMAT_VERSION: u32 = 1;

/// c₁(n; I) = ω_I(n) / H and c₂ = 1 − c₁, with H = Σ_{p∈I} 1/p and ω_I(n) the number of
/// distinct primes of I dividing n.
#[derive(Debug, Clone)]
pub struct TkWeights {
    interval: PrimeInterval,
    primes: Vec<u64>,
    harmonic_sum: f64,
}

impl TkWeights {
    pub fn new(interval: &PrimeInterval, sieve: &FactorSieve) -> Result<Self> {
        let harmonic_sum = interval.harmonic_weight(sieve)?;
        let primes: Vec<u64> = sieve.primes_in(interval.lo, interval.hi).iter().map(|&p| p as u64).collect();
        if primes.is_empty() {
            return Err(Error::domain(format!(
                "interval [{}, {}] contains no primes",
                interval.lo, interval.hi
            )));
        }
        Ok(TkWeights { interval: *interval, primes, harmonic_sum })
    }

    pub fn interval(&self) -> PrimeInterval {
        self.interval
    }

    pub fn harmonic_sum(&self) -> f64 {
        self.harmonic_sum
    }

    pub fn omega(&self, sieve: &FactorSieve, n: u64) -> u32 {
        sieve
            .factor(n)
            .iter()
            .filter(|(p, _)| (*p as f64) >= self.interval.lo && (*p as f64) <= self.interval.hi)
            .count() as u32
    }

    pub fn c1(&self, sieve: &FactorSieve, n: u64) -> f64 {
        self.omega(sieve, n) as f64 / self.harmonic_sum
    }

    pub fn c2(&self, sieve: &FactorSieve, n: u64) -> f64 {
        1.0 - self.c1(sieve, n)
    }

    /// ω_I(n) for n = 0..=n_max by sieving the primes of I.
    pub fn omega_table(&self, n_max: usize) -> Vec<u32> {
        let mut w = vec![0u32; n_max + 1];
        for &p in &self.primes {
            let p = p as usize;
            if p > n_max {
                break;
            }
            for m in (p..=n_max).step_by(p) {
                w[m] += 1;
            }
        }
        w
    }

    /// (c₁(n), c₂(n)) for n = 1..=n_max.
    pub fn tables(&self, n_max: usize) -> (Vec<f64>, Vec<f64>) {
        let om = self.omega_table(n_max);
        let c1: Vec<f64> = om[1..].iter().map(|&k| k as f64 / self.harmonic_sum).collect();
        let c2 = c1.iter().map(|c| 1.0 - c).collect();
        (c1, c2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TkCheck {
    pub n: u64,
    pub harmonic_sum: f64,
    /// Σ_{n≤N} c₂(n)².
    pub lhs: f64,
    /// 4N / H.
    pub rhs: f64,
    pub ratio: f64,
}

pub fn tk_check(interval: &PrimeInterval, n: u64, sieve: &FactorSieve) -> Result<TkCheck> {
    if n > sieve.limit() {
        return Err(Error::domain(format!("N = {n} exceeds the sieve limit {}", sieve.limit())));
    }
    let w = TkWeights::new(interval, sieve)?;
    let om = w.omega_table(n as usize);
    // group by ω so each distinct square is formed once
    let mut counts: Vec<u64> = Vec::new();
    for &k in &om[1..] {
        let k = k as usize;
        if counts.len() <= k {
            counts.resize(k + 1, 0);
        }
        counts[k] += 1;
    }
    let h = w.harmonic_sum;
    let lhs: f64 = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| c as f64 * (1.0 - k as f64 / h).powi(2))
        .sum();
    let rhs = 4.0 * n as f64 / h;
    Ok(TkCheck { n, harmonic_sum: h, lhs, rhs, ratio: lhs / rhs })
}

/// f_{≥A} (completely multiplicative) and f^∧ (multiplicative), both equal to 1 at primes ≤ A.
#[derive(Debug, Clone)]
pub struct Presieved {
    pub geq: MultFnSpec,
    pub hat: MultFnSpec,
}

pub fn presieve(f: &MultFnSpec, a: f64, sieve: &FactorSieve) -> Result<Presieved> {
    if !(a >= 2.0) || !a.is_finite() {
        return Err(Error::domain(format!("presieve level A = {a} must be >= 2")));
    }
    let one = Complex64::new(1.0, 0.0);
    let geq = MultFnSpec::completely_multiplicative(sieve, f.limit(), |p| {
        if (p as f64) <= a { one } else { f.at_prime(p) }
    })?;
    let hat = MultFnSpec::multiplicative(sieve, f.limit(), |p, k| {
        if (p as f64) <= a { one } else { f.at_prime_power(p, k) }
    })?;
    Ok(Presieved { geq, hat })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PresieveGap {
    pub a: f64,
    pub n: u64,
    /// Σ_{n≤N} |f^∧(n) − f_{≥A}(n)|².
    pub gap: f64,
    /// gap · A / N.
    pub normalized: f64,
}

pub fn presieve_gap(f: &MultFnSpec, a: f64, n: u64, sieve: &FactorSieve) -> Result<PresieveGap> {
    let pre = presieve(f, a, sieve)?;
    let x = pre.geq.table(sieve, n)?;
    let y = pre.hat.table(sieve, n)?;
    let gap: f64 = x.iter().zip(&y).skip(1).map(|(u, v)| (u - v).norm_sqr()).sum();
    Ok(PresieveGap { a, n, gap, normalized: gap * a / n as f64 })
}

/// Coefficients f(n)·c₁(n) and f(n)·c₂(n) for n ≤ N, optionally multiplied by a base vector.
pub fn tk_split(base: &CoefficientVector, weights: &TkWeights) -> Result<(CoefficientVector, CoefficientVector)> {
    let (c1, c2) = weights.tables(base.len());
    let a1 = base.values().iter().zip(&c1).map(|(v, c)| v * *c).collect();
    let a2 = base.values().iter().zip(&c2).map(|(v, c)| v * *c).collect();
    Ok((CoefficientVector::weighted(a1)?, CoefficientVector::weighted(a2)?))
}

/// Three grids on a common (N, M), a level Δ > 0 and the major arcs.
#[derive(Debug, Clone)]
pub struct CriterionInput {
    pub s1: ExpSumGrid,
    pub s2: ExpSumGrid,
    pub s3: ExpSumGrid,
    pub delta: f64,
    pub arcs: ArcSet,
}

impl CriterionInput {
    pub fn new(s1: ExpSumGrid, s2: ExpSumGrid, s3: ExpSumGrid, delta: f64, arcs: ArcSet) -> Result<Self> {
        for g in [&s2, &s3] {
            if g.n() != s1.n() || g.m() != s1.m() {
                return Err(Error::domain("the three grids must share N and M"));
            }
        }
        if arcs.n() != s1.n() as u64 {
            return Err(Error::domain(format!(
                "arcs built for N = {} but grids for N = {}",
                arcs.n(),
                s1.n()
            )));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::domain(format!("Delta = {delta} must be positive")));
        }
        Ok(CriterionInput { s1, s2, s3, delta, arcs })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub format_version: u32,
    pub n: u64,
    pub m: u64,
    pub q_max: u64,
    pub delta: f64,
    pub degenerate: bool,
    /// ‖S‖₂.
    pub l2: f64,
    /// ‖(S₁+S₂)·1_𝔐‖₂ / ‖S‖₂.
    pub delta1: f64,
    /// ‖S₂‖₂ / ‖S‖₂.
    pub delta2: f64,
    /// (‖S₃·1_𝔪‖₂ + ‖S₃·1_𝔐‖₂) / ‖S‖₂, the quantity the chain actually uses.
    pub delta3: f64,
    /// ‖S₃‖₂ / ‖S‖₂.
    pub delta3_plain: f64,
    pub delta_sum: f64,
    /// Grid maximum of |S₁| over minor-arc points.
    pub minor_sup: f64,
    /// Δ^{-1} N^{1/2} ‖S‖₂.
    pub minor_sup_threshold: f64,
    /// Possible excess of the true supremum over the grid maximum.
    pub minor_sup_slack: f64,
    pub minor_sup_holds: bool,
    pub minor_sup_holds_with_slack: bool,
    pub applicable: bool,
    pub k: Option<f64>,
    pub lower_bound: Option<f64>,
    pub measured_l1: Estimate,
    /// lower_bound ≤ measured value + error bound (vacuously true when inapplicable).
    pub consistent: bool,
}

impl CriterionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are serializable")
    }
}

fn weighted_l2(values: impl Iterator<Item = (Complex64, f64)>, m: usize) -> f64 {
    (values.map(|(v, w)| w * v.norm_sqr()).sum::<f64>() / m as f64).sqrt()
}

/// Largest Δ for which the minor-arc sup hypothesis holds on the grid.
pub fn admissible_delta(s1: &ExpSumGrid, s: &ExpSumGrid, arcs: &ArcSet) -> Result<f64> {
    let w = arcs.cell_weights(s1.m());
    let sup = minor_sup_weighted(s1, &w)?.value;
    let l2 = lp_norm(s, 2.0)?.value;
    Ok(if sup == 0.0 { f64::INFINITY } else { (s1.n() as f64).sqrt() * l2 / sup })
}

/// Measures the hypotheses on the grid (cells split proportionally between major and
/// minor arcs) and, when δ₁ + δ₂ + δ₃ < 1 and the minor-arc sup condition holds, evaluates
///
/// ‖S‖₁ ≥ (1 − Σδ − K^{-1}(δ₂ + δ₃))² ‖S‖₂ Δ / ((1 + K) N^{1/2}),  K = 2 / (1 − Σδ).
pub fn criterion_certificate(input: &CriterionInput) -> Result<CriterionReport> {
    let CriterionInput { s1, s2, s3, delta, arcs } = input;
    let n = s1.n();
    let m = s1.m();
    let s = s1.add(s2)?.add(s3)?;
    let measured_l1 = lp_norm(&s, 1.0)?;
    let l2 = lp_norm(&s, 2.0)?.value;
    let mut report = CriterionReport {
        format_version: CERTIFICATE_FORMAT_VERSION,
        n: n as u64,
        m: m as u64,
        q_max: arcs.q_max(),
        delta: *delta,
        degenerate: l2 == 0.0,
        l2,
        delta1: 0.0,
        delta2: 0.0,
        delta3: 0.0,
        delta3_plain: 0.0,
        delta_sum: 0.0,
        minor_sup: 0.0,
        minor_sup_threshold: 0.0,
        minor_sup_slack: 0.0,
        minor_sup_holds: false,
        minor_sup_holds_with_slack: false,
        applicable: false,
        k: None,
        lower_bound: None,
        measured_l1,
        consistent: true,
    };
    if report.degenerate {
        return Ok(report);
    }
    let w = arcs.cell_weights(m);
    let major = |g: &ExpSumGrid| weighted_l2(g.values().iter().zip(&w).map(|(v, &w)| (*v, w)), m);
    let minor = |g: &ExpSumGrid| weighted_l2(g.values().iter().zip(&w).map(|(v, &w)| (*v, 1.0 - w)), m);

    let s12 = s1.add(s2)?;
    report.delta1 = major(&s12) / l2;
    report.delta2 = lp_norm(s2, 2.0)?.value / l2;
    report.delta3 = (minor(s3) + major(s3)) / l2;
    report.delta3_plain = lp_norm(s3, 2.0)?.value / l2;
    report.delta_sum = report.delta1 + report.delta2 + report.delta3;

    let sup = minor_sup_weighted(s1, &w)?;
    report.minor_sup = sup.value;
    report.minor_sup_slack = sup.slack;
    report.minor_sup_threshold = (n as f64).sqrt() * l2 / delta;
    report.minor_sup_holds = sup.value <= report.minor_sup_threshold;
    report.minor_sup_holds_with_slack = sup.value + sup.slack <= report.minor_sup_threshold;

    if report.delta_sum < 1.0 && report.minor_sup_holds {
        let gap = 1.0 - report.delta_sum;
        let k = 2.0 / gap;
        let eta = gap - (report.delta2 + report.delta3) / k;
        let bound = eta * eta * l2 * delta / ((1.0 + k) * (n as f64).sqrt());
        report.applicable = true;
        report.k = Some(k);
        report.lower_bound = Some(bound);
        report.consistent = bound <= measured_l1.value + measured_l1.error_bound;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::major_arcs;
    use crate::arith::{e_frac, StandardKind};
    use crate::expsum::grid_transform;

    #[test]
    fn weights_examples() {
        let s = FactorSieve::new(1000).unwrap();
        let w = TkWeights::new(&PrimeInterval::new(2.0, 3.0).unwrap(), &s).unwrap();
        assert!((w.harmonic_sum() - 5.0 / 6.0).abs() < 1e-15);
        assert!((w.c1(&s, 6) - 12.0 / 5.0).abs() < 1e-14);
        assert_eq!(w.c1(&s, 35), 0.0);
        assert_eq!(w.c2(&s, 35), 1.0);
        assert!(TkWeights::new(&PrimeInterval::new(24.0, 28.0).unwrap(), &s).is_err());
        let (c1, c2) = w.tables(100);
        for n in 1..=100u64 {
            assert!((c1[n as usize - 1] - w.c1(&s, n)).abs() < 1e-15);
            assert!((c1[n as usize - 1] + c2[n as usize - 1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tk_without_divisors() {
        let s = FactorSieve::new(5000).unwrap();
        let c = tk_check(&PrimeInterval::new(2001.0, 4000.0).unwrap(), 2000, &s).unwrap();
        assert_eq!(c.lhs, 2000.0);
    }

    #[test]
    fn presieve_examples() {
        let s = FactorSieve::new(1000).unwrap();
        let lam = MultFnSpec::standard(StandardKind::Liouville, &s, 1000).unwrap();
        let p = presieve(&lam, 2.0, &s).unwrap();
        assert_eq!(p.geq.eval(&s, 4).unwrap().re, 1.0);
        assert_eq!(p.geq.eval(&s, 15).unwrap().re, 1.0);
        assert_eq!(p.geq.eval(&s, 12).unwrap().re, -1.0);
        assert!(p.geq.is_completely_multiplicative());
        let mu = MultFnSpec::standard(StandardKind::Moebius, &s, 1000).unwrap();
        let q = presieve(&mu, 10.0, &s).unwrap();
        assert_eq!(q.hat.eval(&s, 121).unwrap().re, 0.0);
        assert_eq!(q.geq.eval(&s, 121).unwrap().re, 1.0);
        assert_eq!(q.hat.eval(&s, 8).unwrap().re, 1.0);
        assert!(presieve(&mu, 1.0, &s).is_err());
    }

    #[test]
    fn certificate_degenerate_and_major_only() {
        let n = 1024;
        let arcs = major_arcs(8, n as u64).unwrap();
        let zero = grid_transform(&CoefficientVector::from_real(&vec![0.0; n]).unwrap(), 8 * n).unwrap();
        let input = CriterionInput::new(zero.clone(), zero.clone(), zero.clone(), 1.0, arcs.clone()).unwrap();
        let r = criterion_certificate(&input).unwrap();
        assert!(r.degenerate && !r.applicable && r.lower_bound.is_none());
        assert_eq!(r.measured_l1.value, 0.0);

        let half = CoefficientVector::new((1..=n).map(|k| e_frac(-(k as i64), 2)).collect()).unwrap();
        let g = grid_transform(&half, 8 * n).unwrap();
        let input = CriterionInput::new(g, zero.clone(), zero, 1.0, arcs).unwrap();
        let r = criterion_certificate(&input).unwrap();
        assert_eq!((r.delta2, r.delta3), (0.0, 0.0));
        assert!(r.delta1 > 0.95);
    }

    #[test]
    fn input_validation() {
        let a = CoefficientVector::from_real(&[1.0; 16]).unwrap();
        let g = grid_transform(&a, 128).unwrap();
        let h = grid_transform(&a, 256).unwrap();
        let arcs = major_arcs(2, 16).unwrap();
        assert!(CriterionInput::new(g.clone(), h, g.clone(), 1.0, arcs.clone()).is_err());
        assert!(CriterionInput::new(g.clone(), g.clone(), g.clone(), 0.0, arcs).is_err());
        assert!(CriterionInput::new(g.clone(), g.clone(), g, 1.0, major_arcs(2, 32).unwrap()).is_err());
    }
}
