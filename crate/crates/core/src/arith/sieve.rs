use crate::error::{Error, Result};

/// Largest sieve limit accepted by [`FactorSieve::new`] (4 bytes per entry, 1 GiB).
pub const DEFAULT_SIEVE_BUDGET: u64 = 1 << 28;

/// Smallest-prime-factor table on `[0, limit]`.
#[derive(Debug, Clone)]
pub struct FactorSieve {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl FactorSieve {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_budget(limit, DEFAULT_SIEVE_BUDGET)
    }

    /// Linear sieve. Each composite is crossed out exactly once by its smallest prime factor.
    pub fn with_budget(limit: u64, budget: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::domain(format!("sieve limit must be at least 2, got {limit}")));
        }
        if limit > budget || limit > u32::MAX as u64 {
            return Err(Error::Resource {
                what: "sieve limit",
                requested: limit,
                limit: budget.min(u32::MAX as u64),
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                if p > si || (p as usize) * i > n {
                    break;
                }
                spf[p as usize * i] = p;
            }
        }
        Ok(FactorSieve { limit, spf, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `n`, for `2 <= n <= limit`.
    pub fn spf(&self, n: u64) -> u64 {
        debug_assert!(n >= 2 && n <= self.limit);
        self.spf[n as usize] as u64
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] as u64 == n
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Primes in the closed real interval `[lo, hi]`, clipped to the sieve range.
    pub fn primes_in(&self, lo: f64, hi: f64) -> &[u32] {
        let start = self.primes.partition_point(|&p| (p as f64) < lo);
        let end = self.primes.partition_point(|&p| (p as f64) <= hi);
        &self.primes[start..end.max(start)]
    }

    /// Prime factorization as `(p, k)` pairs with ascending `p`.
    pub fn factor(&self, mut n: u64) -> Vec<(u64, u32)> {
        assert!(n >= 1 && n <= self.limit, "{n} is outside the sieve range");
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        out
    }

    /// Ω(n), prime factors counted with multiplicity.
    pub fn big_omega(&self, n: u64) -> u32 {
        self.factor(n).iter().map(|&(_, k)| k).sum()
    }

    /// ω(n), distinct prime factors.
    pub fn small_omega(&self, n: u64) -> u32 {
        self.factor(n).len() as u32
    }

    /// Euler's totient.
    pub fn phi(&self, n: u64) -> u64 {
        self.factor(n)
            .iter()
            .fold(n, |acc, &(p, _)| acc / p * (p - 1))
    }
}

/// Prime factorization by trial division, for moduli that may exceed any sieve.
pub fn factor_small(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn euler_phi(n: u64) -> u64 {
    factor_small(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn moebius(n: u64) -> i64 {
    let f = factor_small(n);
    if f.iter().any(|&(_, k)| k > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn is_squarefree(n: u64) -> bool {
    factor_small(n).iter().all(|&(_, k)| k == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spf_examples() {
        let s = FactorSieve::new(100).unwrap();
        assert_eq!(s.spf(12), 2);
        assert_eq!(s.spf(17), 17);
        assert_eq!(s.spf(91), 7);
    }

    #[test]
    fn invariants_up_to_10k() {
        let s = FactorSieve::new(10_000).unwrap();
        for n in 2..=10_000u64 {
            let p = s.spf(n);
            assert_eq!(n % p, 0);
            assert_eq!(factor_small(p), vec![(p, 1)]);
            let rebuilt: u64 = s.factor(n).iter().map(|&(p, k)| p.pow(k)).product();
            assert_eq!(rebuilt, n);
            assert_eq!(s.is_prime(n), factor_small(n) == vec![(n, 1)]);
        }
        assert_eq!(s.primes().len(), 1229);
    }

    #[test]
    fn rejects_bad_limits() {
        assert!(matches!(FactorSieve::new(1), Err(Error::Domain(_))));
        assert!(matches!(
            FactorSieve::with_budget(1 << 20, 1 << 10),
            Err(Error::Resource { limit: 1024, .. })
        ));
    }

    #[test]
    fn primes_in_interval() {
        let s = FactorSieve::new(100).unwrap();
        assert_eq!(s.primes_in(2.0, 10.0), &[2, 3, 5, 7]);
        assert_eq!(s.primes_in(10.5, 13.0), &[11, 13]);
        assert!(s.primes_in(24.0, 28.0).is_empty());
        assert_eq!(s.phi(36), 12);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(12), 0);
    }
}
