use num_complex::Complex64;

use super::character::DirichletCharacter;
use super::cmath::n_it;
use super::sieve::FactorSieve;
use crate::error::{Error, Result};

const MODULUS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardKind {
    One,
    Moebius,
    Liouville,
}

/// A 1-bounded multiplicative function on `[1, limit]`, stored by its values on prime powers.
///
/// The table is dense in `n`; only entries at prime powers are meaningful.
#[derive(Debug, Clone)]
pub struct MultFnSpec {
    limit: u64,
    prime_power_values: Vec<Complex64>,
    completely_multiplicative: bool,
}

impl MultFnSpec {
    /// Builds a multiplicative function from its values `value(p, k)` on prime powers `p^k <= limit`.
    pub fn multiplicative<F>(sieve: &FactorSieve, limit: u64, mut value: F) -> Result<Self>
    where
        F: FnMut(u64, u32) -> Complex64,
    {
        check_limit(sieve, limit)?;
        let mut table = vec![Complex64::new(0.0, 0.0); limit as usize + 1];
        for &p in sieve.primes_in(2.0, limit as f64) {
            let p = p as u64;
            let mut pk = p;
            let mut k = 1;
            loop {
                let v = value(p, k);
                check_value(v, p, k)?;
                table[pk as usize] = v;
                match pk.checked_mul(p) {
                    Some(next) if next <= limit => {
                        pk = next;
                        k += 1;
                    }
                    _ => break,
                }
            }
        }
        Ok(MultFnSpec {
            limit,
            prime_power_values: table,
            completely_multiplicative: false,
        })
    }

    /// Builds a completely multiplicative function from its values on primes.
    pub fn completely_multiplicative<F>(sieve: &FactorSieve, limit: u64, mut at_prime: F) -> Result<Self>
    where
        F: FnMut(u64) -> Complex64,
    {
        check_limit(sieve, limit)?;
        let mut table = vec![Complex64::new(0.0, 0.0); limit as usize + 1];
        for &p in sieve.primes_in(2.0, limit as f64) {
            let p = p as u64;
            let v = at_prime(p);
            check_value(v, p, 1)?;
            let mut pk = p;
            let mut acc = v;
            loop {
                table[pk as usize] = acc;
                match pk.checked_mul(p) {
                    Some(next) if next <= limit => {
                        pk = next;
                        acc *= v;
                    }
                    _ => break,
                }
            }
        }
        Ok(MultFnSpec {
            limit,
            prime_power_values: table,
            completely_multiplicative: true,
        })
    }

    pub fn standard(kind: StandardKind, sieve: &FactorSieve, limit: u64) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        match kind {
            StandardKind::One => Self::completely_multiplicative(sieve, limit, |_| one),
            StandardKind::Liouville => Self::completely_multiplicative(sieve, limit, |_| -one),
            StandardKind::Moebius => {
                Self::multiplicative(sieve, limit, |_, k| if k == 1 { -one } else { 0.0 * one })
            }
        }
    }

    /// n ↦ χ(n) restricted to `[1, limit]`.
    pub fn from_character(chi: &DirichletCharacter, sieve: &FactorSieve, limit: u64) -> Result<Self> {
        Self::completely_multiplicative(sieve, limit, |p| chi.value(p))
    }

    /// n ↦ n^{it}.
    pub fn archimedean(t: f64, sieve: &FactorSieve, limit: u64) -> Result<Self> {
        Self::completely_multiplicative(sieve, limit, |p| n_it(p, t))
    }

    /// Pointwise product; values on prime powers multiply.
    pub fn product(&self, other: &MultFnSpec) -> Result<Self> {
        if self.limit != other.limit {
            return Err(Error::domain(format!(
                "cannot multiply functions with limits {} and {}",
                self.limit, other.limit
            )));
        }
        let prime_power_values = self
            .prime_power_values
            .iter()
            .zip(&other.prime_power_values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(MultFnSpec {
            limit: self.limit,
            prime_power_values,
            completely_multiplicative: self.completely_multiplicative && other.completely_multiplicative,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_completely_multiplicative(&self) -> bool {
        self.completely_multiplicative
    }

    pub fn at_prime(&self, p: u64) -> Complex64 {
        self.prime_power_values[p as usize]
    }

    /// Value at a prime power `p^k`, where `p^k <= limit`.
    pub fn at_prime_power(&self, p: u64, k: u32) -> Complex64 {
        self.prime_power_values[p.pow(k) as usize]
    }

    /// f(n) as the product of the stored prime-power values over the factorization of `n`.
    pub fn eval(&self, sieve: &FactorSieve, n: u64) -> Result<Complex64> {
        if n == 0 || n > self.limit || n > sieve.limit() {
            return Err(Error::domain(format!("n = {n} is outside [1, {}]", self.limit)));
        }
        let mut acc = Complex64::new(1.0, 0.0);
        let mut m = n;
        while m > 1 {
            let p = sieve.spf(m);
            let mut pk = 1;
            while m.is_multiple_of(p) {
                m /= p;
                pk *= p;
            }
            acc *= self.prime_power_values[pk as usize];
        }
        Ok(acc)
    }

    /// f(0..=n_max) in one pass, with f(0) = 0.
    pub fn table(&self, sieve: &FactorSieve, n_max: u64) -> Result<Vec<Complex64>> {
        if n_max > self.limit || n_max > sieve.limit() {
            return Err(Error::domain(format!(
                "table length {n_max} exceeds the function limit {}",
                self.limit
            )));
        }
        let n_max = n_max as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
        if n_max >= 1 {
            out[1] = Complex64::new(1.0, 0.0);
        }
        for n in 2..=n_max {
            let p = sieve.spf(n as u64) as usize;
            let mut m = n / p;
            let mut pk = p;
            while m.is_multiple_of(p) {
                m /= p;
                pk *= p;
            }
            out[n] = self.prime_power_values[pk] * out[m];
        }
        Ok(out)
    }

    /// Re-bounds the function to a smaller limit.
    pub fn truncate(&self, limit: u64) -> Result<Self> {
        if limit > self.limit || limit < 1 {
            return Err(Error::domain(format!("cannot truncate limit {} to {limit}", self.limit)));
        }
        Ok(MultFnSpec {
            limit,
            prime_power_values: self.prime_power_values[..=limit as usize].to_vec(),
            completely_multiplicative: self.completely_multiplicative,
        })
    }
}

fn check_limit(sieve: &FactorSieve, limit: u64) -> Result<()> {
    if limit < 1 || limit > sieve.limit() {
        return Err(Error::domain(format!(
            "function limit {limit} must lie in [1, {}] (the sieve limit)",
            sieve.limit()
        )));
    }
    Ok(())
}

fn check_value(v: Complex64, p: u64, k: u32) -> Result<()> {
    if !v.re.is_finite() || !v.im.is_finite() || v.norm() > 1.0 + MODULUS_SLACK {
        return Err(Error::domain(format!(
            "f({p}^{k}) = {v} is not 1-bounded"
        )));
    }
    Ok(())
}
