//! Exponential sums S(α) = Σ a(n) e(nα): coefficient vectors, FFT grids, L^p norms,
//! smooth windows and Mellin transforms.

pub mod io;
mod jet;
pub mod quad;
mod window;

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

pub use jet::Jet;
pub use window::{smoothstep, Profile, Window, WindowKind, ZeroProfile, MAX_DERIVATIVE};

use crate::arith::{cmath, ArchimedeanTwist, FactorSieve, MultFnSpec};
use crate::error::{Error, Result};

/// Slack allowed above 1 for coefficients that should be 1-bounded.
pub const COEFF_TOLERANCE: f64 = 1e-9;

/// Oversampling floor: grids must have at least this many points per coefficient.
pub const MIN_OVERSAMPLE: usize = 8;

/// Coefficients a(1..=N).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    values: Vec<Complex64>,
}

impl CoefficientVector {
    /// Wraps values a(1), a(2), ...; each must be finite with |a(n)| ≤ 1 + tolerance.
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() || v.norm() > 1.0 + COEFF_TOLERANCE {
                return Err(Error::domain(format!("coefficient a({}) = {v} is not 1-bounded", i + 1)));
            }
        }
        Ok(CoefficientVector { values })
    }

    /// Like `new` but only requires finite values; used for weighted pieces whose
    /// weights may exceed 1.
    pub fn weighted(values: Vec<Complex64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::domain(format!("coefficient a({}) is not finite", i + 1)));
        }
        Ok(CoefficientVector { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// a(1..=N) as a slice; index 0 holds a(1).
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// a(n) for 1 ≤ n ≤ N.
    pub fn get(&self, n: usize) -> Complex64 {
        self.values[n - 1]
    }

    pub fn l1(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum()
    }

    pub fn l2_squared(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// S(α) by direct summation, O(N).
    pub fn eval_at(&self, alpha: f64) -> Complex64 {
        let step = cmath::e(alpha);
        let mut z = step;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in self.values.iter().enumerate() {
            // refresh the running power every 256 steps to bound drift
            if i % 256 == 0 {
                z = cmath::e(alpha * (i + 1) as f64);
            }
            acc += a * z;
            z *= step;
        }
        acc
    }
}

/// a(n) = f(n) W(n/N) n^{-it} for n ≤ N, with absent factors treated as 1.
pub fn coefficient_vector(
    f: &MultFnSpec,
    sieve: &FactorSieve,
    n: usize,
    window: Option<&dyn Profile>,
    twist: Option<ArchimedeanTwist>,
) -> Result<CoefficientVector> {
    if n == 0 || n as u64 > f.limit() {
        return Err(Error::domain(format!("N = {n} must lie in [1, {}]", f.limit())));
    }
    let table = f.table(sieve, n as u64)?;
    let nf = n as f64;
    let values = (1..=n)
        .map(|k| {
            let mut v = table[k];
            if let Some(w) = window {
                v *= w.eval(k as f64 / nf);
            }
            if let Some(tw) = twist {
                v *= tw.at(k as u64).conj();
            }
            v
        })
        .collect();
    CoefficientVector::new(values)
}

/// S(j/M) for j = 0..M.
#[derive(Debug, Clone)]
pub struct ExpSumGrid {
    n: usize,
    values: Vec<Complex64>,
    l1_coeff_sum: f64,
}

/// Smallest admissible grid size for N coefficients.
pub fn default_grid_size(n: usize) -> usize {
    (MIN_OVERSAMPLE * n.max(1)).next_power_of_two()
}

pub fn check_grid_size(n: usize, m: usize) -> Result<()> {
    if !m.is_power_of_two() || m < MIN_OVERSAMPLE * n {
        return Err(Error::domain(format!(
            "grid size M = {m} must be a power of two with M >= 8N = {}",
            MIN_OVERSAMPLE * n
        )));
    }
    Ok(())
}

/// Evaluates S on the grid j/M by one inverse FFT of the zero-padded coefficients.
pub fn grid_transform(a: &CoefficientVector, m: usize) -> Result<ExpSumGrid> {
    check_grid_size(a.len(), m)?;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    buf[1..=a.len()].copy_from_slice(a.values());
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    Ok(ExpSumGrid {
        n: a.len(),
        values: buf,
        l1_coeff_sum: a.l1(),
    })
}

impl ExpSumGrid {
    /// Rebuilds a grid from stored values; Σ|a| is recovered by a forward transform.
    pub fn from_values(n: usize, values: Vec<Complex64>) -> Result<Self> {
        let m = values.len();
        check_grid_size(n, m)?;
        let mut buf = values.clone();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let l1 = buf[1..=n].iter().map(|v| v.norm() / m as f64).sum();
        Ok(ExpSumGrid {
            n,
            values,
            l1_coeff_sum: l1,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn l1_coeff_sum(&self) -> f64 {
        self.l1_coeff_sum
    }

    pub fn alpha(&self, j: usize) -> f64 {
        j as f64 / self.m() as f64
    }

    pub fn grid_sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Bound on |d|S|/dα| over the whole circle.
    pub fn derivative_bound(&self) -> f64 {
        let trivial = 2.0 * PI * self.n as f64 * self.l1_coeff_sum;
        trivial.min(PI * self.n.saturating_sub(1) as f64 * self.sup_bound())
    }

    /// Upper bound for sup_α |S(α)| from the grid maximum.
    ///
    /// |S| has Lipschitz constant at most π(N-1)·sup|S| (Bernstein for exponential type),
    /// and every α is within 1/(2M) of a grid point.
    pub fn sup_bound(&self) -> f64 {
        let slack = PI * self.n.saturating_sub(1) as f64 / (2.0 * self.m() as f64);
        let mut b = self.l1_coeff_sum;
        if slack < 1.0 {
            b = b.min(self.grid_sup() / (1.0 - slack));
        }
        b
    }

    /// Element-wise sum of two grids of the same shape.
    pub fn add(&self, other: &ExpSumGrid) -> Result<ExpSumGrid> {
        if self.n != other.n || self.m() != other.m() {
            return Err(Error::domain("grids of different shapes cannot be added"));
        }
        Ok(ExpSumGrid {
            n: self.n,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            l1_coeff_sum: self.l1_coeff_sum + other.l1_coeff_sum,
        })
    }
}

/// A norm estimate together with a rigorous bound on its distance from the true value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error_bound: f64,
}

/// ‖S‖_p from the Riemann sum (1/M)Σ|S(j/M)|^p.
///
/// For p = 2 the sum is exact (|S|² has frequencies below M). Otherwise each grid cell
/// contributes at most sup|(|S|^p)'|/(4M²), which bounds the error of the mean; the
/// bound on the norm follows from the concavity of x ↦ x^{1/p}.
pub fn lp_norm(grid: &ExpSumGrid, p: f64) -> Result<Estimate> {
    lp_norm_weighted(grid, None, p)
}

/// As `lp_norm` but with each grid term multiplied by a weight in [0, 1].
pub fn lp_norm_weighted(grid: &ExpSumGrid, weights: Option<&[f64]>, p: f64) -> Result<Estimate> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::domain(format!("p = {p} must be a finite real >= 1")));
    }
    if let Some(w) = weights {
        if w.len() != grid.m() {
            return Err(Error::domain("weight vector length differs from the grid size"));
        }
    }
    if grid.l1_coeff_sum == 0.0 {
        return Ok(Estimate { value: 0.0, error_bound: 0.0 });
    }
    let m = grid.m() as f64;
    let sum: f64 = match weights {
        None => grid.values.iter().map(|v| pow_abs(v.norm(), p)).sum(),
        Some(w) => grid.values.iter().zip(w).map(|(v, &w)| w * pow_abs(v.norm(), p)).sum(),
    };
    let mean = sum / m;
    let value = mean.powf(1.0 / p);
    let rounding = value * 64.0 * f64::EPSILON * m.log2().max(1.0);
    if p == 2.0 && weights.is_none() {
        return Ok(Estimate { value, error_bound: rounding });
    }
    let sup = grid.sup_bound();
    let dg = p * sup.powf(p - 1.0) * grid.derivative_bound();
    let err_mean = dg / (4.0 * m);
    let mut err = err_mean.powf(1.0 / p);
    if mean > err_mean && p > 1.0 {
        err = err.min(err_mean / (p * (mean - err_mean).powf(1.0 - 1.0 / p)));
    } else if p == 1.0 {
        err = err_mean;
    }
    Ok(Estimate {
        value,
        error_bound: err + rounding,
    })
}

fn pow_abs(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x * x
    } else {
        x.powf(p)
    }
}

const QUAD_TOL: f64 = 1e-11;

/// ‖W‖_{p,r} = 1 + Σ_{j≤r} (∫|W^{(j)}|^p)^{1/p}.
pub fn sobolev_norm(w: &dyn Profile, p: f64, r: usize) -> Result<f64> {
    if r > MAX_DERIVATIVE {
        return Err(Error::domain(format!("derivative order r = {r} exceeds {MAX_DERIVATIVE}")));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::domain(format!("p = {p} must be a finite real >= 1")));
    }
    let breaks = w.breakpoints();
    let mut total = 1.0;
    for j in 0..=r {
        let (v, _) = quad::integrate_pieces(|x| pow_abs(w.derivatives(x)[j].abs(), p), &breaks, QUAD_TOL);
        total += v.max(0.0).powf(1.0 / p);
    }
    Ok(total)
}

/// W̃(s) = ∫ W(x) x^{s-1} dx for 0 < Re s < 2.
pub fn mellin_eval(w: &dyn Profile, s: Complex64) -> Result<Complex64> {
    if !(s.re > 0.0 && s.re < 2.0) || !s.im.is_finite() {
        return Err(Error::domain(format!("Re s = {} must lie in (0, 2)", s.re)));
    }
    let breaks = w.breakpoints();
    let kernel = |x: f64| Complex64::from_polar(x.powf(s.re - 1.0), s.im * x.ln()) * w.eval(x);
    let (re, _) = quad::integrate_pieces(|x| kernel(x).re, &breaks, QUAD_TOL);
    let (im, _) = quad::integrate_pieces(|x| kernel(x).im, &breaks, QUAD_TOL);
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::StandardKind;

    fn ones(n: usize) -> CoefficientVector {
        CoefficientVector::from_real(&vec![1.0; n]).unwrap()
    }

    #[test]
    fn coefficient_examples() {
        let s = FactorSieve::new(200).unwrap();
        let one = MultFnSpec::standard(StandardKind::One, &s, 200).unwrap();
        let lam = MultFnSpec::standard(StandardKind::Liouville, &s, 200).unwrap();
        assert_eq!(coefficient_vector(&one, &s, 4, None, None).unwrap(), ones(4));
        let l = coefficient_vector(&lam, &s, 5, None, None).unwrap();
        let re: Vec<f64> = l.values().iter().map(|v| v.re).collect();
        assert_eq!(re, vec![1.0, -1.0, -1.0, 1.0, -1.0]);
        let w = Window::plateau(0.25).unwrap();
        let a = coefficient_vector(&one, &s, 100, Some(&w), None).unwrap();
        assert_eq!(a.get(50).re, 1.0);
        assert_eq!(a.get(10).re, 0.0);
        assert!(a.get(20).re > 0.0 && a.get(20).re < 1.0);
        assert!(coefficient_vector(&one, &s, 201, None, None).is_err());
        let tw = coefficient_vector(&one, &s, 10, None, Some(ArchimedeanTwist::new(2.0))).unwrap();
        assert!((tw.get(3) - Complex64::from_polar(1.0, -2.0 * 3f64.ln())).norm() < 1e-14);
    }

    #[test]
    fn grid_examples() {
        let g = grid_transform(&ones(4), 32).unwrap();
        assert!((g.values()[0] - Complex64::new(4.0, 0.0)).norm() < 1e-12);
        assert!(g.values()[16].norm() < 1e-12);
        let single = grid_transform(&ones(1), 64).unwrap();
        assert!(single.values().iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
        let err = grid_transform(&ones(4), 16).unwrap_err();
        assert!(err.to_string().contains("8N = 32"));
        assert!(grid_transform(&ones(4), 48).is_err());
    }

    #[test]
    fn grid_matches_direct_sum() {
        let a = CoefficientVector::new(
            (1..=50).map(|n| Complex64::from_polar(1.0, (n * n) as f64 * 0.37)).collect(),
        )
        .unwrap();
        let g = grid_transform(&a, 512).unwrap();
        for j in [0, 1, 17, 255, 511] {
            assert!((g.values()[j] - a.eval_at(j as f64 / 512.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn norms() {
        let n = 100;
        let est = lp_norm(&grid_transform(&ones(n), 1024).unwrap(), 2.0).unwrap();
        assert!((est.value - 10.0).abs() <= est.error_bound.max(1e-12));
        let two = lp_norm(&grid_transform(&ones(2), 1 << 14).unwrap(), 1.0).unwrap();
        assert!((two.value - 4.0 / PI).abs() < 1e-6);
        assert!((two.value - 4.0 / PI).abs() <= two.error_bound);
        assert!(lp_norm(&grid_transform(&ones(2), 16).unwrap(), 0.5).is_err());
        let zero = CoefficientVector::from_real(&[0.0; 8]).unwrap();
        assert_eq!(
            lp_norm(&grid_transform(&zero, 64).unwrap(), 1.0).unwrap(),
            Estimate { value: 0.0, error_bound: 0.0 }
        );
    }

    #[test]
    fn grid_round_trip_recovers_l1() {
        let a = CoefficientVector::from_real(&[0.5, -1.0, 0.25, 1.0]).unwrap();
        let g = grid_transform(&a, 32).unwrap();
        let h = ExpSumGrid::from_values(4, g.values().to_vec()).unwrap();
        assert!((h.l1_coeff_sum() - 2.75).abs() < 1e-12);
    }

    #[test]
    fn sobolev_and_mellin() {
        let w = Window::plateau(0.25).unwrap();
        assert_eq!(sobolev_norm(&ZeroProfile, 2.0, 2).unwrap(), 1.0);
        assert!(sobolev_norm(&w, 1.0, 5).is_err());
        let n0 = sobolev_norm(&w, 1.0, 0).unwrap();
        assert!((n0 - 1.625).abs() < 1e-9);
        // W' integrates to total variation 2
        let n1 = sobolev_norm(&w, 1.0, 1).unwrap();
        assert!((n1 - n0 - 2.0).abs() < 1e-8);
        let m1 = mellin_eval(&w, Complex64::new(1.0, 0.0)).unwrap();
        assert!((m1.re - 0.625).abs() < 1e-9 && m1.im.abs() < 1e-12);
        assert_eq!(mellin_eval(&ZeroProfile, Complex64::new(1.0, 3.0)).unwrap(), Complex64::new(0.0, 0.0));
        assert!(mellin_eval(&w, Complex64::new(2.0, 0.0)).is_err());
        assert!(mellin_eval(&w, Complex64::new(0.0, 1.0)).is_err());
    }
}
