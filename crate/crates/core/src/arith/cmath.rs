use num_complex::Complex64;
use std::f64::consts::TAU;

/// e(x) = exp(2πix), with `x` reduced mod 1 before the trigonometric call.
pub fn e(x: f64) -> Complex64 {
    let r = x - x.floor();
    Complex64::from_polar(1.0, TAU * r)
}

/// e(num/den) for integers, exact at multiples of 1/4.
pub fn e_frac(num: i64, den: u64) -> Complex64 {
    debug_assert!(den > 0);
    let r = num.rem_euclid(den as i64) as u64;
    if (4 * r).is_multiple_of(den) {
        return match 4 * r / den {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, TAU * (r as f64 / den as f64))
}

/// n^{it}
pub fn n_it(n: u64, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, t * (n as f64).ln())
}
