//! Truncated Taylor series of order 4, used to differentiate the window profiles exactly.

use std::ops::{Add, Mul, Neg, Sub};

pub const ORDER: usize = 5;

/// Coefficients `c[k] = f^{(k)}(x0) / k!` for k < 5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet(pub [f64; ORDER]);

impl Jet {
    pub fn constant(c: f64) -> Self {
        let mut v = [0.0; ORDER];
        v[0] = c;
        Jet(v)
    }

    /// The identity function expanded at `x`.
    pub fn variable(x: f64) -> Self {
        let mut v = [0.0; ORDER];
        v[0] = x;
        v[1] = 1.0;
        Jet(v)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// Derivatives f, f', ..., f''''.
    pub fn derivatives(&self) -> [f64; ORDER] {
        let mut out = self.0;
        let mut fact = 1.0;
        for (k, d) in out.iter_mut().enumerate().skip(1) {
            fact *= k as f64;
            *d *= fact;
        }
        out
    }

    pub fn scale(self, s: f64) -> Self {
        Jet(self.0.map(|c| c * s))
    }

    pub fn recip(self) -> Self {
        let a = self.0;
        let mut b = [0.0; ORDER];
        b[0] = 1.0 / a[0];
        for k in 1..ORDER {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s / a[0];
        }
        Jet(b)
    }

    pub fn exp(self) -> Self {
        // b' = a' b  =>  k b_k = Σ_{j=1..k} j a_j b_{k-j}
        let a = self.0;
        let mut b = [0.0; ORDER];
        b[0] = a[0].exp();
        for k in 1..ORDER {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * b[k - j]).sum();
            b[k] = s / k as f64;
        }
        Jet(b)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut v = self.0;
        v.iter_mut().zip(o.0).for_each(|(a, b)| *a += b);
        Jet(v)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.map(|c| -c))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut v = [0.0; ORDER];
        for i in 0..ORDER {
            for j in 0..ORDER - i {
                v[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(v)
    }
}
