//! Smooth cut-offs built from the C^∞ glue ψ(x) = e^{-1/x}.
//!
//! The smoothstep `S(u) = ψ(u) / (ψ(u) + ψ(1-u))` is 0 for u ≤ 0, 1 for u ≥ 1 and
//! flat to all orders at both ends. The plateau window rises by `S` on
//! `[ε/2, ε]` and falls by `S` on `[1-ε, 1-ε/2]`. The dyadic bump is
//! `K(x) = Φ(x/2) - Φ(x)` with `Φ(x) = 1 - S(2x - 1)`, which is supported on
//! `[1/2, 2]` and sums to 1 over dilates `n / 2^k`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::jet::{Jet, ORDER};
use crate::error::{Error, Result};

/// Highest derivative order available from windows.
pub const MAX_DERIVATIVE: usize = ORDER - 1;

/// Something with a compactly supported profile and derivatives up to order 4.
pub trait Profile {
    /// W(x), W'(x), ..., W''''(x).
    fn derivatives(&self, x: f64) -> [f64; ORDER];

    fn eval(&self, x: f64) -> f64 {
        self.derivatives(x)[0]
    }

    fn support(&self) -> (f64, f64);

    /// Points (including the support ends) between which the profile is analytic.
    fn breakpoints(&self) -> Vec<f64>;
}

/// The identically zero profile.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroProfile;

impl Profile for ZeroProfile {
    fn derivatives(&self, _x: f64) -> [f64; ORDER] {
        [0.0; ORDER]
    }

    fn support(&self) -> (f64, f64) {
        (0.5, 0.5)
    }

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Plateau,
    DyadicBump,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Window {
    eps: f64,
    kind: WindowKind,
    constants: [f64; ORDER],
}

fn glue(u: Jet) -> Jet {
    u.recip().scale(-1.0).exp()
}

/// Jet of S at `u`, with `u` given as a jet in the outer variable.
fn smoothstep_jet(u: Jet) -> Jet {
    // Beyond these cut-offs every derivative is below 1e-190.
    let v = u.value();
    if v <= 2e-3 {
        return Jet::constant(0.0);
    }
    if v >= 1.0 - 2e-3 {
        return Jet::constant(1.0);
    }
    let a = glue(u);
    let b = glue(Jet::constant(1.0) - u);
    a * (a + b).recip()
}

/// Derivatives of the smoothstep itself at `u`.
pub fn smoothstep(u: f64) -> [f64; ORDER] {
    smoothstep_jet(Jet::variable(u)).derivatives()
}

/// max_u |S^{(j)}(u)|, tabulated once on a fine mesh with a small safety margin.
fn smoothstep_maxima() -> &'static [f64; ORDER] {
    static MAXIMA: OnceLock<[f64; ORDER]> = OnceLock::new();
    MAXIMA.get_or_init(|| {
        let steps = 200_000;
        let mut m = [0.0f64; ORDER];
        for i in 1..steps {
            let d = smoothstep(i as f64 / steps as f64);
            for j in 0..ORDER {
                m[j] = m[j].max(d[j].abs());
            }
        }
        m.map(|v| v * 1.001)
    })
}

impl Window {
    /// Builds a window; `eps` must lie in (0, 1/2). The dyadic bump does not depend on `eps`.
    pub fn new(eps: f64, kind: WindowKind) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::domain(format!("window parameter eps = {eps} must lie in (0, 1/2)")));
        }
        let s = smoothstep_maxima();
        let constants = match kind {
            WindowKind::Plateau => std::array::from_fn(|j| 2f64.powi(j as i32) * s[j]),
            WindowKind::DyadicBump => std::array::from_fn(|j| (2f64.powi(j as i32) + 1.0) * s[j]),
        };
        Ok(Window { eps, kind, constants })
    }

    pub fn plateau(eps: f64) -> Result<Self> {
        Self::new(eps, WindowKind::Plateau)
    }

    pub fn dyadic_bump() -> Self {
        Self::new(0.25, WindowKind::DyadicBump).expect("fixed parameter is valid")
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    /// Recorded constants c_j: |W^{(j)}| ≤ c_j ε^{-j} for the plateau kind and
    /// |K^{(j)}| ≤ c_j for the dyadic bump.
    pub fn derivative_constants(&self) -> [f64; ORDER] {
        self.constants
    }

    /// Bound on sup |W^{(j)}| implied by the recorded constants.
    pub fn derivative_bound(&self, j: usize) -> f64 {
        match self.kind {
            WindowKind::Plateau => self.constants[j] * self.eps.powi(-(j as i32)),
            WindowKind::DyadicBump => self.constants[j],
        }
    }
}

impl Profile for Window {
    fn derivatives(&self, x: f64) -> [f64; ORDER] {
        let xj = Jet::variable(x);
        match self.kind {
            WindowKind::Plateau => {
                let h = self.eps / 2.0;
                if x <= h || x >= 1.0 - h {
                    return [0.0; ORDER];
                }
                if x < self.eps {
                    let u = (xj - Jet::constant(h)).scale(1.0 / h);
                    return smoothstep_jet(u).derivatives();
                }
                if x > 1.0 - self.eps {
                    let u = (Jet::constant(1.0 - h) - xj).scale(1.0 / h);
                    return smoothstep_jet(u).derivatives();
                }
                let mut d = [0.0; ORDER];
                d[0] = 1.0;
                d
            }
            WindowKind::DyadicBump => {
                if x <= 0.5 || x >= 2.0 {
                    return [0.0; ORDER];
                }
                let up = smoothstep_jet(xj.scale(2.0) - Jet::constant(1.0));
                let down = smoothstep_jet(xj - Jet::constant(1.0));
                (up - down).derivatives()
            }
        }
    }

    fn support(&self) -> (f64, f64) {
        match self.kind {
            WindowKind::Plateau => (self.eps / 2.0, 1.0 - self.eps / 2.0),
            WindowKind::DyadicBump => (0.5, 2.0),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            WindowKind::Plateau => {
                let e = self.eps;
                vec![e / 2.0, e, 1.0 - e, 1.0 - e / 2.0]
            }
            WindowKind::DyadicBump => vec![0.5, 1.0, 2.0],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_shape() {
        let w = Window::plateau(0.25).unwrap();
        assert_eq!(w.eval(0.5), 1.0);
        assert_eq!(w.eval(1.0 / 16.0), 0.0);
        assert_eq!(w.eval(0.95), 0.0);
        assert_eq!(w.eval(0.1), 0.0);
        let x = 0.2;
        assert!(w.eval(x) > 0.0 && w.eval(x) < 1.0);
        assert!((w.eval(0.1875) - 0.5).abs() < 1e-12);
        assert!(Window::plateau(0.5).is_err());
        assert!(Window::plateau(0.0).is_err());
    }

    #[test]
    fn smoothstep_symmetry_and_finite_differences() {
        for i in 1..100 {
            let u = i as f64 / 100.0;
            let a = smoothstep(u);
            let b = smoothstep(1.0 - u);
            assert!((a[0] + b[0] - 1.0).abs() < 1e-14);
            let h = 1e-6;
            let fd = (smoothstep(u + h)[0] - smoothstep(u - h)[0]) / (2.0 * h);
            assert!((fd - a[1]).abs() < 1e-6);
            let fd2 = (smoothstep(u + h)[1] - smoothstep(u - h)[1]) / (2.0 * h);
            assert!((fd2 - a[2]).abs() < 1e-5 * a[2].abs().max(1.0));
        }
    }

    #[test]
    fn dyadic_partition_small() {
        let k = Window::dyadic_bump();
        for n in 1..5000u64 {
            let mut s = 0.0;
            let mut scale = 1.0;
            while (n as f64) / scale > 0.5 {
                s += k.eval(n as f64 / scale);
                scale *= 2.0;
            }
            assert!((s - 1.0).abs() < 1e-12, "n = {n}: {s}");
        }
    }
}
