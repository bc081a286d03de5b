//! Major arcs: the union of (a/q − Q/(qN), a/q + Q/(qN)) over reduced a/q with q ≤ Q,
//! taken on the circle R/Z.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::expsum::ExpSumGrid;

/// Fractions enumerated before giving up with a resource error.
pub const MAX_FRACTIONS: u64 = 1 << 26;

/// Grid points required inside every merged arc.
pub const MIN_POINTS_PER_ARC: f64 = 16.0;

/// A merged arc. `left < right` on the lifted line; only the arc through 0 has `left < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    /// Center of the smallest denominator among the merged pieces.
    pub a: u64,
    pub q: u64,
    pub left: f64,
    pub right: f64,
}

impl Arc {
    pub fn length(&self) -> f64 {
        self.right - self.left
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcSet {
    q_max: u64,
    n: u64,
    intervals: Vec<Arc>,
    total_measure: f64,
    saturated: bool,
}

/// Half-width Q/(qN) of the arc around a fraction with denominator q.
pub fn half_width(q_max: u64, n: u64, q: u64) -> f64 {
    q_max as f64 / (q as f64 * n as f64)
}

/// Next term of the Farey sequence of order `order` after a/b, c/d.
fn farey_next(a: u64, b: u64, c: u64, d: u64, order: u64) -> (u64, u64) {
    let k = (order + b) / d;
    (k * c - a, k * d - b)
}

/// Calls `visit(a, q)` for reduced fractions in [0, 1) with q ≤ order, in increasing order.
pub fn for_each_fraction(order: u64, mut visit: impl FnMut(u64, u64)) {
    visit(0, 1);
    if order < 2 {
        return;
    }
    let (mut a, mut b, mut c, mut d) = (0, 1, 1, order);
    while c < d {
        visit(c, d);
        let (e, f) = farey_next(a, b, c, d, order);
        (a, b, c, d) = (c, d, e, f);
    }
}

pub fn major_arcs(q_max: u64, n: u64) -> Result<ArcSet> {
    if q_max < 1 || n < 1 {
        return Err(Error::domain(format!("need Q >= 1 and N >= 1, got Q = {q_max}, N = {n}")));
    }
    // Farey neighbours have q + q' ≥ Q + 1, so Q(Q + 1) ≥ N closes every gap.
    if (q_max as u128) * (q_max as u128 + 1) >= n as u128 {
        return Ok(ArcSet::saturated(q_max, n));
    }
    let estimate = (0.31 * (q_max as f64).powi(2)) as u64;
    if estimate > MAX_FRACTIONS {
        return Err(Error::Resource {
            what: "major-arc fractions",
            requested: estimate,
            limit: MAX_FRACTIONS,
        });
    }

    let mut merged: Vec<Arc> = Vec::new();
    for_each_fraction(q_max, |a, q| {
        let c = a as f64 / q as f64;
        let w = half_width(q_max, n, q);
        let piece = Arc { a, q, left: c - w, right: c + w };
        match merged.last_mut() {
            Some(last) if piece.left <= last.right => {
                last.right = last.right.max(piece.right);
                if piece.q < last.q {
                    last.a = piece.a;
                    last.q = piece.q;
                }
            }
            _ => merged.push(piece),
        }
    });
    // The tail may reach around to the arc through 0.
    if merged.len() > 1 {
        let first_left = merged[0].left + 1.0;
        let last = *merged.last().expect("non-empty");
        if last.right >= first_left {
            merged.pop();
            let first = &mut merged[0];
            first.left = last.left - 1.0;
        }
    }
    let total: f64 = merged.iter().map(Arc::length).sum();
    if total >= 1.0 || merged[0].length() >= 1.0 {
        return Ok(ArcSet::saturated(q_max, n));
    }
    Ok(ArcSet {
        q_max,
        n,
        intervals: merged,
        total_measure: total,
        saturated: false,
    })
}

impl ArcSet {
    fn saturated(q_max: u64, n: u64) -> Self {
        ArcSet {
            q_max,
            n,
            intervals: vec![Arc { a: 0, q: 1, left: -0.5, right: 0.5 }],
            total_measure: 1.0,
            saturated: true,
        }
    }

    pub fn q_max(&self) -> u64 {
        self.q_max
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn intervals(&self) -> &[Arc] {
        &self.intervals
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    /// True when the arcs cover the whole circle and the minor arcs are empty.
    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// Membership of α (any real, read mod 1) in the open arc set.
    pub fn contains(&self, alpha: f64) -> bool {
        if self.saturated {
            return true;
        }
        let x = alpha - alpha.floor();
        let idx = self.intervals.partition_point(|arc| arc.right <= x);
        let hit = |arc: &Arc, y: f64| arc.left < y && y < arc.right;
        self.intervals.get(idx).is_some_and(|arc| hit(arc, x)) || hit(&self.intervals[0], x - 1.0)
    }

    /// Fraction of each grid cell [j/M − 1/(2M), j/M + 1/(2M)] lying inside the arcs.
    pub fn cell_weights(&self, m: usize) -> Vec<f64> {
        if self.saturated {
            return vec![1.0; m];
        }
        let mf = m as f64;
        let mut w = vec![0.0; m];
        for arc in &self.intervals {
            let lo = (arc.left * mf - 0.5).floor() as i64;
            let hi = (arc.right * mf + 0.5).ceil() as i64;
            for j in lo..=hi {
                let c = j as f64 / mf;
                let h = 0.5 / mf;
                let overlap = (arc.right.min(c + h) - arc.left.max(c - h)).max(0.0) * mf;
                if overlap > 0.0 {
                    w[j.rem_euclid(m as i64) as usize] += overlap;
                }
            }
        }
        w.iter_mut().for_each(|x| *x = x.min(1.0));
        w
    }

    fn check_grid(&self, grid: &ExpSumGrid) -> Result<()> {
        if grid.n() as u64 != self.n {
            return Err(Error::domain(format!(
                "grid built for N = {} but arcs built for N = {}",
                grid.n(),
                self.n
            )));
        }
        let narrowest = self.intervals.iter().map(Arc::length).fold(f64::INFINITY, f64::min);
        // the narrowest possible arc, 2/N, holds exactly 16 points when M = 8N
        if narrowest * (grid.m() as f64) < MIN_POINTS_PER_ARC * (1.0 - 1e-9) {
            return Err(Error::Resolution(format!(
                "narrowest arc has width {narrowest:.3e}, fewer than {MIN_POINTS_PER_ARC} points of a grid with M = {}",
                grid.m()
            )));
        }
        Ok(())
    }

    /// Writes `a,q,left,right` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "a,q,left,right")?;
        for arc in &self.intervals {
            writeln!(out, "{},{},{:.17e},{:.17e}", arc.a, arc.q, arc.left, arc.right)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Location {
    /// Inside the arc around a/q (smallest such q).
    Major { a: u64, q: u64 },
    /// Outside; a/q is a rational approximation with |α − a/q| ≤ Q/(qN) and q ≤ N/Q.
    Minor { a: u64, q: u64 },
}

/// Classifies α (read mod 1) as a major or minor point and returns the witnessing fraction.
pub fn locate(alpha: f64, q_max: u64, n: u64) -> Location {
    let x = alpha - alpha.floor();
    for q in 1..=q_max {
        let a = (q as f64 * x).round();
        let dist = (x - a / q as f64).abs();
        if dist < half_width(q_max, n, q) {
            let a = a as u64 % q;
            let g = gcd(a, q);
            return Location::Major { a: a / g, q: q / g };
        }
    }
    let bound = n as f64 / q_max as f64;
    let (a, q) = last_convergent(x, bound);
    Location::Minor { a: a % q, q }
}

/// Last continued-fraction convergent p/q of x ∈ [0, 1) with q ≤ bound, computed
/// exactly on the dyadic rational nearest to x·2^64.
pub fn last_convergent(x: f64, bound: f64) -> (u64, u64) {
    let scale = 2f64.powi(64);
    let mut num: u128 = (x * scale).round() as u128;
    let mut den: u128 = 1u128 << 64;
    let (mut h1, mut h2): (u128, u128) = (1, 0);
    let (mut k1, mut k2): (u128, u128) = (0, 1);
    let mut best = (0u64, 1u64);
    while den != 0 {
        let t = num / den;
        let h = t * h1 + h2;
        let k = t * k1 + k2;
        if k as f64 > bound {
            break;
        }
        best = (h as u64, k as u64);
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
        (num, den) = (den, num - t * den);
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySplit {
    pub major: f64,
    pub minor: f64,
    /// ‖S‖₂², exact on the grid.
    pub total: f64,
    /// Bound on the quadrature error of each part.
    pub error_bound: f64,
}

impl EnergySplit {
    pub fn major_fraction(&self) -> f64 {
        if self.total == 0.0 { 0.0 } else { self.major / self.total }
    }
}

/// ∫ |S|² over major and minor arcs by proportionally weighted grid cells.
pub fn energy_split(grid: &ExpSumGrid, arcs: &ArcSet) -> Result<EnergySplit> {
    arcs.check_grid(grid)?;
    let w = arcs.cell_weights(grid.m());
    let m = grid.m() as f64;
    let (major, total) = grid
        .values()
        .par_iter()
        .zip(w.par_iter())
        .map(|(v, &w)| {
            let e = v.norm_sqr();
            (w * e, e)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let major = major / m;
    let total = total / m;
    let minor = (total - major).max(0.0);
    let sup = grid.sup_bound();
    let error_bound = if total == 0.0 { 0.0 } else { 2.0 * sup * grid.derivative_bound() / (4.0 * m) };
    Ok(EnergySplit { major, minor, total, error_bound })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinorSup {
    /// max |S(j/M)| over grid points with positive minor weight; 0 when there are none.
    pub value: f64,
    pub alpha: Option<f64>,
    /// Bound on how far the true supremum near those points can exceed `value`.
    pub slack: f64,
}

pub fn minor_sup(grid: &ExpSumGrid, arcs: &ArcSet) -> Result<MinorSup> {
    arcs.check_grid(grid)?;
    let w = arcs.cell_weights(grid.m());
    minor_sup_weighted(grid, &w)
}

/// Sup over grid points whose major weight is below 1.
pub fn minor_sup_weighted(grid: &ExpSumGrid, weights: &[f64]) -> Result<MinorSup> {
    if weights.len() != grid.m() {
        return Err(Error::domain("weight vector length differs from the grid size"));
    }
    let best = grid
        .values()
        .par_iter()
        .zip(weights.par_iter())
        .enumerate()
        .filter(|(_, (_, &w))| w < 1.0)
        .map(|(j, (v, _))| (v.norm(), j))
        .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    let slack = grid.derivative_bound() / (2.0 * grid.m() as f64);
    Ok(match best {
        Some((value, j)) => MinorSup { value, alpha: Some(grid.alpha(j)), slack },
        None => MinorSup { value: 0.0, alpha: None, slack: 0.0 },
    })
}
