//! Adaptive Gauss–Kronrod (7/15) quadrature.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// ∫_a^b f with absolute tolerance `tol`; returns (value, estimated error).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    if b <= a {
        return (0.0, 0.0);
    }
    let mut stack = vec![(a, b, kronrod(&f, a, b), 0u32)];
    let mut total = 0.0;
    let mut err = 0.0;
    while let Some((lo, hi, (v, e), depth)) = stack.pop() {
        let local_tol = tol * (hi - lo) / (b - a);
        if e <= local_tol.max(1e-15 * v.abs()) || depth >= 40 {
            total += v;
            err += e;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        stack.push((lo, mid, kronrod(&f, lo, mid), depth + 1));
        stack.push((mid, hi, kronrod(&f, mid, hi), depth + 1));
    }
    (total, err)
}

/// Integrates over consecutive pieces `[breaks[i], breaks[i+1]]`.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> (f64, f64) {
    let pieces = breaks.len().saturating_sub(1).max(1) as f64;
    breaks.windows(2).fold((0.0, 0.0), |(v, e), w| {
        let (pv, pe) = integrate(&f, w[0], w[1], tol / pieces);
        (v + pv, e + pe)
    })
}
