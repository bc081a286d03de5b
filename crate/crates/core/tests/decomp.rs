use num_complex::Complex64;
use proptest::prelude::*;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use multl1::arcs::major_arcs;
use multl1::arith::{FactorSieve, MultFnSpec, StandardKind};
use multl1::decomp::{
    criterion_certificate, presieve, presieve_gap, tk_check, tk_split, CriterionInput, CriterionReport, TkWeights,
};
use multl1::expsum::{coefficient_vector, grid_transform, CoefficientVector};
use multl1::pretentious::PrimeInterval;

fn trial_primes(lo: f64, hi: f64) -> Vec<u64> {
    (lo.ceil().max(2.0) as u64..=hi.floor() as u64)
        .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(200) })]

    #[test]
    fn partition_of_unity(lo in 2.0f64..200.0, len in 0.0f64..400.0, n in 1u64..5000) {
        let s = FactorSieve::new(5000).unwrap();
        let hi = (lo + len).min(5000.0);
        let primes = trial_primes(lo, hi);
        let i = PrimeInterval::new(lo, hi).unwrap();
        match TkWeights::new(&i, &s) {
            Err(_) => prop_assert!(primes.is_empty()),
            Ok(w) => {
                let (c1, c2) = (w.c1(&s, n), w.c2(&s, n));
                prop_assert!((c1 + c2 - 1.0).abs() <= 1e-12);
                prop_assert!(c1 >= 0.0);
                prop_assert_eq!(c1 == 0.0, primes.iter().all(|p| n % p != 0));
            }
        }
    }

    #[test]
    fn tk_lhs_matches_brute_force(lo in 2.0f64..60.0, len in 0.0f64..300.0, n in 1u64..=10_000) {
        let s = FactorSieve::new(10_000).unwrap();
        let primes = trial_primes(lo, lo + len);
        prop_assume!(!primes.is_empty());
        let h: f64 = primes.iter().map(|&p| 1.0 / p as f64).sum();
        let oracle: f64 = (1..=n)
            .map(|m| (1.0 - primes.iter().filter(|&&p| m % p == 0).count() as f64 / h).powi(2))
            .sum();
        let got = tk_check(&PrimeInterval::new(lo, lo + len).unwrap(), n, &s).unwrap();
        prop_assert!((got.lhs - oracle).abs() <= 1e-9 * oracle.max(1.0));
        prop_assert!((got.rhs - 4.0 * n as f64 / h).abs() <= 1e-9 * got.rhs);
    }
}

#[test]
fn tk_examples() {
    let s = FactorSieve::new(100_000).unwrap();
    let small = tk_check(&PrimeInterval::new(2.0, 10.0).unwrap(), 10_000, &s).unwrap();
    let h = 1.0 / 2.0 + 1.0 / 3.0 + 1.0 / 5.0 + 1.0 / 7.0;
    let mut oracle = 0.0;
    for n in 1..=10_000u64 {
        let mut w = 0.0;
        for p in [2u64, 3, 5, 7] {
            if n % p == 0 {
                w += 1.0;
            }
        }
        oracle += (1.0 - w / h) * (1.0 - w / h);
    }
    assert!((small.lhs - oracle).abs() <= 1e-9);
    assert!(tk_check(&PrimeInterval::new(2.0, 100.0).unwrap(), 100_000, &s).unwrap().ratio <= 1.0);
    // no prime of the interval divides any n ≤ N, so c₂ ≡ 1
    let n = 1000u64;
    let c = tk_check(&PrimeInterval::new((n + 1) as f64, (2 * n) as f64).unwrap(), n, &s).unwrap();
    assert_eq!(c.lhs, n as f64);
    assert!(tk_check(&PrimeInterval::new(2.0, 10.0).unwrap(), 200_000, &s).is_err());
}

#[test]
fn tk_split_recombines() {
    let s = FactorSieve::new(4096).unwrap();
    let f = MultFnSpec::standard(StandardKind::Moebius, &s, 4096).unwrap();
    let base = coefficient_vector(&f, &s, 4096, None, None).unwrap();
    let w = TkWeights::new(&PrimeInterval::new(5.0, 50.0).unwrap(), &s).unwrap();
    let (a1, a2) = tk_split(&base, &w).unwrap();
    for n in 1..=4096 {
        assert!((a1.get(n) + a2.get(n) - base.get(n)).norm() < 1e-12);
    }
}

#[test]
fn presieve_complete_multiplicativity() {
    let n_max = 1u64 << 16;
    let s = FactorSieve::new(n_max).unwrap();
    let mut r = Xoshiro256PlusPlus::seed_from_u64(11);
    let mut phase = 0.0f64;
    let wild = MultFnSpec::multiplicative(&s, n_max, |p, k| {
        phase += 0.37 * p as f64 + k as f64;
        if k >= 2 && p % 3 == 1 { Complex64::new(0.0, 0.0) } else { Complex64::from_polar(1.0, phase) }
    })
    .unwrap();
    let fs = [
        MultFnSpec::standard(StandardKind::Moebius, &s, n_max).unwrap(),
        MultFnSpec::standard(StandardKind::Liouville, &s, n_max).unwrap(),
        wild,
    ];
    for f in &fs {
        for a in [2.0, 10.0, 97.5] {
            let p = presieve(f, a, &s).unwrap();
            assert!(p.geq.is_completely_multiplicative());
            for _ in 0..3400 {
                let m = 1 + r.next_u64() % 256;
                let k = 1 + r.next_u64() % 256;
                let lhs = p.geq.eval(&s, m * k).unwrap();
                let rhs = p.geq.eval(&s, m).unwrap() * p.geq.eval(&s, k).unwrap();
                assert!((lhs - rhs).norm() < 1e-12, "A = {a}, {m} * {k}");
            }
            for q in [2u64, 3, 5, 7, 11, 97, 101, 103] {
                let want = if q as f64 <= a { Complex64::new(1.0, 0.0) } else { f.at_prime(q) };
                assert_eq!(p.geq.at_prime(q), want);
                assert_eq!(p.hat.at_prime(q), want);
            }
        }
    }
    let lambda = &fs[1];
    let p = presieve(lambda, 2.0, &s).unwrap();
    assert_eq!(p.geq.eval(&s, 4).unwrap(), Complex64::new(1.0, 0.0));
    assert_eq!(p.geq.eval(&s, 15).unwrap(), Complex64::new(1.0, 0.0));
}

#[test]
fn presieve_gap_scales_like_n_over_a() {
    let n = 1u64 << 20;
    let s = FactorSieve::new(n).unwrap();
    let mu = MultFnSpec::standard(StandardKind::Moebius, &s, n).unwrap();
    let cs: Vec<f64> = [10.0, 100.0, 1000.0].iter().map(|&a| presieve_gap(&mu, a, n, &s).unwrap().normalized).collect();
    // one constant for every A; the true decay is N/(A log A), and only p² ≤ N contributes
    const C: f64 = 0.5;
    assert!(cs.iter().all(|&c| c > 0.0 && c <= C), "{cs:?}");
    assert!(cs.windows(2).all(|w| w[1] <= w[0]), "{cs:?}");
    let lambda = MultFnSpec::standard(StandardKind::Liouville, &s, n).unwrap();
    assert_eq!(presieve_gap(&lambda, 100.0, n, &s).unwrap().gap, 0.0);
}

#[test]
fn certificate_pure_frequency() {
    let n = 1usize << 10;
    let half = CoefficientVector::new((1..=n).map(|k| multl1::arith::e_frac(-(k as i64), 2)).collect()).unwrap();
    let g = grid_transform(&half, 8 * n).unwrap();
    let zero = grid_transform(&CoefficientVector::from_real(&vec![0.0; n]).unwrap(), 8 * n).unwrap();
    let rep = criterion_certificate(&CriterionInput::new(g, zero.clone(), zero, 1.0, major_arcs(8, n as u64).unwrap()).unwrap())
        .unwrap();
    assert_eq!((rep.delta2, rep.delta3), (0.0, 0.0));
    assert!(rep.delta1 > 0.95);
    assert!(rep.lower_bound.unwrap_or(0.0) < 1e-3 * rep.measured_l1.value);
}

fn liouville_split(n: usize, q: u64) -> (CriterionReport, CriterionReport) {
    let s = FactorSieve::new(n as u64).unwrap();
    let f = MultFnSpec::standard(StandardKind::Liouville, &s, n as u64).unwrap();
    let base = coefficient_vector(&f, &s, n, None, None).unwrap();
    let w = TkWeights::new(&PrimeInterval::new(q as f64, n as f64).unwrap(), &s).unwrap();
    let (a1, a2) = tk_split(&base, &w).unwrap();
    let (s1, s2) = (grid_transform(&a1, 8 * n).unwrap(), grid_transform(&a2, 8 * n).unwrap());
    let zero = grid_transform(&CoefficientVector::from_real(&vec![0.0; n]).unwrap(), 8 * n).unwrap();
    let arcs = major_arcs(q, n as u64).unwrap();
    let delta = multl1::decomp::admissible_delta(&s1, &s1.add(&s2).unwrap(), &arcs).unwrap();
    let at = |d: f64| criterion_certificate(&CriterionInput::new(s1.clone(), s2.clone(), zero.clone(), d, arcs.clone()).unwrap()).unwrap();
    (at(delta), at(delta * 4.0))
}

#[test]
fn certificate_liouville_split() {
    let (rep, too_big) = liouville_split(1 << 16, 64);
    eprintln!(
        "λ split N=2^16 Q=64: δ = ({:.4}, {:.4}, {:.4}), applicable {}, bound {:?}, measured {:.3} ± {:.3}",
        rep.delta1, rep.delta2, rep.delta3, rep.applicable, rep.lower_bound, rep.measured_l1.value, rep.measured_l1.error_bound
    );
    assert!(rep.consistent);
    if let Some(b) = rep.lower_bound {
        assert!(b <= rep.measured_l1.value + rep.measured_l1.error_bound);
    }
    assert!(rep.minor_sup_holds);
    // past the admissible level the sup hypothesis fails and nothing is claimed
    assert!(!too_big.minor_sup_holds && !too_big.applicable && too_big.lower_bound.is_none());
    let json: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
    assert_eq!(json["format_version"], 1);
    assert_eq!(json["n"], 1 << 16);
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(40) })]

    #[test]
    fn certificate_soundness(seed in any::<u64>(), q in 1u64..12, r2 in 0.0f64..0.3, r3 in 0.0f64..0.3, scale in 0.1f64..1.0) {
        let n = 1usize << 10;
        let mut r = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut draw = |amp: f64| -> Vec<Complex64> {
            (0..n)
                .map(|_| {
                    let u = (r.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
                    let v = (r.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
                    Complex64::from_polar(amp * u, std::f64::consts::TAU * v)
                })
                .collect()
        };
        let a1 = CoefficientVector::new(draw(1.0)).unwrap();
        let a2 = CoefficientVector::weighted(draw(r2)).unwrap();
        let a3 = CoefficientVector::weighted(draw(r3)).unwrap();
        let g = |a: &CoefficientVector| grid_transform(a, 8 * n).unwrap();
        let (s1, s2, s3) = (g(&a1), g(&a2), g(&a3));
        let arcs = major_arcs(q, n as u64).unwrap();
        let d = multl1::decomp::admissible_delta(&s1, &s1.add(&s2).unwrap().add(&s3).unwrap(), &arcs).unwrap();
        let delta = if d.is_finite() { d * scale } else { 1.0 };
        let rep = criterion_certificate(&CriterionInput::new(s1, s2, s3, delta, arcs).unwrap()).unwrap();
        prop_assert!(rep.consistent, "{}", rep.to_json());
        prop_assert!(rep.delta3 >= rep.delta3_plain - 1e-12);
        prop_assert!(rep.delta3 <= std::f64::consts::SQRT_2 * rep.delta3_plain + 1e-12);
    }
}
