use kpz_core::rng;
use kpz_core::tasep::*;
use kpz_core::weights::WeightField;
use proptest::prelude::*;

#[test]
fn single_valley_flips_with_probability_one_minus_q() {
    let q = 0.25;
    let h0 = HeightFunction::new(-1, vec![1, 0, 1]).unwrap();
    let mut r = rng::chacha(11);
    let trials = 100_000;
    let mut up = 0;
    for _ in 0..trials {
        let mut h = h0.clone();
        step_dynamics(&mut h, q, &mut r);
        up += (h.at(0) == Some(2)) as u32;
    }
    let p = up as f64 / trials as f64;
    let se = (0.75f64 * 0.25 / trials as f64).sqrt();
    assert!((p - 0.75).abs() < 4.0 * se, "{p}");
}

#[test]
fn two_valleys_update_independently() {
    // Valleys at sites 0 and 2; four joint outcomes.
    let q = 0.25;
    let h0 = HeightFunction::new(-1, vec![1, 0, 1, 0, 1]).unwrap();
    let mut r = rng::chacha(12);
    let trials = 100_000;
    let mut counts = [0u32; 4];
    for _ in 0..trials {
        let mut h = h0.clone();
        step_dynamics(&mut h, q, &mut r);
        let a = (h.at(0) == Some(2)) as usize;
        let b = (h.at(2) == Some(2)) as usize;
        counts[2 * a + b] += 1;
    }
    let p = 1.0 - q;
    let expect = [q * q, q * p, p * q, p * p];
    let chi2: f64 = counts
        .iter()
        .zip(expect)
        .map(|(&c, e)| (c as f64 - e * trials as f64).powi(2) / (e * trials as f64))
        .sum();
    // χ² with 3 degrees of freedom; 16.27 is the 0.999 quantile.
    assert!(chi2 < 16.27, "χ² = {chi2}, counts {counts:?}");
}

#[test]
fn step_speed_at_origin() {
    let t = 2000u64;
    let h0 = make_initial(&InitialCondition::Step, -2100, 2100, 0).unwrap();
    let h = evolve(&h0, t, &Dynamics::Coins { q: 0.25, seed: 5 });
    let v = h.at(0).unwrap() as f64 / t as f64;
    assert!((v - 0.5).abs() < 0.03, "{v}");
}

#[test]
fn frozen_edges_and_conservation() {
    let h0 = make_initial(&InitialCondition::Bernoulli, -60, 60, 4).unwrap();
    let field = WeightField::one_based(4, 0.3).unwrap();
    for d in [Dynamics::Coins { q: 0.3, seed: 2 }, Dynamics::WaitingTimes(&field)] {
        let h = evolve(&h0, 200, &d);
        assert_eq!(h.heights[0], h0.heights[0]);
        assert_eq!(h.heights.last(), h0.heights.last());
        assert_eq!(h.particles(), h0.particles());
        assert_eq!(h.t, 200);
        assert!(h.check().is_ok());
    }
}

#[test]
fn zero_steps_is_identity() {
    let h0 = make_initial(&InitialCondition::WedgeFlat, -10, 10, 0).unwrap();
    assert_eq!(evolve(&h0, 0, &Dynamics::Coins { q: 0.5, seed: 1 }), h0);
}

#[test]
fn bernoulli_height_is_diffusive() {
    // h(s)/√s over independent walks: mean 0, variance 1.
    let reps = 400;
    let s = 100_000i64;
    let vals: Vec<f64> = (0..reps)
        .map(|r| {
            let h = make_initial(&InitialCondition::Bernoulli, 0, s, r).unwrap();
            h.at(s).unwrap() as f64 / (s as f64).sqrt()
        })
        .collect();
    let mean = vals.iter().sum::<f64>() / reps as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    assert!(mean.abs() < 3.0 / (reps as f64).sqrt(), "{mean}");
    assert!((var - 1.0).abs() < 0.25, "{var}");
}

#[test]
fn coupling_exact_cases() {
    let r = coupling_check(&InitialCondition::Step, -20, 20, 0, 0, 1, 0.25, 20_000, 3).unwrap();
    let se = (0.75f64 * 0.25 / 20_000.0).sqrt();
    assert!((r.p_tasep - 0.75).abs() < 4.0 * se && (r.p_lpp - 0.75).abs() < 4.0 * se, "{r:?}");
    let r = coupling_check(&InitialCondition::Flat, -20, 20, 0, 2, 0, 0.25, 200, 3).unwrap();
    assert_eq!((r.p_tasep, r.p_lpp), (0.0, 0.0));
    assert!(coupling_check(&InitialCondition::Flat, -5, 5, 0, 0, 6, 0.25, 10, 0).is_err());
    assert!(coupling_check(&InitialCondition::Flat, -50, 50, 0, 1, 6, 0.25, 10, 0).is_err());
}

#[test]
fn coupling_flat_agrees() {
    let r = coupling_check(&InitialCondition::Flat, -30, 30, 0, 0, 3, 0.25, 100_000, 17).unwrap();
    assert!(r.z.abs() <= 3.0, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dynamics_preserve_invariants(seed in 0u64..1000, q in 0.05f64..0.95, steps in 0u64..60) {
        let h0 = make_initial(&InitialCondition::Bernoulli, -40, 40, seed).unwrap();
        let mut h = h0.clone();
        let mut r = rng::chacha(seed);
        for _ in 0..steps {
            let before = h.clone();
            step_dynamics(&mut h, q, &mut r);
            prop_assert!(h.check().is_ok());
            for (a, b) in before.heights.iter().zip(&h.heights) {
                prop_assert!(b - a == 0 || b - a == 2);
            }
        }
    }

    #[test]
    fn monotone_in_initial_data(seed in 0u64..1000, shift in 0i64..3) {
        // h₁ = max(h₂, flat + 2·shift) dominates h₂ pointwise.
        let h2 = make_initial(&InitialCondition::Bernoulli, -30, 30, seed).unwrap();
        let f = make_initial(&InitialCondition::Flat, -30, 30, 0).unwrap();
        let top: Vec<i64> = h2.heights.iter().zip(&f.heights).map(|(a, b)| *a.max(&(b + 2 * shift))).collect();
        let h1 = HeightFunction::new(-30, top).unwrap();
        let field = WeightField::one_based(seed, 0.5).unwrap();
        let d = Dynamics::WaitingTimes(&field);
        let (a, b) = (evolve(&h1, 25, &d), evolve(&h2, 25, &d));
        for (x, y) in a.heights.iter().zip(&b.heights) {
            prop_assert!(x >= y);
        }
    }
}
