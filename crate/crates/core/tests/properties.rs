//! Property tests for the exact algebra and the series drivers.

use hilltongue::hillseries::{compose_g, eigen_series, CouplingSpec, Parity};
use hilltongue::lindstedt::{expand, OscillatorSpec};
use hilltongue::tongues::{classify_from_series, TongueShape};
use hilltongue::trigpoly::{rat, rat_int, solve_harmonic, CosPoly, Rat};
use num::{ToPrimitive, Zero};
use proptest::prelude::*;

fn rat_strategy() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=12).prop_map(|(p, q)| rat(p, q))
}

fn cospoly_strategy(max_len: usize) -> impl Strategy<Value = CosPoly> {
    prop::collection::vec(rat_strategy(), 0..=max_len).prop_map(CosPoly::from_coeffs)
}

proptest! {
    #[test]
    fn mul_is_commutative_and_associative(
        a in cospoly_strategy(5),
        b in cospoly_strategy(5),
        c in cospoly_strategy(4),
    ) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn degree_is_additive_for_nonzero_factors(
        a in cospoly_strategy(5),
        b in cospoly_strategy(5),
    ) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        prop_assert_eq!((&a * &b).degree(), a.degree() + b.degree());
    }

    #[test]
    fn product_projection_matches_convolution_and_samples(
        a in cospoly_strategy(4),
        b in cospoly_strategy(4),
    ) {
        let prod = &a * &b;
        // Independent route one: the explicit product-to-sum convolution
        // sum of c_i d_j / 2 over all (i, j) with i + j = n or |i - j| = n.
        for n in 0..=(a.degree() + b.degree()) {
            let mut conv = Rat::zero();
            for i in 0..=a.degree() {
                for j in 0..=b.degree() {
                    // Both branches of cos(2it)cos(2jt) contribute, and a
                    // pair meeting both conditions counts twice.
                    if i + j == n {
                        conv += a.coeff(i) * b.coeff(j) * rat(1, 2);
                    }
                    if i.abs_diff(j) == n {
                        conv += a.coeff(i) * b.coeff(j) * rat(1, 2);
                    }
                }
            }
            prop_assert_eq!(prod.project(n), conv, "harmonic {}", n);
        }
        // Independent route two: pointwise evaluation in doubles.
        let samples = 2 * (a.degree() + b.degree()) + 1;
        let scale = 1.0 + prod.coeffs().iter().map(|c| c.to_f64().unwrap().abs()).sum::<f64>();
        for i in 0..samples {
            let t = std::f64::consts::PI * i as f64 / samples as f64;
            let direct = a.eval_f64(t) * b.eval_f64(t);
            prop_assert!((prod.eval_f64(t) - direct).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn harmonic_solver_residual_and_zero_mean(rhs_raw in cospoly_strategy(6)) {
        // Remove the resonant component to make the input admissible.
        let mut coeffs: Vec<Rat> = (0..=rhs_raw.degree()).map(|k| rhs_raw.coeff(k)).collect();
        if coeffs.len() > 1 {
            coeffs[1] = Rat::zero();
        }
        let rhs = CosPoly::from_coeffs(coeffs);
        let w = solve_harmonic(&rhs).unwrap();
        let residual = &(&w.second_derivative() + &w.scale(&rat_int(4))) - &rhs;
        prop_assert!(residual.is_zero());
        prop_assert!(w.coeff_sum().is_zero());
    }

    #[test]
    fn shape_verdict_ignores_positive_scaling(
        b_plus in prop::collection::vec(rat_strategy(), 2..5),
        b_minus in prop::collection::vec(rat_strategy(), 2..5),
        scale in (1i64..=30, 1i64..=7).prop_map(|(p, q)| rat(p, q)),
    ) {
        let v1 = classify_from_series(1, &b_plus, &b_minus);
        let sp: Vec<Rat> = b_plus.iter().map(|c| c * &scale).collect();
        let sm: Vec<Rat> = b_minus.iter().map(|c| c * &scale).collect();
        let v2 = classify_from_series(1, &sp, &sm);
        prop_assert_eq!(v1.classification, v2.classification);
    }

    #[test]
    fn expansion_degree_bound_and_zero_mean(
        a2 in rat_strategy(),
        a3 in rat_strategy(),
        order in 2usize..=5,
    ) {
        let spec = OscillatorSpec::new([(2, a2), (3, a3)], order).unwrap();
        let l = expand(&spec).unwrap();
        for n in 1..=order {
            prop_assert!(l.u(n).degree() <= 2 * n);
            if n >= 2 {
                prop_assert!(l.u(n).coeff_sum().is_zero());
            }
        }
        // Reciprocal series really inverts the frequency series.
        for n in 1..=order {
            let mut acc = Rat::zero();
            for j in 0..=n {
                acc += l.omega2(j) * l.kappa(n - j);
            }
            prop_assert!(acc.is_zero());
        }
    }

    #[test]
    fn first_tongue_trumpet_for_nonzero_linear_coupling(
        a2 in rat_strategy(),
        g1 in rat_strategy(),
        g2 in rat_strategy(),
    ) {
        prop_assume!(!g1.is_zero());
        let osc = OscillatorSpec::new([(2, a2)], 2).unwrap();
        let coupling = CouplingSpec::new([(1, g1), (2, g2)], 2).unwrap();
        let series = compose_g(&coupling, &expand(&osc).unwrap()).unwrap();
        let plus = eigen_series(&series, 1, Parity::Even).unwrap();
        let minus = eigen_series(&series, 1, Parity::Odd).unwrap();
        let verdict = classify_from_series(1, plus.b_series(), minus.b_series());
        prop_assert_eq!(verdict.classification, TongueShape::Trumpet);
    }
}
