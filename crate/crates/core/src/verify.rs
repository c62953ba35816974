//! The verification suite: every acceptance check the project ships, as
//! callable functions returning structured reports. The `verify` CLI
//! subcommand prints one line per check; the acceptance test target asserts
//! each one individually.

use crate::floquet::{monodromy_det, IntegratorSettings, NumericProblem, TongueRecord};
use crate::hillseries::{
    check_generalized_mathieu, compose_g, diagonal_g, eigen_series, leading_coefficient_fast,
    mathieu_series, CouplingSpec, HillCoefficientSeries, Parity,
};
use crate::lindstedt::{expand, OscillatorSpec};
use crate::tongues::{
    asymptotic_order, classify_shape, coexistence_check, leading_coefficient_product,
    odd_order_trumpet_sweep, second_tongue_sign, TongueShape,
};
use crate::trigpoly::{rat, rat_int, CosPoly, Rat};
use num::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// Outcome of one check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl CheckReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] {} ({} ms) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.millis,
            self.detail
        )
    }
}

fn run(name: &'static str, body: impl FnOnce() -> Result<String, String>) -> CheckReport {
    let start = Instant::now();
    let outcome = body();
    let millis = start.elapsed().as_millis();
    match outcome {
        Ok(detail) => CheckReport { name, passed: true, detail, millis },
        Err(detail) => CheckReport { name, passed: false, detail, millis },
    }
}

/// Run the full suite in order.
pub fn run_all() -> Vec<CheckReport> {
    vec![
        check_frequency_second_coefficient(),
        check_boundary_coefficient_table(),
        check_split_two_routes(),
        check_closed_products(),
        check_fourier_support(),
        check_oracle_orders(),
        check_coexistence(),
        check_parity_vanishing(),
        check_shapes(),
        check_oracle_self_consistency(),
        check_chart_ordering(),
        check_degree_detector(),
    ]
}

fn rand_rat(rng: &mut ChaCha8Rng, nonzero: bool) -> Rat {
    loop {
        let num = rng.gen_range(-9i64..=9);
        if nonzero && num == 0 {
            continue;
        }
        let den = rng.gen_range(1i64..=9);
        return rat(num, den);
    }
}

// Bundled families.

fn mathieu_specs(order: usize) -> (OscillatorSpec, CouplingSpec) {
    (
        OscillatorSpec::linear(order),
        CouplingSpec::new([(1, Rat::one())], order).expect("static spec"),
    )
}

/// `f = alpha x^2`, `g = 2 gamma_tilde alpha x`.
fn quadratic_linear_specs(
    alpha: &Rat,
    gamma_tilde: &Rat,
    order: usize,
) -> (OscillatorSpec, CouplingSpec) {
    (
        OscillatorSpec::new([(2, alpha.clone())], order).expect("static spec"),
        CouplingSpec::new([(1, rat_int(2) * gamma_tilde * alpha)], order).expect("static spec"),
    )
}

/// `f = alpha x^3`, `g = 3 gamma_tilde alpha x^2`.
fn cubic_quadratic_specs(
    alpha: &Rat,
    gamma_tilde: &Rat,
    order: usize,
) -> (OscillatorSpec, CouplingSpec) {
    (
        OscillatorSpec::new([(3, alpha.clone())], order).expect("static spec"),
        CouplingSpec::new([(2, rat_int(3) * gamma_tilde * alpha)], order).expect("static spec"),
    )
}

/// `f = alpha x^2 + alpha^2/18 x^3`, `g = n(n+1)/6 f'`.
fn derivative_coupling_specs(n: u32, alpha: &Rat, order: usize) -> (OscillatorSpec, CouplingSpec) {
    let factor = rat((n * (n + 1)) as i64, 6);
    (
        OscillatorSpec::new([(2, alpha.clone()), (3, alpha * alpha / rat_int(18))], order)
            .expect("static spec"),
        CouplingSpec::new(
            [(1, &factor * rat_int(2) * alpha), (2, &factor * (alpha * alpha) / rat_int(6))],
            order,
        )
        .expect("static spec"),
    )
}

fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let ratio = (hi / lo).powf(1.0 / (count - 1) as f64);
    (0..count).map(|i| lo * ratio.powi(i as i32)).collect()
}

fn problem_for(
    osc: &OscillatorSpec,
    coupling: &CouplingSpec,
    q: f64,
) -> Result<NumericProblem, String> {
    NumericProblem::new(osc, coupling, q, IntegratorSettings::default())
        .map_err(|e| format!("problem construction at q = {q}: {e}"))
}

/// Exact frequency coefficient identity on random data.
pub fn check_frequency_second_coefficient() -> CheckReport {
    run("frequency-series second coefficient", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x01);
        for case in 0..20 {
            let a2 = rand_rat(&mut rng, false);
            let a3 = rand_rat(&mut rng, false);
            let spec = OscillatorSpec::new([(2, a2.clone()), (3, a3.clone())], 2)
                .map_err(|e| e.to_string())?;
            let l = expand(&spec).map_err(|e| e.to_string())?;
            let expected = rat(-5, 96) * &a2 * &a2 + rat(3, 16) * &a3;
            if l.omega2(2) != &expected {
                return Err(format!(
                    "case {case}: alpha2 = {a2}, alpha3 = {a3}: got {}, want {expected}",
                    l.omega2(2)
                ));
            }
            if !l.omega2(1).is_zero() {
                return Err(format!("case {case}: Omega_1 != 0"));
            }
        }
        Ok("20/20 random (alpha2, alpha3) pairs exact".into())
    })
}

/// Exact boundary-coefficient table on random data.
pub fn check_boundary_coefficient_table() -> CheckReport {
    run("boundary-coefficient table", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x02);
        for case in 0..20 {
            let a2 = rand_rat(&mut rng, false);
            let g1 = rand_rat(&mut rng, false);
            let g2 = rand_rat(&mut rng, false);
            let osc = OscillatorSpec::new([(2, a2.clone())], 2).map_err(|e| e.to_string())?;
            let cpl = CouplingSpec::new([(1, g1.clone()), (2, g2.clone())], 2)
                .map_err(|e| e.to_string())?;
            let series = compose_g(&cpl, &expand(&osc).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;

            let omega2 = rat(-5, 96) * &a2 * &a2;
            let common = rat(1, 8) * &g1 * &a2 - rat(1, 2) * &g2;
            let expect = |n: usize, parity: Parity, order: usize, want: Rat| -> Result<(), String> {
                let b = eigen_series(&series, n, parity).map_err(|e| e.to_string())?;
                if b.b(order) != &want {
                    return Err(format!(
                        "case {case}: B_{order}^{}({n}) = {}, want {want}",
                        parity.label(),
                        b.b(order)
                    ));
                }
                Ok(())
            };

            expect(1, Parity::Even, 1, rat(-1, 2) * &g1)?;
            expect(1, Parity::Odd, 1, rat(1, 2) * &g1)?;
            for n in [0usize, 2, 3, 4, 5] {
                expect(n, Parity::Even, 1, Rat::zero())?;
                if n > 0 {
                    expect(n, Parity::Odd, 1, Rat::zero())?;
                }
            }
            let split1 = rat(1, 24) * &g1 * &a2;
            let base1 = &omega2 + &common - rat(1, 32) * &g1 * &g1;
            expect(1, Parity::Even, 2, &base1 - &split1)?;
            expect(1, Parity::Odd, 2, &base1 + &split1)?;
            let split2 =
                rat(1, 48) * (&g1 * &a2 - rat_int(3) * &g1 * &g1 + rat_int(12) * &g2);
            let base2 = rat_int(4) * &omega2 + &common + rat(1, 24) * &g1 * &g1;
            expect(2, Parity::Even, 2, &base2 - &split2)?;
            expect(2, Parity::Odd, 2, &base2 + &split2)?;
            for n in [3usize, 4, 5] {
                let want = rat_int((n * n) as i64) * &omega2
                    + &common
                    + &g1 * &g1 / rat_int(8 * ((n * n) as i64 - 1));
                expect(n, Parity::Even, 2, want.clone())?;
                expect(n, Parity::Odd, 2, want)?;
            }
            expect(0, Parity::Even, 2, &g1 * (&a2 - &g1) / rat_int(8) - &g2 / rat_int(2))?;
        }
        Ok("20/20 random (alpha2, gamma1, gamma2) tables exact".into())
    })
}

/// Diagonal fast route versus the full recursion, exactly, through N = 8.
pub fn check_split_two_routes() -> CheckReport {
    run("leading-split two-route equality", || {
        let order = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(0x03);
        let mut configs: Vec<(String, OscillatorSpec, CouplingSpec)> = Vec::new();
        let (mo, mc) = mathieu_specs(order);
        configs.push(("mathieu".into(), mo, mc));
        for (p, q) in [(1i64, 1i64), (1, 6), (1, 2)] {
            let (o, c) = quadratic_linear_specs(&Rat::one(), &rat(p, q), order);
            configs.push((format!("quadratic-linear gt={p}/{q}"), o, c));
        }
        let ro = OscillatorSpec::new(
            [(2, rand_rat(&mut rng, false)), (3, rand_rat(&mut rng, false))],
            order,
        )
        .map_err(|e| e.to_string())?;
        let rc = CouplingSpec::new(
            [(1, rand_rat(&mut rng, true)), (2, rand_rat(&mut rng, false))],
            order,
        )
        .map_err(|e| e.to_string())?;
        configs.push(("random".into(), ro, rc));

        let mut checked = 0;
        for (name, osc, cpl) in &configs {
            let diag = diagonal_g(osc, cpl).map_err(|e| e.to_string())?;
            let series =
                compose_g(cpl, &expand(osc).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            for n in 1..=order {
                let plus = eigen_series(&series, n, Parity::Even).map_err(|e| e.to_string())?;
                let minus = eigen_series(&series, n, Parity::Odd).map_err(|e| e.to_string())?;
                let split = plus.lambda(n) - minus.lambda(n);
                let fast = leading_coefficient_fast(&diag, n);
                if fast != split {
                    return Err(format!("{name}, N = {n}: fast {fast} vs recursion {split}"));
                }
                checked += 1;
            }
        }
        Ok(format!("{checked} (config, N) pairs exact through N = 8"))
    })
}

/// Closed product formulas, exactly, through N = 8.
pub fn check_closed_products() -> CheckReport {
    run("closed product formulas", || {
        let order = 8;
        for (p, q) in [(1i64, 1i64), (1, 6), (1, 2), (5, 2)] {
            let gt = rat(p, q);
            let (osc, cpl) = quadratic_linear_specs(&Rat::one(), &gt, order);
            let diag = diagonal_g(&osc, &cpl).map_err(|e| e.to_string())?;
            for n in 1..=order {
                let fast = leading_coefficient_fast(&diag, n);
                let product = leading_coefficient_product(&Rat::one(), &gt, n);
                if fast != product {
                    return Err(format!("gt = {gt}, N = {n}: {fast} vs product {product}"));
                }
            }
        }
        let (osc, cpl) = mathieu_specs(order);
        let diag = diagonal_g(&osc, &cpl).map_err(|e| e.to_string())?;
        for n in 1..=order {
            let mut fact = Rat::one();
            for j in 1..n {
                fact *= rat_int(j as i64);
            }
            let mut eight = Rat::one();
            for _ in 0..(n - 1) {
                eight *= rat_int(8);
            }
            let sign = if n % 2 == 0 { Rat::one() } else { -Rat::one() };
            let expected = sign / (&fact * &fact * eight);
            if leading_coefficient_fast(&diag, n) != expected {
                return Err(format!("mathieu N = {n}"));
            }
        }
        Ok("quadratic-linear products (4 couplings) and cosine-potential closed form exact, N <= 8".into())
    })
}

/// Fourier support cones, parity class, and the coincidence region, exactly.
pub fn check_fourier_support() -> CheckReport {
    run("fourier support and coincidence", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x05);
        let order = 6;
        for case in 0..10 {
            let osc = OscillatorSpec::new(
                [
                    (2, rand_rat(&mut rng, false)),
                    (3, rand_rat(&mut rng, false)),
                    (4, rand_rat(&mut rng, false)),
                ],
                order,
            )
            .map_err(|e| e.to_string())?;
            let cpl = CouplingSpec::new(
                [
                    (1, rand_rat(&mut rng, true)),
                    (2, rand_rat(&mut rng, false)),
                    (3, rand_rat(&mut rng, false)),
                ],
                order,
            )
            .map_err(|e| e.to_string())?;
            let series =
                compose_g(&cpl, &expand(&osc).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            for n in 1..=order {
                if series.g(n).degree() > n {
                    return Err(format!("case {case}: composed G_{n} exceeds its degree bound"));
                }
            }
            for n_index in 1..=5usize {
                let plus = eigen_series(&series, n_index, Parity::Even).map_err(|e| e.to_string())?;
                let minus = eigen_series(&series, n_index, Parity::Odd).map_err(|e| e.to_string())?;
                let big_n = n_index as i64;
                let k_max = plus.z().k_max();
                for n in 0..=order {
                    for k in -k_max..=k_max {
                        let zp = plus.z().get(k, n);
                        let zm = minus.z().get(k, n);
                        let in_cone = (k - big_n).abs() <= 2 * n as i64
                            || (k + big_n).abs() <= 2 * n as i64;
                        if !in_cone && (!zp.is_zero() || !zm.is_zero()) {
                            return Err(format!(
                                "case {case}: N = {n_index}: entry outside cone at (k, n) = ({k}, {n})"
                            ));
                        }
                        if (k - big_n).rem_euclid(2) == 1 && !zp.is_zero() {
                            return Err(format!("case {case}: parity violation at ({k}, {n})"));
                        }
                        if k > 2 * n as i64 - big_n && zp != zm {
                            return Err(format!(
                                "case {case}: coincidence region violated at ({k}, {n})"
                            ));
                        }
                    }
                    if n >= 1 && n < n_index && plus.lambda(n) != minus.lambda(n) {
                        return Err(format!(
                            "case {case}: branches split at order {n} < N = {n_index}"
                        ));
                    }
                }
            }
        }
        Ok("10/10 random couplings: cones, parity and coincidence exact".into())
    })
}

fn exact_abs_c(osc: &OscillatorSpec, cpl: &CouplingSpec, n: usize) -> Result<f64, String> {
    let diag = diagonal_g(osc, cpl).map_err(|e| e.to_string())?;
    Ok(leading_coefficient_fast(&diag, n).to_f64().unwrap_or(f64::NAN).abs())
}

/// Tongue-order fits on the oracle q-grid.
pub fn check_oracle_orders() -> CheckReport {
    run("oracle tongue order fits", || {
        let grid = geometric_grid(0.02, 0.15, 6);
        let order = 8;
        let configs = [
            ("mathieu", mathieu_specs(order)),
            ("quadratic-linear gt=1", quadratic_linear_specs(&Rat::one(), &Rat::one(), order)),
        ];
        let mut lines = Vec::new();
        for (name, (osc, cpl)) in &configs {
            let mut per_n: Vec<Vec<TongueRecord>> = vec![Vec::new(); 5];
            for q in &grid {
                let problem = problem_for(osc, cpl, *q)?;
                for n in 1..=4u32 {
                    let rec = problem
                        .tongue_boundaries(n)
                        .map_err(|e| format!("{name}: tongue N = {n}, q = {q}: {e}"))?;
                    per_n[n as usize].push(rec);
                }
            }
            for n in 1..=4usize {
                let exact = exact_abs_c(osc, cpl, n)?;
                let est = asymptotic_order(&per_n[n], 1e-10).map_err(|e| e.to_string())?;
                if exact == 0.0 {
                    if !est.collapsed {
                        return Err(format!(
                            "{name}: N = {n} has exact C = 0 but the oracle saw lengths above the floor"
                        ));
                    }
                    lines.push(format!("{name} N={n}: collapsed (exact C = 0)"));
                    continue;
                }
                if est.collapsed {
                    return Err(format!("{name}: N = {n} unexpectedly collapsed"));
                }
                if (est.slope - n as f64).abs() > 0.15 {
                    return Err(format!(
                        "{name}: N = {n}: slope {:.4} outside {n} +/- 0.15",
                        est.slope
                    ));
                }
                let rel = (est.c_abs - exact).abs() / exact;
                if rel > 0.10 {
                    return Err(format!(
                        "{name}: N = {n}: |C| estimate {:.6e} vs exact {:.6e} ({:.1}% off)",
                        est.c_abs,
                        exact,
                        rel * 100.0
                    ));
                }
                lines.push(format!(
                    "{name} N={n}: slope {:.3}, |C| {:.3e} vs {:.3e}",
                    est.slope, est.c_abs, exact
                ));
            }
        }
        Ok(lines.join("; "))
    })
}

/// Coexistence families: exact structure detection plus oracle confirmation.
pub fn check_coexistence() -> CheckReport {
    run("coexistence families", || {
        let order = 8;
        let alpha = Rat::one();
        // (label, specs, structure index, surviving tongue indices)
        let cases: Vec<(String, OscillatorSpec, CouplingSpec, u32, Vec<u32>)> = vec![
            {
                let (o, c) = quadratic_linear_specs(&alpha, &rat(1, 6), order);
                ("quadratic-linear n=1".into(), o, c, 1, vec![1])
            },
            {
                let (o, c) = quadratic_linear_specs(&alpha, &rat(1, 2), order);
                ("quadratic-linear n=2".into(), o, c, 2, vec![1, 2])
            },
            {
                let (o, c) = cubic_quadratic_specs(&alpha, &rat(1, 3), order);
                // Odd restoring force and even coupling halve the coefficient
                // period, so the surviving tongue sits at index 2n.
                ("cubic-quadratic n=1".into(), o, c, 1, vec![2])
            },
            {
                let (o, c) = derivative_coupling_specs(1, &alpha, order);
                ("derivative-coupling n=1".into(), o, c, 1, vec![1])
            },
            {
                let (o, c) = derivative_coupling_specs(2, &alpha, order);
                ("derivative-coupling n=2".into(), o, c, 2, vec![1, 2])
            },
        ];

        let mut lines = Vec::new();
        for (name, osc, cpl, n_struct, survivors) in &cases {
            let l = expand(osc).map_err(|e| e.to_string())?;
            let report = coexistence_check(osc, cpl, &l).map_err(|e| e.to_string())?;
            if !report.detected || !report.residual.is_zero() {
                return Err(format!("{name}: structure not detected (residual {})", report.residual));
            }
            if report.n_ince != Some(*n_struct) {
                return Err(format!("{name}: index {:?}, want {n_struct}", report.n_ince));
            }
            let problem = problem_for(osc, cpl, 0.1)?;
            for n in 1..=6u32 {
                let rec = problem
                    .tongue_boundaries(n)
                    .map_err(|e| format!("{name}: tongue N = {n}: {e}"))?;
                if survivors.contains(&n) {
                    if rec.length <= 1e-4 {
                        return Err(format!(
                            "{name}: surviving tongue N = {n} too thin: {:.3e}",
                            rec.length
                        ));
                    }
                } else if rec.length >= 1e-8 || !rec.numerically_zero {
                    return Err(format!(
                        "{name}: vanished tongue N = {n} too wide: {:.3e}",
                        rec.length
                    ));
                }
            }
            lines.push(format!("{name}: ok"));
        }
        Ok(lines.join("; "))
    })
}

/// Parity-forced vanishing and the first-coefficient table for late couplings.
pub fn check_parity_vanishing() -> CheckReport {
    run("parity vanishing", || {
        let order = 8;
        let osc = OscillatorSpec::new([(3, Rat::one())], order).map_err(|e| e.to_string())?;
        let cpl = CouplingSpec::new([(2, Rat::one())], order).map_err(|e| e.to_string())?;
        let series =
            compose_g(&cpl, &expand(&osc).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for n_index in [1usize, 3, 5, 7] {
            let plus = eigen_series(&series, n_index, Parity::Even).map_err(|e| e.to_string())?;
            let minus = eigen_series(&series, n_index, Parity::Odd).map_err(|e| e.to_string())?;
            for n in 1..=order {
                if plus.b(n) != minus.b(n) {
                    return Err(format!("odd tongue N = {n_index} splits at order {n}"));
                }
            }
        }
        let problem = problem_for(&osc, &cpl, 0.1)?;
        for n in [1u32, 3] {
            let rec = problem.tongue_boundaries(n).map_err(|e| e.to_string())?;
            if rec.length >= 1e-8 {
                return Err(format!("oracle length of odd tongue N = {n} is {:.3e}", rec.length));
            }
        }

        // First-coefficient table for couplings starting at x^K, K <= 6.
        let gamma = rat(2, 3);
        for k_first in 1..=6usize {
            let o = OscillatorSpec::new([(2, rat(1, 3))], k_first).map_err(|e| e.to_string())?;
            let c = CouplingSpec::new([(k_first, gamma.clone())], k_first)
                .map_err(|e| e.to_string())?;
            let s = compose_g(&c, &expand(&o).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            for n_index in 1..=k_first {
                let plus = eigen_series(&s, n_index, Parity::Even).map_err(|e| e.to_string())?;
                let minus = eigen_series(&s, n_index, Parity::Odd).map_err(|e| e.to_string())?;
                let split = plus.lambda(k_first) - minus.lambda(k_first);
                let expected = if (k_first - n_index) % 2 == 0 {
                    let m = (k_first - n_index) / 2;
                    let mut binom = Rat::one();
                    for i in 0..m {
                        binom *= rat_int((k_first - i) as i64) / rat_int((i + 1) as i64);
                    }
                    let mut pow = Rat::one();
                    for _ in 0..(k_first - 1) {
                        pow *= rat_int(2);
                    }
                    -&gamma * binom / pow
                } else {
                    Rat::zero()
                };
                if split != expected {
                    return Err(format!(
                        "C table at K = {k_first}, N = {n_index}: {split} vs {expected}"
                    ));
                }
            }
        }
        Ok("odd tongues vanish through order 8 (series and oracle); first-coefficient table exact for K <= 6".into())
    })
}

/// Shape suite: cosine-potential verdicts, the second-tongue parameter
/// regions, and the odd-coupling trumpet sweep.
pub fn check_shapes() -> CheckReport {
    run("shape suite", || {
        let series = mathieu_series(6);
        let expected = [TongueShape::Trumpet, TongueShape::Trumpet, TongueShape::Horn, TongueShape::Horn];
        for (n_index, want) in (1..=4usize).zip(expected) {
            let plus = eigen_series(&series, n_index, Parity::Even).map_err(|e| e.to_string())?;
            let minus = eigen_series(&series, n_index, Parity::Odd).map_err(|e| e.to_string())?;
            let v = classify_shape(&plus, &minus).map_err(|e| e.to_string())?;
            if v.classification != want {
                return Err(format!(
                    "cosine potential N = {n_index}: {:?}, want {want:?}",
                    v.classification
                ));
            }
        }

        // Second tongue of the quadratic-linear family: trumpet exactly on
        // (-inf, -1) U (1/2, 1) U (5/2, inf).
        let inside = [rat(-2, 1), rat(-5, 4), rat(3, 5), rat(4, 5), rat(11, 4), rat(7, 1)];
        let outside = [rat(-1, 2), rat(1, 4), rat(2, 5), rat(3, 2), rat(2, 1), rat(12, 5)];
        for (gt, want_trumpet) in inside
            .iter()
            .map(|g| (g, true))
            .chain(outside.iter().map(|g| (g, false)))
        {
            let (osc, cpl) = quadratic_linear_specs(&Rat::one(), gt, 4);
            let series = compose_g(&cpl, &expand(&osc).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let plus = eigen_series(&series, 2, Parity::Even).map_err(|e| e.to_string())?;
            let minus = eigen_series(&series, 2, Parity::Odd).map_err(|e| e.to_string())?;
            let v = classify_shape(&plus, &minus).map_err(|e| e.to_string())?;
            let got = v.classification == TongueShape::Trumpet;
            if got != want_trumpet {
                return Err(format!(
                    "second tongue at gamma_tilde = {gt}: {:?}, trumpet expected: {want_trumpet}",
                    v.classification
                ));
            }
            // Cross-check the sign predictor against the verdict data.
            let g1 = rat_int(2) * gt;
            let lead = second_tongue_sign(&Rat::one(), &g1, &Rat::zero());
            let split = plus.b(2) - minus.b(2);
            if lead != split {
                return Err(format!("second-tongue predictor mismatch at gamma_tilde = {gt}"));
            }
        }

        // Odd-coupling sweep at K = 3.
        let verdicts = odd_order_trumpet_sweep(3, &Rat::one(), &Rat::one()).map_err(|e| e.to_string())?;
        for n_index in [1usize, 3] {
            let v = &verdicts[n_index - 1];
            if v.classification != TongueShape::Trumpet || v.leading_orders != Some((3, 3)) {
                return Err(format!("trumpet sweep failed at N = {n_index}: {v:?}"));
            }
        }
        let (osc, cpl) = (
            OscillatorSpec::new([(4, Rat::one())], 3).map_err(|e| e.to_string())?,
            CouplingSpec::new([(3, Rat::one())], 3).map_err(|e| e.to_string())?,
        );
        let s = compose_g(&cpl, &expand(&osc).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for n_index in [1usize, 3] {
            let plus = eigen_series(&s, n_index, Parity::Even).map_err(|e| e.to_string())?;
            let minus = eigen_series(&s, n_index, Parity::Odd).map_err(|e| e.to_string())?;
            if plus.b(3).is_zero() || plus.b(3) != &(-minus.b(3).clone()) {
                return Err(format!("odd coupling: B_3^+ != -B_3^- at N = {n_index}"));
            }
        }
        Ok("cosine verdicts, 12 second-tongue samples, and the K = 3 sweep all match".into())
    })
}

/// Step-halving stability of endpoints and unit Wronskian determinant.
pub fn check_oracle_self_consistency() -> CheckReport {
    run("oracle self-consistency", || {
        let order = 6;
        let configs = [
            ("mathieu", mathieu_specs(order), vec![1u32, 2, 3]),
            (
                "quadratic-linear gt=1",
                quadratic_linear_specs(&Rat::one(), &Rat::one(), order),
                vec![1u32, 2],
            ),
        ];
        let mut worst_shift = 0.0f64;
        let mut worst_det = 0.0f64;
        for (name, (osc, cpl), tongues) in &configs {
            let problem = problem_for(osc, cpl, 0.1)?;
            let halved = problem.with_step_count(problem.steps() / 2);
            for n in tongues {
                let fine = problem.tongue_boundaries(*n).map_err(|e| e.to_string())?;
                let coarse = halved.tongue_boundaries(*n).map_err(|e| e.to_string())?;
                let shift = (fine.beta_minus - coarse.beta_minus)
                    .abs()
                    .max((fine.beta_plus - coarse.beta_plus).abs());
                if shift >= 1e-9 {
                    return Err(format!(
                        "{name}: N = {n}: endpoints moved {shift:.3e} under step halving"
                    ));
                }
                worst_shift = worst_shift.max(shift);
                for beta in [fine.beta_minus, fine.beta_plus] {
                    let det_err = (monodromy_det(problem.monodromy(beta)) - 1.0).abs();
                    if det_err >= 1e-9 {
                        return Err(format!("{name}: det error {det_err:.3e} at beta = {beta}"));
                    }
                    worst_det = worst_det.max(det_err);
                }
                if fine.disc_residual_minus > 1e-7 || fine.disc_residual_plus > 1e-7 {
                    return Err(format!(
                        "{name}: N = {n}: discriminant residual {:.3e} / {:.3e}",
                        fine.disc_residual_minus, fine.disc_residual_plus
                    ));
                }
            }
        }
        Ok(format!(
            "max endpoint shift {worst_shift:.2e}, max |det - 1| {worst_det:.2e}"
        ))
    })
}

/// Qualitative boundary ordering of the cosine-potential chart.
pub fn check_chart_ordering() -> CheckReport {
    run("stability chart ordering", || {
        let (osc, cpl) = mathieu_specs(4);
        for q in [0.1, 0.25, 0.4, 0.5] {
            let problem = problem_for(&osc, &cpl, q)?;
            let b0 = problem.boundary0().map_err(|e| e.to_string())?;
            let mut prev = b0;
            for n in 1..=3u32 {
                let rec = problem.tongue_boundaries(n).map_err(|e| e.to_string())?;
                if !(prev < rec.beta_minus && rec.beta_minus <= rec.beta_plus) {
                    return Err(format!(
                        "ordering broken at q = {q}, N = {n}: prev {prev}, [{}, {}]",
                        rec.beta_minus, rec.beta_plus
                    ));
                }
                prev = rec.beta_plus;
            }
        }
        Ok("beta_0^+ < beta_1^- <= beta_1^+ < ... holds on q in [0.1, 0.5]".into())
    })
}

/// Degree-checker demonstration on handcrafted coefficient series.
pub fn check_degree_detector() -> CheckReport {
    run("degree checker demonstration", || {
        let bad1 = HillCoefficientSeries::with_unit_frequency(vec![CosPoly::harmonic(2)]);
        let c1 = check_generalized_mathieu(&bad1);
        match &c1.violation {
            Some(v) if v.level == 1 && v.harmonic == 2 && v.predicted_order() == 1 => {}
            other => return Err(format!("first violation misreported: {other:?}")),
        }
        let bad2 = HillCoefficientSeries::with_unit_frequency(vec![
            CosPoly::harmonic(1),
            CosPoly::harmonic(3),
        ]);
        let c2 = check_generalized_mathieu(&bad2);
        match &c2.violation {
            Some(v) if v.level == 2 && v.harmonic == 3 => {}
            other => return Err(format!("second violation misreported: {other:?}")),
        }
        let (osc, cpl) = quadratic_linear_specs(&Rat::one(), &rat(1, 3), 6);
        let series =
            compose_g(&cpl, &expand(&osc).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if !check_generalized_mathieu(&series).ok {
            return Err("composed series flagged as violating its degree bound".into());
        }
        Ok("handcrafted violations located; composed series clean".into())
    })
}
