//! Tongue-level analyses on top of the series and oracle pipelines:
//! trumpet/horn classification, closed-form leading coefficients, the
//! log-log order fit against oracle data, and coexistence detection.

use crate::error::{OracleError, SeriesError};
use crate::floquet::TongueRecord;
use crate::hillseries::{compose_small_g, eigen_series, CouplingSpec, EigenBranch, Parity};
use crate::lindstedt::{expand, LindstedtExpansion, OscillatorSpec};
use crate::trigpoly::{rat, rat_int, CosPoly, Rat};
use num::{One, Signed, ToPrimitive, Zero};

/// Shape of a tongue near `q = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TongueShape {
    /// One boundary rises, the other falls: the tongue contains a segment of
    /// the horizontal line `beta = N^2`.
    Trumpet,
    /// Both boundaries drift the same way.
    Horn,
    /// The two truncated boundary series coincide.
    Collapsed,
    /// Truncation exhausted before a leading sign pair appeared.
    Undetermined,
}

impl TongueShape {
    pub fn label(self) -> &'static str {
        match self {
            TongueShape::Trumpet => "trumpet",
            TongueShape::Horn => "horn",
            TongueShape::Collapsed => "collapsed",
            TongueShape::Undetermined => "undetermined",
        }
    }
}

/// Classification outcome for one tongue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeVerdict {
    pub n_index: usize,
    pub classification: TongueShape,
    /// First nonzero indices of the two boundary series `beta - N^2`.
    pub leading_orders: Option<(usize, usize)>,
    /// Signs (+1 / -1) of those leading coefficients.
    pub leading_signs: Option<(i8, i8)>,
}

/// Classify from the raw boundary coefficient sequences (`b[0] = N^2`,
/// entries `1..` are the series of `beta - N^2`).
pub fn classify_from_series(n_index: usize, b_plus: &[Rat], b_minus: &[Rat]) -> ShapeVerdict {
    fn lead(b: &[Rat]) -> Option<(usize, &Rat)> {
        b.iter().enumerate().skip(1).find(|(_, c)| !c.is_zero())
    }
    if b_plus == b_minus {
        return ShapeVerdict {
            n_index,
            classification: TongueShape::Collapsed,
            leading_orders: lead(b_plus).map(|(n, _)| (n, n)),
            leading_signs: None,
        };
    }
    match (lead(b_plus), lead(b_minus)) {
        (Some((np, cp)), Some((nm, cm))) => {
            let sp = if cp.is_positive() { 1i8 } else { -1i8 };
            let sm = if cm.is_positive() { 1i8 } else { -1i8 };
            let classification = if sp != sm { TongueShape::Trumpet } else { TongueShape::Horn };
            ShapeVerdict {
                n_index,
                classification,
                leading_orders: Some((np, nm)),
                leading_signs: Some((sp, sm)),
            }
        }
        _ => ShapeVerdict {
            n_index,
            classification: TongueShape::Undetermined,
            leading_orders: None,
            leading_signs: None,
        },
    }
}

/// Classify a tongue from its two computed eigenvalue branches.
pub fn classify_shape(
    plus: &EigenBranch,
    minus: &EigenBranch,
) -> Result<ShapeVerdict, SeriesError> {
    if plus.n_index() != minus.n_index() {
        return Err(SeriesError::InvalidSpec(format!(
            "branches belong to different tongues: {} vs {}",
            plus.n_index(),
            minus.n_index()
        )));
    }
    if plus.order() != minus.order() {
        return Err(SeriesError::OrderMismatch { left: plus.order(), right: minus.order() });
    }
    if plus.parity() != Parity::Even || minus.parity() != Parity::Odd {
        return Err(SeriesError::InvalidSpec(
            "classify_shape expects the (even, odd) branch pair in that order".into(),
        ));
    }
    Ok(classify_from_series(plus.n_index(), plus.b_series(), minus.b_series()))
}

/// Leading coefficient of the second tongue,
/// `L_2(q) = (gamma_1^2 / 8 - gamma_1 alpha_2 / 24 - gamma_2 / 2) q^2 + o(q^2)`.
pub fn second_tongue_sign(alpha2: &Rat, gamma1: &Rat, gamma2: &Rat) -> Rat {
    rat(1, 8) * gamma1 * gamma1 - rat(1, 24) * gamma1 * alpha2 - rat(1, 2) * gamma2
}

/// Closed product form of the leading tongue coefficient for the
/// quadratic-restoring / linear-coupling family `f = alpha x^2`,
/// `g = 2 gamma_tilde alpha x`:
///
/// ```text
/// C_N = (-1)^N alpha^N / (8^{N-1} ((N-1)!)^2) * prod_{k<N} (2 gamma_tilde - k(k+1)/6).
/// ```
pub fn leading_coefficient_product(alpha: &Rat, gamma_tilde: &Rat, n_index: usize) -> Rat {
    assert!(n_index >= 1, "defined for N >= 1");
    let mut acc = Rat::one();
    for k in 0..n_index {
        acc *= rat_int(2) * gamma_tilde - rat_int((k * (k + 1)) as i64) / rat_int(6);
    }
    let mut scale = Rat::one();
    for _ in 0..(n_index - 1) {
        scale /= rat_int(8);
    }
    let mut fact = Rat::one();
    for j in 1..n_index {
        fact *= rat_int(j as i64);
    }
    let sign = if n_index % 2 == 0 { Rat::one() } else { -Rat::one() };
    let mut alpha_pow = Rat::one();
    for _ in 0..n_index {
        alpha_pow *= alpha;
    }
    sign * alpha_pow * scale / (&fact * &fact) * acc
}

/// Build the minimal spec whose first nonzero data are `alpha_{K+1}` and
/// `gamma_K` (`K` odd) and classify tongues `N = 1..=K` at truncation `K`.
///
/// For odd `N` the verdict is Trumpet with both leading orders exactly `K`
/// and `B_K^+ = -B_K^- != 0`; even tongues show no splitting through this
/// truncation and come back Collapsed.
pub fn odd_order_trumpet_sweep(
    k: usize,
    alpha_k1: &Rat,
    gamma_k: &Rat,
) -> Result<Vec<ShapeVerdict>, SeriesError> {
    if k % 2 == 0 || k == 0 {
        return Err(SeriesError::InvalidSpec("the coupling order K must be odd".into()));
    }
    if gamma_k.is_zero() {
        return Err(SeriesError::InvalidSpec("gamma_K must be nonzero".into()));
    }
    let osc = OscillatorSpec::new([(k + 1, alpha_k1.clone())], k)?;
    let coupling = CouplingSpec::new([(k, gamma_k.clone())], k)?;
    let series = crate::hillseries::compose_g(&coupling, &expand(&osc)?)?;
    let mut verdicts = Vec::with_capacity(k);
    for n_index in 1..=k {
        let plus = eigen_series(&series, n_index, Parity::Even)?;
        let minus = eigen_series(&series, n_index, Parity::Odd)?;
        verdicts.push(classify_shape(&plus, &minus)?);
    }
    Ok(verdicts)
}

/// Weighted log-log fit of tongue lengths over a q-grid.
#[derive(Debug, Clone, Copy)]
pub struct OrderEstimate {
    /// Fitted power of q.
    pub slope: f64,
    /// Fitted log-intercept at q = 1.
    pub intercept: f64,
    /// `exp(intercept)`, the |C_N| estimate.
    pub c_abs: f64,
    /// All lengths sat below the numerically-zero floor.
    pub collapsed: bool,
    pub points_used: usize,
}

/// Fit `log |L_N|` against `log q` over the records of one tongue.
///
/// Points below `floor` are discarded; if everything is below the floor the
/// tongue is reported collapsed. Each point is weighted by the inverse
/// squared relative error implied by its root tolerance, so barely-resolved
/// lengths near the floor do not drag the fit. The reported `c_abs` refines
/// the bare intercept by extrapolating `L / q^N` (at the rounded slope) to
/// `q = 0`, which removes the leading truncation bias.
pub fn asymptotic_order(records: &[TongueRecord], floor: f64) -> Result<OrderEstimate, OracleError> {
    let usable: Vec<&TongueRecord> = records
        .iter()
        .filter(|r| r.length.is_finite() && r.length > floor)
        .collect();
    if usable.is_empty() {
        return Ok(OrderEstimate {
            slope: f64::NAN,
            intercept: f64::NAN,
            c_abs: 0.0,
            collapsed: true,
            points_used: 0,
        });
    }
    if usable.len() < 4 {
        return Err(OracleError::InsufficientData { needed: 4, got: usable.len() });
    }

    let mut sw = 0.0;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut data = Vec::with_capacity(usable.len());
    for r in &usable {
        let x = r.q.ln();
        let y = r.length.ln();
        // Endpoint error budget: both roots refined to beta_tol plus a
        // residual bracket; relative error on the length follows.
        let err = 2.0 * (r.beta_tol + r.bracket_width);
        let sigma = (err / r.length).max(1e-8);
        let w = 1.0 / (sigma * sigma);
        sw += w;
        sx += w * x;
        sy += w * y;
        data.push((x, y, w));
    }
    let xbar = sx / sw;
    let ybar = sy / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y, w) in &data {
        sxx += w * (x - xbar) * (x - xbar);
        sxy += w * (x - xbar) * (y - ybar);
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;

    // The raw exp(intercept) inherits an O(q) bias from the next series
    // term, amplified by the extrapolation to q = 1. When the fitted slope
    // sits at an integer order N (it always does for a genuine tongue),
    // extrapolating the ratio L / q^N linearly to q = 0 cancels that bias.
    let rounded = slope.round();
    let c_abs = if (slope - rounded).abs() <= 0.5 && rounded >= 1.0 {
        let mut sw = 0.0;
        let mut sq = 0.0;
        let mut sv = 0.0;
        let mut ratios = Vec::with_capacity(usable.len());
        for r in &usable {
            let ratio = r.length / r.q.powf(rounded);
            let err = 2.0 * (r.beta_tol + r.bracket_width) / r.q.powf(rounded);
            let w = 1.0 / (err * err).max(1e-300);
            sw += w;
            sq += w * r.q;
            sv += w * ratio;
            ratios.push((r.q, ratio, w));
        }
        let qbar = sq / sw;
        let vbar = sv / sw;
        let mut sqq = 0.0;
        let mut sqv = 0.0;
        for (q, v, w) in &ratios {
            sqq += w * (q - qbar) * (q - qbar);
            sqv += w * (q - qbar) * (v - vbar);
        }
        if sqq > 0.0 {
            (vbar - (sqv / sqq) * qbar).abs()
        } else {
            intercept.exp()
        }
    } else {
        intercept.exp()
    };

    Ok(OrderEstimate {
        slope,
        intercept,
        c_abs,
        collapsed: false,
        points_used: usable.len(),
    })
}

/// Result of the Lamé-structure fit of the composed coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct CoexistenceReport {
    /// The rescaled coefficient satisfies `Q'' + AQ + B(q) + 3Q^2 = 0`
    /// identically through the truncation order.
    pub detected: bool,
    /// Structure index when the multiplier equals `n(n+1)/2` for integer n.
    pub n_ince: Option<u32>,
    /// Fitted constant A.
    pub a: Rat,
    /// Fitted constant-term series `B_0..B_M`.
    pub b_series: Vec<Rat>,
    /// Scale `c` with `Q = c * g(qU)`.
    pub scale: Rat,
    /// Coupling multiplier `1/c` (the `n(n+1)/2` candidate); zero if no
    /// admissible scale exists.
    pub multiplier: Rat,
    /// Largest remaining harmonic coefficient of the residual (exact); zero
    /// when detected.
    pub residual: Rat,
}

/// Test whether the Hill coefficient `W(t,q) = g(qU(t,q))` is a constant
/// multiple of a solution of `Q'' + AQ + B + 3Q^2 = 0`.
///
/// Works on the un-normalized composition (no `1/Omega` factor), with the
/// second time derivative carrying the `Omega(q)` series of the orbit. `A`
/// comes from the lowest-order top-harmonic equation, the scale `c` from the
/// first equation the quadratic term enters, `B(q)` absorbs all constant
/// (k = 0) equations, and everything left over is the residual: detection
/// means the residual vanishes identically through the truncation order.
pub fn coexistence_check(
    osc: &OscillatorSpec,
    coupling: &CouplingSpec,
    l: &LindstedtExpansion,
) -> Result<CoexistenceReport, SeriesError> {
    if coupling.order() != l.order() || osc.order() != l.order() {
        return Err(SeriesError::OrderMismatch { left: osc.order(), right: l.order() });
    }
    let m = l.order();
    let w = compose_small_g(coupling, l); // w[n] for n = 1..=m
    let k_first = match (1..=m).find(|n| !w[*n].is_zero()) {
        Some(k) => k,
        None => {
            return Err(SeriesError::DegenerateFit(
                "coupling composes to zero through the truncation order".into(),
            ))
        }
    };
    if m < 2 * k_first {
        return Err(SeriesError::DegenerateFit(format!(
            "order {m} cannot reach the quadratic term of a coupling starting at q^{k_first}"
        )));
    }

    // Second derivative with the Omega(q) series folded in:
    // owd(k, n) = [Omega * W'']_{k,n}.
    let d2: Vec<CosPoly> = w.iter().map(CosPoly::second_derivative).collect();
    let owd = |k: usize, n: usize| -> Rat {
        let mut acc = Rat::zero();
        for j in 0..n {
            let c = d2[n - j].coeff(k);
            if !c.is_zero() {
                acc += l.omega2(j) * c;
            }
        }
        acc
    };

    // Quadratic term levels: w2[n] = [W^2]_n.
    let mut w2 = vec![CosPoly::zero(); m + 1];
    for i in k_first..=m {
        for j in k_first..=(m - i).max(0) {
            if i + j > m {
                break;
            }
            if !w[i].is_zero() && !w[j].is_zero() {
                w2[i + j] = &w2[i + j] + &(&w[i] * &w[j]);
            }
        }
    }

    // A from the lowest-order top-harmonic equation (the quadratic term
    // cannot reach it): c * owd(K,K) + A c * W_{K,K} = 0.
    let w_kk = w[k_first].coeff(k_first);
    let a = -owd(k_first, k_first) / &w_kk;

    // Scale from the first quadratic equation, at level and harmonic 2K:
    // c * (owd + A W) + 3 c^2 [W^2] = 0.
    let x = owd(2 * k_first, 2 * k_first) + &a * w[2 * k_first].coeff(2 * k_first);
    let y = w2[2 * k_first].coeff(2 * k_first);
    if y.is_zero() {
        return Err(SeriesError::DegenerateFit("quadratic term vanishes at its leading level".into()));
    }
    let scale = -x / (rat_int(3) * &y);
    if scale.is_zero() {
        // No nonzero multiple of W can satisfy the structure equation; the
        // quadratic term at (2K, 2K) is the irreducible obstruction.
        return Ok(CoexistenceReport {
            detected: false,
            n_ince: None,
            a,
            b_series: vec![Rat::zero(); m + 1],
            scale: Rat::zero(),
            multiplier: Rat::zero(),
            residual: y.abs(),
        });
    }

    let three_c2 = rat_int(3) * &scale * &scale;
    let mut b_series = vec![Rat::zero(); m + 1];
    let mut residual = Rat::zero();
    let mut detected = true;
    for n in 1..=m {
        let max_k = w[n].degree().max(w2[n].degree()).max(d2[n].degree()).max(n);
        for k in 0..=max_k {
            let val = &scale * owd(k, n)
                + &scale * &a * w[n].coeff(k)
                + &three_c2 * w2[n].coeff(k);
            if k == 0 {
                b_series[n] = -val;
            } else if !val.is_zero() {
                detected = false;
                if val.abs() > residual {
                    residual = val.abs();
                }
            }
        }
    }

    let multiplier = Rat::one() / &scale;
    let n_ince = if detected { ince_index(&multiplier) } else { None };
    Ok(CoexistenceReport { detected, n_ince, a, b_series, scale, multiplier, residual })
}

/// Solve `n(n+1)/2 = multiplier` for a positive integer n.
fn ince_index(multiplier: &Rat) -> Option<u32> {
    use num::bigint::BigInt;
    let doubled = multiplier * rat_int(2);
    if !doubled.is_integer() || !doubled.is_positive() {
        return None;
    }
    let t = doubled.to_integer();
    let r = t.sqrt();
    // n(n+1) = t forces n = floor(sqrt(t)) or one below.
    for delta in [0, 1] {
        let cand = &r - BigInt::from(delta);
        if cand.is_positive() && &cand * (&cand + BigInt::from(1)) == t {
            return cand.to_u32();
        }
    }
    None
}

/// Convenience: both eigenvalue branches of tongue `N` for a spec pair.
pub fn branch_pair(
    osc: &OscillatorSpec,
    coupling: &CouplingSpec,
    n_index: usize,
) -> Result<(EigenBranch, EigenBranch), SeriesError> {
    let series = crate::hillseries::compose_g(coupling, &expand(osc)?)?;
    let plus = eigen_series(&series, n_index, Parity::Even)?;
    let minus = eigen_series(&series, n_index, Parity::Odd)?;
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hillseries::{compose_g, diagonal_g, leading_coefficient_fast, mathieu_series};

    fn osc(pairs: &[(usize, (i64, i64))], order: usize) -> OscillatorSpec {
        OscillatorSpec::new(pairs.iter().map(|(k, (p, q))| (*k, rat(*p, *q))), order).unwrap()
    }

    fn cpl(pairs: &[(usize, (i64, i64))], order: usize) -> CouplingSpec {
        CouplingSpec::new(pairs.iter().map(|(k, (p, q))| (*k, rat(*p, *q))), order).unwrap()
    }

    #[test]
    fn mathieu_shape_sequence() {
        let series = mathieu_series(6);
        let expected = [
            TongueShape::Trumpet,
            TongueShape::Trumpet,
            TongueShape::Horn,
            TongueShape::Horn,
        ];
        for (n_index, want) in (1..=4).zip(expected) {
            let plus = eigen_series(&series, n_index, Parity::Even).unwrap();
            let minus = eigen_series(&series, n_index, Parity::Odd).unwrap();
            let v = classify_shape(&plus, &minus).unwrap();
            assert_eq!(v.classification, want, "N = {n_index}");
        }
    }

    #[test]
    fn zero_coupling_collapses_every_tongue() {
        let o = osc(&[(2, (1, 1))], 4);
        let series = compose_g(&CouplingSpec::new([], 4).unwrap(), &expand(&o).unwrap()).unwrap();
        for n_index in 1..=4usize {
            let plus = eigen_series(&series, n_index, Parity::Even).unwrap();
            let minus = eigen_series(&series, n_index, Parity::Odd).unwrap();
            let v = classify_shape(&plus, &minus).unwrap();
            assert_eq!(v.classification, TongueShape::Collapsed);
        }
    }

    #[test]
    fn second_tongue_sign_matches_diagonal_route() {
        let cases = [((1, 2), (2, 3), (-1, 5)), ((0, 1), (1, 1), (1, 2)), ((3, 4), (-1, 3), (0, 1))];
        for ((ap, aq), (gp, gq), (hp, hq)) in cases {
            let a2 = rat(ap, aq);
            let g1 = rat(gp, gq);
            let g2 = rat(hp, hq);
            let o = OscillatorSpec::new([(2, a2.clone())], 2).unwrap();
            let c = CouplingSpec::new([(1, g1.clone()), (2, g2.clone())], 2).unwrap();
            let diag = diagonal_g(&o, &c).unwrap();
            assert_eq!(
                second_tongue_sign(&a2, &g1, &g2),
                leading_coefficient_fast(&diag, 2)
            );
        }
        assert!(second_tongue_sign(&Rat::zero(), &Rat::zero(), &Rat::zero()).is_zero());
        assert_eq!(
            second_tongue_sign(&Rat::zero(), &Rat::zero(), &Rat::one()),
            rat(-1, 2)
        );
    }

    #[test]
    fn product_formula_reference_values() {
        // N = 1 reduces to -2 gamma_tilde alpha.
        let alpha = rat(3, 2);
        let gt = rat(-2, 7);
        assert_eq!(
            leading_coefficient_product(&alpha, &gt, 1),
            rat_int(-2) * &gt * &alpha
        );
        // A vanishing factor kills the product.
        assert!(leading_coefficient_product(&alpha, &rat(1, 6), 3).is_zero());
        // alpha = 1, gamma_tilde = 1, N = 2: (1/8) * 2 * (2 - 1/3) = 5/12.
        assert_eq!(leading_coefficient_product(&Rat::one(), &Rat::one(), 2), rat(5, 12));
    }

    #[test]
    fn product_formula_matches_fast_route() {
        let alpha = Rat::one();
        for (p, q) in [(1i64, 1i64), (1, 6), (1, 2), (3, 4)] {
            let gt = rat(p, q);
            let gamma1 = rat_int(2) * &gt * &alpha;
            let o = OscillatorSpec::new([(2, alpha.clone())], 8).unwrap();
            let c = CouplingSpec::new([(1, gamma1)], 8).unwrap();
            let diag = diagonal_g(&o, &c).unwrap();
            for n_index in 1..=8usize {
                assert_eq!(
                    leading_coefficient_product(&alpha, &gt, n_index),
                    leading_coefficient_fast(&diag, n_index),
                    "gamma_tilde = {gt}, N = {n_index}"
                );
            }
        }
    }

    #[test]
    fn trumpet_sweep_for_odd_coupling() {
        // K = 1 reduces to the plain first-tongue statement.
        let k1 = odd_order_trumpet_sweep(1, &Rat::one(), &rat(1, 2)).unwrap();
        assert_eq!(k1.len(), 1);
        assert_eq!(k1[0].classification, TongueShape::Trumpet);
        assert_eq!(k1[0].leading_orders, Some((1, 1)));

        let verdicts = odd_order_trumpet_sweep(3, &Rat::one(), &Rat::one()).unwrap();
        assert_eq!(verdicts.len(), 3);
        assert_eq!(verdicts[0].classification, TongueShape::Trumpet);
        assert_eq!(verdicts[0].leading_orders, Some((3, 3)));
        assert_eq!(verdicts[2].classification, TongueShape::Trumpet);
        assert_eq!(verdicts[2].leading_orders, Some((3, 3)));
        // Even tongue: no splitting visible at this truncation.
        assert_eq!(verdicts[1].classification, TongueShape::Collapsed);

        assert!(odd_order_trumpet_sweep(2, &Rat::one(), &Rat::one()).is_err());
        assert!(odd_order_trumpet_sweep(3, &Rat::one(), &Rat::zero()).is_err());
    }

    #[test]
    fn coexistence_quadratic_linear_family() {
        // f = alpha x^2, g = 2 gamma_tilde alpha x with gamma_tilde = n(n+1)/12.
        for n in 1..=3u32 {
            let gt = rat((n * (n + 1)) as i64, 12);
            let alpha = rat(1, 1);
            let o = OscillatorSpec::new([(2, alpha.clone())], 8).unwrap();
            let c =
                CouplingSpec::new([(1, rat_int(2) * &gt * &alpha)], 8).unwrap();
            let l = expand(&o).unwrap();
            let report = coexistence_check(&o, &c, &l).unwrap();
            assert!(report.detected, "n = {n}");
            assert_eq!(report.n_ince, Some(n));
            assert_eq!(report.a, rat_int(4));
            assert!(report.residual.is_zero());
            assert!(report.b_series.iter().all(Rat::is_zero), "B should vanish");
            // Q = (alpha/3) u means c * gamma_1 = alpha / 3.
            assert_eq!(report.scale, &alpha / (rat_int(6) * &gt * &alpha));
        }
    }

    #[test]
    fn coexistence_rejects_plain_mathieu() {
        let o = OscillatorSpec::linear(6);
        let c = cpl(&[(1, (1, 1))], 6);
        let l = expand(&o).unwrap();
        let report = coexistence_check(&o, &c, &l).unwrap();
        assert!(!report.detected);
        assert!(report.scale.is_zero());
        assert!(!report.residual.is_zero());
    }

    #[test]
    fn coexistence_cubic_quadratic_family() {
        // f = alpha x^3, g = 3 gamma_tilde alpha x^2 with gamma_tilde = n(n+1)/6:
        // A = 16, B = -4 alpha E(q), E = 2q^2 + alpha q^4/4.
        let alpha = rat(1, 1);
        for n in 1..=2u32 {
            let gt = rat((n * (n + 1)) as i64, 6);
            let o = OscillatorSpec::new([(3, alpha.clone())], 8).unwrap();
            let c = CouplingSpec::new([(2, rat_int(3) * &gt * &alpha)], 8).unwrap();
            let l = expand(&o).unwrap();
            let report = coexistence_check(&o, &c, &l).unwrap();
            assert!(report.detected, "n = {n}");
            assert_eq!(report.n_ince, Some(n));
            assert_eq!(report.a, rat_int(16));
            // Independent route for B: the energy identity gives
            // B(q) = -4 gamma_struct E(q) with gamma_struct = alpha here.
            let mut expected_b = vec![Rat::zero(); 9];
            expected_b[2] = rat_int(-8) * &alpha;
            expected_b[4] = -(&alpha * &alpha);
            assert_eq!(report.b_series, expected_b);
        }
    }

    #[test]
    fn coexistence_derivative_coupling_family() {
        // f = alpha x^2 + alpha^2/18 x^3, g = n(n+1)/6 f'.
        let alpha = rat(1, 1);
        for n in 1..=2u32 {
            let factor = rat((n * (n + 1)) as i64, 6);
            let o = OscillatorSpec::new(
                [(2, alpha.clone()), (3, &alpha * &alpha / rat_int(18))],
                8,
            )
            .unwrap();
            let c = CouplingSpec::new(
                [
                    (1, &factor * rat_int(2) * &alpha),
                    (2, &factor * (&alpha * &alpha) / rat_int(6)),
                ],
                8,
            )
            .unwrap();
            let l = expand(&o).unwrap();
            let report = coexistence_check(&o, &c, &l).unwrap();
            assert!(report.detected, "n = {n}");
            assert_eq!(report.n_ince, Some(n));
            assert_eq!(report.a, rat_int(4));
            assert!(report.residual.is_zero());
        }
    }

    #[test]
    fn coexistence_degenerate_inputs() {
        let o = osc(&[(2, (1, 1))], 6);
        let l = expand(&o).unwrap();
        let empty = CouplingSpec::new([], 6).unwrap();
        assert!(matches!(
            coexistence_check(&o, &empty, &l),
            Err(SeriesError::DegenerateFit(_))
        ));
        // Coupling starting too late for the truncation order.
        let late = cpl(&[(4, (1, 1))], 6);
        assert!(matches!(
            coexistence_check(&o, &late, &l),
            Err(SeriesError::DegenerateFit(_))
        ));
    }

    fn synthetic_record(q: f64, length: f64) -> crate::floquet::TongueRecord {
        crate::floquet::TongueRecord {
            n_index: 3,
            q,
            beta_minus: 9.0 - length / 2.0,
            beta_plus: 9.0 + length / 2.0,
            length,
            beta_even: 9.0 - length / 2.0,
            beta_odd: 9.0 + length / 2.0,
            disc_residual_minus: 0.0,
            disc_residual_plus: 0.0,
            bracket_width: 1e-12,
            beta_tol: 1e-12,
            numerically_zero: length < 1e-10,
            steps: 1024,
        }
    }

    #[test]
    fn order_fit_on_synthetic_cubic_lengths() {
        let records: Vec<_> = [0.02, 0.04, 0.06, 0.1, 0.15]
            .iter()
            .map(|q| synthetic_record(*q, 0.7 * q.powi(3)))
            .collect();
        let est = asymptotic_order(&records, 1e-10).unwrap();
        assert!((est.slope - 3.0).abs() < 1e-6);
        assert!((est.c_abs - 0.7).abs() < 1e-6);
        assert!(!est.collapsed);
        assert_eq!(est.points_used, 5);
    }

    #[test]
    fn order_fit_edge_cases() {
        // Everything below the floor: collapsed.
        let flat: Vec<_> = [0.02, 0.05, 0.1, 0.15]
            .iter()
            .map(|q| synthetic_record(*q, 1e-12))
            .collect();
        let est = asymptotic_order(&flat, 1e-10).unwrap();
        assert!(est.collapsed);
        assert_eq!(est.points_used, 0);

        // Too few usable points: refuse rather than extrapolate.
        let sparse: Vec<_> =
            [0.1, 0.15].iter().map(|q| synthetic_record(*q, q.powi(2))).collect();
        assert!(matches!(
            asymptotic_order(&sparse, 1e-10),
            Err(OracleError::InsufficientData { needed: 4, got: 2 })
        ));
    }

    #[test]
    fn classification_is_scale_invariant() {
        let b_plus = [rat_int(1), Rat::zero(), rat(3, 7)];
        let b_minus = [rat_int(1), Rat::zero(), rat(-1, 9)];
        let v1 = classify_from_series(1, &b_plus, &b_minus);
        let scaled_p: Vec<Rat> = b_plus.iter().map(|c| c * rat_int(5)).collect();
        let scaled_m: Vec<Rat> = b_minus.iter().map(|c| c * rat_int(5)).collect();
        let v2 = classify_from_series(1, &scaled_p, &scaled_m);
        assert_eq!(v1.classification, v2.classification);
        assert_eq!(v1.classification, TongueShape::Trumpet);
    }

    #[test]
    fn first_tongue_is_trumpet_whenever_gamma1_nonzero() {
        for (p, q) in [(1i64, 1i64), (-2, 3), (5, 7), (-1, 9)] {
            let o = osc(&[(2, (1, 2)), (3, (-1, 3))], 3);
            let c = CouplingSpec::new([(1, rat(p, q)), (2, rat(1, 4))], 3).unwrap();
            let (plus, minus) = branch_pair(&o, &c, 1).unwrap();
            let v = classify_shape(&plus, &minus).unwrap();
            assert_eq!(v.classification, TongueShape::Trumpet, "gamma_1 = {p}/{q}");
            assert_eq!(v.leading_orders, Some((1, 1)));
        }
    }
}
