//! Poincaré–Lindstedt expansion of the rescaled oscillator.
//!
//! After the time rescaling `tau = omega(q) t`, `u = q U`, the initial-value
//! problem `u'' + 4u + f(u) = 0`, `u(0) = q`, `u'(0) = 0` becomes
//!
//! ```text
//! Omega(q) U'' + 4 U + sum_{k>=2} alpha_k q^{k-1} U^k = 0,   U(0) = 1, U'(0) = 0,
//! ```
//!
//! with `Omega = (pi / T(q))^2`. This module computes the coefficient pair
//! `u_n` (even cosine polynomials) and `Omega_n` (rationals) of
//! `q U = sum u_n q^n`, `Omega = sum Omega_n q^n` up to a requested order:
//! each level builds the source term of the recurrent equation from
//! lower-order data, fixes one `Omega` so the resonant cos(2t) component
//! vanishes, and solves the harmonic problem for the next `u_n`.
//!
//! Outputs are formal series. No convergence radius is estimated; truncation
//! order and admissible amplitude range are the caller's responsibility, with
//! the Floquet oracle supplying the finite-q ground truth.

use crate::error::SeriesError;
use crate::trigpoly::{rat, rat_bits, rat_int, solve_harmonic, CosPoly, Rat};
use num::{One, Zero};
use std::collections::BTreeMap;

/// Abort bound for coefficient growth, in bits (see [`expand_with_limit`]).
pub const DEFAULT_BIT_LIMIT: u64 = 1_000_000;

/// Truncated Taylor data of the restoring nonlinearity `f(x) = sum alpha_k x^k`,
/// `k >= 2`, together with the series truncation order.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorSpec {
    alpha: BTreeMap<usize, Rat>,
    order: usize,
}

impl OscillatorSpec {
    /// Build a spec; rejects indices below 2 (the model requires `f = O(x^2)`)
    /// and a zero truncation order. Zero coefficients are dropped.
    pub fn new(
        alpha: impl IntoIterator<Item = (usize, Rat)>,
        order: usize,
    ) -> Result<Self, SeriesError> {
        if order == 0 {
            return Err(SeriesError::InvalidSpec("truncation order must be >= 1".into()));
        }
        let mut map = BTreeMap::new();
        for (k, c) in alpha {
            if k < 2 {
                return Err(SeriesError::InvalidSpec(format!(
                    "f coefficient index {k} < 2 breaks f(x) = O(x^2)"
                )));
            }
            if c.is_zero() {
                continue;
            }
            if map.insert(k, c).is_some() {
                return Err(SeriesError::InvalidSpec(format!(
                    "duplicate f coefficient index {k}"
                )));
            }
        }
        Ok(OscillatorSpec { alpha: map, order })
    }

    /// The linear oscillator `f = 0` at the given order.
    pub fn linear(order: usize) -> Self {
        OscillatorSpec { alpha: BTreeMap::new(), order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Taylor coefficient `alpha_k` (zero if absent).
    pub fn alpha(&self, k: usize) -> Rat {
        self.alpha.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    /// Nonzero coefficients, ascending in `k`.
    pub fn alpha_pairs(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.alpha.iter().map(|(k, c)| (*k, c))
    }

    pub fn max_power(&self) -> usize {
        self.alpha.keys().next_back().copied().unwrap_or(0)
    }
}

/// The computed expansion: `u_n` for `n = 1..=order`, `Omega_n` and the
/// reciprocal coefficients `kappa_n` (`1/Omega = sum kappa_n q^n`) for
/// `n = 0..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindstedtExpansion {
    order: usize,
    u: Vec<CosPoly>,     // index n, entry 0 is an unused zero
    omega2: Vec<Rat>,    // index n from 0
    kappa: Vec<Rat>,     // index n from 0
}

impl LindstedtExpansion {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Orbit coefficient `u_n`, `1 <= n <= order`.
    pub fn u(&self, n: usize) -> &CosPoly {
        &self.u[n]
    }

    /// Squared-frequency coefficient `Omega_n`, `0 <= n <= order`.
    pub fn omega2(&self, n: usize) -> &Rat {
        &self.omega2[n]
    }

    /// Reciprocal-series coefficient `kappa_n`, `0 <= n <= order`.
    pub fn kappa(&self, n: usize) -> &Rat {
        &self.kappa[n]
    }

    pub fn omega2_series(&self) -> &[Rat] {
        &self.omega2
    }

    pub fn kappa_series(&self) -> &[Rat] {
        &self.kappa
    }

    /// Evaluate the truncated `Omega(q)` in double precision.
    pub fn omega2_eval_f64(&self, q: f64) -> f64 {
        horner_f64(&self.omega2, q)
    }
}

pub(crate) fn horner_f64(coeffs: &[Rat], q: f64) -> f64 {
    use num::ToPrimitive;
    coeffs.iter().rev().fold(0.0, |acc, c| acc * q + c.to_f64().unwrap_or(f64::NAN))
}

/// Run the expansion with the default coefficient-size bound.
pub fn expand(spec: &OscillatorSpec) -> Result<LindstedtExpansion, SeriesError> {
    expand_with_limit(spec, DEFAULT_BIT_LIMIT)
}

/// Run the expansion, aborting with `CoefficientOverflow` if any numerator or
/// denominator outgrows `bit_limit` bits.
pub fn expand_with_limit(
    spec: &OscillatorSpec,
    bit_limit: u64,
) -> Result<LindstedtExpansion, SeriesError> {
    let m = spec.order;
    // Omega_n is fixed by the secular condition of level n+1, so the level
    // loop runs one past the truncation order.
    let levels = m + 1;
    let max_k = spec.max_power().max(1);

    let mut u = vec![CosPoly::zero(); levels + 1];
    u[1] = CosPoly::harmonic(1);
    let mut omega2 = Vec::with_capacity(m + 1);
    omega2.push(Rat::one());

    // powers[k][n] = q^n coefficient of (sum_i u_i q^i)^k; powers[1] aliases u.
    let mut powers: Vec<Vec<CosPoly>> = vec![vec![CosPoly::zero(); levels + 1]; max_k + 1];
    if max_k >= 1 {
        powers[1][1] = CosPoly::harmonic(1);
    }

    for n in 2..=levels {
        for k in 2..=max_k.min(n) {
            let mut acc = CosPoly::zero();
            for j in 1..n {
                if u[j].is_zero() || powers[k - 1][n - j].is_zero() {
                    continue;
                }
                acc = &acc + &(&u[j] * &powers[k - 1][n - j]);
            }
            powers[k][n] = acc;
        }

        // Source term of the level-n equation with the unknown Omega_{n-1}
        // split off: F_n = F_known + 4 Omega_{n-1} cos(2t).
        let mut f_known = CosPoly::zero();
        for k in 1..=n.saturating_sub(2) {
            if omega2[k].is_zero() {
                continue;
            }
            f_known = &f_known - &u[n - k].second_derivative().scale(&omega2[k]);
        }
        for (k, alpha_k) in spec.alpha_pairs() {
            if k > n {
                break;
            }
            f_known = &f_known - &powers[k][n].scale(alpha_k);
        }

        // Secular removal: the cos(2t) coefficient of F_n must vanish.
        let omega_new = -f_known.project(1) * rat(1, 4);
        let f_n = &f_known + &CosPoly::harmonic(1).scale(&(rat_int(4) * &omega_new));
        omega2.push(omega_new);

        if n <= m {
            let w = solve_harmonic(&f_n)?;
            guard_bits(w.max_coeff_bits(), bit_limit)?;
            if max_k >= 1 {
                powers[1][n] = w.clone();
            }
            u[n] = w;
        }
        guard_bits(rat_bits(&omega2[n - 1]), bit_limit)?;
    }

    u.truncate(m + 1);
    let kappa = reciprocal_series(&omega2);
    Ok(LindstedtExpansion { order: m, u, omega2, kappa })
}

fn guard_bits(bits: u64, limit: u64) -> Result<(), SeriesError> {
    if bits > limit {
        Err(SeriesError::CoefficientOverflow { bits, limit })
    } else {
        Ok(())
    }
}

/// Coefficients of `1 / S(q)` for a series with `S(0) = 1`.
fn reciprocal_series(s: &[Rat]) -> Vec<Rat> {
    let mut inv = Vec::with_capacity(s.len());
    inv.push(Rat::one());
    for n in 1..s.len() {
        let mut acc = Rat::zero();
        for j in 1..=n {
            acc += &s[j] * &inv[n - j];
        }
        inv.push(-acc);
    }
    inv
}

/// Diagonal coefficients `A_n = P_{2n}[u_n] / 2` computed by their own
/// closed recursion `4(n^2 - 1) A_n = sum_m alpha_m * (A-convolution)`,
/// independently of [`expand`]. `A_1 = 1/2`.
pub fn diagonal_a(spec: &OscillatorSpec) -> Result<Vec<Rat>, SeriesError> {
    diagonal_a_with_limit(spec, DEFAULT_BIT_LIMIT)
}

pub fn diagonal_a_with_limit(
    spec: &OscillatorSpec,
    bit_limit: u64,
) -> Result<Vec<Rat>, SeriesError> {
    let m = spec.order;
    let max_k = spec.max_power().max(1);

    // a[n] for n in 1..=m, with a[0] an unused zero slot.
    let mut a = vec![Rat::zero(); m + 1];
    if m >= 1 {
        a[1] = rat(1, 2);
    }
    // powers[k][n] = q^n coefficient of (sum A_i q^i)^k.
    let mut powers: Vec<Vec<Rat>> = vec![vec![Rat::zero(); m + 1]; max_k + 1];
    if max_k >= 1 && m >= 1 {
        powers[1][1] = rat(1, 2);
    }

    for n in 2..=m {
        for k in 2..=max_k.min(n) {
            let mut acc = Rat::zero();
            for j in 1..n {
                if a[j].is_zero() || powers[k - 1][n - j].is_zero() {
                    continue;
                }
                acc += &a[j] * &powers[k - 1][n - j];
            }
            powers[k][n] = acc;
        }
        let mut rhs = Rat::zero();
        for (k, alpha_k) in spec.alpha_pairs() {
            if k > n {
                break;
            }
            rhs += alpha_k * &powers[k][n];
        }
        let an = rhs / rat_int(4 * ((n * n) as i64 - 1));
        guard_bits(rat_bits(&an), bit_limit)?;
        if max_k >= 1 {
            powers[1][n] = an.clone();
        }
        a[n] = an;
    }

    Ok(a[1..].to_vec())
}

/// The normalized resonance integral `(2/pi) Int_{-pi/2}^{pi/2} p cos(2Kt) dt`
/// for `K >= 1`, which by orthogonality is exactly the cos(2Kt) coefficient
/// of `p`. For `K = 0` this returns the mean (the constant coefficient).
///
/// Exposed on its own so the vanishing of the resonance integral for odd
/// powers of cos(2t) is directly testable.
pub fn secular_integral(p: &CosPoly, k: usize) -> Rat {
    p.project(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(pairs: &[(usize, (i64, i64))], order: usize) -> OscillatorSpec {
        OscillatorSpec::new(pairs.iter().map(|(k, (p, q))| (*k, rat(*p, *q))), order).unwrap()
    }

    fn cp(pairs: &[(usize, (i64, i64))]) -> CosPoly {
        let deg = pairs.iter().map(|(k, _)| *k).max().unwrap_or(0);
        let mut coeffs = vec![Rat::zero(); deg + 1];
        for (k, (p, q)) in pairs {
            coeffs[*k] = rat(*p, *q);
        }
        CosPoly::from_coeffs(coeffs)
    }

    #[test]
    fn linear_oscillator_expansion_is_trivial() {
        let l = expand(&OscillatorSpec::linear(5)).unwrap();
        for n in 2..=5 {
            assert!(l.u(n).is_zero(), "u_{n} should vanish");
        }
        assert_eq!(l.omega2_series(), &[rat_int(1), Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()]);
        assert_eq!(l.u(1), &CosPoly::harmonic(1));
    }

    #[test]
    fn quadratic_f_reference_values() {
        let l = expand(&spec(&[(2, (1, 1))], 2)).unwrap();
        assert!(l.omega2(1).is_zero());
        assert_eq!(l.u(2), &cp(&[(0, (-1, 8)), (1, (1, 12)), (2, (1, 24))]));
        assert_eq!(l.u(2).project(2), rat(1, 24));
    }

    #[test]
    fn omega2_identity_quadratic_cubic() {
        // Omega_2 = -5/96 alpha_2^2 + 3/16 alpha_3.
        let a = rat(2, 3);
        let b = rat(-1, 5);
        let l = expand(&spec(&[(2, (2, 3)), (3, (-1, 5))], 3)).unwrap();
        let expected = rat(-5, 96) * &a * &a + rat(3, 16) * &b;
        assert_eq!(l.omega2(2), &expected);
    }

    #[test]
    fn omega_times_kappa_is_unit_series() {
        let l = expand(&spec(&[(2, (1, 2)), (3, (1, 3)), (4, (-2, 7))], 8)).unwrap();
        for n in 1..=8 {
            let mut acc = Rat::zero();
            for j in 0..=n {
                acc += l.omega2(j) * l.kappa(n - j);
            }
            assert!(acc.is_zero(), "Cauchy product fails at order {n}");
        }
    }

    #[test]
    fn degree_bound_and_zero_mean() {
        let l = expand(&spec(&[(2, (1, 1)), (3, (-1, 2)), (5, (1, 4))], 9)).unwrap();
        for n in 1..=9 {
            assert!(l.u(n).degree() <= 2 * n);
            if n >= 2 {
                assert!(l.u(n).coeff_sum().is_zero(), "u_{n}(0) != 0");
            }
        }
    }

    // Independent route for the source term: explicit composition
    // enumeration instead of iterated Cauchy products.
    fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 1 {
            return vec![vec![n]];
        }
        let mut out = Vec::new();
        for first in 1..=n.saturating_sub(k - 1) {
            for mut rest in compositions(n - first, k - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }

    #[test]
    fn residual_of_each_level_vanishes() {
        let s = spec(&[(2, (1, 1)), (3, (-2, 5))], 6);
        let l = expand(&s).unwrap();
        for n in 2..=6 {
            let mut f_n = CosPoly::zero();
            for k in 1..n {
                f_n = &f_n - &l.u(n - k).second_derivative().scale(l.omega2(k));
            }
            for (k, alpha_k) in s.alpha_pairs() {
                if k > n {
                    continue;
                }
                let mut multi = CosPoly::zero();
                for comp in compositions(n, k) {
                    let mut prod = CosPoly::constant(Rat::one());
                    for i in comp {
                        prod = &prod * l.u(i);
                    }
                    multi = &multi + &prod;
                }
                f_n = &f_n - &multi.scale(alpha_k);
            }
            let residual = &(&l.u(n).second_derivative() + &l.u(n).scale(&rat_int(4))) - &f_n;
            assert!(residual.is_zero(), "residual at level {n}: {residual}");
        }
    }

    #[test]
    fn odd_f_parity() {
        // Odd f: even-n orbit coefficients and odd-n frequency coefficients vanish.
        let l = expand(&spec(&[(3, (1, 1)), (5, (-1, 3))], 8)).unwrap();
        for n in (2..=8).step_by(2) {
            assert!(l.u(n).is_zero(), "u_{n} should vanish for odd f");
        }
        for n in (1..=7).step_by(2) {
            assert!(l.omega2(n).is_zero(), "Omega_{n} should vanish for odd f");
        }
    }

    #[test]
    fn leading_gap_parity_of_first_power() {
        // alpha_j = 0 for 2 <= j <= K with K odd forces Omega_j = 0 for j <= K.
        let l = expand(&spec(&[(4, (1, 1))], 6)).unwrap();
        for j in 1..=3 {
            assert!(l.omega2(j).is_zero(), "Omega_{j} should vanish");
        }
        // For an even gap the resonance integral survives and Omega_K != 0.
        let even_gap = expand(&spec(&[(5, (1, 1))], 4)).unwrap();
        for j in 1..=3 {
            assert!(even_gap.omega2(j).is_zero());
        }
        assert!(!even_gap.omega2(4).is_zero());
    }

    #[test]
    fn diagonal_matches_projection_route() {
        let s = spec(&[(2, (1, 1))], 6);
        let a = diagonal_a(&s).unwrap();
        assert_eq!(a[0], rat(1, 2));
        assert_eq!(a[1], rat(1, 48));
        let l = expand(&s).unwrap();
        for n in 1..=6 {
            assert_eq!(a[n - 1], l.u(n).project(n) * rat(1, 2), "A_{n} route mismatch");
        }
        let trivial = diagonal_a(&OscillatorSpec::linear(4)).unwrap();
        assert_eq!(trivial, vec![rat(1, 2), Rat::zero(), Rat::zero(), Rat::zero()]);
    }

    #[test]
    fn secular_integral_examples() {
        let c1 = CosPoly::harmonic(1);
        let cube = &(&c1 * &c1) * &c1;
        assert_eq!(secular_integral(&cube, 1), rat(3, 4));
        assert_eq!(secular_integral(&cube, 0), Rat::zero());
        assert_eq!(secular_integral(&(&c1 * &c1), 0), rat(1, 2));
    }

    #[test]
    fn overflow_guard_fires() {
        let err = expand_with_limit(&spec(&[(2, (1000000007, 3)), (3, (999999937, 11))], 12), 64)
            .unwrap_err();
        matches!(err, SeriesError::CoefficientOverflow { .. })
            .then_some(())
            .expect("expected CoefficientOverflow");
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(OscillatorSpec::new([(1, rat_int(1))], 3).is_err());
        assert!(OscillatorSpec::new([(2, rat_int(1))], 0).is_err());
    }
}
