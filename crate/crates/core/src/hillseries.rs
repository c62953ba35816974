//! Band-edge eigenvalue series of the rescaled Hill equation.
//!
//! With `lambda = beta / Omega(q)` and `G(t,q) = g(qU(t,q)) / Omega(q)` the
//! problem becomes `Z'' + (lambda + G(t,q)) Z = 0` with fixed period pi. The
//! branch near `lambda = N^2` with even (`+`) or odd (`-`) eigenfunction is
//!
//! ```text
//! lambda_N^{+/-}(q) = N^2 + sum_n Lambda_n^{+/-}(N) q^n,
//! Z^{+/-}(t,q)      = sum_n q^n sum_k z_{k,n}^{+/-} e^{ikt},
//! ```
//!
//! and the Fourier coefficients satisfy, level by level,
//!
//! ```text
//! (N^2 - k^2) z_{k,n} = -1/2 sum_{s<=n} sum_i G_{i,s} (z_{k-2i,n-s} + z_{k+2i,n-s})
//!                       - sum_{s<=n} Lambda_s z_{k,n-s},
//! Lambda_n = -1/2 sum_{s<=n} sum_i G_{i,s} (z_{N-2i,n-s} + z_{N+2i,n-s}),
//! ```
//!
//! seeded with `z_{k,0} = delta_{k,N} +/- delta_{k,-N}` (`delta_{k,0}` for
//! `N = 0`) and `z_{+/-N,n} = 0` for `n >= 1`. `Lambda_n` is evaluated first
//! at each level, so the division never hits `k = +/-N`. Back in the original
//! spectral variable the boundary coefficients are
//! `B_n^{+/-}(N) = sum_j Lambda_j^{+/-}(N) Omega_{n-j}` with `Lambda_0 = N^2`.

use crate::error::SeriesError;
use crate::lindstedt::{horner_f64, LindstedtExpansion, OscillatorSpec};
use crate::trigpoly::{rat, rat_int, CosPoly, Rat};
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Truncated Taylor data of the coupling `g(x) = sum gamma_k x^k`, `k >= 1`
/// (the model requires `g(0) = 0`), with its truncation order.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpec {
    gamma: BTreeMap<usize, Rat>,
    order: usize,
}

impl CouplingSpec {
    pub fn new(
        gamma: impl IntoIterator<Item = (usize, Rat)>,
        order: usize,
    ) -> Result<Self, SeriesError> {
        if order == 0 {
            return Err(SeriesError::InvalidSpec("truncation order must be >= 1".into()));
        }
        let mut map = BTreeMap::new();
        for (k, c) in gamma {
            if k < 1 {
                return Err(SeriesError::InvalidSpec(
                    "g coefficient index 0 breaks g(0) = 0".into(),
                ));
            }
            if c.is_zero() {
                continue;
            }
            if map.insert(k, c).is_some() {
                return Err(SeriesError::InvalidSpec(format!(
                    "duplicate g coefficient index {k}"
                )));
            }
        }
        Ok(CouplingSpec { gamma: map, order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn gamma(&self, k: usize) -> Rat {
        self.gamma.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn gamma_pairs(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.gamma.iter().map(|(k, c)| (*k, c))
    }

    pub fn max_power(&self) -> usize {
        self.gamma.keys().next_back().copied().unwrap_or(0)
    }

    /// Smallest index with a nonzero coefficient, if any.
    pub fn min_power(&self) -> Option<usize> {
        self.gamma.keys().next().copied()
    }
}

/// The composed coefficient series `G(t,q) = sum_n G_n(t) q^n` together with
/// the squared-frequency series of the expansion it came from (needed to map
/// `lambda`-space results back to `beta`).
#[derive(Debug, Clone, PartialEq)]
pub struct HillCoefficientSeries {
    g: Vec<CosPoly>,  // index n, entry 0 unused
    omega2: Vec<Rat>, // index n from 0
}

impl HillCoefficientSeries {
    /// Assemble from raw levels `G_1, ..., G_M` and a squared-frequency
    /// series with `Omega_0 = 1`. This is the entry point for handcrafted
    /// coefficient series (degree-checker demonstrations, unit potentials);
    /// [`compose_g`] is the canonical builder.
    pub fn from_parts(levels: Vec<CosPoly>, omega2: Vec<Rat>) -> Result<Self, SeriesError> {
        if levels.is_empty() {
            return Err(SeriesError::InvalidSpec("empty coefficient series".into()));
        }
        if omega2.len() != levels.len() + 1 {
            return Err(SeriesError::OrderMismatch { left: levels.len(), right: omega2.len().saturating_sub(1) });
        }
        if omega2[0] != Rat::one() {
            return Err(SeriesError::InvalidSpec("Omega_0 must be 1".into()));
        }
        let mut g = vec![CosPoly::zero()];
        g.extend(levels);
        Ok(HillCoefficientSeries { g, omega2 })
    }

    /// Handcrafted series with the trivial frequency `Omega = 1`.
    pub fn with_unit_frequency(levels: Vec<CosPoly>) -> Self {
        let omega2 = std::iter::once(Rat::one())
            .chain(std::iter::repeat(Rat::zero()).take(levels.len()))
            .collect();
        Self::from_parts(levels, omega2).expect("unit frequency series is well formed")
    }

    pub fn order(&self) -> usize {
        self.g.len() - 1
    }

    /// Level coefficient `G_n`, `1 <= n <= order`.
    pub fn g(&self, n: usize) -> &CosPoly {
        &self.g[n]
    }

    /// Fourier coefficient `G_{k,n}`.
    pub fn g_coeff(&self, k: usize, n: usize) -> Rat {
        self.g[n].coeff(k)
    }

    pub fn omega2(&self, n: usize) -> &Rat {
        &self.omega2[n]
    }

    pub fn omega2_series(&self) -> &[Rat] {
        &self.omega2
    }

    /// Diagonal `G_{n,n}` read off the stored levels.
    pub fn diagonal(&self) -> Vec<Rat> {
        (1..=self.order()).map(|n| self.g_coeff(n, n)).collect()
    }
}

/// Compose `G_n = sum_{j<=n} g_j kappa_{n-j}` with
/// `g_n = sum_k gamma_k [U-power sums]_n` from the coupling data and a
/// Lindstedt expansion of matching order.
pub fn compose_g(
    coupling: &CouplingSpec,
    l: &LindstedtExpansion,
) -> Result<HillCoefficientSeries, SeriesError> {
    if coupling.order() != l.order() {
        return Err(SeriesError::OrderMismatch { left: coupling.order(), right: l.order() });
    }
    let m = l.order();
    let small_g = compose_small_g(coupling, l);
    let mut g = vec![CosPoly::zero(); m + 1];
    for n in 1..=m {
        let mut acc = CosPoly::zero();
        for j in 1..=n {
            if small_g[j].is_zero() || l.kappa(n - j).is_zero() {
                continue;
            }
            acc = &acc + &small_g[j].scale(l.kappa(n - j));
        }
        g[n] = acc;
    }
    Ok(HillCoefficientSeries { g, omega2: l.omega2_series().to_vec() })
}

/// The un-normalized composition `g(qU) = sum_n g_n(t) q^n` (no `1/Omega`
/// factor); index 0 of the returned vector is unused. Shared with the
/// coexistence fit, which works on exactly this series.
pub(crate) fn compose_small_g(coupling: &CouplingSpec, l: &LindstedtExpansion) -> Vec<CosPoly> {
    let m = l.order();
    let max_k = coupling.max_power().max(1);
    // powers[k][n] = q^n coefficient of (qU)^k.
    let mut powers: Vec<Vec<CosPoly>> = vec![vec![CosPoly::zero(); m + 1]; max_k + 1];
    for n in 1..=m {
        powers[1][n] = l.u(n).clone();
    }
    for k in 2..=max_k {
        for n in k..=m {
            let mut acc = CosPoly::zero();
            for j in 1..n {
                if l.u(j).is_zero() || powers[k - 1][n - j].is_zero() {
                    continue;
                }
                acc = &acc + &(l.u(j) * &powers[k - 1][n - j]);
            }
            powers[k][n] = acc;
        }
    }
    let mut small_g = vec![CosPoly::zero(); m + 1];
    for n in 1..=m {
        let mut acc = CosPoly::zero();
        for (k, gamma_k) in coupling.gamma_pairs() {
            if k > n {
                break;
            }
            acc = &acc + &powers[k][n].scale(gamma_k);
        }
        small_g[n] = acc;
    }
    small_g
}

/// Branch label: even (`+`) or odd (`-`) eigenfunction of the symmetric
/// eigenvalue problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Sign of the mirror relation `z_{-k,n} = sign * z_{k,n}`.
    fn mirror_sign(self) -> i64 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Parity::Even => "+",
            Parity::Odd => "-",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Triangular table of Fourier coefficients `z_{k,n}` for one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct ZTable {
    k_max: i64,
    rows: Vec<Vec<Rat>>, // rows[n][(k + k_max) as usize]
}

impl ZTable {
    pub fn get(&self, k: i64, n: usize) -> Rat {
        if k.abs() > self.k_max || n >= self.rows.len() {
            return Rat::zero();
        }
        self.rows[n][(k + self.k_max) as usize].clone()
    }

    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    /// Number of stored levels (truncation order + 1).
    pub fn levels(&self) -> usize {
        self.rows.len()
    }
}

/// One eigenvalue branch: `Lambda_n`, the `beta`-space coefficients `B_n`,
/// and the Fourier table behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBranch {
    n_index: usize,
    parity: Parity,
    lambda: Vec<Rat>, // index n from 0, lambda[0] = N^2
    b: Vec<Rat>,      // index n from 0, b[0] = N^2
    z: ZTable,
}

impl EigenBranch {
    pub fn n_index(&self) -> usize {
        self.n_index
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn order(&self) -> usize {
        self.lambda.len() - 1
    }

    /// `Lambda_n`, with `Lambda_0 = N^2`.
    pub fn lambda(&self, n: usize) -> &Rat {
        &self.lambda[n]
    }

    /// `B_n`, with `B_0 = N^2`.
    pub fn b(&self, n: usize) -> &Rat {
        &self.b[n]
    }

    pub fn b_series(&self) -> &[Rat] {
        &self.b
    }

    pub fn z(&self) -> &ZTable {
        &self.z
    }

    /// Truncated boundary value `beta_N(q) = N^2 + sum B_n q^n` in doubles.
    pub fn beta_eval_f64(&self, q: f64) -> f64 {
        horner_f64(&self.b, q)
    }
}

/// Run the level-by-level recursion for branch `(N, parity)`.
///
/// `N = 0` exists only for the even parity (seeded with `z_{k,0} =
/// delta_{k,0}`); both parities are available for `N >= 1`.
pub fn eigen_series(
    series: &HillCoefficientSeries,
    n_index: usize,
    parity: Parity,
) -> Result<EigenBranch, SeriesError> {
    if n_index == 0 && parity == Parity::Odd {
        return Err(SeriesError::UnsupportedParity);
    }
    let m = series.order();
    let big_n = n_index as i64;

    // Support extent per level. For a generalized Mathieu series
    // (deg G_s <= s) this reproduces the cone bound |k| <= N + 2n; wider
    // handcrafted coefficients get the extent they actually need.
    let mut extent = vec![n_index; m + 1];
    for n in 1..=m {
        let mut e = extent[n - 1];
        for s in 1..=n {
            if !series.g(s).is_zero() {
                e = e.max(extent[n - s] + 2 * series.g(s).degree());
            }
        }
        extent[n] = e;
    }
    let k_max = extent[m] as i64;
    let width = (2 * k_max + 1) as usize;

    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m + 1);
    let mut row0 = vec![Rat::zero(); width];
    row0[(big_n + k_max) as usize] = Rat::one();
    if n_index > 0 {
        row0[(-big_n + k_max) as usize] = rat_int(parity.mirror_sign());
    }
    rows.push(row0);

    let zval = |rows: &Vec<Vec<Rat>>, k: i64, n: usize| -> Rat {
        if k.abs() > k_max {
            Rat::zero()
        } else {
            rows[n][(k + k_max) as usize].clone()
        }
    };

    let mut lambda = Vec::with_capacity(m + 1);
    lambda.push(rat_int((n_index * n_index) as i64));

    for n in 1..=m {
        // Forcing from the coefficient series; the same double sum feeds both
        // the Lambda_n equation (k = N) and every off-diagonal row.
        let force = |k: i64| -> Rat {
            let mut acc = Rat::zero();
            for s in 1..=n {
                let gs = series.g(s);
                if gs.is_zero() {
                    continue;
                }
                for (i, c) in gs.coeffs().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let shift = 2 * i as i64;
                    let pair = zval(&rows, k - shift, n - s) + zval(&rows, k + shift, n - s);
                    if !pair.is_zero() {
                        acc += c * pair;
                    }
                }
            }
            acc * rat(-1, 2)
        };

        let lambda_n = force(big_n);
        let mut row = vec![Rat::zero(); width];
        for k in -k_max..=k_max {
            if k.abs() == big_n {
                continue; // fixed to zero at every level n >= 1
            }
            if (k - big_n).rem_euclid(2) != 0 {
                continue; // wrong parity class, stays zero
            }
            let mut rhs = force(k);
            for s in 1..=n {
                let tail = zval(&rows, k, n - s);
                if !tail.is_zero() {
                    let l_s: &Rat = if s < n { &lambda[s] } else { &lambda_n };
                    rhs -= l_s * tail;
                }
            }
            if rhs.is_zero() {
                continue;
            }
            row[(k + k_max) as usize] = rhs / rat_int(big_n * big_n - k * k);
        }
        lambda.push(lambda_n);
        rows.push(row);
    }

    // Map back to the original spectral variable.
    let omega2 = series.omega2_series();
    let mut b = Vec::with_capacity(m + 1);
    for n in 0..=m {
        let mut acc = Rat::zero();
        for j in 0..=n {
            acc += &lambda[j] * &omega2[n - j];
        }
        b.push(acc);
    }

    Ok(EigenBranch { n_index, parity, lambda, b, z: ZTable { k_max, rows } })
}

/// Leading tongue coefficient `C_N = Lambda_N^+(N) - Lambda_N^-(N)` straight
/// from the diagonal `G_{s,s}`, via the difference recursion
///
/// ```text
/// r_0 = 2,  r_p = -1/(8 p (N-p)) sum_{s<=p} G_{s,s} r_{p-s},
/// C_N = -1/2 sum_{p<N} G_{N-p,N-p} r_p.
/// ```
///
/// `diagonal[s-1]` must hold `G_{s,s}` for `1 <= s <= N`.
pub fn leading_coefficient_fast(diagonal: &[Rat], n_index: usize) -> Rat {
    assert!(n_index >= 1, "leading coefficient is defined for N >= 1");
    assert!(
        diagonal.len() >= n_index,
        "diagonal must supply G_(s,s) for s = 1..={n_index}"
    );
    let mut r = Vec::with_capacity(n_index);
    r.push(rat_int(2));
    for p in 1..n_index {
        let mut acc = Rat::zero();
        for s in 1..=p {
            if !diagonal[s - 1].is_zero() && !r[p - s].is_zero() {
                acc += &diagonal[s - 1] * &r[p - s];
            }
        }
        let denom = rat_int(-8 * (p as i64) * ((n_index - p) as i64));
        r.push(acc / denom);
    }
    let mut c = Rat::zero();
    for p in 0..n_index {
        c += &diagonal[n_index - p - 1] * &r[p];
    }
    c * rat(-1, 2)
}

/// Diagonal `G_{n,n}` for `n = 1..=order` by the generating-function route:
/// `G_{n,n} = 2 sum_m gamma_m [psi^m]_n` with `psi = sum A_n q^n` from
/// [`crate::lindstedt::diagonal_a`]. Independent of [`compose_g`].
pub fn diagonal_g(
    osc: &OscillatorSpec,
    coupling: &CouplingSpec,
) -> Result<Vec<Rat>, SeriesError> {
    if osc.order() != coupling.order() {
        return Err(SeriesError::OrderMismatch { left: osc.order(), right: coupling.order() });
    }
    let m = osc.order();
    let a = crate::lindstedt::diagonal_a(osc)?;
    let max_k = coupling.max_power().max(1);

    // powers[k][n] = q^n coefficient of psi^k, 1-based levels.
    let mut powers: Vec<Vec<Rat>> = vec![vec![Rat::zero(); m + 1]; max_k + 1];
    for n in 1..=m {
        powers[1][n] = a[n - 1].clone();
    }
    for k in 2..=max_k {
        for n in k..=m {
            let mut acc = Rat::zero();
            for j in 1..n {
                if a[j - 1].is_zero() || powers[k - 1][n - j].is_zero() {
                    continue;
                }
                acc += &a[j - 1] * &powers[k - 1][n - j];
            }
            powers[k][n] = acc;
        }
    }

    let mut diag = Vec::with_capacity(m);
    for n in 1..=m {
        let mut acc = Rat::zero();
        for (k, gamma_k) in coupling.gamma_pairs() {
            if k > n {
                break;
            }
            acc += gamma_k * &powers[k][n];
        }
        diag.push(acc * rat_int(2));
    }
    Ok(diag)
}

/// Outcome of the degree check `deg(G_n) <= 2n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeCheck {
    pub ok: bool,
    /// Smallest offending pair `(level n, harmonic index k > n)`.
    pub violation: Option<DegreeViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeViolation {
    pub level: usize,
    pub harmonic: usize,
}

impl DegreeViolation {
    /// Splitting order the excess harmonic forces on tongue `harmonic`:
    /// its length is exactly of order `level` in q.
    pub fn predicted_order(&self) -> usize {
        self.level
    }
}

impl fmt::Display for DegreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "G_{} carries cos({}t): tongue {} is predicted to split at order {}",
            self.level,
            2 * self.harmonic,
            self.harmonic,
            self.level
        )
    }
}

/// Check the generalized-Mathieu degree condition on every stored level.
pub fn check_generalized_mathieu(series: &HillCoefficientSeries) -> DegreeCheck {
    for n in 1..=series.order() {
        let g = series.g(n);
        for k in (n + 1)..=g.degree() {
            if !g.coeff(k).is_zero() {
                return DegreeCheck { ok: false, violation: Some(DegreeViolation { level: n, harmonic: k }) };
            }
        }
    }
    DegreeCheck { ok: true, violation: None }
}

/// Convenience: Mathieu coefficient series (`G_1 = cos 2t`, all higher
/// levels zero, unit frequency) at the given order.
pub fn mathieu_series(order: usize) -> HillCoefficientSeries {
    let mut levels = vec![CosPoly::zero(); order];
    levels[0] = CosPoly::harmonic(1);
    HillCoefficientSeries::with_unit_frequency(levels)
}
