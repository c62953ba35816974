//! Double-precision Floquet oracle.
//!
//! Everything here works in the original time variable on the coupled system
//!
//! ```text
//! u'' + 4u + f(u) = 0,  u(0) = q, u'(0) = 0,
//! z'' + (beta + g(u)) z = 0,
//! ```
//!
//! independently of the exact series pipeline: the orbit period comes from an
//! energy quadrature, the monodromy matrix from fixed-step high-order
//! Runge–Kutta integration over one period, and the tongue boundaries from
//! root-finding on half-period symmetry characteristics.
//!
//! The potential `g(u(t))` is even in `t`, so periodic and anti-periodic
//! eigenfunctions split into even and odd ones, located by the four
//! characteristics `y1'(T/2)`, `y2(T/2)` (periodic, even N) and `y1(T/2)`,
//! `y2'(T/2)` (anti-periodic, odd N), where `y1, y2` is the fundamental pair
//! at `t = 0`. Each characteristic has a simple, well-conditioned root near
//! `N^2 (pi/T)^2` even when the tongue collapses, which is what lets the
//! oracle resolve near-zero tongue lengths that the discriminant trace cannot
//! (its dip below `+/-2` scales like the squared length). The discriminant is
//! still computed at every reported endpoint as a diagnostic: an endpoint is
//! only accepted with `|Delta - sigma|` at round-off level.

mod ode;

use crate::error::OracleError;
use crate::hillseries::CouplingSpec;
use crate::lindstedt::OscillatorSpec;
use num::ToPrimitive;

/// Tunable tolerances of the oracle. The defaults match the documented
/// contract of every operation; tests and the CLI may override them.
#[derive(Debug, Clone)]
pub struct IntegratorSettings {
    /// Fixed step count per period; `None` selects it by Richardson
    /// comparison of successive discriminants.
    pub steps: Option<u32>,
    /// Target for the step calibration: successive discriminants must agree
    /// to this tolerance before a step count is accepted.
    pub richardson_tol: f64,
    /// Relative accuracy target of the period quadrature.
    pub quad_rel_tol: f64,
    /// Bisection tolerance for boundary roots, in beta.
    pub beta_tol: f64,
    /// Discriminant residual below which a tangency is accepted.
    pub tangency_tol: f64,
    /// Tongue lengths below this are flagged numerically zero.
    pub zero_floor: f64,
    /// Scan window half-width factor: half-width = factor * (2N - 1) * min(1, Omega).
    pub window_factor: f64,
    /// Number of scan subintervals used to bracket each boundary root.
    pub scan_points: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            steps: None,
            richardson_tol: 1e-10,
            quad_rel_tol: 1e-12,
            beta_tol: 1e-12,
            tangency_tol: 1e-9,
            zero_floor: 1e-10,
            window_factor: 0.75,
            scan_points: 32,
        }
    }
}

/// Dense-coefficient polynomial with double coefficients.
#[derive(Debug, Clone, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>, // coeffs[i] multiplies x^i
}

impl Polynomial {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut coeffs = Vec::new();
        for (k, c) in pairs {
            if c == 0.0 {
                continue;
            }
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0.0);
            }
            coeffs[k] += c;
        }
        Polynomial { coeffs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

/// Discriminant sample: trace of the monodromy matrix at one `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetResult {
    pub beta: f64,
    pub discriminant: f64,
    pub stable: bool,
}

/// Fundamental-pair data at the half period.
#[derive(Debug, Clone, Copy)]
pub struct HalfPeriodValues {
    pub y1: f64,
    pub y1p: f64,
    pub y2: f64,
    pub y2p: f64,
}

/// One located tongue: both boundary eigenvalues at a fixed `(N, q)` with
/// residual diagnostics.
#[derive(Debug, Clone)]
pub struct TongueRecord {
    pub n_index: u32,
    pub q: f64,
    pub beta_minus: f64,
    pub beta_plus: f64,
    /// `beta_plus - beta_minus`, always nonnegative.
    pub length: f64,
    /// Boundary with even eigenfunction (the series `+` branch).
    pub beta_even: f64,
    /// Boundary with odd eigenfunction (the series `-` branch).
    pub beta_odd: f64,
    /// `|Delta(beta) - sigma|` at each endpoint, `sigma = +/-2`.
    pub disc_residual_minus: f64,
    pub disc_residual_plus: f64,
    /// Final bisection bracket width.
    pub bracket_width: f64,
    /// Root tolerance the endpoints were refined to.
    pub beta_tol: f64,
    /// Length is below the configured floor; treat as a collapsed tongue.
    pub numerically_zero: bool,
    pub steps: u32,
}

/// A fixed-amplitude numeric instance of the coupled problem.
///
/// Immutable after construction; all operations are pure, so instances can be
/// shared freely across threads and grid sweeps can run data-parallel.
#[derive(Debug, Clone)]
pub struct NumericProblem {
    f: Polynomial,
    g: Polynomial,
    potential: Polynomial, // V(x) = 2x^2 + integral of f
    q: f64,
    energy: f64,
    x_minus: f64,
    x_plus: f64,
    period: f64,
    steps: u32,
    settings: IntegratorSettings,
}

impl NumericProblem {
    /// Build from the same Taylor data the series pipeline consumes.
    pub fn new(
        osc: &OscillatorSpec,
        coupling: &CouplingSpec,
        q: f64,
        settings: IntegratorSettings,
    ) -> Result<Self, OracleError> {
        let f = Polynomial::from_pairs(
            osc.alpha_pairs().map(|(k, c)| (k, c.to_f64().unwrap_or(f64::NAN))),
        );
        let g = Polynomial::from_pairs(
            coupling.gamma_pairs().map(|(k, c)| (k, c.to_f64().unwrap_or(f64::NAN))),
        );
        Self::from_f64_coeffs(f, g, q, settings)
    }

    /// Build from raw double coefficients (`f` indices >= 2, `g` >= 1).
    pub fn from_f64_coeffs(
        f: Polynomial,
        g: Polynomial,
        q: f64,
        settings: IntegratorSettings,
    ) -> Result<Self, OracleError> {
        if !q.is_finite() || q <= 0.0 {
            return Err(OracleError::InvalidProblem(format!("amplitude q = {q} must be positive")));
        }
        // No interior equilibrium: 4x + f(x) must stay positive on (0, q].
        for i in 1..=256 {
            let x = q * i as f64 / 256.0;
            if 4.0 * x + f.eval(x) <= 0.0 {
                return Err(OracleError::InvalidProblem(format!(
                    "4x + f(x) vanishes near x = {x}; the orbit is not a simple libration"
                )));
            }
        }

        // V(x) = 2x^2 + integral_0^x f.
        let mut vc = vec![0.0; f.coeffs().len().max(2) + 1];
        vc[2] = 2.0;
        for (k, c) in f.coeffs().iter().enumerate() {
            if *c != 0.0 {
                vc[k + 1] += c / (k + 1) as f64;
            }
        }
        let potential = Polynomial { coeffs: vc };
        let energy = potential.eval(q);

        let x_plus = q;
        let x_minus = find_left_turning_point(&potential, energy, q)?;
        let period = period_quadrature(&potential, energy, x_minus, x_plus, settings.quad_rel_tol)?;

        let mut problem = NumericProblem {
            f,
            g,
            potential,
            q,
            energy,
            x_minus,
            x_plus,
            period,
            steps: 0,
            settings,
        };
        problem.steps = match problem.settings.steps {
            Some(s) => s.max(2).next_power_of_two(),
            None => problem.calibrate_steps()?,
        };
        Ok(problem)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Orbit period from the energy quadrature.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Numeric squared frequency `(pi / T)^2`.
    pub fn omega2_hat(&self) -> f64 {
        let w = std::f64::consts::PI / self.period;
        w * w
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn settings(&self) -> &IntegratorSettings {
        &self.settings
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn turning_points(&self) -> (f64, f64) {
        (self.x_minus, self.x_plus)
    }

    /// Same problem with an explicit step count (for step-halving checks).
    pub fn with_step_count(&self, steps: u32) -> Self {
        let mut p = self.clone();
        p.steps = steps.max(2).next_power_of_two();
        p
    }

    fn rhs(&self, beta: f64) -> impl Fn(f64, &[f64; 6]) -> [f64; 6] + '_ {
        move |_t, y| {
            let coeff = beta + self.g.eval(y[0]);
            [
                y[1],
                -4.0 * y[0] - self.f.eval(y[0]),
                y[3],
                -coeff * y[2],
                y[5],
                -coeff * y[4],
            ]
        }
    }

    fn initial_state(&self) -> [f64; 6] {
        [self.q, 0.0, 1.0, 0.0, 0.0, 1.0]
    }

    /// Fundamental matrix of the Hill equation over one period.
    pub fn monodromy(&self, beta: f64) -> [[f64; 2]; 2] {
        self.monodromy_with_steps(beta, self.steps)
    }

    fn monodromy_with_steps(&self, beta: f64, steps: u32) -> [[f64; 2]; 2] {
        let y = ode::integrate(&self.rhs(beta), 0.0, self.period, steps, self.initial_state());
        [[y[2], y[4]], [y[3], y[5]]]
    }

    /// Trace of the monodromy matrix with the stability flag.
    pub fn discriminant(&self, beta: f64) -> FloquetResult {
        let m = self.monodromy(beta);
        let d = m[0][0] + m[1][1];
        FloquetResult { beta, discriminant: d, stable: d.abs() < 2.0 }
    }

    /// Fundamental pair at `T/2`, the data behind the boundary characteristics.
    pub fn half_period_values(&self, beta: f64) -> HalfPeriodValues {
        let steps = (self.steps / 2).max(1);
        let y = ode::integrate(&self.rhs(beta), 0.0, self.period / 2.0, steps, self.initial_state());
        HalfPeriodValues { y1: y[2], y1p: y[3], y2: y[4], y2p: y[5] }
    }

    /// Boundary characteristic with an even eigenfunction: `y1'(T/2)` for
    /// even `N` (periodic), `y1(T/2)` for odd `N` (anti-periodic).
    pub fn characteristic_even(&self, n_index: u32, beta: f64) -> f64 {
        let h = self.half_period_values(beta);
        if n_index % 2 == 0 {
            h.y1p
        } else {
            h.y1
        }
    }

    /// Boundary characteristic with an odd eigenfunction: `y2(T/2)` for even
    /// `N`, `y2'(T/2)` for odd `N`.
    pub fn characteristic_odd(&self, n_index: u32, beta: f64) -> f64 {
        let h = self.half_period_values(beta);
        if n_index % 2 == 0 {
            h.y2
        } else {
            h.y2p
        }
    }

    /// Locate both boundaries of tongue `N >= 1`.
    ///
    /// The scan window is centered at `N^2 (pi/T)^2` with half-width
    /// `window_factor * (2N - 1) * min(1, (pi/T)^2)`; each symmetry
    /// characteristic must change sign exactly once inside it.
    pub fn tongue_boundaries(&self, n_index: u32) -> Result<TongueRecord, OracleError> {
        if n_index == 0 {
            return Err(OracleError::InvalidProblem(
                "tongue index must be >= 1; use boundary0 for the unbounded interval".into(),
            ));
        }
        let omega2 = self.omega2_hat();
        let center = (n_index * n_index) as f64 * omega2;
        let half_width = self.settings.window_factor * (2.0 * n_index as f64 - 1.0) * omega2.min(1.0);
        let lo = center - half_width;
        let hi = center + half_width;

        let (beta_even, width_e) =
            self.single_root(|b| self.characteristic_even(n_index, b), lo, hi, n_index)?;
        let (beta_odd, width_o) =
            self.single_root(|b| self.characteristic_odd(n_index, b), lo, hi, n_index)?;

        let sigma = if n_index % 2 == 0 { 2.0 } else { -2.0 };
        let (mut beta_minus, mut beta_plus) = if beta_even <= beta_odd {
            (beta_even, beta_odd)
        } else {
            (beta_odd, beta_even)
        };
        // Tangency: the two roots agree to root tolerance and the trace
        // touches sigma there; report the pair as exactly coincident.
        if beta_plus - beta_minus <= self.settings.beta_tol {
            let mid = 0.5 * (beta_minus + beta_plus);
            if (self.discriminant(mid).discriminant - sigma).abs() < self.settings.tangency_tol {
                beta_minus = mid;
                beta_plus = mid;
            }
        }
        let length = beta_plus - beta_minus;
        Ok(TongueRecord {
            n_index,
            q: self.q,
            beta_minus,
            beta_plus,
            length,
            beta_even,
            beta_odd,
            disc_residual_minus: (self.discriminant(beta_minus).discriminant - sigma).abs(),
            disc_residual_plus: (self.discriminant(beta_plus).discriminant - sigma).abs(),
            bracket_width: width_e.max(width_o),
            beta_tol: self.settings.beta_tol,
            numerically_zero: length < self.settings.zero_floor,
            steps: self.steps,
        })
    }

    /// Right boundary `beta_0^+` of the unbounded instability interval: the
    /// smallest periodic eigenvalue, reached by an even eigenfunction.
    pub fn boundary0(&self) -> Result<f64, OracleError> {
        let omega2 = self.omega2_hat();
        let g_bound = self.coupling_bound();
        let mut lo = -g_bound - 1.0;
        let step = 0.2 * omega2.min(1.0);
        let mut f_lo = self.characteristic_even(0, lo);
        for _ in 0..400 {
            let hi = lo + step;
            let f_hi = self.characteristic_even(0, hi);
            if f_lo == 0.0 {
                return Ok(lo);
            }
            if f_lo.signum() != f_hi.signum() {
                let (root, _) =
                    bisect(|b| self.characteristic_even(0, b), lo, hi, f_lo, self.settings.beta_tol);
                return Ok(root);
            }
            lo = hi;
            f_lo = f_hi;
        }
        Err(OracleError::BracketNotFound { n_index: 0, q: self.q })
    }

    /// Max of |g| over the orbit range, a crude lower-spectrum bound.
    fn coupling_bound(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..=256 {
            let x = self.x_minus + (self.x_plus - self.x_minus) * i as f64 / 256.0;
            m = m.max(self.g.eval(x).abs());
        }
        m
    }

    /// Max energy drift along the orbit over one period (conservation check).
    pub fn energy_drift(&self, beta: f64) -> f64 {
        let mut worst: f64 = 0.0;
        ode::integrate_sampled(
            &self.rhs(beta),
            0.0,
            self.period,
            self.steps,
            self.initial_state(),
            |_t, y| {
                let e = 0.5 * y[1] * y[1] + self.potential.eval(y[0]);
                worst = worst.max((e - self.energy).abs());
            },
        );
        worst
    }

    fn single_root(
        &self,
        f: impl Fn(f64) -> f64,
        lo: f64,
        hi: f64,
        n_index: u32,
    ) -> Result<(f64, f64), OracleError> {
        let n = self.settings.scan_points.max(4);
        let mut prev_x = lo;
        let mut prev_f = f(lo);
        let mut bracket = None;
        let mut count = 0;
        for i in 1..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            let fx = f(x);
            if prev_f == 0.0 {
                // Sampled the root exactly.
                return Ok((prev_x, 0.0));
            }
            if prev_f.signum() != fx.signum() {
                count += 1;
                if bracket.is_none() {
                    bracket = Some((prev_x, x, prev_f));
                }
            }
            prev_x = x;
            prev_f = fx;
        }
        match (bracket, count) {
            (Some((a, b, fa)), 1) => {
                let (root, width) = bisect(&f, a, b, fa, self.settings.beta_tol);
                Ok((root, width))
            }
            (None, _) => Err(OracleError::BracketNotFound { n_index, q: self.q }),
            (_, c) => Err(OracleError::AmbiguousBracket { n_index, q: self.q, count: c }),
        }
    }

    fn calibrate_steps(&self) -> Result<u32, OracleError> {
        // Probe near the strongest curvature the default windows reach
        // (N <= 6, shifted by the coupling magnitude) plus a low-beta point;
        // accept once both discriminants stabilise under doubling.
        let probes = [0.8 * self.omega2_hat() + 0.3, 45.0 + 2.0 * self.coupling_bound()];
        let mut steps: u32 = 256;
        let mut prev: Vec<f64> =
            probes.iter().map(|b| trace(self.monodromy_with_steps(*b, steps))).collect();
        while steps < (1 << 21) {
            let next = steps * 2;
            let cur: Vec<f64> =
                probes.iter().map(|b| trace(self.monodromy_with_steps(*b, next))).collect();
            let worst = prev
                .iter()
                .zip(&cur)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if worst < self.settings.richardson_tol {
                return Ok(next);
            }
            prev = cur;
            steps = next;
        }
        Err(OracleError::IntegratorFailure(
            "discriminant did not stabilise under step doubling".into(),
        ))
    }
}

fn trace(m: [[f64; 2]; 2]) -> f64 {
    m[0][0] + m[1][1]
}

pub fn monodromy_det(m: [[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Plain bisection to absolute tolerance `tol`; returns root and final width.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64, tol: f64) -> (f64, f64) {
    let mut sign_lo = f_lo.signum();
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return (mid, 0.0);
        }
        if fm.signum() == sign_lo {
            lo = mid;
            sign_lo = fm.signum();
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi), hi - lo)
}

/// Left turning point: the root of `V(x) = E` on the negative side, found by
/// walking left from the origin and bisecting the first bracket.
fn find_left_turning_point(v: &Polynomial, energy: f64, q: f64) -> Result<f64, OracleError> {
    let step = q / 64.0;
    let mut x = 0.0;
    for _ in 0..20_000 {
        let next = x - step;
        let p = energy - v.eval(next);
        if p <= 0.0 {
            let (root, _) = bisect(|t| energy - v.eval(t), next, x, p, 1e-15 * q.max(1.0));
            return Ok(root);
        }
        // Past a critical point of V with the level line still unreached the
        // motion is unbounded on this side.
        let slope = derivative_eval(v, next);
        if slope >= 0.0 {
            return Err(OracleError::NoTurningPoint { side: "left" });
        }
        x = next;
    }
    Err(OracleError::NoTurningPoint { side: "left" })
}

fn derivative_eval(p: &Polynomial, x: f64) -> f64 {
    let mut acc = 0.0;
    for (k, c) in p.coeffs().iter().enumerate().skip(1) {
        acc += k as f64 * c * x.powi(k as i32 - 1);
    }
    acc
}

/// Period `T = 2 Int dx / sqrt(2 (E - V))` with the endpoint singularities
/// removed by `x = m + w sin(theta)`, which reduces the integrand to
/// `1 / sqrt(2 h)` for the deflated polynomial `E - V = (x+ - x)(x - x-) h(x)`.
/// Gauss–Legendre in `theta`, doubling the node count until the relative
/// change is below `rel_tol`.
fn period_quadrature(
    v: &Polynomial,
    energy: f64,
    x_minus: f64,
    x_plus: f64,
    rel_tol: f64,
) -> Result<f64, OracleError> {
    // p(x) = E - V(x) as dense coefficients.
    let mut p: Vec<f64> = v.coeffs().iter().map(|c| -c).collect();
    p[0] += energy;
    let q1 = synthetic_divide(&p, x_plus);
    let q2 = synthetic_divide(&q1, x_minus);
    let h = Polynomial { coeffs: q2.iter().map(|c| -c).collect() };

    let mid = 0.5 * (x_plus + x_minus);
    let half = 0.5 * (x_plus - x_minus);
    let mut prev = f64::NAN;
    let mut nodes = 24;
    while nodes <= 768 {
        let (xs, ws) = ode::gauss_legendre(nodes);
        let mut acc = 0.0;
        for (x, w) in xs.iter().zip(&ws) {
            let theta = std::f64::consts::FRAC_PI_2 * x;
            let hx = h.eval(mid + half * theta.sin());
            if hx.is_nan() || hx <= 0.0 {
                return Err(OracleError::QuadratureNonConvergent);
            }
            acc += w / (2.0 * hx).sqrt();
        }
        let t = 2.0 * std::f64::consts::FRAC_PI_2 * acc;
        if (t - prev).abs() <= rel_tol * t.abs() {
            return Ok(t);
        }
        prev = t;
        nodes *= 2;
    }
    Err(OracleError::QuadratureNonConvergent)
}

/// Quotient of `p` by `(x - r)`, discarding the (near-zero) remainder.
fn synthetic_divide(p: &[f64], r: f64) -> Vec<f64> {
    let d = p.len() - 1;
    let mut q = vec![0.0; d];
    let mut carry = p[d];
    for i in (0..d).rev() {
        q[i] = carry;
        carry = p[i] + r * carry;
    }
    q
}
