//! Fixed-step Dormand–Prince 5 integration and Gauss–Legendre nodes.

/// One RK step of the 5th-order Dormand–Prince solution.
fn dp5_step<const N: usize, F>(rhs: &F, t: f64, h: f64, y: &[f64; N]) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = rhs(t, y);
    let k2 = rhs(t + h / 5.0, &lincomb(y, &[(h / 5.0, &k1)]));
    let k3 = rhs(
        t + 3.0 * h / 10.0,
        &lincomb(y, &[(3.0 * h / 40.0, &k1), (9.0 * h / 40.0, &k2)]),
    );
    let k4 = rhs(
        t + 4.0 * h / 5.0,
        &lincomb(
            y,
            &[
                (44.0 * h / 45.0, &k1),
                (-56.0 * h / 15.0, &k2),
                (32.0 * h / 9.0, &k3),
            ],
        ),
    );
    let k5 = rhs(
        t + 8.0 * h / 9.0,
        &lincomb(
            y,
            &[
                (19372.0 * h / 6561.0, &k1),
                (-25360.0 * h / 2187.0, &k2),
                (64448.0 * h / 6561.0, &k3),
                (-212.0 * h / 729.0, &k4),
            ],
        ),
    );
    let k6 = rhs(
        t + h,
        &lincomb(
            y,
            &[
                (9017.0 * h / 3168.0, &k1),
                (-355.0 * h / 33.0, &k2),
                (46732.0 * h / 5247.0, &k3),
                (49.0 * h / 176.0, &k4),
                (-5103.0 * h / 18656.0, &k5),
            ],
        ),
    );
    lincomb(
        y,
        &[
            (35.0 * h / 384.0, &k1),
            (500.0 * h / 1113.0, &k3),
            (125.0 * h / 192.0, &k4),
            (-2187.0 * h / 6784.0, &k5),
            (11.0 * h / 84.0, &k6),
        ],
    )
}

fn lincomb<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += c * k[i];
        }
    }
    out
}

/// Integrate `y' = rhs(t, y)` from `t0` to `t1` with the given step count.
pub(crate) fn integrate<const N: usize, F>(
    rhs: &F,
    t0: f64,
    t1: f64,
    steps: u32,
    y0: [f64; N],
) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + h * i as f64;
        y = dp5_step(rhs, t, h, &y);
    }
    y
}

/// Sample the trajectory at each step; used by conservation checks.
pub(crate) fn integrate_sampled<const N: usize, F, S>(
    rhs: &F,
    t0: f64,
    t1: f64,
    steps: u32,
    y0: [f64; N],
    mut visit: S,
) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    S: FnMut(f64, &[f64; N]),
{
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    visit(t0, &y);
    for i in 0..steps {
        let t = t0 + h * i as f64;
        y = dp5_step(rhs, t, h, &y);
        visit(t + h, &y);
    }
    y
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial P_n at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
