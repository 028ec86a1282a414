//! Internal quadrature and finite-difference machinery.
//!
//! Gauss–Legendre nodes are generated at runtime by Newton iteration on the
//! Legendre recurrence, so no tabulated constants are needed. Adaptive
//! refinement compares a panel against its two halves and bisects until the
//! requested tolerance is met. Finite-difference weights on arbitrary nodes
//! come from Fornberg's recursion.

use crate::error::{Error, Result};
use std::sync::OnceLock;

const GL_ORDER: usize = 16;

/// Legendre polynomial value and derivative at `x` for order `n`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    // derivative from the standard relation
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights of n-point Gauss–Legendre quadrature on [-1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| gauss_legendre(GL_ORDER))
}

fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl16();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Adaptive Gauss–Legendre on [a, b]. The error estimate of a panel is the
/// difference between the whole-panel rule and the sum of its two halves.
/// Subdivision stops at the tolerance, the roundoff floor, or a global work
/// budget; the residual is carried into the returned error estimate instead
/// of failing hard.
pub(crate) fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_depth: usize,
) -> Result<(f64, f64)> {
    use std::cell::Cell;
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
        budget: &Cell<i64>,
    ) -> Result<(f64, f64)> {
        let m = 0.5 * (a + b);
        let left = gl_panel(f, a, m);
        let right = gl_panel(f, m, b);
        budget.set(budget.get() - 2);
        let sum = left + right;
        let err = (sum - whole).abs();
        if err.is_nan() {
            return Err(Error::QuadratureFailure(format!(
                "integrand is not finite on [{a:.6e}, {b:.6e}]"
            )));
        }
        let floor = 8.0 * f64::EPSILON * (left.abs() + right.abs());
        if err <= tol
            || err <= floor
            || b - a < 1e-300
            || depth == 0
            || budget.get() < 0
        {
            return Ok((sum, err));
        }
        let (lv, le) = recurse(f, a, m, left, 0.5 * tol, depth - 1, budget)?;
        let (rv, re) = recurse(f, m, b, right, 0.5 * tol, depth - 1, budget)?;
        Ok((lv + rv, le + re))
    }
    if a == b {
        return Ok((0.0, 0.0));
    }
    let whole = gl_panel(f, a, b);
    let budget = Cell::new(20_000i64);
    recurse(f, a, b, whole, abs_tol, max_depth, &budget)
}

/// Adaptive integration over a list of panel breakpoints; tolerances are
/// distributed evenly over the panels.
pub(crate) fn adaptive_panels<F: Fn(f64) -> f64>(
    f: &F,
    breaks: &[f64],
    abs_tol: f64,
) -> Result<(f64, f64)> {
    let npanels = breaks.len().saturating_sub(1).max(1);
    let tol = abs_tol / npanels as f64;
    let mut value = 0.0;
    let mut err = 0.0;
    for w in breaks.windows(2) {
        let (v, e) = adaptive(f, w[0], w[1], tol, 40)?;
        value += v;
        err += e;
    }
    Ok((value, err))
}

/// Geometric breakpoints a, a·r, a·r², …, capped at b (prepended with `start`).
pub(crate) fn geometric_breaks(start: f64, first: f64, b: f64, ratio: f64) -> Vec<f64> {
    let mut breaks = vec![start];
    let mut x = first;
    while x < b {
        breaks.push(x);
        x *= ratio;
    }
    breaks.push(b);
    breaks
}

fn gl_panel_vec<F>(f: &F, a: f64, b: f64, d: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let (nodes, weights) = gl16();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = vec![0.0; d];
    for (x, w) in nodes.iter().zip(weights) {
        let fx = f(c + h * x)?;
        for (a_i, f_i) in acc.iter_mut().zip(&fx) {
            *a_i += w * f_i;
        }
    }
    for a_i in acc.iter_mut() {
        *a_i *= h;
    }
    Ok(acc)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Vector-valued adaptive Gauss–Legendre with max-norm error control.
/// Integrand failures (root solver, degeneracies) propagate out.
pub(crate) fn adaptive_vec<F>(
    f: &F,
    a: f64,
    b: f64,
    d: usize,
    abs_tol: f64,
    max_depth: usize,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    use std::cell::Cell;
    #[allow(clippy::too_many_arguments)]
    fn recurse<F>(
        f: &F,
        a: f64,
        b: f64,
        whole: Vec<f64>,
        d: usize,
        tol: f64,
        depth: usize,
        budget: &Cell<i64>,
    ) -> Result<(Vec<f64>, f64)>
    where
        F: Fn(f64) -> Result<Vec<f64>>,
    {
        let m = 0.5 * (a + b);
        let left = gl_panel_vec(f, a, m, d)?;
        let right = gl_panel_vec(f, m, b, d)?;
        budget.set(budget.get() - 2);
        let sum: Vec<f64> = left.iter().zip(&right).map(|(l, r)| l + r).collect();
        let err = max_abs_diff(&sum, &whole);
        if err.is_nan() {
            return Err(Error::QuadratureFailure(format!(
                "integrand is not finite on [{a:.6e}, {b:.6e}]"
            )));
        }
        let scale: f64 = sum.iter().fold(0.0f64, |mx, c| mx.max(c.abs()));
        if err <= tol
            || err <= 8.0 * f64::EPSILON * scale
            || b - a < 1e-300
            || depth == 0
            || budget.get() < 0
        {
            return Ok((sum, err));
        }
        let (lv, le) = recurse(f, a, m, left, d, 0.5 * tol, depth - 1, budget)?;
        let (rv, re) = recurse(f, m, b, right, d, 0.5 * tol, depth - 1, budget)?;
        Ok((lv.iter().zip(&rv).map(|(x, y)| x + y).collect(), le + re))
    }
    if a == b {
        return Ok((vec![0.0; d], 0.0));
    }
    let whole = gl_panel_vec(f, a, b, d)?;
    let budget = Cell::new(20_000i64);
    recurse(f, a, b, whole, d, abs_tol, max_depth, &budget)
}

/// Vector integration over panel breakpoints.
pub(crate) fn adaptive_panels_vec<F>(
    f: &F,
    breaks: &[f64],
    d: usize,
    abs_tol: f64,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let npanels = breaks.len().saturating_sub(1).max(1);
    let tol = abs_tol / npanels as f64;
    let mut value = vec![0.0; d];
    let mut err = 0.0;
    for w in breaks.windows(2) {
        let (v, e) = adaptive_vec(f, w[0], w[1], d, tol, 40)?;
        for (acc, x) in value.iter_mut().zip(&v) {
            *acc += x;
        }
        err += e;
    }
    Ok((value, err))
}

/// Fornberg weights: coefficients c_j such that Σ c_j f(nodes_j) approximates
/// the m-th derivative of f at x0. Exact for polynomials up to degree
/// nodes.len() − 1.
pub(crate) fn fd_weights(x0: f64, nodes: &[f64], m: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(n > m, "need at least m+1 nodes for the m-th derivative");
    // c[k][j]: weight of node j for the k-th derivative, built incrementally.
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c[m].clone()
}

/// m-th derivative of `f` at `x` from a stencil of `npts` equally spaced
/// nodes with spacing `h`. The stencil is centered when possible and shifted
/// to keep every node ≥ `floor` (one-sided at the boundary). Returns the
/// Richardson-refined value and an error estimate.
pub(crate) fn stencil_derivative<F: Fn(f64) -> f64>(
    f: &F,
    x: f64,
    m: usize,
    npts: usize,
    h: f64,
    floor: Option<f64>,
) -> (f64, f64) {
    let eval = |h: f64| -> f64 {
        let half = (npts - 1) as f64 / 2.0;
        let mut start = x - half * h;
        if let Some(fl) = floor {
            if start < fl {
                start = fl.min(x);
            }
        }
        let nodes: Vec<f64> = (0..npts).map(|j| start + j as f64 * h).collect();
        let w = fd_weights(x, &nodes, m);
        nodes
            .iter()
            .zip(&w)
            .map(|(xj, wj)| wj * f(*xj))
            .sum::<f64>()
    };
    let coarse = eval(h);
    let fine = eval(0.5 * h);
    // order p = npts - m for a full stencil; use it for the extrapolation
    let p = (npts - m) as i32;
    let factor = 2f64.powi(p);
    let extrap = (factor * fine - coarse) / (factor - 1.0);
    (extrap, (extrap - fine).abs().max(f64::EPSILON * fine.abs()))
}
