//! Retarded Green-function machinery for odd D = 2n + 3.
//!
//! The retarded kernel is the n-th derivative of the half-power
//! distribution θ(λ)/√λ in the invariant λ = −x², normalized by 1/Ω_D.
//! Three numerical primitives implement it:
//!
//! * `half_power_derivative` — the closed-form n-th λ-derivative of λ^{−1/2};
//! * `fp_sinh_integral` — the Hadamard finite part of ∫_{−∞}^0 dθ/sinh^{2n}θ,
//!   the dimension-dependent constant left after the hyperbolic substitution
//!   in the uniform-motion integral;
//! * `fp_integral` — the finite-part pairing FP ∫₀^∞ g(λ)(d/dλ)^n[θ(λ)λ^{−1/2}]dλ,
//!   evaluated as (−1)^n ∫₀^∞ g⁽ⁿ⁾(λ) λ^{−1/2} dλ after n integrations by
//!   parts with the boundary terms regularized to zero.
//!
//! The λ = u² substitution removes the integrable endpoint singularity, so
//! a standard adaptive rule applies. Upper limits are truncated at
//! `lambda_max`; decaying integrand families get an exact tail by a second
//! change of variable (see `sqrt_weight_integral_vec`).

use crate::error::{Error, Result};
use crate::quad;
use crate::spacetime::Dimension;
use serde::Serialize;

/// A value with a propagated numerical error estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub est_error: f64,
}

/// Endpoint treatment of the λ^{−1/2} weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Substitution {
    /// λ = u², turning the weight into a smooth factor (default).
    Sqrt,
    /// Integrate in λ directly with panels refined toward 0.
    None,
}

/// Parameters for the finite-part quadratures.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadratureSpec {
    /// Truncation of the upper integration limit in λ.
    pub lambda_max: f64,
    /// Relative tolerance target for the quadrature.
    pub rel_tol: f64,
    /// Half-integer pole order encoded as n (pole λ^{−(n+1/2)}).
    pub pole_order: usize,
    /// Endpoint regularization.
    pub substitution: Substitution,
}

impl QuadratureSpec {
    pub fn new(
        lambda_max: f64,
        rel_tol: f64,
        pole_order: usize,
        substitution: Substitution,
    ) -> Result<Self> {
        if !(lambda_max > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lambda_max must be positive, got {lambda_max}"
            )));
        }
        if !(rel_tol > 0.0 && rel_tol <= 1e-2) {
            return Err(Error::InvalidArgument(format!(
                "rel_tol must lie in (0, 1e-2], got {rel_tol}"
            )));
        }
        if pole_order < 1 {
            return Err(Error::InvalidArgument(
                "pole order n must be >= 1".into(),
            ));
        }
        Ok(QuadratureSpec {
            lambda_max,
            rel_tol,
            pole_order,
            substitution,
        })
    }

    /// Defaults sized for the dimension: λ_max = 10⁴, rel_tol = 10⁻⁹,
    /// pole order n, sqrt substitution.
    pub fn for_dimension(dim: &Dimension) -> Self {
        QuadratureSpec {
            lambda_max: 1e4,
            rel_tol: 1e-9,
            pole_order: dim.n(),
            substitution: Substitution::Sqrt,
        }
    }

    pub fn with_lambda_max(mut self, lambda_max: f64) -> Result<Self> {
        if !(lambda_max > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lambda_max must be positive, got {lambda_max}"
            )));
        }
        self.lambda_max = lambda_max;
        Ok(self)
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-2) {
            return Err(Error::InvalidArgument(format!(
                "rel_tol must lie in (0, 1e-2], got {rel_tol}"
            )));
        }
        self.rel_tol = rel_tol;
        Ok(self)
    }
}

/// k!! with the empty-product convention (−1)!! = 0!! = 1.
pub fn double_factorial(k: i64) -> Result<u64> {
    if k < -1 {
        return Err(Error::InvalidArgument(format!(
            "double factorial requires k >= -1, got {k}"
        )));
    }
    let mut acc: u64 = 1;
    let mut i = k;
    while i >= 2 {
        acc = acc.checked_mul(i as u64).ok_or_else(|| {
            Error::InvalidArgument(format!("double factorial overflow at k = {k}"))
        })?;
        i -= 2;
    }
    Ok(acc)
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// n-th λ-derivative of λ^{−1/2}:
/// (d/dλ)^n λ^{−1/2} = (−1)^n (2n−1)!!/2^n · λ^{−n−1/2}, λ > 0.
pub fn half_power_derivative(n: usize, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "half_power_derivative requires lambda > 0, got {lambda}"
        )));
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let df = double_factorial(2 * n as i64 - 1)? as f64;
    Ok(sign * df / 2f64.powi(n as i32) * lambda.powf(-(n as f64) - 0.5))
}

// --- power-series helpers for the sinh Laurent expansion ------------------

/// Coefficients c_j of the even series Σ c_j θ^{2j} for (θ/sinh θ)^{2n},
/// computed by inverting the series of sinh(θ)/θ and raising to the 2n-th
/// power. csch^{2n}θ = Σ_j c_j θ^{2j−2n}.
fn csch_power_series(n: usize, terms: usize) -> Vec<f64> {
    // sinh(theta)/theta = sum theta^{2m} / (2m+1)!
    let mut s = vec![0.0; terms];
    let mut f = 1.0;
    for (m, sm) in s.iter_mut().enumerate() {
        if m > 0 {
            f *= (2 * m) as f64 * (2 * m + 1) as f64;
        }
        *sm = 1.0 / f;
    }
    // reciprocal of the even series
    let mut r = vec![0.0; terms];
    r[0] = 1.0;
    for k in 1..terms {
        let mut acc = 0.0;
        for j in 0..k {
            acc += r[j] * s[k - j];
        }
        r[k] = -acc;
    }
    // raise to the 2n-th power
    let mut p = vec![0.0; terms];
    p[0] = 1.0;
    for _ in 0..2 * n {
        let mut q = vec![0.0; terms];
        for i in 0..terms {
            if p[i] == 0.0 {
                continue;
            }
            for j in 0..terms - i {
                q[i + j] += p[i] * r[j];
            }
        }
        p = q;
    }
    p
}

/// Hadamard finite part of ∫_{−∞}^0 dθ / sinh^{2n}θ.
///
/// The divergence at θ → 0⁻ carries pole terms of orders ε^{−(2k−1)},
/// k = 1..n, and no constant, so the finite part is well defined. The
/// implementation integrates on [theta_min, −ε] with the pole polynomial
/// subtracted in exact form, extrapolates the ε-ladder to ε → 0
/// (Richardson on the ε, ε³ error structure), and adds the analytic tail
/// for (−∞, theta_min).
pub fn fp_sinh_integral(n: usize, theta_min: f64) -> Result<Estimate> {
    if n < 1 {
        return Err(Error::InvalidArgument(
            "fp_sinh_integral requires n >= 1".into(),
        ));
    }
    if !(theta_min < 0.0) || !theta_min.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "theta_min must be a finite negative number, got {theta_min}"
        )));
    }
    let terms = n + 12;
    let series = csch_power_series(n, terms);

    // pole polynomial: poly(theta) = sum_{j<n} c_j theta^{2j-2n}
    let pole_poly = |theta: f64| -> f64 {
        let mut acc = 0.0;
        for (j, c) in series.iter().take(n).enumerate() {
            acc += c * theta.powi(2 * j as i32 - 2 * n as i32);
        }
        acc
    };
    // its exact antiderivative; at −ε this is precisely the pole sum P(ε)
    let pole_anti = |theta: f64| -> f64 {
        let mut acc = 0.0;
        for (j, c) in series.iter().take(n).enumerate() {
            let p = 2 * j as i32 - 2 * n as i32 + 1;
            acc += c * theta.powi(p) / p as f64;
        }
        acc
    };
    // regularized integrand; series evaluation near 0 avoids cancellation
    let regular = |theta: f64| -> f64 {
        if theta.abs() < 0.5 {
            let t2 = theta * theta;
            let mut acc = 0.0;
            let mut pw = 1.0;
            for c in series.iter().skip(n) {
                acc += c * pw;
                pw *= t2;
            }
            acc
        } else {
            let csch = 1.0 / theta.sinh();
            csch.powi(2 * n as i32) - pole_poly(theta)
        }
    };

    let eps0 = 0.4f64.min(theta_min.abs() / 4.0);
    let ladder: Vec<f64> = (0..6).map(|k| eps0 / 2f64.powi(k)).collect();
    let mut s_vals = Vec::with_capacity(ladder.len());
    let mut quad_err = 0.0f64;
    for &eps in &ladder {
        let breaks: Vec<f64> = {
            let mut b = vec![theta_min];
            let mut t = -8.0f64.min(theta_min.abs() / 2.0);
            while t < -eps {
                if t > theta_min {
                    b.push(t);
                }
                t *= 0.5;
            }
            b.push(-eps);
            b
        };
        let (v, e) = quad::adaptive_panels(&regular, &breaks, 1e-13)?;
        quad_err = quad_err.max(e);
        // N(eps) - P(eps) = regular integral - pole antiderivative at theta_min
        s_vals.push(v - pole_anti(theta_min));
    }
    // Richardson: eliminate the eps then the eps^3 error terms
    let r1: Vec<f64> = s_vals.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
    let r2: Vec<f64> = r1.windows(2).map(|w| (8.0 * w[1] - w[0]) / 7.0).collect();
    let last = *r2.last().unwrap();
    let prev = r2[r2.len() - 2];
    let conv = (last - prev).abs();
    if conv > 1e-8 * (1.0 + last.abs()) {
        return Err(Error::ExtrapolationFailure(format!(
            "fp_sinh_integral ladder did not converge: {s_vals:?} -> {r2:?}"
        )));
    }

    // analytic tail for (-inf, theta_min): csch^{2n} = 2^{2n} sum_m
    // binom(2n+m-1, m) e^{(2n+2m)theta}
    let mut tail = 0.0;
    let mut binom = 1.0;
    for m in 0..64 {
        if m > 0 {
            binom *= (2 * n + m - 1) as f64 / m as f64;
        }
        let term = 2f64.powi(2 * n as i32) * binom
            * ((2 * n + 2 * m) as f64 * theta_min).exp()
            / (2 * n + 2 * m) as f64;
        tail += term;
        if term.abs() < 1e-18 * (1.0 + tail.abs()) {
            break;
        }
    }

    Ok(Estimate {
        value: last + tail,
        est_error: conv + quad_err,
    })
}

// --- finite-part lambda integrals ------------------------------------------

/// Truncation heuristics shared by the λ-integral drivers.
struct TailProbe {
    decaying: bool,
    estimate: f64,
}

fn probe_tail<F: Fn(f64) -> Result<f64>>(f: &F, umax: f64) -> Result<TailProbe> {
    let f1 = f(0.5 * umax)?.abs();
    let f2 = f(umax)?.abs();
    // require a clear power-law drop before trusting the reciprocal-variable
    // tail; borderline or growing integrands are truncated instead
    if f2 < 0.5 * f1 {
        let q = (f1 / f2.max(1e-300)).log2();
        Ok(TailProbe {
            decaying: true,
            estimate: f2 * umax / (q - 1.0).max(0.1),
        })
    } else {
        Ok(TailProbe {
            decaying: false,
            estimate: f1.max(f2) * umax,
        })
    }
}

/// ∫₀^∞ f(λ) λ^{−1/2} dλ for a vector-valued integrand, via λ = u² on
/// [0, √λ_max] plus (optionally) the exact tail in the reciprocal variable
/// w = 1/u. Returns the integral and an absolute error estimate.
pub(crate) fn sqrt_weight_integral_vec<F>(
    f: &F,
    d: usize,
    lambda_max: f64,
    rel_tol: f64,
    with_tail: bool,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let umax = lambda_max.sqrt();
    let integrand = |u: f64| -> Result<Vec<f64>> {
        let mut v = f(u * u)?;
        for c in v.iter_mut() {
            *c *= 2.0;
        }
        Ok(v)
    };
    let breaks = quad::geometric_breaks(0.0, 1.0f64.min(umax), umax, 2.0);
    // first pass for the scale, then an adaptive pass with an absolute target
    let (rough, _) = quad::adaptive_panels_vec(&integrand, &breaks, d, f64::INFINITY)?;
    let scale = rough.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1e-300);
    let abs_tol = rel_tol * scale;
    let (mut value, mut err) = quad::adaptive_panels_vec(&integrand, &breaks, d, abs_tol)?;

    if with_tail {
        let (tail, te) = reciprocal_tail_vec(f, d, lambda_max, rel_tol)?;
        for (acc, t) in value.iter_mut().zip(&tail) {
            *acc += t;
        }
        err += te;
    }
    Ok((value, err))
}

/// Exact tail ∫_{λ_max}^∞ f(λ) λ^{−1/2} dλ by the reciprocal substitution
/// u = 1/w of the u-space integral:
/// ∫_{√λ_max}^∞ 2 f(u²) du = ∫_0^{1/√λ_max} 2 f(w^{−2}) w^{−2} dw,
/// smooth at w → 0 for integrands that decay faster than λ^{−1/2}.
pub(crate) fn reciprocal_tail_vec<F>(
    f: &F,
    d: usize,
    lambda_max: f64,
    rel_tol: f64,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let w_hi = 1.0 / lambda_max.sqrt();
    let w_lo = w_hi * 1e-4;
    let tail_integrand = |w: f64| -> Result<Vec<f64>> {
        let mut v = f(1.0 / (w * w))?;
        for c in v.iter_mut() {
            *c *= 2.0 / (w * w);
        }
        Ok(v)
    };
    let (rough, _) = quad::adaptive_vec(&tail_integrand, w_lo, w_hi, d, f64::INFINITY, 1)?;
    let scale = rough.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1e-300);
    let (tail, te) = quad::adaptive_vec(&tail_integrand, w_lo, w_hi, d, rel_tol * scale, 40)?;
    // remainder below w_lo bounded by the integrand size there
    let probe = tail_integrand(w_lo)?;
    let rem = probe.iter().fold(0.0f64, |m, c| m.max(c.abs())) * w_lo;
    Ok((tail, te + rem))
}

fn sqrt_weight_integral_scalar<F>(
    f: &F,
    lambda_max: f64,
    rel_tol: f64,
    with_tail: bool,
) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64>,
{
    let wrapped = |lam: f64| -> Result<Vec<f64>> { Ok(vec![f(lam)?]) };
    let (v, e) = sqrt_weight_integral_vec(&wrapped, 1, lambda_max, rel_tol, with_tail)?;
    Ok(Estimate {
        value: v[0],
        est_error: e,
    })
}

/// λ-direct variant (no substitution): panels refined geometrically toward
/// the integrable λ^{−1/2} endpoint, with the last sliver [0, λ₀] added in
/// closed form from the locally constant integrand.
fn direct_weight_integral<F>(f: &F, lambda_max: f64, rel_tol: f64) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64>,
{
    let integrand = |lam: f64| -> Result<Vec<f64>> { Ok(vec![f(lam)? / lam.sqrt()]) };
    let lam0 = 1e-24 * lambda_max.max(1.0);
    let mut breaks = vec![lam0];
    let mut x = lam0 * 10.0;
    while x < lambda_max {
        breaks.push(x);
        x *= 4.0;
    }
    breaks.push(lambda_max);
    let (rough, _) = quad::adaptive_panels_vec(&integrand, &breaks, 1, f64::INFINITY)?;
    let scale = rough[0].abs().max(1e-300);
    let (v, e) = quad::adaptive_panels_vec(&integrand, &breaks, 1, rel_tol * scale)?;
    let sliver = 2.0 * lam0.sqrt() * f(lam0)?;
    Ok(Estimate {
        value: v[0] + sliver,
        est_error: e + sliver.abs() * 1e-3,
    })
}

/// Numeric n-th derivative of `g` at λ with the stencil kept above `floor`.
pub(crate) fn lambda_derivative<G: Fn(f64) -> f64>(
    g: &G,
    n: usize,
    lambda: f64,
    floor: Option<f64>,
) -> (f64, f64) {
    let h = 3e-3 * (1.0 + lambda.abs());
    quad::stencil_derivative(g, lambda, n, n + 4, h, floor)
}

/// Vector-valued n-th λ-derivative with all components sharing one stencil,
/// so the (possibly expensive) evaluation of `g` runs once per node.
/// Richardson-refined; returns the derivative and a max-norm error estimate.
pub(crate) fn vector_lambda_derivative<G>(
    g: &G,
    d: usize,
    n: usize,
    lambda: f64,
    floor: f64,
) -> Result<(Vec<f64>, f64)>
where
    G: Fn(f64) -> Result<Vec<f64>>,
{
    let npts = n + 4;
    let h0 = 3e-3 * (1.0 + lambda.abs());
    let eval = |h: f64| -> Result<Vec<f64>> {
        let half = (npts - 1) as f64 / 2.0;
        let mut start = lambda - half * h;
        if start < floor {
            start = floor.min(lambda);
        }
        let nodes: Vec<f64> = (0..npts).map(|j| start + j as f64 * h).collect();
        let w = quad::fd_weights(lambda, &nodes, n);
        let mut acc = vec![0.0; d];
        for (xj, wj) in nodes.iter().zip(&w) {
            let gj = g(*xj)?;
            for (a, c) in acc.iter_mut().zip(&gj) {
                *a += wj * c;
            }
        }
        Ok(acc)
    };
    let coarse = eval(h0)?;
    let fine = eval(0.5 * h0)?;
    let p = (npts - n) as i32;
    let factor = 2f64.powi(p);
    let mut out = vec![0.0; d];
    let mut err = 0.0f64;
    for i in 0..d {
        out[i] = (factor * fine[i] - coarse[i]) / (factor - 1.0);
        err = err.max((out[i] - fine[i]).abs());
    }
    Ok((out, err))
}

/// FP ∫₀^∞ g(λ) (d/dλ)^n [θ(λ) λ^{−1/2}] dλ, evaluated after n integrations
/// by parts with the boundary terms regularized to zero:
/// (−1)^n ∫₀^{λ_max} g⁽ⁿ⁾(λ) λ^{−1/2} dλ.
///
/// The n-th derivative of `g` is estimated by finite-difference stencils
/// (order 4, Richardson refined) kept on λ ≥ 0; use
/// [`fp_integral_with_derivative`] when g⁽ⁿ⁾ is available in closed form.
/// The upper limit is truncated at `spec.lambda_max`; for integrands that do
/// not decay the truncated value is returned with the tail reflected in
/// `est_error`, while a decaying integrand whose projected tail exceeds
/// `rel_tol` is reported as a quadrature failure.
pub fn fp_integral<G: Fn(f64) -> f64>(
    g: G,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if n < 1 {
        return Err(Error::InvalidArgument("fp_integral requires n >= 1".into()));
    }
    let stencil_err = std::cell::Cell::new(0.0f64);
    let gn = |lam: f64| -> Result<f64> {
        let (v, e) = lambda_derivative(&g, n, lam, Some(0.0));
        stencil_err.set(stencil_err.get().max(e));
        Ok(v)
    };
    let est = fp_integral_impl(&gn, n, spec)?;
    Ok(Estimate {
        value: est.value,
        est_error: est.est_error + stencil_err.get() * spec.lambda_max.sqrt(),
    })
}

/// Same pairing as [`fp_integral`] with the n-th derivative g⁽ⁿ⁾ supplied
/// analytically.
pub fn fp_integral_with_derivative<G: Fn(f64) -> f64>(
    g_deriv_n: G,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if n < 1 {
        return Err(Error::InvalidArgument("fp_integral requires n >= 1".into()));
    }
    let gn = |lam: f64| -> Result<f64> { Ok(g_deriv_n(lam)) };
    fp_integral_impl(&gn, n, spec)
}

fn fp_integral_impl<G: Fn(f64) -> Result<f64>>(
    gn: &G,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    // probe the u-space integrand at the truncation edge: decaying tails are
    // integrated exactly in the reciprocal variable, anything else is
    // truncated at lambda_max with the projected remainder reported
    let umax = spec.lambda_max.sqrt();
    let uf = |u: f64| -> Result<f64> { Ok(2.0 * gn(u * u)?) };
    let probe = probe_tail(&uf, umax)?;
    let base = match spec.substitution {
        Substitution::Sqrt => sqrt_weight_integral_scalar(
            gn,
            spec.lambda_max,
            spec.rel_tol,
            probe.decaying,
        )?,
        Substitution::None => {
            let trunc = direct_weight_integral(gn, spec.lambda_max, spec.rel_tol)?;
            if probe.decaying {
                // the tail is substitution independent
                let wrapped = |lam: f64| -> Result<Vec<f64>> { Ok(vec![gn(lam)?]) };
                let (t, te) = reciprocal_tail_vec(&wrapped, 1, spec.lambda_max, spec.rel_tol)?;
                Estimate {
                    value: trunc.value + t[0],
                    est_error: trunc.est_error + te,
                }
            } else {
                trunc
            }
        }
    };
    let tail_unaccounted = if probe.decaying { 0.0 } else { probe.estimate };
    Ok(Estimate {
        value: sign * base.value,
        est_error: base.est_error + tail_unaccounted,
    })
}

/// Dimensional constant of the uniform-motion closed-form potential.
///
/// Assembled from the hyperbolic-substitution chain: the substitution
/// s + b·x = −r cosh θ turns the n-th shifted derivative of the inverse
/// square root into
///
///   (−1)^n · (2n−1)!!/2^n · 1/(r^{2n} Ω_D) · ∫_{−∞}^0 dθ/sinh^{2n}θ,
///
/// with ds = r·|sinh θ|dθ on the retarded branch, so
/// C = (−1)^n (2n−1)!!/2^n · fp_sinh_integral(n) / Ω_D. Since the finite
/// part equals (−1)^n 2^{n−1}(n−1)!/(2n−1)!!, the product collapses to
/// C = (n−1)!/(2 Ω_D) > 0. Cross-validated against the λ-space quadrature
/// route in the potentials module.
pub fn coefficient_c(dim: &Dimension) -> Result<Estimate> {
    let n = dim.n();
    let sinh = fp_sinh_integral(n, -30.0)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let df = double_factorial(2 * n as i64 - 1)? as f64;
    let factor = sign * df / 2f64.powi(n as i32) / dim.omega();
    Ok(Estimate {
        value: factor * sinh.value,
        est_error: factor.abs() * sinh.est_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use approx::assert_relative_eq;

    fn spec(n: usize) -> QuadratureSpec {
        QuadratureSpec::new(1e4, 1e-9, n, Substitution::Sqrt).unwrap()
    }

    #[test]
    fn quadrature_spec_validation() {
        assert!(QuadratureSpec::new(0.0, 1e-9, 1, Substitution::Sqrt).is_err());
        assert!(QuadratureSpec::new(1e4, 0.0, 1, Substitution::Sqrt).is_err());
        assert!(QuadratureSpec::new(1e4, 0.1, 1, Substitution::Sqrt).is_err());
        assert!(QuadratureSpec::new(1e4, 1e-9, 0, Substitution::Sqrt).is_err());
    }

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial(-1).unwrap(), 1);
        assert_eq!(double_factorial(0).unwrap(), 1);
        assert_eq!(double_factorial(3).unwrap(), 3);
        assert_eq!(double_factorial(5).unwrap(), 15);
        assert_eq!(double_factorial(7).unwrap(), 105);
        assert!(double_factorial(-2).is_err());
    }

    #[test]
    fn half_power_derivative_examples() {
        assert_relative_eq!(half_power_derivative(0, 4.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(half_power_derivative(1, 1.0).unwrap(), -0.5, epsilon = 1e-15);
        assert_relative_eq!(half_power_derivative(2, 1.0).unwrap(), 0.75, epsilon = 1e-15);
        assert!(half_power_derivative(1, 0.0).is_err());
        assert!(half_power_derivative(1, -2.0).is_err());
    }

    #[test]
    fn half_power_derivative_matches_numeric_stencils() {
        // the kernel is a pure power law, so a step proportional to lambda
        // balances truncation against roundoff uniformly over the range
        for n in 1..=3usize {
            for &lam in &[0.1, 0.5, 1.0, 3.0, 10.0] {
                let f = |l: f64| 1.0 / l.sqrt();
                let (num, _) =
                    crate::quad::stencil_derivative(&f, lam, n, n + 4, 5.5e-3 * lam, None);
                let exact = half_power_derivative(n, lam).unwrap();
                assert_relative_eq!(num, exact, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn sinh_finite_part_n1() {
        let v = fp_sinh_integral(1, -30.0).unwrap();
        assert!((v.value - (-1.0)).abs() < 1e-10, "got {}", v.value);
    }

    #[test]
    fn sinh_finite_part_n2_vs_antiderivative_oracle() {
        let v = fp_sinh_integral(2, -30.0).unwrap();
        let exact = oracle::fp_sinh_oracle(2);
        assert!((v.value - exact).abs() < 1e-9, "got {} vs {}", v.value, exact);
    }

    #[test]
    fn sinh_finite_part_theta_min_insensitive() {
        let a = fp_sinh_integral(1, -20.0).unwrap().value;
        let b = fp_sinh_integral(1, -40.0).unwrap().value;
        assert!((a - b).abs() < 1e-12);
        let a2 = fp_sinh_integral(2, -15.0).unwrap().value;
        let b2 = fp_sinh_integral(2, -35.0).unwrap().value;
        assert!((a2 - b2).abs() < 1e-10);
    }

    #[test]
    fn sinh_finite_part_rejects_bad_args() {
        assert!(fp_sinh_integral(0, -20.0).is_err());
        assert!(fp_sinh_integral(1, 0.5).is_err());
    }

    #[test]
    fn fp_integral_truncates_polynomials() {
        // g(lambda) = lambda, n = 1: (-1) * int_0^{lmax} 1 * lambda^{-1/2}
        let sp = spec(1);
        let v = fp_integral(|lam| lam, 1, &sp).unwrap();
        assert_relative_eq!(v.value, -2.0 * sp.lambda_max.sqrt(), max_relative = 1e-8);
        // large reported uncertainty for the non-decaying integrand
        assert!(v.est_error > 1.0);
    }

    #[test]
    fn fp_integral_kills_constants() {
        let v = fp_integral(|_| 3.25, 1, &spec(1)).unwrap();
        assert!(v.value.abs() < 1e-10);
    }

    #[test]
    fn fp_integral_beta_family() {
        // g = (r^2+lambda)^{-1/2}; closed forms from the Beta function:
        // n=1: (1/2) B(1/2,1) r^{-2},  n=2: (3/4) B(1/2,2) r^{-4}
        let v = fp_integral(|lam: f64| 1.0 / (1.0 + lam).sqrt(), 1, &spec(1)).unwrap();
        assert_relative_eq!(v.value, 1.0, max_relative = 1e-8);
        let v2 = fp_integral(|lam: f64| 1.0 / (4.0 + lam).sqrt(), 1, &spec(1)).unwrap();
        assert_relative_eq!(v2.value, 0.25, max_relative = 1e-8);
        let v3 = fp_integral(|lam: f64| 1.0 / (4.0 + lam).sqrt(), 2, &spec(2)).unwrap();
        assert_relative_eq!(v3.value, 0.0625, max_relative = 1e-8);
    }

    #[test]
    fn fp_integral_analytic_derivative_path() {
        // same family with the derivative supplied in closed form
        let v = fp_integral_with_derivative(
            |lam: f64| -0.5 * (1.0 + lam).powf(-1.5),
            1,
            &spec(1),
        )
        .unwrap();
        assert_relative_eq!(v.value, 1.0, max_relative = 1e-10);
        let v2 = fp_integral_with_derivative(
            |lam: f64| 0.75 * (4.0 + lam).powf(-2.5),
            2,
            &spec(2),
        )
        .unwrap();
        assert_relative_eq!(v2.value, 0.0625, max_relative = 1e-10);
    }

    #[test]
    fn fp_integral_direct_substitution_agrees() {
        let sp = QuadratureSpec::new(1e4, 1e-9, 1, Substitution::None).unwrap();
        let v = fp_integral_with_derivative(|lam: f64| -0.5 * (1.0 + lam).powf(-1.5), 1, &sp)
            .unwrap();
        assert_relative_eq!(v.value, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn coefficient_c_values() {
        let d5 = Dimension::new(5).unwrap();
        let c5 = coefficient_c(&d5).unwrap();
        // composed: (-1)^1 * (1/2) * (1/Omega) * (-1) = 1/(2 Omega)
        assert_relative_eq!(c5.value, 1.0 / (2.0 * d5.omega()), max_relative = 1e-9);
        assert!(c5.value > 0.0);

        let d7 = Dimension::new(7).unwrap();
        let c7 = coefficient_c(&d7).unwrap();
        assert_relative_eq!(c7.value, 1.0 / (2.0 * d7.omega()), max_relative = 1e-8);
    }

    #[test]
    fn coefficient_c_scales_inversely_with_omega() {
        let base = Dimension::new(5).unwrap();
        let doubled = Dimension::with_omega(5, 2.0 * base.omega()).unwrap();
        let c0 = coefficient_c(&base).unwrap().value;
        let c1 = coefficient_c(&doubled).unwrap().value;
        assert_relative_eq!(c1, 0.5 * c0, max_relative = 1e-12);
    }
}
