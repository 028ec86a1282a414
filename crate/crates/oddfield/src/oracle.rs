//! Independent brute-force evaluators used by tests, the verification
//! suites and the shifted-endpoint potential route.
//!
//! Nothing here shares numerical machinery with the primary pipeline: the
//! integrator is a self-contained adaptive Simpson rule and the root finder
//! is plain bisection, so agreement between an oracle and the primary path
//! is evidence, not tautology.

use crate::error::{Error, Result};
use crate::spacetime::{Dimension, LorentzVector};
use crate::worldline::Worldline;

/// Result of an oracle evaluation with its own error estimate and a tag
/// describing the method.
#[derive(Debug, Clone)]
pub struct OracleResult<T> {
    pub value: T,
    pub est_error: f64,
    pub method: &'static str,
}

/// Plain bisection on [lo, hi]; requires a sign change and tol > 0.
pub fn bisect_root<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bisection tolerance must be positive, got {tol}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::InvalidArgument(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
        if (b - a).abs() <= tol {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// Adaptive Simpson rule, independent of the Gauss–Legendre engine used by
/// the primary pipeline. Subdivision stops at the tolerance, the roundoff
/// floor, or a global work budget, carrying the residual into the error
/// estimate.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    use std::cell::Cell;
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
        budget: &Cell<i64>,
    ) -> Result<(f64, f64)> {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        budget.set(budget.get() - 2);
        let delta = left + right - whole;
        if delta.is_nan() {
            return Err(Error::QuadratureFailure(format!(
                "integrand is not finite on [{a:.6e}, {b:.6e}]"
            )));
        }
        let floor = 8.0 * f64::EPSILON * (left.abs() + right.abs());
        if delta.abs() <= 15.0 * tol
            || delta.abs() <= floor
            || (b - a).abs() < 1e-300
            || depth == 0
            || budget.get() < 0
        {
            return Ok((left + right + delta / 15.0, delta.abs() / 15.0));
        }
        let (lv, le) = recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1, budget)?;
        let (rv, re) = recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1, budget)?;
        Ok((lv + rv, le + re))
    }
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    let budget = Cell::new(100_000i64);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 60, &budget)
}

/// Exact finite part of ∫_{−∞}^0 dθ/sinh^{2n}θ from the closed-form
/// antiderivative.
///
/// With c = coth θ, ∫ csch^{2n}θ dθ = −∫ (c²−1)^{n−1} dc, an odd polynomial
/// in c with no constant term. The expansion of coth(−ε) has only odd powers
/// of ε, so after removing the poles the finite part at θ → 0⁻ is exactly
/// zero and the value reduces to the θ → −∞ limit (c → −1):
/// (−1)^n 2^{n−1} (n−1)! / (2n−1)!!.
pub fn fp_sinh_oracle(n: usize) -> f64 {
    assert!(n >= 1);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut num = 2f64.powi(n as i32 - 1);
    for k in 1..n {
        num *= k as f64;
    }
    let mut dfact = 1.0;
    let mut i = 2 * n as i64 - 1;
    while i >= 2 {
        dfact *= i as f64;
        i -= 2;
    }
    sign * num / dfact
}

/// Antiderivative of csch^{2n}θ as the coth-polynomial −∫₀^{coth θ}(t²−1)^{n−1}dt;
/// used to cross-check the pole-subtraction route in tests.
pub fn csch_antiderivative(n: usize, theta: f64) -> f64 {
    let c = 1.0 / theta.tanh();
    // expand (t^2-1)^{n-1} binomially and integrate term by term
    let mut acc = 0.0;
    let mut binom = 1.0;
    for k in 0..n {
        if k > 0 {
            binom *= (n - k) as f64 / k as f64;
        }
        let sign = if (n - 1 - k) % 2 == 0 { 1.0 } else { -1.0 };
        acc += binom * sign * c.powi(2 * k as i32 + 1) / (2.0 * k as f64 + 1.0);
    }
    -acc
}

/// Proper time s₋(a) where the shifted lightcone condition −R² + a = 0
/// holds on the retarded branch.
pub fn shifted_endpoint(w: &Worldline, x: &LorentzVector, a: f64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "shift must be non-negative, got {a}"
        )));
    }
    w.level_set_root(x, -a)
}

/// Integrates `f` over [lo, hi] with the panels splitting geometrically away
/// from `hi`, so very wide ranges do not starve the adaptive recursion.
fn simpson_geometric<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let width = hi - lo;
    let mut edges = vec![hi];
    let mut d = width.min(1.0);
    while d < width {
        edges.push(hi - d);
        d *= 2.0;
    }
    edges.push(lo);
    let mut value = 0.0;
    let mut err = 0.0;
    for pair in edges.windows(2) {
        let (v, e) = adaptive_simpson(f, pair[1], pair[0], tol / edges.len() as f64)?;
        value += v;
        err += e;
    }
    Ok((value, err))
}

/// Direct s-space integral ∫_{s_cut}^{s₋(a)} v^μ(s) (−R²(s) + a)^{−1/2} ds.
///
/// Away from the endpoint the integrand is evaluated in s directly. Near
/// s₋(a), where −R² + a vanishes and its floating-point evaluation loses all
/// relative precision, the zone is reparameterized by ν = sqrt(−R² + a):
/// ds = 2ν dν / |dλ/ds| turns the integrand into v^μ/|R·v|, smooth and
/// cancellation-free, with s(ν) recovered by the level-set solver. The lower
/// limit is an explicit regulator: the full integral diverges
/// (logarithmically for uniform motion), and only shift-derivatives of it
/// are physical.
pub fn direct_s_integral(
    x: &LorentzVector,
    w: &Worldline,
    dim: &Dimension,
    a: f64,
    s_cut: f64,
) -> Result<OracleResult<LorentzVector>> {
    dim.check_len(x)?;
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "direct_s_integral requires a > 0, got {a}"
        )));
    }
    let s_ret = w.retarded_root(x, dim)?;
    let s_minus = shifted_endpoint(w, x, a)?;
    if !(s_cut < s_minus) {
        return Err(Error::InvalidArgument(format!(
            "s_cut = {s_cut} must lie below the endpoint s_minus = {s_minus}"
        )));
    }
    let d = dim.d();
    let v_of = |s: f64| w.eval(s).expect("finite s").v;
    let phi = |s: f64| w.lambda_at(x, s) + a;

    let s_far = s_minus - (s_minus - s_cut).min(1.0);
    let nu_max = phi(s_far).sqrt();

    let mut value = vec![0.0; d];
    let mut err = 0.0;
    for mu in 0..d {
        // endpoint zone in nu = sqrt(-R^2 + a): integrand v/|R.v|
        let near = |nu: f64| {
            let s = w
                .level_set_root_from(x, nu * nu - a, s_ret)
                .expect("level set inside the bracketed zone");
            let k = w.eval(s).expect("finite s");
            let r = x - &k.z;
            k.v[mu] / r.mdot(&k.v).abs()
        };
        let (v1, e1) = adaptive_simpson(&near, 0.0, nu_max, 1e-13)?;
        // far zone, direct in s
        let far = |s: f64| v_of(s)[mu] / phi(s).sqrt();
        let (v2, e2) = simpson_geometric(&far, s_cut, s_far, 1e-13)?;
        value[mu] = v1 + v2;
        err += e1 + e2;
    }
    Ok(OracleResult {
        value: LorentzVector::new(value),
        est_error: err,
        method: "direct-s-simpson",
    })
}

/// Difference integral J^μ(a) = I^μ(a) − I^μ(0) where
/// I^μ(a) = ∫_{−∞}^{s₋(a)} v^μ (−R²+a)^{−1/2} ds.
///
/// The regulator-dependent divergence of I is independent of a, so it
/// cancels exactly in the difference; J is convergent and is what the
/// shift-derivative stencils actually consume (their weights sum to zero,
/// making the I(0) offset irrelevant).
pub fn shifted_difference_integral(
    x: &LorentzVector,
    w: &Worldline,
    dim: &Dimension,
    a: f64,
) -> Result<OracleResult<LorentzVector>> {
    dim.check_len(x)?;
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "shift must be positive, got {a}"
        )));
    }
    let d = dim.d();
    let s_ret = w.retarded_root(x, dim)?;
    // fail early when the shifted endpoint does not exist (shift beyond the
    // spacelike waist of the branch)
    shifted_endpoint(w, x, a)?;
    let lambda_of = |s: f64| w.lambda_at(x, s);
    let v_of = |s: f64| w.eval(s).expect("finite s").v;

    // stable difference of the two inverse square roots, premultiplied by
    // sqrt(lambda) (the form the mu-parameterized near zone needs)
    let delta = |lam: f64| -> f64 {
        let sa = (lam + a).sqrt();
        let s0 = lam.sqrt();
        -a / (sa * s0 * (sa + s0))
    };

    // far cut: march back until lambda is huge but still far from overflow
    // (the velocity components must stay representable)
    const LAMBDA_CAP: f64 = 1e30;
    let mut s_cut = s_ret - (1.0 + s_ret.abs());
    let mut tries = 0;
    while lambda_of(s_cut) < LAMBDA_CAP {
        s_cut = s_ret - 2.0 * (s_ret - s_cut);
        tries += 1;
        if tries > 140 {
            break;
        }
    }
    let tail_bound = {
        let lam = lambda_of(s_cut);
        let vmax = v_of(s_cut).norm_inf();
        vmax * a * lam.powf(-1.5) * 2.0 * (s_ret - s_cut).abs()
    };

    let s_far = s_ret - (s_ret - s_cut).min(1.0);
    let lam_split = lambda_of(s_far);

    let mut value = vec![0.0; d];
    let mut err = tail_bound;
    for mu in 0..d {
        // zone A near (lambda in (0, lam_split]), parameterized by
        // mu_v = sqrt(lambda) so both the weight and the difference kernel
        // are evaluated without cancellation:
        //   integrand = -a v / [ sqrt(mu^2+a) (mu + sqrt(mu^2+a)) |R.v| ]
        let near_a = |m: f64| {
            let s = w
                .level_set_root_from(x, m * m, s_ret)
                .expect("level set inside the bracketed zone");
            let k = w.eval(s).expect("finite s");
            let r = x - &k.z;
            let rv = r.mdot(&k.v).abs();
            let sa = (m * m + a).sqrt();
            -a * k.v[mu] / (sa * (m + sa) * rv)
        };
        let (va, ea) = adaptive_simpson(&near_a, 0.0, lam_split.sqrt(), 1e-13)?;
        // zone A far: direct in s, geometric panels toward the deep past
        let far_a = |s: f64| v_of(s)[mu] * delta(lambda_of(s));
        let (vb, eb) = simpson_geometric(&far_a, s_cut, s_far, 1e-13)?;
        // zone B (lambda in [-a, 0]): nu = sqrt(lambda + a) gives v/|R.v|
        let near_b = |nu: f64| {
            let s = w
                .level_set_root_from(x, nu * nu - a, s_ret)
                .expect("level set inside the bracketed zone");
            let k = w.eval(s).expect("finite s");
            let r = x - &k.z;
            k.v[mu] / r.mdot(&k.v).abs()
        };
        let (vc, ec) = adaptive_simpson(&near_b, 0.0, a.sqrt(), 1e-13)?;
        value[mu] = va + vb + vc;
        err += ea + eb + ec;
    }
    Ok(OracleResult {
        value: LorentzVector::new(value),
        est_error: err,
        method: "shifted-difference-simpson",
    })
}
