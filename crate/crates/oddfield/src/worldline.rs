//! Proper-time-parameterized source trajectories.
//!
//! Two analytic worldline families are built in:
//!
//! * uniform motion, z(s) = b·s with b·b = −1 and b⁰ > 0;
//! * hyperbolic motion with proper acceleration g along one spatial axis,
//!   z⁰(s) = sinh(gs)/g, z^a(s) = cosh(gs)/g.
//!
//! Besides kinematics the module solves the retarded condition R(s)² = 0
//! (R = x − z(s), R⁰ > 0) and, more generally, inverts the level set
//! −R(s)² = λ on the retarded branch. The gradient of that inverse,
//! ∂s/∂x^μ = R_μ/(R·v), is what makes the substituted integrand depend on
//! the observation point; it is returned in covariant components.

use crate::error::{Error, Result};
use crate::spacetime::{Dimension, LorentzVector};

/// Normalization tolerance accepted for unit timelike velocities.
const B_NORM_TOL: f64 = 1e-10;

/// Position, velocity and acceleration at one proper time.
#[derive(Debug, Clone)]
pub struct Kinematics {
    pub z: LorentzVector,
    pub v: LorentzVector,
    pub a: LorentzVector,
}

/// Separation R = x − z(s) together with the proper time it was taken at.
#[derive(Debug, Clone)]
pub struct SeparationVector {
    pub r: LorentzVector,
    pub s: f64,
}

/// A source trajectory parameterized by proper time.
#[derive(Debug, Clone)]
pub enum Worldline {
    Uniform { b: LorentzVector },
    Hyperbolic { g: f64, axis: usize, d: usize },
}

impl Worldline {
    /// Uniform motion with constant velocity b, validated to satisfy
    /// b·b = −1 (within 1e−10) and b⁰ > 0.
    pub fn uniform(b: LorentzVector, dim: &Dimension) -> Result<Self> {
        dim.check_len(&b)?;
        let b2 = b.mdot(&b);
        if (b2 + 1.0).abs() > B_NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "uniform velocity must satisfy b.b = -1, got {b2}"
            )));
        }
        if b[0] <= 0.0 {
            return Err(Error::InvalidArgument(
                "uniform velocity must be future-pointing (b0 > 0)".into(),
            ));
        }
        Ok(Worldline::Uniform { b })
    }

    /// Uniform motion given as a spatial velocity β (|β| < 1), converted to
    /// b = γ(1, β).
    pub fn uniform_from_beta(beta: &[f64], dim: &Dimension) -> Result<Self> {
        if beta.len() != dim.d() - 1 {
            return Err(Error::DimensionMismatch {
                expected: dim.d() - 1,
                got: beta.len(),
            });
        }
        let beta2: f64 = beta.iter().map(|c| c * c).sum();
        if beta2 >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "|beta| must be < 1, got |beta|^2 = {beta2}"
            )));
        }
        let gamma = 1.0 / (1.0 - beta2).sqrt();
        let mut comps = Vec::with_capacity(dim.d());
        comps.push(gamma);
        comps.extend(beta.iter().map(|c| gamma * c));
        // the construction is on-shell by algebra; renormalize roundoff anyway
        let b = LorentzVector::new(comps);
        let b2 = b.mdot(&b);
        let scale = 1.0 / (-b2).sqrt();
        Worldline::uniform(&b * scale, dim)
    }

    /// Hyperbolic motion with proper acceleration g > 0 along spatial `axis`.
    pub fn hyperbolic(g: f64, axis: usize, dim: &Dimension) -> Result<Self> {
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "proper acceleration must be positive and finite, got {g}"
            )));
        }
        if axis < 1 || axis >= dim.d() {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: dim.d(),
            });
        }
        Ok(Worldline::Hyperbolic {
            g,
            axis,
            d: dim.d(),
        })
    }

    pub fn d(&self) -> usize {
        match self {
            Worldline::Uniform { b } => b.len(),
            Worldline::Hyperbolic { d, .. } => *d,
        }
    }

    /// Kinematics (z, v, a) at proper time s. v·v = −1 for all s.
    pub fn eval(&self, s: f64) -> Result<Kinematics> {
        if !s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "proper time must be finite, got {s}"
            )));
        }
        Ok(match self {
            Worldline::Uniform { b } => Kinematics {
                z: b * s,
                v: b.clone(),
                a: LorentzVector::zeros(b.len()),
            },
            Worldline::Hyperbolic { g, axis, d } => {
                let (sh, ch) = ((g * s).sinh(), (g * s).cosh());
                let mut z = LorentzVector::zeros(*d);
                z[0] = sh / g;
                z[*axis] = ch / g;
                let mut v = LorentzVector::zeros(*d);
                v[0] = ch;
                v[*axis] = sh;
                let mut a = LorentzVector::zeros(*d);
                a[0] = g * sh;
                a[*axis] = g * ch;
                Kinematics { z, v, a }
            }
        })
    }

    /// R(s) = x − z(s) with the proper time attached.
    pub fn separation(&self, x: &LorentzVector, s: f64) -> Result<SeparationVector> {
        let k = self.eval(s)?;
        Ok(SeparationVector {
            r: x - &k.z,
            s,
        })
    }

    /// λ(s) = −R(s)² for the level-set solvers; allocation-free closed forms
    /// per kind, this sits in the innermost solver loop.
    ///
    /// For hyperbolic motion the quadratic form is factored in lightcone
    /// coordinates, (R⁰−R^a)(R⁰+R^a) − |R_⊥|², which stays finite-signed
    /// when e^{±gs} overflows instead of producing inf − inf.
    pub(crate) fn lambda_at(&self, x: &LorentzVector, s: f64) -> f64 {
        match self {
            Worldline::Uniform { b } => {
                let bx = b.mdot(x);
                -x.mdot(x) + 2.0 * s * bx + s * s
            }
            Worldline::Hyperbolic { g, axis, d } => {
                let u_minus = (x[0] - x[*axis]) + (-g * s).exp() / g;
                let u_plus = (x[0] + x[*axis]) - (g * s).exp() / g;
                let mut perp = 0.0;
                for i in 1..*d {
                    if i != *axis {
                        perp += x[i] * x[i];
                    }
                }
                u_minus * u_plus - perp
            }
        }
    }

    /// dλ/ds = 2 R·v, negative on the retarded branch; allocation-free.
    pub(crate) fn dlambda_ds(&self, x: &LorentzVector, s: f64) -> f64 {
        match self {
            Worldline::Uniform { b } => 2.0 * (b.mdot(x) + s),
            Worldline::Hyperbolic { g, axis, .. } => {
                // R.v = -x0 cosh(gs) + x^a sinh(gs); the z-terms cancel
                let (sh, ch) = ((g * s).sinh(), (g * s).cosh());
                2.0 * (-x[0] * ch + x[*axis] * sh)
            }
        }
    }

    /// Proper time of the retarded lightcone crossing: −R(s)² = 0 with
    /// R⁰ > 0. Uniform motion uses the closed form
    /// s = −b·x − sqrt((b·x)² + x²); other worldlines bracket by marching
    /// and polish with safeguarded Newton.
    pub fn retarded_root(&self, x: &LorentzVector, dim: &Dimension) -> Result<f64> {
        dim.check_len(x)?;
        match self {
            Worldline::Uniform { b } => {
                let bx = b.mdot(x);
                let r2 = bx * bx + x.mdot(x);
                if r2 <= 0.0 {
                    return Err(Error::NoRetardedRoot(format!(
                        "observation point lies on the worldline (r^2 = {r2:.3e})"
                    )));
                }
                Ok(-bx - r2.sqrt())
            }
            _ => self.retarded_root_numeric(x),
        }
    }

    /// Generic marching bracket + bisection + Newton solver, exposed for
    /// cross-checks against the closed form.
    pub(crate) fn retarded_root_numeric(&self, x: &LorentzVector) -> Result<f64> {
        let f = |s: f64| self.lambda_at(x, s);
        let r0_at = |s: f64| {
            let k = self.eval(s).expect("finite s");
            x[0] - k.z[0]
        };
        let guess = x[0];
        let mut step = 0.5 * (1.0 + x.norm_inf());
        let (mut lo, mut hi);
        if f(guess) < 0.0 {
            // spacelike band: the retarded crossing is below
            hi = guess;
            lo = guess - step;
            let mut tries = 0;
            while f(lo) < 0.0 {
                step *= 2.0;
                lo = guess - step;
                tries += 1;
                if tries > 200 || !lo.is_finite() {
                    return Err(Error::NoRetardedRoot(format!(
                        "no lightcone crossing while marching back from s = {guess}"
                    )));
                }
            }
        } else if r0_at(guess) > 0.0 {
            // inside the past cone: the crossing is above
            lo = guess;
            hi = guess + step;
            let mut tries = 0;
            while f(hi) >= 0.0 {
                step *= 2.0;
                hi = guess + step;
                tries += 1;
                if tries > 200 || !hi.is_finite() {
                    return Err(Error::NoRetardedRoot(format!(
                        "level set never exits the past cone above s = {guess}"
                    )));
                }
            }
        } else {
            // inside or beyond the future cone: march backward through the
            // spacelike band first
            let mut s = guess - step;
            let mut tries = 0;
            while f(s) >= 0.0 {
                step *= 2.0;
                s = guess - step;
                tries += 1;
                if tries > 200 || !s.is_finite() {
                    return Err(Error::NoRetardedRoot(format!(
                        "no spacelike band found below s = {guess}"
                    )));
                }
            }
            hi = s;
            let mut step2 = step;
            lo = s - step2;
            let mut tries2 = 0;
            while f(lo) < 0.0 {
                step2 *= 2.0;
                lo = s - step2;
                tries2 += 1;
                if tries2 > 200 || !lo.is_finite() {
                    return Err(Error::NoRetardedRoot(format!(
                        "no lightcone crossing while marching back from s = {s}"
                    )));
                }
            }
        }
        let root = self.polish_root(x, lo, hi, 0.0)?;
        if r0_at(root) <= 0.0 {
            return Err(Error::NoRetardedRoot(
                "found a lightcone crossing but it is not retarded (R0 <= 0)".into(),
            ));
        }
        Ok(root)
    }

    /// Safeguarded Newton inside a sign-changing bracket: Newton steps are
    /// accepted while they stay in the bracket, otherwise the step bisects.
    /// Iterates until the bracket reaches machine width.
    fn polish_root(&self, x: &LorentzVector, mut lo: f64, mut hi: f64, target: f64) -> Result<f64> {
        let f = |s: f64| self.lambda_at(x, s) - target;
        let mut flo = f(lo);
        let fhi = f(hi);
        if flo == 0.0 {
            return Ok(lo);
        }
        if fhi == 0.0 {
            return Ok(hi);
        }
        if !(flo * fhi < 0.0) || flo.is_nan() || fhi.is_nan() {
            return Err(Error::NoRetardedRoot(format!(
                "lost the root bracket on [{lo}, {hi}]"
            )));
        }
        let f_scale = 1.0 + target.abs() + flo.abs().min(fhi.abs());
        let mut s = 0.5 * (lo + hi);
        for i in 0..200 {
            let fs = f(s);
            if fs.abs() <= 1e-14 * f_scale {
                return Ok(s);
            }
            if fs * flo < 0.0 {
                hi = s;
            } else {
                lo = s;
                flo = fs;
            }
            if (hi - lo).abs() <= 4.0 * f64::EPSILON * (1.0 + s.abs()) {
                break;
            }
            let df = self.dlambda_ds(x, s);
            let newton = s - fs / df;
            // every third step bisects so the bracket provably collapses
            s = if i % 3 != 2 && df != 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Ok(0.5 * (lo + hi))
    }

    /// Proper time s on the retarded branch with −R(s)² = λ, λ ≥ 0.
    ///
    /// For uniform motion this is s = −b·x − sqrt((b·x)² + x² + λ); the sign
    /// under the radical is pinned by the round-trip check −R(s(λ))² = λ.
    pub fn invert_lambda(
        &self,
        x: &LorentzVector,
        lambda: f64,
        dim: &Dimension,
    ) -> Result<f64> {
        dim.check_len(x)?;
        if !(lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "invert_lambda requires lambda >= 0, got {lambda}"
            )));
        }
        self.level_set_root(x, lambda)
    }

    /// Level-set solver −R(s)² = λ on the retarded branch; also accepts
    /// small negative λ (continuation through the lightcone) as long as the
    /// branch stays on the R·v < 0 side. Used by stencil differentiation and
    /// by the shifted-endpoint oracle.
    pub(crate) fn level_set_root(&self, x: &LorentzVector, lambda: f64) -> Result<f64> {
        if matches!(self, Worldline::Uniform { .. }) {
            return self.level_set_root_from(x, lambda, 0.0);
        }
        let s_ret = self.retarded_root_numeric(x)?;
        self.level_set_root_from(x, lambda, s_ret)
    }

    /// Same solver with the retarded root supplied by the caller; avoids
    /// re-bracketing in stencil and quadrature loops where x is fixed.
    pub(crate) fn level_set_root_from(
        &self,
        x: &LorentzVector,
        lambda: f64,
        s_ret: f64,
    ) -> Result<f64> {
        if let Worldline::Uniform { b } = self {
            let bx = b.mdot(x);
            let r2 = bx * bx + x.mdot(x);
            let disc = r2 + lambda;
            if disc <= 0.0 {
                return Err(Error::NoRetardedRoot(format!(
                    "no retarded-branch solution: r^2 + lambda = {disc:.3e} <= 0"
                )));
            }
            return Ok(-bx - disc.sqrt());
        }
        if lambda == 0.0 {
            return Ok(s_ret);
        }
        let f = |s: f64| self.lambda_at(x, s);
        if lambda > 0.0 {
            // march backward until the level is crossed
            let mut step = 0.25 * (1.0 + s_ret.abs());
            let mut lo = s_ret - step;
            let mut tries = 0;
            while f(lo) < lambda {
                step *= 2.0;
                lo = s_ret - step;
                tries += 1;
                if tries > 200 || !lo.is_finite() {
                    return Err(Error::NoRetardedRoot(format!(
                        "lambda = {lambda} not reached on the retarded branch"
                    )));
                }
            }
            self.polish_root(x, lo, s_ret, lambda)
        } else {
            // continuation: march forward while R.v stays negative
            let mut step = 0.05 * (1.0 + s_ret.abs());
            let mut hi = s_ret + step;
            let mut tries = 0;
            loop {
                if f(hi) <= lambda {
                    break;
                }
                if self.dlambda_ds(x, hi) >= 0.0 {
                    return Err(Error::NoRetardedRoot(format!(
                        "level lambda = {lambda} unreachable before the branch turns"
                    )));
                }
                step *= 2.0;
                hi = s_ret + step;
                tries += 1;
                if tries > 200 {
                    return Err(Error::NoRetardedRoot(format!(
                        "level lambda = {lambda} not reached forward of the retarded root"
                    )));
                }
            }
            self.polish_root(x, s_ret, hi, lambda)
        }
    }

    /// Covariant gradient ∂s/∂x^μ = R_μ/(R·v) of the level-set inverse
    /// s(x; λ), from implicit differentiation of λ = −R(s)² at fixed λ.
    pub fn ds_dx(
        &self,
        x: &LorentzVector,
        lambda: f64,
        dim: &Dimension,
    ) -> Result<LorentzVector> {
        dim.check_len(x)?;
        if !(lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ds_dx requires lambda >= 0, got {lambda}"
            )));
        }
        let s = self.level_set_root(x, lambda)?;
        let k = self.eval(s)?;
        let r = x - &k.z;
        let rv = r.mdot(&k.v);
        let threshold = 1e-10 * (1.0 + r.norm_inf()) * (1.0 + k.v.norm_inf());
        if rv.abs() < threshold {
            return Err(Error::NearLightcone {
                value: rv.abs(),
                threshold,
            });
        }
        Ok(&r.lowered() * (1.0 / rv))
    }
}
