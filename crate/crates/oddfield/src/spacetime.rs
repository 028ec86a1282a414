//! Minkowski geometry in odd spacetime dimension D = 2n + 3.
//!
//! Signature is mostly-plus, (−,+,…,+), with index 0 the time component.
//! This is the convention in which a unit timelike velocity obeys b·b = −1
//! and the retarded Green function is supported where x·x < 0.
//!
//! `Dimension` bundles D, the derived integer n, and the normalization
//! constant Ω_D of the Green function. Ω_D defaults to the area of the unit
//! (D−2)-sphere, 2π^{(D−1)/2} / Γ((D−1)/2), and can be overridden; none of
//! the verification invariants depend on its value.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Odd spacetime dimension D = 2n + 3 with n ≥ 1, plus the Green-function
/// normalization constant Ω_D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimension {
    d: usize,
    n: usize,
    omega: f64,
}

impl Dimension {
    /// Validates D (odd, ≥ 5) and uses the default Ω_D.
    ///
    /// D = 3 is rejected: the closed-form machinery degenerates at n = 0
    /// (zeroth derivative of the half-power kernel, divergent constant).
    pub fn new(d: usize) -> Result<Self> {
        if d < 5 || d % 2 == 0 {
            return Err(Error::InvalidDimension(d));
        }
        let n = (d - 3) / 2;
        let omega = unit_sphere_area(d - 2)?;
        Ok(Dimension { d, n, omega })
    }

    /// Same validation as [`Dimension::new`] but with an explicit Ω_D > 0.
    pub fn with_omega(d: usize, omega: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "omega must be positive, got {omega}"
            )));
        }
        let mut dim = Dimension::new(d)?;
        dim.omega = omega;
        Ok(dim)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// n with D = 2n + 3.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub(crate) fn check_len(&self, v: &LorentzVector) -> Result<()> {
        if v.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: v.len(),
            });
        }
        Ok(())
    }
}

/// Area of the unit k-sphere S^k embedded in R^{k+1}:
/// 2 π^{(k+1)/2} / Γ((k+1)/2), evaluated exactly at integer and
/// half-integer Γ arguments.
pub fn unit_sphere_area(k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidArgument(format!(
            "unit_sphere_area requires k >= 1, got {k}"
        )));
    }
    let pi = std::f64::consts::PI;
    if k % 2 == 1 {
        // (k+1)/2 = m integer: area = 2 pi^m / (m-1)!
        let m = (k + 1) / 2;
        let mut fact = 1.0;
        for i in 1..m {
            fact *= i as f64;
        }
        Ok(2.0 * pi.powi(m as i32) / fact)
    } else {
        // (k+1)/2 = m + 1/2 with m = k/2: area = 2^{m+1} pi^m / (2m-1)!!
        let m = k / 2;
        let mut dfact = 1.0;
        let mut i = 2 * m as i64 - 1;
        while i >= 2 {
            dfact *= i as f64;
            i -= 2;
        }
        Ok(2f64.powi(m as i32 + 1) * pi.powi(m as i32) / dfact)
    }
}

/// A D-component real vector with index 0 the time component.
///
/// Components are stored contravariant (upper index); [`LorentzVector::lowered`]
/// flips the sign of component 0 only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LorentzVector(Vec<f64>);

impl LorentzVector {
    pub fn new(components: Vec<f64>) -> Self {
        LorentzVector(components)
    }

    pub fn zeros(d: usize) -> Self {
        LorentzVector(vec![0.0; d])
    }

    /// Unit vector along coordinate axis `axis`.
    pub fn basis(d: usize, axis: usize) -> Self {
        let mut v = vec![0.0; d];
        v[axis] = 1.0;
        LorentzVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    /// Index-lowered copy: component 0 negated, spatial components unchanged.
    pub fn lowered(&self) -> Self {
        let mut v = self.0.clone();
        v[0] = -v[0];
        LorentzVector(v)
    }

    /// Raising is the same sign flip as lowering in this signature.
    pub fn raised(&self) -> Self {
        self.lowered()
    }

    /// Minkowski product without a dimension check; callers inside the crate
    /// guarantee equal lengths.
    pub(crate) fn mdot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        let mut acc = -self.0[0] * other.0[0];
        for i in 1..self.0.len() {
            acc += self.0[i] * other.0[i];
        }
        acc
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Euclidean norm of the component array; used for relative-size
    /// comparisons, not a Lorentz invariant.
    pub fn euclid_norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }
}

impl Index<usize> for LorentzVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for LorentzVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for &LorentzVector {
    type Output = LorentzVector;
    fn add(self, other: &LorentzVector) -> LorentzVector {
        LorentzVector(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &LorentzVector {
    type Output = LorentzVector;
    fn sub(self, other: &LorentzVector) -> LorentzVector {
        LorentzVector(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Mul<f64> for &LorentzVector {
    type Output = LorentzVector;
    fn mul(self, k: f64) -> LorentzVector {
        LorentzVector(self.0.iter().map(|a| a * k).collect())
    }
}

impl Neg for &LorentzVector {
    type Output = LorentzVector;
    fn neg(self) -> LorentzVector {
        LorentzVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for LorentzVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<&[f64]> for LorentzVector {
    fn from(s: &[f64]) -> Self {
        LorentzVector(s.to_vec())
    }
}

/// Causal character of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Interval {
    Timelike,
    Null,
    Spacelike,
}

/// Minkowski inner product −u⁰v⁰ + Σ uⁱvⁱ. Symmetric and bilinear.
pub fn dot(u: &LorentzVector, v: &LorentzVector, dim: &Dimension) -> Result<f64> {
    dim.check_len(u)?;
    dim.check_len(v)?;
    Ok(u.mdot(v))
}

/// Classifies x by the sign of x·x: timelike if x² < −tol, null if |x²| ≤ tol,
/// spacelike otherwise.
pub fn classify(x: &LorentzVector, dim: &Dimension, tol: f64) -> Result<Interval> {
    dim.check_len(x)?;
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "classification tolerance must be >= 0, got {tol}"
        )));
    }
    let x2 = x.mdot(x);
    Ok(if x2 < -tol {
        Interval::Timelike
    } else if x2 <= tol {
        Interval::Null
    } else {
        Interval::Spacelike
    })
}

/// Hyperbolic rotation mixing components 0 and `axis` (1 ≤ axis ≤ D−1):
///
/// x'⁰ = cosh ξ · x⁰ + sinh ξ · x^a,   x'^a = sinh ξ · x⁰ + cosh ξ · x^a.
///
/// Preserves all Minkowski products.
pub fn boost(
    x: &LorentzVector,
    rapidity: f64,
    axis: usize,
    dim: &Dimension,
) -> Result<LorentzVector> {
    dim.check_len(x)?;
    if axis < 1 || axis >= dim.d() {
        return Err(Error::AxisOutOfRange {
            axis,
            dim: dim.d(),
        });
    }
    if !rapidity.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "rapidity must be finite, got {rapidity}"
        )));
    }
    let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
    let mut out = x.clone();
    out[0] = ch * x[0] + sh * x[axis];
    out[axis] = sh * x[0] + ch * x[axis];
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn d5() -> Dimension {
        Dimension::new(5).unwrap()
    }

    fn lv(c: &[f64]) -> LorentzVector {
        LorentzVector::from(c)
    }

    #[test]
    fn dimension_validation() {
        assert!(Dimension::new(4).is_err());
        assert!(Dimension::new(3).is_err());
        assert!(Dimension::new(0).is_err());
        let d = Dimension::new(5).unwrap();
        assert_eq!(d.n(), 1);
        assert!(d.omega() > 0.0);
        let d7 = Dimension::new(7).unwrap();
        assert_eq!(d7.n(), 2);
        // override
        let dd = Dimension::with_omega(5, 1.0).unwrap();
        assert_eq!(dd.omega(), 1.0);
        assert!(Dimension::with_omega(5, -2.0).is_err());
    }

    #[test]
    fn sphere_areas() {
        let pi = std::f64::consts::PI;
        assert_relative_eq!(unit_sphere_area(1).unwrap(), 2.0 * pi, epsilon = 1e-14);
        assert_relative_eq!(unit_sphere_area(2).unwrap(), 4.0 * pi, epsilon = 1e-13);
        assert_relative_eq!(unit_sphere_area(3).unwrap(), 2.0 * pi * pi, epsilon = 1e-13);
        assert!(unit_sphere_area(0).is_err());
    }

    #[test]
    fn default_omega_is_area_of_d_minus_2_sphere() {
        let d = Dimension::new(5).unwrap();
        assert_relative_eq!(d.omega(), unit_sphere_area(3).unwrap(), epsilon = 1e-14);
        let d7 = Dimension::new(7).unwrap();
        assert_relative_eq!(d7.omega(), unit_sphere_area(5).unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn dot_examples() {
        let dim = d5();
        let u = lv(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(dot(&u, &u, &dim).unwrap(), -1.0);
        let n = lv(&[1.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(dot(&n, &n, &dim).unwrap(), 0.0);
        let a = lv(&[2.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(dot(&a, &u, &dim).unwrap(), -2.0);
    }

    #[test]
    fn dot_rejects_mismatched_lengths() {
        let dim = d5();
        let u = lv(&[1.0, 0.0, 0.0, 0.0]);
        let v = lv(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(dot(&u, &v, &dim).is_err());
    }

    #[test]
    fn signature_on_basis_vectors() {
        let dim = d5();
        let e0 = LorentzVector::basis(5, 0);
        assert_eq!(dot(&e0, &e0, &dim).unwrap(), -1.0);
        for i in 1..5 {
            let ei = LorentzVector::basis(5, i);
            assert_eq!(dot(&ei, &ei, &dim).unwrap(), 1.0);
        }
    }

    #[test]
    fn classify_examples() {
        let dim = d5();
        let tol = 1e-12;
        assert_eq!(
            classify(&lv(&[1.0, 0.0, 0.0, 0.0, 0.0]), &dim, tol).unwrap(),
            Interval::Timelike
        );
        assert_eq!(
            classify(&lv(&[1.0, 1.0, 0.0, 0.0, 0.0]), &dim, tol).unwrap(),
            Interval::Null
        );
        assert_eq!(
            classify(&lv(&[0.0, 1.0, 0.0, 0.0, 0.0]), &dim, tol).unwrap(),
            Interval::Spacelike
        );
        assert!(classify(&lv(&[0.0; 5]), &dim, -1.0).is_err());
    }

    #[test]
    fn boost_of_rest_velocity() {
        let dim = d5();
        let x = lv(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        let xi = 0.7;
        let b = boost(&x, xi, 1, &dim).unwrap();
        assert_relative_eq!(b[0], xi.cosh(), epsilon = 1e-15);
        assert_relative_eq!(b[1], xi.sinh(), epsilon = 1e-15);
        assert_eq!(b[2], 0.0);
    }

    #[test]
    fn boost_identity_and_axis_range() {
        let dim = d5();
        let x = lv(&[0.3, -1.2, 0.5, 2.0, -0.7]);
        let b = boost(&x, 0.0, 2, &dim).unwrap();
        assert_eq!(b, x);
        assert!(boost(&x, 1.0, 0, &dim).is_err());
        assert!(boost(&x, 1.0, 5, &dim).is_err());
    }

    proptest! {
        #[test]
        fn boost_preserves_dot(
            xs in proptest::collection::vec(-5.0f64..5.0, 5),
            ys in proptest::collection::vec(-5.0f64..5.0, 5),
            xi in -3.0f64..3.0,
            axis in 1usize..5,
        ) {
            let dim = d5();
            let x = LorentzVector::new(xs);
            let y = LorentzVector::new(ys);
            let d0 = dot(&x, &y, &dim).unwrap();
            let d1 = dot(
                &boost(&x, xi, axis, &dim).unwrap(),
                &boost(&y, xi, axis, &dim).unwrap(),
                &dim,
            )
            .unwrap();
            prop_assert!((d1 - d0).abs() <= 1e-12 * (1.0 + d0.abs()));
        }

        #[test]
        fn classify_invariant_under_boost(
            xs in proptest::collection::vec(-3.0f64..3.0, 5),
            xi in -2.0f64..2.0,
        ) {
            let dim = d5();
            let tol = 1e-12;
            let x = LorentzVector::new(xs);
            let x2 = dot(&x, &x, &dim).unwrap();
            prop_assume!(x2.abs() > 10.0 * tol);
            let c0 = classify(&x, &dim, tol).unwrap();
            let c1 = classify(&boost(&x, xi, 1, &dim).unwrap(), &dim, tol).unwrap();
            prop_assert_eq!(c0, c1);
        }
    }
}
