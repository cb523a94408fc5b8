//! Biquaternions realized as 2x2 matrices, in exact and floating-point
//! arithmetic, together with the domain predicates used by the quadrature
//! and kernel modules.
//!
//! Conventions: e0 = Id and e_k = -i * sigma_k (Pauli matrices), so that
//! in e-coordinates (z0, z1, z2, z3)
//!
//! ```text
//! z11 = z0 - i z3    z12 = -z2 - i z1
//! z21 =  z2 - i z1   z22 =  z0 + i z3
//! ```
//!
//! With this choice N(Z) = det Z = (z0)^2 + (z1)^2 + (z2)^2 + (z3)^2 and the
//! quaternionic conjugate Z+ is the adjugate matrix.

use crate::rational::CRational;
use crate::{Error, Result};
use num_complex::Complex64;
use num_traits::Zero;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An element of H_C = C (x) H with exact complex-rational entries.
#[derive(Clone, PartialEq, Eq)]
pub struct Biquaternion {
    /// Matrix entries in row-major order: [z11, z12, z21, z22].
    pub z: [CRational; 4],
}

impl Biquaternion {
    pub fn new(z11: CRational, z12: CRational, z21: CRational, z22: CRational) -> Self {
        Biquaternion { z: [z11, z12, z21, z22] }
    }

    pub fn zero() -> Self {
        Biquaternion::new(
            CRational::zero(),
            CRational::zero(),
            CRational::zero(),
            CRational::zero(),
        )
    }

    pub fn one() -> Self {
        Biquaternion::new(
            CRational::one(),
            CRational::zero(),
            CRational::zero(),
            CRational::one(),
        )
    }

    /// The quaternion unit e_a, a = 0..3.
    pub fn e(a: usize) -> Self {
        let mut coords = [
            CRational::zero(),
            CRational::zero(),
            CRational::zero(),
            CRational::zero(),
        ];
        coords[a] = CRational::one();
        Biquaternion::from_ecoords(&coords)
    }

    /// Matrix entries from e-coordinates.
    pub fn from_ecoords(c: &[CRational; 4]) -> Self {
        let i = CRational::i();
        let z11 = &c[0] - &(&i * &c[3]);
        let z12 = &(-&c[2]) - &(&i * &c[1]);
        let z21 = &c[2] - &(&i * &c[1]);
        let z22 = &c[0] + &(&i * &c[3]);
        Biquaternion::new(z11, z12, z21, z22)
    }

    /// e-coordinates from matrix entries; inverse of [`Self::from_ecoords`].
    pub fn to_ecoords(&self) -> [CRational; 4] {
        let hf = CRational::from_ratio(1, 2);
        let i = CRational::i();
        let z0 = &(&self.z[0] + &self.z[3]) * &hf;
        let z3 = &(&(&self.z[3] - &self.z[0]) * &hf) / &i;
        let z1 = &(&(&self.z[1] + &self.z[2]) * &hf) / &(-&i);
        let z2 = &(&self.z[2] - &self.z[1]) * &hf;
        [z0, z1, z2, z3]
    }

    /// Quaternionic conjugate Z+, the adjugate matrix.
    pub fn conj(&self) -> Self {
        Biquaternion::new(
            self.z[3].clone(),
            -&self.z[1],
            -&self.z[2],
            self.z[0].clone(),
        )
    }

    /// N(Z) = det Z; satisfies Z Z+ = Z+ Z = N(Z) Id and is multiplicative.
    pub fn norm(&self) -> CRational {
        &(&self.z[0] * &self.z[3]) - &(&self.z[1] * &self.z[2])
    }

    pub fn trace(&self) -> CRational {
        &self.z[0] + &self.z[3]
    }

    /// Z^{-1} = Z+ / N(Z); `None` when N(Z) = 0.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.norm();
        let ninv = n.inv()?;
        Some(self.conj().scale(&ninv))
    }

    pub fn scale(&self, c: &CRational) -> Self {
        Biquaternion::new(
            &self.z[0] * c,
            &self.z[1] * c,
            &self.z[2] * c,
            &self.z[3] * c,
        )
    }

    /// Conjugate transpose (the * involution of the ambient matrix algebra).
    pub fn conj_transpose(&self) -> Self {
        Biquaternion::new(
            self.z[0].conj(),
            self.z[2].conj(),
            self.z[1].conj(),
            self.z[3].conj(),
        )
    }

    /// True when all e-coordinates are real, i.e. Z lies in the classical
    /// quaternions H.
    pub fn is_real_quaternion(&self) -> bool {
        self.to_ecoords().iter().all(|c| c.is_real())
    }

    pub fn to_num(&self) -> NumBiquat {
        NumBiquat {
            z: [
                self.z[0].to_complex64(),
                self.z[1].to_complex64(),
                self.z[2].to_complex64(),
                self.z[3].to_complex64(),
            ],
        }
    }
}

impl Add for &Biquaternion {
    type Output = Biquaternion;
    fn add(self, rhs: &Biquaternion) -> Biquaternion {
        Biquaternion::new(
            &self.z[0] + &rhs.z[0],
            &self.z[1] + &rhs.z[1],
            &self.z[2] + &rhs.z[2],
            &self.z[3] + &rhs.z[3],
        )
    }
}

impl Sub for &Biquaternion {
    type Output = Biquaternion;
    fn sub(self, rhs: &Biquaternion) -> Biquaternion {
        Biquaternion::new(
            &self.z[0] - &rhs.z[0],
            &self.z[1] - &rhs.z[1],
            &self.z[2] - &rhs.z[2],
            &self.z[3] - &rhs.z[3],
        )
    }
}

impl Mul for &Biquaternion {
    type Output = Biquaternion;
    fn mul(self, rhs: &Biquaternion) -> Biquaternion {
        let a = &self.z;
        let b = &rhs.z;
        Biquaternion::new(
            &(&a[0] * &b[0]) + &(&a[1] * &b[2]),
            &(&a[0] * &b[1]) + &(&a[1] * &b[3]),
            &(&a[2] * &b[0]) + &(&a[3] * &b[2]),
            &(&a[2] * &b[1]) + &(&a[3] * &b[3]),
        )
    }
}

impl Neg for &Biquaternion {
    type Output = Biquaternion;
    fn neg(self) -> Biquaternion {
        Biquaternion::new(-&self.z[0], -&self.z[1], -&self.z[2], -&self.z[3])
    }
}

impl fmt::Debug for Biquaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}; {}, {}]",
            self.z[0], self.z[1], self.z[2], self.z[3]
        )
    }
}

/// A 2-component exact column spinor (left H_C-module).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpinorCol(pub [CRational; 2]);

/// A 2-component exact row spinor (right H_C-module).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpinorRow(pub [CRational; 2]);

impl SpinorCol {
    /// The antilinear conjugation S -> S' (transpose + complex conjugation).
    pub fn dagger(&self) -> SpinorRow {
        SpinorRow([self.0[0].conj(), self.0[1].conj()])
    }

    pub fn left_mul(&self, x: &Biquaternion) -> SpinorCol {
        SpinorCol([
            &(&x.z[0] * &self.0[0]) + &(&x.z[1] * &self.0[1]),
            &(&x.z[2] * &self.0[0]) + &(&x.z[3] * &self.0[1]),
        ])
    }
}

impl SpinorRow {
    /// The antilinear conjugation S' -> S.
    pub fn dagger(&self) -> SpinorCol {
        SpinorCol([self.0[0].conj(), self.0[1].conj()])
    }

    pub fn right_mul(&self, x: &Biquaternion) -> SpinorRow {
        SpinorRow([
            &(&self.0[0] * &x.z[0]) + &(&self.0[1] * &x.z[2]),
            &(&self.0[0] * &x.z[1]) + &(&self.0[1] * &x.z[3]),
        ])
    }

    /// The bilinear pairing S' x S -> C.
    pub fn pair(&self, s: &SpinorCol) -> CRational {
        &(&self.0[0] * &s.0[0]) + &(&self.0[1] * &s.0[1])
    }
}

/// A block 2x2 matrix over H_C together with its cached inverse blocks,
/// i.e. an element h of GL(2,H_C) with h = (a', b'; c', d') and
/// h^{-1} = (a, b; c, d).
#[derive(Clone, Debug)]
pub struct GL2H {
    pub ap: Biquaternion,
    pub bp: Biquaternion,
    pub cp: Biquaternion,
    pub dp: Biquaternion,
    pub a: Biquaternion,
    pub b: Biquaternion,
    pub c: Biquaternion,
    pub d: Biquaternion,
}

impl GL2H {
    /// Builds an element from its blocks and inverse blocks, verifying
    /// h h^{-1} = Id exactly.
    pub fn from_blocks(
        ap: Biquaternion,
        bp: Biquaternion,
        cp: Biquaternion,
        dp: Biquaternion,
        a: Biquaternion,
        b: Biquaternion,
        c: Biquaternion,
        d: Biquaternion,
    ) -> Result<Self> {
        let h = GL2H { ap, bp, cp, dp, a, b, c, d };
        let i11 = &(&h.ap * &h.a) + &(&h.bp * &h.c);
        let i12 = &(&h.ap * &h.b) + &(&h.bp * &h.d);
        let i21 = &(&h.cp * &h.a) + &(&h.dp * &h.c);
        let i22 = &(&h.cp * &h.b) + &(&h.dp * &h.d);
        let one = Biquaternion::one();
        let zero = Biquaternion::zero();
        if i11 != one || i22 != one || i12 != zero || i21 != zero {
            return Err(Error::SingularPoint(
                "blocks do not satisfy h h^{-1} = Id".into(),
            ));
        }
        Ok(h)
    }

    /// Block-diagonal element (a', 0; 0, d') with invertible blocks.
    pub fn diagonal(ap: Biquaternion, dp: Biquaternion) -> Result<Self> {
        let a = ap
            .inverse()
            .ok_or_else(|| Error::SingularPoint("a' not invertible".into()))?;
        let d = dp
            .inverse()
            .ok_or_else(|| Error::SingularPoint("d' not invertible".into()))?;
        GL2H::from_blocks(
            ap,
            Biquaternion::zero(),
            Biquaternion::zero(),
            dp,
            a,
            Biquaternion::zero(),
            Biquaternion::zero(),
            d,
        )
    }

    /// The inversion element (0, 1; 1, 0).
    pub fn inversion() -> Self {
        GL2H::from_blocks(
            Biquaternion::zero(),
            Biquaternion::one(),
            Biquaternion::one(),
            Biquaternion::zero(),
            Biquaternion::zero(),
            Biquaternion::one(),
            Biquaternion::one(),
            Biquaternion::zero(),
        )
        .expect("inversion is its own inverse")
    }
}

/// Floating-point biquaternion for quadrature and sampling.
#[derive(Clone, Copy, PartialEq)]
pub struct NumBiquat {
    /// Matrix entries in row-major order: [z11, z12, z21, z22].
    pub z: [Complex64; 4],
}

impl NumBiquat {
    pub fn new(z11: Complex64, z12: Complex64, z21: Complex64, z22: Complex64) -> Self {
        NumBiquat { z: [z11, z12, z21, z22] }
    }

    pub fn zero() -> Self {
        NumBiquat { z: [Complex64::zero(); 4] }
    }

    pub fn one() -> Self {
        let mut z = [Complex64::zero(); 4];
        z[0] = Complex64::new(1.0, 0.0);
        z[3] = Complex64::new(1.0, 0.0);
        NumBiquat { z }
    }

    pub fn from_ecoords(c: [Complex64; 4]) -> Self {
        let i = Complex64::new(0.0, 1.0);
        NumBiquat::new(c[0] - i * c[3], -c[2] - i * c[1], c[2] - i * c[1], c[0] + i * c[3])
    }

    pub fn from_real_ecoords(c: [f64; 4]) -> Self {
        NumBiquat::from_ecoords([
            Complex64::new(c[0], 0.0),
            Complex64::new(c[1], 0.0),
            Complex64::new(c[2], 0.0),
            Complex64::new(c[3], 0.0),
        ])
    }

    pub fn to_ecoords(&self) -> [Complex64; 4] {
        let i = Complex64::new(0.0, 1.0);
        let z0 = (self.z[0] + self.z[3]) * 0.5;
        let z3 = (self.z[3] - self.z[0]) * 0.5 / i;
        let z1 = -(self.z[1] + self.z[2]) * 0.5 / i;
        let z2 = (self.z[2] - self.z[1]) * 0.5;
        [z0, z1, z2, z3]
    }

    pub fn scalar(c: Complex64) -> Self {
        NumBiquat::new(c, Complex64::zero(), Complex64::zero(), c)
    }

    pub fn conj(&self) -> Self {
        NumBiquat::new(self.z[3], -self.z[1], -self.z[2], self.z[0])
    }

    pub fn norm(&self) -> Complex64 {
        self.z[0] * self.z[3] - self.z[1] * self.z[2]
    }

    pub fn trace(&self) -> Complex64 {
        self.z[0] + self.z[3]
    }

    pub fn conj_transpose(&self) -> Self {
        NumBiquat::new(
            self.z[0].conj(),
            self.z[2].conj(),
            self.z[1].conj(),
            self.z[3].conj(),
        )
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm();
        if n.norm() < 1e-300 {
            return Err(Error::SingularPoint("N(Z) = 0".into()));
        }
        Ok(self.conj().scale(1.0 / n))
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        NumBiquat::new(self.z[0] * c, self.z[1] * c, self.z[2] * c, self.z[3] * c)
    }

    /// Eigenvalues of the 2x2 matrix.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let t = self.trace();
        let d = self.norm();
        let disc = (t * t - 4.0 * d).sqrt();
        [(t + disc) * 0.5, (t - disc) * 0.5]
    }

    /// Eigenvalues of the Hermitian matrix Z Z*, i.e. squared singular
    /// values of Z. Both are real and nonnegative.
    pub fn singular_values_sq(&self) -> [f64; 2] {
        let zz = self * &self.conj_transpose();
        let t = zz.trace().re;
        let d = zz.norm().re;
        let disc = (t * t - 4.0 * d).max(0.0).sqrt();
        [(t + disc) * 0.5, (t - disc) * 0.5]
    }

    /// Hermitian part (Z + Z*)/2.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.conj_transpose()).scale(0.5)
    }

    /// Frobenius-type magnitude, for tolerances.
    pub fn abs(&self) -> f64 {
        self.z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Add for &NumBiquat {
    type Output = NumBiquat;
    fn add(self, rhs: &NumBiquat) -> NumBiquat {
        NumBiquat::new(
            self.z[0] + rhs.z[0],
            self.z[1] + rhs.z[1],
            self.z[2] + rhs.z[2],
            self.z[3] + rhs.z[3],
        )
    }
}

impl Sub for &NumBiquat {
    type Output = NumBiquat;
    fn sub(self, rhs: &NumBiquat) -> NumBiquat {
        NumBiquat::new(
            self.z[0] - rhs.z[0],
            self.z[1] - rhs.z[1],
            self.z[2] - rhs.z[2],
            self.z[3] - rhs.z[3],
        )
    }
}

impl Mul for &NumBiquat {
    type Output = NumBiquat;
    fn mul(self, rhs: &NumBiquat) -> NumBiquat {
        let a = &self.z;
        let b = &rhs.z;
        NumBiquat::new(
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        )
    }
}

impl Neg for &NumBiquat {
    type Output = NumBiquat;
    fn neg(self) -> NumBiquat {
        self.scale(-1.0)
    }
}

impl fmt::Debug for NumBiquat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.6}, {:.6}; {:.6}, {:.6}]",
            self.z[0], self.z[1], self.z[2], self.z[3]
        )
    }
}

/// Domains of H_C used by kernels, quadrature and the Cayley transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// D+_R = { Z : Z Z* < R^2 } (largest singular value below R).
    DPlus,
    /// D-_R = { Z : Z Z* > R^2 } (smallest singular value above R).
    DMinus,
    /// U(2)_R = { Z : Z Z* = R^2 Id }.
    U2R,
    /// The forward tube: Hermitian part of Z negative definite.
    TubePlus,
    /// The backward tube: Hermitian part of Z positive definite.
    TubeMinus,
    /// The classical quaternions H (real e-coordinates).
    HReal,
}

/// Membership test with relative tolerance `tol` (domains scaled by `r`).
pub fn in_domain(z: &NumBiquat, domain: Domain, r: f64, tol: f64) -> bool {
    let r2 = r * r;
    match domain {
        Domain::DPlus => {
            let [hi, _] = z.singular_values_sq();
            hi < r2 * (1.0 - tol)
        }
        Domain::DMinus => {
            let [_, lo] = z.singular_values_sq();
            lo > r2 * (1.0 + tol)
        }
        Domain::U2R => {
            let zz = z * &z.conj_transpose();
            let dev = (&zz - &NumBiquat::one().scale(r2)).abs();
            dev <= tol * r2.max(1.0)
        }
        // Z = Y + C with Y in the real-Minkowski slice and C = i D.
        // D lies in the open forward cone exactly when the Hermitian part
        // of Z is negative definite (N(D) < 0 and i tr D < 0).
        Domain::TubePlus => {
            let h = z.hermitian_part();
            let det = h.norm().re;
            let tr = h.trace().re;
            det > tol.max(0.0) && tr < -tol
        }
        Domain::TubeMinus => {
            let h = z.hermitian_part();
            let det = h.norm().re;
            let tr = h.trace().re;
            det > tol.max(0.0) && tr > tol
        }
        Domain::HReal => {
            let scale = z.abs().max(1.0);
            z.to_ecoords().iter().all(|c| c.im.abs() <= tol * scale)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn biq(c: [i64; 4]) -> Biquaternion {
        Biquaternion::from_ecoords(&[
            CRational::from_int(c[0]),
            CRational::from_int(c[1]),
            CRational::from_int(c[2]),
            CRational::from_int(c[3]),
        ])
    }

    #[test]
    fn conj_basics() {
        assert_eq!(Biquaternion::one().conj(), Biquaternion::one());
        assert_eq!(Biquaternion::e(1).conj(), -&Biquaternion::e(1));
        // Z = (1, 2; 3, 4) entrywise has adjugate (4, -2; -3, 1).
        let z = Biquaternion::new(
            CRational::from_int(1),
            CRational::from_int(2),
            CRational::from_int(3),
            CRational::from_int(4),
        );
        let zc = z.conj();
        assert_eq!(zc.z[0], CRational::from_int(4));
        assert_eq!(zc.z[1], CRational::from_int(-2));
        assert_eq!(zc.z[2], CRational::from_int(-3));
        assert_eq!(zc.z[3], CRational::from_int(1));
        assert_eq!(z.norm(), CRational::from_int(-2));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(Biquaternion::one().norm(), CRational::one());
        assert_eq!(biq([1, 1, 0, 0]).norm(), CRational::from_int(2));
    }

    #[test]
    fn unit_rules() {
        // e_i^2 = -1 and e1 e2 e3 = -1.
        for a in 1..4 {
            let e = Biquaternion::e(a);
            assert_eq!(&e * &e, -&Biquaternion::one());
        }
        let prod = &(&Biquaternion::e(1) * &Biquaternion::e(2)) * &Biquaternion::e(3);
        assert_eq!(prod, -&Biquaternion::one());
    }

    #[test]
    fn domain_examples() {
        let z = NumBiquat::one().scale(0.3);
        assert!(in_domain(&z, Domain::DPlus, 1.0, 1e-10));
        assert!(!in_domain(&NumBiquat::one(), Domain::DPlus, 1.0, 1e-10));
        // -i Id + X with X having negative scalar part lies in the forward
        // tube: the Hermitian part is (Re x0) Id which must be negative
        // definite.
        let z = NumBiquat::from_ecoords([
            Complex64::new(-0.5, -1.0),
            Complex64::new(0.3, 0.0),
            Complex64::new(-0.2, 0.0),
            Complex64::new(0.7, 0.0),
        ]);
        assert!(in_domain(&z, Domain::TubePlus, 1.0, 1e-10));
        // Flipping the sign of the scalar part leaves the tube.
        let z2 = NumBiquat::from_ecoords([
            Complex64::new(0.5, -1.0),
            Complex64::new(0.3, 0.0),
            Complex64::new(-0.2, 0.0),
            Complex64::new(0.7, 0.0),
        ]);
        assert!(!in_domain(&z2, Domain::TubePlus, 1.0, 1e-10));
        assert!(in_domain(&NumBiquat::one().scale(2.0), Domain::DMinus, 1.0, 1e-10));
        assert!(in_domain(
            &NumBiquat::from_real_ecoords([0.1, -0.4, 0.2, 0.9]),
            Domain::HReal,
            1.0,
            1e-10
        ));
    }

    #[test]
    fn spinor_conjugation_rule() {
        // (X s)+ = s+ X+ for real quaternions X.
        let x = biq([2, -1, 3, 5]);
        let s = SpinorCol([CRational::from_ratio(1, 2), CRational::from_int(-3)]);
        let lhs = s.left_mul(&x).dagger();
        let rhs = s.dagger().right_mul(&x.conj());
        assert_eq!(lhs, rhs);
        // (s' X)+ = X+ s'+.
        let sp = SpinorRow([CRational::from_int(2), CRational::from_ratio(-1, 3)]);
        let lhs = sp.right_mul(&x).dagger();
        let rhs = sp.dagger().left_mul(&x.conj());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn gl2h_identity_check() {
        let h = GL2H::diagonal(biq([0, 1, 0, 0]), biq([2, 0, 0, 0])).unwrap();
        assert_eq!(&h.ap * &h.a, Biquaternion::one());
        assert!(GL2H::from_blocks(
            Biquaternion::one(),
            Biquaternion::zero(),
            Biquaternion::zero(),
            Biquaternion::one(),
            Biquaternion::one(),
            Biquaternion::zero(),
            Biquaternion::zero(),
            biq([2, 0, 0, 0]),
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn conj_is_antihomomorphism(a in prop::array::uniform4(-6i64..6), b in prop::array::uniform4(-6i64..6)) {
            let z = biq(a);
            let w = biq(b);
            prop_assert_eq!((&z * &w).conj(), &w.conj() * &z.conj());
            prop_assert_eq!(z.conj().conj(), z);
        }

        #[test]
        fn norm_is_multiplicative(a in prop::array::uniform4(-6i64..6), b in prop::array::uniform4(-6i64..6)) {
            let z = biq(a);
            let w = biq(b);
            prop_assert_eq!((&z * &w).norm(), &z.norm() * &w.norm());
            // Z Z+ = N(Z) Id.
            let zc = &z * &z.conj();
            prop_assert_eq!(zc, Biquaternion::one().scale(&z.norm()));
        }

        #[test]
        fn ecoords_roundtrip(a in prop::array::uniform4(-9i64..9)) {
            let z = biq(a);
            let back = Biquaternion::from_ecoords(&z.to_ecoords());
            prop_assert_eq!(back, z.clone());
            // In e-coordinates N(Z) is the sum of squares.
            let sum: CRational = {
                let mut acc = CRational::zero();
                for c in z.to_ecoords().iter() {
                    acc += &(c * c);
                }
                acc
            };
            prop_assert_eq!(sum, z.norm());
        }

        #[test]
        fn inverse_is_conj_over_norm(a in prop::array::uniform4(-6i64..6)) {
            let z = biq(a);
            if !z.norm().is_zero() {
                let inv = z.inverse().unwrap();
                prop_assert_eq!(&z * &inv, Biquaternion::one());
                prop_assert_eq!(inv.scale(&z.norm()), z.conj());
            }
        }

        #[test]
        fn forward_tube_is_invertible(x in prop::array::uniform4(-3f64..3.0), y in prop::array::uniform4(-3f64..3.0)) {
            // Sample Z with Hermitian part forced negative definite; every
            // such Z lies in the forward tube and must be invertible.
            let t = 1.0 + (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
            let z = NumBiquat::from_ecoords([
                Complex64::new(-t, x[0]),
                Complex64::new(y[1], x[1]),
                Complex64::new(y[2], x[2]),
                Complex64::new(y[3], x[3]),
            ]);
            prop_assert!(in_domain(&z, Domain::TubePlus, 1.0, 1e-12));
            prop_assert!(z.norm().norm() > 1e-9);
        }
    }
}
