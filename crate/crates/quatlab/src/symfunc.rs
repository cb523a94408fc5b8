//! Exact algebra of Laurent-polynomial functions on H_C^x with values in
//! C, S, S' or H_C, plus the conformal differential operators.
//!
//! Elements live in C[z11, z12, z21, z22, N(Z)^{-1}] where N(Z) = det Z.
//! Terms are stored as raw z-monomials times an integer power of N; the
//! single ring relation det Z = N(Z) is handled by a normalization pass
//! (common denominator + harmonic splitting) used for equality testing and
//! canonical serialization. Differential operators act directly on raw
//! monomials, which keeps them fast and simple.

use crate::biquat::{Biquaternion, NumBiquat};
use crate::rational::{rat, CRational};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Monomial key: exponents of z11, z12, z21, z22 plus an integer power of
/// N(Z).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Mono {
    pub e: [u16; 4],
    pub npow: i16,
}

impl Mono {
    pub const ONE: Mono = Mono { e: [0; 4], npow: 0 };

    pub fn var(idx: usize) -> Mono {
        let mut e = [0u16; 4];
        e[idx] = 1;
        Mono { e, npow: 0 }
    }

    pub fn n_pow(k: i16) -> Mono {
        Mono { e: [0; 4], npow: k }
    }

    /// Homogeneity degree: total z-degree plus twice the N-power.
    pub fn degree(&self) -> i32 {
        self.e.iter().map(|&x| x as i32).sum::<i32>() + 2 * self.npow as i32
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono {
            e: [
                self.e[0] + other.e[0],
                self.e[1] + other.e[1],
                self.e[2] + other.e[2],
                self.e[3] + other.e[3],
            ],
            npow: self.npow + other.npow,
        }
    }
}

pub type TermMap = BTreeMap<Mono, CRational>;

/// Value shape of a symbolic function.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Shape {
    Scalar,
    Col2,
    Row2,
    Mat2,
}

impl Shape {
    pub fn component_count(&self) -> usize {
        match self {
            Shape::Scalar => 1,
            Shape::Col2 | Shape::Row2 => 2,
            Shape::Mat2 => 4,
        }
    }
}

/// Numeric value of a symbolic function at a point, matching its shape.
#[derive(Clone, Copy, Debug)]
pub enum NumValue {
    Scalar(Complex64),
    Col([Complex64; 2]),
    Row([Complex64; 2]),
    Mat(NumBiquat),
}

impl NumValue {
    pub fn as_scalar(&self) -> Complex64 {
        match self {
            NumValue::Scalar(c) => *c,
            _ => panic!("expected scalar value"),
        }
    }

    pub fn as_col(&self) -> [Complex64; 2] {
        match self {
            NumValue::Col(c) => *c,
            _ => panic!("expected column value"),
        }
    }

    pub fn as_row(&self) -> [Complex64; 2] {
        match self {
            NumValue::Row(c) => *c,
            _ => panic!("expected row value"),
        }
    }

    pub fn as_mat(&self) -> NumBiquat {
        match self {
            NumValue::Mat(m) => *m,
            _ => panic!("expected matrix value"),
        }
    }

    /// Euclidean magnitude over all components.
    pub fn abs(&self) -> f64 {
        match self {
            NumValue::Scalar(c) => c.norm(),
            NumValue::Col(v) | NumValue::Row(v) => {
                (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
            }
            NumValue::Mat(m) => m.abs(),
        }
    }

    pub fn sub(&self, other: &NumValue) -> NumValue {
        match (self, other) {
            (NumValue::Scalar(a), NumValue::Scalar(b)) => NumValue::Scalar(a - b),
            (NumValue::Col(a), NumValue::Col(b)) => NumValue::Col([a[0] - b[0], a[1] - b[1]]),
            (NumValue::Row(a), NumValue::Row(b)) => NumValue::Row([a[0] - b[0], a[1] - b[1]]),
            (NumValue::Mat(a), NumValue::Mat(b)) => NumValue::Mat(a - b),
            _ => panic!("shape mismatch in NumValue::sub"),
        }
    }
}

/// A Laurent-polynomial function on H_C^x with exact rational coefficients.
#[derive(Clone)]
pub struct SymFunc {
    shape: Shape,
    comps: Vec<TermMap>,
}

fn add_term(tm: &mut TermMap, mono: Mono, coef: CRational) {
    if coef.is_zero() {
        return;
    }
    let entry = tm.entry(mono).or_insert_with(CRational::zero);
    *entry += &coef;
    if entry.is_zero() {
        tm.remove(&mono);
    }
}

fn poly_add(a: &TermMap, b: &TermMap) -> TermMap {
    let mut out = a.clone();
    for (m, c) in b {
        add_term(&mut out, *m, c.clone());
    }
    out
}

fn poly_scale(a: &TermMap, c: &CRational) -> TermMap {
    if c.is_zero() {
        return TermMap::new();
    }
    a.iter().map(|(m, v)| (*m, v * c)).collect()
}

fn poly_neg(a: &TermMap) -> TermMap {
    a.iter().map(|(m, v)| (*m, -v)).collect()
}

fn poly_mul(a: &TermMap, b: &TermMap) -> TermMap {
    let mut out = TermMap::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            add_term(&mut out, ma.mul(mb), ca * cb);
        }
    }
    out
}

fn binomial(n: u32, k: u32) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..k.min(n - k) {
        num *= BigInt::from(n - j);
        den *= BigInt::from(j + 1);
    }
    BigRational::new(num, den)
}

/// The determinant polynomial N(Z)^p expanded into raw z-monomials.
fn det_pow(p: u32) -> TermMap {
    let mut out = TermMap::new();
    for j in 0..=p {
        let sign = if (p - j) % 2 == 0 { 1 } else { -1 };
        let coef = CRational::from_real(binomial(p, j) * rat(sign));
        let mono = Mono {
            e: [j as u16, (p - j) as u16, (p - j) as u16, j as u16],
            npow: 0,
        };
        add_term(&mut out, mono, coef);
    }
    out
}

/// Write a component as N^{-k} * P with P a plain polynomial (npow = 0).
fn common_denominator(tm: &TermMap) -> (u32, TermMap) {
    let k = tm
        .keys()
        .map(|m| if m.npow < 0 { (-m.npow) as u32 } else { 0 })
        .max()
        .unwrap_or(0);
    let mut out = TermMap::new();
    for (m, c) in tm {
        let p = (m.npow + k as i16) as u32;
        let base = Mono { e: m.e, npow: 0 };
        if p == 0 {
            add_term(&mut out, base, c.clone());
        } else {
            for (dm, dc) in det_pow(p) {
                add_term(&mut out, base.mul(&dm), c * &dc);
            }
        }
    }
    (k, out)
}

/// Partial derivative of a single component with respect to z_{ij}
/// (idx 0..3 for z11, z12, z21, z22), including the chain rule through
/// powers of N.
fn poly_partial(tm: &TermMap, idx: usize) -> TermMap {
    // d/dz_ij N = +z22, -z21, -z12, +z11 for ij = 11, 12, 21, 22.
    const PARTNER: [usize; 4] = [3, 2, 1, 0];
    const SIGN: [i64; 4] = [1, -1, -1, 1];
    let mut out = TermMap::new();
    for (m, c) in tm {
        if m.e[idx] > 0 {
            let mut e = m.e;
            e[idx] -= 1;
            add_term(
                &mut out,
                Mono { e, npow: m.npow },
                c.scale(&rat(m.e[idx] as i64)),
            );
        }
        if m.npow != 0 {
            let mut e = m.e;
            e[PARTNER[idx]] += 1;
            add_term(
                &mut out,
                Mono { e, npow: m.npow - 1 },
                c.scale(&rat(m.npow as i64 * SIGN[idx])),
            );
        }
    }
    out
}

/// The Laplacian 4 (d11 d22 - d12 d21) on one component.
fn poly_box(tm: &TermMap) -> TermMap {
    let a = poly_partial(&poly_partial(tm, 3), 0);
    let b = poly_partial(&poly_partial(tm, 2), 1);
    let mut out = TermMap::new();
    for (m, c) in poly_add(&a, &poly_neg(&b)) {
        add_term(&mut out, m, c.scale(&rat(4)));
    }
    out
}

/// Split a homogeneous polynomial (npow = 0 everywhere) as sum_k N^k H_k
/// with each H_k harmonic, via the identity
/// box(N^k h) = 4k(deg h + k + 1) N^{k-1} h for harmonic h.
fn harmonic_split(tm: &TermMap, degree: i32) -> Vec<(u32, TermMap)> {
    if tm.is_empty() {
        return Vec::new();
    }
    let boxed = poly_box(tm);
    if boxed.is_empty() {
        return vec![(0, tm.clone())];
    }
    let inner = harmonic_split(&boxed, degree - 2);
    let mut pieces: Vec<(u32, TermMap)> = Vec::new();
    let mut rest = tm.clone();
    for (k, g) in inner {
        let kk = k + 1;
        let denom = rat(4) * rat(kk as i64) * rat((degree - k as i32) as i64);
        let h = poly_scale(&g, &CRational::from_real(denom.recip()));
        let nk = det_pow(kk);
        rest = poly_add(&rest, &poly_neg(&poly_mul(&nk, &h)));
        pieces.push((kk, h));
    }
    if !rest.is_empty() {
        pieces.insert(0, (0, rest));
    }
    pieces
}

impl SymFunc {
    pub fn zero(shape: Shape) -> Self {
        SymFunc {
            shape,
            comps: vec![TermMap::new(); shape.component_count()],
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn comps(&self) -> &[TermMap] {
        &self.comps
    }

    /// Scalar constant.
    pub fn constant(c: CRational) -> Self {
        let mut f = SymFunc::zero(Shape::Scalar);
        add_term(&mut f.comps[0], Mono::ONE, c);
        f
    }

    pub fn one() -> Self {
        SymFunc::constant(CRational::one())
    }

    /// The coordinate function z11, z12, z21 or z22 (idx 0..3).
    pub fn var(idx: usize) -> Self {
        let mut f = SymFunc::zero(Shape::Scalar);
        add_term(&mut f.comps[0], Mono::var(idx), CRational::one());
        f
    }

    /// N(Z)^k as a formal power, negative k allowed.
    pub fn n_pow(k: i16) -> Self {
        let mut f = SymFunc::zero(Shape::Scalar);
        add_term(&mut f.comps[0], Mono::n_pow(k), CRational::one());
        f
    }

    pub fn from_scalar_terms(tm: TermMap) -> Self {
        SymFunc {
            shape: Shape::Scalar,
            comps: vec![tm],
        }
    }

    /// The identity function Z -> Z as a matrix-valued element.
    pub fn z_matrix() -> Self {
        SymFunc::mat2([
            SymFunc::var(0),
            SymFunc::var(1),
            SymFunc::var(2),
            SymFunc::var(3),
        ])
    }

    /// A constant matrix-valued function.
    pub fn const_mat(b: &Biquaternion) -> Self {
        SymFunc::mat2([
            SymFunc::constant(b.z[0].clone()),
            SymFunc::constant(b.z[1].clone()),
            SymFunc::constant(b.z[2].clone()),
            SymFunc::constant(b.z[3].clone()),
        ])
    }

    pub fn col2(top: SymFunc, bottom: SymFunc) -> Self {
        assert_eq!(top.shape, Shape::Scalar);
        assert_eq!(bottom.shape, Shape::Scalar);
        SymFunc {
            shape: Shape::Col2,
            comps: vec![top.comps[0].clone(), bottom.comps[0].clone()],
        }
    }

    pub fn row2(left: SymFunc, right: SymFunc) -> Self {
        assert_eq!(left.shape, Shape::Scalar);
        assert_eq!(right.shape, Shape::Scalar);
        SymFunc {
            shape: Shape::Row2,
            comps: vec![left.comps[0].clone(), right.comps[0].clone()],
        }
    }

    /// Matrix from four scalars in row-major order.
    pub fn mat2(entries: [SymFunc; 4]) -> Self {
        let comps = entries
            .into_iter()
            .map(|f| {
                assert_eq!(f.shape, Shape::Scalar);
                f.comps.into_iter().next().unwrap()
            })
            .collect();
        SymFunc {
            shape: Shape::Mat2,
            comps,
        }
    }

    pub fn component(&self, idx: usize) -> SymFunc {
        SymFunc::from_scalar_terms(self.comps[idx].clone())
    }

    pub fn is_zero(&self) -> bool {
        // A function is zero iff each component's single-denominator
        // numerator is the zero polynomial.
        self.comps
            .iter()
            .all(|tm| common_denominator(tm).1.is_empty())
    }

    pub fn add(&self, other: &SymFunc) -> SymFunc {
        assert_eq!(self.shape, other.shape, "shape mismatch in add");
        SymFunc {
            shape: self.shape,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| poly_add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &SymFunc) -> SymFunc {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SymFunc {
        SymFunc {
            shape: self.shape,
            comps: self.comps.iter().map(poly_neg).collect(),
        }
    }

    pub fn scale(&self, c: &CRational) -> SymFunc {
        SymFunc {
            shape: self.shape,
            comps: self.comps.iter().map(|tm| poly_scale(tm, c)).collect(),
        }
    }

    pub fn scale_rat(&self, r: &BigRational) -> SymFunc {
        self.scale(&CRational::from_real(r.clone()))
    }

    /// Shape-checked product: scalars multiply anything, Col2 * Row2 gives
    /// Mat2, Row2 * Col2 gives Scalar, and matrices compose as usual.
    pub fn mul(&self, other: &SymFunc) -> Result<SymFunc> {
        use Shape::*;
        let prod = |a: usize, b: usize| poly_mul(&self.comps[a], &other.comps[b]);
        let ok = |shape, comps| Ok(SymFunc { shape, comps });
        match (self.shape, other.shape) {
            (Scalar, _) => ok(
                other.shape,
                other.comps.iter().map(|tm| poly_mul(&self.comps[0], tm)).collect(),
            ),
            (_, Scalar) => ok(
                self.shape,
                self.comps.iter().map(|tm| poly_mul(tm, &other.comps[0])).collect(),
            ),
            (Col2, Row2) => ok(
                Mat2,
                vec![prod(0, 0), prod(0, 1), prod(1, 0), prod(1, 1)],
            ),
            (Row2, Col2) => ok(Scalar, vec![poly_add(&prod(0, 0), &prod(1, 1))]),
            (Mat2, Mat2) => ok(
                Mat2,
                vec![
                    poly_add(&prod(0, 0), &prod(1, 2)),
                    poly_add(&prod(0, 1), &prod(1, 3)),
                    poly_add(&prod(2, 0), &prod(3, 2)),
                    poly_add(&prod(2, 1), &prod(3, 3)),
                ],
            ),
            (Mat2, Col2) => ok(
                Col2,
                vec![
                    poly_add(&prod(0, 0), &prod(1, 1)),
                    poly_add(&prod(2, 0), &prod(3, 1)),
                ],
            ),
            (Row2, Mat2) => ok(
                Row2,
                vec![
                    poly_add(&prod(0, 0), &prod(1, 2)),
                    poly_add(&prod(0, 1), &prod(1, 3)),
                ],
            ),
            (a, b) => Err(Error::ShapeMismatch(format!(
                "cannot multiply {a:?} by {b:?}"
            ))),
        }
    }

    /// Exact partial derivative with respect to z_{ij}, idx 0..3 for
    /// z11, z12, z21, z22.
    pub fn partial(&self, idx: usize) -> SymFunc {
        SymFunc {
            shape: self.shape,
            comps: self.comps.iter().map(|tm| poly_partial(tm, idx)).collect(),
        }
    }

    /// nabla acting from the left. On scalars the result is the full 2x2
    /// derivative matrix; rows only admit the right action.
    pub fn nabla(&self) -> Result<SymFunc> {
        // nabla = 2 * [[d11, d21], [d12, d22]] acting as a matrix.
        let two = CRational::from_int(2);
        let d = |i: usize, c: usize| self.component_partial(c, i).scale(&two);
        match self.shape {
            Shape::Scalar => Ok(SymFunc::mat2([
                d(0, 0),
                d(2, 0),
                d(1, 0),
                d(3, 0),
            ])),
            Shape::Col2 => Ok(SymFunc::col2(
                d(0, 0).add(&d(2, 1)),
                d(1, 0).add(&d(3, 1)),
            )),
            Shape::Mat2 => Ok(SymFunc::mat2([
                d(0, 0).add(&d(2, 2)),
                d(0, 1).add(&d(2, 3)),
                d(1, 0).add(&d(3, 2)),
                d(1, 1).add(&d(3, 3)),
            ])),
            Shape::Row2 => Err(Error::ShapeMismatch(
                "nabla acts on rows from the right; use nabla_right".into(),
            )),
        }
    }

    /// nabla+ acting from the left.
    pub fn nabla_plus(&self) -> Result<SymFunc> {
        // nabla+ = 2 * [[d22, -d21], [-d12, d11]].
        let two = CRational::from_int(2);
        let d = |i: usize, c: usize| self.component_partial(c, i).scale(&two);
        match self.shape {
            Shape::Scalar => Ok(SymFunc::mat2([
                d(3, 0),
                d(2, 0).neg(),
                d(1, 0).neg(),
                d(0, 0),
            ])),
            Shape::Col2 => Ok(SymFunc::col2(
                d(3, 0).sub(&d(2, 1)),
                d(0, 1).sub(&d(1, 0)),
            )),
            Shape::Mat2 => Ok(SymFunc::mat2([
                d(3, 0).sub(&d(2, 2)),
                d(3, 1).sub(&d(2, 3)),
                d(0, 2).sub(&d(1, 0)),
                d(0, 3).sub(&d(1, 1)),
            ])),
            Shape::Row2 => Err(Error::ShapeMismatch(
                "nabla+ acts on rows from the right; use nabla_plus_right".into(),
            )),
        }
    }

    /// nabla acting from the right (rows, matrices, scalars).
    pub fn nabla_right(&self) -> Result<SymFunc> {
        let two = CRational::from_int(2);
        let d = |i: usize, c: usize| self.component_partial(c, i).scale(&two);
        match self.shape {
            Shape::Scalar => self.nabla(),
            Shape::Row2 => Ok(SymFunc::row2(
                d(0, 0).add(&d(1, 1)),
                d(2, 0).add(&d(3, 1)),
            )),
            Shape::Mat2 => Ok(SymFunc::mat2([
                d(0, 0).add(&d(1, 1)),
                d(2, 0).add(&d(3, 1)),
                d(0, 2).add(&d(1, 3)),
                d(2, 2).add(&d(3, 3)),
            ])),
            Shape::Col2 => Err(Error::ShapeMismatch(
                "right nabla does not act on columns".into(),
            )),
        }
    }

    /// nabla+ acting from the right.
    pub fn nabla_plus_right(&self) -> Result<SymFunc> {
        let two = CRational::from_int(2);
        let d = |i: usize, c: usize| self.component_partial(c, i).scale(&two);
        match self.shape {
            Shape::Scalar => self.nabla_plus(),
            Shape::Row2 => Ok(SymFunc::row2(
                d(3, 0).sub(&d(1, 1)),
                d(0, 1).sub(&d(2, 0)),
            )),
            Shape::Mat2 => Ok(SymFunc::mat2([
                d(3, 0).sub(&d(1, 1)),
                d(0, 1).sub(&d(2, 0)),
                d(3, 2).sub(&d(1, 3)),
                d(0, 3).sub(&d(2, 2)),
            ])),
            Shape::Col2 => Err(Error::ShapeMismatch(
                "right nabla+ does not act on columns".into(),
            )),
        }
    }

    fn component_partial(&self, comp: usize, idx: usize) -> SymFunc {
        SymFunc::from_scalar_terms(poly_partial(&self.comps[comp], idx))
    }

    /// The Laplacian box = nabla nabla+ = 4 (d11 d22 - d12 d21),
    /// applied component-wise to any shape.
    pub fn box_op(&self) -> SymFunc {
        SymFunc {
            shape: self.shape,
            comps: self.comps.iter().map(poly_box).collect(),
        }
    }

    /// Euler degree operator: scales each monomial by its homogeneity
    /// degree.
    pub fn deg_op(&self) -> SymFunc {
        SymFunc {
            shape: self.shape,
            comps: self
                .comps
                .iter()
                .map(|tm| {
                    tm.iter()
                        .map(|(m, c)| (*m, c.scale(&rat(m.degree() as i64))))
                        .filter(|(_, c)| !c.is_zero())
                        .collect()
                })
                .collect(),
        }
    }

    /// deg + identity.
    pub fn deg_tilde(&self) -> SymFunc {
        self.deg_op().add(self)
    }

    /// (deg + 2)^{-1}: divides each homogeneous piece of degree d by d + 2.
    /// Fails when a nonzero component of degree -2 is present.
    pub fn inv_deg_plus2(&self) -> Result<SymFunc> {
        let mut out = SymFunc::zero(self.shape);
        for (d, piece) in self.grade() {
            if d == -2 {
                if !piece.is_zero() {
                    return Err(Error::DegreeMinusTwoComponent);
                }
                continue;
            }
            out = out.add(&piece.scale(&CRational::from_real(rat(1) / rat((d + 2) as i64))));
        }
        Ok(out)
    }

    /// Decomposition into homogeneous pieces keyed by degree.
    pub fn grade(&self) -> BTreeMap<i32, SymFunc> {
        let mut out: BTreeMap<i32, SymFunc> = BTreeMap::new();
        for (ci, tm) in self.comps.iter().enumerate() {
            for (m, c) in tm {
                let piece = out
                    .entry(m.degree())
                    .or_insert_with(|| SymFunc::zero(self.shape));
                add_term(&mut piece.comps[ci], *m, c.clone());
            }
        }
        out
    }

    /// Substitute Z -> Z^{-1} = Z+ / N(Z) into the function (acting on the
    /// argument, not the shape).
    pub fn subst_inverse(&self) -> SymFunc {
        self.monomial_map(|m| {
            let total: i16 = m.e.iter().map(|&x| x as i16).sum();
            let sign = if (m.e[1] + m.e[2]) % 2 == 0 { 1 } else { -1 };
            (
                Mono {
                    e: [m.e[3], m.e[1], m.e[2], m.e[0]],
                    npow: -total - m.npow,
                },
                sign,
            )
        })
    }

    /// Substitute Z -> Z+ into the function.
    pub fn subst_adjugate(&self) -> SymFunc {
        self.monomial_map(|m| {
            let sign = if (m.e[1] + m.e[2]) % 2 == 0 { 1 } else { -1 };
            (
                Mono {
                    e: [m.e[3], m.e[1], m.e[2], m.e[0]],
                    npow: m.npow,
                },
                sign,
            )
        })
    }

    /// Substitute Z -> (Z+)^T (the conjugate-transpose pattern): on real
    /// quaternion arguments this realizes entrywise complex conjugation
    /// of the coordinate functions, conj(z_ij(X)) = ((X+)^T)_ij.
    pub fn subst_conj_entries(&self) -> SymFunc {
        self.monomial_map(|m| {
            let sign = if (m.e[1] + m.e[2]) % 2 == 0 { 1 } else { -1 };
            (
                Mono {
                    e: [m.e[3], m.e[2], m.e[1], m.e[0]],
                    npow: m.npow,
                },
                sign,
            )
        })
    }

    fn monomial_map(&self, f: impl Fn(&Mono) -> (Mono, i64)) -> SymFunc {
        SymFunc {
            shape: self.shape,
            comps: self
                .comps
                .iter()
                .map(|tm| {
                    let mut out = TermMap::new();
                    for (m, c) in tm {
                        let (m2, sign) = f(m);
                        add_term(&mut out, m2, c.scale(&rat(sign)));
                    }
                    out
                })
                .collect(),
        }
    }

    /// Substitute the linear argument Z -> U Z V for constant exact
    /// matrices with N(U) N(V) = 1, so powers of N are preserved.
    pub fn subst_rotation(&self, u: &Biquaternion, v: &Biquaternion) -> Result<SymFunc> {
        let nprod = &u.norm() * &v.norm();
        if nprod != CRational::one() {
            return Err(Error::DomainViolation(
                "rotation substitution needs N(U) N(V) = 1".into(),
            ));
        }
        let us = SymFunc::const_mat(u);
        let vs = SymFunc::const_mat(v);
        let w = us.mul(&SymFunc::z_matrix())?.mul(&vs)?;
        let entries = [
            w.component(0),
            w.component(1),
            w.component(2),
            w.component(3),
        ];
        let mut comps = Vec::new();
        for tm in &self.comps {
            let mut acc = TermMap::new();
            for (m, c) in tm {
                let mut term = SymFunc::constant(c.clone());
                for (idx, &e) in m.e.iter().enumerate() {
                    for _ in 0..e {
                        term = term.mul(&entries[idx])?;
                    }
                }
                if m.npow != 0 {
                    term = term.mul(&SymFunc::n_pow(m.npow))?;
                }
                for (mm, cc) in &term.comps[0] {
                    add_term(&mut acc, *mm, cc.clone());
                }
            }
            comps.push(acc);
        }
        Ok(SymFunc {
            shape: self.shape,
            comps,
        })
    }

    /// Complex-conjugate all coefficients.
    pub fn conj_coeffs(&self) -> SymFunc {
        SymFunc {
            shape: self.shape,
            comps: self
                .comps
                .iter()
                .map(|tm| tm.iter().map(|(m, c)| (*m, c.conj())).collect())
                .collect(),
        }
    }

    /// Pointwise conjugate transpose valid on real quaternion arguments:
    /// realized exactly by conjugating coefficients, substituting
    /// Z -> (Z+)^T for the entrywise conjugation, and transposing the
    /// shape.
    pub fn dagger(&self) -> SymFunc {
        let conj = self.conj_coeffs().subst_conj_entries();
        match self.shape {
            Shape::Scalar => conj,
            Shape::Col2 => SymFunc {
                shape: Shape::Row2,
                comps: conj.comps,
            },
            Shape::Row2 => SymFunc {
                shape: Shape::Col2,
                comps: conj.comps,
            },
            Shape::Mat2 => SymFunc {
                shape: Shape::Mat2,
                comps: vec![
                    conj.comps[0].clone(),
                    conj.comps[2].clone(),
                    conj.comps[1].clone(),
                    conj.comps[3].clone(),
                ],
            },
        }
    }

    /// Numeric evaluation; fails at N(Z) = 0 when negative powers of N are
    /// present.
    pub fn eval(&self, z: &NumBiquat) -> Result<NumValue> {
        let n = z.norm();
        let needs_inverse = self
            .comps
            .iter()
            .any(|tm| tm.keys().any(|m| m.npow < 0));
        if needs_inverse && n.norm() < 1e-14 {
            return Err(Error::SingularPoint("N(Z) = 0 in evaluation".into()));
        }
        let eval_comp = |tm: &TermMap| -> Complex64 {
            let mut acc = Complex64::zero();
            for (m, c) in tm {
                let mut v = c.to_complex64();
                for (idx, &e) in m.e.iter().enumerate() {
                    if e > 0 {
                        v *= z.z[idx].powi(e as i32);
                    }
                }
                if m.npow != 0 {
                    v *= n.powi(m.npow as i32);
                }
                acc += v;
            }
            acc
        };
        let vals: Vec<Complex64> = self.comps.iter().map(eval_comp).collect();
        Ok(match self.shape {
            Shape::Scalar => NumValue::Scalar(vals[0]),
            Shape::Col2 => NumValue::Col([vals[0], vals[1]]),
            Shape::Row2 => NumValue::Row([vals[0], vals[1]]),
            Shape::Mat2 => NumValue::Mat(NumBiquat::new(vals[0], vals[1], vals[2], vals[3])),
        })
    }

    /// Canonical form: per component, a single power N^{-K} times a sum of
    /// N^j * (harmonic polynomial), with K minimal. Equality of canonical
    /// forms is term-by-term.
    pub fn canonical_form(&self) -> SymFunc {
        let canon_comp = |tm: &TermMap| -> TermMap {
            let (k, poly) = common_denominator(tm);
            // Split by homogeneity, harmonic-decompose each piece.
            let mut by_deg: BTreeMap<i32, TermMap> = BTreeMap::new();
            for (m, c) in &poly {
                add_term(by_deg.entry(m.degree()).or_default(), *m, c.clone());
            }
            let mut pieces: Vec<(i32, TermMap)> = Vec::new();
            for (d, p) in &by_deg {
                for (j, h) in harmonic_split(p, *d) {
                    pieces.push((j as i32 - k as i32, h));
                }
            }
            let mut out = TermMap::new();
            for (shift, h) in pieces {
                for (m, c) in h {
                    debug_assert_eq!(m.npow, 0);
                    add_term(
                        &mut out,
                        Mono { e: m.e, npow: shift as i16 },
                        c,
                    );
                }
            }
            out
        };
        SymFunc {
            shape: self.shape,
            comps: self.comps.iter().map(canon_comp).collect(),
        }
    }

    /// Canonical text form with sorted monomials, stable across runs.
    pub fn to_canonical_string(&self) -> String {
        let canon = self.canonical_form();
        let fmt_comp = |tm: &TermMap| -> String {
            if tm.is_empty() {
                return "0".into();
            }
            let mut parts = Vec::new();
            for (m, c) in tm {
                let mut factors = Vec::new();
                const NAMES: [&str; 4] = ["z11", "z12", "z21", "z22"];
                for (idx, &e) in m.e.iter().enumerate() {
                    if e == 1 {
                        factors.push(NAMES[idx].to_string());
                    } else if e > 1 {
                        factors.push(format!("{}^{}", NAMES[idx], e));
                    }
                }
                if m.npow == 1 {
                    factors.push("N".into());
                } else if m.npow != 0 {
                    factors.push(format!("N^{}", m.npow));
                }
                let mono_str = if factors.is_empty() {
                    "1".to_string()
                } else {
                    factors.join("*")
                };
                parts.push(format!("({})*{}", c, mono_str));
            }
            parts.join(" + ")
        };
        match self.shape {
            Shape::Scalar => fmt_comp(&canon.comps[0]),
            Shape::Col2 => format!(
                "[{}; {}]",
                fmt_comp(&canon.comps[0]),
                fmt_comp(&canon.comps[1])
            ),
            Shape::Row2 => format!(
                "[{}, {}]",
                fmt_comp(&canon.comps[0]),
                fmt_comp(&canon.comps[1])
            ),
            Shape::Mat2 => format!(
                "[{}, {}; {}, {}]",
                fmt_comp(&canon.comps[0]),
                fmt_comp(&canon.comps[1]),
                fmt_comp(&canon.comps[2]),
                fmt_comp(&canon.comps[3])
            ),
        }
    }

    /// Exact Haar-average over the sphere S^3 of squared radius `r2`
    /// (scalar functions only): the average of a matrix-entry monomial
    /// u11^a u12^b u21^c u22^d over SU(2) is
    /// delta_{ad} delta_{bc} (-1)^b a! b! / (a+b+1)!.
    pub fn s3_haar_average(&self, r2: &BigRational) -> Result<CRational> {
        if self.shape != Shape::Scalar {
            return Err(Error::ShapeMismatch("haar average needs a scalar".into()));
        }
        let mut acc = CRational::zero();
        for (m, c) in &self.comps[0] {
            let (a, b, cc, d) = (m.e[0], m.e[1], m.e[2], m.e[3]);
            if a != d || b != cc {
                continue;
            }
            let (a, b) = (a as i64, b as i64);
            let num = crate::rational::factorial(a) * crate::rational::factorial(b)
                * BigInt::from(if b % 2 == 0 { 1 } else { -1 });
            let den = crate::rational::factorial(a + b + 1);
            let mut weight = BigRational::new(num, den);
            let rpow = a + b + m.npow as i64;
            weight *= pow_rat(r2, rpow);
            acc += &c.scale(&weight);
        }
        Ok(acc)
    }

    /// Maximum total degree over all monomials (z-degree plus twice |npow|),
    /// a bandwidth bound for trigonometric quadrature.
    pub fn bandwidth(&self) -> usize {
        self.comps
            .iter()
            .flat_map(|tm| tm.keys())
            .map(|m| {
                m.e.iter().map(|&x| x as usize).sum::<usize>()
                    + 2 * m.npow.unsigned_abs() as usize
            })
            .max()
            .unwrap_or(0)
    }
}

fn pow_rat(r: &BigRational, e: i64) -> BigRational {
    if e == 0 {
        return BigRational::one();
    }
    let p = r.pow(e.unsigned_abs() as i32);
    if e > 0 {
        p
    } else {
        p.recip()
    }
}

impl PartialEq for SymFunc {
    fn eq(&self, other: &Self) -> bool {
        if self.shape != other.shape {
            return false;
        }
        self.sub(other).is_zero()
    }
}

impl fmt::Debug for SymFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_canonical_string())
    }
}

/// Harmonic decomposition of a scalar function: f = sum_k N^k H_k with
/// each H_k harmonic, keyed by k relative to the common denominator.
/// Exposed for the K-type basis machinery.
pub fn n_harmonic_decomposition(f: &SymFunc) -> Result<Vec<(i32, SymFunc)>> {
    if f.shape() != Shape::Scalar {
        return Err(Error::ShapeMismatch(
            "harmonic decomposition needs a scalar".into(),
        ));
    }
    let (k, poly) = common_denominator(&f.comps[0]);
    let mut by_deg: BTreeMap<i32, TermMap> = BTreeMap::new();
    for (m, c) in &poly {
        add_term(by_deg.entry(m.degree()).or_default(), *m, c.clone());
    }
    let mut out: BTreeMap<i32, SymFunc> = BTreeMap::new();
    for (d, p) in &by_deg {
        for (j, h) in harmonic_split(p, *d) {
            let key = j as i32 - k as i32;
            let entry = out
                .entry(key)
                .or_insert_with(|| SymFunc::zero(Shape::Scalar));
            *entry = entry.add(&SymFunc::from_scalar_terms(h));
        }
    }
    Ok(out.into_iter().filter(|(_, h)| !h.is_zero()).collect())
}

impl SymFunc {
    /// Left multiplication by Z as an operator on columns/matrices, i.e.
    /// the function Z * f(Z).
    pub fn left_mul_z(&self) -> Result<SymFunc> {
        SymFunc::z_matrix().mul(self)
    }

    /// f(Z) * Z for rows/matrices.
    pub fn right_mul_z(&self) -> Result<SymFunc> {
        self.mul(&SymFunc::z_matrix())
    }

    /// tr(M f) for matrix-valued coefficient M and any f: the scalar
    /// first-order operator sum_{pq} M_pq d_pq f applied component-wise.
    pub fn apply_first_order(&self, coeff: &SymFunc) -> Result<SymFunc> {
        if coeff.shape() != Shape::Mat2 {
            return Err(Error::ShapeMismatch(
                "first-order coefficient must be a matrix".into(),
            ));
        }
        let mut out = SymFunc::zero(self.shape);
        for (pq, tm) in coeff.comps.iter().enumerate() {
            if tm.is_empty() {
                continue;
            }
            let scalar = SymFunc::from_scalar_terms(tm.clone());
            let deriv = self.partial(pq);
            out = out.add(&scalar.mul(&deriv)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(i: usize) -> SymFunc {
        SymFunc::var(i)
    }

    #[test]
    fn product_and_n_relation() {
        // z11 z22 splits as N/2 plus the harmonic (z11 z22 + z12 z21)/2.
        let p = z(0).mul(&z(3)).unwrap();
        assert_eq!(
            p.to_canonical_string(),
            "(1/2)*N + (1/2)*z12*z21 + (1/2)*z11*z22"
        );
        // N^{-1} * N = 1.
        let one = SymFunc::n_pow(-1).mul(&SymFunc::n_pow(1)).unwrap();
        assert_eq!(one, SymFunc::one());
        // z11 z22 - z12 z21 normalizes to N.
        let det = z(0).mul(&z(3)).unwrap().sub(&z(1).mul(&z(2)).unwrap());
        assert_eq!(det, SymFunc::n_pow(1));
        assert_eq!(det.to_canonical_string(), "(1)*N");
    }

    #[test]
    fn partials() {
        assert_eq!(z(0).partial(0), SymFunc::one());
        // d11 N = z22.
        assert_eq!(SymFunc::n_pow(1).partial(0), z(3));
        // d11 N^{-1} = -z22 N^{-2}.
        let expect = z(3).mul(&SymFunc::n_pow(-2)).unwrap().neg();
        assert_eq!(SymFunc::n_pow(-1).partial(0), expect);
    }

    #[test]
    fn box_of_n() {
        // box N = 8 and box(N z11^2) = 16 z11^2.
        assert_eq!(
            SymFunc::n_pow(1).box_op(),
            SymFunc::constant(CRational::from_int(8))
        );
        let f = SymFunc::n_pow(1).mul(&z(0).mul(&z(0)).unwrap()).unwrap();
        let expect = z(0).mul(&z(0)).unwrap().scale(&CRational::from_int(16));
        assert_eq!(f.box_op(), expect);
    }

    #[test]
    fn degree_operator() {
        let f = z(0).mul(&z(2)).unwrap();
        assert_eq!(f.deg_op(), f.scale(&CRational::from_int(2)));
        let g = SymFunc::n_pow(-1);
        assert_eq!(g.deg_op(), g.scale(&CRational::from_int(-2)));
    }

    #[test]
    fn inv_deg_plus2_cases() {
        assert_eq!(
            SymFunc::one().inv_deg_plus2().unwrap(),
            SymFunc::constant(CRational::from_ratio(1, 2))
        );
        let f = SymFunc::n_pow(-1).mul(&z(0)).unwrap();
        assert_eq!(f.inv_deg_plus2().unwrap(), f);
        assert!(matches!(
            SymFunc::n_pow(-1).inv_deg_plus2(),
            Err(Error::DegreeMinusTwoComponent)
        ));
    }

    #[test]
    fn eval_points() {
        let z2 = NumBiquat::one().scale(2.0);
        let v = SymFunc::n_pow(-1).eval(&z2).unwrap().as_scalar();
        assert!((v - 0.25).norm() < 1e-14);
        let p = NumBiquat::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(4.0, 0.0),
        );
        assert!((z(0).eval(&p).unwrap().as_scalar() - 1.0).norm() < 1e-14);
        assert!(SymFunc::n_pow(-1).eval(&NumBiquat::zero()).is_err());
    }

    #[test]
    fn box_factorization() {
        // box = nabla nabla+ = nabla+ nabla on scalars.
        let f = z(0)
            .mul(&z(1))
            .unwrap()
            .mul(&SymFunc::n_pow(-1))
            .unwrap()
            .add(&z(2).mul(&z(3)).unwrap());
        let via1 = f.nabla_plus().unwrap().nabla().unwrap();
        let via2 = f.nabla().unwrap().nabla_plus().unwrap();
        let boxed = f.box_op();
        // nabla nabla+ of a scalar is box * Id.
        let expect = SymFunc::mat2([
            boxed.clone(),
            SymFunc::zero(Shape::Scalar),
            SymFunc::zero(Shape::Scalar),
            boxed.clone(),
        ]);
        assert_eq!(via1, expect);
        assert_eq!(via2, expect);
    }

    #[test]
    fn euler_identity_on_columns() {
        // 2 (deg + 2) f = nabla(Z f) + Z+ nabla+ f on columns.
        let f = SymFunc::col2(
            z(0).mul(&z(3)).unwrap().add(&SymFunc::n_pow(-1)),
            z(1).mul(&z(1)).unwrap(),
        );
        let lhs = f.deg_op().add(&f.scale(&CRational::from_int(2))).scale(&CRational::from_int(2));
        let zf = SymFunc::z_matrix().mul(&f).unwrap();
        let term1 = zf.nabla().unwrap();
        let zplus = SymFunc::mat2([z(3), z(1).neg(), z(2).neg(), z(0)]);
        let term2 = zplus.mul(&f.nabla_plus().unwrap()).unwrap();
        assert_eq!(lhs, term1.add(&term2));
    }

    #[test]
    fn haar_averages() {
        let r2 = rat(1);
        assert_eq!(
            SymFunc::one().s3_haar_average(&r2).unwrap(),
            CRational::one()
        );
        // avg(z11 z22) = 1/2, avg(z12 z21) = -1/2 on the unit sphere.
        assert_eq!(
            z(0).mul(&z(3)).unwrap().s3_haar_average(&r2).unwrap(),
            CRational::from_ratio(1, 2)
        );
        assert_eq!(
            z(1).mul(&z(2)).unwrap().s3_haar_average(&r2).unwrap(),
            CRational::from_ratio(-1, 2)
        );
        assert_eq!(
            z(0).s3_haar_average(&r2).unwrap(),
            CRational::zero()
        );
        // Radius scaling: avg over S^3_2 of z11 z22 is 1/2 * 4.
        assert_eq!(
            z(0).mul(&z(3)).unwrap().s3_haar_average(&rat(4)).unwrap(),
            CRational::from_int(2)
        );
    }

    #[test]
    fn inverse_substitution() {
        // (Z^{-1})_11 = z22 / N.
        let f = z(0).subst_inverse();
        assert_eq!(f, z(3).mul(&SymFunc::n_pow(-1)).unwrap());
        // N(Z^{-1}) = N^{-1}.
        assert_eq!(SymFunc::n_pow(1).subst_inverse(), SymFunc::n_pow(-1));
        // Involution.
        let g = z(2).mul(&SymFunc::n_pow(-2)).unwrap().add(&z(1));
        assert_eq!(g.subst_inverse().subst_inverse(), g);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn leibniz_rule(ea in prop::array::uniform4(0u16..3), eb in prop::array::uniform4(0u16..3), na in -2i16..3, nb in -2i16..3, idx in 0usize..4) {
            let f = SymFunc::from_scalar_terms([(Mono { e: ea, npow: na }, CRational::from_int(3))].into_iter().collect());
            let g = SymFunc::from_scalar_terms([(Mono { e: eb, npow: nb }, CRational::from_ratio(1, 2))].into_iter().collect());
            let prod = f.mul(&g).unwrap();
            let lhs = prod.partial(idx);
            let rhs = f.partial(idx).mul(&g).unwrap().add(&f.mul(&g.partial(idx)).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn box_commutes_with_nabla(e in prop::array::uniform4(0u16..3), n in -2i16..3) {
            let f = SymFunc::from_scalar_terms([(Mono { e, npow: n }, CRational::from_int(1))].into_iter().collect());
            let a = f.nabla().unwrap().box_op();
            let b = f.box_op().nabla().unwrap();
            prop_assert_eq!(a, b);
            let c = f.nabla_plus().unwrap().box_op();
            let d = f.box_op().nabla_plus().unwrap();
            prop_assert_eq!(c, d);
        }

        #[test]
        fn canonical_form_is_stable(e in prop::array::uniform4(0u16..3), n in -2i16..2) {
            let f = SymFunc::from_scalar_terms([(Mono { e, npow: n }, CRational::from_int(5))].into_iter().collect());
            let c1 = f.canonical_form();
            let c2 = c1.canonical_form();
            prop_assert_eq!(c1.to_canonical_string(), c2.to_canonical_string());
            prop_assert_eq!(c1, f);
        }
    }
}
