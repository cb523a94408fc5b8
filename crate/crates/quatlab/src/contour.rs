//! Numeric contour integration over S^3_R and U(2)_R, the reproducing
//! formulas for quasi anti regular and biharmonic functions, and the
//! intertwining operators J', Mx and diagonal restriction.
//!
//! S^3 is parametrized in Hopf coordinates
//! x0 + i x3 = R sqrt(1-s) e^{i xi1}, x1 + i x2 = R sqrt(s) e^{i xi2}
//! with dS = (R^3/2) ds dxi1 dxi2, so trapezoid rules in the two angles
//! and Gauss-Legendre in s integrate band-limited integrands to rounding.
//!
//! U(2)_R is parametrized as W = R e^{i theta} u with u in SU(2). The
//! holomorphic volume form inherited by the operator integrals is
//! normalized so that
//!
//! ```text
//! (i/2pi^3) Int_{U(2)_R} G dV  =  (1/4pi^3) Int G(R e^{i th} u)
//!                                  R^4 e^{4 i th} dth dS(u),
//! ```
//!
//! the overall constant being pinned by the tabulated generator values of
//! J' (see the calibration test).

use crate::bases::{basis_or_zero, eval_family, project, Family, SpaceTag};
use crate::symfunc::{Shape, SymFunc};
use crate::tcoeff::TIndex;
use crate::{Error, NumBiquat, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [0, 1].
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    // Newton iteration on the standard interval, then affine map.
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..64 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((x + 1.0) * 0.5, w * 0.5));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Node counts of a product grid; `s_nodes` along the Hopf latitude and
/// `angle_nodes` per periodic angle.
#[derive(Clone, Copy, Debug)]
pub struct ContourSpec {
    pub radius: f64,
    pub s_nodes: usize,
    pub angle_nodes: usize,
}

impl ContourSpec {
    pub fn new(radius: f64, angle_nodes: usize) -> Self {
        ContourSpec {
            radius,
            s_nodes: angle_nodes / 2 + 2,
            angle_nodes,
        }
    }
}

/// Quadrature grid over the real sphere S^3_R; weights carry the full dS
/// measure.
pub struct SphereGrid {
    pub radius: f64,
    pub nodes: Vec<(NumBiquat, f64)>,
    pub angle_nodes: usize,
}

impl SphereGrid {
    pub fn new(spec: ContourSpec) -> Self {
        let r = spec.radius;
        let gl = gauss_legendre_unit(spec.s_nodes);
        let na = spec.angle_nodes;
        let dxi = 2.0 * PI / na as f64;
        let mut nodes = Vec::with_capacity(spec.s_nodes * na * na);
        for &(s, ws) in &gl {
            let r1 = (1.0 - s).sqrt();
            let r2 = s.sqrt();
            for i1 in 0..na {
                let xi1 = dxi * i1 as f64;
                for i2 in 0..na {
                    let xi2 = dxi * i2 as f64;
                    let x = NumBiquat::from_real_ecoords([
                        r * r1 * xi1.cos(),
                        r * r2 * xi2.cos(),
                        r * r2 * xi2.sin(),
                        r * r1 * xi1.sin(),
                    ]);
                    let w = 0.5 * r * r * r * ws * dxi * dxi;
                    nodes.push((x, w));
                }
            }
        }
        SphereGrid {
            radius: r,
            nodes,
            angle_nodes: na,
        }
    }

    /// Integral of a scalar integrand against dS, fixed summation order.
    pub fn integrate(&self, f: impl Fn(&NumBiquat) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in &self.nodes {
            acc += f(x) * *w;
        }
        acc
    }

    pub fn integrate_col(&self, f: impl Fn(&NumBiquat) -> [Complex64; 2]) -> [Complex64; 2] {
        let mut acc = [Complex64::new(0.0, 0.0); 2];
        for (x, w) in &self.nodes {
            let v = f(x);
            acc[0] += v[0] * *w;
            acc[1] += v[1] * *w;
        }
        acc
    }
}

/// Integrates a band-limited scalar symbolic function exactly up to
/// rounding; errors when the grid is below the Nyquist-type bound.
pub fn integrate_s3_symbolic(f: &SymFunc, spec: ContourSpec) -> Result<Complex64> {
    if f.shape() != Shape::Scalar {
        return Err(Error::ShapeMismatch("scalar integrand expected".into()));
    }
    let bw = f.bandwidth();
    if spec.angle_nodes < bw + 1 {
        return Err(Error::QuadratureUnderresolved {
            needed: bw + 1,
            got: spec.angle_nodes,
        });
    }
    let grid = SphereGrid::new(spec);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in &grid.nodes {
        acc += f.eval(x)?.as_scalar() * *w;
    }
    Ok(acc)
}

/// Quadrature grid realizing (i/2pi^3) Int_{U(2)_R} . dV with complex
/// weights.
pub struct U2RGrid {
    pub radius: f64,
    pub nodes: Vec<(NumBiquat, Complex64)>,
}

impl U2RGrid {
    pub fn new(spec: ContourSpec) -> Self {
        let r = spec.radius;
        let sphere = SphereGrid::new(ContourSpec {
            radius: 1.0,
            s_nodes: spec.s_nodes,
            angle_nodes: spec.angle_nodes,
        });
        let nt = spec.angle_nodes;
        let dth = 2.0 * PI / nt as f64;
        let r4 = r.powi(4);
        let norm = 1.0 / (4.0 * PI.powi(3));
        let mut nodes = Vec::with_capacity(nt * sphere.nodes.len());
        for it in 0..nt {
            let th = dth * it as f64;
            let phase = Complex64::from_polar(1.0, th);
            let jac = Complex64::from_polar(r4, 4.0 * th) * dth * norm;
            for (u, wu) in &sphere.nodes {
                let w = u.scale(phase * r);
                nodes.push((w, jac * *wu));
            }
        }
        U2RGrid { radius: r, nodes }
    }

    /// The operator integral (i/2pi^3) Int G(W) dV for matrix integrands.
    pub fn integrate_mat(&self, g: impl Fn(&NumBiquat) -> NumBiquat) -> NumBiquat {
        let mut acc = NumBiquat::zero();
        for (w, c) in &self.nodes {
            acc = &acc + &g(w).scale(*c);
        }
        acc
    }

    pub fn integrate_scalar(&self, g: impl Fn(&NumBiquat) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, c) in &self.nodes {
            acc += g(w) * *c;
        }
        acc
    }
}

/// Complex-bilinear dot product of e-coordinates; equals N on the
/// diagonal.
fn edot(a: &NumBiquat, b: &NumBiquat) -> Complex64 {
    let ea = a.to_ecoords();
    let eb = b.to_ecoords();
    ea.iter().zip(eb.iter()).map(|(x, y)| x * y).sum()
}

/// The reproducing kernel (X - X0)/N(X - X0).
pub fn cf_kernel(x: &NumBiquat, x0: &NumBiquat) -> Result<NumBiquat> {
    let d = x - x0;
    let n = d.norm();
    if n.norm() < 1e-14 {
        return Err(Error::SingularPoint("kernel pole".into()));
    }
    Ok(d.scale(1.0 / n))
}

/// Euler-degree derivative in X of (X - X0)/N(X - X0).
fn deg_cf_kernel(x: &NumBiquat, x0: &NumBiquat) -> NumBiquat {
    let d = x - x0;
    let n = d.norm();
    let dd = edot(x, &d);
    &x.scale(1.0 / n) - &d.scale(2.0 * dd / (n * n))
}

/// deg of 1/N(X - X0).
fn deg_inv_n(x: &NumBiquat, x0: &NumBiquat) -> Complex64 {
    let d = x - x0;
    let n = d.norm();
    -2.0 * edot(x, &d) / (n * n)
}

/// The three-term boundary-integral reproducing formula for quasi left
/// anti regular functions over S^3_R: returns f(X0) for X0 inside the
/// ball and 0 outside.
pub fn reproduce_qlar(f: &SymFunc, x0: &NumBiquat, spec: ContourSpec) -> Result<[Complex64; 2]> {
    if f.shape() != Shape::Col2 {
        return Err(Error::ShapeMismatch("column-valued input expected".into()));
    }
    let r = spec.radius;
    let grid = SphereGrid::new(spec);
    let nf = f.nabla()?;
    let dnf = nf.deg_op();
    let mut acc = [Complex64::new(0.0, 0.0); 2];
    for (x, w) in &grid.nodes {
        let d = x - x0;
        let nd = d.norm();
        // (X - X0)/N^2 * X^{-1} * f
        let k2 = d.scale(1.0 / (nd * nd));
        let xinv = x.inverse()?;
        let fv = f.eval(x)?.as_col();
        let m = &k2 * &xinv;
        let t1 = [
            m.z[0] * fv[0] + m.z[1] * fv[1],
            m.z[2] * fv[0] + m.z[3] * fv[1],
        ];
        // deg K * nabla f
        let dk = deg_cf_kernel(x, x0);
        let nfv = nf.eval(x)?.as_col();
        let t2 = [
            dk.z[0] * nfv[0] + dk.z[1] * nfv[1],
            dk.z[2] * nfv[0] + dk.z[3] * nfv[1],
        ];
        // K * deg nabla f
        let k = d.scale(1.0 / nd);
        let dnfv = dnf.eval(x)?.as_col();
        let t3 = [
            k.z[0] * dnfv[0] + k.z[1] * dnfv[1],
            k.z[2] * dnfv[0] + k.z[3] * dnfv[1],
        ];
        let c1 = r / (2.0 * PI * PI);
        let c2 = 1.0 / (8.0 * PI * PI * r);
        for i in 0..2 {
            acc[i] += (t1[i] * c1 + (t2[i] - t3[i]) * c2) * *w;
        }
    }
    Ok(acc)
}

/// The reproducing formula for biharmonic functions on the ball of
/// radius R: f(0) plus three boundary terms recover f(X0). The kernel
/// entering the boundary terms is log[1/N(1 - X^{-1} X0)]; its Laplacian
/// contributes the two 4/N differences below.
pub fn reproduce_biharmonic(
    f: &SymFunc,
    x0: &NumBiquat,
    spec: ContourSpec,
) -> Result<Complex64> {
    if f.shape() != Shape::Scalar {
        return Err(Error::ShapeMismatch("scalar input expected".into()));
    }
    let r = spec.radius;
    let grid = SphereGrid::new(spec);
    let boxed = f.box_op();
    let dt_box = boxed.deg_tilde();
    let dt_invdeg_box = boxed.inv_deg_plus2()?.deg_tilde();
    let f0 = f.eval(&NumBiquat::zero())?.as_scalar();
    // 1D Gauss-Legendre for the (deg+2)^{-1} integral representation.
    let gl = gauss_legendre_unit(24);
    let mut acc = f0;
    for (x, w) in &grid.nodes {
        let nx = x.norm();
        let nd = (x - x0).norm();
        // deg~ (1/N(X-X0) - 1/N(X))
        let g1 = 1.0 / nd - 1.0 / nx;
        let dg1 = deg_inv_n(x, x0) + 2.0 / nx;
        let t1 = f.eval(x)?.as_scalar() * (dg1 + g1);
        // (deg~ box f) * log N(1 - X^{-1} X0)
        let xinv = x.inverse()?;
        let one = NumBiquat::one();
        let lg = (&one - &(&xinv * x0)).norm().ln();
        let t2 = dt_box.eval(x)?.as_scalar() * lg;
        // (deg~ (deg+2)^{-1} box f) * (deg+2)^{-1}(1/N(X-X0) - 1/N(X))
        let mut q = Complex64::new(0.0, 0.0);
        for &(s, ws) in &gl {
            let xs = x - &x0.scale(s);
            q -= ws * (1.0 / xs.norm() - 1.0 / nx) / s;
        }
        let t3 = dt_invdeg_box.eval(x)?.as_scalar() * q;
        let c1 = 1.0 / (2.0 * PI * PI * r);
        let c2 = 1.0 / (8.0 * PI * PI * r);
        let c3 = 1.0 / (4.0 * PI * PI * r);
        // The overall minus realizes the -log kernel.
        acc -= (t1 * c1 - t2 * c2 + t3 * c3) * *w;
    }
    Ok(acc)
}

/// The intertwining integral
/// (J' F)(Z1, Z2) = (i/2pi^3) Int (W-Z1)/N(W-Z1) F(W) (W-Z2)/N(W-Z2) dV.
pub fn j_prime(
    f: &SymFunc,
    z1: &NumBiquat,
    z2: &NumBiquat,
    grid: &U2RGrid,
) -> Result<NumBiquat> {
    if f.shape() != Shape::Mat2 {
        return Err(Error::ShapeMismatch("matrix-valued input expected".into()));
    }
    let mut acc = NumBiquat::zero();
    for (w, c) in &grid.nodes {
        let k1 = cf_kernel(w, z1)?;
        let k2 = cf_kernel(w, z2)?;
        let fv = f.eval(w)?.as_mat();
        acc = &acc + &(&(&k1 * &fv) * &k2).scale(*c);
    }
    Ok(acc)
}

/// The integral presentation of the Mx operators at a point off the
/// contour: (i/2pi^3) Int (W-Z) F(W) (W-Z) / N(W-Z)^2 dV.
pub fn mx_integral(f: &SymFunc, z: &NumBiquat, grid: &U2RGrid) -> Result<NumBiquat> {
    j_prime(f, z, z, grid)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MxSign {
    Plus,
    Zero,
    Minus,
}

/// The exact symbolic Mx operators built from subspace projections:
/// Mx^s F = proj^s(Z F Z) - Z proj^s(F Z) - proj^s(Z F) Z + Z proj^s(F) Z.
pub fn mx_operator(sign: MxSign, f: &SymFunc) -> Result<SymFunc> {
    if f.shape() != Shape::Mat2 {
        return Err(Error::ShapeMismatch("matrix-valued input expected".into()));
    }
    let space = match sign {
        MxSign::Plus => SpaceTag::ZhPlus,
        MxSign::Zero => SpaceTag::ZhZero,
        MxSign::Minus => SpaceTag::ZhMinus,
    };
    let z = SymFunc::z_matrix();
    let zf = z.mul(f)?;
    let fz = f.mul(&z)?;
    let zfz = z.mul(&fz)?;
    let out = project(space, &zfz)?
        .sub(&z.mul(&project(space, &fz)?)?)
        .sub(&project(space, &zf)?.mul(&z)?)
        .add(&z.mul(&project(space, f)?)?.mul(&z)?);
    Ok(out)
}

/// A bilocal function in series form: sum of coefficient times
/// column-family element in Z1 times row-family element in Z2.
#[derive(Clone, Debug)]
pub struct BilocalSeries {
    pub terms: Vec<((Family, TIndex), (Family, TIndex), crate::CRational)>,
}

impl BilocalSeries {
    /// Numeric evaluation at a pair of points.
    pub fn eval(&self, z1: &NumBiquat, z2: &NumBiquat) -> Result<NumBiquat> {
        let mut acc = NumBiquat::zero();
        for ((ff, fi), (gf, gi), c) in &self.terms {
            let col = eval_family(*ff, *fi, z1)?.as_col();
            let row = eval_family(*gf, *gi, z2)?.as_row();
            let cc = c.to_complex64();
            let outer = NumBiquat::new(
                col[0] * row[0],
                col[0] * row[1],
                col[1] * row[0],
                col[1] * row[1],
            );
            acc = &acc + &outer.scale(cc);
        }
        Ok(acc)
    }

    /// Diagonal restriction: the exact pointwise product expansion
    /// F(Z, Z).
    pub fn mult_diag(&self) -> Result<SymFunc> {
        let mut acc = SymFunc::zero(Shape::Mat2);
        for ((ff, fi), (gf, gi), c) in &self.terms {
            let col = basis_or_zero(*ff, *fi);
            let row = basis_or_zero(*gf, *gi);
            acc = acc.add(&col.mul(&row)?.scale(c));
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::tcoeff::t_sym;
    use crate::CRational;

    fn sphere_spec(n: usize) -> ContourSpec {
        ContourSpec::new(1.0, n)
    }

    #[test]
    fn sphere_calibration() {
        // Int dS = 2 pi^2 R^3.
        for r in [0.5, 1.0, 2.0] {
            let grid = SphereGrid::new(ContourSpec::new(r, 8));
            let v = grid.integrate(|_| Complex64::new(1.0, 0.0));
            let expect = 2.0 * PI * PI * r * r * r;
            assert!((v.re - expect).abs() < 1e-10 * expect);
            assert!(v.im.abs() < 1e-12);
        }
        // Odd integrand vanishes.
        let grid = SphereGrid::new(sphere_spec(8));
        let v = grid.integrate(|x| x.z[0]);
        assert!(v.norm() < 1e-12);
        // Schur normalization: Int |t^{1/2}_{1/2 1/2}|^2 dS = pi^2 on S^3.
        let v = grid.integrate(|x| {
            let t = crate::tcoeff::t_eval(1, 1, 1, x);
            t * t.conj()
        });
        assert!((v.re - PI * PI).abs() < 1e-10);
    }

    #[test]
    fn symbolic_integration_matches_exact_average() {
        let f = SymFunc::var(0)
            .mul(&SymFunc::var(3))
            .unwrap()
            .add(&SymFunc::n_pow(-1));
        let spec = sphere_spec(8);
        let quad = integrate_s3_symbolic(&f, spec).unwrap();
        let exact = f.s3_haar_average(&rat(1)).unwrap().to_complex64()
            * Complex64::new(2.0 * PI * PI, 0.0);
        assert!((quad - exact).norm() < 1e-10);
        // Underresolved grids are rejected.
        let high = (*t_sym(12, 0, 0)).clone();
        assert!(matches!(
            integrate_s3_symbolic(&high, ContourSpec::new(1.0, 6)),
            Err(Error::QuadratureUnderresolved { .. })
        ));
    }

    #[test]
    fn qlar_reproducing_formula() {
        let spec = ContourSpec::new(1.0, 24);
        // Constants are QLAR and reproduce themselves.
        let f = SymFunc::col2(SymFunc::one(), SymFunc::zero(Shape::Scalar));
        let x0 = NumBiquat::from_real_ecoords([0.3, 0.0, 0.0, 0.0]);
        let got = reproduce_qlar(&f, &x0, spec).unwrap();
        assert!((got[0] - 1.0).norm() < 1e-8);
        assert!(got[1].norm() < 1e-8);
        // f2 at l = 1/2 reproduces its value.
        let f = basis_or_zero(Family::F2, TIndex::new(1, 1, 0));
        let x0 = NumBiquat::from_real_ecoords([0.2, 0.1, 0.0, 0.3]);
        let got = reproduce_qlar(&f, &x0, spec).unwrap();
        let expect = f.eval(&x0).unwrap().as_col();
        assert!((got[0] - expect[0]).norm() < 1e-6);
        assert!((got[1] - expect[1]).norm() < 1e-6);
        // Outside the sphere the integral vanishes.
        let outside = NumBiquat::from_real_ecoords([2.0, 0.0, 0.0, 0.0]);
        let got = reproduce_qlar(&f, &outside, spec).unwrap();
        assert!(got[0].norm() < 1e-6 && got[1].norm() < 1e-6);
    }

    #[test]
    fn biharmonic_reproducing_formula() {
        let spec = ContourSpec::new(1.0, 24);
        let x0 = NumBiquat::from_real_ecoords([0.3, 0.0, 0.0, 0.0]);
        // Constants.
        let got = reproduce_biharmonic(&SymFunc::one(), &x0, spec).unwrap();
        assert!((got - 1.0).norm() < 1e-8);
        // f = N(X): biharmonic, value 0.09 at 0.3 e0.
        let got = reproduce_biharmonic(&SymFunc::n_pow(1), &x0, spec).unwrap();
        assert!((got - 0.09).norm() < 1e-6, "got {got}");
        // A generic biharmonic mixture N t^{1/2} + t^1.
        let f = SymFunc::n_pow(1)
            .mul(&t_sym(1, 1, -1))
            .unwrap()
            .add(&(*t_sym(2, 0, 2)).clone());
        let x0 = NumBiquat::from_real_ecoords([0.1, -0.2, 0.25, 0.05]);
        let got = reproduce_biharmonic(&f, &x0, spec).unwrap();
        let expect = f.eval(&x0).unwrap().as_scalar();
        assert!((got - expect).norm() < 1e-6, "got {got}, expect {expect}");
    }

    #[test]
    fn u2r_calibration_targets() {
        // J'^{++}(N(W)^{-1} W+) = -(Z1+Z2)/2 and J'^{++}(N(W)^{-2} W+) = 0.
        let grid = U2RGrid::new(ContourSpec::new(1.0, 16));
        let wplus = SymFunc::mat2([
            SymFunc::var(3),
            SymFunc::var(1).neg(),
            SymFunc::var(2).neg(),
            SymFunc::var(0),
        ]);
        let f1 = SymFunc::n_pow(-1).mul(&wplus).unwrap();
        let z1 = NumBiquat::from_real_ecoords([0.2, 0.1, -0.1, 0.05]);
        let z2 = NumBiquat::from_real_ecoords([-0.1, 0.3, 0.0, 0.1]);
        let got = j_prime(&f1, &z1, &z2, &grid).unwrap();
        let expect = (&z1 + &z2).scale(-0.5);
        assert!((&got - &expect).abs() < 1e-8, "got {got:?}");
        let f2 = SymFunc::n_pow(-2).mul(&wplus).unwrap();
        let got = j_prime(&f2, &z1, &z2, &grid).unwrap();
        assert!(got.abs() < 1e-8);
        // mult o J'^{++} (N^{-1} W+) = -Z on the diagonal.
        let z = NumBiquat::from_real_ecoords([0.15, -0.2, 0.1, 0.0]);
        let got = j_prime(&f1, &z, &z, &grid).unwrap();
        assert!((&got - &z.scale(-1.0)).abs() < 1e-8);
    }

    #[test]
    fn mx_operators() {
        // Mx+ (N^{-1} Z+) = -Z, matching mult o J'^{++}.
        let zplus = SymFunc::mat2([
            SymFunc::var(3),
            SymFunc::var(1).neg(),
            SymFunc::var(2).neg(),
            SymFunc::var(0),
        ]);
        let f = SymFunc::n_pow(-1).mul(&zplus).unwrap();
        let got = mx_operator(MxSign::Plus, &f).unwrap();
        assert_eq!(got, SymFunc::z_matrix().neg());
        // Mx- kills nonnegative monomial content.
        let got = mx_operator(MxSign::Minus, &SymFunc::mat2([
            SymFunc::one(),
            SymFunc::zero(Shape::Scalar),
            SymFunc::zero(Shape::Scalar),
            SymFunc::one(),
        ]))
        .unwrap();
        assert!(got.is_zero());
        // The three signs sum to zero exactly.
        let f = SymFunc::n_pow(-2)
            .mul(&SymFunc::mat2([
                (*t_sym(1, 1, 1)).clone(),
                SymFunc::var(0),
                SymFunc::n_pow(1),
                (*t_sym(2, 0, 0)).clone(),
            ]))
            .unwrap();
        let sum = mx_operator(MxSign::Plus, &f)
            .unwrap()
            .add(&mx_operator(MxSign::Zero, &f).unwrap())
            .add(&mx_operator(MxSign::Minus, &f).unwrap());
        assert!(sum.is_zero());
        // Integral presentation matches the symbolic operator inside D+.
        let grid = U2RGrid::new(ContourSpec::new(1.0, 16));
        let z = NumBiquat::from_real_ecoords([0.2, 0.0, 0.1, -0.1]);
        let sym = mx_operator(MxSign::Plus, &f).unwrap().eval(&z).unwrap().as_mat();
        let num = mx_integral(&f, &z, &grid).unwrap();
        assert!((&sym - &num).abs() < 1e-6, "sym {sym:?} num {num:?}");
    }

    #[test]
    fn bilocal_series_and_diagonal() {
        // Rank-one product example.
        let series = BilocalSeries {
            terms: vec![(
                (Family::F1, TIndex::new(0, 0, 1)),
                (Family::G1, TIndex::new(0, -1, 0)),
                CRational::one(),
            )],
        };
        let prod = series.mult_diag().unwrap();
        let expect = basis_or_zero(Family::F1, TIndex::new(0, 0, 1))
            .mul(&basis_or_zero(Family::G1, TIndex::new(0, -1, 0)))
            .unwrap();
        assert_eq!(prod, expect);
        // Numeric evaluation matches the symbolic product on the diagonal.
        let z = NumBiquat::from_real_ecoords([0.4, 0.2, -0.3, 0.1]);
        let num = series.eval(&z, &z).unwrap();
        let sym = expect.eval(&z).unwrap().as_mat();
        assert!((&num - &sym).abs() < 1e-12);
    }

    #[test]
    fn fast_family_eval_matches_symbolic() {
        let z = NumBiquat::new(
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.4),
            Complex64::new(0.7, -0.3),
            Complex64::new(0.1, 0.9),
        );
        for fam in crate::actions::ALL_FAMILIES {
            for l2 in 0..=2 {
                for idx in fam.enumerate(l2) {
                    let fast = eval_family(fam, idx, &z).unwrap();
                    let sym = basis_or_zero(fam, idx).eval(&z).unwrap();
                    assert!(
                        fast.sub(&sym).abs() < 1e-10,
                        "{fam:?} {idx:?} mismatch"
                    );
                }
            }
        }
    }
}
