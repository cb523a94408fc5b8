//! Lie-algebra actions of gl(2,H_C) on scalar, spinor and matrix valued
//! functions, the specific group elements used throughout (torus
//! diagonals, inversion, Cayley transform), and exact checks of the
//! tabulated actions on the K-type bases.

use crate::bases::{basis_or_zero, Family};
use crate::biquat::Biquaternion;
use crate::rational::{half, rat, CRational};
use crate::symfunc::{NumValue, Shape, SymFunc};
use crate::tcoeff::{t_sym, t_sym_inv, TIndex};
use crate::{Error, NumBiquat, Result};
use num_rational::BigRational;
use num_traits::Zero;

/// An element (A B; C D) of gl(2,H_C) with exact blocks.
#[derive(Clone, Debug)]
pub struct LieElem {
    pub a: Biquaternion,
    pub b: Biquaternion,
    pub c: Biquaternion,
    pub d: Biquaternion,
}

fn unit_matrix(p: usize, q: usize) -> Biquaternion {
    let mut z = [
        CRational::zero(),
        CRational::zero(),
        CRational::zero(),
        CRational::zero(),
    ];
    z[2 * p + q] = CRational::one();
    Biquaternion { z }
}

impl LieElem {
    pub fn zero() -> Self {
        LieElem {
            a: Biquaternion::zero(),
            b: Biquaternion::zero(),
            c: Biquaternion::zero(),
            d: Biquaternion::zero(),
        }
    }

    pub fn from_blocks(
        a: Biquaternion,
        b: Biquaternion,
        c: Biquaternion,
        d: Biquaternion,
    ) -> Self {
        LieElem { a, b, c, d }
    }

    /// B-block generator with B = E_{pq} (matrix unit).
    pub fn b_unit(p: usize, q: usize) -> Self {
        let mut x = LieElem::zero();
        x.b = unit_matrix(p, q);
        x
    }

    /// C-block generator with C = E_{pq}.
    pub fn c_unit(p: usize, q: usize) -> Self {
        let mut x = LieElem::zero();
        x.c = unit_matrix(p, q);
        x
    }

    /// Raising/lowering generators of the diagonal sl(2,C) x sl(2,C).
    pub fn e1() -> Self {
        let mut x = LieElem::zero();
        x.a = unit_matrix(0, 1);
        x
    }

    pub fn f1() -> Self {
        let mut x = LieElem::zero();
        x.a = unit_matrix(1, 0);
        x
    }

    pub fn e2() -> Self {
        let mut x = LieElem::zero();
        x.d = unit_matrix(1, 0);
        x
    }

    pub fn f2() -> Self {
        let mut x = LieElem::zero();
        x.d = unit_matrix(0, 1);
        x
    }

    /// The off-diagonal u(2,2) generators X = (0 E11; E11 0) and
    /// Y = (0 iE11; -iE11 0).
    pub fn u22_x() -> Self {
        let mut x = LieElem::zero();
        x.b = unit_matrix(0, 0);
        x.c = unit_matrix(0, 0);
        x
    }

    pub fn u22_y() -> Self {
        let mut y = LieElem::zero();
        y.b = unit_matrix(0, 0).scale(&CRational::i());
        y.c = unit_matrix(0, 0).scale(&-&CRational::i());
        y
    }

    /// Membership in u(2,2): A = -A*, D = -D* and C = B*.
    pub fn is_u22(&self) -> bool {
        self.a.conj_transpose() == -&self.a
            && self.d.conj_transpose() == -&self.d
            && self.c == self.b.conj_transpose()
    }

    /// Membership in the Lie algebra of the upper-triangular realization
    /// of the Poincare group: C = 0, D = -A*, re A = 0, B* = -B.
    pub fn is_poincare(&self) -> bool {
        self.c == Biquaternion::zero()
            && self.d == -&self.a.conj_transpose()
            && self.a.to_ecoords()[0].is_zero()
            && self.b.conj_transpose() == -&self.b
    }

    /// Block commutator [X, Y].
    pub fn bracket(&self, other: &LieElem) -> LieElem {
        let m = |x: &Biquaternion, y: &Biquaternion| x * y;
        LieElem {
            a: &(&m(&self.a, &other.a) + &m(&self.b, &other.c))
                - &(&m(&other.a, &self.a) + &m(&other.b, &self.c)),
            b: &(&m(&self.a, &other.b) + &m(&self.b, &other.d))
                - &(&m(&other.a, &self.b) + &m(&other.b, &self.d)),
            c: &(&m(&self.c, &other.a) + &m(&self.d, &other.c))
                - &(&m(&other.c, &self.a) + &m(&other.d, &self.c)),
            d: &(&m(&self.c, &other.b) + &m(&self.d, &other.d))
                - &(&m(&other.c, &self.b) + &m(&other.d, &self.d)),
        }
    }
}

/// The Lie-algebra actions implemented on symbolic functions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ActionName {
    /// Scalar action with no conformal weight (biharmonic picture).
    RhoPrime,
    /// Scalar action of weight (-1,-1) (kernel of order -2).
    Rho1,
    /// Scalar action weighted on one side only (harmonic picture).
    Pi0L,
    /// Quasi left anti regular action on columns.
    PiPrimeL,
    /// Quasi right anti regular action on rows.
    PiPrimeR,
    /// Left anti regular action on columns.
    PiLa,
    /// Right anti regular action on rows.
    PiRa,
    /// Left regular action on columns.
    PiL,
    /// Matrix-valued action (kernel of order -3).
    Rho2,
    /// Matrix-valued action (kernel of order -1).
    Rho2Prime,
}

impl ActionName {
    pub fn shape(&self) -> Shape {
        use ActionName::*;
        match self {
            RhoPrime | Rho1 | Pi0L => Shape::Scalar,
            PiPrimeL | PiLa | PiL => Shape::Col2,
            PiPrimeR | PiRa => Shape::Row2,
            Rho2 | Rho2Prime => Shape::Mat2,
        }
    }
}

fn tr_sym(m: &SymFunc) -> SymFunc {
    m.component(0).add(&m.component(3))
}

/// The exact Lie-algebra action of X = (A B; C D) on `f`. The common
/// first-order part is -tr(A Z d) - tr(B d) + tr(Z C Z d) + tr(Z D d);
/// the zeroth-order terms carry the conformal weights of each action.
pub fn act(action: ActionName, x: &LieElem, f: &SymFunc) -> Result<SymFunc> {
    if f.shape() != action.shape() {
        return Err(Error::ShapeMismatch(format!(
            "{action:?} acts on {:?}, got {:?}",
            action.shape(),
            f.shape()
        )));
    }
    let zs = SymFunc::z_matrix();
    let am = SymFunc::const_mat(&x.a);
    let bm = SymFunc::const_mat(&x.b);
    let cm = SymFunc::const_mat(&x.c);
    let dm = SymFunc::const_mat(&x.d);
    let az = am.mul(&zs)?;
    let zc = zs.mul(&cm)?;
    let cz = cm.mul(&zs)?;
    let zcz = zs.mul(&cz)?;
    let zd = zs.mul(&dm)?;
    let coeff = az.neg().sub(&bm).add(&zcz).add(&zd);
    let mut out = f.apply_first_order(&coeff)?;
    let tr_a = x.a.trace();
    let tr_d = x.d.trace();
    let tr_cz = tr_sym(&cz);
    let two = CRational::from_int(2);
    use ActionName::*;
    match action {
        RhoPrime => {}
        Rho1 => {
            out = out.add(&f.scale(&-&tr_a));
            out = out.add(&tr_cz.mul(f)?.scale(&two));
            out = out.add(&f.scale(&tr_d));
        }
        Pi0L => {
            out = out.add(&tr_cz.mul(f)?);
            out = out.add(&f.scale(&tr_d));
        }
        PiPrimeL => {
            out = out.add(&f.scale(&-&tr_a));
            out = out.add(&am.mul(f)?);
            out = out.add(&tr_cz.mul(f)?);
            out = out.sub(&zc.mul(f)?);
        }
        PiPrimeR => {
            out = out.add(&tr_cz.mul(f)?);
            out = out.sub(&f.mul(&cz)?);
            out = out.add(&f.scale(&tr_d));
            out = out.sub(&f.mul(&dm)?);
        }
        PiLa => {
            out = out.add(&f.scale(&-&(&tr_a * &two)));
            out = out.add(&am.mul(f)?);
            out = out.add(&tr_cz.mul(f)?.scale(&two));
            out = out.sub(&zc.mul(f)?);
        }
        PiRa => {
            out = out.add(&tr_cz.mul(f)?.scale(&two));
            out = out.sub(&f.mul(&cz)?);
            out = out.add(&f.scale(&(&tr_d * &two)));
            out = out.sub(&f.mul(&dm)?);
        }
        PiL => {
            out = out.add(&tr_cz.mul(f)?);
            out = out.add(&cz.mul(f)?);
            out = out.add(&f.scale(&tr_d));
            out = out.add(&dm.mul(f)?);
        }
        Rho2 => {
            out = out.add(&f.scale(&-&tr_a));
            out = out.sub(&f.mul(&am)?);
            out = out.add(&tr_cz.mul(f)?.scale(&two));
            out = out.add(&cz.mul(f)?);
            out = out.add(&f.mul(&zc)?);
            out = out.add(&f.scale(&tr_d));
            out = out.add(&dm.mul(f)?);
        }
        Rho2Prime => {
            out = out.add(&f.scale(&-&tr_a));
            out = out.add(&am.mul(f)?);
            out = out.add(&tr_cz.mul(f)?.scale(&two));
            out = out.sub(&zc.mul(f)?);
            out = out.sub(&f.mul(&cz)?);
            out = out.add(&f.scale(&tr_d));
            out = out.sub(&f.mul(&dm)?);
        }
    }
    Ok(out)
}

/// Group-level action of the inversion (0 1; 1 0).
pub fn inversion(action: ActionName, f: &SymFunc) -> Result<SymFunc> {
    use ActionName::*;
    match action {
        RhoPrime => Ok(f.subst_inverse()),
        Rho1 => SymFunc::n_pow(-2).mul(&f.subst_inverse()),
        PiPrimeL => {
            let sub = f.subst_inverse();
            SymFunc::z_matrix()
                .mul(&sub)?
                .mul(&SymFunc::n_pow(-1))
                .map(|g| g.neg())
        }
        PiPrimeR => {
            let sub = f.subst_inverse();
            sub.mul(&SymFunc::z_matrix())?.mul(&SymFunc::n_pow(-1))
        }
        _ => Err(Error::ShapeMismatch(format!(
            "inversion not implemented for {action:?}"
        ))),
    }
}

/// Group-level action of the torus diagonal diag(a, a, a^{-1}, a^{-1}):
/// each degree-d piece scales by lambda^{-2d} (scalar action) or
/// lambda^{-2d-1} (spinor actions).
pub fn torus_scale(action: ActionName, lambda: &CRational, f: &SymFunc) -> Result<SymFunc> {
    let lam_inv = lambda
        .inv()
        .ok_or_else(|| Error::DomainViolation("torus parameter must be nonzero".into()))?;
    let arg_scale = &lam_inv * &lam_inv;
    let mut out = SymFunc::zero(f.shape());
    for (d, piece) in f.grade() {
        let factor = if d >= 0 {
            arg_scale.pow(d as u32)
        } else {
            arg_scale.inv().unwrap().pow((-d) as u32)
        };
        out = out.add(&piece.scale(&factor));
    }
    use ActionName::*;
    match action {
        RhoPrime => Ok(out),
        PiPrimeL | PiPrimeR => Ok(out.scale(&lam_inv)),
        _ => Err(Error::ShapeMismatch(format!(
            "torus scaling not implemented for {action:?}"
        ))),
    }
}

/// Lie homomorphism check: act(X) act(Y) - act(Y) act(X) = act([X, Y]).
pub fn check_bracket(action: ActionName, x: &LieElem, y: &LieElem, f: &SymFunc) -> Result<bool> {
    let xy = act(action, x, &act(action, y, f)?)?;
    let yx = act(action, y, &act(action, x, f)?)?;
    let direct = act(action, &x.bracket(y), f)?;
    Ok(xy.sub(&yx) == direct)
}

/// The Poincare-restriction intertwining identities: for X in the
/// upper-triangular Poincare algebra,
/// nabla(pi'_l(X) f) = pi_l(X)(nabla f) and
/// box(pi'_l(X) f) = pi_la(X)(box f).
pub fn check_poincare_intertwiner(x: &LieElem, f: &SymFunc) -> Result<bool> {
    let acted = act(ActionName::PiPrimeL, x, f)?;
    let lhs1 = acted.nabla()?;
    let rhs1 = act(ActionName::PiL, x, &f.nabla()?)?;
    if lhs1 != rhs1 {
        return Ok(false);
    }
    let lhs2 = acted.box_op();
    let rhs2 = act(ActionName::PiLa, x, &f.box_op())?;
    Ok(lhs2 == rhs2)
}

// ---------------------------------------------------------------------
// Tabulated actions on the K-type bases.
// ---------------------------------------------------------------------

/// Which off-diagonal block the generator occupies.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BlockKind {
    B,
    C,
}

/// One summand of a table entry: coefficient, target family and doubled
/// index shifts.
type Summand = (BigRational, Family, i32, i32, i32);
type Combo = Vec<Summand>;

fn hf(two_x: i32) -> BigRational {
    half(two_x as i64)
}

fn r(x: i32) -> BigRational {
    rat(x as i64)
}

/// The tabulated 2x2 trace matrix for a (family, block) pair, entries
/// transcribed verbatim; the action of the E_{pq}-block generator equals
/// the combination at matrix position (q, p).
#[allow(clippy::too_many_lines)]
fn table_matrix(family: Family, kind: BlockKind, idx: TIndex) -> [[Combo; 2]; 2] {
    use BlockKind::{B, C};
    use Family::*;
    let (l2, m2, n2) = (idx.two_l, idx.two_m, idx.two_n);
    let tl = |k: i32| r(l2 + k); // the rational 2l + k
    let m = match (family, kind) {
        (F1, B) => [
            [
                vec![(-hf(l2 - m2), F1, -1, 1, 1)],
                vec![(-hf(l2 - m2), F1, -1, 1, -1)],
            ],
            [
                vec![(-hf(l2 + m2), F1, -1, -1, 1)],
                vec![(-hf(l2 + m2), F1, -1, -1, -1)],
            ],
        ],
        (F2, B) => {
            let p2 = -tl(1) / tl(0);
            let p1 = -r(1) / tl(0);
            [
                [
                    vec![
                        (p2.clone() * hf(l2 - m2), F2, -1, 1, 1),
                        (p1.clone() * hf(l2 - m2) * hf(l2 + n2 + 1), F1, -1, 1, 1),
                    ],
                    vec![
                        (p2.clone() * hf(l2 - m2), F2, -1, 1, -1),
                        (p1.clone() * -hf(l2 - m2) * hf(l2 - n2 + 1), F1, -1, 1, -1),
                    ],
                ],
                [
                    vec![
                        (p2.clone() * hf(l2 + m2), F2, -1, -1, 1),
                        (p1.clone() * hf(l2 + m2) * hf(l2 + n2 + 1), F1, -1, -1, 1),
                    ],
                    vec![
                        (p2 * hf(l2 + m2), F2, -1, -1, -1),
                        (p1 * -hf(l2 + m2) * hf(l2 - n2 + 1), F1, -1, -1, -1),
                    ],
                ],
            ]
        }
        (F3, B) => {
            let p1 = -r(1) / tl(0);
            let p2 = -r(1) / (tl(0) * tl(-1));
            let p3 = -tl(0) / tl(-1);
            [
                [
                    vec![
                        (p1.clone() * hf(l2 + n2 + 1), F1, -1, 1, 1),
                        (p2.clone() * r(-1), F2, -1, 1, 1),
                        (p3.clone() * hf(l2 - m2 - 2), F3, -1, 1, 1),
                    ],
                    vec![
                        (p1.clone() * -hf(l2 - n2 + 1), F1, -1, 1, -1),
                        (p2.clone() * r(-1), F2, -1, 1, -1),
                        (p3.clone() * hf(l2 - m2 - 2), F3, -1, 1, -1),
                    ],
                ],
                [
                    vec![
                        (p1.clone() * -hf(l2 + n2 + 1), F1, -1, -1, 1),
                        (p2.clone() * r(1), F2, -1, -1, 1),
                        (p3.clone() * hf(l2 + m2 - 2), F3, -1, -1, 1),
                    ],
                    vec![
                        (p1 * hf(l2 - n2 + 1), F1, -1, -1, -1),
                        (p2 * r(1), F2, -1, -1, -1),
                        (p3 * hf(l2 + m2 - 2), F3, -1, -1, -1),
                    ],
                ],
            ]
        }
        (F1, C) => {
            let p1 = tl(1) / tl(2);
            let p2 = r(1) / (tl(1) * tl(2));
            let p3 = r(1) / tl(1);
            [
                [
                    vec![
                        (p1.clone() * hf(l2 - n2 + 3), F1, 1, -1, -1),
                        (p2.clone() * r(-1), F2, 1, -1, -1),
                        (p3.clone() * -hf(l2 + m2), F3, 1, -1, -1),
                    ],
                    vec![
                        (p1.clone() * hf(l2 - n2 + 3), F1, 1, 1, -1),
                        (p2.clone() * r(-1), F2, 1, 1, -1),
                        (p3.clone() * hf(l2 - m2), F3, 1, 1, -1),
                    ],
                ],
                [
                    vec![
                        (p1.clone() * hf(l2 + n2 + 3), F1, 1, -1, 1),
                        (p2.clone() * r(1), F2, 1, -1, 1),
                        (p3.clone() * hf(l2 + m2), F3, 1, -1, 1),
                    ],
                    vec![
                        (p1 * hf(l2 + n2 + 3), F1, 1, 1, 1),
                        (p2 * r(1), F2, 1, 1, 1),
                        (p3 * -hf(l2 - m2), F3, 1, 1, 1),
                    ],
                ],
            ]
        }
        (F2, C) => {
            let p2 = tl(0) / tl(1);
            let p3 = r(1) / tl(1);
            [
                [
                    vec![
                        (p2.clone() * hf(l2 - n2 + 1), F2, 1, -1, -1),
                        (p3.clone() * -hf(l2 + m2) * hf(l2 - n2 + 1), F3, 1, -1, -1),
                    ],
                    vec![
                        (p2.clone() * hf(l2 - n2 + 1), F2, 1, 1, -1),
                        (p3.clone() * hf(l2 - m2) * hf(l2 - n2 + 1), F3, 1, 1, -1),
                    ],
                ],
                [
                    vec![
                        (p2.clone() * hf(l2 + n2 + 1), F2, 1, -1, 1),
                        (p3.clone() * -hf(l2 + m2) * hf(l2 + n2 + 1), F3, 1, -1, 1),
                    ],
                    vec![
                        (p2 * hf(l2 + n2 + 1), F2, 1, 1, 1),
                        (p3 * hf(l2 - m2) * hf(l2 + n2 + 1), F3, 1, 1, 1),
                    ],
                ],
            ]
        }
        (F3, C) => [
            [
                vec![(hf(l2 - n2 + 1), F3, 1, -1, -1)],
                vec![(hf(l2 - n2 + 1), F3, 1, 1, -1)],
            ],
            [
                vec![(hf(l2 + n2 + 1), F3, 1, -1, 1)],
                vec![(hf(l2 + n2 + 1), F3, 1, 1, 1)],
            ],
        ],
        (G1, B) => [
            [
                vec![(-hf(l2 - m2 + 1), G1, -1, 1, 1)],
                vec![(-hf(l2 - m2 + 1), G1, -1, 1, -1)],
            ],
            [
                vec![(-hf(l2 + m2 + 1), G1, -1, -1, 1)],
                vec![(-hf(l2 + m2 + 1), G1, -1, -1, -1)],
            ],
        ],
        (G2, B) => {
            let p1 = -r(1) / tl(0);
            let p2 = -tl(1) / tl(0);
            [
                [
                    vec![
                        (p1.clone(), G1, -1, 1, 1),
                        (p2.clone() * hf(l2 - m2 - 1), G2, -1, 1, 1),
                    ],
                    vec![
                        (p1.clone(), G1, -1, 1, -1),
                        (p2.clone() * hf(l2 - m2 - 1), G2, -1, 1, -1),
                    ],
                ],
                [
                    vec![
                        (-p1.clone(), G1, -1, -1, 1),
                        (p2.clone() * hf(l2 + m2 - 1), G2, -1, -1, 1),
                    ],
                    vec![
                        (-p1, G1, -1, -1, -1),
                        (p2 * hf(l2 + m2 - 1), G2, -1, -1, -1),
                    ],
                ],
            ]
        }
        (G3, B) => {
            let p1 = -r(1) / tl(0);
            let p2 = -r(1) / (tl(0) * tl(-1));
            let p3 = -tl(0) / tl(-1);
            [
                [
                    vec![
                        (p1.clone() * hf(l2 + n2), G1, -1, 1, 1),
                        (p2.clone() * -hf(l2 - m2 - 1) * hf(l2 + n2), G2, -1, 1, 1),
                        (p3.clone() * hf(l2 - m2 - 1), G3, -1, 1, 1),
                    ],
                    vec![
                        (p1.clone() * -hf(l2 - n2), G1, -1, 1, -1),
                        (p2.clone() * hf(l2 - m2 - 1) * hf(l2 - n2), G2, -1, 1, -1),
                        (p3.clone() * hf(l2 - m2 - 1), G3, -1, 1, -1),
                    ],
                ],
                [
                    vec![
                        (p1.clone() * -hf(l2 + n2), G1, -1, -1, 1),
                        (p2.clone() * -hf(l2 + m2 - 1) * hf(l2 + n2), G2, -1, -1, 1),
                        (p3.clone() * hf(l2 + m2 - 1), G3, -1, -1, 1),
                    ],
                    vec![
                        (p1 * hf(l2 - n2), G1, -1, -1, -1),
                        (p2 * hf(l2 + m2 - 1) * hf(l2 - n2), G2, -1, -1, -1),
                        (p3 * hf(l2 + m2 - 1), G3, -1, -1, -1),
                    ],
                ],
            ]
        }
        (G1, C) => {
            let p1 = tl(1) / tl(2);
            let pd = tl(1) * tl(2);
            let p3 = r(1) / tl(1);
            [
                [
                    vec![
                        (p1.clone() * hf(l2 - n2 + 2), G1, 1, -1, -1),
                        (-hf(l2 + m2 + 1) * hf(l2 - n2 + 2) / pd.clone(), G2, 1, -1, -1),
                        (p3.clone() * -hf(l2 + m2 + 1), G3, 1, -1, -1),
                    ],
                    vec![
                        (p1.clone() * hf(l2 - n2 + 2), G1, 1, 1, -1),
                        (hf(l2 - m2 + 1) * hf(l2 - n2 + 2) / pd.clone(), G2, 1, 1, -1),
                        (p3.clone() * hf(l2 - m2 + 1), G3, 1, 1, -1),
                    ],
                ],
                [
                    vec![
                        (p1.clone() * hf(l2 + n2 + 2), G1, 1, -1, 1),
                        (-hf(l2 + m2 + 1) * hf(l2 + n2 + 2) / pd.clone(), G2, 1, -1, 1),
                        (p3.clone() * hf(l2 + m2 + 1), G3, 1, -1, 1),
                    ],
                    vec![
                        (p1 * hf(l2 + n2 + 2), G1, 1, 1, 1),
                        (hf(l2 - m2 + 1) * hf(l2 + n2 + 2) / pd, G2, 1, 1, 1),
                        (p3 * -hf(l2 - m2 + 1), G3, 1, 1, 1),
                    ],
                ],
            ]
        }
        (G2, C) => {
            let p2 = tl(0) / tl(1);
            let p3 = r(1) / tl(1);
            [
                [
                    vec![
                        (p2.clone() * hf(l2 - n2 + 2), G2, 1, -1, -1),
                        (-p3.clone(), G3, 1, -1, -1),
                    ],
                    vec![
                        (p2.clone() * hf(l2 - n2 + 2), G2, 1, 1, -1),
                        (-p3.clone(), G3, 1, 1, -1),
                    ],
                ],
                [
                    vec![
                        (p2.clone() * hf(l2 + n2 + 2), G2, 1, -1, 1),
                        (p3.clone(), G3, 1, -1, 1),
                    ],
                    vec![(p2 * hf(l2 + n2 + 2), G2, 1, 1, 1), (p3, G3, 1, 1, 1)],
                ],
            ]
        }
        (G3, C) => [
            [
                vec![(hf(l2 - n2), G3, 1, -1, -1)],
                vec![(hf(l2 - n2), G3, 1, 1, -1)],
            ],
            [
                vec![(hf(l2 + n2), G3, 1, -1, 1)],
                vec![(hf(l2 + n2), G3, 1, 1, 1)],
            ],
        ],
        (Ft1, B) => {
            let p1 = tl(1) / tl(2);
            let p2 = r(1) / (tl(1) * tl(2));
            let p3 = r(1) / tl(1);
            [
                [
                    vec![
                        (p1.clone() * hf(l2 - m2 + 3), Ft1, 1, -1, -1),
                        (p2.clone() * r(-1), Ft2, 1, -1, -1),
                        (p3.clone() * -hf(l2 + n2), Ft3, 1, -1, -1),
                    ],
                    vec![
                        (p1.clone() * hf(l2 - m2 + 3), Ft1, 1, -1, 1),
                        (p2.clone() * r(-1), Ft2, 1, -1, 1),
                        (p3.clone() * hf(l2 - n2), Ft3, 1, -1, 1),
                    ],
                ],
                [
                    vec![
                        (p1.clone() * hf(l2 + m2 + 3), Ft1, 1, 1, -1),
                        (p2.clone() * r(1), Ft2, 1, 1, -1),
                        (p3.clone() * hf(l2 + n2), Ft3, 1, 1, -1),
                    ],
                    vec![
                        (p1 * hf(l2 + m2 + 3), Ft1, 1, 1, 1),
                        (p2 * r(1), Ft2, 1, 1, 1),
                        (p3 * -hf(l2 - n2), Ft3, 1, 1, 1),
                    ],
                ],
            ]
        }
        (Ft2, B) => {
            let p2 = tl(0) / tl(1);
            let p3 = r(1) / tl(1);
            [
                [
                    vec![
                        (p2.clone() * hf(l2 - m2 + 1), Ft2, 1, -1, -1),
                        (p3.clone() * -hf(l2 - m2 + 1) * hf(l2 + n2), Ft3, 1, -1, -1),
                    ],
                    vec![
                        (p2.clone() * hf(l2 - m2 + 1), Ft2, 1, -1, 1),
                        (p3.clone() * hf(l2 - m2 + 1) * hf(l2 - n2), Ft3, 1, -1, 1),
                    ],
                ],
                [
                    vec![
                        (p2.clone() * hf(l2 + m2 + 1), Ft2, 1, 1, -1),
                        (p3.clone() * -hf(l2 + m2 + 1) * hf(l2 + n2), Ft3, 1, 1, -1),
                    ],
                    vec![
                        (p2 * hf(l2 + m2 + 1), Ft2, 1, 1, 1),
                        (p3 * hf(l2 + m2 + 1) * hf(l2 - n2), Ft3, 1, 1, 1),
                    ],
                ],
            ]
        }
        (Ft3, B) => [
            [
                vec![(hf(l2 - m2 + 1), Ft3, 1, -1, -1)],
                vec![(hf(l2 - m2 + 1), Ft3, 1, -1, 1)],
            ],
            [
                vec![(hf(l2 + m2 + 1), Ft3, 1, 1, -1)],
                vec![(hf(l2 + m2 + 1), Ft3, 1, 1, 1)],
            ],
        ],
        (Ft1, C) => [
            [
                vec![(-hf(l2 - n2), Ft1, -1, 1, 1)],
                vec![(-hf(l2 - n2), Ft1, -1, -1, 1)],
            ],
            [
                vec![(-hf(l2 + n2), Ft1, -1, 1, -1)],
                vec![(-hf(l2 + n2), Ft1, -1, -1, -1)],
            ],
        ],
        (Ft2, C) => {
            let p2 = -tl(1) / tl(0);
            let p1 = r(1) / tl(0);
            [
                [
                    vec![
                        (p2.clone() * hf(l2 - n2), Ft2, -1, 1, 1),
                        (p1.clone() * -hf(l2 + m2 + 1) * hf(l2 - n2), Ft1, -1, 1, 1),
                    ],
                    vec![
                        (p2.clone() * hf(l2 - n2), Ft2, -1, -1, 1),
                        (p1.clone() * hf(l2 - m2 + 1) * hf(l2 - n2), Ft1, -1, -1, 1),
                    ],
                ],
                [
                    vec![
                        (p2.clone() * hf(l2 + n2), Ft2, -1, 1, -1),
                        (p1.clone() * -hf(l2 + m2 + 1) * hf(l2 + n2), Ft1, -1, 1, -1),
                    ],
                    vec![
                        (p2 * hf(l2 + n2), Ft2, -1, -1, -1),
                        (p1 * hf(l2 - m2 + 1) * hf(l2 + n2), Ft1, -1, -1, -1),
                    ],
                ],
            ]
        }
        (Ft3, C) => {
            let p1 = r(1) / tl(0);
            let p2 = r(1) / (tl(0) * tl(-1));
            let p3 = -tl(0) / tl(-1);
            [
                [
                    vec![
                        (p1.clone() * -hf(l2 + m2 + 1), Ft1, -1, 1, 1),
                        (p2.clone() * r(1), Ft2, -1, 1, 1),
                        (p3.clone() * hf(l2 - n2 - 2), Ft3, -1, 1, 1),
                    ],
                    vec![
                        (p1.clone() * hf(l2 - m2 + 1), Ft1, -1, -1, 1),
                        (p2.clone() * r(1), Ft2, -1, -1, 1),
                        (p3.clone() * hf(l2 - n2 - 2), Ft3, -1, -1, 1),
                    ],
                ],
                [
                    vec![
                        (p1.clone() * hf(l2 + m2 + 1), Ft1, -1, 1, -1),
                        (p2.clone() * r(-1), Ft2, -1, 1, -1),
                        (p3.clone() * hf(l2 + n2 - 2), Ft3, -1, 1, -1),
                    ],
                    vec![
                        (p1 * -hf(l2 - m2 + 1), Ft1, -1, -1, -1),
                        (p2 * r(-1), Ft2, -1, -1, -1),
                        (p3 * hf(l2 + n2 - 2), Ft3, -1, -1, -1),
                    ],
                ],
            ]
        }
        (Gt1, B) => {
            let p1 = tl(1) / tl(2);
            let pd = tl(1) * tl(2);
            let p3 = r(1) / tl(1);
            [
                [
                    vec![
                        (p1.clone() * hf(l2 - m2 + 2), Gt1, 1, -1, -1),
                        (-hf(l2 - m2 + 2) * hf(l2 + n2 + 1) / pd.clone(), Gt2, 1, -1, -1),
                        (p3.clone() * -hf(l2 + n2 + 1), Gt3, 1, -1, -1),
                    ],
                    vec![
                        (p1.clone() * hf(l2 - m2 + 2), Gt1, 1, -1, 1),
                        (hf(l2 - m2 + 2) * hf(l2 - n2 + 1) / pd.clone(), Gt2, 1, -1, 1),
                        (p3.clone() * hf(l2 - n2 + 1), Gt3, 1, -1, 1),
                    ],
                ],
                [
                    vec![
                        (p1.clone() * hf(l2 + m2 + 2), Gt1, 1, 1, -1),
                        (-hf(l2 + m2 + 2) * hf(l2 + n2 + 1) / pd.clone(), Gt2, 1, 1, -1),
                        (p3.clone() * hf(l2 + n2 + 1), Gt3, 1, 1, -1),
                    ],
                    vec![
                        (p1 * hf(l2 + m2 + 2), Gt1, 1, 1, 1),
                        (hf(l2 + m2 + 2) * hf(l2 - n2 + 1) / pd, Gt2, 1, 1, 1),
                        (p3 * -hf(l2 - n2 + 1), Gt3, 1, 1, 1),
                    ],
                ],
            ]
        }
        (Gt2, B) => {
            let p2 = tl(0) / tl(1);
            let p3 = r(1) / tl(1);
            [
                [
                    vec![
                        (p2.clone() * hf(l2 - m2 + 2), Gt2, 1, -1, -1),
                        (-p3.clone(), Gt3, 1, -1, -1),
                    ],
                    vec![
                        (p2.clone() * hf(l2 - m2 + 2), Gt2, 1, -1, 1),
                        (-p3.clone(), Gt3, 1, -1, 1),
                    ],
                ],
                [
                    vec![
                        (p2.clone() * hf(l2 + m2 + 2), Gt2, 1, 1, -1),
                        (p3.clone(), Gt3, 1, 1, -1),
                    ],
                    vec![(p2 * hf(l2 + m2 + 2), Gt2, 1, 1, 1), (p3, Gt3, 1, 1, 1)],
                ],
            ]
        }
        (Gt3, B) => [
            [
                vec![(hf(l2 - m2), Gt3, 1, -1, -1)],
                vec![(hf(l2 - m2), Gt3, 1, -1, 1)],
            ],
            [
                vec![(hf(l2 + m2), Gt3, 1, 1, -1)],
                vec![(hf(l2 + m2), Gt3, 1, 1, 1)],
            ],
        ],
        (Gt1, C) => [
            [
                vec![(-hf(l2 - n2 + 1), Gt1, -1, 1, 1)],
                vec![(-hf(l2 - n2 + 1), Gt1, -1, -1, 1)],
            ],
            [
                vec![(-hf(l2 + n2 + 1), Gt1, -1, 1, -1)],
                vec![(-hf(l2 + n2 + 1), Gt1, -1, -1, -1)],
            ],
        ],
        (Gt2, C) => {
            let p1 = r(1) / tl(0);
            let p2 = -tl(1) / tl(0);
            [
                [
                    vec![
                        (-p1.clone(), Gt1, -1, 1, 1),
                        (p2.clone() * hf(l2 - n2 - 1), Gt2, -1, 1, 1),
                    ],
                    vec![
                        (-p1.clone(), Gt1, -1, -1, 1),
                        (p2.clone() * hf(l2 - n2 - 1), Gt2, -1, -1, 1),
                    ],
                ],
                [
                    vec![
                        (p1.clone(), Gt1, -1, 1, -1),
                        (p2.clone() * hf(l2 + n2 - 1), Gt2, -1, 1, -1),
                    ],
                    vec![
                        (p1, Gt1, -1, -1, -1),
                        (p2 * hf(l2 + n2 - 1), Gt2, -1, -1, -1),
                    ],
                ],
            ]
        }
        (Gt3, C) => {
            let p1 = r(1) / tl(0);
            let p2 = r(1) / (tl(0) * tl(-1));
            let p3 = -tl(0) / tl(-1);
            [
                [
                    vec![
                        (p1.clone() * -hf(l2 + m2), Gt1, -1, 1, 1),
                        (p2.clone() * hf(l2 + m2) * hf(l2 - n2 - 1), Gt2, -1, 1, 1),
                        (p3.clone() * hf(l2 - n2 - 1), Gt3, -1, 1, 1),
                    ],
                    vec![
                        (p1.clone() * hf(l2 - m2), Gt1, -1, -1, 1),
                        (p2.clone() * -hf(l2 - m2) * hf(l2 - n2 - 1), Gt2, -1, -1, 1),
                        (p3.clone() * hf(l2 - n2 - 1), Gt3, -1, -1, 1),
                    ],
                ],
                [
                    vec![
                        (p1.clone() * hf(l2 + m2), Gt1, -1, 1, -1),
                        (p2.clone() * hf(l2 + m2) * hf(l2 + n2 - 1), Gt2, -1, 1, -1),
                        (p3.clone() * hf(l2 + n2 - 1), Gt3, -1, 1, -1),
                    ],
                    vec![
                        (p1 * -hf(l2 - m2), Gt1, -1, -1, -1),
                        (p2 * -hf(l2 - m2) * hf(l2 + n2 - 1), Gt2, -1, -1, -1),
                        (p3 * hf(l2 + n2 - 1), Gt3, -1, -1, -1),
                    ],
                ],
            ]
        }
        (Phi1, B) => [
            [
                vec![(-hf(l2 - m2), Phi1, -1, 1, 1)],
                vec![(-hf(l2 - m2), Phi1, -1, 1, -1)],
            ],
            [
                vec![(-hf(l2 + m2), Phi1, -1, -1, 1)],
                vec![(-hf(l2 + m2), Phi1, -1, -1, -1)],
            ],
        ],
        (Phi2, B) => {
            let p1 = -r(1) / tl(-1);
            let p2 = -tl(0) / tl(-1);
            [
                [
                    vec![
                        (p1.clone() * hf(l2 + n2), Phi1, -1, 1, 1),
                        (p2.clone() * hf(l2 - m2 - 2), Phi2, -1, 1, 1),
                    ],
                    vec![
                        (p1.clone() * -hf(l2 - n2), Phi1, -1, 1, -1),
                        (p2.clone() * hf(l2 - m2 - 2), Phi2, -1, 1, -1),
                    ],
                ],
                [
                    vec![
                        (p1.clone() * -hf(l2 + n2), Phi1, -1, -1, 1),
                        (p2.clone() * hf(l2 + m2 - 2), Phi2, -1, -1, 1),
                    ],
                    vec![
                        (p1 * hf(l2 - n2), Phi1, -1, -1, -1),
                        (p2 * hf(l2 + m2 - 2), Phi2, -1, -1, -1),
                    ],
                ],
            ]
        }
        (Phi1, C) => {
            let p1 = tl(0) / tl(1);
            let p2 = r(1) / tl(1);
            [
                [
                    vec![
                        (p1.clone() * hf(l2 - n2 + 2), Phi1, 1, -1, -1),
                        (p2.clone() * -hf(l2 + m2), Phi2, 1, -1, -1),
                    ],
                    vec![
                        (p1.clone() * hf(l2 - n2 + 2), Phi1, 1, 1, -1),
                        (p2.clone() * hf(l2 - m2), Phi2, 1, 1, -1),
                    ],
                ],
                [
                    vec![
                        (p1.clone() * hf(l2 + n2 + 2), Phi1, 1, -1, 1),
                        (p2.clone() * hf(l2 + m2), Phi2, 1, -1, 1),
                    ],
                    vec![
                        (p1 * hf(l2 + n2 + 2), Phi1, 1, 1, 1),
                        (p2 * -hf(l2 - m2), Phi2, 1, 1, 1),
                    ],
                ],
            ]
        }
        (Phi2, C) => [
            [
                vec![(hf(l2 - n2), Phi2, 1, -1, -1)],
                vec![(hf(l2 - n2), Phi2, 1, 1, -1)],
            ],
            [
                vec![(hf(l2 + n2), Phi2, 1, -1, 1)],
                vec![(hf(l2 + n2), Phi2, 1, 1, 1)],
            ],
        ],
        (PhiT1, B) => {
            let p1 = tl(0) / tl(1);
            let p2 = r(1) / tl(1);
            [
                [
                    vec![
                        (p1.clone() * hf(l2 - m2 + 2), PhiT1, 1, -1, -1),
                        (p2.clone() * -hf(l2 + n2), PhiT2, 1, -1, -1),
                    ],
                    vec![
                        (p1.clone() * hf(l2 - m2 + 2), PhiT1, 1, -1, 1),
                        (p2.clone() * hf(l2 - n2), PhiT2, 1, -1, 1),
                    ],
                ],
                [
                    vec![
                        (p1.clone() * hf(l2 + m2 + 2), PhiT1, 1, 1, -1),
                        (p2.clone() * hf(l2 + n2), PhiT2, 1, 1, -1),
                    ],
                    vec![
                        (p1 * hf(l2 + m2 + 2), PhiT1, 1, 1, 1),
                        (p2 * -hf(l2 - n2), PhiT2, 1, 1, 1),
                    ],
                ],
            ]
        }
        (PhiT2, B) => [
            [
                vec![(hf(l2 - m2), PhiT2, 1, -1, -1)],
                vec![(hf(l2 - m2), PhiT2, 1, -1, 1)],
            ],
            [
                vec![(hf(l2 + m2), PhiT2, 1, 1, -1)],
                vec![(hf(l2 + m2), PhiT2, 1, 1, 1)],
            ],
        ],
        (PhiT1, C) => [
            [
                vec![(-hf(l2 - n2), PhiT1, -1, 1, 1)],
                vec![(-hf(l2 - n2), PhiT1, -1, -1, 1)],
            ],
            [
                vec![(-hf(l2 + n2), PhiT1, -1, 1, -1)],
                vec![(-hf(l2 + n2), PhiT1, -1, -1, -1)],
            ],
        ],
        (PhiT2, C) => {
            let p1 = r(1) / tl(-1);
            let p2 = -tl(0) / tl(-1);
            [
                [
                    vec![
                        (p1.clone() * -hf(l2 + m2), PhiT1, -1, 1, 1),
                        (p2.clone() * hf(l2 - n2 - 2), PhiT2, -1, 1, 1),
                    ],
                    vec![
                        (p1.clone() * hf(l2 - m2), PhiT1, -1, -1, 1),
                        (p2.clone() * hf(l2 - n2 - 2), PhiT2, -1, -1, 1),
                    ],
                ],
                [
                    vec![
                        (p1.clone() * hf(l2 + m2), PhiT1, -1, 1, -1),
                        (p2.clone() * hf(l2 + n2 - 2), PhiT2, -1, 1, -1),
                    ],
                    vec![
                        (p1 * -hf(l2 - m2), PhiT1, -1, -1, -1),
                        (p2 * hf(l2 + n2 - 2), PhiT2, -1, -1, -1),
                    ],
                ],
            ]
        }
    };
    m
}

fn realize_combo(combo: &Combo, idx: TIndex) -> SymFunc {
    let shape = combo
        .first()
        .map(|(_, fam, _, _, _)| fam.shape())
        .unwrap_or(Shape::Scalar);
    let mut acc = SymFunc::zero(shape);
    for (coef, fam, dl, dm, dn) in combo {
        if coef.is_zero() {
            continue;
        }
        let target = TIndex::new(idx.two_l + dl, idx.two_m + dm, idx.two_n + dn);
        acc = acc.add(&basis_or_zero(*fam, target).scale_rat(coef));
    }
    acc
}

fn action_for_family(family: Family) -> ActionName {
    match family.shape() {
        Shape::Scalar => ActionName::RhoPrime,
        Shape::Col2 => ActionName::PiPrimeL,
        Shape::Row2 => ActionName::PiPrimeR,
        Shape::Mat2 => unreachable!("no matrix-valued basis family"),
    }
}

/// Checks one tabulated action row exactly: the symbolic action of the
/// E_{pq} generator in the given block against the printed combination.
pub fn check_table_row(
    family: Family,
    kind: BlockKind,
    idx: TIndex,
    p: usize,
    q: usize,
) -> Result<bool> {
    if !family.index_valid(idx) {
        return Err(Error::IndexOutOfRange(format!(
            "{family:?} has no element at {idx:?}"
        )));
    }
    let m = table_matrix(family, kind, idx);
    let x = match kind {
        BlockKind::B => LieElem::b_unit(p, q),
        BlockKind::C => LieElem::c_unit(p, q),
    };
    let action = action_for_family(family);
    let lhs = act(action, &x, &basis_or_zero(family, idx))?;
    let rhs = realize_combo(&m[q][p], idx);
    Ok(lhs == rhs)
}

pub const ALL_FAMILIES: [Family; 16] = [
    Family::F1,
    Family::F2,
    Family::F3,
    Family::G1,
    Family::G2,
    Family::G3,
    Family::Ft1,
    Family::Ft2,
    Family::Ft3,
    Family::Gt1,
    Family::Gt2,
    Family::Gt3,
    Family::Phi1,
    Family::Phi2,
    Family::PhiT1,
    Family::PhiT2,
];

/// Sweeps every tabulated formula for all valid indices with
/// 2l <= `max_two_l` and all four generator positions; returns the
/// failures (empty means full fidelity) and the number of rows checked.
pub fn sweep_tables(max_two_l: i32) -> Result<(Vec<String>, usize)> {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for family in ALL_FAMILIES {
        for kind in [BlockKind::B, BlockKind::C] {
            for two_l in 0..=max_two_l {
                for idx in family.enumerate(two_l) {
                    for p in 0..2 {
                        for q in 0..2 {
                            checked += 1;
                            if !check_table_row(family, kind, idx, p, q)? {
                                failures.push(format!(
                                    "{family:?} {kind:?} {idx:?} E{}{}",
                                    p + 1,
                                    q + 1
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((failures, checked))
}

// ---------------------------------------------------------------------
// Raising/lowering patterns for the diagonal sl(2) x sl(2) generators.
// ---------------------------------------------------------------------

fn chf(c: &CRational, two_x: i32) -> CRational {
    c.scale(&hf(two_x))
}

/// The sixteen printed raising/lowering pattern identities for
/// E1, F1, E2, F2 on generic two-component columns/rows with
/// coefficients (alpha, beta) at pattern indices (2l, 2m, 2n).
pub fn check_ef_patterns(
    alpha: &CRational,
    beta: &CRational,
    l2: i32,
    m2: i32,
    n2: i32,
) -> Result<bool> {
    let t = |n: i32, m: i32| (*t_sym(l2, n, m)).clone();
    let ti = |n: i32, m: i32| {
        SymFunc::n_pow(-1)
            .mul(&t_sym_inv(l2, n, m))
            .expect("scalar product")
    };

    // Column pattern (alpha t^l_{n-1/2, m}; beta t^l_{n+1/2, m}).
    let col_pat = SymFunc::col2(t(n2 - 1, m2).scale(alpha), t(n2 + 1, m2).scale(beta));
    let cases: Vec<(LieElem, SymFunc)> = vec![
        (
            LieElem::e1(),
            SymFunc::col2(
                t(n2 + 1, m2).scale(&(beta - &chf(alpha, l2 + n2 + 1))),
                t(n2 + 3, m2).scale(&-&chf(beta, l2 + n2 + 3)),
            ),
        ),
        (
            LieElem::f1(),
            SymFunc::col2(
                t(n2 - 3, m2).scale(&-&chf(alpha, l2 - n2 + 3)),
                t(n2 - 1, m2).scale(&(alpha - &chf(beta, l2 - n2 + 1))),
            ),
        ),
        (
            LieElem::e2(),
            SymFunc::col2(
                t(n2 - 1, m2 + 2).scale(&chf(alpha, l2 - m2)),
                t(n2 + 1, m2 + 2).scale(&chf(beta, l2 - m2)),
            ),
        ),
        (
            LieElem::f2(),
            SymFunc::col2(
                t(n2 - 1, m2 - 2).scale(&chf(alpha, l2 + m2)),
                t(n2 + 1, m2 - 2).scale(&chf(beta, l2 + m2)),
            ),
        ),
    ];
    for (x, expect) in cases {
        if act(ActionName::PiPrimeL, &x, &col_pat)? != expect {
            return Ok(false);
        }
    }

    // Row pattern (alpha t^l_{n, m-1/2}, beta t^l_{n, m+1/2}).
    let row_pat = SymFunc::row2(t(n2, m2 - 1).scale(alpha), t(n2, m2 + 1).scale(beta));
    let cases: Vec<(LieElem, SymFunc)> = vec![
        (
            LieElem::e1(),
            SymFunc::row2(
                t(n2 + 2, m2 - 1).scale(&-&chf(alpha, l2 + n2 + 2)),
                t(n2 + 2, m2 + 1).scale(&-&chf(beta, l2 + n2 + 2)),
            ),
        ),
        (
            LieElem::f1(),
            SymFunc::row2(
                t(n2 - 2, m2 - 1).scale(&-&chf(alpha, l2 - n2 + 2)),
                t(n2 - 2, m2 + 1).scale(&-&chf(beta, l2 - n2 + 2)),
            ),
        ),
        (
            LieElem::e2(),
            SymFunc::row2(
                t(n2, m2 + 1).scale(&(&chf(alpha, l2 - m2 + 1) - beta)),
                t(n2, m2 + 3).scale(&chf(beta, l2 - m2 - 1)),
            ),
        ),
        (
            LieElem::f2(),
            SymFunc::row2(
                t(n2, m2 - 3).scale(&chf(alpha, l2 + m2 - 1)),
                t(n2, m2 - 1).scale(&(&chf(beta, l2 + m2 + 1) - alpha)),
            ),
        ),
    ];
    for (x, expect) in cases {
        if act(ActionName::PiPrimeR, &x, &row_pat)? != expect {
            return Ok(false);
        }
    }

    // Negative column pattern
    // (alpha N^{-1} t^l_{m, n+1/2}(Z^{-1}); beta N^{-1} t^l_{m, n-1/2}(Z^{-1})).
    let col_pat = SymFunc::col2(ti(m2, n2 + 1).scale(alpha), ti(m2, n2 - 1).scale(beta));
    let cases: Vec<(LieElem, SymFunc)> = vec![
        (
            LieElem::e1(),
            SymFunc::col2(
                ti(m2, n2 - 1).scale(&(&chf(alpha, l2 + n2 + 1) + beta)),
                ti(m2, n2 - 3).scale(&chf(beta, l2 + n2 - 1)),
            ),
        ),
        (
            LieElem::f1(),
            SymFunc::col2(
                ti(m2, n2 + 3).scale(&chf(alpha, l2 - n2 - 1)),
                ti(m2, n2 + 1).scale(&(alpha + &chf(beta, l2 - n2 + 1))),
            ),
        ),
        (
            LieElem::e2(),
            SymFunc::col2(
                ti(m2 - 2, n2 + 1).scale(&-&chf(alpha, l2 - m2 + 2)),
                ti(m2 - 2, n2 - 1).scale(&-&chf(beta, l2 - m2 + 2)),
            ),
        ),
        (
            LieElem::f2(),
            SymFunc::col2(
                ti(m2 + 2, n2 + 1).scale(&-&chf(alpha, l2 + m2 + 2)),
                ti(m2 + 2, n2 - 1).scale(&-&chf(beta, l2 + m2 + 2)),
            ),
        ),
    ];
    for (x, expect) in cases {
        if act(ActionName::PiPrimeL, &x, &col_pat)? != expect {
            return Ok(false);
        }
    }

    // Negative row pattern
    // (alpha N^{-1} t^l_{m+1/2, n}(Z^{-1}), beta N^{-1} t^l_{m-1/2, n}(Z^{-1})).
    let row_pat = SymFunc::row2(ti(m2 + 1, n2).scale(alpha), ti(m2 - 1, n2).scale(beta));
    let cases: Vec<(LieElem, SymFunc)> = vec![
        (
            LieElem::e1(),
            SymFunc::row2(
                ti(m2 + 1, n2 - 2).scale(&chf(alpha, l2 + n2)),
                ti(m2 - 1, n2 - 2).scale(&chf(beta, l2 + n2)),
            ),
        ),
        (
            LieElem::f1(),
            SymFunc::row2(
                ti(m2 + 1, n2 + 2).scale(&chf(alpha, l2 - n2)),
                ti(m2 - 1, n2 + 2).scale(&chf(beta, l2 - n2)),
            ),
        ),
        (
            LieElem::e2(),
            SymFunc::row2(
                ti(m2 - 1, n2).scale(&-&(&chf(alpha, l2 - m2 + 1) + beta)),
                ti(m2 - 3, n2).scale(&-&chf(beta, l2 - m2 + 3)),
            ),
        ),
        (
            LieElem::f2(),
            SymFunc::row2(
                ti(m2 + 3, n2).scale(&-&chf(alpha, l2 + m2 + 3)),
                ti(m2 + 1, n2).scale(&-&(alpha + &chf(beta, l2 + m2 + 1))),
            ),
        ),
    ];
    for (x, expect) in cases {
        if act(ActionName::PiPrimeR, &x, &row_pat)? != expect {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The printed combinations for the off-diagonal u(2,2) generator
/// X = (0 E11; E11 0) on the f- and phi-families.
pub fn check_u22_x_combos(max_two_l: i32) -> Result<bool> {
    let x = LieElem::u22_x();
    let cr = CRational::from_real;
    for l2 in 0..=max_two_l {
        for idx in Family::F1.enumerate(l2) {
            let (m2, n2) = (idx.two_m, idx.two_n);
            let lhs = act(ActionName::PiPrimeL, &x, &basis_or_zero(Family::F1, idx))?;
            let rhs = basis_or_zero(Family::F1, TIndex::new(l2 - 1, m2 + 1, n2 + 1))
                .scale_rat(&-hf(l2 - m2))
                .add(
                    &basis_or_zero(Family::F1, TIndex::new(l2 + 1, m2 - 1, n2 - 1))
                        .scale(&cr(r(l2 + 1) * hf(l2 - n2 + 3) / r(l2 + 2))),
                )
                .add(
                    &basis_or_zero(Family::F2, TIndex::new(l2 + 1, m2 - 1, n2 - 1))
                        .scale(&cr(-r(1) / (r(l2 + 1) * r(l2 + 2)))),
                )
                .add(
                    &basis_or_zero(Family::F3, TIndex::new(l2 + 1, m2 - 1, n2 - 1))
                        .scale(&cr(-hf(l2 + m2) / r(l2 + 1))),
                );
            if lhs != rhs {
                return Ok(false);
            }
        }
        for idx in Family::F2.enumerate(l2) {
            let (m2, n2) = (idx.two_m, idx.two_n);
            let lhs = act(ActionName::PiPrimeL, &x, &basis_or_zero(Family::F2, idx))?;
            let rhs = basis_or_zero(Family::F1, TIndex::new(l2 - 1, m2 + 1, n2 + 1))
                .scale(&cr(-hf(l2 - m2) * hf(l2 + n2 + 1) / r(l2)))
                .add(
                    &basis_or_zero(Family::F2, TIndex::new(l2 - 1, m2 + 1, n2 + 1))
                        .scale(&cr(-r(l2 + 1) * hf(l2 - m2) / r(l2))),
                )
                .add(
                    &basis_or_zero(Family::F2, TIndex::new(l2 + 1, m2 - 1, n2 - 1))
                        .scale(&cr(r(l2) * hf(l2 - n2 + 1) / r(l2 + 1))),
                )
                .add(
                    &basis_or_zero(Family::F3, TIndex::new(l2 + 1, m2 - 1, n2 - 1))
                        .scale(&cr(-hf(l2 + m2) * hf(l2 - n2 + 1) / r(l2 + 1))),
                );
            if lhs != rhs {
                return Ok(false);
            }
        }
        for idx in Family::F3.enumerate(l2) {
            let (m2, n2) = (idx.two_m, idx.two_n);
            let lhs = act(ActionName::PiPrimeL, &x, &basis_or_zero(Family::F3, idx))?;
            let rhs = basis_or_zero(Family::F1, TIndex::new(l2 - 1, m2 + 1, n2 + 1))
                .scale(&cr(-hf(l2 + n2 + 1) / r(l2)))
                .add(
                    &basis_or_zero(Family::F2, TIndex::new(l2 - 1, m2 + 1, n2 + 1))
                        .scale(&cr(r(1) / (r(l2) * r(l2 - 1)))),
                )
                .add(
                    &basis_or_zero(Family::F3, TIndex::new(l2 - 1, m2 + 1, n2 + 1))
                        .scale(&cr(-r(l2) * hf(l2 - m2 - 2) / r(l2 - 1))),
                )
                .add(
                    &basis_or_zero(Family::F3, TIndex::new(l2 + 1, m2 - 1, n2 - 1))
                        .scale_rat(&hf(l2 - n2 + 1)),
                );
            if lhs != rhs {
                return Ok(false);
            }
        }
        for idx in Family::Phi1.enumerate(l2) {
            let (m2, n2) = (idx.two_m, idx.two_n);
            let lhs = act(ActionName::RhoPrime, &x, &basis_or_zero(Family::Phi1, idx))?;
            let rhs = basis_or_zero(Family::Phi1, TIndex::new(l2 - 1, m2 + 1, n2 + 1))
                .scale_rat(&-hf(l2 - m2))
                .add(
                    &basis_or_zero(Family::Phi1, TIndex::new(l2 + 1, m2 - 1, n2 - 1))
                        .scale(&cr(r(l2) * hf(l2 - n2 + 2) / r(l2 + 1))),
                )
                .add(
                    &basis_or_zero(Family::Phi2, TIndex::new(l2 + 1, m2 - 1, n2 - 1))
                        .scale(&cr(-hf(l2 + m2) / r(l2 + 1))),
                );
            if lhs != rhs {
                return Ok(false);
            }
        }
        for idx in Family::Phi2.enumerate(l2) {
            let (m2, n2) = (idx.two_m, idx.two_n);
            let lhs = act(ActionName::RhoPrime, &x, &basis_or_zero(Family::Phi2, idx))?;
            let rhs = basis_or_zero(Family::Phi1, TIndex::new(l2 - 1, m2 + 1, n2 + 1))
                .scale(&cr(-hf(l2 + n2) / r(l2 - 1)))
                .add(
                    &basis_or_zero(Family::Phi2, TIndex::new(l2 - 1, m2 + 1, n2 + 1))
                        .scale(&cr(-r(l2) * hf(l2 - m2 - 2) / r(l2 - 1))),
                )
                .add(
                    &basis_or_zero(Family::Phi2, TIndex::new(l2 + 1, m2 - 1, n2 - 1))
                        .scale_rat(&hf(l2 - n2)),
                );
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The inversion correspondences between the families:
/// f_a <-> -ft_a with (m, n) swapped, g_a <-> +gt_a, phi_a <-> phit_a.
pub fn check_inversion_map(max_two_l: i32) -> Result<bool> {
    for l2 in 0..=max_two_l {
        for (fam, target) in [
            (Family::F1, Family::Ft1),
            (Family::F2, Family::Ft2),
            (Family::F3, Family::Ft3),
        ] {
            for idx in fam.enumerate(l2) {
                let lhs = inversion(ActionName::PiPrimeL, &basis_or_zero(fam, idx))?;
                let rhs = basis_or_zero(target, TIndex::new(l2, idx.two_n, idx.two_m)).neg();
                if lhs != rhs {
                    return Ok(false);
                }
                let back = inversion(ActionName::PiPrimeL, &rhs)?;
                if back != basis_or_zero(fam, idx) {
                    return Ok(false);
                }
            }
        }
        for (fam, target) in [
            (Family::G1, Family::Gt1),
            (Family::G2, Family::Gt2),
            (Family::G3, Family::Gt3),
        ] {
            for idx in fam.enumerate(l2) {
                let lhs = inversion(ActionName::PiPrimeR, &basis_or_zero(fam, idx))?;
                let rhs = basis_or_zero(target, TIndex::new(l2, idx.two_n, idx.two_m));
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        for (fam, target) in [(Family::Phi1, Family::PhiT1), (Family::Phi2, Family::PhiT2)] {
            for idx in fam.enumerate(l2) {
                let lhs = inversion(ActionName::RhoPrime, &basis_or_zero(fam, idx))?;
                let rhs = basis_or_zero(target, TIndex::new(l2, idx.two_n, idx.two_m));
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------
// Cayley transform.
// ---------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CayleyDirection {
    /// Bounded domain to forward tube: Z -> -i (Z+1)(Z-1)^{-1}.
    Forward,
    /// Forward tube to bounded domain: Z -> (Z-i)(Z+i)^{-1}.
    Inverse,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CayleyFlavor {
    PiPrimeL,
    PiLa,
    PiL,
    Pi0L,
}

/// A function in the shifted Laurent ring: num / den^den_pow where den is
/// the shifted norm polynomial N(Z-1) (forward) or N(Z+i) (inverse).
#[derive(Clone, Debug)]
pub struct CayleyImage {
    pub num: SymFunc,
    pub den: SymFunc,
    pub den_pow: u32,
}

impl CayleyImage {
    pub fn eval(&self, z: &NumBiquat) -> Result<NumValue> {
        let d = self.den.eval(z)?.as_scalar();
        if d.norm() < 1e-14 && self.den_pow > 0 {
            return Err(Error::SingularPoint("shifted norm vanishes".into()));
        }
        let scale = d.powi(-(self.den_pow as i32));
        Ok(match self.num.eval(z)? {
            NumValue::Scalar(v) => NumValue::Scalar(v * scale),
            NumValue::Col(v) => NumValue::Col([v[0] * scale, v[1] * scale]),
            NumValue::Row(v) => NumValue::Row([v[0] * scale, v[1] * scale]),
            NumValue::Mat(m) => NumValue::Mat(m.scale(scale)),
        })
    }
}

struct ShiftedRing {
    den: SymFunc,
    arg_num: [SymFunc; 4],
    norm_num: SymFunc,
}

fn shifted_ring(direction: CayleyDirection) -> ShiftedRing {
    let i = CRational::i();
    let one = SymFunc::one();
    let z11 = SymFunc::var(0);
    let z12 = SymFunc::var(1);
    let z21 = SymFunc::var(2);
    let z22 = SymFunc::var(3);
    match direction {
        CayleyDirection::Forward => {
            // den = N(Z-1); argument = -i (Z+1) adj(Z-1) / den;
            // N(argument) = -N(Z+1)/den.
            let den = SymFunc::n_pow(1).sub(&z11).sub(&z22).add(&one);
            let zp = SymFunc::mat2([z11.add(&one), z12.clone(), z21.clone(), z22.add(&one)]);
            let adj = SymFunc::mat2([z22.sub(&one), z12.neg(), z21.neg(), z11.sub(&one)]);
            let w = zp.mul(&adj).unwrap().scale(&-&i);
            let norm_num = SymFunc::n_pow(1).add(&z11).add(&z22).add(&one).neg();
            ShiftedRing {
                den,
                arg_num: [w.component(0), w.component(1), w.component(2), w.component(3)],
                norm_num,
            }
        }
        CayleyDirection::Inverse => {
            // den = N(Z+i); argument = (Z-i) adj(Z+i) / den;
            // N(argument) = N(Z-i)/den.
            let ii = SymFunc::constant(i);
            let den = SymFunc::n_pow(1)
                .add(&z11.mul(&ii).unwrap())
                .add(&z22.mul(&ii).unwrap())
                .sub(&one);
            let zm = SymFunc::mat2([z11.sub(&ii), z12.clone(), z21.clone(), z22.sub(&ii)]);
            let adj = SymFunc::mat2([z22.add(&ii), z12.neg(), z21.neg(), z11.add(&ii)]);
            let w = zm.mul(&adj).unwrap();
            let norm_num = SymFunc::n_pow(1)
                .sub(&z11.mul(&ii).unwrap())
                .sub(&z22.mul(&ii).unwrap())
                .sub(&one);
            ShiftedRing {
                den,
                arg_num: [w.component(0), w.component(1), w.component(2), w.component(3)],
                norm_num,
            }
        }
    }
}

/// Symbolic Cayley transform of a polynomial input (nonnegative powers of
/// N only), realized in the shifted Laurent ring.
pub fn cayley(
    direction: CayleyDirection,
    flavor: CayleyFlavor,
    f: &SymFunc,
) -> Result<CayleyImage> {
    for tm in f.comps() {
        if tm.keys().any(|m| m.npow < 0) {
            return Err(Error::DomainViolation(
                "symbolic Cayley images need polynomial input (N powers >= 0)".into(),
            ));
        }
    }
    let ring = shifted_ring(direction);
    // Uniform denominator exponent: total degree in W (each entry of the
    // argument and each factor of N(W) carries one resp. two powers).
    let mut max_pow = 0u32;
    for tm in f.comps() {
        for m in tm.keys() {
            let p = m.e.iter().map(|&x| x as u32).sum::<u32>() + 2 * m.npow as u32;
            max_pow = max_pow.max(p);
        }
    }
    let mut comps_out: Vec<SymFunc> = Vec::new();
    for ci in 0..f.shape().component_count() {
        let mut acc = SymFunc::zero(Shape::Scalar);
        for (m, c) in &f.comps()[ci] {
            let mut term = SymFunc::constant(c.clone());
            let mut pow = 0u32;
            for (idx, &e) in m.e.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&ring.arg_num[idx])?;
                    pow += 1;
                }
            }
            for _ in 0..m.npow {
                // N(W) = norm_num / den counts for two powers of the
                // uniform denominator, so pad with one factor of den.
                term = term.mul(&ring.norm_num)?.mul(&ring.den)?;
                pow += 2;
            }
            for _ in pow..max_pow {
                term = term.mul(&ring.den)?;
            }
            acc = acc.add(&term);
        }
        comps_out.push(acc);
    }
    let subbed = match f.shape() {
        Shape::Scalar => comps_out[0].clone(),
        Shape::Col2 => SymFunc::col2(comps_out[0].clone(), comps_out[1].clone()),
        Shape::Row2 => SymFunc::row2(comps_out[0].clone(), comps_out[1].clone()),
        Shape::Mat2 => SymFunc::mat2([
            comps_out[0].clone(),
            comps_out[1].clone(),
            comps_out[2].clone(),
            comps_out[3].clone(),
        ]),
    };
    let i = CRational::i();
    let one = SymFunc::one();
    let zero = || SymFunc::zero(Shape::Scalar);
    let ident = SymFunc::mat2([one.clone(), zero(), zero(), one.clone()]);
    let i_ident = ident.scale(&i);
    let (pref, extra_den): (SymFunc, u32) = match (direction, flavor) {
        (CayleyDirection::Forward, CayleyFlavor::PiPrimeL) => {
            (SymFunc::z_matrix().sub(&ident).scale(&i), 1)
        }
        (CayleyDirection::Inverse, CayleyFlavor::PiPrimeL) => (
            SymFunc::z_matrix()
                .add(&i_ident)
                .scale(&CRational::from_int(-2)),
            1,
        ),
        (CayleyDirection::Forward, CayleyFlavor::PiLa) => {
            (SymFunc::z_matrix().sub(&ident).scale(&-&i), 2)
        }
        (CayleyDirection::Inverse, CayleyFlavor::PiLa) => (
            SymFunc::z_matrix()
                .add(&i_ident)
                .scale(&CRational::from_int(-8)),
            2,
        ),
        (CayleyDirection::Forward, CayleyFlavor::PiL) => {
            let adj = SymFunc::mat2([
                SymFunc::var(3).sub(&one),
                SymFunc::var(1).neg(),
                SymFunc::var(2).neg(),
                SymFunc::var(0).sub(&one),
            ]);
            (adj.scale(&CRational::from_int(8)), 2)
        }
        (CayleyDirection::Inverse, CayleyFlavor::PiL) => {
            let ii = SymFunc::constant(i.clone());
            let adj = SymFunc::mat2([
                SymFunc::var(3).add(&ii),
                SymFunc::var(1).neg(),
                SymFunc::var(2).neg(),
                SymFunc::var(0).add(&ii),
            ]);
            (adj.scale(&i), 2)
        }
        (CayleyDirection::Forward, CayleyFlavor::Pi0L) => {
            (SymFunc::constant(CRational::from_int(4)), 1)
        }
        (CayleyDirection::Inverse, CayleyFlavor::Pi0L) => {
            (SymFunc::constant(CRational::from_int(-1)), 1)
        }
    };
    let num = pref.mul(&subbed)?;
    Ok(CayleyImage {
        num,
        den: ring.den,
        den_pow: max_pow + extra_den,
    })
}

/// Numeric Cayley application for arbitrary callables:
/// prefactor(z) * f(argument(z)).
pub fn cayley_eval_num(
    direction: CayleyDirection,
    flavor: CayleyFlavor,
    f: &dyn Fn(&NumBiquat) -> Result<NumValue>,
    z: &NumBiquat,
) -> Result<NumValue> {
    use num_complex::Complex64;
    let i = Complex64::new(0.0, 1.0);
    let one = NumBiquat::one();
    let (arg, pref_mat, pref_scalar): (NumBiquat, Option<NumBiquat>, Complex64) =
        match direction {
            CayleyDirection::Forward => {
                let zm1 = z - &one;
                let arg = &(z + &one).scale(-i) * &zm1.inverse()?;
                let nz = zm1.norm();
                match flavor {
                    CayleyFlavor::PiPrimeL => (arg, Some(zm1.scale(i / nz)), 1.0.into()),
                    CayleyFlavor::PiLa => (arg, Some(zm1.scale(-i / (nz * nz))), 1.0.into()),
                    CayleyFlavor::PiL => (arg, Some(zm1.inverse()?.scale(8.0 / nz)), 1.0.into()),
                    CayleyFlavor::Pi0L => (arg, None, 4.0 / nz),
                }
            }
            CayleyDirection::Inverse => {
                let zpi = z + &one.scale(i);
                let arg = &(z - &one.scale(i)) * &zpi.inverse()?;
                let nz = zpi.norm();
                match flavor {
                    CayleyFlavor::PiPrimeL => (arg, Some(zpi.scale(-2.0 / nz)), 1.0.into()),
                    CayleyFlavor::PiLa => (arg, Some(zpi.scale(-8.0 / (nz * nz))), 1.0.into()),
                    CayleyFlavor::PiL => (arg, Some(zpi.inverse()?.scale(i / nz)), 1.0.into()),
                    CayleyFlavor::Pi0L => (arg, None, -1.0 / nz),
                }
            }
        };
    let val = f(&arg)?;
    Ok(match (val, pref_mat) {
        (NumValue::Scalar(v), None) => NumValue::Scalar(v * pref_scalar),
        (NumValue::Scalar(v), Some(_)) => NumValue::Scalar(v * pref_scalar),
        (NumValue::Col(v), Some(m)) => NumValue::Col([
            m.z[0] * v[0] + m.z[1] * v[1],
            m.z[2] * v[0] + m.z[3] * v[1],
        ]),
        (other, None) => other,
        _ => {
            return Err(Error::ShapeMismatch(
                "cayley prefactor expects a column or scalar".into(),
            ))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biquat::{in_domain, Domain};
    use num_complex::Complex64;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn basic_actions() {
        // rho'(B = E11) N(Z) = -d11 N = -z22.
        let x = LieElem::b_unit(0, 0);
        let out = act(ActionName::RhoPrime, &x, &SymFunc::n_pow(1)).unwrap();
        assert_eq!(out, SymFunc::var(3).neg());
        // pi'_l(A) on a constant column s gives -tr(A) s + A s.
        let mut a = LieElem::zero();
        a.a = Biquaternion::new(
            CRational::from_int(2),
            CRational::from_int(1),
            CRational::from_int(-1),
            CRational::from_int(3),
        );
        let s = SymFunc::col2(SymFunc::one(), SymFunc::constant(CRational::from_int(4)));
        let out = act(ActionName::PiPrimeL, &a, &s).unwrap();
        let expect = SymFunc::col2(
            SymFunc::constant(CRational::from_int(-5 + 2 + 4)),
            SymFunc::constant(CRational::from_int(-20 - 1 + 12)),
        );
        assert_eq!(out, expect);
        // pi'_r(D) on a constant row: tr(D) g - g D.
        let mut d = LieElem::zero();
        d.d = Biquaternion::new(
            CRational::from_int(1),
            CRational::zero(),
            CRational::zero(),
            CRational::from_int(2),
        );
        let g = SymFunc::row2(SymFunc::one(), SymFunc::zero(Shape::Scalar));
        let out = act(ActionName::PiPrimeR, &d, &g).unwrap();
        let expect = SymFunc::row2(
            SymFunc::constant(CRational::from_int(3 - 1)),
            SymFunc::zero(Shape::Scalar),
        );
        assert_eq!(out, expect);
    }

    #[test]
    fn membership_predicates() {
        assert!(LieElem::u22_x().is_u22());
        assert!(LieElem::u22_y().is_u22());
        assert!(!LieElem::b_unit(0, 0).is_u22());
        let mut x = LieElem::zero();
        x.b = Biquaternion::new(
            CRational::i(),
            CRational::zero(),
            CRational::zero(),
            CRational::i(),
        );
        assert!(x.is_poincare());
        assert!(!LieElem::c_unit(0, 0).is_poincare());
    }

    #[test]
    fn bracket_homomorphism_random() {
        let mut rng = StdRng::seed_from_u64(7);
        let mut rand_biq = |rng: &mut StdRng| {
            Biquaternion::new(
                CRational::from_int(rng.gen_range(-2..3)),
                CRational::from_int(rng.gen_range(-2..3)),
                CRational::from_int(rng.gen_range(-2..3)),
                CRational::from_int(rng.gen_range(-2..3)),
            )
        };
        for trial in 0..8 {
            let x = LieElem::from_blocks(
                rand_biq(&mut rng),
                rand_biq(&mut rng),
                rand_biq(&mut rng),
                rand_biq(&mut rng),
            );
            let y = LieElem::from_blocks(
                rand_biq(&mut rng),
                rand_biq(&mut rng),
                rand_biq(&mut rng),
                rand_biq(&mut rng),
            );
            let f = basis_or_zero(Family::F2, TIndex::new(2, 0, 1));
            assert!(
                check_bracket(ActionName::PiPrimeL, &x, &y, &f).unwrap(),
                "pi'_l bracket trial {trial}"
            );
            let g = basis_or_zero(Family::Gt2, TIndex::new(1, 1, 0));
            assert!(
                check_bracket(ActionName::PiPrimeR, &x, &y, &g).unwrap(),
                "pi'_r bracket trial {trial}"
            );
            let p = basis_or_zero(Family::Phi2, TIndex::new(2, 0, 0));
            assert!(
                check_bracket(ActionName::RhoPrime, &x, &y, &p).unwrap(),
                "rho' bracket trial {trial}"
            );
        }
    }

    #[test]
    fn table_sweep_small() {
        let (failures, checked) = sweep_tables(2).unwrap();
        assert!(failures.is_empty(), "table mismatches: {failures:?}");
        assert!(checked > 500);
    }

    #[test]
    fn multiplication_intertwines_matrix_action() {
        // pi'_l(X) f . g + f . pi'_r(X) g = rho'_2(X)(f g) for every
        // block of the Lie algebra.
        let mut rng = StdRng::seed_from_u64(17);
        let mut rand_biq = |rng: &mut StdRng| {
            Biquaternion::new(
                CRational::from_int(rng.gen_range(-2..3)),
                CRational::from_int(rng.gen_range(-2..3)),
                CRational::from_int(rng.gen_range(-2..3)),
                CRational::from_int(rng.gen_range(-2..3)),
            )
        };
        for _ in 0..6 {
            let x = LieElem::from_blocks(
                rand_biq(&mut rng),
                rand_biq(&mut rng),
                rand_biq(&mut rng),
                rand_biq(&mut rng),
            );
            let f = basis_or_zero(Family::F2, TIndex::new(1, 1, 0));
            let g = basis_or_zero(Family::Gt1, TIndex::new(1, -1, 0));
            let prod = f.mul(&g).unwrap();
            let lhs = act(ActionName::PiPrimeL, &x, &f)
                .unwrap()
                .mul(&g)
                .unwrap()
                .add(&f.mul(&act(ActionName::PiPrimeR, &x, &g).unwrap()).unwrap());
            let rhs = act(ActionName::Rho2Prime, &x, &prod).unwrap();
            assert_eq!(lhs, rhs);
        }
        // The matrix actions and the remaining scalar/spinor actions are
        // Lie homomorphisms too.
        let x = LieElem::from_blocks(
            rand_biq(&mut rng),
            rand_biq(&mut rng),
            rand_biq(&mut rng),
            rand_biq(&mut rng),
        );
        let y = LieElem::from_blocks(
            rand_biq(&mut rng),
            rand_biq(&mut rng),
            rand_biq(&mut rng),
            rand_biq(&mut rng),
        );
        let fm = SymFunc::n_pow(-1)
            .mul(&SymFunc::mat2([
                (*t_sym(1, 1, 1)).clone(),
                SymFunc::var(0),
                SymFunc::zero(Shape::Scalar),
                SymFunc::n_pow(1),
            ]))
            .unwrap();
        for action in [ActionName::Rho2, ActionName::Rho2Prime] {
            assert!(check_bracket(action, &x, &y, &fm).unwrap(), "{action:?}");
        }
        let scalar = SymFunc::n_pow(-1).mul(&t_sym(2, 0, 0)).unwrap();
        for action in [ActionName::Rho1, ActionName::Pi0L] {
            assert!(check_bracket(action, &x, &y, &scalar).unwrap(), "{action:?}");
        }
        let col = basis_or_zero(Family::F1, TIndex::new(1, 1, 0));
        for action in [ActionName::PiLa, ActionName::PiL] {
            assert!(check_bracket(action, &x, &y, &col).unwrap(), "{action:?}");
        }
        let row = basis_or_zero(Family::G2, TIndex::new(1, 0, 1));
        assert!(check_bracket(ActionName::PiRa, &x, &y, &row).unwrap());
    }

    #[test]
    fn cayley_round_trips_all_flavors() {
        let z = NumBiquat::from_real_ecoords([0.15, -0.1, 0.2, 0.05]);
        for flavor in [
            CayleyFlavor::PiPrimeL,
            CayleyFlavor::PiLa,
            CayleyFlavor::PiL,
        ] {
            let f = SymFunc::col2(SymFunc::var(0), SymFunc::var(2));
            let f_eval = |w: &NumBiquat| f.eval(w);
            let fwd =
                |w: &NumBiquat| cayley_eval_num(CayleyDirection::Forward, flavor, &f_eval, w);
            let round =
                cayley_eval_num(CayleyDirection::Inverse, flavor, &fwd, &z).unwrap();
            let direct = f.eval(&z).unwrap();
            assert!(
                round.sub(&direct).abs() < 1e-11,
                "{flavor:?} round trip failed"
            );
        }
        let f = SymFunc::n_pow(1);
        let f_eval = |w: &NumBiquat| f.eval(w);
        let fwd = |w: &NumBiquat| {
            cayley_eval_num(CayleyDirection::Forward, CayleyFlavor::Pi0L, &f_eval, w)
        };
        let round =
            cayley_eval_num(CayleyDirection::Inverse, CayleyFlavor::Pi0L, &fwd, &z).unwrap();
        let direct = f.eval(&z).unwrap();
        assert!(round.sub(&direct).abs() < 1e-11);
    }

    #[test]
    fn ef_patterns_random() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..5 {
            let alpha = CRational::from_ratio(rng.gen_range(1..5), 2);
            let beta = CRational::from_ratio(rng.gen_range(1..5), 3);
            let l2 = rng.gen_range(1..4);
            let m2 = -l2 + 2 * rng.gen_range(0..=l2);
            let n2 = -l2 + 1 + 2 * rng.gen_range(0..l2.max(1));
            assert!(check_ef_patterns(&alpha, &beta, l2, m2, n2).unwrap());
        }
        // Printed example: pi'_l(E2) f1 = (l-m) f1 at m+1.
        let idx = TIndex::new(2, 0, 1);
        let lhs = act(
            ActionName::PiPrimeL,
            &LieElem::e2(),
            &basis_or_zero(Family::F1, idx),
        )
        .unwrap();
        let rhs = basis_or_zero(Family::F1, TIndex::new(2, 2, 1)).scale_rat(&hf(2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn u22_combos() {
        assert!(check_u22_x_combos(3).unwrap());
    }

    #[test]
    fn inversion_maps() {
        assert!(check_inversion_map(3).unwrap());
    }

    #[test]
    fn torus_weights() {
        let lam = CRational::from_ratio(3, 2);
        for (fam, action) in [
            (Family::F1, ActionName::PiPrimeL),
            (Family::F2, ActionName::PiPrimeL),
            (Family::Ft2, ActionName::PiPrimeL),
            (Family::G1, ActionName::PiPrimeR),
            (Family::Gt3, ActionName::PiPrimeR),
        ] {
            for l2 in 0..=2 {
                for idx in fam.enumerate(l2) {
                    let f = basis_or_zero(fam, idx);
                    if f.is_zero() {
                        continue;
                    }
                    let d = fam.degree(l2) as i64;
                    let acted = torus_scale(action, &lam, &f).unwrap();
                    let e = -2 * d - 1;
                    let factor = if e >= 0 {
                        lam.pow(e as u32)
                    } else {
                        lam.inv().unwrap().pow((-e) as u32)
                    };
                    assert_eq!(acted, f.scale(&factor), "{fam:?} {idx:?}");
                }
            }
        }
    }

    #[test]
    fn qlar_preserved_by_action() {
        for x in [
            LieElem::b_unit(0, 1),
            LieElem::c_unit(1, 0),
            LieElem::e1(),
            LieElem::e2(),
        ] {
            for fam in [Family::F1, Family::F2, Family::F3, Family::Ft2] {
                for l2 in 0..=2 {
                    for idx in fam.enumerate(l2) {
                        let f = basis_or_zero(fam, idx);
                        let acted = act(ActionName::PiPrimeL, &x, &f).unwrap();
                        assert!(
                            crate::bases::is_qlar(&acted),
                            "{fam:?} {idx:?} not preserved"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn poincare_intertwiner() {
        let mut trans = LieElem::zero();
        trans.b = Biquaternion::new(
            CRational::i(),
            CRational::from_int(1),
            CRational::from_int(-1),
            -&CRational::i(),
        );
        assert!(trans.is_poincare());
        let a = Biquaternion::new(
            CRational::i(),
            CRational::from_int(1),
            CRational::from_int(-1),
            -&CRational::i(),
        );
        let mut diag = LieElem::zero();
        diag.d = -&a.conj_transpose();
        diag.a = a;
        assert!(diag.is_poincare());
        for x in [trans, diag] {
            for (fam, idx) in [
                (Family::F2, TIndex::new(1, 1, 0)),
                (Family::F1, TIndex::new(2, 0, 1)),
                (Family::F3, TIndex::new(2, 0, 1)),
            ] {
                let f = basis_or_zero(fam, idx);
                assert!(
                    check_poincare_intertwiner(&x, &f).unwrap(),
                    "{fam:?} {idx:?}"
                );
            }
        }
        // Negative control: a generic C-block breaks the identity.
        let bad = LieElem::c_unit(0, 0);
        let f = basis_or_zero(Family::F2, TIndex::new(1, 1, 0));
        assert!(!check_poincare_intertwiner(&bad, &f).unwrap());
    }

    #[test]
    fn cayley_images() {
        // pi0_l forward of the constant 1 is 4 / N(Z-1).
        let img =
            cayley(CayleyDirection::Forward, CayleyFlavor::Pi0L, &SymFunc::one()).unwrap();
        assert_eq!(img.num, SymFunc::constant(CRational::from_int(4)));
        assert_eq!(img.den_pow, 1);
        // Round trip inverse(forward(f)) = f numerically inside the
        // bounded domain.
        let z = NumBiquat::from_real_ecoords([0.2, 0.05, -0.1, 0.15]);
        assert!(in_domain(&z, Domain::DPlus, 1.0, 1e-12));
        let f = SymFunc::col2(SymFunc::var(0), SymFunc::var(3));
        let f_eval = |w: &NumBiquat| f.eval(w);
        let fwd = |w: &NumBiquat| {
            cayley_eval_num(CayleyDirection::Forward, CayleyFlavor::PiPrimeL, &f_eval, w)
        };
        let round =
            cayley_eval_num(CayleyDirection::Inverse, CayleyFlavor::PiPrimeL, &fwd, &z).unwrap();
        let direct = f.eval(&z).unwrap();
        assert!(round.sub(&direct).abs() < 1e-12);
        // The symbolic forward image agrees with the numeric evaluation,
        // and the forward map lands in the forward tube.
        let img = cayley(CayleyDirection::Forward, CayleyFlavor::PiPrimeL, &f).unwrap();
        let w = NumBiquat::from_real_ecoords([0.1, 0.2, -0.05, 0.0]);
        let i = Complex64::new(0.0, 1.0);
        let one_i = NumBiquat::one().scale(i);
        // The point map from the bounded domain into the forward tube.
        let tube_pt = &(&w - &one_i) * &(&w + &one_i).inverse().unwrap();
        assert!(in_domain(&tube_pt, Domain::TubePlus, 1.0, 1e-9));
        let sym_val = img.eval(&tube_pt).unwrap();
        let num_val = cayley_eval_num(
            CayleyDirection::Forward,
            CayleyFlavor::PiPrimeL,
            &f_eval,
            &tube_pt,
        )
        .unwrap();
        assert!(sym_val.sub(&num_val).abs() < 1e-10);
    }
}
