//! The invariant bilinear pairings between quasi anti regular spaces and
//! on biharmonic functions, the pseudounitary forms, and the dual systems
//! they induce. Every pairing is computed two independent ways: a
//! structural route through basis expansion and the orthogonality
//! constants, and an integral route through quadrature of the printed
//! contour formulas; the two are cross-checked in the verification
//! suites.

use crate::bases::{
    basis_or_zero, expand_in_basis, Family, F_FAMILIES, G_FAMILIES, PHI_FAMILIES,
};
use crate::contour::{ContourSpec, SphereGrid};
use crate::rational::{factorial, rat, CRational};
use crate::symfunc::{Shape, SymFunc};
use crate::tcoeff::{t_eval, t_sym, t_sym_inv, TIndex};
use crate::{Error, NumBiquat, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use std::f64::consts::PI;

/// The two bilinear pairings.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PairingKind {
    /// Pairs column-valued functions in U with row-valued ones in U'.
    Qr,
    /// Pairs scalar biharmonic functions.
    Bh,
}

/// Orthogonality constant of a family pair at level 2l: the pairing of a
/// positive-degree element against its tilde partner (and vice versa).
pub fn orthogonality_constant(family: Family, two_l: i32) -> BigRational {
    use Family::*;
    match family {
        F1 | Ft1 | G1 | Gt1 => rat((two_l + 1) as i64),
        F2 | Ft2 | G2 | Gt2 => -rat(two_l as i64) * rat((two_l + 1) as i64),
        F3 | Ft3 | G3 | Gt3 => -rat(two_l as i64),
        Phi1 | PhiT1 => rat(two_l as i64),
        Phi2 | PhiT2 => -rat(two_l as i64),
    }
}

/// The family paired nontrivially against `family` by the bilinear
/// pairing.
pub fn qr_partner(family: Family) -> Family {
    use Family::*;
    match family {
        F1 => Gt1,
        F2 => Gt2,
        F3 => Gt3,
        Ft1 => G1,
        Ft2 => G2,
        Ft3 => G3,
        G1 => Ft1,
        G2 => Ft2,
        G3 => Ft3,
        Gt1 => F1,
        Gt2 => F2,
        Gt3 => F3,
        Phi1 => PhiT1,
        Phi2 => PhiT2,
        PhiT1 => Phi1,
        PhiT2 => Phi2,
    }
}

/// The orthogonality table applied to precomputed expansions.
pub fn pair_expansions(
    ea: &std::collections::BTreeMap<(Family, TIndex), CRational>,
    eb: &std::collections::BTreeMap<(Family, TIndex), CRational>,
) -> CRational {
    let mut acc = CRational::zero();
    for ((fa, ia), ca) in ea {
        let pb = qr_partner(*fa);
        if let Some(cb) = eb.get(&(pb, *ia)) {
            let c = orthogonality_constant(*fa, ia.two_l);
            acc += &(&(ca * cb) * &CRational::from_real(c));
        }
    }
    acc
}

/// Structural pairing: expand both arguments in the basis families and
/// apply the orthogonality table. Vanishes identically on the
/// positive-positive and negative-negative blocks.
pub fn pair_structural(kind: PairingKind, a: &SymFunc, b: &SymFunc) -> Result<CRational> {
    let (fam_a, fam_b): (&[Family], &[Family]) = match kind {
        PairingKind::Qr => {
            if a.shape() != Shape::Col2 || b.shape() != Shape::Row2 {
                return Err(Error::ShapeMismatch(
                    "QR pairing takes a column and a row".into(),
                ));
            }
            (&F_FAMILIES, &G_FAMILIES)
        }
        PairingKind::Bh => {
            if a.shape() != Shape::Scalar || b.shape() != Shape::Scalar {
                return Err(Error::ShapeMismatch("BH pairing takes scalars".into()));
            }
            (&PHI_FAMILIES, &PHI_FAMILIES)
        }
    };
    let ea = expand_in_basis(a, fam_a)?;
    let eb = expand_in_basis(b, fam_b)?;
    Ok(pair_expansions(&ea, &eb))
}

fn num_row_times_col(row: [Complex64; 2], col: [Complex64; 2]) -> Complex64 {
    row[0] * col[0] + row[1] * col[1]
}

/// Integral pairing over S^3_R by quadrature of the printed contour
/// formulas. Consulted on the mixed blocks (positive against negative
/// degrees); the structural route is authoritative elsewhere.
pub fn pair_integral(
    kind: PairingKind,
    a: &SymFunc,
    b: &SymFunc,
    spec: ContourSpec,
) -> Result<Complex64> {
    let r = spec.radius;
    let grid = SphereGrid::new(spec);
    match kind {
        PairingKind::Qr => {
            if a.shape() != Shape::Col2 || b.shape() != Shape::Row2 {
                return Err(Error::ShapeMismatch(
                    "QR pairing takes a column and a row".into(),
                ));
            }
            let bw = a.bandwidth().max(b.bandwidth()) + 2;
            if spec.angle_nodes < bw {
                return Err(Error::QuadratureUnderresolved {
                    needed: bw,
                    got: spec.angle_nodes,
                });
            }
            let na = a.nabla()?;
            let dna = na.deg_op();
            let db = b.deg_op();
            let boxb = b.box_op();
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, w) in &grid.nodes {
                let nav = na.eval(x)?.as_col();
                let dnav = dna.eval(x)?.as_col();
                let bv = b.eval(x)?.as_row();
                let dbv = db.eval(x)?.as_row();
                let boxbv = boxb.eval(x)?.as_row();
                let av = a.eval(x)?.as_col();
                let xinv = x.inverse()?;
                let xiv = [
                    xinv.z[0] * av[0] + xinv.z[1] * av[1],
                    xinv.z[2] * av[0] + xinv.z[3] * av[1],
                ];
                let t1 = num_row_times_col(dbv, nav);
                let t2 = num_row_times_col(bv, dnav);
                let t3 = num_row_times_col(boxbv, xiv);
                acc += ((t1 - t2) / (8.0 * PI * PI * r) - t3 * r / (8.0 * PI * PI)) * *w;
            }
            Ok(acc)
        }
        PairingKind::Bh => {
            if a.shape() != Shape::Scalar || b.shape() != Shape::Scalar {
                return Err(Error::ShapeMismatch("BH pairing takes scalars".into()));
            }
            let box_a = a.box_op();
            let box_b = b.box_op();
            let dt_box_b = box_b.deg_tilde();
            let dt_box_a = box_a.deg_tilde();
            let q_a = box_a.inv_deg_plus2()?.deg_tilde();
            let q_b = box_b.inv_deg_plus2()?;
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, w) in &grid.nodes {
                let t1 = a.eval(x)?.as_scalar() * dt_box_b.eval(x)?.as_scalar();
                let t2 = dt_box_a.eval(x)?.as_scalar() * b.eval(x)?.as_scalar();
                let t3 = q_a.eval(x)?.as_scalar() * q_b.eval(x)?.as_scalar();
                acc += ((t1 - t2) / (8.0 * PI * PI * r) + t3 / (16.0 * PI * PI * r)) * *w;
            }
            Ok(acc)
        }
    }
}

/// The pseudounitary (indefinite sesquilinear) forms: a space paired with
/// itself through the pointwise conjugation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PseudoKind {
    UPlus,
    UMinus,
    BhPlus,
    BhMinus,
}

impl PseudoKind {
    pub fn families(&self) -> &'static [Family] {
        match self {
            PseudoKind::UPlus => &[Family::F1, Family::F2, Family::F3],
            PseudoKind::UMinus => &[Family::Ft1, Family::Ft2, Family::Ft3],
            PseudoKind::BhPlus => &[Family::Phi1, Family::Phi2],
            PseudoKind::BhMinus => &[Family::PhiT1, Family::PhiT2],
        }
    }

    /// The l-dependent block weight multiplying the S^3 integral
    /// (normalized by 1/2pi^2).
    fn weight(&self, family: Family, two_l: i32) -> BigRational {
        use Family::*;
        match family {
            F1 | Ft1 => rat((two_l + 1) as i64),
            F2 | Ft2 => -rat(two_l as i64) * rat((two_l + 1) as i64),
            F3 | Ft3 => -rat(two_l as i64),
            Phi1 | PhiT1 => rat(two_l as i64) * rat((two_l + 1) as i64),
            Phi2 | PhiT2 => -rat(two_l as i64) * rat((two_l + 1) as i64),
            _ => unreachable!("pseudo forms pair a space with itself"),
        }
    }
}

/// Exact pseudounitary form via the defining S^3 integral: block weight
/// times the exact Haar average of (second argument)+ (first argument).
/// Vanishes across different families by definition.
pub fn pseudo_form(kind: PseudoKind, a: &SymFunc, b: &SymFunc) -> Result<CRational> {
    let fams = kind.families();
    let ea = expand_in_basis(a, fams)?;
    let eb = expand_in_basis(b, fams)?;
    let mut acc = CRational::zero();
    for ((fa, ia), ca) in &ea {
        for ((fb, ib), cb) in &eb {
            if fa != fb {
                continue;
            }
            let elem_a = basis_or_zero(*fa, *ia);
            let elem_b = basis_or_zero(*fb, *ib);
            // (1/2pi^2) Int (elem_b)+ elem_a dS = Haar average.
            let density = elem_b.dagger().mul(&elem_a)?;
            let avg = density.s3_haar_average(&rat(1))?;
            let w = kind.weight(*fa, ia.two_l);
            acc += &(&(ca * &cb.conj()) * &avg.scale(&w));
        }
    }
    Ok(acc)
}

/// The printed diagonal value of the pseudounitary form on a single
/// basis element (factorial normalization).
pub fn pseudo_diagonal_printed(kind: PseudoKind, family: Family, idx: TIndex) -> CRational {
    let (l2, m2, n2) = (idx.two_l, idx.two_m, idx.two_n);
    let fact = |x: i32| -> BigInt { factorial((x / 2) as i64) };
    let ratio = |am: i32, bm: i32, an: i32, bn: i32| {
        BigRational::new(fact(am) * fact(bm), fact(an) * fact(bn))
    };
    use Family::*;
    let v = match (kind, family) {
        (PseudoKind::UPlus, F1) => {
            rat((l2 + 1) as i64) * ratio(l2 - m2, l2 + m2, l2 - n2 + 1, l2 + n2 + 1)
        }
        (PseudoKind::UPlus, F2) => {
            -rat(l2 as i64)
                * rat((l2 + 1) as i64)
                * ratio(l2 - m2, l2 + m2, l2 - n2 - 1, l2 + n2 - 1)
        }
        (PseudoKind::UPlus, F3) => {
            -rat(l2 as i64) * ratio(l2 - m2 - 2, l2 + m2 - 2, l2 - n2 - 1, l2 + n2 - 1)
        }
        (PseudoKind::BhPlus, Phi1) => {
            rat(l2 as i64) * ratio(l2 - m2, l2 + m2, l2 - n2, l2 + n2)
        }
        (PseudoKind::BhPlus, Phi2) => {
            -rat(l2 as i64) * rat((l2 + 1) as i64) / rat((l2 - 1) as i64)
                * ratio(l2 - m2 - 2, l2 + m2 - 2, l2 - n2 - 2, l2 + n2 - 2)
        }
        _ => panic!("no printed diagonal for {kind:?} {family:?}"),
    };
    CRational::from_real(v)
}

/// Invariance of a bilinear pairing under a Lie algebra element:
/// <act(X) a, b> + <a, act(X) b> = 0, computed structurally (exact).
pub fn check_invariance(
    kind: PairingKind,
    x: &crate::actions::LieElem,
    a: &SymFunc,
    b: &SymFunc,
) -> Result<bool> {
    use crate::actions::{act, ActionName};
    let (act_a, act_b) = match kind {
        PairingKind::Qr => (ActionName::PiPrimeL, ActionName::PiPrimeR),
        PairingKind::Bh => (ActionName::RhoPrime, ActionName::RhoPrime),
    };
    let lhs = pair_structural(kind, &act(act_a, x, a)?, b)?;
    let rhs = pair_structural(kind, a, &act(act_b, x, b)?)?;
    Ok((&lhs + &rhs).is_zero())
}

/// Sign of the pairing under the inversion element:
/// -1 for the QR pairing, +1 for the BH pairing.
pub fn check_inversion_sign(kind: PairingKind, a: &SymFunc, b: &SymFunc) -> Result<bool> {
    use crate::actions::{inversion, ActionName};
    let (inv_a, inv_b, sign) = match kind {
        PairingKind::Qr => (ActionName::PiPrimeL, ActionName::PiPrimeR, -1),
        PairingKind::Bh => (ActionName::RhoPrime, ActionName::RhoPrime, 1),
    };
    let lhs = pair_structural(kind, &inversion(inv_a, a)?, &inversion(inv_b, b)?)?;
    let rhs = pair_structural(kind, a, b)?;
    Ok(lhs == rhs.scale(&rat(sign)))
}

// ---------------------------------------------------------------------
// Dual systems.
// ---------------------------------------------------------------------

/// A basis element together with its dual partner under a bilinear
/// pairing, normalized so the pairing is exactly 1.
#[derive(Clone, Debug)]
pub struct DualPair {
    pub f: (Family, TIndex),
    pub g: (Family, TIndex),
    /// Multiply the g-element by this to get the normalized dual.
    pub g_scale: CRational,
}

/// Dual system for the positive-degree quasi anti regular families under
/// the QR pairing: duals are the tilde row families scaled by the inverse
/// orthogonality constants.
pub fn qr_dual_system_plus(max_two_l: i32) -> Vec<DualPair> {
    let mut out = Vec::new();
    for two_l in 0..=max_two_l {
        for fam in [Family::F1, Family::F2, Family::F3] {
            for idx in fam.enumerate(two_l) {
                let c = orthogonality_constant(fam, two_l);
                out.push(DualPair {
                    f: (fam, idx),
                    g: (qr_partner(fam), idx),
                    g_scale: CRational::from_real(c.recip()),
                });
            }
        }
    }
    out
}

/// Dual system for the negative-degree families: tilde columns paired
/// with the positive row families.
pub fn qr_dual_system_minus(max_two_l: i32) -> Vec<DualPair> {
    let mut out = Vec::new();
    for two_l in 0..=max_two_l {
        for fam in [Family::Ft1, Family::Ft2, Family::Ft3] {
            for idx in fam.enumerate(two_l) {
                let c = orthogonality_constant(fam, two_l);
                out.push(DualPair {
                    f: (fam, idx),
                    g: (qr_partner(fam), idx),
                    g_scale: CRational::from_real(c.recip()),
                });
            }
        }
    }
    out
}

// ---------------------------------------------------------------------
// The left/right regular dual system (Cauchy-Fueter picture).
// ---------------------------------------------------------------------

/// Left regular basis column of positive degree 2l - 1:
/// ((l-m) t^{l-1/2}_{n, m+1/2}; (l+m) t^{l-1/2}_{n, m-1/2}),
/// l >= 1/2, m in [-l, l], n in [-l+1/2, l-1/2].
pub fn reg_v_sym(l2: i32, m2: i32, n2: i32) -> SymFunc {
    SymFunc::col2(
        (*t_sym(l2 - 1, n2, m2 + 1))
            .clone()
            .scale_rat(&crate::rational::half((l2 - m2) as i64)),
        (*t_sym(l2 - 1, n2, m2 - 1))
            .clone()
            .scale_rat(&crate::rational::half((l2 + m2) as i64)),
    )
}

/// Right regular row of negative degree -2l - 2:
/// N^{-1} (t^l_{m, n-1/2}(Z^{-1}), t^l_{m, n+1/2}(Z^{-1})).
pub fn reg_wt_sym(l2: i32, m2: i32, n2: i32) -> SymFunc {
    SymFunc::n_pow(-1)
        .mul(&SymFunc::row2(
            t_sym_inv(l2, m2, n2 - 1),
            t_sym_inv(l2, m2, n2 + 1),
        ))
        .expect("scalar product")
}

pub fn reg_v_eval(l2: i32, m2: i32, n2: i32, z: &NumBiquat) -> [Complex64; 2] {
    let h = |x: i32| Complex64::new(x as f64 / 2.0, 0.0);
    [
        h(l2 - m2) * t_eval(l2 - 1, n2, m2 + 1, z),
        h(l2 + m2) * t_eval(l2 - 1, n2, m2 - 1, z),
    ]
}

pub fn reg_wt_eval(l2: i32, m2: i32, n2: i32, z: &NumBiquat) -> Result<[Complex64; 2]> {
    let zi = z.inverse()?;
    let n = z.norm();
    Ok([
        t_eval(l2, m2, n2 - 1, &zi) / n,
        t_eval(l2, m2, n2 + 1, &zi) / n,
    ])
}

/// Index triples (2l, 2m, 2n) of the left regular basis at level 2l.
pub fn reg_indices(l2: i32) -> Vec<(i32, i32, i32)> {
    let mut out = Vec::new();
    if l2 < 1 {
        return out;
    }
    let mut m2 = -l2;
    while m2 <= l2 {
        let mut n2 = -l2 + 1;
        while n2 <= l2 - 1 {
            out.push((l2, m2, n2));
            n2 += 2;
        }
        m2 += 2;
    }
    out
}

/// The boundary pairing reproducing left regular functions:
/// (1/2pi^2) Int_{S^3} w(X) X v(X) dS, computed exactly via the Haar
/// average.
pub fn regular_pairing_exact(w: &SymFunc, v: &SymFunc) -> Result<CRational> {
    let density = w.mul(&SymFunc::z_matrix())?.mul(v)?;
    density.s3_haar_average(&rat(1))
}

/// A dual system for the positive left regular functions under the
/// boundary pairing. The diagonal Gram entries equal 1 identically (the
/// two weight-orthogonality factors cancel and the component weights sum
/// to 2l+1); this is validated exactly on every index up to a fixed
/// level and once per higher level, and off-diagonal entries vanish by
/// torus-weight orthogonality.
pub fn regular_dual_system(max_two_l: i32) -> Result<Vec<((i32, i32, i32), CRational)>> {
    let mut out = Vec::new();
    for l2 in 1..=max_two_l {
        let validate_all = l2 <= 8;
        for (k, (l, m, n)) in reg_indices(l2).into_iter().enumerate() {
            if validate_all || k == 0 {
                let v = reg_v_sym(l, m, n);
                let w = reg_wt_sym(l, m, n);
                let c = regular_pairing_exact(&w, &v)?;
                if c != CRational::one() {
                    return Err(Error::NotInSpan(format!(
                        "regular pairing at ({l}, {m}, {n}) is {c}, expected 1"
                    )));
                }
            }
            out.push(((l, m, n), CRational::one()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::LieElem;
    use crate::rational::half;

    #[test]
    fn structural_orthogonality_examples() {
        // <f1(0,0,1/2), gt1(0,0,1/2)> = 1 (the constant 2l+1 at l = 0).
        let a = basis_or_zero(Family::F1, TIndex::new(0, 0, 1));
        let b = basis_or_zero(Family::Gt1, TIndex::new(0, 0, 1));
        assert_eq!(
            pair_structural(PairingKind::Qr, &a, &b).unwrap(),
            CRational::one()
        );
        // <f2(1/2,.), gt2(1/2,.)> = -2l(2l+1) = -2.
        let a = basis_or_zero(Family::F2, TIndex::new(1, 1, 0));
        let b = basis_or_zero(Family::Gt2, TIndex::new(1, 1, 0));
        assert_eq!(
            pair_structural(PairingKind::Qr, &a, &b).unwrap(),
            CRational::from_int(-2)
        );
        // Cross terms vanish.
        let b2 = basis_or_zero(Family::Gt1, TIndex::new(1, 1, 0));
        assert!(pair_structural(PairingKind::Qr, &a, &b2)
            .unwrap()
            .is_zero());
        // Positive x positive blocks vanish by fiat.
        let g = basis_or_zero(Family::G1, TIndex::new(0, 1, 0));
        let f = basis_or_zero(Family::F1, TIndex::new(0, 0, 1));
        assert!(pair_structural(PairingKind::Qr, &f, &g).unwrap().is_zero());
        // BH: <phi1, phit1> = 2l, <phi2, phit2> = -2l, the constant is
        // degenerate.
        let p = basis_or_zero(Family::Phi1, TIndex::new(2, 0, 2));
        let q = basis_or_zero(Family::PhiT1, TIndex::new(2, 0, 2));
        assert_eq!(
            pair_structural(PairingKind::Bh, &p, &q).unwrap(),
            CRational::from_int(2)
        );
        assert!(pair_structural(PairingKind::Bh, &SymFunc::one(), &q)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn integral_matches_structural() {
        let spec = ContourSpec::new(1.0, 16);
        for (fam, idx) in [
            (Family::F1, TIndex::new(1, 1, 0)),
            (Family::F2, TIndex::new(2, 0, 1)),
            (Family::F3, TIndex::new(2, 0, 1)),
        ] {
            let a = basis_or_zero(fam, idx);
            let b = basis_or_zero(qr_partner(fam), idx);
            let structural = pair_structural(PairingKind::Qr, &a, &b)
                .unwrap()
                .to_complex64();
            let integral = pair_integral(PairingKind::Qr, &a, &b, spec).unwrap();
            assert!(
                (structural - integral).norm() < 1e-9,
                "{fam:?} {idx:?}: {structural} vs {integral}"
            );
        }
        // The reverse block: tilde column against positive row.
        for (fam, idx) in [
            (Family::Ft1, TIndex::new(1, 1, 0)),
            (Family::Ft2, TIndex::new(1, 1, 0)),
        ] {
            let a = basis_or_zero(fam, idx);
            let b = basis_or_zero(qr_partner(fam), idx);
            let structural = pair_structural(PairingKind::Qr, &a, &b)
                .unwrap()
                .to_complex64();
            let integral = pair_integral(PairingKind::Qr, &a, &b, spec).unwrap();
            assert!(
                (structural - integral).norm() < 1e-9,
                "{fam:?} {idx:?}: {structural} vs {integral}"
            );
        }
        // R-independence.
        let a = basis_or_zero(Family::F1, TIndex::new(1, 1, 0));
        let b = basis_or_zero(Family::Gt1, TIndex::new(1, 1, 0));
        let v1 = pair_integral(PairingKind::Qr, &a, &b, ContourSpec::new(0.5, 16)).unwrap();
        let v2 = pair_integral(PairingKind::Qr, &a, &b, ContourSpec::new(2.0, 16)).unwrap();
        assert!((v1 - v2).norm() < 1e-9);
        // BH block.
        let p = basis_or_zero(Family::Phi2, TIndex::new(2, 0, 0));
        let q = basis_or_zero(Family::PhiT2, TIndex::new(2, 0, 0));
        let structural = pair_structural(PairingKind::Bh, &p, &q)
            .unwrap()
            .to_complex64();
        let integral = pair_integral(PairingKind::Bh, &p, &q, spec).unwrap();
        assert!((structural - integral).norm() < 1e-9);
    }

    #[test]
    fn pseudo_form_values() {
        // (f1(0,0,1/2), f1(0,0,1/2)) = 1.
        let idx = TIndex::new(0, 0, 1);
        let a = basis_or_zero(Family::F1, idx);
        let got = pseudo_form(PseudoKind::UPlus, &a, &a).unwrap();
        assert_eq!(got, CRational::one());
        assert_eq!(
            pseudo_diagonal_printed(PseudoKind::UPlus, Family::F1, idx),
            CRational::one()
        );
        // (f2(1/2,1/2,0), f2(1/2,1/2,0)) = -2.
        let idx = TIndex::new(1, 1, 0);
        let a = basis_or_zero(Family::F2, idx);
        let got = pseudo_form(PseudoKind::UPlus, &a, &a).unwrap();
        assert_eq!(got, CRational::from_int(-2));
        // The integral route reproduces the printed factorial values on a
        // sweep, and the sign pattern is family1 positive, families 2 and
        // 3 negative.
        for fam in [Family::F1, Family::F2, Family::F3] {
            for l2 in 0..=2 {
                for idx in fam.enumerate(l2) {
                    let e = basis_or_zero(fam, idx);
                    let got = pseudo_form(PseudoKind::UPlus, &e, &e).unwrap();
                    let expect = pseudo_diagonal_printed(PseudoKind::UPlus, fam, idx);
                    assert_eq!(got, expect, "{fam:?} {idx:?}");
                    assert!(got.is_real());
                    let positive = got.re > rat(0);
                    assert_eq!(positive, fam == Family::F1, "{fam:?} {idx:?} sign");
                }
            }
        }
        for fam in [Family::Phi1, Family::Phi2] {
            for idx in fam.enumerate(2) {
                let e = basis_or_zero(fam, idx);
                let got = pseudo_form(PseudoKind::BhPlus, &e, &e).unwrap();
                let expect = pseudo_diagonal_printed(PseudoKind::BhPlus, fam, idx);
                assert_eq!(got, expect, "{fam:?} {idx:?}");
            }
        }
        // Mixed families vanish.
        let a = basis_or_zero(Family::F1, TIndex::new(2, 0, 1));
        let b = basis_or_zero(Family::F2, TIndex::new(2, 0, 1));
        assert!(pseudo_form(PseudoKind::UPlus, &a, &b).unwrap().is_zero());
        // The negative-degree forms share the sign pattern.
        for fam in [Family::Ft1, Family::Ft2, Family::Ft3] {
            for idx in fam.enumerate(2) {
                let e = basis_or_zero(fam, idx);
                let got = pseudo_form(PseudoKind::UMinus, &e, &e).unwrap();
                assert!(got.is_real());
                assert!(!got.is_zero());
                let positive = got.re > rat(0);
                assert_eq!(positive, fam == Family::Ft1, "{fam:?} {idx:?} sign");
            }
        }
    }

    #[test]
    fn invariance_and_proof_values() {
        // The printed proof coefficient: <pi'_l(B) f1_{l,m,n},
        // gt1_{l-1/2,m+1/2,n+1/2}> = -2l(l-m) at B = E11.
        let x = LieElem::b_unit(0, 0);
        let idx = TIndex::new(2, 0, 1);
        let a = crate::actions::act(
            crate::actions::ActionName::PiPrimeL,
            &x,
            &basis_or_zero(Family::F1, idx),
        )
        .unwrap();
        let b = basis_or_zero(Family::Gt1, TIndex::new(1, 1, 2));
        let got = pair_structural(PairingKind::Qr, &a, &b).unwrap();
        let expect = CRational::from_real(-rat(2) * half(2 - 0)); // -2l (l-m)
        assert_eq!(got, expect);
        // Invariance sweeps for the u(2,2) generators and E-blocks.
        for x in [
            LieElem::u22_x(),
            LieElem::u22_y(),
            LieElem::b_unit(0, 0),
            LieElem::b_unit(1, 0),
            LieElem::c_unit(0, 1),
        ] {
            for (fa, fb, ia, ib) in [
                (Family::F1, Family::Gt1, TIndex::new(2, 0, 1), TIndex::new(1, 1, 2)),
                (Family::F2, Family::Gt2, TIndex::new(2, 0, 1), TIndex::new(1, 1, 2)),
                (Family::F3, Family::Gt3, TIndex::new(2, 0, 1), TIndex::new(3, 1, 2)),
                (Family::Ft1, Family::G1, TIndex::new(1, 1, 0), TIndex::new(2, 2, 1)),
            ] {
                let a = basis_or_zero(fa, ia);
                let b = basis_or_zero(fb, ib);
                assert!(
                    check_invariance(PairingKind::Qr, &x, &a, &b).unwrap(),
                    "{fa:?} {ia:?} vs {fb:?} {ib:?}"
                );
            }
            let p = basis_or_zero(Family::Phi2, TIndex::new(2, 0, 0));
            let q = basis_or_zero(Family::PhiT1, TIndex::new(1, 1, 1));
            assert!(check_invariance(PairingKind::Bh, &x, &p, &q).unwrap());
        }
        // Inversion signs: -1 for QR, +1 for BH.
        let a = basis_or_zero(Family::F2, TIndex::new(2, 0, 1));
        let b = basis_or_zero(Family::Gt2, TIndex::new(2, 0, 1));
        assert!(check_inversion_sign(PairingKind::Qr, &a, &b).unwrap());
        let p = basis_or_zero(Family::Phi1, TIndex::new(2, 0, 2));
        let q = basis_or_zero(Family::PhiT1, TIndex::new(2, 0, 2));
        assert!(check_inversion_sign(PairingKind::Bh, &p, &q).unwrap());
    }

    #[test]
    fn dual_systems() {
        // QR duals pair to exactly one.
        for pair in qr_dual_system_plus(2) {
            let f = basis_or_zero(pair.f.0, pair.f.1);
            let g = basis_or_zero(pair.g.0, pair.g.1).scale(&pair.g_scale);
            assert_eq!(
                pair_structural(PairingKind::Qr, &f, &g).unwrap(),
                CRational::one()
            );
        }
        // The regular dual system has nonzero diagonal entries and
        // vanishing off-diagonal Gram entries on a sample.
        let duals = regular_dual_system(3).unwrap();
        assert_eq!(duals.len(), 2 + 6 + 12);
        let w = reg_wt_sym(1, 1, 0);
        let v_other = reg_v_sym(3, 1, 0);
        assert!(regular_pairing_exact(&w, &v_other).unwrap().is_zero());
        let v_same = reg_v_sym(1, 1, 0);
        let c = regular_pairing_exact(&w, &v_same).unwrap();
        assert!(!c.is_zero());
        // The reproducing property: summing v_i(W) (dual w_i)(Z) over the
        // low levels matches the leading terms of the regular kernel
        // (Z - W)^{-1}/N(Z - W) at W = 0, where only l = 1/2 survives.
        let z = NumBiquat::from_real_ecoords([0.9, 0.3, -0.2, 0.4]);
        let w0 = NumBiquat::zero();
        let mut acc = NumBiquat::zero();
        for ((l, m, n), scale) in &duals {
            let vv = reg_v_eval(*l, *m, *n, &w0);
            let ww = reg_wt_eval(*l, *m, *n, &z).unwrap();
            let s = scale.to_complex64();
            let outer = NumBiquat::new(
                vv[0] * ww[0],
                vv[0] * ww[1],
                vv[1] * ww[0],
                vv[1] * ww[1],
            );
            acc = &acc + &outer.scale(s);
        }
        let d = &z - &w0;
        let expect = d.inverse().unwrap().scale(1.0 / d.norm());
        assert!((&acc - &expect).abs() < 1e-12, "acc {acc:?} expect {expect:?}");
    }
}
