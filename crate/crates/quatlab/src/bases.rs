//! The K-type basis families: biharmonic phi / phi-tilde, quasi anti
//! regular f^(1..3), g^(1..3) and their tilde (negative-degree) versions,
//! together with subspace projections and exact expansion of functions in
//! these families.

use crate::rational::{half, CRational};
use crate::symfunc::{Shape, SymFunc};
use crate::tcoeff::{t_sym, t_sym_inv, to_nk_tl_basis, TIndex};
use crate::{Error, Result};
use num_rational::BigRational;
use std::collections::BTreeMap;

/// Basis family tag. `F*`/`G*` are column/row valued quasi anti regular
/// families of positive homogeneity degree, `Ft*`/`Gt*` their
/// negative-degree counterparts, `Phi*`/`PhiT*` the scalar biharmonic
/// families.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Family {
    Phi1,
    Phi2,
    PhiT1,
    PhiT2,
    F1,
    F2,
    F3,
    Ft1,
    Ft2,
    Ft3,
    G1,
    G2,
    G3,
    Gt1,
    Gt2,
    Gt3,
}

pub const F_FAMILIES: [Family; 6] = [
    Family::F1,
    Family::F2,
    Family::F3,
    Family::Ft1,
    Family::Ft2,
    Family::Ft3,
];

pub const G_FAMILIES: [Family; 6] = [
    Family::G1,
    Family::G2,
    Family::G3,
    Family::Gt1,
    Family::Gt2,
    Family::Gt3,
];

pub const PHI_FAMILIES: [Family; 4] =
    [Family::Phi1, Family::Phi2, Family::PhiT1, Family::PhiT2];

impl Family {
    pub fn shape(&self) -> Shape {
        use Family::*;
        match self {
            Phi1 | Phi2 | PhiT1 | PhiT2 => Shape::Scalar,
            F1 | F2 | F3 | Ft1 | Ft2 | Ft3 => Shape::Col2,
            G1 | G2 | G3 | Gt1 | Gt2 | Gt3 => Shape::Row2,
        }
    }

    pub fn is_tilde(&self) -> bool {
        use Family::*;
        matches!(self, PhiT1 | PhiT2 | Ft1 | Ft2 | Ft3 | Gt1 | Gt2 | Gt3)
    }

    /// Homogeneity degree of elements with doubled level `two_l`.
    pub fn degree(&self, two_l: i32) -> i32 {
        use Family::*;
        match self {
            Phi1 | Phi2 | F1 | F2 | F3 | G1 | G2 | G3 => two_l,
            PhiT1 | PhiT2 => -two_l,
            Ft1 | Ft2 | Ft3 | Gt1 | Gt2 | Gt3 => -two_l - 1,
        }
    }

    /// Doubled index ranges (m_lo, m_hi, n_lo, n_hi) at level `two_l`;
    /// both indices step by 1 (2 in doubled units).
    fn ranges(&self, two_l: i32) -> (i32, i32, i32, i32) {
        use Family::*;
        let l = two_l;
        match self {
            F1 => (-l, l, -l - 1, l + 1),
            F2 => (-l, l, -l + 1, l - 1),
            F3 => (-l + 2, l - 2, -l + 1, l - 1),
            G1 => (-l - 1, l + 1, -l, l),
            G2 => (-l + 1, l - 1, -l, l),
            G3 => (-l + 1, l - 1, -l + 2, l - 2),
            Ft1 => (-l - 1, l + 1, -l, l),
            Ft2 => (-l + 1, l - 1, -l, l),
            Ft3 => (-l + 1, l - 1, -l + 2, l - 2),
            Gt1 => (-l, l, -l - 1, l + 1),
            Gt2 => (-l, l, -l + 1, l - 1),
            Gt3 => (-l + 2, l - 2, -l + 1, l - 1),
            Phi1 | PhiT1 => (-l, l, -l, l),
            Phi2 | PhiT2 => (-l + 2, l - 2, -l + 2, l - 2),
        }
    }

    pub fn index_valid(&self, idx: TIndex) -> bool {
        if idx.two_l < 0 {
            return false;
        }
        let (m_lo, m_hi, n_lo, n_hi) = self.ranges(idx.two_l);
        idx.two_m >= m_lo
            && idx.two_m <= m_hi
            && (idx.two_m - m_lo) % 2 == 0
            && idx.two_n >= n_lo
            && idx.two_n <= n_hi
            && (idx.two_n - n_lo) % 2 == 0
    }

    /// All valid indices at level `two_l`, in deterministic order.
    pub fn enumerate(&self, two_l: i32) -> Vec<TIndex> {
        let mut out = Vec::new();
        if two_l < 0 {
            return out;
        }
        let (m_lo, m_hi, n_lo, n_hi) = self.ranges(two_l);
        let mut m = m_lo;
        while m <= m_hi {
            let mut n = n_lo;
            while n <= n_hi {
                out.push(TIndex::new(two_l, m, n));
                n += 2;
            }
            m += 2;
        }
        out
    }
}

/// A tagged basis function with its symbolic realization.
#[derive(Clone, Debug)]
pub struct BasisElement {
    pub family: Family,
    pub idx: TIndex,
    pub sym: SymFunc,
}

fn hf(two_x: i32) -> BigRational {
    half(two_x as i64)
}

fn ts(l2: i32, n2: i32, m2: i32) -> SymFunc {
    (*t_sym(l2, n2, m2)).clone()
}

fn ninv() -> SymFunc {
    SymFunc::n_pow(-1)
}

fn n1() -> SymFunc {
    SymFunc::n_pow(1)
}

/// The symbolic realization of a family element, with out-of-range
/// indices mapped to the zero function (the convention the action tables
/// rely on).
pub fn basis_or_zero(family: Family, idx: TIndex) -> SymFunc {
    if !family.index_valid(idx) {
        return SymFunc::zero(family.shape());
    }
    let (l2, m2, n2) = (idx.two_l, idx.two_m, idx.two_n);
    use Family::*;
    match family {
        Phi1 => ts(l2, n2, m2),
        Phi2 => n1().mul(&ts(l2 - 2, n2, m2)).unwrap(),
        PhiT1 => t_sym_inv(l2, m2, n2),
        PhiT2 => ninv().mul(&t_sym_inv(l2 - 2, m2, n2)).unwrap(),
        F1 => SymFunc::col2(ts(l2, n2 - 1, m2), ts(l2, n2 + 1, m2).neg()),
        F2 => SymFunc::col2(
            ts(l2, n2 - 1, m2).scale_rat(&hf(l2 - n2 + 1)),
            ts(l2, n2 + 1, m2).scale_rat(&hf(l2 + n2 + 1)),
        ),
        F3 => n1()
            .mul(&SymFunc::col2(
                ts(l2 - 2, n2 - 1, m2),
                ts(l2 - 2, n2 + 1, m2).neg(),
            ))
            .unwrap(),
        G1 => SymFunc::row2(
            ts(l2, n2, m2 - 1).scale_rat(&hf(l2 + m2 + 1)),
            ts(l2, n2, m2 + 1).scale_rat(&-hf(l2 - m2 + 1)),
        ),
        G2 => SymFunc::row2(ts(l2, n2, m2 - 1), ts(l2, n2, m2 + 1)),
        G3 => n1()
            .mul(&SymFunc::row2(
                ts(l2 - 2, n2, m2 - 1).scale_rat(&hf(l2 + m2 - 1)),
                ts(l2 - 2, n2, m2 + 1).scale_rat(&-hf(l2 - m2 - 1)),
            ))
            .unwrap(),
        Ft1 => SymFunc::col2(
            t_sym_inv(l2 + 1, m2, n2 + 1),
            t_sym_inv(l2 + 1, m2, n2 - 1).neg(),
        ),
        Ft2 => SymFunc::col2(
            ninv()
                .mul(&t_sym_inv(l2 - 1, m2, n2 + 1))
                .unwrap()
                .scale_rat(&hf(l2 - n2)),
            ninv()
                .mul(&t_sym_inv(l2 - 1, m2, n2 - 1))
                .unwrap()
                .scale_rat(&hf(l2 + n2)),
        ),
        Ft3 => SymFunc::col2(
            ninv().mul(&t_sym_inv(l2 - 1, m2, n2 + 1)).unwrap(),
            ninv().mul(&t_sym_inv(l2 - 1, m2, n2 - 1)).unwrap().neg(),
        ),
        Gt1 => SymFunc::row2(
            t_sym_inv(l2 + 1, m2 + 1, n2).scale_rat(&hf(l2 + m2 + 2)),
            t_sym_inv(l2 + 1, m2 - 1, n2).scale_rat(&-hf(l2 - m2 + 2)),
        ),
        Gt2 => ninv()
            .mul(&SymFunc::row2(
                t_sym_inv(l2 - 1, m2 + 1, n2),
                t_sym_inv(l2 - 1, m2 - 1, n2),
            ))
            .unwrap(),
        Gt3 => ninv()
            .mul(&SymFunc::row2(
                t_sym_inv(l2 - 1, m2 + 1, n2).scale_rat(&hf(l2 + m2)),
                t_sym_inv(l2 - 1, m2 - 1, n2).scale_rat(&-hf(l2 - m2)),
            ))
            .unwrap(),
    }
}

/// Fast numeric evaluation of a family element without materializing the
/// symbolic realization (used by the kernel partial sums). Out-of-range
/// indices give zero. Cross-checked against the symbolic path in tests.
pub fn eval_family(
    family: Family,
    idx: TIndex,
    z: &crate::biquat::NumBiquat,
) -> Result<crate::symfunc::NumValue> {
    use crate::symfunc::NumValue;
    use crate::tcoeff::t_eval;
    use num_complex::Complex64;
    let zero = Complex64::new(0.0, 0.0);
    if !family.index_valid(idx) {
        return Ok(match family.shape() {
            Shape::Scalar => NumValue::Scalar(zero),
            Shape::Col2 => NumValue::Col([zero; 2]),
            Shape::Row2 => NumValue::Row([zero; 2]),
            Shape::Mat2 => NumValue::Mat(crate::biquat::NumBiquat::zero()),
        });
    }
    let (l2, m2, n2) = (idx.two_l, idx.two_m, idx.two_n);
    let h = |x: i32| Complex64::new(x as f64 / 2.0, 0.0);
    let n = z.norm();
    use Family::*;
    let needs_inverse = family.is_tilde();
    let zi = if needs_inverse {
        Some(z.inverse()?)
    } else {
        None
    };
    Ok(match family {
        Phi1 => NumValue::Scalar(t_eval(l2, n2, m2, z)),
        Phi2 => NumValue::Scalar(n * t_eval(l2 - 2, n2, m2, z)),
        PhiT1 => NumValue::Scalar(t_eval(l2, m2, n2, zi.as_ref().unwrap())),
        PhiT2 => NumValue::Scalar(t_eval(l2 - 2, m2, n2, zi.as_ref().unwrap()) / n),
        F1 => NumValue::Col([t_eval(l2, n2 - 1, m2, z), -t_eval(l2, n2 + 1, m2, z)]),
        F2 => NumValue::Col([
            h(l2 - n2 + 1) * t_eval(l2, n2 - 1, m2, z),
            h(l2 + n2 + 1) * t_eval(l2, n2 + 1, m2, z),
        ]),
        F3 => NumValue::Col([
            n * t_eval(l2 - 2, n2 - 1, m2, z),
            -n * t_eval(l2 - 2, n2 + 1, m2, z),
        ]),
        G1 => NumValue::Row([
            h(l2 + m2 + 1) * t_eval(l2, n2, m2 - 1, z),
            -h(l2 - m2 + 1) * t_eval(l2, n2, m2 + 1, z),
        ]),
        G2 => NumValue::Row([t_eval(l2, n2, m2 - 1, z), t_eval(l2, n2, m2 + 1, z)]),
        G3 => NumValue::Row([
            n * h(l2 + m2 - 1) * t_eval(l2 - 2, n2, m2 - 1, z),
            -n * h(l2 - m2 - 1) * t_eval(l2 - 2, n2, m2 + 1, z),
        ]),
        Ft1 => {
            let w = zi.as_ref().unwrap();
            NumValue::Col([t_eval(l2 + 1, m2, n2 + 1, w), -t_eval(l2 + 1, m2, n2 - 1, w)])
        }
        Ft2 => {
            let w = zi.as_ref().unwrap();
            NumValue::Col([
                h(l2 - n2) * t_eval(l2 - 1, m2, n2 + 1, w) / n,
                h(l2 + n2) * t_eval(l2 - 1, m2, n2 - 1, w) / n,
            ])
        }
        Ft3 => {
            let w = zi.as_ref().unwrap();
            NumValue::Col([
                t_eval(l2 - 1, m2, n2 + 1, w) / n,
                -t_eval(l2 - 1, m2, n2 - 1, w) / n,
            ])
        }
        Gt1 => {
            let w = zi.as_ref().unwrap();
            NumValue::Row([
                h(l2 + m2 + 2) * t_eval(l2 + 1, m2 + 1, n2, w),
                -h(l2 - m2 + 2) * t_eval(l2 + 1, m2 - 1, n2, w),
            ])
        }
        Gt2 => {
            let w = zi.as_ref().unwrap();
            NumValue::Row([
                t_eval(l2 - 1, m2 + 1, n2, w) / n,
                t_eval(l2 - 1, m2 - 1, n2, w) / n,
            ])
        }
        Gt3 => {
            let w = zi.as_ref().unwrap();
            NumValue::Row([
                h(l2 + m2) * t_eval(l2 - 1, m2 + 1, n2, w) / n,
                -h(l2 - m2) * t_eval(l2 - 1, m2 - 1, n2, w) / n,
            ])
        }
    })
}

/// The named basis element; errors on indices outside the printed ranges.
pub fn basis(family: Family, idx: TIndex) -> Result<BasisElement> {
    if !family.index_valid(idx) {
        return Err(Error::IndexOutOfRange(format!(
            "{family:?} has no element at {idx:?}"
        )));
    }
    Ok(BasisElement {
        family,
        idx,
        sym: basis_or_zero(family, idx),
    })
}

/// Quasi left anti regular test: nabla box f = 0.
pub fn is_qlar(f: &SymFunc) -> bool {
    f.box_op().nabla().map(|g| g.is_zero()).unwrap_or(false)
}

/// Quasi right anti regular test: (box g) nabla (right) = 0.
pub fn is_qrar(g: &SymFunc) -> bool {
    g.box_op().nabla_right().map(|h| h.is_zero()).unwrap_or(false)
}

/// dim U(d) = dim U'(d) by assembling family index counts.
pub fn dimension_u(d: i32) -> usize {
    if d >= 0 {
        [Family::F1, Family::F2, Family::F3]
            .iter()
            .map(|f| f.enumerate(d).len())
            .sum()
    } else {
        let two_l = -d - 1;
        [Family::Ft1, Family::Ft2, Family::Ft3]
            .iter()
            .map(|f| f.enumerate(two_l).len())
            .sum()
    }
}

/// dim BH(d) by assembling family index counts (d != 0).
pub fn dimension_bh(d: i32) -> usize {
    if d >= 0 {
        [Family::Phi1, Family::Phi2]
            .iter()
            .map(|f| f.enumerate(d).len())
            .sum()
    } else {
        [Family::PhiT1, Family::PhiT2]
            .iter()
            .map(|f| f.enumerate(-d).len())
            .sum()
    }
}

/// Invariant subspaces recognized on the N^k t^l monomial basis.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SpaceTag {
    /// Scalar functions with k >= 0.
    ZhPlus,
    /// Scalar functions with -(2l+1) <= k <= -1.
    ZhZero,
    /// Scalar functions with k <= -(2l+2).
    ZhMinus,
    /// Harmonic polynomials: k = 0.
    HPlus,
    /// Harmonic functions of negative degree: k = -(2l+1).
    HMinus,
    /// Biharmonic span with 0 <= k <= 1.
    BhPlus,
    /// Biharmonic span with -1 <= 2l + k <= 0.
    BhMinus,
    /// Everything (identity projection).
    W,
}

impl SpaceTag {
    /// Monomial predicate on (k, 2l).
    pub fn admits(&self, k: i32, two_l: i32) -> bool {
        match self {
            SpaceTag::ZhPlus => k >= 0,
            SpaceTag::ZhZero => k >= -(two_l + 1) && k <= -1,
            SpaceTag::ZhMinus => k <= -(two_l + 2),
            SpaceTag::HPlus => k == 0,
            SpaceTag::HMinus => k == -(two_l + 1),
            SpaceTag::BhPlus => k == 0 || k == 1,
            SpaceTag::BhMinus => (two_l + k) == -1 || (two_l + k) == 0,
            SpaceTag::W => true,
        }
    }
}

fn assemble(shape: Shape, comps: Vec<SymFunc>) -> SymFunc {
    match shape {
        Shape::Scalar => comps.into_iter().next().unwrap(),
        Shape::Col2 => SymFunc::col2(comps[0].clone(), comps[1].clone()),
        Shape::Row2 => SymFunc::row2(comps[0].clone(), comps[1].clone()),
        Shape::Mat2 => SymFunc::mat2([
            comps[0].clone(),
            comps[1].clone(),
            comps[2].clone(),
            comps[3].clone(),
        ]),
    }
}

/// Projection onto a monomial-basis subspace, applied entrywise to shaped
/// functions. The three Zh projections partition the identity.
pub fn project(space: SpaceTag, f: &SymFunc) -> Result<SymFunc> {
    if space == SpaceTag::W {
        return Ok(f.clone());
    }
    let mut comps = Vec::new();
    for ci in 0..f.shape().component_count() {
        let scalar = f.component(ci);
        let coeffs = to_nk_tl_basis(&scalar)?;
        let kept: BTreeMap<(i32, TIndex), CRational> = coeffs
            .into_iter()
            .filter(|((k, idx), _)| space.admits(*k, idx.two_l))
            .collect();
        comps.push(crate::tcoeff::from_nk_tl_basis(&kept));
    }
    Ok(assemble(f.shape(), comps))
}

/// True when every monomial of every component satisfies the space
/// predicate.
pub fn is_member(space: SpaceTag, f: &SymFunc) -> Result<bool> {
    for ci in 0..f.shape().component_count() {
        let coeffs = to_nk_tl_basis(&f.component(ci))?;
        if coeffs
            .iter()
            .any(|((k, idx), _)| !space.admits(*k, idx.two_l))
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Writes a biharmonic function as h0 + N h1 with h0, h1 harmonic
/// (unique except in degree 0, where h1 = 0).
pub fn decompose_biharmonic(f: &SymFunc) -> Result<(SymFunc, SymFunc)> {
    if !f.box_op().box_op().is_zero() {
        return Err(Error::NotBiharmonic);
    }
    let mut h0_comps = Vec::new();
    let mut h1_comps = Vec::new();
    for ci in 0..f.shape().component_count() {
        let scalar = f.component(ci);
        let mut h0 = SymFunc::zero(Shape::Scalar);
        let mut h1 = SymFunc::zero(Shape::Scalar);
        for (k, h) in crate::symfunc::n_harmonic_decomposition(&scalar)? {
            let piece = SymFunc::n_pow(k as i16).mul(&h)?;
            if piece.box_op().is_zero() {
                h0 = h0.add(&piece);
            } else {
                let lowered = SymFunc::n_pow((k - 1) as i16).mul(&h)?;
                if !lowered.box_op().is_zero() {
                    return Err(Error::NotBiharmonic);
                }
                h1 = h1.add(&lowered);
            }
        }
        h0_comps.push(h0);
        h1_comps.push(h1);
    }
    Ok((
        assemble(f.shape(), h0_comps),
        assemble(f.shape(), h1_comps),
    ))
}

/// Exact dense Gaussian elimination: solve A x = b over the complex
/// rationals. Returns `None` when inconsistent.
fn solve_exact(a: &mut [Vec<CRational>], b: &mut [CRational]) -> Option<Vec<CRational>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].inv().expect("pivot nonzero");
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        b[r] = &b[r] * &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let factor = a[i][c].clone();
                for j in 0..cols {
                    let delta = &factor * &a[r][j];
                    a[i][j] = &a[i][j] - &delta;
                }
                let delta = &factor * &b[r];
                b[i] = &b[i] - &delta;
            }
        }
        pivot_of_col[c] = Some(r);
        r += 1;
        if r == rows {
            break;
        }
    }
    for i in r..rows {
        if !b[i].is_zero() {
            return None;
        }
    }
    let mut x = vec![CRational::zero(); cols];
    for (c, pv) in pivot_of_col.iter().enumerate() {
        if let Some(row) = pv {
            x[c] = b[*row].clone();
        }
    }
    Some(x)
}

/// Exact rank of a list of functions viewed as coefficient vectors in
/// canonical form.
pub fn exact_rank(funcs: &[SymFunc]) -> usize {
    if funcs.is_empty() {
        return 0;
    }
    let canon: Vec<SymFunc> = funcs.iter().map(|f| f.canonical_form()).collect();
    let mut coords: BTreeMap<(usize, crate::symfunc::Mono), usize> = BTreeMap::new();
    for f in &canon {
        for (ci, tm) in f.comps().iter().enumerate() {
            for m in tm.keys() {
                let next = coords.len();
                coords.entry((ci, *m)).or_insert(next);
            }
        }
    }
    let ncoords = coords.len();
    let mut rows: Vec<Vec<CRational>> = canon
        .iter()
        .map(|f| {
            let mut v = vec![CRational::zero(); ncoords];
            for (ci, tm) in f.comps().iter().enumerate() {
                for (m, c) in tm {
                    v[coords[&(ci, *m)]] = c.clone();
                }
            }
            v
        })
        .collect();
    let mut rank = 0;
    for c in 0..ncoords {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][c].inv().unwrap();
        for x in rows[rank].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for j in 0..ncoords {
                    let delta = &factor * &rows[rank][j];
                    rows[i][j] = &rows[i][j] - &delta;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Exact expansion of `f` in the span of the requested families (all
/// levels matching the homogeneous degrees of `f`). The reassembled
/// combination is verified to reproduce `f`; otherwise the residual is
/// reported.
pub fn expand_in_basis(
    f: &SymFunc,
    families: &[Family],
) -> Result<BTreeMap<(Family, TIndex), CRational>> {
    if f.is_zero() {
        return Ok(BTreeMap::new());
    }
    let mut candidates: Vec<(Family, TIndex, SymFunc)> = Vec::new();
    for (d, _) in f.grade() {
        for fam in families {
            if fam.shape() != f.shape() {
                continue;
            }
            let two_l = if fam.is_tilde() {
                match fam {
                    Family::PhiT1 | Family::PhiT2 => -d,
                    _ => -d - 1,
                }
            } else {
                d
            };
            if two_l < 0 || fam.degree(two_l) != d {
                continue;
            }
            for idx in fam.enumerate(two_l) {
                candidates.push((*fam, idx, basis_or_zero(*fam, idx)));
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::NotInSpan("no candidate basis elements".into()));
    }
    let canon_f = f.canonical_form();
    let canon_c: Vec<SymFunc> = candidates
        .iter()
        .map(|(_, _, s)| s.canonical_form())
        .collect();
    let mut coords: BTreeMap<(usize, crate::symfunc::Mono), usize> = BTreeMap::new();
    for g in canon_c.iter().chain(std::iter::once(&canon_f)) {
        for (ci, tm) in g.comps().iter().enumerate() {
            for m in tm.keys() {
                let next = coords.len();
                coords.entry((ci, *m)).or_insert(next);
            }
        }
    }
    let nrows = coords.len();
    let ncols = candidates.len();
    let mut a = vec![vec![CRational::zero(); ncols]; nrows];
    for (col_idx, g) in canon_c.iter().enumerate() {
        for (ci, tm) in g.comps().iter().enumerate() {
            for (m, c) in tm {
                a[coords[&(ci, *m)]][col_idx] = c.clone();
            }
        }
    }
    let mut b = vec![CRational::zero(); nrows];
    for (ci, tm) in canon_f.comps().iter().enumerate() {
        for (m, c) in tm {
            b[coords[&(ci, *m)]] = c.clone();
        }
    }
    let solution = solve_exact(&mut a, &mut b)
        .ok_or_else(|| Error::NotInSpan("linear system inconsistent".into()))?;
    let mut out = BTreeMap::new();
    let mut reassembled = SymFunc::zero(f.shape());
    for ((fam, idx, sym), coef) in candidates.iter().zip(&solution) {
        if coef.is_zero() {
            continue;
        }
        reassembled = reassembled.add(&sym.scale(coef));
        out.insert((*fam, *idx), coef.clone());
    }
    if &reassembled != f {
        return Err(Error::NotInSpan(format!(
            "nonzero residual {:?}",
            f.sub(&reassembled)
        )));
    }
    Ok(out)
}
