//! Truncated Clifford algebra on dual basis pairs, the fermionic Fock
//! module spanned by creation monomials, beta/gamma generating fields,
//! normal ordering, and the operator-product defect that reproduces the
//! kernels.
//!
//! Index universes carry a polarity split: for i in the minus class
//! beta_i creates and gamma_i annihilates; for i in the plus class
//! gamma_i creates and beta_i annihilates. The anticommutation relations
//! are {beta_i, gamma_j} = delta_ij with all other pairs vanishing.

use crate::bases::eval_family;
use crate::biquat::{in_domain, Domain};
use crate::pairing::{qr_dual_system_minus, qr_dual_system_plus, reg_v_eval, reg_wt_eval, regular_dual_system, DualPair};
use crate::rational::CRational;
use crate::{Error, NumBiquat, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Creation/annihilation split of the index set.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Polarity {
    Plus,
    Minus,
}

/// Amplitude ring for Fock states: exact rationals for the algebraic
/// tests, floats for the kernel defects.
pub trait Amplitude: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
}

impl Amplitude for CRational {
    fn zero() -> Self {
        CRational::zero()
    }
    fn one() -> Self {
        CRational::one()
    }
    fn is_zero(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl Amplitude for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.norm() == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

/// A generator beta_i or gamma_i.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Gen {
    pub beta: bool,
    pub idx: u32,
}

impl Gen {
    pub fn beta(idx: u32) -> Gen {
        Gen { beta: true, idx }
    }

    pub fn gamma(idx: u32) -> Gen {
        Gen { beta: false, idx }
    }

    fn is_creation(&self, polarity: &[Polarity]) -> bool {
        match polarity[self.idx as usize] {
            Polarity::Minus => self.beta,
            Polarity::Plus => !self.beta,
        }
    }
}

/// A state of the Fock module: finite combination of sorted creation
/// monomials. Immutable in use; all operations return fresh states.
#[derive(Clone, Debug)]
pub struct FockState<A: Amplitude> {
    pub terms: BTreeMap<Vec<u32>, A>,
}

impl<A: Amplitude> FockState<A> {
    pub fn vacuum() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), A::one());
        FockState { terms }
    }

    pub fn zero() -> Self {
        FockState {
            terms: BTreeMap::new(),
        }
    }

    pub fn vacuum_component(&self) -> A {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(A::zero)
    }

    pub fn add_term(&mut self, mono: Vec<u32>, amp: A) {
        if amp.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(existing) => {
                *existing = existing.add(&amp);
                if existing.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, amp);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, a) in &other.terms {
            out.add_term(m.clone(), a.clone());
        }
        out
    }

    pub fn scale(&self, c: &A) -> Self {
        let mut out = FockState::zero();
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.mul(c));
        }
        out
    }

    /// The bilinear form with orthonormal creation monomials; no
    /// conjugation (these modules carry no invariant Hilbert structure).
    pub fn pair(&self, other: &Self) -> A {
        let mut acc = A::zero();
        for (m, a) in &self.terms {
            if let Some(b) = other.terms.get(m) {
                acc = acc.add(&a.mul(b));
            }
        }
        acc
    }
}

/// Applies a single generator: creation inserts into the monomial with
/// the transposition sign, annihilation contracts against its partner.
pub fn apply_gen<A: Amplitude>(
    gen: Gen,
    polarity: &[Polarity],
    state: &FockState<A>,
) -> Result<FockState<A>> {
    if gen.idx as usize >= polarity.len() {
        return Err(Error::UnknownIndex(gen.idx as usize));
    }
    let creation = gen.is_creation(polarity);
    let mut out = FockState::zero();
    for (mono, amp) in &state.terms {
        match mono.binary_search(&gen.idx) {
            Ok(pos) => {
                if creation {
                    continue; // square of a creation operator vanishes
                }
                let sign_neg = pos % 2 == 1;
                let mut next = mono.clone();
                next.remove(pos);
                let amp = if sign_neg { amp.neg() } else { amp.clone() };
                out.add_term(next, amp);
            }
            Err(pos) => {
                if !creation {
                    continue; // nothing to contract
                }
                let sign_neg = pos % 2 == 1;
                let mut next = mono.clone();
                next.insert(pos, gen.idx);
                let amp = if sign_neg { amp.neg() } else { amp.clone() };
                out.add_term(next, amp);
            }
        }
    }
    Ok(out)
}

/// A formal word combination in the Clifford generators.
#[derive(Clone, Debug)]
pub struct CliffOp<A: Amplitude> {
    pub terms: Vec<(A, Vec<Gen>)>,
}

impl<A: Amplitude> CliffOp<A> {
    pub fn word(coef: A, word: Vec<Gen>) -> Self {
        CliffOp {
            terms: vec![(coef, word)],
        }
    }

    pub fn apply(&self, polarity: &[Polarity], state: &FockState<A>) -> Result<FockState<A>> {
        let mut out = FockState::zero();
        for (coef, word) in &self.terms {
            let mut cur = state.clone();
            for gen in word.iter().rev() {
                cur = apply_gen(*gen, polarity, &cur)?;
            }
            out = out.add(&cur.scale(coef));
        }
        Ok(out)
    }
}

/// Normal ordering: creation operators move left of annihilation
/// operators with a sign per transposition and no contraction terms.
/// Words are canonically sorted within the creation and annihilation
/// blocks (repeated generators vanish), making the result idempotent.
pub fn normal_order<A: Amplitude>(op: &CliffOp<A>, polarity: &[Polarity]) -> CliffOp<A> {
    let mut canonical: BTreeMap<Vec<Gen>, A> = BTreeMap::new();
    let mut stack: Vec<(A, Vec<Gen>)> = op.terms.clone();
    while let Some((coef, word)) = stack.pop() {
        if coef.is_zero() {
            continue;
        }
        let mut swapped = false;
        for i in 0..word.len().saturating_sub(1) {
            let a = word[i];
            let b = word[i + 1];
            if !a.is_creation(polarity) && b.is_creation(polarity) {
                let mut w2 = word.clone();
                w2.swap(i, i + 1);
                stack.push((coef.neg(), w2));
                swapped = true;
                break;
            }
        }
        if swapped {
            continue;
        }
        let split = word
            .iter()
            .position(|g| !g.is_creation(polarity))
            .unwrap_or(word.len());
        let mut sign_neg = false;
        let mut sort_block = |block: &mut Vec<Gen>| -> bool {
            let n = block.len();
            for i in 0..n {
                for j in 0..n.saturating_sub(1 + i) {
                    if block[j] > block[j + 1] {
                        block.swap(j, j + 1);
                        sign_neg = !sign_neg;
                    }
                }
            }
            block.windows(2).any(|w| w[0] == w[1])
        };
        let mut cre: Vec<Gen> = word[..split].to_vec();
        let mut ann: Vec<Gen> = word[split..].to_vec();
        if sort_block(&mut cre) || sort_block(&mut ann) {
            continue;
        }
        let mut w = cre;
        w.extend(ann);
        let amp = if sign_neg { coef.neg() } else { coef };
        let entry = canonical.entry(w).or_insert_with(A::zero);
        *entry = entry.add(&amp);
    }
    CliffOp {
        terms: canonical
            .into_iter()
            .filter(|(_, a)| !a.is_zero())
            .map(|(w, a)| (a, w))
            .collect(),
    }
}

/// The normal-ordered two-letter product :beta_i gamma_j:.
pub fn normal_pair<A: Amplitude>(i: u32, j: u32, polarity: &[Polarity]) -> CliffOp<A> {
    if i == j && polarity[i as usize] == Polarity::Plus {
        CliffOp::word(A::one().neg(), vec![Gen::gamma(j), Gen::beta(i)])
    } else {
        CliffOp::word(A::one(), vec![Gen::beta(i), Gen::gamma(j)])
    }
}

// ---------------------------------------------------------------------
// Field universes.
// ---------------------------------------------------------------------

/// The index universes used by the generating fields.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UniverseKind {
    /// Dual Laurent monomials z^n and z^{-n-1} in one complex variable.
    TwoDim { modes: i32 },
    /// Quasi anti regular bases with their pairing duals rescaled to
    /// exact delta-duality.
    QuasiRegular { max_two_l: i32 },
    /// Regular bases with the boundary-pairing duals.
    Regular { max_two_l: i32 },
}

/// Scalar or two-component coefficient value of a field.
#[derive(Clone, Copy, Debug)]
enum FieldVal {
    Scalar(Complex64),
    Col([Complex64; 2]),
    Row([Complex64; 2]),
}

enum UnivItem {
    TwoD { n: i32 },
    Qr { pair: DualPair },
    Reg { l2: i32, m2: i32, n2: i32, scale: CRational },
}

/// An ordered index set with polarities and numeric evaluators for the
/// dual coefficient functions f_i and g_i.
pub struct FieldUniverse {
    pub kind: UniverseKind,
    pub polarity: Vec<Polarity>,
    plus_items: Vec<usize>,
    items: Vec<UnivItem>,
}

impl FieldUniverse {
    /// Builds the universe. Duality <g_i, f_j> = delta_ij holds by the
    /// normalization constants of the dual systems, which are validated
    /// exactly where they are constructed.
    pub fn new(kind: UniverseKind) -> Result<Self> {
        let mut items = Vec::new();
        let mut polarity = Vec::new();
        match kind {
            UniverseKind::TwoDim { modes } => {
                for n in -modes..=modes {
                    items.push(UnivItem::TwoD { n });
                    polarity.push(if n >= 0 { Polarity::Plus } else { Polarity::Minus });
                }
            }
            UniverseKind::QuasiRegular { max_two_l } => {
                for pair in qr_dual_system_plus(max_two_l) {
                    items.push(UnivItem::Qr { pair });
                    polarity.push(Polarity::Plus);
                }
                for pair in qr_dual_system_minus(max_two_l) {
                    items.push(UnivItem::Qr { pair });
                    polarity.push(Polarity::Minus);
                }
            }
            UniverseKind::Regular { max_two_l } => {
                for ((l2, m2, n2), scale) in regular_dual_system(max_two_l)? {
                    items.push(UnivItem::Reg { l2, m2, n2, scale });
                    polarity.push(Polarity::Plus);
                }
            }
        }
        let plus_items = polarity
            .iter()
            .enumerate()
            .filter(|(_, p)| **p == Polarity::Plus)
            .map(|(i, _)| i)
            .collect();
        Ok(FieldUniverse {
            kind,
            polarity,
            plus_items,
            items,
        })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// f_i coefficient of the gamma field.
    fn f_val(&self, i: usize, z: &NumBiquat) -> Result<FieldVal> {
        Ok(match &self.items[i] {
            UnivItem::TwoD { n } => FieldVal::Scalar(z.z[0].powi(*n)),
            UnivItem::Qr { pair } => FieldVal::Col(eval_family(pair.f.0, pair.f.1, z)?.as_col()),
            UnivItem::Reg { l2, m2, n2, .. } => FieldVal::Col(reg_v_eval(*l2, *m2, *n2, z)),
        })
    }

    /// g_i coefficient of the beta field.
    fn g_val(&self, i: usize, z: &NumBiquat) -> Result<FieldVal> {
        Ok(match &self.items[i] {
            UnivItem::TwoD { n } => FieldVal::Scalar(z.z[0].powi(-n - 1)),
            UnivItem::Qr { pair } => {
                let raw = eval_family(pair.g.0, pair.g.1, z)?.as_row();
                let s = pair.g_scale.to_complex64();
                FieldVal::Row([raw[0] * s, raw[1] * s])
            }
            UnivItem::Reg { l2, m2, n2, scale } => {
                let raw = reg_wt_eval(*l2, *m2, *n2, z)?;
                let s = scale.to_complex64();
                FieldVal::Row([raw[0] * s, raw[1] * s])
            }
        })
    }

    fn domain_ok(&self, z: &NumBiquat, w: &NumBiquat) -> bool {
        match self.kind {
            UniverseKind::TwoDim { .. } => z.z[0].norm() > w.z[0].norm(),
            _ => z
                .inverse()
                .map(|zi| in_domain(&(&zi * w), Domain::DPlus, 1.0, 1e-10))
                .unwrap_or(false),
        }
    }
}

/// Kernel-shaped defect value.
#[derive(Clone, Copy, Debug)]
pub enum DefectValue {
    Scalar(Complex64),
    Mat(NumBiquat),
}

impl DefectValue {
    pub fn abs(&self) -> f64 {
        match self {
            DefectValue::Scalar(c) => c.norm(),
            DefectValue::Mat(m) => m.abs(),
        }
    }

    pub fn as_scalar(&self) -> Complex64 {
        match self {
            DefectValue::Scalar(c) => *c,
            _ => panic!("scalar defect expected"),
        }
    }

    pub fn as_mat(&self) -> NumBiquat {
        match self {
            DefectValue::Mat(m) => *m,
            _ => panic!("matrix defect expected"),
        }
    }
}

/// The vacuum matrix element of the field product beta(Z) gamma(W): the
/// gamma field applied to the vacuum, then the vacuum component read off
/// after each contracting beta generator. A one-particle creation
/// monomial {j} can only return to the vacuum through the generator that
/// removes j, so the double field sum collapses without approximation.
pub fn field_product_defect(
    universe: &FieldUniverse,
    z: &NumBiquat,
    w: &NumBiquat,
) -> Result<DefectValue> {
    if !universe.domain_ok(z, w) {
        return Err(Error::DomainViolation(
            "field product defect outside the kernel's convergence domain".into(),
        ));
    }
    let mut scalar_acc = Complex64::new(0.0, 0.0);
    let mut mat_acc = NumBiquat::zero();
    let mut matrix_valued = false;
    for &j in &universe.plus_items {
        let gamma_state = apply_gen(
            Gen::gamma(j as u32),
            &universe.polarity,
            &FockState::<Complex64>::vacuum(),
        )?;
        for mono in gamma_state.terms.keys() {
            if mono.len() != 1 {
                continue;
            }
            let i = mono[0];
            if universe.polarity[i as usize] != Polarity::Plus {
                continue;
            }
            let contracted =
                apply_gen(Gen::beta(i), &universe.polarity, &gamma_state)?.vacuum_component();
            if contracted.is_zero() {
                continue;
            }
            let fj = universe.f_val(j, w)?;
            let gi = universe.g_val(i as usize, z)?;
            match (fj, gi) {
                (FieldVal::Scalar(fv), FieldVal::Scalar(gv)) => {
                    scalar_acc += contracted * gv * fv;
                }
                (FieldVal::Col(fv), FieldVal::Row(gv)) => {
                    matrix_valued = true;
                    let outer = NumBiquat::new(
                        fv[0] * gv[0],
                        fv[0] * gv[1],
                        fv[1] * gv[0],
                        fv[1] * gv[1],
                    );
                    mat_acc = &mat_acc + &outer.scale(contracted);
                }
                _ => {
                    return Err(Error::ShapeMismatch(
                        "field coefficients must pair column against row".into(),
                    ))
                }
            }
        }
    }
    Ok(if matrix_valued {
        DefectValue::Mat(mat_acc)
    } else {
        DefectValue::Scalar(scalar_acc)
    })
}

/// State independence of the defect: <s, beta_i gamma_j s> minus
/// <s, :beta_i gamma_j: s> equals delta_ij (plus polarity) times <s, s>,
/// verified exactly through the operator machinery.
pub fn defect_is_state_independent<A: Amplitude>(
    polarity: &[Polarity],
    i: u32,
    j: u32,
    state: &FockState<A>,
) -> Result<bool> {
    let word = CliffOp::word(A::one(), vec![Gen::beta(i), Gen::gamma(j)]);
    let ordered = normal_pair::<A>(i, j, polarity);
    let lhs = state.pair(&word.apply(polarity, state)?);
    let rhs = state.pair(&ordered.apply(polarity, state)?);
    let diff = lhs.add(&rhs.neg());
    let expected = if i == j && polarity[i as usize] == Polarity::Plus {
        state.pair(state)
    } else {
        A::zero()
    };
    Ok(diff.add(&expected.neg()).is_zero())
}

// ---------------------------------------------------------------------
// Two-dimensional currents and correlation functions.
// ---------------------------------------------------------------------

/// A small matrix over the Laurent polynomials C[z, z^{-1}] with exact
/// coefficients.
#[derive(Clone, Debug)]
pub struct LaurentMat {
    pub size: usize,
    /// (row, col, power) -> coefficient.
    pub entries: BTreeMap<(usize, usize, i32), CRational>,
}

impl LaurentMat {
    pub fn new(size: usize) -> Self {
        LaurentMat {
            size,
            entries: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, row: usize, col: usize, power: i32, coef: CRational) {
        if coef.is_zero() {
            self.entries.remove(&(row, col, power));
        } else {
            self.entries.insert((row, col, power), coef);
        }
    }

    fn max_abs_power(&self) -> i32 {
        self.entries
            .keys()
            .map(|(_, _, p)| p.abs())
            .max()
            .unwrap_or(0)
    }
}

/// The current of F: the exact mode sum over F_{ab,k} :beta^a_{n+k}
/// gamma^b_n:, the common contour factor being dropped consistently on
/// both evaluation routes.
fn current_op(f: &LaurentMat, modes: i32, polarity: &[Polarity]) -> CliffOp<CRational> {
    let size = f.size;
    let flat = |component: usize, n: i32| ((n + modes) as usize * size + component) as u32;
    let mut terms = Vec::new();
    for ((a, b, k), coef) in &f.entries {
        let mut n = -modes;
        while n <= modes {
            let m = n + k;
            if m >= -modes && m <= modes {
                let pair = normal_pair::<CRational>(flat(*a, m), flat(*b, n), polarity);
                for (c, w) in pair.terms {
                    terms.push((&c * coef, w));
                }
            }
            n += 1;
        }
    }
    CliffOp { terms }
}

/// Three-point correlation of currents evaluated two independent ways:
/// through the Fock representation, and through the triple contour
/// extraction of the radially ordered propagator chain. The complete
/// contour evaluation carries one term per cyclic arrangement of the
/// three vertices and an overall fermion-loop sign:
///
/// ```text
/// -( tr[F(z1) S12 G(z2) S23 H(z3) S31]
///  + tr[F(z1) S13 H(z3) S32 G(z2) S21] ),   S_ij = 1/(z_i - z_j),
/// ```
///
/// each factor expanded in |z1| > |z2| > |z3| and the coefficient of
/// (z1 z2 z3)^{-1} extracted. Returns (fock, contour); the two agree
/// exactly.
pub fn correlation_2d(
    f: &LaurentMat,
    g: &LaurentMat,
    h: &LaurentMat,
) -> Result<(CRational, CRational)> {
    assert!(f.size == g.size && g.size == h.size, "matrix sizes differ");
    let size = f.size;
    let modes = f.max_abs_power() + g.max_abs_power() + h.max_abs_power() + 2;
    let n_idx = (2 * modes + 1) as usize * size;
    let mut polarity = Vec::with_capacity(n_idx);
    for n in -modes..=modes {
        for _ in 0..size {
            polarity.push(if n >= 0 { Polarity::Plus } else { Polarity::Minus });
        }
    }
    let op_f = current_op(f, modes, &polarity);
    let op_g = current_op(g, modes, &polarity);
    let op_h = current_op(h, modes, &polarity);
    let vac = FockState::<CRational>::vacuum();
    let s1 = op_h.apply(&polarity, &vac)?;
    let s2 = op_g.apply(&polarity, &s1)?;
    let s3 = op_f.apply(&polarity, &s2)?;
    let fock_value = s3.vacuum_component();
    // First cycle: S12 S23 S31 with
    // S12 = sum_{p>=0} z2^p z1^{-p-1}, S23 = sum_{q>=0} z3^q z2^{-q-1},
    // S31 = -sum_{r>=0} z3^r z1^{-r-1}.
    let mut cycle_a = CRational::zero();
    for ((a1, b1, k1), c1) in &f.entries {
        for ((a2, b2, k2), c2) in &g.entries {
            if b1 != a2 {
                continue;
            }
            for ((a3, b3, k3), c3) in &h.entries {
                if b2 != a3 || b3 != a1 {
                    continue;
                }
                for q in 0..=(2 * modes) {
                    let p = q - k2;
                    let r = -1 - k3 - q;
                    if p < 0 || r < 0 || k1 - p - r - 1 != 0 {
                        continue;
                    }
                    let prod = &(&(c1 * c2) * c3) * &CRational::from_int(-1);
                    cycle_a += &prod;
                }
            }
        }
    }
    // Second cycle: S13 S32 S21 with
    // S13 = sum_{a>=0} z3^a z1^{-a-1}, S32 = -sum_{c>=0} z3^c z2^{-c-1},
    // S21 = -sum_{b>=0} z2^b z1^{-b-1}.
    let mut cycle_b = CRational::zero();
    for ((a1, b1, k1), c1) in &f.entries {
        for ((a3, b3, k3), c3) in &h.entries {
            if b1 != a3 {
                continue;
            }
            for ((a2, b2, k2), c2) in &g.entries {
                if b3 != a2 || b2 != a1 {
                    continue;
                }
                for b in 0..=(2 * modes) {
                    let a = k1 - 1 - b;
                    let c = k2 + b;
                    if a < 0 || c < 0 || k3 + a + c != -1 {
                        continue;
                    }
                    cycle_b += &(&(c1 * c2) * c3);
                }
            }
        }
    }
    let contour = -(&cycle_a + &cycle_b);
    Ok((fock_value, contour))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn small_polarity() -> Vec<Polarity> {
        vec![
            Polarity::Minus,
            Polarity::Minus,
            Polarity::Plus,
            Polarity::Plus,
            Polarity::Plus,
        ]
    }

    fn random_state(rng: &mut StdRng, n: u32, terms: usize) -> FockState<CRational> {
        let mut s = FockState::zero();
        for _ in 0..terms {
            let mut mono: Vec<u32> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
            mono.sort_unstable();
            mono.dedup();
            s.add_term(mono, CRational::from_int(rng.gen_range(-3..4)));
        }
        if s.terms.is_empty() {
            s.add_term(vec![], CRational::one());
        }
        s
    }

    #[test]
    fn creation_annihilation_basics() {
        let pol = small_polarity();
        let vac = FockState::<CRational>::vacuum();
        let s = apply_gen(Gen::beta(0), &pol, &vac).unwrap();
        assert_eq!(s.terms.len(), 1);
        assert!(s.terms.contains_key(&vec![0]));
        let s = apply_gen(Gen::gamma(0), &pol, &vac).unwrap();
        assert!(s.terms.is_empty());
        assert!(apply_gen(Gen::beta(9), &pol, &vac).is_err());
    }

    #[test]
    fn anticommutation_relations_random() {
        let pol = small_polarity();
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..100 {
            let s = random_state(&mut rng, 5, 3);
            let i = rng.gen_range(0..5) as u32;
            let j = rng.gen_range(0..5) as u32;
            let bg = apply_gen(
                Gen::beta(i),
                &pol,
                &apply_gen(Gen::gamma(j), &pol, &s).unwrap(),
            )
            .unwrap();
            let gb = apply_gen(
                Gen::gamma(j),
                &pol,
                &apply_gen(Gen::beta(i), &pol, &s).unwrap(),
            )
            .unwrap();
            let anti = bg.add(&gb);
            let expect = if i == j { s.clone() } else { FockState::zero() };
            let diff = anti.add(&expect.scale(&CRational::from_int(-1)));
            assert!(diff.terms.is_empty(), "anticommutator failed at {i},{j}");
            let bb = apply_gen(Gen::beta(i), &pol, &apply_gen(Gen::beta(j), &pol, &s).unwrap())
                .unwrap()
                .add(
                    &apply_gen(
                        Gen::beta(j),
                        &pol,
                        &apply_gen(Gen::beta(i), &pol, &s).unwrap(),
                    )
                    .unwrap(),
                );
            assert!(bb.terms.is_empty());
            let gg = apply_gen(
                Gen::gamma(i),
                &pol,
                &apply_gen(Gen::gamma(j), &pol, &s).unwrap(),
            )
            .unwrap()
            .add(
                &apply_gen(
                    Gen::gamma(j),
                    &pol,
                    &apply_gen(Gen::gamma(i), &pol, &s).unwrap(),
                )
                .unwrap(),
            );
            assert!(gg.terms.is_empty());
        }
    }

    #[test]
    fn normal_ordering_rules() {
        let pol = small_polarity();
        // Plus polarity: :beta_2 gamma_2: = -gamma_2 beta_2.
        let op = normal_pair::<CRational>(2, 2, &pol);
        assert_eq!(op.terms.len(), 1);
        assert_eq!(op.terms[0].1, vec![Gen::gamma(2), Gen::beta(2)]);
        assert_eq!(op.terms[0].0, CRational::from_int(-1));
        // Minus polarity keeps the product.
        let op = normal_pair::<CRational>(0, 0, &pol);
        assert_eq!(op.terms[0].1, vec![Gen::beta(0), Gen::gamma(0)]);
        // Reordering a reversed pair flips the sign and drops the
        // contraction.
        let word = CliffOp::word(CRational::one(), vec![Gen::gamma(0), Gen::beta(0)]);
        let no = normal_order(&word, &pol);
        assert_eq!(no.terms.len(), 1);
        assert_eq!(no.terms[0].1, vec![Gen::beta(0), Gen::gamma(0)]);
        assert_eq!(no.terms[0].0, CRational::from_int(-1));
        // Idempotence on a longer word.
        let word = CliffOp::word(
            CRational::from_int(2),
            vec![Gen::gamma(1), Gen::beta(0), Gen::gamma(3), Gen::beta(2)],
        );
        let once = normal_order(&word, &pol);
        let twice = normal_order(&once, &pol);
        assert_eq!(once.terms.len(), twice.terms.len());
        for ((c1, w1), (c2, w2)) in once.terms.iter().zip(twice.terms.iter()) {
            assert_eq!(w1, w2);
            assert!((c1 + &c2.neg()).is_zero());
        }
        // The normal-ordering defect on the vacuum acts as the identity
        // for a plus-polarity pair.
        let vac = FockState::<CRational>::vacuum();
        let raw = CliffOp::word(CRational::one(), vec![Gen::beta(2), Gen::gamma(2)]);
        let diff = raw.apply(&pol, &vac).unwrap().add(
            &normal_pair::<CRational>(2, 2, &pol)
                .apply(&pol, &vac)
                .unwrap()
                .scale(&CRational::from_int(-1)),
        );
        assert_eq!(diff.vacuum_component(), CRational::one());
    }

    #[test]
    fn state_independence_of_defect() {
        let pol = small_polarity();
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..20 {
            let s = random_state(&mut rng, 5, 4);
            for i in 0..5u32 {
                for j in 0..5u32 {
                    assert!(
                        defect_is_state_independent(&pol, i, j, &s).unwrap(),
                        "defect not state independent at ({i}, {j})"
                    );
                }
            }
        }
    }

    #[test]
    fn two_dim_defect_geometric() {
        let universe = FieldUniverse::new(UniverseKind::TwoDim { modes: 60 }).unwrap();
        let z = NumBiquat::scalar(Complex64::new(2.0, 0.0));
        let w = NumBiquat::scalar(Complex64::new(1.0, 0.0));
        let got = field_product_defect(&universe, &z, &w).unwrap().as_scalar();
        assert!((got - 1.0).norm() < 1e-9, "got {got}");
        // Outside |z| > |w| the domain check fires.
        assert!(field_product_defect(&universe, &w, &z).is_err());
    }

    #[test]
    fn quasi_regular_defect_matches_kernel() {
        let universe =
            FieldUniverse::new(UniverseKind::QuasiRegular { max_two_l: 30 }).unwrap();
        let z = NumBiquat::one();
        let w = NumBiquat::one().scale(0.3);
        let got = field_product_defect(&universe, &z, &w).unwrap().as_mat();
        let expect = (&z - &w).scale(1.0 / (&z - &w).norm());
        assert!(
            (&got - &expect).abs() < 1e-6,
            "defect {got:?} kernel {expect:?}"
        );
        // Exactly (to rounding) the truncated kernel partial sum with the
        // arguments exchanged and negated.
        let (series, _) =
            crate::kernels::kernel_series(crate::kernels::KernelId::QrKernel1, &w, &z, 30, false)
                .unwrap();
        let s = series.as_mat().scale(-1.0);
        assert!((&got - &s).abs() < 1e-12);
    }

    #[test]
    fn regular_defect_matches_cauchy_fueter() {
        let universe = FieldUniverse::new(UniverseKind::Regular { max_two_l: 30 }).unwrap();
        let z = NumBiquat::one();
        let w = NumBiquat::one().scale(0.3);
        let got = field_product_defect(&universe, &z, &w).unwrap().as_mat();
        let d = &z - &w;
        let expect = d.inverse().unwrap().scale(1.0 / d.norm());
        assert!(
            (&got - &expect).abs() < 1e-6,
            "defect {got:?} kernel {expect:?}"
        );
    }

    #[test]
    fn correlation_examples() {
        let zero = LaurentMat::new(1);
        let (a, b) = correlation_2d(&zero, &zero, &zero).unwrap();
        assert!(a.is_zero() && b.is_zero());
        // F = z, G = z^{-1}, H = 1.
        let mut f = LaurentMat::new(1);
        f.set(0, 0, 1, CRational::one());
        let mut g = LaurentMat::new(1);
        g.set(0, 0, -1, CRational::one());
        let mut h = LaurentMat::new(1);
        h.set(0, 0, 0, CRational::one());
        let (a, b) = correlation_2d(&f, &g, &h).unwrap();
        assert_eq!(a, b);
        // Scalar constants.
        let (a, b) = correlation_2d(&h, &h, &h).unwrap();
        assert_eq!(a, b);
        // Abelian (1x1) three-point functions vanish: the two cyclic
        // contractions cancel.
        let mut f2 = LaurentMat::new(1);
        f2.set(0, 0, 2, CRational::one());
        let (a, b) = correlation_2d(&f2, &g, &g).unwrap();
        assert_eq!(a, b);
        assert!(a.is_zero());
        // A genuinely noncommutative case with a nonzero value:
        // F = z E_{01}, G = E_{10}, H = z^{-1} E_{00}.
        let mut fm = LaurentMat::new(2);
        fm.set(0, 1, 1, CRational::one());
        let mut gm = LaurentMat::new(2);
        gm.set(1, 0, 0, CRational::one());
        let mut hm = LaurentMat::new(2);
        hm.set(0, 0, -1, CRational::one());
        let (a, b) = correlation_2d(&fm, &gm, &hm).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, CRational::one());
        // Random dense instances, exact agreement including nonzero
        // values.
        let mut rng = StdRng::seed_from_u64(5);
        let mut nonzero_seen = false;
        for _ in 0..8 {
            let mut rand_mat = |rng: &mut StdRng| {
                let mut m = LaurentMat::new(2);
                for _ in 0..10 {
                    m.set(
                        rng.gen_range(0..2),
                        rng.gen_range(0..2),
                        rng.gen_range(-2..3),
                        CRational::from_int(rng.gen_range(-2..3)),
                    );
                }
                m
            };
            let f = rand_mat(&mut rng);
            let g = rand_mat(&mut rng);
            let h = rand_mat(&mut rng);
            let (a, b) = correlation_2d(&f, &g, &h).unwrap();
            assert_eq!(a, b, "fock {a:?} vs contour {b:?}");
            nonzero_seen |= !a.is_zero();
        }
        assert!(nonzero_seen, "random sweep never produced a nonzero value");
    }
}
