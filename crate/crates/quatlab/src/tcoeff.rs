//! SU(2) matrix coefficients t^l_{n m}(Z) as exact symbolic functions,
//! their derivative/recurrence identities, and conversion of scalar
//! functions to the N^k t^l monomial basis.
//!
//! The coefficient is the binomial extraction
//!
//! ```text
//! t^l_{n m}(Z) = [s^{l-n}] (s z11 + z21)^{l-m} (s z12 + z22)^{l+m},
//! ```
//!
//! a polynomial homogeneous of degree 2l. Indices are stored doubled so
//! half-integers stay exact. Out-of-range indices (|m| > l or |n| > l, or
//! parity mismatch) give the zero function by convention, because the
//! action tables freely produce boundary indices.

use crate::rational::{rat, CRational};
use crate::symfunc::{n_harmonic_decomposition, Mono, Shape, SymFunc, TermMap};
use crate::{Error, NumBiquat, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

/// Half-integer index triple (l, m, n) stored as doubled integers.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct TIndex {
    pub two_l: i32,
    pub two_m: i32,
    pub two_n: i32,
}

impl TIndex {
    pub fn new(two_l: i32, two_m: i32, two_n: i32) -> Self {
        TIndex { two_l, two_m, two_n }
    }

    /// True when the coefficient is not identically zero: l >= 0,
    /// m, n = l (mod 1), |m| <= l and |n| <= l.
    pub fn in_range(&self) -> bool {
        self.two_l >= 0
            && (self.two_m - self.two_l) % 2 == 0
            && (self.two_n - self.two_l) % 2 == 0
            && self.two_m.abs() <= self.two_l
            && self.two_n.abs() <= self.two_l
    }
}

fn binom_big(n: i64, k: i64) -> BigRational {
    if k < 0 || k > n {
        return BigRational::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..k.min(n - k) {
        num *= BigInt::from(n - j);
        den *= BigInt::from(j + 1);
    }
    BigRational::new(num, den)
}

fn t_cache() -> &'static RwLock<HashMap<(i32, i32, i32), Arc<SymFunc>>> {
    static CACHE: OnceLock<RwLock<HashMap<(i32, i32, i32), Arc<SymFunc>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The matrix coefficient t^l_{n m}(Z) as an exact scalar function.
/// `two_n` is the first (row) index, `two_m` the second.
pub fn t_sym(two_l: i32, two_n: i32, two_m: i32) -> Arc<SymFunc> {
    let idx = (two_l, two_n, two_m);
    if let Some(hit) = t_cache().read().expect("t cache poisoned").get(&idx) {
        return hit.clone();
    }
    let tix = TIndex::new(two_l, two_m, two_n);
    let f = if !tix.in_range() {
        SymFunc::zero(Shape::Scalar)
    } else {
        // sum over j + k = l - n of C(l-m, j) C(l+m, k)
        //   z11^j z12^k z21^{l-m-j} z22^{l+m-k}.
        let lm = (two_l - two_m) / 2; // l - m
        let lpm = (two_l + two_m) / 2; // l + m
        let ln = (two_l - two_n) / 2; // l - n
        let mut terms = TermMap::new();
        for j in 0..=ln.min(lm) {
            let k = ln - j;
            if k > lpm {
                continue;
            }
            let coef = binom_big(lm as i64, j as i64) * binom_big(lpm as i64, k as i64);
            if coef.is_zero() {
                continue;
            }
            let mono = Mono {
                e: [j as u16, k as u16, (lm - j) as u16, (lpm - k) as u16],
                npow: 0,
            };
            terms.insert(mono, CRational::from_real(coef));
        }
        SymFunc::from_scalar_terms(terms)
    };
    let arc = Arc::new(f);
    t_cache()
        .write()
        .expect("t cache poisoned")
        .insert(idx, arc.clone());
    arc
}

/// t^l_{n m}(Z^{-1}) realized exactly via Z^{-1} = Z+ / N(Z).
pub fn t_sym_inv(two_l: i32, two_n: i32, two_m: i32) -> SymFunc {
    t_sym(two_l, two_n, two_m).subst_inverse()
}

/// Fast numeric evaluation of t^l_{n m} at a point.
pub fn t_eval(two_l: i32, two_n: i32, two_m: i32, z: &NumBiquat) -> Complex64 {
    if !TIndex::new(two_l, two_m, two_n).in_range() {
        return Complex64::zero();
    }
    let lm = ((two_l - two_m) / 2) as i64;
    let lpm = ((two_l + two_m) / 2) as i64;
    let ln = ((two_l - two_n) / 2) as i64;
    let mut acc = Complex64::zero();
    for j in 0..=ln.min(lm) {
        let k = ln - j;
        if k > lpm {
            continue;
        }
        let c1 = binom_f64(lm, j);
        let c2 = binom_f64(lpm, k);
        if c1 == 0.0 || c2 == 0.0 {
            continue;
        }
        acc += c1
            * c2
            * z.z[0].powi(j as i32)
            * z.z[1].powi(k as i32)
            * z.z[2].powi((lm - j) as i32)
            * z.z[3].powi((lpm - k) as i32);
    }
    acc
}

fn binom_f64(n: i64, k: i64) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc *= (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

/// The character chi_l(Z) = sum_n t^l_{n n}(Z), evaluated numerically.
pub fn character(two_l: i32, z: &NumBiquat) -> Complex64 {
    let mut acc = Complex64::zero();
    let mut two_n = -two_l;
    while two_n <= two_l {
        acc += t_eval(two_l, two_n, two_n, z);
        two_n += 2;
    }
    acc
}

/// Closed form of chi_l at a diagonalizable point with distinct
/// eigenvalues.
pub fn character_closed(two_l: i32, z: &NumBiquat) -> Complex64 {
    let [l1, l2] = z.eigenvalues();
    (l1.powi(two_l + 1) - l2.powi(two_l + 1)) / (l1 - l2)
}

/// The 2x2 derivative matrix (d f) = [[d11 f, d21 f], [d12 f, d22 f]],
/// i.e. one half of nabla f, for a scalar function.
pub fn d_matrix(f: &SymFunc) -> Result<SymFunc> {
    Ok(f.nabla()?.scale(&CRational::from_ratio(1, 2)))
}

fn coef_mat(entries: [(BigRational, SymFunc); 4]) -> SymFunc {
    let [a, b, c, d] = entries;
    SymFunc::mat2([
        a.1.scale_rat(&a.0),
        b.1.scale_rat(&b.0),
        c.1.scale_rat(&c.0),
        d.1.scale_rat(&d.0),
    ])
}

fn hf(two_x: i32) -> BigRational {
    crate::rational::half(two_x as i64)
}

/// Derivative identity: d t^l_{n m} equals the printed matrix of
/// (l -+ m) t^{l-1/2} coefficients. Exact symbolic equality.
pub fn check_dt_identity(idx: TIndex) -> bool {
    let (l2, m2, n2) = (idx.two_l, idx.two_m, idx.two_n);
    let lhs = d_matrix(&t_sym(l2, n2, m2)).expect("scalar has a derivative matrix");
    let rhs = coef_mat([
        (hf(l2 - m2), (*t_sym(l2 - 1, n2 + 1, m2 + 1)).clone()),
        (hf(l2 - m2), (*t_sym(l2 - 1, n2 - 1, m2 + 1)).clone()),
        (hf(l2 + m2), (*t_sym(l2 - 1, n2 + 1, m2 - 1)).clone()),
        (hf(l2 + m2), (*t_sym(l2 - 1, n2 - 1, m2 - 1)).clone()),
    ]);
    lhs == rhs
}

/// Recurrence: Z t^l_{n m} decomposes into l+1/2 and l-1/2 terms with the
/// printed coefficients. Exact symbolic equality.
pub fn check_zt_identity(idx: TIndex) -> bool {
    let (l2, m2, n2) = (idx.two_l, idx.two_m, idx.two_n);
    let t = t_sym(l2, n2, m2);
    let lhs = SymFunc::z_matrix().mul(&t).expect("matrix times scalar");
    let denom = rat(1) / rat((l2 + 1) as i64);
    let up = coef_mat([
        (hf(l2 - n2 + 2), (*t_sym(l2 + 1, n2 - 1, m2 - 1)).clone()),
        (hf(l2 - n2 + 2), (*t_sym(l2 + 1, n2 - 1, m2 + 1)).clone()),
        (hf(l2 + n2 + 2), (*t_sym(l2 + 1, n2 + 1, m2 - 1)).clone()),
        (hf(l2 + n2 + 2), (*t_sym(l2 + 1, n2 + 1, m2 + 1)).clone()),
    ]);
    let down = coef_mat([
        (hf(l2 + m2), (*t_sym(l2 - 1, n2 - 1, m2 - 1)).clone()),
        (-hf(l2 - m2), (*t_sym(l2 - 1, n2 - 1, m2 + 1)).clone()),
        (-hf(l2 + m2), (*t_sym(l2 - 1, n2 + 1, m2 - 1)).clone()),
        (hf(l2 - m2), (*t_sym(l2 - 1, n2 + 1, m2 + 1)).clone()),
    ]);
    let rhs = up.scale_rat(&denom).add(
        &SymFunc::n_pow(1)
            .mul(&down)
            .expect("scalar times matrix")
            .scale_rat(&denom),
    );
    lhs == rhs
}

/// Recurrence: Z (d t^l_{n m}) Z + Z t^l_{n m} equals the pure l+1/2
/// matrix. Exact symbolic equality.
pub fn check_ct_identity(idx: TIndex) -> bool {
    let (l2, m2, n2) = (idx.two_l, idx.two_m, idx.two_n);
    let t = t_sym(l2, n2, m2);
    let dt = d_matrix(&t).expect("derivative matrix");
    let z = SymFunc::z_matrix();
    let zdz = z.mul(&dt).and_then(|zd| zd.mul(&z)).expect("shapes compose");
    let lhs = zdz.add(&z.mul(&t).expect("matrix times scalar"));
    let rhs = coef_mat([
        (hf(l2 - n2 + 2), (*t_sym(l2 + 1, n2 - 1, m2 - 1)).clone()),
        (hf(l2 - n2 + 2), (*t_sym(l2 + 1, n2 - 1, m2 + 1)).clone()),
        (hf(l2 + n2 + 2), (*t_sym(l2 + 1, n2 + 1, m2 - 1)).clone()),
        (hf(l2 + n2 + 2), (*t_sym(l2 + 1, n2 + 1, m2 + 1)).clone()),
    ]);
    lhs == rhs
}

/// Derivative identity in the inverted argument:
/// d (N^{-1} t^l_{n m}(Z^{-1})) equals -(1/N) times the printed l+1/2
/// matrix in Z^{-1}.
pub fn check_dt_inverse_identity(idx: TIndex) -> bool {
    let (l2, m2, n2) = (idx.two_l, idx.two_m, idx.two_n);
    let f = SymFunc::n_pow(-1)
        .mul(&t_sym_inv(l2, n2, m2))
        .expect("scalar product");
    let lhs = d_matrix(&f).expect("derivative matrix");
    let inner = coef_mat([
        (hf(l2 - n2 + 2), t_sym_inv(l2 + 1, n2 - 1, m2 - 1)),
        (hf(l2 - n2 + 2), t_sym_inv(l2 + 1, n2 - 1, m2 + 1)),
        (hf(l2 + n2 + 2), t_sym_inv(l2 + 1, n2 + 1, m2 - 1)),
        (hf(l2 + n2 + 2), t_sym_inv(l2 + 1, n2 + 1, m2 + 1)),
    ]);
    let rhs = SymFunc::n_pow(-1)
        .neg()
        .mul(&inner)
        .expect("scalar times matrix");
    lhs == rhs
}

/// Recurrence in the inverted argument:
/// Z (d (N^{-1} t^l_{n m}(Z^{-1}))) Z + (Z/N) t^l_{n m}(Z^{-1}) equals
/// -(1/N) times the printed l-1/2 matrix in Z^{-1}.
pub fn check_ct_inverse_identity(idx: TIndex) -> bool {
    let (l2, m2, n2) = (idx.two_l, idx.two_m, idx.two_n);
    let f = SymFunc::n_pow(-1)
        .mul(&t_sym_inv(l2, n2, m2))
        .expect("scalar product");
    let df = d_matrix(&f).expect("derivative matrix");
    let z = SymFunc::z_matrix();
    let zdz = z.mul(&df).and_then(|zd| zd.mul(&z)).expect("shapes compose");
    let zn = z.mul(&SymFunc::n_pow(-1)).expect("matrix times scalar");
    let lhs = zdz.add(
        &zn.mul(&t_sym_inv(l2, n2, m2))
            .expect("matrix times scalar"),
    );
    let inner = coef_mat([
        (hf(l2 - m2), t_sym_inv(l2 - 1, n2 + 1, m2 + 1)),
        (hf(l2 - m2), t_sym_inv(l2 - 1, n2 - 1, m2 + 1)),
        (hf(l2 + m2), t_sym_inv(l2 - 1, n2 + 1, m2 - 1)),
        (hf(l2 + m2), t_sym_inv(l2 - 1, n2 - 1, m2 - 1)),
    ]);
    let rhs = SymFunc::n_pow(-1)
        .neg()
        .mul(&inner)
        .expect("scalar times matrix");
    lhs == rhs
}

/// Expansion of a scalar function in the N^k t^l monomial basis: returns
/// coefficients keyed by (k, l, n, m) with reassembly verified exactly.
pub fn to_nk_tl_basis(f: &SymFunc) -> Result<BTreeMap<(i32, TIndex), CRational>> {
    let mut out = BTreeMap::new();
    for (k, harmonic_mixed) in n_harmonic_decomposition(f)? {
        // Pieces at the same power of N may mix homogeneity degrees.
        for (two_l, harmonic) in harmonic_mixed.grade() {
            let comps = &harmonic.comps()[0];
            if comps.is_empty() {
                continue;
            }
            // Group by torus weight; t^l coefficients at fixed l have
            // disjoint monomial support across weights, so one
            // well-chosen monomial determines each coefficient.
            let mut weights: BTreeMap<(i32, i32), ()> = BTreeMap::new();
            for mono in comps.keys() {
                let (a, b, c, d) = (
                    mono.e[0] as i32,
                    mono.e[1] as i32,
                    mono.e[2] as i32,
                    mono.e[3] as i32,
                );
                weights.insert((c + d - a - b, b + d - a - c), ());
            }
            let mut reconstructed = SymFunc::zero(Shape::Scalar);
            for (two_n, two_m) in weights.keys().copied() {
                let idx = TIndex::new(two_l, two_m, two_n);
                if !idx.in_range() {
                    return Err(Error::NotInSpan(format!(
                        "weight (2n, 2m) = ({two_n}, {two_m}) outside the range for 2l = {two_l}"
                    )));
                }
                let lm = (two_l - two_m) / 2;
                let lpm = (two_l + two_m) / 2;
                let ln = (two_l - two_n) / 2;
                let j0 = 0.max(-(two_n + two_m) / 2);
                let k0 = ln - j0;
                let probe = Mono {
                    e: [j0 as u16, k0 as u16, (lm - j0) as u16, (lpm - k0) as u16],
                    npow: 0,
                };
                let raw = comps.get(&probe).cloned().unwrap_or_default();
                let denom =
                    binom_big(lm as i64, j0 as i64) * binom_big(lpm as i64, k0 as i64);
                let coef = raw.scale(&denom.recip());
                if coef.is_zero() {
                    continue;
                }
                reconstructed =
                    reconstructed.add(&(*t_sym(two_l, two_n, two_m)).clone().scale(&coef));
                out.insert((k, idx), coef);
            }
            if reconstructed != harmonic {
                return Err(Error::NotInSpan(format!(
                    "residual after weight extraction at degree {two_l}: {:?}",
                    harmonic.sub(&reconstructed)
                )));
            }
        }
    }
    Ok(out)
}

/// Reassemble a scalar function from N^k t^l coefficients.
pub fn from_nk_tl_basis(coeffs: &BTreeMap<(i32, TIndex), CRational>) -> SymFunc {
    let mut acc = SymFunc::zero(Shape::Scalar);
    for ((k, idx), c) in coeffs {
        let term = SymFunc::n_pow(*k as i16)
            .mul(&t_sym(idx.two_l, idx.two_n, idx.two_m))
            .expect("scalar product")
            .scale(c);
        acc = acc.add(&term);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::half;

    #[test]
    fn low_coefficients() {
        assert_eq!(*t_sym(0, 0, 0), SymFunc::one());
        assert_eq!(*t_sym(1, 1, 1), SymFunc::var(3)); // t^{1/2}_{1/2 1/2} = z22
        assert_eq!(*t_sym(1, -1, -1), SymFunc::var(0)); // z11
        assert_eq!(*t_sym(1, -1, 1), SymFunc::var(1)); // z12
        assert_eq!(*t_sym(1, 1, -1), SymFunc::var(2)); // z21
        // t^1_{0 0} = z11 z22 + z12 z21.
        let expect = SymFunc::var(0)
            .mul(&SymFunc::var(3))
            .unwrap()
            .add(&SymFunc::var(1).mul(&SymFunc::var(2)).unwrap());
        assert_eq!(*t_sym(2, 0, 0), expect);
        // Out-of-range indices give zero.
        assert!(t_sym(2, 4, 0).is_zero());
        assert!(t_sym(1, 0, 1).is_zero());
    }

    #[test]
    fn homogeneity_and_harmonicity() {
        for two_l in 0..=5 {
            let mut two_n = -two_l;
            while two_n <= two_l {
                let mut two_m = -two_l;
                while two_m <= two_l {
                    let t = t_sym(two_l, two_n, two_m);
                    if !t.is_zero() {
                        assert_eq!(t.deg_op(), t.scale(&CRational::from_int(two_l as i64)));
                        assert!(t.box_op().is_zero());
                    }
                    two_m += 2;
                }
                two_n += 2;
            }
        }
    }

    #[test]
    fn derivative_identity_low() {
        assert!(check_dt_identity(TIndex::new(1, -1, -1)));
        // Vacuous case: constants.
        assert!(check_dt_identity(TIndex::new(0, 0, 0)));
    }

    #[test]
    fn identity_sweep_2l_le_4() {
        for two_l in 0..=4 {
            let mut two_n = -two_l;
            while two_n <= two_l {
                let mut two_m = -two_l;
                while two_m <= two_l {
                    let idx = TIndex::new(two_l, two_m, two_n);
                    assert!(check_dt_identity(idx), "dt fails at {idx:?}");
                    assert!(check_zt_identity(idx), "Zt fails at {idx:?}");
                    assert!(check_ct_identity(idx), "Ct fails at {idx:?}");
                    assert!(check_dt_inverse_identity(idx), "dt-inv fails at {idx:?}");
                    assert!(check_ct_inverse_identity(idx), "Ct-inv fails at {idx:?}");
                    two_m += 2;
                }
                two_n += 2;
            }
        }
    }

    #[test]
    fn numeric_matches_symbolic() {
        let z = NumBiquat::new(
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.4),
            Complex64::new(0.7, -0.3),
            Complex64::new(0.1, 0.9),
        );
        for (l2, n2, m2) in [(2, 0, 2), (3, -1, 1), (4, 2, -2)] {
            let sym = t_sym(l2, n2, m2).eval(&z).unwrap().as_scalar();
            let num = t_eval(l2, n2, m2, &z);
            assert!((sym - num).norm() < 1e-12);
        }
    }

    #[test]
    fn character_identity() {
        let z = NumBiquat::new(
            Complex64::new(0.4, 0.2),
            Complex64::new(0.1, -0.3),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.8, -0.1),
        );
        for two_l in 0..=6 {
            let lhs = character(two_l, &z);
            let rhs = character_closed(two_l, &z);
            assert!(
                (lhs - rhs).norm() < 1e-12,
                "character mismatch at 2l = {two_l}"
            );
        }
    }

    #[test]
    fn schur_orthogonality_exact() {
        // (1/2pi^2) integral over S^3 of t^l_{n m} conj(t^{l'}_{n' m'})
        // equals the factorial ratio over 2l+1 times deltas; the conjugate
        // on real points is (l-m)!(l+m)!/((l-n)!(l+n)!) t^l_{m n}(Z+).
        let ratio = |l2: i32, m2: i32, n2: i32| {
            let num = crate::rational::factorial(((l2 - m2) / 2) as i64)
                * crate::rational::factorial(((l2 + m2) / 2) as i64);
            let den = crate::rational::factorial(((l2 - n2) / 2) as i64)
                * crate::rational::factorial(((l2 + n2) / 2) as i64);
            BigRational::new(num, den)
        };
        for (l2, n2, m2, l2b, n2b, m2b) in [
            (1, 1, 1, 1, 1, 1),
            (2, 0, 2, 2, 0, 2),
            (2, 0, 2, 2, 2, 0),
            (3, 1, -1, 3, 1, -1),
            (2, 0, 0, 1, 1, 1),
        ] {
            let conj_factor = ratio(l2b, m2b, n2b);
            let product = t_sym(l2, n2, m2)
                .mul(&t_sym(l2b, m2b, n2b).subst_adjugate())
                .unwrap()
                .scale_rat(&conj_factor);
            let avg = product.s3_haar_average(&rat(1)).unwrap();
            let expect = if l2 == l2b && n2 == n2b && m2 == m2b {
                CRational::from_real(ratio(l2, m2, n2) / rat((l2 + 1) as i64))
            } else {
                CRational::zero()
            };
            assert_eq!(avg, expect, "schur at {l2} {n2} {m2} vs {l2b} {n2b} {m2b}");
        }
    }

    #[test]
    fn basis_conversion_roundtrip() {
        let f = SymFunc::n_pow(-2)
            .mul(&t_sym(2, 0, 2))
            .unwrap()
            .add(&t_sym(1, 1, -1).scale(&CRational::from_int(3)))
            .add(&SymFunc::n_pow(1).mul(&t_sym(1, -1, -1)).unwrap());
        let coeffs = to_nk_tl_basis(&f).unwrap();
        assert_eq!(coeffs.len(), 3);
        assert_eq!(from_nk_tl_basis(&coeffs), f);
        // Laplacian eigen-relation: box(N^k h) = 4k(d + k + 1) N^{k-1} h.
        let h = t_sym(2, 0, 2);
        for k in 1..4i64 {
            let f = SymFunc::n_pow(k as i16).mul(&h).unwrap();
            let expect = SymFunc::n_pow(k as i16 - 1)
                .mul(&h)
                .unwrap()
                .scale(&CRational::from_int(4 * k * (2 + k + 1)));
            assert_eq!(f.box_op(), expect);
        }
    }

    #[test]
    fn half_sanity() {
        assert_eq!(hf(3), half(3));
    }
}
