//! Closed-form reproducing kernels and their truncated basis expansions,
//! with convergence reporting in the stated domains.
//!
//! The logarithmic kernels use the principal branch with the cut along the
//! negative real axis. The stored expansion of the logarithmic kernels
//! carries the overall sign that matches the closed form
//! log N(1 - Z W^{-1}).

use crate::bases::{eval_family, Family};
use crate::biquat::{in_domain, Domain};
use crate::pairing::{reg_v_eval, reg_wt_eval, regular_dual_system};
use crate::{Error, NumBiquat, Result};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum KernelId {
    /// (Z - W)/N(Z - W) expanded in the positive families of Z.
    QrKernel1,
    /// (Z - W)/N(Z - W) expanded in the negative families of Z.
    QrKernel2,
    /// log N(1 - Z W^{-1}).
    BhKernelLog1,
    /// log N(1 - Z^{-1} W).
    BhKernelLog2,
    /// (Z - W)^{-1}/N(Z - W).
    CauchyFueter,
}

impl KernelId {
    /// Domain predicate for convergence of the truncated series.
    pub fn in_series_domain(&self, z: &NumBiquat, w: &NumBiquat) -> bool {
        let tol = 1e-10;
        match self {
            KernelId::QrKernel1 | KernelId::BhKernelLog1 => w
                .inverse()
                .map(|wi| in_domain(&(z * &wi), Domain::DPlus, 1.0, tol))
                .unwrap_or(false),
            KernelId::QrKernel2 | KernelId::BhKernelLog2 | KernelId::CauchyFueter => z
                .inverse()
                .map(|zi| in_domain(&(&zi * w), Domain::DPlus, 1.0, tol))
                .unwrap_or(false),
        }
    }
}

/// Either a matrix or a scalar kernel value.
#[derive(Clone, Copy, Debug)]
pub enum KernelValue {
    Scalar(Complex64),
    Mat(NumBiquat),
}

impl KernelValue {
    pub fn as_scalar(&self) -> Complex64 {
        match self {
            KernelValue::Scalar(c) => *c,
            KernelValue::Mat(_) => panic!("expected scalar kernel"),
        }
    }

    pub fn as_mat(&self) -> NumBiquat {
        match self {
            KernelValue::Mat(m) => *m,
            KernelValue::Scalar(_) => panic!("expected matrix kernel"),
        }
    }

    pub fn abs(&self) -> f64 {
        match self {
            KernelValue::Scalar(c) => c.norm(),
            KernelValue::Mat(m) => m.abs(),
        }
    }

    pub fn sub(&self, other: &KernelValue) -> KernelValue {
        match (self, other) {
            (KernelValue::Scalar(a), KernelValue::Scalar(b)) => KernelValue::Scalar(a - b),
            (KernelValue::Mat(a), KernelValue::Mat(b)) => KernelValue::Mat(a - b),
            _ => panic!("kernel value kind mismatch"),
        }
    }
}

fn principal_log_det(m: &NumBiquat) -> Result<Complex64> {
    let [l1, l2] = m.eigenvalues();
    for lam in [l1, l2] {
        if lam.im.abs() < 1e-12 && lam.re <= 0.0 {
            return Err(Error::BranchCut);
        }
    }
    let n = m.norm();
    if n.im.abs() < 1e-12 && n.re <= 0.0 {
        return Err(Error::BranchCut);
    }
    Ok(n.ln())
}

/// Closed form of a kernel at a point pair.
pub fn kernel_closed(id: KernelId, z: &NumBiquat, w: &NumBiquat) -> Result<KernelValue> {
    let d = z - w;
    let n = d.norm();
    match id {
        KernelId::QrKernel1 | KernelId::QrKernel2 => {
            if n.norm() < 1e-14 {
                return Err(Error::SingularPoint("N(Z - W) = 0".into()));
            }
            Ok(KernelValue::Mat(d.scale(1.0 / n)))
        }
        KernelId::CauchyFueter => {
            if n.norm() < 1e-14 {
                return Err(Error::SingularPoint("N(Z - W) = 0".into()));
            }
            Ok(KernelValue::Mat(d.inverse()?.scale(1.0 / n)))
        }
        KernelId::BhKernelLog1 => {
            let wi = w.inverse()?;
            let arg = &NumBiquat::one() - &(z * &wi);
            Ok(KernelValue::Scalar(principal_log_det(&arg)?))
        }
        KernelId::BhKernelLog2 => {
            let zi = z.inverse()?;
            let arg = &NumBiquat::one() - &(&zi * w);
            Ok(KernelValue::Scalar(principal_log_det(&arg)?))
        }
    }
}

/// Convergence data for a truncated expansion.
#[derive(Clone, Debug, Serialize)]
pub struct TruncationReport {
    pub two_l_max: i32,
    /// Absolute error of the partial sum after each level against the
    /// closed form.
    pub per_level_error: Vec<f64>,
    /// Magnitude of each level's contribution.
    pub per_level_norm: Vec<f64>,
    /// Geometric ratio estimated from the last level contributions.
    pub tail_ratio: f64,
}

fn outer(col: [Complex64; 2], row: [Complex64; 2], c: Complex64) -> NumBiquat {
    NumBiquat::new(
        col[0] * row[0] * c,
        col[0] * row[1] * c,
        col[1] * row[0] * c,
        col[1] * row[1] * c,
    )
}

fn qr_level(id: KernelId, two_l: i32, z: &NumBiquat, w: &NumBiquat) -> Result<NumBiquat> {
    let mut acc = NumBiquat::zero();
    let l2 = two_l;
    let weights: [(Family, Family, f64); 3] = match id {
        KernelId::QrKernel1 => [
            (Family::F1, Family::Gt1, -1.0 / (l2 + 1) as f64),
            (
                Family::F2,
                Family::Gt2,
                if l2 > 0 {
                    1.0 / (l2 as f64 * (l2 + 1) as f64)
                } else {
                    0.0
                },
            ),
            (
                Family::F3,
                Family::Gt3,
                if l2 > 0 { 1.0 / l2 as f64 } else { 0.0 },
            ),
        ],
        KernelId::QrKernel2 => [
            (Family::Ft1, Family::G1, 1.0 / (l2 + 1) as f64),
            (
                Family::Ft2,
                Family::G2,
                if l2 > 0 {
                    -1.0 / (l2 as f64 * (l2 + 1) as f64)
                } else {
                    0.0
                },
            ),
            (
                Family::Ft3,
                Family::G3,
                if l2 > 0 { -1.0 / l2 as f64 } else { 0.0 },
            ),
        ],
        _ => unreachable!(),
    };
    for (ff, gf, weight) in weights {
        if weight == 0.0 {
            continue;
        }
        for idx in ff.enumerate(l2) {
            let col = eval_family(ff, idx, z)?.as_col();
            let row = eval_family(gf, idx, w)?.as_row();
            acc = &acc + &outer(col, row, Complex64::new(weight, 0.0));
        }
    }
    Ok(acc)
}

fn bh_level(id: KernelId, two_l: i32, z: &NumBiquat, w: &NumBiquat) -> Result<Complex64> {
    let l2 = two_l;
    if l2 == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let inv2l = 1.0 / l2 as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    let (fam1, fam2) = match id {
        KernelId::BhKernelLog1 => (
            (Family::Phi1, Family::PhiT1),
            (Family::Phi2, Family::PhiT2),
        ),
        KernelId::BhKernelLog2 => (
            (Family::PhiT1, Family::Phi1),
            (Family::PhiT2, Family::Phi2),
        ),
        _ => unreachable!(),
    };
    for idx in fam1.0.enumerate(l2) {
        let a = eval_family(fam1.0, idx, z)?.as_scalar();
        let b = eval_family(fam1.1, idx, w)?.as_scalar();
        acc -= inv2l * a * b;
    }
    for idx in fam2.0.enumerate(l2) {
        let a = eval_family(fam2.0, idx, z)?.as_scalar();
        let b = eval_family(fam2.1, idx, w)?.as_scalar();
        acc += inv2l * a * b;
    }
    Ok(acc)
}

/// Truncated kernel expansion, summed first over the weight indices and
/// then over l, with a per-level convergence report against the closed
/// form. Outside the stated domain the call fails unless `allow_outside`
/// is set (divergence is then expected and visible in the report).
pub fn kernel_series(
    id: KernelId,
    z: &NumBiquat,
    w: &NumBiquat,
    two_l_max: i32,
    allow_outside: bool,
) -> Result<(KernelValue, TruncationReport)> {
    if !id.in_series_domain(z, w) && !allow_outside {
        return Err(Error::DomainViolation(
            "sample outside the convergence domain of the expansion".into(),
        ));
    }
    let closed = kernel_closed(id, z, w).ok();
    let cf_duals = if id == KernelId::CauchyFueter {
        Some(regular_dual_system(two_l_max)?)
    } else {
        None
    };
    let mut acc: Option<KernelValue> = None;
    let mut per_level_error = Vec::new();
    let mut per_level_norm = Vec::new();
    for l2 in 0..=two_l_max {
        let level = match id {
            KernelId::QrKernel1 | KernelId::QrKernel2 => {
                KernelValue::Mat(qr_level(id, l2, z, w)?)
            }
            KernelId::BhKernelLog1 | KernelId::BhKernelLog2 => {
                KernelValue::Scalar(bh_level(id, l2, z, w)?)
            }
            KernelId::CauchyFueter => {
                let mut m = NumBiquat::zero();
                for ((ll, mm, nn), scale) in cf_duals.as_ref().unwrap() {
                    if *ll != l2 {
                        continue;
                    }
                    let col = reg_v_eval(*ll, *mm, *nn, w);
                    let row = reg_wt_eval(*ll, *mm, *nn, z)?;
                    m = &m + &outer(col, row, scale.to_complex64());
                }
                KernelValue::Mat(m)
            }
        };
        per_level_norm.push(level.abs());
        acc = Some(match acc {
            None => level,
            Some(prev) => match (prev, level) {
                (KernelValue::Mat(a), KernelValue::Mat(b)) => KernelValue::Mat(&a + &b),
                (KernelValue::Scalar(a), KernelValue::Scalar(b)) => {
                    KernelValue::Scalar(a + b)
                }
                _ => unreachable!(),
            },
        });
        if let (Some(acc_v), Some(closed_v)) = (&acc, &closed) {
            per_level_error.push(acc_v.sub(closed_v).abs());
        }
    }
    let tail: Vec<f64> = per_level_norm
        .iter()
        .rev()
        .take(6)
        .copied()
        .filter(|x| *x > 1e-300)
        .collect();
    let tail_ratio = if tail.len() >= 2 {
        let mut rsum = 0.0;
        let mut count = 0;
        for i in 0..tail.len() - 1 {
            rsum += tail[i] / tail[i + 1];
            count += 1;
        }
        rsum / count as f64
    } else {
        0.0
    };
    Ok((
        acc.unwrap(),
        TruncationReport {
            two_l_max,
            per_level_error,
            per_level_norm,
            tail_ratio,
        },
    ))
}

/// Central finite-difference check of the remark relating the logarithmic
/// and first-order kernels:
/// nabla+_Z log N(1 - Z W^{-1}) = 2 (Z-W)/N(Z-W) at (z, w), and
/// nabla+_W log N(1 - Z^{-1} W) = -2 (Z-W)/N(Z-W) at the swapped pair
/// (where that kernel is defined).
pub fn check_gradient_relation(z: &NumBiquat, w: &NumBiquat, tol: f64) -> Result<bool> {
    let h = 1e-5;
    let fd_nabla_plus =
        |f: &dyn Fn(&NumBiquat) -> Result<Complex64>, at: &NumBiquat| -> Result<NumBiquat> {
            let mut partials = [Complex64::new(0.0, 0.0); 4];
            for (k, p) in partials.iter_mut().enumerate() {
                let mut zp = *at;
                let mut zm = *at;
                zp.z[k] += Complex64::new(h, 0.0);
                zm.z[k] -= Complex64::new(h, 0.0);
                *p = (f(&zp)? - f(&zm)?) / (2.0 * h);
            }
            // nabla+ = 2 [[d22, -d21], [-d12, d11]].
            Ok(NumBiquat::new(
                2.0 * partials[3],
                -2.0 * partials[2],
                -2.0 * partials[1],
                2.0 * partials[0],
            ))
        };
    let target = kernel_closed(KernelId::QrKernel1, z, w)?.as_mat();
    let f1 = |zz: &NumBiquat| Ok(kernel_closed(KernelId::BhKernelLog1, zz, w)?.as_scalar());
    let lhs1 = fd_nabla_plus(&f1, z)?;
    if (&lhs1 - &target.scale(2.0)).abs() > tol {
        return Ok(false);
    }
    // W-derivative with the roles of the small/large points swapped.
    let f2 = |ww: &NumBiquat| Ok(kernel_closed(KernelId::BhKernelLog2, w, ww)?.as_scalar());
    let lhs2 = fd_nabla_plus(&f2, z)?;
    let target2 = kernel_closed(KernelId::QrKernel1, w, z)?.as_mat();
    Ok((&lhs2 - &target2.scale(-2.0)).abs() <= tol)
}
