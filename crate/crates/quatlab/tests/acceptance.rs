//! Acceptance suite: runs every exit criterion at its stated tolerance and
//! prints one pass/fail line per criterion. `cargo test --test acceptance
//! -- --nocapture` shows the lines.

use quatlab::report::{Report, Status, SuiteConfig};
use quatlab::suites::run_suite;
use std::time::Instant;

struct Criterion {
    number: usize,
    description: &'static str,
    passed: bool,
    detail: String,
}

fn entry_status(report: &Report, id: &str) -> (bool, String) {
    match report.entries.iter().find(|e| e.id == id) {
        Some(e) => (
            e.status == Status::Pass,
            format!("{} [{}] {}", e.id, e.status, e.measured),
        ),
        None => (false, format!("{id} missing from report")),
    }
}

fn all_pass(report: &Report, ids: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut details = Vec::new();
    for id in ids {
        let (p, d) = entry_status(report, id);
        ok &= p;
        details.push(d);
    }
    (ok, details.join("; "))
}

#[test]
fn acceptance_criteria() {
    let mut criteria: Vec<Criterion> = Vec::new();

    // Criterion 1: exact annihilation sweep over every basis family with
    // 2l <= 5, within 60 seconds.
    let cfg = SuiteConfig {
        suite: "qlar-identities".into(),
        max_two_l: 5,
        ..Default::default()
    };
    let started = Instant::now();
    let qlar = run_suite(&cfg).expect("qlar suite runs");
    let elapsed = started.elapsed();
    let (ok, detail) = entry_status(&qlar, "qlar.annihilation");
    let in_time = elapsed.as_secs() < 60;
    criteria.push(Criterion {
        number: 1,
        description: "exact nabla-box / box-nabla annihilation sweep, 2l <= 5, under 60 s",
        passed: ok && in_time,
        detail: format!("{detail}; elapsed {:.1?}", elapsed),
    });

    // Criterion 2: dimension formulas dim U(d) = 3d^2+3d+2 and
    // dim BH(d) = 2d^2+2 for |d| <= 5.
    let (ok, detail) = all_pass(&qlar, &["qlar.dimension-u", "qlar.dimension-bh"]);
    criteria.push(Criterion {
        number: 2,
        description: "dimension formulas for the assembled spaces, |d| <= 5 (exact)",
        passed: ok,
        detail,
    });

    // Criterion 3: every tabulated action row reproduced exactly for
    // 2l <= 4.
    let cfg = SuiteConfig {
        suite: "action-tables".into(),
        max_two_l: 4,
        ..Default::default()
    };
    let tables = run_suite(&cfg).expect("tables suite runs");
    let (ok, detail) = all_pass(&tables, &["tables.bc-rows", "tables.ef-patterns", "tables.u22-combos"]);
    criteria.push(Criterion {
        number: 3,
        description: "action-table fidelity: zero coefficient mismatches, 2l <= 4 (exact)",
        passed: ok,
        detail,
    });

    // Criteria 4 and 5: pairing orthogonality against quadrature with
    // R-independence at 1e-9, and exact invariance with inversion signs.
    let cfg = SuiteConfig {
        suite: "pairings".into(),
        max_two_l: 3,
        tolerance: 1e-9,
        ..Default::default()
    };
    let pairings = run_suite(&cfg).expect("pairings suite runs");
    let (ok, detail) = all_pass(
        &pairings,
        &["pairing.orthogonality-dual-route", "pairing.r-independence"],
    );
    criteria.push(Criterion {
        number: 4,
        description: "pairing constants match quadrature to 1e-9; radius independence to 1e-9",
        passed: ok,
        detail,
    });
    let (ok, detail) = all_pass(
        &pairings,
        &["pairing.invariance", "pairing.inversion-sign"],
    );
    criteria.push(Criterion {
        number: 5,
        description: "exact invariance under the generators; inversion signs -1 and +1",
        passed: ok,
        detail,
    });

    // Criterion 6: kernel expansions at 2L = 40 match closed forms to
    // 1e-8; gradient relation to 1e-6.
    let cfg = SuiteConfig {
        suite: "kernels".into(),
        ..Default::default()
    };
    let kernels = run_suite(&cfg).expect("kernels suite runs");
    let (ok, detail) = all_pass(
        &kernels,
        &[
            "kernel.series-qr1",
            "kernel.series-qr2",
            "kernel.series-bhlog1",
            "kernel.series-bhlog2",
            "kernel.gradient-relation",
        ],
    );
    criteria.push(Criterion {
        number: 6,
        description: "kernel expansions match closed forms (1e-8, 2L = 40); gradient relation (1e-6)",
        passed: ok,
        detail,
    });

    // Criterion 7: reproducing formulas inside/outside at 1e-6 within
    // five minutes, nodes >= 24 per angle.
    let cfg = SuiteConfig {
        suite: "reproducing".into(),
        quad_nodes: 24,
        ..Default::default()
    };
    let started = Instant::now();
    let repro = run_suite(&cfg).expect("reproducing suite runs");
    let elapsed = started.elapsed();
    let (ok, detail) = all_pass(
        &repro,
        &["repro.qlar-inside", "repro.qlar-outside", "repro.biharmonic"],
    );
    let in_time = elapsed.as_secs() < 300;
    criteria.push(Criterion {
        number: 7,
        description: "boundary reproducing formulas to 1e-6 inside, 0 outside, under 5 minutes",
        passed: ok && in_time,
        detail: format!("{detail}; elapsed {:.1?}", elapsed),
    });

    // Criterion 8: intertwiner generator values, the projection-operator
    // sum, and the contour presentation.
    let cfg = SuiteConfig {
        suite: "intertwiners".into(),
        ..Default::default()
    };
    let inter = run_suite(&cfg).expect("intertwiners suite runs");
    let (ok, detail) = all_pass(
        &inter,
        &[
            "intertwine.calibration",
            "intertwine.j-series-mixed",
            "intertwine.mx-sum-zero",
            "intertwine.mx-integral",
        ],
    );
    criteria.push(Criterion {
        number: 8,
        description: "intertwiner generator values (1e-6); projection sum exactly zero; contour presentation (1e-6)",
        passed: ok,
        detail,
    });

    // Criterion 9: Clifford/Fock relations, kernel defects and the
    // two-route correlation agreement.
    let cfg = SuiteConfig {
        suite: "clifford".into(),
        ..Default::default()
    };
    let clifford = run_suite(&cfg).expect("clifford suite runs");
    let (ok, detail) = all_pass(
        &clifford,
        &[
            "clifford.anticommutators",
            "clifford.defect-2d",
            "clifford.defect-4d-qr",
            "clifford.defect-4d-regular",
            "clifford.correlation",
        ],
    );
    criteria.push(Criterion {
        number: 9,
        description: "Clifford relations exact; defects match kernels (1e-6/1e-9); correlation routes agree",
        passed: ok,
        detail,
    });

    // Criterion 10: byte-identical reports for identical configuration.
    let cfg = SuiteConfig {
        suite: "clifford".into(),
        max_two_l: 2,
        ..Default::default()
    };
    let a = run_suite(&cfg).expect("first deterministic run").to_json();
    let b = run_suite(&cfg).expect("second deterministic run").to_json();
    criteria.push(Criterion {
        number: 10,
        description: "repeated runs with identical config produce byte-identical JSON reports",
        passed: a == b,
        detail: format!("{} bytes, identical: {}", a.len(), a == b),
    });

    let mut all_ok = true;
    println!();
    for c in &criteria {
        println!(
            "criterion {:>2}: {} - {}",
            c.number,
            if c.passed { "PASS" } else { "FAIL" },
            c.description
        );
        if !c.passed {
            println!("              detail: {}", c.detail);
            all_ok = false;
        }
    }
    assert!(all_ok, "acceptance criteria failed");
}
