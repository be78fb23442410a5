//! The ten acceptance criteria at their stated sizes and tolerances.
//!
//! Every criterion runs and prints one PASS/FAIL line before anything is
//! asserted, so a single failure does not hide the others.

use std::time::{Duration, Instant};

use extrapolab::criteria;
use extrapolab::error::LabResult;
use extrapolab::report::{all_pass, Assertion};

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn run(name: &'static str, limit: Option<Duration>, f: impl FnOnce() -> LabResult<Vec<Assertion>>) -> Outcome {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match result {
        Ok(a) => {
            let failing: Vec<&Assertion> = a.iter().filter(|x| !x.pass).collect();
            let shown = if failing.is_empty() { a.iter().collect::<Vec<_>>() } else { failing };
            let parts: Vec<String> = shown
                .iter()
                .map(|x| if x.bound.is_nan() { format!("{}={:.4e}", x.id, x.measured) } else {
                    format!("{}={:.4e} (bound {:.4e})", x.id, x.measured, x.bound)
                })
                .collect();
            (all_pass(&a), parts.join("; "))
        }
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            pass = false;
            detail.push_str(&format!("; runtime {elapsed:.1?} over {limit:?}"));
        }
    }
    let line = format!("{name}: {} [{elapsed:.2?}] {detail}", if pass { "PASS" } else { "FAIL" });
    println!("{line}");
    Outcome { name, pass, detail: line }
}

#[test]
fn acceptance_criteria() {
    let secs = |s| Some(Duration::from_secs(s));
    let outcomes = [
        run("criterion 1", secs(60), || criteria::sharpness_sweep(14)),
        run("criterion 2", secs(30), || criteria::weak_type_equality(50, 10, 2)),
        run("criterion 3", secs(1), || criteria::gamma_product(1000, 3)),
        run("criterion 4", None, criteria::exponent_grid),
        run("criterion 5", secs(30), || criteria::sparse_construction(100, 10, 5)),
        run("criterion 6", None, || criteria::sparse_forms(100, 10, 6)),
        run("criterion 7", None, || criteria::rdf_properties(100, 8, 7)),
        run("criterion 8", None, || criteria::weight_construction(100, 8, 12, 8)),
        run("criterion 9", None, || criteria::structural_identities(200, 8, 9)),
        run("criterion 10", None, || criteria::pipeline(10, 8, 32, 7)),
    ];
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.detail.as_str()).collect();
    assert!(failed.is_empty(), "failing criteria:\n{}", failed.join("\n"));
    assert_eq!(outcomes.iter().map(|o| o.name).count(), 10);
}
