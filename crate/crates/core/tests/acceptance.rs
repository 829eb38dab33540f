//! End-to-end regression gate: every numbered criterion below must pass,
//! and the timed ones must stay inside their budgets. One summary line is
//! printed per criterion (visible with `cargo test -- --nocapture`).

use std::time::{Duration, Instant};

use qcb_core::report::{
    criterion_diamond, criterion_form, criterion_multiplicity, criterion_psi,
    criterion_relations, criterion_rmatrix, criterion_span, criterion_theta, criterion_ybe,
    selftest, Criterion,
};

fn run(
    f: fn() -> qcb_core::Result<Criterion>,
    budget: Option<Duration>,
    failures: &mut Vec<String>,
) {
    let started = Instant::now();
    match f() {
        Ok(c) => {
            let elapsed = started.elapsed();
            let in_budget = budget.map_or(true, |b| elapsed <= b);
            println!(
                "criterion {} ({}): {} [{elapsed:.2?}]",
                c.id,
                c.name,
                if c.pass && in_budget { "PASS" } else { "FAIL" }
            );
            if !c.pass {
                failures.push(format!("criterion {} ({}) failed: {}", c.id, c.name, c.details));
            }
            if !in_budget {
                failures.push(format!(
                    "criterion {} ({}) exceeded its {:?} budget: {elapsed:?}",
                    c.id,
                    c.name,
                    budget.unwrap()
                ));
            }
        }
        Err(e) => {
            println!("criterion ?: FAIL (error: {e})");
            failures.push(format!("criterion errored: {e}"));
        }
    }
}

#[test]
fn acceptance() {
    let mut failures = Vec::new();
    run(criterion_relations, Some(Duration::from_secs(60)), &mut failures);
    run(criterion_multiplicity, None, &mut failures);
    run(criterion_theta, Some(Duration::from_secs(120)), &mut failures);
    run(criterion_psi, None, &mut failures);
    run(criterion_diamond, None, &mut failures);
    run(criterion_form, None, &mut failures);
    run(criterion_span, None, &mut failures);
    run(criterion_rmatrix, None, &mut failures);
    run(criterion_ybe, Some(Duration::from_secs(300)), &mut failures);

    // Criterion 10: two full runs must serialize to identical bytes.
    let first = selftest().expect("selftest run 1");
    let second = selftest().expect("selftest run 2");
    let identical = first.to_canonical_json() == second.to_canonical_json();
    println!(
        "criterion 10 (determinism): {}",
        if identical { "PASS" } else { "FAIL" }
    );
    if !identical {
        failures.push("criterion 10: consecutive selftest reports differ".into());
    }

    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
