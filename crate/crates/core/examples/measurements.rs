//! Measuring one particle and inspecting what is left.

use entangle::measure::{ghz_demo, measure, outcome_dependent_entanglement_demo, SpinAxis};
use entangle::{catalog, Result, Tolerances};

fn main() -> Result<()> {
    let tol = Tolerances::default();
    for axis in [SpinAxis::Z, SpinAxis::X] {
        for r in ghz_demo(axis, &tol)? {
            println!("GHZ, third spin along {axis}: outcome {} p={:.3} remainder schmidt rank {}", r.label, r.probability, r.schmidt_rank);
        }
    }
    for r in outcome_dependent_entanglement_demo(&tol)? {
        let kind = r.class.map(|c| c.kind.to_string()).unwrap_or_default();
        println!("outcome {}: p={:.4} remainder {kind}", r.label, r.probability);
    }
    for o in measure(&catalog::singlet(), 0, &SpinAxis::Z.operator(), &tol)? {
        println!("singlet, first spin: {} with p={:.3}", o.label, o.probability);
    }
    Ok(())
}
