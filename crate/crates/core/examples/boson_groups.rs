//! Boson groups: assembly, identical halves and the two-bin measurement.

use entangle::bosons_n::{assemble_boson_split, bin_measurement_demo, boson_split_report, identical_halves};
use entangle::linalg::{basis_vec, c};
use entangle::permsym::symmetrized_product;
use entangle::{Result, Tolerances};

fn main() -> Result<()> {
    let tol = Tolerances::default();
    let e = |i| basis_vec(3, i);

    let gamma = symmetrized_product(&[e(0), e(1)], &tol)?;
    let lambda = symmetrized_product(&[e(2)], &tol)?;
    let asm = assemble_boson_split(&gamma, &lambda, &tol)?;
    println!("assembled {} bosons, factors {}", asm.state.n_slots(), asm.relation);
    let rep = boson_split_report(&asm.state, &gamma, &tol)?;
    println!("  group check: {} value {:.6}", rep.kind, rep.value);

    let tilted = symmetrized_product(&[e(0) * c(0.8, 0.0) + e(2) * c(0.6, 0.0)], &tol)?;
    let oblique = assemble_boson_split(&gamma, &tilted, &tol)?;
    if let Some(w) = oblique.warning {
        println!("overlapping factors: contraction residual {:.3}", w.contraction_residual);
    }

    let pair = symmetrized_product(&[e(0), e(1)], &tol)?;
    let doubled = assemble_boson_split(&pair, &pair, &tol)?.state;
    let halves = identical_halves(&doubled, &tol)?;
    println!("two copies of one pair state: identical halves {} fidelity {:.6}", halves.flag, halves.fidelity);

    let bins = bin_measurement_demo(10, &[0, 1], &[2, 3, 4], &tol)?;
    let (num, den) = bins.conditional_ratio;
    println!("bins: conditional {num}/{den} = {:.4}, unconditional {:.4}", bins.conditional, bins.unconditional);
    Ok(())
}
