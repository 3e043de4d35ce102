//! Schmidt decomposition, entanglement classes and outcome dependence for
//! two distinguishable particles.

use entangle::catalog;
use entangle::distinguishable::{classify_both, correlation_test, is_non_entangled, property_manifold, schmidt_decompose};
use entangle::linalg::{basis_vec, projector};
use entangle::{tensor_product, Cut, PureState, Tolerances};

fn main() -> entangle::Result<()> {
    let tol = Tolerances::default();
    let cut = Cut::first(1, 2)?;

    let singlet = catalog::singlet();
    let sd = schmidt_decompose(&singlet, &cut, &tol)?;
    println!("singlet: schmidt rank {} coefficients {:?}", sd.rank, sd.coeffs);
    let (side1, side2) = classify_both(&singlet, &cut, &tol)?;
    println!("  side 1 {} (maximal {}), side 2 {}", side1.kind, side1.maximal, side2.kind);

    let up = projector(&basis_vec(2, 0));
    let down = projector(&basis_vec(2, 1));
    let corr = correlation_test(&singlet, &cut, &up, &down, &tol)?;
    println!("  Pr(up, down) = {:.3} vs product of marginals {:.3}", corr.joint, corr.product);

    // spin singlet, particle 1 in cell R and particle 2 in cell L
    let cells = 4;
    let rl = catalog::spin_singlet_right_left(cells);
    let (c1, _) = classify_both(&rl, &cut, &tol)?;
    let manifold = property_manifold(&rl, &cut, &tol)?;
    println!("spin singlet in separate cells: {} with range dim {}", c1.kind, c1.range_dim);
    println!("  range projector has rank {}", manifold.basis.len());

    let a = PureState::from_vector(&basis_vec(3, 1))?;
    let b = PureState::from_vector(&(basis_vec(2, 0) + basis_vec(2, 1)))?;
    let product = tensor_product(&a, &b)?;
    let rep = is_non_entangled(&product, &cut, &tol)?;
    println!("product state: non-entangled {} residuals {:?}", rep.verdict, rep.residuals());
    Ok(())
}
