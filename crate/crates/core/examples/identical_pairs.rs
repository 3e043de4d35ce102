//! Two identical particles: Slater and symmetrized-product decisions.

use entangle::catalog;
use entangle::identical2::{boson_uniqueness_check, decide_pair, has_complete_property};
use entangle::linalg::{basis_vec, c, projector};
use entangle::permsym::{slater_state, symmetrized_product};
use entangle::{Result, Tolerances};

fn main() -> Result<()> {
    let tol = Tolerances::default();
    let e = |i| basis_vec(4, i);

    let pair = catalog::fermion_pair(4);
    let d = decide_pair(&pair, &tol)?;
    println!("fermion pair: non-entangled {} shape {} spectrum {:?}", d.non_entangled, d.shape, d.spectrum);
    let w = has_complete_property(&pair, &projector(&e(0)), &tol)?;
    println!("  a particle is certainly in e0: {}", w.holds(&tol));

    let generic = {
        let a = slater_state(&[e(0), e(1)], &tol)?;
        let b = slater_state(&[e(2), e(3)], &tol)?;
        let t = a.tensor().add(&b.tensor().scaled(c(0.5, 0.0)))?;
        entangle::PureState::normalized(t, entangle::Sector::Fermionic, &tol)?
    };
    let d = decide_pair(&generic, &tol)?;
    println!("sum of two Slater states: non-entangled {} spectrum {:?}", d.non_entangled, d.spectrum);

    let orth = symmetrized_product(&[e(0), e(1)], &tol)?;
    let d = decide_pair(&orth, &tol)?;
    println!("bosons in orthogonal states: {} (unique pair {})", d.shape, boson_uniqueness_check(&orth, &tol)?);

    let tilted = e(0) * c(0.6, 0.0) + e(1) * c(0.8, 0.0);
    let oblique = symmetrized_product(&[e(0), tilted], &tol)?;
    let d = decide_pair(&oblique, &tol)?;
    println!("bosons in overlapping states: {} non-entangled {}", d.shape, d.non_entangled);
    Ok(())
}
