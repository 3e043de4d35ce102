//! Splitting a fermion state into two groups with their own properties.

use entangle::fermions_n::{
    assemble_split, connecting_correlation, delta_partition, local_factorizability, subset_property_check, verify_split,
};
use entangle::linalg::{basis_vec, c, projector, projector_onto};
use entangle::permsym::slater_state;
use entangle::{PureState, Result, Sector, Tolerances};

fn main() -> Result<()> {
    let tol = Tolerances::default();
    let d = 6;
    let e = |i| basis_vec(d, i);

    // two fermions on orbitals 0..3 (entangled among themselves), one on orbital 4
    let a = slater_state(&[e(0), e(1)], &tol)?;
    let b = slater_state(&[e(2), e(3)], &tol)?;
    let group = PureState::normalized(a.tensor().add(b.tensor())?, Sector::Fermionic, &tol)?;
    let single = PureState::from_vector(&e(4))?.with_sector(Sector::Fermionic, &tol)?;

    let part = delta_partition(&group, &tol)?;
    println!("group support {:?}, free orbitals {:?}", part.delta, part.delta_perp);

    let split = assemble_split(&group, &single, &tol)?;
    println!("assembled {} fermions, raw norm² {:.6}", split.assembled.n_slots(), split.raw_norm_sq);
    let chk = subset_property_check(&split.assembled, &group, &tol)?;
    let v = verify_split(&split.assembled, &group, &tol)?;
    println!("subset value {:.6} holds {} recovered fidelity {:?}", chk.value, chk.holds, v.fidelity);

    let cross = slater_state(&[e(0), e(4), e(5)], &tol)?;
    let mixed = split.assembled.tensor().add(&cross.tensor().scaled(c(0.3, 0.0)))?;
    let perturbed = PureState::normalized(mixed, Sector::Fermionic, &tol)?;
    println!("after admixing a crossing Slater state: value {:.4}", subset_property_check(&perturbed, &group, &tol)?.value);

    let region1 = projector_onto(&[e(0), e(1), e(2), e(3)], d);
    let region2 = projector_onto(&[e(4), e(5)], d);
    let p = projector_onto(&[e(0), e(1)], d);
    let q = projector(&e(4));
    let lf = local_factorizability(&split.assembled, 2, &region1, &region2, &p, &q, &tol)?;
    println!("local properties: joint {:.4} = {:.4} x {:.4}", lf.joint, lf.marginal1, lf.marginal2);

    let pair = slater_state(&[e(0), e(1)], &tol)?;
    let cc = connecting_correlation(&pair, &e(0), &e(1), &tol)?;
    println!("observables connecting the two orbitals: joint {:.3} vs product {:.3}", cc.joint, cc.product);
    Ok(())
}
