//! How the group property degrades as two groups start to overlap.

use entangle::fermions_n::approx_orthogonality_report;
use entangle::{Result, Tolerances};

fn main() -> Result<()> {
    let rows = approx_orthogonality_report(&[0.3, 0.1, 0.03, 0.01, 0.001, 0.0], &Tolerances::default())?;
    println!("{:>8} {:>12} {:>12} {:>12}", "eps", "residual", "deficit", "entangled");
    for r in rows {
        println!("{:>8} {:>12.3e} {:>12.3e} {:>12.4}", r.eps, r.residual, r.deficit, r.entangled_deficit);
    }
    Ok(())
}
