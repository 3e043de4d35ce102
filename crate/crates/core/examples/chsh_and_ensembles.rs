//! CHSH values of separable mixtures and of the singlet, and equivalent ensembles.

use entangle::bell::{chsh_value, ensemble_equivalence, optimize_chsh, ChshSettings, Source};
use entangle::{catalog, random, Result, Tolerances};

fn main() -> Result<()> {
    let tol = Tolerances::default();
    let mut rng = random::rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let ens = random::separable_ensemble_with(6, 2, 3, &mut rng);
        let s = ChshSettings::new(
            random::bounded_observable_with(2, &mut rng),
            random::bounded_observable_with(2, &mut rng),
            random::bounded_observable_with(3, &mut rng),
            random::bounded_observable_with(3, &mut rng),
            &tol,
        )?;
        worst = worst.max(chsh_value(Source::Ensemble(&ens), &s)?.abs());
    }
    println!("largest |S| over 200 separable mixtures: {worst:.4}");

    let opt = optimize_chsh(&catalog::singlet(), &tol)?;
    println!("singlet: |S| = {:.10} (2√2 = {:.10})", opt.value.abs(), 2.0 * 2f64.sqrt());
    println!("  directions {:?}", opt.directions);

    let (a, b) = catalog::equivalent_mixtures();
    let eq = ensemble_equivalence(&a, &b, 1e-12, &tol)?;
    println!("two decompositions of one mixture: equivalent {} (max diff {:.1e})", eq.equivalent, eq.max_difference);

    let uniform = catalog::uniform_spin_ensemble(100);
    let z = vec![(0.5, catalog::spin_up_along([0.0, 0.0, 1.0])), (0.5, catalog::spin_up_along([0.0, 0.0, -1.0]))];
    let eq = ensemble_equivalence(&uniform, &z, 1e-3, &tol)?;
    println!("100 spread directions vs up/down: equivalent {} (max diff {:.1e})", eq.equivalent, eq.max_difference);
    Ok(())
}
