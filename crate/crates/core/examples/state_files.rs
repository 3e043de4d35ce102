//! Reading and writing the JSON state format.

use entangle::distinguishable::classify;
use entangle::io::{parse_state, state_to_json};
use entangle::{catalog, Cut, Error, Result, Tolerances};

fn main() -> Result<()> {
    let tol = Tolerances::default();
    let text = state_to_json(&catalog::singlet());
    println!("{text}");
    let back = parse_state(&text, false, &tol)?;
    println!("reloaded: {}", classify(&back, &Cut::first(1, 2)?, &tol)?.kind);

    let loose = r#"{"sector":"distinguishable","dims":[2,2],"amps":[{"idx":[0,1],"re":1},{"idx":[1,0],"re":-1}]}"#;
    match parse_state(loose, false, &tol) {
        Err(Error::Tolerance { residual, .. }) => println!("unnormalized input rejected (residual {residual})"),
        other => println!("unexpected: {other:?}"),
    }
    println!("with normalization: {:?}", parse_state(loose, true, &tol)?.amps().as_slice());

    let broken = r#"{"sector":"bosonic","dims":[2,2],"amps":[{"idx":[0],"re":1}]}"#;
    if let Err(e) = parse_state(broken, false, &tol) {
        println!("{e}");
    }
    Ok(())
}
