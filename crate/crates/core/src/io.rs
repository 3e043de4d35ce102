//! JSON state and ensemble files.
//!
//! A state is `{"sector": .., "dims": [..], "amps": [{"idx": [..], "re": .., "im": ..}, ..]}`
//! with unlisted indices zero. An ensemble is `{"entries": [{"p": .., "factors": [<state>, ..]}, ..]}`;
//! for weighted mixtures an entry may carry a single `"state"` instead of `"factors"`.

use serde_json::{json, Map, Value};

use crate::density::SeparableEnsemble;
use crate::error::{Error, Result};
use crate::linalg::{c, CVec};
use crate::state::{check_dims, tensor_product, PureState, Sector, Tensor};
use crate::tol::Tolerances;

fn perr<T>(field: &str, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { field: field.into(), msg: msg.into() })
}

fn get<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Parse { field: join(path, key), msg: "missing".into() })
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn as_object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::Parse { field: field.into(), msg: "expected an object".into() })
}

fn as_array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse { field: field.into(), msg: "expected an array".into() })
}

fn as_f64(v: &Value, field: &str) -> Result<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => perr(field, "expected a finite number"),
    }
}

fn as_indices(v: &Value, field: &str) -> Result<Vec<usize>> {
    as_array(v, field)?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| Error::Parse { field: format!("{field}[{i}]"), msg: "expected a nonnegative integer".into() })
        })
        .collect()
}

fn check_keys(obj: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => perr(&join(path, k), "unknown field"),
        None => Ok(()),
    }
}

fn state_from_value(v: &Value, path: &str, normalize: bool, tol: &Tolerances) -> Result<PureState> {
    let obj = as_object(v, if path.is_empty() { "state" } else { path })?;
    check_keys(obj, path, &["sector", "dims", "amps", "label"])?;
    let sector_field = join(path, "sector");
    let sector: Sector = serde_json::from_value(get(obj, path, "sector")?.clone())
        .map_err(|_| Error::Parse { field: sector_field, msg: "expected distinguishable, fermionic or bosonic".into() })?;
    let dims_field = join(path, "dims");
    let dims = as_indices(get(obj, path, "dims")?, &dims_field)?;
    if dims.is_empty() {
        return perr(&dims_field, "needs at least one slot");
    }
    let total = check_dims(&dims).map_err(|e| Error::Parse { field: dims_field.clone(), msg: e.to_string() })?;
    let mut data = CVec::zeros(total);
    let amps_field = join(path, "amps");
    let mut tensor = Tensor::new(dims.clone(), data.clone())?;
    let mut seen = vec![false; total];
    for (i, entry) in as_array(get(obj, path, "amps")?, &amps_field)?.iter().enumerate() {
        let here = format!("{amps_field}[{i}]");
        let e = as_object(entry, &here)?;
        check_keys(e, &here, &["idx", "re", "im"])?;
        let idx_field = join(&here, "idx");
        let idx = as_indices(get(e, &here, "idx")?, &idx_field)?;
        let flat = tensor.flat_index(&idx).map_err(|err| Error::Parse { field: idx_field.clone(), msg: err.to_string() })?;
        if std::mem::replace(&mut seen[flat], true) {
            return perr(&idx_field, format!("index {idx:?} listed twice"));
        }
        let re = as_f64(get(e, &here, "re")?, &join(&here, "re"))?;
        let im = match e.get("im") {
            Some(x) => as_f64(x, &join(&here, "im"))?,
            None => 0.0,
        };
        data[flat] = c(re, im);
    }
    tensor = Tensor::new(dims, data)?;
    let norm_sq = tensor.norm().powi(2);
    if norm_sq <= f64::MIN_POSITIVE {
        return perr(&amps_field, "all amplitudes are zero");
    }
    let state = if normalize {
        PureState::normalized(tensor, sector, tol)
    } else {
        if (norm_sq - 1.0).abs() > tol.eq_tol {
            return Err(Error::Tolerance { what: format!("normalization of {amps_field}"), residual: (norm_sq - 1.0).abs() });
        }
        PureState::new(tensor, sector, tol)
    }
    .map_err(|e| match e {
        Error::InvalidInput(msg) => Error::Parse { field: amps_field.clone(), msg },
        other => other,
    })?;
    Ok(match obj.get("label").and_then(Value::as_str) {
        Some(l) => state.with_label(l),
        None => state,
    })
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse { field: "<document>".into(), msg: e.to_string() })
}

/// Reads a state file. With `normalize` the amplitudes are rescaled to unit
/// norm; otherwise a norm off by more than `eq_tol` is a tolerance error.
pub fn parse_state(text: &str, normalize: bool, tol: &Tolerances) -> Result<PureState> {
    state_from_value(&parse_json(text)?, "", normalize, tol)
}

/// Writes the nonzero amplitudes of `psi` in index order.
pub fn state_to_json(psi: &PureState) -> String {
    state_value(psi).to_string()
}

fn state_value(psi: &PureState) -> Value {
    let t = psi.tensor();
    let amps: Vec<Value> = t
        .data()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 0.0)
        .map(|(flat, z)| json!({"idx": t.multi_index(flat), "re": z.re, "im": z.im}))
        .collect();
    let mut v = json!({"sector": psi.sector(), "dims": psi.dims(), "amps": amps});
    if let Some(l) = psi.label() {
        v["label"] = json!(l);
    }
    v
}

fn entries(v: &Value) -> Result<&Vec<Value>> {
    let obj = as_object(v, "ensemble")?;
    check_keys(obj, "", &["entries"])?;
    let list = as_array(get(obj, "", "entries")?, "entries")?;
    if list.is_empty() {
        return perr("entries", "empty ensemble");
    }
    Ok(list)
}

fn weight(e: &Map<String, Value>, here: &str) -> Result<f64> {
    let p = as_f64(get(e, here, "p")?, &join(here, "p"))?;
    if p <= 0.0 {
        return perr(&join(here, "p"), "weights must be positive");
    }
    Ok(p)
}

fn factors(e: &Map<String, Value>, here: &str, normalize: bool, tol: &Tolerances) -> Result<Vec<PureState>> {
    let field = join(here, "factors");
    let list = as_array(get(e, here, "factors")?, &field)?;
    if list.is_empty() {
        return perr(&field, "needs at least one factor");
    }
    list.iter().enumerate().map(|(j, f)| state_from_value(f, &format!("{field}[{j}]"), normalize, tol)).collect()
}

/// Reads an ensemble of product states.
pub fn parse_ensemble(text: &str, normalize: bool, tol: &Tolerances) -> Result<SeparableEnsemble> {
    let v = parse_json(text)?;
    let mut out = Vec::new();
    for (i, entry) in entries(&v)?.iter().enumerate() {
        let here = format!("entries[{i}]");
        let e = as_object(entry, &here)?;
        check_keys(e, &here, &["p", "factors"])?;
        out.push((weight(e, &here)?, factors(e, &here, normalize, tol)?));
    }
    SeparableEnsemble::new(out, tol).map_err(|e| match e {
        Error::InvalidInput(msg) => Error::Parse { field: "entries".into(), msg },
        other => other,
    })
}

/// Reads an ensemble whose entries are either product factors or whole states.
pub fn parse_mixture(text: &str, normalize: bool, tol: &Tolerances) -> Result<Vec<(f64, PureState)>> {
    let v = parse_json(text)?;
    let mut out = Vec::new();
    for (i, entry) in entries(&v)?.iter().enumerate() {
        let here = format!("entries[{i}]");
        let e = as_object(entry, &here)?;
        check_keys(e, &here, &["p", "factors", "state"])?;
        let p = weight(e, &here)?;
        let state = match (e.get("state"), e.get("factors")) {
            (Some(s), None) => state_from_value(s, &join(&here, "state"), normalize, tol)?,
            (None, Some(_)) => {
                let fs = factors(e, &here, normalize, tol)?;
                let mut acc = fs[0].clone();
                for f in &fs[1..] {
                    acc = tensor_product(&acc, f)?;
                }
                acc
            }
            _ => return perr(&here, "needs exactly one of `state` or `factors`"),
        };
        out.push((p, state));
    }
    let total: f64 = out.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > tol.eq_tol {
        return perr("entries", format!("weights sum to {total}, not 1"));
    }
    Ok(out)
}

/// Writes an ensemble in the `factors` form.
pub fn ensemble_to_json(e: &SeparableEnsemble) -> String {
    let list: Vec<Value> =
        e.entries().iter().map(|(p, fs)| json!({"p": p, "factors": fs.iter().map(state_value).collect::<Vec<_>>()})).collect();
    json!({"entries": list}).to_string()
}

/// Whether a document is an ensemble rather than a single state.
pub fn is_ensemble(text: &str) -> Result<bool> {
    Ok(parse_json(text)?.get("entries").is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{catalog, random};
    use proptest::prelude::*;

    fn t() -> Tolerances {
        Tolerances::default()
    }

    const PAIR: &str = r#"{"sector":"fermionic","dims":[2,2],"amps":[{"idx":[0,1],"re":0.7071067811865476,"im":0.0},{"idx":[1,0],"re":-0.7071067811865476,"im":0.0}]}"#;

    fn field_of(e: Error) -> String {
        match e {
            Error::Parse { field, .. } => field,
            other => panic!("expected a parse error, got {other}"),
        }
    }

    #[test]
    fn reads_the_reference_pair() {
        let psi = parse_state(PAIR, false, &t()).unwrap();
        assert_eq!(psi.sector(), Sector::Fermionic);
        assert!((psi.amp(&[0, 1]).unwrap().re.abs() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(psi.amp(&[0, 0]).unwrap().norm(), 0.0);
    }

    #[test]
    fn errors_name_the_field() {
        let bad_sector = PAIR.replace("fermionic", "anyonic");
        assert_eq!(field_of(parse_state(&bad_sector, false, &t()).unwrap_err()), "sector");
        let bad_idx = PAIR.replace("[1,0]", "[1,2]");
        assert_eq!(field_of(parse_state(&bad_idx, false, &t()).unwrap_err()), "amps[1].idx");
        let missing = r#"{"sector":"bosonic","amps":[]}"#;
        assert_eq!(field_of(parse_state(missing, false, &t()).unwrap_err()), "dims");
        let extra = PAIR.replacen("\"dims\"", "\"colour\":1,\"dims\"", 1);
        assert_eq!(field_of(parse_state(&extra, false, &t()).unwrap_err()), "colour");
        let sym = PAIR.replace("-0.7071067811865476", "0.7071067811865476");
        assert_eq!(field_of(parse_state(&sym, false, &t()).unwrap_err()), "amps");
        let dup = PAIR.replace("[1,0]", "[0,1]");
        assert_eq!(field_of(parse_state(&dup, false, &t()).unwrap_err()), "amps[1].idx");
        assert_eq!(field_of(parse_state("{", false, &t()).unwrap_err()), "<document>");
    }

    #[test]
    fn normalization_is_opt_in() {
        let loose = PAIR.replace("0.7071067811865476", "1.0");
        assert!(matches!(parse_state(&loose, false, &t()), Err(Error::Tolerance { .. })));
        let psi = parse_state(&loose, true, &t()).unwrap();
        assert!((psi.tensor().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixtures_accept_states_and_factors() {
        let (e1, _) = catalog::equivalent_mixtures();
        let text = serde_json::json!({"entries": e1.iter().map(|(p, s)| serde_json::json!({"p": p, "state": state_value(s)})).collect::<Vec<_>>()}).to_string();
        let back = parse_mixture(&text, false, &t()).unwrap();
        for ((p, a), (q, b)) in e1.iter().zip(&back) {
            assert_eq!(p, q);
            assert!((a.fidelity(b).unwrap() - 1.0).abs() < 1e-14);
        }
        let ens = random::separable_ensemble_with(3, 2, 3, &mut random::rng(5));
        let text = ensemble_to_json(&ens);
        assert!(is_ensemble(&text).unwrap());
        assert_eq!(parse_mixture(&text, false, &t()).unwrap().len(), ens.entries().len());
        let bad = text.replacen("\"p\":", "\"p\":-", 1);
        assert_eq!(field_of(parse_ensemble(&bad, false, &t()).unwrap_err()), "entries[0].p");
    }

    proptest! {
        #[test]
        fn states_round_trip(seed in any::<u64>(), d1 in 1usize..5, d2 in 1usize..5) {
            let psi = random::state(&[d1, d2], seed);
            let back = parse_state(&state_to_json(&psi), false, &t()).unwrap();
            prop_assert!((back.amps() - psi.amps()).norm() < 1e-15);
            prop_assert_eq!(back.dims(), psi.dims());
        }

        #[test]
        fn ensembles_round_trip(seed in any::<u64>()) {
            let e = random::separable_ensemble_with(4, 2, 3, &mut random::rng(seed));
            let back = parse_ensemble(&ensemble_to_json(&e), false, &t()).unwrap();
            prop_assert_eq!(back.entries().len(), e.entries().len());
            for ((p, a), (q, b)) in e.entries().iter().zip(back.entries()) {
                prop_assert_eq!(p, q);
                prop_assert!((a[0].amps() - b[0].amps()).norm() < 1e-15);
                prop_assert!((a[1].amps() - b[1].amps()).norm() < 1e-15);
            }
        }
    }
}
