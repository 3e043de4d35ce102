//! Command-line front end. [`run`] parses argv, dispatches one verb and
//! returns the exit code with the text to print.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bell::{chsh_value, ensemble_equivalence, optimize_chsh, ChshSettings, Source};
use crate::bosons_n::{assemble_boson_split, bin_measurement_demo, boson_split_report, identical_halves};
use crate::distinguishable::{classify, completely_non_entangled, schmidt_decompose, split_non_entangled, Cut};
use crate::error::{invalid, Error, Result};
use crate::fermions_n::{
    approx_orthogonality_report, assemble_split, completely_non_entangled_fermions, connecting_correlation, discover_split,
    local_factorizability, subset_property_check, verify_split,
};
use crate::identical2::{decide_pair, PairShape};
use crate::io;
use crate::linalg::{basis_vec, projector_onto, CMat};
use crate::measure::{ghz_demo, outcome_dependent_entanglement_demo, Remainder, SpinAxis};
use crate::permsym::factorial;
use crate::report::{Record, Report};
use crate::state::{PureState, Sector};
use crate::tol::Tolerances;

#[derive(Parser, Debug)]
#[command(name = "entangle", version, about = "Entanglement analyses for distinguishable and identical-particle states")]
struct Cli {
    /// Tolerance for scalar equalities.
    #[arg(long, global = true, value_name = "FLOAT")]
    tol: Option<f64>,
    /// Relative singular/eigenvalue cutoff.
    #[arg(long = "rank-tol", global = true, value_name = "FLOAT")]
    rank_tol: Option<f64>,
    /// Print JSON instead of key=value lines.
    #[arg(long, global = true)]
    json: bool,
    /// Rescale loaded amplitudes to unit norm.
    #[arg(long, global = true)]
    normalize: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Schmidt coefficients across a cut.
    Schmidt {
        state: PathBuf,
        /// `A|B` with 1-based slots, e.g. `1,2|3`. Default: first slot against the rest.
        #[arg(long)]
        cut: Option<String>,
    },
    /// Non-entangled / partially / totally entangled, from the reduced operator's range.
    Classify {
        state: PathBuf,
        #[arg(long)]
        cut: Option<String>,
        /// Also classify the second side.
        #[arg(long)]
        both: bool,
    },
    /// Whether the state factorizes: into the first M slots and the rest (`--m`) or completely.
    Split {
        state: PathBuf,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Two identical particles: Slater / symmetrized-product decision.
    Pair { state: PathBuf },
    /// Whether a group state is a subset of an identical-particle state.
    Subset { state: PathBuf, group: PathBuf },
    /// (Anti)symmetrized product of two group states.
    Assemble {
        first: PathBuf,
        second: PathBuf,
        /// Write the assembled state here and print a summary instead.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Joint vs product probabilities for local properties of a fermion split.
    LocalFact(LocalFactArgs),
    /// CHSH value of a two-slot state or a separable ensemble.
    Chsh(ChshArgs),
    /// Whether two ensembles share a statistical operator.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Built-in demonstrations.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
}

#[derive(Args, Debug)]
struct LocalFactArgs {
    state: PathBuf,
    /// Size of the first group.
    #[arg(long)]
    m: Option<usize>,
    /// Basis indices spanning region 1.
    #[arg(long, value_delimiter = ',')]
    region1: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    region2: Vec<usize>,
    /// Basis indices of the property tested in region 1.
    #[arg(long, value_delimiter = ',')]
    p: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    q: Vec<usize>,
    /// `r,s`: use the two observables connecting orbitals r and s of a pair instead.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["m", "region1", "region2", "p", "q"])]
    connect: Vec<usize>,
}

#[derive(Args, Debug)]
struct ChshArgs {
    input: PathBuf,
    /// Bloch vector `x,y,z` of the first side-1 spin observable.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a2: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b2: Vec<f64>,
    /// Search spin directions maximizing |S| (two-qubit states only).
    #[arg(long, conflicts_with_all = ["a", "a2", "b", "b2"])]
    optimize: bool,
}

#[derive(Subcommand, Debug)]
enum Demo {
    /// Measure the third spin of a GHZ triple.
    Ghz {
        #[arg(long, default_value = "z")]
        measure: SpinAxis,
    },
    /// Two bosons spread uniformly over bins; conditional vs unconditional probabilities.
    BosonBins {
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[arg(long, default_value_t = 2)]
        d1: usize,
        #[arg(long, default_value_t = 3)]
        d2: usize,
    },
    /// A measurement whose outcome decides whether the rest is entangled.
    OutcomeDep,
    /// Property deficit as two groups approach one-particle orthogonality.
    ApproxOrth {
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001,0")]
        eps: Vec<f64>,
    },
    /// CHSH optimization on the singlet.
    Tsirelson,
}

struct Ctx {
    tol: Tolerances,
    normalize: bool,
}

impl Ctx {
    fn read(&self, path: &Path) -> Result<String> {
        fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
    }

    fn state(&self, path: &Path) -> Result<PureState> {
        io::parse_state(&self.read(path)?, self.normalize, &self.tol)
    }
}

/// Exit code for an error: 3 for tolerance and consistency failures, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Tolerance { .. } | Error::Inconsistency(_) => 3,
        _ => 2,
    }
}

/// Runs one command; `argv[0]` is the program name. Returns the exit code
/// and the report (on success) or a one-line diagnostic.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (0, e.to_string()),
                _ => {
                    let text = e.to_string();
                    let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
                    (2, format!("{line}\n"))
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(out) => (0, out),
        Err(e) => (exit_code(&e), format!("error: {e}\n")),
    }
}

fn tolerances(cli: &Cli) -> Result<Tolerances> {
    let mut tol = Tolerances::default();
    if let Some(t) = cli.tol {
        tol = tol.with_eq_tol(t)?;
    }
    if let Some(r) = cli.rank_tol {
        tol = tol.with_rank_tol(r)?;
    }
    Ok(tol)
}

fn cut_for(psi: &PureState, cut: &Option<String>) -> Result<Cut> {
    match cut {
        Some(text) => Cut::parse(text, psi.n_slots()),
        None => Cut::first(1, psi.n_slots()),
    }
}

fn dispatch(cli: &Cli) -> Result<String> {
    let ctx = Ctx { tol: tolerances(cli)?, normalize: cli.normalize };
    let tol = &ctx.tol;
    let report = match &cli.verb {
        Verb::Schmidt { state, cut } => {
            let psi = ctx.state(state)?;
            let sd = schmidt_decompose(&psi, &cut_for(&psi, cut)?, tol)?;
            Report::single(Record::new().with("rank", sd.rank).with("coeffs", sd.coeffs))
        }
        Verb::Classify { state, cut, both } => {
            let psi = ctx.state(state)?;
            let cut = cut_for(&psi, cut)?;
            let c1 = classify(&psi, &cut, tol)?;
            let mut r = Record::new().with("kind", c1.kind.to_string()).with("maximal", c1.maximal).with("range_dim", c1.range_dim);
            if *both {
                let c2 = classify(&psi, &cut.flip(), tol)?;
                r = r.with("side2_kind", c2.kind.to_string()).with("side2_maximal", c2.maximal).with("side2_range_dim", c2.range_dim);
            }
            Report::single(r)
        }
        Verb::Split { state, m } => Report::single(split(&ctx.state(state)?, *m, tol)?),
        Verb::Pair { state } => {
            let d = decide_pair(&ctx.state(state)?, tol)?;
            let mut r = Record::new().with("non_entangled", d.non_entangled).with("shape", d.shape.to_string());
            if let PairShape::ObliqueSymmetrized { overlap } = d.shape {
                r.push("overlap", overlap);
            }
            r.push("spectrum", d.spectrum);
            Report::single(r)
        }
        Verb::Subset { state, group } => Report::single(subset(&ctx.state(state)?, &ctx.state(group)?, tol)?),
        Verb::Assemble { first, second, out } => return assemble(&ctx, first, second, out.as_deref(), cli.json),
        Verb::LocalFact(args) => Report::single(local_fact(&ctx, args)?),
        Verb::Chsh(args) => Report::single(chsh(&ctx, args)?),
        Verb::Equiv { first, second, threshold } => {
            let e1 = io::parse_mixture(&ctx.read(first)?, ctx.normalize, tol)?;
            let e2 = io::parse_mixture(&ctx.read(second)?, ctx.normalize, tol)?;
            let eq = ensemble_equivalence(&e1, &e2, threshold.unwrap_or(tol.eq_tol), tol)?;
            let predictions = if eq.equivalent { "identical_for_all_measurements" } else { "may_differ" };
            Report::single(
                Record::new().with("equivalent", eq.equivalent).with("max_difference", eq.max_difference).with("predictions", predictions),
            )
        }
        Verb::Demo { which } => demo(which, tol)?,
    };
    Ok(report.render(cli.json))
}

fn split(psi: &PureState, m: Option<usize>, tol: &Tolerances) -> Result<Record> {
    let mut r = Record::new();
    match (psi.sector(), m) {
        (Sector::Distinguishable, Some(m)) => {
            let out = split_non_entangled(psi, m, tol)?;
            r.push("split", out.non_entangled);
        }
        (Sector::Distinguishable, None) => {
            let (flag, factors) = completely_non_entangled(psi, tol)?;
            r.push("split", flag);
            r.push("factors", factors.map_or(0, |f| f.len()));
        }
        (Sector::Fermionic, Some(m)) => {
            let s = discover_split(psi, m, tol)?;
            r.push("split", s.found.is_some());
            r.push("candidates_tried", s.candidates_tried);
            r.push("exhaustive", s.exhaustive);
        }
        (Sector::Fermionic, None) => {
            let (flag, orbitals) = completely_non_entangled_fermions(psi, tol)?;
            r.push("split", flag);
            r.push("orbitals", orbitals.map_or(0, |o| o.len()));
        }
        (Sector::Bosonic, m) => {
            if let Some(m) = m {
                if 2 * m != psi.n_slots() {
                    return invalid("boson states are split into two identical halves; --m must be N/2");
                }
            }
            let h = identical_halves(psi, tol)?;
            r.push("split", h.flag);
            r.push("fidelity", h.fidelity);
        }
    }
    Ok(r)
}

fn subset(psi: &PureState, group: &PureState, tol: &Tolerances) -> Result<Record> {
    match psi.sector() {
        Sector::Fermionic => {
            let check = subset_property_check(psi, group, tol)?;
            let v = verify_split(psi, group, tol)?;
            let mut r = Record::new().with("value", check.value).with("holds", check.holds);
            if let Some(f) = v.fidelity {
                r.push("reassembly_fidelity", f);
            }
            Ok(r)
        }
        Sector::Bosonic => {
            let rep = boson_split_report(psi, group, tol)?;
            Ok(Record::new().with("kind", rep.kind.to_string()).with("value", rep.value))
        }
        Sector::Distinguishable => invalid("subset needs a fermionic or bosonic state"),
    }
}

fn assemble(ctx: &Ctx, first: &Path, second: &Path, out: Option<&Path>, json: bool) -> Result<String> {
    let (a, b) = (ctx.state(first)?, ctx.state(second)?);
    let tol = &ctx.tol;
    let mut r = Record::new();
    let state = match a.sector() {
        Sector::Fermionic => {
            let s = assemble_split(&a, &b, tol)?;
            let (n, m) = (s.assembled.n_slots(), a.n_slots());
            r.push("slots", n);
            r.push("raw_norm_sq", s.raw_norm_sq);
            r.push("expected_norm_sq", factorial(m) * factorial(n - m) / factorial(n));
            s.assembled
        }
        Sector::Bosonic => {
            let s = assemble_boson_split(&a, &b, tol)?;
            r.push("slots", s.state.n_slots());
            r.push("relation", s.relation.to_string());
            if let Some(w) = &s.warning {
                r.push("warning", "oblique_factors");
                r.push("contraction_residual", w.contraction_residual);
            }
            s.state
        }
        Sector::Distinguishable => return invalid("assemble needs fermionic or bosonic group states"),
    };
    match out {
        None => Ok(io::state_to_json(&state) + "\n"),
        Some(path) => {
            fs::write(path, io::state_to_json(&state) + "\n")
                .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
            r.push("written", path.display().to_string());
            Ok(Report::single(r).render(json))
        }
    }
}

fn basis_projector(indices: &[usize], d: usize, name: &str) -> Result<CMat> {
    if indices.is_empty() {
        return invalid(format!("--{name} needs at least one basis index"));
    }
    if let Some(&i) = indices.iter().find(|&&i| i >= d) {
        return invalid(format!("--{name}: basis index {i} out of range for dimension {d}"));
    }
    let vs: Vec<_> = indices.iter().map(|&i| basis_vec(d, i)).collect();
    Ok(projector_onto(&vs, d))
}

fn local_fact(ctx: &Ctx, args: &LocalFactArgs) -> Result<Record> {
    let psi = ctx.state(&args.state)?;
    let d = psi.one_particle_dim().ok_or_else(|| Error::InvalidInput("local-fact needs an identical-particle state".into()))?;
    let lf = if !args.connect.is_empty() {
        let (r, s) = match args.connect[..] {
            [r, s] => (r, s),
            _ => return invalid("--connect takes exactly two basis indices `r,s`"),
        };
        if r >= d || s >= d || r == s {
            return invalid(format!("--connect needs two distinct basis indices below {d}"));
        }
        connecting_correlation(&psi, &basis_vec(d, r), &basis_vec(d, s), &ctx.tol)?
    } else {
        let m = args.m.ok_or_else(|| Error::InvalidInput("--m is required unless --connect is given".into()))?;
        local_factorizability(
            &psi,
            m,
            &basis_projector(&args.region1, d, "region1")?,
            &basis_projector(&args.region2, d, "region2")?,
            &basis_projector(&args.p, d, "p")?,
            &basis_projector(&args.q, d, "q")?,
            &ctx.tol,
        )?
    };
    Ok(Record::new()
        .with("joint", lf.joint)
        .with("marginal1", lf.marginal1)
        .with("marginal2", lf.marginal2)
        .with("product", lf.product)
        .with("factorizes", lf.factorizes))
}

fn bloch_arg(v: &[f64], name: &str, default: [f64; 3]) -> Result<[f64; 3]> {
    match v {
        [] => Ok(default),
        [x, y, z] => Ok([*x, *y, *z]),
        _ => invalid(format!("--{name} takes a Bloch vector `x,y,z`")),
    }
}

fn chsh(ctx: &Ctx, args: &ChshArgs) -> Result<Record> {
    let tol = &ctx.tol;
    let text = ctx.read(&args.input)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut r = Record::new();
    let s = if io::is_ensemble(&text)? {
        if args.optimize {
            return invalid("--optimize needs a pure two-qubit state");
        }
        let e = io::parse_ensemble(&text, ctx.normalize, tol)?;
        let settings = settings_from(args, h, tol)?;
        r.push("source", "separable_ensemble");
        chsh_value(Source::Ensemble(&e), &settings)?
    } else {
        let psi = io::parse_state(&text, ctx.normalize, tol)?;
        r.push("source", "state");
        if args.optimize {
            optimize_chsh(&psi, tol)?.value
        } else {
            chsh_value(Source::State(&psi), &settings_from(args, h, tol)?)?
        }
    };
    r.push("S", s);
    r.push("exceeds_classical_bound", s.abs() > 2.0 + tol.eq_tol);
    Ok(r)
}

fn settings_from(args: &ChshArgs, h: f64, tol: &Tolerances) -> Result<ChshSettings> {
    ChshSettings::spins(
        bloch_arg(&args.a, "a", [0.0, 0.0, 1.0])?,
        bloch_arg(&args.a2, "a2", [1.0, 0.0, 0.0])?,
        bloch_arg(&args.b, "b", [h, 0.0, h])?,
        bloch_arg(&args.b2, "b2", [-h, 0.0, h])?,
        tol,
    )
}

fn remainder_records(rs: Vec<Remainder>) -> Report {
    Report(
        rs.into_iter()
            .map(|r| {
                let kind = if r.is_product() { "product" } else { "entangled" };
                Record::new().with("outcome", r.label).with("p", r.probability).with("remainder", kind)
            })
            .collect(),
    )
}

fn demo(which: &Demo, tol: &Tolerances) -> Result<Report> {
    Ok(match which {
        Demo::Ghz { measure } => remainder_records(ghz_demo(*measure, tol)?),
        Demo::OutcomeDep => remainder_records(outcome_dependent_entanglement_demo(tol)?),
        Demo::BosonBins { bins, d1, d2 } => {
            if d1 + d2 > *bins {
                return invalid(format!("--d1 + --d2 = {} exceeds --bins {bins}", d1 + d2));
            }
            let delta1: Vec<usize> = (0..*d1).collect();
            let delta2: Vec<usize> = (*d1..d1 + d2).collect();
            let b = bin_measurement_demo(*bins, &delta1, &delta2, tol)?;
            let (num, den) = b.conditional_ratio;
            Report::single(Record::new().with("conditional", format!("{num}/{den}")).with("unconditional", b.unconditional))
        }
        Demo::ApproxOrth { eps } => Report(
            approx_orthogonality_report(eps, tol)?
                .into_iter()
                .map(|row| {
                    Record::new()
                        .with("eps", row.eps)
                        .with("residual", row.residual)
                        .with("deficit", row.deficit)
                        .with("entangled_deficit", row.entangled_deficit)
                })
                .collect(),
        ),
        Demo::Tsirelson => {
            let opt = optimize_chsh(&crate::catalog::singlet(), tol)?;
            let target = 2.0 * 2f64.sqrt();
            Report::single(Record::new().with("S", opt.value).with("target", target).with("gap", (opt.value.abs() - target).abs()))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> (i32, String) {
        run(std::iter::once("entangle").chain(args.iter().copied()))
    }

    #[test]
    fn demos_print_fixed_lines() {
        assert_eq!(
            go(&["demo", "boson-bins", "--bins", "10", "--d1", "2", "--d2", "3"]),
            (0, "conditional=2/7 unconditional=0.32\n".into())
        );
        let (code, out) = go(&["demo", "ghz", "--measure", "z"]);
        assert_eq!(code, 0);
        assert_eq!(out, "outcome=+1 p=0.5 remainder=product\noutcome=-1 p=0.5 remainder=product\n");
        let (_, out) = go(&["demo", "ghz", "--measure", "x"]);
        assert!(out.lines().all(|l| l.ends_with("remainder=entangled")), "{out}");
    }

    #[test]
    fn bad_arguments_exit_two() {
        assert_eq!(go(&["schmidt", "x.json", "--frobnicate"]).0, 2);
        assert_eq!(go(&["teleport"]).0, 2);
        assert_eq!(go(&["--tol", "0.5", "demo", "tsirelson"]).0, 2);
        assert_eq!(go(&["demo", "ghz", "--measure", "w"]).0, 2);
        let (code, out) = go(&["schmidt", "/nonexistent/state.json"]);
        assert_eq!(code, 2);
        assert_eq!(out.lines().count(), 1);
        assert_eq!(go(&["--help"]).0, 0);
    }
}
