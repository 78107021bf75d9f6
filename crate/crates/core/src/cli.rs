//! The `mcmrep` command line: problem files in, text summaries and
//! versioned JSON reports out.
//!
//! Exit codes: 0 success, 1 computation error, 2 input error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algdata::{Algebra, FramedModule};
use crate::error::{Error, Result};
use crate::exactla::PrimeField;
use crate::gradedcore::PolyMatrix;
use crate::homresolve::{dualize, ext1_window};
use crate::mcmtools::{
    bounds_ledger, classify_rigid, find_gap_and_split, indecomposable_summands, module_stats,
    verify_karroum,
};
use crate::mfgen::{ade_catalog, catalog_modules, framing_points, random_conjugate, Hypersurface};
use crate::problem::{emit_problem, parse_problem, Problem};
use crate::repscheme::EquationSystem;
use crate::tangent::four_term_report;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SEED: u64 = 20240917;

#[derive(Parser, Debug)]
#[command(
    name = "mcmrep",
    version,
    about = "Exact computations with graded MCM modules and their representation schemes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of the text summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Problem file (TOML).
    pub problem: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dump the equation system of Rep for a framing.
    Equations {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        framing: String,
    },
    /// Four-term tangent sequence at a module.
    Tangent {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        module: String,
        /// Also compute Ext¹_0 from a truncated resolution.
        #[arg(long)]
        crosscheck: bool,
    },
    /// Ext¹(source, target) over a window of internal degrees.
    Ext {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        /// `LO:HI`; defaults to the symmetric window from the module widths.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Generator degrees, width, rank, type and Hilbert series (and dual).
    Stats {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        module: String,
    },
    /// Degree-gap splitting.
    Split {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        module: String,
    },
    /// Rigid orbit representatives for a framing.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        framing: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// δ, empirical β and α tables with width checks on simple and indecomposable modules.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        max_rank: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Write the ADE catalog of a curve singularity as a problem file.
    Ade {
        /// NODAL, A, D, E6, E7, E8 (or E with n).
        name: String,
        /// Index for A_n, D_n, E_n (ignored for NODAL, E6, E7, E8).
        #[arg(default_value_t = 0)]
        n: u32,
        #[arg(long)]
        emit: PathBuf,
        #[arg(long, default_value_t = 32003)]
        p: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

/// A finished command: JSON report plus text summary.
pub struct Outcome {
    pub report: Value,
    pub summary: String,
}

fn envelope(kind: &str, alg: &Algebra, seed: Option<u64>, result: Value) -> Value {
    json!({
        "schema": format!("mcmrep.{kind}/1"),
        "tool_version": VERSION,
        "field": alg.field().p(),
        "truncation": alg.truncation(),
        "seed": seed,
        "result": result,
    })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn matrix_json(m: &PolyMatrix, alg: &Algebra) -> Value {
    let (names, f, ring) = (&alg.input().ring_names, alg.field(), alg.ring());
    Value::Array(
        (0..m.rows())
            .map(|r| {
                Value::Array(
                    (0..m.cols())
                        .map(|c| Value::String(m.get(r, c).display(names, f, ring)))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn module_json(m: &FramedModule) -> Value {
    let alg = m.algebra();
    let actions: serde_json::Map<String, Value> = (1..alg.num_generators())
        .map(|i| {
            (
                alg.generator_name(i).to_string(),
                matrix_json(m.action(i), alg),
            )
        })
        .collect();
    json!({ "framing": m.degrees(), "actions": actions })
}

fn parse_window(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::Input(format!("window '{s}' must be LO:HI"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn load(common: &Common) -> Result<Problem> {
    parse_problem(&common.problem)
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Equations { common, framing } => equations(&load(common)?, framing),
        Command::Tangent {
            common,
            module,
            crosscheck,
        } => tangent(&load(common)?, module, *crosscheck),
        Command::Ext {
            common,
            source,
            target,
            window,
        } => ext(
            &load(common)?,
            source,
            target,
            window.as_deref().map(parse_window).transpose()?,
        ),
        Command::Stats { common, module } => stats(&load(common)?, module),
        Command::Split { common, module } => split(&load(common)?, module),
        Command::Classify {
            common,
            framing,
            samples,
            seed,
        } => classify(&load(common)?, framing, *samples, *seed),
        Command::Bounds {
            common,
            max_rank,
            samples,
            seed,
        } => bounds(&load(common)?, *max_rank, *samples, *seed),
        Command::Ade {
            name,
            n,
            emit,
            p,
            seed,
            ..
        } => {
            let (text, mut o) = ade(name, *n, *p, *seed)?;
            write_file(emit, &text)?;
            o.report["result"]["emitted"] = json!(emit.display().to_string());
            let _ = writeln!(o.summary, "written to {}", emit.display());
            Ok(o)
        }
    }
}

pub fn equations(p: &Problem, framing: &str) -> Result<Outcome> {
    let v = p.framing(framing)?;
    let sys = EquationSystem::generate(&p.algebra, v);
    let eqs: Vec<Value> = sys.equations.iter().map(to_value).collect();
    let mut s = format!(
        "framing {framing} = {:?}\ncoordinates: {}\nequations: {}\n",
        v.degrees(),
        sys.coords.total_dim(),
        sys.num_equations()
    );
    for e in sys.equations.iter().take(20) {
        let _ = writeln!(
            s,
            "  {} slot ({},{}) monomial {:?}: {} terms",
            e.label,
            e.row + 1,
            e.col + 1,
            e.monomial.0,
            e.terms.len()
        );
    }
    if sys.num_equations() > 20 {
        let _ = writeln!(s, "  ... {} more", sys.num_equations() - 20);
    }
    let result = json!({
        "framing": v.degrees(),
        "num_coordinates": sys.coords.total_dim(),
        "coordinates": to_value(&sys.coords.descriptors()),
        "num_equations": sys.num_equations(),
        "equations": eqs,
    });
    Ok(Outcome {
        report: envelope("equations", &p.algebra, None, result),
        summary: s,
    })
}

pub fn tangent(p: &Problem, module: &str, crosscheck: bool) -> Result<Outcome> {
    let m = p.module(module)?;
    let sys = EquationSystem::generate(&p.algebra, &m.framing());
    let r = four_term_report(&sys, m, crosscheck)?;
    let mut s = format!(
        "module {module}\n(End_A,0, End_R,0, T, Ext1_0) = ({}, {}, {}, {})\norbit dim {}\n",
        r.dim_end_a_0, r.dim_end_r_0, r.dim_tangent, r.dim_ext1_0_via_sequence, r.orbit_dim
    );
    if let Some(x) = r.dim_ext1_0_via_resolution {
        let _ = writeln!(s, "Ext1_0 via resolution: {x}");
    }
    let _ = writeln!(s, "exactness verified: {}", r.exactness_verified);
    let _ = writeln!(
        s,
        "{}",
        if r.rigid_degree_zero {
            "rigid (degree 0)"
        } else {
            "not rigid (degree 0)"
        }
    );
    Ok(Outcome {
        report: envelope("tangent", &p.algebra, None, to_value(&r)),
        summary: s,
    })
}

pub fn ext(p: &Problem, source: &str, target: &str, window: Option<(i64, i64)>) -> Result<Outcome> {
    let (m, n) = (p.module(source)?, p.module(target)?);
    let win = match window {
        Some(w) => w,
        None => crate::homresolve::default_window(m, n),
    };
    let w = ext1_window(m, n, win)?;
    let mut s = format!("Ext1({source}, {target}) on [{}, {}]\n", win.0, win.1);
    for (d, k) in &w.dims {
        if *k > 0 {
            let _ = writeln!(s, "  degree {d}: {k}");
        }
    }
    let _ = writeln!(s, "total {}", w.total());
    Ok(Outcome {
        report: envelope("ext", &p.algebra, None, to_value(&w)),
        summary: s,
    })
}

pub fn stats(p: &Problem, module: &str) -> Result<Outcome> {
    let m = p.module(module)?;
    let st = module_stats(m)?;
    let dual = match dualize(m) {
        Ok(d) => Some(module_stats(&d)?),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let mut s = format!(
        "module {module}: g_min {} g_max {} w {} rank {}\nHilbert series {}\n",
        st.g_min, st.g_max, st.w, st.rank, st.hilbert
    );
    match &dual {
        Some(d) => {
            let _ = writeln!(s, "dual: g_min {} g_max {}", d.g_min, d.g_max);
        }
        None => s.push_str("dual: not available (noncommutative algebra)\n"),
    }
    let result = json!({ "stats": to_value(&st), "dual": dual.as_ref().map(to_value) });
    Ok(Outcome {
        report: envelope("stats", &p.algebra, None, result),
        summary: s,
    })
}

pub fn split(p: &Problem, module: &str) -> Result<Outcome> {
    let m = p.module(module)?;
    let alg = &p.algebra;
    let (result, s) = match find_gap_and_split(m)? {
        None => (
            json!({ "gap": false }),
            format!(
                "module {module}: no degree gap longer than α = {}\n",
                alg.alpha()
            ),
        ),
        Some(r) => {
            let s = format!(
                "module {module}: gap after degree {}\nsub framing {:?}, quotient framing {:?}\nA-stable {}\nExt1(quotient, sub)_0 = {}\nsplitting {}\n",
                r.gap_position,
                r.sub.degrees(),
                r.quotient.degrees(),
                r.a_stable,
                r.ext_obstruction_dim,
                if r.intertwiner_verified { "found and verified" } else { "not found" }
            );
            let v = json!({
                "gap": true,
                "gap_position": r.gap_position,
                "sub": module_json(&r.sub),
                "quotient": module_json(&r.quotient),
                "a_stable": r.a_stable,
                "ext_obstruction_dim": r.ext_obstruction_dim,
                "splitting_map": r.splitting_map.as_ref().map(|x| matrix_json(x, alg)),
                "intertwiner_verified": r.intertwiner_verified,
            });
            (v, s)
        }
    };
    Ok(Outcome {
        report: envelope("split", alg, None, result),
        summary: s,
    })
}

pub fn classify(p: &Problem, framing: &str, samples: usize, seed: u64) -> Result<Outcome> {
    let v = p.framing(framing)?.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let catalog: Vec<FramedModule> = p.modules.values().cloned().collect();
    let base = framing_points(&catalog, &v);
    let mut points = base.clone();
    if !base.is_empty() {
        for _ in 0..samples {
            let k = rng.random_range(0..base.len());
            points.push(random_conjugate(&base[k], &mut rng)?);
        }
    }
    let c = classify_rigid(&p.algebra, &v, points, seed)?;
    let mut s = format!(
        "framing {framing} = {:?}: {} points examined, {} rigid, {} classes\n",
        v.degrees(),
        c.points_examined,
        c.rigid_points,
        c.classes.len()
    );
    let mut classes = Vec::new();
    for (k, cl) in c.classes.iter().enumerate() {
        let _ = writeln!(
            s,
            "  class {}: dims {:?} rigid(deg 0) {} rigid(window) {} summands {}",
            k + 1,
            cl.dims,
            cl.rigid_degree_zero,
            cl.rigid_full_window,
            cl.summands.len()
        );
        classes.push(json!({
            "module": module_json(&cl.module),
            "stats": to_value(&cl.stats),
            "tangent_dims": [cl.dims.0, cl.dims.1, cl.dims.2, cl.dims.3],
            "rigid_degree_zero": cl.rigid_degree_zero,
            "rigid_full_window": cl.rigid_full_window,
            "indecomposable": cl.indecomposable,
            "summands": cl.summands.iter().map(module_json).collect::<Vec<_>>(),
        }));
    }
    s.push_str("caveat: classes among sampled points over F_p; completeness is not certified\n");
    let result = json!({
        "framing": v.degrees(),
        "points_examined": c.points_examined,
        "rigid_points": c.rigid_points,
        "classes": classes,
        "caveat": "sampling over F_p; orbits that merge only over an extension are listed separately",
    });
    Ok(Outcome {
        report: envelope("classify", &p.algebra, Some(seed), result),
        summary: s,
    })
}

pub fn bounds(p: &Problem, max_rank: usize, samples: usize, seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let named: Vec<(String, FramedModule)> = p
        .modules
        .iter()
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let mut pool: Vec<FramedModule> = named
        .iter()
        .map(|x| x.1.clone())
        .filter(|m| m.rank() <= max_rank)
        .collect();
    if !pool.is_empty() {
        let base = pool.clone();
        for _ in 0..samples {
            let a = &base[rng.random_range(0..base.len())];
            let b = &base[rng.random_range(0..base.len())];
            let sum = a.direct_sum(&b.shift(rng.random_range(-2..=2)));
            if sum.rank() <= max_rank {
                pool.push(random_conjugate(&sum, &mut rng)?);
            }
        }
    }
    let ledger = bounds_ledger(&p.algebra, &pool, max_rank)?;
    let simple_width = verify_karroum(&named, &mut rng)?;
    // Width check on the indecomposable summands of every named module.
    let mut width_violations = Vec::new();
    for (name, m) in &named {
        for part in indecomposable_summands(m, &mut rng)? {
            let st = module_stats(&part)?;
            if let Some(&a) = ledger.alpha_r_hat.get(&st.rank) {
                if st.w >= a {
                    width_violations.push(format!(
                        "{name}: summand of rank {} has w = {} ≥ {a}",
                        st.rank, st.w
                    ));
                }
            }
        }
    }
    let mut s = format!("α = {}\n", ledger.alpha);
    for (r, d) in &ledger.delta {
        let _ = writeln!(s, "  r = {r}: δ = {d}, α̂ = {}", ledger.alpha_r_hat[r]);
    }
    for b in &ledger.beta_hat {
        let _ = writeln!(s, "  β̂({}, {}) = {} (ESTIMATE)", b.r, b.s, b.value);
    }
    let _ = writeln!(
        s,
        "simple modules: {} found, {} exceed r·α + 1",
        simple_width.simple_count,
        simple_width.violations.len()
    );
    let _ = writeln!(s, "width check: {} violations", width_violations.len());
    let result = json!({
        "ledger": to_value(&ledger),
        "simple_width": to_value(&simple_width),
        "width_violations": width_violations,
    });
    Ok(Outcome {
        report: envelope("bounds", &p.algebra, Some(seed), result),
        summary: s,
    })
}

/// The catalog of a named curve singularity as problem-file text, plus its report.
pub fn ade(name: &str, n: u32, p: u64, seed: u64) -> Result<(String, Outcome)> {
    let field = PrimeField::new(p)?;
    let hs = Hypersurface::ade(name, n, field)?;
    let alg = hs.algebra(None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = ade_catalog(&hs, &alg, &mut rng)?;
    let mods = catalog_modules(&hs, &alg, &entries)?;
    let named: Vec<(String, FramedModule)> = entries
        .iter()
        .zip(mods)
        .map(|(e, m)| (module_name(&e.name), m))
        .collect();
    let spread = named
        .iter()
        .flat_map(|(_, m)| m.degrees().iter().map(|d| d.abs()))
        .max()
        .unwrap_or(0);
    let d = crate::algdata::default_truncation(alg.alpha(), spread);
    let mut framings = BTreeMap::new();
    framings.insert("rank1".to_string(), vec![0]);
    let text = format!("# {} curve singularity catalog, p = {p}\n", hs.name)
        + &emit_problem(alg.input(), Some(d), &framings, &named)?;
    let alg = alg.with_truncation(d);
    let mut s = format!("{}: {} catalog entries\n", hs.name, named.len());
    for (e, (nm, m)) in entries.iter().zip(&named) {
        let _ = writeln!(
            s,
            "  {nm}: framing {:?}{}",
            m.degrees(),
            if e.field_caveat {
                " (field caveat)"
            } else {
                ""
            }
        );
    }
    let result = json!({
        "name": hs.name,
        "entries": entries.iter().zip(&named).map(|(e, (nm, m))| json!({
            "name": nm,
            "field_caveat": e.field_caveat,
            "module": module_json(m),
        })).collect::<Vec<_>>(),
        "emitted": Value::Null,
    });
    Ok((
        text,
        Outcome {
            report: envelope("ade", &alg, Some(seed), result),
            summary: s,
        },
    ))
}

/// Catalog names as bare identifiers.
fn module_name(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            '-' => 'm',
            '+' => 'p',
            '\'' => 'd',
            c if c.is_ascii_alphanumeric() || c == '_' => c,
            _ => '_',
        })
        .collect()
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

/// Input errors exit with 2, computation errors with 1.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_)
        | Error::Parse { .. }
        | Error::InvalidAlgebra(_)
        | Error::NotAModule { .. }
        | Error::FramingMismatch(_)
        | Error::MatrixFactorization(_) => 2,
        Error::OffVariety { .. }
        | Error::WindowExhausted { .. }
        | Error::CharacteristicTooSmall { .. }
        | Error::Unsupported(_)
        | Error::Computation(_) => 1,
    }
}

pub fn error_json(e: &Error) -> Value {
    let mut v = json!({
        "schema": "mcmrep.error/1",
        "tool_version": VERSION,
        "kind": e.kind(),
        "message": e.to_string(),
        "exit_code": exit_code(e),
    });
    if let Error::Parse { line, .. } = e {
        v["line"] = json!(line);
    }
    v
}

fn output_of(cmd: &Command) -> &Output {
    match cmd {
        Command::Equations { common, .. }
        | Command::Tangent { common, .. }
        | Command::Ext { common, .. }
        | Command::Stats { common, .. }
        | Command::Split { common, .. }
        | Command::Classify { common, .. }
        | Command::Bounds { common, .. } => &common.output,
        Command::Ade { output, .. } => output,
    }
}

/// Runs a parsed command line, printing results; returns the exit code.
pub fn main_with(cli: Cli) -> i32 {
    let Output { out: out_path, json: json_out } = output_of(&cli.command).clone();
    match run(&cli.command) {
        Ok(o) => {
            let text = serde_json::to_string_pretty(&o.report).expect("json");
            if let Some(p) = &out_path {
                if let Err(e) = write_file(p, &(text.clone() + "\n")) {
                    eprintln!(
                        "{}",
                        serde_json::to_string_pretty(&error_json(&e)).expect("json")
                    );
                    return exit_code(&e);
                }
            }
            if json_out {
                println!("{text}");
            } else {
                print!("{}", o.summary);
            }
            0
        }
        Err(e) => {
            let v = serde_json::to_string_pretty(&error_json(&e)).expect("json");
            if let Some(p) = &out_path {
                let _ = std::fs::write(p, v.clone() + "\n");
            }
            eprintln!("{v}");
            exit_code(&e)
        }
    }
}
