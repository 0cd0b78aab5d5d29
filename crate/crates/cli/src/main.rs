use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use bratteli_core::construct::{
    build_rational_family, collapse_to_simple, extend_with_minimal_component, Budgets,
    ConstructionResult,
};
use bratteli_core::report;
use bratteli_core::values::DEFAULT_ENUM_BUDGET;
use bratteli_core::{
    build_measure, enumerate_level_values, group_equal, is_good, member_s, parse_value, Diagram,
    Error, ErgodicMeasure,
};

/// Finite ergodic measures on stationary Bratteli diagrams and their clopen values sets.
#[derive(Parser)]
#[command(name = "bratteli", version)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Largest R tried by the extension search.
    #[arg(long, global = true, default_value_t = 16)]
    max_r: usize,
    /// Largest N tried by the extension search, and largest power tried by simplify.
    #[arg(long, global = true, default_value_t = 32)]
    max_n: usize,
    /// Bound on the new-row entries of the extension.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    coeff_bound: u64,
    /// Bound on the number of tuples visited by enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUM_BUDGET)]
    enum_budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classes, Perron roots, ergodic measures and their verdicts.
    Analyze { file: PathBuf },
    /// Decide whether a value lies in S(mu).
    Member {
        file: PathBuf,
        #[arg(long)]
        class: usize,
        /// Polynomial expression in l, e.g. "3 - l" or "5/36".
        #[arg(long, allow_hyphen_values = true)]
        value: String,
    },
    /// Decide whether the measure is good.
    Good {
        file: PathBuf,
        #[arg(long)]
        class: usize,
    },
    /// List the measures of clopen sets determined by one level.
    Enumerate {
        file: PathBuf,
        #[arg(long)]
        class: usize,
        #[arg(long)]
        level: usize,
    },
    /// Compare the clopen values sets of two measures.
    Equal {
        file_a: PathBuf,
        #[arg(long)]
        class_a: usize,
        file_b: PathBuf,
        #[arg(long)]
        class_b: usize,
    },
    /// Build diagrams realizing a given values set.
    #[command(subcommand)]
    Construct(Construct),
}

#[derive(Subcommand)]
enum Construct {
    /// Diagram whose measure has values {m / (q lambda^N)}.
    Rational {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        lambda: u64,
        #[arg(long, default_value_t = 0)]
        i: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Add a minimal component below a good measure with irrational lambda.
    Extend {
        file: PathBuf,
        #[arg(long)]
        class: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Simple diagram carrying a measure with the same values set.
    Simplify {
        file: PathBuf,
        #[arg(long)]
        class: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args)]
struct OutArg {
    /// Write the diagram here and the verification record next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Lib(Option<PathBuf>, Error),
    Verification(String),
}

type CmdResult = Result<(), Failure>;

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Input(_) => 2,
        Failure::Lib(_, e) => match e {
            Error::Json(_)
            | Error::InvalidDiagram(_)
            | Error::Expr(_)
            | Error::UnknownClass(_)
            | Error::VertexOutOfRange { .. }
            | Error::FieldMismatch(_)
            | Error::InfiniteMeasureUnsupported(_)
            | Error::Precondition(_)
            | Error::TooLarge { .. }
            | Error::EnumerationTooLarge { .. } => 2,
            Error::SearchFailed { .. } => 3,
            _ => 1,
        },
        Failure::Verification(_) => 1,
    }
}

fn message(f: &Failure) -> String {
    match f {
        Failure::Input(m) => m.clone(),
        Failure::Lib(Some(p), e) => format!("{}: {e}", p.display()),
        Failure::Lib(None, e) => e.to_string(),
        Failure::Verification(m) => m.clone(),
    }
}

fn lib(e: Error) -> Failure {
    Failure::Lib(None, e)
}

fn load(path: &Path) -> Result<Diagram, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: cannot read file: {e}", path.display())))?;
    Diagram::parse(&text).map_err(|e| Failure::Lib(Some(path.to_path_buf()), e))
}

fn load_measure(path: &Path, class: usize) -> Result<ErgodicMeasure, Failure> {
    let d = load(path)?;
    build_measure(&d, class).map_err(|e| Failure::Lib(Some(path.to_path_buf()), e))
}

fn emit(json_mode: bool, v: &Value, text: impl FnOnce(&Value) -> String) {
    if json_mode {
        print!("{}", report::to_pretty(v));
    } else {
        print!("{}", text(v));
    }
}

fn s(v: &Value) -> String {
    match v {
        Value::String(x) => x.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn list(v: &Value) -> String {
    v.as_array()
        .map(|a| a.iter().map(s).collect::<Vec<_>>().join(", "))
        .unwrap_or_default()
}

fn yes(v: &Value) -> &'static str {
    if v.as_bool() == Some(true) {
        "yes"
    } else {
        "no"
    }
}

fn analyze_text(r: &Value) -> String {
    let mut out = String::new();
    if let Some(name) = r["diagram"].get("name") {
        out.push_str(&format!("diagram {}\n", s(name)));
    }
    out.push_str(&format!(
        "{} vertices, {} classes, {} minimal components\n",
        r["size"],
        r["classes"].as_array().map_or(0, Vec::len),
        r["minimal_components"]
    ));
    out.push_str(&format!("block-triangular order: [{}]\n\nclasses\n", list(&r["permutation"])));
    for c in r["classes"].as_array().into_iter().flatten() {
        let mut flags = Vec::new();
        for f in ["trivial", "minimal", "initial", "distinguished"] {
            if c[f].as_bool() == Some(true) {
                flags.push(f);
            }
        }
        out.push_str(&format!(
            "  {}: vertices [{}], rho ~ {} (root of {}), {}; measure: {}\n",
            c["id"],
            list(&c["members"]),
            s(&c["perron"]["approx"]),
            s(&c["perron"]["minpoly"]),
            flags.join(", "),
            s(&c["measure"]),
        ));
    }
    for m in r["measures"].as_array().into_iter().flatten() {
        out.push_str(&format!(
            "\nmeasure of class {}\n  lambda ~ {} (root of {} in [{}])\n  support [{}]\n  reduced vector:\n",
            m["class"],
            s(&m["lambda"]["approx"]),
            s(&m["lambda"]["minpoly"]),
            list(&m["lambda"]["interval"]),
            list(&m["support"]),
        ));
        let support = m["support"].as_array().cloned().unwrap_or_default();
        for (v, x) in support.iter().zip(m["reduced_vector"].as_array().into_iter().flatten()) {
            out.push_str(&format!("    x_{v} = {} ~ {}\n", s(&x["value"]), s(&x["approx"])));
        }
        out.push_str(&good_text(&m["goodness"]));
        if !m["rational"].is_null() {
            let r = &m["rational"];
            out.push_str(&format!(
                "  rational form: q = {}, p = [{}]\n  Bernoulli type: {}\n  multiplicative: {}\n  quotient witness: {} is not a value\n",
                r["q"],
                list(&r["p"]),
                match r["bernoulli_type"].as_bool() {
                    Some(true) => "yes",
                    Some(false) => "no",
                    None => "n/a (not good)",
                },
                yes(&r["multiplicative"]),
                s(&r["quotient_witness"]["value"]),
            ));
        }
    }
    out
}

fn good_text(g: &Value) -> String {
    let mut out = format!(
        "  good: {} (branch {})\n",
        yes(&g["good"]),
        s(&g["branch"])
    );
    if g["good"].as_bool() == Some(true) {
        out.push_str(&format!("    certificate exponent R = {}\n", g["exponent"]));
        for e in g["expansions"].as_array().into_iter().flatten() {
            out.push_str(&format!(
                "    lambda^R x_{} = combination [{}] of the class entries\n",
                e["vertex"],
                list(&e["coefficients"])
            ));
        }
    } else {
        if !g["residual"].is_null() {
            out.push_str(&format!(
                "    gcd of class numerators {} has residual {} after removing primes of lambda\n",
                g["alpha_gcd"], g["residual"]
            ));
        }
        if !g["failing_vertex"].is_null() {
            out.push_str(&format!(
                "    orbit of vertex {} cycles without reaching the class lattice\n",
                g["failing_vertex"]
            ));
        }
    }
    out
}

fn member_text(v: &Value) -> String {
    let c = &v["certificate"];
    let why = match c["kind"].as_str() {
        Some("out-of-range") => "value lies outside [0, 1]".to_string(),
        Some("expansion") => format!(
            "lambda^{} * value = combination [{}] of the reduced vector",
            c["exponent"],
            list(&c["coefficients"])
        ),
        _ => format!(
            "fractional lattice coordinates cycle with period {}",
            c["states"].as_array().map_or(0, |a| a.len() - 1) - c["cycle_start"].as_u64().unwrap_or(0) as usize
        ),
    };
    format!("member: {}\n  {why}\n", yes(&v["member"]))
}

fn construction_text(v: &Value) -> String {
    let ver = &v["verification"];
    let d = &v["details"];
    let mut out = String::new();
    if let Some(rows) = v["diagram"]["incidence"].as_array() {
        out.push_str(&format!("diagram with {} vertices\n", rows.len()));
        for r in rows {
            out.push_str(&format!("  [{}]\n", list(r)));
        }
    }
    out.push_str(&format!(
        "construction: {}, measure on class {}, lambda ~ {} (root of {})\n",
        s(&d["kind"]),
        v["class_id"],
        s(&v["measure"]["lambda"]["approx"]),
        s(&v["measure"]["lambda_minpoly"]),
    ));
    out.push_str(&verification_text(ver));
    out
}

fn verification_text(ver: &Value) -> String {
    format!(
        "verification:\n  same values set: {}\n  good: {}\n  eigen identity: {}\n  minimal components: {} (expected {})\n",
        yes(&ver["group_equal"]),
        yes(&ver["is_good"]),
        yes(&ver["eigen_identity"]),
        ver["minimal_components"],
        ver["expected_minimal_components"],
    )
}

fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.verification.json"))
}

fn finish_construction(cli: &Cli, res: &ConstructionResult, out: &OutArg) -> CmdResult {
    let full = report::construction_value(res);
    if let Some(path) = &out.out {
        let write = |p: &Path, text: String| {
            fs::write(p, text)
                .map_err(|e| Failure::Input(format!("{}: cannot write file: {e}", p.display())))
        };
        write(path, res.diagram.to_json())?;
        let side = sidecar_path(path);
        write(&side, report::to_pretty(&report::construction_sidecar(res)))?;
        if cli.json {
            print!(
                "{}",
                report::to_pretty(&json!({
                    "diagram_file": path.display().to_string(),
                    "verification_file": side.display().to_string(),
                    "verification": full["verification"].clone(),
                }))
            );
        } else {
            print!(
                "wrote {} and {}\n{}",
                path.display(),
                side.display(),
                verification_text(&full["verification"])
            );
        }
    } else {
        emit(cli.json, &full, construction_text);
    }
    if !res.verification.all_ok() {
        let v = &res.verification;
        return Err(Failure::Verification(format!(
            "verification failed: {} minimal components, expected {}",
            v.minimal_components, v.expected_minimal_components
        )));
    }
    Ok(())
}

fn run(cli: &Cli) -> CmdResult {
    let budgets = Budgets {
        max_r: cli.max_r,
        max_n: cli.max_n,
        coeff_bound: cli.coeff_bound,
    };
    match &cli.command {
        Command::Analyze { file } => {
            let d = load(file)?;
            let r = report::analyze(&d).map_err(|e| Failure::Lib(Some(file.clone()), e))?;
            emit(cli.json, &r, analyze_text);
        }
        Command::Member { file, class, value } => {
            let mu = load_measure(file, *class)?;
            let v = parse_value(&mu, value).map_err(lib)?;
            let verdict = member_s(&mu, &v).map_err(lib)?;
            emit(cli.json, &report::membership_value(&verdict), member_text);
        }
        Command::Good { file, class } => {
            let mu = load_measure(file, *class)?;
            let g = is_good(&mu).map_err(lib)?;
            emit(cli.json, &report::goodness_value(&g), good_text);
        }
        Command::Enumerate { file, class, level } => {
            if *level == 0 {
                return Err(Failure::Input("levels are numbered from 1".into()));
            }
            let mu = load_measure(file, *class)?;
            let vals = enumerate_level_values(&mu, *level, cli.enum_budget).map_err(lib)?;
            let v = json!({
                "level": level,
                "count": vals.len(),
                "values": vals.iter().map(report::element_value).collect::<Vec<_>>(),
            });
            emit(cli.json, &v, |v| {
                let mut out = format!("{} values at level {}\n", v["count"], v["level"]);
                for x in v["values"].as_array().into_iter().flatten() {
                    out.push_str(&format!("  {} ~ {}\n", s(&x["value"]), s(&x["approx"])));
                }
                out
            });
        }
        Command::Equal {
            file_a,
            class_a,
            file_b,
            class_b,
        } => {
            let a = load_measure(file_a, *class_a)?;
            let b = load_measure(file_b, *class_b)?;
            let e = group_equal(&a, &b).map_err(lib)?;
            emit(cli.json, &report::equality_value(&e), |v| {
                format!("equal: {}\n  {}\n", yes(&v["equal"]), s(&v["reason"]))
            });
        }
        Command::Construct(c) => {
            let (res, out) = match c {
                Construct::Rational { q, lambda, i, out } => {
                    (build_rational_family(*q, *lambda, *i).map_err(lib)?, out)
                }
                Construct::Extend { file, class, out } => {
                    let mu = load_measure(file, *class)?;
                    (extend_with_minimal_component(&mu, &budgets).map_err(lib)?, out)
                }
                Construct::Simplify { file, class, out } => {
                    let mu = load_measure(file, *class)?;
                    (collapse_to_simple(&mu, &budgets).map_err(lib)?, out)
                }
            };
            finish_construction(cli, &res, out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", message(&f));
            ExitCode::from(exit_code(&f))
        }
    }
}
