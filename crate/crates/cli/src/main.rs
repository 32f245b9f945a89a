//! Command-line front end: verify designs and difference matrices, run
//! construction recipes, print information-matrix spectra, browse the
//! bundled parameter catalog, and convert matrix encodings.
//!
//! Exit codes are a stable contract: 0 when the checked property holds,
//! 1 when a well-formed input fails it, 2 on usage or parse errors.

mod catalog;
mod io;
mod recipe;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use sbbd_core::incidence::{
    bose_connor_check, verify_difference_matrix, verify_gdd, verify_r_lambda, GroupedDesign,
};
use sbbd_core::optimality::{cs2_eigenvalues, e_optimal_gdd, numeric_eigenvalues};
use sbbd_core::sbbd::{verify_sbbd, DesignMatrix, SbbdParams, SbbdResult, DEFAULT_BUDGET};
use sbbd_core::Verdict;

use io::MatrixFormat;
use recipe::{Execution, Recipe};

#[derive(Parser)]
#[command(
    name = "sbbd",
    version,
    about = "construct and verify spanning bipartite block designs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a design, difference matrix, or design matrix file
    Verify {
        /// What the file claims to be
        #[arg(long, value_enum)]
        kind: VerifyKind,
        file: PathBuf,
        /// Left vertex count (design matrices only)
        #[arg(long)]
        v1: Option<usize>,
        /// Right vertex count (design matrices only)
        #[arg(long)]
        v2: Option<usize>,
        /// Machine-readable report
        #[arg(long)]
        json: bool,
    },
    /// Run a construction recipe and write the design artifacts
    Construct {
        recipe: PathBuf,
        /// Output directory, created if missing
        #[arg(long, short, default_value = ".")]
        out: PathBuf,
        /// Search for a spanning repair if the raw construction fails it
        #[arg(long)]
        repair_spanning: bool,
        /// Node budget for partition and repair searches
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        seed_budget: u64,
        /// Print the run report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Print an information-matrix spectrum and the E-certificate
    Eigen {
        /// Λ as four comma-separated integers: μ,λ12,λ21,λ22
        #[arg(long, conflicts_with = "design", required_unless_present = "design")]
        lambda: Option<String>,
        /// 0/1 design matrix file to classify and analyze
        #[arg(long)]
        design: Option<PathBuf>,
        /// Left vertex count
        #[arg(long)]
        v1: usize,
        /// Right vertex count
        #[arg(long)]
        v2: usize,
        /// Machine-readable report
        #[arg(long)]
        json: bool,
    },
    /// List or check the bundled parameter catalog
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Convert a 0/1 matrix between text, hex, and JSON encodings
    Export {
        /// Input encoding (default: by extension)
        #[arg(long, value_enum)]
        from: Option<MatrixFormat>,
        /// Output encoding (default: by extension)
        #[arg(long, value_enum)]
        to: Option<MatrixFormat>,
        input: PathBuf,
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Print every catalog entry
    List {
        #[arg(long)]
        json: bool,
    },
    /// Recheck the BIBD identities and print each row's predicted Λ
    Check {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VerifyKind {
    /// (r,λ)-design: constant replication and pair concurrence
    Rlambda,
    /// Group divisible design
    Gdd,
    /// Difference matrix over a finite abelian group
    Dm,
    /// Design matrix of a spanning bipartite block design
    Sbbd,
}

fn main() -> ExitCode {
    // Die quietly when the consumer closes the pipe (`sbbd catalog list
    // | head`) instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Verify {
            kind,
            file,
            v1,
            v2,
            json,
        } => cmd_verify(kind, &file, v1, v2, json),
        Command::Construct {
            recipe,
            out,
            repair_spanning,
            seed_budget,
            json,
        } => cmd_construct(&recipe, &out, repair_spanning, seed_budget, json),
        Command::Eigen {
            lambda,
            design,
            v1,
            v2,
            json,
        } => cmd_eigen(lambda.as_deref(), design.as_deref(), v1, v2, json),
        Command::Catalog { action } => cmd_catalog(action),
        Command::Export {
            from,
            to,
            input,
            output,
        } => cmd_export(from, to, &input, &output),
    }
}

// ---- verify ----------------------------------------------------------

fn cmd_verify(
    kind: VerifyKind,
    file: &Path,
    v1: Option<usize>,
    v2: Option<usize>,
    json: bool,
) -> Result<u8> {
    match kind {
        VerifyKind::Rlambda => verify_rlambda_file(file, json),
        VerifyKind::Gdd => verify_gdd_file(file, json),
        VerifyKind::Dm => verify_dm_file(file, json),
        VerifyKind::Sbbd => {
            let (Some(v1), Some(v2)) = (v1, v2) else {
                bail!("--v1 and --v2 are required with --kind sbbd");
            };
            verify_sbbd_file(file, v1, v2, json)
        }
    }
}

fn verify_rlambda_file(file: &Path, json: bool) -> Result<u8> {
    let design = io::load_design(file)?;
    let h = design.incidence()?;
    match verify_r_lambda(&h)? {
        Verdict::Pass(p) => {
            let k_set: Vec<usize> = p.k_set.iter().copied().collect();
            if json {
                print_json(&json!({
                    "kind": "rlambda",
                    "verdict": "pass",
                    "params": {"r": p.r, "lambda": p.lambda, "k_set": k_set},
                }));
            } else {
                println!("(r,λ)-design: pass");
                println!("  r = {}, λ = {}, block sizes {:?}", p.r, p.lambda, k_set);
            }
            Ok(0)
        }
        Verdict::Fail(v) => {
            report_fail("rlambda", &v.to_string(), json);
            Ok(1)
        }
    }
}

fn verify_gdd_file(file: &Path, json: bool) -> Result<u8> {
    let design = io::load_design(file)?;
    let Some(groups) = design.groups.clone() else {
        bail!("--kind gdd needs a \"groups\" field in the design file");
    };
    let grouped = GroupedDesign::new(design.incidence()?, groups)?;
    match verify_gdd(&grouped)? {
        Verdict::Pass(p) => {
            let bose = if p.k_set.len() == 1 {
                match bose_connor_check(&p, grouped.incidence().rows())? {
                    Verdict::Pass(()) => "pass".to_string(),
                    Verdict::Fail(v) => format!("fail: {v}"),
                }
            } else {
                "skipped (non-constant block size)".to_string()
            };
            let cert = e_optimal_gdd(&p);
            let k_set: Vec<usize> = p.k_set.iter().copied().collect();
            if json {
                print_json(&json!({
                    "kind": "gdd",
                    "verdict": "pass",
                    "params": {
                        "r": p.r, "lambda1": p.lambda1, "lambda2": p.lambda2,
                        "m": p.m, "g": p.g, "k_set": k_set,
                    },
                    "bose_connor": bose,
                    "e_certificate": cert,
                }));
            } else {
                println!("group divisible design: pass");
                println!(
                    "  λ1 = {}, λ2 = {}, r = {}, {} groups of {}, block sizes {:?}",
                    p.lambda1, p.lambda2, p.r, p.m, p.g, k_set
                );
                println!("  Bose-Connor necessary conditions: {bose}");
                println!("  E-certificate (λ2 = λ1 + 1): {}", yes_no(cert));
            }
            Ok(0)
        }
        Verdict::Fail(v) => {
            report_fail("gdd", &v.to_string(), json);
            Ok(1)
        }
    }
}

fn verify_dm_file(file: &Path, json: bool) -> Result<u8> {
    let dm_file = io::load_dm(file)?;
    let (ctx, rows) = dm_file.decode()?;
    match verify_difference_matrix(&ctx.group, &rows)? {
        Verdict::Pass(dm) => {
            if json {
                print_json(&json!({
                    "kind": "dm",
                    "verdict": "pass",
                    "params": {"b": dm.b(), "s": dm.s(), "eta": dm.eta(), "group": ctx.name},
                }));
            } else {
                println!("difference matrix: pass");
                println!(
                    "  (b, s; η) = ({}, {}; {}) over {}",
                    dm.b(),
                    dm.s(),
                    dm.eta(),
                    ctx.name
                );
            }
            Ok(0)
        }
        Verdict::Fail(v) => {
            report_fail("dm", &v.to_string(), json);
            Ok(1)
        }
    }
}

fn verify_sbbd_file(file: &Path, v1: usize, v2: usize, json: bool) -> Result<u8> {
    let entries = io::read_matrix(file, io::infer_format(file))?;
    let x = DesignMatrix::new(entries, v1, v2)?;
    let result = verify_sbbd(&x)?;
    let pass = result.classification.is_pass() && result.spanning.passes();
    if json {
        print_json(&json!({
            "kind": "sbbd",
            "verdict": if pass { "pass" } else { "fail" },
            "class": result.class().to_string(),
            "v1": v1, "v2": v2, "n": x.n(),
            "lambda": result.params().map(lambda_array),
            "gdd_type": result.params().map(SbbdParams::is_gdd_type),
            "classification_violation":
                result.classification.fail().map(ToString::to_string),
            "spanning": spanning_json(&result),
        }));
    } else {
        println!("classification: {}", class_summary(&result));
        if let Some(p) = result.params() {
            println!("GDD-type (λ21 = λ22): {}", yes_no(p.is_gdd_type()));
        }
        println!("{}", result.spanning);
    }
    Ok(if pass { 0 } else { 1 })
}

fn report_fail(kind: &str, violation: &str, json: bool) {
    if json {
        print_json(&json!({"kind": kind, "verdict": "fail", "violation": violation}));
    } else {
        let label = match kind {
            "rlambda" => "(r,λ)-design",
            "gdd" => "group divisible design",
            "dm" => "difference matrix",
            other => other,
        };
        println!("{label}: fail");
        println!("  {violation}");
    }
}

// ---- construct -------------------------------------------------------

fn cmd_construct(
    recipe_path: &Path,
    out: &Path,
    repair: bool,
    budget: u64,
    json: bool,
) -> Result<u8> {
    let text = io::read_file(recipe_path)?;
    let parsed: Recipe = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a recipe", recipe_path.display()))?;
    let exec = recipe::execute(&parsed, repair, budget)?;

    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let design_name = "design_matrix.txt";
    let info_name = "info_matrix.txt";
    fs::write(
        out.join(design_name),
        io::format_text_matrix(exec.result.design.entries()),
    )?;
    fs::write(out.join(info_name), io::format_int_matrix(&exec.result.info))?;
    let report = run_report(&exec, design_name, info_name);
    fs::write(
        out.join("result.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;

    if json {
        print_json(&report);
    } else {
        print_run_summary(&exec, out);
    }
    Ok(if exec.result.classification.is_pass() && exec.result.spanning.passes() {
        0
    } else {
        1
    })
}

fn run_report(exec: &Execution, design_name: &str, info_name: &str) -> serde_json::Value {
    let d = &exec.result.design;
    json!({
        "route": exec.route.name(),
        "v1": d.v1(), "v2": d.v2(), "n": d.n(),
        "class": exec.result.class().to_string(),
        "lambda": exec.result.params().map(lambda_array),
        "classification_violation":
            exec.result.classification.fail().map(ToString::to_string),
        "spanning": spanning_json(&exec.result),
        "formula_lambda": exec.formula.as_ref().map(lambda_array),
        "agrees_with_formula": exec.agrees_with_formula,
        "replications": exec.replications,
        "sufficiency": exec.sufficiency.as_ref().map(|s| json!({
            "b": s.b, "r": s.r, "s": s.s,
            "s_sufficient": s.s_sufficient,
            "min_distinct_labels": s.min_distinct_labels,
            "labels_sufficient": s.labels_sufficient,
        })),
        "gdd": exec.gdd_params.as_ref().map(|p| json!({
            "lambda1": p.lambda1, "lambda2": p.lambda2, "r": p.r,
            "m": p.m, "g": p.g,
            "k_set": p.k_set.iter().copied().collect::<Vec<_>>(),
            "e_certificate": e_optimal_gdd(p),
        })),
        "repair": {
            "requested": exec.repair.requested,
            "needed": exec.repair.needed,
            "outcome": exec.repair.outcome,
            "kind": exec.repair.kind,
            "witness": exec.repair.witness,
            "detail": exec.repair.detail,
        },
        "files": {"design_matrix": design_name, "information_matrix": info_name},
    })
}

fn print_run_summary(exec: &Execution, out: &Path) {
    let d = &exec.result.design;
    println!("route: {}", exec.route.name());
    println!("design: {} SB-blocks on K_{{{},{}}}", d.n(), d.v1(), d.v2());
    println!("classification: {}", class_summary(&exec.result));
    println!("{}", exec.result.spanning);
    if let (Some(formula), Some(computed)) = (&exec.formula, exec.result.params()) {
        if exec.agrees_with_formula == Some(false) {
            println!(
                "formula Λ = {formula} vs computed Λ = {computed}: stacked cells lower \
                 the diagonal half; the computed classification is authoritative"
            );
        } else {
            println!("formula Λ = {formula}; computed matrix matches");
        }
    }
    if let Some(reps) = &exec.replications {
        println!("cell replications: {reps:?}");
    }
    if let Some(s) = &exec.sufficiency {
        let b_minus_r = s.b as i64 - s.r as i64;
        println!(
            "coverage sufficiency: s = {} {} b - r = {}; min distinct labels {} (needs > {})",
            s.s,
            if s.s_sufficient { ">" } else { "<=" },
            b_minus_r,
            s.min_distinct_labels,
            b_minus_r,
        );
    }
    if let Some(p) = &exec.gdd_params {
        println!(
            "seed GDD: λ1 = {}, λ2 = {}, r = {}, {} groups of {}; E-certificate: {}",
            p.lambda1,
            p.lambda2,
            p.r,
            p.m,
            p.g,
            yes_no(e_optimal_gdd(p))
        );
    }
    match exec.repair.outcome {
        "not_requested" => {
            if exec.repair.needed {
                println!("repair: not requested; rerun with --repair-spanning");
            }
        }
        "not_needed" => println!("repair: not needed"),
        "applied" => {
            let witness = exec
                .repair
                .witness
                .as_ref()
                .map(|w| serde_json::to_string(w).expect("witness serializes"))
                .unwrap_or_default();
            let kind = exec.repair.kind.unwrap_or_default().replace('_', " ");
            println!("repair: applied {kind} {witness}");
        }
        _ => {
            println!(
                "repair: failed; {}",
                exec.repair.detail.as_deref().unwrap_or("no detail")
            );
        }
    }
    println!(
        "wrote {}/design_matrix.txt, info_matrix.txt, result.json",
        out.display()
    );
}

// ---- eigen -----------------------------------------------------------

fn cmd_eigen(
    lambda: Option<&str>,
    design: Option<&Path>,
    v1: usize,
    v2: usize,
    json: bool,
) -> Result<u8> {
    match (lambda, design) {
        (Some(text), None) => {
            let params = parse_lambda(text)?;
            eigen_report(&params, v1, v2, None, json)?;
            Ok(0)
        }
        (None, Some(path)) => {
            let entries = io::read_matrix(path, io::infer_format(path))?;
            let x = DesignMatrix::new(entries, v1, v2)?;
            let result = verify_sbbd(&x)?;
            match &result.classification {
                Verdict::Pass(params) => {
                    eigen_report(params, v1, v2, Some(&result), json)?;
                    Ok(0)
                }
                Verdict::Fail(violation) => {
                    let numeric = numeric_eigenvalues(&result.info)?;
                    let min_positive = numeric.iter().copied().find(|&v| {
                        let radius = numeric.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
                        v > 1e-9 * radius
                    });
                    if json {
                        print_json(&json!({
                            "classification_violation": violation.to_string(),
                            "numeric_min": numeric.first(),
                            "numeric_max": numeric.last(),
                            "numeric_min_positive": min_positive,
                        }));
                    } else {
                        println!("not an SBBD: {violation}");
                        println!(
                            "numeric spectrum only: min {:.6}, max {:.6}, smallest positive {}",
                            numeric.first().unwrap_or(&0.0),
                            numeric.last().unwrap_or(&0.0),
                            min_positive
                                .map(|v| format!("{v:.6}"))
                                .unwrap_or_else(|| "none".to_string()),
                        );
                    }
                    Ok(1)
                }
            }
        }
        _ => bail!("give exactly one of --lambda or --design"),
    }
}

fn eigen_report(
    params: &SbbdParams,
    v1: usize,
    v2: usize,
    verified: Option<&SbbdResult>,
    json: bool,
) -> Result<()> {
    let spectrum = cs2_eigenvalues(params, v1, v2)?;
    let deviation = match verified {
        Some(result) => {
            let exact = spectrum.expand();
            let numeric = numeric_eigenvalues(&result.info)?;
            let radius = exact.iter().fold(1i64, |a, &b| a.max(b.abs())) as f64;
            let max_dev = exact
                .iter()
                .zip(&numeric)
                .fold(0.0f64, |acc, (&e, &n)| acc.max((e as f64 - n).abs()));
            Some(max_dev / radius)
        }
        None => None,
    };
    let cert = e_certificate(params);
    if json {
        print_json(&json!({
            "v1": v1, "v2": v2,
            "lambda": lambda_array(params),
            "spectrum": spectrum.values().iter()
                .map(|&(value, mult)| json!({"value": value, "multiplicity": mult}))
                .collect::<Vec<_>>(),
            "side": spectrum.side(),
            "trace": spectrum.trace(),
            "min_positive": spectrum.min_positive(),
            "gdd_type": params.is_gdd_type(),
            "e_certificate": cert,
            "numeric_max_relative_deviation": deviation,
        }));
        return Ok(());
    }
    println!("information matrix spectrum for v1 = {v1}, v2 = {v2}, Λ = {params}:");
    println!("  {:>12}  multiplicity", "value");
    for &(value, mult) in spectrum.values() {
        println!("  {value:>12}  {mult}");
    }
    println!("side {}, trace {}", spectrum.side(), spectrum.trace());
    match spectrum.min_positive() {
        Some(v) => println!("smallest positive eigenvalue: {v}"),
        None => println!("smallest positive eigenvalue: none"),
    }
    if let Some(dev) = deviation {
        println!("numeric cross-check: max relative deviation {dev:.3e}");
    }
    println!("GDD-type (λ21 = λ22): {}", yes_no(params.is_gdd_type()));
    match cert {
        Some(flag) => println!("E-certificate (λ21 = λ12 + 1): {}", yes_no(flag)),
        None => println!("E-certificate: not applicable (λ21 ≠ λ22)"),
    }
    Ok(())
}

/// The λ2 = λ1 + 1 criterion read through the GDD correspondence
/// λ1 = λ12, λ2 = λ21; only meaningful for GDD-type parameters.
fn e_certificate(p: &SbbdParams) -> Option<bool> {
    p.is_gdd_type().then(|| p.lambda21 == p.lambda12 + 1)
}

fn parse_lambda(text: &str) -> Result<SbbdParams> {
    let parts: Vec<i64> = text
        .split(',')
        .map(|w| {
            w.trim()
                .parse()
                .with_context(|| format!("bad Λ entry {w:?}"))
        })
        .collect::<Result<_>>()?;
    let [mu, lambda12, lambda21, lambda22] = parts[..] else {
        bail!("--lambda needs exactly four integers μ,λ12,λ21,λ22");
    };
    Ok(SbbdParams {
        mu,
        lambda12,
        lambda21,
        lambda22,
    })
}

// ---- catalog ---------------------------------------------------------

fn cmd_catalog(action: CatalogAction) -> Result<u8> {
    let cat = catalog::load()?;
    match action {
        CatalogAction::List { json } => {
            if json {
                print_json(&json!({
                    "version": cat.version,
                    "description": cat.description,
                    "entries": cat.entries,
                }));
            } else {
                println!("{:>4} {:>4} {:>4} {:>4} {:>7}  remark", "v", "b", "r", "k", "λ");
                for e in &cat.entries {
                    println!(
                        "{:>4} {:>4} {:>4} {:>4} {:>7}  {}",
                        e.v, e.b, e.r, e.k, e.lambda, e.remark
                    );
                }
                println!("{} parameter sets", cat.entries.len());
            }
            Ok(0)
        }
        CatalogAction::Check { json } => {
            let mut all_ok = true;
            let mut rows = Vec::new();
            for e in &cat.entries {
                let ok = e.is_consistent();
                all_ok &= ok;
                let (cl, cr) = e.count_identity();
                let (pl, pr) = e.pair_identity();
                let predicted = e.predicted_lambda();
                if json {
                    rows.push(json!({
                        "entry": e,
                        "consistent": ok,
                        "predicted_lambda": predicted,
                    }));
                } else {
                    println!(
                        "({}, {}, {}, {}, {})  bk = vr: {cl} = {cr}; λ(v-1) = r(k-1): \
                         {pl} = {pr}; Λ = ({}, {}, {}, {})  {}",
                        e.v,
                        e.b,
                        e.r,
                        e.k,
                        e.lambda,
                        predicted[0],
                        predicted[1],
                        predicted[2],
                        predicted[3],
                        if ok { "ok" } else { "INCONSISTENT" },
                    );
                }
            }
            if json {
                print_json(&json!({"rows": rows, "all_consistent": all_ok}));
            } else if all_ok {
                println!("all {} rows satisfy the BIBD identities", cat.entries.len());
            } else {
                println!("some rows are inconsistent");
            }
            Ok(if all_ok { 0 } else { 1 })
        }
    }
}

// ---- export ----------------------------------------------------------

fn cmd_export(
    from: Option<MatrixFormat>,
    to: Option<MatrixFormat>,
    input: &Path,
    output: &Path,
) -> Result<u8> {
    let from = from.unwrap_or_else(|| io::infer_format(input));
    let to = to.unwrap_or_else(|| io::infer_format(output));
    let m = io::read_matrix(input, from)?;
    fs::write(output, io::write_matrix(&m, to)?)
        .with_context(|| format!("cannot write {}", output.display()))?;
    println!("wrote {} ({} x {})", output.display(), m.nrows(), m.ncols());
    Ok(0)
}

// ---- shared helpers --------------------------------------------------

fn lambda_array(p: &SbbdParams) -> Vec<i64> {
    p.as_array().to_vec()
}

fn class_summary(result: &SbbdResult) -> String {
    let d = &result.design;
    match &result.classification {
        Verdict::Pass(p) => {
            let tag = if result.spanning.passes() { "SBBD" } else { "SBBD*" };
            format!("{tag}({}, {}, {}; {p})", d.v1(), d.v2(), d.n())
        }
        Verdict::Fail(v) => format!("not an SBBD: {v}"),
    }
}

fn spanning_json(result: &SbbdResult) -> serde_json::Value {
    const CAP: usize = 16;
    let rep = &result.spanning;
    json!({
        "passes": rep.passes(),
        "zero_row_count": rep.zero_rows.len(),
        "uncovered_count": rep.uncovered.len(),
        "zero_rows": rep.zero_rows.iter().take(CAP)
            .map(|&(row, slab)| json!([row, slab])).collect::<Vec<_>>(),
        "uncovered": rep.uncovered.iter().take(CAP)
            .map(|&(row, vertex)| json!([row, vertex])).collect::<Vec<_>>(),
    })
}

fn yes_no(flag: bool) -> &'static str {
    if flag {
        "yes"
    } else {
        "no"
    }
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}
