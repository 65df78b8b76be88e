//! Command-line front end: subcommands `matrix`, `zeta`, `verify`,
//! `hypergeom`, `invertibility`, `battery`.  JSON is the machine
//! contract; plain text renders the same report objects.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hwzeta::battery::{run_battery, standard_instances, BatteryConfig};
use hwzeta::error::{Error, Result};
use hwzeta::hwmatrix::{char_poly_rev, frobenius_product, symbolic_matrix};
use hwzeta::instance::HypersurfaceSpec;
use hwzeta::lattice::IndexSubset;
use hwzeta::poly::SparseModPoly;
use hwzeta::verify::{
    check_box_suite, check_congruence, check_divisible_case, check_euler_suite,
    check_generic_invertibility, check_hw_oracle, check_main_congruence,
    constant_term_separation, InstanceEcho, Report,
};
use hwzeta::zeta::{
    default_order, p_series, point_counts, scale_and_reduce, zeta_series, DEFAULT_ENUM_GUARD,
};

#[derive(Parser)]
#[command(
    name = "hwzeta",
    about = "Generalized Hasse-Witt matrices and mod-p zeta congruences \
             for projective hypersurfaces over finite fields"
)]
struct Cli {
    /// Number of worker threads (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Emit the report as JSON
    #[arg(long)]
    json: bool,

    /// Bound on points visited by counting strategies
    #[arg(long, default_value_t = DEFAULT_ENUM_GUARD)]
    guard: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Print the symbolic Hasse-Witt matrix and det(I - tM)
    Matrix {
        instance: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Point counts N_1..N_K and the P-series (exact and mod p)
    Zeta {
        instance: PathBuf,
        /// Series truncation order (default |U^S_min| + 3)
        #[arg(long, short = 'K')]
        series_order: Option<usize>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run theorem-level checks on an instance
    Verify {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = CheckKind::All)]
        check: CheckKind,
        #[arg(long, short = 'K')]
        series_order: Option<usize>,
        /// Schwartz-Zippel trial count
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Seed for randomized sub-checks
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Euler- and box-operator annihilation checks
    Hypergeom {
        instance: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Generic-invertibility suite for the full-monomial arrangement
    Invertibility {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        p: u64,
        /// Members of the index set I (default: all of 0..=n)
        #[arg(long, value_delimiter = ',')]
        members: Option<Vec<usize>>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the acceptance battery (built-in seeded instances, or a
    /// directory of instance files)
    Battery {
        /// Directory of .hw instance files (default: built-in battery)
        dir: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Main,
    Divisible,
    HwOracle,
    Euler,
    Box,
    Invertibility,
    All,
}

fn load_instance(path: &PathBuf) -> Result<HypersurfaceSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let spec = HypersurfaceSpec::parse(&text)?;
    for w in spec.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(spec)
}

fn poly_json(poly: &SparseModPoly) -> Value {
    let terms: Vec<Value> = poly
        .terms()
        .map(|(e, c)| json!({ "exponents": e, "coeff": c }))
        .collect();
    json!(terms)
}

fn fmt_poly_t(coeffs: &[u64]) -> String {
    let mut parts = Vec::new();
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        parts.push(match (i, c) {
            (0, c) => format!("{c}"),
            (1, 1) => "t".to_string(),
            (1, c) => format!("{c}*t"),
            (i, 1) => format!("t^{i}"),
            (i, c) => format!("{c}*t^{i}"),
        });
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

fn print_report(r: &Report) {
    let status = if r.pass { "PASS" } else { "FAIL" };
    println!("check {:<28} {status}", r.check);
    for n in &r.notes {
        println!("    note: {n}");
    }
    if let Some(w) = &r.witness {
        println!("    witness: {w}");
    }
}

fn cmd_matrix(instance: &PathBuf, common: &CommonOpts) -> Result<bool> {
    let spec = load_instance(instance)?;
    let s = IndexSubset::full(spec.n);
    let sym = symbolic_matrix(&spec, &s)?;
    let det = char_poly_rev(spec.field(), &frobenius_product(&spec, &s)?)?;
    if common.json {
        let entries: Vec<Vec<Value>> = sym
            .entries
            .iter()
            .map(|row| row.iter().map(poly_json).collect())
            .collect();
        let out = json!({
            "instance": InstanceEcho::of(&spec),
            "u_min": sym.umin,
            "symbolic_matrix": entries,
            "det_I_minus_tM": det,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("serialize"));
    } else {
        println!("U^S_min ({} points):", sym.umin.len());
        for u in &sym.umin {
            println!("  {u:?}");
        }
        println!("symbolic matrix mod {}:", spec.p);
        for (i, row) in sym.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                println!("  A[{i}][{j}] = {e}");
            }
        }
        println!("det(I - tM) = {}", fmt_poly_t(&det));
    }
    Ok(true)
}

fn cmd_zeta(instance: &PathBuf, series_order: Option<usize>, common: &CommonOpts) -> Result<bool> {
    let spec = load_instance(instance)?;
    let k = series_order.unwrap_or_else(|| default_order(&spec));
    if k < 1 {
        return Err(Error::Input("series order must be >= 1".into()));
    }
    let counts = point_counts(&spec, k, common.guard)?;
    let z = zeta_series(&counts)?;
    let ps = p_series(&z, spec.q(), spec.n);
    let reduced = scale_and_reduce(&ps, spec.q(), spec.p, spec.mu())?;
    if common.json {
        let out = json!({
            "instance": InstanceEcho::of(&spec),
            "series_order": k,
            "point_counts": counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "p_series_exact": ps.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "p_series_rescaled_mod_p": reduced.coeffs,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("serialize"));
    } else {
        for (i, c) in counts.iter().enumerate() {
            println!("N_{} = {c}", i + 1);
        }
        println!(
            "P-series (exact): {}",
            ps.coeffs
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
        println!(
            "P(q^-mu t) mod {}: {}",
            spec.p,
            fmt_poly_t(&reduced.coeffs)
        );
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    instance: &PathBuf,
    check: CheckKind,
    series_order: Option<usize>,
    trials: usize,
    seed: u64,
    common: &CommonOpts,
) -> Result<bool> {
    let spec = load_instance(instance)?;
    let k = series_order.unwrap_or_else(|| default_order(&spec));
    let s = IndexSubset::full(spec.n);
    let mut reports = Vec::new();
    match check {
        CheckKind::Main => reports.push(check_main_congruence(&spec, k, common.guard)?),
        CheckKind::Divisible => reports.push(check_divisible_case(&spec, k, common.guard)?),
        CheckKind::HwOracle => reports.push(check_hw_oracle(&spec)?),
        CheckKind::Euler => reports.push(check_euler_suite(&spec)?),
        CheckKind::Box => reports.push(check_box_suite(&spec)?),
        CheckKind::Invertibility => {
            reports.push(check_generic_invertibility(
                spec.n, spec.d, &s, spec.p, trials, seed,
            )?);
        }
        CheckKind::All => {
            reports.push(check_congruence(&spec, k, common.guard)?);
            reports.push(check_euler_suite(&spec)?);
            reports.push(check_box_suite(&spec)?);
            if spec.mu() == 0 {
                reports.push(check_hw_oracle(&spec)?);
            }
            reports.push(check_generic_invertibility(
                spec.n, spec.d, &s, spec.p, trials, seed,
            )?);
        }
    }
    emit_reports(&reports, common.json);
    Ok(reports.iter().all(|r| r.pass))
}

fn cmd_hypergeom(instance: &PathBuf, common: &CommonOpts) -> Result<bool> {
    let spec = load_instance(instance)?;
    let reports = vec![check_euler_suite(&spec)?, check_box_suite(&spec)?];
    emit_reports(&reports, common.json);
    Ok(reports.iter().all(|r| r.pass))
}

fn cmd_invertibility(
    n: usize,
    d: u64,
    p: u64,
    members: Option<Vec<usize>>,
    trials: usize,
    seed: u64,
    common: &CommonOpts,
) -> Result<bool> {
    if members.iter().flatten().any(|&i| i > n) {
        return Err(Error::Input(format!("index set member out of range 0..={n}")));
    }
    let i_set = match &members {
        Some(m) => IndexSubset::from_members(n, m),
        None => IndexSubset::full(n),
    };
    let mut reports = vec![check_generic_invertibility(n, d, &i_set, p, trials, seed)?];
    match constant_term_separation(n, d, &i_set, p) {
        Ok(r) => reports.push(r),
        Err(Error::GuardExceeded(msg)) => {
            eprintln!("note: constant-term separation skipped: {msg}");
        }
        Err(e) => return Err(e),
    }
    emit_reports(&reports, common.json);
    Ok(reports.iter().all(|r| r.pass))
}

fn cmd_battery(dir: Option<&PathBuf>, seed: u64, common: &CommonOpts) -> Result<bool> {
    let instances = match dir {
        None => standard_instances(seed)?,
        Some(dir) => {
            let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
                .map_err(|e| Error::Input(format!("cannot read {}: {e}", dir.display())))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().map_or(false, |x| x == "hw"))
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(Error::Input(format!(
                    "no .hw instance files in {}",
                    dir.display()
                )));
            }
            files
                .into_iter()
                .map(|f| {
                    let key = f
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default();
                    load_instance(&f).map(|spec| (key, spec))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let cfg = BatteryConfig {
        seed,
        enum_guard: common.guard,
    };
    let summary = run_battery(&instances, &cfg)?;
    if common.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&summary).expect("serialize")
        );
    } else {
        println!("{:<20} {:<6} checks", "instance", "pass");
        for item in &summary.items {
            let checks: Vec<String> = item
                .checks
                .iter()
                .map(|c| {
                    format!("{}{}", c.check, if c.pass { "" } else { "(FAIL)" })
                })
                .collect();
            println!(
                "{:<20} {:<6} {}",
                item.key,
                if item.pass { "PASS" } else { "FAIL" },
                checks.join(", ")
            );
        }
        println!(
            "total {} instances, {} failed",
            summary.total, summary.failed
        );
    }
    Ok(summary.all_pass())
}

fn emit_reports(reports: &[Report], as_json: bool) {
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(&reports).expect("serialize")
        );
    } else {
        for r in reports {
            print_report(r);
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(workers) = cli.workers {
        if workers < 1 {
            return Err(Error::Input("worker count must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Error::Input(format!("cannot configure worker pool: {e}")))?;
    }
    match &cli.command {
        Command::Matrix { instance, common } => cmd_matrix(instance, common),
        Command::Zeta {
            instance,
            series_order,
            common,
        } => cmd_zeta(instance, *series_order, common),
        Command::Verify {
            instance,
            check,
            series_order,
            trials,
            seed,
            common,
        } => cmd_verify(instance, *check, *series_order, *trials, *seed, common),
        Command::Hypergeom { instance, common } => cmd_hypergeom(instance, common),
        Command::Invertibility {
            n,
            d,
            p,
            members,
            trials,
            seed,
            common,
        } => cmd_invertibility(*n, *d, *p, members.clone(), *trials, *seed, common),
        Command::Battery { dir, seed, common } => cmd_battery(dir.as_ref(), *seed, common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
