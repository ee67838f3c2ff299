use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jqp::classify::{
    threshold_scan, ClassifyError, FramePolicy, ScanTarget, VerdictKind,
};
use jqp::report::{run_analysis, table_to_csv, AnalysisRequest, OutputFlags};
use jqp::states::{Family, StateSpec};
use jqp::table::DirectionSubset;

const EXIT_MALFORMED: u8 = 64;
const EXIT_INVALID_STATE: u8 = 65;
const EXIT_NO_SIGN_CHANGE: u8 = 66;
const EXIT_INTERNAL: u8 = 70;

/// Joint quasiprobability classicality and separability analyzer for
/// systems of up to three spin-1/2s.
#[derive(Parser)]
#[command(name = "jqp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Tolerance for counting an entry as non-negative
    /// (env JQP_DEFAULT_TOL overrides the built-in default 1e-10).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized frame policies.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for table computation (0 = automatic).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Write output to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct StateArgs {
    /// State specification: a path to a JSON document or an inline JSON
    /// object, e.g. '{"family":"werner","params":{"x":0.3}}'.
    #[arg(long)]
    state: String,
    /// Frame policy: canonical, grid:K or random:M.
    #[arg(long, default_value = "canonical")]
    policy: String,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a state and run the Peres test; the exit code encodes the
    /// verdict (0 classical-separable, 1 classical, 2 not identified).
    Analyze {
        #[command(flatten)]
        state: StateArgs,
        /// Include the full JQP table in the report.
        #[arg(long)]
        tables: bool,
    },
    /// Dump every sign assignment and its quasiprobability.
    Table {
        #[command(flatten)]
        state: StateArgs,
        /// Direction subset label, e.g. "abc;abc" or "ab;bc" (default full).
        #[arg(long)]
        subset: Option<String>,
    },
    /// Bisect a family parameter for the critical value of a monitored
    /// minimum (criterion stage or PPT eigenvalue).
    Scan {
        /// Family template as for analyze; the scanned parameter may be
        /// omitted from its params.
        #[arg(long)]
        state: String,
        /// Name of the parameter to scan.
        #[arg(long)]
        param: String,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        /// Monitored quantity: part_i, part_ii or ppt.
        #[arg(long)]
        target: String,
        /// Fixed direction subset for part_ii, e.g. "bc;bc".
        #[arg(long)]
        subset: Option<String>,
        /// Spins transposed by the ppt target (comma separated, default 2).
        #[arg(long, default_value = "2")]
        transpose: String,
        /// Bracket width to bisect down to.
        #[arg(long, default_value_t = 1e-9)]
        scan_tol: f64,
        /// Also write a parameter sweep CSV (parameter, stage minima, ppt
        /// minimum eigenvalue) with this many steps to --out.
        #[arg(long)]
        sweep_steps: Option<usize>,
    },
    /// List the built-in state families and their parameters.
    States,
}

fn parse_policy(s: &str, seed: u64) -> Result<FramePolicy, String> {
    if s == "canonical" {
        return Ok(FramePolicy::canonical());
    }
    if let Some(k) = s.strip_prefix("grid:") {
        let k: usize = k.parse().map_err(|_| format!("bad grid size in {s:?}"))?;
        return Ok(FramePolicy::grid(k));
    }
    if let Some(m) = s.strip_prefix("random:") {
        let m: usize = m.parse().map_err(|_| format!("bad sample count in {s:?}"))?;
        return Ok(FramePolicy::random(m, seed));
    }
    Err(format!("unknown policy {s:?} (expected canonical, grid:K or random:M)"))
}

fn load_state_spec(arg: &str) -> Result<StateSpec, String> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| format!("cannot read {arg}: {e}"))?
    };
    serde_json::from_str(&text).map_err(|e| format!("malformed state spec: {e}"))
}

fn default_tol(cli_tol: Option<f64>) -> f64 {
    cli_tol.unwrap_or_else(|| {
        std::env::var("JQP_DEFAULT_TOL")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(jqp::classify::CLASSIFY_TOL)
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.write_all(b"\n"))
                .map_err(|e| format!("cannot write to stdout: {e}"))
        }
    }
}

fn classify_error_exit(e: &ClassifyError) -> u8 {
    match e {
        ClassifyError::State(_) => EXIT_INVALID_STATE,
        ClassifyError::NoSignChange(_, _) => EXIT_NO_SIGN_CHANGE,
        _ => EXIT_INTERNAL,
    }
}

fn run(cli: Cli) -> Result<u8, (u8, String)> {
    if cli.workers > 0 {
        // ignore failure when a pool already exists (e.g. repeated calls in tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global();
    }
    let tol = default_tol(cli.tol);
    match cli.command {
        Command::Analyze { state, tables } => {
            let spec = load_state_spec(&state.state).map_err(|m| (EXIT_MALFORMED, m))?;
            let policy = parse_policy(&state.policy, cli.seed).map_err(|m| (EXIT_MALFORMED, m))?;
            let request = AnalysisRequest {
                state: spec,
                policy,
                tolerance: tol,
                outputs: OutputFlags {
                    tables,
                    ..OutputFlags::default()
                },
            };
            let report = run_analysis(&request)
                .map_err(|e| (classify_error_exit(&e), e.to_string()))?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            emit(&cli.out, &text).map_err(|m| (EXIT_INTERNAL, m))?;
            Ok(match report.verdict {
                VerdictKind::ClassicalSeparable => 0,
                VerdictKind::Classical => 1,
                VerdictKind::NotIdentified => 2,
            })
        }
        Command::Table { state, subset } => {
            let spec = load_state_spec(&state.state).map_err(|m| (EXIT_MALFORMED, m))?;
            let policy = parse_policy(&state.policy, cli.seed).map_err(|m| (EXIT_MALFORMED, m))?;
            let rho = spec.build().map_err(|e| (EXIT_INVALID_STATE, e.to_string()))?;
            let subset = match subset {
                Some(s) => DirectionSubset::parse(&s).map_err(|e| (EXIT_MALFORMED, e.to_string()))?,
                None => DirectionSubset::full(rho.n_spins()),
            };
            let frames = jqp::classify::candidate_frames(&rho, &policy)
                .map_err(|e| (classify_error_exit(&e), e.to_string()))?
                .into_iter()
                .next()
                .expect("policies yield at least one frame assignment");
            let dump = jqp::report::dump_table(&rho, &frames, &subset)
                .map_err(|e| (EXIT_INTERNAL, e.to_string()))?;
            let text = match cli.format {
                Format::Csv => table_to_csv(&dump),
                Format::Json => serde_json::to_string_pretty(&dump).expect("dump serializes"),
            };
            emit(&cli.out, &text).map_err(|m| (EXIT_INTERNAL, m))?;
            Ok(0)
        }
        Command::Scan {
            state,
            param,
            lo,
            hi,
            target,
            subset,
            transpose,
            scan_tol,
            sweep_steps,
        } => {
            let spec = load_state_spec(&state).map_err(|m| (EXIT_MALFORMED, m))?;
            let subset = subset
                .map(|s| DirectionSubset::parse(&s))
                .transpose()
                .map_err(|e| (EXIT_MALFORMED, e.to_string()))?;
            let target = match target.as_str() {
                "part_i" => ScanTarget::PartI,
                "part_ii" => ScanTarget::PartII { subset },
                "ppt" => {
                    let spins: Result<Vec<usize>, _> =
                        transpose.split(',').map(|s| s.trim().parse()).collect();
                    ScanTarget::Ppt {
                        transpose_spins: spins
                            .map_err(|_| (EXIT_MALFORMED, format!("bad --transpose {transpose:?}")))?,
                    }
                }
                other => {
                    return Err((
                        EXIT_MALFORMED,
                        format!("unknown target {other:?} (expected part_i, part_ii or ppt)"),
                    ))
                }
            };
            if let Some(steps) = sweep_steps {
                let text = sweep_csv(&spec, &param, lo, hi, steps)
                    .map_err(|e| (classify_error_exit(&e), e.to_string()))?;
                emit(&cli.out, &text).map_err(|m| (EXIT_INTERNAL, m))?;
                return Ok(0);
            }
            let result = threshold_scan(&spec, &param, (lo, hi), target, scan_tol)
                .map_err(|e| (classify_error_exit(&e), e.to_string()))?;
            let text = serde_json::to_string_pretty(&result).expect("result serializes");
            emit(&cli.out, &text).map_err(|m| (EXIT_INTERNAL, m))?;
            Ok(0)
        }
        Command::States => {
            let text = states_catalog();
            emit(&cli.out, &text).map_err(|m| (EXIT_INTERNAL, m))?;
            Ok(0)
        }
    }
}

fn sweep_csv(
    spec: &StateSpec,
    param: &str,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<String, ClassifyError> {
    let policy = FramePolicy::canonical();
    let mut out = String::from("parameter,part_i_min,part_ii_min,ppt_min_eigenvalue\n");
    let steps = steps.max(2);
    for i in 0..steps {
        let p = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
        let v1 = jqp::classify::scan_value(spec, param, p, &ScanTarget::PartI, &policy)?;
        let v2 = jqp::classify::scan_value(
            spec,
            param,
            p,
            &ScanTarget::PartII { subset: None },
            &policy,
        )?;
        let rho = spec.clone().with_param(param, p).build()?;
        let ppt = if rho.n_spins() >= 2 {
            jqp::classify::ppt_check(&rho, &[rho.n_spins()])?.min_eigenvalue
        } else {
            f64::NAN
        };
        out.push_str(&format!("{p:.15e},{v1:.15e},{v2:.15e},{ppt:.15e}\n"));
    }
    Ok(out)
}

fn states_catalog() -> String {
    #[derive(serde::Serialize)]
    struct Entry {
        family: &'static str,
        params: Vec<&'static str>,
        constraints: &'static str,
    }
    let entries = vec![
        Entry {
            family: Family::Werner.name(),
            params: vec!["x"],
            constraints: "0 <= x <= 1; singlet fraction x over maximally mixed background",
        },
        Entry {
            family: Family::PeresMix.name(),
            params: vec!["x"],
            constraints: "0 <= x <= 1; singlet fraction x mixed with |++><++|",
        },
        Entry {
            family: Family::BellDiagonal.name(),
            params: vec!["x0", "x1", "x2", "x3"],
            constraints: "xi >= 0, sum xi = 1; weights of the four Bell projectors",
        },
        Entry {
            family: Family::Gisin.name(),
            params: vec!["x", "alpha"],
            constraints: "0 <= x <= 1, |alpha| <= 1, beta = +sqrt(1 - alpha^2)",
        },
        Entry {
            family: Family::HorodeckiMix.name(),
            params: vec!["x", "alpha"],
            constraints: "0 <= x <= 1, |alpha| <= 1, beta = +sqrt(1 - alpha^2)",
        },
        Entry {
            family: Family::TothAcin.name(),
            params: vec!["c"],
            constraints: "three-spin state; positivity checked numerically per c",
        },
        Entry {
            family: Family::Product.name(),
            params: vec![],
            constraints: "field 'bloch': list of 3-vectors with norm <= 1",
        },
        Entry {
            family: Family::Raw.name(),
            params: vec![],
            constraints: "fields 'n_spins' and 'matrix': row-major [re, im] pairs, spin 1 most significant",
        },
    ];
    serde_json::to_string_pretty(&entries).expect("catalog serializes")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
