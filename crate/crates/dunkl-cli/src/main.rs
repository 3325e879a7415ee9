use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dunkl_cli::commands::{
    eval_csv, norm, parse_complex, table_csv, EvalObject, NormRequest, NormSpace, ObjectArgs, DEFAULT_EVAL_GRID,
    DEFAULT_K,
};
use dunkl_cli::config::{Format, PartialConfig, RunConfig};
use dunkl_cli::report::VerificationReport;
use dunkl_cli::suites::{resolve_suites, run_suites, SuiteOptions, DEFAULT_KS};
use dunkl_core::lipschitz::TGrid;
use dunkl_core::specfun::DunklParams;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "dunkl", version, about = "Rank-one Dunkl analysis: kernels, transforms, potentials and Lipschitz norms")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Multiplicity k ≥ 0; `verify` sweeps 0, 0.5 and 1.5 when omitted.
    #[arg(long, global = true)]
    k: Option<f64>,
    /// Tolerance replacing that of every identity check.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Spatial grid `R:nodes:profile` (profile: smooth, singular_origin, heavy_tail).
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Time grid `tmin:tmax:per_decade`.
    #[arg(long, global = true)]
    tgrid: Option<String>,
    /// Suites to run, comma separated, or `all`.
    #[arg(long, global = true, value_delimiter = ',')]
    suite: Option<Vec<String>>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// `norm lp` against c_k |x|^{2k} dx instead of |x|^{2k} dx.
    #[arg(long, global = true)]
    normalized: bool,
}

#[derive(Args, Debug, Default)]
struct Params {
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Spectral parameter of the Dunkl kernel: `i`, `-2i`, `0.5+1i`.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Built-in input: gaussian, xgaussian, hermite2_gaussian, heat_kernel[:t], poisson_kernel[:t], bessel_kernel[:alpha].
    #[arg(long)]
    input: Option<String>,
    /// Order of a Bessel-kernel input when --alpha names the smoothness.
    #[arg(long)]
    input_alpha: Option<f64>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    /// Use J_order(input) in place of the input.
    #[arg(long, allow_hyphen_values = true)]
    order: Option<f64>,
    /// t-derivative order for `table`.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the verification suites and write a report.
    Verify,
    /// Sample a kernel, transform or potential on the grid nodes as CSV.
    Eval {
        #[arg(value_enum)]
        object: EvalObject,
        #[command(flatten)]
        params: Params,
    },
    /// Compute a norm and print it with diagnostics as JSON.
    Norm {
        #[arg(value_enum)]
        space: NormSpace,
        #[command(flatten)]
        params: Params,
    },
    /// Tabulate t ↦ ‖∂_t^m J_order G_t f‖_{k,p} on the time grid as CSV.
    Table {
        #[command(flatten)]
        params: Params,
    },
}

fn exponent(s: &Option<String>, flag: &str) -> Result<Option<f64>, String> {
    match s.as_deref() {
        None => Ok(None),
        Some("inf") | Some("infinity") | Some("∞") => Ok(Some(f64::INFINITY)),
        Some(v) => v.parse::<f64>().map(Some).map_err(|_| format!("--{flag}: bad exponent `{v}`")),
    }
}

fn object_args(p: &Params) -> Result<ObjectArgs, String> {
    Ok(ObjectArgs {
        t: p.t,
        alpha: p.alpha,
        lambda: p.lambda.as_deref().map(parse_complex).transpose()?,
        input: p.input.clone(),
        input_alpha: p.input_alpha,
        p: exponent(&p.p, "p")?,
        q: exponent(&p.q, "q")?,
        order: p.order,
        m: p.m,
    })
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), String> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

/// `Ok(true)` when every check passed.
fn run(cli: Cli) -> Result<bool, String> {
    let c = cli.common;
    let flags = PartialConfig {
        k: c.k,
        tol: c.tol,
        grid: c.grid,
        tgrid: c.tgrid,
        suite: c.suite,
        out: c.out,
        format: c.format,
        normalized: c.normalized.then_some(true),
    };
    let cfg = RunConfig::load(flags)?;
    let params = || DunklParams::new(cfg.k.unwrap_or(DEFAULT_K)).map_err(|e| e.to_string());
    match cli.command {
        Command::Verify => {
            let suites = resolve_suites(&cfg.suite)?;
            let opts = SuiteOptions {
                ks: cfg.k.map_or_else(|| DEFAULT_KS.to_vec(), |k| vec![k]),
                tol: cfg.tol,
                tgrid: cfg.tgrid.clone(),
            };
            let run = run_suites(&suites, &opts);
            let config = serde_json::to_value(&cfg).map_err(|e| e.to_string())?;
            let report = VerificationReport::new(config, run.timings, run.records);
            let text = match cfg.format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            emit(&cfg, &text)?;
            let s = report.summary;
            eprintln!("{} PASS, {} FAIL, {} INFO", s.pass, s.fail, s.info);
            Ok(report.passed())
        }
        Command::Eval { object, params: p } => {
            let args = object_args(&p)?;
            let grid = cfg.grid.unwrap_or(DEFAULT_EVAL_GRID);
            let csv = eval_csv(&params()?, &grid, object, &args).map_err(|e| e.to_string())?;
            emit(&cfg, &csv)?;
            Ok(true)
        }
        Command::Norm { space, params: p } => {
            let args = object_args(&p)?;
            let req = NormRequest {
                space,
                args: &args,
                grid: cfg.grid.as_ref(),
                tgrid: cfg.tgrid.as_ref(),
                normalized: cfg.normalized,
            };
            let out = norm(&params()?, &req).map_err(|e| e.to_string())?;
            let mut text = serde_json::to_string_pretty(&out).map_err(|e| e.to_string())?;
            text.push('\n');
            emit(&cfg, &text)?;
            Ok(true)
        }
        Command::Table { params: p } => {
            let args = object_args(&p)?;
            let tgrid = match &cfg.tgrid {
                Some(t) => t.clone(),
                None => TGrid::log(1e-3, 10.0, 32).map_err(|e| e.to_string())?,
            };
            let csv = table_csv(&params()?, &args, &tgrid).map_err(|e| e.to_string())?;
            emit(&cfg, &csv)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(msg) => {
            eprintln!("dunkl: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
