//! Command-line front end: chart computation, block-matrix dumps,
//! verification suites and the Greek-letter candidate report.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 internal consistency failure (the two-route or lift checks tripped).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use q2_core::chart::{
    block_csv, chart_csv, chart_json, greek_json, greek_text, presentation_json, render_chart_text,
};
use q2_core::connecting::{analyze_block, WindowSpec};
use q2_core::error::Q2Error;
use q2_core::spectral::{assemble_e2, greek_report, AssembleOptions, ExtData, GreekFamily};
use q2_core::verify::{run_suite, Suite};

#[derive(Parser)]
#[command(
    name = "q2",
    version,
    about = "Exact chart computations for the Q(2) spectral sequence"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute chart entries over a t-range and emit them.
    E2(E2Args),
    /// Dump one weight block of the second connecting map with its
    /// kernel/cokernel presentations and stability flag.
    Delta(DeltaArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
    /// Emit the Greek-letter candidate table.
    Greek(GreekArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct E2Args {
    #[arg(long)]
    t_min: i64,
    #[arg(long)]
    t_max: i64,
    #[arg(long, default_value_t = 3)]
    s_max: i64,
    /// Column window for the truncated blocks (per-weight defaults apply
    /// when they are larger).
    #[arg(long, default_value_t = 24)]
    window_columns: usize,
    /// Extra working-modulus digits for the torsion linear algebra.
    #[arg(long, default_value_t = 2)]
    modulus_slack: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Optional ingested cohomology data (JSON map "s,t" -> summands).
    #[arg(long)]
    ext_data: Option<PathBuf>,
    /// Output file; stdout when omitted. Relative paths resolve against
    /// Q2_OUT_DIR when that is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed recorded for reproducibility of randomized sub-checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct DeltaArgs {
    #[arg(long)]
    eps: u8,
    #[arg(long)]
    m: i64,
    #[arg(long, default_value_t = 24)]
    window: usize,
    #[arg(long, default_value_t = 2)]
    modulus_slack: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: adic, eigen, jpow, leading, vanishing, m13, propcombo,
    /// dtilde, theorem-main, snf-oracle, all.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct GreekArgs {
    /// alpha or beta.
    #[arg(long)]
    family: String,
    #[arg(long)]
    max_i: i64,
    #[arg(long, default_value_t = 24)]
    window_columns: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::E2(args) => cmd_e2(args),
        Cmd::Delta(args) => cmd_delta(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Greek(args) => cmd_greek(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Q2Error::FormulaMismatch(_) | Q2Error::LiftFailure(_) => ExitCode::from(3),
                Q2Error::InvalidConfig(_) | Q2Error::InvalidIndex(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Q2Error> {
    match out {
        None => {
            // tolerate a closed pipe (e.g. `q2 e2 ... | head`)
            use std::io::Write;
            let _ = std::io::stdout().lock().write_all(content.as_bytes());
            Ok(())
        }
        Some(path) => {
            let path = if path.is_relative() {
                match std::env::var_os("Q2_OUT_DIR") {
                    Some(dir) => PathBuf::from(dir).join(path),
                    None => path.clone(),
                }
            } else {
                path.clone()
            };
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(&path, content)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn cmd_e2(args: E2Args) -> Result<ExitCode, Q2Error> {
    if args.t_min > args.t_max {
        return Err(Q2Error::InvalidConfig("t-min must not exceed t-max".into()));
    }
    if args.window_columns < 8 {
        return Err(Q2Error::InvalidConfig(
            "window-columns must be at least 8".into(),
        ));
    }
    let ext = match &args.ext_data {
        Some(path) => ExtData::load(path)?,
        None => ExtData::default(),
    };
    let opts = AssembleOptions {
        window: WindowSpec {
            columns: args.window_columns,
            row_slack: 8,
            modulus_slack: args.modulus_slack,
        },
        s_max: args.s_max,
        ext,
    };
    let entries = assemble_e2(args.t_min, args.t_max, &opts)?;
    let content = match args.format {
        Format::Text => render_chart_text(&entries),
        Format::Json => {
            format!("{:#}\n", chart_json(&entries, args.window_columns))
        }
        Format::Csv => chart_csv(&entries),
    };
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_delta(args: DeltaArgs) -> Result<ExitCode, Q2Error> {
    if args.eps > 1 {
        return Err(Q2Error::InvalidConfig("eps must be 0 or 1".into()));
    }
    if args.window < 1 {
        return Err(Q2Error::InvalidConfig("window must be positive".into()));
    }
    let window = WindowSpec {
        columns: args.window,
        row_slack: 8,
        modulus_slack: args.modulus_slack,
    };
    let analysis = analyze_block(args.eps, args.m, &window)?;
    let content = match args.format {
        Format::Csv => {
            let mut s = block_csv(&analysis.block);
            s.push_str(&format!("# kernel: {}\n", analysis.kernel));
            s.push_str(&format!("# cokernel: {}\n", analysis.cokernel));
            s.push_str(&format!(
                "# stability: kernel {} cokernel {}\n",
                analysis.kernel_stability.stable, analysis.cokernel_stability.stable
            ));
            s
        }
        Format::Json | Format::Text => {
            let v = serde_json::json!({
                "schema": q2_core::chart::JSON_SCHEMA,
                "eps": args.eps,
                "m": args.m,
                "order_exp": analysis.block.order_exp,
                "window": [analysis.block.v_max, analysis.block.w_max],
                "certified_rows": analysis.block.certified_rows,
                "matrix_csv": block_csv(&analysis.block),
                "kernel": presentation_json(&analysis.kernel),
                "cokernel": presentation_json(&analysis.cokernel),
                "kernel_stable": analysis.kernel_stability.stable,
                "cokernel_stable": analysis.cokernel_stability.stable,
                "echelon_verified": analysis.echelon_verified,
            });
            format!("{v:#}\n")
        }
    };
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Q2Error> {
    let suite = Suite::parse(&args.suite).ok_or_else(|| {
        Q2Error::InvalidConfig(format!(
            "unknown suite {:?}; expected one of {}",
            args.suite,
            Suite::names().join(", ")
        ))
    })?;
    let reports = run_suite(suite, args.seed);
    let all_pass = reports.iter().all(|r| r.passed());
    match args.format {
        Format::Json => {
            let v = serde_json::json!({
                "schema": q2_core::chart::JSON_SCHEMA,
                "seed": args.seed,
                "passed": all_pass,
                "suites": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            });
            println!("{v:#}");
        }
        _ => {
            for r in &reports {
                println!("{}", r.summary_line());
                for c in &r.checks {
                    if !c.pass {
                        println!("  FAILED: {}", c.name);
                        if let Some(d) = &c.detail {
                            println!("    {d}");
                        }
                    }
                }
            }
        }
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_greek(args: GreekArgs) -> Result<ExitCode, Q2Error> {
    let family = match args.family.as_str() {
        "alpha" => GreekFamily::Alpha,
        "beta" => GreekFamily::Beta,
        other => {
            return Err(Q2Error::InvalidConfig(format!(
                "unknown family {other:?}; expected alpha or beta"
            )))
        }
    };
    if args.max_i < 0 {
        return Err(Q2Error::InvalidConfig("max-i must be non-negative".into()));
    }
    let window = WindowSpec {
        columns: args.window_columns,
        row_slack: 8,
        modulus_slack: 2,
    };
    let rows = greek_report(family, args.max_i, &window)?;
    let content = match args.format {
        Format::Json => format!("{:#}\n", greek_json(&rows)),
        _ => greek_text(&rows),
    };
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}
