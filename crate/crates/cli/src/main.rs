use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use termdec::automata::{module_to_buchi, program_to_buchi, to_dot};
use termdec::certifier::check_certificate;
use termdec::driver::{analyze, AnalysisConfig, Verdict};
use termdec::frontend::{parse_program, Format};
use termdec::report::{emit_stats_row, stats_header, Report};
use termdec::{Program, Rat};

const EXIT_UNKNOWN: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_CERT: u8 = 4;

#[derive(Parser)]
#[command(name = "termdec", version, about = "Termination analysis by decomposition into certified modules")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Wprog,
    Cfg,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decompose a program into certified modules.
    Prove {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: Option<InputFormat>,
        #[arg(long = "max-iter", default_value_t = 50)]
        max_iter: usize,
        /// Seconds.
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(long = "state-budget", default_value_t = 200_000)]
        state_budget: usize,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long = "no-check-certificates")]
        no_check_certificates: bool,
        #[arg(long = "emit-remainder")]
        emit_remainder: bool,
        #[arg(long = "stats-row")]
        stats_row: bool,
    },
    /// Re-validate the modules of saved reports (a JSON file or a directory of them).
    CheckCert { path: PathBuf },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("termdec: {}", msg);
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.cmd {
        Cmd::Prove {
            file,
            format,
            max_iter,
            timeout,
            state_budget,
            report,
            dot,
            no_check_certificates,
            emit_remainder,
            stats_row,
        } => {
            if max_iter == 0 || state_budget == 0 || timeout.is_some_and(|t| !(t > 0.0)) {
                return fail(EXIT_INPUT, "limits must be positive");
            }
            let cfg = AnalysisConfig {
                max_iterations: max_iter,
                timeout: timeout.map(Duration::from_secs_f64),
                state_budget,
                check_certificates: !no_check_certificates,
                emit_remainder,
            };
            prove(&file, format, &cfg, report.as_deref(), dot.as_deref(), stats_row)
        }
        Cmd::CheckCert { path } => check_cert(&path),
    }
}

fn prove(
    file: &Path,
    format: Option<InputFormat>,
    cfg: &AnalysisConfig,
    report_path: Option<&Path>,
    dot: Option<&Path>,
    stats_row: bool,
) -> ExitCode {
    let src = match fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_INPUT, format!("{}: {}", file.display(), e)),
    };
    let format = match format {
        Some(InputFormat::Cfg) => Format::Cfg,
        Some(InputFormat::Wprog) => Format::Wprog,
        None if file.extension().is_some_and(|e| e == "cfg") => Format::Cfg,
        None => Format::Wprog,
    };
    let program: Program<Rat> = match parse_program(&src, format) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_INPUT, format!("{}: {}", file.display(), e)),
    };
    let result = analyze(&program, cfg);
    let name = file.file_name().map_or_else(|| "program".into(), |n| n.to_string_lossy().into_owned());
    let report = Report::new(&name, &program, &result);

    println!("verdict: {}", result.verdict);
    println!("iterations: {}", result.stats.iterations);
    for (i, m) in result.modules.iter().enumerate() {
        println!(
            "module {}: f = {} ({} states)",
            i,
            m.rank.term,
            m.module.program.num_locations()
        );
    }
    if let Some(l) = &report.lasso {
        println!("lasso: {}", l);
    }
    if stats_row {
        println!("{}", stats_header());
        println!("{}", emit_stats_row(&report));
    }
    if let Some(path) = report_path {
        if let Err(e) = fs::write(path, report.to_json()) {
            return fail(EXIT_INPUT, format!("{}: {}", path.display(), e));
        }
    }
    if let Some(dir) = dot {
        if let Err(e) = write_dots(dir, &program, &result) {
            return fail(EXIT_INPUT, format!("{}: {}", dir.display(), e));
        }
    }
    if cfg.check_certificates {
        for m in &report.modules {
            let violations = match m.to_certified() {
                Ok(cm) => check_certificate(&cm).iter().map(|v| v.to_string()).collect(),
                Err(e) => vec![e],
            };
            if let Some(v) = violations.first() {
                return fail(EXIT_CERT, format!("module {}: {}", m.index, v));
            }
        }
    }
    match result.verdict {
        Verdict::Terminating => ExitCode::SUCCESS,
        Verdict::Unknown { .. } => ExitCode::from(EXIT_UNKNOWN),
        Verdict::BudgetExhausted { .. } => ExitCode::from(EXIT_BUDGET),
    }
}

fn write_dots(
    dir: &Path,
    program: &Program<Rat>,
    result: &termdec::driver::AnalysisResult<Rat>,
) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let label = |l| program.stmts.text(l);
    let budget = 100_000;
    let io = |e: termdec::automata::AutomataError| std::io::Error::other(e.to_string());
    let b = program_to_buchi(program);
    fs::write(dir.join("program.dot"), to_dot(&b, "program", label, budget).map_err(io)?)?;
    for (i, m) in result.modules.iter().enumerate() {
        let b = module_to_buchi(&m.module);
        let name = format!("module_{}", i);
        fs::write(dir.join(format!("{}.dot", name)), to_dot(&b, &name, label, budget).map_err(io)?)?;
    }
    if let Some(r) = &result.remainder {
        fs::write(dir.join("remainder.dot"), to_dot(r, "remainder", label, budget).map_err(io)?)?;
    }
    Ok(())
}

fn check_cert(path: &Path) -> ExitCode {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut v: Vec<PathBuf> = match fs::read_dir(path) {
            Ok(rd) => rd
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "json"))
                .collect(),
            Err(e) => return fail(EXIT_INPUT, format!("{}: {}", path.display(), e)),
        };
        v.sort();
        v
    } else {
        vec![path.to_path_buf()]
    };
    if files.is_empty() {
        return fail(EXIT_INPUT, format!("{}: no reports found", path.display()));
    }
    let mut bad = 0;
    for f in &files {
        let report = match fs::read_to_string(f).map_err(|e| e.to_string()).and_then(|t| {
            Report::from_json(&t).map_err(|e| e.to_string())
        }) {
            Ok(r) => r,
            Err(e) => return fail(EXIT_INPUT, format!("{}: {}", f.display(), e)),
        };
        for m in &report.modules {
            let violations: Vec<String> = match m.to_certified() {
                Ok(cm) => check_certificate(&cm).iter().map(|v| v.to_string()).collect(),
                Err(e) => vec![e],
            };
            if violations.is_empty() {
                println!("{}: module {}: ok", f.display(), m.index);
            } else {
                bad += 1;
                for v in violations {
                    println!("{}: module {}: {}", f.display(), m.index, v);
                }
            }
        }
    }
    if bad > 0 {
        ExitCode::from(EXIT_CERT)
    } else {
        ExitCode::SUCCESS
    }
}
