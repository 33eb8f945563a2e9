//! `viterbo`: capacities, volumes, Viterbo ratios, simulations and figure
//! data from TOML body descriptions.
//!
//! Exit status: 0 when every row is ok, 1 when some row is not (or a
//! simulation does not close), 2 for unreadable or invalid configuration, 3
//! for numerical failures.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use viterbo_core::verify::{
    emit_figure_data, exit_code, format_sig, run_report, run_simulation, ConfigDocument, FigureKind, RunOptions,
    ViterboReport,
};
use viterbo_core::{Error, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Comma-separated table
    Table,
    /// JSON document
    Structured,
}

#[derive(Parser, Debug)]
#[command(name = "viterbo", version, about = "Capacities, volumes and Viterbo ratios of Hamiltonian sublevel sets")]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo samples per volume estimate
    #[arg(long, global = true, default_value_t = 1_000_000)]
    samples: u64,
    /// Closure tolerance for simulated orbits
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Run Monte Carlo loops on all cores (results are identical)
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Capacity (or capacity bound) of each configured body
    Capacity { config: PathBuf },
    /// Volume of each configured body
    Volume { config: PathBuf },
    /// Simulate the |p|_1^2 + |q|_inf^2 flow from the configured start
    Simulate {
        config: PathBuf,
        /// Write the trajectory table here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full Viterbo report rows
    Verify {
        config: PathBuf,
        /// Also write the structured report to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trajectory data behind the figures: trajectory-2d, trajectory-nd,
    /// coordinate-evolution
    Figures {
        kind: String,
        #[arg(long)]
        n: Option<usize>,
        /// Samples per arc
        #[arg(long, default_value_t = 64)]
        dense: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn table<S: AsRef<str>>(header: &[&str], rows: impl IntoIterator<Item = Vec<S>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for r in rows {
        w.write_record(r.iter().map(|s| s.as_ref())).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 fields")
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct CapacityRow<'a> {
    body_label: &'a str,
    n: usize,
    level: f64,
    capacity_or_bound: f64,
    capacity_kind: viterbo_core::verify::CapacityKind,
}

#[derive(Serialize)]
struct VolumeRow<'a> {
    body_label: &'a str,
    n: usize,
    level: f64,
    volume: f64,
    volume_method: viterbo_core::verify::VolumeMethod,
    volume_std_error: f64,
}

fn tag<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn render(command: &Command, rows: &[ViterboReport], format: Format) -> String {
    match (command, format) {
        (Command::Capacity { .. }, Format::Table) => table(
            &["body_label", "n", "level", "capacity_or_bound", "capacity_kind"],
            rows.iter().map(|r| {
                vec![r.body_label.clone(), r.n.to_string(), format_sig(r.level), format_sig(r.capacity_or_bound), tag(&r.capacity_kind)]
            }),
        ),
        (Command::Capacity { .. }, Format::Structured) => json(
            &rows
                .iter()
                .map(|r| CapacityRow {
                    body_label: &r.body_label,
                    n: r.n,
                    level: r.level,
                    capacity_or_bound: r.capacity_or_bound,
                    capacity_kind: r.capacity_kind,
                })
                .collect::<Vec<_>>(),
        ),
        (Command::Volume { .. }, Format::Table) => table(
            &["body_label", "n", "level", "volume", "volume_method", "volume_std_error"],
            rows.iter().map(|r| {
                vec![
                    r.body_label.clone(),
                    r.n.to_string(),
                    format_sig(r.level),
                    format_sig(r.volume),
                    tag(&r.volume_method),
                    format_sig(r.volume_std_error),
                ]
            }),
        ),
        (Command::Volume { .. }, Format::Structured) => json(
            &rows
                .iter()
                .map(|r| VolumeRow {
                    body_label: &r.body_label,
                    n: r.n,
                    level: r.level,
                    volume: r.volume,
                    volume_method: r.volume_method,
                    volume_std_error: r.volume_std_error,
                })
                .collect::<Vec<_>>(),
        ),
        (_, Format::Table) => report_table(rows),
        (_, Format::Structured) => json(rows),
    }
}

fn report_table(rows: &[ViterboReport]) -> String {
    table(
        &[
            "body_label",
            "family",
            "n",
            "level",
            "volume",
            "volume_method",
            "volume_std_error",
            "capacity_or_bound",
            "capacity_kind",
            "ratio",
            "ratio_std_error",
            "ok",
        ],
        rows.iter().map(|r| {
            vec![
                r.body_label.clone(),
                r.family.clone(),
                r.n.to_string(),
                format_sig(r.level),
                format_sig(r.volume),
                tag(&r.volume_method),
                format_sig(r.volume_std_error),
                format_sig(r.capacity_or_bound),
                tag(&r.capacity_kind),
                format_sig(r.ratio),
                format_sig(r.ratio_std_error),
                r.ok.to_string(),
            ]
        }),
    )
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if matches!(e, Error::Config(_)) { 2 } else { 3 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions {
        seed: cli.seed,
        samples: cli.samples,
        tol: cli.tol,
        exec: if cli.parallel { Execution::Parallel } else { Execution::Sequential },
    };
    match &cli.command {
        Command::Capacity { config } | Command::Volume { config } | Command::Verify { config, .. } => {
            let doc = match ConfigDocument::read(config) {
                Ok(d) => d,
                Err(e) => return fail(&e),
            };
            let result = run_report(&doc, &opts);
            let rows = match &result {
                Ok(rows) => rows,
                Err(e) => return fail(e),
            };
            print!("{}", render(&cli.command, rows, cli.format));
            if let Command::Verify { out: Some(path), .. } = &cli.command {
                if let Err(e) = write_or_print(&Some(path.clone()), &json(rows)) {
                    return fail(&e);
                }
            }
            ExitCode::from(exit_code(&result) as u8)
        }
        Command::Simulate { config, out } => {
            let doc = match ConfigDocument::read(config) {
                Ok(d) => d,
                Err(e) => return fail(&e),
            };
            let mut all_closed = true;
            for body in &doc.bodies {
                let s = match run_simulation(body, &opts) {
                    Ok(s) => s,
                    Err(e) => return fail(&e),
                };
                all_closed &= s.closed && s.closed_within_tol;
                let text = match cli.format {
                    Format::Table => s.trajectory.clone().unwrap_or_default(),
                    Format::Structured => json(&s),
                };
                if let Err(e) = write_or_print(out, &text) {
                    return fail(&e);
                }
            }
            ExitCode::from(if all_closed { 0 } else { 1 })
        }
        Command::Figures { kind, n, dense, out } => {
            let result = kind
                .parse::<FigureKind>()
                .and_then(|k| emit_figure_data(k, *n, *dense))
                .and_then(|text| write_or_print(out, &text));
            match result {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(&e),
            }
        }
    }
}
