//! The `syntheto` command: batch runs of `.synth` files and the server.
//!
//! Exit codes: 0 when every cell is accepted and every obligation passed,
//! 1 on a rejected cell or an undecided obligation, 2 on usage or I/O
//! errors.

use std::io::Write;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use syntheto::eval::{OracleConfig, Status, DEFAULT_SEED, DEFAULT_SIZE, DEFAULT_TRIALS};
use syntheto::session::json::{CellJson, JSON_VERSION};
use syntheto::session::server::{DEFAULT_BRIDGE_PORT, DEFAULT_HTTP_PORT};
use syntheto::session::{CellStatus, ServeConfig, Session};
use syntheto::transfer::{ast_to_transfer, serialize};
use syntheto::{parse_program, print_toplevel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable holding the default oracle seed.
pub const SEED_VAR: &str = "SYNTHETO_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "syntheto",
    version,
    about = "Transformational refinement workbench"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Process a .synth file cell by cell.
    Run(RunArgs),
    /// Serve notebook sessions over the bridge and HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Random samples per obligation.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    /// Oracle seed, decimal or 0x-hex.
    #[arg(long, env = SEED_VAR, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Largest integer magnitude and collection length sampled.
    #[arg(long, default_value_t = DEFAULT_SIZE)]
    pub size: usize,
}

impl OracleArgs {
    pub fn config(&self) -> OracleConfig {
        OracleConfig {
            trials: self.trials,
            size: self.size,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    pub file: PathBuf,
    /// Print each cell's command and outcome in the transfer language.
    #[arg(long)]
    pub emit_transfer: bool,
    /// Print a JSON report instead of text.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    /// Bridge port. Given alone, HTTP is disabled.
    #[arg(long)]
    pub port: Option<u16>,
    /// HTTP port. Given alone, the bridge is disabled.
    #[arg(long)]
    pub http_port: Option<u16>,
    #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
    pub host: IpAddr,
    /// Notebook replayed at start and saved after every change.
    #[arg(long)]
    pub notebook: Option<PathBuf>,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

impl ServeArgs {
    pub fn config(&self) -> ServeConfig {
        let (bridge, http) = match (self.port, self.http_port) {
            (None, None) => (Some(DEFAULT_BRIDGE_PORT), Some(DEFAULT_HTTP_PORT)),
            other => other,
        };
        ServeConfig {
            bridge: bridge.map(|p| SocketAddr::new(self.host, p)),
            http: http.map(|p| SocketAddr::new(self.host, p)),
            oracle: self.oracle.config(),
            notebook: self.notebook.clone(),
        }
    }
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

/// Version of the `--json` report layout.
pub const REPORT_VERSION: u32 = JSON_VERSION;

#[derive(Debug, Serialize)]
pub struct ReportCell {
    #[serde(flatten)]
    pub cell: CellJson,
    /// The cell's command in the transfer language, when it parses.
    pub command: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub version: u32,
    pub file: String,
    pub seed: u64,
    pub trials: usize,
    pub cells: Vec<ReportCell>,
    /// Definitions produced by transformations, as source.
    pub derived: Vec<String>,
    pub undecided: usize,
    pub exit_code: i32,
}

fn command_text(source: &str) -> Option<String> {
    match parse_program(source).ok()?.as_slice() {
        [unit] => serialize(&ast_to_transfer(unit)).ok(),
        _ => None,
    }
}

/// Processes every cell of `text` in order, stopping at the first
/// rejection.
pub fn run_text(file: &str, text: &str, config: OracleConfig) -> (RunReport, Session) {
    let mut session = Session::from_notebook(text, config);
    session.run_pending(|_, _| {});
    let mut derived = Vec::new();
    let mut undecided = 0;
    let cells = session
        .cells()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if let Some(o) = &c.outcome {
                derived.extend(o.payload.iter().map(print_toplevel));
            }
            undecided += c
                .verdicts
                .iter()
                .filter(|(_, v)| v.status == Status::Undecided)
                .count();
            ReportCell {
                cell: CellJson::new(i, c),
                command: command_text(&c.source),
            }
        })
        .collect();
    let all_accepted = session.accepted() == session.cells().len();
    let exit_code = if all_accepted && undecided == 0 {
        EXIT_OK
    } else {
        EXIT_REJECTED
    };
    let report = RunReport {
        version: REPORT_VERSION,
        file: file.to_string(),
        seed: config.seed,
        trials: config.trials,
        cells,
        derived,
        undecided,
        exit_code,
    };
    (report, session)
}

pub fn run_file(path: &Path, config: OracleConfig) -> std::io::Result<(RunReport, Session)> {
    let text = std::fs::read_to_string(path)?;
    Ok(run_text(&path.display().to_string(), &text, config))
}

/// Writes the report in the form selected by `args`.
pub fn write_report(
    out: &mut impl Write,
    report: &RunReport,
    session: &Session,
    args: &RunArgs,
) -> std::io::Result<()> {
    if args.json {
        serde_json::to_writer_pretty(&mut *out, report)?;
        return writeln!(out);
    }
    if args.emit_transfer {
        for c in &report.cells {
            if let Some(cmd) = &c.command {
                writeln!(out, "{cmd}")?;
            }
            if let Some(o) = &c.cell.outcome {
                writeln!(out, "{}", o.transfer)?;
            }
        }
        return Ok(());
    }
    for (c, cell) in report.cells.iter().zip(session.cells()) {
        let n = c.cell.index + 1;
        match (&c.cell.outcome, cell.status) {
            (Some(o), CellStatus::Accepted) => {
                writeln!(out, "cell {n}: {} {}", o.kind, o.message)?;
                for f in &o.functions {
                    writeln!(out, "{f}")?;
                }
            }
            (Some(o), CellStatus::Rejected) => {
                writeln!(out, "cell {n}: rejected")?;
                for line in o.message.lines() {
                    writeln!(out, "  {line}")?;
                }
            }
            (_, status) => writeln!(out, "cell {n}: {}", status_name(status))?,
        }
        for ob in &c.cell.obligations {
            if ob.status == Status::Undecided {
                writeln!(
                    out,
                    "  undecided: {} ({} of {} samples satisfied the hypotheses)",
                    ob.formula, ob.satisfied, ob.attempts
                )?;
            }
        }
    }
    let accepted = session.accepted();
    writeln!(
        out,
        "{accepted} of {} cells accepted (seed {:#x}, {} trials)",
        report.cells.len(),
        report.seed,
        report.trials
    )
}

fn status_name(s: CellStatus) -> &'static str {
    match s {
        CellStatus::Accepted => "accepted",
        CellStatus::Rejected => "rejected",
        CellStatus::Stale => "stale",
        CellStatus::Unsubmitted => "unsubmitted",
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn main_with(cli: Cli) -> i32 {
    match cli.command {
        Command::Run(args) => {
            let (report, session) = match run_file(&args.file, args.oracle.config()) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("syntheto: {}: {e}", args.file.display());
                    return EXIT_USAGE;
                }
            };
            let stdout = std::io::stdout();
            if let Err(e) = write_report(&mut stdout.lock(), &report, &session, &args) {
                eprintln!("syntheto: {e}");
                return EXIT_USAGE;
            }
            report.exit_code
        }
        Command::Serve(args) => serve(&args),
    }
}

fn serve(args: &ServeArgs) -> i32 {
    let rt = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("syntheto: {e}");
            return EXIT_USAGE;
        }
    };
    let result = rt.block_on(async {
        let server = syntheto::session::Server::bind(args.config()).await?;
        if let Some(a) = server.bridge_addr() {
            eprintln!("bridge listening on {a}");
        }
        if let Some(a) = server.http_addr() {
            eprintln!("http listening on http://{a}");
        }
        server.run().await
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("syntheto: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_parse() {
        assert_eq!(parse_seed("0xC0FFEE"), Ok(0xC0FFEE));
        assert_eq!(parse_seed("12"), Ok(12));
        assert!(parse_seed("x").is_err());
    }

    #[test]
    fn lone_port_disables_the_other_endpoint() {
        let args = |port, http_port| ServeArgs {
            port,
            http_port,
            host: IpAddr::V4(Ipv4Addr::LOCALHOST),
            notebook: None,
            oracle: OracleArgs {
                trials: 1,
                seed: 0,
                size: 1,
            },
        };
        let c = args(None, Some(9000)).config();
        assert!(c.bridge.is_none());
        assert_eq!(c.http.unwrap().port(), 9000);
        let c = args(Some(9001), None).config();
        assert!(c.http.is_none());
        let c = args(None, None).config();
        assert_eq!(c.bridge.unwrap().port(), DEFAULT_BRIDGE_PORT);
        assert_eq!(c.http.unwrap().port(), DEFAULT_HTTP_PORT);
    }

    #[test]
    fn second_cell_rejected_later_cells_stale() {
        let text = "subtype positive {x: int | x > 0}\n\
                    function f(x: int) returns (y: bool) { return x; }\n\
                    function g(x: int) returns (y: int) { return x; }\n";
        let cfg = OracleConfig {
            trials: 20,
            ..OracleConfig::default()
        };
        let (report, session) = run_text("t.synth", text, cfg);
        assert_eq!(report.exit_code, EXIT_REJECTED);
        let st: Vec<_> = session.cells().iter().map(|c| c.status).collect();
        assert_eq!(
            st,
            vec![
                CellStatus::Accepted,
                CellStatus::Rejected,
                CellStatus::Stale
            ]
        );
    }
}
