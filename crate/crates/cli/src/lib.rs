//! Command-line front end: argument parsing, document output and exit codes.
//!
//! Exit codes: 0 clean, 1 usage or input error, 2 falsification or failed
//! verification row.

pub mod analyze;
pub mod input;
pub mod record;
pub mod report;
pub mod scan;
pub mod suite;

use std::io::Write;

use clap::{Parser, Subcommand};
use serde::Serialize;

use h1loc_core::cohomology::DEFAULT_BUDGET;
use h1loc_core::enumerate::DEFAULT_EXHAUSTIVE_BOUND;
use h1loc_core::group::DEFAULT_CAP;
use h1loc_core::verifier::{constants, Falsification};
use h1loc_core::PrimePowerModulus;

use crate::input::GroupSpec;
use crate::scan::{Mode, ScanConfig};
use crate::suite::{Mutation, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FALSIFIED: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "h1loc",
    version,
    about = "First and local cohomology of subgroups of GL2(Z/p^nZ)"
)]
pub struct Cli {
    /// Largest group order for which cohomology is computed.
    #[arg(long, global = true, env = "H1LOC_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Write the structured output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Analyze the group described by a JSON spec file.
    Analyze {
        file: String,
        /// Closure cap for the group.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Scan subgroups exhaustively or by seeded sampling; one record per line.
    Scan {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "sample")]
        mode: Mode,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep only groups whose determinant is onto (Z/p^nZ)^*.
        #[arg(long)]
        require_full_det: bool,
        /// Exhaustive mode: ignore subgroups above this order.
        #[arg(long)]
        max_order: Option<usize>,
        /// Exhaustive mode: largest admissible |GL2(Z/p^nZ)|.
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_BOUND)]
        ambient_bound: usize,
        /// Closure cap for sampled groups.
        #[arg(long, default_value_t = 2000)]
        cap: usize,
        /// Write the summary document here instead of stderr.
        #[arg(long)]
        summary: Option<String>,
        /// Record per-group wall time (breaks byte-for-byte reproducibility).
        #[arg(long)]
        timing: bool,
    },
    /// Run the property suite with fixed seeds.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Negative control: run with a deliberately broken component.
        #[arg(long, value_enum, hide = true)]
        mutate: Option<Mutation>,
    },
    /// Constants for number fields of the given degree.
    Constants {
        #[arg(long)]
        degree: u32,
    },
}

/// Output sink chosen by `--out`.
struct Sink(Box<dyn Write>);

impl Sink {
    fn open(out: &Option<String>) -> Result<Sink, String> {
        Ok(Sink(match out {
            Some(path) => Box::new(std::io::BufWriter::new(
                std::fs::File::create(path).map_err(|e| format!("{path}: cannot create: {e}"))?,
            )),
            None => Box::new(std::io::stdout().lock()),
        }))
    }

    fn document<T: Serialize>(&mut self, doc: &T) -> Result<(), String> {
        let text = serde_json::to_string_pretty(doc).map_err(|e| e.to_string())?;
        writeln!(self.0, "{text}").map_err(|e| e.to_string())?;
        self.0.flush().map_err(|e| e.to_string())
    }

    fn line<T: Serialize>(&mut self, doc: &T) -> Result<(), String> {
        let text = serde_json::to_string(doc).map_err(|e| e.to_string())?;
        writeln!(self.0, "{text}").map_err(|e| e.to_string())
    }
}

fn report_falsifications(bundles: &[Falsification]) -> i32 {
    if bundles.is_empty() {
        return EXIT_OK;
    }
    for b in bundles {
        let dump = serde_json::to_string_pretty(b).unwrap_or_else(|e| e.to_string());
        eprintln!("FALSIFICATION: {}\n{dump}", b.statement);
    }
    EXIT_FALSIFIED
}

/// Runs the command line in `args` (including the program name).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}

fn execute(cli: Cli) -> Result<i32, String> {
    let budget = cli.budget;
    match cli.command {
        Command::Analyze { file, cap } => {
            let spec = GroupSpec::load(&file).map_err(|e| e.to_string())?;
            let g = spec.close(cap).map_err(|e| format!("{file}: {e}"))?;
            let report = analyze::analyze(&spec, &g, budget).map_err(|e| e.to_string())?;
            Sink::open(&cli.out)?.document(&report)?;
            Ok(report_falsifications(&report.falsifications()))
        }
        Command::Scan {
            p,
            n,
            mode,
            count,
            seed,
            require_full_det,
            max_order,
            ambient_bound,
            cap,
            summary,
            timing,
        } => {
            let modulus = PrimePowerModulus::new(p, n).map_err(|e| e.to_string())?;
            let cfg = ScanConfig {
                modulus,
                mode,
                count,
                seed,
                require_full_det,
                budget,
                cap,
                max_order,
                ambient_bound,
                timed: timing,
            };
            let (records, sum) = scan::scan(&cfg).map_err(|e| match e {
                h1loc_core::Error::CapExceeded { cap } => {
                    format!(
                        "exhaustive mode needs |GL2(Z/{})| <= {cap}; use --mode sample",
                        modulus.q()
                    )
                }
                other => other.to_string(),
            })?;
            let mut sink = Sink::open(&cli.out)?;
            for r in &records {
                sink.line(r)?;
            }
            sink.0.flush().map_err(|e| e.to_string())?;
            match summary {
                Some(path) => Sink::open(&Some(path))?.document(&sum)?,
                None => eprintln!(
                    "{}",
                    serde_json::to_string(&sum).map_err(|e| e.to_string())?
                ),
            }
            let bundles: Vec<Falsification> = records
                .iter()
                .filter_map(|r| r.verdict.falsification.clone())
                .collect();
            Ok(report_falsifications(&bundles))
        }
        Command::Verify { seed, mutate } => {
            let mut cfg = SuiteConfig::new(budget, seed);
            cfg.mutation = mutate;
            let report = suite::run_suite(&cfg).map_err(|e| e.to_string())?;
            eprint!("{}", report.table());
            for w in report.warnings() {
                eprintln!("warning: {w}");
            }
            Sink::open(&cli.out)?.document(&report)?;
            report_falsifications(&report.falsifications);
            Ok(if report.passed {
                EXIT_OK
            } else {
                EXIT_FALSIFIED
            })
        }
        Command::Constants { degree } => {
            let table = constants(degree).map_err(|e| e.to_string())?;
            eprintln!("degree                      {}", table.degree);
            eprintln!("constant C(d)               {}", table.constant_formula);
            eprintln!("p0 bound 2d+1               {}", table.p0_bound);
            eprintln!(
                "largest prime <= p0 bound   {}",
                table.largest_prime_within_p0_bound
            );
            eprintln!("torsion prime bound         {}", table.merel_constant);
            if let Some(e) = &table.exceptional_primes {
                eprintln!("possible exceptional primes {e:?}");
            }
            eprintln!("isogeny primes over Q       {:?}", table.isogeny_primes_q);
            Sink::open(&cli.out)?.document(&table)?;
            Ok(EXIT_OK)
        }
    }
}
