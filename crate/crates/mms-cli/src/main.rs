//! Command-line front end: generate instances, solve them end-to-end,
//! verify allocations against the exact oracle, query MMS values, and run
//! seeded campaigns.
//!
//! Exit codes: 0 success/verified, 1 guarantee violated or solver assertion
//! failure, 2 malformed input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use mms_core::campaign::{run_campaign, CampaignConfig};
use mms_core::driver::solve_end_to_end;
use mms_core::error::{InputError, SolveError};
use mms_core::model::{Allocation, TypedInstance};
use mms_core::oracle::mms_exact;
use mms_core::rational::{format_rational, parse_rational};
use mms_core::verify::{gen_instance, verify_allocation, GenParams, ItemsSpec, OracleCaps};

#[derive(Parser)]
#[command(name = "mms", about = "Maximin-share fair division solver for up to three agent types", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file
    Gen {
        #[arg(long, default_value_t = 2)]
        types: usize,
        /// Total number of agents
        #[arg(long)]
        agents: usize,
        /// Number of items
        #[arg(long)]
        items: usize,
        /// Values are drawn uniformly from [0, max-value]
        #[arg(long, default_value_t = 20)]
        max_value: u64,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve an instance end-to-end and write the allocation
    Solve {
        instance: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Write the pipeline transcript (JSON) for debugging
        #[arg(long)]
        dump_transcript: Option<PathBuf>,
        /// Write the case-4 trace (JSON) when that path ran
        #[arg(long)]
        dump_trace: Option<PathBuf>,
    },
    /// Verify an allocation file against an instance at a threshold
    Verify {
        instance: PathBuf,
        allocation: PathBuf,
        /// Threshold as a rational, e.g. 4/5
        #[arg(long)]
        alpha: String,
    },
    /// Print a type's exact MMS value and witness partition
    Oracle {
        instance: PathBuf,
        /// 0-based index into the instance's types array
        #[arg(long = "type", default_value_t = 0)]
        type_index: usize,
        /// Bundle count d (defaults to the agent count)
        #[arg(long)]
        bundles: Option<usize>,
    },
    /// Run a generate/solve/verify campaign from a config file
    Campaign {
        #[arg(long)]
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn read_json(path: &Path) -> Result<Value, InputError> {
    let text = fs::read_to_string(path)
        .map_err(|e| InputError::BadJson(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError::BadJson(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, value: &Value) -> Result<(), InputError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n")
        .map_err(|e| InputError::BadJson(format!("{}: {e}", path.display())))
}

fn run() -> Result<ExitCode, CliError> {
    let cli = Cli::parse();
    let caps = OracleCaps::from_env();
    match cli.command {
        Command::Gen {
            types,
            agents,
            items,
            max_value,
            seed,
            output,
        } => {
            let params = GenParams {
                types,
                agents: (agents, agents),
                items: ItemsSpec::Absolute(items, items),
                max_value,
                seed,
            };
            let instance = gen_instance(&params)?;
            write_json(&output, &instance.to_json())?;
            println!(
                "wrote {} ({} types, {} agents, {} items)",
                output.display(),
                instance.k(),
                instance.n(),
                instance.m
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            instance,
            output,
            dump_transcript,
            dump_trace,
        } => {
            let inst = TypedInstance::from_json(&read_json(&instance)?)?;
            let outcome = solve_end_to_end(&inst, &caps)?;
            let ratios = outcome.report.as_ref().map(|r| r.ratio_strings());
            write_json(&output, &outcome.allocation.to_json(ratios.as_deref()))?;
            if let Some(path) = dump_transcript {
                write_json(&path, &outcome.transcript.to_json())?;
            }
            if let Some(path) = dump_trace {
                match &outcome.case4_trace {
                    Some(trace) => write_json(&path, &trace.to_json())?,
                    None => write_json(&path, &Value::Null)?,
                }
            }
            println!(
                "guarantee {} via {}",
                format_rational(&outcome.guarantee),
                outcome.branch.name()
            );
            match &outcome.report {
                Some(report) => {
                    let min = report
                        .min_ratio
                        .as_ref()
                        .map(|r| format_rational(r))
                        .unwrap_or_else(|| "inf".into());
                    println!("verified: min ratio {min}");
                    if report.pass {
                        Ok(ExitCode::SUCCESS)
                    } else {
                        eprintln!("guarantee violated");
                        Ok(ExitCode::from(1))
                    }
                }
                None => {
                    println!(
                        "verification skipped: {} items exceed the oracle cap {} \
                         (set MMS_ORACLE_CAP to verify)",
                        inst.m, caps.verify
                    );
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Verify {
            instance,
            allocation,
            alpha,
        } => {
            let inst = TypedInstance::from_json(&read_json(&instance)?)?;
            let alloc = Allocation::from_json(&read_json(&allocation)?)?;
            let threshold = parse_rational(&alpha)?;
            let report = verify_allocation(&inst, &alloc, &threshold, &caps)?;
            let min = report
                .min_ratio
                .as_ref()
                .map(|r| format_rational(r))
                .unwrap_or_else(|| "inf".into());
            println!("min ratio {min} against threshold {}", alpha.trim());
            println!("{}", if report.pass { "PASS" } else { "FAIL" });
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Oracle {
            instance,
            type_index,
            bundles,
        } => {
            let inst = TypedInstance::from_json(&read_json(&instance)?)?;
            if type_index >= inst.k() {
                return Err(InputError::BadInstance(format!(
                    "type index {type_index} out of range (instance has {} types)",
                    inst.k()
                ))
                .into());
            }
            let d = bundles.unwrap_or_else(|| inst.n());
            let result = mms_exact(&inst.valuations[type_index], d)
                .map_err(|e| InputError::BadInstance(e.to_string()))?;
            println!("MMS = {}", format_rational(&result.value));
            for (j, bundle) in result.partition.iter().enumerate() {
                let ids: Vec<String> = bundle.ids().map(|i| i.to_string()).collect();
                println!(
                    "  bundle {}: [{}] worth {}",
                    j + 1,
                    ids.join(", "),
                    format_rational(&bundle.value(&inst.valuations[type_index]))
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Campaign { config, output } => {
            let config = CampaignConfig::from_json(&read_json(&config)?)?;
            let data = run_campaign(&config);
            write_json(&output, &data.summary_json())?;
            println!(
                "{}/{} passed, min ratio {}",
                data.passes(),
                data.runs.len(),
                data.min_ratio()
                    .map(|r| format_rational(&r))
                    .unwrap_or_else(|| "inf".into())
            );
            Ok(if data.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

enum CliError {
    Input(InputError),
    Solve(SolveError),
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Input(e)
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Input(inner) => CliError::Input(inner),
            other => CliError::Solve(other),
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(CliError::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Solve(e)) => {
            // unsupported instances are an input problem; everything else is
            // a violated guarantee or internal assertion
            let code = match &e {
                SolveError::UnsupportedTypes(_) => 2,
                _ => 1,
            };
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}
