//! Command-line runner for scenarios and traces.
//!
//! Exit codes: 0 success, 2 unreadable or malformed input, 3 execution
//! failure or invalid trace, 4 invariant violated.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use chainexec::analysis::{check_congress_invariant, check_strengthened_invariant, Verdict};
use chainexec::contracts::{Registry, BUGGY_CONGRESS, CONGRESS};
use chainexec::execution::replay_trace;
use chainexec::json::{trace_from_json, trace_to_json};
use chainexec::scenario::{
    exploit_congress_address, exploit_scenario, parse_scenario, run_scenario, scenario_to_json,
};
use chainexec::{Address, ChainBuilder, ChainTrace, ExecutionOrder};

const EXIT_INPUT: u8 = 2;
const EXIT_EXECUTION: u8 = 3;
const EXIT_VIOLATED: u8 = 4;

#[derive(Parser)]
#[command(
    name = "chainexec",
    version,
    about = "Run contract scenarios and check execution traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Dfs,
    Bfs,
}

impl From<Order> for ExecutionOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::Dfs => ExecutionOrder::DepthFirst,
            Order::Bfs => ExecutionOrder::BreadthFirst,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CongressVariant {
    Congress,
    BuggyCongress,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print a summary of the resulting chain.
    Run {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "dfs")]
        order: Order,
        /// Write the trace here. On failure the trace up to the last
        /// committed block is written.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Replay a trace from the empty state.
    ValidateTrace { trace: PathBuf },
    /// Check the Congress counting invariant on a trace.
    CheckInvariant {
        trace: PathBuf,
        #[arg(long)]
        address: u64,
        /// Check outgoing + stored + queued <= created after every step.
        #[arg(long)]
        strengthened: bool,
    },
    /// Run the built-in reentrancy scenario and print the verdict.
    DemoExploit {
        #[arg(long, value_enum, default_value = "dfs")]
        order: Order,
        #[arg(long, value_enum, default_value = "buggy-congress")]
        contract: CongressVariant,
        #[arg(long, default_value_t = 3)]
        reentries: u64,
        #[arg(long)]
        scenario_out: Option<PathBuf>,
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(EXIT_EXECUTION, format!("{}: {e}", path.display())))
}

fn load_trace(path: &Path) -> Result<ChainTrace, Failure> {
    let text = read(path)?;
    trace_from_json(&text, &Registry::builtin())
        .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct RunSummary {
    blocks: usize,
    steps: usize,
    chain_height: u64,
    contracts: Vec<ContractSummary>,
}

#[derive(Serialize)]
struct ContractSummary {
    address: String,
    name: String,
}

fn summarize(builder: &ChainBuilder, blocks: usize) -> RunSummary {
    RunSummary {
        blocks,
        steps: builder.trace().len(),
        chain_height: builder.env().chain.chain_height,
        contracts: builder
            .env()
            .contracts()
            .map(|(a, c)| ContractSummary {
                address: a.to_string(),
                name: c.name().to_string(),
            })
            .collect(),
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("output renders"));
}

fn run(scenario: &Path, order: Order, trace_out: Option<&Path>) -> Result<(), Failure> {
    let text = read(scenario)?;
    let parsed = parse_scenario(&text)
        .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", scenario.display())))?;
    match run_scenario(&parsed, order.into()) {
        Ok(builder) => {
            if let Some(path) = trace_out {
                write(path, &trace_to_json(builder.trace()))?;
            }
            print_json(&summarize(&builder, parsed.blocks.len()));
            Ok(())
        }
        Err(err) => {
            if let Some(path) = trace_out {
                write(path, &trace_to_json(err.committed.trace()))?;
            }
            Err(fail(EXIT_EXECUTION, err.to_string()))
        }
    }
}

#[derive(Serialize)]
struct TraceSummary {
    valid: bool,
    steps: usize,
    queued: usize,
}

fn validate(path: &Path) -> Result<(), Failure> {
    let trace = load_trace(path)?;
    let state = replay_trace(&trace).map_err(|e| fail(EXIT_EXECUTION, e.to_string()))?;
    print_json(&TraceSummary {
        valid: true,
        steps: trace.len(),
        queued: state.queue.len(),
    });
    Ok(())
}

fn report(verdict: &Verdict) -> Result<(), Failure> {
    println!("{}", verdict.to_json());
    match (verdict.holds, verdict.failing_step) {
        (true, _) => Ok(()),
        (false, Some(step)) => Err(fail(
            EXIT_VIOLATED,
            format!("invariant violated after step {step}"),
        )),
        (false, None) => Err(fail(
            EXIT_VIOLATED,
            format!(
                "invariant violated: outgoing {} > created {}",
                verdict.outgoing, verdict.created
            ),
        )),
    }
}

fn check(path: &Path, address: u64, strengthened: bool) -> Result<(), Failure> {
    let trace = load_trace(path)?;
    let addr = Address(address);
    let verdict = if strengthened {
        let state = replay_trace(&trace).map_err(|e| fail(EXIT_EXECUTION, e.to_string()))?;
        check_strengthened_invariant(&state, &trace, addr)
    } else {
        check_congress_invariant(&trace, addr)
    }
    .map_err(|e| fail(EXIT_EXECUTION, e.to_string()))?;
    report(&verdict)
}

#[derive(Serialize)]
struct DemoReport {
    contract: &'static str,
    order: &'static str,
    address: String,
    failed_block: Option<usize>,
    error: Option<String>,
    verdict: Verdict,
}

fn demo(
    order: Order,
    contract: CongressVariant,
    reentries: u64,
    scenario_out: Option<&Path>,
    trace_out: Option<&Path>,
) -> Result<(), Failure> {
    let name = match contract {
        CongressVariant::Congress => CONGRESS,
        CongressVariant::BuggyCongress => BUGGY_CONGRESS,
    };
    let scenario = exploit_scenario(name, reentries);
    if let Some(path) = scenario_out {
        write(path, &scenario_to_json(&scenario))?;
    }
    let (builder, failed_block, error) = match run_scenario(&scenario, order.into()) {
        Ok(b) => (b, None, None),
        Err(e) => (
            *e.committed,
            Some(e.block_index),
            Some(e.source.to_string()),
        ),
    };
    if let Some(path) = trace_out {
        write(path, &trace_to_json(builder.trace()))?;
    }
    let addr = exploit_congress_address();
    let verdict = check_congress_invariant(builder.trace(), addr)
        .map_err(|e| fail(EXIT_EXECUTION, e.to_string()))?;
    print_json(&DemoReport {
        contract: name,
        order: match order {
            Order::Dfs => "dfs",
            Order::Bfs => "bfs",
        },
        address: addr.to_string(),
        failed_block,
        error,
        verdict,
    });
    if verdict.holds {
        Ok(())
    } else {
        Err(fail(EXIT_VIOLATED, "invariant violated"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            scenario,
            order,
            trace_out,
        } => run(scenario, *order, trace_out.as_deref()),
        Command::ValidateTrace { trace } => validate(trace),
        Command::CheckInvariant {
            trace,
            address,
            strengthened,
        } => check(trace, *address, *strengthened),
        Command::DemoExploit {
            order,
            contract,
            reentries,
            scenario_out,
            trace_out,
        } => demo(
            *order,
            *contract,
            *reentries,
            scenario_out.as_deref(),
            trace_out.as_deref(),
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("chainexec: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
