use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use agentcost::cost_model::{comm_crossover, cost_crossover};
use agentcost::harness::{
    self, load_config, predict, regime_table, run_point, run_sweep, validate, write_csv, ExperimentSpec, HarnessError,
    SweepPoint,
};
use agentcost::Paradigm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ParadigmArg {
    Dnr,
    Ma,
    Both,
}

#[derive(Parser)]
#[command(
    name = "agentcost",
    version,
    about = "Remote invocation vs mobile agents: model, simulator, sweeps"
)]
struct Cli {
    /// Experiment file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `sim.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Overrides `validate.tolerance`.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every closed-form quantity at one node count.
    Predict {
        #[arg(long)]
        n: Option<u64>,
    },
    /// Run one simulation and print its report.
    Simulate {
        #[arg(long, value_enum, default_value_t = ParadigmArg::Both)]
        paradigm: ParadigmArg,
        #[arg(long)]
        n: Option<u64>,
        /// Also print the event trace.
        #[arg(long)]
        trace: bool,
    },
    /// Run the configured sweep and write CSV plus a gnuplot script.
    Sweep,
    /// Print the time and cost crossovers.
    Crossover,
    /// Compare simulated sweep points with the closed forms.
    Validate,
    /// Print the winner table over server counts and data sizes.
    Regime,
}

fn load(cli: &Cli) -> Result<ExperimentSpec, HarnessError> {
    let mut spec = match &cli.config {
        Some(path) => load_config(path)?,
        None => ExperimentSpec::default(),
    };
    if let Some(seed) = cli.seed {
        spec.sim.seed = seed;
    }
    if let Some(out) = &cli.out {
        spec.out_dir = out.clone();
    }
    if let Some(t) = cli.tolerance {
        spec.tolerance = t;
    }
    spec.validate()?;
    Ok(spec)
}

fn run(cli: &Cli) -> Result<ExitCode, HarnessError> {
    let spec = load(cli)?;
    match &cli.command {
        Command::Predict { n } => {
            let n = n.unwrap_or(spec.topology.n_servers);
            let values = predict(&spec.fixed, n)?;
            match cli.format {
                Format::Csv => {
                    println!("quantity,n,value");
                    for (name, v) in values {
                        println!("{name},{n},{v}");
                    }
                }
                Format::Table => {
                    for (name, v) in values {
                        println!("{name:<26} {v}");
                    }
                }
            }
        }
        Command::Simulate { paradigm, n, trace } => {
            let paradigms = match paradigm {
                ParadigmArg::Dnr => vec![Paradigm::DNR],
                ParadigmArg::Ma => vec![Paradigm::MA],
                ParadigmArg::Both => vec![Paradigm::DNR, Paradigm::MA],
            };
            let n = n.unwrap_or(spec.topology.n_servers);
            let mut point_spec = spec.clone();
            point_spec.sweep.var = harness::SweepVar::NServers;
            let mut points = Vec::new();
            for p in paradigms {
                let report = run_point(&point_spec, p, n as f64)?;
                points.push(SweepPoint {
                    paradigm: p,
                    sweep_value: n as f64,
                    report,
                });
            }
            match cli.format {
                Format::Csv => write_csv(harness::SweepVar::NServers, &points, std::io::stdout())?,
                Format::Table => {
                    for (i, pt) in points.iter().enumerate() {
                        if i > 0 {
                            println!();
                        }
                        println!("{}", pt.report);
                        if *trace {
                            print!("{}", pt.report.trace.to_text());
                        }
                    }
                }
            }
        }
        Command::Sweep => {
            let out = run_sweep(&spec)?;
            match cli.format {
                Format::Csv => print!(
                    "{}",
                    std::fs::read_to_string(&out.csv_path).map_err(|e| HarnessError::Io {
                        path: out.csv_path.display().to_string(),
                        source: e,
                    })?
                ),
                Format::Table => {
                    println!(
                        "{:<4} {:>12} {:>6} {:>14} {:>16}",
                        "",
                        spec.sweep.var.name(),
                        "n",
                        "comm_time",
                        "invocation_cost"
                    );
                    for p in &out.points {
                        println!(
                            "{:<4} {:>12} {:>6} {:>14} {:>16}",
                            p.paradigm.to_string(),
                            p.sweep_value,
                            p.report.n,
                            p.report.comm_time,
                            p.report.invocation_cost
                        );
                    }
                }
            }
            eprintln!("wrote {} and {}", out.csv_path.display(), out.script_path.display());
        }
        Command::Crossover => {
            let time = comm_crossover(&spec.fixed);
            let cost = cost_crossover(&spec.fixed)?;
            match cli.format {
                Format::Csv => {
                    println!("metric,kind,margin,n_independent");
                    println!(
                        "comm_time,{:?},{},{}",
                        time.kind, time.margin_at_threshold, time.n_independent
                    );
                    println!(
                        "invocation_cost,{:?},{},{}",
                        cost.kind, cost.margin_at_threshold, cost.n_independent
                    );
                }
                Format::Table => {
                    println!("comm_time        {time}");
                    println!("invocation_cost  {cost}");
                }
            }
        }
        Command::Validate => {
            let report = validate(&spec, spec.tolerance)?;
            print!("{report}");
            if !report.passed {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Regime => {
            let r = &spec.regime;
            let table = regime_table(&spec.fixed, &r.n_rows, &r.size_rows, r.size_n)?;
            match cli.format {
                Format::Csv => print!("{}", table.to_csv()),
                Format::Table => print!("{table}"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
