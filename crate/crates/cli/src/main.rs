use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use hopcrack::afh::{format_hop_fixture, hop_sequence, ConnectionParams};
use hopcrack::harness::{self, parse_map, MapSpec, Scenario};

#[derive(Parser)]
#[command(
    name = "hopcrack",
    version,
    about = "BLE hop-parameter cracking simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every trial of a scenario and write the reports.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Print the hop sequence for the given parameters, one channel per line.
    Oracle {
        #[arg(long)]
        h_inc: u8,
        /// `full`, a hex mask, or channel ranges such as `0-8,12`.
        #[arg(long, default_value = "full")]
        map: String,
        #[arg(long, default_value_t = 0)]
        luc: u8,
        #[arg(short = 'n', long, default_value_t = 37)]
        count: usize,
        /// Emit `event_index,channel` lines instead.
        #[arg(long)]
        indexed: bool,
    },
    /// Run the scenario once per map-update period.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Update periods in seconds; 0 disables updates.
        #[arg(long, value_delimiter = ',', default_value = "15,30,60")]
        periods: Vec<f64>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Run the cracker and the follow-mode comparator on identical seeds.
    Compare {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file of `key = value` lines; defaults apply when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Override a scenario key, e.g. `--set trials=5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<Scenario> {
        let mut s = match &self.scenario {
            Some(path) => Scenario::load(path)?,
            None => Scenario::default(),
        };
        for o in &self.overrides {
            let Some((k, v)) = o.split_once('=') else {
                bail!("--set expects KEY=VALUE, got `{o}`");
            };
            s.set(k.trim(), v.trim())?;
        }
        s.apply_env()?;
        s.validate()?;
        Ok(s)
    }
}

fn run(scenario: &ScenarioArgs, out: &Path) -> Result<()> {
    let s = scenario.load()?;
    let report = harness::run_scenario(&s, out)?;
    print!("{}", report.summary());
    println!("reports written to {}", out.display());
    Ok(())
}

fn oracle(h_inc: u8, map: &str, luc: u8, count: usize, indexed: bool) -> Result<()> {
    let c_map = match parse_map(map)? {
        MapSpec::Fixed(m) => m,
        MapSpec::Random(_) => bail!("map: oracle needs an explicit map"),
    };
    let params = ConnectionParams {
        access_address: 0,
        c_int_us: 100_000,
        h_inc,
        c_map,
        luc,
    };
    let seq = hop_sequence(&params, count)?;
    if indexed {
        print!("{}", format_hop_fixture(&seq));
    } else {
        for (_, ch) in seq {
            println!("{}", ch.get());
        }
    }
    Ok(())
}

fn sweep(scenario: &ScenarioArgs, periods: &[f64], out: &Path) -> Result<()> {
    let s = scenario.load()?;
    let mut periods_us = Vec::with_capacity(periods.len());
    for &p in periods {
        if !(p >= 0.0 && p.is_finite()) {
            bail!("periods: `{p}` is not a non-negative number of seconds");
        }
        periods_us.push((p * 1e6).round() as u64);
    }
    for report in harness::sweep(&s, &periods_us, out)? {
        println!("{}", report.summary());
    }
    println!("reports written to {}", out.display());
    Ok(())
}

fn compare(scenario: &ScenarioArgs, out: &Path) -> Result<()> {
    let s = scenario.load()?;
    let c = harness::compare(&s)?;
    harness::write_comparison(out, &s.name, &c)?;
    print!(
        "{}\n{}",
        c.cracker_report.summary(),
        c.benchmark_report.summary()
    );
    println!("reports written to {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { scenario, out } => run(scenario, out),
        Command::Oracle {
            h_inc,
            map,
            luc,
            count,
            indexed,
        } => oracle(*h_inc, map, *luc, *count, *indexed),
        Command::Sweep {
            scenario,
            periods,
            out,
        } => sweep(scenario, periods, out),
        Command::Compare { scenario, out } => compare(scenario, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
