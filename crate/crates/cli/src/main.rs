use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fracid_cli::commands::{self, Named, Scenario, WeightingChoice};
use fracid_cli::config::RunConfig;
use fracid_cli::{checks, CliError, CliResult, Output};
use fracid_core::fixtures::FixtureBank;
use fracid_core::io::{self, Model};
use fracid_core::sysid_freq::Aggregation;
use fracid_core::RationalOrder;

#[derive(Parser)]
#[command(
    name = "fracid",
    version,
    about = "Fractional-order identification and control of step-back transients"
)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightingArg {
    Uniform,
    Vinagre,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum AggregationArg {
    Stacked,
    Summed,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Track,
    Disturb,
}

#[derive(Subcommand)]
enum Command {
    /// Rank discrete estimator structures on a time-series CSV (t,u,y).
    IdentifyDiscrete {
        data: PathBuf,
        /// Candidate, e.g. arx:2,2,1 or bj:2,1,1,2,1 (repeatable; a default set when absent).
        #[arg(long = "spec")]
        specs: Vec<String>,
    },
    /// Step-back record of a discrete model (fixture label or model file).
    Regen {
        model: String,
        /// Step size; the fixture's rod drop fraction by default.
        #[arg(long)]
        drop: Option<f64>,
    },
    /// Frequency response CSV of a model file or fixture label.
    Freqresp {
        model: String,
        /// Use the fractional fixture instead of the discrete one for labels.
        #[arg(long)]
        fo: bool,
    },
    /// Commensurate-order Levy sweep on a response CSV or fixture label.
    IdentifyFo {
        /// Frequency CSV (omega,re,im) or fixture label.
        data: Option<String>,
        /// Commensurate orders (repeatable); the config list when absent.
        #[arg(long = "q")]
        qs: Vec<String>,
        #[arg(long, value_enum, default_value = "both")]
        weighting: WeightingArg,
        #[arg(long, value_enum, default_value = "stacked")]
        aggregation: AggregationArg,
        /// Fit randomly generated in-class models instead.
        #[arg(long)]
        self_test: bool,
    },
    /// W-plane poles and zeros of a fractional model.
    Analyze { model: String },
    /// Multistart tuning of the continuous-order controller.
    Tune {
        /// Plant model files or fixture labels; all fixtures when absent.
        #[arg(long = "plant")]
        plants: Vec<String>,
        #[arg(long, default_value = "1/4")]
        q: String,
        /// Number of gains K_0 .. K_N.
        #[arg(long, default_value_t = 11)]
        gains: usize,
    },
    /// Closed-loop pole check of a controller against plants.
    Verify {
        /// Controller file; the published controller when absent.
        #[arg(long)]
        controller: Option<String>,
        #[arg(long = "plant")]
        plants: Vec<String>,
    },
    /// Closed-loop simulation.
    Simulate {
        plant: String,
        #[arg(long)]
        controller: Option<String>,
        #[arg(long, value_enum, default_value = "track")]
        scenario: ScenarioArg,
    },
    /// Full reproduction bundle with a pass/fail summary.
    Report,
    /// Write the built-in fixtures as model files.
    ExportFixtures,
}

fn load_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
            RunConfig::from_toml(&text)
                .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_orders(list: &[String]) -> CliResult<Vec<RationalOrder>> {
    list.iter()
        .map(|s| s.parse::<RationalOrder>().map_err(CliError::from))
        .collect()
}

fn run(cli: &Cli) -> CliResult<(RunConfig, Output)> {
    let cfg = load_config(cli)?;
    let bank = FixtureBank::published();
    bank.verify_checksums()?;
    let out = match &cli.command {
        Command::IdentifyDiscrete { data, specs } => {
            let specs = if specs.is_empty() {
                commands::default_specs()
            } else {
                specs
                    .iter()
                    .map(|s| commands::parse_spec(s))
                    .collect::<CliResult<Vec<_>>>()?
            };
            let text = std::fs::read_to_string(data)
                .map_err(|e| CliError::validation(format!("{}: {e}", data.display())))?;
            let series = io::time_series_from_csv(&text)
                .map_err(|e| CliError::validation(format!("{}: {e}", data.display())))?;
            commands::identify_discrete(&series, &specs)?
        }
        Command::Regen { model, drop } => {
            let m = commands::resolve_discrete(&bank, model)?;
            let drop = drop.unwrap_or_else(|| commands::drop_fraction_for(&bank, model));
            commands::regen(&m, drop, &cfg)?
        }
        Command::Freqresp { model, fo } => {
            let named = if *fo {
                let m = commands::resolve_fo(&bank, model)?;
                Named {
                    name: m.name,
                    value: Model::Fo(m.value),
                }
            } else if std::path::Path::new(model).is_file() {
                let text = std::fs::read_to_string(model)?;
                let value = Model::from_json(&text)
                    .map_err(|e| CliError::validation(format!("{model}: {e}")))?;
                let name = std::path::Path::new(model)
                    .file_stem()
                    .map_or(model.clone(), |s| s.to_string_lossy().into_owned());
                Named { name, value }
            } else {
                let m = commands::resolve_discrete(&bank, model)?;
                Named {
                    name: m.name,
                    value: Model::Discrete(m.value),
                }
            };
            commands::freqresp(&named, &cfg)?
        }
        Command::IdentifyFo {
            data,
            qs,
            weighting,
            aggregation,
            self_test,
        } => {
            if *self_test {
                commands::identify_fo_self_test(cfg.seed, 20, &cfg)?
            } else {
                let source = data.as_deref().ok_or_else(|| {
                    CliError::validation("identify-fo needs a data file or fixture label")
                })?;
                let qs = if qs.is_empty() {
                    cfg.identify.orders()?
                } else {
                    parse_orders(qs)?
                };
                let top = cfg.identify.top()?;
                for q in &qs {
                    fracid_core::sysid_freq::sweep_orders(top, *q)?;
                }
                let data = commands::freq_data_from(&bank, source, &cfg)?;
                let weighting = match weighting {
                    WeightingArg::Uniform => WeightingChoice::Uniform,
                    WeightingArg::Vinagre => WeightingChoice::Vinagre,
                    WeightingArg::Both => WeightingChoice::Both,
                };
                let aggregation = match aggregation {
                    AggregationArg::Stacked => Aggregation::Stacked,
                    AggregationArg::Summed => Aggregation::Summed,
                };
                commands::identify_fo(&data, &qs, top, weighting, aggregation)?
            }
        }
        Command::Analyze { model } => commands::analyze(&commands::resolve_fo(&bank, model)?)?,
        Command::Tune { plants, q, gains } => {
            let plants = commands::resolve_plants(&bank, plants)?;
            let q: RationalOrder = q.parse()?;
            commands::tune(&plants, q, *gains, &cfg)?
        }
        Command::Verify { controller, plants } => {
            let c = commands::resolve_controller(&bank, controller.as_deref())?;
            commands::verify(&c, &commands::resolve_plants(&bank, plants)?)?
        }
        Command::Simulate {
            plant,
            controller,
            scenario,
        } => {
            let p = commands::resolve_fo(&bank, plant)?;
            let c = commands::resolve_controller(&bank, controller.as_deref())?;
            let scenario = match scenario {
                ScenarioArg::Track => Scenario::Track,
                ScenarioArg::Disturb => Scenario::Disturb,
            };
            commands::simulate(&p, &c, scenario, &cfg)?
        }
        Command::Report => checks::report(&bank, &cfg)?,
        Command::ExportFixtures => commands::export_fixtures(&bank)?,
    };
    Ok((cfg, out))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // bad arguments are validation errors (exit 1), not clap's default 2
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = run(&cli).and_then(|(cfg, out)| {
        let written = out.write_to(&cfg.out)?;
        Ok((out.message, written.len(), cfg.out))
    });
    match result {
        Ok((message, count, dir)) => {
            if !message.is_empty() {
                println!("{message}");
            }
            println!(
                "wrote {count} file{} under {}",
                if count == 1 { "" } else { "s" },
                dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
