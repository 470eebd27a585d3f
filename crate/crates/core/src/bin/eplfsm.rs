use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eplfsm::datasets::{self, SeriesSpec};
use eplfsm::experiment::{self, DatasetSpec, ExperimentSpec, Profile};
use eplfsm::{Error, FsType, GenerationMethod, MeasureId, Result, UniverseGrid};

#[derive(Parser)]
#[command(name = "eplfsm", version, about = "Evolving fuzzy forecaster with fuzzy-set compatibility measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and test one configuration.
    Run(RunArgs),
    /// Run one configuration per measure and print a comparison table.
    Grid {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated measure names; all built-ins by default.
        #[arg(long, value_delimiter = ',')]
        measures: Vec<String>,
    },
    /// Write a Mackey–Glass series as single-column CSV.
    GenMackeyGlass {
        #[arg(long, default_value_t = 17.0)]
        theta: f64,
        #[arg(long, default_value_t = datasets::MG_MIN_LENGTH)]
        length: usize,
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        #[arg(long, default_value_t = 1.2)]
        x0: f64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetKind {
    MackeyGlass,
    StockCsv,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment spec; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    dataset: Option<DatasetKind>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    path: Option<PathBuf>,
    #[arg(long)]
    column: Option<String>,
    #[arg(long)]
    measure: Option<String>,
    #[arg(long)]
    fs_method: Option<String>,
    #[arg(long)]
    fs_type: Option<String>,
    #[arg(long)]
    zslices: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    uod_lo: Option<f64>,
    #[arg(long)]
    uod_hi: Option<f64>,
    /// Number of universe samples.
    #[arg(long)]
    disc: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    profile: Option<String>,
    /// Compute metrics on the original scale.
    #[arg(long)]
    denormalize: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn spec(&self) -> Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(p) => ExperimentSpec::load(p)?,
            None => {
                let dataset = match self.dataset.unwrap_or(DatasetKind::MackeyGlass) {
                    DatasetKind::MackeyGlass => DatasetSpec::mackey_glass(17.0),
                    DatasetKind::StockCsv => DatasetSpec::stock_csv(
                        self.path
                            .clone()
                            .ok_or_else(|| Error::config("path", "stock-csv needs --path"))?,
                    ),
                };
                ExperimentSpec::new(dataset)
            }
        };
        if self.config.is_some() {
            match self.dataset {
                Some(DatasetKind::MackeyGlass) if spec.dataset.is_stock() => {
                    spec.dataset = DatasetSpec::mackey_glass(17.0);
                }
                Some(DatasetKind::StockCsv) if !spec.dataset.is_stock() => {
                    let path = self
                        .path
                        .clone()
                        .ok_or_else(|| Error::config("path", "stock-csv needs --path"))?;
                    spec.dataset = DatasetSpec::stock_csv(path);
                }
                _ => {}
            }
        }
        match &mut spec.dataset {
            DatasetSpec::MackeyGlass(s) => {
                if let Some(t) = self.theta {
                    s.theta = t;
                }
            }
            DatasetSpec::StockCsv { path, column } => {
                if let Some(p) = &self.path {
                    *path = p.clone();
                }
                if let Some(c) = &self.column {
                    *column = c.clone();
                }
            }
        }
        if let Some(p) = &self.profile {
            p.parse::<Profile>()?.apply(&mut spec.model);
        }
        let m = &mut spec.model;
        if let Some(name) = &self.measure {
            m.measure = name.parse::<MeasureId>()?;
            if self.fs_type.is_none() && m.validate().is_err() {
                m.fs_type = experiment::natural_fs_type(m.measure);
            }
        }
        if let Some(s) = &self.fs_method {
            m.fs_method = s.parse::<GenerationMethod>()?;
        }
        if let Some(s) = &self.fs_type {
            m.fs_type = s.parse::<FsType>()?;
        }
        if let Some(z) = self.zslices {
            if m.fs_type == FsType::T1 {
                return Err(Error::config("zslices", "only applies to type-2 sets"));
            }
            m.fs_type = m.fs_type.with_zslices(z);
        }
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut m.alpha, self.alpha);
        set(&mut m.beta, self.beta);
        set(&mut m.lambda_reg, self.lambda);
        set(&mut m.sigma, self.sigma);
        set(&mut m.epsilon, self.epsilon);
        if self.uod_lo.is_some() || self.uod_hi.is_some() || self.disc.is_some() {
            let g = m.grid;
            m.grid = UniverseGrid::new(
                self.uod_lo.unwrap_or(g.lo()),
                self.uod_hi.unwrap_or(g.hi()),
                self.disc.unwrap_or(g.n_points()),
            )
            .map_err(|e| Error::config("uod", e.to_string()))?;
        }
        if let Some(r) = self.repeats {
            spec.repeats = r;
        }
        if self.denormalize {
            spec.denormalize = true;
        }
        if let Some(o) = &self.out {
            spec.output_dir = Some(o.clone());
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn run(args: &RunArgs) -> Result<()> {
    let spec = args.spec()?;
    let result = experiment::run_experiment(&spec)?;
    let r = &result.report;
    println!("dataset      {}", spec.dataset.label());
    println!("measure      {} ({}, {})", spec.model.measure, spec.model.fs_type, spec.model.fs_method);
    println!("final_rules  {}", r.final_rules);
    println!("rmse         {}", r.rmse);
    println!("ndei         {}", r.ndei);
    println!("mae          {}", r.mae);
    println!("er2          {}", r.er2);
    println!("mape         {}", r.mape);
    println!("runtime_s    {:.4} ± {:.4} over {} runs", r.runtime_mean_s, r.runtime_std_s, spec.repeats);
    Ok(())
}

/// Returns whether every cell succeeded.
fn grid(args: &RunArgs, measures: &[String]) -> Result<bool> {
    let base = args.spec()?;
    let ids = if measures.is_empty() {
        MeasureId::ALL.to_vec()
    } else {
        measures.iter().map(|m| m.parse()).collect::<Result<Vec<MeasureId>>>()?
    };
    let cells = experiment::run_grid(experiment::grid_specs(&base, &ids));
    print!("{}", experiment::format_table(&cells));
    if let Some(dir) = &base.output_dir {
        experiment::write_grid_csv(&dir.join("grid.csv"), &cells)?;
    }
    Ok(cells.iter().all(|c| c.outcome.is_ok()))
}

fn gen(theta: f64, length: usize, dt: f64, x0: f64, out: Option<&PathBuf>) -> Result<()> {
    let series = datasets::generate_mackey_glass(&SeriesSpec { theta, length, dt, x0, ..SeriesSpec::default() })?;
    match out {
        Some(p) => datasets::write_series_csv(std::fs::File::create(p)?, &series),
        None => datasets::write_series_csv(std::io::stdout().lock(), &series),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnknownMeasure { .. } | Error::Config { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => run(args).map(|_| true),
        Command::Grid { run, measures } => grid(run, measures),
        Command::GenMackeyGlass { theta, length, dt, x0, out } => gen(*theta, *length, *dt, *x0, out.as_ref()).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: one or more grid cells failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
