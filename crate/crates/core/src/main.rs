use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chunglu::exact_inverse::distribution_to_reals;
use chunglu::experiments::{self, ExperimentConfig, Suite};
use chunglu::feasibility::{check, projection_histogram, sample_positive_image};
use chunglu::generator::{degree_distribution_of, stream_rng};
use chunglu::io::{read_distribution_file, write_columns, write_distribution, write_shift};
use chunglu::{
    build_transfer_matrix, expand_to_weights, predict_output, DegreeDistribution, ExactInverse, PrecisionContext,
    Result, Sampler,
};

#[derive(Parser)]
#[command(name = "chunglu", version, about = "Chung-Lu degree shifting toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample graphs from a degree distribution and write edge lists.
    Generate {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, default_value = "skip")]
        sampler: Sampler,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Edge list path; with several trials, `.<t>` is appended per trial.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expected realized distribution `P x`.
    Predict {
        #[arg(long)]
        dist: PathBuf,
        /// Truncate or zero-pad to this many classes.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shift a desired output back to an input. Exits with 2 when infeasible.
    Shift {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the full result as JSON instead of CSV.
        #[arg(long)]
        json: bool,
        /// Build the inverse explicitly instead of applying it in stages.
        #[arg(long)]
        materialize: bool,
    },
    /// Feasibility diagnostics for a desired output.
    Check {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Pairwise projections of `P x` for random integer `x` in a box.
    Project {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 100_000)]
        count: usize,
        #[arg(long = "box", default_value_t = 10)]
        box_max: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment suite.
    Experiment {
        suite: Suite,
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn context(digits: Option<u32>, m: usize) -> Result<PrecisionContext> {
    match digits {
        Some(d) => PrecisionContext::new(d),
        None => Ok(PrecisionContext::for_dimension(m)),
    }
}

fn trial_path(out: &Path, t: usize) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(format!(".{t}"));
    PathBuf::from(s)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate {
            dist,
            sampler,
            seed,
            trials,
            out,
        } => {
            if trials == 0 {
                return Err(chunglu::Error::InvalidArgument("trials must be at least 1".into()));
            }
            let d = read_distribution_file(&dist)?;
            let weights = expand_to_weights(&d)?;
            let mut mean = vec![0.0; d.m()];
            for t in 0..trials {
                let g = sampler.generate(&weights, &mut stream_rng(seed, t as u64));
                if let Some(out) = &out {
                    let path = if trials == 1 { out.clone() } else { trial_path(out, t) };
                    let mut w = BufWriter::new(File::create(path)?);
                    g.write_edge_list(&mut w)?;
                    w.flush()?;
                }
                let hist = degree_distribution_of(&g, d.m());
                for (acc, c) in mean.iter_mut().zip(hist.distribution.counts()) {
                    *acc += c;
                }
            }
            mean.iter_mut().for_each(|c| *c /= trials as f64);
            write_distribution(&DegreeDistribution::new(mean)?, io::stdout().lock())?;
        }
        Command::Predict { dist, m, out } => {
            let mut d = read_distribution_file(&dist)?;
            if let Some(m) = m {
                let mut counts = d.counts().to_vec();
                counts.resize(m, 0.0);
                d = DegreeDistribution::new(counts)?;
            }
            let p = build_transfer_matrix(d.m())?;
            let y = predict_output(&p, &d)?;
            write_columns(output(out.as_deref())?, &["degree", "predicted_count"], &y)?;
        }
        Command::Shift {
            dist,
            digits,
            out,
            json,
            materialize,
        } => {
            let d = read_distribution_file(&dist)?;
            let inv = ExactInverse::new(d.m(), context(digits, d.m())?)?;
            let result = inv.shift_with(&distribution_to_reals(&d), materialize)?;
            let mut w = output(out.as_deref())?;
            if json {
                serde_json::to_writer_pretty(&mut w, &result)?;
                writeln!(w)?;
            } else {
                write_shift(&result, &mut w)?;
            }
            w.flush()?;
            if !result.feasible {
                eprintln!("infeasible: negative entries in classes {:?}", result.negative_classes);
                return Ok(ExitCode::from(2));
            }
        }
        Command::Check { dist, digits, json } => {
            let d = read_distribution_file(&dist)?;
            let inv = ExactInverse::new(d.m(), context(digits, d.m())?)?;
            let report = check(&inv, &distribution_to_reals(&d))?;
            let mut w = io::stdout().lock();
            if json {
                serde_json::to_writer_pretty(&mut w, &report)?;
                writeln!(w)?;
            } else {
                writeln!(w, "m = {}, digits = {}", report.m, report.digits)?;
                writeln!(w, "N = {}", report.n.to_f64())?;
                writeln!(w, "direct feasible: {}", report.direct_feasible)?;
                if !report.negative_classes.is_empty() {
                    writeln!(w, "negative classes: {:?}", report.negative_classes)?;
                }
                writeln!(w, "class bounds hold: {}", report.bounds_ok)?;
                writeln!(
                    w,
                    "hyperplane residual: {} ({})",
                    report.hyperplane_residual.to_sci_string(6),
                    if report.hyperplane_ok { "ok" } else { "violated" }
                )?;
                let r = &report.n_range;
                match r.upper {
                    Some(u) => writeln!(w, "N range: [{}, {}]", r.lower, u)?,
                    None => writeln!(w, "N range: [{}, unbounded)", r.lower)?,
                }
            }
        }
        Command::Project {
            m,
            count,
            box_max,
            seed,
            bins,
            out,
        } => {
            let sample = sample_positive_image(m, count, box_max, seed)?;
            let mut w = csv::Writer::from_writer(output(out.as_deref())?);
            for cell in projection_histogram(&sample, bins) {
                w.serialize(cell)?;
            }
            w.flush()?;
        }
        Command::Experiment {
            suite,
            full,
            seed,
            trials,
            out,
        } => {
            let mut cfg = ExperimentConfig::new(suite, full, seed, out);
            if let Some(t) = trials {
                cfg.trials = t;
            }
            let (_, paths) = experiments::run_and_write(&cfg)?;
            for p in paths {
                println!("{}", p.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
