//! Command-line interface.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use stft_dereverb::metrics::drr_single;
use stft_dereverb::{batch_rooms, generate_rir, LsProblem};

use crate::config::ExperimentConfig;
use crate::error::{io_err, AppError, AppResult};
use crate::files::{read_rir, write_atomic, write_json, RirFile};
use crate::harness::cmd_evaluate;
use crate::pipeline::{apply_bank, check_rates, enhanced_drr, solve, widrow_drr};
use crate::wav::{read_wav, write_wav, WavFormat};

#[derive(Debug, Parser)]
#[command(name = "stft-dereverb", version, about = "STFT-domain dereverberation with a known room response")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path (file or directory, depending on the command).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the room impulse response corpus as WAV + JSON pairs.
    GenRir {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        /// Paper-scale corpus of 600 responses.
        #[arg(long)]
        full: bool,
    },
    /// Design the filter bank for a response and save it as JSON.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rir: PathBuf,
    },
    /// Dereverberate a mono WAV file.
    Enhance {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rir: PathBuf,
        /// Treat the input as clean and convolve it with the response first.
        #[arg(long)]
        convolve: bool,
        input: PathBuf,
    },
    /// Run the evaluation harness and write a CSV.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        full: bool,
        /// Worker threads (0 = all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Design the time-domain least-squares inverse of a response.
    Baseline {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rir: PathBuf,
    },
}

fn load_config(common: &Common) -> AppResult<ExperimentConfig> {
    let mut config = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &common.out {
        config.out = Some(out.clone());
    }
    Ok(config)
}

fn out_path(config: &ExperimentConfig) -> AppResult<PathBuf> {
    config
        .out
        .clone()
        .ok_or_else(|| AppError::Config("no output path; pass --out".into()))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

pub fn run(cli: Cli) -> AppResult<()> {
    match cli.command {
        Command::GenRir { common, seed, full } => {
            let mut config = load_config(&common)?;
            if let Some(s) = seed {
                config.corpus.seed = s;
            }
            if full {
                config.full_scale();
            }
            config.validate()?;
            let dir = out_path(&config)?;
            std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
            let rooms = batch_rooms(
                config.corpus.rooms,
                config.corpus.positions,
                &config.corpus.ranges,
                config.corpus.seed,
            )?;
            for (i, room) in rooms.iter().enumerate() {
                let h = generate_rir::<f64>(room)?;
                let stem = dir.join(format!("rir_{i:04}"));
                write_wav(&stem.with_extension("wav"), &h.as_signal(), WavFormat::Float32)?;
                write_json(&stem.with_extension("json"), &RirFile::new(&h, Some(room.clone())))?;
            }
            println!("wrote {} responses to {}", rooms.len(), dir.display());
        }
        Command::Solve { common, rir } => {
            let config = load_config(&common)?;
            config.validate()?;
            let out = out_path(&config)?;
            let h = read_rir(&rir)?;
            let problem = LsProblem::new(
                config.stft.overlap,
                config.stft.hop,
                config.filter.future,
                config.filter.past,
                h.len(),
            );
            let solved = solve(&h, &config)?;
            write_atomic(&out, solved.bank.to_json().as_bytes())?;
            let before = drr_single(&h, &config.metrics)?.db;
            let after = enhanced_drr(&h, &solved.bank, solved.bank.config(), &config.metrics)?.db;
            println!(
                "{} equations x {} unknowns per bin; {} unexcited bins",
                problem.rows(),
                problem.unknowns(),
                solved.unexcited_bins.len()
            );
            println!("DRR before {before:.2} dB, after {after:.2} dB");
        }
        Command::Enhance {
            common,
            rir,
            convolve,
            input,
        } => {
            let config = load_config(&common)?;
            config.validate()?;
            let out = out_path(&config)?;
            let x = read_wav(&input)?;
            let h = read_rir(&rir)?;
            check_rates(x.sample_rate(), h.sample_rate())?;
            let y = if convolve { x.convolve(&h) } else { x };
            let solved = solve(&h, &config)?;
            let s = apply_bank(&y, &solved.bank)?;
            write_wav(&out, &s, WavFormat::Float32)?;
            let before = drr_single(&h, &config.metrics)?.db;
            let after = enhanced_drr(&h, &solved.bank, solved.bank.config(), &config.metrics)?.db;
            println!("DRR before {before:.2} dB, after {after:.2} dB");
        }
        Command::Evaluate {
            common,
            seed,
            full,
            jobs,
        } => {
            let mut config = load_config(&common)?;
            if let Some(s) = seed {
                config.corpus.seed = s;
            }
            if full {
                config.full_scale();
            }
            if let Some(j) = jobs {
                config.jobs = j;
            }
            let out = out_path(&config)?;
            let eval = cmd_evaluate(&config, &out)?;
            let s = &eval.summary;
            println!(
                "{} responses: mean DRR {:.2} -> {:.2} dB (improvement {:.2} dB)",
                eval.rows.len(),
                s.drr_before_db,
                s.drr_after_db,
                s.drr_improvement_db
            );
            if let (Some(w), Some(d)) = (s.drr_widrow_improvement_db, s.widrow_delta_db) {
                println!("baseline improvement {w:.2} dB; proposed minus baseline {d:.2} dB");
            }
            if let Some(srr) = s.srr_improvement_db {
                println!("mean SRR improvement {srr:.2} dB");
            }
        }
        Command::Baseline { common, rir } => {
            let config = load_config(&common)?;
            config.validate()?;
            let out = out_path(&config)?;
            let h = read_rir(&rir)?;
            let (g, db) = widrow_drr(&h, &config)?;
            if is_json(&out) {
                write_json(&out, &RirFile::new(&g, None))?;
            } else {
                write_wav(&out, &g.as_signal(), WavFormat::Float32)?;
            }
            let before = drr_single(&h, &config.metrics)?.db;
            println!("DRR before {before:.2} dB, after inverse filter {:.2} dB", db.db);
        }
    }
    Ok(())
}
