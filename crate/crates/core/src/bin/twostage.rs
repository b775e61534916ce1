use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use twostage::codec::{decode_sequence, encode_sequence, CodecParams, FrameType};
use twostage::frame::{load_raw_video, psnr, write_raw_video, ChromaFormat};
use twostage::harness::{rd_sweep, write_sweep_csv, SweepGrid};
use twostage::solver::DEFAULT_EPSILON_FACTOR;
use twostage::synthetic::{generate_clip, ClipSpec};
use twostage::Error;

#[derive(Parser)]
#[command(name = "twostage", version, about = "Two-stage sparse video codec")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct VideoArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 1)]
    frames: usize,
    /// Chroma layout of the raw file: gray, 420, 422 or 444.
    #[arg(long, default_value = "420")]
    chroma: String,
}

#[derive(Args, Clone)]
struct CodingArgs {
    #[arg(long, default_value_t = 16)]
    block_size: usize,
    /// Search radius R: displacements -R..=R-1; 2R must be a multiple of 16.
    #[arg(long, default_value_t = 24)]
    search_range: u32,
    #[arg(long, default_value_t = 16.0)]
    q1: f64,
    #[arg(long, default_value_t = 16.0)]
    q2: f64,
    /// Residual-norm reduction ratio that ends the first stage.
    #[arg(long, default_value_t = 0.1)]
    t: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON_FACTOR)]
    epsilon_factor: f64,
}

impl CodingArgs {
    fn params(&self) -> CodecParams {
        CodecParams {
            q1: self.q1,
            q2: self.q2,
            termination_ratio: self.t,
            epsilon_factor: self.epsilon_factor,
            search_radius: self.search_range,
            block_size: self.block_size,
            ..CodecParams::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Encode raw planar video; prints per-frame bits and PSNR as CSV.
    Encode {
        #[command(flatten)]
        video: VideoArgs,
        #[command(flatten)]
        coding: CodingArgs,
        #[arg(long)]
        output: PathBuf,
    },
    /// Decode a bitstream to raw planar video.
    Decode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value = "420")]
        chroma: String,
    },
    /// Per-frame luma PSNR between two raw files.
    Psnr {
        #[command(flatten)]
        video: VideoArgs,
        #[arg(long)]
        reference: PathBuf,
    },
    /// Encode over a (q1, q2, t) grid and write rate/PSNR as CSV.
    RdSweep {
        #[command(flatten)]
        video: VideoArgs,
        #[command(flatten)]
        coding: CodingArgs,
        /// Three colon-separated comma lists: q1 values, q2 values, t values,
        /// e.g. "8,12,16:8,16:0.05,0.1".
        #[arg(long)]
        grid: String,
        /// Output CSV path; standard output when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write a synthetic test clip as raw planar video.
    Synth {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 176)]
        width: usize,
        #[arg(long, default_value_t = 144)]
        height: usize,
        #[arg(long, default_value_t = 10)]
        frames: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "420")]
        chroma: String,
    },
}

fn parse_list(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Argument(format!("bad grid value {v:?}")))
        })
        .collect()
}

fn parse_grid(s: &str) -> Result<SweepGrid, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Argument(
            "grid must be three colon-separated lists: q1:q2:t".into(),
        ));
    }
    Ok(SweepGrid {
        q1: parse_list(parts[0])?,
        q2: parse_list(parts[1])?,
        t: parse_list(parts[2])?,
    })
}

fn load(video: &VideoArgs, block_size: usize) -> Result<Vec<twostage::frame::Frame>, Error> {
    let chroma: ChromaFormat = video.chroma.parse()?;
    load_raw_video(
        &video.input,
        video.width,
        video.height,
        video.frames,
        block_size,
        chroma,
    )
}

fn run(cli: Cli) -> Result<(), Error> {
    let stdout = io::stdout();
    match cli.command {
        Command::Encode {
            video,
            coding,
            output,
        } => {
            let frames = load(&video, coding.block_size)?;
            let encoded = encode_sequence(&frames, &coding.params())?;
            fs::write(&output, &encoded.bitstream)?;
            let mut out = stdout.lock();
            writeln!(out, "frame,type,bits,psnr_db,atoms_per_block,stage2_per_block")?;
            for s in &encoded.stats {
                let t = match s.frame_type {
                    FrameType::Intra => "I",
                    FrameType::Inter => "P",
                };
                writeln!(
                    out,
                    "{},{},{},{:.6},{:.3},{:.3}",
                    s.index, t, s.bits, s.psnr, s.mean_atoms, s.mean_stage2_nonzero
                )?;
            }
        }
        Command::Decode {
            input,
            output,
            chroma,
        } => {
            let chroma: ChromaFormat = chroma.parse()?;
            let data = fs::read(&input)?;
            let frames = decode_sequence(&data)?;
            write_raw_video(&output, &frames, chroma)?;
        }
        Command::Psnr { video, reference } => {
            let a = load(&video, 1)?;
            let b = load(
                &VideoArgs {
                    input: reference,
                    ..video.clone()
                },
                1,
            )?;
            let mut out = stdout.lock();
            writeln!(out, "frame,psnr_db")?;
            let mut total = 0.0;
            for (i, (fa, fb)) in a.iter().zip(&b).enumerate() {
                let p = psnr(fa, fb)?;
                total += p;
                writeln!(out, "{i},{p:.6}")?;
            }
            writeln!(out, "mean,{:.6}", total / a.len().max(1) as f64)?;
        }
        Command::RdSweep {
            video,
            coding,
            grid,
            csv,
        } => {
            let grid = parse_grid(&grid)?;
            let frames = load(&video, coding.block_size)?;
            let points = rd_sweep(&frames, &coding.params(), &grid)?;
            match csv {
                Some(path) => write_sweep_csv(&points, fs::File::create(path)?)?,
                None => write_sweep_csv(&points, stdout.lock())?,
            }
        }
        Command::Synth {
            output,
            width,
            height,
            frames,
            seed,
            chroma,
        } => {
            let chroma: ChromaFormat = chroma.parse()?;
            let clip = generate_clip(&ClipSpec {
                width,
                height,
                frames,
                seed,
                ..ClipSpec::default()
            });
            write_raw_video(&output, &clip, chroma)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Argument(_) | Error::Truncated { .. } => 2,
                Error::Stream(_) => 3,
                Error::Io(_) => 1,
            })
        }
    }
}
