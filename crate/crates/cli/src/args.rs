use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dfscodec::circuit::{Path as SynthPath, TStage};

#[derive(Debug, Parser)]
#[command(name = "dfscodec", version, about = "Noiseless qudit transmission through finite-group collective noise")]
pub struct Cli {
    /// Write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,

    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Group tables.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Representation analysis.
    #[command(subcommand)]
    Rep(RepCmd),
    /// Fiducial and token states.
    #[command(subcommand)]
    Tokens(TokensCmd),
    /// Encode, send through the channel, decode.
    Roundtrip(RoundtripArgs),
    /// Decode a received state from a dump file.
    Decode(DecodeArgs),
    /// Encoding circuits.
    #[command(subcommand)]
    Circuit(CircuitCmd),
    /// Demonstrations.
    #[command(subcommand)]
    Demo(DemoCmd),
}

#[derive(Debug, Subcommand)]
pub enum GroupCmd {
    /// Check a group file.
    Validate { file: PathBuf },
    /// Classes, element orders and generators.
    Info {
        #[arg(long, value_name = "NAME", conflicts_with = "file")]
        builtin: Option<String>,
        #[arg(required_unless_present = "builtin")]
        file: Option<PathBuf>,
    },
}

/// Group and representation, positionally or by flag.
#[derive(Debug, Clone, Args)]
pub struct RepSource {
    /// Built-in group name or group file.
    #[arg(value_name = "GROUP")]
    pub group_pos: Option<String>,
    /// builtin, builtin-2d, regular, diag:<d>, or a representation file.
    #[arg(value_name = "REP")]
    pub rep_pos: Option<String>,
    #[arg(long = "group", value_name = "GROUP")]
    pub group: Option<String>,
    #[arg(long = "rep", value_name = "REP")]
    pub rep: Option<String>,
    /// Character table file (needed for non-abelian groups read from files).
    #[arg(long, value_name = "FILE")]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum RepCmd {
    /// Unitarity, faithfulness and tensor-power multiplicities.
    Analyze {
        #[command(flatten)]
        source: RepSource,
        /// Highest tensor power to decompose (default: the minimal r).
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, default_value_t = 32)]
        r_max: usize,
    },
    /// Smallest r whose tensor power contains the regular representation.
    MinR {
        #[command(flatten)]
        source: RepSource,
        #[arg(long, default_value_t = 32)]
        r_max: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum TokensCmd {
    /// Build the fiducial and its translates.
    Build {
        #[command(flatten)]
        source: RepSource,
        /// Token register size (default: the minimal r).
        #[arg(long)]
        r: Option<usize>,
        /// Write all token states (element order) as a list of state dumps.
        #[arg(long, value_name = "FILE")]
        dump_state: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[command(flatten)]
    pub source: RepSource,
    /// Message qudits.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long)]
    pub r: Option<usize>,
    /// uniform, fixed:<element>, or weights:<p0>,<p1>,...
    #[arg(long, default_value = "uniform")]
    pub dist: String,
    /// Seed; falls back to DFSCODEC_SEED, then a fixed default.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Message state dump (default: random from the seed).
    #[arg(long, value_name = "FILE")]
    pub message: Option<PathBuf>,
    /// Write the decoded message.
    #[arg(long, value_name = "FILE")]
    pub dump_state: Option<PathBuf>,
    /// Write the state after the channel.
    #[arg(long, value_name = "FILE")]
    pub dump_received: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9, value_parser = positive_f64)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub source: RepSource,
    #[arg(long)]
    pub r: Option<usize>,
    /// Received state dump over r + m qudits.
    #[arg(long, value_name = "FILE")]
    pub state: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the decoded message.
    #[arg(long, value_name = "FILE")]
    pub dump_state: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CircuitCmd {
    /// Gate counts and depths per synthesis path.
    Count {
        #[command(flatten)]
        source: RepSource,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// general, abelian or cyclic (default: every applicable path).
        #[arg(long)]
        path: Option<SynthPath>,
    },
    /// Build the encoder and run it on random messages.
    Simulate {
        #[command(flatten)]
        source: RepSource,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value = "general")]
        path: SynthPath,
        /// direct or register.
        #[arg(long, default_value = "direct")]
        t_stage: TStage,
        /// Fail (exit 4) unless every output matches the encoder.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-9, value_parser = positive_f64)]
        tol: f64,
        /// Write the full gate list as JSON.
        #[arg(long, value_name = "FILE")]
        export: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum DemoCmd {
    /// Three spin-1/2 particles under collective SU(2) noise.
    Su2 {
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Logical |0> amplitudes on M = ±1/2, as re,im;re,im.
        #[arg(long, default_value = "1,0;0,0")]
        c: String,
        /// Logical |1> amplitudes on M = ±1/2.
        #[arg(long, default_value = "1,0;0,0")]
        d: String,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("tolerance must be positive, got {v}"))
    }
}
