use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use logmap_cipher::analysis::DEFAULT_CORRELATION_SAMPLES;
use logmap_cipher::imageio::{CropRatio, ImageFileFormat};
use logmap_cipher::key::KeyFormat;

#[derive(Debug, Parser)]
#[command(
    name = "logmap-cipher",
    version,
    about = "Chaotic log-map image cipher and cryptanalysis toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a 512-bit public key file.
    Keygen(KeygenArgs),
    /// Encrypt a grayscale image.
    Encrypt(EncryptArgs),
    /// Decrypt a ciphertext image.
    Decrypt(CryptArgs),
    /// Statistical tests on one image (or a pair, with --ref).
    Analyze(AnalyzeArgs),
    /// Simulated attacks on the cipher.
    #[command(subcommand)]
    Attack(AttackCommand),
    /// Ciphertext change caused by flipping secret-key bits.
    Sensitivity(SensitivityArgs),
    /// Bifurcation and Lyapunov scans of the chaotic maps.
    #[command(subcommand)]
    Map(MapCommand),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["random", "image"])))]
pub struct KeygenArgs {
    /// Key file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Draw the key from a random generator instead of an image.
    #[arg(long)]
    pub random: bool,
    /// Derive the key from this image with the external CNN key generator.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Seed for a reproducible key; without it --random uses OS entropy.
    #[arg(long)]
    pub seed: Option<u64>,
    /// External key generator executable.
    #[arg(long, default_value = "cnn-keygen")]
    pub cnn_command: String,
}

#[derive(Debug, Args)]
pub struct KeyArgs {
    /// Secret key file.
    #[arg(long)]
    pub secret: PathBuf,
    /// Public key file.
    #[arg(long)]
    pub public: PathBuf,
    /// Encoding of both key files.
    #[arg(long, default_value = "binary", value_parser = parse_key_format)]
    pub key_format: KeyFormat,
}

#[derive(Debug, Args)]
pub struct CryptArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub keys: KeyArgs,
    /// Output encoding: pgm, pgm-ascii or png. Defaults from the output
    /// extension, else pgm.
    #[arg(long)]
    pub format: Option<ImageFileFormat>,
}

#[derive(Debug, Args)]
pub struct EncryptArgs {
    #[command(flatten)]
    pub crypt: CryptArgs,
    /// Also write the four intermediate images to this directory.
    #[arg(long)]
    pub dump_stages: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Test {
    Entropy,
    Histogram,
    Variance,
    Chi2,
    Corr,
    NpcrUaci,
    Psnr,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Comma-separated tests. npcr-uaci and psnr need --ref.
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "entropy,variance,chi2,corr"
    )]
    pub tests: Vec<Test>,
    /// Second image for the pairwise tests.
    #[arg(long = "ref")]
    pub reference: Option<PathBuf>,
    /// Sampled pixel pairs per correlation estimate.
    #[arg(long, default_value_t = DEFAULT_CORRELATION_SAMPLES)]
    pub samples: usize,
    /// Correlation estimates to average, each with its own seed.
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Subcommand)]
pub enum AttackCommand {
    /// Zero part of the ciphertext, decrypt, and measure PSNR.
    Crop(CropArgs),
    /// Add salt-and-pepper noise to the ciphertext, decrypt, and measure PSNR.
    Noise(NoiseArgs),
    /// Encrypt one-bit plaintext variants and measure NPCR/UACI.
    Differential(DifferentialArgs),
}

#[derive(Debug, Args)]
pub struct AttackInput {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub keys: KeyArgs,
    #[command(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Args)]
pub struct CropArgs {
    #[command(flatten)]
    pub common: AttackInput,
    /// Comma-separated crop ratios.
    #[arg(long, value_delimiter = ',', default_value = "1/16,1/4,1/2")]
    pub ratio: Vec<CropRatio>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[command(flatten)]
    pub common: AttackInput,
    /// Comma-separated noise densities in [0, 1].
    #[arg(long, value_delimiter = ',', default_value = "0.001,0.005,0.01,0.1")]
    pub density: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KeyPolicy {
    /// Both plaintexts under the given public key.
    Fixed,
    /// Each plaintext under its own seeded random public key.
    Rekeyed,
}

#[derive(Debug, Args)]
pub struct DifferentialArgs {
    #[command(flatten)]
    pub common: AttackInput,
    #[arg(long, default_value_t = 20)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "rekeyed")]
    pub key_policy: KeyPolicy,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub keys: KeyArgs,
    /// Comma-separated 1-based secret-key bit positions to flip.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    pub flips: Vec<usize>,
    #[command(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapChoice {
    Logistic,
    Log,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub map: MapChoice,
    /// Control range as start:end:step.
    #[arg(long, value_parser = parse_range)]
    pub u: ControlRange,
    #[arg(long, default_value_t = 0.5)]
    pub v0: f64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum MapCommand {
    /// Long-run orbit values per control value.
    Bifurcation {
        #[command(flatten)]
        scan: ScanArgs,
        /// Iterations discarded before recording.
        #[arg(long, default_value_t = 1000)]
        settle: usize,
        /// Orbit values recorded per control value.
        #[arg(long, default_value_t = 100)]
        keep: usize,
    },
    /// Lyapunov exponent per control value.
    Lyapunov {
        #[command(flatten)]
        scan: ScanArgs,
        /// Orbit length of each estimate.
        #[arg(long, default_value_t = 100_000)]
        iters: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlRange {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

fn parse_range(s: &str) -> Result<ControlRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err("expected start:end:step".into());
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    let (start, end, step) = (num(a)?, num(b)?, num(step)?);
    if !(start.is_finite() && end.is_finite() && step.is_finite()) || end < start || step <= 0.0 {
        return Err("need finite start <= end and a positive step".into());
    }
    let intervals = (end - start) / step;
    let rounded = intervals.round();
    if (intervals - rounded).abs() > 1e-6 * rounded.max(1.0) {
        return Err(format!("step {step} does not divide {start}..{end}"));
    }
    Ok(ControlRange {
        start,
        end,
        steps: rounded as usize + 1,
    })
}

fn parse_key_format(s: &str) -> Result<KeyFormat, String> {
    s.parse()
}
