mod args;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, ValueEnum};
use logmap_cipher::analysis::{
    self, correlation_mean, cropping_attack_test, differential_attack_test,
    differential_attack_test_rekeyed, key_sensitivity_test, noise_attack_test, Direction,
};
use logmap_cipher::chaos::{bifurcation_scan, lyapunov_scan, write_scan_csv, MapKind};
use logmap_cipher::cipher::{decrypt, encrypt};
use logmap_cipher::imageio::{read_image, write_image, ImageFileFormat};
use logmap_cipher::key::{
    derive_params_from_keys, random_public_key, random_public_key_os, KeyFormat,
};
use logmap_cipher::report::{self, AnalysisReport};
use logmap_cipher::{BitKey512, DerivedParams, GrayImage};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use args::{
    AnalyzeArgs, AttackCommand, Cli, Command, CryptArgs, KeyArgs, KeyPolicy, KeygenArgs, MapChoice,
    MapCommand, ScanArgs, SensitivityArgs, Test,
};

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Keygen(a) => keygen(a),
        Command::Encrypt(a) => encrypt_cmd(a.crypt, a.dump_stages),
        Command::Decrypt(a) => decrypt_cmd(a),
        Command::Analyze(a) => analyze(a),
        Command::Attack(a) => attack(a),
        Command::Sensitivity(a) => sensitivity(a),
        Command::Map(a) => map(a),
    }
}

fn load_keys(keys: &KeyArgs) -> Result<(BitKey512, BitKey512)> {
    let read = |path: &Path| {
        BitKey512::read_file(path, keys.key_format)
            .with_context(|| format!("reading key {}", path.display()))
    };
    Ok((read(&keys.public)?, read(&keys.secret)?))
}

fn load_params(keys: &KeyArgs) -> Result<DerivedParams> {
    let (public, secret) = load_keys(keys)?;
    Ok(derive_params_from_keys(&public, &secret))
}

fn load_image(path: &Path) -> Result<GrayImage> {
    read_image(path).with_context(|| format!("reading image {}", path.display()))
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

fn save_image(image: &GrayImage, path: &Path, format: Option<ImageFileFormat>) -> Result<()> {
    let format = format
        .or_else(|| ImageFileFormat::from_extension(path))
        .unwrap_or(ImageFileFormat::PgmBinary);
    write_image(image, path, format).with_context(|| format!("writing image {}", path.display()))
}

fn print_reports(reports: &[AnalysisReport], json: bool) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if json {
        let value = match reports {
            [single] => single.to_json(),
            many => serde_json::Value::Array(many.iter().map(AnalysisReport::to_json).collect()),
        };
        writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
    } else {
        let text: Vec<String> = reports.iter().map(AnalysisReport::to_text).collect();
        write!(out, "{}", text.join("\n"))?;
    }
    Ok(())
}

fn keygen(a: KeygenArgs) -> Result<()> {
    let source = if let Some(image) = &a.image {
        let mut cmd = std::process::Command::new(&a.cnn_command);
        cmd.arg("--image").arg(image).arg("--out").arg(&a.out);
        if let Some(seed) = a.seed {
            cmd.arg("--seed").arg(seed.to_string());
        }
        let status = cmd.status().with_context(|| {
            format!(
                "could not run '{}' (use --random when it is not installed)",
                a.cnn_command
            )
        })?;
        ensure!(status.success(), "'{}' failed with {status}", a.cnn_command);
        BitKey512::read_file(&a.out, KeyFormat::Binary)
            .with_context(|| format!("'{}' wrote an unusable key", a.cnn_command))?;
        a.cnn_command.clone()
    } else {
        let key = match a.seed {
            Some(seed) => random_public_key(&mut ChaCha20Rng::seed_from_u64(seed))?,
            None => random_public_key_os()?,
        };
        key.write_file(&a.out)?;
        "random".to_string()
    };
    let key = BitKey512::read_file(&a.out, KeyFormat::Binary)?;
    println!("key = {}", a.out.display());
    println!("source = {source}");
    println!("ones = {}", key.count_ones());
    match a.seed {
        Some(seed) => println!("seed = {seed}"),
        None if a.random => println!("seed = none (operating system entropy)"),
        None => {}
    }
    Ok(())
}

fn encrypt_cmd(a: CryptArgs, dump: Option<PathBuf>) -> Result<()> {
    ensure!(
        !same_file(&a.input, &a.out),
        "refusing to overwrite the input image"
    );
    let image = load_image(&a.input)?;
    let params = load_params(&a.keys)?;
    let (cipher, stages) = encrypt(&image, &params, dump.is_some())?;
    save_image(&cipher, &a.out, a.format)?;
    if let (Some(dir), Some(st)) = (dump, stages) {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        for (name, img) in [
            ("stage1_permuted.pgm", &st.permuted),
            ("stage2_dna.pgm", &st.dna_encoded),
            ("stage3_diffused.pgm", &st.diffused),
            ("stage4_cipher.pgm", &st.cipher),
        ] {
            save_image(img, &dir.join(name), Some(ImageFileFormat::PgmBinary))?;
        }
    }
    Ok(())
}

fn decrypt_cmd(a: CryptArgs) -> Result<()> {
    ensure!(
        !same_file(&a.input, &a.out),
        "refusing to overwrite the input image"
    );
    let cipher = load_image(&a.input)?;
    let params = load_params(&a.keys)?;
    save_image(&decrypt(&cipher, &params)?, &a.out, a.format)
}

fn analyze(a: AnalyzeArgs) -> Result<()> {
    let image = load_image(&a.input)?;
    let reference = a.reference.as_deref().map(load_image).transpose()?;
    let mut r = AnalysisReport::new("analyze");
    let h = analysis::histogram(&image);
    for test in &a.tests {
        match test {
            Test::Entropy => {
                r.set(report::ENTROPY, analysis::entropy_of(&h));
            }
            Test::Histogram => {
                for (v, &c) in h.counts().iter().enumerate() {
                    r.set(format!("hist_{v:03}"), c as f64);
                }
            }
            Test::Variance => {
                r.set(report::VARIANCE, analysis::histogram_variance(&h));
            }
            Test::Chi2 => {
                r.set(report::CHI_SQUARE, analysis::chi_square(&h));
            }
            Test::Corr => {
                for d in Direction::ALL {
                    r.set(
                        d.metric_name(),
                        correlation_mean(&image, d, a.samples, a.runs, a.seed)?,
                    );
                }
                r.set("samples", a.samples as f64);
                r.label("rng", analysis::RNG_NAME);
                r.seed = Some(a.seed);
                r.trials = Some(a.runs);
            }
            Test::NpcrUaci | Test::Psnr => {
                let Some(other) = &reference else {
                    bail!(
                        "test {} needs --ref",
                        test.to_possible_value().unwrap().get_name()
                    );
                };
                if *test == Test::Psnr {
                    r.set(report::PSNR_DB, analysis::psnr(other, &image)?);
                } else {
                    let (npcr, uaci) = analysis::npcr_uaci(other, &image)?;
                    r.set(report::NPCR, npcr).set(report::UACI, uaci);
                }
            }
        }
    }
    print_reports(&[r], a.report.json)
}

fn attack(a: AttackCommand) -> Result<()> {
    let (reports, json) = match a {
        AttackCommand::Crop(c) => {
            let image = load_image(&c.common.input)?;
            let params = load_params(&c.common.keys)?;
            let reports = c
                .ratio
                .iter()
                .map(|&ratio| cropping_attack_test(&image, &params, ratio))
                .collect::<Result<Vec<_>, _>>()?;
            (reports, c.common.report.json)
        }
        AttackCommand::Noise(n) => {
            let image = load_image(&n.common.input)?;
            let params = load_params(&n.common.keys)?;
            let reports = n
                .density
                .iter()
                .map(|&d| noise_attack_test(&image, &params, d, n.seed))
                .collect::<Result<Vec<_>, _>>()?;
            (reports, n.common.report.json)
        }
        AttackCommand::Differential(d) => {
            let image = load_image(&d.common.input)?;
            let (public, secret) = load_keys(&d.common.keys)?;
            let r = match d.key_policy {
                KeyPolicy::Fixed => differential_attack_test(
                    &image,
                    &derive_params_from_keys(&public, &secret),
                    d.trials,
                    d.seed,
                )?,
                KeyPolicy::Rekeyed => {
                    differential_attack_test_rekeyed(&image, &secret, d.trials, d.seed)?
                }
            };
            (vec![r], d.common.report.json)
        }
    };
    print_reports(&reports, json)
}

fn sensitivity(a: SensitivityArgs) -> Result<()> {
    ensure!(!a.flips.is_empty(), "--flips needs at least one position");
    let image = load_image(&a.input)?;
    let (public, secret) = load_keys(&a.keys)?;
    let mut r = key_sensitivity_test(&image, &secret, &public, &a.flips)?;
    let flips: Vec<String> = a.flips.iter().map(usize::to_string).collect();
    r.label("flips", flips.join(","));
    print_reports(&[r], a.report.json)
}

fn map(a: MapCommand) -> Result<()> {
    let kind = |m: MapChoice| match m {
        MapChoice::Logistic => MapKind::Logistic,
        MapChoice::Log => MapKind::LogMap,
    };
    let (scan, column, points) = match a {
        MapCommand::Bifurcation { scan, settle, keep } => {
            let r = scan.u;
            let pts = bifurcation_scan(
                kind(scan.map),
                r.start,
                r.end,
                r.steps,
                settle,
                keep,
                scan.v0,
            )?;
            (scan, "v", pts)
        }
        MapCommand::Lyapunov { scan, iters } => {
            let r = scan.u;
            let pts = lyapunov_scan(kind(scan.map), r.start, r.end, r.steps, scan.v0, iters)?;
            (scan, "le", pts)
        }
    };
    write_csv(&scan, column, &points)
}

fn write_csv(scan: &ScanArgs, column: &str, points: &[(f64, f64)]) -> Result<()> {
    match &scan.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write_scan_csv(&mut w, column, points)?;
            w.flush()?;
        }
        None => write_scan_csv(io::stdout().lock(), column, points)?,
    }
    Ok(())
}
