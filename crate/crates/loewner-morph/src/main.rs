//! Command-line front end for matrix-valued colour morphology.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use loewner_morph::experiments::{run_experiment_suite, ExperimentConfig};
use loewner_morph::image_io::{
    from_matrix_image, read_image, synth_halves, to_matrix_image, write_image,
};
use loewner_morph::metrics::{channel_abs_diff, frobenius_error_sum, mean_top_eigen_gap};
use loewner_morph::morphology::{
    channelwise_dilate, channelwise_erode, close, dilate, erode, open, MatrixImage,
    StructuringElement,
};
use loewner_morph::suprema::SupMethod;

#[derive(Parser)]
#[command(
    name = "loewner-morph",
    about = "Colour morphology on symmetric 2x2 matrix fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Matrix-valued (or channel-wise) dilation.
    Dilate(OpArgs),
    /// Matrix-valued (or channel-wise) erosion.
    Erode(OpArgs),
    /// Opening: erosion followed by dilation.
    Open(OpArgs),
    /// Closing: dilation followed by erosion.
    Close(OpArgs),
    /// Channel-wise absolute difference of two images.
    Diff {
        a: PathBuf,
        b: PathBuf,
        /// Optional prefix for per-channel difference images.
        #[arg(long)]
        out_prefix: Option<String>,
    },
    /// Numeric comparison metrics between two images.
    Metrics {
        a: PathBuf,
        b: PathBuf,
        /// Also report the mean top-eigenvalue gap of `a` for this SE.
        #[arg(long, default_value = "square:3")]
        se: String,
    },
    /// Emit the blue/green half image.
    Synth {
        #[arg(long, default_value_t = 30)]
        size: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full experiment suite.
    Repro {
        #[arg(long, default_value = "repro-out")]
        out_dir: PathBuf,
        /// Natural input image (defaults to the bundled 64x64 test image).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Dump per-pixel matrix entries as text.
    Convert { input: PathBuf },
}

#[derive(Args)]
struct OpArgs {
    input: PathBuf,
    output: PathBuf,
    /// Structuring element: `square:K` (odd K) or `mask:PATH`.
    #[arg(long, default_value = "square:3")]
    se: String,
    /// Supremum back-end: `les`, `les-approx:M`, `trace` or `channelwise`.
    #[arg(long, default_value = "les")]
    method: String,
    /// Apply the operator this many times.
    #[arg(long, default_value_t = 1)]
    iterations: usize,
}

enum CliError {
    Usage(String),
    Io(String),
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Numeric(m) => m,
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are not usage errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

/// LOEWNER_MORPH_THREADS caps worker parallelism; 0 or unset means automatic.
fn configure_threads() {
    if let Ok(v) = std::env::var("LOEWNER_MORPH_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Dilate(args) => morph_op(args, Op::Dilate),
        Command::Erode(args) => morph_op(args, Op::Erode),
        Command::Open(args) => morph_op(args, Op::Open),
        Command::Close(args) => morph_op(args, Op::Close),
        Command::Diff { a, b, out_prefix } => diff_cmd(a, b, out_prefix),
        Command::Metrics { a, b, se } => metrics_cmd(a, b, &se),
        Command::Synth { size, out } => {
            if size == 0 || size % 2 != 0 {
                return Err(CliError::Usage(format!(
                    "synth size must be positive and even, got {size}"
                )));
            }
            let img = synth_halves(size, size, [0, 0, 255], [0, 255, 0])
                .map_err(|e| CliError::Io(e.to_string()))?;
            write_image(&img, &out).map_err(|e| CliError::Io(e.to_string()))
        }
        Command::Repro { out_dir, input } => {
            let report = run_experiment_suite(&ExperimentConfig { out_dir, input })
                .map_err(|e| CliError::Io(e.to_string()))?;
            print!("{}", report.to_key_value());
            Ok(())
        }
        Command::Convert { input } => {
            let img = read_image(&input).map_err(|e| CliError::Io(e.to_string()))?;
            let mimg = to_matrix_image(&img);
            println!("# {} {}", mimg.width(), mimg.height());
            for row in 0..mimg.height() {
                for col in 0..mimg.width() {
                    let m = mimg.get(row, col);
                    println!("{row} {col} {:.17} {:.17} {:.17}", m.a11, m.a12, m.a22);
                }
            }
            Ok(())
        }
    }
}

#[derive(Clone, Copy)]
enum Op {
    Dilate,
    Erode,
    Open,
    Close,
}

enum Method {
    Matrix(SupMethod),
    Channelwise,
}

fn parse_method(s: &str) -> Result<Method, CliError> {
    if s == "les" {
        Ok(Method::Matrix(SupMethod::LesExact))
    } else if s == "trace" {
        Ok(Method::Matrix(SupMethod::Trace))
    } else if s == "channelwise" {
        Ok(Method::Channelwise)
    } else if let Some(m) = s.strip_prefix("les-approx:") {
        let m: f64 = m
            .parse()
            .map_err(|_| CliError::Usage(format!("bad scale factor in method {s:?}")))?;
        if m <= 0.0 {
            return Err(CliError::Usage(format!("scale factor must be positive: {m}")));
        }
        Ok(Method::Matrix(SupMethod::LesApprox(m)))
    } else {
        Err(CliError::Usage(format!(
            "unknown method {s:?}; expected les, les-approx:M, trace or channelwise"
        )))
    }
}

fn parse_se(s: &str) -> Result<StructuringElement, CliError> {
    if let Some(k) = s.strip_prefix("square:") {
        let k: usize = k
            .parse()
            .map_err(|_| CliError::Usage(format!("bad SE size in {s:?}")))?;
        StructuringElement::square(k).map_err(|e| CliError::Usage(e.to_string()))
    } else if let Some(path) = s.strip_prefix("mask:") {
        parse_mask_file(path)
    } else {
        Err(CliError::Usage(format!(
            "unknown SE spec {s:?}; expected square:K or mask:PATH"
        )))
    }
}

/// Mask file: one row per line, cells `0` (off), `1` (on), `A` (on, anchor)
/// or `a` (off, anchor).
fn parse_mask_file(path: &str) -> Result<StructuringElement, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read mask file {path}: {e}")))?;
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let height = rows.len();
    let width = rows.first().map_or(0, |r| r.trim().len());
    let mut mask = Vec::with_capacity(width * height);
    let mut anchor = None;
    for (r, line) in rows.iter().enumerate() {
        let line = line.trim();
        if line.len() != width {
            return Err(CliError::Usage(format!(
                "ragged mask row {r} in {path} (expected {width} cells)"
            )));
        }
        for (c, ch) in line.chars().enumerate() {
            let on = match ch {
                '0' => false,
                '1' => true,
                'A' => {
                    anchor = Some((r, c));
                    true
                }
                'a' => {
                    anchor = Some((r, c));
                    false
                }
                other => {
                    return Err(CliError::Usage(format!(
                        "bad mask cell {other:?} at {r},{c} in {path}"
                    )))
                }
            };
            mask.push(on);
        }
    }
    let anchor =
        anchor.ok_or_else(|| CliError::Usage(format!("mask file {path} has no anchor (A/a)")))?;
    StructuringElement::from_mask(height, width, mask, anchor, None)
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn morph_op(args: OpArgs, op: Op) -> Result<(), CliError> {
    let se = parse_se(&args.se)?;
    let method = parse_method(&args.method)?;
    let img = read_image(&args.input).map_err(|e| CliError::Io(e.to_string()))?;
    let out = match method {
        Method::Channelwise => {
            let mut cur = img;
            for _ in 0..args.iterations {
                cur = match op {
                    Op::Dilate => channelwise_dilate(&cur, &se),
                    Op::Erode => channelwise_erode(&cur, &se),
                    Op::Open => channelwise_dilate(&channelwise_erode(&cur, &se), &se),
                    Op::Close => channelwise_erode(&channelwise_dilate(&cur, &se), &se),
                };
            }
            cur
        }
        Method::Matrix(m) => {
            let mut cur: MatrixImage = to_matrix_image(&img);
            for _ in 0..args.iterations {
                cur = match op {
                    Op::Dilate => dilate(&cur, &se, m),
                    Op::Erode => erode(&cur, &se, m),
                    Op::Open => open(&cur, &se, m),
                    Op::Close => close(&cur, &se, m),
                }
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            }
            from_matrix_image(&cur)
        }
    };
    write_image(&out, &args.output).map_err(|e| CliError::Io(e.to_string()))
}

fn diff_cmd(a: PathBuf, b: PathBuf, out_prefix: Option<String>) -> Result<(), CliError> {
    let ia = read_image(&a).map_err(|e| CliError::Io(e.to_string()))?;
    let ib = read_image(&b).map_err(|e| CliError::Io(e.to_string()))?;
    let diffs = channel_abs_diff(&ia, &ib).map_err(|e| CliError::Usage(e.to_string()))?;
    for (ci, chan) in ["r", "g", "b"].iter().enumerate() {
        let max = diffs[ci].data().iter().cloned().fold(0.0, f64::max);
        let sum: f64 = diffs[ci].data().iter().sum();
        println!("{chan}_max={max}");
        println!("{chan}_sum={sum}");
        if let Some(prefix) = &out_prefix {
            let vis = loewner_morph::RgbImage8::from_fn(ia.width(), ia.height(), |x, y| {
                let v = diffs[ci].get(y, x).round().clamp(0.0, 255.0) as u8;
                [v, v, v]
            });
            write_image(&vis, format!("{prefix}_{chan}.ppm"))
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    let all_zero = diffs
        .iter()
        .all(|d| d.data().iter().all(|&v| v == 0.0));
    println!("all_zero={all_zero}");
    Ok(())
}

fn metrics_cmd(a: PathBuf, b: PathBuf, se: &str) -> Result<(), CliError> {
    let se = parse_se(se)?;
    let ia = read_image(&a).map_err(|e| CliError::Io(e.to_string()))?;
    let ib = read_image(&b).map_err(|e| CliError::Io(e.to_string()))?;
    let fro = frobenius_error_sum(&ia, &ib).map_err(|e| CliError::Usage(e.to_string()))?;
    println!("frobenius_error_sum={fro}");
    let gap = mean_top_eigen_gap(&to_matrix_image(&ia), &se);
    println!("mean_top_eigen_gap={gap}");
    Ok(())
}
