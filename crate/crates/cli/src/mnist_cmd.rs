use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use genreason::mnist::{
    binarize_all, complete_image, curve_csv, evaluate_method, generate_class_image, learning_curve,
    predictions_csv, probabilities_to_grey, read_idx, roc_csv, row_prefix, write_pgm,
    BinarizedItem, Method, PredictionRow, DEFAULT_THRESHOLD, DIGITS, SIDE,
};
use genreason::{Execution, MuMode};

const TRAIN_IMAGES: &str = "train-images-idx3-ubyte";
const TRAIN_LABELS: &str = "train-labels-idx1-ubyte";
const TEST_IMAGES: &str = "t10k-images-idx3-ubyte";
const TEST_LABELS: &str = "t10k-labels-idx1-ubyte";

#[derive(Debug, Subcommand)]
pub enum MnistCommand {
    /// Score the test set; writes predictions.csv and roc.csv.
    Predict(PredictArgs),
    /// Macro AUC over training-set prefixes; writes curve.csv.
    Curve(CurveArgs),
    /// One image per digit of p(pixel | digit); writes digit_<d>.pgm.
    Generate(GenerateArgs),
    /// Fill in test images from their first rows; writes PGMs.
    Complete(CompleteArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Directory holding the four IDX files under their standard names.
    #[arg(long, default_value = "data/mnist-desk")]
    data: PathBuf,
    /// Use only the first N training images.
    #[arg(long)]
    train_size: Option<usize>,
    /// Use only the first N test images.
    #[arg(long)]
    test_size: Option<usize>,
    /// Pixels strictly above this greyscale are on.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: u8,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pool {
    /// Training images only.
    Train,
    /// Training and test images.
    All,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "limit")]
    mu: MuMode,
    /// Use the k-nearest-neighbour vote instead of the reasoning model.
    #[arg(long)]
    knn: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Training prefix sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Reasoning-model settings, one curve each.
    #[arg(long, value_delimiter = ',')]
    mu: Vec<MuMode>,
    /// kNN baselines, one curve each.
    #[arg(long, value_delimiter = ',')]
    knn: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "limit")]
    mu: MuMode,
    #[arg(long, value_enum, default_value = "all")]
    pool: Pool,
    /// Draw probability one as black.
    #[arg(long)]
    invert: bool,
}

#[derive(Debug, Args)]
pub struct CompleteArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "limit")]
    mu: MuMode,
    #[arg(long, value_enum, default_value = "train")]
    pool: Pool,
    /// Observed row counts.
    #[arg(long, value_delimiter = ',', default_value = "16")]
    rows: Vec<usize>,
    /// Number of test images to complete.
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Draw probability one as black.
    #[arg(long)]
    invert: bool,
}

struct Loaded {
    train: Vec<BinarizedItem>,
    test: Vec<BinarizedItem>,
}

fn load(args: &DataArgs) -> Result<Loaded> {
    let read = |images: &str, labels: &str, limit: Option<usize>| -> Result<Vec<BinarizedItem>> {
        let mut raw = read_idx(args.data.join(images), args.data.join(labels))
            .with_context(|| format!("reading {images} in {}", args.data.display()))?;
        if let Some(n) = limit {
            raw.truncate(n);
        }
        Ok(binarize_all(&raw, args.threshold))
    };
    Ok(Loaded {
        train: read(TRAIN_IMAGES, TRAIN_LABELS, args.train_size)?,
        test: read(TEST_IMAGES, TEST_LABELS, args.test_size)?,
    })
}

fn out_dir(args: &DataArgs) -> Result<&Path> {
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    Ok(&args.out)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn save_pgm(path: &Path, values: &[f64], invert: bool) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    write_pgm(
        BufWriter::new(file),
        SIDE,
        SIDE,
        &probabilities_to_grey(values, invert),
    )?;
    Ok(())
}

fn predict(args: &PredictArgs, exec: Execution) -> Result<u8> {
    let data = load(&args.data)?;
    let method = match args.knn {
        Some(k) => Method::Knn(k),
        None => Method::Reasoning(args.mu),
    };
    let eval = evaluate_method(&data.train, &data.test, method, exec)?;
    let rows: Vec<PredictionRow> = eval
        .distributions
        .iter()
        .zip(&data.test)
        .enumerate()
        .map(|(i, (d, t))| PredictionRow {
            test_index: i,
            label: t.label,
            distribution: d.clone(),
        })
        .collect();
    let labels: Vec<u8> = data.test.iter().filter_map(|t| t.label).collect();
    let dir = out_dir(&args.data)?;
    write_file(&dir.join("predictions.csv"), &predictions_csv(&rows))?;
    write_file(&dir.join("roc.csv"), &roc_csv(&eval.distributions, &labels))?;
    println!("method: {method}");
    println!("macro-AUC: {:.6}", eval.auc.value);
    println!("accuracy: {:.6}", eval.accuracy);
    if !eval.auc.skipped.is_empty() {
        println!("skipped classes: {:?}", eval.auc.skipped);
    }
    Ok(0)
}

fn curve(args: &CurveArgs, exec: Execution) -> Result<u8> {
    let methods: Vec<Method> = args
        .mu
        .iter()
        .map(|&m| Method::Reasoning(m))
        .chain(args.knn.iter().map(|&k| Method::Knn(k)))
        .collect();
    if methods.is_empty() {
        bail!("give at least one --mu or --knn");
    }
    let data = load(&args.data)?;
    if let Some(&big) = args.sizes.iter().find(|&&s| s == 0 || s > data.train.len()) {
        bail!("size {big} outside 1..={}", data.train.len());
    }
    let rows = learning_curve(&data.train, &data.test, &args.sizes, &methods, exec)?;
    let csv = curve_csv(&rows);
    write_file(&out_dir(&args.data)?.join("curve.csv"), &csv)?;
    print!("{csv}");
    Ok(0)
}

fn pool(data: Loaded, which: Pool) -> Vec<BinarizedItem> {
    match which {
        Pool::Train => data.train,
        Pool::All => data.train.into_iter().chain(data.test).collect(),
    }
}

fn generate(args: &GenerateArgs) -> Result<u8> {
    let items = pool(load(&args.data)?, args.pool);
    let dir = out_dir(&args.data)?;
    for digit in 0..DIGITS as u8 {
        let img = generate_class_image(&items, digit, args.mu)
            .with_context(|| format!("digit {digit}"))?;
        let path = dir.join(format!("digit_{digit}.pgm"));
        save_pgm(&path, &img.values, args.invert)?;
        println!("{}", path.display());
    }
    Ok(0)
}

fn complete(args: &CompleteArgs) -> Result<u8> {
    let data = load(&args.data)?;
    let targets: Vec<BinarizedItem> = data.test.iter().take(args.count).cloned().collect();
    let items = pool(data, args.pool);
    let dir = out_dir(&args.data)?;
    for (i, target) in targets.iter().enumerate() {
        let truth: Vec<f64> = target
            .pixels
            .to_bools()
            .into_iter()
            .map(|b| f64::from(u8::from(b)))
            .collect();
        save_pgm(&dir.join(format!("test_{i}.pgm")), &truth, args.invert)?;
        for &rows in &args.rows {
            let observed = row_prefix(&target.pixels, rows);
            let filled = complete_image(&items, &observed, args.mu)
                .with_context(|| format!("test image {i}, {rows} rows"))?;
            let path = dir.join(format!("complete_{i}_rows{rows}.pgm"));
            save_pgm(&path, &filled.overlay(&truth), args.invert)?;
            println!("{} (observed {} pixels)", path.display(), observed.len());
        }
    }
    Ok(0)
}

pub fn run(cmd: &MnistCommand, exec: Execution) -> Result<u8> {
    match cmd {
        MnistCommand::Predict(args) => predict(args, exec),
        MnistCommand::Curve(args) => curve(args, exec),
        MnistCommand::Generate(args) => generate(args),
        MnistCommand::Complete(args) => complete(args),
    }
}
