use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mmssl::data::{SynthConfig, Task};
use mmssl::features::raster::{BinaryMask, RgbImage};
use mmssl::features::{
    extract_face, extract_sublingual, extract_tongue, load_palette, BlockSpec, FeatureOptions,
    GaborRotation,
};
use mmssl::harness::{
    compute_roc, emit_report, run_experiment, DataSource, ExperimentSpec, Method, ModalitySet,
    ReportFormat, WeightMode,
};
use mmssl::{Error, Modality, Result};

#[derive(Parser)]
#[command(name = "mmssl", version, about = "Multi-modal sparse representation classifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract one modality's feature vector from an image.
    Extract(ExtractArgs),
    /// Run repeated random-split experiments and write CSV and JSON reports.
    Experiment(ExperimentArgs),
    /// ROC points and AUC from a `score,label` CSV.
    Roc(RocArgs),
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    modality: Modality,
    /// Binary PPM image.
    #[arg(long)]
    image: PathBuf,
    /// Tongue mask, or the left vein mask for sublingual images (binary PGM).
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Right vein mask for sublingual images.
    #[arg(long)]
    mask_right: Option<PathBuf>,
    /// JSON list of `{name, L, a, b}` palette entries.
    #[arg(long)]
    palette: PathBuf,
    /// JSON `{side, blocks}` texture block layout (tongue and face).
    #[arg(long)]
    blocks: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Sample id written with the vector; defaults to the image file stem.
    #[arg(long)]
    id: Option<String>,
    #[arg(long, default_value_t = 166.0)]
    lab_l_coefficient: f64,
    #[arg(long, default_value = "sheared")]
    gabor_rotation: GaborRotation,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON-lines dataset.
    #[arg(long, conflicts_with = "synth", required_unless_present = "synth")]
    dataset: Option<PathBuf>,
    /// JSON synthetic generator config; missing fields take their defaults.
    #[arg(long)]
    synth: Option<PathBuf>,
    #[arg(long, default_value = "dm")]
    task: Task,
    #[arg(long, value_delimiter = ',', default_value = "mmssl,src")]
    methods: Vec<Method>,
    #[arg(long, value_delimiter = ',', default_value = "tongue,face,sublingual,all")]
    modalities: Vec<ModalitySet>,
    #[arg(long, value_delimiter = ',', default_value = "30,40,50,60,70,80,90,100")]
    train_sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    #[arg(long, default_value = "uniform")]
    weights: WeightMode,
    #[arg(long, default_value_t = 5)]
    knn_k: usize,
    /// Train size whose pooled scores give the ROC curves (default: the largest).
    #[arg(long)]
    roc_size: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RocArgs {
    /// CSV with header `score,label`.
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct ExtractedVector<'a> {
    id: &'a str,
    modality: Modality,
    values: &'a [f64],
}

fn required<'a>(value: &'a Option<PathBuf>, flag: &str, modality: Modality) -> Result<&'a Path> {
    value
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument(format!("{modality} extraction needs --{flag}")))
}

fn extract(args: ExtractArgs) -> Result<()> {
    let mut opts = FeatureOptions::<f64> {
        lab_l_coefficient: args.lab_l_coefficient,
        ..FeatureOptions::default()
    };
    opts.bank.rotation = args.gabor_rotation;
    let image = RgbImage::<f64>::load_ppm(&args.image)?;
    let palette = load_palette(&args.palette, args.modality)?;
    let vector = match args.modality {
        Modality::Tongue => {
            let mask = BinaryMask::load_pgm(required(&args.mask, "mask", args.modality)?)?;
            let blocks = BlockSpec::load(required(&args.blocks, "blocks", args.modality)?)?;
            extract_tongue(&image, &mask, &palette, &blocks, &opts)?
        }
        Modality::Face => {
            let blocks = BlockSpec::load(required(&args.blocks, "blocks", args.modality)?)?;
            extract_face(&image, &palette, &blocks, &opts)?
        }
        Modality::Sublingual => {
            let left = BinaryMask::load_pgm(required(&args.mask, "mask", args.modality)?)?;
            let right =
                BinaryMask::load_pgm(required(&args.mask_right, "mask-right", args.modality)?)?;
            extract_sublingual(&image, &left, &right, &palette, &opts)?
        }
    };
    let id = args.id.unwrap_or_else(|| {
        args.image
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let record = ExtractedVector {
        id: &id,
        modality: vector.modality,
        values: &vector.values,
    };
    let json = serde_json::to_string(&record).map_err(|e| Error::format(&args.out, e))?;
    std::fs::write(&args.out, json + "\n").map_err(|e| Error::io(&args.out, e))
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let source = match (args.dataset, args.synth) {
        (Some(path), None) => DataSource::Dataset(path),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let config: SynthConfig =
                serde_json::from_str(&text).map_err(|e| Error::format(&path, e))?;
            DataSource::Synth(config)
        }
        _ => return Err(Error::InvalidArgument("give exactly one of --dataset and --synth".into())),
    };
    let mut spec = ExperimentSpec::new(source, args.task);
    spec.methods = args.methods;
    spec.modalities = args.modalities;
    spec.train_sizes = args.train_sizes;
    spec.repeats = args.repeats;
    spec.seed = args.seed;
    spec.solver.lambda = args.lambda;
    spec.solver.tau = args.tau;
    spec.weights = args.weights;
    spec.knn_k = args.knn_k;
    spec.roc_train_size = args.roc_size;
    let report = run_experiment(&spec)?;
    emit_report(&report, ReportFormat::Csv, &args.out)?;
    emit_report(&report, ReportFormat::Json, &args.out)?;
    for cell in &report.cells {
        println!(
            "{:<6} {:<11} n={:<4} mean {:.4}  max {:.4}  min {:.4}",
            cell.method, cell.modality, cell.train_size, cell.mean, cell.max, cell.min
        );
    }
    Ok(())
}

fn roc(args: RocArgs) -> Result<()> {
    let mut reader = csv::Reader::from_path(&args.scores).map_err(|e| Error::format(&args.scores, e))?;
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for row in reader.deserialize::<(f64, usize)>() {
        let (score, label) = row.map_err(|e| Error::format(&args.scores, e))?;
        scores.push(score);
        labels.push(label);
    }
    let roc = compute_roc(&scores, &labels)?;
    let mut out = File::create(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let mut text = String::from("fpr,tpr\n");
    for (fpr, tpr) in &roc.points {
        text.push_str(&format!("{fpr},{tpr}\n"));
    }
    text.push_str(&format!("auc,{}\n", roc.auc));
    out.write_all(text.as_bytes()).map_err(|e| Error::io(&args.out, e))?;
    println!("AUC {:.6}", roc.auc);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Extract(args) => extract(args),
        Command::Experiment(args) => experiment(args),
        Command::Roc(args) => roc(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
