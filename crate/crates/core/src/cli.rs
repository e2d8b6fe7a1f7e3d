//! The `mibandsel` command line.
//!
//! Every flag can also come from a JSON file passed with `--config`; flags
//! given on the command line win. Exit codes: 0 on success, 2 for invalid
//! input or configuration, 3 when the data has too few labeled classes.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::cube::{
    approx_gt_band_average, load_cube, load_gt, load_real_csv, quantize_band, write_cube, write_gt,
    HyperCube,
};
use crate::error::{Error, Result};
use crate::evaluator::{evaluate_subset, EvalReport, SplitSpec};
use crate::fsio::write_atomic;
use crate::info::{fano_bounds, gt_mask, mutual_information};
use crate::selector::{
    rank_bands, select_bands, select_sweep, Reference, SelectionConfig, SelectionResult,
    DEFAULT_BINS,
};
use crate::synth::{separable_scenario, table1_scenario, SceneSpec};

#[derive(Debug, Parser)]
#[command(
    name = "mibandsel",
    version,
    about = "Mutual-information band selection for hyperspectral cubes"
)]
pub struct Cli {
    /// JSON file supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank bands by mutual information with the reference map.
    Rank(RankArgs),
    /// Greedy band selection, optionally swept over several thresholds.
    Select(SelectArgs),
    /// Classification accuracy of a band subset.
    Eval(EvalArgs),
    /// Write a synthetic scene (cube and ground truth).
    Synth(SynthArgs),
    /// Entropies and Fano error bounds for one image against the ground truth.
    Fano(FanoArgs),
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// Cube header (JSON).
    #[arg(long)]
    pub cube: Option<PathBuf>,
    /// Ground-truth CSV.
    #[arg(long)]
    pub gt: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Quantization bins.
    #[arg(long)]
    pub bins: Option<u32>,
    /// Ignore unlabeled pixels in MI estimates (default true).
    #[arg(long, action = ArgAction::Set)]
    pub labeled_only: Option<bool>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub common: Common,
    /// Use the average of bands LO..=HI as the reference map.
    #[arg(long)]
    pub approx_gt: Option<String>,
    /// Also write ranking.json.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub threshold: Option<f64>,
    /// Comma-separated thresholds; runs one selection per value.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub thresholds: Option<Vec<f64>>,
    #[arg(long)]
    pub max_bands: Option<usize>,
    /// Restrict the search to these bands.
    #[arg(long, value_delimiter = ',')]
    pub candidates: Option<Vec<usize>>,
    /// In sweep mode, also score prefixes of each selection (table2.csv).
    #[arg(long)]
    pub eval: bool,
    /// Prefix sizes for table2.csv rows (default 1..=longest selection).
    #[arg(long, value_delimiter = ',')]
    pub counts: Option<Vec<usize>>,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Args, Default)]
pub struct SplitArgs {
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Split each class separately (default true).
    #[arg(long, action = ArgAction::Set)]
    pub stratified: Option<bool>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated band indices.
    #[arg(long, value_delimiter = ',')]
    pub bands: Option<Vec<usize>>,
    /// Selection JSON written by `select`.
    #[arg(long)]
    pub selection: Option<PathBuf>,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Built-in scene: `table1` or `separable`.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub size: Option<usize>,
    /// Scene spec JSON (used instead of a preset).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub noise_amplitude: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FanoArgs {
    #[command(flatten)]
    pub common: Common,
    /// Score this band of the cube.
    #[arg(long)]
    pub band: Option<usize>,
    /// Score the average of bands LO..=HI.
    #[arg(long)]
    pub approx_gt: Option<String>,
    /// Score a real-valued estimate CSV.
    #[arg(long)]
    pub estimate: Option<PathBuf>,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub cube: Option<PathBuf>,
    pub gt: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub bins: Option<u32>,
    pub labeled_only: Option<bool>,
    pub approx_gt: Option<String>,
    pub threshold: Option<f64>,
    pub thresholds: Option<Vec<f64>>,
    pub max_bands: Option<usize>,
    pub candidates: Option<Vec<usize>>,
    pub counts: Option<Vec<usize>>,
    pub train_fraction: Option<f64>,
    pub seed: Option<u64>,
    pub stratified: Option<bool>,
    pub bands: Option<Vec<usize>>,
    pub selection: Option<PathBuf>,
    pub preset: Option<String>,
    pub size: Option<usize>,
    pub spec: Option<PathBuf>,
    pub noise_amplitude: Option<f64>,
    pub band: Option<usize>,
    pub estimate: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Resolved common settings.
struct Inputs {
    cube: Option<PathBuf>,
    gt: Option<PathBuf>,
    out: PathBuf,
    bins: u32,
    labeled_only: bool,
}

fn absolute(path: PathBuf) -> Result<PathBuf> {
    std::path::absolute(&path).map_err(|e| Error::io(path, e))
}

impl Inputs {
    fn resolve(common: Common, file: &FileConfig) -> Result<Self> {
        let out = absolute(
            common
                .out
                .or_else(|| file.out.clone())
                .unwrap_or_else(|| ".".into()),
        )?;
        let bins = common.bins.or(file.bins).unwrap_or(DEFAULT_BINS);
        if bins < 2 {
            return Err(Error::validation("bins", "must be at least 2"));
        }
        Ok(Inputs {
            cube: common
                .cube
                .or_else(|| file.cube.clone())
                .map(absolute)
                .transpose()?,
            gt: common
                .gt
                .or_else(|| file.gt.clone())
                .map(absolute)
                .transpose()?,
            out,
            bins,
            labeled_only: common.labeled_only.or(file.labeled_only).unwrap_or(true),
        })
    }

    fn cube(&self) -> Result<HyperCube> {
        let path = self
            .cube
            .as_ref()
            .ok_or_else(|| Error::validation("cube", "required"))?;
        load_cube(path)
    }

    fn gt(&self) -> Result<crate::GroundTruth> {
        let path = self
            .gt
            .as_ref()
            .ok_or_else(|| Error::validation("gt", "required"))?;
        load_gt(path)
    }

    fn out_dir(&self) -> Result<&Path> {
        fs::create_dir_all(&self.out).map_err(|e| Error::io(&self.out, e))?;
        Ok(&self.out)
    }
}

fn split_spec(args: SplitArgs, file: &FileConfig) -> Result<SplitSpec> {
    let defaults = SplitSpec::default();
    let spec = SplitSpec {
        train_fraction: args
            .train_fraction
            .or(file.train_fraction)
            .unwrap_or(defaults.train_fraction),
        seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
        stratified: args
            .stratified
            .or(file.stratified)
            .unwrap_or(defaults.stratified),
    };
    spec.validate()?;
    Ok(spec)
}

fn parse_range(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::validation("approx_gt", format!("expected LO:HI, got {text:?}"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// A selection result as written to disk, tagged with its run id.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub run_id: String,
    #[serde(flatten)]
    pub result: SelectionResult,
}

impl From<SelectionResult> for SelectionRecord {
    fn from(result: SelectionResult) -> Self {
        SelectionRecord {
            run_id: result.run_id(),
            result,
        }
    }
}

fn cmd_rank(args: RankArgs, file: &FileConfig) -> Result<()> {
    let approx = args.approx_gt.or_else(|| file.approx_gt.clone());
    let inputs = Inputs::resolve(args.common, file)?;
    let cube = inputs.cube()?;
    let mut cfg = SelectionConfig::new(0.0, cube.n_bands());
    cfg.n_bins = inputs.bins;
    cfg.labeled_only = inputs.labeled_only;

    let estimate = approx
        .as_deref()
        .map(|text| -> Result<_> {
            let (lo, hi) = parse_range(text)?;
            Ok(approx_gt_band_average(&cube, lo, hi)?.quantize(inputs.bins))
        })
        .transpose()?;
    let gt = if inputs.gt.is_some() {
        Some(inputs.gt()?)
    } else {
        None
    };
    let reference = match (&gt, &estimate) {
        (Some(gt), _) => Reference::Truth(gt),
        (None, Some(q)) => Reference::Estimate(q),
        (None, None) => {
            return Err(Error::validation(
                "gt",
                "required unless --approx-gt is given",
            ))
        }
    };
    let ranking = rank_bands(&cube, reference, &cfg)?;
    let out = inputs.out_dir()?;

    let mut csv = String::from("band,mi\n");
    for score in &ranking {
        csv.push_str(&format!("{},{}\n", score.band, score.mi_with_gt));
    }
    write_atomic(out.join("ranking.csv"), csv.as_bytes())?;

    // Per-band curve in band order; with both references, one column each.
    let mut by_band = ranking.clone();
    by_band.sort_by_key(|s| s.band);
    let approx_column = match (&gt, &estimate) {
        (Some(_), Some(q)) => Some(
            by_band
                .iter()
                .map(|s| mutual_information(q, &quantize_band(&cube, s.band, inputs.bins)?, None))
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => None,
    };
    let mut curve = String::from(if approx_column.is_some() {
        "band,mi,mi_approx\n"
    } else {
        "band,mi\n"
    });
    for (i, score) in by_band.iter().enumerate() {
        match &approx_column {
            Some(col) => {
                curve.push_str(&format!("{},{},{}\n", score.band, score.mi_with_gt, col[i]))
            }
            None => curve.push_str(&format!("{},{}\n", score.band, score.mi_with_gt)),
        }
    }
    write_atomic(out.join("band_mi.csv"), curve.as_bytes())?;

    if args.json {
        write_json(&out.join("ranking.json"), &ranking)?;
    }
    println!(
        "ranked {} bands, best band {} (MI = {})",
        ranking.len(),
        ranking[0].band,
        ranking[0].mi_with_gt
    );
    Ok(())
}

fn cmd_select(args: SelectArgs, file: &FileConfig) -> Result<()> {
    let threshold = args.threshold.or(file.threshold).unwrap_or(0.0);
    let thresholds = args.thresholds.or_else(|| file.thresholds.clone());
    let max_bands = args.max_bands.or(file.max_bands);
    let candidates = args.candidates.or_else(|| file.candidates.clone());
    let counts = args.counts.or_else(|| file.counts.clone());
    let split = split_spec(args.split, file)?;
    let inputs = Inputs::resolve(args.common, file)?;
    let cube = inputs.cube()?;
    let gt = inputs.gt()?;
    if gt.labeled_count() == 0 {
        return Err(Error::Degenerate(
            "ground truth has no labeled pixels".into(),
        ));
    }

    let cfg = SelectionConfig {
        threshold,
        max_bands: max_bands.unwrap_or(cube.n_bands()),
        n_bins: inputs.bins,
        labeled_only: inputs.labeled_only,
        candidate_bands: candidates,
    };
    let out = inputs.out_dir()?;

    let Some(thresholds) = thresholds else {
        let result = select_bands(&cube, &gt, &cfg)?;
        write_atomic(out.join("selection.csv"), result.to_csv().as_bytes())?;
        println!(
            "selected {} of {} bands, final MI = {}",
            result.selected.len(),
            cube.n_bands(),
            result.final_mi
        );
        write_json(&out.join("selection.json"), &SelectionRecord::from(result))?;
        return Ok(());
    };

    if thresholds.is_empty() {
        return Err(Error::validation("thresholds", "empty list"));
    }
    let results = select_sweep(&cube, &gt, &cfg, &thresholds)?;
    let mut summary = String::from("threshold,bands_retained,final_mi,run_id\n");
    for result in &results {
        let th = result.config.threshold;
        let record = SelectionRecord::from(result.clone());
        summary.push_str(&format!(
            "{th},{},{},{}\n",
            result.selected.len(),
            result.final_mi,
            record.run_id
        ));
        write_atomic(
            out.join(format!("selection_th{th}.csv")),
            result.to_csv().as_bytes(),
        )?;
        write_json(&out.join(format!("selection_th{th}.json")), &record)?;
        println!(
            "threshold {th}: selected {} of {} bands, final MI = {}",
            result.selected.len(),
            cube.n_bands(),
            result.final_mi
        );
    }
    write_atomic(out.join("sweep.csv"), summary.as_bytes())?;

    if args.eval {
        let longest = results.iter().map(|r| r.selected.len()).max().unwrap_or(0);
        let rows = counts.unwrap_or_else(|| (1..=longest).collect());
        let mut table = String::from("bands_retained");
        for th in &thresholds {
            table.push_str(&format!(",{th}"));
        }
        table.push('\n');
        for &k in &rows {
            table.push_str(&k.to_string());
            for result in &results {
                if k == 0 || k > result.selected.len() {
                    table.push_str(",-");
                } else {
                    let report = evaluate_subset(&cube, &gt, &result.selected[..k], &split)?;
                    table.push_str(&format!(",{}", report.overall_accuracy));
                }
            }
            table.push('\n');
        }
        write_atomic(out.join("table2.csv"), table.as_bytes())?;
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs, file: &FileConfig) -> Result<()> {
    let bands = args.bands.or_else(|| file.bands.clone());
    let selection = args.selection.or_else(|| file.selection.clone());
    let split = split_spec(args.split, file)?;
    let inputs = Inputs::resolve(args.common, file)?;

    let (bands, source_run) = match (bands, selection) {
        (Some(bands), _) => (bands, None),
        (None, Some(path)) => {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let record: SelectionRecord =
                serde_json::from_str(&text).map_err(|source| Error::Json { path, source })?;
            (record.result.selected, Some(record.run_id))
        }
        (None, None) => return Err(Error::validation("bands", "give --bands or --selection")),
    };
    let cube = inputs.cube()?;
    let gt = inputs.gt()?;
    let report = EvalReport {
        source_run,
        ..evaluate_subset(&cube, &gt, &bands, &split)?
    };
    let out = inputs.out_dir()?;
    write_json(&out.join("eval.json"), &report)?;
    write_atomic(out.join("eval.csv"), report.to_csv().as_bytes())?;
    println!(
        "accuracy {}% on {} test pixels using {} bands",
        report.overall_accuracy,
        report.n_test,
        report.bands_used.len()
    );
    Ok(())
}

fn cmd_synth(args: SynthArgs, file: &FileConfig) -> Result<()> {
    let out = absolute(
        args.out
            .or_else(|| file.out.clone())
            .unwrap_or_else(|| ".".into()),
    )?;
    let preset = args.preset.or_else(|| file.preset.clone());
    let spec_path = args.spec.or_else(|| file.spec.clone());
    let size = args.size.or(file.size).unwrap_or(64);
    let noise = args.noise_amplitude.or(file.noise_amplitude);
    let seed = args.seed.or(file.seed);

    let mut spec = match (preset.as_deref(), spec_path) {
        (Some("table1"), None) => Some(SceneSpec::table1(size)?),
        (Some("separable"), None) => None,
        (Some(other), None) => {
            return Err(Error::validation(
                "preset",
                format!("unknown preset {other:?}"),
            ))
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            Some(
                serde_json::from_str::<SceneSpec>(&text)
                    .map_err(|source| Error::Json { path, source })?,
            )
        }
        (Some(_), Some(_)) => {
            return Err(Error::validation(
                "preset",
                "give either --preset or --spec",
            ))
        }
        (None, None) => return Err(Error::validation("preset", "give --preset or --spec")),
    };

    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    match spec.as_mut() {
        Some(spec) => {
            if let Some(noise) = noise {
                spec.noise_amplitude = noise;
            }
            if seed.is_some() {
                spec.noise_seed = seed;
            }
            let scenario = table1_scenario(spec)?;
            write_cube(&scenario.cube, out.join("cube.json"))?;
            write_gt(&scenario.gt, out.join("gt.csv"))?;
            write_json(&out.join("expected.json"), &scenario.expected)?;
            println!("wrote 3-band {size}x{size} scene to {}", out.display());
        }
        None => {
            if noise.is_some_and(|n| n != 0.0) {
                return Err(Error::validation(
                    "noise_amplitude",
                    "the separable preset is noise-free",
                ));
            }
            let (cube, gt) = separable_scenario(size)?;
            write_cube(&cube, out.join("cube.json"))?;
            write_gt(&gt, out.join("gt.csv"))?;
            println!(
                "wrote {}-band {size}x{size} scene to {}",
                cube.n_bands(),
                out.display()
            );
        }
    }
    Ok(())
}

fn cmd_fano(args: FanoArgs, file: &FileConfig) -> Result<()> {
    let band = args.band.or(file.band);
    let approx = args.approx_gt.or_else(|| file.approx_gt.clone());
    let estimate = args.estimate.or_else(|| file.estimate.clone());
    let inputs = Inputs::resolve(args.common, file)?;
    let gt = inputs.gt()?;

    let image = match (band, approx, estimate) {
        (Some(band), None, None) => quantize_band(&inputs.cube()?, band, inputs.bins)?,
        (None, Some(range), None) => {
            let (lo, hi) = parse_range(&range)?;
            approx_gt_band_average(&inputs.cube()?, lo, hi)?.quantize(inputs.bins)
        }
        (None, None, Some(path)) => load_real_csv(absolute(path)?)?.quantize(inputs.bins),
        _ => {
            return Err(Error::validation(
                "band",
                "give exactly one of --band, --approx-gt, --estimate",
            ))
        }
    };
    let mask = gt_mask(&gt, inputs.labeled_only);
    let bounds = fano_bounds(&gt, &image, mask.as_ref())?;
    let out = inputs.out_dir()?;
    write_json(&out.join("fano.json"), &bounds)?;
    println!(
        "H(C) = {}, H(C|X) = {}, MI = {}, bounds [{}, {}]",
        bounds.h_c, bounds.h_c_given_x, bounds.mi, bounds.lower, bounds.upper
    );
    Ok(())
}

/// Runs a parsed command.
pub fn execute(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Rank(args) => cmd_rank(args, &file),
        Command::Select(args) => cmd_select(args, &file),
        Command::Eval(args) => cmd_eval(args, &file),
        Command::Synth(args) => cmd_synth(args, &file),
        Command::Fano(args) => cmd_fano(args, &file),
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Degenerate(_) => 3,
        _ => 2,
    }
}

/// Parses `args`, runs the command, and maps the outcome to an exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

pub fn main() -> ExitCode {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
    run(std::env::args_os())
}
