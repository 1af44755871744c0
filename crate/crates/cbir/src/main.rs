use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context};
use cbir::config::RunConfig;
use cbir::contact::render_contact_sheet;
use cbir::maskfile::{load_mask, render_selection};
use cbir::report::{render_eval, ReportContext};
use cbir::store::{index_to_json, load_index, save_index};
use cbir::{build_index, featurize};
use cbir_core::aco::select_features;
use cbir_core::eval::evaluate;
use cbir_core::rank::Query;
use cbir_core::{FeatureMask, ImageIndex, QueryPolicy, Ranker};
use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "cbir", version, about = "Content-based image retrieval with ant-colony feature selection")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Featurise a `<corpus>/<class>/<image>` tree and write an index file.
    Index {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write a JSON dump of the index.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Rank the index against an image file.
    Query {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        image: PathBuf,
        /// Mask or selection report; defaults to all 126 components.
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        k: usize,
        /// Family weights are taken from this file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        contact_sheet: Option<PathBuf>,
    },
    /// Run ant-colony feature selection and write the selection report.
    Select {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides `seed` from the config; a fresh seed is drawn and printed if neither is set.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-class precision and recall at K with every image as a query.
    Eval {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        k: usize,
        /// Family weights are taken from this file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Queries per class, or `all`.
        #[arg(long, default_value = "all")]
        queries: String,
        /// Record wall-clock time in the report (makes it run-dependent).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: Option<&Path>) -> anyhow::Result<RunConfig> {
    Ok(match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    })
}

fn load_mask_or_full(path: Option<&Path>) -> anyhow::Result<FeatureMask> {
    Ok(match path {
        Some(p) => load_mask(p)?.mask,
        None => FeatureMask::full(),
    })
}

fn digest(path: &Path) -> anyhow::Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let d = Sha256::digest(&bytes);
    Ok(d[..8].iter().map(|b| format!("{b:02x}")).collect())
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_index(corpus: &Path, out: &Path, json: Option<&Path>) -> anyhow::Result<()> {
    let start = Instant::now();
    let (index, report) = build_index(corpus)?;
    save_index(&index, out)?;
    if let Some(j) = json {
        write(j, &serde_json::to_string_pretty(&index_to_json(&index))?)?;
    }
    println!(
        "indexed {} images in {} classes -> {} ({:.1}s)",
        report.indexed,
        index.classes().len(),
        out.display(),
        start.elapsed().as_secs_f64()
    );
    if !report.failures.is_empty() {
        println!("{} files could not be decoded:", report.failures.len());
        for f in &report.failures {
            println!("  {}: {}", f.path.display(), f.message);
        }
    }
    if !report.ignored.is_empty() {
        println!("{} non-image files ignored", report.ignored.len());
    }
    Ok(())
}

fn cmd_query(
    index_path: &Path,
    image: &Path,
    mask: Option<&Path>,
    k: usize,
    config: Option<&Path>,
    sheet: Option<&Path>,
) -> anyhow::Result<()> {
    let index = load_index(index_path)?;
    let mask = load_mask_or_full(mask)?;
    let cfg = load_config(config)?;
    if k == 0 {
        bail!("--k must be positive");
    }
    if k > index.len() {
        log::warn!("k = {k} exceeds the {} indexed images; returning all of them", index.len());
    }
    let id = image.display().to_string();
    let features = featurize(image, &id)?;
    let ranker = Ranker::new(&index, cfg.weights);
    let result = ranker.retrieve(Query::External { id: &id, features: &features }, &mask, k)?;
    println!("query {id} ({} of 126 components)", mask.count());
    println!("{:>4}  {:<40}  {:<16}  {:>10}", "rank", "id", "class", "distance");
    for (i, h) in result.hits.iter().enumerate() {
        println!("{:>4}  {:<40}  {:<16}  {:>10.6}", i + 1, h.id, h.label, h.distance);
    }
    if let Some(path) = sheet {
        let sources: Vec<&str> = result
            .hits
            .iter()
            .map(|h| index.position(&h.id).map_or("", |p| index.records()[p].source.as_str()))
            .collect();
        write(path, &render_contact_sheet(&result, &id, &sources))?;
        println!("contact sheet -> {}", path.display());
    }
    Ok(())
}

fn fresh_seed() -> u64 {
    let t = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    t.as_nanos() as u64 ^ u64::from(std::process::id()).rotate_left(32)
}

fn cmd_select(index_path: &Path, config: Option<&Path>, seed: Option<u64>, out: &Path) -> anyhow::Result<()> {
    let index = load_index(index_path)?;
    let mut cfg = load_config(config)?;
    let seed = seed.or(cfg.seed).unwrap_or_else(fresh_seed);
    cfg.seed = Some(seed);
    println!("seed = {seed}");
    let start = Instant::now();
    let ranker = Ranker::new(&index, cfg.weights);
    let sel = select_features(&ranker, &cfg.aco, seed)?;
    write(out, &render_selection(&sel, &cfg))?;
    println!(
        "selected {} of 126 components, F = {:.4} ({:.1}s) -> {}",
        sel.best.mask.count(),
        sel.best.f_measure,
        start.elapsed().as_secs_f64(),
        out.display()
    );
    Ok(())
}

fn parse_policy(s: &str) -> anyhow::Result<QueryPolicy> {
    Ok(match s {
        "all" | "0" => QueryPolicy::All,
        n => QueryPolicy::Stratified {
            per_class: n.parse().with_context(|| format!("--queries: expected a number or `all`, got {n:?}"))?,
        },
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    index_path: &Path,
    mask_path: Option<&Path>,
    k: usize,
    config: Option<&Path>,
    queries: &str,
    timing: bool,
    out: &Path,
) -> anyhow::Result<()> {
    let start = Instant::now();
    let index: ImageIndex = load_index(index_path)?;
    let mask = load_mask_or_full(mask_path)?;
    let cfg = load_config(config)?;
    let policy = parse_policy(queries)?;
    if k == 0 {
        bail!("--k must be positive");
    }
    if k >= index.len() {
        log::warn!("k = {k} is not smaller than the {} indexed images", index.len());
    }
    let ranker = Ranker::new(&index, cfg.weights);
    let report = evaluate(&ranker, &mask, k, policy)?;
    for id in &report.skipped {
        log::warn!("skipped query {id}: its class has no other image");
    }
    let ctx = ReportContext {
        index_digest: digest(index_path)?,
        records: index.len(),
        weights: cfg.weights,
        mask_source: mask_path.map(|p| p.display().to_string()),
        elapsed: timing.then(|| start.elapsed()),
    };
    let text = render_eval(&report, &ctx);
    write(out, &text)?;
    let table_end = text.find("\n[rows]").unwrap_or(text.len());
    let table_start = text[..table_end].rfind("\n\n").map_or(0, |i| i + 2);
    println!("{}", &text[table_start..table_end]);
    println!("({:.1}s) -> {}", start.elapsed().as_secs_f64(), out.display());
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Index { corpus, out, json } => cmd_index(&corpus, &out, json.as_deref()),
        Command::Query {
            index,
            image,
            mask,
            k,
            config,
            contact_sheet,
        } => cmd_query(&index, &image, mask.as_deref(), k, config.as_deref(), contact_sheet.as_deref()),
        Command::Select { index, config, seed, out } => cmd_select(&index, config.as_deref(), seed, &out),
        Command::Eval {
            index,
            mask,
            k,
            config,
            queries,
            timing,
            out,
        } => cmd_eval(&index, mask.as_deref(), k, config.as_deref(), &queries, timing, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
