//! Evaluation report: an aligned per-class table followed by CSV rows.

use std::fmt::Write as _;
use std::time::Duration;

use cbir_core::schema::component_name;
use cbir_core::{EvalReport, GroupWeights, QueryPolicy, FEATURE_COUNT};

/// Settings echoed into the report header.
#[derive(Clone, Debug)]
pub struct ReportContext {
    /// Content digest of the index file.
    pub index_digest: String,
    pub records: usize,
    pub weights: GroupWeights,
    /// Where the mask came from, `None` for the full mask.
    pub mask_source: Option<String>,
    /// Only written when set, so reports stay byte-reproducible by default.
    pub elapsed: Option<Duration>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_eval(report: &EvalReport, ctx: &ReportContext) -> String {
    let mut s = String::new();
    s.push_str("# cbir evaluation report\n");
    let _ = writeln!(s, "index_digest = {}", ctx.index_digest);
    let _ = writeln!(s, "records = {}", ctx.records);
    let _ = writeln!(s, "k = {}", report.k);
    let policy = match report.policy {
        QueryPolicy::All => "all".to_string(),
        QueryPolicy::Stratified { per_class } => per_class.to_string(),
    };
    let _ = writeln!(s, "queries_per_class = {policy}");
    let _ = writeln!(s, "lambda_wavelet_stat = {}", ctx.weights.wavelet_stat);
    let _ = writeln!(s, "lambda_dcd = {}", ctx.weights.dcd);
    let _ = writeln!(s, "lambda_hist = {}", ctx.weights.hist);
    let _ = writeln!(s, "mask_source = {}", ctx.mask_source.as_deref().unwrap_or("full"));
    let _ = writeln!(s, "mask_selected = {} of {FEATURE_COUNT}", report.mask.count());
    let names: Vec<String> = report.mask.indices().map(component_name).collect();
    let _ = writeln!(s, "mask = {}", serde_json::Value::from(names));
    if let Some(t) = ctx.elapsed {
        let _ = writeln!(s, "elapsed_seconds = {:.3}", t.as_secs_f64());
    }
    for id in &report.skipped {
        let _ = writeln!(s, "skipped_query = {id}");
    }

    let width = report
        .rows
        .iter()
        .map(|r| r.label.chars().count())
        .chain(["Average".len(), "Class".len()])
        .max()
        .unwrap_or(5);
    s.push('\n');
    let _ = writeln!(
        s,
        "{:<width$}  {:>6}  {:>7}  {:>9}  {:>7}  {:>9}",
        "Class", "Images", "Queries", "Precision", "Recall", "F-measure"
    );
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{:<width$}  {:>6}  {:>7}  {:>9.3}  {:>7.3}  {:>9.3}",
            r.label, r.class_size, r.queries, r.precision, r.recall, r.f_measure
        );
    }
    let _ = writeln!(
        s,
        "{:<width$}  {:>6}  {:>7}  {:>9.3}  {:>7.3}  {:>9.3}",
        "Average",
        report.rows.iter().map(|r| r.class_size).sum::<usize>(),
        report.rows.iter().map(|r| r.queries).sum::<usize>(),
        report.precision,
        report.recall,
        report.f_measure
    );

    s.push_str("\n[rows]\nclass,images,queries,precision,recall,f_measure\n");
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            csv_field(&r.label),
            r.class_size,
            r.queries,
            r.precision,
            r.recall,
            r.f_measure
        );
    }
    let _ = writeln!(
        s,
        "average,,,{},{},{}",
        report.precision, report.recall, report.f_measure
    );
    s
}
