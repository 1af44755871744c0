//! Precision / recall / F-measure at K over a class-labelled index.
//!
//! Queries are drawn from the index itself and excluded from their own result
//! lists, so recall is measured against `class size − 1` relevant images.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::mask::FeatureMask;
use crate::rank::{MaskPlan, Ranker};

/// Which index records act as queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryPolicy {
    /// Every image is a query.
    All,
    /// Up to `per_class` images per class, evenly spaced through the class in id order.
    Stratified { per_class: usize },
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Query record indices under `policy`, grouped by class and in id order.
pub fn select_queries(ranker: &Ranker<'_>, policy: QueryPolicy) -> Vec<usize> {
    let index = ranker.index();
    match policy {
        QueryPolicy::All => (0..index.len()).collect(),
        QueryPolicy::Stratified { per_class } => {
            let mut out = Vec::new();
            for members in index.classes().values() {
                let n = members.len();
                let take = per_class.min(n);
                out.extend((0..take).map(|j| members[j * n / take]));
            }
            out
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QueryOutcome {
    pub record: usize,
    pub relevant_retrieved: usize,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

/// Scores one indexed query. `None` when its class has no other member.
pub fn score_query(ranker: &Ranker<'_>, record: usize, plan: &MaskPlan, k: usize) -> Option<QueryOutcome> {
    let index = ranker.index();
    let query = &index.records()[record];
    let relevant_total = index.class_size(&query.label) - 1;
    if relevant_total == 0 || k == 0 {
        return None;
    }
    let hits = ranker
        .nearest(&query.features, Some(record), plan, k)
        .into_iter()
        .filter(|(i, _)| index.records()[*i].label == query.label)
        .count();
    let precision = hits as f64 / k as f64;
    let recall = hits as f64 / relevant_total as f64;
    Some(QueryOutcome {
        record,
        relevant_retrieved: hits,
        precision,
        recall,
        f_measure: f_measure(precision, recall),
    })
}

fn score_all(ranker: &Ranker<'_>, queries: &[usize], plan: &MaskPlan, k: usize) -> Vec<Option<QueryOutcome>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        queries
            .par_iter()
            .map(|&q| score_query(ranker, q, plan, k))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        queries.iter().map(|&q| score_query(ranker, q, plan, k)).collect()
    }
}

/// Mean per-query F-measure over `queries`; skipped queries are ignored.
pub fn mean_f_measure(ranker: &Ranker<'_>, queries: &[usize], plan: &MaskPlan, k: usize) -> f64 {
    let scored: Vec<f64> = score_all(ranker, queries, plan, k)
        .into_iter()
        .flatten()
        .map(|o| o.f_measure)
        .collect();
    if scored.is_empty() {
        0.0
    } else {
        scored.iter().sum::<f64>() / scored.len() as f64
    }
}

/// Averages for one class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassRow {
    pub label: String,
    pub class_size: usize,
    pub queries: usize,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub k: usize,
    pub mask: FeatureMask,
    pub policy: QueryPolicy,
    pub rows: Vec<ClassRow>,
    /// Unweighted means of the class rows.
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// Mean per-query F-measure over all scored queries.
    pub query_f_measure: f64,
    /// Ids of queries skipped because their class has a single image.
    pub skipped: Vec<String>,
}

pub fn evaluate(ranker: &Ranker<'_>, mask: &FeatureMask, k: usize, policy: QueryPolicy) -> Result<EvalReport> {
    let plan = ranker.plan(mask)?;
    let index = ranker.index();
    let queries = select_queries(ranker, policy);
    let outcomes = score_all(ranker, &queries, &plan, k);

    let mut skipped = Vec::new();
    let mut rows = Vec::new();
    let mut all_f = Vec::new();
    for (label, members) in index.classes() {
        let scored: Vec<QueryOutcome> = queries
            .iter()
            .zip(&outcomes)
            .filter(|(q, _)| index.records()[**q].label == label)
            .filter_map(|(q, o)| {
                if o.is_none() {
                    skipped.push(index.records()[*q].id.clone());
                }
                *o
            })
            .collect();
        if scored.is_empty() {
            continue;
        }
        let n = scored.len() as f64;
        let avg = |f: fn(&QueryOutcome) -> f64| scored.iter().map(f).sum::<f64>() / n;
        all_f.extend(scored.iter().map(|o| o.f_measure));
        rows.push(ClassRow {
            label: String::from(label),
            class_size: members.len(),
            queries: scored.len(),
            precision: avg(|o| o.precision),
            recall: avg(|o| o.recall),
            f_measure: avg(|o| o.f_measure),
        });
    }
    let mean_of = |f: fn(&ClassRow) -> f64| {
        if rows.is_empty() {
            0.0
        } else {
            rows.iter().map(f).sum::<f64>() / rows.len() as f64
        }
    };
    Ok(EvalReport {
        k,
        mask: *mask,
        policy,
        precision: mean_of(|r| r.precision),
        recall: mean_of(|r| r.recall),
        f_measure: mean_of(|r| r.f_measure),
        query_f_measure: if all_f.is_empty() {
            0.0
        } else {
            all_f.iter().sum::<f64>() / all_f.len() as f64
        },
        rows,
        skipped,
    })
}
