//! Benchmark harness: pixel matching, scoring, dataset runs and sweeps.

mod dataset;
mod matching;
mod sweep;

pub use dataset::{
    evaluate_dataset, evaluate_loaded, Dataset, DatasetEntry, DatasetReport, EvalOptions, ImageRow, LoadedDataset,
};
pub use matching::{cpm_match, cpm_match_with, default_max_dist, MatchResult, Matcher};
pub use sweep::{compare_runs, expand_values, run_single, sweep, write_report, SweepConfig, SweepRow, SweepTable};

use crate::error::{Error, Result};
use crate::imgproc::EdgeMap;

/// Precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Score {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Pooled match counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Counts {
    pub fn new(tp: usize, fp: usize, fn_: usize) -> Self {
        Counts { tp, fp, fn_ }
    }

    pub fn score(&self) -> Score {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Score { precision, recall, f1 }
    }
}

impl std::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts::new(self.tp + o.tp, self.fp + o.fp, self.fn_ + o.fn_)
    }
}

impl std::iter::Sum for Counts {
    fn sum<I: Iterator<Item = Counts>>(iter: I) -> Counts {
        iter.fold(Counts::default(), |a, b| a + b)
    }
}

impl From<&MatchResult> for Counts {
    fn from(m: &MatchResult) -> Counts {
        Counts::new(m.tp, m.fp, m.fn_)
    }
}

/// `P = TP / (TP + FP)`, `R = TP / (TP + FN)`, `F1 = 2PR / (P + R)`; any
/// vanishing denominator yields 0.
pub fn score(m: &MatchResult) -> Score {
    Counts::from(m).score()
}

/// One or more human boundary maps for an image.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub image_id: String,
    pub annotator_maps: Vec<EdgeMap>,
    pub union_map: EdgeMap,
}

impl GroundTruth {
    pub fn new(image_id: impl Into<String>, annotator_maps: Vec<EdgeMap>) -> Result<Self> {
        let image_id = image_id.into();
        let first = annotator_maps
            .first()
            .ok_or_else(|| Error::Dataset(format!("{image_id}: no ground-truth maps")))?;
        let mut union_map = first.clone();
        for m in &annotator_maps[1..] {
            union_map = union_map.union(m)?;
        }
        Ok(GroundTruth {
            image_id,
            annotator_maps,
            union_map,
        })
    }

    pub fn width(&self) -> usize {
        self.union_map.width()
    }

    pub fn height(&self) -> usize {
        self.union_map.height()
    }
}

/// How several annotations of one image are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    /// Match against the pixelwise OR of all annotators.
    #[default]
    Union,
    /// Score each annotator separately and keep the highest F1.
    BestAnnotator,
}

impl Policy {
    pub fn parse(s: &str) -> Option<Policy> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "union" => Some(Policy::Union),
            "best_annotator" | "best" => Some(Policy::BestAnnotator),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Union => "union",
            Policy::BestAnnotator => "best_annotator",
        }
    }
}

/// Counts of the chosen comparison; under `BestAnnotator` the first
/// annotator with the highest F1 wins.
pub fn evaluate_counts(
    result: &EdgeMap,
    gt: &GroundTruth,
    policy: Policy,
    max_dist: f64,
    matcher: Matcher,
) -> Result<Counts> {
    match policy {
        Policy::Union => Ok(Counts::from(&cpm_match_with(result, &gt.union_map, max_dist, matcher)?)),
        Policy::BestAnnotator => {
            let mut best: Option<Counts> = None;
            for m in &gt.annotator_maps {
                let c = Counts::from(&cpm_match_with(result, m, max_dist, matcher)?);
                if best.is_none_or(|b| c.score().f1 > b.score().f1) {
                    best = Some(c);
                }
            }
            Ok(best.expect("ground truth holds at least one map"))
        }
    }
}

pub fn evaluate(result: &EdgeMap, gt: &GroundTruth, policy: Policy, max_dist: f64) -> Result<Score> {
    Ok(evaluate_counts(result, gt, policy, max_dist, Matcher::Exact)?.score())
}
