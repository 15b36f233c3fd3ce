use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::warn;
use rayon::prelude::*;

use super::{default_max_dist, evaluate_counts, Counts, GroundTruth, Matcher, Policy, Score};
use crate::error::{Error, Result};
use crate::imgproc::{load_gray, EdgeMap, GrayImage};
use crate::pipelines::Pipeline;

/// One image and its ground-truth files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetEntry {
    pub id: String,
    pub image: PathBuf,
    pub ground_truth: Vec<PathBuf>,
}

/// `images/<id>.(png|jpg)` with `gt/<id>.gt<k>.png`, sorted by id.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub root: PathBuf,
    pub entries: Vec<DatasetEntry>,
    /// Image ids without any ground-truth file.
    pub missing_ground_truth: Vec<String>,
}

fn sorted_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Dataset(format!("cannot list {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    v.sort();
    Ok(v)
}

impl Dataset {
    pub fn open(root: &Path) -> Result<Dataset> {
        let mut gts: BTreeMap<String, Vec<(u32, PathBuf)>> = BTreeMap::new();
        for p in sorted_dir(&root.join("gt"))? {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            let Some(stem) = name.strip_suffix(".png") else {
                continue;
            };
            let Some((id, k)) = stem.rsplit_once(".gt") else {
                continue;
            };
            let Ok(k) = k.parse::<u32>() else { continue };
            gts.entry(id.to_string()).or_default().push((k, p.clone()));
        }
        let mut entries = Vec::new();
        let mut missing_ground_truth = Vec::new();
        for p in sorted_dir(&root.join("images"))? {
            let ext = p
                .extension()
                .and_then(|e| e.to_str())
                .unwrap_or_default()
                .to_ascii_lowercase();
            if !matches!(ext.as_str(), "png" | "jpg" | "jpeg") {
                continue;
            }
            let id = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            match gts.get_mut(&id) {
                Some(list) => {
                    list.sort();
                    entries.push(DatasetEntry {
                        id,
                        image: p,
                        ground_truth: list.iter().map(|(_, p)| p.clone()).collect(),
                    });
                }
                None => {
                    warn!("{id}: no ground truth, skipped");
                    missing_ground_truth.push(id);
                }
            }
        }
        entries.sort_by(|a, b| a.id.cmp(&b.id));
        if entries.is_empty() {
            return Err(Error::Dataset(format!(
                "{}: no images with ground truth",
                root.display()
            )));
        }
        Ok(Dataset {
            root: root.to_path_buf(),
            entries,
            missing_ground_truth,
        })
    }

    /// Loads every image and annotation; entries whose maps disagree in size
    /// with their image are set aside.
    pub fn load(&self) -> Result<LoadedDataset> {
        let loaded: Vec<Result<Loaded>> = self
            .entries
            .par_iter()
            .map(|e| {
                let img = load_gray(&e.image)?;
                let mut maps = Vec::new();
                for p in &e.ground_truth {
                    let m = EdgeMap::from_gray(&load_gray(p)?);
                    if (m.width(), m.height()) != (img.width(), img.height()) {
                        let why = format!(
                            "{} is {}x{} but the image is {}x{}",
                            p.display(),
                            m.width(),
                            m.height(),
                            img.width(),
                            img.height()
                        );
                        return Ok(Err((e.id.clone(), why)));
                    }
                    maps.push(m);
                }
                Ok(Ok((e.id.clone(), img, GroundTruth::new(e.id.clone(), maps)?)))
            })
            .collect();
        let mut items = Vec::new();
        let mut skipped: Vec<(String, String)> = self
            .missing_ground_truth
            .iter()
            .map(|id| (id.clone(), "no ground truth".to_string()))
            .collect();
        for r in loaded {
            match r? {
                Ok(item) => items.push(item),
                Err((id, why)) => {
                    warn!("{id}: {why}, skipped");
                    skipped.push((id, why));
                }
            }
        }
        Ok(LoadedDataset { items, skipped })
    }
}

/// One entry: decoded, or `(id, reason)` when set aside.
type Loaded = std::result::Result<(String, GrayImage, GroundTruth), (String, String)>;

/// Decoded images with their ground truth.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub items: Vec<(String, GrayImage, GroundTruth)>,
    /// `(image id, reason)`
    pub skipped: Vec<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub policy: Policy,
    pub matcher: Matcher,
    /// Fixed matching radius; `None` uses the diagonal rule per image.
    pub max_dist: Option<f64>,
    /// Worker threads; 0 picks the rayon default.
    pub workers: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            policy: Policy::Union,
            matcher: Matcher::Exact,
            max_dist: None,
            workers: 0,
        }
    }
}

impl EvalOptions {
    pub fn max_dist_for(&self, width: usize, height: usize) -> f64 {
        self.max_dist.unwrap_or_else(|| default_max_dist(width, height))
    }

    pub(crate) fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        if self.workers == 0 {
            return Ok(f());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::param("workers", e.to_string()))?;
        Ok(pool.install(f))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageRow {
    pub image_id: String,
    pub counts: Counts,
    pub score: Score,
}

/// Per-image rows plus counts pooled over all images.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetReport {
    pub rows: Vec<ImageRow>,
    pub skipped: Vec<(String, String)>,
    pub total: Counts,
    pub score: Score,
}

pub fn evaluate_loaded(pipeline: &Pipeline, data: &LoadedDataset, opts: &EvalOptions) -> Result<DatasetReport> {
    let rows: Result<Vec<ImageRow>> = opts.install(|| {
        data.items
            .par_iter()
            .map(|(id, img, gt)| {
                let edges = pipeline.run(img)?;
                let d = opts.max_dist_for(img.width(), img.height());
                let counts = evaluate_counts(&edges, gt, opts.policy, d, opts.matcher)?;
                Ok(ImageRow {
                    image_id: id.clone(),
                    counts,
                    score: counts.score(),
                })
            })
            .collect()
    })?;
    let rows = rows?;
    let total: Counts = rows.iter().map(|r| r.counts).sum();
    Ok(DatasetReport {
        rows,
        skipped: data.skipped.clone(),
        total,
        score: total.score(),
    })
}

pub fn evaluate_dataset(pipeline: &Pipeline, dataset: &Dataset, opts: &EvalOptions) -> Result<DatasetReport> {
    let data = opts.install(|| dataset.load())??;
    evaluate_loaded(pipeline, &data, opts)
}
