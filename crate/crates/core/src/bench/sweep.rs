use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::dataset::{evaluate_loaded, Dataset, DatasetReport, EvalOptions, LoadedDataset};
use super::{Counts, Matcher, Policy, Score};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::pipelines::{normalize_key, parse_key_values, ParamMap, Pipeline};

/// A grid of pipeline parameters evaluated on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub pipeline: String,
    /// Parameter name to candidate values; single-valued axes pin a parameter.
    pub grid: BTreeMap<String, Vec<String>>,
    pub dataset: PathBuf,
    pub output: PathBuf,
    pub options: EvalOptions,
}

/// Expands `a,b,c` lists whose items may be inclusive `start:stop:step` ranges.
pub fn expand_values(spec: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(v.to_string()),
            [a, b, c] => {
                let num = |s: &str| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::param("grid", format!("bad number {s:?} in {item:?}")))
                };
                let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
                if !(step > 0.0) || stop < start {
                    return Err(Error::param(
                        "grid",
                        format!("range {item:?} needs step > 0 and stop >= start"),
                    ));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                for i in 0..=n {
                    let v = ((start + i as f64 * step) * 1e9).round() / 1e9;
                    out.push(format!("{v}"));
                }
            }
            _ => return Err(Error::param("grid", format!("cannot read {item:?}"))),
        }
    }
    if out.is_empty() {
        return Err(Error::param("grid", format!("empty value list {spec:?}")));
    }
    Ok(out)
}

impl SweepConfig {
    /// Reads a flat `key=value` file. `pipeline`, `dataset`, `output`,
    /// `policy`, `matcher`, `max-dist` and `workers` configure the run; every
    /// other key is a grid axis.
    pub fn parse(text: &str) -> Result<SweepConfig> {
        SweepConfig::from_map(parse_key_values(text)?)
    }

    pub fn from_map(mut map: ParamMap) -> Result<SweepConfig> {
        let mut take = |k: &str| map.remove(k);
        let pipeline = take("pipeline").ok_or_else(|| Error::param("pipeline", "missing"))?;
        let dataset = PathBuf::from(take("dataset").ok_or_else(|| Error::param("dataset", "missing"))?);
        let output = PathBuf::from(take("output").unwrap_or_else(|| format!("results/{pipeline}-sweep")));
        let mut options = EvalOptions::default();
        if let Some(p) = take("policy") {
            options.policy =
                Policy::parse(&p).ok_or_else(|| Error::param("policy", format!("unknown policy {p:?}")))?;
        }
        if let Some(m) = take("matcher") {
            options.matcher =
                Matcher::parse(&m).ok_or_else(|| Error::param("matcher", format!("unknown matcher {m:?}")))?;
        }
        if let Some(d) = take("max-dist") {
            let d: f64 = d
                .parse()
                .map_err(|_| Error::param("max-dist", format!("bad number {d:?}")))?;
            options.max_dist = Some(d);
        }
        if let Some(w) = take("workers") {
            options.workers = w
                .parse()
                .map_err(|_| Error::param("workers", format!("bad count {w:?}")))?;
        }
        let grid = map
            .into_iter()
            .map(|(k, v)| Ok((normalize_key(&k), expand_values(&v)?)))
            .collect::<Result<_>>()?;
        Ok(SweepConfig {
            pipeline,
            grid,
            dataset,
            output,
            options,
        })
    }

    /// Cartesian product in key order, last key varying fastest.
    pub fn combinations(&self) -> Vec<ParamMap> {
        let mut combos = vec![ParamMap::new()];
        for (k, values) in &self.grid {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |v| {
                        let mut c = c.clone();
                        c.insert(k.clone(), v.clone());
                        c
                    })
                })
                .collect();
        }
        combos
    }

    /// Resolves every combination up front so that a bad value fails before
    /// any image is processed.
    pub fn pipelines(&self) -> Result<Vec<Pipeline>> {
        self.combinations()
            .iter()
            .map(|c| Pipeline::from_params(&self.pipeline, c))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: Vec<(String, String)>,
    pub report: DatasetReport,
}

/// Evaluated combinations in deterministic order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub pipeline: String,
    pub dataset: String,
    pub options: EvalOptions,
    pub rows: Vec<SweepRow>,
    /// Index of the highest pooled F1; the earliest row wins ties.
    pub best: usize,
}

impl SweepTable {
    fn new(pipeline: String, dataset: String, options: EvalOptions, rows: Vec<SweepRow>) -> SweepTable {
        let mut best = 0;
        for (i, r) in rows.iter().enumerate() {
            if r.report.score.f1 > rows[best].report.score.f1 {
                best = i;
            }
        }
        SweepTable {
            pipeline,
            dataset,
            options,
            rows,
            best,
        }
    }

    pub fn best_row(&self) -> &SweepRow {
        &self.rows[self.best]
    }

    /// Parameter names in first-seen order across all rows.
    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = Vec::new();
        for r in &self.rows {
            for (k, _) in &r.params {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
        cols
    }
}

pub fn run_single(
    pipeline: &Pipeline,
    data: &LoadedDataset,
    dataset_label: &str,
    opts: &EvalOptions,
) -> Result<SweepTable> {
    let report = evaluate_loaded(pipeline, data, opts)?;
    Ok(SweepTable::new(
        pipeline.id().to_string(),
        dataset_label.to_string(),
        *opts,
        vec![SweepRow {
            params: pipeline.to_params(),
            report,
        }],
    ))
}

pub fn sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    let pipelines = cfg.pipelines()?;
    let dataset = Dataset::open(&cfg.dataset)?;
    let data = cfg.options.install(|| dataset.load())??;
    let mut rows = Vec::with_capacity(pipelines.len());
    for p in &pipelines {
        let report = evaluate_loaded(p, &data, &cfg.options)?;
        log::info!(
            "{}: F1 {:.4}",
            p.to_sidecar().trim().replace('\n', " "),
            report.score.f1
        );
        rows.push(SweepRow {
            params: p.to_params(),
            report,
        });
    }
    Ok(SweepTable::new(
        cfg.pipeline.clone(),
        cfg.dataset.display().to_string(),
        cfg.options,
        rows,
    ))
}

fn score_cells(c: &Counts, s: &Score) -> String {
    format!(
        "{},{},{},{:.6},{:.6},{:.6}",
        c.tp, c.fp, c.fn_, s.precision, s.recall, s.f1
    )
}

fn param_cells(cols: &[String], params: &[(String, String)]) -> Vec<String> {
    cols.iter()
        .map(|c| {
            params
                .iter()
                .find(|(k, _)| k == c)
                .map(|(_, v)| v.clone())
                .unwrap_or_default()
        })
        .collect()
}

fn max_dist_text(o: &EvalOptions) -> String {
    match o.max_dist {
        Some(d) => format!("{d} px"),
        None => "0.0075 x image diagonal".to_string(),
    }
}

/// Writes `scores.csv`, `plot.csv` and `summary.md` into `dir`.
pub fn write_report(dir: &Path, table: &SweepTable) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let cols = table.columns();
    let header_params = cols.join(",");

    let mut scores = format!("image_id,{header_params},tp,fp,fn,P,R,F1\n");
    let mut plot = format!("{header_params},tp,fp,fn,P,R,F1\n");
    for r in &table.rows {
        let params = param_cells(&cols, &r.params).join(",");
        for row in &r.report.rows {
            writeln!(
                scores,
                "{},{params},{}",
                row.image_id,
                score_cells(&row.counts, &row.score)
            )
            .unwrap();
        }
        writeln!(plot, "{params},{}", score_cells(&r.report.total, &r.report.score)).unwrap();
    }

    let best = table.best_row();
    let mut md = String::new();
    writeln!(md, "# {} on {}\n", table.pipeline, table.dataset).unwrap();
    writeln!(md, "- images evaluated: {}", best.report.rows.len()).unwrap();
    writeln!(md, "- images skipped: {}", best.report.skipped.len()).unwrap();
    for (id, why) in &best.report.skipped {
        writeln!(md, "  - {id}: {why}").unwrap();
    }
    writeln!(
        md,
        "- matcher: {} CPM, max distance {}",
        table.options.matcher.as_str(),
        max_dist_text(&table.options)
    )
    .unwrap();
    writeln!(md, "- annotator policy: {}", table.options.policy.as_str()).unwrap();
    writeln!(md, "- aggregation: TP/FP/FN pooled over images (micro-average)").unwrap();
    writeln!(md, "- combinations: {}\n", table.rows.len()).unwrap();
    writeln!(md, "## Best parameters\n").unwrap();
    for (k, v) in &best.params {
        writeln!(md, "- {k} = {v}").unwrap();
    }
    let s = best.report.score;
    writeln!(md, "\nP = {:.4}, R = {:.4}, F1 = {:.4}\n", s.precision, s.recall, s.f1).unwrap();
    writeln!(md, "## All combinations\n").unwrap();
    writeln!(md, "| {} | P | R | F1 |", cols.join(" | ")).unwrap();
    writeln!(md, "|{}", "---|".repeat(cols.len() + 3)).unwrap();
    for r in &table.rows {
        let s = r.report.score;
        writeln!(
            md,
            "| {} | {:.4} | {:.4} | {:.4} |",
            param_cells(&cols, &r.params).join(" | "),
            s.precision,
            s.recall,
            s.f1
        )
        .unwrap();
    }

    write_atomic(&dir.join("scores.csv"), scores.as_bytes())?;
    write_atomic(&dir.join("plot.csv"), plot.as_bytes())?;
    write_atomic(&dir.join("summary.md"), md.as_bytes())?;
    Ok(())
}

struct PlotRow {
    key: String,
    p: f64,
    r: f64,
    f1: f64,
}

fn read_plot(dir: &Path) -> Result<Vec<PlotRow>> {
    let path = dir.join("plot.csv");
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Dataset(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let n = header.len();
    if n < 6 {
        return Err(Error::Dataset(format!("{}: not a plot table", path.display())));
    }
    let names = &header[..n - 6];
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            if cells.len() != n {
                return Err(Error::Dataset(format!("{}: ragged row {l:?}", path.display())));
            }
            let num = |i: usize| {
                cells[i]
                    .parse::<f64>()
                    .map_err(|_| Error::Dataset(format!("{}: bad number {:?}", path.display(), cells[i])))
            };
            let key = names
                .iter()
                .zip(&cells)
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ");
            Ok(PlotRow {
                key,
                p: num(n - 3)?,
                r: num(n - 2)?,
                f1: num(n - 1)?,
            })
        })
        .collect()
}

/// Markdown comparison of two report directories: rows present in both
/// (matched by parameters) and each run's best row.
pub fn compare_runs(a: &Path, b: &Path) -> Result<String> {
    let ra = read_plot(a)?;
    let rb = read_plot(b)?;
    let best = |rows: &[PlotRow]| -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, r) in rows.iter().enumerate() {
            if best.is_none_or(|j| r.f1 > rows[j].f1) {
                best = Some(i);
            }
        }
        best
    };
    let mut out = String::new();
    writeln!(out, "# {} vs {}\n", a.display(), b.display()).unwrap();
    for (label, rows) in [("A", &ra), ("B", &rb)] {
        if let Some(i) = best(rows) {
            let r = &rows[i];
            writeln!(
                out,
                "- best {label}: {} (P {:.4}, R {:.4}, F1 {:.4})",
                r.key, r.p, r.r, r.f1
            )
            .unwrap();
        }
    }
    let shared: Vec<(&PlotRow, &PlotRow)> = ra
        .iter()
        .filter_map(|x| rb.iter().find(|y| y.key == x.key).map(|y| (x, y)))
        .collect();
    if !shared.is_empty() {
        writeln!(out, "\n| parameters | F1 A | F1 B | B - A |\n|---|---|---|---|").unwrap();
        for (x, y) in shared {
            writeln!(out, "| {} | {:.4} | {:.4} | {:+.4} |", x.key, x.f1, y.f1, y.f1 - x.f1).unwrap();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_expand_inclusively() {
        assert_eq!(expand_values("30:60:10").unwrap(), ["30", "40", "50", "60"]);
        assert_eq!(expand_values("0.25:1:0.25").unwrap(), ["0.25", "0.5", "0.75", "1"]);
        assert_eq!(expand_values("0.2:0.5:0.1").unwrap(), ["0.2", "0.3", "0.4", "0.5"]);
        assert_eq!(expand_values("sobel, prewitt").unwrap(), ["sobel", "prewitt"]);
        assert_eq!(expand_values("1,3:5:2").unwrap(), ["1", "3", "5"]);
        assert!(expand_values("").is_err());
        assert!(expand_values("5:1:1").is_err());
        assert!(expand_values("1:2:0").is_err());
    }

    #[test]
    fn config_and_combinations() {
        let cfg = SweepConfig::parse(
            "pipeline=first-order\ndataset=/data/x\npolicy=best_annotator\nworkers=2\nsigma=1,2\nthreshold=30:50:10\noperator=sobel\n",
        )
        .unwrap();
        assert_eq!(cfg.options.policy, Policy::BestAnnotator);
        assert_eq!(cfg.options.workers, 2);
        let combos = cfg.combinations();
        assert_eq!(combos.len(), 6);
        assert_eq!(combos[0]["sigma"], "1");
        assert_eq!(combos[1]["threshold"], "40");
        assert_eq!(combos[3]["sigma"], "2");
        assert_eq!(cfg.pipelines().unwrap().len(), 6);
        assert!(SweepConfig::parse("dataset=/x\n").is_err());
        let bad = SweepConfig::parse("pipeline=canny\ndataset=/x\nlow=100\nhigh=90\n").unwrap();
        assert!(bad.pipelines().is_err());
    }
}
