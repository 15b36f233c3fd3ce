//! Acceptance criteria. Criteria 1-6 run in one sequential test so that the
//! timing measurement is not disturbed by the other checks; criteria 7-9 need
//! the BSDS500 test split and are ignored unless requested.

mod common;

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::*;
use diledge::bench::{
    cpm_match, evaluate_loaded, score, Counts, Dataset, EvalOptions, LoadedDataset, MatchResult, SweepConfig,
};
use diledge::imgproc::{convolve_dense, convolve_sparse, convolve_sparse_counted, BorderPolicy, EdgeMap, RealPlane};
use diledge::kernels::{catalog_all, catalog_entries, catalog_get, dilate};
use diledge::operators::{gradient_from_components, MagnitudeMode};
use diledge::pipelines::{ParamMap, Pipeline};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Written straight to stderr so the lines show up without `--nocapture`.
fn line(id: &str, ok: bool, detail: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(
        err,
        "[acceptance] criterion {id}: {} - {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn time<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn criterion_1() -> Result<String, String> {
    let kernels = catalog_all();
    let jobs: Vec<(usize, usize)> = (0..kernels.len()).flat_map(|k| (0..4).map(move |f| (k, f))).collect();
    let (res, took) = time(|| {
        jobs.par_iter()
            .map(|&(ki, f)| {
                let k = dilate(&kernels[ki], f);
                let sparse = k.sparse();
                let mut rng = ChaCha8Rng::seed_from_u64((ki * 4 + f) as u64);
                for i in 0..100 {
                    let img = random_plane(&mut rng, 64, 64, 0.0, 255.0);
                    let a = convolve_sparse(&img, &sparse, BorderPolicy::Replicate);
                    let b = convolve_dense(&img, &k, BorderPolicy::Replicate);
                    if a != b {
                        return Err(format!("{} f={f} image {i} differs", k.name()));
                    }
                }
                Ok(())
            })
            .collect::<Result<Vec<()>, String>>()
    });
    res?;
    let cases = jobs.len() * 100;
    if took > Duration::from_secs(60) {
        return Err(format!("{cases} comparisons exact but took {took:.1?} (limit 60 s)"));
    }
    Ok(format!(
        "{} kernels x 4 factors x 100 images bit-identical in {took:.1?}",
        kernels.len()
    ))
}

fn criterion_2() -> Result<String, String> {
    let probe = RealPlane::zeros(17, 13);
    let pixels = 17 * 13;
    for k in catalog_all() {
        let base = k.nnz() as u64;
        for f in 0..4 {
            let (_, macs) = convolve_sparse_counted(&probe, &dilate(&k, f).sparse(), BorderPolicy::Replicate);
            if macs != base * pixels as u64 {
                return Err(format!(
                    "{} f={f}: {} MACs per pixel, base has {base}",
                    k.name(),
                    macs / pixels as u64
                ));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let img = random_plane(&mut rng, 512, 512, 0.0, 255.0);
    let small = catalog_get("sobel", 3).unwrap().sparse();
    let wide = dilate(&catalog_get("sobel", 3).unwrap(), 2).sparse();
    let measure = |k: &diledge::SparseKernel| {
        let mut runs: Vec<Duration> = (0..31)
            .map(|_| time(|| std::hint::black_box(convolve_sparse(&img, k, BorderPolicy::Replicate))).1)
            .collect();
        runs.sort();
        runs[runs.len() / 2]
    };
    measure(&small);
    measure(&wide);
    let (t3, t7) = (measure(&small), measure(&wide));
    let ratio = t7.as_secs_f64() / t3.as_secs_f64();
    let detail =
        format!("MACs invariant for all kernels; 512x512 median 3x3 {t3:.2?}, dilated 7x7 {t7:.2?}, ratio {ratio:.3}");
    if ratio <= 1.25 {
        Ok(detail)
    } else {
        Err(format!("{detail} exceeds 1.25"))
    }
}

fn criterion_3() -> Result<String, String> {
    let mut n = 0;
    for (name, sizes) in catalog_entries() {
        if !sizes.contains(&3) {
            continue;
        }
        let base = catalog_get(name, 3).unwrap();
        for f in [1usize, 2] {
            let path = fixture_dir().join(format!("kernels/{name}.f{f}.txt"));
            let want = parse_grid(&std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?);
            let got = dilate(&base, f);
            let rows: Vec<Vec<f64>> = (0..got.rows()).map(|r| got.row(r).to_vec()).collect();
            if got.rows() != 3 + 2 * f || rows != want {
                return Err(format!("{name} f={f} does not match its fixture"));
            }
            n += 1;
        }
    }
    Ok(format!("{n} dilated grids (5x5 and 7x7) match fixtures"))
}

fn suite(
    name: &str,
    cases: usize,
    seed: u64,
    check: impl Fn(&mut ChaCha8Rng) -> Result<(), String>,
) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (res, took) = time(|| {
        for i in 0..cases {
            check(&mut rng).map_err(|e| format!("{name} case {i}: {e}"))?;
        }
        Ok::<(), String>(())
    });
    res?;
    if took > Duration::from_secs(120) {
        return Err(format!("{name} took {took:.1?} (limit 120 s)"));
    }
    Ok(format!("{name} {cases} cases in {took:.1?}"))
}

fn criterion_4() -> Result<String, String> {
    let dims = |rng: &mut ChaCha8Rng| (rng.gen_range(1..=16), rng.gen_range(1..=16));
    let parts = [
        suite("hysteresis", 1000, 41, |rng| {
            let (w, h) = dims(rng);
            let p = random_byte_plane(rng, w, h);
            let low = rng.gen_range(0.0..200.0);
            check_hysteresis(&p, low, low + rng.gen_range(0.0..100.0))
        })?,
        suite("thinning", 500, 42, |rng| {
            let (w, h) = dims(rng);
            check_thinning(&random_blob(rng, w, h))
        })?,
        suite("zero-crossing", 500, 43, |rng| {
            let (w, h) = dims(rng);
            let p = random_plane(rng, w, h, -100.0, 100.0);
            let mut d: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..150.0)).collect();
            d.sort_by(f64::total_cmp);
            check_zero_crossing(&p, &d)
        })?,
        suite("nms", 500, 44, |rng| {
            let (w, h) = dims(rng);
            let gx = random_plane(rng, w, h, -50.0, 50.0);
            let gy = random_plane(rng, w, h, -50.0, 50.0).map(|v| v.round());
            check_nms(&gradient_from_components(gx, gy, MagnitudeMode::Exact))
        })?,
    ];
    Ok(parts.join("; "))
}

fn criterion_5() -> Result<String, String> {
    suite("cpm vs exhaustive", 500, 5, |rng| {
        let (w, h) = (rng.gen_range(2..=12), rng.gen_range(2..=12));
        let a = random_edges(rng, w, h, 8);
        let b = random_edges(rng, w, h, 8);
        check_cpm(&a, &b, rng.gen_range(0.5..4.5))
    })
}

fn criterion_6() -> Result<String, String> {
    let exact = |c: Counts, p: f64, r: f64, f1: f64| {
        let s = c.score();
        if s.precision == p && s.recall == r && s.f1 == f1 {
            Ok(())
        } else {
            Err(format!("{c:?} gave {s:?}, expected P={p} R={r} F1={f1}"))
        }
    };
    exact(Counts::new(8, 2, 2), 0.8, 0.8, 2.0 * 0.8 * 0.8 / 1.6)?;
    exact(Counts::new(0, 0, 5), 0.0, 0.0, 0.0)?;
    exact(Counts::new(0, 0, 0), 0.0, 0.0, 0.0)?;
    exact(Counts::new(0, 7, 0), 0.0, 0.0, 0.0)?;
    exact(Counts::new(4, 0, 4), 1.0, 0.5, 2.0 * 0.5 / 1.5)?;
    exact(
        Counts::new(8, 2, 2) + Counts::new(0, 10, 10),
        0.4,
        0.4,
        2.0 * 0.4 * 0.4 / 0.8,
    )?;

    // Hand-counted 8x6 fixture, radius 1: (1,1) matches (1,2), (4,1) matches
    // (4,1), (6,4) has no partner within 1 px; gt (2,4) and (6,1) stay unmatched.
    let res = EdgeMap::from_fn(8, 6, |x, y| [(1, 1), (4, 1), (6, 4)].contains(&(x, y)));
    let gt = EdgeMap::from_fn(8, 6, |x, y| [(1, 2), (4, 1), (2, 4), (6, 1)].contains(&(x, y)));
    let m: MatchResult = cpm_match(&res, &gt, 1.0).map_err(|e| e.to_string())?;
    if (m.tp, m.fp, m.fn_) != (2, 1, 2) {
        return Err(format!("fixture counted {:?}", (m.tp, m.fp, m.fn_)));
    }
    let s = score(&m);
    let (p, r) = (2.0 / 3.0, 2.0 / 4.0);
    if s.precision != p || s.recall != r || s.f1 != 2.0 * p * r / (p + r) {
        return Err(format!("fixture scored {s:?}"));
    }
    let empty = score(&cpm_match(&EdgeMap::empty(8, 6), &gt, 1.0).map_err(|e| e.to_string())?);
    if (empty.precision, empty.recall, empty.f1) != (0.0, 0.0, 0.0) {
        return Err(format!("empty prediction scored {empty:?}"));
    }
    Ok("count arithmetic and hand-counted fixtures exact, empty prediction scores 0/0/0".into())
}

#[test]
fn acceptance() {
    type Check = fn() -> Result<String, String>;
    let criteria: [(&str, Check); 6] = [
        ("2", criterion_2),
        ("1", criterion_1),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
    ];
    let mut failures = Vec::new();
    for (id, f) in criteria {
        match f() {
            Ok(d) => line(id, true, &d),
            Err(e) => {
                line(id, false, &e);
                failures.push(id);
            }
        }
    }
    let bsds = std::env::var(BSDS_ENV).ok();
    for id in ["7", "8", "9"] {
        let mut err = std::io::stderr().lock();
        let _ = match &bsds {
            Some(p) => writeln!(err, "[acceptance] criterion {id}: DEFERRED - dataset at {p}; run `cargo test -p diledge --test acceptance -- --ignored`"),
            None => writeln!(err, "[acceptance] criterion {id}: NOT RUN - needs the BSDS500 test split ({BSDS_ENV} unset); see the ignored bsds_* tests"),
        };
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}

const BSDS_ENV: &str = "DILEDGE_BSDS";

fn bsds() -> (LoadedDataset, usize) {
    let root = PathBuf::from(
        std::env::var(BSDS_ENV)
            .unwrap_or_else(|_| panic!("{BSDS_ENV} must point at the converted BSDS500 test split (images/ and gt/)")),
    );
    let ds = Dataset::open(&root).expect("dataset layout");
    let data = ds.load().expect("dataset loads");
    let n = data.items.len();
    (data, n)
}

fn f1(id: &str, pairs: &[(&str, &str)], data: &LoadedDataset) -> f64 {
    let map: ParamMap = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    let p = Pipeline::from_params(id, &map).unwrap();
    evaluate_loaded(&p, data, &EvalOptions::default()).unwrap().score.f1
}

#[test]
#[ignore = "needs the BSDS500 test split in DILEDGE_BSDS"]
fn bsds_criterion_7() {
    let (data, n) = bsds();
    let tol = if n >= 200 { 0.05 } else { 0.08 };
    let sobel = f1(
        "first-order",
        &[("operator", "sobel"), ("sigma", "2.75"), ("threshold", "50")],
        &data,
    );
    let canny = f1(
        "canny",
        &[("operator", "sobel"), ("sigma", "1.5"), ("low", "80"), ("high", "90")],
        &data,
    );
    let ok = (sobel - 0.621).abs() <= tol && (canny - 0.587).abs() <= tol;
    line(
        "7",
        ok,
        &format!("{n} images: first-order Sobel F1 {sobel:.3} (0.621), Canny Sobel F1 {canny:.3} (0.587), band {tol}"),
    );
    assert!(ok);
}

#[test]
#[ignore = "needs the BSDS500 test split in DILEDGE_BSDS"]
fn bsds_criterion_8() {
    let (data, _) = bsds();
    let mh = |d: &str| f1("marr-hildreth", &[("variant", "v1"), ("dilate", d)], &data);
    let canny = |size: &str, d: &str| {
        f1(
            "canny",
            &[("operator", "prewitt"), ("size", size), ("dilate", d)],
            &data,
        )
    };
    let sc = |d: &str| f1("shen-castan", &[("variant", "v1"), ("dilate", d)], &data);
    let (mh3, mh5) = (mh("0"), mh("1"));
    let (p3, p7d, p5d, p5e) = (canny("3", "0"), canny("3", "2"), canny("3", "1"), canny("5", "0"));
    let (sc3, sc5) = (sc("0"), sc("1"));
    let checks = [
        ("a", mh5 >= mh3, format!("MH V1 dilated 5x5 {mh5:.3} >= 3x3 {mh3:.3}")),
        (
            "b",
            p7d > p3,
            format!("Canny Prewitt dilated 7x7 {p7d:.3} > 3x3 {p3:.3}"),
        ),
        (
            "c",
            p5d > p5e,
            format!("Canny Prewitt dilated 5x5 {p5d:.3} > extended 5x5 {p5e:.3}"),
        ),
        (
            "d",
            sc3 > sc5,
            format!("Shen-Castan V1 3x3 {sc3:.3} > dilated 5x5 {sc5:.3}"),
        ),
    ];
    for (sub, ok, d) in &checks {
        line(&format!("8{sub}"), *ok, d);
    }
    assert!(checks.iter().all(|c| c.1));
}

#[test]
#[ignore = "needs the BSDS500 test split in DILEDGE_BSDS"]
fn bsds_criterion_9() {
    let root = std::env::var(BSDS_ENV).expect("DILEDGE_BSDS");
    let cfg = SweepConfig::parse(&format!(
        "pipeline=first-order\ndataset={root}\noperator=sobel\nsigma=0.25:3:0.25\nthreshold=30:160:10\n"
    ))
    .unwrap();
    let table = diledge::bench::sweep(&cfg).unwrap();
    let best = table.best_row();
    let get = |k: &str| best.params.iter().find(|p| p.0 == k).unwrap().1.parse::<f64>().unwrap();
    let (s, t) = (get("sigma"), get("threshold"));
    let ok = (s - 2.75).abs() <= 0.25 + 1e-9 && (t - 50.0).abs() <= 10.0;
    line(
        "9",
        ok,
        &format!("sweep argmax sigma {s}, threshold {t} (target 2.75, 50 within one step)"),
    );
    assert!(ok);
}
