//! Oracles and generators shared by the property suites and the acceptance run.
#![allow(dead_code)]

use std::path::PathBuf;

use diledge::bench::cpm_match;
use diledge::imgproc::{EdgeMap, RealPlane};
use diledge::operators::GradientMap;
use diledge::postprocess::{
    guo_hall_thin, hysteresis_link, non_max_suppression, zero_crossing, HysteresisParams, ThresholdScale,
    ZeroCrossParams,
};
use rand::Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Whitespace grid; `r2` stands for the square root of two.
pub fn parse_grid(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split_whitespace()
                .map(|c| match c {
                    "r2" => std::f64::consts::SQRT_2,
                    "-r2" => -std::f64::consts::SQRT_2,
                    _ => c.parse().unwrap_or_else(|_| panic!("bad cell {c:?}")),
                })
                .collect()
        })
        .collect()
}

pub fn random_plane(rng: &mut impl Rng, w: usize, h: usize, lo: f64, hi: f64) -> RealPlane {
    let v = (0..w * h).map(|_| rng.gen_range(lo..hi)).collect();
    RealPlane::new(w, h, v).unwrap()
}

pub fn random_byte_plane(rng: &mut impl Rng, w: usize, h: usize) -> RealPlane {
    let v = (0..w * h).map(|_| rng.gen_range(0..=255u8) as f64).collect();
    RealPlane::new(w, h, v).unwrap()
}

/// Union of a few random filled rectangles and discs, optionally speckled.
pub fn random_blob(rng: &mut impl Rng, w: usize, h: usize) -> EdgeMap {
    let mut e = EdgeMap::empty(w, h);
    for _ in 0..rng.gen_range(1..=4) {
        let (cx, cy) = (rng.gen_range(0..w) as f64, rng.gen_range(0..h) as f64);
        if rng.gen_bool(0.5) {
            let (rx, ry) = (rng.gen_range(0.5..5.0), rng.gen_range(0.5..5.0));
            for y in 0..h {
                for x in 0..w {
                    if (x as f64 - cx).abs() <= rx && (y as f64 - cy).abs() <= ry {
                        e.set(x, y, true);
                    }
                }
            }
        } else {
            let r = rng.gen_range(1.0..5.0);
            for y in 0..h {
                for x in 0..w {
                    if (x as f64 - cx).hypot(y as f64 - cy) <= r {
                        e.set(x, y, true);
                    }
                }
            }
        }
    }
    if rng.gen_bool(0.3) {
        for _ in 0..rng.gen_range(1..8) {
            e.set(rng.gen_range(0..w), rng.gen_range(0..h), true);
        }
    }
    e
}

pub fn random_edges(rng: &mut impl Rng, w: usize, h: usize, max_points: usize) -> EdgeMap {
    let mut e = EdgeMap::empty(w, h);
    for _ in 0..rng.gen_range(0..=max_points) {
        e.set(rng.gen_range(0..w), rng.gen_range(0..h), true);
    }
    e
}

fn neighbors8(x: usize, y: usize, w: usize, h: usize) -> impl Iterator<Item = (usize, usize)> {
    (-1isize..=1)
        .flat_map(|dy| (-1isize..=1).map(move |dx| (dx, dy)))
        .filter(|&d| d != (0, 0))
        .filter_map(move |(dx, dy)| {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            (nx >= 0 && ny >= 0 && nx < w as isize && ny < h as isize).then_some((nx as usize, ny as usize))
        })
}

/// Grows the strong set by repeated 8-neighbor dilation restricted to
/// candidates until nothing changes.
pub fn hysteresis_oracle(p: &RealPlane, lo: f64, hi: f64) -> EdgeMap {
    let (w, h) = (p.width(), p.height());
    let mut out = EdgeMap::from_fn(w, h, |x, y| p.get(x, y) >= hi);
    loop {
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                if out.get(x, y) || p.get(x, y) < lo {
                    continue;
                }
                if neighbors8(x, y, w, h).any(|(nx, ny)| out.get(nx, ny)) {
                    out.set(x, y, true);
                    changed = true;
                }
            }
        }
        if !changed {
            return out;
        }
    }
}

/// Number of 8-connected components (union-find).
pub fn components(e: &EdgeMap) -> usize {
    let (w, h) = (e.width(), e.height());
    let mut parent: Vec<usize> = (0..w * h).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for y in 0..h {
        for x in 0..w {
            if !e.get(x, y) {
                continue;
            }
            for (nx, ny) in neighbors8(x, y, w, h) {
                if e.get(nx, ny) {
                    let (a, b) = (find(&mut parent, y * w + x), find(&mut parent, ny * w + nx));
                    parent[a] = b;
                }
            }
        }
    }
    let mut roots: Vec<usize> = e.points().iter().map(|&(x, y)| find(&mut parent, y * w + x)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Largest matching by exhaustive search over assignments of left pixels.
pub fn exhaustive_matching(a: &[(usize, usize)], b: &[(usize, usize)], max_dist: f64) -> usize {
    fn go(i: usize, used: u32, a: &[(usize, usize)], b: &[(usize, usize)], r: f64) -> usize {
        if i == a.len() {
            return 0;
        }
        let mut best = go(i + 1, used, a, b, r);
        for (j, q) in b.iter().enumerate() {
            if used & (1 << j) == 0 {
                let d = (a[i].0 as f64 - q.0 as f64).hypot(a[i].1 as f64 - q.1 as f64);
                if d <= r {
                    best = best.max(1 + go(i + 1, used | (1 << j), a, b, r));
                }
            }
        }
        best
    }
    go(0, 0, a, b, max_dist)
}

pub fn check_hysteresis(p: &RealPlane, low: f64, high: f64) -> Result<(), String> {
    let params = HysteresisParams::new(low, high, ThresholdScale::Absolute).map_err(|e| e.to_string())?;
    let out = hysteresis_link(p, &params);
    let oracle = hysteresis_oracle(p, low, high);
    if out != oracle {
        return Err(format!(
            "differs from flood-fill oracle on {}x{}",
            p.width(),
            p.height()
        ));
    }
    for (x, y) in out.points() {
        if p.get(x, y) < low {
            return Err(format!("({x}, {y}) below the low threshold kept"));
        }
    }
    for y in 0..p.height() {
        for x in 0..p.width() {
            if p.get(x, y) >= high && !out.get(x, y) {
                return Err(format!("strong pixel ({x}, {y}) dropped"));
            }
        }
    }
    Ok(())
}

pub fn check_thinning(e: &EdgeMap) -> Result<(), String> {
    let t = guo_hall_thin(e);
    if !t.is_subset_of(e) {
        return Err("output is not a subset of the input".into());
    }
    if guo_hall_thin(&t) != t {
        return Err("not idempotent".into());
    }
    let (before, after) = (components(e), components(&t));
    if before != after {
        return Err(format!("component count {before} -> {after}"));
    }
    Ok(())
}

pub fn check_zero_crossing(p: &RealPlane, deltas: &[f64]) -> Result<(), String> {
    let mut prev: Option<EdgeMap> = None;
    for &d in deltas {
        let cur = zero_crossing(p, ZeroCrossParams::new(d).map_err(|e| e.to_string())?);
        if let Some(prev) = &prev {
            if !cur.is_subset_of(prev) {
                return Err(format!("raising min_delta to {d} added pixels"));
            }
        }
        prev = Some(cur);
    }
    Ok(())
}

pub fn check_nms(g: &GradientMap) -> Result<(), String> {
    let out = non_max_suppression(g);
    for (o, m) in out.values().iter().zip(g.magnitude.values()) {
        if *o != 0.0 && o != m {
            return Err(format!("value {o} is neither 0 nor the input {m}"));
        }
        if *m == 0.0 && *o != 0.0 {
            return Err("support grew".into());
        }
    }
    Ok(())
}

pub fn check_cpm(a: &EdgeMap, b: &EdgeMap, max_dist: f64) -> Result<(), String> {
    let m = cpm_match(a, b, max_dist).map_err(|e| e.to_string())?;
    let want = exhaustive_matching(&a.points(), &b.points(), max_dist);
    if m.tp != want {
        return Err(format!("matched {} pairs, exhaustive optimum is {want}", m.tp));
    }
    if m.tp + m.fp != a.count() || m.tp + m.fn_ != b.count() || m.matched_pairs.len() != m.tp {
        return Err("count identities violated".into());
    }
    let mut left: Vec<_> = m.matched_pairs.iter().map(|p| p.0).collect();
    let mut right: Vec<_> = m.matched_pairs.iter().map(|p| p.1).collect();
    left.sort_unstable();
    left.dedup();
    right.sort_unstable();
    right.dedup();
    if left.len() != m.tp || right.len() != m.tp {
        return Err("a pixel appears in two pairs".into());
    }
    for (p, q) in &m.matched_pairs {
        if (p.0 as f64 - q.0 as f64).hypot(p.1 as f64 - q.1 as f64) > max_dist {
            return Err(format!("pair {p:?} {q:?} beyond {max_dist}"));
        }
        if !a.get(p.0, p.1) || !b.get(q.0, q.1) {
            return Err("pair uses a non-edge pixel".into());
        }
    }
    let back = cpm_match(b, a, max_dist).map_err(|e| e.to_string())?;
    if back.tp != m.tp {
        return Err(format!("asymmetric: {} vs {}", m.tp, back.tp));
    }
    Ok(())
}
