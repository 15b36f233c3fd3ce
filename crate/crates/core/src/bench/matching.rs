//! Corresponding-pixel matching between a detected and a reference edge map.

use crate::error::{Error, Result};
use crate::imgproc::EdgeMap;

type Px = (usize, usize);

/// Outcome of matching result pixels against ground-truth pixels.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchResult {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    /// `(result pixel, ground-truth pixel)`
    pub matched_pairs: Vec<(Px, Px)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Matcher {
    /// Maximum-cardinality matching (Hopcroft-Karp over a nearest-first greedy start).
    #[default]
    Exact,
    /// Nearest-pair greedy assignment only.
    Greedy,
}

impl Matcher {
    pub fn parse(s: &str) -> Option<Matcher> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Some(Matcher::Exact),
            "greedy" => Some(Matcher::Greedy),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Matcher::Exact => "exact",
            Matcher::Greedy => "greedy",
        }
    }
}

/// `0.0075` times the image diagonal.
pub fn default_max_dist(width: usize, height: usize) -> f64 {
    0.0075 * (width as f64).hypot(height as f64)
}

/// Bipartite graph whose adjacency lists are sorted nearest first.
struct Graph {
    left: Vec<Px>,
    right: Vec<Px>,
    adj: Vec<Vec<(u32, f64)>>,
}

fn build_graph(result: &EdgeMap, gt: &EdgeMap, max_dist: f64) -> Graph {
    let (w, h) = (gt.width(), gt.height());
    let left = result.points();
    let right = gt.points();
    let mut index = vec![u32::MAX; w * h];
    for (i, &(x, y)) in right.iter().enumerate() {
        index[y * w + x] = i as u32;
    }
    let r = max_dist.floor() as isize;
    let r2 = max_dist * max_dist;
    let mut offsets: Vec<(isize, isize, f64)> = Vec::new();
    // scanning every reference pixel is cheaper than a huge offset window
    let brute_force = ((2 * r + 1) as f64).powi(2) > right.len() as f64;
    if !brute_force {
        for dy in -r..=r {
            for dx in -r..=r {
                let d2 = (dx * dx + dy * dy) as f64;
                if d2 <= r2 {
                    offsets.push((dx, dy, d2.sqrt()));
                }
            }
        }
        offsets.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.1, a.0).cmp(&(b.1, b.0))));
    }
    let adj = left
        .iter()
        .map(|&(x, y)| {
            if brute_force {
                let mut v: Vec<(u32, f64)> = right
                    .iter()
                    .enumerate()
                    .filter_map(|(j, &(gx, gy))| {
                        let d = (x as f64 - gx as f64).hypot(y as f64 - gy as f64);
                        (d <= max_dist).then_some((j as u32, d))
                    })
                    .collect();
                v.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
                v
            } else {
                offsets
                    .iter()
                    .filter_map(|&(dx, dy, d)| {
                        let (nx, ny) = (x as isize + dx, y as isize + dy);
                        if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                            return None;
                        }
                        let j = index[ny as usize * w + nx as usize];
                        (j != u32::MAX).then_some((j, d))
                    })
                    .collect()
            }
        })
        .collect();
    Graph { left, right, adj }
}

const FREE: u32 = u32::MAX;

/// Globally nearest-first assignment; returns `(match_left, match_right)`.
fn greedy(g: &Graph) -> (Vec<u32>, Vec<u32>) {
    let mut edges: Vec<(f64, u32, u32)> = g
        .adj
        .iter()
        .enumerate()
        .flat_map(|(i, a)| a.iter().map(move |&(j, d)| (d, i as u32, j)))
        .collect();
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut ml = vec![FREE; g.left.len()];
    let mut mr = vec![FREE; g.right.len()];
    for (_, i, j) in edges {
        if ml[i as usize] == FREE && mr[j as usize] == FREE {
            ml[i as usize] = j;
            mr[j as usize] = i;
        }
    }
    (ml, mr)
}

/// Hopcroft-Karp phases until no augmenting path remains.
fn hopcroft_karp(g: &Graph, ml: &mut [u32], mr: &mut [u32]) {
    let n = g.left.len();
    let mut dist = vec![u32::MAX; n];
    let mut queue = Vec::with_capacity(n);
    let mut cursor = vec![0usize; n];
    let mut stack: Vec<u32> = Vec::new();
    loop {
        // BFS layering from free left vertices
        queue.clear();
        for i in 0..n {
            if ml[i] == FREE {
                dist[i] = 0;
                queue.push(i as u32);
            } else {
                dist[i] = u32::MAX;
            }
        }
        let mut found = false;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            for &(v, _) in &g.adj[u] {
                let m = mr[v as usize];
                if m == FREE {
                    found = true;
                } else if dist[m as usize] == u32::MAX {
                    dist[m as usize] = dist[u] + 1;
                    queue.push(m);
                }
            }
        }
        if !found {
            return;
        }
        // iterative layered DFS from each free left vertex
        cursor.iter_mut().for_each(|c| *c = 0);
        for root in 0..n {
            if ml[root] != FREE {
                continue;
            }
            stack.clear();
            stack.push(root as u32);
            while let Some(&u) = stack.last() {
                let u = u as usize;
                if cursor[u] >= g.adj[u].len() {
                    dist[u] = u32::MAX;
                    stack.pop();
                    if let Some(&p) = stack.last() {
                        cursor[p as usize] += 1;
                    }
                    continue;
                }
                let v = g.adj[u][cursor[u]].0;
                let m = mr[v as usize];
                if m == FREE {
                    for &x in &stack {
                        let x = x as usize;
                        let vx = g.adj[x][cursor[x]].0;
                        ml[x] = vx;
                        mr[vx as usize] = x as u32;
                    }
                    break;
                }
                if dist[m as usize] == dist[u] + 1 {
                    stack.push(m);
                } else {
                    cursor[u] += 1;
                }
            }
        }
    }
}

/// One-to-one matching of result pixels to ground-truth pixels within
/// `max_dist` (Euclidean).
pub fn cpm_match(result: &EdgeMap, gt: &EdgeMap, max_dist: f64) -> Result<MatchResult> {
    cpm_match_with(result, gt, max_dist, Matcher::Exact)
}

pub fn cpm_match_with(result: &EdgeMap, gt: &EdgeMap, max_dist: f64, matcher: Matcher) -> Result<MatchResult> {
    if (result.width(), result.height()) != (gt.width(), gt.height()) {
        return Err(Error::DimensionMismatch(
            result.width(),
            result.height(),
            gt.width(),
            gt.height(),
        ));
    }
    if !(max_dist >= 0.0) {
        return Err(Error::param("max_dist", format!("must be >= 0, got {max_dist}")));
    }
    let g = build_graph(result, gt, max_dist);
    let (mut ml, mut mr) = greedy(&g);
    if matcher == Matcher::Exact {
        hopcroft_karp(&g, &mut ml, &mut mr);
    }
    let matched_pairs: Vec<(Px, Px)> = ml
        .iter()
        .enumerate()
        .filter(|(_, &j)| j != FREE)
        .map(|(i, &j)| (g.left[i], g.right[j as usize]))
        .collect();
    let tp = matched_pairs.len();
    Ok(MatchResult {
        tp,
        fp: g.left.len() - tp,
        fn_: g.right.len() - tp,
        matched_pairs,
    })
}
