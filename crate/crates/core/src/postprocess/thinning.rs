//! Guo-Hall two-subiteration parallel thinning.

use crate::imgproc::EdgeMap;

/// Neighborhood bits p2..p9, clockwise from north.
#[inline]
fn neighbors(e: &EdgeMap, x: usize, y: usize) -> [bool; 8] {
    let (x, y) = (x as isize, y as isize);
    [
        e.get_signed(x, y - 1),
        e.get_signed(x + 1, y - 1),
        e.get_signed(x + 1, y),
        e.get_signed(x + 1, y + 1),
        e.get_signed(x, y + 1),
        e.get_signed(x - 1, y + 1),
        e.get_signed(x - 1, y),
        e.get_signed(x - 1, y - 1),
    ]
}

fn deletable(n: [bool; 8], second: bool) -> bool {
    let [p2, p3, p4, p5, p6, p7, p8, p9] = n;
    let b = |v: bool| v as u8;
    let c = b(!p2 && (p3 || p4)) + b(!p4 && (p5 || p6)) + b(!p6 && (p7 || p8)) + b(!p8 && (p9 || p2));
    if c != 1 {
        return false;
    }
    let n1 = b(p9 || p2) + b(p3 || p4) + b(p5 || p6) + b(p7 || p8);
    let n2 = b(p2 || p3) + b(p4 || p5) + b(p6 || p7) + b(p8 || p9);
    let n = n1.min(n2);
    if !(2..=3).contains(&n) {
        return false;
    }
    let m = if second {
        (p2 || p3 || !p5) && p4
    } else {
        (p6 || p7 || !p9) && p8
    };
    !m
}

/// Thins to a fixpoint; the output is a subset of the input. Within a
/// subiteration all deletions are decided first, then applied together.
pub fn guo_hall_thin(e: &EdgeMap) -> EdgeMap {
    let mut cur = e.clone();
    let (w, h) = (e.width(), e.height());
    let mut marked = Vec::new();
    loop {
        let mut changed = false;
        for second in [false, true] {
            marked.clear();
            for y in 0..h {
                for x in 0..w {
                    if cur.get(x, y) && deletable(neighbors(&cur, x, y), second) {
                        marked.push((x, y));
                    }
                }
            }
            for &(x, y) in &marked {
                cur.set(x, y, false);
            }
            changed |= !marked.is_empty();
        }
        if !changed {
            return cur;
        }
    }
}
