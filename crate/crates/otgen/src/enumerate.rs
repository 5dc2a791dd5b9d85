//! Order types of `n` points from those of `n-1` points.
//!
//! Every order type of `n` points arises by adding one point to a realization
//! of some order type of `n-1` points, and the order type of the result only
//! depends on which cell of the line arrangement of the `n-1` points receives
//! the new point. We try one point per reachable cell, over several
//! realizations per parent type, since different realizations have different
//! arrangements.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canon::{canonical_key, in_general_position, orient, Pt};

/// Order types of one size, each with up to `keep` realizations.
pub struct Level {
    pub n: usize,
    pub types: BTreeMap<u128, Vec<Vec<Pt>>>,
    /// Realizations offered per type, for reservoir sampling.
    seen: BTreeMap<u128, u64>,
}

impl Level {
    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn new(n: usize) -> Self {
        Level {
            n,
            types: BTreeMap::new(),
            seen: BTreeMap::new(),
        }
    }

    /// Keeps a uniform sample of `keep` realizations per type; the first
    /// realization offered is always kept as the representative.
    fn insert(&mut self, pts: Vec<Pt>, keep: usize, rng: &mut ChaCha8Rng) {
        let key = canonical_key(&pts);
        let list = self.types.entry(key).or_default();
        let offered = self.seen.entry(key).or_default();
        *offered += 1;
        if list.len() < keep {
            list.push(pts);
        } else if keep > 1 {
            let slot = rng.gen_range(0..*offered);
            if slot < keep as u64 && slot > 0 {
                list[slot as usize] = pts;
            }
        }
    }

    pub fn realizations(&self) -> impl Iterator<Item = &Vec<Pt>> {
        self.types.values().flatten()
    }
}

/// Random triangles in `[0, grid)^2`.
pub fn triangles(grid: i64, keep: usize, rng: &mut ChaCha8Rng) -> Level {
    let mut level = Level::new(3);
    level.insert(vec![[0, 0], [grid - 1, 0], [0, grid - 1]], keep, rng);
    while level.realizations().count() < keep {
        let pts: Vec<Pt> = (0..3)
            .map(|_| [rng.gen_range(0..grid), rng.gen_range(0..grid)])
            .collect();
        if in_general_position(&pts) {
            level.insert(pts, keep, rng);
        }
    }
    level
}

fn lines_of(pts: &[Pt]) -> Vec<(Pt, Pt)> {
    let mut lines = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            lines.push((pts[i], pts[j]));
        }
    }
    lines
}

/// Cell of the arrangement containing `q`, as a sign mask; `None` if `q`
/// lies on a line.
fn cell_of(lines: &[(Pt, Pt)], q: Pt) -> Option<u64> {
    let mut mask = 0u64;
    for (bit, &(a, b)) in lines.iter().enumerate() {
        match orient(a, b, q) {
            0 => return None,
            o if o > 0 => mask |= 1 << bit,
            _ => {}
        }
    }
    Some(mask)
}

/// Extends every stored realization by each point of the grid `[0, grid)^2`.
pub fn extend_on_grid(parents: &Level, grid: i64, keep: usize, rng: &mut ChaCha8Rng) -> Level {
    let mut level = Level::new(parents.n + 1);
    for parent in parents.realizations() {
        let lines = lines_of(parent);
        let mut seen = HashSet::new();
        for x in 0..grid {
            for y in 0..grid {
                let q = [x, y];
                let Some(cell) = cell_of(&lines, q) else {
                    continue;
                };
                if seen.insert(cell) {
                    let mut pts = parent.clone();
                    pts.push(q);
                    level.insert(pts, keep, rng);
                }
            }
        }
    }
    level
}

/// Candidate points near every vertex of the arrangement of `pts`: the
/// crossing of two lines, and each input point (where many lines meet).
fn arrangement_probes(pts: &[Pt], lo: f64, hi: f64) -> Vec<Pt> {
    let lines = lines_of(pts);
    let mut probes = Vec::new();
    let mut push = |x: f64, y: f64| {
        if x >= lo && x <= hi && y >= lo && y <= hi {
            probes.push([x.round() as i64, y.round() as i64]);
        }
    };
    let unit = |a: Pt, b: Pt| {
        let (dx, dy) = ((b[0] - a[0]) as f64, (b[1] - a[1]) as f64);
        let len = dx.hypot(dy);
        (dx / len, dy / len)
    };
    for (i, &(a, b)) in lines.iter().enumerate() {
        for &(c, d) in &lines[i + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            let (r, s) = ((b[0] - a[0]) as f64, (b[1] - a[1]) as f64);
            let (u, v) = ((d[0] - c[0]) as f64, (d[1] - c[1]) as f64);
            let den = r * v - s * u;
            if den == 0.0 {
                continue;
            }
            let t = ((c[0] - a[0]) as f64 * v - (c[1] - a[1]) as f64 * u) / den;
            let (px, py) = (a[0] as f64 + t * r, a[1] as f64 + t * s);
            let (u1, u2) = (unit(a, b), unit(c, d));
            for eps in [1.5, 4.0, 16.0, 64.0] {
                for (s1, s2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    push(
                        px + eps * (s1 * u1.0 + s2 * u2.0),
                        py + eps * (s1 * u1.1 + s2 * u2.1),
                    );
                }
            }
        }
    }
    for (pi, &p) in pts.iter().enumerate() {
        let mut angles: Vec<f64> = Vec::new();
        for (qi, &q) in pts.iter().enumerate() {
            if qi != pi {
                let a = ((q[1] - p[1]) as f64).atan2((q[0] - p[0]) as f64);
                angles.push(a);
                angles.push(a + std::f64::consts::PI);
            }
        }
        angles.sort_by(f64::total_cmp);
        for w in 0..angles.len() {
            let next = if w + 1 < angles.len() {
                angles[w + 1]
            } else {
                angles[0] + 2.0 * std::f64::consts::PI
            };
            let mid = 0.5 * (angles[w] + next);
            for eps in [2.0, 6.0, 24.0, 96.0] {
                push(p[0] as f64 + eps * mid.cos(), p[1] as f64 + eps * mid.sin());
            }
        }
    }
    probes
}

/// Resolution of [`extend_by_arrangement`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Resolution {
    /// Parents scaled by 128 into the middle of the 16-bit square.
    Coarse,
    /// Parents scaled by 4096; new types are then squeezed back into 16-bit
    /// coordinates, and dropped if that changes their order type.
    Fine,
}

/// Extends realizations into `level`, one probe point per reachable cell of
/// the line arrangement. Each parent is scaled up, optionally perturbed
/// into `variants` further realizations of the same type (different
/// realizations have different arrangements), and extended. With
/// `include_base` off only the perturbed copies are used, which lets
/// repeated rounds explore new arrangements.
pub fn extend_by_arrangement(
    parents: &Level,
    level: &mut Level,
    resolution: Resolution,
    variants: usize,
    include_base: bool,
    rng: &mut ChaCha8Rng,
) {
    let (scale, offset, max): (i64, i64, i64) = match resolution {
        Resolution::Coarse => (128, 16_384, 65_535),
        Resolution::Fine => (4096, 1 << 21, (1 << 23) - 1),
    };
    for parent in parents.realizations() {
        let base: Vec<Pt> = parent
            .iter()
            .map(|&[x, y]| [x * scale + offset, y * scale + offset])
            .collect();
        let key = canonical_key(&base);
        let mut realizations = Vec::new();
        if include_base {
            realizations.push(base.clone());
        }
        let mut attempts = 0;
        while realizations.len() < variants + usize::from(include_base)
            && attempts < 50 * (variants + 1)
        {
            attempts += 1;
            let moved: Vec<Pt> = base
                .iter()
                .map(|&[x, y]| {
                    [
                        x + rng.gen_range(-scale / 2..=scale / 2),
                        y + rng.gen_range(-scale / 2..=scale / 2),
                    ]
                })
                .collect();
            if in_general_position(&moved) && canonical_key(&moved) == key {
                realizations.push(moved);
            }
        }
        for pts in realizations {
            let lines = lines_of(&pts);
            let mut seen = HashSet::new();
            for q in arrangement_probes(&pts, 0.0, max as f64) {
                let Some(cell) = cell_of(&lines, q) else {
                    continue;
                };
                if !seen.insert(cell) {
                    continue;
                }
                let mut ext = pts.clone();
                ext.push(q);
                match resolution {
                    Resolution::Coarse => level.insert(ext, 1, rng),
                    Resolution::Fine => {
                        if !level.types.contains_key(&canonical_key(&ext)) {
                            if let Some(fitted) = fit_u16(&ext, rng) {
                                level.insert(fitted, 1, rng);
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Re-extends every stored realization of `level` with one random point
/// removed. The point sets left behind are realizations of smaller types
/// that the extension step has not seen, whose arrangements can reach cells
/// the original parents did not have.
pub fn extend_by_deletion(level: &mut Level, rng: &mut ChaCha8Rng) {
    let stored: Vec<Vec<Pt>> = level.realizations().cloned().collect();
    for pts in stored {
        let mut rest = pts.clone();
        rest.remove(rng.gen_range(0..pts.len()));
        let lines = lines_of(&rest);
        let mut seen = HashSet::new();
        for q in arrangement_probes(&rest, 0.0, 65_535.0) {
            let Some(cell) = cell_of(&lines, q) else {
                continue;
            };
            if seen.insert(cell) {
                let mut ext = rest.clone();
                ext.push(q);
                level.insert(ext, 1, rng);
            }
        }
    }
}

/// A realization of the same order type with coordinates in `[0, 2^16)`,
/// found by mapping the bounding box onto the square and rounding, then
/// retrying with small random shifts.
fn fit_u16(pts: &[Pt], rng: &mut ChaCha8Rng) -> Option<Vec<Pt>> {
    const SIDE: f64 = 65_535.0;
    let key = canonical_key(pts);
    let lo = |d: usize| pts.iter().map(|p| p[d]).min().unwrap();
    let hi = |d: usize| pts.iter().map(|p| p[d]).max().unwrap();
    let (x0, y0) = (lo(0), lo(1));
    let (sx, sy) = (SIDE / (hi(0) - x0) as f64, SIDE / (hi(1) - y0) as f64);
    let uniform = sx.min(sy);
    for (fx, fy) in [(sx, sy), (uniform, uniform)] {
        let exact: Vec<[f64; 2]> = pts
            .iter()
            .map(|&[x, y]| [(x - x0) as f64 * fx, (y - y0) as f64 * fy])
            .collect();
        for attempt in 0..64 {
            let jitter = if attempt == 0 { 0.0 } else { 1.5 };
            let cand: Vec<Pt> = exact
                .iter()
                .map(|&[x, y]| {
                    let dx = rng.gen_range(-jitter..=jitter);
                    let dy = rng.gen_range(-jitter..=jitter);
                    [
                        ((x + dx).round() as i64).clamp(0, 65_535),
                        ((y + dy).round() as i64).clamp(0, 65_535),
                    ]
                })
                .collect();
            if in_general_position(&cand) && canonical_key(&cand) == key {
                return Some(cand);
            }
        }
    }
    None
}

/// Seeded generator shared by the enumeration steps.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
