//! Canonical keys for order types of small point sets (n <= 10).
//!
//! A point set is relabelled by picking a hull vertex as point 0 and sorting
//! the others by angle around it, in either rotational sense. The orientation
//! bits of all triples under that labelling form a code; the minimum code over
//! all hull vertices and both senses is the key. Two point sets share a key
//! iff they have the same order type up to relabelling and reflection.

pub type Pt = [i64; 2];

#[inline]
pub fn orient(a: Pt, b: Pt, c: Pt) -> i64 {
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    det.signum()
}

pub fn in_general_position(pts: &[Pt]) -> bool {
    let n = pts.len();
    (0..n).all(|i| (i + 1..n).all(|j| (j + 1..n).all(|k| orient(pts[i], pts[j], pts[k]) != 0)))
}

/// Hull vertices of a point set in general position, in no particular order.
pub fn hull_vertices(pts: &[Pt]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by_key(|&i| pts[i]);
    let mut hull: Vec<usize> = Vec::with_capacity(pts.len() + 1);
    for pass in 0..2 {
        let start = hull.len();
        for step in 0..order.len() {
            let i = if pass == 0 {
                order[step]
            } else {
                order[order.len() - 1 - step]
            };
            while hull.len() >= start + 2
                && orient(pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]], pts[i]) <= 0
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

pub fn canonical_key(pts: &[Pt]) -> u128 {
    let n = pts.len();
    debug_assert!(n <= 10);
    let mut best = u128::MAX;
    let mut perm = [0usize; 10];
    for p in hull_vertices(pts) {
        for mirror in [false, true] {
            let mut others: Vec<usize> = (0..n).filter(|&i| i != p).collect();
            others.sort_by(|&a, &b| {
                let ccw = orient(pts[p], pts[a], pts[b]) > 0;
                if ccw != mirror {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            });
            perm[0] = p;
            perm[1..n].copy_from_slice(&others);
            let mut code: u128 = 0;
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        let positive = orient(pts[perm[i]], pts[perm[j]], pts[perm[k]]) > 0;
                        code = (code << 1) | (positive != mirror) as u128;
                    }
                }
            }
            best = best.min(code);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_under_relabelling_and_reflection() {
        let pts: Vec<Pt> = vec![[0, 0], [100, 3], [40, 90], [30, 20], [70, 40], [5, 60]];
        let key = canonical_key(&pts);
        let mut shuffled = pts.clone();
        shuffled.rotate_left(2);
        shuffled.swap(0, 3);
        assert_eq!(canonical_key(&shuffled), key);
        let mirrored: Vec<Pt> = pts.iter().map(|&[x, y]| [-x, y]).collect();
        assert_eq!(canonical_key(&mirrored), key);
        let moved: Vec<Pt> = pts.iter().map(|&[x, y]| [3 * x + 7, 3 * y - 11]).collect();
        assert_eq!(canonical_key(&moved), key);
    }

    #[test]
    fn convex_and_non_convex_quadrilaterals_differ() {
        let convex = [[0, 0], [10, 0], [10, 10], [0, 10]];
        let triangle = [[0, 0], [12, 0], [0, 12], [3, 3]];
        assert_ne!(canonical_key(&convex), canonical_key(&triangle));
        assert_eq!(hull_vertices(&triangle).len(), 3);
    }
}
