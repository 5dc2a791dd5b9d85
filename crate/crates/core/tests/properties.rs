use itertools::Itertools;
use proptest::prelude::*;

use seplines::matrix::max_entry;
use seplines::recovery::{candidates_of_size, min_cycle};
use seplines::{
    compute_matrix, convex_hull, cycle_score, orchard_partition, orientation, separates,
    separating_count, target, validate, Configuration, Orientation, Point, SeparatingMatrix,
    SquareMatrix,
};

fn cross(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i128 {
    let (ax, ay) = (a.0 as i128, a.1 as i128);
    (b.0 as i128 - ax) * (c.1 as i128 - ay) - (b.1 as i128 - ay) * (c.0 as i128 - ax)
}

fn coords(config: &Configuration) -> Vec<(i64, i64)> {
    config.points().iter().map(|&p| p.into()).collect()
}

fn strictly_inside(p: (i64, i64), a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> bool {
    let s = [
        cross(a, b, p).signum(),
        cross(b, c, p).signum(),
        cross(c, a, p).signum(),
    ];
    s.iter().all(|&v| v == s[0])
}

/// Hull vertices by brute force: a point is a vertex iff no triangle of other
/// points contains it.
fn hull_oracle(pts: &[(i64, i64)]) -> Vec<usize> {
    (0..pts.len())
        .filter(|&i| {
            let others: Vec<usize> = (0..pts.len()).filter(|&j| j != i).collect();
            !others
                .iter()
                .tuple_combinations()
                .any(|(&a, &b, &c)| strictly_inside(pts[i], pts[a], pts[b], pts[c]))
        })
        .collect()
}

fn count_oracle(pts: &[(i64, i64)], i: usize, j: usize) -> u64 {
    let rest: Vec<usize> = (0..pts.len()).filter(|&t| t != i && t != j).collect();
    rest.iter()
        .tuple_combinations()
        .filter(|(&a, &b)| {
            cross(pts[a], pts[b], pts[i]).signum() * cross(pts[a], pts[b], pts[j]).signum() < 0
        })
        .count() as u64
}

fn config_strategy(min_n: usize, max_n: usize, range: i64) -> impl Strategy<Value = Configuration> {
    (min_n..=max_n)
        .prop_flat_map(move |n| prop::collection::vec((-range..=range, -range..=range), n))
        .prop_filter_map("points not in general position", |c| {
            Configuration::from_coords(c).ok()
        })
}

/// Symmetric matrices with zero diagonal and entries bounded by `C(n-2, 2)`.
fn matrix_strategy(min_n: usize, max_n: usize) -> impl Strategy<Value = SeparatingMatrix> {
    (min_n..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec(0..=max_entry(n), pairs).prop_map(move |upper| {
            let mut m = SquareMatrix::zeros(n);
            for ((i, j), v) in (0..n).tuple_combinations().zip(upper) {
                m.set_symmetric(i, j, v);
            }
            SeparatingMatrix::try_from(m).expect("bounded symmetric matrix")
        })
    })
}

fn point(x: i64, y: i64) -> Point {
    Point::new(x, y).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn orientation_flips_under_transposition(
        a in (-1000i64..1000, -1000i64..1000),
        b in (-1000i64..1000, -1000i64..1000),
        c in (-1000i64..1000, -1000i64..1000),
    ) {
        let (pa, pb, pc) = (point(a.0, a.1), point(b.0, b.1), point(c.0, c.1));
        let o = orientation(pa, pb, pc);
        prop_assert_eq!(orientation(pb, pa, pc), o.reversed());
        prop_assert_eq!(orientation(pb, pc, pa), o);
        prop_assert_eq!(o.sign() as i128, cross(a, b, c).signum());
    }

    #[test]
    fn separation_is_symmetric(config in config_strategy(4, 4, 50)) {
        let p = config.points();
        let s = separates(p[0], p[1], p[2], p[3]).unwrap();
        prop_assert_eq!(separates(p[1], p[0], p[2], p[3]).unwrap(), s);
        prop_assert_eq!(separates(p[0], p[1], p[3], p[2]).unwrap(), s);
    }

    #[test]
    fn separation_rejects_points_on_the_line(k in -20i64..20) {
        let on_line = point(3 * k, 2 * k);
        let r = separates(point(0, 0), point(3, 2), on_line, point(1, 5));
        prop_assert!(r.is_err());
    }

    #[test]
    fn separating_count_matches_oracle(config in config_strategy(3, 9, 40)) {
        let n = config.len();
        let pts = coords(&config);
        for (i, j) in (0..n).tuple_combinations() {
            let c = separating_count(&config, i, j).unwrap() as u64;
            prop_assert_eq!(c, separating_count(&config, j, i).unwrap() as u64);
            prop_assert_eq!(c, count_oracle(&pts, i, j));
            prop_assert!(c <= max_entry(n));
        }
    }

    #[test]
    fn hull_matches_containment_oracle(config in config_strategy(3, 12, 60)) {
        let pts = coords(&config);
        let hull = convex_hull(&config);
        prop_assert_eq!(hull.vertex_set(), hull_oracle(&pts));
        let cyc = hull.indices();
        let k = cyc.len();
        prop_assert_eq!(cyc[0], *cyc.iter().min().unwrap());
        for t in 0..k {
            let (a, b) = (cyc[t], cyc[(t + 1) % k]);
            for q in (0..pts.len()).filter(|&q| q != a && q != b) {
                prop_assert!(config.orientation(a, b, q) == Orientation::CounterClockwise);
            }
        }
    }

    #[test]
    fn computed_matrices_pass_validation(config in config_strategy(4, 12, 200)) {
        let m = compute_matrix(&config);
        let report = validate(m.as_square());
        prop_assert!(report.passed(), "{}", report.to_text());
        let n = m.n();
        let part = orchard_partition(&m).unwrap();
        let (a, b) = part.class_sizes();
        prop_assert_eq!(a + b, n);
        let opposite = (0..n)
            .tuple_combinations()
            .filter(|&(i, j)| (m.get(i, j) % 2) != ((n as u64 - 1) % 2))
            .count();
        prop_assert_eq!(opposite, a * b);
    }

    #[test]
    fn hull_cycle_reaches_target(config in config_strategy(3, 10, 300)) {
        let m = compute_matrix(&config);
        let hull = convex_hull(&config);
        prop_assert_eq!(cycle_score(&m, hull.indices()).unwrap(), target(config.len(), hull.len()));
    }

    #[test]
    fn relabelling_permutes_the_matrix(
        config in config_strategy(4, 9, 100),
        seed in any::<u64>(),
    ) {
        let n = config.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let relabelled = Configuration::new(perm.iter().map(|&p| config.point(p)).collect()).unwrap();
        let (m, r) = (compute_matrix(&config), compute_matrix(&relabelled));
        for (i, j) in (0..n).tuple_combinations() {
            prop_assert_eq!(r.get(i, j), m.get(perm[i], perm[j]));
        }
    }

    #[test]
    fn min_cycle_matches_all_permutations(
        m in matrix_strategy(3, 9),
        pick in prop::collection::vec(any::<bool>(), 9),
    ) {
        let n = m.n();
        let mut subset: Vec<usize> = (0..n).filter(|&i| pick[i]).take(7).collect();
        for i in 0..n {
            if subset.len() >= 3 {
                break;
            }
            if !subset.contains(&i) {
                subset.push(i);
            }
        }
        subset.sort_unstable();
        let best = subset
            .iter()
            .permutations(subset.len())
            .map(|p| (0..p.len()).map(|t| m.get(*p[t], *p[(t + 1) % p.len()])).sum::<u64>())
            .min()
            .unwrap();
        let c = min_cycle(&m, &subset).unwrap();
        prop_assert_eq!(c.score, best);
        prop_assert_eq!(cycle_score(&m, &c.order).unwrap(), best);
        let mut sorted = c.order.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, subset.clone());
        prop_assert_eq!(c.order[0], subset[0]);
        let k = subset.len();
        let first_tie = subset
            .iter()
            .copied()
            .permutations(k)
            .filter(|p| p[0] == subset[0] && p[1] < p[k - 1])
            .filter(|p| (0..k).map(|t| m.get(p[t], p[(t + 1) % k])).sum::<u64>() == best)
            .min()
            .unwrap();
        prop_assert_eq!(c.order, first_tie);
    }

    #[test]
    fn candidates_reach_their_target(m in matrix_strategy(4, 7), k in 3usize..=7) {
        let k = k.min(m.n());
        for c in candidates_of_size(&m, k) {
            prop_assert_eq!(c.score, target(m.n(), k));
        }
    }

    #[test]
    fn text_formats_round_trip(config in config_strategy(3, 8, 1000)) {
        prop_assert_eq!(Configuration::parse(&config.to_text()).unwrap(), config.clone());
        let m = compute_matrix(&config);
        prop_assert_eq!(&SquareMatrix::parse(&m.to_text()).unwrap(), m.as_square());
    }
}
