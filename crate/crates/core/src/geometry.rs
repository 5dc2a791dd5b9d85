//! Exact planar primitives over integer points.
//!
//! Every predicate here is evaluated in exact integer arithmetic. Coordinates
//! are bounded by [`COORD_LIMIT`] in absolute value, so coordinate differences
//! fit in 26 bits and the orientation determinant in 53 bits; `i64` never
//! overflows.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::text::{self, FormatError};

/// Largest admissible absolute value of a coordinate (2^24).
pub const COORD_LIMIT: i64 = 1 << 24;

/// Consecutive rejected samples after which [`random_configuration`] gives up.
pub const RANDOM_RETRY_LIMIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("coordinate ({x}, {y}) exceeds the bound {COORD_LIMIT}")]
    CoordinateOutOfRange { x: i64, y: i64 },
    #[error("a configuration needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("general position violated: points {0}, {1}, {2} are collinear")]
    CollinearPoints(Point, Point, Point),
    #[error("general position violated: points #{0}, #{1}, #{2} are collinear")]
    CollinearTriple(usize, usize, usize),
    #[error("point index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("indices must be distinct, got {0} twice")]
    RepeatedIndex(usize),
    #[error("could not place {n} points in general position in [-{bound}, {bound}]^2 after {RANDOM_RETRY_LIMIT} consecutive rejections")]
    RetryLimit { n: usize, bound: i64 },
}

/// A point with exact integer coordinates, `|x|, |y| <= COORD_LIMIT`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(i64, i64)", into = "(i64, i64)")]
pub struct Point {
    x: i64,
    y: i64,
}

impl Point {
    pub fn new(x: i64, y: i64) -> Result<Self, GeometryError> {
        if x.abs() > COORD_LIMIT || y.abs() > COORD_LIMIT {
            return Err(GeometryError::CoordinateOutOfRange { x, y });
        }
        Ok(Point { x, y })
    }

    pub fn x(&self) -> i64 {
        self.x
    }

    pub fn y(&self) -> i64 {
        self.y
    }
}

impl TryFrom<(i64, i64)> for Point {
    type Error = GeometryError;

    fn try_from((x, y): (i64, i64)) -> Result<Self, Self::Error> {
        Point::new(x, y)
    }
}

impl From<Point> for (i64, i64) {
    fn from(p: Point) -> Self {
        (p.x, p.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Sign of the orientation determinant of an ordered point triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    Collinear,
    CounterClockwise,
}

impl Orientation {
    /// `-1`, `0` or `+1`.
    pub fn sign(self) -> i8 {
        match self {
            Orientation::Clockwise => -1,
            Orientation::Collinear => 0,
            Orientation::CounterClockwise => 1,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::Collinear => Orientation::Collinear,
            Orientation::CounterClockwise => Orientation::Clockwise,
        }
    }
}

/// Sign of `| b-a, c-a |`. Counterclockwise is positive.
pub fn orientation(a: Point, b: Point, c: Point) -> Orientation {
    let det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    match det.cmp(&0) {
        Ordering::Less => Orientation::Clockwise,
        Ordering::Equal => Orientation::Collinear,
        Ordering::Greater => Orientation::CounterClockwise,
    }
}

/// Whether the line through `a` and `b` puts `p` and `q` in opposite open
/// half-planes.
pub fn separates(a: Point, b: Point, p: Point, q: Point) -> Result<bool, GeometryError> {
    let op = orientation(a, b, p);
    if op == Orientation::Collinear {
        return Err(GeometryError::CollinearPoints(a, b, p));
    }
    let oq = orientation(a, b, q);
    if oq == Orientation::Collinear {
        return Err(GeometryError::CollinearPoints(a, b, q));
    }
    Ok(op != oq)
}

/// An ordered set of `n >= 3` points, no three of them collinear.
///
/// Points are addressed by their 0-based position everywhere else in the
/// crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Configuration {
    points: Vec<Point>,
}

impl Configuration {
    pub fn new(points: Vec<Point>) -> Result<Self, GeometryError> {
        let n = points.len();
        if n < 3 {
            return Err(GeometryError::TooFewPoints(n));
        }
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if orientation(points[a], points[b], points[c]) == Orientation::Collinear {
                        return Err(GeometryError::CollinearTriple(a, b, c));
                    }
                }
            }
        }
        Ok(Configuration { points })
    }

    /// Builds a configuration from raw coordinate pairs.
    pub fn from_coords<I>(coords: I) -> Result<Self, GeometryError>
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        let points = coords
            .into_iter()
            .map(|(x, y)| Point::new(x, y))
            .collect::<Result<Vec<_>, _>>()?;
        Configuration::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Point {
        self.points[index]
    }

    pub fn orientation(&self, a: usize, b: usize, c: usize) -> Orientation {
        orientation(self.points[a], self.points[b], self.points[c])
    }

    fn check_index(&self, index: usize) -> Result<(), GeometryError> {
        if index >= self.points.len() {
            Err(GeometryError::IndexOutOfRange {
                index,
                n: self.points.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Parses the plain-text point format: a line holding `n`, then `n` lines
    /// `x y`. Blank lines and `#` comments are ignored.
    pub fn parse(input: &str) -> Result<Self, FormatError> {
        let mut lines = text::content_lines(input);
        let (header_line, n) = text::read_count(&mut lines)?;
        let mut points = Vec::with_capacity(n);
        let mut line_of = Vec::with_capacity(n);
        for _ in 0..n {
            let (line_no, line) = lines.next().ok_or_else(|| {
                FormatError::new(
                    header_line,
                    format!("expected {n} points, found {}", points.len()),
                )
            })?;
            let values = text::parse_integers::<i64>(line_no, line)?;
            if values.len() != 2 {
                return Err(FormatError::new(
                    line_no,
                    format!("expected `x y`, found {} values", values.len()),
                ));
            }
            let p = Point::new(values[0], values[1])
                .map_err(|e| FormatError::new(line_no, e.to_string()))?;
            points.push(p);
            line_of.push(line_no);
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(FormatError::new(line_no, "unexpected trailing content"));
        }
        Configuration::new(points).map_err(|e| match e {
            GeometryError::CollinearTriple(a, b, c) => FormatError::new(
                line_of[c],
                format!(
                    "points #{a}, #{b}, #{c} (lines {}, {}, {}) are collinear",
                    line_of[a], line_of[b], line_of[c]
                ),
            ),
            other => FormatError::new(header_line, other.to_string()),
        })
    }

    /// Renders the plain-text point format accepted by [`Configuration::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.points.len());
        for p in &self.points {
            out.push_str(&format!("{} {}\n", p.x, p.y));
        }
        out
    }
}

/// Number of lines through two points of `config \ {i, j}` separating
/// points `i` and `j`.
pub fn separating_count(
    config: &Configuration,
    i: usize,
    j: usize,
) -> Result<usize, GeometryError> {
    config.check_index(i)?;
    config.check_index(j)?;
    if i == j {
        return Err(GeometryError::RepeatedIndex(i));
    }
    let pts = config.points();
    let (p, q) = (pts[i], pts[j]);
    let mut count = 0;
    for a in 0..pts.len() {
        if a == i || a == j {
            continue;
        }
        for b in a + 1..pts.len() {
            if b == i || b == j {
                continue;
            }
            if separates(pts[a], pts[b], p, q)? {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Convex hull as a counterclockwise cycle of point indices.
///
/// The cycle is rotated to start at its smallest index, so two hulls with the
/// same vertices compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HullCycle {
    indices: Vec<usize>,
}

impl HullCycle {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    /// Hull vertices in increasing index order.
    pub fn vertex_set(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }
}

/// Exact convex hull (Andrew's monotone chain).
pub fn convex_hull(config: &Configuration) -> HullCycle {
    let all: Vec<usize> = (0..config.len()).collect();
    HullCycle {
        indices: hull_of(config.points(), &all),
    }
}

/// CCW hull of the points named by `subset`, rotated to start at its smallest
/// index. Assumes no three of them are collinear.
fn hull_of(points: &[Point], subset: &[usize]) -> Vec<usize> {
    let mut order = subset.to_vec();
    order.sort_by_key(|&i| (points[i].x, points[i].y));
    if order.len() < 3 {
        return order;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(order.len() + 1);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(order.iter())
        } else {
            Box::new(order.iter().rev())
        };
        for &i in iter {
            while hull.len() >= start + 2
                && orientation(
                    points[hull[hull.len() - 2]],
                    points[hull[hull.len() - 1]],
                    points[i],
                ) != Orientation::CounterClockwise
            {
                hull.pop();
            }
            hull.push(i);
        }
        // the last point of each chain starts the next one
        hull.pop();
    }
    let min_pos = hull
        .iter()
        .enumerate()
        .min_by_key(|&(_, &i)| i)
        .map(|(pos, _)| pos)
        .unwrap_or(0);
    hull.rotate_left(min_pos);
    hull
}

/// Whether every point of `subset` is a vertex of the subset's own hull.
pub fn in_convex_position(config: &Configuration, subset: &[usize]) -> bool {
    subset.len() <= 3 || hull_of(config.points(), subset).len() == subset.len()
}

/// Random configuration with coordinates uniform in `[-bound, bound]^2`.
///
/// Points are drawn one at a time; a draw that would create a repeated point
/// or a collinear triple is rejected. Fails once [`RANDOM_RETRY_LIMIT`]
/// consecutive draws are rejected. The result depends only on
/// `(n, seed, bound)`.
pub fn random_configuration(
    n: usize,
    seed: u64,
    bound: i64,
) -> Result<Configuration, GeometryError> {
    if n < 3 {
        return Err(GeometryError::TooFewPoints(n));
    }
    if !(1..=COORD_LIMIT).contains(&bound) {
        return Err(GeometryError::CoordinateOutOfRange { x: bound, y: bound });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Point> = Vec::with_capacity(n);
    while points.len() < n {
        let mut rejected = 0;
        loop {
            let p = Point {
                x: rng.gen_range(-bound..=bound),
                y: rng.gen_range(-bound..=bound),
            };
            if compatible(&points, p) {
                points.push(p);
                break;
            }
            rejected += 1;
            if rejected >= RANDOM_RETRY_LIMIT {
                return Err(GeometryError::RetryLimit { n, bound });
            }
        }
    }
    Configuration::new(points)
}

fn compatible(points: &[Point], p: Point) -> bool {
    for (a_pos, &a) in points.iter().enumerate() {
        if a == p {
            return false;
        }
        for &b in &points[a_pos + 1..] {
            if orientation(a, b, p) == Orientation::Collinear {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64) -> Point {
        Point::new(x, y).unwrap()
    }

    fn square() -> Configuration {
        Configuration::from_coords([(0, 0), (10, 0), (10, 10), (0, 10)]).unwrap()
    }

    fn triangle_with_interior() -> Configuration {
        Configuration::from_coords([(0, 0), (12, 0), (0, 12), (3, 3)]).unwrap()
    }

    #[test]
    fn orientation_signs() {
        assert_eq!(orientation(pt(0, 0), pt(1, 0), pt(0, 1)).sign(), 1);
        assert_eq!(orientation(pt(0, 0), pt(1, 1), pt(2, 2)).sign(), 0);
        assert_eq!(orientation(pt(0, 0), pt(0, 1), pt(1, 0)).sign(), -1);
    }

    #[test]
    fn orientation_at_coordinate_limit_is_exact() {
        let l = COORD_LIMIT;
        assert_eq!(
            orientation(pt(-l, -l), pt(l, l), pt(l, l - 1)),
            Orientation::Clockwise
        );
        assert_eq!(
            orientation(pt(-l, -l), pt(l, l), pt(l - 1, l)),
            Orientation::CounterClockwise
        );
        assert_eq!(
            orientation(pt(-l, -l), pt(l, l), pt(0, 0)),
            Orientation::Collinear
        );
    }

    #[test]
    fn point_bound_enforced() {
        assert!(Point::new(COORD_LIMIT, -COORD_LIMIT).is_ok());
        assert!(matches!(
            Point::new(COORD_LIMIT + 1, 0),
            Err(GeometryError::CoordinateOutOfRange { .. })
        ));
    }

    #[test]
    fn separates_examples() {
        assert!(separates(pt(0, 0), pt(2, 0), pt(1, 1), pt(1, -1)).unwrap());
        assert!(!separates(pt(0, 0), pt(2, 0), pt(1, 1), pt(3, 2)).unwrap());
        assert!(matches!(
            separates(pt(0, 0), pt(1, 1), pt(2, 2), pt(0, 1)),
            Err(GeometryError::CollinearPoints(..))
        ));
    }

    #[test]
    fn separating_count_examples() {
        let sq = square();
        assert_eq!(separating_count(&sq, 0, 2).unwrap(), 1);
        assert_eq!(separating_count(&sq, 0, 1).unwrap(), 0);
        assert_eq!(
            separating_count(&triangle_with_interior(), 0, 1).unwrap(),
            1
        );
        assert!(matches!(
            separating_count(&sq, 1, 1),
            Err(GeometryError::RepeatedIndex(1))
        ));
        assert!(matches!(
            separating_count(&sq, 0, 4),
            Err(GeometryError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn collinear_configuration_rejected() {
        let err = Configuration::from_coords([(0, 0), (5, 1), (1, 1), (2, 2)]).unwrap_err();
        assert_eq!(err, GeometryError::CollinearTriple(0, 2, 3));
        assert!(matches!(
            Configuration::from_coords([(0, 0), (1, 0)]),
            Err(GeometryError::TooFewPoints(2))
        ));
    }

    #[test]
    fn hull_examples() {
        assert_eq!(convex_hull(&triangle_with_interior()).indices(), &[0, 1, 2]);
        assert_eq!(convex_hull(&square()).indices(), &[0, 1, 2, 3]);
        // clockwise input order still yields a CCW cycle
        let cw = Configuration::from_coords([(0, 0), (0, 10), (10, 10), (10, 0)]).unwrap();
        assert_eq!(convex_hull(&cw).indices(), &[0, 3, 2, 1]);
    }

    #[test]
    fn convex_position() {
        let c = triangle_with_interior();
        assert!(in_convex_position(&c, &[0, 1, 3]));
        assert!(!in_convex_position(&c, &[0, 1, 2, 3]));
        assert!(in_convex_position(&square(), &[0, 1, 2, 3]));
    }

    #[test]
    fn random_configuration_contract() {
        let t = random_configuration(3, 99, 100).unwrap();
        assert_eq!(t.len(), 3);
        let a = random_configuration(7, 12345, 1000).unwrap();
        let b = random_configuration(7, 12345, 1000).unwrap();
        assert_eq!(a, b);
        assert!(a
            .points()
            .iter()
            .all(|p| p.x().abs() <= 1000 && p.y().abs() <= 1000));
        assert!(matches!(
            random_configuration(50, 7, 2),
            Err(GeometryError::RetryLimit { .. })
        ));
    }

    #[test]
    fn text_format() {
        let c = Configuration::parse("4\n0 0\n10 0\n10 10\n0 10\n").unwrap();
        assert_eq!(c, square());
        assert_eq!(Configuration::parse(&c.to_text()).unwrap(), c);
        let err = Configuration::parse("3\n0 0\n1 1\n2 2\n").unwrap_err();
        assert_eq!(err.line, 4);
        assert!(err.message.contains("collinear"));
        assert!(Configuration::parse("3\n0 0\n1 x\n2 5\n").is_err());
        assert!(Configuration::parse("4\n0 0\n1 0\n0 1\n").is_err());
    }
}
