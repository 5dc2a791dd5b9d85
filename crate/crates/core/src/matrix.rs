//! The separating matrix of a configuration, its Orchard parity partition,
//! and screening of arbitrary square matrices against the necessary
//! conditions every separating matrix satisfies.

use std::fmt;

use serde::Serialize;

use crate::geometry::{separating_count, Configuration};
use crate::text::{self, FormatError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix of order {0} is too small, need n >= 3")]
    TooSmall(usize),
    #[error("expected {expected} entries for the given order, got {actual}")]
    WrongSize { expected: usize, actual: usize },
    #[error("entry ({i}, {j}) = {a} differs from entry ({j}, {i}) = {b}")]
    NotSymmetric { i: usize, j: usize, a: u64, b: u64 },
    #[error("diagonal entry ({i}, {i}) = {value} is not zero")]
    NonZeroDiagonal { i: usize, value: u64 },
    #[error("entry ({i}, {j}) = {value} exceeds the bound C(n-2, 2) = {bound}")]
    EntryTooLarge {
        i: usize,
        j: usize,
        value: u64,
        bound: u64,
    },
    #[error(
        "parity relation is not an equivalence with at most two classes (points {0}, {1}, {2})"
    )]
    NotEquivalence(usize, usize, usize),
}

/// `C(n-2, 2)`: the number of lines available to separate a pair.
pub fn max_entry(n: usize) -> u64 {
    let m = n.saturating_sub(2) as u64;
    m * m.saturating_sub(1) / 2
}

/// A raw square matrix of nonnegative integers, not yet checked for anything
/// beyond being square.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SquareMatrix {
    n: usize,
    entries: Vec<u64>,
}

impl SquareMatrix {
    pub fn new(n: usize, entries: Vec<u64>) -> Result<Self, MatrixError> {
        if entries.len() != n * n {
            return Err(MatrixError::WrongSize {
                expected: n * n,
                actual: entries.len(),
            });
        }
        Ok(SquareMatrix { n, entries })
    }

    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(MatrixError::WrongSize {
                    expected: n * n,
                    actual: n * row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Ok(SquareMatrix { n, entries })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u64) {
        self.entries[i * self.n + j] = value;
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_symmetric(&mut self, i: usize, j: usize, value: u64) {
        self.set(i, j, value);
        self.set(j, i, value);
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Parses the text format: a line holding `n`, then `n` rows of `n`
    /// whitespace-separated decimal integers.
    pub fn parse(input: &str) -> Result<Self, FormatError> {
        let mut lines = text::content_lines(input);
        let (header_line, n) = text::read_count(&mut lines)?;
        let mut entries = Vec::with_capacity(n * n);
        for row in 0..n {
            let (line_no, line) = lines.next().ok_or_else(|| {
                FormatError::new(header_line, format!("expected {n} rows, found {row}"))
            })?;
            let values = text::parse_integers::<u64>(line_no, line)?;
            if values.len() != n {
                return Err(FormatError::new(
                    line_no,
                    format!("expected {n} entries in row {row}, found {}", values.len()),
                ));
            }
            entries.extend(values);
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(FormatError::new(line_no, "unexpected trailing content"));
        }
        Ok(SquareMatrix { n, entries })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(u64::to_string).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// A symmetric matrix with zero diagonal and entries at most `C(n-2, 2)`.
///
/// Parity conditions are not part of the type; [`validate`] and
/// [`orchard_partition`] check them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeparatingMatrix(SquareMatrix);

impl SeparatingMatrix {
    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.0.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[u64] {
        self.0.row(i)
    }

    pub fn as_square(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn to_text(&self) -> String {
        self.0.to_text()
    }
}

impl TryFrom<SquareMatrix> for SeparatingMatrix {
    type Error = MatrixError;

    fn try_from(m: SquareMatrix) -> Result<Self, Self::Error> {
        let n = m.n;
        if n < 3 {
            return Err(MatrixError::TooSmall(n));
        }
        let bound = max_entry(n);
        for i in 0..n {
            if m.get(i, i) != 0 {
                return Err(MatrixError::NonZeroDiagonal {
                    i,
                    value: m.get(i, i),
                });
            }
            for j in i + 1..n {
                let (a, b) = (m.get(i, j), m.get(j, i));
                if a != b {
                    return Err(MatrixError::NotSymmetric { i, j, a, b });
                }
                if a > bound {
                    return Err(MatrixError::EntryTooLarge {
                        i,
                        j,
                        value: a,
                        bound,
                    });
                }
            }
        }
        Ok(SeparatingMatrix(m))
    }
}

impl fmt::Display for SeparatingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Separating matrix of a configuration, one [`separating_count`] per pair.
pub fn compute_matrix(config: &Configuration) -> SeparatingMatrix {
    let n = config.len();
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            // indices are in range and distinct, and the configuration is in
            // general position, so the count cannot fail
            let count = separating_count(config, i, j).expect("valid configuration") as u64;
            m.set_symmetric(i, j, count);
        }
    }
    SeparatingMatrix(m)
}

/// Two-class partition induced by `i ~ j  <=>  S_ij = n-1 (mod 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrchardPartition {
    class_of: Vec<u8>,
}

impl OrchardPartition {
    /// Class label (0 or 1) of each point; point 0 is always in class 0.
    pub fn class_of(&self) -> &[u8] {
        &self.class_of
    }

    /// Sizes of class 0 and class 1.
    pub fn class_sizes(&self) -> (usize, usize) {
        let ones = self.class_of.iter().filter(|&&c| c == 1).count();
        (self.class_of.len() - ones, ones)
    }

    pub fn classes(&self) -> [Vec<usize>; 2] {
        let mut out = [Vec::new(), Vec::new()];
        for (i, &c) in self.class_of.iter().enumerate() {
            out[c as usize].push(i);
        }
        out
    }
}

pub fn orchard_partition(matrix: &SeparatingMatrix) -> Result<OrchardPartition, MatrixError> {
    let n = matrix.n();
    let same = |i: usize, j: usize| matrix.get(i, j) % 2 == (n as u64 - 1) % 2;
    let class_of: Vec<u8> = (0..n)
        .map(|j| if j == 0 || same(0, j) { 0 } else { 1 })
        .collect();
    for i in 1..n {
        for j in i + 1..n {
            if same(i, j) != (class_of[i] == class_of[j]) {
                return Err(MatrixError::NotEquivalence(0, i, j));
            }
        }
    }
    Ok(OrchardPartition { class_of })
}

/// Identifier of one necessary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    Symmetry,
    ZeroDiagonal,
    MaxEntry,
    ParityCount,
    ParityTransitivity,
}

impl CheckId {
    pub const ALL: [CheckId; 5] = [
        CheckId::Symmetry,
        CheckId::ZeroDiagonal,
        CheckId::MaxEntry,
        CheckId::ParityCount,
        CheckId::ParityTransitivity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::Symmetry => "symmetry",
            CheckId::ZeroDiagonal => "zero-diagonal",
            CheckId::MaxEntry => "max-entry",
            CheckId::ParityCount => "parity-count",
            CheckId::ParityTransitivity => "parity-transitivity",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub id: CheckId,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, id: CheckId) -> &CheckResult {
        self.checks
            .iter()
            .find(|c| c.id == id)
            .expect("every report holds all five checks")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("matrix of order {}\n", self.n);
        for c in &self.checks {
            let verdict = if c.passed { "pass" } else { "FAIL" };
            out.push_str(&format!("{:<20} {verdict}  {}\n", c.id.as_str(), c.detail));
        }
        if self.passed() {
            out.push_str("necessary conditions satisfied\n");
        } else {
            out.push_str("necessary conditions violated\n");
        }
        out
    }
}

/// Screens a raw matrix against the five necessary conditions.
///
/// The parity checks read only the strict upper triangle, so they are
/// meaningful even when the symmetry check fails. They are evaluated
/// directly from the entries, independently of [`orchard_partition`].
pub fn validate(matrix: &SquareMatrix) -> ValidationReport {
    let n = matrix.order();
    let upper = |i: usize, j: usize| {
        if i < j {
            matrix.get(i, j)
        } else {
            matrix.get(j, i)
        }
    };
    // n+1 has the parity of n-1 and stays defined for n = 0
    let same_parity_as = |v: u64, r: usize| v % 2 == (r as u64) % 2;
    let mut checks = Vec::with_capacity(5);

    let asym = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| matrix.get(i, j) != matrix.get(j, i));
    checks.push(match asym {
        None => CheckResult {
            id: CheckId::Symmetry,
            passed: true,
            detail: "symmetric".into(),
        },
        Some((i, j)) => CheckResult {
            id: CheckId::Symmetry,
            passed: false,
            detail: format!(
                "entry ({i},{j}) = {} but ({j},{i}) = {}",
                matrix.get(i, j),
                matrix.get(j, i)
            ),
        },
    });

    let diag = (0..n).find(|&i| matrix.get(i, i) != 0);
    checks.push(match diag {
        None => CheckResult {
            id: CheckId::ZeroDiagonal,
            passed: true,
            detail: "all zero".into(),
        },
        Some(i) => CheckResult {
            id: CheckId::ZeroDiagonal,
            passed: false,
            detail: format!("entry ({i},{i}) = {}", matrix.get(i, i)),
        },
    });

    let bound = max_entry(n);
    let too_big = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| matrix.get(i, j) > bound);
    checks.push(match too_big {
        None => CheckResult {
            id: CheckId::MaxEntry,
            passed: true,
            detail: format!("all entries <= C({}, 2) = {bound}", n.saturating_sub(2)),
        },
        Some((i, j)) => CheckResult {
            id: CheckId::MaxEntry,
            passed: false,
            detail: format!(
                "entry ({i},{j}) = {} exceeds C({}, 2) = {bound}",
                matrix.get(i, j),
                n.saturating_sub(2)
            ),
        },
    });

    let opposite = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !same_parity_as(upper(i, j), n + 1))
        .count();
    let admissible: Vec<usize> = {
        let mut v: Vec<usize> = (0..=n / 2).map(|i| i * (n - i)).collect();
        v.dedup();
        v
    };
    let kind = if n.is_multiple_of(2) { "even" } else { "odd" };
    checks.push(CheckResult {
        id: CheckId::ParityCount,
        passed: admissible.contains(&opposite),
        detail: format!(
            "{opposite} {kind} entries above the diagonal; admissible i(n-i): {admissible:?}"
        ),
    });

    let mut violation = None;
    'outer: for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for (a, mid, b) in [(i, j, k), (j, i, k), (i, k, j)] {
                    let (x, y, z) = (upper(a, mid), upper(mid, b), upper(a, b));
                    let expected = if x % 2 == y % 2 { n + 1 } else { n };
                    if !same_parity_as(z, expected) {
                        violation = Some((a, mid, b));
                        break 'outer;
                    }
                }
            }
        }
    }
    checks.push(match violation {
        None => CheckResult {
            id: CheckId::ParityTransitivity,
            passed: true,
            detail: "consistent on every triple".into(),
        },
        Some((a, mid, b)) => CheckResult {
            id: CheckId::ParityTransitivity,
            passed: false,
            detail: format!(
                "entries ({a},{mid}) = {}, ({mid},{b}) = {} force ({a},{b}) to the other parity, found {}",
                upper(a, mid),
                upper(mid, b),
                upper(a, b)
            ),
        },
    });

    ValidationReport { n, checks }
}

/// Sum of each row.
pub fn row_sums(matrix: &SeparatingMatrix) -> Vec<u64> {
    (0..matrix.n())
        .map(|i| matrix.row(i).iter().sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Configuration {
        Configuration::from_coords([(0, 0), (10, 0), (10, 10), (0, 10)]).unwrap()
    }

    fn triangle_with_interior() -> Configuration {
        Configuration::from_coords([(0, 0), (12, 0), (0, 12), (3, 3)]).unwrap()
    }

    fn symmetric(n: usize, upper: &[(usize, usize, u64)]) -> SquareMatrix {
        let mut m = SquareMatrix::zeros(n);
        for &(i, j, v) in upper {
            m.set_symmetric(i, j, v);
        }
        m
    }

    #[test]
    fn square_matrix() {
        let m = compute_matrix(&square());
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i + 2) % 4 == j { 1 } else { 0 };
                assert_eq!(m.get(i, j), expected, "entry ({i},{j})");
            }
        }
        assert!(validate(m.as_square()).passed());
        assert_eq!(row_sums(&m), vec![1, 1, 1, 1]);
    }

    #[test]
    fn triangle_with_interior_matrix() {
        let m = compute_matrix(&triangle_with_interior());
        assert_eq!((m.get(0, 1), m.get(0, 2), m.get(1, 2)), (1, 1, 1));
        assert_eq!((m.get(0, 3), m.get(1, 3), m.get(2, 3)), (0, 0, 0));
        assert!(validate(m.as_square()).passed());
        assert_eq!(row_sums(&m), vec![2, 2, 2, 0]);
    }

    #[test]
    fn zero_row_sums() {
        let m = SeparatingMatrix::try_from(SquareMatrix::zeros(5)).unwrap();
        assert_eq!(row_sums(&m), vec![0; 5]);
    }

    #[test]
    fn partition_of_square() {
        let p = orchard_partition(&compute_matrix(&square())).unwrap();
        assert_eq!(p.classes(), [vec![0, 2], vec![1, 3]]);
        assert_eq!(p.class_sizes(), (2, 2));
    }

    #[test]
    fn all_even_at_odd_n_is_one_class() {
        let m =
            SeparatingMatrix::try_from(symmetric(5, &[(0, 1, 2), (2, 4, 2), (1, 3, 0)])).unwrap();
        let p = orchard_partition(&m).unwrap();
        assert_eq!(p.class_sizes(), (5, 0));
    }

    #[test]
    fn mutually_odd_triple_at_even_n_is_consistent() {
        // n-1 = 3 is odd, so odd entries mean "same class": {0,1,2} and {3}
        let m =
            SeparatingMatrix::try_from(symmetric(4, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)])).unwrap();
        let p = orchard_partition(&m).unwrap();
        assert_eq!(p.classes(), [vec![0, 1, 2], vec![3]]);
        assert!(validate(m.as_square()).passed());
    }

    #[test]
    fn mutually_even_triple_at_even_n_is_not_an_equivalence() {
        let m =
            SeparatingMatrix::try_from(symmetric(4, &[(0, 3, 1), (1, 3, 1), (2, 3, 1)])).unwrap();
        assert!(matches!(
            orchard_partition(&m),
            Err(MatrixError::NotEquivalence(..))
        ));
        let report = validate(m.as_square());
        assert!(!report.check(CheckId::ParityTransitivity).passed);
    }

    #[test]
    fn admissible_parity_counts_for_n6() {
        // every count of even upper-triangle entries from 0 to 15, each
        // realised by a symmetric n=6 matrix of 0/1 entries
        let mut accepted = Vec::new();
        for even in 0..=15usize {
            let mut m = SquareMatrix::zeros(6);
            let mut placed = 0;
            for i in 0..6 {
                for j in i + 1..6 {
                    m.set_symmetric(i, j, if placed < even { 0 } else { 1 });
                    placed += 1;
                }
            }
            if validate(&m).check(CheckId::ParityCount).passed {
                accepted.push(even);
            }
        }
        assert_eq!(accepted, vec![0, 5, 8, 9]);
    }

    #[test]
    fn entry_above_bound_fails_max_entry() {
        let m = symmetric(7, &[(2, 5, 11)]);
        let report = validate(&m);
        assert!(!report.check(CheckId::MaxEntry).passed);
        assert!(report.check(CheckId::MaxEntry).detail.contains("10"));
        assert!(matches!(
            SeparatingMatrix::try_from(m),
            Err(MatrixError::EntryTooLarge { bound: 10, .. })
        ));
    }

    #[test]
    fn zero_matrix_n4_fails_parity_count() {
        let report = validate(&SquareMatrix::zeros(4));
        let check = report.check(CheckId::ParityCount);
        assert!(!check.passed);
        assert!(check.detail.starts_with("6 even"));
        assert!(!report.passed());
    }

    #[test]
    fn asymmetry_and_diagonal_flagged() {
        let mut m = compute_matrix(&square()).as_square().clone();
        m.set(0, 1, 1);
        m.set(3, 3, 1);
        let report = validate(&m);
        assert!(!report.check(CheckId::Symmetry).passed);
        assert!(!report.check(CheckId::ZeroDiagonal).passed);
        assert!(report.check(CheckId::MaxEntry).passed);
        assert_eq!(report.checks.len(), 5);
        assert!(matches!(
            SeparatingMatrix::try_from(m),
            Err(MatrixError::NonZeroDiagonal { .. } | MatrixError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn report_wording_never_claims_validity() {
        let text = validate(compute_matrix(&square()).as_square()).to_text();
        assert!(text.contains("necessary conditions satisfied"));
        assert!(!text.to_lowercase().contains("valid separating matrix"));
    }

    #[test]
    fn text_format() {
        let m = compute_matrix(&triangle_with_interior());
        let parsed = SquareMatrix::parse(&m.to_text()).unwrap();
        assert_eq!(&parsed, m.as_square());
        assert!(SquareMatrix::parse("2\n0 1\n1\n").is_err());
        assert!(SquareMatrix::parse("2\n0 -1\n1 0\n").is_err());
        assert_eq!(
            SquareMatrix::parse("3\n0 0 0\n0 0 0\n").unwrap_err().line,
            1
        );
    }
}
