//! Recovering the convex hull from a separating matrix alone.
//!
//! If the hull of `n` points has `k` vertices, the entries along the hull
//! cycle sum to exactly `(n-k)(n-1)`: every line through an interior point
//! and a hull vertex crosses the hull boundary once, every line through two
//! interior points crosses it twice, and lines through two hull vertices
//! never cross it. For `k = 3` no other triple reaches that value, which
//! gives an exact cubic-time test. For larger hulls the analogous search over
//! `k`-subsets also returns "fake" hulls, subsets not in convex position whose
//! cheapest cycle happens to reach the target. Two row-sum heuristics try to
//! weed those out.

use itertools::Itertools;
use serde::Serialize;

use crate::geometry::{convex_hull, Configuration};
use crate::matrix::{row_sums, SeparatingMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecoveryError {
    #[error("index {index} out of range for a matrix of order {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("index {0} appears more than once")]
    RepeatedIndex(usize),
    #[error("a cycle needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("size-3 detection needs n >= 4, got {0}")]
    TooFewPoints(usize),
    #[error("triples {first:?} and {second:?} both reach the size-3 target; the matrix cannot come from a configuration")]
    AmbiguousTriangle {
        first: [usize; 3],
        second: [usize; 3],
    },
    #[error("no subset of size 3..={max_k} reaches its target")]
    Exhausted { max_k: usize },
}

/// Sum of the entries along a hull of `k` vertices among `n` points:
/// `(n-k)(n-1) = n^2 - (k+1)n + k`.
pub fn target(n: usize, k: usize) -> u64 {
    assert!(
        3 <= k && k <= n,
        "target needs 3 <= k <= n, got k={k}, n={n}"
    );
    ((n - k) * (n - 1)) as u64
}

fn check_indices(matrix: &SeparatingMatrix, indices: &[usize]) -> Result<(), RecoveryError> {
    let n = matrix.n();
    if indices.len() < 3 {
        return Err(RecoveryError::TooFewVertices(indices.len()));
    }
    let mut seen = vec![false; n];
    for &i in indices {
        if i >= n {
            return Err(RecoveryError::IndexOutOfRange { index: i, n });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(RecoveryError::RepeatedIndex(i));
        }
    }
    Ok(())
}

/// Sum of entries over consecutive pairs of `order`, wrap-around included.
pub fn cycle_score(matrix: &SeparatingMatrix, order: &[usize]) -> Result<u64, RecoveryError> {
    check_indices(matrix, order)?;
    Ok(cycle_sum(matrix, order))
}

fn cycle_sum(matrix: &SeparatingMatrix, order: &[usize]) -> u64 {
    order
        .iter()
        .zip(order.iter().cycle().skip(1))
        .map(|(&a, &b)| matrix.get(a, b))
        .sum()
}

/// A subset together with its cheapest Hamiltonian cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CycleScore {
    /// Vertices in increasing order.
    #[serde(rename = "indices")]
    pub subset: Vec<usize>,
    /// Cheapest cycle; starts at the smallest vertex, `order[1] < order[k-1]`.
    pub order: Vec<usize>,
    pub score: u64,
}

impl CycleScore {
    pub fn k(&self) -> usize {
        self.subset.len()
    }
}

/// Minimum cycle sum over all `(k-1)!/2` distinct Hamiltonian cycles on
/// `subset`.
///
/// Cycles are enumerated with the smallest vertex first and one direction per
/// cycle, in lexicographic order with branch-and-bound; among cycles of equal
/// score the lexicographically smallest is reported.
pub fn min_cycle(matrix: &SeparatingMatrix, subset: &[usize]) -> Result<CycleScore, RecoveryError> {
    check_indices(matrix, subset)?;
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    Ok(min_cycle_sorted(matrix, sorted))
}

fn min_cycle_sorted(matrix: &SeparatingMatrix, subset: Vec<usize>) -> CycleScore {
    let k = subset.len();
    if k == 3 {
        let score = cycle_sum(matrix, &subset);
        return CycleScore {
            order: subset.clone(),
            subset,
            score,
        };
    }
    let mut search = CycleSearch {
        matrix,
        vertices: &subset,
        path: Vec::with_capacity(k),
        used: vec![false; k],
        best: None,
    };
    search.path.push(0);
    search.used[0] = true;
    search.extend(0);
    let (score, best) = search.best.expect("k >= 3 admits at least one cycle");
    let order = best.iter().map(|&pos| subset[pos]).collect();
    CycleScore {
        subset,
        order,
        score,
    }
}

struct CycleSearch<'a> {
    matrix: &'a SeparatingMatrix,
    vertices: &'a [usize],
    /// Positions into `vertices`.
    path: Vec<usize>,
    used: Vec<bool>,
    best: Option<(u64, Vec<usize>)>,
}

impl CycleSearch<'_> {
    fn weight(&self, a: usize, b: usize) -> u64 {
        self.matrix.get(self.vertices[a], self.vertices[b])
    }

    fn extend(&mut self, partial: u64) {
        let k = self.vertices.len();
        if let Some((best, _)) = &self.best {
            if partial >= *best {
                return;
            }
        }
        let last = *self.path.last().expect("path starts with the first vertex");
        if self.path.len() == k {
            // one direction per cycle
            if self.path[1] > last {
                return;
            }
            let total = partial + self.weight(last, 0);
            if self.best.as_ref().is_none_or(|(best, _)| total < *best) {
                self.best = Some((total, self.path.clone()));
            }
            return;
        }
        for next in 1..k {
            if self.used[next] {
                continue;
            }
            let step = self.weight(last, next);
            self.used[next] = true;
            self.path.push(next);
            self.extend(partial + step);
            self.path.pop();
            self.used[next] = false;
        }
    }
}

/// The exact test for triangular hulls: the unique triple whose three
/// pairwise entries sum to `n^2 - 4n + 3`, if any.
///
/// `None` means the hull has more than three vertices.
pub fn detect_hull_size3(matrix: &SeparatingMatrix) -> Result<Option<[usize; 3]>, RecoveryError> {
    let n = matrix.n();
    if n < 4 {
        return Err(RecoveryError::TooFewPoints(n));
    }
    let goal = target(n, 3);
    let mut found: Option<[usize; 3]> = None;
    for i in 0..n {
        for j in i + 1..n {
            let ij = matrix.get(i, j);
            for k in j + 1..n {
                if ij + matrix.get(i, k) + matrix.get(j, k) == goal {
                    if let Some(first) = found {
                        return Err(RecoveryError::AmbiguousTriangle {
                            first,
                            second: [i, j, k],
                        });
                    }
                    found = Some([i, j, k]);
                }
            }
        }
    }
    Ok(found)
}

/// Whether the smallest row sum inside `subset` is at least the largest row
/// sum outside it. Always passes when `subset` holds every point.
pub fn row_sum_filter(matrix: &SeparatingMatrix, subset: &[usize]) -> bool {
    row_sum_filter_with(&row_sums(matrix), subset)
}

fn row_sum_filter_with(sums: &[u64], subset: &[usize]) -> bool {
    let inside_min = subset.iter().map(|&i| sums[i]).min().unwrap_or(0);
    let outside_max = (0..sums.len())
        .filter(|i| !subset.contains(i))
        .map(|i| sums[i])
        .max();
    outside_max.is_none_or(|max| inside_min >= max)
}

/// Fallback for a subset that fails [`row_sum_filter`].
///
/// Let `m >= 1` be the number of subset rows tied at the subset's smallest
/// row sum. Rank all rows by row sum, largest first, ties broken by smaller
/// index first. The subset passes iff every one of its `k` rows ranks within
/// the first `k + m`.
pub fn combined_filter(matrix: &SeparatingMatrix, subset: &[usize]) -> bool {
    combined_filter_with(&row_sums(matrix), subset)
}

fn combined_filter_with(sums: &[u64], subset: &[usize]) -> bool {
    let Some(inside_min) = subset.iter().map(|&i| sums[i]).min() else {
        return true;
    };
    let m = subset.iter().filter(|&&i| sums[i] == inside_min).count();
    let mut ranking: Vec<usize> = (0..sums.len()).collect();
    ranking.sort_by(|&a, &b| sums[b].cmp(&sums[a]).then(a.cmp(&b)));
    let limit = (subset.len() + m).min(sums.len());
    subset.iter().all(|i| ranking[..limit].contains(i))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateStatus {
    /// Found by the exact triangle test.
    #[serde(rename = "confirmed-size-3")]
    ConfirmedSize3,
    /// Reaches its target; not (yet) ruled out.
    Candidate,
    /// Differs from the geometric hull. Only assigned by
    /// [`classify_against_oracle`].
    Fake,
    /// Rejected by the row-sum filters.
    FilteredOut,
}

impl CandidateStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CandidateStatus::ConfirmedSize3 => "confirmed-size-3",
            CandidateStatus::Candidate => "candidate",
            CandidateStatus::Fake => "fake",
            CandidateStatus::FilteredOut => "filtered-out",
        }
    }
}

/// Filter verdicts for one candidate. `combined` is only evaluated when the
/// row-sum filter fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FilterOutcome {
    pub row_sum: bool,
    pub combined: Option<bool>,
}

impl FilterOutcome {
    pub fn evaluate(sums: &[u64], subset: &[usize]) -> Self {
        let row_sum = row_sum_filter_with(sums, subset);
        let combined = (!row_sum).then(|| combined_filter_with(sums, subset));
        FilterOutcome { row_sum, combined }
    }
}

/// Which candidates of one size survive filtering. The row-sum filter
/// decides whenever at least one candidate passes it; otherwise the
/// combined filter is consulted for every candidate.
pub fn filter_survivors(outcomes: &[FilterOutcome]) -> Vec<bool> {
    let row_sum_decides = outcomes.iter().any(|f| f.row_sum);
    outcomes
        .iter()
        .map(|f| {
            if row_sum_decides {
                f.row_sum
            } else {
                f.combined == Some(true)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HullCandidate {
    #[serde(flatten)]
    pub cycle: CycleScore,
    pub k: usize,
    pub status: CandidateStatus,
    pub filters: Option<FilterOutcome>,
}

impl HullCandidate {
    pub fn indices(&self) -> &[usize] {
        &self.cycle.subset
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchOptions {
    /// Largest subset size tried; `None` means `n`.
    pub max_k: Option<usize>,
    /// Apply the row-sum filters and keep searching past sizes whose
    /// candidates are all rejected.
    pub filters: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecoveryResult {
    pub n: usize,
    /// Size at which the search stopped.
    pub k: usize,
    /// Every target-reaching subset examined, in increasing size and then
    /// lexicographic order. With filters on this includes rejected
    /// candidates of smaller sizes.
    pub candidates: Vec<HullCandidate>,
}

impl RecoveryResult {
    /// Candidates that were not filtered out or marked fake.
    pub fn survivors(&self) -> impl Iterator<Item = &HullCandidate> {
        self.candidates.iter().filter(|c| {
            matches!(
                c.status,
                CandidateStatus::Candidate | CandidateStatus::ConfirmedSize3
            )
        })
    }

    /// Line-oriented rendering, one candidate per line.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "n {}, stopped at size {}, {} candidate(s)\n",
            self.n,
            self.k,
            self.candidates.len()
        );
        for c in &self.candidates {
            let join = |v: &[usize]| v.iter().map(usize::to_string).join(" ");
            out.push_str(&format!(
                "size {}, vertices {}, score {}, order {}, status {}",
                c.k,
                join(&c.cycle.subset),
                c.cycle.score,
                join(&c.cycle.order),
                c.status.as_str()
            ));
            if let Some(f) = c.filters {
                let verdict = |b: bool| if b { "pass" } else { "fail" };
                out.push_str(&format!(", row-sum {}", verdict(f.row_sum)));
                if let Some(comb) = f.combined {
                    out.push_str(&format!(", combined {}", verdict(comb)));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// All `k`-subsets whose cheapest cycle reaches `target(n, k)`, in
/// lexicographic order.
pub fn candidates_of_size(matrix: &SeparatingMatrix, k: usize) -> Vec<CycleScore> {
    let n = matrix.n();
    let goal = target(n, k);
    (0..n)
        .combinations(k)
        .map(|subset| min_cycle_sorted(matrix, subset))
        .filter(|c| c.score == goal)
        .collect()
}

/// Tries sizes `k = 3, 4, ...` and stops at the first size with a
/// target-reaching subset (with filters on: a surviving one). Every
/// target-reaching subset at each visited size is returned, not just the
/// first.
pub fn general_hull_search(
    matrix: &SeparatingMatrix,
    options: SearchOptions,
) -> Result<RecoveryResult, RecoveryError> {
    let n = matrix.n();
    let max_k = options.max_k.unwrap_or(n).min(n);
    let sums = row_sums(matrix);
    let mut candidates = Vec::new();
    for k in 3..=max_k {
        let found = candidates_of_size(matrix, k);
        let filters: Vec<Option<FilterOutcome>> = found
            .iter()
            .map(|c| (options.filters && k < n).then(|| FilterOutcome::evaluate(&sums, &c.subset)))
            .collect();
        let survives = match filters.iter().copied().collect::<Option<Vec<_>>>() {
            Some(outcomes) => filter_survivors(&outcomes),
            None => vec![true; found.len()],
        };
        let stop = survives.contains(&true);
        for ((cycle, filters), survives) in found.into_iter().zip(filters).zip(survives) {
            let status = match (survives, k) {
                (false, _) => CandidateStatus::FilteredOut,
                (true, 3) => CandidateStatus::ConfirmedSize3,
                (true, _) => CandidateStatus::Candidate,
            };
            candidates.push(HullCandidate {
                cycle,
                k,
                status,
                filters,
            });
        }
        if stop {
            return Ok(RecoveryResult { n, k, candidates });
        }
    }
    Err(RecoveryError::Exhausted { max_k })
}

/// Marks every candidate whose vertex set differs from the geometric hull's
/// as [`CandidateStatus::Fake`]. For experiments only: it looks at the
/// coordinates.
pub fn classify_against_oracle(
    config: &Configuration,
    result: &RecoveryResult,
) -> Vec<HullCandidate> {
    let hull = convex_hull(config).vertex_set();
    result
        .candidates
        .iter()
        .map(|c| {
            let mut c = c.clone();
            if c.cycle.subset != hull {
                c.status = CandidateStatus::Fake;
            }
            c
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{compute_matrix, SquareMatrix};

    fn square() -> SeparatingMatrix {
        compute_matrix(&Configuration::from_coords([(0, 0), (10, 0), (10, 10), (0, 10)]).unwrap())
    }

    fn triangle_config() -> Configuration {
        Configuration::from_coords([(0, 0), (12, 0), (0, 12), (3, 3)]).unwrap()
    }

    #[test]
    fn target_values() {
        assert_eq!(target(4, 3), 3);
        assert_eq!(target(5, 3), 8);
        assert_eq!(target(5, 3), 5 * 5 - 4 * 5 + 3);
        for n in 3..20 {
            assert_eq!(target(n, n), 0);
            for k in 3..=n {
                assert_eq!(
                    target(n, k) as i64,
                    (n * n) as i64 - ((k + 1) * n) as i64 + k as i64
                );
            }
        }
    }

    #[test]
    fn cycle_score_examples() {
        let sq = square();
        assert_eq!(cycle_score(&sq, &[0, 1, 2, 3]).unwrap(), 0);
        assert_eq!(cycle_score(&sq, &[0, 2, 1, 3]).unwrap(), 2);
        let tri = compute_matrix(&triangle_config());
        assert_eq!(cycle_score(&tri, &[0, 1, 2]).unwrap(), target(4, 3));
        assert_eq!(
            cycle_score(&sq, &[0, 1, 0]),
            Err(RecoveryError::RepeatedIndex(0))
        );
        assert!(matches!(
            cycle_score(&sq, &[0, 1, 7]),
            Err(RecoveryError::IndexOutOfRange { .. })
        ));
        assert_eq!(
            cycle_score(&sq, &[0, 1]),
            Err(RecoveryError::TooFewVertices(2))
        );
    }

    #[test]
    fn min_cycle_examples() {
        let sq = square();
        let best = min_cycle(&sq, &[3, 1, 2, 0]).unwrap();
        assert_eq!(best.score, 0);
        assert_eq!(best.order, vec![0, 1, 2, 3]);
        assert_eq!(best.subset, vec![0, 1, 2, 3]);
        let tri = min_cycle(&sq, &[2, 0, 1]).unwrap();
        assert_eq!(tri.order, vec![0, 1, 2]);
        assert_eq!(tri.score, sq.get(0, 1) + sq.get(1, 2) + sq.get(0, 2));
    }

    #[test]
    fn min_cycle_breaks_ties_lexicographically() {
        // all cycles on a zero matrix tie; the first canonical one wins
        let zero = SeparatingMatrix::try_from(SquareMatrix::zeros(6)).unwrap();
        let best = min_cycle(&zero, &[5, 1, 3, 4, 2]).unwrap();
        assert_eq!(best.order, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn size3_detection() {
        let tri = compute_matrix(&triangle_config());
        assert_eq!(detect_hull_size3(&tri).unwrap(), Some([0, 1, 2]));
        assert_eq!(detect_hull_size3(&square()).unwrap(), None);
        let all_ones = {
            let mut m = SquareMatrix::zeros(4);
            for i in 0..4 {
                for j in i + 1..4 {
                    m.set_symmetric(i, j, 1);
                }
            }
            SeparatingMatrix::try_from(m).unwrap()
        };
        assert!(matches!(
            detect_hull_size3(&all_ones),
            Err(RecoveryError::AmbiguousTriangle { .. })
        ));
        let small = SeparatingMatrix::try_from(SquareMatrix::zeros(3)).unwrap();
        assert_eq!(
            detect_hull_size3(&small),
            Err(RecoveryError::TooFewPoints(3))
        );
    }

    #[test]
    fn general_search_examples() {
        let tri = compute_matrix(&triangle_config());
        let r = general_hull_search(&tri, SearchOptions::default()).unwrap();
        assert_eq!(r.k, 3);
        assert_eq!(r.candidates.len(), 1);
        assert_eq!(r.candidates[0].indices(), &[0, 1, 2]);
        assert_eq!(r.candidates[0].status, CandidateStatus::ConfirmedSize3);

        let r = general_hull_search(
            &square(),
            SearchOptions {
                filters: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.k, 4);
        assert_eq!(r.candidates.len(), 1);
        assert_eq!(r.candidates[0].cycle.score, 0);
        assert_eq!(r.candidates[0].filters, None);
    }

    #[test]
    fn search_exhaustion() {
        // all-max entries: every cycle overshoots every target below k = n,
        // and the k = n target of 0 is unreachable
        let mut m = SquareMatrix::zeros(5);
        for i in 0..5 {
            for j in i + 1..5 {
                m.set_symmetric(i, j, 3);
            }
        }
        let m = SeparatingMatrix::try_from(m).unwrap();
        assert_eq!(
            general_hull_search(&m, SearchOptions::default()),
            Err(RecoveryError::Exhausted { max_k: 5 })
        );
        assert_eq!(
            general_hull_search(
                &m,
                SearchOptions {
                    max_k: Some(4),
                    filters: false
                }
            ),
            Err(RecoveryError::Exhausted { max_k: 4 })
        );
    }

    #[test]
    fn filters_on_small_examples() {
        let tri = compute_matrix(&triangle_config());
        assert!(row_sum_filter(&tri, &[0, 1, 2]));
        assert!(!row_sum_filter(&tri, &[0, 1, 3]));

        // sums: 9 8 7 7 6 5; ranking 0 1 2 3 4 5
        let sums = [9, 8, 7, 7, 6, 5];
        // exactly the top three rows
        assert!(combined_filter_with(&sums, &[0, 1, 2]));
        // min 7 attained once in the subset (m = 1); row 3 ranks 4th <= k+m = 4
        assert!(combined_filter_with(&sums, &[0, 1, 3]));
        // row 4 ranks 5th > 4
        assert!(!combined_filter_with(&sums, &[0, 1, 4]));
        assert!(!combined_filter_with(&sums, &[1, 2, 4]));
        // m = 2 (rows 2 and 3 both at 7) widens the window to 5
        assert!(combined_filter_with(&sums, &[0, 2, 3]));
        assert!(combined_filter_with(&sums, &[1, 2, 3]));
    }

    #[test]
    fn classify_marks_mismatches() {
        let config = triangle_config();
        let r = general_hull_search(&compute_matrix(&config), SearchOptions::default()).unwrap();
        let classified = classify_against_oracle(&config, &r);
        assert_eq!(classified[0].status, CandidateStatus::ConfirmedSize3);

        let mut tampered = r.clone();
        tampered.candidates[0].cycle.subset = vec![0, 1, 3];
        assert_eq!(
            classify_against_oracle(&config, &tampered)[0].status,
            CandidateStatus::Fake
        );
    }

    #[test]
    fn text_report_mentions_size_and_vertices() {
        let r = general_hull_search(&square(), SearchOptions::default()).unwrap();
        assert!(r
            .to_text()
            .contains("size 4, vertices 0 1 2 3, score 0, order 0 1 2 3"));
    }
}
