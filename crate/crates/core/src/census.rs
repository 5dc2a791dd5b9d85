//! Batch experiments: recover the hull of every configuration in a corpus
//! from its separating matrix and compare with the geometric hull.
//!
//! Records are processed in batches on a dedicated thread pool; per-record
//! outcomes are collected in record order and folded sequentially, so the
//! report does not depend on the number of workers.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{convex_hull, in_convex_position, random_configuration, Configuration};
use crate::matrix::{compute_matrix, orchard_partition, row_sums, validate};
use crate::otdb::{OrderTypeRecord, OtdbError};
use crate::recovery::{
    candidates_of_size, cycle_score, detect_hull_size3, filter_survivors, target, FilterOutcome,
};

const BATCH: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    pub filters: bool,
    /// Worker threads; 0 lets the pool pick.
    pub jobs: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            filters: true,
            jobs: 1,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CensusError {
    #[error(transparent)]
    Io(#[from] OtdbError),
    #[error("could not build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("configurations of different sizes in one census ({0} and {1})")]
    MixedSizes(usize, usize),
}

/// A target-reaching subset that is not the geometric hull.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FakeCandidate {
    pub indices: Vec<usize>,
    pub order: Vec<usize>,
    pub score: u64,
    pub convex_position: bool,
    pub filters: Option<FilterOutcome>,
    /// Whether the fake is left standing after filtering its size.
    pub survives: Option<bool>,
}

/// Everything the census records about one configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordOutcome {
    pub index: u64,
    pub n: usize,
    pub hull_size: usize,
    /// Size at which the unfiltered search stops.
    pub search_k: usize,
    /// Fakes returned by the unfiltered search.
    pub fakes: Vec<FakeCandidate>,
    /// With filters: every fake met while searching up to the filtered stop.
    pub filtered_fakes: Vec<FakeCandidate>,
    /// Filter verdicts on the true hull (`None` without filters or when the
    /// hull holds every point).
    pub hull_filters: Option<FilterOutcome>,
    /// With filters: whether the true hull is among the survivors.
    pub hull_survives: Option<bool>,
    pub anomalies: Vec<String>,
}

/// Analyses one configuration: checks the hull-sum identity, the size-3
/// detector and the separating-matrix necessary conditions, then runs the
/// size-by-size search and classifies candidates against the geometric hull.
pub fn analyze(index: u64, config: &Configuration, filters: bool) -> RecordOutcome {
    let n = config.len();
    let matrix = compute_matrix(config);
    let hull = convex_hull(config);
    let hull_set = hull.vertex_set();
    let k_hull = hull.len();
    let sums = row_sums(&matrix);
    let mut anomalies = Vec::new();

    if !validate(matrix.as_square()).passed() {
        anomalies.push("computed matrix fails a necessary condition".to_string());
    }
    if orchard_partition(&matrix).is_err() {
        anomalies.push("parity relation is not an equivalence".to_string());
    }
    let hull_score = cycle_score(&matrix, hull.indices()).expect("hull indices are distinct");
    if hull_score != target(n, k_hull) {
        anomalies.push(format!(
            "hull cycle scores {hull_score}, expected {}",
            target(n, k_hull)
        ));
    }
    if n >= 4 {
        match detect_hull_size3(&matrix) {
            Ok(Some(t)) if k_hull == 3 && t.as_slice() == hull_set.as_slice() => {}
            Ok(None) if k_hull > 3 => {}
            other => anomalies.push(format!(
                "size-3 detection returned {other:?} for hull {hull_set:?}"
            )),
        }
    }

    let fake_of = |c: &crate::recovery::CycleScore,
                   filters: Option<FilterOutcome>,
                   survives: Option<bool>| {
        FakeCandidate {
            indices: c.subset.clone(),
            order: c.order.clone(),
            score: c.score,
            convex_position: in_convex_position(config, &c.subset),
            filters,
            survives,
        }
    };

    let mut search_k = None;
    let mut fakes = Vec::new();
    let mut filtered_fakes = Vec::new();
    let mut hull_survives = None;
    for k in 3..=n {
        let found = candidates_of_size(&matrix, k);
        if found.is_empty() {
            continue;
        }
        let outcomes: Vec<FilterOutcome> = found
            .iter()
            .map(|c| FilterOutcome::evaluate(&sums, &c.subset))
            .collect();
        let survivors = if k < n {
            filter_survivors(&outcomes)
        } else {
            vec![true; found.len()]
        };
        let verdict = |i: usize| (k < n).then_some(outcomes[i]);
        if search_k.is_none() {
            search_k = Some(k);
            fakes = found
                .iter()
                .enumerate()
                .filter(|(_, c)| c.subset != hull_set)
                .map(|(i, c)| fake_of(c, verdict(i).filter(|_| filters), None))
                .collect();
            if !filters {
                break;
            }
        }
        for (i, c) in found.iter().enumerate() {
            if c.subset == hull_set {
                hull_survives = Some(survivors[i]);
            } else {
                filtered_fakes.push(fake_of(c, verdict(i), Some(survivors[i])));
            }
        }
        if survivors.contains(&true) {
            break;
        }
    }
    if filters && hull_survives.is_none() {
        hull_survives = Some(false);
    }

    let search_k = match search_k {
        Some(k) => k,
        None => {
            anomalies.push("no subset reaches its target".to_string());
            0
        }
    };
    if let Some(f) = fakes.iter().find(|f| f.convex_position) {
        anomalies.push(format!("fake {:?} is in convex position", f.indices));
    }

    RecordOutcome {
        index,
        n,
        hull_size: k_hull,
        search_k,
        fakes,
        filtered_fakes,
        hull_filters: (filters && k_hull < n).then(|| FilterOutcome::evaluate(&sums, &hull_set)),
        hull_survives,
        anomalies,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FilterStats {
    /// Fake candidates met by the filtered search.
    pub fakes_seen: u64,
    pub row_sum_fakes_rejected: u64,
    pub row_sum_fakes_passed: u64,
    /// Fakes that fail the row-sum filter but pass the combined one.
    pub combined_fakes_passed: u64,
    /// Fakes left standing after filtering, and the records holding them.
    pub fakes_surviving: u64,
    pub fake_survivor_records: Vec<u64>,
    /// The same tallies restricted to fakes with fewer vertices than the
    /// hull.
    pub smaller_fakes_seen: u64,
    pub smaller_fakes_row_sum_passed: u64,
    pub smaller_fakes_surviving: u64,
    pub row_sum_true_hulls_rejected: u64,
    pub row_sum_true_hull_rejections: Vec<u64>,
    /// Of the true hulls rejected by the row-sum filter, how many the
    /// combined filter accepts.
    pub combined_true_hulls_passed: u64,
    pub combined_true_hulls_rejected: u64,
    /// Configurations whose filtered search ends with exactly the true hull.
    pub resolved: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub index: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub n: usize,
    pub total: u64,
    pub hull_sizes: BTreeMap<usize, u64>,
    /// Configurations for which the unfiltered search returns at least one
    /// subset that is not the hull.
    pub fakes: u64,
    pub fake_records: Vec<u64>,
    /// Fake vertex counts by size.
    pub fake_sizes: BTreeMap<usize, u64>,
    /// Configurations for which the search stops below the hull size, so
    /// every candidate is a fake whatever the labelling.
    pub early_stops: u64,
    pub early_stop_records: Vec<u64>,
    pub filter_stats: Option<FilterStats>,
    pub failures: Vec<Failure>,
    /// Places where the row-sum heuristics did not behave as expected.
    pub discrepancies: Vec<String>,
}

impl CensusReport {
    fn absorb(&mut self, outcome: &RecordOutcome, filters: bool) {
        self.total += 1;
        *self.hull_sizes.entry(outcome.hull_size).or_default() += 1;
        if !outcome.fakes.is_empty() {
            self.fakes += 1;
            self.fake_records.push(outcome.index);
            for f in &outcome.fakes {
                *self.fake_sizes.entry(f.indices.len()).or_default() += 1;
            }
        }
        if outcome.search_k < outcome.hull_size {
            self.early_stops += 1;
            self.early_stop_records.push(outcome.index);
        }
        for a in &outcome.anomalies {
            self.failures.push(Failure {
                index: outcome.index,
                message: a.clone(),
            });
        }
        if !filters {
            return;
        }
        let stats = self.filter_stats.get_or_insert_with(FilterStats::default);
        let mut fake_survived = false;
        for f in &outcome.filtered_fakes {
            let smaller = f.indices.len() < outcome.hull_size;
            stats.fakes_seen += 1;
            stats.smaller_fakes_seen += u64::from(smaller);
            if let Some(v) = f.filters {
                if v.row_sum {
                    stats.row_sum_fakes_passed += 1;
                    stats.smaller_fakes_row_sum_passed += u64::from(smaller);
                } else {
                    stats.row_sum_fakes_rejected += 1;
                    stats.combined_fakes_passed += u64::from(v.combined == Some(true));
                }
            }
            if f.survives == Some(true) {
                stats.fakes_surviving += 1;
                stats.smaller_fakes_surviving += u64::from(smaller);
                fake_survived = true;
            }
        }
        if fake_survived {
            stats.fake_survivor_records.push(outcome.index);
        }
        if let Some(h) = outcome.hull_filters {
            if !h.row_sum {
                stats.row_sum_true_hulls_rejected += 1;
                stats.row_sum_true_hull_rejections.push(outcome.index);
                if h.combined == Some(true) {
                    stats.combined_true_hulls_passed += 1;
                } else {
                    stats.combined_true_hulls_rejected += 1;
                }
            }
        }
        if outcome.hull_survives == Some(true) && !fake_survived {
            stats.resolved += 1;
        }
    }

    fn finish(&mut self) {
        let Some(stats) = &self.filter_stats else {
            return;
        };
        if stats.row_sum_fakes_passed > 0 {
            self.discrepancies.push(format!(
                "row-sum filter passes {} fake(s)",
                stats.row_sum_fakes_passed
            ));
        }
        if stats.combined_true_hulls_rejected > 0 {
            self.discrepancies.push(format!(
                "combined filter rejects {} true hull(s) that the row-sum filter also rejects",
                stats.combined_true_hulls_rejected
            ));
        }
        if stats.fakes_surviving > 0 {
            self.discrepancies.push(format!(
                "{} fake(s) in {} configuration(s) survive both filters",
                stats.fakes_surviving,
                stats.fake_survivor_records.len()
            ));
        }
    }

    pub fn to_text(&self) -> String {
        let list = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
        let mut out = format!("n {}\ntotal {}\n", self.n, self.total);
        for (k, count) in &self.hull_sizes {
            out.push_str(&format!("hull size {k}: {count}\n"));
        }
        out.push_str(&format!("configurations with fake hulls: {}\n", self.fakes));
        if !self.fake_records.is_empty() {
            out.push_str(&format!("fake records: {}\n", list(&self.fake_records)));
        }
        for (k, count) in &self.fake_sizes {
            out.push_str(&format!("fakes of size {k}: {count}\n"));
        }
        out.push_str(&format!(
            "search stops below the hull size: {}\n",
            self.early_stops
        ));
        if !self.early_stop_records.is_empty() {
            out.push_str(&format!(
                "early-stop records: {}\n",
                list(&self.early_stop_records)
            ));
        }
        if let Some(s) = &self.filter_stats {
            out.push_str(&format!("fakes met by filtered search: {}\n", s.fakes_seen));
            out.push_str(&format!(
                "row-sum filter: fakes rejected {}, fakes passed {}, true hulls rejected {}\n",
                s.row_sum_fakes_rejected, s.row_sum_fakes_passed, s.row_sum_true_hulls_rejected
            ));
            if !s.row_sum_true_hull_rejections.is_empty() {
                out.push_str(&format!(
                    "true hulls rejected by row-sum: {}\n",
                    list(&s.row_sum_true_hull_rejections)
                ));
            }
            out.push_str(&format!(
                "combined filter: true hulls passed {}, true hulls rejected {}, fakes passed {}\n",
                s.combined_true_hulls_passed,
                s.combined_true_hulls_rejected,
                s.combined_fakes_passed
            ));
            out.push_str(&format!(
                "fakes surviving both filters: {}\n",
                s.fakes_surviving
            ));
            out.push_str(&format!(
                "fakes smaller than the hull: seen {}, passed by row-sum {}, surviving {}\n",
                s.smaller_fakes_seen, s.smaller_fakes_row_sum_passed, s.smaller_fakes_surviving
            ));
            if !s.fake_survivor_records.is_empty() {
                out.push_str(&format!(
                    "records with surviving fakes: {}\n",
                    list(&s.fake_survivor_records)
                ));
            }
            out.push_str(&format!("resolved to the true hull: {}\n", s.resolved));
        }
        out.push_str(&format!("failures: {}\n", self.failures.len()));
        for f in &self.failures {
            out.push_str(&format!("  record {}: {}\n", f.index, f.message));
        }
        for d in &self.discrepancies {
            out.push_str(&format!("DISCREPANCY: {d}\n"));
        }
        out
    }
}

/// Runs the census over a stream of records.
///
/// A record that fails to decode is reported in `failures`; an I/O error
/// aborts the run.
pub fn run_census<I>(records: I, options: CensusOptions) -> Result<CensusReport, CensusError>
where
    I: IntoIterator<Item = Result<OrderTypeRecord, OtdbError>>,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs)
        .build()?;
    let mut report = CensusReport::default();
    let mut n_seen: Option<usize> = None;
    let mut batch: Vec<OrderTypeRecord> = Vec::with_capacity(BATCH);
    let mut records = records.into_iter().peekable();
    while records.peek().is_some() {
        batch.clear();
        let mut decode_failures = Vec::new();
        while batch.len() < BATCH {
            match records.next() {
                None => break,
                Some(Ok(r)) => {
                    let n = r.config.len();
                    match n_seen {
                        None => n_seen = Some(n),
                        Some(m) if m != n => return Err(CensusError::MixedSizes(m, n)),
                        _ => {}
                    }
                    batch.push(r);
                }
                Some(Err(OtdbError::GeneralPosition { index, source })) => {
                    decode_failures.push(Failure {
                        index,
                        message: source.to_string(),
                    });
                }
                Some(Err(e)) => return Err(e.into()),
            }
        }
        let outcomes: Vec<RecordOutcome> = pool.install(|| {
            batch
                .par_iter()
                .map(|r| analyze(r.index, &r.config, options.filters))
                .collect()
        });
        // failures keyed by record index, so merge both lists in order
        let mut pending = decode_failures.into_iter().peekable();
        for o in &outcomes {
            while let Some(f) = pending.next_if(|f| f.index < o.index) {
                report.total += 1;
                report.failures.push(f);
            }
            report.absorb(o, options.filters);
        }
        for f in pending {
            report.total += 1;
            report.failures.push(f);
        }
    }
    report.n = n_seen.unwrap_or(0);
    report.finish();
    Ok(report)
}

/// `count` random configurations of `n` points; record `i` uses seed
/// `seed + i`.
pub fn random_records(
    n: usize,
    count: u64,
    seed: u64,
    bound: i64,
) -> impl Iterator<Item = Result<OrderTypeRecord, OtdbError>> {
    (0..count).map(move |index| {
        random_configuration(n, seed.wrapping_add(index), bound)
            .map(|config| OrderTypeRecord { index, config })
            .map_err(|source| OtdbError::GeneralPosition { index, source })
    })
}
