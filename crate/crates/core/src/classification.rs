//! Defects, expected central dimensions, smoothness and the enumeration of
//! reduced singular settings.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local::is_simple_dimvector;
use crate::quiver::{canonical_key, CanonicalKey, MarkedQuiverSetting};
use crate::reduction::{is_reduced, reduce, ReductionResult};
use crate::toric::{invariant_generators, semigroups_isomorphic};

/// The reduced settings whose representation spaces give smooth quotients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothListEntry {
    PlainVertex(u32),
    OneLoop(u32),
    OneMarkedLoop(u32),
    TwoLoops2,
    LoopPlusMarked2,
    TwoMarkedLoops2,
}

impl fmt::Display for SmoothListEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothListEntry::PlainVertex(a) => write!(f, "vertex of dimension {a}"),
            SmoothListEntry::OneLoop(a) => write!(f, "dimension {a} with one loop"),
            SmoothListEntry::OneMarkedLoop(a) => write!(f, "dimension {a} with one marked loop"),
            SmoothListEntry::TwoLoops2 => f.write_str("dimension 2 with two loops"),
            SmoothListEntry::LoopPlusMarked2 => f.write_str("dimension 2 with a loop and a marked loop"),
            SmoothListEntry::TwoMarkedLoops2 => f.write_str("dimension 2 with two marked loops"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityReport {
    pub setting: MarkedQuiverSetting,
    pub reduced: MarkedQuiverSetting,
    pub z: u64,
    pub expected_dim: i64,
    pub smooth: bool,
    pub azumaya: bool,
    pub matched_entry: Option<SmoothListEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// `1 − χ(α, α) − #marked loops − dim_x`.
pub fn defect(s: &MarkedQuiverSetting, dim_x: i64) -> i64 {
    expected_dim(s) - dim_x
}

/// `1 − χ(α, α) − Σ m_v`.
pub fn expected_dim(s: &MarkedQuiverSetting) -> i64 {
    1 - s.euler_self() - i64::from(s.total_marks())
}

/// The list entry a reduced setting matches, if any.
pub fn match_smooth_list(reduced: &MarkedQuiverSetting) -> Option<SmoothListEntry> {
    if reduced.vertex_count() != 1 {
        return None;
    }
    let a = reduced.dim(0);
    match (reduced.loops(0), reduced.marks(0)) {
        (0, 0) => Some(SmoothListEntry::PlainVertex(a)),
        (1, 0) => Some(SmoothListEntry::OneLoop(a)),
        (0, 1) if a >= 2 => Some(SmoothListEntry::OneMarkedLoop(a)),
        (2, 0) if a == 2 => Some(SmoothListEntry::TwoLoops2),
        (1, 1) if a == 2 => Some(SmoothListEntry::LoopPlusMarked2),
        (0, 2) if a == 2 => Some(SmoothListEntry::TwoMarkedLoops2),
        _ => None,
    }
}

pub fn is_smooth_setting(s: &MarkedQuiverSetting) -> SingularityReport {
    let ReductionResult { reduced, z, .. } = reduce(s);
    let matched_entry = match_smooth_list(&reduced);
    let mut warnings = Vec::new();
    if !matches!(is_simple_dimvector(s, &s.dim_vector()), Ok(true)) {
        warnings.push("dimension vector admits no simple representation".to_string());
    }
    SingularityReport {
        setting: s.clone(),
        azumaya: matched_entry == Some(SmoothListEntry::PlainVertex(1)),
        smooth: matched_entry.is_some(),
        matched_entry,
        expected_dim: expected_dim(s),
        reduced,
        z,
        warnings,
    }
}

/// `1 + Σ_v c(v)` for a reduced setting on at least two vertices, where
/// `c(v)` is `a` without loops, `2a` (or `2a − 1` if marked) with one loop,
/// and `(L − 1)a² + a − m` with `L ≥ 2` loops of which `m` are marked.
pub fn counting_lower_bound(s: &MarkedQuiverSetting) -> Result<i64> {
    if s.vertex_count() < 2 {
        return Err(Error::Domain("the counting bound needs at least two vertices".into()));
    }
    if !is_reduced(s) {
        return Err(Error::Domain("the counting bound needs a reduced setting".into()));
    }
    let mut total = 1;
    for v in 0..s.vertex_count() {
        let a = i64::from(s.dim(v));
        let m = i64::from(s.marks(v));
        let loops = i64::from(s.total_loops(v));
        total += match loops {
            0 => a,
            1 if a > 1 => 2 * a - m,
            1 => {
                return Err(Error::Domain(format!(
                    "vertex {v} has dimension 1 and a loop"
                )))
            }
            l => (l - 1) * a * a + a - m,
        };
    }
    Ok(total)
}

/// Limits for [`enumerate_reduced_singular`].
#[derive(Clone, Default)]
pub struct EnumerationConfig {
    /// Wall-clock budget; `None` runs to completion.
    pub budget: Option<Duration>,
    /// Called with `(completed, total)` after each finished partition.
    pub progress: Option<Arc<dyn Fn(usize, usize) + Send + Sync>>,
}

impl fmt::Debug for EnumerationConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EnumerationConfig")
            .field("budget", &self.budget)
            .field("progress", &self.progress.is_some())
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationOutcome {
    pub dimension: i64,
    pub settings: Vec<MarkedQuiverSetting>,
    pub complete: bool,
    pub partitions_completed: usize,
    pub partitions_total: usize,
}

/// Reduced settings of expected dimension `d` that admit simples and are not
/// on the smooth list, one per isomorphism class.
pub fn enumerate_reduced_singular(d: i64, config: &EnumerationConfig) -> Result<Vec<MarkedQuiverSetting>> {
    let out = enumerate_with_progress(d, config)?;
    if !out.complete {
        return Err(Error::BudgetExhausted {
            budget_secs: config.budget.map_or(0, |b| b.as_secs()),
            completed: out.partitions_completed,
            total: out.partitions_total,
            found: out.settings.len(),
        });
    }
    Ok(out.settings)
}

/// Like [`enumerate_reduced_singular`] but returns whatever was found when
/// the budget runs out, flagged as incomplete.
pub fn enumerate_with_progress(d: i64, config: &EnumerationConfig) -> Result<EnumerationOutcome> {
    if d < 1 {
        return Err(Error::Domain(format!("dimension must be positive, got {d}")));
    }
    let bound = u32::try_from(d).map_err(|_| Error::Capacity {
        what: "dimension",
        got: usize::MAX,
        bound: u32::MAX as usize,
    })?;
    let jobs = jobs(d, bound);
    let total = jobs.len();
    let deadline = config.budget.map(|b| Instant::now() + b);
    let abort = AtomicBool::new(false);
    let done = AtomicUsize::new(0);

    let per_job: Vec<Option<Vec<MarkedQuiverSetting>>> = jobs
        .par_iter()
        .map(|job| {
            if abort.load(Ordering::Relaxed) {
                return None;
            }
            if deadline.is_some_and(|t| Instant::now() >= t) {
                abort.store(true, Ordering::Relaxed);
                return None;
            }
            let found = match job {
                Job::Single(s) => Some(vec![s.clone()]),
                Job::Multi(m) => search(m, bound, deadline, &abort),
            };
            if found.is_some() {
                let n = done.fetch_add(1, Ordering::Relaxed) + 1;
                if let Some(cb) = &config.progress {
                    cb(n, total);
                }
            }
            found
        })
        .collect();

    let completed = per_job.iter().filter(|r| r.is_some()).count();
    let mut classes: BTreeMap<CanonicalKey, MarkedQuiverSetting> = BTreeMap::new();
    for s in per_job.into_iter().flatten().flatten() {
        let key = canonical_key(&s)?;
        classes
            .entry(key)
            .and_modify(|cur| {
                if setting_order(&s) < setting_order(cur) {
                    *cur = s.clone();
                }
            })
            .or_insert(s);
    }
    let mut settings: Vec<(CanonicalKey, MarkedQuiverSetting)> = classes.into_iter().collect();
    settings.sort_by(|(ka, a), (kb, b)| {
        (a.vertex_count(), a.dims().to_vec(), ka).cmp(&(b.vertex_count(), b.dims().to_vec(), kb))
    });
    Ok(EnumerationOutcome {
        dimension: d,
        settings: settings.into_iter().map(|(_, s)| s).collect(),
        complete: completed == total,
        partitions_completed: completed,
        partitions_total: total,
    })
}

fn setting_order(s: &MarkedQuiverSetting) -> (Vec<u32>, Vec<Vec<u32>>, Vec<u32>) {
    (s.dims().to_vec(), s.arrow_matrix().to_vec(), s.marked_loops().to_vec())
}

enum Job {
    /// A complete one-vertex candidate.
    Single(MarkedQuiverSetting),
    Multi(MultiJob),
}

/// Fixed dims, loops and marks; the off-diagonal arrows remain to be chosen
/// with `Σ_{i≠j} A_ij a_i a_j = target`.
struct MultiJob {
    dims: Vec<u32>,
    loops: Vec<u32>,
    marks: Vec<u32>,
    target: i64,
}

fn jobs(d: i64, bound: u32) -> Vec<Job> {
    let mut out = Vec::new();
    // one vertex: 1 + a²(L − 1) − m with L = l + m loops
    for a in 1..=bound {
        let a2 = i64::from(a) * i64::from(a);
        for total in 0..=bound {
            for m in 0..=total {
                if m > 0 && a < 2 {
                    continue;
                }
                let l = total - m;
                if 1 + a2 * (i64::from(total) - 1) - i64::from(m) != d {
                    continue;
                }
                let s = MarkedQuiverSetting::single_vertex(a, l, m);
                if is_reduced(&s)
                    && match_smooth_list(&s).is_none()
                    && matches!(is_simple_dimvector(&s, &s.dim_vector()), Ok(true))
                {
                    out.push(Job::Single(s));
                }
            }
        }
    }
    for dims in partitions(bound) {
        if dims.len() < 2 {
            continue;
        }
        let k = dims.len();
        let sum_sq: i64 = dims.iter().map(|&a| i64::from(a) * i64::from(a)).sum();
        let mut loops = vec![0u32; k];
        let mut marks = vec![0u32; k];
        assign_loops(&dims, 0, 1 - sum_sq, d, bound, &mut loops, &mut marks, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn assign_loops(
    dims: &[u32],
    v: usize,
    base: i64,
    d: i64,
    bound: u32,
    loops: &mut Vec<u32>,
    marks: &mut Vec<u32>,
    out: &mut Vec<Job>,
) {
    if base > d {
        return;
    }
    if v == dims.len() {
        out.push(Job::Multi(MultiJob {
            dims: dims.to_vec(),
            loops: loops.clone(),
            marks: marks.clone(),
            target: d - base,
        }));
        return;
    }
    let a = dims[v];
    if a == 1 {
        // reduced dimension-1 vertices carry no loops
        assign_loops(dims, v + 1, base, d, bound, loops, marks, out);
        return;
    }
    let a2 = i64::from(a) * i64::from(a);
    for l in 0..=bound {
        for m in 0..=bound {
            let extra = (i64::from(l) + i64::from(m)) * a2 - i64::from(m);
            if base + extra > d {
                break;
            }
            loops[v] = l;
            marks[v] = m;
            assign_loops(dims, v + 1, base + extra, d, bound, loops, marks, out);
        }
    }
    loops[v] = 0;
    marks[v] = 0;
}

/// Non-increasing sequences of positive integers with sum at most `n`.
fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for a in (1..=max.min(rem)).rev() {
            cur.push(a);
            go(rem - a, a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

struct Search<'a> {
    job: &'a MultiJob,
    bound: u32,
    entries: Vec<(usize, usize)>,
    last_in: Vec<usize>,
    last_out: Vec<usize>,
    need: Vec<i64>,
    arrows: Vec<Vec<u32>>,
    in_w: Vec<i64>,
    out_w: Vec<i64>,
    deadline: Option<Instant>,
    abort: &'a AtomicBool,
    nodes: u64,
    found: Vec<MarkedQuiverSetting>,
}

fn search(
    job: &MultiJob,
    bound: u32,
    deadline: Option<Instant>,
    abort: &AtomicBool,
) -> Option<Vec<MarkedQuiverSetting>> {
    let k = job.dims.len();
    let entries: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut last_in = vec![0; k];
    let mut last_out = vec![0; k];
    for (idx, &(i, j)) in entries.iter().enumerate() {
        last_out[i] = idx;
        last_in[j] = idx;
    }
    // a reduced loop-free vertex has χ(α, ε_v) < 0 and χ(ε_v, α) < 0, i.e.
    // weighted in- and out-degree above a_v; every vertex needs some arrow
    // in and out for strong connectivity
    let need = (0..k)
        .map(|v| {
            if job.loops[v] + job.marks[v] == 0 {
                i64::from(job.dims[v]) + 1
            } else {
                1
            }
        })
        .collect();
    let mut st = Search {
        job,
        bound,
        entries,
        last_in,
        last_out,
        need,
        arrows: (0..k)
            .map(|v| {
                let mut row = vec![0; k];
                row[v] = job.loops[v];
                row
            })
            .collect(),
        in_w: vec![0; k],
        out_w: vec![0; k],
        deadline,
        abort,
        nodes: 0,
        found: Vec::new(),
    };
    if st.dfs(0, job.target) {
        Some(st.found)
    } else {
        None
    }
}

impl Search<'_> {
    /// Returns `false` when the search was aborted.
    fn dfs(&mut self, idx: usize, rem: i64) -> bool {
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) {
            if self.abort.load(Ordering::Relaxed) {
                return false;
            }
            if self.deadline.is_some_and(|t| Instant::now() >= t) {
                self.abort.store(true, Ordering::Relaxed);
                return false;
            }
        }
        if !self.feasible(idx, rem) {
            return true;
        }
        if idx == self.entries.len() {
            if rem == 0 {
                self.accept();
            }
            return true;
        }
        let (i, j) = self.entries[idx];
        let ai = i64::from(self.job.dims[i]);
        let aj = i64::from(self.job.dims[j]);
        let w = ai * aj;
        let mut c = 0u32;
        while i64::from(c) * w <= rem && c <= self.bound {
            self.arrows[i][j] = c;
            self.out_w[i] += aj * i64::from(c);
            self.in_w[j] += ai * i64::from(c);
            let ok = self.dfs(idx + 1, rem - i64::from(c) * w);
            self.out_w[i] -= aj * i64::from(c);
            self.in_w[j] -= ai * i64::from(c);
            if !ok {
                self.arrows[i][j] = 0;
                return false;
            }
            c += 1;
        }
        self.arrows[i][j] = 0;
        true
    }

    fn feasible(&self, idx: usize, rem: i64) -> bool {
        let mut cost_in = 0;
        let mut cost_out = 0;
        for v in 0..self.job.dims.len() {
            let a = i64::from(self.job.dims[v]);
            let def_in = (self.need[v] - self.in_w[v]).max(0);
            let def_out = (self.need[v] - self.out_w[v]).max(0);
            if (def_in > 0 && idx > self.last_in[v]) || (def_out > 0 && idx > self.last_out[v]) {
                return false;
            }
            // each unit of weighted degree at v costs at least a_v
            cost_in += def_in * a;
            cost_out += def_out * a;
        }
        cost_in <= rem && cost_out <= rem
    }

    fn accept(&mut self) {
        let s = MarkedQuiverSetting::new(
            self.job.dims.clone(),
            self.arrows.clone(),
            self.job.marks.clone(),
        )
        .expect("shapes agree");
        if s.is_strongly_connected()
            && is_reduced(&s)
            && match_smooth_list(&s).is_none()
            && matches!(is_simple_dimvector(&s, &s.dim_vector()), Ok(true))
        {
            self.found.push(s);
        }
    }
}

/// Settings grouped by singularity type. All-ones settings are grouped by
/// isomorphism of their invariant semigroups, which decides isomorphism of
/// the toric invariant rings; every other setting forms its own group.
/// Each group lists indices into `settings` in increasing order.
pub fn singularity_types(settings: &[MarkedQuiverSetting]) -> Vec<Vec<usize>> {
    // (invariant semigroup generators if toric, members)
    type Group = (Option<Vec<Vec<u32>>>, Vec<usize>);
    let mut groups: Vec<Group> = Vec::new();
    for (i, s) in settings.iter().enumerate() {
        let Ok(gens) = invariant_generators(s) else {
            groups.push((None, vec![i]));
            continue;
        };
        match groups
            .iter_mut()
            .find(|(g, _)| g.as_ref().is_some_and(|g| semigroups_isomorphic(g, &gens)))
        {
            Some((_, members)) => members.push(i),
            None => groups.push((Some(gens), vec![i])),
        }
    }
    groups.into_iter().map(|(_, m)| m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn quantum_plane_defects() {
        for (name, s, dim_x, want) in fixtures::quantum_plane_defects() {
            assert_eq!(defect(&s, dim_x), want, "{name}");
        }
    }

    #[test]
    fn expected_dimensions() {
        assert_eq!(expected_dim(&fixtures::conifold()), 3);
        assert_eq!(expected_dim(&fixtures::dim4_two_vertex()), 4);
        assert_eq!(expected_dim(&MarkedQuiverSetting::single_vertex(1, 0, 0)), 0);
    }

    #[test]
    fn smoothness_verdicts() {
        let origin = is_smooth_setting(&fixtures::quantum_plane_origin());
        assert!(origin.smooth);
        assert!(!origin.azumaya);
        assert_eq!(origin.matched_entry, Some(SmoothListEntry::TwoMarkedLoops2));

        let c = is_smooth_setting(&fixtures::conifold());
        assert!(!c.smooth);
        assert_eq!(c.matched_entry, None);

        let five = is_smooth_setting(&MarkedQuiverSetting::single_vertex(1, 5, 0));
        assert!(five.smooth && five.azumaya);
        assert_eq!(five.z, 5);
    }

    #[test]
    fn smooth_list_membership() {
        let cases = [
            (MarkedQuiverSetting::single_vertex(3, 0, 0), Some(SmoothListEntry::PlainVertex(3))),
            (MarkedQuiverSetting::single_vertex(4, 1, 0), Some(SmoothListEntry::OneLoop(4))),
            (MarkedQuiverSetting::single_vertex(3, 0, 1), Some(SmoothListEntry::OneMarkedLoop(3))),
            (MarkedQuiverSetting::single_vertex(2, 2, 0), Some(SmoothListEntry::TwoLoops2)),
            (MarkedQuiverSetting::single_vertex(2, 1, 1), Some(SmoothListEntry::LoopPlusMarked2)),
            (MarkedQuiverSetting::single_vertex(2, 0, 2), Some(SmoothListEntry::TwoMarkedLoops2)),
            (MarkedQuiverSetting::single_vertex(3, 2, 0), None),
            (MarkedQuiverSetting::single_vertex(2, 0, 3), None),
        ];
        for (s, want) in cases {
            assert_eq!(match_smooth_list(&s), want, "{s}");
        }
    }

    #[test]
    fn counting_bound_examples() {
        assert_eq!(counting_lower_bound(&fixtures::conifold()).unwrap(), 3);
        // dims (2,1), marked loop at 0; arrows chosen so the setting is reduced
        let s = MarkedQuiverSetting::new(vec![2, 1], vec![vec![0, 2], vec![2, 0]], vec![1, 0]).unwrap();
        assert!(is_reduced(&s));
        assert_eq!(counting_lower_bound(&s).unwrap(), 5);
        assert!(counting_lower_bound(&MarkedQuiverSetting::single_vertex(2, 2, 0)).is_err());
        let chain = MarkedQuiverSetting::unmarked(vec![1, 1], vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(counting_lower_bound(&chain).is_err());
    }

    #[test]
    fn partitions_are_bounded() {
        let p = partitions(3);
        assert_eq!(p.len(), 6);
        assert!(p.contains(&vec![1, 1, 1]));
        assert!(p.contains(&vec![2, 1]));
    }

    #[test]
    fn dimension_three() {
        let out = enumerate_reduced_singular(3, &EnumerationConfig::default()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(canonical_key(&out[0]).unwrap(), canonical_key(&fixtures::conifold()).unwrap());
    }

    #[test]
    fn small_dimensions_have_no_singular_types() {
        for d in 1..=2 {
            assert!(enumerate_reduced_singular(d, &EnumerationConfig::default())
                .unwrap()
                .is_empty());
        }
    }

    #[test]
    fn zero_budget_reports_partial_progress() {
        let cfg = EnumerationConfig {
            budget: Some(Duration::ZERO),
            progress: None,
        };
        match enumerate_reduced_singular(6, &cfg) {
            Err(Error::BudgetExhausted { completed, total, .. }) => assert!(completed < total),
            other => panic!("expected an exhausted budget, got {other:?}"),
        }
    }
}
