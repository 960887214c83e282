//! Marked quiver settings, dimension vectors, representations and the Euler form.
//!
//! A setting stores arrow *multiplicities*: `arrows[i][j]` is the number of
//! arrows from vertex `i` to vertex `j`, the diagonal counts ordinary loops,
//! and `marked_loops[v]` counts loops whose representations are trace-zero
//! matrices. Individual arrows only get an identity once a [`Representation`]
//! is attached, via the ordering of [`MarkedQuiverSetting::arrow_list`].

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;

/// Largest vertex count accepted by [`canonical_key`] unless a bound is given.
pub const DEFAULT_CANONICAL_BOUND: usize = 10;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SettingRepr", into = "SettingRepr")]
pub struct MarkedQuiverSetting {
    dims: Vec<u32>,
    arrows: Vec<Vec<u32>>,
    marked_loops: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct SettingRepr {
    dims: Vec<u32>,
    arrows: Vec<Vec<u32>>,
    #[serde(default)]
    marked_loops: Option<Vec<u32>>,
}

impl TryFrom<SettingRepr> for MarkedQuiverSetting {
    type Error = Error;
    fn try_from(r: SettingRepr) -> Result<Self> {
        let k = r.dims.len();
        let marks = r.marked_loops.unwrap_or_else(|| vec![0; k]);
        MarkedQuiverSetting::new(r.dims, r.arrows, marks)
    }
}

impl From<MarkedQuiverSetting> for SettingRepr {
    fn from(s: MarkedQuiverSetting) -> Self {
        SettingRepr {
            dims: s.dims,
            arrows: s.arrows,
            marked_loops: Some(s.marked_loops),
        }
    }
}

impl MarkedQuiverSetting {
    /// Builds a setting after checking that all arrays agree in size.
    ///
    /// Value-level invariants (positive dims, marks only at dims >= 2) are
    /// left to [`MarkedQuiverSetting::validate`] so that faulty input can be
    /// diagnosed rather than rejected outright.
    pub fn new(dims: Vec<u32>, arrows: Vec<Vec<u32>>, marked_loops: Vec<u32>) -> Result<Self> {
        let k = dims.len();
        if k == 0 {
            return Err(Error::MalformedSetting("a setting needs at least one vertex".into()));
        }
        if arrows.len() != k || arrows.iter().any(|row| row.len() != k) {
            return Err(Error::MalformedSetting(format!(
                "arrow matrix must be {k}x{k}"
            )));
        }
        if marked_loops.len() != k {
            return Err(Error::Dimension {
                expected: k,
                got: marked_loops.len(),
            });
        }
        Ok(MarkedQuiverSetting {
            dims,
            arrows,
            marked_loops,
        })
    }

    /// Setting without marked loops.
    pub fn unmarked(dims: Vec<u32>, arrows: Vec<Vec<u32>>) -> Result<Self> {
        let k = dims.len();
        Self::new(dims, arrows, vec![0; k])
    }

    /// A single vertex of dimension `dim` with `loops` ordinary and `marked` marked loops.
    pub fn single_vertex(dim: u32, loops: u32, marked: u32) -> Self {
        MarkedQuiverSetting {
            dims: vec![dim],
            arrows: vec![vec![loops]],
            marked_loops: vec![marked],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn dim(&self, v: usize) -> u32 {
        self.dims[v]
    }

    pub fn arrow_matrix(&self) -> &[Vec<u32>] {
        &self.arrows
    }

    pub fn arrows(&self, from: usize, to: usize) -> u32 {
        self.arrows[from][to]
    }

    pub fn marked_loops(&self) -> &[u32] {
        &self.marked_loops
    }

    pub fn marks(&self, v: usize) -> u32 {
        self.marked_loops[v]
    }

    /// Ordinary loops at `v`.
    pub fn loops(&self, v: usize) -> u32 {
        self.arrows[v][v]
    }

    /// Ordinary plus marked loops at `v`.
    pub fn total_loops(&self, v: usize) -> u32 {
        self.arrows[v][v] + self.marked_loops[v]
    }

    pub fn total_marks(&self) -> u32 {
        self.marked_loops.iter().sum()
    }

    /// Number of arrows including ordinary and marked loops.
    pub fn arrow_count(&self) -> u32 {
        self.arrows.iter().flatten().sum::<u32>() + self.total_marks()
    }

    pub fn all_ones(&self) -> bool {
        self.dims.iter().all(|&d| d == 1)
    }

    pub fn dim_vector(&self) -> DimVector {
        DimVector(self.dims.clone())
    }

    pub(crate) fn arrows_mut(&mut self) -> &mut Vec<Vec<u32>> {
        &mut self.arrows
    }

    pub(crate) fn marks_mut(&mut self) -> &mut Vec<u32> {
        &mut self.marked_loops
    }

    /// Copy of the setting with vertex `v` deleted.
    pub(crate) fn without_vertex(&self, v: usize) -> Self {
        let keep: Vec<usize> = (0..self.vertex_count()).filter(|&i| i != v).collect();
        MarkedQuiverSetting {
            dims: keep.iter().map(|&i| self.dims[i]).collect(),
            arrows: keep
                .iter()
                .map(|&i| keep.iter().map(|&j| self.arrows[i][j]).collect())
                .collect(),
            marked_loops: keep.iter().map(|&i| self.marked_loops[i]).collect(),
        }
    }

    /// Relabels vertices: old vertex `v` becomes new vertex `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let k = self.vertex_count();
        if perm.len() != k {
            return Err(Error::Dimension {
                expected: k,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; k];
        for &p in perm {
            if p >= k || seen[p] {
                return Err(Error::Domain("not a permutation".into()));
            }
            seen[p] = true;
        }
        let mut dims = vec![0; k];
        let mut marks = vec![0; k];
        let mut arrows = vec![vec![0; k]; k];
        for i in 0..k {
            dims[perm[i]] = self.dims[i];
            marks[perm[i]] = self.marked_loops[i];
            for j in 0..k {
                arrows[perm[i]][perm[j]] = self.arrows[i][j];
            }
        }
        Ok(MarkedQuiverSetting {
            dims,
            arrows,
            marked_loops: marks,
        })
    }

    /// Entry `(i, j)` of the Euler form matrix, markings forgotten.
    pub fn euler_entry(&self, i: usize, j: usize) -> i64 {
        let delta = i64::from(i == j);
        let marks = if i == j { self.marked_loops[i] } else { 0 };
        delta - i64::from(self.arrows[i][j]) - i64::from(marks)
    }

    /// `χ(β, γ) = βᵀ M γ`.
    pub fn euler_form(&self, beta: &DimVector, gamma: &DimVector) -> Result<i64> {
        let k = self.vertex_count();
        for v in [beta, gamma] {
            if v.len() != k {
                return Err(Error::Dimension {
                    expected: k,
                    got: v.len(),
                });
            }
        }
        let mut total = 0i64;
        for i in 0..k {
            if beta[i] == 0 {
                continue;
            }
            for j in 0..k {
                total += i64::from(beta[i]) * self.euler_entry(i, j) * i64::from(gamma[j]);
            }
        }
        Ok(total)
    }

    /// `χ(α, α)` for the setting's own dimension vector.
    pub fn euler_self(&self) -> i64 {
        let a = self.dim_vector();
        self.euler_form(&a, &a).expect("own dimension vector has matching length")
    }

    pub fn validate(&self) -> Validation {
        let mut violations = Vec::new();
        for (v, &d) in self.dims.iter().enumerate() {
            if d == 0 {
                violations.push(Violation::ZeroDimension { vertex: v });
            }
            if self.marked_loops[v] > 0 && d < 2 {
                violations.push(Violation::MarkedLoopAtSmallVertex { vertex: v, dim: d });
            }
        }
        Validation {
            violations,
            strongly_connected: self.is_strongly_connected(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().violations.is_empty()
    }

    /// Strong connectivity of the underlying digraph on all vertices.
    pub fn is_strongly_connected(&self) -> bool {
        let all = vec![true; self.vertex_count()];
        self.is_strongly_connected_on(&all)
    }

    /// Strong connectivity of the subgraph induced on `mask`; false if `mask` is empty.
    pub fn is_strongly_connected_on(&self, mask: &[bool]) -> bool {
        let k = self.vertex_count();
        let Some(start) = (0..k).find(|&v| mask[v]) else {
            return false;
        };
        let reach = |forward: bool| {
            let mut seen = vec![false; k];
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(u) = stack.pop() {
                for w in 0..k {
                    let n = if forward { self.arrows[u][w] } else { self.arrows[w][u] };
                    if mask[w] && n > 0 && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            (0..k).all(|v| !mask[v] || seen[v])
        };
        reach(true) && reach(false)
    }

    /// Deletes marked loops sitting at dimension-1 vertices, returning one
    /// warning line per deleted group.
    pub fn strip_degenerate_marks(&self) -> (Self, Vec<String>) {
        let mut out = self.clone();
        let mut warnings = Vec::new();
        for v in 0..self.vertex_count() {
            if self.dims[v] < 2 && self.marked_loops[v] > 0 {
                warnings.push(format!(
                    "removed {} marked loop(s) at vertex {v} of dimension {}",
                    self.marked_loops[v], self.dims[v]
                ));
                out.marked_loops[v] = 0;
            }
        }
        (out, warnings)
    }

    /// Arrows in the canonical order used by representations and exponent
    /// vectors: ordinary arrows by `(tail, head, slot)`, then marked loops by
    /// `(vertex, slot)`.
    pub fn arrow_list(&self) -> Vec<Arrow> {
        let k = self.vertex_count();
        let mut out = Vec::new();
        for i in 0..k {
            for j in 0..k {
                for slot in 0..self.arrows[i][j] {
                    out.push(Arrow {
                        tail: i,
                        head: j,
                        slot,
                        marked: false,
                    });
                }
            }
        }
        for v in 0..k {
            for slot in 0..self.marked_loops[v] {
                out.push(Arrow {
                    tail: v,
                    head: v,
                    slot,
                    marked: true,
                });
            }
        }
        out
    }
}

impl fmt::Debug for MarkedQuiverSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Setting(dims={:?}, arrows={:?}, marked={:?})",
            self.dims, self.arrows, self.marked_loops
        )
    }
}

impl fmt::Display for MarkedQuiverSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrow {
    pub tail: usize,
    pub head: usize,
    pub slot: u32,
    pub marked: bool,
}

impl Arrow {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ZeroDimension { vertex: usize },
    MarkedLoopAtSmallVertex { vertex: usize, dim: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroDimension { vertex } => {
                write!(f, "vertex {vertex} has dimension 0")
            }
            Violation::MarkedLoopAtSmallVertex { vertex, dim } => write!(
                f,
                "marked loop requires dim >= 2 (vertex {vertex} has dim {dim})"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub violations: Vec<Violation>,
    /// Reported for information; not a violation.
    pub strongly_connected: bool,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Integer vector over the vertices of a setting.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimVector(pub Vec<u32>);

impl DimVector {
    pub fn zero(k: usize) -> Self {
        DimVector(vec![0; k])
    }

    /// Standard basis vector `ε_v`.
    pub fn unit(k: usize, v: usize) -> Self {
        let mut e = vec![0; k];
        e[v] = 1;
        DimVector(e)
    }

    pub fn ones(k: usize) -> Self {
        DimVector(vec![1; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn support(&self) -> Vec<bool> {
        self.0.iter().map(|&x| x > 0).collect()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &DimVector) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn scaled(&self, e: u32) -> DimVector {
        DimVector(self.0.iter().map(|x| x * e).collect())
    }

    pub fn add(&self, other: &DimVector) -> DimVector {
        DimVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Index<usize> for DimVector {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl From<Vec<u32>> for DimVector {
    fn from(v: Vec<u32>) -> Self {
        DimVector(v)
    }
}

/// Byte encoding of a setting under the lexicographically minimal vertex ordering.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.to_hex())
    }
}

pub fn canonical_key(s: &MarkedQuiverSetting) -> Result<CanonicalKey> {
    canonical_key_with_bound(s, DEFAULT_CANONICAL_BOUND)
}

/// Canonical key by exhaustive search over vertex orderings.
///
/// The key is a sequence of per-position chunks; the chunk for the vertex
/// placed at position `t` depends only on that vertex and the ones placed
/// before it, so the lexicographic minimum can be found by a depth-first
/// search that only follows candidates achieving the minimal chunk at each
/// level. A refined colour (iterated degree signature, itself an isomorphism
/// invariant) leads each chunk to cut down ties.
pub fn canonical_key_with_bound(s: &MarkedQuiverSetting, bound: usize) -> Result<CanonicalKey> {
    let k = s.vertex_count();
    if k > bound {
        return Err(Error::Capacity {
            what: "vertex count",
            got: k,
            bound,
        });
    }
    let colors = refined_colors(s);
    let mut best: Option<Vec<u32>> = None;
    let mut order = Vec::with_capacity(k);
    let mut used = vec![false; k];
    let mut prefix = vec![k as u32];
    search_min(s, &colors, &mut order, &mut used, &mut prefix, &mut best);
    let words = best.expect("at least one ordering exists");
    let bytes = words.iter().flat_map(|w| w.to_be_bytes()).collect();
    Ok(CanonicalKey(bytes))
}

fn chunk_for(s: &MarkedQuiverSetting, colors: &[u32], order: &[usize], v: usize) -> Vec<u32> {
    let mut c = Vec::with_capacity(4 + 2 * order.len());
    c.push(colors[v]);
    c.push(s.dims[v]);
    c.push(s.marked_loops[v]);
    c.push(s.arrows[v][v]);
    for &p in order {
        c.push(s.arrows[p][v]);
        c.push(s.arrows[v][p]);
    }
    c
}

fn search_min(
    s: &MarkedQuiverSetting,
    colors: &[u32],
    order: &mut Vec<usize>,
    used: &mut [bool],
    prefix: &mut Vec<u32>,
    best: &mut Option<Vec<u32>>,
) {
    let k = s.vertex_count();
    if order.len() == k {
        if best.as_ref().is_none_or(|b| prefix.as_slice() < b.as_slice()) {
            *best = Some(prefix.clone());
        }
        return;
    }
    let mut candidates: Vec<(Vec<u32>, usize)> = (0..k)
        .filter(|&v| !used[v])
        .map(|v| (chunk_for(s, colors, order, v), v))
        .collect();
    let min_chunk = candidates.iter().map(|(c, _)| c).min().cloned().expect("nonempty");
    if let Some(b) = best.as_ref() {
        let mut trial = prefix.clone();
        trial.extend_from_slice(&min_chunk);
        let cmp_len = trial.len();
        if trial.as_slice() > &b[..cmp_len] {
            return;
        }
    }
    candidates.retain(|(c, _)| *c == min_chunk);
    for (chunk, v) in candidates {
        let mark = prefix.len();
        prefix.extend_from_slice(&chunk);
        used[v] = true;
        order.push(v);
        search_min(s, colors, order, used, prefix, best);
        order.pop();
        used[v] = false;
        prefix.truncate(mark);
    }
}

/// Colour refinement: start from `(dim, marks, loops)` and repeatedly split by
/// the multiset of `(neighbour colour, out-multiplicity, in-multiplicity)`.
/// Colours are ranks among sorted signatures, hence canonical.
fn refined_colors(s: &MarkedQuiverSetting) -> Vec<u32> {
    let k = s.vertex_count();
    let initial: Vec<Vec<u32>> = (0..k)
        .map(|v| vec![s.dims[v], s.marked_loops[v], s.arrows[v][v]])
        .collect();
    let mut colors = rank_signatures(&initial);
    loop {
        let sigs: Vec<Vec<u32>> = (0..k)
            .map(|v| {
                let mut nb: Vec<[u32; 3]> = (0..k)
                    .filter(|&w| w != v && (s.arrows[v][w] > 0 || s.arrows[w][v] > 0))
                    .map(|w| [colors[w], s.arrows[v][w], s.arrows[w][v]])
                    .collect();
                nb.sort_unstable();
                let mut sig = vec![colors[v]];
                sig.extend(nb.into_iter().flatten());
                sig
            })
            .collect();
        let next = rank_signatures(&sigs);
        let classes = |c: &[u32]| {
            let mut u = c.to_vec();
            u.sort_unstable();
            u.dedup();
            u.len()
        };
        if classes(&next) == classes(&colors) {
            return next;
        }
        colors = next;
    }
}

fn rank_signatures(sigs: &[Vec<u32>]) -> Vec<u32> {
    let mut sorted: Vec<&Vec<u32>> = sigs.iter().collect();
    sorted.sort();
    sorted.dedup();
    sigs.iter()
        .map(|s| sorted.binary_search(&s).expect("present") as u32)
        .collect()
}

/// Exact rational matrices on the arrows of a setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    setting: MarkedQuiverSetting,
    arrows: Vec<Arrow>,
    matrices: Vec<QMatrix>,
}

impl Representation {
    /// `matrices` follows [`MarkedQuiverSetting::arrow_list`]; arrow `t → h`
    /// carries a `dims[h] × dims[t]` matrix.
    pub fn new(setting: MarkedQuiverSetting, matrices: Vec<QMatrix>) -> Result<Self> {
        let arrows = setting.arrow_list();
        if matrices.len() != arrows.len() {
            return Err(Error::Dimension {
                expected: arrows.len(),
                got: matrices.len(),
            });
        }
        for (idx, (a, m)) in arrows.iter().zip(&matrices).enumerate() {
            let want = (setting.dim(a.head) as usize, setting.dim(a.tail) as usize);
            if m.shape() != want {
                return Err(Error::MalformedRepresentation(format!(
                    "arrow {idx} needs a {}x{} matrix, got {}x{}",
                    want.0,
                    want.1,
                    m.rows(),
                    m.cols()
                )));
            }
            if a.marked && !m.trace().is_zero() {
                return Err(Error::MalformedRepresentation(format!(
                    "marked loop {idx} must carry a trace-zero matrix"
                )));
            }
        }
        Ok(Representation {
            setting,
            arrows,
            matrices,
        })
    }

    /// Representation of an all-ones setting from one scalar per arrow.
    pub fn from_scalars(setting: MarkedQuiverSetting, values: Vec<crate::linalg::Rational>) -> Result<Self> {
        if !setting.all_ones() {
            return Err(Error::Unsupported(
                "scalar representations need an all-ones dimension vector".into(),
            ));
        }
        Self::new(setting, values.into_iter().map(QMatrix::scalar).collect())
    }

    pub fn zero(setting: MarkedQuiverSetting) -> Self {
        let arrows = setting.arrow_list();
        let matrices = arrows
            .iter()
            .map(|a| QMatrix::zeros(setting.dim(a.head) as usize, setting.dim(a.tail) as usize))
            .collect();
        Representation {
            setting,
            arrows,
            matrices,
        }
    }

    pub fn setting(&self) -> &MarkedQuiverSetting {
        &self.setting
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn matrix(&self, arrow: usize) -> &QMatrix {
        &self.matrices[arrow]
    }

    /// Which arrows carry a nonzero matrix.
    pub fn support(&self) -> Vec<bool> {
        self.matrices.iter().map(|m| !m.is_zero()).collect()
    }
}

/// A path given by its start vertex and arrow indices in traversal order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub start: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path {
            start: v,
            arrows: Vec::new(),
        }
    }

    pub fn new(start: usize, arrows: Vec<usize>) -> Self {
        Path { start, arrows }
    }

    /// End vertex, checking composability against the setting's arrows.
    pub fn end(&self, arrows: &[Arrow]) -> Result<usize> {
        let mut at = self.start;
        for (step, &idx) in self.arrows.iter().enumerate() {
            let a = arrows.get(idx).ok_or_else(|| {
                Error::Composition(format!("arrow index {idx} out of range"))
            })?;
            if a.tail != at {
                return Err(Error::Composition(format!(
                    "step {step}: arrow {idx} starts at vertex {} but the path is at vertex {at}",
                    a.tail
                )));
            }
            at = a.head;
        }
        Ok(at)
    }
}

/// Product of the arrow matrices along `path`; the trivial path at `v`
/// evaluates to the identity of size `dims[v]`.
pub fn evaluate_path(r: &Representation, path: &Path) -> Result<QMatrix> {
    let k = r.setting.vertex_count();
    if path.start >= k {
        return Err(Error::Composition(format!("start vertex {} out of range", path.start)));
    }
    path.end(&r.arrows)?;
    let mut acc = QMatrix::identity(r.setting.dim(path.start) as usize);
    for &idx in &path.arrows {
        acc = r.matrices[idx].checked_mul(&acc)?;
    }
    Ok(acc)
}
