//! Reduction moves on marked quiver settings and normalization to the reduced setting.
//!
//! Three moves are implemented:
//!
//! * **vertex removal** at a loop-free vertex `v` (when at least two vertices
//!   remain) with `χ(α, ε_v) ≥ 0` or `χ(ε_v, α) ≥ 0`: every pair of an arrow
//!   `i → v` and an arrow `v → j` is replaced by one arrow `i → j`;
//! * **small loop removal** at a dimension-1 vertex carrying an ordinary loop;
//! * **big loop removal** at a vertex of dimension `a ≥ 2` carrying exactly one
//!   (possibly marked) loop and exactly one outgoing arrow, which ends at a
//!   dimension-1 vertex (or, dually, exactly one incoming arrow from one): the
//!   loop is dropped and that arrow becomes `a` parallel arrows.
//!
//! Each move records how many polynomial variables it splits off; their sum
//! `z` satisfies `C[rep](original)^GL ≅ C[rep](reduced)^GL[y_1..y_z]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quiver::{DimVector, MarkedQuiverSetting};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    VertexRemoval,
    SmallLoopRemoval,
    BigLoopRemoval,
}

/// Where the single arrow of a big loop removal points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborSide {
    /// The only arrow leaving `v` ends at the dimension-1 neighbour.
    Target,
    /// The only arrow entering `v` starts at the dimension-1 neighbour.
    Source,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BigLoopDetail {
    pub marked: bool,
    pub side: NeighborSide,
    pub neighbor: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub vertex: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<BigLoopDetail>,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.detail) {
            (MoveKind::VertexRemoval, _) => write!(f, "remove vertex {}", self.vertex),
            (MoveKind::SmallLoopRemoval, _) => write!(f, "remove loop at vertex {}", self.vertex),
            (MoveKind::BigLoopRemoval, Some(d)) => write!(
                f,
                "remove {} loop at vertex {} ({} vertex {})",
                if d.marked { "marked" } else { "ordinary" },
                self.vertex,
                match d.side {
                    NeighborSide::Target => "single arrow to",
                    NeighborSide::Source => "single arrow from",
                },
                d.neighbor
            ),
            (MoveKind::BigLoopRemoval, None) => write!(f, "remove loop at vertex {}", self.vertex),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionResult {
    pub reduced: MarkedQuiverSetting,
    pub z: u64,
    pub trace: Vec<Move>,
    /// Non-fatal notes, e.g. strict inequalities seen in strict mode.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Warn whenever a vertex removal is licensed by a strict inequality.
    pub strict: bool,
}

/// All legal moves, ordered by vertex, then kind, then side.
pub fn applicable_moves(s: &MarkedQuiverSetting) -> Vec<Move> {
    let k = s.vertex_count();
    let alpha = s.dim_vector();
    let mut out = Vec::new();
    for v in 0..k {
        let a = s.dim(v);
        let loops = s.total_loops(v);
        if k >= 2 && loops == 0 {
            let (into, out_of) = vertex_removal_margins(s, &alpha, v);
            if into >= 0 || out_of >= 0 {
                out.push(Move {
                    kind: MoveKind::VertexRemoval,
                    vertex: v,
                    detail: None,
                });
            }
        }
        if a == 1 && s.loops(v) >= 1 {
            out.push(Move {
                kind: MoveKind::SmallLoopRemoval,
                vertex: v,
                detail: None,
            });
        }
        if a >= 2 && loops == 1 {
            let marked = s.marks(v) == 1;
            if let Some(j) = single_neighbor(s, v, NeighborSide::Target) {
                out.push(big_loop(v, marked, NeighborSide::Target, j));
            }
            if let Some(i) = single_neighbor(s, v, NeighborSide::Source) {
                out.push(big_loop(v, marked, NeighborSide::Source, i));
            }
        }
    }
    out
}

fn big_loop(v: usize, marked: bool, side: NeighborSide, neighbor: usize) -> Move {
    Move {
        kind: MoveKind::BigLoopRemoval,
        vertex: v,
        detail: Some(BigLoopDetail {
            marked,
            side,
            neighbor,
        }),
    }
}

/// `(χ(α, ε_v), χ(ε_v, α))`.
fn vertex_removal_margins(s: &MarkedQuiverSetting, alpha: &DimVector, v: usize) -> (i64, i64) {
    let e = DimVector::unit(s.vertex_count(), v);
    (
        s.euler_form(alpha, &e).expect("lengths agree"),
        s.euler_form(&e, alpha).expect("lengths agree"),
    )
}

/// The unique non-loop neighbour on `side` if exactly one such arrow exists
/// and it attaches to a dimension-1 vertex.
fn single_neighbor(s: &MarkedQuiverSetting, v: usize, side: NeighborSide) -> Option<usize> {
    let k = s.vertex_count();
    let count = |w: usize| match side {
        NeighborSide::Target => s.arrows(v, w),
        NeighborSide::Source => s.arrows(w, v),
    };
    let total: u32 = (0..k).filter(|&w| w != v).map(count).sum();
    if total != 1 {
        return None;
    }
    let w = (0..k).find(|&w| w != v && count(w) == 1)?;
    (s.dim(w) == 1).then_some(w)
}

/// Applies `mv`, returning the new setting and the increment of `z`.
pub fn apply_move(s: &MarkedQuiverSetting, mv: &Move) -> Result<(MarkedQuiverSetting, u64)> {
    if !applicable_moves(s).contains(mv) {
        return Err(Error::IllegalMove(format!("{mv} is not applicable to {s}")));
    }
    let v = mv.vertex;
    match mv.kind {
        MoveKind::VertexRemoval => {
            let k = s.vertex_count();
            let mut next = s.clone();
            {
                let arrows = next.arrows_mut();
                for i in (0..k).filter(|&i| i != v) {
                    for j in (0..k).filter(|&j| j != v) {
                        arrows[i][j] += s.arrows(i, v) * s.arrows(v, j);
                    }
                }
            }
            Ok((next.without_vertex(v), 0))
        }
        MoveKind::SmallLoopRemoval => {
            let mut next = s.clone();
            next.arrows_mut()[v][v] -= 1;
            Ok((next, 1))
        }
        MoveKind::BigLoopRemoval => {
            let d = mv.detail.expect("big loop removal carries its detail");
            let a = s.dim(v);
            let mut next = s.clone();
            if d.marked {
                next.marks_mut()[v] = 0;
            } else {
                next.arrows_mut()[v][v] = 0;
            }
            match d.side {
                NeighborSide::Target => next.arrows_mut()[v][d.neighbor] = a,
                NeighborSide::Source => next.arrows_mut()[d.neighbor][v] = a,
            }
            let inc = if d.marked { a - 1 } else { a };
            Ok((next, u64::from(inc)))
        }
    }
}

/// Reduces with the deterministic move order of [`applicable_moves`].
pub fn reduce(s: &MarkedQuiverSetting) -> ReductionResult {
    reduce_with_options(s, ReduceOptions::default())
}

pub fn reduce_with_options(s: &MarkedQuiverSetting, opts: ReduceOptions) -> ReductionResult {
    reduce_by(s, opts, |_| 0)
}

/// Reduces, letting `choose` pick the index of the next move among the
/// currently applicable ones. Out-of-range choices are clamped.
///
/// Terminates because every move strictly decreases
/// `(Σ dims, Σ ordinary + marked loops)` lexicographically.
pub fn reduce_by<F>(s: &MarkedQuiverSetting, opts: ReduceOptions, mut choose: F) -> ReductionResult
where
    F: FnMut(&[Move]) -> usize,
{
    let mut current = s.clone();
    let mut z = 0;
    let mut trace = Vec::new();
    let mut warnings = Vec::new();
    loop {
        let moves = applicable_moves(&current);
        if moves.is_empty() {
            break;
        }
        let idx = choose(&moves).min(moves.len() - 1);
        let mv = moves[idx];
        if opts.strict && mv.kind == MoveKind::VertexRemoval {
            let alpha = current.dim_vector();
            let (into, out_of) = vertex_removal_margins(&current, &alpha, mv.vertex);
            if into != 0 && out_of != 0 {
                warnings.push(format!(
                    "vertex removal at {} licensed by strict inequality (χ(α,ε)={into}, χ(ε,α)={out_of})",
                    mv.vertex
                ));
            }
        }
        let (next, inc) = apply_move(&current, &mv).expect("move taken from the applicable list");
        current = next;
        z += inc;
        trace.push(mv);
    }
    ReductionResult {
        reduced: current,
        z,
        trace,
        warnings,
    }
}

pub fn is_reduced(s: &MarkedQuiverSetting) -> bool {
    applicable_moves(s).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::quiver::canonical_key;

    fn marked_pair() -> MarkedQuiverSetting {
        MarkedQuiverSetting::new(vec![2, 1], vec![vec![0, 1], vec![2, 0]], vec![1, 0]).unwrap()
    }

    #[test]
    fn conifold_is_reduced() {
        assert!(applicable_moves(&fixtures::conifold()).is_empty());
        let r = reduce(&fixtures::conifold());
        assert_eq!(r.reduced, fixtures::conifold());
        assert_eq!(r.z, 0);
    }

    #[test]
    fn single_loop_at_dim_one() {
        let s = MarkedQuiverSetting::single_vertex(1, 1, 0);
        assert_eq!(
            applicable_moves(&s),
            vec![Move {
                kind: MoveKind::SmallLoopRemoval,
                vertex: 0,
                detail: None
            }]
        );
    }

    #[test]
    fn three_loops_removed_one_at_a_time() {
        let mut s = MarkedQuiverSetting::single_vertex(1, 3, 0);
        let mut z = 0;
        let mv = Move {
            kind: MoveKind::SmallLoopRemoval,
            vertex: 0,
            detail: None,
        };
        for _ in 0..3 {
            let (next, inc) = apply_move(&s, &mv).unwrap();
            s = next;
            z += inc;
        }
        assert_eq!(s, MarkedQuiverSetting::single_vertex(1, 0, 0));
        assert_eq!(z, 3);
        assert!(apply_move(&s, &mv).is_err());
    }

    #[test]
    fn big_loop_removal_on_marked_loop() {
        let s = marked_pair();
        let moves = applicable_moves(&s);
        let mv = moves
            .iter()
            .find(|m| m.kind == MoveKind::BigLoopRemoval)
            .copied()
            .expect("big loop removal applies");
        assert_eq!(
            mv.detail,
            Some(BigLoopDetail {
                marked: true,
                side: NeighborSide::Target,
                neighbor: 1
            })
        );
        let (next, inc) = apply_move(&s, &mv).unwrap();
        assert_eq!(inc, 1);
        assert_eq!(next.arrow_matrix(), &[vec![0, 2], vec![2, 0]]);
        assert_eq!(next.marked_loops(), &[0, 0]);
    }

    #[test]
    fn big_loop_removal_on_genuine_loop_counts_full_dimension() {
        let s = MarkedQuiverSetting::unmarked(vec![3, 1], vec![vec![1, 1], vec![3, 0]]).unwrap();
        let mv = applicable_moves(&s)
            .into_iter()
            .find(|m| m.kind == MoveKind::BigLoopRemoval)
            .unwrap();
        let (next, inc) = apply_move(&s, &mv).unwrap();
        assert_eq!(inc, 3);
        assert_eq!(next.arrows(0, 1), 3);
        assert_eq!(next.loops(0), 0);
    }

    #[test]
    fn vertex_removal_composes_arrows() {
        let chain = MarkedQuiverSetting::unmarked(
            vec![1, 1, 1],
            vec![vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]],
        )
        .unwrap();
        let mv = Move {
            kind: MoveKind::VertexRemoval,
            vertex: 1,
            detail: None,
        };
        let (next, inc) = apply_move(&chain, &mv).unwrap();
        assert_eq!(inc, 0);
        assert_eq!(next.arrow_matrix(), &[vec![0, 1], vec![0, 0]]);
    }

    #[test]
    fn illegal_move_is_rejected() {
        let mv = Move {
            kind: MoveKind::VertexRemoval,
            vertex: 0,
            detail: None,
        };
        assert!(matches!(
            apply_move(&fixtures::conifold(), &mv),
            Err(Error::IllegalMove(_))
        ));
    }

    #[test]
    fn quantum_plane_origin_is_terminal() {
        let r = reduce(&fixtures::quantum_plane_origin());
        assert!(r.trace.is_empty());
        assert_eq!(r.z, 0);
    }

    #[test]
    fn tree_of_dim_one_vertices_collapses() {
        // 0 -> 1, 0 -> 2, 2 -> 3
        let tree = MarkedQuiverSetting::unmarked(
            vec![1, 1, 1, 1],
            vec![
                vec![0, 1, 1, 0],
                vec![0, 0, 0, 0],
                vec![0, 0, 0, 1],
                vec![0, 0, 0, 0],
            ],
        )
        .unwrap();
        let r = reduce(&tree);
        assert_eq!(r.reduced, MarkedQuiverSetting::single_vertex(1, 0, 0));
        assert_eq!(r.z, 0);
    }

    #[test]
    fn marked_pair_reduces_to_point_with_matching_bookkeeping() {
        let r = reduce(&marked_pair());
        assert_eq!(r.reduced, MarkedQuiverSetting::single_vertex(1, 0, 0));
        assert_eq!(r.z, 5);
    }

    #[test]
    fn reduce_is_idempotent() {
        for (_, s) in fixtures::all() {
            let r = reduce(&s);
            assert!(reduce(&r.reduced).trace.is_empty());
        }
    }

    #[test]
    fn strict_mode_flags_strict_inequality() {
        // dims (1, 3), two arrows each way: χ(α, ε_1) = 3 - 2 = 1 > 0
        let s = MarkedQuiverSetting::unmarked(vec![1, 3], vec![vec![0, 2], vec![2, 0]]).unwrap();
        let r = reduce_with_options(&s, ReduceOptions { strict: true });
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(
            canonical_key(&r.reduced).unwrap(),
            canonical_key(&MarkedQuiverSetting::single_vertex(1, 0, 0)).unwrap()
        );
        assert_eq!(r.z, 4);
    }
}
