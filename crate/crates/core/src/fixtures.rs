//! Worked settings used across tests, the CLI self-test and the shipped fixture files.
//!
//! Vertex indices are 0-based.

use crate::quiver::MarkedQuiverSetting;

/// Two dimension-1 vertices with two arrows each way.
///
/// Arrow order (see `arrow_list`): 0 = x3, 1 = y3 (vertex 0 → 1),
/// 2 = x2, 3 = y2 (vertex 1 → 0).
pub fn conifold() -> MarkedQuiverSetting {
    MarkedQuiverSetting::unmarked(vec![1, 1], vec![vec![0, 2], vec![2, 0]]).expect("well-formed")
}

/// Local setting at an Azumaya point of the order-two quantum plane.
pub fn quantum_plane_azumaya() -> MarkedQuiverSetting {
    MarkedQuiverSetting::single_vertex(1, 2, 0)
}

/// Local setting at a ramified point `(a², 0)` of the quantum plane.
pub fn quantum_plane_ramified() -> MarkedQuiverSetting {
    MarkedQuiverSetting::unmarked(vec![1, 1], vec![vec![1, 1], vec![1, 0]]).expect("well-formed")
}

/// Local setting at the origin of the quantum plane: two marked loops on a dimension-2 vertex.
pub fn quantum_plane_origin() -> MarkedQuiverSetting {
    MarkedQuiverSetting::single_vertex(2, 0, 2)
}

/// Dimension-4 singular type on two vertices: two arrows one way, three back.
pub fn dim4_two_vertex() -> MarkedQuiverSetting {
    MarkedQuiverSetting::unmarked(vec![1, 1], vec![vec![0, 2], vec![3, 0]]).expect("well-formed")
}

/// Dimension-4 singular type: three vertices joined pairwise by one arrow in each direction.
///
/// Arrow order: 0: 0→1, 1: 0→2, 2: 1→0, 3: 1→2, 4: 2→0, 5: 2→1.
pub fn dim4_triangle() -> MarkedQuiverSetting {
    MarkedQuiverSetting::unmarked(
        vec![1, 1, 1],
        vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
    )
    .expect("well-formed")
}

/// Dimension-4 singular type: an oriented 3-cycle with every arrow doubled.
///
/// Arrow order: 0,1: 0→1, 2,3: 1→2, 4,5: 2→0.
pub fn dim4_double_cycle() -> MarkedQuiverSetting {
    MarkedQuiverSetting::unmarked(
        vec![1, 1, 1],
        vec![vec![0, 2, 0], vec![0, 0, 2], vec![2, 0, 0]],
    )
    .expect("well-formed")
}

/// `(name, setting, central dimension, expected defect)` for the quantum-plane points.
pub fn quantum_plane_defects() -> Vec<(&'static str, MarkedQuiverSetting, i64, i64)> {
    vec![
        ("azumaya", quantum_plane_azumaya(), 2, 0),
        ("ramified", quantum_plane_ramified(), 2, 0),
        ("origin", quantum_plane_origin(), 2, 1),
    ]
}

/// Every named fixture, in the order the fixture directory lists them.
pub fn all() -> Vec<(&'static str, MarkedQuiverSetting)> {
    vec![
        ("conifold", conifold()),
        ("quantum_plane_azumaya", quantum_plane_azumaya()),
        ("quantum_plane_ramified", quantum_plane_ramified()),
        ("quantum_plane_origin", quantum_plane_origin()),
        ("dim4_two_vertex", dim4_two_vertex()),
        ("dim4_triangle", dim4_triangle()),
        ("dim4_double_cycle", dim4_double_cycle()),
    ]
}
