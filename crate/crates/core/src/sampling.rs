//! Seeded random settings, supports and stability vectors for randomized checks.

use rand::Rng;

use crate::local::is_simple_dimvector;
use crate::quiver::MarkedQuiverSetting;

/// Size limits for random settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SettingBounds {
    pub max_vertices: usize,
    pub max_dim: u32,
    pub max_multiplicity: u32,
    /// Probability that an off-diagonal entry is nonzero.
    pub density: f64,
    pub marks: bool,
}

impl Default for SettingBounds {
    fn default() -> Self {
        SettingBounds {
            max_vertices: 5,
            max_dim: 3,
            max_multiplicity: 3,
            density: 0.5,
            marks: true,
        }
    }
}

/// A valid setting: positive dims, marks only at vertices of dimension ≥ 2.
pub fn random_setting<R: Rng + ?Sized>(rng: &mut R, b: &SettingBounds) -> MarkedQuiverSetting {
    let k = rng.gen_range(1..=b.max_vertices);
    let dims: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=b.max_dim)).collect();
    let arrows: Vec<Vec<u32>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    // loops are kept rarer so that reductions have work to do
                    let p = if i == j { b.density / 2.0 } else { b.density };
                    if rng.gen_bool(p) {
                        rng.gen_range(1..=b.max_multiplicity)
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    let marks: Vec<u32> = dims
        .iter()
        .map(|&a| {
            if b.marks && a >= 2 && rng.gen_bool(b.density / 2.0) {
                rng.gen_range(1..=b.max_multiplicity.min(2))
            } else {
                0
            }
        })
        .collect();
    MarkedQuiverSetting::new(dims, arrows, marks).expect("sizes agree")
}

/// A valid strongly connected setting, drawn by rejection.
pub fn random_strongly_connected<R: Rng + ?Sized>(rng: &mut R, b: &SettingBounds) -> MarkedQuiverSetting {
    loop {
        let s = random_setting(rng, b);
        if s.is_strongly_connected() {
            return s;
        }
    }
}

/// A strongly connected setting whose dimension vector is that of a simple representation.
pub fn random_simple_admitting<R: Rng + ?Sized>(rng: &mut R, b: &SettingBounds) -> MarkedQuiverSetting {
    loop {
        let s = random_strongly_connected(rng, b);
        if matches!(is_simple_dimvector(&s, &s.dim_vector()), Ok(true)) {
            return s;
        }
    }
}

/// A mark-free setting with every dimension 1 and at most `max_arrows` arrows.
pub fn random_all_ones<R: Rng + ?Sized>(
    rng: &mut R,
    max_vertices: usize,
    max_arrows: u32,
    strongly_connected: bool,
) -> MarkedQuiverSetting {
    loop {
        let k = rng.gen_range(1..=max_vertices);
        let mut arrows = vec![vec![0u32; k]; k];
        let count = rng.gen_range(0..=max_arrows);
        for _ in 0..count {
            let (i, j) = (rng.gen_range(0..k), rng.gen_range(0..k));
            arrows[i][j] += 1;
        }
        let s = MarkedQuiverSetting::unmarked(vec![1; k], arrows).expect("sizes agree");
        if !strongly_connected || s.is_strongly_connected() {
            return s;
        }
    }
}

/// `θ` with entries in `-max..=max` and `θ·α = 0`.
pub fn random_theta<R: Rng + ?Sized>(rng: &mut R, dims: &[u32], max: i64) -> Vec<i64> {
    let k = dims.len();
    loop {
        let mut theta: Vec<i64> = (0..k).map(|_| rng.gen_range(-max..=max)).collect();
        // fix the pairing on a vertex of dimension 1 if there is one
        let pairing: i64 = theta.iter().zip(dims).map(|(t, &a)| t * i64::from(a)).sum();
        if let Some(v) = dims.iter().position(|&a| a == 1) {
            theta[v] -= pairing;
            return theta;
        }
        if pairing == 0 {
            return theta;
        }
    }
}

/// Each entry independently true with probability `p`.
pub fn random_support<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> Vec<bool> {
    (0..n).map(|_| rng.gen_bool(p)).collect()
}
