//! Local quiver settings at semisimple points.
//!
//! A semisimple representation `S_1^{e_1} ⊕ … ⊕ S_n^{e_n}` with `dim S_i = β_i`
//! has local (Ext) quiver with one vertex per summand, dimension `e_i` and
//! `δ_ij − χ(β_i, β_j)` arrows from `i` to `j`. Only mark-free (path algebra)
//! settings are accepted here.

use serde::{Deserialize, Serialize};

use crate::classification::{is_smooth_setting, SingularityReport};
use crate::error::{Error, Result};
use crate::quiver::{DimVector, MarkedQuiverSetting};

/// Largest `Σ α_v` for which decomposition types are enumerated.
pub const DEFAULT_DECOMPOSITION_BOUND: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecompositionPart {
    pub multiplicity: u32,
    pub beta: DimVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DecompositionType {
    pub parts: Vec<DecompositionPart>,
}

impl DecompositionType {
    pub fn new(parts: Vec<(u32, Vec<u32>)>) -> Self {
        DecompositionType {
            parts: parts
                .into_iter()
                .map(|(e, b)| DecompositionPart {
                    multiplicity: e,
                    beta: DimVector(b),
                })
                .collect(),
        }
    }

    /// `Σ e_i β_i`.
    pub fn total(&self, k: usize) -> DimVector {
        self.parts
            .iter()
            .fold(DimVector::zero(k), |acc, p| acc.add(&p.beta.scaled(p.multiplicity)))
    }

    /// Checks lengths, positivity, distinctness, simplicity and `Σ e_i β_i = α`.
    pub fn check(&self, s: &MarkedQuiverSetting) -> Result<()> {
        let k = s.vertex_count();
        if self.parts.is_empty() {
            return Err(Error::Domain("decomposition type has no parts".into()));
        }
        for (i, p) in self.parts.iter().enumerate() {
            if p.beta.len() != k {
                return Err(Error::Dimension {
                    expected: k,
                    got: p.beta.len(),
                });
            }
            if p.multiplicity == 0 {
                return Err(Error::Domain(format!("part {i} has multiplicity 0")));
            }
            if self.parts[..i].iter().any(|q| q.beta == p.beta) {
                return Err(Error::Domain(format!(
                    "part {i} repeats dimension vector {:?}; merge it into one multiplicity",
                    p.beta.0
                )));
            }
            if !is_simple_dimvector(s, &p.beta)? {
                return Err(Error::Domain(format!(
                    "{:?} is not the dimension vector of a simple representation",
                    p.beta.0
                )));
            }
        }
        if self.total(k) != s.dim_vector() {
            return Err(Error::Domain(format!(
                "Σ e_i β_i = {:?} differs from α = {:?}",
                self.total(k).0,
                s.dims()
            )));
        }
        Ok(())
    }
}

/// Whether `β` is the dimension vector of a simple representation.
///
/// The support must be strongly connected. A loop-free single vertex needs
/// `β = ε_v`, a support forming one oriented cycle needs `β` to be 1 on it,
/// and otherwise `χ(β, ε_v) ≤ 0` and `χ(ε_v, β) ≤ 0` on the support. Marked
/// loops count as loops.
pub fn is_simple_dimvector(s: &MarkedQuiverSetting, beta: &DimVector) -> Result<bool> {
    let k = s.vertex_count();
    if beta.len() != k {
        return Err(Error::Dimension {
            expected: k,
            got: beta.len(),
        });
    }
    let support = beta.support();
    if !s.is_strongly_connected_on(&support) {
        return Ok(false);
    }
    let verts: Vec<usize> = (0..k).filter(|&v| support[v]).collect();
    let out_deg = |v: usize| -> u32 {
        verts.iter().map(|&w| s.arrows(v, w)).sum::<u32>() + s.marks(v)
    };
    let in_deg = |v: usize| -> u32 {
        verts.iter().map(|&w| s.arrows(w, v)).sum::<u32>() + s.marks(v)
    };
    let all_one = verts.iter().all(|&v| beta[v] == 1);
    if verts.len() == 1 && out_deg(verts[0]) == 0 {
        return Ok(all_one);
    }
    if verts.iter().all(|&v| out_deg(v) == 1 && in_deg(v) == 1) {
        return Ok(all_one);
    }
    for &v in &verts {
        let e = DimVector::unit(k, v);
        if s.euler_form(beta, &e)? > 0 || s.euler_form(&e, beta)? > 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Local quiver setting at a semisimple point of type `tau`.
pub fn local_setting(s: &MarkedQuiverSetting, tau: &DecompositionType) -> Result<MarkedQuiverSetting> {
    if s.total_marks() > 0 {
        return Err(Error::Unsupported(
            "local settings are only computed for settings without marked loops".into(),
        ));
    }
    tau.check(s)?;
    let n = tau.parts.len();
    let mut arrows = vec![vec![0u32; n]; n];
    for (i, pi) in tau.parts.iter().enumerate() {
        for (j, pj) in tau.parts.iter().enumerate() {
            let count = i64::from(i == j) - s.euler_form(&pi.beta, &pj.beta)?;
            if count < 0 {
                return Err(Error::Inconsistency(format!(
                    "negative arrow count {count} between parts {i} and {j}"
                )));
            }
            arrows[i][j] = count as u32;
        }
    }
    let dims = tau.parts.iter().map(|p| p.multiplicity).collect();
    MarkedQuiverSetting::unmarked(dims, arrows)
}

pub fn classify_point(s: &MarkedQuiverSetting, tau: &DecompositionType) -> Result<SingularityReport> {
    let local = local_setting(s, tau)?;
    Ok(is_smooth_setting(&local))
}

/// All decomposition types of `α` into distinct simple dimension vectors.
pub fn enumerate_decomposition_types(s: &MarkedQuiverSetting) -> Result<Vec<DecompositionType>> {
    enumerate_decomposition_types_with_bound(s, DEFAULT_DECOMPOSITION_BOUND)
}

pub fn enumerate_decomposition_types_with_bound(
    s: &MarkedQuiverSetting,
    bound: u32,
) -> Result<Vec<DecompositionType>> {
    let alpha = s.dim_vector();
    let total = alpha.total();
    if total > bound {
        return Err(Error::Capacity {
            what: "total dimension",
            got: total as usize,
            bound: bound as usize,
        });
    }
    let k = s.vertex_count();
    // simple dimension vectors below α, in lexicographic order
    let mut simples = Vec::new();
    let mut beta = vec![0u32; k];
    loop {
        let b = DimVector(beta.clone());
        if !b.is_zero() && is_simple_dimvector(s, &b)? {
            simples.push(b);
        }
        // odometer increment bounded by α
        let mut i = 0;
        while i < k {
            if beta[i] < alpha[i] {
                beta[i] += 1;
                break;
            }
            beta[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    simples.sort();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    split(&simples, 0, alpha.0.clone(), &mut chosen, &mut out);
    Ok(out)
}

fn split(
    simples: &[DimVector],
    from: usize,
    remaining: Vec<u32>,
    chosen: &mut Vec<DecompositionPart>,
    out: &mut Vec<DecompositionType>,
) {
    if remaining.iter().all(|&r| r == 0) {
        out.push(DecompositionType {
            parts: chosen.clone(),
        });
        return;
    }
    for idx in from..simples.len() {
        let b = &simples[idx];
        let mut rest = remaining.clone();
        let mut e = 0;
        loop {
            if !b.0.iter().zip(&rest).all(|(x, r)| x <= r) {
                break;
            }
            for (r, x) in rest.iter_mut().zip(&b.0) {
                *r -= x;
            }
            e += 1;
            chosen.push(DecompositionPart {
                multiplicity: e,
                beta: b.clone(),
            });
            split(simples, idx + 1, rest.clone(), chosen, out);
            chosen.pop();
        }
    }
}
