//! Toric quiver moduli for settings with every vertex of dimension 1.
//!
//! With one-dimensional vertex spaces the base-change group is a torus, a
//! monomial `u ∈ ℕ^A` in the arrow coordinates has weight `W u` where arrow
//! `a: t → h` has weight `e_h − e_t`, and every subrepresentation is spanned by
//! a set of vertices. Invariants, semi-invariants, stability and the affine
//! charts of the moduli space all become lattice-point computations.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{dominates, hilbert_basis};
use crate::linalg::{rank_of_rows, QMatrix, Rational};
use crate::quiver::{evaluate_path, Arrow, MarkedQuiverSetting, Path, Representation};

/// Largest vertex count for which closed vertex subsets are enumerated.
pub const MAX_STABILITY_VERTICES: usize = 20;
/// Largest arrow count for which arrow supports are enumerated.
pub const MAX_FIBER_ARROWS: usize = 20;
pub const DEFAULT_RELATION_DEGREE: u32 = 4;

/// Arrow weights `e_h − e_t` of an all-ones setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSystem {
    k: usize,
    arrows: Vec<Arrow>,
}

impl WeightSystem {
    pub fn new(s: &MarkedQuiverSetting) -> Result<Self> {
        if !s.all_ones() {
            return Err(Error::Unsupported(
                "toric computations need every vertex to have dimension 1".into(),
            ));
        }
        if s.total_marks() > 0 {
            return Err(Error::Unsupported(
                "marked loops at dimension-1 vertices carry no data; strip them first".into(),
            ));
        }
        Ok(WeightSystem {
            k: s.vertex_count(),
            arrows: s.arrow_list(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.k
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn weight(&self, a: usize) -> Vec<i64> {
        let mut w = vec![0; self.k];
        let arrow = self.arrows[a];
        w[arrow.head] += 1;
        w[arrow.tail] -= 1;
        w
    }

    /// `W` as `k` rows over the arrows.
    pub fn matrix(&self) -> Vec<Vec<i64>> {
        self.columns_to_rows(&(0..self.arrows.len()).collect::<Vec<_>>())
    }

    fn columns_to_rows(&self, cols: &[usize]) -> Vec<Vec<i64>> {
        let mut rows = vec![vec![0; cols.len()]; self.k];
        for (c, &a) in cols.iter().enumerate() {
            let arrow = self.arrows[a];
            rows[arrow.head][c] += 1;
            rows[arrow.tail][c] -= 1;
        }
        rows
    }

    pub fn apply(&self, u: &[u32]) -> Vec<i64> {
        let mut out = vec![0; self.k];
        for (a, &c) in u.iter().enumerate() {
            let arrow = self.arrows[a];
            out[arrow.head] += i64::from(c);
            out[arrow.tail] -= i64::from(c);
        }
        out
    }

    /// Human-readable arrow names, `a{i}: t->h`, in exponent-vector order.
    pub fn legend(&self) -> Vec<String> {
        self.arrows
            .iter()
            .enumerate()
            .map(|(i, a)| format!("a{i}: {}->{}", a.tail, a.head))
            .collect()
    }
}

/// A character `θ` with `θ·α = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StabilityVector(pub Vec<i64>);

impl StabilityVector {
    pub fn new(theta: Vec<i64>, s: &MarkedQuiverSetting) -> Result<Self> {
        if theta.len() != s.vertex_count() {
            return Err(Error::Dimension {
                expected: s.vertex_count(),
                got: theta.len(),
            });
        }
        let pairing: i64 = theta.iter().zip(s.dims()).map(|(t, &a)| t * i64::from(a)).sum();
        if pairing != 0 {
            return Err(Error::Domain(format!("θ·α = {pairing}, expected 0")));
        }
        Ok(StabilityVector(theta))
    }

    pub fn zero(k: usize) -> Self {
        StabilityVector(vec![0; k])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&t| t == 0)
    }

    fn on(&self, subset: u64) -> i64 {
        self.0
            .iter()
            .enumerate()
            .filter(|&(v, _)| subset >> v & 1 == 1)
            .map(|(_, t)| t)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GradedGenerator {
    pub exponents: Vec<u32>,
    pub degree: u32,
}

/// `Π g_i^{lhs_i} = Π g_i^{rhs_i}` over generator indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Binomial {
    pub lhs: Vec<u32>,
    pub rhs: Vec<u32>,
}

impl Binomial {
    /// Number of generator factors on the larger side.
    pub fn degree(&self) -> u32 {
        self.lhs.iter().sum::<u32>().max(self.rhs.iter().sum())
    }

    /// Whether both sides have the same image under `gens`.
    pub fn holds(&self, gens: &[Vec<u32>]) -> bool {
        image(&self.lhs, gens) == image(&self.rhs, gens)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedMonomialAlgebra {
    pub arrow_legend: Vec<String>,
    pub theta: StabilityVector,
    pub generators: Vec<GradedGenerator>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<Binomial>,
}

impl GradedMonomialAlgebra {
    pub fn exponent_vectors(&self) -> Vec<Vec<u32>> {
        self.generators.iter().map(|g| g.exponents.clone()).collect()
    }

    pub fn of_degree(&self, degree: u32) -> Vec<&GradedGenerator> {
        self.generators.iter().filter(|g| g.degree == degree).collect()
    }
}

/// Hilbert basis of `{u ∈ ℕ^A : W u = 0}`: the cycle monomials generating the invariants.
pub fn invariant_generators(s: &MarkedQuiverSetting) -> Result<Vec<Vec<u32>>> {
    let ws = WeightSystem::new(s)?;
    Ok(hilbert_basis(&ws.matrix(), ws.arrow_count()))
}

/// Hilbert basis of `{(u, l) : W u = l θ}`, graded by `l`. `θ = 0` gives the invariants in degree 0.
pub fn semi_invariant_generators(
    s: &MarkedQuiverSetting,
    theta: &StabilityVector,
) -> Result<GradedMonomialAlgebra> {
    let ws = WeightSystem::new(s)?;
    let theta = StabilityVector::new(theta.0.clone(), s)?;
    let generators = if theta.is_zero() {
        hilbert_basis(&ws.matrix(), ws.arrow_count())
            .into_iter()
            .map(|exponents| GradedGenerator { exponents, degree: 0 })
            .collect()
    } else {
        graded_basis(&ws, &(0..ws.arrow_count()).collect::<Vec<_>>(), &theta)
    };
    Ok(GradedMonomialAlgebra {
        arrow_legend: ws.legend(),
        theta,
        generators,
        relations: Vec::new(),
    })
}

/// Hilbert basis of `{(u, l) : W u = l θ}` with `u` supported on `cols`,
/// exponents spread back over all arrows. Sorted by degree, then exponents.
fn graded_basis(ws: &WeightSystem, cols: &[usize], theta: &StabilityVector) -> Vec<GradedGenerator> {
    let mut rows = ws.columns_to_rows(cols);
    for (row, t) in rows.iter_mut().zip(&theta.0) {
        row.push(-t);
    }
    let n = ws.arrow_count();
    let mut out: Vec<GradedGenerator> = hilbert_basis(&rows, cols.len() + 1)
        .into_iter()
        .map(|x| {
            let mut exponents = vec![0; n];
            for (c, &a) in cols.iter().enumerate() {
                exponents[a] = x[c];
            }
            GradedGenerator {
                exponents,
                degree: x[cols.len()],
            }
        })
        .collect();
    out.sort_by(|a, b| {
        (a.degree, total(&a.exponents), &a.exponents).cmp(&(b.degree, total(&b.exponents), &b.exponents))
    });
    out
}

fn total(x: &[u32]) -> u32 {
    x.iter().sum()
}

fn image(m: &[u32], gens: &[Vec<u32>]) -> Vec<u32> {
    let n = gens.first().map_or(0, Vec::len);
    let mut out = vec![0; n];
    for (i, &e) in m.iter().enumerate() {
        for (o, g) in out.iter_mut().zip(&gens[i]) {
            *o += e * g;
        }
    }
    out
}

/// Minimal binomial relations among `gens` with at most `degree_bound`
/// factors per side.
///
/// For each image `b` reached by a product of at most `degree_bound`
/// generators, the full fibre of generator monomials over `b` is split into
/// classes by the graph joining monomials with a common factor; each extra
/// class needs one minimal relation. Nothing is claimed beyond the bound.
pub fn toric_relations(gens: &[Vec<u32>], degree_bound: u32) -> Vec<Binomial> {
    let r = gens.len();
    if r == 0 || gens.iter().any(|g| g.iter().all(|&v| v == 0)) {
        return Vec::new();
    }
    let mut images: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut m = vec![0u32; r];
    collect_images(gens, 0, degree_bound, &mut m, &mut images);

    let mut out = Vec::new();
    let mut ordered: Vec<Vec<u32>> = images.into_iter().collect();
    ordered.sort_by(|a, b| (total(a), a).cmp(&(total(b), b)));
    for b in ordered {
        let fibre = fibre(gens, &b);
        if fibre.len() < 2 {
            continue;
        }
        let mut parent: Vec<usize> = (0..fibre.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for i in 0..fibre.len() {
            for j in i + 1..fibre.len() {
                if fibre[i].iter().zip(&fibre[j]).any(|(&x, &y)| x > 0 && y > 0) {
                    let (a, c) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = c;
                }
            }
        }
        let mut reps: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for (i, mono) in fibre.iter().enumerate() {
            let root = find(&mut parent, i);
            let better = reps
                .get(&root)
                .is_none_or(|cur| (total(mono), mono) < (total(cur), cur));
            if better {
                reps.insert(root, mono.clone());
            }
        }
        let mut reps: Vec<Vec<u32>> = reps.into_values().collect();
        reps.sort_by(|a, b| (total(a), a).cmp(&(total(b), b)));
        for other in &reps[1..] {
            let rel = Binomial {
                lhs: reps[0].clone(),
                rhs: other.clone(),
            };
            if rel.degree() <= degree_bound {
                out.push(rel);
            }
        }
    }
    out
}

fn collect_images(gens: &[Vec<u32>], from: usize, left: u32, m: &mut Vec<u32>, out: &mut BTreeSet<Vec<u32>>) {
    if total(m) >= 2 {
        out.insert(image(m, gens));
    }
    if left == 0 {
        return;
    }
    for i in from..gens.len() {
        m[i] += 1;
        collect_images(gens, i, left - 1, m, out);
        m[i] -= 1;
    }
}

/// All generator monomials with image `b`.
fn fibre(gens: &[Vec<u32>], b: &[u32]) -> Vec<Vec<u32>> {
    fn go(gens: &[Vec<u32>], from: usize, rest: &mut Vec<u32>, m: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest.iter().all(|&v| v == 0) {
            out.push(m.clone());
            return;
        }
        for i in from..gens.len() {
            if dominates(rest, &gens[i]) {
                for (x, g) in rest.iter_mut().zip(&gens[i]) {
                    *x -= g;
                }
                m[i] += 1;
                go(gens, i, rest, m, out);
                m[i] -= 1;
                for (x, g) in rest.iter_mut().zip(&gens[i]) {
                    *x += g;
                }
            }
        }
    }
    let mut out = Vec::new();
    go(gens, 0, &mut b.to_vec(), &mut vec![0; gens.len()], &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityVerdict {
    pub semistable: bool,
    pub stable: bool,
    /// A closed vertex subset of least `θ`, given when the verdict is not stable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

/// King's criterion for the representation whose nonzero arrows are `support`.
///
/// The proper nonempty vertex subsets `S` closed under supported arrows
/// (`t ∈ S ⇒ h ∈ S`) are exactly the subrepresentations.
pub fn is_theta_semistable(
    s: &MarkedQuiverSetting,
    theta: &StabilityVector,
    support: &[bool],
) -> Result<StabilityVerdict> {
    let ws = WeightSystem::new(s)?;
    let theta = StabilityVector::new(theta.0.clone(), s)?;
    check_support(&ws, support)?;
    let k = ws.vertex_count();
    if k > MAX_STABILITY_VERTICES {
        return Err(Error::Capacity {
            what: "vertex count",
            got: k,
            bound: MAX_STABILITY_VERTICES,
        });
    }
    let edges: Vec<(usize, usize)> = ws
        .arrows()
        .iter()
        .zip(support)
        .filter(|&(a, &on)| on && !a.is_loop())
        .map(|(a, _)| (a.tail, a.head))
        .collect();
    let full = (1u64 << k) - 1;
    let mut best: Option<(i64, u64)> = None;
    for subset in 1..full {
        let closed = edges
            .iter()
            .all(|&(t, h)| subset >> t & 1 == 0 || subset >> h & 1 == 1);
        if !closed {
            continue;
        }
        let value = theta.on(subset);
        if best.is_none_or(|(b, _)| value < b) {
            best = Some((value, subset));
        }
    }
    let min = best.map(|(v, _)| v);
    let semistable = min.is_none_or(|v| v >= 0);
    let stable = min.is_none_or(|v| v > 0);
    let witness = match best {
        Some((_, subset)) if !stable => Some((0..k).filter(|&v| subset >> v & 1 == 1).collect()),
        _ => None,
    };
    Ok(StabilityVerdict {
        semistable,
        stable,
        witness,
    })
}

pub fn is_theta_semistable_rep(r: &Representation, theta: &StabilityVector) -> Result<StabilityVerdict> {
    is_theta_semistable(r.setting(), theta, &r.support())
}

fn check_support(ws: &WeightSystem, support: &[bool]) -> Result<()> {
    if support.len() != ws.arrow_count() {
        return Err(Error::Dimension {
            expected: ws.arrow_count(),
            got: support.len(),
        });
    }
    Ok(())
}

pub fn default_l_bound(theta: &StabilityVector) -> u32 {
    let k = theta.0.len() as u64;
    let s: u64 = theta.0.iter().map(|t| t.unsigned_abs()).sum();
    u32::try_from(s * k).unwrap_or(u32::MAX)
}

/// Whether some semi-invariant monomial of weight `l θ`, `1 ≤ l ≤ l_bound`,
/// lives on the supported arrows (so does not vanish on the representation).
pub fn semistable_via_semiinvariants(
    s: &MarkedQuiverSetting,
    theta: &StabilityVector,
    support: &[bool],
    l_bound: Option<u32>,
) -> Result<bool> {
    let ws = WeightSystem::new(s)?;
    let theta = StabilityVector::new(theta.0.clone(), s)?;
    check_support(&ws, support)?;
    if theta.is_zero() {
        return Ok(true);
    }
    let bound = l_bound.unwrap_or_else(|| default_l_bound(&theta));
    let cols: Vec<usize> = (0..ws.arrow_count()).filter(|&a| support[a]).collect();
    Ok(graded_basis(&ws, &cols, &theta)
        .iter()
        .any(|g| g.degree >= 1 && g.degree <= bound))
}

/// The affine chart `{f ≠ 0}` of the moduli space for one semi-invariant `f`
/// of positive degree. Its coordinate ring is spanned by the Laurent monomials
/// `v ∈ ker W` with `v_a ≥ 0` off the support of `f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjChart {
    pub pivot_index: usize,
    pub pivot: GradedGenerator,
    /// Minimal generators of the chart monoid, as Laurent exponent vectors.
    pub generators: Vec<Vec<i64>>,
    pub smooth: bool,
    pub free_rank: usize,
    /// Rank of the unit group; nonzero means the monoid is not pointed.
    pub units_rank: usize,
}

pub fn proj_charts(s: &MarkedQuiverSetting, theta: &StabilityVector) -> Result<Vec<ProjChart>> {
    let ws = WeightSystem::new(s)?;
    let theta = StabilityVector::new(theta.0.clone(), s)?;
    if theta.is_zero() {
        return Err(Error::Domain(
            "θ = 0 gives the affine quotient; proj charts need θ ≠ 0".into(),
        ));
    }
    let algebra = semi_invariant_generators(s, &theta)?;
    let pivots: Vec<(usize, &GradedGenerator)> = algebra
        .generators
        .iter()
        .enumerate()
        .filter(|(_, g)| g.degree >= 1)
        .collect();
    if pivots.is_empty() {
        return Err(Error::EmptyProj);
    }
    Ok(pivots
        .into_iter()
        .map(|(idx, f)| chart(&ws, idx, f))
        .collect())
}

fn chart(ws: &WeightSystem, pivot_index: usize, f: &GradedGenerator) -> ProjChart {
    let n = ws.arrow_count();
    let inside: Vec<usize> = (0..n).filter(|&a| f.exponents[a] > 0).collect();
    let outside: Vec<usize> = (0..n).filter(|&a| f.exponents[a] == 0).collect();
    // split each inside coordinate into positive and negative parts
    let mut cols: Vec<(usize, i64)> = outside.iter().map(|&a| (a, 1)).collect();
    cols.extend(inside.iter().map(|&a| (a, 1)));
    cols.extend(inside.iter().map(|&a| (a, -1)));
    let mut rows = vec![vec![0i64; cols.len()]; ws.vertex_count()];
    for (c, &(a, sign)) in cols.iter().enumerate() {
        for (row, w) in rows.iter_mut().zip(ws.weight(a)) {
            row[c] = sign * w;
        }
    }
    let mut candidates: BTreeSet<Vec<i64>> = BTreeSet::new();
    for x in hilbert_basis(&rows, cols.len()) {
        let mut v = vec![0i64; n];
        for (c, &(a, sign)) in cols.iter().enumerate() {
            v[a] += sign * i64::from(x[c]);
        }
        if v.iter().any(|&e| e != 0) {
            candidates.insert(v);
        }
    }
    let inside_rows: Vec<Vec<i64>> = inside.iter().map(|&a| ws.weight(a)).collect();
    let units_rank = inside.len() - rank_of_rows(&inside_rows);

    let candidates: Vec<Vec<i64>> = candidates.into_iter().collect();
    let generators = if units_rank == 0 {
        let in_monoid = |v: &[i64]| outside.iter().all(|&a| v[a] >= 0);
        let mut gens: Vec<Vec<i64>> = candidates
            .iter()
            .filter(|v| {
                !candidates.iter().any(|g| {
                    g != *v && {
                        let diff: Vec<i64> = v.iter().zip(g).map(|(x, y)| x - y).collect();
                        in_monoid(&diff)
                    }
                })
            })
            .cloned()
            .collect();
        gens.sort();
        gens
    } else {
        candidates
    };
    let free_rank = rank_of_rows(&generators);
    let smooth = units_rank == 0 && free_rank == generators.len();
    ProjChart {
        pivot_index,
        pivot: f.clone(),
        generators,
        smooth,
        free_rank,
        units_rank,
    }
}

/// Gluing data: chart `to` meets chart `from` where the Laurent monomial
/// `f_to^{l_from} / f_from^{l_to}` is invertible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub exponents: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Atlas {
    pub arrow_legend: Vec<String>,
    /// Generators of the degree-0 subring shared by all charts.
    pub degree_zero: Vec<Vec<u32>>,
    pub charts: Vec<ProjChart>,
    pub transitions: Vec<Transition>,
}

pub fn proj_atlas(s: &MarkedQuiverSetting, theta: &StabilityVector) -> Result<Atlas> {
    let algebra = semi_invariant_generators(s, theta)?;
    let charts = proj_charts(s, theta)?;
    let mut transitions = Vec::new();
    for (i, a) in charts.iter().enumerate() {
        for (j, b) in charts.iter().enumerate() {
            if i == j {
                continue;
            }
            let exponents = a
                .pivot
                .exponents
                .iter()
                .zip(&b.pivot.exponents)
                .map(|(&fa, &fb)| i64::from(fb) * i64::from(a.pivot.degree) - i64::from(fa) * i64::from(b.pivot.degree))
                .collect();
            transitions.push(Transition {
                from: i,
                to: j,
                exponents,
            });
        }
    }
    Ok(Atlas {
        arrow_legend: algebra.arrow_legend.clone(),
        degree_zero: algebra.of_degree(0).into_iter().map(|g| g.exponents.clone()).collect(),
        charts,
        transitions,
    })
}

/// One torus-orbit type in the fibre over the origin of the affine quotient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberStratum {
    /// Arrow indices carrying nonzero values.
    pub support: Vec<usize>,
    pub stable: bool,
    /// `|support| − (k − 1)`; only meaningful when `free_action` holds.
    pub orbit_space_dim: i64,
    /// The weights on the support span the full character lattice, so the
    /// torus modulo scalars acts with finite stabilizers.
    pub free_action: bool,
}

/// Semistable arrow supports on which every invariant vanishes, i.e. the
/// strata of the moduli space lying over the origin.
pub fn central_fiber(s: &MarkedQuiverSetting, theta: &StabilityVector) -> Result<Vec<FiberStratum>> {
    let ws = WeightSystem::new(s)?;
    let theta = StabilityVector::new(theta.0.clone(), s)?;
    let n = ws.arrow_count();
    if n > MAX_FIBER_ARROWS {
        return Err(Error::Capacity {
            what: "arrow count",
            got: n,
            bound: MAX_FIBER_ARROWS,
        });
    }
    let mask = |v: &[u32]| -> u64 {
        v.iter()
            .enumerate()
            .filter(|&(_, &e)| e > 0)
            .fold(0, |m, (a, _)| m | 1 << a)
    };
    let cycles: Vec<u64> = hilbert_basis(&ws.matrix(), n).iter().map(|g| mask(g)).collect();
    let k = ws.vertex_count();
    let mut out = Vec::new();
    for subset in 0u64..1 << n {
        if cycles.iter().any(|&c| c & !subset == 0) {
            continue;
        }
        let support: Vec<bool> = (0..n).map(|a| subset >> a & 1 == 1).collect();
        let verdict = is_theta_semistable(s, &theta, &support)?;
        if !verdict.semistable {
            continue;
        }
        let arrows: Vec<usize> = (0..n).filter(|&a| support[a]).collect();
        let weights: Vec<Vec<i64>> = arrows.iter().map(|&a| ws.weight(a)).collect();
        out.push(FiberStratum {
            orbit_space_dim: arrows.len() as i64 - (k as i64 - 1),
            free_action: rank_of_rows(&weights) + 1 == k,
            support: arrows,
            stable: verdict.stable,
        });
    }
    out.sort_by(|a, b| (a.support.len(), &a.support).cmp(&(b.support.len(), &b.support)));
    Ok(out)
}

/// Whether the semigroups generated by two Hilbert bases are isomorphic,
/// i.e. some bijection of the bases extends to an isomorphism of the
/// generated groups. Isomorphic semigroups give isomorphic toric rings.
pub fn semigroups_isomorphic(a: &[Vec<u32>], b: &[Vec<u32>]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let rows = |g: &[Vec<u32>]| -> Vec<Vec<i64>> {
        g.iter().map(|v| v.iter().map(|&x| i64::from(x)).collect()).collect()
    };
    let (ra, rb) = (rows(a), rows(b));
    if rank_of_rows(&ra) != rank_of_rows(&rb) {
        return false;
    }
    // σ must preserve how often each pairwise sum recurs; colour refinement
    // of that matrix orders and prunes the search
    let (ca, cb) = (collision_matrix(a), collision_matrix(b));
    let (colours_a, colours_b) = refine_colours(&ca, &cb);
    let (mut ha, mut hb) = (colours_a.clone(), colours_b.clone());
    ha.sort_unstable();
    hb.sort_unstable();
    if ha != hb {
        return false;
    }
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by_key(|&i| (colours_a.iter().filter(|&&c| c == colours_a[i]).count(), i));
    let ra: Vec<Vec<i64>> = order.iter().map(|&i| ra[i].clone()).collect();
    let ca: Vec<Vec<usize>> = order.iter().map(|&i| order.iter().map(|&j| ca[i][j]).collect()).collect();
    let colours_a: Vec<usize> = order.iter().map(|&i| colours_a[i]).collect();

    struct Ctx<'a> {
        ra: &'a [Vec<i64>],
        rb: &'a [Vec<i64>],
        ca: &'a [Vec<usize>],
        cb: &'a [Vec<usize>],
        colours_a: &'a [usize],
        colours_b: &'a [usize],
    }
    // a bijection extends to a group isomorphism iff the linear relations
    // agree: the stacked matrix [a_i | b_σ(i)] has the rank of either side
    fn go(ctx: &Ctx, sigma: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let i = sigma.len();
        if i == ctx.ra.len() {
            return true;
        }
        for j in 0..ctx.rb.len() {
            if used[j] || ctx.colours_a[i] != ctx.colours_b[j] {
                continue;
            }
            if sigma.iter().enumerate().any(|(p, &s)| ctx.ca[i][p] != ctx.cb[j][s]) {
                continue;
            }
            sigma.push(j);
            let left: Vec<Vec<i64>> = ctx.ra[..=i].to_vec();
            let right: Vec<Vec<i64>> = sigma.iter().map(|&s| ctx.rb[s].clone()).collect();
            let joint: Vec<Vec<i64>> = left
                .iter()
                .zip(&right)
                .map(|(x, y)| x.iter().chain(y).copied().collect())
                .collect();
            let r = rank_of_rows(&joint);
            if r == rank_of_rows(&left) && r == rank_of_rows(&right) {
                used[j] = true;
                if go(ctx, sigma, used) {
                    return true;
                }
                used[j] = false;
            }
            sigma.pop();
        }
        false
    }
    let ctx = Ctx {
        ra: &ra,
        rb: &rb,
        ca: &ca,
        cb: &cb,
        colours_a: &colours_a,
        colours_b: &colours_b,
    };
    go(&ctx, &mut Vec::new(), &mut vec![false; b.len()])
}

/// Entry `(i, j)` counts the unordered pairs `{k, l}` with `g_k + g_l = g_i + g_j`.
fn collision_matrix(g: &[Vec<u32>]) -> Vec<Vec<usize>> {
    let n = g.len();
    let sum = |i: usize, j: usize| -> Vec<u32> { g[i].iter().zip(&g[j]).map(|(x, y)| x + y).collect() };
    let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            *counts.entry(sum(i, j)).or_default() += 1;
        }
    }
    (0..n).map(|i| (0..n).map(|j| counts[&sum(i, j)]).collect()).collect()
}

/// Joint colour refinement of two weighted complete graphs; equal colours
/// across the two sides mean equal refined signatures.
fn refine_colours(ca: &[Vec<usize>], cb: &[Vec<usize>]) -> (Vec<usize>, Vec<usize>) {
    let n = ca.len();
    let mut col_a: Vec<usize> = (0..n).map(|i| ca[i][i]).collect();
    let mut col_b: Vec<usize> = (0..n).map(|i| cb[i][i]).collect();
    type Sig = (usize, Vec<(usize, usize)>);
    let sig = |c: &[Vec<usize>], col: &[usize], i: usize| -> Sig {
        let mut v: Vec<(usize, usize)> = (0..n).map(|j| (c[i][j], col[j])).collect();
        v.sort_unstable();
        (col[i], v)
    };
    let classes = |v: &[usize]| v.iter().collect::<BTreeSet<_>>().len();
    loop {
        let sa: Vec<Sig> = (0..n).map(|i| sig(ca, &col_a, i)).collect();
        let sb: Vec<Sig> = (0..n).map(|i| sig(cb, &col_b, i)).collect();
        let mut all: Vec<Sig> = sa.iter().chain(&sb).cloned().collect();
        all.sort();
        all.dedup();
        let rank = |s: &Sig| all.binary_search(s).expect("present");
        let new_a: Vec<usize> = sa.iter().map(rank).collect();
        let new_b: Vec<usize> = sb.iter().map(rank).collect();
        let stable = classes(&new_a) == classes(&col_a) && classes(&new_b) == classes(&col_b);
        col_a = new_a;
        col_b = new_b;
        if stable {
            return (col_a, col_b);
        }
    }
}

/// `coeff · path`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathTerm {
    pub coeff: Rational,
    pub path: Path,
}

/// A block matrix of path combinations: block `(r, c)` holds paths from
/// vertex `col_vertices[c]` to vertex `row_vertices[r]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminantalMatrix {
    pub row_vertices: Vec<usize>,
    pub col_vertices: Vec<usize>,
    pub entries: Vec<Vec<Vec<PathTerm>>>,
    pub weight: u32,
}

impl DeterminantalMatrix {
    pub fn new(
        row_vertices: Vec<usize>,
        col_vertices: Vec<usize>,
        entries: Vec<Vec<Vec<PathTerm>>>,
        weight: u32,
    ) -> Result<Self> {
        if entries.len() != row_vertices.len() || entries.iter().any(|r| r.len() != col_vertices.len()) {
            return Err(Error::Shape(format!(
                "entries must form a {}x{} array",
                row_vertices.len(),
                col_vertices.len()
            )));
        }
        Ok(DeterminantalMatrix {
            row_vertices,
            col_vertices,
            entries,
            weight,
        })
    }

    /// Block-diagonal concatenation; the weights add.
    pub fn block_diagonal(&self, other: &DeterminantalMatrix) -> DeterminantalMatrix {
        let mut row_vertices = self.row_vertices.clone();
        row_vertices.extend(&other.row_vertices);
        let mut col_vertices = self.col_vertices.clone();
        col_vertices.extend(&other.col_vertices);
        let (c1, c2) = (self.col_vertices.len(), other.col_vertices.len());
        let mut entries = Vec::new();
        for row in &self.entries {
            let mut r = row.clone();
            r.extend(std::iter::repeat_n(Vec::new(), c2));
            entries.push(r);
        }
        for row in &other.entries {
            let mut r: Vec<Vec<PathTerm>> = std::iter::repeat_n(Vec::new(), c1).collect();
            r.extend(row.iter().cloned());
            entries.push(r);
        }
        DeterminantalMatrix {
            row_vertices,
            col_vertices,
            entries,
            weight: self.weight + other.weight,
        }
    }

    /// The assembled matrix `L(V)`.
    pub fn evaluate(&self, r: &Representation) -> Result<QMatrix> {
        let s = r.setting();
        let k = s.vertex_count();
        for &v in self.row_vertices.iter().chain(&self.col_vertices) {
            if v >= k {
                return Err(Error::Composition(format!("vertex {v} out of range")));
            }
        }
        let offsets = |vs: &[usize]| -> Vec<usize> {
            vs.iter()
                .scan(0usize, |acc, &v| {
                    let at = *acc;
                    *acc += s.dim(v) as usize;
                    Some(at)
                })
                .collect()
        };
        let row_off = offsets(&self.row_vertices);
        let col_off = offsets(&self.col_vertices);
        let rows: usize = self.row_vertices.iter().map(|&v| s.dim(v) as usize).sum();
        let cols: usize = self.col_vertices.iter().map(|&v| s.dim(v) as usize).sum();
        let mut out = QMatrix::zeros(rows, cols);
        for (ri, &rv) in self.row_vertices.iter().enumerate() {
            for (ci, &cv) in self.col_vertices.iter().enumerate() {
                let mut block = QMatrix::zeros(s.dim(rv) as usize, s.dim(cv) as usize);
                for term in &self.entries[ri][ci] {
                    if term.path.start != cv || term.path.end(r.arrows())? != rv {
                        return Err(Error::Composition(format!(
                            "entry ({ri}, {ci}) needs paths from vertex {cv} to vertex {rv}"
                        )));
                    }
                    if term.coeff.is_zero() {
                        continue;
                    }
                    block = block.checked_add(&evaluate_path(r, &term.path)?.scale(&term.coeff))?;
                }
                out.set_block(row_off[ri], col_off[ci], &block);
            }
        }
        Ok(out)
    }
}

/// `det L(V)`.
pub fn evaluate_determinantal_semi_invariant(l: &DeterminantalMatrix, r: &Representation) -> Result<Rational> {
    l.evaluate(r)?.det()
}
