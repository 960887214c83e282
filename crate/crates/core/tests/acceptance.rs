//! Acceptance gate: one PASS/FAIL line per criterion, each with a pinned time
//! limit. Runs as a plain binary (`harness = false`) and exits nonzero when a
//! hard criterion fails.
//!
//! `QSING_BUDGET_SECS` caps the dimension-6 enumeration (default 3600).

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsing_core::classification::{
    defect, enumerate_reduced_singular, enumerate_with_progress, expected_dim, singularity_types, EnumerationConfig,
};
use qsing_core::conifold::{
    basis_table, clifford_check, d_element, defining_relations, is_central, trep2_jacobian_rank, trep2_sample,
    verify_battery, ConifoldElement, Letter, Trep2Point,
};
use qsing_core::fixtures;
use qsing_core::linalg::{rat, QMatrix};
use qsing_core::local::{classify_point, local_setting, DecompositionType};
use qsing_core::quiver::canonical_key;
use qsing_core::reduction::{reduce, reduce_by, ReduceOptions};
use qsing_core::sampling::{
    random_all_ones, random_simple_admitting, random_strongly_connected, random_support, random_theta, SettingBounds,
};
use qsing_core::toric::{
    central_fiber, invariant_generators, is_theta_semistable, proj_charts, semistable_via_semiinvariants,
    toric_relations, StabilityVector, DEFAULT_RELATION_DEGREE,
};
use qsing_core::MarkedQuiverSetting;

const SEED: u64 = 20_240_601;

enum Verdict {
    Pass,
    Fail,
    /// Reported but does not fail the gate.
    SoftFail,
}

struct Outcome {
    verdict: Verdict,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        verdict: Verdict::Pass,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        verdict: Verdict::Fail,
        detail: detail.into(),
    }
}

fn verdict(ok: bool, detail: impl Into<String>) -> Outcome {
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn key(s: &MarkedQuiverSetting) -> Vec<u8> {
    canonical_key(s).expect("small setting").as_bytes().to_vec()
}

fn theta(t: &[i64]) -> StabilityVector {
    StabilityVector(t.to_vec())
}

fn criterion_1() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, s, dim_x, want) in fixtures::quantum_plane_defects() {
        let start = Instant::now();
        let got = defect(&s, dim_x);
        let took = start.elapsed();
        ok &= got == want && took < Duration::from_millis(1);
        lines.push(format!("{name}={got} (want {want}, {:?})", took));
    }
    verdict(ok, lines.join(", "))
}

fn criterion_2() -> Outcome {
    let found = enumerate_reduced_singular(3, &EnumerationConfig::default()).expect("no budget");
    let ok = found.len() == 1 && key(&found[0]) == key(&fixtures::conifold());
    verdict(ok, format!("{} setting(s), conifold match = {ok}", found.len()))
}

/// Dimension of the space of quadratic relations among `gens`, counted
/// directly as (#quadratic monomials) − (#distinct exponent sums).
fn quadric_space_dim(gens: &[Vec<u32>]) -> usize {
    let mut images = BTreeSet::new();
    let mut monomials = 0;
    for i in 0..gens.len() {
        for j in i..gens.len() {
            monomials += 1;
            images.insert(gens[i].iter().zip(&gens[j]).map(|(a, b)| a + b).collect::<Vec<u32>>());
        }
    }
    monomials - images.len()
}

fn criterion_3() -> Outcome {
    let found = enumerate_reduced_singular(4, &EnumerationConfig::default()).expect("no budget");
    let want: BTreeSet<Vec<u8>> = [fixtures::dim4_two_vertex(), fixtures::dim4_triangle(), fixtures::dim4_double_cycle()]
        .iter()
        .map(key)
        .collect();
    let got: BTreeSet<Vec<u8>> = found.iter().map(key).collect();
    let settings_ok = found.len() == 3 && got == want;

    // two arrows one way and three back: 2×2 minors of a 2×3 arrangement
    let gens = invariant_generators(&fixtures::dim4_two_vertex()).expect("toric");
    let rels = toric_relations(&gens, DEFAULT_RELATION_DEGREE);
    let minors_ok = gens.len() == 6 && rels.len() == 3 && rels.iter().all(|r| r.degree() == 2 && r.holds(&gens));

    // triangle: the single relation x₄x₅ = x₁x₂x₃
    let gens = invariant_generators(&fixtures::dim4_triangle()).expect("toric");
    let rels = toric_relations(&gens, DEFAULT_RELATION_DEGREE);
    let sizes = |r: &qsing_core::toric::Binomial| {
        let mut v = [r.lhs.iter().sum::<u32>(), r.rhs.iter().sum::<u32>()];
        v.sort_unstable();
        v
    };
    let triangle_ok = gens.len() == 5 && rels.len() == 1 && sizes(&rels[0]) == [2, 3] && rels[0].holds(&gens);

    // doubled 3-cycle: 8 generators, 6 quadratic binomials claimed
    let gens = invariant_generators(&fixtures::dim4_double_cycle()).expect("toric");
    let rels = toric_relations(&gens, DEFAULT_RELATION_DEGREE);
    let quadrics = rels.iter().filter(|r| r.degree() == 2).count();
    let direct = quadric_space_dim(&gens);
    let double_ok = gens.len() == 8 && quadrics == 6 && rels.len() == 6;

    verdict(
        settings_ok && minors_ok && triangle_ok && double_ok,
        format!(
            "settings {}/3 matched; two-vertex minors {minors_ok}; triangle relation {triangle_ok}; \
             doubled 3-cycle: {} generators, {} minimal relations ({quadrics} quadratic; direct count of the \
             quadric space gives {direct}), expected 8 generators and 6 quadrics",
            got.intersection(&want).count(),
            gens.len(),
            rels.len(),
        ),
    )
}

fn criterion_4_dim5() -> Outcome {
    let found = enumerate_reduced_singular(5, &EnumerationConfig::default()).expect("no budget");
    let types = singularity_types(&found);
    let merged: Vec<String> = types
        .iter()
        .filter(|g| g.len() > 1)
        .map(|g| g.iter().map(|&i| found[i].to_string()).collect::<Vec<_>>().join(" ~ "))
        .collect();
    verdict(
        types.len() == 10,
        format!(
            "{} singularity types (want 10) from {} settings up to vertex relabelling; identified: [{}]",
            types.len(),
            found.len(),
            merged.join("; ")
        ),
    )
}

fn criterion_4_dim6(budget: Duration) -> Outcome {
    let config = EnumerationConfig {
        budget: Some(budget),
        progress: None,
    };
    let out = match enumerate_with_progress(6, &config) {
        Ok(o) => o,
        Err(e) => return fail(e.to_string()),
    };
    if !out.complete {
        return Outcome {
            verdict: Verdict::SoftFail,
            detail: format!(
                "budget exhausted after {}/{} partitions ({} settings so far)",
                out.partitions_completed,
                out.partitions_total,
                out.settings.len()
            ),
        };
    }
    let types = singularity_types(&out.settings);
    let non_toric = out.settings.iter().filter(|s| !s.all_ones()).count();
    let detail = format!(
        "{} settings up to vertex relabelling, {} types ({} of them not toric, kept apart); want 53",
        out.settings.len(),
        types.len(),
        non_toric
    );
    if types.len() == 53 {
        return pass(detail);
    }
    let report = serde_json::json!({
        "dimension": 6,
        "expected_types": 53,
        "settings_up_to_relabelling": out.settings.len(),
        "types": types.iter().map(|g| g.iter().map(|&i| &out.settings[i]).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("dim6_count_diff.json");
    let written = std::fs::write(&path, serde_json::to_string_pretty(&report).expect("serializable")).is_ok();
    Outcome {
        verdict: Verdict::SoftFail,
        detail: format!(
            "{detail}; diff report {}",
            if written { path.display().to_string() } else { "could not be written".into() }
        ),
    }
}

fn criterion_5() -> Outcome {
    let gens = invariant_generators(&fixtures::conifold()).expect("toric");
    // the four 2-cycles x3x2, x3y2, y3x2, y3y2
    let want: BTreeSet<Vec<u32>> = [(0, 2), (0, 3), (1, 2), (1, 3)]
        .iter()
        .map(|&(a, b)| {
            let mut v = vec![0; 4];
            v[a] = 1;
            v[b] = 1;
            v
        })
        .collect();
    let rels = toric_relations(&gens, DEFAULT_RELATION_DEGREE);
    let ok = gens.iter().cloned().collect::<BTreeSet<_>>() == want
        && gens.len() == 4
        && rels.len() == 1
        && rels[0].degree() == 2
        && rels[0].holds(&gens);
    verdict(ok, format!("{} generators, {} relation(s)", gens.len(), rels.len()))
}

/// Chart generators expected at the pivot arrow `p`: the other arrows of the
/// same weight over `p`, and `p` times each arrow of the opposite weight.
fn expected_chart(p: usize, same: &[usize], back: &[usize]) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    for &b in same.iter().filter(|&&b| b != p) {
        let mut v = vec![0i64; 4];
        v[b] += 1;
        v[p] -= 1;
        out.insert(v);
    }
    for &c in back {
        let mut v = vec![0i64; 4];
        v[p] += 1;
        v[c] += 1;
        out.insert(v);
    }
    out
}

fn moduli_side(t: &[i64], same: &[usize], back: &[usize]) -> (bool, String) {
    let c = fixtures::conifold();
    let charts = proj_charts(&c, &theta(t)).expect("conifold charts");
    let mut ok = charts.len() == 2;
    let mut pivots = Vec::new();
    for ch in &charts {
        let p = ch.pivot.exponents.iter().position(|&e| e == 1).expect("pivot is an arrow");
        pivots.push(p);
        let gens: BTreeSet<Vec<i64>> = ch.generators.iter().cloned().collect();
        ok &= ch.smooth && ch.free_rank == 3 && ch.pivot.exponents.iter().sum::<u32>() == 1;
        ok &= gens == expected_chart(p, same, back);
    }
    pivots.sort_unstable();
    ok &= pivots == same;
    let fiber = central_fiber(&c, &theta(t)).expect("conifold fibre");
    let stable: Vec<Vec<usize>> = fiber.iter().filter(|f| f.stable).map(|f| f.support.clone()).collect();
    let max_dim = fiber.iter().filter(|f| f.free_action).map(|f| f.orbit_space_dim).max();
    let want_supports = vec![vec![same[0]], vec![same[1]], same.to_vec()];
    ok &= stable == want_supports && max_dim == Some(1);
    (
        ok,
        format!("θ={t:?}: {} charts on arrows {pivots:?}, stable supports {stable:?}, fibre dim {max_dim:?}", charts.len()),
    )
}

fn criterion_6() -> Outcome {
    // arrows 0, 1 go from vertex 0 to 1, arrows 2, 3 come back
    let (ok1, d1) = moduli_side(&[-1, 1], &[0, 1], &[2, 3]);
    let (ok2, d2) = moduli_side(&[1, -1], &[2, 3], &[0, 1]);
    verdict(ok1 && ok2, format!("{d1}; {d2}"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let bounds = SettingBounds::default();
    let mut agree = 0;
    let total = 500;
    for _ in 0..total {
        let s = random_strongly_connected(&mut rng, &bounds);
        let mut c1 = ChaCha8Rng::seed_from_u64(rng.gen());
        let mut c2 = ChaCha8Rng::seed_from_u64(rng.gen());
        let a = reduce_by(&s, ReduceOptions::default(), |m| c1.gen_range(0..m.len()));
        let b = reduce_by(&s, ReduceOptions::default(), |m| c2.gen_range(0..m.len()));
        if key(&a.reduced) == key(&b.reduced) && a.z == b.z {
            agree += 1;
        }
    }
    verdict(agree == total, format!("{agree}/{total} reduction-order pairs agree"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut agree = 0;
    let total = 1000;
    for _ in 0..total {
        let s = random_all_ones(&mut rng, 4, 7, false);
        let t = theta(&random_theta(&mut rng, s.dims(), 3));
        let support = random_support(&mut rng, s.arrow_count() as usize, 0.6);
        let king = is_theta_semistable(&s, &t, &support).expect("small setting").semistable;
        let semi = semistable_via_semiinvariants(&s, &t, &support, None).expect("small setting");
        if king == semi {
            agree += 1;
        }
    }
    verdict(agree == total, format!("{agree}/{total} triples agree"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let bounds = SettingBounds::default();
    let mut bookkeeping = 0;
    for _ in 0..500 {
        let s = random_simple_admitting(&mut rng, &bounds);
        let r = reduce(&s);
        if expected_dim(&s) == expected_dim(&r.reduced) + r.z as i64 {
            bookkeeping += 1;
        }
    }
    let mut arrows = 0;
    for _ in 0..200 {
        let s = random_all_ones(&mut rng, 6, 12, true);
        let k = s.vertex_count() as i64;
        if i64::from(s.arrow_count()) - k + 1 == 1 - s.euler_self() && expected_dim(&s) == i64::from(s.arrow_count()) - k + 1 {
            arrows += 1;
        }
    }
    verdict(
        bookkeeping == 500 && arrows == 200,
        format!("bookkeeping {bookkeeping}/500, arrow count {arrows}/200"),
    )
}

fn sl2(u: &[qsing_core::linalg::Rational; 3]) -> QMatrix {
    QMatrix::from_rows(vec![vec![u[0].clone(), u[1].clone()], vec![u[2].clone(), -u[0].clone()]]).expect("2x2")
}

/// The relations and `D² = 4(z² − xy)` checked on the 2×2 matrices of a point.
fn matrix_oracle(p: &Trep2Point) -> bool {
    let (x, y, z) = (sl2(&p.x), sl2(&p.y), sl2(&p.z));
    let rels = defining_relations(&x, &y, &z).expect("2x2");
    let xx = &x * &x;
    let yy = &y * &y;
    let half = rat(1) / rat(2);
    let zc = (&(&x * &y) + &(&y * &x)).scale(&half);
    let minus = |a: &QMatrix, b: &QMatrix| a.checked_add(&b.scale(&rat(-1))).expect("same shape");
    let d = minus(&(&(&x * &y) * &z), &(&(&y * &x) * &z));
    let want = minus(&(&zc * &zc), &(&xx * &yy)).scale(&rat(4));
    rels.iter().all(QMatrix::is_zero) && &d * &d == want
}

fn criterion_10() -> Outcome {
    let report = verify_battery(SEED, 200);
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();

    let d = d_element();
    let d_central = is_central(&d);
    let table = basis_table();
    let closure = table.iter().flatten().count() == 64;
    let letters = [Letter::X, Letter::Y, Letter::Z];
    let mut clifford = 0;
    for &l in &letters {
        for &m in &letters {
            if clifford_check(&ConifoldElement::letter(l), &ConifoldElement::letter(m)) == Ok(true) {
                clifford += 1;
            }
        }
    }
    let points = trep2_sample(100, SEED);
    let rank3 = points.iter().filter(|p| trep2_jacobian_rank(p) == Ok(3)).count();
    let oracle = points.iter().filter(|p| matrix_oracle(p)).count();
    verdict(
        failed.is_empty() && d_central && closure && clifford == 9 && rank3 == 100 && oracle == 100,
        format!(
            "battery checks {}/{} passed {failed:?}; Clifford pairs {clifford}/9; trep2 rank 3 on {rank3}/100, \
             matrix relations and D² on {oracle}/100",
            report.checks.len() - failed.len(),
            report.checks.len()
        ),
    )
}

fn criterion_11() -> Outcome {
    let c = fixtures::conifold();
    let split = local_setting(&c, &DecompositionType::new(vec![(1, vec![1, 0]), (1, vec![0, 1])])).expect("local");
    let simple_tau = DecompositionType::new(vec![(1, vec![1, 1])]);
    let simple = local_setting(&c, &simple_tau).expect("local");
    let report = classify_point(&c, &simple_tau).expect("classify");
    let ok = key(&split) == key(&c)
        && simple == MarkedQuiverSetting::single_vertex(1, 3, 0)
        && report.smooth
        && report.azumaya;
    verdict(ok, format!("split point {split}, simple point {simple}, smooth={} azumaya={}", report.smooth, report.azumaya))
}

fn main() {
    let budget = std::env::var("QSING_BUDGET_SECS")
        .ok()
        .and_then(|v| v.parse().ok())
        .map(Duration::from_secs)
        .unwrap_or(Duration::from_secs(3600));

    type Criterion = Box<dyn Fn() -> Outcome>;
    let criteria: Vec<(&str, Duration, Criterion)> = vec![
        ("1  defect fixtures", Duration::from_millis(50), Box::new(criterion_1)),
        ("2  dimension-3 classification", Duration::from_secs(10), Box::new(criterion_2)),
        ("3  dimension-4 classification", Duration::from_secs(60), Box::new(criterion_3)),
        ("4  dimension-5 count", Duration::from_secs(600), Box::new(criterion_4_dim5)),
        ("4  dimension-6 count (stretch)", budget + Duration::from_secs(60), Box::new(move || criterion_4_dim6(budget))),
        ("5  conifold invariants", Duration::from_secs(1), Box::new(criterion_5)),
        ("6  conifold moduli and flop", Duration::from_secs(5), Box::new(criterion_6)),
        ("7  confluence", Duration::from_secs(120), Box::new(criterion_7)),
        ("8  King vs semi-invariants", Duration::from_secs(120), Box::new(criterion_8)),
        ("9  dimension bookkeeping", Duration::from_secs(60), Box::new(criterion_9)),
        ("10 conifold algebra battery", Duration::from_secs(30), Box::new(criterion_10)),
        ("11 local quiver self-similarity", Duration::from_secs(1), Box::new(criterion_11)),
    ];

    let mut hard_failures = 0;
    for (name, limit, run) in &criteria {
        let start = Instant::now();
        let mut out = run();
        let took = start.elapsed();
        if took > *limit && matches!(out.verdict, Verdict::Pass) {
            out.verdict = Verdict::Fail;
            out.detail = format!("{} (time limit exceeded)", out.detail);
        }
        let tag = match out.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => {
                hard_failures += 1;
                "FAIL"
            }
            Verdict::SoftFail => "SOFT-FAIL",
        };
        println!("{tag:<9} [{name}] {} ({:.3}s, limit {}s)", out.detail, took.as_secs_f64(), limit.as_secs_f64());
    }
    println!("acceptance: {} of {} criteria failed", hard_failures, criteria.len());
    if hard_failures > 0 {
        std::process::exit(1);
    }
}
