use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsing_core::classification::expected_dim;
use qsing_core::conifold::{random_element, ConifoldElement};
use qsing_core::hilbert::{hilbert_basis, is_minimal, is_n_combination};
use qsing_core::linalg::{rank_of_rows, rat, QMatrix, Rational};
use qsing_core::quiver::canonical_key;
use qsing_core::reduction::{reduce, reduce_by, ReduceOptions};
use qsing_core::sampling::{
    random_all_ones, random_setting, random_simple_admitting, random_strongly_connected, random_support, random_theta,
    SettingBounds,
};
use qsing_core::toric::{
    evaluate_determinantal_semi_invariant, is_theta_semistable, proj_charts, semistable_via_semiinvariants,
    DeterminantalMatrix, PathTerm, StabilityVector, WeightSystem,
};
use qsing_core::{DimVector, MarkedQuiverSetting, Path, Representation};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// χ(β, γ) summed arrow by arrow, as an independent check on the matrix form.
fn euler_by_arrows(s: &MarkedQuiverSetting, b: &[u32], g: &[u32]) -> i64 {
    let diag: i64 = b.iter().zip(g).map(|(&x, &y)| i64::from(x) * i64::from(y)).sum();
    let arrows: i64 = s
        .arrow_list()
        .iter()
        .map(|a| i64::from(b[a.tail]) * i64::from(g[a.head]))
        .sum();
    diag - arrows
}

fn random_dimvector(r: &mut ChaCha8Rng, k: usize) -> Vec<u32> {
    (0..k).map(|_| r.gen_range(0..4)).collect()
}

fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_permutations(k - 1) {
        for pos in 0..k {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn brute_isomorphic(a: &MarkedQuiverSetting, b: &MarkedQuiverSetting) -> bool {
    a.vertex_count() == b.vertex_count()
        && all_permutations(a.vertex_count())
            .iter()
            .any(|p| a.permute(p).unwrap() == *b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn euler_form_is_bilinear_and_counts_arrows(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_setting(&mut r, &SettingBounds::default());
        let k = s.vertex_count();
        let (b1, b2, g) = (random_dimvector(&mut r, k), random_dimvector(&mut r, k), random_dimvector(&mut r, k));
        let sum: Vec<u32> = b1.iter().zip(&b2).map(|(x, y)| x + y).collect();
        let chi = |x: &[u32], y: &[u32]| s.euler_form(&DimVector(x.to_vec()), &DimVector(y.to_vec())).unwrap();
        prop_assert_eq!(chi(&sum, &g), chi(&b1, &g) + chi(&b2, &g));
        prop_assert_eq!(chi(&g, &sum), chi(&g, &b1) + chi(&g, &b2));
        prop_assert_eq!(chi(&b1, &g), euler_by_arrows(&s, &b1, &g));
    }

    #[test]
    fn canonical_key_is_permutation_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_setting(&mut r, &SettingBounds::default());
        let mut perm: Vec<usize> = (0..s.vertex_count()).collect();
        perm.shuffle(&mut r);
        prop_assert_eq!(canonical_key(&s).unwrap(), canonical_key(&s.permute(&perm).unwrap()).unwrap());
    }

    #[test]
    fn canonical_key_separates_non_isomorphic(seed in any::<u64>()) {
        let mut r = rng(seed);
        let bounds = SettingBounds { max_vertices: 4, max_dim: 2, max_multiplicity: 2, density: 0.4, marks: true };
        let a = random_setting(&mut r, &bounds);
        let b = random_setting(&mut r, &bounds);
        prop_assert_eq!(
            canonical_key(&a).unwrap() == canonical_key(&b).unwrap(),
            brute_isomorphic(&a, &b)
        );
    }

    #[test]
    fn reduction_is_confluent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_strongly_connected(&mut r, &SettingBounds::default());
        let mut c1 = rng(seed ^ 1);
        let mut c2 = rng(seed ^ 2);
        let x = reduce_by(&s, ReduceOptions::default(), |m| c1.gen_range(0..m.len()));
        let y = reduce_by(&s, ReduceOptions::default(), |m| c2.gen_range(0..m.len()));
        prop_assert_eq!(canonical_key(&x.reduced).unwrap(), canonical_key(&y.reduced).unwrap());
        prop_assert_eq!(x.z, y.z);
    }

    #[test]
    fn reduction_keeps_dimension_bookkeeping(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_simple_admitting(&mut r, &SettingBounds::default());
        let red = reduce(&s);
        prop_assert_eq!(expected_dim(&s), expected_dim(&red.reduced) + red.z as i64);
    }

    #[test]
    fn all_ones_expected_dim_counts_arrows(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_all_ones(&mut r, 5, 10, true);
        let k = s.vertex_count() as i64;
        prop_assert_eq!(i64::from(s.arrow_count()) - k + 1, 1 - s.euler_self());
    }

    #[test]
    fn king_agrees_with_semi_invariants(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_all_ones(&mut r, 4, 7, false);
        let theta = StabilityVector(random_theta(&mut r, s.dims(), 3));
        let support = random_support(&mut r, s.arrow_count() as usize, 0.6);
        let king = is_theta_semistable(&s, &theta, &support).unwrap().semistable;
        prop_assert_eq!(king, semistable_via_semiinvariants(&s, &theta, &support, None).unwrap());
        // one semi-invariant degree suffices in the toric case
        prop_assert_eq!(king, semistable_via_semiinvariants(&s, &theta, &support, Some(1)).unwrap());
    }

    #[test]
    fn hilbert_basis_is_minimal_and_generating(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rows = r.gen_range(1..=2);
        let n = r.gen_range(2..=4);
        let a: Vec<Vec<i64>> = (0..rows).map(|_| (0..n).map(|_| r.gen_range(-3..=3)).collect()).collect();
        let hb = hilbert_basis(&a, n);
        prop_assert!(is_minimal(&hb));
        for g in &hb {
            for row in &a {
                prop_assert_eq!(row.iter().zip(g).map(|(c, &x)| c * i64::from(x)).sum::<i64>(), 0);
            }
        }
        // every solution with entries ≤ 4 is generated
        let mut x = vec![0u32; n];
        loop {
            let solves = a.iter().all(|row| row.iter().zip(&x).map(|(c, &v)| c * i64::from(v)).sum::<i64>() == 0);
            if solves {
                prop_assert!(is_n_combination(&x, &hb), "{:?} not generated by {:?}", x, hb);
            }
            let mut i = 0;
            while i < n && x[i] == 4 {
                x[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
            x[i] += 1;
        }
    }

    #[test]
    fn conifold_product_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (random_element(&mut r, 1), random_element(&mut r, 1), random_element(&mut r, 1));
        prop_assert_eq!(a.multiply(&b).multiply(&c), a.multiply(&b.multiply(&c)));
        prop_assert_eq!(ConifoldElement::one().multiply(&a), a);
    }

    #[test]
    fn determinantal_semi_invariants_multiply(seed in any::<u64>()) {
        let mut r = rng(seed);
        // two dimension-2 vertices, two arrows from 0 to 1
        let s = MarkedQuiverSetting::unmarked(vec![2, 2], vec![vec![0, 2], vec![0, 0]]).unwrap();
        let mut entry = || rat(r.gen_range(-4..=4));
        let mats: Vec<QMatrix> = (0..2)
            .map(|_| QMatrix::from_rows(vec![vec![entry(), entry()], vec![entry(), entry()]]).unwrap())
            .collect();
        let rep = Representation::new(s, mats.clone()).unwrap();
        let term = |a: usize| vec![PathTerm { coeff: rat(1), path: Path::new(0, vec![a]) }];
        let l0 = DeterminantalMatrix::new(vec![1], vec![0], vec![vec![term(0)]], 1).unwrap();
        let l1 = DeterminantalMatrix::new(vec![1], vec![0], vec![vec![term(1)]], 1).unwrap();
        let det2 = |m: &QMatrix| -> Rational {
            let e = |i: usize, j: usize| m[(i, j)].clone();
            e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0)
        };
        let d0 = evaluate_determinantal_semi_invariant(&l0, &rep).unwrap();
        let d1 = evaluate_determinantal_semi_invariant(&l1, &rep).unwrap();
        prop_assert_eq!(&d0, &det2(&mats[0]));
        prop_assert_eq!(&d1, &det2(&mats[1]));
        let both = evaluate_determinantal_semi_invariant(&l0.block_diagonal(&l1), &rep).unwrap();
        prop_assert_eq!(both, d0 * d1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn chart_monoids_have_the_moduli_dimension(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_all_ones(&mut r, 3, 6, true);
        let theta = StabilityVector(random_theta(&mut r, s.dims(), 2));
        prop_assume!(!theta.is_zero());
        let dim = expected_dim(&s);
        let Ok(charts) = proj_charts(&s, &theta) else { return Ok(()); };
        let n = WeightSystem::new(&s).unwrap().arrow_count();
        for c in &charts {
            prop_assert!(c.generators.iter().all(|g| g.len() == n));
            prop_assert_eq!(rank_of_rows(&c.generators) as i64, dim);
            if c.smooth {
                prop_assert_eq!(c.free_rank as i64, dim);
            }
        }
    }
}

#[test]
fn canonical_key_exhaustive_on_six_vertices() {
    let s = MarkedQuiverSetting::new(
        vec![1, 2, 1, 3, 1, 2],
        vec![
            vec![0, 1, 0, 0, 0, 2],
            vec![0, 1, 1, 0, 0, 0],
            vec![0, 0, 0, 3, 0, 0],
            vec![1, 0, 0, 0, 1, 0],
            vec![0, 0, 1, 0, 0, 1],
            vec![1, 0, 0, 0, 0, 0],
        ],
        vec![0, 1, 0, 0, 0, 0],
    )
    .unwrap();
    let key = canonical_key(&s).unwrap();
    for p in all_permutations(6) {
        assert_eq!(canonical_key(&s.permute(&p).unwrap()).unwrap(), key);
    }
}
