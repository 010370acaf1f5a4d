use hodgekit::descent::{descent_check, hypercover_check, AugmentedSimplicialSpace};
use hodgekit::filtcx::{self, translate, twist};
use hodgekit::finspace::{godement_cohomology, sheaf_cohomology, FinitePoset, PosetSheaf};
use hodgekit::generate::{
    invalid_instance, random_cc_sheaf, random_hodge_complex, random_stratified_poset, rng, HodgeSize, DEFECTS,
};
use hodgekit::hodge::{theorem1, validate_hodge_complex};
use hodgekit::json::{HodgeComplexJson, InstanceBundle, Kind, SheafJson};
use hodgekit::qlinalg::Sparse;
use hodgekit::specseq::SpectralSequence;
use hodgekit::{Matrix, Q};
use proptest::prelude::*;

fn small() -> HodgeSize {
    HodgeSize { max_dim: 12, max_amplitude: 3, max_weight_jumps: 3 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sparse_rank_matches_dense(rows in 1usize..7, cols in 1usize..7, entries in prop::collection::vec((0usize..7, 0usize..7, -3i64..=3), 0..30)) {
        let mut s = Sparse::<Q>::new(rows, cols);
        for (r, c, v) in entries {
            if r < rows && c < cols {
                s.push(r, c, Q::from(v));
            }
        }
        prop_assert_eq!(s.rank(), s.to_dense().rank());
    }

    #[test]
    fn rank_plus_nullity(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let entries: Vec<i64> = (0..rows * cols).map(|_| rand::Rng::gen_range(&mut r, -2..=2)).collect();
        let m = Matrix::<Q>::from_ints(rows, cols, &entries);
        prop_assert_eq!(m.rank() + m.kernel().dim(), cols);
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn generated_complexes_satisfy_theorem_one(seed in any::<u64>()) {
        let (a, how) = random_hodge_complex(&mut rng(seed), &small());
        let v = validate_hodge_complex(&a);
        prop_assert!(v.is_ok(), "{:?}: {:?}", how, v.err());
        prop_assert!(theorem1(&v.unwrap()).certified());
    }

    #[test]
    fn translation_and_twist_preserve_validity(seed in any::<u64>(), i in -3i32..=3, p in -2i32..=2, q in -2i32..=2) {
        let (a, _) = random_hodge_complex(&mut rng(seed), &small());
        let b = twist(&translate(&a, i), p, q);
        prop_assert!(validate_hodge_complex(&b).is_ok());
        let betti_a: Vec<usize> = a.complex.degrees().map(|n| a.complex.betti(n)).collect();
        let betti_b: Vec<usize> = b.complex.degrees().map(|n| b.complex.betti(n)).collect();
        prop_assert_eq!(betti_a, betti_b);
    }

    #[test]
    fn direct_sums_of_valid_complexes_are_valid(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, _) = random_hodge_complex(&mut rng(s1), &small());
        let (b, _) = random_hodge_complex(&mut rng(s2), &small());
        prop_assert!(validate_hodge_complex(&filtcx::direct_sum(&a, &b)).is_ok());
    }

    #[test]
    fn stable_page_matches_cohomology(seed in any::<u64>()) {
        let (a, _) = random_hodge_complex(&mut rng(seed), &small());
        for filt in [&a.w, &a.f, &a.fbar] {
            let ss = SpectralSequence::new(&a.complex, filt);
            prop_assert!(ss.check_page_consistency());
            prop_assert!(ss.dimension_count(ss.stable_page()).equal);
            prop_assert!(ss.dimension_count(0).inequality_holds);
        }
    }

    #[test]
    fn hodge_bundles_round_trip(seed in any::<u64>()) {
        let (a, _) = random_hodge_complex(&mut rng(seed), &small());
        let b = InstanceBundle::new(Kind::HodgeComplex, Some(seed), &HodgeComplexJson::from_trifiltered(&a));
        let text = b.to_json();
        let back = InstanceBundle::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        let t = back.payload::<HodgeComplexJson>().unwrap().to_trifiltered().unwrap();
        prop_assert!(t.same_as(&a));
    }

    #[test]
    fn invalid_instances_never_validate(seed in any::<u64>(), k in 0usize..5) {
        let inst = invalid_instance(&mut rng(seed), DEFECTS[k]);
        if let Ok(t) = inst.data.to_trifiltered() {
            prop_assert!(validate_hodge_complex(&t).is_err());
        }
    }

    #[test]
    fn godement_agrees_with_chain_cohomology(seed in any::<u64>()) {
        let mut r = rng(seed);
        let strat = random_stratified_poset(&mut r, 6, 3);
        let f = random_cc_sheaf(&mut r, &strat, 2);
        let h = sheaf_cohomology(&f);
        let g = godement_cohomology(&f, h.len() + 1);
        prop_assert_eq!(&g[..h.len()], &h[..]);
        prop_assert!(g[h.len()..].iter().all(|&d| d == 0));
    }

    #[test]
    fn sheaf_bundles_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let strat = random_stratified_poset(&mut r, 6, 3);
        let f = random_cc_sheaf(&mut r, &strat, 2);
        let j = SheafJson::from_sheaf(&f, Some(&strat));
        let b = InstanceBundle::new(Kind::Sheaf, Some(seed), &j);
        let text = b.to_json();
        let back: SheafJson = InstanceBundle::from_json(&text).unwrap().payload().unwrap();
        let g = back.to_sheaf().unwrap();
        prop_assert_eq!(g.stalks(), f.stalks());
        prop_assert_eq!(g.cover_maps(), f.cover_maps());
    }
}

#[test]
fn cech_cover_missing_a_point_fails_descent() {
    // X = {0 < 1}, X_0 = {1}; the sheaf lives on the closed point only
    let x = FinitePoset::chain(2);
    let x0 = FinitePoset::point();
    let c = AugmentedSimplicialSpace::cech(&x, &x0, &[1], 3).unwrap();
    assert!(!hypercover_check(&c).holds);
    let covers = [((0, 1), Matrix::zeros(0, 1))].into_iter().collect();
    let f = PosetSheaf::new(x.clone(), vec![1, 0], covers).unwrap();
    let rep = descent_check(&c, &f, 2).unwrap();
    assert!(!rep.holds);
    let opens: Vec<Option<usize>> = rep.failures.iter().map(|f| f.0).collect();
    assert!(opens.contains(&Some(0)) && opens.contains(&None) && !opens.contains(&Some(1)), "{:?}", rep.failures);
    assert!(descent_check(&c, &PosetSheaf::constant(&x, 1), 2).unwrap().holds);
}

#[test]
fn cech_cover_by_maximal_down_sets_is_a_hypercover() {
    let x = FinitePoset::circle();
    let maximal = x.maximal();
    let parts: Vec<FinitePoset> = maximal.iter().map(|&m| x.subposet(&x.down_set(m))).collect();
    let (x0, _) = FinitePoset::disjoint_union(&parts);
    let eps: Vec<usize> = maximal.iter().flat_map(|&m| x.down_set(m)).collect();
    let c = AugmentedSimplicialSpace::cech(&x, &x0, &eps, 3).unwrap();
    assert!(hypercover_check(&c).holds);
    let rep = descent_check(&c, &PosetSheaf::constant(&x, 1), 2).unwrap();
    assert!(rep.holds, "{:?}", rep.failures);
}
