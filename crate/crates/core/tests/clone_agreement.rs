use infinialg_core::gallery::{affine_clone_zmod, affine_presentation};
use infinialg_core::oracle::brute_clone_iso_search;
use infinialg_core::{free_clone, parse_presentation, SearchBudget};

#[test]
fn affine_presentations_saturate_to_coefficient_clones() {
    let budget = SearchBudget::default();
    for m in [2, 3] {
        let p = parse_presentation(&affine_presentation(m)).unwrap();
        let (free, _) = free_clone(&p, 2, 6, &budget).unwrap();
        let direct = affine_clone_zmod(m, 2).unwrap();
        assert_eq!(free.sizes(), direct.sizes(), "Z/{m}");
        let iso = brute_clone_iso_search(&free, &direct, &budget).unwrap();
        assert!(iso.is_some(), "no clone isomorphism for Z/{m}");
    }
}
