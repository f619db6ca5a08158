use infinialg_bench::{chain_atlas, clique_atlas, mod_two, wedge};
use infinialg_core::{coequalizer_congruence, glue_atlas, wide_pushout};

#[test]
fn bench_inputs_build_and_have_the_expected_sizes() {
    let (source, legs) = wedge(4, 3).unwrap();
    assert_eq!(wide_pushout(&source, &legs).unwrap().apex.size(), 5);
    assert_eq!(glue_atlas(&clique_atlas(3).unwrap()).unwrap().size(), 4);
    assert_eq!(glue_atlas(&chain_atlas(6, 3).unwrap()).unwrap().size(), 6);
    assert_eq!(
        coequalizer_congruence(&mod_two(3).unwrap())
            .unwrap()
            .apex
            .size(),
        2
    );
}
