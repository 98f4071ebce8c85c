mod common;

use common::{all_cuts, brute_code_output_entropy, classic_cut, random_instance, rng};
use nibm::cutset::cut_mutual_information;
use nibm::model::joint_distribution;
use nibm::model::random::{code_function_lists, random_channel, random_nodes, random_product_law};
use nibm::prob::Role;
use rand::Rng;

#[test]
fn single_letter_cut_matches_classic_cutset() {
    for seed in 0..20u64 {
        let mut r = rng(1000 + seed);
        let k = r.gen_range(2..=3);
        let ch = random_channel(random_nodes(&mut r, k, 1, 3), seed, false).unwrap();
        let pa = random_product_law(&mut r, &code_function_lists(&ch).unwrap()).unwrap();
        let j = joint_distribution(&pa, &ch).unwrap();
        for s in all_cuts(k) {
            let ours = cut_mutual_information(&j, &s).unwrap();
            let oracle = classic_cut(&ch, &pa, &s);
            assert!((ours - oracle).abs() < 1e-9, "seed {seed} cut {s:?}: {ours} vs {oracle}");
        }
    }
}

#[test]
fn joint_code_output_law_matches_induced_channels() {
    for seed in 0..60u64 {
        let (ch, pa) = random_instance(seed);
        let j = joint_distribution(&pa, &ch).unwrap();
        let all: Vec<usize> = (0..ch.k()).collect();
        let ids = [j.select(Role::Code, &all), j.select(Role::Output, &all)].concat();
        let ours = j.entropy(&ids).unwrap();
        let oracle = brute_code_output_entropy(&ch, &pa);
        assert!((ours - oracle).abs() < 1e-9, "seed {seed}: {ours} vs {oracle}");
        assert!((j.total() - 1.0).abs() < 1e-12);
    }
}
