mod common;

use std::sync::Arc;

use common::{all_cuts, brute_mi, random_instance, random_relay, rng, sub_product_law};
use nibm::cutset::{baik_bound, weakened_bound, BoundKind};
use nibm::model::embed::{binary_adder_mac, deficiency_channel, embed_relay_without_delay};
use nibm::model::random::{code_function_lists, random_product_law, simplex_point};
use nibm::model::{
    joint_distribution, AuxSpec, BlockChannel, CfEntry, CodeFunctionDistribution, History, MapFn, NodeSpec,
};
use nibm::strategies::{
    bc_regions, cf_rate, deterministic_marton_scheme, df_rate, mac_region, pdf_rate, rc_cutset,
    relay_without_delay_bound, Quantizer,
};
use nibm::Error;
use rand::Rng;

const TOL: f64 = 1e-9;

#[test]
fn relay_bound_without_causal_relays_matches_input_output_at_one_letter() {
    let mut checked = (0, 0);
    for seed in 0..150u64 {
        let (ch, pa) = random_instance(seed);
        let j = joint_distribution(&pa, &ch).unwrap();
        let nodes: Vec<usize> = (0..ch.k()).collect();
        for s in all_cuts(ch.k()) {
            let relay = baik_bound(&j, &s, &[], &nodes).unwrap();
            let weak = weakened_bound(&j, &s, BoundKind::InputOutputWeakened).unwrap();
            if ch.l() == 1 {
                assert!((relay - weak).abs() < TOL, "seed {seed} {s:?}: {relay} vs {weak}");
                checked.0 += 1;
            } else {
                assert!(relay <= weak + TOL, "seed {seed} {s:?}: {relay} > {weak}");
                checked.1 += 1;
            }
        }
    }
    assert!(checked.0 > 50 && checked.1 > 50, "{checked:?}");
}

#[test]
fn relay_bound_rejects_bad_partitions() {
    let (ch, pa) = random_instance(3);
    let j = joint_distribution(&pa, &ch).unwrap();
    assert!(matches!(baik_bound(&j, &[0], &[0], &[0]), Err(Error::Partition(_))));
    assert!(matches!(weakened_bound(&j, &[0], BoundKind::Baik), Err(Error::KindMismatch(_))));
    assert!(matches!(weakened_bound(&j, &[], BoundKind::Exact), Err(Error::InvalidCut(_))));
}

#[test]
fn additive_form_equals_input_output_form_on_additive_channels() {
    for seed in 0..40u64 {
        let mut r = rng(seed);
        let ch = deficiency_channel(r.gen_range(0.01..0.99), r.gen_range(0.01..0.99)).unwrap();
        let pa = random_product_law(&mut r, &code_function_lists(&ch).unwrap()).unwrap();
        let j = joint_distribution(&pa, &ch).unwrap();
        let add = weakened_bound(&j, &[0], BoundKind::AdditiveNoise).unwrap();
        let weak = weakened_bound(&j, &[0], BoundKind::InputOutputWeakened).unwrap();
        assert!((add - weak).abs() < TOL, "{add} vs {weak}");
    }
    let (ch, pa) = random_instance(8);
    let j = joint_distribution(&pa, &ch).unwrap();
    assert!(matches!(weakened_bound(&j, &[0], BoundKind::AdditiveNoise), Err(Error::KindMismatch(_))));
}

#[test]
fn deterministic_form_equals_input_output_form_on_noise_free_channels() {
    let ch = binary_adder_mac(&[vec![1, 0], vec![1, 1]], &[vec![1, 0], vec![0, 1]], true).unwrap();
    for seed in 0..20u64 {
        let pa = sub_product_law(&mut rng(seed), &ch, 5);
        let j = joint_distribution(&pa, &ch).unwrap();
        for s in all_cuts(3) {
            let det = weakened_bound(&j, &s, BoundKind::Deterministic).unwrap();
            let weak = weakened_bound(&j, &s, BoundKind::InputOutputWeakened).unwrap();
            assert!((det - weak).abs() < TOL, "{s:?}: {det} vs {weak}");
        }
    }
    let noisy = deficiency_channel(0.2, 0.3).unwrap();
    let pa = random_product_law(&mut rng(1), &code_function_lists(&noisy).unwrap()).unwrap();
    let j = joint_distribution(&pa, &noisy).unwrap();
    assert!(matches!(weakened_bound(&j, &[0], BoundKind::Deterministic), Err(Error::KindMismatch(_))));
}

fn deterministic_bc() -> BlockChannel {
    let nodes = vec![
        NodeSpec::sized(&[4], &[1]).unwrap(),
        NodeSpec::sized(&[1], &[2]).unwrap(),
        NodeSpec::sized(&[1], &[2]).unwrap(),
    ];
    let map: MapFn = Arc::new(|h: &History, _| {
        let x = h.x[0][0];
        vec![0, x & 1, (x >> 1) ^ (x & 1)]
    });
    BlockChannel::functional(nodes, vec![1.0], vec![map]).unwrap()
}

#[test]
fn marton_with_outputs_as_auxiliaries_reaches_deterministic_region() {
    let ch = deterministic_bc();
    for seed in 0..20u64 {
        let pa = random_product_law(&mut rng(seed), &code_function_lists(&ch).unwrap()).unwrap();
        let scheme = deterministic_marton_scheme(&ch, &pa).unwrap();
        let report = bc_regions(&ch, &scheme).unwrap();
        let marton = report.marton.expect("auxiliaries present");
        let det = report.deterministic.expect("noise-free channel");
        let bound = |label: &str, r: &nibm::strategies::Region| {
            r.halfspaces.iter().filter(|h| h.label.starts_with(label)).map(|h| h.bound).fold(f64::INFINITY, f64::min)
        };
        for label in ["R1", "R2", "R1+R2"] {
            let (m, d) = (bound(label, &marton), bound(label, &det));
            assert!((m - d).abs() < TOL, "{label}: {m} vs {d}");
        }
        // Cut-set and deterministic regions coincide for noise-free channels.
        for (c, d) in report.cutset.halfspaces.iter().zip(&det.halfspaces) {
            assert!((c.bound - d.bound).abs() < TOL);
        }
    }
}

#[test]
fn mac_without_feedback_at_uniform_inputs() {
    let ch = binary_adder_mac(&[vec![1]], &[vec![1]], false).unwrap();
    let lists = code_function_lists(&ch).unwrap();
    let uniform: Vec<Vec<_>> = lists.iter().map(|l| l.iter().map(|f| (f.clone(), 1.0 / l.len() as f64)).collect()).collect();
    let b = mac_region(&ch, &CodeFunctionDistribution::product(uniform).unwrap()).unwrap();
    assert!((b.r1 - 1.0).abs() < TOL && (b.r2 - 1.0).abs() < TOL && (b.sum - 1.5).abs() < TOL);
    assert!(b.region().contains(&[0.75, 0.75], TOL));
    assert!(!b.region().contains(&[1.0, 0.75], TOL));
}

/// Scheme with `U` equal to the source's code function.
fn with_source_as_u(pa: &CodeFunctionDistribution, n: usize, ids: &dyn Fn(&nibm::model::CodeFunction) -> usize) -> CodeFunctionDistribution {
    let entries = pa.entries().iter().map(|e| CfEntry { aux: vec![ids(&e.funcs[0])], funcs: e.funcs.clone(), p: e.p }).collect();
    CodeFunctionDistribution::with_aux(vec![AuxSpec::new("U", n)], entries).unwrap()
}

#[test]
fn partial_decode_forward_spans_decode_forward() {
    for seed in 0..40u64 {
        let ch = random_relay(seed);
        let pa = sub_product_law(&mut rng(seed), &ch, 4);
        let sources = code_function_lists(&ch).unwrap().remove(0);
        let full = with_source_as_u(&pa, sources.len(), &|f| sources.iter().position(|g| g == f).unwrap());
        let df = df_rate(&ch, &pa).unwrap();
        let pdf = pdf_rate(&ch, &full).unwrap();
        assert!((df.first - pdf.first).abs() < TOL && (df.second - pdf.second).abs() < TOL);
        // U constant: the relay decodes nothing and the first term is the direct link.
        let none = with_source_as_u(&pa, 1, &|_| 0);
        let direct = pdf_rate(&ch, &none).unwrap();
        let cut = rc_cutset(&ch, &pa).unwrap();
        assert!(direct.rate <= cut.rate + TOL);
    }
}

#[test]
fn compress_forward_below_cutset() {
    for seed in 0..40u64 {
        let ch = random_relay(seed);
        let pa = sub_product_law(&mut rng(seed), &ch, 4);
        let cut = rc_cutset(&ch, &pa).unwrap();
        for q in [Quantizer::Identity, Quantizer::Constant] {
            let cf = cf_rate(&ch, &pa, &q).unwrap();
            assert!(cf.rate <= cut.rate + TOL, "{q:?}: {} > {}", cf.rate, cut.rate);
        }
        let noisy_q = Quantizer::Law {
            alphabet: 2,
            law: Arc::new(|_, _, y: &[usize]| if y.iter().sum::<usize>() % 2 == 0 { vec![0.8, 0.2] } else { vec![0.2, 0.8] }),
        };
        assert!(cf_rate(&ch, &pa, &noisy_q).unwrap().rate <= cut.rate + TOL);
    }
}

#[test]
fn relay_without_delay_matches_brute_force() {
    for seed in 0..20u64 {
        let mut r = rng(seed);
        let (nx1, nx2, ny2, ny3) = (2, 2, r.gen_range(2..=3), 2);
        let p2: Vec<Vec<f64>> = (0..nx1).map(|_| simplex_point(&mut r, ny2, false)).collect();
        let p3: Vec<Vec<Vec<Vec<f64>>>> = (0..nx1)
            .map(|_| (0..nx2).map(|_| (0..ny2).map(|_| simplex_point(&mut r, ny3, false)).collect()).collect())
            .collect();
        let ch = embed_relay_without_delay(&p2, &p3).unwrap();
        let pa = random_product_law(&mut r, &code_function_lists(&ch).unwrap()).unwrap();
        let got = relay_without_delay_bound(&ch, &pa).unwrap();

        // Cells (x1, relay tree id, y2, y3) straight from the tables.
        let mut ids = Vec::new();
        let mut cells = Vec::new();
        for e in pa.entries() {
            let x1 = e.funcs[0].input(ch.node(0), 0, &[]);
            let id = match ids.iter().position(|f| f == &e.funcs[1]) {
                Some(i) => i,
                None => {
                    ids.push(e.funcs[1].clone());
                    ids.len() - 1
                }
            };
            for y2 in 0..ny2 {
                let x2 = e.funcs[1].input(ch.node(1), 1, &[y2]);
                for y3 in 0..ny3 {
                    cells.push((vec![x1, id, y2, y3], e.p * p2[x1][y2] * p3[x1][x2][y2][y3]));
                }
            }
        }
        let first = brute_mi(&cells, &[0], &[2, 3], &[1]) / 2.0;
        let second = brute_mi(&cells, &[0, 1], &[3], &[]) / 2.0;
        assert!((got.first - first).abs() < TOL && (got.second - second).abs() < TOL);
    }
    assert!(matches!(relay_without_delay_bound(&random_relay(1), &sub_product_law(&mut rng(1), &random_relay(1), 2)), Err(Error::Shape(_))));
}
