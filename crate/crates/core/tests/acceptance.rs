//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the table.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use common::{
    all_cuts, another_law, classic_cut, conditionally_independent_mac_law, random_feedback_mac, random_instance,
    random_relay, rng, sub_product_law,
};
use nalgebra::DMatrix;
use nibm::cli::registry::{causal_relay_law, certified_support, two_way_law, weakened_maximum};
use nibm::cutset::{baik_bound, cut_mutual_information, cutset_region, weakened_bound, BoundKind};
use nibm::gaussian::GaussianNetwork;
use nibm::model::embed::{
    binary_feedback_channel, causal_relay_example, deficiency_channel, rewrite_channel, state_adder_channel,
    two_way_bsc,
};
use nibm::model::random::{code_function_lists, random_channel, random_nodes, random_product_law};
use nibm::model::{enumerate_code_functions, CodeFunctionDistribution, joint_distribution, Message, NetworkSession, NodeSpec};
use nibm::optimizer::{maximize_cutset_minimum, maximize_point_to_point, Options};
use nibm::scalar::h2;
use nibm::strategies::{df_rate, mac_fb_region, mac_fb_region_directed, qf_rate, rc_cutset, rwod_search_space, Quantizer};
use rand::Rng;

type Outcome = Result<String, String>;

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: got {got:.12}, expected {want:.12} (tol {tol:e})"))
    }
}

fn within(what: &str, elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("{what}: took {elapsed:?}, limit {limit:?}"))
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn c1_feedback_channel() -> Outcome {
    let t = Instant::now();
    let o = Options::default();
    for eps in [0.1, 0.25, 0.5] {
        let with = maximize_point_to_point(&binary_feedback_channel(eps, true).map_err(err)?, &o).map_err(err)?;
        let without = maximize_point_to_point(&binary_feedback_channel(eps, false).map_err(err)?, &o).map_err(err)?;
        close(&format!("with feedback, eps {eps}"), with.value, 1.0, 1e-6)?;
        close(&format!("without feedback, eps {eps}"), without.value, (2.0 - h2(eps)) / 2.0, 1e-6)?;
    }
    within("runtime", t.elapsed(), Duration::from_secs(1))?;
    Ok(format!("C = 1 with feedback, (2 - H2)/2 without, 3 values of eps in {:?}", t.elapsed()))
}

fn c2_state_channel() -> Outcome {
    let o = Options::default();
    let ch = state_adder_channel(false).map_err(err)?;
    let c = maximize_point_to_point(&ch, &o).map_err(err)?.value;
    close("capacity", c, 0.5, 1e-6)?;
    let support = certified_support(&ch, 3, &o).map_err(err)?.ok_or("support not certified")?;
    if support != ["01", "10"] {
        return Err(format!("support {support:?}, expected [01, 10]"));
    }
    let weak = weakened_maximum(&ch, BoundKind::InputOutputWeakened, &o).map_err(err)?;
    close("weakened", weak, 3f64.log2() / 2.0, 1e-6)?;
    let genie = maximize_point_to_point(&state_adder_channel(true).map_err(err)?, &o).map_err(err)?.value;
    close("genie", genie, 0.5, 1e-6)?;
    Ok(format!("C = {c:.9}, support {{01, 10}} (≤ 3), weakened {weak:.9}, genie {genie:.9}"))
}

fn c3_rewrite_channel() -> Outcome {
    let o = Options::default();
    let mut vals = Vec::new();
    for d in [0.1, 0.3] {
        let ch = rewrite_channel(d).map_err(err)?;
        let c = maximize_point_to_point(&ch, &o).map_err(err)?.value;
        close(&format!("delta {d}"), c, (1.0 - h2(d * d)) / 2.0, 1e-6)?;
        let support = certified_support(&ch, 2, &o).map_err(err)?.ok_or(format!("delta {d}: support not certified"))?;
        if support.len() != 2 {
            return Err(format!("delta {d}: support {support:?}"));
        }
        vals.push(format!("{c:.9} on {support:?}"));
    }
    Ok(vals.join(", "))
}

fn c4_weakened_deficiency() -> Outcome {
    let o = Options::default();
    let ch = deficiency_channel(0.5, 0.11).map_err(err)?;
    let exact = maximize_point_to_point(&ch, &o).map_err(err)?.value;
    close("exact", exact, 0.0, 1e-6)?;
    let weak = weakened_maximum(&ch, BoundKind::InputOutputWeakened, &o).map_err(err)?;
    close("input-output weakened", weak, h2(0.11) / 2.0, 1e-6)?;
    Ok(format!("exact {exact:.2e}, weakened {weak:.9}"))
}

fn c5_causal_relay() -> Outcome {
    let ch = causal_relay_example(2).map_err(err)?;
    let session = NetworkSession::unicast(5, 0, 4).map_err(err)?;
    let best = maximize_cutset_minimum(&session, &ch, &Options::default()).map_err(err)?.value;
    close("cut-set optimum", best, 0.0, 1e-6)?;
    let j = joint_distribution(&causal_relay_law(&ch).map_err(err)?, &ch).map_err(err)?;
    for s in [vec![0, 2], vec![0]] {
        let v = baik_bound(&j, &s, &[2, 3, 4], &[0, 1]).map_err(err)?;
        close(&format!("relay bound on {s:?}"), v, 1.0 / 3.0, 1e-9)?;
    }
    Ok(format!("max-min cut-set {best:.2e}; relay bound 1/3 on cuts {{1,3}} and {{1}}"))
}

fn c6_two_way() -> Outcome {
    let eps = 0.2;
    let ch = two_way_bsc(eps).map_err(err)?;
    let session = NetworkSession::new(
        2,
        vec![
            Message { name: "W1".into(), source: 0, sinks: vec![1] },
            Message { name: "W2".into(), source: 1, sinks: vec![0] },
        ],
    )
    .map_err(err)?;
    let rows = cutset_region(&session, &ch, &two_way_law(&ch).map_err(err)?, BoundKind::Exact, false).map_err(err)?;
    let get = |c: usize| rows.iter().find(|r| r.cut == [c]).map(|r| r.per_use).ok_or(format!("cut {c} missing"));
    let (r1, r2) = (get(0)?, get(1)?);
    close("R1", r1, (1.0 - h2(eps)) / 2.0, 1e-6)?;
    close("R2", r2, 0.5, 1e-6)?;
    Ok(format!("({r1:.9}, {r2:.9})"))
}

fn c7_enumeration() -> Outcome {
    let spec = NodeSpec::sized(&[2, 2, 2], &[2, 2, 2]).map_err(err)?;
    let trees = enumerate_code_functions(&spec, 0, 1 << 20).map_err(err)?.len();
    let s = rwod_search_space(2, 2, 4, 4);
    let got = (trees as u128, s.trees, s.combinations, s.mappings);
    if got != (128, 16, 4368, 1 << 20) {
        return Err(format!("counts {got:?}"));
    }
    Ok(format!("128 trees; relay {} trees, C(16,5) = {} vs {}", s.trees, s.combinations, s.mappings))
}

fn c8_mac_identity() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let l = 1 + (seed % 2) as usize;
        let ch = random_feedback_mac(seed, l);
        let pa = conditionally_independent_mac_law(&mut rng(seed), &ch);
        let a = mac_fb_region(&ch, &pa).map_err(err)?;
        let b = mac_fb_region_directed(&ch, &pa).map_err(err)?;
        for (x, y) in [(a.r1, b.r1), (a.r2, b.r2), (a.sum, b.sum)] {
            worst = worst.max((x - y).abs());
        }
    }
    if worst > 1e-9 {
        return Err(format!("largest difference {worst:e}"));
    }
    within("runtime", t.elapsed(), Duration::from_secs(30))?;
    Ok(format!("100 schemes, largest difference {worst:.1e}, {:?}", t.elapsed()))
}

fn c9_ordering() -> Outcome {
    let slack = 1e-9;
    for seed in 0..200u64 {
        let (ch, pa) = random_instance(10_000 + seed);
        let j = joint_distribution(&pa, &ch).map_err(err)?;
        let pb = another_law(&ch, seed);
        for s in all_cuts(ch.k()) {
            let e = weakened_bound(&j, &s, BoundKind::Exact).map_err(err)?;
            let w1 = weakened_bound(&j, &s, BoundKind::DirectedWeakened).map_err(err)?;
            let w = weakened_bound(&j, &s, BoundKind::InputOutputWeakened).map_err(err)?;
            if !(e <= w1 + slack && w1 <= w + slack) {
                return Err(format!("seed {seed} cut {s:?}: {e} / {w1} / {w}"));
            }
            for lambda in [0.25, 0.5, 0.75] {
                let v = |law: &CodeFunctionDistribution| -> Result<f64, String> {
                    cut_mutual_information(&joint_distribution(law, &ch).map_err(err)?, &s).map_err(err)
                };
                let mixed = pa.mix(&pb, lambda).map_err(err)?;
                let mid = v(&mixed)?;
                let chord = lambda * v(&pa)? + (1.0 - lambda) * v(&pb)?;
                if mid < chord - slack {
                    return Err(format!("seed {seed} cut {s:?}: concavity fails at {lambda}"));
                }
            }
        }
        let relay = random_relay(20_000 + seed);
        let law = sub_product_law(&mut rng(seed), &relay, 4);
        let cut = rc_cutset(&relay, &law).map_err(err)?.rate;
        let df = df_rate(&relay, &law).map_err(err)?.rate;
        let qf = qf_rate(&relay, &law, &vec![Quantizer::Identity; 3], &[2]).map_err(err)?.rate;
        if df > cut + slack || qf > cut + slack {
            return Err(format!("seed {seed}: DF {df}, QF {qf} above cut-set {cut}"));
        }
    }
    Ok("200 instances each: weakening chain, concavity probe, DF/QF below cut-set".into())
}

fn c10_gaussian() -> Outcome {
    let t = Instant::now();
    let mut r = rng(5);
    let mut worst: f64 = f64::NEG_INFINITY;
    for i in 0..1000 {
        let k = r.gen_range(2..=5);
        let l = r.gen_range(1..=4);
        let power = 10f64.powf(r.gen_range(-1.0..3.0));
        let correlated = r.gen_bool(0.5);
        let net = GaussianNetwork::random(&mut r, k, l, power, correlated).map_err(err)?;
        let g = net.gap_certificate().map_err(err)?;
        if !g.holds() {
            return Err(format!("network {i} (K {k}, L {l}): cuts {:?} exceed {}", g.violations, g.bound));
        }
        worst = worst.max(g.cuts.iter().map(|c| c.gap_per_letter - g.bound).fold(f64::NEG_INFINITY, f64::max));
    }
    let gains = BTreeMap::from([((1, 0), DMatrix::from_element(1, 1, 2.0))]);
    let two = GaussianNetwork::new(2, 1, gains, None, 10.0, vec![1]).map_err(err)?.gap_certificate().map_err(err)?;
    close("K = 2, L = 1 gap", two.realized_gap, 1.0, 1e-12)?;
    within("runtime", t.elapsed(), Duration::from_secs(60))?;
    Ok(format!("1000 networks, largest gap minus bound {worst:.3}; two-node gap {} in {:?}", two.realized_gap, t.elapsed()))
}

fn c11_dmn_recovery() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let mut r = rng(500 + seed);
        let k = r.gen_range(2..=3);
        let ch = random_channel(random_nodes(&mut r, k, 1, 3), seed, false).map_err(err)?;
        let pa = random_product_law(&mut r, &code_function_lists(&ch).map_err(err)?).map_err(err)?;
        let j = joint_distribution(&pa, &ch).map_err(err)?;
        for s in all_cuts(k) {
            worst = worst.max((cut_mutual_information(&j, &s).map_err(err)? - classic_cut(&ch, &pa, &s)).abs());
        }
    }
    if worst > 1e-9 {
        return Err(format!("largest difference {worst:e}"));
    }
    Ok(format!("20 single-letter channels, largest difference {worst:.1e}"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("binary feedback channel capacity", c1_feedback_channel),
        ("state channel Y = X + S", c2_state_channel),
        ("rewrite channel", c3_rewrite_channel),
        ("weakened-bound looseness", c4_weakened_deficiency),
        ("causal relay network", c5_causal_relay),
        ("two-way channel with correlated feedback", c6_two_way),
        ("enumeration counts", c7_enumeration),
        ("code-function vs directed MAC bounds", c8_mac_identity),
        ("ordering, concavity, achievable below cut-set", c9_ordering),
        ("Gaussian gap certificate", c10_gaussian),
        ("classic cut-set recovery", c11_dmn_recovery),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let ms = t.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail} [{ms:.0} ms]", i + 1),
            Err(why) => {
                println!("FAIL  {:>2}. {name}: {why} [{ms:.0} ms]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
