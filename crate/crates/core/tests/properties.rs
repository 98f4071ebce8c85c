mod common;

use common::{all_cuts, another_law, random_instance, random_relay, rng, sub_product_law};
use nibm::cutset::{cut_mutual_information, cutset_region, weakened_bound, BoundKind};
use nibm::gaussian::{halved_sum_inequality, GaussianNetwork};
use nibm::model::{joint_distribution, NetworkSession};
use nibm::optimizer::project_simplex;
use nibm::prob::Role;
use nibm::strategies::{df_rate, qf_rate, rc_cutset, Quantizer};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

const SLACK: f64 = 1e-9;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_rule_and_conditioning(seed in any::<u64>()) {
        let (ch, pa) = random_instance(seed);
        let j = joint_distribution(&pa, &ch).unwrap();
        let all: Vec<usize> = (0..ch.k()).collect();
        let (x, y) = (j.select(Role::Input, &all), j.select(Role::Output, &all));
        let xy = [x.as_slice(), &y].concat();
        let lhs = j.entropy(&xy).unwrap();
        let rhs = j.entropy(&x).unwrap() + j.conditional_entropy(&y, &x).unwrap();
        prop_assert!((lhs - rhs).abs() < SLACK);
        prop_assert!(j.conditional_entropy(&y, &x).unwrap() <= j.entropy(&y).unwrap() + SLACK);
    }

    #[test]
    fn causal_conditioning_reduces_entropy(seed in any::<u64>()) {
        let (ch, pa) = random_instance(seed);
        let j = joint_distribution(&pa, &ch).unwrap();
        let all: Vec<usize> = (0..ch.k()).collect();
        let (xb, yb) = (j.block(Role::Input, &all, ch.l()), j.block(Role::Output, &all, ch.l()));
        let causal = j.causally_conditioned_entropy(&yb, &xb, &[]).unwrap();
        prop_assert!(causal <= j.entropy(&yb.all()).unwrap() + SLACK);
        prop_assert!(causal >= -SLACK);
    }

    #[test]
    fn conservation_of_directed_information(seed in any::<u64>()) {
        // I(X;Y) = I(X → Y) + I(0Y → X)
        let (ch, pa) = random_instance(seed);
        let j = joint_distribution(&pa, &ch).unwrap();
        let all: Vec<usize> = (0..ch.k()).collect();
        let (xb, yb) = (j.block(Role::Input, &all, ch.l()), j.block(Role::Output, &all, ch.l()));
        let forward = j.directed_information(&xb, &yb, None, &[]).unwrap();
        let backward = j.directed_information(&yb.clone().delayed(), &xb, None, &[]).unwrap();
        let mi = j.mutual_information(&xb.all(), &yb.all(), &[]).unwrap();
        prop_assert!((forward + backward - mi).abs() < SLACK, "{forward} + {backward} vs {mi}");
    }

    #[test]
    fn joints_are_normalized(seed in any::<u64>()) {
        let (ch, pa) = random_instance(seed);
        let j = joint_distribution(&pa, &ch).unwrap();
        prop_assert!((j.total() - 1.0).abs() < 1e-12);
        prop_assert!(j.cells().all(|(_, p)| p > 0.0));
    }

    #[test]
    fn weakening_chain(seed in any::<u64>()) {
        let (ch, pa) = random_instance(seed);
        let j = joint_distribution(&pa, &ch).unwrap();
        for s in all_cuts(ch.k()) {
            let exact = weakened_bound(&j, &s, BoundKind::Exact).unwrap();
            let weak1 = weakened_bound(&j, &s, BoundKind::DirectedWeakened).unwrap();
            let weak = weakened_bound(&j, &s, BoundKind::InputOutputWeakened).unwrap();
            prop_assert!(exact <= weak1 + SLACK && weak1 <= weak + SLACK, "{s:?}: {exact} {weak1} {weak}");
        }
    }

    #[test]
    fn cut_value_is_concave(seed in any::<u64>(), lambda in prop::sample::select(vec![0.25, 0.5, 0.75])) {
        let (ch, pa) = random_instance(seed);
        let pb = another_law(&ch, seed);
        let mixed = pa.mix(&pb, lambda).unwrap();
        for s in all_cuts(ch.k()) {
            let v = |law| cut_mutual_information(&joint_distribution(law, &ch).unwrap(), &s).unwrap();
            let mid = v(&mixed);
            prop_assert!(mid >= lambda * v(&pa) + (1.0 - lambda) * v(&pb) - SLACK);
        }
    }

    #[test]
    fn relay_rates_below_cutset(seed in any::<u64>()) {
        let ch = random_relay(seed);
        let pa = sub_product_law(&mut rng(seed), &ch, 4);
        let cut = rc_cutset(&ch, &pa).unwrap();
        let df = df_rate(&ch, &pa).unwrap();
        prop_assert!(df.rate <= cut.rate + SLACK);
        let qf = qf_rate(&ch, &pa, &[Quantizer::Identity, Quantizer::Identity, Quantizer::Identity], &[2]).unwrap();
        let session = NetworkSession::unicast(3, 0, 2).unwrap();
        let min_cut = cutset_region(&session, &ch, &pa, BoundKind::Exact, false)
            .unwrap()
            .iter()
            .map(|r| r.per_use)
            .fold(f64::INFINITY, f64::min);
        prop_assert!(qf.rate <= min_cut + SLACK, "{} vs {min_cut}", qf.rate);
    }

    #[test]
    fn projection_lands_on_simplex(v in prop::collection::vec(-5.0f64..5.0, 1..12)) {
        let p = project_simplex(&v);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_cut_bounds_are_ordered(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.gen_range(2..=4);
        let l = r.gen_range(1..=3);
        let net = GaussianNetwork::random(&mut r, k, l, 10.0, true).unwrap();
        let report = net.gap_certificate().unwrap();
        for c in &report.cuts {
            prop_assert!(c.lower <= c.upper + SLACK);
            prop_assert!(c.gap_per_letter <= report.bound + 1e-6);
        }
    }

    #[test]
    fn halved_sum_inequality_holds(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let m = DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0));
        let a = &m * m.transpose() + DMatrix::identity(n, n) * 0.1;
        let m = DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0));
        let b = &m * m.transpose() + DMatrix::identity(n, n) * 0.1;
        let (lhs, rhs) = halved_sum_inequality(&a, &b).unwrap();
        prop_assert!(lhs >= rhs - SLACK);
    }
}
