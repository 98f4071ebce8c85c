//! Golden values of the worked examples, each recomputed from scratch.

use std::collections::BTreeMap;

use crate::cutset::{baik_bound, cutset_region, weakened_bound, BoundKind};
use crate::gaussian::GaussianNetwork;
use crate::model::embed::{
    binary_adder_mac, binary_feedback_channel, causal_relay_example, deficiency_channel, rewrite_channel,
    state_adder_channel, two_way_bsc,
};
use crate::model::{
    enumerate_code_functions, joint_distribution, BlockChannel, CodeFunction, CodeFunctionDistribution,
    NetworkSession, NodeSpec,
};
use crate::optimizer::{
    maximize_cutset_minimum, maximize_functional, maximize_point_to_point, support_reduction, Options, TupleSpace,
};
use crate::strategies::{mac_fb_region, rwod_search_space};
use crate::scalar::h2;
use crate::Result;

pub struct Golden {
    pub id: String,
    /// Where the value comes from, in plain words.
    pub source: &'static str,
    pub expected: f64,
    pub tol: f64,
    pub unit: &'static str,
    pub compute: Box<dyn Fn(&Options) -> Result<f64>>,
}

fn entry(
    id: impl Into<String>,
    source: &'static str,
    expected: f64,
    tol: f64,
    unit: &'static str,
    compute: impl Fn(&Options) -> Result<f64> + 'static,
) -> Golden {
    Golden { id: id.into(), source, expected, tol, unit, compute: Box::new(compute) }
}

const BITS: &str = "bit/use";
const COUNT: &str = "count";
const FLAG: &str = "1 = match";

/// Labels of the transmitter code functions in a certified support, or `None`.
pub fn certified_support(ch: &BlockChannel, bound: usize, opts: &Options) -> Result<Option<Vec<String>>> {
    let space = TupleSpace::new(ch, opts.cap)?;
    let obj = space.objective(&[0], &[1])?;
    let cert = support_reduction(&space, &obj, bound, opts)?;
    Ok(cert.certified.then(|| cert.support.iter().map(|&a| space.tuples[a][0].label(ch.node(0))).collect()))
}

fn support_matches(ch: &BlockChannel, bound: usize, want: &[&str], opts: &Options) -> Result<f64> {
    let got = certified_support(ch, bound, opts)?;
    Ok(if got.map_or(false, |g| g == want) { 1.0 } else { 0.0 })
}

/// Largest weakened bound of the point-to-point cut `S = {0}`.
pub fn weakened_maximum(ch: &BlockChannel, kind: BoundKind, opts: &Options) -> Result<f64> {
    let space = TupleSpace::new(ch, opts.cap)?;
    Ok(maximize_functional(&space, |pa| weakened_bound(&joint_distribution(pa, ch)?, &[0], kind))?.value)
}

/// Uniform `X_1` independent of a fixed relay code function.
pub fn causal_relay_law(ch: &BlockChannel) -> Result<CodeFunctionDistribution> {
    let marginals = ch
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, n)| {
            let fs = enumerate_code_functions(n, k, 1 << 20)?;
            Ok(if k == 0 {
                let w = 1.0 / fs.len() as f64;
                fs.into_iter().map(|f| (f, w)).collect()
            } else {
                vec![(fs[0].clone(), 1.0)]
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CodeFunctionDistribution::product(marginals)
}

/// The code-tree law achieving the two-way corner: uniform `X_{1,1}`,
/// relay trees `01` and `10` with probability 1/2 each.
pub fn two_way_law(ch: &BlockChannel) -> Result<CodeFunctionDistribution> {
    let pick = |k: usize, labels: &[&str]| -> Result<Vec<(CodeFunction, f64)>> {
        let n: &NodeSpec = ch.node(k);
        let fs = enumerate_code_functions(n, k, 1 << 20)?;
        let by: BTreeMap<String, CodeFunction> = fs.into_iter().map(|f| (f.label(n), f)).collect();
        Ok(labels.iter().map(|l| (by[*l].clone(), 1.0 / labels.len() as f64)).collect())
    };
    CodeFunctionDistribution::product(vec![pick(0, &["0", "1"])?, pick(1, &["01", "10"])?])
}

pub fn registry() -> Vec<Golden> {
    let mut out = Vec::new();
    for eps in [0.1, 0.25, 0.5] {
        out.push(entry(format!("feedback-channel/with-feedback/eps={eps}"), "binary channel whose noise is fed back to the transmitter", 1.0, 1e-6, BITS, move |o| {
            Ok(maximize_point_to_point(&binary_feedback_channel(eps, true)?, o)?.value)
        }));
        out.push(entry(format!("feedback-channel/no-feedback/eps={eps}"), "same channel without feedback, closed form (2 - H2(eps))/2", (2.0 - h2(eps)) / 2.0, 1e-6, BITS, move |o| {
            Ok(maximize_point_to_point(&binary_feedback_channel(eps, false)?, o)?.value)
        }));
    }
    out.push(entry("feedback-channel/four-tree-support", "capacity reached with four code trees", 1.0, 0.0, FLAG, |o| {
        let ch = binary_feedback_channel(0.1, true)?;
        Ok(if certified_support(&ch, 4, o)?.map_or(false, |s| s.len() <= 4) { 1.0 } else { 0.0 })
    }));
    out.push(entry("state-channel/capacity", "integer-adder state channel Y = X + S", 0.5, 1e-6, BITS, |o| {
        Ok(maximize_point_to_point(&state_adder_channel(false)?, o)?.value)
    }));
    out.push(entry("state-channel/support-01-10", "two code trees {01, 10} suffice (bound of three)", 1.0, 0.0, FLAG, |o| {
        support_matches(&state_adder_channel(false)?, 3, &["01", "10"], o)
    }));
    out.push(entry("state-channel/weakened-maximum", "input-output weakened bound at its maximum, log2(3)/2", 3f64.log2() / 2.0, 1e-6, BITS, |o| {
        weakened_maximum(&state_adder_channel(false)?, BoundKind::InputOutputWeakened, o)
    }));
    out.push(entry("state-channel/genie", "receiver also observes the state", 0.5, 1e-6, BITS, |o| {
        Ok(maximize_point_to_point(&state_adder_channel(true)?, o)?.value)
    }));
    for d in [0.1, 0.3] {
        out.push(entry(format!("rewrite-channel/capacity/delta={d}"), "write-then-rewrite channel, (1 - H2(delta^2))/2 per letter", (1.0 - h2(d * d)) / 2.0, 1e-6, BITS, move |o| {
            Ok(maximize_point_to_point(&rewrite_channel(d)?, o)?.value)
        }));
        out.push(entry(format!("rewrite-channel/support/delta={d}"), "two code trees (0,N0) and (1,1N) suffice", 1.0, 0.0, FLAG, move |o| {
            support_matches(&rewrite_channel(d)?, 2, &["0,N0", "1,1N"], o)
        }));
    }
    out.push(entry("weakened-deficiency/exact", "feedback of one noise half: exact optimum with eps1 = 1/2", 0.0, 1e-6, BITS, |o| {
        Ok(maximize_point_to_point(&deficiency_channel(0.5, 0.11)?, o)?.value)
    }));
    out.push(entry("weakened-deficiency/input-output", "input-output weakened maximum H2(eps2)/2", h2(0.11) / 2.0, 1e-6, BITS, |o| {
        weakened_maximum(&deficiency_channel(0.5, 0.11)?, BoundKind::InputOutputWeakened, o)
    }));
    out.push(entry("causal-relay/cutset-optimum", "causal relay network, node 1 to node 5", 0.0, 1e-6, BITS, |o| {
        let ch = causal_relay_example(2)?;
        Ok(maximize_cutset_minimum(&NetworkSession::unicast(5, 0, 4)?, &ch, o)?.value)
    }));
    for (name, s) in [("cut-1-3", vec![0, 2]), ("cut-1", vec![0])] {
        out.push(entry(format!("causal-relay/relay-bound/{name}"), "relay-partition bound, 1 bit over 3 letters", 1.0 / 3.0, 1e-9, BITS, move |_| {
            let ch = causal_relay_example(2)?;
            let j = joint_distribution(&causal_relay_law(&ch)?, &ch)?;
            baik_bound(&j, &s, &[2, 3, 4], &[0, 1])
        }));
    }
    let eps = 0.2;
    for (cut, want) in [(0usize, (1.0 - h2(eps)) / 2.0), (1, 0.5)] {
        out.push(entry(format!("two-way/cut-{}", cut + 1), "binary two-way channel with correlated feedback", want, 1e-6, BITS, move |_| {
            let ch = two_way_bsc(eps)?;
            let session = NetworkSession::new(
                2,
                vec![
                    crate::model::Message { name: "W1".into(), source: 0, sinks: vec![1] },
                    crate::model::Message { name: "W2".into(), source: 1, sinks: vec![0] },
                ],
            )?;
            let rows = cutset_region(&session, &ch, &two_way_law(&ch)?, BoundKind::Exact, false)?;
            Ok(rows.iter().find(|r| r.cut == vec![cut]).map_or(f64::NAN, |r| r.per_use))
        }));
    }
    out.push(entry("enumeration/binary-n3", "binary code trees of depth 3", 128.0, 0.0, COUNT, |o| {
        let spec = NodeSpec::sized(&[2, 2, 2], &[2, 2, 2])?;
        Ok(enumerate_code_functions(&spec, 0, o.cap)?.len() as f64)
    }));
    let rwod = rwod_search_space(2, 2, 4, 4);
    out.push(entry("relay-without-delay/trees", "relay code trees |X2|^|Y2|", 16.0, 0.0, COUNT, move |_| Ok(rwod.trees as f64)));
    out.push(entry("relay-without-delay/combinations", "supports of size 5 among 16 trees", 4368.0, 0.0, COUNT, move |_| Ok(rwod.combinations as f64)));
    out.push(entry("relay-without-delay/mappings", "mapping formulation search space", 1048576.0, 0.0, COUNT, move |_| Ok(rwod.mappings as f64)));
    out.push(entry("mac/binary-adder-sum-rate", "binary adder MAC, uniform independent inputs", 1.5, 1e-9, BITS, |_| {
        let ch = binary_adder_mac(&[vec![1]], &[vec![1]], true)?;
        let uniform = |k: usize| -> Result<Vec<(CodeFunction, f64)>> {
            let fs = enumerate_code_functions(ch.node(k), k, 16)?;
            let w = 1.0 / fs.len() as f64;
            Ok(fs.into_iter().map(|f| (f, w)).collect())
        };
        let pa = CodeFunctionDistribution::product(vec![uniform(0)?, uniform(1)?, uniform(2)?])?;
        Ok(mac_fb_region(&ch, &pa)?.sum)
    }));
    out.push(entry("gaussian/two-node-gap", "two-node Gaussian link, L = 1: realized gap", 1.0, 1e-9, "bit/letter", |_| {
        let gains = BTreeMap::from([((1, 0), nalgebra::DMatrix::from_element(1, 1, 2.0))]);
        Ok(GaussianNetwork::new(2, 1, gains, None, 10.0, vec![1])?.gap_certificate()?.realized_gap)
    }));
    out
}
