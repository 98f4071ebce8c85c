//! Seeded random channels and code-function laws for randomized checks.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    enumerate_code_functions, BlockChannel, CodeFunction, CodeFunctionDistribution, History, NodeSpec, StepFn,
    DEFAULT_CAP,
};
use crate::Result;

/// A random probability vector of length `n`; with `sparse`, some entries are zero.
pub fn simplex_point<R: Rng>(rng: &mut R, n: usize, sparse: bool) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| if sparse && rng.gen_bool(0.3) { 0.0 } else { -rng.gen::<f64>().max(1e-12).ln() })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[rng.gen_range(0..n)] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Random stochastic kernels for the given node shapes. Each row is drawn
/// from a generator seeded by `(seed, time, history)`, so the channel is a
/// fixed function of its history without storing tables.
pub fn random_channel(nodes: Vec<NodeSpec>, seed: u64, sparse: bool) -> Result<BlockChannel> {
    let l = nodes[0].len();
    let out_sizes: Arc<Vec<Vec<usize>>> = Arc::new((0..l).map(|i| nodes.iter().map(|n| n.y_size(i)).collect()).collect());
    let steps: Vec<StepFn> = (0..l)
        .map(|i| -> StepFn {
            let sizes = Arc::clone(&out_sizes);
            Arc::new(move |h: &History, _| {
                let mut hasher = DefaultHasher::new();
                (seed, i, &h.x, &h.y).hash(&mut hasher);
                let mut rng = ChaCha8Rng::seed_from_u64(hasher.finish());
                let dims = &sizes[i];
                let total: usize = dims.iter().product();
                let row = simplex_point(&mut rng, total, sparse);
                row.into_iter()
                    .enumerate()
                    .map(|(mut idx, p)| {
                        let mut y = vec![0; dims.len()];
                        for (slot, &d) in y.iter_mut().zip(dims).rev() {
                            *slot = idx % d;
                            idx /= d;
                        }
                        (y, p)
                    })
                    .collect()
            })
        })
        .collect();
    BlockChannel::new(nodes, vec![1.0], steps)
}

/// Random node alphabets: sizes in `1..=max_alpha`, with singletons common.
pub fn random_nodes<R: Rng>(rng: &mut R, k: usize, l: usize, max_alpha: usize) -> Vec<NodeSpec> {
    let draw = |rng: &mut R| if rng.gen_bool(0.35) { 1 } else { rng.gen_range(2..=max_alpha.max(2)) };
    (0..k)
        .map(|_| {
            let x: Vec<usize> = (0..l).map(|_| draw(rng)).collect();
            let y: Vec<usize> = (0..l).map(|_| draw(rng)).collect();
            NodeSpec::sized(&x, &y).expect("sizes are positive")
        })
        .collect()
}

/// All code functions of every node (small channels only).
pub fn code_function_lists(ch: &BlockChannel) -> Result<Vec<Vec<CodeFunction>>> {
    ch.nodes().iter().enumerate().map(|(k, n)| enumerate_code_functions(n, k, DEFAULT_CAP)).collect()
}

/// Random dependent law over at most `support` tuples.
pub fn random_joint_law<R: Rng>(
    rng: &mut R,
    lists: &[Vec<CodeFunction>],
    support: usize,
) -> Result<CodeFunctionDistribution> {
    let w = simplex_point(rng, support, false);
    let entries = w
        .into_iter()
        .map(|p| (lists.iter().map(|l| l[rng.gen_range(0..l.len())].clone()).collect(), p))
        .collect();
    CodeFunctionDistribution::joint(entries)
}

/// Random product law with full support on each node's list.
pub fn random_product_law<R: Rng>(rng: &mut R, lists: &[Vec<CodeFunction>]) -> Result<CodeFunctionDistribution> {
    let marginals = lists
        .iter()
        .map(|l| l.iter().cloned().zip(simplex_point(rng, l.len(), true)).collect())
        .collect();
    CodeFunctionDistribution::product(marginals)
}
