//! Random instances and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use nibm::model::random::{code_function_lists, random_channel, random_joint_law, random_nodes, simplex_point};
use nibm::model::{
    AuxSpec, BlockChannel, CfEntry, CodeFunction, CodeFunctionDistribution, History, NodeSpec, StepFn,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random channel with `K ≤ 3`, `L ≤ 2`, alphabets ≤ 3, and a dependent law
/// over at most 8 code-function tuples.
pub fn random_instance(seed: u64) -> (BlockChannel, CodeFunctionDistribution) {
    let mut r = rng(seed);
    let k = r.gen_range(2..=3);
    let l = r.gen_range(1..=2);
    let nodes = random_nodes(&mut r, k, l, 3);
    let ch = random_channel(nodes, seed, r.gen_bool(0.3)).unwrap();
    let lists = code_function_lists(&ch).unwrap();
    let support = r.gen_range(1..=8);
    let pa = random_joint_law(&mut r, &lists, support).unwrap();
    (ch, pa)
}

/// A second law on the same channel, for mixing.
pub fn another_law(ch: &BlockChannel, seed: u64) -> CodeFunctionDistribution {
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let lists = code_function_lists(ch).unwrap();
    let support = r.gen_range(1..=8);
    random_joint_law(&mut r, &lists, support).unwrap()
}

/// Product law over up to `m` randomly chosen code functions per node.
pub fn sub_product_law<R: Rng>(r: &mut R, ch: &BlockChannel, m: usize) -> CodeFunctionDistribution {
    let lists = code_function_lists(ch).unwrap();
    let marginals = lists
        .into_iter()
        .map(|mut l| {
            l.shuffle(r);
            l.truncate(m);
            let w = simplex_point(r, l.len(), false);
            l.into_iter().zip(w).collect()
        })
        .collect();
    CodeFunctionDistribution::product(marginals).unwrap()
}

/// Random three-node relay channel: the source hears nothing and the
/// destination sends nothing.
pub fn random_relay(seed: u64) -> BlockChannel {
    let mut r = rng(seed);
    let l = r.gen_range(1..=2);
    let size = |r: &mut ChaCha8Rng| r.gen_range(1..=3usize);
    let x1: Vec<usize> = (0..l).map(|_| size(&mut r)).collect();
    let x2: Vec<usize> = (0..l).map(|_| size(&mut r)).collect();
    let y2: Vec<usize> = (0..l).map(|_| size(&mut r)).collect();
    let y3: Vec<usize> = (0..l).map(|_| size(&mut r)).collect();
    let nodes = vec![
        NodeSpec::sized(&x1, &vec![1; l]).unwrap(),
        NodeSpec::sized(&x2, &y2).unwrap(),
        NodeSpec::sized(&vec![1; l], &y3).unwrap(),
    ];
    random_channel(nodes, seed, false).unwrap()
}

/// Random two-user MAC over `l` letters whose output is fed back to both
/// transmitters unchanged.
pub fn random_feedback_mac(seed: u64, l: usize) -> BlockChannel {
    let mut r = rng(seed);
    let ny: Vec<usize> = (0..l).map(|_| r.gen_range(2..=3)).collect();
    let tx = NodeSpec::sized(&vec![2; l], &ny).unwrap();
    let rx = NodeSpec::sized(&vec![1; l], &ny).unwrap();
    let steps: Vec<StepFn> = (0..l)
        .map(|i| -> StepFn {
            let n = ny[i];
            Arc::new(move |h: &History, _| {
                let mut hasher = DefaultHasher::new();
                (seed, i, &h.x, &h.y).hash(&mut hasher);
                let row = simplex_point(&mut rng(hasher.finish()), n, false);
                row.into_iter().enumerate().map(|(y, p)| (vec![y, y, y], p)).collect()
            })
        })
        .collect();
    BlockChannel::new(vec![tx.clone(), tx, rx], vec![1.0], steps).unwrap()
}

/// Law `p(v) p(a1|v) p(a2|v)` with a random auxiliary `V`.
pub fn conditionally_independent_mac_law<R: Rng>(r: &mut R, ch: &BlockChannel) -> CodeFunctionDistribution {
    let lists = code_function_lists(ch).unwrap();
    let nv = r.gen_range(1..=3);
    let pv = simplex_point(r, nv, false);
    let mut entries = Vec::new();
    for (v, &p) in pv.iter().enumerate() {
        let pick = |r: &mut R, l: &[CodeFunction]| -> Vec<(CodeFunction, f64)> {
            let mut l = l.to_vec();
            l.shuffle(r);
            l.truncate(3);
            let w = simplex_point(r, l.len(), true);
            l.into_iter().zip(w).filter(|(_, w)| *w > 0.0).collect()
        };
        let m1 = pick(r, &lists[0]);
        let m2 = pick(r, &lists[1]);
        for (f1, p1) in &m1 {
            for (f2, p2) in &m2 {
                entries.push(CfEntry { aux: vec![v], funcs: vec![f1.clone(), f2.clone(), lists[2][0].clone()], p: p * p1 * p2 });
            }
        }
    }
    CodeFunctionDistribution::with_aux(vec![AuxSpec::new("V", nv)], entries).unwrap()
}

fn entropy_of(m: &HashMap<Vec<usize>, f64>) -> f64 {
    m.values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

fn marginal(cells: &[(Vec<usize>, f64)], coords: &[usize]) -> HashMap<Vec<usize>, f64> {
    let mut out = HashMap::new();
    for (c, p) in cells {
        *out.entry(coords.iter().map(|&i| c[i]).collect()).or_insert(0.0) += p;
    }
    out
}

/// `I(A;B|C)` from an explicit list of cells, by four marginal entropies.
pub fn brute_mi(cells: &[(Vec<usize>, f64)], a: &[usize], b: &[usize], c: &[usize]) -> f64 {
    let ac: Vec<usize> = [a, c].concat();
    let bc: Vec<usize> = [b, c].concat();
    let abc: Vec<usize> = [a, b, c].concat();
    entropy_of(&marginal(cells, &ac)) + entropy_of(&marginal(cells, &bc))
        - entropy_of(&marginal(cells, &abc))
        - entropy_of(&marginal(cells, c))
}

/// Classic cut value `I(X_S; Y_{S^c} | X_{S^c})` of a single-letter channel,
/// computed from the kernel and the input law alone. Cells are laid out as
/// `(x_1..x_K, y_1..y_K)`.
pub fn classic_cut(ch: &BlockChannel, pa: &CodeFunctionDistribution, s: &[usize]) -> f64 {
    assert_eq!(ch.l(), 1);
    let k = ch.k();
    let mut cells = Vec::new();
    for e in pa.entries() {
        let x: Vec<usize> = (0..k).map(|n| e.funcs[n].input(ch.node(n), 0, &[])).collect();
        for (y, q) in ch.induced_channel(&e.funcs).unwrap() {
            let mut c = x.clone();
            c.extend(y.iter().map(|yn| yn[0]));
            cells.push((c, e.p * q));
        }
    }
    let sc: Vec<usize> = (0..k).filter(|j| !s.contains(j)).collect();
    let ys: Vec<usize> = sc.iter().map(|&j| k + j).collect();
    brute_mi(&cells, s, &ys, &sc)
}

/// `H(A_K, Y_K)` straight from the law and the induced channels.
pub fn brute_code_output_entropy(ch: &BlockChannel, pa: &CodeFunctionDistribution) -> f64 {
    let mut ids: HashMap<Vec<CodeFunction>, usize> = HashMap::new();
    let mut m: HashMap<Vec<usize>, f64> = HashMap::new();
    for e in pa.entries() {
        let n = ids.len();
        let id = *ids.entry(e.funcs.clone()).or_insert(n);
        for (y, q) in ch.induced_channel(&e.funcs).unwrap() {
            let mut key = vec![id];
            key.extend(y.into_iter().flatten());
            *m.entry(key).or_insert(0.0) += e.p * q;
        }
    }
    entropy_of(&m)
}

/// All nonempty proper cuts of `k` nodes.
pub fn all_cuts(k: usize) -> Vec<Vec<usize>> {
    (1..(1u32 << k) - 1).map(|m| (0..k).filter(|&j| m >> j & 1 == 1).collect()).collect()
}
