//! Maximization over code-function distributions.
//!
//! A [`TupleSpace`] fixes the candidate code-function tuples and their induced
//! channels `P(y_K^L | a_K^L)`. Cut objectives `I(A_S; Y_O | A_{S^c}) / L` are
//! concave in the tuple law and have the closed-form gradient
//! `∂/∂p(a) = D(P(·|a) ‖ Q_{a_{S^c}}) / L`, where `Q_g` is the output law
//! conditioned on the complement tuple `g`.

use std::collections::HashMap;

use serde::Serialize;

use crate::model::{
    complement, enumerate_code_functions, BlockChannel, CodeFunction, CodeFunctionDistribution, NetworkSession,
    DEFAULT_CAP,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ba,
    Subgradient,
    Grid,
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizationResult {
    /// Bits per channel use.
    pub value: f64,
    /// Maximizing code-function law, when the search ran over tuples.
    #[serde(skip)]
    pub distribution: Option<CodeFunctionDistribution>,
    /// Weights over tuples, or the parameter vector for scheme sweeps.
    pub params: Vec<f64>,
    pub iterations: usize,
    /// Upper-minus-lower bracket when the method provides one.
    pub gap: Option<f64>,
    pub method: Method,
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    /// Stopping tolerance on the Blahut–Arimoto bracket (bits per block).
    pub tol: f64,
    pub max_iter: usize,
    pub subgradient_iter: usize,
    /// Cap on the number of code-function tuples.
    pub cap: u128,
}

impl Default for Options {
    fn default() -> Self {
        Options { tol: 1e-9, max_iter: 100_000, subgradient_iter: 20_000, cap: DEFAULT_CAP }
    }
}

/// Grid points allowed in [`grid_maximize`] and [`simplex_maximize`].
pub const MAX_GRID: u128 = 10_000_000;
/// Simplex-grid budget of the max-min fallback.
pub const FALLBACK_GRID: u128 = 10_000;

/// Candidate code-function tuples together with their induced channels.
#[derive(Clone, Debug)]
pub struct TupleSpace {
    pub tuples: Vec<Vec<CodeFunction>>,
    channels: Vec<Vec<(Vec<Vec<usize>>, f64)>>,
    l: usize,
}

impl TupleSpace {
    /// Every combination of every node's code functions.
    pub fn new(ch: &BlockChannel, cap: u128) -> Result<Self> {
        let lists = (0..ch.k()).map(|k| enumerate_code_functions(ch.node(k), k, cap)).collect::<Result<Vec<_>>>()?;
        Self::from_lists(ch, &lists, cap)
    }

    /// The Cartesian product of per-node candidate lists.
    pub fn from_lists(ch: &BlockChannel, lists: &[Vec<CodeFunction>], cap: u128) -> Result<Self> {
        let total = lists.iter().try_fold(1u128, |acc, l| acc.checked_mul(l.len() as u128)).unwrap_or(u128::MAX);
        if total > cap {
            return Err(Error::TooLarge(total, cap));
        }
        let mut tuples: Vec<Vec<CodeFunction>> = vec![Vec::new()];
        for list in lists {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    list.iter().map(move |f| {
                        let mut t = t.clone();
                        t.push(f.clone());
                        t
                    })
                })
                .collect();
        }
        Self::from_tuples(ch, tuples)
    }

    pub fn from_tuples(ch: &BlockChannel, tuples: Vec<Vec<CodeFunction>>) -> Result<Self> {
        if tuples.is_empty() {
            return Err(Error::Invalid("empty tuple space".into()));
        }
        let channels = tuples
            .iter()
            .map(|t| ch.induced_channel(t).map(|m| m.into_iter().collect()))
            .collect::<Result<Vec<_>>>()?;
        Ok(TupleSpace { tuples, channels, l: ch.l() })
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn block_length(&self) -> usize {
        self.l
    }

    /// `P(y | a)` of tuple `a`, keyed by `y[k][i]`.
    pub fn channel(&self, a: usize) -> &[(Vec<Vec<usize>>, f64)] {
        &self.channels[a]
    }

    /// The law putting weight `p[a]` on tuple `a`.
    pub fn distribution(&self, p: &[f64]) -> Result<CodeFunctionDistribution> {
        let total: f64 = p.iter().filter(|&&v| v > 0.0).sum();
        let entries = self
            .tuples
            .iter()
            .zip(p)
            .filter(|(_, &v)| v > 1e-15)
            .map(|(t, &v)| (t.clone(), v / total))
            .collect();
        CodeFunctionDistribution::joint(entries)
    }

    /// `I(A_S; Y_observe | A_{S^c}) / L`.
    pub fn objective(&self, s: &[usize], observe: &[usize]) -> Result<CutObjective> {
        let width = self.tuples[0].len();
        if s.is_empty() || s.iter().chain(observe).any(|&j| j >= width) {
            return Err(Error::InvalidCut(format!("S = {s:?}, observed = {observe:?} for {width} nodes")));
        }
        let rest = complement(s, width);
        let mut group_ids: HashMap<Vec<&CodeFunction>, usize> = HashMap::new();
        let mut local: Vec<HashMap<Vec<&Vec<usize>>, u32>> = Vec::new();
        let mut groups = Vec::with_capacity(self.len());
        let mut rows = Vec::with_capacity(self.len());
        for (t, chan) in self.tuples.iter().zip(&self.channels) {
            let key: Vec<&CodeFunction> = rest.iter().map(|&j| &t[j]).collect();
            let next = group_ids.len();
            let g = *group_ids.entry(key).or_insert(next);
            if g == local.len() {
                local.push(HashMap::new());
            }
            let mut row: HashMap<u32, f64> = HashMap::new();
            for (y, w) in chan {
                let yk: Vec<&Vec<usize>> = observe.iter().map(|&j| &y[j]).collect();
                let n = local[g].len() as u32;
                let idx = *local[g].entry(yk).or_insert(n);
                *row.entry(idx).or_insert(0.0) += w;
            }
            let mut row: Vec<(u32, f64)> = row.into_iter().filter(|&(_, w)| w > 0.0).collect();
            row.sort_unstable_by_key(|&(i, _)| i);
            groups.push(g);
            rows.push(row);
        }
        let mut offsets = Vec::with_capacity(local.len() + 1);
        offsets.push(0);
        for m in &local {
            offsets.push(offsets.last().unwrap() + m.len());
        }
        Ok(CutObjective { groups, rows, offsets, scale: 1.0 / self.l as f64 })
    }
}

/// A concave objective `Σ_a p(a) D(W_a ‖ Q_{g(a)}) · scale` over a tuple space.
#[derive(Clone, Debug)]
pub struct CutObjective {
    groups: Vec<usize>,
    rows: Vec<Vec<(u32, f64)>>,
    offsets: Vec<usize>,
    scale: f64,
}

impl CutObjective {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn group_count(&self) -> usize {
        self.offsets.len() - 1
    }

    fn mixtures(&self, p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut mass = vec![0.0; self.group_count()];
        let mut mix = vec![0.0; *self.offsets.last().unwrap()];
        for (a, row) in self.rows.iter().enumerate() {
            if p[a] <= 0.0 {
                continue;
            }
            let g = self.groups[a];
            mass[g] += p[a];
            for &(j, w) in row {
                mix[self.offsets[g] + j as usize] += p[a] * w;
            }
        }
        (mass, mix)
    }

    fn divergences(&self, p: &[f64]) -> Vec<f64> {
        let (mass, mix) = self.mixtures(p);
        self.rows
            .iter()
            .enumerate()
            .map(|(a, row)| {
                let g = self.groups[a];
                if mass[g] <= 0.0 {
                    return 0.0;
                }
                row.iter()
                    .map(|&(j, w)| {
                        let q = mix[self.offsets[g] + j as usize] / mass[g];
                        if q > 0.0 {
                            w * (w / q).log2()
                        } else {
                            0.0
                        }
                    })
                    .sum()
            })
            .collect()
    }

    /// Objective value in bits per use.
    pub fn value(&self, p: &[f64]) -> f64 {
        self.value_and_gradient(p).0
    }

    /// Value and gradient (both per use).
    pub fn value_and_gradient(&self, p: &[f64]) -> (f64, Vec<f64>) {
        let d = self.divergences(p);
        let v: f64 = d.iter().zip(p).map(|(d, p)| d * p).sum();
        (v * self.scale, d.into_iter().map(|x| x * self.scale).collect())
    }

    /// The objective restricted to a subset of tuples.
    fn restrict(&self, subset: &[usize]) -> CutObjective {
        CutObjective {
            groups: subset.iter().map(|&a| self.groups[a]).collect(),
            rows: subset.iter().map(|&a| self.rows[a].clone()).collect(),
            offsets: self.offsets.clone(),
            scale: self.scale,
        }
    }
}

struct BaOutcome {
    p: Vec<f64>,
    value: f64,
    gap: f64,
    iterations: usize,
}

/// Blahut–Arimoto over rows `W_a` (single group), in bits per block.
/// Stops once the capacity bracket is below `tol`, or once its upper end
/// falls below `stop_below`.
fn blahut_arimoto(rows: &[Vec<(u32, f64)>], width: usize, opts: &Options, stop_below: f64) -> Result<BaOutcome> {
    let n = rows.len();
    let mut p = vec![1.0 / n as f64; n];
    let mut q = vec![0.0; width];
    let mut d = vec![0.0; n];
    let mut last = f64::NEG_INFINITY;
    let mut iterations = 0;
    loop {
        q.iter_mut().for_each(|v| *v = 0.0);
        for (a, row) in rows.iter().enumerate() {
            for &(j, w) in row {
                q[j as usize] += p[a] * w;
            }
        }
        for (a, row) in rows.iter().enumerate() {
            d[a] = row.iter().map(|&(j, w)| if q[j as usize] > 0.0 { w * (w / q[j as usize]).log2() } else { 0.0 }).sum();
        }
        let value: f64 = p.iter().zip(&d).map(|(p, d)| p * d).sum();
        if value < last - 1e-10 {
            return Err(Error::Numerical(format!("Blahut–Arimoto iterate decreased from {last} to {value}")));
        }
        last = value;
        let dmax = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = p.iter().zip(&d).map(|(p, d)| p * (d - dmax).exp2()).sum();
        let lower = dmax + z.log2();
        let gap = dmax - lower;
        if gap < opts.tol || iterations >= opts.max_iter || dmax < stop_below {
            return Ok(BaOutcome { p, value, gap, iterations });
        }
        for (pa, da) in p.iter_mut().zip(&d) {
            *pa *= (da - dmax).exp2() / z;
        }
        iterations += 1;
    }
}

/// Maximizes a single cut objective: the best complement group, with
/// Blahut–Arimoto inside it. Returns weights over the objective's tuples.
fn maximize_grouped(obj: &CutObjective, opts: &Options, stop_below: f64) -> Result<(Vec<f64>, f64, f64, usize)> {
    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    let mut iterations = 0;
    for g in 0..obj.group_count() {
        let members: Vec<usize> = (0..obj.len()).filter(|&a| obj.groups[a] == g).collect();
        if members.is_empty() {
            continue;
        }
        let rows: Vec<Vec<(u32, f64)>> = members.iter().map(|&a| obj.rows[a].clone()).collect();
        let width = obj.offsets[g + 1] - obj.offsets[g];
        let floor = best.as_ref().map_or(stop_below, |b| b.1.max(stop_below)) / obj.scale;
        let ba = blahut_arimoto(&rows, width, opts, floor)?;
        iterations += ba.iterations;
        let value = ba.value * obj.scale;
        if best.as_ref().map_or(true, |b| value > b.1) {
            let mut p = vec![0.0; obj.len()];
            for (&a, &w) in members.iter().zip(&ba.p) {
                p[a] = w;
            }
            best = Some((p, value, ba.gap * obj.scale));
        }
    }
    let (p, v, gap) = best.ok_or_else(|| Error::Invalid("objective has no tuples".into()))?;
    Ok((p, v, gap, iterations))
}

/// Capacity `max I(A^L; Y^L) / L` of a two-node point-to-point channel
/// (node 0 transmits, node 1 only receives).
pub fn maximize_point_to_point(ch: &BlockChannel, opts: &Options) -> Result<OptimizationResult> {
    if ch.k() != 2 || ch.node(1).has_input() {
        return Err(Error::Shape("point-to-point needs two nodes with a receiver that sends nothing".into()));
    }
    let space = TupleSpace::new(ch, opts.cap)?;
    maximize_single(&space, &space.objective(&[0], &[1])?, opts)
}

/// Maximizes one cut objective over the whole tuple space.
pub fn maximize_single(space: &TupleSpace, obj: &CutObjective, opts: &Options) -> Result<OptimizationResult> {
    let (p, value, gap, iterations) = maximize_grouped(obj, opts, f64::NEG_INFINITY)?;
    Ok(OptimizationResult {
        value,
        distribution: Some(space.distribution(&p)?),
        params: p,
        iterations,
        gap: Some(gap),
        method: Method::Ba,
    })
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, &x) in u.iter().enumerate() {
        acc += x;
        let t = (acc - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

fn min_value(objs: &[CutObjective], p: &[f64]) -> f64 {
    objs.iter().map(|o| o.value(p)).fold(f64::INFINITY, f64::min)
}

/// Maximizes `min_j objs[j]` over tuple laws: a single objective goes to
/// Blahut–Arimoto; otherwise projected subgradient ascent with a simplex
/// grid fallback when the tuple space is small, keeping the better answer.
pub fn maximize_min(space: &TupleSpace, objs: &[CutObjective], opts: &Options) -> Result<OptimizationResult> {
    if objs.is_empty() {
        return Err(Error::Invalid("no objectives".into()));
    }
    if objs.len() == 1 {
        return maximize_single(space, &objs[0], opts);
    }
    let n = space.len();
    let grid = (n as u128 <= FALLBACK_GRID).then(|| {
        simplex_maximize(n, grid_resolution(n), |p| Ok(min_value(objs, p)))
    });
    let grid = grid.transpose()?;
    let target = grid.as_ref().map(|g| g.value);

    let mut p = vec![1.0 / n as f64; n];
    let mut best = (min_value(objs, &p), p.clone());
    for t in 1..=opts.subgradient_iter {
        let evals: Vec<(f64, Vec<f64>)> = objs.iter().map(|o| o.value_and_gradient(&p)).collect();
        let m = evals.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
        if m > best.0 {
            best = (m, p.clone());
        }
        let active: Vec<&Vec<f64>> = evals.iter().filter(|e| e.0 <= m + 1e-9).map(|e| &e.1).collect();
        let mut g = vec![0.0; n];
        for a in &active {
            for (gi, ai) in g.iter_mut().zip(a.iter()) {
                *gi += ai / active.len() as f64;
            }
        }
        let mean = g.iter().sum::<f64>() / n as f64;
        g.iter_mut().for_each(|v| *v -= mean);
        let norm2: f64 = g.iter().map(|v| v * v).sum();
        if norm2 < 1e-24 {
            break;
        }
        let step = match target {
            Some(tv) if tv > m + 1e-12 => (tv - m) / norm2,
            _ => 0.5 / (t as f64).sqrt() / norm2.sqrt(),
        };
        let moved: Vec<f64> = p.iter().zip(&g).map(|(pi, gi)| pi + step * gi).collect();
        p = project_simplex(&moved);
    }
    let sub = OptimizationResult {
        value: best.0,
        distribution: None,
        params: best.1,
        iterations: opts.subgradient_iter,
        gap: None,
        method: Method::Subgradient,
    };
    let mut out = match grid {
        Some(g) if g.value > sub.value => g,
        _ => sub,
    };
    if n <= 64 {
        let (v, p) = refine_simplex(|p| Ok(min_value(objs, p)), &out.params, 1e-7)?;
        out.value = v;
        out.params = p;
    }
    out.distribution = Some(space.distribution(&out.params)?);
    Ok(out)
}

/// Maximizes the cut-set minimum `min_S I(A_S; Y_{S^c} | A_{S^c}) / L` of a
/// single-message session over dependent code-function laws.
pub fn maximize_cutset_minimum(session: &NetworkSession, ch: &BlockChannel, opts: &Options) -> Result<OptimizationResult> {
    if session.messages().len() != 1 {
        return Err(Error::Invalid(
            "the cut-set minimum is scalar only for one message; evaluate per-cut bounds with weights instead".into(),
        ));
    }
    if session.k() != ch.k() {
        return Err(Error::Shape(format!("session has {} nodes, channel {}", session.k(), ch.k())));
    }
    let space = TupleSpace::new(ch, opts.cap)?;
    let objs = session
        .cuts(false)?
        .iter()
        .map(|s| space.objective(s, &complement(s, ch.k())))
        .collect::<Result<Vec<_>>>()?;
    maximize_min(&space, &objs, opts)
}

/// Maximizes an arbitrary (not necessarily concave) functional of the tuple
/// law: the finest simplex grid within [`FALLBACK_GRID`] points, then a
/// pairwise-transfer polish when the space has at most 64 tuples.
pub fn maximize_functional<F>(space: &TupleSpace, mut f: F) -> Result<OptimizationResult>
where
    F: FnMut(&CodeFunctionDistribution) -> Result<f64>,
{
    let n = space.len();
    if n as u128 > FALLBACK_GRID {
        return Err(Error::TooLarge(n as u128, FALLBACK_GRID));
    }
    let mut eval = |p: &[f64]| f(&space.distribution(p)?);
    let mut out = simplex_maximize(n, grid_resolution(n), &mut eval)?;
    if n <= 64 {
        let (v, p) = refine_simplex(&mut eval, &out.params, 1e-7)?;
        out.value = v;
        out.params = p;
    }
    out.distribution = Some(space.distribution(&out.params)?);
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportCertificate {
    /// Tuple indices of the support found, in canonical order.
    pub support: Vec<usize>,
    pub result: OptimizationResult,
    pub full_value: f64,
    /// `full_value − result.value`.
    pub gap: f64,
    pub certified: bool,
    pub exhaustive: bool,
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Searches for a support of at most `bound` tuples attaining the optimum of
/// `obj` within 1e-6: exhaustively when `C(N, bound) ≤ 10^6` (smallest sizes
/// first, canonical order within a size), else by greedy pruning.
pub fn support_reduction(space: &TupleSpace, obj: &CutObjective, bound: usize, opts: &Options) -> Result<SupportCertificate> {
    if bound == 0 {
        return Err(Error::Invalid("support bound must be at least 1".into()));
    }
    let (full_p, full, _, _) = maximize_grouped(obj, opts, f64::NEG_INFINITY)?;
    let n = obj.len();
    let bound = bound.min(n);
    let target = full - 1e-6;
    let finish = |support: Vec<usize>, p_sub: Vec<f64>, value: f64, iterations: usize, exhaustive: bool| {
        let mut params = vec![0.0; n];
        for (&a, &w) in support.iter().zip(&p_sub) {
            params[a] = w;
        }
        let value = value.min(full + 1e-9);
        Ok::<_, Error>(SupportCertificate {
            result: OptimizationResult {
                value,
                distribution: Some(space.distribution(&params)?),
                params,
                iterations,
                gap: Some(full - value),
                method: Method::Ba,
            },
            support,
            full_value: full,
            gap: full - value,
            certified: value >= target,
            exhaustive,
        })
    };
    let mut iterations = 0;
    if binomial(n as u128, bound as u128) <= 1_000_000 {
        let mut best: Option<(Vec<usize>, Vec<f64>, f64)> = None;
        for size in 1..=bound {
            let mut subset: Vec<usize> = (0..size).collect();
            loop {
                let sub = obj.restrict(&subset);
                let (p, v, _, it) = maximize_grouped(&sub, opts, target)?;
                iterations += it;
                if v >= target {
                    return finish(subset, p, v, iterations, true);
                }
                if best.as_ref().map_or(true, |b| v > b.2) {
                    best = Some((subset.clone(), p, v));
                }
                if !next_combination(&mut subset, n) {
                    break;
                }
            }
        }
        let (s, p, v) = best.expect("at least one subset");
        return finish(s, p, v, iterations, true);
    }
    // Greedy: repeatedly drop the lightest tuple of the current optimizer.
    let mut support: Vec<usize> = (0..n).filter(|&a| full_p[a] > 1e-12).collect();
    let mut weights: Vec<f64> = support.iter().map(|&a| full_p[a]).collect();
    let mut value = full;
    while support.len() > bound {
        let drop = weights.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap();
        support.remove(drop);
        let (p, v, _, it) = maximize_grouped(&obj.restrict(&support), opts, f64::NEG_INFINITY)?;
        iterations += it;
        weights = p;
        value = v;
    }
    finish(support, weights, value, iterations, false)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Finest simplex-grid resolution with at most [`FALLBACK_GRID`] points (at most 1000).
pub fn grid_resolution(n: usize) -> usize {
    let mut r = 1;
    while r < 1000 && simplex_points(n, r + 1) <= FALLBACK_GRID {
        r += 1;
    }
    r
}

/// Number of points `C(n + r − 1, r)` of the simplex grid with step `1/r`.
pub fn simplex_points(n: usize, r: usize) -> u128 {
    binomial((n + r - 1) as u128, r as u128)
}

/// Exhaustive search over `[0,1]^dims` with `steps + 1` points per axis.
/// Ties go to the lexicographically smallest parameter vector.
pub fn grid_maximize<F>(dims: usize, steps: usize, mut f: F) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let per = steps as u128 + 1;
    let total = (0..dims).try_fold(1u128, |acc, _| acc.checked_mul(per)).unwrap_or(u128::MAX);
    if total > MAX_GRID {
        return Err(Error::TooLarge(total, MAX_GRID));
    }
    let mut idx = vec![0usize; dims];
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut evals = 0;
    loop {
        let x: Vec<f64> = idx.iter().map(|&i| if steps == 0 { 0.0 } else { i as f64 / steps as f64 }).collect();
        let v = f(&x)?;
        evals += 1;
        if best.as_ref().map_or(true, |b| v > b.0) {
            best = Some((v, x));
        }
        let mut d = dims;
        loop {
            if d == 0 {
                let (value, params) = best.unwrap();
                return Ok(OptimizationResult { value, distribution: None, params, iterations: evals, gap: None, method: Method::Grid });
            }
            d -= 1;
            if idx[d] < steps {
                idx[d] += 1;
                idx[d + 1..].iter_mut().for_each(|v| *v = 0);
                break;
            }
        }
    }
}

/// Exhaustive search over the simplex grid `{p : r·p ∈ ℕ^n}`, enumerated in
/// increasing lexicographic order so ties keep the smallest vector.
pub fn simplex_maximize<F>(n: usize, r: usize, mut f: F) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if n == 0 || r == 0 {
        return Err(Error::Invalid("simplex grid needs n ≥ 1 and r ≥ 1".into()));
    }
    let total = simplex_points(n, r);
    if total > MAX_GRID {
        return Err(Error::TooLarge(total, MAX_GRID));
    }
    let mut counts = vec![0usize; n];
    counts[n - 1] = r;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut evals = 0;
    loop {
        let p: Vec<f64> = counts.iter().map(|&c| c as f64 / r as f64).collect();
        let v = f(&p)?;
        evals += 1;
        if best.as_ref().map_or(true, |b| v > b.0) {
            best = Some((v, p));
        }
        // Next composition in lexicographic order: bump the rightmost
        // position (before the last) that can take one unit from the tail.
        let mut advanced = false;
        for i in (0..n - 1).rev() {
            let tail: usize = counts[i + 1..].iter().sum();
            if tail > 0 {
                counts[i] += 1;
                counts[i + 1..].iter_mut().for_each(|c| *c = 0);
                counts[n - 1] = tail - 1;
                advanced = true;
                break;
            }
        }
        if !advanced {
            let (value, params) = best.unwrap();
            return Ok(OptimizationResult { value, distribution: None, params, iterations: evals, gap: None, method: Method::Grid });
        }
    }
}

/// Local polish on the simplex: move mass between pairs of coordinates with
/// halving step sizes while the objective improves.
pub fn refine_simplex<F>(mut f: F, start: &[f64], min_step: f64) -> Result<(f64, Vec<f64>)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = start.len();
    let mut p = start.to_vec();
    let mut v = f(&p)?;
    let mut step = 0.25;
    while step >= min_step {
        let mut improved = false;
        for i in 0..n {
            for j in 0..n {
                if i == j || p[i] <= 0.0 {
                    continue;
                }
                let delta = step.min(p[i]);
                let mut q = p.clone();
                q[i] -= delta;
                q[j] += delta;
                let w = f(&q)?;
                if w > v + 1e-15 {
                    p = q;
                    v = w;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok((v, p))
}
