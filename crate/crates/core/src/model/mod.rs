//! Networks with in-block memory: channels, code functions and sessions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::prob::{Role, Var};
use crate::{Error, Joint, Result, TOL};

pub mod embed;
pub mod random;
pub mod spec;

/// Default cap on the number of code functions enumerated per node.
pub const DEFAULT_CAP: u128 = 1_000_000;

pub type Alphabet = Vec<String>;

/// Labels `"0"`, `"1"`, … for an alphabet of size `n`.
pub fn labels(n: usize) -> Alphabet {
    (0..n).map(|v| v.to_string()).collect()
}

/// The alphabet `{0}` used for an absent input or output.
pub fn absent() -> Alphabet {
    labels(1)
}

/// Per-time input and output alphabets of one node.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSpec {
    pub x: Vec<Alphabet>,
    pub y: Vec<Alphabet>,
}

impl NodeSpec {
    pub fn new(x: Vec<Alphabet>, y: Vec<Alphabet>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::BlockLength { expected: x.len(), found: y.len() });
        }
        if x.iter().chain(&y).any(Vec::is_empty) {
            return Err(Error::Invalid("alphabets must be nonempty".into()));
        }
        Ok(NodeSpec { x, y })
    }

    /// Node with sizes only; labels are `0..n-1`.
    pub fn sized(x: &[usize], y: &[usize]) -> Result<Self> {
        Self::new(x.iter().map(|&n| labels(n)).collect(), y.iter().map(|&n| labels(n)).collect())
    }

    /// Node with no inputs and no outputs.
    pub fn silent(l: usize) -> Self {
        NodeSpec { x: vec![absent(); l], y: vec![absent(); l] }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x_size(&self, i: usize) -> usize {
        self.x[i].len()
    }

    pub fn y_size(&self, i: usize) -> usize {
        self.y[i].len()
    }

    /// `|Y_k^{i}|`: number of output histories before time `i`.
    pub fn histories(&self, i: usize) -> u128 {
        self.y[..i].iter().map(|a| a.len() as u128).product()
    }

    /// `∏_i |X_{k,i}|^{|Y_k^{i-1}|}`, or `None` on overflow.
    pub fn code_function_count(&self) -> Option<u128> {
        let mut total: u128 = 1;
        for i in 0..self.len() {
            let h = u32::try_from(self.histories(i)).ok()?;
            total = total.checked_mul((self.x_size(i) as u128).checked_pow(h)?)?;
        }
        Some(total)
    }

    /// Whether some input can depend on an earlier output.
    pub fn uses_feedback(&self) -> bool {
        (1..self.len()).any(|i| self.x_size(i) > 1 && self.histories(i) > 1)
    }

    pub fn has_input(&self) -> bool {
        self.x.iter().any(|a| a.len() > 1)
    }

    pub fn has_output(&self) -> bool {
        self.y.iter().any(|a| a.len() > 1)
    }

    fn history_index(&self, y: &[usize]) -> usize {
        y.iter().zip(&self.y).fold(0, |acc, (&v, a)| acc * a.len() + v)
    }
}

/// Partial history of one block: `x[k]` holds the inputs of node `k` up to
/// and including the current letter, `y[k]` the outputs strictly before it.
#[derive(Clone, Debug, Default)]
pub struct History {
    pub x: Vec<Vec<usize>>,
    pub y: Vec<Vec<usize>>,
}

/// Per-letter kernel: given the history and the block noise index, the
/// possible output tuples `y_{K,i}` with their probabilities.
pub type StepFn = Arc<dyn Fn(&History, usize) -> Vec<(Vec<usize>, f64)> + Send + Sync>;
/// Deterministic per-letter map: output tuple from history and noise index.
pub type MapFn = Arc<dyn Fn(&History, usize) -> Vec<usize> + Send + Sync>;
/// Split of a noise index into per-node, per-time components.
pub type NoiseSplit = Arc<dyn Fn(usize) -> Vec<Vec<usize>> + Send + Sync>;

#[derive(Clone)]
struct NoiseParts {
    alphabets: Vec<Vec<Alphabet>>,
    split: NoiseSplit,
}

/// A NiBM over one block:
/// `P(y_K^L ‖ x_K^L) = Σ_z P(z) ∏_i W_i(y_{K,i} | x_K^i, y_K^{i-1}, z)`.
///
/// The block noise `z` covers both views of a channel: functional channels
/// (deterministic maps driven by `z`) and plain causal kernels (`|Z| = 1`).
#[derive(Clone)]
pub struct BlockChannel {
    nodes: Vec<NodeSpec>,
    l: usize,
    noise: Vec<f64>,
    steps: Vec<StepFn>,
    deterministic_steps: bool,
    parts: Option<NoiseParts>,
}

impl fmt::Debug for BlockChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockChannel")
            .field("nodes", &self.nodes)
            .field("l", &self.l)
            .field("noise", &self.noise)
            .field("deterministic_steps", &self.deterministic_steps)
            .finish_non_exhaustive()
    }
}

impl BlockChannel {
    /// Stochastic kernels, optionally mixed over a block noise law.
    pub fn new(nodes: Vec<NodeSpec>, noise: Vec<f64>, steps: Vec<StepFn>) -> Result<Self> {
        let l = nodes.first().map(NodeSpec::len).ok_or_else(|| Error::Shape("no nodes".into()))?;
        if l == 0 {
            return Err(Error::Shape("block length must be positive".into()));
        }
        if let Some(n) = nodes.iter().find(|n| n.len() != l) {
            return Err(Error::BlockLength { expected: l, found: n.len() });
        }
        if steps.len() != l {
            return Err(Error::BlockLength { expected: l, found: steps.len() });
        }
        check_row("noise law", &noise)?;
        Ok(BlockChannel { nodes, l, noise, steps, deterministic_steps: false, parts: None })
    }

    /// Deterministic maps driven by a block noise law.
    pub fn functional(nodes: Vec<NodeSpec>, noise: Vec<f64>, maps: Vec<MapFn>) -> Result<Self> {
        let steps = maps
            .into_iter()
            .map(|m| -> StepFn { Arc::new(move |h: &History, z: usize| vec![(m(h, z), 1.0)]) })
            .collect();
        let mut ch = Self::new(nodes, noise, steps)?;
        ch.deterministic_steps = true;
        Ok(ch)
    }

    /// Declare the channel additive: the noise index splits into per-node,
    /// per-time components `Z_{k,i}` with the given alphabets.
    pub fn with_noise_parts(mut self, alphabets: Vec<Vec<Alphabet>>, split: NoiseSplit) -> Result<Self> {
        if alphabets.len() != self.k() || alphabets.iter().any(|a| a.len() != self.l) {
            return Err(Error::Shape("noise components must be given for every node and time".into()));
        }
        for z in 0..self.noise.len() {
            let parts = split(z);
            let ok = parts.len() == self.k()
                && parts.iter().zip(&alphabets).all(|(p, a)| p.len() == self.l && p.iter().zip(a).all(|(&v, al)| v < al.len()));
            if !ok {
                return Err(Error::Shape(format!("noise split of index {z} does not match the component alphabets")));
            }
        }
        self.parts = Some(NoiseParts { alphabets, split });
        Ok(self)
    }

    /// Mark the kernels as deterministic given the block noise.
    pub fn assume_deterministic_steps(mut self) -> Self {
        self.deterministic_steps = true;
        self
    }

    pub fn k(&self) -> usize {
        self.nodes.len()
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn node(&self, k: usize) -> &NodeSpec {
        &self.nodes[k]
    }

    pub fn noise(&self) -> &[f64] {
        &self.noise
    }

    pub fn is_additive(&self) -> bool {
        self.parts.is_some()
    }

    /// Noise-free: outputs are a function of the inputs.
    pub fn is_deterministic(&self) -> bool {
        self.deterministic_steps && self.noise.iter().filter(|&&p| p > 0.0).count() <= 1
    }

    /// Enumerate every path of the block under the given code functions.
    /// `visit(z, history, probability)` is called at each complete block.
    pub fn rollout(&self, funcs: &[CodeFunction], visit: &mut dyn FnMut(usize, &History, f64)) -> Result<()> {
        if funcs.len() != self.k() {
            return Err(Error::Shape(format!("{} code functions for {} nodes", funcs.len(), self.k())));
        }
        for (k, f) in funcs.iter().enumerate() {
            f.check(&self.nodes[k])?;
        }
        let mut h = History { x: vec![Vec::with_capacity(self.l); self.k()], y: vec![Vec::with_capacity(self.l); self.k()] };
        for (z, &pz) in self.noise.iter().enumerate() {
            if pz > 0.0 {
                self.descend(funcs, z, 0, pz, &mut h, visit)?;
            }
        }
        Ok(())
    }

    fn descend(
        &self,
        funcs: &[CodeFunction],
        z: usize,
        i: usize,
        p: f64,
        h: &mut History,
        visit: &mut dyn FnMut(usize, &History, f64),
    ) -> Result<()> {
        if i == self.l {
            visit(z, h, p);
            return Ok(());
        }
        for (k, f) in funcs.iter().enumerate() {
            let x = f.input(&self.nodes[k], i, &h.y[k]);
            h.x[k].push(x);
        }
        let outs = (self.steps[i])(h, z);
        let mut sum = 0.0;
        for (y, q) in &outs {
            if y.len() != self.k() || y.iter().enumerate().any(|(k, &v)| v >= self.nodes[k].y_size(i)) {
                return Err(Error::Shape(format!("kernel at time {} produced an invalid output tuple {y:?}", i + 1)));
            }
            if *q < 0.0 {
                return Err(Error::Negative { what: format!("kernel at time {}", i + 1), value: *q });
            }
            sum += q;
        }
        if (sum - 1.0).abs() > TOL {
            let ctx = format!("kernel row at time {} for inputs {:?}, outputs {:?}", i + 1, h.x, h.y);
            return Err(Error::NotNormalized { what: ctx, sum });
        }
        for (y, q) in outs {
            if q == 0.0 {
                continue;
            }
            for (k, &v) in y.iter().enumerate() {
                h.y[k].push(v);
            }
            self.descend(funcs, z, i + 1, p * q, h, visit)?;
            for yk in h.y.iter_mut() {
                yk.pop();
            }
        }
        for xk in h.x.iter_mut() {
            xk.pop();
        }
        Ok(())
    }

    /// `P(y_K^L | a_K^L)` as a map from output blocks (`y[k][i]`) to probabilities.
    pub fn induced_channel(&self, funcs: &[CodeFunction]) -> Result<BTreeMap<Vec<Vec<usize>>, f64>> {
        let mut out = BTreeMap::new();
        self.rollout(funcs, &mut |_, h, p| *out.entry(h.y.clone()).or_insert(0.0) += p)?;
        Ok(out)
    }

    /// The noise components of index `z`, if the channel is additive.
    pub fn noise_components(&self, z: usize) -> Option<Vec<Vec<usize>>> {
        self.parts.as_ref().map(|p| (p.split)(z))
    }
}

fn check_row(what: &str, row: &[f64]) -> Result<()> {
    if let Some(&v) = row.iter().find(|&&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::Negative { what: what.into(), value: v });
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > TOL {
        return Err(Error::NotNormalized { what: what.into(), sum });
    }
    Ok(())
}

/// A code function (code tree) of one node: for each time `i`, a table from
/// the node's output history `y_k^{i-1}` to its input `x_{k,i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodeFunction {
    pub node: usize,
    /// `tables[i][h]`: input index for history index `h` (first letter most significant).
    pub tables: Vec<Vec<usize>>,
}

impl CodeFunction {
    /// A codeword: the same input regardless of feedback.
    pub fn constant(node: usize, spec: &NodeSpec, xs: &[usize]) -> Self {
        let tables = (0..spec.len()).map(|i| vec![xs[i]; spec.histories(i) as usize]).collect();
        CodeFunction { node, tables }
    }

    /// The single code function of a node without inputs.
    pub fn silent(node: usize, spec: &NodeSpec) -> Self {
        Self::constant(node, spec, &vec![0; spec.len()])
    }

    pub fn input(&self, spec: &NodeSpec, i: usize, y_hist: &[usize]) -> usize {
        self.tables[i][spec.history_index(&y_hist[..i])]
    }

    fn check(&self, spec: &NodeSpec) -> Result<()> {
        let ok = self.tables.len() == spec.len()
            && self.tables.iter().enumerate().all(|(i, t)| {
                t.len() as u128 == spec.histories(i) && t.iter().all(|&x| x < spec.x_size(i))
            });
        if ok {
            Ok(())
        } else {
            Err(Error::Shape(format!("code function does not match the alphabets of node {}", self.node + 1)))
        }
    }

    /// Label of the `i`-th table, e.g. `01` for "0 after y=0, 1 after y=1".
    pub fn table_label(&self, spec: &NodeSpec, i: usize) -> String {
        self.tables[i].iter().map(|&x| spec.x[i][x].as_str()).collect()
    }

    /// Tables of the times with a real input, joined by commas (`0,01`).
    pub fn label(&self, spec: &NodeSpec) -> String {
        let parts: Vec<String> =
            (0..spec.len()).filter(|&i| spec.x_size(i) > 1).map(|i| self.table_label(spec, i)).collect();
        if parts.is_empty() {
            "-".into()
        } else {
            parts.join(",")
        }
    }

    /// The inputs produced along an output history.
    pub fn inputs(&self, spec: &NodeSpec, y: &[usize]) -> Vec<usize> {
        (0..spec.len()).map(|i| self.input(spec, i, y)).collect()
    }
}

/// All code functions of a node in canonical order: lexicographic over the
/// concatenated (time, history) tables, earliest entry most significant.
pub fn enumerate_code_functions(spec: &NodeSpec, node: usize, cap: u128) -> Result<Vec<CodeFunction>> {
    let count = spec.code_function_count().unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::CapExceeded { node: node + 1, count, cap });
    }
    let shape: Vec<(usize, usize)> = (0..spec.len()).map(|i| (spec.histories(i) as usize, spec.x_size(i))).collect();
    let radices: Vec<usize> = shape.iter().flat_map(|&(h, x)| std::iter::repeat(x).take(h)).collect();
    let mut digits = vec![0usize; radices.len()];
    let mut out = Vec::with_capacity(count as usize);
    loop {
        let mut tables = Vec::with_capacity(shape.len());
        let mut pos = 0;
        for &(h, _) in &shape {
            tables.push(digits[pos..pos + h].to_vec());
            pos += h;
        }
        out.push(CodeFunction { node, tables });
        let mut j = radices.len();
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            digits[j] += 1;
            if digits[j] < radices[j] {
                break;
            }
            digits[j] = 0;
        }
    }
}

/// An auxiliary random variable attached to a code-function law.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxSpec {
    pub name: String,
    pub alphabet: Alphabet,
}

impl AuxSpec {
    pub fn new(name: impl Into<String>, n: usize) -> Self {
        AuxSpec { name: name.into(), alphabet: labels(n) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CfEntry {
    pub aux: Vec<usize>,
    pub funcs: Vec<CodeFunction>,
    pub p: f64,
}

/// A (possibly dependent) law over tuples of code functions, optionally
/// jointly with auxiliary variables.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeFunctionDistribution {
    aux: Vec<AuxSpec>,
    entries: Vec<CfEntry>,
    product: bool,
}

impl CodeFunctionDistribution {
    pub fn with_aux(aux: Vec<AuxSpec>, entries: Vec<CfEntry>) -> Result<Self> {
        let mut merged: Vec<CfEntry> = Vec::new();
        let mut index: HashMap<(Vec<usize>, Vec<CodeFunction>), usize> = HashMap::new();
        let width = entries.first().map(|e| e.funcs.len()).ok_or_else(|| Error::Invalid("empty code-function law".into()))?;
        for e in entries {
            if e.funcs.len() != width || e.aux.len() != aux.len() {
                return Err(Error::Shape("code-function tuples must have equal width".into()));
            }
            if let Some((v, a)) = e.aux.iter().zip(&aux).find(|(v, a)| **v >= a.alphabet.len()) {
                return Err(Error::Invalid(format!("value {v} out of range for auxiliary `{}`", a.name)));
            }
            if e.p < 0.0 || !e.p.is_finite() {
                return Err(Error::Negative { what: "code-function law".into(), value: e.p });
            }
            let key = (e.aux.clone(), e.funcs.clone());
            match index.get(&key) {
                Some(&j) => merged[j].p += e.p,
                None => {
                    index.insert(key, merged.len());
                    merged.push(e);
                }
            }
        }
        merged.retain(|e| e.p > 0.0);
        let sum: f64 = merged.iter().map(|e| e.p).sum();
        if (sum - 1.0).abs() > TOL {
            return Err(Error::NotNormalized { what: "code-function law".into(), sum });
        }
        Ok(CodeFunctionDistribution { aux, entries: merged, product: false })
    }

    /// Dependent law over code-function tuples.
    pub fn joint(entries: Vec<(Vec<CodeFunction>, f64)>) -> Result<Self> {
        Self::with_aux(Vec::new(), entries.into_iter().map(|(funcs, p)| CfEntry { aux: Vec::new(), funcs, p }).collect())
    }

    /// Independent code functions with the given per-node marginals.
    pub fn product(marginals: Vec<Vec<(CodeFunction, f64)>>) -> Result<Self> {
        let mut tuples: Vec<(Vec<CodeFunction>, f64)> = vec![(Vec::new(), 1.0)];
        for m in &marginals {
            let mut next = Vec::with_capacity(tuples.len() * m.len());
            for (t, p) in &tuples {
                for (f, q) in m {
                    let mut t2 = t.clone();
                    t2.push(f.clone());
                    next.push((t2, p * q));
                }
            }
            tuples = next;
        }
        let mut d = Self::joint(tuples)?;
        d.product = true;
        Ok(d)
    }

    /// A single code-function tuple with probability one.
    pub fn point(funcs: Vec<CodeFunction>) -> Result<Self> {
        let mut d = Self::joint(vec![(funcs, 1.0)])?;
        d.product = true;
        Ok(d)
    }

    pub fn aux(&self) -> &[AuxSpec] {
        &self.aux
    }

    pub fn entries(&self) -> &[CfEntry] {
        &self.entries
    }

    pub fn width(&self) -> usize {
        self.entries[0].funcs.len()
    }

    /// Declared product form.
    pub fn is_product(&self) -> bool {
        self.product
    }

    /// Marginal law of node `k`'s code function.
    pub fn node_marginal(&self, k: usize) -> Vec<(CodeFunction, f64)> {
        let mut m: BTreeMap<CodeFunction, f64> = BTreeMap::new();
        for e in &self.entries {
            *m.entry(e.funcs[k].clone()).or_insert(0.0) += e.p;
        }
        m.into_iter().collect()
    }

    /// Whether the tuple law equals the product of its node marginals within `tol`.
    pub fn factorizes(&self, tol: f64) -> bool {
        let margs: Vec<HashMap<CodeFunction, f64>> =
            (0..self.width()).map(|k| self.node_marginal(k).into_iter().collect()).collect();
        let mut law: HashMap<&[CodeFunction], f64> = HashMap::new();
        for e in &self.entries {
            *law.entry(&e.funcs).or_insert(0.0) += e.p;
        }
        let support: f64 = margs.iter().map(|m| m.len() as f64).product();
        if support > 1e6 {
            return false;
        }
        let mut total_prod = 0.0;
        for (t, &p) in &law {
            let q: f64 = t.iter().enumerate().map(|(k, f)| margs[k][f]).product();
            if (p - q).abs() > tol {
                return false;
            }
            total_prod += q;
        }
        // mass of product cells missing from the support
        (1.0 - total_prod).abs() <= tol * support.max(1.0)
    }

    /// Mixture `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        if self.aux != other.aux {
            return Err(Error::Invalid("cannot mix laws with different auxiliaries".into()));
        }
        let entries = self
            .entries
            .iter()
            .map(|e| CfEntry { p: lambda * e.p, ..e.clone() })
            .chain(other.entries.iter().map(|e| CfEntry { p: (1.0 - lambda) * e.p, ..e.clone() }))
            .collect();
        Self::with_aux(self.aux.clone(), entries)
    }
}

/// An extra variable appended to a joint law, drawn from a law that may
/// depend on the entry (code functions and auxiliaries) and the block history.
#[derive(Clone)]
pub struct Extension {
    pub var: Var,
    pub law: Arc<dyn Fn(&CfEntry, &History) -> Vec<f64> + Send + Sync>,
}

/// Joint law of `(aux, A_K^L, X_K^L, Y_K^L[, Z])`:
/// `P(a) · ∏_k 1(x_k^L ‖ a_k^L, 0y_k^{L-1}) · P(y_K^L ‖ x_K^L)`.
pub fn joint_distribution(pa: &CodeFunctionDistribution, ch: &BlockChannel) -> Result<Joint> {
    joint_distribution_with(pa, ch, &[])
}

/// [`joint_distribution`] with extra variables such as quantizer outputs.
pub fn joint_distribution_with(pa: &CodeFunctionDistribution, ch: &BlockChannel, extra: &[Extension]) -> Result<Joint> {
    let (k, l) = (ch.k(), ch.l());
    if pa.width() != k {
        return Err(Error::Shape(format!("law over {}-tuples for a {k}-node channel", pa.width())));
    }
    // Alphabet of each code-function component A_{k,i}.
    let mut comp: Vec<Vec<BTreeMap<Vec<usize>, u32>>> = vec![vec![BTreeMap::new(); l]; k];
    for e in pa.entries() {
        for (kk, f) in e.funcs.iter().enumerate() {
            f.check(ch.node(kk))?;
            for i in 0..l {
                comp[kk][i].entry(f.tables[i].clone()).or_insert(0);
            }
        }
    }
    for row in comp.iter_mut() {
        for m in row.iter_mut() {
            for (j, v) in m.values_mut().enumerate() {
                *v = j as u32;
            }
        }
    }
    let mut vars: Vec<Var> = pa.aux().iter().map(|a| Var::new(a.name.clone(), a.alphabet.clone())).collect();
    for kk in 0..k {
        let spec = ch.node(kk);
        for i in 0..l {
            let alph = comp[kk][i]
                .keys()
                .map(|t| t.iter().map(|&x| spec.x[i][x].as_str()).collect::<String>())
                .collect();
            vars.push(Var::at(Role::Code, kk, i, alph));
            vars.push(Var::at(Role::Input, kk, i, spec.x[i].clone()));
            vars.push(Var::at(Role::Output, kk, i, spec.y[i].clone()));
        }
    }
    if let Some(parts) = &ch.parts {
        for (kk, row) in parts.alphabets.iter().enumerate() {
            for (i, a) in row.iter().enumerate() {
                vars.push(Var::at(Role::Noise, kk, i, a.clone()));
            }
        }
    }
    for e in extra {
        vars.push(e.var.clone());
    }
    let mut cells: Vec<(Vec<u32>, f64)> = Vec::new();
    for e in pa.entries() {
        let mut err = None;
        ch.rollout(&e.funcs, &mut |z, h, q| {
            let mut cell: Vec<u32> = e.aux.iter().map(|&v| v as u32).collect();
            for kk in 0..k {
                for i in 0..l {
                    cell.push(comp[kk][i][&e.funcs[kk].tables[i]]);
                    cell.push(h.x[kk][i] as u32);
                    cell.push(h.y[kk][i] as u32);
                }
            }
            if let Some(zs) = ch.noise_components(z) {
                cell.extend(zs.iter().flatten().map(|&v| v as u32));
            }
            let mut branch = vec![(cell, e.p * q)];
            for x in extra {
                let w = (x.law)(e, h);
                if w.len() != x.var.size() {
                    err.get_or_insert(Error::Invalid(format!("law of `{}` has the wrong length", x.var.name)));
                    return;
                }
                branch = branch
                    .into_iter()
                    .flat_map(|(c, p)| {
                        w.iter().enumerate().filter(|(_, &wv)| wv > 0.0).map(move |(v, &wv)| {
                            let mut c2 = c.clone();
                            c2.push(v as u32);
                            (c2, p * wv)
                        })
                    })
                    .collect();
            }
            cells.extend(branch);
        })?;
        if let Some(e) = err {
            return Err(e);
        }
    }
    Joint::from_cells(vars, cells)
}

/// A message originating at `source` and decoded at every node of `sinks`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Message {
    pub name: String,
    pub source: usize,
    pub sinks: Vec<usize>,
}

/// Messages of a network and the cut bookkeeping derived from them.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSession {
    k: usize,
    messages: Vec<Message>,
}

/// Largest node count for which cuts are enumerated.
pub const MAX_CUT_NODES: usize = 16;

impl NetworkSession {
    pub fn new(k: usize, messages: Vec<Message>) -> Result<Self> {
        for m in &messages {
            if m.source >= k || m.sinks.iter().any(|&s| s >= k) {
                return Err(Error::Invalid(format!("message `{}` refers to a node outside 1..{k}", m.name)));
            }
            if m.sinks.is_empty() || m.sinks.contains(&m.source) {
                return Err(Error::Invalid(format!("message `{}` needs sinks other than its source", m.name)));
            }
        }
        Ok(NetworkSession { k, messages })
    }

    /// One message from `source` to `sink`.
    pub fn unicast(k: usize, source: usize, sink: usize) -> Result<Self> {
        Self::new(k, vec![Message { name: format!("W{}{}", source + 1, sink + 1), source, sinks: vec![sink] }])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    /// `E(k)`: indices of messages encoded at node `k`.
    pub fn encode(&self, k: usize) -> Vec<usize> {
        (0..self.messages.len()).filter(|&m| self.messages[m].source == k).collect()
    }

    /// `D(k)`: indices of messages decoded at node `k`.
    pub fn decode(&self, k: usize) -> Vec<usize> {
        (0..self.messages.len()).filter(|&m| self.messages[m].sinks.contains(&k)).collect()
    }

    /// `M(S)`: messages with source in `S` decoded somewhere in `S^c`.
    pub fn separated(&self, s: &[usize]) -> Vec<usize> {
        (0..self.messages.len())
            .filter(|&m| {
                let msg = &self.messages[m];
                s.contains(&msg.source) && msg.sinks.iter().any(|t| !s.contains(t))
            })
            .collect()
    }

    /// All proper nonempty cuts in increasing bitmask order; unless `all`,
    /// only those separating at least one message.
    pub fn cuts(&self, all: bool) -> Result<Vec<Vec<usize>>> {
        if self.k > MAX_CUT_NODES {
            return Err(Error::InvalidCut(format!("{} nodes exceed the limit of {MAX_CUT_NODES} for cut enumeration", self.k)));
        }
        let full = (1u32 << self.k) - 1;
        Ok((1..full)
            .map(|mask| (0..self.k).filter(|&j| mask >> j & 1 == 1).collect::<Vec<_>>())
            .filter(|s| all || !self.separated(s).is_empty())
            .collect())
    }
}

/// Complement of a node set within `0..k`.
pub fn complement(s: &[usize], k: usize) -> Vec<usize> {
    (0..k).filter(|j| !s.contains(j)).collect()
}

/// Distinct code functions appearing for each node, in canonical order.
pub fn supports(pa: &CodeFunctionDistribution) -> Vec<BTreeSet<CodeFunction>> {
    (0..pa.width()).map(|k| pa.entries().iter().map(|e| e.funcs[k].clone()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_letter_functions_are_codewords() {
        let spec = NodeSpec::sized(&[3], &[2]).unwrap();
        let fs = enumerate_code_functions(&spec, 0, DEFAULT_CAP).unwrap();
        assert_eq!(fs.len(), 3);
    }

    #[test]
    fn cap_is_enforced_with_count() {
        let spec = NodeSpec::sized(&[2, 2, 2], &[2, 2, 2]).unwrap();
        match enumerate_code_functions(&spec, 0, 100) {
            Err(Error::CapExceeded { count, .. }) => assert_eq!(count, 128),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let spec = NodeSpec::sized(&[2, 2], &[2, 1]).unwrap();
        let labels: Vec<String> =
            enumerate_code_functions(&spec, 0, DEFAULT_CAP).unwrap().iter().map(|f| f.label(&spec)).collect();
        assert_eq!(labels, ["0,00", "0,01", "0,10", "0,11", "1,00", "1,01", "1,10", "1,11"]);
    }

    #[test]
    fn separated_messages_follow_decoders() {
        let s = NetworkSession::new(
            3,
            vec![
                Message { name: "a".into(), source: 0, sinks: vec![2] },
                Message { name: "b".into(), source: 1, sinks: vec![0] },
            ],
        )
        .unwrap();
        assert_eq!(s.separated(&[0]), vec![0]);
        assert_eq!(s.separated(&[0, 2]), Vec::<usize>::new());
        assert_eq!(s.separated(&[1]), vec![1]);
        assert_eq!(s.decode(0), vec![1]);
        assert_eq!(s.encode(1), vec![1]);
    }

    #[test]
    fn too_many_nodes_for_cuts() {
        let s = NetworkSession::unicast(17, 0, 16).unwrap();
        assert!(matches!(s.cuts(false), Err(Error::InvalidCut(_))));
    }
}
