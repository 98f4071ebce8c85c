//! Exact finite-probability engine.
//!
//! A [`JointTable`] stores the nonzero cells of a joint law over labelled
//! variables. Each variable carries a role (code function, input, output,
//! noise, auxiliary), a node and a time index so that block expressions such
//! as `Y_{S^c}^{i-1}` can be assembled by lookup. Entropies are in bits.

use std::collections::HashMap;

use crate::{Error, Real, Result};

/// Hard cap on the number of stored cells of a table.
pub const MAX_CELLS: usize = 10_000_000;

pub type VarId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Role {
    Code,
    Input,
    Output,
    Noise,
    Aux,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Var {
    pub name: String,
    pub role: Role,
    /// 0-based node index (0 for auxiliaries).
    pub node: usize,
    /// 0-based time index (0 for auxiliaries and block-level variables).
    pub time: usize,
    pub alphabet: Vec<String>,
}

impl Var {
    pub fn new(name: impl Into<String>, alphabet: Vec<String>) -> Self {
        Var { name: name.into(), role: Role::Aux, node: 0, time: 0, alphabet }
    }

    pub fn at(role: Role, node: usize, time: usize, alphabet: Vec<String>) -> Self {
        let tag = match role {
            Role::Code => "A",
            Role::Input => "X",
            Role::Output => "Y",
            Role::Noise => "Z",
            Role::Aux => "V",
        };
        Var { name: format!("{tag}{}_{}", node + 1, time + 1), role, node, time, alphabet }
    }

    /// A variable with labels `0..n-1`.
    pub fn numbered(name: impl Into<String>, n: usize) -> Self {
        Var::new(name, (0..n).map(|v| v.to_string()).collect())
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }
}

/// A finite distribution over an ordered list of labels.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDistribution<T> {
    support: Vec<String>,
    probs: Vec<T>,
}

impl<T: Real> FiniteDistribution<T> {
    pub fn new(support: Vec<String>, probs: Vec<T>) -> Result<Self> {
        if support.len() != probs.len() {
            return Err(Error::Invalid(format!(
                "{} labels but {} weights",
                support.len(),
                probs.len()
            )));
        }
        check_weights("distribution", &probs)?;
        Ok(FiniteDistribution { support, probs })
    }

    pub fn uniform(n: usize) -> Self {
        let p = T::one() / T::lit(n as f64);
        FiniteDistribution { support: (0..n).map(|v| v.to_string()).collect(), probs: vec![p; n] }
    }

    pub fn support(&self) -> &[String] {
        &self.support
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn entropy(&self) -> T {
        self.probs.iter().map(|&p| p.plogp()).sum()
    }
}

fn check_weights<T: Real>(what: &str, probs: &[T]) -> Result<()> {
    let mut sum = T::zero();
    for &p in probs {
        if p < T::zero() || !p.is_finite() {
            return Err(Error::Negative { what: what.into(), value: p.to_f64().unwrap_or(f64::NAN) });
        }
        sum = sum + p;
    }
    if (sum - T::one()).abs() > T::tol() {
        return Err(Error::NotNormalized { what: what.into(), sum: sum.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(())
}

/// A time-ordered block of variable groups: `steps[i]` holds the variables of letter `i`.
///
/// With `delayed` set the block is read as `0Y^{L-1}`: at time `i` only the
/// letters strictly before `i` are visible.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Block {
    pub steps: Vec<Vec<VarId>>,
    pub delayed: bool,
}

impl Block {
    pub fn new(steps: Vec<Vec<VarId>>) -> Self {
        Block { steps, delayed: false }
    }

    /// An empty block of length `l` (the constant sequence `0^L`).
    pub fn constant(l: usize) -> Self {
        Block::new(vec![Vec::new(); l])
    }

    pub fn delayed(mut self) -> Self {
        self.delayed = true;
        self
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Per-time union of two blocks with the same delay.
    pub fn merge(&self, other: &Block) -> Result<Block> {
        if self.len() != other.len() {
            return Err(Error::BlockLength { expected: self.len(), found: other.len() });
        }
        if self.delayed != other.delayed {
            return Err(Error::Invalid("cannot merge delayed and undelayed blocks".into()));
        }
        let steps = self.steps.iter().zip(&other.steps).map(|(a, b)| [a.as_slice(), b].concat()).collect();
        Ok(Block { steps, delayed: self.delayed })
    }

    /// Variables visible when conditioning at (0-based) time `i`.
    fn visible(&self, i: usize) -> impl Iterator<Item = VarId> + '_ {
        let end = if self.delayed { i } else { i + 1 };
        self.steps[..end.min(self.steps.len())].iter().flatten().copied()
    }

    pub fn all(&self) -> Vec<VarId> {
        self.steps.iter().flatten().copied().collect()
    }
}

/// Joint law over labelled variables, stored as its nonzero cells.
#[derive(Clone, Debug)]
pub struct JointTable<T> {
    vars: Vec<Var>,
    cells: Vec<u32>,
    probs: Vec<T>,
}

impl<T: Real> JointTable<T> {
    /// Build from (cell, weight) pairs; duplicate cells are merged, zero cells dropped.
    pub fn from_cells<I>(vars: Vec<Var>, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, T)>,
    {
        let width = vars.len();
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut flat = Vec::new();
        let mut probs: Vec<T> = Vec::new();
        for (cell, p) in cells {
            if cell.len() != width {
                return Err(Error::Invalid(format!("cell of width {} in a table of width {width}", cell.len())));
            }
            for (v, &c) in vars.iter().zip(&cell) {
                if c as usize >= v.size() {
                    return Err(Error::Invalid(format!("value {c} out of range for `{}`", v.name)));
                }
            }
            if p < T::zero() || !p.is_finite() {
                return Err(Error::Negative { what: "joint table".into(), value: p.to_f64().unwrap_or(f64::NAN) });
            }
            if p == T::zero() {
                continue;
            }
            match index.get(&cell) {
                Some(&j) => probs[j] = probs[j] + p,
                None => {
                    if probs.len() >= MAX_CELLS {
                        return Err(Error::TooLarge(probs.len() as u128 + 1, MAX_CELLS as u128));
                    }
                    index.insert(cell.clone(), probs.len());
                    flat.extend_from_slice(&cell);
                    probs.push(p);
                }
            }
        }
        check_weights("joint table", &probs)?;
        Ok(JointTable { vars, cells: flat, probs })
    }

    /// Build from a dense row-major table (last variable fastest).
    pub fn from_dense(vars: Vec<Var>, table: &[T]) -> Result<Self> {
        let dims: Vec<usize> = vars.iter().map(Var::size).collect();
        let total = dims.iter().try_fold(1u128, |acc, &d| acc.checked_mul(d as u128)).unwrap_or(u128::MAX);
        if total > MAX_CELLS as u128 {
            return Err(Error::TooLarge(total, MAX_CELLS as u128));
        }
        if total != table.len() as u128 {
            return Err(Error::Invalid(format!("dense table has {} cells, expected {total}", table.len())));
        }
        let cells = table.iter().enumerate().map(|(mut idx, &p)| {
            let mut cell = vec![0u32; dims.len()];
            for (slot, &d) in cell.iter_mut().zip(&dims).rev() {
                *slot = (idx % d) as u32;
                idx /= d;
            }
            (cell, p)
        });
        Self::from_cells(vars, cells.collect::<Vec<_>>())
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn var(&self, name: &str) -> Result<VarId> {
        self.vars.iter().position(|v| v.name == name).ok_or_else(|| Error::UnknownVariable(name.into()))
    }

    pub fn vars_named(&self, names: &[&str]) -> Result<Vec<VarId>> {
        names.iter().map(|n| self.var(n)).collect()
    }

    pub fn find(&self, role: Role, node: usize, time: usize) -> Option<VarId> {
        self.vars.iter().position(|v| v.role == role && v.node == node && v.time == time)
    }

    /// All variables of `role` at the given nodes, any time.
    pub fn select(&self, role: Role, nodes: &[usize]) -> Vec<VarId> {
        (0..self.vars.len())
            .filter(|&i| self.vars[i].role == role && nodes.contains(&self.vars[i].node))
            .collect()
    }

    /// Variables of `role` at the given nodes and time `time`.
    pub fn select_at(&self, role: Role, nodes: &[usize], time: usize) -> Vec<VarId> {
        (0..self.vars.len())
            .filter(|&i| {
                let v = &self.vars[i];
                v.role == role && v.time == time && nodes.contains(&v.node)
            })
            .collect()
    }

    /// Time-ordered block of `role` variables for `nodes`, `len` letters long.
    pub fn block(&self, role: Role, nodes: &[usize], len: usize) -> Block {
        Block::new((0..len).map(|t| self.select_at(role, nodes, t)).collect())
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = (&[u32], T)> + '_ {
        let w = self.vars.len().max(1);
        self.cells.chunks(w).zip(self.probs.iter().copied())
    }

    pub fn total(&self) -> T {
        self.probs.iter().copied().sum()
    }

    fn check_ids(&self, ids: &[VarId]) -> Result<()> {
        match ids.iter().find(|&&i| i >= self.vars.len()) {
            Some(i) => Err(Error::UnknownVariable(format!("#{i}"))),
            None => Ok(()),
        }
    }

    /// Weights of the marginal on `ids`, keyed by a mixed-radix cell code.
    fn group(&self, ids: &[VarId]) -> Result<HashMap<u128, T>> {
        self.check_ids(ids)?;
        let mut radix = Vec::with_capacity(ids.len());
        let mut span: u128 = 1;
        for &i in ids {
            radix.push(span);
            span = span
                .checked_mul(self.vars[i].size() as u128)
                .ok_or(Error::TooLarge(u128::MAX, MAX_CELLS as u128))?;
        }
        let mut out: HashMap<u128, T> = HashMap::with_capacity(self.probs.len().min(1 << 16));
        for (cell, p) in self.cells() {
            let key = ids.iter().zip(&radix).map(|(&i, &r)| cell[i] as u128 * r).sum::<u128>();
            let e = out.entry(key).or_insert_with(T::zero);
            *e = *e + p;
        }
        Ok(out)
    }

    /// Marginal table on `ids` (in the given order, duplicates removed).
    pub fn marginal(&self, ids: &[VarId]) -> Result<Self> {
        self.check_ids(ids)?;
        let ids = dedup(ids);
        let vars = ids.iter().map(|&i| self.vars[i].clone()).collect();
        let cells: Vec<(Vec<u32>, T)> =
            self.cells().map(|(c, p)| (ids.iter().map(|&i| c[i]).collect(), p)).collect();
        Self::from_cells(vars, cells)
    }

    /// Add a variable drawn from `law(cell)`, a weight vector over its alphabet.
    pub fn extend<F>(&self, var: Var, law: F) -> Result<Self>
    where
        F: Fn(&[u32]) -> Vec<T>,
    {
        let n = var.size();
        let mut vars = self.vars.clone();
        vars.push(var);
        let mut cells = Vec::with_capacity(self.len() * n);
        for (c, p) in self.cells() {
            let w = law(c);
            if w.len() != n {
                return Err(Error::Invalid(format!("extension law returned {} weights, expected {n}", w.len())));
            }
            check_weights("extension law", &w)?;
            for (v, q) in w.into_iter().enumerate() {
                let mut cell = c.to_vec();
                cell.push(v as u32);
                cells.push((cell, p * q));
            }
        }
        Self::from_cells(vars, cells)
    }

    /// `H(ids)` in bits.
    pub fn entropy(&self, ids: &[VarId]) -> Result<T> {
        let ids = dedup(ids);
        if ids.is_empty() {
            self.check_ids(&ids)?;
            return Ok(T::zero());
        }
        Ok(self.group(&ids)?.values().map(|&p| p.plogp()).sum())
    }

    pub fn entropy_named(&self, names: &[&str]) -> Result<T> {
        self.entropy(&self.vars_named(names)?)
    }

    /// `H(x | given)`.
    pub fn conditional_entropy(&self, x: &[VarId], given: &[VarId]) -> Result<T> {
        let both = [x, given].concat();
        Ok(self.entropy(&both)? - self.entropy(given)?)
    }

    /// `I(a; b | given)`.
    pub fn mutual_information(&self, a: &[VarId], b: &[VarId], given: &[VarId]) -> Result<T> {
        let ac = [a, given].concat();
        let bc = [b, given].concat();
        let abc = [a, b, given].concat();
        Ok(self.entropy(&ac)? + self.entropy(&bc)? - self.entropy(&abc)? - self.entropy(given)?)
    }

    /// `H(Y^L ‖ B1^L, B2^L, … | cond) = Σ_i H(Y_i | Y^{i-1} B1^i B2^i … cond)`.
    ///
    /// Delayed blocks contribute only their letters before `i`.
    pub fn causal_entropy(&self, y: &Block, given: &[&Block], cond: &[VarId]) -> Result<T> {
        for b in given {
            if b.len() != y.len() {
                return Err(Error::BlockLength { expected: y.len(), found: b.len() });
            }
        }
        let mut total = T::zero();
        for i in 0..y.len() {
            let mut ctx: Vec<VarId> = cond.to_vec();
            for b in given {
                ctx.extend(b.visible(i));
            }
            ctx.extend(y.steps[..i].iter().flatten());
            let with = [ctx.as_slice(), &y.steps[i]].concat();
            total = total + self.entropy(&with)? - self.entropy(&ctx)?;
        }
        Ok(total)
    }

    /// `H(X^L ‖ Y^L | cond)`; pass a delayed `y` for the `0Y^{L-1}` form.
    pub fn causally_conditioned_entropy(&self, x: &Block, y: &Block, cond: &[VarId]) -> Result<T> {
        self.causal_entropy(x, &[y], cond)
    }

    /// `I(X^L → Y^L ‖ Z^L | A) = H(Y‖Z|A) − H(Y‖X,Z|A)`.
    pub fn directed_information(&self, x: &Block, y: &Block, z: Option<&Block>, cond: &[VarId]) -> Result<T> {
        if x.len() != y.len() {
            return Err(Error::BlockLength { expected: y.len(), found: x.len() });
        }
        let first = match z {
            Some(z) => self.causal_entropy(y, &[z], cond)?,
            None => self.causal_entropy(y, &[], cond)?,
        };
        let second = match z {
            Some(z) => self.causal_entropy(y, &[x, z], cond)?,
            None => self.causal_entropy(y, &[x], cond)?,
        };
        Ok(first - second)
    }
}

fn dedup(ids: &[VarId]) -> Vec<VarId> {
    let mut out = Vec::with_capacity(ids.len());
    for &i in ids {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(n: usize) -> Vec<String> {
        (0..n).map(|v| v.to_string()).collect()
    }

    #[test]
    fn uniform_four_labels_is_two_bits() {
        let t = JointTable::from_dense(vec![Var::new("X", bits(4))], &[0.25f64; 4]).unwrap();
        assert!((t.entropy(&[0]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn point_mass_has_zero_entropy() {
        let t = JointTable::from_dense(vec![Var::new("X", bits(3))], &[0.0f64, 1.0, 0.0]).unwrap();
        assert_eq!(t.entropy(&[0]).unwrap(), 0.0);
    }

    #[test]
    fn unknown_name_is_rejected() {
        let t = JointTable::from_dense(vec![Var::new("X", bits(2))], &[0.5, 0.5]).unwrap();
        assert!(matches!(t.entropy_named(&["Q"]), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn unnormalized_table_is_rejected() {
        let r = JointTable::from_dense(vec![Var::new("X", bits(2))], &[0.5, 0.6]);
        assert!(matches!(r, Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn mismatched_blocks_are_rejected() {
        let t = JointTable::from_dense(vec![Var::new("X", bits(2)), Var::new("Y", bits(2))], &[0.25; 4]).unwrap();
        let x = Block::new(vec![vec![0]]);
        let y = Block::new(vec![vec![1], vec![]]);
        assert!(matches!(t.causal_entropy(&x, &[&y], &[]), Err(Error::BlockLength { .. })));
    }

    #[test]
    fn works_in_single_precision() {
        let t = JointTable::<f32>::from_dense(vec![Var::new("X", bits(2))], &[0.5, 0.5]).unwrap();
        assert!((t.entropy(&[0]).unwrap() - 1.0).abs() < 1e-6);
    }
}
