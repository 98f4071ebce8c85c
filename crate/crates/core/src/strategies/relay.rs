//! Relay channel: node 0 is the source (no feedback), node 1 the relay,
//! node 2 the destination (no input).

use serde::Serialize;

use super::{aux_vars, require_independent, Quantizer};
use crate::model::{joint_distribution, joint_distribution_with, BlockChannel, CodeFunctionDistribution};
use crate::optimizer::{maximize_min, OptimizationResult, Options, TupleSpace};
use crate::prob::{Role, VarId};
use crate::{Error, Joint, Result};

/// The two terms of a relay rate and their minimum, in bits per use.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelayRate {
    pub first: f64,
    pub second: f64,
    pub rate: f64,
}

impl RelayRate {
    fn new(first: f64, second: f64, l: usize) -> Self {
        let (first, second) = (first / l as f64, second / l as f64);
        RelayRate { first, second, rate: first.min(second) }
    }
}

fn check_rc(ch: &BlockChannel) -> Result<()> {
    if ch.k() != 3 {
        return Err(Error::Shape(format!("a relay channel has 3 nodes, found {}", ch.k())));
    }
    if ch.node(0).has_output() {
        return Err(Error::Shape("the source (node 1) must not receive feedback".into()));
    }
    if ch.node(2).has_input() {
        return Err(Error::Shape("the destination (node 3) must not transmit".into()));
    }
    Ok(())
}

struct RcVars {
    x1: Vec<VarId>,
    a2: Vec<VarId>,
    y2: Vec<VarId>,
    y3: Vec<VarId>,
}

fn rc_vars(joint: &Joint) -> RcVars {
    RcVars {
        x1: joint.select(Role::Input, &[0]),
        a2: joint.select(Role::Code, &[1]),
        y2: joint.select(Role::Output, &[1]),
        y3: joint.select(Role::Output, &[2]),
    }
}

fn cat(parts: &[&[VarId]]) -> Vec<VarId> {
    parts.concat()
}

/// Cut-set bound `min(I(X_1; Y_2 Y_3 | A_2), I(X_1 A_2; Y_3)) / L`.
pub fn rc_cutset(ch: &BlockChannel, pa: &CodeFunctionDistribution) -> Result<RelayRate> {
    check_rc(ch)?;
    let j = joint_distribution(pa, ch)?;
    let v = rc_vars(&j);
    let first = j.mutual_information(&v.x1, &cat(&[&v.y2, &v.y3]), &v.a2)?;
    let second = j.mutual_information(&cat(&[&v.x1, &v.a2]), &v.y3, &[])?;
    Ok(RelayRate::new(first, second, ch.l()))
}

/// Decode-forward: `min(I(X_1; Y_2 | A_2), I(X_1 A_2; Y_3)) / L`.
pub fn df_rate(ch: &BlockChannel, pa: &CodeFunctionDistribution) -> Result<RelayRate> {
    check_rc(ch)?;
    let j = joint_distribution(pa, ch)?;
    let v = rc_vars(&j);
    let first = j.mutual_information(&v.x1, &v.y2, &v.a2)?;
    let second = j.mutual_information(&cat(&[&v.x1, &v.a2]), &v.y3, &[])?;
    Ok(RelayRate::new(first, second, ch.l()))
}

/// Largest decode-forward rate over dependent laws on `(X_1^L, A_2^L)`.
pub fn max_df_rate(ch: &BlockChannel, opts: &Options) -> Result<OptimizationResult> {
    check_rc(ch)?;
    let space = TupleSpace::new(ch, opts.cap)?;
    let objs = [space.objective(&[0], &[1])?, space.objective(&[0, 1], &[2])?];
    maximize_min(&space, &objs, opts)
}

/// Partial decode-forward with auxiliary `U`:
/// `min(I(U; Y_2 | A_2) + I(X_1; Y_3 | A_2 U), I(X_1 A_2; Y_3)) / L`.
pub fn pdf_rate(ch: &BlockChannel, scheme: &CodeFunctionDistribution) -> Result<RelayRate> {
    check_rc(ch)?;
    let j = joint_distribution(scheme, ch)?;
    let v = rc_vars(&j);
    let u = aux_vars(&j, &["U"])?;
    let first = j.mutual_information(&u, &v.y2, &v.a2)? + j.mutual_information(&v.x1, &v.y3, &cat(&[&v.a2, &u]))?;
    let second = j.mutual_information(&cat(&[&v.x1, &v.a2]), &v.y3, &[])?;
    Ok(RelayRate::new(first, second, ch.l()))
}

/// Compress-forward with time sharing `T` and relay quantizer `Ŷ_2`:
/// `min(I(X_1; Ŷ_2 Y_3 | A_2 T), I(X_1 A_2; Y_3 | T) − I(Y_2; Ŷ_2 | X_1 A_2 Y_3 T)) / L`.
///
/// `X_1` and `A_2` must be conditionally independent given `T`; without an
/// auxiliary named `T` they must be independent.
pub fn cf_rate(ch: &BlockChannel, scheme: &CodeFunctionDistribution, quantizer: &Quantizer) -> Result<RelayRate> {
    check_rc(ch)?;
    let ext: Vec<_> = quantizer.extension(1).into_iter().collect();
    let j = joint_distribution_with(scheme, ch, &ext)?;
    let v = rc_vars(&j);
    let t = if scheme.aux().iter().any(|a| a.name == "T") { aux_vars(&j, &["T"])? } else { Vec::new() };
    let a1 = j.select(Role::Code, &[0]);
    require_independent(&j, &a1, &v.a2, &t, "compress-forward needs X_1 and A_2 independent given T")?;
    let yhat = quantizer.vars(&j, 1)?;
    let first = j.mutual_information(&v.x1, &cat(&[&yhat, &v.y3]), &cat(&[&v.a2, &t]))?;
    let second = j.mutual_information(&cat(&[&v.x1, &v.a2]), &v.y3, &t)?
        - j.mutual_information(&v.y2, &yhat, &cat(&[&v.x1, &v.a2, &v.y3, &t]))?;
    Ok(RelayRate::new(first, second, ch.l()))
}

/// Relay without delay on its two-letter embedding:
/// `min(I(X_1; Y_2 Y_3 | A_2), I(X_1 A_2; Y_3)) / 2`.
pub fn relay_without_delay_bound(ch: &BlockChannel, pa: &CodeFunctionDistribution) -> Result<RelayRate> {
    check_rc(ch)?;
    if ch.l() != 2 || ch.node(0).x_size(1) != 1 || ch.node(1).x_size(0) != 1 || ch.node(1).y_size(1) != 1 {
        return Err(Error::Shape("expected the two-letter relay-without-delay embedding".into()));
    }
    rc_cutset(ch, pa)
}

/// Search-space sizes for the relay-without-delay bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchSpace {
    /// Code trees of the relay, `|X_2|^{|Y_2|}`.
    pub trees: u128,
    /// Support size `N_A = min(|Y_3| + 1, |X_1||X_2| + 1)`.
    pub support: u128,
    /// Supports to try, `C(trees, N_A)`.
    pub combinations: u128,
    /// Auxiliary size `N_V = |X_1||X_2| + 1` of the mapping formulation.
    pub aux: u128,
    /// Relay mappings in that formulation, `|X_2|^{N_V |Y_2|}`.
    pub mappings: u128,
}

pub fn rwod_search_space(x1: u32, x2: u32, y2: u32, y3: u32) -> SearchSpace {
    let pow = |b: u32, e: u128| (b as u128).checked_pow(e as u32).unwrap_or(u128::MAX);
    let trees = pow(x2, y2 as u128);
    let support = ((y3 + 1) as u128).min((x1 * x2 + 1) as u128);
    let aux = (x1 * x2 + 1) as u128;
    let mut comb: u128 = 1;
    for i in 0..support.min(trees) {
        comb = comb.saturating_mul(trees - i) / (i + 1);
    }
    if support > trees {
        comb = 0;
    }
    SearchSpace { trees, support, combinations: comb, aux, mappings: pow(x2, aux * y2 as u128) }
}
