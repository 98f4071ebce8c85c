//! Two-receiver broadcast channel: node 0 transmits, nodes 1 and 2 receive.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{aux_vars, half, Region};
use crate::model::{joint_distribution, AuxSpec, BlockChannel, CfEntry, CodeFunction, CodeFunctionDistribution};
use crate::prob::Role;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BcReport {
    /// `R1 ≤ I(A;Y_1)`, `R2 ≤ I(A;Y_2)`, `R1+R2 ≤ I(A;Y_1Y_2)`, per use.
    pub cutset: Region,
    /// Marton bounds, present when the law carries auxiliaries `T`, `U1`, `U2`.
    pub marton: Option<Region>,
    /// `H(Y_1)`, `H(Y_2)`, `H(Y_1Y_2)` per use, present for noise-free channels.
    pub deterministic: Option<Region>,
}

fn check_shape(ch: &BlockChannel) -> Result<()> {
    if ch.k() != 3 || ch.node(1).has_input() || ch.node(2).has_input() {
        return Err(Error::Shape("a broadcast channel has one transmitter and two receivers that send nothing".into()));
    }
    Ok(())
}

/// Cut-set region, Marton region (given auxiliaries), and the deterministic region.
pub fn bc_regions(ch: &BlockChannel, pa: &CodeFunctionDistribution) -> Result<BcReport> {
    check_shape(ch)?;
    let j = joint_distribution(pa, ch)?;
    let l = ch.l() as f64;
    let a = j.select(Role::Code, &[0]);
    let y1 = j.select(Role::Output, &[1]);
    let y2 = j.select(Role::Output, &[2]);
    let y12 = [y1.as_slice(), &y2].concat();
    let cutset = Region::new(vec![
        half("R1", &[1.0, 0.0], j.mutual_information(&a, &y1, &[])? / l),
        half("R2", &[0.0, 1.0], j.mutual_information(&a, &y2, &[])? / l),
        half("R1+R2", &[1.0, 1.0], j.mutual_information(&a, &y12, &[])? / l),
    ]);

    let names: Vec<&str> = pa.aux().iter().map(|x| x.name.as_str()).collect();
    let marton = if ["T", "U1", "U2"].iter().all(|n| names.contains(n)) {
        let v = aux_vars(&j, &["T", "U1", "U2"])?;
        let (t, u1, u2) = (vec![v[0]], vec![v[1]], vec![v[2]]);
        let residual = j.conditional_entropy(&a, &v)?;
        if residual > 1e-9 {
            return Err(Error::Factorization(format!(
                "the code function must be a function of (T, U1, U2) (H = {residual:.3e} bits)"
            )));
        }
        let mi = |x: &[usize], y: &[usize], g: &[usize]| j.mutual_information(x, y, g);
        let tu1 = [t.as_slice(), &u1].concat();
        let tu2 = [t.as_slice(), &u2].concat();
        let common = mi(&u1, &y1, &t)? + mi(&u2, &y2, &t)? - mi(&u1, &u2, &t)?;
        Some(Region::new(vec![
            half("R1", &[1.0, 0.0], mi(&tu1, &y1, &[])? / l),
            half("R2", &[0.0, 1.0], mi(&tu2, &y2, &[])? / l),
            half("R1+R2 (via Y1)", &[1.0, 1.0], (mi(&t, &y1, &[])? + common) / l),
            half("R1+R2 (via Y2)", &[1.0, 1.0], (mi(&t, &y2, &[])? + common) / l),
        ]))
    } else {
        None
    };

    let deterministic = if ch.is_deterministic() {
        Some(Region::new(vec![
            half("R1", &[1.0, 0.0], j.entropy(&y1)? / l),
            half("R2", &[0.0, 1.0], j.entropy(&y2)? / l),
            half("R1+R2", &[1.0, 1.0], j.entropy(&y12)? / l),
        ]))
    } else {
        None
    };
    Ok(BcReport { cutset, marton, deterministic })
}

/// For a noise-free broadcast channel, the Marton scheme `T = 0`,
/// `U_k = Y_k^L` built from a law over transmitter code functions. Code
/// functions producing the same output pair are merged onto the first one,
/// which leaves the output law unchanged.
pub fn deterministic_marton_scheme(ch: &BlockChannel, pa: &CodeFunctionDistribution) -> Result<CodeFunctionDistribution> {
    check_shape(ch)?;
    if !ch.is_deterministic() {
        return Err(Error::KindMismatch("the channel is not noise-free".into()));
    }
    let mut outs: BTreeMap<(Vec<usize>, Vec<usize>), (Vec<CodeFunction>, f64)> = BTreeMap::new();
    let mut n1 = BTreeMap::new();
    let mut n2 = BTreeMap::new();
    for e in pa.entries() {
        let induced = ch.induced_channel(&e.funcs)?;
        let (y, _) = induced.iter().next().ok_or_else(|| Error::Numerical("empty induced channel".into()))?;
        let key = (y[1].clone(), y[2].clone());
        let len1 = n1.len();
        n1.entry(key.0.clone()).or_insert(len1);
        let len2 = n2.len();
        n2.entry(key.1.clone()).or_insert(len2);
        outs.entry(key).or_insert_with(|| (e.funcs.clone(), 0.0)).1 += e.p;
    }
    let entries = outs
        .into_iter()
        .map(|((y1, y2), (funcs, p))| CfEntry { aux: vec![0, n1[&y1], n2[&y2]], funcs, p })
        .collect();
    CodeFunctionDistribution::with_aux(
        vec![AuxSpec::new("T", 1), AuxSpec::new("U1", n1.len()), AuxSpec::new("U2", n2.len())],
        entries,
    )
}
