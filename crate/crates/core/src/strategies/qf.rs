//! Quantize-forward network coding for multicast from node 0.

use serde::Serialize;

use super::{aux_vars, Quantizer, FACTOR_TOL};
use crate::model::{complement, joint_distribution_with, BlockChannel, CodeFunctionDistribution};
use crate::prob::{Role, VarId};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QfCut {
    pub cut: Vec<usize>,
    /// `min_k I(A_S; Ŷ_{S^c} Y_k | A_{S^c} T) − I(Y_S; Ŷ_S | A_K Ŷ_{S^c} T)`, per use.
    pub value: f64,
    /// Same with `Y_k` dropped from the first term, per use.
    pub value_lb: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QfReport {
    pub cuts: Vec<QfCut>,
    pub rate: f64,
    pub rate_lb: f64,
}

/// QF rate for multicast from node 0 to `sinks` with independent code
/// functions (given the optional auxiliary `T`) and per-node quantizers.
pub fn qf_rate(
    ch: &BlockChannel,
    pa: &CodeFunctionDistribution,
    quantizers: &[Quantizer],
    sinks: &[usize],
) -> Result<QfReport> {
    let k = ch.k();
    if quantizers.len() != k {
        return Err(Error::Shape(format!("{} quantizers for {k} nodes", quantizers.len())));
    }
    if sinks.is_empty() || sinks.iter().any(|&t| t == 0 || t >= k) {
        return Err(Error::Invalid("sinks must be nodes other than the source".into()));
    }
    let ext: Vec<_> = quantizers.iter().enumerate().filter_map(|(n, q)| q.extension(n)).collect();
    let j = joint_distribution_with(pa, ch, &ext)?;
    let t: Vec<VarId> = if pa.aux().iter().any(|a| a.name == "T") { aux_vars(&j, &["T"])? } else { Vec::new() };

    let codes: Vec<Vec<VarId>> = (0..k).map(|n| j.select(Role::Code, &[n])).collect();
    let hats: Vec<Vec<VarId>> = (0..k).map(|n| quantizers[n].vars(&j, n)).collect::<Result<_>>()?;
    // Independence of the code functions given T: total correlation must vanish.
    let mut tc = -j.conditional_entropy(&codes.concat(), &t)?;
    for c in &codes {
        tc += j.conditional_entropy(c, &t)?;
    }
    if tc > FACTOR_TOL {
        return Err(Error::Factorization(format!("QF needs independent code functions (total correlation {tc:.3e} bits)")));
    }

    let gather = |v: &[Vec<VarId>], nodes: &[usize]| -> Vec<VarId> { nodes.iter().flat_map(|&n| v[n].clone()).collect() };
    let all: Vec<usize> = (0..k).collect();
    let mut cuts = Vec::new();
    for mask in 0u64..1 << (k - 1) {
        let mut s = vec![0];
        s.extend((1..k).filter(|n| mask >> (n - 1) & 1 == 1));
        let sc = complement(&s, k);
        let targets: Vec<usize> = sinks.iter().copied().filter(|t| sc.contains(t)).collect();
        if targets.is_empty() {
            continue;
        }
        let a_s = gather(&codes, &s);
        let mut cond = gather(&codes, &sc);
        cond.extend(&t);
        let hat_sc = gather(&hats, &sc);
        let mut penalty_cond = gather(&codes, &all);
        penalty_cond.extend(&hat_sc);
        penalty_cond.extend(&t);
        let y_s = j.select(Role::Output, &s);
        let penalty = j.mutual_information(&y_s, &gather(&hats, &s), &penalty_cond)?;
        let mut first = f64::INFINITY;
        for &tk in &targets {
            let mut obs = hat_sc.clone();
            obs.extend(j.select(Role::Output, &[tk]));
            first = first.min(j.mutual_information(&a_s, &obs, &cond)?);
        }
        let lb = j.mutual_information(&a_s, &hat_sc, &cond)?;
        let l = ch.l() as f64;
        cuts.push(QfCut { cut: s, value: (first - penalty) / l, value_lb: (lb - penalty) / l });
    }
    if cuts.is_empty() {
        return Err(Error::InvalidCut("no cut separates the source from a sink".into()));
    }
    let rate = cuts.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
    let rate_lb = cuts.iter().map(|c| c.value_lb).fold(f64::INFINITY, f64::min);
    Ok(QfReport { cuts, rate, rate_lb })
}
