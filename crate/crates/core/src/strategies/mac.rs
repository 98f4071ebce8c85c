//! Two-user multiple-access channel: nodes 0 and 1 transmit, node 2 receives.

use serde::Serialize;

use super::{aux_vars, half, require_independent, Region};
use crate::model::{joint_distribution, BlockChannel, CodeFunctionDistribution};
use crate::prob::{Block, Role, VarId};
use crate::{Error, Joint, Result};

/// The three rate bounds of a MAC region, per use.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MacBounds {
    pub r1: f64,
    pub r2: f64,
    pub sum: f64,
}

impl MacBounds {
    pub fn region(&self) -> Region {
        Region::new(vec![
            half("R1", &[1.0, 0.0], self.r1),
            half("R2", &[0.0, 1.0], self.r2),
            half("R1+R2", &[1.0, 1.0], self.sum),
        ])
    }
}

fn check_shape(ch: &BlockChannel) -> Result<()> {
    if ch.k() != 3 || ch.node(2).has_input() {
        return Err(Error::Shape("a MAC has two transmitters and a receiver that sends nothing".into()));
    }
    Ok(())
}

/// Full feedback: each letter of `Y_1`, `Y_2` is in one-to-one correspondence with `Y`.
fn check_feedback(j: &Joint, l: usize) -> Result<()> {
    for i in 0..l {
        let y = j.select_at(Role::Output, &[2], i);
        for k in 0..2 {
            let yk = j.select_at(Role::Output, &[k], i);
            let mismatch = j.conditional_entropy(&yk, &y)? + j.conditional_entropy(&y, &yk)?;
            if mismatch > 1e-9 {
                return Err(Error::Shape(format!(
                    "node {} does not receive full feedback at letter {} (mismatch {mismatch:.3e} bits)",
                    k + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

fn optional_aux(j: &Joint, pa: &CodeFunctionDistribution, name: &str) -> Result<Vec<VarId>> {
    if pa.aux().iter().any(|a| a.name == name) {
        aux_vars(j, &[name])
    } else {
        Ok(Vec::new())
    }
}

fn prepare(ch: &BlockChannel, pa: &CodeFunctionDistribution) -> Result<(Joint, Vec<VarId>)> {
    check_shape(ch)?;
    let j = joint_distribution(pa, ch)?;
    check_feedback(&j, ch.l())?;
    let v = optional_aux(&j, pa, "V")?;
    let (a1, a2) = (j.select(Role::Code, &[0]), j.select(Role::Code, &[1]));
    require_independent(&j, &a1, &a2, &v, "the code functions must be independent given V")?;
    Ok((j, v))
}

/// Code-function form: `I(A_1; Y | A_2 V)`, `I(A_2; Y | A_1 V)`, `I(A_1 A_2; Y)`, all `/L`.
pub fn mac_fb_region(ch: &BlockChannel, pa: &CodeFunctionDistribution) -> Result<MacBounds> {
    let (j, v) = prepare(ch, pa)?;
    let (a1, a2) = (j.select(Role::Code, &[0]), j.select(Role::Code, &[1]));
    let y = j.select(Role::Output, &[2]);
    let l = ch.l() as f64;
    Ok(MacBounds {
        r1: j.mutual_information(&a1, &y, &[a2.as_slice(), &v].concat())? / l,
        r2: j.mutual_information(&a2, &y, &[a1.as_slice(), &v].concat())? / l,
        sum: j.mutual_information(&[a1, a2].concat(), &y, &[])? / l,
    })
}

/// Directed-information form: `I(X_1 → Y ‖ X_2 | V)`, `I(X_2 → Y ‖ X_1 | V)`, `I(X_1 X_2 → Y)`, all `/L`.
pub fn mac_fb_region_directed(ch: &BlockChannel, pa: &CodeFunctionDistribution) -> Result<MacBounds> {
    let (j, v) = prepare(ch, pa)?;
    let l = ch.l();
    let x1 = j.block(Role::Input, &[0], l);
    let x2 = j.block(Role::Input, &[1], l);
    let y = j.block(Role::Output, &[2], l);
    let both: Block = x1.merge(&x2)?;
    let lf = l as f64;
    Ok(MacBounds {
        r1: j.directed_information(&x1, &y, Some(&x2), &v)? / lf,
        r2: j.directed_information(&x2, &y, Some(&x1), &v)? / lf,
        sum: j.directed_information(&both, &y, None, &[])? / lf,
    })
}

/// No-feedback region with time sharing `T`: `I(X_1; Y | X_2 T)`, `I(X_2; Y | X_1 T)`, `I(X_1 X_2; Y | T)`, all `/L`.
/// The auxiliary may be named `T` or `V`.
pub fn mac_region(ch: &BlockChannel, pa: &CodeFunctionDistribution) -> Result<MacBounds> {
    check_shape(ch)?;
    let j = joint_distribution(pa, ch)?;
    let mut t = optional_aux(&j, pa, "T")?;
    t.extend(optional_aux(&j, pa, "V")?);
    let (x1, x2) = (j.select(Role::Input, &[0]), j.select(Role::Input, &[1]));
    require_independent(&j, &x1, &x2, &t, "the inputs must be independent given T")?;
    let y = j.select(Role::Output, &[2]);
    let l = ch.l() as f64;
    Ok(MacBounds {
        r1: j.mutual_information(&x1, &y, &[x2.as_slice(), &t].concat())? / l,
        r2: j.mutual_information(&x2, &y, &[x1.as_slice(), &t].concat())? / l,
        sum: j.mutual_information(&[x1, x2].concat(), &y, &t)? / l,
    })
}
