//! Cut-set bound over code-function laws, its weakened forms, and the
//! causal-relay bound. All values are returned in bits per channel use.

use crate::model::{complement, joint_distribution, BlockChannel, CodeFunctionDistribution, NetworkSession};
use crate::prob::{Block, Role, VarId};
use crate::{Error, Joint, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Exact,
    DirectedWeakened,
    InputOutputWeakened,
    AdditiveNoise,
    Deterministic,
    Baik,
}

impl BoundKind {
    pub fn tag(self) -> &'static str {
        match self {
            BoundKind::Exact => "exact",
            BoundKind::DirectedWeakened => "directed-weakened",
            BoundKind::InputOutputWeakened => "input-output-weakened",
            BoundKind::AdditiveNoise => "additive-noise",
            BoundKind::Deterministic => "deterministic",
            BoundKind::Baik => "baik",
        }
    }
}

impl std::str::FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "exact" => BoundKind::Exact,
            "directed-weakened" | "weak1" => BoundKind::DirectedWeakened,
            "input-output-weakened" | "weak" => BoundKind::InputOutputWeakened,
            "additive-noise" | "weak2" => BoundKind::AdditiveNoise,
            "deterministic" | "weak3" => BoundKind::Deterministic,
            "baik" => BoundKind::Baik,
            other => return Err(Error::Invalid(format!("unknown bound kind `{other}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CutBoundReport {
    /// 0-based nodes on the transmitting side.
    pub cut: Vec<usize>,
    /// Indices of the separated messages `M(S)`.
    pub messages: Vec<usize>,
    pub per_use: f64,
    pub per_block: f64,
    pub kind: BoundKind,
}

/// Node count and block length of a joint built by `joint_distribution`.
pub fn shape(joint: &Joint) -> Result<(usize, usize)> {
    let mut k = 0;
    let mut l = 0;
    let mut seen = false;
    for v in joint.vars().iter().filter(|v| v.role == Role::Output) {
        k = k.max(v.node + 1);
        l = l.max(v.time + 1);
        seen = true;
    }
    if !seen {
        return Err(Error::Shape("joint has no channel outputs".into()));
    }
    Ok((k, l))
}

fn check_cut(s: &[usize], k: usize) -> Result<Vec<usize>> {
    let mut s: Vec<usize> = s.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.is_empty() {
        return Err(Error::InvalidCut("S is empty".into()));
    }
    if s.len() >= k || s.iter().any(|&j| j >= k) {
        return Err(Error::InvalidCut(format!("S = {:?} is not a proper subset of the {k} nodes", s.iter().map(|j| j + 1).collect::<Vec<_>>())));
    }
    Ok(s)
}

struct CutVars {
    l: usize,
    y_sc: Block,
    y_s: Block,
    x_sc: Block,
    x_k: Block,
    a_s: Vec<VarId>,
    a_sc: Vec<VarId>,
    a_sc_block: Block,
    a_k_block: Block,
}

fn cut_vars(joint: &Joint, s: &[usize]) -> Result<CutVars> {
    let (k, l) = shape(joint)?;
    let s = check_cut(s, k)?;
    let sc = complement(&s, k);
    let all: Vec<usize> = (0..k).collect();
    Ok(CutVars {
        l,
        y_sc: joint.block(Role::Output, &sc, l),
        y_s: joint.block(Role::Output, &s, l).delayed(),
        x_sc: joint.block(Role::Input, &sc, l),
        x_k: joint.block(Role::Input, &all, l),
        a_s: joint.select(Role::Code, &s),
        a_sc: joint.select(Role::Code, &sc),
        a_sc_block: joint.block(Role::Code, &sc, l),
        a_k_block: joint.block(Role::Code, &all, l),
    })
}

/// `I(A_S^L ; Y_{S^c}^L | A_{S^c}^L) / L`.
pub fn cut_mutual_information(joint: &Joint, s: &[usize]) -> Result<f64> {
    let v = cut_vars(joint, s)?;
    let y = v.y_sc.all();
    Ok(joint.mutual_information(&v.a_s, &y, &v.a_sc)? / v.l as f64)
}

/// A weakened cut bound evaluated on `joint`.
///
/// - directed-weakened: `I(A_S → Y_{S^c} ‖ A_{S^c})`
/// - input-output-weakened: `I(X_S, 0Y_S → Y_{S^c} ‖ X_{S^c})`
/// - additive-noise: `H(Y_{S^c} ‖ X_{S^c}) − H(Z_{S^c} ‖ 0Z_S)` (needs noise components)
/// - deterministic: `H(Y_{S^c} ‖ X_{S^c})` (needs a noise-free channel)
pub fn weakened_bound(joint: &Joint, s: &[usize], kind: BoundKind) -> Result<f64> {
    let v = cut_vars(joint, s)?;
    let block = match kind {
        BoundKind::Exact => return cut_mutual_information(joint, s),
        BoundKind::Baik => return Err(Error::KindMismatch("use baik_bound with a relay partition".into())),
        BoundKind::DirectedWeakened => {
            joint.causal_entropy(&v.y_sc, &[&v.a_sc_block], &[])? - joint.causal_entropy(&v.y_sc, &[&v.a_k_block], &[])?
        }
        BoundKind::InputOutputWeakened => {
            joint.causal_entropy(&v.y_sc, &[&v.x_sc], &[])? - joint.causal_entropy(&v.y_sc, &[&v.y_s, &v.x_k], &[])?
        }
        BoundKind::AdditiveNoise => {
            let (k, l) = shape(joint)?;
            let s = check_cut(s, k)?;
            let sc = complement(&s, k);
            if joint.select(Role::Noise, &(0..k).collect::<Vec<_>>()).is_empty() {
                return Err(Error::KindMismatch("the additive-noise bound needs a channel with declared noise components".into()));
            }
            let z_sc = joint.block(Role::Noise, &sc, l);
            let z_s = joint.block(Role::Noise, &s, l).delayed();
            joint.causal_entropy(&v.y_sc, &[&v.x_sc], &[])? - joint.causal_entropy(&z_sc, &[&z_s], &[])?
        }
        BoundKind::Deterministic => {
            let (k, l) = shape(joint)?;
            let all: Vec<usize> = (0..k).collect();
            let y_k = joint.block(Role::Output, &all, l);
            let residual = joint.causal_entropy(&y_k, &[&v.x_k], &[])?;
            if residual > 1e-9 {
                return Err(Error::KindMismatch(format!("channel is noisy: H(Y_K ‖ X_K) = {residual:.3e}")));
            }
            joint.causal_entropy(&v.y_sc, &[&v.x_sc], &[])?
        }
    };
    Ok(block / v.l as f64)
}

/// Cut bound for causal relay networks with causal relays `n0` and strictly
/// causal nodes `n1` (a partition of all nodes):
///
/// `I(X_S^{L-1}, 0Y_S^{L-2} → Y_{S^c}^{L-1} ‖ X_{S^c}^{L-1} | A_{S^c∩N0})
///  + I(X_{S∩N1}^L A_{S∩N0} ; Y_{S^c,L} | Y_{S^c}^{L-1} X_{S^c}^L A_{S^c∩N0})`, divided by `L`.
pub fn baik_bound(joint: &Joint, s: &[usize], n0: &[usize], n1: &[usize]) -> Result<f64> {
    let (k, l) = shape(joint)?;
    let s = check_cut(s, k)?;
    let mut all: Vec<usize> = n0.iter().chain(n1).copied().collect();
    all.sort_unstable();
    if all != (0..k).collect::<Vec<_>>() {
        return Err(Error::Partition(format!("N0 and N1 must partition the {k} nodes")));
    }
    let sc = complement(&s, k);
    let inter = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().copied().filter(|j| b.contains(j)).collect() };
    let a0 = joint.select(Role::Code, &inter(&sc, n0));
    let truncate = |b: Block, len: usize| Block { steps: b.steps[..len].to_vec(), delayed: b.delayed };
    let nodes: Vec<usize> = (0..k).collect();

    let m = l - 1;
    let y_sc = truncate(joint.block(Role::Output, &sc, l), m);
    let x_sc = truncate(joint.block(Role::Input, &sc, l), m);
    let y_s = truncate(joint.block(Role::Output, &s, l).delayed(), m);
    let x_k = truncate(joint.block(Role::Input, &nodes, l), m);
    let first = joint.causal_entropy(&y_sc, &[&x_sc], &a0)? - joint.causal_entropy(&y_sc, &[&y_s, &x_k], &a0)?;

    let target = joint.select_at(Role::Output, &sc, l - 1);
    let mut ctx: Vec<VarId> = y_sc.all();
    ctx.extend(joint.select(Role::Input, &sc));
    ctx.extend(&a0);
    let mut src = joint.select(Role::Input, &inter(&s, n1));
    src.extend(joint.select(Role::Code, &inter(&s, n0)));
    let second = joint.mutual_information(&src, &target, &ctx)?;
    Ok((first + second) / l as f64)
}

/// One report per cut separating a message (every proper cut with `all`).
pub fn cutset_region(
    session: &NetworkSession,
    ch: &BlockChannel,
    pa: &CodeFunctionDistribution,
    kind: BoundKind,
    all: bool,
) -> Result<Vec<CutBoundReport>> {
    if session.messages().is_empty() {
        return Err(Error::Invalid("the session has no messages".into()));
    }
    if session.k() != ch.k() {
        return Err(Error::Shape(format!("session has {} nodes, channel {}", session.k(), ch.k())));
    }
    let joint = joint_distribution(pa, ch)?;
    let l = ch.l() as f64;
    session
        .cuts(all)?
        .into_iter()
        .map(|s| {
            let per_use = weakened_bound(&joint, &s, kind)?;
            Ok(CutBoundReport { messages: session.separated(&s), cut: s, per_use, per_block: per_use * l, kind })
        })
        .collect()
}
