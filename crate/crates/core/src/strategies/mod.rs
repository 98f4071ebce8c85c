//! Achievable rates and outer regions for relay, multiple-access, broadcast,
//! and multicast networks, evaluated on code-function laws.

pub mod bc;
pub mod mac;
pub mod qf;
pub mod relay;

use std::sync::Arc;

use serde::Serialize;

use crate::model::{labels, CodeFunction, Extension};
use crate::prob::{Role, Var, VarId};
use crate::{Error, Joint, Result};

pub use bc::{bc_regions, deterministic_marton_scheme, BcReport};
pub use mac::{mac_fb_region, mac_fb_region_directed, mac_region, MacBounds};
pub use qf::{qf_rate, QfCut, QfReport};
pub use relay::{
    cf_rate, df_rate, max_df_rate, pdf_rate, rc_cutset, relay_without_delay_bound, rwod_search_space, RelayRate,
    SearchSpace,
};

/// Slack used when checking a declared factorization on a joint law.
pub const FACTOR_TOL: f64 = 1e-9;

/// `Σ coeffs[j] R_j ≤ bound`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalfSpace {
    pub label: String,
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

/// A rate region as a list of half-spaces (nonnegativity implied).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Region {
    pub halfspaces: Vec<HalfSpace>,
}

impl Region {
    pub fn new(halfspaces: Vec<HalfSpace>) -> Self {
        Region { halfspaces }
    }

    pub fn contains(&self, rates: &[f64], tol: f64) -> bool {
        rates.iter().all(|&r| r >= -tol)
            && self
                .halfspaces
                .iter()
                .all(|h| h.coeffs.iter().zip(rates).map(|(c, r)| c * r).sum::<f64>() <= h.bound + tol)
    }
}

fn half(label: &str, coeffs: &[f64], bound: f64) -> HalfSpace {
    HalfSpace { label: label.into(), coeffs: coeffs.to_vec(), bound }
}

/// Law of a quantizer output `Ŷ_k^L` given the auxiliaries, the node's code
/// function, and its received block `y_k^L`.
pub type QuantizerLaw = Arc<dyn Fn(&[usize], &CodeFunction, &[usize]) -> Vec<f64> + Send + Sync>;

/// How node `k` forms `Ŷ_k^L`.
#[derive(Clone)]
pub enum Quantizer {
    /// `Ŷ_k^L = Y_k^L`.
    Identity,
    /// `Ŷ_k^L` constant: carries nothing.
    Constant,
    Law { alphabet: usize, law: QuantizerLaw },
}

impl std::fmt::Debug for Quantizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quantizer::Identity => write!(f, "Identity"),
            Quantizer::Constant => write!(f, "Constant"),
            Quantizer::Law { alphabet, .. } => write!(f, "Law {{ alphabet: {alphabet} }}"),
        }
    }
}

impl Quantizer {
    pub(crate) fn extension(&self, node: usize) -> Option<Extension> {
        match self {
            Quantizer::Law { alphabet, law } => {
                let law = Arc::clone(law);
                Some(Extension {
                    var: Var::new(hat_name(node), labels(*alphabet)),
                    law: Arc::new(move |e, h| law(&e.aux, &e.funcs[node], &h.y[node])),
                })
            }
            _ => None,
        }
    }

    /// Variables standing for `Ŷ_k^L` in a joint built with [`Quantizer::extension`].
    pub(crate) fn vars(&self, joint: &Joint, node: usize) -> Result<Vec<VarId>> {
        Ok(match self {
            Quantizer::Identity => joint.select(Role::Output, &[node]),
            Quantizer::Constant => Vec::new(),
            Quantizer::Law { .. } => vec![joint.var(&hat_name(node))?],
        })
    }
}

fn hat_name(node: usize) -> String {
    format!("Yhat{}", node + 1)
}

/// Looks up auxiliary variables by name; missing names are an error.
pub(crate) fn aux_vars(joint: &Joint, names: &[&str]) -> Result<Vec<VarId>> {
    names
        .iter()
        .map(|n| joint.var(n).map_err(|_| Error::Invalid(format!("the scheme needs an auxiliary named `{n}`"))))
        .collect()
}

/// Ensures `I(a; b | given) ≤ FACTOR_TOL`.
pub(crate) fn require_independent(joint: &Joint, a: &[VarId], b: &[VarId], given: &[VarId], what: &str) -> Result<()> {
    let mi = joint.mutual_information(a, b, given)?;
    if mi > FACTOR_TOL {
        return Err(Error::Factorization(format!("{what} (dependence {mi:.3e} bits)")));
    }
    Ok(())
}
