//! JSON channel/session documents.
//!
//! Node numbers are 1-based in documents. History keys concatenate, in this
//! order, the labels of every non-singleton input `x_{k,t}` (`t ≤ i`, node
//! major), every non-singleton output `y_{k,t}` (`t < i`), and for functional
//! channels the noise label. Output keys concatenate the labels of the
//! non-singleton outputs `y_{k,i}` in node order.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Deserialize;

use super::{
    enumerate_code_functions, BlockChannel, CodeFunctionDistribution, History, MapFn, Message, NetworkSession,
    NodeSpec, StepFn,
};
use crate::{Error, Result, TOL};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub nodes: Vec<NodeDoc>,
    #[serde(default)]
    pub messages: Vec<MessageDoc>,
    pub channel: ChannelBody,
    #[serde(default)]
    pub distribution: Option<Vec<TupleDoc>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub x: Vec<Vec<String>>,
    pub y: Vec<Vec<String>>,
    #[serde(default)]
    pub encode: Option<Vec<String>>,
    #[serde(default)]
    pub decode: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MessageDoc {
    pub name: String,
    pub source: usize,
    pub sinks: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelBody {
    Kernels(Vec<BTreeMap<String, BTreeMap<String, Prob>>>),
    Functional(FunctionalDoc),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalDoc {
    pub noise: NoiseDoc,
    pub outputs: Vec<BTreeMap<String, String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseDoc {
    pub alphabet: Vec<String>,
    pub probs: Vec<Prob>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleDoc {
    pub trees: Vec<String>,
    pub p: Prob,
}

/// A probability given as a number, a decimal string, or a fraction `a/b`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Prob {
    Num(f64),
    Text(String),
}

impl Prob {
    pub fn value(&self, field: &str) -> Result<f64> {
        let bad = |msg: String| Error::Spec { field: field.into(), msg };
        let v = match self {
            Prob::Num(v) => *v,
            Prob::Text(s) => {
                let s = s.trim();
                match s.split_once('/') {
                    Some((a, b)) => {
                        let a: f64 = a.trim().parse().map_err(|_| bad(format!("bad numerator in `{s}`")))?;
                        let b: f64 = b.trim().parse().map_err(|_| bad(format!("bad denominator in `{s}`")))?;
                        a / b
                    }
                    None => s.parse().map_err(|_| bad(format!("`{s}` is not a probability")))?,
                }
            }
        };
        if !(0.0..=1.0 + TOL).contains(&v) {
            return Err(bad(format!("probability {v} outside [0, 1]")));
        }
        Ok(v)
    }
}

/// A validated channel document.
#[derive(Debug, Clone)]
pub struct ParsedChannel {
    pub name: Option<String>,
    pub channel: BlockChannel,
    pub session: NetworkSession,
    pub distribution: Option<CodeFunctionDistribution>,
}

fn err(field: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Spec { field: field.into(), msg: msg.into() }
}

/// Parse and validate a channel document.
pub fn parse_channel(text: &str) -> Result<ParsedChannel> {
    let doc: ChannelDoc = serde_json::from_str(text).map_err(|e| err(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    build(doc)
}

pub fn load_channel(path: &std::path::Path) -> Result<ParsedChannel> {
    parse_channel(&std::fs::read_to_string(path)?)
}

fn build(doc: ChannelDoc) -> Result<ParsedChannel> {
    if doc.nodes.len() != doc.k {
        return Err(err("nodes", format!("{} nodes listed but K = {}", doc.nodes.len(), doc.k)));
    }
    let mut nodes = Vec::with_capacity(doc.k);
    for (k, n) in doc.nodes.iter().enumerate() {
        if n.x.len() != doc.l || n.y.len() != doc.l {
            return Err(err(format!("nodes[{k}]"), format!("alphabets must be given for L = {} letters", doc.l)));
        }
        nodes.push(NodeSpec::new(n.x.clone(), n.y.clone()).map_err(|e| err(format!("nodes[{k}]"), e.to_string()))?);
    }
    let session = build_session(&doc)?;
    let channel = match &doc.channel {
        ChannelBody::Kernels(tables) => build_kernels(nodes, tables)?,
        ChannelBody::Functional(f) => build_functional(nodes, f)?,
    };
    let distribution = match &doc.distribution {
        Some(rows) => Some(build_distribution(&channel, rows)?),
        None => None,
    };
    Ok(ParsedChannel { name: doc.name, channel, session, distribution })
}

fn build_session(doc: &ChannelDoc) -> Result<NetworkSession> {
    let messages: Vec<Message> = doc
        .messages
        .iter()
        .enumerate()
        .map(|(m, d)| {
            if d.source == 0 || d.sinks.contains(&0) {
                return Err(err(format!("messages[{m}]"), "nodes are numbered from 1"));
            }
            Ok(Message { name: d.name.clone(), source: d.source - 1, sinks: d.sinks.iter().map(|s| s - 1).collect() })
        })
        .collect::<Result<_>>()?;
    let session = NetworkSession::new(doc.k, messages).map_err(|e| err("messages", e.to_string()))?;
    for (k, n) in doc.nodes.iter().enumerate() {
        let names = |ids: Vec<usize>| -> Vec<String> {
            let mut v: Vec<String> = ids.into_iter().map(|m| session.messages()[m].name.clone()).collect();
            v.sort();
            v
        };
        let sorted = |v: &Vec<String>| {
            let mut v = v.clone();
            v.sort();
            v
        };
        if let Some(e) = &n.encode {
            if sorted(e) != names(session.encode(k)) {
                return Err(err(format!("nodes[{k}].encode"), "does not match the message sources"));
            }
        }
        if let Some(d) = &n.decode {
            if sorted(d) != names(session.decode(k)) {
                return Err(err(format!("nodes[{k}].decode"), "does not match the message sinks"));
            }
        }
    }
    Ok(session)
}

/// Concatenated labels of the non-singleton history symbols visible at letter `i`.
fn history_key(nodes: &[NodeSpec], h: &History, i: usize) -> String {
    let mut key = String::new();
    for (k, n) in nodes.iter().enumerate() {
        for t in 0..=i {
            if n.x_size(t) > 1 {
                key.push_str(&n.x[t][h.x[k][t]]);
            }
        }
    }
    for (k, n) in nodes.iter().enumerate() {
        for t in 0..i {
            if n.y_size(t) > 1 {
                key.push_str(&n.y[t][h.y[k][t]]);
            }
        }
    }
    key
}

/// Map from output key to output tuple at letter `i`.
fn output_keys(nodes: &[NodeSpec], i: usize) -> Result<HashMap<String, Vec<usize>>> {
    let dims: Vec<usize> = nodes.iter().map(|n| n.y_size(i)).collect();
    let total: usize = dims.iter().product();
    let mut out = HashMap::with_capacity(total);
    for mut idx in 0..total {
        let mut y = vec![0; dims.len()];
        for (slot, &d) in y.iter_mut().zip(&dims).rev() {
            *slot = idx % d;
            idx /= d;
        }
        let key: String = nodes.iter().zip(&y).filter(|(n, _)| n.y_size(i) > 1).map(|(n, &v)| n.y[i][v].as_str()).collect();
        if out.insert(key.clone(), y).is_some() {
            return Err(err(format!("outputs at letter {}", i + 1), format!("labels are ambiguous: `{key}` decodes twice")));
        }
    }
    Ok(out)
}

fn build_kernels(nodes: Vec<NodeSpec>, tables: &[BTreeMap<String, BTreeMap<String, Prob>>]) -> Result<BlockChannel> {
    let l = nodes[0].len();
    if tables.len() != l {
        return Err(err("channel.kernels", format!("{} tables for L = {l}", tables.len())));
    }
    let mut deterministic = true;
    let mut compiled: Vec<HashMap<String, Vec<(Vec<usize>, f64)>>> = Vec::with_capacity(l);
    for (i, table) in tables.iter().enumerate() {
        let keys = output_keys(&nodes, i)?;
        let mut rows = HashMap::with_capacity(table.len());
        for (hist, row) in table {
            let field = format!("channel.kernels[{i}][\"{hist}\"]");
            let mut entries = Vec::with_capacity(row.len());
            let mut sum = 0.0;
            for (out, p) in row {
                let y = keys.get(out).ok_or_else(|| err(&field, format!("unknown output `{out}`")))?;
                let p = p.value(&field)?;
                if p > 0.0 && p < 1.0 {
                    deterministic = false;
                }
                sum += p;
                entries.push((y.clone(), p));
            }
            if (sum - 1.0).abs() > TOL {
                return Err(err(field, format!("row sums to {sum}")));
            }
            rows.insert(hist.clone(), entries);
        }
        compiled.push(rows);
    }
    let shared = Arc::new(nodes.clone());
    let steps: Vec<StepFn> = compiled
        .into_iter()
        .enumerate()
        .map(|(i, rows)| -> StepFn {
            let nodes = Arc::clone(&shared);
            Arc::new(move |h: &History, _| rows.get(&history_key(&nodes, h, i)).cloned().unwrap_or_default())
        })
        .collect();
    let ch = BlockChannel::new(nodes, vec![1.0], steps)?;
    Ok(if deterministic { ch.assume_deterministic_steps() } else { ch })
}

fn build_functional(nodes: Vec<NodeSpec>, f: &FunctionalDoc) -> Result<BlockChannel> {
    let l = nodes[0].len();
    if f.outputs.len() != l {
        return Err(err("channel.functional.outputs", format!("{} maps for L = {l}", f.outputs.len())));
    }
    if f.noise.alphabet.len() != f.noise.probs.len() || f.noise.alphabet.is_empty() {
        return Err(err("channel.functional.noise", "alphabet and probs must have the same nonzero length"));
    }
    let probs: Vec<f64> = f
        .noise
        .probs
        .iter()
        .enumerate()
        .map(|(j, p)| p.value(&format!("channel.functional.noise.probs[{j}]")))
        .collect::<Result<_>>()?;
    let mut maps: Vec<MapFn> = Vec::with_capacity(l);
    let shared = Arc::new(nodes.clone());
    let noise = Arc::new(f.noise.alphabet.clone());
    for (i, table) in f.outputs.iter().enumerate() {
        let keys = output_keys(&nodes, i)?;
        let mut compiled = HashMap::with_capacity(table.len());
        for (hist, out) in table {
            let y = keys
                .get(out)
                .ok_or_else(|| err(format!("channel.functional.outputs[{i}][\"{hist}\"]"), format!("unknown output `{out}`")))?;
            compiled.insert(hist.clone(), y.clone());
        }
        let (nodes, noise) = (Arc::clone(&shared), Arc::clone(&noise));
        let k = nodes.len();
        maps.push(Arc::new(move |h: &History, z: usize| {
            let key = history_key(&nodes, h, i) + &noise[z];
            // An unknown history yields an out-of-range tuple, reported by the rollout.
            compiled.get(&key).cloned().unwrap_or_else(|| vec![usize::MAX; k])
        }));
    }
    BlockChannel::functional(nodes, probs, maps)
}

fn build_distribution(ch: &BlockChannel, rows: &[TupleDoc]) -> Result<CodeFunctionDistribution> {
    let mut lists = Vec::with_capacity(ch.k());
    for (k, n) in ch.nodes().iter().enumerate() {
        let fs = enumerate_code_functions(n, k, super::DEFAULT_CAP)?;
        let by_label: HashMap<String, _> = fs.into_iter().map(|f| (f.label(n), f)).collect();
        lists.push(by_label);
    }
    let mut entries = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let field = format!("distribution[{r}]");
        if row.trees.len() != ch.k() {
            return Err(err(&field, format!("{} trees for {} nodes", row.trees.len(), ch.k())));
        }
        let funcs = row
            .trees
            .iter()
            .enumerate()
            .map(|(k, t)| lists[k].get(t).cloned().ok_or_else(|| err(&field, format!("node {} has no code function `{t}`", k + 1))))
            .collect::<Result<Vec<_>>>()?;
        entries.push((funcs, row.p.value(&field)?));
    }
    CodeFunctionDistribution::joint(entries).map_err(|e| err("distribution", e.to_string()))
}
