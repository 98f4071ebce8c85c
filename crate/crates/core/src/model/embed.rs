//! Classic channel models written as NiBMs, and the worked example networks.
//!
//! Node indices are 0-based: node 0 is the transmitter (or source), the last
//! node the receiver unless stated otherwise.

use std::sync::Arc;

use super::{absent, labels, Alphabet, BlockChannel, History, MapFn, NodeSpec, StepFn};
use crate::{Error, Result, TOL};

fn check_rows<'a>(what: &str, rows: impl IntoIterator<Item = &'a Vec<f64>>, width: usize) -> Result<()> {
    for (r, row) in rows.into_iter().enumerate() {
        if row.len() != width {
            return Err(Error::Shape(format!("{what}: row {r} has {} entries, expected {width}", row.len())));
        }
        if let Some(&v) = row.iter().find(|&&v| v < 0.0) {
            return Err(Error::Negative { what: format!("{what}, row {r}"), value: v });
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > TOL {
            return Err(Error::NotNormalized { what: format!("{what}, row {r}"), sum });
        }
    }
    Ok(())
}

fn bsc(delta: f64, input: usize) -> Vec<f64> {
    if input == 0 {
        vec![1.0 - delta, delta]
    } else {
        vec![delta, 1.0 - delta]
    }
}

/// Channel with state known causally at the transmitter, as a two-letter NiBM.
///
/// Letter 1 delivers the state `S ~ p_s` to the transmitter; letter 2 applies
/// `w[x][s][y] = P(y | x, s)`. With `genie` the receiver also sees `S` at letter 1.
pub fn embed_state_channel(
    s: Alphabet,
    x: Alphabet,
    y: Alphabet,
    p_s: &[f64],
    w: &[Vec<Vec<f64>>],
    genie: bool,
) -> Result<BlockChannel> {
    if p_s.len() != s.len() || w.len() != x.len() || w.iter().any(|r| r.len() != s.len()) {
        return Err(Error::Shape("state-channel tables do not match the alphabets".into()));
    }
    check_rows("P(y|x,s)", w.iter().flatten(), y.len())?;
    let tx = NodeSpec::new(vec![absent(), x], vec![s.clone(), absent()])?;
    let rx = NodeSpec::new(vec![absent(), absent()], vec![if genie { s } else { absent() }, y])?;
    let w = w.to_vec();
    let steps: Vec<StepFn> = vec![
        Arc::new(move |_: &History, s: usize| vec![(vec![s, if genie { s } else { 0 }], 1.0)]),
        Arc::new(move |h: &History, s: usize| {
            let x = h.x[0][1];
            w[x][s].iter().enumerate().map(|(y, &p)| (vec![0, y], p)).collect()
        }),
    ];
    BlockChannel::new(vec![tx, rx], p_s.to_vec(), steps)
}

/// Channel with action-dependent state: letter 1 input is the action `B`
/// with feedback `S ~ p_s[b]`, letter 2 input `X` with output `Y ~ w[b][x][s]`.
pub fn embed_action_channel(
    b: Alphabet,
    s: Alphabet,
    x: Alphabet,
    y: Alphabet,
    p_s: &[Vec<f64>],
    w: &[Vec<Vec<Vec<f64>>>],
) -> Result<BlockChannel> {
    if p_s.len() != b.len() || w.len() != b.len() || w.iter().any(|r| r.len() != x.len() || r.iter().any(|q| q.len() != s.len())) {
        return Err(Error::Shape("action-channel tables do not match the alphabets".into()));
    }
    check_rows("P(s|b)", p_s, s.len())?;
    check_rows("P(y|x,s,b)", w.iter().flatten().flatten(), y.len())?;
    let tx = NodeSpec::new(vec![b, x], vec![s, absent()])?;
    let rx = NodeSpec::new(vec![absent(), absent()], vec![absent(), y])?;
    let (p_s, w) = (p_s.to_vec(), w.to_vec());
    let steps: Vec<StepFn> = vec![
        Arc::new(move |h: &History, _| p_s[h.x[0][0]].iter().enumerate().map(|(s, &p)| (vec![s, 0], p)).collect()),
        Arc::new(move |h: &History, _| {
            let (b, x, s) = (h.x[0][0], h.x[0][1], h.y[0][0]);
            w[b][x][s].iter().enumerate().map(|(y, &p)| (vec![0, y], p)).collect()
        }),
    ];
    BlockChannel::new(vec![tx, rx], vec![1.0], steps)
}

/// Relay without delay `P(y2|x1) P(y3|x1,x2,y2)` as a three-node NiBM with
/// `L = 2` and `x_{2,1} = y_{3,1} = y_{2,2} = x_{1,2} = 0`.
///
/// `p2[x1][y2]`, `p3[x1][x2][y2][y3]`.
pub fn embed_relay_without_delay(p2: &[Vec<f64>], p3: &[Vec<Vec<Vec<f64>>>]) -> Result<BlockChannel> {
    let nx1 = p2.len();
    let ny2 = p2.first().map(Vec::len).unwrap_or(0);
    let nx2 = p3.first().map(Vec::len).unwrap_or(0);
    let ny3 = p3.first().and_then(|r| r.first()).and_then(|r| r.first()).map(Vec::len).unwrap_or(0);
    if nx1 == 0 || p3.len() != nx1 || p3.iter().any(|r| r.len() != nx2 || r.iter().any(|q| q.len() != ny2)) {
        return Err(Error::Shape("relay tables do not match".into()));
    }
    check_rows("P(y2|x1)", p2, ny2)?;
    check_rows("P(y3|x1,x2,y2)", p3.iter().flatten().flatten(), ny3)?;
    let nodes = vec![
        NodeSpec::new(vec![labels(nx1), absent()], vec![absent(), absent()])?,
        NodeSpec::new(vec![absent(), labels(nx2)], vec![labels(ny2), absent()])?,
        NodeSpec::new(vec![absent(), absent()], vec![absent(), labels(ny3)])?,
    ];
    let (p2, p3) = (p2.to_vec(), p3.to_vec());
    let steps: Vec<StepFn> = vec![
        Arc::new(move |h: &History, _| p2[h.x[0][0]].iter().enumerate().map(|(y, &p)| (vec![0, y, 0], p)).collect()),
        Arc::new(move |h: &History, _| {
            let (x1, x2, y2) = (h.x[0][0], h.x[1][1], h.y[1][0]);
            p3[x1][x2][y2].iter().enumerate().map(|(y, &p)| (vec![0, 0, y], p)).collect()
        }),
    ];
    BlockChannel::new(nodes, vec![1.0], steps)
}

/// Block fading: state `S ~ p_s` drawn once per block of `l` letters, then
/// letters are independent with `w[s][x][y][ỹ] = P(y, ỹ | x, s)`; `ỹ` is fed back.
pub fn embed_block_fading(p_s: &[f64], w: &[Vec<Vec<Vec<f64>>>], l: usize) -> Result<BlockChannel> {
    let nx = w.first().map(Vec::len).unwrap_or(0);
    let ny = w.first().and_then(|r| r.first()).map(Vec::len).unwrap_or(0);
    let nf = w.first().and_then(|r| r.first()).and_then(|r| r.first()).map(Vec::len).unwrap_or(0);
    if w.len() != p_s.len() || nx == 0 || w.iter().any(|r| r.len() != nx || r.iter().any(|q| q.len() != ny || q.iter().any(|v| v.len() != nf))) {
        return Err(Error::Shape("fading tables do not match".into()));
    }
    for (s, rows) in w.iter().enumerate() {
        for (x, r) in rows.iter().enumerate() {
            let flat: Vec<f64> = r.iter().flatten().copied().collect();
            check_rows(&format!("P(y,ỹ|x={x},s={s})"), [&flat], ny * nf)?;
        }
    }
    let nodes = vec![NodeSpec::sized(&vec![nx; l], &vec![nf; l])?, NodeSpec::sized(&vec![1; l], &vec![ny; l])?];
    let w = Arc::new(w.to_vec());
    let steps: Vec<StepFn> = (0..l)
        .map(|i| -> StepFn {
            let w = Arc::clone(&w);
            Arc::new(move |h: &History, s: usize| {
                let x = h.x[0][i];
                let mut out = Vec::with_capacity(ny * nf);
                for (y, row) in w[s][x].iter().enumerate() {
                    for (f, &p) in row.iter().enumerate() {
                        out.push((vec![f, y], p));
                    }
                }
                out
            })
        })
        .collect();
    BlockChannel::new(nodes, p_s.to_vec(), steps)
}

fn bernoulli(eps: f64) -> Vec<f64> {
    vec![1.0 - eps, eps]
}

/// `Y1 = X1, Ỹ1 = Z, Y2 = X2 ⊕ Z` with `P(Z=1) = eps`; without `feedback`
/// the transmitter does not see `Z`.
pub fn binary_feedback_channel(eps: f64, feedback: bool) -> Result<BlockChannel> {
    let tx = NodeSpec::sized(&[2, 2], &[if feedback { 2 } else { 1 }, 1])?;
    let rx = NodeSpec::sized(&[1, 1], &[2, 2])?;
    let maps: Vec<MapFn> = vec![
        Arc::new(move |h: &History, z: usize| vec![if feedback { z } else { 0 }, h.x[0][0]]),
        Arc::new(|h: &History, z: usize| vec![0, h.x[0][1] ^ z]),
    ];
    let z_alph = vec![vec![labels(2), absent()], vec![absent(), labels(2)]];
    BlockChannel::functional(vec![tx, rx], bernoulli(eps), maps)?.with_noise_parts(
        if feedback { z_alph } else { vec![vec![absent(), absent()], vec![absent(), labels(2)]] },
        Arc::new(move |z| vec![vec![if feedback { z } else { 0 }, 0], vec![0, z]]),
    )
}

/// `Y1 = X1 ⊕ Z1 ⊕ Z2, Ỹ1 = Z1, Y2 = Z2` with independent `Z1 ~ B(e1)`, `Z2 ~ B(e2)`.
///
/// Declared additive with `Z_{1,1} = Z1`, `Z_{2,1} = Z1 ⊕ Z2`, `Z_{2,2} = Z2`.
pub fn deficiency_channel(e1: f64, e2: f64) -> Result<BlockChannel> {
    let tx = NodeSpec::sized(&[2, 1], &[2, 1])?;
    let rx = NodeSpec::sized(&[1, 1], &[2, 2])?;
    let noise = vec![(1.0 - e1) * (1.0 - e2), (1.0 - e1) * e2, e1 * (1.0 - e2), e1 * e2];
    let maps: Vec<MapFn> = vec![
        Arc::new(|h: &History, z: usize| {
            let (z1, z2) = (z >> 1, z & 1);
            vec![z1, h.x[0][0] ^ z1 ^ z2]
        }),
        Arc::new(|_: &History, z: usize| vec![0, z & 1]),
    ];
    BlockChannel::functional(vec![tx, rx], noise, maps)?.with_noise_parts(
        vec![vec![labels(2), absent()], vec![labels(2), labels(2)]],
        Arc::new(|z| {
            let (z1, z2) = (z >> 1, z & 1);
            vec![vec![z1, 0], vec![z1 ^ z2, z2]]
        }),
    )
}

/// Two-way channel `Y_{2,1} = X_{1,1} ⊕ Z`, `Y_{1,2} = X_{2,2} ⊕ Y_{2,1}`.
pub fn two_way_bsc(eps: f64) -> Result<BlockChannel> {
    let n1 = NodeSpec::sized(&[2, 1], &[1, 2])?;
    let n2 = NodeSpec::sized(&[1, 2], &[2, 1])?;
    let maps: Vec<MapFn> = vec![
        Arc::new(|h: &History, z: usize| vec![0, h.x[0][0] ^ z]),
        Arc::new(|h: &History, _| vec![h.x[1][1] ^ h.y[1][0], 0]),
    ];
    BlockChannel::functional(vec![n1, n2], bernoulli(eps), maps)
}

/// Causal relay network with five nodes and `L = 3` where nodes 2 and 4 are
/// absent: `Y_3 = [X_1, Z]` at letter 1, `Y_5 = Z` at letter 2, `Z` uniform.
/// Node 3 has an input of size `x3` at letter 2.
pub fn causal_relay_example(x3: usize) -> Result<BlockChannel> {
    let y3: Alphabet = ["00", "01", "10", "11"].iter().map(|s| s.to_string()).collect();
    let nodes = vec![
        NodeSpec::sized(&[2, 1, 1], &[1, 1, 1])?,
        NodeSpec::silent(3),
        NodeSpec::new(vec![absent(), labels(x3), absent()], vec![y3, absent(), absent()])?,
        NodeSpec::silent(3),
        NodeSpec::sized(&[1, 1, 1], &[1, 2, 1])?,
    ];
    let maps: Vec<MapFn> = vec![
        Arc::new(|h: &History, z: usize| vec![0, 0, 2 * h.x[0][0] + z, 0, 0]),
        Arc::new(|_: &History, z: usize| vec![0, 0, 0, 0, z]),
        Arc::new(|_: &History, _| vec![0; 5]),
    ];
    BlockChannel::functional(nodes, bernoulli(0.5), maps)
}

/// State channel `Y = X + S` (integer addition) with binary `X` and uniform binary `S`.
pub fn state_adder_channel(genie: bool) -> Result<BlockChannel> {
    let w: Vec<Vec<Vec<f64>>> =
        (0..2).map(|x| (0..2).map(|s| (0..3).map(|y| if y == x + s { 1.0 } else { 0.0 }).collect()).collect()).collect();
    embed_state_channel(labels(2), labels(2), labels(3), &[0.5, 0.5], &w, genie)
}

/// Rewrite channel: `B → S` is BSC(δ); at letter 2 the input `N` keeps
/// `Y = S`, while `X ∈ {0,1}` rewrites through another BSC(δ).
pub fn rewrite_channel(delta: f64) -> Result<BlockChannel> {
    let x: Alphabet = ["0", "1", "N"].iter().map(|s| s.to_string()).collect();
    let p_s: Vec<Vec<f64>> = (0..2).map(|b| bsc(delta, b)).collect();
    let w: Vec<Vec<Vec<Vec<f64>>>> = (0..2)
        .map(|_b| {
            (0..3)
                .map(|x| (0..2).map(|s| if x == 2 { bsc(0.0, s) } else { bsc(delta, x) }).collect())
                .collect()
        })
        .collect();
    embed_action_channel(labels(2), labels(2), x, labels(2), &p_s, &w)
}

/// Binary adder MAC `Y = G1·X1 + G2·X2` (integer arithmetic) over `L`
/// letters, with full output feedback to both transmitters.
pub fn binary_adder_mac(g1: &[Vec<u32>], g2: &[Vec<u32>], feedback: bool) -> Result<BlockChannel> {
    let l = g1.len();
    if g2.len() != l || g1.iter().chain(g2).any(|r| r.len() != l) {
        return Err(Error::Shape("gain matrices must be L x L".into()));
    }
    for (g, name) in [(g1, "G1"), (g2, "G2")] {
        if (0..l).any(|i| (i + 1..l).any(|j| g[i][j] != 0)) {
            return Err(Error::NotLowerTriangular(name.into()));
        }
    }
    let ny: Vec<usize> = (0..l).map(|i| (g1[i].iter().sum::<u32>() + g2[i].iter().sum::<u32>()) as usize + 1).collect();
    let fb: Vec<usize> = if feedback { ny.clone() } else { vec![1; l] };
    let nodes =
        vec![NodeSpec::sized(&vec![2; l], &fb)?, NodeSpec::sized(&vec![2; l], &fb)?, NodeSpec::sized(&vec![1; l], &ny)?];
    let (g1, g2) = (Arc::new(g1.to_vec()), Arc::new(g2.to_vec()));
    let maps: Vec<MapFn> = (0..l)
        .map(|i| -> MapFn {
            let (g1, g2) = (Arc::clone(&g1), Arc::clone(&g2));
            Arc::new(move |h: &History, _| {
                let y: u32 = (0..=i).map(|t| g1[i][t] * h.x[0][t] as u32 + g2[i][t] * h.x[1][t] as u32).sum();
                let y = y as usize;
                if feedback {
                    vec![y, y, y]
                } else {
                    vec![0, 0, y]
                }
            })
        })
        .collect();
    BlockChannel::functional(nodes, vec![1.0], maps)
}
