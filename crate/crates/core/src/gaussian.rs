//! Scalar linear networks with additive Gaussian noise: cut upper bounds,
//! quantize-forward lower bounds, and the additive-gap certificate.
//!
//! Node `k` observes `Y_k = Σ_{j≠k} G_kj X_j + Z_k` over a block of `L`
//! letters, where each `G_kj` is `L×L` lower triangular and the noise vectors
//! are independent across nodes. Node 0 multicasts to the sink set.

use std::collections::BTreeMap;

use nalgebra::{convert, DMatrix, RealField};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct GaussianNetwork<T: RealField + Copy> {
    k: usize,
    l: usize,
    /// `(k, j) → G_kj`, 0-based, only nonzero blocks stored.
    gains: BTreeMap<(usize, usize), DMatrix<T>>,
    noise: Vec<DMatrix<T>>,
    power: T,
    sinks: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LowerBound<T> {
    pub value: T,
    /// True when the raw expression was negative and was clamped to 0.
    pub clamped: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CutGap<T> {
    pub cut: Vec<usize>,
    /// Bits per block.
    pub upper: T,
    /// Bits per block, clamped at 0.
    pub lower: T,
    pub clamped: bool,
    /// `(upper − lower) / L`.
    pub gap_per_letter: T,
    /// `K/2 + (|S|/2) log2(|S| L)`: the penalty accounting for this cut.
    pub penalty: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport<T> {
    pub cuts: Vec<CutGap<T>>,
    /// `K (1 + log2(K L)) / 2`.
    pub bound: T,
    pub min_upper: T,
    pub min_lower: T,
    /// `(min_upper − min_lower) / L`.
    pub realized_gap: T,
    /// Cuts whose gap exceeds `bound + 1e-6`.
    pub violations: Vec<Vec<usize>>,
}

impl<T: RealField + Copy> GapReport<T> {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn c<T: RealField + Copy>(v: f64) -> T {
    convert(v)
}

fn log2<T: RealField + Copy>(v: T) -> T {
    v.ln() / T::ln_2()
}

/// `log2 |M|` of a symmetric positive-definite matrix via its Cholesky factor.
pub fn log2_det_spd<T: RealField + Copy>(m: &DMatrix<T>) -> Result<T> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite(format!("{}×{} matrix", m.nrows(), m.ncols())))?;
    let mut acc = T::zero();
    for d in chol.l_dirty().diagonal().iter() {
        acc += log2(*d);
    }
    Ok(acc * c(2.0))
}

/// Both sides of `log2|A + B/2| ≥ log2|A + B| − b` for `b×b` positive-definite `A`, `B`.
pub fn halved_sum_inequality<T: RealField + Copy>(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<(T, T)> {
    let n: T = c(a.nrows() as f64);
    let lhs = log2_det_spd(&(a + b * c::<T>(0.5)))?;
    let rhs = log2_det_spd(&(a + b))? - n;
    Ok((lhs, rhs))
}

impl<T: RealField + Copy> GaussianNetwork<T> {
    /// Validates shapes, lower-triangularity, and positive-definite noise.
    /// `noise = None` means unit covariance at every node.
    pub fn new(
        k: usize,
        l: usize,
        gains: BTreeMap<(usize, usize), DMatrix<T>>,
        noise: Option<Vec<DMatrix<T>>>,
        power: T,
        sinks: Vec<usize>,
    ) -> Result<Self> {
        if k < 2 || l == 0 {
            return Err(Error::Shape(format!("need K ≥ 2 and L ≥ 1, got K = {k}, L = {l}")));
        }
        for (&(a, b), g) in &gains {
            let name = format!("G_{},{}", a + 1, b + 1);
            if a >= k || b >= k || a == b {
                return Err(Error::Shape(format!("{name}: node indices must be distinct and at most K")));
            }
            if g.nrows() != l || g.ncols() != l {
                return Err(Error::Shape(format!("{name} is {}×{}, expected {l}×{l}", g.nrows(), g.ncols())));
            }
            for r in 0..l {
                for col in r + 1..l {
                    if g[(r, col)] != T::zero() {
                        return Err(Error::NotLowerTriangular(format!("{name} has a nonzero entry at ({}, {})", r + 1, col + 1)));
                    }
                }
            }
        }
        let noise = noise.unwrap_or_else(|| vec![DMatrix::identity(l, l); k]);
        if noise.len() != k {
            return Err(Error::Shape(format!("{} noise covariances for {k} nodes", noise.len())));
        }
        for (j, q) in noise.iter().enumerate() {
            if q.nrows() != l || q.ncols() != l {
                return Err(Error::Shape(format!("Q_{} is not {l}×{l}", j + 1)));
            }
            let tol: T = c(1e-9);
            if (q - q.transpose()).amax() > tol * (T::one() + q.amax()) {
                return Err(Error::NotPositiveDefinite(format!("Q_{} is not symmetric", j + 1)));
            }
            if q.clone().cholesky().is_none() {
                return Err(Error::NotPositiveDefinite(format!("Q_{}", j + 1)));
            }
        }
        if power < T::zero() {
            return Err(Error::Invalid("power must be nonnegative".into()));
        }
        let mut sinks = sinks;
        sinks.sort_unstable();
        sinks.dedup();
        if sinks.is_empty() || sinks.iter().any(|&t| t == 0 || t >= k) {
            return Err(Error::Invalid("sinks must be a nonempty set of nodes other than the source".into()));
        }
        Ok(GaussianNetwork { k, l, gains, noise, power, sinks })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn power(&self) -> T {
        self.power
    }

    pub fn sinks(&self) -> &[usize] {
        &self.sinks
    }

    pub fn gain(&self, k: usize, j: usize) -> DMatrix<T> {
        self.gains.get(&(k, j)).cloned().unwrap_or_else(|| DMatrix::zeros(self.l, self.l))
    }

    /// All cuts `S ∋ 0` with a sink outside `S`, in subset-mask order.
    pub fn cuts(&self) -> Vec<Vec<usize>> {
        (0u64..1 << (self.k - 1))
            .map(|m| {
                let mut s = vec![0];
                s.extend((1..self.k).filter(|j| m >> (j - 1) & 1 == 1));
                s
            })
            .filter(|s| self.sinks.iter().any(|t| !s.contains(t)))
            .collect()
    }

    fn check_cut(&self, s: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
        let mut s = s.to_vec();
        s.sort_unstable();
        s.dedup();
        if !s.contains(&0) || s.iter().any(|&j| j >= self.k) {
            return Err(Error::InvalidCut("S must contain the source and only valid nodes".into()));
        }
        let sc: Vec<usize> = (0..self.k).filter(|j| !s.contains(j)).collect();
        if !self.sinks.iter().any(|t| sc.contains(t)) {
            return Err(Error::InvalidCut("S^c contains no sink".into()));
        }
        Ok((s, sc))
    }

    /// `G_{S^c S}` with block entries `G_kj`, `k ∈ S^c`, `j ∈ S`.
    pub fn cut_matrix(&self, s: &[usize]) -> Result<DMatrix<T>> {
        let (s, sc) = self.check_cut(s)?;
        let l = self.l;
        let mut g = DMatrix::zeros(sc.len() * l, s.len() * l);
        for (r, &kk) in sc.iter().enumerate() {
            for (col, &j) in s.iter().enumerate() {
                if let Some(b) = self.gains.get(&(kk, j)) {
                    g.view_mut((r * l, col * l), (l, l)).copy_from(b);
                }
            }
        }
        Ok(g)
    }

    /// `G̃ = S_Z^{-1} G_{S^c S}` with `S_Z` the lower Cholesky factor of the stacked `S^c` noise covariance.
    pub fn whiten(&self, s: &[usize]) -> Result<DMatrix<T>> {
        let (_, sc) = self.check_cut(s)?;
        let l = self.l;
        let mut q = DMatrix::zeros(sc.len() * l, sc.len() * l);
        for (r, &kk) in sc.iter().enumerate() {
            q.view_mut((r * l, r * l), (l, l)).copy_from(&self.noise[kk]);
        }
        let chol = q.cholesky().ok_or_else(|| Error::NotPositiveDefinite("stacked noise covariance".into()))?;
        let g = self.cut_matrix(s)?;
        chol.l_dirty()
            .lower_triangle()
            .solve_lower_triangular(&g)
            .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))
    }

    /// Singular values of `G̃`, with numerically zero values set to 0.
    pub fn singular_values(&self, s: &[usize]) -> Result<Vec<T>> {
        let g = self.whiten(s)?;
        let sv: Vec<T> = g.singular_values().iter().copied().collect();
        let max = sv.iter().copied().fold(T::zero(), |a, b| a.max(b));
        let floor = max * c(RANK_TOL);
        Ok(sv.into_iter().map(|v| if v < floor { T::zero() } else { v }).collect())
    }

    /// `Σ_j ½ log2(1 + s_j² |S| P)`, bits per block.
    pub fn cut_upper_bound(&self, s: &[usize]) -> Result<T> {
        let n: T = c(self.check_cut(s)?.0.len() as f64);
        Ok(self.singular_value_sum(s, n * self.power)?)
    }

    /// `Σ_j ½ log2(1 + s_j² P/L) − K L / 2`, bits per block, clamped at 0.
    pub fn qf_lower_bound(&self, s: &[usize]) -> Result<LowerBound<T>> {
        let raw = self.singular_value_sum(s, self.power / c(self.l as f64))? - c((self.k * self.l) as f64 / 2.0);
        Ok(if raw < T::zero() { LowerBound { value: T::zero(), clamped: true } } else { LowerBound { value: raw, clamped: false } })
    }

    /// `Σ_j ½ log2(1 + s_j² q)`.
    pub fn singular_value_sum(&self, s: &[usize], q: T) -> Result<T> {
        let half: T = c(0.5);
        Ok(self.singular_values(s)?.into_iter().fold(T::zero(), |acc, sv| acc + half * log2(T::one() + sv * sv * q)))
    }

    /// `½ log2 |I + G̃ Q_X G̃ᵀ|` for an input covariance over the `|S| L` inputs of the cut.
    pub fn log_det_bound(&self, s: &[usize], qx: &DMatrix<T>) -> Result<T> {
        let g = self.whiten(s)?;
        if qx.nrows() != g.ncols() || qx.ncols() != g.ncols() {
            return Err(Error::Shape(format!("Q_X must be {0}×{0}", g.ncols())));
        }
        let m = DMatrix::identity(g.nrows(), g.nrows()) + &g * qx * g.transpose();
        Ok(log2_det_spd(&m)? * c(0.5))
    }

    /// Per-cut bounds and the gap check against `K (1 + log2(K L)) / 2`.
    pub fn gap_certificate(&self) -> Result<GapReport<T>> {
        let cuts = self.cuts();
        if cuts.is_empty() {
            return Err(Error::InvalidCut("network has no valid cut".into()));
        }
        let lf: T = c(self.l as f64);
        let kf: T = c(self.k as f64);
        let bound = kf * (T::one() + log2(kf * lf)) / c(2.0);
        let slack: T = c(1e-6);
        let mut rows = Vec::with_capacity(cuts.len());
        let mut violations = Vec::new();
        for s in cuts {
            let upper = self.cut_upper_bound(&s)?;
            let lower = self.qf_lower_bound(&s)?;
            let gap = (upper - lower.value) / lf;
            let sn: T = c(s.len() as f64);
            let penalty = kf / c(2.0) + sn / c(2.0) * log2(sn * lf);
            if gap > bound + slack {
                violations.push(s.clone());
            }
            rows.push(CutGap { cut: s, upper, lower: lower.value, clamped: lower.clamped, gap_per_letter: gap, penalty });
        }
        let min_upper = rows.iter().map(|r| r.upper).fold(T::max_value().unwrap(), |a, b| a.min(b));
        let min_lower = rows.iter().map(|r| r.lower).fold(T::max_value().unwrap(), |a, b| a.min(b));
        Ok(GapReport { realized_gap: (min_upper - min_lower) / lf, cuts: rows, bound, min_upper, min_lower, violations })
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixDoc {
    Nested(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "P")]
    p: f64,
    sinks: Vec<usize>,
    #[serde(rename = "G")]
    g: BTreeMap<String, MatrixDoc>,
    #[serde(rename = "Q", default)]
    q: Option<BTreeMap<String, MatrixDoc>>,
    #[serde(default)]
    #[allow(dead_code)]
    name: Option<String>,
}

fn matrix(doc: &MatrixDoc, l: usize, field: &str) -> Result<DMatrix<f64>> {
    let flat: Vec<f64> = match doc {
        MatrixDoc::Flat(v) => v.clone(),
        MatrixDoc::Nested(rows) => {
            if rows.len() != l || rows.iter().any(|r| r.len() != l) {
                return Err(Error::Spec { field: field.into(), msg: format!("expected {l} rows of {l} entries") });
            }
            rows.concat()
        }
    };
    if flat.len() != l * l {
        return Err(Error::Spec { field: field.into(), msg: format!("expected {} entries, found {}", l * l, flat.len()) });
    }
    Ok(DMatrix::from_row_slice(l, l, &flat))
}

fn node_index(s: &str, k: usize, field: &str) -> Result<usize> {
    match s.trim().parse::<usize>() {
        Ok(v) if (1..=k).contains(&v) => Ok(v - 1),
        _ => Err(Error::Spec { field: field.into(), msg: format!("`{s}` is not a node in 1..={k}") }),
    }
}

impl GaussianNetwork<f64> {
    /// Parses the JSON network format: `K`, `L`, `P`, 1-based `sinks`,
    /// `G` as `"k,j"` → `L×L` row-major matrix, optional `Q` as `"k"` → matrix.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NetworkDoc = serde_json::from_str(text)?;
        let mut gains = BTreeMap::new();
        for (key, m) in &doc.g {
            let field = format!("G[\"{key}\"]");
            let (a, b) = key
                .split_once(',')
                .ok_or_else(|| Error::Spec { field: field.clone(), msg: "key must be \"k,j\"".into() })?;
            let idx = (node_index(a, doc.k, &field)?, node_index(b, doc.k, &field)?);
            gains.insert(idx, matrix(m, doc.l, &field)?);
        }
        let noise = match &doc.q {
            None => None,
            Some(q) => {
                let mut out = vec![DMatrix::identity(doc.l, doc.l); doc.k];
                for (key, m) in q {
                    let field = format!("Q[\"{key}\"]");
                    out[node_index(key, doc.k, &field)?] = matrix(m, doc.l, &field)?;
                }
                Some(out)
            }
        };
        let sinks = doc.sinks.iter().map(|&t| t.wrapping_sub(1)).collect();
        Self::new(doc.k, doc.l, gains, noise, doc.p, sinks)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Random network: gains uniform in `[-2, 2]` on and below the diagonal,
    /// random SPD noise when `correlated`, sinks drawn at random.
    pub fn random<R: Rng>(rng: &mut R, k: usize, l: usize, power: f64, correlated: bool) -> Result<Self> {
        let mut gains = BTreeMap::new();
        for a in 0..k {
            for b in (0..k).filter(|&b| b != a) {
                let g = DMatrix::from_fn(l, l, |r, col| if col <= r { rng.gen_range(-2.0..=2.0) } else { 0.0 });
                gains.insert((a, b), g);
            }
        }
        let noise = correlated.then(|| {
            (0..k)
                .map(|_| {
                    let m = DMatrix::from_fn(l, l, |_, _| rng.gen_range(-1.0..1.0));
                    &m * m.transpose() + DMatrix::identity(l, l) * 0.5
                })
                .collect()
        });
        let mut sinks: Vec<usize> = (1..k).filter(|_| rng.gen_bool(0.5)).collect();
        if sinks.is_empty() {
            sinks.push(rng.gen_range(1..k));
        }
        Self::new(k, l, gains, noise, power, sinks)
    }
}
