//! The `nibm` command-line front end.

pub mod registry;

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cutset::{cutset_region, BoundKind};
use crate::gaussian::GaussianNetwork;
use crate::model::spec::{load_channel, ParsedChannel};
use crate::model::{enumerate_code_functions, CodeFunctionDistribution};
use crate::model::DEFAULT_CAP;
use crate::optimizer::{maximize_cutset_minimum, maximize_point_to_point, Options};
use crate::strategies::{bc_regions, df_rate, mac_fb_region, max_df_rate, qf_rate, rc_cutset, relay_without_delay_bound, Quantizer, Region};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "nibm", version, about = "Capacities, cut-set bounds and achievable rates for networks with in-block memory")]
pub struct Cli {
    /// Stopping tolerance of the iterative optimizers, in bits per block.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Iteration limit of Blahut–Arimoto.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub max_iter: usize,
    /// Cap on code functions per node and on code-function tuples.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: u128,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Report every proper cut, not only those separating a message.
    #[arg(long, global = true)]
    pub all_cuts: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RelayStrategy {
    Df,
    Cutset,
    Rwod,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Capacity of a point-to-point channel, or the optimized cut-set bound of a network.
    Capacity {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Cut-set bound per cut under the document's code-function law.
    Cutset {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "exact")]
        kind: BoundKind,
    },
    /// A weakened cut-set bound per cut.
    Weakened {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "input-output-weakened")]
        kind: BoundKind,
    },
    /// Relay-channel rates: decode-forward, cut-set, or the relay-without-delay bound.
    Relay {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = RelayStrategy::Df)]
        strategy: RelayStrategy,
    },
    /// MAC-with-feedback region under the document's law.
    MacRegion {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Broadcast cut-set and deterministic regions under the document's law.
    BcRegion {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Quantize-forward multicast rate with identity quantizers.
    Qf {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Gap certificate of a Gaussian network, from a file or drawn at random.
    GaussianGap {
        #[arg(long = "spec")]
        net: Option<PathBuf>,
        /// Draw random networks with this many nodes instead of reading a file.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long, default_value_t = 10.0)]
        power: f64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Code-function counts (and labels with `--labels`) per node.
    Enumerate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        labels: bool,
    },
    /// Recompute the worked examples and compare with their known values.
    Examples {
        /// Only run examples whose id contains this string.
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultRow {
    pub name: String,
    pub value: f64,
    pub unit: String,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
    pub source: Option<String>,
}

impl ResultRow {
    fn plain(name: impl Into<String>, value: f64, unit: &str) -> Self {
        ResultRow { name: name.into(), value, unit: unit.into(), expected: None, tolerance: None, pass: None, source: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub input_digest: Option<String>,
    pub results: Vec<ResultRow>,
    pub meta: BTreeMap<String, String>,
    pub ok: bool,
}

impl RunReport {
    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(self)?,
            Format::Csv => {
                let mut out = String::from("name,value,unit,expected,tolerance,pass\n");
                for r in &self.results {
                    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        r.name,
                        r.value,
                        r.unit,
                        opt(r.expected),
                        opt(r.tolerance),
                        r.pass.map(|p| p.to_string()).unwrap_or_default()
                    ));
                }
                out
            }
            Format::Text => {
                let w = self.results.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
                let mut out = format!("# {}", self.command);
                if let Some(d) = &self.input_digest {
                    out.push_str(&format!("  (input {d})"));
                }
                out.push('\n');
                for (k, v) in &self.meta {
                    out.push_str(&format!("# {k}: {v}\n"));
                }
                out.push_str(&format!("{:<w$}  {:>14}  {:<10}  {:>14}  {}\n", "name", "value", "unit", "expected", "status"));
                for r in &self.results {
                    let expected = r.expected.map(|e| format!("{e:>14.9}")).unwrap_or_else(|| format!("{:>14}", "-"));
                    let status = match r.pass {
                        Some(true) => "PASS",
                        Some(false) => "FAIL",
                        None => "",
                    };
                    out.push_str(&format!("{:<w$}  {:>14.9}  {:<10}  {expected}  {status}\n", r.name, r.value, r.unit));
                }
                out
            }
        })
    }
}

fn digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let mut h = DefaultHasher::new();
    bytes.hash(&mut h);
    Ok(format!("{:016x}", h.finish()))
}

fn require_law(doc: &ParsedChannel) -> Result<&CodeFunctionDistribution> {
    doc.distribution
        .as_ref()
        .ok_or_else(|| Error::Invalid("this command needs a `distribution` in the channel document".into()))
}

fn region_rows(prefix: &str, region: &Region) -> Vec<ResultRow> {
    region.halfspaces.iter().map(|h| ResultRow::plain(format!("{prefix}{}", h.label), h.bound, "bit/use")).collect()
}

/// Run a parsed command line and build its report.
pub fn execute(cli: &Cli) -> Result<RunReport> {
    let opts = Options { tol: cli.tol, max_iter: cli.max_iter, cap: cli.cap, ..Options::default() };
    let mut meta = BTreeMap::new();
    let mut digest_of = None;
    let mut load = |p: &PathBuf| -> Result<ParsedChannel> {
        digest_of = Some(digest(p)?);
        load_channel(p)
    };
    let mut results = Vec::new();
    let name = match &cli.command {
        Command::Capacity { spec } => {
            let doc = load(spec)?;
            let r = if doc.channel.k() == 2 && !doc.channel.node(1).has_input() {
                maximize_point_to_point(&doc.channel, &opts)?
            } else {
                maximize_cutset_minimum(&doc.session, &doc.channel, &opts)?
            };
            meta.insert("method".into(), format!("{:?}", r.method).to_lowercase());
            meta.insert("iterations".into(), r.iterations.to_string());
            if let Some(g) = r.gap {
                meta.insert("bracket".into(), format!("{g:.3e}"));
            }
            results.push(ResultRow::plain("capacity", r.value, "bit/use"));
            "capacity"
        }
        Command::Cutset { spec, kind } | Command::Weakened { spec, kind } => {
            let doc = load(spec)?;
            let rows = cutset_region(&doc.session, &doc.channel, require_law(&doc)?, *kind, cli.all_cuts)?;
            meta.insert("kind".into(), kind.tag().into());
            for r in &rows {
                let cut: Vec<String> = r.cut.iter().map(|n| (n + 1).to_string()).collect();
                let note = if r.messages.is_empty() { " (separates no message)" } else { "" };
                results.push(ResultRow::plain(format!("S={{{}}}{note}", cut.join(",")), r.per_use, "bit/use"));
            }
            if let Some(min) = rows.iter().filter(|r| !r.messages.is_empty()).map(|r| r.per_use).reduce(f64::min) {
                results.push(ResultRow::plain("min over separating cuts", min, "bit/use"));
            }
            if matches!(cli.command, Command::Cutset { .. }) {
                "cutset"
            } else {
                "weakened"
            }
        }
        Command::Relay { spec, strategy } => {
            let doc = load(spec)?;
            let rate = match (strategy, &doc.distribution) {
                (RelayStrategy::Df, None) => {
                    let r = max_df_rate(&doc.channel, &opts)?;
                    results.push(ResultRow::plain("max DF rate", r.value, "bit/use"));
                    None
                }
                (RelayStrategy::Df, Some(pa)) => Some(df_rate(&doc.channel, pa)?),
                (RelayStrategy::Cutset, _) => Some(rc_cutset(&doc.channel, require_law(&doc)?)?),
                (RelayStrategy::Rwod, _) => Some(relay_without_delay_bound(&doc.channel, require_law(&doc)?)?),
            };
            if let Some(r) = rate {
                results.push(ResultRow::plain("first term", r.first, "bit/use"));
                results.push(ResultRow::plain("second term", r.second, "bit/use"));
                results.push(ResultRow::plain("rate", r.rate, "bit/use"));
            }
            meta.insert("strategy".into(), format!("{strategy:?}").to_lowercase());
            "relay"
        }
        Command::MacRegion { spec } => {
            let doc = load(spec)?;
            results = region_rows("", &mac_fb_region(&doc.channel, require_law(&doc)?)?.region());
            "mac-region"
        }
        Command::BcRegion { spec } => {
            let doc = load(spec)?;
            let r = bc_regions(&doc.channel, require_law(&doc)?)?;
            results = region_rows("cutset ", &r.cutset);
            if let Some(m) = &r.marton {
                results.extend(region_rows("marton ", m));
            }
            if let Some(d) = &r.deterministic {
                results.extend(region_rows("deterministic ", d));
            }
            "bc-region"
        }
        Command::Qf { spec } => {
            let doc = load(spec)?;
            let mut sinks: Vec<usize> = doc.session.messages().iter().flat_map(|m| m.sinks.clone()).collect();
            sinks.sort_unstable();
            sinks.dedup();
            let qs = vec![Quantizer::Identity; doc.channel.k()];
            let r = qf_rate(&doc.channel, require_law(&doc)?, &qs, &sinks)?;
            for c in &r.cuts {
                let cut: Vec<String> = c.cut.iter().map(|n| (n + 1).to_string()).collect();
                results.push(ResultRow::plain(format!("S={{{}}}", cut.join(",")), c.value, "bit/use"));
            }
            results.push(ResultRow::plain("rate", r.rate, "bit/use"));
            results.push(ResultRow::plain("rate (weaker form)", r.rate_lb, "bit/use"));
            "qf"
        }
        Command::GaussianGap { net, random, l, power, count } => {
            let nets = match (net, random) {
                (Some(p), None) => {
                    digest_of = Some(digest(p)?);
                    vec![GaussianNetwork::load(p)?]
                }
                (None, Some(k)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    (0..*count).map(|_| GaussianNetwork::random(&mut rng, *k, *l, *power, true)).collect::<Result<_>>()?
                }
                _ => return Err(Error::Invalid("give either --spec FILE or --random K".into())),
            };
            let mut ok = true;
            for (i, n) in nets.iter().enumerate() {
                let g = n.gap_certificate()?;
                let tag = if nets.len() > 1 { format!("net {} ", i + 1) } else { String::new() };
                results.push(ResultRow::plain(format!("{tag}min upper"), g.min_upper, "bit/letter"));
                results.push(ResultRow::plain(format!("{tag}min lower"), g.min_lower, "bit/letter"));
                let mut row = ResultRow::plain(format!("{tag}gap"), g.realized_gap, "bit/letter");
                row.expected = Some(g.bound);
                row.pass = Some(g.holds());
                ok &= g.holds();
                results.push(row);
            }
            meta.insert("certified".into(), ok.to_string());
            "gaussian-gap"
        }
        Command::Enumerate { spec, labels } => {
            let doc = load(spec)?;
            for (k, n) in doc.channel.nodes().iter().enumerate() {
                match n.code_function_count() {
                    Some(c) => results.push(ResultRow::plain(format!("node {}", k + 1), c as f64, "count")),
                    None => results.push(ResultRow::plain(format!("node {}", k + 1), f64::INFINITY, "count")),
                }
                if *labels {
                    let fs = enumerate_code_functions(n, k, cli.cap)?;
                    let names: Vec<String> = fs.iter().map(|f| f.label(n)).collect();
                    meta.insert(format!("node {} labels", k + 1), names.join(" "));
                }
            }
            "enumerate"
        }
        Command::Examples { filter } => {
            for g in registry::registry() {
                if filter.as_ref().is_some_and(|f| !g.id.contains(f.as_str())) {
                    continue;
                }
                let start = Instant::now();
                let (value, pass) = match (g.compute)(&opts) {
                    Ok(v) => (v, (v - g.expected).abs() <= g.tol),
                    Err(e) => {
                        meta.insert(g.id.clone(), format!("error: {e}"));
                        (f64::NAN, false)
                    }
                };
                meta.entry(format!("time {}", g.id)).or_insert(format!("{:.1} ms", start.elapsed().as_secs_f64() * 1e3));
                results.push(ResultRow {
                    name: g.id,
                    value,
                    unit: g.unit.into(),
                    expected: Some(g.expected),
                    tolerance: Some(g.tol),
                    pass: Some(pass),
                    source: Some(g.source.into()),
                });
            }
            "examples"
        }
    };
    let ok = results.iter().all(|r| r.pass != Some(false));
    Ok(RunReport { command: name.into(), input_digest: digest_of, results, meta, ok })
}

/// Entry point: parses `args`, prints the report, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli).and_then(|r| Ok((r.render(cli.format)?, r.ok))) {
        Ok((text, ok)) => {
            print!("{text}");
            if ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
