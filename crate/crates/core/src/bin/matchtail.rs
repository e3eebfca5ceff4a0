//! Command-line front end: every operation behind one binary with
//! reproducible seeds, resource caps, and machine-readable output.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use matchtail::bridge::{
    cover_to_distribution, dist_to_hypergraph, equivalence_probe, DEFAULT_SUBSET_CAP,
};
use matchtail::feige::{
    conjectured_extremizer, damping_transform, iid_tail, theta_lower_search, DiscreteDistribution,
    SearchConfig, DEFAULT_ATOM_CAP,
};
use matchtail::fraclp::{duality_certificate, exact_f_0_s};
use matchtail::hypergraph::{exact_m_d_s, Hypergraph, DEFAULT_ENUM_CAP};
use matchtail::rat::{from_frac_string, to_decimal_string, to_frac_string};
use matchtail::thresholds::{deviation_bound_report, matching_bound_report, DEFAULT_PRECISION};
use matchtail::{Error, Result};

#[derive(Parser)]
#[command(name = "matchtail", version, about = "Exact hypergraph matching thresholds and i.i.d. tail bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    run: RunFlags,
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Seed for all randomized procedures
    #[arg(long, global = true, default_value_t = 0, env = "MATCHTAIL_SEED")]
    seed: u64,

    /// Worker pool size (1 is the determinism reference)
    #[arg(long, global = true, env = "MATCHTAIL_THREADS")]
    threads: Option<usize>,

    /// Output format
    #[arg(long, global = true, default_value = "table", env = "MATCHTAIL_FORMAT")]
    format: Format,

    /// Significant digits for decimal renderings
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION, env = "MATCHTAIL_PRECISION")]
    precision: usize,

    /// Cap on C(n,k) for exhaustive enumeration
    #[arg(long, global = true, default_value_t = DEFAULT_ENUM_CAP, env = "MATCHTAIL_MAX_ENUM")]
    max_enum: u32,

    /// Cap on composite atoms per convolution step
    #[arg(long, global = true, default_value_t = DEFAULT_ATOM_CAP, env = "MATCHTAIL_MAX_ATOMS")]
    max_atoms: u64,

    /// Output path (default stdout)
    #[arg(long, global = true, env = "MATCHTAIL_OUT")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// deg_H(S) for a vertex subset
    Degree {
        /// hypergraph JSON file
        #[arg(long)]
        graph: PathBuf,
        /// comma-separated vertex subset (empty for the edge count)
        #[arg(long, default_value = "")]
        set: String,
    },
    /// Maximum matching of a hypergraph
    Matching {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Fractional matching / vertex cover optima with duality certificate
    Fractional {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Exact minimum d-degree threshold m_d^s(k,n) with witness
    MdExact {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// target matching size (default n/k)
        #[arg(long)]
        s: Option<usize>,
    },
    /// Exact edge-count threshold for fractional matchings at d=0
    F0Exact {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        m: usize,
        /// target fractional matching size, as p/q
        #[arg(long)]
        s: String,
    },
    /// Closed-form bound comparison reports
    Bounds {
        #[command(subcommand)]
        which: BoundsCommand,
    },
    /// Exact i.i.d. tail Pr[X_1 + ... + X_l >= t]
    Convolve {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        t: String,
    },
    /// Seeded lower-bound search for the tail supremum
    ThetaSearch {
        #[arg(long)]
        l: u32,
        #[arg(long)]
        d: String,
        #[arg(long, default_value_t = 2)]
        support: usize,
        #[arg(long, default_value_t = 4096)]
        budget: usize,
    },
    /// Mass-at-zero damping transform
    Damp {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        delta: String,
    },
    /// Distribution-to-hypergraph reduction with certificate
    Reduce {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 1)]
        r: usize,
    },
    /// Cover-to-distribution reduction with certificate
    CoverReduce {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "1")]
        d: String,
    },
    /// Equivalence convergence table over replication factors
    Probe {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        d: u32,
        /// comma-separated replication factors
        #[arg(long, default_value = "1,2,4,8")]
        r_values: String,
    },
    /// Run the full invariant suite
    Verify,
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Minimum d-degree matching threshold bounds
    Matching {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: u32,
    },
    /// Mean-1 i.i.d. deviation bounds
    Deviation {
        #[arg(long)]
        l: u32,
        #[arg(long)]
        d: u32,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    return ExitCode::SUCCESS;
                }
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    if let Some(threads) = cli.run.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::ResourceLimit { .. } => 3,
                Error::ProvenBoundViolated(_) => 4,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn load_graph(path: &PathBuf) -> Result<Hypergraph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("bad JSON: {e}")))?;
    Hypergraph::from_json(&value)
}

/// `extremizer:l,d` shorthand or a path to a distribution JSON file.
fn load_dist(spec: &str) -> Result<DiscreteDistribution> {
    if let Some(rest) = spec.strip_prefix("extremizer:") {
        let (l, d) = rest
            .split_once(',')
            .ok_or_else(|| Error::Format("expected extremizer:l,d".into()))?;
        let l: u32 = l
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("bad l in {spec:?}")))?;
        let d = from_frac_string(d)?;
        return conjectured_extremizer(l, &d);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| Error::Format(format!("cannot read {spec}: {e}")))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("bad JSON: {e}")))?;
    DiscreteDistribution::from_json(&value)
}

fn parse_vertex_list(s: &str) -> Result<Vec<usize>> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad vertex {p:?}")))
        })
        .collect()
}

fn run(cli: &Cli) -> Result<()> {
    let flags = &cli.run;
    let report = match &cli.command {
        Command::Degree { graph, set } => {
            let h = load_graph(graph)?;
            let s = parse_vertex_list(set)?;
            let deg = h.degree(&s)?;
            serde_json::json!({"degree": deg, "set": s})
        }
        Command::Matching { graph } => {
            let h = load_graph(graph)?;
            let m = h.max_matching();
            serde_json::json!({
                "size": m.size(),
                "perfect": m.is_perfect(&h),
                "edges": m.edges(),
            })
        }
        Command::Fractional { graph } => {
            let h = load_graph(graph)?;
            let c = duality_certificate(&h)?;
            serde_json::json!({
                "nu_star": to_frac_string(&c.nu_star),
                "tau_star": to_frac_string(&c.tau_star),
                "nu_star_decimal": to_decimal_string(&c.nu_star, flags.precision),
                "matching": c.matching.to_json(),
                "cover": c.cover.to_json(),
            })
        }
        Command::MdExact { k, n, d, s } => {
            let s = s.unwrap_or(n / k);
            let r = exact_m_d_s(*k, *n, *d, s, flags.max_enum)?;
            serde_json::json!({
                "m": r.m,
                "witness": r.witness.map(|w| w.to_json()),
            })
        }
        Command::F0Exact { l, m, s } => {
            let s = from_frac_string(s)?;
            let r = exact_f_0_s(*l, *m, &s, flags.max_enum)?;
            serde_json::json!({
                "e0": r.e0,
                "witness": r.witness.map(|w| w.to_json()),
            })
        }
        Command::Bounds { which } => {
            let report = match which {
                BoundsCommand::Matching { k, d } => matching_bound_report(*k, *d)?,
                BoundsCommand::Deviation { l, d } => deviation_bound_report(*l, *d)?,
            };
            if flags.format == Format::Csv {
                return emit_text(flags, &report.to_csv(flags.precision));
            }
            report.to_json(flags.precision)
        }
        Command::Convolve { dist, l, t } => {
            let d = load_dist(dist)?;
            let t = from_frac_string(t)?;
            let tail = iid_tail(&d, *l, &t, flags.max_atoms)?;
            serde_json::json!({
                "tail": to_frac_string(&tail),
                "decimal": to_decimal_string(&tail, flags.precision),
            })
        }
        Command::ThetaSearch { l, d, support, budget } => {
            let d = from_frac_string(d)?;
            let config = SearchConfig {
                atom_cap: flags.max_atoms,
                ..SearchConfig::default()
            };
            let out = theta_lower_search(*l, &d, *support, *budget, flags.seed, &config)?;
            let findings: Vec<serde_json::Value> = out
                .conjecture_counterexamples
                .iter()
                .map(|(dist, v)| {
                    serde_json::json!({
                        "finding": "conjecture counterexample candidate",
                        "seed": flags.seed,
                        "distribution": dist.to_json(),
                        "value": to_frac_string(v),
                    })
                })
                .collect();
            for f in &findings {
                eprintln!("{f}");
            }
            serde_json::json!({
                "value": to_frac_string(&out.value),
                "decimal": to_decimal_string(&out.value, flags.precision),
                "distribution": out.best.to_json(),
                "seed": flags.seed,
                "findings": findings,
            })
        }
        Command::Damp { dist, delta } => {
            let d = load_dist(dist)?;
            let delta = from_frac_string(delta)?;
            let y = damping_transform(&d, &delta)?;
            y.to_json()
        }
        Command::Reduce { dist, l, d, r } => {
            let dd = load_dist(dist)?;
            let cert = dist_to_hypergraph(&dd, *l, *d, *r, subset_cap(flags))?;
            cert.to_json()
        }
        Command::CoverReduce { graph, d } => {
            let h = load_graph(graph)?;
            let d = from_frac_string(d)?;
            let cert = cover_to_distribution(&h, &d, subset_cap(flags))?;
            cert.to_json()
        }
        Command::Probe { dist, l, d, r_values } => {
            let dd = load_dist(dist)?;
            let rs = parse_vertex_list(r_values)?;
            let rows = equivalence_probe(*l, *d, &dd, &rs, subset_cap(flags))?;
            if flags.format == Format::Csv {
                let mut text =
                    String::from("r,m,density,tail,gap_bound,observed_gap,dominated\n");
                for row in &rows {
                    text.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        row.r,
                        row.m,
                        to_frac_string(&row.density),
                        to_frac_string(&row.tail),
                        to_frac_string(&row.gap_bound),
                        to_frac_string(&row.observed_gap),
                        row.dominated,
                    ));
                }
                return emit_text(flags, &text);
            }
            let rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    serde_json::json!({
                        "r": row.r,
                        "m": row.m,
                        "density": to_frac_string(&row.density),
                        "tail": to_frac_string(&row.tail),
                        "gap_bound": to_frac_string(&row.gap_bound),
                        "observed_gap": to_frac_string(&row.observed_gap),
                        "dominated": row.dominated,
                    })
                })
                .collect();
            serde_json::json!({ "rows": rows })
        }
        Command::Verify => {
            let results = matchtail::verify::run_all(flags.seed)?;
            let passed = results.iter().filter(|r| r.pass).count();
            let failed = results.len() - passed;
            let rows: Vec<serde_json::Value> = results
                .iter()
                .map(|r| serde_json::json!({"name": r.name, "pass": r.pass, "detail": r.detail}))
                .collect();
            let report =
                serde_json::json!({"passed": passed, "failed": failed, "checks": rows});
            emit(flags, &report)?;
            if failed > 0 {
                return Err(Error::Validation(format!("{failed} invariant checks failed")));
            }
            return Ok(());
        }
    };
    emit(flags, &report)
}

fn subset_cap(flags: &RunFlags) -> u128 {
    DEFAULT_SUBSET_CAP.max(flags.max_enum as u128)
}

fn emit(flags: &RunFlags, report: &serde_json::Value) -> Result<()> {
    let text = match flags.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(report).unwrap()),
        Format::Csv | Format::Table => render_table(report),
    };
    emit_text(flags, &text)
}

fn emit_text(flags: &RunFlags, text: &str) -> Result<()> {
    match &flags.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Format(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::Format(format!("stdout: {e}")))
        }
    }
}

fn render_table(v: &serde_json::Value) -> String {
    let mut out = String::new();
    render_value(v, "", &mut out);
    out
}

fn render_value(v: &serde_json::Value, prefix: &str, out: &mut String) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                render_value(val, &key, out);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                render_value(val, &format!("{prefix}[{i}]"), out);
            }
        }
        other => {
            out.push_str(&format!("{prefix}\t{other}\n"));
        }
    }
}
