//! Command-line front end: graph ingestion, profile configuration, pipeline
//! invocation, verification reports.
//!
//! Exit codes: 0 success, 2 parse error, 3 parameter regime (including work
//! budgets), 4 internal assertion.

use clap::{Args, Parser, Subcommand};
use mincut_core::graph::{VertexSet, WeightedGraph};
use mincut_core::oracle::{stoer_wagner, OracleBudget};
use mincut_core::pipeline::{
    decompose_level, matula_estimate, min_cut, representation_budget, GuessOutcome, PipelineConfig,
    Profile,
};
use mincut_core::sparsifier::build_skeleton;
use mincut_core::{Budget, Error};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mincut", version, about = "Deterministic minimum-cut toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Input graph file: `p <n> <m>` header then `e <u> <v> <w>` lines.
    path: PathBuf,
    /// Constant profile: desk or paper.
    #[arg(long, default_value = "desk")]
    profile: String,
    /// Uncrossing accuracy override.
    #[arg(long)]
    eps: Option<f64>,
    /// Tau override for the strength machinery.
    #[arg(long)]
    tau: Option<f64>,
    /// s0 as a multiple of delta-tilde (desk profile).
    #[arg(long)]
    s0_mult: Option<f64>,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Exact minimum cut with the guess-loop pipeline.
    Mincut {
        #[command(flatten)]
        common: CommonOpts,
        /// Cross-check the result against the brute-force reference.
        #[arg(long)]
        verify: bool,
        /// Worker threads for independent guesses.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Per-level clustering and cross-weight statistics.
    Decompose {
        #[command(flatten)]
        common: CommonOpts,
        /// Print the clustering of one level in full.
        #[arg(long)]
        level: Option<usize>,
    },
    /// Build and write the skeleton graph.
    Skeleton {
        #[command(flatten)]
        common: CommonOpts,
        /// Output path for the skeleton graph file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exhaustively check the skeleton properties (small graphs).
        #[arg(long)]
        verify: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mincut {
            common,
            verify,
            jobs,
        } => cmd_mincut(&common, verify, jobs),
        Command::Decompose { common, level } => cmd_decompose(&common, level),
        Command::Skeleton {
            common,
            out,
            verify,
        } => cmd_skeleton(&common, out.as_deref(), verify),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Parse(_) => 2,
                CliError::Core(Error::ParameterRegime(_)) => 3,
                CliError::Core(Error::BudgetExceeded(_)) => 3,
                CliError::Core(Error::Assertion(_)) => 4,
                CliError::Core(_) => 2,
                CliError::Io(_) => 2,
            })
        }
    }
}

#[derive(Debug)]
enum CliError {
    Parse(String),
    Io(std::io::Error),
    Core(Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = Result<T, CliError>;

// ---------------------------------------------------------------------------
// Graph file format
// ---------------------------------------------------------------------------

/// Parse the DIMACS-flavored format: comments `c ...`, one `p <n> <m>`
/// header, then exactly m lines `e <u> <v> <w>` with 1-indexed endpoints.
fn parse_graph(text: &str) -> CliResult<WeightedGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let no = lineno + 1;
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut it = line.split_whitespace();
        match it.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(CliError::Parse(format!("line {no}: duplicate header")));
                }
                let n: usize = parse_field(it.next(), no, "vertex count")?;
                let m: usize = parse_field(it.next(), no, "edge count")?;
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header
                    .ok_or_else(|| CliError::Parse(format!("line {no}: edge before header")))?;
                let u: usize = parse_field(it.next(), no, "endpoint")?;
                let v: usize = parse_field(it.next(), no, "endpoint")?;
                let w: f64 = parse_field(it.next(), no, "weight")?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(CliError::Parse(format!(
                        "line {no}: endpoint out of range 1..={n}"
                    )));
                }
                if u == v {
                    return Err(CliError::Parse(format!("line {no}: self-loop not allowed")));
                }
                if !(w.is_finite() && w > 0.0) {
                    return Err(CliError::Parse(format!(
                        "line {no}: weight must be positive and finite, got {w}"
                    )));
                }
                edges.push((u - 1, v - 1, w));
            }
            Some(tok) => {
                return Err(CliError::Parse(format!(
                    "line {no}: unknown record '{tok}'"
                )));
            }
            None => {}
        }
    }
    let (n, m) = header.ok_or_else(|| CliError::Parse("missing 'p <n> <m>' header".into()))?;
    if edges.len() != m {
        return Err(CliError::Parse(format!(
            "header promises {m} edges, file has {}",
            edges.len()
        )));
    }
    WeightedGraph::new(n, edges).map_err(|e| CliError::Parse(e.to_string()))
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    lineno: usize,
    what: &str,
) -> CliResult<T> {
    let s = field.ok_or_else(|| CliError::Parse(format!("line {lineno}: missing {what}")))?;
    s.parse()
        .map_err(|_| CliError::Parse(format!("line {lineno}: malformed {what} '{s}'")))
}

fn write_graph(g: &WeightedGraph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("c {c}\n"));
    }
    out.push_str(&format!("p {} {}\n", g.vertex_count(), g.edge_count()));
    for &(u, v, w) in g.edges() {
        out.push_str(&format!("e {} {} {}\n", u + 1, v + 1, w));
    }
    out
}

fn load_graph(path: &Path) -> CliResult<WeightedGraph> {
    let text = std::fs::read_to_string(path)?;
    parse_graph(&text)
}

fn config_from(common: &CommonOpts, n: usize, jobs: usize) -> CliResult<PipelineConfig> {
    let mut cfg = match common.profile.as_str() {
        "desk" => PipelineConfig::desk(),
        "paper" => PipelineConfig::paper(n),
        other => {
            return Err(CliError::Parse(format!(
                "unknown profile '{other}' (expected desk or paper)"
            )))
        }
    };
    if let Some(eps) = common.eps {
        cfg.eps = eps;
    }
    cfg.tau = common.tau;
    if let Some(s0) = common.s0_mult {
        cfg.s0_mult = s0;
    }
    cfg.jobs = jobs;
    Ok(cfg)
}

fn one_indexed(side: &VertexSet) -> Vec<usize> {
    side.iter().map(|v| v + 1).collect()
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct LevelReport {
    level: usize,
    vertices: usize,
    volume: f64,
    cross_weight: f64,
    clusters: usize,
}

#[derive(Serialize)]
struct MincutReport {
    command: &'static str,
    profile: String,
    vertices: usize,
    edges: usize,
    value: f64,
    side: Vec<usize>,
    lambda0: f64,
    guesses_total: usize,
    guesses_computed: usize,
    guesses_infeasible: usize,
    fallback_used: bool,
    guess_ledger: Vec<String>,
    verify: Option<String>,
}

fn render_text<T: Serialize>(report: &T) -> String {
    // Deterministic flat text: the report rendered one field per line.
    let value = serde_json::to_value(report).expect("report serializes");
    let mut out = String::new();
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            match v {
                serde_json::Value::Array(items) => {
                    out.push_str(&format!("{k}:\n"));
                    for item in items {
                        out.push_str(&format!("  {}\n", render_scalar(&item)));
                    }
                }
                other => out.push_str(&format!("{k}: {}\n", render_scalar(&other))),
            }
        }
    }
    out
}

fn render_scalar(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Null => "none".into(),
        other => other.to_string(),
    }
}

fn emit<T: Serialize>(report: &T, json: bool) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(report).expect("report serializes")
        );
    } else {
        print!("{}", render_text(report));
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_mincut(common: &CommonOpts, verify: bool, jobs: usize) -> CliResult<()> {
    let g = load_graph(&common.path)?;
    let cfg = config_from(common, g.vertex_count(), jobs)?;
    if g.vertex_count() < 2 {
        return Err(CliError::Core(Error::Precondition("n < 2".into())));
    }
    if !g.is_connected() {
        // Disconnected input: value 0 with a separating component.
        let side = g.component_of(0);
        let report = MincutReport {
            command: "mincut",
            profile: common.profile.clone(),
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            value: 0.0,
            side: one_indexed(&mincut_core::oracle::canonical_side(side, g.vertex_count())),
            lambda0: 0.0,
            guesses_total: 0,
            guesses_computed: 0,
            guesses_infeasible: 0,
            fallback_used: false,
            guess_ledger: vec![],
            verify: verify.then(|| "disconnected: value 0 is exact".to_string()),
        };
        emit(&report, common.json);
        return Ok(());
    }
    let res = min_cut(&g, &cfg)?;
    let mut computed = 0;
    let mut infeasible = 0;
    let ledger: Vec<String> = res
        .ledger
        .iter()
        .map(|rec| match &rec.outcome {
            GuessOutcome::Computed {
                value,
                degraded,
                levels,
                ..
            } => {
                computed += 1;
                format!(
                    "guess {:.6}: value {} levels {}{}",
                    rec.lambda_tilde,
                    value,
                    levels,
                    if *degraded { " (degraded)" } else { "" }
                )
            }
            GuessOutcome::Infeasible { reason } => {
                infeasible += 1;
                format!("guess {:.6}: {reason}", rec.lambda_tilde)
            }
        })
        .collect();
    let verify_line = if verify {
        if g.vertex_count() <= OracleBudget::default().max_n_stoer_wagner {
            let (_, want) = stoer_wagner(&g)?;
            if (res.value - want).abs() <= 1e-6 * (1.0 + want.abs()) {
                Some(format!("reference value {want}: match"))
            } else {
                return Err(CliError::Core(Error::Assertion(format!(
                    "pipeline value {} disagrees with reference {want}",
                    res.value
                ))));
            }
        } else {
            Some("graph above the reference budget; skipped".to_string())
        }
    } else {
        None
    };
    let report = MincutReport {
        command: "mincut",
        profile: common.profile.clone(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        value: res.value,
        side: one_indexed(&res.side),
        lambda0: res.lambda0,
        guesses_total: res.ledger.len(),
        guesses_computed: computed,
        guesses_infeasible: infeasible,
        fallback_used: res.fallback_used,
        guess_ledger: ledger,
        verify: verify_line,
    };
    emit(&report, common.json);
    Ok(())
}

#[derive(Serialize)]
struct DecomposeReport {
    command: &'static str,
    profile: String,
    vertices: usize,
    edges: usize,
    lambda_tilde: f64,
    levels: Vec<LevelReport>,
    level_detail: Option<Vec<Vec<usize>>>,
    notes: Vec<String>,
}

/// The guess used by the reporting commands: the estimate, clamped so the
/// derived delta never exceeds the minimum degree.
fn reporting_guess(g: &WeightedGraph) -> CliResult<f64> {
    let (lambda0, _) = matula_estimate(g)?;
    if lambda0 <= 0.0 {
        return Err(CliError::Core(Error::Disconnected));
    }
    Ok(lambda0.min(1.01 * g.min_weighted_degree()))
}

fn cmd_decompose(common: &CommonOpts, level_wanted: Option<usize>) -> CliResult<()> {
    let g = load_graph(&common.path)?;
    if g.vertex_count() < 2 {
        return Err(CliError::Core(Error::Precondition("n < 2".into())));
    }
    if !g.is_connected() {
        return Err(CliError::Core(Error::Disconnected));
    }
    let cfg = config_from(common, g.vertex_count(), 1)?;
    let lambda_tilde = reporting_guess(&g)?;
    let mut budget = Budget::new(cfg.guess_budget.saturating_mul(4));
    let mut levels = Vec::new();
    let mut detail = None;
    let mut notes = Vec::new();
    let mut current = g.clone();
    let mut j = 0;
    while current.vertex_count() >= 2 && j < cfg.level_cap {
        let (clustering, next, _, stats) =
            match decompose_level(&current, lambda_tilde, &cfg, &mut budget) {
                Ok(x) => x,
                Err(Error::BudgetExceeded(reason)) => {
                    notes.push(format!("level {j}: stopped ({reason})"));
                    break;
                }
                Err(e) => return Err(e.into()),
            };
        levels.push(LevelReport {
            level: j,
            vertices: stats.vertices,
            volume: stats.volume + 0.0,
            cross_weight: stats.cross_weight + 0.0,
            clusters: stats.cluster_count,
        });
        if cfg.profile == Profile::Paper && stats.cross_weight > stats.volume / 2.0 {
            return Err(CliError::Core(Error::Assertion(
                "cross weight above half the volume".into(),
            )));
        }
        if level_wanted == Some(j) {
            detail = Some(
                clustering
                    .clusters
                    .iter()
                    .map(|c| c.iter().map(|v| v + 1).collect())
                    .collect(),
            );
        }
        if next.vertex_count() == current.vertex_count() {
            notes.push(format!("level {j}: no shrink; stopped"));
            break;
        }
        current = next;
        j += 1;
    }
    let report = DecomposeReport {
        command: "decompose",
        profile: common.profile.clone(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        lambda_tilde,
        levels,
        level_detail: detail,
        notes,
    };
    emit(&report, common.json);
    Ok(())
}

#[derive(Serialize)]
struct SkeletonReport {
    command: &'static str,
    profile: String,
    vertices: usize,
    edges: usize,
    lambda_tilde: f64,
    eps: f64,
    w_prime: f64,
    skeleton_pairs: usize,
    skeleton_units: u64,
    out: Option<String>,
    verify: Option<String>,
}

fn cmd_skeleton(common: &CommonOpts, out: Option<&Path>, verify: bool) -> CliResult<()> {
    let g = load_graph(&common.path)?;
    if g.vertex_count() < 2 {
        return Err(CliError::Core(Error::Precondition("n < 2".into())));
    }
    if !g.is_connected() {
        return Err(CliError::Core(Error::Disconnected));
    }
    let cfg = config_from(common, g.vertex_count(), 1)?;
    let lambda_tilde = reporting_guess(&g)?;
    let mut budget = Budget::new(cfg.guess_budget.saturating_mul(4));
    // Build the hierarchy for the reporting guess.
    let mut levels = Vec::new();
    let mut level_stats = Vec::new();
    let mut current = g.clone();
    while current.vertex_count() >= 2 {
        if levels.len() >= cfg.level_cap {
            return Err(CliError::Core(Error::BudgetExceeded("level cap".into())));
        }
        let (clustering, next, map, stats) =
            decompose_level(&current, lambda_tilde, &cfg, &mut budget)?;
        if next.vertex_count() == current.vertex_count() {
            return Err(CliError::Core(Error::ParameterRegime(
                "decomposition stalled before one vertex".into(),
            )));
        }
        levels.push(mincut_core::graph::HierarchyLevel {
            graph: current,
            clustering,
            map,
        });
        level_stats.push(stats);
        current = next;
    }
    let hierarchy = mincut_core::graph::ContractionHierarchy {
        levels,
        top: current,
    };
    let d_cap = representation_budget(&cfg, &hierarchy, &level_stats, lambda_tilde);
    let skel = build_skeleton(&g, &hierarchy, cfg.eps, lambda_tilde, d_cap, &mut budget)?;
    let out_path = out.map(|p| p.to_path_buf()).unwrap_or_else(|| {
        let mut p = common.path.clone();
        p.set_extension("skeleton");
        p
    });
    // Parallel unit edges are run-length encoded as integer weights.
    let skel_graph = skel.to_weighted();
    let text = write_graph(
        &skel_graph,
        &[
            format!("skeleton W' {}", skel.w_prime),
            "unit multi-edges encoded as integer multiplicities".to_string(),
        ],
    );
    std::fs::write(&out_path, text)?;
    let verify_line = if verify {
        let obudget = OracleBudget {
            max_n_exhaustive: 16,
            ..OracleBudget::default()
        };
        if g.vertex_count() <= obudget.max_n_exhaustive {
            let (all, lambda) =
                mincut_core::oracle::enumerate_cuts_exhaustive(&g, f64::INFINITY, &obudget)?;
            let (mins, _) = mincut_core::oracle::enumerate_cuts_exhaustive(&g, 1.0, &obudget)?;
            for s in &mins {
                if skel.scaled_boundary(s) > (1.0 + cfg.eps) * lambda * (1.0 + 1e-9) {
                    return Err(CliError::Core(Error::Assertion(
                        "skeleton read a minimum cut too high".into(),
                    )));
                }
            }
            for s in &all {
                if skel.scaled_boundary(s) < (1.0 - cfg.eps) * lambda * (1.0 - 1e-9) {
                    return Err(CliError::Core(Error::Assertion(
                        "skeleton read a cut below the floor".into(),
                    )));
                }
            }
            Some(format!(
                "both skeleton properties hold over {} cuts",
                all.len()
            ))
        } else {
            Some("graph above the exhaustive budget; skipped".to_string())
        }
    } else {
        None
    };
    let report = SkeletonReport {
        command: "skeleton",
        profile: common.profile.clone(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        lambda_tilde,
        eps: cfg.eps,
        w_prime: skel.w_prime,
        skeleton_pairs: skel.pairs.len(),
        skeleton_units: skel.counts.iter().sum(),
        out: Some(out_path.display().to_string()),
        verify: verify_line,
    };
    emit(&report, common.json);
    Ok(())
}
