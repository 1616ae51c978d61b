//! `coarse`: a workbench for exact computations around wreath-product
//! word metrics, finite-cover statistics, decomposition witnesses, nerve
//! transforms and the Laurent matrix representation.

mod json;

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use coarse_core::decomposition::{
    strategy_product, strategy_z_tree, strip_decomposition, verify_tree,
};
use coarse_core::group::{lamplighter_generators, WreathElement};
use coarse_core::linrep::{
    homomorphism_check, injectivity_check, psi, specialization_collision, RepMatrix,
};
use coarse_core::metric::{
    ball_space, d_multiplicity, diam, grid_space, lebesgue_number, multiplicity,
    weighted_direct_sum_space, Cover, FiniteMetricSpace, Lebesgue, MetricError, MetricFamily, Piece,
};
use coarse_core::nerve::{
    disjointness_constant_sq, nerve, phi_map, transform_t12, transform_t23, transform_t34,
    transform_t41, NerveError,
};
use coarse_core::ratio::{format_rational, parse_rational, rat_int, Rational};
use coarse_core::wordmetric::{
    bfs_ball, word_length, word_length_product, CayleyGroup, IteratedLamplighterGroup,
    LamplighterGroup, ProductLamplighterGroup,
};

const DEFAULT_BUDGET: usize = 5_000_000;
const BUDGET_ENV: &str = "COARSE_BUDGET";

/// Exit status contract: 0 pass, 1 verification failure, 2 config
/// error, 3 budget exceeded.
enum Failure {
    Verify(String),
    Config(String),
    Budget(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(format!("{e:#}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Config(format!("{e}"))
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::BudgetExceeded { limit } => {
                Failure::Budget(format!("budget of {limit} exceeded"))
            }
            other => Failure::Config(format!("{other}")),
        }
    }
}

#[derive(Parser)]
#[command(name = "coarse", version, about = "exact wreath-product coarse-geometry workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Z,
    Product,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RepMode {
    Hom,
    Inj,
}

#[derive(Subcommand)]
enum Command {
    /// Exact word length of a group element (closed-form tour formula).
    Wordlen {
        /// zwz, zwz^m (e.g. zwz^2), or zwz-wr-z
        #[arg(long)]
        group: String,
        /// element JSON, inline or @file
        #[arg(long)]
        element: String,
    },
    /// Materialize a word-metric ball by breadth-first search.
    Ball {
        #[arg(long)]
        group: String,
        #[arg(long)]
        radius: u32,
        #[arg(long)]
        budget: Option<usize>,
        /// write the JSON summary here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Growth series as CSV (radius,ball_size rows).
    Growth {
        #[arg(long)]
        group: String,
        #[arg(long)]
        radius: u32,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct a decomposition witness tree for a space.
    Decompose {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_enum)]
        strategy: Strategy,
        /// disjointness scale, "p/q" or integer
        #[arg(long)]
        r: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a decomposition witness tree against a space.
    VerifyWitness {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
    /// Run the cover-transform chain T12 -> T23 -> T34 -> T41 with
    /// exact certified statistics per step.
    CoverPipeline {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        r: String,
        #[arg(long)]
        d: String,
        #[arg(long)]
        lambda: String,
        /// comma-separated prefix of 12,23,34,41
        #[arg(long, default_value = "12,23,34,41")]
        steps: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check the matrix representation: homomorphism law on seeded
    /// random pairs, or injectivity on a BFS ball (with the t := 1
    /// collision as negative control).
    RepCheck {
        #[arg(long, value_enum)]
        mode: RepMode,
        #[arg(long, default_value_t = 6)]
        radius: u32,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Scalar statistics of a space and (optionally) a cover.
    Stats {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        cover: Option<PathBuf>,
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Emit a fixture space as JSON.
    Fixture {
        #[command(subcommand)]
        kind: FixtureKind,
    },
}

#[derive(Subcommand)]
enum FixtureKind {
    /// w x h integer grid with the l1 metric.
    Grid {
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Word-metric ball of a group as a finite metric space.
    Ball {
        #[arg(long)]
        group: String,
        #[arg(long)]
        radius: u32,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Weighted direct-sum truncation: vectors on [1, max_index] with
    /// entries in [-bound, bound], d_1(g,h) = sum n*|g_n - h_n|.
    WeightedSum {
        #[arg(long)]
        max_index: usize,
        #[arg(long)]
        bound: i64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random metric space: seeded symmetric integer weights closed
    /// under the triangle inequality by Floyd-Warshall.
    RandomMetric {
        #[arg(long)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::from(0),
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exceeded: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Wordlen { group, element } => cmd_wordlen(&group, &element),
        Command::Ball {
            group,
            radius,
            budget,
            out,
        } => cmd_ball(&group, radius, effective_budget(budget)?, out.as_deref()),
        Command::Growth {
            group,
            radius,
            budget,
            out,
        } => cmd_growth(&group, radius, effective_budget(budget)?, out.as_deref()),
        Command::Decompose {
            space,
            strategy,
            r,
            out,
        } => cmd_decompose(&space, strategy, &r, &out),
        Command::VerifyWitness { space, witness } => cmd_verify_witness(&space, &witness),
        Command::CoverPipeline {
            space,
            r,
            d,
            lambda,
            steps,
            report,
        } => cmd_cover_pipeline(&space, &r, &d, &lambda, &steps, report.as_deref()),
        Command::RepCheck {
            mode,
            radius,
            samples,
            seed,
            report,
        } => cmd_rep_check(mode, radius, samples, seed, report.as_deref()),
        Command::Stats {
            space,
            cover,
            d,
            lambda,
            report,
        } => cmd_stats(&space, cover.as_deref(), d.as_deref(), lambda.as_deref(), report.as_deref()),
        Command::Fixture { kind } => cmd_fixture(kind),
    }
}

// ---------- shared plumbing ----------

fn effective_budget(cli_budget: Option<usize>) -> Result<usize, Failure> {
    if let Some(b) = cli_budget {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(s) => s
            .parse()
            .map_err(|_| Failure::Config(format!("bad {BUDGET_ENV} value {s:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Inline JSON, `@file`, or `-` for stdin.
fn read_inline_json(arg: &str) -> Result<Value> {
    let text = if arg == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else if let Some(path) = arg.strip_prefix('@') {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))?
    } else {
        arg.to_owned()
    };
    serde_json::from_str(&text).context("parsing element JSON")
}

/// Atomic write: temp file in the destination directory, then rename.
/// Failures leave no partial output behind.
fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temp file in {}", dir.display()))?;
    use std::io::Write;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(report: &Value, out: Option<&Path>) -> Result<()> {
    let text = format!("{}\n", serde_json::to_string_pretty(report)?);
    match out {
        Some(path) => atomic_write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_rat(s: &str) -> Result<Rational, Failure> {
    parse_rational(s).ok_or_else(|| Failure::Config(format!("bad rational {s:?}")))
}

fn load_space(path: &Path) -> Result<FiniteMetricSpace, Failure> {
    Ok(json::decode_space(&read_json(path)?)?)
}

/// First signed integer appearing in a point label; all built-in
/// fixtures lead with a 1-Lipschitz integer coordinate (grid x, line
/// position, wreath shift) usable for strip decompositions.
fn label_coord(label: &str) -> Option<i64> {
    let bytes = label.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_digit() || (bytes[i] == b'-' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            return label[start..i].parse().ok();
        }
        i += 1;
    }
    None
}

fn label_coords_all(label: &str) -> Vec<i64> {
    let mut out = Vec::new();
    let mut rest = label;
    while let Some(c) = label_coord(rest) {
        out.push(c);
        let found = rest.find(&c.to_string()).expect("substring present");
        rest = &rest[found + c.to_string().len()..];
    }
    out
}

fn space_coords(space: &FiniteMetricSpace) -> Result<Vec<i64>, Failure> {
    space
        .labels()
        .iter()
        .map(|l| {
            label_coord(l).ok_or_else(|| {
                Failure::Config(format!("label {l:?} carries no integer coordinate"))
            })
        })
        .collect()
}

// ---------- group dispatch ----------

enum GroupSpec {
    Zwz,
    ZwzPow(usize),
    ZwzWrZ,
}

fn parse_group(s: &str) -> Result<GroupSpec, Failure> {
    match s {
        "zwz" => Ok(GroupSpec::Zwz),
        "zwz-wr-z" => Ok(GroupSpec::ZwzWrZ),
        other => {
            if let Some(m) = other.strip_prefix("zwz^") {
                let m: usize = m
                    .parse()
                    .map_err(|_| Failure::Config(format!("bad group arity in {other:?}")))?;
                if m == 0 {
                    return Err(Failure::Config("arity must be positive".into()));
                }
                Ok(GroupSpec::ZwzPow(m))
            } else {
                Err(Failure::Config(format!(
                    "unknown group {other:?} (expected zwz, zwz^m or zwz-wr-z)"
                )))
            }
        }
    }
}

fn ball_summary<G: CayleyGroup>(
    group: &G,
    name: &str,
    radius: u32,
    budget: usize,
) -> Result<Value, Failure> {
    let ball = bfs_ball(group, radius, budget)
        .map_err(|e| Failure::Budget(format!("{e}")))?;
    Ok(json!({
        "command": "ball",
        "group": name,
        "radius": radius,
        "sizes": ball.growth_series(),
        "count": ball.len(),
    }))
}

fn cmd_ball(group: &str, radius: u32, budget: usize, out: Option<&Path>) -> Result<(), Failure> {
    let summary = match parse_group(group)? {
        GroupSpec::Zwz => ball_summary(&LamplighterGroup, group, radius, budget)?,
        GroupSpec::ZwzWrZ => ball_summary(&IteratedLamplighterGroup, group, radius, budget)?,
        GroupSpec::ZwzPow(m) => {
            ball_summary(&ProductLamplighterGroup { arity: m }, group, radius, budget)?
        }
    };
    emit(&summary, out)?;
    Ok(())
}

fn cmd_growth(group: &str, radius: u32, budget: usize, out: Option<&Path>) -> Result<(), Failure> {
    let summary = match parse_group(group)? {
        GroupSpec::Zwz => ball_summary(&LamplighterGroup, group, radius, budget)?,
        GroupSpec::ZwzWrZ => ball_summary(&IteratedLamplighterGroup, group, radius, budget)?,
        GroupSpec::ZwzPow(m) => {
            ball_summary(&ProductLamplighterGroup { arity: m }, group, radius, budget)?
        }
    };
    let sizes = summary["sizes"].as_array().expect("sizes array");
    let mut csv = String::from("radius,ball_size\n");
    for (r, count) in sizes.iter().enumerate() {
        csv.push_str(&format!("{r},{count}\n"));
    }
    match out {
        Some(path) => atomic_write(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_wordlen(group: &str, element: &str) -> Result<(), Failure> {
    let v = read_inline_json(element)?;
    let length = match parse_group(group)? {
        GroupSpec::Zwz => word_length(&json::decode_wreath_z(&v)?),
        GroupSpec::ZwzWrZ => word_length(&json::decode_wreath_nested(&v)?),
        GroupSpec::ZwzPow(m) => {
            let g = json::decode_product(&v)?;
            if g.arity() != m {
                return Err(Failure::Config(format!(
                    "element has arity {}, group is zwz^{m}",
                    g.arity()
                )));
            }
            word_length_product(&g)
        }
    };
    println!("{length}");
    Ok(())
}

// ---------- decomposition ----------

fn cmd_decompose(
    space_path: &Path,
    strategy: Strategy,
    r: &str,
    out: &Path,
) -> Result<(), Failure> {
    let space = load_space(space_path)?;
    let r = parse_rat(r)?;
    if r <= rat_int(0) {
        return Err(Failure::Config("r must be positive".into()));
    }
    let tree = match strategy {
        Strategy::Z => {
            let coords = space_coords(&space)?;
            strategy_z_tree(&coords, r)
        }
        Strategy::Product => {
            let coords: Vec<Vec<i64>> = space
                .labels()
                .iter()
                .map(|l| {
                    let c = label_coords_all(l);
                    if c.len() == 2 {
                        Ok(c)
                    } else {
                        Err(Failure::Config(format!(
                            "label {l:?} is not a 2-coordinate grid point"
                        )))
                    }
                })
                .collect::<Result<_, _>>()?;
            let xs = sorted_distinct(coords.iter().map(|c| c[0]));
            let ys = sorted_distinct(coords.iter().map(|c| c[1]));
            if xs.len() * ys.len() != space.len() {
                return Err(Failure::Config("space is not a full grid".into()));
            }
            for (i, c) in coords.iter().enumerate() {
                let (qi, ri) = (i / ys.len(), i % ys.len());
                if c[0] != xs[qi] || c[1] != ys[ri] {
                    return Err(Failure::Config(
                        "grid labels are not in row-major order".into(),
                    ));
                }
            }
            let ta = strategy_z_tree(&xs, r);
            let tb = strategy_z_tree(&ys, r);
            strategy_product(&ta, &[xs.len()], &tb, ys.len())
        }
    };
    // self-check before writing: a strategy output must verify
    let family = MetricFamily::new(vec![space]);
    let report = verify_tree(&family, &tree)?;
    if !report.verdict() {
        return Err(Failure::Verify(
            report
                .first_failure()
                .map(|c| format!("{}: {}", c.name, c.detail))
                .unwrap_or_else(|| "witness self-check failed".into()),
        ));
    }
    let encoded = json::encode_witness_tree(&tree)?;
    atomic_write(out, &format!("{}\n", serde_json::to_string_pretty(&encoded)?))?;
    println!("witness written to {} (depth {})", out.display(), tree.depth());
    Ok(())
}

fn sorted_distinct(it: impl Iterator<Item = i64>) -> Vec<i64> {
    let set: std::collections::BTreeSet<i64> = it.collect();
    set.into_iter().collect()
}

fn cmd_verify_witness(space_path: &Path, witness_path: &Path) -> Result<(), Failure> {
    let space = load_space(space_path)?;
    let tree = json::decode_witness_tree(&read_json(witness_path)?)?;
    let family = MetricFamily::new(vec![space]);
    let report = verify_tree(&family, &tree)?;
    for check in &report.checks {
        println!(
            "{} {}: {}",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    if report.verdict() {
        println!("verdict: pass");
        Ok(())
    } else {
        Err(Failure::Verify("witness rejected".into()))
    }
}

// ---------- cover pipeline ----------

fn nerve_failure(e: NerveError) -> Failure {
    match e {
        NerveError::Metric(MetricError::BudgetExceeded { limit }) => {
            Failure::Budget(format!("budget of {limit} exceeded"))
        }
        NerveError::Metric(m) => Failure::Config(format!("{m}")),
        other => Failure::Verify(format!("{other}")),
    }
}

fn lebesgue_json(l: &Lebesgue) -> Value {
    match l {
        Lebesgue::Finite(v) => Value::String(format_rational(v)),
        Lebesgue::Infinite => Value::String("inf".into()),
    }
}

fn cmd_cover_pipeline(
    space_path: &Path,
    r: &str,
    d: &str,
    lambda: &str,
    steps: &str,
    report_path: Option<&Path>,
) -> Result<(), Failure> {
    let space = load_space(space_path)?;
    let r = parse_rat(r)?;
    let d = parse_rat(d)?;
    let lambda = parse_rat(lambda)?;
    let requested: Vec<&str> = steps.split(',').map(str::trim).collect();
    let chain = ["12", "23", "34", "41"];
    if requested.is_empty() || requested != chain[..requested.len()] {
        return Err(Failure::Config(format!(
            "steps must be a prefix of 12,23,34,41; got {steps:?}"
        )));
    }
    let coords = space_coords(&space)?;
    let witness = strip_decomposition(&coords, r);

    let mut step_reports: Vec<Value> = Vec::new();
    let result = run_pipeline(
        &space,
        &witness.family0,
        &witness.family1,
        r,
        d,
        lambda,
        requested.len(),
        &mut step_reports,
    );
    let verdict = result.is_ok();
    let report = json!({
        "command": "cover-pipeline",
        "space": space_path.display().to_string(),
        "r": format_rational(&r),
        "d": format_rational(&d),
        "lambda": format_rational(&lambda),
        "steps": step_reports,
        "verdict": if verdict { "pass" } else { "fail" },
    });
    emit(&report, report_path)?;
    result
}

#[allow(clippy::too_many_arguments)]
fn run_pipeline(
    space: &FiniteMetricSpace,
    family0: &[Piece],
    family1: &[Piece],
    r: Rational,
    d: Rational,
    lambda: Rational,
    steps: usize,
    out: &mut Vec<Value>,
) -> Result<(), Failure> {
    let cover = transform_t12(space, family0, family1, r, d).map_err(nerve_failure)?;
    let dm = d_multiplicity(space, &cover, d)?;
    out.push(json!({
        "step": "12",
        "pieces": cover.pieces.len(),
        "d_multiplicity": dm,
    }));
    if steps < 2 {
        return Ok(());
    }
    let enlarged = transform_t23(space, &cover, lambda).map_err(nerve_failure)?;
    let m = multiplicity(space, &enlarged)?;
    let lebesgue = lebesgue_number(space, &enlarged)?;
    out.push(json!({
        "step": "23",
        "pieces": enlarged.pieces.len(),
        "multiplicity": m,
        "lebesgue": lebesgue_json(&lebesgue),
    }));
    if steps < 3 {
        return Ok(());
    }
    let (complex, pou, lip) = transform_t34(space, &enlarged, lambda).map_err(nerve_failure)?;
    out.push(json!({
        "step": "34",
        "vertices": complex.vertex_count(),
        "edges": complex.edge_count(),
        "pairs_checked": lip.pairs_checked,
        "max_ratio_sq": format_rational(&lip.max_ratio_sq),
        "bound_sq": format_rational(&lip.bound_sq),
    }));
    if steps < 4 {
        return Ok(());
    }
    // largest usable output scale: r_out² <= c² / max_ratio_sq
    let c_sq = disjointness_constant_sq(0).min(disjointness_constant_sq(1));
    let budget_sq = c_sq / lip.max_ratio_sq.max(c_sq / (r * r));
    let r_out = rational_sqrt_below(budget_sq);
    let (f0, f1) = transform_t41(space, &complex, &pou, r_out).map_err(nerve_failure)?;
    out.push(json!({
        "step": "41",
        "family0": f0.len(),
        "family1": f1.len(),
        "scale": format_rational(&r_out),
        "family0_pieces": json::encode_cover(&Cover::new(f0)),
        "family1_pieces": json::encode_cover(&Cover::new(f1)),
    }));
    Ok(())
}

/// Largest k/120 whose square stays at or below `s`.
fn rational_sqrt_below(s: Rational) -> Rational {
    let sq = |k: i64| Rational::new(k, 120) * Rational::new(k, 120);
    let mut hi = 1i64;
    while sq(hi) <= s {
        hi *= 2;
    }
    let mut lo = 0i64;
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if sq(mid) <= s {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Rational::new(lo.max(0), 120)
}

// ---------- representation checks ----------

fn random_word(rng: &mut ChaCha8Rng, gens: &[WreathElement<i64>], max_len: u32) -> WreathElement<i64> {
    let len = rng.gen_range(0..=max_len);
    let mut g = WreathElement::identity();
    for _ in 0..len {
        g = g.multiply(&gens[rng.gen_range(0..gens.len())]);
    }
    g
}

fn encode_rep_matrix(m: &RepMatrix) -> Value {
    Value::Array(
        m.entries
            .iter()
            .map(|row| Value::Array(row.iter().map(json::encode_laurent).collect()))
            .collect(),
    )
}

fn cmd_rep_check(
    mode: RepMode,
    radius: u32,
    samples: usize,
    seed: u64,
    report_path: Option<&Path>,
) -> Result<(), Failure> {
    let budget = effective_budget(None)?;
    let report = match mode {
        RepMode::Hom => {
            let gens = lamplighter_generators();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pairs: Vec<(WreathElement<i64>, WreathElement<i64>)> = (0..samples)
                .map(|_| {
                    (
                        random_word(&mut rng, &gens, radius),
                        random_word(&mut rng, &gens, radius),
                    )
                })
                .collect();
            let sampled = homomorphism_check(pairs.iter().map(|(a, b)| (a, b)));
            let mut gen_pairs = Vec::new();
            for a in &gens {
                for b in &gens {
                    gen_pairs.push((a, b));
                }
            }
            let exhaustive = homomorphism_check(gen_pairs);
            let failures = sampled.failures + exhaustive.failures;
            json!({
                "command": "rep-check",
                "mode": "hom",
                "radius": radius,
                "samples": samples,
                "seed": seed,
                "generator": "chacha8",
                "sampled_pairs": sampled.pairs_checked,
                "generator_pairs": exhaustive.pairs_checked,
                "failures": failures,
                "verdict": if failures == 0 { "pass" } else { "fail" },
            })
        }
        RepMode::Inj => {
            let ball = bfs_ball(&LamplighterGroup, radius, budget)
                .map_err(|e| Failure::Budget(format!("{e}")))?;
            let inj = injectivity_check(ball.elements());
            let t1 = specialization_collision(ball.elements(), rat_int(1));
            let pass = inj.injective() && t1.is_some();
            json!({
                "command": "rep-check",
                "mode": "inj",
                "radius": radius,
                "seed": seed,
                "elements": inj.elements_checked,
                "collisions": inj.collisions.len(),
                "t1_collision_found": t1.is_some(),
                "t1_collision": t1.as_ref().map(|(a, b)| json!([
                    json::encode_wreath_z(a),
                    json::encode_wreath_z(b),
                ])),
                // formal images of the colliding pair: distinct before specialization
                "t1_collision_psi": t1.as_ref().map(|(a, b)| json!([
                    encode_rep_matrix(&psi(a)),
                    encode_rep_matrix(&psi(b)),
                ])),
                "verdict": if pass { "pass" } else { "fail" },
            })
        }
    };
    let pass = report["verdict"] == "pass";
    emit(&report, report_path)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Verify("representation check failed".into()))
    }
}

// ---------- stats ----------

fn cmd_stats(
    space_path: &Path,
    cover_path: Option<&Path>,
    d: Option<&str>,
    lambda: Option<&str>,
    report_path: Option<&Path>,
) -> Result<(), Failure> {
    let space = load_space(space_path)?;
    let whole = Piece::new((0..space.len()).collect());
    let mut report = json!({
        "command": "stats",
        "space": space_path.display().to_string(),
        "points": space.len(),
        "diam": format_rational(&diam(&space, &whole)?),
    });
    if let Some(cover_path) = cover_path {
        let cover = json::decode_cover(&read_json(cover_path)?)?;
        let covers = cover.check_covers(&space).is_ok();
        let obj = report.as_object_mut().expect("object");
        obj.insert("covers".into(), json!(covers));
        obj.insert(
            "multiplicity".into(),
            json!(multiplicity(&space, &cover)?),
        );
        if let Some(d) = d {
            let d = parse_rat(d)?;
            obj.insert(
                "d_multiplicity".into(),
                json!(d_multiplicity(&space, &cover, d)?),
            );
        }
        if covers {
            let l = lebesgue_number(&space, &cover)?;
            obj.insert("lebesgue".into(), lebesgue_json(&l));
            if let Some(lambda) = lambda {
                let lambda = parse_rat(lambda)?;
                obj.insert("lebesgue_exceeds_lambda".into(), json!(l.exceeds(lambda)));
            }
            // nerve statistics are well defined for multiplicity <= 2
            if let Ok(k) = nerve(&space, &cover) {
                obj.insert("nerve_vertices".into(), json!(k.vertex_count()));
                obj.insert("nerve_edges".into(), json!(k.edge_count()));
                if let Ok(pou) = phi_map(&space, &cover) {
                    obj.insert("phi_defined".into(), json!(pou.point_count()));
                }
            }
        }
    }
    emit(&report, report_path)?;
    Ok(())
}

// ---------- fixtures ----------

fn wreath_label(g: &WreathElement<i64>) -> String {
    let lamps: Vec<String> = g
        .lamps
        .decompose_deltas()
        .into_iter()
        .map(|(v, b)| format!("{v}:{b}"))
        .collect();
    format!("{};[{}]", g.shift, lamps.join(","))
}

fn nested_label(g: &WreathElement<WreathElement<i64>>) -> String {
    let lamps: Vec<String> = g
        .lamps
        .decompose_deltas()
        .into_iter()
        .map(|(v, b)| format!("{v}:({})", wreath_label(&b)))
        .collect();
    format!("{};[{}]", g.shift, lamps.join(","))
}

fn cmd_fixture(kind: FixtureKind) -> Result<(), Failure> {
    match kind {
        FixtureKind::Grid { width, height, out } => {
            if width == 0 || height == 0 {
                return Err(Failure::Config("grid dimensions must be positive".into()));
            }
            let space = grid_space(width, height);
            write_space(&space, &out)
        }
        FixtureKind::Ball {
            group,
            radius,
            budget,
            out,
        } => {
            let budget = effective_budget(budget)?;
            let space = match parse_group(&group)? {
                GroupSpec::Zwz => {
                    ball_space(
                        &LamplighterGroup,
                        radius,
                        budget,
                        |g, h| word_length(&g.invert().multiply(h)),
                        wreath_label,
                    )?
                    .0
                }
                GroupSpec::ZwzWrZ => {
                    ball_space(
                        &IteratedLamplighterGroup,
                        radius,
                        budget,
                        |g, h| word_length(&g.invert().multiply(h)),
                        nested_label,
                    )?
                    .0
                }
                GroupSpec::ZwzPow(m) => {
                    ball_space(
                        &ProductLamplighterGroup { arity: m },
                        radius,
                        budget,
                        |g, h| word_length_product(&g.invert().multiply(h)),
                        |g| {
                            let coords: Vec<String> =
                                g.coordinates.iter().map(wreath_label).collect();
                            coords.join("|")
                        },
                    )?
                    .0
                }
            };
            write_space(&space, &out)
        }
        FixtureKind::WeightedSum {
            max_index,
            bound,
            out,
        } => {
            if max_index == 0 || bound <= 0 {
                return Err(Failure::Config("max_index and bound must be positive".into()));
            }
            let budget = effective_budget(None)?;
            let (space, _) = weighted_direct_sum_space(max_index, bound, budget)?;
            write_space(&space, &out)
        }
        FixtureKind::RandomMetric { points, seed, out } => {
            if points == 0 {
                return Err(Failure::Config("points must be positive".into()));
            }
            let space = random_metric_space(points, seed);
            write_space(&space, &out)
        }
    }
}

fn write_space(space: &FiniteMetricSpace, out: &Path) -> Result<(), Failure> {
    let v = json::encode_space(space);
    atomic_write(out, &format!("{}\n", serde_json::to_string_pretty(&v)?))?;
    println!("{} points written to {}", space.len(), out.display());
    Ok(())
}

/// Seeded random metric: symmetric integer weights in [1, 16], closed
/// under the triangle inequality by Floyd-Warshall. Positivity survives
/// the closure because all path sums of positive edges stay positive.
fn random_metric_space(n: usize, seed: u64) -> FiniteMetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dist = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.gen_range(1..=16);
            dist[i][j] = w;
            dist[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    dist[i][j] = dist[i][j].min(dist[i][k] + dist[k][j]);
                }
            }
        }
    }
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    let table = dist
        .iter()
        .map(|row| row.iter().map(|&x| Rational::from_integer(x)).collect())
        .collect();
    FiniteMetricSpace::new(labels, table).expect("metric closure satisfies the axioms")
}
