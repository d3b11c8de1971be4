use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use vcl_core::homology::HomologyRep;
use vcl_core::matgroup::{
    gamma_b_action, image_group, is_congruence_of_level, PointPartition, DEFAULT_ELEMENT_CAP,
    ELEMENT_CAP_ENV,
};
use vcl_core::presentation::parse_word_list;
use vcl_core::star::star_decide;
use vcl_core::surfaces::{build, characteristic_cover_stats, validate_surface};
use vcl_core::verify::run_verification_suite;
use vcl_core::wohlfahrt::{
    canonical_form, minimal_congruence_levels, noncongruence_certificate, todd_coxeter,
    validate_coset_graph, wohlfahrt_level,
};
use vcl_core::{CosetGraph, Error, Family, Scope};

#[derive(Parser)]
#[command(name = "vcl", version, about = "Veech groups of regular double n-gons and 2n-gons")]
struct Cli {
    /// Print human-readable text instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,

    /// Upper bound on the size of matrix group closures.
    #[arg(long, global = true, env = ELEMENT_CAP_ENV, default_value_t = DEFAULT_ELEMENT_CAP)]
    element_cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translation surface data.
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// Action of the Veech group on first homology.
    #[command(subcommand)]
    Homology(HomologyCmd),
    /// Property (★) for the regular 2n-gon.
    #[command(subcommand)]
    Star(StarCmd),
    /// Finite quotients and congruence tests.
    #[command(subcommand)]
    Congruence(CongruenceCmd),
    /// Wohlfahrt levels and non-congruence certificates.
    #[command(subcommand)]
    Wohlfahrt(WohlfahrtCmd),
    /// Coset enumeration and canonical numbering.
    #[command(subcommand)]
    Cosets(CosetsCmd),
    /// Re-derive a batch of known results.
    Verify {
        #[arg(long, default_value = "all")]
        scope: String,
    },
}

#[derive(Args)]
struct SurfaceArgs {
    #[arg(long, default_value = "double-ngon")]
    family: String,
    #[arg(long)]
    n: usize,
}

#[derive(Subcommand)]
enum SurfaceCmd {
    Info {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Also report the characteristic cover of this level.
        #[arg(long)]
        cover: Option<u64>,
    },
}

#[derive(Subcommand)]
enum HomologyCmd {
    Matrices {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Reduce the matrices modulo this number.
        #[arg(long = "mod")]
        modulus: Option<u32>,
    },
}

#[derive(Subcommand)]
enum StarCmd {
    Decide {
        #[arg(long)]
        n: usize,
        #[arg(long = "mod")]
        modulus: u64,
        /// Include a solution vector when the property holds.
        #[arg(long)]
        witness: bool,
    },
    Table {
        #[arg(long)]
        n: usize,
        /// Inclusive range such as `2..15`.
        #[arg(long)]
        mod_range: String,
    },
}

#[derive(Subcommand)]
enum CongruenceCmd {
    /// Order of the image of the Veech group modulo `a`.
    Order {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long = "mod")]
        modulus: u32,
    },
    /// Whether the subgroup of a coset graph contains `Γ(a)`.
    Test {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long = "mod")]
        modulus: u32,
    },
    /// The stabilizer of a partition of `(Z/aZ)^2g` as a coset graph.
    GammaB {
        #[arg(long)]
        partition: PathBuf,
        #[arg(long, default_value = "double-ngon")]
        family: String,
        /// Where to write the coset graph.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum WohlfahrtCmd {
    Level {
        #[arg(long)]
        graph: PathBuf,
    },
    Certify {
        #[arg(long)]
        graph: PathBuf,
    },
    MinimalLevels {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 48)]
        bound: u64,
    },
}

#[derive(Subcommand)]
enum CosetsCmd {
    Enumerate {
        #[arg(long, default_value = "double-ngon")]
        family: String,
        #[arg(long)]
        n: usize,
        /// Comma-separated generator words, e.g. `T,R^-1TR^-1`.
        #[arg(long)]
        gens: String,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Canonicalize {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// What a command produced: a JSON value and a text rendering.
struct Output {
    json: serde_json::Value,
    text: String,
    /// Set when the command ran but found a failed check.
    failed: bool,
}

impl Output {
    fn new(value: impl Serialize, text: impl Into<String>) -> Result<Output, CliError> {
        Ok(Output {
            json: serde_json::to_value(value).map_err(|e| CliError::Io(e.to_string()))?,
            text: text.into(),
            failed: false,
        })
    }
}

enum CliError {
    Lib(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 4,
            CliError::Lib(e) => match e.root() {
                Error::CapExceeded(_) | Error::CosetCapExceeded(_) | Error::CoverTooLarge { .. } => 3,
                Error::Parse { .. } | Error::UnknownSymbol(_) => 4,
                _ => 2,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

fn family(s: &str) -> Result<Family, CliError> {
    Ok(s.parse()?)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Parses and validates a coset graph file.
fn load_graph(path: &Path) -> Result<CosetGraph, CliError> {
    let g = CosetGraph::parse(&read(path)?)?;
    let report = validate_coset_graph(&g);
    let failed: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
    if !failed.is_empty() {
        return Err(Error::InvalidGraph(failed.join("; ")).into());
    }
    Ok(g)
}

fn rep_for(family: Family, n: usize) -> Result<HomologyRep, CliError> {
    Ok(HomologyRep::for_surface(&build(family, n)?, None)?)
}

fn grid(rows: &[Vec<i64>]) -> String {
    let width = rows
        .iter()
        .flatten()
        .map(|x| x.to_string().len())
        .max()
        .unwrap_or(1);
    let mut s = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().map(|x| format!("{x:>width$}")).collect();
        let _ = writeln!(s, "  {}", cells.join(" "));
    }
    s
}

fn parse_range(s: &str) -> Result<(u64, u64), CliError> {
    let bad = || CliError::Lib(Error::Parse { line: 1, reason: format!("bad range {s:?}, expected A..B") });
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let cap = cli.element_cap;
    match &cli.command {
        Command::Surface(SurfaceCmd::Info { surface, cover }) => {
            let s = build(family(&surface.family)?, surface.n)?;
            let valid = validate_surface(&s).passed();
            let cover = cover.map(|a| characteristic_cover_stats(&s, a)).transpose()?;
            let mut text = format!(
                "{} n = {}: rank {}, genus {}, {} singularities, lambda = {:.12}\n",
                s.family, s.n, s.rank, s.genus, s.nu, s.lambda
            );
            if let Some(c) = &cover {
                let _ = writeln!(text, "cover a = {}: degree {}, genus {}", c.a, c.degree, c.genus);
            }
            let cover_json = cover.map(|c| {
                json!({
                    "a": c.a,
                    "degree": big(c.degree),
                    "genus": big(c.genus),
                    "singularity_orders": c.singularity_orders.iter()
                        .map(|(o, m)| json!([o, big(*m)]))
                        .collect::<Vec<_>>(),
                })
            });
            Output::new(
                json!({
                    "family": s.family,
                    "n": s.n,
                    "rank": s.rank,
                    "genus": s.genus,
                    "nu": s.nu,
                    "lambda": s.lambda,
                    "singularity_orders": s.singularity_orders,
                    "valid": valid,
                    "cover": cover_json,
                }),
                text,
            )
        }
        Command::Homology(HomologyCmd::Matrices { surface, modulus }) => {
            let f = family(&surface.family)?;
            let rep = rep_for(f, surface.n)?;
            let (t, r) = match modulus {
                Some(a) => {
                    let [t, r] = rep.generators_mod(*a)?;
                    (t.to_rows(), r.to_rows())
                }
                None => (rep.t().to_rows(), rep.rot().to_rows()),
            };
            let rot = if f == Family::DoubleNGon { "R" } else { "S" };
            let text = format!("T:\n{}{rot}:\n{}", grid(&t), grid(&r));
            Output::new(
                json!({"family": f, "n": surface.n, "mod": modulus, "T": t, rot: r}),
                text,
            )
        }
        Command::Star(StarCmd::Decide { n, modulus, witness }) => {
            let d = star_decide(*n, *modulus)?;
            let mut v = json!({"n": d.n, "a": d.a, "holds": d.holds});
            if *witness {
                if let Some(z) = &d.witness {
                    v["z"] = json!(z);
                }
            }
            let text = format!(
                "property (★) for n = {}, a = {}: {}\n",
                d.n,
                d.a,
                if d.holds { "holds" } else { "fails" }
            );
            Output::new(v, text)
        }
        Command::Star(StarCmd::Table { n, mod_range }) => {
            let (lo, hi) = parse_range(mod_range)?;
            let mut rows = Vec::new();
            let mut text = format!("{:>4}  holds\n", "a");
            for a in lo.max(2)..=hi {
                let d = star_decide(*n, a)?;
                let _ = writeln!(text, "{a:>4}  {}", if d.holds { "yes" } else { "no" });
                rows.push(json!({"a": a, "holds": d.holds}));
            }
            Output::new(json!({"n": n, "decisions": rows}), text)
        }
        Command::Congruence(CongruenceCmd::Order { surface, modulus }) => {
            let f = family(&surface.family)?;
            let q = image_group(&rep_for(f, surface.n)?, *modulus, cap)?;
            let text = format!("|Q_{}| = {}\n", modulus, q.len());
            Output::new(
                json!({"family": f, "n": surface.n, "a": modulus, "order": q.len()}),
                text,
            )
        }
        Command::Congruence(CongruenceCmd::Test { graph, modulus }) => {
            let g = load_graph(graph)?;
            let d = is_congruence_of_level(&rep_for(g.family, g.n)?, &g, *modulus, cap)?;
            let text = format!(
                "{} a congruence group of level {}\n",
                if d.is_congruence { "is" } else { "not" },
                modulus
            );
            Output::new(
                json!({
                    "a": modulus,
                    "is_congruence": d.is_congruence,
                    "orbit_size": d.orbit_size,
                    "group_order": d.group_order,
                }),
                text,
            )
        }
        Command::Congruence(CongruenceCmd::GammaB { partition, family: f, out }) => {
            let p = PointPartition::from_json(&read(partition)?)?;
            let f = family(f)?;
            let rep = rep_for(f, p.dim + 1)?;
            let gb = gamma_b_action(&rep, &p, cap)?;
            let graph_text = gb.coset_graph.to_text();
            if let Some(path) = out {
                write(path, &graph_text)?;
            }
            let words: Vec<String> = gb.stabilizer_words.iter().map(|w| w.to_string()).collect();
            let text = format!("index {}\n{}", gb.index, graph_text);
            Output::new(
                json!({"index": gb.index, "stabilizer_words": words, "graph": graph_text}),
                text,
            )
        }
        Command::Wohlfahrt(WohlfahrtCmd::Level { graph }) => {
            let g = load_graph(graph)?;
            let level = wohlfahrt_level(&g)?;
            Output::new(
                json!({"cosets": g.degree(), "level": level, "widths": g.t_widths()}),
                format!("level {level}\n"),
            )
        }
        Command::Wohlfahrt(WohlfahrtCmd::Certify { graph }) => {
            let g = load_graph(graph)?;
            let level = wohlfahrt_level(&g)?;
            let cert = noncongruence_certificate(&g)?;
            let text = match &cert {
                Some(c) => format!(
                    "level {level} = {}·{}: cosets {} and {} with widths {:?} and {:?}\n",
                    c.split.0, c.split.1, c.coset_a, c.coset_b, c.widths_a, c.widths_b
                ),
                None => format!("level {level}: no certificate\n"),
            };
            Output::new(json!({"level": level, "certificate": cert}), text)
        }
        Command::Wohlfahrt(WohlfahrtCmd::MinimalLevels { graph, bound }) => {
            let g = load_graph(graph)?;
            let r = minimal_congruence_levels(&rep_for(g.family, g.n)?, &g, *bound, cap)?;
            let mut text = format!("Wohlfahrt level {}\n", r.wohlfahrt_level);
            for t in &r.tested {
                let _ = writeln!(
                    text,
                    "{:>6}  {}{}",
                    t.level,
                    if t.congruence { "congruence" } else { "no" },
                    if t.implied { " (implied)" } else { "" }
                );
            }
            Output::new(&r, text)
        }
        Command::Cosets(CosetsCmd::Enumerate { family: f, n, gens, cap: max_cosets, out }) => {
            let f = family(f)?;
            let words = parse_word_list(gens)?;
            let g = todd_coxeter(f, *n, &words, *max_cosets)?;
            let text = g.to_text();
            if let Some(path) = out {
                write(path, &text)?;
            }
            Output::new(json!({"cosets": g.degree(), "graph": text}), text)
        }
        Command::Cosets(CosetsCmd::Canonicalize { graph, out }) => {
            let g = canonical_form(&load_graph(graph)?)?;
            let text = g.to_text();
            if let Some(path) = out {
                write(path, &text)?;
            }
            Output::new(json!({"cosets": g.degree(), "graph": text}), text)
        }
        Command::Verify { scope } => {
            let scope: Scope = scope.parse()?;
            let r = run_verification_suite(scope, cap)?;
            let mut text = String::new();
            for c in &r.checks {
                let _ = writeln!(
                    text,
                    "{} {} (expected {}, got {})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.expected,
                    c.actual
                );
            }
            let mut out = Output::new(&r, text)?;
            out.failed = !r.passed;
            Ok(out)
        }
    }
}

/// Numbers above `u64::MAX` do not fit a JSON number without extra serde
/// features; those are emitted as strings.
fn big(x: u128) -> serde_json::Value {
    match u64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.pretty {
                print!("{}", out.text);
            } else {
                println!("{}", out.json);
            }
            if out.failed {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
