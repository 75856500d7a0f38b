use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use spanbiset::biset::Biset;
use spanbiset::composite::Composite;
use spanbiset::functor::Functor;
use spanbiset::group::FiniteGroup;
use spanbiset::groupoid::{Groupoid, GroupoidRef};
use spanbiset::gset::{gspan_hom_basis, yoshida_matrix, yoshida_rank_check, GSet};
use spanbiset::iso_comma::IsoComma;
use spanbiset::linear::biset_hom_basis;
use spanbiset::pool::{parse_group, parse_window_object, Config, DEFAULT_POOL};
use spanbiset::realization::{realize_span, span_from_biset};
use spanbiset::report::Report;
use spanbiset::serial::{to_json, Workspace, Writer};
use spanbiset::span::{compose_spans, Span};
use spanbiset::suites::{run_suite_with, SUITES};
use spanbiset::{Rational, ScalarMode};

#[derive(Parser)]
#[command(name = "spanbiset", version, about = "Spans and bisets of finite groupoids, and the realization between them")]
struct Cli {
    /// Configuration file for `verify`.
    #[arg(long, global = true, env = spanbiset::pool::CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the result as JSON to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Compose two spans, `first ∘ second`.
    ComposeSpans { first: PathBuf, second: PathBuf },
    /// Compose two bisets, `first ∘ second`.
    ComposeBisets { first: PathBuf, second: PathBuf },
    /// Realize a span as a biset.
    Realize { span: PathBuf },
    /// The span of elements of a biset, with the round-trip check.
    SpanFromBiset { biset: PathBuf },
    /// Iso-comma square of a cospan given as two functors.
    IsoComma {
        file: PathBuf,
        /// Functor `a: A → C` (default: first functor in the file).
        #[arg(long)]
        a: Option<String>,
        /// Functor `b: B → C` (default: second functor in the file).
        #[arg(long)]
        b: Option<String>,
    },
    /// Yoshida matrices of the transitive spans `G/H → G/K`.
    YoshidaMatrix {
        group: String,
        /// Generators of `H` as element indices, e.g. `1,2`; empty for the
        /// trivial subgroup.
        #[arg(long, default_value = "")]
        h: String,
        /// Generators of `K`.
        #[arg(long, default_value = "")]
        k: String,
    },
    /// Summarize a groupoid name or the contents of a file.
    Describe {
        target: String,
        /// Instead list the transitive bisets from `target` to this
        /// groupoid; bare group names such as `C2` mean `BC2`.
        #[arg(long)]
        biset_basis: Option<String>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
    suite: String,
    /// Comma-separated pool groupoids, e.g. `1,BC2,BC2+1`, or `default`.
    #[arg(long, value_delimiter = ',')]
    pool: Option<Vec<String>>,
    /// Comma-separated window objects for the deflative kernel.
    #[arg(long, value_delimiter = ',')]
    window: Option<Vec<String>>,
    #[arg(long)]
    apex_bound: Option<usize>,
    #[arg(long)]
    scalars: Option<ScalarMode>,
    #[arg(long)]
    seed: Option<u64>,
    /// Restrict group suites to one group.
    #[arg(long)]
    group: Option<String>,
    /// Extra groupoid definitions usable in `--pool` and `--window`.
    #[arg(long)]
    groupoids: Option<PathBuf>,
}

/// A failed verification, as opposed to bad input.
struct MathFailure;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(anyhow!(e)),
        },
        None => run(&cli),
    };
    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(MathFailure)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

type Outcome = anyhow::Result<Result<(), MathFailure>>;

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Verify(args) => verify(cli, args),
        Command::ComposeSpans { first, second } => {
            let (_, s1) = load_span(first)?;
            let (_, s2) = load_span(second)?;
            let c = compose_spans(&s1, &s2)?.span;
            println!("composite: {}", describe_span(&c));
            let mut w = Writer::new();
            w.span("composite", &c);
            write_out(cli, w)?;
            Ok(Ok(()))
        }
        Command::ComposeBisets { first, second } => {
            let (_, u1) = load_biset(first)?;
            let (_, u2) = load_biset(second)?;
            let c = Composite::new(vec![u1, u2])?;
            println!("composite: {}", describe_biset(c.biset()));
            let mut w = Writer::new();
            w.biset("composite", c.biset());
            write_out(cli, w)?;
            Ok(Ok(()))
        }
        Command::Realize { span } => {
            let (name, s) = load_span(span)?;
            let r = realize_span(&s)?;
            println!("R({name}): {}", describe_biset(r.biset()));
            let mut w = Writer::new();
            w.biset(&format!("R({name})"), r.biset());
            write_out(cli, w)?;
            Ok(Ok(()))
        }
        Command::SpanFromBiset { biset } => {
            let (name, u) = load_biset(biset)?;
            let es = span_from_biset(&u)?;
            println!("S({name}): {}", describe_span(es.span()));
            let valid = es.evaluation.check(es.realization.biset(), &u).is_ok();
            let ok = valid && es.is_bijective(&u);
            println!("round trip R(S({name})) -> {name}: {}", if ok { "bijective" } else { "NOT bijective" });
            let mut w = Writer::new();
            w.span(&format!("S({name})"), es.span());
            w.result("round_trip_bijective", json!(ok));
            write_out(cli, w)?;
            Ok(if ok { Ok(()) } else { Err(MathFailure) })
        }
        Command::IsoComma { file, a, b } => {
            let ws = Workspace::load(file)?;
            let pick = |name: &Option<String>, k: usize| -> anyhow::Result<Functor> {
                match name {
                    Some(n) => ws.functors.get(n).cloned().ok_or_else(|| anyhow!("no functor '{n}' in {}", file.display())),
                    None => ws.functors.values().nth(k).cloned().ok_or_else(|| anyhow!("{} needs two functors", file.display())),
                }
            };
            let (fa, fb) = (pick(a, 0)?, pick(b, 1)?);
            let comma = IsoComma::new(&fa, &fb)?;
            println!("apex: {}", comma.apex.summary());
            println!("p: {}", describe_functor(&comma.p));
            println!("q: {}", describe_functor(&comma.q));
            let mut w = Writer::new();
            w.span("comma", &Span::new(comma.p.clone(), comma.q.clone())?);
            write_out(cli, w)?;
            Ok(Ok(()))
        }
        Command::YoshidaMatrix { group, h, k } => yoshida_command(cli, group, h, k),
        Command::Describe { target, biset_basis } => describe(target, biset_basis.as_deref()),
    }
}

fn verify(cli: &Cli, args: &VerifyArgs) -> Outcome {
    let mut config = match &cli.config {
        Some(path) => Config::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => Config::default(),
    };
    if let Some(p) = &args.pool {
        config.pool = match p.as_slice() {
            [one] if one == "default" => DEFAULT_POOL.iter().map(|s| s.to_string()).collect(),
            _ => p.clone(),
        };
    }
    if let Some(w) = &args.window {
        config.window = w.clone();
    }
    if let Some(b) = args.apex_bound {
        config.apex_bound = b;
    }
    if let Some(s) = args.scalars {
        config.scalars = s;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(g) = &args.group {
        config.groups = vec![g.clone()];
        config.mackey_groups = vec![g.clone()];
    }
    let named: BTreeMap<String, GroupoidRef> = match &args.groupoids {
        Some(path) => Workspace::load(path)?.groupoids,
        None => BTreeMap::new(),
    };
    let report = run_suite_with(&args.suite, &config, &named)?;
    print!("{report}");
    if let Some(path) = &cli.out {
        std::fs::write(path, to_json(&report)?)?;
        let back: Report = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if back != report {
            bail!("report written to {} does not reload", path.display());
        }
    }
    Ok(if report.passed() { Ok(()) } else { Err(MathFailure) })
}

/// Writes the document if asked, then reloads and revalidates it.
fn write_out(cli: &Cli, w: Writer) -> anyhow::Result<()> {
    if let Some(path) = &cli.out {
        let text = to_json(&w.finish())?;
        std::fs::write(path, &text)?;
        Workspace::load(path).with_context(|| format!("revalidating {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn load_span(path: &Path) -> anyhow::Result<(String, Span)> {
    let ws = Workspace::load(path).with_context(|| format!("loading {}", path.display()))?;
    let (name, s) = ws.only_span()?;
    Ok((name.to_string(), s.clone()))
}

fn load_biset(path: &Path) -> anyhow::Result<(String, Arc<Biset>)> {
    let ws = Workspace::load(path).with_context(|| format!("loading {}", path.display()))?;
    let (name, u) = ws.only_biset()?;
    Ok((name.to_string(), u.clone()))
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

fn describe_functor(f: &Functor) -> String {
    format!(
        "{} -> {}, object map {:?}",
        plural(f.source().num_objects(), "object"),
        plural(f.target().num_objects(), "object"),
        f.object_map()
    )
}

fn describe_span(s: &Span) -> String {
    format!(
        "apex {}; left leg {}; right leg {}",
        s.left.source().summary(),
        describe_functor(&s.left),
        describe_functor(&s.right)
    )
}

fn describe_biset(u: &Biset) -> String {
    let orbits = u.orbits();
    let sizes: Vec<String> = orbits.iter().map(|o| o.len().to_string()).collect();
    format!(
        "{} in {} (sizes {}), from {} to {}",
        plural(u.len(), "element"),
        plural(orbits.len(), "orbit"),
        sizes.join(","),
        u.source().summary(),
        u.target().summary()
    )
}

fn describe(target: &str, biset_basis: Option<&str>) -> Outcome {
    let path = Path::new(target);
    if let Some(other) = biset_basis {
        let none = BTreeMap::new();
        let (h, g) = (parse_window_object(target, &none)?, parse_window_object(other, &none)?);
        let basis = biset_hom_basis(&h, &g)?;
        println!("{} transitive bisets {target} -> {other}", basis.elements.len());
        for label in &basis.labels {
            println!("  {label}");
        }
        return Ok(Ok(()));
    }
    if !path.exists() {
        let g = Workspace::default().groupoid(target)?;
        println!("{target}: {}", describe_groupoid(&g));
        return Ok(Ok(()));
    }
    let ws = Workspace::load(path)?;
    for (name, g) in &ws.groupoids {
        println!("groupoid {name}: {}", describe_groupoid(g));
    }
    for (name, f) in &ws.functors {
        println!("functor {name}: {}", describe_functor(f));
    }
    for (name, s) in &ws.spans {
        println!("span {name}: {}", describe_span(s));
    }
    for (name, u) in &ws.bisets {
        println!("biset {name}: {}", describe_biset(u));
    }
    Ok(Ok(()))
}

fn describe_groupoid(g: &Groupoid) -> String {
    let orders: Vec<String> = g.vertex_orders().iter().map(|o| o.to_string()).collect();
    if orders.is_empty() {
        g.summary()
    } else {
        format!("{} (vertex group orders {})", g.summary(), orders.join(","))
    }
}

fn subgroup(g: &FiniteGroup, gens: &str) -> anyhow::Result<Vec<usize>> {
    let gens = gens
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| anyhow!("bad element '{s}'")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    if let Some(&bad) = gens.iter().find(|&&x| x >= g.order()) {
        bail!("element {bad} out of range for a group of order {}", g.order());
    }
    Ok(g.generate(&gens))
}

fn yoshida_command(cli: &Cli, group: &str, h: &str, k: &str) -> Outcome {
    let g = Arc::new(parse_group(group)?);
    let (hs, ks) = (subgroup(&g, h)?, subgroup(&g, k)?);
    let (x, y) = (GSet::cosets(&g, &hs)?, GSet::cosets(&g, &ks)?);
    let basis = gspan_hom_basis(&x, &y)?;
    let mut matrices = Vec::new();
    for (i, s) in basis.elements.iter().enumerate() {
        let m = yoshida_matrix::<Rational>(s);
        println!("span #{i} (apex {} elements):", s.apex.len());
        print!("{m}");
        let rows: Vec<Vec<String>> = (0..m.rows()).map(|r| m.row(r).iter().map(|v| v.to_string()).collect()).collect();
        matrices.push(rows);
    }
    let rank = yoshida_rank_check::<Rational>(&g, &hs, &ks)?;
    println!(
        "rank {}, double cosets {}, equivariant hom dimension {}",
        rank.rank, rank.double_cosets, rank.hom_dim
    );
    if let Some(path) = &cli.out {
        let doc = json!({
            "group": group,
            "h": hs,
            "k": ks,
            "matrices": matrices,
            "rank": rank.rank,
            "double_cosets": rank.double_cosets,
            "hom_dim": rank.hom_dim,
        });
        std::fs::write(path, to_json(&doc)?)?;
        println!("wrote {}", path.display());
    }
    Ok(if rank.holds() { Ok(()) } else { Err(MathFailure) })
}
