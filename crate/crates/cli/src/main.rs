use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use lochness_core::archimedean_cert::{
    certify_identifications_363636, euler_contradiction_check, loch_ness_certify, LochNessOptions, Verdict,
    CERTIFICATE_RADII,
};
use lochness_core::ends::{
    ball_to_dot, cover_dual_graph, ends_probe, flag_graph_of_periodic, hyperbolic_flag_graph, one_end_certificate,
    product_graph, EndsProbeResult, Grid2, HexCayleyH, LineGraph, Tree, DEFAULT_MAX_NODES,
    DEFAULT_SCHEDULE, GRAPH_NAMES,
};
use lochness_core::flag_system::FlagSystem;
use lochness_core::minimal_cover::{finite_cover, CoverPatch, PatchRow, DEFAULT_MAX_ELEMENTS, DEFAULT_RADII};
use lochness_core::monodromy::{mon_order, Monodromy};
use lochness_core::periodic_map::PeriodicMap;
use lochness_core::word::parse_word;

mod exit {
    pub const FAIL: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const CAP: u8 = 3;
}

const CSV_HELP: &str = "\
CSV schemas:
  cover patch --stats   r,elements,chi,boundary,genus
                        genus is an integer, or N<c> for a non-orientable
                        patch with c crosscaps
  ends probe --csv      r,R,components,ball_size
  ends certify          r,R,components,ball_size

Exit status: 0 pass, 1 fail verdict, 2 usage or input error, 3 resource cap.";

#[derive(Parser, Debug)]
#[command(name = "lochness", version, about = "Flag systems, monodromy and minimal regular covers of planar tilings", after_help = CSV_HELP)]
struct Cli {
    /// Cap on monodromy elements held by covers and patches.
    #[arg(long, global = true, env = "LOCHNESS_MAX_ELEMENTS", default_value_t = DEFAULT_MAX_ELEMENTS)]
    max_elements: usize,

    /// Cap on graph nodes held by ends probes.
    #[arg(long, global = true, env = "LOCHNESS_MAX_NODES", default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a finite flag system as JSON: a named polyhedron or a torus
    /// quotient of a tiling.
    Build(BuildArgs),
    /// Check the flag-system axioms.
    Validate(SourceArgs),
    #[command(subcommand)]
    Mon(MonCommand),
    #[command(subcommand)]
    Cover(CoverCommand),
    #[command(subcommand)]
    Ends(EndsCommand),
    #[command(subcommand)]
    Certify(CertifyCommand),
}

#[derive(Args, Debug)]
struct BuildArgs {
    /// cube, prism or tetrahedron.
    #[arg(long, conflicts_with = "tiling")]
    named: Option<String>,
    #[arg(long)]
    tiling: Option<String>,
    /// Quotient lattice `a b` for --tiling.
    #[arg(long, num_args = 2, value_names = ["A", "B"], default_values_t = [1, 1])]
    torus: Vec<usize>,
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Also write the flag graph in DOT format.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SourceArgs {
    /// Flag system JSON file.
    #[arg(long, conflicts_with = "tiling")]
    map: Option<PathBuf>,
    /// Tiling by vertex configuration, e.g. 3.6.3.6.
    #[arg(long)]
    tiling: Option<String>,
}

#[derive(Subcommand, Debug)]
enum MonCommand {
    /// Permutation of orbits and automorphisms of a word.
    Eval(TilingWord),
    /// Whether a word fixes every flag.
    FixesAll(TilingWord),
    /// Least power of a word acting as pure translations.
    TranslationPower {
        #[command(flatten)]
        tw: TilingWord,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Two commuting translation words with independent vectors.
    Witness {
        #[arg(long)]
        tiling: String,
    },
}

#[derive(Args, Debug)]
struct TilingWord {
    #[arg(long)]
    tiling: String,
    /// Word over 0, 1, 2 with groups `( )^k`.
    #[arg(long)]
    word: String,
}

#[derive(Subcommand, Debug)]
enum CoverCommand {
    /// Minimal regular cover of a finite map.
    Finite {
        #[command(flatten)]
        source: FiniteSource,
        /// Write the cover as JSON.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Ball in the cover of a tiling.
    Patch {
        #[arg(long)]
        tiling: String,
        #[arg(long)]
        radius: u32,
        /// Print the genus table as CSV.
        #[arg(long)]
        stats: bool,
        /// Radii for the table; defaults to 4,6,8,10,12 up to --radius.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<u32>>,
    },
}

#[derive(Args, Debug)]
struct FiniteSource {
    #[arg(long, conflicts_with = "named")]
    map: Option<PathBuf>,
    #[arg(long)]
    named: Option<String>,
}

#[derive(Subcommand, Debug)]
enum EndsCommand {
    /// Components of B_R minus B_r reaching distance R.
    Probe {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long = "r")]
        r: u32,
        #[arg(long = "R")]
        big_r: u32,
        #[arg(long)]
        csv: bool,
        /// Write the ball of radius R in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Probes over a schedule; passes when every probe finds one component.
    Certify {
        #[command(flatten)]
        graph: GraphArgs,
        /// Pairs `r:R`, comma separated.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<String>>,
    },
}

#[derive(Args, Debug)]
struct GraphArgs {
    /// line, grid, tree4, hex, hxh or hyperbolic64.
    #[arg(long, conflicts_with_all = ["tiling", "cover_dual"])]
    graph: Option<String>,
    /// Flag graph of a tiling.
    #[arg(long, conflicts_with = "cover_dual")]
    tiling: Option<String>,
    /// Dual graph of the minimal regular cover of a tiling.
    #[arg(long)]
    cover_dual: Option<String>,
}

#[derive(Subcommand, Debug)]
enum CertifyCommand {
    /// Identification words A and B on 3.6.3.6.
    #[command(name = "363636")]
    Trihexagonal,
    /// Exact Euler characteristic argument.
    Euler,
    /// Hypotheses, branching, ends and genus for a tiling.
    LochNess {
        #[arg(long)]
        tiling: String,
        /// Use vertex degrees and probe the cover dual graph for one end.
        #[arg(long)]
        dual_hypothesis: bool,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<u32>>,
    },
}

fn named_map(name: &str) -> Result<FlagSystem> {
    Ok(match name {
        "cube" => FlagSystem::cube(),
        "prism" => FlagSystem::triangular_prism(),
        "tetrahedron" => FlagSystem::from_polygons(&[vec![0, 1, 2], vec![0, 3, 1], vec![1, 3, 2], vec![2, 3, 0]])?,
        other => bail!("unknown map {:?}; expected cube, prism or tetrahedron", other),
    })
}

fn read_map(path: &Path) -> Result<FlagSystem> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(FlagSystem::from_json(&text)?)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn verdict(pass: bool) -> u8 {
    if pass {
        0
    } else {
        exit::FAIL
    }
}

fn parse_schedule(items: &[String]) -> Result<Vec<(u32, u32)>> {
    let sched = items
        .iter()
        .map(|s| {
            let (a, b) = s.split_once(':').with_context(|| format!("schedule entry {:?} is not r:R", s))?;
            Ok((a.trim().parse()?, b.trim().parse()?))
        })
        .collect::<Result<Vec<(u32, u32)>>>()?;
    if sched.windows(2).any(|w| w[0].0 >= w[1].0 || w[0].1 >= w[1].1) {
        bail!("schedule must be strictly increasing");
    }
    Ok(sched)
}

fn increasing(radii: &[u32]) -> Result<()> {
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        bail!("radii must be strictly increasing");
    }
    Ok(())
}

/// Runs `$body` with `$g` bound to the graph chosen by `GraphArgs`.
macro_rules! with_graph {
    ($args:expr, $layers:expr, |$g:ident| $body:expr) => {{
        let args: &GraphArgs = $args;
        match (&args.graph, &args.tiling, &args.cover_dual) {
            (Some(name), _, _) => match name.as_str() {
                "line" => {
                    let $g = LineGraph;
                    $body
                }
                "grid" => {
                    let $g = Grid2;
                    $body
                }
                "tree4" => {
                    let $g = Tree::new(4)?;
                    $body
                }
                "hex" => {
                    let $g = HexCayleyH;
                    $body
                }
                "hxh" => {
                    let $g = product_graph(HexCayleyH, HexCayleyH);
                    $body
                }
                "hyperbolic64" => {
                    let $g = hyperbolic_flag_graph(6, 4, $layers)?;
                    $body
                }
                other => bail!("unknown graph {:?}; expected one of {}", other, GRAPH_NAMES.join(", ")),
            },
            (None, Some(t), _) => {
                let pm = PeriodicMap::by_name(t)?;
                let $g = flag_graph_of_periodic(&pm);
                $body
            }
            (None, None, Some(t)) => {
                let pm = PeriodicMap::by_name(t)?;
                let mon = Monodromy::new(&pm);
                let $g = cover_dual_graph(&mon);
                $body
            }
            (None, None, None) => bail!("one of --graph, --tiling or --cover-dual is required"),
        }
    }};
}

fn probe_line(p: &EndsProbeResult, csv: bool) -> String {
    if csv {
        format!("{}\n{}\n", EndsProbeResult::HEADER, p)
    } else {
        format!("r={} R={} components={} ball_size={}\n", p.r, p.big_r, p.components, p.ball_size)
    }
}

fn run(cli: Cli) -> Result<u8> {
    let cap = cli.max_elements;
    let nodes = cli.max_nodes;
    match cli.command {
        Command::Build(a) => {
            let fs = match (&a.named, &a.tiling) {
                (Some(n), _) => named_map(n)?,
                (None, Some(t)) => PeriodicMap::by_name(t)?.torus_quotient(a.torus[0], a.torus[1])?,
                (None, None) => bail!("one of --named or --tiling is required"),
            };
            write_out(a.out.as_deref(), &(fs.to_json()? + "\n"))?;
            if let Some(p) = &a.dot {
                write_out(Some(p), &fs.to_dot())?;
            }
            Ok(0)
        }
        Command::Validate(s) => {
            let report = match (&s.map, &s.tiling) {
                (Some(p), _) => read_map(p)?.validate(),
                (None, Some(t)) => PeriodicMap::by_name(t)?.validate(),
                (None, None) => bail!("one of --map or --tiling is required"),
            };
            println!("{}", report);
            Ok(verdict(report.is_pass()))
        }
        Command::Mon(m) => run_mon(m),
        Command::Cover(c) => run_cover(c, cap),
        Command::Ends(e) => run_ends(e, nodes),
        Command::Certify(c) => run_certify(c, cap),
    }
}

fn run_mon(cmd: MonCommand) -> Result<u8> {
    match cmd {
        MonCommand::Eval(tw) => {
            let mon = Monodromy::new(&PeriodicMap::by_name(&tw.tiling)?);
            let g = mon.evaluate_expr(&parse_word(&tw.word)?);
            println!("sigma: {:?}", mon.sigma(&g));
            for (i, a) in mon.alphas(&g).iter().enumerate() {
                println!("alpha[{}]: {} -> {} linear {:?}", i, a.base(), a.image(), a.linear_part());
            }
            println!("identity: {}", mon.is_identity(&g));
            Ok(0)
        }
        MonCommand::FixesAll(tw) => {
            let mon = Monodromy::new(&PeriodicMap::by_name(&tw.tiling)?);
            let fixes = mon.fixes_all_flags(&parse_word(&tw.word)?);
            println!("{}", fixes);
            Ok(verdict(fixes))
        }
        MonCommand::TranslationPower { tw, bound } => {
            let mon = Monodromy::new(&PeriodicMap::by_name(&tw.tiling)?);
            let tp = mon.translation_power(&parse_word(&tw.word)?, bound)?;
            println!("power: {}", tp.power);
            println!("vectors: {:?}", tp.vectors);
            println!("trivial: {}", tp.trivial);
            Ok(0)
        }
        MonCommand::Witness { tiling } => {
            let mon = Monodromy::new(&PeriodicMap::by_name(&tiling)?);
            let kw = mon.kernel_rank_witness()?;
            for i in 0..2 {
                println!("word {}: ({})^{} vectors {:?}", i + 1, kw.words[i], kw.powers[i], kw.vectors[i]);
            }
            println!("commute: {}", kw.commute);
            println!("determinant: {}", kw.determinant());
            Ok(verdict(kw.is_valid()))
        }
    }
}

fn run_cover(cmd: CoverCommand, cap: usize) -> Result<u8> {
    match cmd {
        CoverCommand::Finite { source, out } => {
            let fs = match (&source.map, &source.named) {
                (Some(p), _) => read_map(p)?,
                (None, Some(n)) => named_map(n)?,
                (None, None) => bail!("one of --map or --named is required"),
            };
            let c = finite_cover(&fs, cap)?;
            let (v, e, f) = c.cover.cell_counts();
            println!("flags: {} (|Mon| = {})", c.cover.len(), mon_order(&fs, cap)?);
            println!("V E F: {} {} {}", v, e, f);
            println!("chi: {}", c.cover.euler_characteristic());
            println!("orientable: {}", c.cover.is_orientable());
            if let Some(g) = c.cover.genus() {
                println!("genus: {}", g);
            }
            println!("isomorphic to base: {}", c.cover.is_isomorphic(&fs));
            if let Some(p) = out {
                write_out(Some(&p), &(c.cover.to_json()? + "\n"))?;
            }
            Ok(0)
        }
        CoverCommand::Patch {
            tiling,
            radius,
            stats,
            radii,
        } => {
            let mon = Monodromy::new(&PeriodicMap::by_name(&tiling)?);
            let cp = CoverPatch::build(&mon, radius, cap)?;
            if stats {
                let radii = radii.unwrap_or_else(|| {
                    let mut r: Vec<u32> = DEFAULT_RADII.iter().copied().filter(|&r| r < radius).collect();
                    r.push(radius);
                    r
                });
                increasing(&radii)?;
                if let Some(&r) = radii.iter().find(|&&r| r > radius) {
                    bail!("radius {} exceeds the patch radius {}", r, radius);
                }
                println!("{}", PatchRow::HEADER);
                for row in cp.table(&radii) {
                    println!("{}", row);
                }
            } else {
                let s = cp.stats();
                println!("elements: {}", cp.len());
                println!("V E F: {} {} {}", s.v, s.e, s.f);
                println!("chi: {}", s.chi);
                println!("boundary cycles: {}", s.boundary_cycles);
                match (s.genus, s.nonorientable_genus) {
                    (Some(g), _) => println!("genus: {}", g),
                    (None, Some(c)) => println!("non-orientable genus: {}", c),
                    (None, None) => {}
                }
            }
            Ok(0)
        }
    }
}

fn run_ends(cmd: EndsCommand, cap: usize) -> Result<u8> {
    match cmd {
        EndsCommand::Probe {
            graph,
            r,
            big_r,
            csv,
            dot,
        } => with_graph!(&graph, big_r, |g| {
            let p = ends_probe(&g, r, big_r, cap)?;
            print!("{}", probe_line(&p, csv));
            if let Some(path) = &dot {
                write_out(Some(path), &ball_to_dot(&g, big_r, cap)?)?;
            }
            Ok(0)
        }),
        EndsCommand::Certify { graph, schedule } => {
            let sched = match schedule {
                Some(items) => parse_schedule(&items)?,
                None => DEFAULT_SCHEDULE.to_vec(),
            };
            let layers = sched.iter().map(|s| s.1).max().unwrap_or(0);
            with_graph!(&graph, layers, |g| {
                let report = one_end_certificate(&g, &sched, cap)?;
                println!("{}", EndsProbeResult::HEADER);
                for p in &report.probes {
                    println!("{}", p);
                }
                println!("{}", report.summary());
                Ok(verdict(report.pass))
            })
        }
    }
}

fn run_certify(cmd: CertifyCommand, cap: usize) -> Result<u8> {
    match cmd {
        CertifyCommand::Trihexagonal => {
            let r = certify_identifications_363636(cap)?;
            println!("{}", r);
            Ok(verdict(r.pass()))
        }
        CertifyCommand::Euler => {
            let r = euler_contradiction_check();
            println!("{}", r);
            Ok(verdict(r.pass()))
        }
        CertifyCommand::LochNess {
            tiling,
            dual_hypothesis,
            radii,
        } => {
            let pm = PeriodicMap::by_name(&tiling)?;
            let opts = LochNessOptions {
                radii: radii.unwrap_or_else(|| CERTIFICATE_RADII.to_vec()),
                dual_hypothesis,
                cap,
                ..LochNessOptions::default()
            };
            let r = loch_ness_certify(&pm, &opts)?;
            println!("{}", r);
            if r.cap_exceeded() {
                return Ok(exit::CAP);
            }
            Ok(verdict(r.verdict == Verdict::Consistent))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", e);
            let capped = e
                .downcast_ref::<lochness_core::Error>()
                .is_some_and(|e| matches!(e, lochness_core::Error::CapExceeded { .. }));
            ExitCode::from(if capped { exit::CAP } else { exit::USAGE })
        }
    }
}
