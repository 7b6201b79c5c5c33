//! Command-line front end.

mod manifest;

pub use manifest::{digest_file, manifest_path, FileDigest, RunManifest};

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{ray_at, single_letter_threshold, PauliParams, RayDirection, DEFAULT_EPS};
use crate::directci::{dense_oracle_ci, direct_ci};
use crate::error::{Error, Result};
use crate::graphs::{cat_graph, repetition_graph, shor_graph, tree_graph, CodeGraph};
use crate::scan;
use crate::stabilizer::{parse_stabilizers, to_graph_state};
use crate::symci::{evaluate_ci, load_spectrum, spectrum_to_json, symmetric_lambda_with, BuildOptions, CISpectrum};

#[derive(Debug, Parser)]
#[command(name = "gsci", version, about = "Coherent information and thresholds of graph-state codes")]
pub struct Cli {
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomly drawn channel points.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a graph of a named code family.
    Family(FamilyArgs),
    /// Convert stabilizer generators of a purified code state to a graph.
    Convert(ConvertArgs),
    /// Coherent information per system qubit at a channel point.
    Ci(CiArgs),
    /// Threshold along a ray.
    Threshold(ThresholdArgs),
    /// Thresholds over a spherical grid of ray directions.
    Surface(SurfaceArgs),
    /// Exhaustive search over small codes.
    Search(SearchArgs),
    /// Best rate minus hashing bound on a plane through the simplex.
    Rates(RatesArgs),
    /// Build or inspect a cached spectrum.
    #[command(subcommand)]
    Spectrum(SpectrumCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    Rep,
    Cat,
    Tree,
    Shor,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    /// Leaf counts of the branches, e.g. "2,2,2".
    #[arg(long)]
    pub branches: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub stabilizers: PathBuf,
    /// System qubits; the remaining (last) qubits purify the code.
    #[arg(long)]
    pub ksys: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Spectrum cache written by `spectrum dump`.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Engine {
    Direct,
    Symmetric,
    Dense,
}

#[derive(Debug, Args)]
pub struct CiArgs {
    #[command(flatten)]
    pub source: Source,
    /// Channel point "p0,p1,p2,p3".
    #[arg(long, conflicts_with_all = ["direction", "random"])]
    pub p: Option<PauliParams>,
    /// Ray direction "d1,d2,d3", used with --x.
    #[arg(long, requires = "x")]
    pub direction: Option<RayDirection>,
    #[arg(long, requires = "direction")]
    pub x: Option<f64>,
    /// Evaluate at this many seeded random channel points, as CSV.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, value_enum, default_value_t = Engine::Symmetric)]
    pub engine: Engine,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value = "1,1,1")]
    pub direction: String,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 33)]
    pub resolution: usize,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub ksys: usize,
    #[arg(long, default_value_t = 1)]
    pub kenv_max: usize,
    #[arg(long, default_value = "1,1,1")]
    pub direction: String,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// Directory of graph JSON files.
    #[arg(long)]
    pub graphs: PathBuf,
    #[arg(long)]
    pub f: f64,
    #[arg(long, default_value_t = 65)]
    pub res: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SpectrumCommand {
    /// Build the spectrum of a graph and write it as JSON.
    Dump {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Load a spectrum file and summarize it.
    Info {
        #[arg(long)]
        spectrum: PathBuf,
    },
}

/// Direction from "d1,d2,d3", normalized onto the simplex.
fn parse_direction(s: &str) -> Result<RayDirection> {
    if let Ok(d) = s.parse::<RayDirection>() {
        return Ok(d);
    }
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::domain(format!("bad direction component {t:?}"))))
        .collect::<Result<_>>()?;
    if v.len() != 3 || v.iter().any(|&x| x < 0.0) {
        return Err(Error::domain(format!("direction needs three nonnegative components, got {s:?}")));
    }
    RayDirection::normalized([v[0], v[1], v[2]])
}

fn parse_branches(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::domain(format!("bad branch count {t:?}"))))
        .collect()
}

fn need(v: Option<usize>, flag: &str) -> Result<usize> {
    v.ok_or_else(|| Error::domain(format!("--{flag} is required for this family")))
}

struct Run {
    subcommand: String,
    args: Vec<String>,
    inputs: Vec<PathBuf>,
    started: Instant,
}

impl Run {
    /// Writes `bytes` to `out` with a manifest, or to stdout.
    fn emit(&self, out: Option<&Path>, bytes: &[u8]) -> Result<()> {
        match out {
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(bytes)
                    .and_then(|_| stdout.flush())
                    .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })
            }
            Some(path) => {
                fs::write(path, bytes).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
                let manifest = RunManifest {
                    subcommand: self.subcommand.clone(),
                    args: self.args.clone(),
                    inputs: self.inputs.iter().map(|p| digest_file(p)).collect::<Result<_>>()?,
                    outputs: vec![digest_file(path)?],
                    version: env!("CARGO_PKG_VERSION").to_string(),
                    wall_clock_seconds: self.started.elapsed().as_secs_f64(),
                };
                manifest.write(path)?;
                eprintln!("wrote {}", path.display());
                Ok(())
            }
        }
    }
}

fn build(g: &CodeGraph) -> Result<CISpectrum> {
    let (s, stats) = symmetric_lambda_with(g, &BuildOptions::default())?;
    eprintln!(
        "spectrum: |G| = {}, {} colorings, {} + {} orbits, {} monomials, {:.2}s",
        stats.group_order, stats.colorings, stats.rb_orbits, stats.b_orbits, stats.monomials, stats.seconds
    );
    Ok(s)
}

fn spectrum_of(source: &Source, run: &mut Run) -> Result<CISpectrum> {
    match (&source.graph, &source.spectrum) {
        (Some(g), _) => {
            run.inputs.push(g.clone());
            build(&CodeGraph::load(g)?)
        }
        (None, Some(s)) => {
            run.inputs.push(s.clone());
            load_spectrum(s)
        }
        (None, None) => Err(Error::domain("one of --graph or --spectrum is required")),
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> Result<PauliParams> {
    let w: [f64; 4] = std::array::from_fn(|_| -(1.0 - rng.gen::<f64>()).ln());
    let s: f64 = w.iter().sum();
    PauliParams::new(w[0] / s, w[1] / s, w[2] / s, 1.0 - (w[0] + w[1] + w[2]) / s)
}

fn run_ci(a: &CiArgs, seed: u64, run: &mut Run) -> Result<()> {
    let points: Vec<PauliParams> = match (a.p, &a.direction, a.x, a.random) {
        (Some(p), ..) => vec![p],
        (None, Some(d), Some(x), _) => vec![ray_at(d, x)?],
        (None, _, _, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| random_point(&mut rng)).collect::<Result<_>>()?
        }
        _ => return Err(Error::domain("give --p, --direction with --x, or --random")),
    };
    let eval: Box<dyn Fn(&PauliParams) -> Result<f64>> = match a.engine {
        Engine::Symmetric => {
            let s = spectrum_of(&a.source, run)?;
            Box::new(move |p| Ok(evaluate_ci(&s, p)))
        }
        engine => {
            let path = a
                .source
                .graph
                .as_ref()
                .ok_or_else(|| Error::domain("the direct and dense engines need --graph"))?;
            run.inputs.push(path.clone());
            let g = CodeGraph::load(path)?;
            if engine == Engine::Direct {
                Box::new(move |p| direct_ci(&g, p))
            } else {
                Box::new(move |p| dense_oracle_ci(&g, p))
            }
        }
    };
    let mut text = String::new();
    if a.random.is_some() {
        text.push_str("p0,p1,p2,p3,ci\n");
        for p in &points {
            text.push_str(&format!("{p},{}\n", eval(p)?));
        }
    } else {
        text = format!("{}\n", eval(&points[0])?);
    }
    run.emit(None, text.as_bytes())
}

fn run_family(a: &FamilyArgs, run: &Run) -> Result<()> {
    let g = match a.kind {
        Kind::Rep => repetition_graph(need(a.n, "n")?)?,
        Kind::Cat => cat_graph(need(a.n1, "n1")?, need(a.n2, "n2")?)?,
        Kind::Tree => tree_graph(&parse_branches(
            a.branches.as_deref().ok_or_else(|| Error::domain("--branches is required for trees"))?,
        )?)?,
        Kind::Shor => shor_graph(),
    };
    eprintln!("{} vertices, k_sys = {}, {} edges", g.n(), g.k_sys(), g.edge_count());
    run.emit(a.out.as_deref(), g.to_json().as_bytes())
}

fn run_convert(a: &ConvertArgs, run: &mut Run) -> Result<()> {
    let text = fs::read_to_string(&a.stabilizers)
        .map_err(|source| Error::Io { path: a.stabilizers.clone(), source })?;
    run.inputs.push(a.stabilizers.clone());
    let lines: Vec<&str> = text.lines().collect();
    let m = parse_stabilizers(&lines)?;
    let form = to_graph_state(&m)?;
    let k = a.ksys.unwrap_or(m.n().saturating_sub(1));
    let g = CodeGraph::from_adjacency(k, form.adjacency_original_order())?;
    eprintln!(
        "{} qubits, k_sys = {k}; Hadamard on {:?}, phase on {:?} (relabeled qubits)",
        g.n(),
        form.ops.hadamard,
        form.ops.phase
    );
    run.emit(a.out.as_deref(), g.to_json().as_bytes())
}

fn run_threshold(a: &ThresholdArgs, run: &mut Run) -> Result<()> {
    let d = parse_direction(&a.direction)?;
    let s = spectrum_of(&a.source, run)?;
    let t = scan::threshold(&s, &d, a.eps)?;
    let single = single_letter_threshold(&d);
    match t {
        Some(t) => eprintln!("threshold {t} along {d}; single-letter {single}, delta {:e}", t - single),
        None => eprintln!("no positive coherent information along {d}"),
    }
    let line = t.map_or_else(|| "none".to_string(), |t| t.to_string());
    run.emit(None, format!("{line}\n").as_bytes())
}

fn run_surface(a: &SurfaceArgs, run: &mut Run) -> Result<()> {
    let s = spectrum_of(&a.source, run)?;
    let rows = scan::surface(&s, a.resolution, a.eps)?;
    let positive = rows.iter().filter(|r| r.delta.is_some_and(|d| d > 0.0)).count();
    eprintln!("{} rays, {positive} above the single-letter threshold", rows.len());
    let mut buf = Vec::new();
    scan::write_surface_csv(&rows, &mut buf).expect("writing to memory");
    run.emit(a.out.as_deref(), &buf)
}

fn run_search(a: &SearchArgs, run: &Run) -> Result<()> {
    let d = parse_direction(&a.direction)?;
    let records = scan::exhaustive_search(a.ksys, a.kenv_max, &d, a.eps)?;
    for r in records.iter().filter(|r| r.is_best) {
        eprintln!("best: {} threshold {:?}", r.canon_key, r.threshold);
    }
    eprintln!("{} codes", records.len());
    let mut buf = Vec::new();
    scan::write_search_csv(&records, &mut buf).expect("writing to memory");
    run.emit(a.out.as_deref(), &buf)
}

fn run_rates(a: &RatesArgs, run: &mut Run) -> Result<()> {
    let mut files: Vec<PathBuf> = fs::read_dir(&a.graphs)
        .map_err(|source| Error::Io { path: a.graphs.clone(), source })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut names = Vec::new();
    let mut spectra = Vec::new();
    for f in &files {
        let g = CodeGraph::load(f)?;
        run.inputs.push(f.clone());
        names.push(f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
        spectra.push(build(&g)?);
    }
    let nodes = scan::rate_planes(&spectra, a.f, a.res)?;
    let best = nodes.iter().filter_map(|n| n.best).map(|b| b.1).fold(f64::NEG_INFINITY, f64::max);
    eprintln!("{} codes, largest advantage {best:e}", spectra.len());
    let mut buf = Vec::new();
    scan::write_rates_csv(&nodes, &names, &mut buf).expect("writing to memory");
    run.emit(a.out.as_deref(), &buf)
}

fn run_spectrum(c: &SpectrumCommand, run: &mut Run) -> Result<()> {
    match c {
        SpectrumCommand::Dump { graph, out } => {
            run.inputs.push(graph.clone());
            let s = build(&CodeGraph::load(graph)?)?;
            run.emit(out.as_deref(), spectrum_to_json(&s).as_bytes())
        }
        SpectrumCommand::Info { spectrum } => {
            let s = load_spectrum(spectrum)?;
            let noiseless = evaluate_ci(&s, &PauliParams::noiseless());
            let text = format!(
                "k_sys {}\nk_env {}\nrb_terms {}\nb_terms {}\nmonomials {}\nci_noiseless {noiseless}\n",
                s.k_sys,
                s.k_env,
                s.rb.len(),
                s.b.len(),
                s.term_count()
            );
            run.emit(None, text.as_bytes())
        }
    }
}

fn execute(cli: &Cli, run: &mut Run) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::resource(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Family(a) => run_family(a, run),
        Command::Convert(a) => run_convert(a, run),
        Command::Ci(a) => run_ci(a, cli.seed, run),
        Command::Threshold(a) => run_threshold(a, run),
        Command::Surface(a) => run_surface(a, run),
        Command::Search(a) => run_search(a, run),
        Command::Rates(a) => run_rates(a, run),
        Command::Spectrum(c) => run_spectrum(c, run),
    }
}

/// Parses `argv` and runs the subcommand; returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut run = Run {
        subcommand: argv.get(1).map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        args: argv.iter().skip(1).map(|s| s.to_string_lossy().into_owned()).collect(),
        inputs: Vec::new(),
        started: Instant::now(),
    };
    match execute(&cli, &mut run) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
