//! `camd`: property estimation, feasibility checks and molecular design from
//! the command line.
//!
//! Exit codes: 0 success, 2 infeasible or a failed check, 3 unreadable or
//! malformed input, 4 internal error, including an oversized search space.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use camd_core::descriptor::DescriptorVector;
use camd_core::feasibility::{
    check_gc_aromatic, check_gc_basic, check_sd_feasibility, check_ti_feasibility, FeasibilityError, SdConstraintData,
};
use camd_core::fixtures;
use camd_core::gc::estimate_gc;
use camd_core::graph::{canonical_label, decompose_into_groups, GroupLibrary, MolecularGraph, RingCounts};
use camd_core::io::{self, IoError, LoadedProblem, RunReport};
use camd_core::sd::{color_graph, estimate_sd, signature_counts, ColoringScheme};
use camd_core::solver::{
    attach_structures, enumerate_feasible_capped, solve, solve_mixture, solve_process, DesignProblem, SolverError,
    SolverKind, DEFAULT_ENUMERATION_CAP,
};
use camd_core::ti::ti_report;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "camd", version, about = "Computer-aided molecular design toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forward property estimates for one molecule.
    Estimate(EstimateArgs),
    /// Structural feasibility checks on counts, signatures or node types.
    Check(CheckArgs),
    /// List every feasible molecule of a problem.
    Enumerate(RunArgs),
    /// Solve a design problem.
    Design(RunArgs),
    /// Solve the binary mixture section of a problem.
    Mixture(RunArgs),
    /// Solve the process section of a problem.
    Process(RunArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// Topological indices of a graph file.
    #[arg(long, value_name = "GRAPH", conflicts_with_all = ["gc", "sd"])]
    ti: Option<PathBuf>,
    /// Group-contribution model file.
    #[arg(long, value_name = "MODEL", conflicts_with = "sd")]
    gc: Option<PathBuf>,
    /// Signature-descriptor model file.
    #[arg(long, value_name = "MODEL")]
    sd: Option<PathBuf>,
    /// Group counts for --gc.
    #[arg(long, value_name = "VECTOR")]
    n: Option<PathBuf>,
    /// Graph for --sd, or for --gc together with --library.
    #[arg(long, value_name = "GRAPH")]
    graph: Option<PathBuf>,
    /// Group library used to decompose --graph.
    #[arg(long, value_name = "LIB")]
    library: Option<PathBuf>,
    /// Coloring scheme for --sd: degree or hybrid.
    #[arg(long, default_value = "degree")]
    scheme: String,
}

#[derive(Args)]
struct CheckArgs {
    /// Group-count vector, signature-count vector, or node-type assignment.
    input: PathBuf,
    /// Check group counts against this library.
    #[arg(long, value_name = "LIB")]
    library: Option<PathBuf>,
    /// Ring parameter: -1 acyclic, 0 monocyclic, 1 bicyclic. All three are tried when absent.
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i32>,
    /// Aromatic and aliphatic ring counts; selects the aromatic group check
    /// with --library, and sets the ring counts for --signatures.
    #[arg(long, num_args = 2, value_names = ["AROMATIC", "ALIPHATIC"])]
    rings: Option<Vec<usize>>,
    /// Input is a node-type assignment.
    #[arg(long, conflicts_with_all = ["library", "signatures"])]
    ti: bool,
    /// Input holds signature counts of this height.
    #[arg(long, value_name = "HEIGHT", conflicts_with = "library")]
    signatures: Option<u32>,
}

#[derive(Args)]
struct RunArgs {
    /// Problem file.
    problem: PathBuf,
    #[arg(long, default_value_t = SolverKind::Bnb)]
    solver: SolverKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rows for enumerate; assembled structures for design.
    #[arg(long, default_value_t = 10)]
    max_results: usize,
}

enum Failure {
    Infeasible(String),
    Parse(String),
    Internal(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Parse(e.to_string())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Infeasible { .. }
            | SolverError::NoFeasibleIndividual
            | SolverError::NoFeasibleStart
            | SolverError::NoCandidates => Failure::Infeasible(e.to_string()),
            SolverError::InvalidProblem(_) | SolverError::InconsistentBounds(_) => Failure::Parse(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<FeasibilityError> for Failure {
    fn from(e: FeasibilityError) -> Self {
        Failure::Parse(e.to_string())
    }
}

/// Reads `path`, falling back to the bundled fixture with the same file name.
fn read_input(path: &Path) -> Result<String, IoError> {
    match io::read_file(path) {
        Ok(t) => Ok(t),
        Err(e) => path.file_name().and_then(|n| fixtures::read(&n.to_string_lossy())).ok_or(e),
    }
}

fn name(path: &Path) -> String {
    path.display().to_string()
}

/// Resolves names beside `path`, then among the bundled fixtures.
fn resolver(path: &Path) -> impl Fn(&str) -> Option<String> {
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    move |n: &str| std::fs::read_to_string(dir.join(n)).ok().or_else(|| fixtures::read(n))
}

fn load_library(path: &Path) -> Result<GroupLibrary, IoError> {
    io::parse_group_library_str(&name(path), &read_input(path)?, &resolver(path))
}

fn load_graph(path: &Path) -> Result<MolecularGraph, IoError> {
    io::parse_graph(&name(path), &read_input(path)?)
}

fn load_vector(path: &Path) -> Result<DescriptorVector, IoError> {
    io::parse_descriptor_vector(&name(path), &read_input(path)?)
}

fn load_problem(path: &Path) -> Result<LoadedProblem, IoError> {
    let spec = io::parse_problem_str(&name(path), &read_input(path)?)?;
    io::load_problem(&spec, &resolver(path))
}

fn estimate(a: &EstimateArgs) -> Result<(), Failure> {
    if let Some(g) = &a.ti {
        print!("{}", ti_report(&load_graph(g)?));
        return Ok(());
    }
    if let Some(model) = &a.gc {
        let model = io::parse_gc_model(&name(model), &read_input(model)?)?;
        let n = match (&a.n, &a.graph, &a.library) {
            (Some(n), None, _) => load_vector(n)?,
            (None, Some(g), Some(lib)) => decompose_into_groups(&load_graph(g)?, &load_library(lib)?)
                .map_err(|e| Failure::Parse(e.to_string()))?,
            _ => return Err(Failure::Parse("--gc needs --n, or --graph with --library".into())),
        };
        let p = estimate_gc(&model, &n).map_err(|e| Failure::Parse(e.to_string()))?;
        println!("n={n}");
        println!("{}={p:.6}", model.property);
        return Ok(());
    }
    if let Some(model) = &a.sd {
        let model = io::parse_sd_model(&name(model), &read_input(model)?)?;
        let g = a.graph.as_ref().ok_or_else(|| Failure::Parse("--sd needs --graph".into()))?;
        let scheme = ColoringScheme::builtin(&a.scheme).map_err(|e| Failure::Parse(e.to_string()))?;
        let cg = color_graph(&load_graph(g)?, &scheme).map_err(|e| Failure::Parse(e.to_string()))?;
        let counts = model.coefficients.keys().map(|(h, _)| (*h, signature_counts(&cg, *h))).collect();
        let p = estimate_sd(&model, &counts).map_err(|e| Failure::Parse(e.to_string()))?;
        println!("{}={p:.6}", model.property);
        return Ok(());
    }
    Err(Failure::Parse("estimate needs one of --ti, --gc, --sd".into()))
}

fn check(a: &CheckArgs) -> Result<(), Failure> {
    let rings = a.rings.as_ref().map(|r| RingCounts::new(r[0], r[1]));
    let ok = if a.ti {
        let t = io::parse_ti_assignment(&name(&a.input), &read_input(&a.input)?)?;
        let r = check_ti_feasibility(&t);
        print!("{r}");
        r.ok()
    } else if let Some(h) = a.signatures {
        let n = load_vector(&a.input)?;
        let data = SdConstraintData::from_counts(h, &n, rings.unwrap_or_default())?;
        let r = check_sd_feasibility(&n, &data)?;
        print!("{r}");
        r.ok()
    } else if let Some(lib) = &a.library {
        let lib = load_library(lib)?;
        let n = load_vector(&a.input)?;
        match rings {
            Some(r) => {
                let r = check_gc_aromatic(&n, &lib, r.aromatic as u32, r.aliphatic as u32)?;
                print!("{r}");
                r.ok()
            }
            None => {
                let ms = a.m.map_or(vec![-1, 0, 1], |m| vec![m]);
                let mut any = false;
                for m in ms {
                    let r = check_gc_basic(&n, &lib, m)?;
                    println!("m={m}");
                    print!("{r}");
                    any |= r.ok();
                }
                any
            }
        }
    } else {
        return Err(Failure::Parse("check needs --library, --signatures or --ti".into()));
    };
    if ok {
        println!("result: pass");
        Ok(())
    } else {
        println!("result: fail");
        Err(Failure::Infeasible("checks failed".into()))
    }
}

fn properties(p: &DesignProblem) -> Vec<String> {
    p.models.iter().map(|m| m.property.clone()).collect()
}

fn run(cmd: &str, a: &RunArgs) -> Result<(), Failure> {
    let loaded = load_problem(&a.problem)?;
    let problem = &loaded.problem;
    let settings = |r: RunReport| r.note("solver", a.solver.to_string()).note("seed", a.seed.to_string());
    match cmd {
        "enumerate" => {
            let cap = DEFAULT_ENUMERATION_CAP;
            let all = enumerate_feasible_capped(problem, cap)?;
            if all.is_empty() {
                return Err(Failure::Infeasible("no feasible molecule".into()));
            }
            let shown: Vec<_> = all.iter().take(a.max_results).cloned().collect();
            let report = RunReport::new(properties(problem), &shown).note("feasible", all.len().to_string());
            print!("{report}");
        }
        "design" => {
            let mut s = solve(problem, a.solver, a.seed)?;
            attach_structures(problem, &mut s, a.max_results);
            let mut report = settings(RunReport::new(properties(problem), std::slice::from_ref(&s)));
            for g in &s.structures {
                report = report.note("structure", canonical_label(g));
            }
            print!("{report}");
        }
        "mixture" => {
            let mp = loaded.mixture.as_ref().ok_or_else(|| Failure::Parse("problem has no [mixture] section".into()))?;
            let s = solve_mixture(mp)?;
            let report = RunReport::new(properties(problem), &s.components)
                .note("x", s.x.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(","))
                .note("q", s.q.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(","))
                .note("mixture_objective", format!("{:.6}", s.objective));
            print!("{report}");
        }
        "process" => {
            let pp = loaded.process.as_ref().ok_or_else(|| Failure::Parse("problem has no [process] section".into()))?;
            let s = solve_process(problem, pp)?;
            let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(",");
            let report = RunReport::new(properties(problem), std::slice::from_ref(&s.solution))
                .note("p_star", fmt(&s.p_star))
                .note("mu_star", fmt(&s.mu_star))
                .note("mu", fmt(&s.mu))
                .note("relaxation_bound", format!("{:.6}", s.relaxation_bound))
                .note("process_objective", format!("{:.6}", s.objective));
            print!("{report}");
        }
        _ => unreachable!("subcommand names are fixed"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    let start = Instant::now();
    let result = match &cli.command {
        Command::Estimate(a) => estimate(a),
        Command::Check(a) => check(a),
        Command::Enumerate(a) => run("enumerate", a),
        Command::Design(a) => run("design", a),
        Command::Mixture(a) => run("mixture", a),
        Command::Process(a) => run("process", a),
    };
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Infeasible(m)) => {
            eprintln!("infeasible: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Parse(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(4)
        }
    }
}
