use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use ccgraph::analytics::{class_diameter, distance, ring_diameter, ring_girth};
use ccgraph::cache::{GraphCache, CACHE_ENV};
use ccgraph::export::{self, ExportFormat};
use ccgraph::linalg;
use ccgraph::ring::{BuildOptions, ElementId, RingHandle};
use ccgraph::verify::{Status, Verifier, DEFAULT_SEED};
use ccgraph::{parse_ring_spec, CommutationGraph, Error, GraphOptions};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "ccgraph", version, about = "Commutation graphs of finite rings")]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Build rings above the size guard.
    #[arg(long, global = true)]
    allow_large: bool,

    /// Print decoded renderings next to element ids.
    #[arg(long, global = true)]
    decode: bool,

    /// Directory for cached edge lists.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a graph and export it.
    Graph {
        #[arg(long)]
        ring: String,
        #[arg(long, default_value = "dot")]
        format: ExportFormat,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Commutative closure of one element, with levels.
    Closure {
        #[arg(long)]
        ring: String,
        /// Element id or literal.
        #[arg(long)]
        element: String,
    },
    /// Diameter, girth and distances.
    Analyze(AnalyzeArgs),
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Ring to check; repeatable. Defaults to the suite's own list.
        #[arg(long = "ring")]
        rings: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Jordan data of a matrix: partition, characteristic polynomial, Fitting split.
    Jordan {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        element: String,
    },
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long)]
    ring: String,
    #[arg(long)]
    diameter: bool,
    #[arg(long)]
    girth: bool,
    /// Distance between two elements.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    distance: Option<Vec<String>>,
    /// Diameter of the class of one element.
    #[arg(long, value_name = "A")]
    class_diameter: Option<String>,
}

enum Failure {
    Core(Error),
    ChecksFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SizeGuard { .. } | Error::MemoryBudget { .. } => 3,
        Error::Io(_) => 4,
        _ => 2,
    }
}

struct Context {
    options: GraphOptions,
    decode: bool,
    cache: GraphCache,
}

impl Context {
    fn ring(&self, spec: &str) -> Result<RingHandle, Error> {
        let desc = parse_ring_spec(spec)?;
        RingHandle::build_with(&desc, BuildOptions { allow_large: self.options.allow_large, ..Default::default() })
    }

    fn graph(&self, ring: &RingHandle) -> Result<CommutationGraph, Error> {
        self.cache.load_or_build(ring, self.options)
    }

    fn element(&self, ring: &RingHandle, a: ElementId) -> Value {
        if self.decode {
            json!({ "id": a.0, "decoded": ring.render(a) })
        } else {
            json!(a.0)
        }
    }
}

fn print_json(value: &Value) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let ctx = Context {
        options: GraphOptions { threads: cli.threads, allow_large: cli.allow_large },
        decode: cli.decode,
        cache: GraphCache::new(cli.cache_dir),
    };
    match cli.command {
        Command::Graph { ring, format, out } => {
            let ring = ctx.ring(&ring)?;
            let graph = ctx.graph(&ring)?;
            match out {
                Some(path) => export::write_export(&path, &ring, &graph, format)?,
                None => std::io::stdout().lock().write_all(export::render(&ring, &graph, format)?.as_bytes())?,
            }
        }
        Command::Closure { ring, element } => {
            let ring = ctx.ring(&ring)?;
            let a = ring.parse_element(&element)?;
            let graph = ctx.graph(&ring)?;
            let closure = graph.closure(&[a])?;
            let members: Vec<Value> = closure
                .members
                .iter()
                .zip(&closure.levels)
                .map(|(&m, &level)| {
                    let mut entry = json!({ "id": m.0, "level": level });
                    if ctx.decode {
                        entry["decoded"] = json!(ring.render(m));
                    }
                    entry
                })
                .collect();
            print_json(&json!({
                "ring": ring.spec(),
                "element": ctx.element(&ring, a),
                "size": members.len(),
                "max_level": closure.max_level(),
                "members": members,
            }))?;
        }
        Command::Analyze(args) => {
            let ring = ctx.ring(&args.ring)?;
            let graph = ctx.graph(&ring)?;
            let mut out = serde_json::Map::new();
            out.insert("ring".into(), json!(ring.spec()));
            let everything = !args.diameter && !args.girth && args.distance.is_none() && args.class_diameter.is_none();
            if args.diameter || everything {
                out.insert("diameter".into(), json!(ring_diameter(&graph)));
            }
            if args.girth || everything {
                out.insert("girth".into(), json!(ring_girth(&graph)));
            }
            if let Some(pair) = &args.distance {
                let (a, b) = (ring.parse_element(&pair[0])?, ring.parse_element(&pair[1])?);
                out.insert("distance".into(), json!(distance(&graph, a, b)));
            }
            if let Some(a) = &args.class_diameter {
                let a = ring.parse_element(a)?;
                out.insert("class_diameter".into(), json!(class_diameter(&graph, a)));
            }
            print_json(&Value::Object(out))?;
        }
        Command::Verify { suite, rings, seed, json } => {
            let verifier = Verifier::new(seed).with_options(ctx.options).with_cache(ctx.cache);
            let report = verifier.run_suite(&suite, &rings)?;
            for r in &report.results {
                let status = match r.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skipped => "SKIP",
                };
                println!("{status} {} {}", r.check_id, r.ring);
                if let (Status::Fail, Some(w)) = (r.status, &r.witness) {
                    println!("     witness {:?} {}", w.elements, w.note);
                }
            }
            let s = &report.summary;
            println!("{} checks: {} passed, {} failed, {} skipped", s.total, s.passed, s.failed, s.skipped);
            if let Some(path) = json {
                export::write_atomic(&path, report.to_json().as_bytes())?;
            }
            if !report.passed() {
                return Err(Failure::ChecksFailed);
            }
        }
        Command::Jordan { ring, element } => {
            let ring = ctx.ring(&ring)?;
            let a = ring.parse_element(&element)?;
            let Some((n, field)) = ring.matrix_shape() else {
                return Err(Error::InvalidArgument(format!("{} is not a matrix ring", ring.spec())).into());
            };
            let m = ring.decode_matrix(a)?;
            let fitting = linalg::fitting_decomposition(field, &m);
            let nil = &fitting.nilpotent_part;
            let blocks = if nil.size == 0 { Vec::new() } else { linalg::jordan_partition(field, nil)?.blocks };
            print_json(&json!({
                "ring": ring.spec(),
                "element": a.0,
                "matrix": m.render(field),
                "char_poly": linalg::char_poly(field, &m).render(field),
                "trace": field.render(linalg::trace(field, &m)),
                "rank": linalg::rank(field, &m),
                "nilpotency_index": linalg::nilpotency_index(field, &m),
                "jordan_partition": blocks,
                "fitting": { "invertible_size": fitting.invertible_size(), "nilpotent_size": n - fitting.invertible_size() },
            }))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ChecksFailed) => ExitCode::from(1),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
