use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use ak_core::bistellar::{reduce, ReduceOptions, Schedule};
use ak_core::builder::{verify_homology_sphere, Pipeline};
use ak_core::linalg::{homology_all, HomologyGroup};
use ak_core::morse::morse_experiment;
use ak_core::pi1::{abelianization, edge_path_presentation, tietze_simplify};
use ak_core::{fct, SimplicialComplex};

const SCHEMA: &str = "ak/1";

#[derive(Parser)]
#[command(
    name = "ak",
    version,
    about = "Akbulut-Kirby sphere triangulations and tools"
)]
struct Cli {
    /// Write the run manifest here instead of stderr.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the r-th sphere and write it as FCT.
    Generate {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        out: PathBuf,
        /// Facet tags of the 5-complex and per-stage statistics.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Pseudomanifold, link and homology battery for a 4-sphere candidate.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Integral homology in every dimension.
    Homology {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Random discrete Morse runs.
    Morse {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; defaults to AK_THREADS or all cores.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Bistellar reduction toward the boundary of a simplex.
    Flips {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Geometric schedule `g:ratio,floor` (or `g:start,ratio,floor`).
        #[arg(long)]
        schedule: Option<Schedule>,
        /// Recompute homology every this many moves.
        #[arg(long)]
        check_every: Option<usize>,
        /// Write the smallest complex reached.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Edge-path presentation of the fundamental group.
    Pi1 {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = usize::MAX)]
        simplify_budget: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Face counts per dimension.
    Fvector {
        #[command(flatten)]
        input: Input,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Generate { .. } => "generate",
            Command::Verify { .. } => "verify",
            Command::Homology { .. } => "homology",
            Command::Morse { .. } => "morse",
            Command::Flips { .. } => "flips",
            Command::Pi1 { .. } => "pi1",
            Command::Fvector { .. } => "fvector",
        }
    }
}

#[derive(Args)]
struct Input {
    /// Complex in FCT format.
    #[arg(long = "in", value_name = "FILE", required_unless_present = "r")]
    path: Option<PathBuf>,
    /// Build the r-th sphere instead of reading a file.
    #[arg(long, conflicts_with = "path")]
    r: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] ak_core::AkError),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Serialize)]
struct Artifact {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    schema: &'static str,
    version: &'static str,
    subcommand: String,
    args: Vec<String>,
    seed: Option<u64>,
    threads: usize,
    inputs: Vec<Artifact>,
    outputs: Vec<Artifact>,
    wall_clock_seconds: f64,
}

/// Collects artifacts while a subcommand runs.
struct Run {
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    seed: Option<u64>,
}

impl Run {
    fn load(&mut self, input: &Input) -> Result<(SimplicialComplex, Option<Pipeline>), CliError> {
        match (&input.path, input.r) {
            (Some(p), _) => {
                self.inputs.push(p.clone());
                Ok((fct::read_file(p)?, None))
            }
            (None, Some(r)) => {
                let p = Pipeline::run(r)?;
                Ok((p.sphere.clone(), Some(p)))
            }
            (None, None) => unreachable!("clap requires --in or --r"),
        }
    }

    fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        fs::write(path, bytes).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    fn write_complex(&mut self, path: &Path, k: &SimplicialComplex) -> Result<(), CliError> {
        self.write(path, fct::to_string(k).as_bytes())
    }

    /// JSON result to `path`, or to stdout.
    fn emit(&mut self, path: Option<&Path>, mut value: Value) -> Result<(), CliError> {
        value["schema"] = json!(SCHEMA);
        let text = serde_json::to_string_pretty(&value)? + "\n";
        match path {
            Some(p) => self.write(p, text.as_bytes()),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn sha256(path: &Path) -> String {
    fs::read(path)
        .map(|b| hex::encode(Sha256::digest(b)))
        .unwrap_or_default()
}

fn threads() -> usize {
    std::env::var("AK_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or(0)
}

fn homology_json(h: &[HomologyGroup]) -> Value {
    json!({
        "betti": h.iter().map(|g| g.betti).collect::<Vec<_>>(),
        "groups": h.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "detail": h,
    })
}

/// Runs one subcommand; `Ok(false)` is a verification failure.
fn execute(command: &Command, run: &mut Run) -> Result<bool, CliError> {
    match command {
        Command::Generate { r, out, labels } => {
            let p = Pipeline::run(*r)?;
            let stats = p.stats();
            run.write_complex(out, &p.sphere)?;
            eprintln!(
                "r = {r}: f = {:?}, chi = {}",
                stats.sphere_f_vector,
                p.sphere.euler_characteristic()
            );
            eprintln!(
                "{:>4} {:>10} {:>10} {:>10}",
                "dim", "built", "reference", "relative"
            );
            for row in &stats.deviation {
                eprintln!(
                    "{:>4} {:>10} {:>10} {:>+10.4}",
                    row.dim, row.built, row.reference, row.relative
                );
            }
            if let Some(path) = labels {
                let mut tags: Vec<(Vec<u32>, String)> = p
                    .glued
                    .tags
                    .iter()
                    .map(|(s, t)| {
                        (
                            s.vertices().to_vec(),
                            serde_json::to_value(t)
                                .unwrap()
                                .as_str()
                                .unwrap()
                                .to_string(),
                        )
                    })
                    .collect();
                tags.sort();
                let value = json!({
                    "r": r,
                    "stats": stats,
                    "euler_characteristic": p.sphere.euler_characteristic(),
                    "facet_tags": tags.into_iter().map(|(f, t)| json!({"facet": f, "tag": t})).collect::<Vec<_>>(),
                });
                run.emit(Some(path), value)?;
            }
            Ok(true)
        }
        Command::Verify { input, json: out } => {
            let (k, pipeline) = run.load(input)?;
            let ball = pipeline.as_ref().map(|p| &p.glued.complex.complex);
            let report = verify_homology_sphere(&k, ball);
            for c in &report.checks {
                eprintln!("{:<40} {}", c.name, if c.passed { "ok" } else { "FAIL" });
            }
            let passed = report.passed();
            let certificate: Vec<_> = report.failures().cloned().collect();
            run.emit(
                out.as_deref(),
                json!({ "passed": passed, "report": report, "failures": certificate }),
            )?;
            Ok(passed)
        }
        Command::Homology { input, json: out } => {
            let (k, _) = run.load(input)?;
            let h = homology_all(&k);
            eprintln!(
                "{}",
                h.iter()
                    .map(|g| g.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            run.emit(out.as_deref(), json!({ "homology": homology_json(&h) }))?;
            Ok(true)
        }
        Command::Morse {
            input,
            runs,
            seed,
            workers,
            json: out,
        } => {
            run.seed = Some(*seed);
            let (k, _) = run.load(input)?;
            let stats = morse_experiment(&k, *runs, *seed, workers.unwrap_or_else(threads))?;
            eprintln!(
                "mean critical cells {:.3}; best {} ({} runs)",
                stats.mean_critical, stats.best, stats.best_count
            );
            run.emit(out.as_deref(), json!({ "morse": stats }))?;
            Ok(true)
        }
        Command::Flips {
            input,
            budget,
            seed,
            schedule,
            check_every,
            out,
            json: js,
        } => {
            run.seed = Some(*seed);
            let (k, _) = run.load(input)?;
            let opts = ReduceOptions {
                budget: *budget,
                seed: *seed,
                schedule: schedule.unwrap_or_default(),
                check_every: *check_every,
            };
            let outcome = reduce(&k, &opts)?;
            eprintln!(
                "{} after {} moves: {:?} -> {:?}",
                if outcome.success {
                    "reduced"
                } else {
                    "not reduced"
                },
                outcome.moves,
                outcome.initial_f_vector,
                outcome.best_f_vector
            );
            if let Some(path) = out {
                run.write_complex(path, &outcome.best)?;
            }
            run.emit(js.as_deref(), json!({ "flips": outcome, "options": opts }))?;
            Ok(true)
        }
        Command::Pi1 {
            input,
            simplify_budget,
            json: out,
        } => {
            let (k, _) = run.load(input)?;
            let raw = edge_path_presentation(&k)?;
            let (p, stats) = tietze_simplify(&raw, *simplify_budget);
            let ab = abelianization(&p);
            eprintln!(
                "{} generators, {} relators -> {} generators, {} relators; abelianization {}",
                raw.generators.len(),
                raw.relators.len(),
                p.generators.len(),
                p.relators.len(),
                ab
            );
            match out {
                Some(path) => run.emit(
                    Some(path),
                    json!({
                        "raw": { "generators": raw.generators.len(), "relators": raw.relators.len() },
                        "presentation": p.to_string(),
                        "tietze": stats,
                        "abelianization": ab.to_string(),
                    }),
                )?,
                None => print!("{p}"),
            }
            Ok(true)
        }
        Command::Fvector { input } => {
            let (k, _) = run.load(input)?;
            let f: Vec<String> = k.f_vector().0.iter().map(|x| x.to_string()).collect();
            println!("{}", f.join(" "));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let n = threads();
    if n > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            log::warn!("thread pool: {e}");
        }
    }
    let start = Instant::now();
    let mut run = Run {
        inputs: Vec::new(),
        outputs: Vec::new(),
        seed: None,
    };
    let result = execute(&cli.command, &mut run);
    let args: Vec<String> = std::env::args().collect();
    let manifest = RunManifest {
        schema: SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name().to_string(),
        seed: run.seed,
        threads: if n > 0 {
            n
        } else {
            rayon::current_num_threads()
        },
        inputs: run
            .inputs
            .iter()
            .map(|p| Artifact {
                path: p.display().to_string(),
                sha256: sha256(p),
            })
            .collect(),
        outputs: run
            .outputs
            .iter()
            .map(|p| Artifact {
                path: p.display().to_string(),
                sha256: sha256(p),
            })
            .collect(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        args,
    };
    let text = serde_json::to_string(&manifest).expect("manifest serializes");
    match &cli.manifest {
        Some(p) => {
            if let Err(e) = fs::write(p, text + "\n") {
                eprintln!("error: {}: {e}", p.display());
            }
        }
        None => eprintln!("manifest: {text}"),
    }
    let _ = std::io::stdout().flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
