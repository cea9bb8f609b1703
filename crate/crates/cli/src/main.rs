//! Command-line driver: solve / verify / render / records.
//!
//! Results go to stdout, diagnostics to stderr. Exit codes: 0 success
//! (verify: ok; records: matches/improves/unlisted), 1 verification
//! failure or below-record comparison, 2 usage or parse errors.

use clap::{Parser, Subcommand, ValueEnum};
use knights3d::codec::{
    decode_document, encode_document, export_polyline, parse_layers, render_layers, TourDocument,
};
use knights3d::records::{builtin_records, compare_length, lookup, CompareStatus};
use knights3d::search::{solve, Mode, SearchConfig, StopReason, GENERATOR_NAME};
use knights3d::tour::{verify, Tour};
use knights3d::Box3;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "knights3d", version, about = "Non-crossing 3D knight's tour toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Heuristic,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveFormat {
    Doc,
    Layers,
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderFormat {
    Layers,
    Doc,
    Polyline,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a long non-crossing tour and print it.
    Solve {
        /// Box dimensions, e.g. 3x4x4
        #[arg(long, value_parser = parse_box)]
        r#box: Box3,
        /// Require a reentrant (closed) tour
        #[arg(long)]
        closed: bool,
        #[arg(long, value_enum, default_value = "heuristic")]
        mode: ModeArg,
        /// Wall-clock budget in seconds
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        /// Beam width (1 = pure greedy)
        #[arg(long, default_value_t = 1)]
        beam: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Stop as soon as this length is reached
        /// (defaults to the records-table entry for the shape)
        #[arg(long)]
        target_length: Option<usize>,
        /// Disable the default stop-at-record target
        #[arg(long)]
        no_target: bool,
        /// Write the result here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "doc")]
        format: SolveFormat,
    },
    /// Verify a tour file (document or layer table) and print the report.
    Verify { file: PathBuf },
    /// Re-render a tour file in another format.
    Render {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: RenderFormat,
    },
    /// Print the record registry and/or compare a tour file against it.
    Records {
        #[arg(long, value_parser = parse_box)]
        r#box: Option<Box3>,
        #[arg(long)]
        compare: Option<PathBuf>,
    },
}

fn parse_box(s: &str) -> Result<Box3, String> {
    let parts: Vec<&str> = s.split('x').collect();
    if parts.len() != 3 {
        return Err(format!("expected MxNxK, got {s:?}"));
    }
    let mut d = [0i64; 3];
    for (i, p) in parts.iter().enumerate() {
        d[i] = p
            .parse()
            .map_err(|_| format!("bad extent {p:?} in {s:?}"))?;
        if d[i] < 1 {
            return Err(format!("extents must be >= 1, got {s:?}"));
        }
    }
    Ok(Box3::new(d[0], d[1], d[2]))
}

/// Load a tour from a JSON document or a layer table (auto-detected).
fn load_tour(path: &PathBuf) -> Result<Tour, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if text.trim_start().starts_with('{') {
        decode_document(&text)
            .map(|d| d.to_tour())
            .map_err(|e| format!("{}: {e}", path.display()))
    } else {
        parse_layers(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Solve {
            r#box: bx,
            closed,
            mode,
            time_limit,
            seed,
            restarts,
            beam,
            threads,
            target_length,
            no_target,
            out,
            format,
        } => {
            let mode = match mode {
                ModeArg::Exhaustive => Mode::Exhaustive,
                ModeArg::Heuristic => Mode::Heuristic,
            };
            let target = if no_target {
                None
            } else {
                target_length.or_else(|| lookup(&bx, closed).map(|r| r.length))
            };
            let config = SearchConfig {
                mode,
                closed,
                time_limit: time_limit.map(Duration::from_secs_f64),
                seed,
                restarts,
                beam_width: beam,
                threads,
                target_length: target,
            };
            let result = solve(&bx, &config);

            let mut meta = BTreeMap::new();
            meta.insert(
                "mode".into(),
                match mode {
                    Mode::Exhaustive => "exhaustive".to_string(),
                    Mode::Heuristic => "heuristic".to_string(),
                },
            );
            meta.insert("seed".into(), seed.to_string());
            meta.insert("generator".into(), GENERATOR_NAME.into());
            meta.insert("optimal".into(), result.optimal.to_string());
            meta.insert("stopped_by".into(), result.stopped_by.as_str().into());
            if mode == Mode::Heuristic {
                meta.insert("restarts".into(), result.restarts_done.to_string());
                meta.insert("beam".into(), beam.to_string());
            }

            let text = match format {
                SolveFormat::Doc => {
                    encode_document(&TourDocument::from_tour(&result.best, meta))
                }
                SolveFormat::Layers => {
                    render_layers(&result.best).map_err(|e| e.to_string())?
                }
            };
            match out {
                Some(p) => std::fs::write(&p, text)
                    .map_err(|e| format!("{}: {e}", p.display()))?,
                None => print!("{text}"),
            }

            let status = compare_length(&result.best.bx, result.best.closed, result.length);
            eprintln!(
                "length {} ({}) on {} | optimal: {} | record: {} | nodes: {} | {:.3}s | stopped_by: {}",
                result.length,
                if result.best.closed { "closed" } else { "open" },
                bx,
                result.optimal,
                status,
                result.nodes_expanded,
                result.elapsed.as_secs_f64(),
                result.stopped_by.as_str(),
            );
            if result.stopped_by == StopReason::TimeLimit {
                eprintln!("time limit hit; best-so-far returned");
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify { file } => {
            let tour = load_tour(&file)?;
            let report = verify(&tour);
            print!("{report}");
            Ok(if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }

        Command::Render { file, format } => {
            let tour = load_tour(&file)?;
            let text = match format {
                RenderFormat::Layers => render_layers(&tour).map_err(|e| e.to_string())?,
                RenderFormat::Doc => {
                    encode_document(&TourDocument::from_tour(&tour, BTreeMap::new()))
                }
                RenderFormat::Polyline => {
                    export_polyline(&tour).map_err(|e| e.to_string())?
                }
            };
            print!("{text}");
            Ok(ExitCode::SUCCESS)
        }

        Command::Records { r#box: bx, compare } => {
            let entries = builtin_records();
            let selected: Vec<_> = entries
                .into_iter()
                .filter(|r| bx.map_or(true, |b| r.dims == b.sorted_dims()))
                .collect();
            let registry = serde_json::to_string_pretty(&selected)
                .expect("registry serializes");
            println!("{registry}");

            let Some(path) = compare else {
                return Ok(ExitCode::SUCCESS);
            };
            let tour = load_tour(&path)?;
            let report = verify(&tour);
            if !report.ok {
                return Err(format!(
                    "{}: tour fails verification, refusing to compare\n{report}",
                    path.display()
                ));
            }
            let status = compare_length(&tour.bx, tour.closed, tour.length());
            println!(
                "compare: length {} ({}) on {} -> {status}",
                tour.length(),
                if tour.closed { "closed" } else { "open" },
                tour.bx
            );
            Ok(match status {
                CompareStatus::Below(_) => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            })
        }
    }
}
