//! `sldisk`: batch front end for extending and probing simplexwise-linear
//! embeddings of triangulated disks.
//!
//! Exit codes: 0 success, 1 parse or IO error, 2 failed precondition,
//! 3 internal consistency failure.

mod commands;
mod report;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use commands::ExtendArgs;
use report::RunReport;
use sldisk::io::IoError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    fn from_io(path: &Path, e: IoError) -> Self {
        match e {
            IoError::Io(e) => CliError::Io(format!("{}: {e}", path.display())),
            IoError::Parse { line, column, message } => {
                CliError::Parse(format!("{}: line {line}, column {column}: {message}", path.display()))
            }
            IoError::Version(v) => CliError::Parse(format!("{}: unsupported version {v:?}", path.display())),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "sldisk",
    version,
    about = "Exact extension of simplexwise-linear disk embeddings"
)]
struct Cli {
    /// Write the JSON run report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a disk and classify it.
    Check { disk: PathBuf },
    /// Move a convex disk into reduced form on one of its natural edges.
    Reduce {
        disk: PathBuf,
        edge: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extend a boundary map to the whole disk and verify the result.
    Extend {
        /// Disk file; omit with --corpus.
        disk: Option<PathBuf>,
        /// Boundary map file; omit with --corpus.
        map: Option<PathBuf>,
        /// Output map, or output directory with --corpus.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use the vertical construction for disks transverse to the verticals.
        #[arg(long)]
        vertical: bool,
        /// Write `<prefix>-before.svg` and `<prefix>-after.svg`.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Directory of disks (`NAME.json`) with optional `NAME.map.json`.
        #[arg(long, conflicts_with_all = ["disk", "map", "svg"])]
        corpus: Option<PathBuf>,
    },
    /// Shorthand for `extend --vertical`.
    VerticalExtend {
        disk: PathBuf,
        map: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// List spanning edges made obstructive by a boundary map.
    CheckObstructive { disk: PathBuf, map: PathBuf },
    /// Fiber polytopes of a reduced disk over given x-coordinates.
    Fiber {
        disk: PathBuf,
        /// x-coordinates of the interior vertices, apex last.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        x: Vec<String>,
        /// Apex height.
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Projection equalities and fiber structure on sampled parameters.
    #[command(name = "lemma6-check")]
    ProjectionCheck {
        disk: Option<PathBuf>,
        #[arg(long, conflicts_with = "disk")]
        corpus: Option<PathBuf>,
        /// In corpus mode, skip disks with more interior vertices.
        #[arg(long, default_value_t = 3)]
        max_interior: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random embeddings with fixed boundary, written one file each.
    Sample {
        disk: PathBuf,
        /// Boundary map; defaults to the boundary of the disk itself.
        map: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a disk, or its image under a map, as SVG.
    Render {
        disk: PathBuf,
        #[arg(long)]
        map: Option<PathBuf>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded corpus of disks.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Disks per shape.
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cmd: Cmd, r: &mut RunReport) -> Result<(), CliError> {
    let missing = |what: &str| CliError::Parse(format!("missing {what}"));
    match cmd {
        Cmd::Check { disk } => commands::check(&disk, r),
        Cmd::Reduce { disk, edge, out } => commands::reduce_cmd(&disk, edge, &out, r),
        Cmd::Extend {
            corpus: Some(dir),
            vertical,
            out,
            ..
        } => commands::extend_corpus(&dir, vertical, out.as_deref(), r),
        Cmd::Extend {
            disk,
            map,
            out,
            vertical,
            svg,
            corpus: None,
        } => {
            let disk = disk.ok_or_else(|| missing("disk"))?;
            let map = map.ok_or_else(|| missing("boundary map"))?;
            let out = out.ok_or_else(|| missing("--out"))?;
            let args = ExtendArgs {
                disk: &disk,
                map: &map,
                out: &out,
                vertical,
                svg: svg.as_deref(),
            };
            commands::extend_cmd(args, r)
        }
        Cmd::VerticalExtend { disk, map, out, svg } => {
            let args = ExtendArgs {
                disk: &disk,
                map: &map,
                out: &out,
                vertical: true,
                svg: svg.as_deref(),
            };
            commands::extend_cmd(args, r)
        }
        Cmd::CheckObstructive { disk, map } => commands::check_obstructive(&disk, &map, r),
        Cmd::Fiber { disk, x, y, out } => commands::fiber(&disk, &x, &y, out.as_deref(), r),
        Cmd::ProjectionCheck {
            corpus: Some(dir),
            samples,
            seed,
            max_interior,
            ..
        } => commands::projection_corpus(&dir, samples, seed, max_interior, r),
        Cmd::ProjectionCheck {
            disk, samples, seed, ..
        } => {
            let disk = disk.ok_or_else(|| missing("disk"))?;
            commands::projection(&disk, samples, seed, r)
        }
        Cmd::Sample {
            disk,
            map,
            n,
            seed,
            out,
        } => commands::sample(&disk, map.as_deref(), n, seed, &out, r),
        Cmd::Render { disk, map, out } => {
            if let Some(svg) = commands::render(&disk, map.as_deref(), out.as_deref(), r)? {
                print!("{svg}");
            }
            Ok(())
        }
        Cmd::Generate { seed, count, out } => commands::generate(seed, count, &out, r),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let rendering_to_stdout = matches!(&cli.cmd, Cmd::Render { out: None, .. });
    let mut report = RunReport::new(std::env::args().skip(1).collect());
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli.cmd, &mut report)));
    match outcome {
        Ok(Ok(())) => {}
        Ok(Err(e)) => {
            eprintln!("sldisk: {e}");
            return ExitCode::from(1);
        }
        Err(_) => {
            eprintln!("sldisk: internal error");
            return ExitCode::from(3);
        }
    }
    report.finish();
    if !rendering_to_stdout {
        for c in &report.checks {
            let mark = if c.pass { "pass" } else { "FAIL" };
            println!("{mark} {}: {}", c.name, c.detail.as_deref().unwrap_or(""));
        }
        println!("{}", report.summary);
    }
    if let Some(path) = &cli.report {
        let text = sldisk::io::to_json(&report);
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("sldisk: io error: {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    ExitCode::from(report.status)
}
