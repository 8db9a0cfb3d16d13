use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use geostark_core::discretize::{accuracy_with_truth, build_table, exact_membership, read_table, write_table, GridSpec};
use geostark_core::harness::{
    emit_report, export_geojson, ingest, load_zones, read_queries, run_proof_bench, synth_corpus, write_zones,
    BenchConfig, GeoFrame, QuerySample, ReportRow, CORPUS_ORIGIN, DEFAULT_SAMPLE_COUNT,
};
use geostark_core::stark::{build_trace, encode_proof, prove, read_proof, verify, write_proof, StarkError, ZoneQuery};
use geostark_core::{AirConfig, BoundingBox, Point2D, StrategyKind};

const EXIT_REJECT: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "geostark", version, about = "Zone-membership lookup tables with STARK proofs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Center,
    Voting,
    Sdf,
}

#[derive(Subcommand)]
enum Command {
    /// Import a GeoJSON FeatureCollection into a binary zone file.
    Ingest {
        #[arg(long)]
        geojson: PathBuf,
        /// Region box in degrees, "lon_min,lat_min,lon_max,lat_max".
        #[arg(long, requires = "origin")]
        bbox: Option<BoundingBox>,
        /// Projection origin, "lon,lat".
        #[arg(long, requires = "bbox", value_parser = parse_pair)]
        origin: Option<(f64, f64)>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the synthetic 60-zone corpus as GeoJSON.
    Synth {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build and commit one lookup table.
    BuildTables {
        #[arg(long)]
        zones: PathBuf,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        /// Coverage threshold of the voting strategy.
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score every table in a directory against exact containment.
    Eval {
        #[arg(long)]
        zones: PathBuf,
        #[arg(long)]
        tables: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_COUNT)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Prove the membership outputs of a query file against a table.
    Prove {
        #[arg(long)]
        table: PathBuf,
        /// CSV with columns x,y,zone (zone id or index).
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a proof file and print the proven outputs.
    Verify {
        #[arg(long)]
        proof: PathBuf,
    },
    /// Time proving and verification across strategies and resolutions.
    Bench {
        #[arg(long)]
        zones: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        resolutions: Vec<u32>,
        #[arg(long, default_value_t = 64)]
        batch: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_COUNT)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        warmup: usize,
        /// Also write every benchmark proof into this directory.
        #[arg(long)]
        proofs: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok((
            a.parse().map_err(|_| format!("bad number {a:?}"))?,
            b.parse().map_err(|_| format!("bad number {b:?}"))?,
        )),
        _ => Err(format!("expected \"lon,lat\", got {s:?}")),
    }
}

fn strategy(arg: StrategyArg, tau: f64) -> StrategyKind {
    match arg {
        StrategyArg::Center => StrategyKind::CenterPoint,
        StrategyArg::Voting => StrategyKind::Voting { tau },
        StrategyArg::Sdf => StrategyKind::DistanceAware,
    }
}

fn table_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ztbl"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .ztbl files in {}", dir.display());
    }
    Ok(files)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Ingest { geojson, bbox, origin, out } => {
            let frame = match (bbox, origin) {
                (Some(bbox_lonlat), Some(origin)) => Some(GeoFrame { origin, bbox_lonlat }),
                _ => None,
            };
            let zones = ingest(&geojson, frame)?;
            write_zones(&zones, &out)?;
            println!("{} zones written to {}", zones.len(), out.display());
        }
        Command::Synth { seed, out } => {
            let zones = synth_corpus(seed);
            std::fs::write(&out, export_geojson(&zones, CORPUS_ORIGIN)?).with_context(|| format!("writing {}", out.display()))?;
            println!("{} zones written to {}", zones.len(), out.display());
        }
        Command::BuildTables { zones, strategy: arg, tau, r, out } => {
            let zones = load_zones(&zones)?;
            let bundle = build_table(&zones, &GridSpec::new(zones.bbox(), r)?, strategy(arg, tau))?;
            write_table(&bundle, &out)?;
            println!("{} r={r} root {} -> {}", bundle.strategy, bundle.commitment_root, out.display());
        }
        Command::Eval { zones, tables, samples, seed, out } => {
            let zones = load_zones(&zones)?;
            let sample = QuerySample::draw(&zones.bbox(), samples, seed);
            let truth = exact_membership(&zones, &sample.points);
            let mut rows = Vec::new();
            for path in table_files(&tables)? {
                let bundle = read_table(&path)?;
                if bundle.table.zone_ids() != zones.ids().as_slice() || bundle.grid().bbox() != zones.bbox() {
                    bail!("{} was built for a different zone set", path.display());
                }
                let mut row = ReportRow::new(&bundle.strategy, bundle.grid().r());
                row.accuracy = Some(accuracy_with_truth(&bundle, &sample.points, &truth)?);
                info!("{}: accuracy {:.4}", path.display(), row.accuracy.unwrap_or(0.0));
                rows.push(row);
            }
            emit_report(&rows, &out)?;
            println!("{} rows written to {}", rows.len(), out.display());
        }
        Command::Prove { table, queries, out } => {
            let bundle = read_table(&table)?;
            let ids = bundle.table.zone_ids();
            let queries = read_queries(&queries)?
                .into_iter()
                .enumerate()
                .map(|(k, q)| {
                    let zone = ids
                        .iter()
                        .position(|id| *id == q.zone)
                        .or_else(|| q.zone.parse::<usize>().ok().filter(|z| *z < ids.len()));
                    match zone {
                        Some(zone) => Ok(ZoneQuery::new(Point2D::new(q.x, q.y), zone)),
                        None => bail!("query {k}: unknown zone {:?}", q.zone),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let cfg = AirConfig::new(bundle.strategy, bundle.grid().r(), queries.len());
            let (trace, statement) = build_trace(&queries, &bundle, &cfg)?;
            let proof = prove(&trace, &statement, &cfg)?;
            write_proof(&proof, &out)?;
            println!("{} rows, {} bytes -> {}", queries.len(), encode_proof(&proof).len(), out.display());
        }
        Command::Verify { proof } => {
            let proof = match read_proof(&proof) {
                Ok(p) => p,
                Err(StarkError::Format(msg)) => {
                    println!("REJECT MALFORMED: {msg}");
                    return Ok(ExitCode::from(EXIT_REJECT));
                }
                Err(e) => return Err(e).with_context(|| format!("reading {}", proof.display())),
            };
            match verify(&proof) {
                Ok(()) => {
                    println!("ACCEPT");
                    for row in &proof.statement.rows {
                        println!("zone={} cell=({},{}) out={}", row.zone, row.i, row.j, row.out as u8);
                    }
                }
                Err(reason) => {
                    println!("REJECT {reason}");
                    return Ok(ExitCode::from(EXIT_REJECT));
                }
            }
        }
        Command::Bench {
            zones,
            resolutions,
            batch,
            samples,
            seed,
            runs,
            warmup,
            proofs,
            out,
        } => {
            let zones = load_zones(&zones)?;
            let sample = QuerySample::draw(&zones.bbox(), samples.max(batch), seed);
            let bench = BenchConfig { batch, warmup, runs };
            let cells = run_proof_bench(&zones, &StrategyKind::all(), &resolutions, &sample, &bench)?;
            if let Some(dir) = &proofs {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                for c in &cells {
                    write_proof(&c.proof, &dir.join(format!("{}-r{}.zstk", c.row.strategy, c.row.r)))?;
                }
            }
            let rows: Vec<ReportRow> = cells.into_iter().map(|c| c.row).collect();
            emit_report(&rows, &out)?;
            println!("{} rows written to {}", rows.len(), out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("ZSTARK_THREADS") {
        let n: usize = v.parse().with_context(|| format!("ZSTARK_THREADS={v:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match configure_threads().and_then(|_| run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
