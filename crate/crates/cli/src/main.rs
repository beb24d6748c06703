//! `locc`: ground states, spectra, convertibility verdicts and scaling fits
//! for the periodic transverse-field Ising chain.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use locc_core::convertibility::{elocc_compare, majorize, DEFAULT_TOLERANCE};
use locc_core::entanglement::default_alpha_grid;
use locc_core::pipeline::{self, SweepConfig, SweepRecord};
use locc_core::scaling::fit_power_law;
use locc_core::{renyi_entropy, Alpha, Error, Observable, RenyiCurve, SchmidtVector};
use serde::Serialize;

const CACHE_ENV: &str = "LOCC_CACHE_DIR";

#[derive(Parser)]
#[command(name = "locc", version, about = "LOCC convertibility of transverse-field Ising ground states")]
struct Cli {
    /// Indented JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one (N, h) point and print its record as JSON.
    Ground {
        #[arg(long)]
        h: f64,
        /// Use the dense solver when the sector is small enough.
        #[arg(long)]
        dense: bool,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Run the (N, h) sweep, write spectra.csv and renyi.csv, and print the
    /// spectra.
    Sweep {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Partial-sum profiles and their derivatives as CSV.
    Profiles {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Interior minima of f2 and f3 as CSV.
    Minima {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Fit h_min(N) = a / N^b + c, from explicit points or from a sweep.
    Fit {
        /// Comma-separated N:h_min pairs.
        #[arg(long, value_parser = parse_points)]
        points: Option<Points>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Majorization verdict between two probability vectors.
    Majorize {
        #[arg(long, value_parser = parse_probs)]
        a: Probs,
        #[arg(long, value_parser = parse_probs)]
        b: Probs,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Print the verdict with witnesses as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Rényi entropies of a spectrum as CSV.
    Renyi {
        #[arg(long, value_parser = parse_probs)]
        lambdas: Probs,
        /// Comma-separated orders; `inf` allowed. Defaults to the standard grid.
        #[arg(long, value_delimiter = ',', value_parser = parse_alpha)]
        alpha: Vec<Alpha<f64>>,
    },
    /// ELOCC verdict from two spectra or two fields of one chain.
    Elocc {
        #[arg(long, value_parser = parse_probs, requires = "b", conflicts_with_all = ["h_a", "h_b"])]
        a: Option<Probs>,
        #[arg(long, value_parser = parse_probs, requires = "a")]
        b: Option<Probs>,
        #[arg(long, requires = "h_b")]
        h_a: Option<f64>,
        #[arg(long, requires = "h_a")]
        h_b: Option<f64>,
        /// Sites in the Rényi block (default: half the chain).
        #[arg(long)]
        block_size: Option<usize>,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Run the sweep and write every output file into a directory.
    Report {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Sweep settings; each flag overrides `LOCC_CACHE_DIR`, which overrides
/// the `--config` file, which overrides the defaults.
#[derive(Args)]
struct SweepArgs {
    /// TOML file with sweep settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// System sizes, comma-separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long)]
    h_start: Option<f64>,
    #[arg(long)]
    h_end: Option<f64>,
    #[arg(long)]
    h_step: Option<f64>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Eigensolver residual tolerance.
    #[arg(long)]
    solver_tol: Option<f64>,
    #[arg(long)]
    majorization_tol: Option<f64>,
    #[arg(long)]
    elocc_tol: Option<f64>,
    #[arg(long)]
    elocc_fraction: Option<f64>,
}

impl SweepArgs {
    fn resolve(&self) -> Result<SweepConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => SweepConfig::default(),
        };
        if let Some(dir) = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()) {
            cfg.cache_dir = Some(PathBuf::from(dir));
        }
        if !self.n.is_empty() {
            cfg.sizes = self.n.clone();
        }
        set(&mut cfg.h_start, self.h_start);
        set(&mut cfg.h_end, self.h_end);
        set(&mut cfg.h_step, self.h_step);
        set(&mut cfg.workers, self.workers);
        set(&mut cfg.solver.tolerance, self.solver_tol);
        set(&mut cfg.tolerances.majorization, self.majorization_tol);
        set(&mut cfg.tolerances.elocc, self.elocc_tol);
        set(&mut cfg.elocc_block_fraction, self.elocc_fraction);
        if let Some(dir) = &self.cache_dir {
            cfg.cache_dir = Some(dir.clone());
        }
        cfg.validate()?;
        let shown = toml::to_string(&cfg).unwrap_or_else(|e| format!("<unprintable: {e}>"));
        eprintln!("# resolved configuration\n{}", shown.trim_end());
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[derive(Clone)]
struct Probs(SchmidtVector);

#[derive(Clone)]
struct Points(Vec<(usize, f64)>);

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| format!("{t:?} is not a number"))).collect()
}

fn parse_probs(s: &str) -> Result<Probs, String> {
    SchmidtVector::new(parse_list(s)?).map(Probs).map_err(|e| e.to_string())
}

fn parse_alpha(s: &str) -> Result<Alpha<f64>, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_points(s: &str) -> Result<Points, String> {
    s.split(',')
        .map(|pair| {
            let (n, h) = pair.split_once(':').ok_or_else(|| format!("{pair:?} is not N:h"))?;
            let n = n.trim().parse().map_err(|_| format!("{n:?} is not a size"))?;
            let h = h.trim().parse().map_err(|_| format!("{h:?} is not a number"))?;
            Ok((n, h))
        })
        .collect::<Result<_, String>>()
        .map(Points)
}

struct Out {
    pretty: bool,
}

impl Out {
    fn json<T: Serialize>(&self, value: &T) -> Result<(), Error> {
        let text = if self.pretty { serde_json::to_string_pretty(value) } else { serde_json::to_string(value) }
            .expect("output types serialize");
        println!("{text}");
        Ok(())
    }

    /// CSV as written, or space-aligned columns under `--pretty`.
    fn csv(&self, write: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Result<(), Error> {
        let mut buf = Vec::new();
        write(&mut buf).map_err(|e| Error::Io { path: PathBuf::from("<stdout>"), source: e })?;
        let text = String::from_utf8(buf).expect("writers emit UTF-8");
        let body = if self.pretty { align(&text) } else { text };
        let mut lock = io::stdout().lock();
        lock.write_all(body.as_bytes())
            .and_then(|_| lock.flush())
            .map_err(|e| Error::Io { path: PathBuf::from("<stdout>"), source: e })
    }
}

fn align(csv: &str) -> String {
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let width: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|f| f.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in &rows {
        let cells: Vec<String> = r.iter().enumerate().map(|(c, f)| format!("{f:<w$}", w = width[c])).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Records for every grid point, or a computational error if any failed.
fn sweep_records(cfg: &SweepConfig) -> Result<Vec<SweepRecord>, Error> {
    let out = pipeline::run_sweep(cfg)?;
    eprintln!("# {} solved, {} from cache, {} failed", out.solved, out.cache_hits, out.failures.len());
    for f in &out.failures {
        eprintln!("# failed N={} h={}: {}", f.n_sites, f.h, f.message);
    }
    if !out.failures.is_empty() {
        return Err(Error::Coverage { missing: out.failures.iter().map(|f| (f.n_sites, f.h)).collect() });
    }
    Ok(out.records)
}

fn report_for(cfg: &SweepConfig) -> Result<(Vec<SweepRecord>, pipeline::ReportBundle), Error> {
    let records = sweep_records(cfg)?;
    let report = pipeline::build_report(&records, cfg)?;
    Ok((records, report))
}

fn run(cli: Cli) -> Result<(), Error> {
    let out = Out { pretty: cli.pretty };
    match cli.command {
        Command::Ground { h, dense, sweep } => {
            let mut cfg = sweep.resolve()?;
            let n = single_size(&cfg)?;
            cfg.solver.prefer_dense = dense;
            out.json(&pipeline::solve_point(&cfg, n, h)?)
        }
        Command::Sweep { sweep, out: dir } => {
            let cfg = sweep.resolve()?;
            let records = sweep_records(&cfg)?;
            write_sweep_files(&dir, &records)?;
            out.csv(|w| pipeline::write_spectra_csv(w, &records))
        }
        Command::Profiles { sweep } => {
            let (_, report) = report_for(&sweep.resolve()?)?;
            out.csv(|w| pipeline::write_profiles_csv(w, &report))
        }
        Command::Minima { sweep } => {
            let (_, report) = report_for(&sweep.resolve()?)?;
            out.csv(|w| pipeline::write_minima_csv(w, &report))
        }
        Command::Fit { points: Some(points), .. } => out.json(&pipeline::FitSummary::from(&fit_power_law(&points.0)?)),
        Command::Fit { points: None, sweep } => {
            let (_, report) = report_for(&sweep.resolve()?)?;
            let fits: Vec<pipeline::FitSummary> = report.fits().map(Into::into).collect();
            if fits.is_empty() {
                return Err(Error::Fit("no size set supports a fit".into()));
            }
            out.json(&fits)
        }
        Command::Majorize { a, b, tol, json } => {
            let verdict = majorize(&a.0, &b.0, tol);
            if json {
                out.json(&verdict)
            } else {
                println!("{}", verdict.direction);
                Ok(())
            }
        }
        Command::Renyi { lambdas, alpha } => {
            let alphas = if alpha.is_empty() {
                RenyiCurve::compute(lambdas.0.probs(), &default_alpha_grid())?
                    .points()
                    .into_iter()
                    .map(|p| p.0)
                    .collect()
            } else {
                alpha
            };
            out.csv(|w| {
                writeln!(w, "alpha,entropy")?;
                for a in alphas {
                    let s = renyi_entropy(lambdas.0.probs(), a).map_err(io::Error::other)?;
                    writeln!(w, "{a},{s}")?;
                }
                Ok(())
            })
        }
        Command::Elocc { a, b, h_a, h_b, block_size, json, sweep } => {
            let (ca, cb, tol) = match (a, b, h_a, h_b) {
                (Some(a), Some(b), _, _) => {
                    let grid = default_alpha_grid();
                    let tol = sweep.elocc_tol.unwrap_or(DEFAULT_TOLERANCE);
                    (RenyiCurve::compute(a.0.probs(), &grid)?, RenyiCurve::compute(b.0.probs(), &grid)?, tol)
                }
                (_, _, Some(ha), Some(hb)) => {
                    let mut cfg = sweep.resolve()?;
                    let n = single_size(&cfg)?;
                    if let Some(l) = block_size {
                        if l == 0 || l >= n {
                            return Err(Error::Config(format!("--block-size must lie in [1, {}]", n - 1)));
                        }
                        cfg.elocc_block_fraction = l as f64 / n as f64;
                    }
                    let ra = pipeline::solve_point(&cfg, n, ha)?;
                    let rb = pipeline::solve_point(&cfg, n, hb)?;
                    (ra.renyi, rb.renyi, cfg.tolerances.elocc)
                }
                _ => return Err(Error::Config("elocc needs --a/--b or --n with --h-a/--h-b".into())),
            };
            let verdict = elocc_compare(&ca, &cb, tol)?;
            if json {
                out.json(&verdict)
            } else {
                println!("{}", verdict.direction);
                Ok(())
            }
        }
        Command::Report { sweep, out: dir } => {
            let cfg = sweep.resolve()?;
            let (records, report) = report_for(&cfg)?;
            pipeline::write_all(&dir, &records, &report)?;
            out.json(&Summary::new(&report))
        }
    }
}

fn single_size(cfg: &SweepConfig) -> Result<usize, Error> {
    match cfg.sizes.as_slice() {
        [n] => Ok(*n),
        _ => Err(Error::Config("this command needs exactly one --n".into())),
    }
}

fn write_sweep_files(dir: &Path, records: &[SweepRecord]) -> Result<(), Error> {
    let io_err = |p: &Path| {
        let p = p.to_owned();
        move |e| Error::Io { path: p, source: e }
    };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let spectra = dir.join("spectra.csv");
    let file = std::fs::File::create(&spectra).map_err(io_err(&spectra))?;
    pipeline::write_spectra_csv(io::BufWriter::new(file), records).map_err(io_err(&spectra))?;
    let renyi = dir.join("renyi.csv");
    let file = std::fs::File::create(&renyi).map_err(io_err(&renyi))?;
    pipeline::write_renyi_csv(io::BufWriter::new(file), records).map_err(io_err(&renyi))
}

/// Headline numbers printed by `report`.
#[derive(Serialize)]
struct Summary {
    h_c: Option<f64>,
    fits: Vec<pipeline::FitSummary>,
    regions: Vec<(usize, pipeline::RegionSummary)>,
    minima: Vec<(usize, Observable, f64)>,
}

impl Summary {
    fn new(report: &pipeline::ReportBundle) -> Self {
        Summary {
            h_c: report.h_c,
            fits: report.fits().map(Into::into).collect(),
            regions: report.sizes.iter().map(|s| (s.n_sites, s.regions)).collect(),
            minima: report
                .sizes
                .iter()
                .flat_map(|s| s.minimum_f2.iter().chain(&s.minimum_f3).map(move |m| (s.n_sites, m.observable, m.h_min)))
                .collect(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_computational() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
