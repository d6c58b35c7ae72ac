//! `pedrecon`: simulate pedigrees, reconstruct them from extant sequences
//! and score the result.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::warn;

use pedrecon::eval::{self, collision_census, overlap_census, richness_census};
use pedrecon::experiment::{self, SweepGrid, RECON_FILE, REPORT_FILE};
use pedrecon::genmodel::{simulate, GeneratorVariant, SimParams};
use pedrecon::io::{self as files, IoError, ReportFile};
use pedrecon::pedigree::{couple_transform, figures};
use pedrecon::recgen::{rec_gen, ReconConfig};

#[derive(Parser)]
#[command(name = "pedrecon", version, about = "Pedigree simulation, reconstruction and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a pedigree and its sequences.
    Simulate(SimulateArgs),
    /// Rebuild a pedigree from an extant sequence file alone.
    Reconstruct(ReconstructArgs),
    /// Score a reconstruction against the true pedigree.
    Evaluate(EvaluateArgs),
    /// Simulate, reconstruct and evaluate over a grid of alphas and seeds.
    Sweep(SweepArgs),
    /// Structural censuses of a true pedigree, or the figure oracles.
    Stats(StatsArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long, default_value_t = 500)]
    founders: usize,
    #[arg(long, default_value_t = 3)]
    generations: usize,
    #[arg(long, default_value_t = 600)]
    blocks: usize,
    /// direct or equivalent
    #[arg(long, default_value = "direct")]
    variant: GeneratorVariant,
}

#[derive(Args, Clone)]
struct ReconArgs {
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 0.21)]
    sib_threshold: f64,
    #[arg(long, default_value_t = 0.99)]
    block_threshold: f64,
    /// Levels to rebuild.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Witness triples tried per symbol before giving up.
    #[arg(long, default_value_t = 512)]
    witness_attempts: usize,
}

impl ReconArgs {
    fn config(&self) -> ReconConfig {
        ReconConfig {
            d: self.d,
            sib_threshold: self.sib_threshold,
            block_threshold: self.block_threshold,
            depth: self.depth,
            witness_attempts: self.witness_attempts,
            record_hyperedges: false,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 10.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Extant sequence file.
    #[arg(long)]
    extant: PathBuf,
    #[command(flatten)]
    recon: ReconArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    recon: PathBuf,
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated alpha values.
    #[arg(long, default_value = "6,8,10,12")]
    alphas: String,
    /// Runs per alpha, seeded consecutively from --seed.
    #[arg(long, default_value_t = 10)]
    runs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    recon: ReconArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    /// Print exact and sampled coincidence probabilities of the built-in figures.
    #[arg(long)]
    figures: bool,
    #[arg(long, required_unless_present = "figures")]
    truth: Option<PathBuf>,
    #[arg(long, required_unless_present = "figures")]
    genes: Option<PathBuf>,
    /// Triples sampled per census class.
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 0.21)]
    sib_threshold: f64,
}

/// Error kinds that map to exit status 2; everything else is 1.
fn exit_status(err: &anyhow::Error) -> u8 {
    let io_like = err
        .chain()
        .any(|c| c.is::<IoError>() || c.is::<io::Error>());
    if io_like {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            let closed = e
                .chain()
                .filter_map(|c| c.downcast_ref::<io::Error>())
                .any(|c| c.kind() == io::ErrorKind::BrokenPipe);
            if !closed {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(exit_status(&e))
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Stats(a) => cmd_stats(a),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|source| IoError::Io {
            path: dir.to_path_buf(),
            source,
        })
        .map_err(Into::into)
}

fn cmd_simulate(a: SimulateArgs) -> Result<ExitCode> {
    let m = &a.model;
    let params = SimParams::new(m.founders, a.alpha, m.generations, m.blocks, a.seed).with_variant(m.variant);
    let sim = simulate(&params)?;
    let truth = couple_transform(&sim.pedigree)?;
    experiment::write_simulation(&a.out, &sim, &truth)?;
    let mut out = io::stdout().lock();
    for (t, level) in sim.pedigree.levels().iter().enumerate() {
        writeln!(out, "level {t}: {} individuals, {} coupled nodes", level.len(), truth.level_len(t))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reconstruct(a: ReconstructArgs) -> Result<ExitCode> {
    // the extant file is the only input
    let extant = files::load_extant(&a.extant)?;
    let cfg = a.recon.config();
    let recon = rec_gen(&extant, &cfg)?;
    if let Some(k) = recon.stopped_at {
        warn!("iteration {k} found no families; reconstruction has depth {}", recon.depth());
    }
    ensure_dir(&a.out)?;
    files::save_recon(&a.out.join(RECON_FILE), &recon)?;
    let mut out = io::stdout().lock();
    writeln!(out, "level\tnodes\ttested\thyperedges\tcliques\tparents")?;
    for d in &recon.diagnostics {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            d.level, d.nodes, d.vertices, d.hyperedges, d.cliques, d.parents_created
        )?;
    }
    writeln!(out, "depth {}", recon.depth())?;
    Ok(ExitCode::SUCCESS)
}

fn print_report(out: &mut impl Write, r: &ReportFile) -> io::Result<()> {
    writeln!(out, "level\ttruth\trecon\tmatched\trecovery\tawesome\tcoverage")?;
    for l in &r.report.levels {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.4}\t{}\t{:.4}",
            l.level, l.truth_nodes, l.recon_nodes, l.matched, l.recovery, l.awesome, l.awesome_coverage
        )?;
    }
    for d in r.details.iter().take(20) {
        writeln!(out, "{d}")?;
    }
    if r.details.len() > 20 {
        writeln!(out, "... {} more", r.details.len() - 20)?;
    }
    writeln!(
        out,
        "induced subpedigree: {}",
        if r.report.induced { "yes" } else { "no" }
    )
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<ExitCode> {
    let truth = files::load_pedigree(&a.truth)?;
    let recon = files::load_recon(&a.recon)?;
    let report = experiment::evaluate(&recon.pedigree, &truth, a.d)?;
    if let Some(dir) = &a.out {
        ensure_dir(dir)?;
        files::save_report(&dir.join(REPORT_FILE), &report)?;
    }
    print_report(&mut io::stdout().lock(), &report)?;
    Ok(if report.report.induced {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn parse_alphas(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<f64>().with_context(|| format!("bad alpha `{x}`")))
        .collect()
}

fn cmd_sweep(a: SweepArgs) -> Result<ExitCode> {
    let grid = SweepGrid {
        founders: a.model.founders,
        alphas: parse_alphas(&a.alphas)?,
        generations: a.model.generations,
        blocks: a.model.blocks,
        seeds: (a.seed..a.seed + a.runs).collect(),
        variant: a.model.variant,
        recon: a.recon.config(),
        out: Some(a.out.clone()),
    };
    let rows = experiment::run_sweep(&grid)?;
    ensure_dir(&a.out)?;
    let path = a.out.join("sweep.tsv");
    let mut buf = Vec::new();
    experiment::write_sweep_table(&mut buf, &rows)?;
    fs::write(&path, &buf).map_err(|source| IoError::Io { path, source })?;
    io::stdout().write_all(&buf)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_stats(a: StatsArgs) -> Result<ExitCode> {
    let mut out = io::stdout().lock();
    if a.figures {
        writeln!(out, "figure\texact\tsampled\tse")?;
        for f in figures::all() {
            let exact = eval::exact_coincidence_oracle(&f.pedigree, &f.targets)?;
            let (est, se) = eval::monte_carlo_coincidence(&f.pedigree, &f.targets, 100_000, a.seed)?;
            writeln!(out, "{}\t{}\t{est:.5}\t{se:.5}", f.name, exact)?;
        }
        if a.truth.is_none() {
            return Ok(ExitCode::SUCCESS);
        }
    }
    let (Some(tp), Some(gp)) = (&a.truth, &a.genes) else {
        bail!("--truth and --genes are both needed for the censuses");
    };
    let truth = files::load_pedigree(tp)?;
    let genes = files::load_genes(gp)?;
    let mut rng = pedrecon::genmodel::RngStream::new(a.seed, "census");

    let c = collision_census(&truth, a.samples, &mut rng)?;
    writeln!(out, "collisions: {} triples sampled, {} with 4 or more, {} route mismatches", c.sampled, c.flagged.len(), c.mismatches.len())?;
    for (k, n) in &c.histogram {
        writeln!(out, "  {k}\t{n}")?;
    }

    let o = overlap_census(&truth, &genes, a.samples, a.sib_threshold, &mut rng)?;
    writeln!(out, "overlap (threshold {}):", o.threshold)?;
    writeln!(out, "  class\tcount\tmean\tmin\tmax\twrong_side")?;
    let mut class = |name: &str, s: &eval::ClassSummary| {
        writeln!(out, "  {name}\t{}\t{:.4}\t{:.4}\t{:.4}\t{}", s.count, s.mean, s.min, s.max, s.violations)
    };
    class("siblings", &o.siblings)?;
    class("common-ancestor", &o.common)?;
    class("unrelated", &o.unrelated)?;
    for (case, s) in &o.cases {
        class(&format!("{case:?}"), s)?;
    }

    writeln!(out, "richness (d = {}):", a.d)?;
    writeln!(out, "  level\tnodes\trich\tawesome\tawesome_fraction")?;
    for l in richness_census(&truth, a.d)? {
        writeln!(out, "  {}\t{}\t{}\t{}\t{:.4}", l.level, l.nodes, l.rich, l.awesome, l.awesome_fraction())?;
    }
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_lists() {
        assert_eq!(parse_alphas("6, 8,10").unwrap(), vec![6.0, 8.0, 10.0]);
        assert!(parse_alphas("").unwrap().is_empty());
        assert!(parse_alphas("6,x").is_err());
    }

    #[test]
    fn io_errors_exit_two() {
        let e: anyhow::Error = IoError::Parse { line: 3, msg: "x".into() }.into();
        assert_eq!(exit_status(&e), 2);
        let e: anyhow::Error = pedrecon::SimError::InvalidParams("x".into()).into();
        assert_eq!(exit_status(&e), 1);
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
