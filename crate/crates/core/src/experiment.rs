//! Simulate, reconstruct and evaluate in one go, singly or over a grid.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use log::{info, warn};
use thiserror::Error;

use crate::eval::{hyperedge_audit, match_to_truth, recovery_report, symbol_soundness, EvalError, HyperedgeAudit};
use crate::genmodel::{simulate, GeneratorVariant, SimError, SimParams, Simulation};
use crate::io::{self as files, IoError, ReportFile};
use crate::par;
use crate::pedigree::{couple_transform, CoupledPedigree, PedigreeError};
use crate::recgen::{rec_gen, ReconConfig, ReconError, ReconPedigree};

pub const TRUTH_FILE: &str = "truth.ped";
pub const GENES_FILE: &str = "genes.tsv";
pub const EXTANT_FILE: &str = "extant.tsv";
pub const RECON_FILE: &str = "recon.txt";
pub const REPORT_FILE: &str = "report.txt";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Recon(#[from] ReconError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Pedigree(#[from] PedigreeError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

/// Matches a reconstruction to the truth and renders the report, with one
/// detail line per failure and violation.
pub fn evaluate(recon: &CoupledPedigree, truth: &CoupledPedigree, d: usize) -> Result<ReportFile, ExperimentError> {
    let m = match_to_truth(recon, truth)?;
    let report = recovery_report(&m, truth, d)?;
    let details = m
        .failures
        .iter()
        .map(|f| format!("failure {f}"))
        .chain(m.violations.iter().map(|v| format!("violation {v}")))
        .collect();
    Ok(ReportFile { report, details })
}

/// Writes the three simulation artifacts into `dir`.
pub fn write_simulation(dir: &Path, sim: &Simulation, truth: &CoupledPedigree) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(dir).map_err(|source| IoError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    files::save_pedigree(&dir.join(TRUTH_FILE), truth)?;
    files::save_genes(&dir.join(GENES_FILE), &sim.genes)?;
    files::save_extant(&dir.join(EXTANT_FILE), &sim.extant())?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub params: SimParams,
    pub truth_sizes: Vec<usize>,
    pub report: ReportFile,
    pub audit: HyperedgeAudit,
    /// (symbols checked, symbols the true couple does not carry)
    pub soundness: (usize, usize),
    pub recon_depth: usize,
    pub stopped_at: Option<usize>,
    pub elapsed: Duration,
}

/// One full run. When `out` is given, every artifact is written there
/// exactly as the separate commands would write it.
pub fn run_pipeline(params: &SimParams, cfg: &ReconConfig, out: Option<&Path>) -> Result<RunOutcome, ExperimentError> {
    let start = Instant::now();
    let sim = simulate(params)?;
    let truth = couple_transform(&sim.pedigree)?;
    let extant = sim.extant();
    if let Some(dir) = out {
        write_simulation(dir, &sim, &truth)?;
    }
    let cfg = ReconConfig {
        record_hyperedges: true,
        ..cfg.clone()
    };
    let recon: ReconPedigree = rec_gen(&extant, &cfg)?;
    let m = match_to_truth(&recon.pedigree, &truth)?;
    let audit = hyperedge_audit(&recon, &m, &truth);
    let soundness = symbol_soundness(&recon, &m, &truth, &sim.genes);
    let report = evaluate(&recon.pedigree, &truth, cfg.d)?;
    if let Some(dir) = out {
        files::save_recon(&dir.join(RECON_FILE), &recon)?;
        files::save_report(&dir.join(REPORT_FILE), &report)?;
    }
    Ok(RunOutcome {
        params: params.clone(),
        truth_sizes: truth.level_sizes(),
        report,
        audit,
        soundness,
        recon_depth: recon.depth(),
        stopped_at: recon.stopped_at,
        elapsed: start.elapsed(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub founders: usize,
    pub alphas: Vec<f64>,
    pub generations: usize,
    pub blocks: usize,
    pub seeds: Vec<u64>,
    pub variant: GeneratorVariant,
    pub recon: ReconConfig,
    /// Per-run artifacts go to `out/alpha-<a>-seed-<s>/` when set.
    pub out: Option<PathBuf>,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.alphas.is_empty() || self.seeds.is_empty() {
            return Err(ExperimentError::InvalidSweep("the grid has no points".into()));
        }
        self.recon.validate()?;
        for &a in &self.alphas {
            SimParams::new(self.founders, a, self.generations, self.blocks, 0).validate()?;
        }
        Ok(())
    }

    pub fn run_dir(&self, alpha: f64, seed: u64) -> Option<PathBuf> {
        self.out.as_ref().map(|o| o.join(format!("alpha-{alpha}-seed-{seed}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RowSummary {
    /// Recovery per level, extant level first.
    pub recovery: Vec<f64>,
    pub awesome_coverage: Vec<f64>,
    pub induced: bool,
    pub false_edges: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub seed: u64,
    pub outcome: Result<RowSummary, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub alpha: f64,
    pub runs: usize,
    pub failed: usize,
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
}

/// Runs every (alpha, seed) pair. A failing run is recorded on its row
/// and the sweep moves on.
pub fn run_sweep(grid: &SweepGrid) -> Result<Vec<SweepRow>, ExperimentError> {
    grid.validate()?;
    let points: Vec<(f64, u64)> = grid
        .alphas
        .iter()
        .flat_map(|&a| grid.seeds.iter().map(move |&s| (a, s)))
        .collect();
    Ok(par::map_slice(&points, |&(alpha, seed)| {
        let params = SimParams::new(grid.founders, alpha, grid.generations, grid.blocks, seed).with_variant(grid.variant);
        let dir = grid.run_dir(alpha, seed);
        let outcome = run_pipeline(&params, &grid.recon, dir.as_deref())
            .map(|o| {
                info!("alpha {alpha} seed {seed}: done in {:.1?}", o.elapsed);
                RowSummary {
                    recovery: o.report.report.levels.iter().map(|l| l.recovery).collect(),
                    awesome_coverage: o.report.report.levels.iter().map(|l| l.awesome_coverage).collect(),
                    induced: o.report.report.induced,
                    false_edges: o.audit.false_edges + o.audit.unmapped,
                    seconds: o.elapsed.as_secs_f64(),
                }
            })
            .map_err(|e| {
                warn!("alpha {alpha} seed {seed}: {e}");
                e.to_string()
            });
        SweepRow { alpha, seed, outcome }
    }))
}

/// Mean and standard error of recovery per level for each alpha, over the
/// runs that completed.
pub fn aggregate(rows: &[SweepRow]) -> Vec<SweepPoint> {
    let mut alphas: Vec<f64> = Vec::new();
    for r in rows {
        if !alphas.contains(&r.alpha) {
            alphas.push(r.alpha);
        }
    }
    alphas
        .into_iter()
        .map(|alpha| {
            let mine: Vec<&SweepRow> = rows.iter().filter(|r| r.alpha == alpha).collect();
            let ok: Vec<&RowSummary> = mine.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
            let levels = ok.iter().map(|s| s.recovery.len()).max().unwrap_or(0);
            let (mut mean, mut se) = (Vec::new(), Vec::new());
            for t in 0..levels {
                let xs: Vec<f64> = ok.iter().map(|s| s.recovery.get(t).copied().unwrap_or(0.0)).collect();
                let (m, e) = mean_se(&xs);
                mean.push(m);
                se.push(e);
            }
            SweepPoint {
                alpha,
                runs: mine.len(),
                failed: mine.len() - ok.len(),
                mean,
                se,
            }
        })
        .collect()
}

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Tab-separated per-run rows followed by the aggregated table.
pub fn write_sweep_table(w: &mut impl Write, rows: &[SweepRow]) -> io::Result<()> {
    let levels = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok())
        .map(|s| s.recovery.len())
        .max()
        .unwrap_or(0);
    write!(w, "alpha\tseed\tstatus\tinduced\tfalse_edges\tseconds")?;
    for t in 0..levels {
        write!(w, "\trecovery_{t}")?;
    }
    writeln!(w)?;
    for r in rows {
        match &r.outcome {
            Ok(s) => {
                write!(w, "{}\t{}\tok\t{}\t{}\t{:.2}", r.alpha, r.seed, s.induced, s.false_edges, s.seconds)?;
                for x in &s.recovery {
                    write!(w, "\t{x:.4}")?;
                }
                writeln!(w)?;
            }
            Err(e) => writeln!(w, "{}\t{}\terror: {}", r.alpha, r.seed, e.replace(['\t', '\n'], " "))?,
        }
    }
    writeln!(w)?;
    write!(w, "alpha\truns\tfailed")?;
    for t in 0..levels {
        write!(w, "\tmean_{t}\tse_{t}")?;
    }
    writeln!(w)?;
    for p in aggregate(rows) {
        write!(w, "{}\t{}\t{}", p.alpha, p.runs, p.failed)?;
        for (m, e) in p.mean.iter().zip(&p.se) {
            write!(w, "\t{m:.4}\t{e:.4}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}
