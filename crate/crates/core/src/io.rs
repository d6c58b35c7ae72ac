//! Line-oriented text formats for pedigrees, sequence tables,
//! reconstructions and evaluation reports.
//!
//! Every file starts with `pedrecon-<kind> <version>`. Blank lines and
//! lines starting with `#` are ignored on input. Missing symbols are
//! written as `-`.

use std::fmt::Display;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::eval::{LevelReport, ReconReport};
use crate::genmodel::{ExtantData, GeneAssignment};
use crate::pedigree::{CoupledPedigree, NodeId, NodeLabel, Symbol, NO_SYMBOL};
use crate::recgen::{LevelDiagnostics, ReconPedigree, SymbolTable};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl IoError {
    fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;

/// An evaluation report plus one line per failure or violation.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportFile {
    pub report: ReconReport,
    pub details: Vec<String>,
}

struct Lines<R> {
    inner: io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Self { inner: r.lines(), line: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(IoError::Parse {
            line: self.line,
            msg: msg.into(),
        })
    }

    /// Next meaningful line, or `None` at end of input.
    fn next_opt(&mut self) -> Result<Option<String>> {
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l.map_err(|e| IoError::Parse {
                line: self.line,
                msg: e.to_string(),
            })?;
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Ok(Some(t.to_string()));
            }
        }
        Ok(None)
    }

    fn next(&mut self, what: &str) -> Result<String> {
        match self.next_opt()? {
            Some(l) => Ok(l),
            None => {
                self.line += 1;
                self.err(format!("unexpected end of file, expected {what}"))
            }
        }
    }

    fn header(&mut self, kind: &str) -> Result<()> {
        let l = self.next("header")?;
        let want = format!("pedrecon-{kind}");
        let mut it = l.split_whitespace();
        if it.next() != Some(want.as_str()) {
            return self.err(format!("expected a {want} header, found `{l}`"));
        }
        match it.next().map(str::parse::<u32>) {
            Some(Ok(FORMAT_VERSION)) => Ok(()),
            Some(Ok(v)) => self.err(format!("unsupported {kind} format version {v}")),
            _ => self.err("missing format version"),
        }
    }

    /// `key value` line.
    fn keyed<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let l = self.next(key)?;
        let mut it = l.split_whitespace();
        if it.next() != Some(key) {
            return self.err(format!("expected `{key}`, found `{l}`"));
        }
        let v = it.next().ok_or(()).or_else(|_| self.err(format!("`{key}` needs a value")))?;
        self.parse(v)
    }

    fn parse<T: FromStr>(&self, s: &str) -> Result<T> {
        s.parse().or_else(|_| self.err(format!("cannot parse `{s}`")))
    }

    fn fields<'a>(&self, l: &'a str, n: usize) -> Result<Vec<&'a str>> {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != n {
            return self.err(format!("expected {n} fields, found {}", f.len()));
        }
        Ok(f)
    }

    fn finish(&mut self) -> Result<()> {
        match self.next_opt()? {
            Some(l) => self.err(format!("trailing content `{l}`")),
            None => Ok(()),
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| IoError::io(path, e))
}

fn open(path: &Path) -> Result<Lines<BufReader<File>>> {
    File::open(path)
        .map(|f| Lines::new(BufReader::new(f)))
        .map_err(|e| IoError::io(path, e))
}

fn save_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| IoError::io(path, e))
}

fn symbol_token(s: Symbol) -> String {
    if s == NO_SYMBOL {
        "-".into()
    } else {
        s.to_string()
    }
}

fn parse_symbol<R: BufRead>(l: &Lines<R>, s: &str) -> Result<Symbol> {
    if s == "-" {
        Ok(NO_SYMBOL)
    } else {
        l.parse(s)
    }
}

fn write_row(w: &mut impl Write, head: impl Display, symbols: &[Symbol]) -> io::Result<()> {
    write!(w, "{head}")?;
    for &s in symbols {
        write!(w, " {}", symbol_token(s))?;
    }
    writeln!(w)
}

// ---- pedigree ----

fn write_pedigree_body(w: &mut impl Write, q: &CoupledPedigree) -> io::Result<()> {
    writeln!(w, "levels {}", q.depth() + 1)?;
    for t in 0..=q.depth() {
        writeln!(w, "level {t} {}", q.level_len(t))?;
        for v in q.level(t) {
            match q.label(v) {
                NodeLabel::Extant(id) => writeln!(w, "extant {id}")?,
                NodeLabel::Couple(a, b) => writeln!(w, "couple {a} {b}")?,
                NodeLabel::Inferred => writeln!(w, "inferred")?,
            }
        }
    }
    writeln!(w, "edges {}", q.edge_count())?;
    for (p, c, m) in q.edges() {
        writeln!(w, "{} {} {m}", p.0, c.0)?;
    }
    Ok(())
}

fn read_pedigree_body<R: BufRead>(l: &mut Lines<R>) -> Result<CoupledPedigree> {
    let levels: usize = l.keyed("levels")?;
    if levels == 0 {
        return l.err("a pedigree needs at least one level");
    }
    let mut sizes = Vec::with_capacity(levels);
    let mut labels = Vec::new();
    for t in 0..levels {
        let line = l.next("level header")?;
        let f = l.fields(&line, 3)?;
        if f[0] != "level" || l.parse::<usize>(f[1])? != t {
            return l.err(format!("expected `level {t} <size>`"));
        }
        let n: usize = l.parse(f[2])?;
        sizes.push(n);
        for _ in 0..n {
            let line = l.next("node label")?;
            let f: Vec<&str> = line.split_whitespace().collect();
            labels.push(match f.as_slice() {
                ["extant", id] => NodeLabel::Extant(l.parse(id)?),
                ["couple", a, b] => {
                    let (a, b): (u32, u32) = (l.parse(a)?, l.parse(b)?);
                    if a >= b {
                        return l.err("couple ids must be written as (min, max)");
                    }
                    NodeLabel::Couple(a, b)
                }
                ["inferred"] => NodeLabel::Inferred,
                _ => return l.err(format!("bad node label `{line}`")),
            });
        }
    }
    let count: usize = l.keyed("edges")?;
    let mut edges = Vec::with_capacity(count);
    for _ in 0..count {
        let line = l.next("edge")?;
        let f = l.fields(&line, 3)?;
        edges.push((NodeId(l.parse(f[0])?), NodeId(l.parse(f[1])?), l.parse::<u8>(f[2])?));
    }
    CoupledPedigree::from_edges(&sizes, labels, &edges).or_else(|e| l.err(e.to_string()))
}

pub fn save_pedigree(path: &Path, q: &CoupledPedigree) -> Result<()> {
    save_with(path, |w| {
        writeln!(w, "pedrecon-pedigree {FORMAT_VERSION}")?;
        write_pedigree_body(w, q)
    })
}

pub fn read_pedigree(r: impl BufRead) -> Result<CoupledPedigree> {
    let mut l = Lines::new(r);
    l.header("pedigree")?;
    let q = read_pedigree_body(&mut l)?;
    l.finish()?;
    Ok(q)
}

pub fn load_pedigree(path: &Path) -> Result<CoupledPedigree> {
    let mut l = open(path)?;
    l.header("pedigree")?;
    let q = read_pedigree_body(&mut l)?;
    l.finish()?;
    Ok(q)
}

// ---- sequence tables ----

fn write_table(w: &mut impl Write, blocks: usize, rows: impl ExactSizeIterator<Item = (u32, Vec<Symbol>)>) -> io::Result<()> {
    writeln!(w, "pedrecon-extant {FORMAT_VERSION}")?;
    writeln!(w, "blocks {blocks}")?;
    writeln!(w, "rows {}", rows.len())?;
    for (id, s) in rows {
        write_row(w, id, &s)?;
    }
    Ok(())
}

fn read_table<R: BufRead>(mut l: Lines<R>) -> Result<ExtantData> {
    l.header("extant")?;
    let blocks: usize = l.keyed("blocks")?;
    let n: usize = l.keyed("rows")?;
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let line = l.next("sequence row")?;
        let mut it = line.split_whitespace();
        let id: u32 = l.parse(it.next().unwrap_or_default())?;
        let syms: Vec<Symbol> = it.map(|s| l.parse(s)).collect::<Result<_>>()?;
        if syms.len() != blocks {
            return l.err(format!("individual {id} has {} symbols, expected {blocks}", syms.len()));
        }
        rows.push((id, syms));
    }
    l.finish()?;
    ExtantData::new(blocks, rows).or_else(|e| l.err(e))
}

pub fn save_extant(path: &Path, e: &ExtantData) -> Result<()> {
    save_with(path, |w| {
        write_table(w, e.block_count(), (0..e.len()).map(|r| (e.ids()[r], e.row(r).to_vec())))
    })
}

pub fn read_extant(r: impl BufRead) -> Result<ExtantData> {
    read_table(Lines::new(r))
}

pub fn load_extant(path: &Path) -> Result<ExtantData> {
    read_table(open(path)?)
}

/// The full assignment is stored as a table over every individual.
pub fn save_genes(path: &Path, g: &GeneAssignment) -> Result<()> {
    save_with(path, |w| {
        write_table(w, g.block_count(), (0..g.len() as u32).map(|id| (id, g.sequence(id).to_vec())))
    })
}

pub fn load_genes(path: &Path) -> Result<GeneAssignment> {
    let t = load_extant(path)?;
    if t.ids().iter().enumerate().any(|(i, &id)| id as usize != i) {
        return Err(IoError::Parse {
            line: 3,
            msg: "gene table must list individuals 0..n without gaps".into(),
        });
    }
    let flat = (0..t.len()).flat_map(|r| t.row(r).iter().copied()).collect();
    Ok(GeneAssignment::from_flat(t.block_count(), flat))
}

// ---- reconstruction ----

pub fn save_recon(path: &Path, r: &ReconPedigree) -> Result<()> {
    save_with(path, |w| {
        writeln!(w, "pedrecon-recon {FORMAT_VERSION}")?;
        write_pedigree_body(w, &r.pedigree)?;
        match r.stopped_at {
            Some(k) => writeln!(w, "stopped {k}")?,
            None => writeln!(w, "stopped none")?,
        }
        let blocks = r.recovered.first().map_or(0, SymbolTable::block_count);
        writeln!(w, "recovered {} {blocks}", r.recovered.len())?;
        for (i, table) in r.recovered.iter().enumerate() {
            writeln!(w, "table {} {}", i + 1, table.rows())?;
            for row in 0..table.rows() {
                write_row(w, row, table.row(row))?;
            }
        }
        writeln!(w, "diagnostics {}", r.diagnostics.len())?;
        for d in &r.diagnostics {
            writeln!(
                w,
                "diag {} {} {} {} {} {} {} {} {} {} {} {}",
                d.level,
                d.nodes,
                d.vertices,
                d.mean_full_fraction,
                d.candidate_pairs,
                d.hyperedges,
                d.cliques,
                d.large_cliques,
                d.parents_created,
                d.skipped_members,
                d.dropped_cliques,
                d.hyperedge_list.len()
            )?;
            for t in &d.hyperedge_list {
                writeln!(w, "{} {} {}", t[0].0, t[1].0, t[2].0)?;
            }
        }
        Ok(())
    })
}

fn read_recon<R: BufRead>(mut l: Lines<R>) -> Result<ReconPedigree> {
    l.header("recon")?;
    let pedigree = read_pedigree_body(&mut l)?;
    let line = l.next("stopped")?;
    let f = l.fields(&line, 2)?;
    if f[0] != "stopped" {
        return l.err("expected `stopped`");
    }
    let stopped_at = if f[1] == "none" { None } else { Some(l.parse(f[1])?) };

    let line = l.next("recovered")?;
    let f = l.fields(&line, 3)?;
    if f[0] != "recovered" {
        return l.err("expected `recovered <tables> <blocks>`");
    }
    let (tables, blocks): (usize, usize) = (l.parse(f[1])?, l.parse(f[2])?);
    if tables > pedigree.depth() {
        return l.err("more recovered tables than levels above the extant one");
    }
    let mut recovered = Vec::with_capacity(tables);
    for t in 1..=tables {
        let line = l.next("table header")?;
        let f = l.fields(&line, 3)?;
        if f[0] != "table" || l.parse::<usize>(f[1])? != t {
            return l.err(format!("expected `table {t} <rows>`"));
        }
        let rows: usize = l.parse(f[2])?;
        if rows != pedigree.level_len(t) {
            return l.err(format!("table {t} has {rows} rows but level {t} has {}", pedigree.level_len(t)));
        }
        let mut data = Vec::with_capacity(rows * blocks * 2);
        for row in 0..rows {
            let line = l.next("recovered row")?;
            let f = l.fields(&line, 1 + 2 * blocks)?;
            if l.parse::<usize>(f[0])? != row {
                return l.err(format!("expected row {row}"));
            }
            for s in &f[1..] {
                data.push(parse_symbol(&l, s)?);
            }
        }
        recovered.push(SymbolTable::new(2, blocks, data));
    }

    let n: usize = l.keyed("diagnostics")?;
    let mut diagnostics = Vec::with_capacity(n);
    for _ in 0..n {
        let line = l.next("diag")?;
        let f = l.fields(&line, 13)?;
        if f[0] != "diag" {
            return l.err("expected `diag`");
        }
        let u = |i: usize| l.parse::<usize>(f[i]);
        let mut d = LevelDiagnostics {
            level: u(1)?,
            nodes: u(2)?,
            vertices: u(3)?,
            mean_full_fraction: l.parse(f[4])?,
            candidate_pairs: u(5)?,
            hyperedges: u(6)?,
            cliques: u(7)?,
            large_cliques: u(8)?,
            parents_created: u(9)?,
            skipped_members: u(10)?,
            dropped_cliques: u(11)?,
            hyperedge_list: Vec::new(),
        };
        for _ in 0..u(12)? {
            let line = l.next("hyperedge")?;
            let f = l.fields(&line, 3)?;
            d.hyperedge_list.push([NodeId(l.parse(f[0])?), NodeId(l.parse(f[1])?), NodeId(l.parse(f[2])?)]);
        }
        diagnostics.push(d);
    }
    l.finish()?;
    Ok(ReconPedigree {
        pedigree,
        recovered,
        diagnostics,
        stopped_at,
    })
}

pub fn read_recon_from(r: impl BufRead) -> Result<ReconPedigree> {
    read_recon(Lines::new(r))
}

pub fn load_recon(path: &Path) -> Result<ReconPedigree> {
    read_recon(open(path)?)
}

// ---- report ----

const REPORT_COLUMNS: &str = "level truth_nodes recon_nodes matched recovery awesome awesome_covered awesome_coverage";

pub fn write_report(w: &mut impl Write, r: &ReportFile) -> io::Result<()> {
    let rep = &r.report;
    writeln!(w, "pedrecon-report {FORMAT_VERSION}")?;
    writeln!(w, "induced {}", rep.induced)?;
    writeln!(w, "failures {}", rep.failures)?;
    writeln!(w, "violations {}", rep.violations)?;
    writeln!(w, "levels {}", rep.levels.len())?;
    writeln!(w, "# {REPORT_COLUMNS}")?;
    for x in &rep.levels {
        writeln!(
            w,
            "{} {} {} {} {} {} {} {}",
            x.level, x.truth_nodes, x.recon_nodes, x.matched, x.recovery, x.awesome, x.awesome_covered, x.awesome_coverage
        )?;
    }
    writeln!(w, "details {}", r.details.len())?;
    for d in &r.details {
        writeln!(w, "{}", d.replace('\n', " "))?;
    }
    Ok(())
}

pub fn save_report(path: &Path, r: &ReportFile) -> Result<()> {
    save_with(path, |w| write_report(w, r))
}

fn read_report<R: BufRead>(mut l: Lines<R>) -> Result<ReportFile> {
    l.header("report")?;
    let induced: bool = l.keyed("induced")?;
    let failures: usize = l.keyed("failures")?;
    let violations: usize = l.keyed("violations")?;
    let n: usize = l.keyed("levels")?;
    let mut levels = Vec::with_capacity(n);
    for _ in 0..n {
        let line = l.next("level row")?;
        let f = l.fields(&line, 8)?;
        let u = |i: usize| l.parse::<usize>(f[i]);
        levels.push(LevelReport {
            level: u(0)?,
            truth_nodes: u(1)?,
            recon_nodes: u(2)?,
            matched: u(3)?,
            recovery: l.parse(f[4])?,
            awesome: u(5)?,
            awesome_covered: u(6)?,
            awesome_coverage: l.parse(f[7])?,
        });
    }
    let n: usize = l.keyed("details")?;
    let mut details = Vec::with_capacity(n);
    for _ in 0..n {
        details.push(l.next("detail line")?);
    }
    l.finish()?;
    Ok(ReportFile {
        report: ReconReport {
            levels,
            induced,
            failures,
            violations,
        },
        details,
    })
}

pub fn load_report(path: &Path) -> Result<ReportFile> {
    read_report(open(path)?)
}
