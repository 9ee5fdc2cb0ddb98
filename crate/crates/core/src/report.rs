//! Audit reports, sweep trajectories and process exit codes.
//!
//! JSON reports have a fixed key layout:
//!
//! ```text
//! meta      tool, version, source, mode, records, smoothing, units,
//!           solver_config, alphabets, warnings
//! gaps      sp, eo, pp, dataset_mi
//! pid       uni_pred, uni_label, red, syn
//! theorems  t1 .. t5, each {premise, holds, margin}
//! solver    iters, gap, converged
//! ```
//!
//! Measured quantities are written with exactly six decimals. In
//! dataset-only mode `gaps.sp`, `gaps.eo`, `gaps.pp`, `pid`, `theorems`
//! and `solver` are `null`.
//!
//! Sweep CSV columns are the sweep parameters (`rho,q` for
//! `markov_sweep`, `sample` for `sp_zero_family`) followed by
//! `sp_gap,eo_gap,pp_gap,uni_pred,uni_label,red,syn,dataset_mi`, with
//! twelve decimals.

use std::fmt::{self, Write as _};
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::dist::{mutual_information, JointDist, Units, Var};
use crate::error::{Error, Result};
use crate::fairness::{audit, FairnessAudit, TheoremVerdict};
use crate::pid::{blackwell_check, unique_information, MarginalPolytope, SolverConfig};
use crate::scenario::{generate_scenario, ScenarioSpec};

pub const TOOL_NAME: &str = "fairpid";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// Output could not be written.
    pub const IO: i32 = 1;
    pub const INGESTION: i32 = 2;
    pub const NON_CONVERGENCE: i32 = 3;
    pub const THEOREM_BREACH: i32 = 4;
    pub const SPEC: i32 = 5;
}

/// Exit code for a failed run.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::Ingest { .. } | Error::IngestFile(_) | Error::Estimation(_) | Error::InvalidDistribution(_) => {
            exit::INGESTION
        }
        Error::InvalidArgument(_) | Error::UnsupportedShape(_) | Error::Scenario(_) | Error::Json(_) => exit::SPEC,
        Error::Io(_) => exit::IO,
    }
}

/// A number serialized with exactly six decimals. The stored value is
/// already rounded, so parsing the printed form gives it back unchanged.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Fixed6(f64);

impl Fixed6 {
    pub fn new(v: f64) -> Self {
        let rounded: f64 = format!("{v:.6}").parse().expect("formatted float parses");
        // -0.000000 would otherwise survive as negative zero.
        Self(if rounded == 0.0 { 0.0 } else { rounded })
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Fixed6 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&format!("{:.6}", self.0))
    }
}

impl Serialize for Fixed6 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawValue::from_string(self.to_string())
            .map_err(serde::ser::Error::custom)?
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Fixed6 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(deserializer).map(Fixed6::new)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(Error::InvalidArgument(format!("unknown format '{s}'"))),
        }
    }
}

/// Provenance recorded in report metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportOptions {
    pub units: Units,
    /// Free-form description of where the distribution came from.
    pub source: String,
    /// Number of records for empirical inputs.
    pub records: Option<usize>,
    pub smoothing: f64,
    /// Skip the decomposition and report `I(Z;Y)` only.
    pub dataset_only: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfigEcho {
    pub tol: f64,
    pub max_iters: usize,
    pub boundary_eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphabetsEcho {
    pub z: Vec<String>,
    pub yhat: Vec<String>,
    pub y: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub source: String,
    /// `"full"` or `"dataset_only"`.
    pub mode: String,
    pub records: Option<usize>,
    pub smoothing: f64,
    pub units: String,
    pub solver_config: SolverConfigEcho,
    pub alphabets: AlphabetsEcho,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapsSection {
    pub sp: Option<Fixed6>,
    pub eo: Option<Fixed6>,
    pub pp: Option<Fixed6>,
    pub dataset_mi: Fixed6,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PidSection {
    /// `Uni(Z : Ŷ | Y)`.
    pub uni_pred: Fixed6,
    /// `Uni(Z : Y | Ŷ)`.
    pub uni_label: Fixed6,
    pub red: Fixed6,
    pub syn: Fixed6,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremEntry {
    pub premise: bool,
    pub holds: bool,
    pub margin: Fixed6,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremsSection {
    pub t1: TheoremEntry,
    pub t2: TheoremEntry,
    pub t3: TheoremEntry,
    pub t4: TheoremEntry,
    pub t5: TheoremEntry,
}

impl TheoremsSection {
    pub fn entries(&self) -> [(&'static str, &TheoremEntry); 5] {
        [("t1", &self.t1), ("t2", &self.t2), ("t3", &self.t3), ("t4", &self.t4), ("t5", &self.t5)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSection {
    /// Iterations summed over both unique-information solves.
    pub iters: usize,
    /// Larger of the two certified gaps.
    pub gap: Fixed6,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub meta: Meta,
    pub gaps: GapsSection,
    pub pid: Option<PidSection>,
    pub theorems: Option<TheoremsSection>,
    pub solver: Option<SolverSection>,
}

impl AuditReport {
    pub fn converged(&self) -> bool {
        self.solver.as_ref().is_none_or(|s| s.converged)
    }

    /// Names of theorem checks whose conclusion failed.
    pub fn breaches(&self) -> Vec<&'static str> {
        self.theorems
            .as_ref()
            .map(|t| t.entries().into_iter().filter(|(_, e)| !e.holds).map(|(k, _)| k).collect())
            .unwrap_or_default()
    }

    /// Exit code for a completed audit: non-convergence outranks a breach.
    pub fn exit_code(&self) -> i32 {
        if !self.converged() {
            exit::NON_CONVERGENCE
        } else if !self.breaches().is_empty() {
            exit::THEOREM_BREACH
        } else {
            exit::SUCCESS
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let m = &self.meta;
        let mut out = String::new();
        let opt = |v: Option<Fixed6>| v.map_or_else(|| "-".to_owned(), |x| x.to_string());
        let _ = writeln!(out, "{} {}", m.tool, m.version);
        let _ = writeln!(out, "source     {}", m.source);
        let _ = writeln!(out, "mode       {}", m.mode);
        if let Some(n) = m.records {
            let _ = writeln!(out, "records    {n}");
        }
        let _ = writeln!(out, "smoothing  {}", m.smoothing);
        let _ = writeln!(out, "units      {}", m.units);
        for w in &m.warnings {
            let _ = writeln!(out, "warning    {w}");
        }
        let _ = writeln!(out, "\ngaps");
        let _ = writeln!(out, "  {:<12}{:>12}", "sp", opt(self.gaps.sp));
        let _ = writeln!(out, "  {:<12}{:>12}", "eo", opt(self.gaps.eo));
        let _ = writeln!(out, "  {:<12}{:>12}", "pp", opt(self.gaps.pp));
        let _ = writeln!(out, "  {:<12}{:>12}", "dataset_mi", self.gaps.dataset_mi);
        if let Some(p) = &self.pid {
            let _ = writeln!(out, "\npid");
            for (k, v) in [("uni_pred", p.uni_pred), ("uni_label", p.uni_label), ("red", p.red), ("syn", p.syn)] {
                let _ = writeln!(out, "  {k:<12}{v:>12}");
            }
        }
        if let Some(t) = &self.theorems {
            let _ = writeln!(out, "\n  {:<6}{:<10}{:<8}{:>12}", "check", "premise", "holds", "margin");
            for (k, e) in t.entries() {
                let _ = writeln!(
                    out,
                    "  {:<6}{:<10}{:<8}{:>12}",
                    k,
                    if e.premise { "held" } else { "not held" },
                    if e.holds { "yes" } else { "NO" },
                    e.margin
                );
            }
        }
        if let Some(s) = &self.solver {
            let _ = writeln!(out, "\nsolver");
            let _ = writeln!(out, "  {:<12}{:>12}", "iters", s.iters);
            let _ = writeln!(out, "  {:<12}{:>12}", "gap", s.gap);
            let _ = writeln!(out, "  {:<12}{:>12}", "converged", s.converged);
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

fn entry(v: &TheoremVerdict, units: Units) -> TheoremEntry {
    TheoremEntry {
        premise: v.premise,
        holds: v.holds,
        margin: Fixed6::new(units.from_bits(v.margin)),
    }
}

fn meta(dist: &JointDist, cfg: &SolverConfig, opts: &ReportOptions) -> Meta {
    let labels = |v: Var| dist.alphabet(v).symbols().to_vec();
    Meta {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        source: opts.source.clone(),
        mode: if opts.dataset_only { "dataset_only" } else { "full" }.into(),
        records: opts.records,
        smoothing: opts.smoothing,
        units: opts.units.name().into(),
        solver_config: SolverConfigEcho {
            tol: cfg.tol,
            max_iters: cfg.max_iters,
            boundary_eps: cfg.boundary_eps,
        },
        alphabets: AlphabetsEcho {
            z: labels(Var::Z),
            yhat: labels(Var::Yhat),
            y: labels(Var::Y),
        },
        warnings: opts.warnings.clone(),
    }
}

/// Builds the report for an audit that has already been run.
pub fn report_from_audit(dist: &JointDist, a: &FairnessAudit, cfg: &SolverConfig, opts: &ReportOptions) -> AuditReport {
    let u = |v: f64| Fixed6::new(opts.units.from_bits(v));
    let t = &a.theorems;
    AuditReport {
        meta: meta(dist, cfg, &ReportOptions { dataset_only: false, ..opts.clone() }),
        gaps: GapsSection {
            sp: Some(u(a.gaps.sp_gap)),
            eo: Some(u(a.gaps.eo_gap)),
            pp: Some(u(a.gaps.pp_gap)),
            dataset_mi: u(a.gaps.dataset_mi),
        },
        pid: Some(PidSection {
            uni_pred: u(a.pid.uni_a),
            uni_label: u(a.pid.uni_b),
            red: u(a.pid.red),
            syn: u(a.pid.syn),
        }),
        theorems: Some(TheoremsSection {
            t1: entry(&t.t1, opts.units),
            t2: entry(&t.t2, opts.units),
            t3: entry(&t.t3, opts.units),
            t4: entry(&t.t4, opts.units),
            t5: entry(&t.t5, opts.units),
        }),
        solver: Some(SolverSection {
            iters: a.pid.iterations(),
            gap: u(a.pid.max_gap()),
            converged: a.pid.converged(),
        }),
    }
}

/// Audits `dist` and assembles its report. In dataset-only mode only
/// `I(Z;Y)` is computed.
pub fn run_audit(dist: &JointDist, cfg: &SolverConfig, opts: &ReportOptions) -> Result<AuditReport> {
    if opts.dataset_only {
        let mi = mutual_information(dist, Var::Z, Var::Y)?;
        return Ok(AuditReport {
            meta: meta(dist, cfg, opts),
            gaps: GapsSection {
                sp: None,
                eo: None,
                pp: None,
                dataset_mi: Fixed6::new(opts.units.from_bits(mi)),
            },
            pid: None,
            theorems: None,
            solver: None,
        });
    }
    let a = audit(dist, cfg)?;
    Ok(report_from_audit(dist, &a, cfg, opts))
}

/// One audited sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: Vec<(String, f64)>,
    pub dist: JointDist,
    pub audit: FairnessAudit,
}

/// Generates and audits every point of a sweep scenario, in parallel.
/// Rows come back in sweep order.
pub fn sweep_rows(spec: &ScenarioSpec, cfg: &SolverConfig) -> Result<Vec<SweepRow>> {
    if !spec.kind.is_sweep() {
        return Err(Error::Scenario(format!("{} is not a sweep kind", spec.kind)));
    }
    cfg.validate()?;
    let points = generate_scenario(spec)?;
    points
        .into_par_iter()
        .map(|p| {
            let audit = audit(&p.dist, cfg)?;
            Ok(SweepRow {
                params: p.params,
                dist: p.dist,
                audit,
            })
        })
        .collect()
}

fn fixed12(v: f64) -> String {
    let s = format!("{v:.12}");
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_owned()
    } else {
        s
    }
}

/// Writes sweep rows as CSV with a header line.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], units: Units, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    if let Some(first) = rows.first() {
        let mut header: Vec<&str> = first.params.iter().map(|(k, _)| k.as_str()).collect();
        header.extend(SWEEP_COLUMNS);
        w.write_record(&header).map_err(csv_err)?;
    }
    for r in rows {
        let g = &r.audit.gaps;
        let p = &r.audit.pid;
        let mut fields: Vec<String> = r.params.iter().map(|(_, v)| format!("{v}")).collect();
        fields.extend(
            [g.sp_gap, g.eo_gap, g.pp_gap, p.uni_a, p.uni_b, p.red, p.syn, g.dataset_mi]
                .map(|v| fixed12(units.from_bits(v))),
        );
        w.write_record(&fields).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Measurement columns of a sweep CSV, after the parameter columns.
pub const SWEEP_COLUMNS: [&str; 8] = [
    "sp_gap",
    "eo_gap",
    "pp_gap",
    "uni_pred",
    "uni_label",
    "red",
    "syn",
    "dataset_mi",
];

/// Runs a sweep and writes its CSV trajectory to `out`.
pub fn run_sweep<W: Write>(spec: &ScenarioSpec, cfg: &SolverConfig, units: Units, out: W) -> Result<Vec<SweepRow>> {
    let rows = sweep_rows(spec, cfg)?;
    write_sweep_csv(&rows, units, out)?;
    Ok(rows)
}

/// Exit code summarizing a sweep: non-convergence anywhere outranks a
/// breach anywhere.
pub fn sweep_exit_code(rows: &[SweepRow]) -> i32 {
    if rows.iter().any(|r| !r.audit.pid.converged()) {
        exit::NON_CONVERGENCE
    } else if rows.iter().any(|r| !r.audit.theorems.breached().is_empty()) {
        exit::THEOREM_BREACH
    } else {
        exit::SUCCESS
    }
}

/// Blackwell sufficiency verdict alongside the unique information that it
/// should agree with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlackwellReport {
    pub tool: String,
    pub version: String,
    pub source: String,
    pub units: String,
    pub target: Var,
    pub sufficient: Var,
    pub degraded: Var,
    pub feasible: bool,
    pub residual: f64,
    /// Witness channel, rows labelled by `sufficient_alphabet`.
    pub channel: Option<Vec<Vec<Fixed6>>>,
    pub sufficient_alphabet: Vec<String>,
    pub degraded_alphabet: Vec<String>,
    /// `Uni(Z : degraded | sufficient)`, zero exactly when feasible.
    pub unique_of_degraded: Fixed6,
    pub converged: bool,
}

impl BlackwellReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.tool, self.version);
        let _ = writeln!(out, "source     {}", self.source);
        let _ = writeln!(
            out,
            "{} sufficient for {} w.r.t. {}: {}",
            self.sufficient,
            self.degraded,
            self.target,
            if self.feasible { "yes" } else { "no" }
        );
        let _ = writeln!(out, "residual   {:e}", self.residual);
        let _ = writeln!(
            out,
            "Uni({}:{}|{})  {} {}",
            self.target, self.degraded, self.sufficient, self.unique_of_degraded, self.units
        );
        if let Some(k) = &self.channel {
            let _ = writeln!(out, "\nchannel {} -> {}", self.sufficient, self.degraded);
            let _ = write!(out, "  {:<10}", "");
            for d in &self.degraded_alphabet {
                let _ = write!(out, "{d:>12}");
            }
            out.push('\n');
            for (s, row) in self.sufficient_alphabet.iter().zip(k) {
                let _ = write!(out, "  {s:<10}");
                for v in row {
                    let _ = write!(out, "{v:>12}");
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

/// Tests whether `candidate`'s channel from `Z` is Blackwell sufficient
/// for the other source's channel.
pub fn run_blackwell(
    dist: &JointDist,
    candidate: Var,
    cfg: &SolverConfig,
    units: Units,
    source: &str,
) -> Result<BlackwellReport> {
    let v = blackwell_check(dist, Var::Z, candidate)?;
    let poly = MarginalPolytope::from_dist(dist, Var::Z)?;
    // The polytope's first source is Ŷ; swap when Ŷ is the sufficient one.
    let poly = if v.degraded == Var::Yhat { poly } else { poly.swapped() };
    let uni = unique_information(&poly, cfg)?;
    Ok(BlackwellReport {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        source: source.into(),
        units: units.name().into(),
        target: v.target,
        sufficient: v.sufficient,
        degraded: v.degraded,
        feasible: v.feasible,
        residual: v.residual,
        channel: v
            .channel
            .map(|k| k.into_iter().map(|row| row.into_iter().map(Fixed6::new).collect()).collect()),
        sufficient_alphabet: v.sufficient_alphabet.symbols().to_vec(),
        degraded_alphabet: v.degraded_alphabet.symbols().to_vec(),
        unique_of_degraded: Fixed6::new(units.from_bits(if uni.objective <= cfg.tol { 0.0 } else { uni.objective })),
        converged: uni.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed6_prints_six_decimals_and_drops_negative_zero() {
        assert_eq!(Fixed6::new(0.5310044).to_string(), "0.531004");
        assert_eq!(Fixed6::new(-1e-9).to_string(), "0.000000");
        assert_eq!(Fixed6::new(1.0).to_string(), "1.000000");
        assert_eq!(serde_json::to_string(&Fixed6::new(2.0)).unwrap(), "2.000000");
    }

    #[test]
    fn fixed6_round_trips() {
        for v in [0.1234565, 3.0, 1e-7, -0.25, 123456.7890123] {
            let x = Fixed6::new(v);
            let back: Fixed6 = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
            assert_eq!(back, x);
        }
    }

    #[test]
    fn fixed12_normalizes_zero() {
        assert_eq!(fixed12(-1e-15), "0.000000000000");
        assert_eq!(fixed12(-0.5), "-0.500000000000");
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            error_exit_code(&Error::IngestFile(String::new())),
            error_exit_code(&Error::Scenario(String::new())),
            error_exit_code(&Error::Io(std::io::Error::other("x"))),
            exit::NON_CONVERGENCE,
            exit::THEOREM_BREACH,
            exit::SUCCESS,
        ];
        let set: std::collections::BTreeSet<i32> = codes.into_iter().collect();
        assert_eq!(set.len(), codes.len());
    }
}
