// SPDX-License-Identifier: Apache-2.0

use std::io::Write;

use ccp_core::bounds::{
    classical_error_estimate, p1_success_bound, pe_success_bound, scaling_errors, scaling_slopes,
    BoundReport, ScalingSlopes,
};
use ccp_core::experiment::{
    experiment_instance, load_table2, load_table2_from_path, reproduce_report_from, ReproReport,
};
use ccp_core::model::{sample_assignment, AssignmentDoc, CcpInstance, InputAssignment};
use ccp_core::protocols::{
    crossover_eta, efficiency_adjusted_success, exact_success, measurement_count, run_batch,
    trial_rng, worst_case_success, BatchSpec, ClassicalStrategy, EfficiencyModel, Evaluation,
};
use ccp_core::ProtocolKind;
use serde::Serialize;

use crate::args::{
    EfficiencyArgs, ExactArgs, GlobalArgs, IdealBasis, MonteCarloArgs, ScalingArgs, Table2Args,
    Vary,
};
use crate::error::CliError;
use crate::output::{write_csv, write_json};

/// Instance flags the user typed explicitly.
#[derive(Debug, Default, Clone, Copy)]
pub struct Explicit {
    pub n: bool,
    pub m: bool,
    pub d: bool,
    pub mu: bool,
}

impl Explicit {
    fn check(&self, g: &GlobalArgs, inst: &CcpInstance, source: &str) -> Result<(), CliError> {
        let clashes: Vec<String> = [
            (
                self.n && g.n != inst.n(),
                format!("--N {} vs N={}", g.n, inst.n()),
            ),
            (
                self.m && g.m != inst.m(),
                format!("--M {} vs M={}", g.m, inst.m()),
            ),
            (
                self.d && g.d != inst.d(),
                format!("--d {} vs d={}", g.d, inst.d()),
            ),
            (
                self.mu && g.mu != inst.mu(),
                format!("--mu {} vs mu={}", g.mu, inst.mu()),
            ),
        ]
        .into_iter()
        .filter_map(|(clash, msg)| clash.then_some(msg))
        .collect();
        if clashes.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(format!(
                "instance flags disagree with {source}: {}",
                clashes.join(", ")
            )))
        }
    }
}

fn global_instance(g: &GlobalArgs) -> Result<CcpInstance, CliError> {
    Ok(CcpInstance::new(g.n, g.m, g.d, g.mu)?)
}

fn note_strings(inst: &CcpInstance) -> Vec<String> {
    inst.notes().iter().map(ToString::to_string).collect()
}

#[derive(Debug, Serialize)]
pub struct ExactRecord {
    pub label: String,
    pub assignment: Option<AssignmentDoc>,
    pub ground_truth: Option<usize>,
    pub classical: f64,
    #[serde(rename = "PE")]
    pub pe: f64,
    #[serde(rename = "P1")]
    pub p1: f64,
    #[serde(rename = "P2")]
    pub p2: f64,
}

#[derive(Debug, Serialize)]
pub struct ExactReport {
    pub instance: CcpInstance,
    pub notes: Vec<String>,
    pub bounds: BoundReport,
    pub rows: Vec<ExactRecord>,
}

#[derive(Debug, Serialize)]
struct ExactCsvRow<'a> {
    label: &'a str,
    #[serde(rename = "N")]
    n: u64,
    #[serde(rename = "M")]
    m: usize,
    d: usize,
    mu: u64,
    assignment: Option<String>,
    ground_truth: Option<usize>,
    classical: f64,
    #[serde(rename = "PE")]
    pe: f64,
    #[serde(rename = "P1")]
    p1: f64,
    #[serde(rename = "P2")]
    p2: f64,
    #[serde(rename = "bound_PE")]
    bound_pe: f64,
    #[serde(rename = "bound_P1")]
    bound_p1: f64,
    classical_error_estimate: f64,
    #[serde(rename = "worst_P1")]
    worst_p1: f64,
    #[serde(rename = "worst_P2")]
    worst_p2: f64,
}

fn read_assignment(arg: &str) -> Result<AssignmentDoc, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| CliError::Io(format!("cannot read assignment {arg}: {e}")))?
    };
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("malformed assignment JSON: {e}")))
}

fn exact_record(label: String, a: &InputAssignment, notes: &mut Vec<String>) -> ExactRecord {
    let s = ClassicalStrategy::default();
    let ev = Evaluation::Assignment(a);
    let (truth, note) = a.ground_truth_checked();
    if let Some(n) = note {
        notes.push(format!("{label}: {n}"));
    }
    ExactRecord {
        label,
        assignment: Some(a.to_doc()),
        ground_truth: Some(truth),
        classical: exact_success(ProtocolKind::Classical, ev, &s),
        pe: exact_success(ProtocolKind::PE, ev, &s),
        p1: exact_success(ProtocolKind::P1, ev, &s),
        p2: exact_success(ProtocolKind::P2, ev, &s),
    }
}

pub fn cmd_exact(
    g: &GlobalArgs,
    explicit: Explicit,
    args: &ExactArgs,
) -> Result<ExactReport, CliError> {
    let mut notes = Vec::new();
    let (instance, rows) = if let Some(index) = args.row_from_table2 {
        let table = load_table2()?;
        let row = table.iter().find(|r| r.index == index).ok_or_else(|| {
            CliError::Validation(format!("no dataset row {index} (rows 1..={})", table.len()))
        })?;
        let inst = experiment_instance();
        explicit.check(g, &inst, "the dataset instance")?;
        let rec = exact_record(format!("row {index}"), &row.assignment()?, &mut notes);
        (inst, vec![rec])
    } else if let Some(json) = &args.assignment {
        let doc = read_assignment(json)?;
        let inst = doc.instance()?;
        explicit.check(g, &inst, "the assignment")?;
        let a = doc.to_assignment()?;
        (
            inst,
            vec![exact_record("assignment".into(), &a, &mut notes)],
        )
    } else {
        let inst = global_instance(g)?;
        let s = ClassicalStrategy::default();
        let ev = Evaluation::Average(&inst);
        let mut rows = vec![ExactRecord {
            label: "average".into(),
            assignment: None,
            ground_truth: None,
            classical: exact_success(ProtocolKind::Classical, ev, &s),
            pe: exact_success(ProtocolKind::PE, ev, &s),
            p1: exact_success(ProtocolKind::P1, ev, &s),
            p2: exact_success(ProtocolKind::P2, ev, &s),
        }];
        for j in 0..args.samples {
            let a = sample_assignment(&inst, &mut trial_rng(g.seed, j as u64));
            rows.push(exact_record(format!("sample {}", j + 1), &a, &mut notes));
        }
        (inst, rows)
    };
    let mut all_notes = note_strings(&instance);
    all_notes.extend(notes);
    Ok(ExactReport {
        bounds: BoundReport::compute(&instance),
        instance,
        notes: all_notes,
        rows,
    })
}

pub fn emit_exact(out: &mut dyn Write, json: bool, r: &ExactReport) -> Result<(), CliError> {
    if json {
        return write_json(out, r);
    }
    let i = &r.instance;
    let b = &r.bounds;
    let rows: Vec<ExactCsvRow> = r
        .rows
        .iter()
        .map(|row| ExactCsvRow {
            label: &row.label,
            n: i.n(),
            m: i.m(),
            d: i.d(),
            mu: i.mu(),
            assignment: row
                .assignment
                .as_ref()
                .map(|a| serde_json::to_string(a).expect("plain data")),
            ground_truth: row.ground_truth,
            classical: row.classical,
            pe: row.pe,
            p1: row.p1,
            p2: row.p2,
            bound_pe: b.pe_bound,
            bound_p1: b.p1_bound,
            classical_error_estimate: b.classical_error_est,
            worst_p1: b.exact_worst_p1,
            worst_p2: b.exact_worst_p2,
        })
        .collect();
    write_csv(out, &rows)
}

#[derive(Debug, Serialize)]
pub struct MonteCarloRow {
    pub vary: &'static str,
    pub value: String,
    #[serde(rename = "N")]
    pub n: Option<u64>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub d: Option<usize>,
    pub mu: Option<u64>,
    pub eta: Option<f64>,
    pub protocol: Option<ProtocolKind>,
    pub trials: Option<u64>,
    pub successes: Option<u64>,
    pub empirical: Option<f64>,
    pub std_err: Option<f64>,
    pub exact: Option<f64>,
    pub bound: Option<f64>,
    pub status: String,
}

impl MonteCarloRow {
    fn skipped(vary: &'static str, value: String, reason: String) -> Self {
        Self {
            vary,
            value,
            n: None,
            m: None,
            d: None,
            mu: None,
            eta: None,
            protocol: None,
            trials: None,
            successes: None,
            empirical: None,
            std_err: None,
            exact: None,
            bound: None,
            status: format!("skipped: {reason}"),
        }
    }
}

/// `(instance parameters, eta)` for one grid value.
type GridPoint = ((u64, usize, usize, u64), Option<f64>);

fn grid_point(g: &GlobalArgs, vary: Vary, raw: &str) -> Result<GridPoint, CliError> {
    let bad = || {
        CliError::Validation(format!(
            "grid value '{raw}' is not valid for --vary {}",
            vary.name()
        ))
    };
    let int = || raw.trim().parse::<u64>().map_err(|_| bad());
    let mut p = (g.n, g.m, g.d, g.mu);
    let mut eta = g.eta;
    match vary {
        Vary::N => p.0 = int()?,
        Vary::M => p.1 = int()? as usize,
        Vary::D => p.2 = int()? as usize,
        Vary::Mu => p.3 = int()?,
        Vary::Eta => eta = Some(raw.trim().parse::<f64>().map_err(|_| bad())?),
    }
    Ok((p, eta))
}

/// Reference value for the bound column: the success bound of each quantum
/// protocol and one minus the first-order error estimate for the classical one.
fn bound_for(kind: ProtocolKind, inst: &CcpInstance) -> f64 {
    match kind {
        ProtocolKind::Classical => 1.0 - classical_error_estimate(inst).value,
        ProtocolKind::P1 => p1_success_bound(inst).value,
        ProtocolKind::P2 | ProtocolKind::PE => pe_success_bound(inst).value,
    }
}

pub fn cmd_montecarlo(
    g: &GlobalArgs,
    args: &MonteCarloArgs,
) -> Result<Vec<MonteCarloRow>, CliError> {
    if g.trials == 0 {
        return Err(CliError::Validation("--trials must be at least 1".into()));
    }
    if args.protocols.is_empty() {
        return Err(CliError::Validation("--protocols is empty".into()));
    }
    let points: Vec<(&'static str, String, GridPoint)> = match args.vary {
        None => vec![("none", String::new(), ((g.n, g.m, g.d, g.mu), g.eta))],
        Some(v) => {
            if args.grid.is_empty() {
                return Err(CliError::Validation("--vary needs --grid".into()));
            }
            args.grid
                .iter()
                .map(|raw| Ok((v.name(), raw.trim().to_string(), grid_point(g, v, raw)?)))
                .collect::<Result<_, CliError>>()?
        }
    };
    let s = ClassicalStrategy::default();
    let mut rows = Vec::new();
    for (vary, value, ((n, m, d, mu), eta)) in points {
        let inst = match CcpInstance::new(n, m, d, mu) {
            Ok(i) => i,
            Err(e) => {
                rows.push(MonteCarloRow::skipped(vary, value, e.to_string()));
                continue;
            }
        };
        let model = match eta.map(EfficiencyModel::new).transpose() {
            Ok(m) => m,
            Err(e) => {
                rows.push(MonteCarloRow::skipped(vary, value, e.to_string()));
                continue;
            }
        };
        for &kind in &args.protocols {
            let mut spec = BatchSpec::new(inst, kind, g.trials, g.seed);
            spec.efficiency = model;
            let res = run_batch(&spec, args.workers);
            let mut exact = exact_success(kind, Evaluation::Average(&inst), &s);
            let mut bound = bound_for(kind, &inst);
            if let Some(model) = model {
                exact = efficiency_adjusted_success(exact, kind, &inst, model.eta())?;
                bound = efficiency_adjusted_success(bound, kind, &inst, model.eta())?;
            }
            rows.push(MonteCarloRow {
                vary,
                value: value.clone(),
                n: Some(n),
                m: Some(m),
                d: Some(d),
                mu: Some(mu),
                eta: model.map(|m| m.eta()),
                protocol: Some(kind),
                trials: Some(res.trials),
                successes: Some(res.successes),
                empirical: Some(res.success_rate()),
                std_err: Some(res.standard_error()),
                exact: Some(exact),
                bound: Some(bound),
                status: "ok".into(),
            });
        }
    }
    Ok(rows)
}

pub fn cmd_table2(args: &Table2Args) -> Result<ReproReport, CliError> {
    let table = match &args.dataset {
        Some(path) => load_table2_from_path(path)?,
        None => load_table2()?,
    };
    Ok(reproduce_report_from(&table)?)
}

/// Writes the report, then fails with a reproduction error if any check did not hold.
pub fn emit_table2(out: &mut dyn Write, json: bool, r: &ReproReport) -> Result<(), CliError> {
    if json {
        write_json(out, r)?;
    } else {
        out.write_all(r.to_text().as_bytes())?;
    }
    out.flush()?;
    let mut failed = Vec::new();
    if !r.average_1_within_tolerance {
        failed.push(format!(
            "mean measured P1 {:.5} differs from published {:.4}",
            r.averages.mean_exp_1, r.reference.published_avg_1
        ));
    }
    if !r.average_2_within_tolerance {
        failed.push(format!(
            "mean measured P2 {:.5} differs from published {:.4}",
            r.averages.mean_exp_2, r.reference.published_avg_2
        ));
    }
    if !r.both_above_classical {
        failed.push("a measured average does not exceed the classical value".into());
    }
    if !r.ideal_above_bounds {
        failed.push("an ideal prediction falls below its bound".into());
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Reproduction(failed.join("; ")))
    }
}

#[derive(Debug, Serialize)]
pub struct ScalingRow {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "M")]
    pub m: usize,
    pub d: usize,
    pub mu: u64,
    pub classical_error: f64,
    pub classical_error_estimate: f64,
    #[serde(rename = "P1_worst_error")]
    pub p1_worst_error: f64,
    #[serde(rename = "P1_bound_error")]
    pub p1_bound_error: f64,
    pub classical_slope: f64,
    pub quantum_slope: f64,
}

#[derive(Debug, Serialize)]
pub struct ScalingReport {
    pub slopes: ScalingSlopes,
    pub rows: Vec<ScalingRow>,
}

pub fn cmd_sweep_scaling(g: &GlobalArgs, args: &ScalingArgs) -> Result<ScalingReport, CliError> {
    let family = args
        .grid
        .iter()
        .map(|&n| CcpInstance::new(n, g.m, g.d, g.mu))
        .collect::<Result<Vec<_>, _>>()?;
    let slopes = scaling_slopes(&family)?;
    let rows = family
        .iter()
        .map(|inst| {
            let (classical_error, quantum_error) = scaling_errors(inst);
            ScalingRow {
                n: inst.n(),
                m: inst.m(),
                d: inst.d(),
                mu: inst.mu(),
                classical_error,
                classical_error_estimate: classical_error_estimate(inst).value,
                p1_worst_error: quantum_error,
                p1_bound_error: 1.0 - p1_success_bound(inst).value,
                classical_slope: slopes.classical_slope,
                quantum_slope: slopes.quantum_slope,
            }
        })
        .collect();
    Ok(ScalingReport { slopes, rows })
}

#[derive(Debug, Serialize)]
pub struct EfficiencyRow {
    /// `curve` for a grid point, `crossover` for a crossover efficiency.
    pub kind: &'static str,
    pub eta: Option<f64>,
    pub protocol: ProtocolKind,
    pub measurements: usize,
    pub ideal: Option<f64>,
    pub adjusted: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Crossover {
    /// Protocol that `P1` is compared with.
    pub versus: ProtocolKind,
    /// Efficiency below which `P1` does better; absent when the curves do not cross.
    pub eta: Option<f64>,
    pub adjusted: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Ideal {
    pub protocol: ProtocolKind,
    pub ideal: f64,
}

#[derive(Debug, Serialize)]
pub struct EfficiencyReport {
    pub instance: CcpInstance,
    pub ideal_basis: &'static str,
    pub ideals: Vec<Ideal>,
    pub rows: Vec<EfficiencyRow>,
    pub crossovers: Vec<Crossover>,
}

fn ideal_success(kind: ProtocolKind, inst: &CcpInstance, basis: IdealBasis) -> f64 {
    let average = || {
        exact_success(
            kind,
            Evaluation::Average(inst),
            &ClassicalStrategy::default(),
        )
    };
    match basis {
        IdealBasis::Average => average(),
        IdealBasis::Worst => worst_case_success(kind, inst).map_or_else(average, |w| w.value),
    }
}

pub fn cmd_efficiency(g: &GlobalArgs, args: &EfficiencyArgs) -> Result<EfficiencyReport, CliError> {
    let inst = global_instance(g)?;
    let grid: Vec<f64> = if !args.grid.is_empty() {
        args.grid.clone()
    } else if let Some(eta) = g.eta {
        vec![eta]
    } else {
        (80..=100).map(|k| k as f64 / 100.0).collect()
    };
    for &eta in &grid {
        EfficiencyModel::new(eta)?;
    }
    let ideals: Vec<(ProtocolKind, f64)> = ProtocolKind::ALL
        .iter()
        .map(|&k| (k, ideal_success(k, &inst, args.ideal)))
        .collect();
    let mut rows = Vec::new();
    for &eta in &grid {
        for &(kind, p) in &ideals {
            rows.push(EfficiencyRow {
                kind: "curve",
                eta: Some(eta),
                protocol: kind,
                measurements: measurement_count(kind, &inst),
                ideal: Some(p),
                adjusted: Some(efficiency_adjusted_success(p, kind, &inst, eta)?),
            });
        }
    }
    let p1 = ideals
        .iter()
        .find(|(k, _)| *k == ProtocolKind::P1)
        .map(|&(_, p)| p)
        .expect("P1 listed");
    let mut crossovers = Vec::new();
    for &(kind, p) in ideals
        .iter()
        .filter(|(k, _)| matches!(k, ProtocolKind::P2 | ProtocolKind::PE))
    {
        let eta = crossover_eta(p1, kind, p, &inst);
        let adjusted = eta
            .map(|e| efficiency_adjusted_success(p1, ProtocolKind::P1, &inst, e))
            .transpose()?;
        rows.push(EfficiencyRow {
            kind: "crossover",
            eta,
            protocol: kind,
            measurements: measurement_count(kind, &inst),
            ideal: None,
            adjusted,
        });
        crossovers.push(Crossover {
            versus: kind,
            eta,
            adjusted,
        });
    }
    Ok(EfficiencyReport {
        instance: inst,
        ideal_basis: match args.ideal {
            IdealBasis::Worst => "worst",
            IdealBasis::Average => "average",
        },
        ideals: ideals
            .into_iter()
            .map(|(protocol, ideal)| Ideal { protocol, ideal })
            .collect(),
        rows,
        crossovers,
    })
}
