//! Request/report documents for the command-line front end.

use serde::{Deserialize, Serialize};

use crate::classify::{
    classify, ppt_check, ClassifyError, FramePolicy, NegativityWitness, PptResult,
    SpinMarginalMin, VerdictKind, Witness, CLASSIFY_TOL,
};
use crate::states::StateSpec;
use crate::table::{jqp_table, DirectionSubset, SignAssignment, TableError};

fn default_tol() -> f64 {
    std::env::var("JQP_DEFAULT_TOL")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(CLASSIFY_TOL)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputFlags {
    pub verdict: bool,
    pub tables: bool,
    pub ppt: bool,
    pub witnesses: bool,
}

impl Default for OutputFlags {
    fn default() -> Self {
        OutputFlags {
            verdict: true,
            tables: false,
            ppt: true,
            witnesses: true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalysisRequest {
    pub state: StateSpec,
    #[serde(default)]
    pub policy: FramePolicy,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    #[serde(default)]
    pub outputs: OutputFlags,
}

impl AnalysisRequest {
    pub fn new(state: StateSpec) -> Self {
        AnalysisRequest {
            state,
            policy: FramePolicy::default(),
            tolerance: default_tol(),
            outputs: OutputFlags::default(),
        }
    }
}

/// One dumped sign assignment with its quasiprobability.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableRow {
    pub signs: SignAssignment,
    pub p: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableDump {
    pub subset: String,
    pub frames: Vec<crate::spin::Frame>,
    pub rows: Vec<TableRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub request: AnalysisRequest,
    pub verdict: VerdictKind,
    pub stage_i_min: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage_ii_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negativity: Option<NegativityWitness>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub spin_marginal_minima: Vec<SpinMarginalMin>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub ppt: Vec<PptResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tables: Option<Vec<TableDump>>,
}

/// Runs the criterion and the Peres test for a request.
pub fn run_analysis(request: &AnalysisRequest) -> Result<Report, ClassifyError> {
    let rho = request.state.build()?;
    let verdict = classify(&rho, &request.policy, request.tolerance)?;
    let n = rho.n_spins();

    let ppt = if request.outputs.ppt && n >= 2 {
        (1..=n)
            .map(|s| ppt_check(&rho, &[s]))
            .collect::<Result<Vec<_>, _>>()?
            // a 2-spin state has one distinct bipartition
            .into_iter()
            .take(if n == 2 { 1 } else { n })
            .collect()
    } else {
        Vec::new()
    };

    let tables = if request.outputs.tables {
        let frames = crate::classify::candidate_frames(&rho, &request.policy)?
            .into_iter()
            .next()
            .expect("at least one frame assignment");
        Some(vec![dump_table(&rho, &frames, &DirectionSubset::full(n))?])
    } else {
        None
    };

    Ok(Report {
        request: request.clone(),
        verdict: verdict.kind,
        stage_i_min: verdict.stage_i_best,
        stage_ii_min: verdict.stage_ii_best,
        witness: if request.outputs.witnesses {
            verdict.witness
        } else {
            None
        },
        negativity: verdict.negativity,
        spin_marginal_minima: verdict.spin_marginal_minima,
        ppt,
        tables,
    })
}

pub fn dump_table(
    rho: &crate::states::DensityMatrix,
    frames: &[crate::spin::Frame],
    subset: &DirectionSubset,
) -> Result<TableDump, TableError> {
    let t = jqp_table(rho, frames, subset)?;
    let rows = (0..t.len())
        .map(|idx| TableRow {
            signs: SignAssignment::from_index(subset, idx),
            p: t.values()[idx],
        })
        .collect();
    Ok(TableDump {
        subset: subset.label(),
        frames: frames.to_vec(),
        rows,
    })
}

/// CSV rendering of a table dump: one sign column per included direction,
/// then the value at full precision.
pub fn table_to_csv(dump: &TableDump) -> String {
    let subset = DirectionSubset::parse(&dump.subset).expect("dump labels are valid");
    let mut header = Vec::new();
    for spin in 1..=subset.n_spins() {
        for axis in subset.at(spin) {
            header.push(format!("eps{}_{}", spin, axis.label()));
        }
    }
    header.push("p".to_string());
    let mut out = header.join(",") + "\n";
    for row in &dump.rows {
        let mut cells: Vec<String> = row
            .signs
            .signs
            .iter()
            .flatten()
            .map(|s| format!("{s:+}"))
            .collect();
        cells.push(format!("{:.15e}", row.p));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{Family, StateSpec};

    #[test]
    fn report_round_trips() {
        let request =
            AnalysisRequest::new(StateSpec::family(Family::Werner).with_param("x", 0.45));
        let report = run_analysis(&request).unwrap();
        assert_eq!(report.verdict, VerdictKind::Classical);
        let json = serde_json::to_string_pretty(&report).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back.verdict, report.verdict);
        assert_eq!(back.stage_i_min, report.stage_i_min);
        let again = serde_json::to_string_pretty(&back).unwrap();
        assert_eq!(json, again);
    }

    #[test]
    fn table_dump_csv_shape() {
        let rho = crate::states::werner(1.0).unwrap();
        let frames = vec![crate::spin::make_frame(&crate::spin::Direction::z_axis(), 0.0); 2];
        let dump = dump_table(&rho, &frames, &DirectionSubset::full(2)).unwrap();
        assert_eq!(dump.rows.len(), 64);
        // all-aligned row is the first one and equals -1/32
        assert!((dump.rows[0].p + 1.0 / 32.0).abs() < 1e-13);
        let csv = table_to_csv(&dump);
        let lines: Vec<&str> = csv.trim().lines().collect();
        assert_eq!(lines.len(), 65);
        assert!(lines[0].starts_with("eps1_a,eps1_b,eps1_c,eps2_a"));
    }
}
