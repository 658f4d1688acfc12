//! Human-readable and structured renderings of a mobility report.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra::LoopRank;
use crate::mobility::MobilityReport;
use crate::oracle::{Agreement, Verdict};
use crate::topology::MAX_SIDE;

pub const FORMAT_VERSION: u32 = 1;

fn legs_phrase(owners: &[u8]) -> String {
    match owners {
        [] => String::new(),
        [one] => format!(" (leg {one})"),
        many => {
            let s: Vec<String> = many.iter().map(|x| x.to_string()).collect();
            format!(" (legs {})", s.join(", "))
        }
    }
}

fn row_phrase(rank: u8, axes: &[String], owners: &[u8]) -> String {
    match rank {
        0 => "none".into(),
        3 => format!("arbitrary{}", legs_phrase(owners)),
        _ => format!("{}{}", axes.join(", "), legs_phrase(owners)),
    }
}

fn matrix_text(t: &[u8], r: &[u8]) -> String {
    let row = |v: &[u8]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    format!("[{}; {}]", row(t), row(r))
}

pub fn render_human(report: &MobilityReport, trace: bool, oracle: Option<&Agreement>) -> String {
    let mut out = String::new();
    let p = &report.poc;
    let _ = writeln!(out, "mechanism: {}", report.name);
    let _ = writeln!(out, "legs: {}", report.legs.len());
    for leg in &report.legs {
        let _ = writeln!(
            out,
            "  L{}  {}  {}T{}R",
            leg.label,
            leg.matrix.format_rows(MAX_SIDE),
            leg.xi_t,
            leg.xi_r
        );
    }
    let _ = writeln!(out, "sum f = {}", report.total_joint_dof);
    let _ = writeln!(out, "loops:");
    for (i, l) in report.loops.iter().enumerate() {
        let _ = writeln!(out, "  SLC{}  xi_t = {}  xi_r = {}  xi = {}", i + 1, l.xi_t, l.xi_r, l.xi);
    }
    let _ = writeln!(out, "DOF = {}", report.dof);
    if report.rigid() {
        let _ = writeln!(out, "rigid (F = {})", report.dof);
    }
    let _ = writeln!(out, "class = {}", report.classification);
    let _ = writeln!(out, "POC = {}", matrix_text(&p.t, &p.r));
    let _ = writeln!(out, "translation: {}", row_phrase(p.xi_t(), &report.t_axes, &p.t_owner));
    let _ = writeln!(out, "rotation: {}", row_phrase(p.xi_r(), &report.r_axes, &p.r_owner));
    if trace {
        let _ = writeln!(out, "trace:");
        for s in &report.trace {
            let _ = writeln!(out, "  step {}: {}", s.step, s.text);
        }
    }
    if let Some(a) = oracle {
        let _ = writeln!(out, "oracle: {}/{} agree", a.agreed(), a.total());
        for o in &a.outcomes {
            match &o.verdict {
                Verdict::Agree => {}
                Verdict::Disagree(d) | Verdict::Failed(d) => {
                    let _ = writeln!(out, "  seed {}: {}", o.seed, d);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowPair<T> {
    pub t: T,
    pub r: T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredPoc {
    pub t: Vec<u8>,
    pub r: Vec<u8>,
    pub owners: RowPair<Vec<u8>>,
    pub axes: RowPair<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredStep {
    pub step: u8,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredOracle {
    pub seeds: usize,
    pub agree: usize,
    pub problems: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredReport {
    pub format_version: u32,
    pub mechanism: String,
    pub dof: i32,
    pub rigid: bool,
    pub class: String,
    pub total_joint_dof: u32,
    pub loops: Vec<LoopRank>,
    pub poc: StructuredPoc,
    pub trace: Vec<StructuredStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<StructuredOracle>,
}

pub fn structured(report: &MobilityReport, oracle: Option<&Agreement>) -> StructuredReport {
    let p = &report.poc;
    StructuredReport {
        format_version: FORMAT_VERSION,
        mechanism: report.name.clone(),
        dof: report.dof,
        rigid: report.rigid(),
        class: report.classification.clone(),
        total_joint_dof: report.total_joint_dof,
        loops: report.loops.clone(),
        poc: StructuredPoc {
            t: p.t.to_vec(),
            r: p.r.to_vec(),
            owners: RowPair {
                t: p.t_owner.clone(),
                r: p.r_owner.clone(),
            },
            axes: RowPair {
                t: report.t_axes.clone(),
                r: report.r_axes.clone(),
            },
        },
        trace: report
            .trace
            .iter()
            .map(|s| StructuredStep {
                step: s.step,
                text: s.text.clone(),
            })
            .collect(),
        oracle: oracle.map(|a| StructuredOracle {
            seeds: a.total(),
            agree: a.agreed(),
            problems: a
                .outcomes
                .iter()
                .filter_map(|o| match &o.verdict {
                    Verdict::Agree => None,
                    Verdict::Disagree(d) | Verdict::Failed(d) => Some(format!("seed {}: {}", o.seed, d)),
                })
                .collect(),
        }),
    }
}

pub fn to_json(reports: &[StructuredReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

pub fn from_json(text: &str) -> serde_json::Result<Vec<StructuredReport>> {
    serde_json::from_str(text)
}
