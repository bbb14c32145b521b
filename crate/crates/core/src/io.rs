//! CSV and JSON renderings of results. Numbers use Rust's shortest
//! round-trip formatting so identical inputs give byte-identical files.

use std::fmt::Write;

use serde_json::{json, Value};

use crate::classic::PressureResult;
use crate::measures::EmpiricalMeasure;
use crate::pesin::CaratheodoryEstimate;
use crate::spectrum::SpectrumCurve;
use crate::star::StarResult;

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A comment line `# n=<sample length> k=<depth>` followed by
/// `word,frequency` rows.
pub fn empirical_csv(m: &EmpiricalMeasure) -> String {
    let mut out = format!("# n={} k={}\nword,frequency\n", m.sample_length, m.depth);
    for (w, p) in &m.freq {
        writeln!(out, "{w},{p}").unwrap();
    }
    out
}

/// Columns `alpha,value,q_star,maximizer_id`; samples outside the resolved
/// range carry a marker in the id.
pub fn spectrum_csv(curve: &SpectrumCurve) -> String {
    let mut out = String::from("alpha,value,q_star,maximizer_id\n");
    for s in &curve.samples {
        let id = if s.flagged {
            format!("{} (unresolved)", s.maximizer_id)
        } else {
            s.maximizer_id.clone()
        };
        writeln!(out, "{},{},{},{}", s.alpha, s.value, s.q_star, csv_field(&id)).unwrap();
    }
    out
}

/// Columns `alpha,m_estimate,depth,flag`, one row per level and depth.
/// `m_estimate` is the natural log of the cover sum; `flag` is the
/// classification of the level, suffixed `greedy` when the cover search
/// ran out of budget.
pub fn caratheodory_csv(est: &CaratheodoryEstimate) -> String {
    let mut out = String::from("alpha,m_estimate,depth,flag\n");
    for s in &est.samples {
        let flag = if s.optimal {
            s.class.label().to_string()
        } else {
            format!("{} greedy", s.class.label())
        };
        for &(depth, log_m) in &s.log_m {
            writeln!(out, "{},{},{},{}", s.alpha, log_m, depth, flag).unwrap();
        }
    }
    out
}

pub fn pressure_json(p: &PressureResult) -> Value {
    json!({
        "value": p.value,
        "residual": p.eigen_residual,
        "equilibrium": p.equilibrium,
        "recoded": p.recoding.is_some(),
    })
}

pub fn star_json(r: &StarResult) -> Value {
    json!({
        "value": r.value,
        "residual": Value::Null,
        "equilibrium": r.maximizer,
        "charges_Z": r.charges_z,
        "q_star": r.q_star,
        "flags": r.flags,
    })
}
