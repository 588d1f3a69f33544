//! Instance and schedule files.
//!
//! Both are single JSON documents. Writers emit a canonical form (keys in
//! declaration order, two-space indentation, one array element per line,
//! trailing newline), so equal values always serialize to identical bytes.
//! See `docs/formats.md` for the full layout.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::instance::{Instance, InstanceError, InstanceMeta, Time, MAX_VALUE};
use super::schedule::Schedule;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("declared n = {declared} but p has {actual} entries")]
    JobCount { declared: usize, actual: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("job {job} starts at {start}, beyond the limit {MAX_VALUE}")]
    StartOutOfRange { job: usize, start: Time },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    version: u32,
    n: usize,
    m: usize,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    deadline: Option<Time>,
    p: Vec<Time>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w: Option<Vec<Time>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<Vec<Time>>,
    #[serde(default)]
    conflicts: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<InstanceMeta>,
}

pub fn instance_from_str(text: &str) -> Result<Instance, FormatError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    if doc.version != FORMAT_VERSION {
        return Err(FormatError::Version(doc.version));
    }
    if doc.n != doc.p.len() {
        return Err(FormatError::JobCount {
            declared: doc.n,
            actual: doc.p.len(),
        });
    }
    let mut inst = Instance::new(doc.m, doc.p, doc.conflicts.iter().map(|&[a, b]| (a, b)))?;
    if let Some(t) = doc.deadline {
        inst = inst.with_deadline(t)?;
    }
    if let Some(w) = doc.w {
        inst = inst.with_weights(w)?;
    }
    if let Some(r) = doc.r {
        inst = inst.with_profits(r)?;
    }
    if let Some(meta) = doc.meta {
        inst = inst.with_meta(meta);
    }
    Ok(inst)
}

pub fn instance_to_string(inst: &Instance) -> String {
    let doc = InstanceDoc {
        version: FORMAT_VERSION,
        n: inst.n_jobs(),
        m: inst.n_machines(),
        deadline: inst.deadline(),
        p: inst.proc_times().to_vec(),
        w: inst.weights().map(<[Time]>::to_vec),
        r: inst.profits().map(<[Time]>::to_vec),
        conflicts: inst.conflicts().iter().map(|&(i, j)| [i, j]).collect(),
        meta: inst.meta().cloned(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("instance serializes");
    out.push('\n');
    out
}

pub fn schedule_from_str(text: &str) -> Result<Schedule, FormatError> {
    let sched: Schedule = serde_json::from_str(text)?;
    if let Some(p) = sched.placements.iter().find(|p| p.start.abs() > MAX_VALUE) {
        return Err(FormatError::StartOutOfRange {
            job: p.job,
            start: p.start,
        });
    }
    Ok(sched)
}

pub fn schedule_to_string(sched: &Schedule) -> String {
    let mut out = serde_json::to_string_pretty(sched).expect("schedule serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_text_layout() {
        let inst = Instance::new(2, vec![3, 2], [(1, 0)])
            .unwrap()
            .with_deadline(4)
            .unwrap()
            .with_profits(vec![1, 5])
            .unwrap();
        let text = instance_to_string(&inst);
        let expected = "{\n  \"version\": 1,\n  \"n\": 2,\n  \"m\": 2,\n  \"T\": 4,\n  \"p\": [\n    3,\n    2\n  ],\n  \"r\": [\n    1,\n    5\n  ],\n  \"conflicts\": [\n    [\n      0,\n      1\n    ]\n  ]\n}\n";
        assert_eq!(text, expected);
        assert_eq!(instance_from_str(&text).unwrap(), inst);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            instance_from_str(r#"{"version":2,"n":0,"m":1,"p":[]}"#),
            Err(FormatError::Version(2))
        ));
        assert!(matches!(
            instance_from_str(r#"{"version":1,"n":2,"m":1,"p":[1]}"#),
            Err(FormatError::JobCount { .. })
        ));
        assert!(matches!(
            instance_from_str(r#"{"version":1,"n":1,"m":1,"p":[1],"extra":0}"#),
            Err(FormatError::Json(_))
        ));
        assert!(matches!(
            instance_from_str(r#"{"version":1,"n":2,"m":1,"p":[1,1],"conflicts":[[0,0]]}"#),
            Err(FormatError::Instance(InstanceError::SelfLoop(0)))
        ));
    }

    #[test]
    fn schedule_round_trip() {
        let text = r#"{"assignments":[{"job":1,"machine":0,"start":-2}],"rejected":[0]}"#;
        let sched = schedule_from_str(text).unwrap();
        assert_eq!(sched.placements[0].start, -2);
        assert_eq!(schedule_from_str(&schedule_to_string(&sched)).unwrap(), sched);
        // `rejected` may be omitted
        assert!(schedule_from_str(r#"{"assignments":[]}"#).unwrap().rejected.is_empty());
    }
}
