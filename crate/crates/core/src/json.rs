//! JSON shapes for results. Bases are always written as strings; reading
//! them back resolves names first and integer indices second.

use serde::{Deserialize, Serialize};

use crate::distances::{ExtDistance, Measured, SphereKind, SphereReport};
use crate::error::{Error, Result};
use crate::paths::PathCount;
use crate::quiver::{QuiverSource, VertexId};
use crate::sections::{
    ClassVerdict, ClassificationReport, Grade, Section, SectionReport, SlfReport, Verdict, Violation,
};
use crate::zq::ZVertex;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZVertexJson {
    pub slice: i64,
    pub base: String,
}

impl From<&ZVertex> for ZVertexJson {
    fn from(v: &ZVertex) -> Self {
        ZVertexJson {
            slice: v.slice,
            base: v.base.to_string(),
        }
    }
}

impl ZVertexJson {
    pub fn resolve<Q: QuiverSource + ?Sized>(&self, q: &Q) -> Result<ZVertex> {
        Ok(ZVertex::new(self.slice, resolve_base(q, &self.base)?))
    }
}

fn resolve_base<Q: QuiverSource + ?Sized>(q: &Q, base: &str) -> Result<VertexId> {
    q.resolve(base)
        .ok_or_else(|| Error::UnknownVertex(VertexId::name(base)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceStatus {
    Finite,
    Infinite,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceJson {
    pub status: DistanceStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<i64>,
    pub expansions: usize,
}

impl From<&Measured> for DistanceJson {
    fn from(m: &Measured) -> Self {
        let (status, value, bound) = match m.distance {
            ExtDistance::Finite(d) => (DistanceStatus::Finite, Some(d), None),
            ExtDistance::Infinite => (DistanceStatus::Infinite, None, None),
            ExtDistance::AtLeast(b) => (DistanceStatus::AtLeast, None, Some(b)),
        };
        DistanceJson {
            status,
            value,
            bound,
            expansions: m.expansions,
        }
    }
}

impl DistanceJson {
    pub fn distance(&self) -> Option<ExtDistance> {
        match (self.status, self.value, self.bound) {
            (DistanceStatus::Finite, Some(v), _) => Some(ExtDistance::Finite(v)),
            (DistanceStatus::Infinite, _, _) => Some(ExtDistance::Infinite),
            (DistanceStatus::AtLeast, _, Some(b)) => Some(ExtDistance::AtLeast(b)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStatus {
    Finite,
    Infinite,
    LowerBound,
}

/// `count` is a decimal string; for infinite counts it is `"inf"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCountJson {
    pub status: PathStatus,
    pub count: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_cycle: Option<Vec<ZVertexJson>>,
}

impl From<&PathCount> for PathCountJson {
    fn from(p: &PathCount) -> Self {
        match p {
            PathCount::Finite(n) => PathCountJson {
                status: PathStatus::Finite,
                count: n.to_string(),
                witness_cycle: None,
            },
            PathCount::LowerBound(n) => PathCountJson {
                status: PathStatus::LowerBound,
                count: n.to_string(),
                witness_cycle: None,
            },
            PathCount::Infinite { witness } => PathCountJson {
                status: PathStatus::Infinite,
                count: "inf".to_string(),
                witness_cycle: Some(witness.iter().map(ZVertexJson::from).collect()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionEntry {
    pub base: String,
    pub slice: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionJson {
    pub center: Option<ZVertexJson>,
    pub selection: Vec<SelectionEntry>,
}

impl From<&Section> for SectionJson {
    fn from(s: &Section) -> Self {
        SectionJson {
            center: s.center.as_ref().map(ZVertexJson::from),
            selection: s
                .selection
                .iter()
                .map(|(b, j)| SelectionEntry {
                    base: b.to_string(),
                    slice: *j,
                })
                .collect(),
        }
    }
}

impl SectionJson {
    pub fn resolve<Q: QuiverSource + ?Sized>(&self, q: &Q) -> Result<Section> {
        let mut selection = std::collections::BTreeMap::new();
        for e in &self.selection {
            let base = resolve_base(q, &e.base).unwrap_or_else(|_| VertexId::name(e.base.as_str()));
            selection.insert(base, e.slice);
        }
        Ok(Section {
            selection,
            center: self.center.as_ref().map(|c| c.resolve(q)).transpose()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationJson {
    MissingOrbit { base: String },
    ForeignOrbit { base: String },
    NegativeDistance { from: ZVertexJson, to: ZVertexJson, distance: i64 },
    ArrowCondition { selected: ZVertexJson, neighbor: ZVertexJson, outgoing: bool },
}

impl From<&Violation> for ViolationJson {
    fn from(v: &Violation) -> Self {
        match v {
            Violation::MissingOrbit(b) => ViolationJson::MissingOrbit { base: b.to_string() },
            Violation::ForeignOrbit(b) => ViolationJson::ForeignOrbit { base: b.to_string() },
            Violation::NegativeDistance { from, to, distance } => ViolationJson::NegativeDistance {
                from: from.into(),
                to: to.into(),
                distance: *distance,
            },
            Violation::ArrowCondition {
                selected,
                neighbor,
                outgoing,
            } => ViolationJson::ArrowCondition {
                selected: selected.into(),
                neighbor: neighbor.into(),
                outgoing: *outgoing,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictJson {
    Pass,
    Fail,
    Inconclusive,
}

impl From<Verdict> for VerdictJson {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => VerdictJson::Pass,
            Verdict::Fail => VerdictJson::Fail,
            Verdict::Inconclusive => VerdictJson::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereSizeJson {
    pub radius: i64,
    pub size: usize,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereGrowthJson {
    pub kind: String,
    pub spheres: Vec<SphereSizeJson>,
    pub truncated_from: Option<i64>,
    pub inner_truncated_from: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlfJson {
    pub verdict: VerdictJson,
    pub grade: String,
    pub connected: bool,
    pub cycle: Option<Vec<String>>,
    pub probes: Vec<SphereGrowthJson>,
    pub note: String,
}

fn kind_name(k: SphereKind) -> &'static str {
    match k {
        SphereKind::RoundTrip => "roundtrip",
        SphereKind::Right => "right",
        SphereKind::Left => "left",
    }
}

fn names(v: &[VertexId]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

impl From<&SlfReport> for SlfJson {
    fn from(r: &SlfReport) -> Self {
        SlfJson {
            verdict: r.verdict.into(),
            grade: match r.grade {
                Grade::Exact => "exact",
                Grade::Probe => "probe",
            }
            .to_string(),
            connected: r.connected,
            cycle: r.cycle.as_deref().map(names),
            probes: r
                .probes
                .iter()
                .map(|p| SphereGrowthJson {
                    kind: kind_name(p.kind).to_string(),
                    spheres: p
                        .spheres
                        .iter()
                        .map(|&(radius, size, complete)| SphereSizeJson {
                            radius,
                            size,
                            complete,
                        })
                        .collect(),
                    truncated_from: p.truncated_from,
                    inner_truncated_from: p.inner_truncated_from,
                })
                .collect(),
            note: r.note.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionReportJson {
    pub valid: bool,
    pub orbit_coverage: bool,
    pub distance_criterion: bool,
    pub arrow_criterion: bool,
    pub pairs_checked: usize,
    pub exhaustive: bool,
    pub violations: Vec<ViolationJson>,
    pub strong_local_finiteness: Option<SlfJson>,
}

impl From<&SectionReport> for SectionReportJson {
    fn from(r: &SectionReport) -> Self {
        SectionReportJson {
            valid: r.valid,
            orbit_coverage: r.orbit_coverage,
            distance_criterion: r.distance_criterion,
            arrow_criterion: r.arrow_criterion,
            pairs_checked: r.pairs_checked,
            exhaustive: r.exhaustive,
            violations: r.violations.iter().map(ViolationJson::from).collect(),
            strong_local_finiteness: r.strong_local_finiteness.as_ref().map(SlfJson::from),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereJson {
    pub kind: String,
    pub center: String,
    pub radius: i64,
    pub members: Vec<String>,
    pub size: usize,
    pub complete: bool,
}

impl From<&SphereReport> for SphereJson {
    fn from(s: &SphereReport) -> Self {
        SphereJson {
            kind: kind_name(s.kind).to_string(),
            center: s.center.to_string(),
            radius: s.radius,
            members: s.members.iter().map(ToString::to_string).collect(),
            size: s.members.len(),
            complete: s.complete,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereProbeJson {
    pub radius: i64,
    pub size: usize,
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationJson {
    pub verdict: String,
    pub exact: bool,
    pub base: String,
    pub acyclic: bool,
    pub cycle: Option<Vec<String>>,
    pub connected: bool,
    pub spheres: Vec<SphereProbeJson>,
    pub counter_evidence_radius: Option<i64>,
}

pub fn verdict_name(v: ClassVerdict) -> &'static str {
    match v {
        ClassVerdict::Satisfied => "satisfied",
        ClassVerdict::Fails => "fails",
        ClassVerdict::ConsistentWithinProbe => "consistent_within_probe",
        ClassVerdict::CounterEvidence => "counter_evidence",
        ClassVerdict::Inconclusive => "inconclusive",
    }
}

impl From<&ClassificationReport> for ClassificationJson {
    fn from(r: &ClassificationReport) -> Self {
        ClassificationJson {
            verdict: verdict_name(r.verdict).to_string(),
            exact: r.exact,
            base: r.base.to_string(),
            acyclic: r.acyclic,
            cycle: r.cycle.as_deref().map(names),
            connected: r.connected,
            spheres: r
                .spheres
                .iter()
                .map(|s| SphereProbeJson {
                    radius: s.radius,
                    size: s.size,
                    complete: s.complete,
                    inner_size: s.inner_size,
                })
                .collect(),
            counter_evidence_radius: r.counter_evidence_radius,
        }
    }
}
