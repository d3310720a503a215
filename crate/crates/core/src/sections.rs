//! Sections of `ZQ`: construction by halving round trip distances,
//! verification, strong local finiteness and classification.
//!
//! A selection picks one slice per `tau`-orbit. It is a section iff the
//! right light cone distance between any two selected vertices is
//! nonnegative; equivalently, for every selected `a` and arrow `a -> z`
//! either `z` or `tau z` is selected, and for every arrow `z -> a` either
//! `z` or `tau^-1 z` is selected. Both criteria are checked independently.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::distances::{distances_from, sphere_in, Budget, Direction, SphereKind};
use crate::error::{Error, Result};
use crate::family::WindowedQuiver;
use crate::quiver::{Quiver, QuiverSource, VertexId};
use crate::zq::{in_neighbors, out_neighbors, BaseScope, ZVertex};

/// One selected slice per orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub selection: BTreeMap<VertexId, i64>,
    pub center: Option<ZVertex>,
}

impl Section {
    pub fn new(selection: BTreeMap<VertexId, i64>) -> Self {
        Section {
            selection,
            center: None,
        }
    }

    /// Selected vertices, sorted by base.
    pub fn vertices(&self) -> impl Iterator<Item = ZVertex> + '_ {
        self.selection
            .iter()
            .map(|(b, s)| ZVertex::new(*s, b.clone()))
    }

    pub fn slice_of(&self, base: &VertexId) -> Option<i64> {
        self.selection.get(base).copied()
    }

    pub fn contains(&self, v: &ZVertex) -> bool {
        self.slice_of(&v.base) == Some(v.slice)
    }
}

fn checked_view<Q: QuiverSource + ?Sized>(
    q: &Q,
    center: &ZVertex,
    scope: &BaseScope,
) -> Result<WindowedQuiver> {
    let view = WindowedQuiver::new(q, scope)?;
    if !view.contains(&center.base) {
        return Err(Error::UnknownVertex(center.base.clone()));
    }
    let components = view.quiver.connected_components().len();
    if components > 1 {
        return Err(Error::Disconnected(components));
    }
    Ok(view)
}

/// Selects, in every orbit `y` of the scope, the vertex with
/// `d(center, y) = floor(d_rt / 2)`, where `d_rt` is the round trip distance
/// from the center to the orbit. The slice follows from the shift law, so
/// no per-orbit search is needed.
pub fn build_section<Q: QuiverSource + ?Sized>(
    q: &Q,
    center: &ZVertex,
    scope: &BaseScope,
    budget: Budget,
) -> Result<Section> {
    let view = checked_view(q, center, scope)?;
    if let Some(cycle) = view.quiver.find_cycle() {
        return Err(Error::Cyclic(cycle));
    }
    let right = distances_from(&view, &center.base, Direction::Right, budget)?;
    let left = distances_from(&view, &center.base, Direction::Left, budget)?;
    let mut selection = BTreeMap::new();
    for y in view.quiver.vertices() {
        let (Some(&out), Some(&back)) = (right.get(y), left.get(y)) else {
            return Err(Error::Disconnected(2));
        };
        // d(center, (0, y)) and the target value on the orbit
        let at_zero = out + center.slice;
        let target = (out + back).div_euclid(2);
        selection.insert(y.clone(), at_zero - target);
    }
    Ok(Section {
        selection,
        center: Some(center.clone()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeSide {
    Right,
    Left,
}

/// The right (or left) light cone of `center`, as a selection.
pub fn lightcone_section<Q: QuiverSource + ?Sized>(
    q: &Q,
    center: &ZVertex,
    scope: &BaseScope,
    side: ConeSide,
    budget: Budget,
) -> Result<Section> {
    let view = checked_view(q, center, scope)?;
    let selection = match side {
        ConeSide::Right => distances_from(&view, &center.base, Direction::Right, budget)?
            .into_iter()
            .map(|(y, d)| (y, center.slice + d))
            .collect(),
        ConeSide::Left => distances_from(&view, &center.base, Direction::Left, budget)?
            .into_iter()
            .map(|(y, d)| (y, center.slice - d))
            .collect(),
    };
    Ok(Section {
        selection,
        center: Some(center.clone()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// An orbit in scope without a selected vertex.
    MissingOrbit(VertexId),
    /// A selected base outside the scope or the quiver.
    ForeignOrbit(VertexId),
    NegativeDistance {
        from: ZVertex,
        to: ZVertex,
        distance: i64,
    },
    /// `selected -> neighbor` (or `neighbor -> selected` when not
    /// `outgoing`) with neither `neighbor` nor its translate selected.
    ArrowCondition {
        selected: ZVertex,
        neighbor: ZVertex,
        outgoing: bool,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingOrbit(b) => write!(f, "orbit {b} is not selected"),
            Violation::ForeignOrbit(b) => write!(f, "orbit {b} is outside the scope"),
            Violation::NegativeDistance { from, to, distance } => {
                write!(f, "d({from}, {to}) = {distance} < 0")
            }
            Violation::ArrowCondition {
                selected,
                neighbor,
                outgoing: true,
            } => write!(f, "arrow {selected} -> {neighbor}: neither {neighbor} nor its translate selected"),
            Violation::ArrowCondition {
                selected,
                neighbor,
                outgoing: false,
            } => write!(f, "arrow {neighbor} -> {selected}: neither {neighbor} nor its inverse translate selected"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Check at most this many ordered pairs for the distance criterion,
    /// spread evenly over all pairs.
    pub pair_limit: Option<usize>,
    /// Keep every witness instead of the first per criterion.
    pub all_witnesses: bool,
    pub budget: Budget,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            pair_limit: None,
            all_witnesses: false,
            budget: Budget::DEFAULT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionReport {
    pub valid: bool,
    pub orbit_coverage: bool,
    /// Every checked pair has nonnegative right light cone distance.
    pub distance_criterion: bool,
    /// The arrow condition holds at every selected vertex.
    pub arrow_criterion: bool,
    pub pairs_checked: usize,
    pub exhaustive: bool,
    pub violations: Vec<Violation>,
    /// Present for valid sections.
    pub strong_local_finiteness: Option<SlfReport>,
}

pub fn verify_section<Q: QuiverSource + ?Sized>(
    q: &Q,
    s: &Section,
    scope: &BaseScope,
    options: VerifyOptions,
) -> Result<SectionReport> {
    let view = WindowedQuiver::new(q, scope)?;
    verify_in(&view, s, options)
}

fn verify_in(view: &WindowedQuiver, s: &Section, options: VerifyOptions) -> Result<SectionReport> {
    let mut violations = Vec::new();
    let keep = |list: &Vec<Violation>, found_here: usize| options.all_witnesses || found_here == 0 && list.len() < usize::MAX;

    // (i) orbit coverage
    let mut found = 0;
    for v in view.quiver.vertices() {
        if !s.selection.contains_key(v) {
            if keep(&violations, found) {
                violations.push(Violation::MissingOrbit(v.clone()));
            }
            found += 1;
        }
    }
    for b in s.selection.keys() {
        if !view.contains(b) {
            if keep(&violations, found) {
                violations.push(Violation::ForeignOrbit(b.clone()));
            }
            found += 1;
        }
    }
    let orbit_coverage = found == 0;

    // (ii) nonnegative distances
    let selected: Vec<(VertexId, i64)> = s
        .selection
        .iter()
        .filter(|(b, _)| view.contains(b))
        .map(|(b, j)| (b.clone(), *j))
        .collect();
    let n = selected.len();
    let total = n * n;
    let stride = match options.pair_limit {
        Some(limit) if limit > 0 && total > limit => total.div_ceil(limit),
        _ => 1,
    };
    let mut cache: BTreeMap<usize, BTreeMap<VertexId, i64>> = BTreeMap::new();
    let mut pairs_checked = 0;
    found = 0;
    for idx in (0..total).step_by(stride) {
        let (i, k) = (idx / n, idx % n);
        let (x, jx) = &selected[i];
        let (y, jy) = &selected[k];
        if let std::collections::btree_map::Entry::Vacant(e) = cache.entry(i) {
            e.insert(distances_from(view, x, Direction::Right, options.budget)?);
        }
        pairs_checked += 1;
        if let Some(dq) = cache[&i].get(y) {
            let distance = dq + jx - jy;
            if distance < 0 {
                if keep(&violations, found) {
                    violations.push(Violation::NegativeDistance {
                        from: ZVertex::new(*jx, x.clone()),
                        to: ZVertex::new(*jy, y.clone()),
                        distance,
                    });
                }
                found += 1;
            }
        }
    }
    let distance_criterion = found == 0;

    // (iii) arrow condition
    found = 0;
    for (x, jx) in &selected {
        let a = ZVertex::new(*jx, x.clone());
        let outgoing = out_neighbors(view, &a).into_iter().map(|(z, _)| (z, true));
        let incoming = in_neighbors(view, &a).into_iter().map(|(z, _)| (z, false));
        for (z, out) in outgoing.chain(incoming) {
            let Some(jz) = s.slice_of(&z.base) else { continue };
            let shifted = if out { z.slice - 1 } else { z.slice + 1 };
            if jz != z.slice && jz != shifted {
                if keep(&violations, found) {
                    violations.push(Violation::ArrowCondition {
                        selected: a.clone(),
                        neighbor: z,
                        outgoing: out,
                    });
                }
                found += 1;
            }
        }
    }
    let arrow_criterion = found == 0;

    let valid = orbit_coverage && distance_criterion && arrow_criterion;
    let strong_local_finiteness = if valid {
        let induced = view.with_quiver(induced_quiver(view, s));
        let base = s
            .center
            .as_ref()
            .map(|c| c.base.clone())
            .filter(|b| induced.contains(b))
            .or_else(|| induced.quiver.vertices().next().cloned());
        match base {
            Some(b) => Some(probe_strong_local_finiteness(&induced, &b)?),
            None => None,
        }
    } else {
        None
    };
    Ok(SectionReport {
        valid,
        orbit_coverage,
        distance_criterion,
        arrow_criterion,
        pairs_checked,
        exhaustive: stride == 1,
        violations,
        strong_local_finiteness,
    })
}

fn induced_quiver(view: &WindowedQuiver, s: &Section) -> Quiver {
    let mut out = Quiver::new();
    for b in s.selection.keys().filter(|b| view.contains(b)) {
        out.add_vertex(b.clone());
    }
    for (x, y, m) in view.quiver.arrows() {
        let (Some(jx), Some(jy)) = (s.slice_of(x), s.slice_of(y)) else { continue };
        if jx == jy {
            out.add_arrow(x.clone(), y.clone(), m);
        } else if jx == jy + 1 && x != y {
            out.add_arrow(y.clone(), x.clone(), m);
        }
    }
    out
}

/// The full subquiver of `ZQ` on the selected vertices, with vertices named
/// by their orbit.
pub fn section_quiver<Q: QuiverSource + ?Sized>(q: &Q, s: &Section, scope: &BaseScope) -> Result<Quiver> {
    let view = WindowedQuiver::new(q, scope)?;
    let report = verify_in(&view, s, VerifyOptions::default())?;
    if !report.valid {
        let reason = report
            .violations
            .first()
            .map_or_else(|| "unknown".to_string(), ToString::to_string);
        return Err(Error::InvalidSection(reason));
    }
    Ok(induced_quiver(&view, s))
}

/// Section quiver of a window, keeping the window's cut so that it can be
/// probed with [`probe_strong_local_finiteness`].
pub fn windowed_section_quiver(view: &WindowedQuiver, s: &Section) -> Result<WindowedQuiver> {
    let report = verify_in(view, s, VerifyOptions::default())?;
    if !report.valid {
        let reason = report
            .violations
            .first()
            .map_or_else(|| "unknown".to_string(), ToString::to_string);
        return Err(Error::InvalidSection(reason));
    }
    Ok(view.with_quiver(induced_quiver(view, s)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grade {
    Exact,
    /// Derived from a finite window of an infinite quiver.
    Probe,
}

/// Sphere sizes around a base for one light cone side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereGrowth {
    pub kind: SphereKind,
    /// `(radius, size, complete)` for every radius realized in the window.
    pub spheres: Vec<(i64, usize, bool)>,
    /// Smallest radius whose sphere may continue past the window; `None`
    /// when nothing was cut.
    pub truncated_from: Option<i64>,
    /// The same, measured on the middle half of the window.
    pub inner_truncated_from: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlfReport {
    pub verdict: Verdict,
    pub grade: Grade,
    pub connected: bool,
    pub cycle: Option<Vec<VertexId>>,
    pub probes: Vec<SphereGrowth>,
    pub note: String,
}

/// Connected and path finite (local finiteness is automatic).
pub fn is_strongly_locally_finite(q: &Quiver) -> SlfReport {
    let connected = q.is_connected();
    let cycle = q.find_cycle();
    let verdict = if connected && cycle.is_none() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let note = match (&cycle, connected) {
        (Some(_), _) => "oriented cycle".to_string(),
        (None, false) => "not connected".to_string(),
        (None, true) => "connected and path finite".to_string(),
    };
    SlfReport {
        verdict,
        grade: Grade::Exact,
        connected,
        cycle,
        probes: Vec::new(),
        note,
    }
}

fn truncation_radius(w: &WindowedQuiver, base: &VertexId, direction: Direction) -> Result<(BTreeMap<VertexId, i64>, Option<i64>)> {
    let dist = distances_from(w, base, direction, Budget(usize::MAX))?;
    let t = w.gates.iter().filter_map(|g| dist.get(g)).min().copied();
    Ok((dist, t))
}

/// Strong local finiteness from a window.
///
/// Exact windows are decided exactly. Otherwise a cycle inside the window
/// fails outright, and for tree-shaped sources the right and left light cone
/// spheres around `base` are compared between the window and its middle
/// half: a ray (coray) keeps some gate at bounded distance no matter how far
/// the window reaches, so the first truncated radius does not grow. Windows
/// of other sources are inconclusive.
pub fn probe_strong_local_finiteness(w: &WindowedQuiver, base: &VertexId) -> Result<SlfReport> {
    if !w.contains(base) {
        return Err(Error::UnknownVertex(base.clone()));
    }
    if w.is_exact() {
        return Ok(is_strongly_locally_finite(&w.quiver));
    }
    let connected = w.quiver.is_connected();
    let mut report = SlfReport {
        verdict: Verdict::Inconclusive,
        grade: Grade::Probe,
        connected,
        cycle: w.quiver.find_cycle(),
        probes: Vec::new(),
        note: String::new(),
    };
    if report.cycle.is_some() {
        report.verdict = Verdict::Fail;
        report.note = "oriented cycle inside the window".into();
        return Ok(report);
    }
    if !w.tree {
        report.note = "window of a non-tree quiver: sphere completeness cannot be certified".into();
        return Ok(report);
    }
    let inner = w.halved().filter(|i| i.contains(base));
    let mut failing = Vec::new();
    for (kind, direction) in [(SphereKind::Right, Direction::Right), (SphereKind::Left, Direction::Left)] {
        let (dist, truncated_from) = truncation_radius(w, base, direction)?;
        let inner_truncated_from = match &inner {
            Some(i) => truncation_radius(i, base, direction)?.1,
            None => None,
        };
        let max = dist.values().copied().max().unwrap_or(0);
        let spheres = (0..=max)
            .map(|n| {
                let size = dist.values().filter(|&&d| d == n).count();
                (n, size, truncated_from.is_none_or(|t| n < t))
            })
            .collect();
        let grows = match (truncated_from, inner_truncated_from) {
            (None, _) => true,
            (Some(full), Some(half)) => full > half,
            (Some(_), None) => false,
        };
        if !grows {
            failing.push(format!(
                "{} sphere of radius {} reaches the window boundary in both probes",
                if kind == SphereKind::Right { "right" } else { "left" },
                truncated_from.unwrap_or(0)
            ));
        }
        report.probes.push(SphereGrowth {
            kind,
            spheres,
            truncated_from,
            inner_truncated_from,
        });
    }
    if failing.is_empty() {
        report.verdict = Verdict::Pass;
        report.note = "acyclic in the window; light cone spheres recede as the window grows".into();
    } else if inner.is_none() {
        report.note = "no inner window to compare against".into();
    } else {
        report.verdict = Verdict::Fail;
        report.note = failing.join("; ");
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassVerdict {
    /// Finite quiver without oriented cycles.
    Satisfied,
    /// An oriented cycle exists.
    Fails,
    /// Every probed sphere is complete and finite.
    ConsistentWithinProbe,
    /// A truncated sphere keeps growing with the window.
    CounterEvidence,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereProbe {
    pub radius: i64,
    pub size: usize,
    pub complete: bool,
    /// Size in the middle half of the window, for cut windows.
    pub inner_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    pub verdict: ClassVerdict,
    pub exact: bool,
    pub base: VertexId,
    pub acyclic: bool,
    pub cycle: Option<Vec<VertexId>>,
    pub connected: bool,
    pub spheres: Vec<SphereProbe>,
    pub counter_evidence_radius: Option<i64>,
}

/// Checks the finiteness conditions: no oriented cycles and finite round
/// trip spheres around `base`. Exact for finite quivers; for infinite ones
/// the spheres of radius `0..=max_radius` are probed inside `scope` and in
/// its middle half.
pub fn classify<Q: QuiverSource + ?Sized>(
    q: &Q,
    base: &VertexId,
    scope: &BaseScope,
    max_radius: i64,
) -> Result<ClassificationReport> {
    if !q.contains(base) {
        return Err(Error::UnknownVertex(base.clone()));
    }
    let exact = q.finite_vertices().is_some();
    let view = if exact {
        WindowedQuiver::new(q, &BaseScope::All)?
    } else {
        WindowedQuiver::new(q, scope)?
    };
    let cycle = view.quiver.find_cycle();
    let mut report = ClassificationReport {
        verdict: ClassVerdict::Inconclusive,
        exact,
        base: base.clone(),
        acyclic: cycle.is_none(),
        cycle,
        connected: view.quiver.is_connected(),
        spheres: Vec::new(),
        counter_evidence_radius: None,
    };

    let radii = if exact {
        let right = distances_from(&view, base, Direction::Right, Budget::DEFAULT)?;
        let left = distances_from(&view, base, Direction::Left, Budget::DEFAULT)?;
        right
            .iter()
            .filter_map(|(y, d)| left.get(y).map(|e| d + e))
            .max()
            .unwrap_or(0)
    } else {
        max_radius
    };
    let inner = if exact {
        None
    } else {
        view.halved().filter(|i| i.contains(base))
    };
    for n in 0..=radii {
        let full = sphere_in(&view, SphereKind::RoundTrip, base, n)?;
        let inner_size = match &inner {
            Some(i) => Some(sphere_in(i, SphereKind::RoundTrip, base, n)?.members.len()),
            None => None,
        };
        if !full.complete
            && report.counter_evidence_radius.is_none()
            && inner_size.is_some_and(|s| full.members.len() > s)
        {
            report.counter_evidence_radius = Some(n);
        }
        report.spheres.push(SphereProbe {
            radius: n,
            size: full.members.len(),
            complete: full.complete,
            inner_size,
        });
    }

    report.verdict = if report.cycle.is_some() {
        ClassVerdict::Fails
    } else if exact {
        ClassVerdict::Satisfied
    } else if report.counter_evidence_radius.is_some() {
        ClassVerdict::CounterEvidence
    } else if report.spheres.iter().all(|s| s.complete) {
        ClassVerdict::ConsistentWithinProbe
    } else {
        ClassVerdict::Inconclusive
    };
    Ok(report)
}

/// Orbits in `scope` whose selected vertex is not in `s`, for convenience in
/// callers building selections by hand.
pub fn missing_orbits<Q: QuiverSource + ?Sized>(q: &Q, s: &Section, scope: &BaseScope) -> Result<BTreeSet<VertexId>> {
    let view = WindowedQuiver::new(q, scope)?;
    Ok(view
        .quiver
        .vertices()
        .filter(|v| !s.selection.contains_key(v))
        .cloned()
        .collect())
}
