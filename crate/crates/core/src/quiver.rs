//! Finite quivers: data model, the line-based file format and structural
//! predicates.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph;

/// A vertex identifier. File-backed quivers use names, the built-in families
/// are indexed by integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexId {
    Index(i64),
    Name(String),
}

impl VertexId {
    pub fn name(s: impl Into<String>) -> Self {
        VertexId::Name(s.into())
    }

    pub fn index(&self) -> Option<i64> {
        match self {
            VertexId::Index(i) => Some(*i),
            VertexId::Name(_) => None,
        }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexId::Index(i) => write!(f, "{i}"),
            VertexId::Name(s) => f.write_str(s),
        }
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId::Name(s.to_string())
    }
}

impl From<i64> for VertexId {
    fn from(i: i64) -> Self {
        VertexId::Index(i)
    }
}

/// Anything that can enumerate the arrows around a vertex: finite quivers,
/// the built-in infinite families and windowed restrictions of either.
///
/// Enumerations are `(neighbor, multiplicity)` pairs with positive
/// multiplicities, sorted by neighbor.
pub trait QuiverSource {
    fn contains(&self, v: &VertexId) -> bool;

    fn out_arrows(&self, v: &VertexId) -> Vec<(VertexId, u32)>;

    fn in_arrows(&self, v: &VertexId) -> Vec<(VertexId, u32)>;

    fn arrow_count(&self, from: &VertexId, to: &VertexId) -> u32 {
        self.out_arrows(from)
            .into_iter()
            .find(|(t, _)| t == to)
            .map_or(0, |(_, m)| m)
    }

    /// Every vertex, in ascending order, when there are finitely many.
    fn finite_vertices(&self) -> Option<Vec<VertexId>>;

    /// Whether the underlying unoriented graph is known to be a tree. Sphere
    /// completeness certificates on windows rely on it.
    fn underlying_is_tree(&self) -> bool {
        false
    }

    /// Interpret a command-line token as a vertex: a declared name first,
    /// then an integer index.
    fn resolve(&self, token: &str) -> Option<VertexId> {
        let name = VertexId::Name(token.to_string());
        if self.contains(&name) {
            return Some(name);
        }
        token
            .parse::<i64>()
            .ok()
            .map(VertexId::Index)
            .filter(|v| self.contains(v))
    }
}

/// Distinct neighbors (either direction) of `v`, excluding `v` itself.
pub fn neighbors<Q: QuiverSource + ?Sized>(q: &Q, v: &VertexId) -> BTreeSet<VertexId> {
    q.out_arrows(v)
        .into_iter()
        .chain(q.in_arrows(v))
        .map(|(u, _)| u)
        .filter(|u| u != v)
        .collect()
}

/// A finite quiver: a vertex set and a multiset of arrows, with
/// multiplicities stored as numbers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Quiver {
    vertices: BTreeSet<VertexId>,
    out: BTreeMap<VertexId, BTreeMap<VertexId, u32>>,
    inc: BTreeMap<VertexId, BTreeMap<VertexId, u32>>,
}

impl Quiver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a quiver from string-named vertices and `(src, dst, mult)`
    /// arrows. Endpoints are declared implicitly.
    pub fn from_named(vertices: &[&str], arrows: &[(&str, &str, u32)]) -> Self {
        let mut q = Quiver::new();
        for v in vertices {
            q.add_vertex(VertexId::name(*v));
        }
        for (s, t, m) in arrows {
            q.add_arrow(VertexId::name(*s), VertexId::name(*t), *m);
        }
        q
    }

    pub fn add_vertex(&mut self, v: VertexId) -> bool {
        self.vertices.insert(v)
    }

    /// Adds `mult` parallel arrows `src -> dst`, declaring both endpoints.
    /// A multiplicity of zero is ignored.
    pub fn add_arrow(&mut self, src: VertexId, dst: VertexId, mult: u32) {
        if mult == 0 {
            return;
        }
        self.vertices.insert(src.clone());
        self.vertices.insert(dst.clone());
        *self
            .out
            .entry(src.clone())
            .or_default()
            .entry(dst.clone())
            .or_insert(0) += mult;
        *self.inc.entry(dst).or_default().entry(src).or_insert(0) += mult;
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.iter()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Arrows as `(src, dst, multiplicity)`, sorted by `(src, dst)`.
    pub fn arrows(&self) -> impl Iterator<Item = (&VertexId, &VertexId, u32)> {
        self.out
            .iter()
            .flat_map(|(s, ts)| ts.iter().map(move |(t, m)| (s, t, *m)))
    }

    /// Total number of arrows, counting multiplicity.
    pub fn arrow_total(&self) -> u64 {
        self.arrows().map(|(_, _, m)| u64::from(m)).sum()
    }

    pub fn successors(&self, v: &VertexId) -> impl Iterator<Item = (&VertexId, u32)> {
        self.out
            .get(v)
            .into_iter()
            .flat_map(|ts| ts.iter().map(|(t, m)| (t, *m)))
    }

    pub fn predecessors(&self, v: &VertexId) -> impl Iterator<Item = (&VertexId, u32)> {
        self.inc
            .get(v)
            .into_iter()
            .flat_map(|ss| ss.iter().map(|(s, m)| (s, *m)))
    }

    /// The quiver with every arrow reversed.
    pub fn opposite(&self) -> Quiver {
        Quiver {
            vertices: self.vertices.clone(),
            out: self.inc.clone(),
            inc: self.out.clone(),
        }
    }

    /// The full subquiver on the vertices accepted by `keep`.
    pub fn induced(&self, keep: impl Fn(&VertexId) -> bool) -> Quiver {
        let mut q = Quiver::new();
        for v in self.vertices.iter().filter(|v| keep(v)) {
            q.add_vertex(v.clone());
        }
        for (s, t, m) in self.arrows() {
            if keep(s) && keep(t) {
                q.add_arrow(s.clone(), t.clone(), m);
            }
        }
        q
    }

    /// One oriented cycle as a closed vertex sequence (first = last), if any.
    pub fn find_cycle(&self) -> Option<Vec<VertexId>> {
        let nodes: Vec<VertexId> = self.vertices.iter().cloned().collect();
        graph::find_cycle(&nodes, |v| {
            self.successors(v).map(|(t, _)| t.clone()).collect()
        })
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// Maximal unoriented-connected vertex sets, each sorted, ordered by
    /// their smallest vertex.
    pub fn connected_components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut components = Vec::new();
        for start in &self.vertices {
            if seen.contains(start) {
                continue;
            }
            let mut cell = BTreeSet::new();
            let mut queue = VecDeque::from([start.clone()]);
            seen.insert(start.clone());
            while let Some(v) = queue.pop_front() {
                for u in neighbors(self, &v) {
                    if seen.insert(u.clone()) {
                        queue.push_back(u);
                    }
                }
                cell.insert(v);
            }
            components.push(cell);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// No rays and no corays. For a finite quiver a ray must revisit a
    /// vertex, so this is acyclicity.
    pub fn is_path_finite(&self) -> bool {
        self.is_acyclic()
    }

    /// The file format: sorted `vertex` lines, then `arrow` lines sorted by
    /// `(src, dst)` with the multiplicity only when it exceeds one.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            out.push_str(&format!("vertex {v}\n"));
        }
        for (s, t, m) in self.arrows() {
            if m == 1 {
                out.push_str(&format!("arrow {s} {t}\n"));
            } else {
                out.push_str(&format!("arrow {s} {t} {m}\n"));
            }
        }
        out
    }
}

impl QuiverSource for Quiver {
    fn contains(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    fn out_arrows(&self, v: &VertexId) -> Vec<(VertexId, u32)> {
        self.successors(v).map(|(t, m)| (t.clone(), m)).collect()
    }

    fn in_arrows(&self, v: &VertexId) -> Vec<(VertexId, u32)> {
        self.predecessors(v).map(|(s, m)| (s.clone(), m)).collect()
    }

    fn arrow_count(&self, from: &VertexId, to: &VertexId) -> u32 {
        self.out
            .get(from)
            .and_then(|ts| ts.get(to))
            .copied()
            .unwrap_or(0)
    }

    fn finite_vertices(&self) -> Option<Vec<VertexId>> {
        Some(self.vertices.iter().cloned().collect())
    }
}

/// Whether arrow endpoints must be declared with a `vertex` line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Lenient,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: usize,
    pub message: String,
    pub witness: Vec<VertexId>,
}

/// Non-fatal findings from parsing. Empty iff the text was a fully explicit
/// description of the quiver.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn warn(&mut self, line: usize, message: String, witness: Vec<VertexId>) {
        self.0.push(Diagnostic {
            severity: Severity::Warning,
            line,
            message,
            witness,
        });
    }
}

pub fn parse_quiver(text: &str, mode: ParseMode) -> Result<Quiver> {
    parse_quiver_with_diagnostics(text, mode).map(|(q, _)| q)
}

/// Parses the line-based format:
///
/// ```text
/// # comment
/// vertex <id>
/// arrow <src> <dst> [multiplicity]
/// ```
///
/// Vertex declarations may appear anywhere. Repeated arrow lines add up.
pub fn parse_quiver_with_diagnostics(text: &str, mode: ParseMode) -> Result<(Quiver, Diagnostics)> {
    let mut declared = BTreeSet::new();
    let mut arrows = Vec::new();
    let mut diagnostics = Diagnostics::default();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let syntax = |message: &str| Error::Syntax {
            line,
            message: message.to_string(),
        };
        match fields[0] {
            "vertex" => {
                if fields.len() != 2 {
                    return Err(syntax("expected `vertex <id>`"));
                }
                let v = VertexId::name(fields[1]);
                if !declared.insert(v.clone()) {
                    diagnostics.warn(line, format!("vertex `{v}` declared twice"), vec![v]);
                }
            }
            "arrow" => {
                if !(3..=4).contains(&fields.len()) {
                    return Err(syntax("expected `arrow <src> <dst> [multiplicity]`"));
                }
                let mult = match fields.get(3) {
                    None => 1,
                    Some(m) => match m.parse::<u32>() {
                        Ok(0) => return Err(syntax("multiplicity must be at least 1")),
                        Ok(m) => m,
                        Err(_) => return Err(syntax("multiplicity must be a positive integer")),
                    },
                };
                arrows.push((line, VertexId::name(fields[1]), VertexId::name(fields[2]), mult));
            }
            other => return Err(syntax(&format!("unknown directive `{other}`"))),
        }
    }

    let mut q = Quiver::new();
    for v in &declared {
        q.add_vertex(v.clone());
    }
    for (line, s, t, m) in arrows {
        for end in [&s, &t] {
            if !declared.contains(end) {
                if mode == ParseMode::Strict {
                    return Err(Error::UndeclaredEndpoint {
                        line,
                        vertex: end.to_string(),
                    });
                }
                diagnostics.warn(
                    line,
                    format!("vertex `{end}` created implicitly"),
                    vec![end.clone()],
                );
                declared.insert(end.clone());
            }
        }
        q.add_arrow(s, t, m);
    }
    Ok((q, diagnostics))
}

/// Verdict of a local finiteness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalFiniteness {
    /// The quiver is finite, so every vertex has finitely many neighbors.
    Finite,
    /// Every probed vertex enumerated finitely many neighbors. Says nothing
    /// about vertices outside the probe.
    WithinProbe {
        neighbor_counts: BTreeMap<VertexId, usize>,
    },
}

impl LocalFiniteness {
    pub fn holds(&self) -> bool {
        true
    }

    pub fn max_neighbors(&self) -> Option<usize> {
        match self {
            LocalFiniteness::Finite => None,
            LocalFiniteness::WithinProbe { neighbor_counts } => {
                neighbor_counts.values().copied().max()
            }
        }
    }
}

/// Local finiteness: exact for finite sources, a probe over `probe` for
/// infinite ones (probe vertices outside the quiver are skipped).
pub fn is_locally_finite<Q: QuiverSource + ?Sized>(q: &Q, probe: &[VertexId]) -> LocalFiniteness {
    if q.finite_vertices().is_some() {
        return LocalFiniteness::Finite;
    }
    let neighbor_counts = probe
        .iter()
        .filter(|v| q.contains(v))
        .map(|v| (v.clone(), neighbors(q, v).len()))
        .collect();
    LocalFiniteness::WithinProbe { neighbor_counts }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> Quiver {
        Quiver::from_named(&["x", "y"], &[("x", "y", 1)])
    }

    fn cyclic() -> Quiver {
        Quiver::from_named(&[], &[("a", "b", 1), ("b", "a", 1)])
    }

    #[test]
    fn parses_declared_quiver() {
        let q = parse_quiver("vertex x\nvertex y\narrow x y", ParseMode::Strict).unwrap();
        assert_eq!(q, a2());
    }

    #[test]
    fn lenient_creates_endpoints() {
        let (q, diag) = parse_quiver_with_diagnostics("arrow x y 2", ParseMode::Lenient).unwrap();
        assert_eq!(q, Quiver::from_named(&[], &[("x", "y", 2)]));
        assert_eq!(diag.0.len(), 2);
        assert!(parse_quiver("arrow x y 2", ParseMode::Strict).is_err());
    }

    #[test]
    fn order_insensitive_declarations() {
        let q = parse_quiver("arrow x y\nvertex y\nvertex x # late", ParseMode::Strict).unwrap();
        assert_eq!(q, a2());
    }

    #[test]
    fn malformed_arrow_reports_line() {
        assert_eq!(
            parse_quiver("arrow x", ParseMode::Lenient),
            Err(Error::Syntax {
                line: 1,
                message: "expected `arrow <src> <dst> [multiplicity]`".into()
            })
        );
        assert!(matches!(
            parse_quiver("\n\narrow x y 0", ParseMode::Lenient),
            Err(Error::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse_quiver("edge x y", ParseMode::Lenient),
            Err(Error::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn serialize_is_sorted() {
        let q = Quiver::from_named(&["z"], &[("b", "a", 1), ("a", "b", 3)]);
        assert_eq!(
            q.serialize(),
            "vertex a\nvertex b\nvertex z\narrow a b 3\narrow b a\n"
        );
    }

    #[test]
    fn acyclicity() {
        assert!(a2().is_acyclic());
        assert!(Quiver::new().is_acyclic());
        let witness = cyclic().find_cycle().unwrap();
        assert_eq!(witness, vec!["a".into(), "b".into(), "a".into()]);
        let looped = Quiver::from_named(&[], &[("x", "x", 1)]);
        assert_eq!(looped.find_cycle().unwrap(), vec!["x".into(), "x".into()]);
    }

    #[test]
    fn components() {
        assert_eq!(a2().connected_components().len(), 1);
        let two = Quiver::from_named(&["x", "y"], &[]);
        assert_eq!(two.connected_components().len(), 2);
        let mixed = Quiver::from_named(&["z"], &[("x", "y", 1)]);
        let cells = mixed.connected_components();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0], BTreeSet::from(["x".into(), "y".into()]));
        assert_eq!(cells[1], BTreeSet::from(["z".into()]));
    }

    #[test]
    fn path_finiteness() {
        assert!(a2().is_path_finite());
        assert!(!cyclic().is_path_finite());
        let line = Quiver::from_named(&[], &[("a", "b", 1), ("b", "c", 1)]);
        assert!(line.is_path_finite());
    }

    #[test]
    fn opposite_reverses() {
        let op = a2().opposite();
        assert_eq!(op, Quiver::from_named(&[], &[("y", "x", 1)]));
        assert_eq!(op.opposite(), a2());
        assert_eq!(cyclic().opposite(), cyclic());
        assert_eq!(Quiver::new().opposite(), Quiver::new());
    }

    #[test]
    fn finite_is_locally_finite() {
        assert_eq!(is_locally_finite(&a2(), &[]), LocalFiniteness::Finite);
    }

    #[test]
    fn resolve_prefers_names() {
        let q = Quiver::from_named(&["7"], &[]);
        assert_eq!(q.resolve("7"), Some(VertexId::name("7")));
        assert_eq!(q.resolve("8"), None);
    }
}
