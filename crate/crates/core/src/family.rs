//! Built-in infinite quivers and finite windows onto them.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quiver::{neighbors, Quiver, QuiverSource, VertexId};
use crate::zq::{scope_vertices, BaseScope};

/// The fixed families shipped with the tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Vertices `Z`, arrows `i -> i+1`.
    AInfInfLinear,
    /// Vertices `N`, arrows `i -> i+1`.
    AInfRay,
    /// Vertices `Z`, arrows `i -> i+1` and an arc `-k -> k` for every `k >= 1`.
    Figure1Right,
    /// Two vertices `a`, `b` with arrows `a -> b` and `b -> a`.
    A1TildeCyclic,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::AInfInfLinear,
        Family::AInfRay,
        Family::Figure1Right,
        Family::A1TildeCyclic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::AInfInfLinear => "a-inf-inf-linear",
            Family::AInfRay => "a-inf-ray",
            Family::Figure1Right => "figure1-right",
            Family::A1TildeCyclic => "a1-tilde-cyclic",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// A quiver whose arrows are produced on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LazyQuiver {
    family: Family,
}

pub fn family(name: &str) -> Result<LazyQuiver> {
    Ok(LazyQuiver::new(name.parse()?))
}

impl LazyQuiver {
    pub fn new(family: Family) -> Self {
        LazyQuiver { family }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Restriction to base indices `[-radius, radius]`. Finite families are
    /// returned whole.
    pub fn window(&self, radius: i64) -> WindowedQuiver {
        let scope = if self.finite_vertices().is_some() {
            BaseScope::All
        } else {
            BaseScope::Interval {
                lo: -radius,
                hi: radius,
            }
        };
        WindowedQuiver::new(self, &scope).expect("family scopes are finite")
    }
}

fn named(s: &str) -> VertexId {
    VertexId::name(s)
}

impl QuiverSource for LazyQuiver {
    fn contains(&self, v: &VertexId) -> bool {
        match (self.family, v) {
            (Family::AInfInfLinear | Family::Figure1Right, VertexId::Index(_)) => true,
            (Family::AInfRay, VertexId::Index(i)) => *i >= 0,
            (Family::A1TildeCyclic, VertexId::Name(s)) => s == "a" || s == "b",
            _ => false,
        }
    }

    fn out_arrows(&self, v: &VertexId) -> Vec<(VertexId, u32)> {
        if !self.contains(v) {
            return Vec::new();
        }
        match (self.family, v) {
            (Family::AInfInfLinear | Family::AInfRay, VertexId::Index(i)) => {
                vec![(VertexId::Index(i + 1), 1)]
            }
            (Family::Figure1Right, VertexId::Index(i)) => {
                let mut out = vec![(VertexId::Index(i + 1), 1)];
                if *i <= -1 {
                    out.push((VertexId::Index(-i), 1));
                }
                out
            }
            (Family::A1TildeCyclic, VertexId::Name(s)) if s == "a" => vec![(named("b"), 1)],
            (Family::A1TildeCyclic, _) => vec![(named("a"), 1)],
            _ => Vec::new(),
        }
    }

    fn in_arrows(&self, v: &VertexId) -> Vec<(VertexId, u32)> {
        if !self.contains(v) {
            return Vec::new();
        }
        match (self.family, v) {
            (Family::AInfInfLinear, VertexId::Index(i)) => vec![(VertexId::Index(i - 1), 1)],
            (Family::AInfRay, VertexId::Index(i)) => {
                if *i >= 1 {
                    vec![(VertexId::Index(i - 1), 1)]
                } else {
                    Vec::new()
                }
            }
            (Family::Figure1Right, VertexId::Index(i)) => {
                let mut inc = Vec::new();
                if *i >= 1 {
                    inc.push((VertexId::Index(-i), 1));
                }
                inc.push((VertexId::Index(i - 1), 1));
                inc
            }
            (Family::A1TildeCyclic, VertexId::Name(s)) if s == "a" => vec![(named("b"), 1)],
            (Family::A1TildeCyclic, _) => vec![(named("a"), 1)],
            _ => Vec::new(),
        }
    }

    fn finite_vertices(&self) -> Option<Vec<VertexId>> {
        match self.family {
            Family::A1TildeCyclic => Some(vec![named("a"), named("b")]),
            _ => None,
        }
    }

    fn underlying_is_tree(&self) -> bool {
        matches!(self.family, Family::AInfInfLinear | Family::AInfRay)
    }
}

/// A finite full subquiver cut out of a (possibly infinite) source, together
/// with the vertices where the cut happened.
///
/// Distances computed inside the window are upper bounds for the true ones;
/// when the source is a tree they are exact, and `gates` bound what lies
/// outside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowedQuiver {
    pub quiver: Quiver,
    /// Window vertices with at least one neighbor outside the window.
    pub gates: BTreeSet<VertexId>,
    pub tree: bool,
    /// Index interval of the window, when it was cut by one.
    pub span: Option<(i64, i64)>,
}

impl WindowedQuiver {
    pub fn new<Q: QuiverSource + ?Sized>(q: &Q, scope: &BaseScope) -> Result<Self> {
        let inside: BTreeSet<VertexId> = scope_vertices(q, scope)?.into_iter().collect();
        let mut quiver = Quiver::new();
        let mut gates = BTreeSet::new();
        for v in &inside {
            quiver.add_vertex(v.clone());
            for (t, m) in q.out_arrows(v) {
                if inside.contains(&t) {
                    quiver.add_arrow(v.clone(), t, m);
                }
            }
            if neighbors(q, v).iter().any(|u| !inside.contains(u)) {
                gates.insert(v.clone());
            }
        }
        let span = match scope {
            BaseScope::Interval { lo, hi } if q.finite_vertices().is_none() => Some((*lo, *hi)),
            _ => None,
        };
        Ok(WindowedQuiver {
            quiver,
            gates,
            tree: q.underlying_is_tree(),
            span,
        })
    }

    /// A finite quiver viewed as a window onto itself.
    pub fn whole(quiver: Quiver) -> Self {
        WindowedQuiver {
            quiver,
            gates: BTreeSet::new(),
            tree: false,
            span: None,
        }
    }

    /// True when nothing was cut off.
    pub fn is_exact(&self) -> bool {
        self.gates.is_empty()
    }

    /// Same cut, different quiver on the same vertex set (used for sections,
    /// whose underlying graph is that of the source).
    pub fn with_quiver(&self, quiver: Quiver) -> Self {
        WindowedQuiver {
            quiver,
            gates: self.gates.clone(),
            tree: self.tree,
            span: self.span,
        }
    }

    /// The full subwindow on the vertices accepted by `keep`. Kept vertices
    /// adjacent to dropped ones become gates.
    pub fn shrink(&self, keep: impl Fn(&VertexId) -> bool) -> Self {
        let quiver = self.quiver.induced(&keep);
        let gates = quiver
            .vertices()
            .filter(|v| self.gates.contains(v) || neighbors(&self.quiver, v).iter().any(|u| !keep(u)))
            .cloned()
            .collect();
        WindowedQuiver {
            quiver,
            gates,
            tree: self.tree,
            span: self.span,
        }
    }

    /// The middle half of an interval window, or `None` when the window was
    /// not cut by an interval.
    pub fn halved(&self) -> Option<Self> {
        let (lo, hi) = self.span?;
        let quarter = (hi - lo) / 4;
        let (lo, hi) = (lo + quarter, hi - quarter);
        let mut inner = self.shrink(|v| v.index().is_some_and(|i| lo <= i && i <= hi));
        inner.span = Some((lo, hi));
        Some(inner)
    }
}

impl QuiverSource for WindowedQuiver {
    fn contains(&self, v: &VertexId) -> bool {
        self.quiver.contains(v)
    }

    fn out_arrows(&self, v: &VertexId) -> Vec<(VertexId, u32)> {
        self.quiver.out_arrows(v)
    }

    fn in_arrows(&self, v: &VertexId) -> Vec<(VertexId, u32)> {
        self.quiver.in_arrows(v)
    }

    fn arrow_count(&self, from: &VertexId, to: &VertexId) -> u32 {
        self.quiver.arrow_count(from, to)
    }

    fn finite_vertices(&self) -> Option<Vec<VertexId>> {
        self.quiver.finite_vertices()
    }

    fn underlying_is_tree(&self) -> bool {
        self.tree
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{is_locally_finite, LocalFiniteness};

    fn ids(v: Vec<(VertexId, u32)>) -> Vec<VertexId> {
        v.into_iter().map(|(u, _)| u).collect()
    }

    #[test]
    fn names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert_eq!(family("nope"), Err(Error::UnknownFamily("nope".into())));
    }

    #[test]
    fn family_arrows() {
        let lin = LazyQuiver::new(Family::AInfInfLinear);
        assert_eq!(ids(lin.out_arrows(&0.into())), vec![1.into()]);
        let fig = LazyQuiver::new(Family::Figure1Right);
        assert_eq!(ids(fig.in_arrows(&3.into())), vec![(-3).into(), 2.into()]);
        assert_eq!(ids(fig.out_arrows(&(-3).into())), vec![(-2).into(), 3.into()]);
        let ray = LazyQuiver::new(Family::AInfRay);
        assert!(ray.in_arrows(&0.into()).is_empty());
        assert!(!ray.contains(&(-1).into()));
        let cyc = LazyQuiver::new(Family::A1TildeCyclic);
        let q = WindowedQuiver::new(&cyc, &BaseScope::All).unwrap().quiver;
        assert_eq!(q, Quiver::from_named(&[], &[("a", "b", 1), ("b", "a", 1)]));
    }

    #[test]
    fn probes_are_finite() {
        let lin = LazyQuiver::new(Family::AInfInfLinear);
        let probe: Vec<VertexId> = (-3..=3).map(VertexId::Index).collect();
        let verdict = is_locally_finite(&lin, &probe);
        assert!(matches!(verdict, LocalFiniteness::WithinProbe { .. }));
        assert_eq!(verdict.max_neighbors(), Some(2));
        let fig = LazyQuiver::new(Family::Figure1Right);
        let verdict = is_locally_finite(&fig, &[0.into()]);
        assert_eq!(verdict.max_neighbors(), Some(2));
    }

    #[test]
    fn window_gates() {
        let w = LazyQuiver::new(Family::AInfInfLinear).window(3);
        assert_eq!(w.quiver.vertex_count(), 7);
        assert_eq!(w.quiver.arrow_total(), 6);
        assert_eq!(w.gates, BTreeSet::from([(-3).into(), 3.into()]));
        let inner = w.halved().unwrap();
        assert_eq!(inner.span, Some((-2, 2)));
        assert_eq!(inner.gates, BTreeSet::from([(-2).into(), 2.into()]));
        let fig = LazyQuiver::new(Family::Figure1Right).window(4);
        // arcs -k -> k stay inside a symmetric window
        assert_eq!(fig.quiver.arrow_total(), 8 + 4);
        assert!(!fig.tree);
    }
}
