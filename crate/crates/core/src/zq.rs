//! The stable translation quiver `ZQ`.
//!
//! Vertices are pairs `(n, x)`. There are as many arrows `(i, x) -> (i, y)`
//! as arrows `x -> y` in `Q`, as many arrows `(i, x) -> (i + 1, y)` as arrows
//! `y -> x` in `Q`, and no others. The translation is `(i, x) |-> (i - 1, x)`.
//! Slices never decrease along arrows.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::quiver::{Quiver, QuiverSource, VertexId};

/// A vertex `(slice, base)` of `ZQ`. Written `slice:base`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZVertex {
    pub slice: i64,
    pub base: VertexId,
}

impl ZVertex {
    pub fn new(slice: i64, base: impl Into<VertexId>) -> Self {
        ZVertex {
            slice,
            base: base.into(),
        }
    }

    /// Parses `n:base`, resolving the base against `q`.
    pub fn parse<Q: QuiverSource + ?Sized>(token: &str, q: &Q) -> Result<Self> {
        let (slice, base) = split_zvertex(token)?;
        let base = q
            .resolve(base)
            .ok_or_else(|| Error::UnknownVertex(VertexId::name(base)))?;
        Ok(ZVertex { slice, base })
    }
}

/// Splits `n:base` at the first colon.
pub fn split_zvertex(token: &str) -> Result<(i64, &str)> {
    let malformed = || Error::MalformedZVertex(token.to_string());
    let (slice, base) = token.split_once(':').ok_or_else(malformed)?;
    let slice = slice.trim().parse::<i64>().map_err(|_| malformed())?;
    if base.is_empty() {
        return Err(malformed());
    }
    Ok((slice, base))
}

impl fmt::Display for ZVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.slice, self.base)
    }
}

/// Which base vertices a window covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseScope {
    /// Every vertex; only meaningful for finite quivers.
    All,
    /// Integer-indexed vertices with index in `[lo, hi]`. Named vertices are
    /// always in scope.
    Interval { lo: i64, hi: i64 },
}

impl BaseScope {
    pub fn contains(&self, v: &VertexId) -> bool {
        match (self, v) {
            (BaseScope::All, _) | (BaseScope::Interval { .. }, VertexId::Name(_)) => true,
            (BaseScope::Interval { lo, hi }, VertexId::Index(i)) => lo <= i && i <= hi,
        }
    }
}

/// The base vertices of `q` inside `scope`, ascending.
pub fn scope_vertices<Q: QuiverSource + ?Sized>(q: &Q, scope: &BaseScope) -> Result<Vec<VertexId>> {
    match (q.finite_vertices(), scope) {
        (Some(all), _) => Ok(all.into_iter().filter(|v| scope.contains(v)).collect()),
        (None, BaseScope::All) => Err(Error::UnboundedScope),
        (None, BaseScope::Interval { lo, hi }) => Ok((*lo..=*hi)
            .map(VertexId::Index)
            .filter(|v| q.contains(v))
            .collect()),
    }
}

/// A bounded region of `ZQ`: slices `[lo, hi]` times a base scope. An empty
/// slice range (`lo > hi`) is allowed and covers nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
    pub scope: BaseScope,
}

impl Window {
    pub fn slices(lo: i64, hi: i64) -> Self {
        Window {
            lo,
            hi,
            scope: BaseScope::All,
        }
    }

    /// Slices `[-r, r]` and base indices `[-r, r]`.
    pub fn radius(r: i64) -> Self {
        Window {
            lo: -r,
            hi: r,
            scope: BaseScope::Interval { lo: -r, hi: r },
        }
    }

    pub fn with_slices(self, lo: i64, hi: i64) -> Self {
        Window { lo, hi, ..self }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains_slice(&self, slice: i64) -> bool {
        self.lo <= slice && slice <= self.hi
    }

    pub fn contains(&self, v: &ZVertex) -> bool {
        self.contains_slice(v.slice) && self.scope.contains(&v.base)
    }
}

/// Number of arrows `a -> b` in `ZQ`.
pub fn arrow_multiplicity<Q: QuiverSource + ?Sized>(q: &Q, a: &ZVertex, b: &ZVertex) -> u32 {
    if b.slice == a.slice {
        q.arrow_count(&a.base, &b.base)
    } else if b.slice == a.slice + 1 {
        q.arrow_count(&b.base, &a.base)
    } else {
        0
    }
}

/// `tau^k`: moves `k` slices down. Negative `k` applies the inverse.
pub fn translate(a: &ZVertex, k: i64) -> ZVertex {
    ZVertex {
        slice: a.slice - k,
        base: a.base.clone(),
    }
}

/// The natural embedding `x |-> (0, x)`.
pub fn embed<Q: QuiverSource + ?Sized>(q: &Q, x: &VertexId) -> Result<ZVertex> {
    if !q.contains(x) {
        return Err(Error::UnknownVertex(x.clone()));
    }
    Ok(ZVertex::new(0, x.clone()))
}

pub fn out_neighbors<Q: QuiverSource + ?Sized>(q: &Q, a: &ZVertex) -> Vec<(ZVertex, u32)> {
    let same = q
        .out_arrows(&a.base)
        .into_iter()
        .map(|(y, m)| (ZVertex::new(a.slice, y), m));
    let next = q
        .in_arrows(&a.base)
        .into_iter()
        .map(|(y, m)| (ZVertex::new(a.slice + 1, y), m));
    same.chain(next).collect()
}

pub fn in_neighbors<Q: QuiverSource + ?Sized>(q: &Q, a: &ZVertex) -> Vec<(ZVertex, u32)> {
    let prev = q
        .out_arrows(&a.base)
        .into_iter()
        .map(|(y, m)| (ZVertex::new(a.slice - 1, y), m));
    let same = q
        .in_arrows(&a.base)
        .into_iter()
        .map(|(y, m)| (ZVertex::new(a.slice, y), m));
    prev.chain(same).collect()
}

/// The full subquiver of `ZQ` on the vertices of a window, with the
/// translation restricted to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slab {
    window: Window,
    vertices: Vec<ZVertex>,
    index: BTreeMap<ZVertex, usize>,
    out: Vec<Vec<(usize, u32)>>,
    inc: Vec<Vec<(usize, u32)>>,
}

pub fn slab<Q: QuiverSource + ?Sized>(q: &Q, w: &Window) -> Result<Slab> {
    let bases = if w.is_empty() {
        Vec::new()
    } else {
        scope_vertices(q, &w.scope)?
    };
    let vertices: Vec<ZVertex> = (w.lo..=w.hi)
        .flat_map(|s| bases.iter().map(move |b| ZVertex::new(s, b.clone())))
        .collect();
    let index: BTreeMap<ZVertex, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i))
        .collect();
    let mut out = vec![Vec::new(); vertices.len()];
    let mut inc = vec![Vec::new(); vertices.len()];
    for (i, v) in vertices.iter().enumerate() {
        for (u, m) in out_neighbors(q, v) {
            if let Some(&j) = index.get(&u) {
                out[i].push((j, m));
                inc[j].push((i, m));
            }
        }
    }
    for list in out.iter_mut().chain(inc.iter_mut()) {
        list.sort_unstable();
    }
    Ok(Slab {
        window: *w,
        vertices,
        index,
        out,
        inc,
    })
}

impl Slab {
    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Vertices sorted by `(slice, base)`.
    pub fn vertices(&self) -> &[ZVertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: &ZVertex) -> bool {
        self.index.contains_key(v)
    }

    pub fn index_of(&self, v: &ZVertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn vertex(&self, i: usize) -> &ZVertex {
        &self.vertices[i]
    }

    /// `(target index, multiplicity)` for arrows leaving vertex `i`.
    pub fn successors(&self, i: usize) -> &[(usize, u32)] {
        &self.out[i]
    }

    pub fn predecessors(&self, i: usize) -> &[(usize, u32)] {
        &self.inc[i]
    }

    pub fn arrows(&self) -> impl Iterator<Item = (&ZVertex, &ZVertex, u32)> + '_ {
        self.out.iter().enumerate().flat_map(move |(i, list)| {
            list.iter()
                .map(move |&(j, m)| (&self.vertices[i], &self.vertices[j], m))
        })
    }

    pub fn arrow_count(&self, a: &ZVertex, b: &ZVertex) -> u32 {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.out[i]
                .iter()
                .find(|(t, _)| *t == j)
                .map_or(0, |(_, m)| *m),
            _ => 0,
        }
    }

    /// The translation restricted to the slab: absent at the lower boundary.
    pub fn tau(&self, v: &ZVertex) -> Option<ZVertex> {
        let t = translate(v, 1);
        self.contains(&t).then_some(t)
    }

    pub fn tau_inverse(&self, v: &ZVertex) -> Option<ZVertex> {
        let t = translate(v, -1);
        self.contains(&t).then_some(t)
    }

    /// First pair `(x, y)` with `#(y -> x) != #(tau x -> y)`, among pairs
    /// where `tau x` lies in the slab.
    pub fn translation_law_violation(&self) -> Option<(ZVertex, ZVertex)> {
        for x in &self.vertices {
            let Some(tx) = self.tau(x) else { continue };
            for y in &self.vertices {
                if self.arrow_count(y, x) != self.arrow_count(&tx, y) {
                    return Some((x.clone(), y.clone()));
                }
            }
        }
        None
    }

    /// The slab as a plain quiver with vertices named `slice:base`.
    pub fn to_quiver(&self) -> Quiver {
        let mut q = Quiver::new();
        for v in &self.vertices {
            q.add_vertex(VertexId::Name(v.to_string()));
        }
        for (a, b, m) in self.arrows() {
            q.add_arrow(VertexId::Name(a.to_string()), VertexId::Name(b.to_string()), m);
        }
        q
    }

    /// Vertices reachable from `start` inside the slab.
    pub fn reachable_from(&self, start: usize) -> BTreeSet<usize> {
        crate::graph::reachable(&start, |&i| self.out[i].iter().map(|(j, _)| *j).collect())
    }

    /// Vertices that reach `end` inside the slab.
    pub fn reaching(&self, end: usize) -> BTreeSet<usize> {
        crate::graph::reachable(&end, |&i| self.inc[i].iter().map(|(j, _)| *j).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> Quiver {
        Quiver::from_named(&["x", "y"], &[("x", "y", 1)])
    }

    fn z(s: i64, b: &str) -> ZVertex {
        ZVertex::new(s, b)
    }

    #[test]
    fn multiplicity_rule() {
        let q = a2();
        assert_eq!(arrow_multiplicity(&q, &z(0, "x"), &z(0, "y")), 1);
        assert_eq!(arrow_multiplicity(&q, &z(0, "y"), &z(1, "x")), 1);
        assert_eq!(arrow_multiplicity(&q, &z(0, "x"), &z(1, "y")), 0);
        assert_eq!(arrow_multiplicity(&q, &z(0, "y"), &z(0, "x")), 0);
        let kronecker = Quiver::from_named(&[], &[("x", "y", 2)]);
        assert_eq!(arrow_multiplicity(&kronecker, &z(0, "x"), &z(0, "y")), 2);
    }

    #[test]
    fn translation() {
        assert_eq!(translate(&z(0, "x"), 1), z(-1, "x"));
        assert_eq!(translate(&z(0, "x"), -2), z(2, "x"));
        assert_eq!(translate(&z(5, "x"), 0), z(5, "x"));
        assert_eq!(translate(&translate(&z(3, "x"), 4), -4), z(3, "x"));
    }

    #[test]
    fn embedding() {
        let q = a2();
        assert_eq!(embed(&q, &"x".into()).unwrap(), z(0, "x"));
        assert_eq!(translate(&embed(&q, &"y".into()).unwrap(), 0), z(0, "y"));
        assert_eq!(embed(&q, &"w".into()), Err(Error::UnknownVertex("w".into())));
    }

    #[test]
    fn neighbors_follow_rule() {
        let q = a2();
        assert_eq!(out_neighbors(&q, &z(0, "x")), vec![(z(0, "y"), 1)]);
        assert_eq!(out_neighbors(&q, &z(0, "y")), vec![(z(1, "x"), 1)]);
        assert_eq!(in_neighbors(&q, &z(1, "x")), vec![(z(0, "y"), 1)]);
        let lin = crate::family::LazyQuiver::new(crate::family::Family::AInfInfLinear);
        assert_eq!(
            out_neighbors(&lin, &ZVertex::new(0, 0)),
            vec![(ZVertex::new(0, 1), 1), (ZVertex::new(1, -1), 1)]
        );
    }

    #[test]
    fn a2_slab() {
        let s = slab(&a2(), &Window::slices(0, 1)).unwrap();
        assert_eq!(s.len(), 4);
        let arrows: Vec<_> = s.arrows().map(|(a, b, m)| (a.clone(), b.clone(), m)).collect();
        assert_eq!(
            arrows,
            vec![
                (z(0, "x"), z(0, "y"), 1),
                (z(0, "y"), z(1, "x"), 1),
                (z(1, "x"), z(1, "y"), 1),
            ]
        );
        assert_eq!(s.tau(&z(0, "x")), None);
        assert_eq!(s.tau(&z(1, "x")), Some(z(0, "x")));
        assert_eq!(s.translation_law_violation(), None);
    }

    #[test]
    fn empty_and_cyclic_slabs() {
        assert!(slab(&a2(), &Window::slices(1, 0)).unwrap().is_empty());
        let cyc = Quiver::from_named(&[], &[("a", "b", 1), ("b", "a", 1)]);
        let s = slab(&cyc, &Window::slices(0, 0)).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.arrow_count(&z(0, "a"), &z(0, "b")), 1);
        assert_eq!(s.arrow_count(&z(0, "b"), &z(0, "a")), 1);
    }

    #[test]
    fn zvertex_syntax() {
        let q = a2();
        assert_eq!(ZVertex::parse("-1:x", &q).unwrap(), z(-1, "x"));
        assert_eq!(z(-1, "x").to_string(), "-1:x");
        assert!(ZVertex::parse("x", &q).is_err());
        assert!(ZVertex::parse("a:x", &q).is_err());
        assert!(ZVertex::parse("0:w", &q).is_err());
        let lin = crate::family::LazyQuiver::new(crate::family::Family::AInfInfLinear);
        assert_eq!(ZVertex::parse("-1:2", &lin).unwrap(), ZVertex::new(-1, 2));
    }

    #[test]
    fn unbounded_scope_is_rejected() {
        let lin = crate::family::LazyQuiver::new(crate::family::Family::AInfInfLinear);
        assert_eq!(slab(&lin, &Window::slices(0, 1)), Err(Error::UnboundedScope));
        assert_eq!(slab(&lin, &Window::radius(2)).unwrap().len(), 25);
    }
}
