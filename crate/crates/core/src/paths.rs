//! Counting oriented and sectional paths in `ZQ`.
//!
//! Slices never decrease along arrows, so every path from `a` to `b` lives
//! in the slab on slices `[a.slice, b.slice]`; for a finite quiver that slab
//! is finite. Counts are exact big integers, with parallel arrows counted
//! separately. An oriented cycle on some `a`-to-`b` route makes the count
//! infinite and is returned as a witness.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::family::WindowedQuiver;
use crate::graph;
use crate::quiver::QuiverSource;
use crate::zq::{slab, translate, BaseScope, Slab, Window, ZVertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathCount {
    Finite(BigUint),
    /// A closed cycle `[v0, .., vk, v0]` reachable from the source and
    /// reaching the target.
    Infinite { witness: Vec<ZVertex> },
    /// Count inside a finite window cut from an infinite quiver.
    LowerBound(BigUint),
}

impl PathCount {
    pub fn finite(&self) -> Option<&BigUint> {
        match self {
            PathCount::Finite(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PathCount::Infinite { .. })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CountOptions {
    /// Restrict to paths `A_0 -> .. -> A_n` with `A_i != tau A_{i+2}`.
    pub sectional: bool,
    /// Leave out the empty path when source and target coincide.
    pub nontrivial_only: bool,
}

/// All oriented paths from `a` to `b`, including the empty one when `a = b`.
pub fn count_paths_zq<Q: QuiverSource + ?Sized>(q: &Q, a: &ZVertex, b: &ZVertex) -> Result<PathCount> {
    count_paths_with(q, a, b, CountOptions::default())
}

/// Sectional paths from `a` to `b`, including the empty one when `a = b`.
pub fn count_sectional_paths_zq<Q: QuiverSource + ?Sized>(
    q: &Q,
    a: &ZVertex,
    b: &ZVertex,
) -> Result<PathCount> {
    count_paths_with(
        q,
        a,
        b,
        CountOptions {
            sectional: true,
            ..CountOptions::default()
        },
    )
}

/// Paths from `x` to `tau^{-n} x`.
pub fn count_paths_to_shift<Q: QuiverSource + ?Sized>(q: &Q, x: &ZVertex, n: u32) -> Result<PathCount> {
    count_paths_zq(q, x, &translate(x, -i64::from(n)))
}

/// Exact count on a finite quiver.
pub fn count_paths_with<Q: QuiverSource + ?Sized>(
    q: &Q,
    a: &ZVertex,
    b: &ZVertex,
    options: CountOptions,
) -> Result<PathCount> {
    if q.finite_vertices().is_none() {
        return Err(Error::NotFinite);
    }
    count_in(q, a, b, &BaseScope::All, options)
}

/// Count inside a window of a possibly infinite quiver. Cut windows give a
/// lower bound, except that a cycle found inside the window is genuine.
pub fn count_paths_windowed<Q: QuiverSource + ?Sized>(
    q: &Q,
    a: &ZVertex,
    b: &ZVertex,
    scope: &BaseScope,
    options: CountOptions,
) -> Result<PathCount> {
    if q.finite_vertices().is_some() {
        return count_paths_with(q, a, b, options);
    }
    let view = WindowedQuiver::new(q, scope)?;
    Ok(match count_in(&view, a, b, &BaseScope::All, options)? {
        PathCount::Finite(n) if !view.is_exact() => PathCount::LowerBound(n),
        other => other,
    })
}

struct Route {
    slab: Slab,
    start: usize,
    end: usize,
    /// Slab vertices on some route from start to end.
    region: BTreeSet<usize>,
}

fn route<Q: QuiverSource + ?Sized>(q: &Q, a: &ZVertex, b: &ZVertex, scope: &BaseScope) -> Result<Option<Route>> {
    for v in [a, b] {
        if !q.contains(&v.base) {
            return Err(Error::UnknownVertex(v.base.clone()));
        }
    }
    if b.slice < a.slice {
        return Ok(None);
    }
    let s = slab(
        q,
        &Window {
            lo: a.slice,
            hi: b.slice,
            scope: *scope,
        },
    )?;
    let (Some(start), Some(end)) = (s.index_of(a), s.index_of(b)) else {
        return Ok(None);
    };
    let forward = s.reachable_from(start);
    let region: BTreeSet<usize> = s.reaching(end).intersection(&forward).copied().collect();
    Ok(Some(Route {
        slab: s,
        start,
        end,
        region,
    }))
}

fn count_in<Q: QuiverSource + ?Sized>(
    q: &Q,
    a: &ZVertex,
    b: &ZVertex,
    scope: &BaseScope,
    options: CountOptions,
) -> Result<PathCount> {
    let Some(r) = route(q, a, b, scope)? else {
        return Ok(PathCount::Finite(BigUint::zero()));
    };
    let mut count = if options.sectional {
        match sectional_count(&r) {
            Ok(n) => n,
            Err(witness) => return Ok(PathCount::Infinite { witness }),
        }
    } else {
        match plain_count(&r) {
            Ok(n) => n,
            Err(witness) => return Ok(PathCount::Infinite { witness }),
        }
    };
    if options.nontrivial_only && a == b {
        count -= BigUint::one();
    }
    Ok(PathCount::Finite(count))
}

fn plain_count(r: &Route) -> std::result::Result<BigUint, Vec<ZVertex>> {
    let s = &r.slab;
    let succ = |i: &usize| -> Vec<usize> {
        s.successors(*i)
            .iter()
            .map(|(j, _)| *j)
            .filter(|j| r.region.contains(j))
            .collect()
    };
    let nodes: Vec<usize> = r.region.iter().copied().collect();
    if let Some(cycle) = graph::find_cycle(&nodes, succ) {
        return Err(cycle.into_iter().map(|i| s.vertex(i).clone()).collect());
    }
    let order = graph::topological_order(&r.region, succ).expect("acyclic region");
    let mut ways: BTreeMap<usize, BigUint> = BTreeMap::new();
    if r.region.contains(&r.start) {
        ways.insert(r.start, BigUint::one());
    }
    for v in order {
        let Some(here) = ways.get(&v).cloned() else { continue };
        for &(u, m) in s.successors(v) {
            if r.region.contains(&u) {
                *ways.entry(u).or_default() += &here * m;
            }
        }
    }
    Ok(ways.remove(&r.end).unwrap_or_default())
}

/// `(previous, current)`; `previous` is `None` at the start of a path.
type State = (Option<usize>, usize);

fn sectional_count(r: &Route) -> std::result::Result<BigUint, Vec<ZVertex>> {
    let s = &r.slab;
    // `next` may not be tau^{-1}(prev), i.e. tau(next) = prev is forbidden
    let allowed = |prev: Option<usize>, next: usize| match prev {
        None => true,
        Some(p) => {
            let (pv, nv) = (s.vertex(p), s.vertex(next));
            !(nv.base == pv.base && nv.slice == pv.slice + 1)
        }
    };
    let succ = |st: &State| -> Vec<State> {
        let (prev, cur) = *st;
        s.successors(cur)
            .iter()
            .map(|(j, _)| *j)
            .filter(|j| r.region.contains(j) && allowed(prev, *j))
            .map(|j| (Some(cur), j))
            .collect()
    };
    let start: State = (None, r.start);
    let forward = graph::reachable(&start, succ);
    // states that can still finish at the end vertex
    let mut alive: BTreeSet<State> = forward.iter().filter(|st| st.1 == r.end).copied().collect();
    loop {
        let before = alive.len();
        for st in &forward {
            if !alive.contains(st) && succ(st).iter().any(|n| alive.contains(n)) {
                alive.insert(*st);
            }
        }
        if alive.len() == before {
            break;
        }
    }
    let live_succ = |st: &State| -> Vec<State> { succ(st).into_iter().filter(|n| alive.contains(n)).collect() };
    let nodes: Vec<State> = alive.iter().copied().collect();
    if let Some(cycle) = graph::find_cycle(&nodes, live_succ) {
        return Err(cycle.into_iter().map(|(_, i)| s.vertex(i).clone()).collect());
    }
    let order = graph::topological_order(&alive, live_succ).expect("acyclic states");
    let mut ways: BTreeMap<State, BigUint> = BTreeMap::new();
    if alive.contains(&start) {
        ways.insert(start, BigUint::one());
    }
    let mut total = BigUint::zero();
    for st in order {
        let Some(here) = ways.get(&st).cloned() else { continue };
        if st.1 == r.end {
            total += &here;
        }
        let (prev, cur) = st;
        for &(u, m) in s.successors(cur) {
            let next = (Some(cur), u);
            if alive.contains(&next) && allowed(prev, u) {
                *ways.entry(next).or_default() += &here * m;
            }
        }
    }
    Ok(total)
}

/// A path with its parallel arrows told apart: `arrows[i]` picks one of the
/// arrows `vertices[i] -> vertices[i + 1]` (0-based).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ZPath {
    pub vertices: Vec<ZVertex>,
    pub arrows: Vec<u32>,
}

impl ZPath {
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_sectional(&self) -> bool {
        is_sectional(&self.vertices)
    }
}

/// `A_i != tau A_{i+2}` for every `i`.
pub fn is_sectional(vertices: &[ZVertex]) -> bool {
    vertices
        .windows(3)
        .all(|w| translate(&w[2], 1) != w[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimit {
    pub max_paths: usize,
    /// Longest path explored, in arrows.
    pub max_len: usize,
}

impl Default for EnumerationLimit {
    fn default() -> Self {
        EnumerationLimit {
            max_paths: 100_000,
            max_len: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub paths: Vec<ZPath>,
    /// Some path was skipped because a limit was hit.
    pub truncated: bool,
}

/// Depth-first listing of every arrow-resolved path from `a` to `b` on a
/// finite quiver, in lexicographic order of the slab.
pub fn enumerate_paths_zq<Q: QuiverSource + ?Sized>(
    q: &Q,
    a: &ZVertex,
    b: &ZVertex,
    limit: EnumerationLimit,
) -> Result<Enumeration> {
    if q.finite_vertices().is_none() {
        return Err(Error::NotFinite);
    }
    let mut out = Enumeration {
        paths: Vec::new(),
        truncated: false,
    };
    let Some(r) = route(q, a, b, &BaseScope::All)? else {
        return Ok(out);
    };
    if !r.region.contains(&r.start) {
        return Ok(out);
    }
    let mut vertices = vec![r.start];
    let mut arrows = Vec::new();
    walk(&r, &mut vertices, &mut arrows, limit, &mut out);
    Ok(out)
}

fn walk(r: &Route, vertices: &mut Vec<usize>, arrows: &mut Vec<u32>, limit: EnumerationLimit, out: &mut Enumeration) {
    if out.truncated {
        return;
    }
    let cur = *vertices.last().unwrap();
    if cur == r.end {
        if out.paths.len() == limit.max_paths {
            out.truncated = true;
            return;
        }
        out.paths.push(ZPath {
            vertices: vertices.iter().map(|&i| r.slab.vertex(i).clone()).collect(),
            arrows: arrows.clone(),
        });
    }
    for &(next, m) in r.slab.successors(cur) {
        if !r.region.contains(&next) {
            continue;
        }
        if arrows.len() == limit.max_len {
            out.truncated = true;
            return;
        }
        for k in 0..m {
            vertices.push(next);
            arrows.push(k);
            walk(r, vertices, arrows, limit, out);
            vertices.pop();
            arrows.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::Quiver;

    fn a2() -> Quiver {
        Quiver::from_named(&["x", "y"], &[("x", "y", 1)])
    }

    fn fin(n: u32) -> PathCount {
        PathCount::Finite(BigUint::from(n))
    }

    fn z(s: i64, b: &str) -> ZVertex {
        ZVertex::new(s, b)
    }

    #[test]
    fn a2_counts() {
        let q = a2();
        assert_eq!(count_paths_zq(&q, &z(0, "x"), &z(1, "x")).unwrap(), fin(1));
        assert_eq!(count_sectional_paths_zq(&q, &z(0, "x"), &z(1, "x")).unwrap(), fin(0));
        assert_eq!(count_sectional_paths_zq(&q, &z(0, "x"), &z(0, "y")).unwrap(), fin(1));
        assert_eq!(count_paths_zq(&q, &z(1, "x"), &z(0, "x")).unwrap(), fin(0));
        assert_eq!(count_paths_to_shift(&q, &z(0, "x"), 0).unwrap(), fin(1));
        assert_eq!(count_paths_to_shift(&q, &z(0, "x"), 1).unwrap(), fin(1));
        let nontrivial = CountOptions {
            nontrivial_only: true,
            ..Default::default()
        };
        assert_eq!(count_paths_with(&q, &z(0, "x"), &z(0, "x"), nontrivial).unwrap(), fin(0));
    }

    #[test]
    fn multiplicity_and_sectional_chain() {
        let kronecker = Quiver::from_named(&[], &[("x", "y", 2)]);
        assert_eq!(count_paths_zq(&kronecker, &z(0, "x"), &z(0, "y")).unwrap(), fin(2));
        let e = enumerate_paths_zq(&kronecker, &z(0, "x"), &z(0, "y"), EnumerationLimit::default()).unwrap();
        assert_eq!(e.paths.len(), 2);
        assert_ne!(e.paths[0], e.paths[1]);
        // (0,x) -> (0,y) -> (1,x), twice each way
        assert_eq!(count_paths_zq(&kronecker, &z(0, "x"), &z(1, "x")).unwrap(), fin(4));
        let line = Quiver::from_named(&[], &[("a", "b", 1), ("b", "c", 1)]);
        assert_eq!(count_sectional_paths_zq(&line, &z(0, "a"), &z(0, "c")).unwrap(), fin(1));
        let e = enumerate_paths_zq(&line, &z(0, "a"), &z(0, "a"), EnumerationLimit::default()).unwrap();
        assert_eq!(e.paths.len(), 1);
        assert!(e.paths[0].is_empty());
    }

    #[test]
    fn cycles_are_infinite() {
        let cyc = Quiver::from_named(&[], &[("a", "b", 1), ("b", "a", 1)]);
        for n in 0..3 {
            match count_paths_to_shift(&cyc, &z(0, "a"), n).unwrap() {
                PathCount::Infinite { witness } => {
                    assert_eq!(witness.first(), witness.last());
                    assert!(witness.len() >= 3);
                }
                other => panic!("expected infinite, got {other:?}"),
            }
        }
        assert!(count_sectional_paths_zq(&cyc, &z(0, "a"), &z(0, "a")).unwrap().is_infinite());
        let e = enumerate_paths_zq(&cyc, &z(0, "a"), &z(0, "b"), EnumerationLimit { max_paths: 10, max_len: 7 }).unwrap();
        assert!(e.truncated);
        assert_eq!(e.paths.len(), 4);
    }

    #[test]
    fn lazy_sources_are_windowed() {
        use crate::family::{Family, LazyQuiver};
        let lin = LazyQuiver::new(Family::AInfInfLinear);
        let a = ZVertex::new(0, 0);
        let b = ZVertex::new(1, 0);
        assert_eq!(count_paths_zq(&lin, &a, &b), Err(Error::NotFinite));
        let w = count_paths_windowed(&lin, &a, &b, &BaseScope::Interval { lo: -4, hi: 4 }, CountOptions::default()).unwrap();
        // via (0,1) or via (1,-1)
        assert_eq!(w, PathCount::LowerBound(BigUint::from(2u32)));
    }
}
