//! Light cone and round trip distances.
//!
//! On a quiver `Q`, the right light cone distance `d(x, y)` is the least
//! number of arrows traversed against their orientation on an unoriented walk
//! from `x` to `y`. It is computed by a deque-based 0-1 search: following an
//! arrow costs 0, walking it backwards costs 1. Multiplicities are ignored.
//!
//! On `ZQ` the distance reduces to the one on `Q`:
//! `d((i, x), (j, y)) = d_Q(x, y) + (i - j)`, which may be negative.
//! [`lightcone_distance_zq_oracle`] recomputes it from the light cone
//! definition by reachability inside a slab.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::ops::Add;

use crate::error::{Error, Result};
use crate::family::WindowedQuiver;
use crate::quiver::{QuiverSource, VertexId};
use crate::zq::{slab, BaseScope, Window, ZVertex};

/// An extended integer distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtDistance {
    Finite(i64),
    /// No walk exists; only returned after exhausting the search space.
    Infinite,
    /// The search budget ran out; the true distance is at least this.
    AtLeast(i64),
}

impl ExtDistance {
    pub fn finite(self) -> Option<i64> {
        match self {
            ExtDistance::Finite(d) => Some(d),
            _ => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == ExtDistance::Infinite
    }

    /// Adds `k` to finite values and lower bounds.
    pub fn shift(self, k: i64) -> Self {
        match self {
            ExtDistance::Finite(d) => ExtDistance::Finite(d + k),
            ExtDistance::AtLeast(b) => ExtDistance::AtLeast(b + k),
            ExtDistance::Infinite => ExtDistance::Infinite,
        }
    }
}

impl Add for ExtDistance {
    type Output = ExtDistance;

    fn add(self, rhs: Self) -> Self {
        use ExtDistance::*;
        match (self, rhs) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Finite(a), Finite(b)) => Finite(a + b),
            (Finite(a) | AtLeast(a), Finite(b) | AtLeast(b)) => AtLeast(a + b),
        }
    }
}

/// A distance together with the number of vertex expansions spent on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measured {
    pub distance: ExtDistance,
    pub expansions: usize,
}

/// Cap on vertex expansions per search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub usize);

impl Budget {
    pub const DEFAULT: Budget = Budget(1_000_000);
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}

/// Orientation of a single-source search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Distances `d(source, v)`.
    Right,
    /// Distances `d(v, source)`.
    Left,
}

#[derive(Debug, Clone)]
pub(crate) struct SearchOutcome {
    pub settled: BTreeMap<VertexId, i64>,
    pub expansions: usize,
    /// Frontier lower bound when the budget stopped the search.
    pub cut: Option<i64>,
}

/// 0-1 search from `source`. Stops after settling `target`, after every
/// vertex within `max_cost` is settled, or when the budget runs out.
pub(crate) fn search<Q: QuiverSource + ?Sized>(
    q: &Q,
    source: &VertexId,
    direction: Direction,
    budget: Budget,
    target: Option<&VertexId>,
    max_cost: Option<i64>,
) -> SearchOutcome {
    let mut best: HashMap<VertexId, i64> = HashMap::from([(source.clone(), 0)]);
    let mut settled = BTreeMap::new();
    let mut deque = VecDeque::from([(source.clone(), 0i64)]);
    let mut expansions = 0;
    let mut cut = None;

    while let Some((v, d)) = deque.pop_front() {
        if settled.contains_key(&v) || best.get(&v).is_some_and(|&b| b < d) {
            continue;
        }
        if max_cost.is_some_and(|m| d > m) {
            break;
        }
        if expansions >= budget.0 {
            cut = Some(d);
            break;
        }
        expansions += 1;
        settled.insert(v.clone(), d);
        if target == Some(&v) {
            break;
        }
        let (free, paid) = match direction {
            Direction::Right => (q.out_arrows(&v), q.in_arrows(&v)),
            Direction::Left => (q.in_arrows(&v), q.out_arrows(&v)),
        };
        let moves = free
            .into_iter()
            .map(|(u, _)| (u, 0))
            .chain(paid.into_iter().map(|(u, _)| (u, 1)));
        for (u, cost) in moves {
            let nd = d + cost;
            if settled.contains_key(&u) || best.get(&u).is_some_and(|&b| b <= nd) {
                continue;
            }
            best.insert(u.clone(), nd);
            if cost == 0 {
                deque.push_front((u, nd));
            } else {
                deque.push_back((u, nd));
            }
        }
    }
    SearchOutcome {
        settled,
        expansions,
        cut,
    }
}

fn require<Q: QuiverSource + ?Sized>(q: &Q, v: &VertexId) -> Result<()> {
    if q.contains(v) {
        Ok(())
    } else {
        Err(Error::UnknownVertex(v.clone()))
    }
}

/// Right light cone distance between two vertices of `Q`.
pub fn lightcone_distance_q<Q: QuiverSource + ?Sized>(
    q: &Q,
    x: &VertexId,
    y: &VertexId,
    budget: Budget,
) -> Result<Measured> {
    require(q, x)?;
    require(q, y)?;
    let outcome = search(q, x, Direction::Right, budget, Some(y), None);
    let distance = match (outcome.settled.get(y), outcome.cut) {
        (Some(&d), _) => ExtDistance::Finite(d),
        (None, Some(bound)) => ExtDistance::AtLeast(bound),
        (None, None) => ExtDistance::Infinite,
    };
    Ok(Measured {
        distance,
        expansions: outcome.expansions,
    })
}

/// Right light cone distance in `ZQ`, by reduction to `Q`.
pub fn lightcone_distance_zq<Q: QuiverSource + ?Sized>(
    q: &Q,
    a: &ZVertex,
    b: &ZVertex,
    budget: Budget,
) -> Result<Measured> {
    let m = lightcone_distance_q(q, &a.base, &b.base, budget)?;
    Ok(Measured {
        distance: m.distance.shift(a.slice - b.slice),
        ..m
    })
}

/// Left light cone distance: `d_left(x, y) = d(y, x)`.
pub fn left_lightcone_distance<Q: QuiverSource + ?Sized>(
    q: &Q,
    x: &VertexId,
    y: &VertexId,
    budget: Budget,
) -> Result<Measured> {
    lightcone_distance_q(q, y, x, budget)
}

pub fn left_lightcone_distance_zq<Q: QuiverSource + ?Sized>(
    q: &Q,
    a: &ZVertex,
    b: &ZVertex,
    budget: Budget,
) -> Result<Measured> {
    lightcone_distance_zq(q, b, a, budget)
}

/// Round trip distance `d(x, y) + d(y, x)`.
pub fn roundtrip_distance<Q: QuiverSource + ?Sized>(
    q: &Q,
    x: &VertexId,
    y: &VertexId,
    budget: Budget,
) -> Result<Measured> {
    let there = lightcone_distance_q(q, x, y, budget)?;
    let back = lightcone_distance_q(q, y, x, budget)?;
    Ok(Measured {
        distance: there.distance + back.distance,
        expansions: there.expansions + back.expansions,
    })
}

/// Round trip distance in `ZQ`; constant along both `tau`-orbits.
pub fn roundtrip_distance_zq<Q: QuiverSource + ?Sized>(
    q: &Q,
    a: &ZVertex,
    b: &ZVertex,
    budget: Budget,
) -> Result<Measured> {
    roundtrip_distance(q, &a.base, &b.base, budget)
}

/// Light cone distance read off the definition: the `n` for which
/// `tau^{-n} b` is reachable from `a` while `tau^{1-n} b` is not, searched
/// inside the slab of `w`.
///
/// A member found inside the window is exact (for a window that cuts a
/// lazy family: exact for the windowed subquiver). When none is found the
/// answer is `Infinite` if the reachable region stays below the top slice,
/// or if the window is tall enough that a simple unoriented walk would have
/// fit; otherwise the window is reported as too small.
pub fn lightcone_distance_zq_oracle<Q: QuiverSource + ?Sized>(
    q: &Q,
    a: &ZVertex,
    b: &ZVertex,
    w: &Window,
) -> Result<ExtDistance> {
    require(q, &a.base)?;
    require(q, &b.base)?;
    if w.lo > a.slice {
        return Err(Error::WindowBelowSource {
            source_slice: a.slice,
        });
    }
    if a.slice > w.hi {
        return Err(Error::WindowTooSmall { top: w.hi });
    }
    let s = slab(q, w)?;
    let start = s.index_of(a).ok_or_else(|| Error::UnknownVertex(a.base.clone()))?;
    let reached: BTreeSet<ZVertex> = s
        .reachable_from(start)
        .into_iter()
        .map(|i| s.vertex(i).clone())
        .collect();
    let on_cone = (w.lo..=w.hi).find(|&slice| {
        reached.contains(&ZVertex::new(slice, b.base.clone()))
            && !reached.contains(&ZVertex::new(slice - 1, b.base.clone()))
    });
    if let Some(slice) = on_cone {
        return Ok(ExtDistance::Finite(slice - b.slice));
    }
    let touches_top = reached.iter().any(|v| v.slice == w.hi);
    let bases = s.len() as i64 / (w.hi - w.lo + 1);
    if !touches_top || w.hi - a.slice >= bases - 1 {
        Ok(ExtDistance::Infinite)
    } else {
        Err(Error::WindowTooSmall { top: w.hi })
    }
}

/// All settled distances from `source`; fails if the budget runs out.
pub fn distances_from<Q: QuiverSource + ?Sized>(
    q: &Q,
    source: &VertexId,
    direction: Direction,
    budget: Budget,
) -> Result<BTreeMap<VertexId, i64>> {
    require(q, source)?;
    let outcome = search(q, source, direction, budget, None, None);
    match outcome.cut {
        Some(_) => Err(Error::BudgetExhausted {
            orbit: source.clone(),
            expansions: outcome.expansions,
        }),
        None => Ok(outcome.settled),
    }
}

/// Which distance a sphere is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereKind {
    /// `S(x, n)`: round trip distance `n`.
    RoundTrip,
    /// `S_right(x, n)`: `d(x, y) = n`.
    Right,
    /// `S_left(x, n)`: `d(y, x) = n`.
    Left,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereReport {
    pub kind: SphereKind,
    pub center: VertexId,
    pub radius: i64,
    pub members: BTreeSet<VertexId>,
    /// False when vertices outside the explored window might belong to the
    /// sphere.
    pub complete: bool,
}

pub fn roundtrip_sphere<Q: QuiverSource + ?Sized>(
    q: &Q,
    x: &VertexId,
    n: i64,
    scope: &BaseScope,
) -> Result<SphereReport> {
    sphere(q, SphereKind::RoundTrip, x, n, scope)
}

pub fn right_sphere<Q: QuiverSource + ?Sized>(
    q: &Q,
    x: &VertexId,
    n: i64,
    scope: &BaseScope,
) -> Result<SphereReport> {
    sphere(q, SphereKind::Right, x, n, scope)
}

pub fn left_sphere<Q: QuiverSource + ?Sized>(
    q: &Q,
    x: &VertexId,
    n: i64,
    scope: &BaseScope,
) -> Result<SphereReport> {
    sphere(q, SphereKind::Left, x, n, scope)
}

/// A sphere of `q` explored within `scope`. Finite quivers are explored
/// whole and always complete.
pub fn sphere<Q: QuiverSource + ?Sized>(
    q: &Q,
    kind: SphereKind,
    x: &VertexId,
    n: i64,
    scope: &BaseScope,
) -> Result<SphereReport> {
    require(q, x)?;
    let window = WindowedQuiver::new(q, scope)?;
    sphere_in(&window, kind, x, n)
}

/// A sphere computed inside a window.
///
/// The report is complete when the window is exact, or when the source is a
/// tree and every gate is already farther than the radius: past a gate `g`
/// the right (left) distance cannot drop below that of `g`, and the round
/// trip distance grows by at least one per step. Other cut windows are
/// always reported truncated.
pub fn sphere_in(w: &WindowedQuiver, kind: SphereKind, x: &VertexId, n: i64) -> Result<SphereReport> {
    require(w, x)?;
    let mut report = SphereReport {
        kind,
        center: x.clone(),
        radius: n,
        members: BTreeSet::new(),
        complete: true,
    };
    if n < 0 {
        return Ok(report);
    }
    let budget = Budget(usize::MAX);
    let right = matches!(kind, SphereKind::Right | SphereKind::RoundTrip)
        .then(|| search(w, x, Direction::Right, budget, None, Some(n)).settled);
    let left = matches!(kind, SphereKind::Left | SphereKind::RoundTrip)
        .then(|| search(w, x, Direction::Left, budget, None, Some(n)).settled);

    // Distance of a window vertex, if it is at most `n`.
    let within = |v: &VertexId| -> Option<i64> {
        match kind {
            SphereKind::Right => right.as_ref()?.get(v).copied(),
            SphereKind::Left => left.as_ref()?.get(v).copied(),
            SphereKind::RoundTrip => {
                let d = right.as_ref()?.get(v)? + left.as_ref()?.get(v)?;
                (d <= n).then_some(d)
            }
        }
    };
    report.members = w
        .quiver
        .vertices()
        .filter(|v| within(v) == Some(n))
        .cloned()
        .collect();
    report.complete = w.is_exact()
        || (w.tree
            && w.gates.iter().all(|g| match (kind, within(g)) {
                (_, None) => true,
                (SphereKind::RoundTrip, Some(d)) => d >= n,
                (_, Some(_)) => false,
            }));
    Ok(report)
}

/// The right light cone of `a` intersected with the window: one vertex per
/// orbit reached, `(a.slice + d(a.base, y), y)`.
pub fn right_lightcone_zq<Q: QuiverSource + ?Sized>(
    q: &Q,
    a: &ZVertex,
    w: &Window,
) -> Result<BTreeSet<ZVertex>> {
    lightcone_zq(q, a, w, Direction::Right)
}

/// The left light cone of `a`: `(a.slice - d(y, a.base), y)` per orbit.
pub fn left_lightcone_zq<Q: QuiverSource + ?Sized>(
    q: &Q,
    a: &ZVertex,
    w: &Window,
) -> Result<BTreeSet<ZVertex>> {
    lightcone_zq(q, a, w, Direction::Left)
}

fn lightcone_zq<Q: QuiverSource + ?Sized>(
    q: &Q,
    a: &ZVertex,
    w: &Window,
    direction: Direction,
) -> Result<BTreeSet<ZVertex>> {
    require(q, &a.base)?;
    let view = WindowedQuiver::new(q, &w.scope)?;
    let dist = distances_from(&view, &a.base, direction, Budget::DEFAULT)?;
    Ok(dist
        .into_iter()
        .map(|(y, d)| match direction {
            Direction::Right => ZVertex::new(a.slice + d, y),
            Direction::Left => ZVertex::new(a.slice - d, y),
        })
        .filter(|v| w.contains_slice(v.slice))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{Family, LazyQuiver};
    use crate::quiver::Quiver;

    fn a2() -> Quiver {
        Quiver::from_named(&["x", "y"], &[("x", "y", 1)])
    }

    fn cyclic() -> Quiver {
        Quiver::from_named(&[], &[("a", "b", 1), ("b", "a", 1)])
    }

    fn d(q: &impl QuiverSource, x: impl Into<VertexId>, y: impl Into<VertexId>) -> ExtDistance {
        lightcone_distance_q(q, &x.into(), &y.into(), Budget::DEFAULT)
            .unwrap()
            .distance
    }

    #[test]
    fn a2_distances() {
        let q = a2();
        assert_eq!(d(&q, "x", "y"), ExtDistance::Finite(0));
        assert_eq!(d(&q, "y", "x"), ExtDistance::Finite(1));
        let left = |x: &str, y: &str| {
            left_lightcone_distance(&q, &x.into(), &y.into(), Budget::DEFAULT)
                .unwrap()
                .distance
        };
        assert_eq!(left("y", "x"), ExtDistance::Finite(0));
        assert_eq!(left("x", "y"), ExtDistance::Finite(1));
        let rt = roundtrip_distance(&q, &"x".into(), &"y".into(), Budget::DEFAULT).unwrap();
        assert_eq!(rt.distance, ExtDistance::Finite(1));
        for v in ["x", "y"] {
            let rt = roundtrip_distance(&q, &v.into(), &v.into(), Budget::DEFAULT).unwrap();
            assert_eq!(rt.distance, ExtDistance::Finite(0));
        }
    }

    #[test]
    fn disconnected_is_infinite() {
        let q = Quiver::from_named(&["z"], &[("x", "y", 1)]);
        assert_eq!(d(&q, "x", "z"), ExtDistance::Infinite);
        assert!(lightcone_distance_q(&q, &"x".into(), &"w".into(), Budget::DEFAULT).is_err());
    }

    #[test]
    fn windowed_family_distances() {
        // brute-force values: walks on a path graph are forced
        let w = LazyQuiver::new(Family::AInfInfLinear).window(8);
        assert_eq!(d(&w, 0, -3), ExtDistance::Finite(3));
        assert_eq!(d(&w, -3, 0), ExtDistance::Finite(0));
        let f = LazyQuiver::new(Family::Figure1Right).window(8);
        for k in 1..=8 {
            assert_eq!(d(&f, k, 0), ExtDistance::Finite(1));
        }
    }

    #[test]
    fn budget_yields_lower_bound() {
        // the free direction runs off to infinity before 0 -> -1 is paid for
        let lin = LazyQuiver::new(Family::AInfInfLinear);
        let m = lightcone_distance_q(&lin, &0.into(), &(-3).into(), Budget(50)).unwrap();
        assert_eq!(m.distance, ExtDistance::AtLeast(0));
        assert_eq!(m.expansions, 50);
        let m = lightcone_distance_q(&lin, &(-3).into(), &0.into(), Budget(50)).unwrap();
        assert_eq!(m.distance, ExtDistance::Finite(0));
    }

    #[test]
    fn zq_reduction() {
        let q = a2();
        let z = |s, b: &str| ZVertex::new(s, b);
        let dz = |a: &ZVertex, b: &ZVertex| {
            lightcone_distance_zq(&q, a, b, Budget::DEFAULT).unwrap().distance
        };
        assert_eq!(dz(&z(0, "x"), &z(0, "y")), ExtDistance::Finite(0));
        assert_eq!(dz(&z(0, "x"), &z(1, "y")), ExtDistance::Finite(-1));
        let w = Window::slices(0, 6);
        for (a, b) in [(z(0, "x"), z(0, "y")), (z(0, "x"), z(1, "y")), (z(0, "y"), z(0, "x"))] {
            assert_eq!(lightcone_distance_zq_oracle(&q, &a, &b, &w).unwrap(), dz(&a, &b));
        }
        let c = cyclic();
        let dc = lightcone_distance_zq(&c, &z(0, "a"), &z(1, "b"), Budget::DEFAULT).unwrap();
        assert_eq!(dc.distance, ExtDistance::Finite(-1));
        assert_eq!(
            lightcone_distance_zq_oracle(&c, &z(0, "a"), &z(0, "b"), &Window::slices(0, 4)).unwrap(),
            ExtDistance::Finite(0)
        );
    }

    #[test]
    fn oracle_reports_small_windows() {
        let q = Quiver::from_named(&[], &[("b", "a", 1), ("c", "b", 1), ("d", "c", 1)]);
        let a = ZVertex::new(0, "a");
        let b = ZVertex::new(0, "d");
        assert_eq!(
            lightcone_distance_zq_oracle(&q, &a, &b, &Window::slices(0, 1)),
            Err(Error::WindowTooSmall { top: 1 })
        );
        assert_eq!(
            lightcone_distance_zq_oracle(&q, &a, &b, &Window::slices(0, 3)).unwrap(),
            ExtDistance::Finite(3)
        );
        assert!(lightcone_distance_zq_oracle(&q, &a, &b, &Window::slices(1, 3)).is_err());
        let split = Quiver::from_named(&["z"], &[("x", "y", 1)]);
        assert_eq!(
            lightcone_distance_zq_oracle(&split, &ZVertex::new(0, "x"), &ZVertex::new(0, "z"), &Window::slices(0, 3))
                .unwrap(),
            ExtDistance::Infinite
        );
    }

    #[test]
    fn extended_arithmetic() {
        use ExtDistance::*;
        assert_eq!(Finite(1) + Finite(2), Finite(3));
        assert_eq!(Finite(1) + Infinite, Infinite);
        assert_eq!(AtLeast(1) + Finite(2), AtLeast(3));
        assert_eq!(AtLeast(1) + AtLeast(2), AtLeast(3));
        assert_eq!(AtLeast(1) + Infinite, Infinite);
        assert_eq!(Finite(2).shift(-3), Finite(-1));
    }

    #[test]
    fn linear_spheres() {
        let lin = LazyQuiver::new(Family::AInfInfLinear);
        let scope = BaseScope::Interval { lo: -16, hi: 16 };
        for n in 1..=12 {
            let s = roundtrip_sphere(&lin, &0.into(), n, &scope).unwrap();
            assert_eq!(s.members, BTreeSet::from([(-n).into(), n.into()]));
            assert!(s.complete, "n = {n}");
        }
        // the ray to the right sits inside S_right(0, 0)
        assert!(!right_sphere(&lin, &0.into(), 0, &scope).unwrap().complete);
    }

    #[test]
    fn figure1_sphere_is_truncated() {
        let fig = LazyQuiver::new(Family::Figure1Right);
        for r in [4, 8, 16] {
            let s = roundtrip_sphere(&fig, &0.into(), 1, &BaseScope::Interval { lo: -r, hi: r }).unwrap();
            assert!(!s.complete);
            assert!(s.members.len() as i64 >= r - 1);
        }
    }

    #[test]
    fn finite_spheres() {
        let q = Quiver::from_named(&[], &[("a", "b", 1), ("b", "c", 1)]);
        let s0 = roundtrip_sphere(&q, &"a".into(), 0, &BaseScope::All).unwrap();
        assert_eq!(s0.members, BTreeSet::from(["a".into()]));
        assert!(s0.complete);
        let s2 = roundtrip_sphere(&q, &"a".into(), 2, &BaseScope::All).unwrap();
        assert_eq!(s2.members, BTreeSet::from(["c".into()]));
        assert!(right_sphere(&q, &"a".into(), -1, &BaseScope::All).unwrap().members.is_empty());
        let l1 = left_sphere(&q, &"b".into(), 1, &BaseScope::All).unwrap();
        assert_eq!(l1.members, BTreeSet::from(["c".into()]));
    }

    #[test]
    fn a2_cones() {
        let q = a2();
        let w = Window::slices(-2, 2);
        let right = right_lightcone_zq(&q, &ZVertex::new(0, "x"), &w).unwrap();
        assert_eq!(right, BTreeSet::from([ZVertex::new(0, "x"), ZVertex::new(0, "y")]));
        let left = left_lightcone_zq(&q, &ZVertex::new(0, "y"), &w).unwrap();
        assert_eq!(left, BTreeSet::from([ZVertex::new(0, "x"), ZVertex::new(0, "y")]));
        let split = Quiver::from_named(&["z"], &[("x", "y", 1)]);
        let cone = right_lightcone_zq(&split, &ZVertex::new(0, "x"), &w).unwrap();
        assert!(cone.iter().all(|v| v.base != "z".into()));
    }
}
