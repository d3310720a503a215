//! Random quiver corpora and brute-force reference implementations, for
//! tests only. Nothing here shares code with the production algorithms.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::quiver::{Quiver, VertexId};
use crate::zq::ZVertex;

/// Shape limits for a generated quiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub max_vertices: usize,
    pub max_arrows: usize,
    pub acyclic: bool,
}

impl Shape {
    pub const CORPUS: Shape = Shape {
        max_vertices: 12,
        max_arrows: 20,
        acyclic: false,
    };
}

/// A connected quiver on vertices `v0..`: a random spanning tree plus extra
/// arrows, with occasional double arrows and (unless acyclic) loops.
/// Acyclic quivers orient every arrow along a random vertex ranking.
pub fn random_quiver(rng: &mut impl Rng, shape: Shape) -> Quiver {
    let n = rng.gen_range(1..=shape.max_vertices.max(1));
    let names: Vec<VertexId> = (0..n).map(|i| VertexId::name(format!("v{i}"))).collect();
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(rng);
    let mut q = Quiver::new();
    for v in &names {
        q.add_vertex(v.clone());
    }
    let mut arrows = 0;
    let orient = |rng: &mut dyn rand::RngCore, i: usize, j: usize| -> (usize, usize) {
        if shape.acyclic {
            if rank[i] < rank[j] {
                (i, j)
            } else {
                (j, i)
            }
        } else if rng.gen_bool(0.5) {
            (i, j)
        } else {
            (j, i)
        }
    };
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (s, t) = orient(rng, i, j);
        let m = if rng.gen_bool(0.1) { 2 } else { 1 };
        q.add_arrow(names[s].clone(), names[t].clone(), m);
        arrows += m as usize;
    }
    let budget = shape.max_arrows.max(arrows);
    let extra = rng.gen_range(0..=budget - arrows);
    for _ in 0..extra {
        if arrows >= budget {
            break;
        }
        let i = rng.gen_range(0..n);
        if !shape.acyclic && rng.gen_bool(0.05) {
            q.add_arrow(names[i].clone(), names[i].clone(), 1);
            arrows += 1;
            continue;
        }
        if n < 2 {
            break;
        }
        let j = (i + rng.gen_range(1..n)) % n;
        let (s, t) = orient(rng, i, j);
        let m = if arrows + 2 <= budget && rng.gen_bool(0.1) { 2 } else { 1 };
        q.add_arrow(names[s].clone(), names[t].clone(), m);
        arrows += m as usize;
    }
    q
}

/// `count` quivers from a fixed seed, alternating acyclic and unrestricted.
pub fn corpus(seed: u64, count: usize, shape: Shape) -> Vec<Quiver> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let acyclic = shape.acyclic || i % 2 == 0;
            random_quiver(&mut rng, Shape { acyclic, ..shape })
        })
        .collect()
}

pub fn acyclic_corpus(seed: u64, count: usize, max_vertices: usize, max_arrows: usize) -> Vec<Quiver> {
    corpus(
        seed,
        count,
        Shape {
            max_vertices,
            max_arrows,
            acyclic: true,
        },
    )
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Edges of the underlying graph with the cost of crossing them in each
/// direction: 0 along an arrow, 1 against it.
fn crossing_costs(q: &Quiver) -> BTreeMap<VertexId, BTreeMap<VertexId, i64>> {
    let mut cost: BTreeMap<VertexId, BTreeMap<VertexId, i64>> = BTreeMap::new();
    for (a, b, _) in q.arrows() {
        let fwd = cost.entry(a.clone()).or_default().entry(b.clone()).or_insert(0);
        *fwd = 0;
        let back = cost.entry(b.clone()).or_default().entry(a.clone()).or_insert(1);
        *back = (*back).min(1);
    }
    cost
}

/// Least number of backward arrows over all simple unoriented walks from
/// `x` to `y`, by exhaustive search. `None` if no walk exists.
pub fn brute_lightcone_distance(q: &Quiver, x: &VertexId, y: &VertexId) -> Option<i64> {
    let cost = crossing_costs(q);
    let mut best = None;
    let mut on_path = BTreeSet::from([x.clone()]);
    fn go(
        cost: &BTreeMap<VertexId, BTreeMap<VertexId, i64>>,
        v: &VertexId,
        y: &VertexId,
        acc: i64,
        on_path: &mut BTreeSet<VertexId>,
        best: &mut Option<i64>,
    ) {
        if v == y {
            *best = Some(best.map_or(acc, |b: i64| b.min(acc)));
            return;
        }
        let Some(next) = cost.get(v) else { return };
        for (u, c) in next {
            if on_path.insert(u.clone()) {
                go(cost, u, y, acc + c, on_path, best);
                on_path.remove(u);
            }
        }
    }
    go(&cost, x, y, 0, &mut on_path, &mut best);
    best
}

/// Every simple oriented cycle, each listed once starting from its least
/// vertex (closed: first vertex repeated at the end). Loops included.
pub fn simple_cycles(q: &Quiver) -> Vec<Vec<VertexId>> {
    let mut cycles = Vec::new();
    for start in q.vertices() {
        let mut path = vec![start.clone()];
        fn go(q: &Quiver, start: &VertexId, path: &mut Vec<VertexId>, cycles: &mut Vec<Vec<VertexId>>) {
            let v = path.last().unwrap().clone();
            for (u, _) in q.successors(&v) {
                if u == start {
                    let mut c = path.clone();
                    c.push(start.clone());
                    cycles.push(c);
                } else if u > start && !path.contains(u) {
                    path.push(u.clone());
                    go(q, start, path, cycles);
                    path.pop();
                }
            }
        }
        go(q, start, &mut path, &mut cycles);
    }
    cycles
}

/// Number of paths (or sectional paths) from `a` to `b` in `ZQ`, by
/// iterating walk-count vectors over the slab between the two slices, built
/// straight from the arrows of `q`. `None` when there are infinitely many:
/// a walk with more steps than there are states must revisit one, and any
/// revisit on a route from `a` to `b` shows up again within three times the
/// state count.
pub fn count_walks_by_powers(q: &Quiver, a: &ZVertex, b: &ZVertex, sectional: bool) -> Option<BigUint> {
    let mut arrows: Vec<(ZVertex, ZVertex, u32)> = Vec::new();
    for s in a.slice..=b.slice {
        for (x, y, m) in q.arrows() {
            arrows.push((ZVertex::new(s, x.clone()), ZVertex::new(s, y.clone()), m));
            if s < b.slice {
                arrows.push((ZVertex::new(s, y.clone()), ZVertex::new(s + 1, x.clone()), m));
            }
        }
    }
    let mut total = BigUint::from(u32::from(a == b));
    if b.slice < a.slice {
        return Some(total);
    }
    if sectional {
        // states are arrows; a step u -> v -> w is allowed unless w is u one slice up
        let states = arrows.len();
        let mut cur: Vec<BigUint> = arrows
            .iter()
            .map(|(u, _, m)| if u == a { BigUint::from(*m) } else { BigUint::zero() })
            .collect();
        for step in 1..=3 * states + 2 {
            let here: BigUint = arrows.iter().zip(&cur).filter(|((_, v, _), _)| v == b).map(|(_, c)| c).sum();
            if !here.is_zero() {
                if step > states {
                    return None;
                }
                total += here;
            }
            let mut next = vec![BigUint::zero(); states];
            for (i, (u, v, _)) in arrows.iter().enumerate() {
                if cur[i].is_zero() {
                    continue;
                }
                for (j, (v2, w, m)) in arrows.iter().enumerate() {
                    if v2 == v && !(w.base == u.base && w.slice == u.slice + 1) {
                        next[j] += &cur[i] * *m;
                    }
                }
            }
            cur = next;
        }
    } else {
        let mut vertices: Vec<ZVertex> = Vec::new();
        for s in a.slice..=b.slice {
            vertices.extend(q.vertices().map(|x| ZVertex::new(s, x.clone())));
        }
        let n = vertices.len();
        let index = |v: &ZVertex| vertices.iter().position(|u| u == v).unwrap();
        let mut cur = vec![BigUint::zero(); n];
        cur[index(a)] = BigUint::from(1u32);
        let target = index(b);
        for step in 1..=3 * n + 1 {
            let mut next = vec![BigUint::zero(); n];
            for (u, v, m) in &arrows {
                let c = &cur[index(u)];
                if !c.is_zero() {
                    next[index(v)] += c * *m;
                }
            }
            cur = next;
            if !cur[target].is_zero() {
                if step >= n {
                    return None;
                }
                total += &cur[target];
            }
        }
    }
    Some(total)
}

/// Components of the underlying graph by repeated flood fill.
pub fn brute_components(q: &Quiver) -> Vec<BTreeSet<VertexId>> {
    let mut label: BTreeMap<VertexId, usize> = q.vertices().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    loop {
        let mut changed = false;
        for (a, b, _) in q.arrows() {
            let (la, lb) = (label[a], label[b]);
            if la != lb {
                let m = la.min(lb);
                label.insert(a.clone(), m);
                label.insert(b.clone(), m);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<VertexId>> = BTreeMap::new();
    for (v, l) in label {
        groups.entry(l).or_default().insert(v);
    }
    groups.into_values().collect()
}
