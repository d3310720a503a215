//! Small generic digraph routines shared by the quiver, slab and path code.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Color {
    White,
    Grey,
    Black,
}

/// Finds one oriented cycle, returned closed (`[v0, .., vk, v0]`). Nodes are
/// visited in the given order, so the witness is deterministic.
pub(crate) fn find_cycle<N, F>(nodes: &[N], successors: F) -> Option<Vec<N>>
where
    N: Ord + Clone,
    F: Fn(&N) -> Vec<N>,
{
    let mut color: BTreeMap<N, Color> = nodes.iter().map(|n| (n.clone(), Color::White)).collect();
    for root in nodes {
        if color[root] != Color::White {
            continue;
        }
        // (node, successors, next successor position)
        let mut stack: Vec<(N, Vec<N>, usize)> = vec![(root.clone(), successors(root), 0)];
        color.insert(root.clone(), Color::Grey);
        while let Some((node, succ, pos)) = stack.last_mut() {
            if *pos == succ.len() {
                color.insert(node.clone(), Color::Black);
                stack.pop();
                continue;
            }
            let next = succ[*pos].clone();
            *pos += 1;
            match color.get(&next).copied() {
                // successors outside `nodes` are ignored
                None | Some(Color::Black) => {}
                Some(Color::Grey) => {
                    let start = stack.iter().position(|(n, _, _)| *n == next).unwrap();
                    let mut cycle: Vec<N> = stack[start..].iter().map(|(n, _, _)| n.clone()).collect();
                    cycle.push(next);
                    return Some(cycle);
                }
                Some(Color::White) => {
                    color.insert(next.clone(), Color::Grey);
                    let s = successors(&next);
                    stack.push((next, s, 0));
                }
            }
        }
    }
    None
}

/// Everything reachable from `start` (inclusive).
pub(crate) fn reachable<N, F>(start: &N, successors: F) -> BTreeSet<N>
where
    N: Ord + Clone,
    F: Fn(&N) -> Vec<N>,
{
    let mut seen = BTreeSet::from([start.clone()]);
    let mut stack = vec![start.clone()];
    while let Some(v) = stack.pop() {
        for u in successors(&v) {
            if seen.insert(u.clone()) {
                stack.push(u);
            }
        }
    }
    seen
}

/// Kahn order of the nodes; `None` if they contain a cycle.
pub(crate) fn topological_order<N, F>(nodes: &BTreeSet<N>, successors: F) -> Option<Vec<N>>
where
    N: Ord + Clone,
    F: Fn(&N) -> Vec<N>,
{
    let mut indegree: BTreeMap<N, usize> = nodes.iter().map(|n| (n.clone(), 0)).collect();
    for n in nodes {
        for s in successors(n) {
            if let Some(d) = indegree.get_mut(&s) {
                *d += 1;
            }
        }
    }
    let mut ready: Vec<N> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(n, _)| n.clone())
        .rev()
        .collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some(n) = ready.pop() {
        for s in successors(&n) {
            if let Some(d) = indegree.get_mut(&s) {
                *d -= 1;
                if *d == 0 {
                    ready.push(s);
                }
            }
        }
        order.push(n);
    }
    (order.len() == nodes.len()).then_some(order)
}
