//! Graphviz DOT output for quivers and `ZQ` slabs.
//!
//! Output is deterministic: nodes appear in slab order (slice, then base)
//! and edges in source order, one edge line per parallel arrow.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::distances::{distances_from, left_lightcone_zq, right_lightcone_zq, Budget, Direction};
use crate::error::{Error, Result};
use crate::family::WindowedQuiver;
use crate::quiver::{Quiver, QuiverSource, VertexId};
use crate::zq::{slab, Window, ZVertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Annotation {
    Plain,
    /// Mark the right and left light cones of the center.
    Lightcones(ZVertex),
    /// Label every vertex with its round trip distance to the center.
    RoundtripLabels(ZVertex),
    /// Highlight one selected slice per orbit.
    Section(BTreeMap<VertexId, i64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderSpec {
    pub window: Window,
    pub annotation: Annotation,
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// The slab of `spec.window`, annotated.
pub fn emit_dot<Q: QuiverSource + ?Sized>(q: &Q, spec: &RenderSpec) -> Result<String> {
    let s = slab(q, &spec.window)?;
    let center = match &spec.annotation {
        Annotation::Lightcones(c) | Annotation::RoundtripLabels(c) => Some(c),
        _ => None,
    };
    if let Some(c) = center {
        if !spec.window.contains(c) || !q.contains(&c.base) {
            return Err(Error::UnknownVertex(c.base.clone()));
        }
    }

    let (right, left) = match &spec.annotation {
        Annotation::Lightcones(c) => (
            right_lightcone_zq(q, c, &spec.window)?,
            left_lightcone_zq(q, c, &spec.window)?,
        ),
        _ => (BTreeSet::new(), BTreeSet::new()),
    };
    let roundtrip: Option<BTreeMap<VertexId, i64>> = match &spec.annotation {
        Annotation::RoundtripLabels(c) => {
            let view = WindowedQuiver::new(q, &spec.window.scope)?;
            let there = distances_from(&view, &c.base, Direction::Right, Budget::DEFAULT)?;
            let back = distances_from(&view, &c.base, Direction::Left, Budget::DEFAULT)?;
            Some(
                there
                    .iter()
                    .filter_map(|(y, d)| back.get(y).map(|e| (y.clone(), d + e)))
                    .collect(),
            )
        }
        _ => None,
    };

    let mut out = String::from("digraph zq {\n  rankdir=LR;\n  node [shape=ellipse];\n");
    for v in s.vertices() {
        let name = v.to_string();
        let mut attrs = Vec::new();
        match &spec.annotation {
            Annotation::Plain => {}
            Annotation::Lightcones(c) => {
                let cone = match (right.contains(v), left.contains(v)) {
                    (true, true) => Some(("both", "plum")),
                    (true, false) => Some(("right", "lightblue")),
                    (false, true) => Some(("left", "lightpink")),
                    (false, false) => None,
                };
                if let Some((side, color)) = cone {
                    attrs.push(format!("cone={}", quote(side)));
                    attrs.push("style=filled".to_string());
                    attrs.push(format!("fillcolor={}", quote(color)));
                }
                if v == c {
                    attrs.push("shape=doublecircle".to_string());
                }
            }
            Annotation::RoundtripLabels(c) => {
                let d = roundtrip
                    .as_ref()
                    .and_then(|m| m.get(&v.base))
                    .map_or_else(|| "inf".to_string(), ToString::to_string);
                attrs.push(format!("label={}", quote(&format!("{name}\nd={d}"))));
                if v == c {
                    attrs.push("shape=doublecircle".to_string());
                }
            }
            Annotation::Section(selection) => {
                if selection.get(&v.base) == Some(&v.slice) {
                    attrs.push("section=true".to_string());
                    attrs.push("style=filled".to_string());
                    attrs.push(format!("fillcolor={}", quote("gold")));
                }
            }
        }
        if attrs.is_empty() {
            writeln!(out, "  {};", quote(&name)).unwrap();
        } else {
            writeln!(out, "  {} [{}];", quote(&name), attrs.join(", ")).unwrap();
        }
    }
    for (a, b, m) in s.arrows() {
        for _ in 0..m {
            writeln!(out, "  {} -> {};", quote(&a.to_string()), quote(&b.to_string())).unwrap();
        }
    }
    out.push_str("}\n");
    Ok(out)
}

/// A finite quiver on its own, vertices sorted.
pub fn emit_quiver_dot(q: &Quiver) -> String {
    let mut out = String::from("digraph quiver {\n");
    for v in q.vertices() {
        writeln!(out, "  {};", quote(&v.to_string())).unwrap();
    }
    for (a, b, m) in q.arrows() {
        for _ in 0..m {
            writeln!(out, "  {} -> {};", quote(&a.to_string()), quote(&b.to_string())).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> Quiver {
        Quiver::from_named(&["x", "y"], &[("x", "y", 1)])
    }

    #[test]
    fn plain_slab() {
        let spec = RenderSpec {
            window: Window::slices(0, 1),
            annotation: Annotation::Plain,
        };
        let dot = emit_dot(&a2(), &spec).unwrap();
        assert_eq!(dot.matches(" -> ").count(), 3);
        for n in ["\"0:x\";", "\"0:y\";", "\"1:x\";", "\"1:y\";"] {
            assert!(dot.contains(n), "{dot}");
        }
        assert_eq!(dot, emit_dot(&a2(), &spec).unwrap());
    }

    #[test]
    fn cones_mark_one_vertex_per_orbit() {
        let spec = RenderSpec {
            window: Window::slices(-2, 2),
            annotation: Annotation::Lightcones(ZVertex::new(0, "x")),
        };
        let dot = emit_dot(&a2(), &spec).unwrap();
        let marked = |side: &str| dot.lines().filter(|l| l.contains(&format!("cone=\"{side}\""))).count();
        // x is in both cones of itself; y lies in the right cone at slice 0
        // and in the left cone at slice -1
        assert_eq!(marked("both"), 1);
        assert_eq!(marked("right"), 1);
        assert_eq!(marked("left"), 1);
    }

    #[test]
    fn escaping() {
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
    }
}
