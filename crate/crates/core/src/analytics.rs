//! Distances, eccentricity, diameters and girth on a [`CommutationGraph`].
//!
//! Everything here is exact: BFS from every source of a component. The
//! components of commutation graphs at the ring sizes we handle are small
//! compared to the ring itself.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::closure::CommutationGraph;
use crate::ring::ElementId;

/// Path length inside a class; `Unreachable` across classes. Serializes to a
/// number or `null`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistanceValue {
    Finite(u32),
    Unreachable,
}

impl DistanceValue {
    pub fn finite(self) -> Option<u32> {
        match self {
            DistanceValue::Finite(d) => Some(d),
            DistanceValue::Unreachable => None,
        }
    }
}

impl Serialize for DistanceValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.finite().serialize(s)
    }
}

impl fmt::Display for DistanceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceValue::Finite(d) => write!(f, "{d}"),
            DistanceValue::Unreachable => f.write_str("unreachable"),
        }
    }
}

/// Shortest cycle length (at least 3), or `Acyclic`. Serializes to a number
/// or `null`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GirthValue {
    Finite(u32),
    Acyclic,
}

impl GirthValue {
    pub fn finite(self) -> Option<u32> {
        match self {
            GirthValue::Finite(g) => Some(g),
            GirthValue::Acyclic => None,
        }
    }
}

impl Serialize for GirthValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.finite().serialize(s)
    }
}

impl fmt::Display for GirthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GirthValue::Finite(g) => write!(f, "{g}"),
            GirthValue::Acyclic => f.write_str("acyclic"),
        }
    }
}

const UNSEEN: u32 = u32::MAX;

/// BFS distances from `src` to each member of its component, indexed like
/// `graph.class_of(src)`.
fn class_distances(graph: &CommutationGraph, members: &[u32], src: u32) -> Vec<u32> {
    let local = |v: u32| members.binary_search(&v).expect("neighbor in same component");
    let mut dist = vec![UNSEEN; members.len()];
    let mut queue = VecDeque::new();
    dist[local(src)] = 0;
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        let du = dist[local(u)];
        for &w in graph.neighbors(ElementId(u)) {
            let lw = local(w);
            if dist[lw] == UNSEEN {
                dist[lw] = du + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// BFS distances from `a` to the members of its class, indexed like
/// `graph.class_of(a)`.
pub fn distances_within_class(graph: &CommutationGraph, a: ElementId) -> Vec<u32> {
    class_distances(graph, graph.class_of(a), a.0)
}

pub fn distance(graph: &CommutationGraph, a: ElementId, b: ElementId) -> DistanceValue {
    if graph.component_of(a) != graph.component_of(b) {
        return DistanceValue::Unreachable;
    }
    let members = graph.class_of(a);
    let dist = class_distances(graph, members, a.0);
    DistanceValue::Finite(dist[members.binary_search(&b.0).unwrap()])
}

/// Distances from `a` to every vertex of the graph (`None` outside its class).
pub fn distances_from(graph: &CommutationGraph, a: ElementId) -> Vec<DistanceValue> {
    let members = graph.class_of(a);
    let dist = class_distances(graph, members, a.0);
    let mut out = vec![DistanceValue::Unreachable; graph.vertex_count() as usize];
    for (&m, &d) in members.iter().zip(&dist) {
        out[m as usize] = DistanceValue::Finite(d);
    }
    out
}

pub fn eccentricity(graph: &CommutationGraph, a: ElementId) -> u32 {
    let members = graph.class_of(a);
    class_distances(graph, members, a.0).into_iter().max().unwrap_or(0)
}

fn component_diameter(graph: &CommutationGraph, members: &[u32]) -> u32 {
    if members.len() < 2 {
        return 0;
    }
    members.par_iter().map(|&s| class_distances(graph, members, s).into_iter().max().unwrap_or(0)).max().unwrap_or(0)
}

/// Eccentricity of every vertex, indexed by element id.
pub fn eccentricities(graph: &CommutationGraph) -> Vec<u32> {
    let mut out = vec![0u32; graph.vertex_count() as usize];
    for members in graph.components() {
        if members.len() < 2 {
            continue;
        }
        let ecc: Vec<u32> =
            members.par_iter().map(|&s| class_distances(graph, members, s).into_iter().max().unwrap_or(0)).collect();
        for (&m, e) in members.iter().zip(ecc) {
            out[m as usize] = e;
        }
    }
    out
}

/// Largest distance between two members of the class of `a`.
pub fn class_diameter(graph: &CommutationGraph, a: ElementId) -> u32 {
    component_diameter(graph, graph.class_of(a))
}

/// Diameter of every component, indexed by component label.
pub fn component_diameters(graph: &CommutationGraph) -> Vec<u32> {
    let comps: Vec<&[u32]> = graph.components().collect();
    comps.into_iter().map(|m| component_diameter(graph, m)).collect()
}

pub fn ring_diameter(graph: &CommutationGraph) -> u32 {
    component_diameters(graph).into_iter().max().unwrap_or(0)
}

/// Shortest cycle through BFS trees rooted at every member: a non-tree edge
/// `(u, w)` closes a closed walk of length `d(u) + d(w) + 1`, and the
/// minimum over all roots is the girth.
fn component_girth(graph: &CommutationGraph, members: &[u32]) -> GirthValue {
    if members.len() < 3 {
        return GirthValue::Acyclic;
    }
    let edges: usize = members.iter().map(|&m| graph.degree(ElementId(m))).sum::<usize>() / 2;
    if edges < members.len() {
        // a connected graph with |E| = |V| - 1 is a tree
        return GirthValue::Acyclic;
    }
    let local = |v: u32| members.binary_search(&v).expect("neighbor in same component");
    let mut best = u32::MAX;
    let mut dist = vec![UNSEEN; members.len()];
    let mut parent = vec![UNSEEN; members.len()];
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();
    for &root in members {
        if best == 3 {
            break;
        }
        for &t in &touched {
            dist[t] = UNSEEN;
            parent[t] = UNSEEN;
        }
        touched.clear();
        queue.clear();
        let lr = local(root);
        dist[lr] = 0;
        touched.push(lr);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            let lu = local(u);
            let du = dist[lu];
            if 2 * du + 1 >= best {
                break;
            }
            for &w in graph.neighbors(ElementId(u)) {
                let lw = local(w);
                if dist[lw] == UNSEEN {
                    dist[lw] = du + 1;
                    parent[lw] = u;
                    touched.push(lw);
                    queue.push_back(w);
                } else if parent[lu] != w {
                    best = best.min(du + dist[lw] + 1);
                }
            }
        }
    }
    if best == u32::MAX {
        GirthValue::Acyclic
    } else {
        GirthValue::Finite(best)
    }
}

pub fn class_girth(graph: &CommutationGraph, a: ElementId) -> GirthValue {
    component_girth(graph, graph.class_of(a))
}

/// Girth of every component, indexed by component label.
pub fn component_girths(graph: &CommutationGraph) -> Vec<GirthValue> {
    let comps: Vec<&[u32]> = graph.components().collect();
    comps.into_par_iter().map(|m| component_girth(graph, m)).collect()
}

pub fn ring_girth(graph: &CommutationGraph) -> GirthValue {
    component_girths(graph).into_iter().min().unwrap_or(GirthValue::Acyclic)
}
