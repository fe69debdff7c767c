//! Graph exports: DOT, JSON, CSV and the EDGELIST cache format.
//!
//! Every format is a pure function of the graph, so output is byte-identical
//! across runs and thread counts. Files are written to a temporary sibling
//! and renamed into place.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::analytics::{component_diameters, component_girths, GirthValue};
use crate::closure::CommutationGraph;
use crate::error::{Error, Result};
use crate::ring::{parse_ring_spec, RingDescriptor, RingHandle};

pub const EDGELIST_MAGIC: &str = "ccgraph";
pub const EDGELIST_VERSION: &str = "v1";
pub const DOT_LABEL_LIMIT: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExportFormat {
    Dot,
    Json,
    Csv,
    Edgelist,
}

impl ExportFormat {
    pub const ALL: [ExportFormat; 4] =
        [ExportFormat::Dot, ExportFormat::Json, ExportFormat::Csv, ExportFormat::Edgelist];

    pub fn name(self) -> &'static str {
        match self {
            ExportFormat::Dot => "dot",
            ExportFormat::Json => "json",
            ExportFormat::Csv => "csv",
            ExportFormat::Edgelist => "edgelist",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExportFormat::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown export format `{s}`")))
    }
}

impl std::fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn render(ring: &RingHandle, graph: &CommutationGraph, format: ExportFormat) -> Result<String> {
    match format {
        ExportFormat::Dot => Ok(to_dot(ring, graph)),
        ExportFormat::Json => to_json(ring, graph),
        ExportFormat::Csv => Ok(to_csv(graph)),
        ExportFormat::Edgelist => Ok(to_edgelist(graph)),
    }
}

fn truncate_label(s: &str) -> String {
    if s.chars().count() <= DOT_LABEL_LIMIT {
        s.to_string()
    } else {
        let mut out: String = s.chars().take(DOT_LABEL_LIMIT - 3).collect();
        out.push_str("...");
        out
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Vertices by id with their decoded rendering, then each edge once with the
/// lower id first.
pub fn to_dot(ring: &RingHandle, graph: &CommutationGraph) -> String {
    let mut out = String::new();
    writeln!(out, "graph \"{}\" {{", dot_escape(&graph.ring().to_string())).unwrap();
    for a in ring.elements() {
        let label = dot_escape(&truncate_label(&ring.render(a)));
        writeln!(out, "  {} [label=\"{}\"];", a.0, label).unwrap();
    }
    for (u, v) in graph.edges() {
        writeln!(out, "  {u} -- {v};").unwrap();
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize)]
struct JsonComponent<'a> {
    label: usize,
    size: usize,
    diameter: u32,
    girth: GirthValue,
    members: &'a [u32],
}

#[derive(Serialize)]
struct JsonGraph<'a> {
    ring: String,
    size: u32,
    edge_count: u64,
    component_count: usize,
    components: Vec<JsonComponent<'a>>,
    edges: Vec<[u32; 2]>,
}

/// Components with their diameter and girth, plus the edge list.
pub fn to_json(_ring: &RingHandle, graph: &CommutationGraph) -> Result<String> {
    let diameters = component_diameters(graph);
    let girths = component_girths(graph);
    let components = graph
        .components()
        .enumerate()
        .map(|(label, members)| JsonComponent {
            label,
            size: members.len(),
            diameter: diameters[label],
            girth: girths[label],
            members,
        })
        .collect();
    let doc = JsonGraph {
        ring: graph.ring().to_string(),
        size: graph.vertex_count(),
        edge_count: graph.edge_count(),
        component_count: graph.component_count(),
        components,
        edges: graph.edges().map(|(u, v)| [u, v]).collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn to_csv(graph: &CommutationGraph) -> String {
    let mut out = String::from("u,v\n");
    for (u, v) in graph.edges() {
        writeln!(out, "{u},{v}").unwrap();
    }
    out
}

pub fn edgelist_header(graph: &CommutationGraph) -> String {
    format!("{EDGELIST_MAGIC} {EDGELIST_VERSION} {} {} {}", graph.ring(), graph.vertex_count(), graph.edge_count())
}

pub fn to_edgelist(graph: &CommutationGraph) -> String {
    let mut out = edgelist_header(graph);
    out.push('\n');
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// Parsed EDGELIST header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgelistHeader {
    pub ring: RingDescriptor,
    pub size: u32,
    pub edge_count: u64,
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(format!("edgelist: {}", msg.into()))
}

pub fn parse_edgelist_header(line: &str) -> Result<EdgelistHeader> {
    let fields: Vec<&str> = line.split(' ').collect();
    let [magic, version, spec, size, edges] = fields[..] else {
        return Err(corrupt("header must have five fields"));
    };
    if magic != EDGELIST_MAGIC || version != EDGELIST_VERSION {
        return Err(corrupt(format!("unsupported header `{magic} {version}`")));
    }
    Ok(EdgelistHeader {
        ring: parse_ring_spec(spec)?,
        size: size.parse().map_err(|_| corrupt("bad vertex count"))?,
        edge_count: edges.parse().map_err(|_| corrupt("bad edge count"))?,
    })
}

/// Inverse of [`to_edgelist`]; rejects anything that `to_edgelist` would not
/// have produced.
pub fn parse_edgelist(text: &str) -> Result<CommutationGraph> {
    let mut lines = text.lines();
    let header = parse_edgelist_header(lines.next().ok_or_else(|| corrupt("empty file"))?)?;
    let mut edges = Vec::with_capacity(header.edge_count as usize);
    for line in lines {
        let (u, v) = line.split_once(' ').ok_or_else(|| corrupt(format!("bad line `{line}`")))?;
        let u = u.parse::<u32>().map_err(|_| corrupt(format!("bad line `{line}`")))?;
        let v = v.parse::<u32>().map_err(|_| corrupt(format!("bad line `{line}`")))?;
        edges.push((u, v));
    }
    if edges.len() as u64 != header.edge_count {
        return Err(corrupt(format!("expected {} edges, found {}", header.edge_count, edges.len())));
    }
    CommutationGraph::from_sorted_edges(header.ring, header.size, &edges)
}

/// Writes `contents` to a temporary file next to `path`, then renames it, so
/// a failure never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_export(path: &Path, ring: &RingHandle, graph: &CommutationGraph, format: ExportFormat) -> Result<()> {
    write_atomic(path, render(ring, graph, format)?.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::{build_commutation_graph, build_commutation_graph_with, GraphOptions};

    fn setup(spec: &str) -> (RingHandle, CommutationGraph) {
        let r = RingHandle::from_spec(spec).unwrap();
        let g = build_commutation_graph(&r).unwrap();
        (r, g)
    }

    #[test]
    fn dot_lists_every_vertex() {
        let (r, g) = setup("M(2,GF(2))");
        let dot = to_dot(&r, &g);
        assert!(dot.starts_with("graph \"M(2,GF(2))\" {\n"));
        assert_eq!(dot.lines().filter(|l| l.contains("[label=")).count(), 16);
        assert!(dot.contains("  9 [label=\"[[1,0],[0,1]]\"];"));
        assert_eq!(dot.lines().filter(|l| l.contains(" -- ")).count() as u64, g.edge_count());
    }

    #[test]
    fn long_labels_are_truncated() {
        let (r, g) = setup("M(3,GF(2))xM(2,GF(2))");
        let dot = to_dot(&r, &g);
        let longest = dot.lines().filter_map(|l| l.split_once("label=\"")).map(|(_, rest)| rest.len() - 3).max();
        assert_eq!(longest, Some(DOT_LABEL_LIMIT));
    }

    #[test]
    fn commutative_csv_is_header_only() {
        let (_, g) = setup("Z(12)");
        assert_eq!(to_csv(&g), "u,v\n");
        assert_eq!(to_edgelist(&g), "ccgraph v1 Z(12) 12 0\n");
    }

    #[test]
    fn edgelist_round_trip() {
        for spec in ["M(2,GF(2))", "Z(4)xM(2,GF(2))", "GF(2^2)"] {
            let (_, g) = setup(spec);
            let text = to_edgelist(&g);
            assert_eq!(parse_edgelist(&text).unwrap(), g);
        }
    }

    #[test]
    fn corrupt_edgelists_are_rejected() {
        let (_, g) = setup("M(2,GF(2))");
        let text = to_edgelist(&g);
        let truncated: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(parse_edgelist(&truncated).is_err());
        assert!(parse_edgelist(&text.replacen("v1", "v9", 1)).is_err());
        assert!(parse_edgelist(&text.replacen("1 ", "x ", 1)).is_err());
        assert!(parse_edgelist("").is_err());
    }

    #[test]
    fn json_has_component_metrics() {
        let (r, g) = setup("M(2,GF(2))");
        let v: serde_json::Value = serde_json::from_str(&to_json(&r, &g).unwrap()).unwrap();
        assert_eq!(v["size"], 16);
        let zero = &v["components"][0];
        assert_eq!(zero["members"].as_array().unwrap().len(), 4);
        assert_eq!(zero["diameter"], 1);
        assert_eq!(zero["girth"], 3);
        let (r, g) = setup("Z(6)");
        let v: serde_json::Value = serde_json::from_str(&to_json(&r, &g).unwrap()).unwrap();
        assert!(v["components"][0]["girth"].is_null());
    }

    #[test]
    fn exports_do_not_depend_on_threads() {
        let r = RingHandle::from_spec("M(2,GF(2))xZ(3)").unwrap();
        let one = build_commutation_graph_with(&r, GraphOptions { threads: Some(1), ..Default::default() }).unwrap();
        let three = build_commutation_graph_with(&r, GraphOptions { threads: Some(3), ..Default::default() }).unwrap();
        for f in ExportFormat::ALL {
            assert_eq!(render(&r, &one, f).unwrap(), render(&r, &three, f).unwrap(), "{f}");
        }
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        write_atomic(&path, b"old").unwrap();
        let (r, g) = setup("M(2,GF(2))");
        write_export(&path, &r, &g, ExportFormat::Csv).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), to_csv(&g));
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert!(write_atomic(&dir.path().join("missing/g.csv"), b"x").is_err());
    }
}
