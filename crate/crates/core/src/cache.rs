//! On-disk cache of commutation graphs in EDGELIST format.
//!
//! Entries are keyed by the SHA-256 of the canonical ring spec. A cache entry
//! is trusted only if its header names the same ring and it parses as a valid
//! sorted edge list; anything else is logged and rebuilt.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::closure::{build_commutation_graph_with, CommutationGraph, GraphOptions};
use crate::error::Result;
use crate::export::{parse_edgelist, to_edgelist, write_atomic};
use crate::ring::RingHandle;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "CCGRAPH_CACHE";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphCache {
    dir: Option<PathBuf>,
}

impl GraphCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        GraphCache { dir }
    }

    /// Explicit directory first, then `CCGRAPH_CACHE`, else in-memory only.
    pub fn resolve(dir: Option<PathBuf>) -> Self {
        let dir = dir.or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
        GraphCache { dir }
    }

    pub fn disabled() -> Self {
        GraphCache { dir: None }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn key(spec: &str) -> String {
        format!("{:x}", Sha256::digest(spec.as_bytes()))
    }

    pub fn path_for(&self, ring: &RingHandle) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.edgelist", Self::key(&ring.spec()))))
    }

    /// `None` on a miss, on a missing directory, or on a corrupt or
    /// mismatched entry (with a warning).
    pub fn load(&self, ring: &RingHandle) -> Option<CommutationGraph> {
        let path = self.path_for(ring)?;
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                log::warn!("cache entry {} unreadable ({e}); rebuilding", path.display());
                return None;
            }
        };
        match parse_edgelist(&text) {
            Ok(g) if g.ring() == ring.descriptor() && g.vertex_count() == ring.size() => {
                log::debug!("cache hit for {} at {}", ring.spec(), path.display());
                Some(g)
            }
            Ok(g) => {
                log::warn!("cache entry {} is for {}, not {}; rebuilding", path.display(), g.ring(), ring.spec());
                None
            }
            Err(e) => {
                log::warn!("cache entry {} is corrupt ({e}); rebuilding", path.display());
                None
            }
        }
    }

    /// Writes the entry atomically. A missing cache directory is not an
    /// error: the graph simply stays in memory.
    pub fn store(&self, ring: &RingHandle, graph: &CommutationGraph) -> Result<()> {
        let Some(path) = self.path_for(ring) else {
            return Ok(());
        };
        if !path.parent().is_some_and(Path::is_dir) {
            log::debug!("cache directory {} missing; not storing", path.parent().unwrap_or(&path).display());
            return Ok(());
        }
        write_atomic(&path, to_edgelist(graph).as_bytes())
    }

    pub fn load_or_build(&self, ring: &RingHandle, opts: GraphOptions) -> Result<CommutationGraph> {
        if let Some(g) = self.load(ring) {
            return Ok(g);
        }
        let graph = build_commutation_graph_with(ring, opts)?;
        if let Err(e) = self.store(ring, &graph) {
            log::warn!("could not write cache entry for {}: {e}", ring.spec());
        }
        Ok(graph)
    }
}
