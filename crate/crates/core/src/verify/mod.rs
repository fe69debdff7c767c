//! Named checks of structural results on concrete rings, aggregated into a
//! machine-readable report.
//!
//! Each check compares a graph-derived quantity with an independent oracle
//! (brute-force enumeration, linear algebra, or a direct relation sweep).
//! Quantifiers run exhaustively when the domain has at most
//! [`EXHAUSTIVE_TUPLES`] tuples and over [`SAMPLES`] seeded samples otherwise.

mod identity;
mod properties;
mod structure;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::cache::GraphCache;
use crate::closure::{CommutationGraph, GraphOptions};
use crate::error::{Error, Result};
use crate::ring::{parse_ring_spec, ElementId, RingDescriptor, RingHandle};

pub const EXHAUSTIVE_TUPLES: u64 = 1_000_000;
pub const SAMPLES: usize = 1_000;
pub const DEFAULT_SEED: u64 = 20_240_601;

pub const SUITES: [&str; 4] = ["paper-core", "identities", "properties", "all"];

pub const CORE_RINGS: [&str; 7] =
    ["Z(12)", "GF(4)", "M(2,GF(2))", "M(2,GF(3))", "M(3,GF(2))", "Z(4)xM(2,GF(2))", "M(2,GF(2))xM(3,GF(2))"];
pub const IDENTITY_RINGS: [&str; 6] = ["Z(6)", "Z(12)", "GF(4)", "M(2,GF(2))", "M(3,GF(2))", "Z(4)xM(2,GF(2))"];
pub const PROPERTY_RINGS: [&str; 6] = ["Z(12)", "GF(4)", "M(2,GF(2))", "M(3,GF(2))", "M(2,GF(3))", "Z(4)xM(2,GF(2))"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Elements refuting a check, with their decoded rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub elements: Vec<ElementId>,
    pub decoded: Vec<String>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Witness {
    pub fn new(ring: &RingHandle, elements: &[ElementId], note: impl Into<String>) -> Self {
        Witness {
            elements: elements.to_vec(),
            decoded: elements.iter().map(|&a| ring.render(a)).collect(),
            note: note.into(),
        }
    }

    /// A witness that is not a tuple of ring elements.
    pub fn note(note: impl Into<String>) -> Self {
        Witness { elements: Vec::new(), decoded: Vec::new(), note: note.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check_id: String,
    pub ring: String,
    pub status: Status,
    pub expected: Value,
    pub actual: Value,
    /// How the quantifier was discharged, e.g. `exhaustive (4096 pairs)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Wall time; not serialized so reports are reproducible byte for byte.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl Summary {
    pub fn tally(results: &[CheckResult]) -> Self {
        let count = |s| results.iter().filter(|r| r.status == s).count();
        Summary {
            total: results.len(),
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            skipped: count(Status::Skipped),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub results: Vec<CheckResult>,
    pub summary: Summary,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// What a check body produces; [`Verifier::run`] adds the id, ring and timing.
#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    passed: bool,
    skipped: bool,
    expected: Value,
    actual: Value,
    coverage: Option<String>,
    witness: Option<Witness>,
}

impl Outcome {
    pub(crate) fn new(passed: bool, expected: impl Serialize, actual: impl Serialize) -> Self {
        Outcome {
            passed,
            skipped: false,
            expected: serde_json::to_value(expected).expect("serializable"),
            actual: serde_json::to_value(actual).expect("serializable"),
            coverage: None,
            witness: None,
        }
    }

    pub(crate) fn skip(reason: impl Into<String>) -> Self {
        Outcome {
            passed: true,
            skipped: true,
            expected: Value::Null,
            actual: Value::String(reason.into()),
            coverage: None,
            witness: None,
        }
    }

    pub(crate) fn witness(mut self, w: Option<Witness>) -> Self {
        self.witness = w;
        self
    }

    pub(crate) fn coverage(mut self, c: impl std::fmt::Display) -> Self {
        self.coverage = Some(c.to_string());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Coverage {
    Exhaustive(u64),
    Sampled { count: usize, of: u64 },
}

impl Coverage {
    pub(crate) fn plan(total: u64) -> Coverage {
        if total <= EXHAUSTIVE_TUPLES {
            Coverage::Exhaustive(total)
        } else {
            Coverage::Sampled { count: SAMPLES, of: total }
        }
    }

    pub(crate) fn is_exhaustive(self) -> bool {
        matches!(self, Coverage::Exhaustive(_))
    }
}

impl std::fmt::Display for Coverage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coverage::Exhaustive(n) => write!(f, "exhaustive ({n} tuples)"),
            Coverage::Sampled { count, of } => write!(f, "sampled ({count} of {of} tuples)"),
        }
    }
}

/// A ring together with its commutation graph.
#[derive(Debug)]
pub struct Prepared {
    pub ring: RingHandle,
    pub graph: CommutationGraph,
    eccentricities: OnceLock<Vec<u32>>,
    diameters: OnceLock<Vec<u32>>,
}

impl Prepared {
    pub fn new(ring: RingHandle, graph: CommutationGraph) -> Self {
        Prepared { ring, graph, eccentricities: OnceLock::new(), diameters: OnceLock::new() }
    }

    /// Indexed by element id; computed once.
    pub fn eccentricities(&self) -> &[u32] {
        self.eccentricities.get_or_init(|| crate::analytics::eccentricities(&self.graph))
    }

    /// Indexed by component label.
    pub fn component_diameters(&self) -> &[u32] {
        self.diameters.get_or_init(|| {
            let ecc = self.eccentricities();
            self.graph.components().map(|m| m.iter().map(|&a| ecc[a as usize]).max().unwrap_or(0)).collect()
        })
    }
}

/// Runs checks against a shared, lazily built set of graphs.
pub struct Verifier {
    seed: u64,
    options: GraphOptions,
    cache: GraphCache,
    prepared: Mutex<HashMap<String, Arc<Prepared>>>,
}

impl Default for Verifier {
    fn default() -> Self {
        Verifier::new(DEFAULT_SEED)
    }
}

impl Verifier {
    pub fn new(seed: u64) -> Self {
        Verifier { seed, options: GraphOptions::default(), cache: GraphCache::disabled(), prepared: Mutex::default() }
    }

    pub fn with_options(mut self, options: GraphOptions) -> Self {
        self.options = options;
        self
    }

    pub fn with_cache(mut self, cache: GraphCache) -> Self {
        self.cache = cache;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Builds (or fetches) the ring and its graph.
    pub fn prepare(&self, desc: &RingDescriptor) -> Result<Arc<Prepared>> {
        let key = desc.to_string();
        if let Some(p) = self.prepared.lock().unwrap().get(&key) {
            return Ok(p.clone());
        }
        let ring = RingHandle::build(desc)?;
        let graph = self.cache.load_or_build(&ring, self.options)?;
        let p = Arc::new(Prepared::new(ring, graph));
        self.prepared.lock().unwrap().insert(key, p.clone());
        Ok(p)
    }

    /// A generator seeded from the suite seed and the check's identity, so a
    /// check samples the same tuples whatever else runs alongside it.
    pub(crate) fn rng(&self, check_id: &str, ring: &str) -> ChaCha8Rng {
        let digest = Sha256::new()
            .chain_update(self.seed.to_le_bytes())
            .chain_update(check_id.as_bytes())
            .chain_update([0])
            .chain_update(ring.as_bytes())
            .finalize();
        ChaCha8Rng::seed_from_u64(u64::from_le_bytes(digest[..8].try_into().unwrap()))
    }

    pub(crate) fn run(&self, check_id: &str, ring: &str, body: impl FnOnce() -> Result<Outcome>) -> CheckResult {
        let start = Instant::now();
        let outcome = body().unwrap_or_else(|e| Outcome::skip(e.to_string()));
        let elapsed = start.elapsed();
        let status = if outcome.skipped {
            Status::Skipped
        } else if outcome.passed {
            Status::Pass
        } else {
            Status::Fail
        };
        let witness = match (status, outcome.witness) {
            (Status::Fail, None) => Some(Witness::note("expected and actual differ")),
            (_, w) => w,
        };
        log::info!("{check_id} {ring}: {status:?} in {:.3}s", elapsed.as_secs_f64());
        CheckResult {
            check_id: check_id.to_string(),
            ring: ring.to_string(),
            status,
            expected: outcome.expected,
            actual: outcome.actual,
            coverage: outcome.coverage,
            witness,
            elapsed,
        }
    }

    /// Runs every applicable check of `suite` on `rings` (the suite's default
    /// rings when empty). Never stops at the first failure.
    pub fn run_suite(&self, suite: &str, rings: &[String]) -> Result<Report> {
        if !SUITES.contains(&suite) {
            return Err(Error::UnknownSuite(suite.to_string()));
        }
        let parse = |specs: &[&str]| specs.iter().map(|s| parse_ring_spec(s)).collect::<Result<Vec<_>>>();
        let given = rings.iter().map(|s| parse_ring_spec(s)).collect::<Result<Vec<_>>>()?;
        let pick = |defaults: &[&str]| -> Result<Vec<RingDescriptor>> {
            if given.is_empty() {
                parse(defaults)
            } else {
                Ok(given.clone())
            }
        };
        let mut results = Vec::new();
        if matches!(suite, "paper-core" | "all") {
            for desc in pick(&CORE_RINGS)? {
                results.extend(structure::ring_checks(self, &desc));
            }
        }
        if matches!(suite, "identities" | "all") {
            for desc in pick(&IDENTITY_RINGS)? {
                results.extend(identity::ring_checks(self, &desc));
            }
            results.push(identity::check_free_algebra_chain(self, 10));
        }
        if matches!(suite, "properties" | "all") {
            for desc in pick(&PROPERTY_RINGS)? {
                results.extend(properties::ring_checks(self, &desc));
            }
            results.extend(properties::check_jordan_splitting(self));
        }
        results.sort_by(|a, b| (&a.check_id, &a.ring).cmp(&(&b.check_id, &b.ring)));
        results.dedup_by(|a, b| a.check_id == b.check_id && a.ring == b.ring);
        let summary = Summary::tally(&results);
        Ok(Report { suite: suite.to_string(), seed: self.seed, results, summary })
    }
}

pub fn run_suite(suite: &str, rings: &[String], seed: u64) -> Result<Report> {
    Verifier::new(seed).run_suite(suite, rings)
}

fn matrix_spec(n: u32, q: u64) -> String {
    format!("M({n},GF({q}))")
}

fn run_on_spec(spec: &str, f: impl FnOnce(&Verifier, &RingDescriptor) -> CheckResult) -> Result<CheckResult> {
    let desc = parse_ring_spec(spec)?;
    Ok(f(&Verifier::default(), &desc))
}

/// `closure({0})` equals the set of matrices with `A^n = 0`.
pub fn check_nilpotent_class(n: u32, q: u64) -> Result<CheckResult> {
    run_on_spec(&matrix_spec(n, q), structure::check_nilpotent_class)
}

/// `d(A, 0) = ν(A) - 1` for every nilpotent `A`.
pub fn check_distance_law(n: u32, q: u64) -> Result<CheckResult> {
    run_on_spec(&matrix_spec(n, q), structure::check_distance_law)
}

/// Ring diameter and the diameter of the class of 0 are both `n - 1`.
pub fn check_matrix_diameter(n: u32, q: u64) -> Result<CheckResult> {
    run_on_spec(&matrix_spec(n, q), structure::check_matrix_diameter)
}

/// Diameter of `A x B` is the larger factor diameter, and closures factor.
pub fn check_product_laws(spec_a: &str, spec_b: &str) -> Result<CheckResult> {
    let a = parse_ring_spec(spec_a)?;
    let b = parse_ring_spec(spec_b)?;
    Ok(structure::check_product_laws(&Verifier::default(), &RingDescriptor::product(a, b)))
}

/// Closures of units are conjugacy classes of diameter at most 1.
pub fn check_unit_classes(n: u32, q: u64) -> Result<CheckResult> {
    run_on_spec(&matrix_spec(n, q), structure::check_unit_classes)
}

/// `N(R)`, `U(R)-1`, `Z_l(R)+1`, `Z_r(R)+1` and `{u : l(u-1) != 0}` are
/// commutatively closed.
pub fn check_closed_families(spec: &str) -> Result<CheckResult> {
    run_on_spec(spec, structure::check_closed_families)
}

/// Girth of the class of 0 and of the whole graph is 3.
pub fn check_girth(n: u32, q: u64) -> Result<CheckResult> {
    if n < 2 {
        return Err(Error::InvalidArgument("girth check needs n >= 2".into()));
    }
    run_on_spec(&matrix_spec(n, q), structure::check_girth)
}

/// Diameter of a product of matrix rings over fields is `max(n_i) - 1`.
pub fn check_semisimple_diameter(spec: &str) -> Result<CheckResult> {
    run_on_spec(spec, structure::check_semisimple_diameter)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(matches!(run_suite("foo", &[], 1), Err(Error::UnknownSuite(_))));
        assert!(run_suite("paper-core", &["GF(6)".to_string()], 1).is_err());
    }

    #[test]
    fn summary_matches_results() {
        let report = run_suite("paper-core", &["M(2,GF(2))".into(), "Z(6)".into()], 3).unwrap();
        let s = report.summary;
        assert_eq!(s.total, report.results.len());
        assert_eq!(s.passed + s.failed + s.skipped, s.total);
        assert!(report.passed(), "{}", report.to_json());
        let ids: Vec<(&str, &str)> = report.results.iter().map(|r| (r.check_id.as_str(), r.ring.as_str())).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn failures_carry_witnesses() {
        let v = Verifier::default();
        let r = v.run("x", "Z(2)", || Ok(Outcome::new(false, 1, 2)));
        assert_eq!(r.status, Status::Fail);
        assert!(r.witness.is_some());
        let r = v.run("x", "Z(2)", || Err(Error::EmptySeed));
        assert_eq!(r.status, Status::Skipped);
    }

    #[test]
    fn report_json_is_reproducible() {
        let a = run_suite("identities", &["Z(6)".into()], 9).unwrap().to_json();
        let b = run_suite("identities", &["Z(6)".into()], 9).unwrap().to_json();
        assert_eq!(a, b);
        assert!(!a.contains("elapsed"));
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["seed"], 9);
        assert_eq!(v["suite"], "identities");
    }

    #[test]
    fn spec_shaped_entry_points() {
        assert_eq!(check_nilpotent_class(2, 2).unwrap().status, Status::Pass);
        assert_eq!(check_distance_law(2, 2).unwrap().status, Status::Pass);
        assert_eq!(check_matrix_diameter(2, 2).unwrap().actual, serde_json::json!({"ring": 1, "class_of_zero": 1}));
        assert_eq!(check_product_laws("Z(6)", "Z(10)").unwrap().status, Status::Pass);
        assert_eq!(check_unit_classes(2, 2).unwrap().status, Status::Pass);
        assert_eq!(check_closed_families("Z(12)").unwrap().status, Status::Pass);
        assert_eq!(check_girth(2, 2).unwrap().status, Status::Pass);
        assert!(check_girth(1, 2).is_err());
        assert_eq!(check_semisimple_diameter("GF(4)xM(2,GF(2))").unwrap().status, Status::Pass);
    }
}
