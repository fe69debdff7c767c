//! Checks of the explicit identities: stable association of `1+xy` and
//! `1+yx`, the elementary `~1` moves, relation witnesses and the free-algebra
//! chain.

use rand::Rng;
use serde_json::json;

use super::{CheckResult, Coverage, Outcome, Verifier, Witness};
use crate::analytics::distance;
use crate::error::Error;
use crate::identities::{
    check_closure_identities, find_relation_witnesses, verify_association_along_path, verify_free_algebra_chain,
    verify_stable_association, EXHAUSTIVE_LIMIT,
};
use crate::ring::{ElementId, RingDescriptor, RingHandle};

/// Brute-force witness searches are quadratic in `|R|` per query; pairs are
/// enumerated exhaustively only for rings this small.
const SEARCH_EXHAUSTIVE: u32 = 16;
/// Pairs examined per ring above [`SEARCH_EXHAUSTIVE`].
const SEARCH_SAMPLES: usize = 48;

pub(super) fn ring_checks(v: &Verifier, desc: &RingDescriptor) -> Vec<CheckResult> {
    vec![
        check_stable_association(v, desc),
        check_closure_identities_on(v, desc),
        check_relation_witnesses(v, desc),
        check_association_bridge(v, desc),
    ]
}

fn random_pair(ring: &RingHandle, rng: &mut impl Rng) -> (ElementId, ElementId) {
    (ElementId(rng.gen_range(0..ring.size())), ElementId(rng.gen_range(0..ring.size())))
}

pub(super) fn check_stable_association(v: &Verifier, desc: &RingDescriptor) -> CheckResult {
    let spec = desc.to_string();
    v.run("stable-association", &spec, || {
        let ring = RingHandle::build(desc)?;
        let n = ring.size() as u64;
        let coverage = Coverage::plan(n * n);
        let pairs: Vec<(ElementId, ElementId)> = if coverage.is_exhaustive() {
            ring.elements().flat_map(|x| ring.elements().map(move |y| (x, y))).collect()
        } else {
            let mut rng = v.rng("stable-association", &spec);
            (0..super::SAMPLES).map(|_| random_pair(&ring, &mut rng)).collect()
        };
        let bad = pairs.iter().find(|&&(x, y)| !verify_stable_association(&ring, x, y));
        let witness = bad.map(|&(x, y)| Witness::new(&ring, &[x, y], "P diag(1+xy,1) Q != diag(1+yx,1)"));
        Ok(Outcome::new(
            bad.is_none(),
            json!({ "violations": 0 }),
            json!({ "violations": usize::from(bad.is_some()), "checked": pairs.len() }),
        )
        .witness(witness)
        .coverage(coverage))
    })
}

pub(super) fn check_closure_identities_on(v: &Verifier, desc: &RingDescriptor) -> CheckResult {
    let spec = desc.to_string();
    v.run("closure-identities", &spec, || {
        let p = v.prepare(desc)?;
        let seed = v.rng("closure-identities", &spec).gen();
        let report = check_closure_identities(&p.ring, &p.graph, seed);
        let witness = report.violations.first().map(|bad| Witness::new(&p.ring, &bad.elements, bad.identity));
        let coverage = if report.exhaustive {
            Coverage::Exhaustive(report.checked)
        } else {
            Coverage::Sampled { count: crate::identities::SAMPLE_COUNT, of: (p.ring.size() as u64).pow(3) }
        };
        Ok(Outcome::new(
            report.passed(),
            json!({ "violations": 0 }),
            json!({ "violations": report.violations.len(), "checked": report.checked }),
        )
        .witness(witness)
        .coverage(coverage))
    })
}

/// Pairs `(a, b)` in a common class, all of them for tiny rings and a seeded
/// sample otherwise.
fn class_pairs(v: &Verifier, check_id: &str, p: &super::Prepared) -> (Vec<(ElementId, ElementId)>, Coverage) {
    let (ring, graph) = (&p.ring, &p.graph);
    let total: u64 = graph.components().map(|m| (m.len() as u64).pow(2)).sum();
    if ring.size() <= SEARCH_EXHAUSTIVE {
        let pairs = graph
            .components()
            .flat_map(|m| m.iter().flat_map(move |&a| m.iter().map(move |&b| (ElementId(a), ElementId(b)))))
            .collect();
        return (pairs, Coverage::Exhaustive(total));
    }
    let mut rng = v.rng(check_id, &ring.spec());
    // bias towards nontrivial classes so the sample is not all singletons
    let big: Vec<&[u32]> = graph.components().filter(|m| m.len() > 1).collect();
    let pairs = (0..SEARCH_SAMPLES)
        .map(|i| {
            if big.is_empty() || i % 4 == 0 {
                let a = ElementId(rng.gen_range(0..ring.size()));
                (a, a)
            } else {
                let m = big[rng.gen_range(0..big.len())];
                (ElementId(m[rng.gen_range(0..m.len())]), ElementId(m[rng.gen_range(0..m.len())]))
            }
        })
        .collect();
    (pairs, Coverage::Sampled { count: SEARCH_SAMPLES, of: total })
}

/// `a ~n b` implies `x, y` with `ax = xb`, `ya = by`, `a^n = xy`, `b^n = yx`,
/// with `n = max(d(a, b), 1)`.
pub(super) fn check_relation_witnesses(v: &Verifier, desc: &RingDescriptor) -> CheckResult {
    v.run("relation-witnesses", &desc.to_string(), || {
        let p = v.prepare(desc)?;
        if p.ring.size() > EXHAUSTIVE_LIMIT {
            return Ok(Outcome::skip(format!("witness search needs |R| <= {EXHAUSTIVE_LIMIT}")));
        }
        let (pairs, coverage) = class_pairs(v, "relation-witnesses", &p);
        let bad = pairs.iter().find_map(|&(a, b)| {
            let n = distance(&p.graph, a, b).finite()?.max(1);
            find_relation_witnesses(&p.ring, a, b, n).is_none().then_some((a, b, n))
        });
        let witness = bad.map(|(a, b, n)| Witness::new(&p.ring, &[a, b], format!("no witness pair for n = {n}")));
        Ok(Outcome::new(
            bad.is_none(),
            json!({ "violations": 0 }),
            json!({ "violations": usize::from(bad.is_some()), "checked": pairs.len() }),
        )
        .witness(witness)
        .coverage(coverage))
    })
}

/// Along a path from `a` to `b`, composing one stable association per edge
/// carries `diag(1-a, 1)` to `diag(1-b, 1)`.
pub(super) fn check_association_bridge(v: &Verifier, desc: &RingDescriptor) -> CheckResult {
    v.run("association-bridge", &desc.to_string(), || {
        let p = v.prepare(desc)?;
        if p.ring.size() > EXHAUSTIVE_LIMIT {
            return Ok(Outcome::skip(format!("factorization search needs |R| <= {EXHAUSTIVE_LIMIT}")));
        }
        let (pairs, coverage) = class_pairs(v, "association-bridge", &p);
        let bad = pairs.iter().find(|&&(a, b)| verify_association_along_path(&p.ring, &p.graph, a, b) != Some(true));
        let witness = bad.map(|&(a, b)| Witness::new(&p.ring, &[a, b], "composed transform does not match"));
        Ok(Outcome::new(
            bad.is_none(),
            json!({ "violations": 0 }),
            json!({ "violations": usize::from(bad.is_some()), "checked": pairs.len() }),
        )
        .witness(witness)
        .coverage(coverage))
    })
}

/// `x + y x^l` reaches `x + x^l y` in exactly `l` verified steps, for
/// `l = 1..=max_l`.
pub(super) fn check_free_algebra_chain(v: &Verifier, max_l: usize) -> CheckResult {
    v.run("free-algebra-chain", "Z<x,y>", || {
        let expected: Vec<usize> = (1..=max_l).collect();
        let mut actual = Vec::new();
        let mut witness = None;
        for l in 1..=max_l {
            match verify_free_algebra_chain(l) {
                Ok(steps) => {
                    if steps.len() != l && witness.is_none() {
                        witness = Some(Witness::note(format!("l = {l} produced {} steps", steps.len())));
                    }
                    actual.push(json!(steps.len()));
                }
                Err(Error::InvalidArgument(msg)) => {
                    witness.get_or_insert_with(|| Witness::note(msg));
                    actual.push(json!(null));
                }
                Err(e) => return Err(e),
            }
        }
        Ok(Outcome::new(witness.is_none(), json!({ "steps": expected }), json!({ "steps": actual }))
            .witness(witness)
            .coverage(Coverage::Exhaustive(max_l as u64)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_ring_spec;
    use crate::verify::Status;

    #[test]
    fn identity_checks_pass() {
        let v = Verifier::new(2);
        for spec in ["Z(6)", "M(2,GF(2))"] {
            for r in ring_checks(&v, &parse_ring_spec(spec).unwrap()) {
                assert_eq!(r.status, Status::Pass, "{r:?}");
            }
        }
        let r = check_stable_association(&v, &parse_ring_spec("Z(6)").unwrap());
        assert_eq!(r.actual["checked"], 36);
        let r = check_stable_association(&v, &parse_ring_spec("M(2,GF(2))").unwrap());
        assert_eq!(r.actual["checked"], 256);
    }

    #[test]
    fn chain_check_reports_each_length() {
        let r = check_free_algebra_chain(&Verifier::default(), 10);
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.actual["steps"], json!([1, 2, 3, 4, 5, 6, 7, 8, 9, 10]));
    }

    #[test]
    fn large_rings_skip_brute_force_searches() {
        let v = Verifier::default();
        let r = check_relation_witnesses(&v, &parse_ring_spec("Z(600)").unwrap());
        assert_eq!(r.status, Status::Skipped);
    }
}
