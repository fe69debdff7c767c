//! Checks of the main structural results: nilpotent classes, distances,
//! diameters, girth, unit classes, closed families and product laws.

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{CheckResult, Coverage, Outcome, Verifier, Witness, SAMPLES};
use crate::analytics::{class_girth, distances_from, distances_within_class, ring_girth, DistanceValue, GirthValue};
use crate::closure::{is_commutatively_closed, Closedness, CommutationGraph};
use crate::error::{Error, Result};
use crate::linalg;
use crate::ring::{is_prime, ElementId, RingDescriptor, RingHandle};

/// `n` when the ring is `M_n` of a field (fields count as `n = 1`).
pub(super) fn matrix_dim(desc: &RingDescriptor) -> Option<u32> {
    match desc {
        RingDescriptor::GaloisField { .. } => Some(1),
        RingDescriptor::ModularInt(n) if is_prime(*n) => Some(1),
        RingDescriptor::MatrixRing { size, base } if matrix_dim(base) == Some(1) => Some(*size),
        _ => None,
    }
}

pub(super) fn ring_checks(v: &Verifier, desc: &RingDescriptor) -> Vec<CheckResult> {
    let mut out = Vec::new();
    if let RingDescriptor::MatrixRing { size, .. } = desc {
        if matrix_dim(desc).is_some() {
            out.push(check_nilpotent_class(v, desc));
            out.push(check_distance_law(v, desc));
            out.push(check_matrix_diameter(v, desc));
            if *size >= 2 {
                out.push(check_girth(v, desc));
            }
        }
    }
    if desc.factors().iter().all(|f| matrix_dim(f).is_some()) {
        out.push(check_semisimple_diameter(v, desc));
    }
    if matches!(desc, RingDescriptor::Product(..)) {
        out.push(check_product_laws(v, desc));
    }
    out.push(check_unit_classes(v, desc));
    out.push(check_closed_families(v, desc));
    out.push(check_level_nilpotency(v, desc));
    out.push(check_depth_bounds(v, desc));
    out
}

fn matrix_params(ring: &RingHandle) -> Result<(usize, u64)> {
    let (n, f) = ring.matrix_shape().ok_or_else(|| Error::Shape(format!("{} is not a matrix ring", ring.spec())))?;
    Ok((n, f.order() as u64))
}

/// Two members of the class realizing its diameter.
pub(super) fn diameter_pair(graph: &CommutationGraph, members: &[u32]) -> (ElementId, ElementId) {
    let mut best = (0, ElementId(members[0]), ElementId(members[0]));
    for &s in members {
        let dist = distances_within_class(graph, ElementId(s));
        let (i, &d) = dist.iter().enumerate().max_by_key(|&(i, d)| (*d, std::cmp::Reverse(i))).unwrap();
        if d > best.0 {
            best = (d, ElementId(s), ElementId(members[i]));
        }
    }
    (best.1, best.2)
}

fn quantified(violations: usize, checked: u64) -> serde_json::Value {
    json!({ "violations": violations, "checked": checked })
}

fn no_violations() -> serde_json::Value {
    json!({ "violations": 0 })
}

pub(super) fn check_nilpotent_class(v: &Verifier, desc: &RingDescriptor) -> CheckResult {
    v.run("nilpotent-class", &desc.to_string(), || {
        let p = v.prepare(desc)?;
        let (ring, graph) = (&p.ring, &p.graph);
        let (n, q) = matrix_params(ring)?;
        let closure = graph.closure(&[ring.zero()])?;
        let oracle: Vec<ElementId> = ring.elements().filter(|&a| ring.pow(a, n as u32) == ring.zero()).collect();
        let formula = q.pow((n * n - n) as u32);
        let passed = closure.members == oracle && oracle.len() as u64 == formula;
        let witness = (closure.members != oracle).then(|| {
            let odd = closure
                .members
                .iter()
                .find(|a| oracle.binary_search(a).is_err())
                .or_else(|| oracle.iter().find(|a| !closure.contains(**a)))
                .copied()
                .unwrap();
            Witness::new(ring, &[odd], "in exactly one of closure({0}) and {A : A^n = 0}")
        });
        Ok(Outcome::new(passed, json!({ "size": oracle.len(), "formula": formula }), json!({ "size": closure.len() }))
            .witness(witness.or_else(|| (!passed).then(|| Witness::note("size differs from q^(n^2-n)"))))
            .coverage(Coverage::Exhaustive(ring.size() as u64)))
    })
}

pub(super) fn check_distance_law(v: &Verifier, desc: &RingDescriptor) -> CheckResult {
    v.run("distance-law", &desc.to_string(), || {
        let p = v.prepare(desc)?;
        let (ring, graph) = (&p.ring, &p.graph);
        let (n, _) = matrix_params(ring)?;
        let field = ring.matrix_shape().unwrap().1;
        let from_zero = distances_from(graph, ring.zero());
        let nilpotents: Vec<ElementId> = ring.elements().filter(|&a| ring.pow(a, n as u32) == ring.zero()).collect();
        let bad: Vec<(ElementId, DistanceValue, usize)> = nilpotents
            .iter()
            .filter_map(|&a| {
                let nu = linalg::nilpotency_index(field, &ring.decode_matrix(a).ok()?)?;
                let d = from_zero[a.index()];
                (d != DistanceValue::Finite(nu as u32 - 1)).then_some((a, d, nu))
            })
            .collect();
        let witness = bad.first().map(|&(a, d, nu)| Witness::new(ring, &[a], format!("d(A,0) = {d}, nu(A) = {nu}")));
        Ok(Outcome::new(bad.is_empty(), no_violations(), quantified(bad.len(), nilpotents.len() as u64))
            .witness(witness)
            .coverage(Coverage::Exhaustive(nilpotents.len() as u64)))
    })
}

pub(super) fn check_matrix_diameter(v: &Verifier, desc: &RingDescriptor) -> CheckResult {
    v.run("matrix-diameter", &desc.to_string(), || {
        let p = v.prepare(desc)?;
        let (ring, graph) = (&p.ring, &p.graph);
        let (n, _) = matrix_params(ring)?;
        let diameters = p.component_diameters();
        let ring_diam = diameters.iter().copied().max().unwrap_or(0);
        let zero_label = graph.component_of(ring.zero());
        let zero_diam = diameters[zero_label as usize];
        let expected = n as u32 - 1;
        let passed = ring_diam == expected && zero_diam == expected;
        let witness = (!passed).then(|| {
            let label = if zero_diam != expected { zero_label as usize } else { argmax(diameters) };
            let (a, b) = diameter_pair(graph, graph.component(label as u32));
            Witness::new(ring, &[a, b], "pair at the largest distance in the offending class")
        });
        Ok(Outcome::new(
            passed,
            json!({ "ring": expected, "class_of_zero": expected }),
            json!({ "ring": ring_diam, "class_of_zero": zero_diam }),
        )
        .witness(witness))
    })
}

fn argmax(values: &[u32]) -> usize {
    values.iter().enumerate().max_by_key(|&(i, d)| (*d, std::cmp::Reverse(i))).map_or(0, |(i, _)| i)
}

pub(super) fn check_girth(v: &Verifier, desc: &RingDescriptor) -> CheckResult {
    v.run("girth", &desc.to_string(), || {
        let p = v.prepare(desc)?;
        let (ring, graph) = (&p.ring, &p.graph);
        let (n, _) = matrix_params(ring)?;
        if n < 2 {
            return Ok(Outcome::skip("girth needs n >= 2"));
        }
        let zero = class_girth(graph, ring.zero());
        let whole = ring_girth(graph);
        let passed = zero == GirthValue::Finite(3) && whole == GirthValue::Finite(3);
        let witness = (!passed).then(|| Witness::new(ring, &[ring.zero()], format!("class of 0 has girth {zero}")));
        Ok(Outcome::new(
            passed,
            json!({ "ring": 3, "class_of_zero": 3 }),
            json!({ "ring": whole, "class_of_zero": zero }),
        )
        .witness(witness))
    })
}

pub(super) fn check_semisimple_diameter(v: &Verifier, desc: &RingDescriptor) -> CheckResult {
    v.run("semisimple-diameter", &desc.to_string(), || {
        let dims: Option<Vec<u32>> = desc.factors().into_iter().map(matrix_dim).collect();
        let Some(dims) = dims else {
            return Ok(Outcome::skip("not a product of matrix rings over fields"));
        };
        let p = v.prepare(desc)?;
        let (ring, graph) = (&p.ring, &p.graph);
        let expected = dims.iter().map(|n| n - 1).max().unwrap_or(0);
        let diameters = p.component_diameters();
        let actual = diameters.iter().copied().max().unwrap_or(0);
        let witness = (actual != expected).then(|| {
            let (a, b) = diameter_pair(graph, graph.component(argmax(diameters) as u32));
            Witness::new(ring, &[a, b], format!("distance {actual}"))
        });
        Ok(Outcome::new(
            actual == expected,
            json!({ "diameter": expected, "dims": dims }),
            json!({ "diameter": actual }),
        )
        .witness(witness))
    })
}

/// Diameter of `A x B` is `max(diam A, diam B)`, and the class of `(a, b)`
/// is the product of the classes of `a` and `b`.
pub(super) fn check_product_laws(v: &Verifier, desc: &RingDescriptor) -> CheckResult {
    v.run("product-laws", &desc.to_string(), || {
        let RingDescriptor::Product(left, right) = desc else {
            return Ok(Outcome::skip("not a product ring"));
        };
        let p = v.prepare(desc)?;
        let pa = v.prepare(left)?;
        let pb = v.prepare(right)?;
        let (ring, graph) = (&p.ring, &p.graph);
        let da = pa.component_diameters().iter().copied().max().unwrap_or(0);
        let db = pb.component_diameters().iter().copied().max().unwrap_or(0);
        let diameters = p.component_diameters();
        let d = diameters.iter().copied().max().unwrap_or(0);

        let factorizes = |x: ElementId| -> bool {
            let (a, b) = ring.split(x).expect("product ring");
            let class = graph.class_of(x);
            let (ca, cb) = (pa.graph.component_of(a), pb.graph.component_of(b));
            class.len() == pa.graph.class_of(a).len() * pb.graph.class_of(b).len()
                && class.iter().all(|&m| {
                    let (ma, mb) = ring.split(ElementId(m)).unwrap();
                    pa.graph.component_of(ma) == ca && pb.graph.component_of(mb) == cb
                })
        };
        let coverage = Coverage::plan(ring.size() as u64);
        let bad: Vec<ElementId> = if coverage.is_exhaustive() {
            // one representative per class covers every element
            graph.components().map(|m| ElementId(m[0])).filter(|&x| !factorizes(x)).collect()
        } else {
            let mut rng = v.rng("product-laws", &desc.to_string());
            (0..SAMPLES).map(|_| ElementId(rng.gen_range(0..ring.size()))).filter(|&x| !factorizes(x)).collect()
        };
        let passed = d == da.max(db) && bad.is_empty();
        let witness = if let Some(&x) = bad.first() {
            Some(Witness::new(ring, &[x], "closure of (a,b) is not closure(a) x closure(b)"))
        } else if !passed {
            let (a, b) = diameter_pair(graph, graph.component(argmax(diameters) as u32));
            Some(Witness::new(ring, &[a, b], format!("distance {d}, factor diameters {da} and {db}")))
        } else {
            None
        };
        Ok(Outcome::new(
            passed,
            json!({ "diameter": da.max(db), "factor_diameters": [da, db], "factorization_violations": 0 }),
            json!({ "diameter": d, "factorization_violations": bad.len() }),
        )
        .witness(witness)
        .coverage(coverage))
    })
}

/// For a unit `a`, its class is `{u a u^-1}` and is a clique.
pub(super) fn check_unit_classes(v: &Verifier, desc: &RingDescriptor) -> CheckResult {
    let spec = desc.to_string();
    v.run("unit-classes", &spec, || {
        let p = v.prepare(desc)?;
        let (ring, graph) = (&p.ring, &p.graph);
        let units: Vec<(ElementId, ElementId)> =
            ring.elements().filter_map(|u| ring.inverse(u).map(|inv| (u, inv))).collect();
        let conj = |a: ElementId, (u, inv): (ElementId, ElementId)| ring.mul(ring.mul(u, a), inv);
        let is_clique = |a: ElementId| {
            let class = graph.class_of(a);
            class.iter().all(|&m| graph.degree(ElementId(m)) == class.len() - 1)
        };
        let coverage = Coverage::plan((units.len() as u64).pow(2));
        let mut bad: Option<Witness> = None;
        let mut checked = 0u64;
        if coverage.is_exhaustive() {
            for &(a, _) in &units {
                let mut orbit: Vec<u32> = units.iter().map(|&u| conj(a, u).0).collect();
                orbit.sort_unstable();
                orbit.dedup();
                checked += units.len() as u64;
                if orbit != graph.class_of(a) {
                    bad = Some(Witness::new(ring, &[a], "closure differs from conjugacy class"));
                } else if !is_clique(a) {
                    bad = Some(Witness::new(ring, &[a], "class is not a clique"));
                }
                if bad.is_some() {
                    break;
                }
            }
        } else {
            let mut rng = v.rng("unit-classes", &spec);
            for _ in 0..SAMPLES {
                checked += 1;
                let (a, _) = units[rng.gen_range(0..units.len())];
                let u = units[rng.gen_range(0..units.len())];
                let b = conj(a, u);
                let class = graph.class_of(a);
                let member = ElementId(class[rng.gen_range(0..class.len())]);
                if class.binary_search(&b.0).is_err() {
                    bad = Some(Witness::new(ring, &[a, u.0], "conjugate outside the class"));
                } else if !units.iter().any(|&w| conj(a, w) == member) {
                    bad = Some(Witness::new(ring, &[a, member], "class member is not a conjugate"));
                } else if !is_clique(a) {
                    bad = Some(Witness::new(ring, &[a], "class is not a clique"));
                }
                if bad.is_some() {
                    break;
                }
            }
        }
        Ok(Outcome::new(
            bad.is_none(),
            no_violations(),
            json!({ "violations": usize::from(bad.is_some()), "units": units.len(), "checked": checked }),
        )
        .witness(bad)
        .coverage(coverage))
    })
}

/// The five families of commutatively closed subsets.
pub(super) fn closed_families(ring: &RingHandle) -> Vec<(&'static str, Vec<ElementId>)> {
    let one = ring.one();
    let all: Vec<ElementId> = ring.elements().collect();
    let collect = |f: &(dyn Fn(ElementId) -> Option<ElementId> + Sync)| -> Vec<ElementId> {
        let mut out: Vec<ElementId> = all.par_iter().filter_map(|&a| f(a)).collect();
        out.sort_unstable();
        out.dedup();
        out
    };
    let left_annihilated = |x: ElementId| all.iter().any(|&b| b != ring.zero() && ring.mul(b, x) == ring.zero());
    vec![
        ("N(R)", collect(&|a| ring.is_nilpotent(a).then_some(a))),
        ("U(R)-1", collect(&|a| ring.is_unit(a).then(|| ring.sub(a, one)))),
        ("Z_l(R)+1", collect(&|a| ring.is_left_zero_divisor(a).then(|| ring.add(a, one)))),
        ("Z_r(R)+1", collect(&|a| ring.is_right_zero_divisor(a).then(|| ring.add(a, one)))),
        ("{u : l(u-1) != 0}", collect(&|u| left_annihilated(ring.sub(u, one)).then_some(u))),
    ]
}

pub(super) fn check_closed_families(v: &Verifier, desc: &RingDescriptor) -> CheckResult {
    v.run("closed-families", &desc.to_string(), || {
        let ring = RingHandle::build(desc)?;
        let n = ring.size() as u64;
        let mut expected = serde_json::Map::new();
        let mut actual = serde_json::Map::new();
        let mut witness = None;
        for (name, set) in closed_families(&ring) {
            let verdict = is_commutatively_closed(&ring, &set);
            if let Closedness::Counterexample { c, d } = verdict {
                witness.get_or_insert_with(|| Witness::new(&ring, &[c, d], format!("cd in {name} but dc is not")));
            }
            let status = if verdict.is_closed() { "closed" } else { "not closed" };
            expected.insert(name.to_string(), json!("closed"));
            actual.insert(name.to_string(), json!({ "size": set.len(), "status": status }));
        }
        Ok(Outcome::new(witness.is_none(), expected, actual).witness(witness).coverage(Coverage::Exhaustive(n * n)))
    })
}

/// Every `a` at level `i` from 0 satisfies `a^(i+1) = 0`.
pub(super) fn check_level_nilpotency(v: &Verifier, desc: &RingDescriptor) -> CheckResult {
    v.run("level-nilpotency", &desc.to_string(), || {
        let p = v.prepare(desc)?;
        let (ring, graph) = (&p.ring, &p.graph);
        let closure = graph.closure(&[ring.zero()])?;
        let bad: Vec<(ElementId, u32)> = closure
            .members
            .iter()
            .zip(&closure.levels)
            .filter(|&(&a, &i)| ring.pow(a, i + 1) != ring.zero())
            .map(|(&a, &i)| (a, i))
            .collect();
        let witness = bad.first().map(|&(a, i)| Witness::new(ring, &[a], format!("level {i} but a^{} != 0", i + 1)));
        Ok(Outcome::new(
            bad.is_empty(),
            no_violations(),
            json!({ "violations": bad.len(), "checked": closure.len(), "max_level": closure.max_level() }),
        )
        .witness(witness)
        .coverage(Coverage::Exhaustive(closure.len() as u64)))
    })
}

/// `depth(a) <= diam C(a) <= 2 depth(a)` for every element, where `depth` is
/// the stabilization depth of `{a}_n`.
pub(super) fn check_depth_bounds(v: &Verifier, desc: &RingDescriptor) -> CheckResult {
    v.run("depth-bounds", &desc.to_string(), || {
        let p = v.prepare(desc)?;
        let (ring, graph) = (&p.ring, &p.graph);
        let ecc = p.eccentricities();
        let diameters = p.component_diameters();
        let bad: Vec<ElementId> = ring
            .elements()
            .filter(|&a| {
                let d = diameters[graph.component_of(a) as usize];
                let e = ecc[a.index()];
                !(e <= d && d <= 2 * e)
            })
            .collect();
        let witness = bad.first().map(|&a| {
            let d = diameters[graph.component_of(a) as usize];
            Witness::new(ring, &[a], format!("depth {} and class diameter {d}", ecc[a.index()]))
        });
        Ok(Outcome::new(bad.is_empty(), no_violations(), quantified(bad.len(), ring.size() as u64))
            .witness(witness)
            .coverage(Coverage::Exhaustive(ring.size() as u64)))
    })
}
