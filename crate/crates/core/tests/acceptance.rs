//! One line per acceptance criterion. Exits nonzero if any fails.

mod common;

use std::collections::BTreeMap;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::oracles::{path_product_filter, Brute, Set};
use common::{has_term, heisenberg_shape, shape};
use filtra::algrep::{jacobson_radical, op_embed};
use filtra::bimap::{invariant_ring, kronecker_bimap, satisfies, Bimap, RingKind};
use filtra::filter::{generate, Filter, FilterJson};
use filtra::group::{make_ut, Subgroup, UnipotentGroup, DEFAULT_CAP};
use filtra::liering::GradedLieRing;
use filtra::linalg::Subspace;
use filtra::monoid::MonoidIndex;
use filtra::refine::{contains_chain, factor_dims, gamma_filter, refine_stable, refine_step, RefinementConfig};
use filtra::ring::{comm_ring_radical, radical_chain, CircSpec, FinCommRing};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn filtra(args: &[&str]) -> (Value, i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_filtra")).args(args).output().expect("run filtra");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (json, out.status.code().unwrap_or(-1), out.stdout)
}

fn leading_bimap(r: &FinCommRing) -> Bimap {
    let f = gamma_filter(&common::heisenberg(r)).unwrap();
    let one = MonoidIndex::new(vec![1]);
    GradedLieRing::sections(&f).unwrap().bimap_at(&one, &one).unwrap()
}

fn rings() -> Vec<FinCommRing> {
    vec![
        FinCommRing::poly_quotient(2, &[0, 1]).unwrap(),
        FinCommRing::poly_quotient(2, &[1, 1, 1]).unwrap(),
        FinCommRing::poly_quotient(2, &[0, 0, 1]).unwrap(),
        FinCommRing::poly_quotient(3, &[0, 0, 1]).unwrap(),
    ]
}

fn ideal_power(r: &FinCommRing, i: usize) -> Subspace {
    let j = comm_ring_radical(r);
    (0..i).fold(Subspace::full(r.p(), r.dim()), |acc, _| r.ideal_product(&acc, &j))
}

fn four_by_four() -> Outcome {
    for p in [2, 3] {
        let ps = p.to_string();
        let (v, code, _) = filtra(&["refine", "--ut", "4", &ps, "--method", "adjoint"]);
        ensure(code == 0, || format!("exit {code}"))?;
        let exps: Vec<u64> = v["order_exps"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
        ensure(exps == [6, 5, 3, 1, 0], || format!("p={p}: exponents {exps:?}"))?;
        let fj: FilterJson = serde_json::from_value(v["filter"].clone()).unwrap();
        let f = Filter::from_json(&fj, DEFAULT_CAP).map_err(|e| e.to_string())?;
        ensure(factor_dims(&f) == [1, 2, 2, 1], || format!("p={p}: dims {:?}", factor_dims(&f)))?;
        let sp = f.group().space();
        let chain = f.flatten();
        for free in [
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)][..],
            &[(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)][..],
            &[(0, 2), (0, 3), (1, 3)][..],
            &[(0, 3)][..],
        ] {
            ensure(has_term(&chain, &shape(sp, free)), || format!("p={p}: shape {free:?} missing"))?;
        }
    }
    Ok("UT(4,2), UT(4,3): 6 > 5 > 3 > 1 > 0 with the expected matrix shapes".into())
}

fn heisenberg_lengths() -> Outcome {
    let mut seen = Vec::new();
    for (p, c) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
        let r = common::truncated(p, c);
        let g = common::heisenberg(&r);
        let s = refine_stable(&gamma_filter(&g).unwrap(), &RefinementConfig::default()).map_err(|e| e.to_string())?;
        let len = s.filter.length();
        ensure(len == 2 * c + 2, || format!("p={p} c={c}: length {len}"))?;
        ensure(s.filter.flatten().len() == 2 * c + 3, || format!("p={p} c={c}: extra terms"))?;
        let chain = s.filter.flatten();
        let full = Subspace::full(p, r.dim());
        let zero = Subspace::zero(p, r.dim());
        for i in 0..=c {
            let ji = ideal_power(&r, i);
            ensure(has_term(&chain, &heisenberg_shape(&r, g.space(), [&ji, &ji, &full])), || {
                format!("p={p} c={c}: α_1^{i} missing")
            })?;
            ensure(has_term(&chain, &heisenberg_shape(&r, g.space(), [&zero, &zero, &ji])), || {
                format!("p={p} c={c}: α_2^{i} missing")
            })?;
        }
        seen.push(format!("(p={p},c={c})→{len}"));
    }
    Ok(seen.join(" "))
}

fn kronecker() -> Outcome {
    for m in 1..=3 {
        for p in [2, 3, 5] {
            let adj = invariant_ring(&kronecker_bimap(p, m), RingKind::Adjoint);
            ensure(adj.dim() == 2 * m + 2, || format!("m={m} p={p}: dim {}", adj.dim()))?;
            let j = jacobson_radical(&op_embed(&adj).unwrap(), 0).map_err(|e| e.to_string())?;
            ensure(j.radical_dims() == [2 * m], || format!("m={m} p={p}: radical {:?}", j.radical_dims()))?;
        }
    }
    Ok("dim Adj = 2m+2, dim J = 2m, J² = 0 for m ≤ 3, p ∈ {2,3,5}".into())
}

fn adjoint_matrix_ring() -> Outcome {
    let mut seen = Vec::new();
    for r in rings() {
        let adj = invariant_ring(&leading_bimap(&r), RingKind::Adjoint);
        let j = jacobson_radical(&op_embed(&adj).unwrap(), 0).map_err(|e| e.to_string())?;
        let rad = j.radical_dims().first().copied().unwrap_or(0);
        let jr = comm_ring_radical(&r).dim();
        ensure(adj.dim() == 4 * r.dim() && rad == 4 * jr, || {
            format!("{}: adj {} rad {rad}", r.name(), adj.dim())
        })?;
        seen.push(format!("{}:{}/{}", r.name(), adj.dim(), rad));
    }
    Ok(seen.join(" "))
}

fn centroid_ring() -> Outcome {
    let mut seen = Vec::new();
    for r in rings() {
        let cent = invariant_ring(&leading_bimap(&r), RingKind::Centroid);
        ensure(cent.dim() == r.dim(), || format!("{}: centroid {}", r.name(), cent.dim()))?;
        seen.push(format!("{}:{}", r.name(), cent.dim()));
    }
    Ok(seen.join(" "))
}

fn unitriangular_stable() -> Outcome {
    let mut seen = Vec::new();
    for d in [4, 5, 6] {
        let g = Arc::new(make_ut(d, 2, DEFAULT_CAP).unwrap());
        let s = refine_stable(&gamma_filter(&g).unwrap(), &RefinementConfig::default()).map_err(|e| e.to_string())?;
        let dims = factor_dims(&s.filter);
        ensure(s.stable, || format!("d={d}: round limit reached"))?;
        ensure(dims.iter().all(|&x| x <= 2), || format!("d={d}: factor dims {dims:?}"))?;
        ensure(s.filter.length() > d - 1, || format!("d={d}: length {}", s.filter.length()))?;
        seen.push(format!("d={d}: length {} dims {:?}", s.filter.length(), dims));
    }
    Ok(seen.join("; "))
}

fn to_set(h: &Subgroup) -> Set {
    h.elements().map(|g| g.entries().iter().map(|&x| x as u32).collect()).collect()
}

fn check_filter(f: &Filter, what: &str, checks: &mut usize) -> Result<(), String> {
    f.verify_axioms().map_err(|v| format!("{what}: {v:?}"))?;
    let l = GradedLieRing::build(f).map_err(|e| format!("{what}: {e}"))?;
    l.check_jacobi().map_err(|v| format!("{what}: {v:?}"))?;
    *checks += 2;
    if let Some(s) = l.components().keys().next() {
        let m = l.bimap_at(s, s).unwrap();
        for kind in [RingKind::Adjoint, RingKind::Centroid, RingKind::Derivation] {
            let ring = invariant_ring(&m, kind);
            ensure(ring.basis().iter().all(|e| satisfies(&m, kind, e)) && ring.is_closed(), || {
                format!("{what}: {kind} identities")
            })?;
            let j = jacobson_radical(&op_embed(&ring).unwrap(), 0).map_err(|e| format!("{what}: {kind} {e}"))?;
            ensure(j.verify(), || format!("{what}: {kind} radical"))?;
            *checks += 2;
        }
    }
    Ok(())
}

fn axiom_suites() -> Outcome {
    let mut checks = 0;
    let mut groups: Vec<Arc<UnipotentGroup>> = Vec::new();
    for (d, p) in [(3, 2), (4, 2), (5, 2), (3, 3), (4, 3), (3, 5), (4, 5)] {
        groups.push(Arc::new(make_ut(d, p, DEFAULT_CAP).unwrap()));
    }
    for r in rings() {
        groups.push(common::heisenberg(&r));
    }
    for g in &groups {
        for (name, s) in [
            ("gamma", filtra::group::gamma_series(g, g.whole())),
            ("eta", filtra::group::eta_series(g, g.whole())),
            ("kappa", filtra::group::kappa_series(g, g.whole())),
        ] {
            let f = Filter::from_series(g.clone(), s.unwrap()).unwrap();
            check_filter(&f, &format!("{} {name}", g.name()), &mut checks)?;
        }
        for kind in [RingKind::Adjoint, RingKind::Centroid, RingKind::Derivation] {
            let cfg = RefinementConfig::new(kind);
            let mut cur = gamma_filter(g).unwrap();
            for round in 1..=cfg.max_rounds {
                let step = refine_step(&cur, &cfg).map_err(|e| e.to_string())?;
                if !step.info.proper {
                    break;
                }
                let what = format!("{} {kind} round {round}", g.name());
                ensure(contains_chain(&step.filter, &cur), || format!("{what}: lost a term"))?;
                check_filter(&step.filter, &what, &mut checks)?;
                cur = step.filter;
            }
        }
    }
    // generation against literal path products
    for (d, p) in [(3, 2), (4, 2), (3, 3)] {
        let g = Arc::new(make_ut(d, p, DEFAULT_CAP).unwrap());
        let mut gens = BTreeMap::new();
        gens.insert(MonoidIndex::new(vec![1]), g.whole().clone());
        let bound = MonoidIndex::new(vec![d as u32]);
        let f = generate(&g, &gens, &bound).map_err(|e| e.to_string())?;
        let b = Brute { p, d };
        let oracle = path_product_filter(b, &to_set(g.whole()), &[(vec![1], to_set(g.whole()))].into(), &[d as u32]);
        for (w, expected) in &oracle {
            ensure(to_set(f.at(&MonoidIndex::new(w.clone())).unwrap()) == *expected, || {
                format!("UT({d},{p}): generation differs at {w:?}")
            })?;
            checks += 1;
        }
    }
    Ok(format!("{checks} checks, 0 violations"))
}

fn fingerprint_separation() -> Outcome {
    for method in ["centroid", "adjoint"] {
        let args = ["fingerprint", "--heisenberg", "2,1,1,1", "--against-heisenberg", "2,0,0,1", "--method", method];
        let (v, code, first) = filtra(&args);
        let (_, _, second) = filtra(&args);
        ensure(code == 3, || format!("{method}: exit {code}"))?;
        ensure(v["a"]["order_exp"] == 6 && v["b"]["order_exp"] == 6, || "orders differ".into())?;
        ensure(first == second, || format!("{method}: output not deterministic"))?;
    }
    Ok("H(F4) vs H(F2[x]/(x^2)): exit 3 under centroid and adjoint".into())
}

fn random_circ(rng: &mut ChaCha8Rng, v: usize, w: usize) -> CircSpec {
    loop {
        let mut entries = Vec::new();
        for i in 0..v {
            for j in i..v {
                for k in 0..w {
                    if rng.gen_bool(0.5) {
                        entries.push([i as i64, j as i64, k as i64, 1]);
                        if i != j {
                            entries.push([j as i64, i as i64, k as i64, 1]);
                        }
                    }
                }
            }
        }
        if !entries.is_empty() {
            return CircSpec { p: 2, dims: [v, v, w], entries };
        }
    }
}

fn random_local_rings() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let shapes = [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1)];
    let mut count = 0;
    let mut lengths = BTreeMap::new();
    for round in 0..4 {
        for &(v, w) in &shapes {
            let spec = random_circ(&mut rng, v, w);
            let r = FinCommRing::r_circ(&spec).map_err(|e| e.to_string())?;
            let chain = radical_chain(&r);
            let dims: Vec<usize> = chain.iter().map(|s| s.dim()).collect();
            ensure(dims.len() >= 3 && dims[0] > dims[1] && dims[1] > 0, || {
                format!("round {round} V={v} W={w}: radical chain {dims:?}")
            })?;
            let g = common::heisenberg(&r);
            let s =
                refine_stable(&gamma_filter(&g).unwrap(), &RefinementConfig::default()).map_err(|e| e.to_string())?;
            let len = s.filter.length();
            ensure(len >= 6, || format!("round {round} V={v} W={w}: length {len}"))?;
            *lengths.entry(len).or_insert(0) += 1;
            count += 1;
        }
    }
    ensure(count >= 20, || format!("only {count} instances"))?;
    Ok(format!("{count} random R(∘) at p = 2; refined lengths {lengths:?}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("4×4 unitriangular refinement", Duration::from_secs(10), four_by_four),
        ("Heisenberg lengths 2c+2", Duration::from_secs(60), heisenberg_lengths),
        ("Kronecker adjoint radical", Duration::from_secs(5), kronecker),
        ("Adj(H(R)) ≅ M2(R)", Duration::from_secs(60), adjoint_matrix_ring),
        ("centroid recovers R", Duration::from_secs(60), centroid_ring),
        ("stable refinement of UT(d,2)", Duration::from_secs(600), unitriangular_stable),
        ("axiom suites", Duration::from_secs(600), axiom_suites),
        ("fingerprint separation", Duration::from_secs(60), fingerprint_separation),
        ("random local rings refine properly", Duration::from_secs(300), random_local_rings),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed > *limit {
                Err(format!("took {elapsed:.1?}, limit {limit:?}"))
            } else {
                Ok(detail)
            }
        });
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name} ({elapsed:.2?}) — {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({elapsed:.2?}) — {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
