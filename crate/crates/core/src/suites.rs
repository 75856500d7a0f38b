//! The verification suites behind `spanbiset verify`.
//!
//! Each suite enumerates or samples its cases from a [`Config`], checks
//! them in parallel and assembles the report in case order, so a fixed
//! seed gives byte-identical output.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::biset::{bisets_isomorphic, Biset};
use crate::coend::{check_coyoneda, check_fubini, linear_coend, set_coend, LinearCoendProblem};
use crate::composite::Composite;
use crate::error::{Error, Result};
use crate::functor::{all_natural_isos, shared};
use crate::groupoid::{Groupoid, GroupoidRef};
use crate::gset::{cohomological_kernel_check, fixed_point_functor, yoshida_rank_check};
use crate::linear::{deflative_kernel_check, verify_semiadditive, verify_tensor, verify_tensor_unit, SpanWindow};
use crate::pool::{parse_group, parse_window_object, Config, Pool};
use crate::realization::{
    beck_chevalley, check_associativity, check_identity_counit, check_mates, check_structure_mate, check_unitors, check_zigzag,
    compositor, realize_span, span_from_biset,
};
use crate::report::Report;
use crate::scalar::ScalarMode;
use crate::span::Span;
use crate::Rational;

pub const SUITES: &[&str] = &[
    "zigzag",
    "beck-chevalley",
    "pseudofunctor",
    "roundtrip",
    "mates",
    "coend-calculus",
    "semiadditive",
    "tensor",
    "deflative-kernel",
    "yoshida",
    "cohomological-kernel",
    "fixed-point",
];

/// Runs a suite by name over the configured pool. Unknown names and
/// invalid configurations are errors; failed checks are not.
pub fn run_suite(name: &str, config: &Config) -> Result<Report> {
    run_suite_with(name, config, &BTreeMap::new())
}

/// As [`run_suite`], resolving extra groupoid names from `named`.
pub fn run_suite_with(name: &str, config: &Config, named: &BTreeMap<String, GroupoidRef>) -> Result<Report> {
    config.validate()?;
    let pool = || Pool::new(&config.pool, named);
    match name {
        "zigzag" => Ok(zigzag(&pool()?)),
        "beck-chevalley" => Ok(beck_chevalley_suite(&pool()?)),
        "pseudofunctor" => Ok(pseudofunctor(&pool()?, config)),
        "roundtrip" => Ok(roundtrip(&pool()?, config)),
        "mates" => Ok(mates(&pool()?)),
        "coend-calculus" => Ok(coend_calculus(&pool()?, config)),
        "semiadditive" => semiadditive(&pool()?),
        "tensor" => Ok(tensor(&pool()?, config)),
        "deflative-kernel" => deflative_kernel(config, named),
        "yoshida" => yoshida(config),
        "cohomological-kernel" => cohomological_kernel(config),
        "fixed-point" => fixed_point(config),
        other => Err(Error::UnknownName(format!("suite '{other}' (expected one of {})", SUITES.join(", ")))),
    }
}

/// Turns a fallible check into a pass/fail line, keeping the error text.
fn outcome(r: Result<()>) -> (bool, String) {
    match r {
        Ok(()) => (true, String::new()),
        Err(e) => (false, e.to_string()),
    }
}

fn push_all(report: &mut Report, results: Vec<(String, (bool, String))>) {
    for (name, (ok, detail)) in results {
        report.push(name, ok, detail);
    }
}

pub fn zigzag(pool: &Pool) -> Report {
    let functors = pool.functors();
    let mut r = Report::new("zigzag");
    let results = functors.par_iter().map(|(name, u)| (name.clone(), outcome(check_zigzag(u)))).collect();
    push_all(&mut r, results);
    r.note(format!("{} functors between {} pool groupoids", functors.len(), pool.len()));
    r
}

pub fn beck_chevalley_suite(pool: &Pool) -> Report {
    let by_target = pool.functors_into();
    let mut cases = Vec::new();
    for into in &by_target {
        for (na, a) in into {
            for (nb, b) in into {
                cases.push((format!("{na} / {nb}"), a, b));
            }
        }
    }
    let mut r = Report::new("beck-chevalley");
    let results = cases
        .par_iter()
        .map(|(name, a, b)| {
            let res = beck_chevalley(a, b).and_then(|bc| {
                if !bc.is_bijective() {
                    return Err(Error::Mismatch("mate is not bijective".into()));
                }
                if !bc.agrees_with_formula() {
                    return Err(Error::Mismatch("pasted mate differs from its formula".into()));
                }
                bc.mate.map.check(bc.mate.domain.biset(), bc.mate.codomain.biset())
            });
            (name.clone(), outcome(res))
        })
        .collect();
    push_all(&mut r, results);
    r.note(format!("{} cospans", cases.len()));
    r
}

fn random_span(pool: &Pool, from: usize, to: usize, rng: &mut impl Rng) -> Span {
    loop {
        if let Some(s) = Span::random(&pool.groupoids[from], &pool.groupoids[to], &pool.groupoids, rng) {
            return s;
        }
    }
}

/// Seeded composable pairs `(s1: B → C, s2: A → B)` with their labels.
fn span_pairs(pool: &Pool, config: &Config, stream: &str, count: usize) -> Vec<(String, Span, Span)> {
    let mut rng = config.rng(stream);
    let n = pool.len();
    (0..count)
        .map(|i| {
            let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            let s2 = random_span(pool, a, b, &mut rng);
            let s1 = random_span(pool, b, c, &mut rng);
            (format!("#{i} {}->{}->{}", pool.names[a], pool.names[b], pool.names[c]), s1, s2)
        })
        .collect()
}

fn check_compositor(s1: &Span, s2: &Span) -> Result<()> {
    let (r1, r2) = (realize_span(s1)?, realize_span(s2)?);
    let phi = compositor(&r1, &r2)?;
    if phi.cell.map != phi.formula {
        return Err(Error::Mismatch("pasted compositor differs from its formula".into()));
    }
    if !phi.cell.is_bijective() {
        return Err(Error::Mismatch("compositor is not bijective".into()));
    }
    phi.cell.map.check(phi.cell.domain.biset(), phi.cell.codomain.biset())?;
    let flat = Composite::new(vec![r1.shriek.biset.clone(), r1.star.biset.clone(), r2.shriek.biset.clone(), r2.star.biset.clone()])?;
    if !bisets_isomorphic(phi.realization.biset(), flat.biset())? {
        return Err(Error::Mismatch("R(s1 s2) and R(s1) R(s2) are not isomorphic".into()));
    }
    Ok(())
}

pub fn pseudofunctor(pool: &Pool, config: &Config) -> Report {
    let pairs = span_pairs(pool, config, "pseudofunctor", config.span_pairs);
    let mut r = Report::new("pseudofunctor");
    let results = pairs
        .par_iter()
        .map(|(name, s1, s2)| (format!("compositor {name}"), outcome(check_compositor(s1, s2))))
        .collect();
    push_all(&mut r, results);

    let mut rng = config.rng("pseudofunctor-triples");
    let n = pool.len();
    let triples: Vec<(String, Span, Span, Span)> = (0..config.span_triples)
        .map(|i| {
            let ids: Vec<usize> = (0..4).map(|_| rng.gen_range(0..n)).collect();
            let s3 = random_span(pool, ids[0], ids[1], &mut rng);
            let s2 = random_span(pool, ids[1], ids[2], &mut rng);
            let s1 = random_span(pool, ids[2], ids[3], &mut rng);
            let label: Vec<&str> = ids.iter().map(|&k| pool.names[k].as_str()).collect();
            (format!("#{i} {}", label.join("->")), s1, s2, s3)
        })
        .collect();
    let results = triples
        .par_iter()
        .map(|(name, s1, s2, s3)| {
            let res = (|| check_associativity(&realize_span(s1)?, &realize_span(s2)?, &realize_span(s3)?))();
            (format!("associativity {name}"), outcome(res))
        })
        .collect();
    push_all(&mut r, results);
    let results = triples
        .par_iter()
        .map(|(name, s1, _, _)| (format!("unitors {name}"), outcome(realize_span(s1).and_then(|rs| check_unitors(&rs)))))
        .collect();
    push_all(&mut r, results);
    r.note(format!("{} pairs, {} triples, seed {}", pairs.len(), triples.len(), config.seed));
    r
}

pub fn roundtrip(pool: &Pool, config: &Config) -> Report {
    let mut rng = config.rng("roundtrip");
    let n = pool.len();
    let cases: Vec<(String, Biset)> = (0..config.bisets)
        .map(|i| {
            let (h, g) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let u = Biset::random(&pool.groupoids[h], &pool.groupoids[g], &mut rng, config.max_orbits);
            (format!("#{i} {}->{} ({} elements)", pool.names[h], pool.names[g], u.len()), u)
        })
        .collect();
    let mut r = Report::new("roundtrip");
    let results = cases
        .par_iter()
        .map(|(name, u)| {
            let res = (|| {
                let es = span_from_biset(&Arc::new(u.clone()))?;
                es.evaluation.check(es.realization.biset(), u)?;
                if !es.is_bijective(u) {
                    return Err(Error::Mismatch("evaluation is not bijective".into()));
                }
                Ok(())
            })();
            (name.clone(), outcome(res))
        })
        .collect();
    push_all(&mut r, results);
    r.note(format!("{} bisets, seed {}", cases.len(), config.seed));
    r
}

pub fn mates(pool: &Pool) -> Report {
    let mut r = Report::new("mates");
    let functors = pool.functors();
    let mut pairs = Vec::new();
    for (nu, u) in &functors {
        for (nv, v) in &functors {
            if Arc::ptr_eq(u.source(), v.source()) && Arc::ptr_eq(u.target(), v.target()) {
                pairs.push((nu, nv, u, v));
            }
        }
    }
    let results: Vec<Vec<(String, (bool, String))>> = pairs
        .par_iter()
        .map(|(nu, nv, u, v)| match all_natural_isos(u, v) {
            Ok(alphas) => alphas
                .iter()
                .enumerate()
                .map(|(k, a)| (format!("{nu} => {nv} α{k}"), outcome(check_mates(a))))
                .collect(),
            Err(e) => vec![(format!("{nu} => {nv}"), (false, e.to_string()))],
        })
        .collect();
    let cells: usize = results.iter().map(Vec::len).sum();
    push_all(&mut r, results.into_iter().flatten().collect());
    let results = pool
        .groupoids
        .par_iter()
        .zip(&pool.names)
        .map(|(g, name)| (format!("identity counit {name}"), outcome(check_identity_counit(g))))
        .collect();
    push_all(&mut r, results);

    let mut composable = Vec::new();
    for (nv, v) in &functors {
        for (nu, u) in &functors {
            if Arc::ptr_eq(v.target(), u.source()) {
                composable.push((format!("{nu} after {nv}"), u, v));
            }
        }
    }
    let results = composable
        .par_iter()
        .map(|(name, u, v)| (format!("structure mate {name}"), outcome(check_structure_mate(u, v))))
        .collect();
    push_all(&mut r, results);
    r.note(format!("{cells} 2-cells, {} composable functor pairs", composable.len()));
    r
}

/// Largest biset whose linear coend is cross-checked against the set coend.
pub const LINEAR_COEND_MAX: usize = 96;

pub fn coend_calculus(pool: &Pool, config: &Config) -> Report {
    let mut rng = config.rng("coend-calculus");
    let n = pool.len();
    let fubini: Vec<(String, GroupoidRef, GroupoidRef, Biset)> = (0..config.coend_instances)
        .map(|i| {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let (c1, c2) = (pool.groupoids[a].clone(), pool.groupoids[b].clone());
            let prod = shared(Groupoid::product(&c1, &c2));
            let u = Biset::random(&prod, &prod, &mut rng, config.max_orbits);
            (format!("Fubini #{i} {}x{}", pool.names[a], pool.names[b]), c1, c2, u)
        })
        .collect();
    let coyoneda: Vec<(String, Biset, usize)> = (0..config.coend_instances)
        .map(|i| {
            let c = rng.gen_range(0..n);
            let m = Biset::random(&shared(Groupoid::point()), &pool.groupoids[c], &mut rng, config.max_orbits);
            let x = rng.gen_range(0..pool.groupoids[c].num_objects());
            (format!("co-Yoneda #{i} {} at {x}", pool.names[c]), m, x)
        })
        .collect();
    let mut r = Report::new("coend-calculus");
    let results = fubini
        .par_iter()
        .map(|(name, c1, c2, u)| {
            let res = check_fubini(u, c1, c2).and_then(|f| {
                if f.direct == f.first_then_second && f.direct == f.second_then_first {
                    Ok(())
                } else {
                    Err(Error::Mismatch(format!("{f:?}")))
                }
            });
            (name.clone(), outcome(res))
        })
        .collect();
    push_all(&mut r, results);
    let results = coyoneda
        .par_iter()
        .map(|(name, m, x)| {
            let res = check_coyoneda(m, *x).and_then(|k| {
                if k == m.with_target(*x).len() {
                    Ok(())
                } else {
                    Err(Error::Mismatch(format!("coend has {k} classes, M(x) has {}", m.with_target(*x).len())))
                }
            });
            (name.clone(), outcome(res))
        })
        .collect();
    push_all(&mut r, results);
    // The linear coend of a linearized biset is free on the set coend. Dense
    // rational elimination limits this to small bisets.
    let small: Vec<_> = fubini.iter().filter(|(_, _, _, u)| u.len() <= LINEAR_COEND_MAX).collect();
    let results = small
        .par_iter()
        .map(|(name, _, _, u)| {
            let res = (|| {
                let p = LinearCoendProblem::<Rational>::linearize(u)?;
                let lin = linear_coend(&p)?;
                let classes = set_coend(u)?.num_classes();
                if lin.rank != classes {
                    return Err(Error::Mismatch(format!("linear coend has rank {}, set coend {classes} classes", lin.rank)));
                }
                Ok(())
            })();
            (format!("linearized {}", name.trim_start_matches("Fubini ")), outcome(res))
        })
        .collect();
    push_all(&mut r, results);
    r.note(format!("{} instances of each identity, seed {}", config.coend_instances, config.seed));
    r.note(format!(
        "{} of {} Fubini bisets have at most {LINEAR_COEND_MAX} elements and were also linearized",
        small.len(),
        fubini.len()
    ));
    r
}

pub fn semiadditive(pool: &Pool) -> Result<Report> {
    let mut cases = Vec::new();
    for (i, a) in pool.groupoids.iter().enumerate() {
        for (j, b) in pool.groupoids.iter().enumerate() {
            cases.push((format!("{}+{}", pool.names[i], pool.names[j]), a, b));
        }
    }
    let reports = cases.par_iter().map(|(_, a, b)| verify_semiadditive(a, b)).collect::<Result<Vec<_>>>()?;
    let mut r = Report::new("semiadditive");
    for ((name, _, _), sub) in cases.iter().zip(reports) {
        for c in sub.checks {
            r.push(format!("{name} {}", c.name), c.passed, c.detail);
        }
    }
    r.note(format!("{} sums of pool groupoids", cases.len()));
    Ok(r)
}

pub fn tensor(pool: &Pool, config: &Config) -> Report {
    let mut rng = config.rng("tensor");
    let n = pool.len();
    let cases: Vec<(String, Span, Span)> = (0..config.tensor_pairs)
        .map(|i| {
            let ids: Vec<usize> = (0..4).map(|_| rng.gen_range(0..n)).collect();
            let s = random_span(pool, ids[0], ids[1], &mut rng);
            let t = random_span(pool, ids[2], ids[3], &mut rng);
            let l = |k: usize| pool.names[ids[k]].as_str();
            (format!("#{i} ({}->{}) x ({}->{})", l(0), l(1), l(2), l(3)), s, t)
        })
        .collect();
    let mut r = Report::new("tensor");
    let results = cases
        .par_iter()
        .map(|(name, s, t)| {
            let res = verify_tensor(s, t).and_then(|ok| ok.then_some(()).ok_or_else(|| Error::Mismatch("R(s x t) differs from R(s) x R(t)".into())));
            (name.clone(), outcome(res))
        })
        .collect();
    push_all(&mut r, results);
    let unit = verify_tensor_unit().and_then(|ok| ok.then_some(()).ok_or_else(|| Error::Mismatch("R(Id_1) is not the unit".into())));
    let (ok, detail) = outcome(unit);
    r.push("unit", ok, detail);
    r.note(format!("{} pairs, seed {}", cases.len(), config.seed));
    r
}

pub fn deflative_kernel(config: &Config, named: &BTreeMap<String, GroupoidRef>) -> Result<Report> {
    let objects = config
        .window
        .iter()
        .map(|n| Ok((n.clone(), parse_window_object(n, named)?)))
        .collect::<Result<Vec<_>>>()?;
    let window = SpanWindow::new(objects, config.apex_bound)?;
    let result = deflative_kernel_check::<Rational>(&window, config.scalars == ScalarMode::Integer)?;
    let mut r = result.to_report(&window);
    r.note(format!("window {} with apex bound {}", config.window.join(","), config.apex_bound));
    Ok(r)
}

pub fn yoshida(config: &Config) -> Result<Report> {
    let groups = config.groups.iter().map(|n| Ok((n.clone(), Arc::new(parse_group(n)?)))).collect::<Result<Vec<_>>>()?;
    let mut r = Report::new("yoshida");
    let mut total = 0;
    for (name, g) in &groups {
        let subs = g.subgroups();
        let pairs: Vec<(usize, usize)> = (0..subs.len()).flat_map(|i| (0..subs.len()).map(move |j| (i, j))).collect();
        total += pairs.len();
        let results = pairs
            .par_iter()
            .map(|&(i, j)| yoshida_rank_check::<Rational>(g, &subs[i], &subs[j]).map(|y| (i, j, y)))
            .collect::<Result<Vec<_>>>()?;
        let bad: Vec<String> = results
            .iter()
            .filter(|(_, _, y)| !y.holds())
            .map(|(i, j, y)| format!("H#{i} K#{j}: rank {}, double cosets {}, hom dim {}", y.rank, y.double_cosets, y.hom_dim))
            .collect();
        let detail = if bad.is_empty() {
            format!("{} subgroups, ranks match on all {} pairs", subs.len(), pairs.len())
        } else {
            bad.join("; ")
        };
        r.push(format!("{name} (order {})", g.order()), bad.is_empty(), detail);
    }
    r.note(format!("{total} subgroup pairs"));
    Ok(r)
}

pub fn cohomological_kernel(config: &Config) -> Result<Report> {
    let mut r = Report::new("cohomological-kernel");
    for name in &config.mackey_groups {
        let g = Arc::new(parse_group(name)?);
        let sub = cohomological_kernel_check::<Rational>(&g)?.to_report(name);
        for c in sub.checks {
            r.push(format!("{name} {}", c.name), c.passed, c.detail);
        }
    }
    Ok(r)
}

pub fn fixed_point(config: &Config) -> Result<Report> {
    let mut r = Report::new("fixed-point");
    let integer = config.scalars == ScalarMode::Integer;
    for name in &config.mackey_groups {
        let g = Arc::new(parse_group(name)?);
        let sub = fixed_point_functor::<Rational>(&g)?.to_report(name, integer);
        for c in sub.checks {
            r.push(format!("{name} {}", c.name), c.passed, c.detail);
        }
        r.notes.extend(sub.notes.into_iter().map(|n| format!("{name}: {n}")));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Config {
        Config {
            pool: vec!["1".into(), "BC2".into(), "1+1".into()],
            span_pairs: 6,
            span_triples: 2,
            bisets: 6,
            coend_instances: 6,
            tensor_pairs: 4,
            groups: vec!["C2".into(), "S3".into()],
            mackey_groups: vec!["C2".into()],
            ..Config::default()
        }
    }

    #[test]
    fn every_suite_runs_on_a_small_pool() {
        let c = small();
        for s in SUITES {
            let r = run_suite(s, &c).unwrap();
            assert!(r.passed(), "{r}");
            assert!(!r.checks.is_empty(), "{s}");
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let c = small();
        let a = run_suite("pseudofunctor", &c).unwrap().to_string();
        let b = run_suite("pseudofunctor", &c).unwrap().to_string();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(matches!(run_suite("nope", &small()), Err(Error::UnknownName(_))));
        let bad = Config {
            pool: vec!["BQ9".into()],
            ..small()
        };
        assert!(run_suite("zigzag", &bad).is_err());
    }
}
