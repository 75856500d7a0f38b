//! The twelve acceptance criteria, one line each. Runs without the libtest
//! harness so the lines always print; exits nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::Zero;
use spanbiset::functor::shared;
use spanbiset::group::{named_group, FiniteGroup, CATALOG};
use spanbiset::groupoid::Groupoid;
use spanbiset::gset::{cohomological_kernel_check, fixed_point_functor, yoshida_rank_check};
use spanbiset::linear::{biset_hom_basis, deflative_kernel_check, SpanWindow};
use spanbiset::pool::{Config, DEFAULT_POOL};
use spanbiset::realization::realize_span;
use spanbiset::report::Report;
use spanbiset::suites::run_suite;
use spanbiset::Rational;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs a suite, failing on any failed check and on a time budget.
fn suite(name: &str, config: &Config, budget: Option<Duration>) -> Result<(Report, Duration), String> {
    let start = Instant::now();
    let report = run_suite(name, config).map_err(|e| format!("error: {e}"))?;
    let took = start.elapsed();
    if let Some(f) = report.failures().next() {
        return Err(format!("{} of {} checks fail, first: {} {}", report.checks.len() - report.count_passed(), report.checks.len(), f.name, f.detail));
    }
    if let Some(b) = budget {
        ensure(took <= b, || format!("took {:.1}s, budget {}s", took.as_secs_f64(), b.as_secs()))?;
    }
    Ok((report, took))
}

fn count(report: &Report, prefix: &str) -> usize {
    report.checks.iter().filter(|c| c.name.starts_with(prefix)).count()
}

fn zigzag() -> Outcome {
    let c = Config::default();
    ensure(c.pool == DEFAULT_POOL, || "default pool changed".into())?;
    let (r, t) = suite("zigzag", &c, Some(Duration::from_secs(60)))?;
    Ok(format!("{} functors, {:.1}s", r.checks.len(), t.as_secs_f64()))
}

fn beck_chevalley() -> Outcome {
    let (r, t) = suite("beck-chevalley", &Config::default(), Some(Duration::from_secs(300)))?;
    Ok(format!("{} cospans, {:.1}s", r.checks.len(), t.as_secs_f64()))
}

fn pseudofunctor() -> Outcome {
    let c = Config::default();
    let (r, _) = suite("pseudofunctor", &c, None)?;
    let (pairs, assoc, unit) = (count(&r, "compositor"), count(&r, "associativity"), count(&r, "unitors"));
    ensure(pairs >= 200, || format!("only {pairs} span pairs"))?;
    ensure(assoc > 0 && unit > 0, || "no coherence instances".into())?;
    Ok(format!("{pairs} pairs, {assoc} associativity and {unit} unit instances"))
}

fn roundtrip() -> Outcome {
    let (r, _) = suite("roundtrip", &Config::default(), None)?;
    ensure(r.checks.len() >= 100, || format!("only {} bisets", r.checks.len()))?;
    Ok(format!("{} bisets", r.checks.len()))
}

fn mates() -> Outcome {
    let (r, _) = suite("mates", &Config::default(), None)?;
    let cells = r.checks.iter().filter(|c| c.name.contains(" => ")).count();
    ensure(cells > 0, || "no 2-cells".into())?;
    Ok(format!("{cells} 2-cells, {} checks", r.checks.len()))
}

fn coend_calculus() -> Outcome {
    let (r, _) = suite("coend-calculus", &Config::default(), None)?;
    let (fubini, coyoneda) = (count(&r, "Fubini"), count(&r, "co-Yoneda"));
    ensure(fubini >= 200 && coyoneda >= 200, || format!("{fubini} Fubini, {coyoneda} co-Yoneda instances"))?;
    Ok(format!("{fubini} Fubini, {coyoneda} co-Yoneda instances"))
}

/// Subgroups of a group given by its table, by testing every subset for
/// closure, grouped into conjugacy classes.
fn brute_subgroup_classes(table: &[Vec<usize>]) -> usize {
    let n = table.len();
    let e = (0..n).find(|&a| (0..n).all(|b| table[a][b] == b)).unwrap();
    let inv = |a: usize| (0..n).find(|&b| table[a][b] == e).unwrap();
    let mut subgroups = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if set.contains(&e) && set.iter().all(|&a| set.iter().all(|&b| set.contains(&table[a][b]))) {
            subgroups.insert(set);
        }
    }
    let mut classes: Vec<BTreeSet<Vec<usize>>> = Vec::new();
    for s in &subgroups {
        if classes.iter().any(|c| c.contains(s)) {
            continue;
        }
        let class = (0..n)
            .map(|g| {
                let mut c: Vec<usize> = s.iter().map(|&h| table[table[g][h]][inv(g)]).collect();
                c.sort_unstable();
                c
            })
            .collect();
        classes.push(class);
    }
    classes.len()
}

/// Table of `C2^k` as bit vectors under xor.
fn elementary_abelian_table(k: u32) -> Vec<Vec<usize>> {
    let n = 1usize << k;
    (0..n).map(|a| (0..n).map(|b| a ^ b).collect()).collect()
}

fn hom_ranks() -> Outcome {
    let point = shared(Groupoid::point());
    let bc2 = shared(Groupoid::from_group(&FiniteGroup::cyclic(2)));
    let cases = [
        ("1->1", &point, &point, brute_subgroup_classes(&elementary_abelian_table(0)), 1),
        ("1->C2", &point, &bc2, brute_subgroup_classes(&elementary_abelian_table(1)), 2),
        ("C2->C2", &bc2, &bc2, brute_subgroup_classes(&elementary_abelian_table(2)), 5),
    ];
    let mut found = Vec::new();
    for (name, h, g, oracle, expected) in cases {
        let rank = biset_hom_basis(h, g).map_err(|e| e.to_string())?.elements.len();
        ensure(oracle == expected, || format!("{name}: oracle counts {oracle} classes"))?;
        ensure(rank == oracle, || format!("{name}: rank {rank}, oracle {oracle}"))?;
        found.push(format!("{name} {rank}"));
    }
    Ok(found.join(", "))
}

fn window(names: &[&str], bound: usize) -> Result<SpanWindow, String> {
    let objects = names
        .iter()
        .map(|&n| {
            let g = if n == "1" { Groupoid::point() } else { Groupoid::from_group(&named_group(n).unwrap()) };
            (n.to_string(), shared(g))
        })
        .collect();
    SpanWindow::new(objects, bound).map_err(|e| e.to_string())
}

fn deflative_kernel() -> Outcome {
    let small = window(&["1", "C2"], 2)?;
    let report = deflative_kernel_check::<Rational>(&small, false).map_err(|e| e.to_string())?;
    let hom = report.homs.iter().find(|h| h.source == 0 && h.target == 0).ok_or("no hom 1->1")?;
    ensure(hom.kernel.len() == 1, || format!("kernel at 1->1 has rank {}", hom.kernel.len()))?;
    let basis = small.span_basis(0, 0);
    let apex_order = |i: usize| basis.elements[i].left.source().num_morphisms();
    ensure(basis.elements.len() == 2, || format!("{} spans 1->1 at bound 2", basis.elements.len()))?;
    let (trivial, bc2) = if apex_order(0) == 1 { (0, 1) } else { (1, 0) };
    ensure(apex_order(bc2) == 2, || "no BC2 apex".into())?;
    // Both spans realize to a one-element set, so F cannot tell them apart.
    for i in [trivial, bc2] {
        let n = realize_span(&basis.elements[i]).map_err(|e| e.to_string())?.biset().len();
        ensure(n == 1, || format!("span {i} realizes to {n} elements"))?;
    }
    let v = &hom.kernel[0];
    ensure(!v[bc2].is_zero() && v[bc2] == -v[trivial].clone(), || format!("kernel vector {v:?} is not a multiple of [BC2] - [1]"))?;
    ensure(report.contained(), || "small window: kernel not in ideal".into())?;

    let start = Instant::now();
    let large = window(&["1", "C2", "C4", "V4"], 8)?;
    let report = deflative_kernel_check::<Rational>(&large, false).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    if let Some(h) = report.homs.iter().find(|h| !(h.contained && h.ideal_killed)) {
        return Err(format!("{}: kernel {} ideal {}", large.hom_name(h.source, h.target), h.kernel.len(), h.ideal_rank));
    }
    ensure(took <= Duration::from_secs(1800), || format!("large window took {:.0}s", took.as_secs_f64()))?;
    Ok(format!(
        "kernel at 1->1 spanned by [BC2]-[1]; {} homs of the large window inside the ideal, {:.1}s",
        report.homs.len(),
        took.as_secs_f64()
    ))
}

/// `|H\G/K|` as orbits of `H × K` on `G`, by flood fill over the table.
fn brute_double_cosets(table: &[Vec<usize>], h: &[usize], k: &[usize]) -> usize {
    let n = table.len();
    let mut seen = vec![false; n];
    let mut orbits = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        orbits += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(g) = stack.pop() {
            for &a in h {
                for &b in k {
                    let y = table[table[a][g]][b];
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
    }
    orbits
}

fn yoshida() -> Outcome {
    let names: Vec<&str> = CATALOG.iter().copied().filter(|n| named_group(n).unwrap().order() <= 12).collect();
    ensure(names.contains(&"S3") && names.contains(&"D4"), || "S3 or D4 missing".into())?;
    let mut pairs = 0;
    for name in &names {
        let g = Arc::new(named_group(name).unwrap());
        let table = g.table();
        let subs = g.subgroups();
        for h in &subs {
            for k in &subs {
                let y = yoshida_rank_check::<Rational>(&g, h, k).map_err(|e| format!("{name}: {e}"))?;
                let oracle = brute_double_cosets(&table, h, k);
                ensure(y.rank == oracle && y.hom_dim == oracle && y.double_cosets == oracle, || {
                    format!("{name} |H|={} |K|={}: rank {}, hom dim {}, double cosets {oracle}", h.len(), k.len(), y.rank, y.hom_dim)
                })?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} subgroup pairs over {} groups", names.len()))
}

fn cohomological_kernel() -> Outcome {
    let mut parts = Vec::new();
    for name in ["C2", "C4", "V4", "S3"] {
        let g = Arc::new(named_group(name).unwrap());
        let r = cohomological_kernel_check::<Rational>(&g).map_err(|e| e.to_string())?;
        ensure(!r.relations.is_empty(), || format!("{name}: no relations"))?;
        if let Some(&(h, l, _)) = r.relations.iter().find(|rel| !rel.2) {
            return Err(format!("{name}: relation |H|={h} |L|={l} not killed"));
        }
        if let Some(h) = r.homs.iter().find(|h| !h.equal) {
            return Err(format!("{name} hom {}->{}: kernel {} ideal {}", h.source, h.target, h.kernel_rank, h.ideal_rank));
        }
        parts.push(format!("{name} {} relations", r.relations.len()));
    }
    Ok(parts.join(", "))
}

fn fixed_point() -> Outcome {
    let mut inductions = 0;
    for name in ["C2", "C4", "V4", "S3"] {
        let g = Arc::new(named_group(name).unwrap());
        let fp = fixed_point_functor::<Rational>(&g).map_err(|e| e.to_string())?;
        for v in &fp.values {
            ensure(v.fixed_rank == 1 && v.hom_rank == 1, || format!("{name}: FP(|H|={}) has rank {}", v.subgroup.len(), v.fixed_rank))?;
        }
        for m in fp.maps.iter().filter(|m| m.kind == "ind") {
            let index = Rational::from_integer((m.to.len() / m.from.len()).into());
            ensure(m.coefficient.as_ref() == Some(&index), || {
                format!("{name}: ind |{}|->|{}| acts by {:?}", m.from.len(), m.to.len(), m.coefficient)
            })?;
            inductions += 1;
        }
        ensure(fp.passed(), || format!("{name}: restriction or conjugation fails"))?;
    }
    ensure(inductions > 0, || "no inductions".into())?;
    Ok(format!("{inductions} inductions act by the index"))
}

fn semiadditive_tensor() -> Outcome {
    let c = Config::default();
    let (s, _) = suite("semiadditive", &c, None)?;
    let (t, _) = suite("tensor", &c, None)?;
    ensure(t.checks.iter().any(|c| c.name == "unit"), || "unit not checked".into())?;
    Ok(format!("{} biproduct checks, {} tensor checks", s.checks.len(), t.checks.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("adjunction zig-zags", zigzag),
        ("Beck-Chevalley mates", beck_chevalley),
        ("pseudofunctoriality", pseudofunctor),
        ("span/biset round trip", roundtrip),
        ("mate compatibility", mates),
        ("coend calculus", coend_calculus),
        ("biset hom ranks", hom_ranks),
        ("deflative kernel", deflative_kernel),
        ("Yoshida ranks", yoshida),
        ("cohomological kernel", cohomological_kernel),
        ("fixed-point functor", fixed_point),
        ("semiadditivity and tensor", semiadditive_tensor),
    ];
    let mut results = BTreeMap::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => println!("criterion {:>2} {name}: pass ({detail}) [{took:.1}s]", i + 1),
            Err(detail) => println!("criterion {:>2} {name}: FAIL ({detail}) [{took:.1}s]", i + 1),
        }
        results.insert(i + 1, outcome.is_ok());
    }
    let passed = results.values().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
