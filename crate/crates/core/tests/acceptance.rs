//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use gtl::duality::{form_from_functional, nondegenerate_products, selfdual_check};
use gtl::exactlin::{Matrix, PrimeField};
use gtl::gallery::{self, build_truncated_ci, TruncatedCISpec};
use gtl::graded::{GradedElement, Side, WindowedGradedAlgebra};
use gtl::report::Verdict;
use gtl::stmod::{default_strategy, duality_functional, ordinary_ext_dims, tate_ring, FDAlgebra, FDModule, TateRing};
use gtl::structure::{check_periodicity, ideal_leq, negative_product_sweep, tor_part, verify_depth2};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn trunc(p: u64, ex: &[usize]) -> FDAlgebra {
    build_truncated_ci(&TruncatedCISpec::new(p, ex)).unwrap()
}

fn hochschild_ring(a: usize, p: u64, window: (i32, i32), depth: Option<usize>) -> TateRing {
    let alg = trunc(p, &[a]);
    let env = alg.enveloping();
    let m = FDModule::bimodule(&alg, &env).unwrap();
    tate_ring(&env, &m, window, depth).unwrap()
}

fn residue_ring(p: u64, ex: &[usize], window: (i32, i32)) -> TateRing {
    let alg = trunc(p, ex);
    let k = FDModule::residue_field(&alg);
    tate_ring(&alg, &k, window, None).unwrap()
}

fn dims_of(ring: &WindowedGradedAlgebra) -> BTreeMap<i32, usize> {
    ring.dims()
}

/// Square of the `idx`-th degree-1 basis class.
fn square_of_degree_one(ring: &WindowedGradedAlgebra, idx: usize) -> GradedElement {
    let y = GradedElement::basis(ring, 1, idx);
    ring.multiply(&y, &y).unwrap()
}

fn criterion_1(rings: &mut Vec<(String, WindowedGradedAlgebra)>) -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (a, p) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
        let t = hochschild_ring(a, p, (-2, 2), None);
        let want = gallery::expected_tate_hh_dim(a, p);
        let got: Vec<usize> = dims_of(&t.ring).values().copied().collect();
        let good = got.iter().all(|&d| d == want);
        ok &= good;
        details.push(format!("(a={a},p={p}) dims {got:?} expected {want}"));
        rings.push((format!("HH k[x]/(x^{a}) p={p}"), t.ring));
    }
    outcome(ok, details.join("; "))
}

fn criterion_2(rings: &mut Vec<(String, WindowedGradedAlgebra)>) -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (ex, p) in [(vec![2, 2], 2u64), (vec![3, 3], 2)] {
        let start = Instant::now();
        let alg = trunc(p, &ex);
        let env = alg.enveloping();
        let m = FDModule::bimodule(&alg, &env).unwrap();
        let t = tate_ring(&env, &m, (-1, 0), Some(1)).unwrap();
        let want = gallery::expected_hh0_dim(&ex, p);
        let got = t.ring.dim(0);
        ok &= got == want;
        details.push(format!("{ex:?} p={p}: dim HH^0 = {got}, expected {want} ({:.1}s)", start.elapsed().as_secs_f64()));
        rings.push((format!("HH {ex:?} p={p} window [-1,0]"), t.ring));
    }
    outcome(ok, details.join("; "))
}

fn criterion_3(rings: &mut Vec<(String, WindowedGradedAlgebra)>) -> Outcome {
    let t = residue_ring(2, &[2, 2], (-4, 4));
    let ring = t.ring;
    let sweep = negative_product_sweep(&ring, -1);
    let neg_neg: Vec<_> = sweep.nonzero.iter().filter(|w| w.0 < 0).collect();
    let mut pairs = 0;
    let mut nonzero = 0;
    for i in -4..0 {
        for j in -4..0 {
            if ring.in_window(i + j) {
                for a in 0..ring.dim(i) {
                    for b in 0..ring.dim(j) {
                        pairs += 1;
                        if ring.basis_product(i, a, j, b).unwrap().iter().any(|&x| x != 0) {
                            nonzero += 1;
                        }
                    }
                }
            }
        }
    }
    let z1 = square_of_degree_one(&ring, 0);
    let z2 = square_of_degree_one(&ring, 1);
    let lambda = duality_functional(&ring, default_strategy(&ring, 0, 1000)).unwrap().functional;
    let rep = verify_depth2(&ring, &z1, &z2, -1, lambda.as_deref());
    let depth2 = match &rep {
        Ok(r) => r.passed(),
        Err(_) => false,
    };
    rings.push(("Klein four, M = k".into(), ring));
    outcome(
        nonzero == 0 && neg_neg.is_empty() && pairs > 0 && depth2,
        format!(
            "{pairs} negative x negative pairs, {nonzero} nonzero; verify_depth2(z1, z2, n=-1): {}",
            match rep {
                Ok(r) => if r.passed() { "PASS".to_string() } else { format!("FAIL\n{}", r.render()) },
                Err(e) => format!("rejected: {e}"),
            }
        ),
    )
}

fn criterion_4(rings: &mut Vec<(String, WindowedGradedAlgebra)>) -> Outcome {
    let t = residue_ring(3, &[3], (-4, 4));
    let ring = t.ring;
    let z = GradedElement::basis(&ring, 2, 0);
    let per = check_periodicity(&ring, &z).unwrap();
    let mut nonzero = 0;
    for i in -4..0 {
        for j in -4..0 {
            if ring.in_window(i + j) && ring.dim(i) > 0 && ring.dim(j) > 0 {
                if ring.basis_product(i, 0, j, 0).unwrap().iter().any(|&x| x != 0) {
                    nonzero += 1;
                }
            }
        }
    }
    let dims: Vec<usize> = ring.dims().values().copied().collect();
    let ok = per.passed() && per.count(Verdict::Pass) > 0 && nonzero > 0;
    rings.push(("k[x]/(x^3) p=3, M = k".into(), ring));
    outcome(ok, format!("dims {dims:?}; periodicity {} ({} degrees PASS); {nonzero} nonzero negative x negative products", if per.passed() { "PASS" } else { "FAIL" }, per.count(Verdict::Pass)))
}

fn criterion_5(rings: &[(String, WindowedGradedAlgebra)]) -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for (name, ring) in rings {
        let (lo, hi) = ring.window();
        let sym = (lo..=hi).filter(|&i| ring.in_window(-1 - i)).all(|i| ring.dim(i) == ring.dim(-1 - i));
        let search = duality_functional(ring, default_strategy(ring, 0, 1000)).unwrap();
        let found = match &search.functional {
            Some(l) => selfdual_check(ring, -1, l).unwrap().passed(),
            None => false,
        };
        ok &= sym && found;
        details.push(format!("{name}: symmetric {sym}, functional {}", if found { "found" } else { "NOT FOUND" }));
    }
    outcome(ok, details.join("; "))
}

fn criterion_6() -> Outcome {
    let f = PrimeField::new(2).unwrap();
    let t = gallery::trivial_extension(f, 2, (-4, 3)).unwrap();
    let (d1, k1) = t.find_label("w1").unwrap();
    let (d2, k2) = t.find_label("w2").unwrap();
    let w1 = GradedElement::basis(&t, d1, k1);
    let w2 = GradedElement::basis(&t, d2, k2);
    let rep = verify_depth2(&t, &w1, &w2, -1, Some(&[1])).unwrap();
    let tor = tor_part(&t, &w1).unwrap();
    let tor_neg = (-4..0).all(|d| tor.is_full(d) && !tor.uncertain.contains(&d)) && (0..=3).all(|d| tor.dim(d) == 0);
    let dual_dims = (0..=3).all(|i| t.dim(-1 - i) == t.dim(i));
    let square_zero = negative_product_sweep(&t, -1).all_zero();
    outcome(
        rep.passed() && tor_neg && dual_dims && square_zero,
        format!("verify_depth2 {}; Tor = A^<0 {tor_neg}; dims(-1-i) = dims(i) {dual_dims}; (A^<0)^2 = 0 {square_zero}", if rep.passed() { "PASS" } else { "FAIL" }),
    )
}

fn criterion_7() -> Outcome {
    let alg = trunc(2, &[2, 2]);
    let k = FDModule::residue_field(&alg);
    let got = ordinary_ext_dims(&alg, &k, 4);
    let want: Vec<usize> = (0..=4).map(|n| gallery::expected_ext_dim_ci(2, n)).collect();
    outcome(got == want && want == vec![1, 2, 3, 4, 5], format!("computed {got:?}, expected {want:?}"))
}

fn gallery_objects() -> Vec<(String, WindowedGradedAlgebra)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        let f = PrimeField::new(p).unwrap();
        out.push((format!("laurent p={p}"), gallery::laurent(f, (-3, 3)).unwrap()));
        out.push((format!("dual numbers p={p}"), gallery::dual_numbers_graded(f).unwrap()));
        for c in 1..=3 {
            out.push((format!("trivial extension c={c} p={p}"), gallery::trivial_extension(f, c, (-4, 3)).unwrap()));
        }
    }
    out
}

fn bimodule_closed(ring: &WindowedGradedAlgebra, r: &GradedElement) -> bool {
    let tor = tor_part(ring, r).unwrap();
    for d in ring.degrees() {
        for v in tor.basis(d) {
            for i in ring.degrees() {
                if !ring.in_window(i + d) {
                    continue;
                }
                for a in 0..ring.dim(i) {
                    let mut e = vec![0u32; ring.dim(i)];
                    e[a] = 1;
                    let l = ring.mul_hom(i, &e, d, &v).unwrap();
                    let rr = ring.mul_hom(d, &v, i, &e).unwrap();
                    // only certified target degrees can be compared
                    if !tor.uncertain.contains(&(i + d)) && (!tor.contains(i + d, &l) || !tor.contains(i + d, &rr)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn criterion_8(computed: &[(String, WindowedGradedAlgebra)]) -> Outcome {
    let start = Instant::now();
    let mut objects = gallery_objects();
    objects.extend(computed.iter().cloned());
    let mut failures = Vec::new();
    for (name, ring) in &objects {
        if !ring.validate().unwrap().passed() {
            failures.push(format!("{name}: validate"));
        }
        let (_, hi) = ring.window();
        for n in ring.degrees() {
            if ring.dim(n) == 0 {
                continue;
            }
            let lambda: Vec<u32> = (0..ring.dim(n)).map(|k| (k as u32 + 1) % ring.field().p()).collect();
            let form = form_from_functional(ring, n, &lambda).unwrap();
            match form.check_associativity(ring, 500, n as u64) {
                Ok(_) => {}
                Err(e) => failures.push(format!("{name}: {e}")),
            }
        }
        for n in 0..=hi {
            let ideal = ideal_leq(ring, n).unwrap();
            if !ring.degrees().all(|d| ideal.is_full(d)) {
                failures.push(format!("{name}: ideal_leq({n}) != A"));
            }
        }
        for d in 1..=hi {
            for idx in 0..ring.dim(d) {
                let r = GradedElement::basis(ring, d, idx);
                if ring.is_central(&r).map(|c| c.passed()).unwrap_or(false) && !bimodule_closed(ring, &r) {
                    failures.push(format!("{name}: Tor of e[{d}][{idx}] not closed"));
                }
            }
        }
        let nd = nondegenerate_products(ring, -1);
        if let Some(l) = duality_functional(ring, default_strategy(ring, 1, 200)).ok().and_then(|s| s.functional) {
            let sd = selfdual_check(ring, -1, &l).unwrap();
            for e in &nd.entries {
                if sd.verdict_at(e.i) == Some(Verdict::Pass) && (e.left != Verdict::Pass || e.right != Verdict::Pass) {
                    failures.push(format!("{name}: selfdual without non-degenerate products at {}", e.i));
                }
            }
        }
        let one = GradedElement::one(ring);
        let full = gtl::graded::GradedSubspace::full(ring);
        let left = ring.act(&one, &full, Side::Left).unwrap().subspace;
        if left != full {
            failures.push(format!("{name}: unit does not act as identity"));
        }
    }
    let mut runner = TestRunner::new(Config { cases: 256, failure_persistence: None, ..Config::default() });
    let fuzz = runner.run(&(2usize..12, 2usize..12, any::<u64>(), prop::sample::select(vec![2u64, 3, 5, 7, 65537])), |(r, c, seed, p)| {
        let f = PrimeField::new(p).unwrap();
        let mut state = seed;
        let data: Vec<u32> = (0..r * c)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                // low rank now and then
                if (state >> 60) < 6 { 0 } else { ((state >> 33) % p) as u32 }
            })
            .collect();
        let m = Matrix::from_data(f, r, c, data).unwrap();
        let ker = m.kernel_basis();
        prop_assert_eq!(m.rank() + ker.len(), c);
        for v in &ker {
            prop_assert!(m.mul_vec(v).iter().all(|&x| x == 0));
        }
        Ok(())
    });
    if let Err(e) = fuzz {
        failures.push(format!("rank-nullity fuzz: {e}"));
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = failures.is_empty() && secs <= 60.0;
    outcome(ok, format!("{} objects, {:.1}s; {}", objects.len(), secs, if failures.is_empty() { "no failures".to_string() } else { failures.join("; ") }))
}

fn main() -> ExitCode {
    let mut rings = Vec::new();
    let mut results = Vec::new();
    let mut run = |n: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let status = if o.ok { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {n}: {name} ({:.1}s) -- {}", start.elapsed().as_secs_f64(), o.detail);
        results.push(o.ok);
    };
    run(1, "Tate-Hochschild dimensions of k[x]/(x^a)", &mut || criterion_1(&mut rings));
    run(2, "HH^0 dimension for two variables", &mut || criterion_2(&mut rings));
    run(3, "negative products vanish for the Klein four group", &mut || criterion_3(&mut rings));
    run(4, "periodic boundary case k[x]/(x^3)", &mut || criterion_4(&mut rings));
    run(5, "(-1)-duality shadow on every computed ring", &mut || criterion_5(&rings));
    run(6, "trivial extension model instance", &mut criterion_6);
    run(7, "ordinary Ext dimensions of the Klein four group", &mut criterion_7);
    run(8, "property suites on gallery objects", &mut || criterion_8(&rings));
    let passed = results.iter().filter(|&&x| x).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
