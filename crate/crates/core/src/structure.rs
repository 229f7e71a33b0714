//! Regular elements, the torsion part `Tor_r A`, the ideal `(A^{<=n})`, and the
//! structure theorems for rings with non-degenerate products.
//!
//! Every verifier is window-certified. Truncated subspace computations mark
//! their lower-bound degrees as uncertain, and verifiers report those degrees
//! as UNDERDETERMINED instead of PASS.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::duality::{nondegenerate_products, selfdual_check, GradedForm};
use crate::error::{Error, Result};
use crate::exactlin::{is_zero, EchelonSpace, Matrix};
use crate::graded::{unit_vector, GradedElement, GradedSubspace, Side, WindowedGradedAlgebra};
use crate::report::{CertifiedReport, Verdict};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularityReport {
    pub degree: i32,
    pub central: CertifiedReport,
    pub regular_on_nonneg: CertifiedReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<(i32, Vec<u32>)>,
}

impl RegularityReport {
    pub fn passed(&self) -> bool {
        self.central.passed() && self.regular_on_nonneg.passed()
    }
}

fn positive_degree(alg: &WindowedGradedAlgebra, r: &GradedElement) -> Result<(i32, Vec<u32>)> {
    let (k, v) = r.homogeneous(alg)?;
    if k <= 0 {
        return Err(Error::Precondition(format!("element has degree {k}; a positive degree is required")));
    }
    Ok((k, v))
}

/// Left multiplication by `r` from degree `d`, when it stays in the window.
fn left_mult(alg: &WindowedGradedAlgebra, k: i32, rv: &[u32], d: i32) -> Option<Matrix> {
    alg.mult_matrix(Side::Left, k, rv, d)
}

/// Centrality of `r` and injectivity of `r * -` on `A^i` for `0 <= i <= d_max - |r|`.
pub fn regularity(alg: &WindowedGradedAlgebra, r: &GradedElement) -> Result<RegularityReport> {
    let (k, rv) = positive_degree(alg, r)?;
    let central = alg.is_central(r)?;
    let mut rep = CertifiedReport::new("regular_on_nonneg");
    let mut first_failure = None;
    for i in 0..=alg.window().1 {
        if alg.dim(i) == 0 {
            rep.push(i, Verdict::Pass, None);
            continue;
        }
        let Some(m) = left_mult(alg, k, &rv, i) else {
            rep.push(i, Verdict::OutOfWindow, None);
            continue;
        };
        match m.kernel_basis().into_iter().next() {
            Some(v) => {
                rep.push(i, Verdict::Fail, Some(format!("r * {v:?} = 0")));
                first_failure.get_or_insert((i, v));
            }
            None => rep.push(i, Verdict::Pass, None),
        }
    }
    Ok(RegularityReport { degree: k, central, regular_on_nonneg: rep, first_failure })
}

/// `Tor_r A` degreewise, as the ascending union of the kernels of `r^k * -`
/// over every power whose target stays in the window.
///
/// A degree is settled when the union fills the whole space, or when the
/// kernels of the last two in-window powers agree. Otherwise it is marked
/// uncertain and holds a lower bound.
pub fn tor_part(alg: &WindowedGradedAlgebra, r: &GradedElement) -> Result<GradedSubspace> {
    let (k, rv) = positive_degree(alg, r)?;
    let mut tor = GradedSubspace::zero(alg);
    let d_max = alg.window().1;
    for d in alg.degrees() {
        let dim = alg.dim(d);
        if dim == 0 {
            continue;
        }
        let mut power = Matrix::identity(alg.field(), dim);
        let mut kernel: Vec<Vec<u32>> = Vec::new();
        let mut steps = 0;
        let mut stable = false;
        while d + steps * k + k <= d_max && kernel.len() < dim {
            power = left_mult(alg, k, &rv, d + steps * k).expect("in window").mul(&power);
            steps += 1;
            let next = power.kernel_basis();
            stable = steps >= 2 && next.len() == kernel.len();
            kernel = next;
        }
        let settled = kernel.len() == dim || stable;
        for v in &kernel {
            tor.insert(d, v);
        }
        if !settled {
            tor.uncertain.insert(d);
        }
    }
    Ok(tor)
}

/// Degrees `t` that could receive a product `u g v` with `|g| <= n` only
/// through an out-of-window intermediate.
fn ideal_blind_degrees(alg: &WindowedGradedAlgebra, n: i32) -> BTreeSet<i32> {
    let nonzero: Vec<i32> = alg.degrees().filter(|&d| alg.dim(d) > 0).collect();
    let mut out = BTreeSet::new();
    for &e in nonzero.iter().filter(|&&e| e <= n) {
        for &s in &nonzero {
            for &q in &nonzero {
                let t = s + e + q;
                if alg.in_window(t) && !alg.in_window(s + e) && !alg.in_window(e + q) {
                    out.insert(t);
                }
            }
        }
    }
    out
}

/// Two-sided ideal generated by `A^{<=n}`, closed under in-window products.
pub fn ideal_leq(alg: &WindowedGradedAlgebra, n: i32) -> Result<GradedSubspace> {
    if !alg.in_window(n) {
        return Err(Error::OutOfWindow(n, 0));
    }
    let mut ideal = GradedSubspace::full_where(alg, |d| d <= n);
    loop {
        let mut grew = false;
        for d in alg.degrees() {
            let basis = ideal.basis(d);
            if basis.is_empty() {
                continue;
            }
            for i in alg.degrees() {
                if !alg.in_window(d + i) || ideal.is_full(d + i) {
                    continue;
                }
                for a in 0..alg.dim(i) {
                    let e = unit_vector(alg.dim(i), a);
                    for v in &basis {
                        let l = alg.mul_hom(i, &e, d, v).expect("in window");
                        let r = alg.mul_hom(d, v, i, &e).expect("in window");
                        grew |= ideal.insert(d + i, &l);
                        grew |= ideal.insert(d + i, &r);
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    for t in ideal_blind_degrees(alg, n) {
        if !ideal.is_full(t) {
            ideal.uncertain.insert(t);
        }
    }
    Ok(ideal)
}

fn fmt_vec(v: &[u32]) -> String {
    format!("{v:?}")
}

fn require(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(what()))
    }
}

/// Products between two graded subspaces vanish in both orders, per degree pair.
fn annihilation_clause(alg: &WindowedGradedAlgebra, check: &str, x: &GradedSubspace, y: &GradedSubspace) -> CertifiedReport {
    let mut rep = CertifiedReport::new(check);
    for i in alg.degrees() {
        let xs = x.basis(i);
        for j in alg.degrees() {
            let ys = y.basis(j);
            if xs.is_empty() || ys.is_empty() {
                continue;
            }
            if !alg.in_window(i + j) {
                rep.push_pair(i, j, Verdict::OutOfWindow, None);
                continue;
            }
            let mut witness = None;
            'outer: for a in &xs {
                for b in &ys {
                    let ab = alg.mul_hom(i, a, j, b).unwrap();
                    let ba = alg.mul_hom(j, b, i, a).unwrap();
                    if !is_zero(&ab) || !is_zero(&ba) {
                        witness = Some(format!("{} . {} != 0", fmt_vec(a), fmt_vec(b)));
                        break 'outer;
                    }
                }
            }
            let verdict = if witness.is_some() {
                Verdict::Fail
            } else if x.uncertain.contains(&i) || y.uncertain.contains(&j) {
                Verdict::Underdetermined
            } else {
                Verdict::Pass
            };
            rep.push_pair(i, j, verdict, witness);
        }
    }
    rep
}

/// `I * Tor_r A = 0 = Tor_r A * I`, and `r` regular on all of `A` when `n >= 0`.
pub fn verify_depth1(alg: &WindowedGradedAlgebra, r: &GradedElement, n: i32) -> Result<CertifiedReport> {
    let reg = regularity(alg, r)?;
    require(reg.passed(), || "r is not central and regular on the non-negative part".into())?;
    let nd = nondegenerate_products(alg, n);
    require(nd.passed(), || format!("products are degenerate in degree {n}"))?;

    let mut report = CertifiedReport::new("verify_depth1").with_n(n);
    let ideal = ideal_leq(alg, n)?;
    let tor = tor_part(alg, r)?;
    report.add_clause(annihilation_clause(alg, "ideal_annihilates_torsion", &ideal, &tor));

    let (k, rv) = r.homogeneous(alg)?;
    let mut clause2 = CertifiedReport::new("regular_on_all_degrees");
    if n < 0 {
        clause2.note("n < 0; the first alternative holds");
    } else {
        for i in alg.degrees() {
            match left_mult(alg, k, &rv, i) {
                _ if alg.dim(i) == 0 => clause2.push(i, Verdict::Pass, None),
                None => clause2.push(i, Verdict::OutOfWindow, None),
                Some(m) => match m.kernel_basis().first() {
                    Some(v) => clause2.push(i, Verdict::Fail, Some(format!("r * {v:?} = 0"))),
                    None => clause2.push(i, Verdict::Pass, None),
                },
            }
        }
    }
    report.add_clause(clause2);
    note_centrality(&mut report, &reg.central, "r");
    Ok(report)
}

fn note_centrality(report: &mut CertifiedReport, central: &CertifiedReport, name: &str) {
    let unchecked: Vec<i32> = central.per_degree.iter().filter(|d| d.verdict == Verdict::OutOfWindow).map(|d| d.i).collect();
    if !unchecked.is_empty() {
        report.note(format!("centrality of {name} not certified in degrees {unchecked:?}"));
    }
}

/// Orthogonal complement of `sub` (inside `A^i`) in `A^{n-i}` under the form.
fn orthogonal(alg: &WindowedGradedAlgebra, form: &GradedForm, i: i32, sub: &[Vec<u32>]) -> EchelonSpace {
    let dj = alg.dim(form.n - i);
    let g = form.gram(alg, i).expect("checkable");
    let mut space = EchelonSpace::new(alg.field(), dj);
    if sub.is_empty() {
        for b in 0..dj {
            space.insert(&unit_vector(dj, b));
        }
        return space;
    }
    let rows = Matrix::from_columns(alg.field(), alg.dim(i), sub).transpose().mul(&g);
    for v in rows.kernel_basis() {
        space.insert(&v);
    }
    space
}

/// Dimension and orthogonality form of `D I = (A / Tor_r A)[n]`.
pub fn check_orthogonality(alg: &WindowedGradedAlgebra, r: &GradedElement, n: i32, functional: &[u32]) -> Result<CertifiedReport> {
    let sd = selfdual_check(alg, n, functional)?;
    require(sd.passed(), || format!("the functional does not make A {n}-shifted selfdual"))?;
    let form = GradedForm { n, functional: functional.to_vec() };
    let ideal = ideal_leq(alg, n)?;
    let tor = tor_part(alg, r)?;
    let mut report = CertifiedReport::new("check_orthogonality").with_n(n);
    for i in alg.degrees() {
        let j = n - i;
        if !alg.in_window(j) {
            report.push(i, Verdict::OutOfWindow, None);
            continue;
        }
        let ib = ideal.basis(i);
        let perp = orthogonal(alg, &form, i, &ib);
        let tb = tor.basis(j);
        let quotient_dim = alg.dim(j) - tb.len();
        let mut witness = None;
        if let Some(t) = tb.iter().find(|t| !perp.contains(t)) {
            witness = Some(format!("{} in Tor^{j} pairs nontrivially with I^{i}", fmt_vec(t)));
        }
        let uncertain = ideal.uncertain.contains(&i) || tor.uncertain.contains(&j);
        let exact = ib.len() == quotient_dim && perp.dim() == tb.len();
        let verdict = match (witness.is_some(), uncertain, exact) {
            (true, _, _) => Verdict::Fail,
            (false, true, _) => Verdict::Underdetermined,
            (false, false, true) => Verdict::Pass,
            (false, false, false) => {
                witness = Some(format!(
                    "dim I^{i} = {}, dim (A/Tor)^{j} = {quotient_dim}, dim (I^{i})^perp = {}",
                    ib.len(),
                    perp.dim()
                ));
                Verdict::Fail
            }
        };
        report.push(i, verdict, witness);
    }
    Ok(report)
}

/// Bijectivity of `r * -: A^i -> A^{i+|r|}` in every checkable degree.
pub fn check_periodicity(alg: &WindowedGradedAlgebra, r: &GradedElement) -> Result<CertifiedReport> {
    let (k, rv) = positive_degree(alg, r)?;
    let mut report = CertifiedReport::new("check_periodicity");
    for i in alg.degrees() {
        let Some(m) = left_mult(alg, k, &rv, i) else {
            report.push(i, Verdict::OutOfWindow, None);
            continue;
        };
        let (a, b) = (alg.dim(i), alg.dim(i + k));
        if a != b {
            report.push(i, Verdict::Fail, Some(format!("dim A^{i} = {a} but dim A^{} = {b}", i + k)));
        } else if m.rank() != a {
            report.push(i, Verdict::Fail, Some(format!("rank {} < {a}", m.rank())));
        } else {
            report.push(i, Verdict::Pass, None);
        }
    }
    Ok(report)
}

/// `r * A^{i-|r|}` inside `A^i` (zero when `i - |r| < 0`).
fn multiples(alg: &WindowedGradedAlgebra, k: i32, rv: &[u32], i: i32) -> EchelonSpace {
    let mut s = EchelonSpace::new(alg.field(), alg.dim(i));
    if i - k >= 0 {
        if let Some(m) = left_mult(alg, k, rv, i - k) {
            for c in m.columns() {
                s.insert(&c);
            }
        }
    }
    s
}

/// `(r, rt)` is a regular sequence on `A^{>=0}` of central elements.
pub fn is_regular_sequence2(alg: &WindowedGradedAlgebra, r: &GradedElement, rt: &GradedElement) -> Result<CertifiedReport> {
    let (k, rv) = positive_degree(alg, r)?;
    let (kt, rtv) = positive_degree(alg, rt)?;
    let reg = regularity(alg, r)?;
    let central_t = alg.is_central(rt)?;
    require(reg.central.passed(), || "r is not central".into())?;
    require(central_t.passed(), || "r~ is not central".into())?;

    let mut report = CertifiedReport::new("is_regular_sequence2");
    report.add_clause(reg.regular_on_nonneg.clone());
    let mut quotient = CertifiedReport::new("regular_on_quotient");
    for i in 0..=alg.window().1 {
        let target = i + kt;
        if alg.dim(i) == 0 {
            quotient.push(i, Verdict::Pass, None);
            continue;
        }
        if !alg.in_window(target) {
            quotient.push(i, Verdict::OutOfWindow, None);
            continue;
        }
        let here = multiples(alg, k, &rv, i);
        let there = multiples(alg, k, &rv, target);
        let m = left_mult(alg, kt, &rtv, i).expect("in window");
        // a with rt * a in r A: kernel of [m | -basis(there)], projected to a
        let tb = there.basis();
        let neg = Matrix::from_columns(alg.field(), alg.dim(target), &tb).scale(alg.field().p() - 1);
        let stacked = if tb.is_empty() { m.clone() } else { m.hstack(&neg) };
        let witness = stacked
            .kernel_basis()
            .into_iter()
            .map(|v| v[..alg.dim(i)].to_vec())
            .find(|a| !here.contains(a));
        match witness {
            Some(a) => quotient.push(i, Verdict::Fail, Some(format!("r~ * {} lies in r A but {} does not", fmt_vec(&a), fmt_vec(&a)))),
            None => quotient.push(i, Verdict::Pass, None),
        }
    }
    report.add_clause(quotient);
    note_centrality(&mut report, &reg.central, "r");
    note_centrality(&mut report, &central_t, "r~");
    Ok(report)
}

/// Exhaustive check that `x y = 0 = y x` for basis elements with `|x| <= n`,
/// `|y| < 0` and in-window product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSweep {
    pub n: i32,
    pub pairs_checked: usize,
    /// `(|x|, x index, |y|, y index)` of nonzero products.
    pub nonzero: Vec<(i32, usize, i32, usize)>,
}

impl ProductSweep {
    pub fn all_zero(&self) -> bool {
        self.nonzero.is_empty()
    }
}

pub fn negative_product_sweep(alg: &WindowedGradedAlgebra, n: i32) -> ProductSweep {
    let mut sweep = ProductSweep { n, pairs_checked: 0, nonzero: Vec::new() };
    for i in alg.degrees().filter(|&i| i <= n) {
        for j in alg.degrees().filter(|&j| j < 0) {
            if !alg.in_window(i + j) {
                continue;
            }
            for a in 0..alg.dim(i) {
                for b in 0..alg.dim(j) {
                    sweep.pairs_checked += 1;
                    let xy = alg.basis_product(i, a, j, b).unwrap();
                    let yx = alg.basis_product(j, b, i, a).unwrap();
                    if !is_zero(xy) || !is_zero(yx) {
                        sweep.nonzero.push((i, a, j, b));
                    }
                }
            }
        }
    }
    sweep
}

/// `A^{<=n}` (or `A^{<0}` when `bound = -1`) is closed under multiplication by `A`.
fn ideal_clause(alg: &WindowedGradedAlgebra, check: &str, bound: i32) -> CertifiedReport {
    let mut rep = CertifiedReport::new(check);
    for j in alg.degrees().filter(|&j| j <= bound) {
        let mut witness = None;
        'outer: for i in alg.degrees() {
            if !alg.in_window(i + j) || i + j <= bound {
                continue;
            }
            for (x, y) in [(i, j), (j, i)] {
                if let Some(t) = alg.table(x, y) {
                    if !t.is_zero() {
                        witness = Some(format!("A^{x} . A^{y} has a nonzero product in degree {}", i + j));
                        break 'outer;
                    }
                }
            }
        }
        match witness {
            Some(w) => rep.push(j, Verdict::Fail, Some(w)),
            None => rep.push(j, Verdict::Pass, None),
        }
    }
    rep
}

/// Trivial-extension structure under a length-2 regular sequence.
///
/// Clauses: torsion equals the negative part, `n < 0`, `A^{<=n}` and `A^{<0}`
/// are mutually annihilating ideals, `(A^{<0})^2 = 0`, and with a functional
/// and `n = -1` the duality `D A^{<0} = A^{>=0}[-1]` in dimensions plus the
/// orthogonality relations.
pub fn verify_depth2(
    alg: &WindowedGradedAlgebra,
    r: &GradedElement,
    rt: &GradedElement,
    n: i32,
    functional: Option<&[u32]>,
) -> Result<CertifiedReport> {
    let seq = is_regular_sequence2(alg, r, rt)?;
    if let Some(f) = seq.first_failure() {
        return Err(Error::Precondition(format!("(r, r~) is not a regular sequence: degree {} fails", f.i)));
    }
    let nd = nondegenerate_products(alg, n);
    require(nd.passed(), || format!("products are degenerate in degree {n}"))?;

    let reg = regularity(alg, r)?;
    let tor = tor_part(alg, r)?;
    let mut report = CertifiedReport::new("verify_depth2").with_n(n);

    let mut a = CertifiedReport::new("torsion_is_negative_part");
    for d in alg.degrees() {
        let full = tor.is_full(d);
        let uncertain = tor.uncertain.contains(&d);
        let verdict = if d < 0 {
            match (full, uncertain) {
                (true, _) => (Verdict::Pass, None),
                (false, true) => (Verdict::Underdetermined, None),
                (false, false) => (Verdict::Fail, Some(format!("Tor has dimension {} of {}", tor.dim(d), alg.dim(d)))),
            }
        } else if tor.dim(d) > 0 {
            (Verdict::Fail, Some(format!("nonzero torsion in degree {d}")))
        } else if !uncertain {
            (Verdict::Pass, None)
        } else if reg.regular_on_nonneg.verdict_at(d) == Some(Verdict::Pass) {
            (Verdict::Pass, Some("zero by regularity of r on the non-negative part".into()))
        } else {
            (Verdict::OutOfWindow, None)
        };
        a.push(d, verdict.0, verdict.1);
    }
    report.add_clause(a);

    let mut b = CertifiedReport::new("duality_degree_negative");
    b.push(n, if n < 0 { Verdict::Pass } else { Verdict::Fail }, None);
    report.add_clause(b);

    report.add_clause(ideal_clause(alg, "low_degrees_form_ideal", n));
    report.add_clause(ideal_clause(alg, "negative_part_is_ideal", -1));
    let low = GradedSubspace::full_where(alg, |d| d <= n);
    let neg = GradedSubspace::full_where(alg, |d| d < 0);
    report.add_clause(annihilation_clause(alg, "low_annihilates_negative", &low, &neg));

    let sweep = negative_product_sweep(alg, -1);
    let mut d = CertifiedReport::new("negative_part_squares_to_zero");
    for i in alg.degrees().filter(|&i| i < 0) {
        match sweep.nonzero.iter().find(|w| w.0 == i) {
            Some(w) => d.push(i, Verdict::Fail, Some(format!("{} . {} != 0", alg.label(w.0, w.1), alg.label(w.2, w.3)))),
            None => d.push(i, Verdict::Pass, None),
        }
    }
    report.add_clause(d);

    if let Some(lambda) = functional {
        if n == -1 {
            let mut e = CertifiedReport::new("negative_part_dual_to_nonneg");
            for i in 0..=alg.window().1 {
                let j = -1 - i;
                if !alg.in_window(j) {
                    e.push(i, Verdict::OutOfWindow, None);
                } else if alg.dim(i) == alg.dim(j) {
                    e.push(i, Verdict::Pass, None);
                } else {
                    e.push(i, Verdict::Fail, Some(format!("dim A^{i} = {} but dim A^{j} = {}", alg.dim(i), alg.dim(j))));
                }
            }
            match check_orthogonality(alg, r, n, lambda) {
                Ok(o) => e.add_clause(o),
                Err(Error::Precondition(msg)) => {
                    let mut o = CertifiedReport::new("check_orthogonality").with_n(n);
                    o.push(n, Verdict::Fail, Some(msg));
                    e.add_clause(o);
                }
                Err(err) => return Err(err),
            }
            report.add_clause(e);
        } else {
            report.note("duality clause only applies when n = -1");
        }
    }
    for c in &seq.notes {
        report.note(c.clone());
    }
    Ok(report)
}

/// First pair of elements in degrees `(dr, drt)`, in canonical enumeration
/// order up to scalars, forming a central regular sequence. Considers at most
/// `limit` pairs.
pub fn find_regular_sequence2(
    alg: &WindowedGradedAlgebra,
    dr: i32,
    drt: i32,
    limit: usize,
) -> Result<Option<(GradedElement, GradedElement)>> {
    let lines_r = projective_points(alg, dr, limit);
    let lines_t = projective_points(alg, drt, limit);
    let mut tried = 0;
    for x in &lines_r {
        let r = GradedElement::homogeneous_of(dr, x.clone());
        match regularity(alg, &r) {
            Ok(rep) if rep.passed() => {}
            Ok(_) => continue,
            Err(Error::Precondition(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
        for y in &lines_t {
            tried += 1;
            if tried > limit {
                return Ok(None);
            }
            let rt = GradedElement::homogeneous_of(drt, y.clone());
            match is_regular_sequence2(alg, &r, &rt) {
                Ok(rep) if rep.passed() => return Ok(Some((r, rt))),
                Ok(_) | Err(Error::Precondition(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(None)
}

/// Nonzero vectors of `A^d` with leading coefficient 1, in increasing base-p order.
fn projective_points(alg: &WindowedGradedAlgebra, d: i32, limit: usize) -> Vec<Vec<u32>> {
    let n = alg.dim(d);
    let p = alg.field().p() as u64;
    let mut out = Vec::new();
    let Some(total) = p.checked_pow(n as u32) else { return out };
    for mut k in 1..total {
        let v: Vec<u32> = (0..n)
            .map(|_| {
                let digit = (k % p) as u32;
                k /= p;
                digit
            })
            .collect();
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            out.push(v);
            if out.len() >= limit {
                break;
            }
        }
    }
    out
}
