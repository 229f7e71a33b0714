//! Non-degenerate products, graded bilinear forms and shifted selfduality.
//!
//! Non-degeneracy of products is read off ranks of flattened multiplication
//! maps and needs no functional. Selfduality is the stronger check: a
//! functional on `A^n` induces the pairing `<a, b> = lambda(ab)`, and the pairing
//! must be perfect in every checkable degree.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{dot, Matrix};
use crate::graded::WindowedGradedAlgebra;
use crate::report::{CertifiedReport, Verdict};

/// Both one-sided verdicts of non-degeneracy at one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NondegeneracyEntry {
    pub i: i32,
    pub left: Verdict,
    pub right: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    pub n: i32,
    pub entries: Vec<NondegeneracyEntry>,
    pub unchecked: Vec<i32>,
}

impl NondegeneracyReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.left != Verdict::Fail && e.right != Verdict::Fail)
    }

    pub fn entry(&self, i: i32) -> Option<&NondegeneracyEntry> {
        self.entries.iter().find(|e| e.i == i)
    }

    pub fn to_report(&self) -> CertifiedReport {
        let mut r = CertifiedReport::new("nondegenerate_products").with_n(self.n);
        for e in &self.entries {
            let v = if e.left == Verdict::Pass && e.right == Verdict::Pass { Verdict::Pass } else { Verdict::Fail };
            r.push(e.i, v, e.witness.clone());
        }
        for &i in &self.unchecked {
            r.push(i, Verdict::OutOfWindow, None);
        }
        r
    }
}

/// Degrees `i` with both `i` and `n - i` in the window.
pub fn checkable_degrees(alg: &WindowedGradedAlgebra, n: i32) -> Vec<i32> {
    if !alg.in_window(n) {
        return Vec::new();
    }
    alg.degrees().filter(|&i| alg.in_window(n - i)).collect()
}

/// For every checkable degree, whether each nonzero `a` in `A^i` has partners
/// `b, c` in `A^{n-i}` with `ab != 0 != ca`.
pub fn nondegenerate_products(alg: &WindowedGradedAlgebra, n: i32) -> NondegeneracyReport {
    let checkable = checkable_degrees(alg, n);
    let unchecked = alg.degrees().filter(|i| !checkable.contains(i)).collect();
    let dn = alg.dim(n);
    let entries = checkable
        .iter()
        .map(|&i| {
            let (di, dj) = (alg.dim(i), alg.dim(n - i));
            let left_t = alg.table(i, n - i).expect("checkable");
            let right_t = alg.table(n - i, i).expect("checkable");
            let mut left = Matrix::zeros(alg.field(), di, dj * dn);
            let mut right = Matrix::zeros(alg.field(), di, dj * dn);
            for a in 0..di {
                for b in 0..dj {
                    for t in 0..dn {
                        left.set(a, b * dn + t, left_t.get(a * dj + b, t));
                        right.set(a, b * dn + t, right_t.get(b * di + a, t));
                    }
                }
            }
            let mut witness = None;
            let verdict = |m: &Matrix, side: &str, witness: &mut Option<String>| {
                let lk = m.transpose().kernel_basis();
                if let Some(v) = lk.first() {
                    witness.get_or_insert_with(|| format!("{side}: {v:?} in degree {i} has no partner in degree {}", n - i));
                    Verdict::Fail
                } else {
                    Verdict::Pass
                }
            };
            let l = verdict(&left, "left", &mut witness);
            let r = verdict(&right, "right", &mut witness);
            NondegeneracyEntry { i, left: l, right: r, witness }
        })
        .collect();
    NondegeneracyReport { n, entries, unchecked }
}

/// The pairing `<a, b> = lambda(pi_n(ab))` of a functional on `A^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedForm {
    pub n: i32,
    pub functional: Vec<u32>,
}

impl GradedForm {
    /// `<x, y>` for `x` in degree `i`, `y` in degree `n - i`.
    pub fn pair(&self, alg: &WindowedGradedAlgebra, i: i32, x: &[u32], y: &[u32]) -> Option<u32> {
        let prod = alg.mul_hom(i, x, self.n - i, y)?;
        Some(dot(alg.field(), &self.functional, &prod))
    }

    /// Gram matrix of degree `i`, `dim(i) x dim(n - i)`.
    pub fn gram(&self, alg: &WindowedGradedAlgebra, i: i32) -> Option<Matrix> {
        let t = alg.table(i, self.n - i)?;
        let (di, dj) = (alg.dim(i), alg.dim(self.n - i));
        let mut g = Matrix::zeros(alg.field(), di, dj);
        for a in 0..di {
            for b in 0..dj {
                g.set(a, b, dot(alg.field(), &self.functional, t.row(a * dj + b)));
            }
        }
        Some(g)
    }

    /// Checks `<ab, c> = <a, bc>` on random homogeneous triples whose degrees
    /// sum to `n`. Returns the number of triples checked.
    pub fn check_associativity(&self, alg: &WindowedGradedAlgebra, samples: usize, seed: u64) -> Result<usize> {
        let triples: Vec<(i32, i32)> = alg
            .degrees()
            .flat_map(|i| alg.degrees().map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let k = self.n - i - j;
                alg.in_window(k) && alg.in_window(i + j) && alg.in_window(j + k)
            })
            .collect();
        if triples.is_empty() {
            return Ok(0);
        }
        let field = alg.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random_vec = |d: usize, rng: &mut ChaCha8Rng| -> Vec<u32> { (0..d).map(|_| rng.gen_range(0..field.p())).collect() };
        for _ in 0..samples {
            let (i, j) = triples[rng.gen_range(0..triples.len())];
            let k = self.n - i - j;
            let a = random_vec(alg.dim(i), &mut rng);
            let b = random_vec(alg.dim(j), &mut rng);
            let c = random_vec(alg.dim(k), &mut rng);
            let ab = alg.mul_hom(i, &a, j, &b).expect("in window");
            let bc = alg.mul_hom(j, &b, k, &c).expect("in window");
            let lhs = self.pair(alg, i + j, &ab, &c).expect("in window");
            let rhs = self.pair(alg, i, &a, &bc).expect("in window");
            if lhs != rhs {
                return Err(Error::Internal(format!("form not associative on degrees ({i}, {j}, {k})")));
            }
        }
        Ok(samples)
    }
}

pub fn form_from_functional(alg: &WindowedGradedAlgebra, n: i32, functional: &[u32]) -> Result<GradedForm> {
    if !alg.in_window(n) {
        return Err(Error::OutOfWindow(n, 0));
    }
    if functional.len() != alg.dim(n) {
        return Err(Error::DimensionMismatch(format!(
            "functional of length {} on a space of dimension {}",
            functional.len(),
            alg.dim(n)
        )));
    }
    let form = GradedForm { n, functional: functional.iter().map(|&x| x % alg.field().p()).collect() };
    form.check_associativity(alg, 32, 0x5eed)?;
    Ok(form)
}

/// Perfectness of the Gram pairing of `lambda` in every checkable degree.
pub fn selfdual_check(alg: &WindowedGradedAlgebra, n: i32, functional: &[u32]) -> Result<CertifiedReport> {
    let form = form_from_functional(alg, n, functional)?;
    Ok(selfdual_report(alg, &form))
}

fn selfdual_report(alg: &WindowedGradedAlgebra, form: &GradedForm) -> CertifiedReport {
    let n = form.n;
    let mut report = CertifiedReport::new("selfdual_check").with_n(n);
    let checkable = checkable_degrees(alg, n);
    for i in alg.degrees() {
        if !checkable.contains(&i) {
            report.push(i, Verdict::OutOfWindow, None);
            continue;
        }
        let (di, dj) = (alg.dim(i), alg.dim(n - i));
        if di != dj {
            report.note(format!("dimension asymmetry at degree {i}: {di} vs {dj}"));
            report.push(i, Verdict::Fail, Some(format!("dim A^{i} = {di} but dim A^{} = {dj}", n - i)));
            continue;
        }
        let g = form.gram(alg, i).expect("checkable");
        let rank = g.rank();
        if rank == di {
            report.push(i, Verdict::Pass, None);
        } else {
            report.push(i, Verdict::Fail, Some(format!("Gram matrix has rank {rank} < {di}")));
        }
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStrategy {
    Exhaustive,
    Randomized { seed: u64, samples: usize },
}

/// Outcome of [`find_selfdual_functional`]. `proven_absent` is only set by
/// exhaustive search or by a dimension asymmetry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalSearch {
    pub functional: Option<Vec<u32>>,
    pub tried: u64,
    pub proven_absent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

/// Searches for a functional on `A^n` whose pairing is perfect wherever checkable.
/// Among passing candidates the one with the lowest candidate index wins.
pub fn find_selfdual_functional(alg: &WindowedGradedAlgebra, n: i32, strategy: SearchStrategy) -> Result<FunctionalSearch> {
    if !alg.in_window(n) {
        return Err(Error::OutOfWindow(n, 0));
    }
    let field = alg.field();
    let p = field.p() as u64;
    let dn = alg.dim(n);
    for i in checkable_degrees(alg, n) {
        if alg.dim(i) != alg.dim(n - i) {
            return Ok(FunctionalSearch {
                functional: None,
                tried: 0,
                proven_absent: true,
                reason: Some(format!("dim A^{i} = {} differs from dim A^{} = {}", alg.dim(i), n - i, alg.dim(n - i))),
            });
        }
    }
    let grams_ok = |lambda: &[u32]| -> bool {
        let form = GradedForm { n, functional: lambda.to_vec() };
        checkable_degrees(alg, n).into_iter().all(|i| form.gram(alg, i).map_or(true, |g| g.rank() == alg.dim(i)))
    };
    if dn == 0 {
        let ok = grams_ok(&[]);
        return Ok(FunctionalSearch { functional: ok.then(Vec::new), tried: 1, proven_absent: !ok, reason: None });
    }
    let candidates: Vec<Vec<u32>> = match strategy {
        SearchStrategy::Exhaustive => {
            let total = p.checked_pow(dn as u32).filter(|&t| t <= EXHAUSTIVE_LIMIT).ok_or_else(|| {
                Error::InvalidInput(format!("exhaustive search over {p}^{dn} functionals exceeds {EXHAUSTIVE_LIMIT}; use randomized search"))
            })?;
            (1..total)
                .map(|mut k| {
                    (0..dn)
                        .map(|_| {
                            let digit = (k % p) as u32;
                            k /= p;
                            digit
                        })
                        .collect()
                })
                .collect()
        }
        SearchStrategy::Randomized { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples).map(|_| (0..dn).map(|_| rng.gen_range(0..field.p())).collect()).collect()
        }
    };
    let exhaustive = matches!(strategy, SearchStrategy::Exhaustive);
    let found = candidates.par_iter().position_first(|c| grams_ok(c));
    Ok(match found {
        Some(k) => FunctionalSearch { functional: Some(candidates[k].clone()), tried: k as u64 + 1, proven_absent: false, reason: None },
        None => FunctionalSearch {
            functional: None,
            tried: candidates.len() as u64,
            proven_absent: exhaustive,
            reason: Some(if exhaustive { "no candidate passed".into() } else { "not found among samples".into() }),
        },
    })
}
