//! Example algebras and closed-form dimension formulas used as oracles.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::PrimeField;
use crate::graded::WindowedGradedAlgebra;
use crate::stmod::FDAlgebra;

/// `k[w, w^-1]` with `|w| = 1`, restricted to `window`.
pub fn laurent(field: PrimeField, window: (i32, i32)) -> Result<WindowedGradedAlgebra> {
    let (lo, hi) = window;
    let dims: BTreeMap<i32, usize> = (lo..=hi).map(|d| (d, 1)).collect();
    let mut a = WindowedGradedAlgebra::new(field, window, &dims, vec![1])?;
    for i in lo..=hi {
        for j in lo..=hi {
            if a.in_window(i + j) {
                a.set_product(i, 0, j, 0, &[1])?;
            }
        }
    }
    let labels = (lo..=hi)
        .map(|d| {
            let name = match d {
                0 => "1".to_string(),
                1 => "w".to_string(),
                _ => format!("w^{d}"),
            };
            (d, vec![name])
        })
        .collect();
    a.set_labels(labels)?;
    Ok(a)
}

/// `k[x]/(x^2)` with `|x| = 1` on the window `[-1, 1]`, where degree -1 is zero.
pub fn dual_numbers_graded(field: PrimeField) -> Result<WindowedGradedAlgebra> {
    let dims = BTreeMap::from([(-1, 0), (0, 1), (1, 1)]);
    let mut a = WindowedGradedAlgebra::new(field, (-1, 1), &dims, vec![1])?;
    a.set_product(0, 0, 0, 0, &[1])?;
    a.set_product(0, 0, 1, 0, &[1])?;
    a.set_product(1, 0, 0, 0, &[1])?;
    a.set_labels(BTreeMap::from([(-1, vec![]), (0, vec!["1".into()]), (1, vec!["x".into()])]))?;
    Ok(a)
}

/// Exponent vectors in `c` variables of total degree `n`, first variable
/// descending (so `w1` precedes `w2`).
pub fn monomials(c: usize, n: usize) -> Vec<Vec<usize>> {
    if c == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=n).rev() {
        for mut rest in monomials(c - 1, n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn monomial_label(alpha: &[usize]) -> String {
    let single = alpha.len() == 1;
    let parts: Vec<String> = alpha
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(k, &e)| {
            let var = if single { "w".to_string() } else { format!("w{}", k + 1) };
            if e == 1 {
                var
            } else {
                format!("{var}^{e}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Binomial coefficient, exact for the small arguments used here.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `B ⋉ (D B)[-1]` for `B = k[w1, .., wc]`, `|wi| = 1`.
///
/// Degree `i >= 0` holds the monomials of degree `i`; degree `-1 - i` holds
/// their dual functionals `D(w^a)`. `w^b` acts on `D(w^a)` from either side
/// by contraction to `D(w^(a-b))`, and products of two duals vanish.
pub fn trivial_extension(field: PrimeField, c: usize, window: (i32, i32)) -> Result<WindowedGradedAlgebra> {
    if c == 0 {
        return Err(Error::InvalidInput("trivial extension needs at least one variable".into()));
    }
    let (lo, hi) = window;
    // (is_dual, exponent vectors) per degree
    let basis: BTreeMap<i32, (bool, Vec<Vec<usize>>)> = (lo..=hi)
        .map(|d| {
            if d >= 0 {
                (d, (false, monomials(c, d as usize)))
            } else {
                (d, (true, monomials(c, (-1 - d) as usize)))
            }
        })
        .collect();
    let dims: BTreeMap<i32, usize> = basis.iter().map(|(&d, (_, b))| (d, b.len())).collect();
    let mut a = WindowedGradedAlgebra::new(field, window, &dims, vec![1])?;
    let index = |d: i32, alpha: &[usize]| basis[&d].1.iter().position(|m| m == alpha);
    for i in lo..=hi {
        for j in lo..=hi {
            let k = i + j;
            if !a.in_window(k) {
                continue;
            }
            let (di, bi) = &basis[&i];
            let (dj, bj) = &basis[&j];
            if *di && *dj {
                continue;
            }
            for (x, ax) in bi.iter().enumerate() {
                for (y, ay) in bj.iter().enumerate() {
                    let target: Option<Vec<usize>> = match (di, dj) {
                        (false, false) => Some(ax.iter().zip(ay).map(|(p, q)| p + q).collect()),
                        (true, false) => ax.iter().zip(ay).map(|(p, q)| p.checked_sub(*q)).collect(),
                        (false, true) => ay.iter().zip(ax).map(|(p, q)| p.checked_sub(*q)).collect(),
                        (true, true) => unreachable!(),
                    };
                    if let Some(t) = target {
                        let pos = index(k, &t).expect("monomial of the right degree");
                        let mut v = vec![0u32; a.dim(k)];
                        v[pos] = 1;
                        a.set_product(i, x, j, y, &v)?;
                    }
                }
            }
        }
    }
    let labels = basis
        .iter()
        .map(|(&d, (dual, b))| {
            let names = b
                .iter()
                .map(|m| if *dual { format!("D({})", monomial_label(m)) } else { monomial_label(m) })
                .collect();
            (d, names)
        })
        .collect();
    a.set_labels(labels)?;
    Ok(a)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedCISpec {
    pub field_char: u64,
    pub exponents: Vec<usize>,
}

impl TruncatedCISpec {
    pub fn new(field_char: u64, exponents: &[usize]) -> Self {
        TruncatedCISpec { field_char, exponents: exponents.to_vec() }
    }

    pub fn check(&self) -> Result<PrimeField> {
        let field = PrimeField::new(self.field_char)?;
        if self.exponents.is_empty() || self.exponents.iter().any(|&a| a < 2) {
            return Err(Error::InvalidInput(format!("exponents {:?} must be nonempty and at least 2", self.exponents)));
        }
        Ok(field)
    }

    pub fn dim(&self) -> usize {
        self.exponents.iter().product()
    }
}

/// Exponent vector of monomial `k`, first variable varying fastest.
fn decode(exponents: &[usize], mut k: usize) -> Vec<usize> {
    exponents
        .iter()
        .map(|&a| {
            let e = k % a;
            k /= a;
            e
        })
        .collect()
}

fn encode(exponents: &[usize], e: &[usize]) -> Option<usize> {
    let mut k = 0;
    let mut stride = 1;
    for (&x, &a) in e.iter().zip(exponents) {
        if x >= a {
            return None;
        }
        k += x * stride;
        stride *= a;
    }
    Some(k)
}

/// `k[x1, .., xc]/(x1^a1, .., xc^ac)` on its monomial basis, with the socle
/// coefficient as symmetrizing functional.
pub fn build_truncated_ci(spec: &TruncatedCISpec) -> Result<FDAlgebra> {
    let field = spec.check()?;
    let ex = &spec.exponents;
    let d = spec.dim();
    let product = |a: usize, b: usize| {
        let (ea, eb) = (decode(ex, a), decode(ex, b));
        let sum: Vec<usize> = ea.iter().zip(&eb).map(|(x, y)| x + y).collect();
        let mut v = vec![0u32; d];
        if let Some(k) = encode(ex, &sum) {
            v[k] = 1;
        }
        v
    };
    let mut unit = vec![0u32; d];
    unit[0] = 1;
    let radical: Vec<Vec<u32>> = (1..d)
        .map(|k| {
            let mut v = vec![0u32; d];
            v[k] = 1;
            v
        })
        .collect();
    let mut socle = vec![0u32; d];
    socle[d - 1] = 1;
    let vars: Vec<String> = if ex.len() == 1 { vec!["x".into()] } else { (1..=ex.len()).map(|k| format!("x{k}")).collect() };
    let labels = (0..d)
        .map(|k| {
            let parts: Vec<String> = decode(ex, k)
                .iter()
                .zip(&vars)
                .filter(|(&e, _)| e > 0)
                .map(|(&e, v)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect();
            if parts.is_empty() {
                "1".into()
            } else {
                parts.join("*")
            }
        })
        .collect();
    let mut alg = FDAlgebra::from_fn(field, d, product, unit)?;
    alg.set_radical(radical)?;
    alg.set_symmetrizing(Some(socle))?;
    alg.set_labels(Some(labels))?;
    Ok(alg)
}

/// Dimension of every Tate-Hochschild group of `k[x]/(x^a)` in characteristic `p`.
pub fn expected_tate_hh_dim(a: usize, p: u64) -> usize {
    if a as u64 % p == 0 {
        a
    } else {
        a - 1
    }
}

/// Coefficient of `t^n` in `(1 + t)^c / (1 - t^2)^c`.
pub fn expected_ext_dim_ci(c: usize, n: usize) -> usize {
    (0..=c.min(n))
        .filter(|k| (n - k) % 2 == 0)
        .map(|k| {
            let m = ((n - k) / 2) as u64;
            binomial(c as u64, k as u64) * binomial(m + c as u64 - 1, c as u64 - 1)
        })
        .sum::<u64>() as usize
}

/// Dimension of the degree-zero Tate-Hochschild group of a truncated complete intersection.
pub fn expected_hh0_dim(exponents: &[usize], p: u64) -> usize {
    let prod: usize = exponents.iter().product();
    if exponents.iter().any(|&a| a as u64 % p == 0) {
        prod
    } else {
        prod - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn trivial_extension_dims() {
        let t = trivial_extension(f(2), 1, (-3, 2)).unwrap();
        assert_eq!(t.dims().values().copied().collect::<Vec<_>>(), vec![1; 6]);
        let t = trivial_extension(f(2), 2, (-3, 2)).unwrap();
        assert_eq!(t.dims().values().copied().collect::<Vec<_>>(), vec![3, 2, 1, 1, 2, 3]);
        for c in 1..=3 {
            let t = trivial_extension(f(3), c, (-4, 3)).unwrap();
            assert!(t.validate().unwrap().passed(), "c = {c}");
            for i in 0..=3 {
                assert_eq!(t.dim(i) as u64, binomial(i as u64 + c as u64 - 1, c as u64 - 1));
                assert_eq!(t.dim(-1 - i), t.dim(i));
            }
        }
    }

    #[test]
    fn trivial_extension_negative_square_zero() {
        let t = trivial_extension(f(5), 3, (-4, 3)).unwrap();
        for i in -4..0 {
            for j in -4..0 {
                if let Some(m) = t.table(i, j) {
                    assert!(m.is_zero());
                }
            }
        }
        assert_eq!(t.label(-2, 0), "D(w1)");
        assert_eq!(t.label(2, 1), "w1*w2");
    }

    #[test]
    fn truncated_dims_and_symmetry() {
        for (p, ex, d) in [(2, vec![2], 2), (2, vec![2, 2], 4), (3, vec![3], 3), (3, vec![3, 2], 6)] {
            let a = build_truncated_ci(&TruncatedCISpec::new(p, &ex)).unwrap();
            assert_eq!(a.dim(), d);
            a.validate().unwrap();
            assert!(a.validate_symmetric().passed());
        }
        assert!(build_truncated_ci(&TruncatedCISpec::new(2, &[1])).is_err());
        assert!(build_truncated_ci(&TruncatedCISpec::new(4, &[2])).is_err());
    }

    #[test]
    fn closed_forms() {
        assert_eq!(expected_tate_hh_dim(2, 2), 2);
        assert_eq!(expected_tate_hh_dim(3, 2), 2);
        assert_eq!(expected_tate_hh_dim(4, 2), 4);
        assert_eq!(expected_hh0_dim(&[2, 2], 2), 4);
        assert_eq!(expected_hh0_dim(&[3, 3], 2), 8);
        assert_eq!(expected_hh0_dim(&[2], 3), 1);
        assert_eq!((0..5).map(|n| expected_ext_dim_ci(1, n)).collect::<Vec<_>>(), vec![1; 5]);
        assert_eq!((0..4).map(|n| expected_ext_dim_ci(2, n)).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    }

    /// Counts monomials `y^e z^m` with `e` in `{0,1}^c` directly.
    fn brute_ext_count(c: usize, n: usize) -> usize {
        let mut count = 0;
        for mask in 0..(1usize << c) {
            let ones = mask.count_ones() as usize;
            if ones <= n && (n - ones) % 2 == 0 {
                count += monomials(c, (n - ones) / 2).len();
            }
        }
        count
    }

    #[test]
    fn ext_formula_matches_monomial_count() {
        for c in 1..=3 {
            for n in 0..=8 {
                assert_eq!(expected_ext_dim_ci(c, n), brute_ext_count(c, n), "c = {c}, n = {n}");
            }
        }
    }
}
