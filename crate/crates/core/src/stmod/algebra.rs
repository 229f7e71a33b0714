use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{dot, is_zero, EchelonSpace, Matrix, PrimeField, Solver};
use crate::gallery::{build_truncated_ci, TruncatedCISpec};
use crate::report::{CertifiedReport, Verdict};

/// Finite-dimensional local algebra stored through its left and right
/// regular representations: column `b` of `left[a]` is `e_a e_b`, column `b`
/// of `right[a]` is `e_b e_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FDAlgebra {
    field: PrimeField,
    dim: usize,
    left: Vec<Matrix>,
    right: Vec<Matrix>,
    unit: Vec<u32>,
    radical: Vec<Vec<u32>>,
    augmentation: Vec<u32>,
    symmetrizing: Option<Vec<u32>>,
    labels: Option<Vec<String>>,
}

impl FDAlgebra {
    /// Builds the algebra from the product of basis elements. The radical is
    /// derived; call [`FDAlgebra::validate`] before trusting the result.
    pub fn from_fn(field: PrimeField, dim: usize, product: impl Fn(usize, usize) -> Vec<u32>, unit: Vec<u32>) -> Result<Self> {
        if unit.len() != dim {
            return Err(Error::DimensionMismatch(format!("unit of length {} for dimension {dim}", unit.len())));
        }
        let mut left = vec![Matrix::zeros(field, dim, dim); dim];
        let mut right = vec![Matrix::zeros(field, dim, dim); dim];
        for a in 0..dim {
            for b in 0..dim {
                let v = product(a, b);
                if v.len() != dim {
                    return Err(Error::DimensionMismatch(format!("product e{a} e{b} has length {}", v.len())));
                }
                for (c, &x) in v.iter().enumerate() {
                    let x = x % field.p();
                    left[a].set(c, b, x);
                    right[b].set(c, a, x);
                }
            }
        }
        Self::from_regular(field, left, right, unit)
    }

    fn from_regular(field: PrimeField, left: Vec<Matrix>, right: Vec<Matrix>, unit: Vec<u32>) -> Result<Self> {
        let dim = unit.len();
        let unit = unit.iter().map(|&x| x % field.p()).collect();
        let mut alg = FDAlgebra {
            field,
            dim,
            left,
            right,
            unit,
            radical: Vec::new(),
            augmentation: vec![0; dim],
            symmetrizing: None,
            labels: None,
        };
        alg.derive_radical()?;
        Ok(alg)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &[u32] {
        &self.unit
    }

    pub fn radical(&self) -> &[Vec<u32>] {
        &self.radical
    }

    /// `chi(e_a)`, the image of each basis element in `Λ/J = k`.
    pub fn augmentation(&self) -> &[u32] {
        &self.augmentation
    }

    pub fn symmetrizing(&self) -> Option<&[u32]> {
        self.symmetrizing.as_deref()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn left(&self, a: usize) -> &Matrix {
        &self.left[a]
    }

    pub fn right(&self, a: usize) -> &Matrix {
        &self.right[a]
    }

    pub fn set_labels(&mut self, labels: Option<Vec<String>>) -> Result<()> {
        if let Some(l) = &labels {
            if l.len() != self.dim {
                return Err(Error::DimensionMismatch(format!("{} labels for dimension {}", l.len(), self.dim)));
            }
        }
        self.labels = labels;
        Ok(())
    }

    pub fn set_symmetrizing(&mut self, lambda: Option<Vec<u32>>) -> Result<()> {
        if let Some(l) = &lambda {
            if l.len() != self.dim {
                return Err(Error::DimensionMismatch(format!("functional of length {} for dimension {}", l.len(), self.dim)));
            }
        }
        self.symmetrizing = lambda.map(|l| l.iter().map(|&x| x % self.field.p()).collect());
        Ok(())
    }

    /// Replaces the derived radical by a supplied basis of `J`.
    pub fn set_radical(&mut self, basis: Vec<Vec<u32>>) -> Result<()> {
        if basis.len() + 1 != self.dim || basis.iter().any(|v| v.len() != self.dim) {
            return Err(Error::Precondition(format!(
                "radical basis of {} vectors does not have codimension 1 in dimension {}",
                basis.len(),
                self.dim
            )));
        }
        let mut cols = vec![self.unit.clone()];
        cols.extend(basis.iter().cloned());
        let solver = Solver::new(&Matrix::from_columns(self.field, self.dim, &cols));
        if solver.rank() != self.dim {
            return Err(Error::Precondition("unit and radical basis are not a basis of the algebra".into()));
        }
        self.augmentation = (0..self.dim)
            .map(|a| {
                let mut e = vec![0u32; self.dim];
                e[a] = 1;
                solver.solve(&e).expect("full rank")[0]
            })
            .collect();
        let mut space = EchelonSpace::new(self.field, self.dim);
        for v in &basis {
            space.insert(v);
        }
        self.radical = space.basis();
        Ok(())
    }

    /// Radical from the minimal polynomial of each basis element acting on 1.
    ///
    /// In a local algebra every `e_a` is `c + n` with `n` nilpotent, so its
    /// minimal polynomial is `(t - c)^m`; writing `m = p^e m'` with `p` not
    /// dividing `m'`, the coefficient of `t^(p^e (m'-1))` is `-m' c`.
    fn derive_radical(&mut self) -> Result<()> {
        let f = self.field;
        let p = f.p() as usize;
        let mut aug = Vec::with_capacity(self.dim);
        for a in 0..self.dim {
            let poly = self.minimal_polynomial(a);
            let m = poly.len() - 1;
            let (mut pe, mut m1) = (1usize, m);
            while m1 % p == 0 {
                m1 /= p;
                pe *= p;
            }
            let coef = poly[pe * (m1 - 1)];
            let c = f.mul(f.neg(coef), f.inv(f.reduce(m1 as i64)));
            // (t - c)^m must reproduce the polynomial
            let mut expect = vec![1u32];
            for _ in 0..m {
                let mut next = vec![0u32; expect.len() + 1];
                for (k, &x) in expect.iter().enumerate() {
                    next[k + 1] = f.add(next[k + 1], x);
                    next[k] = f.sub(next[k], f.mul(c, x));
                }
                expect = next;
            }
            if expect != poly {
                return Err(Error::Precondition(format!("basis element {a} is not a scalar plus a nilpotent; the algebra is not local")));
            }
            aug.push(c);
        }
        let radical: Vec<Vec<u32>> = (0..self.dim)
            .map(|a| {
                let mut v: Vec<u32> = self.unit.iter().map(|&u| f.neg(f.mul(aug[a], u))).collect();
                v[a] = f.add(v[a], 1);
                v
            })
            .collect();
        let mut space = EchelonSpace::new(f, self.dim);
        for v in &radical {
            space.insert(v);
        }
        if space.dim() + 1 != self.dim {
            return Err(Error::Precondition("the derived radical does not have codimension 1".into()));
        }
        self.radical = space.basis();
        self.augmentation = aug;
        Ok(())
    }

    /// Monic minimal polynomial of `e_a`, low degree first, from the Krylov
    /// sequence of the unit under left multiplication.
    fn minimal_polynomial(&self, a: usize) -> Vec<u32> {
        let f = self.field;
        let mut space = EchelonSpace::new(f, self.dim);
        let mut powers: Vec<Vec<u32>> = Vec::new();
        let mut v = self.unit.clone();
        loop {
            if space.contains(&v) {
                let m = Matrix::from_columns(f, self.dim, &powers);
                let c = m.solve(&v).expect("lengths agree").expect("in span");
                let mut poly: Vec<u32> = c.iter().map(|&x| f.neg(x)).collect();
                poly.push(1);
                return poly;
            }
            space.insert(&v);
            powers.push(v.clone());
            v = self.left[a].mul_vec(&v);
        }
    }

    pub fn mul(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        self.left_matrix(x).mul_vec(y)
    }

    /// Matrix of `y |-> x y`.
    pub fn left_matrix(&self, x: &[u32]) -> Matrix {
        combine(self.field, self.dim, &self.left, x)
    }

    pub fn right_matrix(&self, x: &[u32]) -> Matrix {
        combine(self.field, self.dim, &self.right, x)
    }

    pub fn basis_vector(&self, a: usize) -> Vec<u32> {
        let mut v = vec![0u32; self.dim];
        v[a] = 1;
        v
    }

    /// Unit, associativity and locality (`J` a nilpotent two-sided ideal of codimension 1).
    pub fn validate(&self) -> Result<()> {
        let f = self.field;
        let id = Matrix::identity(f, self.dim);
        if self.left_matrix(&self.unit) != id || self.right_matrix(&self.unit) != id {
            return Err(Error::Precondition("the unit is not a two-sided identity".into()));
        }
        for a in 0..self.dim {
            for b in 0..self.dim {
                if self.left[a].column(b) != self.right[b].column(a) {
                    return Err(Error::Internal("left and right representations disagree".into()));
                }
                let ab = self.left[a].column(b);
                if self.left[a].mul(&self.left[b]) != self.left_matrix(&ab) {
                    return Err(Error::Precondition(format!("associativity fails for basis pair ({a}, {b})")));
                }
            }
        }
        self.check_local()
    }

    fn check_local(&self) -> Result<()> {
        let mut jspace = EchelonSpace::new(self.field, self.dim);
        for v in &self.radical {
            jspace.insert(v);
        }
        for a in 0..self.dim {
            for j in &self.radical {
                if !jspace.contains(&self.left[a].mul_vec(j)) || !jspace.contains(&self.right[a].mul_vec(j)) {
                    return Err(Error::Precondition("the radical is not a two-sided ideal".into()));
                }
            }
        }
        let mut power = self.radical.clone();
        for _ in 0..=self.dim {
            if power.iter().all(|v| is_zero(v)) {
                return Ok(());
            }
            let mut next = EchelonSpace::new(self.field, self.dim);
            for x in &power {
                for j in &self.radical {
                    next.insert(&self.mul(x, j));
                }
            }
            power = next.basis();
        }
        Err(Error::Precondition("the radical is not nilpotent; the algebra is not local".into()))
    }

    /// Checks that `lambda(ab) = lambda(ba)` and that `(a, b) |-> lambda(ab)` is non-degenerate.
    pub fn validate_symmetric(&self) -> CertifiedReport {
        let mut rep = CertifiedReport::new("validate_symmetric");
        let Some(lambda) = &self.symmetrizing else {
            rep.push(0, Verdict::Fail, Some("no symmetrizing functional".into()));
            return rep;
        };
        let f = self.field;
        let mut trace = CertifiedReport::new("trace_property");
        let mut gram = Matrix::zeros(f, self.dim, self.dim);
        let mut witness = None;
        for a in 0..self.dim {
            let la = row_functional(f, lambda, &self.left[a]);
            let ra = row_functional(f, lambda, &self.right[a]);
            for b in 0..self.dim {
                gram.set(a, b, la[b]);
                if la[b] != ra[b] && witness.is_none() {
                    witness = Some(format!("lambda(e{a} e{b}) != lambda(e{b} e{a})"));
                }
            }
        }
        trace.push(0, if witness.is_some() { Verdict::Fail } else { Verdict::Pass }, witness);
        rep.add_clause(trace);
        let mut nd = CertifiedReport::new("nondegenerate_form");
        match gram.kernel_basis().first() {
            Some(v) => nd.push(0, Verdict::Fail, Some(format!("{v:?} is orthogonal to everything"))),
            None => nd.push(0, Verdict::Pass, None),
        }
        rep.add_clause(nd);
        rep
    }

    /// `Λ^op`, with left and right representations exchanged.
    pub fn opposite(&self) -> FDAlgebra {
        let mut op = self.clone();
        std::mem::swap(&mut op.left, &mut op.right);
        op
    }

    /// `Λ ⊗ Λ^op` on the basis `e_a ⊗ e_b` with index `a * dim + b`, product
    /// `(a ⊗ b)(a' ⊗ b') = a a' ⊗ b' b` and functional `lambda(a) lambda(b)`.
    pub fn enveloping(&self) -> FDAlgebra {
        let d = self.dim;
        let f = self.field;
        let mut left = Vec::with_capacity(d * d);
        let mut right = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                left.push(kron(&self.left[a], &self.right[b]));
                right.push(kron(&self.right[a], &self.left[b]));
            }
        }
        let unit = tensor(f, &self.unit, &self.unit);
        let augmentation: Vec<u32> = (0..d * d).map(|k| f.mul(self.augmentation[k / d], self.augmentation[k % d])).collect();
        // kernel of the augmentation, which is J ⊗ Λ + Λ ⊗ J
        let radical = Matrix::from_columns(f, 1, &augmentation.iter().map(|&x| vec![x]).collect::<Vec<_>>()).kernel_basis();
        let radical = {
            let mut s = EchelonSpace::new(f, d * d);
            for v in &radical {
                s.insert(v);
            }
            s.basis()
        };
        let symmetrizing = self.symmetrizing.as_ref().map(|l| tensor(f, l, l));
        let labels = self.labels.as_ref().map(|l| {
            let mut out = Vec::with_capacity(d * d);
            for a in l {
                for b in l {
                    out.push(format!("{a}|{b}"));
                }
            }
            out
        });
        FDAlgebra { field: f, dim: d * d, left, right, unit, radical, augmentation, symmetrizing, labels }
    }

    pub fn to_file(&self) -> FDAlgebraFile {
        let mult = (0..self.dim)
            .map(|a| (0..self.dim).map(|b| self.left[a].column(b).iter().map(|&x| x as i64).collect()).collect())
            .collect();
        FDAlgebraFile {
            field_char: Some(self.field.p() as u64),
            dim: Some(self.dim),
            mult: Some(mult),
            unit: Some(self.unit.iter().map(|&x| x as i64).collect()),
            radical_basis: Some(self.radical.iter().map(|v| v.iter().map(|&x| x as i64).collect()).collect()),
            symmetrizing: self.symmetrizing.as_ref().map(|v| v.iter().map(|&x| x as i64).collect()),
            labels: self.labels.clone(),
            truncated: None,
        }
    }

    pub fn from_file(file: &FDAlgebraFile) -> Result<Self> {
        if let Some(t) = &file.truncated {
            return build_truncated_ci(&TruncatedCISpec::new(t.field_char, &t.exponents)).map_err(|e| match e {
                Error::InvalidInput(m) | Error::Precondition(m) => Error::Parse(m),
                Error::NotPrime(p) => Error::Parse(format!("{p} is not prime")),
                e => e,
            });
        }
        let missing = |name: &str| Error::Parse(format!("missing field `{name}`"));
        let p = file.field_char.ok_or_else(|| missing("field_char"))?;
        let field = PrimeField::new(p).map_err(|_| Error::Parse(format!("field_char {p} is not prime")))?;
        let dim = file.dim.ok_or_else(|| missing("dim"))?;
        let mult = file.mult.as_ref().ok_or_else(|| missing("mult"))?;
        let unit = file.unit.as_ref().ok_or_else(|| missing("unit"))?;
        let red = |v: &[i64]| v.iter().map(|&x| field.reduce(x)).collect::<Vec<u32>>();
        if mult.len() != dim || mult.iter().any(|r| r.len() != dim || r.iter().any(|v| v.len() != dim)) {
            return Err(Error::Parse(format!("`mult` must be a {dim} x {dim} x {dim} tensor")));
        }
        if unit.len() != dim {
            return Err(Error::Parse(format!("`unit` must have length {dim}")));
        }
        let mut alg = FDAlgebra::from_fn(field, dim, |a, b| red(&mult[a][b]), red(unit))?;
        alg.validate()?;
        if let Some(r) = &file.radical_basis {
            let basis: Vec<Vec<u32>> = r.iter().map(|v| red(v)).collect();
            if basis.iter().any(|v| v.len() != dim) {
                return Err(Error::Parse("radical basis vectors have the wrong length".into()));
            }
            alg.set_radical(basis)?;
            alg.check_local()?;
        }
        if let Some(l) = &file.symmetrizing {
            if l.len() != dim {
                return Err(Error::Parse(format!("`symmetrizing` must have length {dim}")));
            }
            alg.set_symmetrizing(Some(red(l)))?;
        }
        alg.set_labels(file.labels.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(alg)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: FDAlgebraFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }
}

/// `Σ x_a mats[a]`.
pub(crate) fn combine(field: PrimeField, n: usize, mats: &[Matrix], x: &[u32]) -> Matrix {
    let rows = mats.first().map_or(n, |m| m.rows());
    let cols = mats.first().map_or(n, |m| m.cols());
    let mut data = vec![0u64; rows * cols];
    let p = field.p() as u64;
    for (m, &c) in mats.iter().zip(x) {
        if c == 0 {
            continue;
        }
        for (acc, &v) in data.iter_mut().zip(m.data()) {
            if v != 0 {
                *acc = (*acc + c as u64 * v as u64) % p;
            }
        }
    }
    Matrix::from_data(field, rows, cols, data.into_iter().map(|x| x as u32).collect()).expect("shape")
}

/// `v ↦ lambda(m v)` as a row vector.
fn row_functional(field: PrimeField, lambda: &[u32], m: &Matrix) -> Vec<u32> {
    (0..m.cols()).map(|b| dot(field, lambda, &m.column(b))).collect()
}

fn tensor(field: PrimeField, x: &[u32], y: &[u32]) -> Vec<u32> {
    x.iter().flat_map(|&a| y.iter().map(move |&b| field.mul(a, b))).collect()
}

/// Kronecker product with the first factor indexing the slow coordinate.
pub(crate) fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let f = a.field();
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = Matrix::zeros(f, ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let x = a.get(i, j);
            if x == 0 {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    let y = b.get(k, l);
                    if y != 0 {
                        out.set(i * br + k, j * bc + l, f.mul(x, y));
                    }
                }
            }
        }
    }
    out
}

/// Truncated polynomial shorthand inside an algebra file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncatedShorthand {
    pub exponents: Vec<usize>,
    pub field_char: u64,
}

/// JSON form of an [`FDAlgebra`]. `mult[a][b]` is the coefficient vector of `e_a e_b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FDAlgebraFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_char: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mult: Option<Vec<Vec<Vec<i64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radical_basis: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetrizing: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated: Option<TruncatedShorthand>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build_truncated_ci, TruncatedCISpec};

    fn trunc(p: u64, ex: &[usize]) -> FDAlgebra {
        build_truncated_ci(&TruncatedCISpec::new(p, ex)).unwrap()
    }

    #[test]
    fn symmetric_examples() {
        assert!(trunc(2, &[2]).validate_symmetric().passed());
        assert!(trunc(2, &[2, 2]).validate_symmetric().passed());
        let mut a = trunc(2, &[2]);
        a.set_symmetrizing(Some(vec![1, 0])).unwrap();
        let rep = a.validate_symmetric();
        assert!(!rep.passed());
        assert_eq!(rep.clauses[1].verdict_at(0), Some(Verdict::Fail));
        a.set_symmetrizing(None).unwrap();
        assert!(!a.validate_symmetric().passed());
    }

    #[test]
    fn derived_radical_matches_monomials() {
        for (p, ex) in [(2, vec![2, 2]), (3, vec![3]), (2, vec![4]), (3, vec![3, 2])] {
            let a = trunc(p, &ex);
            let mut derived = a.clone();
            derived.derive_radical().unwrap();
            assert_eq!(derived.radical(), a.radical());
            assert_eq!(derived.augmentation(), a.augmentation());
        }
    }

    #[test]
    fn radical_of_shifted_basis() {
        // k[x]/(x^3) over F_3 on the basis 1, 1 + x, x^2
        let f = PrimeField::new(3).unwrap();
        let base = trunc(3, &[3]);
        let change = Matrix::from_rows(f, &[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let inv = Solver::new(&change);
        let alg = FDAlgebra::from_fn(
            f,
            3,
            |a, b| inv.solve(&base.mul(&change.column(a), &change.column(b))).unwrap(),
            vec![1, 0, 0],
        )
        .unwrap();
        alg.validate().unwrap();
        assert_eq!(alg.augmentation(), &[1, 1, 0]);
    }

    #[test]
    fn non_local_rejected() {
        // k x k
        let f = PrimeField::new(2).unwrap();
        let r = FDAlgebra::from_fn(f, 2, |a, b| if a == b { if a == 0 { vec![1, 0] } else { vec![0, 1] } } else { vec![0, 0] }, vec![1, 1]);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn enveloping_examples() {
        let a = trunc(2, &[2]);
        let e = a.enveloping();
        assert_eq!(e.dim(), 4);
        e.validate().unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(e.mul(&e.basis_vector(x), &e.basis_vector(y)), e.mul(&e.basis_vector(y), &e.basis_vector(x)));
            }
        }
        let e3 = trunc(3, &[3]).enveloping();
        e3.validate().unwrap();
        assert!(e3.validate_symmetric().passed());
        let mut derived = e3.clone();
        derived.derive_radical().unwrap();
        assert_eq!(derived.radical(), e3.radical());
    }

    #[test]
    fn json_roundtrip_and_shorthand() {
        let a = trunc(3, &[3, 2]);
        let back = FDAlgebra::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
        let s = FDAlgebra::from_json(r#"{"truncated": {"exponents": [2, 2], "field_char": 2}}"#).unwrap();
        assert_eq!(s, trunc(2, &[2, 2]));
        assert!(matches!(FDAlgebra::from_json(r#"{"truncated": {"exponents": [2], "field_char": 6}}"#), Err(Error::Parse(_))));
        assert!(matches!(FDAlgebra::from_json(r#"{"field_char": 2, "dim": 1}"#), Err(Error::Parse(_))));
    }
}
