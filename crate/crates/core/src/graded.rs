//! Z-graded algebras restricted to a finite window of degrees.
//!
//! A [`WindowedGradedAlgebra`] stores one structure-constant table per pair
//! of degrees `(i, j)` with `i`, `j` and `i + j` all inside the window. Row
//! `a * dim(j) + b` of the `(i, j)` table is the product of basis element `a`
//! of degree `i` with basis element `b` of degree `j`, written in the basis of
//! degree `i + j`. Shifts are never materialized; callers do index arithmetic.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{axpy, is_zero, EchelonSpace, Matrix, PrimeField};
use crate::report::{CertifiedReport, Verdict};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowedGradedAlgebra {
    field: PrimeField,
    d_min: i32,
    d_max: i32,
    dims: Vec<usize>,
    mult: Vec<Option<Matrix>>,
    unit: Vec<u32>,
    labels: Option<BTreeMap<i32, Vec<String>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl WindowedGradedAlgebra {
    /// Algebra with the given dimensions and all products zero.
    pub fn new(field: PrimeField, window: (i32, i32), dims: &BTreeMap<i32, usize>, unit: Vec<u32>) -> Result<Self> {
        let (d_min, d_max) = window;
        if d_min > 0 || d_max < 0 {
            return Err(Error::InvalidInput(format!("window [{d_min}, {d_max}] must contain 0")));
        }
        if let Some(&d) = dims.keys().find(|&&d| d < d_min || d > d_max) {
            return Err(Error::InvalidInput(format!("degree {d} lies outside the window")));
        }
        let w = (d_max - d_min + 1) as usize;
        let dims: Vec<usize> = (d_min..=d_max).map(|d| dims.get(&d).copied().unwrap_or(0)).collect();
        let dim0 = dims[(-d_min) as usize];
        if unit.len() != dim0 {
            return Err(Error::DimensionMismatch(format!("unit has {} coefficients, degree 0 has dimension {dim0}", unit.len())));
        }
        let unit = unit.into_iter().map(|x| x % field.p()).collect();
        let mut mult = Vec::with_capacity(w * w);
        for i in d_min..=d_max {
            for j in d_min..=d_max {
                let k = i + j;
                if k >= d_min && k <= d_max {
                    let (di, dj, dk) = (dims[(i - d_min) as usize], dims[(j - d_min) as usize], dims[(k - d_min) as usize]);
                    mult.push(Some(Matrix::zeros(field, di * dj, dk)));
                } else {
                    mult.push(None);
                }
            }
        }
        Ok(WindowedGradedAlgebra { field, d_min, d_max, dims, mult, unit, labels: None })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn window(&self) -> (i32, i32) {
        (self.d_min, self.d_max)
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.d_min..=self.d_max
    }

    pub fn in_window(&self, d: i32) -> bool {
        d >= self.d_min && d <= self.d_max
    }

    /// Dimension at degree `d`; zero outside the window.
    pub fn dim(&self, d: i32) -> usize {
        if self.in_window(d) {
            self.dims[(d - self.d_min) as usize]
        } else {
            0
        }
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.degrees().map(|d| (d, self.dim(d))).collect()
    }

    pub fn unit(&self) -> &[u32] {
        &self.unit
    }

    pub fn labels(&self) -> Option<&BTreeMap<i32, Vec<String>>> {
        self.labels.as_ref()
    }

    pub fn set_labels(&mut self, labels: BTreeMap<i32, Vec<String>>) -> Result<()> {
        for (&d, names) in &labels {
            if names.len() != self.dim(d) {
                return Err(Error::DimensionMismatch(format!("{} labels for degree {d} of dimension {}", names.len(), self.dim(d))));
            }
        }
        self.labels = Some(labels);
        Ok(())
    }

    pub fn label(&self, d: i32, idx: usize) -> String {
        self.labels
            .as_ref()
            .and_then(|l| l.get(&d))
            .and_then(|v| v.get(idx).cloned())
            .unwrap_or_else(|| format!("e[{d}][{idx}]"))
    }

    /// Resolves a basis label; also accepts the default `e[d][idx]` form.
    pub fn find_label(&self, name: &str) -> Option<(i32, usize)> {
        if let Some(l) = &self.labels {
            for (&d, names) in l {
                if let Some(k) = names.iter().position(|n| n == name) {
                    return Some((d, k));
                }
            }
        }
        let rest = name.strip_prefix("e[")?;
        let (d, rest) = rest.split_once("][")?;
        let idx = rest.strip_suffix(']')?;
        let (d, idx) = (d.parse().ok()?, idx.parse().ok()?);
        (self.in_window(d) && idx < self.dim(d)).then_some((d, idx))
    }

    fn slot(&self, i: i32, j: i32) -> Option<usize> {
        if !self.in_window(i) || !self.in_window(j) || !self.in_window(i + j) {
            return None;
        }
        let w = (self.d_max - self.d_min + 1) as usize;
        Some((i - self.d_min) as usize * w + (j - self.d_min) as usize)
    }

    /// Structure-constant table `A^i x A^j -> A^{i+j}`, or `None` when out of window.
    pub fn table(&self, i: i32, j: i32) -> Option<&Matrix> {
        self.slot(i, j).and_then(|s| self.mult[s].as_ref())
    }

    pub fn set_table(&mut self, i: i32, j: i32, table: Matrix) -> Result<()> {
        let s = self.slot(i, j).ok_or(Error::OutOfWindow(i, j))?;
        let want = (self.dim(i) * self.dim(j), self.dim(i + j));
        if (table.rows(), table.cols()) != want || table.field() != self.field {
            return Err(Error::DimensionMismatch(format!(
                "table ({i}, {j}) is {}x{}, expected {}x{}",
                table.rows(),
                table.cols(),
                want.0,
                want.1
            )));
        }
        self.mult[s] = Some(table);
        Ok(())
    }

    /// Sets the product of two basis elements.
    pub fn set_product(&mut self, i: i32, a: usize, j: i32, b: usize, value: &[u32]) -> Result<()> {
        let dj = self.dim(j);
        let dk = self.dim(i + j);
        let s = self.slot(i, j).ok_or(Error::OutOfWindow(i, j))?;
        if a >= self.dim(i) || b >= dj || value.len() != dk {
            return Err(Error::DimensionMismatch(format!("product entry ({i}:{a}, {j}:{b})")));
        }
        let t = self.mult[s].as_mut().expect("slot present");
        let row = t.row_mut(a * dj + b);
        for (x, &v) in row.iter_mut().zip(value) {
            *x = v % self.field.p();
        }
        Ok(())
    }

    /// Product of basis elements, `None` when `i + j` leaves the window.
    pub fn basis_product(&self, i: i32, a: usize, j: i32, b: usize) -> Option<&[u32]> {
        self.table(i, j).map(|t| t.row(a * self.dim(j) + b))
    }

    /// Product of homogeneous coefficient vectors.
    pub fn mul_hom(&self, i: i32, x: &[u32], j: i32, y: &[u32]) -> Option<Vec<u32>> {
        let t = self.table(i, j)?;
        let dj = self.dim(j);
        let mut out = vec![0u32; self.dim(i + j)];
        for (a, &xa) in x.iter().enumerate() {
            if xa == 0 {
                continue;
            }
            for (b, &yb) in y.iter().enumerate() {
                if yb != 0 {
                    axpy(self.field, &mut out, self.field.mul(xa, yb), t.row(a * dj + b));
                }
            }
        }
        Some(out)
    }

    /// Matrix of `y |-> x y` from `A^j` to `A^{i+j}` (or `y |-> y x` for [`Side::Right`]).
    pub fn mult_matrix(&self, side: Side, i: i32, x: &[u32], j: i32) -> Option<Matrix> {
        self.table(i, j)?;
        let cols: Vec<Vec<u32>> = (0..self.dim(j))
            .map(|b| {
                let e = unit_vector(self.dim(j), b);
                match side {
                    Side::Left => self.mul_hom(i, x, j, &e),
                    Side::Right => self.mul_hom(j, &e, i, x),
                }
                .expect("in window")
            })
            .collect();
        Some(Matrix::from_columns(self.field, self.dim(i + j), &cols))
    }

    /// Checks that every table has the right shape.
    pub fn check_shapes(&self) -> Result<()> {
        for i in self.degrees() {
            for j in self.degrees() {
                if let Some(t) = self.table(i, j) {
                    if (t.rows(), t.cols()) != (self.dim(i) * self.dim(j), self.dim(i + j)) {
                        return Err(Error::DimensionMismatch(format!("table ({i}, {j})")));
                    }
                }
            }
        }
        if self.unit.len() != self.dim(0) {
            return Err(Error::DimensionMismatch("unit".into()));
        }
        Ok(())
    }

    /// Unit and associativity axioms on every in-window basis triple.
    /// Verdicts are indexed by the degree of the first factor.
    pub fn validate(&self) -> Result<CertifiedReport> {
        self.check_shapes()?;
        let mut report = CertifiedReport::new("validate");
        for i in self.degrees() {
            let mut witness = None;
            for a in 0..self.dim(i) {
                let e = unit_vector(self.dim(i), a);
                let l = self.mul_hom(0, &self.unit, i, &e).expect("degree 0 times i");
                let r = self.mul_hom(i, &e, 0, &self.unit).expect("i times degree 0");
                if l != e || r != e {
                    witness = Some(format!("unit axiom fails on {}", self.label(i, a)));
                    break;
                }
            }
            if witness.is_none() {
                witness = self.associativity_witness(i);
            }
            match witness {
                Some(w) => report.push(i, Verdict::Fail, Some(w)),
                None => report.push(i, Verdict::Pass, None),
            }
        }
        Ok(report)
    }

    fn associativity_witness(&self, i: i32) -> Option<String> {
        for j in self.degrees() {
            if self.table(i, j).is_none() {
                continue;
            }
            for k in self.degrees() {
                if self.table(j, k).is_none() || self.table(i + j, k).is_none() {
                    continue;
                }
                for a in 0..self.dim(i) {
                    for b in 0..self.dim(j) {
                        let ab = self.basis_product(i, a, j, b).unwrap();
                        for c in 0..self.dim(k) {
                            let lhs = self.mul_hom(i + j, ab, k, &unit_vector(self.dim(k), c)).unwrap();
                            let bc = self.basis_product(j, b, k, c).unwrap();
                            let rhs = self.mul_hom(i, &unit_vector(self.dim(i), a), j + k, bc).unwrap();
                            if lhs != rhs {
                                return Some(format!(
                                    "({} {}) {} != {} ({} {})",
                                    self.label(i, a),
                                    self.label(j, b),
                                    self.label(k, c),
                                    self.label(i, a),
                                    self.label(j, b),
                                    self.label(k, c)
                                ));
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// Bilinear product of (possibly inhomogeneous) elements.
    pub fn multiply(&self, a: &GradedElement, b: &GradedElement) -> Result<GradedElement> {
        let mut out = GradedElement::zero();
        for (&i, x) in &a.components {
            if is_zero(x) {
                continue;
            }
            for (&j, y) in &b.components {
                if is_zero(y) {
                    continue;
                }
                let prod = self.mul_hom(i, x, j, y).ok_or(Error::OutOfWindow(i, j))?;
                out.add_component(self.field, i + j, &prod);
            }
        }
        Ok(out)
    }

    /// Window-certified centrality of a homogeneous element.
    pub fn is_central(&self, z: &GradedElement) -> Result<CertifiedReport> {
        let (k, zv) = z.homogeneous(self)?;
        let mut report = CertifiedReport::new("is_central");
        for i in self.degrees() {
            if self.dim(i) == 0 {
                report.push(i, Verdict::Pass, None);
                continue;
            }
            if !self.in_window(i + k) {
                report.push(i, Verdict::OutOfWindow, None);
                continue;
            }
            let mut witness = None;
            for a in 0..self.dim(i) {
                let e = unit_vector(self.dim(i), a);
                if self.mul_hom(k, &zv, i, &e) != self.mul_hom(i, &e, k, &zv) {
                    witness = Some(format!("z {} != {} z", self.label(i, a), self.label(i, a)));
                    break;
                }
            }
            match witness {
                Some(w) => report.push(i, Verdict::Fail, Some(w)),
                None => report.push(i, Verdict::Pass, None),
            }
        }
        Ok(report)
    }

    /// Image `r S` (left) or `S r` (right). Source degrees whose image leaves
    /// the window are listed in `escaped`.
    pub fn act(&self, r: &GradedElement, s: &GradedSubspace, side: Side) -> Result<Image> {
        let (k, rv) = r.homogeneous(self)?;
        let mut image = GradedSubspace::zero(self);
        let mut escaped = Vec::new();
        for d in self.degrees() {
            if s.dim(d) == 0 {
                continue;
            }
            let Some(m) = self.mult_matrix(side, k, &rv, d) else {
                escaped.push(d);
                continue;
            };
            for v in s.basis(d) {
                image.insert(d + k, &m.mul_vec(&v));
            }
        }
        Ok(Image { subspace: image, escaped })
    }
}

/// Result of [`WindowedGradedAlgebra::act`].
#[derive(Clone, Debug)]
pub struct Image {
    pub subspace: GradedSubspace,
    pub escaped: Vec<i32>,
}

pub fn unit_vector(n: usize, k: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[k] = 1;
    v
}

/// Element of a windowed graded algebra, stored by degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedElement {
    pub components: BTreeMap<i32, Vec<u32>>,
}

impl GradedElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn homogeneous_of(degree: i32, coeffs: Vec<u32>) -> Self {
        let mut components = BTreeMap::new();
        components.insert(degree, coeffs);
        GradedElement { components }
    }

    pub fn basis(alg: &WindowedGradedAlgebra, degree: i32, idx: usize) -> Self {
        Self::homogeneous_of(degree, unit_vector(alg.dim(degree), idx))
    }

    pub fn one(alg: &WindowedGradedAlgebra) -> Self {
        Self::homogeneous_of(0, alg.unit().to_vec())
    }

    pub fn add_component(&mut self, field: PrimeField, degree: i32, v: &[u32]) {
        let entry = self.components.entry(degree).or_insert_with(|| vec![0; v.len()]);
        axpy(field, entry, 1, v);
    }

    pub fn add(&self, field: PrimeField, other: &GradedElement) -> GradedElement {
        let mut out = self.clone();
        for (&d, v) in &other.components {
            out.add_component(field, d, v);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(|v| is_zero(v))
    }

    /// Degree and coefficients of a homogeneous element, with lengths checked.
    pub fn homogeneous(&self, alg: &WindowedGradedAlgebra) -> Result<(i32, Vec<u32>)> {
        let nonzero: Vec<_> = self.components.iter().filter(|(_, v)| !is_zero(v)).collect();
        let (d, v) = match nonzero.as_slice() {
            [(d, v)] => (**d, (*v).clone()),
            [] if self.components.len() == 1 => {
                let (d, v) = self.components.iter().next().unwrap();
                (*d, v.clone())
            }
            _ => return Err(Error::NotHomogeneous),
        };
        if !alg.in_window(d) || v.len() != alg.dim(d) {
            return Err(Error::DimensionMismatch(format!("element of degree {d} with {} coefficients", v.len())));
        }
        Ok((d, v))
    }

    /// Canonical form without zero components.
    pub fn normalized(&self) -> GradedElement {
        GradedElement { components: self.components.iter().filter(|(_, v)| !is_zero(v)).map(|(d, v)| (*d, v.clone())).collect() }
    }
}

/// Per-degree subspaces of a windowed graded algebra, each in reduced echelon form.
///
/// `uncertain` lists degrees where a truncated computation only produced a
/// lower bound.
#[derive(Clone, Debug)]
pub struct GradedSubspace {
    field: PrimeField,
    d_min: i32,
    spaces: Vec<EchelonSpace>,
    pub uncertain: BTreeSet<i32>,
}

impl PartialEq for GradedSubspace {
    fn eq(&self, other: &Self) -> bool {
        self.d_min == other.d_min
            && self.spaces.len() == other.spaces.len()
            && (0..self.spaces.len()).all(|k| self.spaces[k].basis() == other.spaces[k].basis())
            && self.uncertain == other.uncertain
    }
}

impl GradedSubspace {
    pub fn zero(alg: &WindowedGradedAlgebra) -> Self {
        GradedSubspace {
            field: alg.field(),
            d_min: alg.window().0,
            spaces: alg.degrees().map(|d| EchelonSpace::new(alg.field(), alg.dim(d))).collect(),
            uncertain: BTreeSet::new(),
        }
    }

    /// All of `A` in the degrees where `keep` holds, zero elsewhere.
    pub fn full_where(alg: &WindowedGradedAlgebra, keep: impl Fn(i32) -> bool) -> Self {
        let mut s = Self::zero(alg);
        for d in alg.degrees().filter(|&d| keep(d)) {
            for k in 0..alg.dim(d) {
                s.insert(d, &unit_vector(alg.dim(d), k));
            }
        }
        s
    }

    pub fn full(alg: &WindowedGradedAlgebra) -> Self {
        Self::full_where(alg, |_| true)
    }

    fn idx(&self, d: i32) -> Option<usize> {
        let k = d - self.d_min;
        (k >= 0 && (k as usize) < self.spaces.len()).then_some(k as usize)
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.d_min..=self.d_min + self.spaces.len() as i32 - 1
    }

    pub fn dim(&self, d: i32) -> usize {
        self.idx(d).map_or(0, |k| self.spaces[k].dim())
    }

    pub fn ambient_dim(&self, d: i32) -> usize {
        self.idx(d).map_or(0, |k| self.spaces[k].ambient())
    }

    pub fn is_full(&self, d: i32) -> bool {
        self.dim(d) == self.ambient_dim(d)
    }

    /// Adds a vector at degree `d`; returns whether the subspace grew.
    pub fn insert(&mut self, d: i32, v: &[u32]) -> bool {
        match self.idx(d) {
            Some(k) => self.spaces[k].insert(v),
            None => false,
        }
    }

    pub fn contains(&self, d: i32, v: &[u32]) -> bool {
        self.idx(d).map_or(is_zero(v), |k| self.spaces[k].contains(v))
    }

    /// Canonical basis vectors at degree `d`.
    pub fn basis(&self, d: i32) -> Vec<Vec<u32>> {
        self.idx(d).map_or_else(Vec::new, |k| self.spaces[k].basis())
    }

    /// Basis as the columns of a matrix.
    pub fn basis_matrix(&self, d: i32) -> Matrix {
        Matrix::from_columns(self.field, self.ambient_dim(d), &self.basis(d))
    }

    pub fn space(&self, d: i32) -> Option<&EchelonSpace> {
        self.idx(d).map(|k| &self.spaces[k])
    }

    pub fn set_space(&mut self, d: i32, space: EchelonSpace) {
        if let Some(k) = self.idx(d) {
            self.spaces[k] = space;
        }
    }

    /// `self` and `other` span the same subspace at degree `d`.
    pub fn same_at(&self, other: &GradedSubspace, d: i32) -> bool {
        self.basis(d) == other.basis(d)
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.degrees().map(|d| (d, self.dim(d))).collect()
    }
}

// ---------------------------------------------------------------------------
// File format

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub field_char: u64,
    pub window: [i32; 2],
    pub dims: BTreeMap<i32, usize>,
    pub unit: Vec<i64>,
    #[serde(default)]
    pub mult: Vec<MultBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<i32, Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultBlock {
    pub i: i32,
    pub j: i32,
    pub table: Vec<Vec<Vec<i64>>>,
}

impl WindowedGradedAlgebra {
    pub fn from_file(file: &AlgebraFile) -> Result<Self> {
        let field = PrimeField::new(file.field_char)?;
        let unit = file.unit.iter().map(|&x| field.reduce(x)).collect();
        let mut alg = WindowedGradedAlgebra::new(field, (file.window[0], file.window[1]), &file.dims, unit)?;
        let mut seen = BTreeSet::new();
        for block in &file.mult {
            let (i, j) = (block.i, block.j);
            if !seen.insert((i, j)) {
                return Err(Error::Parse(format!("duplicate mult block ({i}, {j})")));
            }
            if alg.slot(i, j).is_none() {
                return Err(Error::Parse(format!("mult block ({i}, {j}) lies outside the window")));
            }
            let (di, dj, dk) = (alg.dim(i), alg.dim(j), alg.dim(i + j));
            if block.table.len() != di || block.table.iter().any(|r| r.len() != dj || r.iter().any(|v| v.len() != dk)) {
                return Err(Error::Parse(format!("mult block ({i}, {j}) must have shape {di}x{dj}x{dk}")));
            }
            let data = block.table.iter().flatten().flatten().map(|&x| field.reduce(x)).collect();
            alg.set_table(i, j, Matrix::from_data(field, di * dj, dk, data)?)?;
        }
        if let Some(l) = &file.labels {
            alg.set_labels(l.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        }
        Ok(alg)
    }

    /// File representation; all-zero blocks are omitted.
    pub fn to_file(&self) -> AlgebraFile {
        let mut mult = Vec::new();
        for i in self.degrees() {
            for j in self.degrees() {
                let Some(t) = self.table(i, j) else { continue };
                if t.is_zero() {
                    continue;
                }
                let (dj, dk) = (self.dim(j), self.dim(i + j));
                let table = (0..self.dim(i))
                    .map(|a| (0..dj).map(|b| t.row(a * dj + b).iter().map(|&x| x as i64).collect()).collect())
                    .collect();
                debug_assert!(dk == t.cols());
                mult.push(MultBlock { i, j, table });
            }
        }
        AlgebraFile {
            field_char: self.field.p() as u64,
            window: [self.d_min, self.d_max],
            dims: self.dims(),
            unit: self.unit.iter().map(|&x| x as i64).collect(),
            mult,
            labels: self.labels.clone(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: AlgebraFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }
}
