use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use gtl::duality::{find_selfdual_functional, nondegenerate_products, selfdual_check, SearchStrategy};
use gtl::exactlin::{Matrix, PrimeField};
use gtl::gallery::{self, build_truncated_ci, TruncatedCISpec};
use gtl::graded::{GradedElement, WindowedGradedAlgebra};
use gtl::report::CertifiedReport;
use gtl::stmod::{ordinary_ext_dims, tate_ring, FDAlgebra, FDModule};
use gtl::structure::{check_periodicity, negative_product_sweep, regularity, tor_part, verify_depth1, verify_depth2};
use gtl::Error;

create_exception!(gtl_py, PreconditionError, PyException, "A hypothesis of the requested check is not met.");

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Precondition(m) => PreconditionError::new_err(m),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn field(p: u64) -> PyResult<PrimeField> {
    PrimeField::new(p).map_err(py_err)
}

fn matrix(p: u64, rows: Vec<Vec<i64>>) -> PyResult<Matrix> {
    Matrix::from_rows(field(p)?, &rows).map_err(py_err)
}

#[pyfunction]
fn rank(p: u64, rows: Vec<Vec<i64>>) -> PyResult<usize> {
    Ok(matrix(p, rows)?.rank())
}

#[pyfunction]
fn kernel_basis(p: u64, rows: Vec<Vec<i64>>) -> PyResult<Vec<Vec<u32>>> {
    Ok(matrix(p, rows)?.kernel_basis())
}

/// Some `x` with `M x = b`, or None.
#[pyfunction]
fn solve(p: u64, rows: Vec<Vec<i64>>, b: Vec<i64>) -> PyResult<Option<Vec<u32>>> {
    let f = field(p)?;
    let b: Vec<u32> = b.iter().map(|&x| f.reduce(x)).collect();
    matrix(p, rows)?.solve(&b).map_err(py_err)
}

#[pyclass(name = "Report", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyReport(CertifiedReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn passed(&self) -> bool {
        self.0.passed()
    }

    #[getter]
    fn check(&self) -> String {
        self.0.check.clone()
    }

    /// `(degree, verdict)` pairs of the top level.
    fn verdicts(&self) -> Vec<(i32, Option<i32>, String)> {
        self.0.per_degree.iter().map(|d| (d.i, d.j, d.verdict.to_string())).collect()
    }

    fn render(&self) -> String {
        self.0.render()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("serializable")
    }

    fn __repr__(&self) -> String {
        format!("Report({}, passed={})", self.0.check, self.0.passed())
    }
}

#[pyclass(name = "GradedAlgebra", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraded(WindowedGradedAlgebra);

impl PyGraded {
    fn element(&self, degree: i32, coeffs: Vec<i64>) -> PyResult<GradedElement> {
        let f = self.0.field();
        if !self.0.in_window(degree) || coeffs.len() != self.0.dim(degree) {
            return Err(PyValueError::new_err(format!("need {} coefficients in degree {degree}", self.0.dim(degree))));
        }
        Ok(GradedElement::homogeneous_of(degree, coeffs.iter().map(|&x| f.reduce(x)).collect()))
    }

    /// Element by label or `e[d][i]`.
    fn named(&self, name: &str) -> PyResult<GradedElement> {
        let (d, k) = self.0.find_label(name).ok_or_else(|| PyValueError::new_err(format!("no element named {name:?}")))?;
        Ok(GradedElement::basis(&self.0, d, k))
    }
}

#[pymethods]
impl PyGraded {
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        WindowedGradedAlgebra::from_json(s).map(PyGraded).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn p(&self) -> u32 {
        self.0.field().p()
    }

    #[getter]
    fn window(&self) -> (i32, i32) {
        self.0.window()
    }

    fn dims(&self) -> BTreeMap<i32, usize> {
        self.0.dims()
    }

    fn dim(&self, degree: i32) -> usize {
        self.0.dim(degree)
    }

    fn label(&self, degree: i32, idx: usize) -> String {
        self.0.label(degree, idx)
    }

    /// Product of basis elements, or None outside the window.
    fn basis_product(&self, i: i32, a: usize, j: i32, b: usize) -> Option<Vec<u32>> {
        self.0.basis_product(i, a, j, b).map(<[u32]>::to_vec)
    }

    fn multiply(&self, i: i32, x: Vec<i64>, j: i32, y: Vec<i64>) -> PyResult<Vec<u32>> {
        let x = self.element(i, x)?;
        let y = self.element(j, y)?;
        let z = self.0.multiply(&x, &y).map_err(py_err)?;
        Ok(z.components.get(&(i + j)).cloned().unwrap_or_else(|| vec![0; self.0.dim(i + j)]))
    }

    fn validate(&self) -> PyResult<PyReport> {
        self.0.validate().map(PyReport).map_err(py_err)
    }

    fn is_central(&self, name: &str) -> PyResult<PyReport> {
        self.0.is_central(&self.named(name)?).map(PyReport).map_err(py_err)
    }

    fn nondegenerate_products(&self, n: i32) -> PyReport {
        PyReport(nondegenerate_products(&self.0, n).to_report())
    }

    fn selfdual_check(&self, n: i32, functional: Vec<i64>) -> PyResult<PyReport> {
        let f = self.0.field();
        let l: Vec<u32> = functional.iter().map(|&x| f.reduce(x)).collect();
        selfdual_check(&self.0, n, &l).map(PyReport).map_err(py_err)
    }

    /// Exhaustive search unless `seed` is given.
    #[pyo3(signature = (n, seed=None, samples=1000))]
    fn find_selfdual_functional(&self, n: i32, seed: Option<u64>, samples: usize) -> PyResult<Option<Vec<u32>>> {
        let strategy = match seed {
            Some(seed) => SearchStrategy::Randomized { seed, samples },
            None => SearchStrategy::Exhaustive,
        };
        Ok(find_selfdual_functional(&self.0, n, strategy).map_err(py_err)?.functional)
    }

    fn regularity(&self, name: &str) -> PyResult<bool> {
        Ok(regularity(&self.0, &self.named(name)?).map_err(py_err)?.passed())
    }

    /// Per-degree dimensions of the torsion, and the degrees where it is only a lower bound.
    fn tor_part(&self, name: &str) -> PyResult<(BTreeMap<i32, usize>, Vec<i32>)> {
        let t = tor_part(&self.0, &self.named(name)?).map_err(py_err)?;
        Ok((t.dims(), t.uncertain.iter().copied().collect()))
    }

    fn check_periodicity(&self, name: &str) -> PyResult<PyReport> {
        check_periodicity(&self.0, &self.named(name)?).map(PyReport).map_err(py_err)
    }

    fn verify_depth1(&self, r: &str, n: i32) -> PyResult<PyReport> {
        verify_depth1(&self.0, &self.named(r)?, n).map(PyReport).map_err(py_err)
    }

    #[pyo3(signature = (r, rtilde, n, functional=None))]
    fn verify_depth2(&self, r: &str, rtilde: &str, n: i32, functional: Option<Vec<i64>>) -> PyResult<PyReport> {
        let f = self.0.field();
        let l: Option<Vec<u32>> = functional.map(|v| v.iter().map(|&x| f.reduce(x)).collect());
        verify_depth2(&self.0, &self.named(r)?, &self.named(rtilde)?, n, l.as_deref()).map(PyReport).map_err(py_err)
    }

    /// Nonzero products `x y` with `|x| <= n`, `|y| < 0`.
    fn negative_product_sweep(&self, n: i32) -> (usize, Vec<(i32, usize, i32, usize)>) {
        let s = negative_product_sweep(&self.0, n);
        (s.pairs_checked, s.nonzero)
    }

    fn __repr__(&self) -> String {
        format!("GradedAlgebra(p={}, window={:?}, dims={:?})", self.0.field().p(), self.0.window(), self.0.dims())
    }
}

#[pyclass(name = "FDAlgebra", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFD(FDAlgebra);

#[pymethods]
impl PyFD {
    /// `k[x1..xc]/(x1^a1, ..., xc^ac)` over `F_p`.
    #[staticmethod]
    fn truncated(p: u64, exponents: Vec<usize>) -> PyResult<Self> {
        build_truncated_ci(&TruncatedCISpec::new(p, &exponents)).map(PyFD).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        FDAlgebra::from_json(s).map(PyFD).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn p(&self) -> u32 {
        self.0.field().p()
    }

    fn mul(&self, x: Vec<i64>, y: Vec<i64>) -> PyResult<Vec<u32>> {
        let f = self.0.field();
        if x.len() != self.0.dim() || y.len() != self.0.dim() {
            return Err(PyValueError::new_err(format!("vectors must have length {}", self.0.dim())));
        }
        let r = |v: &[i64]| v.iter().map(|&a| f.reduce(a)).collect::<Vec<u32>>();
        Ok(self.0.mul(&r(&x), &r(&y)))
    }

    fn enveloping(&self) -> Self {
        PyFD(self.0.enveloping())
    }

    fn validate_symmetric(&self) -> PyReport {
        PyReport(self.0.validate_symmetric())
    }

    /// Tate cohomology ring of the residue field, or of the algebra over its
    /// enveloping algebra with `hochschild=True`.
    #[pyo3(signature = (lo, hi, hochschild=false, depth=None))]
    fn tate_ring(&self, py: Python<'_>, lo: i32, hi: i32, hochschild: bool, depth: Option<usize>) -> PyResult<PyGraded> {
        let alg = &self.0;
        py.detach(|| {
            if hochschild {
                let env = alg.enveloping();
                let m = FDModule::bimodule(alg, &env)?;
                tate_ring(&env, &m, (lo, hi), depth)
            } else {
                tate_ring(alg, &FDModule::residue_field(alg), (lo, hi), depth)
            }
        })
        .map(|t| PyGraded(t.ring))
        .map_err(py_err)
    }

    fn ordinary_ext_dims(&self, max_n: usize) -> Vec<usize> {
        ordinary_ext_dims(&self.0, &FDModule::residue_field(&self.0), max_n)
    }

    fn __repr__(&self) -> String {
        format!("FDAlgebra(p={}, dim={})", self.0.field().p(), self.0.dim())
    }
}

#[pyfunction]
fn laurent(p: u64, lo: i32, hi: i32) -> PyResult<PyGraded> {
    gallery::laurent(field(p)?, (lo, hi)).map(PyGraded).map_err(py_err)
}

#[pyfunction]
fn dual_numbers(p: u64) -> PyResult<PyGraded> {
    gallery::dual_numbers_graded(field(p)?).map(PyGraded).map_err(py_err)
}

#[pyfunction]
fn trivial_extension(p: u64, c: usize, lo: i32, hi: i32) -> PyResult<PyGraded> {
    gallery::trivial_extension(field(p)?, c, (lo, hi)).map(PyGraded).map_err(py_err)
}

#[pyfunction]
fn expected_tate_hh_dim(a: usize, p: u64) -> usize {
    gallery::expected_tate_hh_dim(a, p)
}

#[pyfunction]
fn expected_ext_dim_ci(c: usize, n: usize) -> usize {
    gallery::expected_ext_dim_ci(c, n)
}

#[pyfunction]
fn expected_hh0_dim(exponents: Vec<usize>, p: u64) -> usize {
    gallery::expected_hh0_dim(&exponents, p)
}

/// Rows `(item, computed, expected, matched)` of a gallery reproduction.
#[pyfunction]
fn reproduce(py: Python<'_>, name: &str) -> PyResult<Vec<(String, String, String, bool)>> {
    let rows = py.detach(|| gtl::cli::reproduce_rows(name)).map_err(py_err)?;
    Ok(rows.into_iter().map(|r| (r.item, r.computed, r.expected, r.matched)).collect())
}

#[pymodule]
fn gtl_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PreconditionError", m.py().get_type::<PreconditionError>())?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyGraded>()?;
    m.add_class::<PyFD>()?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_basis, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(laurent, m)?)?;
    m.add_function(wrap_pyfunction!(dual_numbers, m)?)?;
    m.add_function(wrap_pyfunction!(trivial_extension, m)?)?;
    m.add_function(wrap_pyfunction!(expected_tate_hh_dim, m)?)?;
    m.add_function(wrap_pyfunction!(expected_ext_dim_ci, m)?)?;
    m.add_function(wrap_pyfunction!(expected_hh0_dim, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    Ok(())
}
