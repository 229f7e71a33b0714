use crate::error::{Error, Result};
use crate::exactlin::{EchelonSpace, Matrix, PrimeField, Solver};

use super::algebra::{combine, FDAlgebra};

/// Left module given by the action matrix of every algebra basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FDModule {
    dim: usize,
    action: Vec<Matrix>,
}

impl FDModule {
    /// Checks `ρ(1) = id` and `ρ(e_a) ρ(e_b) = ρ(e_a e_b)`.
    pub fn new(alg: &FDAlgebra, action: Vec<Matrix>) -> Result<Self> {
        if action.len() != alg.dim() {
            return Err(Error::DimensionMismatch(format!("{} action matrices for an algebra of dimension {}", action.len(), alg.dim())));
        }
        let dim = action.first().map_or(0, |m| m.rows());
        if action.iter().any(|m| m.rows() != dim || m.cols() != dim || m.field() != alg.field()) {
            return Err(Error::DimensionMismatch("action matrices must be square of equal size".into()));
        }
        let m = FDModule { dim, action };
        if m.act(alg.unit()) != Matrix::identity(alg.field(), dim) {
            return Err(Error::Precondition("the unit does not act as the identity".into()));
        }
        for a in 0..alg.dim() {
            for b in 0..alg.dim() {
                if m.action[a].mul(&m.action[b]) != m.act(&alg.left(a).column(b)) {
                    return Err(Error::Precondition(format!("action fails to respect the product of basis pair ({a}, {b})")));
                }
            }
        }
        Ok(m)
    }

    pub(crate) fn trusted(dim: usize, action: Vec<Matrix>) -> Self {
        FDModule { dim, action }
    }

    pub fn zero(alg: &FDAlgebra) -> Self {
        FDModule { dim: 0, action: vec![Matrix::zeros(alg.field(), 0, 0); alg.dim()] }
    }

    /// The residue field `k = Λ/J`.
    pub fn residue_field(alg: &FDAlgebra) -> Self {
        let f = alg.field();
        let action = alg.augmentation().iter().map(|&c| Matrix::from_data(f, 1, 1, vec![c]).expect("1x1")).collect();
        FDModule { dim: 1, action }
    }

    /// `Λ^r` with the left regular action on each summand.
    pub fn free(alg: &FDAlgebra, r: usize) -> Self {
        let action = (0..alg.dim()).map(|a| block_diag(alg.left(a), r)).collect();
        FDModule { dim: alg.dim() * r, action }
    }

    /// `Λ` as a module over `env = Λ ⊗ Λ^op` by `(a ⊗ b) · m = a m b`.
    pub fn bimodule(alg: &FDAlgebra, env: &FDAlgebra) -> Result<Self> {
        let d = alg.dim();
        if env.dim() != d * d {
            return Err(Error::DimensionMismatch("the second algebra is not the enveloping algebra".into()));
        }
        let mut action = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                action.push(alg.left(a).mul(alg.right(b)));
            }
        }
        Ok(FDModule { dim: d, action })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action(&self, a: usize) -> &Matrix {
        &self.action[a]
    }

    pub fn field(&self) -> Option<PrimeField> {
        self.action.first().map(|m| m.field())
    }

    /// `ρ(x)` for an algebra element `x`.
    pub fn act(&self, x: &[u32]) -> Matrix {
        let f = self.action[0].field();
        combine(f, self.dim, &self.action, x)
    }

    /// The vector-space dual with transposed action, a module over the opposite algebra.
    pub fn dual(&self) -> FDModule {
        FDModule { dim: self.dim, action: self.action.iter().map(|m| m.transpose()).collect() }
    }

    /// `J M` as a subspace of `M`.
    pub fn radical_image(&self, alg: &FDAlgebra) -> EchelonSpace {
        let mut s = EchelonSpace::new(alg.field(), self.dim);
        for j in alg.radical() {
            let m = self.act(j);
            for c in m.columns() {
                if s.dim() == self.dim {
                    return s;
                }
                s.insert(&c);
            }
        }
        s
    }
}

fn block_diag(m: &Matrix, r: usize) -> Matrix {
    let n = m.rows();
    let mut out = Matrix::zeros(m.field(), n * r, n * r);
    for s in 0..r {
        for i in 0..n {
            for j in 0..n {
                out.set(s * n + i, s * n + j, m.get(i, j));
            }
        }
    }
    out
}

/// Minimal free cover `π: Λ^r -> M` and its kernel `ΩM`.
///
/// Free coordinates are `s * dim Λ + a` for `e_a` in summand `s`; summand `s`
/// maps its generator to the standard basis vector `gens[s]` of `M`.
#[derive(Clone, Debug)]
pub struct Cover {
    pub gens: Vec<usize>,
    pub pi: Matrix,
    pub iota: Matrix,
    pub sigma: Matrix,
    pub kernel: FDModule,
    pi_solver: Solver,
    iota_solver: Solver,
}

impl Cover {
    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    /// Some `x` in the free module with `π x = y`.
    pub fn lift(&self, y: &[u32]) -> Option<Vec<u32>> {
        self.pi_solver.solve(y)
    }

    /// Coordinates in `ΩM` of an element of the free module lying in the kernel.
    pub fn kernel_coords(&self, x: &[u32]) -> Option<Vec<u32>> {
        self.iota_solver.solve(x)
    }
}

/// Minimal cover; generators are the lowest standard basis vectors
/// independent modulo `J M`.
pub fn cover(alg: &FDAlgebra, m: &FDModule) -> Cover {
    let f = alg.field();
    let d = alg.dim();
    let mut span = m.radical_image(alg);
    let mut gens = Vec::new();
    for s in 0..m.dim() {
        if span.dim() == m.dim() {
            break;
        }
        let mut e = vec![0u32; m.dim()];
        e[s] = 1;
        if span.insert(&e) {
            gens.push(s);
        }
    }
    let r = gens.len();
    let mut cols = Vec::with_capacity(d * r);
    for &g in &gens {
        for a in 0..d {
            cols.push(m.action(a).column(g));
        }
    }
    let pi = Matrix::from_columns(f, m.dim(), &cols);
    let kernel_vectors = pi.kernel_basis();
    let iota = Matrix::from_columns(f, d * r, &kernel_vectors);
    let iota_solver = Solver::new(&iota);
    let pi_solver = Solver::new(&pi);
    let sigma_cols: Vec<Vec<u32>> = (0..m.dim())
        .map(|i| {
            let mut e = vec![0u32; m.dim()];
            e[i] = 1;
            pi_solver.solve(&e).expect("minimal cover is surjective")
        })
        .collect();
    let sigma = Matrix::from_columns(f, d * r, &sigma_cols);
    let k = kernel_vectors.len();
    let action = (0..d)
        .map(|a| {
            let la = alg.left(a);
            let cols: Vec<Vec<u32>> = kernel_vectors
                .iter()
                .map(|v| {
                    let image = free_act(la, v, r);
                    iota_solver.solve(&image).expect("kernel is a submodule")
                })
                .collect();
            Matrix::from_columns(f, k, &cols)
        })
        .collect();
    Cover { gens, pi, iota, sigma, kernel: FDModule::trusted(k, action), pi_solver, iota_solver }
}

/// `l` applied blockwise to a vector of `Λ^r`.
fn free_act(l: &Matrix, v: &[u32], r: usize) -> Vec<u32> {
    let d = l.rows();
    let mut out = Vec::with_capacity(d * r);
    for s in 0..r {
        out.extend(l.mul_vec(&v[s * d..(s + 1) * d]));
    }
    out
}

/// Syzygy `ΩM` with its cover data.
pub fn syzygy(alg: &FDAlgebra, m: &FDModule) -> Cover {
    cover(alg, m)
}

/// `Ω^{-1} M` as the cokernel of `embed: M -> F`, with `quotient: F -> Ω^{-1} M`.
#[derive(Clone, Debug)]
pub struct Cosyzygy {
    pub module: FDModule,
    pub embed: Matrix,
    pub quotient: Matrix,
}

/// `D Ω_{Λ^op} D M`; requires a symmetrizing functional so that `D Λ` is free.
pub fn cosyzygy(alg: &FDAlgebra, m: &FDModule) -> Result<Cosyzygy> {
    if alg.symmetrizing().is_none() {
        return Err(Error::Precondition("cosyzygies need a symmetrizing functional".into()));
    }
    let op = alg.opposite();
    let c = cover(&op, &m.dual());
    Ok(Cosyzygy { module: c.kernel.dual(), embed: c.pi.transpose(), quotient: c.iota.transpose() })
}

/// `Ωf: ΩX -> ΩY` for `f: X -> Y`, by lifting generator images through the cover of `Y`.
pub fn syzygy_map(alg: &FDAlgebra, xc: &Cover, yc: &Cover, f: &Matrix) -> Result<Matrix> {
    let d = alg.dim();
    let field = alg.field();
    let ry = yc.rank();
    let lifts: Vec<Vec<u32>> = xc
        .gens
        .iter()
        .map(|&g| yc.lift(&f.column(g)).ok_or_else(|| Error::Internal("cover is not surjective".into())))
        .collect::<Result<_>>()?;
    let mut cols = Vec::with_capacity(xc.iota.cols());
    for v in xc.iota.columns() {
        let mut image = vec![0u32; d * ry];
        for (s, y) in lifts.iter().enumerate() {
            let vs = &v[s * d..(s + 1) * d];
            if vs.iter().all(|&x| x == 0) {
                continue;
            }
            let l = alg.left_matrix(vs);
            for t in 0..ry {
                let part = l.mul_vec(&y[t * d..(t + 1) * d]);
                for (k, x) in part.into_iter().enumerate() {
                    image[t * d + k] = field.add(image[t * d + k], x);
                }
            }
        }
        cols.push(yc.kernel_coords(&image).ok_or_else(|| Error::Internal("lifted map leaves the syzygy".into()))?);
    }
    Ok(Matrix::from_columns(field, yc.kernel.dim(), &cols))
}

/// Coordinates of a homomorphism `X -> Y`: the images of the cover generators of `X`, concatenated.
pub fn hom_coords(xc: &Cover, h: &Matrix) -> Vec<u32> {
    xc.gens.iter().flat_map(|&g| h.column(g)).collect()
}

/// Basis of `Hom_Λ(X, Y)` in generator coordinates.
///
/// The unknowns are the images `y_s` of the generators; the induced map on
/// the free cover must kill the syzygy, i.e. `Σ_s k_s y_s = 0` for every
/// kernel vector `k`.
pub fn hom_basis(alg: &FDAlgebra, xc: &Cover, y: &FDModule) -> Vec<Vec<u32>> {
    let d = alg.dim();
    let f = alg.field();
    let (rx, n) = (xc.rank(), y.dim());
    if rx == 0 || n == 0 {
        return Vec::new();
    }
    let kcols = xc.iota.columns();
    let mut system = Matrix::zeros(f, kcols.len() * n, rx * n);
    for (c, k) in kcols.iter().enumerate() {
        for s in 0..rx {
            let ks = &k[s * d..(s + 1) * d];
            if ks.iter().all(|&x| x == 0) {
                continue;
            }
            let block = y.act(ks);
            for i in 0..n {
                for j in 0..n {
                    system.set(c * n + i, s * n + j, block.get(i, j));
                }
            }
        }
    }
    system.kernel_basis()
}

/// The homomorphism with the given generator images, as a `dim Y x dim X` matrix.
pub fn hom_from_coords(alg: &FDAlgebra, xc: &Cover, y: &FDModule, coords: &[u32]) -> Matrix {
    let d = alg.dim();
    let f = alg.field();
    let n = y.dim();
    let cols: Vec<Vec<u32>> = xc
        .sigma
        .columns()
        .iter()
        .map(|sig| {
            let mut out = vec![0u32; n];
            for s in 0..xc.rank() {
                let part = &sig[s * d..(s + 1) * d];
                if part.iter().all(|&x| x == 0) {
                    continue;
                }
                let v = y.act(part).mul_vec(&coords[s * n..(s + 1) * n]);
                for (o, x) in out.iter_mut().zip(v) {
                    *o = f.add(*o, x);
                }
            }
            out
        })
        .collect();
    Matrix::from_columns(f, n, &cols)
}

/// `Hom_Λ(X, Y)` modulo maps factoring through a projective.
#[derive(Clone, Debug)]
pub struct StableHom {
    pub source_dim: usize,
    pub target_dim: usize,
    gens: Vec<usize>,
    /// Canonical complement basis of the projective-factoring maps.
    pub reps: Vec<Matrix>,
    pub rep_coords: Vec<Vec<u32>>,
    /// Basis of the projective-factoring maps in generator coordinates.
    pub phom: Vec<Vec<u32>>,
    pub hom_dim: usize,
    solver: Solver,
}

impl StableHom {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Generator coordinates of a homomorphism out of the source.
    pub fn coords(&self, h: &Matrix) -> Vec<u32> {
        self.gens.iter().flat_map(|&g| h.column(g)).collect()
    }

    /// Coefficients of `h` on [`StableHom::reps`] modulo projective-factoring maps.
    pub fn reduce(&self, h: &Matrix) -> Option<Vec<u32>> {
        let mut x = self.solver.solve(&self.coords(h))?;
        x.truncate(self.dim());
        Some(x)
    }
}

/// Stable Hom from precomputed covers; projective-factoring maps are those
/// of the form `π_Y β` for `β: X -> F_Y`.
pub fn stable_hom_with(alg: &FDAlgebra, x: &FDModule, xc: &Cover, y: &FDModule, yc: &Cover) -> StableHom {
    let f = alg.field();
    let n = y.dim();
    let rx = xc.rank();
    let homs = hom_basis(alg, xc, y);
    let free = FDModule::free(alg, yc.rank());
    let fd = free.dim();
    let mut pspace = EchelonSpace::new(f, rx * n);
    for beta in hom_basis(alg, xc, &free) {
        let pushed: Vec<u32> = (0..rx).flat_map(|s| yc.pi.mul_vec(&beta[s * fd..(s + 1) * fd])).collect();
        pspace.insert(&pushed);
    }
    let phom = pspace.basis();
    let mut chosen = Vec::new();
    for h in &homs {
        if pspace.insert(h) {
            chosen.push(h.clone());
        }
    }
    let mut cols = chosen.clone();
    cols.extend(phom.iter().cloned());
    let solver = Solver::new(&Matrix::from_columns(f, rx * n, &cols));
    let reps = chosen.iter().map(|c| hom_from_coords(alg, xc, y, c)).collect();
    StableHom { source_dim: x.dim(), target_dim: n, gens: xc.gens.clone(), reps, rep_coords: chosen, phom, hom_dim: homs.len(), solver }
}

pub fn stable_hom(alg: &FDAlgebra, x: &FDModule, y: &FDModule) -> StableHom {
    let xc = cover(alg, x);
    let yc = cover(alg, y);
    stable_hom_with(alg, x, &xc, y, &yc)
}

/// `f` commutes with the action: `f ρ_X(e_a) = ρ_Y(e_a) f` for every basis element.
pub fn is_homomorphism(x: &FDModule, y: &FDModule, f: &Matrix) -> bool {
    x.action.iter().zip(&y.action).all(|(ax, ay)| f.mul(ax) == ay.mul(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build_truncated_ci, TruncatedCISpec};

    fn trunc(p: u64, ex: &[usize]) -> FDAlgebra {
        build_truncated_ci(&TruncatedCISpec::new(p, ex)).unwrap()
    }

    #[test]
    fn syzygy_examples() {
        let a = trunc(2, &[2]);
        assert_eq!(syzygy(&a, &FDModule::free(&a, 2)).kernel.dim(), 0);
        let k = FDModule::residue_field(&a);
        let om = syzygy(&a, &k).kernel;
        assert_eq!(om.dim(), 1);
        assert_eq!(om, k);

        let v4 = trunc(2, &[2, 2]);
        let mut m = FDModule::residue_field(&v4);
        for n in 1..=4 {
            m = syzygy(&v4, &m).kernel;
            assert_eq!(m.dim(), 2 * n + 1);
            FDModule::new(&v4, (0..4).map(|a| m.action(a).clone()).collect()).unwrap();
        }
    }

    #[test]
    fn cosyzygy_examples() {
        let a = trunc(2, &[2]);
        assert_eq!(cosyzygy(&a, &FDModule::free(&a, 1)).unwrap().module.dim(), 0);
        let k = FDModule::residue_field(&a);
        let c = cosyzygy(&a, &k).unwrap();
        assert_eq!(c.module.dim(), 1);
        assert!(is_homomorphism(&k, &FDModule::free(&a.opposite(), 1).dual(), &c.embed));

        let v4 = trunc(2, &[2, 2]);
        let mut m = FDModule::residue_field(&v4);
        for n in 1..=3 {
            let c = cosyzygy(&v4, &m).unwrap();
            assert_eq!(c.module.dim(), 2 * n + 1);
            FDModule::new(&v4, (0..4).map(|a| c.module.action(a).clone()).collect()).unwrap();
            let back = syzygy(&v4, &c.module).kernel;
            assert_eq!((back.dim() - m.dim()) % v4.dim(), 0);
            m = c.module;
        }
        let mut plain = trunc(2, &[2]);
        plain.set_symmetrizing(None).unwrap();
        assert!(cosyzygy(&plain, &FDModule::residue_field(&plain)).is_err());
    }

    #[test]
    fn stable_hom_examples() {
        for ex in [vec![2], vec![2, 2], vec![3]] {
            let a = trunc(if ex[0] == 3 { 3 } else { 2 }, &ex);
            let k = FDModule::residue_field(&a);
            assert_eq!(stable_hom(&a, &k, &k).dim(), 1);
            assert_eq!(stable_hom(&a, &FDModule::free(&a, 1), &k).dim(), 0);
            let reg = FDModule::free(&a, 1);
            let sh = stable_hom(&a, &reg, &reg);
            assert_eq!(sh.hom_dim, a.dim());
            assert_eq!(sh.dim(), 0);
        }
    }

    #[test]
    fn homs_commute_with_action() {
        let a = trunc(3, &[3, 2]);
        let k = FDModule::residue_field(&a);
        let om = syzygy(&a, &k).kernel;
        let oc = cover(&a, &om);
        for y in [&k, &om] {
            for c in hom_basis(&a, &oc, y) {
                let h = hom_from_coords(&a, &oc, y, &c);
                assert!(is_homomorphism(&om, y, &h));
                assert_eq!(hom_coords(&oc, &h), c);
            }
        }
    }

    #[test]
    fn syzygy_of_identity_is_identity() {
        let a = trunc(2, &[2, 2]);
        let k = FDModule::residue_field(&a);
        let kc = cover(&a, &k);
        let om = syzygy_map(&a, &kc, &kc, &Matrix::identity(a.field(), 1)).unwrap();
        assert_eq!(om, Matrix::identity(a.field(), kc.kernel.dim()));
    }

    #[test]
    fn bimodule_is_valid() {
        let a = trunc(3, &[3]);
        let e = a.enveloping();
        let m = FDModule::bimodule(&a, &e).unwrap();
        FDModule::new(&e, (0..e.dim()).map(|x| m.action(x).clone()).collect()).unwrap();
        assert_eq!(cover(&e, &m).rank(), 1);
    }
}
