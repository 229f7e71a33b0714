use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duality::{find_selfdual_functional, FunctionalSearch, SearchStrategy, EXHAUSTIVE_LIMIT};
use crate::error::{Error, Result};
use crate::exactlin::{Matrix, Solver};
use crate::graded::WindowedGradedAlgebra;

use super::algebra::FDAlgebra;
use super::module::{cover, stable_hom_with, syzygy_map, Cover, FDModule, StableHom};

/// `Ω^0 M, .., Ω^depth M` with the minimal cover of every level.
#[derive(Clone, Debug)]
pub struct SyzygyTower {
    base: FDModule,
    covers: Vec<Cover>,
}

impl SyzygyTower {
    pub fn new(alg: &FDAlgebra, m: &FDModule, depth: usize) -> Self {
        let mut covers: Vec<Cover> = Vec::with_capacity(depth + 1);
        for level in 0..=depth {
            let module = if level == 0 { m } else { &covers[level - 1].kernel };
            let c = cover(alg, module);
            covers.push(c);
        }
        SyzygyTower { base: m.clone(), covers }
    }

    pub fn depth(&self) -> usize {
        self.covers.len() - 1
    }

    /// `Ω^level M`; levels up to `depth + 1` are available.
    pub fn module(&self, level: usize) -> &FDModule {
        if level == 0 {
            &self.base
        } else {
            &self.covers[level - 1].kernel
        }
    }

    pub fn cover(&self, level: usize) -> &Cover {
        &self.covers[level]
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=self.depth() + 1).map(|l| self.module(l).dim()).collect()
    }

    /// Ranks of the minimal free resolution, i.e. `dim Ext^n(M, k)`.
    pub fn cover_ranks(&self) -> Vec<usize> {
        self.covers.iter().map(|c| c.rank()).collect()
    }

    fn require(&self, level: usize) -> Result<()> {
        if level > self.depth() {
            Err(Error::TowerDepth { required: level, available: self.depth() })
        } else {
            Ok(())
        }
    }
}

/// Levels `(p, q)` with `Ext^i = Hom(Ω^p M, Ω^q M)` stably.
pub fn levels(i: i32) -> (usize, usize) {
    (i.max(0) as usize, (-i).max(0) as usize)
}

/// Canonical basis of `Ext^i(M, M)`, represented by stable maps `Ω^p M -> Ω^q M`.
#[derive(Clone, Debug)]
pub struct TateExt {
    pub degree: i32,
    pub source_level: usize,
    pub target_level: usize,
    pub stable: StableHom,
}

impl TateExt {
    pub fn dim(&self) -> usize {
        self.stable.dim()
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.stable.reps
    }
}

fn stable_between(alg: &FDAlgebra, tower: &SyzygyTower, a: usize, b: usize) -> Result<StableHom> {
    tower.require(a.max(b))?;
    Ok(stable_hom_with(alg, tower.module(a), tower.cover(a), tower.module(b), tower.cover(b)))
}

pub fn tate_ext(alg: &FDAlgebra, tower: &SyzygyTower, i: i32) -> Result<TateExt> {
    let (p, q) = levels(i);
    let stable = stable_between(alg, tower, p, q)?;
    Ok(TateExt { degree: i, source_level: p, target_level: q, stable })
}

/// Shifts applied to each factor so that the composite `Ω^{t_f} f ∘ Ω^{t_g} g` is defined.
fn product_shifts(i: i32, j: i32) -> (usize, usize) {
    let (pf, _) = levels(i);
    let (_, qg) = levels(j);
    let tf = qg.saturating_sub(pf);
    let tg = tf + pf - qg;
    (tf, tg)
}

/// A computed Tate cohomology ring together with the data behind it.
#[derive(Clone, Debug)]
pub struct TateRing {
    pub ring: WindowedGradedAlgebra,
    pub exts: BTreeMap<i32, TateExt>,
    pub tower: SyzygyTower,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct ShiftKey {
    degree: i32,
    shift: usize,
}

/// `Ext^*(M, M)` on `window`, multiplied by composing syzygy-shifted representatives.
///
/// For `f` of degree `i` and `g` of degree `j` the product is `Ω^{t_f} f ∘ Ω^{t_g} g`
/// with the least shifts making the composite defined; it is reduced against
/// equally shifted canonical representatives of degree `i + j` modulo maps
/// factoring through projectives. No signs are introduced.
pub fn tate_ring(alg: &FDAlgebra, m: &FDModule, window: (i32, i32), depth: Option<usize>) -> Result<TateRing> {
    let (lo, hi) = window;
    if lo > 0 || hi < 0 {
        return Err(Error::InvalidInput(format!("window [{lo}, {hi}] must contain 0")));
    }
    let radius = lo.unsigned_abs().max(hi as u32) as usize;
    let depth = depth.unwrap_or(radius + 2);
    if depth < radius {
        return Err(Error::TowerDepth { required: radius, available: depth });
    }
    let tower = SyzygyTower::new(alg, m, depth);
    let exts: BTreeMap<i32, TateExt> = (lo..=hi)
        .into_par_iter()
        .map(|i| tate_ext(alg, &tower, i).map(|e| (i, e)))
        .collect::<Result<_>>()?;
    let dims: BTreeMap<i32, usize> = exts.iter().map(|(&i, e)| (i, e.dim())).collect();

    // unit: coordinates of the identity of M in degree 0
    let unit = exts[&0]
        .stable
        .reduce(&Matrix::identity(alg.field(), m.dim()))
        .ok_or_else(|| Error::Internal("identity is not a homomorphism".into()))?;
    let mut ring = WindowedGradedAlgebra::new(alg.field(), window, &dims, unit)?;

    let pairs: Vec<(i32, i32)> = (lo..=hi)
        .flat_map(|i| (lo..=hi).map(move |j| (i, j)))
        .filter(|&(i, j)| ring.in_window(i + j) && dims[&i] > 0 && dims[&j] > 0 && dims[&(i + j)] > 0)
        .collect();

    // every shifted family of representatives the products need
    let mut needed: BTreeSet<ShiftKey> = BTreeSet::new();
    let mut reducers: BTreeSet<(i32, usize)> = BTreeSet::new();
    for &(i, j) in &pairs {
        let (tf, tg) = product_shifts(i, j);
        let l = reduction_shift(i, j);
        needed.insert(ShiftKey { degree: i, shift: tf });
        needed.insert(ShiftKey { degree: j, shift: tg });
        needed.insert(ShiftKey { degree: i + j, shift: l });
        reducers.insert((i + j, l));
    }
    let max_shift: BTreeMap<i32, usize> = needed.iter().fold(BTreeMap::new(), |mut acc, k| {
        let e = acc.entry(k.degree).or_insert(0);
        *e = (*e).max(k.shift);
        acc
    });
    let shifted: HashMap<ShiftKey, Vec<Matrix>> = max_shift
        .par_iter()
        .map(|(&d, &top)| -> Result<Vec<(ShiftKey, Vec<Matrix>)>> {
            let e = &exts[&d];
            let (a, b) = (e.source_level, e.target_level);
            let mut cur = e.basis().to_vec();
            let mut out = vec![(ShiftKey { degree: d, shift: 0 }, cur.clone())];
            for t in 1..=top {
                tower.require(a.max(b) + t - 1)?;
                cur = cur
                    .iter()
                    .map(|f| syzygy_map(alg, tower.cover(a + t - 1), tower.cover(b + t - 1), f))
                    .collect::<Result<_>>()?;
                out.push((ShiftKey { degree: d, shift: t }, cur.clone()));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let solvers: HashMap<(i32, usize), (StableHom, Solver)> = reducers
        .par_iter()
        .map(|&(k, l)| -> Result<((i32, usize), (StableHom, Solver))> {
            let (p, q) = levels(k);
            let sh = stable_between(alg, &tower, p + l, q + l)?;
            let key = ShiftKey { degree: k, shift: l };
            let mut cols: Vec<Vec<u32>> = shifted[&key].iter().map(|c| sh.coords(c)).collect();
            cols.extend(sh.phom.iter().cloned());
            let rows = tower.cover(p + l).rank() * tower.module(q + l).dim();
            let solver = Solver::new(&Matrix::from_columns(alg.field(), rows, &cols));
            Ok(((k, l), (sh, solver)))
        })
        .collect::<Result<_>>()?;

    let tables: Vec<((i32, i32), Matrix)> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<((i32, i32), Matrix)> {
            let (tf, tg) = product_shifts(i, j);
            let l = reduction_shift(i, j);
            let fs = &shifted[&ShiftKey { degree: i, shift: tf }];
            let gs = &shifted[&ShiftKey { degree: j, shift: tg }];
            let (sh, solver) = &solvers[&(i + j, l)];
            let n = dims[&(i + j)];
            let mut table = Matrix::zeros(alg.field(), fs.len() * gs.len(), n);
            for (a, f) in fs.iter().enumerate() {
                for (b, g) in gs.iter().enumerate() {
                    let h = f.mul(g);
                    let x = solver
                        .solve(&sh.coords(&h))
                        .ok_or_else(|| Error::Internal(format!("product of degrees ({i}, {j}) is not in the span of the shifted basis")))?;
                    for (c, &v) in x[..n].iter().enumerate() {
                        table.set(a * gs.len() + b, c, v);
                    }
                }
            }
            Ok(((i, j), table))
        })
        .collect::<Result<_>>()?;
    for ((i, j), t) in tables {
        ring.set_table(i, j, t)?;
    }
    Ok(TateRing { ring, exts, tower })
}

/// Shift `L` such that the composite for degrees `(i, j)` lives at levels
/// `(P + L, Q + L)` where `(P, Q)` are the canonical levels of `i + j`.
fn reduction_shift(i: i32, j: i32) -> usize {
    let (tf, _) = product_shifts(i, j);
    let (_, qf) = levels(i);
    let (_, q) = levels(i + j);
    qf + tf - q
}

/// Dimensions of `Ext^i(M, M)` for `i` in `window`, without products.
pub fn tate_dims(alg: &FDAlgebra, m: &FDModule, window: (i32, i32)) -> Result<BTreeMap<i32, usize>> {
    let radius = window.0.unsigned_abs().max(window.1.max(0) as u32) as usize;
    let tower = SyzygyTower::new(alg, m, radius);
    (window.0..=window.1).into_par_iter().map(|i| tate_ext(alg, &tower, i).map(|e| (i, e.dim()))).collect()
}

/// `dim Ext^n_Λ(M, k)` for `n = 0..=max_n`, read off the minimal resolution.
pub fn ordinary_ext_dims(alg: &FDAlgebra, m: &FDModule, max_n: usize) -> Vec<usize> {
    SyzygyTower::new(alg, m, max_n).cover_ranks()
}

/// Strategy used when none is requested: exhaustive while it is cheap enough.
pub fn default_strategy(ring: &WindowedGradedAlgebra, seed: u64, samples: usize) -> SearchStrategy {
    let p = ring.field().p() as u64;
    match p.checked_pow(ring.dim(-1) as u32) {
        Some(n) if n <= EXHAUSTIVE_LIMIT => SearchStrategy::Exhaustive,
        _ => SearchStrategy::Randomized { seed, samples },
    }
}

/// Functional on `Ext^{-1}` making the ring `(-1)`-shifted selfdual.
pub fn duality_functional(ring: &WindowedGradedAlgebra, strategy: SearchStrategy) -> Result<FunctionalSearch> {
    if !ring.in_window(-1) {
        return Err(Error::OutOfWindow(-1, 0));
    }
    find_selfdual_functional(ring, -1, strategy)
}

/// Dimension table of a computed ring, indexed by degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimTable {
    pub window: (i32, i32),
    pub dims: BTreeMap<i32, usize>,
}
