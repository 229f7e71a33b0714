//! Tate rings compared against known cohomology rings, by invariants.

use gtl::exactlin::{EchelonSpace, PrimeField};
use gtl::gallery::{self, build_truncated_ci, TruncatedCISpec};
use gtl::graded::{GradedElement, WindowedGradedAlgebra};
use gtl::stmod::{cosyzygy, cover, stable_hom, tate_ring, FDAlgebra, FDModule, SyzygyTower};
use gtl::structure::{check_periodicity, regularity, verify_depth1};

fn trunc(p: u64, ex: &[usize]) -> FDAlgebra {
    build_truncated_ci(&TruncatedCISpec::new(p, ex)).unwrap()
}

fn residue_ring(p: u64, ex: &[usize], window: (i32, i32)) -> WindowedGradedAlgebra {
    let alg = trunc(p, ex);
    tate_ring(&alg, &FDModule::residue_field(&alg), window, None).unwrap().ring
}

fn nonzero(v: &[u32]) -> bool {
    v.iter().any(|&x| x != 0)
}

/// Group algebra of Z/2 over F_2: the Tate ring is k[y, 1/y] with every
/// structure constant 1, which is the gallery Laurent ring on the nose.
#[test]
fn cyclic_group_of_order_two_is_laurent() {
    let ring = residue_ring(2, &[2], (-3, 3));
    let laurent = gallery::laurent(PrimeField::new(2).unwrap(), (-3, 3)).unwrap();
    for i in -3..=3 {
        assert_eq!(ring.dim(i), 1);
        for j in -3..=3 {
            if ring.in_window(i + j) {
                assert_eq!(ring.table(i, j), laurent.table(i, j), "({i}, {j})");
            }
        }
    }
}

/// H*(Z/2 x Z/2; F_2) = F_2[y1, y2] with |y_i| = 1.
#[test]
fn klein_four_nonnegative_part_is_polynomial() {
    let ring = residue_ring(2, &[2, 2], (-4, 4));
    let f = ring.field();
    assert_eq!(ring.dim(1), 2);
    let y = [GradedElement::basis(&ring, 1, 0), GradedElement::basis(&ring, 1, 1)];
    // monomials of degree n in y1, y2 are independent and span
    for n in 0..=4usize {
        let mut span = EchelonSpace::new(f, ring.dim(n as i32));
        for a in 0..=n {
            let mut m = GradedElement::one(&ring);
            for _ in 0..a {
                m = ring.multiply(&m, &y[0]).unwrap();
            }
            for _ in a..n {
                m = ring.multiply(&m, &y[1]).unwrap();
            }
            let (_, v) = m.homogeneous(&ring).unwrap();
            assert!(span.insert(&v), "monomials of degree {n} are dependent");
        }
        assert_eq!(span.dim(), ring.dim(n as i32));
    }
    for i in 0..=4 {
        for j in 0..=4 - i {
            for a in 0..ring.dim(i) {
                for b in 0..ring.dim(j) {
                    assert_eq!(ring.basis_product(i, a, j, b), ring.basis_product(j, b, i, a));
                }
            }
        }
    }
    for g in &y {
        assert!(ring.is_central(g).unwrap().passed());
        assert!(regularity(&ring, g).unwrap().passed());
    }
    let z1 = ring.multiply(&y[0], &y[0]).unwrap();
    assert!(regularity(&ring, &z1).unwrap().passed());
    assert!(verify_depth1(&ring, &z1, -1).unwrap().passed());
}

/// Yoneda products of degree 1 classes: the symmetric square of Ext^1 maps
/// isomorphically onto Ext^2.
#[test]
fn klein_four_degree_one_products() {
    let ring = residue_ring(2, &[2, 2], (-2, 2));
    let t = ring.table(1, 1).unwrap();
    assert_eq!(t.rank(), 3);
    let ext = SyzygyTower::new(&trunc(2, &[2, 2]), &FDModule::residue_field(&trunc(2, &[2, 2])), 3);
    assert_eq!(ext.dims(), vec![1, 3, 5, 7, 9]);
    assert_eq!(ext.cover_ranks(), vec![1, 2, 3, 4]);
}

/// k[x]/(x^3) over F_3: Ext = Λ(ξ) ⊗ k[χ] with |ξ| = 1, |χ| = 2; in the Tate
/// ring χ is invertible.
#[test]
fn truncated_cube_in_characteristic_three() {
    let ring = residue_ring(3, &[3], (-4, 4));
    for d in -4..=4 {
        assert_eq!(ring.dim(d), 1);
    }
    let xi = ring.basis_product(1, 0, 1, 0).unwrap();
    assert!(!nonzero(xi), "ξ^2 = 0");
    for i in -4..=4 {
        if ring.in_window(i + 2) {
            assert!(nonzero(ring.basis_product(2, 0, i, 0).unwrap()), "χ acts invertibly on degree {i}");
        }
    }
    let chi = GradedElement::basis(&ring, 2, 0);
    assert!(check_periodicity(&ring, &chi).unwrap().passed());
    for i in (-3..=3).step_by(2) {
        if ring.in_window(2 * i) {
            assert!(!nonzero(ring.basis_product(i, 0, i, 0).unwrap()), "odd classes square to zero in degree {i}");
        }
    }
}

#[test]
fn syzygy_dimensions_of_complete_intersections() {
    // dim Ω^n k = 2n + 1 for k[x,y]/(x^2,y^2)
    let alg = trunc(2, &[2, 2]);
    let mut m = FDModule::residue_field(&alg);
    for n in 0..5 {
        assert_eq!(m.dim(), 2 * n + 1);
        m = cover(&alg, &m).kernel;
    }
    // k[x]/(x^a) is periodic: Ω^2 k = k
    for (p, a) in [(2, 3), (3, 3), (5, 4)] {
        let alg = trunc(p, &[a]);
        let k = FDModule::residue_field(&alg);
        let o1 = cover(&alg, &k).kernel;
        let o2 = cover(&alg, &o1).kernel;
        assert_eq!((o1.dim(), o2.dim()), (a - 1, 1));
    }
}

#[test]
fn cosyzygy_inverts_syzygy_dimensions() {
    for (p, ex) in [(2, vec![2, 2]), (3, vec![3]), (2, vec![2, 2, 2])] {
        let alg = trunc(p, &ex);
        let k = FDModule::residue_field(&alg);
        let om = cover(&alg, &k).kernel;
        let back = cosyzygy(&alg, &om).unwrap();
        assert_eq!(back.module.dim(), k.dim());
        assert_eq!(stable_hom(&alg, &back.module, &k).dim(), 1);
        let up = cosyzygy(&alg, &k).unwrap();
        assert_eq!(up.module.dim() + k.dim(), up.embed.rows());
    }
}

#[test]
fn stable_endomorphisms_of_residue_field() {
    for (p, ex) in [(2, vec![2]), (3, vec![3]), (2, vec![2, 2]), (3, vec![3, 3])] {
        let alg = trunc(p, &ex);
        let k = FDModule::residue_field(&alg);
        assert_eq!(stable_hom(&alg, &k, &k).dim(), 1);
        let free = FDModule::free(&alg, 1);
        assert_eq!(stable_hom(&alg, &free, &k).dim(), 0);
        assert_eq!(stable_hom(&alg, &k, &free).dim(), 0);
    }
}

#[test]
fn fields_other_than_two() {
    let ring = residue_ring(5, &[5], (-2, 2));
    assert!(ring.validate().unwrap().passed());
    assert!(ring.dims().values().all(|&d| d == 1));
    let ring = residue_ring(3, &[3, 3], (-2, 2));
    assert_eq!(ring.dims().values().copied().collect::<Vec<_>>(), vec![2, 1, 1, 2, 3]);
}

#[test]
fn truncated_algebras_are_local_and_symmetric() {
    for (p, ex) in [(2, vec![2]), (2, vec![3]), (3, vec![3]), (5, vec![4]), (2, vec![2, 2]), (3, vec![3, 2]), (2, vec![2, 2, 2])] {
        let alg = trunc(p, &ex);
        alg.validate().unwrap();
        assert!(alg.validate_symmetric().passed(), "{ex:?} over F_{p}");
        assert_eq!(alg.dim(), ex.iter().product::<usize>());
        assert_eq!(alg.radical().len(), alg.dim() - 1);
        let env = alg.enveloping();
        assert!(env.validate_symmetric().passed());
        let back = FDAlgebra::from_json(&alg.to_json()).unwrap();
        assert_eq!(back.to_json(), alg.to_json());
    }
}
