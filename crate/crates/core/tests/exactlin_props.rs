use gtl::exactlin::{EchelonSpace, Matrix, PrimeField, Solver};
use proptest::prelude::*;

const PRIMES: [u64; 6] = [2, 3, 5, 7, 31, 65537];

fn matrix_strategy() -> impl Strategy<Value = Matrix> {
    (prop::sample::select(PRIMES.to_vec()), 1usize..9, 1usize..9, 0u32..4).prop_flat_map(|(p, r, c, sparsity)| {
        prop::collection::vec((0u32..4, any::<u32>()), r * c).prop_map(move |cells| {
            let f = PrimeField::new(p).unwrap();
            let data = cells.iter().map(|&(z, v)| if z < sparsity { 0 } else { v % f.p() }).collect();
            Matrix::from_data(f, r, c, data).unwrap()
        })
    })
}

fn vector(field: PrimeField, len: usize, seed: &[u32]) -> Vec<u32> {
    (0..len).map(|k| seed[k % seed.len()].wrapping_mul(k as u32 + 7) % field.p()).collect()
}

proptest! {
    #[test]
    fn rank_nullity(m in matrix_strategy()) {
        let ker = m.kernel_basis();
        prop_assert_eq!(m.rank() + ker.len(), m.cols());
        for v in &ker {
            prop_assert!(m.mul_vec(v).iter().all(|&x| x == 0));
        }
        let mut span = EchelonSpace::new(m.field(), m.cols());
        for v in &ker {
            prop_assert!(span.insert(v), "kernel basis is dependent");
        }
    }

    #[test]
    fn rank_of_transpose(m in matrix_strategy()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn rank_counts_independent_columns(m in matrix_strategy()) {
        let mut span = EchelonSpace::new(m.field(), m.rows());
        for c in m.columns() {
            span.insert(&c);
        }
        prop_assert_eq!(span.dim(), m.rank());
    }

    #[test]
    fn solve_consistent_systems(m in matrix_strategy(), seed in prop::collection::vec(any::<u32>(), 1..5)) {
        let x = vector(m.field(), m.cols(), &seed);
        let b = m.mul_vec(&x);
        let y = m.solve(&b).unwrap().expect("b is in the column space");
        prop_assert_eq!(m.mul_vec(&y), b.clone());
        let s = Solver::new(&m);
        prop_assert_eq!(s.rank(), m.rank());
        let z = s.solve(&b).expect("b is in the column space");
        prop_assert_eq!(m.mul_vec(&z), b);
    }

    #[test]
    fn solve_detects_inconsistency(m in matrix_strategy(), seed in prop::collection::vec(any::<u32>(), 1..5)) {
        let b = vector(m.field(), m.rows(), &seed);
        let mut span = EchelonSpace::new(m.field(), m.rows());
        for c in m.columns() {
            span.insert(&c);
        }
        let solvable = span.contains(&b);
        prop_assert_eq!(m.solve(&b).unwrap().is_some(), solvable);
        prop_assert_eq!(Solver::new(&m).solve(&b).is_some(), solvable);
    }

    #[test]
    fn rref_is_idempotent_up_to_rank(m in matrix_strategy()) {
        let r = m.rref();
        prop_assert_eq!(r.matrix.rank(), m.rank());
        prop_assert_eq!(r.matrix.rref().matrix, r.matrix.clone());
    }

    #[test]
    fn product_rank_bound(a in matrix_strategy(), seed in prop::collection::vec(any::<u32>(), 1..5), k in 1usize..6) {
        let f = a.field();
        let data: Vec<u32> = vector(f, a.cols() * k, &seed);
        let b = Matrix::from_data(f, a.cols(), k, data).unwrap();
        prop_assert!(a.mul(&b).rank() <= a.rank().min(b.rank()));
    }

    #[test]
    fn field_inverses(p in prop::sample::select(PRIMES.to_vec()), x in 1u64..1_000_000) {
        let f = PrimeField::new(p).unwrap();
        let a = f.reduce(x as i64);
        prop_assume!(a != 0);
        prop_assert_eq!(f.mul(a, f.inv(a)), 1);
        prop_assert_eq!(f.pow(a, p - 1), 1);
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
    }
}

#[test]
fn rejects_non_primes() {
    for n in [0u64, 1, 4, 9, 91, 65535] {
        assert!(PrimeField::new(n).is_err(), "{n}");
    }
}
