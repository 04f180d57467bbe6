use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use sumrank::chains::{best_shift_chain, greedy_chain, is_increasing_chain, ChainInstance, Extractor, ShiftMode};
use sumrank::decomposable::sample_decomposable_uniform;
use sumrank::fqlinalg::sample_subspace;
use sumrank::qcomb::{binomial, composition_count, gaussian_binomial, Compositions};
use sumrank::sumrank::{ball_contains, srk_distance, BallSpec};
use sumrank::{BlockTuple, FieldSpec, Fq, SpaceParams};

fn space() -> impl Strategy<Value = SpaceParams> {
    (prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9]), 1usize..4, 1usize..4, 1usize..4)
        .prop_map(|(q, m, eta, ell)| SpaceParams::new(FieldSpec::of_order(q).unwrap(), m, eta, ell).unwrap())
}

fn rng_from(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn metric_axioms(p in space(), seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let x = BlockTuple::random(&p, &mut rng);
        let y = BlockTuple::random(&p, &mut rng);
        let z = BlockTuple::random(&p, &mut rng);
        let dxy = srk_distance(&x, &y).unwrap();
        prop_assert_eq!(dxy, srk_distance(&y, &x).unwrap());
        prop_assert_eq!(srk_distance(&x, &x).unwrap(), 0);
        prop_assert_eq!(dxy == 0, x == y);
        prop_assert!(dxy <= srk_distance(&x, &z).unwrap() + srk_distance(&z, &y).unwrap());
        prop_assert!(x.weight() <= p.max_weight());
    }

    #[test]
    fn translation_invariance(p in space(), seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let x = BlockTuple::random(&p, &mut rng);
        let y = BlockTuple::random(&p, &mut rng);
        let z = BlockTuple::random(&p, &mut rng);
        let d = srk_distance(&x, &y).unwrap();
        prop_assert_eq!(srk_distance(&x.add(&z).unwrap(), &y.add(&z).unwrap()).unwrap(), d);
        prop_assert_eq!(srk_distance(&x.sub(&z).unwrap(), &y.sub(&z).unwrap()).unwrap(), d);
    }

    #[test]
    fn scaling_invariance(p in space(), seed in any::<u64>(), r in 0usize..10) {
        let mut rng = rng_from(seed);
        let x = BlockTuple::random(&p, &mut rng);
        let y = BlockTuple::random(&p, &mut rng);
        let alpha = p.field.random_nonzero(&mut rng);
        let ball = BallSpec::at_zero(&p, r);
        prop_assert_eq!(ball_contains(&ball, &x).unwrap(), ball_contains(&ball, &x.scale(alpha)).unwrap());
        let inside = ball_contains(&ball, &x).unwrap();
        prop_assert_eq!(inside, ball_contains(&BallSpec::new(y.clone(), r), &x.add(&y).unwrap()).unwrap());
        prop_assert_eq!(inside, ball_contains(&BallSpec::new(y.neg(), r), &x.sub(&y).unwrap()).unwrap());
    }

    #[test]
    fn compositions_are_bounded_and_counted(total in 0usize..9, ell in 1usize..5, cap in 0usize..4) {
        let all: Vec<Vec<usize>> = Compositions::capped(total, ell, cap).map(|c| c.parts).collect();
        prop_assert_eq!(BigUint::from(all.len()), composition_count(total, &vec![0; ell], &vec![cap; ell]));
        prop_assert!(BigUint::from(all.len()) <= binomial(total + ell - 1, ell - 1));
        for c in &all {
            prop_assert_eq!(c.iter().sum::<usize>(), total);
            prop_assert!(c.iter().all(|&x| x <= cap));
        }
        prop_assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gaussian_binomial_identities(eta in 0usize..8, k in 0usize..8, q in prop::sample::select(vec![2u64, 3, 4, 5])) {
        prop_assume!(k <= eta);
        prop_assert_eq!(gaussian_binomial(eta, k, q), gaussian_binomial(eta, eta - k, q));
        if k >= 1 && eta >= 1 {
            // q-Pascal rule
            let lhs = gaussian_binomial(eta, k, q);
            let rhs = gaussian_binomial(eta - 1, k - 1, q)
                + BigUint::from(q).pow(k as u32) * gaussian_binomial(eta - 1, k, q);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn subspace_dimension_formula(eta in 1usize..7, a in 0usize..7, b in 0usize..7, seed in any::<u64>(), q in prop::sample::select(vec![2u64, 3, 4])) {
        prop_assume!(a <= eta && b <= eta);
        let f = FieldSpec::of_order(q).unwrap();
        let mut rng = rng_from(seed);
        let u = sample_subspace(&f, eta, a, &mut rng).unwrap();
        let v = sample_subspace(&f, eta, b, &mut rng).unwrap();
        let s = u.sum(&v).unwrap();
        let i = u.intersect(&v).unwrap();
        prop_assert_eq!(s.dim() + i.dim(), a + b);
        prop_assert!(i.is_subspace_of(&u).unwrap() && i.is_subspace_of(&v).unwrap());
        prop_assert!(u.is_subspace_of(&s).unwrap() && v.is_subspace_of(&s).unwrap());
    }

    #[test]
    fn decomposable_blockwise_matches_flattened(eta in 1usize..4, ell in 1usize..4, seed in any::<u64>()) {
        let f = FieldSpec::of_order(2).unwrap();
        let mut rng = rng_from(seed);
        let wx = (seed as usize) % (eta * ell + 1);
        let wy = (seed as usize / 7) % (eta * ell + 1);
        let x = sample_decomposable_uniform(&f, eta, ell, wx, &mut rng).unwrap();
        let y = sample_decomposable_uniform(&f, eta, ell, wy, &mut rng).unwrap();
        let i = x.intersect(&y).unwrap();
        prop_assert_eq!(i.flatten(), x.flatten().intersect(&y.flatten()).unwrap());
        prop_assert_eq!(x.sum(&y).unwrap().dim() + i.dim(), wx + wy);
    }

    #[test]
    fn chains_validate(gamma in 3usize..9, size in 1usize..40, seed in any::<u64>(), c in 1usize..4) {
        let f = FieldSpec::of_order(3).unwrap();
        let mut rng = rng_from(seed);
        let vecs: Vec<Vec<Fq>> = (0..size).map(|_| (0..gamma).map(|_| f.random(&mut rng)).collect()).collect();
        let g = greedy_chain(&vecs, c);
        prop_assert!(is_increasing_chain(&g, c));
        prop_assert!(g.len() <= gamma / c);
        let inst = ChainInstance::new(f, gamma, vecs, c).unwrap();
        let rep = best_shift_chain(&inst, ShiftMode::Random { trials: 8, seed }, Extractor::Greedy).unwrap();
        prop_assert!(is_increasing_chain(&rep.chain, c));
        prop_assert!(rep.length <= gamma / c);
    }
}
