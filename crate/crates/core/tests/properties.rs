use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trace_product::decompose::weighted::herm_power;
use trace_product::decompose::{decompose, detect_branch, operator_schmidt_rank, DecompositionResult};
use trace_product::extend::{check_preservation, dualize, embed_extend_pair, tuple_residual, Mode};
use trace_product::families::{
    gen_canonical, gen_embedded_pair, gen_hadamard_pair, gen_rank_one_frame_pair, gen_space_sample, random_bijection,
    random_invertible, sample_space, Family, GenSpec,
};
use trace_product::linalg;
use trace_product::matlin::{gram_matrix, membership, space_basis, trace_pair, Field, Kind, SpaceTag};
use trace_product::{from_canonical, CMatrix, CanonicalForm, LinMap, Scalar};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![
        Just(Kind::FullMatrix),
        Just(Kind::Hermitian),
        Just(Kind::Symmetric),
        Just(Kind::Diagonal),
    ]
}

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Real), Just(Field::Complex)]
}

fn linear_space() -> impl Strategy<Value = SpaceTag> {
    (kind(), field(), 1usize..=4).prop_map(|(k, f, n)| SpaceTag::new(k, f, n))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Scalar::new(a, b))
}

/// An instance of each family that has a decomposer, at sizes the invariants
/// are stated for.
fn canonical_spec() -> impl Strategy<Value = GenSpec> {
    let families = prop_oneof![
        Just(Family::MnChain),
        Just(Family::HermOdd),
        Just(Family::HermEven),
        Just(Family::PnPair),
        Just(Family::SymOdd),
        Just(Family::SymEven),
        Just(Family::DiagPair),
        Just(Family::DiagChain),
    ];
    (families, 1usize..=5, 2usize..=5, field(), any::<bool>(), any::<bool>(), any::<u64>())
        .prop_filter_map("family admits the arity", |(family, n, m, field, positive, transpose, seed)| {
            family
                .allows(m, field, positive)
                .then_some(GenSpec { positive, transpose, ..GenSpec::new(family, n, m, field, seed) })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_pair_is_symmetric(n in 1usize..=5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = sample_space(SpaceTag::full(n), &mut r);
        let b = sample_space(SpaceTag::full(n), &mut r);
        let (ab, ba) = (trace_pair(&a, &b).unwrap(), trace_pair(&b, &a).unwrap());
        prop_assert!((ab - ba).norm() <= 1e-12 * ab.norm().max(1.0));
    }

    #[test]
    fn basis_gram_is_invertible_and_real(space in linear_space()) {
        let b = space_basis(space).elements;
        prop_assert_eq!(b.len(), space.span_dim());
        let g = gram_matrix(&b, &b).unwrap();
        prop_assert_eq!(linalg::rank(g.as_na(), 1e-12), b.len());
        if space.coordinate_field() == Field::Real {
            prop_assert_eq!(g.max_imag(), 0.0);
        }
        for e in &b {
            prop_assert!(membership(space, e, 0.0));
        }
    }

    #[test]
    fn coordinates_round_trip(space in linear_space(), seed in any::<u64>()) {
        let a = gen_space_sample(space, seed);
        let c = space.coordinates(&a, 1e-12).unwrap();
        prop_assert!(space.from_coords(&c).max_abs_diff(&a) <= 1e-12 * a.max_abs().max(1.0));
    }

    #[test]
    fn apply_is_linear(space in linear_space(), seed in any::<u64>(), x in scalar(), y in scalar()) {
        let mut r = rng(seed);
        let f = random_bijection(space, 1e3, &mut r).unwrap();
        let (x, y) = if space.coordinate_field() == Field::Real { (Scalar::new(x.re, 0.0), Scalar::new(y.re, 0.0)) } else { (x, y) };
        let a = sample_space(space, &mut r);
        let b = sample_space(space, &mut r);
        let lhs = f.apply(&(&a.scale(x) + &b.scale(y))).unwrap();
        let rhs = &f.apply(&a).unwrap().scale(x) + &f.apply(&b).unwrap().scale(y);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-11 * rhs.max_abs().max(1.0));
    }

    #[test]
    fn identity_is_neutral_for_compose(space in linear_space(), seed in any::<u64>()) {
        let f = random_bijection(space, 1e3, &mut rng(seed)).unwrap();
        let id = LinMap::identity(space);
        prop_assert_eq!(&LinMap::compose(&id, &f).unwrap(), &f);
        prop_assert_eq!(&LinMap::compose(&f, &id).unwrap(), &f);
    }

    #[test]
    fn chain_telescopes(n in 1usize..=4, m in 3usize..=5, seed in any::<u64>()) {
        let g = gen_canonical(&GenSpec::new(Family::MnChain, n, m, Field::Complex, seed)).unwrap();
        let CanonicalForm::MnChain { n: ns } = &g.form else { unreachable!() };
        let mut r = rng(seed ^ 1);
        let inputs: Vec<CMatrix> = (0..m).map(|_| sample_space(g.space, &mut r)).collect();
        let lhs = g.maps.iter().zip(&inputs).fold(CMatrix::identity(n), |acc, (f, a)| &acc * &f.apply(a).unwrap());
        let plain = inputs.iter().fold(CMatrix::identity(n), |acc, a| &acc * a);
        let rhs = &(&ns[0] * &plain) * &ns[0].inverse().unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-8 * rhs.max_abs().max(1.0));
    }

    #[test]
    fn dual_pairs_preserve_and_dualize_is_an_involution(space in linear_space(), seed in any::<u64>()) {
        let phi = random_bijection(space, 1e3, &mut rng(seed)).unwrap();
        let psi = dualize(&phi, 1e-9).unwrap();
        let r = check_preservation(&[phi.clone(), psi.clone()], 1e-8, Mode::Exhaustive).unwrap();
        prop_assert!(r.pass, "residual {:.3e}", r.max_residual);
        prop_assert!(dualize(&psi, 1e-9).unwrap().rel_distance(&phi) <= 1e-8);
    }

    #[test]
    fn passing_pairs_are_injective(space in linear_space(), seed in any::<u64>()) {
        let phi = random_bijection(space, 1e3, &mut rng(seed)).unwrap();
        let psi = dualize(&phi, 1e-9).unwrap();
        prop_assume!(check_preservation(&[phi.clone(), psi.clone()], 1e-8, Mode::Exhaustive).unwrap().pass);
        for f in [&phi, &psi] {
            prop_assert_eq!(linalg::rank(f.transfer().as_na(), 1e-10), space.span_dim());
        }
    }

    #[test]
    fn verdict_does_not_depend_on_the_basis(space in linear_space(), seed in any::<u64>(), perturb in any::<bool>()) {
        let mut r = rng(seed);
        let phi = random_bijection(space, 1e2, &mut r).unwrap();
        let mut psi = dualize(&phi, 1e-9).unwrap();
        if perturb {
            let t = psi.transfer().clone();
            let bump = CMatrix::from_fn(t.rows(), t.cols(), |i, j| if (i, j) == (0, 0) { Scalar::new(0.5, 0.0) } else { Scalar::new(0.0, 0.0) });
            psi = LinMap::new(space, space, &t + &bump).unwrap();
        }
        let maps = [phi, psi];
        let canonical = check_preservation(&maps, 1e-8, Mode::Exhaustive).unwrap().pass;

        // The same check over a random basis of the span.
        let d = space.span_dim();
        let q = random_invertible(d, space.coordinate_field(), 1e2, &mut r).unwrap();
        let basis: Vec<CMatrix> = (0..d).map(|j| space.from_coords(&(0..d).map(|i| q.get(i, j)).collect::<Vec<_>>())).collect();
        let mut worst = 0.0f64;
        for a in &basis {
            for b in &basis {
                worst = worst.max(tuple_residual(&maps, &[a.clone(), b.clone()]));
            }
        }
        // A basis with condition number up to 1e2 can inflate residuals by its square.
        prop_assert_eq!(canonical, worst <= 1e-8 * 1e4);
        prop_assert_eq!(canonical, !perturb);
    }

    #[test]
    fn embedded_pairs_extend(n in 1usize..=2, extra in 1usize..=2, seed in any::<u64>()) {
        let k = n + extra;
        let (p1, p2) = gen_embedded_pair(n, k, 1e2, &mut rng(seed)).unwrap();
        let (e1, e2) = embed_extend_pair(&p1, &p2, 1e-9).unwrap();
        for b in space_basis(SpaceTag::full(n)).elements {
            let emb = b.corner_embed(k);
            prop_assert!(e1.apply(&emb).unwrap().max_abs_diff(&p1.apply(&b).unwrap()) <= 1e-10 * p1.apply(&b).unwrap().max_abs().max(1.0));
            prop_assert!(e2.apply(&emb).unwrap().max_abs_diff(&p2.apply(&b).unwrap()) <= 1e-10 * p2.apply(&b).unwrap().max_abs().max(1.0));
        }
        prop_assert!(check_preservation(&[e1.clone(), e2.clone()], 1e-8, Mode::Exhaustive).unwrap().pass);
        prop_assert!(e1.is_hermitian_preserving(1e-8) && e2.is_hermitian_preserving(1e-8));
    }

    #[test]
    fn generated_instances_preserve(spec in canonical_spec()) {
        let g = gen_canonical(&spec).unwrap();
        let r = check_preservation(&g.maps, 1e-9, Mode::Exhaustive).unwrap();
        prop_assert!(r.pass, "{:?}: {:.3e}", spec, r.max_residual);
    }

    #[test]
    fn decomposition_round_trips(spec in canonical_spec()) {
        let g = gen_canonical(&spec).unwrap();
        let res: DecompositionResult = decompose(&g.maps, 1e-7).unwrap();
        let rebuilt = from_canonical(&res.form, g.space).unwrap();
        for (a, b) in rebuilt.iter().zip(&g.maps) {
            prop_assert!(a.rel_distance(b) <= 1e-7);
        }
        let json = serde_json::to_string(&res).unwrap();
        prop_assert_eq!(serde_json::from_str::<DecompositionResult>(&json).unwrap(), res);
    }

    #[test]
    fn exactly_one_branch_passes(n in 3usize..=4, seed in any::<u64>(), transpose in any::<bool>()) {
        let full = SpaceTag::full(n);
        let nm = random_invertible(n, Field::Complex, 1e2, &mut rng(seed)).unwrap();
        let ni = nm.inverse().unwrap();
        let phi = LinMap::from_fn(full, full, |a| {
            let a = if transpose { a.transpose() } else { a.clone() };
            &(&nm * &a) * &ni
        }).unwrap();
        let t = detect_branch(&phi);
        let tol = 1e-8;
        prop_assert!((t.automorphism_residual <= tol) != (t.anti_automorphism_residual <= tol));
    }

    #[test]
    fn counterexample_pairs_are_not_two_sided(n in 2usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        // J + I is symmetric, nonzero everywhere and of full rank, so the
        // Hadamard map is not a two-sided multiplication.
        let c = CMatrix::from_fn(n, n, |i, j| Scalar::new(if i == j { 2.0 } else { 1.0 }, 0.0));
        let (h, h_hat, _) = gen_hadamard_pair(&c).unwrap();
        prop_assert!(check_preservation(&[h.clone(), h_hat], 1e-10, Mode::Exhaustive).unwrap().pass);
        prop_assert!(operator_schmidt_rank(&h, 1e-9).unwrap() > 1);

        let mut a: Vec<CMatrix> = (0..n).map(|_| random_invertible(n, Field::Complex, 1e2, &mut r).unwrap()).collect();
        a[0] = CMatrix::identity(n);
        let (f, g) = gen_rank_one_frame_pair(&a).unwrap();
        prop_assert!(check_preservation(&[f.clone(), g], 1e-8, Mode::Exhaustive).unwrap().pass);
        prop_assert!(operator_schmidt_rank(&f, 1e-9).unwrap() > 1);
    }

    #[test]
    fn generation_is_deterministic(spec in canonical_spec()) {
        let a = serde_json::to_string(&gen_canonical(&spec).unwrap()).unwrap();
        let b = serde_json::to_string(&gen_canonical(&spec).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn maps_survive_json(space in linear_space(), seed in any::<u64>()) {
        let f = random_bijection(space, 1e3, &mut rng(seed)).unwrap();
        let back: LinMap = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn powers_compose(n in 1usize..=4, seed in any::<u64>(), t in -2.0..2.0f64) {
        let a = gen_space_sample(SpaceTag::new(Kind::PosDef, Field::Complex, n), seed);
        let prod = &herm_power(&a, t).unwrap() * &herm_power(&a, 1.0 - t).unwrap();
        let scale = linalg::condition_number(a.as_na()).powf(2.0);
        prop_assert!(prod.max_abs_diff(&a) <= 1e-12 * scale * a.max_abs().max(1.0));
    }
}
