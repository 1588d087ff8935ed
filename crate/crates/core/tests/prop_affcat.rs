mod common;

use std::sync::OnceLock;

use approxcat::affcat::{hom_space, is_isomorphic, AffineSubspace};
use approxcat::hopf::{compose, counit, RingModel};
use approxcat::rep::{instantiate, RepExpr, Representation};
use approxcat::sym_model::{all_permutations, compose_perm, Backend, SymRingModel};
use approxcat::torus_model::{TorusRingModel, WeightRep};
use common::{action_bounded, coideal_contained, permute_object, random_affine};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Setup {
    model: SymRingModel,
    shape: RepExpr,
    rep: Representation,
}

fn sym(d: usize) -> &'static Setup {
    static D2: OnceLock<Setup> = OnceLock::new();
    static D3: OnceLock<Setup> = OnceLock::new();
    let cell = if d == 2 { &D2 } else { &D3 };
    cell.get_or_init(|| {
        let model = SymRingModel::build(4, d, 5, Backend::Exact).unwrap();
        let shape = RepExpr::tensor_power(4, 2);
        let rep = instantiate(&model, &shape).unwrap();
        Setup { model, shape, rep }
    })
}

fn torus(d: usize) -> (TorusRingModel, Representation) {
    let m = TorusRingModel::new(d, 7).unwrap();
    let rep = m.weight_rep(&WeightRep::new(vec![3, 5])).unwrap();
    (m, rep)
}

/// Objects biased towards sharing orbits so that Hom spaces are not all zero.
fn triple(rng: &mut ChaCha8Rng, s: &Setup) -> [AffineSubspace; 3] {
    let f = s.model.field();
    let x1 = random_affine(rng, f, s.shape.dim(), 2, 0.05);
    let perms = all_permutations(4);
    let next = |x: &AffineSubspace, rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.6) {
            permute_object(&s.shape, &perms[rng.gen_range(0..24)], x, f)
        } else {
            random_affine(rng, f, s.shape.dim(), 2, 0.05)
        }
    };
    let x2 = next(&x1, rng);
    let x3 = next(&x2, rng);
    [x1, x2, x3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn coideal_containment_on_object_triples(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sym(2);
        let [x1, x2, x3] = triple(&mut rng, s);
        let h = |a: &AffineSubspace, b: &AffineSubspace| hom_space(&s.model, &s.rep, a, b).unwrap();
        let (h12, h23, h13) = (h(&x1, &x2), h(&x2, &x3), h(&x1, &x3));
        prop_assert!(coideal_contained(&s.model, &h13, &h23, &h12));
        // the dual statement: composites of morphisms are morphisms
        for psi in h23.basis.vectors().iter().take(3) {
            for phi in h12.basis.vectors().iter().take(3) {
                prop_assert!(h13.contains(&compose(&s.model, psi, phi)).unwrap());
            }
        }
    }

    #[test]
    fn evaluations_compose_like_the_group(g in 0usize..24, h in 0usize..24, d in 2usize..=3) {
        let m = &sym(d).model;
        let perms = all_permutations(4);
        let (g, h) = (&perms[g], &perms[h]);
        let lhs = compose(m, &m.eval_functional(h), &m.eval_functional(g));
        prop_assert_eq!(lhs, m.eval_functional(&compose_perm(h, g)));
    }

    #[test]
    fn counit_is_a_two_sided_identity(seed in any::<u64>(), d in 2usize..=3) {
        let m = &sym(d).model;
        let f = m.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi: Vec<u32> = (0..m.dim()).map(|_| rng.gen_range(0..f.p())).collect();
        let eps = counit(m);
        prop_assert_eq!(&compose(m, &eps, &phi), &phi);
        prop_assert_eq!(&compose(m, &phi, &eps), &phi);
        let (t, _) = torus(5);
        let phi: Vec<u32> = (0..t.dim()).map(|_| rng.gen_range(0..7)).collect();
        let eps = counit(&t);
        prop_assert_eq!(&compose(&t, &eps, &phi), &phi);
        prop_assert_eq!(&compose(&t, &phi, &eps), &phi);
    }

    #[test]
    fn morphisms_respect_the_action_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sym(2);
        let [x1, x2, _] = triple(&mut rng, s);
        let hom = hom_space(&s.model, &s.rep, &x1, &x2).unwrap();
        prop_assert!(action_bounded(&s.model, &s.rep, &hom));
        let (t, rep) = torus(5);
        let y1 = random_affine(&mut rng, t.field(), 2, 1, 0.0);
        let y2 = random_affine(&mut rng, t.field(), 2, 1, 0.0);
        let hom = hom_space(&t, &rep, &y1, &y2).unwrap();
        prop_assert!(action_bounded(&t, &rep, &hom));
    }

    #[test]
    fn identity_lies_in_every_endomorphism_space(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sym(2);
        let x = random_affine(&mut rng, s.model.field(), s.shape.dim(), 2, 0.1);
        let end = hom_space(&s.model, &s.rep, &x, &x).unwrap();
        prop_assert!(end.contains(&counit(&s.model)).unwrap());
    }
}

#[test]
fn non_isomorphism_persists_as_d_grows() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (s2, s3) = (sym(2), sym(3));
    let f = s2.model.field();
    let mut separated = 0;
    for trial in 0..40 {
        let x1 = random_affine(&mut rng, f, 16, 1, 0.0);
        let x2 = random_affine(&mut rng, f, 16, 1, 0.0);
        let low = is_isomorphic(&s2.model, &s2.rep, &x1, &x2, 10, trial).unwrap();
        if low.verdict.is_not_isomorphic() {
            separated += 1;
            let high = is_isomorphic(&s3.model, &s3.rep, &x1, &x2, 10, trial).unwrap();
            assert!(high.verdict.is_not_isomorphic(), "trial {trial}: {:?}", high.verdict);
        }
    }
    assert!(separated > 0);

    for (a, b) in [((1, 1), (2, 1)), ((1, 2), (3, 4)), ((0, 1), (1, 0))] {
        let (t5, r5) = torus(5);
        let (t6, r6) = torus(6);
        let f = t5.field();
        let x1 = AffineSubspace::point(f, vec![a.0, a.1]);
        let x2 = AffineSubspace::point(f, vec![b.0, b.1]);
        if is_isomorphic(&t5, &r5, &x1, &x2, 10, 0).unwrap().verdict.is_not_isomorphic() {
            assert!(is_isomorphic(&t6, &r6, &x1, &x2, 10, 0).unwrap().verdict.is_not_isomorphic());
        }
    }
}

#[test]
fn empty_objects_follow_the_constant_conventions() {
    let s = sym(2);
    let f = s.model.field();
    let empty = AffineSubspace::empty(16);
    let x = AffineSubspace::point(f, vec![1; 16]);
    let dim = s.model.dim();
    assert_eq!(hom_space(&s.model, &s.rep, &empty, &empty).unwrap().dim(), dim);
    assert_eq!(hom_space(&s.model, &s.rep, &empty, &x).unwrap().dim(), dim);
    assert_eq!(hom_space(&s.model, &s.rep, &x, &empty).unwrap().dim(), 0);
}
