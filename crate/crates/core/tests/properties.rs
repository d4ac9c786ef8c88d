//! Randomized algebraic properties of the coefficient field, the tensor
//! algebra, and the text syntax round trip.

use num::BigRational;
use proptest::prelude::*;

use algebroid_core::algebroid::{Tensor, Variance};
use algebroid_core::coeff::{Poly, Scalar};
use algebroid_core::generator::{random_instance, GenParams, Kind};
use algebroid_core::model::{parse_model, print_model};

const NV: usize = 2;

fn poly_from_terms(terms: &[((u32, u32), i64)]) -> Poly {
    let mut p = Poly::zero(NV);
    for &((a, b), c) in terms {
        let t = Poly::constant(NV, BigRational::from_integer(c.into()))
            .mul(&Poly::var(NV, 0).pow(a))
            .mul(&Poly::var(NV, 1).pow(b));
        p = p.add(&t);
    }
    p
}

prop_compose! {
    fn poly()(terms in prop::collection::vec(((0u32..3, 0u32..3), -4i64..=4), 0..5)) -> Poly {
        poly_from_terms(&terms)
    }
}

fn scalar_from_terms(terms: &[((u32, u32), i64)]) -> Scalar {
    let mut s = Scalar::zero(NV);
    for &((a, b), c) in terms {
        let t = &(&Scalar::from_int(NV, c) * &Scalar::var(NV, 0).pow(a))
            * &Scalar::var(NV, 1).pow(b);
        s = &s + &t;
    }
    s
}

prop_compose! {
    fn scalar_poly()(terms in prop::collection::vec(((0u32..3, 0u32..3), -4i64..=4), 0..4)) -> Scalar {
        scalar_from_terms(&terms)
    }
}

prop_compose! {
    fn scalar_small()(terms in prop::collection::vec(((0u32..2, 0u32..2), -3i64..=3), 0..3)) -> Scalar {
        scalar_from_terms(&terms)
    }
}

prop_compose! {
    // denominator q^2 + 1 is positive at every rational point, so the
    // quotient is well defined everywhere
    fn scalar()(num in scalar_small(), den in scalar_small()) -> Scalar {
        let d = &(&den * &den) + &Scalar::one(NV);
        &num * &d.inverse().unwrap()
    }
}

prop_compose! {
    fn point()(parts in prop::collection::vec((-9i64..=9, 1i64..=9), NV)) -> Vec<BigRational> {
        parts.iter().map(|&(n, d)| BigRational::new(n.into(), d.into())).collect()
    }
}

fn form(rank: usize, degree: usize, comps: &[((u32, u32), i64)]) -> Tensor {
    let mut t = Tensor::zero(Variance::Form, degree, rank, NV);
    let tuples = Tensor::index_tuples(rank, degree);
    for (n, c) in comps.iter().enumerate() {
        let idx = &tuples[n % tuples.len()];
        let cur = t.component(idx);
        t.add_component(idx, &cur + &scalar_from_terms(&[*c]));
    }
    t
}

prop_compose! {
    fn one_form()(comps in prop::collection::vec(((0u32..2, 0u32..2), -3i64..=3), 1..4)) -> Tensor {
        form(3, 1, &comps)
    }
}

prop_compose! {
    fn two_form()(comps in prop::collection::vec(((0u32..2, 0u32..2), -3i64..=3), 1..4)) -> Tensor {
        form(3, 2, &comps)
    }
}

proptest! {
    // quotient-field cases multiply denominators and cancel through
    // polynomial gcds, so each case costs far more than a polynomial
    // one; fewer cases keep the suite quick
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn addition_commutes_and_associates(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
    }

    #[test]
    fn multiplication_commutes_and_associates(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn multiplication_distributes(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn additive_inverse_cancels(a in scalar()) {
        prop_assert!((&a + &(-&a)).is_zero());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn inverse_round_trips(a in scalar()) {
        prop_assume!(!a.is_zero());
        prop_assert_eq!(&a * &a.inverse().unwrap(), Scalar::one(NV));
    }

    #[test]
    fn common_factors_cancel(a in scalar_poly(), b in scalar_poly(), c in scalar_poly()) {
        prop_assume!(!b.is_zero() && !c.is_zero());
        let plain = &a * &b.inverse().unwrap();
        let padded = &(&a * &c) * &(&b * &c).inverse().unwrap();
        // canonical forms are representation-unique, so cancellation
        // must give identical values
        prop_assert_eq!(plain, padded);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in scalar(), b in scalar(), pt in point()) {
        let (va, vb) = (a.evaluate(&pt).unwrap(), b.evaluate(&pt).unwrap());
        prop_assert_eq!((&a + &b).evaluate(&pt).unwrap(), &va + &vb);
        prop_assert_eq!((&a * &b).evaluate(&pt).unwrap(), &va * &vb);
    }

    #[test]
    fn powers_add_exponents(a in scalar(), m in 0u32..4, n in 0u32..4) {
        prop_assert_eq!(a.pow(m + n), &a.pow(m) * &a.pow(n));
    }

    #[test]
    fn generated_models_round_trip(seed in any::<u64>(), pick in 0usize..5) {
        let params = match pick {
            0 => GenParams { rank: 3, chart_dim: 2, max_degree: 2, kind: Kind::Skew },
            1 => GenParams { rank: 3, chart_dim: 1, max_degree: 1, kind: Kind::LieAlgebra },
            2 => GenParams { rank: 2, chart_dim: 2, max_degree: 0, kind: Kind::TangentLike },
            3 => GenParams { rank: 3, chart_dim: 1, max_degree: 1, kind: Kind::CosymplecticData },
            _ => GenParams { rank: 2, chart_dim: 2, max_degree: 1, kind: Kind::LcsData },
        };
        let model = random_instance(seed, &params).unwrap();
        let text = print_model(&model);
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(back, model);
    }
}

proptest! {
    #[test]
    fn gcd_divides_both_inputs(p in poly(), q in poly()) {
        let g = Poly::gcd(&p, &q);
        if p.is_zero() && q.is_zero() {
            prop_assert!(g.is_zero());
        } else {
            prop_assert!(p.div_exact(&g).is_some());
            prop_assert!(q.div_exact(&g).is_some());
            prop_assert_eq!(Poly::gcd(&q, &p), g);
        }
    }

    #[test]
    fn gcd_sees_common_factors(p in poly(), q in poly(), r in poly()) {
        prop_assume!(!p.is_zero() && !q.is_zero() && !r.is_zero());
        let g = Poly::gcd(&p.mul(&r), &q.mul(&r));
        prop_assert!(g.div_exact(&r.monic()).is_some());
    }

    #[test]
    fn partial_derivative_satisfies_leibniz(p in poly(), q in poly()) {
        for v in 0..NV {
            let lhs = p.mul(&q).partial(v);
            let rhs = p.partial(v).mul(&q).add(&p.mul(&q.partial(v)));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn wedge_is_graded_commutative(a in one_form(), b in one_form(), w in two_form()) {
        // odd degrees anticommute, even against odd commutes
        prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap().neg());
        prop_assert_eq!(a.wedge(&w).unwrap(), w.wedge(&a).unwrap());
        prop_assert!(a.wedge(&a).unwrap().is_zero());
    }

    #[test]
    fn wedge_associates_and_distributes(a in one_form(), b in one_form(), c in one_form()) {
        let ab_c = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let a_bc = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        let lhs = a.wedge(&b.add(&c).unwrap()).unwrap();
        let rhs = a.wedge(&b).unwrap().add(&a.wedge(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
