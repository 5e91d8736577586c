use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

use vmkdv_core::diffalg::euler::{partial, variational_derivative};
use vmkdv_core::diffalg::{ratio, BivectorPoly, Coeff, Graded, Jet, Monomial, Pairing, ScalarPoly, VectorPoly};
use vmkdv_core::hierarchy::{check_reduction_group, FlowTable, LaxCoeff, LaxMatrix};
use vmkdv_core::solutions::*;
use vmkdv_core::Error;

const MAX_ORDER: u32 = 3;

fn coeff() -> impl Strategy<Value = Coeff> {
    (-5i64..=5, 1i64..=4).prop_filter_map("zero", |(n, d)| (n != 0).then(|| ratio(n, d)))
}

fn monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::vec((0..=MAX_ORDER, 0..=MAX_ORDER), 0..=2)
        .prop_map(|ps| Monomial::from_pairings(ps.into_iter().map(|(i, j)| Pairing::new(i, j)).collect()))
}

fn scalar() -> impl Strategy<Value = ScalarPoly> {
    prop::collection::vec((monomial(), coeff()), 0..=4).prop_map(ScalarPoly::from_terms)
}

fn vector() -> impl Strategy<Value = VectorPoly> {
    prop::collection::vec((0..=MAX_ORDER, scalar()), 0..=3).prop_map(VectorPoly::from_terms)
}

fn bivector() -> impl Strategy<Value = BivectorPoly> {
    prop::collection::vec(((0..=MAX_ORDER, 0..=MAX_ORDER), scalar()), 0..=3).prop_map(BivectorPoly::from_terms)
}

/// A homogeneous element picked from the graded basis; `None` when that basis is empty.
fn homogeneous<T: Graded + std::fmt::Debug + 'static>(weights: std::ops::RangeInclusive<u32>, degrees: &'static [u32]) -> BoxedStrategy<T> {
    (weights, prop::sample::select(degrees), any::<u64>(), prop::collection::vec(-3i64..=3, 64))
        .prop_filter_map("empty basis", |(w, d, shuffle, cs)| {
            let basis = T::basis(w, d);
            let n = basis.len();
            let terms: BTreeMap<_, _> = basis
                .into_iter()
                .enumerate()
                .filter_map(|(i, k)| {
                    let c = cs[(i + shuffle as usize % 64) % 64];
                    (c != 0).then(|| (k, ratio(c, 1)))
                })
                .collect();
            (n > 0 && !terms.is_empty()).then(|| T::unflatten(terms))
        })
        .boxed()
}

fn jet(dim: usize) -> impl Strategy<Value = Jet> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), 2 * MAX_ORDER as usize + 3)
        .prop_map(|orders| Jet::new(orders.into_iter().map(DVector::from_vec).collect()).unwrap())
}

fn any_jet() -> impl Strategy<Value = Jet> {
    prop::sample::select(vec![1usize, 2, 3, 5]).prop_flat_map(jet)
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_ring_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &ScalarPoly::one(), a);
    }

    #[test]
    fn module_axioms(a in scalar(), b in scalar(), v in vector(), w in vector(), m in bivector()) {
        prop_assert_eq!(&(&a + &b) * &v, &(&a * &v) + &(&b * &v));
        prop_assert_eq!(&a * &(&v + &w), &(&a * &v) + &(&a * &w));
        prop_assert_eq!(v.dot(&w), w.dot(&v));
        prop_assert_eq!(v.wedge(&w), -w.wedge(&v));
        prop_assert_eq!(&(&a * &m) + &(&b * &m), &(&a + &b) * &m);
    }

    #[test]
    fn d_x_obeys_leibniz(a in scalar(), b in scalar(), v in vector(), w in vector(), m in bivector()) {
        prop_assert_eq!((&a * &b).d_x(), &(&a.d_x() * &b) + &(&a * &b.d_x()));
        prop_assert_eq!((&a * &v).d_x(), &(&a.d_x() * &v) + &(&a * &v.d_x()));
        prop_assert_eq!(v.dot(&w).d_x(), &v.d_x().dot(&w) + &v.dot(&w.d_x()));
        prop_assert_eq!(m.apply(&v).d_x(), &m.d_x().apply(&v) + &m.apply(&v.d_x()));
    }

    #[test]
    fn text_form_round_trips(a in scalar(), v in vector(), m in bivector()) {
        prop_assert_eq!(a.to_string().parse::<ScalarPoly>().unwrap(), a);
        prop_assert_eq!(v.to_string().parse::<VectorPoly>().unwrap(), v);
        prop_assert_eq!(m.to_string().parse::<BivectorPoly>().unwrap(), m);
    }

    #[test]
    fn grading_is_additive(
        a in homogeneous::<ScalarPoly>(2..=6, &[2, 4]),
        b in homogeneous::<ScalarPoly>(2..=6, &[2, 4]),
        v in homogeneous::<VectorPoly>(1..=6, &[1, 3]),
    ) {
        let (wa, wb, wv) = (a.weight().unwrap(), b.weight().unwrap(), v.weight().unwrap());
        prop_assert_eq!(a.d_x().weight(), Some(wa + 1));
        prop_assert_eq!(v.d_x().weight(), Some(wv + 1));
        prop_assert_eq!((&a * &b).weight(), Some(wa + wb));
        prop_assert_eq!((&a * &v).weight(), Some(wa + wv));
    }

    #[test]
    fn d_x_inverse_undoes_d_x(a in scalar(), v in vector(), m in bivector()) {
        let a = &a - &ScalarPoly::constant(a.coeff(&Monomial::one()));
        prop_assert_eq!(a.d_x().d_x_inverse().unwrap(), a);
        prop_assert_eq!(v.d_x().d_x_inverse().unwrap(), v);
        prop_assert_eq!(m.d_x().d_x_inverse().unwrap(), m);
    }

    #[test]
    fn d_x_round_trips_on_exact_homogeneous_input(
        a in homogeneous::<ScalarPoly>(2..=9, &[2, 4]),
        v in homogeneous::<VectorPoly>(1..=9, &[1, 3, 5]),
        m in homogeneous::<BivectorPoly>(3..=9, &[2, 4]),
    ) {
        let (da, dv, dm) = (a.d_x(), v.d_x(), m.d_x());
        prop_assert_eq!(da.d_x_inverse().unwrap().d_x(), da);
        prop_assert_eq!(dv.d_x_inverse().unwrap().d_x(), dv);
        prop_assert_eq!(dm.d_x_inverse().unwrap().d_x(), dm);
    }

    #[test]
    fn euler_operator_annihilates_total_derivatives(a in scalar()) {
        prop_assert!(variational_derivative(&a.d_x()).is_zero());
    }

    #[test]
    fn non_exact_input_is_rejected(a in homogeneous::<ScalarPoly>(2..=10, &[2, 4])) {
        prop_assume!(!variational_derivative(&a).is_zero());
        let rejected = matches!(a.d_x_inverse(), Err(Error::NotExact { .. }));
        prop_assert!(rejected);
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in scalar(), b in scalar(), v in vector(), w in vector(), j in any_jet()) {
        let (ea, eb) = (a.eval(&j).unwrap(), b.eval(&j).unwrap());
        prop_assert!(close((&a + &b).eval(&j).unwrap(), ea + eb, ea.abs() + eb.abs()));
        prop_assert!(close((&a * &b).eval(&j).unwrap(), ea * eb, (ea * eb).abs()));
        let (ev, ew) = (v.eval(&j).unwrap(), w.eval(&j).unwrap());
        let dot = v.dot(&w).eval(&j).unwrap();
        prop_assert!(close(dot, ev.dot(&ew), ev.norm() * ew.norm()));
        let av = (&a * &v).eval(&j).unwrap();
        prop_assert!((av - &ev * ea).amax() <= 1e-12 * (1.0 + ev.amax() * ea.abs()));
        let wedge = v.wedge(&w).eval(&j).unwrap();
        let outer = &ev * ew.transpose() - &ew * ev.transpose();
        prop_assert!((wedge - outer).amax() <= 1e-12 * (1.0 + ev.amax() * ew.amax()));
    }

    #[test]
    fn d_x_matches_chain_rule_numerically(a in scalar(), j in any_jet()) {
        // D_x a = Σ_k <∂a/∂u_k, u_{k+1}>
        let lhs = a.d_x().eval(&j).unwrap();
        let mut rhs = 0.0;
        let mut scale = 0.0;
        for k in 0..=MAX_ORDER {
            let t = partial(&a, k).eval(&j).unwrap().dot(j.order(k + 1).unwrap());
            rhs += t;
            scale += t.abs();
        }
        prop_assert!(close(lhs, rhs, scale));
    }
}

fn lax_coeff() -> impl Strategy<Value = LaxCoeff> {
    (scalar(), vector(), vector(), bivector()).prop_map(|(a, v1, v2, w)| LaxCoeff { a, v1, v2, w })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lax_commutator_matches_matrices(x in lax_coeff(), y in lax_coeff(), j in any_jet()) {
        let (mx, my) = (x.eval(&j).unwrap(), y.eval(&j).unwrap());
        let want = &mx * &my - &my * &mx;
        let got = x.commutator(&y).eval(&j).unwrap();
        let scale = 1.0 + mx.amax() * my.amax() * mx.nrows() as f64;
        prop_assert!((got - want).amax() <= 1e-12 * scale);
    }

    #[test]
    fn lax_commutator_is_a_lie_bracket(x in lax_coeff(), y in lax_coeff(), z in lax_coeff()) {
        prop_assert_eq!(x.commutator(&y), y.commutator(&x).neg());
        let jacobi = x.commutator(&y.commutator(&z))
            .add(&y.commutator(&z.commutator(&x)))
            .add(&z.commutator(&x.commutator(&y)));
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn lax_json_round_trips(x in lax_coeff(), y in lax_coeff()) {
        let m = LaxMatrix::from_coeffs([(0, x), (3, y)]);
        prop_assert_eq!(LaxMatrix::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn lax_operators_respect_reductions(n in 0u32..=2, j in jet(3)) {
        let v = FlowTable::new().lax_v(n).unwrap();
        let samples = [Complex64::new(0.7, 0.2), Complex64::new(-1.1, 0.9)];
        let r = check_reduction_group(&v, &samples, &j).unwrap();
        prop_assert!(r.pass, "{}", r);
    }
}

fn soliton() -> impl Strategy<Value = SolitonParams> {
    (0.5f64..2.0, prop::collection::vec(-1.0f64..1.0, 2..=4)).prop_filter_map("degenerate", |(mu, v)| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (c0, c) = (v[0] / norm, v[1..].iter().map(|x| x / norm).collect::<Vec<_>>());
        (norm > 0.1 && c0.abs() < 0.99).then(|| SolitonParams::normalized(mu, c0, c).ok()).flatten()
    })
}

fn breather() -> impl Strategy<Value = BreatherParams> {
    (any::<u64>(), 1usize..=4).prop_map(|(seed, n)| {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let s = 1 + (seed as usize % ((n + 1) / 2));
        BreatherParams::new(random_pole(&mut rng), random_isotropic(&mut rng, n, s)).unwrap()
    })
}

fn times() -> impl Strategy<Value = TimeVector> {
    (-3.0f64..3.0, -0.5f64..0.5, -0.1f64..0.1).prop_map(|(x, t3, t5)| TimeVector::new(x).with(1, t3).with(2, t5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn soliton_q_is_isotropic(p in soliton(), t in times()) {
        let q = soliton_q(&p, &t);
        prop_assert!((q.transpose() * &q)[(0, 0)].norm() <= 1e-13 * q.norm_squared().max(1.0));
        let psi = soliton_q_from_psi(&p, &t);
        prop_assert!((psi.transpose() * &psi)[(0, 0)].norm() <= 1e-13 * psi.norm_squared().max(1.0));
    }

    #[test]
    fn breather_q_is_isotropic(p in breather(), t in times()) {
        let q = breather_q(&p, &t);
        let g = q.transpose() * &q;
        prop_assert!(g.iter().all(|z| z.norm() <= 1e-13 * q.norm_squared().max(1.0)));
    }

    #[test]
    fn dressing_reproduces_closed_form(p in soliton(), t in times()) {
        let dressed = dressing_apply(&soliton_q(&p, &t), p.mu, &DVector::zeros(p.dim())).unwrap();
        prop_assert!((dressed - one_soliton(&p, &t)).amax() < 1e-12);
    }

    #[test]
    fn breather_gauge_invariance(p in breather(), re in prop::collection::vec(-1.0f64..1.0, 16), t in times()) {
        let s = p.rank();
        let g = DMatrix::from_fn(s, s, |i, j| {
            Complex64::new(re[i * 4 + j], re[(i * 4 + j + 8) % 16]) + if i == j { Complex64::new(2.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        });
        let q = BreatherParams::new(p.mu, &p.c * g).unwrap();
        let x = t.x() / 3.0;
        let t = t.with(0, x);
        let (a, b) = (breather_dress(&p, &t).unwrap(), breather_dress(&q, &t).unwrap());
        prop_assert!((&a - &b).amax() < 1e-10, "{}", (a - b).amax());
    }

    #[test]
    fn soliton_scaling_symmetry(p in soliton(), eps in -0.5f64..0.5, x in -4.0f64..4.0, t3 in -0.5f64..0.5) {
        let scaled = SolitonParams { mu: (-eps).exp() * p.mu, ..p.clone() };
        let u = one_soliton(&p, &TimeVector::new(x).with(1, t3));
        let v = one_soliton(&scaled, &TimeVector::new(eps.exp() * x).with(1, (3.0 * eps).exp() * t3));
        prop_assert!((v - u * (-eps).exp()).amax() < 1e-12);
    }

    #[test]
    fn solutions_depend_on_times_through_phase(p in soliton(), t in times(), d in -0.5f64..0.5) {
        // t3 -> t3 + d is x -> x - μ²d
        let u = one_soliton(&p, &t.clone().with(1, t.get(1) + d));
        let v = one_soliton(&p, &t.clone().with(0, t.x() - p.mu * p.mu * d));
        prop_assert!((u - v).amax() < 1e-12);
    }
}
