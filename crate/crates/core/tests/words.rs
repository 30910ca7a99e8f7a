mod common;

use std::sync::Arc;

use common::*;
use flatmod_core::form::{fd_pushforward, FormField, Shape, SmoothMap, Tangent};
use flatmod_core::lie::*;
use flatmod_core::word::*;
use flatmod_core::Error;
use proptest::prelude::*;

fn letters(genus: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((1..=2 * genus, any::<bool>()), 0..14).prop_map(|v| {
        v.into_iter().map(|(g, inv)| if inv { Letter::x_inv(g) } else { Letter::x(g) }).collect()
    })
}

fn one() -> Chain1 {
    Chain1::word(Word::identity())
}

#[test]
fn gamma_table_genus_two() {
    let g = |j, t| gamma(2, j, t).unwrap().to_string();
    assert_eq!(g(1, 0), "1");
    assert_eq!(g(1, 1), "x1 x2 x1^-1");
    assert_eq!(g(2, 0), "x1");
    assert_eq!(g(2, 1), "x1 x2 x1^-1 x2^-1");
    assert_eq!(g(3, 0), "x1 x2 x1^-1 x2^-1");
    assert_eq!(g(3, 1), "x1 x2 x1^-1 x2^-1 x3 x4 x3^-1");
    assert_eq!(g(4, 0), "x1 x2 x1^-1 x2^-1 x3");
    assert_eq!(g(4, 1), "x1 x2 x1^-1 x2^-1 x3 x4 x3^-1 x4^-1");
    assert!(matches!(gamma(2, 5, 0), Err(Error::InvalidGenerator { index: 5, genus: 2 })));
}

#[test]
fn fox_derivatives_of_the_relator() {
    for genus in [2, 3] {
        let r = relator(genus).unwrap();
        for j in 1..=2 * genus {
            let mut expect = Chain1::word(gamma(genus, j, 0).unwrap());
            expect.add_term(gamma(genus, j, 1).unwrap(), -1);
            assert_eq!(fox_derivative(&r, j), expect, "g={genus} j={j}");
        }
    }
}

#[test]
fn boundary_of_fundamental_class() {
    for genus in [2, 3, 4] {
        let c = fundamental_class(genus).unwrap();
        assert_eq!(c.len(), 4 * genus);
        let mut expect = one();
        expect.add_term(relator(genus).unwrap(), -1);
        assert_eq!(bar_boundary(&c), expect, "g={genus}");
    }
}

#[test]
fn bar_boundary_of_a_pair() {
    let (a, b) = (Word::x(1), Word::x(2));
    let d = bar_boundary(&Chain2::pair(a.clone(), b.clone()));
    assert_eq!(d.coefficient(&a), 1);
    assert_eq!(d.coefficient(&b), 1);
    assert_eq!(d.coefficient(&a.mul(&b)), -1);
    assert_eq!(d.augmentation(), 1);
}

#[test]
fn parse_display_roundtrip() {
    let s = "x1 x3^-1 x2 x2";
    let w: Word = s.parse().unwrap();
    assert_eq!(w.to_string(), s);
    assert_eq!(Word::identity().to_string(), "1");
    assert!(Word::parse("1", 2).unwrap().is_identity());
    assert!(matches!(Word::parse("x1^2", 2), Err(Error::Parse(_))));
}

#[test]
fn evaluation_of_the_relator() {
    let mut rng = rng_from_seed(21);
    let h = groups(2, 4, &mut rng);
    let ev = WordMap::evaluation(2, 2, &[relator(2).unwrap()]).unwrap();
    let got = ev.eval_groups(&h).remove(0);
    let comm = |a: &GroupElement, b: &GroupElement| a.mul(b).mul(&a.inverse()).mul(&b.inverse());
    let want = comm(&h[0], &h[1]).mul(&comm(&h[2], &h[3]));
    assert!(got.distance(&want) < 1e-13);
    assert!(WordMap::evaluation(2, 2, &[Word::x(5)]).is_err());
}

#[test]
fn word_map_composition_and_description() {
    let n = 2;
    let outer = WordMap::new(n, 2, vec![vec![Symbol::Var(0), Symbol::Inv(1)]]).unwrap();
    let inner = WordMap::new(n, 2, vec![vec![Symbol::Var(1)], vec![Symbol::Var(0), Symbol::Var(1)]]).unwrap();
    let comp = outer.compose(&inner).unwrap();
    assert_eq!(describe(&comp), "(h2 h2^-1 h1^-1)");
    let mut rng = rng_from_seed(22);
    let h = groups(n, 2, &mut rng);
    let a = comp.eval_groups(&h).remove(0);
    let b = outer.eval_groups(&inner.eval_groups(&h)).remove(0);
    assert!(a.distance(&b) < 1e-13);
    assert!(a.distance(&h[0].inverse()) < 1e-13);
}

/// The slant pairing of a degree-1 chain is the matching combination of pullbacks.
#[test]
fn slant_pairing_is_linear_in_the_chain() {
    let n = 2;
    let genus = 2;
    let mut rng = rng_from_seed(23);
    let a = unit(n, &mut rng);
    let form = FormField::new(Shape::groups(1, n), 1, move |x, vs| {
        Ok(C64::new(x.group(0).trace().re * a.inner(vs[0].lie_component(0)), 0.0))
    });
    let w1 = Word::parse("x1 x2", genus).unwrap();
    let w2 = Word::parse("x4^-1", genus).unwrap();
    let mut chain = Chain1::word(w1.clone());
    chain.add_term(w2.clone(), -3);
    let paired = slant_pair(&BarChain::One(chain), &form, genus).unwrap();
    let x = group_point(n, 4, &mut rng);
    let v = lie_tangent(n, 4, &mut rng);
    let pull = |w: &Word| {
        let map = WordMap::evaluation(n, genus, std::slice::from_ref(w)).unwrap();
        form.pullback(Arc::new(map)).unwrap().value(&x, std::slice::from_ref(&v)).unwrap()
    };
    let want = pull(&w1) - pull(&w2) * 3.0;
    assert!((paired.value(&x, std::slice::from_ref(&v)).unwrap() - want).norm() < 1e-13);
    let empty = slant_pair(&BarChain::One(Chain1::zero()), &form, genus).unwrap();
    assert_eq!(empty.value(&x, &[v]).unwrap(), C64::new(0.0, 0.0));
    // bar degree must match the form level
    assert!(slant_pair(&BarChain::Two(fundamental_class(genus).unwrap()), &form, genus).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn reduction_is_idempotent(ls in letters(3)) {
        let w = Word::reduce(ls.clone());
        prop_assert_eq!(Word::reduce(w.letters().to_vec()), w.clone());
        for pair in w.letters().windows(2) {
            prop_assert!(pair[0] != pair[1].inverse());
        }
        prop_assert!(w.mul(&w.inverse()).is_identity());
        let parsed: Word = w.to_string().parse().unwrap();
        prop_assert_eq!(parsed, w);
    }

    #[test]
    fn abelianization_is_additive(a in letters(2), b in letters(2)) {
        let (u, v) = (Word::reduce(a), Word::reduce(b));
        let sum: Vec<i64> = u.abelianization(2).iter().zip(v.abelianization(2)).map(|(x, y)| x + y).collect();
        prop_assert_eq!(u.mul(&v).abelianization(2), sum);
    }

    #[test]
    fn fox_fundamental_formula(ls in letters(3)) {
        // w - 1 = sum_j (dw/dx_j)(x_j - 1)
        let w = Word::reduce(ls);
        let mut rhs = Chain1::zero();
        for j in 1..=6 {
            let mut xm1 = Chain1::word(Word::x(j));
            xm1.add_term(Word::identity(), -1);
            rhs = rhs.add(&fox_derivative(&w, j).mul(&xm1));
        }
        prop_assert_eq!(rhs, Chain1::word(w).sub(&one()));
    }

    #[test]
    fn fox_product_rule(a in letters(2), b in letters(2), j in 1usize..=4) {
        let (u, v) = (Word::reduce(a), Word::reduce(b));
        let lhs = fox_derivative(&u.mul(&v), j);
        let rhs = fox_derivative(&u, j).add(&fox_derivative(&v, j).left_mul(&u));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fox_derivatives_give_the_pushforward(ls in letters(2), seed in any::<u64>()) {
        // right-trivialized: d rho(w) rho(w)^-1 = sum_j rho(dw/dx_j) . Ad(h_j) xi_j
        let (n, genus) = (2, 2);
        let w = Word::reduce(ls);
        let mut rng = rng_from_seed(seed);
        let h = groups(n, 4, &mut rng);
        let xi: Vec<AlgebraElement> = (0..4).map(|_| unit(n, &mut rng)).collect();
        let ev = WordMap::evaluation(n, genus, std::slice::from_ref(&w)).unwrap();
        let rw = ev.eval_groups(&h).remove(0);
        let left = ev.push_lie(&h, &xi).remove(0);
        let mut right = AlgebraElement::zero(n);
        for j in 1..=4 {
            let hx = h[j - 1].adjoint(&xi[j - 1]);
            for (u, k) in fox_derivative(&w, j).terms() {
                let ru = WordMap::evaluation(n, genus, std::slice::from_ref(u)).unwrap().eval_groups(&h).remove(0);
                right += &ru.adjoint(&hx).scale(k as f64);
            }
        }
        prop_assert!((&rw.adjoint(&left) - &right).is_zero(1e-11));
    }

    #[test]
    fn evaluation_pushforward_matches_finite_difference(ls in letters(2), seed in any::<u64>()) {
        let n = 3;
        let w = Word::reduce(ls);
        let ev = WordMap::evaluation(n, 2, &[w.clone(), w.inverse().mul(&Word::x(1))]).unwrap();
        let mut rng = rng_from_seed(seed);
        let x = group_point(n, 4, &mut rng);
        let v = lie_tangent(n, 4, &mut rng);
        let exact: Tangent = ev.push(&x, &v).unwrap();
        let fd = fd_pushforward(&ev, &x, &v, 1e-6).unwrap();
        prop_assert!(exact.axpy(-1.0, &fd).norm() < 1e-7 * (1.0 + w.len() as f64));
    }
}
