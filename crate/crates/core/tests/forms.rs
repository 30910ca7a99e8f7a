mod common;

use std::sync::Arc;

use common::*;
use flatmod_core::form::*;
use flatmod_core::lie::*;
use flatmod_core::word::{Symbol, WordMap};
use flatmod_core::Error;
use proptest::prelude::*;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn traceless_part(g: &GroupElement) -> AlgebraElement {
    AlgebraElement::project(g.matrix())
}

/// `(g; xi) -> <a_i, xi_i>` on `K^m`.
fn left_one_form(a: Vec<AlgebraElement>) -> FormField {
    let m = a.len();
    let n = a[0].size();
    FormField::new(Shape::groups(m, n), 1, move |_, vs| {
        Ok(c((0..m).map(|i| a[i].inner(vs[0].lie_component(i))).sum()))
    })
}

/// A non-invariant smooth 1-form on `K^2` with nonconstant coefficients.
fn wiggly_one_form(n: usize, seed: u64) -> FormField {
    let mut rng = rng_from_seed(seed);
    let (a, b, e) = (unit(n, &mut rng), unit(n, &mut rng), unit(n, &mut rng));
    FormField::new(Shape::groups(2, n), 1, move |x, vs| {
        let (g, h) = (x.group(0), x.group(1));
        let coeff = traceless_part(&g.mul(h)).inner(&e);
        let v = vs[0].lie_component(0).inner(&g.adjoint(&a)) + h.adjoint(vs[0].lie_component(1)).inner(&b);
        Ok(c((coeff + g.trace().re) * v))
    })
}

/// `(g; u, v) -> <u_0, Ad(g_1) v_1> - <v_0, Ad(g_1) u_1>` times a coefficient.
fn wiggly_two_form(n: usize) -> FormField {
    FormField::new(Shape::groups(2, n), 2, move |x, vs| {
        let (g, h) = (x.group(0), x.group(1));
        let (u0, u1) = (vs[0].lie_component(0), vs[0].lie_component(1));
        let (v0, v1) = (vs[1].lie_component(0), vs[1].lie_component(1));
        let coeff = 1.0 + g.mul(h).trace().re;
        Ok(c(coeff * (u0.inner(&h.adjoint(v1)) - v0.inner(&h.adjoint(u1)))))
    })
}

fn point2(n: usize, seed: u64) -> Point {
    group_point(n, 2, &mut rng_from_seed(seed))
}

#[test]
fn derivative_of_trace_function() {
    let mut rng = rng_from_seed(1);
    let a = sample_algebra(3, &mut rng);
    let am = a.matrix().clone();
    let f = FormField::new(Shape::groups(1, 3), 0, move |x, _| Ok(c((&am * x.group(0).matrix()).trace().re)));
    let df = f.exterior_derivative(FdConfig::default());
    let x = group_point(3, 1, &mut rng);
    let xi = unit(3, &mut rng);
    let exact = (a.matrix() * x.group(0).matrix() * xi.matrix()).trace().re;
    let got = df.evaluate(&x, &[Tangent::lie(vec![xi])]).unwrap();
    assert!((got.re - exact).abs() < 1e-9);
}

#[test]
fn maurer_cartan_equations() {
    let mut rng = rng_from_seed(2);
    for n in [2, 3] {
        let a = unit(n, &mut rng);
        let x = group_point(n, 1, &mut rng);
        let (u, v) = (unit(n, &mut rng), unit(n, &mut rng));
        let tv = [Tangent::lie(vec![u.clone()]), Tangent::lie(vec![v.clone()])];
        // d<A, theta>(u, v) = -<A, [u, v]>
        let left = left_one_form(vec![a.clone()]).exterior_derivative(FdConfig::default());
        assert!((left.evaluate(&x, &tv).unwrap().re + a.inner(&u.bracket(&v))).abs() < 1e-9);
        // d<A, thetabar>(u, v) = <A, [Ad u, Ad v]>
        let a2 = a.clone();
        let right = FormField::new(Shape::groups(1, n), 1, move |x, vs| {
            Ok(c(a2.inner(&x.group(0).adjoint(vs[0].lie_component(0)))))
        })
        .exterior_derivative(FdConfig::default());
        let g = x.group(0);
        let exact = a.inner(&g.adjoint(&u).bracket(&g.adjoint(&v)));
        assert!((right.evaluate(&x, &tv).unwrap().re - exact).abs() < 1e-9);
    }
}

#[test]
fn d_squared_vanishes() {
    let fd = FdConfig { step: 1e-4 };
    for n in [2, 3] {
        let mut rng = rng_from_seed(3 + n as u64);
        let x = group_point(n, 2, &mut rng);
        let one = wiggly_one_form(n, 7);
        let dd = one.exterior_derivative(fd).exterior_derivative(fd);
        let vs = lie_tangents(n, 2, 3, &mut rng);
        assert!(dd.evaluate(&x, &vs).unwrap().norm() < 1e-6, "1-form N={n}");
        let two = wiggly_two_form(n);
        let dd2 = two.exterior_derivative(fd).exterior_derivative(fd);
        let vs = lie_tangents(n, 2, 4, &mut rng);
        assert!(dd2.evaluate(&x, &vs).unwrap().norm() < 1e-6, "2-form N={n}");
    }
}

#[test]
fn d_is_a_graded_derivation() {
    let n = 2;
    let mut rng = rng_from_seed(4);
    let x = group_point(n, 2, &mut rng);
    let fd = FdConfig::default();
    let a = wiggly_one_form(n, 8);
    let b = wiggly_two_form(n);
    let lhs = a.wedge(&b).unwrap().exterior_derivative(fd);
    let rhs = a
        .exterior_derivative(fd)
        .wedge(&b)
        .unwrap()
        .sub(&a.wedge(&b.exterior_derivative(fd)).unwrap())
        .unwrap();
    let vs = lie_tangents(n, 2, 4, &mut rng);
    let (l, r) = (lhs.value(&x, &vs).unwrap(), rhs.value(&x, &vs).unwrap());
    assert!((l - r).norm() < 1e-8, "{l} vs {r}");
}

#[test]
fn interior_product_is_a_graded_derivation() {
    let n = 3;
    let mut rng = rng_from_seed(5);
    let x = group_point(n, 2, &mut rng);
    let a = wiggly_one_form(n, 9);
    let b = wiggly_two_form(n);
    let field = VectorField::generated(vec![Action::Conjugation; 2], unit(n, &mut rng));
    let lhs = a.wedge(&b).unwrap().interior_product(field.clone()).unwrap();
    let rhs = a
        .interior_product(field.clone())
        .unwrap()
        .wedge(&b)
        .unwrap()
        .sub(&a.wedge(&b.interior_product(field).unwrap()).unwrap())
        .unwrap();
    let vs = lie_tangents(n, 2, 2, &mut rng);
    assert!((lhs.value(&x, &vs).unwrap() - rhs.value(&x, &vs).unwrap()).norm() < 1e-12);
}

#[test]
fn interior_product_of_a_function_is_an_error() {
    let f = FormField::constant(Shape::groups(1, 2), c(1.0));
    assert!(f.interior_product(VectorField::constant(Tangent::zero(&Shape::groups(1, 2)))).is_err());
}

#[test]
fn evaluation_is_validated() {
    let f = wiggly_one_form(2, 1);
    let x = point2(2, 1);
    let mut rng = rng_from_seed(6);
    assert!(matches!(f.evaluate(&x, &[]), Err(Error::ArityMismatch { .. })));
    let short = group_point(2, 1, &mut rng);
    assert!(f.evaluate(&short, &[lie_tangent(2, 1, &mut rng)]).is_err());
    let wrong = group_point(3, 2, &mut rng);
    assert!(f.evaluate(&wrong, &[lie_tangent(3, 2, &mut rng)]).is_err());
}

#[test]
fn pullback_commutes_with_d() {
    // m(a, b) = (a b, b^-1)
    let n = 2;
    let map: Arc<dyn SmoothMap> = Arc::new(
        WordMap::new(n, 2, vec![vec![Symbol::Var(0), Symbol::Var(1)], vec![Symbol::Inv(1)]]).unwrap(),
    );
    let fd = FdConfig::default();
    let a = wiggly_one_form(n, 10);
    let lhs = a.pullback(map.clone()).unwrap().exterior_derivative(fd);
    let rhs = a.exterior_derivative(fd).pullback(map).unwrap();
    let mut rng = rng_from_seed(7);
    let x = group_point(n, 2, &mut rng);
    let vs = lie_tangents(n, 2, 2, &mut rng);
    assert!((lhs.value(&x, &vs).unwrap() - rhs.value(&x, &vs).unwrap()).norm() < 1e-8);
}

#[test]
fn composition_and_identity() {
    let n = 3;
    let m1: Arc<dyn SmoothMap> = Arc::new(WordMap::new(n, 2, vec![vec![Symbol::Var(1), Symbol::Var(0)]]).unwrap());
    let id: Arc<dyn SmoothMap> = Arc::new(IdentityMap(Shape::groups(2, n)));
    let comp = Composition::new(m1.clone(), id).unwrap();
    let mut rng = rng_from_seed(8);
    let x = group_point(n, 2, &mut rng);
    let v = lie_tangent(n, 2, &mut rng);
    let (a, b) = (comp.push(&x, &v).unwrap(), m1.push(&x, &v).unwrap());
    assert!((a.lie_component(0) - b.lie_component(0)).is_zero(1e-14));
    assert!(Composition::new(m1.clone(), m1).is_err());
}

#[test]
fn word_map_pushforward_matches_finite_difference() {
    let n = 3;
    let map = WordMap::new(
        n,
        3,
        vec![
            vec![Symbol::Var(0), Symbol::Inv(1), Symbol::Var(2)],
            vec![Symbol::Inv(2), Symbol::Const(CentralElement::new(n, 1)), Symbol::Var(0)],
        ],
    )
    .unwrap();
    let mut rng = rng_from_seed(9);
    for _ in 0..5 {
        let x = group_point(n, 3, &mut rng);
        let v = lie_tangent(n, 3, &mut rng);
        let exact = map.push(&x, &v).unwrap();
        let fd = fd_pushforward(&map, &x, &v, 1e-6).unwrap();
        assert!(exact.axpy(-1.0, &fd).norm() < 1e-8);
    }
}

fn action_orbit_velocity(actions: &[Action], phi: &AlgebraElement, x: &Point) -> Tangent {
    let (acts, phi2, x2) = (actions.to_vec(), phi.clone(), x.clone());
    let orbit = FnMap::new(
        Shape::new(vec![Factor::Vector(1)]).unwrap(),
        x.coords().iter().map(|c| match c {
            Coord::Group(g) => Factor::Group(g.size()),
            Coord::Algebra(a) => Factor::Algebra(a.size()),
            _ => unreachable!(),
        })
        .collect::<Vec<_>>()
        .pipe(|f| Shape::new(f).unwrap()),
        move |s| {
            let s = match &s.coords()[0] {
                Coord::Vector(v) => v[0],
                _ => unreachable!(),
            };
            Ok(act(&acts, &exp_map(&phi2.scale(s)), &x2))
        },
        |_, _| unreachable!(),
    );
    let s0 = Point::new(vec![Coord::Vector(vec![0.0])]);
    let ds = Tangent::new(vec![TangentComponent::Vector(vec![1.0])]);
    fd_pushforward(&orbit, &s0, &ds, 1e-6).unwrap()
}

trait Pipe: Sized {
    fn pipe<T>(self, f: impl FnOnce(Self) -> T) -> T {
        f(self)
    }
}
impl<T> Pipe for T {}

#[test]
fn generating_fields_are_orbit_velocities() {
    let n = 3;
    let mut rng = rng_from_seed(10);
    let phi = unit(n, &mut rng);
    let x = Point::new(vec![
        Coord::Group(sample_group(n, &mut rng)),
        Coord::Group(sample_group(n, &mut rng)),
        Coord::Algebra(sample_algebra(n, &mut rng)),
    ]);
    let actions = [Action::Conjugation, Action::LeftMultiplication, Action::Adjoint];
    let exact = generating_field(&actions, &phi, &x);
    let fd = action_orbit_velocity(&actions, &phi, &x);
    assert!(exact.axpy(-1.0, &fd).norm() < 1e-8);
}

#[test]
fn generating_fields_are_equivariant() {
    let n = 2;
    let mut rng = rng_from_seed(11);
    let actions = [Action::Conjugation, Action::LeftMultiplication];
    let x = group_point(n, 2, &mut rng);
    let (phi, k) = (unit(n, &mut rng), sample_group(n, &mut rng));
    let lhs = act_tangent(&actions, &k, &generating_field(&actions, &phi, &x));
    let rhs = generating_field(&actions, &k.adjoint(&phi), &act(&actions, &k, &x));
    assert!(lhs.axpy(-1.0, &rhs).norm() < 1e-12);
}

#[test]
fn actions_must_fit_the_shape() {
    assert!(EquivariantFormField::zero(Shape::groups(1, 2), 0, vec![Action::Adjoint]).is_err());
    assert!(EquivariantFormField::zero(Shape::groups(1, 2), 0, vec![]).is_err());
    assert!(EquivariantFormField::zero(Shape::algebra(2), 0, vec![Action::Adjoint]).is_ok());
}

/// An invariant equivariant form of total degree 2 on `K` with conjugation:
/// arity 2 is `(1 + Re tr g) (<u, Ad g v> - <v, Ad g u>)`, arity 0 is `<phi, P(g)>`.
fn invariant_degree_two(n: usize) -> EquivariantFormField {
    EquivariantFormField::new(Shape::groups(1, n), 2, vec![Action::Conjugation], |phi, x, vs| {
        let g = x.group(0);
        Ok(match vs.len() {
            2 => {
                let (u, v) = (vs[0].lie_component(0), vs[1].lie_component(0));
                c((1.0 + g.trace().re) * (u.inner(&g.adjoint(v)) - v.inner(&g.adjoint(u))))
            }
            0 => c(phi.inner(&traceless_part(g))),
            _ => c(0.0),
        })
    })
    .unwrap()
}

#[test]
fn cartan_differential_squares_to_zero_on_invariant_forms() {
    let fd = FdConfig { step: 1e-4 };
    for n in [2, 3] {
        let f = invariant_degree_two(n);
        let dd = f.cartan_differential(fd).cartan_differential(fd);
        let mut rng = rng_from_seed(12 + n as u64);
        let x = group_point(n, 1, &mut rng);
        let phi = sample_algebra(n, &mut rng);
        for arity in [0, 2, 4] {
            let vs = lie_tangents(n, 1, arity, &mut rng);
            let v = dd.evaluate(&phi, &x, &vs).unwrap();
            assert!(v.norm() < 1e-6, "N={n} arity={arity}: {v}");
        }
    }
}

#[test]
fn invariant_forms_are_invariant() {
    let n = 3;
    let f = invariant_degree_two(n);
    let mut rng = rng_from_seed(14);
    let x = group_point(n, 1, &mut rng);
    let (phi, k) = (sample_algebra(n, &mut rng), sample_group(n, &mut rng));
    let vs = lie_tangents(n, 1, 2, &mut rng);
    let acts = f.actions().to_vec();
    let moved: Vec<Tangent> = vs.iter().map(|v| act_tangent(&acts, &k, v)).collect();
    for arity in [0, 2] {
        let a = f.value(&phi, &x, &vs[..arity]).unwrap();
        let b = f.value(&k.adjoint(&phi), &act(&acts, &k, &x), &moved[..arity]).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn equivariant_pullback_commutes_with_cartan_differential() {
    let n = 2;
    let map: Arc<dyn SmoothMap> =
        Arc::new(WordMap::new(n, 2, vec![vec![Symbol::Var(0), Symbol::Var(1)]]).unwrap());
    let fd = FdConfig::default();
    let f = invariant_degree_two(n);
    let acts = vec![Action::Conjugation; 2];
    let lhs = f.pullback(map.clone(), acts.clone()).unwrap().cartan_differential(fd);
    let rhs = f.cartan_differential(fd).pullback(map, acts).unwrap();
    let mut rng = rng_from_seed(15);
    let x = group_point(n, 2, &mut rng);
    let phi = sample_algebra(n, &mut rng);
    for arity in [1, 3] {
        let vs = lie_tangents(n, 2, arity, &mut rng);
        let (a, b) = (lhs.value(&phi, &x, &vs).unwrap(), rhs.value(&phi, &x, &vs).unwrap());
        assert!((a - b).norm() < 1e-8, "arity {arity}");
    }
}

#[test]
fn phi_degree_bookkeeping() {
    let f = invariant_degree_two(2);
    assert_eq!(f.arities(), vec![2, 0]);
    assert_eq!(f.phi_degree(0), Some(1));
    assert_eq!(f.phi_degree(1), None);
    let x = point2(2, 3).group_elements()[..1].to_vec();
    let mut rng = rng_from_seed(16);
    let odd = lie_tangents(2, 1, 1, &mut rng);
    assert_eq!(f.value(&unit(2, &mut rng), &Point::groups(x), &odd).unwrap(), c(0.0));
}

#[test]
fn simplex_boundary_is_rejected_by_finite_differences() {
    let shape = Shape::simplex_groups(1, 2);
    let f = FormField::new(shape, 0, |x, _| Ok(c(x.simplex(0)[0])));
    let df = f.exterior_derivative(FdConfig::default());
    let x = Point::new(vec![Coord::Simplex(vec![1.0, 0.0]), Coord::Group(GroupElement::identity(2)), Coord::Group(GroupElement::identity(2))]);
    let v = Tangent::new(vec![
        TangentComponent::Simplex(vec![1.0, -1.0]),
        TangentComponent::Lie(AlgebraElement::zero(2)),
        TangentComponent::Lie(AlgebraElement::zero(2)),
    ]);
    assert!(matches!(df.evaluate(&x, &[v]), Err(Error::SimplexBoundary { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn forms_are_multilinear_and_alternating(seed in any::<u64>(), s in -2.0f64..2.0) {
        let n = 2;
        let mut rng = rng_from_seed(seed);
        let f = wiggly_one_form(n, seed ^ 1).wedge(&wiggly_two_form(n)).unwrap();
        let x = group_point(n, 2, &mut rng);
        let vs = lie_tangents(n, 2, 3, &mut rng);
        let w = lie_tangent(n, 2, &mut rng);
        let base = f.value(&x, &vs).unwrap();
        let swapped = f.value(&x, &[vs[1].clone(), vs[0].clone(), vs[2].clone()]).unwrap();
        prop_assert!((base + swapped).norm() < 1e-12);
        let comb = f.value(&x, &[vs[0].axpy(s, &w), vs[1].clone(), vs[2].clone()]).unwrap();
        let sep = base + f.value(&x, &[w, vs[1].clone(), vs[2].clone()]).unwrap() * s;
        prop_assert!((comb - sep).norm() < 1e-11);
        let rep = f.value(&x, &[vs[0].clone(), vs[0].clone(), vs[2].clone()]).unwrap();
        prop_assert!(rep.norm() < 1e-12);
    }

    #[test]
    fn wedge_is_graded_commutative_and_associative(seed in any::<u64>()) {
        let n = 2;
        let mut rng = rng_from_seed(seed);
        let a = wiggly_one_form(n, seed);
        let b = wiggly_one_form(n, seed.wrapping_add(1));
        let w = wiggly_two_form(n);
        let x = group_point(n, 2, &mut rng);
        let vs = lie_tangents(n, 2, 3, &mut rng);
        let ab = a.wedge(&b).unwrap().value(&x, &vs[..2]).unwrap();
        let ba = b.wedge(&a).unwrap().value(&x, &vs[..2]).unwrap();
        prop_assert!((ab + ba).norm() < 1e-12);
        let aw = a.wedge(&w).unwrap().value(&x, &vs).unwrap();
        let wa = w.wedge(&a).unwrap().value(&x, &vs).unwrap();
        prop_assert!((aw - wa).norm() < 1e-12);
        let l = a.wedge(&b).unwrap().wedge(&a).unwrap().value(&x, &vs).unwrap();
        let r = a.wedge(&b.wedge(&a).unwrap()).unwrap().value(&x, &vs).unwrap();
        prop_assert!((l - r).norm() < 1e-12 && l.norm() < 1e-12);
    }
}
