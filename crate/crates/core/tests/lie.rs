mod common;

use flatmod_core::lie::*;
use flatmod_core::quadrature::{simplex_monomial_integral, SimplexRule};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn elementary_symmetric(vals: &[f64], r: usize) -> f64 {
    let mut e = vec![0.0; r + 1];
    e[0] = 1.0;
    for &v in vals {
        for k in (1..=r).rev() {
            e[k] += e[k - 1] * v;
        }
    }
    e[r]
}

// det(I + (i/2pi) X) from the eigenvalues of the Hermitian matrix (i/2pi) X.
fn chern_oracle(x: &AlgebraElement, r: usize) -> f64 {
    let h: DMatrix<C64> = x.matrix() * C64::new(0.0, 1.0 / std::f64::consts::TAU);
    let eig = h.symmetric_eigenvalues();
    let vals: Vec<f64> = eig.iter().copied().collect();
    elementary_symmetric(&vals, r)
}

#[test]
fn chern_diagonal_matches_characteristic_polynomial() {
    let mut rng = rng_from_seed(11);
    for n in 2..=4 {
        for r in 1..=n {
            let q = InvariantPolynomial::chern(n, r).unwrap();
            for _ in 0..5 {
                let x = sample_algebra(n, &mut rng);
                let v = q.eval_diagonal(&x).unwrap();
                let o = chern_oracle(&x, r);
                assert!((v.re - o).abs() < 1e-12 && v.im.abs() < 1e-12, "N={n} r={r}: {v} vs {o}");
            }
        }
    }
}

#[test]
fn chern_is_polarization_of_diagonal() {
    let mut rng = rng_from_seed(12);
    for (n, r) in [(2, 2), (3, 2), (3, 3), (4, 3)] {
        let q = InvariantPolynomial::chern(n, r).unwrap();
        let xs: Vec<AlgebraElement> = (0..r).map(|_| sample_algebra(n, &mut rng)).collect();
        let refs: Vec<&AlgebraElement> = xs.iter().collect();
        let direct = q.eval(&refs).unwrap();
        let mut pol = 0.0;
        for mask in 1u32..(1 << r) {
            let mut s = AlgebraElement::zero(n);
            for (i, x) in xs.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    s += x;
                }
            }
            let sign = if (r - mask.count_ones() as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
            pol += sign * chern_oracle(&s, r);
        }
        let fact: f64 = (1..=r).map(|k| k as f64).product();
        assert!((direct.re - pol / fact).abs() < 1e-12, "N={n} r={r}");
    }
}

#[test]
fn chern_quadratic_is_scaled_inner_product() {
    let mut rng = rng_from_seed(13);
    let q = InvariantPolynomial::chern(3, 2).unwrap();
    let ip = InvariantPolynomial::inner_product(3);
    let (x, y) = (sample_algebra(3, &mut rng), sample_algebra(3, &mut rng));
    let a = q.eval(&[&x, &y]).unwrap().re;
    let b = ip.eval(&[&x, &y]).unwrap().re;
    let c = -1.0 / (8.0 * std::f64::consts::PI.powi(2));
    assert!((a - c * b).abs() < 1e-14);
}

#[test]
fn polynomials_are_symmetric_and_invariant() {
    let mut rng = rng_from_seed(14);
    let q = InvariantPolynomial::chern(3, 3).unwrap();
    let xs: Vec<AlgebraElement> = (0..3).map(|_| sample_algebra(3, &mut rng)).collect();
    let base = q.eval(&[&xs[0], &xs[1], &xs[2]]).unwrap();
    let swapped = q.eval(&[&xs[2], &xs[0], &xs[1]]).unwrap();
    assert!((base - swapped).norm() < 1e-14);
    let k = sample_group(3, &mut rng);
    let ys: Vec<AlgebraElement> = xs.iter().map(|x| k.adjoint(x)).collect();
    let moved = q.eval(&[&ys[0], &ys[1], &ys[2]]).unwrap();
    assert!((base - moved).norm() < 1e-14);
}

#[test]
fn degree_outside_range_is_rejected() {
    assert!(InvariantPolynomial::chern(2, 3).is_err());
    assert!(InvariantPolynomial::chern(2, 0).is_err());
}

#[test]
fn su2_basis_brackets() {
    let e = |j| su2_standard(j);
    assert!((&e(1).bracket(&e(2)) - &e(3)).is_zero(1e-15));
    assert!((&e(2).bracket(&e(3)) - &e(1)).is_zero(1e-15));
    assert!((e(1).inner(&e(1)) - 0.5).abs() < 1e-15);
}

#[test]
fn haar_second_moment_of_trace() {
    // E |tr g|^2 = 1 on SU(N), N >= 2.
    let mut rng = rng_from_seed(15);
    for n in [2, 3] {
        let count = 20_000;
        let m: f64 = (0..count).map(|_| sample_group(n, &mut rng).trace().norm_sqr()).sum::<f64>() / count as f64;
        assert!((m - 1.0).abs() < 0.05, "N={n}: {m}");
    }
}

#[test]
fn group_elements_are_special_unitary() {
    let mut rng = rng_from_seed(16);
    for n in 2..=4 {
        let g = sample_group(n, &mut rng);
        assert!(GroupElement::new(g.matrix().clone()).is_ok());
        assert!(g.mul(&g.inverse()).distance(&GroupElement::identity(n)) < 1e-13);
    }
}

#[test]
fn exp_differential_matches_finite_difference() {
    let mut rng = rng_from_seed(17);
    for n in [2, 3] {
        let x = sample_algebra(n, &mut rng);
        let w = sample_unit_algebra(n, &mut rng);
        let h = 1e-6;
        let gp = exp_map(&(&x + &w.scale(h)));
        let gm = exp_map(&(&x - &w.scale(h)));
        let g = exp_map(&x);
        // left-trivialized: g^{-1} dg
        let fd = (g.inverse().matrix() * (gp.matrix() - gm.matrix())) / C64::new(2.0 * h, 0.0);
        let an = exp_differential(&x, &w);
        assert!((fd - an.matrix()).norm() < 1e-8, "N={n}");
        let back = exp_differential_inverse(&x, &an).unwrap();
        assert!((&back - &w).is_zero(1e-10));
    }
}

#[test]
fn log_rejects_the_branch_cut() {
    let g = CentralElement::new(2, 1).to_group();
    assert!(matches!(log_map(&g), Err(flatmod_core::Error::BranchCut { .. })));
}

#[test]
fn log_near_identity_and_on_degenerate_spectra() {
    let mut rng = rng_from_seed(11);
    for n in 2..=4 {
        let x = sample_unit_algebra(n, &mut rng);
        for s in [1e-3, 1e-7, 1e-11, 1e-14] {
            let small = x.scale(s);
            let back = log_map(&exp_map(&small)).unwrap();
            assert!((&back - &small).norm() < 1e-14, "N={n} s={s}");
        }
        // repeated eigenvalues, conjugated into a generic basis
        let k = sample_group(n, &mut rng);
        let mut d = vec![0.4; n];
        d[n - 1] = -0.4 * (n - 1) as f64;
        let diag = AlgebraElement::new(DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(0.0, d[i]) } else { C64::new(0.0, 0.0) })).unwrap();
        let y = k.adjoint(&diag);
        assert!((&log_map(&exp_map(&y)).unwrap() - &y).norm() < 1e-12, "N={n}");
        assert!(log_map(&GroupElement::identity(n)).unwrap().is_zero(1e-15));
    }
}

#[test]
fn central_elements() {
    for n in 2..=4 {
        for k in 0..n as i64 {
            let z = CentralElement::new(n, k);
            let g = z.to_group();
            assert!(GroupElement::new(g.matrix().clone()).is_ok());
            let h = sample_group_seeded(n, 3);
            assert!(g.mul(&h).distance(&h.mul(&g)) < 1e-14);
            assert!(z.inverse().to_group().mul(&g).distance(&GroupElement::identity(n)) < 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn bracket_is_antisymmetric_and_jacobi(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = rng_from_seed(seed);
        let (x, y, z) = (sample_algebra(n, &mut rng), sample_algebra(n, &mut rng), sample_algebra(n, &mut rng));
        prop_assert!((&x.bracket(&y) + &y.bracket(&x)).is_zero(1e-12));
        let jac = &(&x.bracket(&y.bracket(&z)) + &y.bracket(&z.bracket(&x))) + &z.bracket(&x.bracket(&y));
        prop_assert!(jac.is_zero(1e-11));
        // ad-invariance of the inner product
        prop_assert!((x.bracket(&y).inner(&z) + y.inner(&x.bracket(&z))).abs() < 1e-11);
    }

    #[test]
    fn adjoint_is_a_homomorphism(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = rng_from_seed(seed);
        let (g, h) = (sample_group(n, &mut rng), sample_group(n, &mut rng));
        let x = sample_algebra(n, &mut rng);
        prop_assert!((&g.mul(&h).adjoint(&x) - &g.adjoint(&h.adjoint(&x))).is_zero(1e-12));
        prop_assert!((&g.adjoint_inv(&g.adjoint(&x)) - &x).is_zero(1e-12));
    }

    #[test]
    fn exp_log_roundtrip(seed in any::<u64>(), n in 2usize..=4, scale in 0.05f64..1.5) {
        let mut rng = rng_from_seed(seed);
        let x = sample_unit_algebra(n, &mut rng).scale(scale);
        let g = exp_map(&x);
        let y = log_map(&g).unwrap();
        prop_assert!(exp_map(&y).distance(&g) < 1e-10);
        if scale < 1.0 {
            prop_assert!((&y - &x).is_zero(1e-9));
        }
    }

    #[test]
    fn coordinates_roundtrip(seed in any::<u64>(), n in 2usize..=4) {
        let x = sample_algebra_seeded(n, seed);
        let c = x.coords();
        prop_assert_eq!(c.len(), algebra_dim(n));
        prop_assert!((&AlgebraElement::from_coords(n, &c).unwrap() - &x).is_zero(1e-12));
    }
}

#[test]
fn grundmann_moller_integrates_monomials_exactly() {
    let mut rng = rng_from_seed(18);
    for dim in 1..=4 {
        for s in 0..=3 {
            let rule = SimplexRule::grundmann_moller(dim, s);
            for _ in 0..10 {
                let deg = rng.gen_range(0..=2 * s + 1);
                let mut exps = vec![0usize; dim + 1];
                for _ in 0..deg {
                    exps[rng.gen_range(0..=dim)] += 1;
                }
                let q: f64 = rule
                    .nodes()
                    .map(|(t, w)| w * t.iter().zip(&exps).map(|(ti, &a)| ti.powi(a as i32)).product::<f64>())
                    .sum();
                let exact = simplex_monomial_integral(&exps);
                assert!((q - exact).abs() < 1e-13 * (1.0 + exact), "dim={dim} s={s} {exps:?}");
            }
        }
    }
}

#[test]
fn simplex_moments_match_monte_carlo() {
    // uniform samples on the simplex via normalized exponentials
    let mut rng = rng_from_seed(19);
    let exps = [2usize, 1, 0];
    let count = 200_000;
    let mut acc = 0.0;
    for _ in 0..count {
        let e: Vec<f64> = (0..3).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let s: f64 = e.iter().sum();
        acc += (e[0] / s).powi(2) * (e[1] / s);
    }
    // volume of Delta^2 is 1/2
    let mc = 0.5 * acc / count as f64;
    let exact = simplex_monomial_integral(&exps);
    assert!((mc - exact).abs() < 0.02 * exact, "{mc} vs {exact}");
}
