//! The representation variety `Y_beta = {h in K^{2g} : R(h) = beta}`, the
//! extended moduli space in the graph chart `h -> (h, log(beta^-1 R(h)))`,
//! the generator forms, the Goldman form and its extension.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::form::{
    generating_field, Action, Coord, EquivariantFormField, Factor, FormField, Point, Shape, SmoothMap, Tangent,
    TangentComponent,
};
use crate::lie::{
    algebra_basis, algebra_dim, exp_differential, exp_differential_inverse, exp_map, log_map, pauli, rng_from_seed,
    sample_algebra, AlgebraElement, CentralElement, GroupElement, InvariantPolynomial, CMat, C64,
};
use crate::quadrature::{integrate_unit_interval, IntervalQuadrature};
use crate::simplicial::{bott_shulman, fibre_integral_exact};
use crate::word::{fundamental_class, gamma, relator, slant_pair, BarChain, Chain1, Symbol, Word, WordMap};

/// `N`, genus and the central element `beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuliConfig {
    pub size: usize,
    pub genus: usize,
    pub beta: CentralElement,
}

impl ModuliConfig {
    pub fn new(size: usize, genus: usize, beta_index: i64) -> Result<Self> {
        if genus < 2 {
            return Err(Error::InvalidGenus(genus));
        }
        if size < 2 {
            return Err(Error::Config(format!("N must be at least 2, got {size}")));
        }
        Ok(Self { size, genus, beta: CentralElement::new(size, beta_index) })
    }

    /// `N = 2`, `g = 2`, `beta = -I`.
    pub fn goldman() -> Self {
        Self::new(2, 2, 1).expect("valid")
    }

    pub fn generators(&self) -> usize {
        2 * self.genus
    }

    pub fn shape(&self) -> Shape {
        Shape::groups(self.generators(), self.size)
    }

    pub fn conjugation(&self) -> Vec<Action> {
        vec![Action::Conjugation; self.generators()]
    }

    /// `e_R : h -> R(h)`.
    pub fn epsilon_r(&self) -> Result<WordMap> {
        WordMap::evaluation(self.size, self.genus, &[relator(self.genus)?])
    }
}

/// `epsilon_R` of the configuration.
pub fn epsilon_r(cfg: &ModuliConfig) -> Result<WordMap> {
    cfg.epsilon_r()
}

/// A point of `Y_beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct YPoint {
    pub h: Vec<GroupElement>,
    /// `|R(h) - beta|` (Frobenius).
    pub residual: f64,
}

impl YPoint {
    pub fn point(&self) -> Point {
        Point::groups(self.h.clone())
    }
}

/// A chart point `(h, Lambda)` of the extended moduli space.
#[derive(Clone, Debug, PartialEq)]
pub struct XPoint {
    pub h: Vec<GroupElement>,
    pub lambda: AlgebraElement,
    /// `|R(h) - beta exp(Lambda)|`.
    pub residual: f64,
}

impl XPoint {
    pub fn point(&self) -> Point {
        Point::groups(self.h.clone())
    }
}

fn su_phase(m: CMat) -> GroupElement {
    let n = m.nrows();
    let det = m.determinant();
    let root = C64::from_polar(1.0, -det.arg() / n as f64);
    GroupElement::new(m * root).expect("unitary with unit determinant").renormalized()
}

/// Exact solution of `R(h) = beta` used to start the sampler.
///
/// For `N = 2`, `beta = -I` this is `(i sz, i sx, I, ..., I)`. Otherwise the
/// clock and shift matrices `C`, `S` with `C S C^-1 S^-1 = w I` give
/// `(C^k, S, I, ..., I)` for `beta = w^k`.
pub fn seed_solution(cfg: &ModuliConfig) -> Result<Vec<GroupElement>> {
    let n = cfg.size;
    let mut h = vec![GroupElement::identity(n); cfg.generators()];
    if n == 2 && cfg.beta.phase_index() == 1 {
        let i = C64::new(0.0, 1.0);
        h[0] = GroupElement::new(pauli(3) * i)?;
        h[1] = GroupElement::new(pauli(1) * i)?;
        return Ok(h);
    }
    let k = cfg.beta.phase_index();
    let w = |p: i64| C64::from_polar(1.0, core::f64::consts::TAU * p as f64 / n as f64);
    let clock = CMat::from_fn(n, n, |a, b| if a == b { w(k * a as i64) } else { C64::new(0.0, 0.0) });
    let shift = CMat::from_fn(n, n, |a, b| if a == (b + 1) % n { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    h[0] = su_phase(clock);
    h[1] = su_phase(shift);
    let r = cfg.epsilon_r()?.eval_groups(&h)[0].clone();
    if r.distance(&cfg.beta.to_group()) > 1e-10 {
        return Err(Error::NoSeed { n, genus: cfg.genus, beta: k });
    }
    Ok(h)
}

/// `|R(h) - beta|`.
pub fn relator_residual(cfg: &ModuliConfig, h: &[GroupElement]) -> Result<f64> {
    Ok(cfg.epsilon_r()?.eval_groups(h)[0].distance(&cfg.beta.to_group()))
}

/// `Lambda(h) = log(beta^-1 R(h))`.
pub fn chart_lambda(cfg: &ModuliConfig, h: &[GroupElement]) -> Result<AlgebraElement> {
    let r = cfg.epsilon_r()?.eval_groups(h)[0].clone();
    log_map(&cfg.beta.inverse().to_group().mul(&r))
}

/// Real matrix of a linear map `su(N)^m -> su(N)^k` in orthonormal coordinates.
fn real_matrix(n: usize, m: usize, k: usize, f: impl Fn(&[AlgebraElement]) -> Vec<AlgebraElement>) -> DMatrix<f64> {
    let basis = algebra_basis(n);
    let d = basis.len();
    let mut out = DMatrix::zeros(k * d, m * d);
    for slot in 0..m {
        for (a, e) in basis.iter().enumerate() {
            let mut input = vec![AlgebraElement::zero(n); m];
            input[slot] = e.clone();
            for (row_blk, y) in f(&input).iter().enumerate() {
                for (b, c) in y.coords().iter().enumerate() {
                    out[(row_blk * d + b, slot * d + a)] = *c;
                }
            }
        }
    }
    out
}

fn split_coords(n: usize, m: usize, v: &DVector<f64>) -> Vec<AlgebraElement> {
    let d = algebra_dim(n);
    (0..m).map(|j| AlgebraElement::from_coords(n, &v.as_slice()[j * d..(j + 1) * d]).expect("length")).collect()
}

fn tangent_coords(v: &[AlgebraElement]) -> DVector<f64> {
    DVector::from_iterator(v.iter().map(|x| x.coords().len()).sum(), v.iter().flat_map(|x| x.coords()))
}

/// Settings of the `Y_beta` sampler.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerConfig {
    /// Scale of the random perturbation applied to the seed.
    pub perturbation: f64,
    pub max_iterations: usize,
    /// Target `|Lambda(h)|`.
    pub tolerance: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { perturbation: 0.6, max_iterations: 100, tolerance: 1e-13 }
    }
}

/// Damped Gauss-Newton projection of `h` onto `Y_beta` along minimum-norm steps.
pub fn project_to_y(cfg: &ModuliConfig, h: &[GroupElement], sampler: &SamplerConfig) -> Result<YPoint> {
    let n = cfg.size;
    let m = cfg.generators();
    let er = cfg.epsilon_r()?;
    let mut h: Vec<GroupElement> = h.to_vec();
    let mut lam = chart_lambda(cfg, &h)?;
    let mut norm = lam.norm();
    for _ in 0..sampler.max_iterations {
        if norm <= sampler.tolerance {
            let residual = relator_residual(cfg, &h)?;
            return Ok(YPoint { h, residual });
        }
        let jac = real_matrix(n, m, 1, |xi| {
            let u = er.push_lie(&h, xi).remove(0);
            vec![exp_differential_inverse(&lam, &u).unwrap_or(u)]
        });
        let pinv = jac.clone().pseudo_inverse(1e-12).map_err(|e| Error::Config(e.into()))?;
        let step = -(pinv * tangent_coords(&[lam.clone()]));
        let xi = split_coords(n, m, &step);
        let mut scale = 1.0;
        loop {
            let trial: Vec<GroupElement> =
                h.iter().zip(&xi).map(|(g, x)| g.mul(&exp_map(&x.scale(scale))).renormalized()).collect();
            if let Ok(l) = chart_lambda(cfg, &trial) {
                if l.norm() < norm {
                    h = trial;
                    lam = l;
                    norm = lam.norm();
                    break;
                }
            }
            scale *= 0.5;
            if scale < 1e-6 {
                return Err(Error::NonConvergence { iterations: sampler.max_iterations, residual: norm });
            }
        }
    }
    if norm <= sampler.tolerance {
        let residual = relator_residual(cfg, &h)?;
        return Ok(YPoint { h, residual });
    }
    Err(Error::NonConvergence { iterations: sampler.max_iterations, residual: norm })
}

/// Random perturbation of `h`: `h_j exp(scale X_j)` with Gaussian `X_j`.
pub fn perturb<R: Rng + ?Sized>(h: &[GroupElement], scale: f64, rng: &mut R) -> Vec<GroupElement> {
    h.iter()
        .map(|g| {
            let x = sample_algebra(g.size(), rng);
            g.mul(&exp_map(&x.scale(scale)))
        })
        .collect()
}

/// `count` points of `Y_beta` from randomized perturbations of the seed.
pub fn sample_y(cfg: &ModuliConfig, seed: u64, count: usize, sampler: &SamplerConfig) -> Result<Vec<YPoint>> {
    Ok(sample_y_counted(cfg, seed, count, sampler)?.0)
}

/// Like [`sample_y`], also returning how many perturbed starts failed to converge.
pub fn sample_y_counted(
    cfg: &ModuliConfig,
    seed: u64,
    count: usize,
    sampler: &SamplerConfig,
) -> Result<(Vec<YPoint>, usize)> {
    let start = seed_solution(cfg)?;
    if sampler.perturbation == 0.0 {
        let residual = relator_residual(cfg, &start)?;
        return Ok((vec![YPoint { h: start, residual }; count], 0));
    }
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(count);
    let mut failures = 0;
    while out.len() < count {
        let h = perturb(&start, sampler.perturbation, &mut rng);
        match project_to_y(cfg, &h, sampler) {
            Ok(y) if y.residual <= 1e-8 => out.push(y),
            Ok(y) => return Err(Error::NonConvergence { iterations: sampler.max_iterations, residual: y.residual }),
            Err(e @ (Error::NonConvergence { .. } | Error::BranchCut { .. })) => {
                failures += 1;
                if failures > 10 * count.max(1) {
                    return Err(e);
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok((out, failures))
}

/// `(h, Lambda(h))`.
pub fn lift_to_x(cfg: &ModuliConfig, h: &[GroupElement]) -> Result<XPoint> {
    let lambda = chart_lambda(cfg, h)?;
    let r = cfg.epsilon_r()?.eval_groups(h)[0].clone();
    let target = cfg.beta.to_group().mul(&exp_map(&lambda));
    Ok(XPoint { h: h.to_vec(), residual: r.distance(&target), lambda })
}

/// Points near `Y_beta` (so `Lambda` is small but nonzero): sampled points of
/// `Y_beta` perturbed by `offset`, then lifted.
pub fn sample_x(cfg: &ModuliConfig, seed: u64, count: usize, offset: f64) -> Result<Vec<XPoint>> {
    let ys = sample_y(cfg, seed, count, &SamplerConfig::default())?;
    let mut rng = rng_from_seed(seed ^ 0x9e37_79b9_7f4a_7c15);
    ys.iter().map(|y| lift_to_x(cfg, &perturb(&y.h, offset, &mut rng))).collect()
}

/// `h -> Lambda(h)` as a map `K^{2g} -> su(N)`.
pub struct LambdaMap {
    cfg: ModuliConfig,
    relator: WordMap,
    domain: Shape,
    codomain: Shape,
}

impl LambdaMap {
    pub fn new(cfg: &ModuliConfig) -> Result<Self> {
        Ok(Self { relator: cfg.epsilon_r()?, domain: cfg.shape(), codomain: Shape::algebra(cfg.size), cfg: cfg.clone() })
    }
}

impl SmoothMap for LambdaMap {
    fn domain(&self) -> &Shape {
        &self.domain
    }
    fn codomain(&self) -> &Shape {
        &self.codomain
    }
    fn apply(&self, x: &Point) -> Result<Point> {
        Ok(Point::new(vec![Coord::Algebra(chart_lambda(&self.cfg, &x.group_elements())?)]))
    }
    fn push(&self, x: &Point, v: &Tangent) -> Result<Tangent> {
        let h = x.group_elements();
        let lam = chart_lambda(&self.cfg, &h)?;
        let u = self.relator.push_lie(&h, &v.lie_components()).remove(0);
        Ok(Tangent::new(vec![TangentComponent::Lie(exp_differential_inverse(&lam, &u)?)]))
    }
}

/// The graph chart `h -> (h, Lambda(h))` into `K^{2g} x su(N)`.
pub struct ChartMap {
    lambda: LambdaMap,
    codomain: Shape,
}

impl ChartMap {
    pub fn new(cfg: &ModuliConfig) -> Result<Self> {
        let codomain = cfg.shape().product(&Shape::algebra(cfg.size));
        Ok(Self { lambda: LambdaMap::new(cfg)?, codomain })
    }
}

impl SmoothMap for ChartMap {
    fn domain(&self) -> &Shape {
        &self.lambda.domain
    }
    fn codomain(&self) -> &Shape {
        &self.codomain
    }
    fn apply(&self, x: &Point) -> Result<Point> {
        let mut c = x.coords().to_vec();
        c.extend(self.lambda.apply(x)?.into_coords());
        Ok(Point::new(c))
    }
    fn push(&self, x: &Point, v: &Tangent) -> Result<Tangent> {
        let mut c = v.components().to_vec();
        c.extend(self.lambda.push(x, v)?.into_components());
        Ok(Tangent::new(c))
    }
}

/// `e_beta(Lambda) = beta exp(Lambda)`, `su(N) -> K`.
pub struct ExpBeta {
    beta: CentralElement,
    domain: Shape,
    codomain: Shape,
}

impl ExpBeta {
    pub fn new(beta: CentralElement) -> Self {
        let n = beta.size();
        Self { beta, domain: Shape::algebra(n), codomain: Shape::groups(1, n) }
    }
}

impl SmoothMap for ExpBeta {
    fn domain(&self) -> &Shape {
        &self.domain
    }
    fn codomain(&self) -> &Shape {
        &self.codomain
    }
    fn apply(&self, x: &Point) -> Result<Point> {
        Ok(Point::groups(vec![self.beta.to_group().mul(&exp_map(x.algebra(0)))]))
    }
    fn push(&self, x: &Point, v: &Tangent) -> Result<Tangent> {
        Ok(Tangent::lie(vec![exp_differential(x.algebra(0), v.lie_component(0))]))
    }
}

/// Orthonormal frames at a point of `Y_beta`.
#[derive(Clone, Debug)]
pub struct ReducedTangentFrame {
    /// Basis of `ker D e_R`.
    pub kernel: Vec<Tangent>,
    /// Orthonormal basis of the conjugation-orbit directions.
    pub orbit: Vec<Tangent>,
    /// Kernel directions orthogonal to the orbit.
    pub quotient: Vec<Tangent>,
    /// Singular values of `D e_R`, descending.
    pub singular_values: Vec<f64>,
}

/// Relative singular-value gap below which a kernel is rejected.
pub const KERNEL_GAP: f64 = 1e-6;

fn eigen_desc(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[b].partial_cmp(&e.eigenvalues[a]).unwrap_or(core::cmp::Ordering::Equal));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(e.eigenvectors.nrows(), idx.len(), |r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Orthonormal basis of the column space, with singular values above the relative gap.
fn column_space(a: DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let svd = a.svd(true, false);
    let top = svd.singular_values.max().max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > KERNEL_GAP * top).collect();
    let u = svd.u.expect("requested");
    (DMatrix::from_fn(u.nrows(), keep.len(), |r, c| u[(r, keep[c])]), keep.len())
}

fn columns_to_tangents(n: usize, m: usize, mat: &DMatrix<f64>, cols: core::ops::Range<usize>) -> Vec<Tangent> {
    cols.map(|c| Tangent::lie(split_coords(n, m, &mat.column(c).into_owned()))).collect()
}

pub fn reduced_frame(cfg: &ModuliConfig, y: &YPoint) -> Result<ReducedTangentFrame> {
    let n = cfg.size;
    let m = cfg.generators();
    let d = algebra_dim(n);
    let er = cfg.epsilon_r()?;
    let jac = real_matrix(n, m, 1, |xi| er.push_lie(&y.h, xi));
    let singular = singular_values(&jac);
    let top = singular[0].max(f64::MIN_POSITIVE);
    if singular[d - 1] <= KERNEL_GAP * top {
        return Err(Error::IllConditioned { gap: singular[d - 1] / top });
    }
    let (row_space, rank) = column_space(jac.transpose());
    let (_, vecs) = eigen_desc(DMatrix::identity(m * d, m * d) - &row_space * row_space.transpose());
    let kdim = m * d - rank;
    let kernel = columns_to_tangents(n, m, &vecs, 0..kdim);
    let kmat = vecs.columns(0, kdim).into_owned();

    let point = y.point();
    let actions = cfg.conjugation();
    let orbit_raw: Vec<DVector<f64>> = algebra_basis(n)
        .iter()
        .map(|e| tangent_coords(&generating_field(&actions, e, &point).lie_components()))
        .collect();
    let omat = DMatrix::from_columns(&orbit_raw);
    let (obasis, orank) = column_space(omat);
    let orbit = columns_to_tangents(n, m, &obasis, 0..orank);
    let proj = DMatrix::identity(m * d, m * d) - &obasis * obasis.transpose();
    let (qvals, qvecs) = eigen_desc(kmat.transpose() * proj * &kmat);
    let qrank = qvals.iter().filter(|&&v| v > 0.5).count();
    let qmat = &kmat * DMatrix::from_fn(kmat.ncols(), qrank, |r, c| qvecs[(r, c)]);
    let quotient = columns_to_tangents(n, m, &qmat, 0..qrank);
    Ok(ReducedTangentFrame { kernel, orbit, quotient, singular_values: singular })
}

/// Radial homotopy operator on `su(N)`:
/// `(h f)(phi)(Lambda; w..) = int_0^1 t^q f(phi)(t Lambda; Lambda, w..) dt`.
pub fn homotopy_h(f: &EquivariantFormField, quad: IntervalQuadrature) -> Result<EquivariantFormField> {
    if !matches!(f.shape().factors(), [Factor::Algebra(_)]) {
        return Err(Error::ShapeMismatch("homotopy operator acts on forms over su(N)".into()));
    }
    if f.degree() == 0 {
        return Err(Error::ArityMismatch { expected: 1, found: 0 });
    }
    let g = f.clone();
    EquivariantFormField::new(f.shape().clone(), f.degree() - 1, vec![Action::Adjoint], move |phi, x, vs| {
        let lam = x.algebra(0).clone();
        let q = vs.len();
        let mut all = Vec::with_capacity(q + 1);
        all.push(Tangent::lie(vec![lam.clone()]));
        all.extend_from_slice(vs);
        integrate_unit_interval(&quad, |t| {
            let y = Point::new(vec![Coord::Algebra(lam.scale(t))]);
            Ok(g.value(phi, &y, &all)? * t.powi(q as i32))
        })
    })
}

/// `e_beta^* Phi_1^K(Q)` on `su(N)`.
pub fn exp_beta_pullback(q: &InvariantPolynomial, beta: &CentralElement) -> Result<EquivariantFormField> {
    let phi1 = bott_shulman(q, 1, None)?;
    phi1.equivariant().pullback(Arc::new(ExpBeta::new(*beta)), vec![Action::Adjoint])
}

/// `sigma_Q = h(e_beta^* Phi_1^K(Q))`.
pub fn sigma_q(q: &InvariantPolynomial, beta: &CentralElement) -> Result<EquivariantFormField> {
    homotopy_h(&exp_beta_pullback(q, beta)?, IntervalQuadrature::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// `a_r`.
    A,
    /// `b_r^j`, `j` in `1..=2g`.
    B(usize),
    /// `f_r`.
    F,
}

fn check_degree(cfg: &ModuliConfig, q: &InvariantPolynomial) -> Result<()> {
    if q.size() != cfg.size {
        return Err(Error::DimensionMismatch { expected: cfg.size, found: q.size() });
    }
    if q.degree() > cfg.size && !q.is_inner_product() {
        return Err(Error::DegreeOutOfRange { degree: q.degree(), max: cfg.size });
    }
    Ok(())
}

/// The constant equivariant form `phi -> Q(phi, ..., phi)` on `K^{2g}`.
fn constant_generator(cfg: &ModuliConfig, q: &InvariantPolynomial) -> Result<EquivariantFormField> {
    let q = q.clone();
    EquivariantFormField::new(cfg.shape(), 2 * q.degree(), cfg.conjugation(), move |phi, _, vs| {
        if !vs.is_empty() {
            return Ok(C64::new(0.0, 0.0));
        }
        let args = vec![phi; q.degree()];
        q.eval(&args)
    })
}

/// The generator forms on `K^{2g}`, obtained by pairing the Bott-Shulman
/// forms with the cycles `x_j` and `c`.
pub fn generator_form(cfg: &ModuliConfig, kind: GeneratorKind, q: &InvariantPolynomial) -> Result<EquivariantFormField> {
    check_degree(cfg, q)?;
    match kind {
        GeneratorKind::A => constant_generator(cfg, q),
        GeneratorKind::B(j) => {
            if j == 0 || j > cfg.generators() {
                return Err(Error::InvalidGenerator { index: j, genus: cfg.genus });
            }
            let phi1 = bott_shulman(q, 1, None)?;
            slant_pair(&BarChain::One(Chain1::word(Word::x(j))), phi1.equivariant(), cfg.genus)
        }
        GeneratorKind::F => {
            let phi2 = bott_shulman(q, 2, None)?;
            slant_pair(&BarChain::Two(fundamental_class(cfg.genus)?), phi2.equivariant(), cfg.genus)
        }
    }
}

/// The generator forms extended to the chart of the extended moduli space.
/// Kind `F` is the slant term minus `Lambda^* sigma_Q`.
pub fn extended_generator(
    cfg: &ModuliConfig,
    kind: GeneratorKind,
    q: &InvariantPolynomial,
) -> Result<EquivariantFormField> {
    let base = generator_form(cfg, kind, q)?;
    if kind != GeneratorKind::F {
        return Ok(base);
    }
    let sigma = sigma_q(q, &cfg.beta)?.pullback(Arc::new(LambdaMap::new(cfg)?), cfg.conjugation())?;
    base.sub(&sigma)
}

/// Goldman form `omega = (c, psi^* Omega)` with `Q = <.,.>`.
pub fn goldman_omega(cfg: &ModuliConfig) -> Result<FormField> {
    let q = InvariantPolynomial::inner_product(cfg.size);
    let phi2 = bott_shulman(&q, 2, None)?;
    slant_pair(&BarChain::Two(fundamental_class(cfg.genus)?), &phi2.plain(), cfg.genus)
}

/// `e_R^* Phi_1(<.,.>)` on `K^{2g}`.
pub fn relator_pullback_phi1(cfg: &ModuliConfig) -> Result<FormField> {
    let q = InvariantPolynomial::inner_product(cfg.size);
    bott_shulman(&q, 1, None)?.plain().pullback(Arc::new(cfg.epsilon_r()?))
}

/// `omega_bar(phi) = omega - Lambda^* sigma + <mu, phi>` on the chart; the
/// arity-2 component at `phi = 0` is `omega_tilde`.
pub fn omega_bar(cfg: &ModuliConfig) -> Result<EquivariantFormField> {
    extended_generator(cfg, GeneratorKind::F, &InvariantPolynomial::inner_product(cfg.size))
}

/// `omega_tilde = omega - Lambda^* sigma` with `sigma = sigma_{<.,.>}` at `phi = 0`.
pub fn omega_tilde(cfg: &ModuliConfig) -> Result<FormField> {
    Ok(omega_bar(cfg)?.component(&AlgebraElement::zero(cfg.size), 2))
}

/// Coordinates of the `phi`-linear part of the 0-form component of an
/// equivariant form, in the orthonormal basis: `v_a = alpha(e_a)(x)`.
/// Exact for forms whose 0-form component is linear in `phi`.
pub fn linear_part(f: &EquivariantFormField, x: &Point) -> Result<AlgebraElement> {
    let n = match f.shape().factors()[0] {
        Factor::Group(n) | Factor::Algebra(n) => n,
        _ => return Err(Error::ShapeMismatch("expected group or algebra factors".into())),
    };
    let coords = algebra_basis(n)
        .iter()
        .map(|e| {
            let plus = f.value(e, x, &[])?;
            let minus = f.value(&-e, x, &[])?;
            Ok(((plus - minus) * 0.5).re)
        })
        .collect::<Result<Vec<f64>>>()?;
    AlgebraElement::from_coords(n, &coords)
}

/// `f_r` by the direct double sum
/// `sum_{j, tau} (-1)^tau Psi_{j,tau}^* (-int Q(F + mu))` with
/// `Psi_{j,tau}(rho) = (rho(gamma x_j), rho(x_j), 1)`, evaluated with exact
/// simplex moments. Independent of `slant_pair`, `sigma_2` and quadrature.
pub fn direct_f_generator(cfg: &ModuliConfig, q: &InvariantPolynomial) -> Result<EquivariantFormField> {
    check_degree(cfg, q)?;
    let total = Arc::new(fibre_integral_exact(q, 2)?);
    let mut maps: Vec<(f64, Arc<WordMap>)> = Vec::new();
    for j in 1..=cfg.generators() {
        for tau in 0..2u8 {
            let gw = gamma(cfg.genus, j, tau)?;
            let to_syms = |w: &Word| -> Vec<Symbol> {
                w.letters()
                    .iter()
                    .map(|l| if l.inverse { Symbol::Inv(l.generator - 1) } else { Symbol::Var(l.generator - 1) })
                    .collect()
            };
            let comps = vec![to_syms(&gw.mul(&Word::x(j))), vec![Symbol::Var(j - 1)], Vec::new()];
            maps.push((if tau == 0 { 1.0 } else { -1.0 }, Arc::new(WordMap::new(cfg.size, cfg.generators(), comps)?)));
        }
    }
    let maps = Arc::new(maps);
    EquivariantFormField::new(cfg.shape(), 2 * q.degree() - 2, cfg.conjugation(), move |phi, x, vs| {
        let h = x.group_elements();
        let xi: Vec<Vec<AlgebraElement>> = vs.iter().map(Tangent::lie_components).collect();
        let mut acc = C64::new(0.0, 0.0);
        for (sign, map) in maps.iter() {
            let y = Point::groups(map.eval_groups(&h));
            let w: Vec<Tangent> = xi.iter().map(|v| Tangent::lie(map.push_lie(&h, v))).collect();
            acc += total.value(phi, &y, &w)? * *sign;
        }
        Ok(acc)
    })
}

/// One radius of the boundedness probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeSample {
    pub radius: f64,
    /// Largest `|sigma_Q|` over the probed directions and unit tangent frames.
    pub sup: f64,
}

/// Sweeps `|sigma_Q(0)(r u; e_a, e_b, ..)|` over radii in `(0, max_radius]`.
pub fn boundedness_probe(
    q: &InvariantPolynomial,
    beta: &CentralElement,
    max_radius: f64,
    steps: usize,
    directions: usize,
    seed: u64,
) -> Result<Vec<ProbeSample>> {
    let sigma = sigma_q(q, beta)?;
    let n = q.size();
    let arity = 2 * q.degree() - 2;
    let basis = algebra_basis(n);
    let mut rng = rng_from_seed(seed);
    let dirs: Vec<AlgebraElement> = (0..directions)
        .map(|_| {
            let x = sample_algebra(n, &mut rng);
            x.scale(1.0 / x.norm())
        })
        .collect();
    let frames: Vec<Vec<Tangent>> = (0..directions)
        .map(|_| {
            (0..arity)
                .map(|_| Tangent::lie(vec![basis[rng.gen_range(0..basis.len())].clone()]))
                .collect()
        })
        .collect();
    let zero = AlgebraElement::zero(n);
    (1..=steps)
        .map(|s| {
            let radius = max_radius * s as f64 / steps as f64;
            let mut sup: f64 = 0.0;
            for (u, frame) in dirs.iter().zip(&frames) {
                let x = Point::new(vec![Coord::Algebra(u.scale(radius))]);
                sup = sup.max(sigma.value(&zero, &x, frame)?.norm());
            }
            Ok(ProbeSample { radius, sup })
        })
        .collect()
}

/// Matrix `omega(v_a, v_b)` of a 2-form on a list of tangents.
pub fn form_matrix(f: &FormField, x: &Point, frame: &[Tangent]) -> Result<DMatrix<f64>> {
    let k = frame.len();
    let mut m = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            if a != b {
                m[(a, b)] = f.value(x, &[frame[a].clone(), frame[b].clone()])?.re;
            }
        }
    }
    Ok(m)
}

/// Singular values of a real matrix, descending.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    s
}
