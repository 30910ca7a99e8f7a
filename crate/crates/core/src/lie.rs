//! Matrix realization of `K = SU(N)` and its Lie algebra `su(N)`.
//!
//! Algebra elements are traceless anti-Hermitian matrices, group elements
//! special unitary matrices. The invariant inner product is fixed as
//! `<X, Y> = -tr(XY)`, which coincides with the real Frobenius product on
//! `su(N)`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen, QR};
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

/// Tolerance on anti-Hermiticity and trace for algebra elements.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Tolerance on unitarity and determinant for group elements.
pub const GROUP_TOL: f64 = 1e-10;
/// Distance of an eigenvalue phase from `pi` at which `log_map` gives up.
pub const LOG_BRANCH_TOL: f64 = 1e-8;

const I: C64 = C64::new(0.0, 1.0);

fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    Ok(m.nrows())
}

fn check_same(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// A traceless anti-Hermitian `N x N` matrix.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement(CMat);

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraElement({:?})", self.0.as_slice())
    }
}

impl AlgebraElement {
    /// Validates the matrix against the `su(N)` invariants.
    pub fn new(m: CMat) -> Result<Self> {
        check_square(&m)?;
        let skew = frobenius(&(&m + m.adjoint()));
        if skew > ALGEBRA_TOL * (1.0 + frobenius(&m)) {
            return Err(Error::NotInAlgebra("not anti-Hermitian"));
        }
        if m.trace().norm() > ALGEBRA_TOL * (1.0 + frobenius(&m)) {
            return Err(Error::NotInAlgebra("not traceless"));
        }
        Ok(Self(m))
    }

    /// Projects an arbitrary square matrix onto `su(N)`.
    pub fn project(m: &CMat) -> Self {
        let n = m.nrows();
        let mut a = (m - m.adjoint()) * C64::new(0.5, 0.0);
        let tr = a.trace() / C64::new(n as f64, 0.0);
        for i in 0..n {
            a[(i, i)] -= tr;
        }
        Self(a)
    }

    pub fn zero(n: usize) -> Self {
        Self(CMat::zeros(n, n))
    }

    /// Matrix size `N`.
    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    /// `XY - YX`. Panics on a dimension mismatch; see [`bracket`] for the checked form.
    pub fn bracket(&self, other: &Self) -> Self {
        assert_eq!(self.size(), other.size(), "bracket: dimension mismatch");
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// `<X, Y> = -tr(XY)`. Panics on a dimension mismatch; see [`inner`].
    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.size(), other.size(), "inner: dimension mismatch");
        let n = self.size();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.0[(i, j)] * other.0[(j, i)];
            }
        }
        -acc.re
    }

    pub fn norm(&self) -> f64 {
        frobenius(&self.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * C64::new(s, 0.0))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    /// Coordinates in the orthonormal basis returned by [`algebra_basis`].
    pub fn coords(&self) -> Vec<f64> {
        algebra_basis(self.size()).iter().map(|e| e.inner(self)).collect()
    }

    pub fn from_coords(n: usize, coords: &[f64]) -> Result<Self> {
        let basis = algebra_basis(n);
        check_same(basis.len(), coords.len())?;
        let mut m = CMat::zeros(n, n);
        for (e, c) in basis.iter().zip(coords) {
            m += &e.0 * C64::new(*c, 0.0);
        }
        Ok(Self(m))
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: Self) -> AlgebraElement {
        AlgebraElement(&self.0 + &rhs.0)
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: Self) -> AlgebraElement {
        AlgebraElement(self.0 + rhs.0)
    }
}

impl AddAssign<&AlgebraElement> for AlgebraElement {
    fn add_assign(&mut self, rhs: &AlgebraElement) {
        self.0 += &rhs.0;
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: Self) -> AlgebraElement {
        AlgebraElement(&self.0 - &rhs.0)
    }
}

impl Sub for AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: Self) -> AlgebraElement {
        AlgebraElement(self.0 - rhs.0)
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement(-&self.0)
    }
}

impl Neg for AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement(-self.0)
    }
}

impl Mul<f64> for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, s: f64) -> AlgebraElement {
        self.scale(s)
    }
}

/// Orthonormal basis of `su(N)` with respect to `<X, Y> = -tr(XY)`.
pub fn algebra_basis(n: usize) -> Vec<AlgebraElement> {
    let mut out = Vec::with_capacity(n * n - 1);
    let r = 1.0 / 2f64.sqrt();
    for a in 0..n {
        for b in (a + 1)..n {
            let mut m = CMat::zeros(n, n);
            m[(a, b)] = C64::new(r, 0.0);
            m[(b, a)] = C64::new(-r, 0.0);
            out.push(AlgebraElement(m));
            let mut m = CMat::zeros(n, n);
            m[(a, b)] = C64::new(0.0, r);
            m[(b, a)] = C64::new(0.0, r);
            out.push(AlgebraElement(m));
        }
    }
    for k in 1..n {
        let norm = 1.0 / ((k * (k + 1)) as f64).sqrt();
        let mut m = CMat::zeros(n, n);
        for i in 0..k {
            m[(i, i)] = C64::new(0.0, norm);
        }
        m[(k, k)] = C64::new(0.0, -(k as f64) * norm);
        out.push(AlgebraElement(m));
    }
    out
}

/// `dim su(N) = N^2 - 1`.
pub fn algebra_dim(n: usize) -> usize {
    n * n - 1
}

/// Checked commutator.
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    check_same(x.size(), y.size())?;
    Ok(x.bracket(y))
}

/// Checked inner product `-tr(XY)`.
pub fn inner(x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
    check_same(x.size(), y.size())?;
    Ok(x.inner(y))
}

/// A special unitary `N x N` matrix.
#[derive(Clone, PartialEq)]
pub struct GroupElement(CMat);

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement({:?})", self.0.as_slice())
    }
}

impl GroupElement {
    pub fn new(m: CMat) -> Result<Self> {
        let n = check_square(&m)?;
        let unit = frobenius(&(m.adjoint() * &m - CMat::identity(n, n)));
        if unit > GROUP_TOL {
            return Err(Error::NotInGroup("not unitary"));
        }
        if (m.determinant() - C64::new(1.0, 0.0)).norm() > GROUP_TOL {
            return Err(Error::NotInGroup("determinant is not 1"));
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMat::identity(n, n))
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.size(), other.size(), "group product: dimension mismatch");
        Self(&self.0 * &other.0)
    }

    /// `Ad(g) X = g X g^{-1}`.
    pub fn adjoint(&self, x: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.size(), x.size(), "adjoint: dimension mismatch");
        AlgebraElement(&self.0 * &x.0 * self.0.adjoint())
    }

    /// `Ad(g^{-1}) X = g^{-1} X g`.
    pub fn adjoint_inv(&self, x: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.size(), x.size(), "adjoint: dimension mismatch");
        AlgebraElement(self.0.adjoint() * &x.0 * &self.0)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Frobenius distance between two group elements.
    pub fn distance(&self, other: &Self) -> f64 {
        frobenius(&(&self.0 - &other.0))
    }

    /// Re-orthonormalizes against accumulated rounding (polar projection).
    pub fn renormalized(&self) -> Self {
        let n = self.size();
        let h = self.0.adjoint() * &self.0;
        let eig = SymmetricEigen::new(h);
        let mut d = CMat::zeros(n, n);
        for i in 0..n {
            d[(i, i)] = C64::new(1.0 / eig.eigenvalues[i].sqrt(), 0.0);
        }
        let u = &self.0 * &eig.eigenvectors * d * eig.eigenvectors.adjoint();
        let det = u.determinant();
        let phase = C64::from_polar(1.0, -det.arg() / n as f64);
        Self(u * phase)
    }
}

/// Checked `Ad(g) X`.
pub fn adjoint(g: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    check_same(g.size(), x.size())?;
    Ok(g.adjoint(x))
}

/// A central element `exp(2 pi i k / N) I` of `SU(N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CentralElement {
    n: usize,
    k: i64,
}

impl CentralElement {
    pub fn new(n: usize, k: i64) -> Self {
        let k = k.rem_euclid(n as i64);
        Self { n, k }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn phase_index(&self) -> i64 {
        self.k
    }

    pub fn scalar(&self) -> C64 {
        C64::from_polar(1.0, TAU * self.k as f64 / self.n as f64)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.n, -self.k)
    }

    pub fn to_group(&self) -> GroupElement {
        GroupElement(CMat::identity(self.n, self.n) * self.scalar())
    }
}

/// Hermitian eigendecomposition of `-iX`: returns real eigenvalues `l` and
/// unitary `U` with `X = U diag(i l) U^*`.
fn skew_eigen(x: &AlgebraElement) -> (Vec<f64>, CMat) {
    let h = &x.0 * (-I);
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

fn from_eigen(u: &CMat, diag: &[C64]) -> CMat {
    let n = diag.len();
    let mut scaled = u.clone();
    for j in 0..n {
        for i in 0..n {
            scaled[(i, j)] *= diag[j];
        }
    }
    scaled * u.adjoint()
}

/// Matrix exponential of an algebra element, exact up to eigensolver rounding.
pub fn exp_map(x: &AlgebraElement) -> GroupElement {
    let (l, u) = skew_eigen(x);
    let d: Vec<C64> = l.iter().map(|&v| C64::from_polar(1.0, v)).collect();
    GroupElement(from_eigen(&u, &d))
}

/// Eigenvectors and eigenphases of a unitary matrix.
///
/// A unitary matrix is normal, so a Hermitian eigensolver applied to
/// `c (g + g^*) / 2 + (g - g^*) / 2i` recovers its eigenvectors whenever the
/// mixing coefficient `c` separates distinct eigenvalues; the result is
/// checked and a few coefficients are tried. (A general Schur iteration
/// stalls on matrices close to a multiple of the identity.)
fn unitary_eigen(g: &GroupElement) -> Result<(CMat, Vec<f64>)> {
    let n = g.size();
    let gh = g.0.adjoint();
    let re = (&g.0 + &gh) * C64::new(0.5, 0.0);
    let im = (&g.0 - &gh) * C64::new(0.0, -0.5);
    let mut best: Option<(f64, CMat, Vec<f64>)> = None;
    for c in [0.613, -1.37, 0.291, 2.43] {
        let h = &re * C64::new(c, 0.0) + &im;
        let u = SymmetricEigen::new((&h + h.adjoint()) * C64::new(0.5, 0.0)).eigenvectors;
        let d = u.adjoint() * &g.0 * &u;
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(0.0f64, |m, (i, j)| m.max(d[(i, j)].norm()));
        let phases: Vec<f64> = (0..n).map(|i| d[(i, i)].arg()).collect();
        if off <= 1e-12 {
            return Ok((u, phases));
        }
        if best.as_ref().is_none_or(|b| off < b.0) {
            best = Some((off, u, phases));
        }
    }
    match best {
        Some((off, u, phases)) if off <= 1e-9 => Ok((u, phases)),
        _ => Err(Error::NotInGroup("not unitary to working precision")),
    }
}

/// Principal-branch logarithm corrected to be traceless.
///
/// Eigenphases are taken in `(-pi, pi]`; when they sum to `2 pi k` with
/// `k != 0`, `|k|` of them are shifted by `-+2 pi` so the result stays in
/// `su(N)` and `exp_map(log_map(g)) == g`.
pub fn log_map(g: &GroupElement) -> Result<AlgebraElement> {
    let n = g.size();
    let (q, mut phases) = unitary_eigen(g)?;
    if phases.iter().any(|p| PI - p.abs() <= LOG_BRANCH_TOL) {
        return Err(Error::BranchCut { tolerance: LOG_BRANCH_TOL });
    }
    let total: f64 = phases.iter().sum();
    let k = (total / TAU).round() as i64;
    if k != 0 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| phases[b].partial_cmp(&phases[a]).unwrap_or(core::cmp::Ordering::Equal));
        if k > 0 {
            for &i in order.iter().take(k as usize) {
                phases[i] -= TAU;
            }
        } else {
            for &i in order.iter().rev().take((-k) as usize) {
                phases[i] += TAU;
            }
        }
    }
    let d: Vec<C64> = phases.iter().map(|&p| C64::new(0.0, p)).collect();
    Ok(AlgebraElement::project(&from_eigen(&q, &d)))
}

/// `(1 - e^{-z}) / z`, the symbol of the left-trivialized differential of `exp`.
fn dexp_symbol(z: C64) -> C64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        C64::new(1.0, 0.0) - z / 2.0 + z2 / 6.0 - z2 * z / 24.0
    } else {
        (C64::new(1.0, 0.0) - (-z).exp()) / z
    }
}

fn spectral_apply(x: &AlgebraElement, w: &AlgebraElement, f: impl Fn(C64) -> Result<C64>) -> Result<AlgebraElement> {
    let (l, u) = skew_eigen(x);
    let n = l.len();
    let mut wt = u.adjoint() * &w.0 * &u;
    for a in 0..n {
        for b in 0..n {
            wt[(a, b)] *= f(C64::new(0.0, l[a] - l[b]))?;
        }
    }
    Ok(AlgebraElement::project(&(&u * wt * u.adjoint())))
}

/// Left-trivialized differential of `exp` at `x`:
/// `exp(-x) d/ds exp(x + s w)|_{s=0} = ((1 - e^{-ad x}) / ad x) w`.
pub fn exp_differential(x: &AlgebraElement, w: &AlgebraElement) -> AlgebraElement {
    spectral_apply(x, w, |z| Ok(dexp_symbol(z))).expect("dexp symbol is total")
}

/// Inverse of [`exp_differential`]; fails where `exp` is singular at `x`.
pub fn exp_differential_inverse(x: &AlgebraElement, u: &AlgebraElement) -> Result<AlgebraElement> {
    spectral_apply(x, u, |z| {
        let s = dexp_symbol(z);
        if s.norm() < 1e-10 {
            Err(Error::SingularChart)
        } else {
            Ok(C64::new(1.0, 0.0) / s)
        }
    })
}

/// Deterministic generator used by every sampler in the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian algebra element: independent standard normal coordinates in
/// the orthonormal basis.
pub fn sample_algebra<R: Rng + ?Sized>(n: usize, rng: &mut R) -> AlgebraElement {
    let coords: Vec<f64> = (0..algebra_dim(n)).map(|_| rng.sample(StandardNormal)).collect();
    AlgebraElement::from_coords(n, &coords).expect("basis length")
}

/// Gaussian direction normalized to unit length.
pub fn sample_unit_algebra<R: Rng + ?Sized>(n: usize, rng: &mut R) -> AlgebraElement {
    loop {
        let x = sample_algebra(n, rng);
        let norm = x.norm();
        if norm > 1e-8 {
            return x.scale(1.0 / norm);
        }
    }
}

/// Haar-distributed element of `SU(N)`: QR of a complex Ginibre matrix with
/// the diagonal phases of `R` removed, then rescaled to determinant one.
pub fn sample_group<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GroupElement {
    let s = 1.0 / 2f64.sqrt();
    let z = CMat::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    });
    let qr = QR::new(z);
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    let det = q.determinant();
    let root = C64::from_polar(1.0, -det.arg() / n as f64);
    GroupElement(q * root)
}

pub fn sample_algebra_seeded(n: usize, seed: u64) -> AlgebraElement {
    sample_algebra(n, &mut rng_from_seed(seed))
}

pub fn sample_group_seeded(n: usize, seed: u64) -> GroupElement {
    sample_group(n, &mut rng_from_seed(seed))
}

/// One term of the cycle expansion `e_r(X) = 1/r! sum_s sgn(s) prod_c tr(X^|c|)`.
#[derive(Clone, Debug)]
struct CycleTerm {
    sign: f64,
    cycles: Vec<Vec<usize>>,
}

fn permutations(r: usize) -> Vec<Vec<usize>> {
    // Heap's algorithm would also do; lexicographic order keeps the table stable.
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..r).collect();
    loop {
        out.push(perm.clone());
        let Some(i) = (0..r.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            break;
        };
        let j = (i + 1..r).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    out
}

fn cycle_table(r: usize) -> Vec<CycleTerm> {
    permutations(r)
        .into_iter()
        .map(|p| {
            let mut seen = vec![false; r];
            let mut cycles = Vec::new();
            for start in 0..r {
                if seen[start] {
                    continue;
                }
                let mut c = Vec::new();
                let mut j = start;
                while !seen[j] {
                    seen[j] = true;
                    c.push(j);
                    j = p[j];
                }
                cycles.push(c);
            }
            let transpositions: usize = cycles.iter().map(|c| c.len() - 1).sum();
            CycleTerm { sign: if transpositions.is_multiple_of(2) { 1.0 } else { -1.0 }, cycles }
        })
        .collect()
}

#[derive(Clone, Debug)]
enum PolynomialKind {
    Inner,
    Chern(Arc<Vec<CycleTerm>>),
}

/// A symmetric, Ad-invariant multilinear form on `su(N)`.
#[derive(Clone, Debug)]
pub struct InvariantPolynomial {
    n: usize,
    degree: usize,
    kind: PolynomialKind,
}

impl InvariantPolynomial {
    /// The quadratic form `<X, Y> = -tr(XY)`.
    pub fn inner_product(n: usize) -> Self {
        Self { n, degree: 2, kind: PolynomialKind::Inner }
    }

    /// Polarization of the degree-`r` coefficient of `det(I + (i / 2 pi) X)`.
    pub fn chern(n: usize, r: usize) -> Result<Self> {
        if r == 0 || r > n {
            return Err(Error::DegreeOutOfRange { degree: r, max: n });
        }
        Ok(Self { n, degree: r, kind: PolynomialKind::Chern(Arc::new(cycle_table(r))) })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn is_inner_product(&self) -> bool {
        matches!(self.kind, PolynomialKind::Inner)
    }

    /// Multilinear evaluation `Q(X_1, ..., X_r)`.
    pub fn eval(&self, args: &[&AlgebraElement]) -> Result<C64> {
        if args.len() != self.degree {
            return Err(Error::ArityMismatch { expected: self.degree, found: args.len() });
        }
        for a in args {
            check_same(self.n, a.size())?;
        }
        Ok(self.eval_unchecked(args))
    }

    pub(crate) fn eval_unchecked(&self, args: &[&AlgebraElement]) -> C64 {
        match &self.kind {
            PolynomialKind::Inner => C64::new(args[0].inner(args[1]), 0.0),
            PolynomialKind::Chern(table) => {
                let n = self.n;
                let mut total = C64::new(0.0, 0.0);
                for term in table.iter() {
                    let mut prod = C64::new(term.sign, 0.0);
                    for c in &term.cycles {
                        let tr = if c.len() == 1 {
                            args[c[0]].0.trace()
                        } else {
                            let mut m = args[c[0]].0.clone();
                            for &i in &c[1..] {
                                m *= &args[i].0;
                            }
                            m.trace()
                        };
                        prod *= tr;
                        if prod == C64::new(0.0, 0.0) {
                            break;
                        }
                    }
                    total += prod;
                }
                let r = self.degree as i32;
                let mut fact = 1.0;
                for k in 2..=self.degree {
                    fact *= k as f64;
                }
                let _ = n;
                total * (I / TAU).powi(r) / fact
            }
        }
    }

    /// `Q(X, ..., X)`.
    pub fn eval_diagonal(&self, x: &AlgebraElement) -> Result<C64> {
        let args: Vec<&AlgebraElement> = (0..self.degree).map(|_| x).collect();
        self.eval(&args)
    }
}

/// The Chern polynomial `Q_r` on `su(N)`.
pub fn chern_polynomial(n: usize, r: usize) -> Result<InvariantPolynomial> {
    InvariantPolynomial::chern(n, r)
}

/// `i sigma_x`, `i sigma_y`, `i sigma_z` style constants are handy in tests and seeds.
pub fn pauli(k: usize) -> CMat {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    match k {
        1 => CMat::from_row_slice(2, 2, &[o, one, one, o]),
        2 => CMat::from_row_slice(2, 2, &[o, -I, I, o]),
        3 => CMat::from_row_slice(2, 2, &[one, o, o, -one]),
        _ => panic!("pauli index must be 1, 2 or 3"),
    }
}

/// `e_j = -(i/2) sigma_j`, the standard su(2) basis with `[e_1, e_2] = e_3`.
pub fn su2_standard(j: usize) -> AlgebraElement {
    AlgebraElement(pauli(j) * C64::new(0.0, -0.5))
}
