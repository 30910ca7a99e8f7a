//! Evaluator-backed differential forms on finite products of group,
//! Lie-algebra, vector and simplex factors.
//!
//! Tangents are left-trivialized on group factors: the component `xi` at base
//! point `g` stands for the velocity `g xi`. With that convention the left
//! Maurer-Cartan form evaluates to the stored component and the
//! right-invariant one to `Ad(g) xi`, so forms built from them need no
//! numerical differentiation. Only [`FormField::exterior_derivative`] and the
//! Cartan differential use finite differences, along the flows
//! `g exp(s xi)`, `v + s u` and `t + s tau`.

use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lie::{exp_map, AlgebraElement, GroupElement, C64};

/// One factor of a product manifold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `SU(N)`.
    Group(usize),
    /// `su(N)` as a vector space.
    Algebra(usize),
    /// `R^d`.
    Vector(usize),
    /// `Delta^n` in barycentric coordinates.
    Simplex(usize),
}

impl Factor {
    pub fn dimension(&self) -> usize {
        match *self {
            Factor::Group(n) | Factor::Algebra(n) => n * n - 1,
            Factor::Vector(d) => d,
            Factor::Simplex(n) => n,
        }
    }
}

/// An ordered, nonempty product of factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    factors: Arc<[Factor]>,
}

impl Shape {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::ShapeMismatch("a shape needs at least one factor".into()));
        }
        for f in &factors {
            let ok = match *f {
                Factor::Group(n) | Factor::Algebra(n) => n >= 2,
                Factor::Vector(d) => d >= 1,
                Factor::Simplex(n) => n >= 1,
            };
            if !ok {
                return Err(Error::ShapeMismatch(format!("invalid factor {f:?}")));
            }
        }
        Ok(Self { factors: factors.into() })
    }

    /// `K^count`.
    pub fn groups(count: usize, n: usize) -> Self {
        Self::new((0..count).map(|_| Factor::Group(n)).collect()).expect("count >= 1 and n >= 2")
    }

    /// `Delta^level x K^(level + 1)`.
    pub fn simplex_groups(level: usize, n: usize) -> Self {
        let mut f = alloc::vec![Factor::Simplex(level)];
        f.extend((0..=level).map(|_| Factor::Group(n)));
        Self::new(f).expect("level >= 1 and n >= 2")
    }

    /// `su(N)` as a single vector-space factor.
    pub fn algebra(n: usize) -> Self {
        Self::new(alloc::vec![Factor::Algebra(n)]).expect("n >= 2")
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Real dimension of the product.
    pub fn dimension(&self) -> usize {
        self.factors.iter().map(Factor::dimension).sum()
    }

    /// Appends the factors of `other`.
    pub fn product(&self, other: &Shape) -> Shape {
        let mut f: Vec<Factor> = self.factors.to_vec();
        f.extend_from_slice(&other.factors);
        Shape { factors: f.into() }
    }

    fn require_eq(&self, other: &Shape) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", self.factors, other.factors)));
        }
        Ok(())
    }
}

/// Coordinates of one factor of a point.
#[derive(Clone, Debug, PartialEq)]
pub enum Coord {
    Group(GroupElement),
    Algebra(AlgebraElement),
    Vector(Vec<f64>),
    Simplex(Vec<f64>),
}

/// A point of a product manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<Coord>,
}

impl Point {
    pub fn new(coords: Vec<Coord>) -> Self {
        Self { coords }
    }

    pub fn groups(elements: Vec<GroupElement>) -> Self {
        Self { coords: elements.into_iter().map(Coord::Group).collect() }
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Coord> {
        self.coords
    }

    pub fn group(&self, i: usize) -> &GroupElement {
        match &self.coords[i] {
            Coord::Group(g) => g,
            other => panic!("factor {i} is not a group factor: {other:?}"),
        }
    }

    pub fn algebra(&self, i: usize) -> &AlgebraElement {
        match &self.coords[i] {
            Coord::Algebra(x) => x,
            other => panic!("factor {i} is not an algebra factor: {other:?}"),
        }
    }

    pub fn simplex(&self, i: usize) -> &[f64] {
        match &self.coords[i] {
            Coord::Simplex(t) => t,
            other => panic!("factor {i} is not a simplex factor: {other:?}"),
        }
    }

    /// All group coordinates in order (panics on other factors).
    pub fn group_elements(&self) -> Vec<GroupElement> {
        (0..self.coords.len()).map(|i| self.group(i).clone()).collect()
    }

    /// Validates the point against a shape, including the factor invariants.
    pub fn check(&self, shape: &Shape) -> Result<()> {
        if self.coords.len() != shape.len() {
            return Err(Error::ShapeMismatch(format!(
                "point has {} factors, shape has {}",
                self.coords.len(),
                shape.len()
            )));
        }
        for (c, f) in self.coords.iter().zip(shape.factors()) {
            match (c, f) {
                (Coord::Group(g), Factor::Group(n)) if g.size() == *n => {
                    GroupElement::new(g.matrix().clone())?;
                }
                (Coord::Algebra(x), Factor::Algebra(n)) if x.size() == *n => {
                    AlgebraElement::new(x.matrix().clone())?;
                }
                (Coord::Vector(v), Factor::Vector(d)) if v.len() == *d => {}
                (Coord::Simplex(t), Factor::Simplex(n)) if t.len() == n + 1 => {
                    let sum: f64 = t.iter().sum();
                    if (sum - 1.0).abs() > 1e-12 || t.iter().any(|&ti| ti < -1e-12) {
                        return Err(Error::ShapeMismatch("simplex coordinates off the simplex".into()));
                    }
                }
                _ => return Err(Error::ShapeMismatch(format!("coordinate {c:?} does not fit {f:?}"))),
            }
        }
        Ok(())
    }
}

/// Tangent component of one factor.
#[derive(Clone, Debug, PartialEq)]
pub enum TangentComponent {
    /// Group factors (left-trivialized) and algebra factors.
    Lie(AlgebraElement),
    Vector(Vec<f64>),
    /// `n + 1` reals summing to zero.
    Simplex(Vec<f64>),
}

impl TangentComponent {
    fn zero_for(f: &Factor) -> Self {
        match *f {
            Factor::Group(n) | Factor::Algebra(n) => TangentComponent::Lie(AlgebraElement::zero(n)),
            Factor::Vector(d) => TangentComponent::Vector(alloc::vec![0.0; d]),
            Factor::Simplex(n) => TangentComponent::Simplex(alloc::vec![0.0; n + 1]),
        }
    }

    fn axpy(&self, s: f64, other: &Self) -> Self {
        match (self, other) {
            (TangentComponent::Lie(a), TangentComponent::Lie(b)) => TangentComponent::Lie(a + &b.scale(s)),
            (TangentComponent::Vector(a), TangentComponent::Vector(b)) => {
                TangentComponent::Vector(a.iter().zip(b).map(|(x, y)| x + s * y).collect())
            }
            (TangentComponent::Simplex(a), TangentComponent::Simplex(b)) => {
                TangentComponent::Simplex(a.iter().zip(b).map(|(x, y)| x + s * y).collect())
            }
            _ => panic!("tangent components of different kinds"),
        }
    }

    fn norm_sqr(&self) -> f64 {
        match self {
            TangentComponent::Lie(a) => a.norm() * a.norm(),
            TangentComponent::Vector(v) | TangentComponent::Simplex(v) => v.iter().map(|x| x * x).sum(),
        }
    }
}

/// A tangent vector at a point of a product manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct Tangent {
    comps: Vec<TangentComponent>,
}

impl Tangent {
    pub fn new(comps: Vec<TangentComponent>) -> Self {
        Self { comps }
    }

    /// Tangent on `K^m` from left-trivialized components.
    pub fn lie(components: Vec<AlgebraElement>) -> Self {
        Self { comps: components.into_iter().map(TangentComponent::Lie).collect() }
    }

    pub fn zero(shape: &Shape) -> Self {
        Self { comps: shape.factors().iter().map(TangentComponent::zero_for).collect() }
    }

    pub fn components(&self) -> &[TangentComponent] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<TangentComponent> {
        self.comps
    }

    /// Component on a group or algebra factor.
    pub fn lie_component(&self, i: usize) -> &AlgebraElement {
        match &self.comps[i] {
            TangentComponent::Lie(x) => x,
            other => panic!("factor {i} has no Lie component: {other:?}"),
        }
    }

    pub fn simplex_component(&self, i: usize) -> &[f64] {
        match &self.comps[i] {
            TangentComponent::Simplex(t) => t,
            other => panic!("factor {i} has no simplex component: {other:?}"),
        }
    }

    /// Lie components of every factor (panics on other factors).
    pub fn lie_components(&self) -> Vec<AlgebraElement> {
        (0..self.comps.len()).map(|i| self.lie_component(i).clone()).collect()
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Tangent) -> Tangent {
        Tangent { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.axpy(s, b)).collect() }
    }

    pub fn add(&self, other: &Tangent) -> Tangent {
        self.axpy(1.0, other)
    }

    pub fn scale(&self, s: f64) -> Tangent {
        Tangent {
            comps: self
                .comps
                .iter()
                .map(|c| TangentComponent::zero_like(c).axpy(s, c))
                .collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.comps.iter().map(TangentComponent::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn check(&self, shape: &Shape) -> Result<()> {
        if self.comps.len() != shape.len() {
            return Err(Error::ShapeMismatch(format!(
                "tangent has {} factors, shape has {}",
                self.comps.len(),
                shape.len()
            )));
        }
        for (c, f) in self.comps.iter().zip(shape.factors()) {
            match (c, f) {
                (TangentComponent::Lie(x), Factor::Group(n) | Factor::Algebra(n)) if x.size() == *n => {}
                (TangentComponent::Vector(v), Factor::Vector(d)) if v.len() == *d => {}
                (TangentComponent::Simplex(t), Factor::Simplex(n)) if t.len() == n + 1 => {
                    if t.iter().sum::<f64>().abs() > 1e-12 {
                        return Err(Error::ShapeMismatch("simplex tangent does not sum to zero".into()));
                    }
                }
                _ => return Err(Error::ShapeMismatch(format!("tangent component {c:?} does not fit {f:?}"))),
            }
        }
        Ok(())
    }
}

impl TangentComponent {
    fn zero_like(c: &Self) -> Self {
        match c {
            TangentComponent::Lie(a) => TangentComponent::Lie(AlgebraElement::zero(a.size())),
            TangentComponent::Vector(v) => TangentComponent::Vector(alloc::vec![0.0; v.len()]),
            TangentComponent::Simplex(v) => TangentComponent::Simplex(alloc::vec![0.0; v.len()]),
        }
    }
}

/// Moves `x` along the flow of the frame field determined by `v` for time `s`.
pub fn flow(x: &Point, v: &Tangent, s: f64) -> Point {
    let coords = x
        .coords
        .iter()
        .zip(&v.comps)
        .map(|(c, t)| match (c, t) {
            (Coord::Group(g), TangentComponent::Lie(xi)) => Coord::Group(g.mul(&exp_map(&xi.scale(s)))),
            (Coord::Algebra(a), TangentComponent::Lie(u)) => Coord::Algebra(a + &u.scale(s)),
            (Coord::Vector(a), TangentComponent::Vector(u)) => {
                Coord::Vector(a.iter().zip(u).map(|(p, q)| p + s * q).collect())
            }
            (Coord::Simplex(a), TangentComponent::Simplex(u)) => {
                Coord::Simplex(a.iter().zip(u).map(|(p, q)| p + s * q).collect())
            }
            _ => panic!("flow: tangent does not match point"),
        })
        .collect();
    Point { coords }
}

/// Bracket of the frame fields: componentwise Lie bracket on group factors,
/// zero on vector-space and simplex factors. `None` when it vanishes identically.
fn frame_bracket(x: &Point, u: &Tangent, v: &Tangent) -> Option<Tangent> {
    let mut any = false;
    let comps = x
        .coords
        .iter()
        .zip(u.comps.iter().zip(&v.comps))
        .map(|(c, (a, b))| match (c, a, b) {
            (Coord::Group(_), TangentComponent::Lie(p), TangentComponent::Lie(q)) => {
                any = true;
                TangentComponent::Lie(p.bracket(q))
            }
            _ => TangentComponent::zero_like(a),
        })
        .collect();
    any.then_some(Tangent { comps })
}

/// Finite-difference settings for the exterior derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdConfig {
    pub step: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self { step: 1e-5 }
    }
}

impl FdConfig {
    /// Minimum barycentric coordinate admitted by a central difference.
    pub fn simplex_margin(&self) -> f64 {
        10.0 * self.step
    }
}

type ScalarFn<'a> = dyn Fn(&Point, &[Tangent]) -> Result<C64> + 'a;

/// Invariant-frame formula for `d f (v_0, ..., v_p)`.
fn exterior_derivative_at(f: &ScalarFn<'_>, x: &Point, vs: &[Tangent], fd: &FdConfig) -> Result<C64> {
    for c in &x.coords {
        if let Coord::Simplex(t) = c {
            if t.iter().any(|&ti| ti < fd.simplex_margin()) {
                return Err(Error::SimplexBoundary { step: fd.step });
            }
        }
    }
    let h = fd.step;
    let mut total = C64::new(0.0, 0.0);
    let mut rest: Vec<Tangent> = Vec::with_capacity(vs.len());
    for i in 0..vs.len() {
        rest.clear();
        rest.extend(vs.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, v)| v.clone()));
        let plus = f(&flow(x, &vs[i], h), &rest)?;
        let minus = f(&flow(x, &vs[i], -h), &rest)?;
        let term = (plus - minus) / (2.0 * h);
        total += if i % 2 == 0 { term } else { -term };
    }
    for i in 0..vs.len() {
        for j in (i + 1)..vs.len() {
            let Some(b) = frame_bracket(x, &vs[i], &vs[j]) else { continue };
            rest.clear();
            rest.push(b);
            rest.extend(vs.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, v)| v.clone()));
            let term = f(x, &rest)?;
            total += if (i + j) % 2 == 0 { term } else { -term };
        }
    }
    Ok(total)
}

type FormFn = dyn Fn(&Point, &[Tangent]) -> Result<C64> + Send + Sync;

/// A scalar differential form of fixed arity, evaluated lazily.
#[derive(Clone)]
pub struct FormField {
    shape: Shape,
    arity: usize,
    eval: Arc<FormFn>,
}

impl fmt::Debug for FormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormField").field("shape", &self.shape).field("arity", &self.arity).finish()
    }
}

/// Sign of the shuffle that puts `first` (sorted) before the complement.
fn shuffle_sign(first: &[usize]) -> f64 {
    let inversions: usize = first.iter().enumerate().map(|(pos, &idx)| idx - pos).sum();
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// All `k`-subsets of `0..n`, sorted.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl FormField {
    pub fn new<F>(shape: Shape, arity: usize, f: F) -> Self
    where
        F: Fn(&Point, &[Tangent]) -> Result<C64> + Send + Sync + 'static,
    {
        Self { shape, arity, eval: Arc::new(f) }
    }

    pub fn zero(shape: Shape, arity: usize) -> Self {
        Self::new(shape, arity, |_, _| Ok(C64::new(0.0, 0.0)))
    }

    /// The constant function `c`.
    pub fn constant(shape: Shape, c: C64) -> Self {
        Self::new(shape, 0, move |_, _| Ok(c))
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Validated evaluation.
    pub fn evaluate(&self, x: &Point, vs: &[Tangent]) -> Result<C64> {
        if vs.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: vs.len() });
        }
        x.check(&self.shape)?;
        for v in vs {
            v.check(&self.shape)?;
        }
        (self.eval)(x, vs)
    }

    /// Evaluation without shape validation.
    pub fn value(&self, x: &Point, vs: &[Tangent]) -> Result<C64> {
        if vs.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: vs.len() });
        }
        (self.eval)(x, vs)
    }

    pub fn scale(&self, s: C64) -> Self {
        let f = self.clone();
        Self::new(self.shape.clone(), self.arity, move |x, vs| Ok(f.value(x, vs)? * s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.shape.require_eq(&other.shape)?;
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: other.arity });
        }
        let (a, b) = (self.clone(), other.clone());
        Ok(Self::new(self.shape.clone(), self.arity, move |x, vs| Ok(a.value(x, vs)? + b.value(x, vs)?)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Shuffle-sum wedge product:
    /// `(f ^ g)(v) = sum over (p,q)-shuffles s of sgn(s) f(v_s(1..p)) g(v_s(p+1..))`.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.shape.require_eq(&other.shape)?;
        let (p, q) = (self.arity, other.arity);
        let shuffles: Arc<Vec<(f64, Vec<usize>, Vec<usize>)>> = Arc::new(
            subsets(p + q, p)
                .into_iter()
                .map(|first| {
                    let second: Vec<usize> = (0..p + q).filter(|i| !first.contains(i)).collect();
                    (shuffle_sign(&first), first, second)
                })
                .collect(),
        );
        let (a, b) = (self.clone(), other.clone());
        Ok(Self::new(self.shape.clone(), p + q, move |x, vs| {
            let mut total = C64::new(0.0, 0.0);
            for (sign, first, second) in shuffles.iter() {
                let va: Vec<Tangent> = first.iter().map(|&i| vs[i].clone()).collect();
                let vb: Vec<Tangent> = second.iter().map(|&i| vs[i].clone()).collect();
                total += a.value(x, &va)? * b.value(x, &vb)? * *sign;
            }
            Ok(total)
        }))
    }

    /// `(m^* f)(x; v...) = f(m(x); m_* v...)`.
    pub fn pullback(&self, map: Arc<dyn SmoothMap>) -> Result<Self> {
        self.shape.require_eq(map.codomain())?;
        let f = self.clone();
        Ok(Self::new(map.domain().clone(), self.arity, move |x, vs| {
            let y = map.apply(x)?;
            let pushed = vs.iter().map(|v| map.push(x, v)).collect::<Result<Vec<_>>>()?;
            f.value(&y, &pushed)
        }))
    }

    /// Contraction of the first slot with `field`.
    pub fn interior_product(&self, field: VectorField) -> Result<Self> {
        if self.arity == 0 {
            return Err(Error::ArityMismatch { expected: 1, found: 0 });
        }
        let f = self.clone();
        Ok(Self::new(self.shape.clone(), self.arity - 1, move |x, vs| {
            let mut all = Vec::with_capacity(vs.len() + 1);
            all.push(field.at(x)?);
            all.extend_from_slice(vs);
            f.value(x, &all)
        }))
    }

    /// Exterior derivative by the invariant-frame formula with central differences.
    pub fn exterior_derivative(&self, fd: FdConfig) -> Self {
        let f = self.clone();
        let arity = self.arity;
        Self::new(self.shape.clone(), arity + 1, move |x, vs| {
            exterior_derivative_at(&|y: &Point, ws: &[Tangent]| f.value(y, ws), x, vs, &fd)
        })
    }

    /// Views the form as an equivariant form with no `phi` dependence.
    pub fn into_equivariant(self, actions: Vec<Action>) -> Result<EquivariantFormField> {
        let f = self.clone();
        let arity = self.arity;
        EquivariantFormField::new(self.shape, arity, actions, move |_, x, vs| {
            if vs.len() == arity {
                f.value(x, vs)
            } else {
                Ok(C64::new(0.0, 0.0))
            }
        })
    }
}

/// Symmetry action of `K` on one factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Trivial,
    /// `h -> k h k^{-1}` on a group factor.
    Conjugation,
    /// `L -> Ad(k) L` on an algebra factor.
    Adjoint,
    /// `g -> k g` on a group factor.
    LeftMultiplication,
}

/// Left-trivialized generating vector field of `phi` (velocity of `exp(s phi) . x` at `s = 0`).
pub fn generating_field(actions: &[Action], phi: &AlgebraElement, x: &Point) -> Tangent {
    let comps = actions
        .iter()
        .zip(&x.coords)
        .map(|(a, c)| match (a, c) {
            (Action::Conjugation, Coord::Group(h)) => TangentComponent::Lie(&h.adjoint_inv(phi) - phi),
            (Action::LeftMultiplication, Coord::Group(g)) => TangentComponent::Lie(g.adjoint_inv(phi)),
            (Action::Adjoint, Coord::Algebra(l)) => TangentComponent::Lie(phi.bracket(l)),
            (Action::Trivial, Coord::Group(g)) => TangentComponent::Lie(AlgebraElement::zero(g.size())),
            (Action::Trivial, Coord::Algebra(l)) => TangentComponent::Lie(AlgebraElement::zero(l.size())),
            (Action::Trivial, Coord::Vector(v)) => TangentComponent::Vector(alloc::vec![0.0; v.len()]),
            (Action::Trivial, Coord::Simplex(t)) => TangentComponent::Simplex(alloc::vec![0.0; t.len()]),
            (a, c) => panic!("action {a:?} does not apply to coordinate {c:?}"),
        })
        .collect();
    Tangent { comps }
}

/// Moves a point by the action of `k`.
pub fn act(actions: &[Action], k: &GroupElement, x: &Point) -> Point {
    let coords = actions
        .iter()
        .zip(&x.coords)
        .map(|(a, c)| match (a, c) {
            (Action::Conjugation, Coord::Group(h)) => Coord::Group(k.mul(h).mul(&k.inverse())),
            (Action::LeftMultiplication, Coord::Group(g)) => Coord::Group(k.mul(g)),
            (Action::Adjoint, Coord::Algebra(l)) => Coord::Algebra(k.adjoint(l)),
            (_, c) => c.clone(),
        })
        .collect();
    Point { coords }
}

/// Pushes a tangent forward by the action of `k`.
pub fn act_tangent(actions: &[Action], k: &GroupElement, v: &Tangent) -> Tangent {
    let comps = actions
        .iter()
        .zip(&v.comps)
        .map(|(a, c)| match (a, c) {
            // k h exp(s xi) k^{-1} = (k h k^{-1}) exp(s Ad(k) xi)
            (Action::Conjugation, TangentComponent::Lie(xi)) => TangentComponent::Lie(k.adjoint(xi)),
            // k g exp(s xi): left-trivialized component unchanged
            (Action::LeftMultiplication, TangentComponent::Lie(xi)) => TangentComponent::Lie(xi.clone()),
            (Action::Adjoint, TangentComponent::Lie(u)) => TangentComponent::Lie(k.adjoint(u)),
            (_, c) => c.clone(),
        })
        .collect();
    Tangent { comps }
}

/// A vector field descriptor for interior products.
#[derive(Clone)]
pub struct VectorField(Arc<dyn Fn(&Point) -> Result<Tangent> + Send + Sync>);

impl VectorField {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&Point) -> Result<Tangent> + Send + Sync + 'static,
    {
        Self(Arc::new(f))
    }

    pub fn constant(v: Tangent) -> Self {
        Self::new(move |_| Ok(v.clone()))
    }

    /// The field generated by `phi` under `actions`.
    pub fn generated(actions: Vec<Action>, phi: AlgebraElement) -> Self {
        Self::new(move |x| Ok(generating_field(&actions, &phi, x)))
    }

    pub fn at(&self, x: &Point) -> Result<Tangent> {
        (self.0)(x)
    }
}

type EquivariantFn = dyn Fn(&AlgebraElement, &Point, &[Tangent]) -> Result<C64> + Send + Sync;

/// Cartan-model form `phi -> alpha(phi)` of fixed total degree.
///
/// An element of total degree `D` is a sum of components: the component of
/// arity `p` is a polynomial of degree `(D - p) / 2` in `phi`. The evaluator
/// receives the tangents of one component; the number of tangents selects the
/// component, and arities of the wrong parity or above `D` evaluate to zero.
#[derive(Clone)]
pub struct EquivariantFormField {
    shape: Shape,
    degree: usize,
    actions: Arc<[Action]>,
    eval: Arc<EquivariantFn>,
}

impl fmt::Debug for EquivariantFormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EquivariantFormField")
            .field("shape", &self.shape)
            .field("degree", &self.degree)
            .field("actions", &self.actions)
            .finish()
    }
}

fn check_actions(shape: &Shape, actions: &[Action]) -> Result<()> {
    if actions.len() != shape.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} actions for {} factors",
            actions.len(),
            shape.len()
        )));
    }
    for (a, f) in actions.iter().zip(shape.factors()) {
        let ok = match a {
            Action::Trivial => true,
            Action::Conjugation | Action::LeftMultiplication => matches!(f, Factor::Group(_)),
            Action::Adjoint => matches!(f, Factor::Algebra(_)),
        };
        if !ok {
            return Err(Error::ShapeMismatch(format!("action {a:?} on factor {f:?}")));
        }
    }
    Ok(())
}

impl EquivariantFormField {
    pub fn new<F>(shape: Shape, degree: usize, actions: Vec<Action>, f: F) -> Result<Self>
    where
        F: Fn(&AlgebraElement, &Point, &[Tangent]) -> Result<C64> + Send + Sync + 'static,
    {
        check_actions(&shape, &actions)?;
        Ok(Self { shape, degree, actions: actions.into(), eval: Arc::new(f) })
    }

    pub fn zero(shape: Shape, degree: usize, actions: Vec<Action>) -> Result<Self> {
        Self::new(shape, degree, actions, |_, _, _| Ok(C64::new(0.0, 0.0)))
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Total degree (form degree plus twice the polynomial degree).
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    /// Polynomial degree in `phi` of the component of the given arity.
    pub fn phi_degree(&self, arity: usize) -> Option<usize> {
        (arity <= self.degree && (self.degree - arity).is_multiple_of(2)).then(|| (self.degree - arity) / 2)
    }

    /// Arities of the (possibly) nonzero components, highest first.
    pub fn arities(&self) -> Vec<usize> {
        (0..=self.degree).rev().filter(|p| self.phi_degree(*p).is_some()).collect()
    }

    /// Validated evaluation of one component.
    pub fn evaluate(&self, phi: &AlgebraElement, x: &Point, vs: &[Tangent]) -> Result<C64> {
        x.check(&self.shape)?;
        for v in vs {
            v.check(&self.shape)?;
        }
        self.value(phi, x, vs)
    }

    /// Evaluation without shape validation.
    pub fn value(&self, phi: &AlgebraElement, x: &Point, vs: &[Tangent]) -> Result<C64> {
        if self.phi_degree(vs.len()).is_none() {
            return Ok(C64::new(0.0, 0.0));
        }
        (self.eval)(phi, x, vs)
    }

    /// The component of the given arity at fixed `phi`.
    pub fn component(&self, phi: &AlgebraElement, arity: usize) -> FormField {
        let f = self.clone();
        let phi = phi.clone();
        FormField::new(self.shape.clone(), arity, move |x, vs| f.value(&phi, x, vs))
    }

    pub fn scale(&self, s: C64) -> Self {
        let f = self.clone();
        Self { eval: Arc::new(move |phi, x, vs| Ok(f.value(phi, x, vs)? * s)), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.shape.require_eq(&other.shape)?;
        if self.degree != other.degree {
            return Err(Error::ArityMismatch { expected: self.degree, found: other.degree });
        }
        if self.actions != other.actions {
            return Err(Error::ShapeMismatch("actions differ".into()));
        }
        let (a, b) = (self.clone(), other.clone());
        Ok(Self { eval: Arc::new(move |phi, x, vs| Ok(a.value(phi, x, vs)? + b.value(phi, x, vs)?)), ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Pullback by an equivariant map; `actions` describe the domain.
    pub fn pullback(&self, map: Arc<dyn SmoothMap>, actions: Vec<Action>) -> Result<Self> {
        self.shape.require_eq(map.codomain())?;
        let f = self.clone();
        Self::new(map.domain().clone(), self.degree, actions, move |phi, x, vs| {
            let y = map.apply(x)?;
            let pushed = vs.iter().map(|v| map.push(x, v)).collect::<Result<Vec<_>>>()?;
            f.value(phi, &y, &pushed)
        })
    }

    /// Cartan differential `(d_K a)(phi) = d(a(phi)) - iota_{phi~} a(phi)`.
    pub fn cartan_differential(&self, fd: FdConfig) -> Self {
        let f = self.clone();
        let actions = self.actions.clone();
        Self {
            shape: self.shape.clone(),
            degree: self.degree + 1,
            actions: self.actions.clone(),
            eval: Arc::new(move |phi, x, vs| {
                let mut total = C64::new(0.0, 0.0);
                if !vs.is_empty() {
                    total += exterior_derivative_at(&|y: &Point, ws: &[Tangent]| f.value(phi, y, ws), x, vs, &fd)?;
                }
                let mut all = Vec::with_capacity(vs.len() + 1);
                all.push(generating_field(&actions, phi, x));
                all.extend_from_slice(vs);
                total -= f.value(phi, x, &all)?;
                Ok(total)
            }),
        }
    }
}

/// A smooth map between product shapes with an exact tangent pushforward.
pub trait SmoothMap: Send + Sync {
    fn domain(&self) -> &Shape;
    fn codomain(&self) -> &Shape;
    fn apply(&self, x: &Point) -> Result<Point>;
    fn push(&self, x: &Point, v: &Tangent) -> Result<Tangent>;
}

/// The identity map of a shape.
pub struct IdentityMap(pub Shape);

impl SmoothMap for IdentityMap {
    fn domain(&self) -> &Shape {
        &self.0
    }
    fn codomain(&self) -> &Shape {
        &self.0
    }
    fn apply(&self, x: &Point) -> Result<Point> {
        Ok(x.clone())
    }
    fn push(&self, _x: &Point, v: &Tangent) -> Result<Tangent> {
        Ok(v.clone())
    }
}

/// `outer . inner`.
pub struct Composition {
    outer: Arc<dyn SmoothMap>,
    inner: Arc<dyn SmoothMap>,
}

impl Composition {
    pub fn new(outer: Arc<dyn SmoothMap>, inner: Arc<dyn SmoothMap>) -> Result<Self> {
        outer.domain().require_eq(inner.codomain())?;
        Ok(Self { outer, inner })
    }
}

impl SmoothMap for Composition {
    fn domain(&self) -> &Shape {
        self.inner.domain()
    }
    fn codomain(&self) -> &Shape {
        self.outer.codomain()
    }
    fn apply(&self, x: &Point) -> Result<Point> {
        self.outer.apply(&self.inner.apply(x)?)
    }
    fn push(&self, x: &Point, v: &Tangent) -> Result<Tangent> {
        let y = self.inner.apply(x)?;
        self.outer.push(&y, &self.inner.push(x, v)?)
    }
}

/// A map given by closures; handy for charts and tests.
pub struct FnMap {
    domain: Shape,
    codomain: Shape,
    #[allow(clippy::type_complexity)]
    apply: Box<dyn Fn(&Point) -> Result<Point> + Send + Sync>,
    #[allow(clippy::type_complexity)]
    push: Box<dyn Fn(&Point, &Tangent) -> Result<Tangent> + Send + Sync>,
}

impl FnMap {
    pub fn new<A, P>(domain: Shape, codomain: Shape, apply: A, push: P) -> Self
    where
        A: Fn(&Point) -> Result<Point> + Send + Sync + 'static,
        P: Fn(&Point, &Tangent) -> Result<Tangent> + Send + Sync + 'static,
    {
        Self { domain, codomain, apply: Box::new(apply), push: Box::new(push) }
    }
}

impl SmoothMap for FnMap {
    fn domain(&self) -> &Shape {
        &self.domain
    }
    fn codomain(&self) -> &Shape {
        &self.codomain
    }
    fn apply(&self, x: &Point) -> Result<Point> {
        (self.apply)(x)
    }
    fn push(&self, x: &Point, v: &Tangent) -> Result<Tangent> {
        (self.push)(x, v)
    }
}

/// Finite-difference velocity of `s -> map(flow(x, v, s))` at `s = 0`, as a
/// left-trivialized tangent of the codomain. Test oracle for pushforwards.
pub fn fd_pushforward(map: &dyn SmoothMap, x: &Point, v: &Tangent, step: f64) -> Result<Tangent> {
    let yp = map.apply(&flow(x, v, step))?;
    let ym = map.apply(&flow(x, v, -step))?;
    let y = map.apply(x)?;
    let comps = y
        .coords
        .iter()
        .zip(yp.coords.iter().zip(&ym.coords))
        .map(|(c, (p, m))| match (c, p, m) {
            (Coord::Group(g), Coord::Group(gp), Coord::Group(gm)) => {
                let d = (gp.matrix() - gm.matrix()) / C64::new(2.0 * step, 0.0);
                TangentComponent::Lie(AlgebraElement::project(&(g.matrix().adjoint() * d)))
            }
            (Coord::Algebra(_), Coord::Algebra(ap), Coord::Algebra(am)) => {
                TangentComponent::Lie((ap - am).scale(0.5 / step))
            }
            (Coord::Vector(_), Coord::Vector(ap), Coord::Vector(am)) => {
                TangentComponent::Vector(ap.iter().zip(am).map(|(a, b)| (a - b) / (2.0 * step)).collect())
            }
            (Coord::Simplex(_), Coord::Simplex(ap), Coord::Simplex(am)) => {
                TangentComponent::Simplex(ap.iter().zip(am).map(|(a, b)| (a - b) / (2.0 * step)).collect())
            }
            _ => panic!("fd_pushforward: inconsistent coordinates"),
        })
        .collect();
    Ok(Tangent { comps })
}
