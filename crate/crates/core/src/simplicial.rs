//! Face maps of the simplicial models of `BK` and `EK`, the simplicial
//! coboundary, the connection on `Delta^n x K^{n+1}`, and the Bott-Shulman
//! forms with their Cartan-model extension.
//!
//! Sign conventions: `Phi_n(Q) = -sigma_n^* int_{Delta^n} Q(F + mu)`, where
//! the fibre integral contracts the simplex directions `e_i - e_0` in the first
//! slots. With `Q = <.,.>` this gives `Phi_1 = -lambda`, `Phi_2 = Omega` and
//! `Phi_1^K = -lambda - Theta`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::form::{Action, EquivariantFormField, Factor, FormField, Point, Shape, SmoothMap, Tangent};
use crate::lie::{AlgebraElement, GroupElement, InvariantPolynomial, C64};
use crate::quadrature::{simplex_monomial_integral, SimplexRule};
use crate::word::{Symbol, WordMap};

/// Level `n` of the simplicial spaces: base `K^n`, total `Delta^n x K^{n+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimplicialLevel {
    pub n: usize,
    pub size: usize,
}

impl SimplicialLevel {
    pub fn new(n: usize, size: usize) -> Self {
        Self { n, size }
    }

    /// `K^n`; `None` at level 0.
    pub fn base_shape(&self) -> Option<Shape> {
        (self.n > 0).then(|| Shape::groups(self.n, self.size))
    }

    /// `K^{n+1}`.
    pub fn total_group_shape(&self) -> Shape {
        Shape::groups(self.n + 1, self.size)
    }

    /// `Delta^n x K^{n+1}` (level `n >= 1`).
    pub fn total_shape(&self) -> Option<Shape> {
        (self.n > 0).then(|| Shape::simplex_groups(self.n, self.size))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceKind {
    /// `K^n -> K^{n-1}`.
    Base,
    /// `K^{n+1} -> K^n`.
    Total,
}

/// Face map `eps_i` at level `n`.
pub fn face_map(kind: FaceKind, i: usize, n: usize, size: usize) -> Result<WordMap> {
    if i > n {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    match kind {
        FaceKind::Base => {
            if n < 2 {
                return Err(Error::ShapeMismatch("base faces need level >= 2".into()));
            }
            let comps: Vec<Vec<Symbol>> = if i == 0 {
                (1..n).map(|j| vec![Symbol::Var(j)]).collect()
            } else if i == n {
                (0..n - 1).map(|j| vec![Symbol::Var(j)]).collect()
            } else {
                let mut c: Vec<Vec<Symbol>> = (0..i - 1).map(|j| vec![Symbol::Var(j)]).collect();
                c.push(vec![Symbol::Var(i - 1), Symbol::Var(i)]);
                c.extend((i + 1..n).map(|j| vec![Symbol::Var(j)]));
                c
            };
            WordMap::new(size, n, comps)
        }
        FaceKind::Total => {
            if n < 1 {
                return Err(Error::ShapeMismatch("total faces need level >= 1".into()));
            }
            let comps = (0..=n).filter(|&j| j != i).map(|j| vec![Symbol::Var(j)]).collect();
            WordMap::new(size, n + 1, comps)
        }
    }
}

/// `delta = sum_i (-1)^i eps_i^*` from forms on `K^n` to forms on `K^{n+1}`.
pub fn delta(f: &FormField) -> Result<FormField> {
    let (n, size) = group_level(f.shape())?;
    let mut terms = Vec::with_capacity(n + 2);
    for i in 0..=n + 1 {
        let pulled = f.pullback(Arc::new(face_map(FaceKind::Base, i, n + 1, size)?))?;
        terms.push(if i % 2 == 0 { pulled } else { pulled.scale(C64::new(-1.0, 0.0)) });
    }
    let mut acc = terms[0].clone();
    for t in &terms[1..] {
        acc = acc.add(t)?;
    }
    Ok(acc)
}

/// Equivariant `delta` for conjugation-equivariant forms on `K^n`.
pub fn delta_equivariant(f: &EquivariantFormField) -> Result<EquivariantFormField> {
    let (n, size) = group_level(f.shape())?;
    let actions = vec![Action::Conjugation; n + 1];
    let mut acc: Option<EquivariantFormField> = None;
    for i in 0..=n + 1 {
        let pulled = f.pullback(Arc::new(face_map(FaceKind::Base, i, n + 1, size)?), actions.clone())?;
        let term = if i % 2 == 0 { pulled } else { pulled.scale(C64::new(-1.0, 0.0)) };
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc.expect("at least two faces"))
}

fn group_level(shape: &Shape) -> Result<(usize, usize)> {
    let mut size = None;
    for f in shape.factors() {
        match (f, size) {
            (Factor::Group(n), None) => size = Some(*n),
            (Factor::Group(n), Some(s)) if *n == s => {}
            _ => return Err(Error::ShapeMismatch("expected a power of one group".into())),
        }
    }
    Ok((shape.len(), size.expect("nonempty shape")))
}

/// `sigma_n(g_1..g_n) = (g_1 ... g_n, g_2 ... g_n, ..., g_n, 1)`.
pub fn section_sigma(n: usize, size: usize) -> Result<WordMap> {
    if n == 0 {
        return Err(Error::ShapeMismatch("section needs level >= 1".into()));
    }
    let comps = (0..=n).map(|i| (i..n).map(Symbol::Var).collect()).collect();
    WordMap::new(size, n, comps)
}

/// `q_n(g_0..g_n) = (g_0 g_1^-1, ..., g_{n-1} g_n^-1)`.
pub fn projection_q(n: usize, size: usize) -> Result<WordMap> {
    if n == 0 {
        return Err(Error::ShapeMismatch("projection needs level >= 1".into()));
    }
    let comps = (0..n).map(|i| vec![Symbol::Var(i), Symbol::Inv(i + 1)]).collect();
    WordMap::new(size, n + 1, comps)
}

/// Lie-algebra-valued form of fixed arity.
#[derive(Clone)]
pub struct AlgebraValuedForm {
    shape: Shape,
    arity: usize,
    #[allow(clippy::type_complexity)]
    eval: Arc<dyn Fn(&Point, &[Tangent]) -> Result<AlgebraElement> + Send + Sync>,
}

impl core::fmt::Debug for AlgebraValuedForm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("AlgebraValuedForm").field("shape", &self.shape).field("arity", &self.arity).finish()
    }
}

impl AlgebraValuedForm {
    pub fn new<F>(shape: Shape, arity: usize, f: F) -> Self
    where
        F: Fn(&Point, &[Tangent]) -> Result<AlgebraElement> + Send + Sync + 'static,
    {
        Self { shape, arity, eval: Arc::new(f) }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn evaluate(&self, x: &Point, vs: &[Tangent]) -> Result<AlgebraElement> {
        if vs.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: vs.len() });
        }
        x.check(&self.shape)?;
        for v in vs {
            v.check(&self.shape)?;
        }
        (self.eval)(x, vs)
    }

    /// The scalar form `<a, alpha>`.
    pub fn pair(&self, a: &AlgebraElement) -> FormField {
        let (f, a) = (self.clone(), a.clone());
        FormField::new(self.shape.clone(), self.arity, move |x, vs| Ok(C64::new(a.inner(&(f.eval)(x, vs)?), 0.0)))
    }
}

/// `theta(t) = sum_i t_i xi_i` for a tangent whose simplex part is ignored.
pub fn theta_at(t: &[f64], xi: &[AlgebraElement]) -> AlgebraElement {
    let mut acc = AlgebraElement::zero(xi[0].size());
    for (ti, x) in t.iter().zip(xi) {
        acc += &x.scale(*ti);
    }
    acc
}

/// Curvature of `theta(t)` on `(s, xi)`, `(s', xi')`:
/// `sum (s_i xi'_i - s'_i xi_i) - sum t_i [xi_i, xi'_i] + [sum t xi, sum t xi']`.
pub fn curvature_at(
    t: &[f64],
    s: &[f64],
    xi: &[AlgebraElement],
    s2: &[f64],
    xi2: &[AlgebraElement],
) -> AlgebraElement {
    let n = xi[0].size();
    let mut acc = AlgebraElement::zero(n);
    for i in 0..t.len() {
        if s[i] != 0.0 {
            acc += &xi2[i].scale(s[i]);
        }
        if s2[i] != 0.0 {
            acc += &xi[i].scale(-s2[i]);
        }
        acc += &xi[i].bracket(&xi2[i]).scale(-t[i]);
    }
    acc + theta_at(t, xi).bracket(&theta_at(t, xi2))
}

/// `mu(phi) = -sum_i t_i Ad(g_i^-1) phi`.
pub fn moment_at(t: &[f64], g: &[GroupElement], phi: &AlgebraElement) -> AlgebraElement {
    let mut acc = AlgebraElement::zero(phi.size());
    for (ti, gi) in t.iter().zip(g) {
        acc += &gi.adjoint_inv(phi).scale(-ti);
    }
    acc
}

fn split_total(x: &Point) -> (Vec<f64>, Vec<GroupElement>) {
    let t = x.simplex(0).to_vec();
    let g = (1..x.coords().len()).map(|i| x.group(i).clone()).collect();
    (t, g)
}

fn split_tangent(v: &Tangent) -> (Vec<f64>, Vec<AlgebraElement>) {
    let s = v.simplex_component(0).to_vec();
    let xi = (1..v.components().len()).map(|i| v.lie_component(i).clone()).collect();
    (s, xi)
}

/// `theta(t)` as an algebra-valued 1-form on `Delta^n x K^{n+1}`.
pub fn connection_theta(n: usize, size: usize) -> AlgebraValuedForm {
    AlgebraValuedForm::new(Shape::simplex_groups(n, size), 1, |x, vs| {
        let (t, _) = split_total(x);
        let (_, xi) = split_tangent(&vs[0]);
        Ok(theta_at(&t, &xi))
    })
}

/// `F_{theta(t)}` as an algebra-valued 2-form on `Delta^n x K^{n+1}`.
pub fn curvature_f(n: usize, size: usize) -> AlgebraValuedForm {
    AlgebraValuedForm::new(Shape::simplex_groups(n, size), 2, |x, vs| {
        let (t, _) = split_total(x);
        let (s, xi) = split_tangent(&vs[0]);
        let (s2, xi2) = split_tangent(&vs[1]);
        Ok(curvature_at(&t, &s, &xi, &s2, &xi2))
    })
}

/// Symmetry actions on `Delta^n x K^{n+1}`: trivial on the simplex, left multiplication on each group factor.
pub fn total_actions(n: usize) -> Vec<Action> {
    let mut a = vec![Action::Trivial];
    a.extend(std::iter::repeat_n(Action::LeftMultiplication, n + 1));
    a
}

/// `mu` at a point of `Delta^n x K^{n+1}`.
pub fn moment_mu(phi: &AlgebraElement, x: &Point) -> AlgebraElement {
    let (t, g) = split_total(x);
    moment_at(&t, &g, phi)
}

/// Perfect matchings of `0..2k` as sorted pairs with their Pfaffian signs.
pub fn perfect_matchings(count: usize) -> Vec<(Vec<(usize, usize)>, f64)> {
    fn rec(rest: &[usize]) -> Vec<(Vec<(usize, usize)>, f64)> {
        if rest.is_empty() {
            return vec![(Vec::new(), 1.0)];
        }
        let a = rest[0];
        let mut out = Vec::new();
        for idx in 1..rest.len() {
            let b = rest[idx];
            let remaining: Vec<usize> = rest[1..idx].iter().chain(&rest[idx + 1..]).copied().collect();
            let sign = if (idx - 1) % 2 == 0 { 1.0 } else { -1.0 };
            for (mut m, s) in rec(&remaining) {
                m.insert(0, (a, b));
                out.push((m, sign * s));
            }
        }
        out
    }
    assert!(count.is_multiple_of(2), "perfect matchings need an even count");
    rec(&(0..count).collect::<Vec<_>>())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(k: usize) -> f64 {
    (2..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// Splits `p` tangents at level `n` into `(k, m)`: `k` curvature slots and `m` moment slots.
fn slot_split(r: usize, n: usize, p: usize) -> Option<(usize, usize)> {
    if !(n + p).is_multiple_of(2) {
        return None;
    }
    let k = (n + p) / 2;
    (k <= r).then(|| (k, r - k))
}

/// Simplex-direction vectors `e_i - e_0` followed by the given group tangents.
fn fibre_vectors(n: usize, w: &[Vec<AlgebraElement>]) -> Vec<(Vec<f64>, Vec<AlgebraElement>)> {
    let size = w.first().map(|v| v[0].size());
    let zero_alg = |sz: usize| vec![AlgebraElement::zero(sz); n + 1];
    let mut out = Vec::with_capacity(n + w.len());
    for i in 1..=n {
        let mut s = vec![0.0; n + 1];
        s[i] = 1.0;
        s[0] = -1.0;
        out.push((s, size.map(zero_alg).unwrap_or_default()));
    }
    for xi in w {
        out.push((vec![0.0; n + 1], xi.clone()));
    }
    out
}

/// The polarized `Q(F, ..., F, mu, ..., mu)` integrand on `2k` vectors at `t`,
/// summed over perfect matchings.
fn integrand(
    q: &InvariantPolynomial,
    t: &[f64],
    vecs: &[(Vec<f64>, Vec<AlgebraElement>)],
    mu: Option<&AlgebraElement>,
    m: usize,
    matchings: &[(Vec<(usize, usize)>, f64)],
) -> Result<C64> {
    let cnt = vecs.len();
    let mut fmat: Vec<Option<AlgebraElement>> = vec![None; cnt * cnt];
    let mut total = C64::new(0.0, 0.0);
    for (pairs, sign) in matchings {
        let mut args: Vec<AlgebraElement> = Vec::with_capacity(pairs.len() + m);
        for &(a, b) in pairs {
            let slot = &mut fmat[a * cnt + b];
            if slot.is_none() {
                let (s, xi) = &vecs[a];
                let (s2, xi2) = &vecs[b];
                *slot = Some(if xi.is_empty() && xi2.is_empty() {
                    AlgebraElement::zero(q.size())
                } else {
                    curvature_at(t, s, xi, s2, xi2)
                });
            }
            args.push(slot.clone().expect("filled above"));
        }
        if m > 0 {
            let mu = mu.expect("moment slots need mu");
            args.extend(std::iter::repeat_n(mu.clone(), m));
        }
        let refs: Vec<&AlgebraElement> = args.iter().collect();
        total += q.eval(&refs)? * *sign;
    }
    Ok(total)
}

/// `-int_{Delta^n} Q(F + mu)` as an equivariant form on `K^{n+1}` (left
/// multiplication on every factor), by simplex quadrature.
pub fn fibre_integral(q: &InvariantPolynomial, n: usize, rule: Option<SimplexRule>) -> Result<EquivariantFormField> {
    if n == 0 {
        return Err(Error::ShapeMismatch("fibre integration needs level >= 1".into()));
    }
    let r = q.degree();
    let rule = rule.unwrap_or_else(|| SimplexRule::exact_to(n, 2 * r));
    if rule.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rule.dim() });
    }
    rule.require(2 * r)?;
    let rule = Arc::new(rule);
    let q = q.clone();
    let size = q.size();
    let matchings: Arc<Vec<Vec<(Vec<(usize, usize)>, f64)>>> =
        Arc::new((0..=r).map(|k| perfect_matchings(2 * k)).collect());
    EquivariantFormField::new(
        Shape::groups(n + 1, size),
        2 * r - n,
        vec![Action::LeftMultiplication; n + 1],
        move |phi, x, vs| {
            let Some((k, m)) = slot_split(r, n, vs.len()) else {
                return Ok(C64::new(0.0, 0.0));
            };
            if m > 0 && phi.is_zero(0.0) {
                return Ok(C64::new(0.0, 0.0));
            }
            let g = x.group_elements();
            let w: Vec<Vec<AlgebraElement>> = vs.iter().map(Tangent::lie_components).collect();
            let vecs = fibre_vectors(n, &w);
            let mut total = C64::new(0.0, 0.0);
            for (t, weight) in rule.nodes() {
                let mu = (m > 0).then(|| moment_at(t, &g, phi));
                total += integrand(&q, t, &vecs, mu.as_ref(), m, &matchings[k])? * weight;
            }
            Ok(-total * (binomial(r, m) * factorial(k)))
        },
    )
}

/// Polynomial in `t_0..t_n` with algebra-element coefficients: a sum of
/// `(exponents, coefficient)` terms.
type AlgPoly = Vec<(Vec<usize>, AlgebraElement)>;

fn curvature_poly(n: usize, s: &[f64], xi: &[AlgebraElement], s2: &[f64], xi2: &[AlgebraElement]) -> AlgPoly {
    let size = xi.first().or(xi2.first()).map(|x| x.size());
    let Some(size) = size else { return Vec::new() };
    let zero = vec![AlgebraElement::zero(size); n + 1];
    let xi = if xi.is_empty() { &zero[..] } else { xi };
    let xi2 = if xi2.is_empty() { &zero[..] } else { xi2 };
    let mut out: AlgPoly = Vec::new();
    let mut constant = AlgebraElement::zero(size);
    for i in 0..=n {
        constant += &(&xi2[i].scale(s[i]) - &xi[i].scale(s2[i]));
    }
    out.push((vec![0; n + 1], constant));
    for i in 0..=n {
        let mut e = vec![0; n + 1];
        e[i] = 1;
        out.push((e, -xi[i].bracket(&xi2[i])));
    }
    for i in 0..=n {
        for j in 0..=n {
            let mut e = vec![0; n + 1];
            e[i] += 1;
            e[j] += 1;
            out.push((e, xi[i].bracket(&xi2[j])));
        }
    }
    out.retain(|(_, c)| !c.is_zero(0.0));
    out
}

/// Same form as [`fibre_integral`], integrated exactly: every slot is
/// expanded as a polynomial in `t` and each monomial is integrated with the
/// Dirichlet moment formula. Independent of any quadrature rule; slower.
pub fn fibre_integral_exact(q: &InvariantPolynomial, n: usize) -> Result<EquivariantFormField> {
    if n == 0 {
        return Err(Error::ShapeMismatch("fibre integration needs level >= 1".into()));
    }
    let r = q.degree();
    let q = q.clone();
    let size = q.size();
    EquivariantFormField::new(
        Shape::groups(n + 1, size),
        2 * r - n,
        vec![Action::LeftMultiplication; n + 1],
        move |phi, x, vs| {
            let Some((k, m)) = slot_split(r, n, vs.len()) else {
                return Ok(C64::new(0.0, 0.0));
            };
            let g = x.group_elements();
            let w: Vec<Vec<AlgebraElement>> = vs.iter().map(Tangent::lie_components).collect();
            let vecs = fibre_vectors(n, &w);
            let mu_poly: AlgPoly = (0..=n)
                .map(|i| {
                    let mut e = vec![0; n + 1];
                    e[i] = 1;
                    (e, -g[i].adjoint_inv(phi))
                })
                .collect();
            let mut total = C64::new(0.0, 0.0);
            for (pairs, sign) in perfect_matchings(2 * k) {
                let mut slots: Vec<AlgPoly> = pairs
                    .iter()
                    .map(|&(a, b)| curvature_poly(n, &vecs[a].0, &vecs[a].1, &vecs[b].0, &vecs[b].1))
                    .collect();
                slots.extend(std::iter::repeat_n(mu_poly.clone(), m));
                total += expand_and_integrate(&q, &slots, n)? * sign;
            }
            Ok(-total * (binomial(r, m) * factorial(k)))
        },
    )
}

fn expand_and_integrate(q: &InvariantPolynomial, slots: &[AlgPoly], n: usize) -> Result<C64> {
    fn rec(
        q: &InvariantPolynomial,
        slots: &[AlgPoly],
        chosen: &mut Vec<AlgebraElement>,
        exps: &mut Vec<usize>,
        acc: &mut C64,
    ) -> Result<()> {
        let depth = chosen.len();
        if depth == slots.len() {
            let refs: Vec<&AlgebraElement> = chosen.iter().collect();
            *acc += q.eval(&refs)? * simplex_monomial_integral(exps);
            return Ok(());
        }
        for (e, c) in &slots[depth] {
            for (x, y) in exps.iter_mut().zip(e) {
                *x += y;
            }
            chosen.push(c.clone());
            rec(q, slots, chosen, exps, acc)?;
            chosen.pop();
            for (x, y) in exps.iter_mut().zip(e) {
                *x -= y;
            }
        }
        Ok(())
    }
    if slots.iter().any(|s| s.is_empty()) {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut acc = C64::new(0.0, 0.0);
    rec(q, slots, &mut Vec::with_capacity(slots.len()), &mut vec![0; n + 1], &mut acc)?;
    Ok(acc)
}

/// A Bott-Shulman form `Phi_n^K(Q)` on `K^n`, with its plain part `Phi_n(Q)`.
#[derive(Clone, Debug)]
pub struct BsForm {
    polynomial: InvariantPolynomial,
    level: usize,
    equivariant: EquivariantFormField,
}

impl BsForm {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn polynomial(&self) -> &InvariantPolynomial {
        &self.polynomial
    }

    /// Arity `2r - n` of the plain form.
    pub fn arity(&self) -> usize {
        2 * self.polynomial.degree() - self.level
    }

    pub fn equivariant(&self) -> &EquivariantFormField {
        &self.equivariant
    }

    /// `Phi_n(Q)`: the equivariant form at `phi = 0`.
    pub fn plain(&self) -> FormField {
        self.equivariant.component(&AlgebraElement::zero(self.polynomial.size()), self.arity())
    }
}

/// `Phi_n^K(Q) = sigma_n^* (-int Q(F + mu))` on `K^n` with the conjugation action.
pub fn bott_shulman(q: &InvariantPolynomial, n: usize, rule: Option<SimplexRule>) -> Result<BsForm> {
    let r = q.degree();
    if n == 0 || n > 2 * r {
        return Err(Error::DegreeOutOfRange { degree: n, max: 2 * r });
    }
    let total = fibre_integral(q, n, rule)?;
    let sigma = section_sigma(n, q.size())?;
    let equivariant = total.pullback(Arc::new(sigma), vec![Action::Conjugation; n])?;
    Ok(BsForm { polynomial: q.clone(), level: n, equivariant })
}

/// Closed-form degree-2 specializations for `Q = <.,.>`.
#[derive(Clone, Debug)]
pub struct ClosedForms {
    /// `lambda(u, v, w) = <u, [v, w]>` on `K`, i.e. `(1/6) <theta, [theta, theta]>`.
    pub lambda: FormField,
    /// `Omega = <theta_1, thetabar_2>` on `K^2`.
    pub omega: FormField,
    /// `Theta(phi) = <phi, theta + thetabar>` on `K`.
    pub theta: EquivariantFormField,
    /// `Phi_1^K(Q_2) = -lambda - Theta`.
    pub phi1_k: EquivariantFormField,
    /// `Phi_2^K(Q_2) = Omega`.
    pub phi2_k: EquivariantFormField,
}

pub fn closed_form_library(size: usize) -> Result<ClosedForms> {
    let k1 = Shape::groups(1, size);
    let k2 = Shape::groups(2, size);
    let lambda = FormField::new(k1.clone(), 3, |_, vs| {
        let (u, v, w) = (vs[0].lie_component(0), vs[1].lie_component(0), vs[2].lie_component(0));
        Ok(C64::new(u.inner(&v.bracket(w)), 0.0))
    });
    let omega = FormField::new(k2.clone(), 2, |x, vs| {
        let g2 = x.group(1);
        let (x1, x2) = (vs[0].lie_component(0), vs[0].lie_component(1));
        let (y1, y2) = (vs[1].lie_component(0), vs[1].lie_component(1));
        Ok(C64::new(x1.inner(&g2.adjoint(y2)) - y1.inner(&g2.adjoint(x2)), 0.0))
    });
    let theta = EquivariantFormField::new(k1.clone(), 3, vec![Action::Conjugation], |phi, x, vs| {
        if vs.len() != 1 {
            return Ok(C64::new(0.0, 0.0));
        }
        let xi = vs[0].lie_component(0);
        Ok(C64::new(phi.inner(&(xi + &x.group(0).adjoint(xi))), 0.0))
    })?;
    let lam = lambda.clone();
    let th = theta.clone();
    let phi1_k = EquivariantFormField::new(k1, 3, vec![Action::Conjugation], move |phi, x, vs| match vs.len() {
        3 => Ok(-lam.value(x, vs)?),
        1 => Ok(-th.value(phi, x, vs)?),
        _ => Ok(C64::new(0.0, 0.0)),
    })?;
    let om = omega.clone();
    let phi2_k = EquivariantFormField::new(k2, 2, vec![Action::Conjugation; 2], move |_, x, vs| match vs.len() {
        2 => om.value(x, vs),
        _ => Ok(C64::new(0.0, 0.0)),
    })?;
    Ok(ClosedForms { lambda, omega, theta, phi1_k, phi2_k })
}

/// Fibre integral at level `n` pulled back along `sigma_n`; helper for tests
/// that need the plain form of a given polynomial quickly.
pub fn plain_bott_shulman(q: &InvariantPolynomial, n: usize) -> Result<FormField> {
    Ok(bott_shulman(q, n, None)?.plain())
}

/// `sigma_n` as a shared smooth map.
pub fn sigma_map(n: usize, size: usize) -> Result<Arc<dyn SmoothMap>> {
    Ok(Arc::new(section_sigma(n, size)?))
}
