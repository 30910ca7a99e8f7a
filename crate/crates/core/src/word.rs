//! Free groups on `2g` generators, Fox derivatives, bar chains, and word maps
//! `K^m -> K^k` with exact left-trivialized pushforward.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::form::{Action, EquivariantFormField, FormField, Point, Shape, SmoothMap, Tangent};
use crate::lie::{AlgebraElement, CentralElement, GroupElement, C64};

/// A generator `x_j` (1-based) or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn x(generator: usize) -> Self {
        Self { generator, inverse: false }
    }

    pub fn x_inv(generator: usize) -> Self {
        Self { generator, inverse: true }
    }

    pub fn inverse(self) -> Self {
        Self { generator: self.generator, inverse: !self.inverse }
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn x(generator: usize) -> Self {
        Self(alloc::vec![Letter::x(generator)])
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out = Vec::new();
        for l in letters {
            push_reduced(&mut out, l);
        }
        Self(out)
    }

    /// Free reduction with generator indices validated against `genus`.
    pub fn reduce_checked(letters: impl IntoIterator<Item = Letter>, genus: usize) -> Result<Self> {
        let mut out = Vec::new();
        for l in letters {
            if l.generator == 0 || l.generator > 2 * genus {
                return Err(Error::InvalidGenerator { index: l.generator, genus });
            }
            push_reduced(&mut out, l);
        }
        Ok(Self(out))
    }

    /// Parses whitespace-separated letters like `x1 x2^-1`; `1` or the empty
    /// string denote the identity.
    pub fn parse(s: &str, genus: usize) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (body, inverse) = match tok.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let idx = body
                .strip_prefix('x')
                .and_then(|d| d.parse::<usize>().ok())
                .ok_or_else(|| Error::Parse(format!("bad letter '{tok}'")))?;
            letters.push(Letter { generator: idx, inverse });
        }
        Self::reduce_checked(letters, genus)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// `[a, b] = a b a^-1 b^-1`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    /// Exponent sums per generator `1..=2g`.
    pub fn abelianization(&self, genus: usize) -> Vec<i64> {
        let mut out = alloc::vec![0i64; 2 * genus];
        for l in &self.0 {
            out[l.generator - 1] += if l.inverse { -1 } else { 1 };
        }
        out
    }

    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|l| l.generator).max().unwrap_or(0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "x{}", l.generator)?;
            if l.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses without a genus bound.
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, usize::MAX / 2)
    }
}

fn check_genus(genus: usize) -> Result<()> {
    if genus < 2 {
        return Err(Error::InvalidGenus(genus));
    }
    Ok(())
}

/// `R = prod_j [x_{2j-1}, x_{2j}]`.
pub fn relator(genus: usize) -> Result<Word> {
    check_genus(genus)?;
    Ok((1..=genus).fold(Word::identity(), |acc, j| {
        acc.mul(&Word::commutator(&Word::x(2 * j - 1), &Word::x(2 * j)))
    }))
}

/// The words `gamma_j^tau` (`j` in `1..=2g`, `tau` in `{0, 1}`) with
/// `dR/dx_j = gamma_j^0 - gamma_j^1`.
pub fn gamma(genus: usize, j: usize, tau: u8) -> Result<Word> {
    check_genus(genus)?;
    if j == 0 || j > 2 * genus {
        return Err(Error::InvalidGenerator { index: j, genus });
    }
    let pair = j.div_ceil(2);
    let prefix = (1..pair).fold(Word::identity(), |acc, l| {
        acc.mul(&Word::commutator(&Word::x(2 * l - 1), &Word::x(2 * l)))
    });
    let (a, b) = (Word::x(2 * pair - 1), Word::x(2 * pair));
    Ok(match (j % 2 == 1, tau) {
        (true, 0) => prefix,
        (true, _) => prefix.mul(&a).mul(&b).mul(&a.inverse()),
        (false, 0) => prefix.mul(&a),
        (false, _) => prefix.mul(&Word::commutator(&a, &b)),
    })
}

/// A formal integer combination of words (an element of `Z[F]`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chain1(BTreeMap<Word, i64>);

impl Chain1 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: Word) -> Self {
        let mut c = Self::zero();
        c.add_term(w, 1);
        c
    }

    pub fn add_term(&mut self, w: Word, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let e = self.0.entry(w.clone()).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.0.remove(&w);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.0.iter().map(|(w, c)| (w, *c))
    }

    pub fn coefficient(&self, w: &Word) -> i64 {
        self.0.get(w).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|(w, c)| (w.clone(), -c)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product in the group ring.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }

    /// `w * self`.
    pub fn left_mul(&self, w: &Word) -> Self {
        let mut out = Self::zero();
        for (a, c) in self.terms() {
            out.add_term(w.mul(a), c);
        }
        out
    }

    /// Sum of the coefficients.
    pub fn augmentation(&self) -> i64 {
        self.0.values().sum()
    }
}

impl fmt::Display for Chain1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms().enumerate() {
            let sign = if c < 0 { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                f.write_str(" ")?;
            }
            let mag = c.unsigned_abs();
            if mag == 1 {
                write!(f, "{sign}({w})")?;
            } else {
                write!(f, "{sign}{mag}({w})")?;
            }
        }
        Ok(())
    }
}

/// A formal integer combination of bar pairs `(a|b)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chain2(BTreeMap<(Word, Word), i64>);

impl Chain2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn pair(a: Word, b: Word) -> Self {
        let mut c = Self::zero();
        c.add_term(a, b, 1);
        c
    }

    pub fn add_term(&mut self, a: Word, b: Word, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let key = (a, b);
        let e = self.0.entry(key.clone()).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.0.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Word, i64)> {
        self.0.iter().map(|((a, b), c)| (a, b, *c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b, c) in other.terms() {
            out.add_term(a.clone(), b.clone(), c);
        }
        out
    }
}

impl fmt::Display for Chain2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (a, b, c)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let sign = if c < 0 { "-" } else if i > 0 { "+" } else { "" };
            let mag = c.unsigned_abs();
            if mag == 1 {
                write!(f, "{sign}({a} | {b})")?;
            } else {
                write!(f, "{sign}{mag}({a} | {b})")?;
            }
        }
        Ok(())
    }
}

/// Fox derivative `dw/dx_j`.
pub fn fox_derivative(w: &Word, j: usize) -> Chain1 {
    let mut out = Chain1::zero();
    let mut prefix = Word::identity();
    for &l in w.letters() {
        if l.generator == j {
            if l.inverse {
                out.add_term(prefix.mul(&Word(alloc::vec![l])), -1);
            } else {
                out.add_term(prefix.clone(), 1);
            }
        }
        prefix = prefix.mul(&Word(alloc::vec![l]));
    }
    out
}

/// `c = sum_j sum_tau (-1)^tau (gamma_j^tau | x_j)`.
pub fn fundamental_class(genus: usize) -> Result<Chain2> {
    check_genus(genus)?;
    let mut c = Chain2::zero();
    for j in 1..=2 * genus {
        for tau in 0..2u8 {
            c.add_term(gamma(genus, j, tau)?, Word::x(j), if tau == 0 { 1 } else { -1 });
        }
    }
    Ok(c)
}

/// `d(a|b) = b - ab + a`, extended linearly.
pub fn bar_boundary(ch: &Chain2) -> Chain1 {
    let mut out = Chain1::zero();
    for (a, b, c) in ch.terms() {
        out.add_term(b.clone(), c);
        out.add_term(a.mul(b), -c);
        out.add_term(a.clone(), c);
    }
    out
}

/// One factor of a word-map component.
#[derive(Clone, Debug, PartialEq)]
pub enum Symbol {
    /// Domain factor `j` (0-based).
    Var(usize),
    /// Inverse of domain factor `j`.
    Inv(usize),
    Const(CentralElement),
}

/// A map `K^m -> K^k` whose components are products of domain variables,
/// their inverses, and central constants.
#[derive(Clone, Debug)]
pub struct WordMap {
    n: usize,
    domain: Shape,
    codomain: Shape,
    components: Vec<Vec<Symbol>>,
}

impl WordMap {
    pub fn new(n: usize, m: usize, components: Vec<Vec<Symbol>>) -> Result<Self> {
        if m == 0 || components.is_empty() || n < 2 {
            return Err(Error::ShapeMismatch("word maps need m, k >= 1 and N >= 2".into()));
        }
        for comp in &components {
            for s in comp {
                match s {
                    Symbol::Var(j) | Symbol::Inv(j) if *j >= m => {
                        return Err(Error::IndexOutOfRange { index: *j, max: m - 1 })
                    }
                    Symbol::Const(c) if c.size() != n => {
                        return Err(Error::DimensionMismatch { expected: n, found: c.size() })
                    }
                    _ => {}
                }
            }
        }
        Ok(Self {
            n,
            domain: Shape::groups(m, n),
            codomain: Shape::groups(components.len(), n),
            components,
        })
    }

    /// Evaluation map `rho -> (rho(w_1), ..., rho(w_k))` on `Hom(F, K) = K^{2g}`.
    pub fn evaluation(n: usize, genus: usize, words: &[Word]) -> Result<Self> {
        check_genus(genus)?;
        let comps = words
            .iter()
            .map(|w| {
                if w.max_generator() > 2 * genus {
                    return Err(Error::InvalidGenerator { index: w.max_generator(), genus });
                }
                Ok(w.letters()
                    .iter()
                    .map(|l| if l.inverse { Symbol::Inv(l.generator - 1) } else { Symbol::Var(l.generator - 1) })
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, 2 * genus, comps)
    }

    pub fn identity(n: usize, m: usize) -> Self {
        Self::new(n, m, (0..m).map(|j| alloc::vec![Symbol::Var(j)]).collect()).expect("m >= 1")
    }

    /// The map `(h_1, ..., h_m) -> (h_{idx_1}, ...)`.
    pub fn projection(n: usize, m: usize, idx: &[usize]) -> Result<Self> {
        Self::new(n, m, idx.iter().map(|&j| alloc::vec![Symbol::Var(j)]).collect())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Vec<Symbol>] {
        &self.components
    }

    /// `self . inner`.
    pub fn compose(&self, inner: &WordMap) -> Result<WordMap> {
        if inner.codomain != self.domain {
            return Err(Error::ShapeMismatch("word map composition: shapes differ".into()));
        }
        let invert = |comp: &[Symbol]| -> Vec<Symbol> {
            comp.iter()
                .rev()
                .map(|s| match s {
                    Symbol::Var(j) => Symbol::Inv(*j),
                    Symbol::Inv(j) => Symbol::Var(*j),
                    Symbol::Const(c) => Symbol::Const(c.inverse()),
                })
                .collect()
        };
        let comps = self
            .components
            .iter()
            .map(|comp| {
                comp.iter()
                    .flat_map(|s| match s {
                        Symbol::Var(j) => inner.components[*j].clone(),
                        Symbol::Inv(j) => invert(&inner.components[*j]),
                        Symbol::Const(c) => alloc::vec![Symbol::Const(*c)],
                    })
                    .collect()
            })
            .collect();
        WordMap::new(self.n, inner.domain.len(), comps)
    }

    fn symbol_value(&self, s: &Symbol, h: &[GroupElement]) -> GroupElement {
        match s {
            Symbol::Var(j) => h[*j].clone(),
            Symbol::Inv(j) => h[*j].inverse(),
            Symbol::Const(c) => c.to_group(),
        }
    }

    pub fn eval_groups(&self, h: &[GroupElement]) -> Vec<GroupElement> {
        self.components
            .iter()
            .map(|comp| {
                comp.iter()
                    .fold(GroupElement::identity(self.n), |acc, s| acc.mul(&self.symbol_value(s, h)))
            })
            .collect()
    }

    /// Left-trivialized pushforward from `d(FG) = Ad(b^-1) dF + dG` and
    /// `d(F^-1) = -Ad(a) dF`.
    pub fn push_lie(&self, h: &[GroupElement], xi: &[AlgebraElement]) -> Vec<AlgebraElement> {
        self.components
            .iter()
            .map(|comp| {
                let mut suffix = GroupElement::identity(self.n);
                let mut acc = AlgebraElement::zero(self.n);
                for s in comp.iter().rev() {
                    let ds = match s {
                        Symbol::Var(j) => Some(xi[*j].clone()),
                        Symbol::Inv(j) => Some(-h[*j].adjoint(&xi[*j])),
                        Symbol::Const(_) => None,
                    };
                    if let Some(ds) = ds {
                        acc += &suffix.adjoint_inv(&ds);
                    }
                    suffix = self.symbol_value(s, h).mul(&suffix);
                }
                acc
            })
            .collect()
    }
}

impl SmoothMap for WordMap {
    fn domain(&self) -> &Shape {
        &self.domain
    }
    fn codomain(&self) -> &Shape {
        &self.codomain
    }
    fn apply(&self, x: &Point) -> Result<Point> {
        Ok(Point::groups(self.eval_groups(&x.group_elements())))
    }
    fn push(&self, x: &Point, v: &Tangent) -> Result<Tangent> {
        Ok(Tangent::lie(self.push_lie(&x.group_elements(), &v.lie_components())))
    }
}

/// Forms that can be paired against bar chains by pulling back along
/// evaluation maps.
pub trait SlantTarget: Sized + Clone {
    fn level(&self) -> usize;
    fn size(&self) -> usize;
    fn pull(&self, map: Arc<WordMap>) -> Result<Self>;
    fn combine(terms: Vec<(i64, Self)>, n: usize, genus: usize) -> Result<Self>;
    fn zero_like(&self, genus: usize) -> Result<Self>;
}

fn group_size(shape: &Shape) -> usize {
    match shape.factors()[0] {
        crate::form::Factor::Group(n) => n,
        _ => 0,
    }
}

impl SlantTarget for FormField {
    fn level(&self) -> usize {
        self.shape().len()
    }
    fn size(&self) -> usize {
        group_size(self.shape())
    }
    fn pull(&self, map: Arc<WordMap>) -> Result<Self> {
        self.pullback(map)
    }
    fn combine(terms: Vec<(i64, Self)>, n: usize, genus: usize) -> Result<Self> {
        let shape = Shape::groups(2 * genus, n);
        let arity = terms.first().map(|(_, f)| f.arity()).unwrap_or(0);
        let terms: Arc<Vec<(i64, Self)>> = Arc::new(terms);
        Ok(FormField::new(shape, arity, move |x, vs| {
            let mut total = C64::new(0.0, 0.0);
            for (c, f) in terms.iter() {
                total += f.value(x, vs)? * (*c as f64);
            }
            Ok(total)
        }))
    }
    fn zero_like(&self, genus: usize) -> Result<Self> {
        Ok(FormField::zero(Shape::groups(2 * genus, self.size()), self.arity()))
    }
}

impl SlantTarget for EquivariantFormField {
    fn level(&self) -> usize {
        self.shape().len()
    }
    fn size(&self) -> usize {
        group_size(self.shape())
    }
    fn pull(&self, map: Arc<WordMap>) -> Result<Self> {
        let m = map.domain().len();
        self.pullback(map, alloc::vec![Action::Conjugation; m])
    }
    fn combine(terms: Vec<(i64, Self)>, n: usize, genus: usize) -> Result<Self> {
        let shape = Shape::groups(2 * genus, n);
        let degree = terms.first().map(|(_, f)| f.degree()).unwrap_or(0);
        let terms: Arc<Vec<(i64, Self)>> = Arc::new(terms);
        EquivariantFormField::new(shape, degree, alloc::vec![Action::Conjugation; 2 * genus], move |phi, x, vs| {
            let mut total = C64::new(0.0, 0.0);
            for (c, f) in terms.iter() {
                total += f.value(phi, x, vs)? * (*c as f64);
            }
            Ok(total)
        })
    }
    fn zero_like(&self, genus: usize) -> Result<Self> {
        EquivariantFormField::zero(
            Shape::groups(2 * genus, self.size()),
            self.degree(),
            alloc::vec![Action::Conjugation; 2 * genus],
        )
    }
}

/// A chain of bar degree 1 or 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BarChain {
    One(Chain1),
    Two(Chain2),
}

impl BarChain {
    pub fn degree(&self) -> usize {
        match self {
            BarChain::One(_) => 1,
            BarChain::Two(_) => 2,
        }
    }
}

/// `(z, Phi) = sum over terms of coeff * (ev_a [x ev_b])^* Phi` on `K^{2g}`.
pub fn slant_pair<F: SlantTarget>(chain: &BarChain, phi: &F, genus: usize) -> Result<F> {
    check_genus(genus)?;
    if chain.degree() != phi.level() {
        return Err(Error::DimensionMismatch { expected: phi.level(), found: chain.degree() });
    }
    let n = phi.size();
    let mut terms = Vec::new();
    match chain {
        BarChain::One(c) => {
            for (w, k) in c.terms() {
                let map = WordMap::evaluation(n, genus, core::slice::from_ref(w))?;
                terms.push((k, phi.pull(Arc::new(map))?));
            }
        }
        BarChain::Two(c) => {
            for (a, b, k) in c.terms() {
                let map = WordMap::evaluation(n, genus, &[a.clone(), b.clone()])?;
                terms.push((k, phi.pull(Arc::new(map))?));
            }
        }
    }
    if terms.is_empty() {
        return phi.zero_like(genus);
    }
    F::combine(terms, n, genus)
}

/// Human-readable listing of a word map, e.g. `(x1 x2, x2^-1)`.
pub fn describe(map: &WordMap) -> String {
    let mut s = String::from("(");
    for (i, comp) in map.components.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        if comp.is_empty() {
            s.push('1');
        }
        for (k, sym) in comp.iter().enumerate() {
            if k > 0 {
                s.push(' ');
            }
            match sym {
                Symbol::Var(j) => s.push_str(&format!("h{}", j + 1)),
                Symbol::Inv(j) => s.push_str(&format!("h{}^-1", j + 1)),
                Symbol::Const(c) => s.push_str(&format!("z{}", c.phase_index())),
            }
        }
    }
    s.push(')');
    s
}
