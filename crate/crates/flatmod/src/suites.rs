//! The identity suites behind `flatmod verify`.
//!
//! Every check is a function of a sample index and a private random stream
//! derived from `(seed, identity id, sample index)`, so results do not depend
//! on scheduling and the report is reproducible for any job count.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use flatmod_core::form::{act, act_tangent, Action, Coord, EquivariantFormField, FdConfig, FormField, Point, Shape, Tangent};
use flatmod_core::lie::{
    algebra_dim, sample_group, sample_unit_algebra, AlgebraElement, InvariantPolynomial, C64,
};
use flatmod_core::moduli::{
    boundedness_probe, direct_f_generator, exp_beta_pullback, extended_generator, form_matrix, generator_form,
    goldman_omega, homotopy_h, linear_part, omega_bar, omega_tilde, reduced_frame, relator_pullback_phi1, sample_x,
    sample_y, singular_values, GeneratorKind, LambdaMap, ModuliConfig, SamplerConfig, KERNEL_GAP,
};
use flatmod_core::quadrature::{IntervalQuadrature, SimplexRule};
use flatmod_core::simplicial::{bott_shulman, closed_form_library, delta, delta_equivariant, BsForm};
use flatmod_core::word::{bar_boundary, fox_derivative, fundamental_class, gamma, relator, Chain1, Letter, Word};
use flatmod_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{RunConfig, Suite};
use crate::report::{IdentityRecord, ProbeRecord, VerificationReport};
use crate::CliError;

/// Skewness of the Goldman matrix and the moment extraction are exact linear algebra.
pub const LINEAR_ALGEBRA_TOL: f64 = 1e-8;
/// Minimum ratio between the last nonzero and the first zero singular value.
pub const RANK_GAP: f64 = 1e3;
/// Radius of the boundedness sweep.
pub const PROBE_RADIUS: f64 = 10.0 * std::f64::consts::PI;

type Residual = Arc<dyn Fn(usize, &mut ChaCha8Rng) -> Result<f64> + Send + Sync>;

pub struct Check {
    pub id: String,
    pub reference: String,
    pub tolerance: f64,
    pub samples: usize,
    pub note: Option<String>,
    eval: Residual,
}

impl Check {
    fn new<F>(id: impl Into<String>, reference: impl Into<String>, tolerance: f64, samples: usize, eval: F) -> Self
    where
        F: Fn(usize, &mut ChaCha8Rng) -> Result<f64> + Send + Sync + 'static,
    {
        Self { id: id.into(), reference: reference.into(), tolerance, samples, note: None, eval: Arc::new(eval) }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn sample_rng(seed: u64, id: &str, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(id));
    rng.set_stream(index as u64);
    rng
}

fn is_numeric(e: &Error) -> bool {
    matches!(
        e,
        Error::BranchCut { .. }
            | Error::SingularChart
            | Error::NonConvergence { .. }
            | Error::QuadratureNonConvergence { .. }
            | Error::IllConditioned { .. }
            | Error::SimplexBoundary { .. }
    )
}

struct Ctx {
    cfg: RunConfig,
    fd: FdConfig,
}

impl Ctx {
    fn n(&self) -> usize {
        self.cfg.n
    }

    fn samples(&self) -> usize {
        self.cfg.sample_count
    }

    fn tol_fd(&self) -> f64 {
        self.cfg.tolerances.fd
    }

    fn tol_quad(&self) -> f64 {
        self.cfg.tolerances.quadrature
    }

    fn bs(&self, q: &InvariantPolynomial, level: usize) -> Result<BsForm> {
        let rule = self.cfg.quadrature_order.map(|s| SimplexRule::grundmann_moller(level, s));
        bott_shulman(q, level, rule)
    }

    fn moduli(&self) -> Result<ModuliConfig> {
        ModuliConfig::new(self.cfg.n, self.cfg.genus, self.cfg.beta())
    }

    fn y_points(&self, m: &ModuliConfig) -> Result<Arc<Vec<Point>>> {
        let ys = sample_y(m, self.cfg.seed, self.samples(), &SamplerConfig::default())?;
        Ok(Arc::new(ys.iter().map(|y| y.point()).collect()))
    }

    fn x_points(&self, m: &ModuliConfig) -> Result<Arc<Vec<(Point, AlgebraElement)>>> {
        let xs = sample_x(m, self.cfg.seed, self.samples(), 0.1)?;
        Ok(Arc::new(xs.into_iter().map(|x| (x.point(), x.lambda)).collect()))
    }
}

fn group_point(n: usize, level: usize, rng: &mut ChaCha8Rng) -> Point {
    Point::groups((0..level).map(|_| sample_group(n, rng)).collect())
}

fn tangents(n: usize, level: usize, arity: usize, rng: &mut ChaCha8Rng) -> Vec<Tangent> {
    (0..arity).map(|_| Tangent::lie((0..level).map(|_| sample_unit_algebra(n, rng)).collect())).collect()
}

fn neg() -> C64 {
    C64::new(-1.0, 0.0)
}

/// `|a - b|` (or `|a|`) at a random point of `K^level` on random unit tangents.
fn plain_residual(a: FormField, b: Option<FormField>, n: usize, level: usize) -> impl Fn(usize, &mut ChaCha8Rng) -> Result<f64> {
    move |_, rng| {
        let x = group_point(n, level, rng);
        let vs = tangents(n, level, a.arity(), rng);
        let mut v = a.value(&x, &vs)?;
        if let Some(b) = &b {
            v -= b.value(&x, &vs)?;
        }
        Ok(v.norm())
    }
}

/// Largest `|a(phi) - b(phi)|` over all components at `x`, with a random unit `phi`.
fn equivariant_gap(
    a: &EquivariantFormField,
    b: Option<&EquivariantFormField>,
    x: &Point,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let level = x.coords().len();
    let phi = sample_unit_algebra(n, rng);
    let mut worst: f64 = 0.0;
    for arity in a.arities() {
        let vs = tangents(n, level, arity, rng);
        let mut v = a.value(&phi, x, &vs)?;
        if let Some(b) = b {
            v -= b.value(&phi, x, &vs)?;
        }
        worst = worst.max(v.norm());
    }
    Ok(worst)
}

fn equivariant_residual(
    a: EquivariantFormField,
    b: Option<EquivariantFormField>,
    n: usize,
    level: usize,
) -> impl Fn(usize, &mut ChaCha8Rng) -> Result<f64> {
    move |_, rng| {
        let x = group_point(n, level, rng);
        equivariant_gap(&a, b.as_ref(), &x, n, rng)
    }
}

fn pooled_equivariant_residual(
    a: EquivariantFormField,
    b: Option<EquivariantFormField>,
    n: usize,
    pool: Arc<Vec<Point>>,
) -> impl Fn(usize, &mut ChaCha8Rng) -> Result<f64> {
    move |i, rng| equivariant_gap(&a, b.as_ref(), &pool[i % pool.len()], n, rng)
}

fn chart_pool(xs: &Arc<Vec<(Point, AlgebraElement)>>) -> Arc<Vec<Point>> {
    Arc::new(xs.iter().map(|(p, _)| p.clone()).collect())
}

fn anchors(ctx: &Ctx) -> Result<Vec<Check>> {
    let (n, s, tol) = (ctx.n(), ctx.samples(), ctx.tol_quad());
    let q = InvariantPolynomial::inner_product(n);
    let lib = closed_form_library(n)?;
    let p1 = ctx.bs(&q, 1)?;
    let p2 = ctx.bs(&q, 2)?;
    Ok(vec![
        Check::new(
            "closed-form-anchors.phi1",
            "Phi_1 of the inner product equals -(1/6)<theta, [theta, theta]>",
            tol,
            s,
            plain_residual(p1.plain(), Some(lib.lambda.scale(neg())), n, 1),
        ),
        Check::new(
            "closed-form-anchors.phi2",
            "Phi_2 of the inner product equals <theta_1, thetabar_2>",
            tol,
            s,
            plain_residual(p2.plain(), Some(lib.omega.clone()), n, 2),
        ),
        Check::new(
            "closed-form-anchors.phi1_k",
            "equivariant Phi_1^K of the inner product equals -lambda - Theta",
            tol,
            s,
            equivariant_residual(p1.equivariant().clone(), Some(lib.phi1_k.clone()), n, 1),
        ),
        Check::new(
            "closed-form-anchors.phi2_k",
            "equivariant Phi_2^K of the inner product equals Omega",
            tol,
            s,
            equivariant_residual(p2.equivariant().clone(), Some(lib.phi2_k.clone()), n, 2),
        ),
    ])
}

fn sign(j: usize) -> C64 {
    // (-1)^{j+1}
    if j % 2 == 1 {
        C64::new(1.0, 0.0)
    } else {
        neg()
    }
}

fn cocycle(ctx: &Ctx) -> Result<Vec<Check>> {
    let (n, s) = (ctx.n(), ctx.samples());
    let mut out = Vec::new();
    for &r in &ctx.cfg.r_list {
        let q = ctx.cfg.chern(r);
        let phi: Vec<FormField> = (1..=2 * r).map(|l| Ok(ctx.bs(&q, l)?.plain())).collect::<Result<_>>()?;
        let p = |l: usize| phi[l - 1].clone();
        let pre = format!("cocycle.r{r}");
        out.push(Check::new(
            format!("{pre}.d_phi1"),
            "d Phi_1(Q) = 0 on K",
            ctx.tol_fd(),
            s,
            plain_residual(p(1).exterior_derivative(ctx.fd), None, n, 1),
        ));
        for j in 2..=r {
            out.push(Check::new(
                format!("{pre}.delta_phi{}", j - 1),
                format!("delta Phi_{} = (-1)^{} d Phi_{j}", j - 1, j + 1),
                ctx.tol_fd(),
                s,
                plain_residual(delta(&p(j - 1))?, Some(p(j).exterior_derivative(ctx.fd).scale(sign(j))), n, j),
            ));
        }
        out.push(Check::new(
            format!("{pre}.delta_phi{r}"),
            format!("delta Phi_{r} = 0 (top of the Bott-Shulman cocycle)"),
            ctx.tol_quad(),
            s,
            plain_residual(delta(&p(r))?, None, n, r + 1),
        ));
        for l in r + 1..=2 * r {
            out.push(Check::new(
                format!("{pre}.vanishing_phi{l}"),
                format!("Phi_{l}(Q) vanishes identically above the degree {r}"),
                ctx.tol_quad(),
                s,
                plain_residual(p(l), None, n, l),
            ));
        }
    }
    Ok(out)
}

fn equivariant_cocycle(ctx: &Ctx) -> Result<Vec<Check>> {
    let (n, s) = (ctx.n(), ctx.samples());
    let mut out = Vec::new();
    for &r in &ctx.cfg.r_list {
        let q = ctx.cfg.chern(r);
        let phi: Vec<EquivariantFormField> =
            (1..=r).map(|l| Ok(ctx.bs(&q, l)?.equivariant().clone())).collect::<Result<_>>()?;
        let p = |l: usize| phi[l - 1].clone();
        let pre = format!("equivariant-cocycle.r{r}");
        out.push(Check::new(
            format!("{pre}.dk_phi1"),
            "d_K Phi_1^K(Q) = 0 on K",
            ctx.tol_fd(),
            s,
            equivariant_residual(p(1).cartan_differential(ctx.fd), None, n, 1),
        ));
        for j in 2..=r {
            out.push(Check::new(
                format!("{pre}.delta_phi{}", j - 1),
                format!("delta Phi_{}^K = (-1)^{} d_K Phi_{j}^K", j - 1, j + 1),
                ctx.tol_fd(),
                s,
                equivariant_residual(
                    delta_equivariant(&p(j - 1))?,
                    Some(p(j).cartan_differential(ctx.fd).scale(sign(j))),
                    n,
                    j,
                ),
            ));
        }
        out.push(Check::new(
            format!("{pre}.delta_phi{r}"),
            format!("delta Phi_{r}^K = 0"),
            ctx.tol_quad(),
            s,
            equivariant_residual(delta_equivariant(&p(r))?, None, n, r + 1),
        ));
    }
    Ok(out)
}

fn chain_distance(a: &Chain1, b: &Chain1) -> f64 {
    a.sub(b).terms().fold(0.0, |acc, (_, c)| acc + c.unsigned_abs() as f64)
}

fn random_word(genus: usize, max_len: usize, rng: &mut ChaCha8Rng) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::reduce((0..len).map(|_| {
        let g = rng.gen_range(1..=2 * genus);
        if rng.gen() {
            Letter::x_inv(g)
        } else {
            Letter::x(g)
        }
    }))
}

fn fox(ctx: &Ctx) -> Result<Vec<Check>> {
    let g = ctx.cfg.genus;
    let s = ctx.samples();
    Ok(vec![
        Check::new("fox-symbolic.gamma_table", "dR/dx_j = gamma_j^0 - gamma_j^1 for every generator", 0.0, 1, move |_, _| {
            let r = relator(g)?;
            let mut bad = 0.0;
            for j in 1..=2 * g {
                let mut want = Chain1::word(gamma(g, j, 0)?);
                want.add_term(gamma(g, j, 1)?, -1);
                bad += chain_distance(&fox_derivative(&r, j), &want);
            }
            Ok(bad)
        }),
        Check::new("fox-symbolic.boundary", "the bar boundary of the fundamental class is 1 - R", 0.0, 1, move |_, _| {
            let mut want = Chain1::word(Word::identity());
            want.add_term(relator(g)?, -1);
            Ok(chain_distance(&bar_boundary(&fundamental_class(g)?), &want))
        }),
        Check::new(
            "fox-symbolic.fundamental_identity",
            "w - 1 = sum_j (dw/dx_j)(x_j - 1) in Z[F]",
            0.0,
            s,
            move |_, rng| {
                let w = random_word(g, 16, rng);
                let mut rhs = Chain1::zero();
                for j in 1..=2 * g {
                    let mut xm1 = Chain1::word(Word::x(j));
                    xm1.add_term(Word::identity(), -1);
                    rhs = rhs.add(&fox_derivative(&w, j).mul(&xm1));
                }
                let mut lhs = Chain1::word(w);
                lhs.add_term(Word::identity(), -1);
                Ok(chain_distance(&lhs, &rhs))
            },
        ),
        Check::new("fox-symbolic.product_rule", "d(uv)/dx = du/dx + u dv/dx", 0.0, s, move |_, rng| {
            let (u, v) = (random_word(g, 10, rng), random_word(g, 10, rng));
            let j = rng.gen_range(1..=2 * g);
            let rhs = fox_derivative(&u, j).add(&fox_derivative(&v, j).left_mul(&u));
            Ok(chain_distance(&fox_derivative(&u.mul(&v), j), &rhs))
        }),
    ])
}

fn goldman(ctx: &Ctx) -> Result<Vec<Check>> {
    let m = ctx.moduli()?;
    let (n, s, level) = (ctx.n(), ctx.samples(), m.generators());
    let omega = goldman_omega(&m)?;
    let ys = ctx.y_points(&m)?;
    let xs = ctx.x_points(&m)?;
    let d_tilde = omega_tilde(&m)?.exterior_derivative(ctx.fd);
    let frames_cfg = m.clone();
    let om = omega.clone();
    Ok(vec![
        Check::new(
            "goldman.d_omega",
            "d omega = e_R^* Phi_1 on K^{2g} (from the cocycle relation and the boundary 1 - R)",
            ctx.tol_fd(),
            s,
            plain_residual(omega.exterior_derivative(ctx.fd), Some(relator_pullback_phi1(&m)?), n, level),
        ),
        Check::new("goldman.d_omega_tilde", "d omega_tilde = 0 on the extended chart", ctx.tol_fd(), s, move |i, rng| {
            let x = &xs[i % xs.len()].0;
            Ok(d_tilde.value(x, &tangents(n, level, 3, rng))?.norm())
        }),
        Check::new(
            "goldman.skew",
            "omega on the reduced tangent frame of Y_beta is skew",
            LINEAR_ALGEBRA_TOL,
            s,
            move |i, _| {
                let y = flatmod_core::moduli::YPoint { h: ys[i % ys.len()].group_elements(), residual: 0.0 };
                let frame = reduced_frame(&frames_cfg, &y)?;
                let mat = form_matrix(&om, &y.point(), &frame.kernel)?;
                Ok((&mat + mat.transpose()).amax())
            },
        ),
    ])
}

fn rank(ctx: &Ctx) -> Result<Vec<Check>> {
    let m = ctx.moduli()?;
    let s = ctx.samples();
    let omega = goldman_omega(&m)?;
    let ys = ctx.y_points(&m)?;
    let expected = (m.generators() - 2) * algebra_dim(m.size);
    let spectrum = {
        let (m, omega, ys) = (m.clone(), omega.clone(), ys.clone());
        Arc::new(move |i: usize| -> Result<Vec<f64>> {
            let y = flatmod_core::moduli::YPoint { h: ys[i % ys.len()].group_elements(), residual: 0.0 };
            let frame = reduced_frame(&m, &y)?;
            Ok(singular_values(&form_matrix(&omega, &y.point(), &frame.kernel)?))
        })
    };
    let sp = spectrum.clone();
    Ok(vec![
        Check::new(
            "rank.omega_rank",
            format!("omega on the reduced frame has rank (2g - 2) dim K = {expected}"),
            0.0,
            s,
            move |i, _| {
                let sv = sp(i)?;
                let top = sv[0].max(f64::MIN_POSITIVE);
                let rank = sv.iter().filter(|&&v| v > KERNEL_GAP * top).count();
                Ok((rank as f64 - expected as f64).abs())
            },
        ),
        Check::new(
            "rank.gap",
            format!("singular-value gap of omega on the reduced frame is at least {RANK_GAP:e}"),
            1.0 / RANK_GAP,
            s,
            move |i, _| {
                let sv = spectrum(i)?;
                Ok(if expected < sv.len() { sv[expected] / sv[expected - 1] } else { 0.0 })
            },
        ),
    ])
}

fn det(m: &[Vec<f64>]) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    (0..m.len())
        .map(|c| {
            let minor: Vec<Vec<f64>> =
                m[1..].iter().map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect()).collect();
            let s = if c % 2 == 0 { 1.0 } else { -1.0 };
            s * m[0][c] * det(&minor)
        })
        .sum()
}

/// A random polynomial equivariant form on `su(N)` (adjoint action) with no
/// 0-form component: `coeff(phi, Lambda) det <E_i, w_j>` in each arity.
pub fn random_polynomial_form(n: usize, degree: usize, rng: &mut ChaCha8Rng) -> Result<EquivariantFormField> {
    let e: Vec<AlgebraElement> = (0..degree).map(|_| sample_unit_algebra(n, rng)).collect();
    let (a, b, p) = (sample_unit_algebra(n, rng), sample_unit_algebra(n, rng), sample_unit_algebra(n, rng));
    let c: f64 = rng.gen_range(-1.0..1.0);
    EquivariantFormField::new(Shape::algebra(n), degree, vec![Action::Adjoint], move |phi, x, vs| {
        let k = vs.len();
        if k == 0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let lam = x.algebra(0);
        let phi_deg = ((degree - k) / 2) as i32;
        let coeff = (c + a.inner(lam) + b.inner(lam).powi(2)) * phi.inner(&p).powi(phi_deg)
            + phi.inner(&lam.bracket(&a)) * phi_deg as f64;
        let m: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| e[i].inner(vs[j].lie_component(0))).collect()).collect();
        Ok(C64::new(coeff * det(&m), 0.0))
    })
}

fn extended(ctx: &Ctx) -> Result<(Vec<Check>, Vec<ProbeRecord>)> {
    let m = ctx.moduli()?;
    let (n, s, level) = (ctx.n(), ctx.samples(), m.generators());
    let ys = ctx.y_points(&m)?;
    let xs = ctx.x_points(&m)?;
    let chart = chart_pool(&xs);
    let mut out = Vec::new();
    let mut probes = Vec::new();
    for &r in &ctx.cfg.r_list {
        let q = ctx.cfg.chern(r);
        let pre = format!("extended.r{r}");
        let f_ext = extended_generator(&m, GeneratorKind::F, &q)?;
        out.push(Check::new(
            format!("{pre}.f_closed"),
            format!("d_K of the extended f_{r} vanishes on the chart"),
            ctx.tol_fd(),
            s,
            pooled_equivariant_residual(f_ext.cartan_differential(ctx.fd), None, n, chart.clone()),
        ));
        let b_ext: Vec<EquivariantFormField> = (1..=level)
            .map(|j| Ok(extended_generator(&m, GeneratorKind::B(j), &q)?.cartan_differential(ctx.fd)))
            .collect::<Result<_>>()?;
        let pool = chart.clone();
        out.push(Check::new(
            format!("{pre}.b_closed"),
            format!("d_K of the extended b_{r}^j vanishes on the chart (j cycles over the generators)"),
            ctx.tol_fd(),
            s,
            move |i, rng| equivariant_gap(&b_ext[i % b_ext.len()], None, &pool[i % pool.len()], n, rng),
        ));
        let mut kinds = vec![GeneratorKind::A, GeneratorKind::F];
        kinds.extend((1..=level).map(GeneratorKind::B));
        let pairs: Vec<(EquivariantFormField, EquivariantFormField)> = kinds
            .iter()
            .map(|&k| Ok((extended_generator(&m, k, &q)?, generator_form(&m, k, &q)?)))
            .collect::<Result<_>>()?;
        let ypool = ys.clone();
        out.push(Check::new(
            format!("{pre}.restriction"),
            "at Lambda = 0 every extended generator restricts to the generator on Y_beta",
            ctx.tol_quad(),
            s,
            move |i, rng| {
                let x = &ypool[i % ypool.len()];
                let mut worst: f64 = 0.0;
                for (a, b) in &pairs {
                    worst = worst.max(equivariant_gap(a, Some(b), x, n, rng)?);
                }
                Ok(worst)
            },
        ));
        let slant = generator_form(&m, GeneratorKind::F, &q)?;
        let source = exp_beta_pullback(&q, &m.beta)?.pullback(Arc::new(LambdaMap::new(&m)?), m.conjugation())?;
        out.push(Check::new(
            format!("{pre}.stokes"),
            "d_K (c, psi^* Phi_2^K) = Lambda^* e_beta^* Phi_1^K on the chart",
            ctx.tol_fd(),
            s,
            pooled_equivariant_residual(slant.cartan_differential(ctx.fd), Some(source), n, chart.clone()),
        ));
        out.push(Check::new(
            format!("{pre}.slant_vs_direct"),
            "slant-product pipeline for f_r equals the direct double sum over (gamma_j^tau | x_j)",
            ctx.tol_quad(),
            s,
            equivariant_residual(slant.clone(), Some(direct_f_generator(&m, &q)?), n, level),
        ));
        let (f2, pool, acts) = (f_ext.clone(), chart.clone(), m.conjugation());
        out.push(Check::new(
            format!("{pre}.conjugation_invariance"),
            "the extended f_r is invariant under simultaneous conjugation of (h, tangents, phi)",
            LINEAR_ALGEBRA_TOL,
            s,
            move |i, rng| {
                let x = &pool[i % pool.len()];
                let k = sample_group(n, rng);
                let phi = sample_unit_algebra(n, rng);
                let mut worst: f64 = 0.0;
                for arity in f2.arities() {
                    let vs = tangents(n, level, arity, rng);
                    let moved: Vec<Tangent> = vs.iter().map(|v| act_tangent(&acts, &k, v)).collect();
                    let a = f2.value(&phi, x, &vs)?;
                    let b = f2.value(&k.adjoint(&phi), &act(&acts, &k, x), &moved)?;
                    worst = worst.max((a - b).norm() / (1.0 + a.norm()));
                }
                Ok(worst)
            },
        ));
        let sweep = boundedness_probe(&q, &m.beta, PROBE_RADIUS, 20, 8, ctx.cfg.seed)?;
        let radii: Vec<f64> = sweep.iter().map(|p| p.radius).collect();
        let sup: Vec<f64> = sweep.iter().map(|p| p.sup).collect();
        let (mid, end) = (sweep.len() / 2, sweep.len() - 1);
        let growth = if sup[mid] > 0.0 && sup[end] > 0.0 {
            (sup[end] / sup[mid]).ln() / (radii[end] / radii[mid]).ln()
        } else {
            0.0
        };
        probes.push(ProbeRecord {
            probe_id: format!("{pre}.sigma_bounded"),
            reference: "coefficients of sigma_Q stay bounded on su(N) (finite radial sweep, reported only)".into(),
            radii,
            sup,
            growth_exponent: growth,
        });
    }
    out.push(Check::new(
        "extended.homotopy",
        "h d_K + d_K h = 1 on polynomial equivariant forms without a 0-form part",
        ctx.tol_fd(),
        s,
        {
            let fd = ctx.fd;
            move |i, rng| {
                let degree = 2 + i % 3;
                let f = random_polynomial_form(n, degree, rng)?;
                let quad = IntervalQuadrature::default();
                let noisy = IntervalQuadrature { tolerance: 1e-9, ..quad };
                let lhs = homotopy_h(&f, quad)?.cartan_differential(fd).add(&homotopy_h(&f.cartan_differential(fd), noisy)?)?;
                let x = Point::new(vec![Coord::Algebra(flatmod_core::lie::sample_algebra(n, rng))]);
                let phi = sample_unit_algebra(n, rng);
                let mut worst: f64 = 0.0;
                for arity in f.arities() {
                    let vs: Vec<Tangent> = (0..arity).map(|_| Tangent::lie(vec![sample_unit_algebra(n, rng)])).collect();
                    worst = worst.max((lhs.value(&phi, &x, &vs)? - f.value(&phi, &x, &vs)?).norm());
                }
                Ok(worst)
            }
        },
    ));
    Ok((out, probes))
}

fn moment(ctx: &Ctx) -> Result<Vec<Check>> {
    let m = ctx.moduli()?;
    let (n, s) = (ctx.n(), ctx.samples());
    let xs = ctx.x_points(&m)?;
    let bar = omega_bar(&m)?;
    let linear = |target: f64| {
        let (bar, xs) = (bar.clone(), xs.clone());
        move |i: usize, _: &mut ChaCha8Rng| -> Result<f64> {
            let (x, lam) = &xs[i % xs.len()];
            let lin = linear_part(&bar, x)?;
            Ok((&lin - &lam.scale(target)).norm())
        }
    };
    Ok(vec![
        Check::new(
            "moment.dk_omega_bar",
            "d_K omega_bar = 0 with omega_bar(phi) = omega_tilde + <mu, phi>",
            ctx.tol_fd(),
            s,
            pooled_equivariant_residual(bar.cartan_differential(ctx.fd), None, n, chart_pool(&xs)),
        ),
        Check::new(
            "moment.linear_part",
            "the phi-linear part of omega_bar is <-2 Lambda, phi> (mu = -2 pr_2)",
            LINEAR_ALGEBRA_TOL,
            s,
            linear(-2.0),
        )
        .note(
            "the d_K-closed extension built from Phi_1^K = -lambda - Theta and omega_tilde = omega - Lambda^* sigma \
             has phi-linear part <+2 Lambda, phi>; see moment.linear_part_opposite_sign",
        ),
        Check::new(
            "moment.linear_part_opposite_sign",
            "diagnostic: the phi-linear part of omega_bar compared with <+2 Lambda, phi>",
            LINEAR_ALGEBRA_TOL,
            s,
            linear(2.0),
        ),
    ])
}

fn build(ctx: &Ctx, suite: Suite) -> Result<(Vec<Check>, Vec<ProbeRecord>)> {
    let plain = |c: Result<Vec<Check>>| c.map(|c| (c, Vec::new()));
    match suite {
        Suite::ClosedFormAnchors => plain(anchors(ctx)),
        Suite::Cocycle => plain(cocycle(ctx)),
        Suite::EquivariantCocycle => plain(equivariant_cocycle(ctx)),
        Suite::FoxSymbolic => plain(fox(ctx)),
        Suite::Goldman => plain(goldman(ctx)),
        Suite::Rank => plain(rank(ctx)),
        Suite::Extended => extended(ctx),
        Suite::Moment => plain(moment(ctx)),
    }
}

fn evaluate(checks: &[Check], seed: u64) -> Vec<IdentityRecord> {
    let tasks: Vec<(usize, usize)> =
        checks.iter().enumerate().flat_map(|(c, ch)| (0..ch.samples).map(move |i| (c, i))).collect();
    let results: Vec<Result<f64>> = tasks
        .par_iter()
        .map(|&(c, i)| {
            let ch = &checks[c];
            (ch.eval)(i, &mut sample_rng(seed, &ch.id, i))
        })
        .collect();
    let mut out = Vec::with_capacity(checks.len());
    let mut cursor = 0;
    for ch in checks {
        let mine = &results[cursor..cursor + ch.samples];
        cursor += ch.samples;
        let first_err = mine.iter().find_map(|r| r.as_ref().err());
        let (max_residual, pass, error, numeric) = match first_err {
            Some(e) => (None, false, Some(e.to_string()), is_numeric(e)),
            None => {
                let vals: Vec<f64> = mine.iter().map(|r| *r.as_ref().expect("no errors")).collect();
                let max = if vals.iter().any(|v| v.is_nan()) { f64::NAN } else { vals.iter().fold(0.0, |m, &v| if v > m { v } else { m }) };
                let ok = max.is_finite() && max <= ch.tolerance;
                (max.is_finite().then_some(max), ok, (!max.is_finite()).then(|| "non-finite residual".to_string()), false)
            }
        };
        out.push(IdentityRecord {
            identity_id: ch.id.clone(),
            reference: ch.reference.clone(),
            samples: ch.samples,
            max_residual,
            tolerance: ch.tolerance,
            pass,
            note: ch.note.clone(),
            error,
            numeric_breakdown: numeric,
        });
    }
    out
}

fn setup_failure(suite: Suite, e: &Error) -> IdentityRecord {
    IdentityRecord {
        identity_id: format!("{suite}.setup"),
        reference: format!("building the {suite} suite"),
        samples: 0,
        max_residual: None,
        tolerance: 0.0,
        pass: false,
        note: None,
        error: Some(e.to_string()),
        numeric_breakdown: is_numeric(e),
    }
}

/// Runs the selected suites. `jobs = None` uses all cores.
pub fn run(cfg: &RunConfig, jobs: Option<usize>) -> std::result::Result<VerificationReport, CliError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let ctx = Ctx { cfg: cfg.clone(), fd: FdConfig { step: cfg.fd_step } };
    let mut suites = cfg.suites.clone();
    suites.sort();
    suites.dedup();
    let mut records = Vec::new();
    let mut probes = Vec::new();
    let mut timings = BTreeMap::new();
    for suite in suites {
        let start = Instant::now();
        match pool.install(|| build(&ctx, suite)) {
            Ok((checks, p)) => {
                records.extend(pool.install(|| evaluate(&checks, cfg.seed)));
                probes.extend(p);
            }
            Err(e) if is_numeric(&e) => records.push(setup_failure(suite, &e)),
            Err(e) => return Err(CliError::Usage(format!("{suite}: {e}"))),
        }
        timings.insert(suite.name().to_string(), start.elapsed().as_secs_f64());
    }
    records.sort_by(|a, b| a.identity_id.cmp(&b.identity_id));
    let pass = records.iter().all(|r| r.pass);
    Ok(VerificationReport { config: cfg.clone(), records, probes, pass, timings })
}
