//! `flatmod eval`: values of the generator forms on a tangent frame.

use std::sync::Arc;

use flatmod_core::form::{EquivariantFormField, FormField, Point, Tangent};
use flatmod_core::lie::{algebra_basis, sample_unit_algebra, AlgebraElement, C64};
use flatmod_core::moduli::{
    extended_generator, generator_form, goldman_omega, omega_tilde, reduced_frame, sample_x, sample_y, sigma_q,
    GeneratorKind, LambdaMap, ModuliConfig, SamplerConfig, YPoint,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::json::{matrix_to_json, JsonPoint};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FrameKind {
    /// Orthonormal frame of the quotient `ker D e_R / orbit` at the point.
    Reduced,
    /// Random unit tangents, drawn from the seed.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PhiKind {
    Zero,
    Random,
    /// `phi = 0` for the components, plus the polarized Gram matrix of the
    /// quadratic 0-form part over an orthonormal basis of su(N).
    Basis,
}

/// Parsed form id.
#[derive(Clone, Debug, PartialEq)]
pub struct FormId {
    pub extended: bool,
    pub kind: FormKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FormKind {
    Generator { kind: GeneratorKind, r: usize },
    Omega,
    OmegaTilde,
    SigmaQ { r: usize },
}

impl FormId {
    /// `a_r`, `b_r_j`, `f_r`, `omega`, `omega_tilde`, `sigma_Q[_r]` and
    /// `extended_` versions of the generators.
    pub fn parse(s: &str, default_r: usize) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("unknown form id '{s}'"));
        let (extended, rest) = match s.strip_prefix("extended_") {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let parts: Vec<&str> = rest.split('_').collect();
        let kind = match parts.as_slice() {
            ["omega"] if !extended => FormKind::Omega,
            ["omega", "tilde"] if !extended => FormKind::OmegaTilde,
            ["sigma", "Q"] if !extended => FormKind::SigmaQ { r: default_r },
            ["sigma", "Q", r] if !extended => FormKind::SigmaQ { r: num(r)? },
            ["a", r] => FormKind::Generator { kind: GeneratorKind::A, r: num(r)? },
            ["f", r] => FormKind::Generator { kind: GeneratorKind::F, r: num(r)? },
            ["b", r, j] => FormKind::Generator { kind: GeneratorKind::B(num(j)?), r: num(r)? },
            _ => return Err(bad()),
        };
        Ok(Self { extended, kind })
    }

    /// Forms that live on the chart of the extended space rather than on `Y_beta`.
    pub fn on_chart(&self) -> bool {
        self.extended || matches!(self.kind, FormKind::OmegaTilde | FormKind::SigmaQ { .. })
    }
}

enum Target {
    Plain(FormField),
    Equivariant(EquivariantFormField),
}

fn build(cfg: &RunConfig, m: &ModuliConfig, id: &FormId) -> Result<Target, CliError> {
    let poly = |r: usize| -> Result<_, CliError> {
        if r < 2 || r > cfg.n {
            return Err(CliError::Usage(format!("degree r = {r} outside 2..={}", cfg.n)));
        }
        Ok(cfg.chern(r))
    };
    Ok(match &id.kind {
        FormKind::Omega => Target::Plain(goldman_omega(m)?),
        FormKind::OmegaTilde => Target::Plain(omega_tilde(m)?),
        FormKind::SigmaQ { r } => Target::Equivariant(
            sigma_q(&poly(*r)?, &m.beta)?.pullback(Arc::new(LambdaMap::new(m)?), m.conjugation())?,
        ),
        FormKind::Generator { kind, r } => {
            let q = poly(*r)?;
            Target::Equivariant(if id.extended { extended_generator(m, *kind, &q)? } else { generator_form(m, *kind, &q)? })
        }
    })
}

pub struct EvalRequest {
    pub config: RunConfig,
    pub form: String,
    pub points: Option<Vec<JsonPoint>>,
    pub sample: Option<usize>,
    pub frame: FrameKind,
    pub frame_size: usize,
    pub phi: PhiKind,
}

fn c(z: C64) -> Value {
    json!([z.re, z.im])
}

fn increasing_tuples(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in increasing_tuples(m, k - 1) {
        let start = rest.last().map_or(0, |&l| l + 1);
        for i in start..m {
            let mut t = rest.clone();
            t.push(i);
            out.push(t);
        }
    }
    out
}

fn values(
    f: impl Fn(&[Tangent]) -> flatmod_core::Result<C64>,
    arity: usize,
    frame: &[Tangent],
) -> Result<Value, CliError> {
    let pick = |idx: &[usize]| -> Vec<Tangent> { idx.iter().map(|&i| frame[i].clone()).collect() };
    Ok(match arity {
        0 => c(f(&[])?),
        1 => Value::Array((0..frame.len()).map(|i| Ok(c(f(&pick(&[i]))?))).collect::<Result<_, CliError>>()?),
        2 => Value::Array(
            (0..frame.len())
                .map(|a| {
                    Ok(Value::Array(
                        (0..frame.len()).map(|b| Ok(c(f(&pick(&[a, b]))?))).collect::<Result<_, CliError>>()?,
                    ))
                })
                .collect::<Result<_, CliError>>()?,
        ),
        k => Value::Array(
            increasing_tuples(frame.len(), k)
                .into_iter()
                .map(|t| Ok(json!({ "indices": t, "value": c(f(&pick(&t))?) })))
                .collect::<Result<_, CliError>>()?,
        ),
    })
}

/// `G_ab = (v(e_a + e_b) - v(e_a) - v(e_b)) / 2` for the quadratic 0-form part.
fn phi_gram(f: &EquivariantFormField, x: &Point, n: usize) -> Result<Value, CliError> {
    let basis = algebra_basis(n);
    let v = |p: &AlgebraElement| f.value(p, x, &[]);
    let diag: Vec<C64> = basis.iter().map(v).collect::<flatmod_core::Result<_>>()?;
    let mut rows = Vec::new();
    for (a, ea) in basis.iter().enumerate() {
        let mut row = Vec::new();
        for (b, eb) in basis.iter().enumerate() {
            let g = if a == b { diag[a] } else { (v(&(ea + eb))? - diag[a] - diag[b]) * 0.5 };
            row.push(c(g));
        }
        rows.push(Value::Array(row));
    }
    Ok(Value::Array(rows))
}

pub fn run(req: &EvalRequest, seed: u64) -> Result<Value, CliError> {
    let cfg = &req.config;
    let m = cfg.moduli()?;
    let default_r = cfg.r_list.first().copied().unwrap_or(2);
    let id = FormId::parse(&req.form, default_r)?;
    let target = build(cfg, &m, &id)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let points: Vec<Vec<flatmod_core::lie::GroupElement>> = match (&req.points, req.sample) {
        (Some(ps), None) => ps.iter().map(|p| p.groups()).collect::<Result<_, CliError>>()?,
        (None, Some(k)) if id.on_chart() => sample_x(&m, seed, k, 0.1)?.into_iter().map(|x| x.h).collect(),
        (None, Some(k)) => sample_y(&m, seed, k, &SamplerConfig::default())?.into_iter().map(|y| y.h).collect(),
        _ => return Err(CliError::Usage("give exactly one of --points and --sample".into())),
    };
    let level = m.generators();
    let phi = match req.phi {
        PhiKind::Random => sample_unit_algebra(cfg.n, &mut rng),
        PhiKind::Zero | PhiKind::Basis => AlgebraElement::zero(cfg.n),
    };

    let mut out = Vec::new();
    for (index, h) in points.into_iter().enumerate() {
        if h.len() != level || h.iter().any(|g| g.size() != cfg.n) {
            return Err(CliError::Usage(format!("point {index} is not in K^{level} for N = {}", cfg.n)));
        }
        let x = Point::groups(h.clone());
        let frame: Vec<Tangent> = match req.frame {
            FrameKind::Reduced => reduced_frame(&m, &YPoint { h, residual: 0.0 })?.quotient,
            FrameKind::Random => (0..req.frame_size)
                .map(|_| Tangent::lie((0..level).map(|_| sample_unit_algebra(cfg.n, &mut rng)).collect()))
                .collect(),
        };
        let mut components = Vec::new();
        let mut gram = Value::Null;
        match &target {
            Target::Plain(f) => {
                components.push(json!({
                    "arity": f.arity(),
                    "phi_degree": 0,
                    "values": values(|vs| f.value(&x, vs), f.arity(), &frame)?,
                }));
            }
            Target::Equivariant(f) => {
                for arity in f.arities() {
                    components.push(json!({
                        "arity": arity,
                        "phi_degree": f.phi_degree(arity),
                        "values": values(|vs| f.value(&phi, &x, vs), arity, &frame)?,
                    }));
                }
                if req.phi == PhiKind::Basis && f.phi_degree(0) == Some(2) {
                    gram = phi_gram(f, &x, cfg.n)?;
                }
            }
        }
        let mut rec = json!({ "index": index, "frame_size": frame.len(), "components": components });
        if !gram.is_null() {
            rec["phi_gram"] = gram;
        }
        out.push(rec);
    }
    Ok(json!({
        "form": req.form,
        "N": cfg.n,
        "genus": cfg.genus,
        "beta_index": cfg.beta(),
        "seed": seed,
        "phi": matrix_to_json(phi.matrix()),
        "points": out,
    }))
}
