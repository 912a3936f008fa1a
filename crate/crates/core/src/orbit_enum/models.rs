//! Finitely presented isometry groups whose closed geodesics are enumerated.
//!
//! Three models ship with the crate:
//!
//! * `bolza`: the genus-two octagon group. Generator `k` translates by
//!   `2·arccosh(1+√2)` along the axis through `i` at angle `kπ/4`; the
//!   relator is `aBcDAbCd`. Entries lie in `ℚ(√2, √(2+2√2))`.
//! * `schottky-orientable`: `a = diag(3, 1/3)` and `b`, its conjugate by the
//!   quarter turn about `i`. The four ping-pong half-planes are bounded by
//!   the geodesics over `[-1/3, 1/3]`, `|x| = 3`, `[1/2, 2]` and `[-2, -1/2]`.
//! * `schottky-nonorientable`: the same with `a` replaced by the glide
//!   reflection `diag(3, -1/3)`, which preserves the same ping-pong sets.

use super::dehn::Relator;
use super::domain::{DirichletDomain, GENERIC_CENTRE};
use super::words::{parse_word, render, Letter};
use crate::error::{Error, Result};
use crate::exact::{ExactMatrix, ExactReal, QSqrt2};
use crate::hyp_geom::IsometryMatrix;

pub const BUILTIN_MODELS: [&str; 3] = ["bolza", "schottky-orientable", "schottky-nonorientable"];

/// Word length of the group elements whose bisectors cut out the
/// Dirichlet domain.
pub const DOMAIN_RADIUS: usize = 3;

/// Float tolerance for the image of the relator.
pub const RELATOR_TOL: f64 = 1e-8;

/// Per-letter lower bound on the length of a closed geodesic for the octagon
/// group. The least ratio of length to shortest word length over all classes
/// of length at most 10 is 0.9713 (`aBcaBd`, length 5.828); rounded down.
pub const BOLZA_LAMBDA_MIN: f64 = 0.9;

/// Minimal distance between distinct ping-pong boundary geodesics of the
/// Schottky models, `arccosh(16/9)`, rounded down. Every letter of a
/// cyclically reduced word crosses one fundamental domain between two such
/// geodesics.
pub const SCHOTTKY_LAMBDA_MIN: f64 = 1.1779;

/// Upper bound for the critical exponent of the Schottky models. A
/// least-squares fit of `log(t·N(t))` on `[7, 14]` has slope 0.647, and
/// `log(t·N(t))/t` is 0.694 at `t = 14`.
pub const SCHOTTKY_ENTROPY: f64 = 0.75;

/// Description of a model before validation.
#[derive(Debug, Clone)]
pub struct ModelDef {
    pub name: String,
    pub generator_names: Vec<char>,
    pub matrices: Vec<ExactMatrix>,
    pub relator: Option<String>,
    pub lambda_min: Option<f64>,
    pub entropy: f64,
    /// The bisectors of `i` and its images under the letters bound a
    /// fundamental domain.
    pub dirichlet: bool,
}

#[derive(Debug, Clone)]
pub struct GroupModel {
    name: String,
    names: Vec<char>,
    exact: Vec<ExactMatrix>,
    generators: Vec<IsometryMatrix>,
    inverses: Vec<IsometryMatrix>,
    relator: Option<Relator>,
    lambda_min: Option<f64>,
    entropy: f64,
    orientable: bool,
    domain: Option<DirichletDomain>,
}

impl GroupModel {
    pub fn new(def: ModelDef) -> Result<Self> {
        let ModelDef { name, generator_names: names, matrices: exact, relator, lambda_min, entropy, dirichlet } = def;
        if names.is_empty() || names.len() != exact.len() {
            return Err(Error::InvalidModel(format!(
                "{} generator names for {} matrices",
                names.len(),
                exact.len()
            )));
        }
        for (i, c) in names.iter().enumerate() {
            if !c.is_ascii_lowercase() || names[..i].contains(c) {
                return Err(Error::InvalidModel(format!("generator names must be distinct lower case letters, got `{c}`")));
            }
        }
        if !(entropy > 0.0 && entropy.is_finite()) {
            return Err(Error::InvalidModel(format!("entropy must be positive, got {entropy}")));
        }
        if let Some(l) = lambda_min {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidModel(format!("lambda_min must be positive, got {l}")));
            }
        }
        let mut generators = Vec::with_capacity(exact.len());
        let mut signs = Vec::with_capacity(exact.len());
        for (c, m) in names.iter().zip(&exact) {
            let sign = m.det().signum();
            if sign == 0 {
                return Err(Error::InvalidModel(format!("generator `{c}` has zero determinant")));
            }
            signs.push(sign);
            let [a, b, cc, d] = m.to_f64();
            generators.push(IsometryMatrix::new(a, b, cc, d)?);
        }
        let inverses: Vec<IsometryMatrix> = generators.iter().map(|g| g.inverse()).collect();
        let orientable = signs.iter().all(|&s| s > 0);

        let relator = match relator {
            None => None,
            Some(text) => {
                let word = parse_word(&text, &names)?;
                let rel = Relator::new(word)?;
                let mut product = ExactMatrix::identity();
                let mut sign = 1i8;
                for l in rel.word() {
                    let g = &exact[l.generator()];
                    product = product.mul(&if l.is_inverse() { g.adjugate() } else { g.clone() });
                    sign *= signs[l.generator()];
                }
                if !product.is_projectively_identity() {
                    return Err(Error::InvalidModel(format!("relator `{text}` does not map to the identity")));
                }
                if sign != 1 {
                    return Err(Error::InvalidModel(format!("orientation character does not kill relator `{text}`")));
                }
                Some(rel)
            }
        };

        let domain = match (dirichlet, &relator) {
            (false, _) => None,
            (true, Some(_)) => {
                // one vertex, one edge per generator and one face
                let area = 2.0 * std::f64::consts::PI * (names.len() as f64 - 2.0);
                Some(DirichletDomain::build(&generators, GENERIC_CENTRE, DOMAIN_RADIUS, area)?)
            }
            (true, None) => return Err(Error::InvalidModel("a Dirichlet domain needs a surface relator".into())),
        };
        let model =
            GroupModel { name, names, exact, generators, inverses, relator, lambda_min, entropy, orientable, domain };
        if let Some(rel) = &model.relator {
            let m = model.word_matrix(rel.word());
            let [a, b, c, d] = m.entries();
            let dev = (a.abs() - 1.0).abs().max(b.abs()).max(c.abs()).max((d - a).abs());
            if dev > RELATOR_TOL {
                return Err(Error::InvalidModel(format!("relator image deviates from ±I by {dev:e}")));
            }
        }
        Ok(model)
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let def = match name {
            "bolza" => bolza_def(),
            "schottky-orientable" => schottky_def(name, false),
            "schottky-nonorientable" => schottky_def(name, true),
            other => {
                return Err(Error::InvalidModel(format!(
                    "unknown model `{other}`; valid models: {}",
                    BUILTIN_MODELS.join(", ")
                )))
            }
        };
        GroupModel::new(def)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generator_names(&self) -> &[char] {
        &self.names
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    /// Number of letters: generators and their inverses.
    pub fn alphabet_size(&self) -> usize {
        2 * self.names.len()
    }

    pub fn relator(&self) -> Option<&Relator> {
        self.relator.as_ref()
    }

    pub fn lambda_min(&self) -> Option<f64> {
        self.lambda_min
    }

    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    pub fn is_orientable(&self) -> bool {
        self.orientable
    }

    pub fn domain(&self) -> Option<&DirichletDomain> {
        self.domain.as_ref()
    }

    pub fn exact_generators(&self) -> &[ExactMatrix] {
        &self.exact
    }

    pub fn with_entropy(mut self, entropy: f64) -> Self {
        self.entropy = entropy;
        self
    }

    pub fn with_lambda_min(mut self, lambda_min: Option<f64>) -> Self {
        self.lambda_min = lambda_min;
        self
    }

    pub fn letter_matrix(&self, l: Letter) -> IsometryMatrix {
        if l.is_inverse() {
            self.inverses[l.generator()]
        } else {
            self.generators[l.generator()]
        }
    }

    pub fn word_matrix(&self, w: &[Letter]) -> IsometryMatrix {
        w.iter().fold(IsometryMatrix::IDENTITY, |acc, &l| acc * self.letter_matrix(l))
    }

    /// Sign of the determinant of each generator.
    pub fn orientation_character(&self) -> Vec<i8> {
        self.generators.iter().map(|g| g.orientation_sign()).collect()
    }

    pub fn render(&self, w: &[Letter]) -> String {
        render(w, &self.names)
    }

    pub fn parse(&self, s: &str) -> Result<Vec<Letter>> {
        parse_word(s, &self.names)
    }
}

fn q(s: &str) -> QSqrt2 {
    QSqrt2::parse(s).expect("built-in constant")
}

fn bolza_def() -> ModelDef {
    // g_k = (1+√2)·I + σ·[[cos θ, -sin θ], [-sin θ, -cos θ]], θ = kπ/4
    let t = ExactReal::from_base(q("1+sqrt2"));
    let sigma_times = |c: &str| ExactReal::new(QSqrt2::zero(), q(c));
    let trig = [("1", "0"), ("1/2*sqrt2", "1/2*sqrt2"), ("0", "1"), ("-1/2*sqrt2", "1/2*sqrt2")];
    let matrices = trig
        .iter()
        .map(|&(cos, sin)| {
            let sc = sigma_times(cos);
            let ss = sigma_times(sin);
            ExactMatrix([&t + &sc, -&ss, -&ss, &t - &sc])
        })
        .collect();
    ModelDef {
        name: "bolza".into(),
        generator_names: vec!['a', 'b', 'c', 'd'],
        matrices,
        relator: Some("aBcDAbCd".into()),
        lambda_min: Some(BOLZA_LAMBDA_MIN),
        entropy: 1.0,
        dirichlet: true,
    }
}

fn schottky_def(name: &str, glide: bool) -> ModelDef {
    let e = |s: &str| ExactReal::from_base(q(s));
    let a = ExactMatrix([e("3"), e("0"), e("0"), e(if glide { "-1/3" } else { "1/3" })]);
    let b = ExactMatrix([e("5/3"), e("4/3"), e("4/3"), e("5/3")]);
    ModelDef {
        name: name.into(),
        generator_names: vec!['a', 'b'],
        matrices: vec![a, b],
        relator: None,
        lambda_min: Some(SCHOTTKY_LAMBDA_MIN),
        entropy: SCHOTTKY_ENTROPY,
        dirichlet: false,
    }
}
