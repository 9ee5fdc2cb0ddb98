//! Analytic and sampled distribution families.
//!
//! Binary scenarios use labels `"0"` and `"1"`. Parameters are named reals;
//! integer-valued ones (`points`, `samples`, `max_alphabet`) must be whole.
//!
//! | kind             | parameters (default)                                   |
//! |------------------|--------------------------------------------------------|
//! | `example1`       | none                                                   |
//! | `example2`       | `rho` (0.9)                                            |
//! | `example3`       | none                                                   |
//! | `example4`       | `rho` (0.9)                                            |
//! | `motivational`   | none                                                   |
//! | `markov_sweep`   | `rho` (0.9), `q_min` (0.5), `q_max` (1.0), `points` (11) |
//! | `sp_zero_family` | `samples` (50), `max_alphabet` (4); uses the seed      |
//! | `custom`         | none; reads a distribution file                        |

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::Array3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::dist::{mutual_information, Alphabet, JointDist, Var};
use crate::error::{Error, Result};

/// Largest `|I(Z;Ŷ)|` accepted into the statistical-parity-zero family.
pub const SP_ZERO_TOL: f64 = 1e-8;

const MAX_POINTS: f64 = 1_000_000.0;
const MAX_SP_ZERO_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Example1,
    Example2,
    Example3,
    Example4,
    Motivational,
    MarkovSweep,
    SpZeroFamily,
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        ScenarioKind::Example1,
        ScenarioKind::Example2,
        ScenarioKind::Example3,
        ScenarioKind::Example4,
        ScenarioKind::Motivational,
        ScenarioKind::MarkovSweep,
        ScenarioKind::SpZeroFamily,
        ScenarioKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Example1 => "example1",
            ScenarioKind::Example2 => "example2",
            ScenarioKind::Example3 => "example3",
            ScenarioKind::Example4 => "example4",
            ScenarioKind::Motivational => "motivational",
            ScenarioKind::MarkovSweep => "markov_sweep",
            ScenarioKind::SpZeroFamily => "sp_zero_family",
            ScenarioKind::Custom => "custom",
        }
    }

    /// Kinds that produce more than one distribution.
    pub fn is_sweep(self) -> bool {
        matches!(self, ScenarioKind::MarkovSweep | ScenarioKind::SpZeroFamily)
    }

    /// Accepted parameters with their defaults.
    pub fn defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            ScenarioKind::Example2 | ScenarioKind::Example4 => &[("rho", 0.9)],
            ScenarioKind::MarkovSweep => &[("rho", 0.9), ("q_min", 0.5), ("q_max", 1.0), ("points", 11.0)],
            ScenarioKind::SpZeroFamily => &[("samples", 50.0), ("max_alphabet", 4.0)],
            _ => &[],
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Scenario(format!("unknown scenario kind '{s}'")))
    }
}

/// A scenario kind plus parameter overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub params: BTreeMap<String, f64>,
    /// Seed for sampled families.
    pub seed: u64,
    /// Distribution file for `custom`.
    pub source: Option<PathBuf>,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind) -> Self {
        Self {
            kind,
            params: BTreeMap::new(),
            seed: 0,
            source: None,
        }
    }

    pub fn custom(path: impl Into<PathBuf>) -> Self {
        Self {
            source: Some(path.into()),
            ..Self::new(ScenarioKind::Custom)
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_owned(), value);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Value of `name`, falling back to the kind's default.
    pub fn param(&self, name: &str) -> Result<f64> {
        if let Some(v) = self.params.get(name) {
            return Ok(*v);
        }
        self.kind
            .defaults()
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Scenario(format!("{} has no parameter '{name}'", self.kind)))
    }

    /// Checks parameter names and ranges.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in &self.params {
            if !self.kind.defaults().iter().any(|(k, _)| k == name) {
                let known: Vec<&str> = self.kind.defaults().iter().map(|(k, _)| *k).collect();
                return Err(Error::Scenario(format!(
                    "{} does not take parameter '{name}' (accepted: {known:?})",
                    self.kind
                )));
            }
            if !value.is_finite() {
                return Err(Error::Scenario(format!("parameter '{name}' must be finite")));
            }
        }
        let unit = |name: &str| -> Result<f64> {
            let v = self.param(name)?;
            if (0.0..=1.0).contains(&v) {
                Ok(v)
            } else {
                Err(Error::Scenario(format!("{name} = {v} is outside [0, 1]")))
            }
        };
        let whole = |name: &str, lo: f64, hi: f64| -> Result<f64> {
            let v = self.param(name)?;
            if v.fract() == 0.0 && (lo..=hi).contains(&v) {
                Ok(v)
            } else {
                Err(Error::Scenario(format!("{name} = {v} must be an integer in [{lo}, {hi}]")))
            }
        };
        match self.kind {
            ScenarioKind::Example2 | ScenarioKind::Example4 => {
                unit("rho")?;
            }
            ScenarioKind::MarkovSweep => {
                unit("rho")?;
                let (lo, hi) = (unit("q_min")?, unit("q_max")?);
                if lo > hi {
                    return Err(Error::Scenario(format!("q_min = {lo} exceeds q_max = {hi}")));
                }
                whole("points", 1.0, MAX_POINTS)?;
            }
            ScenarioKind::SpZeroFamily => {
                whole("samples", 1.0, MAX_POINTS)?;
                whole("max_alphabet", 2.0, 16.0)?;
            }
            ScenarioKind::Custom if self.source.is_none() => {
                return Err(Error::Scenario("custom scenario needs a distribution file".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

/// One generated distribution and the parameter values that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPoint {
    pub params: Vec<(String, f64)>,
    pub dist: JointDist,
}

/// Generates the distributions of a scenario, ordered by sweep parameter.
/// Non-sweep kinds yield exactly one point.
pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Vec<ScenarioPoint>> {
    spec.validate()?;
    let single = |dist: JointDist, params: Vec<(String, f64)>| Ok(vec![ScenarioPoint { params, dist }]);
    match spec.kind {
        ScenarioKind::Example1 => single(example1(), vec![]),
        ScenarioKind::Example2 => {
            let rho = spec.param("rho")?;
            single(example2(rho)?, vec![("rho".into(), rho)])
        }
        ScenarioKind::Example3 => single(example3(), vec![]),
        ScenarioKind::Example4 => {
            let rho = spec.param("rho")?;
            single(example4(rho)?, vec![("rho".into(), rho)])
        }
        ScenarioKind::Motivational => single(motivational(), vec![]),
        ScenarioKind::MarkovSweep => {
            let rho = spec.param("rho")?;
            let (lo, hi) = (spec.param("q_min")?, spec.param("q_max")?);
            let n = spec.param("points")? as usize;
            (0..n)
                .map(|k| {
                    let q = if n == 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
                    Ok(ScenarioPoint {
                        params: vec![("rho".into(), rho), ("q".into(), q)],
                        dist: markov_chain(rho, q)?,
                    })
                })
                .collect()
        }
        ScenarioKind::SpZeroFamily => {
            let n = spec.param("samples")? as usize;
            let max_alphabet = spec.param("max_alphabet")? as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            (0..n)
                .map(|i| {
                    Ok(ScenarioPoint {
                        params: vec![("sample".into(), i as f64)],
                        dist: sp_zero_sample(&mut rng, max_alphabet)?,
                    })
                })
                .collect()
        }
        ScenarioKind::Custom => {
            let path = spec.source.as_ref().expect("validated");
            single(load_dist_json(path)?, vec![])
        }
    }
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn binary_dist(f: impl Fn(bool, bool, bool) -> f64) -> JointDist {
    let mut cells = Vec::with_capacity(8);
    for z in [false, true] {
        for yh in [false, true] {
            for y in [false, true] {
                cells.push(((bit(z), bit(yh), bit(y)), f(z, yh, y)));
            }
        }
    }
    JointDist::from_cells(cells).expect("binary scenario weights are valid")
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Scenario(format!("{name} = {v} is outside [0, 1]")))
    }
}

/// `Ŷ = Z` with `Y` an independent fair coin.
pub fn example1() -> JointDist {
    binary_dist(|z, yh, _| if yh == z { 0.25 } else { 0.0 })
}

/// `Z` a fair coin, `P(Y = Z) = rho`, `Ŷ = Y`.
pub fn example2(rho: f64) -> Result<JointDist> {
    check_unit("rho", rho)?;
    Ok(binary_dist(|z, yh, y| {
        if yh != y {
            0.0
        } else if y == z {
            0.5 * rho
        } else {
            0.5 * (1.0 - rho)
        }
    }))
}

/// `Z`, `Y` independent fair coins, `Ŷ = Z XNOR Y`.
pub fn example3() -> JointDist {
    binary_dist(|z, yh, y| if yh == (z == y) { 0.25 } else { 0.0 })
}

/// `Z` a fair coin, `P(Y = Z) = rho`, `Ŷ` an independent fair coin.
pub fn example4(rho: f64) -> Result<JointDist> {
    check_unit("rho", rho)?;
    Ok(binary_dist(|z, _, y| if y == z { 0.25 * rho } else { 0.25 * (1.0 - rho) }))
}

/// Markov chain `Z → Y → Ŷ`: `Z` a fair coin, `P(Y = Z) = rho`, and `Ŷ`
/// is `Y` passed through a binary symmetric channel with flip rate `q`.
pub fn markov_chain(rho: f64, q: f64) -> Result<JointDist> {
    check_unit("rho", rho)?;
    check_unit("q", q)?;
    Ok(binary_dist(|z, yh, y| {
        let p_y = if y == z { rho } else { 1.0 - rho };
        let p_yh = if yh == y { 1.0 - q } else { q };
        0.5 * p_y * p_yh
    }))
}

/// `Z = (Z₁, Z₂, Z₃)` of fair bits, `N` an independent fair bit,
/// `Ŷ = (Z₁, Z₂, Z₃ ⊕ N)` and `Y = (Z₂, N)`. Labels are bit strings.
pub fn motivational() -> JointDist {
    let mut cells = Vec::with_capacity(16);
    for code in 0..16u8 {
        let [z1, z2, z3, n] = [code & 8 != 0, code & 4 != 0, code & 2 != 0, code & 1 != 0];
        let z = format!("{}{}{}", bit(z1), bit(z2), bit(z3));
        let a = format!("{}{}{}", bit(z1), bit(z2), bit(z3 ^ n));
        let b = format!("{}{}", bit(z2), bit(n));
        cells.push(((z, a, b), 1.0 / 16.0));
    }
    JointDist::from_cells(cells).expect("motivational weights are valid")
}

fn dirichlet<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Random joint with flat Dirichlet cell weights over numbered alphabets.
pub fn random_joint<R: Rng + ?Sized>(rng: &mut R, shape: [usize; 3]) -> JointDist {
    let weights = dirichlet(rng, shape.iter().product());
    let alphabets = shape.map(Alphabet::numbered);
    let probs = Array3::from_shape_vec((shape[0], shape[1], shape[2]), weights).expect("length matches shape");
    JointDist::from_weights(alphabets, probs).expect("dirichlet weights are valid")
}

/// Random joint with `I(Z; Ŷ) = 0`: alphabet sizes uniform in
/// `2..=max_alphabet`, `P(z, ŷ) = P(z) P(ŷ)` and an arbitrary `P(y | z, ŷ)`.
/// Draws are retried until the measured `I(Z; Ŷ)` is within
/// [`SP_ZERO_TOL`].
pub fn sp_zero_sample<R: Rng + ?Sized>(rng: &mut R, max_alphabet: usize) -> Result<JointDist> {
    if max_alphabet < 2 {
        return Err(Error::Scenario("max_alphabet must be at least 2".into()));
    }
    for _ in 0..MAX_SP_ZERO_ATTEMPTS {
        let shape = [0; 3].map(|_| rng.random_range(2..=max_alphabet));
        let pz = dirichlet(rng, shape[0]);
        let pyh = dirichlet(rng, shape[1]);
        let mut probs = Array3::zeros(shape);
        for z in 0..shape[0] {
            for yh in 0..shape[1] {
                let py = dirichlet(rng, shape[2]);
                for (y, p) in py.into_iter().enumerate() {
                    probs[[z, yh, y]] = pz[z] * pyh[yh] * p;
                }
            }
        }
        let dist = JointDist::from_weights(shape.map(Alphabet::numbered), probs)?;
        if mutual_information(&dist, Var::Z, Var::Yhat)? < SP_ZERO_TOL {
            return Ok(dist);
        }
    }
    Err(Error::Scenario("no statistical-parity-zero draw accepted".into()))
}

/// On-disk distribution: alphabets per variable and the nonzero cells.
/// Cells not listed have probability zero; listed masses must sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistFile {
    pub alphabets: DistAlphabets,
    pub cells: Vec<DistCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistAlphabets {
    pub z: Alphabet,
    pub yhat: Alphabet,
    pub y: Alphabet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistCell {
    pub z: String,
    pub yhat: String,
    pub y: String,
    pub p: f64,
}

impl DistFile {
    pub fn from_dist(dist: &JointDist) -> Self {
        let [az, ayh, ay] = dist.alphabets().clone();
        let cells = dist
            .probs()
            .indexed_iter()
            .filter(|(_, p)| **p > 0.0)
            .map(|((z, yh, y), p)| DistCell {
                z: az.label(z).to_owned(),
                yhat: ayh.label(yh).to_owned(),
                y: ay.label(y).to_owned(),
                p: *p,
            })
            .collect();
        Self {
            alphabets: DistAlphabets { z: az, yhat: ayh, y: ay },
            cells,
        }
    }

    pub fn to_dist(&self) -> Result<JointDist> {
        let a = &self.alphabets;
        let alphabets = [a.z.clone(), a.yhat.clone(), a.y.clone()];
        let mut probs = Array3::zeros((a.z.len(), a.yhat.len(), a.y.len()));
        for c in &self.cells {
            let idx = |alphabet: &Alphabet, label: &str, var: &str| {
                alphabet
                    .index_of(label)
                    .ok_or_else(|| Error::InvalidDistribution(format!("{var} label '{label}' is not in its alphabet")))
            };
            let cell = (idx(&a.z, &c.z, "z")?, idx(&a.yhat, &c.yhat, "yhat")?, idx(&a.y, &c.y, "y")?);
            probs[cell] += c.p;
        }
        JointDist::new(alphabets, probs)
    }
}

/// Reads a [`DistFile`]. Unreadable or malformed files are ingestion
/// errors.
pub fn load_dist_json(path: &Path) -> Result<JointDist> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::IngestFile(format!("cannot read {}: {e}", path.display())))?;
    let file: DistFile = serde_json::from_str(&text)
        .map_err(|e| Error::IngestFile(format!("{}: {e}", path.display())))?;
    file.to_dist()
}
