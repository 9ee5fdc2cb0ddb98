//! Discrete joint distributions over (Z, Ŷ, Y) and plug-in information
//! measures on them.
//!
//! All information quantities are in bits. Terms with zero probability
//! contribute nothing (`0 log 0 = 0`), and results that land within
//! [`CLAMP_EPS`] below zero are reported as exactly zero.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use ndarray::{Array3, ArrayD, Axis, IxDyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a [`JointDist`].
pub const MASS_TOL: f64 = 1e-12;

/// Negative information values above `-CLAMP_EPS` are rounded to zero.
pub const CLAMP_EPS: f64 = 1e-12;

/// One of the three variables of a fairness joint distribution, in tensor
/// axis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    /// Sensitive attribute.
    Z,
    /// Model prediction.
    Yhat,
    /// True label.
    Y,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::Z, Var::Yhat, Var::Y];

    pub fn axis(self) -> usize {
        match self {
            Var::Z => 0,
            Var::Yhat => 1,
            Var::Y => 2,
        }
    }

    /// The two remaining variables, in axis order.
    pub fn others(self) -> (Var, Var) {
        match self {
            Var::Z => (Var::Yhat, Var::Y),
            Var::Yhat => (Var::Z, Var::Y),
            Var::Y => (Var::Z, Var::Yhat),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::Z => "Z",
            Var::Yhat => "Yhat",
            Var::Y => "Y",
        })
    }
}

/// Unit for reporting information quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Bits,
    Nats,
}

impl Units {
    /// Converts a value given in bits into this unit.
    pub fn from_bits(self, bits: f64) -> f64 {
        match self {
            Units::Bits => bits,
            Units::Nats => bits * std::f64::consts::LN_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Units::Bits => "bits",
            Units::Nats => "nats",
        }
    }
}

/// A finite, ordered set of labels. Indices follow lexicographic order of
/// the labels, so the same set of labels always gets the same indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut symbols: Vec<String> = labels.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidDistribution("alphabet must have at least one symbol".into()));
        }
        if symbols.iter().any(|s| s.is_empty()) {
            return Err(Error::InvalidDistribution("alphabet labels must be nonempty".into()));
        }
        symbols.sort();
        if let Some(w) = symbols.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidDistribution(format!("duplicate alphabet label '{}'", w[0])));
        }
        Ok(Self { symbols })
    }

    /// `{"0", "1"}`.
    pub fn binary() -> Self {
        Self::numbered(2)
    }

    /// Labels `"0"` through `"n-1"`, zero-padded so lexicographic and
    /// numeric order agree.
    pub fn numbered(n: usize) -> Self {
        assert!(n > 0, "alphabet must have at least one symbol");
        let width = (n - 1).to_string().len();
        Self {
            symbols: (0..n).map(|i| format!("{i:0width$}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.symbols.binary_search_by(|s| s.as_str().cmp(label)).ok()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.symbols[index]
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<Self> {
        Alphabet::new(v)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.symbols
    }
}

/// One observed `(z, y, ŷ)` triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub z: String,
    pub y: String,
    pub yhat: String,
}

impl SampleRecord {
    pub fn new(z: impl Into<String>, y: impl Into<String>, yhat: impl Into<String>) -> Self {
        Self {
            z: z.into(),
            y: y.into(),
            yhat: yhat.into(),
        }
    }
}

/// Joint distribution of `(Z, Ŷ, Y)` as a dense tensor indexed `[z, ŷ, y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    alphabets: [Alphabet; 3],
    probs: Array3<f64>,
}

impl JointDist {
    /// Builds a distribution from alphabets in `(Z, Ŷ, Y)` order and a
    /// tensor indexed consistently with them.
    pub fn new(alphabets: [Alphabet; 3], probs: Array3<f64>) -> Result<Self> {
        let expected = [alphabets[0].len(), alphabets[1].len(), alphabets[2].len()];
        if probs.shape() != expected {
            return Err(Error::InvalidDistribution(format!(
                "tensor shape {:?} does not match alphabet sizes {:?}",
                probs.shape(),
                expected
            )));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {bad} is not a nonnegative number")));
        }
        let total: f64 = probs.sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}, not 1")));
        }
        Ok(Self { alphabets, probs })
    }

    /// Like [`JointDist::new`] but rescales nonnegative weights to unit mass.
    pub fn from_weights(alphabets: [Alphabet; 3], weights: Array3<f64>) -> Result<Self> {
        if let Some(bad) = weights.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("weight {bad} is not a nonnegative number")));
        }
        let total: f64 = weights.sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights have zero total mass".into()));
        }
        Self::new(alphabets, weights / total)
    }

    /// Builds a distribution from labelled cells `((z, ŷ, y), weight)`.
    /// Alphabets are the sorted distinct labels seen; weights are
    /// normalized and repeated cells accumulate.
    pub fn from_cells<I, S>(cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((S, S, S), f64)>,
        S: Into<String>,
    {
        let cells: Vec<([String; 3], f64)> = cells
            .into_iter()
            .map(|((z, yh, y), w)| ([z.into(), yh.into(), y.into()], w))
            .collect();
        let alphabets = infer_alphabets(cells.iter().map(|(c, _)| c))?;
        let mut weights = Array3::zeros((alphabets[0].len(), alphabets[1].len(), alphabets[2].len()));
        for (labels, w) in &cells {
            let idx = index_triple(&alphabets, labels).expect("labels come from the same cells");
            weights[idx] += *w;
        }
        Self::from_weights(alphabets, weights)
    }

    pub fn alphabets(&self) -> &[Alphabet; 3] {
        &self.alphabets
    }

    pub fn alphabet(&self, var: Var) -> &Alphabet {
        &self.alphabets[var.axis()]
    }

    pub fn probs(&self) -> &Array3<f64> {
        &self.probs
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.alphabets[0].len(), self.alphabets[1].len(), self.alphabets[2].len()]
    }

    /// Probability of the cell with the given labels, zero for unknown labels.
    pub fn prob_of(&self, z: &str, yhat: &str, y: &str) -> f64 {
        match index_triple(&self.alphabets, &[z.to_owned(), yhat.to_owned(), y.to_owned()]) {
            Some(idx) => self.probs[idx],
            None => 0.0,
        }
    }

    /// Sums out every variable not in `keep`. Axes of the result follow
    /// `(Z, Ŷ, Y)` order regardless of the order of `keep`.
    pub fn marginal(&self, keep: &[Var]) -> Result<ArrayD<f64>> {
        let kept: BTreeSet<Var> = keep.iter().copied().collect();
        if kept.is_empty() || kept.len() != keep.len() || kept.len() == 3 {
            return Err(Error::InvalidArgument(format!(
                "marginal needs a nonempty proper subset of distinct variables, got {keep:?}"
            )));
        }
        let mut out = self.probs.clone().into_dyn();
        for var in Var::ALL.iter().rev() {
            if !kept.contains(var) {
                out = out.sum_axis(Axis(var.axis()));
            }
        }
        Ok(out)
    }

    /// Relabels axes: the result's `(Z, Ŷ, Y)` slots hold `order[0..3]` of
    /// this distribution. Used to place any variable in the target slot.
    pub fn permuted(&self, order: [Var; 3]) -> Result<Self> {
        let set: BTreeSet<Var> = order.iter().copied().collect();
        if set.len() != 3 {
            return Err(Error::InvalidArgument(format!("{order:?} is not a permutation")));
        }
        let axes = [order[0].axis(), order[1].axis(), order[2].axis()];
        let probs = self.probs.clone().permuted_axes(axes).as_standard_layout().to_owned();
        let alphabets = [
            self.alphabets[axes[0]].clone(),
            self.alphabets[axes[1]].clone(),
            self.alphabets[axes[2]].clone(),
        ];
        Ok(Self { alphabets, probs })
    }
}

fn infer_alphabets<'a>(labels: impl Iterator<Item = &'a [String; 3]>) -> Result<[Alphabet; 3]> {
    let mut sets: [BTreeSet<&str>; 3] = Default::default();
    for triple in labels {
        for (set, l) in sets.iter_mut().zip(triple.iter()) {
            set.insert(l.as_str());
        }
    }
    let [a, b, c] = sets;
    Ok([Alphabet::new(a)?, Alphabet::new(b)?, Alphabet::new(c)?])
}

fn index_triple(alphabets: &[Alphabet; 3], labels: &[String; 3]) -> Option<[usize; 3]> {
    Some([
        alphabets[0].index_of(&labels[0])?,
        alphabets[1].index_of(&labels[1])?,
        alphabets[2].index_of(&labels[2])?,
    ])
}

/// Plug-in estimate with additive smoothing; alphabets are the sorted
/// distinct labels of each column.
pub fn from_samples(records: &[SampleRecord], smoothing: f64) -> Result<JointDist> {
    if records.is_empty() {
        return Err(Error::Estimation(
            "no records to infer alphabets from; use from_samples_over with explicit alphabets".into(),
        ));
    }
    check_records(records)?;
    let triples: Vec<[String; 3]> = records
        .iter()
        .map(|r| [r.z.clone(), r.yhat.clone(), r.y.clone()])
        .collect();
    let alphabets = infer_alphabets(triples.iter())?;
    from_samples_over(alphabets, records, smoothing)
}

/// Plug-in estimate over fixed alphabets:
/// `p[z,ŷ,y] = (count + α) / (n + α·|Z||Ŷ||Y|)`.
pub fn from_samples_over(alphabets: [Alphabet; 3], records: &[SampleRecord], smoothing: f64) -> Result<JointDist> {
    if !smoothing.is_finite() || smoothing < 0.0 {
        return Err(Error::Estimation(format!("smoothing must be a nonnegative number, got {smoothing}")));
    }
    if records.is_empty() && smoothing == 0.0 {
        return Err(Error::Estimation("empty record list with zero smoothing".into()));
    }
    check_records(records)?;
    let shape = (alphabets[0].len(), alphabets[1].len(), alphabets[2].len());
    let mut counts = Array3::<f64>::zeros(shape);
    for (i, r) in records.iter().enumerate() {
        let labels = [r.z.clone(), r.yhat.clone(), r.y.clone()];
        let idx = index_triple(&alphabets, &labels)
            .ok_or_else(|| Error::Estimation(format!("record {i} has a label outside the alphabets: {r:?}")))?;
        counts[idx] += 1.0;
    }
    let cells = (shape.0 * shape.1 * shape.2) as f64;
    let denom = records.len() as f64 + smoothing * cells;
    let probs = counts.mapv(|c| (c + smoothing) / denom);
    JointDist::new(alphabets, probs)
}

fn check_records(records: &[SampleRecord]) -> Result<()> {
    for (i, r) in records.iter().enumerate() {
        if r.z.is_empty() || r.y.is_empty() || r.yhat.is_empty() {
            return Err(Error::Estimation(format!("record {i} has an empty label")));
        }
    }
    Ok(())
}

fn clamp(v: f64) -> f64 {
    if v < 0.0 && v > -CLAMP_EPS {
        0.0
    } else {
        v
    }
}

/// Shannon entropy in bits of a probability vector or tensor.
pub fn entropy<'a>(p: impl IntoIterator<Item = &'a f64>) -> f64 {
    let h: f64 = p.into_iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum();
    clamp(h)
}

/// `I(A;B)` in bits.
pub fn mutual_information(dist: &JointDist, a: Var, b: Var) -> Result<f64> {
    if a == b {
        return Err(Error::InvalidArgument(format!("mutual information needs two distinct variables, got {a} twice")));
    }
    let pab = dist.marginal(&[a, b])?;
    let pa = dist.marginal(&[a])?;
    let pb = dist.marginal(&[b])?;
    // pab axes follow (Z, Ŷ, Y) order, so swap roles when a comes later.
    let (first, second) = if a.axis() < b.axis() { (&pa, &pb) } else { (&pb, &pa) };
    let mut acc = 0.0;
    for ((i, j), &p) in pab.indexed_iter().map(|(ix, p)| ((ix[0], ix[1]), p)) {
        if p > 0.0 {
            acc += p * (p / (first[IxDyn(&[i])] * second[IxDyn(&[j])])).log2();
        }
    }
    Ok(clamp(acc))
}

/// `I(A;B|C)` in bits.
pub fn conditional_mutual_information(dist: &JointDist, a: Var, b: Var, given: Var) -> Result<f64> {
    if a == b || a == given || b == given {
        return Err(Error::InvalidArgument(format!(
            "conditional mutual information needs three distinct variables, got ({a}, {b} | {given})"
        )));
    }
    let pac = dist.marginal(&[a, given])?;
    let pbc = dist.marginal(&[b, given])?;
    let pc = dist.marginal(&[given])?;
    let idx2 = |x: Var, y: Var, ix: [usize; 3]| -> [usize; 2] {
        if x.axis() < y.axis() {
            [ix[x.axis()], ix[y.axis()]]
        } else {
            [ix[y.axis()], ix[x.axis()]]
        }
    };
    let mut acc = 0.0;
    for ((i, j, k), &p) in dist.probs().indexed_iter() {
        if p <= 0.0 {
            continue;
        }
        let ix = [i, j, k];
        let p_ac = pac[IxDyn(&idx2(a, given, ix))];
        let p_bc = pbc[IxDyn(&idx2(b, given, ix))];
        let p_c = pc[IxDyn(&[ix[given.axis()]])];
        acc += p * (p * p_c / (p_ac * p_bc)).log2();
    }
    Ok(clamp(acc))
}

/// `I(T; A, B)` in bits, where `A, B` are the two variables other than
/// `target`.
pub fn joint_mutual_information(dist: &JointDist, target: Var) -> Result<f64> {
    let (a, b) = target.others();
    let pt = dist.marginal(&[target])?;
    let pab = dist.marginal(&[a, b])?;
    let mut acc = 0.0;
    for ((i, j, k), &p) in dist.probs().indexed_iter() {
        if p <= 0.0 {
            continue;
        }
        let ix = [i, j, k];
        let p_t = pt[IxDyn(&[ix[target.axis()]])];
        let p_ab = pab[IxDyn(&[ix[a.axis()], ix[b.axis()]])];
        acc += p * (p / (p_t * p_ab)).log2();
    }
    Ok(clamp(acc))
}

/// Counts of each distinct label per column, used for ingestion warnings.
pub fn label_counts(records: &[SampleRecord]) -> [BTreeMap<String, usize>; 3] {
    let mut out: [BTreeMap<String, usize>; 3] = Default::default();
    for r in records {
        *out[0].entry(r.z.clone()).or_default() += 1;
        *out[1].entry(r.yhat.clone()).or_default() += 1;
        *out[2].entry(r.y.clone()).or_default() += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn uniform(shape: (usize, usize, usize)) -> JointDist {
        let n = (shape.0 * shape.1 * shape.2) as f64;
        JointDist::new(
            [Alphabet::numbered(shape.0), Alphabet::numbered(shape.1), Alphabet::numbered(shape.2)],
            Array3::from_elem(shape, 1.0 / n),
        )
        .unwrap()
    }

    #[test]
    fn alphabet_sorts_and_rejects_duplicates() {
        let a = Alphabet::new(["b", "a", "c"]).unwrap();
        assert_eq!(a.symbols(), ["a", "b", "c"]);
        assert_eq!(a.index_of("c"), Some(2));
        assert!(Alphabet::new(["x", "x"]).is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new([""]).is_err());
        assert_eq!(Alphabet::numbered(11).symbols()[10], "10");
        assert_eq!(Alphabet::numbered(11).symbols()[2], "02");
    }

    #[test]
    fn rejects_bad_tensors() {
        let ab = || [Alphabet::binary(), Alphabet::binary(), Alphabet::new(["0"]).unwrap()];
        assert!(JointDist::new(ab(), Array3::from_elem((2, 2, 1), 0.3)).is_err());
        let mut neg = Array3::from_elem((2, 2, 1), 0.25);
        neg[[0, 0, 0]] = -0.25;
        neg[[0, 1, 0]] = 0.75;
        assert!(JointDist::new(ab(), neg).is_err());
        assert!(JointDist::new(ab(), Array3::from_elem((2, 1, 2), 0.25)).is_err());
    }

    #[test]
    fn samples_one_per_cell_are_uniform() {
        let records: Vec<_> = [("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")]
            .iter()
            .map(|(z, yh)| SampleRecord::new(*z, "pos", *yh))
            .collect();
        let d = from_samples(&records, 0.0).unwrap();
        assert_eq!(d.shape(), [2, 2, 1]);
        assert!(d.probs().iter().all(|&p| p == 0.25));
    }

    #[test]
    fn pure_prior_is_uniform() {
        let abc = [Alphabet::binary(), Alphabet::binary(), Alphabet::binary()];
        let d = from_samples_over(abc, &[], 1.0).unwrap();
        assert!(d.probs().iter().all(|&p| (p - 0.125).abs() < 1e-15));
    }

    #[test]
    fn empty_records_without_smoothing_fail() {
        let abc = [Alphabet::binary(), Alphabet::binary(), Alphabet::binary()];
        assert!(matches!(from_samples_over(abc, &[], 0.0), Err(Error::Estimation(_))));
        assert!(matches!(from_samples(&[], 0.0), Err(Error::Estimation(_))));
        assert!(from_samples(&[SampleRecord::new("a", "", "b")], 0.0).is_err());
    }

    #[test]
    fn smoothing_formula() {
        let records = vec![SampleRecord::new("0", "0", "0"), SampleRecord::new("1", "1", "1")];
        let d = from_samples(&records, 0.5).unwrap();
        // (1 + 0.5) / (2 + 0.5 * 8)
        assert!((d.probs()[[0, 0, 0]] - 0.25).abs() < 1e-15);
        assert!((d.probs()[[0, 1, 0]] - 0.5 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn marginals() {
        let d = uniform((2, 2, 2));
        let z = d.marginal(&[Var::Z]).unwrap();
        assert_eq!(z.as_slice().unwrap(), &[0.5, 0.5]);
        let zy = d.marginal(&[Var::Y, Var::Z]).unwrap();
        assert_eq!(zy.shape(), &[2, 2]);
        assert!(d.marginal(&[]).is_err());
        assert!(d.marginal(&[Var::Z, Var::Z]).is_err());
        assert!(d.marginal(&Var::ALL).is_err());
    }

    #[test]
    fn marginal_keeps_axis_order() {
        let probs = array![[[0.1, 0.2], [0.05, 0.05]], [[0.3, 0.0], [0.25, 0.05]]];
        let d = JointDist::new([Alphabet::binary(), Alphabet::binary(), Alphabet::binary()], probs.clone()).unwrap();
        let zy = d.marginal(&[Var::Y, Var::Z]).unwrap();
        for z in 0..2 {
            for y in 0..2 {
                let direct: f64 = (0..2).map(|yh| probs[[z, yh, y]]).sum();
                assert!((zy[IxDyn(&[z, y])] - direct).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&[0.5, 0.5]), 1.0);
        assert_eq!(entropy(&[1.0, 0.0]), 0.0);
        assert!((entropy(&[0.9, 0.1]) - 0.4690).abs() < 1e-4);
    }

    #[test]
    fn independent_triple_has_no_information() {
        let d = uniform((2, 3, 2));
        assert_eq!(mutual_information(&d, Var::Z, Var::Yhat).unwrap(), 0.0);
        assert_eq!(conditional_mutual_information(&d, Var::Z, Var::Yhat, Var::Y).unwrap(), 0.0);
        assert_eq!(joint_mutual_information(&d, Var::Z).unwrap(), 0.0);
    }

    #[test]
    fn distinct_variables_required() {
        let d = uniform((2, 2, 2));
        assert!(mutual_information(&d, Var::Y, Var::Y).is_err());
        assert!(conditional_mutual_information(&d, Var::Z, Var::Y, Var::Y).is_err());
    }

    #[test]
    fn permuted_moves_axes() {
        let d = JointDist::from_cells([(("a", "x", "0"), 0.7), (("b", "y", "1"), 0.3)]).unwrap();
        let p = d.permuted([Var::Y, Var::Z, Var::Yhat]).unwrap();
        assert_eq!(p.alphabet(Var::Z).symbols(), ["0", "1"]);
        assert_eq!(p.prob_of("1", "b", "y"), 0.3);
        assert_eq!(p.prob_of("0", "a", "x"), 0.7);
    }

    #[test]
    fn nats_conversion() {
        assert!((Units::Nats.from_bits(1.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(Units::Bits.from_bits(0.25), 0.25);
    }
}
