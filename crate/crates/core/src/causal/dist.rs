use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::eval::Evaluator;
use super::{CausalSystem, StampedMessage, Symbol, SystemError};
use crate::rational::{self, Rational};
use crate::spacetime::SpaceTimePoint;

/// Fixed values for exposed input slots; slots not mentioned receive the vacuum.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<(String, SpaceTimePoint), Symbol>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, port: &str, point: SpaceTimePoint, value: Symbol) -> Self {
        self.0.insert((port.to_string(), point), value);
        self
    }

    pub fn set(&mut self, port: &str, point: SpaceTimePoint, value: Symbol) {
        self.0.insert((port.to_string(), point), value);
    }

    pub fn get(&self, port: &str, point: &SpaceTimePoint) -> Option<Symbol> {
        self.0.get(&(port.to_string(), point.clone())).copied()
    }

    /// Resolves to one value per exposed input slot of `sys`, in plan order.
    pub fn resolve(&self, sys: &CausalSystem) -> Result<Vec<Symbol>, SystemError> {
        let plan = sys.plan();
        let mut out = vec![Symbol::Vacuum; plan.ext_in.len()];
        for ((port, point), v) in &self.0 {
            let i = plan
                .ext_in_index(port, point)
                .ok_or_else(|| SystemError::UnknownPort(format!("{port}@{point}")))?;
            if !v.is_vacuum() && !plan.ext_in[i].alphabet.contains(v) {
                return Err(SystemError::Interface(format!("{v} is not in the alphabet of {port}")));
            }
            out[i] = *v;
        }
        Ok(out)
    }
}

/// Exact finite distribution over output transcripts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeDistribution {
    labels: Vec<String>,
    probs: BTreeMap<Vec<Symbol>, Rational>,
}

impl OutcomeDistribution {
    /// Builds a distribution; zero entries are dropped and the mass must be exactly 1.
    pub fn new(labels: Vec<String>, probs: BTreeMap<Vec<Symbol>, Rational>) -> Result<Self, SystemError> {
        let probs: BTreeMap<_, _> = probs.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        let total = probs.values().fold(Rational::zero(), |a, p| a + p);
        if !total.is_one() || probs.values().any(|p| p < &Rational::zero()) {
            return Err(SystemError::BadWeights(format!("distribution mass is {total}")));
        }
        if probs.keys().any(|k| k.len() != labels.len()) {
            return Err(SystemError::Interface("outcome length differs from label count".into()));
        }
        Ok(Self { labels, probs })
    }

    pub fn point_mass(labels: Vec<String>, outcome: Vec<Symbol>) -> Self {
        let mut probs = BTreeMap::new();
        probs.insert(outcome, Rational::one());
        Self { labels, probs }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Symbol>, &Rational)> {
        self.probs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.probs.len()
    }

    pub fn prob(&self, outcome: &[Symbol]) -> Rational {
        self.probs.get(outcome).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.probs.values().fold(Rational::zero(), |a, p| a + p)
    }

    pub fn prob_where<F: Fn(&[Symbol]) -> bool>(&self, pred: F) -> Rational {
        self.probs.iter().filter(|(k, _)| pred(k)).fold(Rational::zero(), |a, (_, p)| a + p)
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Index of the first label whose port name is `port`.
    pub fn port_index(&self, port: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.split_once('@').map(|(p, _)| p) == Some(port))
    }

    /// Marginal on the given label positions, in the given order.
    pub fn marginal(&self, idx: &[usize]) -> Self {
        let mut probs = BTreeMap::new();
        for (k, p) in &self.probs {
            let key: Vec<Symbol> = idx.iter().map(|&i| k[i]).collect();
            *probs.entry(key).or_insert_with(Rational::zero) += p;
        }
        Self { labels: idx.iter().map(|&i| self.labels[i].clone()).collect(), probs }
    }

    /// Product distribution with labels concatenated.
    pub fn product(&self, other: &Self) -> Self {
        let mut probs = BTreeMap::new();
        for (a, p) in &self.probs {
            for (b, q) in &other.probs {
                let mut k = a.clone();
                k.extend(b.iter().copied());
                probs.insert(k, p * q);
            }
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Self { labels, probs }
    }

    pub(crate) fn from_accumulated(labels: Vec<String>, probs: BTreeMap<Vec<Symbol>, Rational>) -> Self {
        Self { labels, probs: probs.into_iter().filter(|(_, p)| !p.is_zero()).collect() }
    }
}

impl Serialize for OutcomeDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row<'a> {
            values: &'a [Symbol],
            p: String,
        }
        let rows: Vec<Row> =
            self.probs.iter().map(|(k, p)| Row { values: k, p: rational::format(p) }).collect();
        let mut st = s.serialize_struct("OutcomeDistribution", 2)?;
        st.serialize_field("labels", &self.labels)?;
        st.serialize_field("outcomes", &rows)?;
        st.end()
    }
}

/// Exact output distribution under fixed inputs, by enumerating every joint seed.
pub fn exact_distribution(sys: &CausalSystem, inputs: &Assignment) -> Result<OutcomeDistribution, SystemError> {
    let fixed = inputs.resolve(sys)?;
    let mut ev = Evaluator::new(sys);
    let mut acc: BTreeMap<Vec<Symbol>, Rational> = BTreeMap::new();
    for (seeds, w) in sys.plan().joint_seeds()? {
        ev.run_fixed(&seeds, &fixed);
        *acc.entry(ev.ext_outs()).or_insert_with(Rational::zero) += w;
    }
    Ok(OutcomeDistribution::from_accumulated(sys.plan().out_labels(), acc))
}

/// Every exposed slot with the message it carried in one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub messages: BTreeMap<String, Vec<StampedMessage>>,
}

impl Transcript {
    pub fn value(&self, port: &str, point: &SpaceTimePoint) -> Option<Symbol> {
        self.messages.get(port)?.iter().find(|m| &m.point == point).map(|m| m.value)
    }
}

/// One run with seeds drawn from the exact weights, reproducible from `rng_seed`.
pub fn sample(sys: &CausalSystem, inputs: &Assignment, rng_seed: u64) -> Result<Transcript, SystemError> {
    let fixed = inputs.resolve(sys)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let seeds = sys.plan().sample_seeds(&mut rng);
    let mut ev = Evaluator::new(sys);
    ev.run_fixed(&seeds, &fixed);
    let mut messages: BTreeMap<String, Vec<StampedMessage>> = BTreeMap::new();
    for (i, slot) in sys.plan().ext_out.iter().enumerate() {
        messages
            .entry(slot.port.clone())
            .or_default()
            .push(StampedMessage { value: ev.ext_out(i), point: slot.point.clone() });
    }
    Ok(Transcript { messages })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::{compose_parallel, AtomBuilder};
    use crate::rational::rat;

    fn coin(name: &str, port: &str) -> CausalSystem {
        AtomBuilder::new(name)
            .output(port, Symbol::bits(), vec![SpaceTimePoint::int(1, 0)])
            .uniform_seeds(2)
            .build(|_, s| vec![Symbol::bit(s as u32)])
            .unwrap()
    }

    #[test]
    fn parallel_coins_are_independent() {
        let a = coin("a", "x");
        let b = coin("b", "y");
        let joint = exact_distribution(&compose_parallel(&a, &b).unwrap(), &Assignment::new()).unwrap();
        let pa = exact_distribution(&a, &Assignment::new()).unwrap();
        let pb = exact_distribution(&b, &Assignment::new()).unwrap();
        assert_eq!(joint, pa.product(&pb));
        assert_eq!(joint.total(), rat(1, 1));
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = coin("a", "x");
        let t1 = sample(&a, &Assignment::new(), 7).unwrap();
        let t2 = sample(&a, &Assignment::new(), 7).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn deterministic_system_ignores_rng_seed() {
        let d = AtomBuilder::new("d")
            .output("x", Symbol::bits(), vec![SpaceTimePoint::int(1, 0)])
            .build(|_, _| vec![Symbol::ONE])
            .unwrap();
        let a = sample(&d, &Assignment::new(), 1).unwrap();
        let b = sample(&d, &Assignment::new(), 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.value("x", &SpaceTimePoint::int(1, 0)), Some(Symbol::ONE));
    }

    #[test]
    fn rejects_unknown_input_slot() {
        let a = coin("a", "x");
        let bad = Assignment::new().with("nope", SpaceTimePoint::origin(), Symbol::ONE);
        assert!(exact_distribution(&a, &bad).is_err());
    }

    #[test]
    fn new_checks_mass() {
        let mut m = BTreeMap::new();
        m.insert(vec![Symbol::ONE], rat(1, 2));
        assert!(OutcomeDistribution::new(vec!["x".into()], m).is_err());
    }
}
