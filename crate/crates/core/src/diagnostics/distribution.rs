use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rng::CompensatedSum;
use crate::sampling::Outcome;

/// Finite probability table over outcomes; mass may be below one for truncated tables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Distribution {
    probs: BTreeMap<Outcome, f64>,
}

impl Distribution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `p` to the probability of `outcome`. Negative `p` is rejected.
    pub fn add(&mut self, outcome: Outcome, p: f64) -> Result<()> {
        if !(p >= 0.0) {
            return Err(Error::Domain(format!("negative probability {p}")));
        }
        if let Some(first) = self.probs.keys().next() {
            if std::mem::discriminant(first) != std::mem::discriminant(&outcome) {
                return Err(Error::Mismatch("counts and clicks cannot share a distribution".into()));
            }
        }
        if p > 0.0 {
            *self.probs.entry(outcome).or_insert(0.0) += p;
        }
        Ok(())
    }

    pub fn from_counts<I: IntoIterator<Item = (Vec<usize>, f64)>>(items: I) -> Result<Self> {
        let mut d = Distribution::new();
        for (c, p) in items {
            d.add(Outcome::Counts(c), p)?;
        }
        Ok(d)
    }

    pub fn prob(&self, outcome: &Outcome) -> f64 {
        self.probs.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn prob_counts(&self, counts: &[usize]) -> f64 {
        self.prob(&Outcome::Counts(counts.to_vec()))
    }

    pub fn mass(&self) -> f64 {
        self.probs.values().copied().collect::<CompensatedSum>().value()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, f64)> {
        self.probs.iter().map(|(o, &p)| (o, p))
    }

    fn is_clicks(&self) -> Option<bool> {
        self.probs.keys().next().map(|o| matches!(o, Outcome::Clicks(_)))
    }

    /// Probability mass per total photon number (index = total).
    pub fn mass_by_total(&self) -> Vec<f64> {
        let mut out: Vec<CompensatedSum> = Vec::new();
        for (o, p) in self.iter() {
            let t = o.total();
            if out.len() <= t {
                out.resize(t + 1, CompensatedSum::default());
            }
            out[t].add(p);
        }
        out.iter().map(|s| s.value()).collect()
    }

    /// Push-forward under threshold detection.
    pub fn coarse_grain(&self) -> Result<Distribution> {
        let mut d = Distribution::new();
        for (o, p) in self.iter() {
            match o {
                Outcome::Counts(c) => d.add(Outcome::Clicks(crate::sampling::threshold_coarse_grain(c)), p)?,
                Outcome::Clicks(_) => d.add(o.clone(), p)?,
            }
        }
        Ok(d)
    }

    /// Marginal on the given modes.
    pub fn marginal(&self, modes: &[usize]) -> Result<Distribution> {
        let mut d = Distribution::new();
        for (o, p) in self.iter() {
            let sub = match o {
                Outcome::Counts(c) => Outcome::Counts(modes.iter().map(|&m| c[m]).collect()),
                Outcome::Clicks(c) => Outcome::Clicks(modes.iter().map(|&m| c[m]).collect()),
            };
            d.add(sub, p)?;
        }
        Ok(d)
    }
}

/// `½ Σ |P₁ − P₂|`, with outcomes missing from one side counted as probability zero.
pub fn tvd(d1: &Distribution, d2: &Distribution) -> Result<f64> {
    if let (Some(a), Some(b)) = (d1.is_clicks(), d2.is_clicks()) {
        if a != b {
            return Err(Error::Mismatch("cannot compare click and count distributions".into()));
        }
    }
    let mut acc = CompensatedSum::default();
    for (o, p) in d1.iter() {
        acc.add((p - d2.prob(o)).abs());
    }
    for (o, q) in d2.iter() {
        if !d1.probs.contains_key(o) {
            acc.add(q);
        }
    }
    Ok(0.5 * acc.value())
}

/// Normalised frequency table.
pub fn empirical_distribution(samples: &[Outcome]) -> Result<Distribution> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let mut counts: BTreeMap<&Outcome, u64> = BTreeMap::new();
    for s in samples {
        *counts.entry(s).or_insert(0) += 1;
    }
    let n = samples.len() as f64;
    let mut d = Distribution::new();
    for (o, c) in counts {
        d.add(o.clone(), c as f64 / n)?;
    }
    Ok(d)
}
