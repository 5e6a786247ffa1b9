//! The discrete reaction-network model.
//!
//! A [`Crn`] is an ordered species set plus a list of [`Reaction`]s. Species
//! are interned: reactions refer to them by index into the owning network.
//! [`Crd`] and [`Crc`] wrap a network with the interface needed to read it as
//! a predicate decider or a function computer.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CrnError {
    #[error("invalid species name `{0}`")]
    InvalidName(String),
    #[error("duplicate species `{0}`")]
    DuplicateSpecies(String),
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
    #[error("species index {index} out of range for {len} species")]
    SpeciesOutOfRange { index: usize, len: usize },
    #[error("reaction has neither reactants nor products")]
    EmptyReaction,
    #[error("rate constant must be positive and finite, got {0}")]
    BadRate(f64),
    #[error("reaction {0} is not applicable")]
    NotApplicable(String),
    #[error("count overflow on species `{0}`")]
    Overflow(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
}

pub type Result<T, E = CrnError> = std::result::Result<T, E>;

/// Checks the species naming rule. `/` is accepted after the first character
/// so that compiled sub-networks can carry a scope prefix.
pub fn valid_species_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || "_^{}'/".contains(c))
}

/// Index of a species inside its network.
pub type SpeciesId = usize;

/// A reaction `r -> p` with rate constant `k`. Both sides are multisets kept
/// sorted by species index with no repeated entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Reaction {
    reactants: Vec<(SpeciesId, u64)>,
    products: Vec<(SpeciesId, u64)>,
    rate: f64,
}

fn normalize(side: &[(SpeciesId, u64)]) -> Vec<(SpeciesId, u64)> {
    let mut out: Vec<(SpeciesId, u64)> = Vec::with_capacity(side.len());
    let mut sorted: Vec<_> = side.iter().copied().filter(|&(_, n)| n > 0).collect();
    sorted.sort_by_key(|&(s, _)| s);
    for (s, n) in sorted {
        match out.last_mut() {
            Some((last, m)) if *last == s => *m += n,
            _ => out.push((s, n)),
        }
    }
    out
}

impl Reaction {
    pub fn new(
        reactants: &[(SpeciesId, u64)],
        products: &[(SpeciesId, u64)],
        rate: f64,
    ) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(CrnError::BadRate(rate));
        }
        let reactants = normalize(reactants);
        let products = normalize(products);
        if reactants.is_empty() && products.is_empty() {
            return Err(CrnError::EmptyReaction);
        }
        Ok(Reaction {
            reactants,
            products,
            rate,
        })
    }

    pub fn reactants(&self) -> &[(SpeciesId, u64)] {
        &self.reactants
    }

    pub fn products(&self) -> &[(SpeciesId, u64)] {
        &self.products
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Total reactant molecularity (sum of stoichiometries).
    pub fn order(&self) -> u64 {
        self.reactants.iter().map(|&(_, n)| n).sum()
    }

    pub fn reactant_count(&self, s: SpeciesId) -> u64 {
        self.reactants
            .iter()
            .find(|&&(x, _)| x == s)
            .map_or(0, |&(_, n)| n)
    }

    pub fn product_count(&self, s: SpeciesId) -> u64 {
        self.products
            .iter()
            .find(|&&(x, _)| x == s)
            .map_or(0, |&(_, n)| n)
    }

    /// Net change `p(s) - r(s)`.
    pub fn net(&self, s: SpeciesId) -> i64 {
        self.product_count(s) as i64 - self.reactant_count(s) as i64
    }

    /// True when reactants and products coincide.
    pub fn is_null(&self) -> bool {
        self.reactants == self.products
    }

    /// Net change vector as sparse `(species, delta)` pairs, zero deltas dropped.
    pub fn delta(&self) -> Vec<(SpeciesId, i64)> {
        let mut out: Vec<(SpeciesId, i64)> = Vec::new();
        for &(s, _) in self.reactants.iter().chain(self.products.iter()) {
            if out.iter().any(|&(x, _)| x == s) {
                continue;
            }
            let d = self.net(s);
            if d != 0 {
                out.push((s, d));
            }
        }
        out.sort_by_key(|&(s, _)| s);
        out
    }

    fn max_species(&self) -> Option<SpeciesId> {
        self.reactants
            .iter()
            .chain(self.products.iter())
            .map(|&(s, _)| s)
            .max()
    }
}

/// Nonnegative count vector indexed by the species of a network.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Configuration(Vec<u64>);

impl Configuration {
    pub fn zeros(len: usize) -> Self {
        Configuration(vec![0; len])
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        Configuration(counts)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn get(&self, s: SpeciesId) -> u64 {
        self.0[s]
    }

    pub fn set(&mut self, s: SpeciesId, n: u64) {
        self.0[s] = n;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn into_counts(self) -> Vec<u64> {
        self.0
    }
}

impl From<Vec<u64>> for Configuration {
    fn from(v: Vec<u64>) -> Self {
        Configuration(v)
    }
}

fn check_range(c: &Configuration, alpha: &Reaction) -> Result<()> {
    if let Some(m) = alpha.max_species() {
        if m >= c.len() {
            return Err(CrnError::SpeciesOutOfRange {
                index: m,
                len: c.len(),
            });
        }
    }
    Ok(())
}

/// Whether `r <= c`.
pub fn applicable(c: &Configuration, alpha: &Reaction) -> Result<bool> {
    check_range(c, alpha)?;
    Ok(alpha.reactants.iter().all(|&(s, n)| c.0[s] >= n))
}

/// Returns `c + p - r`. Overflow is an error rather than a wrap.
pub fn apply(c: &Configuration, alpha: &Reaction) -> Result<Configuration> {
    if !applicable(c, alpha)? {
        return Err(CrnError::NotApplicable(format!("{alpha:?}")));
    }
    let mut next = c.clone();
    for &(s, n) in &alpha.reactants {
        next.0[s] -= n;
    }
    for &(s, n) in &alpha.products {
        next.0[s] = next.0[s]
            .checked_add(n)
            .ok_or_else(|| CrnError::Overflow(format!("#{s}")))?;
    }
    Ok(next)
}

/// A reaction network: ordered species and reactions over them.
#[derive(Debug, Clone, Default)]
pub struct Crn {
    species: Vec<String>,
    index: HashMap<String, SpeciesId>,
    reactions: Vec<Reaction>,
}

impl Crn {
    pub fn new(species: Vec<String>, reactions: Vec<Reaction>) -> Result<Self> {
        let mut index = HashMap::with_capacity(species.len());
        for (i, name) in species.iter().enumerate() {
            if !valid_species_name(name) {
                return Err(CrnError::InvalidName(name.clone()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(CrnError::DuplicateSpecies(name.clone()));
            }
        }
        for r in &reactions {
            if let Some(m) = r.max_species() {
                if m >= species.len() {
                    return Err(CrnError::SpeciesOutOfRange {
                        index: m,
                        len: species.len(),
                    });
                }
            }
        }
        Ok(Crn {
            species,
            index,
            reactions,
        })
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn name(&self, s: SpeciesId) -> &str {
        &self.species[s]
    }

    pub fn id(&self, name: &str) -> Option<SpeciesId> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<SpeciesId> {
        self.id(name)
            .ok_or_else(|| CrnError::UnknownSpecies(name.to_string()))
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn zero_configuration(&self) -> Configuration {
        Configuration::zeros(self.species.len())
    }

    /// Builds a configuration from `(name, count)` pairs; unnamed species are 0.
    pub fn configuration(&self, counts: &[(&str, u64)]) -> Result<Configuration> {
        let mut c = self.zero_configuration();
        for &(name, n) in counts {
            c.0[self.require(name)?] = n;
        }
        Ok(c)
    }

    pub(crate) fn check_config(&self, c: &Configuration) -> Result<()> {
        if c.len() != self.species.len() {
            return Err(CrnError::DimensionMismatch {
                expected: self.species.len(),
                got: c.len(),
            });
        }
        Ok(())
    }

    /// Reactions applicable to `c`, in declaration order.
    pub fn enabled(&self, c: &Configuration) -> Result<Vec<&Reaction>> {
        self.check_config(c)?;
        Ok(self
            .reactions
            .iter()
            .filter(|r| r.reactants.iter().all(|&(s, n)| c.0[s] >= n))
            .collect())
    }

    pub fn is_terminal(&self, c: &Configuration) -> Result<bool> {
        Ok(self.enabled(c)?.is_empty())
    }

    /// Renders a reaction using species names, e.g. `A + 2 B -> A + 3 C`.
    pub fn display_reaction(&self, r: &Reaction) -> String {
        let side = |v: &[(SpeciesId, u64)]| {
            if v.is_empty() {
                return "0".to_string();
            }
            v.iter()
                .map(|&(s, n)| {
                    if n == 1 {
                        self.species[s].clone()
                    } else {
                        format!("{n} {}", self.species[s])
                    }
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        format!("{} -> {}", side(&r.reactants), side(&r.products))
    }

    /// Largest reactant molecularity over all reactions.
    pub fn max_order(&self) -> u64 {
        self.reactions.iter().map(Reaction::order).max().unwrap_or(0)
    }

    /// Name-based structural equality: same species names (any order) and the
    /// same reactions in the same order.
    pub fn structurally_eq(&self, other: &Crn) -> bool {
        if self.species.len() != other.species.len() || self.reactions.len() != other.reactions.len()
        {
            return false;
        }
        if self.species.iter().any(|s| other.id(s).is_none()) {
            return false;
        }
        let named = |crn: &Crn, side: &[(SpeciesId, u64)]| {
            let mut v: Vec<(String, u64)> = side
                .iter()
                .map(|&(s, n)| (crn.species[s].clone(), n))
                .collect();
            v.sort();
            v
        };
        self.reactions.iter().zip(other.reactions.iter()).all(|(a, b)| {
            a.rate == b.rate
                && named(self, &a.reactants) == named(other, &b.reactants)
                && named(self, &a.products) == named(other, &b.products)
        })
    }
}

/// Incremental network construction used by parsers and compilers.
#[derive(Debug, Default, Clone)]
pub struct CrnBuilder {
    species: Vec<String>,
    index: HashMap<String, SpeciesId>,
    reactions: Vec<Reaction>,
}

impl CrnBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns `name`, returning its index.
    pub fn species(&mut self, name: &str) -> Result<SpeciesId> {
        if let Some(&i) = self.index.get(name) {
            return Ok(i);
        }
        if !valid_species_name(name) {
            return Err(CrnError::InvalidName(name.to_string()));
        }
        let i = self.species.len();
        self.species.push(name.to_string());
        self.index.insert(name.to_string(), i);
        Ok(i)
    }

    pub fn lookup(&self, name: &str) -> Option<SpeciesId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, s: SpeciesId) -> &str {
        &self.species[s]
    }

    pub fn species_names(&self) -> &[String] {
        &self.species
    }

    pub fn push(&mut self, r: Reaction) -> usize {
        self.reactions.push(r);
        self.reactions.len() - 1
    }

    /// Adds a unit-rate reaction given by species names.
    pub fn reaction(&mut self, reactants: &[(&str, u64)], products: &[(&str, u64)]) -> Result<()> {
        let mut r = Vec::with_capacity(reactants.len());
        for &(n, k) in reactants {
            r.push((self.species(n)?, k));
        }
        let mut p = Vec::with_capacity(products.len());
        for &(n, k) in products {
            p.push((self.species(n)?, k));
        }
        self.reactions.push(Reaction::new(&r, &p, 1.0)?);
        Ok(())
    }

    pub fn reaction_count(&self) -> usize {
        self.reactions.len()
    }

    pub fn build(self) -> Crn {
        Crn {
            species: self.species,
            index: self.index,
            reactions: self.reactions,
        }
    }
}

/// The vote of a decider configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vote {
    Yes,
    No,
    Undefined,
}

impl Vote {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Vote::Yes
        } else {
            Vote::No
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Vote::Yes => Some(true),
            Vote::No => Some(false),
            Vote::Undefined => None,
        }
    }
}

impl fmt::Display for Vote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Vote::Yes => "yes",
            Vote::No => "no",
            Vote::Undefined => "undefined",
        })
    }
}

/// Declared linear bound `c0 + c1 * ||x||` on the total molecular count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CountBound {
    pub c0: u64,
    pub c1: u64,
}

impl CountBound {
    pub fn limit(&self, input_norm: u64) -> u64 {
        self.c0.saturating_add(self.c1.saturating_mul(input_norm))
    }
}

fn validate_context(crn: &Crn, inputs: &[SpeciesId], context: &Configuration) -> Result<()> {
    crn.check_config(context)?;
    for &s in inputs {
        if context.0[s] != 0 {
            return Err(CrnError::InvalidMachine(format!(
                "initial context assigns input species `{}`",
                crn.name(s)
            )));
        }
    }
    Ok(())
}

fn check_distinct(crn: &Crn, v: &[SpeciesId], what: &str) -> Result<()> {
    for (i, s) in v.iter().enumerate() {
        if *s >= crn.species_count() {
            return Err(CrnError::SpeciesOutOfRange {
                index: *s,
                len: crn.species_count(),
            });
        }
        if v[..i].contains(s) {
            return Err(CrnError::InvalidMachine(format!(
                "{what} species `{}` listed twice",
                crn.name(*s)
            )));
        }
    }
    Ok(())
}

fn build_initial(
    crn: &Crn,
    inputs: &[SpeciesId],
    context: &Configuration,
    x: &[u64],
) -> Result<Configuration> {
    if x.len() != inputs.len() {
        return Err(CrnError::DimensionMismatch {
            expected: inputs.len(),
            got: x.len(),
        });
    }
    let mut c = context.clone();
    for (&s, &n) in inputs.iter().zip(x) {
        c.0[s] = n;
    }
    debug_assert_eq!(c.len(), crn.species_count());
    Ok(c)
}

/// Chemical reaction decider: a network with input species, voters and an
/// initial context over the non-input species.
#[derive(Debug, Clone)]
pub struct Crd {
    crn: Crn,
    inputs: Vec<SpeciesId>,
    voters: Vec<(SpeciesId, bool)>,
    context: Configuration,
}

impl Crd {
    pub fn new(
        crn: Crn,
        inputs: Vec<SpeciesId>,
        voters: Vec<(SpeciesId, bool)>,
        context: Configuration,
    ) -> Result<Self> {
        check_distinct(&crn, &inputs, "input")?;
        let voter_ids: Vec<_> = voters.iter().map(|&(s, _)| s).collect();
        check_distinct(&crn, &voter_ids, "voter")?;
        if voters.is_empty() {
            return Err(CrnError::InvalidMachine("decider has no voters".into()));
        }
        validate_context(&crn, &inputs, &context)?;
        Ok(Crd {
            crn,
            inputs,
            voters,
            context,
        })
    }

    pub fn crn(&self) -> &Crn {
        &self.crn
    }

    pub fn inputs(&self) -> &[SpeciesId] {
        &self.inputs
    }

    pub fn voters(&self) -> &[(SpeciesId, bool)] {
        &self.voters
    }

    pub fn context(&self) -> &Configuration {
        &self.context
    }

    pub fn initial_configuration(&self, x: &[u64]) -> Result<Configuration> {
        build_initial(&self.crn, &self.inputs, &self.context, x)
    }

    /// The output `Phi(c)`: undefined when no voter is present or when voters
    /// of both opinions are present.
    pub fn vote(&self, c: &Configuration) -> Vote {
        vote_of(&self.voters, c.counts())
    }
}

pub(crate) fn vote_of(voters: &[(SpeciesId, bool)], counts: &[u64]) -> Vote {
    let mut yes = false;
    let mut no = false;
    for &(s, b) in voters {
        if counts[s] > 0 {
            if b {
                yes = true;
            } else {
                no = true;
            }
        }
    }
    match (yes, no) {
        (true, false) => Vote::Yes,
        (false, true) => Vote::No,
        _ => Vote::Undefined,
    }
}

/// Chemical reaction computer: a network with ordered input and output
/// species and an initial context.
#[derive(Debug, Clone)]
pub struct Crc {
    crn: Crn,
    inputs: Vec<SpeciesId>,
    outputs: Vec<SpeciesId>,
    context: Configuration,
    count_bound: Option<CountBound>,
    bounded: bool,
}

impl Crc {
    pub fn new(
        crn: Crn,
        inputs: Vec<SpeciesId>,
        outputs: Vec<SpeciesId>,
        context: Configuration,
    ) -> Result<Self> {
        check_distinct(&crn, &inputs, "input")?;
        check_distinct(&crn, &outputs, "output")?;
        if outputs.is_empty() {
            return Err(CrnError::InvalidMachine(
                "computer needs at least one output species".into(),
            ));
        }
        if let Some(s) = inputs.iter().find(|s| outputs.contains(s)) {
            return Err(CrnError::InvalidMachine(format!(
                "species `{}` is both input and output",
                crn.name(*s)
            )));
        }
        validate_context(&crn, &inputs, &context)?;
        Ok(Crc {
            crn,
            inputs,
            outputs,
            context,
            count_bound: None,
            bounded: true,
        })
    }

    pub fn with_count_bound(mut self, bound: Option<CountBound>) -> Self {
        self.count_bound = bound;
        self
    }

    pub fn with_bounded(mut self, bounded: bool) -> Self {
        self.bounded = bounded;
        self
    }

    pub fn crn(&self) -> &Crn {
        &self.crn
    }

    pub fn inputs(&self) -> &[SpeciesId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[SpeciesId] {
        &self.outputs
    }

    pub fn context(&self) -> &Configuration {
        &self.context
    }

    pub fn count_bound(&self) -> Option<CountBound> {
        self.count_bound
    }

    /// False for networks whose reachable space is unbounded by construction.
    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn initial_configuration(&self, x: &[u64]) -> Result<Configuration> {
        build_initial(&self.crn, &self.inputs, &self.context, x)
    }

    pub fn output_counts(&self, c: &Configuration) -> Vec<u64> {
        self.outputs.iter().map(|&s| c.0[s]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(rxns: &[(&[(&str, u64)], &[(&str, u64)])]) -> Crn {
        let mut b = CrnBuilder::new();
        for (r, p) in rxns {
            b.reaction(r, p).unwrap();
        }
        b.build()
    }

    #[test]
    fn applicability() {
        let crn = net(&[(&[("X", 2)], &[("Y", 1)])]);
        let r = &crn.reactions()[0];
        let c = crn.configuration(&[("X", 2)]).unwrap();
        assert!(applicable(&c, r).unwrap());
        let c = crn.configuration(&[("X", 1)]).unwrap();
        assert!(!applicable(&c, r).unwrap());

        let crn = net(&[(&[("X", 1), ("Y", 1)], &[("Z", 1)])]);
        let c = crn.configuration(&[("X", 3), ("Y", 0)]).unwrap();
        assert!(!applicable(&c, &crn.reactions()[0]).unwrap());
    }

    #[test]
    fn unknown_species_is_structural_error() {
        let r = Reaction::new(&[(5, 1)], &[], 1.0).unwrap();
        let c = Configuration::zeros(2);
        assert!(matches!(
            applicable(&c, &r),
            Err(CrnError::SpeciesOutOfRange { .. })
        ));
    }

    #[test]
    fn apply_examples() {
        let crn = net(&[(&[("X", 2)], &[("Y", 1)])]);
        let c = crn.configuration(&[("X", 5)]).unwrap();
        let d = apply(&c, &crn.reactions()[0]).unwrap();
        assert_eq!(d, crn.configuration(&[("X", 3), ("Y", 1)]).unwrap());

        let crn = net(&[(&[("X", 1)], &[("Y", 2)])]);
        let c = crn.configuration(&[("X", 1), ("Y", 4)]).unwrap();
        let d = apply(&c, &crn.reactions()[0]).unwrap();
        assert_eq!(d, crn.configuration(&[("Y", 6)]).unwrap());

        let crn = net(&[(&[("A", 1), ("B", 2)], &[("A", 1), ("C", 3)])]);
        let c = crn.configuration(&[("A", 1), ("B", 2)]).unwrap();
        let d = apply(&c, &crn.reactions()[0]).unwrap();
        assert_eq!(d, crn.configuration(&[("A", 1), ("C", 3)]).unwrap());
    }

    #[test]
    fn apply_errors() {
        let crn = net(&[(&[("X", 2)], &[("Y", 1)])]);
        let c = crn.configuration(&[("X", 1)]).unwrap();
        assert!(matches!(
            apply(&c, &crn.reactions()[0]),
            Err(CrnError::NotApplicable(_))
        ));
        let crn = net(&[(&[("X", 1)], &[("Y", 2)])]);
        let c = crn.configuration(&[("X", 1), ("Y", u64::MAX - 1)]).unwrap();
        assert!(matches!(
            apply(&c, &crn.reactions()[0]),
            Err(CrnError::Overflow(_))
        ));
    }

    #[test]
    fn enabled_and_terminal() {
        let crn = net(&[(&[("X", 2)], &[("Y", 1)]), (&[("Y", 1)], &[("X", 1)])]);
        let c = crn.configuration(&[("X", 1), ("Y", 1)]).unwrap();
        let en = crn.enabled(&c).unwrap();
        assert_eq!(en.len(), 1);
        assert_eq!(crn.display_reaction(en[0]), "Y -> X");
        assert!(crn.enabled(&crn.zero_configuration()).unwrap().is_empty());

        let crn = net(&[(&[("X", 2)], &[("Y", 1)])]);
        assert!(crn
            .is_terminal(&crn.configuration(&[("X", 1), ("Y", 2)]).unwrap())
            .unwrap());
        assert!(!crn
            .is_terminal(&crn.configuration(&[("X", 2)]).unwrap())
            .unwrap());
        let empty = Crn::new(vec!["A".into()], vec![]).unwrap();
        assert!(empty
            .is_terminal(&Configuration::from_counts(vec![7]))
            .unwrap());
    }

    #[test]
    fn votes() {
        let crn = Crn::new(vec!["L1".into(), "L0".into()], vec![]).unwrap();
        let crd = Crd::new(
            crn,
            vec![],
            vec![(0, true), (1, false)],
            Configuration::zeros(2),
        )
        .unwrap();
        assert_eq!(crd.vote(&vec![1, 0].into()), Vote::Yes);
        assert_eq!(crd.vote(&vec![1, 2].into()), Vote::Undefined);
        assert_eq!(crd.vote(&vec![0, 0].into()), Vote::Undefined);
        assert_eq!(crd.vote(&vec![0, 3].into()), Vote::No);
    }

    #[test]
    fn initial_configuration_and_outputs() {
        let mut b = CrnBuilder::new();
        let x = b.species("X").unwrap();
        let n = b.species("N").unwrap();
        let y = b.species("Y").unwrap();
        let crn = b.build();
        let mut ctx = crn.zero_configuration();
        ctx.set(n, 1);
        let crc = Crc::new(crn, vec![x], vec![y], ctx).unwrap();
        assert_eq!(crc.initial_configuration(&[4]).unwrap().counts(), &[4, 1, 0]);
        assert_eq!(crc.initial_configuration(&[0]).unwrap().counts(), &[0, 1, 0]);
        assert!(matches!(
            crc.initial_configuration(&[1, 2]),
            Err(CrnError::DimensionMismatch { .. })
        ));
        assert_eq!(crc.output_counts(&vec![0, 0, 6].into()), vec![6]);

        let mut b = CrnBuilder::new();
        let x1 = b.species("X1").unwrap();
        let x2 = b.species("X2").unwrap();
        let y1 = b.species("Y1").unwrap();
        let y2 = b.species("Y2").unwrap();
        let crn = b.build();
        let ctx = crn.zero_configuration();
        let crc = Crc::new(crn.clone(), vec![x1, x2], vec![y1, y2], ctx.clone()).unwrap();
        assert_eq!(crc.initial_configuration(&[2, 3]).unwrap().counts(), &[2, 3, 0, 0]);
        assert_eq!(crc.output_counts(&vec![0, 0, 0, 3].into()), vec![0, 3]);
        assert!(Crc::new(crn, vec![x1], vec![], ctx).is_err());
    }

    #[test]
    fn names() {
        assert!(valid_species_name("Y^P"));
        assert!(valid_species_name("c/f1/X'1"));
        assert!(valid_species_name("D_{0}"));
        assert!(!valid_species_name("1X"));
        assert!(!valid_species_name(""));
        assert!(!valid_species_name("A-B"));
    }

    #[test]
    fn reaction_normalization() {
        let r = Reaction::new(&[(1, 1), (0, 2), (1, 1)], &[(0, 0)], 1.0).unwrap();
        assert_eq!(r.reactants(), &[(0, 2), (1, 2)]);
        assert!(r.products().is_empty());
        assert!(Reaction::new(&[], &[], 1.0).is_err());
        assert!(Reaction::new(&[(0, 1)], &[], 0.0).is_err());
        let null = Reaction::new(&[(0, 1)], &[(0, 1)], 1.0).unwrap();
        assert!(null.is_null());
        assert!(null.delta().is_empty());
    }
}
