//! Constructions that emit networks: predicate deciders, the fast affine
//! computer, piecewise composition, and the graph/search transforms.
//!
//! Internal species are scoped with `/` (`f1/C1_0`, `g2/P`, ...) so they
//! cannot collide with interface names, which are rejected if they contain
//! `/`.

mod affine;
mod piecewise;
mod predicates;
mod transforms;

pub use affine::compile_affine;
pub use piecewise::{compile_piecewise, Compiled};
pub use predicates::{compile_guard, compile_mod, compile_threshold};
pub use transforms::{graph_decider, search_backend, search_crc};

use std::collections::HashSet;

use thiserror::Error;

use crate::crn::{Configuration, Crn, CrnBuilder, CrnError, Reaction, SpeciesId};
use crate::semilinear::SemilinearError;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Crn(#[from] CrnError),
    #[error(transparent)]
    Semilinear(#[from] SemilinearError),
    #[error("interface name `{0}` collides with an internal species")]
    Collision(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = CompileError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Default)]
pub struct CompileOptions {
    /// Prepended (with `/`) to every internal species.
    pub scope_prefix: String,
    /// Species names for the inputs; defaults to the function's input names
    /// (or `X1..Xk`).
    pub input_names: Option<Vec<String>>,
    /// Species names for the outputs; defaults to `Y` or `Y1..Yl`.
    pub output_names: Option<Vec<String>>,
}

impl CompileOptions {
    pub fn with_prefix(prefix: &str) -> Self {
        CompileOptions {
            scope_prefix: prefix.to_string(),
            ..Default::default()
        }
    }

    pub(crate) fn scope(&self, local: &str) -> String {
        join_scope(&self.scope_prefix, local)
    }

    pub(crate) fn inputs_or(&self, fallback: impl FnOnce() -> Vec<String>) -> Vec<String> {
        self.input_names.clone().unwrap_or_else(fallback)
    }

    pub(crate) fn outputs_or_default(&self, l: usize) -> Vec<String> {
        self.output_names.clone().unwrap_or_else(|| default_outputs(l))
    }
}

pub(crate) fn join_scope(a: &str, b: &str) -> String {
    match (a.is_empty(), b.is_empty()) {
        (true, _) => b.to_string(),
        (_, true) => a.to_string(),
        _ => format!("{a}/{b}"),
    }
}

pub(crate) fn default_inputs(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("X{i}")).collect()
}

pub(crate) fn default_outputs(l: usize) -> Vec<String> {
    if l == 1 {
        vec!["Y".into()]
    } else {
        (1..=l).map(|j| format!("Y{j}")).collect()
    }
}

/// Species acting as the yes (`L^1`) and no (`L^0`) catalysts of a decider.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VoterBinding {
    pub yes_species: Vec<SpeciesId>,
    pub no_species: Vec<SpeciesId>,
}

impl VoterBinding {
    pub fn from_voters(voters: &[(SpeciesId, bool)]) -> Self {
        let mut b = VoterBinding::default();
        for &(s, v) in voters {
            if v {
                b.yes_species.push(s);
            } else {
                b.no_species.push(s);
            }
        }
        b
    }

    pub fn flipped(&self) -> Self {
        VoterBinding {
            yes_species: self.no_species.clone(),
            no_species: self.yes_species.clone(),
        }
    }

    pub fn voters(&self) -> Vec<(SpeciesId, bool)> {
        self.yes_species
            .iter()
            .map(|&s| (s, true))
            .chain(self.no_species.iter().map(|&s| (s, false)))
            .collect()
    }
}

/// Shared network under construction plus its initial context.
pub(crate) struct Emitter {
    b: CrnBuilder,
    init: Vec<(SpeciesId, u64)>,
    interface: HashSet<String>,
}

impl Emitter {
    pub fn new() -> Self {
        Emitter {
            b: CrnBuilder::new(),
            init: Vec::new(),
            interface: HashSet::new(),
        }
    }

    /// Registers an input, output or other externally visible species.
    pub fn interface(&mut self, name: &str) -> Result<SpeciesId> {
        if name.contains('/') {
            return Err(CompileError::Invalid(format!(
                "interface name `{name}` may not contain `/`"
            )));
        }
        if self.b.lookup(name).is_some() && !self.interface.contains(name) {
            return Err(CompileError::Collision(name.to_string()));
        }
        self.interface.insert(name.to_string());
        Ok(self.b.species(name)?)
    }

    /// Interns an internal species.
    pub fn sp(&mut self, name: &str) -> Result<SpeciesId> {
        if self.interface.contains(name) {
            return Err(CompileError::Collision(name.to_string()));
        }
        Ok(self.b.species(name)?)
    }

    pub fn rx(&mut self, reactants: &[(SpeciesId, u64)], products: &[(SpeciesId, u64)]) -> Result<()> {
        self.b.push(Reaction::new(reactants, products, 1.0)?);
        Ok(())
    }

    pub fn seed(&mut self, s: SpeciesId, n: u64) {
        if n > 0 {
            self.init.push((s, n));
        }
    }

    pub fn context_total(&self) -> u64 {
        self.init.iter().map(|&(_, n)| n).sum()
    }

    pub fn finish(self) -> (Crn, Configuration) {
        let crn = self.b.build();
        let mut ctx = crn.zero_configuration();
        for (s, n) in self.init {
            ctx.set(s, ctx.get(s) + n);
        }
        (crn, ctx)
    }
}

/// Distributes each input to its consumers. `consumers[i]` is the number of
/// sub-networks reading input `i`; with one consumer the input is used
/// directly, with more a single reaction `X -> X_1 + ... + X_p` splits it.
pub(crate) fn fan_out(
    e: &mut Emitter,
    scope: &str,
    inputs: &[SpeciesId],
    names: &[String],
    consumers: &[usize],
) -> Result<Vec<Vec<SpeciesId>>> {
    let mut out = Vec::with_capacity(inputs.len());
    for ((&x, name), &p) in inputs.iter().zip(names).zip(consumers) {
        match p {
            0 => out.push(Vec::new()),
            1 => out.push(vec![x]),
            _ => {
                let copies = (1..=p)
                    .map(|t| e.sp(&join_scope(scope, &format!("fan/{name}_{t}"))))
                    .collect::<Result<Vec<_>>>()?;
                let products: Vec<_> = copies.iter().map(|&c| (c, 1)).collect();
                e.rx(&[(x, 1)], &products)?;
                out.push(copies);
            }
        }
    }
    Ok(out)
}
