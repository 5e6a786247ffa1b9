//! The line-oriented `.crn` text format and the JSON sidecar manifest.
//!
//! ```text
//! input X1 X2
//! output Y
//! voter L1=yes L0=no
//! init  L=1 Yp=3
//! rxn 2 X -> Y
//! rxn X1 + B -> X1 + Y
//! rxn A -> 0
//! rxn X -> 2 Y  @ k=1
//! ```
//!
//! Species are declared by use. Serialization is canonical: sections in the
//! order above, reactions in declaration order, single spaces between tokens.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crn::{
    Configuration, CountBound, Crc, Crd, Crn, CrnBuilder, CrnError, Reaction, SpeciesId,
};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Crn(#[from] CrnError),
    #[error("manifest: {0}")]
    Manifest(String),
}

fn perr(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Everything a `.crn` file can say: a network plus optional interface roles.
#[derive(Debug, Clone)]
pub struct CrnFile {
    pub crn: Crn,
    pub inputs: Vec<SpeciesId>,
    pub outputs: Vec<SpeciesId>,
    pub voters: Vec<(SpeciesId, bool)>,
    pub init: Configuration,
}

impl CrnFile {
    pub fn is_decider(&self) -> bool {
        !self.voters.is_empty()
    }

    pub fn into_crc(self) -> Result<Crc, FormatError> {
        if self.is_decider() {
            return Err(FormatError::Manifest(
                "file declares voters; expected a computer".into(),
            ));
        }
        Ok(Crc::new(self.crn, self.inputs, self.outputs, self.init)?)
    }

    pub fn into_crd(self) -> Result<Crd, FormatError> {
        if !self.outputs.is_empty() {
            return Err(FormatError::Manifest(
                "file declares outputs; expected a decider".into(),
            ));
        }
        Ok(Crd::new(self.crn, self.inputs, self.voters, self.init)?)
    }

    pub fn from_crc(crc: &Crc) -> Self {
        CrnFile {
            crn: crc.crn().clone(),
            inputs: crc.inputs().to_vec(),
            outputs: crc.outputs().to_vec(),
            voters: vec![],
            init: crc.context().clone(),
        }
    }

    pub fn from_crd(crd: &Crd) -> Self {
        CrnFile {
            crn: crd.crn().clone(),
            inputs: crd.inputs().to_vec(),
            outputs: vec![],
            voters: crd.voters().to_vec(),
            init: crd.context().clone(),
        }
    }

    /// Canonical text form.
    pub fn serialize(&self) -> String {
        let crn = &self.crn;
        let mut out = String::new();
        if !self.inputs.is_empty() {
            out.push_str("input");
            for &s in &self.inputs {
                out.push(' ');
                out.push_str(crn.name(s));
            }
            out.push('\n');
        }
        if !self.outputs.is_empty() {
            out.push_str("output");
            for &s in &self.outputs {
                out.push(' ');
                out.push_str(crn.name(s));
            }
            out.push('\n');
        }
        if !self.voters.is_empty() {
            out.push_str("voter");
            for &(s, b) in &self.voters {
                out.push_str(&format!(" {}={}", crn.name(s), if b { "yes" } else { "no" }));
            }
            out.push('\n');
        }
        let init: Vec<_> = self
            .init
            .counts()
            .iter()
            .enumerate()
            .filter(|&(_, &n)| n > 0)
            .collect();
        if !init.is_empty() {
            out.push_str("init");
            for (s, n) in init {
                out.push_str(&format!(" {}={}", crn.name(s), n));
            }
            out.push('\n');
        }
        for r in crn.reactions() {
            out.push_str("rxn ");
            out.push_str(&crn.display_reaction(r));
            if r.rate() != 1.0 {
                out.push_str(&format!(" @ k={}", r.rate()));
            }
            out.push('\n');
        }
        out
    }
}

pub fn serialize_crc(crc: &Crc) -> String {
    CrnFile::from_crc(crc).serialize()
}

pub fn serialize_crd(crd: &Crd) -> String {
    CrnFile::from_crd(crd).serialize()
}

fn parse_side(
    b: &mut CrnBuilder,
    text: &str,
    line: usize,
) -> Result<Vec<(SpeciesId, u64)>, FormatError> {
    let text = text.trim();
    if text == "0" || text.is_empty() {
        if text.is_empty() {
            return Err(perr(line, "empty reaction side (use `0`)"));
        }
        return Ok(vec![]);
    }
    let mut side = Vec::new();
    for term in text.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(perr(line, "dangling `+`"));
        }
        let digits: String = term.chars().take_while(|c| c.is_ascii_digit()).collect();
        let rest = term[digits.len()..].trim();
        let coeff = if digits.is_empty() {
            1
        } else {
            digits
                .parse::<u64>()
                .map_err(|e| perr(line, format!("bad coefficient: {e}")))?
        };
        if rest.is_empty() {
            return Err(perr(line, format!("missing species in `{term}`")));
        }
        if rest.contains(char::is_whitespace) {
            return Err(perr(line, format!("malformed term `{term}`")));
        }
        let s = b
            .species(rest)
            .map_err(|e| perr(line, e.to_string()))?;
        side.push((s, coeff));
    }
    Ok(side)
}

fn parse_assignment(tok: &str, line: usize) -> Result<(&str, &str), FormatError> {
    tok.split_once('=')
        .ok_or_else(|| perr(line, format!("expected NAME=VALUE, got `{tok}`")))
}

/// Parses a `.crn` document.
pub fn parse_crn(text: &str) -> Result<CrnFile, FormatError> {
    let mut b = CrnBuilder::new();
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut voters: Vec<(SpeciesId, bool)> = Vec::new();
    let mut init: Vec<(SpeciesId, u64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (kw, rest) = match content.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (content, ""),
        };
        match kw {
            "input" | "output" => {
                for name in rest.split_whitespace() {
                    let s = b.species(name).map_err(|e| perr(line, e.to_string()))?;
                    let list = if kw == "input" { &mut inputs } else { &mut outputs };
                    if list.contains(&s) {
                        return Err(perr(line, format!("`{name}` listed twice")));
                    }
                    list.push(s);
                }
            }
            "voter" => {
                for tok in rest.split_whitespace() {
                    let (name, v) = parse_assignment(tok, line)?;
                    let vote = match v {
                        "yes" | "1" => true,
                        "no" | "0" => false,
                        _ => return Err(perr(line, format!("bad vote `{v}`"))),
                    };
                    let s = b.species(name).map_err(|e| perr(line, e.to_string()))?;
                    voters.push((s, vote));
                }
            }
            "init" => {
                for tok in rest.split_whitespace() {
                    let (name, v) = parse_assignment(tok, line)?;
                    let n = v
                        .parse::<u64>()
                        .map_err(|e| perr(line, format!("bad count `{v}`: {e}")))?;
                    let s = b.species(name).map_err(|e| perr(line, e.to_string()))?;
                    init.push((s, n));
                }
            }
            "rxn" => {
                let (body, rate) = match rest.split_once('@') {
                    Some((body, r)) => {
                        let (k, v) = parse_assignment(r.trim(), line)?;
                        if k.trim() != "k" {
                            return Err(perr(line, format!("unknown reaction attribute `{k}`")));
                        }
                        let k: f64 = v
                            .trim()
                            .parse()
                            .map_err(|e| perr(line, format!("bad rate `{v}`: {e}")))?;
                        (body, k)
                    }
                    None => (rest, 1.0),
                };
                let (lhs, rhs) = body
                    .split_once("->")
                    .ok_or_else(|| perr(line, "reaction needs `->`"))?;
                let r = parse_side(&mut b, lhs, line)?;
                let p = parse_side(&mut b, rhs, line)?;
                let rx = Reaction::new(&r, &p, rate).map_err(|e| perr(line, e.to_string()))?;
                b.push(rx);
            }
            other => return Err(perr(line, format!("unknown keyword `{other}`"))),
        }
    }
    let crn = b.build();
    let mut ctx = crn.zero_configuration();
    for (s, n) in init {
        ctx.set(s, n);
    }
    Ok(CrnFile {
        crn,
        inputs,
        outputs,
        voters,
        init: ctx,
    })
}

/// Sidecar describing the interface roles of an emitted network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// `crc` or `crd`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    pub inputs: Vec<String>,
    #[serde(default)]
    pub outputs: Vec<String>,
    #[serde(default)]
    pub voters: Vec<VoterRole>,
    #[serde(default)]
    pub count_bound: Option<CountBound>,
    pub bounded: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fanout_width: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoterRole {
    pub species: String,
    pub vote: bool,
}

impl Manifest {
    pub fn for_crc(crc: &Crc, backend: Option<&str>, fanout_width: Option<usize>) -> Self {
        let crn = crc.crn();
        Manifest {
            kind: "crc".into(),
            backend: backend.map(str::to_string),
            inputs: crc.inputs().iter().map(|&s| crn.name(s).to_string()).collect(),
            outputs: crc.outputs().iter().map(|&s| crn.name(s).to_string()).collect(),
            voters: vec![],
            count_bound: crc.count_bound(),
            bounded: crc.is_bounded(),
            fanout_width,
        }
    }

    pub fn for_crd(crd: &Crd, backend: Option<&str>) -> Self {
        let crn = crd.crn();
        Manifest {
            kind: "crd".into(),
            backend: backend.map(str::to_string),
            inputs: crd.inputs().iter().map(|&s| crn.name(s).to_string()).collect(),
            outputs: vec![],
            voters: crd
                .voters()
                .iter()
                .map(|&(s, vote)| VoterRole {
                    species: crn.name(s).to_string(),
                    vote,
                })
                .collect(),
            count_bound: None,
            bounded: true,
            fanout_width: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        serde_json::from_str(text).map_err(|e| FormatError::Manifest(e.to_string()))
    }

    /// Applies the manifest's bound and boundedness flag to a parsed computer.
    pub fn apply_to(&self, crc: Crc) -> Crc {
        crc.with_count_bound(self.count_bound)
            .with_bounded(self.bounded)
    }
}

/// `out.crn` -> `out.manifest.json`.
pub fn manifest_path(crn_path: &Path) -> PathBuf {
    crn_path.with_extension("manifest.json")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# a comment
input X1 X2
output Y
init  L=1 Yp=3
rxn 2 X1 -> Y
rxn X1 + B -> X1 + Y   # catalytic
rxn A -> 0
rxn X2 -> 2 Y  @ k=2.5
";

    #[test]
    fn parses_sample() {
        let f = parse_crn(SAMPLE).unwrap();
        let crn = &f.crn;
        assert_eq!(f.inputs.len(), 2);
        assert_eq!(crn.name(f.outputs[0]), "Y");
        assert_eq!(f.init.get(crn.id("L").unwrap()), 1);
        assert_eq!(f.init.get(crn.id("Yp").unwrap()), 3);
        assert_eq!(crn.reactions().len(), 4);
        assert_eq!(crn.display_reaction(&crn.reactions()[1]), "X1 + B -> X1 + Y");
        assert!(crn.reactions()[2].products().is_empty());
        assert_eq!(crn.reactions()[3].rate(), 2.5);
    }

    #[test]
    fn canonical_serialization() {
        let f = parse_crn(SAMPLE).unwrap();
        let text = f.serialize();
        assert_eq!(
            text,
            "input X1 X2\noutput Y\ninit L=1 Yp=3\nrxn 2 X1 -> Y\nrxn X1 + B -> X1 + Y\nrxn A -> 0\nrxn X2 -> 2 Y @ k=2.5\n"
        );
        let again = parse_crn(&text).unwrap();
        assert!(again.crn.structurally_eq(&f.crn));
        assert_eq!(again.serialize(), text);
    }

    #[test]
    fn voters_round_trip() {
        let text = "input X\nvoter L1=yes L0=no\ninit L1=1\nrxn X + L1 -> L0\n";
        let f = parse_crn(text).unwrap();
        let crd = f.into_crd().unwrap();
        assert_eq!(serialize_crd(&crd), text);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_crn("input X\nrxn X => Y\n").unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 2, .. }));
        assert!(parse_crn("rxn _bad -> Y").is_err());
        assert!(parse_crn("frobnicate X").is_err());
        assert!(parse_crn("rxn X -> ").is_err());
        assert!(parse_crn("rxn X -> Y @ k=0").is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let f = parse_crn("input X\noutput Y\nrxn 2 X -> Y\n").unwrap();
        let crc = f.into_crc().unwrap().with_count_bound(Some(CountBound { c0: 0, c1: 1 }));
        let m = Manifest::for_crc(&crc, Some("fast"), Some(1));
        let back = Manifest::from_json(&m.to_json()).unwrap();
        assert_eq!(m, back);
        assert_eq!(
            manifest_path(Path::new("out/net.crn")),
            PathBuf::from("out/net.manifest.json")
        );
    }
}
