//! JSON documents: function specs, guard files and linear-graph-set files.
//!
//! Guards are written as `true`, `false`,
//! `{"atom":"threshold","coeffs":[1,-1],"rel":">=","const":0}`,
//! `{"atom":"mod","coeffs":[1],"m":2,"r":0}`, `{"and":[..]}`, `{"or":[..]}`
//! or `{"not":..}`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::affine::{AffinePiece, PiecewiseAffineFn};
use super::guard::{Guard, PresburgerAtom, Relation};
use super::{LinearSet, SemilinearError, SemilinearSet};

fn bad(msg: impl Into<String>) -> SemilinearError {
    SemilinearError::Json(msg.into())
}

fn int_list(v: &Value, what: &str) -> Result<Vec<i64>, SemilinearError> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what}: expected an array of integers")))?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| bad(format!("{what}: expected integers"))))
        .collect()
}

fn nat_list(v: &Value, what: &str) -> Result<Vec<u64>, SemilinearError> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what}: expected an array of naturals")))?
        .iter()
        .map(|x| x.as_u64().ok_or_else(|| bad(format!("{what}: expected naturals"))))
        .collect()
}

pub fn guard_from_value(v: &Value) -> Result<Guard, SemilinearError> {
    match v {
        Value::Bool(true) => return Ok(Guard::True),
        Value::Bool(false) => return Ok(Guard::falsum()),
        Value::Object(_) => {}
        _ => return Err(bad(format!("guard must be a boolean or object, got {v}"))),
    }
    let obj = v.as_object().unwrap();
    if let Some(kind) = obj.get("atom") {
        let coeffs = int_list(obj.get("coeffs").ok_or_else(|| bad("atom without coeffs"))?, "coeffs")?;
        return match kind.as_str() {
            Some("threshold") => {
                let rel = obj
                    .get("rel")
                    .and_then(Value::as_str)
                    .and_then(Relation::parse)
                    .ok_or_else(|| bad("threshold atom needs rel in <, <=, =, >=, >"))?;
                let constant = obj
                    .get("const")
                    .and_then(Value::as_i64)
                    .ok_or_else(|| bad("threshold atom needs an integer const"))?;
                Ok(Guard::Atom(PresburgerAtom::threshold(coeffs, rel, constant)))
            }
            Some("mod") => {
                let m = obj
                    .get("m")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| bad("mod atom needs a natural m"))?;
                let r = obj
                    .get("r")
                    .and_then(Value::as_i64)
                    .ok_or_else(|| bad("mod atom needs an integer r"))?;
                Ok(Guard::Atom(PresburgerAtom::modular(coeffs, m, r)?))
            }
            _ => Err(bad(format!("unknown atom kind {kind}"))),
        };
    }
    if let Some(gs) = obj.get("and").or_else(|| obj.get("or")) {
        let parts = gs
            .as_array()
            .ok_or_else(|| bad("and/or expects an array"))?
            .iter()
            .map(guard_from_value)
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(if obj.contains_key("and") {
            Guard::And(parts)
        } else {
            Guard::Or(parts)
        });
    }
    if let Some(g) = obj.get("not") {
        return Ok(Guard::not(guard_from_value(g)?));
    }
    Err(bad(format!("unrecognized guard {v}")))
}

pub fn guard_to_value(g: &Guard) -> Value {
    match g {
        Guard::True => Value::Bool(true),
        Guard::Not(inner) if **inner == Guard::True => Value::Bool(false),
        Guard::Atom(PresburgerAtom::Threshold {
            coeffs,
            rel,
            constant,
        }) => json!({"atom": "threshold", "coeffs": coeffs, "rel": rel.symbol(), "const": constant}),
        Guard::Atom(PresburgerAtom::Mod {
            coeffs,
            modulus,
            residue,
        }) => json!({"atom": "mod", "coeffs": coeffs, "m": modulus, "r": residue}),
        Guard::Not(inner) => json!({ "not": guard_to_value(inner) }),
        Guard::And(gs) => json!({ "and": gs.iter().map(guard_to_value).collect::<Vec<_>>() }),
        Guard::Or(gs) => json!({ "or": gs.iter().map(guard_to_value).collect::<Vec<_>>() }),
    }
}

fn piece_from_value(v: &Value, k: usize, l: usize) -> Result<AffinePiece, SemilinearError> {
    let obj = v.as_object().ok_or_else(|| bad("piece must be an object"))?;
    let guard = match obj.get("guard") {
        Some(g) => guard_from_value(g)?,
        None => Guard::True,
    };
    let num = obj
        .get("num")
        .ok_or_else(|| bad("piece without num"))?
        .as_array()
        .ok_or_else(|| bad("num must be an array of rows"))?
        .iter()
        .map(|r| int_list(r, "num"))
        .collect::<Result<Vec<_>, _>>()?;
    let den = match obj.get("den") {
        Some(d) => nat_list(d, "den")?,
        None => vec![1; l],
    };
    let b = match obj.get("b") {
        Some(d) => nat_list(d, "b")?,
        None => vec![0; l],
    };
    let c = match obj.get("c") {
        Some(d) => nat_list(d, "c")?,
        None => vec![0; k],
    };
    AffinePiece::new(num, den, b, c, guard)
}

/// Parses a function-spec document.
pub fn parse_fn_spec(text: &str) -> Result<PiecewiseAffineFn, SemilinearError> {
    let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| bad("function spec must be an object"))?;
    let inputs: Vec<String> = obj
        .get("inputs")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing inputs"))?
        .iter()
        .map(|s| s.as_str().map(str::to_string).ok_or_else(|| bad("input names must be strings")))
        .collect::<Result<_, _>>()?;
    let l = obj
        .get("outputs")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("missing outputs count"))? as usize;
    let pieces = obj
        .get("pieces")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing pieces"))?
        .iter()
        .map(|p| piece_from_value(p, inputs.len(), l))
        .collect::<Result<Vec<_>, _>>()?;
    let f = PiecewiseAffineFn::new(inputs, pieces)?;
    if f.outputs() != l {
        return Err(SemilinearError::DimensionMismatch {
            expected: l,
            got: f.outputs(),
        });
    }
    Ok(f)
}

pub fn fn_spec_to_json(f: &PiecewiseAffineFn) -> String {
    let pieces: Vec<Value> = f
        .pieces
        .iter()
        .map(|p| {
            let mut m = Map::new();
            m.insert("guard".into(), guard_to_value(&p.guard));
            m.insert("num".into(), json!(p.num));
            m.insert("den".into(), json!(p.den));
            m.insert("b".into(), json!(p.b));
            m.insert("c".into(), json!(p.c));
            Value::Object(m)
        })
        .collect();
    let doc = json!({ "inputs": f.inputs, "outputs": f.outputs(), "pieces": pieces });
    let mut s = serde_json::to_string_pretty(&doc).expect("json value serializes");
    s.push('\n');
    s
}

/// A predicate over named inputs, as consumed by `verify-pred`.
#[derive(Debug, Clone, PartialEq)]
pub struct GuardFile {
    pub inputs: Vec<String>,
    pub guard: Guard,
}

impl GuardFile {
    pub fn from_json(text: &str) -> Result<Self, SemilinearError> {
        let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let inputs: Vec<String> = v
            .get("inputs")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("guard file needs inputs"))?
            .iter()
            .map(|s| s.as_str().map(str::to_string).ok_or_else(|| bad("input names must be strings")))
            .collect::<Result<_, _>>()?;
        let guard = guard_from_value(v.get("guard").ok_or_else(|| bad("guard file needs guard"))?)?;
        if let Some(k) = guard.arity()? {
            if k != inputs.len() {
                return Err(SemilinearError::DimensionMismatch {
                    expected: inputs.len(),
                    got: k,
                });
            }
        }
        Ok(GuardFile { inputs, guard })
    }

    pub fn to_json(&self) -> String {
        let doc = json!({ "inputs": self.inputs, "guard": guard_to_value(&self.guard) });
        let mut s = serde_json::to_string_pretty(&doc).expect("json value serializes");
        s.push('\n');
        s
    }
}

/// A list of linear sets over `N^(dim_in + dim_out)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSets {
    pub dim_in: usize,
    pub dim_out: usize,
    pub sets: Vec<LinearSet>,
}

impl GraphSets {
    pub fn from_json(text: &str) -> Result<Self, SemilinearError> {
        let g: GraphSets = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), SemilinearError> {
        let d = self.dim_in + self.dim_out;
        for s in &self.sets {
            LinearSet::new(s.base.clone(), s.periods.clone())?;
            if s.dim() != d {
                return Err(SemilinearError::DimensionMismatch {
                    expected: d,
                    got: s.dim(),
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("graph sets serialize");
        s.push('\n');
        s
    }

    pub fn union(&self) -> Result<SemilinearSet, SemilinearError> {
        SemilinearSet::new(self.sets.clone())
    }

    /// Inputs of norm at most `max_norm` outside every set's projection onto
    /// the input coordinates, i.e. where the graph defines no output.
    pub fn uncovered(&self, max_norm: u64) -> Result<Vec<Vec<u64>>, SemilinearError> {
        let k = self.dim_in;
        let domains = self
            .sets
            .iter()
            .map(|s| LinearSet::new(s.base[..k].to_vec(), s.periods.iter().map(|p| p[..k].to_vec()).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Vec::new();
        for x in super::vectors_up_to_norm(k, max_norm) {
            let mut hit = false;
            for d in &domains {
                if d.contains(&x)? {
                    hit = true;
                    break;
                }
            }
            if !hit {
                out.push(x);
            }
        }
        Ok(out)
    }
}
