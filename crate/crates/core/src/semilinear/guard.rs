//! Presburger guards: boolean combinations of threshold and modular atoms.

use std::fmt;

use super::SemilinearError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub fn holds(self, lhs: i128, rhs: i128) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "<" => Relation::Lt,
            "<=" => Relation::Le,
            "=" | "==" => Relation::Eq,
            ">=" => Relation::Ge,
            ">" => Relation::Gt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PresburgerAtom {
    /// `sum a_i x_i  rel  constant`
    Threshold {
        coeffs: Vec<i64>,
        rel: Relation,
        constant: i64,
    },
    /// `sum a_i x_i = residue (mod modulus)`
    Mod {
        coeffs: Vec<i64>,
        modulus: u64,
        residue: u64,
    },
}

fn weighted_sum(coeffs: &[i64], x: &[u64]) -> i128 {
    coeffs
        .iter()
        .zip(x)
        .map(|(&a, &v)| a as i128 * v as i128)
        .sum()
}

impl PresburgerAtom {
    pub fn threshold(coeffs: Vec<i64>, rel: Relation, constant: i64) -> Self {
        PresburgerAtom::Threshold {
            coeffs,
            rel,
            constant,
        }
    }

    /// Builds a modular atom, reducing the residue into `[0, modulus)`.
    pub fn modular(coeffs: Vec<i64>, modulus: u64, residue: i64) -> Result<Self, SemilinearError> {
        if modulus < 2 {
            return Err(SemilinearError::Invalid(format!(
                "modulus must be at least 2, got {modulus}"
            )));
        }
        Ok(PresburgerAtom::Mod {
            coeffs,
            modulus,
            residue: residue.rem_euclid(modulus as i64) as u64,
        })
    }

    pub fn coeffs(&self) -> &[i64] {
        match self {
            PresburgerAtom::Threshold { coeffs, .. } | PresburgerAtom::Mod { coeffs, .. } => coeffs,
        }
    }

    pub fn arity(&self) -> usize {
        self.coeffs().len()
    }

    pub fn eval(&self, x: &[u64]) -> bool {
        match self {
            PresburgerAtom::Threshold {
                coeffs,
                rel,
                constant,
            } => rel.holds(weighted_sum(coeffs, x), *constant as i128),
            PresburgerAtom::Mod {
                coeffs,
                modulus,
                residue,
            } => (weighted_sum(coeffs, x) - *residue as i128).rem_euclid(*modulus as i128) == 0,
        }
    }
}

impl fmt::Display for PresburgerAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lin = |coeffs: &[i64]| {
            let terms: Vec<String> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0)
                .map(|(i, &a)| format!("{a}*x{}", i + 1))
                .collect();
            if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(" + ")
            }
        };
        match self {
            PresburgerAtom::Threshold {
                coeffs,
                rel,
                constant,
            } => write!(f, "{} {} {constant}", lin(coeffs), rel.symbol()),
            PresburgerAtom::Mod {
                coeffs,
                modulus,
                residue,
            } => write!(f, "{} = {residue} mod {modulus}", lin(coeffs)),
        }
    }
}

/// Formula tree over atoms. `Not(True)` serves as false.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Guard {
    True,
    Atom(PresburgerAtom),
    Not(Box<Guard>),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    pub fn not(g: Guard) -> Guard {
        Guard::Not(Box::new(g))
    }

    pub fn falsum() -> Guard {
        Guard::not(Guard::True)
    }

    /// Common arity of the atoms, or `None` for an atom-free formula.
    pub fn arity(&self) -> Result<Option<usize>, SemilinearError> {
        let mut k = None;
        let mut bad = None;
        self.visit_atoms(&mut |a| match k {
            None => k = Some(a.arity()),
            Some(m) if m != a.arity() => bad = Some((m, a.arity())),
            _ => {}
        });
        if let Some((expected, got)) = bad {
            return Err(SemilinearError::DimensionMismatch { expected, got });
        }
        Ok(k)
    }

    pub fn visit_atoms(&self, f: &mut impl FnMut(&PresburgerAtom)) {
        match self {
            Guard::True => {}
            Guard::Atom(a) => f(a),
            Guard::Not(g) => g.visit_atoms(f),
            Guard::And(gs) | Guard::Or(gs) => gs.iter().for_each(|g| g.visit_atoms(f)),
        }
    }

    /// Distinct atoms in first-occurrence order.
    pub fn atoms(&self) -> Vec<PresburgerAtom> {
        let mut out: Vec<PresburgerAtom> = Vec::new();
        self.visit_atoms(&mut |a| {
            if !out.contains(a) {
                out.push(a.clone());
            }
        });
        out
    }

    /// Evaluates with atom truth values supplied by `atom_value`.
    pub fn eval_with(&self, atom_value: &mut impl FnMut(&PresburgerAtom) -> bool) -> bool {
        match self {
            Guard::True => true,
            Guard::Atom(a) => atom_value(a),
            Guard::Not(g) => !g.eval_with(atom_value),
            Guard::And(gs) => gs.iter().all(|g| g.eval_with(atom_value)),
            Guard::Or(gs) => gs.iter().any(|g| g.eval_with(atom_value)),
        }
    }

    pub fn eval(&self, x: &[u64]) -> bool {
        self.eval_with(&mut |a| a.eval(x))
    }

    /// Evaluates after checking atom arity against `x`.
    pub fn eval_checked(&self, x: &[u64]) -> Result<bool, SemilinearError> {
        if let Some(k) = self.arity()? {
            if k != x.len() {
                return Err(SemilinearError::DimensionMismatch {
                    expected: k,
                    got: x.len(),
                });
            }
        }
        Ok(self.eval(x))
    }

    /// Constant folding and double-negation removal.
    pub fn simplified(&self) -> Guard {
        match self {
            Guard::True | Guard::Atom(_) => self.clone(),
            Guard::Not(g) => match g.simplified() {
                Guard::Not(inner) => *inner,
                s => Guard::not(s),
            },
            Guard::And(gs) => {
                let mut kept = Vec::new();
                for g in gs {
                    let s = g.simplified();
                    if s == Guard::True {
                        continue;
                    }
                    if s == Guard::falsum() {
                        return Guard::falsum();
                    }
                    if !kept.contains(&s) {
                        kept.push(s);
                    }
                }
                match kept.len() {
                    0 => Guard::True,
                    1 => kept.pop().unwrap(),
                    _ => Guard::And(kept),
                }
            }
            Guard::Or(gs) => {
                let mut kept = Vec::new();
                for g in gs {
                    let s = g.simplified();
                    if s == Guard::True {
                        return Guard::True;
                    }
                    if s == Guard::falsum() {
                        continue;
                    }
                    if !kept.contains(&s) {
                        kept.push(s);
                    }
                }
                match kept.len() {
                    0 => Guard::falsum(),
                    1 => kept.pop().unwrap(),
                    _ => Guard::Or(kept),
                }
            }
        }
    }

    /// `Some(b)` when the formula is constant.
    pub fn constant_value(&self) -> Option<bool> {
        match self.simplified() {
            Guard::True => Some(true),
            g if g == Guard::falsum() => Some(false),
            _ => None,
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::True => f.write_str("true"),
            Guard::Atom(a) => write!(f, "({a})"),
            Guard::Not(g) => write!(f, "not {g}"),
            Guard::And(gs) | Guard::Or(gs) => {
                let op = if matches!(self, Guard::And(_)) { " and " } else { " or " };
                f.write_str("(")?;
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{g}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_evaluation() {
        let lt = PresburgerAtom::threshold(vec![1, -1], Relation::Lt, 0);
        assert!(lt.eval(&[3, 5]));
        assert!(!lt.eval(&[5, 5]));
        let even = PresburgerAtom::modular(vec![1, 1], 2, 0).unwrap();
        assert!(even.eval(&[1, 3]));
        assert!(!even.eval(&[1, 2]));
        let neg = PresburgerAtom::modular(vec![1, -1], 3, -1).unwrap();
        // residue reduced to 2; 1 - 2 = -1 = 2 mod 3
        assert_eq!(neg, PresburgerAtom::Mod { coeffs: vec![1, -1], modulus: 3, residue: 2 });
        assert!(neg.eval(&[1, 2]));
        assert!(PresburgerAtom::modular(vec![1], 1, 0).is_err());
    }

    #[test]
    fn formula_evaluation() {
        assert!(!Guard::not(Guard::True).eval(&[7]));
        let ge = Guard::Atom(PresburgerAtom::threshold(vec![1, -1], Relation::Ge, 0));
        let ge2 = Guard::Atom(PresburgerAtom::threshold(vec![1, -2], Relation::Ge, 0));
        let g = Guard::And(vec![ge.clone(), Guard::not(ge2)]);
        assert!(g.eval(&[3, 2]));
        assert!(!g.eval(&[4, 2]));
        assert!(!g.eval(&[1, 2]));
        assert_eq!(g.atoms().len(), 2);
        assert!(Guard::Or(vec![ge.clone(), Guard::falsum()]).eval(&[1, 0]));
    }

    #[test]
    fn arity_checks() {
        let g = Guard::And(vec![
            Guard::Atom(PresburgerAtom::threshold(vec![1], Relation::Ge, 0)),
            Guard::Atom(PresburgerAtom::threshold(vec![1, 1], Relation::Ge, 0)),
        ]);
        assert!(g.arity().is_err());
        assert_eq!(Guard::True.arity().unwrap(), None);
        let a = Guard::Atom(PresburgerAtom::threshold(vec![1], Relation::Ge, 0));
        assert!(a.eval_checked(&[1, 2]).is_err());
    }

    #[test]
    fn simplification() {
        let a = Guard::Atom(PresburgerAtom::threshold(vec![1], Relation::Ge, 2));
        assert_eq!(Guard::And(vec![Guard::True, Guard::not(a.clone())]).simplified(), Guard::not(a.clone()));
        assert_eq!(Guard::not(Guard::not(a.clone())).simplified(), a);
        assert_eq!(Guard::Or(vec![a.clone(), Guard::True]).constant_value(), Some(true));
        assert_eq!(Guard::And(vec![a, Guard::falsum()]).constant_value(), Some(false));
    }
}
