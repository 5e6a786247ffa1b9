//! Linear and semilinear sets, Presburger guards, piecewise-affine functions
//! and the set-level transforms used by the compiler.

mod affine;
mod extract;
mod files;
mod guard;
pub mod linalg;

pub use affine::{disambiguate_guards, eval_fn, eval_piece, hat_fn, AffinePiece, PiecewiseAffineFn};
pub use extract::{extract_affine, hat_transform};
pub use files::{fn_spec_to_json, guard_from_value, guard_to_value, parse_fn_spec, GraphSets, GuardFile};
pub use guard::{Guard, PresburgerAtom, Relation};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemilinearError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no piece's guard holds at {0:?}")]
    NotTotal(Vec<u64>),
    #[error("piece {piece} yields a non-integral or negative value at {x:?}")]
    IllFormed { piece: usize, x: Vec<u64> },
    #[error("guard holds at {x:?} but input {coord} is below its offset {offset}")]
    DomainViolation { x: Vec<u64>, coord: usize, offset: u64 },
    #[error("set is not the graph of a function: {first:?} and {second:?} share inputs but differ in output {output}")]
    NotAGraph {
        output: usize,
        first: Vec<u64>,
        second: Vec<u64>,
    },
    #[error("singular system (rank {rank})")]
    Singular { rank: usize },
    #[error("invalid: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(String),
}

/// `{ base + sum n_j * periods[j] : n_j in N }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSet {
    pub base: Vec<u64>,
    pub periods: Vec<Vec<u64>>,
}

impl LinearSet {
    pub fn new(base: Vec<u64>, periods: Vec<Vec<u64>>) -> Result<Self, SemilinearError> {
        let d = base.len();
        if let Some(p) = periods.iter().find(|p| p.len() != d) {
            return Err(SemilinearError::DimensionMismatch {
                expected: d,
                got: p.len(),
            });
        }
        Ok(LinearSet { base, periods })
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    /// Membership by depth-first search over period coefficients. Each
    /// coefficient is bounded by the residual in any coordinate where the
    /// period is positive; all-zero periods are skipped.
    pub fn contains(&self, v: &[u64]) -> Result<bool, SemilinearError> {
        if v.len() != self.dim() {
            return Err(SemilinearError::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        let mut residual = Vec::with_capacity(v.len());
        for (&x, &b) in v.iter().zip(&self.base) {
            if x < b {
                return Ok(false);
            }
            residual.push(x - b);
        }
        let periods: Vec<&Vec<u64>> = self
            .periods
            .iter()
            .filter(|p| p.iter().any(|&x| x > 0))
            .collect();
        Ok(search(&periods, &mut residual))
    }
}

fn search(periods: &[&Vec<u64>], residual: &mut [u64]) -> bool {
    let Some((first, rest)) = periods.split_first() else {
        return residual.iter().all(|&x| x == 0);
    };
    let max_n = first
        .iter()
        .zip(residual.iter())
        .filter(|(&u, _)| u > 0)
        .map(|(&u, &r)| r / u)
        .min()
        .expect("nonzero period");
    for n in 0..=max_n {
        if n > 0 {
            for (r, &u) in residual.iter_mut().zip(first.iter()) {
                *r -= u;
            }
        }
        if search(rest, residual) {
            for (r, &u) in residual.iter_mut().zip(first.iter()) {
                *r += u * n;
            }
            return true;
        }
    }
    for (r, &u) in residual.iter_mut().zip(first.iter()) {
        *r += u * max_n;
    }
    false
}

pub fn linear_contains(l: &LinearSet, v: &[u64]) -> Result<bool, SemilinearError> {
    l.contains(v)
}

/// A finite nonempty union of linear sets of equal dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemilinearSet {
    pub components: Vec<LinearSet>,
}

impl SemilinearSet {
    pub fn new(components: Vec<LinearSet>) -> Result<Self, SemilinearError> {
        let Some(first) = components.first() else {
            return Err(SemilinearError::Invalid("empty union".into()));
        };
        let d = first.dim();
        if let Some(c) = components.iter().find(|c| c.dim() != d) {
            return Err(SemilinearError::DimensionMismatch {
                expected: d,
                got: c.dim(),
            });
        }
        Ok(SemilinearSet { components })
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool, SemilinearError> {
        for c in &self.components {
            if c.contains(v)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

pub fn semilinear_contains(s: &SemilinearSet, v: &[u64]) -> Result<bool, SemilinearError> {
    s.contains(v)
}

/// All vectors of length `k` with entries summing to at most `max_norm`, in
/// lexicographic order.
pub fn vectors_up_to_norm(k: usize, max_norm: u64) -> Vec<Vec<u64>> {
    fn rec(k: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(k, left - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, max_norm, &mut Vec::with_capacity(k), &mut out);
    out
}

/// All vectors of length `k` with every entry at most `max_entry`.
pub fn vectors_in_box(k: usize, max_entry: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max_entry).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn three_periods() -> LinearSet {
        LinearSet::new(vec![0, 0, 0], vec![vec![1, 1, 1], vec![2, 0, 1], vec![0, 2, 1]]).unwrap()
    }

    #[test]
    fn line_membership() {
        let l = LinearSet::new(vec![0, 0], vec![vec![1, 2]]).unwrap();
        assert!(l.contains(&[3, 6]).unwrap());
        assert!(!l.contains(&[3, 5]).unwrap());
    }

    #[test]
    fn three_period_membership() {
        let l = three_periods();
        assert!(l.contains(&[2, 2, 2]).unwrap());
        assert!(!l.contains(&[1, 0, 1]).unwrap());
        assert!(l.contains(&[0, 0, 0]).unwrap());
        assert!(l.contains(&[2, 0, 1]).unwrap());
        assert!(l.contains(&[3, 1, 2]).unwrap());
        assert!(l.contains(&[2, 0, 1]).unwrap());
        assert!(l.contains(&[2, 4, 3]).unwrap());
        assert!(!l.contains(&[1, 0, 0]).unwrap());
        assert!(l.contains(&[1, 1]).is_err());
    }

    #[test]
    fn union_membership() {
        let a = LinearSet::new(vec![0, 0], vec![vec![1, 0]]).unwrap();
        let b = LinearSet::new(vec![0, 1], vec![vec![0, 1]]).unwrap();
        let s = SemilinearSet::new(vec![a, b]).unwrap();
        assert!(s.contains(&[0, 5]).unwrap());
        assert!(s.contains(&[4, 0]).unwrap());
        assert!(!s.contains(&[1, 1]).unwrap());

        let single = SemilinearSet::new(vec![LinearSet::new(vec![2, 3], vec![]).unwrap()]).unwrap();
        assert!(single.contains(&[2, 3]).unwrap());

        let high = SemilinearSet::new(vec![
            LinearSet::new(vec![3, 3], vec![vec![1, 1]]).unwrap(),
            LinearSet::new(vec![5, 0], vec![vec![0, 1]]).unwrap(),
        ])
        .unwrap();
        assert!(!high.contains(&[2, 9]).unwrap());
        assert!(SemilinearSet::new(vec![]).is_err());
    }

    #[test]
    fn zero_periods_are_skipped() {
        let l = LinearSet::new(vec![1], vec![vec![0], vec![2]]).unwrap();
        assert!(l.contains(&[5]).unwrap());
        assert!(!l.contains(&[4]).unwrap());
    }

    #[test]
    fn enumeration_helpers() {
        assert_eq!(vectors_up_to_norm(2, 1), vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(vectors_up_to_norm(3, 4).len(), 35);
        assert_eq!(vectors_in_box(2, 2).len(), 9);
    }

    fn small_set() -> impl Strategy<Value = LinearSet> {
        (1usize..=4, 0usize..=3).prop_flat_map(|(d, p)| {
            (
                prop::collection::vec(0u64..=3, d),
                prop::collection::vec(prop::collection::vec(0u64..=3, d), p),
            )
                .prop_map(|(b, ps)| LinearSet::new(b, ps).unwrap())
        })
    }

    proptest! {
        // Direct enumeration of base + sum n_j u_j with every n_j <= 6.
        #[test]
        fn membership_agrees_with_enumeration(l in small_set()) {
            let d = l.dim();
            let p = l.periods.len();
            let mut reached = std::collections::HashSet::new();
            let mut coeffs = vec![0u64; p];
            loop {
                let mut v = l.base.clone();
                for (n, u) in coeffs.iter().zip(&l.periods) {
                    for (x, y) in v.iter_mut().zip(u) {
                        *x += n * y;
                    }
                }
                reached.insert(v);
                let mut i = 0;
                while i < p && coeffs[i] == 6 {
                    coeffs[i] = 0;
                    i += 1;
                }
                if i == p { break; }
                coeffs[i] += 1;
            }
            // Within this box every member needs coefficients <= 6 whenever
            // each nonzero period has an entry >= 1, so enumeration is exact.
            for v in vectors_in_box(d, 6) {
                prop_assert_eq!(l.contains(&v).unwrap(), reached.contains(&v));
            }
        }
    }
}
