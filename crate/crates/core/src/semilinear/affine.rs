//! Affine partial functions in integer form
//! `y_j = b_j + (1/d_j) * sum_i n_ij (x_i - c_i)` and ordered piecewise
//! combinations of them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::guard::Guard;
use super::SemilinearError;

/// One affine piece. `num[j][i]` is the coefficient of input `i` in output `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePiece {
    pub num: Vec<Vec<i64>>,
    pub den: Vec<u64>,
    pub b: Vec<u64>,
    pub c: Vec<u64>,
    pub guard: Guard,
}

impl AffinePiece {
    pub fn new(
        num: Vec<Vec<i64>>,
        den: Vec<u64>,
        b: Vec<u64>,
        c: Vec<u64>,
        guard: Guard,
    ) -> Result<Self, SemilinearError> {
        let p = AffinePiece {
            num,
            den,
            b,
            c,
            guard,
        };
        p.validate()?;
        Ok(p)
    }

    /// A piece with zero offsets, unit denominators and the given coefficients.
    pub fn linear(num: Vec<Vec<i64>>, guard: Guard) -> Result<Self, SemilinearError> {
        let l = num.len();
        let k = num.first().map_or(0, Vec::len);
        Self::new(num, vec![1; l], vec![0; l], vec![0; k], guard)
    }

    pub fn validate(&self) -> Result<(), SemilinearError> {
        let l = self.num.len();
        let k = self.c.len();
        if l == 0 {
            return Err(SemilinearError::Invalid("piece has no outputs".into()));
        }
        for row in &self.num {
            if row.len() != k {
                return Err(SemilinearError::DimensionMismatch {
                    expected: k,
                    got: row.len(),
                });
            }
        }
        for v in [self.den.len(), self.b.len()] {
            if v != l {
                return Err(SemilinearError::DimensionMismatch { expected: l, got: v });
            }
        }
        if self.den.contains(&0) {
            return Err(SemilinearError::Invalid("denominator must be >= 1".into()));
        }
        if let Some(a) = self.guard.arity()? {
            if a != k {
                return Err(SemilinearError::DimensionMismatch { expected: k, got: a });
            }
        }
        Ok(())
    }

    pub fn inputs(&self) -> usize {
        self.c.len()
    }

    pub fn outputs(&self) -> usize {
        self.num.len()
    }

    /// Exact rational value, or `None` when the guard does not hold.
    pub fn eval(&self, x: &[u64]) -> Result<Option<Vec<BigRational>>, SemilinearError> {
        if x.len() != self.inputs() {
            return Err(SemilinearError::DimensionMismatch {
                expected: self.inputs(),
                got: x.len(),
            });
        }
        if !self.guard.eval(x) {
            return Ok(None);
        }
        Ok(Some(self.eval_unguarded(x)?))
    }

    /// Value ignoring the guard; still requires `x_i >= c_i`.
    pub fn eval_unguarded(&self, x: &[u64]) -> Result<Vec<BigRational>, SemilinearError> {
        for (i, (&xi, &ci)) in x.iter().zip(&self.c).enumerate() {
            if xi < ci {
                return Err(SemilinearError::DomainViolation {
                    x: x.to_vec(),
                    coord: i,
                    offset: ci,
                });
            }
        }
        Ok(self
            .num
            .iter()
            .enumerate()
            .map(|(j, row)| {
                let sum: BigInt = row
                    .iter()
                    .zip(x.iter().zip(&self.c))
                    .map(|(&n, (&xi, &ci))| BigInt::from(n) * BigInt::from(xi - ci))
                    .sum();
                BigRational::from_integer(BigInt::from(self.b[j]))
                    + BigRational::new(sum, BigInt::from(self.den[j]))
            })
            .collect())
    }

    /// Value as naturals, if integral and nonnegative.
    pub fn eval_natural(&self, x: &[u64]) -> Result<Option<Vec<u64>>, SemilinearError> {
        let vals = self.eval_unguarded(x)?;
        Ok(vals
            .iter()
            .map(|v| {
                if v.is_integer() && !v.is_negative() {
                    u64::try_from(v.to_integer()).ok()
                } else {
                    None
                }
            })
            .collect())
    }
}

pub fn eval_piece(p: &AffinePiece, x: &[u64]) -> Result<Option<Vec<BigRational>>, SemilinearError> {
    p.eval(x)
}

/// Ordered list of pieces; the first piece whose guard holds decides.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseAffineFn {
    pub inputs: Vec<String>,
    pub pieces: Vec<AffinePiece>,
}

impl PiecewiseAffineFn {
    pub fn new(inputs: Vec<String>, pieces: Vec<AffinePiece>) -> Result<Self, SemilinearError> {
        let f = PiecewiseAffineFn { inputs, pieces };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), SemilinearError> {
        let Some(first) = self.pieces.first() else {
            return Err(SemilinearError::Invalid("function has no pieces".into()));
        };
        let (k, l) = (first.inputs(), first.outputs());
        if k != self.inputs.len() {
            return Err(SemilinearError::DimensionMismatch {
                expected: self.inputs.len(),
                got: k,
            });
        }
        for p in &self.pieces {
            p.validate()?;
            if p.inputs() != k || p.outputs() != l {
                return Err(SemilinearError::Invalid(
                    "pieces disagree on input/output arity".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    pub fn outputs(&self) -> usize {
        self.pieces[0].outputs()
    }

    /// Index of the first piece whose guard holds.
    pub fn selected_piece(&self, x: &[u64]) -> Option<usize> {
        self.pieces.iter().position(|p| p.guard.eval(x))
    }

    /// Reference evaluation: value of the first piece whose guard holds.
    pub fn eval(&self, x: &[u64]) -> Result<Vec<u64>, SemilinearError> {
        if x.len() != self.arity() {
            return Err(SemilinearError::DimensionMismatch {
                expected: self.arity(),
                got: x.len(),
            });
        }
        let i = self
            .selected_piece(x)
            .ok_or_else(|| SemilinearError::NotTotal(x.to_vec()))?;
        self.pieces[i]
            .eval_natural(x)?
            .ok_or(SemilinearError::IllFormed {
                piece: i,
                x: x.to_vec(),
            })
    }
}

pub fn eval_fn(f: &PiecewiseAffineFn, x: &[u64]) -> Result<Vec<u64>, SemilinearError> {
    f.eval(x)
}

/// Rewrites guard `i` to `g_i and not g_1 and ... and not g_{i-1}`, so exactly
/// one guard holds wherever any original guard held.
pub fn disambiguate_guards(f: &PiecewiseAffineFn) -> PiecewiseAffineFn {
    let mut pieces = Vec::with_capacity(f.pieces.len());
    for (i, p) in f.pieces.iter().enumerate() {
        let guard = if i == 0 {
            p.guard.clone()
        } else {
            let mut conj = vec![p.guard.clone()];
            conj.extend(f.pieces[..i].iter().map(|q| Guard::not(q.guard.clone())));
            Guard::And(conj)
        };
        pieces.push(AffinePiece {
            guard,
            ..p.clone()
        });
    }
    PiecewiseAffineFn {
        inputs: f.inputs.clone(),
        pieces,
    }
}

/// Splits a piece into its monotone production and consumption parts:
/// positive coefficients plus `b` on one side, negated negative coefficients
/// on the other, both sharing `c` and `d`.
pub fn hat_fn(p: &AffinePiece) -> (AffinePiece, AffinePiece) {
    let produce = AffinePiece {
        num: p
            .num
            .iter()
            .map(|row| row.iter().map(|&n| n.max(0)).collect())
            .collect(),
        ..p.clone()
    };
    let consume = AffinePiece {
        num: p
            .num
            .iter()
            .map(|row| row.iter().map(|&n| -(n.min(0))).collect())
            .collect(),
        b: vec![0; p.outputs()],
        ..p.clone()
    };
    (produce, consume)
}

impl AffinePiece {
    /// True when every coefficient of input `i` is zero.
    pub fn ignores_input(&self, i: usize) -> bool {
        self.num.iter().all(|row| row[i].is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::super::guard::{PresburgerAtom, Relation};
    use super::super::vectors_up_to_norm;
    use super::*;
    use proptest::prelude::*;

    fn ge(a: Vec<i64>, c: i64) -> Guard {
        Guard::Atom(PresburgerAtom::threshold(a, Relation::Ge, c))
    }

    pub(crate) fn max_spec() -> PiecewiseAffineFn {
        PiecewiseAffineFn::new(
            vec!["x1".into(), "x2".into()],
            vec![
                AffinePiece::linear(vec![vec![2, -1]], ge(vec![1, -1], 0)).unwrap(),
                AffinePiece::linear(vec![vec![0, 1]], Guard::True).unwrap(),
            ],
        )
        .unwrap()
    }

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn piece_values() {
        let half = AffinePiece::new(vec![vec![1, 1]], vec![2], vec![0], vec![0, 0], Guard::True).unwrap();
        assert_eq!(half.eval(&[2, 4]).unwrap(), Some(vec![r(3)]));
        assert_eq!(
            half.eval(&[1, 2]).unwrap(),
            Some(vec![BigRational::new(3.into(), 2.into())])
        );
        let f1 = AffinePiece::linear(vec![vec![2, -1]], Guard::True).unwrap();
        assert_eq!(f1.eval(&[4, 2]).unwrap(), Some(vec![r(6)]));
        let konst = AffinePiece::new(vec![vec![0, 0]], vec![1], vec![5], vec![0, 0], Guard::True).unwrap();
        assert_eq!(konst.eval(&[9, 1]).unwrap(), Some(vec![r(5)]));
    }

    #[test]
    fn piece_guard_and_domain() {
        let p = AffinePiece::new(vec![vec![1]], vec![2], vec![1], vec![1], ge(vec![1], 1)).unwrap();
        assert_eq!(p.eval(&[0]).unwrap(), None);
        assert_eq!(p.eval(&[5]).unwrap(), Some(vec![r(3)]));
        let bad = AffinePiece::new(vec![vec![1]], vec![1], vec![0], vec![3], Guard::True).unwrap();
        assert!(matches!(bad.eval(&[1]), Err(SemilinearError::DomainViolation { .. })));
        assert!(AffinePiece::new(vec![vec![1]], vec![0], vec![0], vec![0], Guard::True).is_err());
    }

    #[test]
    fn function_evaluation() {
        let f = max_spec();
        assert_eq!(f.eval(&[2, 5]).unwrap(), vec![5]);
        assert_eq!(f.eval(&[4, 2]).unwrap(), vec![6]);

        let even = Guard::Atom(PresburgerAtom::modular(vec![1, 1], 2, 0).unwrap());
        let half = PiecewiseAffineFn::new(
            vec!["x1".into(), "x2".into()],
            vec![AffinePiece::new(vec![vec![1, 1]], vec![2], vec![0], vec![0, 0], even).unwrap()],
        )
        .unwrap();
        assert!(matches!(half.eval(&[1, 2]), Err(SemilinearError::NotTotal(_))));
        assert_eq!(half.eval(&[3, 5]).unwrap(), vec![4]);

        let negative = PiecewiseAffineFn::new(
            vec!["x".into()],
            vec![AffinePiece::linear(vec![vec![-1]], Guard::True).unwrap()],
        )
        .unwrap();
        assert!(matches!(negative.eval(&[2]), Err(SemilinearError::IllFormed { .. })));
    }

    #[test]
    fn disambiguation() {
        let f = max_spec();
        let g = disambiguate_guards(&f);
        assert_eq!(g.pieces[0].guard, f.pieces[0].guard);
        assert_eq!(
            g.pieces[1].guard,
            Guard::And(vec![Guard::True, Guard::not(f.pieces[0].guard.clone())])
        );
        let single = PiecewiseAffineFn::new(vec!["x".into()], vec![f.pieces[1].clone().with_arity_one()]).unwrap();
        assert_eq!(disambiguate_guards(&single), single);

        let g1 = ge(vec![1, 0], 1);
        let g2 = ge(vec![0, 1], 1);
        let three = PiecewiseAffineFn::new(
            vec!["a".into(), "b".into()],
            vec![
                AffinePiece::linear(vec![vec![1, 0]], g1).unwrap(),
                AffinePiece::linear(vec![vec![0, 1]], g2).unwrap(),
                AffinePiece::linear(vec![vec![0, 0]], Guard::True).unwrap(),
            ],
        )
        .unwrap();
        let d = disambiguate_guards(&three);
        let holding: Vec<bool> = d.pieces.iter().map(|p| p.guard.eval(&[2, 3])).collect();
        assert_eq!(holding, vec![true, false, false]);
    }

    impl AffinePiece {
        fn with_arity_one(self) -> AffinePiece {
            AffinePiece::linear(vec![vec![1]], self.guard).unwrap()
        }
    }

    #[test]
    fn hat_examples() {
        let diff = AffinePiece::linear(vec![vec![1, -1]], ge(vec![1, -1], 0)).unwrap();
        let (p, c) = hat_fn(&diff);
        assert_eq!(p.num, vec![vec![1, 0]]);
        assert_eq!(c.num, vec![vec![0, 1]]);
        assert_eq!(p.eval_natural(&[5, 2]).unwrap(), Some(vec![5]));
        assert_eq!(c.eval_natural(&[5, 2]).unwrap(), Some(vec![2]));

        let pos = AffinePiece::new(vec![vec![2, 3]], vec![1], vec![4], vec![0, 0], Guard::True).unwrap();
        let (p, c) = hat_fn(&pos);
        assert_eq!(p, pos);
        assert_eq!(c.eval_natural(&[3, 3]).unwrap(), Some(vec![0]));

        let f1 = AffinePiece::linear(vec![vec![2, -1]], Guard::True).unwrap();
        let (p, c) = hat_fn(&f1);
        assert_eq!(p.eval_natural(&[4, 2]).unwrap(), Some(vec![8]));
        assert_eq!(c.eval_natural(&[4, 2]).unwrap(), Some(vec![2]));
    }

    fn piece_strategy() -> impl Strategy<Value = AffinePiece> {
        (1usize..=3, 1usize..=2).prop_flat_map(|(k, l)| {
            (
                prop::collection::vec(prop::collection::vec(-3i64..=3, k), l),
                prop::collection::vec(1u64..=3, l),
                prop::collection::vec(0u64..=3, l),
                prop::collection::vec(0u64..=2, k),
            )
                .prop_map(|(num, den, b, c)| AffinePiece::new(num, den, b, c, Guard::True).unwrap())
        })
    }

    proptest! {
        #[test]
        fn hat_parts_recombine(p in piece_strategy()) {
            let (prod, cons) = hat_fn(&p);
            for x in vectors_up_to_norm(p.inputs(), 20) {
                if x.iter().zip(&p.c).any(|(a, b)| a < b) {
                    continue;
                }
                let f = p.eval_unguarded(&x).unwrap();
                let yp = prod.eval_unguarded(&x).unwrap();
                let yc = cons.eval_unguarded(&x).unwrap();
                for j in 0..p.outputs() {
                    prop_assert!(!yp[j].is_negative());
                    prop_assert!(!yc[j].is_negative());
                    prop_assert_eq!(&yp[j] - &yc[j], f[j].clone());
                }
            }
        }

        #[test]
        fn disambiguation_preserves_first_match(x1 in 0u64..8, x2 in 0u64..8) {
            let f = max_spec();
            let g = disambiguate_guards(&f);
            prop_assert_eq!(f.eval(&[x1, x2]).unwrap(), g.eval(&[x1, x2]).unwrap());
            let holding = g.pieces.iter().filter(|p| p.guard.eval(&[x1, x2])).count();
            prop_assert_eq!(holding, 1);
        }
    }
}
