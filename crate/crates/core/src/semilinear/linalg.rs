//! Exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::SemilinearError;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Least common multiple of the denominators of `v` (1 for an empty slice).
pub fn denominator_lcm(v: &[Q]) -> BigInt {
    v.iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Rank of a list of row vectors.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let n = rows.first().map_or(0, Vec::len);
    let mut e = Echelon::new(n, rows.len());
    rows.iter()
        .enumerate()
        .filter(|(i, r)| e.insert(r, *i))
        .count()
}

/// Solves `m * x = rhs` for square nonsingular `m` by fraction-free
/// (Bareiss) elimination on an integer-scaled copy of the system.
pub fn solve_exact(m: &[Vec<Q>], rhs: &[Q]) -> Result<Vec<Q>, SemilinearError> {
    let n = m.len();
    if rhs.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(SemilinearError::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    // Row i scaled by the lcm of its denominators (rhs included).
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut full: Vec<Q> = row.clone();
            full.push(b.clone());
            let l = Q::from_integer(denominator_lcm(&full));
            full.into_iter().map(|x| (x * &l).to_integer()).collect()
        })
        .collect();

    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Err(SemilinearError::Singular { rank: rank(m) });
        };
        a.swap(k, p);
        for i in (k + 1)..n {
            for j in (k + 1)..=n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                debug_assert!((&v % &prev).is_zero());
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }

    let mut x = vec![Q::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Q::from_integer(a[i][n].clone());
        for j in (i + 1)..n {
            acc -= Q::from_integer(a[i][j].clone()) * &x[j];
        }
        x[i] = acc / Q::from_integer(a[i][i].clone());
    }
    Ok(x)
}

/// Incremental row-echelon basis that remembers, for every stored row, which
/// combination of the inserted vectors produced it.
#[derive(Debug, Clone)]
pub struct Echelon {
    dim: usize,
    sources: usize,
    rows: Vec<EchelonRow>,
}

#[derive(Debug, Clone)]
struct EchelonRow {
    pivot: usize,
    vec: Vec<Q>,
    combo: Vec<Q>,
}

impl Echelon {
    /// `sources` is the number of distinct vectors that may be inserted; each
    /// insertion is tagged with its source index.
    pub fn new(dim: usize, sources: usize) -> Self {
        Echelon {
            dim,
            sources,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis. Returns `(residual, combo)` with
    /// `residual = v + sum_t combo[t] * source[t]`.
    pub fn reduce(&self, v: &[Q]) -> (Vec<Q>, Vec<Q>) {
        assert_eq!(v.len(), self.dim);
        let mut r = v.to_vec();
        let mut combo = vec![Q::zero(); self.sources];
        for row in &self.rows {
            if r[row.pivot].is_zero() {
                continue;
            }
            let f = &r[row.pivot] / &row.vec[row.pivot];
            for (x, y) in r.iter_mut().zip(&row.vec) {
                *x -= &f * y;
            }
            for (x, y) in combo.iter_mut().zip(&row.combo) {
                *x -= &f * y;
            }
        }
        (r, combo)
    }

    pub fn in_span(&self, v: &[Q]) -> bool {
        self.reduce(v).0.iter().all(Zero::is_zero)
    }

    /// Inserts `v` (tagged as source `tag`) if it is independent of the basis.
    pub fn insert(&mut self, v: &[Q], tag: usize) -> bool {
        let (r, mut combo) = self.reduce(v);
        let Some(pivot) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        if tag < self.sources {
            combo[tag] += Q::one();
        }
        self.rows.push(EchelonRow {
            pivot,
            vec: r,
            combo,
        });
        true
    }

    /// Removes the most recently inserted row.
    pub fn pop(&mut self) {
        self.rows.pop();
    }
}

/// Scales a rational vector by the smallest positive integer making it
/// integral.
pub fn clear_denominators(v: &[Q]) -> Vec<BigInt> {
    let l = Q::from_integer(denominator_lcm(v));
    v.iter().map(|x| (x * &l).to_integer()).collect()
}

pub fn is_positive(x: &BigInt) -> bool {
    x.is_positive()
}
