//! Set-level transforms: recovering an affine piece from a linear graph set,
//! and the difference encoding of a function graph.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::affine::AffinePiece;
use super::guard::Guard;
use super::linalg::{clear_denominators, denominator_lcm, q, solve_exact, Echelon, Q};
use super::{LinearSet, SemilinearError, SemilinearSet};

fn unit(dim: usize, at: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); dim];
    v[at] = Q::one();
    v
}

/// Projection of `v` onto the inputs plus output coordinate `j`.
fn project(v: &[u64], k: usize, j: usize) -> Vec<Q> {
    let mut out: Vec<Q> = v[..k].iter().map(|&x| q(x as i64)).collect();
    out.push(q(v[k + j] as i64));
    out
}

/// Recovers the affine piece whose graph contains `g`, a linear set over
/// `N^(k+l)` with the first `k` coordinates as inputs. The guard is left as
/// `True`; the domain is the projection of `g` onto the inputs.
pub fn extract_affine(g: &LinearSet, k: usize) -> Result<AffinePiece, SemilinearError> {
    let d = g.dim();
    if d <= k {
        return Err(SemilinearError::Invalid(format!(
            "graph set of dimension {d} has no output coordinates for {k} inputs"
        )));
    }
    let l = d - k;
    let mut num = Vec::with_capacity(l);
    let mut den = Vec::with_capacity(l);

    for j in 0..l {
        let projected: Vec<Vec<Q>> = g.periods.iter().map(|u| project(u, k, j)).collect();
        let out_dir = unit(k + 1, k);

        let mut basis = Echelon::new(k + 1, projected.len());
        let mut chosen: Vec<Vec<Q>> = Vec::new();
        for (t, w) in projected.iter().enumerate() {
            if basis.insert(w, t) {
                chosen.push(w.clone());
            }
        }

        let (residual, combo) = basis.reduce(&out_dir);
        if residual.iter().all(Zero::is_zero) {
            return Err(not_a_graph(g, j, &combo));
        }

        // Extend with input unit vectors while keeping the output direction
        // outside the span.
        for i in 0..k {
            if basis.rank() == k {
                break;
            }
            let e = unit(k + 1, i);
            if basis.insert(&e, usize::MAX) {
                if basis.in_span(&out_dir) {
                    basis.pop();
                } else {
                    chosen.push(e);
                }
            }
        }
        assert_eq!(
            chosen.len(),
            k,
            "basis extension failed although the output direction is outside the span"
        );

        // Solve coeffs . V = w_out, i.e. V^T coeffs = w_out, where column t
        // of V is the input part of w_t.
        let vt: Vec<Vec<Q>> = chosen.iter().map(|w| w[..k].to_vec()).collect();
        let w_out: Vec<Q> = chosen.iter().map(|w| w[k].clone()).collect();
        let coeffs = if k == 0 {
            vec![]
        } else {
            solve_exact(&vt, &w_out)?
        };
        let lcm = denominator_lcm(&coeffs);
        let scaled = clear_denominators(&coeffs);
        let row = scaled
            .iter()
            .map(|x| {
                x.to_i64()
                    .ok_or_else(|| SemilinearError::Invalid("coefficient overflows i64".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        num.push(row);
        den.push(
            lcm.to_u64()
                .ok_or_else(|| SemilinearError::Invalid("denominator overflows u64".into()))?,
        );
    }

    AffinePiece::new(
        num,
        den,
        g.base[k..].to_vec(),
        g.base[..k].to_vec(),
        Guard::True,
    )
}

/// Builds the witness pair for a set that is not a graph: `combo` satisfies
/// `e_out = -sum combo_t * proj(u_t)`.
fn not_a_graph(g: &LinearSet, output: usize, combo: &[Q]) -> SemilinearError {
    let lambda: Vec<Q> = combo.iter().map(|c| -c.clone()).collect();
    let ints: Vec<BigInt> = clear_denominators(&lambda);
    let mut first = g.base.clone();
    let mut second = g.base.clone();
    for (n, u) in ints.iter().zip(&g.periods) {
        let target = if n.is_positive() { &mut first } else { &mut second };
        let m = n.abs().to_u64().unwrap_or(u64::MAX);
        for (x, &y) in target.iter_mut().zip(u) {
            *x = x.saturating_add(m.saturating_mul(y));
        }
    }
    SemilinearError::NotAGraph {
        output,
        first,
        second,
    }
}

/// The difference encoding of a graph set over `N^(k+l)`: the set of
/// `(x, y_P, y_C)` with `(x, y_P - y_C)` in `f`.
pub fn hat_transform(f: &SemilinearSet, k: usize) -> Result<SemilinearSet, SemilinearError> {
    let d = f.dim();
    if d < k {
        return Err(SemilinearError::DimensionMismatch { expected: k, got: d });
    }
    let l = d - k;
    let lift = |v: &[u64]| {
        let mut w = v.to_vec();
        w.extend(std::iter::repeat_n(0, l));
        w
    };
    let components = f
        .components
        .iter()
        .map(|c| {
            let mut periods: Vec<Vec<u64>> = c.periods.iter().map(|u| lift(u)).collect();
            for j in 0..l {
                let mut v = vec![0; k + 2 * l];
                v[k + j] = 1;
                v[k + l + j] = 1;
                periods.push(v);
            }
            LinearSet {
                base: lift(&c.base),
                periods,
            }
        })
        .collect();
    SemilinearSet::new(components)
}
