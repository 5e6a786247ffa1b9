//! The fast affine computer: offsets withheld by counters, per-output copies,
//! positive/negative token streams and division chains.

use super::{default_inputs, join_scope, CompileOptions, CompileError, Emitter, Result};
use crate::crn::{Crc, CountBound, SpeciesId};
use crate::semilinear::AffinePiece;

/// Emits the computer for `p` reading `inputs[i]` (which must be present for
/// every input the piece depends on) and producing into `yp[j]` / `yc[j]`.
/// Returns the number of inputs actually consumed.
pub(crate) fn emit_affine(
    e: &mut Emitter,
    scope: &str,
    p: &AffinePiece,
    inputs: &[Option<SpeciesId>],
    yp: &[SpeciesId],
    yc: &[SpeciesId],
) -> Result<usize> {
    let name = |s: String| join_scope(scope, &s);
    let l = p.outputs();
    let k = p.inputs();
    let sfx = |j: usize| if l == 1 { String::new() } else { (j + 1).to_string() };

    for j in 0..l {
        e.seed(yp[j], p.b[j]);
    }

    let mut zp = Vec::with_capacity(l);
    let mut zc = Vec::with_capacity(l);
    for j in 0..l {
        zp.push(e.sp(&name(format!("ZP{}", sfx(j))))?);
        zc.push(e.sp(&name(format!("ZC{}", sfx(j))))?);
    }

    let mut used = 0;
    for i in 0..k {
        if p.ignores_input(i) {
            continue;
        }
        used += 1;
        let x = inputs[i].expect("input species for a used coordinate");
        let ci = p.c[i];
        let counters = (0..=ci)
            .map(|m| e.sp(&name(format!("C{}_{m}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        e.seed(counters[0], 1);
        for m in 0..ci as usize {
            e.rx(&[(counters[m], 1), (x, 1)], &[(counters[m + 1], 1)])?;
        }
        let last = counters[ci as usize];
        let xp = e.sp(&name(format!("X{}'", i + 1)))?;
        e.rx(&[(last, 1), (x, 1)], &[(last, 1), (xp, 1)])?;

        let targets: Vec<usize> = (0..l).filter(|&j| p.num[j][i] != 0).collect();
        let copies: Vec<SpeciesId> = if targets.len() == 1 {
            vec![xp]
        } else {
            let cs = targets
                .iter()
                .map(|&j| e.sp(&name(format!("X{}_{}", i + 1, j + 1))))
                .collect::<Result<Vec<_>>>()?;
            let products: Vec<_> = cs.iter().map(|&c| (c, 1)).collect();
            e.rx(&[(xp, 1)], &products)?;
            cs
        };
        for (&j, &xc) in targets.iter().zip(&copies) {
            let n = p.num[j][i];
            let z = if n > 0 { zp[j] } else { zc[j] };
            e.rx(&[(xc, 1)], &[(z, n.unsigned_abs())])?;
        }
    }

    for j in 0..l {
        let d = p.den[j] as usize;
        for (side, z, y) in [("P", zp[j], yp[j]), ("C", zc[j], yc[j])] {
            let chain = (0..d)
                .map(|m| e.sp(&name(format!("D{side}{}_{m}", sfx(j)))))
                .collect::<Result<Vec<_>>>()?;
            e.seed(chain[0], 1);
            for m in 0..d - 1 {
                e.rx(&[(chain[m], 1), (z, 1)], &[(chain[m + 1], 1)])?;
            }
            e.rx(&[(chain[d - 1], 1), (z, 1)], &[(chain[0], 1), (y, 1)])?;
        }
    }
    Ok(used)
}

/// Declared bound for a standalone affine computer:
/// `c0 = sum b + k + 2l`, `c1 = 1 + max_i sum_j |n_ij|`.
pub(crate) fn affine_bound(p: &AffinePiece) -> CountBound {
    let k = (0..p.inputs()).filter(|&i| !p.ignores_input(i)).count() as u64;
    let c0 = p.b.iter().sum::<u64>() + k + 2 * p.outputs() as u64;
    let c1 = 1 + (0..p.inputs())
        .map(|i| p.num.iter().map(|row| row[i].unsigned_abs()).sum::<u64>())
        .max()
        .unwrap_or(0);
    CountBound { c0, c1 }
}

/// Compiles one affine piece (its guard is ignored) into a computer whose
/// outputs are `Y_j^P` for every `j` followed by `Y_j^C` for every `j`; the
/// encoded value is their difference.
pub fn compile_affine(p: &AffinePiece, opts: &CompileOptions) -> Result<Crc> {
    p.validate()?;
    let k = p.inputs();
    let l = p.outputs();
    let names = opts.inputs_or(|| default_inputs(k));
    if names.len() != k {
        return Err(CompileError::Invalid(format!(
            "piece has {k} inputs but {} names were given",
            names.len()
        )));
    }
    let base = opts.outputs_or_default(l);
    let mut e = Emitter::new();
    let inputs = names.iter().map(|n| e.interface(n)).collect::<Result<Vec<_>>>()?;
    let yp = base
        .iter()
        .map(|y| e.interface(&format!("{y}^P")))
        .collect::<Result<Vec<_>>>()?;
    let yc = base
        .iter()
        .map(|y| e.interface(&format!("{y}^C")))
        .collect::<Result<Vec<_>>>()?;
    let feed: Vec<Option<SpeciesId>> = inputs.iter().map(|&x| Some(x)).collect();
    emit_affine(&mut e, &opts.scope_prefix, p, &feed, &yp, &yc)?;
    let (crn, ctx) = e.finish();
    let outputs = yp.into_iter().chain(yc).collect();
    Ok(Crc::new(crn, inputs, outputs, ctx)?.with_count_bound(Some(affine_bound(p))))
}
