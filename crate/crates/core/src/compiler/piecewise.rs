//! Piecewise composition: every piece computes into inactive outputs, every
//! guard decides in parallel, and catalytic activation moves the selected
//! piece's tokens onto the shared outputs.

use super::affine::emit_affine;
use super::predicates::{atom_uses_input, emit_atom, emit_guard_binding};
use super::{fan_out, CompileError, CompileOptions, Emitter, Result, VoterBinding};
use crate::crn::{Crc, CountBound, SpeciesId};
use crate::semilinear::{disambiguate_guards, vectors_up_to_norm, AffinePiece, Guard, PiecewiseAffineFn, PresburgerAtom};

/// A compiled function together with the widest input split it needed.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub crc: Crc,
    pub fanout_width: usize,
}

fn is_zero_piece(p: &AffinePiece) -> bool {
    p.b.iter().all(|&b| b == 0) && p.num.iter().flatten().all(|&n| n == 0)
}

/// Evaluates `f` on every input up to a small norm so that gaps in coverage
/// and ill-formed pieces are reported before anything is emitted.
fn check_total(f: &PiecewiseAffineFn) -> Result<()> {
    let k = f.arity();
    let norm = match k {
        0 => 0,
        1..=3 => 12,
        4 => 8,
        _ => 4,
    };
    for x in vectors_up_to_norm(k, norm) {
        f.eval(&x)?;
    }
    Ok(())
}

/// Compiles `f` into a computer with outputs `Y_1..Y_l` (or `Y`).
pub fn compile_piecewise(f: &PiecewiseAffineFn, opts: &CompileOptions) -> Result<Compiled> {
    f.validate()?;
    let f = disambiguate_guards(f);
    check_total(&f)?;
    let k = f.arity();
    let l = f.outputs();
    let in_names = opts.inputs_or(|| f.inputs.clone());
    let out_names = opts.outputs_or_default(l);
    if in_names.len() != k || out_names.len() != l {
        return Err(CompileError::Invalid(format!(
            "function has {k} inputs and {l} outputs but {} and {} names were given",
            in_names.len(),
            out_names.len()
        )));
    }

    // Pieces that can never contribute are dropped together with their guards.
    let pieces: Vec<(usize, AffinePiece, Guard)> = f
        .pieces
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p.clone(), p.guard.simplified()))
        .filter(|(_, p, g)| !is_zero_piece(p) && g.constant_value() != Some(false))
        .collect();
    let mut atoms: Vec<PresburgerAtom> = Vec::new();
    for (_, _, g) in &pieces {
        for a in g.atoms() {
            if !atoms.contains(&a) {
                atoms.push(a);
            }
        }
    }

    let mut e = Emitter::new();
    let inputs = in_names.iter().map(|n| e.interface(n)).collect::<Result<Vec<_>>>()?;
    let outputs = out_names.iter().map(|n| e.interface(n)).collect::<Result<Vec<_>>>()?;

    let consumers: Vec<usize> = (0..k)
        .map(|i| {
            pieces.iter().filter(|(_, p, _)| !p.ignores_input(i)).count()
                + atoms.iter().filter(|a| atom_uses_input(a, i)).count()
        })
        .collect();
    let fanout_width = consumers.iter().copied().max().unwrap_or(0);
    let mut copies = fan_out(&mut e, &opts.scope_prefix, &inputs, &in_names, &consumers)?;
    let mut take = |uses: bool, i: usize| uses.then(|| copies[i].remove(0));

    let sfx = |j: usize| if l == 1 { String::new() } else { (j + 1).to_string() };
    let mut hats: Vec<(Vec<SpeciesId>, Vec<SpeciesId>)> = Vec::new();
    for (idx, p, _) in &pieces {
        let scope = opts.scope(&format!("f{}", idx + 1));
        let mut yh_p = Vec::with_capacity(l);
        let mut yh_c = Vec::with_capacity(l);
        for j in 0..l {
            yh_p.push(e.sp(&format!("{scope}/YhP{}", sfx(j)))?);
            yh_c.push(e.sp(&format!("{scope}/YhC{}", sfx(j)))?);
        }
        let feed: Vec<Option<SpeciesId>> = (0..k).map(|i| take(!p.ignores_input(i), i)).collect();
        emit_affine(&mut e, &scope, p, &feed, &yh_p, &yh_c)?;
        hats.push((yh_p, yh_c));
    }

    let mut compiled = Vec::with_capacity(atoms.len());
    for (a, atom) in atoms.iter().enumerate() {
        let feed: Vec<Option<SpeciesId>> = (0..k).map(|i| take(atom_uses_input(atom, i), i)).collect();
        compiled.push(emit_atom(&mut e, &opts.scope(&format!("g{}", a + 1)), &feed, atom)?);
    }

    let ks = (0..l)
        .map(|j| e.sp(&opts.scope(&format!("K{}", sfx(j)))))
        .collect::<Result<Vec<_>>>()?;
    for ((idx, _, g), (yh_p, yh_c)) in pieces.iter().zip(&hats) {
        let scope = opts.scope(&format!("f{}", idx + 1));
        let binding = emit_guard_binding(&mut e, &scope, g, &atoms, &compiled)?;
        for j in 0..l {
            let ya_p = e.sp(&format!("{scope}/YP{}", sfx(j)))?;
            let ya_c = e.sp(&format!("{scope}/YC{}", sfx(j)))?;
            let m = e.sp(&format!("{scope}/M{}", sfx(j)))?;
            emit_activation(&mut e, &binding, yh_p[j], yh_c[j], ya_p, ya_c, m, ks[j], outputs[j])?;
        }
    }

    let bound = piecewise_bound(&pieces, &atoms, k, e.context_total());
    let (crn, ctx) = e.finish();
    let crc = Crc::new(crn, inputs, outputs, ctx)?.with_count_bound(Some(bound));
    Ok(Compiled { crc, fanout_width })
}

#[allow(clippy::too_many_arguments)]
fn emit_activation(
    e: &mut Emitter,
    binding: &VoterBinding,
    yh_p: SpeciesId,
    yh_c: SpeciesId,
    ya_p: SpeciesId,
    ya_c: SpeciesId,
    m: SpeciesId,
    k: SpeciesId,
    y: SpeciesId,
) -> Result<()> {
    for &on in &binding.yes_species {
        e.rx(&[(on, 1), (yh_p, 1)], &[(on, 1), (ya_p, 1), (y, 1)])?;
    }
    for &off in &binding.no_species {
        e.rx(&[(off, 1), (ya_p, 1)], &[(off, 1), (m, 1)])?;
    }
    e.rx(&[(m, 1), (y, 1)], &[(yh_p, 1)])?;
    for &on in &binding.yes_species {
        e.rx(&[(on, 1), (yh_c, 1)], &[(on, 1), (ya_c, 1)])?;
    }
    for &off in &binding.no_species {
        e.rx(&[(off, 1), (ya_c, 1)], &[(off, 1), (yh_c, 1)])?;
    }
    e.rx(&[(ya_p, 1), (ya_c, 1)], &[(k, 1)])?;
    e.rx(&[(k, 1), (y, 1)], &[])?;
    Ok(())
}

/// A conservative linear bound. Each input molecule, once split, turns into
/// at most `2 (1 + sum_j |n_ij|)` molecules per piece (activation can double
/// the production side) and `max(1, |a_i|)` per threshold atom; the initial
/// context can at most double for the same reason.
fn piecewise_bound(
    pieces: &[(usize, AffinePiece, Guard)],
    atoms: &[PresburgerAtom],
    k: usize,
    context: u64,
) -> CountBound {
    let c1 = (0..k)
        .map(|i| {
            let from_pieces: u64 = pieces
                .iter()
                .filter(|(_, p, _)| !p.ignores_input(i))
                .map(|(_, p, _)| 2 * (1 + p.num.iter().map(|row| row[i].unsigned_abs()).sum::<u64>()))
                .sum();
            let from_atoms: u64 = atoms
                .iter()
                .filter(|a| atom_uses_input(a, i))
                .map(|a| a.coeffs()[i].unsigned_abs().max(1))
                .sum();
            (from_pieces + from_atoms).max(1)
        })
        .max()
        .unwrap_or(1);
    CountBound { c0: 2 * context, c1 }
}
