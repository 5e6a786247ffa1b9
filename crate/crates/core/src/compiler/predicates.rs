//! Deciders for threshold and modular atoms and their boolean combinations.

use super::{default_inputs, fan_out, join_scope, CompileOptions, Emitter, Result, VoterBinding};
use crate::crn::{Crd, SpeciesId};
use crate::semilinear::{Guard, PresburgerAtom, Relation};

/// Leader states of a compiled atom with their votes.
#[derive(Debug, Clone)]
pub(crate) struct AtomVoters {
    pub states: Vec<(SpeciesId, bool)>,
    pub initial: bool,
}

/// Whether the compiled atom consumes input `i`.
pub(crate) fn atom_uses_input(a: &PresburgerAtom, i: usize) -> bool {
    match a {
        PresburgerAtom::Threshold { coeffs, .. } => coeffs[i] != 0,
        PresburgerAtom::Mod { coeffs, modulus, .. } => coeffs[i].rem_euclid(*modulus as i64) != 0,
    }
}

/// Token-cancellation decider for `sum a_i x_i rel c`. `inputs[i]` is the
/// species carrying input `i` (unused where `a_i = 0`).
pub(crate) fn emit_threshold(
    e: &mut Emitter,
    scope: &str,
    inputs: &[Option<SpeciesId>],
    a: &[i64],
    rel: Relation,
    c: i64,
) -> Result<AtomVoters> {
    let name = |s: &str| join_scope(scope, s);
    if a.iter().all(|&x| x == 0) {
        let v = rel.holds(0, c as i128);
        let l = e.sp(&name(if v { "L1" } else { "L0" }))?;
        e.seed(l, 1);
        return Ok(AtomVoters {
            states: vec![(l, v)],
            initial: v,
        });
    }
    // Votes when P tokens remain (sum > c), N tokens remain (sum < c), or
    // everything cancelled.
    let pv = rel.holds(1, 0);
    let nv = rel.holds(-1, 0);
    let tv = rel.holds(0, 0);

    let p = e.sp(&name("P"))?;
    let n = e.sp(&name("N"))?;
    let t = e.sp(&name("T"))?;
    let l1 = e.sp(&name("L1"))?;
    let l0 = e.sp(&name("L0"))?;
    let leader = |b: bool| if b { l1 } else { l0 };

    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let x = inputs[i].expect("input species for a nonzero coefficient");
        let tok = if ai > 0 { p } else { n };
        e.rx(&[(x, 1)], &[(tok, ai.unsigned_abs())])?;
    }
    if c > 0 {
        e.seed(n, c as u64);
    } else if c < 0 {
        e.seed(p, c.unsigned_abs());
    }
    e.seed(leader(tv), 1);

    e.rx(&[(p, 1), (n, 1)], &[(t, 1)])?;
    for b in [true, false] {
        if b != pv {
            e.rx(&[(leader(b), 1), (p, 1)], &[(leader(pv), 1), (p, 1)])?;
        }
        if b != nv {
            e.rx(&[(leader(b), 1), (n, 1)], &[(leader(nv), 1), (n, 1)])?;
        }
        e.rx(&[(leader(b), 1), (t, 1)], &[(leader(tv), 1)])?;
    }
    Ok(AtomVoters {
        states: vec![(l1, true), (l0, false)],
        initial: tv,
    })
}

/// Single leader cycling through residues mod `m`.
pub(crate) fn emit_mod(
    e: &mut Emitter,
    scope: &str,
    inputs: &[Option<SpeciesId>],
    a: &[i64],
    m: u64,
    r: u64,
) -> Result<AtomVoters> {
    let states = (0..m)
        .map(|s| e.sp(&join_scope(scope, &format!("L_{s}"))))
        .collect::<Result<Vec<_>>>()?;
    e.seed(states[0], 1);
    for (i, &ai) in a.iter().enumerate() {
        let step = ai.rem_euclid(m as i64) as u64;
        if step == 0 {
            continue;
        }
        let x = inputs[i].expect("input species for a nonzero coefficient");
        for s in 0..m {
            e.rx(&[(states[s as usize], 1), (x, 1)], &[(states[((s + step) % m) as usize], 1)])?;
        }
    }
    Ok(AtomVoters {
        states: states.iter().enumerate().map(|(s, &id)| (id, s as u64 == r)).collect(),
        initial: r == 0,
    })
}

pub(crate) fn emit_atom(
    e: &mut Emitter,
    scope: &str,
    inputs: &[Option<SpeciesId>],
    atom: &PresburgerAtom,
) -> Result<AtomVoters> {
    match atom {
        PresburgerAtom::Threshold {
            coeffs,
            rel,
            constant,
        } => emit_threshold(e, scope, inputs, coeffs, *rel, *constant),
        PresburgerAtom::Mod {
            coeffs,
            modulus,
            residue,
        } => emit_mod(e, scope, inputs, coeffs, *modulus, *residue),
    }
}

/// Voters for a (simplified) guard over already compiled atoms. Constants get
/// a single fixed voter, a literal reuses its atom's leader, anything else a
/// combiner leader `C_v` tracking the vote vector of the atoms involved.
pub(crate) fn emit_guard_binding(
    e: &mut Emitter,
    scope: &str,
    guard: &Guard,
    atoms: &[PresburgerAtom],
    compiled: &[AtomVoters],
) -> Result<VoterBinding> {
    let lookup = |a: &PresburgerAtom| {
        let idx = atoms.iter().position(|b| b == a).expect("atom was compiled");
        &compiled[idx]
    };
    if let Some(v) = guard.constant_value() {
        let s = e.sp(&join_scope(scope, if v { "L1" } else { "L0" }))?;
        e.seed(s, 1);
        return Ok(VoterBinding::from_voters(&[(s, v)]));
    }
    match guard {
        Guard::Atom(a) => return Ok(VoterBinding::from_voters(&lookup(a).states)),
        Guard::Not(inner) => {
            if let Guard::Atom(a) = inner.as_ref() {
                return Ok(VoterBinding::from_voters(&lookup(a).states).flipped());
            }
        }
        _ => {}
    }

    let local = guard.atoms();
    let n = local.len();
    let bits = |v: u64| -> String { (0..n).map(|i| if v >> i & 1 == 1 { '1' } else { '0' }).collect() };
    let states = (0..1u64 << n)
        .map(|v| e.sp(&join_scope(scope, &format!("C_{}", bits(v)))))
        .collect::<Result<Vec<_>>>()?;
    let initial = local
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, a)| acc | (lookup(a).initial as u64) << i);
    e.seed(states[initial as usize], 1);

    for v in 0..1u64 << n {
        for (i, a) in local.iter().enumerate() {
            for &(leader, b) in &lookup(a).states {
                if (v >> i & 1 == 1) == b {
                    continue;
                }
                let w = v ^ (1 << i);
                e.rx(
                    &[(states[v as usize], 1), (leader, 1)],
                    &[(states[w as usize], 1), (leader, 1)],
                )?;
            }
        }
    }
    let voters: Vec<(SpeciesId, bool)> = (0..1u64 << n)
        .map(|v| {
            let vote = guard.eval_with(&mut |a| {
                let i = local.iter().position(|b| b == a).unwrap();
                v >> i & 1 == 1
            });
            (states[v as usize], vote)
        })
        .collect();
    Ok(VoterBinding::from_voters(&voters))
}

/// Compiles a guard into a standalone decider over `k` inputs. Inputs read by
/// several atoms are split once up front.
pub fn compile_guard(g: &Guard, opts: &CompileOptions) -> Result<Crd> {
    let k = match g.arity()? {
        Some(k) => k,
        None => opts.input_names.as_ref().map_or(0, Vec::len),
    };
    let names = opts.inputs_or(|| default_inputs(k));
    if names.len() != k {
        return Err(super::CompileError::Invalid(format!(
            "guard has {k} inputs but {} names were given",
            names.len()
        )));
    }
    let guard = g.simplified();
    let atoms = guard.atoms();

    let mut e = Emitter::new();
    let inputs = names.iter().map(|n| e.interface(n)).collect::<Result<Vec<_>>>()?;
    let consumers: Vec<usize> = (0..k)
        .map(|i| atoms.iter().filter(|a| atom_uses_input(a, i)).count())
        .collect();
    let mut copies = fan_out(&mut e, &opts.scope_prefix, &inputs, &names, &consumers)?;

    let mut compiled = Vec::with_capacity(atoms.len());
    for (idx, atom) in atoms.iter().enumerate() {
        let feed: Vec<Option<SpeciesId>> = (0..k)
            .map(|i| atom_uses_input(atom, i).then(|| copies[i].remove(0)))
            .collect();
        let scope = if atoms.len() == 1 {
            opts.scope_prefix.clone()
        } else {
            opts.scope(&format!("g{}", idx + 1))
        };
        compiled.push(emit_atom(&mut e, &scope, &feed, atom)?);
    }
    let binding = emit_guard_binding(&mut e, &opts.scope_prefix, &guard, &atoms, &compiled)?;
    let (crn, ctx) = e.finish();
    Ok(Crd::new(crn, inputs, binding.voters(), ctx)?)
}

/// `sum a_i x_i rel c` as a standalone decider.
pub fn compile_threshold(a: &[i64], rel: Relation, c: i64, opts: &CompileOptions) -> Result<Crd> {
    if a.is_empty() {
        return Err(super::CompileError::Invalid("threshold needs at least one input".into()));
    }
    compile_guard(&Guard::Atom(PresburgerAtom::threshold(a.to_vec(), rel, c)), opts)
}

/// `sum a_i x_i = r (mod m)` as a standalone decider.
pub fn compile_mod(a: &[i64], m: u64, r: i64, opts: &CompileOptions) -> Result<Crd> {
    compile_guard(&Guard::Atom(PresburgerAtom::modular(a.to_vec(), m, r)?), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crn::Vote;

    #[test]
    fn threshold_shape() {
        let d = compile_threshold(&[1, -1], Relation::Lt, 0, &CompileOptions::default()).unwrap();
        let crn = d.crn();
        let shown: Vec<String> = crn.reactions().iter().map(|r| crn.display_reaction(r)).collect();
        assert_eq!(
            shown,
            vec![
                "X1 -> P",
                "X2 -> N",
                "P + N -> T",
                "P + L1 -> P + L0",
                "T + L1 -> L0",
                "N + L0 -> N + L1",
                "T + L0 -> L0",
            ]
        );
        // tie votes no for `<`
        let init = d.initial_configuration(&[0, 0]).unwrap();
        assert_eq!(d.vote(&init), Vote::No);
    }

    #[test]
    fn constant_threshold() {
        let d = compile_threshold(&[0, 0], Relation::Ge, -1, &CompileOptions::default()).unwrap();
        assert!(d.crn().reactions().is_empty());
        assert_eq!(d.vote(&d.initial_configuration(&[3, 4]).unwrap()), Vote::Yes);
    }

    #[test]
    fn true_guard() {
        let d = compile_guard(&Guard::True, &CompileOptions::default()).unwrap();
        assert_eq!(d.crn().species(), &["L1".to_string()]);
        assert!(d.crn().reactions().is_empty());
        assert_eq!(d.vote(&d.initial_configuration(&[]).unwrap()), Vote::Yes);
    }

    #[test]
    fn mod_shape() {
        let d = compile_mod(&[1], 3, 2, &CompileOptions::default()).unwrap();
        assert_eq!(d.crn().reactions().len(), 3);
        assert_eq!(d.vote(&d.initial_configuration(&[0]).unwrap()), Vote::No);
        let zero = compile_mod(&[1], 2, 1, &CompileOptions::default()).unwrap();
        assert!(zero.crn().is_terminal(&zero.initial_configuration(&[0]).unwrap()).unwrap());
    }

    #[test]
    fn combiner_shape() {
        let ge = |a: Vec<i64>| Guard::Atom(PresburgerAtom::threshold(a, Relation::Ge, 0));
        let g = Guard::And(vec![ge(vec![1, -1]), Guard::not(ge(vec![1, -2]))]);
        let d = compile_guard(&g, &CompileOptions::with_prefix("q")).unwrap();
        let crn = d.crn();
        assert!(crn.id("q/C_11").is_some());
        assert!(crn.id("q/g2/L1").is_some());
        assert!(crn.id("q/fan/X1_2").is_some());
        // both atoms start at their tie vote (yes), so the initial vector is 11
        let init = d.initial_configuration(&[0, 0]).unwrap();
        assert_eq!(init.get(crn.id("q/C_11").unwrap()), 1);
        assert_eq!(d.vote(&init), Vote::No);
        assert_eq!(d.voters().len(), 4);
    }
}
