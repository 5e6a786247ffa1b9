//! Graph deciders from computers, and the searching computer built from a
//! decider of the difference-encoded graph.

use super::{compile_piecewise, CompileError, CompileOptions, Result};
use crate::crn::{Configuration, Crc, Crd, CrnBuilder, Reaction, SpeciesId};
use crate::semilinear::PiecewiseAffineFn;

fn fresh(b: &mut CrnBuilder, base: &str) -> Result<SpeciesId> {
    let mut name = base.to_string();
    while b.lookup(&name).is_some() {
        name.push('\'');
    }
    Ok(b.species(&name)?)
}

fn copy_species(crn: &crate::crn::Crn) -> Result<CrnBuilder> {
    let mut b = CrnBuilder::new();
    for name in crn.species() {
        b.species(name)?;
    }
    Ok(b)
}

/// Decider for the graph of the function computed by `c`: the claimed value
/// of each output is supplied as the new input `Y_j^C`. Every reaction with
/// net production of `Y_j` also produces that many `Y_j^P`, net consumption
/// produces `Y_j^C`, and the leader reactions compare the two.
pub fn graph_decider(c: &Crc) -> Result<Crd> {
    let crn = c.crn();
    let mut b = copy_species(crn)?;
    let mut yp = Vec::new();
    let mut yc = Vec::new();
    for &y in c.outputs() {
        let name = crn.name(y).to_string();
        yp.push(fresh(&mut b, &format!("{name}^P"))?);
        yc.push(fresh(&mut b, &format!("{name}^C"))?);
    }
    let l1 = fresh(&mut b, "L1")?;
    let l0 = fresh(&mut b, "L0")?;

    for r in crn.reactions() {
        let mut products = r.products().to_vec();
        for (j, &y) in c.outputs().iter().enumerate() {
            let net = r.net(y);
            if net > 0 {
                products.push((yp[j], net as u64));
            } else if net < 0 {
                products.push((yc[j], net.unsigned_abs()));
            }
        }
        b.push(Reaction::new(r.reactants(), &products, r.rate())?);
    }
    for j in 0..yp.len() {
        b.push(Reaction::new(&[(yp[j], 1), (yc[j], 1)], &[(l1, 1)], 1.0)?);
        b.push(Reaction::new(&[(yp[j], 1), (l1, 1)], &[(yp[j], 1), (l0, 1)], 1.0)?);
        b.push(Reaction::new(&[(yc[j], 1), (l1, 1)], &[(yc[j], 1), (l0, 1)], 1.0)?);
    }
    b.push(Reaction::new(&[(l0, 1), (l1, 1)], &[(l1, 1)], 1.0)?);

    let out = b.build();
    let mut ctx = Configuration::zeros(out.species_count());
    for (s, &n) in c.context().counts().iter().enumerate() {
        ctx.set(s, n);
    }
    // Output molecules present from the start count as already produced.
    for (j, &y) in c.outputs().iter().enumerate() {
        ctx.set(yp[j], c.context().get(y));
    }
    ctx.set(l1, 1);
    let inputs = c.inputs().iter().copied().chain(yc).collect();
    Ok(Crd::new(out, inputs, vec![(l1, true), (l0, false)], ctx)?)
}

/// Searching computer over a decider `d` whose inputs are `k` function
/// inputs followed by `l` production inputs and `l` consumption inputs.
/// While the (single) no-voter is present it keeps adjusting each output,
/// recording every change on the decider's inputs. The result has an
/// unbounded reachable space and is flagged accordingly.
pub fn search_crc(d: &Crd, k: usize) -> Result<Crc> {
    let extra = d.inputs().len().checked_sub(k).unwrap_or(usize::MAX);
    if extra == usize::MAX || !extra.is_multiple_of(2) || extra == 0 {
        return Err(CompileError::Invalid(format!(
            "decider has {} inputs, expected {k} plus a nonzero even number",
            d.inputs().len()
        )));
    }
    let l = extra / 2;
    let no: Vec<SpeciesId> = d.voters().iter().filter(|(_, v)| !v).map(|&(s, _)| s).collect();
    let [l0] = no[..] else {
        return Err(CompileError::Invalid(format!(
            "expected exactly one no-voter, found {}",
            no.len()
        )));
    };
    let crn = d.crn();
    let mut b = copy_species(crn)?;
    for r in crn.reactions() {
        b.push(r.clone());
    }
    let ys = (0..l)
        .map(|j| fresh(&mut b, &if l == 1 { "Y".to_string() } else { format!("Y{}", j + 1) }))
        .collect::<Result<Vec<_>>>()?;
    for j in 0..l {
        let yp = d.inputs()[k + j];
        let yc = d.inputs()[k + l + j];
        b.push(Reaction::new(&[(l0, 1)], &[(l0, 1), (yp, 1), (ys[j], 1)], 1.0)?);
        b.push(Reaction::new(&[(l0, 1), (ys[j], 1)], &[(l0, 1), (yc, 1)], 1.0)?);
    }
    let out = b.build();
    let mut ctx = Configuration::zeros(out.species_count());
    for (s, &n) in d.context().counts().iter().enumerate() {
        ctx.set(s, n);
    }
    let inputs = d.inputs()[..k].to_vec();
    Ok(Crc::new(out, inputs, ys, ctx)?.with_bounded(false))
}

/// The `search` backend: the graph decider of the fast computer, read as a
/// decider of the difference encoding (claims on the production side,
/// computed output on the consumption side), wrapped by [`search_crc`].
pub fn search_backend(f: &PiecewiseAffineFn, opts: &CompileOptions) -> Result<Crc> {
    let fast = compile_piecewise(f, opts)?.crc;
    search_from_computer(&fast)
}

pub(crate) fn search_from_computer(fast: &Crc) -> Result<Crc> {
    let gd = graph_decider(fast)?;
    let k = fast.inputs().len();
    let claims = &gd.inputs()[k..];
    let produced: Vec<SpeciesId> = fast
        .outputs()
        .iter()
        .map(|&y| {
            let name = format!("{}^P", fast.crn().name(y));
            gd.crn().id(&name).expect("graph decider names its production species")
        })
        .collect();
    let inputs = gd.inputs()[..k]
        .iter()
        .chain(claims)
        .chain(&produced)
        .copied()
        .collect();
    let d = Crd::new(gd.crn().clone(), inputs, gd.voters().to_vec(), gd.context().clone())?;
    search_crc(&d, k)
}
