//! Brute-force centralizer of one member of a dual pair in ŝp_2N(C_q),
//! restricted to a window of generators and compared with the windowed
//! image of the other member.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::linalg::RowReducer;
use super::DecompError;
use crate::toroidal::{bracket, gen, generators, DualPair, Family, Gen, Pair, Side, ToroidalElement};

/// (i, j, a, b), with (0, 0, 0, 0) standing for c.
type Coord = (usize, usize, i64, i64);

/// A selected unknown with its coordinates.
type Unknown<'a> = (&'a Gen, &'a ToroidalElement, Vec<(usize, BigRational)>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentralizerCheck {
    /// The member whose centralizer is computed.
    pub of: Side,
    pub t0_degree: i64,
    /// Independent ŝp_2N generators of this t0-degree in the window.
    pub unknowns: usize,
    pub kernel_dim: usize,
    pub image_dim: usize,
    pub union_dim: usize,
    /// Kernel basis vectors with a g or h component.
    pub gh_directions: usize,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentralizerReport {
    pub pair: Pair,
    pub m: usize,
    pub n: usize,
    pub window: i64,
    pub s0: String,
    pub checks: Vec<CentralizerCheck>,
    pub passed: bool,
}

fn coords(
    x: &ToroidalElement,
    s0: &BigRational,
    index: &mut HashMap<Coord, usize>,
) -> Result<Vec<(usize, BigRational)>, DecompError> {
    let mut acc: BTreeMap<usize, BigRational> = BTreeMap::new();
    let mut put = |k: Coord, v: BigRational, index: &mut HashMap<Coord, usize>| {
        let l = index.len();
        let c = *index.entry(k).or_insert(l);
        *acc.entry(c).or_insert_with(BigRational::zero) += v;
    };
    for (&(i, j), t) in x.entries() {
        for (&(a, b), c) in t.terms() {
            put((i, j, a, b), c.specialize(s0)?, index);
        }
    }
    if !x.central().is_zero() {
        put((0, 0, 0, 0), x.central().specialize(s0)?, index);
    }
    Ok(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect())
}

fn rank_of(rows: &[Vec<(usize, BigRational)>]) -> usize {
    let mut r = RowReducer::new(usize::MAX);
    for x in rows {
        r.insert_rational(x.iter().cloned());
    }
    r.rank()
}

fn embedded(dp: &DualPair, side: Side, gens: &[Gen]) -> Result<Vec<(Gen, ToroidalElement)>, DecompError> {
    gens.iter().map(|g| Ok((*g, dp.embed_gen(side, g)?))).collect()
}

fn member(dp: &DualPair, side: Side, w: i64) -> Vec<Gen> {
    match side {
        Side::Finite => dp.finite_generators(),
        Side::Toroidal => generators(dp.source(Side::Toroidal), w, w),
    }
}

/// x ↦ σ(x) for a permutation σ of the oscillator indices 1..=N, acting on
/// both halves of the 2N × 2N matrix.
fn permute(x: &ToroidalElement, sigma: &[usize]) -> ToroidalElement {
    let big_n = sigma.len();
    let p = |i: usize| if i <= big_n { sigma[i - 1] } else { big_n + sigma[i - big_n - 1] };
    let mut out = ToroidalElement::central_element(x.algebra(), x.central().clone());
    for (&(i, j), t) in x.entries() {
        out.add_entry(p(i), p(j), t);
    }
    out
}

/// The index permutation of τ ∈ O_n \ SO_n (swap of the superscripts n/2 and
/// n/2 + 1) when the finite member is O_n with n even.
fn tau_permutation(dp: &DualPair) -> Option<Vec<usize>> {
    if dp.pair != Pair::SoSp || !dp.n.is_multiple_of(2) {
        return None;
    }
    let (r, r2) = (dp.n / 2, dp.n / 2 + 1);
    let mut sigma: Vec<usize> = (1..=dp.big_n()).collect();
    for i in 1..=dp.m {
        sigma.swap(dp.pi(i, r) - 1, dp.pi(i, r2) - 1);
    }
    Some(sigma)
}

fn equations(
    basis: &[Unknown],
    f: impl Fn(&ToroidalElement) -> Result<ToroidalElement, DecompError>,
    s0: &BigRational,
    eqs: &mut RowReducer,
) -> Result<(), DecompError> {
    let mut index = HashMap::new();
    let mut rows: BTreeMap<usize, Vec<(usize, BigRational)>> = BTreeMap::new();
    for (u, (_, x, _)) in basis.iter().enumerate() {
        for (c, v) in coords(&f(x)?, s0, &mut index)? {
            rows.entry(c).or_default().push((u, v));
        }
    }
    for r in rows.into_values() {
        eqs.insert_rational(r);
    }
    Ok(())
}

fn check_block(
    of: Side,
    a: i64,
    unknowns: &[(Gen, ToroidalElement)],
    constraints: &[(Gen, ToroidalElement)],
    tau: Option<&[usize]>,
    image: &[(Gen, ToroidalElement)],
    s0: &BigRational,
) -> Result<CentralizerCheck, DecompError> {
    let mut index = HashMap::new();
    // a maximal independent family of unknowns
    let mut sel = RowReducer::new(usize::MAX);
    let mut basis: Vec<Unknown> = Vec::new();
    for (g, x) in unknowns.iter().filter(|(g, _)| g.a == a) {
        let v = coords(x, s0, &mut index)?;
        if sel.insert_rational(v.iter().cloned()) {
            basis.push((g, x, v));
        }
    }
    let mut eqs = RowReducer::new(basis.len());
    for (_, y) in constraints {
        equations(&basis, |x| Ok(bracket(x, y)?), s0, &mut eqs)?;
    }
    if let Some(sigma) = tau {
        equations(&basis, |x| Ok(permute(x, sigma).sub(x)), s0, &mut eqs)?;
    }
    let kernel = eqs.kernel();
    let mut kvecs = Vec::new();
    let mut gh = 0;
    for k in &kernel {
        let mut acc: BTreeMap<usize, BigRational> = BTreeMap::new();
        let mut touches_gh = false;
        for (u, c) in k {
            let (g, _, v) = &basis[*u];
            touches_gh |= matches!(g.family, Family::G | Family::H);
            let c = BigRational::from_integer(c.clone());
            for (i, x) in v {
                *acc.entry(*i).or_insert_with(BigRational::zero) += &c * x;
            }
        }
        gh += touches_gh as usize;
        kvecs.push(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect::<Vec<_>>());
    }
    let mut ivecs = Vec::new();
    for (_, x) in image.iter().filter(|(g, _)| g.a == a) {
        ivecs.push(coords(x, s0, &mut index)?);
    }
    let kernel_dim = rank_of(&kvecs);
    let image_dim = rank_of(&ivecs);
    let mut all = kvecs.clone();
    all.extend(ivecs.iter().cloned());
    let union_dim = rank_of(&all);
    Ok(CentralizerCheck {
        of,
        t0_degree: a,
        unknowns: basis.len(),
        kernel_dim,
        image_dim,
        union_dim,
        gh_directions: gh,
        equal: kernel_dim == image_dim && image_dim == union_dim,
    })
}

/// For each member M: the x in the window |a|, |b| ≤ `window` of ŝp_2N(C_q)
/// with [x, M] = 0 (M tested on its generators in the window one step larger)
/// must span exactly the windowed image of the other member. A finite O_n
/// with n even also imposes τ(x) = x, since so_n alone sees only SO_n.
pub fn centralizer_bruteforce(dp: &DualPair, window: i64, s0: &BigRational) -> Result<CentralizerReport, DecompError> {
    let target = dp.target();
    let tau = tau_permutation(dp);
    let unknowns: Vec<(Gen, ToroidalElement)> =
        generators(target, window, window).into_iter().map(|g| Ok((g, gen(target, &g)?))).collect::<Result<_, DecompError>>()?;
    let mut jobs = Vec::new();
    for of in [Side::Finite, Side::Toroidal] {
        let other = if of == Side::Finite { Side::Toroidal } else { Side::Finite };
        let constraints = embedded(dp, of, &member(dp, of, window + 1))?;
        let image = embedded(dp, other, &member(dp, other, window))?;
        for a in -window..=window {
            jobs.push((of, a, constraints.clone(), image.clone()));
        }
    }
    let checks: Vec<CentralizerCheck> = jobs
        .par_iter()
        .map(|(of, a, cons, img)| {
            let t = if *of == Side::Finite { tau.as_deref() } else { None };
            check_block(*of, *a, &unknowns, cons, t, img, s0)
        })
        .collect::<Result<_, _>>()?;
    let passed = checks.iter().all(|c| c.equal);
    Ok(CentralizerReport { pair: dp.pair, m: dp.m, n: dp.n, window, s0: s0.to_string(), checks, passed })
}
