//! The φ/φ̄ relabeling of oscillator modes, the determinant elements
//! A_ℓ, Ā_ℓ, B_ℓ, B̄_{n/2}, the joint highest-weight vectors built from them,
//! and the weight functionals η_μ on the toroidal Cartan parts.

pub mod lemmas;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classical_weights::{
    group_element_apply, so_weight, tilde_partition, torus_character, GroupElement, Group, WeightError, WeightLabel,
};
use crate::half::Half;
use crate::qfield::{omega, QMode, QScalar};
use crate::toroidal::{classify, AlgError, DualPair, Family, Gen, Pair, Side, TriangularClass};
use crate::weyl_fock::{embedded_apply, FockError, FockKind, FockVector, Flavor, Mode, Species, WeylElement};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HwvError {
    #[error("subscript {0} is not attainable for this flavor")]
    Subscript(Half),
    #[error("index out of range: {0}")]
    Range(String),
    #[error("noncommuting determinant entries {0} and {1}")]
    NonCommuting(String, String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Label(#[from] WeightError),
    #[error("{0}")]
    Fock(#[from] FockError),
    #[error("{0}")]
    Algebra(#[from] AlgError),
}

/// Context of the relabeling: F_N(Z) with N = m n, superscripts 1..n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PhiContext {
    pub m: usize,
    pub n: usize,
    pub flavor: Flavor,
}

impl PhiContext {
    pub fn new(m: usize, n: usize, flavor: Flavor) -> Self {
        PhiContext { m, n, flavor }
    }

    pub fn kind(&self) -> FockKind {
        FockKind::new(self.m * self.n, self.flavor)
    }

    /// 2ε
    fn eps2(&self) -> i64 {
        self.flavor.epsilon().twice()
    }

    /// Subscript −c + ½ − ε of column c.
    pub fn column_subscript(&self, c: i64) -> Half {
        Half::from_twice(-2 * c + 1 - self.eps2())
    }

    /// α(r, a, i) = (a − r + ½ − ε) m − i + 1.
    pub fn alpha(&self, r: Half, a: i64, i: usize) -> i64 {
        let t = 2 * a - r.twice() + 1 - self.eps2();
        t * self.m as i64 / 2 - i as i64 + 1
    }

    /// β(r, a, j) = (r + a − ½ + ε) m + j.
    pub fn beta(&self, r: Half, a: i64, j: usize) -> i64 {
        let t = r.twice() + 2 * a - 1 + self.eps2();
        t * self.m as i64 / 2 + j as i64
    }

    /// Subscript x − ½ − ε, the one carried by column x of a replaced entry.
    pub fn shifted(&self, x: i64) -> Half {
        Half::from_twice(2 * x - 1 - self.eps2())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PhiKind {
    Phi,
    PhiBar,
}

/// φ^k_a or φ̄^k_a.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PhiIndex {
    pub kind: PhiKind,
    pub k: usize,
    pub a: Half,
}

impl PhiIndex {
    pub fn phi(k: usize, a: Half) -> Self {
        PhiIndex { kind: PhiKind::Phi, k, a }
    }

    pub fn phibar(k: usize, a: Half) -> Self {
        PhiIndex { kind: PhiKind::PhiBar, k, a }
    }
}

impl fmt::Display for PhiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            PhiKind::Phi => "phi",
            PhiKind::PhiBar => "phibar",
        };
        write!(f, "{name}^{}_{}", self.k, self.a)
    }
}

/// ψ_i^k(r) ↦ φ^k_{(r+½−ε)m−i+½−ε}, ψ̄_i^k(r) ↦ φ̄^k_{(r−½+ε)m+i−½−ε}.
pub fn phi_map(ctx: &PhiContext, species: Species, i: usize, k: usize, r: Half) -> Result<PhiIndex, HwvError> {
    if !(1..=ctx.m).contains(&i) || !(1..=ctx.n).contains(&k) {
        return Err(HwvError::Range(format!("(i, k) = ({i}, {k}) with m = {}, n = {}", ctx.m, ctx.n)));
    }
    if !ctx.flavor.contains(r) {
        return Err(HwvError::Subscript(r));
    }
    let (m, e2, i2) = (ctx.m as i64, ctx.eps2(), 2 * i as i64);
    Ok(match species {
        Species::Psi => PhiIndex::phi(k, Half::from_twice((r.twice() + 1 - e2) * m - i2 + 1 - e2)),
        Species::PsiBar => PhiIndex::phibar(k, Half::from_twice((r.twice() - 1 + e2) * m + i2 - 1 - e2)),
    })
}

/// Inverse of `phi_map`, returning the mode ψ_{π(i,k)}(r) or ψ̄_{π(i,k)}(r).
pub fn phi_to_mode(ctx: &PhiContext, x: &PhiIndex) -> Result<Mode, HwvError> {
    if !(1..=ctx.n).contains(&x.k) {
        return Err(HwvError::Range(format!("superscript {} with n = {}", x.k, ctx.n)));
    }
    let (m, e2) = (ctx.m as i64, ctx.eps2());
    let shifted = match x.kind {
        PhiKind::Phi => x.a.twice() - 1 + e2,
        PhiKind::PhiBar => x.a.twice() + 1 + e2,
    };
    if shifted % 2 != 0 {
        return Err(HwvError::Subscript(x.a));
    }
    let base = shifted / 2;
    let offset = (x.k - 1) * ctx.m;
    Ok(match x.kind {
        PhiKind::Phi => {
            // base = u m − i with u = r + ½ − ε
            let mut i = (-base).rem_euclid(m);
            if i == 0 {
                i = m;
            }
            let u = (base + i) / m;
            Mode::psi(i as usize + offset, Half::from_twice(2 * u - 1 + e2))
        }
        PhiKind::PhiBar => {
            // base = w m + i with w = r − ½ + ε
            let mut i = base.rem_euclid(m);
            if i == 0 {
                i = m;
            }
            let w = (base - i) / m;
            Mode::psibar(i as usize + offset, Half::from_twice(2 * w + 1 - e2))
        }
    })
}

/// [x, y] in the Weyl algebra, from [φ̄_a^k, φ_b^l] = δ_{kl} δ_{a+b,−2ε}.
pub fn phi_commutator(ctx: &PhiContext, x: &PhiIndex, y: &PhiIndex) -> i64 {
    if x.k != y.k || (x.a + y.a).twice() != -2 * ctx.eps2() {
        return 0;
    }
    match (x.kind, y.kind) {
        (PhiKind::PhiBar, PhiKind::Phi) => 1,
        (PhiKind::Phi, PhiKind::PhiBar) => -1,
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DetFamily {
    A,
    ABar,
    B,
    BBar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DeterminantSpec {
    pub family: DetFamily,
    pub ell: usize,
}

impl DeterminantSpec {
    pub fn new(family: DetFamily, ell: usize) -> Self {
        DeterminantSpec { family, ell }
    }
}

impl fmt::Display for DeterminantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            DetFamily::A => "A",
            DetFamily::ABar => "Abar",
            DetFamily::B => "B",
            DetFamily::BBar => "Bbar",
        };
        write!(f, "{name}_{}", self.ell)
    }
}

/// (ℓ̄₁, ℓ̄₂) from ℓ = ℓ₁ m + ℓ₂ with 1 ≤ ℓ₂ ≤ m.
pub fn ell_bar(ell: usize, m: usize) -> (usize, usize) {
    if ell == 0 {
        return (0, 0);
    }
    let l1 = (ell - 1) / m;
    let l2 = ell - l1 * m;
    if l1.is_multiple_of(2) {
        (l1 / 2 * m + l2, l1 / 2 * m)
    } else {
        (l1.div_ceil(2) * m, (l1 - 1) / 2 * m + l2)
    }
}

/// A matrix entry: an integer multiple of φ or φ̄.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub coeff: i64,
    pub phi: PhiIndex,
}

impl Entry {
    fn plain(phi: PhiIndex) -> Self {
        Entry { coeff: 1, phi }
    }
}

/// Square matrix of Weyl-algebra entries whose determinant is taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetMatrix {
    pub rows: Vec<Vec<Entry>>,
}

impl DetMatrix {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// The matrix with column `col` (1-based) replaced entrywise.
    pub fn replace_column(&self, col: usize, f: impl Fn(usize, &Entry) -> Entry) -> DetMatrix {
        let mut rows = self.rows.clone();
        for (t, row) in rows.iter_mut().enumerate() {
            row[col - 1] = f(t + 1, &row[col - 1]);
        }
        DetMatrix { rows }
    }
}

pub fn determinant_matrix(ctx: &PhiContext, spec: &DeterminantSpec) -> Result<DetMatrix, HwvError> {
    let (n, ell) = (ctx.n, spec.ell);
    if ell == 0 || ell > n {
        return Err(HwvError::Domain(format!("{spec} needs 1 ≤ ℓ ≤ n = {n}")));
    }
    let sub = |c: usize| ctx.column_subscript(c as i64);
    let rows = match spec.family {
        DetFamily::A => (1..=ell).map(|k| (1..=ell).map(|c| Entry::plain(PhiIndex::phi(k, sub(c)))).collect()).collect(),
        DetFamily::ABar => {
            let size = n - ell + 1;
            (1..=size)
                .map(|t| (1..=size).map(|c| Entry::plain(PhiIndex::phibar(n + 1 - t, sub(c)))).collect())
                .collect()
        }
        DetFamily::B | DetFamily::BBar => {
            if spec.family == DetFamily::BBar && (n % 2 == 1 || 2 * ell != n) {
                return Err(HwvError::Domain(format!("{spec} needs n even and ℓ = n/2 (n = {n})")));
            }
            let (l1, l2) = ell_bar(ell, ctx.m);
            (1..=ell)
                .map(|t| {
                    let (up, down) = if spec.family == DetFamily::BBar && t == n / 2 { (n / 2 + 1, n / 2) } else { (t, n - t + 1) };
                    let mut row: Vec<Entry> = (1..=l1).map(|c| Entry::plain(PhiIndex::phi(up, sub(c)))).collect();
                    row.extend((1..=l2).map(|c| Entry::plain(PhiIndex::phibar(down, sub(c)))));
                    row
                })
                .collect()
        }
    };
    Ok(DetMatrix { rows })
}

fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, i64)>) {
        let k = used.len();
        if cur.len() == k {
            let mut inv = 0;
            for a in 0..k {
                for b in a + 1..k {
                    if cur[a] > cur[b] {
                        inv += 1;
                    }
                }
            }
            out.push((cur.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for x in 0..k {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                go(cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Leibniz expansion, after checking that entries which can share a term commute.
pub fn expand_determinant(ctx: &PhiContext, mat: &DetMatrix) -> Result<WeylElement, HwvError> {
    let k = mat.size();
    for r1 in 0..k {
        for r2 in r1 + 1..k {
            for c1 in 0..k {
                for c2 in 0..k {
                    if c1 == c2 {
                        continue;
                    }
                    let (x, y) = (&mat.rows[r1][c1], &mat.rows[r2][c2]);
                    if x.coeff != 0 && y.coeff != 0 && phi_commutator(ctx, &x.phi, &y.phi) != 0 {
                        return Err(HwvError::NonCommuting(x.phi.to_string(), y.phi.to_string()));
                    }
                }
            }
        }
    }
    let mut out = WeylElement::zero();
    for (perm, sign) in permutations(k) {
        let mut coeff = sign;
        let mut word = Vec::with_capacity(k);
        for (r, &c) in perm.iter().enumerate() {
            let e = &mat.rows[r][c];
            coeff *= e.coeff;
            word.push(phi_to_mode(ctx, &e.phi)?);
        }
        if coeff != 0 {
            out.add_word(word, QScalar::from_int(coeff));
        }
    }
    Ok(out)
}

pub fn build_determinant(ctx: &PhiContext, spec: &DeterminantSpec) -> Result<WeylElement, HwvError> {
    expand_determinant(ctx, &determinant_matrix(ctx, spec)?)
}

/// A joint highest-weight vector with the weights it is expected to carry.
#[derive(Debug, Clone, PartialEq)]
pub struct Hwv {
    pub label: WeightLabel,
    pub vector: FockVector,
    /// Eigenvalues of the finite-side diagonal Cartan elements E_pp, f_pp or
    /// e_pp (p ≤ ⌊n/2⌋).
    pub finite_weight: Vec<i64>,
    /// The argument of η.
    pub eta_weight: Vec<i64>,
    pub factors: Vec<(DeterminantSpec, i64)>,
}

impl Hwv {
    pub fn factor_string(&self) -> String {
        if self.factors.is_empty() {
            return "|0>".into();
        }
        let f: Vec<String> = self.factors.iter().map(|(d, e)| format!("{d}^{e}")).collect();
        format!("{}|0>", f.join(" "))
    }
}

fn check_pair_flavor(dp: &DualPair, flavor: Flavor) -> Result<(), HwvError> {
    if dp.pair == Pair::SpSo && flavor.is_integer() {
        return Err(HwvError::Domain(
            "the (Sp_2n, so_m(C_q)) pair is only defined on F_N(Z+1/2); the integer flavor is excluded".into(),
        ));
    }
    Ok(())
}

/// Determinant factors of v_μ with the finite weight and η argument, without
/// expanding the vector.
pub fn hwv_factors(dp: &DualPair, label: &WeightLabel, flavor: Flavor) -> Result<HwvPlan, HwvError> {
    check_pair_flavor(dp, flavor)?;
    let n = dp.n;
    let mismatch = || HwvError::Domain(format!("label {label} does not belong to the pair {}", dp.pair));
    let mut factors: Vec<(DeterminantSpec, i64)> = Vec::new();
    let (finite_weight, eta_weight) = match (dp.pair, label.group) {
        (Pair::GlGl, Group::Gl(k)) if k == n => {
            let mu = &label.entries;
            let p = mu.iter().filter(|&&x| x > 0).count();
            let s = n - mu.iter().filter(|&&x| x < 0).count() + 1;
            for k in 1..=p {
                let next = if k < p { mu[k] } else { 0 };
                factors.push((DeterminantSpec::new(DetFamily::A, k), mu[k - 1] - next));
            }
            for k in s..=n {
                let prev = if k > s { mu[k - 2] } else { 0 };
                factors.push((DeterminantSpec::new(DetFamily::ABar, k), prev - mu[k - 1]));
            }
            (mu.clone(), mu.clone())
        }
        (Pair::SpSo, Group::Sp(k)) if k == n => {
            let mu = &label.entries;
            for k in 1..=n {
                factors.push((DeterminantSpec::new(DetFamily::A, k), mu[k - 1] - mu[k]));
            }
            (mu[..n].to_vec(), mu[..n].to_vec())
        }
        (Pair::SoSp, Group::O(k)) if k == n => {
            let p = label.expanded();
            for k in 1..=n {
                let next = if k < n { p[k] } else { 0 };
                factors.push((DeterminantSpec::new(DetFamily::B, k), p[k - 1] - next));
            }
            (so_weight(&p), p)
        }
        (Pair::SoSp, Group::So(k)) if k == n => {
            let r = n / 2;
            let mut p: Vec<i64> = label.entries.iter().map(|x| x.abs()).collect();
            p.resize(n, 0);
            let barred = r > 0 && n.is_multiple_of(2) && label.entries[r - 1] < 0;
            for k in 1..=n {
                let next = if k < n { p[k] } else { 0 };
                let fam = if barred && k == r { DetFamily::BBar } else { DetFamily::B };
                factors.push((DeterminantSpec::new(fam, k), p[k - 1] - next));
            }
            (label.entries.clone(), p)
        }
        _ => return Err(mismatch()),
    };
    factors.retain(|(_, e)| *e != 0);
    Ok(HwvPlan { factors, finite_weight, eta_weight })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HwvPlan {
    pub factors: Vec<(DeterminantSpec, i64)>,
    pub finite_weight: Vec<i64>,
    pub eta_weight: Vec<i64>,
}

/// v_μ (or v_μ̃, v̄_μ) as a Fock vector.
pub fn build_hwv(dp: &DualPair, label: &WeightLabel, flavor: Flavor) -> Result<Hwv, HwvError> {
    let HwvPlan { factors, finite_weight, eta_weight } = hwv_factors(dp, label, flavor)?;
    let ctx = PhiContext::new(dp.m, dp.n, flavor);
    let kind = ctx.kind();
    let mut v = FockVector::vacuum();
    for (spec, e) in &factors {
        let d = build_determinant(&ctx, spec)?;
        for _ in 0..*e {
            v = d.apply(&kind, &v)?;
        }
    }
    Ok(Hwv { label: label.clone(), vector: v, finite_weight, eta_weight, factors })
}

/// J_{i,ℓ} = {r ∈ Z : 1 ≤ (r − ½ + ε) m + i ≤ ℓ}.
pub fn j_set(ctx: &PhiContext, i: usize, ell: usize) -> Vec<Half> {
    let (m, i, ell) = (ctx.m as i64, i as i64, ell as i64);
    let lo = (1 - i).div_euclid(m) + i64::from((1 - i).rem_euclid(m) != 0);
    let hi = (ell - i).div_euclid(m);
    (lo..=hi).map(|w| Half::from_twice(2 * w + 1 - ctx.eps2())).collect()
}

/// J̄_{i,ℓ} = {r ∈ Z : 1 ≤ (−r + ½ − ε) m − i + 1 ≤ ℓ}.
pub fn jbar_set(ctx: &PhiContext, i: usize, ell: usize) -> Vec<Half> {
    let (m, i, ell) = (ctx.m as i64, i as i64, ell as i64);
    let lo = i.div_euclid(m) + i64::from(i.rem_euclid(m) != 0);
    let hi = (ell + i - 1).div_euclid(m);
    (lo..=hi).map(|u| Half::from_twice(1 - ctx.eps2() - 2 * u)).collect()
}

/// Σ_{r ∈ J} q^{−br} (or q^{+br} with `sign` = −1).
fn qsum(rs: &[Half], b: i64, sign: i64) -> QScalar {
    let mut out = QScalar::zero();
    for r in rs {
        out += &QScalar::s_pow(-sign * b * r.twice());
    }
    out
}

/// The constant part of η on the t1^b Cartan element: the vacuum eigenvalue.
pub fn eta_constant(dp: &DualPair, flavor: Flavor, b: i64) -> QScalar {
    let n = dp.n as i64;
    let w = omega(flavor.is_integer(), b);
    let eps_n = if flavor.is_integer() { QScalar::from_ratio(n, 2) } else { QScalar::zero() };
    match dp.pair {
        Pair::GlGl | Pair::SoSp => eps_n + w.scale_int(n),
        Pair::SpSo => w.scale_int(2 * n),
    }
}

/// η_μ on a toroidal-side Cartan generator: E_ii t1^b, f_ii(0,b), e_ii(0,b), or c.
pub fn eta_eval(dp: &DualPair, mu: &[i64], flavor: Flavor, g: &Gen) -> Result<QScalar, HwvError> {
    check_pair_flavor(dp, flavor)?;
    let n = dp.n;
    if mu.len() < n {
        return Err(HwvError::Domain(format!("η needs {n} entries")));
    }
    if g.is_central() {
        return Ok(QScalar::from_int(-dp.central_lift()));
    }
    let want = match dp.pair {
        Pair::GlGl => Family::E,
        Pair::SoSp => Family::F,
        Pair::SpSo => Family::SoE,
    };
    if g.family != want || g.i != g.j || g.a != 0 || g.i == 0 || g.i > dp.m {
        return Err(HwvError::Domain(format!("{g} is not a Cartan generator of the toroidal side of {}", dp.pair)));
    }
    let ctx = PhiContext::new(dp.m, n, flavor);
    let (i, b) = (g.i, g.b);
    let at = |k: usize| if k <= n { mu[k - 1] } else { 0 };
    let mut out = eta_constant(dp, flavor, b);
    match dp.pair {
        Pair::GlGl => {
            let p = mu[..n].iter().filter(|&&x| x > 0).count();
            let s = n - mu[..n].iter().filter(|&&x| x < 0).count() + 1;
            for k in 1..p {
                out += &qsum(&j_set(&ctx, i, k), b, 1).scale_int(at(k) - at(k + 1));
            }
            if p >= 1 {
                out += &qsum(&j_set(&ctx, i, p), b, 1).scale_int(at(p));
            }
            if s <= n {
                out += &qsum(&jbar_set(&ctx, i, n - s + 1), b, 1).scale_int(at(s));
            }
            for k in s + 1..=n {
                out -= &qsum(&jbar_set(&ctx, i, n - k + 1), b, 1).scale_int(at(k - 1) - at(k));
            }
        }
        Pair::SoSp => {
            for k in 1..=n {
                let (k1, k2) = ell_bar(k, dp.m);
                let t = qsum(&j_set(&ctx, i, k1), b, 1) - qsum(&jbar_set(&ctx, i, k2), b, 1);
                out += &t.scale_int(at(k) - at(k + 1));
            }
        }
        Pair::SpSo => {
            for k in 1..=n {
                let t = qsum(&j_set(&ctx, i, k), b, 1) - qsum(&j_set(&ctx, dp.m + 1 - i, k), b, -1);
                out += &t.scale_int(at(k) - at(k + 1));
            }
        }
    }
    Ok(out)
}

/// The toroidal-side Cartan generators with |b| ≤ b_max, c last.
pub fn cartan_generators(dp: &DualPair, b_max: i64) -> Vec<Gen> {
    let fam = match dp.pair {
        Pair::GlGl => Family::E,
        Pair::SoSp => Family::F,
        Pair::SpSo => Family::SoE,
    };
    let mut out: Vec<Gen> =
        (1..=dp.m).flat_map(|i| (-b_max..=b_max).map(move |b| Gen::new(fam, i, i, 0, b))).collect();
    out.push(Gen::central());
    out
}

/// Finite-side raising generators, i.e. the finite generators in the positive part.
pub fn finite_raising(dp: &DualPair) -> Result<Vec<Gen>, HwvError> {
    let alg = dp.source(Side::Finite);
    let mut out = Vec::new();
    for g in dp.finite_generators() {
        // a = b = 0, so only the finite root decides
        if classify(alg, Flavor::HalfInteger, &g)? == TriangularClass::Plus {
            out.push(g);
        }
    }
    Ok(out)
}

/// Finite-side diagonal Cartan generators whose eigenvalues make up `finite_weight`.
pub fn finite_cartan(dp: &DualPair) -> Vec<Gen> {
    match dp.pair {
        Pair::GlGl => (1..=dp.n).map(|p| Gen::new(Family::E, p, p, 0, 0)).collect(),
        Pair::SoSp => (1..=dp.n / 2).map(|p| Gen::new(Family::SoE, p, p, 0, 0)).collect(),
        Pair::SpSo => (1..=dp.n).map(|p| Gen::new(Family::F, p, p, 0, 0)).collect(),
    }
}

/// A random torus element of the pair's group with small rational entries:
/// n free entries for GL_n and Sp_2n (inverses appended), ⌊n/2⌋ for SO_n.
pub fn sample_torus(dp: &DualPair, rng: &mut impl Rng) -> Vec<BigRational> {
    let mut pick = || loop {
        let num: i64 = rng.gen_range(-7..=7);
        let den: i64 = rng.gen_range(1..=5);
        if num != 0 && num.abs() != den {
            return BigRational::new(BigInt::from(num), BigInt::from(den));
        }
    };
    let n = dp.n;
    match dp.pair {
        Pair::GlGl => (0..n).map(|_| pick()).collect(),
        Pair::SpSo => {
            let h: Vec<BigRational> = (0..n).map(|_| pick()).collect();
            let inv: Vec<BigRational> = h.iter().map(|x| x.recip()).collect();
            h.into_iter().chain(inv).collect()
        }
        Pair::SoSp => {
            let half: Vec<BigRational> = (0..n / 2).map(|_| pick()).collect();
            let mut full = vec![BigRational::from_integer(BigInt::from(1)); n];
            for (k, x) in half.iter().enumerate() {
                full[k] = x.clone();
                full[n - 1 - k] = x.recip();
            }
            full
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub generator: String,
    pub status: Status,
    pub lhs: String,
    pub rhs: String,
}

impl CheckRecord {
    pub fn new(check_id: &str, generator: String, ok: bool, lhs: String, rhs: String) -> Self {
        CheckRecord { check_id: check_id.into(), generator, status: if ok { Status::Pass } else { Status::Fail }, lhs, rhs }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HwvReport {
    pub pair: Pair,
    pub m: usize,
    pub n: usize,
    pub flavor: Flavor,
    pub label: WeightLabel,
    pub factors: String,
    pub vector: String,
    pub q_mode: String,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

impl HwvReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub a_max: i64,
    pub b_max: i64,
    pub mode: QMode,
    pub seed: u64,
    pub torus_samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { a_max: 2, b_max: 2, mode: QMode::Symbolic, seed: 0, torus_samples: 2 }
    }
}

fn eigen_check(mode: &QMode, xv: &FockVector, lambda: &QScalar, v: &FockVector) -> bool {
    xv.sub(&v.scale(lambda)).is_zero_in(mode)
}

/// Checks (i)–(v) for a built highest-weight vector.
pub fn verify_hwv(dp: &DualPair, hwv: &Hwv, flavor: Flavor, opts: &VerifyOptions) -> Result<HwvReport, HwvError> {
    check_pair_flavor(dp, flavor)?;
    let v = &hwv.vector;
    let mode = &opts.mode;
    let tor = dp.source(Side::Toroidal);
    let mut raising = Vec::new();
    for g in dp.toroidal_generators(opts.a_max, opts.b_max) {
        if !g.is_central() && classify(tor, flavor, &g)? == TriangularClass::Plus {
            raising.push(g);
        }
    }
    let mut checks: Vec<CheckRecord> = raising
        .par_iter()
        .map(|g| {
            let w = embedded_apply(dp, Side::Toroidal, g, flavor, v)?;
            let ok = w.is_zero_in(mode);
            Ok(CheckRecord::new("toroidal_raising_kills", g.to_string(), ok, if ok { "0".into() } else { w.to_string() }, "0".into()))
        })
        .collect::<Result<_, HwvError>>()?;
    for g in finite_raising(dp)? {
        let w = embedded_apply(dp, Side::Finite, &g, flavor, v)?;
        let ok = w.is_zero_in(mode);
        checks.push(CheckRecord::new("finite_raising_kills", g.to_string(), ok, if ok { "0".into() } else { w.to_string() }, "0".into()));
    }
    let cartan = cartan_generators(dp, opts.b_max);
    let eta_checks: Vec<CheckRecord> = cartan
        .par_iter()
        .map(|g| {
            let eta = eta_eval(dp, &hwv.eta_weight, flavor, g)?;
            let w = embedded_apply(dp, Side::Toroidal, g, flavor, v)?;
            let ok = eigen_check(mode, &w, &eta, v);
            let lhs = if ok { eta.to_string() } else { w.to_string() };
            Ok(CheckRecord::new("cartan_eta", g.to_string(), ok, lhs, eta.to_string()))
        })
        .collect::<Result<_, HwvError>>()?;
    checks.extend(eta_checks);
    for (g, &wt) in finite_cartan(dp).iter().zip(&hwv.finite_weight) {
        let w = embedded_apply(dp, Side::Finite, g, flavor, v)?;
        let lambda = QScalar::from_int(wt);
        let ok = eigen_check(mode, &w, &lambda, v);
        checks.push(CheckRecord::new("finite_weight_lie", g.to_string(), ok, if ok { wt.to_string() } else { w.to_string() }, wt.to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.torus_samples {
        let h = sample_torus(dp, &mut rng);
        let w = group_element_apply(dp, &GroupElement::Diagonal(h.clone()), v)?;
        let chi = torus_character(&h, &hwv.finite_weight);
        let ok = eigen_check(mode, &w, &chi, v);
        let hs: Vec<String> = h.iter().map(|x| x.to_string()).collect();
        checks.push(CheckRecord::new(
            "finite_weight_group",
            format!("diag({})", hs.join(",")),
            ok,
            if ok { chi.to_string() } else { w.to_string() },
            chi.to_string(),
        ));
    }
    let depth = hwv.eta_weight.iter().filter(|&&x| x != 0).count();
    if dp.pair == Pair::SoSp && dp.n.is_multiple_of(2) && 2 * depth == dp.n {
        checks.push(tau_identity(dp, flavor)?);
    }
    let passed = checks.iter().all(|c| c.status == Status::Pass);
    Ok(HwvReport {
        pair: dp.pair,
        m: dp.m,
        n: dp.n,
        flavor,
        label: hwv.label.clone(),
        factors: hwv.factor_string(),
        vector: v.to_string(),
        q_mode: mode.name(),
        checks,
        passed,
    })
}

/// τ.B_{n/2}|0⟩ = B̄_{n/2}|0⟩ for n even.
pub fn tau_identity(dp: &DualPair, flavor: Flavor) -> Result<CheckRecord, HwvError> {
    let ctx = PhiContext::new(dp.m, dp.n, flavor);
    let kind = ctx.kind();
    let r = dp.n / 2;
    let b = build_determinant(&ctx, &DeterminantSpec::new(DetFamily::B, r))?.apply(&kind, &FockVector::vacuum())?;
    let bb = build_determinant(&ctx, &DeterminantSpec::new(DetFamily::BBar, r))?.apply(&kind, &FockVector::vacuum())?;
    let tb = group_element_apply(dp, &GroupElement::Tau, &b)?;
    let ok = tb == bb;
    Ok(CheckRecord::new("tau_conjugation", format!("tau.B_{r}|0>"), ok, tb.to_string(), bb.to_string()))
}

/// The O_n label and both variants whose vectors should be checked: v_μ,
/// plus v̄_μ when d(μ) = n/2.
pub fn so_variants(label: &WeightLabel) -> Vec<WeightLabel> {
    let mut out = vec![label.clone()];
    if let Group::O(n) = label.group {
        if !label.tilde && n % 2 == 0 && n > 0 && 2 * label.depth() == n {
            let so = label.so_restriction();
            out.push(so[1].clone());
        }
    }
    out
}

/// μ̃ as a plain partition, for η.
pub fn eta_weight_of(label: &WeightLabel) -> Vec<i64> {
    match label.group {
        Group::O(n) if label.tilde => tilde_partition(&label.entries, n),
        _ => label.entries.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical_weights::enumerate_labels;

    fn h(t: i64) -> Half {
        Half::from_twice(t)
    }

    #[test]
    fn phi_examples() {
        let half = PhiContext::new(1, 1, Flavor::HalfInteger);
        assert_eq!(phi_to_mode(&half, &PhiIndex::phi(1, h(-1))).unwrap(), Mode::psi(1, h(-1)));
        let int = PhiContext::new(1, 1, Flavor::Integer);
        assert_eq!(phi_to_mode(&int, &PhiIndex::phi(1, h(-2))).unwrap(), Mode::psi(1, h(0)));
        let m3 = PhiContext::new(3, 1, Flavor::HalfInteger);
        assert_eq!(phi_to_mode(&m3, &PhiIndex::phibar(1, h(-1))).unwrap(), Mode::psibar(3, h(-1)));
        assert!(phi_to_mode(&int, &PhiIndex::phi(1, h(-1))).is_err());
    }

    #[test]
    fn phi_round_trip() {
        for flavor in Flavor::ALL {
            for m in 1..=3 {
                let ctx = PhiContext::new(m, 2, flavor);
                for i in 1..=m {
                    for k in 1..=2 {
                        for t in -6..=6 {
                            let r = h(t);
                            if !flavor.contains(r) {
                                continue;
                            }
                            for sp in [Species::Psi, Species::PsiBar] {
                                let x = phi_map(&ctx, sp, i, k, r).unwrap();
                                let mode = phi_to_mode(&ctx, &x).unwrap();
                                assert_eq!(mode, Mode { species: sp, index: i + (k - 1) * m, level: r });
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn commutation_matches_modes() {
        // [φ̄_a^k, φ_b^l] against the mode pairing.
        for flavor in Flavor::ALL {
            let ctx = PhiContext::new(2, 2, flavor);
            for a in -8..=8 {
                for b in -8..=8 {
                    let (x, y) = (PhiIndex::phibar(1, h(a)), PhiIndex::phi(1, h(b)));
                    let (Ok(u), Ok(w)) = (phi_to_mode(&ctx, &x), phi_to_mode(&ctx, &y)) else { continue };
                    let expect = if u.index == w.index && u.level + w.level == Half::ZERO { 1 } else { 0 };
                    assert_eq!(phi_commutator(&ctx, &x, &y), expect, "{x} {y}");
                }
            }
        }
    }

    #[test]
    fn determinant_examples() {
        let half = PhiContext::new(1, 2, Flavor::HalfInteger);
        let kind = half.kind();
        let vac = FockVector::vacuum();
        let a1 = build_determinant(&half, &DeterminantSpec::new(DetFamily::A, 1)).unwrap();
        assert_eq!(a1.apply(&kind, &vac).unwrap(), FockVector::basis(vec![Mode::psi(1, h(-1))]));
        let int = PhiContext::new(1, 2, Flavor::Integer);
        let a1 = build_determinant(&int, &DeterminantSpec::new(DetFamily::A, 1)).unwrap();
        assert_eq!(a1.apply(&int.kind(), &vac).unwrap(), FockVector::basis(vec![Mode::psi(1, h(0))]));
        let a2 = build_determinant(&half, &DeterminantSpec::new(DetFamily::A, 2)).unwrap();
        let expect: FockVector =
            "psi[1](-1/2)*psi[2](-3/2)|0> + (-1)*psi[1](-3/2)*psi[2](-1/2)|0>".parse().unwrap();
        assert_eq!(a2.apply(&kind, &vac).unwrap(), expect);
        assert!(build_determinant(&PhiContext::new(1, 3, Flavor::Integer), &DeterminantSpec::new(DetFamily::BBar, 1)).is_err());
    }

    #[test]
    fn ell_bar_sums() {
        for m in 1..=3 {
            for ell in 1..=8 {
                let (a, b) = ell_bar(ell, m);
                assert_eq!(a + b, ell);
            }
        }
        assert_eq!(ell_bar(1, 1), (1, 0));
        assert_eq!(ell_bar(2, 1), (1, 1));
        assert_eq!(ell_bar(3, 2), (2, 1));
    }

    #[test]
    fn alpha_beta_identity() {
        for flavor in Flavor::ALL {
            for m in 1..=3 {
                let ctx = PhiContext::new(m, 2, flavor);
                for t in -7..=7 {
                    let r = h(t);
                    if !flavor.contains(r) {
                        continue;
                    }
                    for a in -2..=2 {
                        for i in 1..=m {
                            for j in 1..=m {
                                let lhs = ctx.shifted(ctx.alpha(r, a, i)) + ctx.shifted(ctx.beta(r, 0, j));
                                let e2 = flavor.epsilon().twice();
                                let rhs = Half::from_twice(2 * (a * m as i64 + j as i64 - i as i64) - 2 * e2);
                                assert_eq!(lhs, rhs);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hwv_examples() {
        let gl = DualPair::new(Pair::GlGl, 1, 1);
        let vac = build_hwv(&gl, &"GL1:[0]".parse().unwrap(), Flavor::HalfInteger).unwrap();
        assert_eq!(vac.vector, FockVector::vacuum());
        let one = build_hwv(&gl, &"GL1:[1]".parse().unwrap(), Flavor::HalfInteger).unwrap();
        assert_eq!(one.vector, FockVector::basis(vec![Mode::psi(1, h(-1))]));
        let gl3 = DualPair::new(Pair::GlGl, 3, 1);
        let neg = build_hwv(&gl3, &"GL1:[-1]".parse().unwrap(), Flavor::HalfInteger).unwrap();
        assert_eq!(neg.vector, FockVector::basis(vec![Mode::psibar(3, h(-1))]));
        let spso = DualPair::new(Pair::SpSo, 1, 1);
        assert!(build_hwv(&spso, &"Sp2:[1,0]".parse().unwrap(), Flavor::Integer).is_err());
    }

    #[test]
    fn eta_examples() {
        for flavor in Flavor::ALL {
            for n in 1..=2 {
                let dp = DualPair::new(Pair::GlGl, 2, n);
                let zero = vec![0; n];
                assert_eq!(eta_eval(&dp, &zero, flavor, &Gen::central()).unwrap(), QScalar::from_int(-2 * n as i64));
                let mut e1 = zero.clone();
                e1[0] = 1;
                for b in -2..=2 {
                    let c = eta_constant(&dp, flavor, b);
                    let top = QScalar::s_pow(-b * (1 - flavor.epsilon().twice()));
                    assert_eq!(eta_eval(&dp, &e1, flavor, &Gen::new(Family::E, 1, 1, 0, b)).unwrap(), &top + &c);
                    assert_eq!(eta_eval(&dp, &e1, flavor, &Gen::new(Family::E, 2, 2, 0, b)).unwrap(), c.clone());
                    assert_eq!(eta_eval(&dp, &zero, flavor, &Gen::new(Family::E, 1, 1, 0, b)).unwrap(), c);
                }
            }
        }
        let sosp = DualPair::new(Pair::SoSp, 1, 3);
        assert_eq!(eta_eval(&sosp, &[0, 0, 0], Flavor::Integer, &Gen::central()).unwrap(), QScalar::from_int(-3));
    }

    #[test]
    fn eta_matches_module_eigenvalues() {
        let cases = [(Pair::GlGl, 1, 2), (Pair::GlGl, 2, 2), (Pair::SoSp, 2, 2), (Pair::SoSp, 1, 3), (Pair::SpSo, 2, 2), (Pair::SpSo, 3, 1)];
        for (pair, m, n) in cases {
            let dp = DualPair::new(pair, m, n);
            for flavor in Flavor::ALL {
                if pair == Pair::SpSo && flavor.is_integer() {
                    continue;
                }
                for label in enumerate_labels(Group::for_pair(&dp), 2) {
                    for variant in so_variants(&label) {
                        let hwv = build_hwv(&dp, &variant, flavor).unwrap();
                        for g in cartan_generators(&dp, 2) {
                            let eta = eta_eval(&dp, &hwv.eta_weight, flavor, &g).unwrap();
                            let w = embedded_apply(&dp, Side::Toroidal, &g, flavor, &hwv.vector).unwrap();
                            assert_eq!(w, hwv.vector.scale(&eta), "{pair} m={m} n={n} {flavor} {variant} {g}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn verify_small_cases() {
        let opts = VerifyOptions { a_max: 2, b_max: 2, ..Default::default() };
        let cases = [(Pair::GlGl, 2, 2), (Pair::SoSp, 1, 2), (Pair::SoSp, 2, 3), (Pair::SpSo, 2, 2)];
        for (pair, m, n) in cases {
            let dp = DualPair::new(pair, m, n);
            for flavor in Flavor::ALL {
                if pair == Pair::SpSo && flavor.is_integer() {
                    continue;
                }
                for label in enumerate_labels(Group::for_pair(&dp), 2) {
                    for variant in so_variants(&label) {
                        let hwv = build_hwv(&dp, &variant, flavor).unwrap();
                        let rep = verify_hwv(&dp, &hwv, flavor, &opts).unwrap();
                        let bad: Vec<_> = rep.failures().collect();
                        assert!(bad.is_empty(), "{pair} m={m} n={n} {flavor} {variant}: {bad:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn so_sp_example_weight() {
        let dp = DualPair::new(Pair::SoSp, 1, 2);
        let hwv = build_hwv(&dp, &"O2:[1,0]".parse().unwrap(), Flavor::Integer).unwrap();
        assert_eq!(hwv.finite_weight, vec![1]);
        let rep = verify_hwv(&dp, &hwv, Flavor::Integer, &VerifyOptions::default()).unwrap();
        assert!(rep.passed);
        assert!(rep.checks.iter().any(|c| c.check_id == "tau_conjugation"));
    }
}
