//! Randomized identity suites: field and torus axioms, the Jacobi identity for
//! the centrally extended algebras, the oscillator representation property,
//! and generator-level checks of the dual pairs.

use std::collections::BTreeMap;
use std::fmt::Display;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::half::Half;
use crate::highest_weight::{CheckRecord, Status};
use crate::qfield::{QMode, QScalar};
use crate::quantum_torus::TorusElement;
use crate::toroidal::{
    bracket, bracket_with, element_labels, gen, graded_label, membership, AlgError, Algebra, AlgebraKind,
    Cocycle, DualPair, Family, Gen, Pair, Side, ToroidalElement,
};
use crate::weyl_fock::{
    embedded_apply, graded_basis, monomial_energy, rho_apply, rho_element, rho_support, rho_support_scan, FockError,
    FockKind, FockVector, Flavor,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("{0}")]
    Algebra(#[from] AlgError),
    #[error("{0}")]
    Fock(#[from] FockError),
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub a_max: i64,
    pub b_max: i64,
    pub samples: usize,
    pub seed: u64,
    pub mode: QMode,
    /// Energy bound for random Fock vectors.
    pub max_energy: Half,
    pub cocycle: Cocycle,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            a_max: 3,
            b_max: 3,
            samples: 500,
            seed: 0,
            mode: QMode::Symbolic,
            max_energy: Half::from_int(3),
            cocycle: Cocycle::Standard,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupSummary {
    pub group: String,
    pub run: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub q_mode: String,
    pub seed: u64,
    pub groups: Vec<GroupSummary>,
    pub checks_run: usize,
    pub checks_failed: usize,
    /// The first failures, at most `MAX_FAILURES`.
    pub failures: Vec<CheckRecord>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn group(&self, name: &str) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| g.group == name)
    }
}

pub const MAX_FAILURES: usize = 25;

struct Tally {
    groups: BTreeMap<String, (usize, usize)>,
    failures: Vec<CheckRecord>,
}

impl Tally {
    fn new() -> Self {
        Tally { groups: BTreeMap::new(), failures: Vec::new() }
    }

    fn record(&mut self, group: &str, what: impl Display, ok: bool, lhs: impl Display, rhs: impl Display) {
        let e = self.groups.entry(group.to_string()).or_default();
        e.0 += 1;
        if !ok {
            e.1 += 1;
            if self.failures.len() < MAX_FAILURES {
                self.failures.push(CheckRecord::new(group, what.to_string(), false, lhs.to_string(), rhs.to_string()));
            }
        }
    }

    fn finish(self, suite: &str, opts: &SuiteOptions) -> SuiteReport {
        let groups: Vec<GroupSummary> =
            self.groups.into_iter().map(|(group, (run, failed))| GroupSummary { group, run, failed }).collect();
        let checks_run = groups.iter().map(|g| g.run).sum();
        let checks_failed = groups.iter().map(|g| g.failed).sum();
        debug_assert!(self.failures.iter().all(|f| f.status == Status::Fail));
        SuiteReport {
            suite: suite.into(),
            q_mode: opts.mode.name(),
            seed: opts.seed,
            groups,
            checks_run,
            checks_failed,
            failures: self.failures,
            passed: checks_failed == 0,
        }
    }
}

pub fn element_is_zero(x: &ToroidalElement, mode: &QMode) -> bool {
    x.entries().all(|(_, t)| t.terms().all(|(_, c)| mode.is_zero(c))) && mode.is_zero(x.central())
}

fn random_scalar(rng: &mut ChaCha8Rng) -> QScalar {
    let mut poly = || {
        let low: i64 = rng.gen_range(-3..=3);
        let len = rng.gen_range(1..=3);
        let coeffs: Vec<BigInt> = (0..len).map(|_| BigInt::from(rng.gen_range(-3i64..=3))).collect();
        QScalar::from_laurent((low, &coeffs), (0, &[BigInt::from(1)])).expect("unit denominator")
    };
    let num = poly();
    let den = poly();
    if den.is_zero() {
        num
    } else {
        num / den
    }
}

fn random_torus(rng: &mut ChaCha8Rng, a_max: i64, b_max: i64) -> TorusElement {
    let mut x = TorusElement::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let c = QScalar::from_int(rng.gen_range(-3..=3));
        x.add_term(&c, rng.gen_range(-a_max..=a_max), rng.gen_range(-b_max..=b_max));
    }
    x
}

fn random_gen(rng: &mut ChaCha8Rng, alg: Algebra, a_max: i64, b_max: i64) -> Gen {
    let fam = *alg.families().choose(rng).expect("families");
    Gen::new(
        fam,
        rng.gen_range(1..=alg.rank),
        rng.gen_range(1..=alg.rank),
        rng.gen_range(-a_max..=a_max),
        rng.gen_range(-b_max..=b_max),
    )
}

/// A generator whose degree makes the total degree of a triple vanish about
/// half the time, so that the central term is exercised.
fn closing_gen(rng: &mut ChaCha8Rng, alg: Algebra, x: &Gen, y: &Gen, a_max: i64, b_max: i64) -> Gen {
    let mut z = random_gen(rng, alg, a_max, b_max);
    let (a, b) = (-(x.a + y.a), -(x.b + y.b));
    if rng.gen_bool(0.5) && a.abs() <= a_max && b.abs() <= b_max {
        z.a = a;
        z.b = b;
    }
    z
}

fn jacobi(
    x: &ToroidalElement,
    y: &ToroidalElement,
    z: &ToroidalElement,
    c: Cocycle,
) -> Result<ToroidalElement, AlgError> {
    let a = bracket_with(x, &bracket_with(y, z, c)?, c)?;
    let b = bracket_with(y, &bracket_with(z, x, c)?, c)?;
    let d = bracket_with(z, &bracket_with(x, y, c)?, c)?;
    Ok(a.plus(&b).plus(&d))
}

/// Field axioms of ℚ(s), torus axioms, and for ĝl_N (N ≤ 4), ŝo_N and ŝp_2N:
/// Jacobi, alternation, grading and membership closure on random generators.
pub fn axioms_suite(opts: &SuiteOptions) -> Result<SuiteReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut t = Tally::new();
    let mode = &opts.mode;
    let (am, bm) = (opts.a_max, opts.b_max);
    let few = (opts.samples / 5).max(1);

    let s0 = BigRational::from_integer(BigInt::from(2));
    for _ in 0..few {
        let (a, b, c) = (random_scalar(&mut rng), random_scalar(&mut rng), random_scalar(&mut rng));
        let lhs = &a * &(&b + &c);
        let rhs = &(&a * &b) + &(&a * &c);
        t.record("qfield_distributive", format!("{a}; {b}; {c}"), mode.eq(&lhs, &rhs), &lhs, &rhs);
        if !a.is_zero() {
            let p = &a * &a.inv().expect("nonzero");
            t.record("qfield_inverse", &a, p.is_one(), &p, "1");
        }
        if let (Ok(x), Ok(y), Ok(z)) = (a.specialize(&s0), b.specialize(&s0), (&a * &b).specialize(&s0)) {
            t.record("qfield_specialize", format!("{a}; {b}"), &x * &y == z, &x * &y, z);
        }
    }
    for _ in 0..few {
        let (x, y, z) = (random_torus(&mut rng, am, bm), random_torus(&mut rng, am, bm), random_torus(&mut rng, am, bm));
        let l = x.mul(&y).mul(&z);
        let r = x.mul(&y.mul(&z));
        t.record("torus_associative", format!("{x}; {y}; {z}"), l == r, &l, &r);
        let l = x.mul(&y).bar();
        let r = y.bar().mul(&x.bar());
        t.record("torus_bar_anti", format!("{x}; {y}"), l == r && x.bar().bar() == x, &l, &r);
    }

    let mut algebras: Vec<(String, Algebra, usize)> =
        (1..=4).map(|n| (format!("jacobi_gl{n}"), Algebra::gl(n), opts.samples.div_ceil(4))).collect();
    algebras.extend((2..=4).map(|n| (format!("jacobi_so{n}"), Algebra::so(n), few)));
    algebras.extend((1..=2).map(|n| (format!("jacobi_sp{}", 2 * n), Algebra::sp(n), few)));
    for (group, alg, count) in algebras {
        for _ in 0..count {
            let x = random_gen(&mut rng, alg, am, bm);
            let y = random_gen(&mut rng, alg, am, bm);
            let z = closing_gen(&mut rng, alg, &x, &y, am, bm);
            let (ex, ey, ez) = (gen(alg, &x)?, gen(alg, &y)?, gen(alg, &z)?);
            let j = jacobi(&ex, &ey, &ez, opts.cocycle)?;
            t.record(&group, format!("{alg}: {x}, {y}, {z}"), element_is_zero(&j, mode), &j, 0);
            let xx = bracket_with(&ex, &ex, opts.cocycle)?;
            t.record("alternating", format!("{alg}: {x}"), element_is_zero(&xx, mode), &xx, 0);
            let xy = bracket(&ex, &ey)?;
            if !xy.is_zero() {
                let want = graded_label(alg, &x).plus(&graded_label(alg, &y));
                let got = element_labels(&xy);
                t.record("grading", format!("{alg}: {x}, {y}"), got == vec![want.clone()], format!("{got:?}"), format!("{want:?}"));
            }
            if alg.kind != AlgebraKind::Gl {
                t.record("membership_closed", format!("{alg}: {x}, {y}"), membership(&xy, alg.kind), &xy, alg);
            }
        }
    }
    Ok(t.finish("axioms", opts))
}

fn random_vector(rng: &mut ChaCha8Rng, basis: &[Vec<crate::weyl_fock::Mode>]) -> FockVector {
    let mut v = FockVector::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let m = basis.choose(rng).expect("nonempty basis").clone();
        v.add_term(m, &QScalar::from_int(rng.gen_range(1..=3)));
    }
    v
}

/// ρ_Z([x, y])v = ρ_Z(x)ρ_Z(y)v − ρ_Z(y)ρ_Z(x)v for random generators of
/// ŝp_2N(C_q) (N ≤ 2) and random v, in both flavors; plus the r-support
/// oracle and the energy shift of a single generator.
pub fn representation_suite(opts: &SuiteOptions) -> Result<SuiteReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut t = Tally::new();
    let mode = &opts.mode;
    let (am, bm) = (opts.a_max, opts.b_max);
    let mut bases = BTreeMap::new();
    for flavor in Flavor::ALL {
        for n in 1..=2 {
            let kind = FockKind::new(n, flavor);
            bases.insert((flavor, n), graded_basis(&kind, opts.max_energy, 2));
        }
    }
    for k in 0..opts.samples {
        let flavor = Flavor::ALL[k % 2];
        let n = rng.gen_range(1..=2);
        let kind = FockKind::new(n, flavor);
        let alg = Algebra::sp(n);
        let basis = &bases[&(flavor, n)];
        let x = random_gen(&mut rng, alg, am, bm);
        let y = closing_gen(&mut rng, alg, &x, &Gen::new(Family::F, 1, 1, 0, 0), am, bm);
        let v = random_vector(&mut rng, basis);
        let xy = bracket(&gen(alg, &x)?, &gen(alg, &y)?)?;
        let lhs = rho_element(&kind, &xy, &v)?;
        let rhs = rho_apply(&kind, &x, &rho_apply(&kind, &y, &v)?)?.sub(&rho_apply(&kind, &y, &rho_apply(&kind, &x, &v)?)?);
        let what = format!("{flavor} N={n}: x={x}, y={y}, v={v}");
        t.record("representation", &what, lhs.sub(&rhs).is_zero_in(mode), &lhs, &rhs);

        let mono = FockVector::basis(basis.choose(&mut rng).expect("nonempty").clone());
        let computed = rho_support(&kind, &x, &mono);
        let window = am.abs() + 2 * opts.max_energy.twice() + 4;
        let scanned = rho_support_scan(&kind, &x, &mono, window);
        t.record("support_oracle", format!("{flavor} N={n}: {x} on {mono}"), computed == scanned, format!("{computed:?}"), format!("{scanned:?}"));

        let out = rho_apply(&kind, &x, &mono)?;
        let d = mono.terms().next().map(|(m, _)| monomial_energy(m)).expect("basis vector");
        let want = d - Half::from_int(x.a);
        let ok = out.terms().all(|(m, _)| monomial_energy(m) == want);
        t.record("energy_shift", format!("{flavor} N={n}: {x} on {mono}"), ok, &out, want);
    }
    Ok(t.finish("representation", opts))
}

/// Generator-level checks of one dual pair: the two embedded members commute
/// in the window |a|, |b| ≤ (a_max, b_max), the embeddings are Lie
/// homomorphisms into sp_2N, and the embedded actions commute on F_N(Z).
pub fn dualpair_suite(dp: &DualPair, opts: &SuiteOptions) -> Result<SuiteReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut t = Tally::new();
    let mode = &opts.mode;
    let (am, bm) = (opts.a_max, opts.b_max);
    let fin: Vec<(Gen, ToroidalElement)> =
        dp.finite_generators().into_iter().map(|g| Ok((g, dp.embed_gen(Side::Finite, &g)?))).collect::<Result<_, AlgError>>()?;
    let tor: Vec<(Gen, ToroidalElement)> = dp
        .toroidal_generators(am, bm)
        .into_iter()
        .map(|g| Ok((g, dp.embed_gen(Side::Toroidal, &g)?)))
        .collect::<Result<_, AlgError>>()?;
    for (g, x) in &fin {
        for (h, y) in &tor {
            let z = bracket(x, y)?;
            t.record("commutation", format!("[{g}, {h}]"), element_is_zero(&z, mode), &z, 0);
        }
    }
    for (side, list) in [(Side::Finite, &fin), (Side::Toroidal, &tor)] {
        for (g, x) in list.iter() {
            t.record("image_in_sp", format!("{side:?} {g}"), membership(x, AlgebraKind::Sp), x, dp.target());
        }
        let src = dp.source(side);
        let count = (opts.samples / 4).max(1);
        for _ in 0..count {
            let (g, h) = if side == Side::Finite {
                (random_gen(&mut rng, src, 0, 0), random_gen(&mut rng, src, 0, 0))
            } else {
                let g = random_gen(&mut rng, src, am, bm);
                let h = closing_gen(&mut rng, src, &g, &Gen::new(Family::E, 1, 1, 0, 0), am, bm);
                (g, h)
            };
            let lhs = dp.embed(side, &bracket(&gen(src, &g)?, &gen(src, &h)?)?)?;
            let rhs = bracket(&dp.embed_gen(side, &g)?, &dp.embed_gen(side, &h)?)?;
            t.record("homomorphism", format!("{side:?} [{g}, {h}]"), element_is_zero(&lhs.sub(&rhs), mode), &lhs, &rhs);
        }
    }
    for flavor in Flavor::ALL {
        if dp.pair == Pair::SpSo && flavor.is_integer() {
            continue;
        }
        let kind = FockKind::new(dp.big_n(), flavor);
        let basis = graded_basis(&kind, Half::from_int(2), 2);
        let count = (opts.samples / 4).max(1);
        for _ in 0..count {
            let (g, _) = fin.choose(&mut rng).expect("finite generators");
            let (h, _) = tor.choose(&mut rng).expect("toroidal generators");
            let v = random_vector(&mut rng, &basis);
            let gh = embedded_apply(dp, Side::Finite, g, flavor, &embedded_apply(dp, Side::Toroidal, h, flavor, &v)?)?;
            let hg = embedded_apply(dp, Side::Toroidal, h, flavor, &embedded_apply(dp, Side::Finite, g, flavor, &v)?)?;
            t.record("module_commutation", format!("{flavor}: {g}, {h} on {v}"), gh.sub(&hg).is_zero_in(mode), &gh, &hg);
        }
    }
    Ok(t.finish(&format!("dualpair {} m={} n={}", dp.pair, dp.m, dp.n), opts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(samples: usize) -> SuiteOptions {
        SuiteOptions { samples, a_max: 2, b_max: 2, max_energy: Half::from_int(2), ..SuiteOptions::default() }
    }

    #[test]
    fn axioms_pass() {
        let r = axioms_suite(&small(60)).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert!(r.group("jacobi_gl4").unwrap().run >= 15);
    }

    #[test]
    fn corrupted_cocycle_breaks_jacobi() {
        let opts = SuiteOptions { cocycle: Cocycle::AbsDegree, ..small(200) };
        let r = axioms_suite(&opts).unwrap();
        assert!(!r.passed);
        assert!(r.groups.iter().any(|g| g.group.starts_with("jacobi_gl") && g.failed > 0));
    }

    #[test]
    fn degenerate_window_passes() {
        let opts = SuiteOptions { a_max: 0, b_max: 0, ..small(40) };
        assert!(axioms_suite(&opts).unwrap().passed);
    }

    #[test]
    fn representation_passes() {
        let r = representation_suite(&small(40)).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert_eq!(r.group("representation").unwrap().run, 40);
    }

    #[test]
    fn dual_pairs_pass() {
        for pair in [Pair::GlGl, Pair::SoSp, Pair::SpSo] {
            let dp = DualPair::new(pair, 1, 2);
            let r = dualpair_suite(&dp, &SuiteOptions { a_max: 1, b_max: 1, ..small(16) }).unwrap();
            assert!(r.passed, "{pair}: {:?}", r.failures);
        }
    }
}
