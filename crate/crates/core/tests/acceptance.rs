//! Acceptance sweep: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qtoroidal::classical_weights::{dim_irrep, enumerate_labels, Group};
use qtoroidal::decomposer::{centralizer_bruteforce, decompose, TruncationWindow};
use qtoroidal::highest_weight::lemmas::{expected_branches, run_lemma, LemmaOptions, LEMMA_IDS};
use qtoroidal::highest_weight::{
    build_hwv, finite_raising, so_variants, tau_identity, verify_hwv, HwvReport, Status, VerifyOptions,
};
use qtoroidal::qfield::QMode;
use qtoroidal::toroidal::{generators, Algebra, DualPair, Pair};
use qtoroidal::verify::{axioms_suite, dualpair_suite, representation_suite, SuiteOptions, SuiteReport};
use qtoroidal::weyl_fock::{graded_basis, rho_support, rho_support_scan, FockKind, FockVector, Flavor};
use qtoroidal::Half;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

const BOTH: [Flavor; 2] = [Flavor::HalfInteger, Flavor::Integer];
const SMALL: [(usize, usize); 3] = [(1, 2), (2, 1), (2, 2)];

fn s0() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

fn flavors(pair: Pair) -> Vec<Flavor> {
    if pair == Pair::SpSo {
        vec![Flavor::HalfInteger]
    } else {
        BOTH.to_vec()
    }
}

fn group_total(r: &SuiteReport, prefix: &str) -> (usize, usize) {
    r.groups.iter().filter(|g| g.group.starts_with(prefix)).fold((0, 0), |(a, b), g| (a + g.run, b + g.failed))
}

fn first_failure(r: &SuiteReport) -> String {
    r.failures.first().map(|f| format!("; first failure {f:?}")).unwrap_or_default()
}

fn cocycle() -> Outcome {
    let opts = SuiteOptions { a_max: 3, b_max: 3, samples: 500, ..SuiteOptions::default() };
    let r = axioms_suite(&opts).expect("axioms suite");
    let (run, failed) = group_total(&r, "jacobi_gl");
    let ok = r.passed && run >= 500 && failed == 0;
    (ok, format!("{run} gl Jacobi triples, {} checks, {} failed{}", r.checks_run, r.checks_failed, first_failure(&r)))
}

fn representation() -> Outcome {
    let opts = SuiteOptions { samples: 200, mode: QMode::Symbolic, ..SuiteOptions::default() };
    let r = representation_suite(&opts).expect("representation suite");
    let (run, failed) = group_total(&r, "representation");
    let ok = r.passed && run >= 200 && failed == 0;
    (ok, format!("{run} (x, y, v) triples over both flavors, {} checks, {} failed{}", r.checks_run, r.checks_failed, first_failure(&r)))
}

fn dual_pairs() -> Outcome {
    let mut ok = true;
    let mut brackets = 0;
    let mut blocks = 0;
    let mut bad = Vec::new();
    for pair in [Pair::GlGl, Pair::SoSp, Pair::SpSo] {
        for (n, m) in SMALL {
            let dp = DualPair::new(pair, m, n);
            let opts = SuiteOptions { a_max: 2, b_max: 2, samples: 40, ..SuiteOptions::default() };
            let r = dualpair_suite(&dp, &opts).expect("dual pair suite");
            brackets += r.checks_run;
            if !r.passed {
                ok = false;
                bad.push(format!("{pair} n={n} m={m} commutation{}", first_failure(&r)));
            }
            let c = centralizer_bruteforce(&dp, 1, &s0()).expect("centralizer");
            blocks += c.checks.len();
            if !c.passed {
                ok = false;
                bad.push(format!("{pair} n={n} m={m} centralizer"));
            }
        }
    }
    (ok, format!("{brackets} generator checks, {blocks} centralizer blocks; {}", if bad.is_empty() { "all exact".into() } else { bad.join(", ") }))
}

fn hwv_report_ok(dp: &DualPair, rep: &HwvReport) -> bool {
    let ids: BTreeSet<&str> = rep.checks.iter().map(|c| c.check_id.as_str()).collect();
    let mut want = vec!["toroidal_raising_kills", "cartan_eta"];
    if !finite_raising(dp).expect("finite raising").is_empty() {
        want.push("finite_raising_kills");
    }
    let weights = ids.contains("finite_weight_lie") || ids.contains("finite_weight_group");
    rep.passed && weights && want.iter().all(|w| ids.contains(w)) && rep.checks.iter().all(|c| c.status == Status::Pass)
}

fn highest_weights() -> Outcome {
    let opts = VerifyOptions { a_max: 3, b_max: 3, mode: QMode::Symbolic, ..VerifyOptions::default() };
    let mut vectors = 0;
    let mut bad = Vec::new();
    for pair in [Pair::GlGl, Pair::SoSp, Pair::SpSo] {
        for (n, m) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            let dp = DualPair::new(pair, m, n);
            for flavor in flavors(pair) {
                for label in enumerate_labels(Group::for_pair(&dp), 3) {
                    for l in so_variants(&label) {
                        let hwv = build_hwv(&dp, &l, flavor).expect("build_hwv");
                        let rep = verify_hwv(&dp, &hwv, flavor, &opts).expect("verify_hwv");
                        vectors += 1;
                        if !hwv_report_ok(&dp, &rep) {
                            bad.push(format!("{pair} n={n} m={m} {} {l}", flavor.name()));
                        }
                    }
                }
            }
        }
    }
    (bad.is_empty(), format!("{vectors} vectors verified; failures: {}", if bad.is_empty() { "none".into() } else { bad.join(", ") }))
}

fn lemmas() -> Outcome {
    let mut cfgs: Vec<(usize, usize)> = (1..=2).flat_map(|m| (1..=3).map(move |n| (m, n))).collect();
    // the B̄_{n/2} statement needs ℓ'' < n/2, so n = 4 at least
    cfgs.push((1, 4));
    let opts = LemmaOptions::default();
    let mut run = 0;
    let mut bad = Vec::new();
    for id in LEMMA_IDS {
        let mut hit: BTreeMap<String, usize> = BTreeMap::new();
        let mut here = cfgs.clone();
        if id == "dualpair2le3" {
            // C and C̄ vanish for ℓ'' ≤ m; a live ℓ'' < n/2 first occurs at n = 6
            here.push((1, 6));
        }
        for &(m, n) in &here {
            for flavor in BOTH {
                let r = run_lemma(id, m, n, flavor, &opts).expect("lemma");
                run += r.checks_run;
                if !r.passed {
                    bad.push(format!("{id} m={m} n={n} {}", flavor.name()));
                }
                for (b, k) in r.branches {
                    *hit.entry(b).or_default() += k;
                }
            }
        }
        for b in expected_branches(id) {
            if hit.get(b).copied().unwrap_or(0) == 0 {
                bad.push(format!("{id} never reached {b}"));
            }
        }
    }
    (bad.is_empty(), format!("{run} operator-on-vacuum checks over {} lemmas; {}", LEMMA_IDS.len(), if bad.is_empty() { "every branch covered".into() } else { bad.join(", ") }))
}

fn main_theorem() -> Outcome {
    let cases = [
        (Pair::GlGl, Flavor::HalfInteger),
        (Pair::GlGl, Flavor::Integer),
        (Pair::SoSp, Flavor::HalfInteger),
        (Pair::SoSp, Flavor::Integer),
        (Pair::SpSo, Flavor::HalfInteger),
    ];
    let mut runs = 0;
    let mut labels = 0;
    let mut bad = Vec::new();
    for (pair, flavor) in cases {
        for n in 1..=2 {
            for m in 1..=2 {
                let dp = DualPair::new(pair, m, n);
                let cap = if flavor.is_integer() { 3 } else { 0 };
                let window = TruncationWindow::new(Half::from_int(2), cap);
                let r = decompose(&dp, flavor, &window, &s0()).expect("decompose");
                runs += 1;
                labels += r.labels.iter().filter(|l| l.found).count();
                let ok = r.passed
                    && r.multiplicity_free
                    && r.labels_match_prediction
                    && r.lines_match_build_hwv
                    && r.bookkeeping_balanced;
                if !ok {
                    bad.push(format!("{pair} {} n={n} m={m}: {:?}", flavor.name(), r.anomalies));
                }
            }
        }
    }
    (bad.is_empty(), format!("{runs} windows, {labels} joint singular lines; {}", if bad.is_empty() { "all balanced".into() } else { bad.join(", ") }))
}

fn tau_conjugation() -> Outcome {
    let opts = VerifyOptions { a_max: 3, b_max: 3, mode: QMode::Symbolic, ..VerifyOptions::default() };
    let mut bad = Vec::new();
    let mut bars = 0;
    for n in [2, 4] {
        let dp = DualPair::new(Pair::SoSp, 1, n);
        for flavor in BOTH {
            if tau_identity(&dp, flavor).expect("tau").status != Status::Pass {
                bad.push(format!("tau n={n} {}", flavor.name()));
            }
            for label in enumerate_labels(Group::O(n), 3) {
                for l in so_variants(&label).into_iter().skip(1) {
                    let hwv = build_hwv(&dp, &l, flavor).expect("build_hwv");
                    let rep = verify_hwv(&dp, &hwv, flavor, &opts).expect("verify_hwv");
                    bars += 1;
                    let tau_checked = rep.checks.iter().any(|c| c.check_id == "tau_conjugation");
                    if !(hwv_report_ok(&dp, &rep) && tau_checked) {
                        bad.push(format!("n={n} {} {l}", flavor.name()));
                    }
                }
            }
        }
    }
    let ok = bad.is_empty() && bars > 0;
    (ok, format!("n = 2, 4; {bars} barred vectors; {}", if bad.is_empty() { "exact".into() } else { bad.join(", ") }))
}

/// Semistandard tableaux of shape λ with entries 1..=n, by brute force.
fn count_tableaux(shape: &[i64], n: usize) -> u64 {
    let cells: Vec<(usize, usize)> =
        shape.iter().enumerate().flat_map(|(r, &len)| (0..len as usize).map(move |c| (r, c))).collect();
    fn go(k: usize, cells: &[(usize, usize)], fill: &mut BTreeMap<(usize, usize), usize>, n: usize) -> u64 {
        let Some(&(r, c)) = cells.get(k) else { return 1 };
        let lo_row = if c > 0 { fill[&(r, c - 1)] } else { 1 };
        let lo_col = if r > 0 { fill[&(r - 1, c)] + 1 } else { 1 };
        let mut total = 0;
        for x in lo_row.max(lo_col)..=n {
            fill.insert((r, c), x);
            total += go(k + 1, cells, fill, n);
        }
        fill.remove(&(r, c));
        total
    }
    go(0, &cells, &mut BTreeMap::new(), n)
}

fn oracles() -> Outcome {
    let mut bad = Vec::new();
    let mut dims = 0;
    for n in 1..=3 {
        for l in enumerate_labels(Group::Gl(n), 4) {
            // det^{-c} shifts μ to a partition without changing the dimension
            let c = l.entries.iter().copied().min().unwrap_or(0).min(0);
            let shape: Vec<i64> = l.entries.iter().map(|x| x - c).collect();
            dims += 1;
            if dim_irrep(&l) != count_tableaux(&shape, n) {
                bad.push(format!("dim {l}"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..100 {
        let flavor = BOTH[case % 2];
        let big_n = rng.gen_range(1..=2);
        let kind = FockKind::new(big_n, flavor);
        let basis = graded_basis(&kind, Half::from_int(3), 2);
        let gens = generators(Algebra::sp(big_n), 3, 3);
        let g = &gens[rng.gen_range(0..gens.len())];
        let mut v = FockVector::zero();
        for _ in 0..rng.gen_range(1..=3) {
            v.add_assign(&FockVector::basis(basis[rng.gen_range(0..basis.len())].clone()));
        }
        if rho_support(&kind, g, &v) != rho_support_scan(&kind, g, &v, 12) {
            bad.push(format!("support {g} on {v}"));
        }
    }
    (bad.is_empty(), format!("{dims} GL dimensions, 100 support cases; {}", if bad.is_empty() { "agree".into() } else { bad.join(", ") }))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("cocycle validity", cocycle),
        ("oscillator representation", representation),
        ("dual pairs and centralizers", dual_pairs),
        ("highest-weight vectors", highest_weights),
        ("lemma suite", lemmas),
        ("decomposition at desk scale", main_theorem),
        ("tau conjugation", tau_conjugation),
        ("oracles", oracles),
    ];
    let mut all = true;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = f();
        all &= ok;
        println!("criterion {} {name}: {} [{:.1}s] {detail}", k + 1, if ok { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64());
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
