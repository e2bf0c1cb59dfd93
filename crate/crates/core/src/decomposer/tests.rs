use super::*;
use crate::highest_weight::finite_cartan;
use crate::toroidal::generators;
use crate::weyl_fock::embedded_apply;

fn h(t: i64) -> Half {
    Half::from_twice(t)
}

fn two() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

fn unit(m: Monomial) -> RatVector {
    RatVector::from([(m, BigRational::one())])
}

#[test]
fn weights_match_cartan_eigenvalues() {
    for (pair, m, n, flavor) in [
        (Pair::GlGl, 1, 2, Flavor::HalfInteger),
        (Pair::SoSp, 1, 3, Flavor::HalfInteger),
        (Pair::SoSp, 1, 4, Flavor::HalfInteger),
        (Pair::SpSo, 2, 2, Flavor::HalfInteger),
        (Pair::GlGl, 2, 2, Flavor::Integer),
    ] {
        let dp = DualPair::new(pair, m, n);
        let kind = FockKind::new(dp.big_n(), flavor);
        let cartan = finite_cartan(&dp);
        for mono in graded_basis(&kind, h(2), 1).into_iter().take(60) {
            let w = monomial_weight(&dp, &mono);
            let v = FockVector::basis(mono.clone());
            for (p, g) in cartan.iter().enumerate() {
                let out = embedded_apply(&dp, Side::Finite, g, flavor, &v).unwrap();
                let want = v.scale(&QScalar::from_int(w[p]));
                assert_eq!(out, want, "{pair} {mono:?} entry {p}");
            }
        }
    }
}

#[test]
fn gl_one_one_labels() {
    let dp = DualPair::new(Pair::GlGl, 1, 1);
    let report = decompose(&dp, Flavor::HalfInteger, &TruncationWindow::new(h(3), 0), &two()).unwrap();
    let found: Vec<i64> = report.labels.iter().filter(|l| l.found).map(|l| l.label.entries[0]).collect();
    assert_eq!(found, vec![-3, -2, -1, 0, 1, 2, 3]);
    assert!(report.labels.iter().all(|l| l.predicted && l.matches_build_hwv));
    assert!(report.passed, "{:?}", report.anomalies);
}

#[test]
fn gl_two_one_degree_half() {
    let dp = DualPair::new(Pair::GlGl, 1, 2);
    let report = decompose(&dp, Flavor::HalfInteger, &TruncationWindow::new(h(2), 0), &two()).unwrap();
    let row = report.bookkeeping.iter().find(|r| r.degree == h(1)).unwrap();
    assert_eq!((row.dim_fock, row.closure_sum, row.singular_sum), (4, 4, 4));
    let zero = report.bookkeeping.iter().find(|r| r.degree == h(0)).unwrap();
    assert_eq!((zero.dim_fock, zero.closure_sum), (1, 1));
    assert!(report.passed, "{:?}", report.anomalies);
}

#[test]
fn vacuum_closure() {
    let dp = DualPair::new(Pair::GlGl, 1, 1);
    let c = invariant_generate(&dp, Flavor::HalfInteger, &unit(vec![]), h(2), 0).unwrap();
    assert_eq!(c.dim(), 2);
    assert_eq!(c.dim_at(h(0), 0), 1);
    let top = &c.pieces[&(h(2), 0)];
    assert!(proportional(&top[0], &unit(vec![Mode::psi(1, h(-1)), Mode::psibar(1, h(-1))])));
}

#[test]
fn so_sp_int_degree_zero() {
    let dp = DualPair::new(Pair::SoSp, 1, 2);
    let report = decompose(&dp, Flavor::Integer, &TruncationWindow::new(h(0), 2), &two()).unwrap();
    assert_eq!(report.fock_dim, 6);
    assert!(report.passed, "{:?}", report.anomalies);
}

#[test]
fn sp_so_integer_is_rejected() {
    let dp = DualPair::new(Pair::SpSo, 1, 1);
    let err = joint_singular_search(&dp, Flavor::Integer, &TruncationWindow::new(h(2), 1), &two());
    assert!(matches!(err, Err(DecompError::Domain(_))));
}

#[test]
fn quadratics_are_invariant() {
    for (pair, m, n, flavor) in [
        (Pair::GlGl, 1, 2, Flavor::Integer),
        (Pair::SoSp, 2, 2, Flavor::HalfInteger),
        (Pair::SoSp, 1, 3, Flavor::Integer),
        (Pair::SpSo, 2, 1, Flavor::HalfInteger),
    ] {
        let dp = DualPair::new(pair, m, n);
        let kind = FockKind::new(dp.big_n(), flavor);
        let quads = invariant_quadratics(&dp, flavor, h(1)).unwrap();
        let sample: Vec<FockVector> =
            graded_basis(&kind, h(2), 1).into_iter().step_by(7).take(6).map(FockVector::basis).collect();
        for g in dp.finite_generators() {
            for q in &quads {
                for v in &sample {
                    let gq = embedded_apply(&dp, Side::Finite, &g, flavor, &q.op.apply(&kind, v).unwrap()).unwrap();
                    let qg = q.op.apply(&kind, &embedded_apply(&dp, Side::Finite, &g, flavor, v).unwrap()).unwrap();
                    assert_eq!(gq, qg, "{pair} {g} {}", q.name);
                }
            }
        }
    }
}

#[test]
fn closure_is_toroidal_stable() {
    let dp = DualPair::new(Pair::GlGl, 1, 2);
    let flavor = Flavor::HalfInteger;
    let e = h(3);
    let kind = FockKind::new(dp.big_n(), flavor);
    let mut v = FockVector::vacuum();
    v = crate::weyl_fock::mode_apply(&kind, &Mode::psi(1, h(-1)), &v).unwrap();
    let c = invariant_generate(&dp, flavor, &rational_vector(&v).unwrap(), e, 0).unwrap();
    let all: Vec<RatVector> = c.pieces.values().flatten().cloned().collect();
    let span = span_basis(&all);
    for g in generators(dp.source(Side::Toroidal), 1, 2) {
        for u in &all {
            let w = specialize_vector(&embedded_apply(&dp, Side::Toroidal, &g, flavor, &lift_vector(u)).unwrap(), &two())
                .unwrap();
            if w.is_empty() || w.keys().any(|m| monomial_energy(m) > e) {
                continue;
            }
            let mut both = span.clone();
            both.push(w);
            assert_eq!(span_basis(&both).len(), span.len(), "{g}");
        }
    }
}

#[test]
fn centralizer_gl_one_one() {
    let dp = DualPair::new(Pair::GlGl, 1, 1);
    let r = centralizer_bruteforce(&dp, 1, &two()).unwrap();
    assert!(r.passed, "{:?}", r.checks);
    assert!(r.checks.iter().filter(|c| c.of == Side::Finite).all(|c| c.gh_directions == 0));
    let mid = r.checks.iter().find(|c| c.of == Side::Finite && c.t0_degree == 0).unwrap();
    assert_eq!(mid.kernel_dim, 3);
}

#[test]
fn proportional_vectors() {
    let a = RatVector::from([(vec![], BigRational::one()), (vec![Mode::psi(1, h(-1))], two())]);
    let b: RatVector = a.iter().map(|(m, x)| (m.clone(), x * BigRational::new(BigInt::from(-3), BigInt::from(5)))).collect();
    assert!(proportional(&a, &b));
    assert!(!proportional(&a, &unit(vec![])));
    assert!(!proportional(&RatVector::new(), &RatVector::new()));
}

#[test]
fn centralizer_of_o_two_needs_tau() {
    let dp = DualPair::new(Pair::SoSp, 1, 2);
    let r = centralizer_bruteforce(&dp, 1, &two()).unwrap();
    assert!(r.passed, "{:?}", r.checks);
    let mid = r.checks.iter().find(|c| c.of == Side::Finite && c.t0_degree == 0).unwrap();
    assert_eq!(mid.kernel_dim, mid.image_dim);
}
