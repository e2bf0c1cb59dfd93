//! Truncated decomposition of F_N(Z) under a dual pair: joint singular
//! vectors by exact elimination at q = s0², closures under the invariant
//! quadratics, per-degree dimension bookkeeping, and a brute-force
//! centralizer check.

mod centralizer;
pub mod linalg;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::classical_weights::{
    dim_irrep, enumerate_labels, group_element_apply, superscript, Group, GroupElement, WeightError, WeightLabel,
};
use crate::half::Half;
use crate::highest_weight::{
    build_determinant, build_hwv, finite_raising, hwv_factors, so_variants, DeterminantSpec, HwvError, PhiContext,
};
use crate::qfield::{QError, QScalar};
use crate::toroidal::{classify, AlgError, DualPair, Gen, Pair, Side, ToroidalElement, TriangularClass};
use crate::weyl_fock::{
    graded_basis, monomial_energy, rho_element, zero_mode_count, FockError, FockKind, FockVector, Flavor, Mode,
    Monomial, Species, WeylElement,
};

pub use centralizer::{centralizer_bruteforce, CentralizerCheck, CentralizerReport};
pub use linalg::{RowReducer, SparseRow};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecompError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Q(#[from] QError),
    #[error("{0}")]
    Fock(#[from] FockError),
    #[error("{0}")]
    Algebra(#[from] AlgError),
    #[error("{0}")]
    Hwv(#[from] HwvError),
    #[error("{0}")]
    Weight(#[from] WeightError),
}

/// Energy and zero-mode truncation of F_N(Z) together with the generator
/// window used for the toroidal plus part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TruncationWindow {
    pub max_energy: Half,
    /// Only meaningful for Z = ℤ.
    pub max_zero_modes: usize,
    pub a_max: i64,
    pub b_max: i64,
}

impl TruncationWindow {
    /// a ≤ ⌈E⌉ and |b| ≤ 2⌈E⌉ + 2.
    pub fn new(max_energy: Half, max_zero_modes: usize) -> Self {
        let ce = (max_energy.twice() + 1).div_euclid(2);
        TruncationWindow { max_energy, max_zero_modes, a_max: ce, b_max: 2 * ce + 2 }
    }

    fn zm_cap(&self, flavor: Flavor) -> usize {
        if flavor.is_integer() {
            self.max_zero_modes
        } else {
            0
        }
    }
}

/// A Fock vector with coefficients specialized to rationals.
pub type RatVector = BTreeMap<Monomial, BigRational>;

pub fn specialize_vector(v: &FockVector, s0: &BigRational) -> Result<RatVector, DecompError> {
    let mut out = RatVector::new();
    for (m, c) in v.terms() {
        let x = c.specialize(s0)?;
        if !x.is_zero() {
            out.insert(m.clone(), x);
        }
    }
    Ok(out)
}

pub fn lift_vector(v: &RatVector) -> FockVector {
    let mut out = FockVector::zero();
    for (m, c) in v {
        out.add_term(m.clone(), &QScalar::from_rational(c.clone()));
    }
    out
}

fn rational_vector(v: &FockVector) -> Result<RatVector, DecompError> {
    let mut out = RatVector::new();
    for (m, c) in v.terms() {
        let x = c.as_rational().ok_or_else(|| DecompError::Domain(format!("coefficient {c} is not rational")))?;
        if !x.is_zero() {
            out.insert(m.clone(), x);
        }
    }
    Ok(out)
}

/// Whether b = k·a for some nonzero rational k.
pub fn proportional(a: &RatVector, b: &RatVector) -> bool {
    let Some((m, x)) = a.iter().next() else { return false };
    let Some(y) = b.get(m) else { return false };
    let k = y / x;
    a.len() == b.len() && a.iter().all(|(m, x)| b.get(m) == Some(&(x * &k)))
}

/// Weight of a monomial under the finite group's diagonal torus: n entries
/// for GL_n and Sp_2n, ⌊n/2⌋ for SO_n.
pub fn monomial_weight(dp: &DualPair, mono: &Monomial) -> Vec<i64> {
    let n = dp.n;
    let len = if dp.pair == Pair::SoSp { n / 2 } else { n };
    let mut w = vec![0; len];
    for x in mono {
        let k = superscript(dp, x.index);
        let sign = if x.species == Species::Psi { 1 } else { -1 };
        match dp.pair {
            Pair::GlGl | Pair::SpSo => w[k - 1] += sign,
            Pair::SoSp => {
                if k <= n / 2 {
                    w[k - 1] += sign;
                } else if n + 1 - k <= n / 2 {
                    w[n - k] -= sign;
                }
            }
        }
    }
    w
}

/// (energy, zero modes, weight)
pub type SlotKey = (Half, usize, Vec<i64>);

/// The truncated graded basis split into weight spaces.
pub fn weight_slots(dp: &DualPair, flavor: Flavor, window: &TruncationWindow) -> BTreeMap<SlotKey, Vec<Monomial>> {
    let kind = FockKind::new(dp.big_n(), flavor);
    let mut out: BTreeMap<SlotKey, Vec<Monomial>> = BTreeMap::new();
    for m in graded_basis(&kind, window.max_energy, window.zm_cap(flavor)) {
        let key = (monomial_energy(&m), zero_mode_count(&m), monomial_weight(dp, &m));
        out.entry(key).or_default().push(m);
    }
    out
}

fn check_domain(dp: &DualPair, flavor: Flavor) -> Result<(), DecompError> {
    if dp.pair == Pair::SpSo && flavor.is_integer() {
        return Err(DecompError::Domain(
            "the (Sp_2n, so_m(C_q)) pair has no decomposition on F_N(Z) with Z = the integers".into(),
        ));
    }
    Ok(())
}

fn from_kernel(basis: &[RatVector], kernel: Vec<SparseRow>) -> Vec<RatVector> {
    kernel
        .into_iter()
        .map(|x| {
            let mut v = RatVector::new();
            for (c, k) in x {
                let k = BigRational::from_integer(k);
                for (m, y) in &basis[c] {
                    let e = v.entry(m.clone()).or_insert_with(BigRational::zero);
                    *e += &k * y;
                }
            }
            v.retain(|_, y| !y.is_zero());
            v
        })
        .collect()
}

/// Kernel of the linear maps `ops` on span(`basis`), inserted one operator
/// at a time with an early exit once only the zero vector survives.
fn common_kernel(
    kind: &FockKind,
    ops: &[&ToroidalElement],
    basis: &[RatVector],
    s0: &BigRational,
) -> Result<Vec<RatVector>, DecompError> {
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let lifted: Vec<FockVector> = basis.iter().map(lift_vector).collect();
    let mut red = RowReducer::new(basis.len());
    for op in ops {
        let mut rows: BTreeMap<Monomial, Vec<(usize, BigRational)>> = BTreeMap::new();
        for (c, v) in lifted.iter().enumerate() {
            for (m, x) in rho_element(kind, op, v)?.terms() {
                rows.entry(m.clone()).or_default().push((c, x.specialize(s0)?));
            }
        }
        for r in rows.into_values() {
            red.insert_rational(r);
        }
        if red.is_full() {
            return Ok(Vec::new());
        }
    }
    Ok(from_kernel(basis, red.kernel()))
}

/// A basis of span(vectors), as primitive integer combinations of monomials.
fn span_basis(vectors: &[RatVector]) -> Vec<RatVector> {
    let monos: BTreeSet<&Monomial> = vectors.iter().flat_map(|v| v.keys()).collect();
    let index: Vec<&Monomial> = monos.into_iter().collect();
    let pos: HashMap<&Monomial, usize> = index.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut red = RowReducer::new(index.len());
    for v in vectors {
        red.insert_rational(v.iter().map(|(m, x)| (pos[m], x.clone())));
    }
    red.rows()
        .map(|r| r.iter().map(|(c, x)| (index[*c].clone(), BigRational::from_integer(x.clone()))).collect())
        .collect()
}

fn coset_eigenspace(
    dp: &DualPair,
    g: &GroupElement,
    vectors: &[RatVector],
    sign: i64,
) -> Result<Vec<RatVector>, DecompError> {
    let mut proj = Vec::new();
    for v in vectors {
        let gv = rational_vector(&group_element_apply(dp, g, &lift_vector(v))?)?;
        let mut w = v.clone();
        for (m, x) in gv {
            let e = w.entry(m).or_insert_with(BigRational::zero);
            *e += BigRational::from_integer(BigInt::from(sign)) * x;
        }
        w.retain(|_, x| !x.is_zero());
        proj.push(w);
    }
    Ok(span_basis(&proj))
}

fn o_label(n: usize, w: &[i64], tilde: bool) -> Result<WeightLabel, DecompError> {
    let mut e = w.to_vec();
    e.resize(n, 0);
    Ok(WeightLabel::new(Group::O(n), e, tilde)?)
}

/// Assigns the build label (an entry of `so_variants` for O_n) to each
/// singular vector of a slot. Vectors at non-dominant weights are reported.
fn assign_labels(
    dp: &DualPair,
    weight: &[i64],
    vectors: Vec<RatVector>,
    anomalies: &mut Vec<String>,
) -> Result<Vec<(WeightLabel, RatVector)>, DecompError> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let n = dp.n;
    let dominant = |r: Result<WeightLabel, WeightError>| r.ok();
    let label = match dp.pair {
        Pair::GlGl => dominant(WeightLabel::new(Group::Gl(n), weight.to_vec(), false)),
        Pair::SpSo => {
            let mut e = weight.to_vec();
            e.resize(2 * n, 0);
            dominant(WeightLabel::new(Group::Sp(n), e, false))
        }
        Pair::SoSp => dominant(WeightLabel::new(Group::So(n), weight.to_vec(), false)),
    };
    let Some(label) = label else {
        anomalies.push(format!("{} singular vector(s) at non-dominant weight {weight:?}", vectors.len()));
        return Ok(Vec::new());
    };
    if dp.pair != Pair::SoSp {
        return Ok(vectors.into_iter().map(|v| (label.clone(), v)).collect());
    }
    let r = n / 2;
    if n.is_multiple_of(2) && r > 0 && weight[r - 1] != 0 {
        // d = n/2: v_μ for a positive last entry, v̄_μ otherwise
        let l = if weight[r - 1] > 0 { o_label(n, weight, false)? } else { label };
        return Ok(vectors.into_iter().map(|v| (l.clone(), v)).collect());
    }
    let mut out = Vec::new();
    let (g, plain_sign) = if n.is_multiple_of(2) {
        (GroupElement::Tau, 1)
    } else {
        let size: i64 = weight.iter().sum();
        (GroupElement::MinusIdentity, if size % 2 == 0 { 1 } else { -1 })
    };
    for sign in [1, -1] {
        let tilde = sign != plain_sign;
        for v in coset_eigenspace(dp, &g, &vectors, sign)? {
            out.push((o_label(n, weight, tilde)?, v));
        }
    }
    Ok(out)
}

/// Grading (energy, zero modes) of v_μ read off its determinant factors.
fn hwv_grading(
    dp: &DualPair,
    label: &WeightLabel,
    flavor: Flavor,
    cache: &mut HashMap<DeterminantSpec, (Half, i64)>,
) -> Result<(Half, i64), DecompError> {
    let ctx = PhiContext::new(dp.m, dp.n, flavor);
    let plan = hwv_factors(dp, label, flavor)?;
    let (mut e, mut z) = (Half::ZERO, 0i64);
    for (spec, k) in &plan.factors {
        if !cache.contains_key(spec) {
            let d = build_determinant(&ctx, spec)?;
            let (word, _) = d.terms().next().ok_or_else(|| DecompError::Domain(format!("{spec} vanishes")))?;
            cache.insert(*spec, word_grading(word, flavor));
        }
        let (de, dz) = cache[spec];
        e = e + de.scale(*k);
        z += dz * k;
    }
    Ok((e, z))
}

fn word_grading(word: &[Mode], flavor: Flavor) -> (Half, i64) {
    let mut e = Half::ZERO;
    let mut z = 0;
    for x in word {
        e = e - x.level;
        if flavor.is_integer() && x.level == Half::ZERO {
            z += if x.species == Species::Psi { 1 } else { -1 };
        }
    }
    (e, z)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantEntry {
    /// The label passed to build_hwv (an SO_n label for v̄_μ).
    pub label: WeightLabel,
    pub found: usize,
    pub degree: Option<Half>,
    pub zero_modes: Option<usize>,
    pub matches_build_hwv: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelEntry {
    pub label: WeightLabel,
    pub predicted: bool,
    pub hwv_degree: Half,
    pub hwv_zero_modes: usize,
    pub found: bool,
    pub matches_build_hwv: bool,
    pub variants: Vec<VariantEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BookkeepingRow {
    pub degree: Half,
    pub zero_modes: usize,
    pub dim_fock: usize,
    /// Σ_μ dim L_G(μ) · dim of the closure of v_μ in this degree.
    pub closure_sum: u64,
    /// Σ_λ dim L(λ) · (finite highest-weight vectors of weight λ); SO_n weights for O_n.
    pub singular_sum: u64,
    pub balanced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub pair: Pair,
    pub m: usize,
    pub n: usize,
    pub flavor: Flavor,
    pub s0: String,
    pub window: TruncationWindow,
    pub fock_dim: usize,
    pub labels: Vec<LabelEntry>,
    pub bookkeeping: Vec<BookkeepingRow>,
    pub anomalies: Vec<String>,
    pub multiplicity_free: bool,
    pub labels_match_prediction: bool,
    pub lines_match_build_hwv: bool,
    pub bookkeeping_balanced: bool,
    pub passed: bool,
}

/// Everything the bookkeeping needs from the search.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub report: DecompositionReport,
    /// Finite highest-weight multiplicities per slot.
    pub finite_singular: BTreeMap<SlotKey, usize>,
    /// dim F per (energy, zero modes).
    pub fock_dims: BTreeMap<(Half, usize), usize>,
    /// v_μ at s0 for every label whose vector lies in the extended zero-mode window.
    pub hwvs: BTreeMap<WeightLabel, RatVector>,
}

/// Extra zero modes allowed when grading labels and closures, so that modules
/// whose generating vector sits above the cap still get counted below it.
pub const ZERO_MODE_SLACK: usize = 2;

struct SlotResult {
    key: SlotKey,
    finite: usize,
    joint: Vec<(WeightLabel, RatVector)>,
    anomalies: Vec<String>,
}

/// Joint singular vectors in the window: kernels of the finite raising
/// operators and then of the toroidal plus generators, per weight slot.
pub fn joint_singular_search(
    dp: &DualPair,
    flavor: Flavor,
    window: &TruncationWindow,
    s0: &BigRational,
) -> Result<SearchOutcome, DecompError> {
    check_domain(dp, flavor)?;
    let kind = FockKind::new(dp.big_n(), flavor);
    let raising: Vec<ToroidalElement> =
        finite_raising(dp)?.iter().map(|g| dp.embed_gen(Side::Finite, g)).collect::<Result<_, _>>()?;
    let talg = dp.source(Side::Toroidal);
    let mut plus: Vec<(Gen, ToroidalElement)> = Vec::new();
    for g in dp.toroidal_generators(window.a_max, window.b_max) {
        if !g.is_central() && classify(talg, flavor, &g)? == TriangularClass::Plus {
            plus.push((g, dp.embed_gen(Side::Toroidal, &g)?));
        }
    }
    let slots: Vec<(SlotKey, Vec<Monomial>)> = weight_slots(dp, flavor, window).into_iter().collect();
    let mut fock_dims: BTreeMap<(Half, usize), usize> = BTreeMap::new();
    for ((e, z, _), monos) in &slots {
        *fock_dims.entry((*e, *z)).or_default() += monos.len();
    }

    let results: Vec<Result<SlotResult, DecompError>> = slots
        .par_iter()
        .map(|(key, monos)| {
            let basis: Vec<RatVector> =
                monos.iter().map(|m| RatVector::from([(m.clone(), BigRational::one())])).collect();
            let fin_ops: Vec<&ToroidalElement> = raising.iter().collect();
            let k1 = common_kernel(&kind, &fin_ops, &basis, s0)?;
            let tor_ops: Vec<&ToroidalElement> =
                plus.iter().filter(|(g, _)| Half::from_int(g.a) <= key.0).map(|(_, x)| x).collect();
            let k2 = common_kernel(&kind, &tor_ops, &k1, s0)?;
            let mut anomalies = Vec::new();
            let joint = assign_labels(dp, &key.2, k2, &mut anomalies)?;
            Ok(SlotResult { key: key.clone(), finite: k1.len(), joint, anomalies })
        })
        .collect();

    let mut anomalies = Vec::new();
    let mut finite_singular = BTreeMap::new();
    let mut found: BTreeMap<WeightLabel, Vec<(Half, usize, RatVector)>> = BTreeMap::new();
    for r in results {
        let r = r?;
        anomalies.extend(r.anomalies.into_iter().map(|a| format!("slot {:?}: {a}", r.key)));
        if r.finite > 0 {
            let dominant = match dp.pair {
                Pair::GlGl => WeightLabel::new(Group::Gl(dp.n), r.key.2.clone(), false).is_ok(),
                Pair::SpSo => {
                    let mut e = r.key.2.clone();
                    e.resize(2 * dp.n, 0);
                    WeightLabel::new(Group::Sp(dp.n), e, false).is_ok()
                }
                Pair::SoSp => WeightLabel::new(Group::So(dp.n), r.key.2.clone(), false).is_ok(),
            };
            if !dominant {
                anomalies.push(format!("slot {:?}: finite highest-weight vectors at a non-dominant weight", r.key));
            }
        }
        finite_singular.insert(r.key.clone(), r.finite);
        for (l, v) in r.joint {
            found.entry(l).or_default().push((r.key.0, r.key.1, v));
        }
    }

    // predicted labels: |P| ≤ 2E + zero modes bounds the size
    let group = Group::for_pair(dp);
    let cap = window.zm_cap(flavor);
    let zm_limit = if flavor.is_integer() { cap + ZERO_MODE_SLACK } else { 0 };
    let bound = window.max_energy.twice() + zm_limit as i64;
    let mut cache = HashMap::new();
    let mut candidates = Vec::new();
    for label in enumerate_labels(group, bound) {
        let (e, z) = hwv_grading(dp, &label, flavor, &mut cache)?;
        if e <= window.max_energy && z >= 0 && z as usize <= zm_limit {
            candidates.push((label, e, z as usize));
        }
    }
    let built: Vec<Result<Vec<(WeightLabel, RatVector)>, DecompError>> = candidates
        .par_iter()
        .map(|(label, _, _)| {
            so_variants(label)
                .into_iter()
                .map(|v| {
                    let h = build_hwv(dp, &v, flavor)?;
                    Ok((v, specialize_vector(&h.vector, s0)?))
                })
                .collect()
        })
        .collect();

    let mut hwvs = BTreeMap::new();
    let mut labels = Vec::new();
    let mut claimed: BTreeSet<WeightLabel> = BTreeSet::new();
    for ((label, e, z), b) in candidates.iter().zip(built) {
        let b = b?;
        let predicted = *z <= cap;
        let mut variants = Vec::new();
        for (vl, hv) in &b {
            if hv.is_empty() {
                anomalies.push(format!("build_hwv({vl}) vanishes at s0"));
            } else if hv.keys().any(|m| (monomial_energy(m), zero_mode_count(m)) != (*e, *z)) {
                anomalies.push(format!("build_hwv({vl}) is not homogeneous of degree ({e}, {z})"));
            }
            let hits = found.get(vl).map(|x| x.as_slice()).unwrap_or(&[]);
            claimed.insert(vl.clone());
            variants.push(VariantEntry {
                label: vl.clone(),
                found: hits.len(),
                degree: hits.first().map(|h| h.0),
                zero_modes: hits.first().map(|h| h.1),
                matches_build_hwv: hits.first().map(|h| hits.len() == 1 && h.0 == *e && proportional(&h.2, hv)),
            });
        }
        hwvs.insert(label.clone(), b[0].1.clone());
        let found_all = variants.iter().all(|v| v.found == 1);
        let matches = variants.iter().all(|v| v.matches_build_hwv == Some(true));
        if predicted || variants.iter().any(|v| v.found > 0) {
            labels.push(LabelEntry {
                label: label.clone(),
                predicted,
                hwv_degree: *e,
                hwv_zero_modes: *z,
                found: found_all,
                matches_build_hwv: matches,
                variants,
            });
        }
    }
    for (l, hits) in &found {
        if !claimed.contains(l) {
            anomalies.push(format!("joint singular vector with label {l} outside the predicted set ({} lines)", hits.len()));
        }
    }

    let multiplicity_free = found.values().all(|h| h.len() <= 1)
        && !anomalies.iter().any(|a| a.contains("non-dominant"));
    let labels_match_prediction = labels.iter().all(|l| l.predicted == l.found)
        && found.keys().all(|l| claimed.contains(l));
    let lines_match_build_hwv = labels.iter().filter(|l| l.found).all(|l| l.matches_build_hwv);
    let report = DecompositionReport {
        pair: dp.pair,
        m: dp.m,
        n: dp.n,
        flavor,
        s0: s0.to_string(),
        window: *window,
        fock_dim: fock_dims.values().sum(),
        labels,
        bookkeeping: Vec::new(),
        anomalies,
        multiplicity_free,
        labels_match_prediction,
        lines_match_build_hwv,
        bookkeeping_balanced: false,
        passed: false,
    };
    Ok(SearchOutcome { report, finite_singular, fock_dims, hwvs })
}

/// An invariant quadratic of the Weyl algebra with its effect on the grading.
#[derive(Debug, Clone)]
pub struct InvariantQuadratic {
    pub name: String,
    pub op: WeylElement,
    pub energy_shift: Half,
    pub zero_mode_shift: i64,
}

/// Levels of Z with |r| ≤ max.
fn levels(flavor: Flavor, max: Half) -> Vec<Half> {
    let mut out = Vec::new();
    let mut t = if flavor.is_integer() { 0 } else { 1 };
    while t <= max.twice() {
        out.push(Half::from_twice(t));
        if t != 0 {
            out.push(Half::from_twice(-t));
        }
        t += 2;
    }
    out.sort();
    out
}

/// The generating invariants of W_N(Z)^G with both mode levels in [−max, max].
pub fn invariant_quadratics(dp: &DualPair, flavor: Flavor, max_level: Half) -> Result<Vec<InvariantQuadratic>, DecompError> {
    check_domain(dp, flavor)?;
    let (m, n) = (dp.m, dp.n);
    let psi = |i: usize, k: usize, a: Half| Mode::psi(dp.pi(i, k), a);
    let psibar = |i: usize, k: usize, a: Half| Mode::psibar(dp.pi(i, k), a);
    let lv = levels(flavor, max_level);
    let mut out = Vec::new();
    let mut push = |name: String, op: WeylElement| {
        let Some((word, _)) = op.terms().next() else { return };
        let (e, z) = word_grading(word, flavor);
        out.push(InvariantQuadratic { name, op, energy_shift: e, zero_mode_shift: z });
    };
    for i in 1..=m {
        for j in 1..=m {
            for &a in &lv {
                for &b in &lv {
                    let one = QScalar::one();
                    let mut x = WeylElement::zero();
                    for k in 1..=n {
                        x.add_word(vec![psi(i, k, a), psibar(j, k, b)], one.clone());
                        if dp.pair == Pair::SpSo {
                            x.add_word(vec![psibar(m + 1 - i, k, a), psi(m + 1 - j, k, b)], -one.clone());
                        }
                    }
                    push(format!("psi.psibar[{i},{j}]({a},{b})"), x);
                    if dp.pair == Pair::SoSp {
                        let mut y = WeylElement::zero();
                        let mut z = WeylElement::zero();
                        for k in 1..=n {
                            y.add_word(vec![psi(i, k, a), psi(j, n + 1 - k, b)], one.clone());
                            z.add_word(vec![psibar(i, k, a), psibar(j, n + 1 - k, b)], one.clone());
                        }
                        push(format!("psi.psi[{i},{j}]({a},{b})"), y);
                        push(format!("psibar.psibar[{i},{j}]({a},{b})"), z);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// A subspace of the truncated Fock space split by (energy, zero modes).
#[derive(Debug, Clone, Default)]
pub struct GradedSubspace {
    pub pieces: BTreeMap<(Half, usize), Vec<RatVector>>,
}

impl GradedSubspace {
    pub fn dim(&self) -> usize {
        self.pieces.values().map(|v| v.len()).sum()
    }

    pub fn dim_at(&self, e: Half, z: usize) -> usize {
        self.pieces.get(&(e, z)).map_or(0, |v| v.len())
    }
}

/// Closure of a homogeneous vector under the invariant quadratics whose
/// application stays within energy ≤ `max_energy` and `zm_cap` zero modes.
pub fn invariant_generate(
    dp: &DualPair,
    flavor: Flavor,
    v: &RatVector,
    max_energy: Half,
    zm_cap: usize,
) -> Result<GradedSubspace, DecompError> {
    let quads = invariant_quadratics(dp, flavor, max_energy)?;
    invariant_generate_with(dp, flavor, &quads, v, max_energy, zm_cap)
}

fn invariant_generate_with(
    dp: &DualPair,
    flavor: Flavor,
    quads: &[InvariantQuadratic],
    v: &RatVector,
    max_energy: Half,
    zm_cap: usize,
) -> Result<GradedSubspace, DecompError> {
    let kind = FockKind::new(dp.big_n(), flavor);
    let mut out = GradedSubspace::default();
    let Some(first) = v.keys().next() else { return Ok(out) };
    let grade0 = (monomial_energy(first), zero_mode_count(first));
    if v.keys().any(|m| (monomial_energy(m), zero_mode_count(m)) != grade0) {
        return Err(DecompError::Domain("invariant_generate needs a homogeneous vector".into()));
    }
    let mut index: HashMap<Monomial, usize> = HashMap::new();
    let mut reducers: BTreeMap<(Half, usize), RowReducer> = BTreeMap::new();
    let mut add = |g: (Half, usize), w: RatVector, out: &mut GradedSubspace| -> bool {
        let row: Vec<(usize, BigRational)> = w
            .iter()
            .map(|(m, x)| {
                let l = index.len();
                (*index.entry(m.clone()).or_insert(l), x.clone())
            })
            .collect();
        let red = reducers.entry(g).or_insert_with(|| RowReducer::new(usize::MAX));
        if red.insert_rational(row) {
            out.pieces.entry(g).or_default().push(w);
            true
        } else {
            false
        }
    };
    let mut queue = VecDeque::new();
    if grade0.0 <= max_energy && grade0.1 <= zm_cap && add(grade0, v.clone(), &mut out) {
        queue.push_back((grade0, v.clone()));
    }
    while let Some(((e, z), u)) = queue.pop_front() {
        let lu = lift_vector(&u);
        for q in quads {
            let e2 = e + q.energy_shift;
            let z2 = z as i64 + q.zero_mode_shift;
            if e2 > max_energy || e2 < Half::ZERO || z2 < 0 || z2 as usize > zm_cap {
                continue;
            }
            let w = rational_vector(&q.op.apply(&kind, &lu)?)?;
            if w.is_empty() {
                continue;
            }
            let g = (e2, z2 as usize);
            if add(g, w.clone(), &mut out) {
                queue.push_back((g, w));
            }
        }
    }
    Ok(out)
}

/// Per (energy, zero modes) with zero modes ≤ cap:
/// dim F = Σ_μ dim L_G(μ) · dim(closure of v_μ) = Σ_λ dim L(λ) · #(finite highest-weight vectors).
/// Also compares the closures with the finite highest-weight multiplicities weight by weight.
pub fn bookkeeping(
    dp: &DualPair,
    flavor: Flavor,
    search: &SearchOutcome,
) -> Result<(Vec<BookkeepingRow>, Vec<String>), DecompError> {
    let window = search.report.window;
    let cap = window.zm_cap(flavor);
    let zm_limit = if flavor.is_integer() { cap + ZERO_MODE_SLACK } else { 0 };
    let quads = invariant_quadratics(dp, flavor, window.max_energy)?;
    let closures: Vec<Result<(WeightLabel, GradedSubspace), DecompError>> = search
        .hwvs
        .par_iter()
        .map(|(l, v)| Ok((l.clone(), invariant_generate_with(dp, flavor, &quads, v, window.max_energy, zm_limit)?)))
        .collect();
    let mut closure_sum: BTreeMap<(Half, usize), u64> = BTreeMap::new();
    // expected finite highest-weight multiplicity per slot from the closures
    let mut expected: BTreeMap<SlotKey, usize> = BTreeMap::new();
    for c in closures {
        let (label, sub) = c?;
        let dim = dim_irrep(&label);
        let weights: Vec<Vec<i64>> = match label.group {
            Group::O(_) => label.so_restriction().into_iter().map(|s| s.entries).collect(),
            Group::Sp(n) => vec![label.entries[..n].to_vec()],
            _ => vec![label.entries.clone()],
        };
        for (&(e, z), basis) in &sub.pieces {
            if z > cap {
                continue;
            }
            *closure_sum.entry((e, z)).or_default() += dim * basis.len() as u64;
            for w in &weights {
                *expected.entry((e, z, w.clone())).or_default() += basis.len();
            }
        }
    }
    let mut singular_sum: BTreeMap<(Half, usize), u64> = BTreeMap::new();
    let mut anomalies = Vec::new();
    for (key, &k) in &search.finite_singular {
        if k > 0 {
            let l = match dp.pair {
                Pair::GlGl => WeightLabel::new(Group::Gl(dp.n), key.2.clone(), false),
                Pair::SpSo => {
                    let mut e = key.2.clone();
                    e.resize(2 * dp.n, 0);
                    WeightLabel::new(Group::Sp(dp.n), e, false)
                }
                Pair::SoSp => WeightLabel::new(Group::So(dp.n), key.2.clone(), false),
            };
            if let Ok(l) = l {
                *singular_sum.entry((key.0, key.1)).or_default() += dim_irrep(&l) * k as u64;
            }
        }
        let want = expected.get(key).copied().unwrap_or(0);
        if want != k {
            anomalies.push(format!("slot {key:?}: {k} finite highest-weight vectors but closures give {want}"));
        }
    }
    for (key, &want) in &expected {
        if !search.finite_singular.contains_key(key) && want > 0 {
            anomalies.push(format!("slot {key:?}: closures reach a weight with no basis monomials"));
        }
    }
    let rows = search
        .fock_dims
        .iter()
        .map(|(&(e, z), &d)| {
            let c = closure_sum.get(&(e, z)).copied().unwrap_or(0);
            let s = singular_sum.get(&(e, z)).copied().unwrap_or(0);
            BookkeepingRow {
                degree: e,
                zero_modes: z,
                dim_fock: d,
                closure_sum: c,
                singular_sum: s,
                balanced: c == d as u64 && s == d as u64,
            }
        })
        .collect();
    Ok((rows, anomalies))
}

/// Search plus bookkeeping, with the overall verdict.
pub fn decompose(
    dp: &DualPair,
    flavor: Flavor,
    window: &TruncationWindow,
    s0: &BigRational,
) -> Result<DecompositionReport, DecompError> {
    let search = joint_singular_search(dp, flavor, window, s0)?;
    let (rows, extra) = bookkeeping(dp, flavor, &search)?;
    let mut report = search.report;
    report.bookkeeping_balanced = extra.is_empty() && rows.iter().all(|r| r.balanced);
    report.anomalies.extend(extra);
    report.bookkeeping = rows;
    report.passed = report.multiplicity_free
        && report.labels_match_prediction
        && report.lines_match_build_hwv
        && report.bookkeeping_balanced;
    Ok(report)
}

#[cfg(test)]
mod tests;
