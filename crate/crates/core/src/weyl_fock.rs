//! The enlarged Weyl algebra W_N(Z), its Fock module F_N(Z), and the
//! oscillator action ρ_Z of ŝp_2N(C_q).
//!
//! Modes u(k) satisfy u(k)v(r) − v(r)u(k) = ⟨u,v⟩ δ_{k+r,0} with
//! ⟨ψ̄_i, ψ_j⟩ = δ_{ij}. Creation modes (k < 0, plus ψ(0) when Z = ℤ) commute
//! with each other, so a basis of F_N(Z) is given by sorted multisets of them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::half::Half;
use crate::qfield::{omega, QMode, QScalar};
use crate::toroidal::{AlgError, DualPair, Family, Gen, Pair, Side, ToroidalElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// Z = ℤ
    Integer,
    /// Z = ℤ + ½
    HalfInteger,
}

impl Flavor {
    pub const ALL: [Flavor; 2] = [Flavor::Integer, Flavor::HalfInteger];

    pub fn is_integer(self) -> bool {
        self == Flavor::Integer
    }

    /// ε: ½ for ℤ, 0 for ℤ + ½.
    pub fn epsilon(self) -> Half {
        match self {
            Flavor::Integer => Half::from_twice(1),
            Flavor::HalfInteger => Half::ZERO,
        }
    }

    /// Whether `k` lies in Z.
    pub fn contains(self, k: Half) -> bool {
        k.is_integer() == self.is_integer()
    }

    /// The element of Z closest to 0 from below with the right parity,
    /// i.e. the largest negative level.
    pub fn top_negative(self) -> Half {
        match self {
            Flavor::Integer => Half::from_int(-1),
            Flavor::HalfInteger => Half::from_twice(-1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Integer => "int",
            Flavor::HalfInteger => "half",
        }
    }
}

impl FromStr for Flavor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "int" | "integer" | "Z" => Ok(Flavor::Integer),
            "half" | "half-integer" | "half_integer" | "Z+1/2" => Ok(Flavor::HalfInteger),
            _ => Err(format!("unknown flavor {s:?} (expected int or half)")),
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Species {
    Psi,
    PsiBar,
}

impl Species {
    pub fn dual(self) -> Species {
        match self {
            Species::Psi => Species::PsiBar,
            Species::PsiBar => Species::Psi,
        }
    }
}

/// ⟨u, v⟩ for basis vectors u = (s1, i), v = (s2, j).
pub fn pairing(s1: Species, i: usize, s2: Species, j: usize) -> i64 {
    if i != j {
        return 0;
    }
    match (s1, s2) {
        (Species::PsiBar, Species::Psi) => 1,
        (Species::Psi, Species::PsiBar) => -1,
        _ => 0,
    }
}

/// u(k) with u = ψ_index or ψ̄_index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Mode {
    pub species: Species,
    pub index: usize,
    pub level: Half,
}

impl Mode {
    pub fn psi(index: usize, level: Half) -> Self {
        Mode { species: Species::Psi, index, level }
    }

    pub fn psibar(index: usize, level: Half) -> Self {
        Mode { species: Species::PsiBar, index, level }
    }

    pub fn is_creation(&self, flavor: Flavor) -> bool {
        self.level.is_negative()
            || (self.level == Half::ZERO && self.species == Species::Psi && flavor.is_integer())
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.species {
            Species::Psi => "psi",
            Species::PsiBar => "psibar",
        };
        write!(f, "{name}[{}]({})", self.index, self.level)
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        let bad = || format!("cannot parse mode {s:?}");
        let (species, rest) = if let Some(r) = t.strip_prefix("psibar") {
            (Species::PsiBar, r)
        } else if let Some(r) = t.strip_prefix("psi") {
            (Species::Psi, r)
        } else {
            return Err(bad());
        };
        let (idx, lvl) = rest
            .strip_prefix('[')
            .and_then(|r| r.split_once("]("))
            .and_then(|(i, l)| l.strip_suffix(')').map(|l| (i, l)))
            .ok_or_else(bad)?;
        Ok(Mode {
            species,
            index: idx.trim().parse().map_err(|_| bad())?,
            level: lvl.parse().map_err(|_| bad())?,
        })
    }
}

/// N and the flavor of F_N(Z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FockKind {
    pub n: usize,
    pub flavor: Flavor,
}

impl FockKind {
    pub fn new(n: usize, flavor: Flavor) -> Self {
        FockKind { n, flavor }
    }

    pub fn epsilon(&self) -> Half {
        self.flavor.epsilon()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FockError {
    #[error("level {0} is not in the flavor's index set")]
    FlavorMismatch(Half),
    #[error("mode index {0} outside 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("{0}")]
    Algebra(#[from] AlgError),
    #[error("cannot parse Fock vector: {0}")]
    Parse(String),
}

/// Sorted multiset of creation modes.
pub type Monomial = Vec<Mode>;

/// Finite linear combination of creation monomials applied to |0⟩.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct FockVector {
    terms: BTreeMap<Monomial, QScalar>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::basis(Vec::new())
    }

    /// The basis vector of a (not necessarily sorted) list of creation modes.
    pub fn basis(mut modes: Monomial) -> Self {
        modes.sort();
        let mut terms = BTreeMap::new();
        terms.insert(modes, QScalar::one());
        FockVector { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &QScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> QScalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: Monomial, c: &QScalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, o: &FockVector) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn add_scaled(&mut self, k: &QScalar, o: &FockVector) {
        if k.is_zero() {
            return;
        }
        for (m, c) in &o.terms {
            self.add_term(m.clone(), &(c * k));
        }
    }

    pub fn scale(&self, k: &QScalar) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        FockVector { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn sub(&self, o: &FockVector) -> Self {
        let mut out = self.clone();
        out.add_scaled(&QScalar::from_int(-1), o);
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Monomial, &QScalar) -> QScalar) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(m, c));
        }
        out
    }

    /// Some nonzero coefficient `c` and monomial with `self = c * other` if the
    /// two vectors are proportional.
    pub fn ratio_to(&self, other: &FockVector) -> Option<QScalar> {
        let (m, c) = other.terms.iter().next()?;
        let k = self.coeff(m) / c;
        (other.scale(&k) == *self).then_some(k)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| {
                    serde_json::json!({"monomial": monomial_string(m), "coeff": c.to_string()})
                })
                .collect(),
        )
    }
}

pub fn monomial_string(m: &Monomial) -> String {
    let s: Vec<String> = m.iter().map(|x| x.to_string()).collect();
    format!("{}|0>", s.join("*"))
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{}", monomial_string(m))?;
            } else {
                write!(f, "({c})*{}", monomial_string(m))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FockVector[{self}]")
    }
}

impl FromStr for FockVector {
    type Err = FockError;

    /// Sums of `(coeff)*psi[1](-1/2)*psibar[2](-3/2)|0>`; coefficients optional.
    fn from_str(s: &str) -> Result<Self, FockError> {
        let mut out = FockVector::zero();
        let t = s.trim();
        if t == "0" {
            return Ok(out);
        }
        for part in t.split(" + ") {
            let part = part.trim();
            let body = part
                .strip_suffix("|0>")
                .ok_or_else(|| FockError::Parse(format!("missing |0> in {part:?}")))?;
            let (coeff, modes) = if let Some(rest) = body.strip_prefix('(') {
                let close = matching_paren(rest).ok_or_else(|| FockError::Parse(part.into()))?;
                let c: QScalar = rest[..close].parse().map_err(|e| FockError::Parse(format!("{e}")))?;
                let tail = rest[close + 1..].trim_start_matches('*');
                (c, tail)
            } else {
                (QScalar::one(), body)
            };
            let mut mono = Vec::new();
            for tok in modes.split('*').filter(|x| !x.is_empty()) {
                mono.push(tok.parse::<Mode>().map_err(FockError::Parse)?);
            }
            mono.sort();
            out.add_term(mono, &coeff);
        }
        Ok(out)
    }
}

/// Byte offset of the ')' closing an already opened '('.
fn matching_paren(s: &str) -> Option<usize> {
    let mut depth = 1usize;
    for (k, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(k);
                }
            }
            _ => {}
        }
    }
    None
}

fn check_mode(kind: &FockKind, m: &Mode) -> Result<(), FockError> {
    if !kind.flavor.contains(m.level) {
        return Err(FockError::FlavorMismatch(m.level));
    }
    if m.index == 0 || m.index > kind.n {
        return Err(FockError::IndexOutOfRange(m.index, kind.n));
    }
    Ok(())
}

fn insert_sorted(m: &Monomial, x: Mode) -> Monomial {
    let pos = m.partition_point(|y| *y <= x);
    let mut out = Vec::with_capacity(m.len() + 1);
    out.extend_from_slice(&m[..pos]);
    out.push(x);
    out.extend_from_slice(&m[pos..]);
    out
}

/// u(k) applied to a single monomial with coefficient `c`, accumulated into `out`.
fn mode_apply_monomial(flavor: Flavor, u: &Mode, mono: &Monomial, c: &QScalar, out: &mut FockVector) {
    if u.is_creation(flavor) {
        out.add_term(insert_sorted(mono, *u), c);
        return;
    }
    // Annihilator: commute through; only the partner mode at level −k pairs.
    let partner = Mode { species: u.species.dual(), index: u.index, level: -u.level };
    let sign = pairing(u.species, u.index, partner.species, partner.index);
    let lo = mono.partition_point(|y| *y < partner);
    let hi = mono.partition_point(|y| *y <= partner);
    let count = (hi - lo) as i64;
    if count == 0 {
        return;
    }
    let mut rest = Vec::with_capacity(mono.len() - 1);
    rest.extend_from_slice(&mono[..lo]);
    rest.extend_from_slice(&mono[lo + 1..]);
    out.add_term(rest, &c.scale_int(sign * count));
}

/// Left multiplication by a single mode.
pub fn mode_apply(kind: &FockKind, u: &Mode, v: &FockVector) -> Result<FockVector, FockError> {
    check_mode(kind, u)?;
    let mut out = FockVector::zero();
    for (m, c) in &v.terms {
        mode_apply_monomial(kind.flavor, u, m, c, &mut out);
    }
    Ok(out)
}

/// Applies the product x·y (y first) of two modes.
fn apply_pair(flavor: Flavor, x: &Mode, y: &Mode, mono: &Monomial, c: &QScalar, out: &mut FockVector) {
    let mut tmp = FockVector::zero();
    mode_apply_monomial(flavor, y, mono, c, &mut tmp);
    for (m2, c2) in &tmp.terms {
        mode_apply_monomial(flavor, x, m2, c2, out);
    }
}

/// :u(k) w(r): applied to one monomial, times `c`.
fn normal_ordered_apply(flavor: Flavor, u: &Mode, w: &Mode, mono: &Monomial, c: &QScalar, out: &mut FockVector) {
    let r = w.level;
    if r.is_positive() {
        apply_pair(flavor, u, w, mono, c, out);
    } else if r.is_negative() {
        apply_pair(flavor, w, u, mono, c, out);
    } else {
        let half = c * QScalar::from_ratio(1, 2);
        apply_pair(flavor, u, w, mono, &half, out);
        apply_pair(flavor, w, u, mono, &half, out);
    }
}

/// Species of the two factors of ρ(x) for x in the f, g, h families.
fn quadratic_species(fam: Family) -> (Species, Species) {
    match fam {
        Family::F => (Species::Psi, Species::PsiBar),
        Family::G => (Species::Psi, Species::Psi),
        Family::H => (Species::PsiBar, Species::PsiBar),
        _ => panic!("not an sp family: {fam:?}"),
    }
}

/// The single r-term q^{−br} :u_i(a−r) w_j(r): applied to `v`.
pub fn rho_term(kind: &FockKind, g: &Gen, r: Half, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    if !kind.flavor.contains(r) {
        return out;
    }
    let (su, sw) = quadratic_species(g.family);
    let u = Mode { species: su, index: g.i, level: Half::from_int(g.a) - r };
    let w = Mode { species: sw, index: g.j, level: r };
    let coeff = QScalar::s_pow(-g.b * r.twice());
    for (m, c) in &v.terms {
        normal_ordered_apply(kind.flavor, &u, &w, m, &(c * &coeff), &mut out);
    }
    out
}

/// The finite set of r for which the r-term of ρ(g) can be nonzero on `v`:
/// both modes creating (r between a and 0), or an annihilator meeting a mode of `v`.
pub fn rho_candidates(kind: &FockKind, g: &Gen, v: &FockVector) -> BTreeSet<Half> {
    let mut out = BTreeSet::new();
    let a = Half::from_int(g.a);
    let (lo, hi) = if a < Half::ZERO { (a, Half::ZERO) } else { (Half::ZERO, a) };
    let mut r = lo;
    while r <= hi {
        if kind.flavor.contains(r) {
            out.insert(r);
        }
        r = r + Half::from_twice(1);
    }
    let mut levels = BTreeSet::new();
    for m in v.terms.keys() {
        for x in m {
            levels.insert(x.level);
        }
    }
    for l in levels {
        for r in [-l, a + l] {
            if kind.flavor.contains(r) {
                out.insert(r);
            }
        }
    }
    out
}

/// The r with nonzero contribution, from the computed candidate set.
pub fn rho_support(kind: &FockKind, g: &Gen, v: &FockVector) -> BTreeSet<Half> {
    rho_candidates(kind, g, v).into_iter().filter(|&r| !rho_term(kind, g, r, v).is_zero()).collect()
}

/// The r with nonzero contribution, found by scanning |r| ≤ window.
pub fn rho_support_scan(kind: &FockKind, g: &Gen, v: &FockVector, window: i64) -> BTreeSet<Half> {
    (-2 * window..=2 * window)
        .map(Half::from_twice)
        .filter(|&r| kind.flavor.contains(r))
        .filter(|&r| !rho_term(kind, g, r, v).is_zero())
        .collect()
}

/// ρ_Z of a generator f/g/h_{ij}(a,b) or c of ŝp_2N(C_q).
pub fn rho_apply(kind: &FockKind, g: &Gen, v: &FockVector) -> Result<FockVector, FockError> {
    if g.is_central() {
        return Ok(v.scale(&QScalar::from_int(-1)));
    }
    if !matches!(g.family, Family::F | Family::G | Family::H) {
        return Err(AlgError::WrongFamily(g.to_string(), format!("sp_{}", 2 * kind.n)).into());
    }
    if g.i == 0 || g.i > kind.n || g.j == 0 || g.j > kind.n {
        return Err(AlgError::IndexOutOfRange(format!("{g} with N = {}", kind.n)).into());
    }
    let mut out = FockVector::zero();
    for r in rho_candidates(kind, g, v) {
        out.add_assign(&rho_term(kind, g, r, v));
    }
    if g.family == Family::F && g.i == g.j && g.a == 0 && g.b != 0 {
        // Constant term +ω_Z(b). With c acting as −1 this is the sign for which
        // ρ respects the bracket; the opposite sign breaks [f_ii(a,b), f_ii(−a,b')].
        out.add_scaled(&omega(kind.flavor.is_integer(), g.b), v);
    }
    Ok(out)
}

/// ρ_Z of an arbitrary element of ŝp_2N(C_q), decomposed as
/// Σ f_{ij}(U_{ij}) + ½ Σ g_{ij}(B_{ij}) − ½ Σ h_{ij}(C_{ij}) for the blocks U, B, C.
pub fn rho_element(kind: &FockKind, x: &ToroidalElement, v: &FockVector) -> Result<FockVector, FockError> {
    let n = kind.n;
    if x.algebra().ambient() != 2 * n {
        return Err(AlgError::AmbientMismatch(x.algebra().ambient(), 2 * n).into());
    }
    let mut out = v.scale(&-x.central());
    let half = QScalar::from_ratio(1, 2);
    for (&(i, j), t) in x.entries() {
        let (fam, ii, jj, k) = if i <= n && j <= n {
            (Family::F, i, j, QScalar::one())
        } else if i <= n {
            (Family::G, i, j - n, half.clone())
        } else if j <= n {
            (Family::H, i - n, j, -&half)
        } else {
            continue;
        };
        for (&(a, b), c) in t.terms() {
            let w = rho_apply(kind, &Gen::new(fam, ii, jj, a, b), v)?;
            out.add_scaled(&(c * &k), &w);
        }
    }
    Ok(out)
}

/// Action of a source generator of a dual pair on F_N(Z) through the
/// embedding into ŝp_2N(C_q). For (gl_n, ĝl_m) with Z = ℤ the finite side
/// carries the shift E_{ij} ↦ … − δ_{ij} m/2.
pub fn embedded_apply(
    dp: &DualPair,
    side: Side,
    g: &Gen,
    flavor: Flavor,
    v: &FockVector,
) -> Result<FockVector, FockError> {
    if dp.pair == Pair::SpSo && side == Side::Toroidal && flavor.is_integer() {
        return Err(AlgError::UnsupportedFlavor("so_m(C_q) acts only on F_N(Z+1/2) in this pair".into()).into());
    }
    let kind = FockKind::new(dp.big_n(), flavor);
    let image = dp.embed_gen(side, g)?;
    let mut out = rho_element(&kind, &image, v)?;
    if dp.pair == Pair::GlGl && side == Side::Finite && flavor.is_integer() && g.i == g.j {
        out.add_scaled(&QScalar::from_ratio(-(dp.m as i64), 2), v);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnergyComponent {
    pub energy: Half,
    pub zero_modes: usize,
    pub terms: usize,
}

/// Energy Σ(−k) of a monomial.
pub fn monomial_energy(m: &Monomial) -> Half {
    m.iter().fold(Half::ZERO, |acc, x| acc - x.level)
}

pub fn zero_mode_count(m: &Monomial) -> usize {
    m.iter().filter(|x| x.level == Half::ZERO).count()
}

/// Homogeneous components by (energy, zero-mode count).
pub fn energy(v: &FockVector) -> Vec<EnergyComponent> {
    let mut comps: BTreeMap<(Half, usize), usize> = BTreeMap::new();
    for m in v.terms.keys() {
        *comps.entry((monomial_energy(m), zero_mode_count(m))).or_default() += 1;
    }
    comps
        .into_iter()
        .map(|((energy, zero_modes), terms)| EnergyComponent { energy, zero_modes, terms })
        .collect()
}

impl FockVector {
    /// Whether every coefficient vanishes under `mode`.
    pub fn is_zero_in(&self, mode: &QMode) -> bool {
        self.terms.values().all(|c| mode.is_zero(c))
    }
}

/// Creation modes of F_N(Z) with energy at most `max_energy`.
pub fn creation_modes(kind: &FockKind, max_energy: Half) -> Vec<Mode> {
    let mut out = Vec::new();
    let mut level = if kind.flavor.is_integer() { Half::ZERO } else { Half::from_twice(-1) };
    while -level <= max_energy {
        for index in 1..=kind.n {
            for species in [Species::Psi, Species::PsiBar] {
                let x = Mode { species, index, level };
                if x.is_creation(kind.flavor) {
                    out.push(x);
                }
            }
        }
        level = level - Half::from_int(1);
    }
    out.sort();
    out
}

/// Creation monomials with energy ≤ `max_energy` and at most `zm_cap` zero
/// modes, ordered by (energy, monomial).
pub fn graded_basis(kind: &FockKind, max_energy: Half, zm_cap: usize) -> Vec<Monomial> {
    fn go(
        modes: &[Mode],
        start: usize,
        left: Half,
        zm_left: usize,
        cur: &mut Monomial,
        out: &mut Vec<Monomial>,
    ) {
        out.push(cur.clone());
        for (k, x) in modes.iter().enumerate().skip(start) {
            let e = -x.level;
            if e > left || (x.level == Half::ZERO && zm_left == 0) {
                continue;
            }
            cur.push(*x);
            let zl = if x.level == Half::ZERO { zm_left - 1 } else { zm_left };
            go(modes, k, left - e, zl, cur, out);
            cur.pop();
        }
    }
    let modes = creation_modes(kind, max_energy);
    let mut out = Vec::new();
    go(&modes, 0, max_energy, zm_cap, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| (monomial_energy(a), a).cmp(&(monomial_energy(b), b)));
    out
}

/// Finite sum of ordered mode products; each word acts on F_N(Z) starting
/// from its rightmost mode.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeylElement {
    terms: Vec<(Vec<Mode>, QScalar)>,
}

impl WeylElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::word(Vec::new(), QScalar::one())
    }

    pub fn word(modes: Vec<Mode>, c: QScalar) -> Self {
        let mut out = Self::zero();
        out.add_word(modes, c);
        out
    }

    pub fn add_word(&mut self, modes: Vec<Mode>, c: QScalar) {
        if !c.is_zero() {
            self.terms.push((modes, c));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &(Vec<Mode>, QScalar)> {
        self.terms.iter()
    }

    pub fn add_assign(&mut self, o: &WeylElement) {
        self.terms.extend(o.terms.iter().cloned());
    }

    pub fn scale(&self, k: &QScalar) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            out.add_word(w.clone(), c * k);
        }
        out
    }

    /// Product self·o (o acts first).
    pub fn mul(&self, o: &WeylElement) -> Self {
        let mut out = Self::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_word(w, c1 * c2);
            }
        }
        out
    }

    pub fn apply(&self, kind: &FockKind, v: &FockVector) -> Result<FockVector, FockError> {
        let mut out = FockVector::zero();
        for (w, c) in &self.terms {
            let mut cur = v.scale(c);
            for u in w.iter().rev() {
                if cur.is_zero() {
                    break;
                }
                cur = mode_apply(kind, u, &cur)?;
            }
            out.add_assign(&cur);
        }
        Ok(out)
    }
}

/// x(y v) − y(x v).
pub fn commutator_apply(
    kind: &FockKind,
    x: &WeylElement,
    y: &WeylElement,
    v: &FockVector,
) -> Result<FockVector, FockError> {
    let xy = x.apply(kind, &y.apply(kind, v)?)?;
    let yx = y.apply(kind, &x.apply(kind, v)?)?;
    Ok(xy.sub(&yx))
}
