//! Lie algebras of matrices over the quantum torus: gl_N(C_q), so_N(C_q),
//! sp_2N(C_q), their central extensions, the generator families, the three
//! dual-pair embeddings into sp_2N(C_q), and the root/degree grading.
//!
//! so and sp elements are stored inside their ambient gl; the bracket is
//! always the ĝl bracket with cocycle ½ δ_{jk} δ_{il} δ_{a+c,0} δ_{b+d,0} q^{bc} a.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::Serialize;

use crate::qfield::QScalar;
use crate::quantum_torus::TorusElement;
use crate::weyl_fock::Flavor;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgError {
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("ambient size mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("generator {0} does not belong to {1}")]
    WrongFamily(String, String),
    #[error("unsupported flavor: {0}")]
    UnsupportedFlavor(String),
    #[error("element is not in the source algebra: {0}")]
    NotInSource(String),
    #[error("cannot parse generator: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AlgebraKind {
    Gl,
    So,
    Sp,
}

/// An algebra together with its rank `N`: gl_N, so_N, or sp_2N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Algebra {
    pub kind: AlgebraKind,
    pub rank: usize,
}

impl Algebra {
    pub fn gl(n: usize) -> Self {
        Algebra { kind: AlgebraKind::Gl, rank: n }
    }
    pub fn so(n: usize) -> Self {
        Algebra { kind: AlgebraKind::So, rank: n }
    }
    pub fn sp(n: usize) -> Self {
        Algebra { kind: AlgebraKind::Sp, rank: n }
    }

    /// Size of the ambient matrices.
    pub fn ambient(&self) -> usize {
        match self.kind {
            AlgebraKind::Sp => 2 * self.rank,
            _ => self.rank,
        }
    }

    /// Number of ε-coordinates of the root lattice.
    pub fn root_rank(&self) -> usize {
        match self.kind {
            AlgebraKind::So => self.rank / 2,
            _ => self.rank,
        }
    }

    pub fn families(&self) -> &'static [Family] {
        match self.kind {
            AlgebraKind::Gl => &[Family::E],
            AlgebraKind::So => &[Family::SoE],
            AlgebraKind::Sp => &[Family::F, Family::G, Family::H],
        }
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AlgebraKind::Gl => write!(f, "gl_{}", self.rank),
            AlgebraKind::So => write!(f, "so_{}", self.rank),
            AlgebraKind::Sp => write!(f, "sp_{}", 2 * self.rank),
        }
    }
}

/// Generator families: `E` = E_{ij} t0^a t1^b in gl, `SoE` = e_{ij}(a,b) in so,
/// `F`/`G`/`H` = f/g/h_{ij}(a,b) in sp, and `C` the central element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    E,
    SoE,
    F,
    G,
    H,
    C,
}

impl Family {
    fn symbol(self) -> &'static str {
        match self {
            Family::E => "E",
            Family::SoE => "e",
            Family::F => "f",
            Family::G => "g",
            Family::H => "h",
            Family::C => "c",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Gen {
    pub family: Family,
    pub i: usize,
    pub j: usize,
    pub a: i64,
    pub b: i64,
}

impl Gen {
    pub fn new(family: Family, i: usize, j: usize, a: i64, b: i64) -> Self {
        Gen { family, i, j, a, b }
    }

    pub fn central() -> Self {
        Gen { family: Family::C, i: 0, j: 0, a: 0, b: 0 }
    }

    pub fn is_central(&self) -> bool {
        self.family == Family::C
    }

    /// Rewrites g_{ij}, h_{ij} with i > j as a multiple of the i ≤ j key:
    /// g_{ij}(a,b) = q^{-ab} g_{ji}(a,-b), likewise for h.
    pub fn canonical(&self) -> (QScalar, Gen) {
        match self.family {
            Family::G | Family::H if self.i > self.j => (
                QScalar::qpow_int(-self.a * self.b),
                Gen::new(self.family, self.j, self.i, self.a, -self.b),
            ),
            _ => (QScalar::one(), *self),
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_central() {
            return write!(f, "c");
        }
        write!(f, "{}[{},{}]({},{})", self.family.symbol(), self.i, self.j, self.a, self.b)
    }
}

impl FromStr for Gen {
    type Err = AlgError;

    /// Literals like `f[1,2](1,-1)`, `E[2,1](0,3)`, `e[1,1](0,0)` or `c`.
    fn from_str(s: &str) -> Result<Self, AlgError> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "c" {
            return Ok(Gen::central());
        }
        let bad = || AlgError::Parse(s.to_string());
        let family = match t.chars().next().ok_or_else(bad)? {
            'E' => Family::E,
            'e' => Family::SoE,
            'f' => Family::F,
            'g' => Family::G,
            'h' => Family::H,
            _ => return Err(bad()),
        };
        let rest = &t[1..];
        let (idx, deg) = rest
            .strip_prefix('[')
            .and_then(|r| r.split_once("]("))
            .and_then(|(i, d)| d.strip_suffix(')').map(|d| (i, d)))
            .ok_or_else(bad)?;
        let (i, j) = idx.split_once(',').ok_or_else(bad)?;
        let (a, b) = deg.split_once(',').ok_or_else(bad)?;
        Ok(Gen {
            family,
            i: i.parse().map_err(|_| bad())?,
            j: j.parse().map_err(|_| bad())?,
            a: a.parse().map_err(|_| bad())?,
            b: b.parse().map_err(|_| bad())?,
        })
    }
}

/// Element of a centrally extended toroidal Lie algebra: a sparse matrix over
/// C_q plus a multiple of c.
#[derive(Clone, PartialEq, Eq)]
pub struct ToroidalElement {
    alg: Algebra,
    entries: BTreeMap<(usize, usize), TorusElement>,
    central: QScalar,
}

impl ToroidalElement {
    pub fn zero(alg: Algebra) -> Self {
        ToroidalElement { alg, entries: BTreeMap::new(), central: QScalar::zero() }
    }

    pub fn central_element(alg: Algebra, c: QScalar) -> Self {
        let mut z = Self::zero(alg);
        z.central = c;
        z
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    /// Reinterprets the element inside another algebra with the same ambient size.
    pub fn with_algebra(mut self, alg: Algebra) -> Self {
        assert_eq!(alg.ambient(), self.alg.ambient());
        self.alg = alg;
        self
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &TorusElement)> {
        self.entries.iter()
    }

    pub fn entry(&self, i: usize, j: usize) -> TorusElement {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn central(&self) -> &QScalar {
        &self.central
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty() && self.central.is_zero()
    }

    pub fn matrix_is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `x` at matrix position (i, j), 1-based.
    pub fn add_entry(&mut self, i: usize, j: usize, x: &TorusElement) {
        if x.is_zero() {
            return;
        }
        let n = self.alg.ambient();
        assert!((1..=n).contains(&i) && (1..=n).contains(&j), "entry ({i},{j}) outside {n}x{n}");
        let slot = self.entries.entry((i, j)).or_default();
        slot.add_assign(x);
        if slot.is_zero() {
            self.entries.remove(&(i, j));
        }
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: &QScalar, a: i64, b: i64) {
        self.add_entry(i, j, &TorusElement::term(c.clone(), a, b));
    }

    pub fn add_central(&mut self, c: &QScalar) {
        self.central += c;
    }

    pub fn add_assign(&mut self, o: &ToroidalElement) {
        assert_eq!(self.alg.ambient(), o.alg.ambient(), "ambient mismatch");
        for (&(i, j), x) in &o.entries {
            self.add_entry(i, j, x);
        }
        self.central += &o.central;
    }

    pub fn add_scaled(&mut self, k: &QScalar, o: &ToroidalElement) {
        self.add_assign(&o.scale(k));
    }

    pub fn scale(&self, k: &QScalar) -> Self {
        if k.is_zero() {
            return Self::zero(self.alg);
        }
        ToroidalElement {
            alg: self.alg,
            entries: self.entries.iter().map(|(p, x)| (*p, x.scale(k))).collect(),
            central: &self.central * k,
        }
    }

    pub fn sub(&self, o: &ToroidalElement) -> Self {
        let mut out = self.clone();
        out.add_assign(&o.scale(&QScalar::from_int(-1)));
        out
    }

    pub fn plus(&self, o: &ToroidalElement) -> Self {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }

    /// Every (a, b) appearing in some entry.
    pub fn degrees(&self) -> Vec<(i64, i64)> {
        let mut out: Vec<(i64, i64)> =
            self.entries.values().flat_map(|x| x.terms().map(|(k, _)| *k)).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|((i, j), x)| serde_json::json!({"i": i, "j": j, "terms": x}))
            .collect();
        serde_json::json!({
            "algebra": self.alg.to_string(),
            "entries": entries,
            "central": self.central.to_string(),
        })
    }
}

impl fmt::Display for ToroidalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((i, j), x) in &self.entries {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "E[{i},{j}]·[{x}]")?;
        }
        if !self.central.is_zero() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})·c", self.central)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ToroidalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{{self}}}", self.alg)
    }
}

/// Which central term the bracket uses. `AbsDegree` puts |a| in place of a;
/// it is not a 2-cocycle and exists so that the Jacobi checks can be seen failing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cocycle {
    #[default]
    Standard,
    AbsDegree,
}

/// Central coefficient of [E_{ij} x, E_{ji} y]:
/// ½ Σ over (a,b) in x and (−a,−b) in y of x_{ab} y_{−a,−b} q^{−ab} a.
fn cocycle(x: &TorusElement, y: &TorusElement, kind: Cocycle) -> QScalar {
    let mut acc = QScalar::zero();
    for (&(a, b), cx) in x.terms() {
        if a == 0 {
            continue;
        }
        let cy = y.coeff(-a, -b);
        if cy.is_zero() {
            continue;
        }
        let w = if kind == Cocycle::AbsDegree { a.abs() } else { a };
        acc += &(cx * &cy * QScalar::qpow_int(-a * b)).scale_int(w);
    }
    acc.scale(&BigRational::new(1.into(), 2.into()))
}

/// The bracket of the centrally extended ambient ĝl.
pub fn bracket(x: &ToroidalElement, y: &ToroidalElement) -> Result<ToroidalElement, AlgError> {
    bracket_with(x, y, Cocycle::Standard)
}

pub fn bracket_with(x: &ToroidalElement, y: &ToroidalElement, kind: Cocycle) -> Result<ToroidalElement, AlgError> {
    let n = x.alg.ambient();
    if n != y.alg.ambient() {
        return Err(AlgError::AmbientMismatch(n, y.alg.ambient()));
    }
    let alg = if x.alg == y.alg { x.alg } else { Algebra::gl(n) };
    let mut out = ToroidalElement::zero(alg);
    // Index y by row for the δ_{jk} term and by column for the δ_{il} term.
    let mut y_by_row: BTreeMap<usize, Vec<(usize, &TorusElement)>> = BTreeMap::new();
    let mut y_by_col: BTreeMap<usize, Vec<(usize, &TorusElement)>> = BTreeMap::new();
    for (&(k, l), ty) in &y.entries {
        y_by_row.entry(k).or_default().push((l, ty));
        y_by_col.entry(l).or_default().push((k, ty));
    }
    for (&(i, j), tx) in &x.entries {
        if let Some(row) = y_by_row.get(&j) {
            for &(l, ty) in row {
                out.add_entry(i, l, &tx.mul(ty));
                if l == i {
                    out.central += &cocycle(tx, ty, kind);
                }
            }
        }
        if let Some(col) = y_by_col.get(&i) {
            for &(k, ty) in col {
                out.add_entry(k, j, &-&ty.mul(tx));
            }
        }
    }
    Ok(out)
}

/// Adds `k` times a signed-permutation relation `J A + bar(A)^t J` check helper:
/// returns J A + bar(A)^t J for J given by `perm[r] = (σ(r), sign)`.
fn twisted_form(a: &ToroidalElement, perm: &[(usize, i64)]) -> ToroidalElement {
    let n = a.alg.ambient();
    let mut out = ToroidalElement::zero(Algebra::gl(n));
    // Inverse permutation: σ(r) = k  ⇒  inv[k] = r.
    let mut inv = vec![0usize; n + 1];
    for (r, &(k, _)) in perm.iter().enumerate().skip(1) {
        inv[k] = r;
    }
    for (&(k, c), x) in &a.entries {
        // (J A)_{r,c} = s_r A_{σ(r),c}
        let r = inv[k];
        out.add_entry(r, c, &x.scale(&QScalar::from_int(perm[r].1)));
        // (bar(A)^t J)_{c,σ(k)} = bar(A_{k,c}) s_k
        let (col, sign) = perm[k];
        out.add_entry(c, col, &x.bar().scale(&QScalar::from_int(sign)));
    }
    out
}

fn j_form(n: usize) -> Vec<(usize, i64)> {
    let mut p = vec![(0, 0)];
    p.extend((1..=n).map(|r| (n + 1 - r, 1)));
    p
}

fn j_prime_form(n: usize) -> Vec<(usize, i64)> {
    let mut p = vec![(0, 0)];
    p.extend((1..=n).map(|r| (n + r, 1)));
    p.extend((1..=n).map(|r| (r, -1)));
    p
}

/// Whether the matrix part satisfies the defining relation of `kind`
/// (so: J_N A + bar(A)^t J_N = 0, sp: J'_{2N} A + bar(A)^t J'_{2N} = 0).
pub fn membership(x: &ToroidalElement, kind: AlgebraKind) -> bool {
    let n = x.alg.ambient();
    match kind {
        AlgebraKind::Gl => true,
        AlgebraKind::So => twisted_form(x, &j_form(n)).matrix_is_zero(),
        AlgebraKind::Sp => n.is_multiple_of(2) && twisted_form(x, &j_prime_form(n / 2)).matrix_is_zero(),
    }
}

// ---------- generators ----------

/// e_{ij}(x) = E_{ij} x − E_{N+1−j,N+1−i} bar(x) inside so_N.
pub fn so_unit(el: &mut ToroidalElement, i: usize, j: usize, x: &TorusElement) {
    let n = el.alg.ambient();
    el.add_entry(i, j, x);
    el.add_entry(n + 1 - j, n + 1 - i, &-&x.bar());
}

/// f_{ij}(x) = E_{ij} x − E_{N+j,N+i} bar(x) inside sp_2N.
pub fn sp_f(el: &mut ToroidalElement, i: usize, j: usize, x: &TorusElement) {
    let n = el.alg.ambient() / 2;
    el.add_entry(i, j, x);
    el.add_entry(n + j, n + i, &-&x.bar());
}

/// g_{ij}(x) = E_{i,N+j} x + E_{j,N+i} bar(x).
pub fn sp_g(el: &mut ToroidalElement, i: usize, j: usize, x: &TorusElement) {
    let n = el.alg.ambient() / 2;
    el.add_entry(i, n + j, x);
    el.add_entry(j, n + i, &x.bar());
}

/// h_{ij}(x) = −E_{N+i,j} x − E_{N+j,i} bar(x).
pub fn sp_h(el: &mut ToroidalElement, i: usize, j: usize, x: &TorusElement) {
    let n = el.alg.ambient() / 2;
    el.add_entry(n + i, j, &-x);
    el.add_entry(n + j, i, &-&x.bar());
}

/// The matrix of a named generator in `alg`.
pub fn gen(alg: Algebra, g: &Gen) -> Result<ToroidalElement, AlgError> {
    if g.is_central() {
        return Ok(ToroidalElement::central_element(alg, QScalar::one()));
    }
    if !alg.families().contains(&g.family) {
        return Err(AlgError::WrongFamily(g.to_string(), alg.to_string()));
    }
    let r = alg.rank;
    if !(1..=r).contains(&g.i) || !(1..=r).contains(&g.j) {
        return Err(AlgError::IndexOutOfRange(format!("{g} in {alg}")));
    }
    let x = TorusElement::monomial(g.a, g.b);
    let mut el = ToroidalElement::zero(alg);
    match g.family {
        Family::E => el.add_entry(g.i, g.j, &x),
        Family::SoE => so_unit(&mut el, g.i, g.j, &x),
        Family::F => sp_f(&mut el, g.i, g.j, &x),
        Family::G => sp_g(&mut el, g.i, g.j, &x),
        Family::H => sp_h(&mut el, g.i, g.j, &x),
        Family::C => unreachable!(),
    }
    Ok(el)
}

/// All non-central generators of `alg` with |a| ≤ a_max, |b| ≤ b_max.
pub fn generators(alg: Algebra, a_max: i64, b_max: i64) -> Vec<Gen> {
    let mut out = Vec::new();
    for &fam in alg.families() {
        for i in 1..=alg.rank {
            for j in 1..=alg.rank {
                for a in -a_max..=a_max {
                    for b in -b_max..=b_max {
                        out.push(Gen::new(fam, i, j, a, b));
                    }
                }
            }
        }
    }
    out
}

// ---------- grading ----------

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GradedLabel {
    pub root: Vec<i64>,
    pub t0_degree: i64,
}

impl GradedLabel {
    pub fn plus(&self, o: &GradedLabel) -> GradedLabel {
        GradedLabel {
            root: self.root.iter().zip(&o.root).map(|(x, y)| x + y).collect(),
            t0_degree: self.t0_degree + o.t0_degree,
        }
    }
}

/// ε-weight of basis vector `p` of the natural module.
fn index_weight(alg: Algebra, p: usize) -> Vec<i64> {
    let r = alg.root_rank();
    let mut w = vec![0; r];
    match alg.kind {
        AlgebraKind::Gl => w[p - 1] = 1,
        AlgebraKind::Sp => {
            if p <= alg.rank {
                w[p - 1] = 1
            } else {
                w[p - alg.rank - 1] = -1
            }
        }
        AlgebraKind::So => {
            let m = alg.rank;
            if p <= r {
                w[p - 1] = 1;
            } else if p > m - r {
                w[m - p] = -1;
            }
        }
    }
    w
}

/// Root of the matrix position (i, j) of the ambient matrix.
pub fn entry_root(alg: Algebra, i: usize, j: usize) -> Vec<i64> {
    let wi = index_weight(alg, i);
    let wj = index_weight(alg, j);
    wi.iter().zip(&wj).map(|(x, y)| x - y).collect()
}

/// (root, t0-degree) of a generator.
pub fn graded_label(alg: Algebra, g: &Gen) -> GradedLabel {
    if g.is_central() {
        return GradedLabel { root: vec![0; alg.root_rank()], t0_degree: 0 };
    }
    let (i, j) = (g.i, g.j);
    let root = match g.family {
        Family::E | Family::SoE | Family::F => entry_root(alg, i, j),
        // g_{ij} sits at (i, N+j); h_{ij} at (N+i, j).
        Family::G => entry_root(alg, i, alg.rank + j),
        Family::H => entry_root(alg, alg.rank + i, j),
        Family::C => unreachable!(),
    };
    GradedLabel { root, t0_degree: g.a }
}

/// Labels of all homogeneous components of an element (central part has label 0).
pub fn element_labels(x: &ToroidalElement) -> Vec<GradedLabel> {
    let mut out = Vec::new();
    for (&(i, j), t) in x.entries() {
        for (&(a, _), _) in t.terms() {
            out.push(GradedLabel { root: entry_root(x.alg, i, j), t0_degree: a });
        }
    }
    if !x.central.is_zero() {
        out.push(GradedLabel { root: vec![0; x.alg.root_rank()], t0_degree: 0 });
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TriangularClass {
    Plus,
    Zero,
    Minus,
}

/// A functional strictly positive on the simple root base Π(g, Z).
fn positivity_functional(alg: Algebra, flavor: Flavor) -> Result<Vec<i64>, AlgError> {
    let r = alg.root_rank() as i64;
    Ok(match (alg.kind, flavor) {
        // Π = {ε_i − ε_{i+1}}
        (AlgebraKind::Gl, _) => (0..r).map(|i| r - i).collect(),
        // Π = {ε_i − ε_{i+1}, 2ε_m}
        (AlgebraKind::Sp, Flavor::HalfInteger) => (0..r).map(|i| r - i).collect(),
        // Π = {−2ε_1, ε_i − ε_{i+1}}
        (AlgebraKind::Sp, Flavor::Integer) => (0..r).map(|i| -(i + 1)).collect(),
        // Π = {ε_i − ε_{i+1}, 2ε_{m/2}} or {ε_i − ε_{i+1}, ε_{(m−1)/2}}
        (AlgebraKind::So, Flavor::HalfInteger) => (0..r).map(|i| r - i).collect(),
        (AlgebraKind::So, Flavor::Integer) => {
            return Err(AlgError::UnsupportedFlavor(
                "so has no triangular decomposition for the integer flavor".into(),
            ))
        }
    })
}

/// Triangular class of a graded label.
pub fn classify_label(alg: Algebra, flavor: Flavor, l: &GradedLabel) -> Result<TriangularClass, AlgError> {
    let f = positivity_functional(alg, flavor)?;
    let v: i64 = f.iter().zip(&l.root).map(|(x, y)| x * y).sum();
    Ok(match (l.t0_degree.signum(), v.signum()) {
        (1, _) | (0, 1) => TriangularClass::Plus,
        (-1, _) | (0, -1) => TriangularClass::Minus,
        _ => TriangularClass::Zero,
    })
}

/// plus / zero / minus for a generator, following Π(g, Z).
pub fn classify(alg: Algebra, flavor: Flavor, g: &Gen) -> Result<TriangularClass, AlgError> {
    classify_label(alg, flavor, &graded_label(alg, g))
}

// ---------- dual pairs ----------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Pair {
    /// (gl_n, gl_m(C_q))
    GlGl,
    /// (so_n, sp_2m(C_q))
    SoSp,
    /// (sp_2n, so_m(C_q))
    SpSo,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::GlGl, Pair::SoSp, Pair::SpSo];

    pub fn name(self) -> &'static str {
        match self {
            Pair::GlGl => "gl",
            Pair::SoSp => "so-sp",
            Pair::SpSo => "sp-so",
        }
    }
}

impl FromStr for Pair {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gl" | "gl-gl" => Ok(Pair::GlGl),
            "so-sp" | "so_sp" => Ok(Pair::SoSp),
            "sp-so" | "sp_so" => Ok(Pair::SpSo),
            _ => Err(format!("unknown pair {s:?} (expected gl, so-sp, sp-so)")),
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Finite,
    Toroidal,
}

/// A dual pair inside sp_2N(C_q) with N = m n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DualPair {
    pub pair: Pair,
    pub m: usize,
    pub n: usize,
}

impl DualPair {
    pub fn new(pair: Pair, m: usize, n: usize) -> Self {
        assert!(m >= 1 && n >= 1);
        DualPair { pair, m, n }
    }

    pub fn big_n(&self) -> usize {
        self.m * self.n
    }

    /// π(i, r) = i + (r − 1) m.
    pub fn pi(&self, i: usize, r: usize) -> usize {
        debug_assert!((1..=self.m).contains(&i) && (1..=self.n).contains(&r));
        i + (r - 1) * self.m
    }

    pub fn target(&self) -> Algebra {
        Algebra::sp(self.big_n())
    }

    pub fn source(&self, side: Side) -> Algebra {
        match (self.pair, side) {
            (Pair::GlGl, Side::Finite) => Algebra::gl(self.n),
            (Pair::GlGl, Side::Toroidal) => Algebra::gl(self.m),
            (Pair::SoSp, Side::Finite) => Algebra::so(self.n),
            (Pair::SoSp, Side::Toroidal) => Algebra::sp(self.m),
            (Pair::SpSo, Side::Finite) => Algebra::sp(self.n),
            (Pair::SpSo, Side::Toroidal) => Algebra::so(self.m),
        }
    }

    /// Multiplier of c under the toroidal-side embedding. A gl_m or so_m
    /// entry lands on both halves of an f-block, doubling the ½-cocycle, so
    /// those sides need 2n; sp_2m already carries the doubled cocycle.
    pub fn central_lift(&self) -> i64 {
        match self.pair {
            Pair::SoSp => self.n as i64,
            Pair::GlGl | Pair::SpSo => 2 * self.n as i64,
        }
    }

    /// Finite-side generators (all with a = b = 0).
    pub fn finite_generators(&self) -> Vec<Gen> {
        generators(self.source(Side::Finite), 0, 0)
    }

    /// Toroidal-side generators in a window, c included.
    pub fn toroidal_generators(&self, a_max: i64, b_max: i64) -> Vec<Gen> {
        let mut g = generators(self.source(Side::Toroidal), a_max, b_max);
        g.push(Gen::central());
        g
    }

    /// Image of a source generator in ŝp_2N(C_q).
    pub fn embed_gen(&self, side: Side, g: &Gen) -> Result<ToroidalElement, AlgError> {
        if side == Side::Finite && (g.a != 0 || g.b != 0 || g.is_central()) {
            return Err(AlgError::NotInSource(format!("{g} on the finite side")));
        }
        let x = gen(self.source(side), g)?;
        self.embed(side, &x)
    }

    /// Image of an element of the source algebra, extended linearly from the
    /// generator formulas; c ↦ `central_lift()` c on the toroidal side.
    pub fn embed(&self, side: Side, x: &ToroidalElement) -> Result<ToroidalElement, AlgError> {
        let src = self.source(side);
        if x.alg.ambient() != src.ambient() {
            return Err(AlgError::AmbientMismatch(x.alg.ambient(), src.ambient()));
        }
        if src.kind != AlgebraKind::Gl && !membership(x, src.kind) {
            return Err(AlgError::NotInSource(format!("{x:?} not in {src}")));
        }
        if side == Side::Finite && (x.degrees().iter().any(|&d| d != (0, 0)) || !x.central.is_zero()) {
            return Err(AlgError::NotInSource("finite side takes constant matrices".into()));
        }
        let (m, n) = (self.m, self.n);
        let mut out = ToroidalElement::zero(self.target());
        let half = QScalar::from_ratio(1, 2);
        for (&(i, j), t) in x.entries() {
            match (self.pair, side) {
                // E_{ps} ↦ Σ_k f_{π(k,p),π(k,s)}; so_n sits inside gl_n.
                (Pair::GlGl | Pair::SoSp, Side::Finite) => {
                    for k in 1..=m {
                        sp_f(&mut out, self.pi(k, i), self.pi(k, j), t);
                    }
                }
                (Pair::GlGl, Side::Toroidal) => {
                    for k in 1..=n {
                        sp_f(&mut out, self.pi(i, k), self.pi(j, k), t);
                    }
                }
                (Pair::SoSp, Side::Toroidal) => {
                    if i <= m && j <= m {
                        for k in 1..=n {
                            sp_f(&mut out, self.pi(i, k), self.pi(j, k), t);
                        }
                    } else if i <= m {
                        let th = t.scale(&half);
                        for k in 1..=n {
                            sp_g(&mut out, self.pi(i, k), self.pi(j - m, n + 1 - k), &th);
                        }
                    } else if j <= m {
                        let th = t.scale(&-&half);
                        for k in 1..=n {
                            sp_h(&mut out, self.pi(i - m, k), self.pi(j, n + 1 - k), &th);
                        }
                    }
                }
                (Pair::SpSo, Side::Finite) => {
                    if i <= n && j <= n {
                        for k in 1..=m {
                            sp_f(&mut out, self.pi(k, i), self.pi(k, j), t);
                        }
                    } else if i <= n {
                        let th = t.scale(&half);
                        for k in 1..=m {
                            sp_g(&mut out, self.pi(k, i), self.pi(m + 1 - k, j - n), &th);
                        }
                    } else if j <= n {
                        let th = t.scale(&-&half);
                        for k in 1..=m {
                            sp_h(&mut out, self.pi(k, i - n), self.pi(m + 1 - k, j), &th);
                        }
                    }
                }
                (Pair::SpSo, Side::Toroidal) => {
                    let th = t.scale(&half);
                    let tb = t.bar().scale(&-&half);
                    for k in 1..=n {
                        sp_f(&mut out, self.pi(i, k), self.pi(j, k), &th);
                        sp_f(&mut out, self.pi(m + 1 - j, k), self.pi(m + 1 - i, k), &tb);
                    }
                }
            }
        }
        if side == Side::Toroidal {
            out.add_central(&x.central.scale_int(self.central_lift()));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qi(k: i64) -> QScalar {
        QScalar::qpow_int(k)
    }

    fn g(s: &str) -> Gen {
        s.parse().unwrap()
    }

    #[test]
    fn generator_examples() {
        let e = gen(Algebra::so(3), &g("e[1,1](0,0)")).unwrap();
        let mut want = ToroidalElement::zero(Algebra::so(3));
        want.add_term(1, 1, &QScalar::one(), 0, 0);
        want.add_term(3, 3, &QScalar::from_int(-1), 0, 0);
        assert_eq!(e, want);

        let f = gen(Algebra::sp(2), &g("f[1,2](1,1)")).unwrap();
        let mut want = ToroidalElement::zero(Algebra::sp(2));
        want.add_term(1, 2, &QScalar::one(), 1, 1);
        want.add_term(4, 3, &-qi(-1), 1, -1);
        assert_eq!(f, want);

        let gg = gen(Algebra::sp(1), &g("g[1,1](0,0)")).unwrap();
        let mut want = ToroidalElement::zero(Algebra::sp(1));
        want.add_term(1, 2, &QScalar::from_int(2), 0, 0);
        assert_eq!(gg, want);

        assert!(gen(Algebra::sp(1), &g("f[2,1](0,0)")).is_err());
        assert!(gen(Algebra::gl(2), &g("f[1,1](0,0)")).is_err());
    }

    #[test]
    fn bracket_examples() {
        let alg = Algebra::gl(2);
        let x = gen(alg, &g("E[1,2](1,1)")).unwrap();
        let y = gen(alg, &g("E[2,1](-1,-1)")).unwrap();
        let mut want = ToroidalElement::zero(alg);
        want.add_term(1, 1, &qi(-1), 0, 0);
        want.add_term(2, 2, &-qi(-1), 0, 0);
        want.add_central(&qi(-1).scale(&BigRational::new(1.into(), 2.into())));
        assert_eq!(bracket(&x, &y).unwrap(), want);

        let e11 = gen(alg, &g("E[1,1](0,0)")).unwrap();
        let e22 = gen(alg, &g("E[2,2](0,0)")).unwrap();
        assert!(bracket(&e11, &e22).unwrap().is_zero());
        assert!(bracket(&x, &gen(Algebra::gl(3), &g("E[1,1](0,0)")).unwrap()).is_err());
    }

    #[test]
    fn membership_examples() {
        for s in ["e[1,2](1,1)", "e[2,2](-1,3)", "e[1,3](2,-1)"] {
            assert!(membership(&gen(Algebra::so(3), &g(s)).unwrap(), AlgebraKind::So));
        }
        let mut x = ToroidalElement::zero(Algebra::gl(2));
        x.add_term(1, 1, &QScalar::one(), 1, 0);
        assert!(!membership(&x, AlgebraKind::So));
        assert!(membership(&ToroidalElement::zero(Algebra::gl(2)), AlgebraKind::So));
        for s in ["f[1,2](1,1)", "g[2,1](-1,2)", "h[1,1](2,-1)"] {
            assert!(membership(&gen(Algebra::sp(2), &g(s)).unwrap(), AlgebraKind::Sp));
        }
    }

    #[test]
    fn symmetric_rewrite_of_g_and_h() {
        let alg = Algebra::sp(3);
        for s in ["g[3,1](2,1)", "h[2,1](-1,3)", "g[2,1](0,-2)"] {
            let x = g(s);
            let (k, y) = x.canonical();
            assert!(y.i <= y.j);
            assert_eq!(gen(alg, &x).unwrap(), gen(alg, &y).unwrap().scale(&k));
        }
    }

    #[test]
    fn gl_embedding_examples() {
        let dp = DualPair::new(Pair::GlGl, 1, 1);
        let x = dp.embed_gen(Side::Finite, &g("E[1,1](0,0)")).unwrap();
        assert_eq!(x, gen(Algebra::sp(1), &g("f[1,1](0,0)")).unwrap());

        let dp = DualPair::new(Pair::GlGl, 2, 2);
        let x = dp.embed_gen(Side::Toroidal, &g("E[1,2](1,1)")).unwrap();
        let want = gen(Algebra::sp(4), &g("f[1,2](1,1)"))
            .unwrap()
            .plus(&gen(Algebra::sp(4), &g("f[3,4](1,1)")).unwrap());
        assert_eq!(x, want);
    }

    #[test]
    fn embeddings_are_homomorphisms() {
        for pair in Pair::ALL {
            for (m, n) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
                let dp = DualPair::new(pair, m, n);
                for side in [Side::Finite, Side::Toroidal] {
                    let src = dp.source(side);
                    let gens = if side == Side::Finite { dp.finite_generators() } else { generators(src, 1, 1) };
                    for x in &gens {
                        for y in &gens {
                            let xy = bracket(&gen(src, x).unwrap(), &gen(src, y).unwrap()).unwrap();
                            let lhs = dp.embed(side, &xy).unwrap();
                            let ex = dp.embed_gen(side, x).unwrap();
                            let ey = dp.embed_gen(side, y).unwrap();
                            assert_eq!(lhs, bracket(&ex, &ey).unwrap(), "{pair} m={m} n={n} {x} {y}");
                        }
                    }
                }
            }
        }
    }

    /// Generator-level formulas for the embeddings, written directly.
    fn embed_by_formula(dp: &DualPair, side: Side, x: &Gen) -> ToroidalElement {
        let t = dp.target();
        let (m, n) = (dp.m, dp.n);
        let mut out = ToroidalElement::zero(t);
        let add = |out: &mut ToroidalElement, fam: Family, i, j, a, b, k: QScalar| {
            out.add_scaled(&k, &gen(t, &Gen::new(fam, i, j, a, b)).unwrap());
        };
        let one = QScalar::one;
        match (dp.pair, side) {
            (Pair::SoSp, Side::Finite) => {
                for k in 1..=m {
                    add(&mut out, Family::F, dp.pi(k, x.i), dp.pi(k, x.j), 0, 0, one());
                    add(&mut out, Family::F, dp.pi(k, n + 1 - x.j), dp.pi(k, n + 1 - x.i), 0, 0, -one());
                }
            }
            (Pair::SoSp, Side::Toroidal) => {
                for k in 1..=n {
                    let (ii, jj) = match x.family {
                        Family::F => (dp.pi(x.i, k), dp.pi(x.j, k)),
                        _ => (dp.pi(x.i, k), dp.pi(x.j, n + 1 - k)),
                    };
                    add(&mut out, x.family, ii, jj, x.a, x.b, one());
                }
            }
            (Pair::SpSo, Side::Finite) => {
                for k in 1..=m {
                    let (ii, jj) = match x.family {
                        Family::F => (dp.pi(k, x.i), dp.pi(k, x.j)),
                        _ => (dp.pi(k, x.i), dp.pi(m + 1 - k, x.j)),
                    };
                    add(&mut out, x.family, ii, jj, 0, 0, one());
                }
            }
            (Pair::SpSo, Side::Toroidal) => {
                for k in 1..=n {
                    add(&mut out, Family::F, dp.pi(x.i, k), dp.pi(x.j, k), x.a, x.b, one());
                    add(
                        &mut out,
                        Family::F,
                        dp.pi(m + 1 - x.j, k),
                        dp.pi(m + 1 - x.i, k),
                        x.a,
                        -x.b,
                        -qi(-x.a * x.b),
                    );
                }
            }
            (Pair::GlGl, Side::Finite) => {
                for k in 1..=m {
                    add(&mut out, Family::F, dp.pi(k, x.i), dp.pi(k, x.j), 0, 0, one());
                }
            }
            (Pair::GlGl, Side::Toroidal) => {
                for k in 1..=n {
                    add(&mut out, Family::F, dp.pi(x.i, k), dp.pi(x.j, k), x.a, x.b, one());
                }
            }
        }
        out
    }

    #[test]
    fn embeddings_match_generator_formulas() {
        for pair in Pair::ALL {
            for (m, n) in [(1, 2), (2, 1), (2, 2), (3, 2)] {
                let dp = DualPair::new(pair, m, n);
                for x in dp.finite_generators() {
                    assert_eq!(dp.embed_gen(Side::Finite, &x).unwrap(), embed_by_formula(&dp, Side::Finite, &x), "{pair} {x}");
                }
                for x in dp.toroidal_generators(1, 1) {
                    if x.is_central() {
                        continue;
                    }
                    assert_eq!(dp.embed_gen(Side::Toroidal, &x).unwrap(), embed_by_formula(&dp, Side::Toroidal, &x), "{pair} {x}");
                }
            }
        }
    }

    #[test]
    fn embedded_images_are_symplectic() {
        for pair in Pair::ALL {
            let dp = DualPair::new(pair, 2, 2);
            for x in dp.toroidal_generators(1, 1) {
                assert!(membership(&dp.embed_gen(Side::Toroidal, &x).unwrap(), AlgebraKind::Sp));
            }
        }
    }

    #[test]
    fn graded_label_examples() {
        let l = graded_label(Algebra::gl(2), &g("E[1,2](3,1)"));
        assert_eq!(l, GradedLabel { root: vec![1, -1], t0_degree: 3 });
        let l = graded_label(Algebra::sp(2), &g("g[1,2](2,5)"));
        assert_eq!(l, GradedLabel { root: vec![1, 1], t0_degree: 2 });
        let l = graded_label(Algebra::so(2), &g("e[1,2](4,1)"));
        assert_eq!(l, GradedLabel { root: vec![2], t0_degree: 4 });
        let l = graded_label(Algebra::so(5), &g("e[5,3](0,1)"));
        assert_eq!(l, GradedLabel { root: vec![-1, 0], t0_degree: 0 });
    }

    #[test]
    fn classify_examples() {
        use TriangularClass::*;
        let gl = Algebra::gl(2);
        for fl in [Flavor::Integer, Flavor::HalfInteger] {
            assert_eq!(classify(gl, fl, &g("E[1,2](0,3)")).unwrap(), Plus);
            assert_eq!(classify(gl, fl, &g("E[2,1](0,-3)")).unwrap(), Minus);
            assert_eq!(classify(gl, fl, &g("E[1,1](0,2)")).unwrap(), Zero);
            assert_eq!(classify(gl, fl, &Gen::central()).unwrap(), Zero);
            assert_eq!(classify(gl, fl, &g("E[2,1](1,0)")).unwrap(), Plus);
        }
        let sp = Algebra::sp(2);
        assert_eq!(classify(sp, Flavor::Integer, &g("h[1,2](0,1)")).unwrap(), Plus);
        assert_eq!(classify(sp, Flavor::Integer, &g("g[1,2](0,1)")).unwrap(), Minus);
        assert_eq!(classify(sp, Flavor::HalfInteger, &g("g[1,2](0,1)")).unwrap(), Plus);
        assert_eq!(classify(sp, Flavor::HalfInteger, &g("h[1,1](0,1)")).unwrap(), Minus);
        assert!(classify(Algebra::so(3), Flavor::Integer, &g("e[1,2](0,0)")).is_err());
    }

    /// Explicit lists of the triangular parts, written out case by case.
    fn listed_class(alg: Algebra, fl: Flavor, x: &Gen) -> TriangularClass {
        use TriangularClass::*;
        if x.is_central() {
            return Zero;
        }
        if x.a != 0 {
            return if x.a > 0 { Plus } else { Minus };
        }
        let by_order = |i: usize, j: usize| match i.cmp(&j) {
            std::cmp::Ordering::Less => Plus,
            std::cmp::Ordering::Greater => Minus,
            std::cmp::Ordering::Equal => Zero,
        };
        match (alg.kind, x.family, fl) {
            (AlgebraKind::Gl, _, _) | (_, Family::F, _) => by_order(x.i, x.j),
            (AlgebraKind::Sp, Family::G, Flavor::Integer) => Minus,
            (AlgebraKind::Sp, Family::H, Flavor::Integer) => Plus,
            (AlgebraKind::Sp, Family::G, Flavor::HalfInteger) => Plus,
            (AlgebraKind::Sp, Family::H, Flavor::HalfInteger) => Minus,
            // so_m: gl_m triangular part intersected with so_m.
            (AlgebraKind::So, _, _) => by_order(x.i, x.j),
            _ => unreachable!(),
        }
    }

    #[test]
    fn classification_matches_listed_parts() {
        for alg in [Algebra::gl(3), Algebra::sp(3), Algebra::so(4), Algebra::so(5)] {
            for fl in [Flavor::Integer, Flavor::HalfInteger] {
                if alg.kind == AlgebraKind::So && fl == Flavor::Integer {
                    continue;
                }
                for x in generators(alg, 1, 1) {
                    let el = gen(alg, &x).unwrap();
                    if el.is_zero() {
                        continue;
                    }
                    assert_eq!(classify(alg, fl, &x).unwrap(), listed_class(alg, fl, &x), "{alg} {fl:?} {x}");
                }
            }
        }
    }

    fn arb_gen(alg: Algebra, span: i64) -> impl Strategy<Value = Gen> {
        let fams = alg.families().to_vec();
        let r = alg.rank;
        (0..fams.len(), 1..=r, 1..=r, -span..=span, -span..=span)
            .prop_map(move |(f, i, j, a, b)| Gen::new(fams[f], i, j, a, b))
    }

    fn arb_alg() -> impl Strategy<Value = Algebra> {
        prop_oneof![
            (1usize..=4).prop_map(Algebra::gl),
            (2usize..=4).prop_map(Algebra::so),
            (1usize..=2).prop_map(Algebra::sp),
        ]
    }

    fn jacobi(x: &ToroidalElement, y: &ToroidalElement, z: &ToroidalElement) -> ToroidalElement {
        let a = bracket(x, &bracket(y, z).unwrap()).unwrap();
        let b = bracket(y, &bracket(z, x).unwrap()).unwrap();
        let c = bracket(z, &bracket(x, y).unwrap()).unwrap();
        a.plus(&b).plus(&c)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn jacobi_identity((alg, xs) in arb_alg().prop_flat_map(|a| (Just(a), prop::collection::vec(arb_gen(a, 3), 3)))) {
            let e: Vec<_> = xs.iter().map(|x| gen(alg, x).unwrap()).collect();
            prop_assert!(jacobi(&e[0], &e[1], &e[2]).is_zero());
        }

        #[test]
        fn bracket_is_alternating((alg, x) in arb_alg().prop_flat_map(|a| (Just(a), arb_gen(a, 3)))) {
            let e = gen(alg, &x).unwrap();
            prop_assert!(bracket(&e, &e).unwrap().is_zero());
        }

        #[test]
        fn bracket_respects_grading((alg, x, y) in arb_alg().prop_flat_map(|a| (Just(a), arb_gen(a, 2), arb_gen(a, 2)))) {
            let z = bracket(&gen(alg, &x).unwrap(), &gen(alg, &y).unwrap()).unwrap();
            if !z.is_zero() {
                let want = graded_label(alg, &x).plus(&graded_label(alg, &y));
                prop_assert_eq!(element_labels(&z), vec![want]);
            }
        }

        #[test]
        fn membership_is_closed((alg, x, y) in arb_alg().prop_flat_map(|a| (Just(a), arb_gen(a, 2), arb_gen(a, 2)))) {
            let z = bracket(&gen(alg, &x).unwrap(), &gen(alg, &y).unwrap()).unwrap();
            prop_assert!(membership(&z, alg.kind));
        }
    }
}
