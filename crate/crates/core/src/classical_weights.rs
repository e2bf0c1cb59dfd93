//! Dominant weight labels of GL_n, Sp_2n, SO_n and O_n, their dimensions, and
//! the torus, τ and −I_n actions on F_N(Z).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::qfield::QScalar;
use crate::toroidal::{DualPair, Pair};
use crate::weyl_fock::{FockVector, Mode, Species};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("invalid label: {0}")]
    Invalid(String),
    #[error("cannot parse label {0:?}")]
    Parse(String),
    #[error("group element does not belong to the pair's group: {0}")]
    Element(String),
}

/// The classical group, with n as in GL_n, Sp_2n, SO_n, O_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Group {
    Gl(usize),
    Sp(usize),
    So(usize),
    O(usize),
}

impl Group {
    pub fn n(self) -> usize {
        match self {
            Group::Gl(n) | Group::Sp(n) | Group::So(n) | Group::O(n) => n,
        }
    }

    /// Number of entries of a label.
    pub fn label_len(self) -> usize {
        match self {
            Group::Gl(n) | Group::O(n) => n,
            Group::Sp(n) => 2 * n,
            Group::So(n) => n / 2,
        }
    }

    /// The group whose labels index the isotypic components for a pair.
    pub fn for_pair(dp: &DualPair) -> Group {
        match dp.pair {
            Pair::GlGl => Group::Gl(dp.n),
            Pair::SoSp => Group::O(dp.n),
            Pair::SpSo => Group::Sp(dp.n),
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Group::Gl(n) => write!(f, "GL{n}"),
            Group::Sp(n) => write!(f, "Sp{}", 2 * n),
            Group::So(n) => write!(f, "SO{n}"),
            Group::O(n) => write!(f, "O{n}"),
        }
    }
}

/// A label in R(G). O_n labels store the base partition μ with d(μ) ≤ ⌊n/2⌋
/// and a flag selecting μ̃; SO_n labels store ⌊n/2⌋ entries, the last one
/// possibly negative when d = n/2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightLabel {
    pub group: Group,
    pub entries: Vec<i64>,
    pub tilde: bool,
}

pub fn is_partition(mu: &[i64]) -> bool {
    mu.iter().all(|&x| x >= 0) && mu.windows(2).all(|w| w[0] >= w[1])
}

/// d(μ): the number of nonzero parts.
pub fn depth(mu: &[i64]) -> usize {
    mu.iter().filter(|&&x| x != 0).count()
}

/// Conjugate partition, padded to max(len, μ₁) entries.
pub fn transpose(mu: &[i64]) -> Vec<i64> {
    let first = mu.first().copied().unwrap_or(0).max(0) as usize;
    let len = mu.len().max(first);
    (1..=len as i64).map(|c| mu.iter().filter(|&&x| x >= c).count() as i64).collect()
}

/// μ̃: the first column μ′₁ = d(μ) replaced by n − d(μ). Result has n entries.
pub fn tilde_partition(mu: &[i64], n: usize) -> Vec<i64> {
    let d = depth(mu);
    let mut out = mu.to_vec();
    out.resize(n.max(mu.len()), 0);
    for (k, x) in out.iter_mut().enumerate() {
        if k < d {
            *x -= 1;
        }
        if k + d < n {
            *x += 1;
        }
    }
    out.truncate(n);
    out
}

/// (P_k − P_{n+1−k})_{k ≤ ⌊n/2⌋}: the SO_n torus weight of a GL_n weight.
pub fn so_weight(p: &[i64]) -> Vec<i64> {
    let n = p.len();
    (0..n / 2).map(|k| p[k] - p[n - 1 - k]).collect()
}

impl WeightLabel {
    pub fn new(group: Group, entries: Vec<i64>, tilde: bool) -> Result<Self, WeightError> {
        let l = WeightLabel { group, entries, tilde };
        l.validate()?;
        Ok(l)
    }

    pub fn zero(group: Group) -> Self {
        WeightLabel { group, entries: vec![0; group.label_len()], tilde: false }
    }

    fn validate(&self) -> Result<(), WeightError> {
        let bad = |why: &str| Err(WeightError::Invalid(format!("{self}: {why}")));
        if self.entries.len() != self.group.label_len() {
            return bad(&format!("expected {} entries", self.group.label_len()));
        }
        let mu = &self.entries;
        let decreasing = mu.windows(2).all(|w| w[0] >= w[1]);
        if self.tilde && !matches!(self.group, Group::O(_)) {
            return bad("only O_n labels carry a tilde");
        }
        match self.group {
            Group::Gl(_) => {
                if !decreasing {
                    return bad("entries must be weakly decreasing");
                }
            }
            Group::Sp(n) => {
                if !is_partition(&mu[..n]) || mu[n..].iter().any(|&x| x != 0) {
                    return bad("first n entries a partition, last n zero");
                }
            }
            Group::O(n) => {
                if !is_partition(mu) {
                    return bad("entries must form a partition");
                }
                let d = depth(mu);
                if 2 * d > n {
                    return bad("base label needs d(μ) ≤ n/2; use the tilde flag");
                }
                if self.tilde && 2 * d == n {
                    return bad("labels with d(μ) = n/2 have no tilde partner");
                }
            }
            Group::So(n) => {
                let r = n / 2;
                if r == 0 {
                    return Ok(());
                }
                let last = mu[r - 1];
                let mut abs = mu.clone();
                abs[r - 1] = last.abs();
                if !is_partition(&abs) {
                    return bad("entries must form a partition up to the sign of the last");
                }
                if last < 0 && n % 2 == 1 {
                    return bad("negative last entry needs n even");
                }
            }
        }
        Ok(())
    }

    /// Σ|μ_i| of the stored entries.
    pub fn size(&self) -> i64 {
        self.entries.iter().map(|x| x.abs()).sum()
    }

    pub fn depth(&self) -> usize {
        depth(&self.entries)
    }

    /// The partition in R(O_n) (μ̃ when the flag is set); other groups unchanged.
    pub fn expanded(&self) -> Vec<i64> {
        match self.group {
            Group::O(n) if self.tilde => tilde_partition(&self.entries, n),
            _ => self.entries.clone(),
        }
    }

    /// Flip plain ↔ tilde on an O_n label with d(μ) < n/2.
    pub fn tilde(&self) -> Result<Self, WeightError> {
        match self.group {
            Group::O(n) if 2 * self.depth() < n => {
                Ok(WeightLabel { group: self.group, entries: self.entries.clone(), tilde: !self.tilde })
            }
            _ => Err(WeightError::Invalid(format!("{self} has no tilde partner"))),
        }
    }

    /// μ̄ for an SO_n label with n even and d = n/2.
    pub fn bar_label(&self) -> Result<Self, WeightError> {
        match self.group {
            Group::So(n) if n % 2 == 0 && n > 0 && self.entries[n / 2 - 1] != 0 => {
                let mut e = self.entries.clone();
                e[n / 2 - 1] = -e[n / 2 - 1];
                Ok(WeightLabel { group: self.group, entries: e, tilde: false })
            }
            _ => Err(WeightError::Invalid(format!("{self}: bar needs n even and d = n/2"))),
        }
    }

    /// The SO_n labels contained in the restriction of an O_n label.
    pub fn so_restriction(&self) -> Vec<WeightLabel> {
        let Group::O(n) = self.group else {
            return vec![self.clone()];
        };
        let base = WeightLabel { group: Group::So(n), entries: self.entries[..n / 2].to_vec(), tilde: false };
        if n % 2 == 0 && 2 * self.depth() == n {
            let bar = base.bar_label().expect("d = n/2");
            vec![base, bar]
        } else {
            vec![base]
        }
    }
}

impl fmt::Display for WeightLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.entries.iter().map(|x| x.to_string()).collect();
        write!(f, "{}:[{}]{}", self.group, e.join(","), if self.tilde { "~" } else { "" })
    }
}

impl Serialize for WeightLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for WeightLabel {
    type Err = WeightError;

    /// `GL3:[2,1,-1]`, `Sp4:[1,0,0,0]`, `SO4:[1,-1]`, `O4:[2,1,0,0]~`.
    fn from_str(s: &str) -> Result<Self, WeightError> {
        let bad = || WeightError::Parse(s.to_string());
        let t = s.trim();
        let (t, tilde) = match t.strip_suffix('~') {
            Some(r) => (r, true),
            None => (t, false),
        };
        let (g, rest) = t.split_once(':').ok_or_else(bad)?;
        let body = rest.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
        let entries = if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(',').map(|x| x.trim().parse::<i64>().map_err(|_| bad())).collect::<Result<_, _>>()?
        };
        let num = |p: &str| g[p.len()..].parse::<usize>().map_err(|_| bad());
        let group = if g.starts_with("GL") {
            Group::Gl(num("GL")?)
        } else if g.starts_with("Sp") {
            let two_n = num("Sp")?;
            if two_n % 2 == 1 {
                return Err(bad());
            }
            Group::Sp(two_n / 2)
        } else if g.starts_with("SO") {
            Group::So(num("SO")?)
        } else if g.starts_with('O') {
            Group::O(num("O")?)
        } else {
            return Err(bad());
        };
        WeightLabel::new(group, entries, tilde)
    }
}

/// Parses a comma list of entries as a label of `group`, padding with zeros
/// (and accepting an O_n partition with d > n/2 as the tilde of its partner).
pub fn label_from_list(group: Group, list: &str) -> Result<WeightLabel, WeightError> {
    let t = list.trim();
    let (t, tilde) = match t.strip_suffix('~') {
        Some(r) => (r, true),
        None => (t, false),
    };
    let mut entries: Vec<i64> = if t.is_empty() {
        Vec::new()
    } else {
        t.split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|_| WeightError::Parse(list.to_string())))
            .collect::<Result<_, _>>()?
    };
    let len = group.label_len();
    if entries.len() > len {
        return Err(WeightError::Invalid(format!("{list}: more than {len} entries for {group}")));
    }
    if let Group::Gl(_) = group {
        // Pad in the middle so that trailing negatives stay last.
        let neg = entries.iter().rposition(|&x| x >= 0).map_or(0, |p| p + 1);
        let tail = entries.split_off(neg);
        entries.resize(len - tail.len(), 0);
        entries.extend(tail);
    } else {
        entries.resize(len, 0);
    }
    if let Group::O(n) = group {
        if !tilde && is_partition(&entries) && 2 * depth(&entries) > n {
            let base = tilde_partition(&entries, n);
            return WeightLabel::new(group, base, true);
        }
    }
    WeightLabel::new(group, entries, tilde)
}

fn decreasing_tuples(len: usize, lo: i64, hi: i64, budget: i64, out: &mut Vec<Vec<i64>>, cur: &mut Vec<i64>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    let top = cur.last().copied().unwrap_or(hi).min(hi);
    let mut x = top;
    while x >= lo {
        if x.abs() <= budget {
            cur.push(x);
            decreasing_tuples(len, lo, hi, budget - x.abs(), out, cur);
            cur.pop();
        }
        x -= 1;
    }
}

/// All labels with Σ|μ_i| ≤ bound (for O_n, of the base partition), sorted.
pub fn enumerate_labels(group: Group, bound: i64) -> Vec<WeightLabel> {
    let mut out = Vec::new();
    let mut tuples = Vec::new();
    match group {
        Group::Gl(n) => {
            decreasing_tuples(n, -bound, bound, bound, &mut tuples, &mut Vec::new());
            out.extend(tuples.into_iter().map(|e| WeightLabel { group, entries: e, tilde: false }));
        }
        Group::Sp(n) => {
            decreasing_tuples(n, 0, bound, bound, &mut tuples, &mut Vec::new());
            for mut e in tuples {
                e.resize(2 * n, 0);
                out.push(WeightLabel { group, entries: e, tilde: false });
            }
        }
        Group::O(n) => {
            decreasing_tuples(n, 0, bound, bound, &mut tuples, &mut Vec::new());
            for e in tuples {
                let d = depth(&e);
                if 2 * d > n {
                    continue;
                }
                if 2 * d < n {
                    out.push(WeightLabel { group, entries: e.clone(), tilde: true });
                }
                out.push(WeightLabel { group, entries: e, tilde: false });
            }
        }
        Group::So(n) => {
            let r = n / 2;
            decreasing_tuples(r, 0, bound, bound, &mut tuples, &mut Vec::new());
            for e in tuples {
                let l = WeightLabel { group, entries: e, tilde: false };
                if n % 2 == 0 && r > 0 && l.entries[r - 1] != 0 {
                    out.push(l.bar_label().expect("d = n/2"));
                }
                out.push(l);
            }
        }
    }
    out.sort();
    out
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn to_dim(x: BigRational) -> u64 {
    assert!(x.is_integer() && x.is_positive(), "Weyl product {x} is not a positive integer");
    x.to_integer().to_u64().expect("dimension fits in u64")
}

/// Weyl dimension of the SO_n module with highest weight λ (⌊n/2⌋ entries).
fn dim_so(n: usize, lambda: &[i64]) -> u64 {
    let r = n / 2;
    // Work with 2l and 2ρ so that the odd case stays integral.
    let two_rho: Vec<i64> = (0..r).map(|i| if n % 2 == 1 { 2 * (r - i) as i64 - 1 } else { 2 * (r - i - 1) as i64 }).collect();
    let two_l: Vec<i64> = (0..r).map(|i| 2 * lambda[i] + two_rho[i]).collect();
    let mut x = BigRational::one();
    for i in 0..r {
        for j in i + 1..r {
            x *= rat(two_l[i] * two_l[i] - two_l[j] * two_l[j], two_rho[i] * two_rho[i] - two_rho[j] * two_rho[j]);
        }
        if n % 2 == 1 {
            x *= rat(two_l[i], two_rho[i]);
        }
    }
    to_dim(x)
}

/// dim L_G(μ) by the Weyl dimension formula; O_n through its SO_n restriction.
pub fn dim_irrep(l: &WeightLabel) -> u64 {
    let mu = &l.entries;
    match l.group {
        Group::Gl(n) => {
            let mut x = BigRational::one();
            for i in 0..n {
                for j in i + 1..n {
                    x *= rat(mu[i] - mu[j] + (j - i) as i64, (j - i) as i64);
                }
            }
            to_dim(x)
        }
        Group::Sp(n) => {
            let rho: Vec<i64> = (0..n).map(|i| (n - i) as i64).collect();
            let lv: Vec<i64> = (0..n).map(|i| mu[i] + rho[i]).collect();
            let mut x = BigRational::one();
            for i in 0..n {
                for j in i + 1..n {
                    x *= rat(lv[i] * lv[i] - lv[j] * lv[j], rho[i] * rho[i] - rho[j] * rho[j]);
                }
                x *= rat(lv[i], rho[i]);
            }
            to_dim(x)
        }
        Group::So(n) => dim_so(n, mu),
        Group::O(_) => l.so_restriction().iter().map(|s| dim_so(s.group.n(), &s.entries)).sum(),
    }
}

/// The group elements acting on F_N(Z) that the decomposition needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupElement {
    /// Diagonal torus element; n entries for GL_n and O_n/SO_n, 2n for Sp_2n.
    Diagonal(Vec<BigRational>),
    /// Swap of the n/2-th and (n/2+1)-th basis vectors (O_n, n even).
    Tau,
    MinusIdentity,
}

/// Superscript k of the mode index π(i, k).
pub fn superscript(dp: &DualPair, index: usize) -> usize {
    (index - 1) / dp.m + 1
}

fn check_element(dp: &DualPair, g: &GroupElement) -> Result<(), WeightError> {
    let n = dp.n;
    let err = |s: &str| Err(WeightError::Element(s.into()));
    match g {
        GroupElement::Diagonal(h) => {
            let want = if dp.pair == Pair::SpSo { 2 * n } else { n };
            if h.len() != want {
                return err(&format!("expected {want} diagonal entries"));
            }
            if h.iter().any(|x| x.is_zero()) {
                return err("singular diagonal");
            }
            match dp.pair {
                Pair::GlGl => {}
                Pair::SoSp => {
                    if (0..n).any(|k| &h[k] * &h[n - 1 - k] != BigRational::one()) {
                        return err("O_n torus needs h_k h_{n+1-k} = 1");
                    }
                }
                Pair::SpSo => {
                    if (0..n).any(|k| &h[k] * &h[n + k] != BigRational::one()) {
                        return err("Sp_2n torus needs h_{n+k} = 1/h_k");
                    }
                }
            }
            Ok(())
        }
        GroupElement::Tau => {
            if dp.pair == Pair::SoSp && n.is_multiple_of(2) {
                Ok(())
            } else {
                err("τ needs the O_n pair with n even")
            }
        }
        GroupElement::MinusIdentity => Ok(()),
    }
}

/// Monomial-wise action of a torus element, τ or −I_n on a Fock vector.
pub fn group_element_apply(dp: &DualPair, g: &GroupElement, v: &FockVector) -> Result<FockVector, WeightError> {
    check_element(dp, g)?;
    let n = dp.n;
    let mut out = FockVector::zero();
    for (mono, c) in v.terms() {
        match g {
            GroupElement::Diagonal(h) => {
                let mut f = BigRational::one();
                for x in mono {
                    let k = superscript(dp, x.index) - 1;
                    f *= match (x.species, dp.pair) {
                        (Species::Psi, _) => h[k].clone(),
                        (Species::PsiBar, Pair::SpSo) => h[n + k].clone(),
                        (Species::PsiBar, _) => h[k].recip(),
                    };
                }
                out.add_term(mono.clone(), &c.scale(&f));
            }
            GroupElement::Tau => {
                let (a, b) = (n / 2, n / 2 + 1);
                let mut m2: Vec<Mode> = mono
                    .iter()
                    .map(|x| {
                        let k = superscript(dp, x.index);
                        let i = x.index - (k - 1) * dp.m;
                        let k2 = if k == a { b } else if k == b { a } else { k };
                        Mode { index: dp.pi(i, k2), ..*x }
                    })
                    .collect();
                m2.sort();
                out.add_term(m2, c);
            }
            GroupElement::MinusIdentity => {
                let sign = if mono.len() % 2 == 0 { 1 } else { -1 };
                out.add_term(mono.clone(), &c.scale_int(sign));
            }
        }
    }
    Ok(out)
}

/// h^λ for a torus element and a weight λ read on the first λ.len() entries.
pub fn torus_character(h: &[BigRational], lambda: &[i64]) -> QScalar {
    let mut x = BigRational::one();
    for (hk, &e) in h.iter().zip(lambda) {
        let p = if e >= 0 { hk.clone() } else { hk.recip() };
        for _ in 0..e.abs() {
            x *= &p;
        }
    }
    QScalar::from_rational(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::half::Half;
    use crate::toroidal::Side;
    use crate::weyl_fock::{embedded_apply, Flavor};

    fn lab(s: &str) -> WeightLabel {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        for s in ["GL3:[2,1,-1]", "O5:[2,1,0,0,0]~", "O4:[2,1,0,0]", "SO4:[1,-1]", "Sp4:[1,0,0,0]", "GL1:[0]"] {
            assert_eq!(lab(s).to_string(), s);
        }
        assert!("GL2:[1,2]".parse::<WeightLabel>().is_err());
        assert!("O2:[1,1]".parse::<WeightLabel>().is_err());
        assert!("O2:[1,0]~".parse::<WeightLabel>().is_err());
        assert!("O4:[2,1,0,0]~".parse::<WeightLabel>().is_err());
        assert!("SO3:[-1]".parse::<WeightLabel>().is_err());
        assert_eq!(label_from_list(Group::Gl(3), "1,-1").unwrap(), lab("GL3:[1,0,-1]"));
        assert_eq!(label_from_list(Group::O(3), "1,1").unwrap(), lab("O3:[1,0,0]~"));
    }

    #[test]
    fn enumeration_examples() {
        let o2: Vec<String> = enumerate_labels(Group::O(2), 1).iter().map(|l| l.to_string()).collect();
        assert_eq!(o2, ["O2:[0,0]", "O2:[0,0]~", "O2:[1,0]"]);
        let gl1: Vec<String> = enumerate_labels(Group::Gl(1), 2).iter().map(|l| l.to_string()).collect();
        assert_eq!(gl1, ["GL1:[-2]", "GL1:[-1]", "GL1:[0]", "GL1:[1]", "GL1:[2]"]);
        let sp2: Vec<String> = enumerate_labels(Group::Sp(1), 2).iter().map(|l| l.to_string()).collect();
        assert_eq!(sp2, ["Sp2:[0,0]", "Sp2:[1,0]", "Sp2:[2,0]"]);
        let so2: Vec<String> = enumerate_labels(Group::So(2), 1).iter().map(|l| l.to_string()).collect();
        assert_eq!(so2, ["SO2:[-1]", "SO2:[0]", "SO2:[1]"]);
    }

    #[test]
    fn o_labels_satisfy_column_condition() {
        for n in 1..=5 {
            for l in enumerate_labels(Group::O(n), 4) {
                let p = l.expanded();
                let t = transpose(&p);
                let c2 = t.get(1).copied().unwrap_or(0);
                assert!(t[0] + c2 <= n as i64, "{l}");
            }
        }
    }

    #[test]
    fn combinatorics() {
        assert_eq!(tilde_partition(&[1, 0, 0], 3), vec![1, 1, 0]);
        assert_eq!(transpose(&[2, 1, 0]), vec![2, 1, 0]);
        assert_eq!(transpose(&[3, 1]), vec![2, 1, 1]);
        assert_eq!(depth(&[3, 3, 0]), 2);
        for n in 1..=5 {
            for l in enumerate_labels(Group::O(n), 4) {
                if 2 * l.depth() < n {
                    let t = tilde_partition(&l.entries, n);
                    assert_eq!(depth(&t), n - l.depth());
                    assert_eq!(tilde_partition(&t, n), l.entries);
                }
            }
        }
        assert_eq!(lab("SO4:[1,1]").bar_label().unwrap(), lab("SO4:[1,-1]"));
        assert!(lab("SO4:[1,0]").bar_label().is_err());
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dim_irrep(&lab("GL3:[0,0,0]")), 1);
        assert_eq!(dim_irrep(&lab("GL2:[1,0]")), 2);
        assert_eq!(dim_irrep(&lab("Sp4:[1,0,0,0]")), 4);
        assert_eq!(dim_irrep(&lab("Sp4:[1,1,0,0]")), 5);
        assert_eq!(dim_irrep(&lab("Sp4:[2,0,0,0]")), 10);
        assert_eq!(dim_irrep(&lab("SO3:[1]")), 3);
        assert_eq!(dim_irrep(&lab("SO5:[1,0]")), 5);
        assert_eq!(dim_irrep(&lab("SO5:[1,1]")), 10);
        assert_eq!(dim_irrep(&lab("SO4:[1,1]")), 3);
        assert_eq!(dim_irrep(&lab("SO4:[1,0]")), 4);
        assert_eq!(dim_irrep(&lab("SO2:[-3]")), 1);
        assert_eq!(dim_irrep(&lab("O2:[1,0]")), 2);
        assert_eq!(dim_irrep(&lab("O2:[0,0]~")), 1);
        assert_eq!(dim_irrep(&lab("O4:[1,1,0,0]")), 6);
        assert_eq!(dim_irrep(&lab("O3:[1,0,0]~")), 3);
    }

    /// Semistandard tableaux of shape μ (shifted to nonnegative) with entries ≤ n.
    fn ssyt_count(mu: &[i64], n: usize) -> u64 {
        let shift = *mu.last().unwrap();
        let shape: Vec<usize> = mu.iter().map(|&x| (x - shift) as usize).collect();
        let cells: Vec<(usize, usize)> =
            shape.iter().enumerate().flat_map(|(r, &len)| (0..len).map(move |c| (r, c))).collect();
        fn fill(k: usize, cells: &[(usize, usize)], t: &mut Vec<Vec<usize>>, n: usize) -> u64 {
            if k == cells.len() {
                return 1;
            }
            let (r, c) = cells[k];
            let mut total = 0;
            for x in 1..=n {
                if c > 0 && t[r][c - 1] > x {
                    continue;
                }
                if r > 0 && t[r - 1][c] >= x {
                    continue;
                }
                t[r][c] = x;
                total += fill(k + 1, cells, t, n);
            }
            t[r][c] = 0;
            total
        }
        let mut t: Vec<Vec<usize>> = shape.iter().map(|&l| vec![0; l]).collect();
        fill(0, &cells, &mut t, n)
    }

    #[test]
    fn gl_dimensions_match_tableaux() {
        for n in 1..=3 {
            for l in enumerate_labels(Group::Gl(n), 4) {
                assert_eq!(dim_irrep(&l), ssyt_count(&l.entries, n), "{l}");
            }
        }
    }

    fn h(t: i64) -> Half {
        Half::from_twice(t)
    }

    #[test]
    fn group_action_examples() {
        let gl = DualPair::new(Pair::GlGl, 1, 1);
        let v = FockVector::basis(vec![Mode::psi(1, h(-1))]);
        let two = GroupElement::Diagonal(vec![rat(2, 1)]);
        assert_eq!(group_element_apply(&gl, &two, &v).unwrap(), v.scale(&QScalar::from_int(2)));
        let w = FockVector::basis(vec![Mode::psibar(1, h(-1))]);
        assert_eq!(group_element_apply(&gl, &two, &w).unwrap(), w.scale(&QScalar::from_ratio(1, 2)));
        let vac = FockVector::vacuum();
        assert_eq!(group_element_apply(&gl, &GroupElement::MinusIdentity, &vac).unwrap(), vac);
        let o2 = DualPair::new(Pair::SoSp, 1, 2);
        assert_eq!(
            group_element_apply(&o2, &GroupElement::Tau, &v).unwrap(),
            FockVector::basis(vec![Mode::psi(2, h(-1))])
        );
        assert!(group_element_apply(&o2, &GroupElement::Diagonal(vec![rat(2, 1), rat(3, 1)]), &v).is_err());
        assert!(group_element_apply(&gl, &GroupElement::Diagonal(vec![rat(0, 1)]), &v).is_err());
    }

    #[test]
    fn torus_commutes_with_toroidal_side() {
        let samples = [
            (Pair::GlGl, 2, 2, Flavor::HalfInteger, vec![rat(2, 1), rat(-3, 5)]),
            (Pair::SoSp, 1, 2, Flavor::Integer, vec![rat(3, 1), rat(1, 3)]),
            (Pair::SpSo, 2, 1, Flavor::HalfInteger, vec![rat(5, 2), rat(2, 5)]),
        ];
        for (pair, m, n, flavor, hs) in samples {
            let dp = DualPair::new(pair, m, n);
            let g = GroupElement::Diagonal(hs);
            let v: FockVector = match flavor {
                Flavor::Integer => "psi[1](0)*psibar[2](-1)|0> + (2)*psi[2](-1)|0>".parse().unwrap(),
                Flavor::HalfInteger => "psi[1](-1/2)*psibar[2](-3/2)|0> + psi[2](-1/2)|0>".parse().unwrap(),
            };
            for x in dp.toroidal_generators(1, 1) {
                let Ok(xv) = embedded_apply(&dp, Side::Toroidal, &x, flavor, &v) else { continue };
                let lhs = group_element_apply(&dp, &g, &xv).unwrap();
                let gv = group_element_apply(&dp, &g, &v).unwrap();
                let rhs = embedded_apply(&dp, Side::Toroidal, &x, flavor, &gv).unwrap();
                assert_eq!(lhs, rhs, "{pair} {x}");
            }
        }
    }
}
