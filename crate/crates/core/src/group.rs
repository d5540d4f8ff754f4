//! Finite groups with a canonical index bijection onto `0..|G|`.
//!
//! Every element is stored as its canonical index, so equality, hashing and
//! the "larger index" canonical choice used by the shuffles are all integer
//! operations. Index conventions:
//!
//! * `zmod:N` (integers mod N under addition): the residue itself.
//! * `bits:n` (bit strings under XOR): the bits read big-endian, so
//!   `[1,0,1]` is 5.
//! * `sym:n` (permutations of `0..n` in one-line form): lexicographic rank
//!   (Lehmer code). Composition is `(σ∘τ)(i) = σ(τ(i))`.
//! * `prod:A,B`: `index(a) * |B| + index(b)`, i.e. lexicographic pairs.
//!
//! The identity always has index 0.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rng::Sampler;

pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 20;
pub const MAX_SYMMETRIC_DEGREE: u8 = 10;
pub const MAX_BIT_DIMENSION: u32 = 63;

const FACTORIAL: [u64; 11] = [1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880, 3628800];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Cyclic { modulus: u64 },
    Bits { dim: u32 },
    Symmetric { degree: u8 },
    Product(Group, Group),
}

#[derive(Debug)]
struct Inner {
    kind: GroupKind,
    order: u64,
    abelian: bool,
}

/// A finite group descriptor. Cheap to clone and safe to share.
#[derive(Clone)]
pub struct Group(Arc<Inner>);

impl Group {
    pub fn cyclic(modulus: u64) -> Result<Group> {
        if modulus == 0 {
            return Err(Error::InvalidGroup(
                "zmod modulus must be at least 1".into(),
            ));
        }
        Ok(Self::from_parts(
            GroupKind::Cyclic { modulus },
            modulus,
            true,
        ))
    }

    pub fn bits(dim: u32) -> Result<Group> {
        if dim > MAX_BIT_DIMENSION {
            return Err(Error::InvalidGroup(format!(
                "bits dimension {dim} exceeds {MAX_BIT_DIMENSION}"
            )));
        }
        Ok(Self::from_parts(GroupKind::Bits { dim }, 1u64 << dim, true))
    }

    pub fn symmetric(degree: u8) -> Result<Group> {
        if degree == 0 || degree > MAX_SYMMETRIC_DEGREE {
            return Err(Error::InvalidGroup(format!(
                "sym degree must be in 1..={MAX_SYMMETRIC_DEGREE}, got {degree}"
            )));
        }
        let order = FACTORIAL[degree as usize];
        Ok(Self::from_parts(
            GroupKind::Symmetric { degree },
            order,
            degree <= 2,
        ))
    }

    pub fn product(left: Group, right: Group) -> Result<Group> {
        let order = left.order().checked_mul(right.order()).ok_or_else(|| {
            Error::InvalidGroup(format!("order of prod:{left},{right} overflows 64 bits"))
        })?;
        let abelian = left.is_abelian() && right.is_abelian();
        Ok(Self::from_parts(
            GroupKind::Product(left, right),
            order,
            abelian,
        ))
    }

    /// `G × G`, the state space of the Feistel constructions.
    pub fn square(&self) -> Result<Group> {
        Group::product(self.clone(), self.clone())
    }

    fn from_parts(kind: GroupKind, order: u64, abelian: bool) -> Group {
        Group(Arc::new(Inner {
            kind,
            order,
            abelian,
        }))
    }

    pub fn kind(&self) -> &GroupKind {
        &self.0.kind
    }

    pub fn order(&self) -> u64 {
        self.0.order
    }

    pub fn is_abelian(&self) -> bool {
        self.0.abelian
    }

    /// The factors of a product group.
    pub fn factors(&self) -> Option<(&Group, &Group)> {
        match &self.0.kind {
            GroupKind::Product(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// `Some(G)` when this group is `G × G`.
    pub fn square_root(&self) -> Option<&Group> {
        self.factors().filter(|(a, b)| a == b).map(|(a, _)| a)
    }

    pub fn identity(&self) -> Element {
        self.at(0)
    }

    /// Element with canonical index `index` (the inverse of [`Element::index`]).
    pub fn element(&self, index: u64) -> Result<Element> {
        if index >= self.order() {
            return Err(Error::IndexOutOfRange {
                group: self.to_string(),
                index,
                order: self.order(),
            });
        }
        Ok(self.at(index))
    }

    pub(crate) fn at(&self, index: u64) -> Element {
        debug_assert!(index < self.order());
        Element {
            group: self.clone(),
            index,
        }
    }

    pub fn residue(&self, value: u64) -> Result<Element> {
        match self.kind() {
            GroupKind::Cyclic { modulus } if value < *modulus => Ok(self.at(value)),
            GroupKind::Cyclic { modulus } => {
                Err(self.invalid(format!("residue {value} is not below modulus {modulus}")))
            }
            _ => Err(self.invalid("residues only belong to zmod groups".into())),
        }
    }

    /// Big-endian bit vector, most significant bit first.
    pub fn bit_string(&self, bits: &[u8]) -> Result<Element> {
        let GroupKind::Bits { dim } = self.kind() else {
            return Err(self.invalid("bit vectors only belong to bits groups".into()));
        };
        if bits.len() != *dim as usize {
            return Err(self.invalid(format!("expected {dim} bits, got {}", bits.len())));
        }
        let mut index = 0u64;
        for &b in bits {
            if b > 1 {
                return Err(self.invalid(format!("bit value {b} is not 0 or 1")));
            }
            index = (index << 1) | b as u64;
        }
        Ok(self.at(index))
    }

    /// One-line permutation array on `0..n`.
    pub fn permutation(&self, images: &[u8]) -> Result<Element> {
        let GroupKind::Symmetric { degree } = self.kind() else {
            return Err(self.invalid("permutation arrays only belong to sym groups".into()));
        };
        let n = *degree as usize;
        if images.len() != n {
            return Err(self.invalid(format!("expected {n} entries, got {}", images.len())));
        }
        let mut seen = [false; MAX_SYMMETRIC_DEGREE as usize];
        for &v in images {
            if v as usize >= n || seen[v as usize] {
                return Err(self.invalid(format!("{images:?} is not a bijection on 0..{n}")));
            }
            seen[v as usize] = true;
        }
        Ok(self.at(lehmer_rank(images)))
    }

    pub fn pair(&self, left: &Element, right: &Element) -> Result<Element> {
        let Some((a, b)) = self.factors() else {
            return Err(self.invalid("pairs only belong to product groups".into()));
        };
        a.check(left)?;
        b.check(right)?;
        Ok(self.at(left.index * b.order() + right.index))
    }

    /// Uniform element; a deterministic function of the sampler state.
    pub fn sample<S: Sampler + ?Sized>(&self, sampler: &mut S) -> Element {
        self.at(sampler.below(self.order()))
    }

    /// All elements in canonical index order, refused above the default cap.
    pub fn enumerate(&self) -> Result<Vec<Element>> {
        self.enumerate_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn enumerate_with_cap(&self, cap: u64) -> Result<Vec<Element>> {
        if self.order() > cap {
            return Err(Error::EnumerationCap {
                group: self.to_string(),
                order: self.order(),
                cap,
            });
        }
        Ok((0..self.order()).map(|i| self.at(i)).collect())
    }

    /// Errors unless `e` belongs to this group.
    pub fn check(&self, e: &Element) -> Result<()> {
        if &e.group == self {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                expected: self.to_string(),
                found: e.group.to_string(),
            })
        }
    }

    fn invalid(&self, reason: String) -> Error {
        Error::InvalidElement {
            group: self.to_string(),
            reason,
        }
    }

    fn mul_index(&self, a: u64, b: u64) -> u64 {
        match self.kind() {
            GroupKind::Cyclic { modulus } => ((a as u128 + b as u128) % *modulus as u128) as u64,
            GroupKind::Bits { .. } => a ^ b,
            GroupKind::Symmetric { degree } => {
                let n = *degree as usize;
                let s = lehmer_unrank(a, n);
                let t = lehmer_unrank(b, n);
                let mut out = [0u8; MAX_SYMMETRIC_DEGREE as usize];
                for i in 0..n {
                    out[i] = s[t[i] as usize];
                }
                lehmer_rank(&out[..n])
            }
            GroupKind::Product(l, r) => {
                let m = r.order();
                l.mul_index(a / m, b / m) * m + r.mul_index(a % m, b % m)
            }
        }
    }

    fn inv_index(&self, a: u64) -> u64 {
        match self.kind() {
            GroupKind::Cyclic { modulus } => (modulus - a) % modulus,
            GroupKind::Bits { .. } => a,
            GroupKind::Symmetric { degree } => {
                let n = *degree as usize;
                let s = lehmer_unrank(a, n);
                let mut out = [0u8; MAX_SYMMETRIC_DEGREE as usize];
                for i in 0..n {
                    out[s[i] as usize] = i as u8;
                }
                lehmer_rank(&out[..n])
            }
            GroupKind::Product(l, r) => {
                let m = r.order();
                l.inv_index(a / m) * m + r.inv_index(a % m)
            }
        }
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.kind == other.0.kind
    }
}

impl Eq for Group {}

impl Hash for Group {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.kind.hash(state)
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({self})")
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            GroupKind::Cyclic { modulus } => write!(f, "zmod:{modulus}"),
            GroupKind::Bits { dim } => write!(f, "bits:{dim}"),
            GroupKind::Symmetric { degree } => write!(f, "sym:{degree}"),
            GroupKind::Product(a, b) => {
                // the left factor needs parentheses when it is itself a product
                if a.factors().is_some() {
                    write!(f, "prod:({a}),{b}")
                } else {
                    write!(f, "prod:{a},{b}")
                }
            }
        }
    }
}

impl FromStr for Group {
    type Err = Error;

    /// Grammar: `zmod:<N>`, `bits:<n>`, `sym:<n>`, `prod:<spec>,<spec>`.
    /// Either factor of a product may be wrapped in parentheses; a product
    /// in the left position must be.
    fn from_str(spec: &str) -> Result<Group> {
        parse_group(spec.trim()).map_err(|reason| match reason {
            Error::GroupSpec { .. } => reason,
            other => Error::GroupSpec {
                spec: spec.to_string(),
                reason: other.to_string(),
            },
        })
    }
}

fn parse_group(spec: &str) -> Result<Group> {
    let fail = |reason: &str| Error::GroupSpec {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    let spec = strip_parens(spec);
    let (head, rest) = spec
        .split_once(':')
        .ok_or_else(|| fail("expected <family>:<parameters>"))?;
    let number = |s: &str| -> Result<u64> {
        s.trim()
            .parse::<u64>()
            .map_err(|_| fail(&format!("{s:?} is not a non-negative integer")))
    };
    match head.trim() {
        "zmod" => Group::cyclic(number(rest)?),
        "bits" => {
            let n = number(rest)?;
            Group::bits(u32::try_from(n).unwrap_or(u32::MAX))
        }
        "sym" => {
            let n = number(rest)?;
            Group::symmetric(u8::try_from(n).unwrap_or(u8::MAX))
        }
        "prod" => {
            let split = top_level_comma(rest).ok_or_else(|| fail("prod needs two factors"))?;
            let left = parse_group(rest[..split].trim())?;
            let right = parse_group(rest[split + 1..].trim())?;
            Group::product(left, right)
        }
        other => Err(fail(&format!("unknown group family {other:?}"))),
    }
}

fn strip_parens(mut s: &str) -> &str {
    while s.starts_with('(') && s.ends_with(')') && matching_close(s) == Some(s.len() - 1) {
        s = s[1..s.len() - 1].trim();
    }
    s
}

fn matching_close(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// Lexicographic rank of a permutation of `0..n`.
fn lehmer_rank(p: &[u8]) -> u64 {
    let n = p.len();
    let mut rank = 0u64;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&v| v < p[i]).count() as u64;
        rank += smaller * FACTORIAL[n - 1 - i];
    }
    rank
}

fn lehmer_unrank(mut rank: u64, n: usize) -> [u8; MAX_SYMMETRIC_DEGREE as usize] {
    let mut pool: [u8; MAX_SYMMETRIC_DEGREE as usize] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9];
    let mut len = n;
    let mut out = [0u8; MAX_SYMMETRIC_DEGREE as usize];
    for (i, slot) in out.iter_mut().enumerate().take(n) {
        let f = FACTORIAL[n - 1 - i];
        let d = (rank / f) as usize;
        rank %= f;
        *slot = pool[d];
        pool.copy_within(d + 1..len, d);
        len -= 1;
    }
    out
}

/// Variant-specific view of an element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Residue(u64),
    Bits(Vec<u8>),
    Permutation(Vec<u8>),
    Pair(Element, Element),
}

/// A member of a specific [`Group`]. Two elements are equal iff they belong
/// to the same group and have the same canonical index.
#[derive(Clone)]
pub struct Element {
    group: Group,
    index: u64,
}

impl Element {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn is_identity(&self) -> bool {
        self.index == 0
    }

    /// The group operation `self · other`.
    pub fn op(&self, other: &Element) -> Result<Element> {
        self.group.check(other)?;
        Ok(self.group.at(self.group.mul_index(self.index, other.index)))
    }

    pub fn inv(&self) -> Element {
        self.group.at(self.group.inv_index(self.index))
    }

    /// `self · other⁻¹`.
    pub fn op_inv(&self, other: &Element) -> Result<Element> {
        self.op(&other.inv())
    }

    pub fn payload(&self) -> Payload {
        match self.group.kind() {
            GroupKind::Cyclic { .. } => Payload::Residue(self.index),
            GroupKind::Bits { dim } => Payload::Bits(
                (0..*dim)
                    .rev()
                    .map(|shift| ((self.index >> shift) & 1) as u8)
                    .collect(),
            ),
            GroupKind::Symmetric { degree } => {
                let n = *degree as usize;
                Payload::Permutation(lehmer_unrank(self.index, n)[..n].to_vec())
            }
            GroupKind::Product(..) => {
                let (a, b) = self.split().expect("product element");
                Payload::Pair(a, b)
            }
        }
    }

    /// Components of an element of a product group.
    pub fn split(&self) -> Result<(Element, Element)> {
        let (a, b) = self.group.factors().ok_or_else(|| Error::InvalidElement {
            group: self.group.to_string(),
            reason: "not a product group".into(),
        })?;
        let m = b.order();
        Ok((a.at(self.index / m), b.at(self.index % m)))
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.group == other.group
    }
}

impl Eq for Element {}

impl Hash for Element {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.index.hash(state)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.payload() {
            Payload::Residue(r) => write!(f, "{r} (mod {})", self.group.order()),
            Payload::Bits(b) => {
                let s: String = b.iter().map(|&x| char::from(b'0' + x)).collect();
                write!(f, "0b{s}")
            }
            Payload::Permutation(p) => write!(f, "{p:?}"),
            Payload::Pair(a, b) => write!(f, "({a:?}, {b:?})"),
        }
    }
}

/// Elements serialize as their decimal canonical index.
impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index)
    }
}
