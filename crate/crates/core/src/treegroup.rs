//! Automorphisms of the depth-k complete rooted d-ary tree as portraits.
//!
//! Vertices are addressed by digit strings over `0..d`; the level-n vertices
//! are ordered lexicographically, so leaf `i` of level n is the base-d
//! expansion of `i` with n digits. An automorphism acts by
//! `g(a₁a₂…aₙ) = g_∅(a₁) g_{a₁}(a₂) … g_{a₁…aₙ₋₁}(aₙ)`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::factor::is_prime_u64;
use crate::supernat::{Exponent, SupernaturalNumber};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("portraits have different shapes: (d={0}, k={1}) vs (d={2}, k={3})")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("level {n} is outside 0..={k}")]
    LevelOutOfRange { n: usize, k: usize },
    #[error("arity must be at least 2, got {0}")]
    BadArity(usize),
    #[error("bad label at vertex {address:?}: {reason}")]
    BadLabel { address: String, reason: String },
}

/// Permutation of `0..len` stored by images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Perm(images))
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// +1 or -1 from the cycle decomposition.
    pub fn sign(&self) -> i8 {
        let mut seen = vec![false; self.0.len()];
        let mut even_cycles = 0usize;
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            if len % 2 == 0 {
                even_cycles += 1;
            }
        }
        if even_cycles.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Order as an element of the symmetric group.
    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.0.len()];
        let mut acc = 1u64;
        for start in 0..self.0.len() {
            let mut len = 0u64;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            if len > 0 {
                acc = num_integer::lcm(acc, len);
            }
        }
        acc
    }
}

fn vertices_above(d: usize, k: usize) -> usize {
    (0..k).map(|j| d.pow(j as u32)).sum()
}

fn address_string(digits: &[usize]) -> String {
    digits.iter().map(|&a| char::from_digit(a as u32, 36).expect("digit below 36")).collect()
}

/// Element of Aut T_k(d): one permutation of `0..d` per internal vertex,
/// stored level by level in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Portrait {
    d: usize,
    k: usize,
    labels: Vec<Perm>,
}

impl Portrait {
    pub fn identity(d: usize, k: usize) -> Self {
        Self { d, k, labels: vec![Perm::identity(d); vertices_above(d, k)] }
    }

    /// Builds from labels listed level by level, lexicographically.
    pub fn from_labels(d: usize, k: usize, labels: Vec<Perm>) -> Result<Self, TreeError> {
        if d < 2 {
            return Err(TreeError::BadArity(d));
        }
        if labels.len() != vertices_above(d, k) {
            return Err(TreeError::BadLabel {
                address: String::new(),
                reason: format!("expected {} labels, got {}", vertices_above(d, k), labels.len()),
            });
        }
        if let Some(bad) = labels.iter().position(|p| p.len() != d) {
            let g = Self { d, k, labels: labels.clone() };
            return Err(TreeError::BadLabel {
                address: g.address_of(bad),
                reason: format!("not a permutation of 0..{d}"),
            });
        }
        Ok(Self { d, k, labels })
    }

    pub fn arity(&self) -> usize {
        self.d
    }

    pub fn depth(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[Perm] {
        &self.labels
    }

    fn index(&self, digits: &[usize]) -> usize {
        vertices_above(self.d, digits.len()) + digits.iter().fold(0, |acc, &a| acc * self.d + a)
    }

    fn address_of(&self, mut idx: usize) -> String {
        let mut j = 0;
        while idx >= self.d.pow(j as u32) {
            idx -= self.d.pow(j as u32);
            j += 1;
        }
        let mut digits = vec![0; j];
        for slot in digits.iter_mut().rev() {
            *slot = idx % self.d;
            idx /= self.d;
        }
        address_string(&digits)
    }

    pub fn label(&self, digits: &[usize]) -> &Perm {
        &self.labels[self.index(digits)]
    }

    pub fn set_label(&mut self, digits: &[usize], p: Perm) {
        assert_eq!(p.len(), self.d);
        let i = self.index(digits);
        self.labels[i] = p;
    }

    /// Image of a vertex address (any length ≤ k).
    pub fn act(&self, digits: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(digits.len());
        for j in 0..digits.len() {
            out.push(self.label(&digits[..j]).apply(digits[j]));
        }
        out
    }

    /// Wreath-product law: `(g∘h)_v = g_{h(v)} ∘ h_v`.
    pub fn compose(&self, h: &Portrait) -> Result<Portrait, TreeError> {
        if (self.d, self.k) != (h.d, h.k) {
            return Err(TreeError::ShapeMismatch(self.d, self.k, h.d, h.k));
        }
        let mut out = Portrait::identity(self.d, self.k);
        let mut digits = Vec::new();
        for j in 0..self.k {
            for idx in 0..self.d.pow(j as u32) {
                digits.clear();
                let mut r = idx;
                for _ in 0..j {
                    digits.push(r % self.d);
                    r /= self.d;
                }
                digits.reverse();
                let moved = h.act(&digits);
                let lab = self.label(&moved).compose(h.label(&digits));
                out.set_label(&digits, lab);
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Portrait {
        let mut out = Portrait::identity(self.d, self.k);
        // (g⁻¹)_{g(v)} = (g_v)⁻¹
        let mut digits = Vec::new();
        for j in 0..self.k {
            for idx in 0..self.d.pow(j as u32) {
                digits.clear();
                let mut r = idx;
                for _ in 0..j {
                    digits.push(r % self.d);
                    r /= self.d;
                }
                digits.reverse();
                let mut inv = vec![0; self.d];
                for (a, &b) in self.label(&digits).images().iter().enumerate() {
                    inv[b] = a;
                }
                out.set_label(&self.act(&digits), Perm(inv));
            }
        }
        out
    }

    /// Induced permutation of the `d^n` level-n vertices.
    pub fn leaf_permutation(&self, n: usize) -> Result<Perm, TreeError> {
        if n > self.k {
            return Err(TreeError::LevelOutOfRange { n, k: self.k });
        }
        let count = self.d.pow(n as u32);
        let mut images = Vec::with_capacity(count);
        let mut digits = vec![0; n];
        for leaf in 0..count {
            let mut r = leaf;
            for slot in digits.iter_mut().rev() {
                *slot = r % self.d;
                r /= self.d;
            }
            images.push(self.act(&digits).iter().fold(0, |acc, &a| acc * self.d + a));
        }
        Ok(Perm(images))
    }

    /// `σ_n(g) = ∏_{j<n} ∏_{|v|=j} sgn(g_v)^(d^(n-1-j))`.
    pub fn sign_level(&self, n: usize) -> Result<i8, TreeError> {
        if n == 0 || n > self.k {
            return Err(TreeError::LevelOutOfRange { n, k: self.k });
        }
        let lowest = if self.d.is_multiple_of(2) { n - 1 } else { 0 };
        let negatives = (lowest..n)
            .flat_map(|j| {
                let start = vertices_above(self.d, j);
                self.labels[start..start + self.d.pow(j as u32)].iter()
            })
            .filter(|p| p.sign() < 0)
            .count();
        Ok(if negatives % 2 == 0 { 1 } else { -1 })
    }

    pub fn sign_vector(&self) -> SignVector {
        SignVector((1..=self.k).map(|n| self.sign_level(n).expect("level in range")).collect())
    }

    /// All portraits of shape (d, k), in lexicographic label order.
    pub fn enumerate(d: usize, k: usize) -> impl Iterator<Item = Portrait> {
        let perms = all_perms(d);
        let slots = vertices_above(d, k);
        let total = perms.len().checked_pow(slots as u32).expect("enumeration fits in usize");
        (0..total).map(move |mut code| {
            let mut labels = Vec::with_capacity(slots);
            for _ in 0..slots {
                labels.push(perms[code % perms.len()].clone());
                code /= perms.len();
            }
            Portrait { d, k, labels }
        })
    }
}

/// All permutations of `0..d` in lexicographic order.
pub fn all_perms(d: usize) -> Vec<Perm> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Perm>) {
        if prefix.len() == used.len() {
            out.push(Perm(prefix.clone()));
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}

#[derive(Serialize, Deserialize)]
struct PortraitJson {
    d: usize,
    k: usize,
    labels: BTreeMap<String, Vec<usize>>,
}

impl Serialize for Portrait {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let labels = (0..self.labels.len()).map(|i| (self.address_of(i), self.labels[i].0.clone())).collect();
        PortraitJson { d: self.d, k: self.k, labels }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Portrait {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = PortraitJson::deserialize(de)?;
        if raw.d < 2 || raw.d > 36 {
            return Err(D::Error::custom(TreeError::BadArity(raw.d)));
        }
        let mut g = Portrait::identity(raw.d, raw.k);
        if raw.labels.len() != g.labels.len() {
            return Err(D::Error::custom(format!("expected {} labels, got {}", g.labels.len(), raw.labels.len())));
        }
        for (addr, images) in raw.labels {
            let digits: Option<Vec<usize>> =
                addr.chars().map(|c| c.to_digit(36).map(|v| v as usize).filter(|&v| v < raw.d)).collect();
            let bad =
                |reason: &str| D::Error::custom(TreeError::BadLabel { address: addr.clone(), reason: reason.into() });
            let digits = digits.filter(|ds| ds.len() < raw.k).ok_or_else(|| bad("not an internal vertex"))?;
            let p = Perm::from_images(images).filter(|p| p.len() == raw.d).ok_or_else(|| bad("not a permutation"))?;
            g.set_label(&digits, p);
        }
        Ok(g)
    }
}

/// `(σ_1(g), …, σ_k(g))` with entries ±1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignVector(pub Vec<i8>);

/// `|Aut T_k(d)| = (d!)^((d^k - 1)/(d - 1))`.
pub fn group_order(d: usize, k: usize) -> BigUint {
    let fact: BigUint = (1..=d).map(BigUint::from).fold(BigUint::one(), |a, b| a * b);
    num_traits::pow(fact, vertices_above(d, k))
}

/// Order of Aut T_∞(d): every prime up to d with infinite exponent.
pub fn aut_order_supernatural(d: usize) -> Result<SupernaturalNumber, TreeError> {
    if d < 2 {
        return Err(TreeError::BadArity(d));
    }
    Ok((2..=d as u64).filter(|&p| is_prime_u64(p)).fold(SupernaturalNumber::one(), |acc, p| {
        acc.mul(&SupernaturalNumber::prime_power(BigUint::from(p), Exponent::Infinite).expect("prime"))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn swap() -> Perm {
        Perm(vec![1, 0])
    }

    fn random_portrait(d: usize, k: usize, rng: &mut ChaCha8Rng) -> Portrait {
        let perms = all_perms(d);
        let labels = (0..vertices_above(d, k)).map(|_| perms[rng.gen_range(0..perms.len())].clone()).collect();
        Portrait::from_labels(d, k, labels).unwrap()
    }

    #[test]
    fn root_swap_examples() {
        let mut g = Portrait::identity(2, 2);
        g.set_label(&[], swap());
        assert_eq!(g.leaf_permutation(2).unwrap().images(), &[2, 3, 0, 1]);
        assert_eq!(g.sign_vector(), SignVector(vec![-1, 1]));
        assert!(g.compose(&g).unwrap() == Portrait::identity(2, 2));

        let mut h = Portrait::identity(2, 2);
        h.set_label(&[0], swap());
        assert_eq!(h.leaf_permutation(2).unwrap().images(), &[1, 0, 2, 3]);
        assert_eq!(h.sign_vector(), SignVector(vec![1, -1]));
        assert_eq!(h.sign_level(3), Err(TreeError::LevelOutOfRange { n: 3, k: 2 }));
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let h = random_portrait(3, 2, &mut rng);
            assert_eq!(Portrait::identity(3, 2).compose(&h).unwrap(), h);
            assert_eq!(h.compose(&h.inverse()).unwrap(), Portrait::identity(3, 2));
        }
        assert!(Portrait::identity(2, 3).leaf_permutation(3).unwrap().is_identity());
        assert!(Portrait::identity(2, 2).compose(&Portrait::identity(2, 3)).is_err());
    }

    fn check_homomorphisms(g: &Portrait, h: &Portrait) {
        let gh = g.compose(h).unwrap();
        for n in 0..=g.depth() {
            let lhs = gh.leaf_permutation(n).unwrap();
            let rhs = g.leaf_permutation(n).unwrap().compose(&h.leaf_permutation(n).unwrap());
            assert_eq!(lhs, rhs);
        }
        for n in 1..=g.depth() {
            assert_eq!(gh.sign_level(n).unwrap(), g.sign_level(n).unwrap() * h.sign_level(n).unwrap());
        }
    }

    #[test]
    fn composition_is_a_homomorphism_exhaustively_for_binary_trees() {
        for k in 0..=2 {
            let all: Vec<Portrait> = Portrait::enumerate(2, k).collect();
            for g in &all {
                for h in &all {
                    check_homomorphisms(g, h);
                }
            }
        }
        let all3: Vec<Portrait> = Portrait::enumerate(2, 3).collect();
        for (i, g) in all3.iter().enumerate() {
            for h in all3.iter().skip(i % 7).step_by(7) {
                check_homomorphisms(g, h);
            }
        }
    }

    #[test]
    fn composition_is_a_homomorphism_for_random_ternary_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let g = random_portrait(3, 2, &mut rng);
            let h = random_portrait(3, 2, &mut rng);
            check_homomorphisms(&g, &h);
        }
    }

    #[test]
    fn closed_form_sign_matches_expanded_action() {
        for k in 1..=3 {
            for g in Portrait::enumerate(2, k) {
                for n in 1..=k {
                    assert_eq!(g.sign_level(n).unwrap(), g.leaf_permutation(n).unwrap().sign());
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (d, k) in [(3, 2), (4, 2), (3, 3)] {
            for _ in 0..200 {
                let g = random_portrait(d, k, &mut rng);
                for n in 1..=k {
                    assert_eq!(g.sign_level(n).unwrap(), g.leaf_permutation(n).unwrap().sign());
                }
            }
        }
    }

    #[test]
    fn signs_are_jointly_surjective() {
        for k in 1..=4 {
            for n in 1..=k {
                let mut g = Portrait::identity(2, k);
                g.set_label(&vec![0; n - 1], swap());
                let expected: Vec<i8> = (1..=k).map(|m| if m == n { -1 } else { 1 }).collect();
                assert_eq!(g.sign_vector(), SignVector(expected));
            }
        }
    }

    #[test]
    fn orders_match_enumeration() {
        for (d, k, expected) in [(2, 1, 2u64), (2, 2, 8), (2, 3, 128), (3, 1, 6), (3, 2, 1296)] {
            let distinct: HashSet<Perm> = Portrait::enumerate(d, k).map(|g| g.leaf_permutation(k).unwrap()).collect();
            assert_eq!(distinct.len() as u64, expected);
            assert_eq!(group_order(d, k), BigUint::from(expected));
        }
        assert_eq!(group_order(2, 0), BigUint::one());
    }

    #[test]
    fn supernatural_orders() {
        assert_eq!(aut_order_supernatural(2).unwrap().to_string(), "2^inf");
        assert_eq!(aut_order_supernatural(3).unwrap().to_string(), "2^inf * 3^inf");
        assert_eq!(aut_order_supernatural(4).unwrap().to_string(), "2^inf * 3^inf");
        assert_eq!(aut_order_supernatural(7).unwrap().to_string(), "2^inf * 3^inf * 5^inf * 7^inf");
        assert!(aut_order_supernatural(1).is_err());
    }

    #[test]
    fn portrait_json_round_trip() {
        let mut g = Portrait::identity(2, 2);
        g.set_label(&[], swap());
        g.set_label(&[1], swap());
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"d":2,"k":2,"labels":{"":[1,0],"0":[0,1],"1":[1,0]}}"#);
        assert_eq!(serde_json::from_str::<Portrait>(&s).unwrap(), g);
        assert!(serde_json::from_str::<Portrait>(r#"{"d":2,"k":1,"labels":{"":[0,0]}}"#).is_err());
        assert!(serde_json::from_str::<Portrait>(r#"{"d":2,"k":1,"labels":{}}"#).is_err());
    }
}
