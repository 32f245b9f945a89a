//! Finite abelian groups and finite fields.
//!
//! Groups are direct products of cyclic factors Z_{n1} x ... x Z_{nk},
//! written additively. Elements are coordinate tuples; the canonical
//! enumeration is lexicographic, identity first, so for Z2 x Z2 x Z2 it
//! runs (0,0,0), (0,0,1), (0,1,0), ..., (1,1,1).
//!
//! GF(p^k) is layered on the additive group Z_p^k: a field element is the
//! tuple of polynomial coefficients with the constant term first. Field
//! enumeration orders elements by integer value sum c_i * p^i, beginning
//! 0, 1, x, x+1, x², ... (this differs from the additive group's
//! lexicographic order once k > 1; both orders are exposed separately).

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported group or field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// Element of a [`FiniteGroup`]: one residue per cyclic factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(Vec<u32>);

impl GroupElement {
    pub fn new(coords: Vec<u32>) -> Self {
        GroupElement(coords)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Direct product of cyclic groups, written additively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    structure: Vec<u32>,
    order: usize,
}

impl FiniteGroup {
    /// Builds Z_{n1} x ... x Z_{nk} from the list of factor orders.
    pub fn product(structure: Vec<u32>) -> Result<Self> {
        if structure.is_empty() {
            return Err(Error::EmptyGroupStructure);
        }
        let mut order: u128 = 1;
        for (index, &n) in structure.iter().enumerate() {
            if n == 0 {
                return Err(Error::ZeroGroupFactor { index });
            }
            order *= u128::from(n);
            if order > u128::from(MAX_ORDER) {
                return Err(Error::GroupTooLarge {
                    order,
                    cap: MAX_ORDER,
                });
            }
        }
        Ok(FiniteGroup {
            structure,
            order: order as usize,
        })
    }

    /// The cyclic group Z_n.
    pub fn cyclic(n: u32) -> Result<Self> {
        FiniteGroup::product(vec![n])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn structure(&self) -> &[u32] {
        &self.structure
    }

    pub fn rank(&self) -> usize {
        self.structure.len()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.structure.len()])
    }

    /// The element at `index` in the canonical lexicographic enumeration.
    pub fn element(&self, index: usize) -> Result<GroupElement> {
        if index >= self.order {
            return Err(Error::IndexRange {
                index,
                order: self.order,
            });
        }
        let mut coords = vec![0u32; self.structure.len()];
        let mut rest = index;
        for (slot, &n) in coords.iter_mut().zip(&self.structure).rev() {
            *slot = (rest % n as usize) as u32;
            rest /= n as usize;
        }
        Ok(GroupElement(coords))
    }

    /// Canonical index of `e`, inverse to [`FiniteGroup::element`].
    pub fn index_of(&self, e: &GroupElement) -> Result<usize> {
        self.check_member(e)?;
        let mut index = 0usize;
        for (&c, &n) in e.0.iter().zip(&self.structure) {
            index = index * n as usize + c as usize;
        }
        Ok(index)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.order)
            .map(|i| self.element(i).expect("index in range"))
            .collect()
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        self.check_member(e).is_ok()
    }

    fn check_member(&self, e: &GroupElement) -> Result<()> {
        if e.0.len() != self.structure.len() {
            return Err(Error::ArityMismatch {
                expected: self.structure.len(),
                got: e.0.len(),
            });
        }
        for (index, (&c, &n)) in e.0.iter().zip(&self.structure).enumerate() {
            if c >= n {
                return Err(Error::CoordinateRange {
                    index,
                    value: c,
                    order: n,
                });
            }
        }
        Ok(())
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_member(a)?;
        self.check_member(b)?;
        let coords = a
            .0
            .iter()
            .zip(&b.0)
            .zip(&self.structure)
            .map(|((&x, &y), &n)| (x + y) % n)
            .collect();
        Ok(GroupElement(coords))
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check_member(a)?;
        let coords = a
            .0
            .iter()
            .zip(&self.structure)
            .map(|(&x, &n)| if x == 0 { 0 } else { n - x })
            .collect();
        Ok(GroupElement(coords))
    }

    /// a - b, the difference used by difference-matrix checks.
    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.add(a, &self.neg(b)?)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// GF(p^k) over Z_p[x]/(m(x)) with m monic irreducible.
///
/// The modulus is the irreducible candidate with the smallest integer
/// encoding sum c_i * p^i of its non-leading coefficients, so GF(8) uses
/// x³ + x + 1 and GF(9) uses x² + 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: u32,
    k: u32,
    /// Length k+1, constant term first, leading coefficient 1.
    modulus: Vec<u32>,
    additive: FiniteGroup,
}

impl FiniteField {
    /// Builds GF(p^k), choosing the canonical modulus.
    pub fn new(p: u32, k: u32) -> Result<Self> {
        if !is_prime(u64::from(p)) {
            return Err(Error::NotPrime(u64::from(p)));
        }
        if k == 0 {
            return Err(Error::ZeroGroupFactor { index: 0 });
        }
        let q = u128::from(p).pow(k);
        if q > u128::from(MAX_ORDER) {
            return Err(Error::FieldTooLarge {
                q,
                cap: MAX_ORDER,
            });
        }
        let modulus = find_modulus(p, k);
        let additive = FiniteGroup::product(vec![p; k as usize])?;
        Ok(FiniteField {
            p,
            k,
            modulus,
            additive,
        })
    }

    pub fn order(&self) -> usize {
        self.additive.order()
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Modulus coefficients, constant term first; length k+1, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The additive group Z_p^k the elements live in.
    pub fn additive_group(&self) -> &FiniteGroup {
        &self.additive
    }

    pub fn zero(&self) -> GroupElement {
        self.additive.identity()
    }

    pub fn one(&self) -> GroupElement {
        self.element(1).expect("field has at least two elements")
    }

    /// The element of integer value `v`: coefficients are the base-p digits
    /// of `v`, least significant digit as the constant term.
    pub fn element(&self, value: usize) -> Result<GroupElement> {
        if value >= self.order() {
            return Err(Error::IndexRange {
                index: value,
                order: self.order(),
            });
        }
        let mut coords = vec![0u32; self.k as usize];
        let mut rest = value;
        for slot in coords.iter_mut() {
            *slot = (rest % self.p as usize) as u32;
            rest /= self.p as usize;
        }
        Ok(GroupElement(coords))
    }

    /// Integer value of `e`, inverse to [`FiniteField::element`].
    pub fn value_of(&self, e: &GroupElement) -> Result<usize> {
        self.additive.check_member(e)?;
        let mut value = 0usize;
        for &c in e.0.iter().rev() {
            value = value * self.p as usize + c as usize;
        }
        Ok(value)
    }

    /// All elements in field order: 0, 1, x, x+1, ...
    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.order())
            .map(|v| self.element(v).expect("value in range"))
            .collect()
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.additive.add(a, b)
    }

    /// Polynomial product reduced by the modulus.
    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.additive.check_member(a)?;
        self.additive.check_member(b)?;
        let k = self.k as usize;
        let p = u64::from(self.p);
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.0.iter().enumerate() {
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u64::from(x) * u64::from(y)) % p;
            }
        }
        // Reduce top coefficients with x^k = -(m_0 + m_1 x + ... + m_{k-1} x^{k-1}).
        for deg in (k..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (j, &m) in self.modulus[..k].iter().enumerate() {
                let idx = deg - k + j;
                let sub = c * u64::from(m) % p;
                prod[idx] = (prod[idx] + p - sub) % p;
            }
        }
        Ok(GroupElement(prod[..k].iter().map(|&c| c as u32).collect()))
    }
}

/// Coefficients constant-first; index encodes the polynomial with value
/// sum c_i * p^i plus the monic leading term.
fn find_modulus(p: u32, k: u32) -> Vec<u32> {
    let k = k as usize;
    if k == 1 {
        // x itself: any monic linear polynomial works; this is the smallest.
        return vec![0, 1];
    }
    let p_us = p as usize;
    let count = p_us.pow(k as u32);
    for value in 0..count {
        let mut cand = vec![0u32; k + 1];
        let mut rest = value;
        for slot in cand.iter_mut().take(k) {
            *slot = (rest % p_us) as u32;
            rest /= p_us;
        }
        cand[k] = 1;
        if poly_is_irreducible(&cand, p) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials of degree {k} exist over GF({p})")
}

/// Trial division by every monic polynomial of degree 1..=k/2.
fn poly_is_irreducible(poly: &[u32], p: u32) -> bool {
    let k = poly.len() - 1;
    let p_us = p as usize;
    for d in 1..=k / 2 {
        let count = p_us.pow(d as u32);
        for value in 0..count {
            let mut div = vec![0u32; d + 1];
            let mut rest = value;
            for slot in div.iter_mut().take(d) {
                *slot = (rest % p_us) as u32;
                rest /= p_us;
            }
            div[d] = 1;
            if poly_rem_is_zero(poly, &div, p) {
                return false;
            }
        }
    }
    true
}

/// Whether `divisor` (monic) divides `poly` over GF(p).
fn poly_rem_is_zero(poly: &[u32], divisor: &[u32], p: u32) -> bool {
    let p = u64::from(p);
    let mut rem: Vec<u64> = poly.iter().map(|&c| u64::from(c)).collect();
    let d = divisor.len() - 1;
    for deg in (d..rem.len()).rev() {
        let c = rem[deg];
        if c == 0 {
            continue;
        }
        rem[deg] = 0;
        for (j, &m) in divisor[..d].iter().enumerate() {
            let idx = deg - d + j;
            let sub = c * u64::from(m) % p;
            rem[idx] = (rem[idx] + p - sub) % p;
        }
    }
    rem.iter().all(|&c| c == 0)
}
