//! Exact arithmetic in `G_n = (p^{-n} Z)^d ⊂ G_∞ = Z[1/p]^d`.
//!
//! Every coordinate is a [`PadicRational`] `num / p^exp` kept in canonical
//! form, so equality, hashing and ordering are structural. Floating point only
//! enters through [`GroupElement::length`] and the coordinate maps `x_j`.

mod ball;
mod parse;

pub use ball::{BallTable, DEFAULT_BALL_CAP};

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `p^k` with overflow detection.
pub(crate) fn checked_pow(p: u64, k: u32) -> Option<u64> {
    p.checked_pow(k)
}

fn pow_i64(p: u64, k: u32) -> Option<i64> {
    checked_pow(p, k).and_then(|v| i64::try_from(v).ok())
}

/// A `p`-adic rational `numerator / p^exponent` in canonical form: either
/// `exponent == 0` or `p` does not divide `numerator`; zero is `(0, 0)`.
///
/// The prime-like base `p` is not stored; it is supplied by the ambient
/// [`GroupElement`] or [`Group`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PadicRational {
    num: i64,
    exp: u32,
}

impl PadicRational {
    pub const ZERO: PadicRational = PadicRational { num: 0, exp: 0 };

    /// Canonical form of `m / p^k`.
    pub fn reduce(p: u64, m: i64, k: u32) -> Self {
        if m == 0 {
            return Self::ZERO;
        }
        let p = p as i64;
        let (mut num, mut exp) = (m, k);
        while exp > 0 && num % p == 0 {
            num /= p;
            exp -= 1;
        }
        PadicRational { num, exp }
    }

    pub fn integer(m: i64) -> Self {
        PadicRational { num: m, exp: 0 }
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn exponent(self) -> u32 {
        self.exp
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn to_f64(self, p: u64) -> f64 {
        if self.exp == 0 {
            return self.num as f64;
        }
        self.num as f64 / (p as f64).powi(self.exp as i32)
    }

    /// Numerator of `self` written over `p^level`, for `level >= exponent`.
    pub fn numerator_at(self, p: u64, level: u32) -> Option<i64> {
        if level < self.exp {
            return None;
        }
        pow_i64(p, level - self.exp).and_then(|s| self.num.checked_mul(s))
    }

    pub fn checked_add(self, other: Self, p: u64) -> Option<Self> {
        let e = self.exp.max(other.exp);
        let a = self.numerator_at(p, e)?;
        let b = other.numerator_at(p, e)?;
        Some(Self::reduce(p, a.checked_add(b)?, e))
    }

    pub fn checked_neg(self) -> Option<Self> {
        Some(PadicRational {
            num: self.num.checked_neg()?,
            exp: self.exp,
        })
    }

    /// Ordering by value.
    pub fn cmp_value(self, other: Self, p: u64) -> Ordering {
        let e = self.exp.max(other.exp);
        let scale = |q: PadicRational| -> i128 {
            let mut v = q.num as i128;
            for _ in q.exp..e {
                v *= p as i128;
            }
            v
        };
        scale(self).cmp(&scale(other))
    }
}

/// The ambient group `Z[1/p]^d` together with its base `p` and dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    p: u64,
    d: usize,
}

impl Group {
    pub fn new(p: u64, d: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::invalid(format!("p must be at least 2, got {p}")));
        }
        if d < 1 {
            return Err(Error::invalid("dimension d must be at least 1"));
        }
        if p > 1 << 20 {
            return Err(Error::invalid(format!("p = {p} is too large for exact arithmetic")));
        }
        Ok(Group { p, d })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            p: self.p,
            coords: vec![PadicRational::ZERO; self.d],
        }
    }

    /// `e_j`, the j-th integer basis vector (0-based).
    pub fn unit(&self, j: usize) -> GroupElement {
        let mut g = self.zero();
        g.coords[j] = PadicRational::integer(1);
        g
    }

    pub fn integers(&self, values: &[i64]) -> Result<GroupElement> {
        self.check_dim(values.len())?;
        Ok(GroupElement {
            p: self.p,
            coords: values.iter().map(|&v| PadicRational::integer(v)).collect(),
        })
    }

    /// Element from `(numerator, exponent)` pairs, reduced to canonical form.
    pub fn element(&self, pairs: &[(i64, u32)]) -> Result<GroupElement> {
        self.check_dim(pairs.len())?;
        Ok(GroupElement {
            p: self.p,
            coords: pairs
                .iter()
                .map(|&(m, k)| PadicRational::reduce(self.p, m, k))
                .collect(),
        })
    }

    /// Element whose coordinates are `numerators[j] / p^level`.
    pub fn at_level(&self, numerators: &[i64], level: u32) -> Result<GroupElement> {
        self.check_dim(numerators.len())?;
        Ok(GroupElement {
            p: self.p,
            coords: numerators
                .iter()
                .map(|&m| PadicRational::reduce(self.p, m, level))
                .collect(),
        })
    }

    /// Parses comma-separated coordinates such as `1/2,0`, `-3/2^2,0.25` or
    /// `1/p^3,1`. Inputs whose denominator is not a power of `p`, or whose
    /// level exceeds `max_level`, are rejected rather than rounded.
    pub fn parse_element(&self, text: &str, max_level: Option<u32>) -> Result<GroupElement> {
        let coords = parse::parse_coords(self.p, text)?;
        self.check_dim(coords.len())?;
        let g = GroupElement { p: self.p, coords };
        if let Some(n) = max_level {
            g.require_level(n)?;
        }
        Ok(g)
    }

    /// Transversal `C = {k ∈ p^{-m}Z^d : 0 <= k_j < p^{-n}}` of `G_n` in `G_m`.
    ///
    /// `0` comes first and every other representative lies outside `G_n`.
    pub fn coset_representatives(&self, m: u32, n: u32) -> Result<Vec<GroupElement>> {
        if m <= n {
            return Err(Error::invalid(format!(
                "coset representatives need m > n, got m = {m}, n = {n}"
            )));
        }
        let per_axis = checked_pow(self.p, m - n).ok_or(Error::Overflow)?;
        let count = (per_axis as u128).checked_pow(self.d as u32);
        match count {
            Some(c) if c <= DEFAULT_BALL_CAP as u128 => {}
            _ => {
                return Err(Error::ResourceCap {
                    what: "coset transversal",
                    size: count.map_or(usize::MAX, |c| c.min(usize::MAX as u128) as usize),
                    cap: DEFAULT_BALL_CAP,
                })
            }
        }
        let per_axis = per_axis as i64;
        let mut out = Vec::new();
        let mut digits = vec![0i64; self.d];
        loop {
            out.push(self.at_level(&digits, m)?);
            let mut j = self.d;
            loop {
                if j == 0 {
                    return Ok(out);
                }
                j -= 1;
                digits[j] += 1;
                if digits[j] < per_axis {
                    break;
                }
                digits[j] = 0;
            }
        }
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.d {
            return Err(Error::invalid(format!(
                "expected {} coordinates, got {len}",
                self.d
            )));
        }
        Ok(())
    }
}

/// An element of `Z[1/p]^d` with exact coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    p: u64,
    coords: Vec<PadicRational>,
}

impl GroupElement {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[PadicRational] {
        &self.coords
    }

    pub fn group(&self) -> Group {
        Group {
            p: self.p,
            d: self.coords.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// `x_j(g)` as a float.
    pub fn x(&self, j: usize) -> f64 {
        self.coords[j].to_f64(self.p)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.x(j)).collect()
    }

    /// `min{n : p^n g ∈ Z^d}`, the largest coordinate exponent.
    pub fn level(&self) -> u32 {
        self.coords.iter().map(|c| c.exp).max().unwrap_or(0)
    }

    pub fn in_level(&self, n: u32) -> bool {
        self.level() <= n
    }

    pub(crate) fn require_level(&self, n: u32) -> Result<()> {
        let level = self.level();
        if level > n {
            return Err(Error::LevelMismatch {
                level,
                max_level: n,
            });
        }
        Ok(())
    }

    /// The level weight `p^level(g)`; `1` at the identity.
    pub fn f_weight(&self) -> u64 {
        checked_pow(self.p, self.level()).expect("level weight overflows u64")
    }

    /// `sqrt(Σ_j x_j(g)^2 + F(g)^2)`.
    pub fn length(&self) -> f64 {
        let f = self.f_weight() as f64;
        (self.xs().iter().map(|x| x * x).sum::<f64>() + f * f).sqrt()
    }

    /// Closed form of `sup_h |F(h) - F(h - g)|`: zero on `Z^d`, `F(g) - 1` otherwise.
    ///
    /// The supremum is the same over every `G_n` containing `g`.
    pub fn fdiff_sup(&self) -> u64 {
        if self.level() == 0 {
            0
        } else {
            self.f_weight() - 1
        }
    }

    /// Coordinates written as integers over `p^level`.
    pub fn numerators_at(&self, level: u32) -> Option<Vec<i64>> {
        self.coords
            .iter()
            .map(|c| c.numerator_at(self.p, level))
            .collect()
    }

    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.p, other.p);
        assert_eq!(self.dim(), other.dim());
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.checked_add(*b, self.p))
            .collect::<Option<Vec<_>>>()?;
        Some(GroupElement { p: self.p, coords })
    }

    pub fn checked_neg(&self) -> Option<Self> {
        let coords = self
            .coords
            .iter()
            .map(|c| c.checked_neg())
            .collect::<Option<Vec<_>>>()?;
        Some(GroupElement { p: self.p, coords })
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.checked_add(&other.checked_neg()?)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.checked_add(other).ok_or(Error::Overflow)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.checked_sub(other).ok_or(Error::Overflow)
    }

    /// Lexicographic comparison of coordinate values.
    pub fn cmp_lex(&self, other: &Self) -> Ordering {
        for (a, b) in self.coords.iter().zip(&other.coords) {
            match a.cmp_value(*b, self.p) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    /// `(numerator, exponent)` pairs, the wire form used in JSON.
    pub fn to_pairs(&self) -> Vec<[i64; 2]> {
        self.coords
            .iter()
            .map(|c| [c.num, c.exp as i64])
            .collect()
    }

    pub fn from_pairs(group: &Group, pairs: &[[i64; 2]]) -> Result<Self> {
        let pairs = pairs
            .iter()
            .map(|&[m, k]| {
                u32::try_from(k)
                    .map(|k| (m, k))
                    .map_err(|_| Error::invalid(format!("negative exponent {k}")))
            })
            .collect::<Result<Vec<_>>>()?;
        group.element(&pairs)
    }
}

impl std::ops::Add for &GroupElement {
    type Output = GroupElement;

    fn add(self, rhs: Self) -> GroupElement {
        self.checked_add(rhs).expect("overflow in group addition")
    }
}

impl std::ops::Sub for &GroupElement {
    type Output = GroupElement;

    fn sub(self, rhs: Self) -> GroupElement {
        self.checked_sub(rhs).expect("overflow in group subtraction")
    }
}

impl std::ops::Neg for &GroupElement {
    type Output = GroupElement;

    fn neg(self) -> GroupElement {
        self.checked_neg().expect("overflow in group negation")
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, c) in self.coords.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            match c.exp {
                0 => write!(f, "{}", c.num)?,
                1 => write!(f, "{}/{}", c.num, self.p)?,
                k => write!(f, "{}/{}^{}", c.num, self.p, k)?,
            }
        }
        Ok(())
    }
}

impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}
