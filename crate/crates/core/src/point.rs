//! Binary and lattice points, the positional code of a binary vector, and
//! elementary cube geometry.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{FvxError, Result};
use crate::geometry::{HRow, Objective, Relation};
use crate::rational::{self, Rational};

pub const MAX_BINARY_DIM: usize = 64;

/// A point of `{0,1}^n`, `1 <= n <= 64`, packed in one word: bit `j` holds
/// coordinate `j + 1`.
///
/// Ordering is lexicographic over coordinates `1..n` with `0 < 1`, which is
/// the tie-break order used by every oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BinaryPoint {
    n: u8,
    bits: u64,
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl BinaryPoint {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > MAX_BINARY_DIM {
            return Err(FvxError::Domain(format!("binary dimension {n} outside 1..=64")));
        }
        if bits & !mask(n) != 0 {
            return Err(FvxError::Domain(format!("bits {bits:#x} exceed dimension {n}")));
        }
        Ok(BinaryPoint { n: n as u8, bits })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        BinaryPoint::new(n, 0)
    }

    pub fn from_coords(coords: &[bool]) -> Result<Self> {
        let bits = coords
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &b)| acc | (u64::from(b) << j));
        BinaryPoint::new(coords.len(), bits)
    }

    /// Parses a bitstring whose leftmost character is coordinate 1.
    pub fn parse(s: &str) -> Result<Self> {
        let coords = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(FvxError::Domain(format!("not a bitstring: {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        BinaryPoint::from_coords(&coords)
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Coordinate `j + 1`.
    pub fn get(&self, j: usize) -> bool {
        debug_assert!(j < self.dim());
        self.bits >> j & 1 == 1
    }

    pub fn with(&self, j: usize, value: bool) -> Self {
        let bits = if value {
            self.bits | 1 << j
        } else {
            self.bits & !(1 << j)
        };
        BinaryPoint { n: self.n, bits }
    }

    pub fn flipped(&self, j: usize) -> Self {
        BinaryPoint {
            n: self.n,
            bits: self.bits ^ 1 << j,
        }
    }

    pub fn coords(&self) -> Vec<bool> {
        (0..self.dim()).map(|j| self.get(j)).collect()
    }

    pub fn hamming(&self, other: &BinaryPoint) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }

    /// Index of the first coordinate where `self` and `other` differ, i.e.
    /// the length of their longest common prefix.
    pub fn common_prefix(&self, other: &BinaryPoint) -> usize {
        let diff = self.bits ^ other.bits;
        (diff.trailing_zeros() as usize).min(self.dim())
    }

    /// All `2^n` points in increasing code order.
    pub fn all(n: usize) -> Result<impl Iterator<Item = BinaryPoint>> {
        if n == 0 || n > 30 {
            return Err(FvxError::GuardExceeded(format!("cannot list 2^{n} points")));
        }
        Ok((0..1u64 << n).map(move |bits| BinaryPoint { n: n as u8, bits }))
    }

    fn lex_key(&self) -> u64 {
        self.bits.reverse_bits() >> (64 - self.dim())
    }
}

impl Ord for BinaryPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.lex_key().cmp(&other.lex_key()))
    }
}

impl PartialOrd for BinaryPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BinaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.dim() {
            write!(f, "{}", if self.get(j) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// A point of `Z^n` with arbitrary-precision coordinates, ordered
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    coords: Vec<BigInt>,
}

impl LatticePoint {
    pub fn new(coords: Vec<BigInt>) -> Self {
        LatticePoint { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        LatticePoint::new(coords.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.coords
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (j, v) in self.coords.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// What the solvers need from a candidate point.
pub trait Vertex: Clone + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync {
    fn dim(&self) -> usize;
    fn to_rationals(&self) -> Vec<Rational>;

    fn value(&self, c: &Objective) -> Rational {
        rational::dot(c.coeffs(), &self.to_rationals())
    }
}

impl Vertex for BinaryPoint {
    fn dim(&self) -> usize {
        BinaryPoint::dim(self)
    }

    fn to_rationals(&self) -> Vec<Rational> {
        (0..self.dim())
            .map(|j| rational::int(i64::from(self.get(j))))
            .collect()
    }

    fn value(&self, c: &Objective) -> Rational {
        (0..self.dim())
            .filter(|&j| self.get(j))
            .fold(Rational::zero(), |acc, j| acc + c.coeff(j))
    }
}

impl Vertex for LatticePoint {
    fn dim(&self) -> usize {
        LatticePoint::dim(self)
    }

    fn to_rationals(&self) -> Vec<Rational> {
        self.coords.iter().cloned().map(rational::big).collect()
    }
}

/// `sum_j 2^j v_{j+1}`.
pub fn sigma_encode(v: &BinaryPoint) -> u128 {
    u128::from(v.bits)
}

/// Inverse of [`sigma_encode`]; `k` must be below `2^n`.
pub fn sigma_decode(k: u128, n: usize) -> Result<BinaryPoint> {
    if n == 0 || n > MAX_BINARY_DIM {
        return Err(FvxError::Domain(format!("binary dimension {n} outside 1..=64")));
    }
    if k >> n != 0 {
        return Err(FvxError::Domain(format!("code {k} is not below 2^{n}")));
    }
    BinaryPoint::new(n, k as u64)
}

/// True iff no two points of `x` are cube neighbours (Hamming distance 1).
pub fn hamming_independent(x: &[BinaryPoint]) -> bool {
    x.iter()
        .enumerate()
        .all(|(i, u)| x[i + 1..].iter().all(|v| u.hamming(v) != 1))
}

/// The no-good cut of `v`:
/// `sum_{v_j = 0} x_j + sum_{v_j = 1} (1 - x_j) >= 1`, as one `>=` row with
/// integer coefficients.
pub fn no_good_cut(v: &BinaryPoint) -> HRow {
    let n = v.dim();
    let ones = (0..n).filter(|&j| v.get(j)).count() as i64;
    let a: Vec<i64> = (0..n).map(|j| if v.get(j) { -1 } else { 1 }).collect();
    HRow::from_ints(&a, Relation::Ge, 1 - ones)
}
