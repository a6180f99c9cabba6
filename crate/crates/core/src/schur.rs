//! Irrep labels, weight vectors and combinatorial helpers for the
//! commutant of the qubit-permuting representation.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

/// Irrep `(n-m, m)` of the two-row decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IrrepLabel {
    pub n: usize,
    pub m: usize,
    /// Block dimension `n - 2m + 1`.
    pub d: usize,
    /// Number of copies of the block in the full space.
    pub mult: BigUint,
}

impl IrrepLabel {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidQubitCount(n));
        }
        if 2 * m > n {
            return Err(Error::InvalidIrrep { n, m });
        }
        Ok(Self {
            n,
            m,
            d: n - 2 * m + 1,
            mult: multiplicity(n, m),
        })
    }

    /// Some irrep whose block has dimension `d`, for wrapping plain matrices.
    pub fn with_dim(d: usize) -> Result<Self> {
        match d {
            0 => Err(Error::InvalidQubitCount(0)),
            1 => Self::new(2, 1),
            _ => Self::new(d - 1, 0),
        }
    }

    /// Spin quantum number `n/2 - m`.
    pub fn spin(&self) -> f64 {
        self.n as f64 / 2.0 - self.m as f64
    }

    pub fn partition(&self) -> (usize, usize) {
        (self.n - self.m, self.m)
    }

    pub fn mult_f64(&self) -> f64 {
        self.mult.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn hamming(&self, q: usize) -> usize {
        q + self.m
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n - self.m, self.m)
    }
}

/// `(m, q)` coordinates of a canonical Schur basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchurIndex {
    pub m: usize,
    pub q: usize,
}

impl SchurIndex {
    pub fn new(irrep: &IrrepLabel, q: usize) -> Result<Self> {
        if q >= irrep.d {
            return Err(Error::InvalidDimensionLabel { q, d: irrep.d });
        }
        Ok(Self { m: irrep.m, q })
    }

    pub fn hamming(&self) -> usize {
        self.q + self.m
    }
}

/// Pauli counts `(k_X, k_Y, k_Z)` of a symmetrized Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WeightVector {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl WeightVector {
    pub const IDENTITY: WeightVector = WeightVector { x: 0, y: 0, z: 0 };

    pub fn new(x: usize, y: usize, z: usize) -> Self {
        Self { x, y, z }
    }

    pub fn k(&self) -> usize {
        self.x + self.y + self.z
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.x, self.y, self.z]
    }

    /// Parity class index in `0..8`, bit 2 for X, bit 1 for Y, bit 0 for Z.
    pub fn parity_class(&self) -> usize {
        ((self.x & 1) << 2) | ((self.y & 1) << 1) | (self.z & 1)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.x, self.y, self.z)
    }
}

/// All irreps for `n` qubits, ascending in `m`.
pub fn enumerate_irreps(n: usize) -> Result<Vec<IrrepLabel>> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n));
    }
    (0..=n / 2).map(|m| IrrepLabel::new(n, m)).collect()
}

/// Dimension of the commutant, `C(n+3, 3)`.
pub fn commutant_dim(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n));
    }
    Ok((n + 3) * (n + 2) * (n + 1) / 6)
}

/// Weight vectors with `k <= k_max`, ordered by `(k, k_X, k_Y)`.
pub fn enumerate_weight_vectors(n: usize, k_max: usize) -> Result<Vec<WeightVector>> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n));
    }
    if k_max > n {
        return Err(Error::LocalityTooLarge { k: k_max, n });
    }
    let mut out = Vec::new();
    for k in 0..=k_max {
        for x in 0..=k {
            for y in 0..=k - x {
                out.push(WeightVector::new(x, y, k - x - y));
            }
        }
    }
    Ok(out)
}

pub fn binomial_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `n!(n-2m+1)! / ((n-m+1)! m! (n-2m)!)`, i.e. `C(n,m)(n-2m+1)/(n-m+1)`.
fn multiplicity(n: usize, m: usize) -> BigUint {
    binomial_big(n, m) * (n - 2 * m + 1) / (n - m + 1)
}

/// Table of `ln(t!)`.
#[derive(Debug, Clone)]
pub struct LogFactorials {
    table: Vec<f64>,
}

impl LogFactorials {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        table.push(0.0);
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for t in 1..=max {
            // compensated summation keeps the table accurate to a few ulps
            let y = (t as f64).ln() - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
            table.push(sum);
        }
        Self { table }
    }

    pub fn max(&self) -> usize {
        self.table.len() - 1
    }

    #[inline]
    pub fn get(&self, t: usize) -> f64 {
        self.table[t]
    }

    #[inline]
    pub fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        self.table[n] - self.table[k] - self.table[n - k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn n4_matches_table() {
        let irreps = enumerate_irreps(4).unwrap();
        let got: Vec<(usize, usize, u64)> = irreps
            .iter()
            .map(|l| (l.m, l.d, l.mult.to_u64().unwrap()))
            .collect();
        assert_eq!(got, vec![(0, 5, 1), (1, 3, 3), (2, 1, 2)]);
    }

    #[test]
    fn n1_single_irrep() {
        let irreps = enumerate_irreps(1).unwrap();
        assert_eq!(irreps.len(), 1);
        assert_eq!((irreps[0].d, irreps[0].mult.to_u64()), (2, Some(1)));
    }

    #[test]
    fn zero_rejected() {
        assert!(enumerate_irreps(0).is_err());
        assert!(commutant_dim(0).is_err());
    }

    #[test]
    fn dimension_sum_is_full_space() {
        for n in 1..=64usize {
            let total = enumerate_irreps(n)
                .unwrap()
                .iter()
                .fold(BigUint::zero(), |acc, l| acc + &l.mult * l.d);
            assert_eq!(total, BigUint::one() << n, "n={n}");
        }
    }

    #[test]
    fn commutant_counts() {
        assert_eq!(commutant_dim(4).unwrap(), 35);
        assert_eq!(commutant_dim(1).unwrap(), 4);
        for n in 1..=20 {
            assert_eq!(
                enumerate_weight_vectors(n, n).unwrap().len(),
                commutant_dim(n).unwrap()
            );
        }
    }

    #[test]
    fn weight_vector_order() {
        assert_eq!(
            enumerate_weight_vectors(3, 0).unwrap(),
            vec![WeightVector::IDENTITY]
        );
        let w = enumerate_weight_vectors(3, 2).unwrap();
        assert_eq!(w.len(), 10);
        assert_eq!(w[1], WeightVector::new(0, 0, 1));
        assert_eq!(w[3], WeightVector::new(1, 0, 0));
        assert!(enumerate_weight_vectors(3, 4).is_err());
    }

    #[test]
    fn log_factorials() {
        let lf = LogFactorials::new(2048);
        assert!((lf.get(5) - 120f64.ln()).abs() < 1e-14);
        assert!((lf.ln_binomial(10, 3) - 120f64.ln()).abs() < 1e-13);
    }
}
