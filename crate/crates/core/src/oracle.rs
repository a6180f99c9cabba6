//! Brute-force dense reference on the full `2^n` space.
//!
//! Qubit 1 is the most significant bit of a basis index. Everything here
//! is exponential in `n` and guarded by [`MAX_QUBITS`].

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use crate::block::{GeneratorKind, Pauli};
use crate::error::{Error, Result};
use crate::linalg::eigh_dense;
use crate::schur::{binomial_big, WeightVector};
use crate::C64;

pub const MAX_QUBITS: usize = 8;

pub type DenseOperator = DMatrix<C64>;
pub type DenseVector = DVector<C64>;
/// Layers `(H, t)` of a dense circuit, first layer first.
pub type DenseCircuit = Vec<(DenseOperator, f64)>;

/// Dense reference for a fixed qubit count.
#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    n: usize,
}

impl Oracle {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::OracleGuard { n, max: MAX_QUBITS });
        }
        Self::new_unguarded(n)
    }

    /// Skips the size guard. Memory and time grow as `4^n` and `n! 4^n`.
    pub fn new_unguarded(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidQubitCount(n));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Bit of qubit `j` (0-based, qubit 0 most significant).
    #[inline]
    fn bit(&self, x: usize, j: usize) -> usize {
        (x >> (self.n - 1 - j)) & 1
    }

    /// Basis index map of `R(sigma)`, with `sigma[i]` the image of `i`.
    pub fn permutation_action(&self, sigma: &[usize]) -> Result<Vec<usize>> {
        check_permutation(sigma, self.n)?;
        let n = self.n;
        Ok((0..self.dim())
            .map(|x| {
                // bit at position j moves to position sigma(j)
                (0..n).fold(0, |acc, j| acc | (self.bit(x, j) << (n - 1 - sigma[j])))
            })
            .collect())
    }

    pub fn permutation_matrix(&self, sigma: &[usize]) -> Result<DenseOperator> {
        let map = self.permutation_action(sigma)?;
        let dim = self.dim();
        let mut r = DMatrix::zeros(dim, dim);
        for (x, &y) in map.iter().enumerate() {
            r[(y, x)] = C64::new(1.0, 0.0);
        }
        Ok(r)
    }

    /// `(1/n!) sum_sigma R(sigma) A R(sigma)^dagger`.
    pub fn twirl(&self, a: &DenseOperator) -> Result<DenseOperator> {
        self.check_operator(a)?;
        let dim = self.dim();
        let mut out = DMatrix::<C64>::zeros(dim, dim);
        let mut count = 0usize;
        let mut err = None;
        for_each_permutation(self.n, |sigma| {
            match self.permutation_action(sigma) {
                Ok(map) => {
                    for y in 0..dim {
                        let py = map[y];
                        for x in 0..dim {
                            out[(map[x], py)] += a[(x, y)];
                        }
                    }
                }
                Err(e) => err = Some(e),
            }
            count += 1;
        });
        if let Some(e) = err {
            return Err(e);
        }
        Ok(out / C64::new(count as f64, 0.0))
    }

    /// Dense Pauli string, one factor per qubit.
    pub fn pauli_string(&self, paulis: &[Pauli]) -> Result<DenseOperator> {
        if paulis.len() != self.n {
            return Err(Error::QubitMismatch(paulis.len(), self.n));
        }
        let dim = self.dim();
        let mut out = DMatrix::zeros(dim, dim);
        self.add_pauli_string(&mut out, paulis, C64::new(1.0, 0.0));
        Ok(out)
    }

    fn add_pauli_string(&self, out: &mut DenseOperator, paulis: &[Pauli], coeff: C64) {
        let n = self.n;
        let mut flip = 0usize;
        for (j, p) in paulis.iter().enumerate() {
            if matches!(p, Pauli::X | Pauli::Y) {
                flip |= 1 << (n - 1 - j);
            }
        }
        for x in 0..self.dim() {
            let mut amp = coeff;
            for (j, p) in paulis.iter().enumerate() {
                let b = self.bit(x, j);
                match (p, b) {
                    (Pauli::Y, 0) => amp *= C64::new(0.0, 1.0),
                    (Pauli::Y, _) => amp *= C64::new(0.0, -1.0),
                    (Pauli::Z, 1) => amp = -amp,
                    _ => {}
                }
            }
            out[(x ^ flip, x)] += amp;
        }
    }

    /// Average over all distinct placements of a string with the given
    /// Pauli counts, built by enumeration rather than twirling.
    pub fn symmetrized_pauli(&self, w: WeightVector) -> Result<DenseOperator> {
        let n = self.n;
        if w.k() > n {
            return Err(Error::LocalityTooLarge { k: w.k(), n });
        }
        let dim = self.dim();
        let mut out = DMatrix::zeros(dim, dim);
        let mut count = 0usize;
        let mut string = vec![Pauli::I; n];
        let total = 4usize.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut counts = [0usize; 3];
            for s in string.iter_mut() {
                *s = Pauli::ALL[c & 3];
                c >>= 2;
                match s {
                    Pauli::X => counts[0] += 1,
                    Pauli::Y => counts[1] += 1,
                    Pauli::Z => counts[2] += 1,
                    Pauli::I => {}
                }
            }
            if counts == w.as_array() {
                self.add_pauli_string(&mut out, &string, C64::new(1.0, 0.0));
                count += 1;
            }
        }
        Ok(out / C64::new(count as f64, 0.0))
    }

    /// Dense matrix of a normalized generator, built from explicit Pauli sums.
    pub fn generator(&self, kind: GeneratorKind) -> Result<DenseOperator> {
        let n = self.n;
        if n < kind.min_qubits() {
            return Err(Error::TooFewQubits {
                what: "dense generator",
                min: kind.min_qubits(),
            });
        }
        let dim = self.dim();
        let mut out = DMatrix::zeros(dim, dim);
        use GeneratorKind::*;
        let one_body = |p: Pauli, out: &mut DenseOperator| {
            for i in 0..n {
                let mut s = vec![Pauli::I; n];
                s[i] = p;
                self.add_pauli_string(out, &s, C64::new(1.0 / n as f64, 0.0));
            }
        };
        let two_body = |p: Pauli, out: &mut DenseOperator| {
            let c = 2.0 / (n as f64 * (n as f64 - 1.0));
            for i in 0..n {
                for j in i + 1..n {
                    let mut s = vec![Pauli::I; n];
                    s[i] = p;
                    s[j] = p;
                    self.add_pauli_string(out, &s, C64::new(c, 0.0));
                }
            }
        };
        match kind {
            SumX => one_body(Pauli::X, &mut out),
            SumY => one_body(Pauli::Y, &mut out),
            SumZ => one_body(Pauli::Z, &mut out),
            SumXX => two_body(Pauli::X, &mut out),
            SumYY => two_body(Pauli::Y, &mut out),
            SumZZ => two_body(Pauli::Z, &mut out),
            GlobalX => self.add_pauli_string(&mut out, &vec![Pauli::X; n], C64::new(1.0, 0.0)),
            GlobalY => self.add_pauli_string(&mut out, &vec![Pauli::Y; n], C64::new(1.0, 0.0)),
            GlobalZ => self.add_pauli_string(&mut out, &vec![Pauli::Z; n], C64::new(1.0, 0.0)),
            TwoLocal(..) | KLocal(_) => return self.symmetrized_pauli(kind.weight_vector(n)),
        }
        Ok(out)
    }

    /// Singlets on qubit pairs `(1,2), ..., (2m-1,2m)` times the Dicke state
    /// of weight `q` on the remaining qubits.
    pub fn canonical_schur_vector(&self, m: usize, q: usize) -> Result<DenseVector> {
        let n = self.n;
        if 2 * m > n {
            return Err(Error::InvalidIrrep { n, m });
        }
        let rest = n - 2 * m;
        if q > rest {
            return Err(Error::InvalidDimensionLabel { q, d: rest + 1 });
        }
        let mut v = DVector::zeros(self.dim());
        let norm = 2f64.powi(m as i32).sqrt()
            * num_traits::ToPrimitive::to_f64(&binomial_big(rest, q))
                .unwrap_or(f64::INFINITY)
                .sqrt();
        for x in 0..self.dim() {
            let mut amp = 1.0;
            for pair in 0..m {
                match (self.bit(x, 2 * pair), self.bit(x, 2 * pair + 1)) {
                    (0, 1) => {}
                    (1, 0) => amp = -amp,
                    _ => {
                        amp = 0.0;
                        break;
                    }
                }
            }
            if amp == 0.0 {
                continue;
            }
            let weight: usize = (2 * m..n).map(|j| self.bit(x, j)).sum();
            if weight == q {
                v[x] = C64::new(amp / norm, 0.0);
            }
        }
        Ok(v)
    }

    /// `(A_lambda)_{q,q'} = <m,q|A|m,q'>` on the canonical multiplicity copy.
    pub fn project_block(&self, a: &DenseOperator, m: usize) -> Result<DMatrix<C64>> {
        self.check_operator(a)?;
        let vs = self.schur_basis(m)?;
        Ok(vs.adjoint() * (a * &vs))
    }

    /// Columns are the canonical Schur vectors of irrep `m`, ordered by `q`.
    pub fn schur_basis(&self, m: usize) -> Result<DMatrix<C64>> {
        if 2 * m > self.n {
            return Err(Error::InvalidIrrep { n: self.n, m });
        }
        let d = self.n - 2 * m + 1;
        let mut vs = DMatrix::zeros(self.dim(), d);
        for q in 0..d {
            vs.set_column(q, &self.canonical_schur_vector(m, q)?);
        }
        Ok(vs)
    }

    pub fn basis_state(&self, x: usize) -> DenseVector {
        let mut v = DVector::zeros(self.dim());
        v[x] = C64::new(1.0, 0.0);
        v
    }

    pub fn all_plus(&self) -> DenseVector {
        let dim = self.dim();
        DVector::from_element(dim, C64::new(1.0 / (dim as f64).sqrt(), 0.0))
    }

    /// `exp(-i t H)` through the Hermitian eigendecomposition.
    pub fn expm(&self, h: &DenseOperator, t: f64) -> Result<DenseOperator> {
        self.check_operator(h)?;
        let e = eigh_dense(h)?;
        let phases = DVector::from_iterator(
            e.values.len(),
            e.values.iter().map(|&l| C64::from_polar(1.0, -l * t)),
        );
        Ok(&e.vectors * DMatrix::from_diagonal(&phases) * e.vectors.adjoint())
    }

    /// `U = U_L ... U_1` for layers `(H_l, t_l)`, layer 1 acting first.
    pub fn circuit_unitary(&self, layers: &[(DenseOperator, f64)]) -> Result<DenseOperator> {
        let mut u = DMatrix::identity(self.dim(), self.dim());
        for (h, t) in layers {
            u = self.expm(h, *t)? * u;
        }
        Ok(u)
    }

    /// `Tr[U rho U^dagger O]`, asserting a real result.
    pub fn dense_expectation(
        &self,
        layers: &[(DenseOperator, f64)],
        rho: &DenseOperator,
        obs: &DenseOperator,
    ) -> Result<f64> {
        self.check_operator(rho)?;
        self.check_operator(obs)?;
        let u = self.circuit_unitary(layers)?;
        let evolved = &u * rho * u.adjoint();
        let val = (evolved * obs).trace();
        if val.im.abs() > 1e-10 {
            return Err(Error::ImaginaryResidue(val.im));
        }
        Ok(val.re)
    }

    /// Reduced state of qubits 1 and 2.
    pub fn partial_trace_two(&self, rho: &DenseOperator) -> Result<DMatrix<C64>> {
        self.check_operator(rho)?;
        if self.n < 2 {
            return Err(Error::TooFewQubits {
                what: "two-qubit partial trace",
                min: 2,
            });
        }
        let rest = 1usize << (self.n - 2);
        let mut out = DMatrix::zeros(4, 4);
        for a in 0..4 {
            for b in 0..4 {
                let mut acc = C64::zero();
                for r in 0..rest {
                    acc += rho[(a * rest + r, b * rest + r)];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(out)
    }

    fn check_operator(&self, a: &DenseOperator) -> Result<()> {
        let dim = self.dim();
        if a.nrows() != dim || a.ncols() != dim {
            return Err(Error::InvalidParameter(format!(
                "dense operator of size {}x{} for n={}",
                a.nrows(),
                a.ncols(),
                self.n
            )));
        }
        Ok(())
    }
}

fn check_permutation(sigma: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if sigma.len() != n {
        return Err(Error::InvalidParameter("permutation length".into()));
    }
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(Error::InvalidParameter(format!("not a permutation: {sigma:?}")));
        }
        seen[s] = true;
    }
    Ok(())
}

/// Visits all permutations of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// `sigma o tau`.
pub fn compose_permutations(sigma: &[usize], tau: &[usize]) -> Vec<usize> {
    tau.iter().map(|&t| sigma[t]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard() {
        assert!(Oracle::new(9).is_err());
        assert!(Oracle::new_unguarded(9).is_ok());
    }

    #[test]
    fn swap_moves_bits() {
        let o = Oracle::new(2).unwrap();
        let r = o.permutation_matrix(&[1, 0]).unwrap();
        // |01> is index 1, |10> is index 2
        let v = &r * o.basis_state(1);
        assert_eq!(v[2], C64::new(1.0, 0.0));
    }

    #[test]
    fn permutation_count() {
        let mut count = 0;
        for_each_permutation(5, |_| count += 1);
        assert_eq!(count, 120);
    }

    #[test]
    fn table_vectors() {
        let o = Oracle::new(4).unwrap();
        let v = o.canonical_schur_vector(2, 0).unwrap();
        // (|01>-|10>)(|01>-|10>)/2: |0101>=5, |0110>=6, |1001>=9, |1010>=10
        for (x, s) in [(5, 0.5), (6, -0.5), (9, -0.5), (10, 0.5)] {
            assert!((v[x].re - s).abs() < 1e-15);
        }
        let v = o.canonical_schur_vector(1, 1).unwrap();
        // (|01>-|10>)(|01>+|10>)/2
        for (x, s) in [(5, 0.5), (6, 0.5), (9, -0.5), (10, -0.5)] {
            assert!((v[x].re - s).abs() < 1e-15);
        }
    }

    #[test]
    fn twirl_of_single_z() {
        let o = Oracle::new(3).unwrap();
        let z1 = o.pauli_string(&[Pauli::Z, Pauli::I, Pauli::I]).unwrap();
        let t = o.twirl(&z1).unwrap();
        let want = o.generator(GeneratorKind::SumZ).unwrap();
        assert!((t - want).camax() < 1e-14);
    }

    #[test]
    fn partial_trace_of_singlet() {
        let o = Oracle::new(3).unwrap();
        let v = o.canonical_schur_vector(1, 0).unwrap();
        let rho = &v * v.adjoint();
        let r = o.partial_trace_two(&rho).unwrap();
        assert!((r[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!((r[(1, 2)].re + 0.5).abs() < 1e-15);
    }
}
