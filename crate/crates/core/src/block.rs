//! Per-irrep block matrices and block-diagonal operators.

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::schur::{enumerate_irreps, IrrepLabel, WeightVector};
use crate::C64;

/// Sparsity pattern of a block, used to pick the eigensolver path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Diagonal,
    AntiDiagonal,
    Banded(usize),
    Dense,
}

#[derive(Debug, Clone)]
enum Storage {
    /// Entry `(i, j)` with `|i - j| <= b` lives at `(j - i + b) * d + i`.
    Band { b: usize, data: Vec<C64> },
    Dense(DMatrix<C64>),
}

/// Matrix of an equivariant operator restricted to one irrep, in the
/// canonical Schur basis ordered by `q`.
#[derive(Debug, Clone)]
pub struct BlockMatrix {
    irrep: IrrepLabel,
    storage: Storage,
    hint: Structure,
}

impl BlockMatrix {
    pub fn zeros_banded(irrep: IrrepLabel, b: usize) -> Self {
        let d = irrep.d;
        let b = b.min(d - 1);
        let hint = if b == 0 {
            Structure::Diagonal
        } else {
            Structure::Banded(b)
        };
        Self {
            irrep,
            storage: Storage::Band {
                b,
                data: vec![C64::zero(); (2 * b + 1) * d],
            },
            hint,
        }
    }

    pub fn identity(irrep: IrrepLabel) -> Self {
        let mut out = Self::zeros_banded(irrep, 0);
        for i in 0..out.dim() {
            out.set(i, i, C64::new(1.0, 0.0));
        }
        out
    }

    pub fn from_dense(irrep: IrrepLabel, matrix: DMatrix<C64>, hint: Structure) -> Result<Self> {
        if matrix.nrows() != irrep.d || matrix.ncols() != irrep.d {
            return Err(Error::BlockShape {
                m: irrep.m,
                got: matrix.nrows().max(matrix.ncols()),
                expected: irrep.d,
            });
        }
        Ok(Self {
            irrep,
            storage: Storage::Dense(matrix),
            hint,
        })
    }

    pub fn from_diagonal(irrep: IrrepLabel, diag: &[C64]) -> Self {
        let mut out = Self::zeros_banded(irrep, 0);
        for (i, &v) in diag.iter().enumerate() {
            out.set(i, i, v);
        }
        out
    }

    pub fn irrep(&self) -> &IrrepLabel {
        &self.irrep
    }

    pub fn dim(&self) -> usize {
        self.irrep.d
    }

    pub fn structure(&self) -> Structure {
        self.hint
    }

    /// Stored bandwidth for banded storage, `None` for dense storage.
    pub fn band(&self) -> Option<usize> {
        match &self.storage {
            Storage::Band { b, .. } => Some(*b),
            Storage::Dense(_) => None,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        match &self.storage {
            Storage::Band { b, data } => {
                let off = j as isize - i as isize;
                if off.unsigned_abs() > *b {
                    C64::zero()
                } else {
                    data[(off + *b as isize) as usize * self.irrep.d + i]
                }
            }
            Storage::Dense(m) => m[(i, j)],
        }
    }

    /// Panics when writing outside the band of banded storage.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        let d = self.irrep.d;
        match &mut self.storage {
            Storage::Band { b, data } => {
                let off = j as isize - i as isize;
                assert!(off.unsigned_abs() <= *b, "entry ({i},{j}) outside band {b}");
                data[(off + *b as isize) as usize * d + i] = v;
            }
            Storage::Dense(m) => m[(i, j)] = v,
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Band { .. } => {
                let d = self.dim();
                DMatrix::from_fn(d, d, |i, j| self.get(i, j))
            }
        }
    }

    pub fn into_dense(self) -> DMatrix<C64> {
        match self.storage {
            Storage::Dense(m) => m,
            Storage::Band { .. } => self.to_dense(),
        }
    }

    /// Visits every stored entry that may be nonzero.
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, C64)) {
        let d = self.dim();
        match &self.storage {
            Storage::Band { b, data } => {
                let b = *b as isize;
                for off in -b..=b {
                    let row = &data[(off + b) as usize * d..(off + b + 1) as usize * d];
                    for (i, &v) in row.iter().enumerate() {
                        let j = i as isize + off;
                        if j >= 0 && (j as usize) < d {
                            f(i, j as usize, v);
                        }
                    }
                }
            }
            Storage::Dense(m) => {
                for j in 0..d {
                    for i in 0..d {
                        f(i, j, m[(i, j)]);
                    }
                }
            }
        }
    }

    /// Largest `|i - j|` over entries with modulus above `tol`.
    pub fn numerical_bandwidth(&self, tol: f64) -> usize {
        let mut bw = 0;
        self.for_each_entry(|i, j, v| {
            if v.norm() > tol {
                bw = bw.max(i.abs_diff(j));
            }
        });
        bw
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        self.for_each_entry(|i, j, v| {
            dev = dev.max((v - self.get(j, i).conj()).norm());
        });
        dev
    }

    pub fn is_real(&self) -> bool {
        let mut real = true;
        self.for_each_entry(|_, _, v| real &= v.im == 0.0);
        real
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let d = self.dim();
        assert_eq!(x.len(), d);
        let mut y = vec![C64::zero(); d];
        match &self.storage {
            Storage::Dense(m) => {
                for j in 0..d {
                    let xj = x[j];
                    for i in 0..d {
                        y[i] += m[(i, j)] * xj;
                    }
                }
            }
            Storage::Band { .. } => self.for_each_entry(|i, j, v| y[i] += v * x[j]),
        }
        y
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `tr(self * other)`.
    pub fn trace_product(&self, other: &BlockMatrix) -> C64 {
        let mut acc = C64::zero();
        self.for_each_entry(|i, j, v| {
            if v != C64::zero() {
                acc += v * other.get(j, i);
            }
        });
        acc
    }

    pub fn frobenius_sq(&self) -> f64 {
        let mut acc = 0.0;
        self.for_each_entry(|_, _, v| acc += v.norm_sqr());
        acc
    }

    pub fn max_abs_diff(&self, other: &BlockMatrix) -> f64 {
        let d = self.dim();
        let mut dev = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                dev = dev.max((self.get(i, j) - other.get(i, j)).norm());
            }
        }
        dev
    }

    pub fn max_abs_diff_dense(&self, other: &DMatrix<C64>) -> f64 {
        let d = self.dim();
        let mut dev = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                dev = dev.max((self.get(i, j) - other[(i, j)]).norm());
            }
        }
        dev
    }

    pub fn scale(&mut self, c: C64) {
        match &mut self.storage {
            Storage::Band { data, .. } => data.iter_mut().for_each(|v| *v *= c),
            Storage::Dense(m) => *m *= c,
        }
    }

    /// Entrywise linear combination of blocks of the same irrep.
    pub fn linear_combination(terms: &[(f64, &BlockMatrix)]) -> Result<BlockMatrix> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?
            .1;
        let irrep = first.irrep.clone();
        for (_, t) in terms {
            if t.irrep.n != irrep.n || t.irrep.m != irrep.m {
                return Err(Error::QubitMismatch(t.irrep.n, irrep.n));
            }
        }
        let all_banded = terms.iter().all(|(_, t)| t.band().is_some());
        let mut out = if all_banded {
            let b = terms.iter().map(|(_, t)| t.band().unwrap()).max().unwrap();
            BlockMatrix::zeros_banded(irrep, b)
        } else {
            let d = irrep.d;
            BlockMatrix {
                irrep,
                storage: Storage::Dense(DMatrix::zeros(d, d)),
                hint: Structure::Dense,
            }
        };
        for &(c, t) in terms {
            if c == 0.0 {
                continue;
            }
            t.for_each_entry(|i, j, v| {
                if v != C64::zero() {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + v * c);
                }
            });
        }
        if !all_banded {
            out.hint = merge_hints(terms.iter().map(|(_, t)| t.hint));
        }
        Ok(out)
    }
}

fn merge_hints(hints: impl Iterator<Item = Structure>) -> Structure {
    let mut out: Option<Structure> = None;
    for h in hints {
        out = Some(match (out, h) {
            (None, h) => h,
            (Some(a), b) if a == b => a,
            _ => Structure::Dense,
        });
    }
    out.unwrap_or(Structure::Dense)
}

/// Normalized equivariant generator and observable kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    SumX,
    SumY,
    SumZ,
    SumXX,
    SumYY,
    SumZZ,
    GlobalX,
    GlobalY,
    GlobalZ,
    TwoLocal(Pauli, Pauli),
    KLocal(WeightVector),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> [[C64; 2]; 2] {
        let o = C64::zero();
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }
}

impl GeneratorKind {
    /// The generator and observable set used throughout: one-body sums,
    /// two-body sums and global strings.
    pub const STANDARD: [GeneratorKind; 9] = [
        GeneratorKind::SumX,
        GeneratorKind::SumY,
        GeneratorKind::SumZ,
        GeneratorKind::SumXX,
        GeneratorKind::SumYY,
        GeneratorKind::SumZZ,
        GeneratorKind::GlobalX,
        GeneratorKind::GlobalY,
        GeneratorKind::GlobalZ,
    ];

    /// Pauli counts of the string whose twirl this kind is proportional to.
    pub fn weight_vector(&self, n: usize) -> WeightVector {
        use GeneratorKind::*;
        match *self {
            SumX => WeightVector::new(1, 0, 0),
            SumY => WeightVector::new(0, 1, 0),
            SumZ => WeightVector::new(0, 0, 1),
            SumXX => WeightVector::new(2, 0, 0),
            SumYY => WeightVector::new(0, 2, 0),
            SumZZ => WeightVector::new(0, 0, 2),
            GlobalX => WeightVector::new(n, 0, 0),
            GlobalY => WeightVector::new(0, n, 0),
            GlobalZ => WeightVector::new(0, 0, n),
            TwoLocal(p, q) => {
                let mut w = WeightVector::IDENTITY;
                for s in [p, q] {
                    match s {
                        Pauli::I => {}
                        Pauli::X => w.x += 1,
                        Pauli::Y => w.y += 1,
                        Pauli::Z => w.z += 1,
                    }
                }
                w
            }
            KLocal(w) => w,
        }
    }

    /// Coefficient multiplying the plain sum of Pauli strings.
    pub fn normalization(&self, n: usize) -> f64 {
        use GeneratorKind::*;
        match self {
            SumX | SumY | SumZ => 1.0 / n as f64,
            SumXX | SumYY | SumZZ => 2.0 / (n as f64 * (n as f64 - 1.0)),
            GlobalX | GlobalY | GlobalZ => 1.0,
            TwoLocal(..) | KLocal(_) => twirl_prefactor(n, self.weight_vector(n)),
        }
    }

    /// Ratio between this kind's normalization and the twirl of its string.
    pub fn twirl_ratio(&self, n: usize) -> f64 {
        self.normalization(n) / twirl_prefactor(n, self.weight_vector(n))
    }

    pub fn min_qubits(&self) -> usize {
        use GeneratorKind::*;
        match self {
            SumXX | SumYY | SumZZ => 2,
            TwoLocal(p, q) if *p != Pauli::I && *q != Pauli::I => 2,
            KLocal(w) => w.k().max(1),
            _ => 1,
        }
    }

    pub fn name(&self) -> String {
        use GeneratorKind::*;
        match self {
            SumX => "sum-x".into(),
            SumY => "sum-y".into(),
            SumZ => "sum-z".into(),
            SumXX => "sum-xx".into(),
            SumYY => "sum-yy".into(),
            SumZZ => "sum-zz".into(),
            GlobalX => "global-x".into(),
            GlobalY => "global-y".into(),
            GlobalZ => "global-z".into(),
            TwoLocal(p, q) => format!("two-local-{p:?}{q:?}").to_lowercase(),
            KLocal(w) => format!("k-local-{}-{}-{}", w.x, w.y, w.z),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        use GeneratorKind::*;
        let kind = match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "sum-x" => SumX,
            "sum-y" => SumY,
            "sum-z" => SumZ,
            "sum-xx" => SumXX,
            "sum-yy" => SumYY,
            "sum-zz" => SumZZ,
            "global-x" => GlobalX,
            "global-y" => GlobalY,
            "global-z" => GlobalZ,
            other => {
                let rest = other.strip_prefix("two-local-")?;
                let mut chars = rest.chars();
                let p = parse_pauli(chars.next()?)?;
                let q = parse_pauli(chars.next()?)?;
                if chars.next().is_some() {
                    return None;
                }
                TwoLocal(p, q)
            }
        };
        Some(kind)
    }
}

fn parse_pauli(c: char) -> Option<Pauli> {
    match c.to_ascii_lowercase() {
        'i' => Some(Pauli::I),
        'x' => Some(Pauli::X),
        'y' => Some(Pauli::Y),
        'z' => Some(Pauli::Z),
        _ => None,
    }
}

/// `k_X! k_Y! k_Z! (n-k)! / n!`, the inverse number of distinct placements.
pub fn twirl_prefactor(n: usize, w: WeightVector) -> f64 {
    let lf = crate::schur::LogFactorials::new(n);
    (lf.get(w.x) + lf.get(w.y) + lf.get(w.z) + lf.get(n - w.k()) - lf.get(n)).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    ClosedForm(GeneratorKind),
    Algorithm1(WeightVector),
    Composite,
}

/// Block-diagonal representation of an equivariant operator, one block
/// per irrep, indexed by `m`.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    n: usize,
    blocks: Vec<BlockMatrix>,
    provenance: Provenance,
}

impl BlockOperator {
    pub fn new(n: usize, blocks: Vec<BlockMatrix>, provenance: Provenance) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidQubitCount(n));
        }
        if blocks.len() != n / 2 + 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} blocks, got {}",
                n / 2 + 1,
                blocks.len()
            )));
        }
        for (m, b) in blocks.iter().enumerate() {
            if b.irrep.n != n {
                return Err(Error::QubitMismatch(b.irrep.n, n));
            }
            if b.irrep.m != m || b.dim() != n - 2 * m + 1 {
                return Err(Error::BlockShape {
                    m,
                    got: b.dim(),
                    expected: n - 2 * m + 1,
                });
            }
        }
        Ok(Self {
            n,
            blocks,
            provenance,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let blocks = enumerate_irreps(n)?
            .into_iter()
            .map(BlockMatrix::identity)
            .collect();
        Self::new(n, blocks, Provenance::Algorithm1(WeightVector::IDENTITY))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[BlockMatrix] {
        &self.blocks
    }

    pub fn block(&self, m: usize) -> &BlockMatrix {
        &self.blocks[m]
    }

    pub fn blocks_mut(&mut self) -> &mut [BlockMatrix] {
        &mut self.blocks
    }

    pub fn into_blocks(self) -> Vec<BlockMatrix> {
        self.blocks
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.blocks
            .iter()
            .map(BlockMatrix::hermitian_deviation)
            .fold(0.0, f64::max)
    }

    /// Squared Frobenius norm on the full `2^n` space.
    pub fn frobenius_sq(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.irrep.mult_f64() * b.frobenius_sq())
            .sum()
    }

    /// Trace on the full `2^n` space.
    pub fn full_trace(&self) -> C64 {
        self.blocks
            .iter()
            .map(|b| b.trace() * b.irrep.mult_f64())
            .sum()
    }

    pub fn max_abs_diff(&self, other: &BlockOperator) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: C64) -> BlockOperator {
        let mut out = self.clone();
        out.blocks.iter_mut().for_each(|b| b.scale(c));
        out.provenance = Provenance::Composite;
        out
    }
}

/// Entrywise linear combination of block operators sharing `n`.
pub fn compose(terms: &[(f64, &BlockOperator)]) -> Result<BlockOperator> {
    let first = terms
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty composition".into()))?
        .1;
    let n = first.n;
    if let Some((_, bad)) = terms.iter().find(|(_, t)| t.n != n) {
        return Err(Error::QubitMismatch(bad.n, n));
    }
    let blocks = (0..first.blocks.len())
        .map(|m| {
            let parts: Vec<(f64, &BlockMatrix)> =
                terms.iter().map(|(c, t)| (*c, &t.blocks[m])).collect();
            BlockMatrix::linear_combination(&parts)
        })
        .collect::<Result<Vec<_>>>()?;
    let provenance = if terms.len() == 1 && terms[0].0 == 1.0 {
        first.provenance.clone()
    } else {
        Provenance::Composite
    };
    BlockOperator::new(n, blocks, provenance)
}
