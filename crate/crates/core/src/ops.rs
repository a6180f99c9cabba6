//! Block matrices of equivariant operators: closed forms for one-body,
//! two-body and global Pauli sums, and the combinatorial column
//! algorithm for arbitrary symmetrized Pauli strings.

use nalgebra::DMatrix;

use crate::block::{BlockMatrix, BlockOperator, GeneratorKind, Provenance, Structure};
use crate::error::{Error, Result};
use crate::schur::{enumerate_irreps, IrrepLabel, LogFactorials, WeightVector};
use crate::C64;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `i^p` for integer `p`.
fn i_pow(p: usize) -> C64 {
    match p % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

fn sign(p: usize) -> f64 {
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Ladder coefficient `sqrt((q+1)(N-q))` taking weight `q` to `q+1`
/// inside a Dicke register of `N` qubits.
fn alpha_plus(q: usize, nn: usize) -> f64 {
    if q >= nn {
        0.0
    } else {
        (((q + 1) * (nn - q)) as f64).sqrt()
    }
}

/// Exact block of a normalized generator kind. `TwoLocal` and `KLocal`
/// are delegated to [`symmetrized_pauli_block`].
pub fn closed_form_block(kind: GeneratorKind, n: usize, irrep: &IrrepLabel) -> Result<BlockMatrix> {
    if irrep.n != n {
        return Err(Error::QubitMismatch(irrep.n, n));
    }
    if n < kind.min_qubits() {
        return Err(Error::TooFewQubits {
            what: "two-body generator",
            min: kind.min_qubits(),
        });
    }
    let m = irrep.m;
    let nn = n - 2 * m;
    let d = irrep.d;
    let nf = n as f64;
    use GeneratorKind::*;
    let block = match kind {
        SumZ => {
            let diag: Vec<C64> = (0..d)
                .map(|q| real(1.0 - 2.0 * (q + m) as f64 / nf))
                .collect();
            BlockMatrix::from_diagonal(irrep.clone(), &diag)
        }
        SumZZ => {
            let diag: Vec<C64> = (0..d)
                .map(|q| {
                    let h = (q + m) as f64;
                    real((nf * nf - nf - 4.0 * nf * h + 4.0 * h * h) / (nf * (nf - 1.0)))
                })
                .collect();
            BlockMatrix::from_diagonal(irrep.clone(), &diag)
        }
        GlobalZ => {
            let diag: Vec<C64> = (0..d).map(|q| real(sign(q + m))).collect();
            BlockMatrix::from_diagonal(irrep.clone(), &diag)
        }
        SumX | SumY => {
            let mut b = BlockMatrix::zeros_banded(irrep.clone(), 1);
            for q in 0..nn {
                let a = alpha_plus(q, nn) / nf;
                let (up, down) = if kind == SumX {
                    (real(a), real(a))
                } else {
                    (C64::new(0.0, a), C64::new(0.0, -a))
                };
                b.set(q + 1, q, up);
                b.set(q, q + 1, down);
            }
            b
        }
        SumXX | SumYY => {
            let norm = nf * (nf - 1.0);
            let flip = if kind == SumXX { 1.0 } else { -1.0 };
            let mut b = BlockMatrix::zeros_banded(irrep.clone(), 2);
            for q in 0..d {
                let diag = 2.0 * ((q * (nn - q)) as f64 - m as f64) / norm;
                b.set(q, q, real(diag));
                if q + 2 < d {
                    let v = flip * alpha_plus(q, nn) * alpha_plus(q + 1, nn) / norm;
                    b.set(q + 2, q, real(v));
                    b.set(q, q + 2, real(v));
                }
            }
            b
        }
        GlobalX | GlobalY => {
            let mut mat = DMatrix::zeros(d, d);
            for q in 0..d {
                // column q maps to row N - q
                let v = if kind == GlobalX {
                    real(sign(m))
                } else {
                    i_pow(n) * sign(q)
                };
                mat[(nn - q, q)] = v;
            }
            let hint = if d == 1 {
                Structure::Diagonal
            } else {
                Structure::AntiDiagonal
            };
            BlockMatrix::from_dense(irrep.clone(), mat, hint)?
        }
        TwoLocal(..) | KLocal(_) => {
            return symmetrized_pauli_block(n, kind.weight_vector(n), irrep);
        }
    };
    Ok(block)
}

/// Column evaluator for symmetrized Pauli strings with a shared
/// log-factorial table.
#[derive(Debug, Clone)]
pub struct PauliColumns {
    n: usize,
    lf: LogFactorials,
}

impl PauliColumns {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidQubitCount(n));
        }
        Ok(Self {
            n,
            lf: LogFactorials::new(2 * n + 1),
        })
    }

    /// Nonzero entries `(q', <q'|T(P_k)|q>)` of column `q`, ascending in `q'`.
    pub fn column(&self, w: WeightVector, irrep: &IrrepLabel, q: usize) -> Result<Vec<(usize, C64)>> {
        let mut out = Vec::new();
        self.column_into(w, irrep, q, &mut out)?;
        Ok(out)
    }

    fn column_into(
        &self,
        w: WeightVector,
        irrep: &IrrepLabel,
        q: usize,
        out: &mut Vec<(usize, C64)>,
    ) -> Result<()> {
        let n = self.n;
        if irrep.n != n {
            return Err(Error::QubitMismatch(irrep.n, n));
        }
        let k = w.k();
        if k > n {
            return Err(Error::LocalityTooLarge { k, n });
        }
        if q >= irrep.d {
            return Err(Error::InvalidDimensionLabel { q, d: irrep.d });
        }
        out.clear();
        let lf = &self.lf;
        let m = irrep.m;
        let nn = n - 2 * m;
        let zeros = nn - q;
        let ln_pref = lf.get(w.x) + lf.get(w.y) + lf.get(w.z) + lf.get(n - k) - lf.get(n);
        let ln_norm_q = lf.get(q) + lf.get(zeros);
        let ln_sym = lf.get(q) + lf.get(zeros);

        // q' ranges over [q - k, q + k]
        let lo = q.saturating_sub(k);
        let mut acc = vec![0.0f64; 2 * k + 1];

        for ax in 0..=m.min(w.x / 2) {
            for ay in 0..=(m - ax).min(w.y / 2) {
                for az in 0..=(m - ax - ay).min(w.z / 2) {
                    let a1 = ax + ay + az;
                    let ks = [w.x - 2 * ax, w.y - 2 * ay, w.z - 2 * az];
                    let ln_wa = lf.get(m) - lf.get(ax) - lf.get(ay) - lf.get(az) - lf.get(m - a1);
                    let sign_a = sign(ax + az);
                    let ks_total = ks[0] + ks[1] + ks[2];
                    for sx in 0..=q.min(ks[0]) {
                        for sy in 0..=(q - sx).min(ks[1]) {
                            for sz in 0..=(q - sx - sy).min(ks[2]) {
                                let s1 = sx + sy + sz;
                                // Paulis left for the |0> positions
                                let on_zeros = ks_total - s1;
                                if on_zeros > zeros {
                                    continue;
                                }
                                let qp = (q + ks[0] + ks[1]) as isize - 2 * (sx + sy) as isize;
                                if qp < 0 || qp as usize > nn {
                                    continue;
                                }
                                let qp = qp as usize;
                                let ln_w = ln_wa + ln_sym
                                    - lf.get(sx)
                                    - lf.get(sy)
                                    - lf.get(sz)
                                    - lf.get(q - s1)
                                    - lf.get(ks[0] - sx)
                                    - lf.get(ks[1] - sy)
                                    - lf.get(ks[2] - sz)
                                    - lf.get(zeros - on_zeros);
                                let ln_norm = 0.5 * (lf.get(qp) + lf.get(nn - qp) - ln_norm_q);
                                let v = sign_a * sign(sy + sz) * (ln_w + ln_pref + ln_norm).exp();
                                acc[qp - lo] += v;
                            }
                        }
                    }
                }
            }
        }
        let phase = i_pow(w.y);
        for (i, v) in acc.into_iter().enumerate() {
            if v != 0.0 {
                out.push((lo + i, phase * v));
            }
        }
        Ok(())
    }

    /// Full block of `T(P_k)` on one irrep, banded with bandwidth `k`.
    pub fn block(&self, w: WeightVector, irrep: &IrrepLabel) -> Result<BlockMatrix> {
        let mut b = BlockMatrix::zeros_banded(irrep.clone(), w.k());
        let mut col = Vec::with_capacity(2 * w.k() + 1);
        for q in 0..irrep.d {
            self.column_into(w, irrep, q, &mut col)?;
            for &(qp, v) in &col {
                b.set(qp, q, v);
            }
        }
        Ok(b)
    }

    /// `T(P_k)` on every irrep.
    pub fn operator(&self, w: WeightVector) -> Result<BlockOperator> {
        let blocks = enumerate_irreps(self.n)?
            .iter()
            .map(|ir| self.block(w, ir))
            .collect::<Result<Vec<_>>>()?;
        BlockOperator::new(self.n, blocks, Provenance::Algorithm1(w))
    }
}

/// Entries of column `q` of `T(P_k)` on `irrep`.
pub fn algorithm1_column(
    n: usize,
    w: WeightVector,
    irrep: &IrrepLabel,
    q: usize,
) -> Result<Vec<(usize, C64)>> {
    PauliColumns::new(n)?.column(w, irrep, q)
}

pub fn symmetrized_pauli_block(n: usize, w: WeightVector, irrep: &IrrepLabel) -> Result<BlockMatrix> {
    PauliColumns::new(n)?.block(w, irrep)
}

pub fn symmetrized_pauli_operator(n: usize, w: WeightVector) -> Result<BlockOperator> {
    PauliColumns::new(n)?.operator(w)
}

/// Block operator of a normalized generator kind on all irreps.
pub fn generator(kind: GeneratorKind, n: usize) -> Result<BlockOperator> {
    match kind {
        GeneratorKind::TwoLocal(..) | GeneratorKind::KLocal(_) => {
            let w = kind.weight_vector(n);
            if w.k() > n {
                return Err(Error::LocalityTooLarge { k: w.k(), n });
            }
            symmetrized_pauli_operator(n, w)
        }
        _ => {
            let blocks = enumerate_irreps(n)?
                .iter()
                .map(|ir| closed_form_block(kind, n, ir))
                .collect::<Result<Vec<_>>>()?;
            BlockOperator::new(n, blocks, Provenance::ClosedForm(kind))
        }
    }
}
