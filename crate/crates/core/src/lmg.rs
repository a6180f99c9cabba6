//! Digitized adiabatic preparation of Lipkin-Meshkov-Glick ground states
//! and their collective observables.

use nalgebra::{DMatrix, Matrix4};

use crate::block::{BlockMatrix, BlockOperator, GeneratorKind, Pauli};
use crate::error::{Error, Result};
use crate::evolution::{expectation, prepare_state, propagate_symmetric, SchurState, StateKind};
use crate::linalg::eigh_dense;
use crate::ops::{closed_form_block, generator, symmetrized_pauli_block, symmetrized_pauli_operator};
use crate::schur::{IrrepLabel, WeightVector};
use crate::{compose, C64};

/// `H = -(J/n) sum_{i<j} (X_i X_j + gamma Y_i Y_j) + h_z sum_i Z_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmgParams {
    pub j: f64,
    pub gamma: f64,
    pub hz: f64,
}

impl LmgParams {
    pub fn new(j: f64, gamma: f64, hz: f64) -> Result<Self> {
        if !(j.is_finite() && gamma.is_finite() && hz.is_finite()) {
            return Err(Error::InvalidParameter("LMG parameters must be finite".into()));
        }
        Ok(Self { j, gamma, hz })
    }

    /// Coefficients on the normalized `SumXX`, `SumYY` and `SumZ` generators.
    fn coefficients(&self, n: usize) -> [(f64, GeneratorKind); 3] {
        let pairs = (n as f64 - 1.0) / 2.0;
        [
            (-self.j * pairs, GeneratorKind::SumXX),
            (-self.j * self.gamma * pairs, GeneratorKind::SumYY),
            (self.hz * n as f64, GeneratorKind::SumZ),
        ]
    }
}

pub fn lmg_hamiltonian(params: LmgParams, n: usize) -> Result<BlockOperator> {
    if n < 2 {
        return Err(Error::TooFewQubits {
            what: "LMG Hamiltonian",
            min: 2,
        });
    }
    let ops = params
        .coefficients(n)
        .into_iter()
        .map(|(c, k)| Ok((c, generator(k, n)?)))
        .collect::<Result<Vec<_>>>()?;
    let terms: Vec<(f64, &BlockOperator)> = ops.iter().map(|(c, o)| (*c, o)).collect();
    compose(&terms)
}

/// Symmetric-sector block of the LMG Hamiltonian.
fn lmg_symmetric_block(params: LmgParams, n: usize) -> Result<BlockMatrix> {
    let irrep = IrrepLabel::new(n, 0)?;
    let blocks = params
        .coefficients(n)
        .into_iter()
        .map(|(c, k)| Ok((c, closed_form_block(k, n, &irrep)?)))
        .collect::<Result<Vec<_>>>()?;
    let terms: Vec<(f64, &BlockMatrix)> = blocks.iter().map(|(c, b)| (*c, b)).collect();
    BlockMatrix::linear_combination(&terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    Linear,
}

impl Schedule {
    pub fn s(&self, t: f64, total: f64) -> f64 {
        match self {
            Schedule::Linear => (t / total).clamp(0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleParams {
    pub total_time: f64,
    pub steps: usize,
    pub schedule: Schedule,
}

impl ScheduleParams {
    pub fn new(total_time: f64, steps: usize, schedule: Schedule) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::InvalidParameter(format!("total time {total_time}")));
        }
        if steps == 0 {
            return Err(Error::InvalidParameter("step count must be positive".into()));
        }
        Ok(Self {
            total_time,
            steps,
            schedule,
        })
    }

    /// `L = 4n` linear steps over `T = 10n`.
    pub fn default_for(n: usize) -> Self {
        Self {
            total_time: 10.0 * n as f64,
            steps: 4 * n.max(1),
            schedule: Schedule::Linear,
        }
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.steps as f64
    }

    /// Interpolation parameter at the end of step `j` (1-based).
    pub fn s_at(&self, j: usize) -> f64 {
        self.schedule.s(j as f64 * self.dt(), self.total_time)
    }
}

/// Runs `prod_j exp(-i H(t_j) dt)` on `|+>^n` with `H = (1-s) H0 + s H1`
/// and `H0 = -sum_i X_i`.
pub fn aqc_run(params: LmgParams, sched: ScheduleParams, n: usize) -> Result<SchurState> {
    let h1 = lmg_symmetric_block(params, n)?;
    let irrep = IrrepLabel::new(n, 0)?;
    let h0 = closed_form_block(GeneratorKind::SumX, n, &irrep)?;
    let state = prepare_state(StateKind::AllPlus, n)?;
    let SchurState::PureSymmetric { mut psi, .. } = state else {
        unreachable!("AllPlus is symmetric")
    };
    let dt = sched.dt();
    for j in 1..=sched.steps {
        let s = sched.s_at(j);
        let h = BlockMatrix::linear_combination(&[(-(1.0 - s) * n as f64, &h0), (s, &h1)])?;
        propagate_symmetric(&h, dt, &mut psi)?;
    }
    Ok(SchurState::PureSymmetric { n, psi })
}

/// Expectation of the symmetrized Pauli operator with weight `w`, building
/// only the symmetric block for pure symmetric states.
fn weight_expectation(state: &SchurState, w: WeightVector) -> Result<f64> {
    let n = state.n();
    match state {
        SchurState::PureSymmetric { psi, .. } => {
            let b = symmetrized_pauli_block(n, w, &IrrepLabel::new(n, 0)?)?;
            let bpsi = b.matvec(psi);
            let z: C64 = psi.iter().zip(&bpsi).map(|(a, b)| a.conj() * b).sum();
            if z.im.abs() > crate::evolution::IMAG_TOL {
                return Err(Error::ImaginaryResidue(z.im));
            }
            Ok(z.re)
        }
        SchurState::BlockMixed { .. } => expectation(state, &symmetrized_pauli_operator(n, w)?),
    }
}

/// `1 - <(sum_i Z_i)^2> / n^2`, with `(sum Z)^2 = n + n(n-1) SumZZ`.
pub fn order_parameter(state: &SchurState) -> Result<f64> {
    let n = state.n();
    if n < 2 {
        return Err(Error::TooFewQubits {
            what: "order parameter",
            min: 2,
        });
    }
    let nf = n as f64;
    let zz = weight_expectation(state, WeightVector::new(0, 0, 2))?;
    let z2 = nf + nf * (nf - 1.0) * zz;
    Ok(1.0 - z2 / (nf * nf))
}

/// Hermitian, PSD, unit-trace two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitRdm(Matrix4<C64>);

impl TwoQubitRdm {
    /// Validates and cleans a raw two-qubit matrix: Hermitizes, clips
    /// negative eigenvalues and renormalizes.
    pub fn new(raw: Matrix4<C64>) -> Result<Self> {
        let herm = (raw + raw.adjoint()) * C64::new(0.5, 0.0);
        let dev = (raw - herm).camax();
        if dev > 1e-10 {
            return Err(Error::NotHermitian(dev));
        }
        let tr = herm.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!("reduced state trace {tr}")));
        }
        let e = eigh_dense(&DMatrix::from_iterator(4, 4, herm.iter().copied()))?;
        let clipped: f64 = e.values.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
        if clipped > 1e-6 {
            return Err(Error::RdmClipping(clipped));
        }
        if clipped == 0.0 {
            return Ok(Self(herm));
        }
        let vals: Vec<f64> = e.values.iter().map(|v| v.max(0.0)).collect();
        let total: f64 = vals.iter().sum();
        let mut out = Matrix4::<C64>::zeros();
        for (k, &v) in vals.iter().enumerate() {
            let col = e.vectors.column(k);
            for i in 0..4 {
                for j in 0..4 {
                    out[(i, j)] += col[i] * col[j].conj() * (v / total);
                }
            }
        }
        Ok(Self(out))
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }
}

fn pauli4(p: Pauli, q: Pauli) -> Matrix4<C64> {
    let a = p.matrix();
    let b = q.matrix();
    Matrix4::from_fn(|r, c| a[r >> 1][c >> 1] * b[r & 1][c & 1])
}

fn two_local_weight(p: Pauli, q: Pauli) -> WeightVector {
    let mut w = WeightVector::IDENTITY;
    for x in [p, q] {
        match x {
            Pauli::X => w.x += 1,
            Pauli::Y => w.y += 1,
            Pauli::Z => w.z += 1,
            Pauli::I => {}
        }
    }
    w
}

/// Reduced state of any two qubits of a permutation-invariant state,
/// `(1/4) sum_{P,Q} <P_1 Q_2> P (x) Q`.
pub fn two_qubit_rdm(state: &SchurState) -> Result<TwoQubitRdm> {
    if state.n() < 2 {
        return Err(Error::TooFewQubits {
            what: "two-qubit reduced state",
            min: 2,
        });
    }
    let mut raw = Matrix4::<C64>::zeros();
    for (a, &p) in Pauli::ALL.iter().enumerate() {
        for &q in &Pauli::ALL[a..] {
            let v = if p == Pauli::I && q == Pauli::I {
                1.0
            } else {
                weight_expectation(state, two_local_weight(p, q))?
            };
            let mut term = pauli4(p, q);
            if p != q {
                term += pauli4(q, p);
            }
            raw += term * C64::new(v / 4.0, 0.0);
        }
    }
    TwoQubitRdm::new(raw)
}

/// Wootters concurrence from the Hermitian form `sqrt(rho) rho~ sqrt(rho)`,
/// which shares its spectrum with `rho (Y(x)Y) rho* (Y(x)Y)`.
pub fn concurrence(rdm: &TwoQubitRdm) -> Result<f64> {
    let rho = rdm.matrix();
    let yy = pauli4(Pauli::Y, Pauli::Y);
    let tilde = yy * rho.conjugate() * yy;
    let dense = |m: &Matrix4<C64>| DMatrix::from_iterator(4, 4, m.iter().copied());
    let e = eigh_dense(&dense(rho))?;
    let mut sqrt_rho = DMatrix::<C64>::zeros(4, 4);
    for (k, &v) in e.values.iter().enumerate() {
        let col = e.vectors.column(k);
        sqrt_rho += col * col.adjoint() * C64::new(v.max(0.0).sqrt(), 0.0);
    }
    let mut r = &sqrt_rho * dense(&tilde) * &sqrt_rho;
    r = (&r + r.adjoint()) * C64::new(0.5, 0.0);
    let mut nu = eigh_dense(&r)?.values;
    nu.sort_by(|a, b| b.total_cmp(a));
    let s: Vec<f64> = nu.iter().map(|v| v.max(0.0).sqrt()).collect();
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

pub fn rescaled(n: usize, c: f64) -> f64 {
    (n as f64 - 1.0) * c
}

/// Large-`n` order parameter and rescaled concurrence.
pub fn thermodynamic_references(gamma: f64, hz: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("gamma {gamma} outside [0, 1]")));
    }
    let h = hz.abs();
    let m = if h >= 1.0 { 0.0 } else { 1.0 - h * h };
    let cr = if h >= 1.0 {
        if h == gamma {
            1.0
        } else {
            1.0 - ((h - 1.0) / (h - gamma)).sqrt()
        }
    } else if h >= gamma.sqrt() {
        1.0 - ((1.0 - h * h) / (1.0 - gamma)).sqrt()
    } else {
        1.0 - ((1.0 - gamma) / (1.0 - h * h)).sqrt()
    };
    Ok((m, cr))
}

/// Observables of one AQC point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmgPoint {
    pub order_param: f64,
    pub concurrence: f64,
    pub rescaled_concurrence: f64,
}

pub fn measure(state: &SchurState) -> Result<LmgPoint> {
    let order_param = order_parameter(state)?;
    let c = concurrence(&two_qubit_rdm(state)?)?;
    Ok(LmgPoint {
        order_param,
        concurrence: c,
        rescaled_concurrence: rescaled(state.n(), c),
    })
}
