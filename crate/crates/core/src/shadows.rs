//! Permutation-invariant classical shadows.
//!
//! Two protocols are simulated. The deep protocol measures the irrep label,
//! applies a Haar-random unitary on the irrep register and measures it in
//! the computational basis. The symmetrized protocol applies a global
//! single-qubit rotation `W^{(x)n}`, measures the Hamming weight, and inverts
//! the measurement channel on the symmetrized Pauli basis.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::block::{BlockOperator, GeneratorKind};
use crate::error::{Error, Result};
use crate::evolution::{eigendecompose, EigenFactorization, SchurState};
use crate::linalg::{eigh_dense, zgemm};
use crate::ops::{closed_form_block, PauliColumns};
use crate::schur::{binomial_big, commutant_dim, enumerate_irreps, enumerate_weight_vectors, LogFactorials, WeightVector};
use crate::C64;

/// Largest `n` accepted by the symmetrized protocol; the channel has
/// `C(n+3, 3)` rows.
pub const SYMMETRIZED_MAX_QUBITS: usize = 32;
/// Largest `n` accepted by the deep protocol.
pub const DEEP_MAX_QUBITS: usize = 64;

/// ZYZ Euler angles of `W = e^{-i theta3 Z/2} e^{-i theta2 Y/2} e^{-i theta1 Z/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl EulerAngles {
    /// Bloch vector `r` with `W^dagger Z W = r . sigma`.
    pub fn bloch(&self) -> [f64; 3] {
        let w = self.single_qubit();
        let wd = adjoint2(&w);
        let z = [[C64::new(1.0, 0.0), C64::zero()], [C64::zero(), C64::new(-1.0, 0.0)]];
        let m = mul2(&mul2(&wd, &z), &w);
        // r.sigma = [[rz, rx - i ry], [rx + i ry, -rz]]
        [m[1][0].re, m[1][0].im, m[0][0].re]
    }

    fn single_qubit(&self) -> [[C64; 2]; 2] {
        let rz = |t: f64| {
            [
                [C64::from_polar(1.0, -t / 2.0), C64::zero()],
                [C64::zero(), C64::from_polar(1.0, t / 2.0)],
            ]
        };
        let (s, c) = (self.theta2 / 2.0).sin_cos();
        let ry = [
            [C64::new(c, 0.0), C64::new(-s, 0.0)],
            [C64::new(s, 0.0), C64::new(c, 0.0)],
        ];
        mul2(&mul2(&rz(self.theta3), &ry), &rz(self.theta1))
    }
}

fn mul2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut out = [[C64::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn adjoint2(a: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Haar-distributed angles: uniform `theta1, theta3`, `theta2 = arccos(1 - 2u)`.
pub fn sample_euler(rng: &mut impl Rng) -> EulerAngles {
    let theta1 = 2.0 * PI * rng.random::<f64>();
    let u: f64 = rng.random();
    let theta3 = 2.0 * PI * rng.random::<f64>();
    EulerAngles {
        theta1,
        theta2: (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos(),
        theta3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrizedSnapshot {
    pub angles: EulerAngles,
    pub hamming: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeepSnapshot {
    pub irrep_m: usize,
    /// Seed of the generator that reproduces the register unitary.
    pub register_seed: u64,
    pub outcome: usize,
}

/// Per-snapshot generator: substream `index` of the run seed.
pub fn snapshot_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples `index` from a probability vector with one uniform draw.
fn sample_index(p: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    p.iter().rposition(|&x| x > 0.0).unwrap_or(p.len() - 1)
}

fn check_probabilities(p: &mut [f64]) -> Result<()> {
    if let Some(&neg) = p.iter().find(|&&x| x < -1e-10) {
        return Err(Error::NegativeProbability(neg));
    }
    p.iter_mut().for_each(|x| *x = x.max(0.0));
    Ok(())
}

/// Rotated Hamming-weight distributions of a fixed state.
#[derive(Debug, Clone)]
pub struct HammingSampler {
    n: usize,
    tau: Vec<DMatrix<C64>>,
    /// Factorizations of `n SumY` per irrep.
    sum_y: Vec<EigenFactorization>,
}

impl HammingSampler {
    pub fn new(state: &SchurState) -> Result<Self> {
        state.validate()?;
        let n = state.n();
        let tau = state.to_blocks();
        let sum_y = enumerate_irreps(n)?
            .iter()
            .map(|ir| {
                let mut b = closed_form_block(GeneratorKind::SumY, n, ir)?;
                b.scale(C64::new(n as f64, 0.0));
                eigendecompose(&b)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, tau, sum_y })
    }

    /// `p(h) = sum_lambda sum_{q + m = h} (W tau W^dagger)_{qq}`.
    pub fn distribution(&self, angles: &EulerAngles) -> Result<Vec<f64>> {
        let n = self.n;
        let mut p = vec![0.0; n + 1];
        for (m, (tau, fy)) in self.tau.iter().zip(&self.sum_y).enumerate() {
            if tau.iter().all(|z| z.is_zero()) {
                continue;
            }
            let d = tau.nrows();
            // Z rotations are diagonal with entries exp(-i theta (n - 2h) / 2);
            // the outer one cannot change populations
            let mut w = fy.q.clone();
            for (j, &l) in fy.lambda.iter().enumerate() {
                let ph = C64::from_polar(1.0, -l * angles.theta2 / 2.0);
                w.column_mut(j).iter_mut().for_each(|x| *x *= ph);
            }
            let mut w = zgemm(&w, &fy.q.adjoint());
            for q in 0..d {
                let h = (q + m) as f64;
                let ph = C64::from_polar(1.0, -angles.theta1 * (n as f64 - 2.0 * h) / 2.0);
                w.column_mut(q).iter_mut().for_each(|x| *x *= ph);
            }
            let rot = zgemm(&zgemm(&w, tau), &w.adjoint());
            for q in 0..d {
                p[q + m] += rot[(q, q)].re;
            }
        }
        check_probabilities(&mut p)?;
        Ok(p)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Result<SymmetrizedSnapshot> {
        let angles = sample_euler(rng);
        let p = self.distribution(&angles)?;
        Ok(SymmetrizedSnapshot {
            angles,
            hamming: sample_index(&p, rng),
        })
    }
}

pub fn rotated_hamming_distribution(state: &SchurState, angles: &EulerAngles) -> Result<Vec<f64>> {
    HammingSampler::new(state)?.distribution(angles)
}

/// `a(h, m) = sum_l C(m, l) C(n - m, h - l) (-1)^l`.
pub fn a_coeff(h: usize, m: usize, n: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for l in 0..=m.min(h) {
        let term = BigInt::from(binomial_big(m, l) * binomial_big(n - m, h - l));
        if l % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// `alpha(h, m) = 2^{-n/2} C(n, m)^{1/2} a(h, m)`.
pub fn alpha_coeff(h: usize, m: usize, n: usize) -> f64 {
    let lf = LogFactorials::new(n);
    let a = a_coeff(h, m, n);
    if a.is_zero() {
        return 0.0;
    }
    let sign = if a < BigInt::zero() { -1.0 } else { 1.0 };
    let ln_a = ln_abs_bigint(&a);
    sign * (0.5 * lf.ln_binomial(n, m) - 0.5 * n as f64 * std::f64::consts::LN_2 + ln_a).exp()
}

fn ln_abs_bigint(a: &BigInt) -> f64 {
    let mag = a.magnitude();
    let bits = mag.bits();
    if bits < 1000 {
        mag.to_f64().unwrap_or(f64::INFINITY).ln()
    } else {
        let shift = bits - 64;
        (mag >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Ordinal of the `(x, y, z)` parity class, as a bit pattern.
fn parity_bits(class: usize) -> [usize; 3] {
    [(class >> 2) & 1, (class >> 1) & 1, class & 1]
}

/// Measurement channel on the orthonormal symmetrized Pauli basis
/// `B_k = sqrt(N_k / 2^n) T(P_k)`, factored per parity class.
#[derive(Debug, Clone)]
pub struct ChannelMatrix {
    n: usize,
    basis: Vec<WeightVector>,
    classes: Vec<Vec<usize>>,
    lus: Vec<Option<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>>>,
    lf: LogFactorials,
    /// `a(h, k)` as floating point, indexed `[h][k]`.
    a_table: Vec<Vec<f64>>,
}

pub fn channel_matrix(n: usize) -> Result<ChannelMatrix> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n));
    }
    if n > SYMMETRIZED_MAX_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "symmetrized shadows are limited to n <= {SYMMETRIZED_MAX_QUBITS}"
        )));
    }
    let basis = enumerate_weight_vectors(n, n)?;
    debug_assert_eq!(basis.len(), commutant_dim(n)?);
    let mut classes = vec![Vec::new(); 8];
    for (i, w) in basis.iter().enumerate() {
        classes[w.parity_class()].push(i);
    }
    let a_table = (0..=n)
        .map(|h| {
            (0..=n)
                .map(|k| a_coeff(h, k, n).to_f64().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    let mut chan = ChannelMatrix {
        n,
        basis,
        classes,
        lus: Vec::new(),
        lf: LogFactorials::new(2 * n + 1),
        a_table,
    };
    let lus = (0..8)
        .into_par_iter()
        .map(|c| {
            let idx = &chan.classes[c];
            if idx.is_empty() {
                return Ok(None);
            }
            let m = DMatrix::from_fn(idx.len(), idx.len(), |i, j| chan.entry(idx[i], idx[j]));
            let lu = m.lu();
            if !lu.is_invertible() {
                return Err(Error::SingularChannel(parity_bits(c)));
            }
            Ok(Some(lu))
        })
        .collect::<Result<Vec<_>>>()?;
    chan.lus = lus;
    Ok(chan)
}

impl ChannelMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[WeightVector] {
        &self.basis
    }

    /// Basis indices of each of the 8 parity classes.
    pub fn parity_classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Closed-form entry `c(k, k')`, zero unless every component of
    /// `k + k'` is even.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let (k, kp) = (self.basis[i], self.basis[j]);
        let s = [k.x + kp.x, k.y + kp.y, k.z + kp.z];
        if s.iter().any(|v| v % 2 == 1) {
            return 0.0;
        }
        let n = self.n;
        let (kk, kkp) = (k.k(), kp.k());
        let lf = &self.lf;
        let rest = 2 * n - kk - kkp;
        let mut ln = -(n as f64) * std::f64::consts::LN_2 - ((kk + kkp + 1) as f64).ln();
        ln -= 0.5
            * (lf.get(k.x) + lf.get(k.y) + lf.get(k.z) + lf.get(kp.x) + lf.get(kp.y) + lf.get(kp.z)
                + lf.get(n - kk)
                + lf.get(n - kkp));
        for v in s {
            ln += lf.get(v) - lf.get(v / 2);
        }
        ln += lf.get(rest) - lf.get(rest / 2);
        let sign = if (kk.abs_diff(kkp) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        sign * ln.exp()
    }

    /// Dense channel matrix, for small `n`.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.entry(i, j))
    }

    /// `C^{-1} o` through the per-class LU factors.
    pub fn solve(&self, o: &[f64]) -> Result<Vec<f64>> {
        if o.len() != self.dim() {
            return Err(Error::InvalidParameter("coordinate vector length".into()));
        }
        let mut out = vec![0.0; o.len()];
        for (c, idx) in self.classes.iter().enumerate() {
            let Some(lu) = &self.lus[c] else { continue };
            let rhs = DVector::from_iterator(idx.len(), idx.iter().map(|&i| o[i]));
            let x = lu.solve(&rhs).ok_or(Error::SingularChannel(parity_bits(c)))?;
            for (t, &i) in idx.iter().enumerate() {
                out[i] = x[t];
            }
        }
        Ok(out)
    }

    /// `ln sqrt(N_k / 2^n)` for basis element `i`.
    fn ln_norm(&self, i: usize) -> f64 {
        let k = self.basis[i];
        let lf = &self.lf;
        0.5 * (lf.get(self.n)
            - lf.get(k.x)
            - lf.get(k.y)
            - lf.get(k.z)
            - lf.get(self.n - k.k())
            - self.n as f64 * std::f64::consts::LN_2)
    }

    /// Coordinates `tr(B_k (W^dagger)^{(x)n} Pi_h W^{(x)n})` of one outcome.
    pub fn measurement_vector(&self, snap: &SymmetrizedSnapshot) -> Vec<f64> {
        let r = snap.angles.bloch();
        let a = &self.a_table[snap.hamming];
        (0..self.dim())
            .map(|i| {
                let k = self.basis[i];
                let pow = r[0].powi(k.x as i32) * r[1].powi(k.y as i32) * r[2].powi(k.z as i32);
                a[k.k()] * self.ln_norm(i).exp() * pow
            })
            .collect()
    }

    /// Coordinates `tr(B_k O) = sum_lambda mult_lambda tr(B_{k,lambda} O_lambda)`.
    pub fn observable_coordinates(&self, obs: &BlockOperator) -> Result<Vec<f64>> {
        if obs.n() != self.n {
            return Err(Error::QubitMismatch(obs.n(), self.n));
        }
        let cols = PauliColumns::new(self.n)?;
        let irreps = enumerate_irreps(self.n)?;
        (0..self.dim())
            .into_par_iter()
            .map(|i| {
                let w = self.basis[i];
                let mut acc = C64::zero();
                for ir in &irreps {
                    let b = cols.block(w, ir)?;
                    acc += b.trace_product(obs.block(ir.m)) * ir.mult_f64();
                }
                Ok(acc.re * self.ln_norm(i).exp())
            })
            .collect()
    }
}

/// Precomputed `C^{-1} o` for one observable.
#[derive(Debug, Clone)]
pub struct SymmetrizedEstimator {
    weights: Vec<f64>,
}

impl SymmetrizedEstimator {
    pub fn new(obs: &BlockOperator, chan: &ChannelMatrix) -> Result<Self> {
        let o = chan.observable_coordinates(obs)?;
        Ok(Self {
            weights: chan.solve(&o)?,
        })
    }

    pub fn estimate(&self, snap: &SymmetrizedSnapshot, chan: &ChannelMatrix) -> f64 {
        chan.measurement_vector(snap)
            .iter()
            .zip(&self.weights)
            .map(|(v, y)| v * y)
            .sum()
    }
}

/// Single-snapshot estimate `<<M_{theta,h}| C^{-1} |O>>`.
pub fn estimator_symmetrized(snap: &SymmetrizedSnapshot, obs: &BlockOperator, chan: &ChannelMatrix) -> Result<f64> {
    Ok(SymmetrizedEstimator::new(obs, chan)?.estimate(snap, chan))
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre
/// matrix, with the phases of `R` absorbed.
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let ph = rjj / rjj.norm();
            q.column_mut(j).iter_mut().for_each(|x| *x *= ph);
        }
    }
    q
}

/// Deep-protocol sampler holding the irrep weights of one state.
#[derive(Debug, Clone)]
pub struct DeepSampler {
    n: usize,
    tau: Vec<DMatrix<C64>>,
    weights: Vec<f64>,
}

impl DeepSampler {
    pub fn new(state: &SchurState) -> Result<Self> {
        if state.n() > DEEP_MAX_QUBITS {
            return Err(Error::InvalidParameter(format!(
                "deep shadows are limited to n <= {DEEP_MAX_QUBITS}"
            )));
        }
        state.validate()?;
        let mut weights = state.irrep_weights();
        check_probabilities(&mut weights)?;
        Ok(Self {
            n: state.n(),
            tau: state.to_blocks(),
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Result<DeepSnapshot> {
        let m = sample_index(&self.weights, rng);
        let register_seed: u64 = rng.random();
        let v = haar_unitary(self.tau[m].nrows(), &mut ChaCha8Rng::seed_from_u64(register_seed));
        let rot = zgemm(&zgemm(&v, &self.tau[m]), &v.adjoint());
        let norm = self.weights[m];
        let mut p: Vec<f64> = (0..rot.nrows()).map(|q| rot[(q, q)].re / norm).collect();
        check_probabilities(&mut p)?;
        Ok(DeepSnapshot {
            irrep_m: m,
            register_seed,
            outcome: sample_index(&p, rng),
        })
    }
}

pub fn deep_pics_sample(state: &SchurState, rng: &mut impl Rng) -> Result<DeepSnapshot> {
    DeepSampler::new(state)?.sample(rng)
}

impl DeepSnapshot {
    /// `V^dagger |q>` for the recorded register unitary.
    pub fn register_vector(&self, d: usize) -> Result<DVector<C64>> {
        if self.outcome >= d {
            return Err(Error::InvalidDimensionLabel { q: self.outcome, d });
        }
        let v = haar_unitary(d, &mut ChaCha8Rng::seed_from_u64(self.register_seed));
        Ok(DVector::from_iterator(d, v.row(self.outcome).iter().map(|z| z.conj())))
    }
}

/// `(d + 1) <q| V O_lambda V^dagger |q> - tr O_lambda` for one snapshot.
pub fn estimator_deep(snap: &DeepSnapshot, obs: &BlockOperator) -> Result<f64> {
    let m = snap.irrep_m;
    if 2 * m > obs.n() {
        return Err(Error::InvalidIrrep { n: obs.n(), m });
    }
    let block = obs.block(m);
    let phi = snap.register_vector(block.dim())?;
    Ok(deep_estimate_with(&phi, block))
}

fn deep_estimate_with(phi: &DVector<C64>, block: &crate::block::BlockMatrix) -> f64 {
    let d = block.dim();
    let ophi = block.matvec(phi.as_slice());
    let quad: C64 = phi.iter().zip(&ophi).map(|(a, b)| a.conj() * b).sum();
    (d as f64 + 1.0) * quad.re - block.trace().re
}

/// `(2n + 1) ||O||_F^2`.
pub fn symmetrized_variance_bound(obs: &BlockOperator) -> f64 {
    (2.0 * obs.n() as f64 + 1.0) * obs.frobenius_sq()
}

/// `3 (n^2 + 2n + 2) ||O||_inf^2`.
pub fn deep_variance_bound(obs: &BlockOperator) -> Result<f64> {
    let mut norm: f64 = 0.0;
    for b in obs.blocks() {
        let vals = eigh_dense(&b.to_dense())?.values;
        for v in vals {
            norm = norm.max(v.abs());
        }
    }
    let n = obs.n() as f64;
    Ok(3.0 * (n * n + 2.0 * n + 2.0) * norm * norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Mean,
    MedianOfMeans(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    /// Sample variance of the single-snapshot estimates.
    pub variance: f64,
    pub count: usize,
}

pub fn aggregate(estimates: &[f64], strategy: Aggregation) -> Result<Estimate> {
    let n = estimates.len();
    if n == 0 {
        return Err(Error::EmptyEstimates);
    }
    let mean = estimates.iter().sum::<f64>() / n as f64;
    let variance = if n > 1 {
        estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let value = match strategy {
        Aggregation::Mean | Aggregation::MedianOfMeans(0 | 1) => mean,
        Aggregation::MedianOfMeans(batches) => {
            let batches = batches.min(n);
            let mut means: Vec<f64> = (0..batches)
                .map(|b| {
                    let lo = b * n / batches;
                    let hi = (b + 1) * n / batches;
                    estimates[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
                })
                .collect();
            means.sort_by(f64::total_cmp);
            let mid = means.len() / 2;
            if means.len() % 2 == 1 {
                means[mid]
            } else {
                0.5 * (means[mid - 1] + means[mid])
            }
        }
    };
    Ok(Estimate {
        value,
        std_error: (variance / n as f64).sqrt(),
        variance,
        count: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    Deep,
    Symmetrized,
}

impl Protocol {
    pub fn tag(&self) -> &'static str {
        match self {
            Protocol::Deep => "deep",
            Protocol::Symmetrized => "sym",
        }
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deep" => Ok(Protocol::Deep),
            "sym" | "symmetrized" => Ok(Protocol::Symmetrized),
            _ => Err(Error::InvalidParameter(format!("unknown protocol {s:?}"))),
        }
    }
}

/// One line of a snapshot file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnapshotRecord {
    Symmetrized {
        seed: u64,
        index: u64,
        snap: SymmetrizedSnapshot,
    },
    Deep {
        seed: u64,
        index: u64,
        snap: DeepSnapshot,
    },
}

impl fmt::Display for SnapshotRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SnapshotRecord::Symmetrized { seed, index, snap } => {
                let a = snap.angles;
                write!(
                    f,
                    "sym {seed} {index} {:.17e} {:.17e} {:.17e} {}",
                    a.theta1, a.theta2, a.theta3, snap.hamming
                )
            }
            SnapshotRecord::Deep { seed, index, snap } => write!(
                f,
                "deep {seed} {index} {} {} {}",
                snap.irrep_m, snap.register_seed, snap.outcome
            ),
        }
    }
}

impl FromStr for SnapshotRecord {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("malformed snapshot record {line:?}"));
        let fields: Vec<&str> = line.split_whitespace().collect();
        let int = |s: &str| s.parse::<u64>().map_err(|_| bad());
        let float = |s: &str| s.parse::<f64>().map_err(|_| bad());
        match fields.as_slice() {
            ["sym", seed, index, t1, t2, t3, h] => Ok(SnapshotRecord::Symmetrized {
                seed: int(seed)?,
                index: int(index)?,
                snap: SymmetrizedSnapshot {
                    angles: EulerAngles {
                        theta1: float(t1)?,
                        theta2: float(t2)?,
                        theta3: float(t3)?,
                    },
                    hamming: int(h)? as usize,
                },
            }),
            ["deep", seed, index, m, reg, q] => Ok(SnapshotRecord::Deep {
                seed: int(seed)?,
                index: int(index)?,
                snap: DeepSnapshot {
                    irrep_m: int(m)? as usize,
                    register_seed: int(reg)?,
                    outcome: int(q)? as usize,
                },
            }),
            _ => Err(bad()),
        }
    }
}

/// Snapshots `0..count` of one run, generated on substreams of `seed`.
pub fn collect_snapshots(
    protocol: Protocol,
    state: &SchurState,
    count: usize,
    seed: u64,
) -> Result<Vec<SnapshotRecord>> {
    match protocol {
        Protocol::Symmetrized => {
            if state.n() > SYMMETRIZED_MAX_QUBITS {
                return Err(Error::InvalidParameter(format!(
                    "symmetrized shadows are limited to n <= {SYMMETRIZED_MAX_QUBITS}"
                )));
            }
            let sampler = HammingSampler::new(state)?;
            (0..count as u64)
                .into_par_iter()
                .map(|index| {
                    let snap = sampler.sample(&mut snapshot_rng(seed, index))?;
                    Ok(SnapshotRecord::Symmetrized { seed, index, snap })
                })
                .collect()
        }
        Protocol::Deep => {
            let sampler = DeepSampler::new(state)?;
            (0..count as u64)
                .into_par_iter()
                .map(|index| {
                    let snap = sampler.sample(&mut snapshot_rng(seed, index))?;
                    Ok(SnapshotRecord::Deep { seed, index, snap })
                })
                .collect()
        }
    }
}

/// Per-snapshot estimates of every observable, indexed `[observable][snapshot]`.
pub fn estimate_all(
    records: &[SnapshotRecord],
    observables: &[BlockOperator],
    chan: Option<&ChannelMatrix>,
) -> Result<Vec<Vec<f64>>> {
    let sym: Option<Vec<SymmetrizedEstimator>> = match chan {
        Some(c) => Some(
            observables
                .iter()
                .map(|o| SymmetrizedEstimator::new(o, c))
                .collect::<Result<_>>()?,
        ),
        None => None,
    };
    let per_snapshot = records
        .par_iter()
        .map(|rec| -> Result<Vec<f64>> {
            match rec {
                SnapshotRecord::Symmetrized { snap, .. } => {
                    let (Some(c), Some(est)) = (chan, &sym) else {
                        return Err(Error::InvalidParameter(
                            "symmetrized snapshots need a channel matrix".into(),
                        ));
                    };
                    let v = c.measurement_vector(snap);
                    Ok(est
                        .iter()
                        .map(|e| v.iter().zip(&e.weights).map(|(a, b)| a * b).sum())
                        .collect())
                }
                SnapshotRecord::Deep { snap, .. } => {
                    let n = observables.first().map_or(0, |o| o.n());
                    if 2 * snap.irrep_m > n {
                        return Err(Error::InvalidIrrep { n, m: snap.irrep_m });
                    }
                    let d = n - 2 * snap.irrep_m + 1;
                    let phi = snap.register_vector(d)?;
                    Ok(observables
                        .iter()
                        .map(|o| deep_estimate_with(&phi, o.block(snap.irrep_m)))
                        .collect())
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..observables.len())
        .map(|k| per_snapshot.iter().map(|row| row[k]).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{prepare_state, StateKind};

    #[test]
    fn a_coefficients() {
        for n in 1..=10 {
            for m in 0..=n {
                assert_eq!(a_coeff(0, m, n), BigInt::from(1));
                let total: BigInt = (0..=n).map(|h| a_coeff(h, m, n)).sum();
                let want = if m == 0 { BigInt::from(1u64 << n) } else { BigInt::zero() };
                assert_eq!(total, want);
            }
            for h in 0..=n {
                assert_eq!(a_coeff(h, 0, n), BigInt::from(binomial_big(n, h)));
            }
        }
    }

    #[test]
    fn bloch_vector_is_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let r = sample_euler(&mut rng).bloch();
            assert!((r.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let flip = EulerAngles {
            theta1: 0.0,
            theta2: PI,
            theta3: 0.0,
        };
        assert!((flip.bloch()[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn euler_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let draws: Vec<EulerAngles> = (0..100_000).map(|_| sample_euler(&mut rng)).collect();
        let mean_cos = draws.iter().map(|a| a.theta2.cos()).sum::<f64>() / 1e5;
        let mean_t1 = draws.iter().map(|a| a.theta1).sum::<f64>() / 1e5;
        assert!(mean_cos.abs() < 0.01);
        assert!((mean_t1 - PI).abs() < 0.03);
        assert!(draws.iter().all(|a| (0.0..=PI).contains(&a.theta2)));
    }

    #[test]
    fn hamming_distribution_extremes() {
        let s = prepare_state(StateKind::AllZero, 5).unwrap();
        let zero = EulerAngles {
            theta1: 0.0,
            theta2: 0.0,
            theta3: 0.0,
        };
        let p = rotated_hamming_distribution(&s, &zero).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
        let flip = EulerAngles { theta2: PI, ..zero };
        let p = rotated_hamming_distribution(&s, &flip).unwrap();
        assert!((p[5] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn channel_parity_and_symmetry() {
        let chan = channel_matrix(4).unwrap();
        let d = chan.dim();
        assert_eq!(d, 35);
        for i in 0..d {
            for j in 0..d {
                let (a, b) = (chan.basis()[i], chan.basis()[j]);
                if a.parity_class() != b.parity_class() {
                    assert_eq!(chan.entry(i, j), 0.0);
                }
                assert_eq!(chan.entry(i, j), chan.entry(j, i));
            }
        }
    }

    #[test]
    fn aggregation() {
        let e = aggregate(&[2.5], Aggregation::Mean).unwrap();
        assert_eq!((e.value, e.std_error), (2.5, 0.0));
        let xs = [1.0, 2.0, 3.0, 10.0];
        assert_eq!(
            aggregate(&xs, Aggregation::MedianOfMeans(1)).unwrap().value,
            aggregate(&xs, Aggregation::Mean).unwrap().value
        );
        assert_eq!(aggregate(&xs, Aggregation::MedianOfMeans(4)).unwrap().value, 2.5);
        assert!(aggregate(&[], Aggregation::Mean).is_err());
    }

    #[test]
    fn record_roundtrip() {
        let rec = SnapshotRecord::Symmetrized {
            seed: 7,
            index: 3,
            snap: SymmetrizedSnapshot {
                angles: EulerAngles {
                    theta1: 0.1,
                    theta2: 2.0 / 3.0,
                    theta3: 6.0,
                },
                hamming: 2,
            },
        };
        assert_eq!(rec.to_string().parse::<SnapshotRecord>().unwrap(), rec);
        let deep = SnapshotRecord::Deep {
            seed: 1,
            index: 0,
            snap: DeepSnapshot {
                irrep_m: 1,
                register_seed: u64::MAX,
                outcome: 2,
            },
        };
        assert_eq!(deep.to_string().parse::<SnapshotRecord>().unwrap(), deep);
        assert!("sym 1 2 3".parse::<SnapshotRecord>().is_err());
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let v = haar_unitary(5, &mut ChaCha8Rng::seed_from_u64(4));
        assert!((v.adjoint() * &v - DMatrix::<C64>::identity(5, 5)).camax() < 1e-12);
    }
}
