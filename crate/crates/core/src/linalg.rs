//! Hermitian eigensolvers for small blocks.
//!
//! Both paths reduce to a real symmetric tridiagonal matrix and finish with
//! implicit-shift QL. Banded input uses Givens bulge chasing, which keeps
//! the reduction at `O(b d^2)` and lets the rotations be replayed on a
//! vector without ever forming the eigenvector matrix.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::block::BlockMatrix;
use crate::error::{Error, Result};
use crate::C64;

const QL_MAX_ITER: usize = 60;

/// Real or complex entries.
pub trait Field:
    nalgebra::Scalar
    + Copy
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
    + Debug
{
    fn conj(self) -> Self;
    fn abs(self) -> f64;
    fn abs2(self) -> f64;
    fn from_f64(x: f64) -> Self;
    fn from_c64(z: C64) -> Self;
    fn scale(self, s: f64) -> Self;
    fn to_c64(self) -> C64;
}

impl Field for f64 {
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn abs2(self) -> f64 {
        self * self
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn from_c64(z: C64) -> Self {
        z.re
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn to_c64(self) -> C64 {
        C64::new(self, 0.0)
    }
}

impl Field for C64 {
    #[inline]
    fn conj(self) -> Self {
        C64::conj(&self)
    }
    #[inline]
    fn abs(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    #[inline]
    fn from_c64(z: C64) -> Self {
        z
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn to_c64(self) -> C64 {
        self
    }
}

/// Consumer of the real plane rotations produced by QL.
trait RotationSink {
    fn rotate(&mut self, i: usize, c: f64, s: f64);
}

struct Recorder<'a>(&'a mut Vec<(u32, f64, f64)>);

impl RotationSink for Recorder<'_> {
    #[inline]
    fn rotate(&mut self, i: usize, c: f64, s: f64) {
        self.0.push((i as u32, c, s));
    }
}

/// Right-multiplies a column-major matrix by the rotation.
struct Accumulator<'a, T: Field>(&'a mut DMatrix<T>);

impl<T: Field> RotationSink for Accumulator<'_, T> {
    #[inline]
    fn rotate(&mut self, i: usize, c: f64, s: f64) {
        let rows = self.0.nrows();
        let data = self.0.as_mut_slice();
        let (left, right) = data.split_at_mut((i + 1) * rows);
        let zi = &mut left[i * rows..];
        let zj = &mut right[..rows];
        for (a, b) in zi.iter_mut().zip(zj.iter_mut()) {
            let f = *b;
            *b = a.scale(s) + f.scale(c);
            *a = a.scale(c) - f.scale(s);
        }
    }
}

/// Implicit-shift QL on the symmetric tridiagonal `(diag, off)`, where
/// `off[i]` couples `i` and `i+1`. Eigenvalues are left in `diag`, unsorted.
/// Plain square roots replace `hypot`; block entries stay far from the
/// overflow range.
fn tql(diag: &mut [f64], off: &mut [f64], sink: &mut impl RotationSink) -> Result<()> {
    let n = diag.len();
    if n <= 1 {
        return Ok(());
    }
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);
    let d = diag;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = (g * g + 1.0).sqrt();
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                sink.rotate(i, c, s);
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    off.iter_mut().for_each(|x| *x = 0.0);
    Ok(())
}

/// Givens rotation `[[c, s], [-conj(s), c]]` acting on planes `(p, p+1)`.
#[derive(Debug, Clone, Copy)]
struct Givens<T> {
    p: u32,
    c: f64,
    s: T,
}

impl<T: Field> Givens<T> {
    /// Rotation that zeroes `y` against `x`.
    fn zeroing(p: usize, x: T, y: T) -> Self {
        let ax = x.abs();
        let r = (ax * ax + y.abs2()).sqrt();
        if ax == 0.0 {
            Givens {
                p: p as u32,
                c: 0.0,
                s: T::one(),
            }
        } else {
            Givens {
                p: p as u32,
                c: ax / r,
                s: (x.scale(1.0 / ax) * y.conj()).scale(1.0 / r),
            }
        }
    }

    /// `x <- G x`.
    #[inline]
    fn apply(&self, x: &mut [C64]) {
        let p = self.p as usize;
        let (a, b) = (x[p], x[p + 1]);
        let s = self.s.to_c64();
        x[p] = a * self.c + s * b;
        x[p + 1] = -s.conj() * a + b * self.c;
    }

    /// `x <- G^dagger x`.
    #[inline]
    fn apply_adjoint(&self, x: &mut [C64]) {
        let p = self.p as usize;
        let (a, b) = (x[p], x[p + 1]);
        let s = self.s.to_c64();
        x[p] = a * self.c - s * b;
        x[p + 1] = s.conj() * a + b * self.c;
    }
}

/// Dense column-major Hermitian work matrix.
struct Work<T: Field> {
    d: usize,
    a: Vec<T>,
}

impl<T: Field> Work<T> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.a[j * self.d + i]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.a[j * self.d + i]
    }
}

/// Hermitian work matrix stored as rows of a band of half-width `w`,
/// small enough to stay in cache during bulge chasing.
struct BandWork<T: Field> {
    w: usize,
    stride: usize,
    a: Vec<T>,
}

impl<T: Field> BandWork<T> {
    fn new(d: usize, w: usize) -> Self {
        let stride = 2 * w + 1;
        Self {
            w,
            stride,
            a: vec![T::zero(); d * stride],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i.abs_diff(j) <= self.w);
        i * self.stride + j + self.w - i
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.a[self.idx(i, j)]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        let k = self.idx(i, j);
        &mut self.a[k]
    }

    /// `A <- G A G^dagger` touching indices in `lo..=hi`.
    fn rotate(&mut self, g: &Givens<T>, lo: usize, hi: usize) {
        let p = g.p as usize;
        let c = g.c;
        let s = g.s;
        let sc = s.conj();
        for j in lo..=hi {
            let a = self.at(p, j);
            let b = self.at(p + 1, j);
            *self.at_mut(p, j) = a.scale(c) + s * b;
            *self.at_mut(p + 1, j) = b.scale(c) - sc * a;
        }
        for i in lo..=hi {
            let a = self.at(i, p);
            let b = self.at(i, p + 1);
            *self.at_mut(i, p) = a.scale(c) + sc * b;
            *self.at_mut(i, p + 1) = b.scale(c) - s * a;
        }
    }
}

/// Unitary recorded by the band reduction: `A = B D T D^dagger B^dagger`
/// with `B = G_1^dagger ... G_K^dagger` and `D` diagonal phases.
struct BandReduction<T: Field> {
    diag: Vec<f64>,
    off: Vec<f64>,
    rotations: Vec<Givens<T>>,
    phases: Vec<T>,
}

fn band_reduce<T: Field>(block: &BlockMatrix, b: usize) -> BandReduction<T> {
    let d = block.dim();
    // one extra diagonal for the bulge and one for the rotation window
    let mut w = BandWork::new(d, b + 2);
    block.for_each_entry(|i, j, v| {
        if v != C64::zero() {
            *w.at_mut(i, j) = T::from_c64(v);
        }
    });
    let mut rotations = Vec::new();
    if b > 1 {
        for j in 0..d.saturating_sub(2) {
            let top = (j + b).min(d - 1);
            for r in (j + 2..=top).rev() {
                let mut p = r - 1;
                let mut col = j;
                loop {
                    let y = w.at(p + 1, col);
                    if y.abs2() != 0.0 {
                        let g = Givens::zeroing(p, w.at(p, col), y);
                        let lo = p.saturating_sub(b + 1);
                        let hi = (p + b + 2).min(d - 1);
                        w.rotate(&g, lo, hi);
                        *w.at_mut(p + 1, col) = T::zero();
                        *w.at_mut(col, p + 1) = T::zero();
                        rotations.push(g);
                    }
                    // the rotation filled (p + 1 + b, p) just outside the band
                    let next = p + 1 + b;
                    if next >= d {
                        break;
                    }
                    col = p;
                    p = next - 1;
                }
            }
        }
    }
    let mut diag = Vec::with_capacity(d);
    let mut off = vec![0.0; d];
    let mut phases = Vec::with_capacity(d);
    let mut phi = T::one();
    phases.push(phi);
    for (i, o) in off.iter_mut().enumerate() {
        diag.push(w.at(i, i).to_c64().re);
        if i + 1 < d {
            let e = w.at(i + 1, i);
            let ae = e.abs();
            *o = ae;
            phi = if ae == 0.0 { T::one() } else { phi * e.scale(1.0 / ae) };
            phases.push(phi);
        }
    }
    BandReduction {
        diag,
        off,
        rotations,
        phases,
    }
}

/// Householder tridiagonalization returning `(diag, off, Q)` with
/// `A = Q T Q^dagger` and `T` real.
fn householder_reduce<T: Field>(block: &BlockMatrix) -> (Vec<f64>, Vec<f64>, DMatrix<T>) {
    let d = block.dim();
    let mut w = Work {
        d,
        a: vec![T::zero(); d * d],
    };
    block.for_each_entry(|i, j, v| *w.at_mut(i, j) = T::from_c64(v));
    let mut q = DMatrix::<T>::identity(d, d);
    let mut v = vec![T::zero(); d];
    let mut pv = vec![T::zero(); d];
    for k in 0..d.saturating_sub(2) {
        let len = d - k - 1;
        let x0 = w.at(k + 1, k);
        let tail: f64 = (k + 2..d).map(|i| w.at(i, k).abs2()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (x0.abs2() + tail).sqrt();
        let phase = if x0.abs() == 0.0 {
            T::one()
        } else {
            x0.scale(1.0 / x0.abs())
        };
        let alpha = -phase.scale(xnorm);
        let v = &mut v[..len];
        for (t, i) in (k + 1..d).enumerate() {
            v[t] = w.at(i, k);
        }
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x.abs2()).sum();
        let tau = 2.0 / vnorm2;
        // p = tau A v on the trailing block
        let p = &mut pv[..len];
        p.iter_mut().for_each(|x| *x = T::zero());
        for (tj, j) in (k + 1..d).enumerate() {
            let vj = v[tj];
            if vj.abs2() == 0.0 {
                continue;
            }
            for (ti, i) in (k + 1..d).enumerate() {
                p[ti] += w.at(i, j) * vj;
            }
        }
        p.iter_mut().for_each(|x| *x = x.scale(tau));
        let mut vp = T::zero();
        for t in 0..len {
            vp += v[t].conj() * p[t];
        }
        let kk = vp.scale(tau / 2.0);
        for t in 0..len {
            p[t] -= kk * v[t];
        }
        for (tj, j) in (k + 1..d).enumerate() {
            let vjc = v[tj].conj();
            let wjc = p[tj].conj();
            for (ti, i) in (k + 1..d).enumerate() {
                *w.at_mut(i, j) -= v[ti] * wjc + p[ti] * vjc;
            }
        }
        *w.at_mut(k + 1, k) = alpha;
        *w.at_mut(k, k + 1) = alpha.conj();
        for i in k + 2..d {
            *w.at_mut(i, k) = T::zero();
            *w.at_mut(k, i) = T::zero();
        }
        // Q <- Q H on columns k+1..
        for r in 0..d {
            let mut acc = T::zero();
            for (t, j) in (k + 1..d).enumerate() {
                acc += q[(r, j)] * v[t];
            }
            let acc = acc.scale(tau);
            for (t, j) in (k + 1..d).enumerate() {
                q[(r, j)] -= acc * v[t].conj();
            }
        }
    }
    let mut diag = Vec::with_capacity(d);
    let mut off = vec![0.0; d];
    let mut phi = T::one();
    scale_column(&mut q, 0, phi);
    for (i, o) in off.iter_mut().enumerate() {
        diag.push(w.at(i, i).to_c64().re);
        if i + 1 < d {
            let e = w.at(i + 1, i);
            let ae = e.abs();
            *o = ae;
            phi = if ae == 0.0 { T::one() } else { phi * e.scale(1.0 / ae) };
            scale_column(&mut q, i + 1, phi);
        }
    }
    (diag, off, q)
}

fn scale_column<T: Field>(q: &mut DMatrix<T>, j: usize, phi: T) {
    for x in q.column_mut(j).iter_mut() {
        *x *= phi;
    }
}

/// Spectral decomposition `A = V diag(values) V^dagger`, values ascending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

/// Bandwidth up to which the Givens path is used.
pub const BANDED_PATH_MAX: usize = 4;

/// Hermitian eigendecomposition of a block, choosing the banded or dense
/// reduction from its storage.
pub fn eigh_block(block: &BlockMatrix) -> Result<Eigh> {
    let dev = block.hermitian_deviation();
    if dev > 1e-10 {
        return Err(Error::NotHermitian(dev));
    }
    if block.is_real() {
        eigh_generic::<f64>(block)
    } else {
        eigh_generic::<C64>(block)
    }
}

fn eigh_generic<T: Field>(block: &BlockMatrix) -> Result<Eigh> {
    let d = block.dim();
    let (mut diag, mut off, mut q) = match block.band() {
        Some(b) if b <= BANDED_PATH_MAX => {
            let red = band_reduce::<T>(block, b);
            let mut q = DMatrix::<T>::identity(d, d);
            for g in &red.rotations {
                // Q <- Q G^dagger
                let p = g.p as usize;
                let sc = g.s.conj();
                let (left, right) = q.as_mut_slice().split_at_mut((p + 1) * d);
                let cp = &mut left[p * d..];
                let cq = &mut right[..d];
                for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x.scale(g.c) + sc * y;
                    *b = y.scale(g.c) - g.s * x;
                }
            }
            for (j, &phi) in red.phases.iter().enumerate() {
                scale_column(&mut q, j, phi);
            }
            (red.diag, red.off, q)
        }
        _ => householder_reduce::<T>(block),
    };
    tql(&mut diag, &mut off, &mut Accumulator(&mut q))?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = DMatrix::from_fn(d, d, |i, j| q[(i, order[j])].to_c64());
    Ok(Eigh { values, vectors })
}

/// Eigendecomposition of a dense Hermitian matrix.
pub fn eigh_dense(a: &DMatrix<C64>) -> Result<Eigh> {
    let d = a.nrows();
    let irrep = crate::schur::IrrepLabel::with_dim(d)?;
    let block = BlockMatrix::from_dense(irrep, a.clone(), crate::block::Structure::Dense)?;
    eigh_block(&block)
}

/// Factorization kept as rotation sequences so that `exp(-i t A) x` costs
/// `O(d^2)` without forming eigenvectors.
#[derive(Debug, Clone)]
pub struct ImplicitEigh {
    values: Vec<f64>,
    band: BandRotations,
    phases: Vec<C64>,
    ql: Vec<(u32, f64, f64)>,
}

#[derive(Debug, Clone)]
enum BandRotations {
    Real(Vec<Givens<f64>>),
    Complex(Vec<Givens<C64>>),
}

impl ImplicitEigh {
    /// Requires banded storage with bandwidth at most [`BANDED_PATH_MAX`].
    pub fn new(block: &BlockMatrix) -> Result<Self> {
        let b = match block.band() {
            Some(b) if b <= BANDED_PATH_MAX => b,
            _ => {
                return Err(Error::InvalidParameter(
                    "implicit eigensolver needs a narrow banded block".into(),
                ))
            }
        };
        let dev = block.hermitian_deviation();
        if dev > 1e-10 {
            return Err(Error::NotHermitian(dev));
        }
        let (mut diag, mut off, band, phases) = if block.is_real() {
            let r = band_reduce::<f64>(block, b);
            let ph = r.phases.iter().map(|&p| C64::new(p, 0.0)).collect();
            (r.diag, r.off, BandRotations::Real(r.rotations), ph)
        } else {
            let r = band_reduce::<C64>(block, b);
            (r.diag, r.off, BandRotations::Complex(r.rotations), r.phases)
        };
        let mut ql = Vec::with_capacity(2 * diag.len() * diag.len());
        tql(&mut diag, &mut off, &mut Recorder(&mut ql))?;
        Ok(Self {
            values: diag,
            band,
            phases,
            ql,
        })
    }

    /// Eigenvalues in solver order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `x <- f(A) x` for the diagonal function given per eigenvalue.
    pub fn apply_fn(&self, x: &mut [C64], f: impl Fn(f64) -> C64) {
        match &self.band {
            BandRotations::Real(r) => r.iter().for_each(|g| g.apply(x)),
            BandRotations::Complex(r) => r.iter().for_each(|g| g.apply(x)),
        }
        for (xi, p) in x.iter_mut().zip(&self.phases) {
            *xi *= p.conj();
        }
        // Z^T x, first recorded rotation first
        for &(i, c, s) in &self.ql {
            let i = i as usize;
            let (a, b) = (x[i], x[i + 1]);
            x[i] = a * c - b * s;
            x[i + 1] = a * s + b * c;
        }
        for (xi, &lam) in x.iter_mut().zip(&self.values) {
            *xi *= f(lam);
        }
        for &(i, c, s) in self.ql.iter().rev() {
            let i = i as usize;
            let (a, b) = (x[i], x[i + 1]);
            x[i] = a * c + b * s;
            x[i + 1] = b * c - a * s;
        }
        for (xi, p) in x.iter_mut().zip(&self.phases) {
            *xi *= p;
        }
        match &self.band {
            BandRotations::Real(r) => r.iter().rev().for_each(|g| g.apply_adjoint(x)),
            BandRotations::Complex(r) => r.iter().rev().for_each(|g| g.apply_adjoint(x)),
        }
    }

    /// `x <- exp(-i t A) x`.
    pub fn apply_exp(&self, t: f64, x: &mut [C64]) {
        self.apply_fn(x, |lam| C64::from_polar(1.0, -lam * t));
    }
}

/// Complex matrix product through real `dgemm` calls, skipping
/// products with vanishing imaginary parts.
pub fn zgemm(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    assert_eq!(a.ncols(), b.nrows());
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
    let mut re = vec![0.0; m * n];
    let mut im = vec![0.0; m * n];
    match (&ai, &bi) {
        (None, None) => dgemm(m, k, n, 1.0, &ar, &br, 0.0, &mut re),
        (Some(ai), None) => {
            dgemm(m, k, n, 1.0, &ar, &br, 0.0, &mut re);
            dgemm(m, k, n, 1.0, ai, &br, 0.0, &mut im);
        }
        (None, Some(bi)) => {
            dgemm(m, k, n, 1.0, &ar, &br, 0.0, &mut re);
            dgemm(m, k, n, 1.0, &ar, bi, 0.0, &mut im);
        }
        (Some(ai), Some(bi)) => {
            dgemm(m, k, n, 1.0, &ar, &br, 0.0, &mut re);
            dgemm(m, k, n, -1.0, ai, bi, 1.0, &mut re);
            dgemm(m, k, n, 1.0, &ar, bi, 0.0, &mut im);
            dgemm(m, k, n, 1.0, ai, &br, 1.0, &mut im);
        }
    }
    DMatrix::from_iterator(m, n, re.into_iter().zip(im).map(|(r, i)| C64::new(r, i)))
}

fn split(a: &DMatrix<C64>) -> (Vec<f64>, Option<Vec<f64>>) {
    let re = a.iter().map(|z| z.re).collect();
    let any_im = a.iter().any(|z| z.im != 0.0);
    let im = any_im.then(|| a.iter().map(|z| z.im).collect());
    (re, im)
}

/// Column-major `c <- alpha a b + beta c`.
#[allow(clippy::too_many_arguments)]
fn dgemm(m: usize, k: usize, n: usize, alpha: f64, a: &[f64], b: &[f64], beta: f64, c: &mut [f64]) {
    // SAFETY: slices hold m*k, k*n and m*n column-major elements.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.as_ptr(),
            1,
            m as isize,
            b.as_ptr(),
            1,
            k as isize,
            beta,
            c.as_mut_ptr(),
            1,
            m as isize,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::Structure;
    use crate::schur::IrrepLabel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_banded(d: usize, b: usize, complex: bool, seed: u64) -> BlockMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ir = IrrepLabel::with_dim(d).unwrap();
        let mut m = BlockMatrix::zeros_banded(ir, b);
        for i in 0..d {
            m.set(i, i, C64::new(rng.random_range(-1.0..1.0), 0.0));
            for off in 1..=b.min(d - 1 - i) {
                let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
                let v = C64::new(rng.random_range(-1.0..1.0), im);
                m.set(i + off, i, v);
                m.set(i, i + off, v.conj());
            }
        }
        m
    }

    fn check_decomposition(block: &BlockMatrix, e: &Eigh) {
        let a = block.to_dense();
        let v = &e.vectors;
        let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            e.values.len(),
            e.values.iter().map(|&x| C64::new(x, 0.0)),
        ));
        let recon = v * lam * v.adjoint();
        assert!((recon - &a).camax() < 1e-11);
        let id = DMatrix::<C64>::identity(a.nrows(), a.nrows());
        assert!((v.adjoint() * v - id).camax() < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn banded_paths_reconstruct() {
        for (d, b, complex) in [(1, 0, false), (2, 1, true), (7, 2, false), (9, 2, true), (12, 3, true), (20, 4, false)] {
            let m = random_banded(d, b, complex, d as u64 * 31 + b as u64);
            check_decomposition(&m, &eigh_block(&m).unwrap());
        }
    }

    #[test]
    fn dense_path_reconstructs() {
        for (d, complex) in [(3, false), (8, true), (15, true)] {
            let m = random_banded(d, d - 1, complex, d as u64);
            let dense = BlockMatrix::from_dense(m.irrep().clone(), m.to_dense(), Structure::Dense).unwrap();
            check_decomposition(&dense, &eigh_block(&dense).unwrap());
        }
    }

    #[test]
    fn zero_and_diagonal() {
        let ir = IrrepLabel::new(4, 0).unwrap();
        let z = BlockMatrix::zeros_banded(ir.clone(), 2);
        let e = eigh_block(&z).unwrap();
        assert!(e.values.iter().all(|&x| x == 0.0));
        let id = DMatrix::<C64>::identity(5, 5);
        assert!((e.vectors.clone() - id).camax() < 1e-15);
        let diag: Vec<C64> = [3.0, -1.0, 2.0, 0.5, 0.0].iter().map(|&x| C64::new(x, 0.0)).collect();
        let e = eigh_block(&BlockMatrix::from_diagonal(ir, &diag)).unwrap();
        assert_eq!(e.values, vec![-1.0, 0.0, 0.5, 2.0, 3.0]);
    }

    #[test]
    fn implicit_matches_explicit() {
        for (d, b, complex) in [(6, 1, true), (11, 2, false), (13, 2, true), (9, 4, true)] {
            let m = random_banded(d, b, complex, 7 + d as u64);
            let e = eigh_block(&m).unwrap();
            let imp = ImplicitEigh::new(&m).unwrap();
            let t = 0.73;
            let x: Vec<C64> = (0..d).map(|i| C64::new(1.0 / (i + 1) as f64, i as f64 * 0.1)).collect();
            let mut y = x.clone();
            imp.apply_exp(t, &mut y);
            let phase = nalgebra::DVector::from_iterator(d, e.values.iter().map(|&l| C64::from_polar(1.0, -l * t)));
            let u = &e.vectors * DMatrix::from_diagonal(&phase) * e.vectors.adjoint();
            let want = u * nalgebra::DVector::from_vec(x);
            for i in 0..d {
                assert!((y[i] - want[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn zgemm_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = DMatrix::from_fn(5, 7, |_, _| C64::new(rng.random(), rng.random()));
        let b = DMatrix::from_fn(7, 4, |_, _| C64::new(rng.random(), 0.0));
        assert!((zgemm(&a, &b) - &a * &b).camax() < 1e-13);
        let b = DMatrix::from_fn(7, 4, |_, _| C64::new(rng.random(), rng.random()));
        assert!((zgemm(&a, &b) - &a * &b).camax() < 1e-13);
    }
}
