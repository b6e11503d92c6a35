//! Exact q-expansion arithmetic and Hecke eigenvalue tables.
//!
//! The integer core is arbitrary precision: Delta and the other level-one
//! eigenforms come from sparse eta-power folds, the level-P newform from an
//! eta quotient whose eigenform-ness is verified empirically through the
//! integer Hecke relation. Normalized eigenvalues lambda(n) = a(n)/n^{(k-1)/2}
//! cross the float boundary once, on output.
//!
//! Large tables (n up to 2e7) switch to a hybrid pipeline: exact i128 folds
//! to 5e5, then f64 FFT squarings eta^6 -> eta^12 -> eta^24 whose splice
//! against the exact segment is checked before the table is released.

use crate::arith;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

/// eta(z)^3 / q^{1/8} = sum_k (-1)^k (2k+1) q^{k(k+1)/2}, terms below `limit`.
fn eta3_sparse(limit: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let e = k * (k + 1) / 2;
        if e >= limit {
            break;
        }
        let c = (2 * k + 1) as i64;
        out.push((e, if k % 2 == 0 { c } else { -c }));
        k += 1;
    }
    out
}

/// eta(z) / q^{1/24} = sum_{k in Z} (-1)^k q^{k(3k-1)/2} (pentagonal numbers).
fn eta_sparse(limit: usize) -> Vec<(usize, i64)> {
    let mut out = vec![(0usize, 1i64)];
    let mut k = 1i64;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        let e2 = k * (3 * k + 1) / 2;
        if e1 as usize >= limit && e2 as usize >= limit {
            break;
        }
        let s = if k % 2 == 0 { 1 } else { -1 };
        if (e1 as usize) < limit {
            out.push((e1 as usize, s));
        }
        if (e2 as usize) < limit {
            out.push((e2 as usize, s));
        }
        k += 1;
    }
    out.sort_unstable();
    out
}

/// Exact integer q-expansion truncated at a precision bound.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegerPowerSeries {
    /// coeffs[n] is the q^n coefficient; length equals the precision
    pub coeffs: Vec<BigInt>,
}

const KARATSUBA_THRESHOLD: usize = 4096;

impl IntegerPowerSeries {
    pub fn new(precision: usize) -> Self {
        IntegerPowerSeries { coeffs: vec![BigInt::zero(); precision] }
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn one(precision: usize) -> Self {
        let mut s = Self::new(precision);
        if precision > 0 {
            s.coeffs[0] = BigInt::one();
        }
        s
    }

    /// Truncated product; the result keeps the smaller precision of the
    /// two operands, never less.
    pub fn mul(&self, other: &IntegerPowerSeries) -> IntegerPowerSeries {
        let n = self.precision().min(other.precision());
        let coeffs = poly_mul_trunc(&self.coeffs[..n], &other.coeffs[..n], n);
        IntegerPowerSeries { coeffs }
    }

    /// Multiply in place by a sparse series given as (exponent, coefficient).
    fn fold_sparse(&mut self, sparse: &[(usize, i64)]) {
        let n = self.precision();
        let mut out = vec![BigInt::zero(); n];
        for &(e, c) in sparse {
            let c = BigInt::from(c);
            for i in 0..n.saturating_sub(e) {
                if !self.coeffs[i].is_zero() {
                    out[i + e] += &self.coeffs[i] * &c;
                }
            }
        }
        self.coeffs = out;
    }
}

fn poly_mul_trunc(a: &[BigInt], b: &[BigInt], out_len: usize) -> Vec<BigInt> {
    if a.len().min(b.len()) <= KARATSUBA_THRESHOLD {
        return schoolbook_trunc(a, b, out_len);
    }
    let mut full = karatsuba(a, b, KARATSUBA_THRESHOLD);
    full.truncate(out_len);
    full.resize(out_len, BigInt::zero());
    full
}

fn schoolbook_trunc(a: &[BigInt], b: &[BigInt], out_len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); out_len];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() || i >= out_len {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(out_len - i) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

/// Full-length product, splitting until operands fall under the threshold.
fn karatsuba(a: &[BigInt], b: &[BigInt], threshold: usize) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len().min(b.len()) <= threshold {
        return schoolbook_trunc(a, b, a.len() + b.len() - 1);
    }
    let h = a.len().max(b.len()).div_ceil(2);
    let (a0, a1) = a.split_at(a.len().min(h));
    let (b0, b1) = b.split_at(b.len().min(h));
    let z0 = karatsuba(a0, b0, threshold);
    let z2 = karatsuba(a1, b1, threshold);
    let sa: Vec<BigInt> = (0..h)
        .map(|i| {
            let lo = a0.get(i).cloned().unwrap_or_default();
            let hi = a1.get(i).cloned().unwrap_or_default();
            lo + hi
        })
        .collect();
    let sb: Vec<BigInt> = (0..h)
        .map(|i| {
            let lo = b0.get(i).cloned().unwrap_or_default();
            let hi = b1.get(i).cloned().unwrap_or_default();
            lo + hi
        })
        .collect();
    let mut z1 = karatsuba(&sa, &sb, threshold);
    for (i, v) in z0.iter().enumerate() {
        z1[i] -= v;
    }
    for (i, v) in z2.iter().enumerate() {
        z1[i] -= v;
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, v) in z0.into_iter().enumerate() {
        out[i] += v;
    }
    for (i, v) in z1.into_iter().enumerate() {
        if i + h < out.len() {
            out[i + h] += v;
        }
    }
    for (i, v) in z2.into_iter().enumerate() {
        out[i + 2 * h] += v;
    }
    out
}

/// q-expansion of Delta = q prod (1-q^n)^24, via (eta^3)^8 sparse folds.
/// coeffs[n] = tau(n).
pub fn delta_qexp(precision: usize) -> Result<IntegerPowerSeries> {
    if precision < 2 {
        return Err(Error::InvalidArgument(format!(
            "precision must be at least 2, got {precision}"
        )));
    }
    let n = precision - 1; // tau(n) for n < precision needs q-coefficients to n-1 of Delta/q
    let sparse = eta3_sparse(n);
    let mut series = IntegerPowerSeries::new(n);
    for &(e, c) in &sparse {
        series.coeffs[e] = BigInt::from(c);
    }
    for _ in 1..8 {
        series.fold_sparse(&sparse);
    }
    let mut coeffs = vec![BigInt::zero(); precision];
    for (i, v) in series.coeffs.into_iter().enumerate() {
        coeffs[i + 1] = v;
    }
    Ok(IntegerPowerSeries { coeffs })
}

fn sigma_series(precision: usize, power: u32, scale: i64) -> IntegerPowerSeries {
    let mut s = vec![0i128; precision];
    for d in 1..precision as u64 {
        let dp = (d as i128).pow(power);
        for m in (d as usize..precision).step_by(d as usize) {
            s[m] += dp;
        }
    }
    let mut out = IntegerPowerSeries::one(precision);
    for (m, v) in s.into_iter().enumerate().skip(1) {
        out.coeffs[m] = BigInt::from(v * scale as i128);
    }
    out
}

pub fn eisenstein_e4(precision: usize) -> IntegerPowerSeries {
    sigma_series(precision, 3, 240)
}

pub fn eisenstein_e6(precision: usize) -> IntegerPowerSeries {
    sigma_series(precision, 5, -504)
}

/// A Hecke eigenform with normalized eigenvalues lambda(n) = a(n)/n^{(k-1)/2}.
#[derive(Clone, Debug)]
pub struct Eigenform {
    pub weight: u32,
    pub level: u64,
    /// lambda[n] indexed by n, lambda[0] = 0
    pub lambda: Vec<f64>,
}

impl Eigenform {
    pub fn precision(&self) -> usize {
        self.lambda.len().saturating_sub(1)
    }

    pub fn lambda(&self, n: usize) -> f64 {
        self.lambda[n]
    }

    pub fn from_integer_coeffs(weight: u32, level: u64, coeffs: &[BigInt]) -> Self {
        let lambda = coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| {
                if n == 0 {
                    0.0
                } else {
                    big_to_f64(a) / (n as f64).powf((weight as f64 - 1.0) / 2.0)
                }
            })
            .collect();
        Eigenform { weight, level, lambda }
    }
}

fn big_to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Integer-level Hecke check a(m)a(n) = sum_{d | (m,n), (d,N)=1} d^{k-1} a(mn/d^2)
/// over all pairs with mn below the precision.
fn verify_hecke_integer(coeffs: &[BigInt], weight: u32, level: u64) -> Result<()> {
    let n_max = coeffs.len() - 1;
    for m in 2..=n_max {
        if m * m > n_max {
            break;
        }
        for n in m..=n_max / m {
            let g = arith::gcd(m as u64, n as u64);
            let mut rhs = BigInt::zero();
            for d in arith::divisors_of(g) {
                if arith::gcd(d, level) != 1 {
                    continue;
                }
                let idx = m * n / (d * d) as usize;
                rhs += BigInt::from(d).pow(weight - 1) * &coeffs[idx];
            }
            let lhs = &coeffs[m] * &coeffs[n];
            if lhs != rhs {
                return Err(Error::Integrity(format!(
                    "Hecke relation fails at (m, n) = ({m}, {n}): a(m)a(n) = {lhs}, expected {rhs}"
                )));
            }
        }
    }
    Ok(())
}

/// Eta quotient prod_i eta(m_i z)^{r_i} as an eigenform candidate. The level
/// is declared by the caller; the library verifies the integer Hecke relation
/// up to the precision and rejects non-eigenforms.
pub fn eta_quotient(
    pairs: &[(u32, i32)],
    weight: u32,
    level: u64,
    precision: usize,
) -> Result<Eigenform> {
    if pairs.iter().any(|&(_, r)| r < 0) {
        return Err(Error::Unsupported("negative eta exponents are not supported".into()));
    }
    let r_sum: i32 = pairs.iter().map(|&(_, r)| r).sum();
    if r_sum != 2 * weight as i32 {
        return Err(Error::InvalidArgument(format!(
            "exponent sum {r_sum} does not match weight {weight} (need sum r = 2k)"
        )));
    }
    let pref: i64 = pairs.iter().map(|&(m, r)| m as i64 * r as i64).sum();
    if pref % 24 != 0 || pref <= 0 {
        return Err(Error::InvalidArgument(format!(
            "q-power prefactor {pref}/24 is not a positive integer"
        )));
    }
    let shift = (pref / 24) as usize;
    if precision <= shift + 1 {
        return Err(Error::InvalidArgument("precision too small for the prefactor shift".into()));
    }
    let n = precision - shift;
    let mut series = IntegerPowerSeries::one(n);
    for &(m, r) in pairs {
        // eta(mz)^r / q^{mr/24}: fold the scaled pentagonal series r times
        let base = eta_sparse(n.div_ceil(m as usize));
        let scaled: Vec<(usize, i64)> =
            base.iter().map(|&(e, c)| (e * m as usize, c)).filter(|&(e, _)| e < n).collect();
        for _ in 0..r {
            series.fold_sparse(&scaled);
        }
    }
    let mut coeffs = vec![BigInt::zero(); precision];
    for (i, v) in series.coeffs.into_iter().enumerate() {
        if i + shift < precision {
            coeffs[i + shift] = v;
        }
    }
    if !coeffs[1].is_one() {
        return Err(Error::Integrity(format!(
            "first coefficient a(1) = {} is not 1; not a normalized newform",
            coeffs[1]
        )));
    }
    verify_hecke_integer(&coeffs, weight, level)?;
    Ok(Eigenform::from_integer_coeffs(weight, level, &coeffs))
}

/// Integer q-expansion of the unique normalized eigenform of S_k(1) for the
/// dimension-one weights, as Delta times an Eisenstein monomial.
pub fn level_one_qexp(weight: u32, precision: usize) -> Result<IntegerPowerSeries> {
    let (e4_pow, e6_pow) = match weight {
        12 => (0, 0),
        16 => (1, 0),
        18 => (0, 1),
        20 => (2, 0),
        22 => (1, 1),
        26 => (2, 1),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "weight {weight} does not have a one-dimensional level-one cusp space"
            )))
        }
    };
    let mut series = delta_qexp(precision)?;
    for _ in 0..e4_pow {
        series = series.mul(&eisenstein_e4(precision));
    }
    for _ in 0..e6_pow {
        series = series.mul(&eisenstein_e6(precision));
    }
    Ok(series)
}

pub fn level_one_eigenform(weight: u32, precision: usize) -> Result<Eigenform> {
    let series = level_one_qexp(weight, precision)?;
    Ok(Eigenform::from_integer_coeffs(weight, 1, &series.coeffs))
}

/// lambda(p^j) for a level-one form from the two-term Hecke recursion.
fn lambda_prime_power(f: &Eigenform, p: u64, j: u32) -> Result<f64> {
    if p as usize > f.precision() {
        return Err(Error::Precision(format!(
            "lambda({p}) is beyond the eigenform precision {}",
            f.precision()
        )));
    }
    let lp = f.lambda(p as usize);
    let mut prev = 1.0f64;
    let mut cur = lp;
    if j == 0 {
        return Ok(1.0);
    }
    for _ in 1..j {
        let next = lp * cur - prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// lambda(n^2) built multiplicatively from prime power values.
fn lambda_square(f: &Eigenform, n: u64) -> Result<f64> {
    let mut out = 1.0;
    for (p, e) in arith::factorize_u64(n) {
        out *= lambda_prime_power(f, p, 2 * e)?;
    }
    Ok(out)
}

/// The GL(3) coefficient array of the symmetric square lift.
#[derive(Clone, Debug)]
pub struct SymSquareCoefficients {
    pub source: Eigenform,
    pub m_max: usize,
    pub n_max: usize,
    a: Vec<f64>, // (m_max+1) x (n_max+1), row-major
}

impl SymSquareCoefficients {
    pub fn get(&self, m: usize, n: usize) -> f64 {
        if m == 0 || n == 0 || m > self.m_max || n > self.n_max {
            return 0.0;
        }
        self.a[m * (self.n_max + 1) + n]
    }
}

/// A_F(1, n) = sum_{m l^2 = n} lambda(m^2) for a level-one source form.
fn af_one(f: &Eigenform, n: u64) -> Result<f64> {
    let mut sum = 0.0;
    let mut l = 1u64;
    while l * l <= n {
        if n % (l * l) == 0 {
            sum += lambda_square(f, n / (l * l))?;
        }
        l += 1;
    }
    Ok(sum)
}

/// Tabulates A_F(m, n) for m <= M, n <= N: edge rows by the defining
/// decomposition, interior by the Moebius-Hecke relation
/// A_F(m, n) = sum_{d | (m,n)} mu(d) A_F(m/d, 1) A_F(1, n/d).
pub fn sym_square(f: &Eigenform, m_max: usize, n_max: usize) -> Result<SymSquareCoefficients> {
    if f.level != 1 {
        return Err(Error::InvalidArgument("symmetric square table requires a level-one form".into()));
    }
    let w = n_max + 1;
    let mut a = vec![0.0f64; (m_max + 1) * w];
    let mut row1 = vec![0.0f64; n_max.max(m_max) + 1];
    for n in 1..row1.len() {
        row1[n] = af_one(f, n as u64)?;
    }
    for n in 1..=n_max {
        a[w + n] = row1[n];
    }
    for m in 1..=m_max {
        a[m * w + 1] = row1[m];
    }
    for m in 2..=m_max {
        for n in 2..=n_max {
            let g = arith::gcd(m as u64, n as u64);
            let mut v = 0.0;
            for d in arith::divisors_of(g) {
                let mu = arith::mu_of(d);
                if mu != 0 {
                    v += mu as f64 * row1[m / d as usize] * row1[n / d as usize];
                }
            }
            a[m * w + n] = v;
        }
    }
    Ok(SymSquareCoefficients { source: f.clone(), m_max, n_max, a })
}

/// The same table built from a HeckeTable row, which reaches far higher
/// bounds than the q-expansion route. The source form keeps a short
/// eigenvalue prefix for metadata.
pub fn sym_square_from_table(
    table: &HeckeTable,
    m_max: usize,
    n_max: usize,
) -> Result<SymSquareCoefficients> {
    let need = m_max.max(n_max);
    if table.bound < need {
        return Err(Error::Precision(format!(
            "eigenvalue table reaches {}, need {need}",
            table.bound
        )));
    }
    let af1 = table.af1_table();
    let w = n_max + 1;
    let mut a = vec![0.0f64; (m_max + 1) * w];
    for n in 1..=n_max {
        a[w + n] = af1[n];
    }
    for m in 1..=m_max {
        a[m * w + 1] = af1[m];
    }
    for m in 2..=m_max {
        for n in 2..=n_max {
            a[m * w + n] = af_pair(&af1, m, n);
        }
    }
    let keep = table.bound.min(512);
    let source = Eigenform {
        weight: 12,
        level: 1,
        lambda: table.lambda[..=keep].to_vec(),
    };
    Ok(SymSquareCoefficients { source, m_max, n_max, a })
}

/// A_F(m, n) from a precomputed A_F(1, .) table via the Moebius-Hecke relation.
pub fn af_pair(af1: &[f64], m: usize, n: usize) -> f64 {
    if m == 0 || n == 0 {
        return 0.0;
    }
    if m == 1 {
        return af1[n];
    }
    if n == 1 {
        return af1[m];
    }
    let mut v = 0.0;
    for d in arith::divisors_of(arith::gcd(m as u64, n as u64)) {
        let mu = arith::mu_of(d);
        if mu != 0 {
            v += mu as f64 * af1[m / d as usize] * af1[n / d as usize];
        }
    }
    v
}

const EXACT_FOLD_BOUND: usize = 500_000;
const TABLE_CAP: usize = 20_000_000;
const SPLICE_HIGH: usize = 8_000_000;

/// Normalized Delta eigenvalues lambda(n) for n up to a large bound.
pub struct HeckeTable {
    pub bound: usize,
    /// lambda[n] indexed by n, lambda[0] = 0
    pub lambda: Vec<f64>,
}

impl HeckeTable {
    /// Exact i128 folds to 5e5; beyond that, f64 FFT squarings of eta powers
    /// with alias-controlled splices, checked against the exact segment.
    pub fn delta(bound: usize) -> Result<Self> {
        if bound < 2 {
            return Err(Error::InvalidArgument("bound must be at least 2".into()));
        }
        if bound > TABLE_CAP {
            return Err(Error::Unsupported(format!(
                "eigenvalue table capped at {TABLE_CAP}, requested {bound}"
            )));
        }
        let exact_len = bound.min(EXACT_FOLD_BOUND);
        let tau_exact = tau_exact_fold(exact_len);
        let mut lambda = vec![0.0f64; bound + 1];
        for n in 1..=exact_len {
            lambda[n] = tau_exact[n - 1] as f64 / (n as f64).powf(5.5);
        }
        if bound > exact_len {
            let tau_fft = tau_fft_segments(bound)?;
            for n in (exact_len + 1)..=bound {
                lambda[n] = tau_fft[n - 1] / (n as f64).powf(5.5);
            }
            // splice integrity: the FFT arrays cover the exact range too
            for n in (exact_len - 10)..=exact_len {
                let diff = (tau_fft[n - 1] / (n as f64).powf(5.5) - lambda[n]).abs();
                if diff > 1e-7 {
                    return Err(Error::Precision(format!(
                        "FFT eigenvalue segment disagrees with the exact fold at n = {n} by {diff:e}"
                    )));
                }
            }
        }
        Ok(HeckeTable { bound, lambda })
    }

    /// lambda(n^2) for n up to the bound, multiplicatively from the table.
    pub fn lambda_sq_table(&self) -> Vec<f64> {
        let n = self.bound;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                for j in (i..=n).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
        let mut out = vec![0.0f64; n + 1];
        if n >= 1 {
            out[1] = 1.0;
        }
        for i in 2..=n {
            let p = spf[i] as usize;
            let mut m = i;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            let lp = self.lambda[p];
            // lambda(p^{2e}) by the two-term recursion
            let mut prev = 1.0f64;
            let mut cur = lp;
            for _ in 1..(2 * e) {
                let next = lp * cur - prev;
                prev = cur;
                cur = next;
            }
            out[i] = out[m] * cur;
        }
        out
    }

    /// A_F(1, n) = sum_{l^2 | n} lambda((n/l^2)^2) for n up to the bound.
    pub fn af1_table(&self) -> Vec<f64> {
        let lsq = self.lambda_sq_table();
        let n = self.bound;
        let mut out = vec![0.0f64; n + 1];
        let mut l = 1usize;
        while l * l <= n {
            let step = l * l;
            for t in (step..=n).step_by(step) {
                out[t] += lsq[t / step];
            }
            l += 1;
        }
        out
    }
}

/// tau(n) for 1 <= n <= len as exact i128, tau[i] = tau(i+1).
///
/// The first three folds (up to eta^12, coefficients below 2^56... safely
/// inside i64 for len <= 5e5) run in i64; the remaining four in i128.
fn tau_exact_fold(len: usize) -> Vec<i128> {
    debug_assert!(len <= EXACT_FOLD_BOUND);
    let sparse = eta3_sparse(len);
    let mut small = vec![0i64; len];
    for &(e, c) in &sparse {
        small[e] = c;
    }
    for _ in 1..4 {
        let src = small;
        let mut next = vec![0i64; len];
        next.par_chunks_mut(1 << 14).enumerate().for_each(|(chunk, out)| {
            let base = chunk << 14;
            for (off, slot) in out.iter_mut().enumerate() {
                let n = base + off;
                let mut acc = 0i64;
                for &(e, c) in &sparse {
                    if e > n {
                        break;
                    }
                    acc += src[n - e] * c;
                }
                *slot = acc;
            }
        });
        small = next;
    }
    let mut cur: Vec<i128> = small.into_iter().map(|v| v as i128).collect();
    for _ in 4..8 {
        let src = cur;
        let mut next = vec![0i128; len];
        next.par_chunks_mut(1 << 14).enumerate().for_each(|(chunk, out)| {
            let base = chunk << 14;
            for (off, slot) in out.iter_mut().enumerate() {
                let n = base + off;
                let mut acc = 0i128;
                for &(e, c) in &sparse {
                    if e > n {
                        break;
                    }
                    acc += src[n - e] * c as i128;
                }
                *slot = acc;
            }
        });
        cur = next;
    }
    cur
}

/// Cyclic FFT square of a real sequence; entries below
/// (2 len(x)).saturating_sub(m_fft) are alias-corrupted.
fn fft_square(x: &[f64], m_fft: usize, out_len: usize) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m_fft];
    for (b, &v) in buf.iter_mut().zip(x) {
        b.re = v;
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m_fft);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fwd.get_inplace_scratch_len()];
    fwd.process_with_scratch(&mut buf, &mut scratch);
    for b in buf.iter_mut() {
        *b = *b * *b;
    }
    let inv = planner.plan_fft_inverse(m_fft);
    inv.process_with_scratch(&mut buf, &mut scratch);
    drop(scratch);
    let scale = 1.0 / m_fft as f64;
    buf.iter().take(out_len).map(|z| z.re * scale).collect()
}

/// tau(n) as f64 for n <= bound (tau[i] = tau(i+1)), by squaring
/// eta^6 -> eta^12 -> eta^24 with alias-safe FFT sizes.
fn tau_fft_segments(bound: usize) -> Result<Vec<f64>> {
    // eta^6 exactly, by pairing the sparse eta^3 supports
    let sparse = eta3_sparse(bound);
    let mut e6 = vec![0.0f64; bound];
    for (i, &(a, ca)) in sparse.iter().enumerate() {
        for &(b, cb) in &sparse[i..] {
            let s = a + b;
            if s >= bound {
                break;
            }
            let v = (ca * cb) as f64;
            e6[s] += if a == b { v } else { 2.0 * v };
        }
    }
    let e24 = if 2 * bound <= 1 << 25 {
        let m = (2 * bound).next_power_of_two();
        let e12 = fft_square(&e6, m, bound);
        fft_square(&e12, m, bound)
    } else {
        // stitch: alias-free low part to 8e6, 2^25 high part clean above it
        let m_low = (2 * SPLICE_HIGH).next_power_of_two();
        let m_high = 1 << 25;
        let clean_floor = 2 * bound - m_high;
        if clean_floor >= SPLICE_HIGH {
            return Err(Error::Unsupported("table bound exceeds the alias-stitch design".into()));
        }
        let low12 = fft_square(&e6[..SPLICE_HIGH], m_low, SPLICE_HIGH);
        let high12 = fft_square(&e6, m_high, bound);
        let mut e12 = low12;
        e12.extend_from_slice(&high12[SPLICE_HIGH..]);
        drop(high12);
        let low24 = fft_square(&e12[..SPLICE_HIGH], m_low, SPLICE_HIGH);
        let high24 = fft_square(&e12, m_high, bound);
        let mut out = low24;
        out.extend_from_slice(&high24[SPLICE_HIGH..]);
        out
    };
    Ok(e24)
}

/// Exact (below 2^53) integer coefficients of eta(z)^4 eta(5z)^4 as f64,
/// normalized to lambda_g(n) = a(n)/n^{3/2}; lambda[0] = 0.
pub fn lambda_g_table(bound: usize) -> Vec<f64> {
    let len = bound;
    let s3 = eta3_sparse(len);
    let s3_5 = eta3_sparse(len.div_ceil(5));
    // eta^3(z) eta^3(5z): sparse x sparse
    let mut dense = vec![0.0f64; len];
    for &(a, ca) in &s3 {
        for &(b, cb) in &s3_5 {
            let s = a + 5 * b;
            if s >= len {
                break;
            }
            dense[s] += (ca * cb) as f64;
        }
    }
    // fold in eta(z) and eta(5z)
    for (scale, sp) in [(1usize, eta_sparse(len)), (5usize, eta_sparse(len.div_ceil(5)))] {
        let src = dense;
        let mut next = vec![0.0f64; len];
        let terms: Vec<(usize, f64)> =
            sp.iter().map(|&(e, c)| (e * scale, c as f64)).filter(|&(e, _)| e < len).collect();
        next.par_chunks_mut(1 << 13).enumerate().for_each(|(chunk, out)| {
            let base = chunk << 13;
            for (off, slot) in out.iter_mut().enumerate() {
                let n = base + off;
                let mut acc = 0.0;
                for &(e, c) in &terms {
                    if e > n {
                        break;
                    }
                    acc += src[n - e] * c;
                }
                *slot = acc;
            }
        });
        dense = next;
    }
    // prefactor q^{24/24} = q^1: a(n) = dense[n-1]
    let mut lambda = vec![0.0f64; bound + 1];
    for n in 1..=bound {
        lambda[n] = dense[n - 1] / (n as f64).powf(1.5);
    }
    lambda
}

/// One row of the eigenvalue export format.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct EigenRow {
    pub n: usize,
    /// exact integer coefficient, string-encoded to survive JSON
    pub a: String,
    pub lambda: f64,
}

pub fn eigen_rows(coeffs: &[BigInt], weight: u32, up_to: usize) -> Vec<EigenRow> {
    (1..=up_to.min(coeffs.len().saturating_sub(1)))
        .map(|n| EigenRow {
            n,
            a: coeffs[n].to_string(),
            lambda: big_to_f64(&coeffs[n]) / (n as f64).powf((weight as f64 - 1.0) / 2.0),
        })
        .collect()
}

/// Rebuilds an eigenform from exported rows (externally supplied newforms).
pub fn eigenform_from_rows(weight: u32, level: u64, rows: &[EigenRow]) -> Result<Eigenform> {
    let n_max = rows.iter().map(|r| r.n).max().unwrap_or(0);
    if n_max == 0 {
        return Err(Error::InvalidArgument("no rows supplied".into()));
    }
    let mut lambda = vec![0.0f64; n_max + 1];
    for r in rows {
        lambda[r.n] = r.lambda;
    }
    if (lambda[1] - 1.0).abs() > 1e-12 {
        return Err(Error::Integrity("lambda(1) must be 1 for a normalized newform".into()));
    }
    Ok(Eigenform { weight, level, lambda })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_known_coefficients() {
        let d = delta_qexp(10).unwrap();
        let want: [i64; 9] = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(d.coeffs[i + 1], BigInt::from(*w), "tau({})", i + 1);
        }
        assert!(delta_qexp(1).is_err());
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let a: Vec<BigInt> = (0..100).map(|i| BigInt::from((i * i + 7) % 23 - 11)).collect();
        let b: Vec<BigInt> = (0..77).map(|i| BigInt::from((5 * i + 3) % 19 - 9)).collect();
        let full = karatsuba(&a, &b, 8);
        let school = schoolbook_trunc(&a, &b, a.len() + b.len() - 1);
        assert_eq!(full, school);
    }

    #[test]
    fn series_mul_keeps_min_precision() {
        let a = IntegerPowerSeries::one(10);
        let b = IntegerPowerSeries::one(7);
        assert_eq!(a.mul(&b).precision(), 7);
    }

    #[test]
    fn level_one_eigenvalues() {
        let f = level_one_eigenform(12, 40).unwrap();
        assert!((f.lambda(2) + 24.0 / 2f64.powf(5.5)).abs() < 1e-14);
        assert!((f.lambda(4) + 0.71875).abs() < 1e-14);
        assert!((f.lambda(4) - (f.lambda(2) * f.lambda(2) - 1.0)).abs() < 1e-14);
        let f16 = level_one_eigenform(16, 10).unwrap();
        assert!((f16.lambda(1) - 1.0).abs() == 0.0);
        // weight 16: a(2) = tau(2) + 240 = 216
        assert!((f16.lambda(2) - 216.0 / 2f64.powf(7.5)).abs() < 1e-14);
        assert!(level_one_eigenform(14, 10).is_err());
        // integer Hecke relation across the dimension-one weights
        for w in [12u32, 16, 18, 20, 22, 26] {
            let s = level_one_qexp(w, 60).unwrap();
            verify_hecke_integer(&s.coeffs, w, 1).unwrap();
        }
    }

    #[test]
    fn hecke_relation_normalized() {
        let t = HeckeTable::delta(40_000).unwrap();
        for m in 1..=200usize {
            for n in 1..=200usize {
                let lhs = t.lambda[m] * t.lambda[n];
                let g = arith::gcd(m as u64, n as u64);
                let rhs: f64 = arith::divisors_of(g)
                    .iter()
                    .map(|&d| t.lambda[m * n / (d * d) as usize])
                    .sum();
                assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()), "(m,n)=({m},{n})");
            }
        }
    }

    #[test]
    fn deligne_bound_delta() {
        let t = HeckeTable::delta(10_000).unwrap();
        for n in 1..=10_000usize {
            assert!(t.lambda[n].abs() <= arith::tau_of(n as u64) as f64 + 1e-9, "n={n}");
        }
    }

    #[test]
    fn eta_quotient_desk_form() {
        let g = eta_quotient(&[(1, 4), (5, 4)], 4, 5, 50).unwrap();
        assert_eq!(g.lambda(1), 1.0);
        assert!((g.lambda(2) + 4.0 / 2f64.powf(1.5)).abs() < 1e-14);
        assert!((g.lambda(5) * g.lambda(5) - 0.2).abs() < 1e-14);
        assert!(g.lambda(5) < 0.0);
        // wrong declared weight
        assert!(eta_quotient(&[(1, 4), (5, 4)], 6, 5, 50).is_err());
        // not an eigenform for the declared level: eta(z)^8 has prefactor 1/3
        assert!(eta_quotient(&[(1, 8)], 4, 1, 50).is_err());
    }

    #[test]
    fn eta_quotient_level_properties() {
        let g = eta_quotient(&[(1, 4), (5, 4)], 4, 5, 630).unwrap();
        for n in 1..=500usize {
            if n % 5 != 0 {
                assert!(g.lambda(n).abs() <= arith::tau_of(n as u64) as f64 + 1e-9, "n={n}");
            }
        }
        let l5 = g.lambda(5);
        assert!((g.lambda(25) - l5 * l5).abs() < 1e-12);
        assert!((g.lambda(125) - l5 * l5 * l5).abs() < 1e-12);
    }

    #[test]
    fn sym_square_desk_values() {
        let f = level_one_eigenform(12, 50).unwrap();
        let s = sym_square(&f, 8, 8).unwrap();
        assert_eq!(s.get(1, 1), 1.0);
        assert!((s.get(1, 2) + 0.71875).abs() < 1e-12);
        // A_F(1,4) = lambda(16) + 1
        let l16 = lambda_prime_power(&f, 2, 4).unwrap();
        assert!((s.get(1, 4) - (l16 + 1.0)).abs() < 1e-12);
        let want = [
            1.0,
            -0.71875,
            -0.64151806,
            1.23535156,
            -0.52222413,
            0.46109111,
            -0.85821183,
            -0.4045105,
        ];
        for (n, w) in want.iter().enumerate() {
            assert!((s.get(1, n + 1) - w).abs() < 1e-7, "A_F(1,{})", n + 1);
        }
        assert_eq!(s.get(0, 3), 0.0);
        assert_eq!(s.get(3, 0), 0.0);
    }

    #[test]
    fn sym_square_moebius_roundtrip() {
        let f = level_one_eigenform(12, 200).unwrap();
        let s = sym_square(&f, 12, 12).unwrap();
        for m in 1..=12usize {
            for n in 1..=12usize {
                let mut v = 0.0;
                for d in arith::divisors_of(arith::gcd(m as u64, n as u64)) {
                    let mu = arith::mu_of(d);
                    if mu != 0 {
                        v += mu as f64 * s.get(m / d as usize, 1) * s.get(1, n / d as usize);
                    }
                }
                assert!((s.get(m, n) - v).abs() < 1e-10, "(m,n)=({m},{n})");
            }
        }
    }

    #[test]
    fn sym_square_reports_missing_precision() {
        let f = level_one_eigenform(12, 5).unwrap();
        match sym_square(&f, 1, 20) {
            Err(Error::Precision(msg)) => assert!(msg.contains("lambda(")),
            other => panic!("expected precision error, got {other:?}"),
        }
    }

    #[test]
    fn hecke_table_matches_bigint() {
        let t = HeckeTable::delta(3000).unwrap();
        let d = delta_qexp(3001).unwrap();
        for n in [1usize, 2, 24, 691, 1000, 2999] {
            let want = big_to_f64(&d.coeffs[n]) / (n as f64).powf(5.5);
            assert!((t.lambda[n] - want).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn hecke_table_fft_splice() {
        // the constructor itself cross-checks the FFT segment against the
        // exact fold at the splice and fails on disagreement
        let t = HeckeTable::delta(600_000).unwrap();
        let d = delta_qexp(1001).unwrap();
        for n in [2usize, 691, 1000] {
            let want = big_to_f64(&d.coeffs[n]) / (n as f64).powf(5.5);
            assert!((t.lambda[n] - want).abs() < 1e-12, "n={n}");
        }
        assert!(t.lambda[600_000].abs() < 100.0); // crude sanity: |lambda| <= tau
    }

    #[test]
    fn af1_table_matches_desk() {
        let t = HeckeTable::delta(100).unwrap();
        let af1 = t.af1_table();
        let f = level_one_eigenform(12, 120).unwrap();
        let s = sym_square(&f, 8, 60).unwrap();
        for n in 1..=60usize {
            assert!((af1[n] - s.get(1, n)).abs() < 1e-10, "n={n}");
        }
        // af_pair edge agreement
        assert_eq!(af_pair(&af1, 3, 1), af1[3]);
        assert!((af_pair(&af1, 6, 4) - s.get(6, 4)).abs() < 1e-10);
    }

    #[test]
    fn lambda_g_table_matches_eta_quotient() {
        let tbl = lambda_g_table(400);
        let g = eta_quotient(&[(1, 4), (5, 4)], 4, 5, 401).unwrap();
        for n in 1..=400usize {
            assert!((tbl[n] - g.lambda(n)).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn eigen_rows_roundtrip() {
        let s = level_one_qexp(12, 12).unwrap();
        let rows = eigen_rows(&s.coeffs, 12, 10);
        assert_eq!(rows[1].n, 2);
        assert_eq!(rows[1].a, "-24");
        let json = serde_json::to_string(&rows).unwrap();
        let back: Vec<EigenRow> = serde_json::from_str(&json).unwrap();
        let f = eigenform_from_rows(12, 1, &back).unwrap();
        assert!((f.lambda(2) + 24.0 / 2f64.powf(5.5)).abs() < 1e-15);
    }
}
