//! Petersson averages over cusp form bases.
//!
//! The spectral average Delta_{k,N}(m,n) is computed from its geometric
//! side: a Kronecker delta plus Kloosterman sums weighted by Bessel J.
//! The c-sum is truncated at a point where a fully explicit tail bound
//! (Weil bound times the Bessel series bound) drops below the requested
//! tolerance, so every returned value carries a certificate. On top of
//! that sits the newform sieve Delta*_{k,N} for squarefree level and the
//! harmonic weight omega of a one-dimensional newform space.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::arith;
use crate::error::{Error, Result};
use crate::lfunc::special_value_l1_sym2;
use crate::qexp::Eigenform;
use crate::special::bessel_j;

const COS_BITS: u32 = 16;
const COS_M: usize = 1 << COS_BITS;

/// Shared state for long c-sums: a smallest-prime-factor sieve and a
/// cosine table read through cubic interpolation. Everything here is
/// exact integer or sub-1e-16 arithmetic; moduli are capped so that all
/// products fit in the 53-bit mantissa.
struct CKernel {
    spf: Vec<u32>,
    cos_tab: Vec<f64>,
}

/// Exact a*b mod c for a, b < c with c^2 < 2^53.
#[inline]
fn mulmod_f(a: u64, b: u64, c: u64, c_inv: f64) -> u64 {
    let p = a as f64 * b as f64;
    let q = (p * c_inv) as i64;
    let mut r = (a * b) as i64 - q * c as i64;
    if r < 0 {
        r += c as i64;
    }
    if r >= c as i64 {
        r -= c as i64;
    }
    r as u64
}

impl CKernel {
    fn new(c_max: u64) -> CKernel {
        let n = c_max as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        // tab[j] holds cos(2 pi (j - 1) / M) so the interpolation stencil
        // never branches at the ends
        let cos_tab = (0..COS_M + 3)
            .map(|j| (2.0 * PI * (j as f64 - 1.0) / COS_M as f64).cos())
            .collect();
        CKernel { spf, cos_tab }
    }

    /// cos(2 pi r / c) by Catmull-Rom interpolation, error below 1e-17.
    #[inline]
    fn cosine(&self, r: u64, c: u64) -> f64 {
        let t = r as f64 / c as f64 * COS_M as f64;
        let i = t as usize;
        let u = t - i as f64;
        let p0 = self.cos_tab[i];
        let p1 = self.cos_tab[i + 1];
        let p2 = self.cos_tab[i + 2];
        let p3 = self.cos_tab[i + 3];
        0.5 * (2.0 * p1
            + u * ((p2 - p0)
                + u * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3)
                    + u * (3.0 * (p1 - p2) + p3 - p0))))
    }
}

/// Per-worker buffers so the block loop never allocates.
struct CScratch {
    inv: Vec<u32>,
    stamp: Vec<u32>,
    gen: u32,
    units: Vec<u32>,
    prefix: Vec<u32>,
}

impl CScratch {
    fn new(c_max: u64) -> CScratch {
        CScratch {
            inv: vec![0; c_max as usize + 1],
            stamp: vec![0; c_max as usize + 1],
            gen: 0,
            units: Vec::with_capacity(c_max as usize),
            prefix: Vec::with_capacity(c_max as usize),
        }
    }
}

impl CScratch {
    /// Fill inv[a] for every unit a mod c and stamp the non-units with the
    /// current generation. Prime moduli use the linear inverse recurrence,
    /// composite ones a sieve mask plus one batched inversion chain.
    fn build_inverses(&mut self, kern: &CKernel, c: u64) {
        let c_inv = 1.0 / c as f64;
        self.gen += 1;
        let gen = self.gen;
        if kern.spf[c as usize] as u64 == c {
            self.inv[1] = 1;
            for a in 2..c {
                let q = c - c / a;
                self.inv[a as usize] =
                    mulmod_f(q, self.inv[(c % a) as usize] as u64, c, c_inv) as u32;
            }
            return;
        }
        let mut q = c as usize;
        while q > 1 {
            let p = kern.spf[q] as usize;
            let mut j = p;
            while j < c as usize {
                self.stamp[j] = gen;
                j += p;
            }
            while q % p == 0 {
                q /= p;
            }
        }
        self.units.clear();
        self.prefix.clear();
        let mut acc = 1u64;
        for a in 1..c {
            if self.stamp[a as usize] != gen {
                self.units.push(a as u32);
                acc = mulmod_f(acc, a, c, c_inv);
                self.prefix.push(acc as u32);
            }
        }
        let mut inv_acc =
            arith::inv_mod(acc as i64, c as i64).expect("product of units is a unit") as u64;
        for i in (0..self.units.len()).rev() {
            let prev = if i == 0 { 1 } else { self.prefix[i - 1] as u64 };
            self.inv[self.units[i] as usize] = mulmod_f(inv_acc, prev, c, c_inv) as u32;
            inv_acc = mulmod_f(inv_acc, self.units[i] as u64, c, c_inv);
        }
    }

    /// S(m, n; c) from the inverses of the current generation.
    fn sum_pair(&self, kern: &CKernel, m: u64, n: u64, c: u64) -> f64 {
        let mm = m % c;
        let nn = n % c;
        let c_inv = 1.0 / c as f64;
        let gen = self.gen;
        let mut sum = 0.0;
        for a in 1..c {
            if self.stamp[a as usize] != gen {
                let r = (mulmod_f(mm, a, c, c_inv)
                    + mulmod_f(nn, self.inv[a as usize] as u64, c, c_inv))
                    % c;
                sum += kern.cosine(r, c);
            }
        }
        sum
    }
}

/// S(m, n; c) with the shared kernel.
fn kloosterman_fast(kern: &CKernel, scr: &mut CScratch, m: u64, n: u64, c: u64) -> f64 {
    if c == 1 {
        return 1.0;
    }
    scr.build_inverses(kern, c);
    scr.sum_pair(kern, m, n, c)
}

/// Certified truncation data for one geometric sum.
#[derive(Clone, Copy, Debug)]
pub struct PeterssonParams {
    pub weight: u32,
    pub level: u64,
    pub tol: f64,
    pub c_max: u64,
    /// explicit bound on the discarded c-tail, always below tol
    pub tail_bound: f64,
}

fn check_weight(k: u32) -> Result<()> {
    if k == 2 {
        return Err(Error::Unsupported(
            "weight 2 has no convergent tail bound".into(),
        ));
    }
    if k < 4 || k % 2 != 0 || k > 64 {
        return Err(Error::InvalidArgument(format!(
            "weight must be even and in [4, 64], got {k}"
        )));
    }
    Ok(())
}

fn check_level(n: u64) -> Result<()> {
    if n == 0 || arith::mu_of(n) == 0 {
        return Err(Error::InvalidArgument(format!(
            "level must be squarefree and positive, got {n}"
        )));
    }
    Ok(())
}

/// Upper bound for zeta(beta), beta > 1.
fn zeta_upper(beta: f64) -> f64 {
    let mut s = 0.0;
    for n in 1..=200u32 {
        s += (n as f64).powf(-beta);
    }
    s + 200f64.powf(1.0 - beta) / (beta - 1.0)
}

/// Explicit bound on 2 pi Sigma_{c > C} tau(c) c^{-1/2} |J_{k-1}(4 pi sqrt(mn)/c)|,
/// using |J_nu(x)| <= (x/2)^nu / nu! and tau(c) opened as a divisor sum.
fn tail_bound(k: u32, m: u64, n: u64, c: f64) -> f64 {
    let beta = k as f64 - 0.5;
    let b = 2.0 * PI * ((m as f64) * (n as f64)).sqrt();
    let pref = 2.0 * PI
        * ((k as f64 - 1.0) * b.ln() - crate::special::log_gamma_real(k as f64)).exp();
    let z = zeta_upper(beta);
    let t = c.powf(1.0 - beta) * (1.0 + (1.0 + c.ln() + z) / (beta - 1.0))
        + (1.0 + z) * c.powf(-beta);
    pref * t
}

impl PeterssonParams {
    /// Smallest multiple of the level whose certified tail is below tol.
    pub fn new(k: u32, level: u64, m: u64, n: u64, tol: f64) -> Result<PeterssonParams> {
        check_weight(k)?;
        check_level(level)?;
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument("indices must be positive".into()));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidArgument(format!("tolerance {tol} out of range")));
        }
        // conservative seed, then bisect down to the certified minimum
        let b = 4.0 * PI * ((m as f64) * (n as f64)).sqrt();
        let seed = b * tol.powf(-1.0 / (k as f64 - 2.5)) / level as f64;
        let mut hi = (seed.ceil() as u64).max(1);
        let mut grew = false;
        while tail_bound(k, m, n, (hi * level) as f64) > tol {
            hi = hi.saturating_mul(2);
            grew = true;
            if hi > (1 << 33) {
                return Err(Error::Convergence(format!(
                    "tolerance {tol:e} needs more than 2^33 moduli at weight {k}"
                )));
            }
        }
        let mut lo = if grew { hi / 2 } else { 1 };
        while lo + 1 < hi {
            let mid = lo + (hi - lo) / 2;
            if tail_bound(k, m, n, (mid * level) as f64) > tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let c_max = hi * level;
        Ok(PeterssonParams {
            weight: k,
            level,
            tol,
            c_max,
            tail_bound: tail_bound(k, m, n, c_max as f64),
        })
    }
}

/// i^{-k} for even k.
fn phase_sign(k: u32) -> f64 {
    if (k / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// One block of the c-sum, sequential inside so the reduction order is fixed.
fn c_block_sum(
    kern: &CKernel,
    scr: &mut CScratch,
    k: u32,
    m: u64,
    n: u64,
    level: u64,
    j_lo: u64,
    j_hi: u64,
) -> f64 {
    let nu = (k - 1) as f64;
    let x0 = 4.0 * PI * ((m as f64) * (n as f64)).sqrt();
    let mut sum = 0.0;
    for j in j_lo..j_hi {
        let c = (j + 1) * level;
        sum += kloosterman_fast(kern, scr, m, n, c) / c as f64 * bessel_j(nu, x0 / c as f64);
    }
    sum
}

const C_BLOCK: u64 = 256;

/// Above this cutoff the f64 reduction would lose exactness; no certified
/// truncation in range ever gets close.
const C_FAST_CAP: u64 = 1 << 24;

/// Geometric side of the Petersson average:
/// delta(m,n) + 2 pi i^{-k} Sigma_{N | c} S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c),
/// summed to the certified cutoff of PeterssonParams.
pub fn delta_geometric(k: u32, level: u64, m: u64, n: u64, tol: f64) -> Result<f64> {
    let params = PeterssonParams::new(k, level, m, n, tol)?;
    if params.c_max > C_FAST_CAP {
        return Err(Error::Convergence(format!(
            "certified cutoff {} exceeds the exact-arithmetic cap",
            params.c_max
        )));
    }
    let kern = CKernel::new(params.c_max);
    let blocks = params.c_max / level / C_BLOCK + 1;
    // fixed blocks and an ordered fold keep the result independent of the
    // worker count
    let partials: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map_init(
            || CScratch::new(params.c_max),
            |scr, b| {
                let j_lo = b * C_BLOCK;
                let j_hi = ((b + 1) * C_BLOCK).min(params.c_max / level);
                c_block_sum(&kern, scr, k, m, n, level, j_lo, j_hi)
            },
        )
        .collect();
    let sum: f64 = partials.iter().sum();
    let delta = if m == n { 1.0 } else { 0.0 };
    Ok(delta + 2.0 * PI * phase_sign(k) * sum)
}

/// Full grid Delta_{k,N}(m,n) for 1 <= m <= m_max, 1 <= n <= n_max, sharing
/// one unit table per modulus across all pairs. The truncation is certified
/// for the worst pair, so every entry is at least as accurate.
pub fn delta_grid(
    k: u32,
    level: u64,
    m_max: u64,
    n_max: u64,
    tol: f64,
) -> Result<Vec<Vec<f64>>> {
    let params = PeterssonParams::new(k, level, m_max, n_max, tol)?;
    if params.c_max > C_FAST_CAP {
        return Err(Error::Convergence(format!(
            "certified cutoff {} exceeds the exact-arithmetic cap",
            params.c_max
        )));
    }
    let nu = (k - 1) as f64;
    let j_count = params.c_max / level;
    let blocks = j_count / C_BLOCK + 1;
    let zero = vec![vec![0.0f64; n_max as usize]; m_max as usize];
    let add = |mut a: Vec<Vec<f64>>, b: Vec<Vec<f64>>| {
        for (ra, rb) in a.iter_mut().zip(&b) {
            for (x, y) in ra.iter_mut().zip(rb) {
                *x += y;
            }
        }
        a
    };
    let kern = CKernel::new(params.c_max);
    let partials: Vec<Vec<Vec<f64>>> = (0..blocks)
        .into_par_iter()
        .map_init(
            || CScratch::new(params.c_max),
            |scr, bk| {
                let mut acc = vec![vec![0.0f64; n_max as usize]; m_max as usize];
                for j in bk * C_BLOCK..((bk + 1) * C_BLOCK).min(j_count) {
                    let c = (j + 1) * level;
                    let cf = c as f64;
                    if c > 1 {
                        // one inverse table serves every pair at this modulus
                        scr.build_inverses(&kern, c);
                    }
                    for m in 1..=m_max {
                        for n in m..=n_max.max(m).min(n_max) {
                            if n > n_max {
                                continue;
                            }
                            let s = if c == 1 {
                                1.0
                            } else {
                                scr.sum_pair(&kern, m, n, c)
                            };
                            let x = 4.0 * PI * ((m * n) as f64).sqrt() / cf;
                            let v = s / cf * bessel_j(nu, x);
                            acc[m as usize - 1][n as usize - 1] += v;
                            // S(m,n;c) = S(n,m;c) lets the grid fold its mirror
                            if n != m && n <= m_max && m <= n_max {
                                acc[n as usize - 1][m as usize - 1] += v;
                            }
                        }
                    }
                }
                acc
            },
        )
        .collect();
    let sum = partials.into_iter().fold(zero, add);
    let scale = 2.0 * PI * phase_sign(k);
    let out = (1..=m_max)
        .map(|m| {
            (1..=n_max)
                .map(|n| {
                    let delta = if m == n { 1.0 } else { 0.0 };
                    delta + scale * sum[m as usize - 1][n as usize - 1]
                })
                .collect()
        })
        .collect();
    Ok(out)
}

/// nu(n) = n prod_{p | n} (1 + 1/p).
fn nu_of(n: u64) -> f64 {
    let mut v = n as f64;
    for (p, _) in arith::factorize_u64(n) {
        v *= 1.0 + 1.0 / p as f64;
    }
    v
}

/// Ascending powers products of the primes of l, capped.
fn smooth_numbers(primes: &[u64], cap: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for &p in primes {
        let mut next = Vec::new();
        for &v in &out {
            let mut w = v;
            while w <= cap {
                next.push(w);
                match w.checked_mul(p) {
                    Some(x) => w = x,
                    None => break,
                }
            }
        }
        out = next;
    }
    out.sort_unstable();
    out
}

/// Newform-only average Delta*_{k,N}(m,n) for squarefree N and (m,N)=1,
/// expanded into full-space averages at the divisor levels:
/// Sigma_{LR=N} mu(L)/(L nu((n,L))) Sigma_{l | L^inf} l^{-1}
/// Sigma_{l1 | L, l1^2 | n} mu(l1) l1 Delta_{k,R}(m l^2, n / l1^2).
pub fn delta_star(k: u32, level: u64, m: u64, n: u64, tol: f64) -> Result<f64> {
    check_weight(k)?;
    check_level(level)?;
    if arith::gcd(m, level) != 1 {
        return Err(Error::InvalidArgument(format!(
            "the first index {m} must be coprime to the level {level}"
        )));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} out of range")));
    }
    let mut total = 0.0;
    for l_div in arith::divisors_of(level) {
        let r = level / l_div;
        let coef = arith::mu_of(l_div) as f64 / (l_div as f64 * nu_of(arith::gcd(n, l_div)));
        let l1s: Vec<u64> = arith::divisors_of(l_div)
            .into_iter()
            .filter(|&l1| n % (l1 * l1) == 0)
            .collect();
        let primes: Vec<u64> = arith::factorize_u64(l_div).into_iter().map(|(p, _)| p).collect();
        let cap = l_div.saturating_mul(l_div).saturating_mul(l_div).saturating_mul(l_div);
        let ells = smooth_numbers(&primes, cap);
        let inner_share = tol / (8.0 * l1s.len() as f64);
        let mut branch_peak = 0.0f64;
        for (idx, &ell) in ells.iter().enumerate() {
            // magnitude estimate from the values seen so far in this branch
            if idx > 0 {
                let est = coef.abs() * branch_peak.max(tol) / ell as f64;
                if est < tol / 4.0 {
                    break;
                }
            }
            let mut term = 0.0;
            for &l1 in &l1s {
                let inner_tol = (inner_share * ell as f64 / l1 as f64).min(0.5);
                let d = delta_geometric(k, r, m * ell * ell, n / (l1 * l1), inner_tol)?;
                branch_peak = branch_peak.max(d.abs());
                term += arith::mu_of(l1) as f64 * l1 as f64 * d;
            }
            total += coef * term / ell as f64;
        }
    }
    Ok(total)
}

/// The earlier closed form without the l1 correction layer; valid when
/// every prime of the level divides n at most once, flagged otherwise.
pub fn delta_star_original(k: u32, level: u64, m: u64, n: u64, tol: f64) -> Result<f64> {
    check_weight(k)?;
    check_level(level)?;
    if arith::gcd(m, level) != 1 {
        return Err(Error::InvalidArgument(format!(
            "the first index {m} must be coprime to the level {level}"
        )));
    }
    if arith::factorize_u64(level)
        .iter()
        .any(|&(p, _)| n % (p * p) == 0)
    {
        log::warn!(
            "delta_star_original: level prime squared divides n = {n}; \
             the closed form is outside its domain here"
        );
    }
    let mut total = 0.0;
    for l_div in arith::divisors_of(level) {
        let r = level / l_div;
        let coef = arith::mu_of(l_div) as f64 / (l_div as f64 * nu_of(arith::gcd(n, l_div)));
        let primes: Vec<u64> = arith::factorize_u64(l_div).into_iter().map(|(p, _)| p).collect();
        let cap = l_div.saturating_mul(l_div).saturating_mul(l_div).saturating_mul(l_div);
        let ells = smooth_numbers(&primes, cap);
        let mut branch_peak = 0.0f64;
        for (idx, &ell) in ells.iter().enumerate() {
            if idx > 0 {
                let est = coef.abs() * branch_peak.max(tol) / ell as f64;
                if est < tol / 4.0 {
                    break;
                }
            }
            let inner_tol = (tol / 8.0 * ell as f64).min(0.5);
            let d = delta_geometric(k, r, m * ell * ell, n, inner_tol)?;
            branch_peak = branch_peak.max(d.abs());
            total += coef * d / ell as f64;
        }
    }
    Ok(total)
}

/// Harmonic weight omega_g of the unique newform of its space, through the
/// sieve normalization omega_g = 1 / Delta*_{k,N}(1,1). A second route via
/// (k-1) N / (2 pi^2) L(1, Sym^2 g) is compared when coefficients allow;
/// disagreement beyond a part in a thousand logs an integrity warning since
/// the smoothed L-route tail is the usual suspect.
pub fn omega_newform(g: &Eigenform) -> Result<f64> {
    let dstar = delta_star(g.weight, g.level, 1, 1, 1e-6)?;
    if dstar <= 0.0 {
        return Err(Error::Integrity(format!(
            "Delta*(1,1) = {dstar} is not positive; it is a sum of positive weights"
        )));
    }
    let omega = 1.0 / dstar;
    match special_value_l1_sym2(g, 1e-3) {
        Ok(l1) => {
            let via_l = (g.weight as f64 - 1.0) * g.level as f64 / (2.0 * PI * PI) * l1;
            if (via_l - omega).abs() > 1e-3 * omega {
                log::warn!(
                    "omega routes disagree: sieve {omega:.8}, L-value {via_l:.8}"
                );
            }
        }
        Err(_) => {}
    }
    Ok(omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qexp::{eta_quotient, HeckeTable};

    fn desk_g(precision: usize) -> Eigenform {
        eta_quotient(&[(1, 4), (5, 4)], 4, 5, precision).unwrap()
    }

    #[test]
    fn fast_kernel_matches_reference() {
        let kern = CKernel::new(4100);
        let mut scr = CScratch::new(4100);
        // primes, prime powers, and composites of every parity
        for c in [2u64, 3, 4, 5, 8, 9, 12, 30, 97, 128, 243, 720, 1009, 2048, 3989, 4096] {
            for (m, n) in [(1u64, 1u64), (1, 2), (7, 13), (20, 20), (625, 3)] {
                let fast = kloosterman_fast(&kern, &mut scr, m, n, c);
                let slow = arith::kloosterman(m as i64, n as i64, c);
                assert!(
                    (fast - slow).abs() < 1e-9 * (c as f64).max(16.0),
                    "S({m},{n};{c}): {fast} vs {slow}"
                );
            }
        }
    }

    fn delta_form(bound: usize) -> Eigenform {
        let table = HeckeTable::delta(bound).unwrap();
        Eigenform { weight: 12, level: 1, lambda: table.lambda }
    }

    const L1_SYM2_DELTA: f64 = 0.6317929457278845;

    #[test]
    fn params_certify_and_validate() {
        let p = PeterssonParams::new(12, 1, 20, 20, 1e-8).unwrap();
        assert!(p.tail_bound < 1e-8);
        assert!(p.c_max >= 200 && p.c_max < 5000);
        let q = PeterssonParams::new(12, 5, 1, 1, 1e-8).unwrap();
        assert_eq!(q.c_max % 5, 0);
        // tighter tolerance never shortens the sum
        let r = PeterssonParams::new(12, 1, 20, 20, 1e-10).unwrap();
        assert!(r.c_max > p.c_max);
        assert!(matches!(PeterssonParams::new(2, 1, 1, 1, 1e-6), Err(Error::Unsupported(_))));
        assert!(matches!(PeterssonParams::new(7, 1, 1, 1, 1e-6), Err(Error::InvalidArgument(_))));
        assert!(matches!(PeterssonParams::new(4, 12, 1, 1, 1e-6), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn zero_space_certified() {
        // dim S_k(1) = 0 below weight 12, so the geometric side must cancel
        // to the certified tolerance on its own
        let d = delta_geometric(4, 1, 1, 1, 2e-6).unwrap();
        assert!(d.abs() < 2.1e-6, "weight 4 residual {d}");
        let d = delta_geometric(6, 1, 1, 1, 1e-9).unwrap();
        assert!(d.abs() < 1.1e-9, "weight 6 residual {d}");
        let d = delta_geometric(8, 1, 2, 3, 1e-9).unwrap();
        assert!(d.abs() < 1.1e-9, "weight 8 residual {d}");
        let d = delta_geometric(10, 1, 3, 2, 1e-9).unwrap();
        assert!(d.abs() < 1.1e-9, "weight 10 residual {d}");
    }

    #[test]
    fn spectral_oracle_weight_twelve() {
        let omega = 11.0 / (2.0 * PI * PI) * L1_SYM2_DELTA;
        let d11 = delta_geometric(12, 1, 1, 1, 1e-8).unwrap();
        assert!((d11 - 1.0 / omega).abs() < 2e-8, "{d11} vs {}", 1.0 / omega);
        let f = delta_form(30);
        let d23 = delta_geometric(12, 1, 2, 3, 1e-8).unwrap();
        let want = f.lambda(2) * f.lambda(3) / omega;
        assert!((d23 - want).abs() < 2e-8, "{d23} vs {want}");
    }

    #[test]
    fn grid_agrees_with_scalar() {
        let grid = delta_grid(12, 1, 4, 4, 1e-8).unwrap();
        for m in 1..=4u64 {
            for n in 1..=4u64 {
                let d = delta_geometric(12, 1, m, n, 1e-8).unwrap();
                let g = grid[m as usize - 1][n as usize - 1];
                assert!((d - g).abs() < 2e-8, "({m},{n}): {d} vs {g}");
            }
        }
    }

    #[test]
    fn star_reduces_at_level_one() {
        let a = delta_star(12, 1, 2, 3, 1e-8).unwrap();
        let b = delta_geometric(12, 1, 2, 3, 1e-8).unwrap();
        assert!((a - b).abs() < 2e-8, "{a} vs {b}");
    }

    #[test]
    fn star_dim_one_oracle() {
        // S_4(G0(5)) is spanned by the eta quotient; the sieve value is its
        // inverse harmonic weight
        let d = delta_star(4, 5, 1, 1, 1e-4).unwrap();
        let g = desk_g(26_000);
        let l1 = special_value_l1_sym2(&g, 2e-3).unwrap();
        let omega = 3.0 * 5.0 / (2.0 * PI * PI) * l1;
        assert!((d - 1.0 / omega).abs() < 5e-3 / omega, "{d} vs {}", 1.0 / omega);
    }

    #[test]
    fn star_refinement_cauchy() {
        let a = delta_star(4, 5, 1, 1, 1e-3).unwrap();
        let b = delta_star(4, 5, 1, 1, 1e-4).unwrap();
        assert!((a - b).abs() < 1e-3, "{a} vs {b}");
    }

    #[test]
    fn star_preconditions() {
        assert!(matches!(delta_star(12, 5, 10, 1, 1e-6), Err(Error::InvalidArgument(_))));
        assert!(matches!(delta_star(12, 4, 1, 1, 1e-6), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn star_original_agrees_on_its_domain() {
        for n in [1u64, 2, 5, 10] {
            let a = delta_star(8, 5, 1, n, 1e-6).unwrap();
            let b = delta_star_original(8, 5, 1, n, 1e-6).unwrap();
            assert!((a - b).abs() < 1e-9, "n = {n}: {a} vs {b}");
        }
    }

    #[test]
    fn omega_desk_window_and_l_route() {
        let g = desk_g(26_000);
        let omega = omega_newform(&g).unwrap();
        let scale = 3.0 * 5.0;
        assert!(0.1 * scale < 2.0 * PI * PI * omega && 2.0 * PI * PI * omega < 10.0 * scale);
        let l1 = special_value_l1_sym2(&g, 2e-3).unwrap();
        let via_l = scale / (2.0 * PI * PI) * l1;
        assert!((omega - via_l).abs() < 5e-3 * omega, "{omega} vs {via_l}");
    }

    #[test]
    fn omega_delta_matches_l_route() {
        let f = delta_form(30);
        let omega = omega_newform(&f).unwrap();
        let want = 11.0 / (2.0 * PI * PI) * L1_SYM2_DELTA;
        assert!((omega - want).abs() < 1e-4 * want, "{omega} vs {want}");
    }

    #[test]
    fn trivial_bound_envelope() {
        for level in [1u64, 5] {
            let grid = delta_grid(12, level, 6, 6, 1e-6).unwrap();
            for m in 1..=6usize {
                for n in 1..=6usize {
                    let cap = 10.0 * ((level * 12) as f64 * (m * n) as f64).powf(0.1);
                    assert!(grid[m - 1][n - 1].abs() < cap);
                }
            }
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let a = delta_geometric(12, 1, 5, 7, 1e-8).unwrap();
        let b = delta_geometric(12, 1, 5, 7, 1e-8).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
