//! Exact exponential-sum and multiplicative-function arithmetic.
//!
//! Kloosterman sums are evaluated by direct summation over units with
//! batch-inverted residues, by an all-residue DFT when every S(l, v; c)
//! for fixed c is needed, or by CRT splitting for factored moduli.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Sieve-backed tables of mu, phi, tau and nu(n) = n prod_{p|n} (1 + 1/p).
pub struct MultiplicativeTables {
    pub bound: usize,
    /// smallest prime factor, spf[1] = 1
    pub spf: Vec<u32>,
    pub mu: Vec<i8>,
    pub phi: Vec<u64>,
    pub tau: Vec<u32>,
    /// nu(n) as a reduced fraction (num, den)
    pub nu: Vec<(u64, u64)>,
}

impl MultiplicativeTables {
    pub fn new(bound: usize) -> Self {
        let n = bound + 1;
        let mut spf = vec![0u32; n];
        for i in 2..n {
            if spf[i] == 0 {
                for j in (i..n).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
        if n > 1 {
            spf[1] = 1;
        }
        let mut mu = vec![0i8; n];
        let mut phi = vec![0u64; n];
        let mut tau = vec![0u32; n];
        let mut nu = vec![(0u64, 1u64); n];
        if n > 1 {
            mu[1] = 1;
            phi[1] = 1;
            tau[1] = 1;
            nu[1] = (1, 1);
        }
        for i in 2..n {
            let p = spf[i] as usize;
            let mut m = i / p;
            let mut e = 1u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            // i = p^e * m with p coprime to m
            mu[i] = if e > 1 { 0 } else { -mu[m] };
            let pe = (i / m) as u64;
            phi[i] = phi[m] * (pe - pe / p as u64);
            tau[i] = tau[m] * (e + 1);
            let (mn, md) = nu[m];
            let mut nn = mn * pe * (p as u64 + 1);
            let mut nd = md * p as u64;
            let g = gcd(nn, nd);
            nn /= g;
            nd /= g;
            nu[i] = (nn, nd);
        }
        MultiplicativeTables { bound, spf, mu, phi, tau, nu }
    }

    pub fn mu(&self, n: usize) -> i64 {
        self.mu[n] as i64
    }

    /// nu(n) as f64
    pub fn nu_f64(&self, n: usize) -> f64 {
        let (a, b) = self.nu[n];
        a as f64 / b as f64
    }

    pub fn factorize(&self, mut n: usize) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        out
    }

    pub fn divisors(&self, n: usize) -> Vec<u64> {
        let mut divs = vec![1u64];
        for (p, e) in self.factorize(n) {
            let prev = divs.clone();
            let mut pe = 1u64;
            for _ in 0..e {
                pe *= p;
                divs.extend(prev.iter().map(|d| d * pe));
            }
        }
        divs.sort_unstable();
        divs
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Modular inverse of a mod c, if it exists.
pub fn inv_mod(a: i64, c: i64) -> Option<i64> {
    let a = a.rem_euclid(c);
    let egcd = num_integer::Integer::extended_gcd(&a, &c);
    if egcd.gcd != 1 {
        return None;
    }
    Some(egcd.x.rem_euclid(c))
}

fn mulmod(a: u64, b: u64, c: u64) -> u64 {
    ((a as u128 * b as u128) % c as u128) as u64
}

/// Units mod c paired with their inverses, built with one extended gcd
/// and a Montgomery-style batch inversion pass.
pub struct UnitTable {
    pub c: u64,
    pub units: Vec<u32>,
    pub invs: Vec<u32>,
}

impl UnitTable {
    pub fn new(c: u64) -> Self {
        if c == 1 {
            return UnitTable { c, units: vec![0], invs: vec![0] };
        }
        let mut units = Vec::with_capacity(c as usize / 2);
        for a in 1..c {
            if gcd(a, c) == 1 {
                units.push(a as u32);
            }
        }
        let m = units.len();
        let mut prefix = Vec::with_capacity(m);
        let mut acc = 1u64;
        for &u in &units {
            acc = mulmod(acc, u as u64, c);
            prefix.push(acc);
        }
        let mut inv_acc = inv_mod(acc as i64, c as i64).expect("product of units is a unit") as u64;
        let mut invs = vec![0u32; m];
        for i in (0..m).rev() {
            let prev = if i == 0 { 1 } else { prefix[i - 1] };
            invs[i] = mulmod(inv_acc, prev, c) as u32;
            inv_acc = mulmod(inv_acc, units[i] as u64, c);
        }
        UnitTable { c, units, invs }
    }
}

/// Kloosterman sum S(m, n; c) by direct summation. The imaginary part
/// cancels pairwise (a <-> -a), so only the real part is returned.
pub fn kloosterman(m: i64, n: i64, c: u64) -> f64 {
    if c == 1 {
        return 1.0;
    }
    let table = UnitTable::new(c);
    kloosterman_with_table(m, n, &table)
}

/// Same sum reusing a prebuilt unit table for the modulus.
pub fn kloosterman_with_table(m: i64, n: i64, table: &UnitTable) -> f64 {
    let c = table.c;
    if c == 1 {
        return 1.0;
    }
    let mm = m.rem_euclid(c as i64) as u64;
    let nn = n.rem_euclid(c as i64) as u64;
    let step = 2.0 * std::f64::consts::PI / c as f64;
    let mut sum = 0.0;
    for (&a, &ab) in table.units.iter().zip(&table.invs) {
        let r = (mulmod(mm, a as u64, c) + mulmod(nn, ab as u64, c)) % c;
        sum += (step * r as f64).cos();
    }
    sum
}

/// All residues at once: returns S(l, v; c) for v = 0..c-1 via one DFT of
/// the sparse vector u[t] = e(l tbar / c) over units t.
pub fn kloosterman_all(l: i64, c: u64) -> Vec<f64> {
    if c == 1 {
        return vec![1.0];
    }
    let table = UnitTable::new(c);
    kloosterman_all_with_table(l, &table)
}

pub fn kloosterman_all_with_table(l: i64, table: &UnitTable) -> Vec<f64> {
    let c = table.c;
    let ll = l.rem_euclid(c as i64) as u64;
    let step = 2.0 * std::f64::consts::PI / c as f64;
    let mut buf = vec![Complex64::new(0.0, 0.0); c as usize];
    for (&t, &tb) in table.units.iter().zip(&table.invs) {
        let r = mulmod(ll, tb as u64, c);
        let ph = step * r as f64;
        buf[t as usize] = Complex64::new(ph.cos(), ph.sin());
    }
    // S(l, v; c) = sum_t u[t] e(vt/c), an unnormalized inverse DFT
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(c as usize);
    fft.process(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// Twisted multiplicativity for coprime moduli:
/// S(m, n; c1 c2) = S(m c2bar, n c2bar; c1) S(m c1bar, n c1bar; c2).
pub fn kloosterman_crt(m: i64, n: i64, c1: u64, c2: u64) -> Result<f64> {
    if gcd(c1, c2) != 1 {
        return Err(Error::InvalidArgument(format!(
            "moduli {c1} and {c2} are not coprime"
        )));
    }
    let c2b = inv_mod(c2 as i64, c1 as i64).unwrap_or(0);
    let c1b = inv_mod(c1 as i64, c2 as i64).unwrap_or(0);
    Ok(kloosterman(m * c2b, n * c2b, c1) * kloosterman(m * c1b, n * c1b, c2))
}

/// Ramanujan sum S(0, n; c) = sum_{d | (n,c)} d mu(c/d), exact.
pub fn ramanujan(n: i64, c: u64) -> f64 {
    let g = gcd(n.unsigned_abs(), c);
    let mut sum = 0i64;
    for d in divisors_of(g) {
        sum += d as i64 * mu_of(c / d);
    }
    sum as f64
}

/// Checks S(nP, 1; cP) = -S(n, Pbar; c) for (c, P) = 1, plus the vanishing
/// S(nP, 1; c P^2) when an extra P divides the modulus.
pub fn factor_identity_check(n: i64, c: u64, p: u64) -> Result<(f64, f64)> {
    if gcd(c, p) != 1 {
        return Err(Error::InvalidArgument(format!("c = {c} must be coprime to P = {p}")));
    }
    let lhs = kloosterman(n * p as i64, 1, c * p);
    let pbar = inv_mod(p as i64, c as i64).expect("(c,P)=1");
    let rhs = -kloosterman(n, pbar, c);
    let vanish = kloosterman(n * p as i64, 1, c * p * p);
    if vanish.abs() > 1e-9 * (1.0 + c as f64) {
        return Err(Error::Integrity(format!(
            "S(nP,1;cP^2) = {vanish:e} should vanish for n={n}, c={c}, P={p}"
        )));
    }
    Ok((lhs, rhs))
}

/// Weil bound tau(c) sqrt((m,n,c)) sqrt(c).
pub fn weil_bound(m: i64, n: i64, c: u64) -> f64 {
    let g = gcd(gcd(m.unsigned_abs(), n.unsigned_abs()), c);
    tau_of(c) as f64 * (g as f64).sqrt() * (c as f64).sqrt()
}

/// Trial-division factorization for one-off moduli.
pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn tau_of(n: u64) -> u64 {
    factorize_u64(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

pub fn mu_of(n: u64) -> i64 {
    let f = factorize_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn phi_of(n: u64) -> u64 {
    factorize_u64(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn divisors_of(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize_u64(n) {
        let prev = divs.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            divs.extend(prev.iter().map(|d| d * pe));
        }
    }
    divs.sort_unstable();
    divs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kloosterman_degenerate_is_phi() {
        for c in [1u64, 2, 3, 4, 12, 30, 97] {
            assert!((kloosterman(0, 0, c) - phi_of(c) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn kloosterman_small_closed_forms() {
        assert!((kloosterman(1, 1, 3) - (-1.0)).abs() < 1e-12);
        let golden = (3.0 - 5f64.sqrt()) / 2.0;
        assert!((kloosterman(1, 1, 5) - golden).abs() < 1e-12);
    }

    #[test]
    fn kloosterman_symmetry() {
        for (m, n, c) in [(2i64, 7i64, 15u64), (3, 11, 35), (-4, 9, 56), (5, 5, 49)] {
            assert!((kloosterman(m, n, c) - kloosterman(n, m, c)).abs() < 1e-9);
        }
    }

    #[test]
    fn all_residue_dft_matches_direct() {
        for c in [2u64, 5, 6, 12, 35] {
            let all = kloosterman_all(3, c);
            for v in 0..c {
                assert!(
                    (all[v as usize] - kloosterman(3, v as i64, c)).abs() < 1e-8,
                    "c={c} v={v}"
                );
            }
        }
    }

    #[test]
    fn crt_split_matches_direct() {
        for (c1, c2) in [(3u64, 5u64), (4, 9), (8, 15), (7, 27)] {
            for (m, n) in [(1i64, 1i64), (2, 5), (-3, 7)] {
                let split = kloosterman_crt(m, n, c1, c2).unwrap();
                assert!((split - kloosterman(m, n, c1 * c2)).abs() < 1e-9);
            }
        }
        assert!(kloosterman_crt(1, 1, 6, 10).is_err());
    }

    #[test]
    fn ramanujan_values() {
        assert!((ramanujan(1, 7) + 1.0).abs() < 1e-12);
        assert!((ramanujan(12, 12) - phi_of(12) as f64).abs() < 1e-12);
        assert!((ramanujan(2, 4) + 2.0).abs() < 1e-12);
        // against direct S(0, n; c)
        for (n, c) in [(3i64, 9u64), (4, 10), (7, 21)] {
            assert!((ramanujan(n, c) - kloosterman(0, n, c)).abs() < 1e-9);
        }
    }

    #[test]
    fn factor_identity_examples() {
        let (l, r) = factor_identity_check(1, 3, 5).unwrap();
        assert!((l - r).abs() < 1e-9 * (1.0 + l.abs()));
        let (l, r) = factor_identity_check(2, 7, 5).unwrap();
        assert!((l - r).abs() < 1e-9 * (1.0 + l.abs()));
        assert!(factor_identity_check(1, 10, 5).is_err());
        // P | c vanishing, directly
        assert!(kloosterman(5, 1, 50).abs() < 1e-9);
    }

    #[test]
    fn tables_agree_with_trial_division() {
        let t = MultiplicativeTables::new(500);
        for n in 1..=500usize {
            assert_eq!(t.mu(n), mu_of(n as u64), "mu({n})");
            assert_eq!(t.phi[n], phi_of(n as u64), "phi({n})");
            assert_eq!(t.tau[n] as u64, tau_of(n as u64), "tau({n})");
            assert_eq!(t.divisors(n), divisors_of(n as u64));
        }
        // nu(12) = 12 (1+1/2)(1+1/3) = 24
        assert_eq!(t.nu[12], (24, 1));
        assert_eq!(t.nu[1], (1, 1));
        assert!((t.nu_f64(5) - 6.0).abs() < 1e-15);
    }

    #[test]
    fn unit_table_inverses() {
        for c in [2u64, 7, 12, 100, 101] {
            let t = UnitTable::new(c);
            assert_eq!(t.units.len() as u64, phi_of(c));
            for (&u, &v) in t.units.iter().zip(&t.invs) {
                assert_eq!(u as u64 * v as u64 % c, 1 % c);
            }
        }
    }
}
