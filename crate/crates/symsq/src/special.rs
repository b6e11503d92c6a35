//! Special functions: complex log-gamma, generalized Gauss-Laguerre rules,
//! Bessel J of real order, and the gamma-quotient kernel used by the
//! degree-three Voronoi transform.
//!
//! Bessel values above the transition point come from the integral
//! representation J_nu(x) = (2 pi x)^{-1/2} (e^{ix} W+ + e^{-ix} W-),
//! where W+- are Whittaker-type integrals evaluated by Gauss-Laguerre
//! quadrature with the weight y^{nu-1/2} e^{-y} absorbed into the rule.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

// B_{2n} / (2n (2n-1)) for the Stirling series
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// Principal-branch log-gamma for complex z, poles excluded.
///
/// Branch jumps of 2 pi i can occur deep in the left half plane; every
/// consumer exponentiates quotients, where they cancel.
pub fn log_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection through ln Gamma(z) + ln Gamma(1-z) = ln pi - ln sin(pi z)
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - log_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.norm() < 12.0 {
        acc -= z.ln();
        z += 1.0;
    }
    let mut s = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln();
    let inv2 = 1.0 / (z * z);
    let mut pow = 1.0 / z;
    for c in STIRLING {
        s += c * pow;
        pow *= inv2;
    }
    acc + s
}

/// Overflow-safe ln sin(pi z).
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() <= 10.0 {
        return (PI * z).sin().ln();
    }
    let i = Complex64::new(0.0, 1.0);
    if z.im > 0.0 {
        // sin(pi z) = -e^{-i pi z} (1 - e^{2 i pi z}) / (2i)
        -i * PI * z - Complex64::new(2.0_f64.ln(), -PI / 2.0)
            + (Complex64::new(1.0, 0.0) - (2.0 * i * PI * z).exp()).ln()
    } else {
        i * PI * z - Complex64::new(2.0_f64.ln(), PI / 2.0)
            + (Complex64::new(1.0, 0.0) - (-2.0 * i * PI * z).exp()).ln()
    }
}

pub fn log_gamma_real(x: f64) -> f64 {
    log_gamma(Complex64::new(x, 0.0)).re
}

/// Generalized Gauss-Laguerre rule for weight y^alpha e^{-y} on (0, inf),
/// with weights normalized so they sum to one (the mass Gamma(alpha+1)
/// is divided out; callers that need it multiply back).
pub struct GaussLaguerre {
    pub alpha: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLaguerre {
    /// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights
    /// come from first components of the eigenvectors.
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 || alpha <= -1.0 {
            return Err(Error::InvalidArgument(format!(
                "need n >= 1 and alpha > -1, got n = {n}, alpha = {alpha}"
            )));
        }
        let mut d: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + alpha + 1.0).collect();
        let mut e: Vec<f64> = (0..n)
            .map(|i| {
                let i = i as f64 + 1.0;
                (i * (i + alpha)).sqrt()
            })
            .collect();
        let mut q = vec![0.0f64; n];
        q[0] = 1.0;
        tql_first_row(&mut d, &mut e, &mut q)?;
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
        let nodes: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
        let weights: Vec<f64> = idx.iter().map(|&i| q[i] * q[i]).collect();
        Ok(GaussLaguerre { alpha, nodes, weights })
    }
}

/// Implicit-shift QL for a symmetric tridiagonal matrix, rotating only the
/// first row of the eigenvector matrix alongside.
fn tql_first_row(d: &mut [f64], e: &mut [f64], q: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    e[n - 1] = 0.0;
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
            if iter > 50 {
                return Err(Error::Convergence("tridiagonal QL failed to converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let f = q[i + 1];
                q[i + 1] = s * q[i] + c * f;
                q[i] = c * q[i] - s * f;
            }
            if r == 0.0 && i > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn rule_cache(nu: f64, n: usize) -> Result<Arc<GaussLaguerre>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<GaussLaguerre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = ((nu - 0.5).to_bits(), n);
    let mut guard = cache.lock().unwrap();
    if let Some(r) = guard.get(&key) {
        return Ok(r.clone());
    }
    let rule = Arc::new(GaussLaguerre::new(n, nu - 0.5)?);
    guard.insert(key, rule.clone());
    Ok(rule)
}

/// W+(nu, x) = e^{-(nu+1/2) pi i / 2} / Gamma(nu+1/2)
///             * int_0^inf e^{-y} (y (1 + iy/2x))^{nu-1/2} dy;
/// the Gamma cancels against the normalized quadrature mass.
/// W- is the conjugate. Requires x >= 1; accuracy degrades below.
pub fn whittaker_w(nu: f64, x: f64) -> Result<Complex64> {
    if x < 1.0 {
        return Err(Error::Domain(format!("whittaker_w needs x >= 1, got {x}")));
    }
    if nu <= 0.0 {
        return Err(Error::InvalidArgument(format!("order must be positive, got {nu}")));
    }
    let rule = rule_cache(nu, 64)?;
    let phase = Complex64::from_polar(1.0, -(nu + 0.5) * PI / 2.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for (&y, &w) in rule.nodes.iter().zip(&rule.weights) {
        let z = Complex64::new(1.0, y / (2.0 * x));
        sum += w * (((nu - 0.5) * z.ln()).exp());
    }
    Ok(phase * sum)
}

/// Ascending series at the origin; used below the transition point.
fn bessel_j_series(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let mut term = (nu * (x / 2.0).ln() - log_gamma_real(nu + 1.0)).exp();
    let mut sum = term;
    let q = -x * x / 4.0;
    for m in 1..400 {
        term *= q / (m as f64 * (nu + m as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Bessel function of the first kind, real order nu > 0, x >= 0.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    debug_assert!(x >= 0.0 && nu > 0.0);
    let cut = nu.max(8.0);
    if x < cut {
        return bessel_j_series(nu, x);
    }
    let w = whittaker_w(nu, x).expect("x >= 8 is in domain");
    let osc = Complex64::from_polar(1.0, x) * w;
    2.0 * osc.re / (2.0 * PI * x).sqrt()
}

/// Dense-grid cache of J_nu on [lo, x_max] with cubic interpolation;
/// falls back to the series below lo and direct evaluation above x_max.
pub struct BesselOscCache {
    pub nu: f64,
    lo: f64,
    step: f64,
    vals: Vec<f64>,
}

impl BesselOscCache {
    pub fn new(nu: f64, x_max: f64) -> Self {
        let lo = 0.5;
        let step = 1.0 / 512.0;
        let n = ((x_max.max(lo + 1.0) - lo) / step).ceil() as usize + 4;
        let vals = (0..n).map(|i| bessel_j(nu, lo + i as f64 * step)).collect();
        BesselOscCache { nu, lo, step, vals }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < self.lo {
            return bessel_j_series(self.nu, x);
        }
        let t = (x - self.lo) / self.step;
        let i = (t as usize).clamp(1, self.vals.len().saturating_sub(3));
        if i + 2 >= self.vals.len() {
            return bessel_j(self.nu, x);
        }
        // 4-point Lagrange on the uniform grid
        let u = t - i as f64;
        let (a, b, c, d) = (
            self.vals[i - 1],
            self.vals[i],
            self.vals[i + 1],
            self.vals[i + 2],
        );
        let um1 = u + 1.0;
        let u1 = u - 1.0;
        let u2 = u - 2.0;
        -a * u * u1 * u2 / 6.0 + b * um1 * u1 * u2 / 2.0 - c * um1 * u * u2 / 2.0
            + d * um1 * u * u1 / 6.0
    }
}

/// Gamma-factor quotient G_eta(s) = prod_i Gamma((1+s+a_i)/2) / Gamma((-s+a_i)/2)
/// with a = (1-eta, k-1+eta, k-eta), eta in {0, 1}.
///
/// A pole of a denominator Gamma forces an exact zero; a numerator pole is
/// a genuine singularity and is reported as an error.
pub fn g_eta(k: u32, eta: u8, s: Complex64) -> Result<Complex64> {
    if eta > 1 {
        return Err(Error::InvalidArgument(format!("eta must be 0 or 1, got {eta}")));
    }
    let kf = k as f64;
    let ef = eta as f64;
    let a = [1.0 - ef, kf - 1.0 + ef, kf - ef];
    let is_pole = |z: Complex64| -> bool {
        z.im.abs() < 1e-12 && z.re < 0.5 && (z.re - z.re.round()).abs() < 1e-12
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &ai) in a.iter().enumerate() {
        let num = (Complex64::new(1.0 + ai, 0.0) + s) / 2.0;
        if is_pole(num) {
            return Err(Error::Singularity(format!(
                "numerator factor {i} of G_{eta} has a pole at s = {s}"
            )));
        }
        acc += log_gamma(num);
    }
    for &ai in &a {
        let den = (Complex64::new(ai, 0.0) - s) / 2.0;
        if is_pole(den) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        acc -= log_gamma(den);
    }
    Ok(acc.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn gamma_integers_and_half() {
        assert!(close(log_gamma_real(5.0), 24.0f64.ln(), 1e-14));
        assert!(close(log_gamma_real(0.5), PI.sqrt().ln(), 1e-14));
        assert!(close(log_gamma_real(7.5), 1871.254305797788_f64.ln(), 1e-13));
    }

    #[test]
    fn gamma_complex_modulus() {
        // |Gamma(10i)|^2 = pi / (10 sinh(10 pi)), then shift up twice
        let g10i = (PI / (10.0 * (10.0 * PI).sinh())).sqrt();
        let lhs = log_gamma(Complex64::new(3.0, 10.0)).re.exp();
        let z0 = Complex64::new(0.0, 10.0);
        let rhs = g10i * z0.norm() * (z0 + 1.0).norm() * (z0 + 2.0).norm();
        assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn gamma_duplication_and_reflection() {
        let z = Complex64::new(3.7, 2.1);
        let lhs = log_gamma(2.0 * z);
        let rhs = log_gamma(z) + log_gamma(z + 0.5) + (2.0 * z - 1.0) * 2.0f64.ln()
            - Complex64::new(0.5 * PI.ln(), 0.0);
        assert!((lhs - rhs).norm() < 1e-11);

        let w = Complex64::new(-4.3, 0.2);
        let refl = (log_gamma(w) + log_gamma(Complex64::new(1.0, 0.0) - w)).exp();
        let direct = PI / (PI * w).sin();
        assert!((refl - direct).norm() < 1e-10 * direct.norm());
    }

    #[test]
    fn laguerre_rule_integrates_polynomials() {
        // normalized: sum w_i p(x_i) = E[p(Y)] for Y ~ Gamma(alpha+1, 1)
        let r = GaussLaguerre::new(24, 2.5).unwrap();
        let mass: f64 = r.weights.iter().sum();
        assert!(close(mass, 1.0, 1e-13));
        let m1: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| x * w).sum();
        assert!(close(m1, 3.5, 1e-12)); // E[Y] = alpha + 1
        let m2: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| x * x * w).sum();
        assert!(close(m2, 3.5 * 4.5, 1e-12)); // E[Y^2] = (a+1)(a+2)
    }

    #[test]
    fn bessel_reference_values() {
        let cases = [
            (3.0, 10.0, 5.837937930519e-2),
            (3.0, 8.0, -2.911322070660e-1),
            (1.0, 5.0, -3.275791375915e-1),
            (11.0, 30.0, 2.505880513782e-2),
            (11.0, 12.0, 2.704124825510e-1),
            (25.0, 25.5, 1.758635817516e-1),
            (25.0, 100.0, 7.850427335599e-2),
            (3.0, 1000.0, -4.827420825204e-3),
        ];
        for (nu, x, want) in cases {
            let got = bessel_j(nu, x);
            assert!(
                (got - want).abs() < 5e-11,
                "J_{nu}({x}) = {got:e}, want {want:e}"
            );
        }
        assert!(bessel_j(1.0, 3.8317059702).abs() < 1e-9);
        assert!(close(bessel_j(3.0, 1e-3), 2.0833e-11, 1e-3));
    }

    #[test]
    fn bessel_series_asymptotic_agree_at_cut() {
        for nu in [3.0f64, 7.0, 11.0] {
            let cut = nu.max(8.0);
            let s = bessel_j_series(nu, cut + 1e-9);
            let a = bessel_j(nu, cut + 1e-9);
            assert!((s - a).abs() < 1e-11, "nu = {nu}: {s} vs {a}");
        }
    }

    #[test]
    fn osc_cache_matches_direct() {
        let cache = BesselOscCache::new(3.0, 60.0);
        for &x in &[0.01, 0.3, 0.5001, 1.7, 8.33, 25.2, 42.42, 59.0] {
            assert!(
                (cache.eval(x) - bessel_j(3.0, x)).abs() < 5e-12,
                "x = {x}"
            );
        }
    }

    #[test]
    fn g_eta_reference_point() {
        // G_0(12, 0) = Gamma(13/2) / (Gamma(1/2) Gamma(11/2)) = 5.5 / sqrt(pi)
        let v = g_eta(12, 0, Complex64::new(0.0, 0.0)).unwrap();
        assert!((v.re - 5.5 / PI.sqrt()).abs() < 1e-12 && v.im.abs() < 1e-14);
    }

    #[test]
    fn g_eta_pole_behavior() {
        // denominator pole at s = 1 (a_0 - s = 0 for eta = 0) forces zero
        let z = g_eta(12, 0, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(z, Complex64::new(0.0, 0.0));
        // numerator pole at s = -2 (1 + a_0 + s = 0)
        assert!(matches!(
            g_eta(12, 0, Complex64::new(-2.0, 0.0)),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn g_eta_growth_envelope() {
        // |G_eta(sigma + it)| <= C ((|t|+1)(t^2+k^2))^{sigma+1/2} on the strip
        let k = 12u32;
        let mut worst: f64 = 0.0;
        for eta in [0u8, 1] {
            for &sigma in &[-0.25, 0.0, 0.5, 1.0, 2.0] {
                for &t in &[0.1, 0.7, 2.0, 5.0, 11.0, 25.0, 60.0] {
                    let s = Complex64::new(sigma, t);
                    let g = g_eta(k, eta, s).unwrap().norm();
                    let env = ((t.abs() + 1.0) * (t * t + (k * k) as f64)).powf(sigma + 0.5);
                    worst = worst.max(g / env);
                }
            }
        }
        assert!(worst < 10.0, "envelope ratio {worst}");
    }
}
