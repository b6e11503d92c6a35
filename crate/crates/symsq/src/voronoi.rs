//! GL(3) Voronoi machinery: dyadic test weights, the contour-integral
//! transform Psi_eta / Psi_pm, the summation identity checker, and the
//! Wilton-envelope report.
//!
//! The transform follows the contour definition
//! Psi_eta(x) = (1/2 pi i) Int_(sigma) (pi^3 x)^{-s} G_eta(s) psi~(-s) ds
//! evaluated on sigma = 0, where psi~ is the Mellin transform of
//! psi(y) = J_{2 kappa - 1}(theta sqrt y) w(y) and w is a fixed dyadic
//! bump. The checker compares the coefficient sum against its dual side
//! with both Kloosterman orientations.

use std::f64::consts::PI;
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::lfunc::ContourSpec;
use crate::qexp::SymSquareCoefficients;
use crate::special::{bessel_j, g_eta};

const JET_LEN: usize = 9;

/// Truncated Taylor arithmetic of degree 8, used to get exact derivative
/// envelopes of the bump without finite-difference noise.
#[derive(Clone, Copy)]
struct Jet([f64; JET_LEN]);

impl Jet {
    fn constant(v: f64) -> Jet {
        let mut a = [0.0; JET_LEN];
        a[0] = v;
        Jet(a)
    }

    fn variable(v: f64, slope: f64) -> Jet {
        let mut a = [0.0; JET_LEN];
        a[0] = v;
        a[1] = slope;
        Jet(a)
    }

    fn sub(&self, o: &Jet) -> Jet {
        let mut a = [0.0; JET_LEN];
        for i in 0..JET_LEN {
            a[i] = self.0[i] - o.0[i];
        }
        Jet(a)
    }

    fn mul(&self, o: &Jet) -> Jet {
        let mut a = [0.0; JET_LEN];
        for i in 0..JET_LEN {
            for j in 0..JET_LEN - i {
                a[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(a)
    }

    fn recip(&self) -> Jet {
        let mut a = [0.0; JET_LEN];
        a[0] = 1.0 / self.0[0];
        for n in 1..JET_LEN {
            let mut s = 0.0;
            for k in 1..=n {
                s += self.0[k] * a[n - k];
            }
            a[n] = -s / self.0[0];
        }
        Jet(a)
    }

    fn exp(&self) -> Jet {
        let mut a = [0.0; JET_LEN];
        a[0] = self.0[0].exp();
        for n in 1..JET_LEN {
            let mut s = 0.0;
            for k in 1..=n {
                s += k as f64 * self.0[k] * a[n - k];
            }
            a[n] = s / n as f64;
        }
        Jet(a)
    }
}

/// The fixed smooth bump on [X, 2X]: w(y) = exp(1 - 1/(1 - z^2)) with
/// z = 2(y - X)/X - 1. One closed form keeps the derivative constants
/// reproducible.
#[derive(Clone, Debug)]
pub struct DyadicWeight {
    pub x: f64,
    /// c_j with |y^j w^(j)(y)| <= c_j, j = 0..=8
    pub derivative_constants: Vec<f64>,
}

impl DyadicWeight {
    pub fn new(x: f64) -> Result<DyadicWeight> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::InvalidArgument(format!("dyadic scale must be positive, got {x}")));
        }
        let grid = 4096;
        let mut c = vec![0.0f64; JET_LEN];
        for i in 0..grid {
            let y = x * (1.0 + (i as f64 + 0.5) / grid as f64);
            let z = 2.0 * (y - x) / x - 1.0;
            let zj = Jet::variable(z, 2.0 / x);
            let t = Jet::constant(1.0).sub(&zj.mul(&zj));
            if t.0[0] < 1e-9 {
                continue;
            }
            let w = Jet::constant(1.0).sub(&t.recip()).exp();
            let mut fact = 1.0;
            for j in 0..JET_LEN {
                if j > 0 {
                    fact *= j as f64;
                }
                let d = (y.powi(j as i32) * fact * w.0[j]).abs();
                if d > c[j] {
                    c[j] = d;
                }
            }
        }
        Ok(DyadicWeight { x, derivative_constants: c })
    }

    pub fn eval(&self, y: f64) -> f64 {
        if y <= self.x || y >= 2.0 * self.x {
            return 0.0;
        }
        let z = 2.0 * (y - self.x) / self.x - 1.0;
        let t = 1.0 - z * z;
        (1.0 - 1.0 / t).exp()
    }
}

const CONTOUR_H: f64 = 0.05;
const CONTOUR_T_CAP: f64 = 6400.0;
const FFT_LEN: usize = 1 << 20;
const TAIL_TARGET: f64 = 1e-13;
const PANEL_X0: f64 = 2.0;
const PANEL_W: f64 = 0.75;
const PANEL_NODES: usize = 40;

/// One Chebyshev interpolation panel of Psi_+ on a u = x^{1/3} interval.
struct Panel {
    mid: f64,
    rad: f64,
    coef: Vec<Complex64>,
}

impl Panel {
    fn eval(&self, u: f64) -> Complex64 {
        let t = (u - self.mid) / self.rad;
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for k in (1..self.coef.len()).rev() {
            let b0 = 2.0 * t * b1 - b2 + self.coef[k];
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + 0.5 * self.coef[0]
    }
}

/// The Voronoi integral transform of psi(y) = J_{2 kappa - 1}(theta sqrt y) w(y),
/// precomputed on the sigma = 0 line so each evaluation is one phase sweep.
/// Large arguments are served from lazily built Chebyshev panels in x^{1/3}.
pub struct PsiTransform {
    pub k: u32,
    pub kappa: u32,
    /// +1 selects Psi_+, -1 selects Psi_-
    pub sign: i8,
    pub theta: f64,
    pub weight: DyadicWeight,
    pub contour: ContourSpec,
    /// G_eta(i t_j) psi~(-i t_j) h / pi per grid point, eta = 0 and 1
    grid: Vec<[Complex64; 2]>,
    panels: Mutex<Vec<Panel>>,
    env_base: f64,
    env_xscale: f64,
    env_c3: f64,
}

impl PsiTransform {
    pub fn new(k: u32, kappa: u32, sign: i8, theta: f64, weight: DyadicWeight) -> Result<PsiTransform> {
        if k < 4 || k % 2 != 0 {
            return Err(Error::InvalidArgument(format!("weight must be even and at least 4, got {k}")));
        }
        if kappa < 1 {
            return Err(Error::InvalidArgument("kappa must be at least 1".into()));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidArgument(format!("sign selector must be +1 or -1, got {sign}")));
        }
        if !(theta > 0.0) {
            return Err(Error::InvalidArgument(format!("theta must be positive, got {theta}")));
        }
        let x = weight.x;
        let nu = (2 * kappa - 1) as f64;
        let psi_fn = |y: f64| bessel_j(nu, theta * y.sqrt()) * weight.eval(y);

        // Mellin values psi~(-i t_j) on t_j = j h come from one FFT of the
        // log-substituted samples; the grid step du is tied to h so the
        // frequencies land exactly on the contour nodes.
        let du = 2.0 * PI / (FFT_LEN as f64 * CONTOUR_H);
        let n_sup = (2f64.ln() / du).ceil() as usize;
        let mut buf = vec![Complex64::new(0.0, 0.0); FFT_LEN];
        for (m, slot) in buf.iter_mut().enumerate().take(n_sup) {
            let u = x.ln() + (m as f64 + 0.5) * du;
            *slot = Complex64::new(psi_fn(u.exp()) * du, 0.0);
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(FFT_LEN).process(&mut buf);

        let j_cap = (CONTOUR_T_CAP / CONTOUR_H) as usize;
        let u_base = x.ln() + 0.5 * du;
        let grid_full: Vec<[Complex64; 2]> = (0..=j_cap)
            .into_par_iter()
            .map(|j| {
                let t = j as f64 * CONTOUR_H;
                let rot = Complex64::new(0.0, -t * u_base).exp();
                let mt = buf[j] * rot;
                let s = Complex64::new(0.0, t);
                let g0 = g_eta(k, 0, s).unwrap_or_else(|_| Complex64::new(0.0, 0.0));
                let g1 = g_eta(k, 1, s).unwrap_or_else(|_| Complex64::new(0.0, 0.0));
                let w = if j == 0 { 0.5 } else { 1.0 } * CONTOUR_H / PI;
                [g0 * mt * w, g1 * mt * w]
            })
            .collect();

        let mass: Vec<f64> = grid_full.iter().map(|q| q[0].norm() + q[1].norm()).collect();
        let total: f64 = mass.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidArgument("test function is identically zero on its support".into()));
        }
        let mut suffix = 0.0;
        let mut j_eff = None;
        for j in (0..mass.len()).rev() {
            suffix += mass[j];
            if suffix > TAIL_TARGET * total {
                j_eff = Some(j + 1);
                break;
            }
        }
        let j_eff = match j_eff {
            Some(j) if j + 64 < mass.len() => j + 64,
            _ => {
                return Err(Error::Contour(format!(
                    "contour tail does not reach {TAIL_TARGET:e} below height {CONTOUR_T_CAP}"
                )))
            }
        };
        let rel_tail: f64 = mass[j_eff..].iter().sum::<f64>() / total;
        let grid = grid_full[..=j_eff].to_vec();
        let contour = ContourSpec {
            sigma: 0.0,
            h: CONTOUR_H,
            t: j_eff as f64 * CONTOUR_H,
            tail_bound: rel_tail,
        };

        let mut out = PsiTransform {
            k,
            kappa,
            sign,
            theta,
            weight,
            contour,
            grid,
            panels: Mutex::new(Vec::new()),
            env_base: 0.0,
            env_xscale: 0.0,
            env_c3: 0.0,
        };

        // suppression envelope |Psi(x)| <= C3 base (xscale/x)^3, constant
        // calibrated on the decaying range and padded
        let tsx = theta * x.sqrt();
        let kf = k as f64;
        let (base, xscale) = if tsx <= 1.2 {
            (tsx.powi(2 * kappa as i32 - 1) * kf, kf * kf / x)
        } else {
            (tsx * kf, tsx.powi(3) * kf * kf / x)
        };
        let mut c3 = 0.0f64;
        for i in 0..8 {
            let xs = xscale * 2.5 * (320.0f64 / 2.5).powf(i as f64 / 7.0);
            let ratio = out.psi_plus_direct(xs).norm() / (base * (xscale / xs).powi(3));
            if ratio > c3 {
                c3 = ratio;
            }
        }
        out.env_base = base;
        out.env_xscale = xscale;
        out.env_c3 = (c3 * 2.5).max(1e-12);
        Ok(out)
    }

    /// The test function J_{2 kappa - 1}(theta sqrt y) w(y).
    pub fn psi(&self, y: f64) -> f64 {
        bessel_j((2 * self.kappa - 1) as f64, self.theta * y.sqrt()) * self.weight.eval(y)
    }

    /// Mellin transform psi~(s) by direct log-substituted quadrature,
    /// independent of the FFT grid.
    pub fn mellin(&self, s: Complex64) -> Complex64 {
        let n = 4096;
        let du = 2f64.ln() / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..n {
            let u = self.weight.x.ln() + (m as f64 + 0.5) * du;
            acc += self.psi(u.exp()) * (s * u).exp();
        }
        acc * du
    }

    /// Psi_+(x) from the precomputed line, one phase rotation per node.
    pub fn psi_plus_direct(&self, x: f64) -> Complex64 {
        let l = (PI.powi(3) * x).ln();
        let step = Complex64::new(0.0, -CONTOUR_H * l).exp();
        let mut rot = Complex64::new(1.0, 0.0);
        let mut z0 = 0.0;
        let mut z1 = 0.0;
        for (j, q) in self.grid.iter().enumerate() {
            z0 += rot.re * q[0].re - rot.im * q[0].im;
            z1 += rot.re * q[1].re - rot.im * q[1].im;
            rot *= step;
            if j % 1024 == 1023 {
                rot = Complex64::new(0.0, -(j as f64 + 1.0) * CONTOUR_H * l).exp();
            }
        }
        Complex64::new(z0, -z1) / (2.0 * PI.powf(1.5))
    }

    /// Psi_+(x), served from the panel cache for large arguments. Psi_- is
    /// the conjugate since psi is real.
    pub fn psi_plus(&self, x: f64) -> Complex64 {
        if x < PANEL_X0 {
            return self.psi_plus_direct(x);
        }
        let u = x.cbrt();
        let u0 = PANEL_X0.cbrt();
        let idx = ((u - u0) / PANEL_W) as usize;
        let mut panels = self.panels.lock().expect("panel cache poisoned");
        while panels.len() <= idx {
            let a = u0 + panels.len() as f64 * PANEL_W;
            let mid = a + 0.5 * PANEL_W;
            let rad = 0.5 * PANEL_W;
            let vals: Vec<Complex64> = (0..PANEL_NODES)
                .map(|i| {
                    let un = mid + rad * (PI * (i as f64 + 0.5) / PANEL_NODES as f64).cos();
                    self.psi_plus_direct(un * un * un)
                })
                .collect();
            let mut coef = vec![Complex64::new(0.0, 0.0); PANEL_NODES];
            for (kk, slot) in coef.iter_mut().enumerate() {
                let mut s = Complex64::new(0.0, 0.0);
                for (i, v) in vals.iter().enumerate() {
                    s += v * (PI * kk as f64 * (i as f64 + 0.5) / PANEL_NODES as f64).cos();
                }
                *slot = s * 2.0 / PANEL_NODES as f64;
            }
            panels.push(Panel { mid, rad, coef });
        }
        panels[idx].eval(u)
    }

    /// Psi_eta on a shifted line Re s = sigma with its own truncation, for
    /// contour-independence checks. Slow path, fresh quadrature per call.
    pub fn psi_eta_shifted(&self, eta: u8, x: f64, sigma: f64, t_max: f64) -> Result<Complex64> {
        let n_u = 2048;
        let du = 2f64.ln() / n_u as f64;
        let samples: Vec<(f64, f64)> = (0..n_u)
            .map(|m| {
                let u = self.weight.x.ln() + (m as f64 + 0.5) * du;
                (u, self.psi(u.exp()) * du * (-sigma * u).exp())
            })
            .collect();
        let steps = (t_max / CONTOUR_H) as usize;
        let lx = (PI.powi(3) * x).ln();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..=steps {
            let t = j as f64 * CONTOUR_H;
            let mut mt = Complex64::new(0.0, 0.0);
            for &(u, p) in &samples {
                mt += p * Complex64::new(0.0, -t * u).exp();
            }
            let g = g_eta(self.k, eta, Complex64::new(sigma, t))?;
            let w = if j == 0 { 0.5 } else { 1.0 };
            acc += w * Complex64::new(0.0, -t * lx).exp() * g * mt;
        }
        Ok((PI.powi(3) * x).powf(-sigma) * (acc * CONTOUR_H / PI).re)
    }

    /// Certified decay envelope past the suppression threshold, None below it.
    fn envelope(&self, x: f64) -> Option<f64> {
        if x < 2.5 * self.env_xscale {
            return None;
        }
        Some(self.env_c3 * self.env_base * (self.env_xscale / x).powi(3))
    }
}

/// The transform with the instance's sign selector applied.
pub fn psi_transform(p: &PsiTransform, x: f64, tol: f64) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!("argument must be positive, got {x}")));
    }
    if p.contour.tail_bound > tol {
        return Err(Error::Precision(format!(
            "contour tail {:e} exceeds the requested {tol:e}",
            p.contour.tail_bound
        )));
    }
    let v = p.psi_plus(x);
    Ok(if p.sign > 0 { v } else { v.conj() })
}

fn e_frac(num: u64, den: u64) -> Complex64 {
    let t = 2.0 * PI * (num % den) as f64 / den as f64;
    Complex64::new(t.cos(), t.sin())
}

/// Triple divisor function table d3(n), n <= bound.
fn d3_table(bound: usize) -> Vec<f64> {
    let mut tau = vec![0f64; bound + 1];
    for d in 1..=bound {
        for m in (d..=bound).step_by(d) {
            tau[m] += 1.0;
        }
    }
    let mut d3 = vec![0f64; bound + 1];
    for d in 1..=bound {
        for m in (d..=bound).step_by(d) {
            d3[m] += tau[m / d];
        }
    }
    d3
}

/// Both sides of the Voronoi identity: the twisted coefficient sum against
/// its dual expansion. The dual n2-sums stop once twenty consecutive terms
/// fall below the working cut and the suppression envelope certifies the
/// remainder.
pub fn voronoi_check(
    coeffs: &SymSquareCoefficients,
    a: u64,
    c: u64,
    psi: &PsiTransform,
    tol: f64,
) -> Result<(Complex64, Complex64)> {
    if c == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    if arith::gcd(a.max(1), c) != 1 {
        return Err(Error::InvalidArgument(format!("need (a, c) = 1, got a = {a}, c = {c}")));
    }
    if coeffs.m_max < c as usize {
        return Err(Error::Precision(format!(
            "coefficient rows reach {}, the divisor sum needs {c}",
            coeffs.m_max
        )));
    }
    let x = psi.weight.x;
    let n_hi = (2.0 * x).floor() as usize;
    if coeffs.n_max < n_hi {
        return Err(Error::Precision(format!(
            "coefficient columns reach {}, the support needs {n_hi}",
            coeffs.n_max
        )));
    }

    let abar = if c == 1 {
        0u64
    } else {
        arith::inv_mod(a as i64, c as i64).expect("inverse exists for coprime a") as u64
    };
    let mut lhs = Complex64::new(0.0, 0.0);
    for n in (x.ceil() as usize).max(1)..=n_hi {
        let w = psi.psi(n as f64);
        if w != 0.0 {
            lhs += coeffs.get(1, n) * w * e_frac(n as u64 * abar, c);
        }
    }

    let d3 = d3_table(coeffs.n_max);
    // suffix sums of d3(n)/n^4 for the certified tail
    let mut s3 = vec![0f64; coeffs.n_max + 2];
    for n in (1..=coeffs.n_max).rev() {
        s3[n] = s3[n + 1] + d3[n] / (n as f64).powi(4);
    }

    let mut divisors = arith::divisors_of(c);
    divisors.sort_unstable();
    let blocks = divisors.len() as f64;
    let mut rhs = Complex64::new(0.0, 0.0);
    for &n1 in &divisors {
        let c1 = c / n1;
        let x_fac = (n1 * n1) as f64 / (c * c * c) as f64;
        let mut block = Complex64::new(0.0, 0.0);
        let mut consec = 0u32;
        let mut n2 = 0usize;
        loop {
            n2 += 1;
            if n2 > coeffs.n_max {
                return Err(Error::Precision(format!(
                    "dual sum at divisor {n1} exhausted the coefficient range {}",
                    coeffs.n_max
                )));
            }
            // self-dual lift: A_F(n2, n1) = A_F(n1, n2)
            let af = coeffs.get(n1 as usize, n2);
            let xv = n2 as f64 * x_fac;
            let psp = psi.psi_plus(xv);
            let sp = arith::kloosterman(a as i64, n2 as i64, c1);
            let sm = arith::kloosterman(a as i64, -(n2 as i64), c1);
            let term = af / (n1 as f64 * n2 as f64) * (sp * psp + sm * psp.conj());
            block += term;
            let scale = (rhs + block).norm().max(0.01 * (1.0 + lhs.norm()));
            if term.norm() < tol * 1e-3 * scale {
                consec += 1;
            } else {
                consec = 0;
            }
            if consec >= 20 {
                if let Some(env) = psi.envelope((n2 + 1) as f64 * x_fac) {
                    let _ = env;
                    let w3 = psi.env_xscale / x_fac;
                    let d3n1 = d3[n1 as usize];
                    let pref = 2.0 * c1 as f64 * psi.env_c3 * psi.env_base * w3.powi(3) * d3n1
                        / n1 as f64;
                    let tail = pref * s3[n2 + 1]
                        + pref / (2.0 * (coeffs.n_max as f64).powi(2));
                    if c as f64 * tail < tol * (1.0 + lhs.norm()) / (4.0 * blocks) {
                        break;
                    }
                }
            }
        }
        rhs += block;
    }
    rhs *= c as f64;
    Ok((lhs, rhs))
}

/// One identity check as a JSON-ready report row.
#[derive(Clone, Debug, Serialize)]
pub struct VoronoiRow {
    pub c: u64,
    pub a: u64,
    #[serde(rename = "X")]
    pub x: f64,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub rel_err: f64,
}

pub fn voronoi_row(
    coeffs: &SymSquareCoefficients,
    a: u64,
    c: u64,
    psi: &PsiTransform,
    tol: f64,
) -> Result<VoronoiRow> {
    let (lhs, rhs) = voronoi_check(coeffs, a, c, psi, tol)?;
    Ok(VoronoiRow {
        c,
        a,
        x: psi.weight.x,
        lhs_re: lhs.re,
        lhs_im: lhs.im,
        rhs_re: rhs.re,
        rhs_im: rhs.im,
        rel_err: (lhs - rhs).norm() / (1.0 + lhs.norm()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WiltonRow {
    pub alpha: f64,
    #[serde(rename = "X")]
    pub x: f64,
    pub s_re: f64,
    pub s_im: f64,
    /// |S| / (X^{3/4} k^{1/2})
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WiltonReport {
    pub rows: Vec<WiltonRow>,
    pub max_ratio: f64,
}

/// Smoothed twisted sums S(alpha, X) = Sigma A_F(1, n) e(alpha n) w(n) over
/// the grid, with each row normalized by the Wilton scale X^{3/4} k^{1/2}.
pub fn wilton_envelope(
    coeffs: &SymSquareCoefficients,
    alpha_grid: &[f64],
    x_list: &[f64],
) -> Result<WiltonReport> {
    let need = x_list.iter().fold(0.0f64, |m, &x| m.max(2.0 * x)).ceil() as usize;
    if coeffs.n_max < need {
        return Err(Error::Precision(format!(
            "coefficient range {} below the sweep need {need}",
            coeffs.n_max
        )));
    }
    let kf = f64::from(coeffs.source.weight);
    let mut rows = Vec::new();
    let mut max_ratio = 0.0f64;
    for &x in x_list {
        let w = DyadicWeight::new(x)?;
        for &alpha in alpha_grid {
            let mut s = Complex64::new(0.0, 0.0);
            for n in (x.ceil() as usize).max(1)..=(2.0 * x).floor() as usize {
                let wn = w.eval(n as f64);
                if wn != 0.0 {
                    let t = 2.0 * PI * (alpha * n as f64).fract();
                    s += coeffs.get(1, n) * wn * Complex64::new(t.cos(), t.sin());
                }
            }
            let ratio = s.norm() / (x.powf(0.75) * kf.sqrt());
            if ratio > max_ratio {
                max_ratio = ratio;
            }
            rows.push(WiltonRow { alpha, x, s_re: s.re, s_im: s.im, ratio });
        }
    }
    Ok(WiltonReport { rows, max_ratio })
}
