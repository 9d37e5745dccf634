//! The limiting potential `F`, its shifts `Phi_m`, the discrete potentials
//! `f_N`, the weights `beta_{p,m}` and the regions used for the saddle
//! analysis. Also the closed-form `S_u`, `T_u` data of the figure-eight knot.

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::jones::XiParams;
use crate::numerics::{abs, log, pi, pow2_neg, prec_of, sqrt, two_pi_i};
use crate::qdilog::{in_bowtie, tn, QDParams};
use crate::special::{l012, li2, Level};

fn c(prec: u32, x: impl Into<f64>) -> Complex {
    Complex::with_val(prec, (x.into(), 0.0))
}

/// `(2 cosh u + 1)(2 cosh u - 3)`.
fn disc_fig8(u: &Complex) -> Complex {
    let prec = prec_of(u);
    let ch2 = Complex::with_val(prec, u.cosh_ref()) * 2u32;
    Complex::with_val(prec, &ch2 + 1u32) * Complex::with_val(prec, &ch2 - 3u32)
}

/// `phi(u) = log(cosh u - 1/2 - sqrt((2cosh u + 1)(2cosh u - 3))/2)`.
pub fn phi_of_u(u: &Complex) -> Complex {
    let prec = prec_of(u);
    let s = sqrt(&disc_fig8(u));
    let mut w = Complex::with_val(prec, u.cosh_ref());
    w -= Float::with_val(prec, 0.5);
    w -= Complex::with_val(prec, &s / 2u32);
    log(&w)
}

/// `S_u = Li2(e^{-u-phi}) - Li2(e^{-u+phi}) + u(phi + 2 pi i)`.
pub fn s_u_fig8(u: &Complex) -> Result<Complex> {
    let prec = prec_of(u);
    let phi = phi_of_u(u);
    let a = Complex::with_val(prec, -(Complex::with_val(prec, u + &phi))).exp();
    let b = Complex::with_val(prec, &phi - u).exp();
    let lin = Complex::with_val(prec, &phi + two_pi_i(prec)) * u;
    Ok(li2(&a)? - li2(&b)? + lin)
}

/// `T_u = 2 / sqrt((2cosh u + 1)(2cosh u - 3))`.
pub fn t_u_fig8(u: &Complex) -> Result<Complex> {
    let prec = prec_of(u);
    let d = disc_fig8(u);
    if abs(&d) < pow2_neg(prec, (prec / 2) as i32) {
        return Err(Error::TorsionSingular);
    }
    Ok(Complex::with_val(prec, 2u32 / sqrt(&d)))
}

/// The two `L`-arguments `xi(1-z)/2pi i - p + 1` and `xi(1+z)/2pi i - p`.
fn args(z: &Complex, xi: &XiParams) -> (Complex, Complex) {
    let prec = xi.prec;
    let g = xi.gamma();
    let one_minus = Complex::with_val(prec, 1 - z);
    let one_plus = Complex::with_val(prec, 1 + z);
    let a = Complex::with_val(prec, &g * one_minus) - (xi.p as i32 - 1);
    let b = Complex::with_val(prec, &g * one_plus) - xi.p;
    (a, b)
}

/// `F(z) = (L2(a) - L2(b))/xi - u z + 4 p pi^2 / xi`.
pub fn big_f(z: &Complex, xi: &XiParams) -> Result<Complex> {
    let prec = xi.prec;
    let x = xi.xi();
    let (a, b) = args(z, xi);
    let l = l012(Level::L2, &a)? - l012(Level::L2, &b)?;
    let pi2 = Float::with_val(prec, pi(prec).square_ref()) * (4 * xi.p);
    let mut out = Complex::with_val(prec, (l + pi2) / &x);
    out -= Complex::with_val(prec, z * &xi.u);
    Ok(out)
}

/// `F'(z) = L1(a) + L1(b) - u`.
pub fn f1(z: &Complex, xi: &XiParams) -> Result<Complex> {
    let (a, b) = args(z, xi);
    Ok(l012(Level::L1, &a)? + l012(Level::L1, &b)? - &xi.u)
}

fn cosh_parts(z: &Complex, xi: &XiParams) -> (Complex, Complex) {
    let prec = xi.prec;
    let w = Complex::with_val(prec, xi.xi() * z);
    let e = Complex::with_val(prec, w.exp_ref());
    let ei = Complex::with_val(prec, e.recip_ref());
    (e, ei)
}

/// `F''(z) = xi (e^{-xi z} - e^{xi z}) / (3 - e^{xi z} - e^{-xi z})`.
pub fn f2(z: &Complex, xi: &XiParams) -> Result<Complex> {
    let prec = xi.prec;
    let (e, ei) = cosh_parts(z, xi);
    let den = Complex::with_val(prec, 3 - Complex::with_val(prec, &e + &ei));
    if den.is_zero() {
        return Err(Error::Domain("F'' pole".into()));
    }
    let num = Complex::with_val(prec, &ei - &e) * xi.xi();
    Ok(Complex::with_val(prec, num / den))
}

/// `F'''(z) = xi^2 (4 - 3(e^{xi z} + e^{-xi z})) / (3 - e^{xi z} - e^{-xi z})^2`.
pub fn f3(z: &Complex, xi: &XiParams) -> Result<Complex> {
    let prec = xi.prec;
    let (e, ei) = cosh_parts(z, xi);
    let s = Complex::with_val(prec, &e + &ei);
    let den = Complex::with_val(prec, 3 - &s).square();
    if den.is_zero() {
        return Err(Error::Domain("F''' pole".into()));
    }
    let num = Complex::with_val(prec, 4 - s * 3u32) * xi.xi().square();
    Ok(Complex::with_val(prec, num / den))
}

/// `sigma_m = 2(m+1) pi i / xi`.
pub fn sigma_m(xi: &XiParams, m: u32) -> Complex {
    Complex::with_val(xi.prec, two_pi_i(xi.prec) * (m + 1)) / xi.xi()
}

/// `f_N(z) = (T_N(g(1-z) - p + 1) - T_N(g(1+z) - p))/N - u z - 2 p pi i / g`.
pub fn f_n(z: &Complex, xi: &XiParams) -> Result<Complex> {
    let prec = xi.prec;
    let qd = QDParams::new(xi.gamma(), xi.n, prec)?;
    let (a, b) = args(z, xi);
    let t = tn(&a, &qd)? - tn(&b, &qd)?;
    let mut out = Complex::with_val(prec, t / xi.n);
    out -= Complex::with_val(prec, z * &xi.u);
    out -= Complex::with_val(prec, two_pi_i(prec) * xi.p) / xi.gamma();
    Ok(out)
}

/// `beta_{p,m} = e^{-4 m p N pi^2/xi} prod_j (1 - e^{4(p-j)N pi^2/xi})(1 - e^{4(p+j)N pi^2/xi})`.
pub fn beta_pm(xi: &XiParams, m: u32) -> Complex {
    let prec = xi.prec;
    // e^{4 N pi^2 / xi}
    let pi2 = Float::with_val(prec, pi(prec).square_ref()) * (4 * xi.n);
    let base = Complex::with_val(prec, pi2 / xi.xi());
    let e = |k: i64| Complex::with_val(prec, &base * k).exp();
    let mut b = e(-((m * xi.p) as i64));
    for j in 1..=m as i64 {
        let p = xi.p as i64;
        b *= Complex::with_val(prec, 1 - e(p - j));
        b *= Complex::with_val(prec, 1 - e(p + j));
    }
    b
}

/// Data tied to one shift index `m`.
/// The inequalities on `(nu, chi)` under which the pentagon `Xi_{m,chi}`
/// lies inside `Theta*_{m,nu}`.
pub fn admissible(xi: &XiParams, m: u32, nu: f64, chi: f64) -> Result<()> {
    let p = xi.p as f64;
    let mf = m as f64;
    let u = xi.u.to_f64();
    let tp = 2.0 * p * std::f64::consts::PI;
    let xi2 = u * u + tp * tp;
    let band = 1.0 - (p + mf) * (u / tp).powi(2);
    let lhs = tp * (u + tp) * nu + xi2 * chi;
    let mut failed = Vec::new();
    if !(nu > 0.0 && chi > 0.0) {
        failed.push("positivity");
    }
    if nu + chi >= band {
        failed.push("band");
    }
    if lhs >= (p + mf) * u * u {
        failed.push("upper-left trapezoid");
    }
    if 2.0 * nu * chi + (2.0 * mf + 3.0) * nu + 2.0 * (2.0 * mf - p + 1.0) * chi >= p - mf {
        failed.push("lower-left trapezoid");
    }
    if m + 1 < xi.p && lhs >= (p - mf - 1.0) * u * u {
        failed.push("lower-right trapezoid");
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Domain(format!("nu = {nu}, chi = {chi} violate: {}", failed.join(", "))))
    }
}

#[derive(Debug, Clone)]
pub struct PotentialCtx {
    pub xi: XiParams,
    pub m: u32,
    pub nu: f64,
    pub chi: f64,
    pub big_m: f64,
    pub delta: f64,
}

impl PotentialCtx {
    /// Defaults: `(nu, chi) = (0.05, 0.02) / 2^j` with the smallest `j` that
    /// satisfies [`admissible`], and `delta = 0.05/p`. When `m = p - 1`,
    /// `delta` is halved until `1 - delta` lies below the saddle height, and
    /// then `(nu, chi)` until the diamond at `1` no longer covers it.
    pub fn new(xi: XiParams, m: u32) -> Result<Self> {
        let (mut nu, mut chi) = (0.05, 0.02);
        for _ in 0..20 {
            if admissible(&xi, m, nu, chi).is_ok() {
                break;
            }
            nu /= 2.0;
            chi /= 2.0;
        }
        let delta = 0.05 / xi.p as f64;
        let mut ctx = Self::with_params(xi, m, nu, chi, 3.0, delta)?;
        if m + 1 == ctx.xi.p {
            for _ in 0..30 {
                let end = Complex::with_val(ctx.prec(), (1.0 - ctx.delta, 0));
                if ctx.height(&end).is_ok_and(|h| h < 0) {
                    break;
                }
                ctx.delta /= 2.0;
            }
            let end = Complex::with_val(ctx.prec(), (1.0 - ctx.delta, 0));
            for _ in 0..30 {
                if ctx.region_contains(RegionId::Wminus, &end) {
                    break;
                }
                ctx.nu /= 2.0;
                ctx.chi /= 2.0;
            }
        }
        Ok(ctx)
    }

    pub fn with_params(xi: XiParams, m: u32, nu: f64, chi: f64, big_m: f64, delta: f64) -> Result<Self> {
        if m >= xi.p {
            return Err(Error::Domain("need m < p".into()));
        }
        admissible(&xi, m, nu, chi)?;
        Ok(Self { xi, m, nu, chi, big_m, delta })
    }

    pub fn prec(&self) -> u32 {
        self.xi.prec
    }

    pub fn sigma(&self) -> Complex {
        sigma_m(&self.xi, self.m)
    }

    /// `z - 2 m pi i / xi = z - m/gamma`.
    fn unshift(&self, z: &Complex) -> Complex {
        let g = self.xi.gamma();
        Complex::with_val(self.prec(), z - Complex::with_val(self.prec(), self.m / g))
    }

    pub fn phi_m(&self, z: &Complex) -> Result<Complex> {
        big_f(&self.unshift(z), &self.xi)
    }

    pub fn phi_m_d1(&self, z: &Complex) -> Result<Complex> {
        f1(&self.unshift(z), &self.xi)
    }

    pub fn varphi_mn(&self, z: &Complex) -> Result<Complex> {
        f_n(&self.unshift(z), &self.xi)
    }

    pub fn beta(&self) -> Complex {
        beta_pm(&self.xi, self.m)
    }

    /// `Re(xi z)`, `Im(xi z)`.
    fn xz(&self, z: &Complex) -> (Float, Float) {
        let w = Complex::with_val(self.prec(), self.xi.xi() * z);
        let (re, im) = w.into_real_imag();
        (re, im)
    }

    fn abs_xi2(&self) -> Float {
        Complex::with_val(self.prec(), self.xi.xi().norm_ref()).into_real_imag().0
    }

    fn f(&self, x: f64) -> Float {
        Float::with_val(self.prec(), x)
    }

    fn pi(&self) -> Float {
        pi(self.prec())
    }

    /// The four trapezoids removed from `Theta*_{m,nu}`.
    fn in_nablas(&self, z: &Complex) -> bool {
        let (re, im) = self.xz(z);
        let y = z.imag();
        let m = self.m as f64;
        let p = self.xi.p as f64;
        let nu = self.nu;
        let u = &self.xi.u;
        let pi = self.pi();
        let two_pi = Float::with_val(self.prec(), &pi * 2u32);
        let tpn = Float::with_val(self.prec(), &two_pi * nu);
        let cap = Float::with_val(self.prec(), &two_pi * u) / self.abs_xi2();
        let lo_band = im >= Float::with_val(self.prec(), &two_pi * (m - 1.0 + nu))
            && im < Float::with_val(self.prec(), &two_pi * (m + nu));
        let hi_band = im > Float::with_val(self.prec(), &two_pi * (m + 1.0 - nu))
            && im <= Float::with_val(self.prec(), &two_pi * (m + 2.0 - nu));
        let under_plus = lo_band
            && re < Float::with_val(self.prec(), u + &tpn)
            && *y < Float::with_val(self.prec(), &cap * (nu - p + m));
        let under_minus = hi_band
            && re >= Float::with_val(self.prec(), u - &tpn)
            && *y > Float::with_val(self.prec(), &cap * (1.0 - p + m - nu));
        let over_plus = lo_band
            && re < Float::with_val(self.prec(), &tpn - u)
            && *y < Float::with_val(self.prec(), &cap * (nu + p + m));
        let over_minus = hi_band
            && re > Float::with_val(self.prec(), -(Float::with_val(self.prec(), u + &tpn)))
            && *y > Float::with_val(self.prec(), &cap * (p + m + 1.0 - nu));
        under_plus || under_minus || over_plus || over_minus
    }

    fn in_under_minus(&self, z: &Complex, m: f64) -> bool {
        let (re, im) = self.xz(z);
        let p = self.xi.p as f64;
        let nu = self.nu;
        let two_pi = Float::with_val(self.prec(), self.pi() * 2u32);
        let cap = Float::with_val(self.prec(), &two_pi * &self.xi.u) / self.abs_xi2();
        let tpn = Float::with_val(self.prec(), &two_pi * nu);
        im > Float::with_val(self.prec(), &two_pi * (m + 1.0 - nu))
            && im <= Float::with_val(self.prec(), &two_pi * (m + 2.0 - nu))
            && re >= Float::with_val(self.prec(), &self.xi.u - &tpn)
            && *z.imag() > Float::with_val(self.prec(), &cap * (1.0 - p + m - nu))
    }

    fn in_theta(&self, z: &Complex) -> bool {
        let (re, im) = self.xz(z);
        let m = self.m as f64;
        let two_pi = Float::with_val(self.prec(), self.pi() * 2u32);
        let band = im >= Float::with_val(self.prec(), &two_pi * (m - 1.0 + self.nu))
            && im <= Float::with_val(self.prec(), &two_pi * (m + 2.0 - self.nu));
        let width = Float::with_val(self.prec(), &two_pi * self.big_m) - &self.xi.u;
        band && re.abs() <= width && !self.in_nablas(z)
    }

    fn in_pentagon(&self, z: &Complex, chi: f64, closed: bool) -> bool {
        let prec = self.prec();
        let m = self.m as f64;
        let p = self.xi.p as f64;
        let u = &self.xi.u;
        let pi = self.pi();
        let x = z.real();
        let y = z.imag();
        let xi2 = self.abs_xi2();
        let (_, im) = self.xz(z);
        let top = Float::with_val(prec, u * (p + m)) / Float::with_val(prec, &pi * (2.0 * p * p));
        let bottom = -(Float::with_val(prec, u * (2.0 * (m + 1.0))) * &pi / &xi2);
        let slope = Float::with_val(prec, &xi2 * (2.0 * chi + 1.0)) / Float::with_val(prec, u * (2.0 * (m + 1.0)));
        let lt = |a: &Float, b: &Float| if closed { a <= b } else { a < b };
        let jl = Float::with_val(prec, &pi * (2.0 * (m - chi)));
        let inside = lt(&self.f((m - chi) / p), x)
            && lt(x, &self.f((m + 1.0 + chi) / p))
            && lt(&bottom, y)
            && lt(y, &top)
            && lt(&jl, &(im + slope * y));
        if !inside {
            return false;
        }
        if self.m + 1 == self.xi.p {
            let diamond = *x < self.f(1.0 + chi / p) && self.in_under_minus(z, m);
            return !diamond;
        }
        true
    }

    /// Sign of `Re Phi_m(z) - Re Phi_m(sigma_m)`.
    pub fn height(&self, z: &Complex) -> Result<Float> {
        let a = self.phi_m(z)?;
        let b = self.phi_m(&self.sigma())?;
        Ok(Float::with_val(self.prec(), a.real() - b.real()))
    }

    pub fn region_contains(&self, region: RegionId, z: &Complex) -> bool {
        match region {
            RegionId::Theta => self.in_theta(z),
            RegionId::XiPentagon(chi) => self.in_pentagon(z, chi, false),
            RegionId::DeltaTriangles => self.in_nablas(z),
            RegionId::Bowtie(nu) => in_bowtie(z, nu, &self.xi.gamma()),
            RegionId::Wplus | RegionId::Wminus => {
                // the closure, so that vertices such as P1 can be classified
                if !self.in_pentagon(z, self.chi, true) {
                    return false;
                }
                match self.height(z) {
                    Ok(h) if region == RegionId::Wplus => h > 0,
                    Ok(h) => h < 0,
                    Err(_) => false,
                }
            }
        }
    }

    /// Named points of the pentagon, computed from their defining lines.
    pub fn points(&self) -> Points {
        let prec = self.prec();
        let m = self.m as f64;
        let p = self.xi.p as f64;
        let u = Float::with_val(prec, &self.xi.u);
        let pi = self.pi();
        let beta = Float::with_val(prec, &pi * (2.0 * p));
        let sigma = self.sigma();
        let top = Float::with_val(prec, &u * (p + m)) / Float::with_val(prec, &pi * (2.0 * p * p));
        let bottom = -Float::with_val(prec, sigma.imag());
        let two_pi = Float::with_val(prec, &pi * 2u32);
        let pt = |x: Float, y: Float| Complex::with_val(prec, (x, y));
        // L_s with Im z = h: x = (2 s pi - u h)/beta
        let on_l = |s: f64, h: &Float| {
            let x = (Float::with_val(prec, &two_pi * s) - Float::with_val(prec, &u * h)) / &beta;
            pt(x, h.clone())
        };
        // K_sigma with Re z = c: y = u c / beta
        let on_k = |cx: f64| pt(self.f(cx), Float::with_val(prec, &u * cx) / &beta);
        let zero = Float::new(prec);
        Points {
            p0: pt(self.f(m / p), zero.clone()),
            p1: on_l(m + 0.5, &bottom),
            p2: pt(self.f((m + 1.0) / p), bottom.clone()),
            p3: pt(self.f((m + 1.0) / p), zero),
            p4: pt(self.f((m + 1.0) / p), top.clone()),
            p5: on_l(m + 1.0, &top),
            p6: on_l(m + 0.5, &top),
            p7: pt(self.f(m / p), top),
            p34: on_k((m + 1.0) / p),
            p70: on_k(m / p),
            sigma,
        }
    }

    /// Sign prediction for `d Re Phi_m / dy` from the `sinh sin` rule:
    /// `+1`, `-1`, or `0` on the boundary lines.
    pub fn dy_sign_rule(&self, z: &Complex) -> i32 {
        let (re, im) = self.xz(z);
        let s = Float::with_val(self.prec(), im.sin_ref());
        if re.is_zero() || s.is_zero() {
            return 0;
        }
        if re.signum() * s.signum() > 0 {
            1
        } else {
            -1
        }
    }
}

/// Regions attached to a [`PotentialCtx`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionId {
    Theta,
    XiPentagon(f64),
    DeltaTriangles,
    Bowtie(f64),
    Wplus,
    Wminus,
}

#[derive(Debug, Clone)]
pub struct Points {
    pub p0: Complex,
    pub p1: Complex,
    pub p2: Complex,
    pub p3: Complex,
    pub p4: Complex,
    pub p5: Complex,
    pub p6: Complex,
    pub p7: Complex,
    pub p34: Complex,
    pub p70: Complex,
    pub sigma: Complex,
}

/// `(1 - e^{-4pN pi^2/xi}) sum_m beta_{p,m} sum_k exp(N f_N((2k+1)/2N - m/gamma))`
/// with `mN/p <= k < (m+1)N/p`.
pub fn assemble_jones(xi: &XiParams) -> Result<Complex> {
    let prec = xi.prec;
    let n = xi.n as u64;
    let p = xi.p as u64;
    let g = xi.gamma();
    let mut total = Complex::new(prec);
    for m in 0..xi.p {
        let mut s = Complex::new(prec);
        let lo = (m as u64 * n).div_ceil(p);
        let hi = ((m as u64 + 1) * n).div_ceil(p);
        for k in lo..hi {
            let z = Complex::with_val(prec, c(prec, (2 * k + 1) as f64) / (2 * n))
                - Complex::with_val(prec, m / &g);
            let f = f_n(&z, xi)?;
            s += Complex::with_val(prec, f * xi.n).exp();
        }
        total += beta_pm(xi, m) * s;
    }
    let pi2 = Float::with_val(prec, pi(prec).square_ref()) * (4 * xi.n * xi.p);
    let e = Complex::with_val(prec, -(Complex::with_val(prec, pi2 / xi.xi()))).exp();
    Ok(total * Complex::with_val(prec, 1 - e))
}
