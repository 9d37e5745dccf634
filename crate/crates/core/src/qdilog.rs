//! The quantum dilogarithm `T_N(z)`: the contour integral on the base strip,
//! its extension to `-1 < Re z < 2`, and the identities it satisfies.

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::numerics::{
    abs, abs_f64, cplx, log, pi, pow2_neg, prec_of, quad_path, two_pi_i, ContourPath, Segment,
};
use crate::special::{l012, Level};

/// How the two infinite ends of the contour are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tails {
    /// Rays along the real axis, exactly as in the definition.
    Canonical,
    /// Rays turned (by Cauchy's theorem) towards the direction of fastest
    /// decay, staying clear of the poles of the integrand.
    Rotated,
}

/// Parameters of `T_N`: `gamma` with `Re > 0`, `Im < 0`, and `N > |gamma|/pi`.
#[derive(Debug, Clone)]
pub struct QDParams {
    pub gamma: Complex,
    pub n: u32,
    pub prec: u32,
    pub tails: Tails,
}

impl QDParams {
    pub fn new(gamma: Complex, n: u32, prec: u32) -> Result<Self> {
        if !(*gamma.real() > 0 && *gamma.imag() < 0) {
            return Err(Error::Domain("gamma needs Re > 0 and Im < 0".into()));
        }
        let bound = abs_f64(&gamma) / std::f64::consts::PI;
        if (n as f64) <= bound {
            return Err(Error::Domain(format!("N = {n} must exceed |gamma|/pi = {bound:.4}")));
        }
        Ok(Self {
            gamma: Complex::with_val(prec, gamma),
            n,
            prec,
            tails: Tails::Rotated,
        })
    }

    pub fn with_tails(mut self, tails: Tails) -> Self {
        self.tails = tails;
        self
    }

    /// `gamma / (2N)`.
    pub fn half_step(&self) -> Complex {
        Complex::with_val(self.prec, &self.gamma / (2 * self.n))
    }

    /// `Re gamma / (2N)` as a float.
    pub fn edge(&self) -> Float {
        Float::with_val(self.prec, self.gamma.real() / (2 * self.n))
    }
}

fn arg_f64(z: &Complex) -> f64 {
    z.imag().to_f64().atan2(z.real().to_f64())
}

/// Chooses a tail direction: `target` clamped into the pole-free window.
fn clamp_angle(target: f64, arg_gamma: f64) -> f64 {
    const MARGIN: f64 = 0.2;
    let half = std::f64::consts::FRAC_PI_2;
    let lo = (-half + MARGIN).max(-half - arg_gamma + MARGIN);
    let hi = (half - MARGIN).min(half - arg_gamma - MARGIN);
    let mut t = target;
    // bring into (-pi, pi]
    while t > std::f64::consts::PI {
        t -= 2.0 * std::f64::consts::PI;
    }
    while t <= -std::f64::consts::PI {
        t += 2.0 * std::f64::consts::PI;
    }
    t.clamp(lo, hi)
}

/// `T_N(z)` for `-Re gamma/2N < Re z < 1 + Re gamma/2N`.
pub fn tn_base(z: &Complex, params: &QDParams) -> Result<Complex> {
    let prec = params.prec;
    let edge = params.edge();
    let one_edge = Float::with_val(prec, &edge + 1u32);
    if !(*z.real() > -edge.clone() && *z.real() < one_edge) {
        return Err(Error::Domain("T_N base strip".into()));
    }
    let wp = prec + 32;
    let z = Complex::with_val(wp, z);
    let g_n = Complex::with_val(wp, &params.gamma / params.n);
    let two_z_m1 = Complex::with_val(wp, &z * 2u32) - 1u32;

    // Tail exponents: right ~ e^{c+ x}, left ~ e^{c- x}.
    let c_plus = Complex::with_val(wp, &z * 2u32) - 2u32 - &g_n;
    let c_minus = Complex::with_val(wp, &z * 2u32) + &g_n;

    let arg_g = arg_f64(&params.gamma);
    let (alpha, beta) = match params.tails {
        Tails::Canonical => (0.0, 0.0),
        Tails::Rotated => (
            clamp_angle(std::f64::consts::PI - arg_f64(&c_plus), arg_g),
            clamp_angle(-arg_f64(&c_minus), arg_g),
        ),
    };
    let (cp, cm) = (to_c64(&c_plus), to_c64(&c_minus));
    let decay_r = -(cp.0 * alpha.cos() - cp.1 * alpha.sin());
    let decay_l = cm.0 * beta.cos() - cm.1 * beta.sin();
    if decay_r.is_nan() || decay_l.is_nan() || decay_r <= 0.0 || decay_l <= 0.0 {
        return Err(Error::TailBoundViolated {
            decay: decay_r.min(decay_l),
        });
    }
    let dir_r = Complex::with_val(wp, (alpha.cos(), alpha.sin()));
    let dir_l = Complex::with_val(wp, (-beta.cos(), -beta.sin()));
    let one = cplx(wp, 1.0, 0.0);
    let mone = cplx(wp, -1.0, 0.0);
    let path = ContourPath::new(vec![
        Segment::Ray {
            origin: mone,
            dir: dir_l,
            decay: decay_l,
            inward: true,
        },
        Segment::Arc {
            center: Complex::new(wp),
            radius: Float::with_val(wp, 1),
            theta0: pi(wp),
            theta1: Float::new(wp),
        },
        Segment::Ray {
            origin: one,
            dir: dir_r,
            decay: decay_r,
            inward: false,
        },
    ])?;

    let integrand = |x: &Complex| -> Result<Complex> {
        let p = prec_of(x);
        let num = Complex::with_val(p, &two_z_m1 * x).exp();
        let ex = Complex::with_val(p, x.exp_ref());
        let sh = Complex::with_val(p, &ex - Complex::with_val(p, ex.recip_ref()));
        let ey = Complex::with_val(p, &g_n * x).exp();
        let sh2 = Complex::with_val(p, &ey - Complex::with_val(p, ey.recip_ref()));
        // sinh x sinh y = sh * sh2 / 4
        let den = Complex::with_val(p, &sh * &sh2) * x;
        Ok(Complex::with_val(p, &num / &den) * 4u32)
    };
    let v = quad_path(integrand, &path, wp - 16)?;
    Ok(Complex::with_val(prec, v / 4u32))
}

fn to_c64(z: &Complex) -> (f64, f64) {
    (z.real().to_f64(), z.imag().to_f64())
}

/// `true` if `z` is within `2^{-prec/2}` of the line through `base` with
/// direction `gamma`, at a parameter value satisfying `accept`.
fn near_gamma_ray(z: &Complex, base: i32, params: &QDParams, accept: impl Fn(f64) -> bool) -> bool {
    let prec = params.prec;
    let w = Complex::with_val(prec, z - base);
    let s = Complex::with_val(prec, &w / &params.gamma);
    let tol = pow2_neg(prec, (prec / 2) as i32);
    let dist = Float::with_val(prec, s.imag().abs_ref()) * abs(&params.gamma);
    dist <= tol && accept(s.real().to_f64())
}

/// `T_N(z)` on `-1 < Re z < 2` minus the rays `l0+` and `l1-`.
pub fn tn(z: &Complex, params: &QDParams) -> Result<Complex> {
    let prec = params.prec;
    let edge = params.edge();
    let n = params.n as f64;
    let re = z.real().clone();
    if re <= -1 || re >= 2 {
        return Err(Error::Domain("T_N needs -1 < Re z < 2".into()));
    }
    let neg_edge = Float::with_val(prec, -&edge);
    let right_edge = Float::with_val(prec, &edge + 1u32);
    let nog = Complex::with_val(prec, Complex::with_val(prec, params.n) / &params.gamma);
    let half = Float::with_val(prec, 0.5);
    let re_g_inv = 1.0 / params.gamma.real().to_f64();
    if re <= neg_edge {
        if near_gamma_ray(z, 0, params, |s| s <= -0.5 / n + 1e-12 && s > -re_g_inv - 1e-12) {
            return Err(Error::ExcludedRay);
        }
        let z1 = Complex::with_val(prec, z + 1u32);
        let arg = Complex::with_val(prec, &nog * z) + &half;
        return Ok(tn_base(&z1, params)? + l012(Level::L1, &arg)?);
    }
    if re >= right_edge {
        if near_gamma_ray(z, 1, params, |s| s >= 0.5 / n - 1e-12 && s < re_g_inv + 1e-12) {
            return Err(Error::ExcludedRay);
        }
        let z1 = Complex::with_val(prec, z - 1u32);
        let arg = Complex::with_val(prec, &nog * &z1) + &half;
        return Ok(tn_base(&z1, params)? - l012(Level::L1, &arg)?);
    }
    tn_base(z, params)
}

/// `T_N(z) - N/(2 pi i gamma) L2(z)`, meant for `z` in `Omega*_nu`.
pub fn tn_l2_gap(z: &Complex, params: &QDParams, region: &OmegaStar) -> Result<Complex> {
    if !region.contains(z, &params.gamma) {
        return Err(Error::Domain("z is outside Omega*_nu".into()));
    }
    let prec = params.prec;
    let t = tn(z, params)?;
    let l2 = l012(Level::L2, z)?;
    let den = Complex::with_val(prec, two_pi_i(prec) * &params.gamma);
    let coef = Complex::with_val(prec, Complex::with_val(prec, params.n) / den);
    Ok(t - Complex::with_val(prec, coef * l2))
}

// ---------------------------------------------------------------------------
// Regions

fn im_div(z: &Complex, shift: f64, gamma: &Complex) -> Float {
    let prec = prec_of(z);
    let w = Complex::with_val(prec, z - Float::with_val(prec, shift));
    let q = Complex::with_val(prec, w / gamma);
    q.imag().clone()
}

/// `Omega*_nu = {-1+nu <= Re z <= 2-nu, |Im z| <= M}` minus two triangles.
#[derive(Debug, Clone, Copy)]
pub struct OmegaStar {
    pub nu: f64,
    pub big_m: f64,
}

impl Default for OmegaStar {
    fn default() -> Self {
        Self { nu: 0.05, big_m: 3.0 }
    }
}

impl OmegaStar {
    pub fn delta0_plus(&self, z: &Complex, gamma: &Complex) -> bool {
        let (x, y) = to_c64(z);
        -1.0 + self.nu <= x && x < self.nu && y > -self.nu && im_div(z, self.nu, gamma) < 0
    }

    pub fn delta1_minus(&self, z: &Complex, gamma: &Complex) -> bool {
        let (x, y) = to_c64(z);
        1.0 - self.nu < x
            && x <= 2.0 - self.nu
            && y < self.nu
            && im_div(z, 1.0 - self.nu, gamma) > 0
    }

    pub fn contains(&self, z: &Complex, gamma: &Complex) -> bool {
        let (x, y) = to_c64(z);
        let boxed = -1.0 + self.nu <= x && x <= 2.0 - self.nu && y.abs() <= self.big_m;
        boxed && !self.delta0_plus(z, gamma) && !self.delta1_minus(z, gamma)
    }
}

/// The region `Omega` on which the `gamma/2N`-shift identity holds.
pub fn in_omega(z: &Complex, params: &QDParams) -> bool {
    let (x, _) = to_c64(z);
    let e = params.edge().to_f64();
    (-1.0 + e < x && x < 2.0 - e) && !in_delta0_plus(z, params) && !in_delta1_minus(z, params)
}

/// `Delta_0^+`: `-1 + Re g/2N < Re z <= 0`, `Im z >= 0`, `Im(z/g) <= 0`.
pub fn in_delta0_plus(z: &Complex, params: &QDParams) -> bool {
    let (x, y) = to_c64(z);
    let e = params.edge().to_f64();
    -1.0 + e < x && x <= 0.0 && y >= 0.0 && im_div(z, 0.0, &params.gamma) <= 0
}

/// `Delta_1^-`: `1 <= Re z < 2 - Re g/2N`, `Im z <= 0`, `Im((z-1)/g) >= 0`.
pub fn in_delta1_minus(z: &Complex, params: &QDParams) -> bool {
    let (x, y) = to_c64(z);
    let e = params.edge().to_f64();
    1.0 <= x && x < 2.0 - e && y <= 0.0 && im_div(z, 1.0, &params.gamma) >= 0
}

/// The bowtie `{Im z >= 0, Im((z-nu)/g) <= 0} u {Im z <= 0, Im((z+nu)/g) >= 0}`.
pub fn in_bowtie(z: &Complex, nu: f64, gamma: &Complex) -> bool {
    let y = z.imag().to_f64();
    (y >= 0.0 && im_div(z, nu, gamma) <= 0) || (y <= 0.0 && im_div(z, -nu, gamma) >= 0)
}

// ---------------------------------------------------------------------------
// Identities, returned as residuals

/// `T(z) - T(z+1) - L1(Nz/g + 1/2)`.
pub fn residual_unit_shift(z: &Complex, params: &QDParams) -> Result<Complex> {
    let prec = params.prec;
    let z1 = Complex::with_val(prec, z + 1u32);
    let nog = Complex::with_val(prec, Complex::with_val(prec, params.n) / &params.gamma);
    let arg = Complex::with_val(prec, &nog * z) + Float::with_val(prec, 0.5);
    Ok(tn(z, params)? - tn(&z1, params)? - l012(Level::L1, &arg)?)
}

/// `T(z - g/2N) - T(z + g/2N) - L1(z)`; inside `Delta_0^+` or `Delta_1^-`
/// the right-hand side picks up `-2 pi i`, which is included here.
pub fn residual_gamma_shift(z: &Complex, params: &QDParams) -> Result<Complex> {
    let prec = params.prec;
    let h = params.half_step();
    let a = Complex::with_val(prec, z - &h);
    let b = Complex::with_val(prec, z + &h);
    let mut rhs = l012(Level::L1, z)?;
    if in_delta0_plus(z, params) || in_delta1_minus(z, params) {
        rhs -= two_pi_i(prec);
    }
    Ok(tn(&a, params)? - tn(&b, params)? - rhs)
}

/// `T(z + 1 - g/2N) - T(z + g/2N)` minus its three-case closed form, for
/// `|Re z| < Re g / N`.
pub fn residual_tricky(z: &Complex, params: &QDParams) -> Result<Complex> {
    let prec = params.prec;
    let lim = Float::with_val(prec, params.gamma.real() / params.n);
    if Float::with_val(prec, z.real().abs_ref()) >= lim {
        return Err(Error::Domain("needs |Re z| < Re gamma / N".into()));
    }
    let h = params.half_step();
    let a = Complex::with_val(prec, z + 1u32) - &h;
    let b = Complex::with_val(prec, z + &h);
    let lhs = tn(&a, params)? - tn(&b, params)?;
    let nog = Complex::with_val(prec, Complex::with_val(prec, params.n) / &params.gamma);
    let nz = Complex::with_val(prec, &nog * z);
    let rhs = if z.is_zero() {
        log(&Complex::with_val(prec, &params.gamma / params.n))
    } else if !z.real().is_sign_negative() || z.real().is_zero() {
        l012(Level::L1, z)? - l012(Level::L1, &nz)?
    } else {
        let z1 = Complex::with_val(prec, z + 1u32);
        let nz1 = Complex::with_val(prec, &nz + 1u32);
        l012(Level::L1, &z1)? - l012(Level::L1, &nz1)?
    };
    Ok(lhs - rhs)
}

/// `(N/(2 pi i g)) (L2(z) - L2(z+1)) - L1(Nz/g + 1/2)`, exponentially small
/// off the bowtie.
pub fn l2_l1_model_residual(z: &Complex, params: &QDParams) -> Result<Complex> {
    let prec = params.prec;
    let z1 = Complex::with_val(prec, z + 1u32);
    let den = Complex::with_val(prec, two_pi_i(prec) * &params.gamma);
    let coef = Complex::with_val(prec, Complex::with_val(prec, params.n) / den);
    let diff = l012(Level::L2, z)? - l012(Level::L2, &z1)?;
    let nog = Complex::with_val(prec, Complex::with_val(prec, params.n) / &params.gamma);
    let arg = Complex::with_val(prec, &nog * z) + Float::with_val(prec, 0.5);
    Ok(Complex::with_val(prec, coef * diff) - l012(Level::L1, &arg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::kappa;

    fn gamma_for(p: u32, prec: u32) -> Complex {
        // gamma = xi / (2 pi i), xi = kappa + 2 p pi i
        let xi = Complex::with_val(prec, (kappa(prec), pi(prec) * (2 * p)));
        Complex::with_val(prec, xi / two_pi_i(prec))
    }

    fn params(p: u32, n: u32, prec: u32) -> QDParams {
        QDParams::new(gamma_for(p, prec), n, prec).unwrap()
    }

    fn small(z: &Complex, bits: u32) -> bool {
        abs(z) < pow2_neg(prec_of(z), bits as i32)
    }

    #[test]
    fn params_validation() {
        let p = 128;
        assert!(QDParams::new(cplx(p, 1.0, 0.1), 50, p).is_err());
        assert!(QDParams::new(cplx(p, 1.0, -0.2), 0, p).is_err());
    }

    #[test]
    fn rotated_and_canonical_tails_agree() {
        let q = params(1, 20, 128);
        let qc = q.clone().with_tails(Tails::Canonical);
        for (x, y) in [(0.5, 0.0), (0.3, 0.2), (0.9, -0.3), (0.01, 0.05)] {
            let z = cplx(128, x, y);
            let a = tn_base(&z, &q).unwrap();
            let b = tn_base(&z, &qc).unwrap();
            let d = Complex::with_val(128, &a - &b);
            assert!(abs(&d) < Float::with_val(128, abs(&a) * pow2_neg(128, 100)), "{x} {y}");
        }
    }

    #[test]
    fn unit_shift_identity() {
        let q = params(1, 60, 128);
        let z = cplx(128, 0.0, 0.001);
        assert!(small(&residual_unit_shift(&z, &q).unwrap(), 110));
    }

    #[test]
    fn gamma_shift_identity_in_strip_and_omega() {
        let q = params(1, 50, 128);
        let z = cplx(128, 0.5, 0.2);
        assert!(small(&residual_gamma_shift(&z, &q).unwrap(), 108));
        let z = cplx(128, -0.3, -0.1);
        assert!(in_omega(&z, &q));
        assert!(small(&residual_gamma_shift(&z, &q).unwrap(), 108));
    }

    #[test]
    fn tricky_identity_at_zero_gives_log() {
        let q = params(1, 50, 128);
        let r = residual_tricky(&Complex::new(128), &q).unwrap();
        assert!(small(&r, 108));
    }

    #[test]
    fn extension_is_continuous_at_the_edge() {
        let q = params(1, 40, 128);
        let e = q.edge().to_f64();
        let a = tn(&cplx(128, -e - 1e-9, 0.1), &q).unwrap();
        let b = tn(&cplx(128, -e + 1e-9, 0.1), &q).unwrap();
        let d = Complex::with_val(128, &a - &b);
        assert!(abs_f64(&d) < 1e-6);
    }

    #[test]
    fn excluded_rays_are_rejected() {
        let q = params(1, 40, 128);
        // z = s gamma with s = -0.5
        let z = Complex::with_val(128, &q.gamma * -0.5f64);
        assert_eq!(tn(&z, &q).unwrap_err(), Error::ExcludedRay);
        let z = Complex::with_val(128, &q.gamma * 0.5f64) + 1u32;
        assert_eq!(tn(&z, &q).unwrap_err(), Error::ExcludedRay);
    }
}
