//! Dilogarithm, the auxiliary functions L0/L1/L2, Gamma(1/3) and the
//! cosecant-derivative coefficients.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::numerics::{abs, log, pi, pow2_neg, prec_of, two_pi_i};

const LI2_GUARD: u32 = 16;

/// Bernoulli numbers `B_0, B_1, ...` as exact rationals, `B_1 = -1/2`.
fn bernoulli_upto(n: usize) -> Vec<Rational> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![Rational::from(1)]));
    let mut b = cache.lock().unwrap();
    while b.len() <= n {
        let m = b.len();
        // sum_{k=0}^{m} C(m+1, k) B_k = 0
        let mut s = Rational::new();
        let mut binom = Integer::from(1);
        for (k, bk) in b.iter().enumerate() {
            if k > 1 && k % 2 == 1 {
                binom = binom * (m + 1 - k) as u32 / (k + 1) as u32;
                continue;
            }
            s += Rational::from(bk * &binom);
            binom = binom * (m + 1 - k) as u32 / (k + 1) as u32;
        }
        let bm = -s / Rational::from(m as u32 + 1);
        b.push(bm);
    }
    b[..=n].to_vec()
}

/// `sum z^n / n^2` for `|z| <= 1/2`.
fn li2_series(z: &Complex, wp: u32) -> Complex {
    let eps = pow2_neg(wp, wp as i32);
    let mut sum = Complex::new(wp);
    let mut zn = z.clone();
    let mut n: u32 = 1;
    loop {
        let term = Complex::with_val(wp, &zn / (n * n));
        let small = abs(&term) <= Float::with_val(wp, &eps * abs(&sum));
        sum += &term;
        if small || zn.is_zero() {
            break;
        }
        zn *= z;
        n += 1;
    }
    sum
}

/// `sum B_n w^{n+1}/(n+1)!` with `w = -log(1-z)`, valid for `|w| < 2 pi`.
fn li2_bernoulli(w: &Complex, wp: u32) -> Complex {
    let eps = pow2_neg(wp, wp as i32);
    let aw = abs(w).to_f64().max(1e-300);
    // Terms shrink like (|w|/2pi)^n.
    let ratio = aw / (2.0 * std::f64::consts::PI);
    let nmax = if ratio < 1e-300 {
        4
    } else {
        ((wp as f64 * std::f64::consts::LN_2) / (-ratio.ln())).ceil() as usize + 8
    };
    let b = bernoulli_upto(nmax);
    let mut sum = Complex::new(wp);
    let mut wn = w.clone();
    let mut fact = Integer::from(1);
    for (n, bn) in b.iter().enumerate() {
        fact *= (n + 1) as u32;
        if n > 1 && n % 2 == 1 {
            wn *= w;
            continue;
        }
        let coef = Float::with_val(wp, bn) / Float::with_val(wp, &fact);
        let term = Complex::with_val(wp, &wn * &coef);
        let small = n > 2 && abs(&term) <= Float::with_val(wp, &eps * abs(&sum));
        sum += term;
        if small {
            break;
        }
        wn *= w;
    }
    sum
}

fn li2_unit_disc(z: &Complex, wp: u32) -> Complex {
    let half = Float::with_val(wp, 0.5);
    if abs(z) <= half {
        return li2_series(z, wp);
    }
    let one_m = Complex::with_val(wp, 1 - z);
    if *z.real() > half {
        // Li2(z) = pi^2/6 - log z log(1-z) - Li2(1-z)
        let zeta2 = Float::with_val(wp, pi(wp).square_ref()) / 6u32;
        let l = Complex::with_val(wp, log(z) * log(&one_m));
        let rest = if abs(&one_m) <= half {
            li2_series(&one_m, wp)
        } else {
            li2_bernoulli(&-log(z), wp)
        };
        return Complex::with_val(wp, (zeta2, 0)) - l - rest;
    }
    li2_bernoulli(&-log(&one_m), wp)
}

/// Principal dilogarithm with cut `[1, inf)`; `li2(1) = pi^2/6`.
pub fn li2(z: &Complex) -> Result<Complex> {
    let prec = prec_of(z);
    let wp = prec + LI2_GUARD;
    let z = Complex::with_val(wp, z);
    if z.is_zero() {
        return Ok(Complex::new(prec));
    }
    if z.imag().is_zero() && *z.real() >= 1 {
        if *z.real() == 1 {
            let zeta2 = Float::with_val(prec, pi(prec).square_ref()) / 6u32;
            return Ok(Complex::with_val(prec, (zeta2, 0)));
        }
        return Err(Error::BranchCutInput);
    }
    let v = if abs(&z) > 1 {
        // Li2(z) = -Li2(1/z) - pi^2/6 - log(-z)^2 / 2
        let inv = Complex::with_val(wp, z.recip_ref());
        let l = log(&Complex::with_val(wp, -&z));
        let zeta2 = Float::with_val(wp, pi(wp).square_ref()) / 6u32;
        -li2_unit_disc(&inv, wp) - Complex::with_val(wp, (zeta2, 0)) - Complex::with_val(wp, l.square_ref()) / 2u32
    } else {
        li2_unit_disc(&z, wp)
    };
    Ok(Complex::with_val(prec, v))
}

/// The three auxiliary functions of the quantum dilogarithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    L0,
    L1,
    L2,
}

fn is_integer(x: &Float) -> bool {
    x.is_integer()
}

/// `L0`, `L1` or `L2` at `z`, with the `Im z >= 0` / `Im z < 0` split.
pub fn l012(level: Level, z: &Complex) -> Result<Complex> {
    let prec = prec_of(z);
    let wp = prec + 8;
    let z = Complex::with_val(wp, z);
    let tpi = two_pi_i(wp);
    let on_real = z.imag().is_zero();
    match level {
        Level::L0 => {
            if on_real && is_integer(z.real()) {
                return Err(Error::Domain("L0 at an integer".into()));
            }
            // -2 pi i / (1 - e^{-2 pi i z})
            let e = (Complex::with_val(wp, &tpi * &z) * -1i32).exp();
            let den = Complex::with_val(wp, 1 - e);
            Ok(Complex::with_val(prec, -tpi / den))
        }
        Level::L1 | Level::L2 => {
            if on_real && (*z.real() <= 0 || *z.real() >= 1) {
                return Err(Error::Domain("L1/L2 on (-inf,0] or [1,inf)".into()));
            }
            let upper = !z.imag().is_sign_negative() || on_real;
            let v = match (level, upper) {
                (Level::L1, true) => {
                    let e = Complex::with_val(wp, &tpi * &z).exp();
                    log(&Complex::with_val(wp, 1 - e))
                }
                (Level::L1, false) => {
                    // pi i (2z - 1) + log(1 - e^{-2 pi i z})
                    let e = (Complex::with_val(wp, &tpi * &z) * -1i32).exp();
                    let l = log(&Complex::with_val(wp, 1 - e));
                    let lin = Complex::with_val(wp, &z * 2u32) - 1u32;
                    Complex::with_val(wp, &tpi * lin) / 2u32 + l
                }
                (Level::L2, true) => {
                    let e = Complex::with_val(wp, &tpi * &z).exp();
                    li2(&e)?
                }
                (Level::L2, false) => {
                    // pi^2 (2z^2 - 2z + 1/3) - Li2(e^{-2 pi i z})
                    let e = (Complex::with_val(wp, &tpi * &z) * -1i32).exp();
                    let pi2 = Float::with_val(wp, pi(wp).square_ref());
                    let mut poly = Complex::with_val(wp, z.square_ref()) * 2u32;
                    poly -= Complex::with_val(wp, &z * 2u32);
                    poly += Float::with_val(wp, 1) / 3u32;
                    Complex::with_val(wp, poly * &pi2) - li2(&e)?
                }
                _ => unreachable!(),
            };
            Ok(Complex::with_val(prec, v))
        }
    }
}

/// Residuals of `L1(z+1) - L1(z) = 2 pi i` and `L2(z+1) - L2(z) = 4 pi^2 z`
/// for `Im z < 0`.
pub fn l012_shift_residual(z: &Complex) -> Result<(Complex, Complex)> {
    if !z.imag().is_sign_negative() || z.imag().is_zero() {
        return Err(Error::Domain("shift identity needs Im z < 0".into()));
    }
    let prec = prec_of(z);
    let z1 = Complex::with_val(prec, z + 1u32);
    let r1 = l012(Level::L1, &z1)? - l012(Level::L1, z)? - two_pi_i(prec);
    let pi2 = Float::with_val(prec, pi(prec).square_ref());
    let four_pi2_z = Complex::with_val(prec, z * &pi2) * 4u32;
    let r2 = l012(Level::L2, &z1)? - l012(Level::L2, z)? - four_pi2_z;
    Ok((r1, r2))
}

/// Coefficients `a_{m,j}` of `P_m(z) = sum_j a_{m,j} cos(j pi z)` in
/// `d^m/dz^m csc^2(pi z) = 2 (-pi)^m csc^{m+2}(pi z) P_m(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CscCoeffTable {
    pub m: u32,
    pub coeffs: BTreeMap<u32, Rational>,
}

impl CscCoeffTable {
    pub fn sum(&self) -> Rational {
        self.coeffs.values().fold(Rational::new(), |acc, a| acc + a)
    }
}

/// Builds the table for `m >= 1` from `P_1 = cos(pi z)`.
pub fn csc_coeffs(m: u32) -> CscCoeffTable {
    assert!(m >= 1, "csc_coeffs needs m >= 1");
    let mut a: BTreeMap<u32, Rational> = BTreeMap::new();
    a.insert(1, Rational::from(1));
    for cur in 1..m {
        let get = |k: i64| -> Rational {
            if k < 0 {
                Rational::new()
            } else {
                a.get(&(k as u32)).cloned().unwrap_or_default()
            }
        };
        let mut next = BTreeMap::new();
        let n = cur + 1;
        let mut k = n % 2;
        while k <= n {
            let (ci, ki) = (cur as i64, k as i64);
            // 2 a_{m+1,k} = (m+k+3) a_{m,k+1} + (m-k+3) a_{m,k-1}
            let mut twice = Rational::from(ci + ki + 3) * get(ki + 1)
                + Rational::from(ci - ki + 3) * get(ki - 1);
            if k == 1 {
                // cos(-x) = cos(x) folds the j = 0 term a second time
                twice += Rational::from(ci + 2) * get(0);
            }
            next.insert(k, twice / 2u32);
            k += 2;
        }
        a = next;
    }
    CscCoeffTable { m, coeffs: a }
}

/// `Gamma(1/3)`.
pub fn gamma_third(prec: u32) -> Float {
    let third = Float::with_val(prec + 8, 1) / 3u32;
    Float::with_val(prec, third.gamma())
}
