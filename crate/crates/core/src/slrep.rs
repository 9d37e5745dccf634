//! SL(2, C) representations of the figure-eight and stevedore knot groups,
//! the stevedore Riley quartic, longitude eigenvalues and Chern-Simons values.

use std::fmt;

use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::numerics::{abs, abs_f64, cbrt, log, pi, pi_i, pow2_neg, solve_quartic, sqrt, two_pi_i};

#[derive(Debug, Clone, PartialEq)]
pub struct SL2Mat {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

impl SL2Mat {
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity(prec: u32) -> Self {
        let one = Complex::with_val(prec, 1);
        let zero = Complex::new(prec);
        Self::new(one.clone(), zero.clone(), zero, one)
    }

    pub fn prec(&self) -> u32 {
        self.a.prec().0
    }

    pub fn mul(&self, o: &SL2Mat) -> SL2Mat {
        let p = self.prec();
        let e = |x: &Complex, y: &Complex, z: &Complex, w: &Complex| {
            Complex::with_val(p, x * y) + Complex::with_val(p, z * w)
        };
        SL2Mat::new(
            e(&self.a, &o.a, &self.b, &o.c),
            e(&self.a, &o.b, &self.b, &o.d),
            e(&self.c, &o.a, &self.d, &o.c),
            e(&self.c, &o.b, &self.d, &o.d),
        )
    }

    /// Inverse through the adjugate; exact for unimodular input.
    pub fn inv(&self) -> SL2Mat {
        let p = self.prec();
        SL2Mat::new(
            self.d.clone(),
            Complex::with_val(p, -&self.b),
            Complex::with_val(p, -&self.c),
            self.a.clone(),
        )
    }

    pub fn det(&self) -> Complex {
        let p = self.prec();
        Complex::with_val(p, &self.a * &self.d) - Complex::with_val(p, &self.b * &self.c)
    }

    pub fn trace(&self) -> Complex {
        Complex::with_val(self.prec(), &self.a + &self.d)
    }

    /// Largest entrywise modulus of `self - o`.
    pub fn dist(&self, o: &SL2Mat) -> f64 {
        let p = self.prec();
        [(&self.a, &o.a), (&self.b, &o.b), (&self.c, &o.c), (&self.d, &o.d)]
            .iter()
            .map(|(x, y)| abs_f64(&Complex::with_val(p, *x - *y)))
            .fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        [&self.a, &self.b, &self.c, &self.d].iter().map(|x| abs_f64(x)).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    X,
    XInv,
    Y,
    YInv,
}

impl Letter {
    fn inverse(self) -> Letter {
        match self {
            Letter::X => Letter::XInv,
            Letter::XInv => Letter::X,
            Letter::Y => Letter::YInv,
            Letter::YInv => Letter::Y,
        }
    }
}

/// A freely reduced word in `x, y`. Written with capitals for inverses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupWord(Vec<Letter>);

impl GroupWord {
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord(out)
    }

    /// `"xYXy"` is `x y^-1 x^-1 y`.
    pub fn parse(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'x' => Ok(Letter::X),
                'X' => Ok(Letter::XInv),
                'y' => Ok(Letter::Y),
                'Y' => Ok(Letter::YInv),
                other => Err(Error::Domain(format!("bad letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn then(&self, o: &GroupWord) -> GroupWord {
        GroupWord::new(self.0.iter().chain(o.0.iter()).copied())
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord::new(self.0.iter().rev().map(|l| l.inverse()))
    }

    pub fn pow(&self, k: i32) -> GroupWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = GroupWord::default();
        for _ in 0..k.unsigned_abs() {
            out = out.then(&base);
        }
        out
    }

    fn w(s: &str) -> GroupWord {
        Self::parse(s).expect("static word")
    }

    /// `omega = x y^-1 x^-1 y`.
    pub fn omega() -> GroupWord {
        Self::w("xYXy")
    }

    /// `omega` read backwards: `y x^-1 y^-1 x`.
    pub fn omega_bar() -> GroupWord {
        Self::w("yXYx")
    }

    /// `omega x (y omega)^-1` for the figure-eight knot.
    pub fn fig8_relator() -> GroupWord {
        let o = Self::omega();
        o.then(&Self::w("x")).then(&Self::w("y").then(&o).inverse())
    }

    /// `x omega^-1 omegabar^-1 x^-1`.
    pub fn fig8_longitude() -> GroupWord {
        Self::w("x").then(&Self::omega().inverse()).then(&Self::omega_bar().inverse()).then(&Self::w("X"))
    }

    /// `omega^2 x (y omega^2)^-1` for the stevedore knot.
    pub fn stevedore_relator() -> GroupWord {
        let o2 = Self::omega().pow(2);
        o2.then(&Self::w("x")).then(&Self::w("y").then(&o2).inverse())
    }

    /// `x^3 omega^-2 omegabar^-2 x^-3`.
    pub fn stevedore_longitude() -> GroupWord {
        Self::w("xxx")
            .then(&Self::omega().pow(-2))
            .then(&Self::omega_bar().pow(-2))
            .then(&Self::w("XXX"))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            let c = match l {
                Letter::X => 'x',
                Letter::XInv => 'X',
                Letter::Y => 'y',
                Letter::YInv => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Left-to-right product of the images of the letters.
pub fn eval_word(w: &GroupWord, x: &SL2Mat, y: &SL2Mat) -> SL2Mat {
    let (xi, yi) = (x.inv(), y.inv());
    let mut acc = SL2Mat::identity(x.prec());
    for l in w.letters() {
        let m = match l {
            Letter::X => x,
            Letter::XInv => &xi,
            Letter::Y => y,
            Letter::YInv => &yi,
        };
        acc = acc.mul(m);
    }
    acc
}

/// `[[s, 1], [0, 1/s]]` and `[[s, 0], [d, 1/s]]`.
pub fn riley_pair(s: &Complex, d: &Complex) -> (SL2Mat, SL2Mat) {
    let p = s.prec().0;
    let si = Complex::with_val(p, s.recip_ref());
    let x = SL2Mat::new(s.clone(), Complex::with_val(p, 1), Complex::new(p), si.clone());
    let y = SL2Mat::new(s.clone(), Complex::new(p), d.clone(), si);
    (x, y)
}

// ---------------------------------------------------------------------------
// Figure-eight knot

/// `rho_u(x), rho_u(y)` and `v(u)`. The longitude has eigenvalue `-e^{v/2}`.
pub fn rep_fig8(u: &Complex) -> (SL2Mat, SL2Mat, Complex) {
    let p = u.prec().0;
    let ch = Complex::with_val(p, u.cosh_ref());
    let ch2 = Complex::with_val(p, &ch * 2u32);
    let disc = Complex::with_val(p, &ch2 + 1u32) * Complex::with_val(p, &ch2 - 3u32);
    let r = sqrt(&disc);
    let d = Complex::with_val(p, Float::with_val(p, 1.5) - &ch) + Complex::with_val(p, &r / 2u32);
    let s = Complex::with_val(p, u / 2u32).exp();
    let (x, y) = riley_pair(&s, &d);
    let u2 = Complex::with_val(p, u * 2u32);
    let mut w = Complex::with_val(p, u2.cosh_ref()) - &ch - 1u32;
    w -= Complex::with_val(p, u.sinh_ref()) * r;
    // At u = 0 the argument is exactly -1; take the limit from u > 0,
    // where it approaches -1 from below the real axis.
    let lw = if w.imag().is_zero() && *w.real() < 0 {
        Complex::with_val(p, (Float::with_val(p, w.real().abs_ref()).ln(), -pi(p)))
    } else {
        log(&w)
    };
    let v = Complex::with_val(p, lw * 2u32) + two_pi_i(p);
    (x, y, v)
}

// ---------------------------------------------------------------------------
// Stevedore knot

/// Riley's quartic in `d` with `s_k = m^k + m^-k`.
pub fn riley_st(m: &Complex, d: &Complex) -> Complex {
    crate::numerics::horner(&riley_coeffs(m), d)
}

fn riley_coeffs(m: &Complex) -> [Complex; 5] {
    let p = m.prec().0;
    let s = |k: i32| {
        let mk = Complex::with_val(p, m.clone().pow(k));
        let inv = Complex::with_val(p, mk.recip_ref());
        mk + inv
    };
    let (s1, s2) = (s(1), s(2));
    let c3 = Complex::with_val(p, &s1 * 2u32) - 5u32;
    let c2 = Complex::with_val(p, &s2 - Complex::with_val(p, &s1 * 6u32)) + 13u32;
    let c1 = -(Complex::with_val(p, &s2 - Complex::with_val(p, &s1 * 7u32)) + 14u32);
    let c0 = Complex::with_val(p, -&c3);
    [Complex::with_val(p, 1), c3, c2, c1, c0]
}

/// The auxiliary quantities of the closed-form roots at real `m`.
#[derive(Debug, Clone)]
pub struct RileyClosed {
    pub a: Float,
    pub b: Float,
    pub c: Complex,
    pub d: Float,
    pub j_plus: Float,
    pub j_minus: Float,
    pub roots: [Complex; 4],
}

fn sk(m: &Float, k: i32) -> Float {
    let p = m.prec();
    let mk = Float::with_val(p, m.clone().pow(k));
    let inv = Float::with_val(p, mk.recip_ref());
    mk + inv
}

/// `D(m) = 5 s6 - 32 s5 + 56 s4 - 118 s3 + 124 s2 + 32 s1 + 123`.
pub fn riley_disc(m: &Float) -> Float {
    let p = m.prec();
    let mut acc = Float::with_val(p, 123);
    for (k, c) in [(6, 5), (5, -32), (4, 56), (3, -118), (2, 124), (1, 32)] {
        acc += sk(m, k) * c;
    }
    acc
}

/// Closed forms for `d_1 .. d_4`. `A`, `J+-` are real in exact arithmetic,
/// so their real parts are kept; square roots and `C^{1/3}` are principal.
pub fn riley_closed(m: &Float) -> RileyClosed {
    let p = m.prec();
    let s: Vec<Float> = (0..=6).map(|k| if k == 0 { Float::with_val(p, 2) } else { sk(m, k) }).collect();
    let fl = |x: f64| Float::with_val(p, x);
    let d = riley_disc(m);
    let b = Float::with_val(p, &s[4] - &s[3] * fl(6.0)) + &s[2] * fl(5.0) + &s[1] * fl(3.0) + fl(9.0);
    let three = fl(3.0);
    let sqrt3 = Float::with_val(p, three.sqrt_ref());
    let root_minus_d = sqrt(&Complex::with_val(p, (-d.clone(), 0)));
    let poly = Float::with_val(p, &s[6] - &s[5] * fl(9.0)) + &s[4] * fl(21.0) - &s[3] * fl(4.5) + &s[2] * fl(6.0)
        - &s[1] * fl(27.0)
        - fl(15.5);
    let c = Complex::with_val(p, root_minus_d * Float::with_val(p, &sqrt3 * 3u32) / 2u32) + poly;
    let c3 = cbrt(&c);
    let e = Float::with_val(p, &s[1] * 2u32) - 5u32; // 2 s1 - 5
    let f = Float::with_val(p, &s[2] - &s[1] * fl(6.0)) + 13u32; // s2 - 6 s1 + 13
    let bc = Complex::with_val(p, &b / &c3);
    let tail = Float::with_val(p, e.square_ref()) * 3u32 - Float::with_val(p, &f * 8u32);
    let a_c = Complex::with_val(p, &bc * 4u32) + Complex::with_val(p, &c3 * 4u32) + &tail;
    let a = a_c.real().clone();
    let sa = sqrt(&Complex::with_val(p, (&a, 0)));
    let jbase = Complex::with_val(p, &bc * -2i32) - Complex::with_val(p, &c3 * 2u32) + &tail;
    let jterm = Complex::with_val(p, Float::with_val(p, &sqrt3 * 3u32) * (Float::with_val(p, &s[1] * 2u32) + 1u32)) / &sa;
    let j_plus = Complex::with_val(p, &jbase + &jterm).real().clone();
    let j_minus = Complex::with_val(p, &jbase - &jterm).real().clone();
    let sqrt6 = Float::with_val(p, 6).sqrt();
    let sjm = Complex::with_val(p, sqrt(&Complex::with_val(p, (&j_minus, 0))) * &sqrt6);
    let sjp = Complex::with_val(p, sqrt(&Complex::with_val(p, (&j_plus, 0))) * &sqrt6);
    let base = Float::with_val(p, &s[1] * 6u32) - 15u32;
    let s3a = Complex::with_val(p, &sa * &sqrt3);
    let root = |sign_a: i32, sj: &Complex, sign_j: i32| {
        let mut t = Complex::with_val(p, (&base, 0));
        t += Complex::with_val(p, &s3a * sign_a);
        t += Complex::with_val(p, sj * sign_j);
        Complex::with_val(p, -t / 12u32)
    };
    let roots = [root(1, &sjm, 1), root(1, &sjm, -1), root(-1, &sjp, 1), root(-1, &sjp, -1)];
    RileyClosed { a, b, c, d, j_plus, j_minus, roots }
}

/// The unique zero of `D` in `(1.9, 2)`, by bisection.
pub fn m0(prec: u32) -> Float {
    let mut lo = Float::with_val(prec, 1.9);
    let mut hi = Float::with_val(prec, 2);
    for _ in 0..prec + 4 {
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        if riley_disc(&mid) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    D1,
    D2,
    D3,
    D4,
    Numeric,
}

/// A point of the stevedore representation variety.
#[derive(Debug, Clone)]
pub struct RepPoint {
    pub m: Complex,
    pub d: Complex,
    pub branch: Branch,
}

impl RepPoint {
    pub fn new(m: Complex, d: Complex, branch: Branch) -> Result<Self> {
        let p = m.prec().0;
        let r = riley_st(&m, &d);
        let scale = riley_coeffs(&m).iter().map(abs_f64).fold(1.0, f64::max);
        if abs(&r) > pow2_neg(p, p as i32 - 16) * scale * (1.0 + abs_f64(&d)).powi(4) {
            return Err(Error::Domain("not on the Riley curve".into()));
        }
        Ok(Self { m, d, branch })
    }
}

/// The four labelled roots at real `m`, each closed form checked against the
/// numeric quartic roots.
#[derive(Debug, Clone)]
pub struct RileyBranches {
    pub m: Float,
    pub roots: [Complex; 4],
    /// `true` where the closed form agrees with a numeric root.
    pub validated: [bool; 4],
    pub closed: RileyClosed,
}

pub fn riley_branches_st(m: &Float) -> Result<RileyBranches> {
    let p = m.prec();
    if *m < 1 || *m > 2 {
        return Err(Error::Domain("need 1 <= m <= 2".into()));
    }
    let gap = Float::with_val(p, m - m0(p)).abs();
    if gap < 1e-6 {
        return Err(Error::BranchCollision);
    }
    let closed = riley_closed(m);
    let mc = Complex::with_val(p, (m, 0));
    let [c4, c3, c2, c1, c0] = riley_coeffs(&mc);
    let numeric = solve_quartic(&c4, &c3, &c2, &c1, &c0)?;
    let tol = 2f64.powi(-(p as i32) / 2);
    let mut validated = [false; 4];
    for (i, r) in closed.roots.iter().enumerate() {
        let best = numeric
            .iter()
            .map(|n| abs_f64(&Complex::with_val(p, n - r)))
            .fold(f64::INFINITY, f64::min);
        validated[i] = best < tol;
    }
    Ok(RileyBranches { m: m.clone(), roots: closed.roots.clone(), validated, closed })
}

/// `(1,1)`-entry of the image of the longitude `x^3 w^-2 wbar^-2 x^-3`.
pub fn longitude_st(m: &Complex, d: &Complex) -> Result<SL2Mat> {
    let p = m.prec().0;
    let s = sqrt(m);
    let (x, y) = riley_pair(&s, d);
    let l = eval_word(&GroupWord::stevedore_longitude(), &x, &y);
    let scale = 1.0 + l.norm();
    let tol = 2f64.powi(-(p as i32) / 2) * scale;
    let low = abs_f64(&l.c);
    if low > tol {
        return Err(Error::NonUpperTriangular(low));
    }
    if l.mul(&x).dist(&x.mul(&l)) > tol {
        return Err(Error::Domain("longitude does not commute with the meridian".into()));
    }
    Ok(l)
}

pub fn longitude_eigen_st(m: &Complex, d: &Complex) -> Result<Complex> {
    longitude_st(m, d).map(|l| l.a)
}

/// Complex volume of the stevedore complement, taken as an input constant.
pub fn cv_stevedore(prec: u32) -> Complex {
    Complex::with_val(prec, (-6.791, 3.164))
}

/// `v`, `CS_{u,v}` and `S_u` of the stevedore knot along `d_2`.
#[derive(Debug, Clone)]
pub struct CsPoint {
    pub u: Float,
    pub v: Complex,
    pub cs: Complex,
    pub s: Complex,
    pub grid: usize,
}

/// `-lambda` along `d_2(e^s)`; the meridian eigenvalue is `e^{s/2}`, so
/// `m = e^s`.
fn minus_lambda(s: &Float) -> Result<Complex> {
    let p = s.prec();
    let m = Float::with_val(p, s.exp_ref());
    let br = riley_branches_st(&m)?;
    let mc = Complex::with_val(p, (&m, 0));
    Ok(-longitude_eigen_st(&mc, &br.roots[1])?)
}

/// `v` on the uniform grid `k u/n`, continued from `v(0) = 0`.
fn v_grid(u: &Float, n: usize) -> Result<Vec<Complex>> {
    let p = u.prec();
    let four_pi = Float::with_val(p, pi(p) * 4u32);
    let mut out: Vec<Complex> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let s = Float::with_val(p, u * k as u32) / n as u32;
        let mut v = Complex::with_val(p, log(&minus_lambda(&s)?) * 2u32);
        if let Some(prev) = out.last() {
            let d = Float::with_val(p, v.imag() - prev.imag());
            let turns = Float::with_val(p, &d / &four_pi).round();
            v -= Complex::with_val(p, (0, turns * &four_pi));
            if abs_f64(&Complex::with_val(p, &v - prev)) > std::f64::consts::PI {
                return Err(Error::BranchJump(k));
            }
        }
        out.push(v);
    }
    Ok(out)
}

fn simpson(vals: &[Complex], h: &Float) -> Complex {
    let p = h.prec();
    let n = vals.len() - 1;
    let mut acc = Complex::with_val(p, &vals[0] + &vals[n]);
    for (i, v) in vals.iter().enumerate().take(n).skip(1) {
        acc += Complex::with_val(p, v * if i % 2 == 1 { 4u32 } else { 2u32 });
    }
    acc * h / 3u32
}

/// `CS = cv + (1/2) int_0^u v - u v(u)/4` and `S = CS + u pi i + u v(u)/4`,
/// doubling a Simpson grid until successive integrals agree to `1e-9`.
pub fn cs_st(u: &Float) -> Result<CsPoint> {
    let p = u.prec();
    let cv = cv_stevedore(p);
    if u.is_zero() {
        return Ok(CsPoint { u: u.clone(), v: Complex::new(p), cs: cv.clone(), s: cv, grid: 0 });
    }
    let mut n = 32usize;
    let mut prev: Option<Complex> = None;
    loop {
        let h = Float::with_val(p, u / n as u32);
        let grid = match v_grid(u, n) {
            Ok(g) => g,
            Err(Error::BranchJump(_)) if n < 1 << 14 => {
                n *= 2;
                continue;
            }
            Err(e) => return Err(e),
        };
        let int = simpson(&grid, &h);
        let done = prev.as_ref().is_some_and(|q| abs_f64(&Complex::with_val(p, &int - q)) < 1e-9);
        if done || n >= 1 << 14 {
            if !done {
                return Err(Error::NonConvergent("CS integral".into()));
            }
            let v = grid[n].clone();
            let uv4 = Complex::with_val(p, &v * u) / 4u32;
            let cs = Complex::with_val(p, &cv + Complex::with_val(p, &int / 2u32)) - &uv4;
            let s = Complex::with_val(p, &cs + Complex::with_val(p, pi_i(p) * u)) + &uv4;
            return Ok(CsPoint { u: u.clone(), v, cs, s, grid: n });
        }
        prev = Some(int);
        n *= 2;
    }
}

// ---------------------------------------------------------------------------
// The C^x bundle over the boundary character variety

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BundleGen {
    X,
    Y,
    B,
}

/// The action of `x`, `y`, `b` on `(alpha, beta; z)`.
pub fn ebundle_act(g: BundleGen, alpha: &Complex, beta: &Complex, z: &Complex) -> (Complex, Complex, Complex) {
    let p = z.prec().0;
    let half = Float::with_val(p, 0.5);
    let four_pi_i = Complex::with_val(p, two_pi_i(p) * 2u32);
    match g {
        BundleGen::X => {
            let e = Complex::with_val(p, -Complex::with_val(p, &four_pi_i * beta)).exp();
            (Complex::with_val(p, alpha + &half), beta.clone(), Complex::with_val(p, z * e))
        }
        BundleGen::Y => {
            let e = Complex::with_val(p, &four_pi_i * alpha).exp();
            (alpha.clone(), Complex::with_val(p, beta + &half), Complex::with_val(p, z * e))
        }
        BundleGen::B => (Complex::with_val(p, -alpha), Complex::with_val(p, -beta), z.clone()),
    }
}

/// `CS` from the fibre coordinate: `z = exp(2 CS/(pi i))`, principal log.
pub fn cs_from_fibre(z: &Complex) -> Complex {
    let p = z.prec().0;
    Complex::with_val(p, log(z) * pi_i(p)) / 2u32
}
