//! Complex arithmetic helpers over `rug::Complex`, adaptive path quadrature
//! and a closed-form quartic solver.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Complex, Float};

use crate::error::{Error, Result};

/// Complex high-precision scalar. The precision travels with the value.
pub type Chp = Complex;

/// Guard bits added on top of the caller's precision inside quadrature.
const GUARD: u32 = 32;

pub fn real(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}

pub fn cplx(prec: u32, re: f64, im: f64) -> Complex {
    Complex::with_val(prec, (re, im))
}

pub fn from_real(x: &Float) -> Complex {
    Complex::with_val(x.prec(), (x, 0))
}

pub fn prec_of(z: &Complex) -> u32 {
    z.prec().0
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `2 pi i`.
pub fn two_pi_i(prec: u32) -> Complex {
    let mut z = Complex::new(prec);
    z.mut_imag().assign(Constant::Pi);
    *z.mut_imag() *= 2u32;
    z
}

/// `pi i`.
pub fn pi_i(prec: u32) -> Complex {
    let mut z = Complex::new(prec);
    z.mut_imag().assign(Constant::Pi);
    z
}

/// `kappa = arccosh(3/2) = log((3 + sqrt 5)/2)`.
pub fn kappa(prec: u32) -> Float {
    Float::with_val(prec, 1.5f64).acosh()
}

/// Replaces a negative-zero imaginary part by +0 so that principal branches
/// put the negative real axis on the upper side.
pub fn clean(mut z: Complex) -> Complex {
    if z.imag().is_zero() {
        z.mut_imag().assign(0);
    }
    z
}

/// Principal logarithm, `arg` in `(-pi, pi]`.
pub fn log(z: &Complex) -> Complex {
    clean(z.clone()).ln()
}

/// Principal square root.
pub fn sqrt(z: &Complex) -> Complex {
    clean(z.clone()).sqrt()
}

/// Principal power `z^a = exp(a log z)`.
pub fn powc(z: &Complex, a: &Complex) -> Complex {
    let l = log(z);
    Complex::with_val(prec_of(z), a * &l).exp()
}

pub fn abs(z: &Complex) -> Float {
    Float::with_val(prec_of(z), z.abs_ref())
}

pub fn abs_f64(z: &Complex) -> f64 {
    abs(z).to_f64()
}

pub fn to_f64s(z: &Complex) -> (f64, f64) {
    (z.real().to_f64(), z.imag().to_f64())
}

/// `2^{-k}` as a float.
pub fn pow2_neg(prec: u32, k: i32) -> Float {
    Float::with_val(prec, Float::i_exp(1, -k))
}

// ---------------------------------------------------------------------------
// Contours

/// One piece of a contour.
#[derive(Debug, Clone)]
pub enum Segment {
    Line {
        a: Complex,
        b: Complex,
    },
    /// `center + radius e^{i theta}` for theta from `theta0` to `theta1`.
    Arc {
        center: Complex,
        radius: Float,
        theta0: Float,
        theta1: Float,
    },
    /// `origin + t dir`, `t >= 0`, truncated where `decay * t` reaches the
    /// precision budget. `inward` runs it from infinity to `origin`.
    Ray {
        origin: Complex,
        dir: Complex,
        decay: f64,
        inward: bool,
    },
}

impl Segment {
    fn start(&self) -> Option<Complex> {
        match self {
            Segment::Line { a, .. } => Some(a.clone()),
            Segment::Arc {
                center,
                radius,
                theta0,
                ..
            } => Some(arc_point(center, radius, theta0)),
            Segment::Ray { origin, inward, .. } => (!inward).then(|| origin.clone()),
        }
    }

    fn end(&self) -> Option<Complex> {
        match self {
            Segment::Line { b, .. } => Some(b.clone()),
            Segment::Arc {
                center,
                radius,
                theta1,
                ..
            } => Some(arc_point(center, radius, theta1)),
            Segment::Ray { origin, inward, .. } => inward.then(|| origin.clone()),
        }
    }

    fn reversed(&self) -> Segment {
        match self {
            Segment::Line { a, b } => Segment::Line {
                a: b.clone(),
                b: a.clone(),
            },
            Segment::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => Segment::Arc {
                center: center.clone(),
                radius: radius.clone(),
                theta0: theta1.clone(),
                theta1: theta0.clone(),
            },
            Segment::Ray {
                origin,
                dir,
                decay,
                inward,
            } => Segment::Ray {
                origin: origin.clone(),
                dir: dir.clone(),
                decay: *decay,
                inward: !inward,
            },
        }
    }
}

fn arc_point(center: &Complex, radius: &Float, theta: &Float) -> Complex {
    let prec = prec_of(center).max(radius.prec());
    let mut e = Complex::with_val(prec, (0, theta));
    e = e.exp();
    e *= radius;
    e += center;
    e
}

/// A connected piecewise contour.
#[derive(Debug, Clone)]
pub struct ContourPath {
    segments: Vec<Segment>,
}

impl ContourPath {
    /// Builds a path, checking that consecutive finite endpoints agree.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        for w in segments.windows(2) {
            if let (Some(e), Some(s)) = (w[0].end(), w[1].start()) {
                let gap = abs_f64(&Complex::with_val(prec_of(&e), &e - &s));
                let scale = 1.0 + abs_f64(&e);
                if gap > 1e-12 * scale {
                    return Err(Error::Domain(format!(
                        "contour segments are disconnected (gap {gap:e})"
                    )));
                }
            }
        }
        Ok(Self { segments })
    }

    /// Polygonal path through the given vertices.
    pub fn polygon(points: &[Complex]) -> Result<Self> {
        let segs = points
            .windows(2)
            .map(|w| Segment::Line {
                a: w[0].clone(),
                b: w[1].clone(),
            })
            .collect();
        Self::new(segs)
    }

    /// `(-inf, -1] + upper unit semicircle + [1, inf)`, oriented left to
    /// right, with the given decay rates on the left and right rays.
    pub fn omega(prec: u32, decay_left: f64, decay_right: f64) -> Self {
        let one = cplx(prec, 1.0, 0.0);
        let mone = cplx(prec, -1.0, 0.0);
        Self {
            segments: vec![
                Segment::Ray {
                    origin: mone.clone(),
                    dir: mone,
                    decay: decay_left,
                    inward: true,
                },
                Segment::Arc {
                    center: Complex::new(prec),
                    radius: real(prec, 1.0),
                    theta0: pi(prec),
                    theta1: Float::new(prec),
                },
                Segment::Ray {
                    origin: one.clone(),
                    dir: one,
                    decay: decay_right,
                    inward: false,
                },
            ],
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn reversed(&self) -> Self {
        Self {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
        }
    }

    pub fn concat(&self, other: &ContourPath) -> Result<Self> {
        let mut s = self.segments.clone();
        s.extend(other.segments.iter().cloned());
        Self::new(s)
    }
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rule

struct Rule {
    nodes: Vec<Float>,
    weights: Vec<Float>,
}

type RuleCache = Mutex<HashMap<(usize, u32), Arc<Rule>>>;

fn rule(n: usize, prec: u32) -> Arc<Rule> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&(n, prec)) {
        return r.clone();
    }
    let r = Arc::new(build_rule(n, prec));
    cache.lock().unwrap().insert((n, prec), r.clone());
    r
}

/// Legendre `P_n(x)` and `P_n'(x)`.
fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut p0 = Float::with_val(prec, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let a = Float::with_val(prec, x * &p1) * (2 * k - 1) as u32;
        let p2 = (a - Float::with_val(prec, &p0 * (k - 1) as u32)) / k as u32;
        p0 = p1;
        p1 = p2;
    }
    let x2 = Float::with_val(prec, x * x) - 1u32;
    let dp = Float::with_val(prec, x * &p1) - &p0;
    let dp = dp * n as u32 / x2;
    (p1, dp)
}

fn build_rule(n: usize, prec: u32) -> Rule {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let eps = pow2_neg(prec, prec as i32 - 8);
    for i in 1..=n {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut x = Float::with_val(prec, guess);
        for _ in 0..100 {
            let (p, dp) = legendre(n, &x);
            let dx = p / &dp;
            x -= &dx;
            if dx.abs() < eps {
                break;
            }
        }
        let (_, dp) = legendre(n, &x);
        let one_m = Float::with_val(prec, 1) - Float::with_val(prec, &x * &x);
        let w = Float::with_val(prec, 2) / (one_m * Float::with_val(prec, &dp * &dp));
        nodes.push(x);
        weights.push(w);
    }
    Rule { nodes, weights }
}

fn nodes_for(prec: u32) -> usize {
    ((prec / 5) as usize).clamp(20, 96)
}

// ---------------------------------------------------------------------------
// Quadrature

type RealIntegrand<'a> = Box<dyn Fn(&Float) -> Result<Complex> + 'a>;

/// A real-parameter integrand already carrying its Jacobian.
struct Param<'a> {
    g: RealIntegrand<'a>,
}

fn gl(p: &Param, a: &Float, b: &Float, r: &Rule, wp: u32) -> Result<Complex> {
    let half = Float::with_val(wp, b - a) / 2u32;
    let mid = Float::with_val(wp, a + b) / 2u32;
    let mut acc = Complex::new(wp);
    for (x, w) in r.nodes.iter().zip(&r.weights) {
        let t = Float::with_val(wp, &half * x) + &mid;
        let v = (p.g)(&t)?;
        acc += Complex::with_val(wp, &v * w);
    }
    acc *= &half;
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    p: &Param,
    a: &Float,
    b: &Float,
    whole: Complex,
    tol: &Float,
    depth: u32,
    r: &Rule,
    wp: u32,
) -> Result<Complex> {
    let m = Float::with_val(wp, a + b) / 2u32;
    let left = gl(p, a, &m, r, wp)?;
    let right = gl(p, &m, b, r, wp)?;
    let sum = Complex::with_val(wp, &left + &right);
    let err = abs(&Complex::with_val(wp, &whole - &sum));
    if err <= *tol {
        return Ok(sum);
    }
    if depth == 0 {
        return Err(Error::NonConvergent(format!(
            "interval [{:.6e}, {:.6e}] error {:.3e}",
            a.to_f64(),
            b.to_f64(),
            err.to_f64()
        )));
    }
    let half_tol = Float::with_val(wp, tol / 2u32);
    let l = adapt(p, a, &m, left, &half_tol, depth - 1, r, wp)?;
    let rr = adapt(p, &m, b, right, &half_tol, depth - 1, r, wp)?;
    Ok(l + rr)
}

/// Ray cutoff `X` with `X * decay >= (prec + 32) ln 2`.
pub fn ray_cutoff(prec: u32, decay: f64) -> Result<f64> {
    if decay.is_nan() || decay <= 0.0 || decay.is_infinite() {
        return Err(Error::TailBoundViolated { decay });
    }
    Ok((prec + GUARD) as f64 * std::f64::consts::LN_2 / decay)
}

/// Integrates `f` along `path`. The result carries `prec` bits and an
/// estimated error below `2^{-(prec-10)} max(1, |I|)`.
pub fn quad_path<F>(f: F, path: &ContourPath, prec: u32) -> Result<Complex>
where
    F: Fn(&Complex) -> Result<Complex>,
{
    let wp = prec + GUARD;
    let r = rule(nodes_for(wp), wp);
    let f = &f;

    // Each piece: parametrisation plus its list of parameter intervals.
    let mut pieces: Vec<(Param, Vec<(Float, Float)>)> = Vec::new();
    for seg in path.segments() {
        match seg {
            Segment::Line { a, b } => {
                let a = Complex::with_val(wp, a);
                let d = Complex::with_val(wp, b - &a);
                let g = move |t: &Float| -> Result<Complex> {
                    let z = Complex::with_val(wp, &d * t) + &a;
                    Ok(f(&z)? * &d)
                };
                pieces.push((
                    Param { g: Box::new(g) },
                    vec![(Float::with_val(wp, 0), Float::with_val(wp, 1))],
                ));
            }
            Segment::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let c = Complex::with_val(wp, center);
                let rad = Float::with_val(wp, radius);
                let g = move |t: &Float| -> Result<Complex> {
                    let e = Complex::with_val(wp, (0, t)).exp();
                    let z = Complex::with_val(wp, &e * &rad) + &c;
                    // dz = i r e^{it} dt
                    let dz = Complex::with_val(wp, &e * &rad).mul_i(false);
                    Ok(f(&z)? * dz)
                };
                let t0 = Float::with_val(wp, theta0);
                let t1 = Float::with_val(wp, theta1);
                // Split long arcs into quarter turns.
                let span = Float::with_val(wp, &t1 - &t0);
                let k = (span.to_f64().abs() / 1.6).ceil().max(1.0) as u32;
                let mut iv = Vec::new();
                for j in 0..k {
                    let s0 = Float::with_val(wp, &span * j) / k + &t0;
                    let s1 = Float::with_val(wp, &span * (j + 1)) / k + &t0;
                    iv.push((s0, s1));
                }
                pieces.push((Param { g: Box::new(g) }, iv));
            }
            Segment::Ray {
                origin,
                dir,
                decay,
                inward,
            } => {
                let x = ray_cutoff(prec, *decay)?;
                let o = Complex::with_val(wp, origin);
                let d = Complex::with_val(wp, dir);
                let sign = if *inward { -1i32 } else { 1 };
                // Tail check at the cutoff: |f| / decay must be negligible.
                let zx = Complex::with_val(wp, &d * x) + &o;
                let fx = f(&zx)?;
                let tail = abs_f64(&fx) * abs_f64(&d) / decay;
                let budget = 2f64.powi(-(prec as i32).min(1000));
                if tail.is_nan() || tail > budget * 1e3 {
                    return Err(Error::TailBoundViolated { decay: *decay });
                }
                let g = move |t: &Float| -> Result<Complex> {
                    let z = Complex::with_val(wp, &d * t) + &o;
                    let v = f(&z)? * &d;
                    Ok(if sign < 0 { -v } else { v })
                };
                let mut iv = Vec::new();
                let mut lo = 0.0f64;
                let mut hi = (1.0 / decay).min(x).max(x.min(1.0));
                loop {
                    iv.push((Float::with_val(wp, lo), Float::with_val(wp, hi)));
                    if hi >= x {
                        break;
                    }
                    lo = hi;
                    hi = (2.0 * hi).min(x);
                }
                pieces.push((Param { g: Box::new(g) }, iv));
            }
        }
    }

    // Coarse pass for the scale, then adaptive refinement.
    let mut coarse = Vec::new();
    let mut total = Complex::new(wp);
    for (p, iv) in &pieces {
        for (a, b) in iv {
            let v = gl(p, a, b, &r, wp)?;
            total += &v;
            coarse.push(v);
        }
    }
    let count = coarse.len().max(1) as u32;
    let scale = abs(&total).max(&Float::with_val(wp, 1));
    let tol = Float::with_val(wp, scale * pow2_neg(wp, prec as i32 - 8)) / count;

    let mut acc = Complex::new(wp);
    let mut idx = 0;
    for (p, iv) in &pieces {
        for (a, b) in iv {
            let v = adapt(p, a, b, coarse[idx].clone(), &tol, 40, &r, wp)?;
            acc += v;
            idx += 1;
        }
    }
    Ok(Complex::with_val(prec, acc))
}

// ---------------------------------------------------------------------------
// Quartic

/// Evaluates `sum c_k z^k` with coefficients given from the leading one down.
pub fn horner(coeffs: &[Complex], z: &Complex) -> Complex {
    let prec = prec_of(z);
    let mut acc = Complex::new(prec);
    for c in coeffs {
        acc *= z;
        acc += c;
    }
    acc
}

fn horner_d(coeffs: &[Complex], z: &Complex) -> Complex {
    let prec = prec_of(z);
    let n = coeffs.len() - 1;
    let mut acc = Complex::new(prec);
    for (i, c) in coeffs[..n].iter().enumerate() {
        acc *= z;
        acc += Complex::with_val(prec, c * (n - i) as u32);
    }
    acc
}

/// Principal cube root.
pub fn cbrt(z: &Complex) -> Complex {
    if z.is_zero() {
        return z.clone();
    }
    let third = Complex::with_val(prec_of(z), (Float::with_val(prec_of(z), 1) / 3u32, 0));
    powc(z, &third)
}

/// Roots of `y^2 + b y + c`, computed without cancellation.
fn quadratic(b: &Complex, c: &Complex) -> [Complex; 2] {
    let prec = prec_of(b);
    let disc = Complex::with_val(prec, b * b) - Complex::with_val(prec, c * 4u32);
    let s = sqrt(&disc);
    let plus = Complex::with_val(prec, b + &s);
    let minus = Complex::with_val(prec, b - &s);
    let big = if abs(&plus) >= abs(&minus) { plus } else { minus };
    if big.is_zero() {
        return [Complex::new(prec), Complex::new(prec)];
    }
    let q = -big / 2u32;
    let other = Complex::with_val(prec, c / &q);
    [q, other]
}

/// Largest-modulus root of `m^3 + a2 m^2 + a1 m + a0` by Cardano.
fn cubic_big_root(a2: &Complex, a1: &Complex, a0: &Complex) -> Complex {
    let prec = prec_of(a2);
    let a2_3 = Complex::with_val(prec, a2 / 3u32);
    let p = Complex::with_val(prec, a1 - Complex::with_val(prec, a2 * &a2_3));
    let q = Complex::with_val(prec, a2.pow(3u32)) * 2u32 / 27u32
        - Complex::with_val(prec, a2 * a1) / 3u32
        + a0;
    let disc = Complex::with_val(prec, &q * &q) / 4u32 + Complex::with_val(prec, (&p).pow(3u32)) / 27u32;
    let sd = sqrt(&disc);
    let hq = Complex::with_val(prec, &q / 2u32) * -1i32;
    let c1 = Complex::with_val(prec, &hq + &sd);
    let c2 = Complex::with_val(prec, &hq - &sd);
    let cc = if abs(&c1) >= abs(&c2) { c1 } else { c2 };
    let c = cbrt(&cc);
    let mut roots = Vec::with_capacity(3);
    if c.is_zero() {
        roots.push(Complex::with_val(prec, -&a2_3));
    } else {
        let w = Complex::with_val(prec, (Float::with_val(prec, -0.5), Float::with_val(prec, 3).sqrt() / 2u32));
        let mut wk = Complex::with_val(prec, 1);
        for _ in 0..3 {
            let ck = Complex::with_val(prec, &c * &wk);
            let s = Complex::with_val(prec, &ck - Complex::with_val(prec, &p / &ck) / 3u32);
            roots.push(s - &a2_3);
            wk *= &w;
        }
    }
    roots
        .into_iter()
        .max_by(|x, y| abs(x).partial_cmp(&abs(y)).unwrap())
        .unwrap()
}

/// The four roots of `c4 z^4 + c3 z^3 + c2 z^2 + c1 z + c0`.
pub fn solve_quartic(
    c4: &Complex,
    c3: &Complex,
    c2: &Complex,
    c1: &Complex,
    c0: &Complex,
) -> Result<[Complex; 4]> {
    let prec = prec_of(c4).max(prec_of(c0));
    let wp = prec + 32;
    let lead = abs(c4);
    let tiny = pow2_neg(wp, (wp as i32 - 16).min(1_000_000));
    let others = [c3, c2, c1, c0]
        .iter()
        .map(|c| abs(c))
        .fold(Float::with_val(wp, 1), |m, x| m.max(&x));
    if lead <= Float::with_val(wp, &tiny * &others) {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let c4w = Complex::with_val(wp, c4);
    let a = Complex::with_val(wp, c3 / &c4w);
    let b = Complex::with_val(wp, c2 / &c4w);
    let c = Complex::with_val(wp, c1 / &c4w);
    let d = Complex::with_val(wp, c0 / &c4w);

    let a2 = Complex::with_val(wp, &a * &a);
    let pp = Complex::with_val(wp, &b - Complex::with_val(wp, &a2 * 3u32) / 8u32);
    let qq = Complex::with_val(wp, &c - Complex::with_val(wp, &a * &b) / 2u32)
        + Complex::with_val(wp, &a2 * &a) / 8u32;
    let rr = Complex::with_val(wp, &d - Complex::with_val(wp, &a * &c) / 4u32)
        + Complex::with_val(wp, &a2 * &b) / 16u32
        - Complex::with_val(wp, &a2 * &a2) * 3u32 / 256u32;
    let shift = Complex::with_val(wp, &a / 4u32);

    // Resolvent m^3 + P m^2 + (P^2/4 - R) m - Q^2/8 = 0.
    let r1 = Complex::with_val(wp, &pp * &pp) / 4u32 - &rr;
    let r0 = -Complex::with_val(wp, &qq * &qq) / 8u32;
    let m = cubic_big_root(&pp, &r1, &r0);

    let ys: [Complex; 4] = if abs(&m) <= Float::with_val(wp, &tiny * (abs(&pp) + 1u32)) {
        // Biquadratic: y^4 + P y^2 + R.
        let [u1, u2] = quadratic(&pp, &rr);
        let s1 = sqrt(&u1);
        let s2 = sqrt(&u2);
        [s1.clone(), -s1, s2.clone(), -s2]
    } else {
        let s = sqrt(&Complex::with_val(wp, &m * 2u32));
        let base = Complex::with_val(wp, &pp / 2u32) + &m;
        let corr = Complex::with_val(wp, &s * &qq) / Complex::with_val(wp, &m * 4u32);
        let [y1, y2] = quadratic(&-s.clone(), &Complex::with_val(wp, &base + &corr));
        let [y3, y4] = quadratic(&s, &Complex::with_val(wp, &base - &corr));
        [y1, y2, y3, y4]
    };

    let coeffs = [
        Complex::with_val(wp, 1),
        a.clone(),
        b.clone(),
        c.clone(),
        d.clone(),
    ];
    let roots = ys.map(|y| {
        let mut z = y - &shift;
        for _ in 0..3 {
            let fz = horner(&coeffs, &z);
            let dz = horner_d(&coeffs, &z);
            if abs(&dz) <= Float::with_val(wp, &tiny * (abs(&fz) + 1u32)) {
                break;
            }
            let cand = Complex::with_val(wp, &z - Complex::with_val(wp, &fz / &dz));
            if abs(&horner(&coeffs, &cand)) < abs(&fz) {
                z = cand;
            } else {
                break;
            }
        }
        Complex::with_val(prec, z)
    });
    Ok(roots)
}
