//! Colored Jones polynomials of the figure-eight knot and the stevedore
//! knot, evaluated at complex `q`.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::{Complex, Float, Integer};

use crate::error::{Error, Result};
use crate::numerics::{abs, log, pi, pow2_neg, prec_of, two_pi_i};

/// Evaluation datum `(u, p, N)` with `xi = u + 2 p pi i`, `gamma = xi/(2 pi i)`
/// and `q = e^{xi/N}`.
#[derive(Debug, Clone)]
pub struct XiParams {
    pub u: Float,
    pub p: u32,
    pub n: u32,
    pub prec: u32,
}

impl XiParams {
    pub fn new(u: Float, p: u32, n: u32, prec: u32) -> Self {
        Self {
            u: Float::with_val(prec, u),
            p,
            n,
            prec,
        }
    }

    pub fn xi(&self) -> Complex {
        let im = pi(self.prec) * (2 * self.p);
        Complex::with_val(self.prec, (&self.u, im))
    }

    pub fn gamma(&self) -> Complex {
        Complex::with_val(self.prec, self.xi() / two_pi_i(self.prec))
    }

    pub fn q(&self) -> Complex {
        Complex::with_val(self.prec, self.xi() / self.n).exp()
    }

    pub fn with_n(&self, n: u32) -> Self {
        Self { n, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KnotId {
    FigureEight,
    /// The mirror image of `6_1`.
    Stevedore,
}

/// Precision used for the stevedore series at color `N`.
pub fn stevedore_prec(n: u32) -> u32 {
    96 + (5 * n).div_ceil(2)
}

/// Precision used for the figure-eight series at color `N` away from roots
/// of unity.
pub fn fig8_prec(n: u32) -> u32 {
    64 + 3 * n
}

/// `q^0, q^1, ..., q^m` by repeated multiplication.
fn powers(q: &Complex, m: usize) -> Vec<Complex> {
    let prec = prec_of(q);
    let mut out = Vec::with_capacity(m + 1);
    out.push(Complex::with_val(prec, 1));
    for j in 1..=m {
        let next = Complex::with_val(prec, &out[j - 1] * q);
        out.push(next);
    }
    out
}

/// `J_N(E; q) = sum_k q^{-kN} prod_{l=1}^k (1 - q^{N-l})(1 - q^{N+l})`.
pub fn jones_fig8(n: u32, q: &Complex) -> Complex {
    let prec = prec_of(q);
    let wp = prec + 32;
    let n = n as usize;
    let q = Complex::with_val(wp, q);
    let pw = powers(&q, 2 * n);
    let q_mn = Complex::with_val(wp, pw[n].recip_ref());
    let mut sum = Complex::with_val(wp, 1);
    let mut term = Complex::with_val(wp, 1);
    for k in 1..n {
        let a = Complex::with_val(wp, 1 - &pw[n - k]);
        let b = Complex::with_val(wp, 1 - &pw[n + k]);
        term *= a;
        term *= b;
        term *= &q_mn;
        sum += &term;
    }
    Complex::with_val(prec, sum)
}

/// The stevedore double sum with prefix products for the inner ratio.
pub fn jones_stevedore(n: u32, q: &Complex) -> Result<Complex> {
    let prec = prec_of(q);
    let wp = prec + 32;
    let n = n as usize;
    let q = Complex::with_val(wp, q);
    let pw = powers(&q, 2 * n);
    let tiny = pow2_neg(wp, (prec / 2) as i32);
    // P[b] = prod_{c=1}^{b} (1 - q^c)
    let mut pref = vec![Complex::with_val(wp, 1)];
    for c in 1..n.max(1) {
        let f = Complex::with_val(wp, 1 - &pw[c]);
        if abs(&f) <= tiny {
            return Err(Error::DenominatorVanishes(c as u32));
        }
        let next = Complex::with_val(wp, &pref[c - 1] * &f);
        pref.push(next);
    }
    let inv: Vec<Complex> = pref.iter().map(|x| Complex::with_val(wp, x.recip_ref())).collect();

    let mut sum = Complex::new(wp);
    let mut outer = Complex::with_val(wp, 1);
    for k in 0..n {
        if k > 0 {
            outer *= Complex::with_val(wp, 1 - &pw[n + k]);
            outer *= Complex::with_val(wp, 1 - &pw[n - k]);
        }
        // inner = sum_l q^{l(k+1)} P[k] / (P[l] P[k-l])
        let step = &pw[k + 1];
        let mut ql = Complex::with_val(wp, 1);
        let mut inner = Complex::new(wp);
        for l in 0..=k {
            let t = Complex::with_val(wp, &ql * &inv[l]) * &inv[k - l];
            inner += t;
            ql *= step;
        }
        inner *= &pref[k];
        // q^{-k(N+k+1)}
        let qpow = Complex::with_val(wp, pw[n + k + 1].recip_ref()).pow(k as u32);
        let t = Complex::with_val(wp, &outer * &inner) * qpow;
        sum += t;
    }
    Ok(Complex::with_val(prec, sum))
}

/// `J_N(K; e^{xi/N})` at the precision carried by `xi`.
pub fn jones_at(knot: KnotId, xi: &XiParams) -> Result<Complex> {
    let q = xi.q();
    match knot {
        KnotId::FigureEight => Ok(jones_fig8(xi.n, &q)),
        KnotId::Stevedore => jones_stevedore(xi.n, &q),
    }
}

// ---------------------------------------------------------------------------
// Exact Laurent polynomials for small colors

/// Laurent polynomial with integer coefficients, `exponent -> coefficient`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Laurent(pub BTreeMap<i64, Integer>);

impl Laurent {
    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(e: i64, c: i64) -> Self {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert(e, Integer::from(c));
        }
        Laurent(m)
    }

    /// `1 - q^e`.
    pub fn one_minus(e: i64) -> Self {
        Self::one().add(&Self::monomial(e, -1))
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        let mut m = self.0.clone();
        for (e, c) in &o.0 {
            let v = m.entry(*e).or_default();
            *v += c;
        }
        m.retain(|_, c| *c != 0);
        Laurent(m)
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        let mut m: BTreeMap<i64, Integer> = BTreeMap::new();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &o.0 {
                let v = m.entry(e1 + e2).or_default();
                *v += Integer::from(c1 * c2);
            }
        }
        m.retain(|_, c| *c != 0);
        Laurent(m)
    }

    pub fn shift(&self, by: i64) -> Laurent {
        Laurent(self.0.iter().map(|(e, c)| (e + by, c.clone())).collect())
    }

    pub fn top(&self) -> Option<(i64, &Integer)> {
        self.0.iter().next_back().map(|(e, c)| (*e, c))
    }

    /// `log sum c_j w^j` from `log w`, factoring out the top power so that
    /// huge `|w|` does not overflow.
    pub fn log_eval(&self, log_w: &Complex) -> Result<Complex> {
        let prec = prec_of(log_w);
        let (d, _) = self.top().ok_or(Error::Domain("zero polynomial".into()))?;
        let mut acc = Complex::new(prec + 16);
        for (e, c) in self.0.iter().rev() {
            let t = Complex::with_val(prec + 16, log_w * (e - d)).exp();
            acc += t * Complex::with_val(prec + 16, c);
        }
        if acc.is_zero() {
            return Err(Error::Domain("polynomial vanishes at w".into()));
        }
        Ok(Complex::with_val(prec, log_w * d) + log(&Complex::with_val(prec, acc)))
    }
}

/// Gaussian binomial `[k choose l]_q`.
fn gauss_binomial(k: i64, l: i64) -> Laurent {
    // rows of Pascal's q-triangle: [k,l] = [k-1,l-1] + q^l [k-1,l]
    let mut row = vec![Laurent::one()];
    for kk in 1..=k {
        let mut next = Vec::with_capacity(kk as usize + 1);
        for ll in 0..=kk {
            let a = if ll >= 1 { row[(ll - 1) as usize].clone() } else { Laurent::default() };
            let b = if ll < kk { row[ll as usize].shift(ll) } else { Laurent::default() };
            next.push(a.add(&b));
        }
        row = next;
    }
    row[l as usize].clone()
}

/// `J_p(K; q)` as an exact Laurent polynomial in `q`.
pub fn jones_laurent(knot: KnotId, p: u32) -> Laurent {
    let n = p as i64;
    let mut sum = Laurent::default();
    let mut outer = Laurent::one();
    for k in 0..n {
        if k > 0 {
            outer = outer.mul(&Laurent::one_minus(n - k)).mul(&Laurent::one_minus(n + k));
        }
        let term = match knot {
            KnotId::FigureEight => outer.shift(-k * n),
            KnotId::Stevedore => {
                let mut inner = Laurent::default();
                for l in 0..=k {
                    inner = inner.add(&gauss_binomial(k, l).shift(l * (k + 1)));
                }
                outer.mul(&inner).shift(-k * (n + k + 1))
            }
        };
        sum = sum.add(&term);
    }
    sum
}

/// `log J_p(K; w)` from `log w`.
pub fn jones_small_color_log(knot: KnotId, p: u32, log_w: &Complex) -> Result<Complex> {
    if p == 0 || p > 8 {
        return Err(Error::Domain("small color needs 1 <= p <= 8".into()));
    }
    jones_laurent(knot, p).log_eval(log_w)
}

/// `J_p(K; w)`; fails with `Overflow` if the value leaves the exponent range.
pub fn jones_small_color(knot: KnotId, p: u32, w: &Complex) -> Result<Complex> {
    let l = jones_small_color_log(knot, p, &log(w))?;
    exp_checked(&l)
}

/// `exp(l)` with an explicit exponent-range check.
pub fn exp_checked(l: &Complex) -> Result<Complex> {
    let limit = (rug::float::exp_max() as f64 - 64.0) * std::f64::consts::LN_2;
    if l.real().to_f64().abs() > limit || !l.real().is_finite() {
        return Err(Error::Overflow);
    }
    Ok(Complex::with_val(prec_of(l), l.exp_ref()))
}
