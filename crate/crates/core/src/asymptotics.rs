//! Poisson-summation residuals, the order-two saddle model, right-hand sides
//! of the asymptotic formulas and the growth-rate fitter.

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::jones::{fig8_prec, jones_at, jones_fig8, jones_small_color_log, stevedore_prec, KnotId, XiParams};
use crate::numerics::{abs_f64, kappa, log, pi, prec_of, quad_path, sqrt, two_pi_i, ContourPath, Segment};
use crate::potential::{s_u_fig8, t_u_fig8};
use crate::special::{gamma_third, li2};

/// `|(1/N) sum_{a <= k/N <= b} e^{N psi(k/N)} - int_path e^{N psi}|`, with the
/// straight segment `[a, b]` unless a path is given.
pub fn poisson_residual<F>(psi: F, a: f64, b: f64, n: u32, prec: u32, path: Option<&ContourPath>) -> Result<f64>
where
    F: Fn(&Complex) -> Result<Complex>,
{
    let nn = n as f64;
    let k0 = (a * nn).ceil() as i64;
    let k1 = (b * nn).floor() as i64;
    let mut sum = Complex::new(prec);
    for k in k0..=k1 {
        let z = Complex::with_val(prec, (Float::with_val(prec, k) / n, 0));
        sum += Complex::with_val(prec, psi(&z)? * n).exp();
    }
    sum /= n;
    let owned;
    let path = match path {
        Some(p) => p,
        None => {
            owned = ContourPath::new(vec![Segment::Line {
                a: Complex::with_val(prec, (a, 0)),
                b: Complex::with_val(prec, (b, 0)),
            }])?;
            &owned
        }
    };
    let int = quad_path(|z| Ok(Complex::with_val(prec, psi(z)? * n).exp()), path, prec)?;
    Ok(abs_f64(&(sum - int)))
}

/// Numerical and closed-form values of `int_C h(z) e^{N c z^3} dz`.
#[derive(Debug, Clone)]
pub struct Saddle2 {
    pub numeric: Complex,
    pub closed_form: Complex,
}

impl Saddle2 {
    pub fn rel_deviation(&self) -> f64 {
        abs_f64(&Complex::with_val(prec_of(&self.numeric), &self.numeric - &self.closed_form))
            / abs_f64(&self.closed_form)
    }
}

/// How the path from valley `k` to valley `k+1` is laid out.
#[derive(Debug, Clone)]
pub enum Saddle2Path {
    /// `a_k -> 0 -> a_{k+1}` with `a_j` on the centre ray of `U_j` at the
    /// given radius.
    ThroughCentres { radius: f64 },
    /// Any polygon; only its endpoints are checked.
    Polygon(Vec<Complex>),
}

fn theta_of(c: &Complex) -> f64 {
    c.imag().to_f64().atan2(c.real().to_f64())
}

/// Centre direction of the valley `U_k`: `tau = (2k-1) pi/3 - theta/3`.
pub fn valley_centre(theta: f64, k: u32) -> f64 {
    (2.0 * k as f64 - 1.0) * std::f64::consts::PI / 3.0 - theta / 3.0
}

/// `z` in `U_k = {|tau + theta/3 - (2k-1) pi/3| < pi/6}`.
pub fn in_valley(z: &Complex, theta: f64, k: u32) -> bool {
    let (x, y) = (z.real().to_f64(), z.imag().to_f64());
    if x == 0.0 && y == 0.0 {
        return false;
    }
    let d = y.atan2(x) - valley_centre(theta, k);
    let tau = std::f64::consts::TAU;
    let w = d - tau * (d / tau).round();
    w.abs() < std::f64::consts::PI / 6.0
}

/// `int_C h(z) e^{N c z^3} dz` from valley `k` to valley `k+1` (`U_4 = U_1`)
/// next to `h(0) Gamma(1/3) i omega^k e^{-i theta/3} / (sqrt 3 r^{1/3} N^{1/3})`.
pub fn saddle2_model<H>(c: &Complex, n: u32, k: u32, path: &Saddle2Path, h: H) -> Result<Saddle2>
where
    H: Fn(&Complex) -> Complex,
{
    let prec = prec_of(c);
    if !(1..=3).contains(&k) {
        return Err(Error::Domain("valley index must be 1, 2 or 3".into()));
    }
    let theta = theta_of(c);
    let k1 = k % 3 + 1;
    let pts = match path {
        Saddle2Path::ThroughCentres { radius } => {
            let at = |t: f64| Complex::with_val(prec, (radius * t.cos(), radius * t.sin()));
            vec![at(valley_centre(theta, k)), Complex::new(prec), at(valley_centre(theta, k1))]
        }
        Saddle2Path::Polygon(v) => v.clone(),
    };
    let (first, last) = match (pts.first(), pts.last()) {
        (Some(a), Some(b)) if pts.len() >= 2 => (a, b),
        _ => return Err(Error::Domain("path needs two points".into())),
    };
    if !in_valley(first, theta, k) || !in_valley(last, theta, k1) {
        return Err(Error::PathOutsideValleys);
    }
    let poly = ContourPath::polygon(&pts)?;
    let nc = Complex::with_val(prec, c * n);
    let numeric = quad_path(
        |z| {
            let z3 = Complex::with_val(prec, z * z) * z;
            Ok(h(z) * Complex::with_val(prec, &nc * z3).exp())
        },
        &poly,
        prec,
    )?;
    // omega^k e^{-i theta/3}, with e^{i theta/3} the principal cube root of c/|c|
    let unit = Complex::with_val(prec, c / Complex::with_val(prec, c.abs_ref()));
    let cube = crate::numerics::cbrt(&unit);
    let omega_k = Complex::with_val(prec, two_pi_i(prec) * k / 3u32).exp();
    let phase = Complex::with_val(prec, omega_k / cube);
    let scale = Float::with_val(prec, gamma_third(prec))
        / (Float::with_val(prec, 3).sqrt() * (crate::numerics::abs(c) * n).cbrt());
    let closed_form = Complex::with_val(prec, phase * scale) * Complex::with_val(prec, (0, 1)) * h(&Complex::new(prec));
    Ok(Saddle2 { numeric, closed_form })
}

/// `xi^{2/3}` with `xi^{1/3} = |xi|^{1/3} e^{i arctan(2 p pi/u)/3}`.
fn xi_two_thirds(xi: &Complex) -> Complex {
    let prec = prec_of(xi);
    let a = Complex::with_val(prec, xi.abs_ref()).into_real_imag().0.cbrt();
    let arg = Float::with_val(prec, xi.imag().atan2_ref(xi.real()));
    let e = Complex::with_val(prec, (0, arg * 2u32 / 3u32)).exp();
    e * a.square()
}

/// `log J_p(E; e^{4 pi^2 N/xi})`.
fn log_small_color(xi: &XiParams) -> Result<Complex> {
    let prec = xi.prec;
    let lw = Complex::with_val(prec, Float::with_val(prec, pi(prec).square_ref()) * (4 * xi.n)) / xi.xi();
    jones_small_color_log(KnotId::FigureEight, xi.p, &lw)
}

/// `log` of `J_p(E; e^{4 pi^2 N/xi}) Gamma(1/3) e^{pi i/6} 3^{-1/6} (N/xi)^{2/3} e^{2 kappa pi i N/xi}`
/// with `xi = kappa + 2 p pi i`.
pub fn log_rhs_main(n: u32, p: u32, prec: u32) -> Result<Complex> {
    let xp = XiParams::new(kappa(prec), p, n, prec);
    let xi = xp.xi();
    let mut l = log_small_color(&xp)?;
    let g = Float::with_val(prec, gamma_third(prec).ln_ref());
    l += g - Float::with_val(prec, 3).ln() / 6u32;
    l += Complex::with_val(prec, (0, pi(prec) / 6u32));
    let n23 = Float::with_val(prec, n).ln() * 2u32 / 3u32;
    l += n23;
    l -= log(&xi_two_thirds(&xi));
    let s = Complex::with_val(prec, two_pi_i(prec) * kappa(prec)) * n / &xi;
    l += s;
    Ok(l)
}

pub fn rhs_main(n: u32, p: u32, prec: u32) -> Result<Complex> {
    crate::jones::exp_checked(&log_rhs_main(n, p, prec)?)
}

/// `J_N(E; e^{xi/N}) / rhs_main(N, p)`; the series runs at `max(prec, 64 + 3N)`.
pub fn ratio_main(n: u32, p: u32, prec: u32) -> Result<Complex> {
    let wp = prec.max(fig8_prec(n));
    let xp = XiParams::new(kappa(wp), p, n, wp);
    let j = jones_fig8(n, &xp.q());
    let l = Complex::with_val(wp, log(&j) - log_rhs_main(n, p, wp)?);
    Ok(Complex::with_val(prec, l.exp_ref()))
}

/// `Gamma(1/3) 3^{-2/3} (N/kappa)^{2/3}`.
pub fn rhs_hikami(n: u32, prec: u32) -> Float {
    let t = Float::with_val(prec, n) / kappa(prec);
    let t = Float::with_val(prec, t.square_ref()).cbrt();
    gamma_third(prec) * t / Float::with_val(prec, 9).cbrt()
}

pub fn ratio_hikami(n: u32, prec: u32) -> Complex {
    let wp = prec.max(fig8_prec(n));
    let q = Complex::with_val(wp, (kappa(wp) / n, 0)).exp();
    let j = jones_fig8(n, &q);
    Complex::with_val(prec, j / rhs_hikami(n, wp))
}

/// `J_p(E; e^{4N pi^2/xi}) sqrt(-pi)/(2 sinh(u/2)) T_u^{1/2} (N/xi)^{1/2} exp(S_u N/xi)`
/// with principal square roots, as a logarithm.
pub fn log_rhs_gvc(n: u32, u: &Float, p: u32, prec: u32) -> Result<Complex> {
    let xp = XiParams::new(u.clone(), p, n, prec);
    let xi = xp.xi();
    let uc = Complex::with_val(prec, (u, 0));
    let t = t_u_fig8(&uc)?;
    let s = s_u_fig8(&uc)?;
    let mut l = log_small_color(&xp)?;
    l += log(&sqrt(&Complex::with_val(prec, (-pi(prec), 0))));
    l -= log(&Complex::with_val(prec, (Float::with_val(prec, u / 2u32).sinh() * 2u32, 0)));
    l += log(&sqrt(&t));
    l += log(&sqrt(&Complex::with_val(prec, Complex::with_val(prec, (n, 0)) / &xi)));
    l += Complex::with_val(prec, s * n) / &xi;
    Ok(l)
}

pub fn rhs_gvc(n: u32, u: &Float, p: u32, prec: u32) -> Result<Complex> {
    crate::jones::exp_checked(&log_rhs_gvc(n, u, p, prec)?)
}

pub fn ratio_gvc(n: u32, u: &Float, p: u32, prec: u32) -> Result<Complex> {
    let wp = prec.max(fig8_prec(n));
    let xp = XiParams::new(Float::with_val(wp, u), p, n, wp);
    let j = jones_fig8(n, &xp.q());
    let l = Complex::with_val(wp, log(&j) - log_rhs_gvc(n, &xp.u, p, wp)?);
    Ok(Complex::with_val(prec, l.exp_ref()))
}

/// `(2 pi/N) log |J_N(E; e^{2 pi i/N})|`.
pub fn kashaev_rate(n: u32, prec: u32) -> f64 {
    let wp = prec.max(fig8_prec(n));
    let q = Complex::with_val(wp, two_pi_i(wp) / n).exp();
    let j = jones_fig8(n, &q);
    let l = crate::numerics::abs(&j).ln();
    (l * 2u32 * pi(wp) / n).to_f64()
}

/// `2 Im Li2(e^{i pi/3})`, the volume of the figure-eight complement.
pub fn fig8_volume(prec: u32) -> f64 {
    let z = Complex::with_val(prec, (0, pi(prec) / 3u32)).exp();
    li2(&z).map(|v| 2.0 * v.imag().to_f64()).unwrap_or(f64::NAN)
}

/// `J_N(St; e^{(2 pi i + sign log 2)/N})` for `lo <= N <= hi`, each at the
/// stevedore precision schedule.
pub fn stevedore_series(sign: i32, lo: u32, hi: u32) -> Result<Vec<(u32, Complex)>> {
    (lo..=hi)
        .map(|n| {
            let xp = stevedore_xi(sign, n, stevedore_prec(n));
            Ok((n, jones_at(KnotId::Stevedore, &xp)?))
        })
        .collect()
}

/// `u = sign log 2`, `p = 1`.
pub fn stevedore_xi(sign: i32, n: u32, prec: u32) -> XiParams {
    let u = Float::with_val(prec, 2).ln() * sign.signum();
    XiParams::new(u, 1, n, prec)
}

/// Least-squares fit of `y_N = xi log(J_{N+1}/J_N)` to `S + c1/N + c2/N^2`.
#[derive(Debug, Clone)]
pub struct GrowthFit {
    pub s: Complex,
    pub c1: Complex,
    pub c2: Complex,
    pub residual_rms: f64,
    pub n_range: (u32, u32),
}

impl GrowthFit {
    /// `S + a 2 pi i xi + b pi^2` closest to `reference` over integers `a, b`.
    pub fn canonical(&self, xi: &Complex, reference: &Complex) -> Complex {
        let prec = prec_of(&self.s);
        let w1 = Complex::with_val(prec, two_pi_i(prec) * xi);
        let w2 = Complex::with_val(prec, (Float::with_val(prec, pi(prec).square_ref()), 0));
        let d = Complex::with_val(prec, reference - &self.s);
        // real 2x2 solve of d = a w1 + b w2
        let f = |z: &Complex| (z.real().to_f64(), z.imag().to_f64());
        let ((a1, b1), (a2, b2), (d1, d2)) = (f(&w1), f(&w2), f(&d));
        let det = a1 * b2 - a2 * b1;
        let a = (d1 * b2 - d2 * a2) / det;
        let b = (a1 * d2 - b1 * d1) / det;
        let mut best = self.s.clone();
        let mut best_dist = f64::INFINITY;
        for da in -1..=1 {
            for db in -1..=1 {
                let ai = a.round() as i64 + da;
                let bi = b.round() as i64 + db;
                let cand = Complex::with_val(prec, &self.s + Complex::with_val(prec, &w1 * ai))
                    + Complex::with_val(prec, &w2 * bi);
                let dist = abs_f64(&Complex::with_val(prec, &cand - reference));
                if dist < best_dist {
                    best_dist = dist;
                    best = cand;
                }
            }
        }
        best
    }
}

/// `xi log(J_{N+1}/J_N)` over consecutive `N`, with the logarithm continued
/// along increasing `N`.
pub fn growth_series(values: &[(u32, Complex)], xi: &Complex) -> Result<Vec<(u32, Complex)>> {
    if values.len() < 2 {
        return Err(Error::Domain("need at least two values".into()));
    }
    let prec = prec_of(xi);
    let tpi = pi(prec) * 2u32;
    let mut out = Vec::with_capacity(values.len() - 1);
    let mut prev: Option<Complex> = None;
    for (i, w) in values.windows(2).enumerate() {
        let (n0, j0) = (&w[0].0, &w[0].1);
        let (n1, j1) = (&w[1].0, &w[1].1);
        if *n1 != n0 + 1 {
            return Err(Error::Domain("values must be at consecutive N".into()));
        }
        if j0.is_zero() || j1.is_zero() {
            return Err(Error::Domain("J_N vanishes".into()));
        }
        let mut l = Complex::with_val(prec, log(j1) - log(j0));
        if let Some(p) = &prev {
            let d = Float::with_val(prec, l.imag() - p.imag());
            let turns = Float::with_val(prec, &d / &tpi).round();
            l -= Complex::with_val(prec, (0, Float::with_val(prec, &turns * &tpi)));
            let left = Float::with_val(prec, l.imag() - p.imag()).abs();
            if left >= pi(prec) {
                return Err(Error::BranchJump(i));
            }
        }
        out.push((*n0, Complex::with_val(prec, &l * xi)));
        prev = Some(l);
    }
    Ok(out)
}

/// Fits `y_N` for `lo <= N <= hi`; the branch is tracked over all values.
#[allow(clippy::needless_range_loop)]
pub fn fit_growth_window(values: &[(u32, Complex)], xi: &Complex, lo: u32, hi: u32) -> Result<GrowthFit> {
    let prec = prec_of(xi);
    let ys: Vec<_> = growth_series(values, xi)?
        .into_iter()
        .filter(|(n, _)| (lo..=hi).contains(n))
        .collect();
    if ys.len() < 3 {
        return Err(Error::Domain("fit window has fewer than three points".into()));
    }
    // normal equations with real basis (1, 1/N, 1/N^2) and complex data
    let basis = |n: u32| {
        let x = Float::with_val(prec, n).recip();
        [Float::with_val(prec, 1), x.clone(), x.square()]
    };
    let mut a: Vec<Vec<Float>> = vec![vec![Float::new(prec); 3]; 3];
    let mut rhs: Vec<Complex> = vec![Complex::new(prec); 3];
    for (n, y) in &ys {
        let b = basis(*n);
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += Float::with_val(prec, &b[i] * &b[j]);
            }
            rhs[i] += Complex::with_val(prec, y * &b[i]);
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].clone().abs().partial_cmp(&a[j][col].clone().abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..3 {
            let f = Float::with_val(prec, &a[row][col] / &a[col][col]);
            for k in col..3 {
                let t = Float::with_val(prec, &f * &a[col][k]);
                a[row][k] -= t;
            }
            let t = Complex::with_val(prec, &rhs[col] * &f);
            rhs[row] -= t;
        }
    }
    let mut coef = vec![Complex::new(prec); 3];
    for row in (0..3).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..3 {
            acc -= Complex::with_val(prec, &coef[k] * &a[row][k]);
        }
        coef[row] = acc / &a[row][row];
    }
    let mut ss = 0.0;
    for (n, y) in &ys {
        let b = basis(*n);
        let mut m = coef[0].clone();
        m += Complex::with_val(prec, &coef[1] * &b[1]);
        m += Complex::with_val(prec, &coef[2] * &b[2]);
        ss += abs_f64(&(m - y)).powi(2);
    }
    let first = ys.first().map(|x| x.0).unwrap_or(lo);
    let last = ys.last().map(|x| x.0).unwrap_or(hi);
    Ok(GrowthFit {
        s: coef[0].clone(),
        c1: coef[1].clone(),
        c2: coef[2].clone(),
        residual_rms: (ss / ys.len() as f64).sqrt(),
        n_range: (first, last),
    })
}

/// Fits over every available `y_N`.
pub fn fit_growth(values: &[(u32, Complex)], xi: &Complex) -> Result<GrowthFit> {
    if values.len() < 10 {
        return Err(Error::Domain("need at least ten consecutive values".into()));
    }
    fit_growth_window(values, xi, 0, u32::MAX)
}
