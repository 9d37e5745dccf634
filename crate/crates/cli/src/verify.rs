//! Check suites behind `knotasym verify`.

use rayon::prelude::*;
use serde::Serialize;

use knotasym::asymptotics::*;
use knotasym::jones::{jones_fig8, XiParams};
use knotasym::numerics::{abs_f64, cplx, kappa, log, pi, pow2_neg, two_pi_i};
use knotasym::potential::{assemble_jones, big_f, f1, f2, f3, sigma_m, PotentialCtx};
use knotasym::qdilog::*;
use knotasym::special::{l012, l012_shift_residual, li2, Level};
use knotasym::{Complex, Float};

use crate::Suite;

#[derive(Debug, Serialize)]
pub struct Check {
    pub check_name: String,
    /// `None` when the computation itself failed.
    pub measured: Option<f64>,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// Passes when `|measured - expected| <= tolerance`.
    fn within(name: impl Into<String>, measured: knotasym::Result<f64>, expected: f64, tolerance: f64) -> Self {
        let (measured, note) = match measured {
            Ok(v) if v.is_finite() => (Some(v), None),
            Ok(v) => (None, Some(format!("non-finite value {v}"))),
            Err(e) => (None, Some(e.to_string())),
        };
        let pass = measured.is_some_and(|m| (m - expected).abs() <= tolerance);
        Check { check_name: name.into(), measured, expected, tolerance, pass, note }
    }

    /// A yes/no property, reported as 1 or 0 against 1.
    fn holds(name: impl Into<String>, ok: bool, note: String) -> Self {
        Check {
            check_name: name.into(),
            measured: Some(if ok { 1.0 } else { 0.0 }),
            expected: 1.0,
            tolerance: 0.0,
            pass: ok,
            note: Some(note),
        }
    }

    fn note(mut self, s: String) -> Self {
        self.note = Some(match self.note {
            Some(n) => format!("{n}; {s}"),
            None => s,
        });
        self
    }
}

pub fn run(suite: Suite, prec: u32) -> Vec<Check> {
    match suite {
        Suite::Tn => tn_suite(prec.max(192)),
        Suite::Poisson => poisson_suite(),
        Suite::Saddle => saddle_suite(prec.max(128)),
        Suite::Main => main_suite(prec.max(128)),
        Suite::Gvc => gvc_suite(prec.max(128)),
        Suite::Assembly => assembly_suite(prec.max(128)),
    }
}

fn worst<I: IntoIterator<Item = knotasym::Result<Complex>>>(it: I) -> knotasym::Result<f64> {
    let mut w = 0.0f64;
    for r in it {
        w = w.max(abs_f64(&r?));
    }
    Ok(w)
}

fn lattice(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect()
}

type Residual = fn(&Complex, &QDParams) -> knotasym::Result<Complex>;
type Job = (String, Vec<(f64, f64)>, Residual, QDParams);

fn tn_suite(prec: u32) -> Vec<Check> {
    let tol = pow2_neg(prec, prec as i32 - 20).to_f64();
    let mut jobs: Vec<Job> = Vec::new();
    for (p, n) in [(1u32, 50u32), (1, 100), (2, 60)] {
        let gamma = XiParams::new(kappa(prec), p, 1, prec).gamma();
        let q = match QDParams::new(gamma, n, prec) {
            Ok(q) => q,
            Err(e) => return vec![Check::within(format!("T_N setup p={p} N={n}"), Err(e), 0.0, tol)],
        };
        let e = q.edge().to_f64();
        let ys = [-0.4, -0.1, 0.15, 0.45];
        let s = p as f64 / n as f64;
        let omega: Vec<_> = lattice(&[-0.75, -0.45, -0.15, 1.15, 1.45, 1.75], &[-0.35, 0.05, 0.3, 0.6])
            .into_iter()
            .filter(|&(x, y)| in_omega(&cplx(prec, x, y), &q))
            .collect();
        let mut tricky = lattice(&[0.0], &[0.0, 0.01, -0.02, 0.05, -0.1, 0.2, 0.3]);
        tricky.extend(lattice(&[0.2 * s, 0.6 * s, -0.2 * s, -0.6 * s], &[-0.05, 0.05, 0.2]));
        let tag = format!("p={p} N={n}");
        jobs.push((format!("unit shift, base strip, {tag}"), lattice(&[-0.8 * e, -0.4 * e, 0.0, 0.4 * e, 0.8 * e], &ys), residual_unit_shift, q.clone()));
        jobs.push((format!("unit shift, extended, {tag}"), lattice(&[-0.7, -0.35, 0.2, 0.55, 0.85], &ys), residual_unit_shift, q.clone()));
        jobs.push((format!("gamma shift, strip, {tag}"), lattice(&[0.1, 0.3, 0.5, 0.7, 0.9], &ys), residual_gamma_shift, q.clone()));
        jobs.push((format!("gamma shift, Omega, {tag}"), omega, residual_gamma_shift, q.clone()));
        jobs.push((format!("three-case identity incl. z=0, {tag}"), tricky, residual_tricky, q));
    }
    let mut out: Vec<Check> = jobs
        .par_iter()
        .map(|(name, pts, f, q)| {
            let m = worst(pts.iter().map(|&(x, y)| f(&cplx(prec, x, y), q)));
            Check::within(name.clone(), m, 0.0, tol).note(format!("{} points", pts.len()))
        })
        .collect();

    let shift = (|| {
        let mut w = 0.0f64;
        for (x, y) in [(0.3, -0.2), (-0.7, -1.1), (1.4, -0.05), (0.0, -0.5)] {
            let (a, b) = l012_shift_residual(&cplx(prec, x, y))?;
            w = w.max(abs_f64(&a)).max(abs_f64(&b));
        }
        Ok(w)
    })();
    out.push(Check::within("L0/L1/L2 shift identities", shift, 0.0, tol));

    // derivatives by central differences at doubled working precision
    let wp = 2 * prec;
    let h = pow2_neg(wp, (wp / 3) as i32);
    let tpi = two_pi_i(wp);
    let deriv = (|| {
        let mut w = 0.0f64;
        for (x, y) in [(0.3, 0.2), (0.6, -0.3), (-0.4, 0.5), (1.2, -0.7)] {
            let z = cplx(wp, x, y);
            let zp = Complex::with_val(wp, &z + &h);
            let zm = Complex::with_val(wp, &z - &h);
            let two_h = Float::with_val(wp, &h * 2u32);
            let d2 = (l012(Level::L2, &zp)? - l012(Level::L2, &zm)?) / &two_h;
            let d1 = (l012(Level::L1, &zp)? - l012(Level::L1, &zm)?) / &two_h;
            let r2 = d2 + Complex::with_val(wp, &tpi * l012(Level::L1, &z)?);
            let e = Complex::with_val(wp, Complex::with_val(wp, &tpi * &z) * -1i32).exp();
            let r1 = d1 - Complex::with_val(wp, &tpi / Complex::with_val(wp, 1 - e));
            w = w.max(abs_f64(&r2)).max(abs_f64(&r1));
        }
        Ok(w)
    })();
    out.push(Check::within("L1/L2 derivatives by central differences", deriv, 0.0, tol));

    let zeta2 = Float::with_val(prec, pi(prec).square_ref()) / 6u32;
    let dilog = (|| {
        let mut w = 0.0f64;
        for (x, y) in [(-2.0, 0.0), (3.0, 1.0), (-0.5, 4.0), (0.2, -5.0)] {
            let z = cplx(prec, x, y);
            let zi = Complex::with_val(prec, z.recip_ref());
            let l = log(&Complex::with_val(prec, -&z));
            let r = li2(&z)? + li2(&zi)? + &zeta2 + Complex::with_val(prec, l.square_ref()) / 2u32;
            w = w.max(abs_f64(&r));
        }
        Ok(w)
    })();
    out.push(Check::within("Li2 inversion", dilog, 0.0, tol));
    out
}

fn poisson_suite() -> Vec<Check> {
    const P: u32 = 128;
    let mut out = Vec::new();
    let gauss = |z: &Complex| -> knotasym::Result<Complex> {
        let w = Complex::with_val(P, z - 0.5f64);
        Ok(-(w.square()) - 0.1f64)
    };
    let res: knotasym::Result<Vec<f64>> = [20u32, 40, 80].iter().map(|&n| poisson_residual(gauss, 0.0, 1.0, n, P, None)).collect();
    match res {
        Ok(r) => {
            let bound = (-0.05f64 * 40.0).exp();
            out.push(Check::holds(
                "Gaussian family: r(80)/r(40) below e^{-2}",
                r[2] / r[1] < bound,
                format!("r(80)/r(40) = {:.3e}", r[2] / r[1]),
            ));
            out.push(Check::holds(
                "Gaussian family: decay accelerates",
                r[2] / r[1] < 1.5 * r[1] / r[0],
                format!("residuals {:.3e} {:.3e} {:.3e}", r[0], r[1], r[2]),
            ));
        }
        Err(e) => out.push(Check::within("Gaussian family", Err(e), 0.0, 0.0)),
    }

    // psi = -1: residual = e^{-N} |(#samples)/N - (b - a)|
    let (a, b, n) = (0.1, 0.85, 40u32);
    let konst = |_: &Complex| Ok(Complex::with_val(P, -1));
    let count = ((b * n as f64).floor() - (a * n as f64).ceil() + 1.0) / n as f64;
    let exact = (-(n as f64)).exp() * (count - (b - a)).abs();
    out.push(Check::within("constant psi = -1", poisson_residual(konst, a, b, n, P, None), exact, 1e-12 * exact));

    // psi_N = varphi_{0,N} - varphi_{0,N}(sigma_0), p = 1, on [0, 1 - delta]
    let hp = 96;
    let lp = 64;
    let n = 60;
    let ctx = match PotentialCtx::new(XiParams::new(kappa(hp), 1, n, hp), 0) {
        Ok(c) => c,
        Err(e) => {
            out.push(Check::within("potential setup", Err(e), 0.0, 0.0));
            return out;
        }
    };
    let delta = ctx.delta;
    let ends = [0.0, 1.0 - delta];
    for (label, x) in ["a = 0", "b = 1 - delta"].iter().zip(ends) {
        let h = ctx.height(&cplx(hp, x, 0.0)).map(|h| h.to_f64());
        let ok = h.as_ref().is_ok_and(|h| *h < 0.0);
        out.push(Check::holds(format!("endpoint {label} below the saddle height"), ok, format!(
                "Re Phi_0 - Re Phi_0(sigma_0) = {}, delta = {delta}",
                h.as_ref().map_or_else(|e| e.to_string(), |v| format!("{v:.4e}"))
            )));
    }
    let sigma = ctx.sigma();
    let run = || -> knotasym::Result<(f64, f64)> {
        let f0 = ctx.varphi_mn(&sigma)?;
        // psi at 96 bits, quadrature at 64: keeps the adaptive rule off the rounding floor
        let psi = |z: &Complex| Ok(Complex::with_val(lp, ctx.varphi_mn(&Complex::with_val(hp, z))? - &f0));
        let k1 = ((1.0 - delta) * n as f64).floor() as u32;
        let mut sum = Complex::new(lp);
        for k in 0..=k1 {
            let z = Complex::with_val(lp, (Float::with_val(lp, k) / n, 0));
            sum += Complex::with_val(lp, psi(&z)? * n).exp();
        }
        sum /= n;
        Ok((poisson_residual(psi, 0.0, 1.0 - delta, n, lp, None)?, abs_f64(&sum)))
    };
    let rel = run().map(|(r, s)| r / s);
    out.push(Check::within("potential psi_N, p=1, N=60: residual relative to the sum", rel, 0.0, 0.1));
    out
}

fn saddle_suite(prec: u32) -> Vec<Check> {
    let mut out = Vec::new();
    for p in 1..=3u32 {
        let xp = XiParams::new(kappa(prec), p, 100, prec);
        let x = xp.xi();
        let s0 = sigma_m(&xp, 0);
        let fp = Complex::with_val(prec, Float::with_val(prec, pi(prec).square_ref()) * (4 * p)) / &x;
        let m2x2 = Complex::with_val(prec, x.square_ref()) * -2i32;
        let tol = 1e-25;
        out.push(Check::within(format!("F(sigma_0) = 4 p pi^2/xi, p={p}"), big_f(&s0, &xp).map(|v| abs_f64(&(v - &fp))), 0.0, tol));
        out.push(Check::within(format!("F'(sigma_0) = 0, p={p}"), f1(&s0, &xp).map(|v| abs_f64(&v)), 0.0, tol));
        out.push(Check::within(format!("F''(sigma_0) = 0, p={p}"), f2(&s0, &xp).map(|v| abs_f64(&v)), 0.0, tol));
        out.push(Check::within(format!("F'''(sigma_0) = -2 xi^2, p={p}"), f3(&s0, &xp).map(|v| abs_f64(&(v - &m2x2))), 0.0, tol));
    }
    let c = cplx(prec, -1.0, 0.0);
    let path = Saddle2Path::ThroughCentres { radius: 1.5 };
    let devs: knotasym::Result<Vec<f64>> = [50u32, 100, 200, 400]
        .iter()
        .map(|&n| saddle2_model(&c, n, 1, &path, |z: &Complex| Complex::with_val(prec, z.exp_ref())).map(|s| s.rel_deviation()))
        .collect();
    let target = 2f64.powf(-1.0 / 3.0);
    match devs {
        Ok(d) => {
            for (i, w) in d.windows(2).enumerate() {
                let n = 50 << i;
                let name = format!("order-two saddle: deviation ratio N={}/{n}", 2 * n);
                out.push(Check::within(name, Ok(w[1] / w[0]), target, 0.2 * target));
            }
        }
        Err(e) => out.push(Check::within("order-two saddle", Err(e), target, 0.2 * target)),
    }
    out
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn main_suite(prec: u32) -> Vec<Check> {
    let mut out = Vec::new();
    let ns = [100u32, 200, 400, 800];
    let errs: knotasym::Result<Vec<f64>> = ns
        .par_iter()
        .map(|&n| ratio_main(n, 1, prec).map(|r| abs_f64(&(r - 1u32))))
        .collect();
    match errs {
        Ok(e) => {
            out.push(Check::holds(
                "main formula, p=1: |ratio - 1| decreases",
                e.windows(2).all(|w| w[1] < w[0]),
                format!("{:?}", e.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>()),
            ));
            let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
            let ys: Vec<f64> = e.iter().map(|x| x.ln()).collect();
            out.push(Check::within("main formula, p=1: log-log slope", Ok(slope(&xs, &ys)), -1.0 / 3.0, 0.15));
        }
        Err(e) => out.push(Check::within("main formula, p=1", Err(e), 0.0, 0.0)),
    }
    let h: Vec<f64> = [200u32, 400].par_iter().map(|&n| abs_f64(&(ratio_hikami(n, prec) - 1u32))).collect();
    out.push(Check::within("real parameter: |ratio - 1| at N=400", Ok(h[1]), 0.0, 0.1));
    out.push(Check::holds("real parameter: N=400 closer than N=200", h[1] < h[0], format!("{:.4e} {:.4e}", h[0], h[1])));
    out
}

fn gvc_suite(prec: u32) -> Vec<Check> {
    let mut out = Vec::new();
    for u in [0.3, 0.5, 0.8] {
        let uf = Float::with_val(prec, u);
        let d: knotasym::Result<Vec<f64>> = [100u32, 200, 400]
            .par_iter()
            .map(|&n| ratio_gvc(n, &uf, 1, prec).map(|r| abs_f64(&(r - 1u32))))
            .collect();
        match d {
            Ok(d) => {
                out.push(Check::holds(
                    format!("u={u}: |ratio - 1| decreases"),
                    d[1] < d[0] && d[2] < d[1],
                    format!("{:.3e} {:.3e} {:.3e}", d[0], d[1], d[2]),
                ));
                out.push(Check::within(format!("u={u}: |ratio - 1| at N=400"), Ok(d[2]), 0.0, 0.02));
            }
            Err(e) => out.push(Check::within(format!("u={u}"), Err(e), 0.0, 0.02)),
        }
    }
    let at_kappa = rhs_gvc(100, &kappa(prec), 1, prec);
    out.push(Check::holds("u = kappa is rejected", at_kappa.is_err(), format!("{:?}", at_kappa.err())));
    out
}

fn assembly_suite(base: u32) -> Vec<Check> {
    [(1u32, 40u32, 128u32), (2, 40, 128), (1, 80, 160), (2, 80, 160)]
        .par_iter()
        .map(|&(p, n, prec)| {
            let prec = prec.max(base);
            let xp = XiParams::new(kappa(prec), p, n, prec);
            let direct = jones_fig8(n, &xp.q());
            let rel = assemble_jones(&xp).map(|a| abs_f64(&Complex::with_val(prec, &a - &direct)) / abs_f64(&direct));
            Check::within(format!("assembled J_N vs direct sum, p={p} N={n}"), rel, 0.0, 1e-20)
        })
        .collect()
}
